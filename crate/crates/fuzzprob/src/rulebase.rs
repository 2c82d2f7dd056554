//! Rule-base model and its line-oriented text format.
//!
//! The format is deliberately trivial to parse and diff:
//!
//! ```text
//! universe <name> <lo> <hi> <n>
//! set <universe> <setname> tri <a> <b> <c>
//! set <universe> <setname> trap <a> <b> <c> <d>
//! set <universe> <setname> singleton <p>
//! rule if <input-set> then <output-set>
//! ```
//!
//! Exactly two universes must be declared; the first is the input axis, the
//! second the output axis. `#` starts a comment (whole-line or trailing),
//! blank lines are ignored, tokens are whitespace-separated.

use crate::error::{Error, Result};
use crate::fuzzy::{MembershipFunction, Universe};

/// One if-then rule, by set name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub antecedent: String,
    pub consequent: String,
}

/// A single-input single-output rule base: two universes, named sets on
/// each, and at least one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    input: Universe,
    output: Universe,
    input_sets: Vec<(String, MembershipFunction)>,
    output_sets: Vec<(String, MembershipFunction)>,
    rules: Vec<Rule>,
}

impl RuleBase {
    pub fn input_universe(&self) -> &Universe {
        &self.input
    }

    pub fn output_universe(&self) -> &Universe {
        &self.output
    }

    pub fn input_set(&self, name: &str) -> Option<&MembershipFunction> {
        self.input_sets
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, mf)| mf)
    }

    pub fn output_set(&self, name: &str) -> Option<&MembershipFunction> {
        self.output_sets
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, mf)| mf)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Parse the text format described in the module docs.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        Parser::new(text).run()
    }
}

/// Programmatic construction with the same validation as the parser.
#[derive(Debug)]
pub struct RuleBaseBuilder {
    input: Universe,
    output: Universe,
    input_sets: Vec<(String, MembershipFunction)>,
    output_sets: Vec<(String, MembershipFunction)>,
    rules: Vec<Rule>,
}

impl RuleBaseBuilder {
    pub fn new(input: Universe, output: Universe) -> Self {
        Self {
            input,
            output,
            input_sets: Vec::new(),
            output_sets: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn input_set(&mut self, name: &str, mf: MembershipFunction) -> Result<&mut Self> {
        if self.input_sets.iter().any(|(n, _)| n == name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.input_sets.push((name.to_string(), mf));
        Ok(self)
    }

    pub fn output_set(&mut self, name: &str, mf: MembershipFunction) -> Result<&mut Self> {
        if self.output_sets.iter().any(|(n, _)| n == name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.output_sets.push((name.to_string(), mf));
        Ok(self)
    }

    pub fn rule(&mut self, antecedent: &str, consequent: &str) -> Result<&mut Self> {
        if !self.input_sets.iter().any(|(n, _)| n == antecedent) {
            return Err(Error::UndeclaredSet(antecedent.to_string()));
        }
        if !self.output_sets.iter().any(|(n, _)| n == consequent) {
            return Err(Error::UndeclaredSet(consequent.to_string()));
        }
        self.rules.push(Rule {
            antecedent: antecedent.to_string(),
            consequent: consequent.to_string(),
        });
        Ok(self)
    }

    pub fn build(self) -> Result<RuleBase> {
        if self.rules.is_empty() {
            return Err(Error::EmptyRuleBase);
        }
        Ok(RuleBase {
            input: self.input,
            output: self.output,
            input_sets: self.input_sets,
            output_sets: self.output_sets,
            rules: self.rules,
        })
    }
}

/// Parse failures, each anchored to a 1-based line number.
///
/// Three classes: an empty file, a syntax error (the line cannot be read as
/// a directive), and a semantic error (a well-formed directive that violates
/// a constraint, such as an undeclared name or a third universe).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty rule-base file")]
    Empty,

    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("line {line}: semantic error: {msg}")]
    Semantic { line: usize, msg: String },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { line, .. } | ParseError::Semantic { line, .. } => Some(*line),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    universes: Vec<Universe>,
    input_sets: Vec<(String, MembershipFunction)>,
    output_sets: Vec<(String, MembershipFunction)>,
    rules: Vec<Rule>,
    last_line: usize,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn semantic(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic {
        line,
        msg: msg.into(),
    }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            universes: Vec::new(),
            input_sets: Vec::new(),
            output_sets: Vec::new(),
            rules: Vec::new(),
            last_line: 1,
        }
    }

    fn run(mut self) -> std::result::Result<RuleBase, ParseError> {
        let mut saw_directive = false;
        for (idx, raw) in self.text.lines().enumerate() {
            let line_no = idx + 1;
            self.last_line = line_no;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            saw_directive = true;
            match tokens[0] {
                "universe" => self.universe(line_no, &tokens)?,
                "set" => self.set(line_no, &tokens)?,
                "rule" => self.rule(line_no, &tokens)?,
                other => {
                    return Err(syntax(line_no, format!("unknown directive `{other}`")));
                }
            }
        }
        if !saw_directive {
            return Err(ParseError::Empty);
        }
        if self.universes.len() < 2 {
            return Err(semantic(
                self.last_line,
                format!("expected two universes, found {}", self.universes.len()),
            ));
        }
        if self.rules.is_empty() {
            return Err(semantic(self.last_line, "empty rule base"));
        }
        let mut it = self.universes.into_iter();
        Ok(RuleBase {
            input: it.next().unwrap(),
            output: it.next().unwrap(),
            input_sets: self.input_sets,
            output_sets: self.output_sets,
            rules: self.rules,
        })
    }

    fn number(&self, line: usize, tok: &str) -> std::result::Result<f64, ParseError> {
        tok.parse::<f64>()
            .map_err(|_| syntax(line, format!("malformed number `{tok}`")))
    }

    fn universe(&mut self, line: usize, tokens: &[&str]) -> std::result::Result<(), ParseError> {
        if tokens.len() != 5 {
            return Err(syntax(
                line,
                format!("`universe` takes 4 arguments, got {}", tokens.len() - 1),
            ));
        }
        let name = tokens[1];
        if self.universes.iter().any(|u| u.name() == name) {
            return Err(semantic(line, format!("duplicate universe `{name}`")));
        }
        if self.universes.len() == 2 {
            return Err(semantic(line, "expected exactly two universes"));
        }
        let lo = self.number(line, tokens[2])?;
        let hi = self.number(line, tokens[3])?;
        let n: usize = tokens[4]
            .parse()
            .map_err(|_| syntax(line, format!("malformed point count `{}`", tokens[4])))?;
        let u = Universe::new(name, lo, hi, n).map_err(|e| semantic(line, e.to_string()))?;
        self.universes.push(u);
        Ok(())
    }

    fn set(&mut self, line: usize, tokens: &[&str]) -> std::result::Result<(), ParseError> {
        if tokens.len() < 4 {
            return Err(syntax(
                line,
                "`set` takes <universe> <name> <kind> <params...>",
            ));
        }
        let uni_name = tokens[1];
        let set_name = tokens[2];
        let kind = tokens[3];
        let params: Vec<f64> = tokens[4..]
            .iter()
            .map(|t| self.number(line, t))
            .collect::<std::result::Result<_, _>>()?;
        let arity_err = |want: usize| {
            syntax(
                line,
                format!("`{kind}` takes {want} parameters, got {}", params.len()),
            )
        };
        let mf = match kind {
            "tri" => {
                if params.len() != 3 {
                    return Err(arity_err(3));
                }
                MembershipFunction::triangular(params[0], params[1], params[2])
            }
            "trap" => {
                if params.len() != 4 {
                    return Err(arity_err(4));
                }
                MembershipFunction::trapezoidal(params[0], params[1], params[2], params[3])
            }
            "singleton" => {
                if params.len() != 1 {
                    return Err(arity_err(1));
                }
                MembershipFunction::singleton(params[0])
            }
            other => {
                return Err(syntax(line, format!("unknown set kind `{other}`")));
            }
        }
        .map_err(|e| semantic(line, e.to_string()))?;

        let slot = match self.universes.iter().position(|u| u.name() == uni_name) {
            Some(0) => &mut self.input_sets,
            Some(_) => &mut self.output_sets,
            None => {
                return Err(semantic(line, format!("undeclared universe `{uni_name}`")));
            }
        };
        if slot.iter().any(|(n, _)| n == set_name) {
            return Err(semantic(
                line,
                format!("duplicate set `{set_name}` on universe `{uni_name}`"),
            ));
        }
        slot.push((set_name.to_string(), mf));
        Ok(())
    }

    fn rule(&mut self, line: usize, tokens: &[&str]) -> std::result::Result<(), ParseError> {
        if tokens.len() != 5 || tokens[1] != "if" || tokens[3] != "then" {
            return Err(syntax(line, "expected `rule if <inset> then <outset>`"));
        }
        let (ante, cons) = (tokens[2], tokens[4]);
        if self.universes.len() < 2 {
            return Err(semantic(line, "rule before both universes are declared"));
        }
        if !self.input_sets.iter().any(|(n, _)| n == ante) {
            return Err(semantic(line, format!("undeclared input set `{ante}`")));
        }
        if !self.output_sets.iter().any(|(n, _)| n == cons) {
            return Err(semantic(line, format!("undeclared output set `{cons}`")));
        }
        self.rules.push(Rule {
            antecedent: ante.to_string(),
            consequent: cons.to_string(),
        });
        Ok(())
    }
}

/// The reference rule base shipped with the crate, as text.
pub const REFERENCE_RULEBASE: &str = include_str!("../fixtures/reference.rules");

/// Parsed form of [`REFERENCE_RULEBASE`].
pub fn reference_rulebase() -> RuleBase {
    RuleBase::parse(REFERENCE_RULEBASE).expect("shipped reference rule base is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
universe e 0 1 3
universe c 0 1 3
set e A tri 0 0.5 1
set c B tri 0 0.5 1
rule if A then B
";

    #[test]
    fn minimal_file_parses_to_one_rule() {
        let rb = RuleBase::parse(MINIMAL).unwrap();
        assert_eq!(rb.rules().len(), 1);
        assert_eq!(rb.input_universe().name(), "e");
        assert_eq!(rb.output_universe().name(), "c");
        assert!(rb.input_set("A").is_some());
        assert!(rb.output_set("B").is_some());
    }

    #[test]
    fn reference_fixture_has_five_rules_on_11_point_grids() {
        let rb = reference_rulebase();
        assert_eq!(rb.rules().len(), 5);
        assert_eq!(rb.input_universe().len(), 11);
        assert_eq!(rb.output_universe().len(), 11);
        assert_eq!(rb.input_universe().lo(), -5.0);
        assert_eq!(rb.input_universe().hi(), 5.0);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# header\n\n{MINIMAL}\n# trailer\n");
        assert!(RuleBase::parse(&text).is_ok());
        let inline = MINIMAL.replace("rule if A then B", "rule if A then B # identity");
        assert!(RuleBase::parse(&inline).is_ok());
    }

    #[test]
    fn undeclared_rule_set_is_a_semantic_error_with_line_and_name() {
        let text = MINIMAL.replace("rule if A then B", "rule if Foo then B");
        match RuleBase::parse(&text) {
            Err(ParseError::Semantic { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("Foo"), "message should name the set: {msg}");
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_its_own_error() {
        assert_eq!(RuleBase::parse(""), Err(ParseError::Empty));
        assert_eq!(
            RuleBase::parse("# only comments\n\n"),
            Err(ParseError::Empty)
        );
    }

    #[test]
    fn third_universe_is_rejected() {
        let text = format!("{MINIMAL}universe extra 0 1 3\n");
        match RuleBase::parse(&text) {
            Err(ParseError::Semantic { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn missing_rules_is_a_semantic_error() {
        let text = MINIMAL.lines().take(4).collect::<Vec<_>>().join("\n");
        match RuleBase::parse(&text) {
            Err(ParseError::Semantic { msg, .. }) => assert!(msg.contains("empty rule base")),
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_number_is_a_syntax_error() {
        let text = MINIMAL.replace("universe e 0 1 3", "universe e 0 one 3");
        match RuleBase::parse(&text) {
            Err(ParseError::Syntax { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("one"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn builder_enforces_declarations() {
        let iu = Universe::new("i", 0.0, 1.0, 3).unwrap();
        let ou = Universe::new("o", 0.0, 1.0, 3).unwrap();
        let tri = MembershipFunction::triangular(0.0, 0.5, 1.0).unwrap();
        let mut b = RuleBaseBuilder::new(iu.clone(), ou.clone());
        b.input_set("A", tri).unwrap();
        assert!(b.input_set("A", tri).is_err()); // duplicate
        assert!(b.rule("A", "missing").is_err()); // undeclared consequent
        b.output_set("B", tri).unwrap();
        b.rule("A", "B").unwrap();
        assert!(b.build().is_ok());

        let empty = RuleBaseBuilder::new(iu, ou).build();
        assert!(matches!(empty, Err(crate::error::Error::EmptyRuleBase)));
    }
}
