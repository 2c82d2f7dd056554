//! Discrete universes, fuzzy sets, and relational inference.
//!
//! The composition `y = x ∘ R` is evaluated over finite grids. Max-min is
//! the default semantics; max-product is selectable so the relational and
//! probabilistic readings of the same rule base can be compared.

use crate::error::{Error, Result};
use crate::rulebase::RuleBase;

/// A uniformly spaced, endpoint-inclusive grid over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Universe {
    name: String,
    lo: f64,
    hi: f64,
    n: usize,
}

impl Universe {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let name = name.into();
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidUniverse(format!(
                "`{name}`: bounds must be finite"
            )));
        }
        if lo >= hi {
            return Err(Error::InvalidUniverse(format!(
                "`{name}`: lo ({lo}) must be < hi ({hi})"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidUniverse(format!(
                "`{name}`: need at least 2 grid points, got {n}"
            )));
        }
        Ok(Self { name, lo, hi, n })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 2 by construction
    }

    /// The k-th grid point. Endpoints are exact: `point(0) == lo` and
    /// `point(n-1) == hi` without rounding residue.
    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k < self.n);
        let t = k as f64 / (self.n - 1) as f64;
        self.lo * (1.0 - t) + self.hi * t
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.point(k))
    }

    /// Index of the grid point nearest to `x`, after clamping `x` to
    /// `[lo, hi]`. Exact midpoints resolve to the lower index.
    pub fn nearest_index(&self, x: f64) -> usize {
        let x = x.clamp(self.lo, self.hi);
        let t = (x - self.lo) / (self.hi - self.lo) * (self.n - 1) as f64;
        let k = t.floor();
        let idx = if t - k > 0.5 {
            k as usize + 1
        } else {
            k as usize
        };
        idx.min(self.n - 1)
    }
}

/// Parametric membership function on a universe's axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
    Singleton { p: f64 },
}

fn check_ordered(params: &[f64], kind: &str) -> Result<()> {
    if params.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidMembershipFunction(format!(
            "{kind}: parameters must be finite"
        )));
    }
    if params.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidMembershipFunction(format!(
            "{kind}: parameters must be nondecreasing, got {params:?}"
        )));
    }
    Ok(())
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        check_ordered(&[a, b, c], "triangular")?;
        Ok(Self::Triangular { a, b, c })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        check_ordered(&[a, b, c, d], "trapezoidal")?;
        Ok(Self::Trapezoidal { a, b, c, d })
    }

    pub fn singleton(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidMembershipFunction(
                "singleton: position must be finite".into(),
            ));
        }
        Ok(Self::Singleton { p })
    }

    /// Piecewise-linear evaluation, clamped to `[0, 1]`.
    ///
    /// A singleton grades 1 only at its exact position here; snapping to the
    /// nearest grid point happens in [`MembershipFunction::discretize`],
    /// which is where a grid exists.
    pub fn eval(&self, x: f64) -> f64 {
        let g = match *self {
            Self::Triangular { a, b, c } => {
                if x < a || x > c {
                    0.0
                } else if x <= b {
                    // x == a == b is the degenerate left shoulder: grade 1
                    if a == b {
                        1.0
                    } else {
                        (x - a) / (b - a)
                    }
                } else {
                    // b < x <= c, so c > b and the slope is well defined
                    (c - x) / (c - b)
                }
            }
            Self::Trapezoidal { a, b, c, d } => {
                if x < a || x > d {
                    0.0
                } else if x < b {
                    // a <= x < b, so b > a
                    (x - a) / (b - a)
                } else if x <= c {
                    1.0
                } else {
                    // c < x <= d, so d > c
                    (d - x) / (d - c)
                }
            }
            Self::Singleton { p } => {
                if x == p {
                    1.0
                } else {
                    0.0
                }
            }
        };
        g.clamp(0.0, 1.0)
    }

    /// Sample the function at every grid point of `u`.
    ///
    /// Singletons snap to the grid point nearest their position (ties to the
    /// lower index) instead of being sampled, so an off-grid singleton still
    /// produces a one-hot vector.
    pub fn discretize(&self, u: &Universe) -> MembershipVector {
        match *self {
            Self::Singleton { p } => MembershipVector::one_hot(u.clone(), u.nearest_index(p)),
            _ => {
                let grades = u.points().map(|x| self.eval(x)).collect();
                MembershipVector {
                    universe: u.clone(),
                    grades,
                }
            }
        }
    }
}

/// Grades in `[0, 1]` over a universe's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVector {
    universe: Universe,
    grades: Vec<f64>,
}

impl MembershipVector {
    pub fn new(universe: Universe, grades: Vec<f64>) -> Result<Self> {
        if grades.len() != universe.len() {
            return Err(Error::LengthMismatch {
                expected: universe.len(),
                actual: grades.len(),
            });
        }
        for &g in &grades {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::GradeOutOfRange { value: g });
            }
        }
        Ok(Self { universe, grades })
    }

    pub fn one_hot(universe: Universe, index: usize) -> Self {
        assert!(index < universe.len(), "one-hot index out of range");
        let mut grades = vec![0.0; universe.len()];
        grades[index] = 1.0;
        Self { universe, grades }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn max_grade(&self) -> f64 {
        self.grades.iter().copied().fold(0.0, f64::max)
    }

    /// True when every grade is exactly zero.
    pub fn has_no_support(&self) -> bool {
        self.grades.iter().all(|&g| g == 0.0)
    }
}

/// An `m x n` matrix of grades linking two universes.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    domain: Universe,
    codomain: Universe,
    entries: Vec<f64>, // row-major, m rows of n
}

impl Relation {
    pub fn new(domain: Universe, codomain: Universe, entries: Vec<f64>) -> Result<Self> {
        let expected = domain.len() * codomain.len();
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: entries.len(),
            });
        }
        for &g in &entries {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::GradeOutOfRange { value: g });
            }
        }
        Ok(Self {
            domain,
            codomain,
            entries,
        })
    }

    /// Build from nested rows; rows must all have the codomain's length.
    pub fn from_rows(domain: Universe, codomain: Universe, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                actual: rows.len(),
            });
        }
        let mut entries = Vec::with_capacity(domain.len() * codomain.len());
        for row in rows {
            if row.len() != codomain.len() {
                return Err(Error::LengthMismatch {
                    expected: codomain.len(),
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(domain, codomain, entries)
    }

    pub fn identity(u: &Universe) -> Self {
        let n = u.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            domain: u.clone(),
            codomain: u.clone(),
            entries,
        }
    }

    pub fn domain(&self) -> &Universe {
        &self.domain
    }

    pub fn codomain(&self) -> &Universe {
        &self.codomain
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.codomain.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.codomain.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.codomain.len())
    }
}

/// T-norm used inside the sup-T composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionSemantics {
    #[default]
    MaxMin,
    MaxProduct,
}

/// Relational inference: `y(j) = max_i T(x(i), R(i,j))` with T = min or product.
pub fn compose(
    x: &MembershipVector,
    rel: &Relation,
    sem: CompositionSemantics,
) -> Result<MembershipVector> {
    if x.universe() != rel.domain() {
        return Err(Error::UniverseMismatch {
            expected: rel.domain().name().to_string(),
            actual: x.universe().name().to_string(),
        });
    }
    let n = rel.codomain().len();
    let mut out = vec![0.0; n];
    for (i, &xi) in x.grades().iter().enumerate() {
        let row = rel.row(i);
        for j in 0..n {
            let t = match sem {
                CompositionSemantics::MaxMin => xi.min(row[j]),
                CompositionSemantics::MaxProduct => xi * row[j],
            };
            if t > out[j] {
                out[j] = t;
            }
        }
    }
    Ok(MembershipVector {
        universe: rel.codomain().clone(),
        grades: out,
    })
}

/// Mamdani construction: `R(i,j) = max over rules of min(A_r(i), B_r(j))`.
///
/// The rule base guarantees at least one rule and resolvable set names, so
/// this cannot fail.
pub fn relation_from_rules(rb: &RuleBase) -> Relation {
    let domain = rb.input_universe().clone();
    let codomain = rb.output_universe().clone();
    let m = domain.len();
    let n = codomain.len();
    let mut entries = vec![0.0; m * n];
    for rule in rb.rules() {
        let ante = rb
            .input_set(&rule.antecedent)
            .expect("rule base validated at construction")
            .discretize(&domain);
        let cons = rb
            .output_set(&rule.consequent)
            .expect("rule base validated at construction")
            .discretize(&codomain);
        for (i, &ai) in ante.grades().iter().enumerate() {
            for (j, &bj) in cons.grades().iter().enumerate() {
                let v = ai.min(bj);
                let slot = &mut entries[i * n + j];
                if v > *slot {
                    *slot = v;
                }
            }
        }
    }
    Relation {
        domain,
        codomain,
        entries,
    }
}
