//! The probabilistic reading of relational inference: distributions,
//! row-stochastic conditional matrices, exact marginalization, and the
//! membership-to-distribution bridge.
//!
//! Memberships normalize into distributions, never the other way around:
//! marginalization needs valid probabilities, while grades carry no
//! normalization constraint.

use crate::error::{Error, Result};
use crate::fuzzy::{MembershipVector, Relation, Universe};
use crate::rng::SplitMix64;

/// Tolerance for "sums to one" checks on constructed values.
pub const NORM_TOL: f64 = 1e-12;

/// A probability vector over a universe's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    universe: Universe,
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and that the entries sum to 1 within
    /// [`NORM_TOL`], then renormalizes once to absorb rounding.
    pub fn new(universe: Universe, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != universe.len() {
            return Err(Error::LengthMismatch {
                expected: universe.len(),
                actual: probs.len(),
            });
        }
        Self::check_row(&probs)?;
        let sum: f64 = probs.iter().sum();
        let probs = probs.iter().map(|p| p / sum).collect();
        Ok(Self { universe, probs })
    }

    fn check_row(probs: &[f64]) -> Result<()> {
        for &p in probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "entry {p} is not a finite nonnegative real"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    pub fn one_hot(universe: Universe, index: usize) -> Self {
        assert!(index < universe.len(), "one-hot index out of range");
        let mut probs = vec![0.0; universe.len()];
        probs[index] = 1.0;
        Self { universe, probs }
    }

    pub fn uniform(universe: Universe) -> Self {
        let n = universe.len();
        Self {
            universe,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Row-stochastic matrix: row i is the distribution of the output given
/// input grid point i.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMatrix {
    domain: Universe,
    codomain: Universe,
    rows: Vec<f64>, // row-major
}

impl ConditionalMatrix {
    pub fn new(domain: Universe, codomain: Universe, rows: Vec<f64>) -> Result<Self> {
        let (m, n) = (domain.len(), codomain.len());
        if rows.len() != m * n {
            return Err(Error::LengthMismatch {
                expected: m * n,
                actual: rows.len(),
            });
        }
        let mut normalized = Vec::with_capacity(m * n);
        for i in 0..m {
            let row = &rows[i * n..(i + 1) * n];
            Distribution::check_row(row)
                .map_err(|e| Error::InvalidDistribution(format!("row {i}: {e}")))?;
            let sum: f64 = row.iter().sum();
            normalized.extend(row.iter().map(|p| p / sum));
        }
        Ok(Self {
            domain,
            codomain,
            rows: normalized,
        })
    }

    pub fn domain(&self) -> &Universe {
        &self.domain
    }

    pub fn codomain(&self) -> &Universe {
        &self.codomain
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.codomain.len();
        &self.rows[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.codomain.len() + j]
    }
}

/// What to do with an all-zero relation row when normalizing it into a
/// conditional distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroRowPolicy {
    /// Fail, naming the offending row. The default: a zero row usually
    /// means a modeling bug in the rule base.
    #[default]
    Error,
    /// Substitute the uniform row `1/n`.
    Uniform,
}

/// Normalize a membership vector into a distribution by dividing by its sum.
pub fn normalize_to_distribution(x: &MembershipVector) -> Result<Distribution> {
    let sum: f64 = x.grades().iter().sum();
    if sum == 0.0 {
        return Err(Error::EmptyEvidence);
    }
    Ok(Distribution {
        universe: x.universe().clone(),
        probs: x.grades().iter().map(|g| g / sum).collect(),
    })
}

/// Normalize each relation row into a conditional distribution.
pub fn conditional_from_relation(
    rel: &Relation,
    policy: ZeroRowPolicy,
) -> Result<ConditionalMatrix> {
    let n = rel.codomain().len();
    let mut rows = Vec::with_capacity(rel.domain().len() * n);
    for (i, row) in rel.rows().enumerate() {
        let sum: f64 = row.iter().sum();
        if sum == 0.0 {
            match policy {
                ZeroRowPolicy::Error => return Err(Error::ZeroRow { row: i }),
                ZeroRowPolicy::Uniform => rows.extend(std::iter::repeat_n(1.0 / n as f64, n)),
            }
        } else {
            rows.extend(row.iter().map(|g| g / sum));
        }
    }
    Ok(ConditionalMatrix {
        domain: rel.domain().clone(),
        codomain: rel.codomain().clone(),
        rows,
    })
}

/// Exact marginalization: `pY(j) = sum_i pX(i) * P(i, j)`.
pub fn marginal_exact(px: &Distribution, cond: &ConditionalMatrix) -> Result<Distribution> {
    if px.universe() != cond.domain() {
        return Err(Error::UniverseMismatch {
            expected: cond.domain().name().to_string(),
            actual: px.universe().name().to_string(),
        });
    }
    let n = cond.codomain().len();
    let mut out = vec![0.0; n];
    for (i, &pi) in px.probs().iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (j, &pij) in cond.row(i).iter().enumerate() {
            out[j] += pi * pij;
        }
    }
    Distribution::new(cond.codomain().clone(), out)
}

/// Inverse-CDF selection from an explicit probability slice.
///
/// Scans cumulative sums left to right; a draw landing exactly on a
/// boundary resolves to the lower index.
pub(crate) fn sample_from_slice(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u <= acc {
            return i;
        }
    }
    probs.len() - 1 // cumulative rounding fell short of 1
}

/// Draw an index distributed according to `d`, advancing the caller's RNG.
pub fn sample_index(d: &Distribution, rng: &mut SplitMix64) -> usize {
    sample_from_slice(d.probs(), rng.next_f64())
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use crate::fuzzy::Relation;
    use proptest::prelude::*;

    fn instance(max_dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
        (2..=max_dim, 2..=max_dim).prop_flat_map(|(m, n)| {
            (
                prop::collection::vec(0.01..=1.0f64, m),
                prop::collection::vec(prop::collection::vec(0.01..=1.0f64, n), m),
            )
        })
    }

    fn build(w: &[f64], rows: &[Vec<f64>]) -> (Distribution, ConditionalMatrix) {
        let du = Universe::new("d", 0.0, 1.0, w.len()).unwrap();
        let cu = Universe::new("c", 0.0, 1.0, rows[0].len()).unwrap();
        let sum: f64 = w.iter().sum();
        let px = Distribution::new(du.clone(), w.iter().map(|v| v / sum).collect()).unwrap();
        let rel = Relation::from_rows(du, cu, rows).unwrap();
        let cond = conditional_from_relation(&rel, ZeroRowPolicy::Error).unwrap();
        (px, cond)
    }

    /// Oracle with explicit index arithmetic plus a column-sum cross-check.
    fn naive_marginal(px: &[f64], cond: &ConditionalMatrix) -> Vec<f64> {
        let n = cond.codomain().len();
        let mut out = vec![0.0; n];
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            for (i, &pi) in px.iter().enumerate() {
                out[j] += pi * cond.get(i, j);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn marginal_is_a_valid_distribution((w, rows) in instance(6)) {
            let (px, cond) = build(&w, &rows);
            let py = marginal_exact(&px, &cond).unwrap();
            let sum: f64 = py.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() <= NORM_TOL);
            prop_assert!(py.probs().iter().all(|&p| p >= 0.0));
        }

        #[test]
        fn marginal_matches_naive_summation((w, rows) in instance(6)) {
            let (px, cond) = build(&w, &rows);
            let py = marginal_exact(&px, &cond).unwrap();
            let oracle = naive_marginal(px.probs(), &cond);
            for (a, b) in py.probs().iter().zip(&oracle) {
                prop_assert!((a - b).abs() <= NORM_TOL);
            }
        }

        #[test]
        fn marginal_is_linear_in_the_prior(
            (w, rows) in instance(5),
            w2 in prop::collection::vec(0.01..=1.0f64, 2..=5),
            alpha in 0.0..=1.0f64,
        ) {
            prop_assume!(w2.len() == w.len());
            let (p, cond) = build(&w, &rows);
            let (q, _) = build(&w2, &rows);
            let mix: Vec<f64> = p
                .probs()
                .iter()
                .zip(q.probs())
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect();
            let pm = Distribution::new(p.universe().clone(), mix).unwrap();
            let lhs = marginal_exact(&pm, &cond).unwrap();
            let rp = marginal_exact(&p, &cond).unwrap();
            let rq = marginal_exact(&q, &cond).unwrap();
            for j in 0..lhs.len() {
                let rhs = alpha * rp.probs()[j] + (1.0 - alpha) * rq.probs()[j];
                prop_assert!((lhs.probs()[j] - rhs).abs() <= NORM_TOL);
            }
        }

        /// One-hot bridge: relational inference then normalization agrees
        /// with probabilistic inference from a one-hot prior; both equal the
        /// normalized relation row.
        #[test]
        fn one_hot_correspondence((w, rows) in instance(6)) {
            let m = w.len();
            let du = Universe::new("d", 0.0, 1.0, m).unwrap();
            let cu = Universe::new("c", 0.0, 1.0, rows[0].len()).unwrap();
            let rel = Relation::from_rows(du.clone(), cu, &rows).unwrap();
            let cond = conditional_from_relation(&rel, ZeroRowPolicy::Error).unwrap();
            for i in 0..m {
                let x = MembershipVector::one_hot(du.clone(), i);
                let fuzzy_side = normalize_to_distribution(
                    &crate::fuzzy::compose(&x, &rel, crate::fuzzy::CompositionSemantics::MaxMin)
                        .unwrap(),
                )
                .unwrap();
                let prob_side =
                    marginal_exact(&Distribution::one_hot(du.clone(), i), &cond).unwrap();
                let row_sum: f64 = rel.row(i).iter().sum();
                for j in 0..rel.codomain().len() {
                    let expected = rel.get(i, j) / row_sum;
                    prop_assert!((fuzzy_side.probs()[j] - expected).abs() <= NORM_TOL);
                    prop_assert!((prob_side.probs()[j] - expected).abs() <= NORM_TOL);
                }
            }
        }
    }
}
