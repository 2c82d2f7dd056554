//! Error-versus-sample-count benchmark for the statistical estimators.
//!
//! Each bench point runs one estimator at one sample count and one seed,
//! compares it against its exact oracle, and records the worst-component
//! error plus the Hoeffding bound at the spec's delta. Points execute in
//! parallel but rows come out in deterministic (backend, N, seed) order.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fuzzy::{
    compose, relation_from_rules, CompositionSemantics, MembershipFunction, MembershipVector,
    Relation, Universe,
};
use crate::prob::{
    conditional_from_relation, marginal_exact, normalize_to_distribution, ConditionalMatrix,
    Distribution, ZeroRowPolicy,
};
use crate::rng::SplitMix64;
use crate::rulebase::reference_rulebase;
use crate::stochastic::{hoeffding_bound, linf, mc_marginal, stochastic_compose, StreamConfig};

/// Where the benchmarked inference instance comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceSource {
    /// The shipped reference rule base with a triangular probe input.
    Reference,
    /// A seeded random m x n instance with grades uniform in [0, 1).
    Random { m: usize, n: usize, seed: u64 },
}

/// Which estimator (or exact baseline) a bench row exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchBackend {
    ExactFuzzy,
    ExactProb,
    StochasticCompose,
    McMarginal,
}

impl BenchBackend {
    pub fn name(&self) -> &'static str {
        match self {
            BenchBackend::ExactFuzzy => "exact-fuzzy",
            BenchBackend::ExactProb => "exact-prob",
            BenchBackend::StochasticCompose => "stochastic-compose",
            BenchBackend::McMarginal => "mc-marginal",
        }
    }

    pub fn is_statistical(&self) -> bool {
        matches!(
            self,
            BenchBackend::StochasticCompose | BenchBackend::McMarginal
        )
    }
}

impl std::str::FromStr for BenchBackend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact-fuzzy" => Ok(Self::ExactFuzzy),
            "exact-prob" => Ok(Self::ExactProb),
            "stochastic-compose" => Ok(Self::StochasticCompose),
            "mc-marginal" => Ok(Self::McMarginal),
            other => Err(format!(
                "unknown bench backend `{other}` (expected exact-fuzzy, exact-prob, \
                 stochastic-compose, or mc-marginal)"
            )),
        }
    }
}

/// Full description of one convergence study.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub instance: InstanceSource,
    pub backends: Vec<BenchBackend>,
    /// Sample counts, strictly increasing.
    pub n_grid: Vec<usize>,
    pub seeds_per_point: usize,
    /// Base seed; point k uses `base_seed + k`.
    pub base_seed: u64,
    pub delta: f64,
    /// Measure wall time per point. Off by default so identical invocations
    /// produce byte-identical output.
    pub timing: bool,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.backends.is_empty() {
            return Err(Error::InvalidBenchSpec("no backends selected".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::InvalidBenchSpec("empty N grid".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBenchSpec(
                "N grid must be strictly increasing".into(),
            ));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::InvalidBenchSpec("N must be >= 1".into()));
        }
        if self.seeds_per_point == 0 {
            return Err(Error::InvalidBenchSpec(
                "seeds_per_point must be >= 1".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidBenchSpec(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// One measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance_id: String,
    pub backend: &'static str,
    pub n: usize,
    pub seed: u64,
    pub linf_error: f64,
    pub wall_time_ns: u64,
    pub hoeffding_bound: f64,
}

/// A fully materialized inference instance with both exact oracles.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub id: String,
    pub x: MembershipVector,
    pub rel: Relation,
    pub px: Distribution,
    pub cond: ConditionalMatrix,
    pub exact_fuzzy: MembershipVector,
    pub exact_prob: Distribution,
}

impl BenchInstance {
    /// Output components compared per row.
    pub fn components(&self) -> usize {
        self.rel.codomain().len()
    }
}

/// Build the instance behind an [`InstanceSource`].
///
/// The reference probe input is the discretized triangle spanning the input
/// universe, giving a full spread of grades from 0 to 1.
pub fn build_instance(source: &InstanceSource) -> Result<BenchInstance> {
    let (id, x, rel) = match source {
        InstanceSource::Reference => {
            let rb = reference_rulebase();
            let u = rb.input_universe();
            let probe = MembershipFunction::triangular(u.lo(), (u.lo() + u.hi()) / 2.0, u.hi())?;
            let x = probe.discretize(u);
            (String::from("reference"), x, relation_from_rules(&rb))
        }
        InstanceSource::Random { m, n, seed } => {
            let du = Universe::new("x", 0.0, 1.0, *m)?;
            let cu = Universe::new("y", 0.0, 1.0, *n)?;
            let mut rng = SplitMix64::new(*seed);
            let mut grades: Vec<f64> = (0..*m).map(|_| rng.next_f64()).collect();
            while grades.iter().all(|&g| g == 0.0) {
                grades = (0..*m).map(|_| rng.next_f64()).collect();
            }
            let x = MembershipVector::new(du.clone(), grades)?;
            let entries: Vec<f64> = (0..m * n).map(|_| rng.next_f64()).collect();
            let rel = Relation::new(du, cu, entries)?;
            (format!("random-{m}x{n}-s{seed}"), x, rel)
        }
    };
    let px = normalize_to_distribution(&x)?;
    let cond = conditional_from_relation(&rel, ZeroRowPolicy::Error)?;
    let exact_fuzzy = compose(&x, &rel, CompositionSemantics::MaxMin)?;
    let exact_prob = marginal_exact(&px, &cond)?;
    Ok(BenchInstance {
        id,
        x,
        rel,
        px,
        cond,
        exact_fuzzy,
        exact_prob,
    })
}

fn run_point(
    inst: &BenchInstance,
    backend: BenchBackend,
    n: usize,
    seed: u64,
    delta: f64,
    timing: bool,
) -> Result<BenchRow> {
    let started = timing.then(Instant::now);
    let linf_error = match backend {
        BenchBackend::ExactFuzzy => {
            let again = compose(&inst.x, &inst.rel, CompositionSemantics::MaxMin)?;
            linf(again.grades(), inst.exact_fuzzy.grades())
        }
        BenchBackend::ExactProb => {
            let again = marginal_exact(&inst.px, &inst.cond)?;
            linf(again.probs(), inst.exact_prob.probs())
        }
        BenchBackend::StochasticCompose => {
            let cfg = StreamConfig::shared(n, seed)?;
            let (_, rep) =
                stochastic_compose(&inst.x, &inst.rel, &cfg, delta, Some(&inst.exact_fuzzy))?;
            rep.linf_error.unwrap()
        }
        BenchBackend::McMarginal => {
            let (_, rep) =
                mc_marginal(&inst.px, &inst.cond, n, seed, delta, Some(&inst.exact_prob))?;
            rep.linf_error.unwrap()
        }
    };
    let wall_time_ns = started.map_or(0, |t| t.elapsed().as_nanos() as u64);
    Ok(BenchRow {
        instance_id: inst.id.clone(),
        backend: backend.name(),
        n,
        seed,
        linf_error,
        wall_time_ns,
        hoeffding_bound: hoeffding_bound(delta, n),
    })
}

/// Run the full study. Points execute in parallel; the returned rows are in
/// (backend, N, seed) order regardless of schedule.
pub fn run_convergence_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let inst = build_instance(&spec.instance)?;
    let mut points = Vec::new();
    for &backend in &spec.backends {
        for &n in &spec.n_grid {
            for k in 0..spec.seeds_per_point {
                points.push((backend, n, spec.base_seed.wrapping_add(k as u64)));
            }
        }
    }
    points
        .into_par_iter()
        .map(|(backend, n, seed)| run_point(&inst, backend, n, seed, spec.delta, spec.timing))
        .collect()
}

/// Median of the `linf_error` column of the rows selected by `backend` and
/// `n`. Panics if no row matches.
pub fn median_error(rows: &[BenchRow], backend: BenchBackend, n: usize) -> f64 {
    let mut errs: Vec<f64> = rows
        .iter()
        .filter(|r| r.backend == backend.name() && r.n == n)
        .map(|r| r.linf_error)
        .collect();
    assert!(!errs.is_empty(), "no rows for {} at N={n}", backend.name());
    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = errs.len();
    if k % 2 == 1 {
        errs[k / 2]
    } else {
        0.5 * (errs[k / 2 - 1] + errs[k / 2])
    }
}

/// Least-squares slope of `ln(median error)` against `ln(N)`.
pub fn log_log_slope(points: &[(usize, f64)]) -> f64 {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.max(1e-300).ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
