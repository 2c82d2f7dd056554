//! Mamdani-style controller: fuzzify, infer, defuzzify, closed loop.
//!
//! Three backends run the same rule base: exact relational composition,
//! exact probabilistic marginalization, and the bit-stream estimator. The
//! trace schema is backend-agnostic so trajectories can be compared
//! directly; only the values (and the recorded latency in samples) change.

use crate::error::{Error, Result};
use crate::fuzzy::{
    compose, relation_from_rules, CompositionSemantics, MembershipFunction, MembershipVector,
};
use crate::prob::{
    conditional_from_relation, marginal_exact, normalize_to_distribution, ZeroRowPolicy,
};
use crate::rng::mix_seeds;
use crate::rulebase::RuleBase;
use crate::stochastic::{stochastic_compose, StreamConfig};

/// Delta used for the internal estimator report when the caller does not
/// care about it (the closed loop discards reports).
const DEFAULT_DELTA: f64 = 1e-3;

/// First-order plant `x' = -a x + b u`, integrated by explicit Euler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantConfig {
    pub a: f64,
    pub b: f64,
    pub dt: f64,
    pub x0: f64,
    pub setpoint: f64,
    pub steps: usize,
}

impl PlantConfig {
    pub fn new(a: f64, b: f64, dt: f64, x0: f64, setpoint: f64, steps: usize) -> Result<Self> {
        if ![a, b, dt, x0, setpoint].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPlant("parameters must be finite".into()));
        }
        if dt <= 0.0 {
            return Err(Error::InvalidPlant(format!("dt must be > 0, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::InvalidPlant("steps must be >= 1".into()));
        }
        if a > 0.0 && a * dt >= 1.0 {
            return Err(Error::InvalidPlant(format!(
                "explicit Euler needs a*dt < 1, got {}",
                a * dt
            )));
        }
        Ok(Self {
            a,
            b,
            dt,
            x0,
            setpoint,
            steps,
        })
    }
}

/// The plant shipped alongside the reference rule base: unit decay and
/// gain, 0.1 s steps, 200 steps from rest toward setpoint 2.
pub fn reference_plant() -> PlantConfig {
    PlantConfig::new(1.0, 1.0, 0.1, 0.0, 2.0, 200).expect("reference plant is valid")
}

/// Inference backend selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    ExactFuzzy(CompositionSemantics),
    ExactProb(ZeroRowPolicy),
    Stochastic(StreamConfig),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::ExactFuzzy(_) => "fuzzy",
            Backend::ExactProb(_) => "prob",
            Backend::Stochastic(_) => "stochastic",
        }
    }

    /// Samples spent per inference: the stream length for the statistical
    /// backend, zero for the exact ones.
    pub fn latency_samples(&self) -> usize {
        match self {
            Backend::Stochastic(cfg) => cfg.slots(),
            _ => 0,
        }
    }
}

/// One closed-loop step as recorded in a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub plant_state: f64,
    pub error_input: f64,
    pub control_output: f64,
    pub backend_latency_samples: usize,
}

/// How a crisp measurement becomes a membership vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Fuzzifier {
    /// One-hot at the nearest grid point (ties to the lower index).
    #[default]
    Singleton,
    /// A triangle of the given half-width centered on the measurement.
    Triangular { half_width: f64 },
}

/// Singleton fuzzification onto the rule base's input universe. Values
/// outside the universe clamp to its boundary.
pub fn fuzzify(crisp: f64, rb: &RuleBase) -> MembershipVector {
    fuzzify_with(crisp, rb, Fuzzifier::Singleton)
}

/// Fuzzification with an explicit method.
pub fn fuzzify_with(crisp: f64, rb: &RuleBase, method: Fuzzifier) -> MembershipVector {
    let u = rb.input_universe();
    let crisp = crisp.clamp(u.lo(), u.hi());
    match method {
        Fuzzifier::Singleton => MembershipVector::one_hot(u.clone(), u.nearest_index(crisp)),
        Fuzzifier::Triangular { half_width } => {
            let w = half_width.abs().max(f64::MIN_POSITIVE);
            MembershipFunction::triangular(crisp - w, crisp, crisp + w)
                .expect("ordered by construction")
                .discretize(u)
        }
    }
}

/// Center-of-gravity defuzzification on the discrete grid.
pub fn defuzzify_centroid(y: &MembershipVector) -> Result<f64> {
    if y.has_no_support() {
        return Err(Error::NoRuleFired);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, &g) in y.grades().iter().enumerate() {
        num += y.universe().point(k) * g;
        den += g;
    }
    Ok(num / den)
}

/// Mean-of-maxima defuzzification: the average of every grid point that
/// attains the maximum grade.
pub fn defuzzify_mom(y: &MembershipVector) -> Result<f64> {
    if y.has_no_support() {
        return Err(Error::NoRuleFired);
    }
    let max = y.max_grade();
    let mut sum = 0.0;
    let mut count = 0usize;
    for (k, &g) in y.grades().iter().enumerate() {
        if g == max {
            sum += y.universe().point(k);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Run one inference through the selected backend.
///
/// The probabilistic backend returns its marginal as a grade vector, which
/// is always valid since probabilities live in `[0, 1]`.
pub fn infer(x: &MembershipVector, rb: &RuleBase, backend: &Backend) -> Result<MembershipVector> {
    let rel = relation_from_rules(rb);
    match backend {
        Backend::ExactFuzzy(sem) => compose(x, &rel, *sem),
        Backend::ExactProb(policy) => {
            let px = normalize_to_distribution(x)?;
            let cond = conditional_from_relation(&rel, *policy)?;
            let py = marginal_exact(&px, &cond)?;
            MembershipVector::new(rel.codomain().clone(), py.probs().to_vec())
        }
        Backend::Stochastic(cfg) => {
            stochastic_compose(x, &rel, cfg, DEFAULT_DELTA, None).map(|(est, _)| est)
        }
    }
}

/// Explicit Euler step of the plant under control input `u`.
pub fn plant_step(state: f64, u: f64, cfg: &PlantConfig) -> f64 {
    state + cfg.dt * (-cfg.a * state + cfg.b * u)
}

/// Closed loop: measure error, fuzzify, infer, defuzzify (centroid), drive
/// the plant, record. Fully deterministic given `seed`; the stochastic
/// backend derives a fresh stream seed per step from (config seed, run
/// seed, step index).
pub fn closed_loop_run(
    rb: &RuleBase,
    plant: &PlantConfig,
    backend: &Backend,
    seed: u64,
) -> Result<Vec<TraceRecord>> {
    let mut state = plant.x0;
    let mut trace = Vec::with_capacity(plant.steps);
    for step in 0..plant.steps {
        let error = plant.setpoint - state;
        let x = fuzzify(error, rb);
        let step_backend = match backend {
            Backend::Stochastic(cfg) => {
                Backend::Stochastic(cfg.with_seed(mix_seeds(&[cfg.seed(), seed, step as u64])))
            }
            other => *other,
        };
        let y = infer(&x, rb, &step_backend)?;
        let u = defuzzify_centroid(&y).map_err(|e| match e {
            Error::NoRuleFired => Error::NoRuleFiredAt { step },
            other => other,
        })?;
        trace.push(TraceRecord {
            step,
            plant_state: state,
            error_input: error,
            control_output: u,
            backend_latency_samples: backend.latency_samples(),
        });
        state = plant_step(state, u, plant);
    }
    Ok(trace)
}
