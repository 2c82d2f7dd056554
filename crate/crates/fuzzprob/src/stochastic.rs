//! Statistical realization of relational inference on Bernoulli bit streams.
//!
//! A grade `p` becomes a stream of `N` bits whose mean estimates `p`; AND
//! and OR gates act as the fuzzy connectives. Under shared-draw correlation
//! every stream in a computation compares the *same* per-slot uniform
//! against its own threshold, which makes the gate datapath compute min/max
//! exactly per slot:
//!
//! ```text
//! [u < p] AND [u < q]  ==  [u < min(p, q)]
//! [u < p] OR  [u < q]  ==  [u < max(p, q)]
//! ```
//!
//! so the OR-of-ANDs network emits, bit for bit, the encoding of the exact
//! max-min composition. The estimate is then an unbiased Bernoulli mean
//! whose error shrinks like `N^(-1/2)` — the integration-time cost that the
//! convergence harness measures.
//!
//! All randomness is the counter-based SplitMix64 scheme from [`crate::rng`]:
//! a draw is a pure function of `(seed, stream id, slot)`, identical across
//! runs, platforms, and thread schedules.

use crate::error::{Error, Result};
use crate::fuzzy::{MembershipVector, Relation};
use crate::prob::{sample_from_slice, ConditionalMatrix, Distribution};
use crate::rng::{mix64, to_unit_f64, SplitMix64, GAMMA};

/// Stream id used for every stream of a shared-draw computation.
pub const SHARED_STREAM_ID: u64 = 0;

/// Deterministic uniform in `[0, 1)` for a (seed, stream, slot) triple.
///
/// Two chained SplitMix64 rounds: the seed is advanced by the golden gamma
/// once per stream id and once per slot, finalized by the mixer after each.
pub fn uniform_draw(seed: u64, stream_id: u64, slot: u64) -> f64 {
    let z = mix64(seed.wrapping_add(GAMMA.wrapping_mul(stream_id.wrapping_add(1))));
    let z = mix64(z.wrapping_add(GAMMA.wrapping_mul(slot.wrapping_add(1))));
    to_unit_f64(z)
}

/// How the per-slot uniforms are shared among the streams of one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    /// One uniform per slot, reused by every stream. Gates compute min/max
    /// exactly per slot; this is the default datapath.
    SharedDraw,
    /// One uniform per (stream id, slot). Gates compute products of
    /// independent Bernoullis; kept to demonstrate product semantics.
    Independent,
}

/// Stream length, seed, and correlation policy for one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamConfig {
    slots: usize,
    seed: u64,
    correlation: Correlation,
}

impl StreamConfig {
    pub fn new(slots: usize, seed: u64, correlation: Correlation) -> Result<Self> {
        if slots == 0 {
            return Err(Error::InvalidStreamConfig("slots must be >= 1".into()));
        }
        Ok(Self {
            slots,
            seed,
            correlation,
        })
    }

    pub fn shared(slots: usize, seed: u64) -> Result<Self> {
        Self::new(slots, seed, Correlation::SharedDraw)
    }

    pub fn independent(slots: usize, seed: u64) -> Result<Self> {
        Self::new(slots, seed, Correlation::Independent)
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn correlation(&self) -> Correlation {
        self.correlation
    }

    /// Reseeded copy; used by the closed loop to give each step its own draws.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    #[inline]
    fn draw(&self, stream_id: u64, slot: u64) -> f64 {
        match self.correlation {
            Correlation::SharedDraw => uniform_draw(self.seed, SHARED_STREAM_ID, slot),
            Correlation::Independent => uniform_draw(self.seed, stream_id, slot),
        }
    }
}

/// A fixed-length 0/1 sequence whose mean encodes a grade or probability.
///
/// Bits are packed into `u64` words; unused tail bits are always zero, so
/// equality on the struct is bitwise equality of the streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    words: Vec<u64>,
    len: usize,
    config: StreamConfig,
}

impl BitStream {
    fn from_uniforms(p: f64, uniforms: &[f64], config: StreamConfig) -> Self {
        let len = uniforms.len();
        let mut words = vec![0u64; len.div_ceil(64)];
        for (t, &u) in uniforms.iter().enumerate() {
            if u < p {
                words[t / 64] |= 1u64 << (t % 64);
            }
        }
        Self { words, len, config }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    pub fn bit(&self, t: usize) -> bool {
        assert!(t < self.len);
        (self.words[t / 64] >> (t % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Fraction of set bits: the decoded value of the stream.
    pub fn mean(&self) -> f64 {
        self.count_ones() as f64 / self.len as f64
    }
}

/// Encode a grade as a Bernoulli bit stream: bit t is set iff the uniform
/// for (stream per correlation policy, slot t) is below `p`.
///
/// Stream ids only matter under [`Correlation::Independent`]; the
/// composition datapath assigns ids 0..m-1 to input grades and
/// m..m+m*n-1, row-major, to relation entries.
pub fn encode(p: f64, cfg: &StreamConfig, stream_id: u64) -> Result<BitStream> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::GradeOutOfRange { value: p });
    }
    let mut words = vec![0u64; cfg.slots.div_ceil(64)];
    for t in 0..cfg.slots {
        if cfg.draw(stream_id, t as u64) < p {
            words[t / 64] |= 1u64 << (t % 64);
        }
    }
    Ok(BitStream {
        words,
        len: cfg.slots,
        config: *cfg,
    })
}

fn check_same_shape(a: &BitStream, b: &BitStream) -> Result<()> {
    if a.len != b.len || a.config != b.config {
        return Err(Error::StreamMismatch);
    }
    Ok(())
}

/// Elementwise AND of two streams from the same computation.
pub fn gate_and(a: &BitStream, b: &BitStream) -> Result<BitStream> {
    check_same_shape(a, b)?;
    let words = a.words.iter().zip(&b.words).map(|(x, y)| x & y).collect();
    Ok(BitStream {
        words,
        len: a.len,
        config: a.config,
    })
}

/// Elementwise OR of two streams from the same computation.
pub fn gate_or(a: &BitStream, b: &BitStream) -> Result<BitStream> {
    check_same_shape(a, b)?;
    let words = a.words.iter().zip(&b.words).map(|(x, y)| x | y).collect();
    Ok(BitStream {
        words,
        len: a.len,
        config: a.config,
    })
}

/// Convergence report attached to every statistical estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorReport {
    pub n_samples: usize,
    pub delta: f64,
    /// `sqrt(ln(2/delta) / (2 n))`: two-sided bound on a single Bernoulli
    /// mean, holding with probability at least `1 - delta` per component.
    pub hoeffding_bound: f64,
    /// Worst-component error against a caller-supplied exact oracle.
    pub linf_error: Option<f64>,
}

/// Finite-sample two-sided Hoeffding bound for a mean of `n` bits.
pub fn hoeffding_bound(delta: f64, n: usize) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// Largest absolute componentwise difference.
pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn report(n: usize, delta: f64, linf_error: Option<f64>) -> EstimatorReport {
    EstimatorReport {
        n_samples: n,
        delta,
        hoeffding_bound: hoeffding_bound(delta, n),
        linf_error,
    }
}

/// The gate-level network for `y = x ∘ R`: per output component j, the
/// stream `OR_i (encode(x(i)) AND encode(R(i,j)))`.
///
/// Requires shared-draw correlation; with independent draws the gates
/// compute products rather than min/max and the network no longer realizes
/// max-min composition.
pub fn stochastic_compose_streams(
    x: &MembershipVector,
    rel: &Relation,
    cfg: &StreamConfig,
) -> Result<Vec<BitStream>> {
    if x.universe() != rel.domain() {
        return Err(Error::UniverseMismatch {
            expected: rel.domain().name().to_string(),
            actual: x.universe().name().to_string(),
        });
    }
    if cfg.correlation != Correlation::SharedDraw {
        return Err(Error::SharedDrawRequired);
    }
    let (m, n) = (rel.domain().len(), rel.codomain().len());

    // One uniform per slot, shared by all m + m*n streams.
    let uniforms: Vec<f64> = (0..cfg.slots)
        .map(|t| uniform_draw(cfg.seed, SHARED_STREAM_ID, t as u64))
        .collect();

    let x_streams: Vec<BitStream> = x
        .grades()
        .iter()
        .map(|&g| BitStream::from_uniforms(g, &uniforms, *cfg))
        .collect();
    let r_streams: Vec<BitStream> = rel
        .rows()
        .flatten()
        .map(|&g| BitStream::from_uniforms(g, &uniforms, *cfg))
        .collect();

    let words = cfg.slots.div_ceil(64);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = vec![0u64; words];
        for i in 0..m {
            let xw = &x_streams[i].words;
            let rw = &r_streams[i * n + j].words;
            for (a, (xi, ri)) in acc.iter_mut().zip(xw.iter().zip(rw)) {
                *a |= xi & ri;
            }
        }
        out.push(BitStream {
            words: acc,
            len: cfg.slots,
            config: *cfg,
        });
    }
    Ok(out)
}

/// Statistical max-min composition: decode the gate network's streams into
/// a membership estimate.
pub fn stochastic_compose(
    x: &MembershipVector,
    rel: &Relation,
    cfg: &StreamConfig,
    delta: f64,
    oracle: Option<&MembershipVector>,
) -> Result<(MembershipVector, EstimatorReport)> {
    let streams = stochastic_compose_streams(x, rel, cfg)?;
    let grades: Vec<f64> = streams.iter().map(BitStream::mean).collect();
    let estimate = MembershipVector::new(rel.codomain().clone(), grades)?;
    let err = oracle.map(|o| linf(estimate.grades(), o.grades()));
    Ok((estimate, report(cfg.slots, delta, err)))
}

/// Monte Carlo marginalization: draw `i ~ pX`, then `j ~ P(i, ·)`, `n`
/// times; the estimate is the normalized histogram of `j`.
pub fn mc_marginal(
    px: &Distribution,
    cond: &ConditionalMatrix,
    n: usize,
    seed: u64,
    delta: f64,
    oracle: Option<&Distribution>,
) -> Result<(Distribution, EstimatorReport)> {
    if px.universe() != cond.domain() {
        return Err(Error::UniverseMismatch {
            expected: cond.domain().name().to_string(),
            actual: px.universe().name().to_string(),
        });
    }
    if n == 0 {
        return Err(Error::ZeroSampleCount);
    }
    let mut rng = SplitMix64::new(seed);
    let mut counts = vec![0u64; cond.codomain().len()];
    for _ in 0..n {
        let i = sample_from_slice(px.probs(), rng.next_f64());
        let j = sample_from_slice(cond.row(i), rng.next_f64());
        counts[j] += 1;
    }
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let estimate = Distribution::new(cond.codomain().clone(), probs)?;
    let err = oracle.map(|o| linf(estimate.probs(), o.probs()));
    Ok((estimate, report(n, delta, err)))
}
