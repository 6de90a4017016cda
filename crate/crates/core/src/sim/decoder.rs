//! Finite-blocklength simulation of simultaneous decoding on a two-sender
//! channel with one quantum output.
//!
//! Both senders draw random codebooks i.i.d. from product input
//! distributions. The decoder measures the square-root measurement built
//! from *sandwiched* projectors: with `Π` the typical projector of the
//! average output, `Π_{m1}` the conditionally typical projector of sender
//! 1's codeword (against the sender-1 averaged states), and `Π_{m1,m2}`
//! the conditionally typical projector of the codeword pair,
//!
//! > Π′_{m1,m2} = Π Π_{m1} Π_{m1,m2} Π_{m1} Π,
//!
//! and the measurement operators are
//! `Λ_{m1,m2} = S^{−1/2} Π′_{m1,m2} S^{−1/2}` with `S = Σ Π′`, completed
//! by `I − supp(S)` as an explicit failure outcome.

use rand::distributions::{Distribution as RandomSampling, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::channel::{CcqMac, Distribution};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, trace_of_product, ComplexMatrix, DensityOperator,
    PSEUDO_INVERSE_THRESHOLD,
};
use crate::par;
use crate::sim::typicality::{
    conditionally_typical_projector, typical_projector, Ensemble, MAX_HILBERT_DIM,
};

/// Largest number of measurement outcomes a decoder may enumerate.
pub const MAX_POVM_OUTCOMES: u128 = 4096;

/// Eigenvalues of a measurement operator may dip this far below zero.
pub const POVM_PSD_TOL: f64 = 1e-9;

/// Largest entrywise deviation of a POVM's sum from the identity.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-8;

/// Everything that determines one decoding experiment except the random
/// codebooks: the channel, the input distributions the codebooks are drawn
/// from, the blocklength, the attempted rate pair, and the typicality
/// window.
#[derive(Clone, Debug)]
pub struct DecoderConfig {
    pub mac: CcqMac,
    pub p1: Distribution,
    pub p2: Distribution,
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub delta: f64,
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p1.len() != self.mac.x1().size() || self.p2.len() != self.mac.x2().size() {
            return Err(Error::DimensionMismatch(format!(
                "input distributions of sizes {} and {} for a {}x{} channel",
                self.p1.len(),
                self.p2.len(),
                self.mac.x1().size(),
                self.mac.x2().size()
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("blocklength must be positive".into()));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "negative typicality window {}",
                self.delta
            )));
        }
        if !(self.r1 >= 0.0) || !(self.r2 >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "negative rate pair ({}, {})",
                self.r1, self.r2
            )));
        }
        let mut dim: u128 = 1;
        for _ in 0..self.n {
            dim = dim.saturating_mul(self.mac.db() as u128);
        }
        if dim > MAX_HILBERT_DIM {
            return Err(Error::GuardExceeded {
                what: "Hilbert space dimension",
                got: dim,
                limit: MAX_HILBERT_DIM,
            });
        }
        let (m1, m2) = self.message_counts();
        let outcomes = (m1 as u128) * (m2 as u128) + 1;
        if outcomes > MAX_POVM_OUTCOMES {
            return Err(Error::GuardExceeded {
                what: "measurement outcome count",
                got: outcomes,
                limit: MAX_POVM_OUTCOMES,
            });
        }
        Ok(())
    }

    /// Message counts `⌊2^(n r)⌋`, at least one message each.
    pub fn message_counts(&self) -> (usize, usize) {
        let count = |r: f64| {
            let raw = 2f64.powf(self.n as f64 * r).floor();
            (raw as usize).max(1)
        };
        (count(self.r1), count(self.r2))
    }

    /// Output dimension `dB^n` of the block.
    pub fn block_dim(&self) -> usize {
        self.mac.db().pow(self.n as u32)
    }
}

/// A pair of codebooks: `words1[m]` is sender 1's length-`n` input
/// sequence for message `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    pub words1: Vec<Vec<usize>>,
    pub words2: Vec<Vec<usize>>,
}

impl Codebook {
    /// Draws all codewords i.i.d.: sender 1's complete codebook first,
    /// then sender 2's, each word symbol by symbol.
    pub fn sample(cfg: &DecoderConfig, rng: &mut impl Rng) -> Result<Codebook> {
        cfg.validate()?;
        let (m1, m2) = cfg.message_counts();
        let draw = |dist: &Distribution, count: usize, rng: &mut dyn rand::RngCore| {
            let weights = WeightedIndex::new(dist.probs())
                .map_err(|e| Error::InvalidArgument(format!("unsampleable distribution: {e}")))?;
            Ok::<_, Error>(
                (0..count)
                    .map(|_| (0..cfg.n).map(|_| weights.sample(rng)).collect())
                    .collect::<Vec<Vec<usize>>>(),
            )
        };
        Ok(Codebook {
            words1: draw(&cfg.p1, m1, rng)?,
            words2: draw(&cfg.p2, m2, rng)?,
        })
    }

    fn validate_against(&self, cfg: &DecoderConfig) -> Result<()> {
        let ok1 = self
            .words1
            .iter()
            .all(|w| w.len() == cfg.n && w.iter().all(|&x| x < cfg.mac.x1().size()));
        let ok2 = self
            .words2
            .iter()
            .all(|w| w.len() == cfg.n && w.iter().all(|&x| x < cfg.mac.x2().size()));
        if self.words1.is_empty() || self.words2.is_empty() || !ok1 || !ok2 {
            return Err(Error::InvalidArgument(
                "codebook does not fit the decoder configuration".into(),
            ));
        }
        Ok(())
    }
}

/// The single-sender averaged states `ρ̄_{x1} = Σ_{x2} p2(x2) ρ_{x1,x2}`,
/// their mirror image, and the overall average `ρ̄`.
#[derive(Clone, Debug)]
pub struct AveragedStates {
    pub by_x1: Vec<DensityOperator>,
    pub by_x2: Vec<DensityOperator>,
    pub overall: DensityOperator,
}

pub fn averaged_states(
    mac: &CcqMac,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<AveragedStates> {
    if p1.len() != mac.x1().size() || p2.len() != mac.x2().size() {
        return Err(Error::DimensionMismatch(
            "input distributions do not match the channel alphabets".into(),
        ));
    }
    let db = mac.db();
    let average = |fixed_first: bool, fixed: usize, weights: &Distribution| {
        let mut acc = ComplexMatrix::zeros(db, db);
        for other in 0..weights.len() {
            let p = weights.prob(other);
            if p == 0.0 {
                continue;
            }
            let state = if fixed_first {
                mac.state(fixed, other)
            } else {
                mac.state(other, fixed)
            };
            for i in 0..db {
                for j in 0..db {
                    acc[(i, j)] += state.matrix()[(i, j)] * p;
                }
            }
        }
        DensityOperator::new(acc)
    };
    let by_x1 = (0..mac.x1().size())
        .map(|x1| average(true, x1, p2))
        .collect::<Result<Vec<_>>>()?;
    let by_x2 = (0..mac.x2().size())
        .map(|x2| average(false, x2, p1))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = ComplexMatrix::zeros(db, db);
    for (x1, state) in by_x1.iter().enumerate() {
        let p = p1.prob(x1);
        for i in 0..db {
            for j in 0..db {
                acc[(i, j)] += state.matrix()[(i, j)] * p;
            }
        }
    }
    Ok(AveragedStates { by_x1, by_x2, overall: DensityOperator::new(acc)? })
}

/// The block output state for one codeword pair: `⊗_s ρ_{x1_s, x2_s}`.
pub fn codeword_state(mac: &CcqMac, word1: &[usize], word2: &[usize]) -> ComplexMatrix {
    assert_eq!(word1.len(), word2.len());
    let mut acc = mac.state(word1[0], word2[0]).matrix().clone();
    for s in 1..word1.len() {
        acc = acc.tensor(mac.state(word1[s], word2[s]).matrix());
    }
    acc
}

/// A positive operator-valued measure: one effect per outcome.
#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidArgument("measurement with no outcomes".into()));
        }
        let dim = effects[0].rows();
        if effects.iter().any(|e| e.rows() != dim || e.cols() != dim) {
            return Err(Error::DimensionMismatch(
                "measurement effects of unequal dimension".into(),
            ));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    /// Checks positivity of every effect (eigenvalues ≥ −1e-9) and
    /// completeness (the sum within 1e-8 of the identity, entrywise).
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (k, effect) in self.effects.iter().enumerate() {
            let spec = eig_hermitian(effect)?;
            let min = spec.eigenvalues().last().copied().unwrap_or(0.0);
            if min < -POVM_PSD_TOL {
                return Err(Error::InvalidArgument(format!(
                    "effect {k} has eigenvalue {min:.3e}"
                )));
            }
            for i in 0..dim {
                for j in 0..dim {
                    sum[(i, j)] += effect[(i, j)];
                }
            }
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > POVM_COMPLETENESS_TOL {
            return Err(Error::InvalidArgument(format!(
                "measurement sums to the identity only within {deviation:.3e}"
            )));
        }
        Ok(())
    }
}

/// Index of the effect for the message pair `(m1, m2)`: effects are stored
/// `m1`-major, with the failure outcome last.
pub fn outcome_index(m2_count: usize, m1: usize, m2: usize) -> usize {
    m1 * m2_count + m2
}

fn symmetrized_half(m: &ComplexMatrix) -> ComplexMatrix {
    m.symmetrized()
}

/// Builds the square-root measurement for one codebook pair.
///
/// The returned POVM has `M1·M2 + 1` outcomes: message pairs `m1`-major,
/// then the failure outcome `I − supp(S)`.
pub fn srm_povm(cfg: &DecoderConfig, codebook: &Codebook) -> Result<Povm> {
    cfg.validate()?;
    codebook.validate_against(cfg)?;
    let n = cfg.n;
    let dim = cfg.block_dim();
    let avg = averaged_states(&cfg.mac, &cfg.p1, &cfg.p2)?;
    let average_projector = typical_projector(&avg.overall, n, cfg.delta)?;
    let sender1_ensemble = Ensemble::new(avg.by_x1.clone(), cfg.p1.clone())?;
    let pair_ensemble = Ensemble::new(
        cfg.mac.states().to_vec(),
        cfg.p1.product(&cfg.p2),
    )?;

    let x2_size = cfg.mac.x2().size();
    let mut sandwiched = Vec::with_capacity(codebook.words1.len() * codebook.words2.len());
    for word1 in &codebook.words1 {
        let sender1_projector =
            conditionally_typical_projector(&sender1_ensemble, word1, cfg.delta)?;
        let outer = &average_projector * &sender1_projector;
        let outer_dagger = outer.dagger();
        for word2 in &codebook.words2 {
            let pair_seq: Vec<usize> = word1
                .iter()
                .zip(word2)
                .map(|(&x1, &x2)| x1 * x2_size + x2)
                .collect();
            let pair_projector =
                conditionally_typical_projector(&pair_ensemble, &pair_seq, cfg.delta)?;
            let sandwich = &(&outer * &pair_projector) * &outer_dagger;
            sandwiched.push(symmetrized_half(&sandwich));
        }
    }

    let mut total = ComplexMatrix::zeros(dim, dim);
    for piece in &sandwiched {
        for i in 0..dim {
            for j in 0..dim {
                total[(i, j)] += piece[(i, j)];
            }
        }
    }
    let spec = eig_hermitian(&total)?;
    let inv_sqrt_values: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .map(|&v| if v > PSEUDO_INVERSE_THRESHOLD { v.powf(-0.5) } else { 0.0 })
        .collect();
    let support_values: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .map(|&v| if v > PSEUDO_INVERSE_THRESHOLD { 1.0 } else { 0.0 })
        .collect();
    let inv_sqrt = spec.apply_spectrum(&inv_sqrt_values);
    let support = spec.apply_spectrum(&support_values);

    let mut effects = Vec::with_capacity(sandwiched.len() + 1);
    for piece in &sandwiched {
        let effect = &(&inv_sqrt * piece) * &inv_sqrt;
        effects.push(symmetrized_half(&effect));
    }
    let mut residual = ComplexMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            residual[(i, j)] -= support[(i, j)];
        }
    }
    effects.push(residual);
    Povm::new(effects)
}

/// Average probability of *not* identifying the transmitted message pair,
/// over uniform messages: `(1/M1M2) Σ Tr{(I − Λ_{m1,m2}) ρ_{m1,m2}}`.
pub fn average_error_probability(
    cfg: &DecoderConfig,
    codebook: &Codebook,
    povm: &Povm,
) -> Result<f64> {
    codebook.validate_against(cfg)?;
    let m1_count = codebook.words1.len();
    let m2_count = codebook.words2.len();
    if povm.len() != m1_count * m2_count + 1 || povm.dim() != cfg.block_dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement with {} outcomes of dimension {} for {}x{} messages in dimension {}",
            povm.len(),
            povm.dim(),
            m1_count,
            m2_count,
            cfg.block_dim()
        )));
    }
    let mut error = 0.0;
    for (m1, word1) in codebook.words1.iter().enumerate() {
        for (m2, word2) in codebook.words2.iter().enumerate() {
            let state = codeword_state(&cfg.mac, word1, word2);
            let correct = trace_of_product(
                &povm.effects()[outcome_index(m2_count, m1, m2)],
                &state,
            )
            .re;
            error += 1.0 - correct;
        }
    }
    Ok((error / (m1_count * m2_count) as f64).clamp(0.0, 1.0))
}

/// Decomposition of the average error by which part of the message pair
/// was misidentified. Field names follow the report convention.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorBreakdown {
    /// Total error `1 − P(correct)`; the other four fields sum to it.
    pub p_correct_complement: f64,
    /// First message wrong, second right.
    pub e1: f64,
    /// Second message wrong, first right.
    pub e2: f64,
    /// Both messages wrong.
    pub e12: f64,
    /// Mass on the explicit failure outcome.
    pub smoothing_penalty: f64,
}

/// Splits the average error of a measurement whose outcomes follow the
/// `m1`-major-plus-failure layout (as produced by [`srm_povm`]) by error
/// type. The measurement is taken as given apart from shape checks.
pub fn error_breakdown(
    cfg: &DecoderConfig,
    codebook: &Codebook,
    povm: &Povm,
) -> Result<ErrorBreakdown> {
    codebook.validate_against(cfg)?;
    let m1_count = codebook.words1.len();
    let m2_count = codebook.words2.len();
    if povm.len() != m1_count * m2_count + 1 || povm.dim() != cfg.block_dim() {
        return Err(Error::DimensionMismatch(
            "measurement shape does not match the codebook".into(),
        ));
    }
    let pairs = (m1_count * m2_count) as f64;
    let mut correct = 0.0;
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    let mut e12 = 0.0;
    let mut smoothing = 0.0;
    for (m1, word1) in codebook.words1.iter().enumerate() {
        for (m2, word2) in codebook.words2.iter().enumerate() {
            let state = codeword_state(&cfg.mac, word1, word2);
            for (k, effect) in povm.effects().iter().enumerate() {
                let mass = trace_of_product(effect, &state).re.max(0.0);
                if k == m1_count * m2_count {
                    smoothing += mass;
                    continue;
                }
                let (d1, d2) = (k / m2_count, k % m2_count);
                match (d1 == m1, d2 == m2) {
                    (true, true) => correct += mass,
                    (false, true) => e1 += mass,
                    (true, false) => e2 += mass,
                    (false, false) => e12 += mass,
                }
            }
        }
    }
    Ok(ErrorBreakdown {
        p_correct_complement: (1.0 - correct / pairs).clamp(0.0, 1.0),
        e1: e1 / pairs,
        e2: e2 / pairs,
        e12: e12 / pairs,
        smoothing_penalty: smoothing / pairs,
    })
}

/// A repeated decoding experiment: `samples` independent codebooks, each
/// deriving its randomness from `seed` and its sample index.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub decoder: DecoderConfig,
    pub samples: u64,
    pub seed: u64,
}

/// Per-sample and aggregate error probabilities of a simulation.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationOutcome {
    pub message_counts: (usize, usize),
    pub block_dim: usize,
    pub per_sample: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// The codebook of one simulation sample: a fresh generator seeded from
/// `seed` on stream `sample`, so each sample's draw is independent of
/// every other and of execution order.
pub fn sample_codebook(cfg: &DecoderConfig, seed: u64, sample: u64) -> Result<Codebook> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    Codebook::sample(cfg, &mut rng)
}

/// Runs the full pipeline once per sample: draw a codebook, build the
/// square-root measurement, evaluate the average error.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationOutcome> {
    cfg.decoder.validate()?;
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("simulation needs at least one sample".into()));
    }
    let per_sample = par::map_indices(cfg.samples as usize, |i| {
        let codebook = sample_codebook(&cfg.decoder, cfg.seed, i as u64)?;
        let povm = srm_povm(&cfg.decoder, &codebook)?;
        average_error_probability(&cfg.decoder, &codebook, &povm)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    let min = per_sample.iter().copied().fold(f64::INFINITY, f64::min);
    let max = per_sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SimulationOutcome {
        message_counts: cfg.decoder.message_counts(),
        block_dim: cfg.decoder.block_dim(),
        per_sample,
        mean,
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{classical_mac_embed, Alphabet};
    use crate::linalg::basis_vector;
    use num_complex::Complex64;

    /// y = x1 + x2 over {0, 1, 2}.
    fn adder_mac() -> CcqMac {
        let mut probs = vec![0.0; 12];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                probs[(x1 * 2 + x2) * 3 + x1 + x2] = 1.0;
            }
        }
        classical_mac_embed(2, 2, 3, &probs).unwrap()
    }

    /// y = (x1, x2) noiselessly, dB = 4.
    fn parallel_mac() -> CcqMac {
        let mut probs = vec![0.0; 16];
        for x in 0..4usize {
            probs[x * 4 + x] = 1.0;
        }
        classical_mac_embed(2, 2, 4, &probs).unwrap()
    }

    fn uniform_cfg(mac: CcqMac, n: usize, r1: f64, r2: f64, delta: f64) -> DecoderConfig {
        let p1 = Distribution::uniform(mac.x1().size());
        let p2 = Distribution::uniform(mac.x2().size());
        DecoderConfig { mac, p1, p2, n, r1, r2, delta }
    }

    #[test]
    fn message_counts_floor_the_exponential() {
        let cfg = uniform_cfg(adder_mac(), 6, 0.5, 0.15, 0.2);
        assert_eq!(cfg.message_counts(), (8, 1));
        let cfg = uniform_cfg(adder_mac(), 10, 0.0, 0.35, 0.2);
        assert_eq!(cfg.message_counts(), (1, 11));
    }

    #[test]
    fn guards_reject_oversized_experiments() {
        let cfg = uniform_cfg(adder_mac(), 9, 0.5, 0.5, 0.2);
        // 3^9 = 19683 > 4096.
        assert!(matches!(cfg.validate(), Err(Error::GuardExceeded { .. })));
        let cfg = uniform_cfg(parallel_mac(), 6, 1.0, 1.0, 0.2);
        // 64 × 64 + 1 outcomes exceed the cap.
        assert!(matches!(cfg.validate(), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn codebook_sampling_is_deterministic_per_stream() {
        let cfg = uniform_cfg(adder_mac(), 5, 0.4, 0.4, 0.2);
        let draw = |stream: u64| {
            let mut rng = ChaCha20Rng::seed_from_u64(33);
            rng.set_stream(stream);
            Codebook::sample(&cfg, &mut rng).unwrap()
        };
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0), draw(1));
        let book = draw(2);
        assert_eq!(book.words1.len(), 4);
        assert_eq!(book.words2.len(), 4);
        assert!(book.words1.iter().flatten().all(|&x| x < 2));
    }

    #[test]
    fn averaged_states_of_the_adder() {
        let mac = adder_mac();
        let avg = averaged_states(&mac, &Distribution::uniform(2), &Distribution::uniform(2))
            .unwrap();
        // ρ̄_{x1=0} = (|0⟩⟨0| + |1⟩⟨1|)/2.
        assert!((avg.by_x1[0].matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((avg.by_x1[0].matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(avg.by_x1[0].matrix()[(2, 2)].re.abs() < 1e-15);
        // ρ̄ = diag(1/4, 1/2, 1/4).
        assert!((avg.overall.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((avg.overall.matrix()[(2, 2)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn distinct_codewords_on_a_noiseless_channel_decode_perfectly() {
        // All four joint inputs as codewords: orthogonal block states.
        let cfg = uniform_cfg(parallel_mac(), 2, 1.0, 1.0, 0.3);
        let codebook = Codebook {
            words1: vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
            words2: vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        };
        let povm = srm_povm(&cfg, &codebook).unwrap();
        povm.validate().unwrap();
        let error = average_error_probability(&cfg, &codebook, &povm).unwrap();
        assert!(error < 1e-10, "error {error}");
        let breakdown = error_breakdown(&cfg, &codebook, &povm).unwrap();
        assert!(breakdown.p_correct_complement < 1e-10);
        assert!(breakdown.smoothing_penalty < 1e-10);
    }

    #[test]
    fn srm_on_two_pure_states_matches_the_optimal_formula() {
        // Single-site decoding of two non-orthogonal pure states with a
        // window wide enough to keep every projector trivial: the
        // square-root measurement then attains the optimal success
        // probability (1 + √(1 − |⟨ψ0|ψ1⟩|²))/2.
        let theta = std::f64::consts::PI / 5.0;
        let mut tilted = ComplexMatrix::zeros(2, 1);
        tilted[(0, 0)] = Complex64::new(theta.cos(), 0.0);
        tilted[(1, 0)] = Complex64::new(theta.sin(), 0.0);
        let states = vec![
            DensityOperator::pure(&basis_vector(2, 0)).unwrap(),
            DensityOperator::pure(&tilted).unwrap(),
        ];
        let mac = CcqMac::new(Alphabet::new(2).unwrap(), Alphabet::new(1).unwrap(), 2, states)
            .unwrap();
        let cfg = DecoderConfig {
            mac,
            p1: Distribution::uniform(2),
            p2: Distribution::uniform(1),
            n: 1,
            r1: 1.0,
            r2: 0.0,
            delta: 5.0,
        };
        let codebook = Codebook { words1: vec![vec![0], vec![1]], words2: vec![vec![0]] };
        let povm = srm_povm(&cfg, &codebook).unwrap();
        povm.validate().unwrap();
        let error = average_error_probability(&cfg, &codebook, &povm).unwrap();
        let overlap_sq = theta.cos() * theta.cos();
        let optimal_success = 0.5 * (1.0 + (1.0 - overlap_sq).sqrt());
        assert!(
            (error - (1.0 - optimal_success)).abs() < 1e-9,
            "error {error} vs {}",
            1.0 - optimal_success
        );
    }

    /// Independent all-classical reimplementation of the decoder for
    /// channels whose states are diagonal: every projector is a 0/1
    /// indicator over output sequences, the sandwich is an AND of
    /// indicators, and the square-root measurement splits each output
    /// sequence proportionally among the message pairs claiming it.
    fn classical_decoder_error(
        cfg: &DecoderConfig,
        codebook: &Codebook,
        table: &dyn Fn(usize, usize, usize) -> f64,
        y_size: usize,
    ) -> f64 {
        let n = cfg.n;
        let x2_size = cfg.p2.len();
        let total: usize = y_size.pow(n as u32);
        let entropy = |probs: &[f64]| -> f64 {
            probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
        };
        // Marginals.
        let mut p_avg = vec![0.0; y_size];
        let mut p_given_x1 = vec![vec![0.0; y_size]; cfg.p1.len()];
        for x1 in 0..cfg.p1.len() {
            for x2 in 0..x2_size {
                for y in 0..y_size {
                    let v = table(x1, x2, y) * cfg.p2.prob(x2);
                    p_given_x1[x1][y] += v;
                    p_avg[y] += v * cfg.p1.prob(x1);
                }
            }
        }
        let h_avg = entropy(&p_avg);
        let h_given_x1: f64 = (0..cfg.p1.len())
            .map(|x1| cfg.p1.prob(x1) * entropy(&p_given_x1[x1]))
            .sum();
        let h_given_pair: f64 = (0..cfg.p1.len())
            .map(|x1| {
                (0..x2_size)
                    .map(|x2| {
                        let row: Vec<f64> = (0..y_size).map(|y| table(x1, x2, y)).collect();
                        cfg.p1.prob(x1) * cfg.p2.prob(x2) * entropy(&row)
                    })
                    .sum::<f64>()
            })
            .sum();

        let seq_of = |mut rank: usize| -> Vec<usize> {
            let mut seq = vec![0usize; n];
            for s in (0..n).rev() {
                seq[s] = rank % y_size;
                rank /= y_size;
            }
            seq
        };
        let typical = |log_p: f64, center: f64| -> bool {
            log_p.is_finite() && (-log_p / n as f64 - center).abs() <= cfg.delta
        };

        let m1_count = codebook.words1.len();
        let m2_count = codebook.words2.len();
        // Indicator of each message pair's sandwiched projector, per
        // output sequence.
        let mut claim = vec![vec![false; total]; m1_count * m2_count];
        for rank in 0..total {
            let seq = seq_of(rank);
            let log_avg: f64 = seq
                .iter()
                .map(|&y| if p_avg[y] > 0.0 { p_avg[y].log2() } else { f64::NEG_INFINITY })
                .sum();
            if !typical(log_avg, h_avg) {
                continue;
            }
            for (m1, w1) in codebook.words1.iter().enumerate() {
                let log_x1: f64 = seq
                    .iter()
                    .zip(w1)
                    .map(|(&y, &x1)| {
                        let p = p_given_x1[x1][y];
                        if p > 0.0 {
                            p.log2()
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .sum();
                if !typical(log_x1, h_given_x1) {
                    continue;
                }
                for (m2, w2) in codebook.words2.iter().enumerate() {
                    let log_pair: f64 = seq
                        .iter()
                        .zip(w1.iter().zip(w2))
                        .map(|(&y, (&x1, &x2))| {
                            let p = table(x1, x2, y);
                            if p > 0.0 {
                                p.log2()
                            } else {
                                f64::NEG_INFINITY
                            }
                        })
                        .sum();
                    if typical(log_pair, h_given_pair) {
                        claim[m1 * m2_count + m2][rank] = true;
                    }
                }
            }
        }
        let mut claimants = vec![0usize; total];
        for pair in &claim {
            for (rank, &c) in pair.iter().enumerate() {
                if c {
                    claimants[rank] += 1;
                }
            }
        }
        // Proportional splitting: Λ_k(y^n) = claim_k / claimants.
        let mut error = 0.0;
        for (m1, w1) in codebook.words1.iter().enumerate() {
            for (m2, w2) in codebook.words2.iter().enumerate() {
                let k = m1 * m2_count + m2;
                let mut success = 0.0;
                for rank in 0..total {
                    if !claim[k][rank] {
                        continue;
                    }
                    let seq = seq_of(rank);
                    let p_seq: f64 = seq
                        .iter()
                        .zip(w1.iter().zip(w2))
                        .map(|(&y, (&x1, &x2))| table(x1, x2, y))
                        .product();
                    success += p_seq / claimants[rank] as f64;
                }
                error += 1.0 - success;
            }
        }
        error / (m1_count * m2_count) as f64
    }

    #[test]
    fn quantum_pipeline_matches_the_classical_oracle_on_the_adder() {
        let cfg = uniform_cfg(adder_mac(), 3, 1.0 / 3.0, 1.0 / 3.0, 0.4);
        let mut rng = ChaCha20Rng::seed_from_u64(91);
        let codebook = Codebook::sample(&cfg, &mut rng).unwrap();
        assert_eq!(codebook.words1.len(), 2);
        let povm = srm_povm(&cfg, &codebook).unwrap();
        povm.validate().unwrap();
        let quantum = average_error_probability(&cfg, &codebook, &povm).unwrap();
        let table = |x1: usize, x2: usize, y: usize| if y == x1 + x2 { 1.0 } else { 0.0 };
        let classical = classical_decoder_error(&cfg, &codebook, &table, 3);
        assert!(
            (quantum - classical).abs() < 1e-9,
            "quantum {quantum} vs classical {classical}"
        );
    }

    #[test]
    fn quantum_pipeline_matches_the_classical_oracle_on_a_noisy_table() {
        // A genuinely stochastic table exercises nontrivial typical sets.
        let flip = 0.2;
        let mut probs = vec![0.0; 2 * 2 * 2 * 1];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for y in 0..2usize {
                    let clean = x1 ^ x2;
                    probs[(x1 * 2 + x2) * 2 + y] =
                        if y == clean { 1.0 - flip } else { flip };
                }
            }
        }
        let mac = classical_mac_embed(2, 2, 2, &probs).unwrap();
        let cfg = uniform_cfg(mac, 5, 0.4, 0.2, 0.3);
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let codebook = Codebook::sample(&cfg, &mut rng).unwrap();
        let povm = srm_povm(&cfg, &codebook).unwrap();
        povm.validate().unwrap();
        let quantum = average_error_probability(&cfg, &codebook, &povm).unwrap();
        let table = move |x1: usize, x2: usize, y: usize| {
            let clean = x1 ^ x2;
            if y == clean {
                1.0 - flip
            } else {
                flip
            }
        };
        let classical = classical_decoder_error(&cfg, &codebook, &table, 2);
        assert!(
            (quantum - classical).abs() < 1e-9,
            "quantum {quantum} vs classical {classical}"
        );
        // The breakdown partitions the same total.
        let breakdown = error_breakdown(&cfg, &codebook, &povm).unwrap();
        let parts =
            breakdown.e1 + breakdown.e2 + breakdown.e12 + breakdown.smoothing_penalty;
        assert!((breakdown.p_correct_complement - parts).abs() < 1e-8);
        assert!((breakdown.p_correct_complement - quantum).abs() < 1e-10);
    }

    #[test]
    fn simulation_is_deterministic_and_bounded() {
        let cfg = SimulationConfig {
            decoder: uniform_cfg(adder_mac(), 3, 1.0 / 3.0, 1.0 / 3.0, 0.4),
            samples: 4,
            seed: 7,
        };
        let first = run_simulation(&cfg).unwrap();
        let second = run_simulation(&cfg).unwrap();
        assert_eq!(first.per_sample, second.per_sample);
        assert_eq!(first.per_sample.len(), 4);
        assert!(first.per_sample.iter().all(|e| (0.0..=1.0).contains(e)));
        assert!(first.min <= first.mean && first.mean <= first.max);
        let reseeded = run_simulation(&SimulationConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(first.per_sample, reseeded.per_sample);
    }
}
