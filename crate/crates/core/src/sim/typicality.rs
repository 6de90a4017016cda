//! Entropy-typical sequences and typical subspace projectors.
//!
//! A length-`n` sequence is `δ`-typical for a distribution `p` when its
//! sample surprisal is within `δ` of the entropy:
//!
//! > | −(1/n) log₂ p(x₁…xₙ) − H(p) | ≤ δ,
//!
//! with zero-probability sequences always atypical. The quantum analogue
//! applies the same rule to eigenvalue sequences of `ρ^{⊗n}` in the
//! eigenbasis of `ρ`; the conditional analogue fixes a classical sequence
//! `x^n`, works site-by-site in the eigenbasis of each `ρ_{x_s}`, and
//! centers the window on the *ensemble average* output entropy
//! `H(B|X) = Σ_x p(x) H(ρ_x)` — which is why it needs the distribution,
//! not just the states.
//!
//! Everything here enumerates sequences explicitly, so hard guards cap the
//! enumerable sizes; exceeding them is an error, not an approximation.

use num_complex::Complex64;

use crate::channel::Distribution;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityOperator};

/// Largest Hilbert space dimension `d^n` a projector may act on.
pub const MAX_HILBERT_DIM: u128 = 4096;

/// Largest number of classical sequences a typical set may enumerate.
pub const MAX_SEQUENCES: u128 = 10_000_000;

fn checked_power(base: usize, exp: usize, what: &'static str, limit: u128) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc > limit {
            return Err(Error::GuardExceeded { what, got: acc, limit });
        }
    }
    Ok(acc as usize)
}

/// Probability of a sequence under i.i.d. draws from `dist`.
pub fn sequence_probability(dist: &Distribution, seq: &[usize]) -> f64 {
    seq.iter().map(|&x| dist.prob(x)).product()
}

/// The set of `δ`-typical sequences of one length, stored as sorted ranks
/// in the base-`|X|` encoding with the first symbol most significant.
#[derive(Clone, Debug)]
pub struct TypicalSet {
    alphabet: usize,
    n: usize,
    delta: f64,
    entropy: f64,
    ranks: Vec<u64>,
    probability: f64,
}

impl TypicalSet {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn sequence_length(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Entropy of the generating distribution, in bits.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Total probability mass of the set.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    fn rank_of(&self, seq: &[usize]) -> u64 {
        assert_eq!(seq.len(), self.n, "sequence length mismatch");
        let mut rank: u64 = 0;
        for &x in seq {
            assert!(x < self.alphabet, "symbol {x} outside alphabet");
            rank = rank * self.alphabet as u64 + x as u64;
        }
        rank
    }

    pub fn contains(&self, seq: &[usize]) -> bool {
        self.ranks.binary_search(&self.rank_of(seq)).is_ok()
    }
}

/// Enumerates the `δ`-typical set of `dist` at blocklength `n`.
pub fn typical_set(dist: &Distribution, n: usize, delta: f64) -> Result<TypicalSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be positive".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative typicality window {delta}")));
    }
    let total = checked_power(dist.len(), n, "classical sequence count", MAX_SEQUENCES)?;
    let entropy = dist.entropy();
    let logs: Vec<f64> = (0..dist.len())
        .map(|x| {
            let p = dist.prob(x);
            if p > 0.0 {
                p.log2()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    let mut ranks = Vec::new();
    let mut probability = 0.0;
    let mut seq = vec![0usize; n];
    for rank in 0..total {
        let mut log_p = 0.0;
        let mut r = rank;
        for s in (0..n).rev() {
            seq[s] = r % dist.len();
            r /= dist.len();
            log_p += logs[seq[s]];
        }
        if log_p.is_finite() && (-log_p / n as f64 - entropy).abs() <= delta {
            ranks.push(rank as u64);
            probability += 2f64.powf(log_p);
        }
    }
    Ok(TypicalSet {
        alphabet: dist.len(),
        n,
        delta,
        entropy,
        ranks,
        probability,
    })
}

/// Applies a single-site operator `v` to tensor factor `site` of `m` from
/// the left: `m ← (I ⊗ … ⊗ v ⊗ … ⊗ I) · m`. Factor 0 is the leftmost
/// (most significant) Kronecker factor.
fn apply_site_left(m: &mut [Complex64], dim: usize, d: usize, stride: usize, v: &ComplexMatrix) {
    let block = d * stride;
    let mut tmp = vec![Complex64::new(0.0, 0.0); d];
    for col in 0..dim {
        for pre in (0..dim).step_by(block) {
            for off in 0..stride {
                for (i, t) in tmp.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        let entry = m[(pre + k * stride + off) * dim + col];
                        if entry.norm_sqr() != 0.0 {
                            acc += v[(i, k)] * entry;
                        }
                    }
                    *t = acc;
                }
                for (i, t) in tmp.iter().enumerate() {
                    m[(pre + i * stride + off) * dim + col] = *t;
                }
            }
        }
    }
}

/// Applies the adjoint of a single-site operator to tensor factor `site`
/// of `m` from the right: `m ← m · (I ⊗ … ⊗ v ⊗ … ⊗ I)†`.
fn apply_site_right_dagger(
    m: &mut [Complex64],
    dim: usize,
    d: usize,
    stride: usize,
    v: &ComplexMatrix,
) {
    let block = d * stride;
    let mut tmp = vec![Complex64::new(0.0, 0.0); d];
    for row in 0..dim {
        let base = row * dim;
        for pre in (0..dim).step_by(block) {
            for off in 0..stride {
                for (j, t) in tmp.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        let entry = m[base + pre + k * stride + off];
                        if entry.norm_sqr() != 0.0 {
                            acc += entry * v[(j, k)].conj();
                        }
                    }
                    *t = acc;
                }
                for (j, t) in tmp.iter().enumerate() {
                    m[base + pre + j * stride + off] = *t;
                }
            }
        }
    }
}

/// Builds `(V_0 ⊗ … ⊗ V_{n−1}) · diag(entries) · (V_0 ⊗ … ⊗ V_{n−1})†`
/// one site at a time, in `O(n · d · dim²)` operations.
fn conjugate_diag_by_sites(diag: &[f64], bases: &[&ComplexMatrix], d: usize) -> ComplexMatrix {
    let dim = diag.len();
    let n = bases.len();
    debug_assert_eq!(d.pow(n as u32), dim);
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (i, &v) in diag.iter().enumerate() {
        m[i * dim + i] = Complex64::new(v, 0.0);
    }
    for (s, v) in bases.iter().enumerate() {
        let stride = d.pow((n - 1 - s) as u32);
        apply_site_left(&mut m, dim, d, stride, v);
    }
    for (s, v) in bases.iter().enumerate() {
        let stride = d.pow((n - 1 - s) as u32);
        apply_site_right_dagger(&mut m, dim, d, stride, v);
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = m[i * dim + j];
        }
    }
    out
}

/// The `δ`-typical subspace projector of `ρ^{⊗n}`: the sum of the product
/// eigenprojectors of `ρ` whose eigenvalue sequences are typical for the
/// eigenvalue distribution.
pub fn typical_projector(rho: &DensityOperator, n: usize, delta: f64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be positive".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative typicality window {delta}")));
    }
    let d = rho.dim();
    let dim = checked_power(d, n, "Hilbert space dimension", MAX_HILBERT_DIM)?;
    let spec = eig_hermitian(rho.matrix())?;
    let probs = spec.probabilities()?;
    let entropy: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    let logs: Vec<f64> = probs
        .iter()
        .map(|&p| if p > 0.0 { p.log2() } else { f64::NEG_INFINITY })
        .collect();

    let mut diag = vec![0.0f64; dim];
    for (rank, slot) in diag.iter_mut().enumerate() {
        let mut log_p = 0.0;
        let mut r = rank;
        for _ in 0..n {
            log_p += logs[r % d];
            r /= d;
        }
        if log_p.is_finite() && (-log_p / n as f64 - entropy).abs() <= delta {
            *slot = 1.0;
        }
    }
    let bases = vec![spec.eigenvectors(); n];
    Ok(conjugate_diag_by_sites(&diag, &bases, d))
}

/// A finite ensemble of quantum states with their probabilities — the
/// conditional distribution a conditionally typical projector is built
/// from.
#[derive(Clone, Debug)]
pub struct Ensemble {
    states: Vec<DensityOperator>,
    dist: Distribution,
}

impl Ensemble {
    pub fn new(states: Vec<DensityOperator>, dist: Distribution) -> Result<Self> {
        if states.len() != dist.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} states for a distribution over {} symbols",
                states.len(),
                dist.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "ensemble states of unequal dimension".into(),
            ));
        }
        Ok(Self { states, dist })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn state(&self, x: usize) -> &DensityOperator {
        &self.states[x]
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    /// The average state `Σ_x p(x) ρ_x`.
    pub fn average_state(&self) -> DensityOperator {
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (x, state) in self.states.iter().enumerate() {
            let p = self.dist.prob(x);
            if p == 0.0 {
                continue;
            }
            for i in 0..dim {
                for j in 0..dim {
                    acc[(i, j)] += state.matrix()[(i, j)] * p;
                }
            }
        }
        DensityOperator::new(acc).expect("mixture of density operators")
    }

    /// The ensemble-average output entropy `Σ_x p(x) H(ρ_x)` in bits.
    pub fn average_output_entropy(&self) -> Result<f64> {
        let mut h = 0.0;
        for (x, state) in self.states.iter().enumerate() {
            let p = self.dist.prob(x);
            if p == 0.0 {
                continue;
            }
            h += p * crate::entropic::von_neumann_entropy(state.matrix())?;
        }
        Ok(h)
    }
}

/// The conditionally `δ`-typical projector for a classical sequence `seq`:
/// site `s` is decomposed in the eigenbasis of `ρ_{seq[s]}`, and an
/// eigenvalue sequence is kept when its sample surprisal is within `δ` of
/// the ensemble-average output entropy.
pub fn conditionally_typical_projector(
    ensemble: &Ensemble,
    seq: &[usize],
    delta: f64,
) -> Result<ComplexMatrix> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("blocklength must be positive".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative typicality window {delta}")));
    }
    if let Some(&bad) = seq.iter().find(|&&x| x >= ensemble.len()) {
        return Err(Error::InvalidArgument(format!(
            "sequence symbol {bad} outside ensemble of size {}",
            ensemble.len()
        )));
    }
    let n = seq.len();
    let d = ensemble.dim();
    let dim = checked_power(d, n, "Hilbert space dimension", MAX_HILBERT_DIM)?;
    let entropy = ensemble.average_output_entropy()?;

    // Eigendecompose each distinct symbol's state once.
    let mut specs: Vec<Option<(Vec<f64>, crate::linalg::SpectralDecomposition)>> =
        (0..ensemble.len()).map(|_| None).collect();
    for &x in seq {
        if specs[x].is_none() {
            let spec = eig_hermitian(ensemble.state(x).matrix())?;
            let probs = spec.probabilities()?;
            let logs = probs
                .iter()
                .map(|&p| if p > 0.0 { p.log2() } else { f64::NEG_INFINITY })
                .collect();
            specs[x] = Some((logs, spec));
        }
    }
    let site_logs: Vec<&Vec<f64>> =
        seq.iter().map(|&x| &specs[x].as_ref().unwrap().0).collect();

    let mut diag = vec![0.0f64; dim];
    for (rank, slot) in diag.iter_mut().enumerate() {
        let mut log_p = 0.0;
        let mut r = rank;
        for s in (0..n).rev() {
            log_p += site_logs[s][r % d];
            r /= d;
        }
        if log_p.is_finite() && (-log_p / n as f64 - entropy).abs() <= delta {
            *slot = 1.0;
        }
    }
    let bases: Vec<&ComplexMatrix> = seq
        .iter()
        .map(|&x| specs[x].as_ref().unwrap().1.eigenvectors())
        .collect();
    Ok(conjugate_diag_by_sites(&diag, &bases, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, trace_of_product};

    fn binary_entropy(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    fn binomial(n: u64, k: u64) -> f64 {
        let mut acc = 1.0;
        for i in 0..k {
            acc = acc * (n - i) as f64 / (i + 1) as f64;
        }
        acc
    }

    #[test]
    fn uniform_source_makes_everything_typical() {
        let set = typical_set(&Distribution::uniform(2), 4, 0.1).unwrap();
        assert_eq!(set.len(), 16);
        assert!((set.probability() - 1.0).abs() < 1e-12);
        assert!(set.contains(&[1, 0, 1, 1]));
    }

    #[test]
    fn skewed_source_matches_binomial_tail() {
        let dist = Distribution::new(vec![0.75, 0.25]).unwrap();
        let n = 10usize;
        let delta = 0.2;
        let set = typical_set(&dist, n, delta).unwrap();
        let h = binary_entropy(0.25);
        // Count-of-ones determines the probability, so sum the binomial
        // masses of the typical counts independently.
        let mut expected_mass = 0.0;
        let mut expected_count = 0u64;
        for k in 0..=n as u64 {
            let log_p =
                (n as u64 - k) as f64 * 0.75f64.log2() + k as f64 * 0.25f64.log2();
            if (-log_p / n as f64 - h).abs() <= delta {
                expected_mass += binomial(n as u64, k) * 2f64.powf(log_p);
                expected_count += binomial(n as u64, k) as u64;
            }
        }
        assert!((set.probability() - expected_mass).abs() < 1e-12);
        assert_eq!(set.len() as u64, expected_count);
        // The window is nontrivial in both directions at this blocklength.
        assert!(set.probability() < 1.0);
        assert!(!set.is_empty());
    }

    #[test]
    fn point_mass_keeps_only_the_constant_sequence() {
        let dist = Distribution::point_mass(2, 0);
        let set = typical_set(&dist, 5, 0.05).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.contains(&[0, 0, 0, 0, 0]));
        assert!(!set.contains(&[0, 0, 1, 0, 0]));
        assert!((set.probability() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sequence_guard_trips() {
        assert!(matches!(
            typical_set(&Distribution::uniform(10), 8, 0.1),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn diagonal_state_gives_a_diagonal_projector() {
        let rho = DensityOperator::from_probabilities(&[0.75, 0.25]).unwrap();
        let n = 6;
        let delta = 0.2;
        let projector = typical_projector(&rho, n, delta).unwrap();
        let set = typical_set(
            &Distribution::new(vec![0.75, 0.25]).unwrap(),
            n,
            delta,
        )
        .unwrap();
        let dim = 1usize << n;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j {
                    let seq: Vec<usize> =
                        (0..n).rev().map(|s| (i >> s) & 1).collect();
                    if set.contains(&seq) {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    0.0
                };
                assert!(
                    (projector[(i, j)].re - expected).abs() < 1e-12
                        && projector[(i, j)].im.abs() < 1e-12,
                    "entry ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn projector_is_idempotent_and_commutes_in_rotated_basis() {
        // Eigenvalues (0.75, 0.25) in the |±⟩ basis.
        let s = 0.5f64.sqrt();
        let mut plus = ComplexMatrix::zeros(2, 1);
        plus[(0, 0)] = Complex64::new(s, 0.0);
        plus[(1, 0)] = Complex64::new(s, 0.0);
        let mut rho = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                rho[(i, j)] = plus[(i, 0)] * plus[(j, 0)].conj() * 0.5;
            }
        }
        rho[(0, 0)] += Complex64::new(0.25, 0.0);
        rho[(1, 1)] += Complex64::new(0.25, 0.0);
        let rho = DensityOperator::new(rho).unwrap();
        let n = 4;
        let projector = typical_projector(&rho, n, 0.2).unwrap();
        let squared = &projector * &projector;
        assert!(squared.max_abs_diff(&projector) < 1e-10);
        assert!(projector.hermitian_deviation() < 1e-10);
        // Commutes with ρ^{⊗n}.
        let mut product_state = rho.matrix().clone();
        for _ in 1..n {
            product_state = product_state.tensor(rho.matrix());
        }
        let left = &projector * &product_state;
        let right = &product_state * &projector;
        assert!(left.max_abs_diff(&right) < 1e-10);
        // Trace of Π ρ^{⊗n} equals the typical mass of the eigenvalue
        // distribution.
        let set = typical_set(
            &Distribution::new(vec![0.75, 0.25]).unwrap(),
            n,
            0.2,
        )
        .unwrap();
        let mass = trace_of_product(&projector, &product_state).re;
        assert!((mass - set.probability()).abs() < 1e-10);
    }

    #[test]
    fn dimension_guard_trips() {
        let rho = DensityOperator::maximally_mixed(2);
        assert!(matches!(
            typical_projector(&rho, 13, 0.1),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn conditional_projector_matches_classical_enumeration() {
        let states = vec![
            DensityOperator::from_probabilities(&[0.9, 0.1]).unwrap(),
            DensityOperator::from_probabilities(&[0.5, 0.5]).unwrap(),
        ];
        let dist = Distribution::new(vec![0.5, 0.5]).unwrap();
        let ensemble = Ensemble::new(states, dist).unwrap();
        let seq = [0usize, 1, 0, 0, 1, 0];
        let n = seq.len();
        let delta = 0.25;
        let projector = conditionally_typical_projector(&ensemble, &seq, delta).unwrap();
        let h = 0.5 * binary_entropy(0.9) + 0.5 * 1.0;
        let dim = 1usize << n;
        let site_probs: [[f64; 2]; 2] = [[0.9, 0.1], [0.5, 0.5]];
        for i in 0..dim {
            let mut log_p = 0.0;
            for (s, &x) in seq.iter().enumerate() {
                let bit = (i >> (n - 1 - s)) & 1;
                log_p += site_probs[x][bit].log2();
            }
            let expected = if (-log_p / n as f64 - h).abs() <= delta { 1.0 } else { 0.0 };
            assert!(
                (projector[(i, i)].re - expected).abs() < 1e-12,
                "diagonal {i}"
            );
        }
    }

    #[test]
    fn conditional_projector_in_rotated_bases_is_a_projector() {
        let s = 0.5f64.sqrt();
        let mut plus = ComplexMatrix::zeros(2, 1);
        plus[(0, 0)] = Complex64::new(s, 0.0);
        plus[(1, 0)] = Complex64::new(s, 0.0);
        let states = vec![
            DensityOperator::pure(&basis_vector(2, 0)).unwrap(),
            DensityOperator::pure(&plus).unwrap(),
        ];
        let ensemble =
            Ensemble::new(states, Distribution::new(vec![0.5, 0.5]).unwrap()).unwrap();
        let seq = [0usize, 1, 1, 0];
        let projector = conditionally_typical_projector(&ensemble, &seq, 0.1).unwrap();
        let squared = &projector * &projector;
        assert!(squared.max_abs_diff(&projector) < 1e-10);
        // Pure states have zero output entropy, so the only typical
        // eigenvalue sequence is the codeword state itself.
        assert!((projector.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ensemble_validation_and_averages() {
        let states = vec![
            DensityOperator::from_probabilities(&[1.0, 0.0]).unwrap(),
            DensityOperator::from_probabilities(&[0.0, 1.0]).unwrap(),
        ];
        let ensemble = Ensemble::new(
            states.clone(),
            Distribution::new(vec![0.25, 0.75]).unwrap(),
        )
        .unwrap();
        let avg = ensemble.average_state();
        assert!((avg.matrix()[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!((avg.matrix()[(1, 1)].re - 0.75).abs() < 1e-15);
        // Deterministic states have zero average output entropy.
        assert_eq!(ensemble.average_output_entropy().unwrap(), 0.0);
        assert!(Ensemble::new(states, Distribution::uniform(3)).is_err());
        let bad = vec![
            DensityOperator::maximally_mixed(2),
            DensityOperator::maximally_mixed(3),
        ];
        assert!(Ensemble::new(bad, Distribution::uniform(2)).is_err());
    }

    #[test]
    fn site_conjugation_matches_explicit_kronecker() {
        let s = 0.5f64.sqrt();
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 0)] = Complex64::new(s, 0.0);
        h[(0, 1)] = Complex64::new(s, 0.0);
        h[(1, 0)] = Complex64::new(s, 0.0);
        h[(1, 1)] = Complex64::new(-s, 0.0);
        let diag = [1.0, 0.0, 1.0, 1.0];
        let built = conjugate_diag_by_sites(&diag, &[&h, &h], 2);
        let mut d = ComplexMatrix::zeros(4, 4);
        for (i, &v) in diag.iter().enumerate() {
            d[(i, i)] = Complex64::new(v, 0.0);
        }
        let hh = h.tensor(&h);
        let expected = &(&hh * &d) * &hh.dagger();
        assert!(built.max_abs_diff(&expected) < 1e-12);
    }
}
