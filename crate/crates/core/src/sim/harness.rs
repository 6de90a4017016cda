//! Self-checks for the operator inequalities the decoding analysis rests
//! on, runnable on demand (and from the command line) with seeded random
//! instances.
//!
//! Every check reports a worst-case *margin*: the smallest slack observed
//! in the inequality across its trials. A nonnegative margin (up to the
//! check's float tolerance) means the property held everywhere. The suite
//! can deliberately weaken one check's claimed bound to demonstrate that a
//! false inequality is actually caught, not vacuously reported green.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::channel::Distribution;
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, matrix_function, trace_distance, trace_of_product, ComplexMatrix,
    DensityOperator, MatrixFn, SpectralDecomposition,
};
use crate::sim::typicality::{typical_projector, typical_set};

/// Names of the checks in the order the suite runs them.
pub const PROPERTY_CHECKS: [&str; 5] = [
    "hayashi-nagaoka",
    "projector-bound",
    "gentle-measurement",
    "trace-comparison",
    "typicality",
];

/// Outcome of one property check.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// Smallest slack observed in the checked inequality; a value below
    /// the check's tolerance means a genuine violation.
    pub margin: f64,
    pub details: String,
}

pub fn all_passed(checks: &[PropertyCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = num_complex::Complex64::new(
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
            );
        }
    }
    a.symmetrized()
}

/// A random orthonormal basis, taken from the eigenvectors of a random
/// Hermitian matrix.
fn random_basis(rng: &mut impl Rng, dim: usize) -> SpectralDecomposition {
    eig_hermitian(&random_hermitian(rng, dim)).expect("random Hermitian matrix")
}

/// Random operator with eigenvalues drawn uniformly from `[lo, hi]`.
fn random_spectrum(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let basis = random_basis(rng, dim);
    let values: Vec<f64> = (0..dim).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
    basis.apply_spectrum(&values)
}

fn random_density(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let basis = random_basis(rng, dim);
    let mut values: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let sum: f64 = values.iter().sum();
    for v in &mut values {
        *v /= sum;
    }
    DensityOperator::new(basis.apply_spectrum(&values)).expect("normalized spectrum")
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let spec = eig_hermitian(m)?;
    Ok(spec.eigenvalues().last().copied().unwrap_or(0.0))
}

fn subtract(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] -= b[(i, j)];
        }
    }
    out
}

fn scaled_sum(terms: &[(f64, &ComplexMatrix)]) -> ComplexMatrix {
    let dim = terms[0].1.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for &(w, m) in terms {
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += m[(i, j)] * w;
            }
        }
    }
    out
}

/// For `0 ≤ S ≤ I` and `T ≥ 0`:
/// `I − (S+T)^{−1/2} S (S+T)^{−1/2} ≤ c1 (I − S) + c2 T`
/// with `(c1, c2) = (2, 4)`. The faulted run claims `(1/2, 1/2)`.
fn check_hayashi_nagaoka(seed: u64, faulted: bool) -> Result<PropertyCheck> {
    const TOL: f64 = 1e-8;
    let (c1, c2) = if faulted { (0.5, 0.5) } else { (2.0, 4.0) };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut margin = f64::INFINITY;
    let dims = [2usize, 3, 4, 6];
    let trials = 12;
    for t in 0..trials {
        let dim = dims[t % dims.len()];
        let s = random_spectrum(&mut rng, dim, 0.0, 1.0);
        let t_op = random_spectrum(&mut rng, dim, 0.0, 0.8);
        let inv_sqrt = matrix_function(&scaled_sum(&[(1.0, &s), (1.0, &t_op)]), MatrixFn::InvSqrtPseudo)?;
        let pinched = (&(&inv_sqrt * &s) * &inv_sqrt).symmetrized();
        let identity = ComplexMatrix::identity(dim);
        let lhs = subtract(&identity, &pinched);
        let rhs = scaled_sum(&[(c1, &identity), (-c1, &s), (c2, &t_op)]);
        let slack = min_eigenvalue(&subtract(&rhs, &lhs))?;
        margin = margin.min(slack);
    }
    Ok(PropertyCheck {
        name: "hayashi-nagaoka".into(),
        passed: margin >= -TOL,
        margin,
        details: format!(
            "min eigenvalue of c1(I−S)+c2·T − [I−(S+T)^(−1/2)S(S+T)^(−1/2)] over {trials} \
             random (S,T) pairs in dimensions {dims:?}, with (c1, c2) = ({c1}, {c2})"
        ),
    })
}

/// Pinching a tensor power by its typical projector keeps every kept
/// eigenvalue above `2^{−n(H+δ)}`: `Π ρ^{⊗n} Π ≥ 2^{−n(H+δ)} Π`. The
/// faulted run claims the (false) lower bound `2^{−n(H−δ)}`.
fn check_projector_bound(seed: u64, faulted: bool) -> Result<PropertyCheck> {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut margin = f64::INFINITY;
    let mut cases: Vec<(DensityOperator, usize, f64)> = vec![
        // Skewed qubit: every typical sequence sits below the entropy
        // center, so the faulted bound fails decisively.
        (
            DensityOperator::from_probabilities(&[0.7, 0.3])?,
            6,
            0.3,
        ),
    ];
    cases.push((random_density(&mut rng, 2), 5, 0.25));
    cases.push((random_density(&mut rng, 3), 3, 0.4));
    let count = cases.len();
    for (rho, n, delta) in cases {
        let spec = eig_hermitian(rho.matrix())?;
        let entropy: f64 = spec
            .eigenvalues()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum();
        let exponent = if faulted { entropy - delta } else { entropy + delta };
        let bound = 2f64.powf(-(n as f64) * exponent);
        let projector = typical_projector(&rho, n, delta)?;
        let mut power = rho.matrix().clone();
        for _ in 1..n {
            power = power.tensor(rho.matrix());
        }
        let pinched = (&(&projector * &power) * &projector).symmetrized();
        let slack = min_eigenvalue(&subtract(&pinched, &scaled_sum(&[(bound, &projector)])))?;
        // Normalize by the bound so qubit and qutrit cases are comparable.
        margin = margin.min(slack / bound);
    }
    Ok(PropertyCheck {
        name: "projector-bound".into(),
        passed: margin >= -TOL,
        margin,
        details: format!(
            "min eigenvalue of Πρ^(⊗n)Π − 2^(−n(H{}δ))Π, relative to the bound, over \
             {count} states",
            if faulted { "−" } else { "+" }
        ),
    })
}

/// A measurement operator that accepts a state with high probability
/// barely disturbs it: `Tr{Λρ} ≥ 1 − ε` implies
/// `‖√Λ ρ √Λ − ρ‖₁ ≤ 2√ε`. The faulted run claims `2ε` instead.
fn check_gentle_measurement(seed: u64, faulted: bool) -> Result<PropertyCheck> {
    const TOL: f64 = 1e-6;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let mut margin = f64::INFINITY;
    let mut run = |rho: &DensityOperator, lambda: &ComplexMatrix| -> Result<()> {
        let epsilon = (1.0 - trace_of_product(lambda, rho.matrix()).re).max(0.0);
        let sqrt = matrix_function(lambda, MatrixFn::Sqrt)?;
        let post = (&(&sqrt * rho.matrix()) * &sqrt).symmetrized();
        let disturbance = trace_distance(&post, rho.matrix())?;
        let bound = if faulted { 2.0 * epsilon } else { 2.0 * epsilon.sqrt() };
        margin = margin.min(bound - disturbance);
        Ok(())
    };
    // The near-tight case: a pure state tested by a slightly tilted
    // rank-one effect. Disturbance grows like √ε here, so a bound of 2ε
    // cannot hold.
    let theta: f64 = 0.3;
    let mut tilted = ComplexMatrix::zeros(2, 1);
    tilted[(0, 0)] = num_complex::Complex64::new(theta.cos(), 0.0);
    tilted[(1, 0)] = num_complex::Complex64::new(theta.sin(), 0.0);
    let pure = DensityOperator::pure(&crate::linalg::basis_vector(2, 0))?;
    let effect = DensityOperator::pure(&tilted)?.matrix().clone();
    run(&pure, &effect)?;
    let trials = 10;
    for t in 0..trials {
        let dim = 2 + t % 3;
        let rho = random_density(&mut rng, dim);
        let lambda = random_spectrum(&mut rng, dim, 0.6, 1.0);
        run(&rho, &lambda)?;
    }
    Ok(PropertyCheck {
        name: "gentle-measurement".into(),
        passed: margin >= -TOL,
        margin,
        details: format!(
            "2{} − ‖√Λρ√Λ − ρ‖₁ with ε = 1 − Tr{{Λρ}}, over a near-tight rank-one case \
             and {trials} random (ρ, Λ) pairs",
            if faulted { "ε" } else { "√ε" }
        ),
    })
}

/// No measurement operator separates two states by more than their trace
/// distance: `Tr{Λρ} ≤ Tr{Λσ} + ½‖ρ − σ‖₁`. The faulted run claims a
/// coefficient of ¼.
fn check_trace_comparison(seed: u64, faulted: bool) -> Result<PropertyCheck> {
    const TOL: f64 = 1e-9;
    let coefficient = if faulted { 0.25 } else { 0.5 };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(4);
    let mut margin = f64::INFINITY;
    let trials = 10;
    for t in 0..trials {
        let dim = 2 + t % 3;
        let rho = random_density(&mut rng, dim);
        let sigma = random_density(&mut rng, dim);
        let diff = subtract(rho.matrix(), sigma.matrix());
        let distance = trace_distance(rho.matrix(), sigma.matrix())?;
        // The projector onto the positive part of ρ − σ attains the
        // bound; a random contraction probes the slack region.
        let positive_part = eig_hermitian(&diff)?.apply(|v| if v > 0.0 { 1.0 } else { 0.0 });
        let contraction = random_spectrum(&mut rng, dim, 0.0, 1.0);
        for lambda in [&positive_part, &contraction] {
            let lhs = trace_of_product(lambda, rho.matrix()).re;
            let rhs = trace_of_product(lambda, sigma.matrix()).re + coefficient * distance;
            margin = margin.min(rhs - lhs);
        }
    }
    Ok(PropertyCheck {
        name: "trace-comparison".into(),
        passed: margin >= -TOL,
        margin,
        details: format!(
            "Tr{{Λσ}} + {coefficient}·‖ρ−σ‖₁ − Tr{{Λρ}} over {trials} random state pairs, \
             probing both the extremal projector and a random effect"
        ),
    })
}

fn binomial(n: u64, k: u64) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Finite-blocklength facts about the classical typical set, pinned to an
/// independent binomial-tail computation on a skewed coin. The faulted run
/// claims the (false) cardinality bound `2^{n(H−δ)}`.
fn check_typicality(seed: u64, faulted: bool) -> Result<PropertyCheck> {
    const MASS_TOL: f64 = 1e-9;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(5);
    let p_one = 0.25;
    let n = 10usize;
    let delta = 0.2;
    let dist = Distribution::new(vec![1.0 - p_one, p_one])?;
    let entropy = dist.entropy();
    let set = typical_set(&dist, n, delta)?;

    // Independent tally: which Hamming weights fall inside the window,
    // and how much binomial mass they carry.
    let mut oracle_mass = 0.0;
    let mut oracle_count = 0.0;
    for k in 0..=n as u64 {
        let surprisal = ((n as u64 - k) as f64 * -(1.0 - p_one).log2() + k as f64 * -p_one.log2())
            / n as f64;
        if (surprisal - entropy).abs() <= delta {
            oracle_count += binomial(n as u64, k);
            oracle_mass += binomial(n as u64, k)
                * (1.0 - p_one).powi((n as u64 - k) as i32)
                * p_one.powi(k as i32);
        }
    }
    let mass_slack = MASS_TOL - (set.probability() - oracle_mass).abs();
    let count_slack = if set.len() as f64 == oracle_count { 0.0 } else { f64::NEG_INFINITY };

    let cardinality_exponent = if faulted { entropy - delta } else { entropy + delta };
    let cardinality_slack =
        (2f64.powf(n as f64 * cardinality_exponent) - set.len() as f64)
            / 2f64.powf(n as f64 * cardinality_exponent);

    // Per-sequence probability bounds hold exactly, by the window
    // definition; verified on a second, randomly drawn distribution.
    let q = 0.1 + 0.8 * rng.gen::<f64>();
    let other = Distribution::new(vec![q, 1.0 - q])?;
    let other_set = typical_set(&other, 8, 0.25)?;
    let h = other.entropy();
    let (lo, hi) = (2f64.powf(-8.0 * (h + 0.25)), 2f64.powf(-8.0 * (h - 0.25)));
    let mut bound_slack = f64::INFINITY;
    for &rank in other_set.ranks() {
        let mut p = 1.0;
        for s in (0..8).rev() {
            p *= other.prob((rank >> s & 1) as usize);
        }
        bound_slack = bound_slack.min((p - lo).min(hi - p) / lo);
    }

    let margin = mass_slack.min(count_slack).min(cardinality_slack).min(bound_slack);
    Ok(PropertyCheck {
        name: "typicality".into(),
        passed: margin >= 0.0,
        margin,
        details: format!(
            "worst of: set mass and size matching the binomial tail for \
             Bernoulli({p_one}) at n = {n} ({} sequences, mass tolerance {MASS_TOL:.0e}), \
             relative slack of the cardinality bound 2^(n(H{}δ)), and relative \
             per-sequence probability window slack on a random coin",
            set.len(),
            if faulted { "−" } else { "+" },
        ),
    })
}

/// Runs every property check with randomness derived from `seed`.
///
/// `inject_fault` names one check whose claimed bound is deliberately
/// weakened to a false one; the suite then demonstrably reports that
/// check as failed. Unknown names are rejected.
pub fn run_property_suite(seed: u64, inject_fault: Option<&str>) -> Result<Vec<PropertyCheck>> {
    if let Some(name) = inject_fault {
        if !PROPERTY_CHECKS.contains(&name) {
            return Err(Error::InvalidArgument(format!(
                "unknown property check {name:?}; expected one of {PROPERTY_CHECKS:?}"
            )));
        }
    }
    let fault = |name: &str| inject_fault == Some(name);
    Ok(vec![
        check_hayashi_nagaoka(seed, fault("hayashi-nagaoka"))?,
        check_projector_bound(seed, fault("projector-bound"))?,
        check_gentle_measurement(seed, fault("gentle-measurement"))?,
        check_trace_comparison(seed, fault("trace-comparison"))?,
        check_typicality(seed, fault("typicality"))?,
    ])
}
