//! Classical-quantum joint states and Holevo information.
//!
//! A [`CqState`] is a finite family of density operators indexed by tuples of
//! classical variables, together with a joint distribution over those tuples:
//!
//! > θ = Σ_t p(t) |t⟩⟨t| ⊗ ρ_t
//!
//! For classical variables T, C and a quantum output system B, the Holevo
//! information evaluated here is
//!
//! > I(T; B | C) = H(B | C) − H(B | T C),
//!
//! with H(B | S) = Σ_s p(s) H(ρ̄_s) and ρ̄_s the conditional average of the
//! ρ_t over tuples agreeing with s. Everything is in bits.
//!
//! States built from an interference channel carry a bipartite output
//! `B1 ⊗ B2`; a query then names the subsystem it looks at, and the needed
//! partial traces are computed once and cached.

use std::sync::OnceLock;

use crate::capacity::HkInput;
use crate::channel::{CcqMac, CcqqChannel, Distribution, DIST_SUM_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, partial_trace_matrix, ComplexMatrix, Subsystem,
};

/// A Holevo information result more negative than this is treated as a
/// numerical inconsistency rather than noise.
pub const HOLEVO_NEGATIVE_TOL: f64 = 1e-9;

/// Role a classical variable plays in the state it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRole {
    Input1,
    Input2,
    Personal1,
    Common1,
    Personal2,
    Common2,
}

#[derive(Clone, Debug)]
pub struct ClassicalVar {
    pub name: String,
    pub size: usize,
    pub role: VarRole,
}

/// Output structure of the quantum part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumDims {
    Single(usize),
    Bipartite(usize, usize),
}

impl QuantumDims {
    pub fn total(&self) -> usize {
        match *self {
            QuantumDims::Single(d) => d,
            QuantumDims::Bipartite(d1, d2) => d1 * d2,
        }
    }
}

/// Which output system a query's quantum side refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputSystem {
    /// The whole quantum output.
    Full,
    /// `B1` of a bipartite output.
    First,
    /// `B2` of a bipartite output.
    Second,
}

/// Joint state of classical variables and a quantum output.
#[derive(Debug)]
pub struct CqState {
    vars: Vec<ClassicalVar>,
    /// Row-major over the variable sizes, in `vars` order.
    joint: Vec<f64>,
    qdims: QuantumDims,
    states: Vec<ComplexMatrix>,
    reduced_first: OnceLock<Vec<ComplexMatrix>>,
    reduced_second: OnceLock<Vec<ComplexMatrix>>,
}

impl CqState {
    pub fn new(
        vars: Vec<ClassicalVar>,
        joint: Vec<f64>,
        qdims: QuantumDims,
        states: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let total: usize = vars.iter().map(|v| v.size).product();
        if vars.iter().any(|v| v.size == 0) {
            return Err(Error::InvalidArgument("classical variable with empty alphabet".into()));
        }
        if joint.len() != total || states.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "state needs {total} probabilities and states, got {} and {}",
                joint.len(),
                states.len()
            )));
        }
        let sum: f64 = joint.iter().sum();
        if joint.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidDistribution { sum, tolerance: DIST_SUM_TOL });
        }
        let dim = qdims.total();
        if states.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "every quantum state must be {dim}x{dim}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &vars {
            if !seen.insert(v.name.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate classical variable {:?}",
                    v.name
                )));
            }
        }
        Ok(Self {
            vars,
            joint,
            qdims,
            states,
            reduced_first: OnceLock::new(),
            reduced_second: OnceLock::new(),
        })
    }

    pub fn vars(&self) -> &[ClassicalVar] {
        &self.vars
    }

    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    pub fn quantum_dims(&self) -> QuantumDims {
        self.qdims
    }

    pub fn num_tuples(&self) -> usize {
        self.joint.len()
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Stride of each variable in the flat tuple index.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.vars[i + 1].size;
        }
        strides
    }

    fn reduced_states(&self, output: OutputSystem) -> Result<&[ComplexMatrix]> {
        match (output, self.qdims) {
            (OutputSystem::Full, _) => Ok(&self.states),
            (OutputSystem::First, QuantumDims::Bipartite(d1, d2)) => {
                Ok(self.reduced_first.get_or_init(|| {
                    self.states
                        .iter()
                        .map(|m| {
                            partial_trace_matrix(m, d1, d2, Subsystem::First)
                                .expect("dimensions validated at construction")
                        })
                        .collect()
                }))
            }
            (OutputSystem::Second, QuantumDims::Bipartite(d1, d2)) => {
                Ok(self.reduced_second.get_or_init(|| {
                    self.states
                        .iter()
                        .map(|m| {
                            partial_trace_matrix(m, d1, d2, Subsystem::Second)
                                .expect("dimensions validated at construction")
                        })
                        .collect()
                }))
            }
            (_, QuantumDims::Single(_)) => Err(Error::InvalidArgument(
                "state has a single output system; use OutputSystem::Full".into(),
            )),
        }
    }

    /// `H(B|S)` for the subset of variables with the given indices.
    fn conditional_output_entropy(
        &self,
        subset: &[usize],
        output: OutputSystem,
    ) -> Result<f64> {
        let reduced = self.reduced_states(output)?;
        let dim = reduced[0].rows();
        let strides = self.strides();
        let sub_sizes: Vec<usize> = subset.iter().map(|&v| self.vars[v].size).collect();
        let sub_count: usize = sub_sizes.iter().product();

        let mut weights = vec![0.0f64; sub_count];
        let mut acc = vec![ComplexMatrix::zeros(dim, dim); sub_count];
        for (t, &p) in self.joint.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut s_idx = 0usize;
            for (k, &v) in subset.iter().enumerate() {
                let value = (t / strides[v]) % self.vars[v].size;
                s_idx = s_idx * sub_sizes[k] + value;
                let _ = k;
            }
            weights[s_idx] += p;
            add_assign_scaled(&mut acc[s_idx], &reduced[t], p);
        }

        let mut h = 0.0;
        for (s, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            h += w * von_neumann_entropy(&acc[s].scale_real(1.0 / w))?;
        }
        Ok(h)
    }
}

fn add_assign_scaled(dst: &mut ComplexMatrix, src: &ComplexMatrix, s: f64) {
    debug_assert_eq!((dst.rows(), dst.cols()), (src.rows(), src.cols()));
    let d = dst.rows();
    for i in 0..d {
        for j in 0..d {
            dst[(i, j)] += src[(i, j)] * s;
        }
    }
}

/// Von Neumann entropy `H(ρ) = −Σ λ log₂ λ` in bits.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    let spec = eig_hermitian(m)?;
    let probs = spec.probabilities()?;
    Ok(probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

/// A Holevo information query `I(targets; B_output | conditioning)`.
#[derive(Clone, Debug)]
pub struct EntropicQuery {
    targets: Vec<String>,
    conditioning: Vec<String>,
    output: OutputSystem,
}

impl EntropicQuery {
    pub fn new<S: Into<String>>(
        targets: impl IntoIterator<Item = S>,
        conditioning: impl IntoIterator<Item = S>,
        output: OutputSystem,
    ) -> Self {
        Self {
            targets: targets.into_iter().map(Into::into).collect(),
            conditioning: conditioning.into_iter().map(Into::into).collect(),
            output,
        }
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn conditioning(&self) -> &[String] {
        &self.conditioning
    }

    pub fn output(&self) -> OutputSystem {
        self.output
    }
}

/// Evaluates `I(T; B | C) = H(B|C) − H(B|TC)` on a classical-quantum state.
///
/// The result is clipped to `[0, ∞)`; a raw value below
/// `-`[`HOLEVO_NEGATIVE_TOL`] reports an inconsistency instead of being
/// silently absorbed. An empty target set yields 0.
pub fn holevo_information(state: &CqState, query: &EntropicQuery) -> Result<f64> {
    let cond: Vec<usize> = query
        .conditioning
        .iter()
        .map(|n| state.var_index(n))
        .collect::<Result<_>>()?;
    let mut both = cond.clone();
    for name in &query.targets {
        let idx = state.var_index(name)?;
        if cond.contains(&idx) {
            return Err(Error::InvalidArgument(format!(
                "variable {name:?} appears in both target and conditioning"
            )));
        }
        if !both.contains(&idx) {
            both.push(idx);
        }
    }
    if both.len() == cond.len() {
        return Ok(0.0);
    }
    let h_c = state.conditional_output_entropy(&cond, query.output)?;
    let h_tc = state.conditional_output_entropy(&both, query.output)?;
    let raw = h_c - h_tc;
    if raw < -HOLEVO_NEGATIVE_TOL {
        return Err(Error::EntropicInconsistency(format!(
            "I({:?}; B | {:?}) = {raw:.3e} is negative beyond tolerance",
            query.targets, query.conditioning
        )));
    }
    Ok(raw.max(0.0))
}

/// The classical-quantum state of a multiple access channel driven by
/// independent inputs `p1`, `p2`: variables `X1`, `X2` and one output `B`.
pub fn build_mac_state(mac: &CcqMac, p1: &Distribution, p2: &Distribution) -> Result<CqState> {
    if p1.len() != mac.x1().size() || p2.len() != mac.x2().size() {
        return Err(Error::DimensionMismatch(format!(
            "input distributions of sizes {} and {} for a {}x{} MAC",
            p1.len(),
            p2.len(),
            mac.x1().size(),
            mac.x2().size()
        )));
    }
    let vars = vec![
        ClassicalVar { name: "X1".into(), size: p1.len(), role: VarRole::Input1 },
        ClassicalVar { name: "X2".into(), size: p2.len(), role: VarRole::Input2 },
    ];
    let joint = p1.product(p2).probs().to_vec();
    let states = mac.states().iter().map(|s| s.matrix().clone()).collect();
    CqState::new(vars, joint, QuantumDims::Single(mac.db()), states)
}

/// The classical-quantum state of an interference channel driven by
/// independent inputs `p1`, `p2`: variables `X1`, `X2` and the bipartite
/// output `B1 ⊗ B2`.
pub fn build_interference_state(
    ch: &CcqqChannel,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<CqState> {
    if p1.len() != ch.x1().size() || p2.len() != ch.x2().size() {
        return Err(Error::DimensionMismatch(format!(
            "input distributions of sizes {} and {} for a {}x{} channel",
            p1.len(),
            p2.len(),
            ch.x1().size(),
            ch.x2().size()
        )));
    }
    let vars = vec![
        ClassicalVar { name: "X1".into(), size: p1.len(), role: VarRole::Input1 },
        ClassicalVar { name: "X2".into(), size: p2.len(), role: VarRole::Input2 },
    ];
    let joint = p1.product(p2).probs().to_vec();
    let states = ch.states().iter().map(|s| s.matrix().clone()).collect();
    CqState::new(vars, joint, QuantumDims::Bipartite(ch.db1(), ch.db2()), states)
}

/// The classical-quantum state of an interference channel driven by an
/// auxiliary-input configuration: variables `U1`, `W1`, `U2`, `W2` (in that
/// tuple order) and the bipartite output `B1 ⊗ B2`. The channel input of
/// sender `i` at `(u_i, w_i)` is the mixing table value `f_i(u_i, w_i)`.
pub fn build_hk_state(ch: &CcqqChannel, input: &HkInput) -> Result<CqState> {
    input.validate_against(ch)?;
    let vars = vec![
        ClassicalVar { name: "U1".into(), size: input.pu1().len(), role: VarRole::Personal1 },
        ClassicalVar { name: "W1".into(), size: input.pw1().len(), role: VarRole::Common1 },
        ClassicalVar { name: "U2".into(), size: input.pu2().len(), role: VarRole::Personal2 },
        ClassicalVar { name: "W2".into(), size: input.pw2().len(), role: VarRole::Common2 },
    ];
    let mut joint = Vec::new();
    let mut states = Vec::new();
    for u1 in 0..input.pu1().len() {
        for w1 in 0..input.pw1().len() {
            let x1 = input.f1().map(u1, w1);
            let p1 = input.pu1().prob(u1) * input.pw1().prob(w1);
            for u2 in 0..input.pu2().len() {
                for w2 in 0..input.pw2().len() {
                    let x2 = input.f2().map(u2, w2);
                    joint.push(p1 * input.pu2().prob(u2) * input.pw2().prob(w2));
                    states.push(ch.state(x1, x2).matrix().clone());
                }
            }
        }
    }
    CqState::new(vars, joint, QuantumDims::Bipartite(ch.db1(), ch.db2()), states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{classical_mac_embed, Alphabet, CcqMac};
    use crate::linalg::{basis_vector, DensityOperator};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn uniform2() -> Distribution {
        Distribution::uniform(2)
    }

    fn query(
        targets: &[&str],
        conditioning: &[&str],
    ) -> EntropicQuery {
        EntropicQuery::new(
            targets.iter().copied(),
            conditioning.iter().copied(),
            OutputSystem::Full,
        )
    }

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

    fn binary_entropy(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn constant_channel_carries_nothing() {
        let states = vec![DensityOperator::maximally_mixed(2); 4];
        let mac = CcqMac::new(Alphabet::new(2).unwrap(), Alphabet::new(2).unwrap(), 2, states)
            .unwrap();
        let st = build_mac_state(&mac, &uniform2(), &uniform2()).unwrap();
        for q in [
            query(&["X1"], &[]),
            query(&["X2"], &[]),
            query(&["X1"], &["X2"]),
            query(&["X1", "X2"], &[]),
        ] {
            assert!(holevo_information(&st, &q).unwrap() < 1e-12);
        }
    }

    #[test]
    fn noiseless_bit_carries_one_bit() {
        // B = |x1⟩ regardless of x2.
        let states: Vec<DensityOperator> = [0, 0, 1, 1]
            .iter()
            .map(|&x| DensityOperator::pure(&basis_vector(2, x)).unwrap())
            .collect();
        let mac = CcqMac::new(Alphabet::new(2).unwrap(), Alphabet::new(2).unwrap(), 2, states)
            .unwrap();
        let st = build_mac_state(&mac, &uniform2(), &uniform2()).unwrap();
        assert!((holevo_information(&st, &query(&["X1"], &[])).unwrap() - 1.0).abs() < 1e-12);
        assert!(holevo_information(&st, &query(&["X2"], &[])).unwrap() < 1e-12);
        assert!(
            (holevo_information(&st, &query(&["X1"], &["X2"])).unwrap() - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn adder_informations_by_hand() {
        let st = build_mac_state(&adder_mac(), &uniform2(), &uniform2()).unwrap();
        // H(B) = H(1/4, 1/2, 1/4) = 1.5 and H(B | X1 X2) = 0.
        assert!(
            (holevo_information(&st, &query(&["X1", "X2"], &[])).unwrap() - 1.5).abs() < 1e-12
        );
        // Given x2, the output is uniform over two values.
        assert!(
            (holevo_information(&st, &query(&["X1"], &["X2"])).unwrap() - 1.0).abs() < 1e-12
        );
        assert!(
            (holevo_information(&st, &query(&["X2"], &["X1"])).unwrap() - 1.0).abs() < 1e-12
        );
        assert!((holevo_information(&st, &query(&["X1"], &[])).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn skewed_inputs_change_the_adder() {
        let p1 = Distribution::new(vec![0.75, 0.25]).unwrap();
        let st = build_mac_state(&adder_mac(), &p1, &uniform2()).unwrap();
        // I(X1; B | X2) = H(X1) for a noiseless adder under a fixed x2.
        let expected = binary_entropy(0.75);
        assert!(
            (holevo_information(&st, &query(&["X1"], &["X2"])).unwrap() - expected).abs()
                < 1e-12
        );
    }

    #[test]
    fn nonorthogonal_pure_states_by_hand() {
        // Ensemble {|0⟩, |+⟩} at 1/2 each: I(X;B) = H((1 ± 1/√2)/2).
        let plus = {
            let mut v = ComplexMatrix::zeros(2, 1);
            let s = 0.5f64.sqrt();
            v[(0, 0)] = num_complex::Complex64::new(s, 0.0);
            v[(1, 0)] = num_complex::Complex64::new(s, 0.0);
            v
        };
        let states = vec![
            DensityOperator::pure(&basis_vector(2, 0)).unwrap(),
            DensityOperator::pure(&plus).unwrap(),
        ];
        let mac = CcqMac::new(Alphabet::new(2).unwrap(), Alphabet::new(1).unwrap(), 2, states)
            .unwrap();
        let st = build_mac_state(&mac, &uniform2(), &Distribution::uniform(1)).unwrap();
        let overlap = 0.5f64.sqrt();
        let expected = binary_entropy((1.0 + overlap) / 2.0);
        let got = holevo_information(&st, &query(&["X1"], &[])).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
    }

    #[test]
    fn chain_rule_holds() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..10 {
            let states: Vec<DensityOperator> = (0..6)
                .map(|_| {
                    let g = ComplexMatrix::from_fn(3, 3, |_, _| {
                        num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    });
                    let psd = &g * &g.dagger();
                    let tr = psd.trace().re;
                    DensityOperator::new(psd.scale_real(1.0 / tr)).unwrap()
                })
                .collect();
            let mac =
                CcqMac::new(Alphabet::new(2).unwrap(), Alphabet::new(3).unwrap(), 3, states)
                    .unwrap();
            let p1 = Distribution::new(vec![0.3, 0.7]).unwrap();
            let p2 = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
            let st = build_mac_state(&mac, &p1, &p2).unwrap();
            let joint = holevo_information(&st, &query(&["X1", "X2"], &[])).unwrap();
            let first = holevo_information(&st, &query(&["X1"], &[])).unwrap();
            let second_given = holevo_information(&st, &query(&["X2"], &["X1"])).unwrap();
            assert!((joint - first - second_given).abs() < 1e-10);
            // Conditioning on an independent input never hurts.
            let first_given = holevo_information(&st, &query(&["X1"], &["X2"])).unwrap();
            assert!(first <= first_given + 1e-10);
            // Output dimension bounds everything.
            assert!(joint <= 3f64.log2() + 1e-9);
        }
    }

    #[test]
    fn empty_target_is_zero() {
        let st = build_mac_state(&adder_mac(), &uniform2(), &uniform2()).unwrap();
        assert_eq!(holevo_information(&st, &query(&[], &["X2"])).unwrap(), 0.0);
    }

    #[test]
    fn unknown_variable_errors() {
        let st = build_mac_state(&adder_mac(), &uniform2(), &uniform2()).unwrap();
        assert!(matches!(
            holevo_information(&st, &query(&["X3"], &[])),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn overlapping_query_errors() {
        let st = build_mac_state(&adder_mac(), &uniform2(), &uniform2()).unwrap();
        assert!(holevo_information(&st, &query(&["X1"], &["X1"])).is_err());
    }

    #[test]
    fn point_mass_inputs_zero_out_information() {
        let p1 = Distribution::point_mass(2, 1);
        let st = build_mac_state(&adder_mac(), &p1, &uniform2()).unwrap();
        assert!(holevo_information(&st, &query(&["X1"], &["X2"])).unwrap() < 1e-12);
        assert!(
            (holevo_information(&st, &query(&["X2"], &[])).unwrap() - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn single_output_rejects_subsystem_queries() {
        let st = build_mac_state(&adder_mac(), &uniform2(), &uniform2()).unwrap();
        let q = EntropicQuery::new(["X1"], [], OutputSystem::First);
        assert!(holevo_information(&st, &q).is_err());
    }
}
