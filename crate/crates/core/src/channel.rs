//! Channel data model.
//!
//! A [`CcqqChannel`] is a two-sender interference channel: each pair of
//! classical inputs `(x1, x2)` selects a density operator on the joint
//! output space `B1 ⊗ B2`. Tracing out one receiver yields the induced
//! multiple access channel ([`CcqMac`]) seen by the other.
//!
//! Classical channels embed as diagonal states in the standard basis, so the
//! whole quantum pipeline reproduces classical Shannon quantities on them.

use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, Subsystem};

/// Tolerance on probability vectors summing to 1.
pub const DIST_SUM_TOL: f64 = 1e-12;
/// Looser tolerance applied to rows of user-supplied conditional tables;
/// rows further off than this are rejected, closer ones are renormalized.
pub const TABLE_ROW_SUM_TOL: f64 = 1e-9;

/// Finite input alphabet, optionally with display labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("alphabet must be non-empty".into()));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut a = Self::new(labels.len())?;
        a.labels = Some(labels);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

/// Probability distribution over `0..len`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("distribution must be non-empty".into()));
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidDistribution { sum, tolerance: DIST_SUM_TOL });
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![1.0 / n as f64; n] }
    }

    pub fn point_mass(n: usize, k: usize) -> Self {
        assert!(k < n);
        let mut probs = vec![0.0; n];
        probs[k] = 1.0;
        Self { probs }
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

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Product distribution over the pair alphabet, flattened row-major
    /// (`p[i * other.len() + j] = self[i] * other[j]`).
    pub fn product(&self, other: &Distribution) -> Distribution {
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for &a in &self.probs {
            for &b in &other.probs {
                probs.push(a * b);
            }
        }
        Distribution { probs }
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }
}

/// Which receiver an induced multiple access channel belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Receiver {
    One,
    Two,
}

/// Two-sender interference channel with classical inputs and a quantum state
/// on `B1 ⊗ B2` for every input pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CcqqChannel {
    x1: Alphabet,
    x2: Alphabet,
    db1: usize,
    db2: usize,
    /// Indexed by `x1 * |X2| + x2`.
    states: Vec<DensityOperator>,
}

impl CcqqChannel {
    pub fn new(
        x1: Alphabet,
        x2: Alphabet,
        db1: usize,
        db2: usize,
        states: Vec<DensityOperator>,
    ) -> Result<Self> {
        if db1 == 0 || db2 == 0 {
            return Err(Error::InvalidArgument("output dimensions must be positive".into()));
        }
        let expected = x1.size() * x2.size();
        if states.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "channel needs {} states ({} x {} input pairs), got {}",
                expected,
                x1.size(),
                x2.size(),
                states.len()
            )));
        }
        for (idx, st) in states.iter().enumerate() {
            if st.dim() != db1 * db2 {
                return Err(Error::InvalidChannelState {
                    x1: idx / x2.size(),
                    x2: idx % x2.size(),
                    reason: format!(
                        "state dimension {} does not match dB1*dB2 = {}",
                        st.dim(),
                        db1 * db2
                    ),
                });
            }
        }
        Ok(Self { x1, x2, db1, db2, states })
    }

    pub fn x1(&self) -> &Alphabet {
        &self.x1
    }

    pub fn x2(&self) -> &Alphabet {
        &self.x2
    }

    pub fn db1(&self) -> usize {
        self.db1
    }

    pub fn db2(&self) -> usize {
        self.db2
    }

    pub fn state(&self, x1: usize, x2: usize) -> &DensityOperator {
        &self.states[x1 * self.x2.size() + x2]
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }
}

/// Multiple access channel: two classical senders, one quantum output.
#[derive(Clone, Debug, PartialEq)]
pub struct CcqMac {
    x1: Alphabet,
    x2: Alphabet,
    db: usize,
    /// Indexed by `x1 * |X2| + x2`.
    states: Vec<DensityOperator>,
}

impl CcqMac {
    pub fn new(x1: Alphabet, x2: Alphabet, db: usize, states: Vec<DensityOperator>) -> Result<Self> {
        if db == 0 {
            return Err(Error::InvalidArgument("output dimension must be positive".into()));
        }
        let expected = x1.size() * x2.size();
        if states.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "MAC needs {} states, got {}",
                expected,
                states.len()
            )));
        }
        for (idx, st) in states.iter().enumerate() {
            if st.dim() != db {
                return Err(Error::InvalidChannelState {
                    x1: idx / x2.size(),
                    x2: idx % x2.size(),
                    reason: format!("state dimension {} does not match dB = {}", st.dim(), db),
                });
            }
        }
        Ok(Self { x1, x2, db, states })
    }

    pub fn x1(&self) -> &Alphabet {
        &self.x1
    }

    pub fn x2(&self) -> &Alphabet {
        &self.x2
    }

    pub fn db(&self) -> usize {
        self.db
    }

    pub fn state(&self, x1: usize, x2: usize) -> &DensityOperator {
        &self.states[x1 * self.x2.size() + x2]
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }
}

/// The multiple access channel seen by one receiver: the other receiver's
/// output is traced out of every state.
pub fn induced_mac(ch: &CcqqChannel, receiver: Receiver) -> Result<CcqMac> {
    let keep = match receiver {
        Receiver::One => Subsystem::First,
        Receiver::Two => Subsystem::Second,
    };
    let db = match receiver {
        Receiver::One => ch.db1(),
        Receiver::Two => ch.db2(),
    };
    let states = ch
        .states()
        .iter()
        .map(|st| st.partial_trace(ch.db1(), ch.db2(), keep))
        .collect::<Result<Vec<_>>>()?;
    CcqMac::new(ch.x1().clone(), ch.x2().clone(), db, states)
}

/// Conditional probability table `p(y1, y2 | x1, x2)` for a classical
/// interference channel, stored flat as `[x1][x2][y1][y2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTable {
    x1_size: usize,
    x2_size: usize,
    y1_size: usize,
    y2_size: usize,
    probs: Vec<f64>,
}

impl ConditionalTable {
    pub fn new(
        x1_size: usize,
        x2_size: usize,
        y1_size: usize,
        y2_size: usize,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let expected = x1_size * x2_size * y1_size * y2_size;
        if probs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "conditional table needs {expected} entries, got {}",
                probs.len()
            )));
        }
        let mut t = Self { x1_size, x2_size, y1_size, y2_size, probs };
        let row = y1_size * y2_size;
        for x1 in 0..x1_size {
            for x2 in 0..x2_size {
                let start = (x1 * x2_size + x2) * row;
                let slice = &mut t.probs[start..start + row];
                if slice.iter().any(|&p| p < 0.0 || !p.is_finite()) {
                    return Err(Error::InvalidChannelState {
                        x1,
                        x2,
                        reason: "negative or non-finite probability".into(),
                    });
                }
                let sum: f64 = slice.iter().sum();
                if (sum - 1.0).abs() > TABLE_ROW_SUM_TOL {
                    return Err(Error::InvalidChannelState {
                        x1,
                        x2,
                        reason: format!("row sums to {sum:.12}, expected 1 within {TABLE_ROW_SUM_TOL:.0e}"),
                    });
                }
                if (sum - 1.0).abs() > DIST_SUM_TOL {
                    for p in slice.iter_mut() {
                        *p /= sum;
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn prob(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
        self.probs[((x1 * self.x2_size + x2) * self.y1_size + y1) * self.y2_size + y2]
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    pub fn y1_size(&self) -> usize {
        self.y1_size
    }

    pub fn y2_size(&self) -> usize {
        self.y2_size
    }
}

/// Embeds a classical interference channel as diagonal states in the
/// standard product basis of `B1 ⊗ B2`, with `dB1 = |Y1|` and `dB2 = |Y2|`.
pub fn classical_embed(table: &ConditionalTable) -> Result<CcqqChannel> {
    let db1 = table.y1_size();
    let db2 = table.y2_size();
    let mut states = Vec::with_capacity(table.x1_size() * table.x2_size());
    for x1 in 0..table.x1_size() {
        for x2 in 0..table.x2_size() {
            let mut diag = Vec::with_capacity(db1 * db2);
            for y1 in 0..db1 {
                for y2 in 0..db2 {
                    diag.push(table.prob(x1, x2, y1, y2));
                }
            }
            let op = DensityOperator::from_probabilities(&diag).map_err(|e| {
                Error::InvalidChannelState { x1, x2, reason: e.to_string() }
            })?;
            states.push(op);
        }
    }
    CcqqChannel::new(
        Alphabet::new(table.x1_size())?,
        Alphabet::new(table.x2_size())?,
        db1,
        db2,
        states,
    )
}

/// Embeds a classical multiple access channel `p(y | x1, x2)` as diagonal
/// states of dimension `|Y|`. The table is flat `[x1][x2][y]`.
pub fn classical_mac_embed(
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    probs: &[f64],
) -> Result<CcqMac> {
    if probs.len() != x1_size * x2_size * y_size {
        return Err(Error::InvalidArgument(format!(
            "MAC table needs {} entries, got {}",
            x1_size * x2_size * y_size,
            probs.len()
        )));
    }
    let mut states = Vec::with_capacity(x1_size * x2_size);
    for x1 in 0..x1_size {
        for x2 in 0..x2_size {
            let start = (x1 * x2_size + x2) * y_size;
            let row = &probs[start..start + y_size];
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > TABLE_ROW_SUM_TOL || row.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidChannelState {
                    x1,
                    x2,
                    reason: format!("row sums to {sum:.12}"),
                });
            }
            let normalized: Vec<f64> = if (sum - 1.0).abs() > DIST_SUM_TOL {
                row.iter().map(|&p| p / sum).collect()
            } else {
                row.to_vec()
            };
            let op = DensityOperator::from_probabilities(&normalized)
                .map_err(|e| Error::InvalidChannelState { x1, x2, reason: e.to_string() })?;
            states.push(op);
        }
    }
    CcqMac::new(Alphabet::new(x1_size)?, Alphabet::new(x2_size)?, y_size, states)
}

/// A channel whose every state is a product `σ ⊗ τ` keeps no correlation
/// between the receivers; builders for such channels and other fixtures live
/// in the test suites.
pub fn product_channel(
    x1: Alphabet,
    x2: Alphabet,
    first: Vec<DensityOperator>,
    second: Vec<DensityOperator>,
) -> Result<CcqqChannel> {
    if first.len() != x1.size() * x2.size() || second.len() != first.len() {
        return Err(Error::InvalidArgument(
            "product channel needs one state pair per input pair".into(),
        ));
    }
    let db1 = first[0].dim();
    let db2 = second[0].dim();
    let states = first
        .iter()
        .zip(&second)
        .map(|(a, b)| DensityOperator::new(a.matrix().tensor(b.matrix())))
        .collect::<Result<Vec<_>>>()?;
    CcqqChannel::new(x1, x2, db1, db2, states)
}
