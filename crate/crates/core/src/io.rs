//! Channel files.
//!
//! A channel is stored as a JSON document:
//!
//! ```json
//! {
//!   "x1_size": 2,
//!   "x2_size": 2,
//!   "db1": 2,
//!   "db2": 2,
//!   "x1_labels": ["0", "1"],
//!   "states": {
//!     "0,0": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
//!     "0,1": ...
//!   }
//! }
//! ```
//!
//! `states` maps each zero-based input pair `"x1,x2"` to a
//! `(dB1·dB2) × (dB1·dB2)` matrix of `[re, im]` entries on `B1 ⊗ B2`.
//! Alternatively a `classical` block maps each pair to a `dB1 × dB2`
//! probability table `p(y1, y2 | x1, x2)`, which is expanded into diagonal
//! states at load time; exactly one of the two blocks must be present.
//! Labels are optional. [`save_channel`] always writes the `states` form,
//! and `load(save(ch))` reproduces every matrix entry bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{Alphabet, CcqqChannel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityOperator};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    x1_size: usize,
    x2_size: usize,
    db1: usize,
    db2: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x1_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x2_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<BTreeMap<String, Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classical: Option<BTreeMap<String, Vec<Vec<f64>>>>,
}

fn parse_pair_key(key: &str, x1_size: usize, x2_size: usize) -> Result<(usize, usize)> {
    let mut parts = key.split(',');
    let parse = |s: Option<&str>| -> Option<usize> { s?.trim().parse().ok() };
    let x1 = parse(parts.next());
    let x2 = parse(parts.next());
    match (x1, x2, parts.next()) {
        (Some(a), Some(b), None) if a < x1_size && b < x2_size => Ok((a, b)),
        _ => Err(Error::ChannelFormat(format!(
            "state key {key:?} is not a valid zero-based input pair for a {x1_size}x{x2_size} channel"
        ))),
    }
}

fn alphabet(size: usize, labels: Option<Vec<String>>) -> Result<Alphabet> {
    match labels {
        Some(l) => {
            if l.len() != size {
                return Err(Error::ChannelFormat(format!(
                    "{} labels given for an alphabet of size {size}",
                    l.len()
                )));
            }
            Alphabet::with_labels(l)
        }
        None => Alphabet::new(size),
    }
}

fn channel_from_file(file: ChannelFile) -> Result<CcqqChannel> {
    let ChannelFile { x1_size, x2_size, db1, db2, x1_labels, x2_labels, states, classical } = file;
    let pairs = x1_size * x2_size;
    let dim = db1 * db2;
    let mut ops: Vec<Option<DensityOperator>> = vec![None; pairs];

    match (states, classical) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(Error::ChannelFormat(
                "exactly one of \"states\" and \"classical\" must be present".into(),
            ));
        }
        (Some(states), None) => {
            for (key, rows) in states {
                let (x1, x2) = parse_pair_key(&key, x1_size, x2_size)?;
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidChannelState {
                        x1,
                        x2,
                        reason: format!("matrix must be {dim}x{dim} on B1 ⊗ B2"),
                    });
                }
                let mut m = ComplexMatrix::zeros(dim, dim);
                for (i, row) in rows.iter().enumerate() {
                    for (j, &[re, im]) in row.iter().enumerate() {
                        m[(i, j)] = Complex64::new(re, im);
                    }
                }
                let op = DensityOperator::new(m)
                    .map_err(|e| Error::InvalidChannelState { x1, x2, reason: e.to_string() })?;
                ops[x1 * x2_size + x2] = Some(op);
            }
        }
        (None, Some(classical)) => {
            for (key, table) in classical {
                let (x1, x2) = parse_pair_key(&key, x1_size, x2_size)?;
                if table.len() != db1 || table.iter().any(|r| r.len() != db2) {
                    return Err(Error::InvalidChannelState {
                        x1,
                        x2,
                        reason: format!("classical table must be {db1}x{db2} (y1 by y2)"),
                    });
                }
                let mut diag = Vec::with_capacity(dim);
                for row in &table {
                    diag.extend_from_slice(row);
                }
                let sum: f64 = diag.iter().sum();
                if (sum - 1.0).abs() > crate::channel::TABLE_ROW_SUM_TOL
                    || diag.iter().any(|&p| p < 0.0)
                {
                    return Err(Error::InvalidChannelState {
                        x1,
                        x2,
                        reason: format!("probability table sums to {sum:.12}"),
                    });
                }
                if (sum - 1.0).abs() > crate::channel::DIST_SUM_TOL {
                    for p in diag.iter_mut() {
                        *p /= sum;
                    }
                }
                let op = DensityOperator::from_probabilities(&diag)
                    .map_err(|e| Error::InvalidChannelState { x1, x2, reason: e.to_string() })?;
                ops[x1 * x2_size + x2] = Some(op);
            }
        }
    }

    let mut states = Vec::with_capacity(pairs);
    for (idx, op) in ops.into_iter().enumerate() {
        match op {
            Some(op) => states.push(op),
            None => {
                return Err(Error::ChannelFormat(format!(
                    "missing state for input pair ({}, {})",
                    idx / x2_size,
                    idx % x2_size
                )));
            }
        }
    }
    CcqqChannel::new(alphabet(x1_size, x1_labels)?, alphabet(x2_size, x2_labels)?, db1, db2, states)
}

fn file_from_channel(ch: &CcqqChannel) -> ChannelFile {
    let dim = ch.db1() * ch.db2();
    let mut states = BTreeMap::new();
    for x1 in 0..ch.x1().size() {
        for x2 in 0..ch.x2().size() {
            let m = ch.state(x1, x2).matrix();
            let rows: Vec<Vec<[f64; 2]>> = (0..dim)
                .map(|i| (0..dim).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect();
            states.insert(format!("{x1},{x2}"), rows);
        }
    }
    ChannelFile {
        x1_size: ch.x1().size(),
        x2_size: ch.x2().size(),
        db1: ch.db1(),
        db2: ch.db2(),
        x1_labels: ch.x1().labels().map(|l| l.to_vec()),
        x2_labels: ch.x2().labels().map(|l| l.to_vec()),
        states: Some(states),
        classical: None,
    }
}

/// Parses a channel from JSON text.
pub fn channel_from_json(text: &str) -> Result<CcqqChannel> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::ChannelFormat(e.to_string()))?;
    channel_from_file(file)
}

/// Serializes a channel to pretty-printed JSON (always the `states` form).
pub fn channel_to_json(ch: &CcqqChannel) -> String {
    serde_json::to_string_pretty(&file_from_channel(ch)).expect("channel serialization")
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<CcqqChannel> {
    channel_from_json(&fs::read_to_string(path)?)
}

pub fn save_channel(ch: &CcqqChannel, path: impl AsRef<Path>) -> Result<()> {
    let mut text = channel_to_json(ch);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{classical_embed, ConditionalTable};
    use crate::linalg::basis_vector;

    fn swap_channel() -> CcqqChannel {
        // y1 = x2, y2 = x1, noiselessly.
        let mut probs = vec![0.0; 16];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                probs[((x1 * 2 + x2) * 2 + x2) * 2 + x1] = 1.0;
            }
        }
        classical_embed(&ConditionalTable::new(2, 2, 2, 2, probs).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let ch = swap_channel();
        let text = channel_to_json(&ch);
        let back = channel_from_json(&text).unwrap();
        assert_eq!(ch, back);
        assert_eq!(channel_to_json(&back), text);
    }

    #[test]
    fn round_trip_preserves_awkward_floats() {
        let third = 1.0 / 3.0;
        let states = vec![
            DensityOperator::from_probabilities(&[third, third, 1.0 - 2.0 * third]).unwrap();
            2
        ];
        let ch = CcqqChannel::new(
            Alphabet::new(2).unwrap(),
            Alphabet::new(1).unwrap(),
            3,
            1,
            states,
        )
        .unwrap();
        let back = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn classical_block_expands_to_diagonal_states() {
        let text = r#"{
            "x1_size": 1, "x2_size": 2, "db1": 2, "db2": 1,
            "classical": {
                "0,0": [[1.0], [0.0]],
                "0,1": [[0.25], [0.75]]
            }
        }"#;
        let ch = channel_from_json(text).unwrap();
        assert!((ch.state(0, 1).matrix()[(1, 1)].re - 0.75).abs() < 1e-15);
        assert_eq!(ch.state(0, 1).matrix()[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn missing_pair_is_rejected() {
        let text = r#"{
            "x1_size": 2, "x2_size": 1, "db1": 1, "db2": 1,
            "classical": { "0,0": [[1.0]] }
        }"#;
        let err = channel_from_json(text).unwrap_err();
        assert!(err.to_string().contains("missing state for input pair (1, 0)"));
    }

    #[test]
    fn both_blocks_rejected() {
        let text = r#"{
            "x1_size": 1, "x2_size": 1, "db1": 1, "db2": 1,
            "states": { "0,0": [[[1.0, 0.0]]] },
            "classical": { "0,0": [[1.0]] }
        }"#;
        assert!(channel_from_json(text).is_err());
    }

    #[test]
    fn invalid_trace_names_the_pair() {
        let text = r#"{
            "x1_size": 1, "x2_size": 1, "db1": 2, "db2": 1,
            "states": { "0,0": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]] }
        }"#;
        let err = channel_from_json(text).unwrap_err();
        match err {
            Error::InvalidChannelState { x1: 0, x2: 0, reason } => {
                assert!(reason.contains("trace"), "reason was: {reason}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_state_rejected() {
        let text = r#"{
            "x1_size": 1, "x2_size": 1, "db1": 2, "db2": 1,
            "states": { "0,0": [[[0.5, 0.0], [0.2, 0.0]], [[0.0, 0.0], [0.5, 0.0]]] }
        }"#;
        let err = channel_from_json(text).unwrap_err();
        assert!(err.to_string().contains("Hermitian"));
    }

    #[test]
    fn quantum_states_round_trip_through_files() {
        let plus = {
            let mut v = crate::linalg::ComplexMatrix::zeros(2, 1);
            let s = 0.5f64.sqrt();
            v[(0, 0)] = Complex64::new(s, 0.0);
            v[(1, 0)] = Complex64::new(s, 0.0);
            v
        };
        let states = vec![
            DensityOperator::pure(&basis_vector(2, 0)).unwrap(),
            DensityOperator::pure(&plus).unwrap(),
        ];
        let second = vec![DensityOperator::maximally_mixed(2); 2];
        let ch = crate::channel::product_channel(
            Alphabet::new(2).unwrap(),
            Alphabet::new(1).unwrap(),
            states,
            second,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ch.json");
        save_channel(&ch, &path).unwrap();
        let back = load_channel(&path).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn labels_survive_round_trip() {
        let ch = CcqqChannel::new(
            Alphabet::with_labels(vec!["lo".into(), "hi".into()]).unwrap(),
            Alphabet::new(1).unwrap(),
            1,
            1,
            vec![DensityOperator::maximally_mixed(1); 2],
        )
        .unwrap();
        let back = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(back.x1().label(1), "hi");
    }
}
