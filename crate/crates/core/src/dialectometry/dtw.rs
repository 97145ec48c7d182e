//! Dynamic time warping with path-length normalisation.
//!
//! The distance between two feature sequences is the minimum, over all
//! monotone warping paths with unit steps (diagonal, down, right), of the
//! summed Euclidean frame costs divided by the number of cells on the path.
//!
//! Minimising a ratio is not a plain shortest-path problem, so the solver
//! uses Dinkelbach iteration: for a candidate ratio `l` it finds the path
//! minimising `sum (c - l)` with the usual DTW recursion, and replaces `l`
//! by that path's ratio until it stops decreasing. Each step is O(T_x T_y)
//! and the sequence of ratios is strictly decreasing over a finite path set.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A `T x D` matrix of per-frame acoustic features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    data: Vec<f64>,
    dim: usize,
}

impl FeatureSequence {
    pub fn new(frames: Vec<Vec<f64>>) -> Result<Self> {
        let dim = frames.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(frames.len() * dim);
        for (t, f) in frames.iter().enumerate() {
            if f.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "frame {t} has {} features, expected {dim}",
                    f.len()
                )));
            }
            data.extend_from_slice(f);
        }
        Self::from_flat(data, dim)
    }

    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() {
            return Err(Error::InvalidValue(
                "feature sequence needs at least one frame and one dimension".into(),
            ));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not split into {dim}-dimensional frames",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("feature values must be finite".into()));
        }
        Ok(Self { data, dim })
    }

    /// One-dimensional sequence.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Canonical argument order so that `d(x, y)` and `d(y, x)` run the exact
/// same arithmetic.
fn canonical_order(x: &FeatureSequence, y: &FeatureSequence) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| {
        x.data
            .iter()
            .zip(&y.data)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Length-normalised DTW distance with Euclidean frame cost.
pub fn dtw_distance(x: &FeatureSequence, y: &FeatureSequence) -> Result<f64> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch(format!(
            "feature dimensions differ: {} vs {}",
            x.dim, y.dim
        )));
    }
    let (a, b) = if canonical_order(x, y) == Ordering::Greater {
        (y, x)
    } else {
        (x, y)
    };
    let (rows, cols) = (a.len(), b.len());
    let mut cost = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            cost.push(euclidean(a.frame(i), b.frame(j)));
        }
    }
    Ok(min_ratio_path(&cost, rows, cols))
}

#[derive(Clone, Copy)]
struct Cell {
    /// Shifted objective `sum (c - lambda)` along the best path to here.
    score: f64,
    raw: f64,
    len: u32,
}

/// Best path under the shifted cost; returns its raw cost and length.
fn best_shifted_path(cost: &[f64], rows: usize, cols: usize, lambda: f64, acc: &mut [Cell]) -> (f64, u32) {
    for i in 0..rows {
        for j in 0..cols {
            let c = cost[i * cols + j];
            let prev = if i == 0 && j == 0 {
                None
            } else {
                // Candidate order fixes tie-breaking: diagonal, then up, then left.
                let mut best: Option<Cell> = None;
                let cands = [
                    (i > 0 && j > 0).then(|| acc[(i - 1) * cols + j - 1]),
                    (i > 0).then(|| acc[(i - 1) * cols + j]),
                    (j > 0).then(|| acc[i * cols + j - 1]),
                ];
                for cand in cands.into_iter().flatten() {
                    if best.is_none_or(|b| cand.score < b.score) {
                        best = Some(cand);
                    }
                }
                best
            };
            acc[i * cols + j] = match prev {
                None => Cell {
                    score: c - lambda,
                    raw: c,
                    len: 1,
                },
                Some(p) => Cell {
                    score: p.score + (c - lambda),
                    raw: p.raw + c,
                    len: p.len + 1,
                },
            };
        }
    }
    let end = acc[rows * cols - 1];
    (end.raw, end.len)
}

fn min_ratio_path(cost: &[f64], rows: usize, cols: usize) -> f64 {
    let mut acc = vec![
        Cell {
            score: 0.0,
            raw: 0.0,
            len: 0
        };
        rows * cols
    ];
    let (raw, len) = best_shifted_path(cost, rows, cols, 0.0, &mut acc);
    let mut ratio = raw / len as f64;
    // Bounded by the number of distinct path lengths in practice; the cap
    // only guards against pathological round-off cycling.
    for _ in 0..(rows + cols + 64) {
        let (raw, len) = best_shifted_path(cost, rows, cols, ratio, &mut acc);
        let next = raw / len as f64;
        if !(next < ratio) {
            break;
        }
        ratio = next;
    }
    ratio
}
