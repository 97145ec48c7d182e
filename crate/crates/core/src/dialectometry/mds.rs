//! Classical (Torgerson) multidimensional scaling.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geo::DistanceMatrix;

const EIGEN_TOLERANCE: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 10_000;
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MdsEmbedding {
    pub ids: Vec<String>,
    /// `n` rows of `k` coordinates.
    pub coords: Vec<Vec<f64>>,
    /// Normalised stress of the configuration against the input distances.
    pub stress: f64,
    /// Top-`k` eigenvalues of the double-centred matrix, before clamping.
    pub eigenvalues: Vec<f64>,
}

impl MdsEmbedding {
    pub fn dims(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }
}

/// `sqrt(sum (d_ij - |y_i - y_j|)^2 / sum d_ij^2)` over `i < j`; zero when
/// every input distance is zero.
pub fn stress(d: &DistanceMatrix, coords: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let e = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let dij = d.get(i, j);
            num += (dij - e) * (dij - e);
            den += dij * dij;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Embeds a distance matrix in `k` dimensions.
///
/// Double-centres `-D^2 / 2`, takes the top-`k` eigenpairs and scales the
/// eigenvectors by the square roots of their eigenvalues. Negative
/// eigenvalues (non-Euclidean input) and those below `1e-12` times the
/// largest are treated as zero. Each eigenvector is signed so that its
/// largest-magnitude entry is positive.
pub fn classical_mds(d: &DistanceMatrix, k: usize) -> Result<MdsEmbedding> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension must be in 1..={n}, got {k}"
        )));
    }
    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j) * d.get(i, j));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));

    let eig = SymmetricEigen::try_new(b, EIGEN_TOLERANCE, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::Singular("eigendecomposition did not converge".into())
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    // Eigenvalues this close to zero are round-off; their eigenvectors are
    // arbitrary and would otherwise leak noise into the coordinates.
    let cutoff = eig.eigenvalues[order[0]].abs() * RANK_TOLERANCE;
    let mut coords = vec![vec![0.0; k]; n];
    let mut eigenvalues = Vec::with_capacity(k);
    for (c, &idx) in order.iter().take(k).enumerate() {
        let lambda = eig.eigenvalues[idx];
        eigenvalues.push(lambda);
        let scale = if lambda > cutoff { lambda.sqrt() } else { 0.0 };
        let v = eig.eigenvectors.column(idx);
        let pivot = (0..n)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            coords[i][c] = sign * v[i] * scale;
        }
    }
    let stress = stress(d, &coords);
    Ok(MdsEmbedding {
        ids: d.ids().to_vec(),
        coords,
        stress,
        eigenvalues,
    })
}

/// Maps a three-dimensional embedding to RGB bytes, one dimension per
/// channel. Each dimension is min-max scaled to `[0, 255]` and rounded half
/// up; a constant dimension maps to 128.
pub fn mds_to_rgb(emb: &MdsEmbedding) -> Result<Vec<[u8; 3]>> {
    if emb.dims() != 3 {
        return Err(Error::InvalidParameter(format!(
            "RGB mapping needs a 3-dimensional embedding, got {}",
            emb.dims()
        )));
    }
    let mut out = vec![[0u8; 3]; emb.coords.len()];
    for c in 0..3 {
        let (lo, hi) = emb
            .coords
            .iter()
            .map(|row| row[c])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        for (row, px) in emb.coords.iter().zip(out.iter_mut()) {
            px[c] = if hi > lo {
                let scaled = (row[c] - lo) / (hi - lo) * 255.0;
                (scaled + 0.5).floor().clamp(0.0, 255.0) as u8
            } else {
                128
            };
        }
    }
    Ok(out)
}
