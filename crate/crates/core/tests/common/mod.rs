#![allow(dead_code)]

use geodialect::geo::haversine_km;
use geodialect::{GeoPoint, Site};

pub fn site(id: &str, lat: f64, lon: f64, value: f64) -> Site {
    Site::new(id, GeoPoint::new(lat, lon).unwrap(), value).unwrap()
}

pub fn sites_from(coords: &[(f64, f64, f64)]) -> Vec<Site> {
    coords
        .iter()
        .enumerate()
        .map(|(i, &(lat, lon, v))| site(&format!("s{i:02}"), lat, lon, v))
        .collect()
}

/// True when no two sites are closer than `min_km`.
pub fn well_separated(sites: &[Site], min_km: f64) -> bool {
    sites.iter().enumerate().all(|(i, a)| {
        sites[i + 1..]
            .iter()
            .all(|b| haversine_km(a.point, b.point) > min_km)
    })
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimum over every monotone warping path of mean cell cost, by
/// exhaustive enumeration.
pub fn brute_force_dtw(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    fn walk(x: &[Vec<f64>], y: &[Vec<f64>], i: usize, j: usize, cost: f64, len: usize, best: &mut f64) {
        let cost = cost + euclid(&x[i], &y[j]);
        let len = len + 1;
        if i + 1 == x.len() && j + 1 == y.len() {
            *best = best.min(cost / len as f64);
            return;
        }
        if i + 1 < x.len() && j + 1 < y.len() {
            walk(x, y, i + 1, j + 1, cost, len, best);
        }
        if i + 1 < x.len() {
            walk(x, y, i + 1, j, cost, len, best);
        }
        if j + 1 < y.len() {
            walk(x, y, i, j + 1, cost, len, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(x, y, 0, 0, 0.0, 0, &mut best);
    best
}

/// Per-bin `(gamma, pairs)` from a direct all-pairs loop over bins
/// `(b w, (b + 1) w]`; `None` for empty bins.
pub fn brute_force_variogram(sites: &[Site], n_bins: usize, max_lag: f64) -> Vec<Option<(f64, usize)>> {
    let width = max_lag / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for i in 0..sites.len() {
        for j in (i + 1)..sites.len() {
            let d = haversine_km(sites[i].point, sites[j].point);
            for b in 0..n_bins {
                let lo = b as f64 * width;
                let hi = if b + 1 == n_bins { max_lag } else { (b + 1) as f64 * width };
                if d > lo && d <= hi {
                    let diff = sites[i].value - sites[j].value;
                    sums[b] += diff * diff;
                    counts[b] += 1;
                }
            }
        }
    }
    (0..n_bins)
        .map(|b| (counts[b] > 0).then(|| (sums[b] / (2.0 * counts[b] as f64), counts[b])))
        .collect()
}

pub fn planar_distance_matrix(points: &[(f64, f64)]) -> geodialect::DistanceMatrix {
    let n = points.len();
    let ids = (0..n).map(|i| format!("p{i:02}")).collect();
    let data = (0..n * n)
        .map(|k| {
            let (a, b) = (points[k / n], points[k % n]);
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
        })
        .collect();
    geodialect::DistanceMatrix::new(ids, data).unwrap()
}
