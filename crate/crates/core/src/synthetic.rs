//! Seeded synthetic fields with a known distance trend.
//!
//! Sites are scattered uniformly over a latitude/longitude box. Each value is
//!
//! ```text
//! intercept + slope * covariate + spatial noise + white noise
//! covariate = -(distance to the designated best site) / covariate_scale_km
//! ```
//!
//! The spatial noise is a zero-mean Gaussian process with exponential
//! covariance `sill * exp(-3 h / range)`, the same effective-range
//! convention as [`crate::variogram`]. The designated best site is the
//! generated site nearest the south-west corner of the box, which maximises
//! the spread of distances to it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geo::{haversine_km, GeoPoint, Site};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_sites: usize,
    pub lat_range: (f64, f64),
    pub lon_range: (f64, f64),
    pub intercept: f64,
    pub slope: f64,
    pub covariate_scale_km: f64,
    pub noise_range_km: f64,
    pub noise_sill: f64,
    pub white_noise_var: f64,
}

impl Default for SyntheticConfig {
    /// 200 sites in a 10 x 10 degree box on the equator, `20 + 3 *
    /// covariate`, spatial noise with range 150 km and sill 25, unit white
    /// noise.
    fn default() -> Self {
        Self {
            n_sites: 200,
            lat_range: (-5.0, 5.0),
            lon_range: (0.0, 10.0),
            intercept: 20.0,
            slope: 3.0,
            covariate_scale_km: 100.0,
            noise_range_km: 150.0,
            noise_sill: 25.0,
            white_noise_var: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticField {
    /// Sites carrying their covariate.
    pub sites: Vec<Site>,
    pub best_id: String,
}

impl SyntheticField {
    pub fn generate(config: &SyntheticConfig, seed: u64) -> Result<Self> {
        let n = config.n_sites;
        if n < 2 {
            return Err(Error::InvalidParameter("synthetic field needs at least 2 sites".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| {
                let lat = rng.gen_range(config.lat_range.0..config.lat_range.1);
                let lon = rng.gen_range(config.lon_range.0..config.lon_range.1);
                GeoPoint::new(lat, lon)
            })
            .collect::<Result<Vec<_>>>()?;

        let cov = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                // Tiny jitter keeps the factorisation positive definite.
                config.noise_sill * (1.0 + 1e-10)
            } else {
                let h = haversine_km(points[i], points[j]);
                config.noise_sill * (-3.0 * h / config.noise_range_km).exp()
            }
        });
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::Singular("noise covariance is not positive definite".into()))?;
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let spatial = chol.l() * z;
        let white_sd = config.white_noise_var.sqrt();

        let corner = GeoPoint::new(config.lat_range.0, config.lon_range.0)?;
        let best_idx = (0..n)
            .min_by(|&a, &b| haversine_km(points[a], corner).total_cmp(&haversine_km(points[b], corner)))
            .unwrap_or(0);
        let best = points[best_idx];
        let sites = (0..n)
            .map(|i| {
                let covariate = -haversine_km(points[i], best) / config.covariate_scale_km;
                let eps: f64 = rng.sample(StandardNormal);
                let value = config.intercept + config.slope * covariate + spatial[i] + white_sd * eps;
                Site::new(format!("site{i:03}"), points[i], value).map(|s| s.with_covariate(covariate))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            best_id: sites[best_idx].id.clone(),
            sites,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_within_box() {
        let cfg = SyntheticConfig {
            n_sites: 30,
            ..Default::default()
        };
        let a = SyntheticField::generate(&cfg, 5).unwrap();
        let b = SyntheticField::generate(&cfg, 5).unwrap();
        assert_eq!(a, b);
        let best = a.sites.iter().find(|s| s.id == a.best_id).unwrap();
        assert_eq!(best.covariate, Some(0.0));
        for s in &a.sites {
            assert!((-5.0..5.0).contains(&s.point.lat()));
            assert!((0.0..10.0).contains(&s.point.lon()));
            assert!(s.covariate.unwrap() <= 0.0);
        }
    }
}
