//! Deterministic interpolators: nearest neighbour and inverse distance weighting.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, Site};

/// Inverse distance weighting parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwParams {
    pub power: f64,
    /// Restrict the weighted average to the `k` nearest sites; all sites when `None`.
    pub neighbors: Option<usize>,
}

impl IdwParams {
    pub fn new(power: f64, neighbors: Option<usize>) -> Result<Self> {
        let p = Self { power, neighbors };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "IDW power must be positive, got {}",
                self.power
            )));
        }
        if self.neighbors == Some(0) {
            return Err(Error::InvalidParameter(
                "IDW neighbour count must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for IdwParams {
    fn default() -> Self {
        Self {
            power: 2.0,
            neighbors: None,
        }
    }
}

/// Training sites ordered by (distance, id) from a target.
fn ranked(train: &[Site], target: GeoPoint) -> Vec<(f64, &Site)> {
    let mut v: Vec<(f64, &Site)> = train
        .iter()
        .map(|s| (s.point.distance_km(&target), s))
        .collect();
    v.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.id.cmp(&b.1.id),
        o => o,
    });
    v
}

/// Value of the nearest training site; equidistant ties go to the smallest id.
pub fn nn_interpolate(train: &[Site], target: GeoPoint) -> Result<f64> {
    train
        .iter()
        .map(|s| (s.point.distance_km(&target), s))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)))
        .map(|(_, s)| s.value)
        .ok_or_else(|| Error::InsufficientData("empty training set".into()))
}

/// Inverse distance weighted average with weights `1 / d^p`.
///
/// A target coinciding with a training site returns that site's value.
pub fn idw_interpolate(train: &[Site], target: GeoPoint, params: IdwParams) -> Result<f64> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::InsufficientData("empty training set".into()));
    }
    if let Some(k) = params.neighbors {
        if k > train.len() {
            return Err(Error::InvalidParameter(format!(
                "IDW neighbour count {k} exceeds training size {}",
                train.len()
            )));
        }
    }
    let ranked = ranked(train, target);
    let (d_min, nearest) = ranked[0];
    if d_min == 0.0 {
        return Ok(nearest.value);
    }
    let k = params.neighbors.unwrap_or(ranked.len());
    // (d_min / d)^p is 1/d^p rescaled by a common factor; it avoids
    // overflow and underflow for large powers.
    let mut num = 0.0;
    let mut den = 0.0;
    for &(d, s) in &ranked[..k] {
        let w = (d_min / d).powf(params.power);
        num += w * s.value;
        den += w;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::EARTH_RADIUS_KM;

    fn site(id: &str, lat: f64, lon: f64, v: f64) -> Site {
        Site::new(id, GeoPoint::new(lat, lon).unwrap(), v).unwrap()
    }

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    /// Longitude offset (on the equator) of a point `km` away from lon 0.
    fn lon_at_km(km: f64) -> f64 {
        (km / EARTH_RADIUS_KM).to_degrees()
    }

    #[test]
    fn nn_at_training_site() {
        let t = vec![site("a", 1.0, 1.0, 42.0), site("b", 2.0, 2.0, 7.0)];
        assert_eq!(nn_interpolate(&t, p(1.0, 1.0)).unwrap(), 42.0);
    }

    #[test]
    fn nn_picks_closer_site() {
        let t = vec![site("a", 0.0, 0.0, 10.0), site("b", 0.0, 2.0, 20.0)];
        assert_eq!(nn_interpolate(&t, p(0.0, 0.5)).unwrap(), 10.0);
    }

    #[test]
    fn nn_tie_goes_to_smallest_id() {
        let t = vec![site("b", 0.0, 2.0, 20.0), site("a", 0.0, 0.0, 10.0)];
        assert_eq!(nn_interpolate(&t, p(0.0, 1.0)).unwrap(), 10.0);
    }

    #[test]
    fn empty_training_is_an_error() {
        assert!(nn_interpolate(&[], p(0.0, 0.0)).is_err());
        assert!(idw_interpolate(&[], p(0.0, 0.0), IdwParams::default()).is_err());
    }

    #[test]
    fn idw_coincident_passthrough() {
        let t = vec![site("a", 1.0, 1.0, 42.0), site("b", 2.0, 2.0, 7.0)];
        assert_eq!(
            idw_interpolate(&t, p(1.0, 1.0), IdwParams::default()).unwrap(),
            42.0
        );
    }

    #[test]
    fn idw_coincident_tie_goes_to_smallest_id() {
        let t = vec![site("z", 1.0, 1.0, 1.0), site("m", 1.0, 1.0, 2.0)];
        assert_eq!(
            idw_interpolate(&t, p(1.0, 1.0), IdwParams::default()).unwrap(),
            2.0
        );
    }

    #[test]
    fn idw_equidistant_is_mean() {
        let t = vec![site("a", 0.0, -1.0, 10.0), site("b", 0.0, 1.0, 20.0)];
        for power in [0.5, 1.0, 2.0, 7.0] {
            let v = idw_interpolate(&t, p(0.0, 0.0), IdwParams::new(power, None).unwrap()).unwrap();
            assert!((v - 15.0).abs() < 1e-12);
        }
    }

    #[test]
    fn idw_three_sites_hand_computed() {
        let t = vec![
            site("a", 0.0, lon_at_km(1.0), 0.0),
            site("b", 0.0, lon_at_km(2.0), 10.0),
            site("c", 0.0, lon_at_km(4.0), 20.0),
        ];
        // (0/1 + 10/4 + 20/16) / (1 + 1/4 + 1/16)
        let expected = 3.75 / 1.3125;
        let v = idw_interpolate(&t, p(0.0, 0.0), IdwParams::new(2.0, None).unwrap()).unwrap();
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
        assert!((expected - 2.857142857).abs() < 1e-9);
    }

    #[test]
    fn idw_rejects_invalid_params() {
        assert!(IdwParams::new(0.0, None).is_err());
        assert!(IdwParams::new(-1.0, None).is_err());
        assert!(IdwParams::new(1.0, Some(0)).is_err());
        let t = vec![site("a", 0.0, 0.0, 1.0)];
        let params = IdwParams {
            power: 1.0,
            neighbors: Some(2),
        };
        assert!(idw_interpolate(&t, p(1.0, 1.0), params).is_err());
    }

    #[test]
    fn idw_k1_is_nn() {
        let t = vec![
            site("a", 0.0, 0.0, 1.0),
            site("b", 1.0, 1.0, 5.0),
            site("c", 3.0, -1.0, 9.0),
        ];
        let q = p(0.9, 0.7);
        let idw = idw_interpolate(&t, q, IdwParams::new(2.0, Some(1)).unwrap()).unwrap();
        assert_eq!(idw, nn_interpolate(&t, q).unwrap());
    }
}
