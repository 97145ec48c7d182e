//! Geodesic primitives: points, sites, great-circle distances and grids.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};

/// Mean Earth radius used for every great-circle distance.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A validated latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidCoordinate(format!(
                "latitude {lat} outside [-90, 90]"
            )));
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::InvalidCoordinate(format!(
                "longitude {lon} outside [-180, 180]"
            )));
        }
        Ok(Self { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub fn distance_km(&self, other: &GeoPoint) -> f64 {
        haversine_km(*self, *other)
    }
}

/// Great-circle distance in kilometres.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let s_lat = (dlat / 2.0).sin();
    let s_lon = (dlon / 2.0).sin();
    let h = s_lat * s_lat + lat1.cos() * lat2.cos() * s_lon * s_lon;
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// A geotagged observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub id: String,
    pub point: GeoPoint,
    pub value: f64,
    /// Auxiliary variable used as the regression-kriging drift.
    pub covariate: Option<f64>,
}

impl Site {
    pub fn new(id: impl Into<String>, point: GeoPoint, value: f64) -> Result<Self> {
        let id = id.into();
        if !value.is_finite() {
            return Err(Error::InvalidValue(format!("site `{id}` has value {value}")));
        }
        Ok(Self {
            id,
            point,
            value,
            covariate: None,
        })
    }

    pub fn with_covariate(mut self, covariate: f64) -> Self {
        self.covariate = Some(covariate);
        self
    }
}

/// Fails with [`Error::DuplicateId`] on the first repeated id.
pub fn check_unique_ids<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
    }
    Ok(())
}

/// Symmetric, non-negative, zero-diagonal matrix indexed by site id.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major entries, validating the invariants.
    pub fn new(ids: Vec<String>, data: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: n * n,
            });
        }
        check_unique_ids(ids.iter().map(String::as_str))?;
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidValue(format!(
                    "diagonal entry {i} is {}",
                    data[i * n + i]
                )));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidValue(format!("entry ({i}, {j}) is {v}")));
                }
                if v != data[j * n + i] {
                    return Err(Error::InvalidValue(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(Self { ids, data })
    }

    /// Builds a matrix from its strict upper triangle in row order.
    pub(crate) fn from_upper(ids: Vec<String>, upper: &[f64]) -> Self {
        let n = ids.len();
        let mut data = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                data[i * n + j] = upper[k];
                data[j * n + i] = upper[k];
                k += 1;
            }
        }
        Self { ids, data }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

/// Great-circle distance matrix between sites.
pub fn pairwise_distances(sites: &[Site]) -> Result<DistanceMatrix> {
    if sites.is_empty() {
        return Err(Error::InsufficientData("no sites".into()));
    }
    check_unique_ids(sites.iter().map(|s| s.id.as_str()))?;
    let n = sites.len();
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            upper.push(haversine_km(sites[i].point, sites[j].point));
        }
    }
    let ids = sites.iter().map(|s| s.id.clone()).collect();
    Ok(DistanceMatrix::from_upper(ids, &upper))
}

fn steps(span: f64, cell: f64) -> usize {
    // Tolerate representation error so that e.g. 11.0 / 0.1 counts as 110.
    let q = span / cell;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        q.floor() as usize
    }
}

/// Regular lattice over a bounding box, row-major with latitude descending
/// and longitude ascending. Both corners are included when the spans are
/// multiples of `cell_deg`.
pub fn build_grid(min: GeoPoint, max: GeoPoint, cell_deg: f64) -> Result<Vec<GeoPoint>> {
    if !(cell_deg.is_finite() && cell_deg > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cell size must be positive, got {cell_deg}"
        )));
    }
    if min.lat >= max.lat || min.lon >= max.lon {
        return Err(Error::InvalidParameter(
            "bounding box minimum must be below maximum on both axes".into(),
        ));
    }
    let n_lat = steps(max.lat - min.lat, cell_deg) + 1;
    let n_lon = steps(max.lon - min.lon, cell_deg) + 1;
    let mut out = Vec::with_capacity(n_lat * n_lon);
    for i in 0..n_lat {
        let lat = (max.lat - i as f64 * cell_deg).max(min.lat);
        for j in 0..n_lon {
            let lon = (min.lon + j as f64 * cell_deg).min(max.lon);
            out.push(GeoPoint::new(lat, lon)?);
        }
    }
    Ok(out)
}

/// Merges sites sharing exact coordinates into one site carrying the mean
/// value (and mean covariate when every member has one). The merged site
/// keeps the smallest id of its group; output follows first appearance.
pub fn dedupe_mean(sites: &[Site]) -> Vec<Site> {
    let mut groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    let mut order = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        let key = (s.point.lat.to_bits(), s.point.lon.to_bits());
        let g = groups.entry(key).or_default();
        if g.is_empty() {
            order.push(key);
        }
        g.push(i);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let n = members.len() as f64;
            let first = &sites[members[0]];
            let id = members
                .iter()
                .map(|&i| sites[i].id.as_str())
                .min()
                .unwrap_or(&first.id)
                .to_string();
            let value = members.iter().map(|&i| sites[i].value).sum::<f64>() / n;
            let covariate = members
                .iter()
                .map(|&i| sites[i].covariate)
                .sum::<Option<f64>>()
                .map(|c| c / n);
            Site {
                id,
                point: first.point,
                value,
                covariate,
            }
        })
        .collect()
}
