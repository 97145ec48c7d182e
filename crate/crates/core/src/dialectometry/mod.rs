//! Acoustic dialectometry: DTW distances between spoken words, site-level
//! linguistic distances, classical MDS and RGB continuum maps.

mod dtw;
mod mds;

pub use dtw::{dtw_distance, FeatureSequence};
pub use mds::{classical_mds, mds_to_rgb, stress, MdsEmbedding};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo::{check_unique_ids, DistanceMatrix};

/// Feature sequences for one site, aligned by word index across sites.
/// `None` marks a word that was not recorded at this site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteWordList {
    pub site_id: String,
    pub words: Vec<Option<FeatureSequence>>,
}

impl SiteWordList {
    pub fn new(site_id: impl Into<String>, words: Vec<Option<FeatureSequence>>) -> Self {
        Self {
            site_id: site_id.into(),
            words,
        }
    }

    fn dim(&self) -> Option<usize> {
        self.words.iter().flatten().map(FeatureSequence::dim).next()
    }
}

/// Mean DTW distance over the words recorded at both sites.
pub fn site_distance(x: &SiteWordList, y: &SiteWordList) -> Result<f64> {
    if x.words.len() != y.words.len() {
        return Err(Error::LengthMismatch {
            left: x.words.len(),
            right: y.words.len(),
        });
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (a, b) in x.words.iter().zip(&y.words) {
        if let (Some(a), Some(b)) = (a, b) {
            total += dtw_distance(a, b)?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InsufficientData(format!(
            "sites `{}` and `{}` share no recorded words",
            x.site_id, y.site_id
        )));
    }
    Ok(total / count as f64)
}

/// Pairwise [`site_distance`] over all sites. Pairs are evaluated in
/// parallel; the result does not depend on scheduling.
pub fn linguistic_distance_matrix(sites: &[SiteWordList]) -> Result<DistanceMatrix> {
    if sites.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "linguistic distances need at least 2 sites, got {}",
            sites.len()
        )));
    }
    check_unique_ids(sites.iter().map(|s| s.site_id.as_str()))?;
    let mut dims = sites.iter().filter_map(|s| s.dim().map(|d| (s, d)));
    if let Some((first, d0)) = dims.next() {
        for (s, d) in dims {
            if d != d0 {
                return Err(Error::DimensionMismatch(format!(
                    "site `{}` has {d0}-dimensional features but `{}` has {d}",
                    first.site_id, s.site_id
                )));
            }
        }
    }
    let n = sites.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let upper = pairs
        .par_iter()
        .map(|&(i, j)| site_distance(&sites[i], &sites[j]))
        .collect::<Result<Vec<f64>>>()?;
    let ids = sites.iter().map(|s| s.site_id.clone()).collect();
    Ok(DistanceMatrix::from_upper(ids, &upper))
}
