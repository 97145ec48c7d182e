//! Correlation statistics and the drift covariate.

use crate::error::{Error, Result};
use crate::geo::DistanceMatrix;

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlation needs at least 3 observations, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson over average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Drift covariate derived from the best-scoring site.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityCovariate {
    pub best_id: String,
    /// `(site id, distance to best site)` in the order of the input scores.
    pub values: Vec<(String, f64)>,
}

/// Distance from every scored site to the highest-scoring one (ties go to
/// the smallest id). Larger values mean *less* similar, so correlations
/// against this covariate carry the opposite sign of a similarity.
pub fn similarity_covariate(
    distances: &DistanceMatrix,
    scores: &[(String, f64)],
) -> Result<SimilarityCovariate> {
    if scores.is_empty() {
        return Err(Error::InsufficientData("no scores".into()));
    }
    let missing: Vec<String> = scores
        .iter()
        .filter(|(id, _)| distances.index_of(id).is_none())
        .map(|(id, _)| id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnknownIds(missing));
    }
    let (best_id, _) = scores
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .expect("non-empty");
    distance_to_site(distances, scores, best_id)
}

/// Like [`similarity_covariate`] with the reference site fixed by id.
pub fn distance_to_site(
    distances: &DistanceMatrix,
    scores: &[(String, f64)],
    best_id: &str,
) -> Result<SimilarityCovariate> {
    let missing: Vec<String> = scores
        .iter()
        .map(|(id, _)| id.as_str())
        .chain(std::iter::once(best_id))
        .filter(|id| distances.index_of(id).is_none())
        .map(str::to_owned)
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnknownIds(missing));
    }
    let best = distances.index_of(best_id).expect("checked above");
    let row = distances.row(best);
    let values = scores
        .iter()
        .map(|(id, _)| {
            let i = distances.index_of(id).expect("checked above");
            (id.clone(), row[i])
        })
        .collect();
    Ok(SimilarityCovariate {
        best_id: best_id.to_string(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_linear() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_three_points() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spearman_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let cubed: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        assert!((spearman(&x, &cubed).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| (-v).exp()).collect();
        assert!((spearman(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn ties_get_average_rank() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn constant_or_short_input_fails() {
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ConstantInput)));
        assert!(spearman(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    fn four() -> DistanceMatrix {
        let d = [
            [0.0, 1.0, 2.0, 3.0],
            [1.0, 0.0, 4.0, 5.0],
            [2.0, 4.0, 0.0, 6.0],
            [3.0, 5.0, 6.0, 0.0],
        ];
        DistanceMatrix::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            d.iter().flatten().copied().collect(),
        )
        .unwrap()
    }

    #[test]
    fn covariate_is_row_of_best_site() {
        let scores = vec![
            ("a".to_string(), 10.0),
            ("b".to_string(), 30.0),
            ("c".to_string(), 20.0),
            ("d".to_string(), 5.0),
        ];
        let c = similarity_covariate(&four(), &scores).unwrap();
        assert_eq!(c.best_id, "b");
        let vals: Vec<f64> = c.values.iter().map(|v| v.1).collect();
        assert_eq!(vals, vec![1.0, 0.0, 4.0, 5.0]);
    }

    #[test]
    fn covariate_tie_and_two_sites() {
        let scores = vec![("c".to_string(), 9.0), ("b".to_string(), 9.0)];
        let c = similarity_covariate(&four(), &scores).unwrap();
        assert_eq!(c.best_id, "b");
        assert_eq!(c.values, vec![("c".to_string(), 4.0), ("b".to_string(), 0.0)]);
    }

    #[test]
    fn covariate_unknown_ids() {
        let scores = vec![("a".to_string(), 1.0), ("zz".to_string(), 2.0)];
        assert!(matches!(
            similarity_covariate(&four(), &scores),
            Err(Error::UnknownIds(ids)) if ids == vec!["zz".to_string()]
        ));
    }
}
