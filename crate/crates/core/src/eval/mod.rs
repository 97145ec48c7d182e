//! Evaluation protocol: seeded 80/10/10 splits, grid search on the
//! validation set, test RMSE, learning curves over training-set fractions,
//! and correlation statistics.
//!
//! Randomness comes from ChaCha8 generators seeded with the caller's seed.
//! Learning-curve repetitions draw from independent streams of the same
//! seed, stream id `(fraction_index << 32) | rep`, so any repetition can be
//! reproduced on its own and the reps can run in parallel.

mod stats;

pub use stats::{
    average_ranks, distance_to_site, pearson, similarity_covariate, spearman, SimilarityCovariate,
};

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo::Site;
use crate::interpolation::{idw_interpolate, nn_interpolate, IdwParams};
use crate::kriging::{fit_ordinary, RegressionKriging, VariogramOptions};
use crate::numeric::{compensated_sum, mean_std};
use crate::variogram::VariogramFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    Nn,
    Idw,
    Ok,
    Rk,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [MethodKind::Nn, MethodKind::Idw, MethodKind::Ok, MethodKind::Rk];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Nn => "nn",
            MethodKind::Idw => "idw",
            MethodKind::Ok => "ok",
            MethodKind::Rk => "rk",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nn" => Ok(MethodKind::Nn),
            "idw" => Ok(MethodKind::Idw),
            "ok" => Ok(MethodKind::Ok),
            "rk" => Ok(MethodKind::Rk),
            other => Err(Error::InvalidParameter(format!(
                "unknown method `{other}` (valid: nn, idw, ok, rk)"
            ))),
        }
    }
}

/// A fully specified interpolation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodParams {
    Nn,
    Idw(IdwParams),
    Ok(VariogramOptions),
    Rk(VariogramOptions),
}

impl MethodParams {
    pub fn kind(&self) -> MethodKind {
        match self {
            MethodParams::Nn => MethodKind::Nn,
            MethodParams::Idw(_) => MethodKind::Idw,
            MethodParams::Ok(_) => MethodKind::Ok,
            MethodParams::Rk(_) => MethodKind::Rk,
        }
    }

    /// Smallest training set the method can be fitted on.
    pub fn min_train(&self) -> usize {
        match self {
            MethodParams::Nn => 1,
            MethodParams::Idw(p) => p.neighbors.unwrap_or(1),
            MethodParams::Ok(_) | MethodParams::Rk(_) => 3,
        }
    }

    /// Fits on `train` and predicts the value at every target site.
    /// Regression kriging reads the targets' covariates.
    pub fn predict(&self, train: &[Site], targets: &[Site]) -> Result<Vec<f64>> {
        match self {
            MethodParams::Nn => targets.iter().map(|t| nn_interpolate(train, t.point)).collect(),
            MethodParams::Idw(p) => targets
                .iter()
                .map(|t| idw_interpolate(train, t.point, *p))
                .collect(),
            MethodParams::Ok(opts) => {
                let k = fit_ordinary(train, opts)?;
                targets.iter().map(|t| k.predict(t.point).map(|p| p.value)).collect()
            }
            MethodParams::Rk(opts) => {
                let k = RegressionKriging::new(train, opts)?;
                targets
                    .iter()
                    .map(|t| {
                        let c = t.covariate.ok_or_else(|| Error::MissingCovariate(t.id.clone()))?;
                        k.predict(t.point, c).map(|p| p.value)
                    })
                    .collect()
            }
        }
    }

    /// Test RMSE after fitting on `train`.
    pub fn evaluate(&self, train: &[Site], test: &[Site]) -> Result<f64> {
        let pred = self.predict(train, test)?;
        let gold: Vec<f64> = test.iter().map(|s| s.value).collect();
        rmse(&pred, &gold)
    }
}

impl fmt::Display for MethodParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kriging = |f: &mut fmt::Formatter<'_>, name: &str, o: &VariogramOptions| {
            let fam = o.family.map_or("auto", VariogramFamily::name);
            write!(f, "{name}(family={fam};bins={})", o.n_bins)
        };
        match self {
            MethodParams::Nn => f.write_str("nn"),
            MethodParams::Idw(p) => match p.neighbors {
                Some(k) => write!(f, "idw(p={};k={k})", p.power),
                None => write!(f, "idw(p={};k=all)", p.power),
            },
            MethodParams::Ok(o) => kriging(f, "ok", o),
            MethodParams::Rk(o) => kriging(f, "rk", o),
        }
    }
}

/// Root mean squared error.
pub fn rmse(predictions: &[f64], gold: &[f64]) -> Result<f64> {
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::InsufficientData("RMSE of an empty set".into()));
    }
    let sse = compensated_sum(predictions.iter().zip(gold).map(|(p, g)| (p - g) * (p - g)));
    Ok((sse / gold.len() as f64).sqrt())
}

/// Train/validation/test proportions and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<Self> {
        if [train, val, test].iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("split ratios must be positive".into()));
        }
        if (train + val + test - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "split ratios must sum to 1, got {}",
                train + val + test
            )));
        }
        Ok(Self { train, val, test, seed })
    }

    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.8,
            val: 0.1,
            test: 0.1,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<Site>,
    pub val: Vec<Site>,
    pub test: Vec<Site>,
}

/// Seeded random partition. Validation and test sizes are `round(n * ratio)`;
/// the remainder goes to training. The assignment depends on the input order.
pub fn split_sites(sites: &[Site], spec: &SplitSpec) -> Result<Split> {
    SplitSpec::new(spec.train, spec.val, spec.test, spec.seed)?;
    let n = sites.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "splitting needs at least 10 sites, got {n}"
        )));
    }
    let n_val = (n as f64 * spec.val).round() as usize;
    let n_test = (n as f64 * spec.test).round() as usize;
    if n_val == 0 || n_test == 0 || n_val + n_test >= n {
        return Err(Error::InsufficientData(format!(
            "{n} sites cannot be split with ratios {}/{}/{}",
            spec.train, spec.val, spec.test
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let pick = |r: &[usize]| r.iter().map(|&i| sites[i].clone()).collect::<Vec<_>>();
    Ok(Split {
        val: pick(&idx[..n_val]),
        test: pick(&idx[n_val..n_val + n_test]),
        train: pick(&idx[n_val + n_test..]),
    })
}

/// Hyperparameter lists searched for each method.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub idw_powers: Vec<f64>,
    pub idw_neighbors: Vec<Option<usize>>,
    pub families: Vec<Option<VariogramFamily>>,
    pub n_bins: Vec<usize>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            idw_powers: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0],
            idw_neighbors: vec![Some(4), Some(8), Some(16), None],
            families: VariogramFamily::ALL.iter().copied().map(Some).collect(),
            n_bins: vec![10, 15, 20],
        }
    }
}

impl ParamGrid {
    /// All combinations for `kind`, outer loop first (power before
    /// neighbours, family before bin count).
    pub fn combinations(&self, kind: MethodKind) -> Vec<MethodParams> {
        match kind {
            MethodKind::Nn => vec![MethodParams::Nn],
            MethodKind::Idw => self
                .idw_powers
                .iter()
                .flat_map(|&power| {
                    self.idw_neighbors
                        .iter()
                        .map(move |&neighbors| MethodParams::Idw(IdwParams { power, neighbors }))
                })
                .collect(),
            MethodKind::Ok | MethodKind::Rk => self
                .families
                .iter()
                .flat_map(|&family| {
                    self.n_bins.iter().map(move |&n_bins| {
                        let o = VariogramOptions {
                            family,
                            n_bins,
                            max_lag_km: None,
                        };
                        if kind == MethodKind::Ok {
                            MethodParams::Ok(o)
                        } else {
                            MethodParams::Rk(o)
                        }
                    })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: MethodParams,
    pub best_rmse: f64,
    /// Validation RMSE per combination in enumeration order; failed
    /// combinations score `+inf`.
    pub scores: Vec<(MethodParams, f64)>,
    /// Combinations that failed to fit, with the error message.
    pub failures: Vec<(MethodParams, String)>,
}

/// Exhaustive search over explicit combinations, scored by validation RMSE.
/// Ties go to the earliest combination.
pub fn grid_search_over(
    combos: &[MethodParams],
    train: &[Site],
    val: &[Site],
) -> Result<GridSearchResult> {
    if combos.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    if train.is_empty() || val.is_empty() {
        return Err(Error::InsufficientData("empty training or validation set".into()));
    }
    let results: Vec<Result<f64>> = combos.par_iter().map(|c| c.evaluate(train, val)).collect();
    let mut scores = Vec::with_capacity(combos.len());
    let mut failures = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for (i, (c, r)) in combos.iter().zip(results).enumerate() {
        let score = match r {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                failures.push((*c, format!("non-finite RMSE {v}")));
                f64::INFINITY
            }
            Err(e) => {
                failures.push((*c, e.to_string()));
                f64::INFINITY
            }
        };
        if score.is_finite() && best.is_none_or(|(_, b)| score < b) {
            best = Some((i, score));
        }
        scores.push((*c, score));
    }
    let (i, best_rmse) = best.ok_or_else(|| {
        let msgs: Vec<String> = failures.iter().map(|(c, m)| format!("{c}: {m}")).collect();
        Error::InsufficientData(format!("every grid combination failed: {}", msgs.join("; ")))
    })?;
    Ok(GridSearchResult {
        best: combos[i],
        best_rmse,
        scores,
        failures,
    })
}

/// Grid search for one method family over `grid`.
pub fn grid_search(
    kind: MethodKind,
    grid: &ParamGrid,
    train: &[Site],
    val: &[Site],
) -> Result<GridSearchResult> {
    grid_search_over(&grid.combinations(kind), train, val)
}

/// Outcome of split, tune and test for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub params: MethodParams,
    pub val_rmse: f64,
    pub test_rmse: f64,
}

/// Tunes every method on the validation split and reports test RMSE.
pub fn evaluate_methods(
    sites: &[Site],
    kinds: &[MethodKind],
    grid: &ParamGrid,
    spec: &SplitSpec,
) -> Result<Vec<MethodReport>> {
    let split = split_sites(sites, spec)?;
    kinds
        .iter()
        .map(|&kind| {
            let run = || -> Result<MethodReport> {
                let gs = grid_search(kind, grid, &split.train, &split.val)?;
                let test_rmse = gs.best.evaluate(&split.train, &split.test)?;
                Ok(MethodReport {
                    params: gs.best,
                    val_rmse: gs.best_rmse,
                    test_rmse,
                })
            };
            run().map_err(|e| e.context(format!("method {kind}")))
        })
        .collect()
}

/// Mean and standard deviation of test RMSE over consecutive seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedReport {
    pub kind: MethodKind,
    pub mean_rmse: f64,
    pub std_rmse: f64,
    pub runs: usize,
}

/// Repeats [`evaluate_methods`] with seeds `spec.seed .. spec.seed + repeats`.
pub fn evaluate_methods_repeated(
    sites: &[Site],
    kinds: &[MethodKind],
    grid: &ParamGrid,
    spec: &SplitSpec,
    repeats: usize,
) -> Result<Vec<RepeatedReport>> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeat count must be >= 1".into()));
    }
    let runs = (0..repeats as u64)
        .into_par_iter()
        .map(|r| {
            let s = SplitSpec {
                seed: spec.seed.wrapping_add(r),
                ..*spec
            };
            evaluate_methods(sites, kinds, grid, &s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(m, &kind)| {
            let v: Vec<f64> = runs.iter().map(|r| r[m].test_rmse).collect();
            let (mean_rmse, std_rmse) = mean_std(&v);
            RepeatedReport {
                kind,
                mean_rmse,
                std_rmse,
                runs: repeats,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub fraction: f64,
    pub train_size: usize,
    /// `None` when the subsample is below the method minimum or every rep failed.
    pub mean_rmse: Option<f64>,
    /// Population standard deviation across successful reps.
    pub std_rmse: Option<f64>,
    pub reps: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub params: MethodParams,
    pub points: Vec<CurvePoint>,
}

fn stream_rng(seed: u64, fraction_index: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((fraction_index as u64) << 32) | rep as u64);
    rng
}

/// Test RMSE as a function of training-set size.
///
/// For each fraction, `reps` subsamples of `round(fraction * |pool|)` sites
/// are drawn without replacement from `pool`; the method is fitted on each
/// and scored on the fixed `test` set. Subsamples keep pool order, so the
/// full fraction reproduces a direct evaluation on `pool` exactly.
pub fn learning_curve(
    pool: &[Site],
    test: &[Site],
    params: &MethodParams,
    fractions: &[f64],
    reps: usize,
    seed: u64,
) -> Result<LearningCurve> {
    if reps == 0 {
        return Err(Error::InvalidParameter("repetition count must be >= 1".into()));
    }
    if fractions.is_empty() {
        return Err(Error::InvalidParameter("no fractions given".into()));
    }
    for w in fractions.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter("fractions must be strictly increasing".into()));
        }
    }
    if fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
        return Err(Error::InvalidParameter("fractions must lie in (0, 1]".into()));
    }
    if pool.is_empty() || test.is_empty() {
        return Err(Error::InsufficientData("empty training pool or test set".into()));
    }

    let mut points = Vec::with_capacity(fractions.len());
    for (fi, &fraction) in fractions.iter().enumerate() {
        let size = ((fraction * pool.len() as f64).round() as usize).clamp(1, pool.len());
        if size < params.min_train() {
            points.push(CurvePoint {
                fraction,
                train_size: size,
                mean_rmse: None,
                std_rmse: None,
                reps: 0,
                failures: 0,
            });
            continue;
        }
        if size == pool.len() {
            // Every rep would see the whole pool, so one evaluation stands for all.
            let (mean_rmse, std_rmse, ok, failures) = match params.evaluate(pool, test) {
                Ok(v) => (Some(v), Some(0.0), reps, 0),
                Err(e) => {
                    log::warn!("full-pool evaluation failed: {e}");
                    (None, None, 0, reps)
                }
            };
            points.push(CurvePoint {
                fraction,
                train_size: size,
                mean_rmse,
                std_rmse,
                reps: ok,
                failures,
            });
            continue;
        }
        let results: Vec<Result<f64>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream_rng(seed, fi, rep);
                let mut idx = rand::seq::index::sample(&mut rng, pool.len(), size).into_vec();
                idx.sort_unstable();
                let sub: Vec<Site> = idx.into_iter().map(|i| pool[i].clone()).collect();
                params.evaluate(&sub, test)
            })
            .collect();
        let ok: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
        let failures = results.len() - ok.len();
        if failures > 0 {
            if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
                log::warn!("{failures} of {reps} reps failed at fraction {fraction}: {e}");
            }
        }
        let (mean_rmse, std_rmse) = if ok.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_std(&ok);
            (Some(m), Some(s))
        };
        points.push(CurvePoint {
            fraction,
            train_size: size,
            mean_rmse,
            std_rmse,
            reps: ok.len(),
            failures,
        });
    }
    Ok(LearningCurve {
        params: *params,
        points,
    })
}

/// Splits, tunes once on train/validation, then runs [`learning_curve`]
/// with the training split as the pool and the test split held out.
pub fn tuned_learning_curve(
    sites: &[Site],
    kind: MethodKind,
    grid: &ParamGrid,
    spec: &SplitSpec,
    fractions: &[f64],
    reps: usize,
) -> Result<LearningCurve> {
    let split = split_sites(sites, spec)?;
    let gs = grid_search(kind, grid, &split.train, &split.val)
        .map_err(|e| e.context(format!("method {kind}")))?;
    learning_curve(&split.train, &split.test, &gs.best, fractions, reps, spec.seed)
}

/// Default learning-curve fractions.
pub const DEFAULT_FRACTIONS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;

    fn grid_sites(n: usize) -> Vec<Site> {
        (0..n)
            .map(|i| {
                let lat = 40.0 + (i / 10) as f64 * 0.3;
                let lon = 10.0 + (i % 10) as f64 * 0.3;
                Site::new(format!("s{i:03}"), GeoPoint::new(lat, lon).unwrap(), (lat * 3.0).sin() + lon)
                    .unwrap()
                    .with_covariate(lat)
            })
            .collect()
    }

    #[test]
    fn split_sizes() {
        let s = split_sites(&grid_sites(223), &SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (179, 22, 22));
        let s = split_sites(&grid_sites(10), &SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (8, 1, 1));
    }

    #[test]
    fn split_is_disjoint_covering_and_deterministic() {
        let sites = grid_sites(57);
        let a = split_sites(&sites, &SplitSpec::with_seed(3)).unwrap();
        let b = split_sites(&sites, &SplitSpec::with_seed(3)).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<&str> = a
            .train
            .iter()
            .chain(&a.val)
            .chain(&a.test)
            .map(|s| s.id.as_str())
            .collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 57);
        let c = split_sites(&sites, &SplitSpec::with_seed(4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_needs_ten_sites() {
        assert!(split_sites(&grid_sites(9), &SplitSpec::default()).is_err());
        assert!(SplitSpec::new(0.8, 0.1, 0.2, 0).is_err());
        assert!(SplitSpec::new(1.0, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn rmse_cases() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[3.5, -1.5, 0.5], &[1.0, -4.0, -2.0]).unwrap() - 2.5).abs() < 1e-15);
        let expected = (5.0f64 / 3.0).sqrt();
        assert!((rmse(&[1.0, 2.0, 3.0], &[2.0, 2.0, 5.0]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 1.29099).abs() < 1e-5);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    #[test]
    fn single_combination_grid() {
        let s = split_sites(&grid_sites(40), &SplitSpec::default()).unwrap();
        let gs = grid_search(MethodKind::Nn, &ParamGrid::default(), &s.train, &s.val).unwrap();
        assert_eq!(gs.best, MethodParams::Nn);
    }

    #[test]
    fn identical_scores_pick_first() {
        let s = split_sites(&grid_sites(40), &SplitSpec::default()).unwrap();
        let a = MethodParams::Idw(IdwParams::new(2.0, None).unwrap());
        let combos = [a, a];
        let gs = grid_search_over(&combos, &s.train, &s.val).unwrap();
        assert_eq!(gs.scores[0].1, gs.scores[1].1);
        assert_eq!(gs.best, a);
        assert_eq!(gs.best_rmse, gs.scores[0].1);
    }

    #[test]
    fn failing_combinations_score_infinity() {
        let s = split_sites(&grid_sites(40), &SplitSpec::default()).unwrap();
        let bad = MethodParams::Idw(IdwParams {
            power: 1.0,
            neighbors: Some(10_000),
        });
        let good = MethodParams::Idw(IdwParams::new(1.0, None).unwrap());
        let gs = grid_search_over(&[bad, good], &s.train, &s.val).unwrap();
        assert_eq!(gs.best, good);
        assert_eq!(gs.scores[0].1, f64::INFINITY);
        assert_eq!(gs.failures.len(), 1);
        assert!(grid_search_over(&[bad], &s.train, &s.val).is_err());
        assert!(grid_search_over(&[], &s.train, &s.val).is_err());
    }

    #[test]
    fn learning_curve_full_fraction_is_degenerate() {
        let s = split_sites(&grid_sites(50), &SplitSpec::default()).unwrap();
        let m = MethodParams::Idw(IdwParams::default());
        let c = learning_curve(&s.train, &s.test, &m, &[0.5, 1.0], 5, 1).unwrap();
        let last = c.points.last().unwrap();
        assert_eq!(last.std_rmse, Some(0.0));
        assert_eq!(last.mean_rmse, Some(m.evaluate(&s.train, &s.test).unwrap()));
    }

    #[test]
    fn learning_curve_single_rep_is_a_direct_evaluation() {
        let s = split_sites(&grid_sites(50), &SplitSpec::default()).unwrap();
        let m = MethodParams::Nn;
        let c = learning_curve(&s.train, &s.test, &m, &[0.3], 1, 9).unwrap();
        let mut rng = stream_rng(9, 0, 0);
        let size = (0.3 * s.train.len() as f64).round() as usize;
        let mut idx = rand::seq::index::sample(&mut rng, s.train.len(), size).into_vec();
        idx.sort_unstable();
        let sub: Vec<Site> = idx.into_iter().map(|i| s.train[i].clone()).collect();
        assert_eq!(c.points[0].mean_rmse, Some(m.evaluate(&sub, &s.test).unwrap()));
        assert_eq!(c.points[0].std_rmse, Some(0.0));
    }

    #[test]
    fn learning_curve_marks_too_small_subsamples() {
        let s = split_sites(&grid_sites(20), &SplitSpec::default()).unwrap();
        let m = MethodParams::Rk(VariogramOptions::default());
        let c = learning_curve(&s.train, &s.test, &m, &[0.1], 3, 1).unwrap();
        assert_eq!(c.points[0].mean_rmse, None);
        assert_eq!(c.points[0].reps, 0);
    }

    #[test]
    fn learning_curve_rejects_bad_fractions() {
        let s = split_sites(&grid_sites(20), &SplitSpec::default()).unwrap();
        let m = MethodParams::Nn;
        assert!(learning_curve(&s.train, &s.test, &m, &[0.5, 0.5], 3, 1).is_err());
        assert!(learning_curve(&s.train, &s.test, &m, &[0.0, 0.5], 3, 1).is_err());
        assert!(learning_curve(&s.train, &s.test, &m, &[1.5], 3, 1).is_err());
        assert!(learning_curve(&s.train, &s.test, &m, &[0.5], 0, 1).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for k in MethodKind::ALL {
            assert_eq!(k.name().parse::<MethodKind>().unwrap(), k);
        }
        let e = "kriging".parse::<MethodKind>().unwrap_err().to_string();
        assert!(e.contains("nn, idw, ok, rk"));
    }
}
