//! Ordinary and regression kriging.
//!
//! The ordinary kriging system is assembled in semivariance form:
//!
//! ```text
//! | G   1 | | w  |   | g0 |
//! | 1'  0 | | mu | = | 1  |
//! ```
//!
//! where `G[i][j] = gamma(|x_i - x_j|)` and `g0[i] = gamma(|x_i - x0|)`.
//! The Lagrange multiplier `mu` enforces `sum w = 1`. The prediction
//! variance is `w' g0 + mu`.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geo::{haversine_km, GeoPoint, Site};
use crate::variogram::{
    empirical_variogram, fit_best_variogram, fit_variogram, VariogramFamily, VariogramModel,
    DEFAULT_BINS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct KrigingPrediction {
    pub value: f64,
    /// Kriging variance, clamped at zero.
    pub variance: f64,
    pub weights: Vec<(String, f64)>,
}

/// Ordinary kriging system factored once for a training set.
#[derive(Debug)]
pub struct OrdinaryKriging {
    ids: Vec<String>,
    points: Vec<GeoPoint>,
    values: Vec<f64>,
    model: VariogramModel,
    system: System,
    clamped: AtomicUsize,
}

#[derive(Debug)]
enum System {
    Factored {
        matrix: DMatrix<f64>,
        lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    },
    /// Zero sill: every pair is equally (un)informative, so the best
    /// unbiased predictor is the plain mean.
    Flat,
}

impl OrdinaryKriging {
    pub fn new(train: &[Site], model: VariogramModel) -> Result<Self> {
        let n = train.len();
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "ordinary kriging needs at least 2 training sites, got {n}"
            )));
        }
        let mut lags = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = haversine_km(train[i].point, train[j].point);
                if d == 0.0 {
                    return Err(Error::CoincidentSites {
                        first: train[i].id.clone(),
                        second: train[j].id.clone(),
                    });
                }
                lags[i * n + j] = d;
                lags[j * n + i] = d;
            }
        }
        let system = if model.sill() == 0.0 {
            System::Flat
        } else {
            let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = model.gamma(lags[i * n + j]);
                }
                a[(i, n)] = 1.0;
                a[(n, i)] = 1.0;
            }
            let lu = a.clone().lu();
            if !lu.is_invertible() {
                return Err(Error::Singular(
                    "ordinary kriging matrix is not invertible".into(),
                ));
            }
            System::Factored { matrix: a, lu }
        };
        Ok(Self {
            ids: train.iter().map(|s| s.id.clone()).collect(),
            points: train.iter().map(|s| s.point).collect(),
            values: train.iter().map(|s| s.value).collect(),
            model,
            system,
            clamped: AtomicUsize::new(0),
        })
    }

    pub fn model(&self) -> &VariogramModel {
        &self.model
    }

    /// Number of predictions whose negative round-off variance was clamped.
    pub fn clamped_variances(&self) -> usize {
        self.clamped.load(Ordering::Relaxed)
    }

    pub fn predict(&self, target: GeoPoint) -> Result<KrigingPrediction> {
        let n = self.values.len();
        let (weights, variance) = match &self.system {
            System::Flat => (vec![1.0 / n as f64; n], 0.0),
            System::Factored { matrix, lu } => {
                let mut rhs = DVector::<f64>::zeros(n + 1);
                let mut coincident = None;
                for i in 0..n {
                    let d = haversine_km(self.points[i], target);
                    if d == 0.0 && coincident.is_none() {
                        coincident = Some(i);
                    }
                    rhs[i] = self.model.gamma(d);
                }
                rhs[n] = 1.0;
                let sol = match coincident {
                    // The right-hand side is then column i of the matrix
                    // (gamma(0) = 0), so the exact solution is the unit vector.
                    Some(i) => {
                        let mut e = DVector::<f64>::zeros(n + 1);
                        e[i] = 1.0;
                        e
                    }
                    None => {
                        let mut x = lu
                            .solve(&rhs)
                            .ok_or_else(|| Error::Singular("kriging solve failed".into()))?;
                        // One step of iterative refinement.
                        let r = &rhs - matrix * &x;
                        if let Some(dx) = lu.solve(&r) {
                            x += dx;
                        }
                        x
                    }
                };
                if sol.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Singular("kriging weights are not finite".into()));
                }
                let mu = sol[n];
                let w: Vec<f64> = sol.iter().take(n).copied().collect();
                let var = w.iter().zip(rhs.iter()).map(|(a, b)| a * b).sum::<f64>() + mu;
                (w, var)
            }
        };
        let variance = if variance < 0.0 {
            self.clamped.fetch_add(1, Ordering::Relaxed);
            if variance < -1e-9 {
                log::warn!("kriging variance {variance} clamped to 0");
            }
            0.0
        } else {
            variance
        };
        let value = weights.iter().zip(&self.values).map(|(w, v)| w * v).sum();
        Ok(KrigingPrediction {
            value,
            variance,
            weights: self.ids.iter().cloned().zip(weights).collect(),
        })
    }
}

/// One-shot ordinary kriging at a single target.
pub fn ordinary_krige(
    train: &[Site],
    model: VariogramModel,
    target: GeoPoint,
) -> Result<KrigingPrediction> {
    OrdinaryKriging::new(train, model)?.predict(target)
}

/// Linear drift `m(x) = b0 + b1 * covariate` fitted by least squares.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    /// Intercept followed by one slope per covariate.
    pub coefficients: Vec<f64>,
    /// `value - m(x)` per training site, in training order.
    pub residuals: Vec<f64>,
}

impl DriftModel {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slope(&self) -> f64 {
        self.coefficients[1]
    }

    pub fn evaluate(&self, covariate: f64) -> f64 {
        self.coefficients[0] + self.coefficients[1] * covariate
    }
}

pub fn fit_drift(train: &[Site]) -> Result<DriftModel> {
    if train.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "drift fit needs at least 3 sites, got {}",
            train.len()
        )));
    }
    let xs = train
        .iter()
        .map(|s| s.covariate.ok_or_else(|| Error::MissingCovariate(s.id.clone())))
        .collect::<Result<Vec<f64>>>()?;
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = train.iter().map(|s| s.value).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, s) in xs.iter().zip(train) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (s.value - y_mean);
    }
    if sxx == 0.0 || xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::ConstantCovariate);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals = xs
        .iter()
        .zip(train)
        .map(|(x, s)| s.value - (intercept + slope * x))
        .collect();
    Ok(DriftModel {
        coefficients: vec![intercept, slope],
        residuals,
    })
}

/// Variogram settings for the kriging predictors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramOptions {
    /// Fixed family, or `None` to fit all and keep the best.
    pub family: Option<VariogramFamily>,
    pub n_bins: usize,
    pub max_lag_km: Option<f64>,
}

impl Default for VariogramOptions {
    fn default() -> Self {
        Self {
            family: None,
            n_bins: DEFAULT_BINS,
            max_lag_km: None,
        }
    }
}

/// Fits a variogram to the values of `sites` under `opts`.
pub fn fit_site_variogram(sites: &[Site], opts: &VariogramOptions) -> Result<VariogramModel> {
    let emp = empirical_variogram(sites, opts.n_bins, opts.max_lag_km)?;
    let fit = match opts.family {
        Some(f) => fit_variogram(&emp, f)?,
        None => fit_best_variogram(&emp)?,
    };
    Ok(fit.model)
}

/// Ordinary kriging with a variogram fitted to the training values.
pub fn fit_ordinary(train: &[Site], opts: &VariogramOptions) -> Result<OrdinaryKriging> {
    let model = fit_site_variogram(train, opts)?;
    OrdinaryKriging::new(train, model)
}

/// Drift plus ordinary kriging of the drift residuals.
#[derive(Debug)]
pub struct RegressionKriging {
    drift: DriftModel,
    residual_kriging: OrdinaryKriging,
}

impl RegressionKriging {
    pub fn new(train: &[Site], opts: &VariogramOptions) -> Result<Self> {
        let drift = fit_drift(train)?;
        let residual_sites: Vec<Site> = train
            .iter()
            .zip(&drift.residuals)
            .map(|(s, &r)| Site {
                id: s.id.clone(),
                point: s.point,
                value: r,
                covariate: None,
            })
            .collect();
        let model = fit_site_variogram(&residual_sites, opts)?;
        let residual_kriging = OrdinaryKriging::new(&residual_sites, model)?;
        Ok(Self {
            drift,
            residual_kriging,
        })
    }

    pub fn drift(&self) -> &DriftModel {
        &self.drift
    }

    pub fn residual_model(&self) -> &VariogramModel {
        self.residual_kriging.model()
    }

    pub fn predict(&self, target: GeoPoint, target_covariate: f64) -> Result<KrigingPrediction> {
        let residual = self.residual_kriging.predict(target)?;
        Ok(KrigingPrediction {
            value: self.drift.evaluate(target_covariate) + residual.value,
            ..residual
        })
    }
}

/// One-shot regression kriging at a single target.
pub fn regression_krige(
    train: &[Site],
    target: GeoPoint,
    target_covariate: f64,
    family: Option<VariogramFamily>,
) -> Result<KrigingPrediction> {
    let opts = VariogramOptions {
        family,
        ..Default::default()
    };
    RegressionKriging::new(train, &opts)?.predict(target, target_covariate)
}
