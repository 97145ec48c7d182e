//! Empirical semivariograms and theoretical model fitting.
//!
//! The empirical estimator bins site pairs by great-circle lag and reports
//! half the mean squared value difference per bin. Theoretical models use
//! the "effective range" convention: exponential and gaussian reach about
//! 95% of the partial sill at `range_km`, spherical reaches it exactly.
//!
//! Fitting minimises the pair-count weighted squared error
//! `sum N(h) (gamma_emp(h) - gamma(h))^2` subject to non-negative nugget
//! and partial sill. For a fixed range the model is linear in
//! (nugget, partial sill), so those two are solved exactly as a bounded
//! least-squares problem and the search runs over the range alone, from
//! several starting ranges.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geo::{haversine_km, Site};

/// Default number of lag bins.
pub const DEFAULT_BINS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariogramFamily {
    Spherical,
    Exponential,
    Gaussian,
}

impl VariogramFamily {
    pub const ALL: [VariogramFamily; 3] = [
        VariogramFamily::Spherical,
        VariogramFamily::Exponential,
        VariogramFamily::Gaussian,
    ];

    /// Unit-sill shape at a strictly positive lag.
    fn shape(self, h: f64, range: f64) -> f64 {
        let r = h / range;
        match self {
            VariogramFamily::Spherical => {
                if r >= 1.0 {
                    1.0
                } else {
                    1.5 * r - 0.5 * r * r * r
                }
            }
            VariogramFamily::Exponential => 1.0 - (-3.0 * r).exp(),
            VariogramFamily::Gaussian => 1.0 - (-3.0 * r * r).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VariogramFamily::Spherical => "spherical",
            VariogramFamily::Exponential => "exponential",
            VariogramFamily::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for VariogramFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariogramFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spherical" | "sph" => Ok(VariogramFamily::Spherical),
            "exponential" | "exp" => Ok(VariogramFamily::Exponential),
            "gaussian" | "gau" => Ok(VariogramFamily::Gaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown variogram family `{other}` (expected spherical, exponential or gaussian)"
            ))),
        }
    }
}

/// Theoretical semivariogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramModel {
    pub family: VariogramFamily,
    pub nugget: f64,
    pub partial_sill: f64,
    pub range_km: f64,
}

impl VariogramModel {
    pub fn new(
        family: VariogramFamily,
        nugget: f64,
        partial_sill: f64,
        range_km: f64,
    ) -> Result<Self> {
        if !(nugget.is_finite() && nugget >= 0.0) {
            return Err(Error::InvalidParameter(format!("nugget must be >= 0, got {nugget}")));
        }
        if !(partial_sill.is_finite() && partial_sill >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "partial sill must be >= 0, got {partial_sill}"
            )));
        }
        if !(range_km.is_finite() && range_km > 0.0) {
            return Err(Error::InvalidParameter(format!("range must be > 0, got {range_km}")));
        }
        Ok(Self {
            family,
            nugget,
            partial_sill,
            range_km,
        })
    }

    pub fn sill(&self) -> f64 {
        self.nugget + self.partial_sill
    }

    /// Semivariance at lag `h` km. Zero at `h = 0`; the nugget is the limit
    /// from the right.
    pub fn model_gamma(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::InvalidParameter(format!("lag must be >= 0, got {h}")));
        }
        Ok(self.gamma(h))
    }

    pub(crate) fn gamma(&self, h: f64) -> f64 {
        if h == 0.0 {
            0.0
        } else {
            self.nugget + self.partial_sill * self.family.shape(h, self.range_km)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramBin {
    /// Bin midpoint.
    pub lag_km: f64,
    pub gamma: f64,
    pub pairs: usize,
}

/// Binned semivariances; empty bins are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVariogram {
    pub bins: Vec<VariogramBin>,
    pub max_lag_km: f64,
}

impl EmpiricalVariogram {
    /// Wraps precomputed bins. Lags must be strictly increasing and positive.
    pub fn from_bins(bins: Vec<VariogramBin>, max_lag_km: f64) -> Result<Self> {
        if !(max_lag_km.is_finite() && max_lag_km > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "maximum lag must be > 0, got {max_lag_km}"
            )));
        }
        for w in bins.windows(2) {
            if !(w[0].lag_km < w[1].lag_km) {
                return Err(Error::InvalidParameter("lags must be strictly increasing".into()));
            }
        }
        for b in &bins {
            if !(b.lag_km > 0.0 && b.gamma >= 0.0 && b.gamma.is_finite()) {
                return Err(Error::InvalidParameter(format!("invalid bin {b:?}")));
            }
        }
        Ok(Self { bins, max_lag_km })
    }
}

/// Classical (Matheron) estimator over `n_bins` equal-width bins on
/// `(0, max_lag]`. The default maximum lag is half the largest pairwise
/// distance.
pub fn empirical_variogram(
    sites: &[Site],
    n_bins: usize,
    max_lag_km: Option<f64>,
) -> Result<EmpiricalVariogram> {
    if sites.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "empirical variogram needs at least 2 sites, got {}",
            sites.len()
        )));
    }
    if n_bins == 0 {
        return Err(Error::InvalidParameter("bin count must be >= 1".into()));
    }
    let n = sites.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = haversine_km(sites[i].point, sites[j].point);
            let diff = sites[i].value - sites[j].value;
            pairs.push((d, diff * diff));
        }
    }
    let max_lag = match max_lag_km {
        Some(m) => m,
        None => 0.5 * pairs.iter().map(|p| p.0).fold(0.0, f64::max),
    };
    if !(max_lag.is_finite() && max_lag > 0.0) {
        return Err(Error::InsufficientData(
            "all sites coincide; no positive lags to bin".into(),
        ));
    }
    let width = max_lag / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for &(d, sq) in &pairs {
        if d <= 0.0 || d > max_lag {
            continue;
        }
        let idx = ((d / width).ceil() as usize).saturating_sub(1).min(n_bins - 1);
        sums[idx] += sq;
        counts[idx] += 1;
    }
    let bins = (0..n_bins)
        .filter(|&b| counts[b] > 0)
        .map(|b| VariogramBin {
            lag_km: (b as f64 + 0.5) * width,
            gamma: sums[b] / (2.0 * counts[b] as f64),
            pairs: counts[b],
        })
        .collect();
    Ok(EmpiricalVariogram {
        bins,
        max_lag_km: max_lag,
    })
}

/// Pair-weighted squared error of a model against empirical bins.
pub fn objective(emp: &EmpiricalVariogram, model: &VariogramModel) -> f64 {
    emp.bins
        .iter()
        .map(|b| {
            let r = b.gamma - model.gamma(b.lag_km);
            b.pairs as f64 * r * r
        })
        .sum()
}

/// Fitted model together with its objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramFit {
    pub model: VariogramModel,
    pub objective: f64,
}

/// Range search is confined to this multiple of the maximum lag on either side.
const RANGE_SPAN: f64 = 1e3;
const START_FRACTIONS: [f64; 3] = [0.25, 0.5, 1.0];

/// Least-squares fit of one family to the empirical bins.
pub fn fit_variogram(emp: &EmpiricalVariogram, family: VariogramFamily) -> Result<VariogramFit> {
    if emp.bins.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "variogram fit needs at least 3 non-empty bins, got {}",
            emp.bins.len()
        )));
    }
    let max_lag = emp.max_lag_km;
    if emp.bins.iter().all(|b| b.gamma == 0.0) {
        let model = VariogramModel::new(family, 0.0, 0.0, max_lag)?;
        return Ok(VariogramFit {
            model,
            objective: 0.0,
        });
    }

    let profile = |log_range: f64| -> (f64, f64, f64) {
        let m = fit_at_range(emp, family, log_range.exp());
        (objective(emp, &m), m.nugget, m.partial_sill)
    };

    let lo = (max_lag / RANGE_SPAN).ln();
    let hi = (max_lag * 10.0).ln();
    let mut best: Option<(f64, f64)> = None; // (objective, log range)
    for frac in START_FRACTIONS {
        let t0 = (frac * max_lag).ln();
        let (t, f) = local_min(|t| profile(t).0, t0, lo, hi);
        let better = match best {
            None => true,
            Some((bf, bt)) => f < bf || (f == bf && t < bt),
        };
        if better {
            best = Some((f, t));
        }
    }
    let (_, t) = best.expect("at least one start");
    let (obj, nugget, sill) = profile(t);
    let model = VariogramModel::new(family, nugget, sill, t.exp())?;
    Ok(VariogramFit {
        model,
        objective: obj,
    })
}

fn fit_at_range(emp: &EmpiricalVariogram, family: VariogramFamily, range_km: f64) -> VariogramModel {
    let (nugget, partial_sill) = solve_linear_part(emp, family, range_km);
    VariogramModel {
        family,
        nugget,
        partial_sill,
        range_km,
    }
}

/// Best non-negative nugget and partial sill with the range held fixed.
/// These are the starting points of the range search in [`fit_variogram`].
pub fn fit_variogram_fixed_range(
    emp: &EmpiricalVariogram,
    family: VariogramFamily,
    range_km: f64,
) -> Result<VariogramFit> {
    if !(range_km.is_finite() && range_km > 0.0) {
        return Err(Error::InvalidParameter(format!("range must be positive, got {range_km}")));
    }
    let model = fit_at_range(emp, family, range_km);
    Ok(VariogramFit {
        objective: objective(emp, &model),
        model,
    })
}

/// Least-squares fit returning only the model.
pub fn fit_variogram_model(
    emp: &EmpiricalVariogram,
    family: VariogramFamily,
) -> Result<VariogramModel> {
    fit_variogram(emp, family).map(|f| f.model)
}

/// Fits every family and keeps the lowest objective; ties go to the earlier
/// family (spherical, exponential, gaussian) and then the shorter range.
pub fn fit_best_variogram(emp: &EmpiricalVariogram) -> Result<VariogramFit> {
    let mut best: Option<VariogramFit> = None;
    for family in VariogramFamily::ALL {
        let fit = fit_variogram(emp, family)?;
        let better = match &best {
            None => true,
            Some(b) => {
                fit.objective < b.objective
                    || (fit.objective == b.objective && fit.model.range_km < b.model.range_km)
            }
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("three families"))
}

/// Exact minimiser of `sum w (g - a - b f)^2` over `a, b >= 0`.
fn solve_linear_part(emp: &EmpiricalVariogram, family: VariogramFamily, range: f64) -> (f64, f64) {
    let (mut sw, mut swf, mut swff, mut swg, mut swfg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for b in &emp.bins {
        let w = b.pairs as f64;
        let f = family.shape(b.lag_km, range);
        sw += w;
        swf += w * f;
        swff += w * f * f;
        swg += w * b.gamma;
        swfg += w * f * b.gamma;
    }
    let sse = |a: f64, s: f64| -> f64 {
        emp.bins
            .iter()
            .map(|b| {
                let r = b.gamma - a - s * family.shape(b.lag_km, range);
                b.pairs as f64 * r * r
            })
            .sum()
    };
    let mut candidates = vec![(0.0, 0.0)];
    if sw > 0.0 {
        candidates.push(((swg / sw).max(0.0), 0.0));
    }
    if swff > 0.0 {
        candidates.push((0.0, (swfg / swff).max(0.0)));
    }
    let det = sw * swff - swf * swf;
    if det > 1e-12 * sw * swff {
        let a = (swg * swff - swf * swfg) / det;
        let s = (sw * swfg - swf * swg) / det;
        if a >= 0.0 && s >= 0.0 {
            candidates.push((a, s));
        }
    }
    let mut best = candidates[0];
    let mut best_sse = sse(best.0, best.1);
    for &c in &candidates[1..] {
        let e = sse(c.0, c.1);
        if e < best_sse {
            best = c;
            best_sse = e;
        }
    }
    best
}

/// Local minimum of `f` on `[lo, hi]` starting from `t0`: bracket by
/// expanding steps downhill, then golden-section search. The returned value
/// never exceeds `f(t0)`.
fn local_min(f: impl Fn(f64) -> f64, t0: f64, lo: f64, hi: f64) -> (f64, f64) {
    let t0 = t0.clamp(lo, hi);
    let f0 = f(t0);
    let mut best = (t0, f0);
    let track = |t: f64, v: f64, best: &mut (f64, f64)| {
        if v < best.1 {
            *best = (t, v);
        }
    };

    let step = 0.5;
    let tp = (t0 + step).min(hi);
    let tm = (t0 - step).max(lo);
    let fp = f(tp);
    let fm = f(tm);
    track(tp, fp, &mut best);
    track(tm, fm, &mut best);

    let (mut a, mut c);
    if fp >= f0 && fm >= f0 {
        a = tm;
        c = tp;
    } else {
        // Walk downhill with doubling steps until the value rises; the
        // minimum is then bracketed by the last three points.
        let dir = if fp < fm { 1.0 } else { -1.0 };
        let mut p0 = t0;
        let mut p1 = if dir > 0.0 { tp } else { tm };
        let mut f1 = fp.min(fm);
        let mut s = step;
        let p2 = loop {
            s *= 2.0;
            let next = (p1 + dir * s).clamp(lo, hi);
            if next == p1 {
                break p1;
            }
            let fnext = f(next);
            track(next, fnext, &mut best);
            if fnext >= f1 {
                break next;
            }
            p0 = p1;
            p1 = next;
            f1 = fnext;
        };
        a = p0.min(p2);
        c = p0.max(p2);
    }

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = c - INV_PHI * (c - a);
    let mut x2 = a + INV_PHI * (c - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    track(x1, f1, &mut best);
    track(x2, f2, &mut best);
    for _ in 0..200 {
        if (c - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - INV_PHI * (c - a);
            f1 = f(x1);
            track(x1, f1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (c - a);
            f2 = f(x2);
            track(x2, f2, &mut best);
        }
    }
    best
}
