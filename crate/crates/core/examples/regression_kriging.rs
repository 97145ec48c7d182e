// Regression kriging: a linear drift on the covariate plus ordinary
// kriging of the residuals, compared with plain ordinary kriging.
//
// ```bash
// cargo run --example regression_kriging
// ```

use geodialect::eval::rmse;
use geodialect::kriging::{fit_ordinary, RegressionKriging, VariogramOptions};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::{Error, Result};

pub fn run() -> Result<()> {
    let field = SyntheticField::generate(&SyntheticConfig::default(), 8)?;
    let (train, test) = field.sites.split_at(170);
    let opts = VariogramOptions::default();

    let rk = RegressionKriging::new(train, &opts)?;
    println!(
        "drift: {:.3} + {:.3} * covariate (true 20 + 3 * covariate)",
        rk.drift().intercept(),
        rk.drift().slope()
    );
    println!("residual variogram: {}", rk.residual_model().family);

    let ok = fit_ordinary(train, &opts)?;
    let gold: Vec<f64> = test.iter().map(|s| s.value).collect();
    let rk_pred = test
        .iter()
        .map(|s| {
            let c = s.covariate.ok_or_else(|| Error::MissingCovariate(s.id.clone()))?;
            rk.predict(s.point, c).map(|p| p.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let ok_pred = test
        .iter()
        .map(|s| ok.predict(s.point).map(|p| p.value))
        .collect::<Result<Vec<_>>>()?;
    println!("test RMSE  OK {:.3}  RK {:.3}", rmse(&ok_pred, &gold)?, rmse(&rk_pred, &gold)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
