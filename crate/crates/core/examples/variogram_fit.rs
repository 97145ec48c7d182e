// Empirical variogram of a synthetic field and least-squares model fits.
//
// ```bash
// cargo run --example variogram_fit
// ```

use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::variogram::{empirical_variogram, fit_best_variogram, fit_variogram, VariogramFamily};
use geodialect::Result;

pub fn run() -> Result<()> {
    let cfg = SyntheticConfig {
        n_sites: 150,
        slope: 0.0,
        ..Default::default()
    };
    let field = SyntheticField::generate(&cfg, 3)?;
    let emp = empirical_variogram(&field.sites, 15, Some(400.0))?;
    println!("{:>10} {:>10} {:>6}", "lag_km", "gamma", "pairs");
    for b in &emp.bins {
        println!("{:>10.1} {:>10.3} {:>6}", b.lag_km, b.gamma, b.pairs);
    }
    for family in VariogramFamily::ALL {
        let fit = fit_variogram(&emp, family)?;
        let m = fit.model;
        println!(
            "{:<12} nugget {:6.3}  partial sill {:7.3}  range {:7.1} km  objective {:.3e}",
            family.name(),
            m.nugget,
            m.partial_sill,
            m.range_km,
            fit.objective
        );
    }
    let best = fit_best_variogram(&emp)?;
    println!("selected: {}", best.model.family);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
