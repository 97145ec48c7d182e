// Ordinary kriging: predictions, variances and weights.
//
// ```bash
// cargo run --example ordinary_kriging
// ```

use geodialect::kriging::{fit_ordinary, OrdinaryKriging, VariogramOptions};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::variogram::{VariogramFamily, VariogramModel};
use geodialect::{GeoPoint, Result, Site};

pub fn run() -> Result<()> {
    let cfg = SyntheticConfig {
        n_sites: 80,
        ..Default::default()
    };
    let field = SyntheticField::generate(&cfg, 21)?;
    let (train, held_out) = field.sites.split_at(70);

    let ok = fit_ordinary(train, &VariogramOptions::default())?;
    let m = ok.model();
    println!(
        "fitted {} variogram: nugget {:.3}, partial sill {:.3}, range {:.1} km",
        m.family, m.nugget, m.partial_sill, m.range_km
    );
    for s in held_out.iter().take(5) {
        let p = ok.predict(s.point)?;
        println!(
            "{}: observed {:7.3}  predicted {:7.3}  variance {:6.3}",
            s.id, s.value, p.value, p.variance
        );
    }

    let three = [
        Site::new("a", GeoPoint::new(0.0, 0.0)?, 1.0)?,
        Site::new("b", GeoPoint::new(0.0, 0.5)?, 2.0)?,
        Site::new("c", GeoPoint::new(0.5, 0.0)?, 4.0)?,
    ];
    let model = VariogramModel::new(VariogramFamily::Spherical, 0.0, 1.0, 200.0)?;
    let small = OrdinaryKriging::new(&three, model)?;
    let p = small.predict(GeoPoint::new(0.1, 0.1)?)?;
    for (id, w) in &p.weights {
        println!("weight {id}: {w:.4}");
    }
    println!("sum of weights: {:.12}", p.weights.iter().map(|w| w.1).sum::<f64>());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
