// Nearest-neighbour and inverse distance weighted surfaces over a grid,
// exported as CSV and GeoJSON.
//
// ```bash
// cargo run --example idw_surface
// ```

use geodialect::geo::build_grid;
use geodialect::interpolation::{idw_interpolate, nn_interpolate, IdwParams};
use geodialect::io::{grid_csv, points_geojson};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::{GeoPoint, Result};

pub fn run() -> Result<()> {
    let cfg = SyntheticConfig {
        n_sites: 60,
        ..Default::default()
    };
    let field = SyntheticField::generate(&cfg, 11)?;
    let grid = build_grid(GeoPoint::new(-5.0, 0.0)?, GeoPoint::new(5.0, 10.0)?, 1.0)?;

    let nn = grid
        .iter()
        .map(|&p| nn_interpolate(&field.sites, p))
        .collect::<Result<Vec<_>>>()?;
    let params = IdwParams::new(2.0, Some(8))?;
    let idw = grid
        .iter()
        .map(|&p| idw_interpolate(&field.sites, p, params))
        .collect::<Result<Vec<_>>>()?;

    let spread = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    println!("{} grid cells", grid.len());
    println!("NN surface range:  {:.2}", spread(&nn));
    println!("IDW surface range: {:.2} (smoother)", spread(&idw));

    let dir = std::env::temp_dir().join("geodialect-idw-surface");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("grid.csv"), grid_csv(&grid, &idw)?)?;
    std::fs::write(dir.join("grid.geojson"), points_geojson(&grid, &idw)?)?;
    println!("wrote {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
