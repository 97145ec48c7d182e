// Great-circle distances, pairwise matrices and prediction grids.
//
// ```bash
// cargo run --example great_circle_grid
// ```

use geodialect::geo::{build_grid, haversine_km, pairwise_distances};
use geodialect::{GeoPoint, Result, Site};

pub fn run() -> Result<()> {
    let milan = GeoPoint::new(45.4642, 9.19)?;
    let rome = GeoPoint::new(41.9028, 12.4964)?;
    let naples = GeoPoint::new(40.8518, 14.2681)?;
    println!("Milan -> Rome: {:.1} km", haversine_km(milan, rome));

    let sites = vec![
        Site::new("milan", milan, 0.0)?,
        Site::new("rome", rome, 0.0)?,
        Site::new("naples", naples, 0.0)?,
    ];
    let d = pairwise_distances(&sites)?;
    for (i, id) in d.ids().iter().enumerate() {
        let row: Vec<String> = d.row(i).iter().map(|v| format!("{v:8.1}")).collect();
        println!("{id:>7} {}", row.join(" "));
    }

    let grid = build_grid(GeoPoint::new(40.0, 9.0)?, GeoPoint::new(46.0, 15.0)?, 0.5)?;
    let first = grid[0];
    let last = grid[grid.len() - 1];
    println!(
        "grid: {} cells, first ({}, {}), last ({}, {})",
        grid.len(),
        first.lat(),
        first.lon(),
        last.lat(),
        last.lon()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
