// Split, grid-search and test-RMSE comparison of NN, IDW, OK and RK on a
// synthetic field with a known distance trend.
//
// ```bash
// cargo run --release --example method_comparison
// ```

use geodialect::eval::{evaluate_methods, MethodKind, ParamGrid, SplitSpec};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::Result;

pub fn run() -> Result<()> {
    let field = SyntheticField::generate(&SyntheticConfig::default(), 42)?;
    let spec = SplitSpec::with_seed(42);
    let reports = evaluate_methods(&field.sites, &MethodKind::ALL, &ParamGrid::default(), &spec)?;
    println!("{:<6} {:>9} {:>9}  selected", "method", "val", "test");
    for r in &reports {
        println!(
            "{:<6} {:>9.3} {:>9.3}  {}",
            r.params.kind(),
            r.val_rmse,
            r.test_rmse,
            r.params
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
