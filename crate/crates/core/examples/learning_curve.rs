// Test RMSE against training-set size for tuned NN, IDW and RK.
//
// ```bash
// cargo run --release --example learning_curve
// ```

use geodialect::eval::{tuned_learning_curve, MethodKind, ParamGrid, SplitSpec};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::Result;

pub fn run() -> Result<()> {
    let field = SyntheticField::generate(&SyntheticConfig::default(), 5)?;
    let spec = SplitSpec::with_seed(5);
    let fractions = [0.1, 0.25, 0.5, 0.75, 1.0];
    for kind in [MethodKind::Nn, MethodKind::Idw, MethodKind::Rk] {
        let curve = tuned_learning_curve(&field.sites, kind, &ParamGrid::default(), &spec, &fractions, 10)?;
        println!("{}", curve.params);
        for p in &curve.points {
            match (p.mean_rmse, p.std_rmse) {
                (Some(m), Some(s)) => println!(
                    "  {:>4} ({:>3} sites): {m:.3} +/- {s:.3}",
                    p.fraction, p.train_size
                ),
                _ => println!("  {:>4} ({:>3} sites): unavailable", p.fraction, p.train_size),
            }
        }
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
