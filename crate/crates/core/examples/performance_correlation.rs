// Correlating per-site performance with distance to the best site, with a
// permuted-score control, then feeding the distance to regression kriging
// as a covariate.
//
// ```bash
// cargo run --example performance_correlation
// ```

use geodialect::eval::{pearson, similarity_covariate, spearman};
use geodialect::geo::pairwise_distances;
use geodialect::kriging::{RegressionKriging, VariogramOptions};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::Result;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> Result<()> {
    let field = SyntheticField::generate(&SyntheticConfig::default(), 1)?;
    let d = pairwise_distances(&field.sites)?;
    let scores: Vec<(String, f64)> = field.sites.iter().map(|s| (s.id.clone(), s.value)).collect();
    let cov = similarity_covariate(&d, &scores)?;
    let x: Vec<f64> = scores.iter().map(|s| s.1).collect();
    let y: Vec<f64> = cov.values.iter().map(|v| v.1).collect();
    println!("best-scoring site {} (designated {})", cov.best_id, field.best_id);
    println!("score vs km to best: pearson {:.3}, spearman {:.3}", pearson(&x, &y)?, spearman(&x, &y)?);

    let mut shuffled = x.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    println!("permuted control:    pearson {:.3}", pearson(&shuffled, &y)?);

    let with_cov: Vec<_> = field
        .sites
        .iter()
        .zip(&y)
        .map(|(s, &c)| s.clone().with_covariate(c))
        .collect();
    let rk = RegressionKriging::new(&with_cov, &VariogramOptions::default())?;
    println!(
        "drift on distance: {:.3} {:+.4} * km",
        rk.drift().intercept(),
        rk.drift().slope()
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
