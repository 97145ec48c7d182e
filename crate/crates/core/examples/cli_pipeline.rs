// The command-line pipeline driven from code: write a site CSV, then run
// `fit-variogram`, `interpolate` and `evaluate` into a scratch directory.
//
// ```bash
// cargo run --example cli_pipeline
// ```

use geodialect::cli::{run as cli, CliError};
use geodialect::io::sites_csv;
use geodialect::synthetic::{SyntheticConfig, SyntheticField};

pub fn run() -> Result<(), CliError> {
    let dir = std::env::temp_dir().join("geodialect-cli-pipeline");
    std::fs::create_dir_all(&dir).map_err(geodialect::Error::from)?;
    let cfg = SyntheticConfig {
        n_sites: 80,
        ..Default::default()
    };
    let field = SyntheticField::generate(&cfg, 2)?;
    let sites = dir.join("sites.csv");
    std::fs::write(&sites, sites_csv(&field.sites)?).map_err(geodialect::Error::from)?;
    let sites = sites.to_string_lossy().into_owned();
    let out = dir.to_string_lossy().into_owned();

    for args in [
        vec!["fit-variogram", "--sites", &sites, "--out-dir", &out],
        vec!["interpolate", "--sites", &sites, "--method", "idw", "--cell", "0.5", "--out-dir", &out],
        vec!["evaluate", "--sites", &sites, "--methods", "nn,idw", "--out-dir", &out],
    ] {
        let written = cli(std::iter::once("geodialect").chain(args.iter().copied()))?;
        for p in written {
            println!("{}", p.display());
        }
    }
    print!("{}", std::fs::read_to_string(dir.join("results.csv")).map_err(geodialect::Error::from)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
