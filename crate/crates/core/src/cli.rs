//! The `geodialect` command line.
//!
//! Every subcommand accepts `--seed`, `--out-dir` and `--config`. A config
//! file holds `key=value` lines whose keys are long flag names without the
//! leading dashes (`power=1.5`, `no-rgb=true`); `#` starts a comment. Flags
//! given on the command line win over the file.
//!
//! Outputs are written only after every computation has succeeded; if any
//! write fails, the files already written by the run are removed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dialectometry::{classical_mds, linguistic_distance_matrix, mds_to_rgb};
use crate::error::{Error, Result};
use crate::eval::{
    distance_to_site, evaluate_methods, evaluate_methods_repeated, pearson, similarity_covariate,
    spearman, tuned_learning_curve, MethodKind, ParamGrid, SplitSpec, DEFAULT_FRACTIONS,
};
use crate::geo::{build_grid, dedupe_mean, pairwise_distances, DistanceMatrix, GeoPoint, Site};
use crate::interpolation::{idw_interpolate, nn_interpolate, IdwParams};
use crate::io::{self, csv_string, fmt_opt};
use crate::kriging::{fit_ordinary, RegressionKriging, VariogramOptions};
use crate::text_metrics::{bleu, chrf2, ScoredSegment};
use crate::variogram::{empirical_variogram, fit_best_variogram, fit_variogram, VariogramFamily, DEFAULT_BINS};

#[derive(Debug, Parser)]
#[command(name = "geodialect", version, about = "Geostatistics and dialectometry for dialect speech-to-text evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random choice made by the command.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Directory receiving the output files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// `key=value` file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interpolate site values onto a regular grid.
    Interpolate(InterpolateArgs),
    /// Compute the empirical variogram and fit a model.
    FitVariogram(FitVariogramArgs),
    /// Kriging predictions with variances at target locations.
    Krige(KrigeArgs),
    /// Split, tune and compare interpolation methods by test RMSE.
    Evaluate(EvaluateArgs),
    /// Test RMSE as a function of training-set size.
    LearningCurve(LearningCurveArgs),
    /// MDS embedding and RGB map of linguistic distances.
    MdsMap(MdsMapArgs),
    /// Correlate site scores with distance to the best site.
    Correlate(CorrelateArgs),
    /// Per-site chrF2 and BLEU from transcription segments.
    Score(ScoreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMethod {
    Nn,
    Idw,
    Ok,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KrigeMethod {
    Ok,
    Rk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dedupe {
    None,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovariateSource {
    /// DTW linguistic distance from the feature manifest.
    Dtw,
    /// Great-circle distance between sites.
    Geographic,
}

#[derive(Debug, Clone, Args)]
pub struct VariogramArgs {
    /// Variogram family (`spherical`, `exponential`, `gaussian`); best fit when omitted.
    #[arg(long)]
    pub family: Option<VariogramFamily>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Largest lag in km; half the largest pairwise distance when omitted.
    #[arg(long)]
    pub max_lag: Option<f64>,
}

impl VariogramArgs {
    fn options(&self) -> VariogramOptions {
        VariogramOptions {
            family: self.family,
            n_bins: self.bins,
            max_lag_km: self.max_lag,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InterpolateArgs {
    #[arg(long)]
    pub sites: PathBuf,
    #[arg(long, value_enum, default_value_t = GridMethod::Idw)]
    pub method: GridMethod,
    /// IDW power.
    #[arg(long, default_value_t = 2.0)]
    pub power: f64,
    /// IDW neighbour count; all sites when omitted.
    #[arg(long)]
    pub neighbors: Option<usize>,
    #[command(flatten)]
    pub variogram: VariogramArgs,
    /// `min_lat,min_lon,max_lat,max_lon`; the sites' bounding box when omitted.
    #[arg(long)]
    pub bbox: Option<String>,
    /// Grid spacing in degrees.
    #[arg(long, default_value_t = 0.1)]
    pub cell: f64,
    #[arg(long, value_enum, default_value_t = Dedupe::None)]
    pub dedupe: Dedupe,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct FitVariogramArgs {
    #[arg(long)]
    pub sites: PathBuf,
    #[command(flatten)]
    pub variogram: VariogramArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct KrigeArgs {
    #[arg(long)]
    pub sites: PathBuf,
    /// Targets CSV `id,lat,lon[,covariate]`.
    #[arg(long)]
    pub targets: PathBuf,
    #[arg(long, value_enum, default_value_t = KrigeMethod::Ok)]
    pub method: KrigeMethod,
    #[command(flatten)]
    pub variogram: VariogramArgs,
    #[arg(long, value_enum, default_value_t = Dedupe::None)]
    pub dedupe: Dedupe,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub sites: PathBuf,
    /// Comma-separated methods among nn, idw, ok, rk.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "nn,idw,rk")]
    pub methods: Vec<MethodKind>,
    /// Label for the `metric` column.
    #[arg(long, default_value = "value")]
    pub metric: String,
    /// Also report mean test RMSE over this many consecutive seeds.
    #[arg(long, default_value_t = 0)]
    pub repeats: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct LearningCurveArgs {
    #[arg(long)]
    pub sites: PathBuf,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "nn,idw,rk")]
    pub methods: Vec<MethodKind>,
    /// Comma-separated, strictly increasing fractions in (0, 1].
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub fractions: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct MdsMapArgs {
    /// Feature manifest `site_id,word_index,path`.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Site CSV providing coordinates for the RGB map.
    #[arg(long)]
    pub sites: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Skip the RGB map.
    #[arg(long)]
    pub no_rgb: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    /// Site CSV whose `value` column holds the scores.
    #[arg(long)]
    pub sites: PathBuf,
    /// Feature manifest, required for the DTW covariate.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CovariateSource::Dtw)]
    pub covariate: CovariateSource,
    /// Reference site; the highest-scoring site when omitted.
    #[arg(long)]
    pub best: Option<String>,
    #[arg(long, default_value = "value")]
    pub metric: String,
    /// Add a row for scores shuffled with the seed.
    #[arg(long)]
    pub permute_control: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Segments CSV `site_id,segment_id,hypothesis,ref_0[,ref_1,...]`.
    #[arg(long)]
    pub segments: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

/// Failure of a CLI run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    /// Process exit code: 2 for usage errors, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

fn command() -> clap::Command {
    Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true))
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i as u64 + 1,
            msg: format!("expected key=value, found `{line}`"),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    let mut found = None;
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
        }
    }
    found
}

/// Inserts config entries as flags right after the subcommand name so that
/// later command-line flags override them.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(sub_name) = args.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(args);
    };
    let cmd = command();
    let Some(sub) = cmd.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let mut tokens = Vec::new();
    for (key, value) in read_config(&path)? {
        if key == "config" {
            return Err(CliError::Usage(format!("{}: config files cannot include `config`", path.display())));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| {
                CliError::Usage(format!("{}: unknown key `{key}` for `{sub_name}`", path.display()))
            })?;
        if arg.get_action().takes_values() {
            tokens.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value.as_str() {
                "true" => tokens.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "{}: `{key}` takes true or false, got `{value}`",
                        path.display()
                    )))
                }
            }
        }
    }
    let mut out = args[..2].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}

/// Parses `args` (including the program name), applies any config file and
/// runs the subcommand. Returns the paths written.
pub fn run<I, T>(args: I) -> std::result::Result<Vec<PathBuf>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = expand_config(args)?;
    let matches = command().try_get_matches_from(args)?;
    let cli = Cli::from_arg_matches(&matches)?;
    execute(cli.command)
}

/// Runs the process arguments and returns the exit code, reporting errors
/// on stderr.
pub fn main_exit_code() -> i32 {
    match run(std::env::args_os()) {
        Ok(_) => 0,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command) -> std::result::Result<Vec<PathBuf>, CliError> {
    match cmd {
        Command::Interpolate(a) => interpolate(&a),
        Command::FitVariogram(a) => fit_variogram_cmd(&a),
        Command::Krige(a) => krige(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::LearningCurve(a) => learning_curve_cmd(&a),
        Command::MdsMap(a) => mds_map(&a),
        Command::Correlate(a) => correlate(&a),
        Command::Score(a) => score(&a),
    }
}

/// Files written by one run, removed again unless the run completes.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            committed: false,
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.partial"));
        if let Err(e) = std::fs::write(&tmp, contents).and_then(|_| std::fs::rename(&tmp, &path)) {
            let _ = std::fs::remove_file(&tmp);
            return Err(e.into());
        }
        self.written.push(path);
        Ok(())
    }

    fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

fn write_all(dir: &Path, files: &[(&str, String)]) -> std::result::Result<Vec<PathBuf>, CliError> {
    let mut out = Outputs::new(dir)?;
    for (name, contents) in files {
        out.write(name, contents)?;
    }
    Ok(out.commit())
}

fn prepare_sites(sites: Vec<Site>, dedupe: Dedupe) -> Vec<Site> {
    match dedupe {
        Dedupe::None => sites,
        Dedupe::Mean => dedupe_mean(&sites),
    }
}

fn parse_bbox(raw: &str) -> std::result::Result<(GeoPoint, GeoPoint), CliError> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--bbox expects four numbers, got `{raw}`")))?;
    if parts.len() != 4 {
        return Err(CliError::Usage(format!("--bbox expects four numbers, got `{raw}`")));
    }
    Ok((GeoPoint::new(parts[0], parts[1])?, GeoPoint::new(parts[2], parts[3])?))
}

/// Bounding box of the sites, widened by one cell along any degenerate axis.
fn site_bbox(sites: &[Site], cell: f64) -> Result<(GeoPoint, GeoPoint)> {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in sites {
        lo = (lo.0.min(s.point.lat()), lo.1.min(s.point.lon()));
        hi = (hi.0.max(s.point.lat()), hi.1.max(s.point.lon()));
    }
    if lo.0 == hi.0 {
        lo.0 = (lo.0 - cell).max(-90.0);
        hi.0 = (hi.0 + cell).min(90.0);
    }
    if lo.1 == hi.1 {
        lo.1 = (lo.1 - cell).max(-180.0);
        hi.1 = (hi.1 + cell).min(180.0);
    }
    Ok((GeoPoint::new(lo.0, lo.1)?, GeoPoint::new(hi.0, hi.1)?))
}

fn interpolate(a: &InterpolateArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let sites = prepare_sites(io::read_sites(&a.sites)?, a.dedupe);
    if sites.is_empty() {
        return Err(Error::InsufficientData(format!("{} has no sites", a.sites.display())).into());
    }
    let (min, max) = match &a.bbox {
        Some(raw) => parse_bbox(raw)?,
        None => site_bbox(&sites, a.cell)?,
    };
    let grid = build_grid(min, max, a.cell)?;
    let values: Vec<f64> = match a.method {
        GridMethod::Nn => grid.par_iter().map(|&p| nn_interpolate(&sites, p)).collect::<Result<_>>()?,
        GridMethod::Idw => {
            let params = IdwParams::new(a.power, a.neighbors)?;
            grid.par_iter()
                .map(|&p| idw_interpolate(&sites, p, params))
                .collect::<Result<_>>()?
        }
        GridMethod::Ok => {
            let ok = fit_ordinary(&sites, &a.variogram.options())?;
            grid.par_iter()
                .map(|&p| ok.predict(p).map(|k| k.value))
                .collect::<Result<_>>()?
        }
    };
    write_all(
        &a.common.out_dir,
        &[
            ("grid.csv", io::grid_csv(&grid, &values)?),
            ("grid.geojson", io::points_geojson(&grid, &values)?),
        ],
    )
}

fn fit_variogram_cmd(a: &FitVariogramArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let sites = io::read_sites(&a.sites)?;
    let emp = empirical_variogram(&sites, a.variogram.bins, a.variogram.max_lag)?;
    let (selected, candidates) = match a.variogram.family {
        Some(f) => {
            let fit = fit_variogram(&emp, f)?;
            (fit, vec![fit])
        }
        None => {
            let all = VariogramFamily::ALL
                .iter()
                .map(|&f| fit_variogram(&emp, f))
                .collect::<Result<Vec<_>>>()?;
            (fit_best_variogram(&emp)?, all)
        }
    };
    let bins = csv_string(
        &["lag_km", "gamma", "pairs"],
        emp.bins
            .iter()
            .map(|b| [b.lag_km.to_string(), b.gamma.to_string(), b.pairs.to_string()]),
    )?;
    let models = csv_string(
        &["family", "nugget", "partial_sill", "range_km", "objective", "selected"],
        candidates.iter().map(|f| {
            [
                f.model.family.name().to_string(),
                f.model.nugget.to_string(),
                f.model.partial_sill.to_string(),
                f.model.range_km.to_string(),
                f.objective.to_string(),
                (f.model == selected.model).to_string(),
            ]
        }),
    )?;
    let written = write_all(
        &a.common.out_dir,
        &[("variogram.csv", bins), ("variogram_model.csv", models)],
    )?;
    println!("selected family: {}", selected.model.family);
    Ok(written)
}

fn krige(a: &KrigeArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let sites = prepare_sites(io::read_sites(&a.sites)?, a.dedupe);
    let targets = io::read_targets(&a.targets)?;
    let opts = a.variogram.options();
    let preds = match a.method {
        KrigeMethod::Ok => {
            let ok = fit_ordinary(&sites, &opts)?;
            targets.iter().map(|t| ok.predict(t.point)).collect::<Result<Vec<_>>>()?
        }
        KrigeMethod::Rk => {
            let rk = RegressionKriging::new(&sites, &opts)?;
            targets
                .iter()
                .map(|t| {
                    let c = t.covariate.ok_or_else(|| Error::MissingCovariate(t.id.clone()))?;
                    rk.predict(t.point, c)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let out = csv_string(
        &["id", "lat", "lon", "value", "variance"],
        targets.iter().zip(&preds).map(|(t, p)| {
            [
                t.id.clone(),
                t.point.lat().to_string(),
                t.point.lon().to_string(),
                p.value.to_string(),
                p.variance.to_string(),
            ]
        }),
    )?;
    write_all(&a.common.out_dir, &[("predictions.csv", out)])
}

fn evaluation_sites(path: &Path, min: usize) -> Result<Vec<Site>> {
    let sites = io::read_sites(path)?;
    if sites.len() < min {
        return Err(Error::InsufficientData(format!(
            "evaluation needs at least {min} sites, {} has {}",
            path.display(),
            sites.len()
        )));
    }
    Ok(sites)
}

fn evaluate(a: &EvaluateArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let sites = evaluation_sites(&a.sites, 10)?;
    let grid = ParamGrid::default();
    let spec = SplitSpec::with_seed(a.common.seed);
    let reports = evaluate_methods(&sites, &a.methods, &grid, &spec)?;
    let results = csv_string(
        &["metric", "method", "rmse"],
        reports
            .iter()
            .map(|r| [a.metric.clone(), r.params.kind().to_string(), r.test_rmse.to_string()]),
    )?;
    let params = csv_string(
        &["metric", "method", "params", "val_rmse", "test_rmse"],
        reports.iter().map(|r| {
            [
                a.metric.clone(),
                r.params.kind().to_string(),
                r.params.to_string(),
                r.val_rmse.to_string(),
                r.test_rmse.to_string(),
            ]
        }),
    )?;
    let mut files = vec![("results.csv", results), ("selected_params.csv", params)];
    if a.repeats > 0 {
        let rep = evaluate_methods_repeated(&sites, &a.methods, &grid, &spec, a.repeats)?;
        files.push((
            "results_mean.csv",
            csv_string(
                &["metric", "method", "rmse", "std_rmse", "runs"],
                rep.iter().map(|r| {
                    [
                        a.metric.clone(),
                        r.kind.to_string(),
                        r.mean_rmse.to_string(),
                        r.std_rmse.to_string(),
                        r.runs.to_string(),
                    ]
                }),
            )?,
        ));
    }
    write_all(&a.common.out_dir, &files)
}

fn learning_curve_cmd(a: &LearningCurveArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let sites = evaluation_sites(&a.sites, 10)?;
    let fractions = if a.fractions.is_empty() {
        DEFAULT_FRACTIONS.to_vec()
    } else {
        a.fractions.clone()
    };
    let grid = ParamGrid::default();
    let spec = SplitSpec::with_seed(a.common.seed);
    let mut files = Vec::new();
    let mut params = Vec::new();
    for &kind in &a.methods {
        let curve = tuned_learning_curve(&sites, kind, &grid, &spec, &fractions, a.reps)?;
        params.push([kind.to_string(), curve.params.to_string()]);
        let body = csv_string(
            &["fraction", "mean_rmse", "std_rmse", "reps"],
            curve.points.iter().map(|p| {
                [
                    p.fraction.to_string(),
                    fmt_opt(p.mean_rmse),
                    fmt_opt(p.std_rmse),
                    p.reps.to_string(),
                ]
            }),
        )?;
        files.push((format!("curve_{kind}.csv"), body));
    }
    files.push(("curve_params.csv".to_string(), csv_string(&["method", "params"], params)?));
    let refs: Vec<(&str, String)> = files.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
    write_all(&a.common.out_dir, &refs)
}

fn matrix_csv(d: &DistanceMatrix) -> Result<String> {
    let mut header = vec!["site_id"];
    header.extend(d.ids().iter().map(String::as_str));
    csv_string(
        &header,
        (0..d.len()).map(|i| {
            std::iter::once(d.ids()[i].clone())
                .chain(d.row(i).iter().map(f64::to_string))
                .collect::<Vec<_>>()
        }),
    )
}

fn mds_map(a: &MdsMapArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let rgb = !a.no_rgb;
    if rgb && a.k != 3 {
        return Err(CliError::Usage(format!(
            "the RGB map needs --k 3 (got {}); pass --no-rgb for other dimensions",
            a.k
        )));
    }
    if rgb && a.sites.is_none() {
        return Err(CliError::Usage(
            "the RGB map needs --sites for coordinates; pass --no-rgb to skip it".into(),
        ));
    }
    let lists = io::read_manifest(&a.manifest)?;
    let d = linguistic_distance_matrix(&lists)?;
    let emb = classical_mds(&d, a.k)?;

    let mut header = vec!["site_id".to_string()];
    header.extend((1..=a.k).map(|c| format!("dim{c}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let embedding = csv_string(
        &header_refs,
        emb.ids.iter().zip(&emb.coords).map(|(id, row)| {
            std::iter::once(id.clone())
                .chain(row.iter().map(f64::to_string))
                .collect::<Vec<_>>()
        }),
    )?;
    let mut files = vec![("distances.csv", matrix_csv(&d)?), ("embedding.csv", embedding)];

    if let (true, Some(path)) = (rgb, &a.sites) {
        let sites = io::read_sites(path)?;
        let by_id: BTreeMap<&str, &Site> = sites.iter().map(|s| (s.id.as_str(), s)).collect();
        let missing: Vec<String> = emb.ids.iter().filter(|id| !by_id.contains_key(id.as_str())).cloned().collect();
        if !missing.is_empty() {
            return Err(Error::UnknownIds(missing).into());
        }
        let colours = mds_to_rgb(&emb)?;
        files.push((
            "rgb.csv",
            csv_string(
                &["site_id", "lat", "lon", "r", "g", "b"],
                emb.ids.iter().zip(&colours).map(|(id, c)| {
                    let s = by_id[id.as_str()];
                    [
                        id.clone(),
                        s.point.lat().to_string(),
                        s.point.lon().to_string(),
                        c[0].to_string(),
                        c[1].to_string(),
                        c[2].to_string(),
                    ]
                }),
            )?,
        ));
    }

    let mut log = String::new();
    let _ = writeln!(log, "sites={}", d.len());
    let _ = writeln!(log, "k={}", a.k);
    let _ = writeln!(log, "stress={}", emb.stress);
    let eig: Vec<String> = emb.eigenvalues.iter().map(f64::to_string).collect();
    let _ = writeln!(log, "eigenvalues={}", eig.join(","));
    files.push(("run.log", log));
    write_all(&a.common.out_dir, &files)
}

fn correlate(a: &CorrelateArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let sites = io::read_sites(&a.sites)?;
    if sites.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "correlation is undefined for {} site(s)",
            sites.len()
        ))
        .into());
    }
    let (d, label) = match a.covariate {
        CovariateSource::Dtw => {
            let manifest = a.manifest.as_ref().ok_or_else(|| {
                CliError::Usage("--covariate dtw needs --manifest".into())
            })?;
            (linguistic_distance_matrix(&io::read_manifest(manifest)?)?, "dtw_distance_to_best")
        }
        CovariateSource::Geographic => (pairwise_distances(&sites)?, "geographic_km_to_best"),
    };
    let scores: Vec<(String, f64)> = sites.iter().map(|s| (s.id.clone(), s.value)).collect();
    let cov = match &a.best {
        Some(b) => distance_to_site(&d, &scores, b)?,
        None => similarity_covariate(&d, &scores)?,
    };
    let x: Vec<f64> = scores.iter().map(|s| s.1).collect();
    let y: Vec<f64> = cov.values.iter().map(|v| v.1).collect();

    let mut rows = vec![[
        a.metric.clone(),
        label.to_string(),
        "none".to_string(),
        cov.best_id.clone(),
        x.len().to_string(),
        pearson(&x, &y)?.to_string(),
        spearman(&x, &y)?.to_string(),
    ]];
    if a.permute_control {
        let mut shuffled = x.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(a.common.seed));
        rows.push([
            a.metric.clone(),
            label.to_string(),
            "permuted".to_string(),
            cov.best_id.clone(),
            x.len().to_string(),
            pearson(&shuffled, &y)?.to_string(),
            spearman(&shuffled, &y)?.to_string(),
        ]);
    }
    let table = csv_string(
        &["metric", "covariate", "control", "best_site", "n", "pearson", "spearman"],
        rows,
    )?;
    let with_cov: Vec<Site> = sites
        .iter()
        .zip(&y)
        .map(|(s, &c)| s.clone().with_covariate(c))
        .collect();
    write_all(
        &a.common.out_dir,
        &[("correlation.csv", table), ("sites_with_covariate.csv", io::sites_csv(&with_cov)?)],
    )
}

fn score(a: &ScoreArgs) -> std::result::Result<Vec<PathBuf>, CliError> {
    let rows = io::read_segments(&a.segments)?;
    let mut order: Vec<String> = Vec::new();
    let mut by_site: BTreeMap<String, Vec<ScoredSegment>> = BTreeMap::new();
    for r in rows {
        if !by_site.contains_key(&r.site_id) {
            order.push(r.site_id.clone());
        }
        by_site.entry(r.site_id).or_default().push(r.segment);
    }
    let table = order
        .iter()
        .map(|id| {
            let segs = &by_site[id];
            Ok([id.clone(), chrf2(segs)?.to_string(), bleu(segs, 4)?.to_string()])
        })
        .collect::<Result<Vec<_>>>()?;
    write_all(
        &a.common.out_dir,
        &[("scores.csv", csv_string(&["site_id", "chrf2", "bleu"], table)?)],
    )
}
