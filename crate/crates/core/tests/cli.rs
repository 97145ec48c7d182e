mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use geodialect::cli::{run, CliError};
use geodialect::geo::build_grid;
use geodialect::interpolation::{idw_interpolate, IdwParams};
use geodialect::io::{read_sites, sites_csv};
use geodialect::synthetic::{SyntheticConfig, SyntheticField};
use geodialect::GeoPoint;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geodialect"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    if let Some(parent) = p.parent() {
        std::fs::create_dir_all(parent).unwrap();
    }
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cli(args: &[&str]) -> Result<Vec<PathBuf>, CliError> {
    run(std::iter::once("geodialect").chain(args.iter().copied()))
}

fn synthetic_sites(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let cfg = SyntheticConfig {
        n_sites: n,
        ..Default::default()
    };
    let f = SyntheticField::generate(&cfg, seed).unwrap();
    write(dir, "sites.csv", &sites_csv(&f.sites).unwrap())
}

fn read_rows(p: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    r.records()
        .map(|x| x.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn single_site_nearest_neighbour_surface_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let sites = write(dir.path(), "one.csv", "id,lat,lon,value\nonly,45,9,7.5\n");
    let out = dir.path().join("out");
    cli(&["interpolate", "--sites", s(&sites), "--method", "nn", "--bbox", "44,8,46,10", "--cell", "0.5", "--out-dir", s(&out)]).unwrap();
    let rows = read_rows(&out.join("grid.csv"));
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[2] == "7.5"));
    let gj: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("grid.geojson")).unwrap()).unwrap();
    assert_eq!(gj["type"], "FeatureCollection");
    assert_eq!(gj["features"].as_array().unwrap().len(), 25);
}

#[test]
fn idw_grid_matches_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    let sites = write(
        dir.path(),
        "three.csv",
        "id,lat,lon,value\na,45.0,9.0,1\nb,45.5,9.7,4\nc,44.6,9.4,10\n",
    );
    let out = dir.path().join("out");
    cli(&["interpolate", "--sites", s(&sites), "--method", "idw", "--power", "2", "--bbox", "44.5,9,45.5,10", "--cell", "1", "--out-dir", s(&out)]).unwrap();
    let rows = read_rows(&out.join("grid.csv"));
    assert_eq!(rows.len(), 4);
    let train = read_sites(&sites).unwrap();
    let grid = build_grid(GeoPoint::new(44.5, 9.0).unwrap(), GeoPoint::new(45.5, 10.0).unwrap(), 1.0).unwrap();
    for (row, p) in rows.iter().zip(&grid) {
        let expected = idw_interpolate(&train, *p, IdwParams::new(2.0, None).unwrap()).unwrap();
        assert_eq!(row[0].parse::<f64>().unwrap(), p.lat());
        assert_eq!(row[1].parse::<f64>().unwrap(), p.lon());
        assert_eq!(row[2].parse::<f64>().unwrap(), expected);
    }
}

#[test]
fn malformed_latitude_exits_nonzero_with_row() {
    let dir = tempfile::tempdir().unwrap();
    let sites = write(dir.path(), "bad.csv", "id,lat,lon,value\na,45,9,1\nb,91.0,9,2\n");
    let out = bin()
        .args(["interpolate", "--sites", s(&sites), "--out-dir", s(dir.path())])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv:3"), "{err}");
    assert!(err.contains("latitude"), "{err}");
    assert!(!dir.path().join("grid.csv").exists());
}

#[test]
fn unknown_method_is_a_usage_error_listing_methods() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 30, 1);
    let out = bin()
        .args(["evaluate", "--sites", s(&sites), "--methods", "nn,kriging", "--out-dir", s(dir.path())])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nn, idw, ok, rk"), "{err}");
}

#[test]
fn evaluate_is_byte_identical_across_runs_and_reports_all_methods() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 60, 3);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        cli(&["evaluate", "--sites", s(&sites), "--methods", "nn,idw,ok,rk", "--metric", "chrf", "--repeats", "3", "--seed", "9", "--out-dir", s(out)]).unwrap();
    }
    for f in ["results.csv", "results_mean.csv", "selected_params.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let rows = read_rows(&a.join("results.csv"));
    let methods: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(methods, ["nn", "idw", "ok", "rk"]);
    assert!(rows.iter().all(|r| r[0] == "chrf"));
}

#[test]
fn evaluate_needs_ten_sites() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 8, 3);
    let err = cli(&["evaluate", "--sites", s(&sites), "--out-dir", s(dir.path())]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn learning_curve_is_deterministic_and_marks_small_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 40, 4);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        cli(&["learning-curve", "--sites", s(&sites), "--methods", "nn,rk", "--fractions", "0.05,0.5,1.0", "--reps", "5", "--out-dir", s(out)]).unwrap();
    }
    for f in ["curve_nn.csv", "curve_rk.csv", "curve_params.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    // 5% of a 32-site pool is 2 sites, below the RK minimum of 3.
    let rk = read_rows(&a.join("curve_rk.csv"));
    assert_eq!(rk[0], ["0.05", "", "", "0"]);
    assert!(!rk[2][1].is_empty());
}

#[test]
fn fit_variogram_reports_family_and_bins() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 50, 5);
    let out = bin()
        .args(["fit-variogram", "--sites", s(&sites), "--bins", "10", "--out-dir", s(dir.path())])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("selected family:"));
    let header = std::fs::read_to_string(dir.path().join("variogram.csv")).unwrap();
    assert!(header.starts_with("lag_km,gamma,pairs\n"));
    let models = read_rows(&dir.path().join("variogram_model.csv"));
    assert_eq!(models.len(), 3);
    assert_eq!(models.iter().filter(|r| r[5] == "true").count(), 1);
}

#[test]
fn krige_with_duplicates_needs_dedupe() {
    let dir = tempfile::tempdir().unwrap();
    let sites = write(
        dir.path(),
        "dup.csv",
        "id,lat,lon,value\na,45,9,1\nb,45,9,3\nc,45.5,9.5,2\nd,44.5,9.2,5\ne,45.2,8.7,4\n",
    );
    let targets = write(dir.path(), "t.csv", "id,lat,lon\nt1,45.1,9.1\n");
    let err = cli(&["krige", "--sites", s(&sites), "--targets", s(&targets), "--family", "exponential", "--bins", "3", "--max-lag", "100", "--out-dir", s(dir.path())]).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("`a`") && msg.contains("`b`"), "{msg}");
    assert!(!dir.path().join("predictions.csv").exists());

    cli(&["krige", "--sites", s(&sites), "--targets", s(&targets), "--family", "exponential", "--bins", "3", "--max-lag", "100", "--dedupe", "mean", "--out-dir", s(dir.path())]).unwrap();
    let rows = read_rows(&dir.path().join("predictions.csv"));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][4].parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn regression_kriging_targets_need_covariates() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 40, 6);
    let ok = write(dir.path(), "t.csv", "id,lat,lon,covariate\nt1,0.5,0.5,-2\n");
    cli(&["krige", "--sites", s(&sites), "--targets", s(&ok), "--method", "rk", "--out-dir", s(dir.path())]).unwrap();
    let missing = write(dir.path(), "m.csv", "id,lat,lon\nt1,0.5,0.5\n");
    let out = dir.path().join("m");
    let err = cli(&["krige", "--sites", s(&sites), "--targets", s(&missing), "--method", "rk", "--out-dir", s(&out)]).unwrap_err();
    assert!(err.to_string().contains("t1"));
}

fn feature_fixture(dir: &Path, sites: &[(&str, &[f64])]) -> PathBuf {
    let mut manifest = String::from("site_id,word_index,path\n");
    for (id, seq) in sites {
        let body: String = seq.iter().map(|v| format!("{v},0\n")).collect();
        write(dir, &format!("{id}/0.csv"), &body);
        manifest.push_str(&format!("{id},0,{id}/0.csv\n"));
    }
    write(dir, "manifest.csv", &manifest)
}

#[test]
fn mds_map_rgb_needs_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = feature_fixture(dir.path(), &[("a", &[0.0]), ("b", &[1.0]), ("c", &[3.0])]);
    let out = bin()
        .args(["mds-map", "--manifest", s(&manifest), "--k", "2", "--out-dir", s(dir.path())])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k 3"));
}

#[test]
fn mds_map_identical_sites_share_colour_and_log_stress() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = feature_fixture(
        dir.path(),
        &[("a", &[0.0, 1.0]), ("b", &[0.0, 1.0]), ("c", &[3.0, 4.0]), ("d", &[7.0, 2.0])],
    );
    let sites = write(dir.path(), "sites.csv", "id,lat,lon,value\na,45,9,1\nb,45.1,9,1\nc,45,9.3,1\nd,44.7,9.1,1\n");
    cli(&["mds-map", "--manifest", s(&manifest), "--sites", s(&sites), "--out-dir", s(dir.path())]).unwrap();
    let rgb = read_rows(&dir.path().join("rgb.csv"));
    assert_eq!(rgb[0][3..], rgb[1][3..]);
    assert_eq!(rgb[0][1..3], ["45", "9"]);
    let log = std::fs::read_to_string(dir.path().join("run.log")).unwrap();
    assert!(log.lines().any(|l| l.starts_with("stress=")));
}

#[test]
fn mds_map_planar_three_sites_have_zero_stress() {
    let dir = tempfile::tempdir().unwrap();
    // Single-frame scalar sequences: DTW distance is |x - y|, collinear and
    // embeddable in the plane.
    let manifest = feature_fixture(dir.path(), &[("a", &[0.0]), ("b", &[1.5]), ("c", &[4.0])]);
    cli(&["mds-map", "--manifest", s(&manifest), "--k", "2", "--no-rgb", "--out-dir", s(dir.path())]).unwrap();
    let log = std::fs::read_to_string(dir.path().join("run.log")).unwrap();
    let stress: f64 = log
        .lines()
        .find_map(|l| l.strip_prefix("stress="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(stress <= 1e-9, "{stress}");
    assert!(!dir.path().join("rgb.csv").exists());
}

#[test]
fn mds_map_inconsistent_dimension_names_files() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = feature_fixture(dir.path(), &[("a", &[0.0]), ("b", &[1.0])]);
    write(dir.path(), "b/0.csv", "1\n2\n");
    let err = cli(&["mds-map", "--manifest", s(&manifest), "--no-rgb", "--out-dir", s(dir.path())]).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("a/0.csv") && msg.contains("b/0.csv"), "{msg}");
}

#[test]
fn correlate_exact_linear_decrease_gives_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = feature_fixture(dir.path(), &[("a", &[0.0]), ("b", &[1.0]), ("c", &[2.5]), ("d", &[4.0])]);
    // Distance to best (a) is 0, 1, 2.5, 4; scores fall linearly with it.
    let sites = write(dir.path(), "sites.csv", "id,lat,lon,value\na,45,9,10\nb,45,9.1,8\nc,45,9.2,5\nd,45,9.3,2\n");
    cli(&["correlate", "--sites", s(&sites), "--manifest", s(&manifest), "--metric", "chrf", "--permute-control", "--out-dir", s(dir.path())]).unwrap();
    let rows = read_rows(&dir.path().join("correlation.csv"));
    assert_eq!(rows[0][0], "chrf");
    assert_eq!(rows[0][1], "dtw_distance_to_best");
    assert_eq!(rows[0][3], "a");
    assert!((rows[0][5].parse::<f64>().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(rows[1][2], "permuted");
    let cov = read_sites(&dir.path().join("sites_with_covariate.csv")).unwrap();
    assert_eq!(cov[3].covariate, Some(4.0));
}

#[test]
fn correlate_rejects_single_site_and_unknown_ids() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = feature_fixture(dir.path(), &[("a", &[0.0]), ("b", &[1.0]), ("c", &[2.0])]);
    let one = write(dir.path(), "one.csv", "id,lat,lon,value\na,45,9,1\n");
    assert!(cli(&["correlate", "--sites", s(&one), "--manifest", s(&manifest), "--out-dir", s(dir.path())]).is_err());
    let extra = write(dir.path(), "extra.csv", "id,lat,lon,value\na,45,9,1\nb,45,9.1,2\nzz,45,9.2,3\nyy,45,9.3,1\n");
    let msg = cli(&["correlate", "--sites", s(&extra), "--manifest", s(&manifest), "--out-dir", s(dir.path())])
        .unwrap_err()
        .to_string();
    assert!(msg.contains("zz") && msg.contains("yy"), "{msg}");
    assert!(!dir.path().join("correlation.csv").exists());
}

#[test]
fn score_identity_disjoint_and_hand_case() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(
        dir.path(),
        "seg.csv",
        "site_id,segment_id,hypothesis,ref_0,ref_1\n\
         same,1,il cane dorme sempre qui,il cane dorme sempre qui,\n\
         same,2,la casa bianca,la casa bianca,\n\
         apart,1,abcdefg hij,klmnopq rst,\n\
         hand,1,a b c d e,a b c d f,\n",
    );
    cli(&["score", "--segments", s(&seg), "--out-dir", s(dir.path())]).unwrap();
    let rows = read_rows(&dir.path().join("scores.csv"));
    let get = |id: &str, c: usize| -> f64 { rows.iter().find(|r| r[0] == id).unwrap()[c].parse().unwrap() };
    assert!((get("same", 1) - 100.0).abs() < 1e-9);
    assert!((get("same", 2) - 100.0).abs() < 1e-9);
    assert_eq!(get("apart", 1), 0.0);
    assert_eq!(get("apart", 2), 0.0);
    assert!((get("hand", 2) - 66.874).abs() < 1e-3);
}

#[test]
fn score_row_without_reference_fails() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "seg.csv", "site_id,segment_id,hypothesis,ref_0\ns,1,ciao,\n");
    let out = bin().args(["score", "--segments", s(&seg), "--out-dir", s(dir.path())]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seg.csv:2"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let sites = synthetic_sites(dir.path(), 30, 8);
    let cfg_out = dir.path().join("from-config");
    let cfg = write(
        dir.path(),
        "run.cfg",
        &format!("# evaluation defaults\nmethods = nn\nseed = 3\nout-dir = {}\n", s(&cfg_out)),
    );
    cli(&["evaluate", "--sites", s(&sites), "--config", s(&cfg)]).unwrap();
    let rows = read_rows(&cfg_out.join("results.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "nn");

    let flag_out = dir.path().join("from-flags");
    cli(&["evaluate", "--sites", s(&sites), "--config", s(&cfg), "--methods", "idw,nn", "--out-dir", s(&flag_out)]).unwrap();
    let rows = read_rows(&flag_out.join("results.csv"));
    let methods: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(methods, ["idw", "nn"]);

    // The seed from the config equals an explicit --seed 3.
    let explicit = dir.path().join("explicit");
    cli(&["evaluate", "--sites", s(&sites), "--methods", "nn", "--seed", "3", "--out-dir", s(&explicit)]).unwrap();
    assert_eq!(
        std::fs::read(cfg_out.join("results.csv")).unwrap(),
        std::fs::read(explicit.join("results.csv")).unwrap()
    );
}

#[test]
fn failed_write_leaves_no_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sites = write(dir.path(), "s.csv", "id,lat,lon,value\na,45,9,1\nb,45.5,9.5,2\n");
    let out = dir.path().join("out");
    std::fs::create_dir_all(&out).unwrap();
    // A directory squatting on the second output name makes its rename fail
    // after grid.csv has been written.
    std::fs::create_dir_all(out.join("grid.geojson")).unwrap();
    let status = bin()
        .args(["interpolate", "--sites", s(&sites), "--method", "nn", "--cell", "0.5", "--out-dir", s(&out)])
        .status()
        .unwrap();
    assert!(!status.success());
    assert!(!out.join("grid.csv").exists());
}
