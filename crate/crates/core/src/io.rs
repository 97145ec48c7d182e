//! CSV and GeoJSON formats.
//!
//! | file | columns |
//! |------|---------|
//! | sites | `id,lat,lon,value[,covariate]` (header required, empty covariate allowed) |
//! | targets | `id,lat,lon[,covariate]` |
//! | feature manifest | `site_id,word_index,path` (paths relative to the manifest) |
//! | feature file | `T` rows of `D` decimal values, no header |
//! | segments | `site_id,segment_id,hypothesis,ref_0[,ref_1,...]` |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::dialectometry::{FeatureSequence, SiteWordList};
use crate::error::{Error, Result};
use crate::geo::{check_unique_ids, GeoPoint, Site};
use crate::text_metrics::ScoredSegment;

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn reader(path: &Path, flexible: bool) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path)
        .map_err(|e| parse_err(path, 0, format!("cannot open: {e}")))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(flexible)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<std::fs::File>, required: &[&str], optional: &[&str]) -> Result<usize> {
    let headers = rdr.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let ok_required = names.len() >= required.len() && names[..required.len()] == *required;
    let extra = &names[required.len().min(names.len())..];
    let ok_optional = extra.len() <= optional.len() && extra.iter().zip(optional).all(|(a, b)| a == b);
    if !(ok_required && ok_optional) {
        let mut expected = required.join(",");
        if !optional.is_empty() {
            let _ = write!(expected, "[,{}]", optional.join(","));
        }
        return Err(parse_err(
            path,
            1,
            format!("expected header `{expected}`, found `{}`", names.join(",")),
        ));
    }
    Ok(names.len())
}

fn field_f64(path: &Path, line: u64, rec: &csv::StringRecord, idx: usize, name: &str) -> Result<f64> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(path, line, format!("invalid {name} `{raw}`")))
}

fn optional_f64(path: &Path, line: u64, rec: &csv::StringRecord, idx: usize, name: &str) -> Result<Option<f64>> {
    match rec.get(idx) {
        None | Some("") => Ok(None),
        Some(_) => field_f64(path, line, rec, idx, name).map(Some),
    }
}

fn point(path: &Path, line: u64, rec: &csv::StringRecord) -> Result<GeoPoint> {
    let lat = field_f64(path, line, rec, 1, "lat")?;
    let lon = field_f64(path, line, rec, 2, "lon")?;
    GeoPoint::new(lat, lon).map_err(|e| parse_err(path, line, e.to_string()))
}

/// Reads a site CSV, validating coordinates and id uniqueness.
pub fn read_sites(path: &Path) -> Result<Vec<Site>> {
    let mut rdr = reader(path, true)?;
    check_header(path, &mut rdr, &["id", "lat", "lon", "value"], &["covariate"])?;
    let mut sites = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() < 4 || rec.len() > 5 {
            return Err(parse_err(path, line, format!("expected 4 or 5 fields, found {}", rec.len())));
        }
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(parse_err(path, line, "empty id"));
        }
        let p = point(path, line, &rec)?;
        let value = field_f64(path, line, &rec, 3, "value")?;
        let mut site = Site::new(id, p, value).map_err(|e| parse_err(path, line, e.to_string()))?;
        site.covariate = optional_f64(path, line, &rec, 4, "covariate")?;
        sites.push(site);
    }
    check_unique_ids(sites.iter().map(|s| s.id.as_str()))?;
    Ok(sites)
}

/// Prediction targets: id, location and optional covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: String,
    pub point: GeoPoint,
    pub covariate: Option<f64>,
}

pub fn read_targets(path: &Path) -> Result<Vec<Target>> {
    let mut rdr = reader(path, true)?;
    check_header(path, &mut rdr, &["id", "lat", "lon"], &["covariate"])?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() < 3 || rec.len() > 4 {
            return Err(parse_err(path, line, format!("expected 3 or 4 fields, found {}", rec.len())));
        }
        out.push(Target {
            id: rec[0].to_string(),
            point: point(path, line, &rec)?,
            covariate: optional_f64(path, line, &rec, 3, "covariate")?,
        });
    }
    Ok(out)
}

/// Reads a headerless `T x D` feature matrix.
pub fn read_feature_file(path: &Path) -> Result<FeatureSequence> {
    let file = std::fs::File::open(path)
        .map_err(|e| parse_err(path, 0, format!("cannot open: {e}")))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut data = Vec::new();
    let mut dim = None;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        match dim {
            None => dim = Some(rec.len()),
            Some(d) if d != rec.len() => {
                return Err(parse_err(path, line, format!("expected {d} columns, found {}", rec.len())));
            }
            _ => {}
        }
        for (i, raw) in rec.iter().enumerate() {
            let v = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, line, format!("invalid value `{raw}` in column {}", i + 1)))?;
            data.push(v);
        }
    }
    let dim = dim.ok_or_else(|| parse_err(path, 0, "feature file is empty"))?;
    FeatureSequence::from_flat(data, dim).map_err(|e| parse_err(path, 0, e.to_string()))
}

/// Loads every site's word list from a manifest. Sites appear in manifest
/// order; words missing for a site are `None`. All feature files must share
/// one dimensionality.
pub fn read_manifest(path: &Path) -> Result<Vec<SiteWordList>> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut rdr = reader(path, false)?;
    check_header(path, &mut rdr, &["site_id", "word_index", "path"], &[])?;
    let mut order: Vec<String> = Vec::new();
    let mut entries: BTreeMap<String, BTreeMap<usize, PathBuf>> = BTreeMap::new();
    let mut max_word = 0usize;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let site = rec[0].to_string();
        let word: usize = rec[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("invalid word_index `{}`", &rec[1])))?;
        let file = base.join(&rec[2]);
        max_word = max_word.max(word);
        if !entries.contains_key(&site) {
            order.push(site.clone());
        }
        if entries.entry(site.clone()).or_default().insert(word, file).is_some() {
            return Err(parse_err(path, line, format!("duplicate entry for site `{site}` word {word}")));
        }
    }
    if order.is_empty() {
        return Err(parse_err(path, 1, "manifest lists no features"));
    }
    let mut first_dim: Option<(usize, PathBuf)> = None;
    let mut out = Vec::with_capacity(order.len());
    for site in order {
        let files = &entries[&site];
        let mut words = vec![None; max_word + 1];
        for (&w, file) in files {
            let seq = read_feature_file(file)?;
            match &first_dim {
                None => first_dim = Some((seq.dim(), file.clone())),
                Some((d, f0)) if *d != seq.dim() => {
                    return Err(Error::DimensionMismatch(format!(
                        "{} has {} feature columns but {} has {d}",
                        file.display(),
                        seq.dim(),
                        f0.display()
                    )));
                }
                _ => {}
            }
            words[w] = Some(seq);
        }
        out.push(SiteWordList::new(site, words));
    }
    Ok(out)
}

/// One scored transcription with its site and segment ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRow {
    pub site_id: String,
    pub segment_id: String,
    pub segment: ScoredSegment,
}

pub fn read_segments(path: &Path) -> Result<Vec<SegmentRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| parse_err(path, 0, format!("cannot open: {e}")))?;
    let headers = rdr.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 4 || names[..4] != ["site_id", "segment_id", "hypothesis", "ref_0"] {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header `site_id,segment_id,hypothesis,ref_0[,ref_1,...]`, found `{}`",
                names.join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() < 3 {
            return Err(parse_err(path, line, "missing hypothesis column"));
        }
        let refs: Vec<String> = rec.iter().skip(3).filter(|r| !r.is_empty()).map(str::to_owned).collect();
        if refs.is_empty() {
            return Err(parse_err(path, line, "row has no reference"));
        }
        out.push(SegmentRow {
            site_id: rec[0].to_string(),
            segment_id: rec[1].to_string(),
            segment: ScoredSegment::new(&rec[2], refs)?,
        });
    }
    Ok(out)
}

/// Renders rows as CSV text.
pub fn csv_string<R, I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sites_csv(sites: &[Site]) -> Result<String> {
    csv_string(
        &["id", "lat", "lon", "value", "covariate"],
        sites.iter().map(|s| {
            vec![
                s.id.clone(),
                s.point.lat().to_string(),
                s.point.lon().to_string(),
                s.value.to_string(),
                fmt_opt(s.covariate),
            ]
        }),
    )
}

/// `lat,lon,value` per grid cell.
pub fn grid_csv(points: &[GeoPoint], values: &[f64]) -> Result<String> {
    csv_string(
        &["lat", "lon", "value"],
        points
            .iter()
            .zip(values)
            .map(|(p, v)| [p.lat().to_string(), p.lon().to_string(), v.to_string()]),
    )
}

/// GeoJSON FeatureCollection of points with a `value` property.
pub fn points_geojson(points: &[GeoPoint], values: &[f64]) -> Result<String> {
    let features: Vec<Value> = points
        .iter()
        .zip(values)
        .map(|(p, v)| {
            json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [p.lon(), p.lat()]},
                "properties": {"value": v},
            })
        })
        .collect();
    let fc = json!({"type": "FeatureCollection", "features": features});
    Ok(serde_json::to_string(&fc)?)
}
