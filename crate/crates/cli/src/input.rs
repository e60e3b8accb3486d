//! Readers for the CSV, JSON and grid files the commands consume.

use std::collections::HashMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use setscore::{Distribution, ExtReal, Grid, GridRandomSet, GridSet, Interval, IntervalFamily};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Rows of a headed CSV file, with 1-based line numbers, restricted to the
/// named columns in order.
fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let name = path.display();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {name}"))?;
    let headers = rdr
        .headers()
        .with_context(|| format!("{name}:1: unreadable header"))?
        .clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| anyhow!("{name}:1: missing column {c:?}"))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow!("{name}:{line}: {e}")
        })?;
        let line = rec.position().map_or(0, |p| p.line()) as usize;
        rows.push((
            line,
            idx.iter()
                .map(|i| rec.get(*i).unwrap_or("").to_string())
                .collect(),
        ));
    }
    Ok(rows)
}

fn parse_num(path: &Path, line: usize, what: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            anyhow!(
                "{}:{line}: {what} {s:?} is not a finite number",
                path.display()
            )
        })
}

fn parse_ext(path: &Path, line: usize, what: &str, s: &str) -> Result<ExtReal> {
    s.parse::<ExtReal>().map_err(|_| {
        anyhow!(
            "{}:{line}: {what} {s:?} is not a number or +-inf",
            path.display()
        )
    })
}

/// `case_id,y` rows.
pub fn observations(path: &Path) -> Result<Vec<(String, f64)>> {
    let rows = read_columns(path, &["case_id", "y"])?;
    let mut seen = HashMap::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        if seen.insert(r[0].clone(), line).is_some() {
            bail!("{}:{line}: duplicate case_id {:?}", path.display(), r[0]);
        }
        out.push((r[0].clone(), parse_num(path, line, "observation", &r[1])?));
    }
    if out.is_empty() {
        bail!("{}: no observations", path.display());
    }
    Ok(out)
}

/// `case_id,lo,hi` rows.
pub fn intervals(path: &Path) -> Result<Vec<(String, Interval)>> {
    read_columns(path, &["case_id", "lo", "hi"])?
        .into_iter()
        .map(|(line, r)| {
            let lo = parse_ext(path, line, "lo", &r[1])?;
            let hi = parse_ext(path, line, "hi", &r[2])?;
            let iv =
                Interval::new(lo, hi).map_err(|e| anyhow!("{}:{line}: {e}", path.display()))?;
            Ok((r[0].clone(), iv))
        })
        .collect()
}

fn family_file(path: &Path) -> Result<IntervalFamily> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(IntervalFamily::read_csv(
        BufReader::new(file),
        &path.display().to_string(),
    )?)
}

fn resolve(manifest: &Path, rel: &str) -> PathBuf {
    manifest.parent().unwrap_or(Path::new(".")).join(rel)
}

/// `case_id,family` rows, with the family files loaded.
pub fn family_manifest(path: &Path) -> Result<Vec<(String, IntervalFamily)>> {
    read_columns(path, &["case_id", "family"])?
        .into_iter()
        .map(|(_, r)| Ok((r[0].clone(), family_file(&resolve(path, &r[1]))?)))
        .collect()
}

/// `forecaster,case_id,family` rows, grouped by forecaster in order of first
/// appearance.
pub fn forecaster_manifest(path: &Path) -> Result<Vec<(String, Vec<(String, IntervalFamily)>)>> {
    let mut out: Vec<(String, Vec<(String, IntervalFamily)>)> = Vec::new();
    for (_, r) in read_columns(path, &["forecaster", "case_id", "family"])? {
        let fam = family_file(&resolve(path, &r[2]))?;
        match out.iter_mut().find(|(name, _)| *name == r[0]) {
            Some((_, cases)) => cases.push((r[1].clone(), fam)),
            None => out.push((r[0].clone(), vec![(r[1].clone(), fam)])),
        }
    }
    Ok(out)
}

/// Reorders `forecasts` to follow the observation ids exactly.
pub fn align<T: Clone>(
    forecasts: &[(String, T)],
    obs: &[(String, f64)],
    what: &str,
) -> Result<Vec<T>> {
    let by_id: HashMap<&str, &T> = forecasts.iter().map(|(id, t)| (id.as_str(), t)).collect();
    if by_id.len() != forecasts.len() {
        bail!("{what}: duplicate case ids");
    }
    if forecasts.len() != obs.len() {
        bail!(
            "{what}: {} cases but {} observations",
            forecasts.len(),
            obs.len()
        );
    }
    obs.iter()
        .map(|(id, _)| {
            by_id
                .get(id.as_str())
                .map(|t| (*t).clone())
                .ok_or_else(|| anyhow!("{what}: no forecast for case {id:?}"))
        })
        .collect()
}

pub fn distribution(path: &Path) -> Result<Distribution> {
    Distribution::from_json(&read_text(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn randset(path: &Path) -> Result<GridRandomSet> {
    GridRandomSet::from_json(&read_text(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn grid_set(path: &Path) -> Result<GridSet> {
    Ok(GridSet::parse(
        &read_text(path)?,
        &path.display().to_string(),
    )?)
}

pub fn weights(path: &Path) -> Result<Grid> {
    Ok(Grid::parse_weights(
        &read_text(path)?,
        &path.display().to_string(),
    )?)
}
