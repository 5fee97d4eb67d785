//! Regression fixtures: `golden/<case>/config.json` holds a job, its
//! precision, an optional numeric tolerance and the sha256 digest of
//! `golden/<case>/expected.<ext>`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jobs::{self, Artifact, Format, Job};
use crate::numerics::DEFAULT_PRECISION;
use crate::par::par_map;

pub const CONFIG_FILE: &str = "config.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Config {
    job: Job,
    #[serde(default = "default_precision")]
    precision: u32,
    /// Absolute-or-relative tolerance for numeric fields; exact when absent.
    #[serde(default)]
    tolerance: Option<f64>,
    digest: String,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenCase {
    pub name: String,
    pub dir: PathBuf,
    pub job: Job,
    pub precision: u32,
    pub tolerance: Option<f64>,
    pub digest: String,
}

impl GoldenCase {
    pub fn load(dir: &Path) -> Result<GoldenCase> {
        let path = dir.join(CONFIG_FILE);
        let text = fs::read_to_string(&path).map_err(|_| Error::MissingFixture(path.display().to_string()))?;
        let c: Config = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(GoldenCase {
            name,
            dir: dir.to_path_buf(),
            job: c.job,
            precision: c.precision,
            tolerance: c.tolerance,
            digest: c.digest,
        })
    }

    /// The single `expected.*` file of the case.
    pub fn expected_path(&self) -> Result<PathBuf> {
        let missing = || Error::MissingFixture(self.dir.join("expected.*").display().to_string());
        let entries = fs::read_dir(&self.dir).map_err(|_| missing())?;
        entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .find(|p| p.file_stem().is_some_and(|s| s == "expected"))
            .ok_or_else(missing)
    }
}

/// Case directories below `root`, sorted by name.
pub fn list_cases(root: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(root).map_err(|_| Error::MissingFixture(root.display().to_string()))?;
    let mut dirs: Vec<PathBuf> =
        entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.join(CONFIG_FILE).is_file()).collect();
    dirs.sort();
    Ok(dirs)
}

pub fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Run a job; a failure renders as the line the command line prints.
pub fn render(job: &Job, prec: u32) -> Artifact {
    jobs::run(job, prec)
        .unwrap_or_else(|e| Artifact { format: Format::Text, body: format!("error[{}]: {e}\n", e.code()) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDiff {
    pub line: usize,
    pub field: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for FieldDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} {}: expected {:?}, got {:?}", self.line, self.field, self.expected, self.actual)
    }
}

#[derive(Clone, Debug)]
pub struct GoldenOutcome {
    pub name: String,
    pub pass: bool,
    pub digest: String,
    pub diffs: Vec<FieldDiff>,
}

fn is_separator(c: char) -> bool {
    c.is_whitespace() || matches!(c, ',' | ':' | '[' | ']' | '{' | '}' | '"')
}

fn tokens(line: &str) -> Vec<&str> {
    line.split(is_separator).filter(|t| !t.is_empty()).collect()
}

/// Label of token k on a line: the text key for `key: value` lines, the
/// CSV column for rows below a header, the position otherwise.
fn label(line: &str, header: Option<&str>, k: usize) -> String {
    if let Some((key, _)) = line.split_once(": ") {
        if !key.contains(',') && !key.trim().is_empty() {
            return format!("{} [{k}]", key.trim().trim_matches('"'));
        }
    }
    if let Some(col) = header.and_then(|h| h.split(',').nth(k)) {
        return format!("column {col}");
    }
    format!("field {k}")
}

fn close(a: &str, b: &str, tol: Option<f64>) -> bool {
    if a == b {
        return true;
    }
    match (tol, a.parse::<f64>(), b.parse::<f64>()) {
        (Some(tol), Ok(x), Ok(y)) => (x - y).abs() <= tol * y.abs().max(1.0),
        _ => false,
    }
}

/// Field-wise comparison of two artifacts.
pub fn diff_fields(expected: &str, actual: &str, tol: Option<f64>) -> Vec<FieldDiff> {
    let (e, a): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    let header = e.first().filter(|h| h.contains(',') && !h.contains(": ")).copied();
    let mut diffs = Vec::new();
    for i in 0..e.len().max(a.len()) {
        let (el, al) = (e.get(i).copied().unwrap_or(""), a.get(i).copied().unwrap_or(""));
        let (et, at) = (tokens(el), tokens(al));
        let hdr = if i == 0 { None } else { header };
        for k in 0..et.len().max(at.len()) {
            let (x, y) = (et.get(k).copied().unwrap_or(""), at.get(k).copied().unwrap_or(""));
            if !close(y, x, tol) {
                diffs.push(FieldDiff { line: i + 1, field: label(el, hdr, k), expected: x.into(), actual: y.into() });
            }
        }
    }
    diffs
}

/// Exact cases pass on a digest match; toleranced cases need an intact
/// fixture and every numeric field within tolerance.
pub fn verify_golden(case: &GoldenCase) -> Result<GoldenOutcome> {
    let path = case.expected_path()?;
    let expected = fs::read_to_string(&path).map_err(|_| Error::MissingFixture(path.display().to_string()))?;
    let actual = render(&case.job, case.precision);
    let got = digest(&actual.body);
    let intact = digest(&expected) == case.digest;
    let mut diffs = diff_fields(&expected, &actual.body, case.tolerance);
    if !intact {
        diffs.insert(
            0,
            FieldDiff {
                line: 0,
                field: "fixture digest".into(),
                expected: case.digest.clone(),
                actual: digest(&expected),
            },
        );
    }
    let pass = match case.tolerance {
        None => got == case.digest && intact,
        Some(_) => intact && diffs.is_empty(),
    };
    if pass {
        diffs.clear();
    }
    Ok(GoldenOutcome { name: case.name.clone(), pass, digest: got, diffs })
}

/// Verify every case below `root` in parallel.
pub fn verify_all(root: &Path) -> Result<Vec<GoldenOutcome>> {
    let dirs = list_cases(root)?;
    par_map(&dirs, |d| GoldenCase::load(d).and_then(|c| verify_golden(&c))).into_iter().collect()
}

/// Write (or rewrite) a case from the current output of its job.
pub fn bless(dir: &Path, job: &Job, precision: u32, tolerance: Option<f64>) -> Result<()> {
    let io = |e: std::io::Error| Error::Parse(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for e in fs::read_dir(dir).map_err(io)?.flatten() {
        if e.path().file_stem().is_some_and(|s| s == "expected") {
            fs::remove_file(e.path()).map_err(io)?;
        }
    }
    let a = render(job, precision);
    fs::write(dir.join(format!("expected.{}", a.format.extension())), &a.body).map_err(io)?;
    let c = Config { job: job.clone(), precision, tolerance, digest: digest(&a.body) };
    let value = serde_json::to_value(&c).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(dir.join(CONFIG_FILE), jobs::canonical_json(&value)).map_err(io)?;
    Ok(())
}
