//! File formats: potential tables (CSV), coefficient files and spectra (JSON),
//! bundle manifests and reconstruction reports.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inverse::{BEstimate, CaseTag, RecoveredData, SpectraBundle};
use crate::perturbation::PerturbedSpectrum;
use crate::potential::Potential;
use crate::spectrum_l0::{Basis, Mode, SpectrumL0};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&s)?)
}

/// Reads `x,v_re,v_im` rows; lines that do not parse as numbers (a header)
/// are skipped.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<C64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let nums: Vec<f64> = match rec.iter().map(str::parse::<f64>).collect::<std::result::Result<_, _>>() {
            Ok(n) => n,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::InvalidInput(format!("row {}: {e}", line + 1))),
        };
        if nums.len() != 3 {
            return Err(Error::InvalidInput(format!("row {} has {} columns, expected 3", line + 1, nums.len())));
        }
        xs.push(nums[0]);
        vs.push(C64::new(nums[1], nums[2]));
    }
    Ok((xs, vs))
}

pub fn read_potential_csv(path: &Path, basis: &Basis) -> Result<Potential> {
    let (xs, vs) = read_table(path)?;
    Potential::from_table(xs, vs, basis)
}

/// Samples v on `points` uniform nodes of [0, 1].
pub fn write_potential_csv(path: &Path, v: &Potential, points: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(["x", "v_re", "v_im"]).map_err(|e| Error::Io(e.to_string()))?;
    for j in 0..points {
        let x = j as f64 / (points - 1) as f64;
        let y = v.eval(x)?;
        w.write_record([x.to_string(), y.re.to_string(), y.im.to_string()]).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub n: i64,
    pub branch: u8,
    pub re: f64,
    pub im: f64,
}

/// `{"cutoff": N, "coefficients": [{"n", "branch", "re", "im"}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub cutoff: usize,
    pub coefficients: Vec<CoefficientRow>,
}

impl CoefficientFile {
    pub fn new(coeffs: &[(Mode, C64)], cutoff: usize) -> Self {
        let coefficients = coeffs.iter().map(|(m, c)| CoefficientRow { n: m.n, branch: m.branch, re: c.re, im: c.im }).collect();
        CoefficientFile { cutoff, coefficients }
    }

    pub fn modes(&self) -> Vec<(Mode, C64)> {
        self.coefficients.iter().map(|r| (Mode::new(r.n, r.branch), C64::new(r.re, r.im))).collect()
    }
}

/// Coefficients beyond the basis are rejected rather than dropped.
pub fn read_coefficients_json(path: &Path, basis: &Basis) -> Result<Potential> {
    let f: CoefficientFile = read_json(path)?;
    Potential::from_coefficients(&f.modes(), basis)
}

/// Dispatches on the extension: `.csv` table or `.json` coefficients.
pub fn load_potential(path: &Path, basis: &Basis) -> Result<Potential> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_potential_csv(path, basis),
        Some("json") => read_coefficients_json(path, basis),
        _ => Err(Error::InvalidInput(format!("{}: expected a .csv or .json potential", path.display()))),
    }
}

/// `{"s0": path, "sv": path, "svg": path, "svig": path}`; relative paths are
/// resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub s0: String,
    pub sv: String,
    pub svg: String,
    pub svig: String,
}

pub fn load_bundle(manifest: &Path) -> Result<SpectraBundle> {
    let m: BundleManifest = read_json(manifest)?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let p = |s: &str| -> PathBuf { dir.join(s) };
    let s0: SpectrumL0 = read_json(&p(&m.s0))?;
    let sv: PerturbedSpectrum = read_json(&p(&m.sv))?;
    let svg: PerturbedSpectrum = read_json(&p(&m.svg))?;
    let svig: PerturbedSpectrum = read_json(&p(&m.svig))?;
    let n = s0.n_max();
    SpectraBundle::new(s0, sv, svg, svig).map_err(|e| match e {
        Error::CaseMismatch(s) => Error::CaseMismatch(format!("{s} (bundle with n_max {n})")),
        other => other,
    })
}

/// Writes the four spectra and a manifest into `dir`; returns the manifest path.
pub fn write_bundle(dir: &Path, b: &SpectraBundle) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("s0.json"), &b.s0)?;
    write_json(&dir.join("sv.json"), &b.s_v)?;
    write_json(&dir.join("svg.json"), &b.s_vg)?;
    write_json(&dir.join("svig.json"), &b.s_vig)?;
    let manifest = BundleManifest { s0: "s0.json".into(), sv: "sv.json".into(), svg: "svg.json".into(), svig: "svig.json".into() };
    let path = dir.join("bundle.json");
    write_json(&path, &manifest)?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub n: i64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossRow {
    pub n: i64,
    pub re: f64,
    pub im: f64,
}

/// JSON form of `RecoveredData`.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveredReport {
    pub case: CaseTag,
    pub alpha_hat: f64,
    pub b: f64,
    pub b_spread: f64,
    pub weight_sum: f64,
    pub weights: Vec<WeightRow>,
    pub cross: Vec<CrossRow>,
    pub zero_gauge_note: bool,
    pub coefficients: CoefficientFile,
}

impl RecoveredReport {
    pub fn new(r: &RecoveredData) -> Self {
        let BEstimate { case, value, spread } = r.b;
        RecoveredReport {
            case,
            alpha_hat: r.alpha_hat,
            b: value,
            b_spread: spread,
            weight_sum: r.weights.values().sum(),
            weights: r.weights.iter().map(|(n, w)| WeightRow { n: *n, weight: *w }).collect(),
            cross: r.cross.iter().map(|(n, c)| CrossRow { n: *n, re: c.re, im: c.im }).collect(),
            zero_gauge_note: r.zero_gauge_note,
            coefficients: CoefficientFile::new(&r.coefficients, r.v_hat.cutoff()),
        }
    }
}

/// Machine-readable failure written to stderr by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        ErrorReport { error: e.code(), message: e.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let basis = Basis::new(4).unwrap();
        let v = Potential::from_fn(|x| C64::new(x, 1.0 - x), &basis);
        let path = dir.path().join("v.csv");
        write_potential_csv(&path, &v, 11).unwrap();
        let w = read_potential_csv(&path, &basis).unwrap();
        assert!((w.eval(0.35).unwrap() - C64::new(0.35, 0.65)).norm() < 1e-14);
        fs::write(&path, "x,v_re,v_im\n0,1,0\n0.5,1,0\n0.4,1,0\n1,1,0\n").unwrap();
        assert!(matches!(read_potential_csv(&path, &basis), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn coefficient_file() {
        let dir = tempfile::tempdir().unwrap();
        let basis = Basis::new(3).unwrap();
        let path = dir.path().join("v.json");
        let f = CoefficientFile::new(&[(Mode::new(2, 1), C64::new(0.6, 0.8))], 3);
        write_json(&path, &f).unwrap();
        let v = load_potential(&path, &basis).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let bad = CoefficientFile::new(&[(Mode::new(9, 1), C64::new(1.0, 0.0))], 9);
        write_json(&path, &bad).unwrap();
        assert!(load_potential(&path, &basis).is_err());
    }
}
