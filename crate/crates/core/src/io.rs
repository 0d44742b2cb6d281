//! Profile CSV files (`r,u,du,ddu,lambda1,lambda2,gamma,tilt,residual`) and their
//! JSON metadata sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::picard::GridFunction;
use crate::profiles::{ProfileSample, ProfileSolution, ProfileStatus, Tolerances};
use crate::rotgeom::{graph_curvatures, soliton_residual, tilt};
use crate::speeds::{eval_speed, SpeedKind, SpeedSpec};

pub const PROFILE_HEADER: &str = "r,u,du,ddu,lambda1,lambda2,gamma,tilt,residual";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub n: usize,
    pub speed: String,
    pub k: Option<usize>,
    pub startup_slope: f64,
    pub startup_radius: f64,
    pub blowup_radius: Option<f64>,
    #[serde(default)]
    pub blowup_error: Option<f64>,
    pub status: ProfileStatus,
    pub tolerances: Tolerances,
    #[serde(default)]
    pub diagnostics: Option<String>,
}

impl ProfileMetadata {
    pub fn of(profile: &ProfileSolution) -> Self {
        let (speed, k) = match profile.speed.kind() {
            SpeedKind::SigmaKRoot { k } => ("sigma-k".to_string(), Some(*k)),
            SpeedKind::HarmonicPairs => ("harmonic".to_string(), None),
            _ => (profile.speed.label(), None),
        };
        ProfileMetadata {
            n: profile.n,
            speed,
            k,
            startup_slope: profile.startup_slope,
            startup_radius: profile.startup_radius,
            blowup_radius: profile.blowup_radius,
            blowup_error: profile.blowup_error,
            status: profile.status,
            tolerances: profile.tolerances,
            diagnostics: profile.diagnostics.clone(),
        }
    }

    pub fn speed_spec(&self) -> Result<SpeedSpec> {
        match self.speed.as_str() {
            "sigma-k" => {
                let k = self.k.ok_or_else(|| Error::Parameter("metadata for sigma-k lacks k".into()))?;
                SpeedSpec::sigma_k_root(k, self.n)
            }
            "harmonic" => SpeedSpec::harmonic_pairs(self.n),
            other => Err(Error::Parameter(format!("unsupported speed '{other}' in metadata"))),
        }
    }
}

/// Derived CSV columns of one sample; `NaN` where the curvature leaves the cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedColumns {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
    pub tilt: f64,
    pub residual: f64,
}

pub fn derived_columns(spec: &SpeedSpec, n: usize, sample: &ProfileSample) -> Result<DerivedColumns> {
    let lambda = graph_curvatures(&sample.jet(), n)?;
    let t = tilt(sample.du);
    let gamma = eval_speed(spec, &lambda).unwrap_or(f64::NAN);
    let residual = soliton_residual(spec, &lambda, t).unwrap_or(f64::NAN);
    Ok(DerivedColumns { lambda1: lambda.as_slice()[0], lambda2: lambda.as_slice()[1], gamma, tilt: t, residual })
}

/// CSV with a header row and every value in `{:.16e}`, which round-trips `f64` exactly.
pub fn write_rows(header: &[&str], rows: impl Iterator<Item = Result<Vec<f64>>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row?.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn profile_csv(profile: &ProfileSolution) -> Result<String> {
    let rows = profile.samples.iter().map(|s| {
        let d = derived_columns(&profile.speed, profile.n, s)?;
        Ok(vec![s.r, s.u, s.du, s.ddu, d.lambda1, d.lambda2, d.gamma, d.tilt, d.residual])
    });
    write_rows(&PROFILE_HEADER.split(',').collect::<Vec<_>>(), rows)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Path of the metadata sidecar: the CSV path with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the CSV and its sidecar; returns the sidecar path.
pub fn write_profile(profile: &ProfileSolution, csv: &Path) -> Result<PathBuf> {
    fs::write(csv, profile_csv(profile)?)?;
    let meta = sidecar_path(csv);
    fs::write(&meta, to_json(&ProfileMetadata::of(profile))?)?;
    Ok(meta)
}

/// Parses the `r,u,du,ddu` part of a profile CSV. Derived columns are ignored.
pub fn parse_profile_csv(text: &str) -> Result<Vec<ProfileSample>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let line_of = |e: &csv::Error| e.position().map_or(1, |p| p.line() as usize);
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse { line: line_of(&e), message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if columns.len() == 1 && columns[0].is_empty() || columns.is_empty() {
        return Err(Error::Parse { line: 1, message: "file is empty".into() });
    }
    if columns.len() < 4 || columns[..4] != ["r", "u", "du", "ddu"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header '{PROFILE_HEADER}', got '{}'", columns.join(",")),
        });
    }
    let mut samples: Vec<ProfileSample> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse { line: line_of(&e), message: e.to_string() })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != columns.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", columns.len(), record.len()),
            });
        }
        let mut v = [0.0; 4];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = record[j].parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("column '{}': cannot parse '{}': {e}", columns[j], &record[j]),
            })?;
            if !slot.is_finite() {
                return Err(Error::Parse { line, message: format!("column '{}' is not finite", columns[j]) });
            }
        }
        if let Some(prev) = samples.last() {
            if v[0] <= prev.r {
                return Err(Error::Parse { line, message: format!("radius {} does not increase", v[0]) });
            }
        }
        samples.push(ProfileSample { r: v[0], u: v[1], du: v[2], ddu: v[3] });
    }
    if samples.is_empty() {
        return Err(Error::Parse { line: 1, message: "no samples after the header".into() });
    }
    Ok(samples)
}

pub fn read_metadata(path: &Path) -> Result<ProfileMetadata> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse { line: e.line(), message: format!("{}: {e}", path.display()) })
}

pub fn profile_from_parts(samples: Vec<ProfileSample>, meta: &ProfileMetadata) -> Result<ProfileSolution> {
    ProfileSolution::validate_samples(&samples)?;
    let speed = meta.speed_spec()?;
    Ok(ProfileSolution {
        n: meta.n,
        speed,
        samples,
        startup_slope: meta.startup_slope,
        startup_radius: meta.startup_radius,
        blowup_radius: meta.blowup_radius,
        blowup_error: meta.blowup_error,
        status: meta.status,
        tolerances: meta.tolerances,
        diagnostics: meta.diagnostics.clone(),
    })
}

/// Reads a profile CSV and its sidecar.
pub fn read_profile(csv: &Path) -> Result<ProfileSolution> {
    let text = fs::read_to_string(csv).map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
    let samples = parse_profile_csv(&text)?;
    let meta = read_metadata(&sidecar_path(csv))?;
    profile_from_parts(samples, &meta)
}

/// Two-column `r,w` CSV of a grid function.
pub fn grid_csv(grid: &GridFunction) -> Result<String> {
    write_rows(&["r", "w"], grid.values().iter().enumerate().map(|(i, v)| Ok(vec![grid.node(i), *v])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{integrate_profile, ProfileOptions};

    fn profile() -> ProfileSolution {
        let spec = SpeedSpec::harmonic_pairs(3).unwrap();
        integrate_profile(&spec, &ProfileOptions { r_max: 0.4, ..Default::default() }).unwrap()
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let p = profile();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hm3.csv");
        let meta = write_profile(&p, &path).unwrap();
        assert_eq!(meta, dir.path().join("hm3.json"));
        let back = read_profile(&path).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn csv_layout() {
        let text = profile_csv(&profile()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(PROFILE_HEADER));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 9);
        assert!(first.starts_with("1.0000000000000000e-4,"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let ok = format!("{PROFILE_HEADER}\n0.1,0,1,1,0,0,0,0,0\n");
        assert_eq!(parse_profile_csv(&ok).unwrap().len(), 1);
        let bad_field = format!("{PROFILE_HEADER}\n0.1,0,1,1,0,0,0,0,0\n0.2,x,1,1,0,0,0,0,0\n");
        assert!(matches!(parse_profile_csv(&bad_field), Err(Error::Parse { line: 3, .. })));
        let short = format!("{PROFILE_HEADER}\n0.1,0,1\n");
        assert!(matches!(parse_profile_csv(&short), Err(Error::Parse { line: 2, .. })));
        let order = format!("{PROFILE_HEADER}\n0.2,0,1,1,0,0,0,0,0\n0.1,0,1,1,0,0,0,0,0\n");
        assert!(matches!(parse_profile_csv(&order), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_profile_csv(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_profile_csv(PROFILE_HEADER), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_profile_csv("a,b\n1,2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn metadata_fields() {
        let meta = ProfileMetadata::of(&profile());
        let json: serde_json::Value = serde_json::from_str(&to_json(&meta).unwrap()).unwrap();
        for key in ["n", "speed", "k", "startup_slope", "startup_radius", "blowup_radius", "status", "tolerances"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["speed"], "harmonic");
        assert_eq!(json["status"], "completed");
    }
}
