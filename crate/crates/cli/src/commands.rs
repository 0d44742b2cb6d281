use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use translator_core::io::{self, ProfileMetadata};
use translator_core::picard::{self, picard_solve};
use translator_core::profiles::{integrate_profile, ProfileEquation, ProfileOptions};
use translator_core::speeds::check_properties;
use translator_core::verifier::{self, fit_convexity_constants};
use translator_core::{Barrier, BarrierName, BarrierRole, ProfileSolution, SpeedKind, SpeedSpec, VerificationReport};

use crate::args::*;
use crate::svg::{split_in_range, Chart, Series};

/// What a successful command concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

pub struct Ctx {
    pub out_dir: PathBuf,
}

impl Ctx {
    fn output(&self, path: &Path) -> Result<PathBuf> {
        let full = self.out_dir.join(path);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        Ok(full)
    }

    fn write(&self, path: &Path, text: &str) -> Result<PathBuf> {
        let full = self.output(path)?;
        fs::write(&full, text).with_context(|| format!("writing {}", full.display()))?;
        Ok(full)
    }

    /// Writes to `path` when given, otherwise prints to stdout.
    fn emit(&self, path: Option<&Path>, text: &str) -> Result<()> {
        match path {
            Some(p) => {
                let full = self.write(p, text)?;
                eprintln!("wrote {}", full.display());
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

pub fn run(ctx: &Ctx, command: &Command) -> Result<Status> {
    match command {
        Command::Solve(a) => solve(ctx, a),
        Command::Verify(v) => verify(ctx, v),
        Command::Props(a) => props(ctx, a),
        Command::Barriers(a) => barriers(ctx, a),
        Command::Picard(a) => picard_cmd(ctx, a),
        Command::Plot(a) => plot(ctx, a),
    }
}

pub fn speed_spec(a: &SpeedArgs) -> Result<SpeedSpec> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("--speed {:?} needs {flag}", a.speed));
    Ok(match a.speed {
        SpeedName::SigmaK => SpeedSpec::sigma_k_root(need(a.k, "--k")?, a.n)?,
        SpeedName::Harmonic => SpeedSpec::harmonic_pairs(a.n)?,
        SpeedName::Quotient => SpeedSpec::quotient(need(a.k, "--k")?, need(a.l, "--l")?, a.n)?,
        SpeedName::Product => {
            if a.factors.is_empty() {
                bail!("--speed product needs --factors");
            }
            let factors = a.factors.iter().map(|f| factor_spec(f, a.n)).collect::<Result<Vec<_>>>()?;
            let weights =
                if a.weights.is_empty() { vec![1.0 / factors.len() as f64; factors.len()] } else { a.weights.clone() };
            SpeedSpec::product(factors, weights)?
        }
    })
}

/// `sigma-k:K`, `harmonic` or `quotient:K:L`.
fn factor_spec(text: &str, n: usize) -> Result<SpeedSpec> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let int = |s: &str| s.parse::<usize>().with_context(|| format!("bad integer '{s}' in factor '{text}'"));
    Ok(match parts.as_slice() {
        ["sigma-k", k] => SpeedSpec::sigma_k_root(int(k)?, n)?,
        ["harmonic"] => SpeedSpec::harmonic_pairs(n)?,
        ["quotient", k, l] => SpeedSpec::quotient(int(k)?, int(l)?, n)?,
        _ => bail!("unknown factor '{text}' (expected sigma-k:K, harmonic or quotient:K:L)"),
    })
}

fn solve(ctx: &Ctx, a: &SolveArgs) -> Result<Status> {
    let Some(sweep) = &a.sweep else {
        println!("{}", solve_one(ctx, a, &a.out)?);
        return Ok(Status::Pass);
    };
    let (key, values) = parse_sweep(sweep)?;
    let jobs: Vec<(SolveArgs, PathBuf)> = values
        .iter()
        .map(|&v| {
            let mut job = a.clone();
            match key.as_str() {
                "n" => job.speed.n = v,
                _ => job.speed.k = Some(v),
            }
            (job, suffixed(&a.out, &format!("-{key}{v}")))
        })
        .collect();
    let results: Vec<Result<String>> = thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|(job, out)| s.spawn(move || solve_one(ctx, job, out))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(anyhow!("solver thread panicked")))).collect()
    });
    for r in results {
        println!("{}", r?);
    }
    Ok(Status::Pass)
}

fn solve_one(ctx: &Ctx, a: &SolveArgs, out: &Path) -> Result<String> {
    let spec = speed_spec(&a.speed)?;
    let opts = ProfileOptions {
        startup_radius: a.eps,
        r_max: a.rmax,
        rtol: a.rtol,
        atol: a.atol,
        blowup_threshold: a.blowup,
        ..ProfileOptions::default()
    };
    let profile = integrate_profile(&spec, &opts)?;
    let path = ctx.output(out)?;
    io::write_profile(&profile, &path)?;
    let mut msg = format!(
        "{}: {} samples on [{}, {}], status {}",
        path.display(),
        profile.samples.len(),
        profile.first_radius(),
        profile.last_radius(),
        profile.status.as_str()
    );
    if let Some(rb) = profile.blowup_radius {
        msg.push_str(&format!(", blow-up radius {rb:.6}"));
    }
    Ok(msg)
}

/// `n=3..6` (inclusive), `k=2` or `n=3,5`.
fn parse_sweep(text: &str) -> Result<(String, Vec<usize>)> {
    let (key, range) = text.split_once('=').ok_or_else(|| anyhow!("--sweep expects KEY=A..B, got '{text}'"))?;
    let key = key.trim().to_string();
    if key != "n" && key != "k" {
        bail!("--sweep can vary n or k, not '{key}'");
    }
    let int = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad integer '{s}' in --sweep"));
    let values = match range.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (int(lo)?, int(hi.trim_start_matches('='))?);
            if lo > hi {
                bail!("empty sweep range {lo}..{hi}");
            }
            (lo..=hi).collect()
        }
        None => range.split(',').map(int).collect::<Result<Vec<_>>>()?,
    };
    Ok((key, values))
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn read_profile(path: &Path) -> Result<ProfileSolution> {
    io::read_profile(path).with_context(|| format!("reading profile {}", path.display()))
}

fn verify(ctx: &Ctx, v: &VerifyCommand) -> Result<Status> {
    let (report, target) = match v {
        VerifyCommand::Soliton(a) => {
            let p = read_profile(&a.common.profile)?;
            let mut report = VerificationReport::new(Some(&p));
            report.push(verifier::check_soliton(&p, a.tol));
            (report, a.common.report.as_deref())
        }
        VerifyCommand::Convexity(a) => {
            let p = read_profile(&a.common.profile)?;
            let alpha = auto_or_number(&a.alpha, "--alpha")?;
            let beta = auto_or_number(&a.beta, "--beta")?;
            let fitted =
                if alpha.is_none() || beta.is_none() { Some(fit_convexity_constants(&p, a.delta)?) } else { None };
            let alpha = alpha.or(fitted.map(|c| c.alpha)).unwrap_or_default();
            let beta = beta.or(fitted.map(|c| c.beta)).unwrap_or_default();
            let mut entry = verifier::check_convexity_estimate(&p, alpha, a.delta, beta);
            if let Value::Object(map) = &mut entry.details {
                map.insert("alpha".into(), json!(alpha));
                map.insert("beta".into(), json!(beta));
                map.insert("delta".into(), json!(a.delta));
                map.insert("fitted".into(), json!({ "alpha": a.alpha == "auto", "beta": a.beta == "auto" }));
            }
            let mut report = VerificationReport::new(Some(&p));
            report.push(entry);
            (report, a.common.report.as_deref())
        }
        VerifyCommand::Barriers(a) => {
            let p = read_profile(&a.profile)?;
            let mut report = VerificationReport::new(Some(&p));
            for entry in verifier::check_barriers(&p)? {
                report.push(entry);
            }
            (report, a.report.as_deref())
        }
        VerifyCommand::Cylinder(a) => {
            let zs = if a.z.is_empty() { linspace(a.zmin, a.zmax, a.count)? } else { a.z.clone() };
            let mut report = VerificationReport::new(None);
            report.push(verifier::check_sigma2_cylinder(&zs)?);
            (report, a.report.as_deref())
        }
    };
    ctx.emit(target, &io::to_json(&report)?)?;
    for c in &report.checks {
        let worst = c.worst_violation.map_or("-".to_string(), |w| format!("{w:.3e}"));
        eprintln!("{:<24} {:<8} worst {worst} (tol {:e})", c.name, c.status.to_string(), c.tolerance);
    }
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}

fn auto_or_number(text: &str, flag: &str) -> Result<Option<f64>> {
    if text == "auto" {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).with_context(|| format!("{flag} expects a number or 'auto', got '{text}'"))
}

fn linspace(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    match count {
        0 => bail!("--count must be positive"),
        1 => Ok(vec![lo]),
        _ => Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()),
    }
}

fn props(ctx: &Ctx, a: &PropsArgs) -> Result<Status> {
    let spec = speed_spec(&a.speed)?;
    let report = check_properties(&spec, a.samples, a.seed)?;
    ctx.emit(a.report.as_deref(), &io::to_json(&report)?)?;
    let failing = report.failing();
    let quotient = matches!(spec.kind(), SpeedKind::Quotient { .. });
    for o in &report.outcomes {
        eprintln!("{:<28} {:>5} passed {:>5} failed  worst {:.3e}", o.name, o.passed, o.failed, o.worst);
    }
    if quotient {
        if failing.contains(&"boundary_vanishing") {
            eprintln!("warning: {} does not vanish on the boundary of its cone", report.speed);
        } else {
            eprintln!(
                "warning: {} was not expected to vanish on the boundary of its cone, yet every sample did",
                report.speed
            );
        }
        return Ok(if failing.iter().all(|f| *f == "boundary_vanishing") { Status::Pass } else { Status::Fail });
    }
    Ok(if failing.is_empty() { Status::Pass } else { Status::Fail })
}

#[derive(Serialize)]
struct BarrierSummary {
    barrier: String,
    role: BarrierRole,
    rows: usize,
    violations: usize,
    worst_violation: f64,
    csv: String,
}

/// Relative slack on the sign of the defect; the derivative comes from central differences.
const DEFECT_TOL: f64 = 1e-7;

fn barriers(ctx: &Ctx, a: &BarriersArgs) -> Result<Status> {
    let b = Barrier::new(a.name, a.n, a.k, a.a)?;
    let eq = if a.name.is_sigma() {
        ProfileEquation::Sigma { k: a.k.unwrap_or_default(), n: a.n }
    } else {
        ProfileEquation::Harmonic { n: a.n }
    };
    if a.rmax.is_nan() || a.rmax <= 0.0 || a.points < 2 {
        bail!("--rmax must be positive and --points at least 2");
    }
    let dom = b.domain();
    let end = if dom.end.is_finite() { a.rmax.min(dom.end * (1.0 - 1e-6)) } else { a.rmax };
    let mut rows = Vec::with_capacity(a.points);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for i in 1..=a.points {
        let r = end * i as f64 / a.points as f64;
        let value = b.eval(r)?;
        let h = 1e-6 * r;
        let deriv = match (b.eval(r + h), b.eval(r - h)) {
            (Ok(p), Ok(m)) => (p - m) / (2.0 * h),
            _ => (value - b.eval(r - h)?) / h,
        };
        let rhs = eq.rhs(r, value).unwrap_or(f64::NAN);
        let defect = deriv - rhs;
        let scale = DEFECT_TOL * deriv.abs().max(rhs.abs()).max(1.0);
        let bad = match b.role() {
            BarrierRole::Sub => defect > scale,
            BarrierRole::Super => defect < -scale,
            BarrierRole::LowerBound => false,
        };
        if defect.is_finite() {
            worst = worst.max(match b.role() {
                BarrierRole::Sub => defect,
                BarrierRole::Super => -defect,
                BarrierRole::LowerBound => 0.0,
            });
        }
        violations += bad as usize;
        rows.push(vec![r, value, deriv, rhs, defect]);
    }
    let csv = io::write_rows(&["r", "value", "derivative", "rhs", "defect"], rows.iter().cloned().map(Ok))?;
    let path = ctx.write(&a.out, &csv)?;
    let summary = BarrierSummary {
        barrier: b.to_string(),
        role: b.role(),
        rows: rows.len(),
        violations,
        worst_violation: worst,
        csv: path.display().to_string(),
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if violations == 0 { Status::Pass } else { Status::Fail })
}

#[derive(Serialize)]
struct PicardLog<'a> {
    n: usize,
    #[serde(rename = "R")]
    radius: f64,
    m: usize,
    tol: f64,
    converged: bool,
    max_contraction_ratio: Option<f64>,
    iterations: &'a [picard::IterationRecord],
    fixed_point_csv_path: String,
}

fn picard_cmd(ctx: &Ctx, a: &PicardArgs) -> Result<Status> {
    let radius = a.radius.unwrap_or_else(|| picard::default_radius(a.n));
    let sol = match picard_solve(a.n, radius, a.grid, a.tol, a.max_iter) {
        Ok(sol) => sol,
        Err(e @ (translator_core::Error::ContractionFailure { .. } | translator_core::Error::NoConvergence { .. })) => {
            eprintln!("error: {e}");
            return Ok(Status::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    let csv_rel = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    let csv_path = ctx.write(&csv_rel, &io::grid_csv(&sol.fixed_point)?)?;
    let log = PicardLog {
        n: sol.n,
        radius: sol.radius,
        m: sol.m,
        tol: sol.tol,
        converged: sol.converged,
        max_contraction_ratio: sol.max_ratio(),
        iterations: &sol.iterations,
        fixed_point_csv_path: csv_path.display().to_string(),
    };
    let log_path = ctx.write(&a.out, &io::to_json(&log)?)?;
    println!(
        "{}: {} iterations, converged {}, max ratio {}",
        log_path.display(),
        sol.iterations.len(),
        sol.converged,
        sol.max_ratio().map_or("-".into(), |r| format!("{r:.4}"))
    );
    Ok(if sol.converged { Status::Pass } else { Status::Fail })
}

fn plot(ctx: &Ctx, a: &PlotArgs) -> Result<Status> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let samples = io::parse_profile_csv(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let name = a.input.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let chart = if a.revolve {
        let mut pts: Vec<(f64, f64)> = samples.iter().rev().map(|s| (-s.r, s.u)).collect();
        pts.extend(samples.iter().map(|s| (s.r, s.u)));
        Chart {
            title: a.title.clone().unwrap_or_else(|| format!("{name}: rotational graph")),
            x_label: "x".into(),
            y_label: "u".into(),
            series: vec![Series::solid("profile", pts)],
            y_range: None,
        }
    } else {
        let profile: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.du)).collect();
        let (lo, hi) = profile.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.1), h.max(p.1)));
        let (ymin, ymax) = (lo.min(0.0), hi + 0.25 * (hi - lo.min(0.0)).max(1e-12));
        let mut series = vec![Series::solid("profile du", profile)];
        if !a.barriers.is_empty() {
            let meta =
                io::read_metadata(&io::sidecar_path(&a.input)).context("barrier overlays need the metadata sidecar")?;
            for &name in &a.barriers {
                series.push(barrier_series(&meta, name, samples[0].r, samples[samples.len() - 1].r, ymin, ymax)?);
            }
        }
        Chart {
            title: a.title.clone().unwrap_or_else(|| format!("{name}: slope")),
            x_label: "r".into(),
            y_label: "du".into(),
            series,
            y_range: Some((ymin, ymax)),
        }
    };
    let path = ctx.write(&a.out, &chart.render())?;
    println!("{}", path.display());
    Ok(Status::Pass)
}

fn barrier_series(meta: &ProfileMetadata, name: BarrierName, r0: f64, r1: f64, ymin: f64, ymax: f64) -> Result<Series> {
    let b = Barrier::new(name, meta.n, meta.k, None)?;
    let dom = b.domain();
    const POINTS: usize = 400;
    let pts = (0..=POINTS)
        .map(|i| r0 + (r1 - r0) * i as f64 / POINTS as f64)
        .filter(|r| dom.contains(*r))
        .map(|r| (r, b.eval(r).unwrap_or(f64::NAN)));
    Ok(Series { label: b.to_string(), pieces: split_in_range(pts, ymin, ymax), dashed: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        assert_eq!(parse_sweep("n=3..6").unwrap(), ("n".into(), vec![3, 4, 5, 6]));
        assert_eq!(parse_sweep("k=2,4").unwrap(), ("k".into(), vec![2, 4]));
        assert_eq!(parse_sweep("n=3..=4").unwrap(), ("n".into(), vec![3, 4]));
        assert!(parse_sweep("rmax=1..2").is_err());
        assert!(parse_sweep("n=6..3").is_err());
        assert!(parse_sweep("n3..6").is_err());
    }

    #[test]
    fn suffixes_keep_extension() {
        assert_eq!(suffixed(Path::new("out/hm.csv"), "-n3"), PathBuf::from("out/hm-n3.csv"));
        assert_eq!(suffixed(Path::new("hm"), "-n4"), PathBuf::from("hm-n4"));
    }

    #[test]
    fn product_factors() {
        let a = SpeedArgs {
            speed: SpeedName::Product,
            n: 3,
            k: None,
            l: None,
            factors: vec!["sigma-k:2".into(), "harmonic".into()],
            weights: vec![],
        };
        assert!(speed_spec(&a).is_ok());
        assert!(factor_spec("cubic", 3).is_err());
        assert!(factor_spec("quotient:3", 3).is_err());
        let missing = SpeedArgs { speed: SpeedName::SigmaK, factors: vec![], ..a };
        assert!(speed_spec(&missing).is_err());
    }

    #[test]
    fn auto_constants() {
        assert_eq!(auto_or_number("auto", "--alpha").unwrap(), None);
        assert_eq!(auto_or_number("2.5", "--alpha").unwrap(), Some(2.5));
        assert!(auto_or_number("big", "--alpha").is_err());
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
    }
}
