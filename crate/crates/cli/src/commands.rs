//! Subcommand implementations. Each returns the process exit code and
//! writes its human-readable output to `out`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use rank3eq_core::oracle::{operator_det, oracle_solve};
use rank3eq_core::perm_system::ADiagnostics;
use rank3eq_core::solver::{residual, solve_observed, Stage};
use rank3eq_core::trace_system::GammaDiagnostics;
use rank3eq_core::{
    DegeneracyPolicy, Instance, LeviCivita, Metric, ParameterSet, SolveConfig, SolveReport, Status,
};
use serde::Serialize;

use crate::instance::{InstanceFile, MetricSpec};
use crate::report::{max_rel_diff, nested, sha256_hex, ReportFile, REPORT_FORMAT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Agreement threshold between two solutions, relative in max-norm.
pub const AGREEMENT_TOL: f64 = 1e-9;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct LoadedInstance {
    pub file: InstanceFile,
    pub digest: String,
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text =
        std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let file = InstanceFile::parse(text)
        .with_context(|| format!("invalid instance {}", path.display()))?;
    Ok(LoadedInstance {
        file,
        digest: sha256_hex(&bytes),
    })
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn stage_name(s: Stage) -> &'static str {
    match s {
        Stage::Gamma => "gamma",
        Stage::PermSystem => "perm_system",
        Stage::Traces => "traces",
        Stage::Sources => "sources",
        Stage::Extract => "extract",
        Stage::Residual => "residual",
    }
}

/// Structured solve with per-stage wall-clock timings in microseconds.
pub fn timed_solve(inst: &InstanceFile, cfg: &SolveConfig) -> (SolveReport, BTreeMap<String, f64>) {
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let mut last = start;
    let report = solve_observed(
        &inst.params,
        &inst.metric,
        &inst.source,
        cfg,
        &mut |stage| {
            let now = Instant::now();
            timings.insert(
                stage_name(stage).to_string(),
                (now - last).as_secs_f64() * 1e6,
            );
            last = now;
        },
    );
    timings.insert("total".into(), start.elapsed().as_secs_f64() * 1e6);
    (report, timings)
}

pub fn structured_report(inst: &LoadedInstance, cfg: &SolveConfig) -> ReportFile {
    let (r, timings) = timed_solve(&inst.file, cfg);
    ReportFile {
        format: REPORT_FORMAT.into(),
        tool_version: VERSION.into(),
        solver: "structured".into(),
        input_sha256: inst.digest.clone(),
        status: r.status.as_str().into(),
        solution: r.solution.map(|n| n.0.to_vec()),
        solution_nested: r.solution.as_ref().map(nested),
        det_gamma: r.det_gamma,
        det_a: r.det_a,
        rcond_gamma: r.rcond_gamma,
        rcond_a: r.rcond_a,
        residual_rel: r.residual_rel,
        timings_us: timings,
    }
}

/// Brute-force solve. Determinants and condition numbers are still those of
/// Γ and A, for comparison with the structured report.
pub fn oracle_report(inst: &LoadedInstance) -> ReportFile {
    let f = &inst.file;
    let s = f.metric.sign_factor();
    let gamma = GammaDiagnostics::new(&f.params, s);
    let a = ADiagnostics::new(&f.params, s);
    let start = Instant::now();
    let solved = oracle_solve(&f.params, &f.metric, &f.source).ok();
    let elapsed = start.elapsed().as_secs_f64() * 1e6;
    let residual_rel = solved.map(|n| {
        residual(
            &f.params,
            &f.metric,
            &LeviCivita::new(&f.metric),
            &n,
            &f.source,
        )
    });
    ReportFile {
        format: REPORT_FORMAT.into(),
        tool_version: VERSION.into(),
        solver: "oracle".into(),
        input_sha256: inst.digest.clone(),
        status: if solved.is_some() {
            "solved"
        } else {
            "singular"
        }
        .into(),
        solution: solved.map(|n| n.0.to_vec()),
        solution_nested: solved.as_ref().map(nested),
        det_gamma: gamma.det,
        det_a: a.det,
        rcond_gamma: gamma.rcond,
        rcond_a: a.rcond,
        residual_rel,
        timings_us: BTreeMap::from([("total".into(), elapsed)]),
    }
}

fn print_dets(out: &mut dyn Write, r: &ReportFile) -> Result<()> {
    writeln!(
        out,
        "det Γ = {:e}   rcond Γ = {:e}",
        r.det_gamma, r.rcond_gamma
    )?;
    writeln!(out, "det A = {:e}   rcond A = {:e}", r.det_a, r.rcond_a)?;
    Ok(())
}

pub fn cmd_solve(
    input: &Path,
    output: Option<&Path>,
    cfg: &SolveConfig,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let inst = load_instance(input)?;
    let report = structured_report(&inst, cfg);
    if verbose {
        print_dets(&mut std::io::stderr(), &report)?;
        for (stage, us) in &report.timings_us {
            eprintln!("{stage:>12}: {us:9.1} µs");
        }
    }
    let code = if report.status == "solved" {
        EXIT_OK
    } else {
        eprintln!("status: {}", report.status);
        print_dets(&mut std::io::stderr(), &report)?;
        if let Some(r) = report.residual_rel {
            eprintln!("residual_rel = {r:e} (tolerance {:e})", cfg.residual_tol);
        }
        EXIT_DEGENERATE
    };
    write_output(output, &report.to_json(), out)?;
    Ok(code)
}

pub fn cmd_oracle(input: &Path, output: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(input)?;
    let report = oracle_report(&inst);
    write_output(output, &report.to_json(), out)?;
    Ok(if report.status == "solved" {
        EXIT_OK
    } else {
        EXIT_DEGENERATE
    })
}

pub fn cmd_verify(
    input: &Path,
    against: Option<&Path>,
    cfg: &SolveConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let inst = load_instance(input)?;
    let structured = structured_report(&inst, cfg);
    let (reference, label) = match against {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let golden = ReportFile::parse(&text)
                .with_context(|| format!("invalid report {}", path.display()))?;
            (golden, "golden")
        }
        None => (oracle_report(&inst), "oracle"),
    };
    writeln!(
        out,
        "structured: {}   {label}: {}",
        structured.status, reference.status
    )?;
    let (Some(n), Some(reference_n)) = (structured.solution_tensor(), reference.solution_tensor())
    else {
        print_dets(out, &structured)?;
        return Ok(EXIT_DEGENERATE);
    };
    let (diff, idx) = max_rel_diff(&n, &reference_n);
    writeln!(out, "max relative difference = {diff:e}")?;
    if diff < AGREEMENT_TOL {
        Ok(EXIT_OK)
    } else {
        let (a, m, nu) = rank3eq_core::tensor::triple(idx);
        writeln!(
            out,
            "mismatch at component {idx} (α={a}, μ={m}, ν={nu}): structured {:e}, {label} {:e}",
            n.0[idx], reference_n.0[idx]
        )?;
        Ok(EXIT_MISMATCH)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub status: String,
    pub gamma: [[f64; 4]; 4],
    pub det_gamma: f64,
    pub rcond_gamma: f64,
    pub det_a: f64,
    pub rcond_a: f64,
    pub det_operator: f64,
}

pub fn check(params: &ParameterSet, metric: &Metric, policy: &DegeneracyPolicy) -> CheckReport {
    let s = metric.sign_factor();
    let gamma = GammaDiagnostics::new(params, s);
    let a = ADiagnostics::new(params, s);
    let gamma_ok =
        rank3eq_core::trace_system::TraceSystem::from_diagnostics(gamma, s, policy).is_ok();
    let a_ok = rank3eq_core::perm_system::PermSystem::from_diagnostics(a.clone(), policy).is_ok();
    let status = match (gamma_ok, a_ok) {
        (true, true) => Status::Solved,
        (false, _) => Status::DegenerateGamma,
        (true, false) => Status::DegenerateA,
    };
    CheckReport {
        status: if status == Status::Solved {
            "solvable".into()
        } else {
            status.as_str().into()
        },
        gamma: gamma.gamma,
        det_gamma: gamma.det,
        rcond_gamma: gamma.rcond,
        det_a: a.det,
        rcond_a: a.rcond,
        det_operator: operator_det(params, metric),
    }
}

pub fn cmd_check(
    input: &Path,
    json: bool,
    policy: &DegeneracyPolicy,
    out: &mut dyn Write,
) -> Result<i32> {
    let inst = load_instance(input)?;
    let r = check(&inst.file.params, &inst.file.metric, policy);
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
    } else {
        let verdict = if r.status == "solvable" {
            "solvable"
        } else {
            "degenerate"
        };
        writeln!(out, "{verdict} ({})", r.status)?;
        writeln!(
            out,
            "det Γ = {}   rcond Γ = {:e}",
            r.det_gamma, r.rcond_gamma
        )?;
        writeln!(out, "det A = {}   rcond A = {:e}", r.det_a, r.rcond_a)?;
        writeln!(out, "det L = {}   (64×64 operator)", r.det_operator)?;
        writeln!(out, "Γ =")?;
        for row in &r.gamma {
            writeln!(
                out,
                "  [{:>12.6} {:>12.6} {:>12.6} {:>12.6}]",
                row[0], row[1], row[2], row[3]
            )?;
        }
    }
    Ok(if r.status == "solvable" {
        EXIT_OK
    } else {
        EXIT_DEGENERATE
    })
}

pub fn metric_spec(name: &str) -> MetricSpec {
    MetricSpec::Named(name.to_string())
}

pub fn random_instance_file(seed: u64, scale: f64, metric: &str) -> Result<InstanceFile> {
    let spec = metric_spec(metric);
    let g = spec.resolve()?;
    let i = Instance::random(seed, scale, g);
    Ok(InstanceFile::new(spec, i.params, i.source)?)
}

pub fn cmd_random(
    seed: u64,
    scale: f64,
    metric: &str,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    anyhow::ensure!(
        scale.is_finite() && scale >= 0.0,
        "--scale must be finite and non-negative"
    );
    let file = random_instance_file(seed, scale, metric)?;
    write_output(output, &file.to_json(), out)?;
    Ok(EXIT_OK)
}

/// Per-instance bench record.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub seed: u64,
    pub metric: &'static str,
    pub status: Status,
    pub structured_us: f64,
    pub oracle_us: f64,
    /// Relative difference to the oracle, when both paths solved.
    pub rel_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub count: usize,
    pub solved: usize,
    pub mismatches: usize,
    pub structured_median_us: Option<f64>,
    pub structured_p99_us: Option<f64>,
    pub oracle_median_us: Option<f64>,
    pub oracle_p99_us: Option<f64>,
    /// Oracle median over structured median.
    pub speedup: Option<f64>,
    pub wall_s: f64,
}

fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

/// Instances `seed, seed+1, …`, alternating Euclidean and Minkowski metrics.
pub fn bench(count: usize, seed: u64, cfg: &SolveConfig) -> (BenchSummary, Vec<BenchRow>) {
    let wall = Instant::now();
    let mut rows = Vec::with_capacity(count);
    for k in 0..count as u64 {
        let (name, g) = if k.is_multiple_of(2) {
            ("euclidean", Metric::euclidean())
        } else {
            ("minkowski", Metric::minkowski())
        };
        let inst = Instance::random(seed.wrapping_add(k), 1.0, g);
        let t = Instant::now();
        let r = inst.solve(cfg);
        let structured_us = t.elapsed().as_secs_f64() * 1e6;
        let t = Instant::now();
        let o = oracle_solve(&inst.params, &inst.metric, &inst.source);
        let oracle_us = t.elapsed().as_secs_f64() * 1e6;
        let rel_diff = match (&r.solution, &o) {
            (Some(n), Ok(on)) => Some(max_rel_diff(n, on).0),
            _ => None,
        };
        rows.push(BenchRow {
            seed: seed.wrapping_add(k),
            metric: name,
            status: r.status,
            structured_us,
            oracle_us,
            rel_diff,
        });
    }
    let mut s: Vec<f64> = rows.iter().map(|r| r.structured_us).collect();
    let mut o: Vec<f64> = rows.iter().map(|r| r.oracle_us).collect();
    s.sort_by(f64::total_cmp);
    o.sort_by(f64::total_cmp);
    let (sm, om) = (percentile(&s, 0.5), percentile(&o, 0.5));
    let summary = BenchSummary {
        count,
        solved: rows.iter().filter(|r| r.status == Status::Solved).count(),
        mismatches: rows
            .iter()
            .filter(|r| {
                r.status == Status::Solved && !r.rel_diff.is_some_and(|d| d < AGREEMENT_TOL)
            })
            .count(),
        structured_median_us: sm,
        structured_p99_us: percentile(&s, 0.99),
        oracle_median_us: om,
        oracle_p99_us: percentile(&o, 0.99),
        speedup: sm.zip(om).map(|(s, o)| o / s),
        wall_s: wall.elapsed().as_secs_f64(),
    };
    (summary, rows)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.1}"))
}

pub fn cmd_bench(
    count: usize,
    seed: u64,
    cfg: &SolveConfig,
    csv: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let (summary, rows) = bench(count, seed, cfg);
    if let Some(path) = csv {
        let mut text = String::from("seed,metric,status,structured_us,oracle_us,rel_diff\n");
        for r in &rows {
            let diff = r.rel_diff.map_or(String::new(), |d| format!("{d:e}"));
            text += &format!(
                "{},{},{},{:.3},{:.3},{}\n",
                r.seed,
                r.metric,
                r.status.as_str(),
                r.structured_us,
                r.oracle_us,
                diff
            );
        }
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
    } else {
        writeln!(
            out,
            "instances: {}   solved: {}   oracle mismatches: {}",
            summary.count, summary.solved, summary.mismatches
        )?;
        writeln!(out, "{:<12} {:>12} {:>12}", "path", "median µs", "p99 µs")?;
        writeln!(
            out,
            "{:<12} {:>12} {:>12}",
            "structured",
            fmt_opt(summary.structured_median_us),
            fmt_opt(summary.structured_p99_us)
        )?;
        writeln!(
            out,
            "{:<12} {:>12} {:>12}",
            "oracle",
            fmt_opt(summary.oracle_median_us),
            fmt_opt(summary.oracle_p99_us)
        )?;
        writeln!(
            out,
            "speedup: {}   wall: {:.2} s",
            summary.speedup.map_or("-".into(), |s| format!("{s:.1}×")),
            summary.wall_s
        )?;
    }
    Ok(if summary.mismatches == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.5), Some(2.0));
        assert_eq!(percentile(&v, 0.99), Some(4.0));
        assert_eq!(percentile(&[], 0.5), None);
    }

    #[test]
    fn bench_counts() {
        let cfg = SolveConfig::default();
        let (s, rows) = bench(0, 1, &cfg);
        assert_eq!((s.count, rows.len(), s.speedup), (0, 0, None));
        let (s, rows) = bench(3, 1, &cfg);
        assert_eq!(rows.len(), 3);
        assert_eq!(s.mismatches, 0);
        assert_eq!(rows[1].metric, "minkowski");
    }

    #[test]
    fn check_identity_and_zero() {
        let policy = DegeneracyPolicy::default();
        let r = check(&ParameterSet::identity(), &Metric::minkowski(), &policy);
        assert_eq!(r.status, "solvable");
        assert_eq!(r.det_gamma, 1.0);
        assert_eq!(r.det_a.abs(), 1.0);
        let z = check(&ParameterSet::ZERO, &Metric::euclidean(), &policy);
        assert_eq!(z.status, "degenerate_gamma");
        assert_eq!((z.det_gamma, z.det_a, z.det_operator), (0.0, 0.0, 0.0));
    }

    #[test]
    fn timed_solve_records_every_stage() {
        let file = random_instance_file(7, 1.0, "minkowski").unwrap();
        let (_, t) = timed_solve(&file, &SolveConfig::default());
        for k in [
            "gamma",
            "perm_system",
            "traces",
            "sources",
            "extract",
            "residual",
            "total",
        ] {
            assert!(t.contains_key(k), "{k}");
        }
    }
}
