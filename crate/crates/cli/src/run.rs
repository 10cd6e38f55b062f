//! Subcommand drivers. Every file is written by the orchestrating thread.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use stochvort::field::to_physical;
use stochvort::noise::{fmt17, hitting_law_exact, hitting_law_mc, tail_probability_bound, McEstimate};
use stochvort::snapshot::write_snapshot;
use stochvort::solver::diagnostics::{
    cosine_mode, max_relative_divergence, velocity_diagnostics, weak_pairing, write_pairings_csv,
};
use stochvort::solver::{beta_constants, Calibration, SolutionRecord};
use stochvort::verify::moments::moment;
use stochvort::verify::{
    check_calderon_zygmund, check_heat_smoothing, check_multiplier_bounds, check_m_estimate, check_sobolev,
    HeatSmoothingSetup,
};

use crate::config::{builtin, McMode, ScenarioConfig, U0Scale};
use crate::error::{CliError, Result};
use crate::oracle::oracle_study;
use crate::scenario::Scenario;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::write(dir.join(name), text)?;
    Ok(())
}

pub fn calibration_text(cal: &Calibration) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# linear ratio = {}", fmt17(cal.linear_ratio));
    for (n, r) in &cal.growth {
        let _ = writeln!(s, "# growth |U0| = {} ratio = {}", fmt17(*n), fmt17(*r));
    }
    for (n, r) in &cal.lipschitz {
        let _ = writeln!(s, "# lipschitz |U0| = {} ratio = {}", fmt17(*n), fmt17(*r));
    }
    let _ = writeln!(s, "constants.C1 = {}", fmt17(cal.constants.c1));
    let _ = writeln!(s, "constants.C2 = {}", fmt17(cal.constants.c2));
    let _ = writeln!(s, "constants.Cstar = {}", fmt17(cal.constants.c_star));
    s
}

/// Reads a scenario from a file or a shipped preset name.
pub fn load_config(path: Option<&Path>, preset: Option<&str>) -> Result<ScenarioConfig> {
    match (path, preset) {
        (Some(p), None) => ScenarioConfig::parse(&fs::read_to_string(p)?),
        (None, Some(name)) => {
            let text = builtin(name).ok_or_else(|| CliError::Usage(format!("unknown preset '{name}'")))?;
            ScenarioConfig::parse(text)
        }
        (None, None) => Err(CliError::Usage("give --config <file> or --preset <name>".into())),
        (Some(_), Some(_)) => Err(CliError::Usage("give only one of --config and --preset".into())),
    }
}

/// What a completed solve reports back.
#[derive(Debug)]
pub struct SolveSummary {
    pub seed: u64,
    pub record: SolutionRecord,
    pub max_divergence: [f64; 3],
    pub calibrated: bool,
}

fn record_summary(rec: &SolutionRecord, div: [f64; 3], velocity: [Option<f64>; 3]) -> String {
    let mut s = String::new();
    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_else(|| "undefined".into());
    let _ = writeln!(s, "iterations = {}", rec.iterations);
    let _ = writeln!(s, "znorm = {}", fmt17(rec.kato.znorm));
    let _ = writeln!(s, "mild_residual = {}", fmt17(rec.mild_residual));
    let _ = writeln!(s, "vorticity_residual = {}", fmt17(rec.vorticity_residual));
    let _ = writeln!(s, "max_divergence_y = {}", fmt17(div[0]));
    let _ = writeln!(s, "max_divergence_U = {}", fmt17(div[1]));
    let _ = writeln!(s, "max_divergence_X = {}", fmt17(div[2]));
    let _ = writeln!(s, "max_ratio_X_r1_over_U_p = {}", opt(velocity[0]));
    let _ = writeln!(s, "max_ratio_DX_p_over_U_p = {}", opt(velocity[1]));
    let _ = writeln!(s, "max_ratio_DDX_p_over_DU_p = {}", opt(velocity[2]));
    s
}

fn nearest_node(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (m, s) in times.iter().enumerate() {
        if (s - t).abs() < (times[best] - t).abs() {
            best = m;
        }
    }
    best
}

/// `solve`: one path, full artifact set.
pub fn run_solve(mut config: ScenarioConfig, seed: Option<u64>, out: &Path, override_smallness: bool) -> Result<SolveSummary> {
    if let Some(s) = seed {
        config.seed = s;
    }
    let seed = config.seed;
    fs::create_dir_all(out)?;
    let mut scn = Scenario::build(config)?;
    let cal = scn.ensure_constants()?;
    if let Some(c) = &cal {
        write_text(out, "calibration.txt", &calibration_text(c))?;
    }
    write_text(out, "effective.cfg", &scn.config.to_text())?;
    log::info!("solve: seed {seed}");

    let run = scn.run_path(seed, 0, override_smallness)?;
    run.diagnostics
        .write_csv(create(out, &format!("noise_seed{seed}_path0.csv"))?)?;
    write_text(out, "smallness.txt", &run.smallness.to_text())?;
    let rec = match run.record {
        Ok(r) => r,
        Err(stochvort::Error::NonConvergence(nc)) => {
            let mut w = create(out, "contraction.csv")?;
            writeln!(w, "iteration,difference,ratio")?;
            for (k, d) in nc.differences.iter().enumerate() {
                let r = if k == 0 { String::new() } else { fmt17(nc.ratios[k - 1]) };
                writeln!(w, "{},{},{}", k + 1, fmt17(*d), r)?;
            }
            return Err(stochvort::Error::NonConvergence(nc).into());
        }
        Err(e) => return Err(e.into()),
    };

    rec.kato.write_csv(create(out, "kato.csv")?)?;
    rec.write_contraction_csv(create(out, "contraction.csv")?)?;
    let phis = scn
        .config
        .pairing_modes
        .iter()
        .map(|(k, c)| cosine_mode(scn.grid, *k, *c))
        .collect::<stochvort::Result<Vec<_>>>()?;
    let pairings: Vec<Vec<f64>> = phis.iter().map(|phi| weak_pairing(&rec.y, phi)).collect();
    write_pairings_csv(&rec.times, &pairings, create(out, "pairings.csv")?)?;
    let velocity = velocity_diagnostics(&rec, &scn.solver.exponents);
    velocity.write_csv(create(out, "velocity.csv")?)?;
    let div = max_relative_divergence(&rec);
    write_text(out, "diagnostics.txt", &record_summary(&rec, div, velocity.max_ratios()))?;
    for &t in &scn.config.snapshots {
        let m = nearest_node(&rec.times, t);
        let u = rec.vorticity(m);
        write_snapshot(&to_physical(&u), create(out, &format!("snapshot_U_m{m:04}.vmf"))?)?;
        let x = stochvort::operators::biot_savart(&u);
        write_snapshot(&to_physical(&x), create(out, &format!("snapshot_X_m{m:04}.vmf"))?)?;
    }
    Ok(SolveSummary {
        seed,
        record: rec,
        max_divergence: div,
        calibrated: cal.is_some(),
    })
}

/// `calibrate`: constants for the scenario's grid and horizon.
pub fn run_calibrate(config: ScenarioConfig, out: Option<&Path>) -> Result<Calibration> {
    let scn = Scenario::build(config)?;
    let cal = scn.run_calibration()?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_text(dir, "calibration.txt", &calibration_text(&cal))?;
    }
    Ok(cal)
}

/// Tail-bound comparison for one `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub r: f64,
    pub fraction_exact: f64,
    pub fraction_analytic: f64,
    /// Binomial standard error of the analytic fraction.
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct McSummary {
    pub paths: usize,
    pub hitting: Option<(McEstimate, f64)>,
    pub eta_inf: Vec<(f64, f64)>,
    pub tail: Vec<TailRow>,
    pub znorm: Vec<Option<f64>>,
    pub failures: Vec<(usize, String)>,
    pub moments: Vec<(f64, McEstimate)>,
}

fn quantiles(v: &[f64]) -> [f64; 5] {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let q = |f: f64| s[((s.len() - 1) as f64 * f).round() as usize];
    [q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)]
}

/// `mc`: Monte-Carlo batch over `n_paths` paths with seeds `seed ⊕ index`.
pub fn run_mc(mut config: ScenarioConfig, n_paths: Option<usize>, seed: Option<u64>, out: &Path) -> Result<McSummary> {
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(n) = n_paths {
        config.mc_paths = n;
    }
    let n = config.mc_paths;
    if n < 2 {
        return Err(CliError::Usage(format!("mc needs at least 2 paths, got {n}")));
    }
    let seed = config.seed;
    fs::create_dir_all(out)?;
    let mut summary = McSummary {
        paths: n,
        hitting: None,
        eta_inf: Vec::new(),
        tail: Vec::new(),
        znorm: Vec::new(),
        failures: Vec::new(),
        moments: Vec::new(),
    };
    let mut agg = String::new();
    let _ = writeln!(agg, "seed = {seed}");
    let _ = writeln!(agg, "paths = {n}");

    if config.mc_mode == McMode::Hitting {
        write_text(out, "effective.cfg", &config.to_text())?;
        let est = hitting_law_mc(config.mc_nu, config.mc_r, config.mc_t_max, config.mc_steps, n, seed)?;
        let exact = hitting_law_exact(config.mc_nu, config.mc_r);
        let _ = writeln!(agg, "hitting_estimate = {}", fmt17(est.estimate));
        let _ = writeln!(agg, "hitting_stderr = {}", fmt17(est.stderr));
        let _ = writeln!(agg, "hitting_exact = {}", fmt17(exact));
        write_text(out, "aggregate.txt", &agg)?;
        summary.hitting = Some((est, exact));
        return Ok(summary);
    }

    let mut scn = Scenario::build(config)?;
    if scn.config.mc_mode == McMode::Solve {
        if let Some(c) = scn.ensure_constants()? {
            write_text(out, "calibration.txt", &calibration_text(&c))?;
        }
    }
    write_text(out, "effective.cfg", &scn.config.to_text())?;

    let solve = scn.config.mc_mode == McMode::Solve;
    type PathResult = Result<(stochvort::noise::NoiseDiagnostics, std::result::Result<f64, String>)>;
    let results: Vec<PathResult> = stochvort::par::map_range(n, |i| {
        if solve {
            let run = scn.run_path(seed, i as u64, false)?;
            let z = run.record.map(|r| r.kato.znorm).map_err(|e| e.to_string());
            Ok((run.diagnostics, z))
        } else {
            let paths = scn.paths(seed, i as u64)?;
            Ok((scn.diagnostics(&paths)?, Err("not solved".to_string())))
        }
    });
    let mut paths_csv = create(out, "paths.csv")?;
    writeln!(paths_csv, "index,path_seed,eta_inf_exact_l2,eta_inf_analytic,znorm,status")?;
    for (i, r) in results.into_iter().enumerate() {
        let (diag, z) = r?;
        diag.write_csv(create(out, &format!("noise_seed{seed}_path{i}.csv"))?)?;
        let path_seed = stochvort::noise::sample_seed(seed, i as u64);
        let (zs, status) = match (&z, solve) {
            (Ok(v), _) => (fmt17(*v), "ok".to_string()),
            (Err(_), false) => (String::new(), "noise_only".to_string()),
            (Err(e), true) => (String::new(), format!("failed: {}", e.replace(',', ";"))),
        };
        writeln!(
            paths_csv,
            "{i},{path_seed},{},{},{zs},{status}",
            fmt17(diag.eta_inf_exact),
            fmt17(diag.eta_inf_analytic)
        )?;
        summary.eta_inf.push((diag.eta_inf_exact, diag.eta_inf_analytic));
        if solve {
            match z {
                Ok(v) => summary.znorm.push(Some(v)),
                Err(e) => {
                    summary.znorm.push(None);
                    summary.failures.push((i, e));
                }
            }
        }
    }
    paths_csv.flush()?;

    let ex: Vec<f64> = summary.eta_inf.iter().map(|e| e.0).collect();
    let an: Vec<f64> = summary.eta_inf.iter().map(|e| e.1).collect();
    for (name, v) in [("eta_inf_exact_l2", &ex), ("eta_inf_analytic", &an)] {
        let q = quantiles(v);
        let _ = writeln!(
            agg,
            "{name}_quantiles = {},{},{},{},{}",
            fmt17(q[0]),
            fmt17(q[1]),
            fmt17(q[2]),
            fmt17(q[3]),
            fmt17(q[4])
        );
    }
    let mut tail = create(out, "tail.csv")?;
    writeln!(tail, "r,fraction_exact_l2,fraction_analytic,stderr,bound,pass")?;
    for &r in &scn.config.mc_tail_r {
        let frac = |v: &[f64]| v.iter().filter(|x| **x > r).count() as f64 / n as f64;
        let (fe, fa) = (frac(&ex), frac(&an));
        let stderr = (fa * (1.0 - fa) / n as f64).sqrt();
        let bound = tail_probability_bound(r, &scn.model)?;
        let row = TailRow {
            r,
            fraction_exact: fe,
            fraction_analytic: fa,
            stderr,
            bound,
            pass: fa <= bound + 3.0 * stderr,
        };
        writeln!(
            tail,
            "{},{},{},{},{},{}",
            fmt17(r),
            fmt17(fe),
            fmt17(fa),
            fmt17(stderr),
            fmt17(bound),
            row.pass
        )?;
        summary.tail.push(row);
    }
    tail.flush()?;
    if solve {
        let ok: Vec<f64> = summary.znorm.iter().flatten().copied().collect();
        let _ = writeln!(agg, "solved = {}", ok.len());
        let _ = writeln!(agg, "excluded = {}", summary.failures.len());
        for &r in &scn.config.mc_moments {
            let m = moment(&ok, r);
            let _ = writeln!(agg, "moment_r{} = {} +- {}", r, fmt17(m.estimate), fmt17(m.stderr));
            summary.moments.push((r, m));
        }
        for (i, e) in &summary.failures {
            let _ = writeln!(agg, "# path {i} excluded: {e}");
        }
    }
    write_text(out, "aggregate.txt", &agg)?;
    Ok(summary)
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Estimates,
    Oracle,
    Moments,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(Self::All),
            "estimates" => Ok(Self::Estimates),
            "oracle" => Ok(Self::Oracle),
            "moments" => Ok(Self::Moments),
            o => Err(format!("unknown suite '{o}' (all, estimates, oracle, moments)")),
        }
    }
}

fn row(suite: &'static str, name: impl Into<String>, value: f64, threshold: impl Into<String>, pass: bool) -> VerifyRow {
    VerifyRow {
        suite,
        name: name.into(),
        value,
        threshold: threshold.into(),
        pass,
    }
}

/// Functional inequalities and heat-smoothing exponents.
pub fn estimates_suite(ensemble: usize) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    let p = 1.8;
    let e = stochvort::solver::Exponents::new(p)?;
    let setup = HeatSmoothingSetup::default();
    for (q, pt, d) in [
        (1.5, 3.0, false),
        (e.q, p, false),
        (1.5, p, false),
        (p, p, false),
        (2.0, 2.0, true),
        (e.q, p, true),
    ] {
        let r = check_heat_smoothing(q, pt, d, &setup)?;
        rows.push(row(
            "estimates",
            format!("heat_slope q={q:.6} p={pt:.6}{}", if d { " derivative" } else { "" }),
            r.fitted_slope,
            format!("{:.6} +- 0.1", r.predicted_slope),
            r.pass,
        ));
    }
    let res = [16, 32, 64];
    for rep in [
        check_m_estimate(p, &res, ensemble, 11)?,
        check_sobolev(p, &res, ensemble, 12)?,
        check_calderon_zygmund(p, &res, ensemble, 13)?,
    ] {
        for (n, max, _) in &rep.sweep {
            rows.push(row("estimates", format!("{} max ratio n={n}", rep.name), *max, "", true));
        }
        rows.push(row(
            "estimates",
            format!("{} doubling growth", rep.name),
            rep.sweep.windows(2).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max),
            "< 1.25",
            rep.pass,
        ));
    }
    let scn = Scenario::build(ScenarioConfig::parse(builtin("kato_small").expect("shipped"))?)?;
    let paths = scn.paths(scn.config.seed, 0)?;
    let l = check_multiplier_bounds(&scn.model, &paths, &[e.q, 1.5, p, 2.0, e.r1], ensemble.min(20), 14)?;
    rows.push(row("estimates", "convolution ratio", l.convolution_ratio, "<= 1 + 1e-6", l.convolution_ratio <= 1.0 + 1e-6));
    rows.push(row("estimates", "gamma ratio", l.gamma_ratio, "<= 1 + 1e-12", l.gamma_ratio <= 1.0 + 1e-12));
    rows.push(row("estimates", "gamma l2 ratio", l.l2_ratio, "<= 1 + 1e-10", l.l2_ratio <= 1.0 + 1e-10));
    match beta_constants(p) {
        Ok(b) => {
            rows.push(row("estimates", "beta first p=1.8", b.first, "finite", b.first.is_finite()));
            rows.push(row("estimates", "beta second p=1.8", b.second, "finite", b.second.is_finite()));
        }
        Err(_) => rows.push(row("estimates", "beta p=1.8", f64::NAN, "finite", false)),
    }
    Ok(rows)
}

/// Picard against exponential Euler at three steps.
pub fn oracle_suite(config: &ScenarioConfig) -> Result<Vec<VerifyRow>> {
    let mut scn = Scenario::build(config.clone())?;
    scn.ensure_constants()?;
    let steps = [1e-3, 5e-4, 2.5e-4];
    let s = oracle_study(&scn, config.seed, &steps, 4)?;
    let mut rows: Vec<VerifyRow> = s
        .steps
        .iter()
        .zip(&s.gaps)
        .map(|(dt, g)| row("oracle", format!("gap dt={dt:e}"), *g, "", true))
        .collect();
    rows[0].threshold = "<= 5e-2".into();
    rows[0].pass = s.gaps[0] <= 5e-2;
    rows.push(row("oracle", "order", s.order, ">= 0.8", s.order >= 0.8));
    Ok(rows)
}

/// Moment stability under doubling the path count, and the linear case.
pub fn moments_suite(n_paths: usize) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    let cfg = ScenarioConfig::parse(builtin("moments_small").expect("shipped"))?;
    let mut scn = Scenario::build(cfg)?;
    scn.ensure_constants()?;
    let seed = scn.config.seed;
    let solve_z = |i: usize| -> Result<Option<f64>> {
        let run = scn.run_path(seed, i as u64, false)?;
        Ok(run.record.ok().map(|r| r.kato.znorm))
    };
    let z: Vec<Option<f64>> = stochvort::par::map_range(2 * n_paths, solve_z)
        .into_iter()
        .collect::<Result<_>>()?;
    let excluded = z.iter().filter(|v| v.is_none()).count();
    rows.push(row("moments", "exclusion rate", excluded as f64 / z.len() as f64, "", true));
    let half: Vec<f64> = z[..n_paths].iter().flatten().copied().collect();
    let full: Vec<f64> = z.iter().flatten().copied().collect();
    for r in [1.0, 2.0, 4.0] {
        let (a, b) = (moment(&half, r), moment(&full, r));
        let tol = 3.0 * (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
        rows.push(row(
            "moments",
            format!("moment r={r} shift {n_paths}->{}", 2 * n_paths),
            (b.estimate - a.estimate).abs(),
            format!("<= {tol:.6e}"),
            (b.estimate - a.estimate).abs() <= tol,
        ));
    }

    // Linear case: y = e^{tΔ}U₀ for every path, so Z = c |U₀|_{3/2}.
    let mut lin = scn.clone();
    lin.solver.nonlinear = false;
    lin.config.nonlinear = false;
    let unit = {
        let times = lin.solver.time_grid();
        let traj: Vec<_> = times
            .iter()
            .map(|&t| stochvort::operators::heat_semigroup(&lin.shape, t))
            .collect::<stochvort::Result<_>>()?;
        stochvort::solver::KatoTrajectory::evaluate(&traj, &times, &lin.solver.exponents)?.znorm
    };
    let lz: Vec<(f64, f64)> = stochvort::par::map_range(n_paths, |i| -> Result<(f64, f64)> {
        let run = lin.run_path(seed, i as u64, false)?;
        let direct = unit * lin.target_norm(&run.diagnostics);
        Ok((run.record?.kato.znorm, direct))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    for r in [1.0, 2.0, 4.0] {
        let mc: Vec<f64> = lz.iter().map(|v| v.0).collect();
        let direct: Vec<f64> = lz.iter().map(|v| v.1).collect();
        let (a, b) = (moment(&mc, r), moment(&direct, r));
        let tol = 1e-9 * b.estimate;
        rows.push(row(
            "moments",
            format!("linear moment r={r} vs direct"),
            (a.estimate - b.estimate).abs(),
            format!("<= {tol:.6e}"),
            (a.estimate - b.estimate).abs() <= tol,
        ));
    }
    Ok(rows)
}

/// `verify`: runs the selected suites and writes `report.csv`-style rows.
pub fn run_verify(suite: Suite, config: &ScenarioConfig, out: Option<&Path>) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    if matches!(suite, Suite::All | Suite::Estimates) {
        rows.extend(estimates_suite(100)?);
    }
    if matches!(suite, Suite::All | Suite::Oracle) {
        rows.extend(oracle_suite(config)?);
    }
    if matches!(suite, Suite::All | Suite::Moments) {
        rows.extend(moments_suite(config.mc_paths.clamp(2, 200))?);
    }
    if let Some(path) = out {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "suite,name,value,threshold,pass")?;
        for r in &rows {
            writeln!(w, "{},{},{},{},{}", r.suite, r.name, fmt17(r.value), r.threshold, r.pass)?;
        }
        w.flush()?;
    }
    let failed: Vec<&VerifyRow> = rows.iter().filter(|r| !r.pass).collect();
    if !failed.is_empty() {
        let names: Vec<String> = failed.iter().map(|r| r.name.clone()).collect();
        return Err(CliError::VerifyFailed(names.join("; ")));
    }
    Ok(rows)
}

/// Whether the configured data rule can apply to this scenario.
pub fn describe_scale(config: &ScenarioConfig) -> String {
    match config.u0_scale {
        U0Scale::Absolute(v) => format!("|U0|_3/2 = {v}"),
        U0Scale::RelativeToThreshold(f) => format!("|U0|_3/2 = {f} * C* / sup eta"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_node_picks_closest() {
        let t = [0.0, 0.01, 0.04, 0.09];
        assert_eq!(nearest_node(&t, 0.0), 0);
        assert_eq!(nearest_node(&t, 0.03), 2);
        assert_eq!(nearest_node(&t, 1.0), 3);
    }

    #[test]
    fn quantiles_of_small_sample() {
        assert_eq!(quantiles(&[4.0, 1.0, 3.0, 2.0, 5.0]), [1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn suite_names() {
        assert_eq!("oracle".parse::<Suite>().unwrap(), Suite::Oracle);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn load_config_needs_exactly_one_source() {
        assert!(matches!(load_config(None, None), Err(CliError::Usage(_))));
        assert!(matches!(load_config(None, Some("nope")), Err(CliError::Usage(_))));
        assert!(load_config(None, Some("kato_small")).is_ok());
    }
}
