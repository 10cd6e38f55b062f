//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use stochvort::ensemble::band_limited;
use stochvort::field::{curl, to_physical};
use stochvort::noise::{hitting_law_exact, hitting_law_mc};
use stochvort::operators::biot_savart;
use stochvort::presets::rescale_norm32;
use stochvort::solver::diagnostics::{max_relative_divergence, trajectory_distance};
use stochvort::solver::{picard_solve, Gate, SolutionRecord};
use stochvort::verify::{check_heat_smoothing, HeatSmoothingSetup};
use stochvort::GridSpec;

use vmlab::config::{builtin, ScenarioConfig};
use vmlab::oracle::oracle_study;
use vmlab::run::{run_mc, run_solve};
use vmlab::Scenario;

type Outcome = Result<(bool, String), String>;

struct Runner {
    failures: usize,
}

impl Runner {
    fn check(&mut self, id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok((pass, detail)) => {
                let in_time = limit.is_none_or(|l| elapsed <= l);
                let note = if in_time { detail } else { format!("{detail}; over time limit {limit:?}") };
                (pass && in_time, note)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn kato_small() -> ScenarioConfig {
    ScenarioConfig::parse(builtin("kato_small").unwrap()).unwrap()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn main() {
    let mut r = Runner { failures: 0 };
    let minute = Duration::from_secs(60);

    r.check(1, "Biot-Savart inversion", Some(Duration::from_secs(10)), || {
        let grid = GridSpec::standard();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2024);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let u = band_limited(grid, 15, true, &mut rng);
            let back = curl(&biot_savart(&u));
            worst = worst.max(back.sub(&u).unwrap().l2_norm() / u.l2_norm());
        }
        Ok((worst <= 1e-12, format!("max relative L2 error {worst:.3e} over 100 fields")))
    });

    r.check(2, "heat-smoothing exponents", Some(minute), || {
        let setup = HeatSmoothingSetup::default();
        let mut pass = true;
        let mut detail = Vec::new();
        for (q, p, d) in [(1.5, 3.0, false), (9.0 / 7.0, 1.8, false), (2.0, 2.0, true)] {
            let rep = check_heat_smoothing(q, p, d, &setup).map_err(|e| e.to_string())?;
            pass &= rep.pass;
            detail.push(format!("({q:.4},{p}{}) {:.4} vs {:.4}", if d { ",D" } else { "" }, rep.fitted_slope, rep.predicted_slope));
        }
        Ok((pass, detail.join("; ")))
    });

    r.check(3, "hitting law", Some(minute), || {
        let est = hitting_law_mc(1.0, 2.0, 50.0, 50_000, 10_000, 1).map_err(|e| e.to_string())?;
        let exact = hitting_law_exact(1.0, 2.0);
        let gap = (est.estimate - exact).abs();
        Ok((gap <= 0.02, format!("estimate {:.4} +- {:.4}, exact {exact}", est.estimate, est.stderr)))
    });

    r.check(4, "eta dominance", None, || {
        let scn = Scenario::build(kato_small()).map_err(|e| e.to_string())?;
        let mut failures = 0;
        let mut worst = 0.0f64;
        for i in 0..100 {
            let paths = scn.paths(scn.config.seed, i).map_err(|e| e.to_string())?;
            let diag = scn.diagnostics(&paths).map_err(|e| e.to_string())?;
            for e in &diag.eta {
                worst = worst.max(e.exact_l2 / e.analytic_bound);
                if e.exact_l2 > e.analytic_bound {
                    failures += 1;
                }
            }
        }
        Ok((failures == 0, format!("{failures} violations on 100 paths, max exact/analytic {worst:.3e}")))
    });

    let dir1 = tempfile::tempdir().unwrap();
    let mut solved: Option<SolutionRecord> = None;
    r.check(5, "Picard convergence on kato_small", Some(5 * minute), || {
        let s = run_solve(kato_small(), None, dir1.path(), false).map_err(|e| e.to_string())?;
        let rec = s.record;
        let ratios_ok = rec.ratios.iter().all(|&q| q < 1.0);
        let pass = ratios_ok && rec.iterations <= 12 && rec.mild_residual <= 1e-5;
        let detail = format!(
            "{} iterations, ratios {:?}, mild residual {:.3e}",
            rec.iterations,
            rec.ratios.iter().map(|q| format!("{q:.2e}")).collect::<Vec<_>>(),
            rec.mild_residual
        );
        solved = Some(rec);
        Ok((pass, detail))
    });

    r.check(6, "oracle equivalence", Some(10 * minute), || {
        let cfg = kato_small();
        let seed = cfg.seed;
        let scn = Scenario::build(cfg).map_err(|e| e.to_string())?;
        let s = oracle_study(&scn, seed, &[1e-3, 5e-4, 2.5e-4], 4).map_err(|e| e.to_string())?;
        let pass = s.gaps[0] <= 5e-2 && s.order >= 0.8;
        Ok((pass, format!("gaps {:.3e} {:.3e} {:.3e}, order {:.3}", s.gaps[0], s.gaps[1], s.gaps[2], s.order)))
    });

    r.check(7, "Lipschitz data dependence", Some(10 * minute), || {
        let rec = solved.as_ref().ok_or("criterion 5 produced no solution")?;
        let scn = Scenario::build(kato_small()).map_err(|e| e.to_string())?;
        let u0 = rec.y[0].clone();
        let norm = stochvort::field::lp_norm(&to_physical(&u0), 1.5).map_err(|e| e.to_string())?;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(77);
        let w = band_limited(scn.grid, 4, true, &mut rng);
        let w = rescale_norm32(&w, 0.1 * norm).map_err(|e| e.to_string())?;
        let solve = |scale: f64| {
            let mut v = u0.clone();
            v.axpy(scale, &w);
            picard_solve(&v, rec.model(), rec.paths(), &scn.solver, Gate::Override).map_err(|e| e.to_string())
        };
        let (full, half) = (solve(1.0)?, solve(0.5)?);
        let e = &scn.solver.exponents;
        let d1 = trajectory_distance(&full.y, &rec.y, &rec.times, e).map_err(|e| e.to_string())?;
        let d2 = trajectory_distance(&half.y, &rec.y, &rec.times, e).map_err(|e| e.to_string())?;
        let ratio = d1 / d2;
        Ok(((ratio - 2.0).abs() <= 0.4, format!("Z distances {d1:.4e} / {d2:.4e} = {ratio:.4}")))
    });

    r.check(8, "divergence-free propagation", None, || {
        let rec = solved.as_ref().ok_or("criterion 5 produced no solution")?;
        let d = max_relative_divergence(rec);
        let worst = d.iter().copied().fold(0.0, f64::max);
        Ok((worst <= 1e-10, format!("max relative divergence y {:.2e}, U {:.2e}, X {:.2e}", d[0], d[1], d[2])))
    });

    r.check(9, "tail bound consistency", None, || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cfg = ScenarioConfig::parse(builtin("tail").unwrap()).map_err(|e| e.to_string())?;
        let s = run_mc(cfg, Some(400), None, dir.path()).map_err(|e| e.to_string())?;
        let pass = s.tail.len() == 3 && s.tail.iter().all(|t| t.pass);
        let detail: Vec<String> = s
            .tail
            .iter()
            .map(|t| format!("r={} fraction {:.3} bound {:.3}", t.r, t.fraction_analytic, t.bound))
            .collect();
        Ok((pass, detail.join("; ")))
    });

    r.check(10, "determinism", None, || {
        let dir2 = tempfile::tempdir().map_err(|e| e.to_string())?;
        run_solve(kato_small(), None, dir2.path(), false).map_err(|e| e.to_string())?;
        let (a, b) = (csv_files(dir1.path()), csv_files(dir2.path()));
        let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
        let pass = !a.is_empty() && a == b;
        Ok((pass, format!("{} CSV files compared: {}", a.len(), names.join(", "))))
    });

    if r.failures > 0 {
        println!("{} acceptance criteria failed", r.failures);
        std::process::exit(1);
    }
}
