use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stochvort::ensemble::band_limited;
use stochvort::noise::{BrownianPaths, GammaMultiplier, NoiseDiagnostics};
use stochvort::operators::{heat_semigroup, Kernel, NoiseModel};
use stochvort::solver::picard::mild_map;
use stochvort::solver::{
    beta_constants, duhamel_f, graded_grid, picard_solve, smallness_check, Constants, Gate, Integrand, SolverConfig,
};
use stochvort::verify::{exponential_euler, sup_relative_gap};
use stochvort::{Error, GridSpec, SpectralVectorField};

fn grid() -> GridSpec {
    GridSpec::new(16, 2.0 * PI).unwrap()
}

fn model(grid: GridSpec) -> NoiseModel {
    NoiseModel::new(grid, &[(Kernel::Gaussian { eps: 0.5, mass: 1.0 }, 2.0)]).unwrap()
}

fn data(grid: GridSpec, amplitude: f64, seed: u64) -> SpectralVectorField {
    let f = band_limited(grid, 3, true, &mut ChaCha8Rng::seed_from_u64(seed));
    f.scale(amplitude / f.l2_norm())
}

/// A smooth stand-in for a Brownian path, usable at any time.
fn smooth_beta(t: f64) -> f64 {
    (7.0 * t).sin() - 0.5 * t
}

fn smooth_paths(times: &[f64]) -> BrownianPaths {
    BrownianPaths::from_values(times, vec![times.iter().map(|&t| smooth_beta(t)).collect()]).unwrap()
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton's method.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    return (x, 2.0 / ((1.0 - x * x) * dp * dp));
                }
            }
        })
        .collect()
}

#[test]
fn duhamel_matches_gauss_legendre() {
    let g = grid();
    let m = model(g);
    let u0 = data(g, 2.0, 3);
    let horizon = 0.1;
    let times = graded_grid(horizon, 64, 2.0);
    let paths = smooth_paths(&times);
    let z: Vec<_> = times.iter().map(|&t| heat_semigroup(&u0, t).unwrap()).collect();
    let integrand = Integrand::new(Some(GammaMultiplier::new(&m, &paths).unwrap()), true);
    let got = duhamel_f(&z, &times, &integrand, horizon).unwrap();

    // ∫₀ᵀ e^{(T−s)Δ} N(s) ds with N evaluated off the grid.
    let rule = gauss_legendre(8);
    let panels = 16;
    let mut expect = SpectralVectorField::zeros(g);
    for panel in 0..panels {
        let (a, b) = (horizon * panel as f64 / panels as f64, horizon * (panel + 1) as f64 / panels as f64);
        for &(x, w) in &rule {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let p = smooth_paths(&[0.0, s]);
            let n = Integrand::new(Some(GammaMultiplier::new(&m, &p).unwrap()), true)
                .eval(1, &heat_semigroup(&u0, s).unwrap());
            expect.axpy(0.5 * (b - a) * w, &heat_semigroup(&n, horizon - s).unwrap());
        }
    }
    let rel = got.sub(&expect).unwrap().l2_norm() / expect.l2_norm();
    assert!(rel <= 1e-4, "relative error {rel:e}");
}

#[test]
fn duhamel_is_quadratic() {
    let g = grid();
    let m = model(g);
    let times = graded_grid(0.05, 16, 2.0);
    let paths = BrownianPaths::sample(9, &times, 1).unwrap();
    let integrand = Integrand::new(Some(GammaMultiplier::new(&m, &paths).unwrap()), true);
    let z: Vec<_> = times
        .iter()
        .map(|&t| heat_semigroup(&data(g, 1.0, 5), t).unwrap())
        .collect();
    let f1 = duhamel_f(&z, &times, &integrand, 0.05).unwrap();
    for c in [-2.0, 0.5, 3.0] {
        let zc: Vec<_> = z.iter().map(|f| f.scale(c)).collect();
        let fc = duhamel_f(&zc, &times, &integrand, 0.05).unwrap();
        let gap = fc.sub(&f1.scale(c * c)).unwrap().l2_norm();
        assert!(gap <= 1e-12 * c * c * f1.l2_norm(), "c = {c}: {gap:e}");
    }
    assert!(matches!(duhamel_f(&z, &times, &integrand, 0.0123), Err(Error::OffGrid(_))));
}

fn cfg(nonlinear: bool) -> SolverConfig {
    let mut c = SolverConfig::new(1.8, 0.04, 32).unwrap();
    c.nonlinear = nonlinear;
    c.probe = false;
    c
}

#[test]
fn linear_picard_is_heat_flow() {
    let g = grid();
    let m = model(g);
    let u0 = data(g, 5.0, 1);
    let c = cfg(false);
    let paths = BrownianPaths::sample(2, &c.time_grid(), 1).unwrap();
    let rec = picard_solve(&u0, &m, &paths, &c, Gate::Override).unwrap();
    assert!(rec.iterations <= 1);
    for (y, &t) in rec.y.iter().zip(&rec.times) {
        let heat = heat_semigroup(&u0, t).unwrap();
        assert!(y.sub(&heat).unwrap().l2_norm() <= 1e-14 * u0.l2_norm());
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let g = grid();
    let m = model(g);
    let c = cfg(true);
    let paths = BrownianPaths::sample(4, &c.time_grid(), 1).unwrap();
    let rec = picard_solve(&SpectralVectorField::zeros(g), &m, &paths, &c, Gate::Override).unwrap();
    assert!(rec.y.iter().all(|y| y.is_zero()));
    assert_eq!(rec.kato.znorm, 0.0);
}

#[test]
fn picard_fixed_point_satisfies_mild_equation() {
    let g = grid();
    let m = model(g);
    let u0 = data(g, 3.0, 8);
    let mut c = cfg(true);
    c.tol = 1e-12;
    c.max_iter = 30;
    let paths = BrownianPaths::sample(6, &c.time_grid(), 1).unwrap();
    let rec = picard_solve(&u0, &m, &paths, &c, Gate::Override).unwrap();
    assert!(rec.ratios.iter().all(|&r| r < 1.0), "{:?}", rec.ratios);
    let integrand = Integrand::new(Some(GammaMultiplier::new(&m, &paths).unwrap()), true);
    let image = mild_map(&u0, &rec.y, &rec.times, &integrand).unwrap();
    let a: Vec<_> = image.iter().collect();
    let b: Vec<_> = rec.y.iter().collect();
    assert!(sup_relative_gap(&a, &b).unwrap() <= 1e-10);
    assert!(rec.mild_residual <= 1e-10);
}

#[test]
fn exponential_euler_approaches_picard() {
    let g = grid();
    let m = model(g);
    let u0 = data(g, 3.0, 8);
    let mut c = cfg(true);
    c.grading = 1.0;
    c.intervals = 256;
    c.tol = 1e-12;
    c.max_iter = 30;
    let paths = BrownianPaths::sample(6, &c.time_grid(), 1).unwrap();
    let rec = picard_solve(&u0, &m, &paths, &c, Gate::Override).unwrap();
    let gap = |stride: usize| {
        let idx: Vec<usize> = (0..=256).step_by(stride).collect();
        let coarse = paths.restrict(&idx).unwrap();
        let ee = exponential_euler(&u0, &m, &coarse, true, 1).unwrap();
        let a: Vec<_> = ee.iter().map(|(_, y)| y).collect();
        let b: Vec<_> = idx.iter().map(|&i| &rec.y[i]).collect();
        sup_relative_gap(&a, &b).unwrap()
    };
    let (g1, g2) = (gap(16), gap(8));
    assert!(g2 < g1, "{g1:e} {g2:e}");
    assert!(g1 < 5e-2);
}

#[test]
fn smallness_gate_refuses_large_data() {
    let g = grid();
    let m = model(g);
    let c = cfg(true);
    let paths = BrownianPaths::sample(2, &c.time_grid(), 1).unwrap();
    let diag = NoiseDiagnostics::compute(&GammaMultiplier::new(&m, &paths).unwrap());
    let constants = Constants::from_c1_c2(0.35, 1.5e-3);
    let u0 = data(g, 1e4, 2);
    let report = smallness_check(&u0, &diag, &c, constants).unwrap();
    assert!(!report.admits());
    let err = picard_solve(&u0, &m, &paths, &c, Gate::Checked(&report)).unwrap_err();
    assert!(matches!(err, Error::SmallnessRefused(_)));
}

/// `B(a, b)` by Simpson's rule after substitutions that remove both
/// endpoint singularities.
fn beta_quadrature(a: f64, b: f64) -> f64 {
    // ∫₀^{1/2} t^{a−1}(1−t)^{b−1} dt = (1/a) ∫₀^{2^{−a}} (1 − u^{1/a})^{b−1} du.
    let half = |a: f64, b: f64| {
        let top = 0.5f64.powf(a);
        let n = 200_000;
        let h = top / n as f64;
        let f = |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0);
        let mut s = f(0.0) + f(top);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0 / a
    };
    half(a, b) + half(b, a)
}

#[test]
fn beta_constants_at_reference_exponent() {
    let b = beta_constants(1.8).unwrap();
    assert!((b.first - beta_quadrature(1.0 / 6.0, 2.0 / 3.0)).abs() < 1e-9);
    assert!((b.second - beta_quadrature(1.0 / 6.0, 1.0 / 6.0)).abs() < 1e-9);
    assert!((b.first - 6.67747604713384).abs() < 1e-12);
    assert!((b.second - 11.5657277799600).abs() < 1e-11);
}

#[test]
fn beta_constant_diverges_near_three_halves() {
    let err = beta_constants(1.5).unwrap_err().to_string();
    assert!(err.contains("second"), "{err}");
    let near = beta_constants(1.5 + 1e-6).unwrap();
    assert!(near.second > 1e5);
}
