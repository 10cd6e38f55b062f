use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stochvort::ensemble::band_limited;
use stochvort::field::{curl, divergence, lp_norm, to_physical, to_spectral};
use stochvort::operators::{biot_savart, heat_semigroup, nonlinearity_m};
use stochvort::{GridSpec, PhysicalVectorField, SpectralVectorField};

fn field(grid: GridSpec, kmax: usize, seed: u64) -> SpectralVectorField {
    band_limited(grid, kmax, true, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn rel(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_roundtrip(seed in any::<u64>(), kmax in 1usize..8) {
        let f = field(GridSpec::new(16, 2.0 * PI).unwrap(), kmax, seed);
        let back = to_spectral(&to_physical(&f)).unwrap();
        prop_assert!(rel(&back, &f) < 1e-13);
    }

    #[test]
    fn curl_inverts_biot_savart(seed in any::<u64>(), kmax in 1usize..8) {
        let u = field(GridSpec::new(16, 3.0).unwrap(), kmax, seed);
        let x = biot_savart(&u);
        prop_assert!(rel(&curl(&x), &u) < 1e-12);
        prop_assert!(divergence(&x).max_abs() <= 1e-13 * x.max_abs());
    }

    #[test]
    fn heat_semigroup_composes(seed in any::<u64>(), s in 0.0f64..0.5, t in 0.0f64..0.5) {
        let u = field(GridSpec::new(16, 2.0 * PI).unwrap(), 6, seed);
        let two = heat_semigroup(&heat_semigroup(&u, s).unwrap(), t).unwrap();
        let one = heat_semigroup(&u, s + t).unwrap();
        prop_assert!(two.sub(&one).unwrap().l2_norm() <= 1e-13 * u.l2_norm());
    }

    #[test]
    fn heat_contracts_lp(seed in any::<u64>(), t in 0.0f64..0.2, p in 1.5f64..4.0) {
        let u = field(GridSpec::new(16, 2.0 * PI).unwrap(), 5, seed);
        let before = lp_norm(&to_physical(&u), p).unwrap();
        let after = lp_norm(&to_physical(&heat_semigroup(&u, t).unwrap()), p).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-12));
    }

    #[test]
    fn nonlinearity_is_quadratic(seed in any::<u64>(), c in -3.0f64..3.0) {
        let u = field(GridSpec::new(16, 2.0 * PI).unwrap(), 4, seed);
        let scaled = nonlinearity_m(&u.scale(c));
        let expect = nonlinearity_m(&u).scale(c * c);
        prop_assert!(scaled.sub(&expect).unwrap().l2_norm() <= 1e-12 * expect.l2_norm().max(1e-300));
    }
}

/// Velocity `A(k)` of an ABC flow with wavenumber `k`; its curl is `k A(k)`.
fn abc(k: f64, [a, b, c]: [f64; 3], x: [f64; 3]) -> [f64; 3] {
    [
        a * (k * x[2]).sin() + c * (k * x[1]).cos(),
        b * (k * x[0]).sin() + a * (k * x[2]).cos(),
        c * (k * x[1]).sin() + b * (k * x[0]).cos(),
    ]
}

const C1: [f64; 3] = [1.0, 0.7, -0.4];
const C2: [f64; 3] = [0.3, -0.5, 0.8];

fn velocity(x: [f64; 3]) -> [f64; 3] {
    let (p, q) = (abc(1.0, C1, x), abc(2.0, C2, x));
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

fn vorticity(x: [f64; 3]) -> [f64; 3] {
    let (p, q) = (abc(1.0, C1, x), abc(2.0, C2, x));
    [p[0] + 2.0 * q[0], p[1] + 2.0 * q[1], p[2] + 2.0 * q[2]]
}

/// Fourth-order central difference of `f` along `axis`.
fn fd(f: fn([f64; 3]) -> [f64; 3], x: [f64; 3], axis: usize) -> [f64; 3] {
    let h = 1e-3;
    let at = |s: f64| {
        let mut y = x;
        y[axis] += s * h;
        f(y)
    };
    let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
    std::array::from_fn(|c| (m2[c] - 8.0 * m1[c] + 8.0 * p1[c] - p2[c]) / (12.0 * h))
}

#[test]
fn nonlinearity_matches_finite_differences() {
    let grid = GridSpec::standard();
    let u = to_spectral(&PhysicalVectorField::from_fn(grid, vorticity)).unwrap();
    let m = to_physical(&nonlinearity_m(&u));
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for idx in 0..grid.size() {
        let x = grid.point(idx);
        let (xv, uv) = (velocity(x), vorticity(x));
        let du: Vec<[f64; 3]> = (0..3).map(|a| fd(vorticity, x, a)).collect();
        let dx: Vec<[f64; 3]> = (0..3).map(|a| fd(velocity, x, a)).collect();
        for c in 0..3 {
            let adv: f64 = (0..3).map(|a| xv[a] * du[a][c]).sum();
            let stretch: f64 = (0..3).map(|a| uv[a] * dx[a][c]).sum();
            let expect = -(adv - stretch);
            err = err.max((m.component(c)[idx] - expect).abs());
            scale = scale.max(expect.abs());
        }
    }
    assert!(scale > 0.1, "test field degenerate");
    assert!(err <= 1e-8 * scale, "err {err:e} scale {scale:e}");
}

#[test]
fn single_mode_velocity_ratio() {
    // U = a cos(k·ξ) with a ⊥ k gives |K(U)| = |a| |sin(k·ξ)| / |k|, and over
    // whole periods |sin| and |cos| have the same L^p norm.
    let grid = GridSpec::standard();
    let k = [2.0, 1.0, 0.0];
    let a = [-1.0, 2.0, 3.0];
    let u = to_spectral(&PhysicalVectorField::from_fn(grid, |x| {
        let ph = (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).cos();
        [a[0] * ph, a[1] * ph, a[2] * ph]
    }))
    .unwrap();
    let x = to_physical(&biot_savart(&u));
    let kn = (k.iter().map(|v| v * v).sum::<f64>()).sqrt();
    for p in [1.5, 1.8, 2.0, 4.5] {
        let ratio = lp_norm(&x, p).unwrap() / lp_norm(&to_physical(&u), p).unwrap();
        assert!((ratio - 1.0 / kn).abs() < 1e-12, "p = {p}: {ratio}");
    }
}

#[test]
fn lp_norm_of_constant_magnitude() {
    let grid = GridSpec::new(8, 2.0).unwrap();
    let f = PhysicalVectorField::from_fn(grid, |_| [3.0, 0.0, 4.0]);
    // |f| = 5 on a box of volume 8.
    for p in [1.0, 1.5, 3.0] {
        let n = lp_norm(&f, p).unwrap();
        assert!((n - 5.0 * 8f64.powf(1.0 / p)).abs() < 1e-12);
    }
    assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 5.0);
}
