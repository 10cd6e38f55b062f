//! Periodic-box vector fields, the discrete Fourier transform pair, spectral
//! differential operators and Lᵖ norms by midpoint quadrature.
//!
//! Storage is row-major with ξ₃ fastest: the value at grid point
//! `(i, j, l)` lives at `(i * n + j) * n + l`. The forward transform divides
//! by n³, so coefficients are Fourier-series coefficients and the k = 0
//! coefficient is the spatial mean.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::par;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Uniform grid on the periodic box `[0, L)³` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n must be even and at least 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    /// Default desk-scale grid: `n = 32`, `L = 2π`.
    pub fn standard() -> Self {
        Self {
            n: 32,
            length: 2.0 * PI,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of grid points, n³.
    pub fn size(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight of one cell, `(L/n)³`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn k_unit(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed integer mode of a storage index, in `{−n/2+1, …, n/2}`.
    pub fn mode(&self, index: usize) -> i64 {
        let n = self.n as i64;
        let i = index as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Storage index of the reflected mode `−k`.
    pub fn reflect(&self, index: usize) -> usize {
        (self.n - index) % self.n
    }

    /// Physical wavenumber of a storage index.
    pub fn wavenumber(&self, index: usize) -> f64 {
        self.mode(index) as f64 * self.k_unit()
    }

    /// Wavenumber used by odd-order derivatives. The Nyquist mode has no
    /// partner under reflection, so its derivative multiplier is zero; this
    /// keeps derivatives of real fields real.
    pub fn derivative_wavenumber(&self, index: usize) -> f64 {
        if index == self.n / 2 {
            0.0
        } else {
            self.wavenumber(index)
        }
    }

    /// Splits a flat index into `(i, j, l)`.
    #[inline]
    pub fn unflatten(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    #[inline]
    pub fn flatten(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    /// Flat index of the mode `−k` for the mode stored at `idx`.
    pub fn reflect_flat(&self, idx: usize) -> usize {
        let (i, j, l) = self.unflatten(idx);
        self.flatten(self.reflect(i), self.reflect(j), self.reflect(l))
    }

    /// Derivative wavevector at a flat index.
    #[inline]
    pub fn kd_vec(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.unflatten(idx);
        [
            self.derivative_wavenumber(i),
            self.derivative_wavenumber(j),
            self.derivative_wavenumber(l),
        ]
    }

    /// `|k|²` at a flat index (Nyquist included), the Laplacian symbol.
    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let (i, j, l) = self.unflatten(idx);
        let (a, b, c) = (self.wavenumber(i), self.wavenumber(j), self.wavenumber(l));
        a * a + b * b + c * c
    }

    /// Coordinates of grid point `(i, j, l)`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.unflatten(idx);
        let h = self.spacing();
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    /// Whether the mode at `idx` survives 2/3-rule dealiasing.
    #[inline]
    pub fn keeps_mode(&self, idx: usize) -> bool {
        let (i, j, l) = self.unflatten(idx);
        let cut = (self.n / 3) as i64;
        self.mode(i).abs() <= cut && self.mode(j).abs() <= cut && self.mode(l).abs() <= cut
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "(n={}, L={}) vs (n={}, L={})",
                self.n, self.length, other.n, other.length
            )));
        }
        Ok(())
    }
}

/// Cached one-dimensional FFT plans for one axis length.
struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Unnormalized in-place 3D FFT over an `n³` buffer.
fn fft3(data: &mut [Complex64], n: usize, inverse: bool) {
    let p = plans(n);
    let fft = if inverse { &p.inverse } else { &p.forward };
    let plane = n * n;

    // ξ₃ lines are contiguous; ξ₂ lines are handled by transposing each plane.
    par::for_each_chunk_mut(data, plane, |_, chunk| {
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
        let mut t = vec![ZERO; plane];
        for j in 0..n {
            for l in 0..n {
                t[l * n + j] = chunk[j * n + l];
            }
        }
        fft.process_with_scratch(&mut t, &mut scratch);
        for l in 0..n {
            for j in 0..n {
                chunk[j * n + l] = t[l * n + j];
            }
        }
    });

    // ξ₁ lines: gather per ξ₂ slab, transform, scatter.
    let src: &[Complex64] = data;
    let slabs = par::map_range(n, |j| {
        let mut buf = vec![ZERO; plane];
        for i in 0..n {
            let row = (i * n + j) * n;
            for l in 0..n {
                buf[l * n + i] = src[row + l];
            }
        }
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        fft.process_with_scratch(&mut buf, &mut scratch);
        buf
    });
    for (j, buf) in slabs.into_iter().enumerate() {
        for i in 0..n {
            let row = (i * n + j) * n;
            for l in 0..n {
                data[row + l] = buf[l * n + i];
            }
        }
    }
}

/// `i k_axis F̂` for one coefficient array.
pub(crate) fn derivative_array(grid: &GridSpec, f: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n;
    let tab: Vec<f64> = (0..n).map(|i| grid.derivative_wavenumber(i)).collect();
    let mut out = Vec::with_capacity(f.len());
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let k = match axis {
                    0 => tab[i],
                    1 => tab[j],
                    _ => tab[l],
                };
                out.push(f[out.len()] * Complex64::new(0.0, k));
            }
        }
    }
    out
}

/// Flat index of `−k` for every flat index.
fn reflection_table(grid: &GridSpec) -> Vec<usize> {
    let n = grid.n;
    let mut out = Vec::with_capacity(grid.size());
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                out.push(grid.flatten(grid.reflect(i), grid.reflect(j), grid.reflect(l)));
            }
        }
    }
    out
}

/// Forward transforms of up to two real arrays with one complex FFT.
fn forward_real_pair(grid: &GridSpec, a: &[f64], b: Option<&[f64]>) -> (Vec<Complex64>, Option<Vec<Complex64>>) {
    let n = grid.n;
    let size = grid.size();
    let scale = 1.0 / size as f64;
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect(),
        None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    fft3(&mut z, n, false);
    match b {
        None => {
            for v in z.iter_mut() {
                *v *= scale;
            }
            // Enforce exact Hermitian symmetry.
            let mut out = z.clone();
            let refl = reflection_table(grid);
            for idx in 0..size {
                let r = refl[idx];
                out[idx] = (z[idx] + z[r].conj()) * 0.5;
            }
            (out, None)
        }
        Some(_) => {
            let mut fa = vec![ZERO; size];
            let mut fb = vec![ZERO; size];
            let refl = reflection_table(grid);
            for idx in 0..size {
                let zk = z[idx];
                let zr = z[refl[idx]].conj();
                fa[idx] = (zk + zr) * (0.5 * scale);
                fb[idx] = (zk - zr) * Complex64::new(0.0, -0.5 * scale);
            }
            (fa, Some(fb))
        }
    }
}

/// Inverse transforms of up to two Hermitian coefficient arrays with one
/// complex FFT; returns the real parts.
fn inverse_real_pair(n: usize, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut z: Vec<Complex64> = match b {
        Some(b) => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
            .collect(),
        None => a.to_vec(),
    };
    fft3(&mut z, n, true);
    match b {
        None => (z.iter().map(|v| v.re).collect(), None),
        Some(_) => (
            z.iter().map(|v| v.re).collect(),
            Some(z.iter().map(|v| v.im).collect()),
        ),
    }
}

/// Inverse-transforms a batch of Hermitian coefficient arrays, pairing them
/// two per complex FFT.
pub(crate) fn inverse_batch(grid: &GridSpec, arrays: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let pairs: Vec<(usize, Option<usize>)> = (0..arrays.len())
        .step_by(2)
        .map(|i| (i, if i + 1 < arrays.len() { Some(i + 1) } else { None }))
        .collect();
    let n = grid.n;
    let mut out = Vec::with_capacity(arrays.len());
    for (a, b) in pairs {
        let (x, y) = inverse_real_pair(n, arrays[a], b.map(|b| arrays[b]));
        out.push(x);
        if let Some(y) = y {
            out.push(y);
        }
    }
    out
}

/// Forward-transforms a batch of real arrays, two per complex FFT.
pub(crate) fn forward_batch(grid: &GridSpec, arrays: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(arrays.len());
    let mut i = 0;
    while i < arrays.len() {
        let b = arrays.get(i + 1).copied();
        let (x, y) = forward_real_pair(grid, arrays[i], b);
        out.push(x);
        if let Some(y) = y {
            out.push(y);
        }
        i += 2;
    }
    out
}

/// Real vector field sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalVectorField {
    grid: GridSpec,
    components: [Vec<f64>; 3],
}

impl PhysicalVectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let s = grid.size();
        Self {
            grid,
            components: [vec![0.0; s], vec![0.0; s], vec![0.0; s]],
        }
    }

    pub fn from_components(grid: GridSpec, components: [Vec<f64>; 3]) -> Result<Self> {
        for c in &components {
            if c.len() != grid.size() {
                return Err(Error::InvalidArgument(format!(
                    "component length {} does not match n³ = {}",
                    c.len(),
                    grid.size()
                )));
            }
        }
        Ok(Self { grid, components })
    }

    /// Samples `f(ξ)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.size() {
            let v = f(grid.point(idx));
            for c in 0..3 {
                out.components[c][idx] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.components
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.components
    }

    /// Euclidean magnitude at a flat index.
    #[inline]
    pub fn magnitude(&self, idx: usize) -> f64 {
        let [a, b, c] = &self.components;
        (a[idx] * a[idx] + b[idx] * b[idx] + c[idx] * c[idx]).sqrt()
    }

    pub fn check_finite(&self) -> Result<()> {
        for (component, c) in self.components.iter().enumerate() {
            if let Some(index) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { component, index });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.size())
            .map(|i| self.magnitude(i))
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (a, b) in out.components[c].iter_mut().zip(&other.components[c]) {
                *a -= *b;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (a, b) in out.components[c].iter_mut().zip(&other.components[c]) {
                *a += *b;
            }
        }
        Ok(out)
    }
}

/// Fourier coefficients of a real vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: GridSpec,
    components: [Vec<Complex64>; 3],
}

/// Fourier coefficients of a real scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalarField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl SpectralScalarField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_physical(&self) -> Vec<f64> {
        inverse_real_pair(self.grid.n, &self.data, None).0
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let s = grid.size();
        Self {
            grid,
            components: [vec![ZERO; s], vec![ZERO; s], vec![ZERO; s]],
        }
    }

    pub fn from_components(grid: GridSpec, components: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &components {
            if c.len() != grid.size() {
                return Err(Error::InvalidArgument(format!(
                    "component length {} does not match n³ = {}",
                    c.len(),
                    grid.size()
                )));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.components[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|v| v.re == 0.0 && v.im == 0.0))
    }

    /// Multiplies every component by a real symbol `s(idx)`.
    pub fn map_real_symbol(&self, symbol: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        out.apply_real_symbol(symbol);
        out
    }

    pub fn apply_real_symbol(&mut self, symbol: impl Fn(usize) -> f64) {
        for idx in 0..self.grid.size() {
            let s = symbol(idx);
            for c in 0..3 {
                self.components[c][idx] *= s;
            }
        }
    }

    /// Multiplies every component by a precomputed real symbol array.
    pub fn apply_symbol_slice(&mut self, symbol: &[f64]) {
        debug_assert_eq!(symbol.len(), self.grid.size());
        for c in 0..3 {
            for (v, s) in self.components[c].iter_mut().zip(symbol) {
                *v *= *s;
            }
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(a);
        out
    }

    pub fn scale_in_place(&mut self, a: f64) {
        for c in self.components.iter_mut() {
            for v in c.iter_mut() {
                *v *= a;
            }
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for c in 0..3 {
            for (x, y) in self.components[c].iter_mut().zip(&other.components[c]) {
                *x += *y * a;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(1.0, other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(-1.0, other);
        Ok(out)
    }

    /// Largest coefficient modulus over all components.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Continuum L² norm by Parseval: `|f|₂² = L³ Σ |F̂(k)|²`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self
            .components
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum();
        (s * self.grid.volume()).sqrt()
    }

    /// L² inner product `∫ f·g dξ` of the underlying real fields.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for c in 0..3 {
            for (a, b) in self.components[c].iter().zip(&other.components[c]) {
                s += (a * b.conj()).re;
            }
        }
        s * self.grid.volume()
    }

    /// Largest violation of `F̂(−k) = conj F̂(k)`, relative to `max |F̂|`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in &self.components {
            for idx in 0..self.grid.size() {
                let r = self.grid.reflect_flat(idx);
                worst = worst.max((c[idx] - c[r].conj()).norm());
            }
        }
        worst / scale
    }

    /// Zeroes every mode removed by the 2/3 rule.
    pub fn dealias(&mut self) {
        for idx in 0..self.grid.size() {
            if !self.grid.keeps_mode(idx) {
                for c in 0..3 {
                    self.components[c][idx] = ZERO;
                }
            }
        }
    }

    /// Mean mode (k = 0) of each component.
    pub fn mean(&self) -> [Complex64; 3] {
        [
            self.components[0][0],
            self.components[1][0],
            self.components[2][0],
        ]
    }

    /// Copies the coefficients onto a grid with a different resolution and
    /// the same box; modes not representable on the target are dropped.
    pub fn resample(&self, target: GridSpec) -> Result<Self> {
        if (target.length - self.grid.length).abs() > 0.0 {
            return Err(Error::GridMismatch("resample requires equal box length".into()));
        }
        let mut out = Self::zeros(target);
        let (ns, nt) = (self.grid.n as i64, target.n as i64);
        let lim = ns.min(nt) / 2;
        let wrap = |m: i64, n: i64| -> usize { ((m % n + n) % n) as usize };
        for idx in 0..self.grid.size() {
            let (i, j, l) = self.grid.unflatten(idx);
            let m = [self.grid.mode(i), self.grid.mode(j), self.grid.mode(l)];
            // Nyquist modes are dropped so the copy stays Hermitian.
            if m.iter().any(|&x| x.abs() >= lim) {
                continue;
            }
            let t = target.flatten(wrap(m[0], nt), wrap(m[1], nt), wrap(m[2], nt));
            for c in 0..3 {
                out.components[c][t] = self.components[c][idx];
            }
        }
        Ok(out)
    }
}

/// Forward transform; the k = 0 coefficient equals the spatial mean.
pub fn to_spectral(f: &PhysicalVectorField) -> Result<SpectralVectorField> {
    f.check_finite()?;
    let grid = f.grid;
    let [a, b, c] = &f.components;
    let mut out = forward_batch(&grid, &[a, b, c]).into_iter();
    Ok(SpectralVectorField {
        grid,
        components: [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()],
    })
}

/// Inverse transform.
pub fn to_physical(f: &SpectralVectorField) -> PhysicalVectorField {
    let grid = f.grid;
    let [a, b, c] = &f.components;
    let mut out = inverse_batch(&grid, &[a, b, c]).into_iter();
    PhysicalVectorField {
        grid,
        components: [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()],
    }
}

/// Scalar forward transform.
pub fn scalar_to_spectral(grid: &GridSpec, f: &[f64]) -> Result<SpectralScalarField> {
    if let Some(index) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { component: 0, index });
    }
    Ok(SpectralScalarField {
        grid: *grid,
        data: forward_real_pair(grid, f, None).0,
    })
}

/// Partial derivative `D_axis`, axis in `{0, 1, 2}` for ξ₁, ξ₂, ξ₃.
pub fn partial_derivative(f: &SpectralVectorField, axis: usize) -> Result<SpectralVectorField> {
    if axis > 2 {
        return Err(Error::InvalidArgument(format!("axis {axis} not in 0..3")));
    }
    let g = f.grid;
    let mut out = f.clone();
    for idx in 0..g.size() {
        let k = g.kd_vec(idx)[axis];
        let m = Complex64::new(0.0, k);
        for c in 0..3 {
            out.components[c][idx] *= m;
        }
    }
    Ok(out)
}

/// `curl F`, multiplier `i k × F̂(k)`.
pub fn curl(f: &SpectralVectorField) -> SpectralVectorField {
    let g = f.grid;
    let mut out = SpectralVectorField::zeros(g);
    let [a, b, c] = &f.components;
    for idx in 0..g.size() {
        let k = g.kd_vec(idx);
        let (x, y, z) = (a[idx], b[idx], c[idx]);
        let i = Complex64::new(0.0, 1.0);
        out.components[0][idx] = i * (k[1] * z - k[2] * y);
        out.components[1][idx] = i * (k[2] * x - k[0] * z);
        out.components[2][idx] = i * (k[0] * y - k[1] * x);
    }
    out
}

/// `∇·F`, multiplier `i k · F̂(k)`.
pub fn divergence(f: &SpectralVectorField) -> SpectralScalarField {
    let g = f.grid;
    let [a, b, c] = &f.components;
    let data = (0..g.size())
        .map(|idx| {
            let k = g.kd_vec(idx);
            Complex64::new(0.0, 1.0) * (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2])
        })
        .collect();
    SpectralScalarField { grid: g, data }
}

/// Gradient of a scalar spectral field as a vector field.
pub fn gradient(f: &SpectralScalarField) -> SpectralVectorField {
    let g = f.grid;
    let mut out = SpectralVectorField::zeros(g);
    for idx in 0..g.size() {
        let k = g.kd_vec(idx);
        for c in 0..3 {
            out.components[c][idx] = Complex64::new(0.0, k[c]) * f.data[idx];
        }
    }
    out
}

/// Lᵖ norm of the Euclidean magnitude by midpoint quadrature,
/// `(Σ |f(ξ)|ᵖ (L/n)³)^{1/p}`; `p = ∞` gives the maximum magnitude.
pub fn lp_norm(f: &PhysicalVectorField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let size = f.grid.size();
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let dv = f.grid.cell_volume();
    let sum: f64 = if p == 2.0 {
        (0..size)
            .map(|i| {
                let m = f.magnitude(i);
                m * m
            })
            .sum()
    } else {
        (0..size).map(|i| f.magnitude(i).powf(p)).sum()
    };
    Ok((sum * dv).powf(1.0 / p))
}

/// Lᵖ norm of a spectral field (inverse transform, then quadrature).
pub fn lp_norm_spectral(f: &SpectralVectorField, p: f64) -> Result<f64> {
    lp_norm(&to_physical(f), p)
}

/// `sup_i |D_i f|_p` for `i = 1, 2, 3`, together with the three values.
pub fn gradient_lp_norms(f: &SpectralVectorField, p: f64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (axis, slot) in out.iter_mut().enumerate() {
        *slot = lp_norm(&to_physical(&partial_derivative(f, axis)?), p)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: &PhysicalVectorField, b: &PhysicalVectorField) -> f64 {
        let d = a.sub(b).unwrap();
        lp_norm(&d, 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(6, 1.0).is_err());
        assert!(GridSpec::new(9, 1.0).is_err());
        assert!(GridSpec::new(8, 0.0).is_err());
        assert!(GridSpec::new(8, 1.0).is_ok());
    }

    #[test]
    fn wavenumbers_negate_under_reflection() {
        let g = GridSpec::new(16, 3.0).unwrap();
        for i in 0..16 {
            if i != 8 {
                assert_eq!(g.wavenumber(g.reflect(i)), -g.wavenumber(i));
            }
            assert_eq!(g.derivative_wavenumber(g.reflect(i)), -g.derivative_wavenumber(i));
        }
        assert_eq!(g.mode(8), 8);
        assert_eq!(g.mode(9), -7);
    }

    #[test]
    fn zero_field_zero_coefficients() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = to_spectral(&PhysicalVectorField::zeros(g)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn single_cosine_has_two_half_coefficients() {
        let g = GridSpec::new(16, 2.5).unwrap();
        let kl = g.k_unit();
        let f = PhysicalVectorField::from_fn(g, |x| [(kl * x[0]).cos(), 0.0, 0.0]);
        let s = to_spectral(&f).unwrap();
        let plus = g.flatten(1, 0, 0);
        let minus = g.flatten(15, 0, 0);
        for idx in 0..g.size() {
            let v = s.component(0)[idx];
            if idx == plus || idx == minus {
                assert!((v.re - 0.5).abs() < 1e-14 && v.im.abs() < 1e-14);
            } else {
                assert!(v.norm() < 1e-14, "idx {idx}: {v}");
            }
        }
        assert!(s.component(1).iter().chain(s.component(2)).all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn mean_is_zero_mode() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = PhysicalVectorField::from_fn(g, |x| [2.0 + x[0].sin(), -1.5, 0.25]);
        let s = to_spectral(&f).unwrap();
        let mean: f64 = f.component(0).iter().sum::<f64>() / g.size() as f64;
        assert!((s.mean()[0].re - mean).abs() < 1e-13 * mean.abs());
        assert!((s.mean()[1].re + 1.5).abs() < 1e-14);
    }

    #[test]
    fn roundtrip_is_identity() {
        for &n in &[8usize, 16, 32] {
            let g = GridSpec::new(n, 2.0 * PI).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let f = ensemble::white_noise(g, &mut rng);
            let back = to_physical(&to_spectral(&f).unwrap());
            assert!(rel_err(&back, &f) < 1e-12);
        }
    }

    #[test]
    fn non_finite_rejected() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let mut c = PhysicalVectorField::zeros(g).into_components();
        c[1][5] = f64::NAN;
        let f = PhysicalVectorField::from_components(g, c).unwrap();
        assert!(matches!(
            to_spectral(&f),
            Err(Error::NonFinite { component: 1, index: 5 })
        ));
    }

    #[test]
    fn derivative_of_sine() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let f = PhysicalVectorField::from_fn(g, |x| [0.0, x[0].sin(), 0.0]);
        let d = to_physical(&partial_derivative(&to_spectral(&f).unwrap(), 0).unwrap());
        let expect = PhysicalVectorField::from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
        assert!(d.sub(&expect).unwrap().max_abs() < 1e-13);
        assert!(partial_derivative(&to_spectral(&f).unwrap(), 3).is_err());
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = to_spectral(&PhysicalVectorField::from_fn(g, |_| [1.0, 2.0, 3.0])).unwrap();
        for axis in 0..3 {
            assert!(partial_derivative(&f, axis).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn curl_of_cosine() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let f = to_spectral(&PhysicalVectorField::from_fn(g, |x| [0.0, 0.0, x[0].cos()])).unwrap();
        let c = to_physical(&curl(&f));
        let expect = PhysicalVectorField::from_fn(g, |x| [0.0, x[0].sin(), 0.0]);
        assert!(c.sub(&expect).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn constant_field_norm() {
        let g = GridSpec::new(8, 1.7).unwrap();
        let f = PhysicalVectorField::from_fn(g, |_| [3.0, 0.0, 4.0]);
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            let expect = 5.0 * 1.7f64.powf(3.0 / p);
            assert!((lp_norm(&f, p).unwrap() - expect).abs() < 1e-12 * expect);
        }
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 5.0);
        assert!(lp_norm(&f, 0.5).is_err());
        assert_eq!(lp_norm(&PhysicalVectorField::zeros(g), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn resample_roundtrip() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = ensemble::band_limited(g, 4, false, &mut rng);
        let up = f.resample(GridSpec::new(32, 2.0 * PI).unwrap()).unwrap();
        let down = up.resample(g).unwrap();
        assert!(down.sub(&f).unwrap().max_abs() < 1e-15);
        assert!((up.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }
}
