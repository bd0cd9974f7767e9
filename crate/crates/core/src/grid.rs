//! Periodic grids on `[-L, L)^d`, sampled fields and their spectra.
//!
//! Grid points are `x_j = -L + j * 2L/N` along each axis; the last axis is
//! the weight coordinate `t`. Frequencies are `xi_j = pi * j / L` for signed
//! `j` in `[-N/2, N/2)`, stored in FFT order. The transform is unitary and
//! phase-referenced to the physical origin:
//!
//! `F_j = N^{-d/2} sum_n f(x_n) exp(-i xi_j . x_n)`
//!
//! so a Kronecker delta at `x = 0` has a constant spectrum.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{param, Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// A validated periodic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    n: usize,
}

impl GridSpec {
    /// Validates `d in {1,2}`, `N >= 8` a power of two, and `L > 0`.
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return param(format!("d must be 1 or 2, got {dim}"));
        }
        if !n.is_power_of_two() {
            return param(format!("N must be power of two, got {n}"));
        }
        if n < 8 {
            return param(format!("N must be at least 8, got {n}"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return param(format!("L must be positive and finite, got {half_width}"));
        }
        Ok(Self { dim, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points `N^d`.
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Largest lattice frequency `pi N / (2L)`.
    pub fn xi_max(&self) -> f64 {
        PI * self.n as f64 / (2.0 * self.half_width)
    }

    /// Coordinate of sample `j` along any axis.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Per-axis sample indices of a flat index (`[i0, i1]`, unused slot is 0).
    pub fn axes(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Coordinates of a flat index; for `d = 1` only the first slot is used.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let a = self.axes(idx);
        [self.coord(a[0]), self.coord(a[1])]
    }

    /// The weight coordinate `t` (last axis) of a flat index.
    pub fn last_coord(&self, idx: usize) -> f64 {
        if self.dim == 1 {
            self.coord(idx)
        } else {
            self.coord(idx % self.n)
        }
    }

    /// Signed frequency index of FFT-ordered position `j`.
    pub fn signed_index(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// FFT-ordered position of a signed frequency index.
    pub fn fft_position(&self, signed: i64) -> usize {
        signed.rem_euclid(self.n as i64) as usize
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        PI * self.signed_index(j) as f64 / self.half_width
    }

    /// Frequency vector of a flat spectral index.
    pub fn frequency(&self, idx: usize) -> [f64; 2] {
        let a = self.axes(idx);
        if self.dim == 1 {
            [self.wavenumber(a[0]), 0.0]
        } else {
            [self.wavenumber(a[0]), self.wavenumber(a[1])]
        }
    }

    /// `|xi|` at every spectral index.
    pub fn frequency_norms(&self) -> Vec<f64> {
        (0..self.points())
            .map(|i| {
                let xi = self.frequency(i);
                (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
            })
            .collect()
    }
}

/// `make_grid(d, L, N)`.
pub fn make_grid(dim: usize, half_width: f64, n: usize) -> Result<GridSpec> {
    GridSpec::new(dim, half_width, n)
}

fn check_r(r_value: f64) -> Result<()> {
    if r_value >= 1.0 {
        Ok(())
    } else {
        param(format!("value-space exponent must lie in [1, inf], got {r_value}"))
    }
}

/// `l^r` norm of a vector given by its entries' moduli.
pub(crate) fn lr_norm(moduli: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        moduli.fold(0.0, f64::max)
    } else if r == 1.0 {
        moduli.sum()
    } else if r == 2.0 {
        moduli.map(|a| a * a).sum::<f64>().sqrt()
    } else {
        moduli.map(|a| a.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// A function `R^d -> C^n` sampled on a grid. The value space is `C^n`
/// normed by `l^{r_value}`. Values are stored component-major:
/// `values[c * N^d + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    n: usize,
    r_value: f64,
    values: Vec<Complex64>,
}

/// Spectrum of a [`SampledField`] on the frequency lattice, same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    n: usize,
    r_value: f64,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: GridSpec, n: usize, r_value: f64, values: Vec<Complex64>) -> Result<Self> {
        check_r(r_value)?;
        if n == 0 {
            return param("value dimension must be at least 1");
        }
        if values.len() != n * grid.points() {
            return param(format!("expected {} values, got {}", n * grid.points(), values.len()));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("field entry {i}")));
        }
        Ok(Self {
            grid,
            n,
            r_value,
            values,
        })
    }

    pub fn zeros(grid: GridSpec, n: usize, r_value: f64) -> Self {
        Self {
            grid,
            n,
            r_value,
            values: vec![Complex64::new(0.0, 0.0); n * grid.points()],
        }
    }

    /// Scalar field from a function of the point coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let values = (0..grid.points())
            .map(|i| {
                let x = grid.point(i);
                f(&x[..grid.dim()])
            })
            .collect();
        Self::new(grid, 1, 2.0, values)
    }

    /// Real scalar field from a function of the point coordinates.
    pub fn from_real_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Stacks scalar fields into a `C^n`-valued field with value norm `l^r`.
    /// Scalar real field from values in flat grid order.
    pub fn from_real_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(
            grid,
            1,
            2.0,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn stack(components: &[SampledField], r_value: f64) -> Result<Self> {
        check_r(r_value)?;
        let first = components
            .first()
            .ok_or_else(|| Error::Parameter("cannot stack zero components".into()))?;
        let mut values = Vec::with_capacity(components.len() * first.grid.points());
        for c in components {
            if c.grid != first.grid {
                return Err(Error::GridMismatch("stacked components differ in grid".into()));
            }
            if c.n != 1 {
                return param("stacked components must be scalar");
            }
            values.extend_from_slice(&c.values);
        }
        Self::new(first.grid, components.len(), r_value, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Value dimension `n`.
    pub fn components(&self) -> usize {
        self.n
    }

    pub fn r_value(&self) -> f64 {
        self.r_value
    }

    pub fn with_r_value(mut self, r_value: f64) -> Result<Self> {
        check_r(r_value)?;
        self.r_value = r_value;
        Ok(self)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let p = self.grid.points();
        &self.values[c * p..(c + 1) * p]
    }

    /// Value at flat index `i` of component `c`.
    pub fn at(&self, c: usize, i: usize) -> Complex64 {
        self.values[c * self.grid.points() + i]
    }

    /// Pointwise value-space norm `||f(x_i)||`.
    pub fn value_norms(&self) -> Vec<f64> {
        let p = self.grid.points();
        (0..p)
            .map(|i| lr_norm((0..self.n).map(|c| self.values[c * p + i].norm()), self.r_value))
            .collect()
    }

    /// Grid supremum of the value norm.
    pub fn sup_norm(&self) -> f64 {
        self.value_norms().into_iter().fold(0.0, f64::max)
    }

    /// Largest entry modulus, component-wise.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        if self.n != other.n {
            return Err(Error::GridMismatch(format!(
                "value dimensions {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: Complex64, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        debug_assert!(self.grid == other.grid && self.n == other.n);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| alpha * v).collect(),
            ..self.clone()
        }
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        self.scale(Complex64::new(alpha, 0.0))
    }

    /// Profile along the last axis at the central `x'` row (the field itself for `d = 1`).
    pub fn last_axis_profile(&self) -> Result<SampledField> {
        if self.grid.dim() == 1 {
            return Ok(self.clone());
        }
        let g1 = GridSpec::new(1, self.grid.half_width(), self.grid.n())?;
        let n = self.grid.n();
        let row = n / 2;
        let p = self.grid.points();
        let mut values = Vec::with_capacity(self.n * n);
        for c in 0..self.n {
            values.extend_from_slice(&self.values[c * p + row * n..c * p + (row + 1) * n]);
        }
        SampledField::new(g1, self.n, self.r_value, values)
    }
}

impl SpectralField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let p = self.grid.points();
        &self.values[c * p..(c + 1) * p]
    }

    /// Builds a spectrum directly (FFT-ordered, component-major).
    pub fn new(grid: GridSpec, n: usize, r_value: f64, values: Vec<Complex64>) -> Result<Self> {
        check_r(r_value)?;
        if values.len() != n * grid.points() {
            return param("spectrum length does not match grid");
        }
        Ok(Self {
            grid,
            n,
            r_value,
            values,
        })
    }

    /// Multiplies every component by a real symbol given on the lattice.
    pub fn multiplied(&self, symbol: &[f64]) -> Self {
        let p = self.grid.points();
        debug_assert_eq!(symbol.len(), p);
        let mut values = self.values.clone();
        for c in 0..self.n {
            for (v, s) in values[c * p..(c + 1) * p].iter_mut().zip(symbol) {
                *v *= s;
            }
        }
        Self { values, ..self.clone() }
    }

    /// Fraction of spectral `l^2` energy (as a norm ratio) at lattice points
    /// where `inside(|xi|)` is false. Zero spectra report 0.
    pub fn mass_outside(&self, inside: impl Fn(f64) -> bool) -> f64 {
        let norms = self.grid.frequency_norms();
        let p = self.grid.points();
        let (mut total, mut out) = (0.0, 0.0);
        for c in 0..self.n {
            for i in 0..p {
                let e = self.values[c * p + i].norm_sqr();
                total += e;
                if !inside(norms[i]) {
                    out += e;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            (out / total).sqrt()
        }
    }
}

fn transform_component(data: &mut [Complex64], grid: &GridSpec, inverse: bool) {
    let n = grid.n();
    let fft = plan(n, inverse);
    if grid.dim() == 1 {
        fft.process(data);
        return;
    }
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

fn origin_phase(grid: &GridSpec, idx: usize) -> f64 {
    let a = grid.axes(idx);
    let parity = if grid.dim() == 1 { a[0] } else { a[0] + a[1] };
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unitary forward transform.
pub fn dft(f: &SampledField) -> Result<SpectralField> {
    if let Some(i) = f.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(format!("field entry {i}")));
    }
    let grid = f.grid;
    let p = grid.points();
    let norm = 1.0 / (p as f64).sqrt();
    let mut values = f.values.clone();
    for c in 0..f.n {
        let slice = &mut values[c * p..(c + 1) * p];
        transform_component(slice, &grid, false);
        for (i, v) in slice.iter_mut().enumerate() {
            *v *= norm * origin_phase(&grid, i);
        }
    }
    Ok(SpectralField {
        grid,
        n: f.n,
        r_value: f.r_value,
        values,
    })
}

/// Unitary inverse transform.
pub fn idft(spec: &SpectralField) -> SampledField {
    let grid = spec.grid;
    let p = grid.points();
    let norm = 1.0 / (p as f64).sqrt();
    let mut values = spec.values.clone();
    for c in 0..spec.n {
        let slice = &mut values[c * p..(c + 1) * p];
        for (i, v) in slice.iter_mut().enumerate() {
            *v *= norm * origin_phase(&grid, i);
        }
        transform_component(slice, &grid, true);
    }
    SampledField {
        grid,
        n: spec.n,
        r_value: spec.r_value,
        values,
    }
}

/// `F^{-1}(symbol * F f)` for a scalar symbol `xi -> C`.
pub fn fourier_multiply(symbol: impl Fn(&[f64]) -> Complex64, f: &SampledField) -> Result<SampledField> {
    fourier_multiply_diag(|xi, _| symbol(xi), f)
}

/// `F^{-1}(diag(symbol) F f)` for a diagonal symbol `(xi, c) -> C`.
pub fn fourier_multiply_diag(symbol: impl Fn(&[f64], usize) -> Complex64, f: &SampledField) -> Result<SampledField> {
    let mut spec = dft(f)?;
    let grid = f.grid;
    let p = grid.points();
    for c in 0..f.n {
        for i in 0..p {
            let xi = grid.frequency(i);
            let s = symbol(&xi[..grid.dim()], c);
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(Error::NonFinite(format!("symbol at xi = {:?}", &xi[..grid.dim()])));
            }
            spec.values[c * p + i] *= s;
        }
    }
    Ok(idft(&spec))
}

/// Real symbol sampled on the lattice, applied to a precomputed spectrum.
pub(crate) fn apply_real_symbol(spec: &SpectralField, symbol: &[f64]) -> SampledField {
    idft(&spec.multiplied(symbol))
}

/// Valuewise product `m * f`. `m` is scalar (`n = 1`) or diagonal
/// (same `n` as `f`, acting componentwise).
pub fn pointwise_multiply(m: &SampledField, f: &SampledField) -> Result<SampledField> {
    if m.grid != f.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", m.grid, f.grid)));
    }
    if m.n != 1 && m.n != f.n {
        return Err(Error::GridMismatch(format!(
            "multiplier has {} components, field has {}",
            m.n, f.n
        )));
    }
    let p = f.grid.points();
    let mut values = f.values.clone();
    for c in 0..f.n {
        let mc = if m.n == 1 { 0 } else { c };
        for i in 0..p {
            values[c * p + i] *= m.values[mc * p + i];
        }
    }
    Ok(SampledField { values, ..f.clone() })
}

/// `e^{-1/u}` for `u > 0`, else 0.
pub(crate) fn smooth_step_kernel(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// C-infinity ramp equal to 1 for `r <= lo` and 0 for `r >= hi`.
pub(crate) fn smooth_ramp(r: f64, lo: f64, hi: f64) -> f64 {
    if r <= lo {
        return 1.0;
    }
    if r >= hi {
        return 0.0;
    }
    let a = smooth_step_kernel(hi - r);
    let b = smooth_step_kernel(r - lo);
    a / (a + b)
}

/// Test-function families. Centers refer to the last axis `t`; in `d = 2`
/// the transverse profile is `exp(-|x'|^2 / 2)` unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `exp(-(|x'|^2 + (t - center)^2) / (2 width^2))`.
    Gaussian { center: f64, width: f64 },
    /// Gaussian times `exp(i freq t)`.
    ModulatedGaussian { center: f64, width: f64, freq: f64 },
    /// Seeded complex Gaussian coefficients on lattice points with
    /// `k_lo <= |xi| <= k_hi`.
    RandomBandlimited { k_lo: f64, k_hi: f64 },
    /// `1_{t >= 0}`.
    IndicatorHalfspace,
    /// Radial cutoff equal to 1 on `|x| <= 1` and 0 on `|x| >= 2`.
    SmoothCutoff,
    /// `exp(-|x'|^2 / 2) * exp(-t^2 / (2 scale^2))`.
    ConcentratedNearHyperplane { scale: f64 },
}

impl FamilyKind {
    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            FamilyKind::Gaussian { center, width } => format!("gaussian(c={center},w={width})"),
            FamilyKind::ModulatedGaussian { center, width, freq } => {
                format!("modulated_gaussian(c={center},w={width},f={freq})")
            }
            FamilyKind::RandomBandlimited { k_lo, k_hi } => {
                format!("random_bandlimited({k_lo},{k_hi})")
            }
            FamilyKind::IndicatorHalfspace => "indicator_halfspace".into(),
            FamilyKind::SmoothCutoff => "smooth_cutoff".into(),
            FamilyKind::ConcentratedNearHyperplane { scale } => {
                format!("concentrated_near_hyperplane({scale})")
            }
        }
    }
}

fn transverse_sq(x: &[f64]) -> f64 {
    if x.len() == 2 {
        x[0] * x[0]
    } else {
        0.0
    }
}

fn last(x: &[f64]) -> f64 {
    x[x.len() - 1]
}

/// Samples a member of a test family. Deterministic in `(kind, grid, seed)`;
/// only `RandomBandlimited` consumes the seed.
pub fn sample_family(kind: &FamilyKind, grid: &GridSpec, seed: u64) -> Result<SampledField> {
    let grid = *grid;
    match *kind {
        FamilyKind::Gaussian { center, width } => {
            if !(width > 0.0) {
                return param("gaussian width must be positive");
            }
            SampledField::from_real_fn(grid, |x| {
                let t = last(x) - center;
                (-(transverse_sq(x) + t * t) / (2.0 * width * width)).exp()
            })
        }
        FamilyKind::ModulatedGaussian { center, width, freq } => {
            if !(width > 0.0) {
                return param("gaussian width must be positive");
            }
            SampledField::from_fn(grid, |x| {
                let t = last(x) - center;
                let amp = (-(transverse_sq(x) + t * t) / (2.0 * width * width)).exp();
                Complex64::from_polar(amp, freq * last(x))
            })
        }
        FamilyKind::RandomBandlimited { k_lo, k_hi } => random_bandlimited(&grid, k_lo, k_hi, seed),
        FamilyKind::IndicatorHalfspace => SampledField::from_real_fn(grid, |x| if last(x) >= 0.0 { 1.0 } else { 0.0 }),
        FamilyKind::SmoothCutoff => SampledField::from_real_fn(grid, |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            smooth_ramp(r, 1.0, 2.0)
        }),
        FamilyKind::ConcentratedNearHyperplane { scale } => {
            if !(scale > 0.0) {
                return param("scale must be positive");
            }
            SampledField::from_real_fn(grid, |x| {
                let t = last(x);
                (-transverse_sq(x) / 2.0 - t * t / (2.0 * scale * scale)).exp()
            })
        }
    }
}

fn random_bandlimited(grid: &GridSpec, k_lo: f64, k_hi: f64, seed: u64) -> Result<SampledField> {
    if !(k_lo >= 0.0 && k_hi >= k_lo) {
        return param(format!("band must satisfy 0 <= k_lo <= k_hi, got [{k_lo}, {k_hi}]"));
    }
    if k_hi > grid.xi_max() {
        return param(format!(
            "k_hi = {k_hi} exceeds the lattice maximum xi_max = {}",
            grid.xi_max()
        ));
    }
    let l = grid.half_width();
    let jmax = (k_hi * l / PI).floor() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Coefficients are drawn in a canonical signed-index order, so the same
    // seed gives the same continuous function at every resolution.
    let mut coeffs: Vec<(usize, Complex64)> = Vec::new();
    let in_band = |r: f64| r >= k_lo && r <= k_hi;
    let draw = |rng: &mut ChaCha8Rng| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    };
    let n = grid.n();
    if grid.dim() == 1 {
        for j in -jmax..=jmax {
            let xi = PI * j as f64 / l;
            if in_band(xi.abs()) && j >= -(n as i64) / 2 && j < n as i64 / 2 {
                let c = draw(&mut rng);
                coeffs.push((grid.fft_position(j), c));
            }
        }
    } else {
        for j0 in -jmax..=jmax {
            for j1 in -jmax..=jmax {
                let r = PI * ((j0 * j0 + j1 * j1) as f64).sqrt() / l;
                let ok0 = j0 >= -(n as i64) / 2 && j0 < n as i64 / 2;
                let ok1 = j1 >= -(n as i64) / 2 && j1 < n as i64 / 2;
                if in_band(r) && ok0 && ok1 {
                    let c = draw(&mut rng);
                    coeffs.push((grid.fft_position(j0) * n + grid.fft_position(j1), c));
                }
            }
        }
    }
    let mut spec = vec![Complex64::new(0.0, 0.0); grid.points()];
    if !coeffs.is_empty() {
        let scale = (grid.points() as f64).sqrt() / (coeffs.len() as f64).sqrt();
        for (pos, c) in coeffs {
            spec[pos] = c * scale;
        }
    }
    Ok(idft(&SpectralField::new(*grid, 1, 2.0, spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g1(n: usize) -> GridSpec {
        make_grid(1, 16.0, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        let g = make_grid(1, 16.0, 1024).unwrap();
        assert!((g.xi_max() - 32.0 * PI).abs() < 1e-12);
        assert!((g.xi_max() - 100.53).abs() < 0.01);
        let g2 = make_grid(2, 8.0, 128).unwrap();
        assert_eq!(g2.points(), 128 * 128);
        let e = make_grid(1, 16.0, 100).unwrap_err();
        assert!(e.to_string().contains("N must be power of two"));
        assert!(make_grid(3, 1.0, 16).is_err());
        assert!(make_grid(1, 0.0, 16).is_err());
        assert!(make_grid(1, 1.0, 4).is_err());
    }

    #[test]
    fn delta_at_origin_has_constant_spectrum() {
        for dim in [1, 2] {
            let g = make_grid(dim, 4.0, 16).unwrap();
            let f =
                SampledField::from_real_fn(g, |x| if x.iter().all(|v| v.abs() < 1e-12) { 1.0 } else { 0.0 }).unwrap();
            let s = dft(&f).unwrap();
            let c = 1.0 / (g.points() as f64).sqrt();
            for v in s.values() {
                assert!((v - Complex64::new(c, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn identity_symbol_and_derivative() {
        let g = g1(256);
        let l = g.half_width();
        let f = SampledField::from_real_fn(g, |x| (PI * x[0] / l).sin()).unwrap();
        let same = fourier_multiply(|_| Complex64::new(1.0, 0.0), &f).unwrap();
        assert!(same.sub(&f).unwrap().max_abs() < 1e-13);
        let d = fourier_multiply(|xi| Complex64::new(0.0, xi[0]), &f).unwrap();
        for i in 0..g.points() {
            let x = g.coord(i);
            let want = PI / l * (PI * x / l).cos();
            assert!((d.at(0, i) - Complex64::new(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn non_finite_symbol_is_rejected() {
        let g = g1(16);
        let f = SampledField::from_real_fn(g, |_| 1.0).unwrap();
        let e = fourier_multiply(|xi| Complex64::new(1.0 / xi[0], 0.0), &f).unwrap_err();
        assert!(matches!(e, Error::NonFinite(_)));
    }

    #[test]
    fn pointwise_examples() {
        let g = g1(64);
        let one = SampledField::from_real_fn(g, |_| 1.0).unwrap();
        let f = sample_family(
            &FamilyKind::Gaussian {
                center: 0.5,
                width: 2.0,
            },
            &g,
            0,
        )
        .unwrap();
        assert_eq!(pointwise_multiply(&one, &f).unwrap(), f);
        let ind = sample_family(&FamilyKind::IndicatorHalfspace, &g, 0).unwrap();
        let h = pointwise_multiply(&ind, &one).unwrap();
        for i in 0..g.points() {
            let want = if g.coord(i) >= 0.0 { 1.0 } else { 0.0 };
            assert_eq!(h.at(0, i).re, want);
        }
        let other = make_grid(1, 8.0, 64).unwrap();
        let f2 = SampledField::from_real_fn(other, |_| 1.0).unwrap();
        assert!(matches!(pointwise_multiply(&one, &f2), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn family_examples() {
        let g = g1(512);
        let f = sample_family(
            &FamilyKind::Gaussian {
                center: 0.0,
                width: 1.0,
            },
            &g,
            0,
        )
        .unwrap();
        for i in 0..g.points() {
            let x = g.coord(i);
            assert!((f.at(0, i).re - (-x * x / 2.0).exp()).abs() < 1e-12);
        }
        let c = sample_family(&FamilyKind::SmoothCutoff, &g, 0).unwrap();
        for i in 0..g.points() {
            let x = g.coord(i).abs();
            if x <= 1.0 {
                assert_eq!(c.at(0, i).re, 1.0);
            }
            if x >= 2.0 {
                assert_eq!(c.at(0, i).re, 0.0);
            }
        }
        let e = sample_family(
            &FamilyKind::RandomBandlimited {
                k_lo: 1.0,
                k_hi: 1000.0,
            },
            &g,
            1,
        );
        assert!(e.is_err());
    }

    #[test]
    fn random_bandlimited_support() {
        for dim in [1, 2] {
            let g = make_grid(dim, 16.0, if dim == 1 { 256 } else { 64 }).unwrap();
            let f = sample_family(&FamilyKind::RandomBandlimited { k_lo: 2.0, k_hi: 5.0 }, &g, 7).unwrap();
            let s = dft(&f).unwrap();
            assert!(s.mass_outside(|r| (2.0 - 1e-9..=5.0 + 1e-9).contains(&r)) < 1e-13);
            assert!(!f.is_zero());
        }
    }

    #[test]
    fn random_bandlimited_is_resolution_independent() {
        let kind = FamilyKind::RandomBandlimited { k_lo: 1.0, k_hi: 6.0 };
        let a = sample_family(&kind, &g1(128), 3).unwrap();
        let b = sample_family(&kind, &g1(256), 3).unwrap();
        for i in 0..128 {
            assert!((a.at(0, i) - b.at(0, 2 * i)).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sampling_is_deterministic(seed in any::<u64>()) {
            let g = g1(64);
            let kind = FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 5.0 };
            let a = sample_family(&kind, &g, seed).unwrap();
            let b = sample_family(&kind, &g, seed).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn fourier_multiply_is_linear(seed in 0u64..1000, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let g = g1(64);
            let kind = FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 6.0 };
            let f = sample_family(&kind, &g, seed).unwrap();
            let h = sample_family(&kind, &g, seed + 1).unwrap();
            let sym = |xi: &[f64]| Complex64::new(1.0 + xi[0] * xi[0], xi[0]).sqrt();
            let a = Complex64::new(alpha, 0.0);
            let b = Complex64::new(beta, 0.0);
            let lhs = fourier_multiply(sym, &f.scale(a).axpy(b, &h).unwrap()).unwrap();
            let rhs = fourier_multiply(sym, &f).unwrap().scale(a)
                .axpy(b, &fourier_multiply(sym, &h).unwrap()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-10 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn pointwise_multiply_associates(seed in 0u64..1000) {
            let g = g1(32);
            let kind = FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 3.0 };
            let m1 = sample_family(&kind, &g, seed).unwrap();
            let m2 = sample_family(&kind, &g, seed + 7).unwrap();
            let f = sample_family(&kind, &g, seed + 13).unwrap();
            let a = pointwise_multiply(&pointwise_multiply(&m1, &m2).unwrap(), &f).unwrap();
            let b = pointwise_multiply(&m1, &pointwise_multiply(&m2, &f).unwrap()).unwrap();
            prop_assert!(a.sub(&b).unwrap().max_abs() < 1e-12 * (1.0 + a.max_abs()));
        }
    }
}
