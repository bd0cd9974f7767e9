//! Power weights with exact cell averages, weighted quadrature, and
//! Muckenhoupt A_p estimation.
//!
//! Grid cells are `[x_j, x_j + h)` along each axis, so the hyperplane
//! `t = 0` is a cell boundary and the cell `[0, h]` carries the singular
//! (or degenerate) part of `|t|^gamma`. Cell averages use the
//! antiderivative `sign(t) |t|^{gamma+1} / (gamma+1)`; point sampling would
//! be infinite at `t = 0` for `gamma < 0` and zero for `gamma > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::grid::{GridSpec, SampledField};
use crate::quad::{gauss_legendre, gauss_legendre_2d};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `w(x', t) = |t|^gamma`.
    AxisLast,
    /// `v(x) = |x|^gamma`.
    Radial,
}

/// A power weight sampled as per-cell averages.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerWeight {
    kind: WeightKind,
    gamma: f64,
    grid: GridSpec,
    cell_avg: Vec<f64>,
    integrable: bool,
}

impl PowerWeight {
    /// The trivial weight `w = 1`.
    pub fn unweighted(grid: &GridSpec) -> Self {
        Self {
            kind: WeightKind::AxisLast,
            gamma: 0.0,
            grid: *grid,
            cell_avg: vec![1.0; grid.points()],
            integrable: true,
        }
    }

    /// Like [`cell_averaged_weight`] but accepts non-integrable exponents:
    /// cells touching the singularity take the weight's value at the cell
    /// center (a clamped surrogate) and [`Self::is_integrable`] reports false.
    pub fn clamped(grid: &GridSpec, gamma: f64, kind: WeightKind) -> Self {
        let cell_avg = cell_averages(grid, gamma, kind);
        Self {
            kind,
            gamma,
            grid: *grid,
            cell_avg,
            integrable: gamma > threshold(grid, kind),
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cell_averages(&self) -> &[f64] {
        &self.cell_avg
    }

    pub fn is_integrable(&self) -> bool {
        self.integrable
    }
}

fn threshold(grid: &GridSpec, kind: WeightKind) -> f64 {
    match kind {
        WeightKind::AxisLast => -1.0,
        WeightKind::Radial => -(grid.dim() as f64),
    }
}

/// `cell_averaged_weight(grid, gamma, kind)`.
pub fn cell_averaged_weight(grid: &GridSpec, gamma: f64, kind: WeightKind) -> Result<PowerWeight> {
    if !gamma.is_finite() {
        return param("gamma must be finite");
    }
    let thr = threshold(grid, kind);
    if gamma <= thr {
        return Err(Error::NotIntegrable(format!(
            "gamma = {gamma} must exceed {thr} for a {kind:?} power weight in dimension {}",
            grid.dim()
        )));
    }
    Ok(PowerWeight::clamped(grid, gamma, kind))
}

/// Axis-last weight with exponent `gamma` (the common case).
pub fn axis_weight(grid: &GridSpec, gamma: f64) -> Result<PowerWeight> {
    cell_averaged_weight(grid, gamma, WeightKind::AxisLast)
}

fn antiderivative(t: f64, gamma: f64) -> f64 {
    t.signum() * t.abs().powf(gamma + 1.0) / (gamma + 1.0)
}

/// Exact average of `|t|^gamma` over `[a, b]` (`gamma > -1`, `a < b`).
pub fn axis_cell_average(a: f64, b: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    (antiderivative(b, gamma) - antiderivative(a, gamma)) / (b - a)
}

fn axis_averages(grid: &GridSpec, gamma: f64) -> Vec<f64> {
    let h = grid.spacing();
    let integrable = gamma > -1.0;
    (0..grid.n())
        .map(|j| {
            let a = grid.coord(j);
            let b = a + h;
            let touches = a <= 1e-12 * h && b >= -1e-12 * h;
            if integrable {
                axis_cell_average(a, b, gamma)
            } else if touches {
                (0.5 * (a + b)).abs().max(0.5 * h).powf(gamma)
            } else {
                // Smooth on this cell; the closed form still applies.
                axis_cell_average(a, b, gamma)
            }
        })
        .collect()
}

/// Exact integral of `|x|^gamma` over `[0, h]^2` via polar coordinates.
fn radial_corner_integral(h: f64, gamma: f64) -> f64 {
    let angular = gauss_legendre(
        |theta| theta.cos().powf(-(gamma + 2.0)),
        0.0,
        std::f64::consts::FRAC_PI_4,
        8,
    );
    2.0 * h.powf(gamma + 2.0) / (gamma + 2.0) * angular
}

fn radial_averages_2d(grid: &GridSpec, gamma: f64) -> Vec<f64> {
    let n = grid.n();
    let h = grid.spacing();
    let integrable = gamma > -2.0;
    let corner = if integrable {
        radial_corner_integral(h, gamma) / (h * h)
    } else {
        (0.5 * h * std::f64::consts::SQRT_2).powf(gamma)
    };
    let mut out = vec![0.0; n * n];
    for i0 in 0..n {
        for i1 in 0..n {
            let (a0, a1) = (grid.coord(i0), grid.coord(i1));
            let touches = |a: f64| a <= 1e-12 * h && a + h >= -1e-12 * h;
            let touches_origin = touches(a0) && touches(a1);
            let near = (a0.abs().min((a0 + h).abs()) < 4.0 * h) && (a1.abs().min((a1 + h).abs()) < 4.0 * h);
            let f = |x: f64, y: f64| (x * x + y * y).sqrt().powf(gamma);
            out[i0 * n + i1] = if touches_origin {
                corner
            } else {
                let panels = if near { 8 } else { 1 };
                gauss_legendre_2d(f, (a0, a0 + h), (a1, a1 + h), panels) / (h * h)
            };
        }
    }
    out
}

fn cell_averages(grid: &GridSpec, gamma: f64, kind: WeightKind) -> Vec<f64> {
    if gamma == 0.0 {
        return vec![1.0; grid.points()];
    }
    let n = grid.n();
    match (grid.dim(), kind) {
        (1, _) => axis_averages(grid, gamma),
        (_, WeightKind::AxisLast) => {
            let row = axis_averages(grid, gamma);
            (0..n * n).map(|i| row[i % n]).collect()
        }
        (_, WeightKind::Radial) => radial_averages_2d(grid, gamma),
    }
}

/// `l^p`-style aggregation of pointwise nonnegative values against the
/// weight's cell averages: `(sum_i a_i^p w_i h^d)^{1/p}`; `p = inf` ignores `w`.
pub fn weighted_lp_of_values(values: &[f64], p: f64, w: &PowerWeight) -> f64 {
    debug_assert_eq!(values.len(), w.cell_avg.len());
    if p.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let vol = w.grid.cell_volume();
    let sum: f64 = if p == 2.0 {
        values.iter().zip(&w.cell_avg).map(|(a, c)| a * a * c).sum()
    } else if p == 1.0 {
        values.iter().zip(&w.cell_avg).map(|(a, c)| a * c).sum()
    } else {
        values.iter().zip(&w.cell_avg).map(|(a, c)| a.powf(p) * c).sum()
    };
    (sum * vol).powf(1.0 / p)
}

/// `||f||_{L^p(R^d, w; X)}` by cell-averaged Riemann sum.
pub fn weighted_lp_norm(f: &SampledField, p: f64, w: &PowerWeight) -> f64 {
    assert_eq!(f.grid(), w.grid(), "field and weight live on different grids");
    weighted_lp_of_values(&f.value_norms(), p, w)
}

/// Mixed norm `L^p(R^{d-1}; L^r(R, w))` of pointwise nonnegative values on a
/// 2-D grid: inner weighted `L^r` along `t`, outer plain `L^p` along `x'`.
pub fn mixed_lp_of_values(values: &[f64], p: f64, r: f64, w: &PowerWeight) -> Result<f64> {
    let grid = w.grid;
    if grid.dim() != 2 {
        return param("mixed norm L^{p(r)} needs d = 2");
    }
    if w.kind != WeightKind::AxisLast {
        return param("mixed norm needs an axis-last weight");
    }
    let n = grid.n();
    let h = grid.spacing();
    let inner: Vec<f64> = (0..n)
        .map(|i0| {
            let row = &values[i0 * n..(i0 + 1) * n];
            let wr = &w.cell_avg[i0 * n..(i0 + 1) * n];
            if r.is_infinite() {
                row.iter().copied().fold(0.0, f64::max)
            } else {
                let s: f64 = row.iter().zip(wr).map(|(a, c)| a.powf(r) * c).sum();
                (s * h).powf(1.0 / r)
            }
        })
        .collect();
    Ok(if p.is_infinite() {
        inner.into_iter().fold(0.0, f64::max)
    } else {
        (inner.iter().map(|a| a.powf(p)).sum::<f64>() * h).powf(1.0 / p)
    })
}

/// `mixed_norm(f, p, r, w)`.
pub fn mixed_norm(f: &SampledField, p: f64, r: f64, w: &PowerWeight) -> Result<f64> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch("field and weight grids differ".into()));
    }
    mixed_lp_of_values(&f.value_norms(), p, r, w)
}

/// Result of an A_p estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApEstimate {
    /// Supremum over dyadic cubes of `avg(w) * avg(w^{1-p'})^{p-1}`, using
    /// clamped averages on singular cells when one of the two powers is not
    /// locally integrable.
    pub constant: f64,
    /// False when `w` or `w^{1-p'}` is not locally integrable, i.e. the
    /// true constant is `+inf` and `constant` is only a grid surrogate.
    pub finite: bool,
}

/// Sup over dyadic cubes of the A_p quotient of `w` at exponent `p`.
pub fn ap_constant(w: &PowerWeight, p: f64) -> Result<ApEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return param(format!("A_p needs p in (1, inf), got {p}"));
    }
    let grid = w.grid;
    let dual_gamma = -w.gamma / (p - 1.0);
    let sigma = PowerWeight::clamped(&grid, dual_gamma, w.kind);
    let finite = w.integrable && sigma.integrable;
    let constant = dyadic_sup(&grid, &w.cell_avg, &sigma.cell_avg, p);
    Ok(ApEstimate { constant, finite })
}

fn quotient(aw: f64, asig: f64, p: f64) -> f64 {
    aw * asig.powf(p - 1.0)
}

fn dyadic_sup(grid: &GridSpec, w: &[f64], sigma: &[f64], p: f64) -> f64 {
    let n = grid.n();
    let levels = n.trailing_zeros();
    let mut best = 0.0f64;
    if grid.dim() == 1 {
        let pw = prefix(w);
        let ps = prefix(sigma);
        for lev in 0..=levels {
            let len = n >> lev;
            for start in (0..n).step_by(len) {
                let aw = (pw[start + len] - pw[start]) / len as f64;
                let asg = (ps[start + len] - ps[start]) / len as f64;
                best = best.max(quotient(aw, asg, p));
            }
        }
    } else {
        let pw = prefix_2d(w, n);
        let ps = prefix_2d(sigma, n);
        for lev in 0..=levels {
            let len = n >> lev;
            for s0 in (0..n).step_by(len) {
                for s1 in (0..n).step_by(len) {
                    let area = (len * len) as f64;
                    let aw = rect_sum(&pw, n, s0, s1, len) / area;
                    let asg = rect_sum(&ps, n, s0, s1, len) / area;
                    best = best.max(quotient(aw, asg, p));
                }
            }
        }
    }
    best
}

fn prefix(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for x in v {
        acc += x;
        out.push(acc);
    }
    out
}

fn prefix_2d(v: &[f64], n: usize) -> Vec<f64> {
    let m = n + 1;
    let mut out = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            out[(i + 1) * m + j + 1] = v[i * n + j] + out[i * m + j + 1] + out[(i + 1) * m + j] - out[i * m + j];
        }
    }
    out
}

fn rect_sum(pre: &[f64], n: usize, s0: usize, s1: usize, len: usize) -> f64 {
    let m = n + 1;
    let (e0, e1) = (s0 + len, s1 + len);
    pre[e0 * m + e1] - pre[s0 * m + e1] - pre[e0 * m + s1] + pre[s0 * m + s1]
}

/// Dual exponents for a power weight: `p' = p/(p-1)`, `gamma' = -gamma/(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualExponents {
    pub p_dual: f64,
    pub gamma_dual: f64,
}

impl DualExponents {
    /// `(1 + gamma') / p'`, which equals `1 - (1 + gamma) / p`.
    pub fn lower_index(&self) -> f64 {
        (1.0 + self.gamma_dual) / self.p_dual
    }
}

pub fn dual_exponents(p: f64, gamma: f64) -> Result<DualExponents> {
    if !(p > 1.0 && p.is_finite()) {
        return param(format!("dual exponents need p in (1, inf), got {p}"));
    }
    Ok(DualExponents {
        p_dual: p / (p - 1.0),
        gamma_dual: -gamma / (p - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use proptest::prelude::*;

    /// Adaptive Simpson, used as an independent quadrature oracle.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let c = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let c = 0.5 * (a + b);
            let (l, r) = (0.5 * (a + c), 0.5 * (c + b));
            let left = (c - a) / 6.0 * (f(a) + 4.0 * f(l) + f(c));
            let right = (b - c) / 6.0 * (f(c) + 4.0 * f(r) + f(b));
            if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, c, left, tol / 2.0, depth - 1) + rec(f, c, b, right, tol / 2.0, depth - 1)
            }
        }
        rec(f, a, b, whole, tol, depth)
    }

    /// `int_0^b t^gamma dt` through `t = b u^4`, which removes the singularity.
    fn oracle_half(b: f64, gamma: f64) -> f64 {
        let g = move |u: f64| 4.0 * b.powf(1.0 + gamma) * u.powf(3.0 + 4.0 * gamma);
        adaptive_simpson(&g, 0.0, 1.0, 1e-14, 40)
    }

    #[test]
    fn trivial_and_corner_cells() {
        let g = make_grid(1, 16.0, 64).unwrap();
        let w = axis_weight(&g, 0.0).unwrap();
        assert!(w.cell_averages().iter().all(|&v| v == 1.0));
        let h = g.spacing();
        let w = axis_weight(&g, 0.7).unwrap();
        let want = h.powf(0.7) / 1.7;
        assert!((w.cell_averages()[32] - want).abs() < 1e-14 * want.max(1.0));
    }

    #[test]
    fn straddling_cell_matches_quadrature_oracle() {
        let gamma = -0.5;
        let (a, b) = (-0.3 * 0.25, 0.7 * 0.25);
        let oracle = (oracle_half(-a, gamma) + oracle_half(b, gamma)) / (b - a);
        let got = axis_cell_average(a, b, gamma);
        assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn rejects_non_integrable() {
        let g = make_grid(1, 16.0, 64).unwrap();
        let e = axis_weight(&g, -1.0).unwrap_err();
        assert!(e.to_string().contains("weight not locally integrable"));
        let g2 = make_grid(2, 4.0, 16).unwrap();
        assert!(cell_averaged_weight(&g2, -1.5, WeightKind::Radial).is_ok());
        assert!(cell_averaged_weight(&g2, -2.0, WeightKind::Radial).is_err());
    }

    #[test]
    fn radial_corner_cell_against_oracle() {
        // Corner cell [0,h]^2 of |x|^gamma, oracle: iterated adaptive quadrature
        // in polar form over the two triangles.
        let g = make_grid(2, 4.0, 16).unwrap();
        let h = g.spacing();
        let gamma = -1.3;
        let w = cell_averaged_weight(&g, gamma, WeightKind::Radial).unwrap();
        let theta_int = |th: f64| {
            let rmax = h / th.cos();
            rmax.powf(gamma + 2.0) / (gamma + 2.0)
        };
        let oracle = 2.0 * adaptive_simpson(&theta_int, 0.0, std::f64::consts::FRAC_PI_4, 1e-15, 40) / (h * h);
        let idx = 8 * 16 + 8;
        let got = w.cell_averages()[idx];
        assert!(((got - oracle) / oracle).abs() < 1e-9);
    }

    #[test]
    fn lp_norm_examples() {
        let g = make_grid(1, 16.0, 256).unwrap();
        let one = SampledField::from_real_fn(g, |_| 1.0).unwrap();
        let w0 = PowerWeight::unweighted(&g);
        assert!((weighted_lp_norm(&one, 2.0, &w0) - 32f64.sqrt()).abs() < 1e-12);
        let w = axis_weight(&g, 0.5).unwrap();
        let want = 4.0 / 3.0 * 16f64.powf(1.5);
        assert!((weighted_lp_norm(&one, 1.0, &w) - want).abs() < 1e-10 * want);
        assert_eq!(weighted_lp_norm(&one, f64::INFINITY, &w), 1.0);
    }

    #[test]
    fn mixed_norm_examples() {
        let g = make_grid(2, 8.0, 64).unwrap();
        let w = axis_weight(&g, 0.5).unwrap();
        let f = SampledField::from_real_fn(g, |x| (-(x[0] * x[0]) / 2.0).exp() * (1.0 + x[1].sin())).unwrap();
        let a = mixed_norm(&f, 3.0, 3.0, &w).unwrap();
        let b = weighted_lp_norm(&f, 3.0, &w);
        assert!((a - b).abs() < 1e-12 * b);
        // Separable: ||g||_{L^p} * ||h||_{L^r(w)}.
        let (p, r) = (1.5, 3.0);
        let g1 = make_grid(1, 8.0, 64).unwrap();
        let gx = SampledField::from_real_fn(g1, |x| (-(x[0] * x[0]) / 2.0).exp()).unwrap();
        let ht = SampledField::from_real_fn(g1, |x| 1.0 + x[0].sin()).unwrap();
        let want = weighted_lp_norm(&gx, p, &PowerWeight::unweighted(&g1))
            * weighted_lp_norm(&ht, r, &axis_weight(&g1, 0.5).unwrap());
        let got = mixed_norm(&f, p, r, &w).unwrap();
        assert!((got - want).abs() < 1e-8 * want);
        let w0 = PowerWeight::unweighted(&g);
        let l2 = weighted_lp_norm(&f, 2.0, &w0);
        assert!((mixed_norm(&f, 2.0, 2.0, &w0).unwrap() - l2).abs() < 1e-12 * l2);
        let f1 = SampledField::from_real_fn(g1, |_| 1.0).unwrap();
        assert!(mixed_norm(&f1, 2.0, 2.0, &PowerWeight::unweighted(&g1)).is_err());
    }

    #[test]
    fn ap_examples() {
        let g = make_grid(1, 16.0, 256).unwrap();
        let est = ap_constant(&PowerWeight::unweighted(&g), 2.0).unwrap();
        assert_eq!(est.constant, 1.0);
        assert!(est.finite);
        assert!(ap_constant(&PowerWeight::unweighted(&g), 1.0).is_err());
        let bad = PowerWeight::clamped(&g, 1.2, WeightKind::AxisLast);
        assert!(!ap_constant(&bad, 2.0).unwrap().finite);
    }

    #[test]
    fn ap_dyadic_vs_all_intervals() {
        let g = make_grid(1, 16.0, 256).unwrap();
        let w = axis_weight(&g, 0.5).unwrap();
        let dy = ap_constant(&w, 2.0).unwrap().constant;
        let sig = axis_weight(&g, -0.5).unwrap();
        let (pw, ps) = (prefix(w.cell_averages()), prefix(sig.cell_averages()));
        let mut full = 0.0f64;
        for a in 0..256 {
            for b in a + 1..=256 {
                let len = (b - a) as f64;
                full = full.max((pw[b] - pw[a]) / len * (ps[b] - ps[a]) / len);
            }
        }
        assert!(dy <= full * (1.0 + 1e-12));
        assert!(full <= 4.0 * dy, "dyadic {dy} vs full {full}");
    }

    #[test]
    fn dual_exponent_examples() {
        let d = dual_exponents(2.0, 0.5).unwrap();
        assert_eq!(d.p_dual, 2.0);
        assert_eq!(d.gamma_dual, -0.5);
        assert_eq!(dual_exponents(2.0, 0.0).unwrap().gamma_dual, 0.0);
        let d = dual_exponents(3.0, 1.0).unwrap();
        assert!((d.gamma_dual + 0.5).abs() < 1e-15);
        assert!((d.lower_index() - (1.0 - 2.0 / 3.0)).abs() < 1e-15);
        assert!(dual_exponents(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn dual_identity_and_involution(p in 1.01f64..20.0, t in 0.0f64..1.0) {
            let gamma = -1.0 + t * p;
            let d = dual_exponents(p, gamma).unwrap();
            prop_assert!((d.lower_index() + (1.0 + gamma) / p - 1.0).abs() < 1e-12);
            let back = dual_exponents(d.p_dual, d.gamma_dual).unwrap();
            prop_assert!((back.p_dual - p).abs() < 1e-10 * p);
            prop_assert!((back.gamma_dual - gamma).abs() < 1e-10 * (1.0 + gamma.abs()));
        }

        #[test]
        fn lp_norm_is_homogeneous_and_monotone(alpha in -5.0f64..5.0, gamma in -0.9f64..2.0, p in 1.0f64..6.0) {
            let g = make_grid(1, 4.0, 64).unwrap();
            let w = axis_weight(&g, gamma).unwrap();
            let f = SampledField::from_real_fn(g, |x| (x[0]).cos() + 0.3).unwrap();
            let a = weighted_lp_norm(&f.scale_real(alpha), p, &w);
            let b = alpha.abs() * weighted_lp_norm(&f, p, &w);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
            let bigger = SampledField::from_real_fn(g, |x| (x[0]).cos().abs() + 0.3).unwrap();
            prop_assert!(weighted_lp_norm(&f, p, &w) <= weighted_lp_norm(&bigger, p, &w) * (1.0 + 1e-12));
        }

        #[test]
        fn lp_triangle_inequality(s1 in 0u64..500, p in 1.0f64..5.0) {
            use crate::grid::{sample_family, FamilyKind};
            let g = make_grid(1, 8.0, 64).unwrap();
            let w = axis_weight(&g, 0.4).unwrap();
            let k = FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 6.0 };
            let f = sample_family(&k, &g, s1).unwrap();
            let h = sample_family(&k, &g, s1 + 1).unwrap();
            let lhs = weighted_lp_norm(&f.add(&h).unwrap(), p, &w);
            prop_assert!(lhs <= weighted_lp_norm(&f, p, &w) + weighted_lp_norm(&h, p, &w) + 1e-10);
        }
    }
}
