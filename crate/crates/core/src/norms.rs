//! Function-space norms on the grid: weighted `L^p`, Besov, Triebel-Lizorkin,
//! Bessel-potential and Sobolev norms, the difference and modulus-of-smoothness
//! characterizations, the randomized (Rademacher) norm, Hoelder norms, and the
//! sequence-space norms used by the Jawerth-Franke embeddings.
//!
//! `q = inf` and `p = inf` are exact suprema over the lattice / the levels.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{blocks, DyadicFamily};
use crate::error::{param, Error, Result};
use crate::grid::{apply_real_symbol, dft, fourier_multiply, lr_norm, GridSpec, SampledField};
use crate::weights::{axis_weight, mixed_lp_of_values, weighted_lp_of_values, PowerWeight};

fn check_weight(f: &SampledField, w: &PowerWeight) -> Result<()> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch("field and weight grids differ".into()));
    }
    Ok(())
}

fn check_family(f: &SampledField, fam: &DyadicFamily) -> Result<()> {
    if f.grid() != fam.grid() {
        return Err(Error::GridMismatch("field and family grids differ".into()));
    }
    Ok(())
}

/// Pointwise value norms of every block `S_k f`, `k = 0..=K`.
pub fn block_value_norms(fam: &DyadicFamily, f: &SampledField) -> Result<Vec<Vec<f64>>> {
    Ok(blocks(fam, f)?.iter().map(SampledField::value_norms).collect())
}

/// `l^q(L^p(w))` of `(2^{sk} a_k)` for pointwise value norms `a_k`.
pub(crate) fn lq_of_lp(norms: &[Vec<f64>], s: f64, p: f64, q: f64, w: &PowerWeight) -> f64 {
    lr_norm(
        norms
            .iter()
            .enumerate()
            .map(|(k, a)| 2f64.powf(s * k as f64) * weighted_lp_of_values(a, p, w)),
        q,
    )
}

/// `L^p(w; l^q)` of `(2^{sk} a_k)` for pointwise value norms `a_k`.
pub(crate) fn lp_of_lq(norms: &[Vec<f64>], s: f64, p: f64, q: f64, w: &PowerWeight) -> f64 {
    let factors: Vec<f64> = (0..norms.len()).map(|k| 2f64.powf(s * k as f64)).collect();
    let pointwise: Vec<f64> = (0..w.grid().points())
        .map(|i| lr_norm(norms.iter().zip(&factors).map(|(a, c)| c * a[i]), q))
        .collect();
    weighted_lp_of_values(&pointwise, p, w)
}

/// `||f||_{B^s_{p,q}(w)} = ||(2^{sk} S_k f)||_{l^q(L^p(w))}`.
pub fn besov_norm(f: &SampledField, fam: &DyadicFamily, s: f64, p: f64, q: f64, w: &PowerWeight) -> Result<f64> {
    check_weight(f, w)?;
    Ok(lq_of_lp(&block_value_norms(fam, f)?, s, p, q, w))
}

/// `||f||_{F^s_{p,q}(w)} = ||(2^{sk} S_k f)||_{L^p(w; l^q)}`.
pub fn tl_norm(f: &SampledField, fam: &DyadicFamily, s: f64, p: f64, q: f64, w: &PowerWeight) -> Result<f64> {
    check_weight(f, w)?;
    Ok(lp_of_lq(&block_value_norms(fam, f)?, s, p, q, w))
}

/// `F^{-1}[(1 + |xi|^2)^{s/2} F f]`.
pub fn bessel_potential(f: &SampledField, s: f64) -> Result<SampledField> {
    let symbol: Vec<f64> = f
        .grid()
        .frequency_norms()
        .iter()
        .map(|r| (1.0 + r * r).powf(0.5 * s))
        .collect();
    Ok(apply_real_symbol(&dft(f)?, &symbol))
}

/// `||f||_{H^{s,p}(w)}`. For `s = 0` this is the weighted `L^p` norm with no
/// transform round trip.
pub fn bessel_norm(f: &SampledField, s: f64, p: f64, w: &PowerWeight) -> Result<f64> {
    check_weight(f, w)?;
    if s == 0.0 {
        return Ok(weighted_lp_of_values(&f.value_norms(), p, w));
    }
    Ok(weighted_lp_of_values(&bessel_potential(f, s)?.value_norms(), p, w))
}

/// Multi-indices `alpha` with `|alpha| <= order` in dimension `dim`, in
/// lexicographic order. The unused slot is zero for `d = 1`.
pub fn multi_indices(dim: usize, order: u32) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for a in 0..=order {
        if dim == 1 {
            out.push([a, 0]);
        } else {
            for b in 0..=order - a {
                out.push([a, b]);
            }
        }
    }
    out
}

/// Spectral derivative `D^alpha f = F^{-1}[(i xi)^alpha F f]`.
pub fn derivative(f: &SampledField, alpha: [u32; 2]) -> Result<SampledField> {
    if alpha == [0, 0] {
        return Ok(f.clone());
    }
    let i = Complex64::new(0.0, 1.0);
    fourier_multiply(
        |xi| {
            let mut v = Complex64::new(1.0, 0.0);
            for (x, &a) in xi.iter().zip(&alpha) {
                v *= (i * x).powu(a);
            }
            v
        },
        f,
    )
}

/// `||f||_{W^{m,p}(w)} = (sum_{|alpha| <= m} ||D^alpha f||^p_{L^p(w)})^{1/p}`.
pub fn sobolev_norm(f: &SampledField, m: u32, p: f64, w: &PowerWeight) -> Result<f64> {
    check_weight(f, w)?;
    let parts = multi_indices(f.grid().dim(), m)
        .into_iter()
        .map(|a| Ok(weighted_lp_of_values(&derivative(f, a)?.value_norms(), p, w)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(lr_norm(parts.into_iter(), p))
}

/// `sum_{|alpha| <= m} ||D^alpha f||_{H^{s-m,p}(w)}`.
pub fn derivative_norm(f: &SampledField, s: f64, p: f64, w: &PowerWeight, m: u32) -> Result<f64> {
    check_weight(f, w)?;
    multi_indices(f.grid().dim(), m)
        .into_iter()
        .map(|a| bessel_norm(&derivative(f, a)?, s - m as f64, p, w))
        .sum()
}

fn binomial(m: u32, l: u32) -> f64 {
    (0..l).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Lattice offsets with `|o| <= N/2` per axis, i.e. one representative per
/// torus translation, excluding zero.
fn offsets(grid: &GridSpec) -> Vec<[i64; 2]> {
    let half = grid.n() as i64 / 2;
    let range = -half..half;
    if grid.dim() == 1 {
        range.filter(|&o| o != 0).map(|o| [o, 0]).collect()
    } else {
        range
            .clone()
            .flat_map(|a| range.clone().map(move |b| [a, b]))
            .filter(|o| *o != [0, 0])
            .collect()
    }
}

fn offset_length(grid: &GridSpec, o: [i64; 2]) -> f64 {
    ((o[0] * o[0] + o[1] * o[1]) as f64).sqrt() * grid.spacing()
}

fn shift_index(grid: &GridSpec, i: usize, o: [i64; 2], times: i64) -> usize {
    let n = grid.n() as i64;
    let a = grid.axes(i);
    let j0 = (a[0] as i64 + times * o[0]).rem_euclid(n) as usize;
    if grid.dim() == 1 {
        j0
    } else {
        let j1 = (a[1] as i64 + times * o[1]).rem_euclid(n) as usize;
        j0 * grid.n() + j1
    }
}

/// Pointwise value norms of `Delta^m_h f` for the lattice offset `h = o * spacing`,
/// `Delta^m_h f(x) = sum_l C(m,l) (-1)^l f(x + (m-l) h)` with periodic shifts.
pub fn difference_values(f: &SampledField, m: u32, o: [i64; 2]) -> Vec<f64> {
    let coeffs = difference_coefficients(m);
    let mut comps = vec![0.0; f.components()];
    (0..f.grid().points())
        .map(|i| difference_at(f, &coeffs, o, i, &mut comps))
        .collect()
}

fn difference_coefficients(m: u32) -> Vec<(i64, f64)> {
    (0..=m)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            ((m - l) as i64, sign * binomial(m, l))
        })
        .collect()
}

fn difference_at(f: &SampledField, coeffs: &[(i64, f64)], o: [i64; 2], i: usize, comps: &mut [f64]) -> f64 {
    let grid = f.grid();
    for (c, slot) in comps.iter_mut().enumerate() {
        let col = f.component(c);
        let v: Complex64 = coeffs.iter().map(|&(t, b)| col[shift_index(grid, i, o, t)] * b).sum();
        *slot = v.norm();
    }
    lr_norm(comps.iter().copied(), f.r_value())
}

/// The dyadic `t`-levels of the difference norm, `t_j = 2L 2^{-j}`,
/// `j = 0..log2(N)`.
pub fn difference_levels(grid: &GridSpec) -> Vec<f64> {
    let count = grid.n().trailing_zeros() as usize;
    (0..count)
        .map(|j| 2.0 * grid.half_width() * 2f64.powi(-(j as i32)))
        .collect()
}

/// Finest level `j` with `len <= t_j`.
fn finest_level(levels: &[f64], len: f64) -> Option<usize> {
    levels.iter().rposition(|&t| len <= t * (1.0 + 1e-12))
}

/// Seminorm `[f]^{(m)}_{B^s_{p,q}(w)}`: for each level `t_j`, the pointwise
/// average `t^{-d} sum_{|h| <= t} ||Delta^m_h f(x)|| h^d` over lattice
/// offsets, taken in `L^p(w)`, weighted by `t^{-s}`, and summed in
/// `l^q(dt/t)` with the log-uniform step `ln 2`.
pub fn difference_seminorm(f: &SampledField, s: f64, p: f64, q: f64, w: &PowerWeight, m: u32) -> Result<f64> {
    check_weight(f, w)?;
    if m == 0 || !(s > 0.0 && s < m as f64) {
        return param(format!("difference norm needs 0 < s < m, got s = {s}, m = {m}"));
    }
    let grid = *f.grid();
    let levels = difference_levels(&grid);
    let pts = grid.points();
    let tagged: Vec<([i64; 2], usize)> = offsets(&grid)
        .into_iter()
        .filter_map(|o| finest_level(&levels, offset_length(&grid, o)).map(|j| (o, j)))
        .collect();
    let coeffs = difference_coefficients(m);
    // Parallel over points, offsets in a fixed order: the result does not
    // depend on the thread schedule.
    let per_point: Vec<Vec<f64>> = (0..pts)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0; levels.len()];
            let mut comps = vec![0.0; f.components()];
            for &(o, j) in &tagged {
                acc[j] += difference_at(f, &coeffs, o, i, &mut comps);
            }
            acc
        })
        .collect();
    let buckets: Vec<Vec<f64>> = (0..levels.len())
        .map(|j| per_point.iter().map(|a| a[j]).collect())
        .collect();
    let vol = grid.cell_volume();
    let d = grid.dim() as i32;
    let mut running = vec![0.0; pts];
    let mut terms = vec![0.0; levels.len()];
    for j in (0..levels.len()).rev() {
        for (r, b) in running.iter_mut().zip(&buckets[j]) {
            *r += b;
        }
        let scale = vol / levels[j].powi(d);
        let avg: Vec<f64> = running.iter().map(|r| r * scale).collect();
        terms[j] = levels[j].powf(-s) * weighted_lp_of_values(&avg, p, w);
    }
    Ok(dt_over_t_sum(&terms, q))
}

fn dt_over_t_sum(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        terms.iter().copied().fold(0.0, f64::max)
    } else {
        (terms.iter().map(|a| a.powf(q)).sum::<f64>() * LN_2).powf(1.0 / q)
    }
}

/// `|||f|||^{(m)}_{B^s_{p,q}(w)} = ||f||_{L^p(w)} + [f]^{(m)}`.
pub fn difference_besov_norm(f: &SampledField, s: f64, p: f64, q: f64, w: &PowerWeight, m: u32) -> Result<f64> {
    let semi = difference_seminorm(f, s, p, q, w, m)?;
    Ok(weighted_lp_of_values(&f.value_norms(), p, w) + semi)
}

/// `omega^m_{p,w}(f, t) = sup_{|h| <= t} ||Delta^m_h f||_{L^p(w)}` over lattice offsets.
pub fn modulus_of_smoothness(f: &SampledField, m: u32, p: f64, w: &PowerWeight, t: f64) -> Result<f64> {
    check_weight(f, w)?;
    let grid = *f.grid();
    Ok(offsets(&grid)
        .par_iter()
        .filter(|&&o| offset_length(&grid, o) <= t * (1.0 + 1e-12))
        .map(|&o| weighted_lp_of_values(&difference_values(f, m, o), p, w))
        .reduce(|| 0.0, f64::max))
}

/// `||f||^{(m)} = ||f||_{L^p(w)} + (sum_j (t_j^{-s} omega^m(f, t_j))^q ln 2)^{1/q}`
/// on the same levels as [`difference_seminorm`].
pub fn modulus_besov_norm(f: &SampledField, s: f64, p: f64, q: f64, w: &PowerWeight, m: u32) -> Result<f64> {
    check_weight(f, w)?;
    let terms = difference_levels(f.grid())
        .iter()
        .map(|&t| Ok(t.powf(-s) * modulus_of_smoothness(f, m, p, w, t)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(weighted_lp_of_values(&f.value_norms(), p, w) + dt_over_t_sum(&terms, q))
}

/// Constant `C` of the lattice bound `[f]^{(m)} <= C (||f||^{(m)} - ||f||_{L^p})`:
/// the largest normalized offset count `#{|h| <= t_j} h^d / t_j^d`.
pub fn modulus_bound_constant(grid: &GridSpec) -> f64 {
    let levels = difference_levels(grid);
    let mut counts = vec![0usize; levels.len()];
    for o in offsets(grid) {
        if let Some(j) = finest_level(&levels, offset_length(grid, o)) {
            counts[j] += 1;
        }
    }
    let mut total = 0usize;
    let mut best: f64 = 0.0;
    for j in (0..levels.len()).rev() {
        total += counts[j];
        best = best.max(total as f64 * grid.cell_volume() / levels[j].powi(grid.dim() as i32));
    }
    best
}

/// Evaluation mode of [`randomized_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RandomizedMode {
    /// Average over `samples` sign vectors; sample `i` draws its signs from
    /// ChaCha8 with the given seed on stream `i`.
    MonteCarlo { samples: usize, seed: u64 },
    /// Closed form `E|sum r_k a_k|^2 = sum |a_k|^2`; `p = 2`, Hilbert values only.
    ExactP2,
}

impl Default for RandomizedMode {
    fn default() -> Self {
        RandomizedMode::MonteCarlo { samples: 1024, seed: 0 }
    }
}

/// Rademacher signs for sample `index`, independent of evaluation order.
pub fn rademacher_signs(seed: u64, index: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..count).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// `||sum_k r_k 2^{sk} S_k f||_{L^p(Omega; L^p(w))}`.
pub fn randomized_norm(
    f: &SampledField,
    fam: &DyadicFamily,
    s: f64,
    p: f64,
    w: &PowerWeight,
    mode: RandomizedMode,
) -> Result<f64> {
    check_weight(f, w)?;
    check_family(f, fam)?;
    let bl = blocks(fam, f)?;
    let factors: Vec<f64> = (0..bl.len()).map(|k| 2f64.powf(s * k as f64)).collect();
    let pts = f.grid().points();
    match mode {
        RandomizedMode::ExactP2 => {
            if p != 2.0 {
                return param(format!("exact_p2 mode needs p = 2, got p = {p}"));
            }
            if f.components() > 1 && f.r_value() != 2.0 {
                return param("exact_p2 mode needs a Hilbert value norm (r_value = 2)");
            }
            let sq: Vec<f64> = (0..pts)
                .map(|i| {
                    bl.iter()
                        .zip(&factors)
                        .map(|(b, c)| {
                            (0..b.components())
                                .map(|comp| (c * b.at(comp, i)).norm_sqr())
                                .sum::<f64>()
                        })
                        .sum::<f64>()
                        .sqrt()
                })
                .collect();
            Ok(weighted_lp_of_values(&sq, 2.0, w))
        }
        RandomizedMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return param("monte_carlo needs at least one sample");
            }
            let n = f.components();
            let per_sample: Vec<f64> = (0..samples as u64)
                .into_par_iter()
                .map(|idx| {
                    let signs = rademacher_signs(seed, idx, bl.len());
                    let coef: Vec<f64> = signs.iter().zip(&factors).map(|(r, c)| r * c).collect();
                    let mut comps = vec![0.0; n];
                    let values: Vec<f64> = (0..pts)
                        .map(|i| {
                            for (c, slot) in comps.iter_mut().enumerate() {
                                let v: Complex64 = bl.iter().zip(&coef).map(|(b, a)| b.at(c, i) * a).sum();
                                *slot = v.norm();
                            }
                            lr_norm(comps.iter().copied(), f.r_value())
                        })
                        .collect();
                    weighted_lp_of_values(&values, p, w).powf(p)
                })
                .collect();
            let mean = per_sample.iter().sum::<f64>() / samples as f64;
            Ok(mean.powf(1.0 / p))
        }
    }
}

/// Torus offsets for the Hoelder quotient: all non-zero lattice offsets.
fn holder_seminorm(g: &SampledField, exponent: f64) -> f64 {
    let grid = *g.grid();
    let pts = grid.points();
    offsets(&grid)
        .par_iter()
        .map(|&o| {
            let dist = offset_length(&grid, o).powf(exponent);
            let mut comps = vec![0.0; g.components()];
            (0..pts)
                .map(|i| {
                    let j = shift_index(&grid, i, o, 1);
                    for (c, slot) in comps.iter_mut().enumerate() {
                        *slot = (g.at(c, j) - g.at(c, i)).norm();
                    }
                    lr_norm(comps.iter().copied(), g.r_value())
                })
                .fold(0.0, f64::max)
                / dist
        })
        .reduce(|| 0.0, f64::max)
}

/// Grid `BC^sigma` norm: `sum_{|alpha| <= floor(sigma)} sup ||D^alpha f||` plus,
/// for non-integer `sigma`, `sum_{|alpha| = floor(sigma)}` of the lattice
/// Hoelder quotient of order `sigma - floor(sigma)` (periodic distance).
pub fn holder_norm(f: &SampledField, sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return param(format!("Hoelder order must be finite and >= 0, got {sigma}"));
    }
    let order = sigma.floor() as u32;
    let frac = sigma - order as f64;
    let mut total = 0.0;
    for a in multi_indices(f.grid().dim(), order) {
        let d = derivative(f, a)?;
        total += d.sup_norm();
        if frac > 0.0 && a[0] + a[1] == order {
            total += holder_seminorm(&d, frac);
        }
    }
    Ok(total)
}

/// Declared Fourier support of a [`BandedSequence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSupport {
    /// `supp F f_k` in `{|xi| <= A 2^k}`.
    Ball { a: f64 },
    /// `supp F f_0` in `{|xi| <= 2^{k0}}` and `supp F f_k` in
    /// `{2^{k-k0} <= |xi| <= 2^{k+k0}}` for `k >= 1`.
    Annulus { k0: u32 },
}

impl SequenceSupport {
    /// Whether `|xi| = r` lies in the declared support of member `k`.
    pub fn contains(&self, k: usize, r: f64) -> bool {
        let tol = 1e-9;
        match *self {
            SequenceSupport::Ball { a } => r <= a * 2f64.powi(k as i32) + tol,
            SequenceSupport::Annulus { k0 } => {
                let hi = 2f64.powi(k as i32 + k0 as i32);
                if k == 0 {
                    r <= 2f64.powi(k0 as i32) + tol
                } else {
                    r >= 2f64.powi(k as i32 - k0 as i32) - tol && r <= hi + tol
                }
            }
        }
    }
}

/// A finite sequence `(f_k)_{k=0..K}` with spectrally verified supports.
#[derive(Debug, Clone)]
pub struct BandedSequence {
    members: Vec<SampledField>,
    support: SequenceSupport,
}

impl BandedSequence {
    /// Relative out-of-support spectral mass tolerated at construction.
    pub const SUPPORT_TOLERANCE: f64 = 1e-12;

    pub fn new(members: Vec<SampledField>, support: SequenceSupport) -> Result<Self> {
        let Some(first) = members.first() else {
            return param("a banded sequence needs at least one member");
        };
        let grid = *first.grid();
        for (k, f) in members.iter().enumerate() {
            if *f.grid() != grid {
                return Err(Error::GridMismatch(format!("member {k} lives on another grid")));
            }
            let out = dft(f)?.mass_outside(|r| support.contains(k, r));
            if out > Self::SUPPORT_TOLERANCE {
                return Err(Error::Support(format!(
                    "member {k} has relative spectral mass {out:.3e} outside {support:?}"
                )));
            }
        }
        Ok(Self { members, support })
    }

    pub fn members(&self) -> &[SampledField] {
        &self.members
    }

    pub fn support(&self) -> SequenceSupport {
        self.support
    }

    pub fn grid(&self) -> &GridSpec {
        self.members[0].grid()
    }

    fn value_norms(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(SampledField::value_norms).collect()
    }
}

/// Aggregation order of [`seq_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "order", rename_all = "snake_case")]
pub enum SeqOrder {
    /// `||(2^{sk} f_k)||_{L^p(w; l^q)}`.
    LpOuter,
    /// `||(2^{sk} f_k)||_{l^q(L^p(w))}`.
    LqOuter,
    /// `||(2^{sk} ||f_k||_{L^{p(r)}(w)})||_{l^q}` with the inner weighted `L^r`
    /// along the last axis; on a 1-D grid the inner norm is `L^r(w)` alone.
    Mixed { r: f64 },
}

/// `L^{p(r)}(w)` of pointwise values; collapses to `L^r(w)` when `d = 1`.
pub fn mixed_or_lr(values: &[f64], p: f64, r: f64, w: &PowerWeight) -> Result<f64> {
    if w.grid().dim() == 1 {
        Ok(weighted_lp_of_values(values, r, w))
    } else {
        mixed_lp_of_values(values, p, r, w)
    }
}

/// Sequence-space norm of a banded sequence.
pub fn seq_norm(seq: &BandedSequence, s: f64, p: f64, q: f64, w: &PowerWeight, order: SeqOrder) -> Result<f64> {
    if seq.grid() != w.grid() {
        return Err(Error::GridMismatch("sequence and weight grids differ".into()));
    }
    let norms = seq.value_norms();
    match order {
        SeqOrder::LpOuter => Ok(lp_of_lq(&norms, s, p, q, w)),
        SeqOrder::LqOuter => Ok(lq_of_lp(&norms, s, p, q, w)),
        SeqOrder::Mixed { r } => {
            let parts = norms
                .iter()
                .enumerate()
                .map(|(k, a)| Ok(2f64.powf(s * k as f64) * mixed_or_lr(a, p, r, w)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(lr_norm(parts.into_iter(), q))
        }
    }
}

/// A function space with its parameters. Weights are axis-last powers `|t|^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Lp { p: f64, gamma: f64 },
    Besov { s: f64, p: f64, q: f64, gamma: f64 },
    TriebelLizorkin { s: f64, p: f64, q: f64, gamma: f64 },
    Bessel { s: f64, p: f64, gamma: f64 },
    Sobolev { m: u32, p: f64, gamma: f64 },
    MixedLp { p: f64, r: f64, gamma: f64 },
}

impl SpaceSpec {
    pub fn p(&self) -> f64 {
        match *self {
            SpaceSpec::Lp { p, .. }
            | SpaceSpec::Besov { p, .. }
            | SpaceSpec::TriebelLizorkin { p, .. }
            | SpaceSpec::Bessel { p, .. }
            | SpaceSpec::Sobolev { p, .. }
            | SpaceSpec::MixedLp { p, .. } => p,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            SpaceSpec::Lp { gamma, .. }
            | SpaceSpec::Besov { gamma, .. }
            | SpaceSpec::TriebelLizorkin { gamma, .. }
            | SpaceSpec::Bessel { gamma, .. }
            | SpaceSpec::Sobolev { gamma, .. }
            | SpaceSpec::MixedLp { gamma, .. } => gamma,
        }
    }

    /// Smoothness index (`m` for Sobolev, 0 for Lebesgue spaces).
    pub fn smoothness(&self) -> f64 {
        match *self {
            SpaceSpec::Besov { s, .. } | SpaceSpec::TriebelLizorkin { s, .. } | SpaceSpec::Bessel { s, .. } => s,
            SpaceSpec::Sobolev { m, .. } => m as f64,
            SpaceSpec::Lp { .. } | SpaceSpec::MixedLp { .. } => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if !(p > 1.0 && p.is_finite()) {
            return param(format!("p must lie in (1, inf), got {p}"));
        }
        if !self.gamma().is_finite() || !self.smoothness().is_finite() {
            return param("gamma and s must be finite");
        }
        match *self {
            SpaceSpec::Besov { q, .. } | SpaceSpec::TriebelLizorkin { q, .. } if !(q >= 1.0) => {
                param(format!("q must lie in [1, inf], got {q}"))
            }
            SpaceSpec::MixedLp { r, .. } if !(r > 1.0 && r.is_finite()) => {
                param(format!("r must lie in (1, inf), got {r}"))
            }
            _ => Ok(()),
        }
    }

    /// The axis-last power weight of this space on `grid`.
    pub fn weight(&self, grid: &GridSpec) -> Result<PowerWeight> {
        axis_weight(grid, self.gamma())
    }

    /// Short label: `L`, `H`, `W(m=1)`, `B(q=2)`, `F(q=inf)`, `L(r=3)`.
    pub fn label(&self) -> String {
        match *self {
            SpaceSpec::Lp { .. } => "L".into(),
            SpaceSpec::Bessel { .. } => "H".into(),
            SpaceSpec::Sobolev { m, .. } => format!("W(m={m})"),
            SpaceSpec::Besov { q, .. } => format!("B(q={})", fmt_exponent(q)),
            SpaceSpec::TriebelLizorkin { q, .. } => format!("F(q={})", fmt_exponent(q)),
            SpaceSpec::MixedLp { r, .. } => format!("L(r={})", fmt_exponent(r)),
        }
    }

    /// Norm of `f` in this space; `fam` supplies the blocks of B and F norms.
    pub fn norm(&self, f: &SampledField, fam: &DyadicFamily) -> Result<f64> {
        self.validate()?;
        let w = self.weight(f.grid())?;
        self.norm_with_weight(f, fam, &w)
    }

    /// As [`SpaceSpec::norm`] with a prebuilt weight for this space's `gamma`.
    pub fn norm_with_weight(&self, f: &SampledField, fam: &DyadicFamily, w: &PowerWeight) -> Result<f64> {
        check_weight(f, w)?;
        match *self {
            SpaceSpec::Lp { p, .. } => Ok(weighted_lp_of_values(&f.value_norms(), p, w)),
            SpaceSpec::Besov { s, p, q, .. } => besov_norm(f, fam, s, p, q, w),
            SpaceSpec::TriebelLizorkin { s, p, q, .. } => tl_norm(f, fam, s, p, q, w),
            SpaceSpec::Bessel { s, p, .. } => bessel_norm(f, s, p, w),
            SpaceSpec::Sobolev { m, p, .. } => sobolev_norm(f, m, p, w),
            SpaceSpec::MixedLp { p, r, .. } => mixed_lp_of_values(&f.value_norms(), p, r, w),
        }
    }

    /// Whether `self -> target` holds with constant exactly 1 on the lattice:
    /// same `(s, p, gamma)` and either the same scale with `q` growing, or
    /// `B_{p,min(p,q)} -> F_{p,q} -> B_{p,max(p,q)}` (Minkowski).
    pub fn embeds_with_unit_constant(&self, target: &SpaceSpec) -> bool {
        use SpaceSpec::{Besov as B, TriebelLizorkin as F};
        let same = |s0: f64, p0: f64, g0: f64, s1: f64, p1: f64, g1: f64| s0 == s1 && p0 == p1 && g0 == g1;
        match (*self, *target) {
            (
                B { s, p, q, gamma },
                B {
                    s: s1,
                    p: p1,
                    q: q1,
                    gamma: g1,
                },
            )
            | (
                F { s, p, q, gamma },
                F {
                    s: s1,
                    p: p1,
                    q: q1,
                    gamma: g1,
                },
            ) => same(s, p, gamma, s1, p1, g1) && q <= q1,
            (
                B { s, p, q, gamma },
                F {
                    s: s1,
                    p: p1,
                    q: q1,
                    gamma: g1,
                },
            ) => same(s, p, gamma, s1, p1, g1) && q <= p.min(q1),
            (
                F { s, p, q, gamma },
                B {
                    s: s1,
                    p: p1,
                    q: q1,
                    gamma: g1,
                },
            ) => same(s, p, gamma, s1, p1, g1) && q1 >= p.max(q),
            _ => false,
        }
    }
}

pub(crate) fn fmt_exponent(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// One row of an embedding report: `ratio = ||f||_target / ||f||_source`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingRow {
    pub source: String,
    pub target: String,
    pub ratio: f64,
    /// The embedding holds with constant 1 on the lattice, so `ratio <= 1`.
    pub exact: bool,
}

impl EmbeddingRow {
    /// Tolerance for unit-constant embeddings.
    pub const EXACT_TOLERANCE: f64 = 1e-12;

    pub fn holds(&self) -> bool {
        !self.exact || self.ratio <= 1.0 + Self::EXACT_TOLERANCE
    }
}

/// Norm ratios of `f` for each `(source, target)` pair.
pub fn embedding_report(
    f: &SampledField,
    fam: &DyadicFamily,
    pairs: &[(SpaceSpec, SpaceSpec)],
) -> Result<Vec<EmbeddingRow>> {
    pairs
        .iter()
        .map(|(src, dst)| {
            let a = src.norm(f, fam)?;
            let b = dst.norm(f, fam)?;
            if a == 0.0 {
                return Err(Error::Parameter(format!("zero source norm in {}", src.label())));
            }
            Ok(EmbeddingRow {
                source: src.label(),
                target: dst.label(),
                ratio: b / a,
                exact: src.embeds_with_unit_constant(dst),
            })
        })
        .collect()
}

/// Parameters of the discrete Jawerth-Franke embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JawerthFranke {
    pub s0: f64,
    pub s1: f64,
    pub p0: f64,
    pub p1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl JawerthFranke {
    /// `s0 > s1`, `1 < p0 < p1 < inf`, `gamma_i in (-1, p_i - 1)`,
    /// `gamma0/p0 >= gamma1/p1` and `s0 - (1+gamma0)/p0 >= s1 - (1+gamma1)/p1`.
    pub fn validate(&self) -> Result<()> {
        let JawerthFranke {
            s0,
            s1,
            p0,
            p1,
            gamma0,
            gamma1,
        } = *self;
        if !(s0 > s1) {
            return param(format!("need s0 > s1, got {s0} <= {s1}"));
        }
        if !(1.0 < p0 && p0 < p1 && p1.is_finite()) {
            return param(format!("need 1 < p0 < p1 < inf, got p0 = {p0}, p1 = {p1}"));
        }
        if !(gamma0 > -1.0 && gamma0 < p0 - 1.0) {
            return Err(Error::NotAp(format!("gamma0 = {gamma0} outside (-1, {})", p0 - 1.0)));
        }
        if !(gamma1 > -1.0 && gamma1 < p1 - 1.0) {
            return Err(Error::NotAp(format!("gamma1 = {gamma1} outside (-1, {})", p1 - 1.0)));
        }
        if gamma0 / p0 < gamma1 / p1 {
            return param("need gamma0/p0 >= gamma1/p1");
        }
        if s0 - (1.0 + gamma0) / p0 < s1 - (1.0 + gamma1) / p1 {
            return param("need s0 - (1+gamma0)/p0 >= s1 - (1+gamma1)/p1");
        }
        Ok(())
    }
}

/// Ratios `target / source` of the two Jawerth-Franke embeddings for one sequence:
/// `l^{s0,p1}(L^{p1(p0)}(w0)) -> L^{p1}(w1; l^{s1,q})` and
/// `L^{p0}(w0; l^{s0,q}) -> l^{s1,p0}(L^{p0(p1)}(w1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JawerthFrankeRatios {
    pub b_to_f: f64,
    pub f_to_b: f64,
}

pub fn jawerth_franke_ratios(seq: &BandedSequence, jf: &JawerthFranke, q: f64) -> Result<JawerthFrankeRatios> {
    jf.validate()?;
    let w0 = axis_weight(seq.grid(), jf.gamma0)?;
    let w1 = axis_weight(seq.grid(), jf.gamma1)?;
    let bf_src = seq_norm(seq, jf.s0, jf.p1, jf.p1, &w0, SeqOrder::Mixed { r: jf.p0 })?;
    let bf_dst = seq_norm(seq, jf.s1, jf.p1, q, &w1, SeqOrder::LpOuter)?;
    let fb_src = seq_norm(seq, jf.s0, jf.p0, q, &w0, SeqOrder::LpOuter)?;
    let fb_dst = seq_norm(seq, jf.s1, jf.p0, jf.p0, &w1, SeqOrder::Mixed { r: jf.p1 })?;
    if bf_src == 0.0 || fb_src == 0.0 {
        return param("zero sequence");
    }
    Ok(JawerthFrankeRatios {
        b_to_f: bf_dst / bf_src,
        f_to_b: fb_dst / fb_src,
    })
}

/// Comparison of partial sums with blocks for negative smoothness:
/// `lhs = ||(2^{sl} S^l f)||_{l^q(L^{p(r)}(w))}`, `rhs` the same for `S_k f`,
/// and `bound = sum_{l>=0} 2^{sl}` so that `lhs <= bound * rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialSumComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub bound: f64,
}

pub fn partial_sum_comparison(
    f: &SampledField,
    fam: &DyadicFamily,
    s: f64,
    p: f64,
    r: f64,
    q: f64,
    w: &PowerWeight,
) -> Result<PartialSumComparison> {
    check_weight(f, w)?;
    if !(s < 0.0) {
        return param(format!("partial-sum comparison needs s < 0, got {s}"));
    }
    let bl = blocks(fam, f)?;
    let mut running = SampledField::zeros(*f.grid(), f.components(), f.r_value());
    let mut lhs_terms = Vec::with_capacity(bl.len());
    let mut rhs_terms = Vec::with_capacity(bl.len());
    for (k, b) in bl.iter().enumerate() {
        running.add_assign(b);
        let c = 2f64.powf(s * k as f64);
        lhs_terms.push(c * mixed_or_lr(&running.value_norms(), p, r, w)?);
        rhs_terms.push(c * mixed_or_lr(&b.value_norms(), p, r, w)?);
    }
    Ok(PartialSumComparison {
        lhs: lr_norm(lhs_terms.into_iter(), q),
        rhs: lr_norm(rhs_terms.into_iter(), q),
        bound: 1.0 / (1.0 - 2f64.powf(s)),
    })
}
