//! Bony paraproducts at finite scale.
//!
//! With blocks up to level `l`, the double sum over pairs `(i, k)` of
//! `(S_i m)(S_k f)` splits by `i - k` into
//!
//! - `Pi1 = sum_{k=2}^{l} (S^{k-2} m)(S_k f)` for `i <= k - 2`,
//! - `Pi2 = sum_{k=0}^{l} sum_{j=-1}^{1} (S_{k+j} m)(S_k f)` for `|i - k| <= 1`,
//!   keeping only `0 <= k + j <= l`,
//! - `Pi3 = sum_{k=2}^{l} (S_k m)(S^{k-2} f)` for `i >= k + 2`,
//!
//! so `Pi1 + Pi2 + Pi3 = (S^l m)(S^l f)` holds exactly, up to roundoff.

use serde::Serialize;

use crate::dyadic::{blocks, DyadicFamily};
use crate::error::{param, Error, Result};
use crate::grid::{dft, pointwise_multiply, GridSpec, SampledField};
use crate::norms::{besov_norm, bessel_norm, tl_norm};
use crate::weights::axis_weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TermKind {
    Pi1,
    Pi2,
    Pi3,
}

/// One summand `(S_{k+j} m)(S_k f)` (`Pi2`) or the dominated products of
/// `Pi1`/`Pi3` at level `k` (`j = 0`).
#[derive(Debug, Clone)]
pub struct ParaproductTerm {
    pub kind: TermKind,
    pub k: usize,
    pub j: i64,
    pub field: SampledField,
}

#[derive(Debug, Clone)]
pub struct ParaproductTriple {
    pub pi1: SampledField,
    pub pi2: SampledField,
    pub pi3: SampledField,
    pub level: usize,
    /// Individual summands; empty unless requested.
    pub terms: Vec<ParaproductTerm>,
}

impl ParaproductTriple {
    pub fn sum(&self) -> SampledField {
        let mut s = self.pi1.clone();
        s.add_assign(&self.pi2);
        s.add_assign(&self.pi3);
        s
    }
}

fn cumulative(bl: &[SampledField]) -> Vec<SampledField> {
    let mut out: Vec<SampledField> = Vec::with_capacity(bl.len());
    for b in bl {
        let next = match out.last() {
            Some(prev) => {
                let mut s = prev.clone();
                s.add_assign(b);
                s
            }
            None => b.clone(),
        };
        out.push(next);
    }
    out
}

/// `Pi1^l, Pi2^l, Pi3^l` of `m` (scalar or diagonal) and `f`.
pub fn paraproducts(m: &SampledField, f: &SampledField, fam: &DyadicFamily, l: usize) -> Result<ParaproductTriple> {
    compute(m, f, fam, l, false)
}

/// As [`paraproducts`], additionally retaining every summand.
pub fn paraproducts_with_terms(
    m: &SampledField,
    f: &SampledField,
    fam: &DyadicFamily,
    l: usize,
) -> Result<ParaproductTriple> {
    compute(m, f, fam, l, true)
}

fn compute(m: &SampledField, f: &SampledField, fam: &DyadicFamily, l: usize, keep: bool) -> Result<ParaproductTriple> {
    if m.grid() != fam.grid() || f.grid() != fam.grid() {
        return Err(Error::GridMismatch(
            "multiplier, field and family must share a grid".into(),
        ));
    }
    if l > fam.levels() {
        return Err(Error::Level(format!("level {l} exceeds K = {}", fam.levels())));
    }
    let bm: Vec<SampledField> = blocks(fam, m)?.into_iter().take(l + 1).collect();
    let bf: Vec<SampledField> = blocks(fam, f)?.into_iter().take(l + 1).collect();
    let pm = cumulative(&bm);
    let pf = cumulative(&bf);
    let zero = SampledField::zeros(*f.grid(), f.components(), f.r_value());
    let (mut pi1, mut pi2, mut pi3) = (zero.clone(), zero.clone(), zero);
    let mut terms = Vec::new();
    let mut push = |acc: &mut SampledField, kind, k, j, term: SampledField| {
        acc.add_assign(&term);
        if keep {
            terms.push(ParaproductTerm {
                kind,
                k,
                j,
                field: term,
            });
        }
    };
    for k in 2..=l {
        push(&mut pi1, TermKind::Pi1, k, 0, pointwise_multiply(&pm[k - 2], &bf[k])?);
    }
    for k in 0..=l {
        for j in -1i64..=1 {
            let i = k as i64 + j;
            if i < 0 || i > l as i64 {
                continue;
            }
            push(
                &mut pi2,
                TermKind::Pi2,
                k,
                j,
                pointwise_multiply(&bm[i as usize], &bf[k])?,
            );
        }
    }
    for k in 2..=l {
        push(&mut pi3, TermKind::Pi3, k, 0, pointwise_multiply(&bm[k], &pf[k - 2])?);
    }
    Ok(ParaproductTriple {
        pi1,
        pi2,
        pi3,
        level: l,
        terms,
    })
}

/// Region that contains the Fourier support of a term, `(lo, hi)` in `|xi|`:
/// `{|xi| <= 5 2^k}` for `Pi2`, `{2^{k-3} <= |xi| <= 2^{k+1}}` for `Pi1`, `Pi3`.
pub fn support_region(kind: TermKind, k: usize) -> (f64, f64) {
    let p = 2f64.powi(k as i32);
    match kind {
        TermKind::Pi2 => (0.0, 5.0 * p),
        TermKind::Pi1 | TermKind::Pi3 => (p / 8.0, 2.0 * p),
    }
}

/// Largest `|xi|` the exact product can reach before grid wrap-around:
/// the sum of the factor supports (generator support radius `3/2 2^k`).
fn product_reach(kind: TermKind, k: usize, j: i64) -> f64 {
    let top = |level: i64| 1.5 * 2f64.powi(level as i32);
    match kind {
        TermKind::Pi2 => top(k as i64 + j) + top(k as i64),
        TermKind::Pi1 | TermKind::Pi3 => top(k as i64) + top(k as i64 - 2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub kind: TermKind,
    pub k: usize,
    pub j: i64,
    /// Relative spectral mass outside [`support_region`].
    pub outside: f64,
    /// The product's reach exceeds `xi_max`, so wrap-around may move mass.
    pub aliasing_possible: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportAudit {
    pub rows: Vec<AuditRow>,
}

impl SupportAudit {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    /// All rows whose products stay inside the lattice pass.
    pub fn unaliased_passed(&self) -> bool {
        self.rows.iter().filter(|r| !r.aliasing_possible).all(|r| r.passed)
    }
}

/// Audits every retained term against its support region.
pub fn support_audit(triple: &ParaproductTriple, grid: &GridSpec) -> Result<SupportAudit> {
    if triple.terms.is_empty() && triple.level >= 2 {
        return param("support audit needs retained terms (use paraproducts_with_terms)");
    }
    let xi_max = grid.xi_max();
    let rows = triple
        .terms
        .iter()
        .map(|t| {
            let (lo, hi) = support_region(t.kind, t.k);
            let outside = dft(&t.field)?.mass_outside(|r| r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12));
            Ok(AuditRow {
                kind: t.kind,
                k: t.k,
                j: t.j,
                outside,
                aliasing_possible: product_reach(t.kind, t.k, t.j) > xi_max,
                passed: outside <= SupportAudit::TOLERANCE,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportAudit { rows })
}

/// `Pi1` bound ratios against `||m||_inf ||f||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pi1Ratios {
    /// `||Pi1^K||_{H^{s,p}} / (||m||_inf ||f||_{H^{s,p}})`.
    pub bessel: f64,
    /// `||Pi1^K||_{F^s_{p,q}} / (||m||_inf ||f||_{F^s_{p,q}})`.
    pub triebel: f64,
}

pub fn pi1_bound_check(
    m: &SampledField,
    f: &SampledField,
    fam: &DyadicFamily,
    s: f64,
    p: f64,
    q: f64,
    gamma: f64,
) -> Result<Pi1Ratios> {
    let w = axis_weight(f.grid(), gamma)?;
    let pi = paraproducts(m, f, fam, fam.levels())?;
    let sup = m.sup_norm();
    let hf = bessel_norm(f, s, p, &w)?;
    let ff = tl_norm(f, fam, s, p, q, &w)?;
    if sup == 0.0 || hf == 0.0 || ff == 0.0 {
        return param("pi1 bound check needs nonzero m and f");
    }
    Ok(Pi1Ratios {
        bessel: bessel_norm(&pi.pi1, s, p, &w)? / (sup * hf),
        triebel: tl_norm(&pi.pi1, fam, s, p, q, &w)? / (sup * ff),
    })
}

/// `Pi2`/`Pi3` bound ratios
/// `||Pi_i||_{F^s_{p,1}(w_gamma)} / (||m||_{B^sigma_{r,inf}(R, w_mu)} ||f||_{F^s_{p,inf}(w_gamma)})`
/// with `sigma = (1 + mu)/r` and `m` read along the last axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pi23Ratios {
    pub pi2: f64,
    pub pi3: f64,
    pub m_factor: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn pi23_bound_check(
    m: &SampledField,
    f: &SampledField,
    fam: &DyadicFamily,
    s: f64,
    p: f64,
    gamma: f64,
    r: f64,
    mu: f64,
) -> Result<Pi23Ratios> {
    if !(mu > -1.0 && mu < r - 1.0) {
        return Err(Error::NotAp(format!("mu = {mu} outside (-1, {})", r - 1.0)));
    }
    let w = axis_weight(f.grid(), gamma)?;
    let pi = paraproducts(m, f, fam, fam.levels())?;
    let profile = m.last_axis_profile()?;
    let fam1 = crate::dyadic::build_family(profile.grid(), fam.levels())?;
    let wm = axis_weight(profile.grid(), mu)?;
    let m_factor = besov_norm(&profile, &fam1, (1.0 + mu) / r, r, f64::INFINITY, &wm)?;
    let denom = m_factor * tl_norm(f, fam, s, p, f64::INFINITY, &w)?;
    if denom == 0.0 {
        return param("pi2/pi3 bound check needs nonzero m and f");
    }
    Ok(Pi23Ratios {
        pi2: tl_norm(&pi.pi2, fam, s, p, 1.0, &w)? / denom,
        pi3: tl_norm(&pi.pi3, fam, s, p, 1.0, &w)? / denom,
        m_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{build_family, partial};
    use crate::grid::{make_grid, sample_family, FamilyKind};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn random(grid: &GridSpec, hi: f64, seed: u64) -> SampledField {
        sample_family(&FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: hi }, grid, seed).unwrap()
    }

    fn reconstruction_error(m: &SampledField, f: &SampledField, fam: &DyadicFamily, l: usize) -> f64 {
        let t = paraproducts(m, f, fam, l).unwrap();
        let direct =
            pointwise_multiply(&partial(fam, l as i64, m).unwrap(), &partial(fam, l as i64, f).unwrap()).unwrap();
        t.sum().sub(&direct).unwrap().max_abs() / (m.sup_norm() * f.sup_norm())
    }

    #[test]
    fn reconstruction_is_exact() {
        let g = make_grid(1, 16.0, 1024).unwrap();
        let fam = build_family(&g, 6).unwrap();
        for seed in 0..4 {
            let m = random(&g, 90.0, seed);
            let f = random(&g, 90.0, seed + 77);
            for l in 0..=6 {
                assert!(reconstruction_error(&m, &f, &fam, l) < 1e-12);
            }
        }
        let g2 = make_grid(2, 4.0, 64).unwrap();
        let fam2 = build_family(&g2, 4).unwrap();
        let m = random(&g2, 24.0, 1);
        let f = random(&g2, 24.0, 2);
        assert!(reconstruction_error(&m, &f, &fam2, 4) < 1e-12);
    }

    #[test]
    fn constant_multiplier() {
        let g = make_grid(1, 16.0, 512).unwrap();
        let fam = build_family(&g, 5).unwrap();
        let one = SampledField::from_real_fn(g, |_| 1.0).unwrap();
        let f = random(&g, 48.0, 3);
        let t = paraproducts(&one, &f, &fam, 5).unwrap();
        assert_eq!(t.pi3.max_abs(), 0.0);
        let sf = partial(&fam, 5, &f).unwrap();
        assert!(t.sum().sub(&sf).unwrap().max_abs() < 1e-12 * f.sup_norm());
        // Pi2 keeps only (S_0 m)(S_0 f + S_1 f).
        let b = blocks(&fam, &f).unwrap();
        let want = b[0].add(&b[1]).unwrap();
        assert!(t.pi2.sub(&want).unwrap().max_abs() < 1e-12 * f.sup_norm());
        let audit = support_audit(&paraproducts_with_terms(&one, &f, &fam, 5).unwrap(), &g).unwrap();
        assert!(audit.all_passed());
    }

    #[test]
    fn separated_modes_land_in_pi1() {
        // m at |xi| in band 1 only, f in band 4 only: the pair (1, 4) has i <= k - 2.
        let g = make_grid(1, 16.0, 512).unwrap();
        let fam = build_family(&g, 5).unwrap();
        let mode = |j: i64| {
            let xi = PI * j as f64 / 16.0;
            (
                SampledField::from_fn(g, |x| Complex64::from_polar(1.0, xi * x[0])).unwrap(),
                xi,
            )
        };
        let only = |xi: f64| {
            let v: Vec<usize> = (0..=5).filter(|&k| crate::dyadic::band_value(k, xi) != 0.0).collect();
            (v.len() == 1).then(|| v[0])
        };
        let (m, xm) = mode(9);
        let (f, xf) = mode(70);
        let (km, kf) = (only(xm).unwrap(), only(xf).unwrap());
        assert!(kf >= km + 2);
        let t = paraproducts(&m, &f, &fam, 5).unwrap();
        assert!(t.pi2.max_abs() < 1e-13 && t.pi3.max_abs() < 1e-13);
        assert!(t.pi1.max_abs() > 0.5);
    }

    #[test]
    fn supports_and_aliasing_flag() {
        let g = make_grid(1, 16.0, 1024).unwrap();
        // 5 * 2^4 = 80 < xi_max: every product stays on the lattice.
        let fam = build_family(&g, 4).unwrap();
        for seed in 0..3 {
            let m = random(&g, 100.0, seed);
            let f = random(&g, 100.0, seed + 9);
            let t = paraproducts_with_terms(&m, &f, &fam, 4).unwrap();
            let audit = support_audit(&t, &g).unwrap();
            assert!(audit.rows.iter().all(|r| !r.aliasing_possible));
            assert!(audit.all_passed(), "{:?}", audit.rows.iter().find(|r| !r.passed));
        }
        // At K = 6 the top products reach beyond xi_max and are flagged.
        let fam6 = build_family(&g, 6).unwrap();
        let m = random(&g, 100.0, 1);
        let f = random(&g, 100.0, 2);
        let audit = support_audit(&paraproducts_with_terms(&m, &f, &fam6, 6).unwrap(), &g).unwrap();
        assert!(audit.rows.iter().any(|r| r.aliasing_possible));
        assert!(audit.unaliased_passed());
        let bare = paraproducts(&m, &f, &fam6, 6).unwrap();
        assert!(support_audit(&bare, &g).is_err());
    }

    #[test]
    fn bound_checks_are_finite() {
        let g = make_grid(1, 16.0, 512).unwrap();
        let fam = build_family(&g, 5).unwrap();
        let m = sample_family(&FamilyKind::IndicatorHalfspace, &g, 0).unwrap();
        let f = random(&g, 40.0, 5);
        for s in [-0.3, 0.3] {
            let r = pi1_bound_check(&m, &f, &fam, s, 2.0, 2.0, 0.0).unwrap();
            assert!(r.bessel.is_finite() && r.triebel.is_finite() && r.bessel > 0.0);
        }
        let r = pi23_bound_check(&m, &f, &fam, 0.3, 2.0, 0.0, 2.5, 0.0).unwrap();
        assert!(r.pi2.is_finite() && r.pi3.is_finite() && r.m_factor > 0.0);
        assert!(pi23_bound_check(&m, &f, &fam, 0.3, 2.0, 0.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn level_and_grid_errors() {
        let g = make_grid(1, 16.0, 256).unwrap();
        let fam = build_family(&g, 3).unwrap();
        let f = random(&g, 10.0, 0);
        assert!(matches!(paraproducts(&f, &f, &fam, 4), Err(Error::Level(_))));
        let other = random(&make_grid(1, 16.0, 128).unwrap(), 10.0, 0);
        assert!(matches!(paraproducts(&other, &f, &fam, 2), Err(Error::GridMismatch(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn bilinear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let g = make_grid(1, 16.0, 256).unwrap();
            let fam = build_family(&g, 4).unwrap();
            let (m1, m2, f) = (random(&g, 24.0, seed), random(&g, 24.0, seed + 1), random(&g, 24.0, seed + 2));
            let ca = Complex64::new(a, 0.0);
            let cb = Complex64::new(b, 0.0);
            let lin = paraproducts(&m1.scale(ca).axpy(cb, &m2).unwrap(), &f, &fam, 4).unwrap();
            let t1 = paraproducts(&m1, &f, &fam, 4).unwrap();
            let t2 = paraproducts(&m2, &f, &fam, 4).unwrap();
            for (x, y, z) in [(&lin.pi1, &t1.pi1, &t2.pi1), (&lin.pi2, &t1.pi2, &t2.pi2), (&lin.pi3, &t1.pi3, &t2.pi3)] {
                let want = y.scale(ca).axpy(cb, z).unwrap();
                prop_assert!(x.sub(&want).unwrap().max_abs() < 1e-10 * (1.0 + want.max_abs()));
            }
            let lin_f = paraproducts(&f, &m1.scale(ca).axpy(cb, &m2).unwrap(), &fam, 4).unwrap();
            let u1 = paraproducts(&f, &m1, &fam, 4).unwrap();
            let u2 = paraproducts(&f, &m2, &fam, 4).unwrap();
            let want = u1.sum().scale(ca).axpy(cb, &u2.sum()).unwrap();
            prop_assert!(lin_f.sum().sub(&want).unwrap().max_abs() < 1e-10 * (1.0 + want.max_abs()));
        }
    }
}
