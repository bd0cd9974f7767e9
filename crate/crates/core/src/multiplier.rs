//! Pointwise multiplication by the half-space indicator `1_{t >= 0}`:
//! admissibility of `(s, p, gamma)`, the auxiliary parameters `(r, mu)`,
//! the Besov regularity audit of the indicator, and operator-norm sweeps.
//!
//! Operator norms are lower bounds: maxima of `||m f|| / ||f||` over explicit
//! test families. Blow-up is read off the log-log slope of the estimate
//! against `N`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{blocks, build_family, max_levels, DyadicFamily};
use crate::error::{param, Error, Result};
use crate::grid::{make_grid, pointwise_multiply, sample_family, FamilyKind, GridSpec, SampledField};
use crate::norms::{besov_norm, bessel_norm, fmt_exponent, holder_norm, tl_norm, SpaceSpec};
use crate::report::{SweepMeta, SweepReport, SweepRow};
use crate::weights::{axis_weight, dual_exponents, weighted_lp_of_values, PowerWeight};

/// `(s_lo, s_hi) = (-(1 + gamma')/p', (1 + gamma)/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRange {
    pub s_lo: f64,
    pub s_hi: f64,
}

impl AdmissibleRange {
    pub fn contains(&self, s: f64) -> bool {
        self.s_lo < s && s < self.s_hi
    }
}

fn check_p_gamma(p: f64, gamma: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return param(format!("p must lie in (1, inf), got {p}"));
    }
    if !(gamma > -1.0 && gamma < p - 1.0) {
        return Err(Error::NotAp(format!(
            "|t|^{gamma} needs gamma in (-1, {}) for p = {p}",
            p - 1.0
        )));
    }
    Ok(())
}

/// The admissible smoothness range for `(p, gamma)` and strict membership of `s`.
pub fn admissible(s: f64, p: f64, gamma: f64) -> Result<(AdmissibleRange, bool)> {
    check_p_gamma(p, gamma)?;
    let d = dual_exponents(p, gamma)?;
    let range = AdmissibleRange {
        s_lo: -(1.0 + d.gamma_dual) / d.p_dual,
        s_hi: (1.0 + gamma) / p,
    };
    Ok((range, range.contains(s)))
}

/// Which of the three parameter regimes `s` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `-1/p' < s < 1/p`: `1 < r < 1/|s|`, `mu = 0`.
    Middle,
    /// `1/p <= s < (1+gamma)/p`: `1 < r < p`, `mu/r = s - 1/p + eps`.
    Upper,
    /// `-(1+gamma')/p' < s <= -1/p'`: `1 < r < p'`, `mu/r = -s - 1/p' + eps`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSelection {
    pub regime: Regime,
    pub r: f64,
    pub mu: f64,
    pub eps: f64,
    /// `sigma = (1 + mu)/r`, the smoothness of the multiplier's Besov norm.
    pub sigma: f64,
}

/// Picks `(r, mu)`. Middle regime: `r` is the midpoint of `(1, 1/|s|)`
/// (`r = 2` for `s = 0`). Boundary regimes: `r = p - eps (p - 1)` (resp. with
/// `p'`) and `mu` from the displayed relation.
pub fn select_r_mu(s: f64, p: f64, gamma: f64, eps: f64) -> Result<ParamSelection> {
    let (range, ok) = admissible(s, p, gamma)?;
    if !ok {
        return param(format!(
            "s = {s} outside the admissible range ({}, {})",
            range.s_lo, range.s_hi
        ));
    }
    if !(eps > 0.0) {
        return param(format!("eps must be positive, got {eps}"));
    }
    let p_dual = p / (p - 1.0);
    let (regime, r, mu) = if s >= 1.0 / p {
        let r = p - eps * (p - 1.0);
        (Regime::Upper, r, r * (s - 1.0 / p + eps))
    } else if s <= -1.0 / p_dual {
        let r = p_dual - eps * (p_dual - 1.0);
        (Regime::Lower, r, r * (-s - 1.0 / p_dual + eps))
    } else {
        let r = if s == 0.0 { 2.0 } else { 0.5 * (1.0 + 1.0 / s.abs()) };
        (Regime::Middle, r, 0.0)
    };
    if !(r > 1.0) {
        return param(format!("eps = {eps} too large: r = {r} is not > 1"));
    }
    if !(mu > -1.0 && mu < r - 1.0) {
        return param(format!(
            "eps = {eps} too large: mu = {mu} violates mu < r - 1 = {}",
            r - 1.0
        ));
    }
    Ok(ParamSelection {
        regime,
        r,
        mu,
        eps,
        sigma: (1.0 + mu) / r,
    })
}

/// `a_k = 2^{k(1+gamma)/p} ||S_k(1_{t>=0} phi)||_{L^p(w_gamma)}` for `k = 0..=K`,
/// with `phi` the smooth radial cutoff (1 on `|x| <= 1`, 0 on `|x| >= 2`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovAudit {
    pub a: Vec<f64>,
    pub sup: f64,
    /// `log2(a_{k+1}/a_k)` for consecutive levels.
    pub log_steps: Vec<f64>,
}

impl BesovAudit {
    /// Largest `|log2(a_{k+1}/a_k)|` over the top `count` levels.
    pub fn top_flatness(&self, count: usize) -> f64 {
        let n = self.log_steps.len();
        self.log_steps[n + 1 - count.min(n + 1)..]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn audit_of(field: &SampledField, p: f64, gamma: f64, fam: &DyadicFamily) -> Result<BesovAudit> {
    let w = axis_weight(fam.grid(), gamma)?;
    let sigma = (1.0 + gamma) / p;
    let a: Vec<f64> = blocks(fam, field)?
        .iter()
        .enumerate()
        .map(|(k, b)| 2f64.powf(sigma * k as f64) * weighted_lp_of_values(&b.value_norms(), p, &w))
        .collect();
    let log_steps = a.windows(2).map(|x| (x[1] / x[0]).log2()).collect();
    Ok(BesovAudit {
        sup: a.iter().copied().fold(0.0, f64::max),
        a,
        log_steps,
    })
}

/// Audit of the localized indicator `1_{t>=0} phi`.
pub fn indicator_besov_audit(p: f64, gamma: f64, fam: &DyadicFamily) -> Result<BesovAudit> {
    check_p_gamma(p, gamma)?;
    let g = fam.grid();
    let ind = sample_family(&FamilyKind::IndicatorHalfspace, g, 0)?;
    let phi = sample_family(&FamilyKind::SmoothCutoff, g, 0)?;
    audit_of(&pointwise_multiply(&ind, &phi)?, p, gamma, fam)
}

/// The same audit for a smooth field in place of the localized indicator.
pub fn smooth_besov_audit(field: &SampledField, p: f64, gamma: f64, fam: &DyadicFamily) -> Result<BesovAudit> {
    check_p_gamma(p, gamma)?;
    audit_of(field, p, gamma, fam)
}

/// `||m f||_space / ||f||_space` for B, F or H spaces.
pub fn multiplier_ratio(m: &SampledField, f: &SampledField, space: &SpaceSpec, fam: &DyadicFamily) -> Result<f64> {
    space.validate()?;
    let w = space.weight(f.grid())?;
    multiplier_ratio_with_weight(m, f, space, fam, &w)
}

fn multiplier_ratio_with_weight(
    m: &SampledField,
    f: &SampledField,
    space: &SpaceSpec,
    fam: &DyadicFamily,
    w: &PowerWeight,
) -> Result<f64> {
    if !matches!(
        space,
        SpaceSpec::Bessel { .. } | SpaceSpec::Besov { .. } | SpaceSpec::TriebelLizorkin { .. }
    ) {
        return param(format!(
            "multiplier ratio needs an H, B or F space, got {}",
            space.label()
        ));
    }
    let den = space.norm_with_weight(f, fam, w)?;
    if den == 0.0 {
        return param("zero denominator: ||f|| = 0");
    }
    Ok(space.norm_with_weight(&pointwise_multiply(m, f)?, fam, w)? / den)
}

/// Space kinds a sweep runs over; `s`, `p` and `gamma` come from the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Bessel,
    Besov { q: f64 },
    TriebelLizorkin { q: f64 },
}

impl SpaceKind {
    pub fn spec(&self, s: f64, p: f64, gamma: f64) -> SpaceSpec {
        match *self {
            SpaceKind::Bessel => SpaceSpec::Bessel { s, p, gamma },
            SpaceKind::Besov { q } => SpaceSpec::Besov { s, p, q, gamma },
            SpaceKind::TriebelLizorkin { q } => SpaceSpec::TriebelLizorkin { s, p, q, gamma },
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SpaceKind::Bessel => "H".into(),
            SpaceKind::Besov { q } => format!("B(q={})", fmt_exponent(q)),
            SpaceKind::TriebelLizorkin { q } => format!("F(q={})", fmt_exponent(q)),
        }
    }
}

/// Test-function families of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepFamily {
    /// `concentrated_near_hyperplane(2^{-j})` for `j = 0..=depth`, each also
    /// modulated by `exp(i c xi_max t)` for every `c` in `modulations`
    /// (fractions of the grid's `xi_max`).
    ScaleLadder { depth: u32, modulations: Vec<f64> },
    /// A single fixed member.
    Fixed { member: FamilyKind },
}

impl SweepFamily {
    /// The default worst-case family.
    pub fn default_ladder() -> Self {
        SweepFamily::ScaleLadder {
            depth: 7,
            modulations: vec![0.25, 0.5, 0.75],
        }
    }

    pub fn id(&self) -> String {
        match self {
            SweepFamily::ScaleLadder { .. } => "scale_ladder".into(),
            SweepFamily::Fixed { member } => member.id(),
        }
    }

    pub fn members(&self, grid: &GridSpec, seed: u64) -> Result<Vec<SampledField>> {
        match self {
            SweepFamily::ScaleLadder { depth, modulations } => {
                let mut out = Vec::new();
                for j in 0..=*depth {
                    let scale = 2f64.powi(-(j as i32));
                    out.push(sample_family(
                        &FamilyKind::ConcentratedNearHyperplane { scale },
                        grid,
                        seed,
                    )?);
                    for c in modulations {
                        let kind = FamilyKind::ModulatedGaussian {
                            center: 0.0,
                            width: scale,
                            freq: c * grid.xi_max(),
                        };
                        out.push(sample_family(&kind, grid, seed)?);
                    }
                }
                Ok(out)
            }
            SweepFamily::Fixed { member } => Ok(vec![sample_family(member, grid, seed)?]),
        }
    }
}

/// Configuration of an operator-norm sweep for `f -> 1_{t>=0} f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dim: usize,
    pub half_width: f64,
    pub n_list: Vec<usize>,
    pub s_list: Vec<f64>,
    pub p_list: Vec<f64>,
    pub gamma_list: Vec<f64>,
    pub families: Vec<SweepFamily>,
    pub spaces: Vec<SpaceKind>,
    /// Number of dyadic levels; `None` uses the largest admissible `K` per `N`.
    pub levels: Option<usize>,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let nonempty = [
            ("n_list", self.n_list.is_empty()),
            ("s_list", self.s_list.is_empty()),
            ("p_list", self.p_list.is_empty()),
            ("gamma_list", self.gamma_list.is_empty()),
            ("families", self.families.is_empty()),
            ("spaces", self.spaces.is_empty()),
        ];
        if let Some((name, _)) = nonempty.iter().find(|(_, empty)| *empty) {
            return param(format!("{name} must not be empty"));
        }
        if !self
            .families
            .iter()
            .any(|f| matches!(f, SweepFamily::ScaleLadder { .. }))
        {
            return param("families must include a scale_ladder (shrinking concentrated_near_hyperplane)");
        }
        for &n in &self.n_list {
            GridSpec::new(self.dim, self.half_width, n)?;
        }
        if let Some(s) = self.s_list.iter().find(|s| !s.is_finite()) {
            return param(format!("s must be finite, got {s}"));
        }
        for &p in &self.p_list {
            for &gamma in &self.gamma_list {
                check_p_gamma(p, gamma)?;
            }
        }
        for sp in &self.spaces {
            if let SpaceKind::Besov { q } | SpaceKind::TriebelLizorkin { q } = sp {
                if !(*q >= 1.0) {
                    return param(format!("q must lie in [1, inf], got {q}"));
                }
            }
        }
        if let Some(k) = self.levels {
            for &n in &self.n_list {
                build_family(&make_grid(self.dim, self.half_width, n)?, k)?;
            }
        }
        Ok(())
    }
}

struct Resolution {
    grid: GridSpec,
    fam: DyadicFamily,
    indicator: SampledField,
    members: Vec<(String, Vec<SampledField>)>,
}

/// Runs every `(s, p, gamma, N, family, space)` cell; each cell's ratio is the
/// maximum of `||1_{t>=0} f|| / ||f||` over the family. Cells run in parallel
/// and rows come back sorted by `(s, p, gamma, N)`, then family and space in
/// configuration order.
pub fn operator_norm_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let resolutions = cfg
        .n_list
        .iter()
        .map(|&n| {
            let grid = make_grid(cfg.dim, cfg.half_width, n)?;
            let fam = build_family(&grid, cfg.levels.unwrap_or_else(|| max_levels(&grid)))?;
            let indicator = sample_family(&FamilyKind::IndicatorHalfspace, &grid, 0)?;
            let members = cfg
                .families
                .iter()
                .map(|f| Ok((f.id(), f.members(&grid, cfg.seed)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Resolution {
                grid,
                fam,
                indicator,
                members,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut weights: BTreeMap<(usize, u64), PowerWeight> = BTreeMap::new();
    for (ri, res) in resolutions.iter().enumerate() {
        for &g in &cfg.gamma_list {
            weights.insert((ri, g.to_bits()), axis_weight(&res.grid, g)?);
        }
    }
    let mut cells = Vec::new();
    for &s in &cfg.s_list {
        for &p in &cfg.p_list {
            for &gamma in &cfg.gamma_list {
                for ri in 0..resolutions.len() {
                    for fi in 0..cfg.families.len() {
                        for space in &cfg.spaces {
                            cells.push((s, p, gamma, ri, fi, *space));
                        }
                    }
                }
            }
        }
    }
    let mut rows = cells
        .par_iter()
        .map(|&(s, p, gamma, ri, fi, space)| {
            let res = &resolutions[ri];
            let w = &weights[&(ri, gamma.to_bits())];
            let spec = space.spec(s, p, gamma);
            let (fam_id, members) = &res.members[fi];
            let mut best: f64 = 0.0;
            for f in members {
                best = best.max(multiplier_ratio_with_weight(&res.indicator, f, &spec, &res.fam, w)?);
            }
            Ok(SweepRow {
                s,
                p,
                gamma,
                n: res.grid.n(),
                family: fam_id.clone(),
                space: space.label(),
                ratio: best,
                admissible: admissible(s, p, gamma)?.1,
            })
        })
        .collect::<Result<Vec<SweepRow>>>()?;
    // Stable sort keeps configuration order of families and spaces.
    rows.sort_by(|a, b| {
        a.s.total_cmp(&b.s)
            .then(a.p.total_cmp(&b.p))
            .then(a.gamma.total_cmp(&b.gamma))
            .then(a.n.cmp(&b.n))
    });
    Ok(SweepReport {
        meta: SweepMeta {
            seed: cfg.seed,
            dim: cfg.dim,
            half_width: cfg.half_width,
            levels: resolutions.iter().map(|r| (r.grid.n(), r.fam.levels())).collect(),
        },
        rows,
    })
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Refinement-growth slope `d log2(ratio) / d log2(N)` of one sweep line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub s: f64,
    pub p: f64,
    pub gamma: f64,
    pub family: String,
    pub space: String,
    pub slope: f64,
    pub admissible: bool,
    /// Ratio at the finest over the coarsest resolution.
    pub growth_factor: f64,
}

/// Slopes at or below this count as stable.
pub const STABLE_SLOPE: f64 = 0.1;
/// Slopes at or above this count as blow-up.
pub const GROWTH_SLOPE: f64 = 0.3;

/// Groups rows by `(s, p, gamma, family, space)` and regresses over `N`.
pub fn growth_slopes(rows: &[SweepRow]) -> Vec<GrowthRow> {
    let mut groups: Vec<(GrowthRow, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let key = |g: &GrowthRow| {
            g.s == r.s && g.p == r.p && g.gamma == r.gamma && g.family == r.family && g.space == r.space
        };
        let pt = ((r.n as f64).log2(), r.ratio.log2());
        match groups.iter_mut().find(|(g, _)| key(g)) {
            Some((_, pts)) => pts.push(pt),
            None => groups.push((
                GrowthRow {
                    s: r.s,
                    p: r.p,
                    gamma: r.gamma,
                    family: r.family.clone(),
                    space: r.space.clone(),
                    slope: 0.0,
                    admissible: r.admissible,
                    growth_factor: 1.0,
                },
                vec![pt],
            )),
        }
    }
    groups
        .into_iter()
        .map(|(mut g, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            g.slope = if x.len() > 1 { regression_slope(&x, &y) } else { 0.0 };
            g.growth_factor = 2f64.powf(y[y.len() - 1] - y[0]);
            g
        })
        .collect()
}

/// Largest `s >= 0` of the grid such that every `s' in [0, s]` of the grid is
/// stable (slope `<= threshold`) for the given `(p, gamma, family, space)`.
pub fn stability_boundary(
    growth: &[GrowthRow],
    p: f64,
    gamma: f64,
    family: &str,
    space: &str,
    threshold: f64,
) -> Option<f64> {
    let mut line: Vec<&GrowthRow> = growth
        .iter()
        .filter(|g| g.p == p && g.gamma == gamma && g.family == family && g.space == space && g.s >= 0.0)
        .collect();
    line.sort_by(|a, b| a.s.total_cmp(&b.s));
    let mut best = None;
    for g in line {
        if g.slope > threshold {
            break;
        }
        best = Some(g.s);
    }
    best
}

/// Ratios `||m f|| / (||m||_{BC^sigma} ||f||)` in H, B and F norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderRatios {
    pub bessel: f64,
    pub besov: f64,
    pub triebel: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn holder_multiplier_check(
    m: &SampledField,
    f: &SampledField,
    fam: &DyadicFamily,
    s: f64,
    p: f64,
    q: f64,
    gamma: f64,
    sigma: f64,
) -> Result<HolderRatios> {
    if !(sigma > s.abs()) {
        return param(format!("Hoelder order sigma = {sigma} must exceed |s| = {}", s.abs()));
    }
    check_p_gamma(p, gamma)?;
    let w = axis_weight(f.grid(), gamma)?;
    let hm = holder_norm(m, sigma)?;
    let mf = pointwise_multiply(m, f)?;
    let ratio = |a: f64, b: f64| {
        if b == 0.0 || hm == 0.0 {
            param("zero denominator")
        } else {
            Ok(a / (hm * b))
        }
    };
    Ok(HolderRatios {
        bessel: ratio(bessel_norm(&mf, s, p, &w)?, bessel_norm(f, s, p, &w)?)?,
        besov: ratio(besov_norm(&mf, fam, s, p, q, &w)?, besov_norm(f, fam, s, p, q, &w)?)?,
        triebel: ratio(tl_norm(&mf, fam, s, p, q, &w)?, tl_norm(f, fam, s, p, q, &w)?)?,
    })
}

/// Ratios `||m f|| / (||m||_inf ||f|| + ||m|| ||f||_inf)` in H, B and F norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraRatios {
    pub bessel: f64,
    pub besov: f64,
    pub triebel: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn algebra_check(
    m: &SampledField,
    f: &SampledField,
    fam: &DyadicFamily,
    s: f64,
    p: f64,
    q: f64,
    gamma: f64,
) -> Result<AlgebraRatios> {
    if !(s > 0.0) {
        return param(format!("algebra estimate needs s > 0, got {s}"));
    }
    if m.components() != 1 {
        return param("algebra estimate needs a scalar multiplier");
    }
    if f.components() > 1 && f.r_value() != 2.0 {
        return param("algebra estimate needs a Hilbert value norm (r_value = 2)");
    }
    check_p_gamma(p, gamma)?;
    let w = axis_weight(f.grid(), gamma)?;
    let mf = pointwise_multiply(m, f)?;
    let (ms, fs) = (m.sup_norm(), f.sup_norm());
    let ratio = |lhs: f64, nm: f64, nf: f64| {
        let den = ms * nf + nm * fs;
        if den == 0.0 {
            param("zero denominator")
        } else {
            Ok(lhs / den)
        }
    };
    Ok(AlgebraRatios {
        bessel: ratio(
            bessel_norm(&mf, s, p, &w)?,
            bessel_norm(m, s, p, &w)?,
            bessel_norm(f, s, p, &w)?,
        )?,
        besov: ratio(
            besov_norm(&mf, fam, s, p, q, &w)?,
            besov_norm(m, fam, s, p, q, &w)?,
            besov_norm(f, fam, s, p, q, &w)?,
        )?,
        triebel: ratio(
            tl_norm(&mf, fam, s, p, q, &w)?,
            tl_norm(m, fam, s, p, q, &w)?,
            tl_norm(f, fam, s, p, q, &w)?,
        )?,
    })
}

/// Norms in `F^s_{p,tau}`, `H^{s,p}` and `F^s_{p,q}` with `tau = min(2, r)`
/// and `q = max(2, r)` for the value space `l^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeEmbedding {
    pub tau: f64,
    pub q: f64,
    pub f_tau: f64,
    pub bessel: f64,
    pub f_q: f64,
}

impl TypeEmbedding {
    /// `||f||_{F_tau} / ||f||_H`, bounded below on the family.
    pub fn lower_ratio(&self) -> f64 {
        self.f_tau / self.bessel
    }

    /// `||f||_H / ||f||_{F_q}`, bounded below on the family.
    pub fn upper_ratio(&self) -> f64 {
        self.bessel / self.f_q
    }
}

pub fn type_embedding_check(f: &SampledField, fam: &DyadicFamily, s: f64, p: f64, gamma: f64) -> Result<TypeEmbedding> {
    check_p_gamma(p, gamma)?;
    let r = f.r_value();
    let (tau, q) = (r.min(2.0), r.max(2.0));
    let w = axis_weight(f.grid(), gamma)?;
    Ok(TypeEmbedding {
        tau,
        q,
        f_tau: tl_norm(f, fam, s, p, tau, &w)?,
        bessel: bessel_norm(f, s, p, &w)?,
        f_q: tl_norm(f, fam, s, p, q, &w)?,
    })
}
