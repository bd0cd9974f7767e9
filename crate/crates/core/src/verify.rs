//! Self-check suites run by `lpmult verify`. Each check compares a library
//! computation against a second route (direct summation, a closed form or an
//! exact structural identity) and reports pass/fail with a short detail.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dyadic::{blocks, build_family, max_levels, partial};
use crate::error::{param, Error, Result};
use crate::grid::{dft, idft, make_grid, sample_family, FamilyKind, GridSpec, SampledField};
use crate::maximal::{fefferman_stein_check, hl_maximal, MaximalConfig};
use crate::norms::{
    besov_norm, bessel_norm, embedding_report, randomized_norm, tl_norm, JawerthFranke, RandomizedMode, SpaceSpec,
};
use crate::paraproduct::{paraproducts, paraproducts_with_terms, support_audit};
use crate::weights::{axis_weight, weighted_lp_norm, PowerWeight};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Grid,
    Dyadic,
    Norms,
    Paraproduct,
    Maximal,
    Embeddings,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["grid", "dyadic", "norms", "paraproduct", "maximal", "embeddings", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grid" => Suite::Grid,
            "dyadic" => Suite::Dyadic,
            "norms" => Suite::Norms,
            "paraproduct" => Suite::Paraproduct,
            "maximal" => Suite::Maximal,
            "embeddings" => Suite::Embeddings,
            "all" => Suite::All,
            other => {
                return Err(Error::Parameter(format!(
                    "unknown suite '{other}'; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::Grid,
            Suite::Dyadic,
            Suite::Norms,
            Suite::Paraproduct,
            Suite::Maximal,
            Suite::Embeddings,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .unwrap_or(0);
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Collector {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Collector {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: self.suite.into(),
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn within(&mut self, name: impl Into<String>, err: f64, tol: f64) {
        self.push(name, err <= tol, format!("error {err:.3e}, tolerance {tol:.0e}"));
    }
}

/// Runs one suite (or all of them, in the order of [`Suite::NAMES`]).
pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Grid => grid_suite()?,
        Suite::Dyadic => dyadic_suite()?,
        Suite::Norms => norms_suite()?,
        Suite::Paraproduct => paraproduct_suite()?,
        Suite::Maximal => maximal_suite()?,
        Suite::Embeddings => embeddings_suite()?,
        Suite::All => {
            let mut out = Vec::new();
            for s in [
                Suite::Grid,
                Suite::Dyadic,
                Suite::Norms,
                Suite::Paraproduct,
                Suite::Maximal,
                Suite::Embeddings,
            ] {
                out.extend(run_suite(s)?);
            }
            out
        }
    })
}

fn random_field(grid: &GridSpec, k_hi: f64, seed: u64) -> Result<SampledField> {
    sample_family(&FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi }, grid, seed)
}

/// `(1/sqrt(P)) sum_x f(x) exp(-i xi . x)` by direct summation.
fn direct_dft(f: &SampledField) -> Vec<Complex64> {
    let g = f.grid();
    let p = g.points();
    let d = g.dim();
    let norm = 1.0 / (p as f64).sqrt();
    (0..p)
        .map(|k| {
            let xi = g.frequency(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..p {
                let x = g.point(i);
                let phase = (0..d).map(|a| xi[a] * x[a]).sum::<f64>();
                acc += f.at(0, i) * Complex64::from_polar(1.0, -phase);
            }
            acc * norm
        })
        .collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn grid_suite() -> Result<Vec<Check>> {
    let mut c = Collector::new("grid");
    for (dim, n) in [(1, 64), (2, 16)] {
        let g = make_grid(dim, 4.0, n)?;
        let f = random_field(&g, g.xi_max(), 7)?;
        let fast = dft(&f)?;
        c.within(
            format!("dft_matches_direct_sum_d{dim}_n{n}"),
            max_diff(fast.values(), &direct_dft(&f)),
            1e-9,
        );
        let back = idft(&fast);
        let rel = max_diff(back.values(), f.values()) / f.max_abs();
        c.within(format!("roundtrip_d{dim}_n{n}"), rel, 1e-10);
        let e_x: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        let e_k: f64 = fast.values().iter().map(|v| v.norm_sqr()).sum();
        c.within(format!("parseval_d{dim}_n{n}"), (e_x - e_k).abs() / e_x, 1e-12);
    }
    Ok(c.checks)
}

fn dyadic_grids() -> Result<Vec<GridSpec>> {
    Ok(vec![make_grid(1, 16.0, 1024)?, make_grid(2, 4.0, 256)?])
}

fn dyadic_suite() -> Result<Vec<Check>> {
    let mut c = Collector::new("dyadic");
    for g in dyadic_grids()? {
        let tag = format!("d{}_n{}", g.dim(), g.n());
        let f = random_field(&g, g.xi_max(), 3)?;
        for k in 0..=max_levels(&g) {
            let fam = build_family(&g, k)?;
            let bad = fam.check_invariants(1e-12);
            let detail = bad.first().cloned().unwrap_or_else(|| "ok".into());
            c.push(format!("invariants_{tag}_k{k}"), bad.is_empty(), detail);
            let mut sum = SampledField::zeros(g, 1, 2.0);
            for b in blocks(&fam, &f)? {
                sum = sum.add(&b)?;
            }
            let err = sum.sub(&partial(&fam, k as i64, &f)?)?.max_abs() / f.max_abs();
            c.within(format!("telescoping_{tag}_k{k}"), err, 1e-12);
        }
    }
    Ok(c.checks)
}

fn norms_suite() -> Result<Vec<Check>> {
    let mut c = Collector::new("norms");
    let g = make_grid(1, 16.0, 512)?;
    let fam = build_family(&g, max_levels(&g))?;
    let unweighted = PowerWeight::unweighted(&g);
    for seed in 0..4 {
        let f = random_field(&g, 40.0, seed)?;
        for s in [-0.5, 0.0, 0.7] {
            let exact = randomized_norm(&f, &fam, s, 2.0, &unweighted, RandomizedMode::ExactP2)?;
            let tl = tl_norm(&f, &fam, s, 2.0, 2.0, &unweighted)?;
            c.within(
                format!("square_function_seed{seed}_s{s}"),
                (exact - tl).abs() / tl,
                1e-10,
            );
        }
        let w = axis_weight(&g, 0.5)?;
        for s in [-0.3, 0.4] {
            let qs = [1.0, 2.0, 4.0, f64::INFINITY];
            let b: Vec<f64> = qs
                .iter()
                .map(|&q| besov_norm(&f, &fam, s, 2.5, q, &w))
                .collect::<Result<_>>()?;
            let t: Vec<f64> = qs
                .iter()
                .map(|&q| tl_norm(&f, &fam, s, 2.5, q, &w))
                .collect::<Result<_>>()?;
            let mono = b.windows(2).all(|x| x[1] <= x[0] * (1.0 + 1e-12))
                && t.windows(2).all(|x| x[1] <= x[0] * (1.0 + 1e-12));
            c.push(
                format!("q_monotone_seed{seed}_s{s}"),
                mono,
                format!("B {b:.4?} F {t:.4?}"),
            );
            let bp = besov_norm(&f, &fam, s, 2.5, 2.5, &w)?;
            let fp = tl_norm(&f, &fam, s, 2.5, 2.5, &w)?;
            c.within(
                format!("p_equals_q_collapse_seed{seed}_s{s}"),
                (bp - fp).abs() / fp,
                1e-12,
            );
        }
        let h0 = bessel_norm(&f, 0.0, 3.0, &w)?;
        let lp = weighted_lp_norm(&f, 3.0, &w);
        c.within(
            format!("bessel_order_zero_is_lp_seed{seed}"),
            (h0 - lp).abs() / lp,
            1e-12,
        );
    }
    Ok(c.checks)
}

fn paraproduct_suite() -> Result<Vec<Check>> {
    let mut c = Collector::new("paraproduct");
    let g = make_grid(1, 16.0, 256)?;
    let fam = build_family(&g, max_levels(&g))?;
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let m = random_field(&g, 20.0, 2 * seed)?;
        let f = random_field(&g, 20.0, 2 * seed + 1)?;
        let scale = m.sup_norm() * f.sup_norm();
        for l in 0..=fam.levels() {
            let t = paraproducts(&m, &f, &fam, l)?;
            let direct = crate::grid::pointwise_multiply(&partial(&fam, l as i64, &m)?, &partial(&fam, l as i64, &f)?)?;
            worst = worst.max(t.sum().sub(&direct)?.max_abs() / scale);
        }
    }
    c.within("reconstruction_10_pairs_all_levels", worst, 1e-10);
    let g = make_grid(1, 16.0, 1024)?;
    let fam = build_family(&g, 4)?;
    let mut worst: f64 = 0.0;
    let mut aliased = 0;
    for seed in 0..5u64 {
        let m = random_field(&g, 30.0, 100 + seed)?;
        let f = random_field(&g, 30.0, 200 + seed)?;
        let audit = support_audit(&paraproducts_with_terms(&m, &f, &fam, 4)?, &g)?;
        aliased += audit.rows.iter().filter(|r| r.aliasing_possible).count();
        worst = audit.rows.iter().fold(worst, |a, r| a.max(r.outside));
    }
    c.within("fourier_support_regions", worst, 1e-10);
    c.push(
        "no_aliasing_at_k4_n1024",
        aliased == 0,
        format!("{aliased} aliasing-possible terms"),
    );
    Ok(c.checks)
}

fn all_radii_maximal(f: &SampledField) -> Vec<f64> {
    let g = f.grid();
    let n = g.n();
    let a = f.value_norms();
    (0..n)
        .map(|i| {
            let mut best: f64 = 0.0;
            let mut acc = a[i];
            best = best.max(acc);
            for w in 1..n / 2 {
                acc += a[(i + w) % n] + a[(i + n - w) % n];
                best = best.max(acc / (2 * w + 1) as f64);
            }
            best
        })
        .collect()
}

fn maximal_suite() -> Result<Vec<Check>> {
    let mut c = Collector::new("maximal");
    let g = make_grid(1, 16.0, 128)?;
    let cfg = MaximalConfig::dyadic(&g);
    let mut worst: f64 = 1.0;
    let mut dominates = true;
    for seed in 0..5u64 {
        let f = random_field(&g, 8.0, seed)?;
        let mf = hl_maximal(&f, &cfg)?.value_norms();
        let oracle = all_radii_maximal(&f);
        for ((m, o), v) in mf.iter().zip(&oracle).zip(f.value_norms()) {
            worst = worst.max(o / m).max(m / o);
            dominates &= *m >= v * (1.0 - 1e-12);
        }
    }
    c.push(
        "within_factor_2_of_all_radii",
        worst <= 2.0,
        format!("worst factor {worst:.3}"),
    );
    c.push("dominates_modulus", dominates, "Mf >= |f|");
    let g = make_grid(1, 16.0, 512)?;
    let fields: Vec<SampledField> = (0..4)
        .map(|j| {
            sample_family(
                &FamilyKind::Gaussian {
                    center: j as f64 - 1.5,
                    width: 0.5,
                },
                &g,
                0,
            )
        })
        .collect::<Result<_>>()?;
    let r = fefferman_stein_check(&fields, 2.0, 2.0, 0.5)?;
    c.push(
        "fefferman_stein_ratio_finite",
        r.is_finite() && r >= 1.0,
        format!("ratio {r:.4}"),
    );
    Ok(c.checks)
}

fn embeddings_suite() -> Result<Vec<Check>> {
    let mut c = Collector::new("embeddings");
    let g = make_grid(1, 16.0, 512)?;
    let fam = build_family(&g, max_levels(&g))?;
    let (s, p, gamma) = (0.3, 2.5, 0.4);
    let pairs = vec![
        (
            SpaceSpec::Besov { s, p, q: 1.0, gamma },
            SpaceSpec::Besov { s, p, q: 3.0, gamma },
        ),
        (
            SpaceSpec::TriebelLizorkin { s, p, q: 2.0, gamma },
            SpaceSpec::TriebelLizorkin {
                s,
                p,
                q: f64::INFINITY,
                gamma,
            },
        ),
        (
            SpaceSpec::Besov { s, p, q: 1.5, gamma },
            SpaceSpec::TriebelLizorkin { s, p, q: 1.5, gamma },
        ),
        (
            SpaceSpec::TriebelLizorkin { s, p, q: 4.0, gamma },
            SpaceSpec::Besov { s, p, q: 4.0, gamma },
        ),
        (
            SpaceSpec::TriebelLizorkin { s, p, q: 1.0, gamma },
            SpaceSpec::Bessel { s, p, gamma },
        ),
        (
            SpaceSpec::Bessel { s, p, gamma },
            SpaceSpec::TriebelLizorkin {
                s,
                p,
                q: f64::INFINITY,
                gamma,
            },
        ),
    ];
    let mut ok = true;
    let mut worst_exact: f64 = 0.0;
    let mut bracket = (f64::INFINITY, 0.0f64);
    for seed in 0..5u64 {
        let f = random_field(&g, 40.0, seed)?;
        for row in embedding_report(&f, &fam, &pairs)? {
            if row.exact {
                ok &= row.holds();
                worst_exact = worst_exact.max(row.ratio);
            } else {
                bracket = (bracket.0.min(row.ratio), bracket.1.max(row.ratio));
            }
        }
    }
    c.push(
        "unit_constant_embeddings",
        ok,
        format!("largest ratio {worst_exact:.6}"),
    );
    c.push(
        "bessel_bracket_finite",
        bracket.0 > 0.0 && bracket.1.is_finite(),
        format!("ratios in [{:.4}, {:.4}]", bracket.0, bracket.1),
    );
    let good = JawerthFranke {
        s0: 0.8,
        s1: 0.2,
        p0: 2.0,
        p1: 3.0,
        gamma0: 0.4,
        gamma1: 0.0,
    };
    let bad = JawerthFranke { gamma0: 1.5, ..good };
    c.push(
        "jawerth_franke_admissibility",
        good.validate().is_ok() && bad.validate().is_err(),
        "valid parameters accepted, gamma0 >= p0 - 1 rejected",
    );
    let xi = PI * 70.0 / 16.0;
    let single = SampledField::from_fn(g, |x| Complex64::from_polar(1.0, xi * x[0]))?;
    let w = PowerWeight::unweighted(&g);
    let f1 = tl_norm(&single, &fam, s, p, 1.0, &w)?;
    let finf = tl_norm(&single, &fam, s, p, f64::INFINITY, &w)?;
    c.within("single_block_collapse", (f1 - finf).abs() / finf, 1e-12);
    Ok(c.checks)
}

/// Fails with a parameter error when `name` is not a suite.
pub fn parse_suite(name: &str) -> Result<Suite> {
    if name.is_empty() {
        return param("empty suite name");
    }
    name.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for n in Suite::NAMES {
            assert_eq!(parse_suite(n).unwrap().to_string(), n);
        }
        assert!(parse_suite("bogus").unwrap_err().to_string().contains("unknown suite"));
    }

    #[test]
    fn fast_suites_pass() {
        for s in [Suite::Grid, Suite::Dyadic, Suite::Paraproduct, Suite::Maximal] {
            let checks = run_suite(s).unwrap();
            assert!(!checks.is_empty());
            for ch in &checks {
                assert!(ch.passed, "{}: {}", ch.name, ch.detail);
            }
        }
    }

    #[test]
    fn slower_suites_pass() {
        for s in [Suite::Norms, Suite::Embeddings] {
            for ch in run_suite(s).unwrap() {
                assert!(ch.passed, "{}: {}", ch.name, ch.detail);
            }
        }
    }
}
