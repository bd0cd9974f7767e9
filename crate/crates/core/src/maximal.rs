//! Hardy-Littlewood maximal operator over dyadic radii on the periodic grid.
//!
//! Balls are sets of cells whose centers lie within distance `r` of the
//! center cell, wrapped periodically; a ball never counts a cell twice.
//! Averages are over cells. The degenerate ball (the cell itself, the
//! `r -> 0` limit for cellwise-constant data) is always included, so
//! `Mf >= ||f||` pointwise.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::grid::{lr_norm, GridSpec, SampledField};
use crate::weights::{cell_averaged_weight, mixed_lp_of_values, weighted_lp_of_values, PowerWeight, WeightKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalConfig {
    radii: Vec<f64>,
}

impl MaximalConfig {
    /// Radii `2L 2^{-j}` down to the last one above the grid spacing.
    pub fn dyadic(grid: &GridSpec) -> Self {
        let h = grid.spacing();
        let mut radii = Vec::new();
        let mut r = 2.0 * grid.half_width();
        while r > h {
            radii.push(r);
            r /= 2.0;
        }
        Self { radii }
    }

    /// Explicit radii, each in `(h, 2L]`.
    pub fn with_radii(grid: &GridSpec, radii: Vec<f64>) -> Result<Self> {
        let h = grid.spacing();
        let top = 2.0 * grid.half_width();
        if let Some(r) = radii.iter().find(|&&r| !(r > h && r <= top)) {
            return param(format!("radius {r} outside (h, 2L] = ({h}, {top}]"));
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

fn cyclic_prefix(row: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(row.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for v in row {
        acc += v;
        out.push(acc);
    }
    out
}

/// Sum of `row[(c - w) ..= (c + w)]` cyclically; the whole row when the
/// window would wrap onto itself.
fn window_sum(prefix: &[f64], c: usize, w: usize) -> (f64, usize) {
    let n = prefix.len() - 1;
    if 2 * w + 1 >= n {
        return (prefix[n], n);
    }
    let lo = c as i64 - w as i64;
    let hi = c + w;
    let sum = if lo < 0 {
        prefix[n] - prefix[(lo + n as i64) as usize] + prefix[hi + 1]
    } else if hi >= n {
        prefix[n] - prefix[lo as usize] + prefix[hi + 1 - n]
    } else {
        prefix[hi + 1] - prefix[lo as usize]
    };
    (sum, 2 * w + 1)
}

fn maximal_of_values(grid: &GridSpec, a: &[f64], cfg: &MaximalConfig) -> Vec<f64> {
    let n = grid.n();
    let h = grid.spacing();
    let mut out = a.to_vec();
    if grid.dim() == 1 {
        let prefix = cyclic_prefix(a);
        for &r in &cfg.radii {
            let w = ((r / h) * (1.0 + 1e-12)).floor() as usize;
            for (i, o) in out.iter_mut().enumerate() {
                let (s, c) = window_sum(&prefix, i, w);
                *o = o.max(s / c as f64);
            }
        }
        return out;
    }
    let prefixes: Vec<Vec<f64>> = a.chunks_exact(n).map(cyclic_prefix).collect();
    for &r in &cfg.radii {
        let rc = (r / h) * (1.0 + 1e-12);
        let reach = rc.floor() as i64;
        // One representative row offset per distinct row.
        let dys: Vec<i64> = if 2 * reach + 1 >= n as i64 {
            let half = n as i64 / 2;
            (-half..half).collect()
        } else {
            (-reach..=reach).collect()
        };
        let widths: Vec<usize> = dys
            .iter()
            .map(|&dy| (rc * rc - (dy * dy) as f64).max(0.0).sqrt().floor() as usize)
            .collect();
        out.par_chunks_mut(n).enumerate().for_each(|(i0, row_out)| {
            for (i1, o) in row_out.iter_mut().enumerate() {
                let (mut s, mut c) = (0.0, 0usize);
                for (&dy, &w) in dys.iter().zip(&widths) {
                    let row = (i0 as i64 + dy).rem_euclid(n as i64) as usize;
                    let (rs, rcnt) = window_sum(&prefixes[row], i1, w);
                    s += rs;
                    c += rcnt;
                }
                *o = o.max(s / c as f64);
            }
        });
    }
    out
}

/// `Mf(x) = max over the radii of ball averages of ||f||`, as a scalar field.
pub fn hl_maximal(f: &SampledField, cfg: &MaximalConfig) -> Result<SampledField> {
    let a = f.value_norms();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("maximal function input".into()));
    }
    let m = maximal_of_values(f.grid(), &a, cfg);
    SampledField::from_real_values(*f.grid(), m)
}

/// Axis-last power weight, clamped when `|t|^gamma` is not locally integrable.
pub fn weight_or_clamped(grid: &GridSpec, gamma: f64) -> PowerWeight {
    cell_averaged_weight(grid, gamma, WeightKind::AxisLast)
        .unwrap_or_else(|_| PowerWeight::clamped(grid, gamma, WeightKind::AxisLast))
}

fn family_grid(fields: &[SampledField]) -> Result<GridSpec> {
    let Some(first) = fields.first() else {
        return param("need at least one field");
    };
    let grid = *first.grid();
    if fields.iter().any(|f| *f.grid() != grid) {
        return Err(Error::GridMismatch("fields live on different grids".into()));
    }
    Ok(grid)
}

fn pointwise_lq(parts: &[Vec<f64>], q: f64) -> Vec<f64> {
    (0..parts[0].len())
        .map(|i| lr_norm(parts.iter().map(|a| a[i]), q))
        .collect()
}

fn maximal_and_plain(fields: &[SampledField], q: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = family_grid(fields)?;
    let cfg = MaximalConfig::dyadic(&grid);
    let plain: Vec<Vec<f64>> = fields.iter().map(SampledField::value_norms).collect();
    let maxed: Vec<Vec<f64>> = plain.par_iter().map(|a| maximal_of_values(&grid, a, &cfg)).collect();
    Ok((pointwise_lq(&maxed, q), pointwise_lq(&plain, q)))
}

/// `||(M f_k)||_{L^p(w_gamma; l^q)} / ||(f_k)||_{L^p(w_gamma; l^q)}`.
pub fn fefferman_stein_check(fields: &[SampledField], p: f64, q: f64, gamma: f64) -> Result<f64> {
    let (lhs, rhs) = maximal_and_plain(fields, q)?;
    let w = weight_or_clamped(fields[0].grid(), gamma);
    let den = weighted_lp_of_values(&rhs, p, &w);
    if den == 0.0 {
        return param("zero family");
    }
    Ok(weighted_lp_of_values(&lhs, p, &w) / den)
}

/// `||(M f_k)||_{L^{p(r)}(w_gamma; l^q)} / ||(f_k)||_{L^{p(r)}(w_gamma; l^q)}` on a 2-D grid.
pub fn mixed_maximal_check(fields: &[SampledField], p: f64, r: f64, q: f64, gamma: f64) -> Result<f64> {
    let grid = family_grid(fields)?;
    if grid.dim() != 2 {
        return param("mixed maximal check needs d = 2");
    }
    let (lhs, rhs) = maximal_and_plain(fields, q)?;
    let w = weight_or_clamped(&grid, gamma);
    let den = mixed_lp_of_values(&rhs, p, r, &w)?;
    if den == 0.0 {
        return param("zero family");
    }
    Ok(mixed_lp_of_values(&lhs, p, r, &w)? / den)
}
