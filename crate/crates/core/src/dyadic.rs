//! The Littlewood-Paley generator family and the operators `S_k`, `S^l`.
//!
//! The generator is radial, `phi(xi) = rho(|xi|)`, with `rho = 1` on `[0, 1]`,
//! `rho = 0` on `[3/2, inf)`, and the smooth `exp(-1/u)` transition in
//! between. Bands are `phi_0 = phi` and `phi_k(xi) = phi(2^{-k} xi) - phi(2^{-k+1} xi)`,
//! so `sum_{k<=K} phi_k = phi(2^{-K} .)` telescopes exactly.

use crate::error::{Error, Result};
use crate::grid::{apply_real_symbol, dft, smooth_ramp, GridSpec, SampledField, SpectralField};

/// `rho(r)`: the radial profile of the generator.
pub fn generator_profile(r: f64) -> f64 {
    smooth_ramp(r, 1.0, 1.5)
}

/// The generator family sampled on a grid's frequency lattice, levels `0..=K`.
#[derive(Debug, Clone)]
pub struct DyadicFamily {
    grid: GridSpec,
    levels: usize,
    freq_norms: Vec<f64>,
    generator: Vec<f64>,
    bands: Vec<Vec<f64>>,
}

/// Largest `K` with `(3/2) 2^K <= xi_max`.
pub fn max_levels(grid: &GridSpec) -> usize {
    let mut k = 0usize;
    while 1.5 * 2f64.powi(k as i32 + 1) <= grid.xi_max() {
        k += 1;
    }
    k
}

/// `build_family(grid, K)`.
pub fn build_family(grid: &GridSpec, levels: usize) -> Result<DyadicFamily> {
    if 1.5 * 2f64.powi(levels as i32) > grid.xi_max() {
        return Err(Error::Level(format!(
            "K = {levels} puts the top band beyond xi_max = {:.4}; max admissible K is {}",
            grid.xi_max(),
            max_levels(grid)
        )));
    }
    let freq_norms = grid.frequency_norms();
    let generator: Vec<f64> = freq_norms.iter().map(|&r| generator_profile(r)).collect();
    let bands = (0..=levels)
        .map(|k| freq_norms.iter().map(|&r| band_value(k, r)).collect::<Vec<f64>>())
        .collect();
    let fam = DyadicFamily {
        grid: *grid,
        levels,
        freq_norms,
        generator,
        bands,
    };
    let violations = fam.check_invariants(1e-12);
    if let Some(v) = violations.first() {
        return Err(Error::Invariant(v.clone()));
    }
    Ok(fam)
}

/// `phi_k` at radius `r`.
pub fn band_value(k: usize, r: f64) -> f64 {
    if k == 0 {
        generator_profile(r)
    } else {
        let s = 2f64.powi(-(k as i32));
        generator_profile(s * r) - generator_profile(2.0 * s * r)
    }
}

impl DyadicFamily {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `K`: the top level index.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `phi` on the lattice.
    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    /// `phi_k` on the lattice.
    pub fn band(&self, k: usize) -> &[f64] {
        &self.bands[k]
    }

    /// `phi(2^{-l} xi)` on the lattice; zero for negative `l`.
    pub fn partial_symbol(&self, l: i64) -> Vec<f64> {
        if l < 0 {
            return vec![0.0; self.freq_norms.len()];
        }
        let s = 2f64.powi(-(l as i32));
        self.freq_norms.iter().map(|&r| generator_profile(s * r)).collect()
    }

    /// Pointwise check of every family invariant on the lattice; returns a
    /// description of each violation.
    pub fn check_invariants(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (&r, &phi)) in self.freq_norms.iter().zip(&self.generator).enumerate() {
            if !(-tol..=1.0 + tol).contains(&phi) {
                out.push(format!("0 <= phi <= 1 fails at index {i}: {phi}"));
            }
            if r <= 1.0 && (phi - 1.0).abs() > tol {
                out.push(format!("phi = 1 on |xi| <= 1 fails at |xi| = {r}"));
            }
            if r >= 1.5 && phi.abs() > tol {
                out.push(format!("phi = 0 on |xi| >= 3/2 fails at |xi| = {r}"));
            }
        }
        for (k, band) in self.bands.iter().enumerate() {
            if k == 0 {
                if band != &self.generator {
                    out.push("phi_0 differs from phi".into());
                }
                continue;
            }
            let lo = 2f64.powi(k as i32 - 1);
            let hi = 1.5 * 2f64.powi(k as i32);
            for (&r, &v) in self.freq_norms.iter().zip(band) {
                if (r < lo || r > hi) && v.abs() > tol {
                    out.push(format!("phi_{k} nonzero outside its band at |xi| = {r}: {v}"));
                }
            }
        }
        let top = self.partial_symbol(self.levels as i64);
        for (i, t) in top.iter().enumerate() {
            let sum: f64 = self.bands.iter().map(|b| b[i]).sum();
            if (sum - t).abs() > tol {
                out.push(format!(
                    "partition sum differs from phi(2^-K xi) by {} at index {i}",
                    (sum - t).abs()
                ));
            }
        }
        out
    }

    fn check_grid(&self, f: &SampledField) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("field is not on the family's grid".into()));
        }
        Ok(())
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k > self.levels {
            return Err(Error::Level(format!("level {k} exceeds K = {}", self.levels)));
        }
        Ok(())
    }
}

/// `S_k f`.
pub fn block(fam: &DyadicFamily, k: usize, f: &SampledField) -> Result<SampledField> {
    fam.check_grid(f)?;
    fam.check_level(k)?;
    let spec = dft(f)?;
    Ok(apply_real_symbol(&spec, fam.band(k)))
}

/// All blocks `S_0 f, ..., S_K f` from a single forward transform.
pub fn blocks(fam: &DyadicFamily, f: &SampledField) -> Result<Vec<SampledField>> {
    fam.check_grid(f)?;
    let spec = dft(f)?;
    Ok(blocks_of_spectrum(fam, &spec))
}

pub(crate) fn blocks_of_spectrum(fam: &DyadicFamily, spec: &SpectralField) -> Vec<SampledField> {
    (0..=fam.levels).map(|k| apply_real_symbol(spec, fam.band(k))).collect()
}

/// `S^l f = F^{-1}(phi(2^{-l} .) F f)`; zero for `l < 0`.
pub fn partial(fam: &DyadicFamily, l: i64, f: &SampledField) -> Result<SampledField> {
    fam.check_grid(f)?;
    if l > fam.levels as i64 {
        return Err(Error::Level(format!(
            "partial sum level {l} exceeds K = {}",
            fam.levels
        )));
    }
    if l < 0 {
        return Ok(SampledField::zeros(*f.grid(), f.components(), f.r_value()));
    }
    let spec = dft(f)?;
    Ok(apply_real_symbol(&spec, &fam.partial_symbol(l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_family, FamilyKind};
    use crate::weights::{weighted_lp_norm, PowerWeight};
    use num_complex::Complex64;

    fn fam1() -> DyadicFamily {
        build_family(&make_grid(1, 16.0, 1024).unwrap(), 6).unwrap()
    }

    #[test]
    fn max_level_arithmetic() {
        let g = make_grid(1, 16.0, 1024).unwrap();
        assert_eq!(max_levels(&g), 6);
        let e = build_family(&g, 7).unwrap_err();
        assert!(e.to_string().contains("max admissible K is 6"));
    }

    #[test]
    fn band_one_vanishes_at_unit_radius() {
        assert_eq!(band_value(1, 1.0), 0.0);
        assert_eq!(band_value(3, 0.0), 0.0);
    }

    #[test]
    fn invariants_hold_on_lattice() {
        let f = fam1();
        assert!(f.check_invariants(1e-12).is_empty());
        let g2 = make_grid(2, 4.0, 256).unwrap();
        let f2 = build_family(&g2, 6).unwrap();
        assert!(f2.check_invariants(1e-12).is_empty());
    }

    #[test]
    fn low_frequency_field_is_its_own_first_block() {
        let fam = fam1();
        let g = *fam.grid();
        let f = sample_family(&FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 1.0 }, &g, 5).unwrap();
        let s0 = block(&fam, 0, &f).unwrap();
        assert!(s0.sub(&f).unwrap().max_abs() < 1e-12);
        for k in 2..=6 {
            assert!(block(&fam, k, &f).unwrap().max_abs() < 1e-14);
        }
        assert!(block(&fam, 7, &f).is_err());
    }

    #[test]
    fn blocks_telescope_to_partial_symbol() {
        let fam = fam1();
        let g = *fam.grid();
        let f = sample_family(&FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 100.0 }, &g, 11).unwrap();
        let bs = blocks(&fam, &f).unwrap();
        let mut sum = SampledField::zeros(g, 1, 2.0);
        for b in &bs {
            sum.add_assign(b);
        }
        let top = partial(&fam, 6, &f).unwrap();
        assert!(sum.sub(&top).unwrap().max_abs() < 1e-10 * f.max_abs());
        // Equivalence of the two computations at every level.
        let mut acc = SampledField::zeros(g, 1, 2.0);
        for (l, b) in bs.iter().enumerate() {
            acc.add_assign(b);
            let direct = partial(&fam, l as i64, &f).unwrap();
            assert!(acc.sub(&direct).unwrap().max_abs() <= 1e-11 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn single_mode_hits_expected_blocks() {
        // xi = 2^{k-1} * 5/4 with k = 4: phi_j(xi) nonzero only for j in {3, 4}
        // (evaluated independently from the band definition).
        let fam = fam1();
        let g = *fam.grid();
        let target = 2f64.powi(3) * 1.25;
        let j = (target * g.half_width() / std::f64::consts::PI).round();
        let xi = std::f64::consts::PI * j / g.half_width();
        let f = SampledField::from_fn(g, |x| Complex64::from_polar(1.0, xi * x[0])).unwrap();
        let nonzero: Vec<usize> = (0..=6)
            .filter(|&k| block(&fam, k, &f).unwrap().max_abs() > 1e-12)
            .collect();
        let expected: Vec<usize> = (0..=6).filter(|&k| band_value(k, xi) != 0.0).collect();
        assert_eq!(nonzero, expected);
        assert!(nonzero.contains(&4));
        assert!(nonzero.iter().all(|&k| (3..=5).contains(&k)));
    }

    #[test]
    fn partial_edge_cases() {
        let fam = fam1();
        let g = *fam.grid();
        let f = sample_family(&FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 64.0 }, &g, 2).unwrap();
        assert!(partial(&fam, -1, &f).unwrap().is_zero());
        let full = partial(&fam, 6, &f).unwrap();
        assert!(full.sub(&f).unwrap().max_abs() < 1e-10 * f.max_abs());
        assert!(partial(&fam, 7, &f).is_err());
    }

    #[test]
    fn blocks_contract_and_kill_constants() {
        let fam = fam1();
        let g = *fam.grid();
        let w = PowerWeight::unweighted(&g);
        let f = sample_family(&FamilyKind::RandomBandlimited { k_lo: 0.0, k_hi: 90.0 }, &g, 9).unwrap();
        let n = weighted_lp_norm(&f, 2.0, &w);
        for k in 0..=6 {
            assert!(weighted_lp_norm(&block(&fam, k, &f).unwrap(), 2.0, &w) <= n * (1.0 + 1e-12));
        }
        let c = SampledField::from_real_fn(g, |_| 3.0).unwrap();
        for k in 1..=6 {
            assert_eq!(fam.band(k)[0], 0.0);
            assert!(block(&fam, k, &c).unwrap().max_abs() < 1e-14);
        }
    }
}
