// Fixed-order Gauss-Legendre rules used for cell-averaged weights.

const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Composite 4-point Gauss-Legendre on `[a, b]` with `panels` equal panels.
pub(crate) fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            total += w * f(mid + half * x) * half;
        }
    }
    total
}

/// Composite tensor Gauss-Legendre over the rectangle `[a0,b0] x [a1,b1]`.
pub(crate) fn gauss_legendre_2d(
    f: impl Fn(f64, f64) -> f64,
    (a0, b0): (f64, f64),
    (a1, b1): (f64, f64),
    panels: usize,
) -> f64 {
    gauss_legendre(|x| gauss_legendre(|y| f(x, y), a1, b1, panels), a0, b0, panels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // 4-point rule is exact through degree 7.
        let v = gauss_legendre(|x| x.powi(7) + 3.0 * x.powi(2), -1.0, 2.0, 1);
        let exact = (2f64.powi(8) - 1.0) / 8.0 + (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
        let v2 = gauss_legendre_2d(|x, y| x * y, (0.0, 1.0), (0.0, 2.0), 2);
        assert!((v2 - 1.0).abs() < 1e-14);
    }
}
