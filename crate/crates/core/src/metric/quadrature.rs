//! Quadrature rules and smooth cut-offs.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss–Legendre nodes and weights on `[a, b]` (Golub–Welsch).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    if n == 0 {
        return Vec::new();
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let k = k as f64;
        let off = k / (4.0 * k * k - 1.0).sqrt();
        let i = k as usize;
        jac[(i - 1, i)] = off;
        jac[(i, i - 1)] = off;
    }
    let eig = SymmetricEigen::new(jac);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v = eig.eigenvectors[(0, k)];
            (mid + half * eig.eigenvalues[k], 2.0 * v * v * half)
        })
        .collect();
    rule.sort_by(|x, y| x.0.total_cmp(&y.0));
    rule
}

/// `C^∞` step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// 1 on `r ≤ inner`, 0 on `r ≥ outer`, smooth in between.
pub fn bump(r: f64, inner: f64, outer: f64) -> f64 {
    1.0 - smooth_step((r - inner) / (outer - inner))
}

/// Least-squares limit of `values[k] ≈ L + Σ_j c_j r_k^{p_j}`; with exactly
/// `exponents.len() + 1` samples this is Richardson extrapolation.
pub fn extrapolate(radii: &[f64], values: &[f64], exponents: &[f64]) -> f64 {
    let m = exponents.len() + 1;
    let a = DMatrix::from_fn(radii.len(), m, |i, j| if j == 0 { 1.0 } else { radii[i].powf(exponents[j - 1]) });
    let b = nalgebra::DVector::from_column_slice(values);
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-14).map_or(f64::NAN, |x| x[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = gauss_legendre(6, 0.0, 2.0);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(11)).sum();
        assert!((s - 2f64.powi(12) / 12.0).abs() < 1e-10);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bump_limits() {
        assert_eq!(bump(0.1, 0.5, 1.0), 1.0);
        assert_eq!(bump(1.5, 0.5, 1.0), 0.0);
        assert!((bump(0.75, 0.5, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn richardson_removes_known_terms() {
        let radii = [0.1, 0.05, 0.025];
        let vals: Vec<f64> = radii.iter().map(|r| 0.5 + 3.0 * r - 2.0 * r * r).collect();
        assert!((extrapolate(&radii, &vals, &[1.0, 2.0]) - 0.5).abs() < 1e-12);
    }
}
