//! Univariate polynomials over ℚ(i) in the affine chart, with Lagrange
//! interpolation and resultants of homogenizations.

use std::fmt;

use super::gauss::GaussRat;

/// Dense polynomial, coefficients stored lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<GaussRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::from_coeffs(vec![GaussRat::zero(), GaussRat::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(GaussRat::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| GaussRat::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero past the end).
    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn scale(&self, s: &GaussRat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    /// Euclidean division. `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &Poly) -> Option<(Poly, Poly)> {
        let dd = divisor.degree()?;
        let lead_inv = divisor.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let qlen = rem.len().saturating_sub(dd);
        let mut quot = vec![GaussRat::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * d);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Some((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Unique polynomial of degree `< nodes.len()` through the given points.
    /// Returns `None` if two nodes coincide.
    pub fn lagrange(nodes: &[GaussRat], values: &[GaussRat]) -> Option<Poly> {
        assert_eq!(nodes.len(), values.len());
        let mut acc = Poly::zero();
        for (i, (xi, yi)) in nodes.iter().zip(values).enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = Poly::constant(GaussRat::one());
            let mut denom = GaussRat::one();
            for (j, xj) in nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = xi - xj;
                if diff.is_zero() {
                    return None;
                }
                basis = basis.mul(&Poly::from_coeffs(vec![-xj, GaussRat::one()]));
                denom = &denom * &diff;
            }
            acc = acc.add(&basis.scale(&(yi / &denom)));
        }
        Some(acc)
    }

    /// Coefficients of the homogenization of formal degree `deg`, from the
    /// top power of `t` down: `[c_deg, …, c_0]`. Coefficients above the actual
    /// degree are zero.
    fn homogeneous_coeffs_desc(&self, deg: usize) -> Vec<GaussRat> {
        (0..=deg).rev().map(|k| self.coeff(k)).collect()
    }

    /// Resultant of the homogenizations of `self` and `other` to the formal
    /// degrees `m` and `k`. It vanishes iff the two binary forms share a root
    /// on ℙ¹, the point at infinity included (both top coefficients zero).
    ///
    /// Panics if an actual degree exceeds its formal degree.
    pub fn homogeneous_resultant(&self, m: usize, other: &Poly, k: usize) -> GaussRat {
        assert!(self.degree().is_none_or(|d| d <= m));
        assert!(other.degree().is_none_or(|d| d <= k));
        let size = m + k;
        if size == 0 {
            return GaussRat::one();
        }
        let a = self.homogeneous_coeffs_desc(m);
        let b = other.homogeneous_coeffs_desc(k);
        let mut rows = vec![vec![GaussRat::zero(); size]; size];
        for r in 0..k {
            for (j, c) in a.iter().enumerate() {
                rows[r][r + j] = c.clone();
            }
        }
        for r in 0..m {
            for (j, c) in b.iter().enumerate() {
                rows[k + r][r + j] = c.clone();
            }
        }
        super::linalg::determinant(rows)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}
