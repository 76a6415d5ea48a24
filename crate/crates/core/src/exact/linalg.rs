//! Exact Gaussian elimination over ℚ(i).

use super::gauss::GaussRat;

/// Determinant by Gaussian elimination over the field.
pub fn determinant(mut rows: Vec<Vec<GaussRat>>) -> GaussRat {
    let n = rows.len();
    let mut det = GaussRat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return GaussRat::zero();
        };
        if piv != col {
            rows.swap(piv, col);
            det = -det;
        }
        let p = rows[col][col].clone();
        det = &det * &p;
        let p_inv = p.inv().expect("nonzero pivot");
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &p_inv;
            for c in col..n {
                let v = &rows[col][c] * &factor;
                rows[r][c] = &rows[r][c] - &v;
            }
        }
    }
    det
}

/// Solves `A x = b` exactly; `None` if `A` is singular.
pub fn solve(mut a: Vec<Vec<GaussRat>>, mut b: Vec<GaussRat>) -> Option<Vec<GaussRat>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        b.swap(piv, col);
        let p_inv = a[col][col].inv()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &p_inv;
            for c in col..n {
                let v = &a[col][c] * &factor;
                a[r][c] = &a[r][c] - &v;
            }
            let v = &b[col] * &factor;
            b[r] = &b[r] - &v;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}
