//! Exact Gaussian elimination over the rationals.

use num::{One, Zero};

use crate::scalar::Q;

/// Brings `m` to reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    rref(&mut rows.to_vec()).len()
}

/// Basis of `{c : Σ_j row_j c_j = 0 for every row}` in `Q^ncols`.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); ncols];
            v[free] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x.clone() * y)
}

/// Orthogonal projection of `b` onto the span of `cols`. Returns one
/// coefficient per column (zero on columns dependent on earlier ones) and the
/// projected vector.
pub fn project(cols: &[Vec<Q>], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let d = b.len();
    // columns as rows: pivots of the transpose pick an independent subset
    let as_rows: Vec<Vec<Q>> = (0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let independent = rref(&mut as_rows.clone());
    let k = independent.len();
    let mut coeffs = vec![Q::zero(); cols.len()];
    if k == 0 {
        return (coeffs, vec![Q::zero(); d]);
    }
    // normal equations on the independent columns, augmented with Aᵀb
    let mut normal: Vec<Vec<Q>> = independent
        .iter()
        .map(|&i| {
            let mut row: Vec<Q> = independent.iter().map(|&j| dot(&cols[i], &cols[j])).collect();
            row.push(dot(&cols[i], b));
            row
        })
        .collect();
    rref(&mut normal);
    for (r, &i) in independent.iter().enumerate() {
        coeffs[i] = normal[r][k].clone();
    }
    let proj = (0..d).map(|row| cols.iter().zip(&coeffs).fold(Q::zero(), |acc, (c, x)| acc + c[row].clone() * x)).collect();
    (coeffs, proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| Q::from_i64(x)).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&[qv(&[1, 2, 3]), qv(&[2, 4, 6]), qv(&[0, 1, 1])]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let rows = [qv(&[1, 1, 0]), qv(&[0, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(dot(r, &ns[0]).is_zero());
        }
    }

    #[test]
    fn projection_residual_is_orthogonal() {
        let cols = [qv(&[1, 0, 1]), qv(&[2, 0, 2]), qv(&[0, 1, 0])];
        let b = qv(&[1, 2, 3]);
        let (c, p) = project(&cols, &b);
        assert!(c[1].is_zero());
        let res: Vec<Q> = b.iter().zip(&p).map(|(x, y)| x.clone() - y).collect();
        for col in &cols {
            assert!(dot(col, &res).is_zero());
        }
        assert_eq!(p, vec![Q::from_i64(2), Q::from_i64(2), Q::from_i64(2)]);
    }
}
