//! Exact dense linear algebra: fraction-free null spaces over the rationals
//! and Gauss-Jordan inversion over the symbolic coefficient field.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Rat, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("rows have inconsistent lengths")]
    RaggedMatrix,
}

/// Row echelon data produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    /// Column index of the pivot of each used row, strictly increasing.
    pivots: Vec<usize>,
    cols: usize,
}

/// Bareiss fraction-free elimination. Rows are first cleared of denominators
/// (scaling a row does not change the kernel), then reduced over the
/// integers with exact divisions only.
fn bareiss(matrix: &[Vec<Rat>]) -> Result<Echelon, LinalgError> {
    let m = matrix.len();
    let cols = matrix.first().map(|r| r.len()).unwrap_or(0);
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(LinalgError::RaggedMatrix);
    }
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        if r >= m {
            break;
        }
        let Some(pr) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        for i in r + 1..m {
            for j in col + 1..cols {
                let t = &a[r][col] * &a[i][j] - &a[i][col] * &a[r][j];
                // Exact by the Bareiss identity.
                a[i][j] = t / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    Ok(Echelon { rows: a, pivots, cols })
}

/// Rank via fraction-free elimination.
pub fn rank(matrix: &[Vec<Rat>]) -> Result<usize, LinalgError> {
    Ok(bareiss(matrix)?.pivots.len())
}

/// Exact basis of the right kernel `{ v : A v = 0 }`.
///
/// One basis vector per free column: the free coordinate is set to 1 and the
/// pivot coordinates are back-substituted from the echelon form.
pub fn null_space(matrix: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>, LinalgError> {
    let ech = bareiss(matrix)?;
    let n = ech.cols;
    let pivot_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; n];
        for (row, &col) in ech.pivots.iter().enumerate() {
            v[col] = Some(row);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rat::zero(); n];
        v[free] = Rat::one();
        for (row, &col) in ech.pivots.iter().enumerate().rev() {
            let mut acc = Rat::zero();
            for j in col + 1..n {
                if !ech.rows[row][j].is_zero() && !v[j].is_zero() {
                    acc += Rat::from(ech.rows[row][j].clone()) * &v[j];
                }
            }
            v[col] = -acc / Rat::from(ech.rows[row][col].clone());
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Gauss-Jordan inversion over the exact symbolic field. Pivots prefer the
/// structurally simplest nonzero entry in the column to keep intermediate
/// quotients small; zero tests are exact.
pub fn invert_scalar_matrix(mat: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    let n = mat.len();
    if mat.iter().any(|r| r.len() != n) {
        return Err(LinalgError::RaggedMatrix);
    }
    let mut a: Vec<Vec<Scalar>> = mat.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].complexity())
            .ok_or(LinalgError::Singular)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let piv_inv = a[col][col].invert().expect("pivot is nonzero");
        for j in 0..n {
            a[col][j] = a[col][j].mul(&piv_inv);
            inv[col][j] = inv[col][j].mul(&piv_inv);
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                a[i][j] = a[i][j].sub(&f.mul(&a[col][j]));
                inv[i][j] = inv[i][j].sub(&f.mul(&inv[col][j]));
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn kernel_of_simple_matrix() {
        // x + y + z = 0, y - z = 0 has the 1-dim kernel spanned by (-2, 1, 1).
        let m = vec![
            vec![rat(1, 1), rat(1, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(-1, 1)],
        ];
        let ns = null_space(&m).unwrap();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        for row in &m {
            let dot: Rat = row.iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        // Proportional to (-2, 1, 1).
        assert_eq!(&v[1], &v[2]);
        assert_eq!(v[0].clone(), -(v[1].clone() + v[2].clone()) / rat(1, 1));
    }

    #[test]
    fn full_rank_matrix_has_trivial_kernel() {
        let m = vec![
            vec![rat(2, 3), rat(1, 1)],
            vec![rat(1, 1), rat(1, 7)],
        ];
        assert_eq!(rank(&m).unwrap(), 2);
        assert!(null_space(&m).unwrap().is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let m = vec![vec![rat(0, 1); 3]; 2];
        let ns = null_space(&m).unwrap();
        assert_eq!(ns.len(), 3);
    }

    #[test]
    fn scalar_matrix_inverse() {
        let q = Scalar::q();
        let m = vec![
            vec![Scalar::one(), q.clone()],
            vec![q.pow(-1), Scalar::one()],
        ];
        // Singular: det = 1 - q*q^-1 = 0.
        assert!(matches!(
            invert_scalar_matrix(&m),
            Err(LinalgError::Singular)
        ));

        let m = vec![
            vec![q.clone(), Scalar::one()],
            vec![Scalar::zero(), q.pow(-2)],
        ];
        let inv = invert_scalar_matrix(&m).unwrap();
        // Check m * inv = id exactly.
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Scalar::zero();
                for k in 0..2 {
                    acc = acc.add(&m[i][k].mul(&inv[k][j]));
                }
                let expect = if i == j { Scalar::one() } else { Scalar::zero() };
                assert_eq!(acc, expect);
            }
        }
    }
}
