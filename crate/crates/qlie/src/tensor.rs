//! Dense exact operators on V tensor V and V tensor V tensor V.
//!
//! Component convention: `M^{kl}_{ij}` has upper indices as output and lower
//! as input, with composite row index `k*d + l` and column index `i*d + j`
//! (row-major, 0-based). Composition `(M o N)^{ab}_{ij} = sum_kl M^{ab}_{kl}
//! N^{kl}_{ij}` applies `N` first. Storage is dense (the spaces are tiny);
//! products skip stored zeros, which is what makes the symbolic sweeps cheap
//! since everything in sight is ice-sparse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{invert_scalar_matrix, LinalgError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("operator dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no skew inverse: the defining linear system is singular")]
    NotSkewInvertible,
    #[error("operator does not satisfy the quadratic Hecke identity")]
    NotHecke,
    #[error("spectrum degenerates: the two Hecke eigenvalues coincide (q^2 = -1)")]
    DegenerateSpectrum,
    #[error("operator is singular")]
    Singular,
}

/// An exact operator on V tensor V, stored as a d^2 x d^2 scalar array.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator2 {
    dim: usize,
    data: Vec<Scalar>,
}

/// An exact operator on V tensor V tensor V, d^3 x d^3.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator3 {
    dim: usize,
    data: Vec<Scalar>,
}

fn compose_dense(n: usize, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); n * n];
    // Row lists of b's nonzero entries, built once.
    let mut b_rows: Vec<Vec<(usize, &Scalar)>> = vec![Vec::new(); n];
    for r in 0..n {
        for c in 0..n {
            let v = &b[r * n + c];
            if !v.is_zero() {
                b_rows[r].push((c, v));
            }
        }
    }
    for r in 0..n {
        for k in 0..n {
            let av = &a[r * n + k];
            if av.is_zero() {
                continue;
            }
            for &(c, bv) in &b_rows[k] {
                let t = av.mul(bv);
                out[r * n + c] = out[r * n + c].add(&t);
            }
        }
    }
    out
}

macro_rules! operator_common {
    ($T:ident, $rank:expr) => {
        impl $T {
            /// Side length of the underlying matrix (`dim^`$rank`).
            pub fn size(&self) -> usize {
                self.dim.pow($rank)
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn zero(dim: usize) -> Self {
                let n = dim.pow($rank);
                $T {
                    dim,
                    data: vec![Scalar::zero(); n * n],
                }
            }

            pub fn identity(dim: usize) -> Self {
                let mut m = Self::zero(dim);
                let n = m.size();
                for i in 0..n {
                    m.data[i * n + i] = Scalar::one();
                }
                m
            }

            pub fn entry(&self, row: usize, col: usize) -> &Scalar {
                &self.data[row * self.size() + col]
            }

            pub fn set_entry(&mut self, row: usize, col: usize, v: Scalar) {
                let n = self.size();
                self.data[row * n + col] = v;
            }

            pub fn compose(&self, other: &Self) -> Self {
                assert_eq!(self.dim, other.dim, "operator dimensions differ");
                $T {
                    dim: self.dim,
                    data: compose_dense(self.size(), &self.data, &other.data),
                }
            }

            pub fn add(&self, other: &Self) -> Self {
                assert_eq!(self.dim, other.dim);
                $T {
                    dim: self.dim,
                    data: self
                        .data
                        .iter()
                        .zip(&other.data)
                        .map(|(a, b)| a.add(b))
                        .collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                assert_eq!(self.dim, other.dim);
                $T {
                    dim: self.dim,
                    data: self
                        .data
                        .iter()
                        .zip(&other.data)
                        .map(|(a, b)| a.sub(b))
                        .collect(),
                }
            }

            pub fn scale(&self, s: &Scalar) -> Self {
                $T {
                    dim: self.dim,
                    data: self.data.iter().map(|a| a.mul(s)).collect(),
                }
            }

            pub fn is_zero(&self) -> bool {
                self.data.iter().all(Scalar::is_zero)
            }

            pub fn nonzero_count(&self) -> usize {
                self.data.iter().filter(|v| !v.is_zero()).count()
            }

            /// Full transpose: `(M^T)^{kl}_{ij} = M^{ij}_{kl}`.
            pub fn transpose(&self) -> Self {
                let n = self.size();
                let mut out = Self::zero(self.dim);
                for r in 0..n {
                    for c in 0..n {
                        out.data[c * n + r] = self.data[r * n + c].clone();
                    }
                }
                out
            }
        }
    };
}

operator_common!(Operator2, 2);
operator_common!(Operator3, 3);

impl Operator2 {
    /// Component access: upper (output) pair `(k, l)`, lower (input) `(i, j)`.
    pub fn get(&self, k: usize, l: usize, i: usize, j: usize) -> &Scalar {
        self.entry(k * self.dim + l, i * self.dim + j)
    }

    pub fn set(&mut self, k: usize, l: usize, i: usize, j: usize, v: Scalar) {
        let (row, col) = (k * self.dim + l, i * self.dim + j);
        self.set_entry(row, col, v);
    }

    /// The flip `P(u ox v) = v ox u`.
    pub fn flip(dim: usize) -> Operator2 {
        let mut m = Operator2::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(j, i, i, j, Scalar::one());
            }
        }
        m
    }

    /// Kronecker product of two d x d one-particle operators.
    pub fn kron(m1: &[Vec<Scalar>], m2: &[Vec<Scalar>]) -> Operator2 {
        let d = m1.len();
        assert_eq!(m2.len(), d);
        let mut out = Operator2::zero(d);
        for a in 0..d {
            for b in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        out.set(a, b, i, j, m1[a][i].mul(&m2[b][j]));
                    }
                }
            }
        }
        out
    }

    /// Matrix inverse over the exact coefficient field.
    pub fn inverse(&self) -> Result<Operator2, TensorError> {
        let n = self.size();
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|r| (0..n).map(|c| self.entry(r, c).clone()).collect())
            .collect();
        let inv = invert_scalar_matrix(&rows).map_err(|e| match e {
            LinalgError::Singular => TensorError::Singular,
            LinalgError::RaggedMatrix => unreachable!("square by construction"),
        })?;
        let mut out = Operator2::zero(self.dim);
        for r in 0..n {
            for c in 0..n {
                out.set_entry(r, c, inv[r][c].clone());
            }
        }
        Ok(out)
    }

    /// Conjugate by a basis permutation: basis vector `i` is relabelled
    /// `perm[i]`, i.e. the result has `M'^{perm(k) perm(l)}_{perm(i) perm(j)}
    /// = M^{kl}_{ij}`.
    pub fn relabel_basis(&self, perm: &[usize]) -> Operator2 {
        let d = self.dim;
        assert_eq!(perm.len(), d);
        let mut out = Operator2::zero(d);
        for k in 0..d {
            for l in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let v = self.get(k, l, i, j);
                        if !v.is_zero() {
                            out.set(perm[k], perm[l], perm[i], perm[j], v.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// `P M P` with the flip `P`: swaps both tensor slots.
    pub fn flip_conjugate(&self) -> Operator2 {
        let d = self.dim;
        let mut out = Operator2::zero(d);
        for k in 0..d {
            for l in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let v = self.get(k, l, i, j);
                        if !v.is_zero() {
                            out.set(l, k, j, i, v.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// View as a rank-4 residual tensor with index order `(k, l, i, j)`.
    pub fn to_residual(&self) -> crate::residual::Residual {
        let d = self.dim;
        let mut out = crate::residual::Residual::zeros(vec![d; 4]);
        for k in 0..d {
            for l in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let v = self.get(k, l, i, j);
                        if !v.is_zero() {
                            out.set(&[k, l, i, j], v.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// Nonzero entries as `(row, col, value)` triples, row-major order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, &Scalar)> {
        let n = self.size();
        let mut out = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = self.entry(r, c);
                if !v.is_zero() {
                    out.push((r, c, v));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            dim: self.dim,
            entries: self
                .nonzero_entries()
                .into_iter()
                .map(|(r, c, v)| (r, c, v.to_string()))
                .collect(),
        }
    }

    pub fn from_json(j: &OperatorJson) -> Result<Operator2, crate::scalar::ScalarError> {
        let mut m = Operator2::zero(j.dim);
        let n = m.size();
        for (r, c, s) in &j.entries {
            if *r >= n || *c >= n {
                return Err(crate::scalar::ScalarError::Parse(format!(
                    "entry index ({r}, {c}) out of range for dimension {}",
                    j.dim
                )));
            }
            m.set_entry(*r, *c, s.parse()?);
        }
        Ok(m)
    }
}

/// Serialized form of an operator: dimension plus nonzero `(row, col,
/// scalar-string)` triples with row-major composite indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl Operator3 {
    /// View as a rank-6 residual tensor with index order `(a, b, c, i, j, k)`.
    pub fn to_residual(&self) -> crate::residual::Residual {
        let d = self.dim;
        let n = self.size();
        let mut out = crate::residual::Residual::zeros(vec![d; 6]);
        for row in 0..n {
            for col in 0..n {
                let v = self.entry(row, col);
                if v.is_zero() {
                    continue;
                }
                let (a, b, c) = (row / (d * d), (row / d) % d, row % d);
                let (i, j, k) = (col / (d * d), (col / d) % d, col % d);
                out.set(&[a, b, c, i, j, k], v.clone());
            }
        }
        out
    }
}

/// `m ox id`: acts on slots 1 and 2 of the triple tensor product.
pub fn lift12(m: &Operator2) -> Operator3 {
    let d = m.dim();
    let mut out = Operator3::zero(d);
    let n2 = d * d;
    for r in 0..n2 {
        for c in 0..n2 {
            let v = m.entry(r, c);
            if v.is_zero() {
                continue;
            }
            for k in 0..d {
                out.set_entry(r * d + k, c * d + k, v.clone());
            }
        }
    }
    out
}

/// `id ox m`: acts on slots 2 and 3.
pub fn lift23(m: &Operator2) -> Operator3 {
    let d = m.dim();
    let mut out = Operator3::zero(d);
    let n2 = d * d;
    for r in 0..n2 {
        for c in 0..n2 {
            let v = m.entry(r, c);
            if v.is_zero() {
                continue;
            }
            for k in 0..d {
                out.set_entry(k * n2 + r, k * n2 + c, v.clone());
            }
        }
    }
    out
}

/// The braid defect `m12 m23 m12 - m23 m12 m23`; the operator satisfies the
/// braid relation exactly when this is the zero operator.
pub fn braid_residual(m: &Operator2) -> Operator3 {
    let a = lift12(m);
    let b = lift23(m);
    let lhs = a.compose(&b).compose(&a);
    let rhs = b.compose(&a).compose(&b);
    lhs.sub(&rhs)
}

/// `(m - eig1) (m - eig2)`: zero exactly when `m` satisfies the quadratic
/// characteristic identity with the two given eigenvalues.
pub fn hecke_residual(m: &Operator2, eig1: &Scalar, eig2: &Scalar) -> Operator2 {
    let id = Operator2::identity(m.dim());
    let f1 = m.sub(&id.scale(eig1));
    let f2 = m.sub(&id.scale(eig2));
    f1.compose(&f2)
}

/// Spectral projector onto the eigenvalue-1 subspace of a Hecke operator
/// with eigenvalues `1` and `-q^-2`: `(m + q^-2) / (1 + q^-2)`.
///
/// `q` is the deformation parameter of `m`, symbolic or an exact rational.
pub fn projector_p1(m: &Operator2, q: &Scalar) -> Result<Operator2, TensorError> {
    let qinv2 = q.pow(-2);
    let denom = Scalar::one().add(&qinv2);
    if denom.is_zero() {
        return Err(TensorError::DegenerateSpectrum);
    }
    let minus_qinv2 = qinv2.neg();
    if !hecke_residual(m, &Scalar::one(), &minus_qinv2).is_zero() {
        return Err(TensorError::NotHecke);
    }
    let id = Operator2::identity(m.dim());
    Ok(m.add(&id.scale(&qinv2)).scale(&denom.invert().expect("nonzero")))
}

/// Skew inverse: the operator `Psi` with `Psi^{iu}_{jv} m^{vk}_{ul} =
/// delta^i_l delta^k_j`.
///
/// For fixed `(i, j)` the defining equations share the same d^2 x d^2
/// coefficient matrix `B[(u,v),(k,l)] = m^{vk}_{ul}`, so the whole problem is
/// one exact matrix inversion followed by an index reshuffle; the defining
/// contraction is verified symbolically before returning.
pub fn skew_inverse(m: &Operator2) -> Result<Operator2, TensorError> {
    let d = m.dim();
    let n = d * d;
    let mut b: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); n]; n];
    for u in 0..d {
        for v in 0..d {
            for k in 0..d {
                for l in 0..d {
                    b[u * d + v][k * d + l] = m.get(v, k, u, l).clone();
                }
            }
        }
    }
    let binv = invert_scalar_matrix(&b).map_err(|_| TensorError::NotSkewInvertible)?;
    let mut psi = Operator2::zero(d);
    for i in 0..d {
        for u in 0..d {
            for j in 0..d {
                for v in 0..d {
                    psi.set(i, u, j, v, binv[j * d + i][u * d + v].clone());
                }
            }
        }
    }
    // Verify the defining contraction exactly.
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut acc = Scalar::zero();
                    for u in 0..d {
                        for v in 0..d {
                            let pv = psi.get(i, u, j, v);
                            if pv.is_zero() {
                                continue;
                            }
                            let mv = m.get(v, k, u, l);
                            if mv.is_zero() {
                                continue;
                            }
                            acc = acc.add(&pv.mul(mv));
                        }
                    }
                    let expect = if i == l && k == j {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    };
                    if acc != expect {
                        return Err(TensorError::NotSkewInvertible);
                    }
                }
            }
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn sc(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn identity_lifts_to_identity() {
        let id = Operator2::identity(2);
        assert_eq!(lift12(&id), Operator3::identity(2));
        assert_eq!(lift23(&id), Operator3::identity(2));
        assert!(braid_residual(&id).is_zero());
    }

    #[test]
    fn flip_satisfies_braid() {
        for d in 1..=3 {
            let p = Operator2::flip(d);
            assert!(braid_residual(&p).is_zero());
            // The lifted triple products agree side by side as well.
            let a = lift12(&p);
            let b = lift23(&p);
            assert_eq!(a.compose(&b).compose(&a), b.compose(&a).compose(&b));
        }
    }

    #[test]
    fn generic_operator_fails_braid() {
        // Entries in {0, 1, q}: a fixed pattern that is not a braiding.
        let mut m = Operator2::zero(2);
        m.set(0, 0, 0, 0, Scalar::one());
        m.set(0, 1, 1, 0, Scalar::q());
        m.set(1, 0, 0, 1, Scalar::one());
        m.set(1, 1, 1, 1, Scalar::q());
        m.set(0, 0, 1, 1, Scalar::one());
        assert!(!braid_residual(&m).is_zero());
    }

    #[test]
    fn composition_is_associative_on_fixed_triple() {
        let p = Operator2::flip(2);
        let mut m = Operator2::zero(2);
        m.set(0, 0, 0, 0, sc("q"));
        m.set(1, 1, 0, 0, sc("1-q^-2"));
        m.set(0, 1, 0, 1, sc("p12"));
        m.set(1, 0, 1, 1, sc("2/3"));
        let id = Operator2::identity(2);
        let ab_c = m.compose(&p).compose(&id.add(&m));
        let a_bc = m.compose(&p.compose(&id.add(&m)));
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn disjoint_slot_lifts_commute() {
        // M = m' ox id and N = id ox n' act on disjoint slots after lifting.
        let d = 2;
        let m1 = vec![
            vec![sc("q"), sc("1")],
            vec![sc("0"), sc("q^-1")],
        ];
        let n1 = vec![
            vec![sc("2"), sc("p12")],
            vec![sc("1"), sc("0")],
        ];
        let idm: Vec<Vec<Scalar>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                    .collect()
            })
            .collect();
        let m = Operator2::kron(&m1, &idm);
        let n = Operator2::kron(&idm, &n1);
        let lhs = lift12(&m).compose(&lift23(&n));
        let rhs = lift23(&n).compose(&lift12(&m));
        assert_eq!(lhs, rhs);

        // Without the disjointness the lifts do not commute in general.
        let full = Operator2::kron(&m1, &n1);
        let lhs = lift12(&full).compose(&lift23(&full));
        let rhs = lift23(&full).compose(&lift12(&full));
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn hecke_residual_cases() {
        let q = Scalar::q();
        let one = Scalar::one();
        let neg_qinv2 = q.pow(-2).neg();
        let id = Operator2::identity(2);
        // First factor vanishes for the identity.
        assert!(hecke_residual(&id, &one, &neg_qinv2).is_zero());
        // The flip has eigenvalues 1 and -1, so it fails for symbolic q.
        let p = Operator2::flip(2);
        assert!(!hecke_residual(&p, &one, &neg_qinv2).is_zero());
    }

    #[test]
    fn projector_of_identity_is_identity() {
        let id = Operator2::identity(2);
        let p1 = projector_p1(&id, &Scalar::q()).unwrap();
        assert_eq!(p1, id);
    }

    #[test]
    fn projector_rejects_degenerate_spectrum() {
        // q^2 = -1 has no rational witness; use the scalar identity instead:
        // 1 + q^-2 = 0 forces the error path via a symbolic stand-in. The
        // rational stand-in below exercises NotHecke.
        let id = Operator2::identity(2);
        let err = projector_p1(&Operator2::flip(2), &Scalar::from_rat(rat(2, 1))).unwrap_err();
        assert_eq!(err, TensorError::NotHecke);
        let _ = id;
    }

    #[test]
    fn skew_inverse_trivial_and_flip() {
        let one = Operator2::identity(1);
        assert_eq!(skew_inverse(&one).unwrap(), one);

        // For the flip the 4x4 defining system solves to the flip itself.
        let p = Operator2::flip(2);
        assert_eq!(skew_inverse(&p).unwrap(), p);
    }

    #[test]
    fn operator_json_roundtrip() {
        let mut m = Operator2::zero(2);
        m.set(0, 1, 1, 0, sc("q-q^-1"));
        m.set(1, 1, 1, 1, sc("p12^-1"));
        let j = m.to_json();
        assert_eq!(j.entries.len(), 2);
        let back = Operator2::from_json(&j).unwrap();
        assert_eq!(back, m);
        let text = serde_json::to_string(&j).unwrap();
        let j2: OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(j2, j);
    }
}
