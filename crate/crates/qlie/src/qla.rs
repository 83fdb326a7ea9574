//! Quantum Lie algebra data: bracket structure constants, the compatibility
//! residuals tying a bracket to a braiding (braided symmetry, braided Jacobi
//! and the two linear systems E and F), the extended operator that packs a
//! braiding and a bracket into a single matrix whose braid relation is
//! equivalent to the whole system, and the adjoint action matrices.
//!
//! Residuals are returned as full tensors rather than booleans so failing
//! components can be reported by index; several targeted components have
//! known factored forms that the tests pin down symbolically.

use serde::{Deserialize, Serialize};

use crate::residual::Residual;
use crate::scalar::Scalar;
use crate::tensor::{braid_residual, projector_p1, Operator2, TensorError};

/// The bracket tensor `C^k_ij` (upper index is the output slot).
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<Scalar>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants {
            dim,
            c: vec![Scalar::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &Scalar {
        &self.c[(k * self.dim + i) * self.dim + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: Scalar) {
        self.c[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        StructureConstants {
            dim: self.dim,
            c: self.c.iter().map(|v| v.mul(s)).collect(),
        }
    }

    /// Nonzero entries as `(k, i, j, value)` in lexicographic order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, usize, &Scalar)> {
        let mut out = Vec::new();
        for k in 0..self.dim {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let v = self.get(k, i, j);
                    if !v.is_zero() {
                        out.push((k, i, j, v));
                    }
                }
            }
        }
        out
    }

    /// Flat coefficient vector in lexicographic `(k, i, j)` order.
    pub fn flat(&self) -> &[Scalar] {
        &self.c
    }

    pub fn from_flat(dim: usize, c: Vec<Scalar>) -> Self {
        assert_eq!(c.len(), dim * dim * dim);
        StructureConstants { dim, c }
    }

    /// Generator-antisymmetry relative to the parameter matrix `p`:
    /// `C^k_ji = -p_ji C^k_ij` and `C^k_jj = 0`. Returns the violating
    /// indices, empty when the relations hold.
    pub fn antisymmetry_violations(&self, p: &[Vec<Scalar>]) -> Vec<(usize, usize, usize)> {
        let d = self.dim;
        let mut bad = Vec::new();
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let ok = if i == j {
                        self.get(k, i, j).is_zero()
                    } else {
                        self.get(k, j, i) == &p[j][i].mul(self.get(k, i, j)).neg()
                    };
                    if !ok {
                        bad.push((k, i, j));
                    }
                }
            }
        }
        bad
    }
}

/// The one-parameter bracket family of the classification:
/// `C^k_ij = c (d^1_i d^k_j - d^1_j d^k_i)`, i.e. the first generator acts
/// diagonally on all the others.
pub fn build_theorem_c(dim: usize, c: &Scalar) -> StructureConstants {
    let mut out = StructureConstants::zero(dim);
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let mut v = Scalar::zero();
                if i == 0 && k == j {
                    v = v.add(c);
                }
                if j == 0 && k == i {
                    v = v.sub(c);
                }
                out.set(k, i, j, v);
            }
        }
    }
    out
}

/// Braided symmetry residual `C P_(1)` as a rank-3 tensor with index order
/// `(k, i, j)`; the axiom holds exactly when every component vanishes.
pub fn braided_symmetry_residual(
    sigma: &Operator2,
    c: &StructureConstants,
    q: &Scalar,
) -> Result<Residual, TensorError> {
    let d = sigma.dim();
    assert_eq!(c.dim(), d);
    let p1 = projector_p1(sigma, q)?;
    let mut out = Residual::zeros(vec![d, d, d]);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = Scalar::zero();
                for a in 0..d {
                    for b in 0..d {
                        let cv = c.get(k, a, b);
                        if cv.is_zero() {
                            continue;
                        }
                        let pv = p1.get(a, b, i, j);
                        if pv.is_zero() {
                            continue;
                        }
                        acc = acc.add(&cv.mul(pv));
                    }
                }
                out.set(&[k, i, j], acc);
            }
        }
    }
    Ok(out)
}

/// One component of the first linear compatibility system:
/// `E(i,j,k;a,b) = sigma^{ab}_{sk} C^s_{ij} - C^b_{sl} sigma^{as}_{ir} sigma^{rl}_{jk}`
/// (summed over repeated indices).
pub fn e_component(
    sigma: &Operator2,
    c: &StructureConstants,
    i: usize,
    j: usize,
    k: usize,
    a: usize,
    b: usize,
) -> Scalar {
    let d = sigma.dim();
    let mut acc = Scalar::zero();
    for s in 0..d {
        let sv = sigma.get(a, b, s, k);
        if sv.is_zero() {
            continue;
        }
        let cv = c.get(s, i, j);
        if cv.is_zero() {
            continue;
        }
        acc = acc.add(&sv.mul(cv));
    }
    for s in 0..d {
        for r in 0..d {
            let v1 = sigma.get(a, s, i, r);
            if v1.is_zero() {
                continue;
            }
            for l in 0..d {
                let cv = c.get(b, s, l);
                if cv.is_zero() {
                    continue;
                }
                let v2 = sigma.get(r, l, j, k);
                if v2.is_zero() {
                    continue;
                }
                acc = acc.sub(&v1.mul(cv).mul(&v2));
            }
        }
    }
    acc
}

/// One component of the second linear compatibility system:
/// `F(i,j,k;a,b) = sigma^{ab}_{sl} C^s_{ir} sigma^{rl}_{jk}
///               + sigma^{ab}_{il} C^l_{jk}
///               - C^a_{rl} sigma^{lb}_{sk} sigma^{rs}_{ij}
///               - C^b_{sk} sigma^{as}_{ij}`.
pub fn f_component(
    sigma: &Operator2,
    c: &StructureConstants,
    i: usize,
    j: usize,
    k: usize,
    a: usize,
    b: usize,
) -> Scalar {
    let d = sigma.dim();
    let mut acc = Scalar::zero();
    for s in 0..d {
        for l in 0..d {
            let v1 = sigma.get(a, b, s, l);
            if v1.is_zero() {
                continue;
            }
            for r in 0..d {
                let cv = c.get(s, i, r);
                if cv.is_zero() {
                    continue;
                }
                let v2 = sigma.get(r, l, j, k);
                if v2.is_zero() {
                    continue;
                }
                acc = acc.add(&v1.mul(cv).mul(&v2));
            }
        }
    }
    for l in 0..d {
        let v1 = sigma.get(a, b, i, l);
        if v1.is_zero() {
            continue;
        }
        let cv = c.get(l, j, k);
        if cv.is_zero() {
            continue;
        }
        acc = acc.add(&v1.mul(cv));
    }
    for r in 0..d {
        for l in 0..d {
            let cv = c.get(a, r, l);
            if cv.is_zero() {
                continue;
            }
            for s in 0..d {
                let v1 = sigma.get(l, b, s, k);
                if v1.is_zero() {
                    continue;
                }
                let v2 = sigma.get(r, s, i, j);
                if v2.is_zero() {
                    continue;
                }
                acc = acc.sub(&cv.mul(&v1).mul(&v2));
            }
        }
    }
    for s in 0..d {
        let cv = c.get(b, s, k);
        if cv.is_zero() {
            continue;
        }
        let v1 = sigma.get(a, s, i, j);
        if v1.is_zero() {
            continue;
        }
        acc = acc.sub(&cv.mul(&v1));
    }
    acc
}

/// Full E tensor, shape `(i, j, k, a, b)`.
pub fn e_residual(sigma: &Operator2, c: &StructureConstants) -> Residual {
    let d = sigma.dim();
    let mut out = Residual::zeros(vec![d; 5]);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        out.set(&[i, j, k, a, b], e_component(sigma, c, i, j, k, a, b));
                    }
                }
            }
        }
    }
    out
}

/// Full F tensor, shape `(i, j, k, a, b)`.
pub fn f_residual(sigma: &Operator2, c: &StructureConstants) -> Residual {
    let d = sigma.dim();
    let mut out = Residual::zeros(vec![d; 5]);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        out.set(&[i, j, k, a, b], f_component(sigma, c, i, j, k, a, b));
                    }
                }
            }
        }
    }
    out
}

/// Braided Jacobi residual, shape `(i, j, k, b)`:
/// `C^b_{sk} C^s_{ij} - C^b_{is} C^s_{jk} - C^b_{sl} C^s_{ir} sigma^{rl}_{jk}`.
pub fn jacobi_residual(sigma: &Operator2, c: &StructureConstants) -> Residual {
    let d = sigma.dim();
    let mut out = Residual::zeros(vec![d; 4]);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for b in 0..d {
                    let mut acc = Scalar::zero();
                    for s in 0..d {
                        let c1 = c.get(b, s, k);
                        if !c1.is_zero() {
                            let c2 = c.get(s, i, j);
                            if !c2.is_zero() {
                                acc = acc.add(&c1.mul(c2));
                            }
                        }
                        let c1 = c.get(b, i, s);
                        if !c1.is_zero() {
                            let c2 = c.get(s, j, k);
                            if !c2.is_zero() {
                                acc = acc.sub(&c1.mul(c2));
                            }
                        }
                    }
                    for s in 0..d {
                        for l in 0..d {
                            let c1 = c.get(b, s, l);
                            if c1.is_zero() {
                                continue;
                            }
                            for r in 0..d {
                                let c2 = c.get(s, i, r);
                                if c2.is_zero() {
                                    continue;
                                }
                                let sv = sigma.get(r, l, j, k);
                                if sv.is_zero() {
                                    continue;
                                }
                                acc = acc.sub(&c1.mul(c2).mul(sv));
                            }
                        }
                    }
                    out.set(&[i, j, k, b], acc);
                }
            }
        }
    }
    out
}

/// The extended operator on the `(d+1)`-dimensional space spanned by an
/// adjoined index 0 and the original basis (shifted up by one). Nonzero
/// blocks: the braiding on small indices, the bracket at upper `(0, j)`, and
/// two Kronecker-delta clauses coupling 0 with everything.
pub fn extended_rhat(sigma: &Operator2, c: &StructureConstants) -> Operator2 {
    let d = sigma.dim();
    assert_eq!(c.dim(), d);
    let big = d + 1;
    let mut out = Operator2::zero(big);
    for k in 0..d {
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let v = sigma.get(k, l, i, j);
                    if !v.is_zero() {
                        out.set(k + 1, l + 1, i + 1, j + 1, v.clone());
                    }
                }
            }
        }
    }
    for j in 0..d {
        for k in 0..d {
            for l in 0..d {
                let v = c.get(j, k, l);
                if !v.is_zero() {
                    out.set(0, j + 1, k + 1, l + 1, v.clone());
                }
            }
        }
    }
    for a in 0..big {
        out.set(0, a, a, 0, Scalar::one());
        out.set(a, 0, 0, a, Scalar::one());
    }
    out
}

/// All four compatibility residuals of a `(braiding, bracket)` pair plus the
/// bracket antisymmetry data; `q` identifies the Hecke eigenvalue pair.
pub struct AxiomResiduals {
    pub braided_symmetry: Residual,
    pub jacobi: Residual,
    pub e: Residual,
    pub f: Residual,
}

impl AxiomResiduals {
    pub fn all_zero(&self) -> bool {
        self.braided_symmetry.is_zero() && self.jacobi.is_zero() && self.e.is_zero() && self.f.is_zero()
    }
}

pub fn axiom_residuals(
    sigma: &Operator2,
    c: &StructureConstants,
    q: &Scalar,
) -> Result<AxiomResiduals, TensorError> {
    Ok(AxiomResiduals {
        braided_symmetry: braided_symmetry_residual(sigma, c, q)?,
        jacobi: jacobi_residual(sigma, c),
        e: e_residual(sigma, c),
        f: f_residual(sigma, c),
    })
}

/// Side-by-side evaluation of the packed braid relation and the four
/// separate systems it encodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub extended_braid_zero: bool,
    pub braid_zero: bool,
    pub jacobi_zero: bool,
    pub e_zero: bool,
    pub f_zero: bool,
    /// Whether the packed relation agrees with the conjunction of the four.
    pub equivalent: bool,
    /// Reports of the systems that failed, keyed by name.
    pub failing: Vec<(String, crate::residual::ResidualReport)>,
}

impl EquivalenceReport {
    pub fn separate_all_zero(&self) -> bool {
        self.braid_zero && self.jacobi_zero && self.e_zero && self.f_zero
    }
}

/// Compute the braid residual of the extended operator and the residuals of
/// the four separate systems, and report whether "packed zero" agrees with
/// "all four zero".
pub fn equivalence_report(sigma: &Operator2, c: &StructureConstants) -> EquivalenceReport {
    let ext = extended_rhat(sigma, c);
    let ext_res = braid_residual(&ext);
    let braid = braid_residual(sigma);
    let jac = jacobi_residual(sigma, c);
    let e = e_residual(sigma, c);
    let f = f_residual(sigma, c);

    let extended_braid_zero = ext_res.is_zero();
    let braid_zero = braid.is_zero();
    let jacobi_zero = jac.is_zero();
    let e_zero = e.is_zero();
    let f_zero = f.is_zero();
    let mut failing = Vec::new();
    if !extended_braid_zero {
        failing.push(("extended_braid".to_string(), ext_res.to_residual().report()));
    }
    if !braid_zero {
        failing.push(("braid".to_string(), braid.to_residual().report()));
    }
    if !jacobi_zero {
        failing.push(("jacobi".to_string(), jac.report()));
    }
    if !e_zero {
        failing.push(("e".to_string(), e.report()));
    }
    if !f_zero {
        failing.push(("f".to_string(), f.report()));
    }
    EquivalenceReport {
        extended_braid_zero,
        braid_zero,
        jacobi_zero,
        e_zero,
        f_zero,
        equivalent: extended_braid_zero == (braid_zero && jacobi_zero && e_zero && f_zero),
        failing,
    }
}

/// Adjoint matrices of the dual generators: for each `(i, j)` the matrix
/// `[sigma^{ib}_{aj}]` with row index `b` and column index `a`.
pub fn adjoint_dual_matrices(sigma: &Operator2) -> Vec<Vec<Vec<Vec<Scalar>>>> {
    let d = sigma.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d)
                        .map(|b| (0..d).map(|a| sigma.get(i, b, a, j).clone()).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Adjoint matrices of the generators themselves: for each `i` the matrix
/// `[C^b_{ai}]` with row index `b` and column index `a`.
pub fn adjoint_bracket_matrices(c: &StructureConstants) -> Vec<Vec<Vec<Scalar>>> {
    let d = c.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|b| (0..d).map(|a| c.get(b, a, i).clone()).collect())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::{build_sigma, ParamSpec};
    use crate::scalar::rat;

    fn sc(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    /// Bracket with a distinct symbol in every slot; used to reproduce the
    /// factored component formulas without assuming anything about C.
    fn generic_c(d: usize) -> StructureConstants {
        let mut c = StructureConstants::zero(d);
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    c.set(k, i, j, Scalar::var(&format!("x{}_{}_{}", k, i, j)));
                }
            }
        }
        c
    }

    fn admissible_spec(parity: Vec<u8>) -> ParamSpec {
        assert_eq!(parity[0], 0);
        ParamSpec::symbolic_first_row_trivial(parity)
    }

    #[test]
    fn theorem_c_entries() {
        let one = Scalar::one();
        let c2 = build_theorem_c(2, &one);
        let nz = c2.nonzero_entries();
        assert_eq!(nz.len(), 2);
        assert_eq!(*c2.get(1, 0, 1), sc("1"));
        assert_eq!(*c2.get(1, 1, 0), sc("-1"));

        // d = 1: the antisymmetrization kills the only candidate entry.
        assert!(build_theorem_c(1, &one).is_zero());

        let c3 = build_theorem_c(3, &one);
        assert_eq!(c3.nonzero_entries().len(), 4);
        assert_eq!(*c3.get(1, 0, 1), sc("1"));
        assert_eq!(*c3.get(2, 0, 2), sc("1"));
        assert_eq!(*c3.get(1, 1, 0), sc("-1"));
        assert_eq!(*c3.get(2, 2, 0), sc("-1"));
    }

    #[test]
    fn braided_symmetry_of_theorem_triple() {
        let spec = admissible_spec(vec![0, 0]);
        let sigma = build_sigma(&spec).to_operator();
        let cc = build_theorem_c(2, &Scalar::var("c"));
        let res = braided_symmetry_residual(&sigma, &cc, spec.q()).unwrap();
        assert!(res.is_zero());
        assert!(braided_symmetry_residual(&sigma, &StructureConstants::zero(2), spec.q())
            .unwrap()
            .is_zero());

        // Flipping the sign of C^2_21 breaks the symmetry; the component at
        // (k, i, j) = (2, 1, 2) becomes 2c / (1 + q^-2) instead of 0.
        let mut wrong = cc.clone();
        wrong.set(1, 1, 0, Scalar::var("c"));
        let res = braided_symmetry_residual(&sigma, &wrong, spec.q()).unwrap();
        assert!(!res.is_zero());
        let expect = sc("2*c").div(&sc("1+q^-2")).unwrap();
        assert_eq!(res.get(&[1, 0, 1]), &expect);
    }

    #[test]
    fn e_vanishes_for_theorem_triple() {
        let spec = admissible_spec(vec![0, 0]);
        let sigma = build_sigma(&spec).to_operator();
        let cc = build_theorem_c(2, &Scalar::var("c"));
        // The single component worked out by hand: indices (1,2,2;2,2).
        assert!(e_component(&sigma, &cc, 0, 1, 1, 1, 1).is_zero());
        assert!(e_residual(&sigma, &cc).is_zero());
        assert!(e_residual(&sigma, &StructureConstants::zero(2)).is_zero());
    }

    #[test]
    fn e_subsystem_factors_for_distinct_indices() {
        // For three distinct indices the sums freeze and
        // E(i,j,k;k,k) = (A_kk - A_jk A_ik) C^k_ij for any bracket.
        let spec = ParamSpec::symbolic(vec![0, 1, 0]);
        let ice = build_sigma(&spec);
        let sigma = ice.to_operator();
        let c = generic_c(3);
        for (i, j, k) in [(0usize, 1usize, 2usize), (1, 0, 2), (2, 0, 1), (1, 2, 0)] {
            let lhs = e_component(&sigma, &c, i, j, k, k, k);
            let factor = ice.a[k][k].sub(&ice.a[j][k].mul(&ice.a[i][k]));
            let rhs = factor.mul(c.get(k, i, j));
            assert_eq!(lhs, rhs, "mismatch at ({i},{j},{k})");
        }
    }

    #[test]
    fn e_cross_constraint_for_ordered_triples() {
        // E(1,j,k;j,k) = B_jk (C^j_1j - p_1j C^k_1k) for 0 < j < k
        // (0-based first index).
        let spec = ParamSpec::symbolic(vec![0, 0, 0]);
        let ice = build_sigma(&spec);
        let sigma = ice.to_operator();
        let c = generic_c(3);
        let (j, k) = (1usize, 2usize);
        let lhs = e_component(&sigma, &c, 0, j, k, j, k);
        let rhs = ice.b[j][k].mul(
            &c.get(j, 0, j).sub(&Scalar::p(0, j).mul(c.get(k, 0, k))),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn f_vanishes_for_theorem_triple() {
        let spec = admissible_spec(vec![0, 0]);
        let sigma = build_sigma(&spec).to_operator();
        let cc = build_theorem_c(2, &Scalar::var("c"));
        assert!(f_residual(&sigma, &cc).is_zero());
        assert!(f_residual(&sigma, &StructureConstants::zero(2)).is_zero());
    }

    #[test]
    fn f_odd_square_component_factors() {
        // With parity(j) = 1 the component F(j,j,j;j,k) reduces to
        // [-q^-2 p_kj q^{-2 th(k>j)} + 1 - q^{-2 th(j<k)} + q^-2] C^k_jj.
        for (j, k, parity) in [
            (0usize, 1usize, vec![1u8, 0u8]),
            (1, 0, vec![0, 1]),
            (0, 1, vec![1, 1]),
        ] {
            let spec = ParamSpec::symbolic(parity);
            let sigma = build_sigma(&spec).to_operator();
            let c = generic_c(2);
            let lhs = f_component(&sigma, &c, j, j, j, j, k);
            let th_kj = if k > j { -2 } else { 0 };
            let th_jk = if j < k { -2 } else { 0 };
            let bracket = sc("-q^-2")
                .mul(&Scalar::p(k, j))
                .mul(&Scalar::q().pow(th_kj))
                .add(&Scalar::one())
                .sub(&Scalar::q().pow(th_jk))
                .add(&sc("q^-2"));
            assert_eq!(lhs, bracket.mul(c.get(k, j, j)));
        }
    }

    #[test]
    fn jacobi_cases() {
        let spec = admissible_spec(vec![0, 0, 0]);
        let sigma = build_sigma(&spec).to_operator();
        assert!(jacobi_residual(&sigma, &StructureConstants::zero(3)).is_zero());
        let cc = build_theorem_c(3, &Scalar::var("c"));
        assert!(jacobi_residual(&sigma, &cc).is_zero());

        // Classical sanity case: the nonabelian 2-dim Lie algebra with the
        // plain flip as braiding satisfies the ordinary Jacobi identity.
        let flip = Operator2::flip(2);
        let classical = build_theorem_c(2, &Scalar::from_rat(rat(1, 1)));
        assert!(jacobi_residual(&flip, &classical).is_zero());
    }

    #[test]
    fn extended_operator_structure() {
        // Trivial bracket over the flip: a permutation-like 0/1 matrix.
        let flip = Operator2::flip(2);
        let ext = extended_rhat(&flip, &StructureConstants::zero(2));
        assert_eq!(ext.dim(), 3);
        for (_, _, v) in ext.nonzero_entries() {
            assert!(v.is_one());
        }

        // Entry count: nnz(sigma) + nnz(C) + 2(d+1) - 1.
        let spec = admissible_spec(vec![0, 0]);
        let sigma = build_sigma(&spec).to_operator();
        let cc = build_theorem_c(2, &Scalar::var("c"));
        let ext = extended_rhat(&sigma, &cc);
        assert_eq!(
            ext.nonzero_count(),
            sigma.nonzero_count() + cc.nonzero_entries().len() + 2 * 3 - 1
        );

        // The bracket block: upper (0, 2), lower (1, 2) and (2, 1).
        assert_eq!(ext.get(0, 2, 1, 2), &Scalar::var("c"));
        assert_eq!(ext.get(0, 2, 2, 1), &Scalar::var("c").neg());
    }

    #[test]
    fn packed_residual_components_match_e_and_f() {
        // Components of the packed braid residual carrying exactly one
        // adjoined index: upper middle reproduces E, upper first reproduces
        // -F, and every other single-0 slot vanishes identically.
        let spec = ParamSpec::symbolic(vec![0, 1]);
        let sigma = build_sigma(&spec).to_operator();
        let mut c = StructureConstants::zero(2);
        c.set(0, 0, 1, sc("c"));
        c.set(1, 1, 0, sc("3*q"));
        c.set(0, 0, 0, sc("p12"));
        let ext = extended_rhat(&sigma, &c);
        let res = braid_residual(&ext);
        let d = 2usize;
        let big = d + 1;
        let idx = |x: usize, y: usize, z: usize| (x * big + y) * big + z;
        for a in 0..d {
            for b in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            let row_e = idx(a + 1, 0, b + 1);
                            let col = idx(i + 1, j + 1, k + 1);
                            assert_eq!(
                                res.entry(row_e, col),
                                &e_component(&sigma, &c, i, j, k, a, b)
                            );
                            let row_f = idx(0, a + 1, b + 1);
                            assert_eq!(
                                res.entry(row_f, col),
                                &f_component(&sigma, &c, i, j, k, a, b).neg()
                            );
                            // Single 0 in the last upper slot or any lower slot.
                            assert!(res.entry(idx(a + 1, b + 1, 0), col).is_zero());
                            let row_s = idx(a + 1, b + 1, i + 1);
                            assert!(res.entry(row_s, idx(0, j + 1, k + 1)).is_zero());
                            assert!(res.entry(row_s, idx(j + 1, 0, k + 1)).is_zero());
                            assert!(res.entry(row_s, idx(j + 1, k + 1, 0)).is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_for_theorem_triple_and_perturbation() {
        let spec = admissible_spec(vec![0, 0]);
        let sigma = build_sigma(&spec).to_operator();
        let cc = build_theorem_c(2, &Scalar::var("c"));
        let rep = equivalence_report(&sigma, &cc);
        assert!(rep.extended_braid_zero);
        assert!(rep.separate_all_zero());
        assert!(rep.equivalent);
        assert!(rep.failing.is_empty());

        // Trivial bracket: both sides zero as well.
        let rep = equivalence_report(&sigma, &StructureConstants::zero(2));
        assert!(rep.extended_braid_zero && rep.separate_all_zero());

        // A perturbed bracket fails on both sides at once.
        let mut bad = cc.clone();
        bad.set(0, 1, 1, sc("1"));
        let rep = equivalence_report(&sigma, &bad);
        assert!(!rep.extended_braid_zero);
        assert!(!rep.separate_all_zero());
        assert!(rep.equivalent);

        let json = serde_json::to_string(&rep).unwrap();
        let back: EquivalenceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn adjoint_matrices_read_off() {
        // Trivial bracket: all generator adjoints vanish.
        let zero = StructureConstants::zero(2);
        for m in adjoint_bracket_matrices(&zero) {
            assert!(m.iter().flatten().all(Scalar::is_zero));
        }

        // Canonical family at d = 2: ad of the first generator has the
        // single entry (b, a) = (2, 2) equal to -c.
        let cc = build_theorem_c(2, &Scalar::var("c"));
        let ads = adjoint_bracket_matrices(&cc);
        assert_eq!(ads[0][1][1], sc("-c"));
        assert!(ads[0][0][0].is_zero());
        assert!(ads[0][0][1].is_zero());
        assert!(ads[0][1][0].is_zero());

        // For the flip, the dual-generator adjoints are delta^i_j times the
        // identity matrix.
        let duals = adjoint_dual_matrices(&Operator2::flip(2));
        for i in 0..2 {
            for j in 0..2 {
                for b in 0..2 {
                    for a in 0..2 {
                        let expect = if i == j && a == b {
                            Scalar::one()
                        } else {
                            Scalar::zero()
                        };
                        assert_eq!(duals[i][j][b][a], expect);
                    }
                }
            }
        }
    }

    #[test]
    fn antisymmetry_check() {
        let spec = admissible_spec(vec![0, 0]);
        let cc = build_theorem_c(2, &Scalar::var("c"));
        assert!(cc.antisymmetry_violations(spec.p_matrix()).is_empty());
        let mut bad = cc.clone();
        bad.set(0, 1, 1, sc("1"));
        assert!(!bad.antisymmetry_violations(spec.p_matrix()).is_empty());
    }
}
