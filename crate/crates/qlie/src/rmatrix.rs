//! Standard multi-parametric ice braidings on a super-space: parameter
//! specifications, the two-array ice form, constructors for the standard
//! operator and its eigenvalue-1 rescaling, the parameter reduction
//! absorbing the second rescaling, structural predicates, and a recognizer
//! that recovers the parameters of a standard operator up to basis
//! reordering and an overall scale.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};
use crate::tensor::Operator2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("parity vector length {0} does not match dimension {1}")]
    ParityLength(usize, usize),
    #[error("parity entries must be 0 or 1")]
    ParityValue,
    #[error("q must be nonzero")]
    ZeroQ,
    #[error("p must be a {0} x {0} matrix")]
    PShape(usize),
    #[error("p[{0}][{0}] must be 1")]
    PDiagonal(usize),
    #[error("p[{i}][{j}] * p[{j}][{i}] must be 1")]
    PPair { i: usize, j: usize },
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error("not a standard braiding: {0}")]
    NotStandard(String),
}

fn theta(cond: bool) -> i64 {
    if cond {
        1
    } else {
        0
    }
}

/// Full parameter set of a standard operator: dimension, parity vector,
/// deformation parameter `q` (symbol or exact rational) and the parameter
/// matrix `p` with unit diagonal and `p_ij p_ji = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamSpecJson", into = "ParamSpecJson")]
pub struct ParamSpec {
    dim: usize,
    parity: Vec<u8>,
    q: Scalar,
    p: Vec<Vec<Scalar>>,
}

impl ParamSpec {
    pub fn new(parity: Vec<u8>, q: Scalar, p: Vec<Vec<Scalar>>) -> Result<ParamSpec, SpecError> {
        let dim = parity.len();
        if dim == 0 {
            return Err(SpecError::ZeroDim);
        }
        if parity.iter().any(|&x| x > 1) {
            return Err(SpecError::ParityValue);
        }
        if q.is_zero() {
            return Err(SpecError::ZeroQ);
        }
        if p.len() != dim || p.iter().any(|row| row.len() != dim) {
            return Err(SpecError::PShape(dim));
        }
        for i in 0..dim {
            if !p[i][i].is_one() {
                return Err(SpecError::PDiagonal(i));
            }
            for j in i + 1..dim {
                if p[i][j].mul(&p[j][i]) != Scalar::one() {
                    return Err(SpecError::PPair { i, j });
                }
            }
        }
        Ok(ParamSpec { dim, parity, q, p })
    }

    /// Spec with the given parities and `p` filled from the strict upper
    /// triangle by `upper(i, j)`; the lower triangle holds the inverses.
    pub fn with_upper_p(
        parity: Vec<u8>,
        q: Scalar,
        upper: impl Fn(usize, usize) -> Scalar,
    ) -> Result<ParamSpec, SpecError> {
        let dim = parity.len();
        let mut p = vec![vec![Scalar::one(); dim]; dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let v = upper(i, j);
                p[j][i] = v.invert()?;
                p[i][j] = v;
            }
        }
        ParamSpec::new(parity, q, p)
    }

    /// Fully symbolic spec: `q` the symbol q, `p_ij` the parameter symbols.
    pub fn symbolic(parity: Vec<u8>) -> ParamSpec {
        ParamSpec::with_upper_p(parity, Scalar::q(), Scalar::p)
            .expect("symbolic parameters are always consistent")
    }

    /// Symbolic spec with `p_1j = 1` for all `j` and the remaining `p`
    /// symbolic; this is the parameter regime of the admissible family.
    pub fn symbolic_first_row_trivial(parity: Vec<u8>) -> ParamSpec {
        ParamSpec::with_upper_p(parity, Scalar::q(), |i, j| {
            if i == 0 {
                Scalar::one()
            } else {
                Scalar::p(i, j)
            }
        })
        .expect("symbolic parameters are always consistent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> &[u8] {
        &self.parity
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn p(&self, i: usize, j: usize) -> &Scalar {
        &self.p[i][j]
    }

    pub fn p_matrix(&self) -> &Vec<Vec<Scalar>> {
        &self.p
    }

    /// True when `q` is an exact rational with `q^4 = 1` (the operator still
    /// exists but the spectral theory behind the classification degenerates).
    pub fn is_degenerate_q(&self) -> bool {
        match self.q.as_rational() {
            Some(r) => Scalar::from_rat(r).pow(4).is_one(),
            None => false,
        }
    }
}

#[derive(Serialize, Deserialize, Clone)]
struct ParamSpecJson {
    dim: usize,
    parity: Vec<u8>,
    q: Scalar,
    p: Vec<Vec<Scalar>>,
}

impl TryFrom<ParamSpecJson> for ParamSpec {
    type Error = SpecError;
    fn try_from(j: ParamSpecJson) -> Result<Self, SpecError> {
        if j.parity.len() != j.dim {
            return Err(SpecError::ParityLength(j.parity.len(), j.dim));
        }
        ParamSpec::new(j.parity, j.q, j.p)
    }
}

impl From<ParamSpec> for ParamSpecJson {
    fn from(s: ParamSpec) -> ParamSpecJson {
        ParamSpecJson {
            dim: s.dim,
            parity: s.parity,
            q: s.q,
            p: s.p,
        }
    }
}

/// Ice-form operator: `M^{kl}_{ij} = a_ij d_i^l d_j^k + b_ij d_i^k d_j^l`.
/// The `a` array carries the exchange channel, `b` the stay channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IceMatrixJson", into = "IceMatrixJson")]
pub struct IceMatrix {
    pub dim: usize,
    pub a: Vec<Vec<Scalar>>,
    pub b: Vec<Vec<Scalar>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct IceMatrixJson {
    dim: usize,
    a: Vec<Vec<Scalar>>,
    b: Vec<Vec<Scalar>>,
}

impl TryFrom<IceMatrixJson> for IceMatrix {
    type Error = SpecError;
    fn try_from(j: IceMatrixJson) -> Result<Self, SpecError> {
        let d = j.dim;
        if d == 0 {
            return Err(SpecError::ZeroDim);
        }
        for arr in [&j.a, &j.b] {
            if arr.len() != d || arr.iter().any(|row| row.len() != d) {
                return Err(SpecError::PShape(d));
            }
        }
        Ok(IceMatrix {
            dim: d,
            a: j.a,
            b: j.b,
        })
    }
}

impl From<IceMatrix> for IceMatrixJson {
    fn from(m: IceMatrix) -> IceMatrixJson {
        IceMatrixJson {
            dim: m.dim,
            a: m.a,
            b: m.b,
        }
    }
}

impl IceMatrix {
    pub fn zero(dim: usize) -> IceMatrix {
        IceMatrix {
            dim,
            a: vec![vec![Scalar::zero(); dim]; dim],
            b: vec![vec![Scalar::zero(); dim]; dim],
        }
    }

    pub fn to_operator(&self) -> Operator2 {
        let d = self.dim;
        let mut m = Operator2::zero(d);
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    m.set(i, i, i, i, self.a[i][i].add(&self.b[i][i]));
                } else {
                    if !self.a[i][j].is_zero() {
                        m.set(j, i, i, j, self.a[i][j].clone());
                    }
                    if !self.b[i][j].is_zero() {
                        m.set(i, j, i, j, self.b[i][j].clone());
                    }
                }
            }
        }
        m
    }

    /// Split an ice operator back into the two-array form. The diagonal
    /// cannot be split, so it is stored entirely in `a` (with `b_ii = 0`).
    pub fn from_operator(m: &Operator2) -> Result<IceMatrix, RecognizeError> {
        if !check_ice(m) {
            return Err(RecognizeError::NotStandard(
                "operator violates the ice condition".into(),
            ));
        }
        let d = m.dim();
        let mut ice = IceMatrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    ice.a[i][i] = m.get(i, i, i, i).clone();
                } else {
                    ice.a[i][j] = m.get(j, i, i, j).clone();
                    ice.b[i][j] = m.get(i, j, i, j).clone();
                }
            }
        }
        Ok(ice)
    }

    /// Canonical form with the diagonal of `b` folded into `a`; recognition
    /// and witness checks compare these (the operator cannot distinguish the
    /// diagonal split).
    pub fn diag_folded(&self) -> IceMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.a[i][i] = self.a[i][i].add(&self.b[i][i]);
            out.b[i][i] = Scalar::zero();
        }
        out
    }

    /// Relabel basis vector `i` as `perm[i]` in both arrays.
    pub fn relabel_basis(&self, perm: &[usize]) -> IceMatrix {
        let d = self.dim;
        assert_eq!(perm.len(), d);
        let mut out = IceMatrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                out.a[perm[i]][perm[j]] = self.a[i][j].clone();
                out.b[perm[i]][perm[j]] = self.b[i][j].clone();
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> IceMatrix {
        IceMatrix {
            dim: self.dim,
            a: self
                .a
                .iter()
                .map(|row| row.iter().map(|v| v.mul(s)).collect())
                .collect(),
            b: self
                .b
                .iter()
                .map(|row| row.iter().map(|v| v.mul(s)).collect())
                .collect(),
        }
    }
}

/// The standard operator in ice form:
/// `a_ij = (-1)^{par_i d_ij} q^{(1-2 par_i) d_ij} p_ij q^{th(i<j) - th(i>j)}`,
/// `b_ij = (q - q^-1) th(i<j)`.
pub fn build_rhat(spec: &ParamSpec) -> IceMatrix {
    let d = spec.dim();
    let q = spec.q();
    let mut ice = IceMatrix::zero(d);
    let b_upper = q.sub(&q.pow(-1));
    for i in 0..d {
        for j in 0..d {
            ice.a[i][j] = if i == j {
                let sign = if spec.parity()[i] == 1 {
                    Scalar::from_int(-1)
                } else {
                    Scalar::one()
                };
                sign.mul(&q.pow(1 - 2 * spec.parity()[i] as i64))
            } else {
                spec.p(i, j).mul(&q.pow(theta(i < j) - theta(i > j)))
            };
            if i < j {
                ice.b[i][j] = b_upper.clone();
            }
        }
    }
    ice
}

/// The eigenvalue-1 rescaling `q^-1` times [`build_rhat`]:
/// `A_ij = (-1)^{par_i d_ij} q^{-2 par_i d_ij} p_ij q^{-2 th(i>j)}`,
/// `B_ij = 1 - q^{-2 th(i<j)}`.
pub fn build_sigma(spec: &ParamSpec) -> IceMatrix {
    let d = spec.dim();
    let q = spec.q();
    let mut ice = IceMatrix::zero(d);
    let b_upper = Scalar::one().sub(&q.pow(-2));
    for i in 0..d {
        for j in 0..d {
            ice.a[i][j] = if i == j {
                let sign = if spec.parity()[i] == 1 {
                    Scalar::from_int(-1)
                } else {
                    Scalar::one()
                };
                sign.mul(&q.pow(-2 * spec.parity()[i] as i64))
            } else {
                spec.p(i, j).mul(&q.pow(-2 * theta(i > j)))
            };
            if i < j {
                ice.b[i][j] = b_upper.clone();
            }
        }
    }
    ice
}

/// Absorb the second admissible rescaling `-q * rhat` into new parameters:
/// the returned spec has `q' = -q^-1`, flipped parities and
/// `p'_ij = -p_ij q'^{2(th(i>j) - th(i<j))}`, and satisfies
/// `-q * build_rhat(spec) = build_sigma(spec')` entrywise.
pub fn second_rescaling_reduce(spec: &ParamSpec) -> ParamSpec {
    let d = spec.dim();
    let qt = spec.q().pow(-1).neg();
    let parity: Vec<u8> = spec.parity().iter().map(|&x| 1 - x).collect();
    let mut p = vec![vec![Scalar::one(); d]; d];
    for i in 0..d {
        for j in 0..d {
            if i != j {
                p[i][j] = spec
                    .p(i, j)
                    .mul(&qt.pow(2 * (theta(i > j) - theta(i < j))))
                    .neg();
            }
        }
    }
    ParamSpec::new(parity, qt, p).expect("reduction preserves the parameter constraints")
}

/// Ice condition: a nonzero component `M^{kl}_{ij}` must have equal index
/// multisets `{i,j} = {k,l}`.
pub fn check_ice(m: &Operator2) -> bool {
    let d = m.dim();
    for k in 0..d {
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let same = (k == i && l == j) || (k == j && l == i);
                    if !same && !m.get(k, l, i, j).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Indecomposability of an ice matrix: the graph on the index set with an
/// edge `i -- j` whenever `b_ij` or `b_ji` is nonzero must be connected.
pub fn check_indecomposable(ice: &IceMatrix) -> bool {
    let d = ice.dim;
    if d == 0 {
        return false;
    }
    let mut seen = vec![false; d];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..d {
            if !seen[j] && (!ice.b[i][j].is_zero() || !ice.b[j][i].is_zero()) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Unitarity: `m` composed with itself is the identity.
pub fn check_unitary(m: &Operator2) -> bool {
    m.compose(m) == Operator2::identity(m.dim())
}

/// Witness that an ice matrix equals the standard operator of `spec` after
/// relabelling basis vector `t` (canonical order) as `permutation[t]` and
/// multiplying by `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardForm {
    pub spec: ParamSpec,
    pub permutation: Vec<usize>,
    pub scale: Scalar,
}

impl StandardForm {
    /// Apply the witness to the canonical matrix.
    pub fn reproduce(&self) -> IceMatrix {
        build_rhat(&self.spec)
            .scale(&self.scale)
            .relabel_basis(&self.permutation)
    }
}

/// Recover the parameters of a scaled, basis-permuted standard operator.
///
/// The basis order is recovered from the pattern of nonzero `b` entries
/// (which must form a strict total order), the scale from the products
/// `a_ij a_ji` (all equal to scale^2 for a standard operator), `q` and the
/// parities from the diagonal, and `p` from the off-diagonal `a`. Two gauge
/// ambiguities are fixed deterministically: the overall scale takes the
/// canonical positive monomial square root, and when both `q` and `-q^-1`
/// fit (they swap all parities) the candidate with the lexicographically
/// smaller parity vector wins.
pub fn recognize_standard(input: &IceMatrix) -> Result<StandardForm, RecognizeError> {
    let d = input.dim;
    let ice = input.diag_folded();
    let fail = |msg: &str| Err(RecognizeError::NotStandard(msg.into()));

    if d == 0 {
        return fail("empty index set");
    }

    // Basis order from the b pattern.
    let mut order: Vec<usize> = (0..d).collect();
    if d > 1 {
        let mut succ = vec![0usize; d];
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let bij = !ice.b[i][j].is_zero();
                let bji = !ice.b[j][i].is_zero();
                if bij && bji {
                    return fail("b pattern is not antisymmetric");
                }
                if !bij && !bji {
                    return fail("b pattern is not total");
                }
                if bij {
                    succ[i] += 1;
                }
            }
        }
        // A tournament is a strict total order iff the successor counts are
        // pairwise distinct; sort descending to get the canonical order.
        order.sort_by_key(|&i| std::cmp::Reverse(succ[i]));
        let mut distinct = succ.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != d {
            return fail("b pattern is not transitive");
        }
    }
    let abar = |s: usize, t: usize| -> &Scalar { &ice.a[order[s]][order[t]] };
    let bbar = |s: usize, t: usize| -> &Scalar { &ice.b[order[s]][order[t]] };

    // All strictly upper b entries must agree.
    let mut beta = Scalar::zero();
    for s in 0..d {
        for t in s + 1..d {
            if s == 0 && t == 1 {
                beta = bbar(s, t).clone();
            } else if bbar(s, t) != &beta {
                return fail("b entries are not constant above the diagonal");
            }
        }
    }
    for s in 0..d {
        for t in 0..d {
            if abar(s, t).is_zero() {
                return fail("a zero a entry makes the operator non-invertible");
            }
        }
    }

    // Overall scale from the exchange products.
    let scale = if d == 1 {
        Scalar::one()
    } else {
        let m2 = abar(0, 1).mul(abar(1, 0));
        for s in 0..d {
            for t in s + 1..d {
                if abar(s, t).mul(abar(t, s)) != m2 {
                    return fail("a_ij a_ji is not constant across pairs");
                }
            }
        }
        match m2.sqrt_monomial() {
            Some(root) => root,
            None => return fail("the squared scale is not a recognizable monomial square"),
        }
    };
    let scale_inv = scale.invert().expect("scale is nonzero");

    // Diagonal values determine q and the parities.
    let diag: Vec<Scalar> = (0..d).map(|s| abar(s, s).mul(&scale_inv)).collect();
    let mut values: Vec<Scalar> = Vec::new();
    for v in &diag {
        if !values.iter().any(|w| w == v) {
            values.push(v.clone());
        }
    }
    let (q, parity) = match values.len() {
        1 => {
            // All even beats all odd lexicographically.
            (values[0].clone(), vec![0u8; d])
        }
        2 => {
            if values[0].mul(&values[1]) != Scalar::from_int(-1) {
                return fail("the two diagonal values are not a q, -q^-1 pair");
            }
            let pick = |qv: &Scalar| -> Vec<u8> {
                diag.iter().map(|v| if v == qv { 0 } else { 1 }).collect()
            };
            let pa = pick(&values[0]);
            let pb = pick(&values[1]);
            if pa <= pb {
                (values[0].clone(), pa)
            } else {
                (values[1].clone(), pb)
            }
        }
        _ => return fail("more than two distinct diagonal values"),
    };
    if q.is_zero() {
        return fail("recovered q is zero");
    }

    if d > 1 {
        let expect_beta = scale.mul(&q.sub(&q.pow(-1)));
        if beta != expect_beta {
            return fail("b entries are inconsistent with the recovered q");
        }
    }

    // Parameters from the off-diagonal exchange entries.
    let mut p = vec![vec![Scalar::one(); d]; d];
    for s in 0..d {
        for t in 0..d {
            if s != t {
                p[s][t] = abar(s, t)
                    .mul(&scale_inv)
                    .mul(&q.pow(theta(s > t) - theta(s < t)));
            }
        }
    }
    let spec = ParamSpec::new(parity, q, p).map_err(|e| {
        RecognizeError::NotStandard(format!("parameter equations inconsistent: {e}"))
    })?;

    let witness = StandardForm {
        spec,
        permutation: order,
        scale,
    };
    if witness.reproduce() != ice {
        return fail("witness does not reproduce the input");
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::braid_residual;

    fn sc(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn rhat_entries_match_the_closed_form() {
        // d = 1: the single entry is q for an even generator.
        let even = ParamSpec::symbolic(vec![0]);
        let r = build_rhat(&even);
        assert_eq!(r.a[0][0], sc("q"));
        assert!(r.b[0][0].is_zero());

        let odd = ParamSpec::symbolic(vec![1]);
        assert_eq!(build_rhat(&odd).a[0][0], sc("-q^-1"));

        // d = 2, both even, symbolic p12.
        let spec = ParamSpec::symbolic(vec![0, 0]);
        let r = build_rhat(&spec);
        assert_eq!(r.a[0][1], sc("p12*q"));
        assert_eq!(r.a[1][0], sc("p12^-1*q^-1"));
        assert_eq!(r.b[0][1], sc("q-q^-1"));
        assert!(r.b[1][0].is_zero());
    }

    #[test]
    fn sigma_is_rhat_over_q() {
        for bits in 0..8u8 {
            let parity: Vec<u8> = (0..3).map(|k| (bits >> k) & 1).collect();
            let spec = ParamSpec::symbolic(parity);
            let sigma = build_sigma(&spec);
            let scaled = build_rhat(&spec).scale(&Scalar::q().pow(-1));
            assert_eq!(sigma, scaled);
            // Diagonal values: 1 for even, -q^-2 for odd.
            for i in 0..3 {
                let expect = if spec.parity()[i] == 0 {
                    Scalar::one()
                } else {
                    sc("-q^-2")
                };
                assert_eq!(sigma.a[i][i], expect);
                assert!(sigma.b[i][i].is_zero());
            }
            // B vanishes at or below the diagonal, 1 - q^-2 above.
            for i in 0..3 {
                for j in 0..3 {
                    if i < j {
                        assert_eq!(sigma.b[i][j], sc("1-q^-2"));
                    } else {
                        assert!(sigma.b[i][j].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn ice_condition_and_predicates() {
        let spec = ParamSpec::symbolic(vec![0, 1]);
        let op = build_rhat(&spec).to_operator();
        assert!(check_ice(&op));
        assert!(check_ice(&Operator2::flip(3)));
        let mut bad = Operator2::zero(2);
        bad.set(0, 0, 1, 1, Scalar::one());
        assert!(!check_ice(&bad));

        assert!(check_indecomposable(&build_rhat(&spec)));
        // At q = 1 every b entry vanishes and the matrix decomposes.
        let spec_q1 =
            ParamSpec::with_upper_p(vec![0, 0], Scalar::one(), |_, _| Scalar::one()).unwrap();
        assert!(!check_indecomposable(&build_rhat(&spec_q1)));
        // A single vertex is trivially connected.
        assert!(check_indecomposable(&build_rhat(&ParamSpec::symbolic(
            vec![0]
        ))));
    }

    #[test]
    fn unitarity_iff_q_squared_one() {
        let spec_q1 =
            ParamSpec::with_upper_p(vec![0, 0], Scalar::one(), |_, _| Scalar::one()).unwrap();
        assert!(check_unitary(&build_sigma(&spec_q1).to_operator()));
        let spec = ParamSpec::symbolic(vec![0, 0]);
        assert!(!check_unitary(&build_sigma(&spec).to_operator()));
        assert!(check_unitary(&Operator2::flip(2)));
    }

    #[test]
    fn second_rescaling_identity() {
        // d = 1, even: -q * (q) = -q^2 equals the odd diagonal -q'^-2.
        let spec = ParamSpec::symbolic(vec![0]);
        let reduced = second_rescaling_reduce(&spec);
        assert_eq!(reduced.parity(), &[1]);
        assert_eq!(reduced.q(), &sc("-q^-1"));
        let lhs = build_rhat(&spec).scale(&sc("-q"));
        assert_eq!(lhs, build_sigma(&reduced));

        // Entrywise identity for a mixed-parity d = 2 spec, symbolic p.
        let spec = ParamSpec::symbolic(vec![1, 0]);
        let reduced = second_rescaling_reduce(&spec);
        let lhs = build_rhat(&spec).scale(&spec.q().neg());
        assert_eq!(lhs, build_sigma(&reduced));

        // Applying the reduction twice restores the original parameters.
        assert_eq!(second_rescaling_reduce(&reduced), spec);
        // And the reduced spec generates the same operator.
        assert_eq!(build_rhat(&reduced), build_rhat(&spec));
    }

    #[test]
    fn standard_braidings_satisfy_braid() {
        for bits in 0..4u8 {
            let parity: Vec<u8> = (0..2).map(|k| (bits >> k) & 1).collect();
            let spec = ParamSpec::symbolic(parity);
            assert!(braid_residual(&build_rhat(&spec).to_operator()).is_zero());
            assert!(braid_residual(&build_sigma(&spec).to_operator()).is_zero());
        }
    }

    #[test]
    fn recognize_roundtrip_identity_permutation() {
        let spec = ParamSpec::symbolic(vec![0, 1, 0]);
        let r = build_rhat(&spec);
        let w = recognize_standard(&r).unwrap();
        assert_eq!(w.spec, spec);
        assert_eq!(w.permutation, vec![0, 1, 2]);
        assert_eq!(w.scale, Scalar::one());
        assert_eq!(w.reproduce(), r);
    }

    #[test]
    fn recognize_handles_permutation_and_scale() {
        let spec = ParamSpec::symbolic(vec![0, 0, 1]);
        let scaled = build_rhat(&spec).scale(&sc("3*q^2*p12"));
        let perm = vec![2usize, 0, 1];
        let input = scaled.relabel_basis(&perm);
        let w = recognize_standard(&input).unwrap();
        assert_eq!(w.reproduce(), input);
        assert_eq!(w.scale, sc("3*q^2*p12"));
        assert_eq!(w.permutation, perm);
        assert_eq!(w.spec, spec);
    }

    #[test]
    fn recognize_breaks_parity_gauge_lexicographically() {
        // An all-odd spec produces the same operator as an all-even spec
        // with q' = -q^-1; the recognizer must return the all-even one.
        let spec = ParamSpec::symbolic(vec![1, 1]);
        let w = recognize_standard(&build_rhat(&spec)).unwrap();
        assert_eq!(w.spec.parity(), &[0, 0]);
        assert_eq!(w.spec.q(), &sc("-q^-1"));
        assert_eq!(w.reproduce(), build_rhat(&spec));
    }

    #[test]
    fn recognize_rejects_bad_b_patterns() {
        // Both b_12 and b_21 nonzero: the order relation is not antisymmetric.
        let mut ice = build_rhat(&ParamSpec::symbolic(vec![0, 0]));
        ice.b[1][0] = sc("q-q^-1");
        let err = recognize_standard(&ice).unwrap_err();
        assert!(matches!(err, RecognizeError::NotStandard(ref m) if m.contains("antisymmetric")));

        // Missing b entirely: not total.
        let mut ice = build_rhat(&ParamSpec::symbolic(vec![0, 0]));
        ice.b[0][1] = Scalar::zero();
        assert!(recognize_standard(&ice).is_err());
    }

    #[test]
    fn paramspec_json_roundtrip() {
        let spec = ParamSpec::symbolic(vec![0, 1]);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ParamSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        // Validation runs on deserialization.
        let bad = r#"{"dim":2,"parity":[0,0],"q":"q","p":[["1","p12"],["p12","1"]]}"#;
        assert!(serde_json::from_str::<ParamSpec>(bad).is_err());
    }
}
