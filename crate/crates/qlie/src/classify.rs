//! Brute-force classification of brackets compatible with a standard
//! braiding.
//!
//! The compatibility systems that are linear in the bracket (braided
//! symmetry, E and F) are assembled into one exact rational matrix at a
//! generic sample point and the kernel is computed by fraction-free
//! elimination. The quadratic Jacobi identity then filters the kernel (for
//! the dimensions that actually occur this is a scalar condition, since
//! Jacobi is homogeneous in the bracket). Every cell is solved at two
//! independent sample points to guard against non-generic coincidences, and
//! the surviving generator is compared against the predicted one-parameter
//! family.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::linalg;
use crate::qla::{
    braided_symmetry_residual, build_theorem_c, e_residual, f_residual, jacobi_residual,
    AxiomResiduals, StructureConstants,
};
use crate::rmatrix::{build_sigma, ParamSpec};
use crate::scalar::{rat, Rat, Scalar};
use crate::tensor::TensorError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("genericity failure: sample points disagree ({0})")]
    GenericityFailure(String),
    #[error("sample point is not fully rational")]
    NotRational,
    #[error("sweep dimension {0} exceeds the supported maximum of 4")]
    DimensionTooLarge(usize),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// Why a parameter cell does or does not admit a nontrivial bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    OddFirstGenerator,
    P1jNotOne,
    /// At dimension 1 the antisymmetrized family is identically zero, so
    /// the kernel is trivial even though no parameter obstruction applies.
    DimensionTooSmall,
    Admissible,
}

/// Predicted kernel dimension for a parameter spec, with the expected
/// generator when the cell is admissible.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub expected_dim: usize,
    pub expected_c: Option<StructureConstants>,
    pub reason: Reason,
}

/// A nontrivial bracket exists exactly when the first generator is even and
/// its parameter row is trivial (`p_1j = 1` for all `j`); it is then the
/// one-parameter family of [`build_theorem_c`].
pub fn predict(spec: &ParamSpec) -> Result<Prediction, ClassifyError> {
    ensure_generic_q(spec)?;
    if spec.parity()[0] != 0 {
        return Ok(Prediction {
            expected_dim: 0,
            expected_c: None,
            reason: Reason::OddFirstGenerator,
        });
    }
    for j in 1..spec.dim() {
        if !spec.p(0, j).is_one() {
            return Ok(Prediction {
                expected_dim: 0,
                expected_c: None,
                reason: Reason::P1jNotOne,
            });
        }
    }
    if spec.dim() == 1 {
        return Ok(Prediction {
            expected_dim: 0,
            expected_c: None,
            reason: Reason::DimensionTooSmall,
        });
    }
    Ok(Prediction {
        expected_dim: 1,
        expected_c: Some(build_theorem_c(spec.dim(), &Scalar::one())),
        reason: Reason::Admissible,
    })
}

fn ensure_generic_q(spec: &ParamSpec) -> Result<(), ClassifyError> {
    if spec.is_degenerate_q() {
        return Err(ClassifyError::DegenerateParameters(
            "q^4 = 1 degenerates the spectral theory (q^4 != 1 is required)".into(),
        ));
    }
    Ok(())
}

/// Kernel of the linear compatibility systems at a rational sample point.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub basis: Vec<StructureConstants>,
    pub dim: usize,
    pub sample: ParamSpec,
    pub resample_consistent: bool,
}

/// Stack braided symmetry, E and F for every unit bracket into one exact
/// rational matrix (rows are residual components, columns the d^3 bracket
/// coefficients in lexicographic `(k, i, j)` order) and return its kernel.
pub fn solve_linear(spec: &ParamSpec) -> Result<SolutionSpace, ClassifyError> {
    ensure_generic_q(spec)?;
    let d = spec.dim();
    let sigma = build_sigma(spec).to_operator();
    let n = d * d * d;
    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for unit in 0..n {
        let mut c = StructureConstants::zero(d);
        let (k, rest) = (unit / (d * d), unit % (d * d));
        c.set(k, rest / d, rest % d, Scalar::one());
        let brs = braided_symmetry_residual(&sigma, &c, spec.q())?;
        let e = e_residual(&sigma, &c);
        let f = f_residual(&sigma, &c);
        let mut col = Vec::with_capacity(n + 2 * n * d * d);
        for tensor in [&brs, &e, &f] {
            let count: usize = tensor.shape().iter().product();
            for flat in 0..count {
                let idx = unflatten(tensor.shape(), flat);
                col.push(
                    tensor
                        .get(&idx)
                        .as_rational()
                        .ok_or(ClassifyError::NotRational)?,
                );
            }
        }
        columns.push(col);
    }
    let rows = columns[0].len();
    let matrix: Vec<Vec<Rat>> = (0..rows)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect();
    let kernel = linalg::null_space(&matrix)?;
    let basis = kernel
        .into_iter()
        .map(|v| normalize_generator(StructureConstants::from_flat(d, v.into_iter().map(Scalar::from_rat).collect())))
        .collect::<Vec<_>>();
    Ok(SolutionSpace {
        dim: basis.len(),
        basis,
        sample: spec.clone(),
        resample_consistent: true,
    })
}

fn unflatten(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (i, &nx) in shape.iter().enumerate().rev() {
        idx[i] = flat % nx;
        flat /= nx;
    }
    idx
}

/// Scale so the first nonzero coefficient in lexicographic `(k, i, j)` order
/// equals 1; gives a deterministic representative of each ray.
pub fn normalize_generator(c: StructureConstants) -> StructureConstants {
    match c.flat().iter().find(|v| !v.is_zero()) {
        Some(first) => {
            let inv = first.invert().expect("nonzero leading coefficient");
            c.scale(&inv)
        }
        None => c,
    }
}

/// Intersect a solution space with the Jacobi variety. Jacobi is homogeneous
/// quadratic in the bracket, so for the 0- and 1-dimensional spaces the
/// classification produces this keeps or drops whole rays; basis vectors
/// with nonzero Jacobi residual are dropped.
pub fn filter_jacobi(space: SolutionSpace) -> SolutionSpace {
    let sigma = build_sigma(&space.sample).to_operator();
    let basis: Vec<StructureConstants> = space
        .basis
        .into_iter()
        .filter(|c| jacobi_residual(&sigma, c).is_zero())
        .collect();
    SolutionSpace {
        dim: basis.len(),
        basis,
        sample: space.sample,
        resample_consistent: space.resample_consistent,
    }
}

/// Residuals of all four axioms for a bracket against the braiding of `spec`.
pub fn axioms_for(spec: &ParamSpec, c: &StructureConstants) -> Result<AxiomResiduals, ClassifyError> {
    let sigma = build_sigma(spec).to_operator();
    Ok(crate::qla::axiom_residuals(&sigma, c, spec.q())?)
}

/// Symbolic verification of the admissible family: substitute the canonical
/// bracket (coefficient symbol `c`) into all four axioms over the braiding
/// with symbolic `q`, trivial first parameter row and symbolic remaining
/// parameters. Every residual must normalize to literal zero.
pub fn family_axiom_residuals(parity: Vec<u8>) -> Result<AxiomResiduals, ClassifyError> {
    assert_eq!(parity[0], 0, "the family requires an even first generator");
    let spec = ParamSpec::symbolic_first_row_trivial(parity);
    let c = build_theorem_c(spec.dim(), &Scalar::var("c"));
    axioms_for(&spec, &c)
}

// --------------------------------------------------------------------------
// Sampling
// --------------------------------------------------------------------------

/// The fixed generic `q` samples: small rationals away from 0, 1 and the
/// fourth roots of unity.
pub const Q_SAMPLES: [(i64, i64); 3] = [(5, 7), (3, 11), (7, 13)];

const PRIMES: [i64; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Parameter regimes distinguished by the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PRegime {
    /// `p_1j = 1` for all `j`; remaining parameters generic.
    FirstRowTrivial,
    /// Every parameter generic (in particular some `p_1j != 1`).
    FirstRowGeneric,
}

impl PRegime {
    pub fn name(&self) -> &'static str {
        match self {
            PRegime::FirstRowTrivial => "all_p1j_one",
            PRegime::FirstRowGeneric => "some_p1j_not_one",
        }
    }
}

/// Deterministic generic rational sample of a parameter cell. `round` picks
/// one of the independent sample points (0 or 1), `seed` shifts the whole
/// assignment.
pub fn sample_spec(
    parity: &[u8],
    regime: PRegime,
    round: usize,
    seed: u64,
) -> ParamSpec {
    let d = parity.len();
    let q_idx = (seed as usize + round) % Q_SAMPLES.len();
    let q = rat(Q_SAMPLES[q_idx].0, Q_SAMPLES[q_idx].1);
    let offset = (seed as usize) % PRIMES.len();
    ParamSpec::with_upper_p(parity.to_vec(), Scalar::from_rat(q), |i, j| {
        if regime == PRegime::FirstRowTrivial && i == 0 {
            return Scalar::one();
        }
        // Position of (i, j) in the upper-triangle enumeration.
        let t = i * d - i * (i + 1) / 2 + (j - i - 1);
        let a = PRIMES[(2 * t + offset + 7 * round) % PRIMES.len()];
        let b = PRIMES[(2 * t + 1 + offset + 7 * round) % PRIMES.len()];
        Scalar::from_rat(rat(a, b))
    })
    .expect("sampled parameters are consistent")
}

// --------------------------------------------------------------------------
// Sweep
// --------------------------------------------------------------------------

/// One parameter cell of the sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub parity: Vec<u8>,
    pub regime: PRegime,
}

/// All cells up to the given dimension: every parity vector crossed with
/// both parameter regimes, in deterministic order.
pub fn cells_up_to(dmax: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    for d in 1..=dmax {
        for bits in 0..(1u32 << d) {
            let parity: Vec<u8> = (0..d).map(|k| ((bits >> k) & 1) as u8).collect();
            for regime in [PRegime::FirstRowTrivial, PRegime::FirstRowGeneric] {
                out.push(Cell {
                    parity: parity.clone(),
                    regime,
                });
            }
        }
    }
    out
}

/// One nonzero generator coefficient, 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub value: String,
}

/// Outcome of one sweep cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub dim: usize,
    pub parity: Vec<u8>,
    pub p_regime: String,
    pub predicted_dim: usize,
    pub computed_dim: usize,
    #[serde(rename = "match")]
    pub matched: bool,
    /// The surviving generator, lexicographically normalized.
    pub generator: Option<Vec<GeneratorEntry>>,
    /// Kernel elements satisfy `C^k_ji = -p_ji C^k_ij` and `C^k_jj = 0`.
    pub antisymmetry_ok: bool,
    /// Kernel elements satisfy the first-row ladder `C^j_1j = p_1j C^k_1k`
    /// for `1 < j < k` (1-based).
    pub ladder_ok: bool,
    /// Both sample points produced the same kernel dimension and each basis
    /// vector also annihilates the other sample's systems.
    pub resample_consistent: bool,
    pub q_samples: Vec<String>,
}

/// Solve one cell at two independent generic sample points and compare with
/// the prediction.
pub fn solve_cell(cell: &Cell, seed: u64) -> Result<CellReport, ClassifyError> {
    let d = cell.parity.len();
    let spec0 = sample_spec(&cell.parity, cell.regime, 0, seed);
    let spec1 = sample_spec(&cell.parity, cell.regime, 1, seed);
    let prediction = predict(&spec0)?;

    let space0 = filter_jacobi(solve_linear(&spec0)?);
    let space1 = filter_jacobi(solve_linear(&spec1)?);
    if space0.dim != space1.dim {
        return Err(ClassifyError::GenericityFailure(format!(
            "kernel dimension {} at q={} vs {} at q={}",
            space0.dim,
            spec0.q(),
            space1.dim,
            spec1.q()
        )));
    }
    // Each generator from the first sample must annihilate the systems of
    // the second sample as well.
    let mut cross_ok = true;
    for c in &space0.basis {
        let ax = axioms_for(&spec1, c)?;
        if !(ax.braided_symmetry.is_zero() && ax.e.is_zero() && ax.f.is_zero() && ax.jacobi.is_zero()) {
            cross_ok = false;
        }
    }

    let mut antisymmetry_ok = true;
    let mut ladder_ok = true;
    for c in &space0.basis {
        if !c.antisymmetry_violations(spec0.p_matrix()).is_empty() {
            antisymmetry_ok = false;
        }
        for j in 1..d {
            for k in j + 1..d {
                let lhs = c.get(j, 0, j).clone();
                let rhs = spec0.p(0, j).mul(c.get(k, 0, k));
                if lhs != rhs {
                    ladder_ok = false;
                }
            }
        }
    }

    let computed_dim = space0.dim;
    let mut matched = computed_dim == prediction.expected_dim;
    let generator = if computed_dim == 1 {
        let g = &space0.basis[0];
        if let Some(expected) = &prediction.expected_c {
            if g != expected {
                matched = false;
            }
        }
        Some(
            g.nonzero_entries()
                .into_iter()
                .map(|(k, i, j, v)| GeneratorEntry {
                    k: k + 1,
                    i: i + 1,
                    j: j + 1,
                    value: v.to_string(),
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(CellReport {
        dim: d,
        parity: cell.parity.clone(),
        p_regime: cell.regime.name().to_string(),
        predicted_dim: prediction.expected_dim,
        computed_dim,
        matched,
        generator,
        antisymmetry_ok,
        ladder_ok,
        resample_consistent: cross_ok,
        q_samples: vec![spec0.q().to_string(), spec1.q().to_string()],
    })
}

/// Full sweep report; cells appear in the deterministic order of
/// [`cells_up_to`] regardless of execution order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub dmax: usize,
    pub seed: u64,
    pub cells: Vec<CellReport>,
    pub mismatches: usize,
}

impl SweepReport {
    pub fn all_matched(&self) -> bool {
        self.mismatches == 0
            && self.cells.iter().all(|c| {
                c.antisymmetry_ok && c.ladder_ok && c.resample_consistent
            })
    }
}

fn collect_sweep(
    dmax: usize,
    seed: u64,
    results: Vec<Result<CellReport, ClassifyError>>,
) -> Result<SweepReport, ClassifyError> {
    let mut cells = Vec::with_capacity(results.len());
    for r in results {
        cells.push(r?);
    }
    let mismatches = cells.iter().filter(|c| !c.matched).count();
    Ok(SweepReport {
        dmax,
        seed,
        cells,
        mismatches,
    })
}

fn ensure_desk_scale(dmax: usize) -> Result<(), ClassifyError> {
    if dmax > 4 {
        return Err(ClassifyError::DimensionTooLarge(dmax));
    }
    Ok(())
}

/// Classify every cell up to `dmax` (at most 4), data-parallel over cells.
pub fn run_sweep(dmax: usize, seed: u64) -> Result<SweepReport, ClassifyError> {
    ensure_desk_scale(dmax)?;
    let results = exec::map(cells_up_to(dmax), |cell| solve_cell(&cell, seed));
    collect_sweep(dmax, seed, results)
}

/// Sequential twin of [`run_sweep`]; the per-cell work is identical.
pub fn run_sweep_seq(dmax: usize, seed: u64) -> Result<SweepReport, ClassifyError> {
    ensure_desk_scale(dmax)?;
    let results = exec::map_seq(cells_up_to(dmax), |cell| solve_cell(&cell, seed));
    collect_sweep(dmax, seed, results)
}

/// Rational evaluation of a symbolic structure-constant tensor, used to
/// push symbolic solutions through rational samples in tests.
pub fn evaluate_constants(
    c: &StructureConstants,
    point: &BTreeMap<crate::scalar::Symbol, Rat>,
) -> Result<StructureConstants, crate::scalar::ScalarError> {
    let d = c.dim();
    let mut out = StructureConstants::zero(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                out.set(k, i, j, Scalar::from_rat(c.get(k, i, j).evaluate(point)?));
            }
        }
    }
    Ok(out)
}
