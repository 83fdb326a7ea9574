//! Normal-form rewriting for the enveloping algebra of a braiding/bracket
//! pair.
//!
//! The defining relations `x_i x_j - sigma^{kl}_{ij} x_k x_l = C^k_ij x_k`
//! orient, for an ice braiding, into rules that rewrite ascending adjacent
//! pairs (and squares, where the relation allows solving for them). Normal
//! words are the weakly descending index sequences with no square at a
//! square-reducible generator. Rewriting strictly decreases the graded
//! reverse-lexicographic order, so every reduction terminates; confluence
//! of the degree-3 overlaps is checked explicitly and mirrors the
//! compatibility axioms of the pair.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qla::StructureConstants;
use crate::rmatrix::IceMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UeaError {
    #[error("relations do not orient under the descending order: {0}")]
    NotTriangular(String),
}

/// A word in the generators, stored by 0-based index.
pub type Word = Vec<u8>;

/// A finite linear combination of words with exact scalar coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Element {
    terms: BTreeMap<Word, Scalar>,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn from_word(w: Word) -> Element {
        Element::single(w, Scalar::one())
    }

    pub fn single(w: Word, coeff: Scalar) -> Element {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(w, coeff);
        }
        Element { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = e.get().add(&coeff);
                if merged.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = merged;
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        let mut out = Element::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.mul(s));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn to_json(&self) -> Vec<ElementTerm> {
        self.terms
            .iter()
            .map(|(w, c)| ElementTerm {
                word: w.iter().map(|&x| x as usize + 1).collect(),
                coeff: c.to_string(),
            })
            .collect()
    }
}

/// One term of a serialized element; generator indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementTerm {
    pub word: Vec<usize>,
    pub coeff: String,
}

/// Oriented rewriting rules for an enveloping algebra.
#[derive(Debug)]
pub struct RewriteSystem {
    dim: usize,
    /// Rule for the adjacent pair `(i, j)`, when that pair is reducible.
    rules: BTreeMap<(u8, u8), Element>,
    /// Generators whose square rewrites (behaving like odd generators).
    square_reducible: Vec<bool>,
    /// The defining data, kept for the consistency checks: only the
    /// ascending relations become rules, the rest must reduce to zero.
    sigma: IceMatrix,
    c: StructureConstants,
}

/// Orient the defining relations of the pair `(sigma, c)` into rewriting
/// rules. For each ascending pair `i < j` the relation solves for
/// `x_i x_j` when `1 - B_ij` is invertible; for each `i` the square
/// relation `(1 - A_ii - B_ii) x_i^2 = C^k_ii x_k` solves for the square
/// when the left coefficient is nonzero, and otherwise must be the trivial
/// identity `0 = 0`.
pub fn build_rules(sigma: &IceMatrix, c: &StructureConstants) -> Result<RewriteSystem, UeaError> {
    let d = sigma.dim;
    assert_eq!(c.dim(), d);
    assert!(d <= u8::MAX as usize, "generator indices are stored as u8");
    let mut rules = BTreeMap::new();
    let mut square_reducible = vec![false; d];

    for i in 0..d {
        for j in (i + 1)..d {
            let lead = Scalar::one().sub(&sigma.b[i][j]);
            if lead.is_zero() {
                return Err(UeaError::NotTriangular(format!(
                    "the stay coefficient at ({}, {}) is 1, the ascending pair cannot be solved",
                    i + 1,
                    j + 1
                )));
            }
            let inv = lead.invert().expect("lead is nonzero");
            let mut rhs = Element::single(vec![j as u8, i as u8], sigma.a[i][j].mul(&inv));
            for k in 0..d {
                let cv = c.get(k, i, j);
                if !cv.is_zero() {
                    rhs.add_term(vec![k as u8], cv.mul(&inv));
                }
            }
            rules.insert((i as u8, j as u8), rhs);
        }
    }

    for i in 0..d {
        let lead = Scalar::one().sub(&sigma.a[i][i]).sub(&sigma.b[i][i]);
        let c_row_zero = (0..d).all(|k| c.get(k, i, i).is_zero());
        if lead.is_zero() {
            if !c_row_zero {
                return Err(UeaError::NotTriangular(format!(
                    "the square of generator {} neither rewrites nor drops out",
                    i + 1
                )));
            }
            continue;
        }
        let inv = lead.invert().expect("lead is nonzero");
        let mut rhs = Element::zero();
        for k in 0..d {
            let cv = c.get(k, i, i);
            if !cv.is_zero() {
                rhs.add_term(vec![k as u8], cv.mul(&inv));
            }
        }
        rules.insert((i as u8, i as u8), rhs);
        square_reducible[i] = true;
    }

    Ok(RewriteSystem {
        dim: d,
        rules,
        square_reducible,
        sigma: sigma.clone(),
        c: c.clone(),
    })
}

impl RewriteSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rule(&self, i: u8, j: u8) -> Option<&Element> {
        self.rules.get(&(i, j))
    }

    /// Whether the square of generator `i` rewrites (odd behaviour).
    pub fn square_reducible(&self, i: usize) -> bool {
        self.square_reducible[i]
    }

    fn reducible_at(&self, w: &[u8], pos: usize) -> bool {
        pos + 1 < w.len() && self.rules.contains_key(&(w[pos], w[pos + 1]))
    }

    fn first_reducible(&self, w: &[u8]) -> Option<usize> {
        (0..w.len().saturating_sub(1)).find(|&p| self.reducible_at(w, p))
    }

    pub fn is_normal_word(&self, w: &[u8]) -> bool {
        self.first_reducible(w).is_none()
    }

    /// Replace the adjacent pair at `pos` using its rule. Returns `None`
    /// when the pair is not reducible.
    pub fn rewrite_at(&self, w: &[u8], pos: usize) -> Option<Element> {
        if !self.reducible_at(w, pos) {
            return None;
        }
        let rule = &self.rules[&(w[pos], w[pos + 1])];
        let mut out = Element::zero();
        for (body, coeff) in rule.terms() {
            let mut nw = Vec::with_capacity(w.len() - 2 + body.len());
            nw.extend_from_slice(&w[..pos]);
            nw.extend_from_slice(body);
            nw.extend_from_slice(&w[pos + 2..]);
            out.add_term(nw, coeff.clone());
        }
        Some(out)
    }

    /// Fixed point of leftmost rule application, with the number of rule
    /// applications performed. Terminates: every application strictly
    /// decreases the graded reverse-lexicographic order.
    pub fn normal_form_counted(&self, e: &Element) -> (Element, usize) {
        let mut todo = e.terms.clone();
        let mut done = Element::zero();
        let mut steps = 0usize;
        while let Some((w, coeff)) = todo.pop_first() {
            if coeff.is_zero() {
                continue;
            }
            match self.first_reducible(&w) {
                None => done.add_term(w, coeff),
                Some(pos) => {
                    steps += 1;
                    let replaced = self.rewrite_at(&w, pos).expect("position is reducible");
                    for (nw, nc) in replaced.terms() {
                        let merged = nc.mul(&coeff);
                        if merged.is_zero() {
                            continue;
                        }
                        match todo.entry(nw.clone()) {
                            std::collections::btree_map::Entry::Vacant(v) => {
                                v.insert(merged);
                            }
                            std::collections::btree_map::Entry::Occupied(mut o) => {
                                let sum = o.get().add(&merged);
                                if sum.is_zero() {
                                    o.remove();
                                } else {
                                    *o.get_mut() = sum;
                                }
                            }
                        }
                    }
                }
            }
        }
        (done, steps)
    }

    pub fn normal_form(&self, e: &Element) -> Element {
        self.normal_form_counted(e).0
    }

    /// Number of normal words of the given degree: weakly descending
    /// sequences, strictly descending across square-reducible generators.
    pub fn dim_degree(&self, degree: usize) -> usize {
        if degree == 0 {
            return 1;
        }
        // Walk descending sequences; `prev` is the last generator placed.
        fn count(rs: &RewriteSystem, prev: usize, left: usize) -> usize {
            if left == 0 {
                return 1;
            }
            let mut total = 0;
            for next in 0..=prev {
                if next == prev && rs.square_reducible[next] {
                    continue;
                }
                total += count(rs, next, left - 1);
            }
            total
        }
        (0..self.dim).map(|first| count(self, first, degree - 1)).sum()
    }

    /// The defining relation of the ordered pair `(i, j)` as an element:
    /// `x_i x_j - sigma^{kl}_{ij} x_k x_l - C^k_ij x_k`. Ascending pairs
    /// produced the rules; the others must reduce to zero for the rules to
    /// present the same algebra.
    pub fn defining_relation(&self, i: usize, j: usize) -> Element {
        let mut e = Element::from_word(vec![i as u8, j as u8]);
        if i == j {
            e.add_term(
                vec![i as u8, i as u8],
                self.sigma.a[i][i].add(&self.sigma.b[i][i]).neg(),
            );
        } else {
            e.add_term(vec![j as u8, i as u8], self.sigma.a[i][j].neg());
            e.add_term(vec![i as u8, j as u8], self.sigma.b[i][j].neg());
        }
        for k in 0..self.dim {
            let cv = self.c.get(k, i, j);
            if !cv.is_zero() {
                e.add_term(vec![k as u8], cv.neg());
            }
        }
        e
    }

    /// Degree-3 overlap resolution plus relation consistency.
    ///
    /// Every degree-3 word is rewritten first at position 1 and first at
    /// position 2 and both branches are reduced to normal form; any
    /// disagreement is reported. In addition every defining relation (also
    /// the descending and square ones, which are not rules) must reduce to
    /// zero; parity regimes without square rules have no degree-3 overlaps
    /// at all, and an inconsistent bracket then surfaces exactly in these
    /// relation residuals.
    pub fn diamond_report(&self) -> DiamondReport {
        let d = self.dim as u8;
        let mut disagreements = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let w = vec![i, j, k];
                    let left = match self.rewrite_at(&w, 0) {
                        Some(e) => self.normal_form(&e),
                        None => self.normal_form(&Element::from_word(w.clone())),
                    };
                    let right = match self.rewrite_at(&w, 1) {
                        Some(e) => self.normal_form(&e),
                        None => self.normal_form(&Element::from_word(w.clone())),
                    };
                    if left != right {
                        disagreements.push(DiamondDisagreement {
                            word: w.iter().map(|&x| x as usize + 1).collect(),
                            left: left.to_json(),
                            right: right.to_json(),
                        });
                    }
                }
            }
        }
        let mut relation_defects = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let residual = self.normal_form(&self.defining_relation(i, j));
                if !residual.is_zero() {
                    relation_defects.push(RelationDefect {
                        pair: (i + 1, j + 1),
                        residual: residual.to_json(),
                    });
                }
            }
        }
        DiamondReport {
            disagreements,
            relation_defects,
        }
    }
}

/// A degree-3 word whose two reduction orders disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondDisagreement {
    pub word: Vec<usize>,
    pub left: Vec<ElementTerm>,
    pub right: Vec<ElementTerm>,
}

/// A defining relation that does not reduce to zero under the rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDefect {
    pub pair: (usize, usize),
    pub residual: Vec<ElementTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondReport {
    pub disagreements: Vec<DiamondDisagreement>,
    pub relation_defects: Vec<RelationDefect>,
}

impl DiamondReport {
    pub fn confluent(&self) -> bool {
        self.disagreements.is_empty() && self.relation_defects.is_empty()
    }
}
