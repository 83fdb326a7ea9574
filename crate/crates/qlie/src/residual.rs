//! Residual tensors: dense exact tensors of arbitrary rank used to report
//! the outcome of identity checks component by component, not just as a
//! boolean, so failing components can be pinpointed by index.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A dense tensor of scalars with an explicit shape. Indices are 0-based in
/// the API; reports print them 1-based to match the symbol conventions
/// (`p12` couples basis vectors 1 and 2).
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    shape: Vec<usize>,
    entries: Vec<Scalar>,
}

impl Residual {
    pub fn new(shape: Vec<usize>, entries: Vec<Scalar>) -> Self {
        let size: usize = shape.iter().product();
        assert_eq!(size, entries.len(), "shape does not match entry count");
        Residual { shape, entries }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let size: usize = shape.iter().product();
        Residual {
            shape,
            entries: vec![Scalar::zero(); size],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.len());
        let mut f = 0;
        for (i, (&x, &n)) in idx.iter().zip(&self.shape).enumerate() {
            assert!(x < n, "index {x} out of bounds at axis {i}");
            f = f * n + x;
        }
        f
    }

    fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (i, &n) in self.shape.iter().enumerate().rev() {
            idx[i] = f % n;
            f /= n;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.entries[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let f = self.flat(idx);
        self.entries[f] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// All nonzero components with their (0-based) indices.
    pub fn nonzero_components(&self) -> Vec<(Vec<usize>, &Scalar)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(f, v)| (self.unflat(f), v))
            .collect()
    }

    pub fn report(&self) -> ResidualReport {
        ResidualReport {
            zero: self.is_zero(),
            nonzero_components: self
                .nonzero_components()
                .into_iter()
                .map(|(idx, v)| NonzeroComponent {
                    indices: idx.iter().map(|&x| x + 1).collect(),
                    value: v.to_string(),
                })
                .collect(),
        }
    }
}

/// One failing component of a residual, with 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonzeroComponent {
    pub indices: Vec<usize>,
    pub value: String,
}

/// Serializable outcome of an identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub zero: bool,
    pub nonzero_components: Vec<NonzeroComponent>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_and_report() {
        let mut r = Residual::zeros(vec![2, 3]);
        assert!(r.is_zero());
        r.set(&[1, 2], Scalar::q());
        assert!(!r.is_zero());
        let nz = r.nonzero_components();
        assert_eq!(nz.len(), 1);
        assert_eq!(nz[0].0, vec![1, 2]);
        let rep = r.report();
        assert!(!rep.zero);
        assert_eq!(rep.nonzero_components[0].indices, vec![2, 3]);
        assert_eq!(rep.nonzero_components[0].value, "q");

        let json = serde_json::to_string(&rep).unwrap();
        let back: ResidualReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }
}
