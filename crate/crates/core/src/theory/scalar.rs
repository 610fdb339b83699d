use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// A probability. Cancellative exactly when strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Scalar(f64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0.0);
    pub const ONE: Scalar = Scalar(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Scalar(value))
        } else {
            Err(Error::InvalidScalar(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_cancellative(self) -> bool {
        self.0 > 0.0
    }

    /// Divides out a cancellative scalar from `s * x == s * y` style
    /// identities; `None` for zero.
    pub fn cancel(self, scaled: &[f64]) -> Option<Vec<f64>> {
        if !self.is_cancellative() {
            return None;
        }
        Some(scaled.iter().map(|x| x / self.0).collect())
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;

    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

/// A normalized list of probabilities, i.e. a test of type `I -> I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<Scalar>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbabilities("empty".into()));
        }
        let scalars = entries
            .iter()
            .map(|&p| Scalar::new(p))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidProbabilities(e.to_string()))?;
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidProbabilities(format!("entries sum to {total}")));
        }
        Ok(ProbVector(scalars))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProbabilities("empty".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
