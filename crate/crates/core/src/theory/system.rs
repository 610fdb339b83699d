use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::herm_dim;

/// The three concrete theories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Finite classical probability theory: states are subnormalized
    /// probability vectors, processes are substochastic matrices.
    Classical,
    /// Quantum theory on complex Hilbert spaces.
    Quantum,
    /// Quantum theory on real Hilbert spaces (rebits and friends).
    Real,
}

impl Backend {
    /// Dimension of the real span of states for Hilbert (or alphabet) dimension `d`.
    pub fn state_dim(self, d: usize) -> usize {
        match self {
            Backend::Classical => d,
            Backend::Quantum => herm_dim(d, false),
            Backend::Real => herm_dim(d, true),
        }
    }

    pub fn is_quantum_family(self) -> bool {
        !matches!(self, Backend::Classical)
    }

    pub fn is_real(self) -> bool {
        matches!(self, Backend::Real)
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Classical => "classical",
            Backend::Quantum => "quantum",
            Backend::Real => "real",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "classical" | "bit" | "cbit" => Ok(Backend::Classical),
            "quantum" | "complex" | "qubit" | "qudit" => Ok(Backend::Quantum),
            "real" | "rebit" => Ok(Backend::Real),
            other => Err(format!("unknown backend `{other}` (expected classical, quantum or real)")),
        }
    }
}

/// A physical system: a backend plus the ordered list of atomic local
/// dimensions it is composed of. The trivial system has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct System {
    backend: Backend,
    factors: Vec<usize>,
}

impl System {
    pub fn atomic(backend: Backend, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("local dimension must be positive".into()));
        }
        Ok(System { backend, factors: vec![dim] })
    }

    pub fn trivial(backend: Backend) -> Self {
        System {
            backend,
            factors: Vec::new(),
        }
    }

    pub fn composite(backend: Backend, factors: &[usize]) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::Dimension("local dimension must be positive".into()));
        }
        Ok(System {
            backend,
            factors: factors.to_vec(),
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Hilbert-space (or alphabet) dimension of the whole system.
    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn state_dim(&self) -> usize {
        self.backend.state_dim(self.dim())
    }

    pub fn effect_dim(&self) -> usize {
        self.state_dim()
    }

    pub fn tensor(&self, other: &System) -> Result<System> {
        if self.backend != other.backend {
            return Err(Error::MixedBackends(self.backend, other.backend));
        }
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Ok(System {
            backend: self.backend,
            factors,
        })
    }

    /// Splits after the first `k` factors.
    pub fn split_at(&self, k: usize) -> Result<(System, System)> {
        if k > self.factors.len() {
            return Err(Error::Dimension(format!("cannot split {self} after {k} factors")));
        }
        let (a, b) = self.factors.split_at(k);
        Ok((
            System {
                backend: self.backend,
                factors: a.to_vec(),
            },
            System {
                backend: self.backend,
                factors: b.to_vec(),
            },
        ))
    }

    /// The remaining system when `prefix` is the leading part of `self`.
    pub fn strip_prefix(&self, prefix: &System) -> Result<System> {
        if prefix.backend == self.backend && self.factors.starts_with(&prefix.factors) {
            return Ok(System {
                backend: self.backend,
                factors: self.factors[prefix.factors.len()..].to_vec(),
            });
        }
        Err(Error::SystemMismatch {
            expected: format!("{prefix} (x) ..."),
            found: self.to_string(),
        })
    }

    pub fn strip_suffix(&self, suffix: &System) -> Result<System> {
        if suffix.backend == self.backend && self.factors.ends_with(&suffix.factors) {
            let keep = self.factors.len() - suffix.factors.len();
            return Ok(System {
                backend: self.backend,
                factors: self.factors[..keep].to_vec(),
            });
        }
        Err(Error::SystemMismatch {
            expected: format!("... (x) {suffix}"),
            found: self.to_string(),
        })
    }

    pub(crate) fn expect_same(&self, other: &System) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SystemMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }

    pub(crate) fn expect_backend(&self, other: &System) -> Result<()> {
        if self.backend == other.backend {
            Ok(())
        } else {
            Err(Error::MixedBackends(self.backend, other.backend))
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "{}:I", self.backend);
        }
        let dims: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        write!(f, "{}:{}", self.backend, dims.join("x"))
    }
}
