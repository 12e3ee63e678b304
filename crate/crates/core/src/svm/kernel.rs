use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Polynomial,
    Rbf,
    Sigmoid,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Linear,
        KernelKind::Polynomial,
        KernelKind::Rbf,
        KernelKind::Sigmoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Rbf => "rbf",
            KernelKind::Sigmoid => "sigmoid",
        }
    }

    pub fn uses_gamma(self) -> bool {
        self != KernelKind::Linear
    }

    pub fn uses_coef0(self) -> bool {
        matches!(self, KernelKind::Polynomial | KernelKind::Sigmoid)
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown kernel {s:?}")))
    }
}

/// Kernel function and its parameters (`gamma`, `coef0`, `degree`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec<F = f64> {
    pub kind: KernelKind,
    pub gamma: F,
    pub coef0: F,
    pub degree: u32,
}

impl<F: Scalar> KernelSpec<F> {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            gamma: F::one(),
            coef0: F::zero(),
            degree: 1,
        }
    }

    pub fn rbf(gamma: F) -> Self {
        KernelSpec {
            kind: KernelKind::Rbf,
            gamma,
            coef0: F::zero(),
            degree: 1,
        }
    }

    pub fn polynomial(gamma: F, coef0: F, degree: u32) -> Self {
        KernelSpec {
            kind: KernelKind::Polynomial,
            gamma,
            coef0,
            degree,
        }
    }

    pub fn sigmoid(gamma: F, coef0: F) -> Self {
        KernelSpec {
            kind: KernelKind::Sigmoid,
            gamma,
            coef0,
            degree: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_gamma() && !(self.gamma > F::zero() && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("{} kernel needs gamma > 0", self.kind)));
        }
        if !self.coef0.is_finite() {
            return Err(Error::invalid("coef0 must be finite"));
        }
        if self.degree == 0 {
            return Err(Error::invalid("degree must be at least 1"));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[F], z: &[F]) -> Result<F> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(self.eval_unchecked(x, z))
    }

    /// Kernel value; `x` and `z` must have equal length.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[F], z: &[F]) -> F {
        match self.kind {
            KernelKind::Linear => dot(x, z),
            KernelKind::Polynomial => (self.gamma * dot(x, z) + self.coef0).powi(self.degree as i32),
            KernelKind::Rbf => {
                let d2: F = x.iter().zip(z).map(|(&a, &b)| (a - b) * (a - b)).sum();
                (-self.gamma * d2).exp()
            }
            KernelKind::Sigmoid => (self.gamma * dot(x, z) + self.coef0).tanh(),
        }
    }
}

#[inline]
pub(crate) fn dot<F: Scalar>(x: &[F], z: &[F]) -> F {
    x.iter().zip(z).map(|(&a, &b)| a * b).sum()
}
