use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label};
use crate::scalar::Scalar;

use super::kernel::KernelSpec;

/// Trained binary classifier `f(x) = Σ_j coef_j K(sv_j, x) + bias`.
///
/// Support vectors of the +1 class come first; `coef_j = α_j y_j`, so the
/// sign of each coefficient is the label of its support vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel<F = f64> {
    pub kernel: KernelSpec<F>,
    pub bias: F,
    support_vectors: Vec<F>,
    sv_coef: Vec<F>,
    n_features: usize,
    n_positive: usize,
}

impl<F: Scalar> SvmModel<F> {
    /// Build a model from explicit support vectors and signed coefficients.
    pub fn new(kernel: KernelSpec<F>, support_vectors: &[Vec<F>], sv_coef: &[F], bias: F) -> Result<Self> {
        kernel.validate()?;
        if support_vectors.is_empty() {
            return Err(Error::invalid("a model needs at least one support vector"));
        }
        if support_vectors.len() != sv_coef.len() {
            return Err(Error::DimensionMismatch {
                expected: support_vectors.len(),
                found: sv_coef.len(),
            });
        }
        let n_features = support_vectors[0].len();
        if let Some(bad) = support_vectors.iter().find(|sv| sv.len() != n_features) {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                found: bad.len(),
            });
        }
        if sv_coef.iter().any(|c| c.is_zero() || !c.is_finite()) || !bias.is_finite() {
            return Err(Error::invalid("coefficients must be finite and non-zero"));
        }
        let order: Vec<usize> = (0..sv_coef.len())
            .filter(|&i| sv_coef[i] > F::zero())
            .chain((0..sv_coef.len()).filter(|&i| sv_coef[i] < F::zero()))
            .collect();
        Ok(SvmModel {
            kernel,
            bias,
            support_vectors: order.iter().flat_map(|&i| support_vectors[i].iter().copied()).collect(),
            sv_coef: order.iter().map(|&i| sv_coef[i]).collect(),
            n_features,
            n_positive: sv_coef.iter().filter(|&&c| c > F::zero()).count(),
        })
    }

    pub(crate) fn from_solution(
        data: &FeatureMatrix<F>,
        labels: &[Label],
        alpha: &[F],
        bias: F,
        kernel: KernelSpec<F>,
    ) -> Self {
        let mut support_vectors = Vec::new();
        let mut sv_coef = Vec::new();
        let mut n_positive = 0;
        for class in [Label::Positive, Label::Negative] {
            for (i, (&a, &l)) in alpha.iter().zip(labels).enumerate() {
                if l == class && a > F::zero() {
                    support_vectors.extend_from_slice(data.pattern(i));
                    sv_coef.push(a * l.sign());
                    if class == Label::Positive {
                        n_positive += 1;
                    }
                }
            }
        }
        SvmModel {
            kernel,
            bias,
            support_vectors,
            sv_coef,
            n_features: data.n_features(),
            n_positive,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_support(&self) -> usize {
        self.sv_coef.len()
    }

    /// Support vector counts of the +1 and -1 classes.
    pub fn n_support_per_class(&self) -> (usize, usize) {
        (self.n_positive, self.sv_coef.len() - self.n_positive)
    }

    pub fn support_vector(&self, j: usize) -> &[F] {
        &self.support_vectors[j * self.n_features..(j + 1) * self.n_features]
    }

    pub fn sv_coef(&self) -> &[F] {
        &self.sv_coef
    }

    /// Pad support vectors with zero features up to `n` dimensions.
    ///
    /// Models read back from text only know the largest non-zero index.
    pub fn widen(&self, n: usize) -> Result<Self> {
        if n < self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: n,
            });
        }
        let mut support_vectors = Vec::with_capacity(self.n_support() * n);
        for j in 0..self.n_support() {
            support_vectors.extend_from_slice(self.support_vector(j));
            support_vectors.extend(std::iter::repeat_n(F::zero(), n - self.n_features));
        }
        Ok(SvmModel {
            support_vectors,
            n_features: n,
            ..self.clone()
        })
    }

    pub fn decision_value(&self, x: &[F]) -> Result<F> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let sum: F = self
            .sv_coef
            .iter()
            .enumerate()
            .map(|(j, &c)| c * self.kernel.eval_unchecked(self.support_vector(j), x))
            .sum();
        Ok(sum + self.bias)
    }

    /// `+1` when the decision value is `>= 0`, else `-1`.
    pub fn predict(&self, x: &[F]) -> Result<Label> {
        self.decision_value(x).map(label_of)
    }

    pub fn predict_all(&self, data: &FeatureMatrix<F>) -> Result<Vec<Label>> {
        data.patterns().map(|x| self.predict(x)).collect()
    }
}

/// Sign rule with ties going to +1.
pub fn label_of<F: Scalar>(decision: F) -> Label {
    if decision >= F::zero() {
        Label::Positive
    } else {
        Label::Negative
    }
}
