//! Two-variable SMO for the soft-margin dual
//!
//! ```text
//! max_α  Σ α_i - ½ Σ_ij α_i α_j y_i y_j K(x_i, x_j)
//! s.t.   0 <= α_i <= C,  Σ α_i y_i = 0
//! ```
//!
//! Internally the equivalent minimisation `½ αᵀQα - eᵀα` is solved with the
//! maximal violating pair as working set. No shrinking.

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label};
use crate::scalar::Scalar;

use super::cache::QMatrix;
use super::kernel::KernelSpec;
use super::model::SvmModel;

/// Substitute for a non-positive curvature along the update direction
/// (possible with the sigmoid kernel).
const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig<F = f64> {
    /// Box constraint `C` on each dual variable.
    pub c: F,
    pub kernel: KernelSpec<F>,
    /// Stop once the maximal KKT violation drops below this.
    pub kkt_tol: F,
    pub max_iter: u64,
    pub cache_bytes: usize,
}

impl<F: Scalar> TrainConfig<F> {
    pub fn new(c: F, kernel: KernelSpec<F>) -> Self {
        TrainConfig {
            c,
            kernel,
            kkt_tol: F::of(1e-3),
            max_iter: 10_000_000,
            cache_bytes: 100 << 20,
        }
    }

    pub fn with_tolerance(mut self, kkt_tol: F) -> Self {
        self.kkt_tol = kkt_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > F::zero() && self.c.is_finite()) {
            return Err(Error::invalid(format!("C must be positive, got {}", self.c)));
        }
        if !(self.kkt_tol > F::zero()) {
            return Err(Error::invalid("KKT tolerance must be positive"));
        }
        self.kernel.validate()
    }
}

/// Diagnostics of one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveInfo<F = f64> {
    pub iterations: u64,
    /// Maximal violation `m(α) - M(α)` at exit.
    pub gap: F,
    /// `Σα - ½αᵀQα` at the returned point.
    pub dual_objective: F,
    /// Dual variables for every training pattern, in input order.
    pub alpha: Vec<F>,
    pub bias: F,
    pub n_bounded: usize,
}

pub fn train<F: Scalar>(data: &FeatureMatrix<F>, cfg: &TrainConfig<F>) -> Result<SvmModel<F>> {
    train_with_info(data, cfg).map(|(model, _)| model)
}

pub fn train_with_info<F: Scalar>(
    data: &FeatureMatrix<F>,
    cfg: &TrainConfig<F>,
) -> Result<(SvmModel<F>, SolveInfo<F>)> {
    cfg.validate()?;
    let labels = data.require_labels()?;
    match (
        labels.contains(&Label::Positive),
        labels.contains(&Label::Negative),
    ) {
        (true, true) => {}
        (true, false) => return Err(Error::SingleClass(1)),
        (false, true) => return Err(Error::SingleClass(-1)),
        (false, false) => return Err(Error::invalid("no training patterns")),
    }
    let info = solve(data, labels, cfg)?;
    let model = SvmModel::from_solution(data, labels, &info.alpha, info.bias, cfg.kernel);
    Ok((model, info))
}

fn solve<F: Scalar>(data: &FeatureMatrix<F>, labels: &[Label], cfg: &TrainConfig<F>) -> Result<SolveInfo<F>> {
    let n = labels.len();
    let c = cfg.c;
    let y: Vec<F> = labels.iter().map(|l| l.sign()).collect();
    let mut q = QMatrix::new(data, &y, cfg.kernel, cfg.cache_bytes);
    let diag = q.diagonal();
    let mut alpha = vec![F::zero(); n];
    // gradient of ½αᵀQα - eᵀα at α = 0
    let mut grad = vec![-F::one(); n];
    let tau = F::of(TAU);
    let mut iterations = 0u64;

    let gap = loop {
        let (i, j, gap) = select_pair(&alpha, &grad, &y, c);
        let (Some(i), Some(j)) = (i, j) else {
            break F::zero();
        };
        if gap < cfg.kkt_tol {
            break gap;
        }
        if iterations >= cfg.max_iter {
            return Err(Error::IterationLimit {
                iterations,
                gap: gap.as_f64(),
                objective: dual_objective(&alpha, &grad).as_f64(),
            });
        }
        iterations += 1;

        let qi = q.row(i);
        let qj = q.row(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let mut curv = diag[i] + diag[j] + F::of(2.0) * qi[j];
            if curv <= F::zero() {
                curv = tau;
            }
            let delta = (-grad[i] - grad[j]) / curv;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > F::zero() {
                if aj < F::zero() {
                    aj = F::zero();
                    ai = diff;
                }
            } else if ai < F::zero() {
                ai = F::zero();
                aj = -diff;
            }
            if diff > F::zero() {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut curv = diag[i] + diag[j] - F::of(2.0) * qi[j];
            if curv <= F::zero() {
                curv = tau;
            }
            let delta = (grad[i] - grad[j]) / curv;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < F::zero() {
                aj = F::zero();
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < F::zero() {
                ai = F::zero();
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += qi[k] * di + qj[k] * dj;
        }
    };

    let bias = compute_bias(&alpha, &grad, &y, c);
    let n_bounded = alpha.iter().filter(|&&a| a >= c).count();
    Ok(SolveInfo {
        iterations,
        gap,
        dual_objective: dual_objective(&alpha, &grad),
        alpha,
        bias,
        n_bounded,
    })
}

/// Maximal violating pair: `i` maximises `-y_t G_t` over the "up" set and
/// `j` minimises it over the "low" set. Ties keep the lowest index.
fn select_pair<F: Scalar>(alpha: &[F], grad: &[F], y: &[F], c: F) -> (Option<usize>, Option<usize>, F) {
    let mut up: Option<(usize, F)> = None;
    let mut low: Option<(usize, F)> = None;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        let positive = y[t] > F::zero();
        let in_up = if positive { alpha[t] < c } else { alpha[t] > F::zero() };
        let in_low = if positive { alpha[t] > F::zero() } else { alpha[t] < c };
        if in_up && up.is_none_or(|(_, best)| v > best) {
            up = Some((t, v));
        }
        if in_low && low.is_none_or(|(_, best)| v < best) {
            low = Some((t, v));
        }
    }
    match (up, low) {
        (Some((i, m)), Some((j, lo))) => (Some(i), Some(j), m - lo),
        _ => (None, None, F::zero()),
    }
}

/// Mean of `y_t - g_t` over free variables, or the midpoint of the interval
/// of biases consistent with the KKT conditions when none are free.
fn compute_bias<F: Scalar>(alpha: &[F], grad: &[F], y: &[F], c: F) -> F {
    let mut free_sum = F::zero();
    let mut free_count = 0usize;
    let mut lower = F::neg_infinity();
    let mut upper = F::infinity();
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        let positive = y[t] > F::zero();
        if alpha[t] > F::zero() && alpha[t] < c {
            free_sum += v;
            free_count += 1;
        } else if (alpha[t] <= F::zero()) == positive {
            // (+1, α = 0) or (-1, α = C)
            lower = lower.max(v);
        } else {
            upper = upper.min(v);
        }
    }
    if free_count > 0 {
        free_sum / F::of_usize(free_count)
    } else if lower.is_finite() && upper.is_finite() {
        (lower + upper) / F::of(2.0)
    } else if lower.is_finite() {
        lower
    } else {
        upper
    }
}

fn dual_objective<F: Scalar>(alpha: &[F], grad: &[F]) -> F {
    let half = F::of(0.5);
    -alpha
        .iter()
        .zip(grad)
        .map(|(&a, &g)| a * (g - F::one()))
        .sum::<F>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(rows: &[&[f64]], labels: &[i8]) -> FeatureMatrix {
        FeatureMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
            .with_labels(labels.iter().map(|&l| Label::from_value(l).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn two_symmetric_points() {
        let data = labelled(&[&[-1.0], &[1.0]], &[-1, 1]);
        let cfg = TrainConfig::new(100.0, KernelSpec::linear());
        let (model, info) = train_with_info(&data, &cfg).unwrap();
        assert!((info.alpha[0] - 0.5).abs() < 1e-12 && (info.alpha[1] - 0.5).abs() < 1e-12);
        assert!(model.bias.abs() < 1e-12);
        for x in [-2.0, -0.3, 0.7, 5.0] {
            assert!((model.decision_value(&[x]).unwrap() - x).abs() < 1e-12);
        }
        assert!((info.dual_objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn contradictory_duplicate_hits_bound() {
        let data = labelled(&[&[1.0, 2.0], &[1.0, 2.0], &[-3.0, 0.0]], &[1, -1, -1]);
        let cfg = TrainConfig::new(1.0, KernelSpec::rbf(0.5));
        let (_, info) = train_with_info(&data, &cfg).unwrap();
        assert!(info.alpha.contains(&1.0), "{:?}", info.alpha);
        assert!(info.n_bounded >= 1);
    }

    #[test]
    fn rejects_single_class_and_unlabelled() {
        let data = labelled(&[&[1.0], &[2.0]], &[1, 1]);
        let cfg = TrainConfig::new(1.0, KernelSpec::linear());
        assert!(matches!(train(&data, &cfg), Err(Error::SingleClass(1))));
        let unlabelled = FeatureMatrix::new(vec![1.0, 2.0], 1).unwrap();
        assert!(train(&unlabelled, &cfg).is_err());
        let bad = TrainConfig::new(0.0, KernelSpec::linear());
        assert!(train(&labelled(&[&[1.0], &[2.0]], &[1, -1]), &bad).is_err());
    }

    #[test]
    fn iteration_limit_reports_diagnostics() {
        let data = labelled(&[&[0.0], &[1.0], &[2.0], &[3.0]], &[1, -1, 1, -1]);
        let mut cfg = TrainConfig::new(10.0, KernelSpec::rbf(1.0)).with_tolerance(1e-12);
        cfg.max_iter = 1;
        match train(&data, &cfg) {
            Err(Error::IterationLimit { iterations: 1, gap, .. }) => assert!(gap > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tiny_cache_matches_full_cache() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()])
            .collect();
        let labels = (0..30).map(|i| if i % 3 == 0 { Label::Positive } else { Label::Negative }).collect();
        let data = FeatureMatrix::from_rows(&rows).unwrap().with_labels(labels).unwrap();
        let mut cfg = TrainConfig::new(5.0, KernelSpec::rbf(2.0));
        let (a, _) = train_with_info(&data, &cfg).unwrap();
        cfg.cache_bytes = 0;
        let (b, _) = train_with_info(&data, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn f32_training_works() {
        let rows: Vec<Vec<f32>> = vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]];
        let data = FeatureMatrix::from_rows(&rows)
            .unwrap()
            .with_labels(vec![Label::Negative, Label::Negative, Label::Positive, Label::Positive])
            .unwrap();
        let model = train(&data, &TrainConfig::new(10.0f32, KernelSpec::linear())).unwrap();
        assert_eq!(model.predict(&[0.5]).unwrap(), Label::Positive);
        assert_eq!(model.predict(&[-0.5]).unwrap(), Label::Negative);
    }
}
