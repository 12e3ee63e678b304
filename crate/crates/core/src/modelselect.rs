//! k-fold cross-validation and exhaustive `(C, gamma)` grid search.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label};
use crate::scalar::{fmt_real, Scalar};
use crate::svm::{train, TrainConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub k: usize,
    pub shuffle_seed: u64,
    pub stratified: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 5,
            shuffle_seed: 0,
            stratified: true,
        }
    }
}

/// Partition `0..n` into `k` folds of near-equal size.
///
/// Indices are shuffled with a ChaCha8 stream seeded by `shuffle_seed` and
/// dealt round-robin. When stratified, each class is dealt in turn and the
/// dealing position carries over between classes, so both the fold sizes
/// and the per-class counts differ by at most one.
pub fn kfold_split(n: usize, labels: Option<&[Label]>, cfg: &CvConfig) -> Result<Vec<Vec<usize>>> {
    if cfg.k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {}", cfg.k)));
    }
    if cfg.k > n {
        return Err(Error::invalid(format!("k = {} exceeds the {n} patterns", cfg.k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.shuffle_seed);
    let groups: Vec<Vec<usize>> = if cfg.stratified {
        let labels = labels.ok_or_else(|| Error::invalid("stratified folds need labels"))?;
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        [Label::Positive, Label::Negative]
            .iter()
            .map(|&class| (0..n).filter(|&i| labels[i] == class).collect())
            .collect()
    } else {
        vec![(0..n).collect()]
    };
    let mut folds = vec![Vec::with_capacity(n / cfg.k + 1); cfg.k];
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for i in group {
            folds[next].push(i);
            next = (next + 1) % cfg.k;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Pooled cross-validation outcome, with per-fold counts kept for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvReport {
    pub correct: usize,
    pub total: usize,
    /// `(correct, size)` of each held-out fold.
    pub per_fold: Vec<(usize, usize)>,
}

impl CvReport {
    /// `100 · correct / total` over all held-out predictions.
    pub fn accuracy(&self) -> f64 {
        100.0 * self.correct as f64 / self.total as f64
    }

    /// Mean of the per-fold accuracies.
    pub fn mean_fold_accuracy(&self) -> f64 {
        let sum: f64 = self
            .per_fold
            .iter()
            .map(|&(c, t)| 100.0 * c as f64 / t as f64)
            .sum();
        sum / self.per_fold.len() as f64
    }
}

pub fn cross_validate<F: Scalar>(data: &FeatureMatrix<F>, cfg: &TrainConfig<F>, cv: &CvConfig) -> Result<CvReport> {
    let labels = data.require_labels()?;
    let folds = kfold_split(data.n_patterns(), Some(labels), cv)?;
    cross_validate_folds(data, cfg, &folds)
}

/// Train on all folds but one, predict the held-out fold, rotate.
pub fn cross_validate_folds<F: Scalar>(
    data: &FeatureMatrix<F>,
    cfg: &TrainConfig<F>,
    folds: &[Vec<usize>],
) -> Result<CvReport> {
    let labels = data.require_labels()?;
    let mut held_out = vec![usize::MAX; data.n_patterns()];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            held_out[i] = f;
        }
    }
    let mut per_fold = Vec::with_capacity(folds.len());
    for (f, fold) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = (0..data.n_patterns()).filter(|&i| held_out[i] != f).collect();
        let train_set = data.select(&train_idx);
        let split_labels = train_set.labels().unwrap_or_default();
        if !split_labels.contains(&Label::Positive) || !split_labels.contains(&Label::Negative) {
            return Err(Error::DegenerateFold { fold: f });
        }
        let model = train(&train_set, cfg)?;
        let mut correct = 0;
        for &i in fold {
            if model.predict(data.pattern(i))? == labels[i] {
                correct += 1;
            }
        }
        per_fold.push((correct, fold.len()));
    }
    Ok(CvReport {
        correct: per_fold.iter().map(|p| p.0).sum(),
        total: per_fold.iter().map(|p| p.1).sum(),
        per_fold,
    })
}

/// Inclusive arithmetic sequence of base-2 exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Log2Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Log2Range {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let r = Log2Range { start, stop, step };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.start.is_finite() && self.stop.is_finite() && self.start <= self.stop) {
            return Err(Error::invalid(format!(
                "empty exponent range {}..{} step {}",
                self.start, self.stop, self.step
            )));
        }
        Ok(())
    }

    pub fn exponents(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl std::str::FromStr for Log2Range {
    type Err = Error;

    /// `start,stop,step`, or a single exponent.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::invalid(format!("bad exponent range {s:?}")))?;
        match parts[..] {
            [e] => Log2Range::new(e, e, 1.0),
            [a, b, c] => Log2Range::new(a, b, c),
            _ => Err(Error::invalid(format!("expected start,stop,step, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub log2c: Log2Range,
    pub log2gamma: Log2Range,
}

impl Default for GridSpec {
    /// `C = 2^-5 .. 2^15`, `gamma = 2^-15 .. 2^3`, both in steps of 2^2.
    fn default() -> Self {
        GridSpec {
            log2c: Log2Range {
                start: -5.0,
                stop: 15.0,
                step: 2.0,
            },
            log2gamma: Log2Range {
                start: -15.0,
                stop: 3.0,
                step: 2.0,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridCell {
    pub log2c: f64,
    pub log2gamma: f64,
    pub c: f64,
    pub gamma: f64,
    pub cv: CvReport,
}

impl GridCell {
    pub fn accuracy(&self) -> f64 {
        self.cv.accuracy()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    /// Row-major over `(log2c, log2gamma)`.
    pub cells: Vec<GridCell>,
    pub best: usize,
}

impl GridResult {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    /// `C,gamma,accuracy` with accuracy to four decimals.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "C,gamma,accuracy")?;
        for cell in &self.cells {
            writeln!(w, "{},{},{:.4}", fmt_real(cell.c), fmt_real(cell.gamma), cell.accuracy())?;
        }
        Ok(())
    }

    /// `log2C log2gamma accuracy` triples, one block per C value.
    pub fn write_gnuplot(&self, w: &mut impl Write) -> std::io::Result<()> {
        let mut previous = None;
        for cell in &self.cells {
            if previous.is_some_and(|p| p != cell.log2c) {
                writeln!(w)?;
            }
            previous = Some(cell.log2c);
            writeln!(w, "{} {} {:.4}", fmt_real(cell.log2c), fmt_real(cell.log2gamma), cell.accuracy())?;
        }
        Ok(())
    }
}

/// Cross-validate every `(C, gamma)` cell with the same folds.
///
/// `base` supplies the kernel kind, `coef0`, `degree` and solver settings;
/// its `C` and `gamma` are replaced per cell. Cells run in parallel but the
/// result is ordered by cell index. The best cell has the most correct
/// predictions, ties going to the smaller `C` and then the smaller `gamma`.
pub fn grid_search<F: Scalar>(
    data: &FeatureMatrix<F>,
    base: &TrainConfig<F>,
    grid: &GridSpec,
    cv: &CvConfig,
) -> Result<GridResult> {
    grid.log2c.validate()?;
    grid.log2gamma.validate()?;
    let labels = data.require_labels()?;
    let folds = kfold_split(data.n_patterns(), Some(labels), cv)?;
    let coords: Vec<(f64, f64)> = grid
        .log2c
        .exponents()
        .into_iter()
        .flat_map(|lc| grid.log2gamma.exponents().into_iter().map(move |lg| (lc, lg)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(log2c, log2gamma)| {
            let (c, gamma) = (log2c.exp2(), log2gamma.exp2());
            let mut cfg = *base;
            cfg.c = F::of(c);
            cfg.kernel.gamma = F::of(gamma);
            let cv = cross_validate_folds(data, &cfg, &folds)?;
            Ok(GridCell {
                log2c,
                log2gamma,
                c,
                gamma,
                cv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = (0..cells.len())
        .min_by(|&a, &b| {
            let (x, y) = (&cells[a], &cells[b]);
            y.cv.correct
                .cmp(&x.cv.correct)
                .then(x.c.total_cmp(&y.c))
                .then(x.gamma.total_cmp(&y.gamma))
        })
        .expect("grid is non-empty");
    Ok(GridResult { cells, best })
}
