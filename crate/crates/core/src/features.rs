//! Labelled pattern matrices built from spectrogram columns, plus the
//! min/max affine scaling fitted on training data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectrogram::Spectrogram;

/// Binary class label. `Positive` (+1) marks noise present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn value(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Label> {
        match v {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    /// `+1` or `-1`.
    pub fn as_token(self) -> &'static str {
        match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        }
    }

    pub fn sign<F: Scalar>(self) -> F {
        match self {
            Label::Positive => F::one(),
            Label::Negative => -F::one(),
        }
    }
}

/// Row-major `n_patterns × n_features` matrix with optional labels and
/// per-pattern times (seconds from record start).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix<F = f64> {
    data: Vec<F>,
    n_features: usize,
    labels: Option<Vec<Label>>,
    times: Option<Vec<f64>>,
}

impl<F: Scalar> FeatureMatrix<F> {
    pub fn new(data: Vec<F>, n_features: usize) -> Result<Self> {
        if n_features == 0 {
            if !data.is_empty() {
                return Err(Error::invalid("zero features but non-empty data"));
            }
        } else if !data.len().is_multiple_of(n_features) {
            return Err(Error::DimensionMismatch {
                expected: n_features * (data.len() / n_features + 1),
                found: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "pattern {} feature {} is not finite",
                i / n_features,
                i % n_features + 1
            )));
        }
        Ok(FeatureMatrix {
            data,
            n_features,
            labels: None,
            times: None,
        })
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_features) {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                found: bad.len(),
            });
        }
        Self::new(rows.concat(), n_features)
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.n_patterns() {
            return Err(Error::DimensionMismatch {
                expected: self.n_patterns(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Result<Self> {
        if times.len() != self.n_patterns() {
            return Err(Error::DimensionMismatch {
                expected: self.n_patterns(),
                found: times.len(),
            });
        }
        self.times = Some(times);
        Ok(self)
    }

    /// Same patterns, every label set to `label`.
    pub fn labelled(self, label: Label) -> Self {
        let n = self.n_patterns();
        FeatureMatrix {
            labels: Some(vec![label; n]),
            ..self
        }
    }

    pub fn n_patterns(&self) -> usize {
        self.data.len().checked_div(self.n_features).unwrap_or(0)
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn pattern(&self, i: usize) -> &[F] {
        &self.data[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn patterns(&self) -> impl ExactSizeIterator<Item = &[F]> + '_ {
        self.data.chunks_exact(self.n_features.max(1)).take(self.n_patterns())
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    /// Labels, or an error naming the operation that needs them.
    pub fn require_labels(&self) -> Result<&[Label]> {
        self.labels()
            .ok_or_else(|| Error::invalid("operation requires labelled patterns"))
    }

    pub fn times(&self) -> Option<&[f64]> {
        self.times.as_deref()
    }

    /// Patterns at `indices`, in that order, carrying labels and times along.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            data.extend_from_slice(self.pattern(i));
        }
        FeatureMatrix {
            data,
            n_features: self.n_features,
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            times: self
                .times
                .as_ref()
                .map(|t| indices.iter().map(|&i| t[i]).collect()),
        }
    }
}

/// 1-based inclusive range of spectrogram rows used as features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandSelect {
    pub row_start: usize,
    pub row_end: usize,
}

impl Default for BandSelect {
    fn default() -> Self {
        BandSelect {
            row_start: 3,
            row_end: 202,
        }
    }
}

impl BandSelect {
    pub fn new(row_start: usize, row_end: usize) -> Result<Self> {
        if row_start == 0 || row_start > row_end {
            return Err(Error::invalid(format!(
                "band rows must satisfy 1 <= start <= end, got {row_start}..{row_end}"
            )));
        }
        Ok(BandSelect { row_start, row_end })
    }

    pub fn width(&self) -> usize {
        self.row_end + 1 - self.row_start
    }

    pub fn check(&self, rows: usize) -> Result<()> {
        if self.row_start == 0 || self.row_start > self.row_end || self.row_end > rows {
            return Err(Error::invalid(format!(
                "band {}..{} outside 1..{rows}",
                self.row_start, self.row_end
            )));
        }
        Ok(())
    }

    fn zero_based(&self) -> std::ops::Range<usize> {
        self.row_start - 1..self.row_end
    }
}

/// One unlabelled pattern per spectrogram column: the PSD rows in `band`.
pub fn extract_band_patterns<F: Scalar>(
    spec: &Spectrogram<F>,
    band: &BandSelect,
) -> Result<FeatureMatrix<F>> {
    band.check(spec.rows())?;
    let rows = band.zero_based();
    let mut data = Vec::with_capacity(spec.n_bins() * band.width());
    for col in spec.columns() {
        data.extend_from_slice(&col[rows.clone()]);
    }
    FeatureMatrix {
        data,
        n_features: band.width(),
        labels: None,
        times: None,
    }
    .with_times(spec.times())
}

/// Divide every pattern by its own sum.
pub fn normalize_unit_sum<F: Scalar>(fm: &FeatureMatrix<F>) -> Result<FeatureMatrix<F>> {
    let mut out = fm.clone();
    let width = fm.n_features.max(1);
    for (index, row) in out.data.chunks_exact_mut(width).enumerate() {
        let sum: F = row.iter().copied().sum();
        if !(sum > F::zero()) {
            return Err(Error::NonPositivePattern {
                index,
                sum: sum.as_f64(),
            });
        }
        for x in row.iter_mut() {
            *x /= sum;
        }
    }
    Ok(out)
}

/// `pos` patterns labelled +1 followed by `neg` patterns labelled -1.
pub fn stack_labeled<F: Scalar>(
    pos: &FeatureMatrix<F>,
    neg: &FeatureMatrix<F>,
) -> Result<FeatureMatrix<F>> {
    let width = match (pos.n_patterns(), neg.n_patterns()) {
        (0, _) => neg.n_features,
        (_, 0) => pos.n_features,
        _ if pos.n_features != neg.n_features => {
            return Err(Error::DimensionMismatch {
                expected: pos.n_features,
                found: neg.n_features,
            })
        }
        _ => pos.n_features,
    };
    let mut data = pos.data.clone();
    data.extend_from_slice(&neg.data);
    let mut labels = vec![Label::Positive; pos.n_patterns()];
    labels.extend(std::iter::repeat_n(Label::Negative, neg.n_patterns()));
    let times = match (&pos.times, &neg.times) {
        (Some(a), Some(b)) => Some([a.as_slice(), b.as_slice()].concat()),
        _ => None,
    };
    Ok(FeatureMatrix {
        data,
        n_features: width,
        labels: Some(labels),
        times,
    })
}

/// Per-feature min/max and the target interval of the affine scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleRange<F = f64> {
    pub lower: F,
    pub upper: F,
    pub mins: Vec<F>,
    pub maxs: Vec<F>,
}

impl<F: Scalar> ScaleRange<F> {
    pub fn new(lower: F, upper: F, mins: Vec<F>, maxs: Vec<F>) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::invalid(format!("scale bounds need lower < upper, got {lower} {upper}")));
        }
        if mins.len() != maxs.len() {
            return Err(Error::DimensionMismatch {
                expected: mins.len(),
                found: maxs.len(),
            });
        }
        if let Some(f) = mins.iter().zip(&maxs).position(|(a, b)| !(a <= b)) {
            return Err(Error::invalid(format!("feature {}: min exceeds max", f + 1)));
        }
        Ok(ScaleRange {
            lower,
            upper,
            mins,
            maxs,
        })
    }

    pub fn n_features(&self) -> usize {
        self.mins.len()
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        self.mins[feature] == self.maxs[feature]
    }

    /// Scale one value of `feature` (0-based).
    pub fn scale_value(&self, feature: usize, x: F) -> F {
        let (lo, hi) = (self.mins[feature], self.maxs[feature]);
        if lo == hi {
            F::zero()
        } else {
            self.lower + (self.upper - self.lower) * (x - lo) / (hi - lo)
        }
    }

    pub fn scale_pattern(&self, pattern: &[F], out: &mut [F]) -> Result<()> {
        if pattern.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: pattern.len(),
            });
        }
        for (f, (o, &x)) in out.iter_mut().zip(pattern).enumerate() {
            *o = self.scale_value(f, x);
        }
        Ok(())
    }
}

/// Record per-feature extremes over all patterns.
pub fn fit_scale<F: Scalar>(fm: &FeatureMatrix<F>, lower: F, upper: F) -> Result<ScaleRange<F>> {
    if fm.n_patterns() == 0 {
        return Err(Error::invalid("cannot fit scaling on an empty matrix"));
    }
    let mut mins = fm.pattern(0).to_vec();
    let mut maxs = mins.clone();
    for row in fm.patterns().skip(1) {
        for ((lo, hi), &x) in mins.iter_mut().zip(maxs.iter_mut()).zip(row) {
            *lo = lo.min(x);
            *hi = hi.max(x);
        }
    }
    ScaleRange::new(lower, upper, mins, maxs)
}

/// Map every feature affinely onto `[lower, upper]` using `range`.
///
/// Constant features become 0; values outside the fitted extremes are not clamped.
pub fn apply_scale<F: Scalar>(fm: &FeatureMatrix<F>, range: &ScaleRange<F>) -> Result<FeatureMatrix<F>> {
    if fm.n_features != range.n_features() {
        return Err(Error::DimensionMismatch {
            expected: range.n_features(),
            found: fm.n_features,
        });
    }
    let mut out = fm.clone();
    for row in out.data.chunks_exact_mut(fm.n_features.max(1)) {
        for (f, x) in row.iter_mut().enumerate() {
            *x = range.scale_value(f, *x);
        }
    }
    Ok(out)
}
