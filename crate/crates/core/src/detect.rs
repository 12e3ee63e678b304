//! Per-bin classification of a spectrogram and the resulting noise
//! activity report.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{apply_scale, extract_band_patterns, normalize_unit_sum, BandSelect, Label, ScaleRange};
use crate::scalar::{fmt_real, Scalar};
use crate::spectrogram::Spectrogram;
use crate::svm::SvmModel;
use crate::time::UtcTime;

/// gnuplot label-track codes for +1 and -1 bins.
pub const CODE_NOISE: u32 = 90;
pub const CODE_CLEAN: u32 = 30;
/// Constant ordinate of the label scatter.
pub const LABEL_Y: f64 = 0.5;

/// Predicted label of every STFT bin.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelTrack {
    /// Bin centres, seconds from `start`.
    pub times: Vec<f64>,
    pub labels: Vec<Label>,
    pub start: UtcTime,
    pub hop_seconds: f64,
}

impl LabelTrack {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_noise(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Positive).count()
    }

    /// Write `t y code` lines, one per bin.
    pub fn write_gnuplot(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (&t, &l) in self.times.iter().zip(&self.labels) {
            let code = if l == Label::Positive { CODE_NOISE } else { CODE_CLEAN };
            writeln!(w, "{} {} {}", fmt_real(t), fmt_real(LABEL_Y), code)?;
        }
        Ok(())
    }
}

/// Extract, normalise, scale and classify every bin of `spec`.
pub fn classify_bins<F: Scalar>(
    model: &SvmModel<F>,
    range: &ScaleRange<F>,
    spec: &Spectrogram<F>,
    band: &BandSelect,
) -> Result<LabelTrack> {
    let width = band.width();
    if model.n_features() != width {
        return Err(Error::DimensionMismatch {
            expected: model.n_features(),
            found: width,
        });
    }
    if range.n_features() != width {
        return Err(Error::DimensionMismatch {
            expected: range.n_features(),
            found: width,
        });
    }
    let raw = extract_band_patterns(spec, band)?;
    let scaled = apply_scale(&normalize_unit_sum(&raw)?, range)?;
    let labels = (0..scaled.n_patterns())
        .into_par_iter()
        .map(|i| model.predict(scaled.pattern(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelTrack {
        times: spec.times(),
        labels,
        start: spec.start_time(),
        hop_seconds: spec.params().hop_seconds(),
    })
}

/// Share of bins labelled -1, in percent.
pub fn percent_absent(track: &LabelTrack) -> Result<f64> {
    if track.is_empty() {
        return Err(Error::invalid("empty label track"));
    }
    let clean = track.len() - track.n_noise();
    Ok(100.0 * clean as f64 / track.len() as f64)
}

/// Share of bins labelled +1, in percent.
pub fn percent_present(track: &LabelTrack) -> Result<f64> {
    if track.is_empty() {
        return Err(Error::invalid("empty label track"));
    }
    Ok(100.0 * track.n_noise() as f64 / track.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: UtcTime,
    pub end: UtcTime,
}

impl Interval {
    pub fn seconds(&self) -> f64 {
        self.end.seconds_since(self.start)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActivityReport {
    pub intervals: Vec<Interval>,
    pub percent_absent: f64,
    pub n_bins: usize,
    pub n_noise_bins: usize,
}

/// Merge runs of +1 bins into UTC intervals.
///
/// Gaps of at most `bridge_gap_bins` -1 bins between runs are bridged, then
/// runs shorter than `min_bins` are dropped. Each bin spans one hop centred
/// on its time stamp.
pub fn activity_intervals(track: &LabelTrack, min_bins: usize, bridge_gap_bins: usize) -> Result<ActivityReport> {
    let percent_absent = percent_absent(track)?;
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &l) in track.labels.iter().enumerate() {
        if l != Label::Positive {
            continue;
        }
        match runs.last_mut() {
            Some((_, last)) if i - *last - 1 <= bridge_gap_bins => *last = i,
            _ => runs.push((i, i)),
        }
    }
    let half = track.hop_seconds / 2.0;
    let intervals = runs
        .into_iter()
        .filter(|&(first, last)| last + 1 - first >= min_bins.max(1))
        .map(|(first, last)| Interval {
            start: track.start.add_seconds((track.times[first] - half).max(0.0)),
            end: track.start.add_seconds(track.times[last] + half),
        })
        .collect();
    Ok(ActivityReport {
        intervals,
        percent_absent,
        n_bins: track.len(),
        n_noise_bins: track.n_noise(),
    })
}

/// Intersection over union of two sets of intervals, by total duration.
pub fn intervals_iou(a: &[Interval], b: &[Interval]) -> f64 {
    let mut edges: Vec<i64> = a
        .iter()
        .chain(b)
        .flat_map(|iv| [iv.start.nanos(), iv.end.nanos()])
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let covers = |set: &[Interval], lo: i64, hi: i64| set.iter().any(|iv| iv.start.nanos() <= lo && hi <= iv.end.nanos());
    let (mut inter, mut union) = (0i64, 0i64);
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (in_a, in_b) = (covers(a, lo, hi), covers(b, lo, hi));
        if in_a && in_b {
            inter += hi - lo;
        }
        if in_a || in_b {
            union += hi - lo;
        }
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportJson {
    percent_absent: f64,
    n_bins: usize,
    intervals: Vec<Interval>,
    model: String,
    range: String,
}

/// Report JSON as written by [`emit_report`].
pub fn report_json(report: &ActivityReport, model: &Path, range: &Path) -> String {
    let json = ReportJson {
        percent_absent: (report.percent_absent * 1e4).round() / 1e4,
        n_bins: report.n_bins,
        intervals: report.intervals.clone(),
        model: model.display().to_string(),
        range: range.display().to_string(),
    };
    serde_json::to_string_pretty(&json).expect("report serializes") + "\n"
}

/// Read back a report JSON. The noise-bin count is recovered from the percentage.
pub fn read_report(path: impl AsRef<Path>) -> Result<ActivityReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let json: ReportJson = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path.display().to_string(), format!("line {}", e.line()), e.to_string()))?;
    let n_noise_bins = (json.n_bins as f64 * (100.0 - json.percent_absent) / 100.0).round() as usize;
    Ok(ActivityReport {
        intervals: json.intervals,
        percent_absent: json.percent_absent,
        n_bins: json.n_bins,
        n_noise_bins,
    })
}

/// Paths written by [`emit_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmittedFiles {
    pub report: PathBuf,
    pub spectrogram: PathBuf,
    pub labels: PathBuf,
}

/// Write `<prefix>.json`, `<prefix>.spectrogram.dat` (pm3d triples) and
/// `<prefix>.labels.dat` (label scatter) for the two-panel plot.
pub fn emit_report<F: Scalar>(
    report: &ActivityReport,
    track: &LabelTrack,
    spec: &Spectrogram<F>,
    model_path: &Path,
    range_path: &Path,
    prefix: &Path,
) -> Result<EmittedFiles> {
    let with_suffix = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let files = EmittedFiles {
        report: with_suffix(".json"),
        spectrogram: with_suffix(".spectrogram.dat"),
        labels: with_suffix(".labels.dat"),
    };
    fs::write(&files.report, report_json(report, model_path, range_path)).map_err(|e| Error::io(&files.report, e))?;
    spec.save_gnuplot(&files.spectrogram)?;
    let file = fs::File::create(&files.labels).map_err(|e| Error::io(&files.labels, e))?;
    let mut w = BufWriter::new(file);
    track
        .write_gnuplot(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&files.labels, e))?;
    Ok(files)
}
