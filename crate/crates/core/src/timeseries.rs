//! Uniformly sampled single-channel seismograms: loading, slicing,
//! half-rate decimation and persistence.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_real, Scalar};
use crate::time::UtcTime;

/// On-disk representation of a [`TimeSeries`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesFormat {
    /// `# key=value` header lines followed by one decimal sample per line.
    Csv,
    /// Little-endian `f64` payload plus a `<file>.json` sidecar.
    RawF64Le,
}

impl SeriesFormat {
    /// `.csv` files are CSV, anything else raw.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SeriesFormat::Csv,
            _ => SeriesFormat::RawF64Le,
        }
    }
}

impl FromStr for SeriesFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SeriesFormat::Csv),
            "raw-f64le" | "raw" => Ok(SeriesFormat::RawF64Le),
            other => Err(Error::invalid(format!("unknown series format {other:?}"))),
        }
    }
}

/// A seismogram: samples at a fixed rate starting at a UTC instant.
///
/// Immutable once built; every sample is finite and `fs > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<F = f64> {
    samples: Vec<F>,
    fs: f64,
    start: UtcTime,
    station: String,
}

impl<F: Scalar> TimeSeries<F> {
    pub fn new(samples: Vec<F>, fs: f64, start: UtcTime, station: impl Into<String>) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!("sampling rate must be positive, got {fs}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(TimeSeries {
            samples,
            fs,
            start,
            station: station.into(),
        })
    }

    pub fn samples(&self) -> &[F] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<F> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn start_time(&self) -> UtcTime {
        self.start
    }

    pub fn station(&self) -> &str {
        &self.station
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Instant just past the last sample.
    pub fn end_time(&self) -> UtcTime {
        self.start.add_seconds(self.duration_seconds())
    }

    /// Samples covering `[start, end)`, with both ends snapped to the
    /// nearest sample index.
    pub fn slice_utc(&self, start: UtcTime, end: UtcTime) -> Result<Self> {
        if start >= end {
            return Err(Error::invalid(format!("inverted window: {start} .. {end}")));
        }
        if start < self.start || end > self.end_time() {
            return Err(Error::WindowOutOfRange(format!(
                "{start} .. {end} not within {} .. {}",
                self.start,
                self.end_time()
            )));
        }
        let lo = (start.seconds_since(self.start) * self.fs).round() as usize;
        let hi = ((end.seconds_since(self.start) * self.fs).round() as usize).min(self.len());
        if lo >= hi {
            return Err(Error::WindowOutOfRange(format!(
                "{start} .. {end} is shorter than one sample"
            )));
        }
        Ok(TimeSeries {
            samples: self.samples[lo..hi].to_vec(),
            fs: self.fs,
            start: self.start.add_seconds(lo as f64 / self.fs),
            station: self.station.clone(),
        })
    }

    /// Pairwise-average decimation by two.
    ///
    /// `out[i] = (x[2i] + x[2i+1]) / 2`; an odd trailing sample is dropped.
    /// The start time moves to the centre of the first pair.
    pub fn downsample_half(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::invalid("downsampling needs at least 2 samples"));
        }
        let half = F::of(0.5);
        let samples = self
            .samples
            .chunks_exact(2)
            .map(|pair| (pair[0] + pair[1]) * half)
            .collect();
        Ok(TimeSeries {
            samples,
            fs: self.fs / 2.0,
            start: self.start.add_seconds(0.5 / self.fs),
            station: self.station.clone(),
        })
    }

    pub fn load(path: impl AsRef<Path>, format: SeriesFormat) -> Result<Self> {
        let path = path.as_ref();
        match format {
            SeriesFormat::Csv => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_csv(&text, &path.display().to_string())
            }
            SeriesFormat::RawF64Le => load_raw(path),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>, format: SeriesFormat) -> Result<()> {
        let path = path.as_ref();
        match format {
            SeriesFormat::Csv => {
                let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
                let mut w = BufWriter::new(file);
                self.write_csv(&mut w).map_err(|e| Error::io(path, e))
            }
            SeriesFormat::RawF64Le => save_raw(self, path),
        }
    }

    fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# fs={}", fmt_real(self.fs))?;
        writeln!(w, "# start={}", self.start)?;
        writeln!(w, "# station={}", self.station)?;
        for &x in &self.samples {
            writeln!(w, "{}", fmt_real(x))?;
        }
        w.flush()
    }
}

fn parse_csv<F: Scalar>(text: &str, name: &str) -> Result<TimeSeries<F>> {
    let mut fs_hz = None;
    let mut start = None;
    let mut station = String::new();
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = format!("line {}", idx + 1);
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let Some((key, value)) = header.trim().split_once('=') else {
                return Err(Error::parse(name, lineno, "header must be `# key=value`"));
            };
            let value = value.trim();
            match key.trim() {
                "fs" => {
                    let v: f64 = value
                        .parse()
                        .map_err(|_| Error::parse(name, &lineno, format!("bad fs {value:?}")))?;
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::parse(name, lineno, format!("fs must be positive, got {v}")));
                    }
                    fs_hz = Some(v);
                }
                "start" => {
                    start = Some(
                        value
                            .parse::<UtcTime>()
                            .map_err(|e| Error::parse(name, &lineno, e.to_string()))?,
                    );
                }
                "station" => station = value.to_string(),
                other => {
                    return Err(Error::parse(name, lineno, format!("unknown header key {other:?}")))
                }
            }
            continue;
        }
        let x: F = line
            .parse()
            .map_err(|_| Error::parse(name, &lineno, format!("bad sample {line:?}")))?;
        if !x.is_finite() {
            return Err(Error::parse(name, lineno, format!("non-finite sample {line:?}")));
        }
        samples.push(x);
    }
    let fs_hz = fs_hz.ok_or_else(|| Error::parse(name, "header", "missing `# fs=`"))?;
    let start = start.ok_or_else(|| Error::parse(name, "header", "missing `# start=`"))?;
    TimeSeries::new(samples, fs_hz, start, station)
}

/// Sidecar of a raw-f64le series.
#[derive(Debug, Serialize, Deserialize)]
struct RawHeader {
    fs: f64,
    start: UtcTime,
    #[serde(default)]
    station: String,
    n: usize,
}

/// `<payload>.json` next to the payload file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn load_raw<F: Scalar>(path: &Path) -> Result<TimeSeries<F>> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let header: RawHeader = serde_json::from_str(&text)
        .map_err(|e| Error::parse(side.display().to_string(), format!("line {}", e.line()), e.to_string()))?;
    if !(header.fs > 0.0 && header.fs.is_finite()) {
        return Err(Error::parse(
            side.display().to_string(),
            "fs",
            format!("fs must be positive, got {}", header.fs),
        ));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let samples = decode_f64le(&bytes, header.n, &name)?;
    TimeSeries::new(samples, header.fs, header.start, header.station)
}

fn save_raw<F: Scalar>(ts: &TimeSeries<F>, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(ts.len() * 8);
    for &x in ts.samples() {
        bytes.extend_from_slice(&x.as_f64().to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let header = RawHeader {
        fs: ts.fs,
        start: ts.start,
        station: ts.station.clone(),
        n: ts.len(),
    };
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

/// Decode exactly `n` little-endian doubles, rejecting non-finite values.
pub(crate) fn decode_f64le<F: Scalar>(bytes: &[u8], n: usize, name: &str) -> Result<Vec<F>> {
    if bytes.len() != n * 8 {
        return Err(Error::parse(
            name,
            format!("byte {}", bytes.len()),
            format!("expected {} bytes for {n} doubles", n * 8),
        ));
    }
    bytes
        .chunks_exact(8)
        .enumerate()
        .map(|(i, chunk)| {
            let x = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
            if x.is_finite() {
                Ok(F::of(x))
            } else {
                Err(Error::parse(name, format!("byte {}", i * 8), format!("non-finite sample {x}")))
            }
        })
        .collect()
}
