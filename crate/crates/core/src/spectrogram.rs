//! Hamming-windowed, one-sided STFT power spectral density.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Radix2Fft;
use crate::scalar::{fmt_real, Scalar};
use crate::time::UtcTime;
use crate::timeseries::{decode_f64le, sidecar_path, TimeSeries};

pub const DEFAULT_WINDOW: usize = 1024;
pub const DEFAULT_OVERLAP: usize = 512;
pub const DEFAULT_NFFT: usize = 1024;

/// Segmenting parameters of the STFT.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StftParams {
    pub window_len: usize,
    pub overlap: usize,
    pub nfft: usize,
    pub fs: f64,
}

impl StftParams {
    pub fn new(window_len: usize, overlap: usize, nfft: usize, fs: f64) -> Result<Self> {
        let p = StftParams {
            window_len,
            overlap,
            nfft,
            fs,
        };
        p.validate()?;
        Ok(p)
    }

    /// 1024-sample windows, 512 overlap, 1024-point FFT at `fs`.
    pub fn defaults(fs: f64) -> Self {
        StftParams {
            window_len: DEFAULT_WINDOW,
            overlap: DEFAULT_OVERLAP,
            nfft: DEFAULT_NFFT,
            fs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 || self.overlap >= self.window_len || self.window_len > self.nfft {
            return Err(Error::invalid(format!(
                "need 0 <= overlap < window <= nfft, got overlap {} window {} nfft {}",
                self.overlap, self.window_len, self.nfft
            )));
        }
        if !self.nfft.is_power_of_two() {
            return Err(Error::invalid(format!("nfft {} is not a power of two", self.nfft)));
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return Err(Error::invalid(format!("sampling rate must be positive, got {}", self.fs)));
        }
        Ok(())
    }

    pub fn hop(&self) -> usize {
        self.window_len - self.overlap
    }

    pub fn n_freqs(&self) -> usize {
        self.nfft / 2 + 1
    }

    /// Number of complete segments in `n` samples; the partial tail is dropped.
    pub fn n_bins(&self, n: usize) -> usize {
        if n < self.window_len {
            0
        } else {
            (n - self.overlap) / self.hop()
        }
    }

    pub fn freq(&self, k: usize) -> f64 {
        k as f64 * self.fs / self.nfft as f64
    }

    /// Centre of segment `j`, seconds from the record start.
    pub fn time(&self, j: usize) -> f64 {
        (self.window_len as f64 / 2.0 + (j * self.hop()) as f64) / self.fs
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop() as f64 / self.fs
    }
}

/// `w[k] = 0.54 - 0.46 cos(2πk/(n-1))`, or `[1]` when `n == 1`.
pub fn hamming_window<F: Scalar>(n: usize) -> Result<Vec<F>> {
    match n {
        0 => Err(Error::invalid("window length must be positive")),
        1 => Ok(vec![F::one()]),
        _ => Ok((0..n)
            .map(|k| {
                let phase = 2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64;
                F::of(0.54 - 0.46 * phase.cos())
            })
            .collect()),
    }
}

/// PSD matrix, `(nfft/2 + 1)` frequency rows by one column per segment.
///
/// Stored column-major so each time bin is a contiguous slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram<F = f64> {
    psd: Vec<F>,
    rows: usize,
    cols: usize,
    params: StftParams,
    start: UtcTime,
}

impl<F: Scalar> Spectrogram<F> {
    /// Wrap a column-major PSD buffer.
    pub fn from_columns(psd: Vec<F>, cols: usize, params: StftParams, start: UtcTime) -> Result<Self> {
        params.validate()?;
        let rows = params.n_freqs();
        if psd.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: psd.len(),
            });
        }
        if let Some(i) = psd.iter().position(|&p| !(p.is_finite() && p >= F::zero())) {
            return Err(Error::invalid(format!(
                "psd entry (row {}, col {}) must be finite and non-negative",
                i % rows,
                i / rows
            )));
        }
        Ok(Spectrogram {
            psd,
            rows,
            cols,
            params,
            start,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n_bins(&self) -> usize {
        self.cols
    }

    pub fn params(&self) -> &StftParams {
        &self.params
    }

    pub fn start_time(&self) -> UtcTime {
        self.start
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        self.psd[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[F] {
        &self.psd[col * self.rows..(col + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[F]> + '_ {
        self.psd.chunks_exact(self.rows.max(1)).take(self.cols)
    }

    /// Column-major data.
    pub fn as_slice(&self) -> &[F] {
        &self.psd
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.rows).map(|k| self.params.freq(k)).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.cols).map(|j| self.params.time(j)).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut bytes = Vec::with_capacity(self.psd.len() * 8);
        for &p in &self.psd {
            bytes.extend_from_slice(&p.as_f64().to_le_bytes());
        }
        fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
        let header = SpectrogramHeader {
            rows: self.rows,
            cols: self.cols,
            fs: self.params.fs,
            window: self.params.window_len,
            overlap: self.params.overlap,
            nfft: self.params.nfft,
            start: self.start,
        };
        let side = sidecar_path(path);
        let json = serde_json::to_string_pretty(&header).expect("header serializes");
        fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let side = sidecar_path(path);
        let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let h: SpectrogramHeader = serde_json::from_str(&text).map_err(|e| {
            Error::parse(side.display().to_string(), format!("line {}", e.line()), e.to_string())
        })?;
        let params = StftParams::new(h.window, h.overlap, h.nfft, h.fs)?;
        if h.rows != params.n_freqs() {
            return Err(Error::parse(
                side.display().to_string(),
                "rows",
                format!("rows {} inconsistent with nfft {}", h.rows, h.nfft),
            ));
        }
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let psd = decode_f64le(&bytes, h.rows * h.cols, &path.display().to_string())?;
        Spectrogram::from_columns(psd, h.cols, params, h.start)
    }

    /// `time_s freq_hz dB` triples with a blank line after each time column,
    /// ready for gnuplot's `splot ... with pm3d`.
    pub fn write_gnuplot(&self, w: &mut impl Write) -> std::io::Result<()> {
        let floor = F::min_positive_value();
        let ten = F::of(10.0);
        for (j, col) in self.columns().enumerate() {
            let t = self.params.time(j);
            for (k, &p) in col.iter().enumerate() {
                let db = ten * p.max(floor).log10();
                writeln!(w, "{} {} {}", fmt_real(t), fmt_real(self.params.freq(k)), fmt_real(db))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_gnuplot(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_gnuplot(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrogramHeader {
    rows: usize,
    cols: usize,
    fs: f64,
    window: usize,
    overlap: usize,
    nfft: usize,
    start: UtcTime,
}

/// One-sided PSD of every complete segment of `ts`.
///
/// Column `j` is the Hamming-windowed segment starting at `j·hop`, zero
/// padded to `nfft`; `psd[k] = c_k |X[k]|² / (fs Σw²)` with `c_k = 1` at DC
/// and Nyquist and 2 elsewhere. No detrending.
pub fn stft_psd<F: Scalar>(ts: &TimeSeries<F>, params: &StftParams) -> Result<Spectrogram<F>> {
    params.validate()?;
    if (params.fs - ts.fs()).abs() > 1e-9 * ts.fs() {
        return Err(Error::invalid(format!(
            "STFT rate {} Hz does not match series rate {} Hz",
            params.fs,
            ts.fs()
        )));
    }
    let psd = psd_columns(ts.samples(), params)?;
    let cols = params.n_bins(ts.len());
    Spectrogram::from_columns(psd, cols, *params, ts.start_time())
}

/// Column-major PSD of raw samples (see [`stft_psd`]).
pub fn psd_columns<F: Scalar>(samples: &[F], params: &StftParams) -> Result<Vec<F>> {
    params.validate()?;
    if samples.len() < params.window_len {
        return Err(Error::invalid(format!(
            "record of {} samples is shorter than one {}-sample window",
            samples.len(),
            params.window_len
        )));
    }
    let window: Vec<F> = hamming_window(params.window_len)?;
    let plan = Radix2Fft::<F>::new(params.nfft)?;
    let rows = params.n_freqs();
    let cols = params.n_bins(samples.len());
    let hop = params.hop();
    let energy: F = window.iter().map(|&w| w * w).sum();
    let norm = (F::of(params.fs) * energy).recip();
    let two = F::of(2.0);

    let mut psd = vec![F::zero(); rows * cols];
    psd.par_chunks_mut(rows).enumerate().for_each(|(j, out)| {
        let seg = &samples[j * hop..j * hop + params.window_len];
        let mut buf = vec![Complex::new(F::zero(), F::zero()); params.nfft];
        for ((b, &x), &w) in buf.iter_mut().zip(seg).zip(&window) {
            b.re = x * w;
        }
        plan.forward(&mut buf);
        for (k, o) in out.iter_mut().enumerate() {
            let scale = if k == 0 || k == params.nfft / 2 { norm } else { two * norm };
            *o = buf[k].norm_sqr() * scale;
        }
    });
    Ok(psd)
}
