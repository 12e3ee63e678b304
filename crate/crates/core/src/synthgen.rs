//! Seeded synthetic seismograms with a known pump schedule.
//!
//! Tremor: ChaCha8 (`seed_from_u64(seed)`, stream 0) draws a standard normal
//! pair per positive FFT bin of a power-of-two grid covering the record;
//! bins between 0.1 and 12 Hz are weighted by `f^-1/2` (a `1/f` PSD), all
//! others are zeroed, and the inverse FFT is truncated to the record length,
//! demeaned and scaled to unit RMS.
//!
//! Pump: the same seed on stream 1 draws, per scheduled window, one phase per
//! harmonic and then one normal deviate per second of the window for the
//! amplitude jitter. The pump is only ever added inside its windows.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Radix2Fft;
use crate::scalar::Scalar;
use crate::time::UtcTime;
use crate::timeseries::TimeSeries;

pub const TREMOR_BAND_HZ: (f64, f64) = (0.1, 12.0);

/// 2002-12-05T00:00:00Z, the start time given to synthetic records.
pub const SYNTH_START: UtcTime = UtcTime(1_039_046_400_000_000_000);
pub const SYNTH_STATION: &str = "SYNTH";

/// Harmonic stack standing in for machinery noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub fundamental: f64,
    pub n_harmonics: u32,
    /// Per-harmonic amplitude in counts (tremor has unit RMS).
    pub amplitude: f64,
    /// Relative standard deviation of the once-per-second amplitude jitter.
    pub jitter: f64,
}

impl Default for PumpSpec {
    /// 4 Hz with 3 harmonics; total pump power 10x the tremor power (10 dB).
    fn default() -> Self {
        PumpSpec {
            fundamental: 4.0,
            n_harmonics: 3,
            amplitude: (20.0f64 / 3.0).sqrt(),
            jitter: 0.1,
        }
    }
}

impl PumpSpec {
    pub fn validate(&self, fs: f64) -> Result<()> {
        let top = self.fundamental * self.n_harmonics as f64;
        if !(self.fundamental > 0.0 && self.n_harmonics > 0 && top < fs / 2.0) {
            return Err(Error::invalid(format!(
                "pump harmonics up to {top} Hz must lie in (0, {}) Hz",
                fs / 2.0
            )));
        }
        if !(self.amplitude >= 0.0 && self.jitter >= 0.0) {
            return Err(Error::invalid("pump amplitude and jitter must be non-negative"));
        }
        Ok(())
    }
}

/// Pump-on windows in seconds from the record start: sorted, disjoint.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub windows: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn new(windows: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(a, b)) in windows.iter().enumerate() {
            if !(a >= 0.0 && a < b && b.is_finite()) {
                return Err(Error::invalid(format!("schedule window {a}..{b} is invalid")));
            }
            if i > 0 && a < windows[i - 1].1 {
                return Err(Error::invalid("schedule windows must be sorted and disjoint"));
            }
        }
        Ok(Schedule { windows })
    }

    pub fn validate_within(&self, duration_s: f64) -> Result<()> {
        match self.windows.last() {
            Some(&(_, end)) if end > duration_s => Err(Error::invalid(format!(
                "schedule ends at {end} s, after the {duration_s} s record"
            ))),
            _ => Ok(()),
        }
    }

    pub fn total_seconds(&self) -> f64 {
        self.windows.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.windows.iter().any(|&(a, b)| a <= t && t < b)
    }

    /// `a:b,c:d` in seconds.
    pub fn parse_list(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Schedule::default());
        }
        let windows = s
            .split(',')
            .map(|w| {
                let (a, b) = w
                    .split_once(':')
                    .ok_or_else(|| Error::invalid(format!("window {w:?} is not start:end")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(format!("bad seconds {v:?}")))
                };
                Ok((parse(a)?, parse(b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(windows)
    }
}

fn n_samples(fs: f64, duration_s: f64) -> Result<usize> {
    if !(fs > 0.0 && fs.is_finite() && duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::invalid("sampling rate and duration must be positive"));
    }
    let n = (duration_s * fs).round() as usize;
    if n < 2 {
        return Err(Error::invalid("record must span at least two samples"));
    }
    Ok(n)
}

/// Unit-RMS, zero-mean `1/f` noise between 0.1 and 12 Hz.
pub fn gen_tremor<F: Scalar>(fs: f64, duration_s: f64, seed: u64) -> Result<TimeSeries<F>> {
    let n = n_samples(fs, duration_s)?;
    let samples: Vec<f64> = tremor_samples(fs, n, seed)?;
    TimeSeries::new(samples.into_iter().map(F::of).collect(), fs, SYNTH_START, SYNTH_STATION)
}

fn tremor_samples(fs: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let len = n.next_power_of_two();
    let plan = Radix2Fft::<f64>::new(len)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex::new(0.0, 0.0); len];
    let (lo, hi) = TREMOR_BAND_HZ;
    for k in 1..len / 2 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let f = k as f64 * fs / len as f64;
        if (lo..=hi).contains(&f) {
            let c = Complex::new(re, im) * f.powf(-0.5);
            spectrum[k] = c;
            spectrum[len - k] = c.conj();
        }
    }
    plan.inverse(&mut spectrum);
    let mut x: Vec<f64> = spectrum[..n].iter().map(|c| c.re).collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        x.iter_mut().for_each(|v| *v /= rms);
    }
    Ok(x)
}

/// Tremor plus the pump inside every scheduled window.
pub fn gen_mixed<F: Scalar>(
    fs: f64,
    duration_s: f64,
    pump: &PumpSpec,
    schedule: &Schedule,
    seed: u64,
) -> Result<(TimeSeries<F>, Schedule)> {
    let n = n_samples(fs, duration_s)?;
    pump.validate(fs)?;
    schedule.validate_within(duration_s)?;
    let mut x = tremor_samples(fs, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let tau = std::f64::consts::TAU;
    for &(a, b) in &schedule.windows {
        let phases: Vec<f64> = (0..pump.n_harmonics).map(|_| rng.random::<f64>() * tau).collect();
        let seconds = (b - a).ceil() as usize;
        let gains: Vec<f64> = (0..seconds)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                (1.0 + pump.jitter * z).max(0.0)
            })
            .collect();
        let first = (a * fs).ceil() as usize;
        let last = ((b * fs).ceil() as usize).min(n);
        for (i, v) in x.iter_mut().enumerate().take(last).skip(first) {
            let t = i as f64 / fs;
            let gain = gains[((t - a) as usize).min(seconds - 1)];
            let tone: f64 = phases
                .iter()
                .enumerate()
                .map(|(h, &ph)| (tau * pump.fundamental * (h + 1) as f64 * t + ph).sin())
                .sum();
            *v += pump.amplitude * gain * tone;
        }
    }
    let ts = TimeSeries::new(x.into_iter().map(F::of).collect(), fs, SYNTH_START, SYNTH_STATION)?;
    Ok((ts, schedule.clone()))
}
