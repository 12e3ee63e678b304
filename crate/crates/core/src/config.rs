//! Pipeline settings shared by every stage, stored as one JSON file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::BandSelect;
use crate::modelselect::{CvConfig, GridSpec};
use crate::scalar::Scalar;
use crate::spectrogram::{StftParams, DEFAULT_NFFT, DEFAULT_OVERLAP, DEFAULT_WINDOW};
use crate::svm::{KernelKind, KernelSpec, TrainConfig};

/// STFT geometry; the sampling rate always comes from the data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftLayout {
    pub window_len: usize,
    pub overlap: usize,
    pub nfft: usize,
}

impl Default for StftLayout {
    fn default() -> Self {
        StftLayout {
            window_len: DEFAULT_WINDOW,
            overlap: DEFAULT_OVERLAP,
            nfft: DEFAULT_NFFT,
        }
    }
}

impl StftLayout {
    pub fn params(&self, fs: f64) -> Result<StftParams> {
        StftParams::new(self.window_len, self.overlap, self.nfft, fs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub stft: StftLayout,
    pub band: BandSelect,
    pub scale_lower: f64,
    pub scale_upper: f64,
    pub kernel: KernelKind,
    pub coef0: f64,
    pub degree: u32,
    /// Used by `train` and `cv` when no grid result is given.
    pub c: f64,
    /// `None` means `1 / n_features`.
    pub gamma: Option<f64>,
    pub kkt_tol: f64,
    pub grid: GridSpec,
    pub cv: CvConfig,
    pub seed: u64,
    pub min_bins: usize,
    pub bridge_gap_bins: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stft: StftLayout::default(),
            band: BandSelect::default(),
            scale_lower: -1.0,
            scale_upper: 1.0,
            kernel: KernelKind::Rbf,
            coef0: 0.0,
            degree: 3,
            c: 1.0,
            gamma: None,
            kkt_tol: 1e-3,
            grid: GridSpec::default(),
            cv: CvConfig::default(),
            seed: 0,
            min_bins: 1,
            bridge_gap_bins: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        // Any positive rate works for a geometry check.
        self.stft.params(1.0)?;
        BandSelect::new(self.band.row_start, self.band.row_end)?;
        self.band.check(self.stft.nfft / 2 + 1)?;
        if !(self.scale_lower < self.scale_upper) {
            return Err(Error::invalid("scale_lower must be below scale_upper"));
        }
        if self.cv.k < 2 {
            return Err(Error::invalid("cv.k must be at least 2"));
        }
        self.grid.log2c.validate()?;
        self.grid.log2gamma.validate()?;
        self.train_config::<f64>(self.band.width(), self.c, self.gamma)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: PipelineConfig = serde_json::from_str(&text).map_err(|e| {
            Error::parse(
                path.display().to_string(),
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn kernel_spec<F: Scalar>(&self, n_features: usize, gamma: Option<f64>) -> KernelSpec<F> {
        let gamma = gamma.or(self.gamma).unwrap_or(1.0 / n_features.max(1) as f64);
        KernelSpec {
            kind: self.kernel,
            gamma: F::of(gamma),
            coef0: F::of(self.coef0),
            degree: self.degree,
        }
    }

    pub fn train_config<F: Scalar>(&self, n_features: usize, c: f64, gamma: Option<f64>) -> Result<TrainConfig<F>> {
        let cfg = TrainConfig::new(F::of(c), self.kernel_spec(n_features, gamma)).with_tolerance(F::of(self.kkt_tol));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cv_config(&self, k: Option<usize>, seed: Option<u64>) -> CvConfig {
        CvConfig {
            k: k.unwrap_or(self.cv.k),
            shuffle_seed: seed.unwrap_or(self.cv.shuffle_seed),
            stratified: self.cv.stratified,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let cfg = PipelineConfig {
            gamma: Some(0.125),
            kernel: KernelKind::Polynomial,
            ..PipelineConfig::default()
        };
        let back: PipelineConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_file_takes_defaults() {
        let cfg: PipelineConfig = serde_json::from_str(r#"{"seed": 7, "band": {"row_start": 2, "row_end": 100}}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.band.width(), 99);
        assert_eq!(cfg.stft, StftLayout::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"sede": 7}"#).is_err());
        let cfg = PipelineConfig {
            band: BandSelect {
                row_start: 3,
                row_end: 600,
            },
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig {
            c: -1.0,
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn default_gamma_is_reciprocal_width() {
        let spec: KernelSpec<f64> = PipelineConfig::default().kernel_spec(200, None);
        assert_eq!(spec.gamma, 0.005);
    }
}
