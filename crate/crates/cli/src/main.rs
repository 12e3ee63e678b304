//! `pumpnoise`: staged command-line pipeline for pump-noise detection.
//!
//! Exit codes: 0 success, 1 invalid input or arguments, 2 I/O failure.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pumpnoise::config::PipelineConfig;
use pumpnoise::detect::{activity_intervals, classify_bins, emit_report, intervals_iou, Interval};
use pumpnoise::features::{apply_scale, extract_band_patterns, fit_scale, normalize_unit_sum, stack_labeled, FeatureMatrix};
use pumpnoise::modelselect::{cross_validate, grid_search, GridSpec, Log2Range};
use pumpnoise::scalar::fmt_g;
use pumpnoise::sparse::{load_range, load_sparse, save_range, save_sparse};
use pumpnoise::spectrogram::{stft_psd, Spectrogram};
use pumpnoise::svm::{load_model, save_model, train, KernelKind, SvmModel};
use pumpnoise::synthgen::{gen_mixed, PumpSpec, Schedule};
use pumpnoise::timeseries::{SeriesFormat, TimeSeries};
use pumpnoise::{BandSelect, Error, Label, Result, UtcTime};

#[derive(Parser)]
#[command(name = "pumpnoise", version, about = "Detect machinery noise in seismograms with a kernel SVM")]
struct Cli {
    /// Pipeline configuration JSON (STFT layout, band, scaling, kernel, grid, CV, seed).
    /// Flags given on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut a time series to [start, end). Times are RFC3339 or `+seconds` from the record start.
    Slice(SliceArgs),
    /// Halve the sampling rate by averaging consecutive sample pairs.
    Downsample(SeriesInOut),
    /// Hamming-windowed one-sided PSD spectrogram of a time series.
    Spectrogram(SpectrogramArgs),
    /// Band patterns from spectrograms, normalised to unit sum, as a sparse pattern file.
    Featurize(FeaturizeArgs),
    /// Min-max scale patterns, fitting a range file or reusing one.
    Scale(ScaleArgs),
    /// Train a C-SVC model with SMO.
    Train(TrainArgs),
    /// k-fold cross-validation accuracy at one (C, gamma).
    Cv(CvArgs),
    /// Cross-validate a grid of (C, gamma) values and report the best cell.
    Grid(GridArgs),
    /// Predict labels for a pattern file; prints accuracy when it is labelled.
    Predict(PredictArgs),
    /// Classify every bin of a record and report pump activity intervals.
    Detect(DetectArgs),
    /// Generate a synthetic record with a pump schedule and its ground truth.
    Synth(SynthArgs),
    /// Print the effective pipeline configuration as JSON.
    Config,
}

#[derive(Args)]
struct SeriesInOut {
    /// Input series: `.csv` (header lines `# fs=`, `# start=`, `# station=`, one sample per line)
    /// or raw little-endian f64 with a `<file>.json` sidecar.
    #[arg(long, short)]
    input: PathBuf,
    /// Output series; format chosen by extension unless --format is given.
    #[arg(long, short)]
    output: PathBuf,
    /// Force the series format (`csv` or `raw-f64le`) for input and output.
    #[arg(long)]
    format: Option<SeriesFormat>,
}

#[derive(Args)]
struct SliceArgs {
    #[command(flatten)]
    io: SeriesInOut,
    /// Window start (RFC3339 UTC or `+seconds`).
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    /// Window end, exclusive (RFC3339 UTC or `+seconds`).
    #[arg(long, allow_hyphen_values = true)]
    end: String,
}

#[derive(Args, Clone, Copy)]
struct StftFlags {
    /// Window length in samples [config: 1024].
    #[arg(long)]
    window: Option<usize>,
    /// Overlap between windows in samples [config: 512].
    #[arg(long)]
    overlap: Option<usize>,
    /// FFT length, a power of two >= window [config: 1024].
    #[arg(long)]
    nfft: Option<usize>,
}

#[derive(Args)]
struct SpectrogramArgs {
    /// Input time series (csv or raw-f64le).
    #[arg(long, short)]
    input: PathBuf,
    /// Output spectrogram: raw little-endian f64, column-major, with a `<file>.json` sidecar.
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long)]
    format: Option<SeriesFormat>,
    #[command(flatten)]
    stft: StftFlags,
    /// Also write `t f dB` triples for gnuplot pm3d.
    #[arg(long, value_name = "FILE")]
    gnuplot: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturizeArgs {
    /// Spectrogram whose bins all get --label.
    #[arg(long, conflicts_with_all = ["pos", "neg"], requires = "label")]
    spectrogram: Option<PathBuf>,
    /// Label for --spectrogram: `+1`, `-1` or `0` (unlabelled).
    #[arg(long, allow_hyphen_values = true)]
    label: Option<String>,
    /// Spectrogram(s) of the noise-present class (+1).
    #[arg(long)]
    pos: Vec<PathBuf>,
    /// Spectrogram(s) of the noise-absent class (-1).
    #[arg(long)]
    neg: Vec<PathBuf>,
    /// 1-based inclusive row band `start:end` [config: 3:202].
    #[arg(long)]
    band: Option<String>,
    /// Output sparse pattern file (`<label> <idx>:<value> ...`).
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ScaleArgs {
    /// Sparse pattern file to scale.
    #[arg(long, short)]
    input: PathBuf,
    /// Scaled output pattern file.
    #[arg(long, short)]
    output: PathBuf,
    /// Lower target bound [config: -1].
    #[arg(long, short = 'l', allow_hyphen_values = true)]
    lower: Option<f64>,
    /// Upper target bound [config: 1].
    #[arg(long, short = 'u', allow_hyphen_values = true)]
    upper: Option<f64>,
    /// Fit on the input and save the range file here.
    #[arg(long, short = 's', conflicts_with = "restore_range", required_unless_present = "restore_range")]
    save_range: Option<PathBuf>,
    /// Apply a previously saved range file instead of fitting.
    #[arg(long, short = 'r')]
    restore_range: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct SvmFlags {
    /// Penalty C [config: 1].
    #[arg(long, short)]
    c: Option<f64>,
    /// Kernel width gamma [config, else 1/n_features].
    #[arg(long, short)]
    gamma: Option<f64>,
    /// Kernel: linear, polynomial, rbf or sigmoid [config: rbf].
    #[arg(long, short)]
    kernel: Option<KernelKind>,
}

#[derive(Args)]
struct TrainArgs {
    /// Labelled sparse pattern file, normally scaled.
    #[arg(long, short)]
    input: PathBuf,
    /// Output model [default: <input>.model].
    #[arg(long, short)]
    model: Option<PathBuf>,
    #[command(flatten)]
    svm: SvmFlags,
}

#[derive(Args)]
struct CvArgs {
    /// Labelled sparse pattern file.
    #[arg(long, short)]
    input: PathBuf,
    /// Number of folds [config: 5].
    #[arg(long)]
    k: Option<usize>,
    /// Fold shuffle seed [config: cv.shuffle_seed].
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    svm: SvmFlags,
}

#[derive(Args)]
struct GridArgs {
    /// Labelled sparse pattern file.
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// log2(C) range `start,stop,step` [config: -5,15,2].
    #[arg(long, allow_hyphen_values = true)]
    log2c: Option<Log2Range>,
    /// log2(gamma) range `start,stop,step` [config: -15,3,2].
    #[arg(long, allow_hyphen_values = true)]
    log2g: Option<Log2Range>,
    /// Kernel for every cell [config: rbf].
    #[arg(long)]
    kernel: Option<KernelKind>,
    /// Result CSV `C,gamma,accuracy` [default: <train>.grid.csv].
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write `log2C log2gamma accuracy` blocks for gnuplot.
    #[arg(long, value_name = "FILE")]
    gnuplot: Option<PathBuf>,
    /// Train on all patterns at the best cell and save the model here.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Sparse pattern file, scaled with the training range.
    test: PathBuf,
    /// Model file.
    model: PathBuf,
    /// Output: one predicted label (`1` or `-1`) per line.
    output: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Spectrogram to classify.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    spectrogram: Option<PathBuf>,
    /// Time series to classify (its spectrogram is computed with the configured layout).
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<SeriesFormat>,
    #[arg(long, short)]
    model: PathBuf,
    /// Range file saved when scaling the training patterns.
    #[arg(long, short)]
    range: PathBuf,
    /// 1-based inclusive row band `start:end` [config: 3:202].
    #[arg(long)]
    band: Option<String>,
    /// Writes `<prefix>.json`, `<prefix>.spectrogram.dat` and `<prefix>.labels.dat`.
    #[arg(long, short)]
    prefix: PathBuf,
    /// Drop runs shorter than this many bins [config: 1].
    #[arg(long)]
    min_bins: Option<usize>,
    /// Bridge gaps of at most this many clean bins [config: 0].
    #[arg(long)]
    bridge: Option<usize>,
    /// Ground-truth schedule JSON (seconds from record start); prints interval IoU.
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output series; format chosen by extension unless --format is given.
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long)]
    format: Option<SeriesFormat>,
    /// Sampling rate in Hz.
    #[arg(long, default_value_t = 62.5)]
    fs: f64,
    /// Record length in seconds.
    #[arg(long, default_value_t = 7200.0)]
    duration: f64,
    /// Noise seed [config: seed].
    #[arg(long)]
    seed: Option<u64>,
    /// Pump-on windows `a:b,c:d` in seconds from the start.
    #[arg(long, default_value = "", conflicts_with = "schedule_file")]
    schedule: String,
    /// Pump-on windows as schedule JSON (`{"windows": [[a, b], ...]}`).
    #[arg(long, value_name = "FILE")]
    schedule_file: Option<PathBuf>,
    /// Ground-truth output [default: schedule.json beside the series].
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = PumpSpec::default().fundamental)]
    fundamental: f64,
    #[arg(long, default_value_t = PumpSpec::default().n_harmonics)]
    harmonics: u32,
    /// Per-harmonic amplitude (tremor has unit RMS).
    #[arg(long, default_value_t = PumpSpec::default().amplitude)]
    amplitude: f64,
    /// Relative amplitude jitter, redrawn every second.
    #[arg(long, default_value_t = PumpSpec::default().jitter)]
    jitter: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pumpnoise: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::Slice(a) => cmd_slice(a),
        Command::Downsample(a) => cmd_downsample(a),
        Command::Spectrogram(a) => cmd_spectrogram(&cfg, a),
        Command::Featurize(a) => cmd_featurize(&cfg, a),
        Command::Scale(a) => cmd_scale(&cfg, a),
        Command::Train(a) => cmd_train(&cfg, a),
        Command::Cv(a) => cmd_cv(&cfg, a),
        Command::Grid(a) => cmd_grid(&cfg, a),
        Command::Predict(a) => cmd_predict(a),
        Command::Detect(a) => cmd_detect(&cfg, a),
        Command::Synth(a) => cmd_synth(&cfg, a),
        Command::Config => Ok(cfg.to_json().trim_end().to_string()),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn series_format(path: &Path, forced: Option<SeriesFormat>) -> SeriesFormat {
    forced.unwrap_or_else(|| SeriesFormat::from_path(path))
}

fn load_series(path: &Path, forced: Option<SeriesFormat>) -> Result<TimeSeries> {
    TimeSeries::load(path, series_format(path, forced))
}

fn parse_instant(s: &str, ts: &TimeSeries) -> Result<UtcTime> {
    match s.strip_prefix('+') {
        Some(secs) => {
            let secs: f64 = secs.parse().map_err(|_| invalid(format!("bad offset {s:?}")))?;
            Ok(ts.start_time().add_seconds(secs))
        }
        None => s.parse(),
    }
}

fn parse_band(s: Option<&str>, cfg: &PipelineConfig) -> Result<BandSelect> {
    let Some(s) = s else {
        return Ok(cfg.band);
    };
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("band {s:?} is not start:end")))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| invalid(format!("bad band row {v:?}")));
    BandSelect::new(parse(a)?, parse(b)?)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let io = |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
    body(&mut w).and_then(|_| w.flush()).map_err(io)
}

fn cmd_slice(a: SliceArgs) -> Result<String> {
    let ts = load_series(&a.io.input, a.io.format)?;
    let (start, end) = (parse_instant(&a.start, &ts)?, parse_instant(&a.end, &ts)?);
    let cut = ts.slice_utc(start, end)?;
    cut.save(&a.io.output, series_format(&a.io.output, a.io.format))?;
    Ok(format!(
        "sliced {} samples from {} to {}",
        cut.len(),
        cut.start_time(),
        cut.end_time()
    ))
}

fn cmd_downsample(a: SeriesInOut) -> Result<String> {
    let ts = load_series(&a.input, a.format)?;
    let half = ts.downsample_half()?;
    half.save(&a.output, series_format(&a.output, a.format))?;
    Ok(format!(
        "downsampled {} samples at {} Hz to {} samples at {} Hz",
        ts.len(),
        ts.fs(),
        half.len(),
        half.fs()
    ))
}

fn stft_layout(cfg: &PipelineConfig, flags: StftFlags) -> pumpnoise::config::StftLayout {
    let mut layout = cfg.stft;
    layout.window_len = flags.window.unwrap_or(layout.window_len);
    layout.overlap = flags.overlap.unwrap_or(layout.overlap);
    layout.nfft = flags.nfft.unwrap_or(layout.nfft);
    layout
}

fn cmd_spectrogram(cfg: &PipelineConfig, a: SpectrogramArgs) -> Result<String> {
    let ts = load_series(&a.input, a.format)?;
    let params = stft_layout(cfg, a.stft).params(ts.fs())?;
    let spec = stft_psd(&ts, &params)?;
    spec.save(&a.output)?;
    if let Some(path) = &a.gnuplot {
        spec.save_gnuplot(path)?;
    }
    Ok(format!(
        "spectrogram {} rows x {} bins (hop {} s)",
        spec.rows(),
        spec.n_bins(),
        params.hop_seconds()
    ))
}

fn band_patterns(path: &Path, band: &BandSelect) -> Result<FeatureMatrix> {
    let spec = Spectrogram::<f64>::load(path)?;
    normalize_unit_sum(&extract_band_patterns(&spec, band)?)
}

fn cmd_featurize(cfg: &PipelineConfig, a: FeaturizeArgs) -> Result<String> {
    let band = parse_band(a.band.as_deref(), cfg)?;
    let patterns = if let Some(path) = &a.spectrogram {
        let fm = band_patterns(path, &band)?;
        match a.label.as_deref().map(str::trim) {
            Some("+1" | "1") => fm.labelled(Label::Positive),
            Some("-1") => fm.labelled(Label::Negative),
            Some("0") => fm,
            other => return Err(invalid(format!("label must be +1, -1 or 0, got {other:?}"))),
        }
    } else {
        if a.pos.is_empty() || a.neg.is_empty() {
            return Err(invalid("give --spectrogram with --label, or both --pos and --neg"));
        }
        let gather = |paths: &[PathBuf], label| -> Result<FeatureMatrix> {
            let mut rows = Vec::new();
            for p in paths {
                let fm = band_patterns(p, &band)?;
                rows.extend(fm.patterns().map(<[f64]>::to_vec));
            }
            Ok(FeatureMatrix::from_rows(&rows)?.labelled(label))
        };
        stack_labeled(&gather(&a.pos, Label::Positive)?, &gather(&a.neg, Label::Negative)?)?
    };
    save_sparse(&patterns, &a.output)?;
    Ok(format!(
        "wrote {} patterns of {} features",
        patterns.n_patterns(),
        patterns.n_features()
    ))
}

fn cmd_scale(cfg: &PipelineConfig, a: ScaleArgs) -> Result<String> {
    let (range, data) = match &a.restore_range {
        Some(path) => {
            let range = load_range::<f64>(path)?;
            if a.lower.is_some() || a.upper.is_some() {
                return Err(invalid("--lower/--upper come from the restored range file"));
            }
            (range.clone(), load_sparse::<f64>(&a.input, Some(range.n_features()))?)
        }
        None => {
            let data = load_sparse::<f64>(&a.input, None)?;
            let lower = a.lower.unwrap_or(cfg.scale_lower);
            let upper = a.upper.unwrap_or(cfg.scale_upper);
            let range = fit_scale(&data, lower, upper)?;
            let path = a.save_range.as_ref().expect("clap requires a range flag");
            save_range(&range, path)?;
            (range, data)
        }
    };
    let scaled = apply_scale(&data, &range)?;
    save_sparse(&scaled, &a.output)?;
    Ok(format!(
        "scaled {} patterns of {} features to [{}, {}]",
        scaled.n_patterns(),
        scaled.n_features(),
        range.lower,
        range.upper
    ))
}

fn effective_config(cfg: &PipelineConfig, kernel: Option<KernelKind>) -> PipelineConfig {
    let mut cfg = cfg.clone();
    if let Some(k) = kernel {
        cfg.kernel = k;
    }
    cfg
}

fn load_labelled(path: &Path) -> Result<FeatureMatrix> {
    let data = load_sparse::<f64>(path, None)?;
    data.require_labels()?;
    Ok(data)
}

fn cmd_train(cfg: &PipelineConfig, a: TrainArgs) -> Result<String> {
    let data = load_labelled(&a.input)?;
    let cfg = effective_config(cfg, a.svm.kernel);
    let tc = cfg.train_config::<f64>(data.n_features(), a.svm.c.unwrap_or(cfg.c), a.svm.gamma)?;
    let model = train(&data, &tc)?;
    let path = a.model.unwrap_or_else(|| with_suffix(&a.input, ".model"));
    save_model(&model, &path)?;
    Ok(format!(
        "trained on {} patterns: {} support vectors, model {}",
        data.n_patterns(),
        model.n_support(),
        path.display()
    ))
}

fn cmd_cv(cfg: &PipelineConfig, a: CvArgs) -> Result<String> {
    let data = load_labelled(&a.input)?;
    let cfg = effective_config(cfg, a.svm.kernel);
    let tc = cfg.train_config::<f64>(data.n_features(), a.svm.c.unwrap_or(cfg.c), a.svm.gamma)?;
    let report = cross_validate(&data, &tc, &cfg.cv_config(a.k, a.seed))?;
    Ok(format!("Cross Validation Accuracy = {}%", fmt_g(report.accuracy())))
}

fn cmd_grid(cfg: &PipelineConfig, a: GridArgs) -> Result<String> {
    let data = load_labelled(&a.train)?;
    let cfg = effective_config(cfg, a.kernel);
    if !cfg.kernel.uses_gamma() {
        return Err(invalid(format!("the {} kernel has no gamma to search", cfg.kernel)));
    }
    let grid = GridSpec {
        log2c: a.log2c.unwrap_or(cfg.grid.log2c),
        log2gamma: a.log2g.unwrap_or(cfg.grid.log2gamma),
    };
    let base = cfg.train_config::<f64>(data.n_features(), cfg.c, None)?;
    let result = grid_search(&data, &base, &grid, &cfg.cv_config(a.k, a.seed))?;
    let csv = a.output.unwrap_or_else(|| with_suffix(&a.train, ".grid.csv"));
    write_file(&csv, |w| result.write_csv(w))?;
    if let Some(path) = &a.gnuplot {
        write_file(path, |w| result.write_gnuplot(w))?;
    }
    let best = result.best_cell();
    if let Some(path) = &a.model {
        let tc = cfg.train_config::<f64>(data.n_features(), best.c, Some(best.gamma))?;
        save_model(&train(&data, &tc)?, path)?;
    }
    Ok(format!(
        "best C={} gamma={} CV rate={}% ({} cells, {})",
        fmt_g(best.c),
        fmt_g(best.gamma),
        fmt_g(best.accuracy()),
        result.cells.len(),
        csv.display()
    ))
}

/// Read test patterns at the model's width, widening the model if the data is wider.
fn align(test: &Path, model: SvmModel) -> Result<(FeatureMatrix, SvmModel)> {
    match load_sparse::<f64>(test, Some(model.n_features())) {
        Ok(data) => Ok((data, model)),
        Err(Error::DimensionMismatch { .. }) => {
            let data = load_sparse::<f64>(test, None)?;
            let model = model.widen(data.n_features())?;
            Ok((data, model))
        }
        Err(e) => Err(e),
    }
}

fn cmd_predict(a: PredictArgs) -> Result<String> {
    let (data, model) = align(&a.test, load_model(&a.model)?)?;
    let predicted = model.predict_all(&data)?;
    write_file(&a.output, |w| {
        predicted.iter().try_for_each(|l| writeln!(w, "{}", l.value()))
    })?;
    match data.labels() {
        Some(truth) => {
            let correct = truth.iter().zip(&predicted).filter(|(t, p)| t == p).count();
            let total = truth.len();
            let percent = if total == 0 { 0.0 } else { 100.0 * correct as f64 / total as f64 };
            Ok(format!("Accuracy = {}% ({correct}/{total})", fmt_g(percent)))
        }
        None => Ok(format!("predicted {} patterns", predicted.len())),
    }
}

fn cmd_detect(cfg: &PipelineConfig, a: DetectArgs) -> Result<String> {
    let spec = match (&a.spectrogram, &a.input) {
        (Some(path), _) => Spectrogram::<f64>::load(path)?,
        (None, Some(path)) => {
            let ts = load_series(path, a.format)?;
            stft_psd(&ts, &cfg.stft.params(ts.fs())?)?
        }
        (None, None) => return Err(invalid("give --spectrogram or --input")),
    };
    let band = parse_band(a.band.as_deref(), cfg)?;
    let model = load_model::<f64>(&a.model)?;
    let model = if model.n_features() < band.width() {
        model.widen(band.width())?
    } else {
        model
    };
    let range = load_range::<f64>(&a.range)?;
    let track = classify_bins(&model, &range, &spec, &band)?;
    let report = activity_intervals(
        &track,
        a.min_bins.unwrap_or(cfg.min_bins),
        a.bridge.unwrap_or(cfg.bridge_gap_bins),
    )?;
    let files = emit_report(&report, &track, &spec, &a.model, &a.range, &a.prefix)?;
    let mut summary = format!(
        "{:.4}% of {} bins free of pump noise, {} intervals, report {}",
        report.percent_absent,
        report.n_bins,
        report.intervals.len(),
        files.report.display()
    );
    if let Some(path) = &a.truth {
        let truth = load_schedule(path)?;
        let start = spec.start_time();
        let truth: Vec<Interval> = truth
            .windows
            .iter()
            .map(|&(s, e)| Interval {
                start: start.add_seconds(s),
                end: start.add_seconds(e),
            })
            .collect();
        summary.push_str(&format!(", IoU {:.4}", intervals_iou(&report.intervals, &truth)));
    }
    Ok(summary)
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let raw: Schedule = serde_json::from_str(&text).map_err(|e| Error::Parse {
        source_name: path.display().to_string(),
        location: format!("line {}", e.line()),
        message: e.to_string(),
    })?;
    Schedule::new(raw.windows)
}

fn cmd_synth(cfg: &PipelineConfig, a: SynthArgs) -> Result<String> {
    let schedule = match &a.schedule_file {
        Some(path) => load_schedule(path)?,
        None => Schedule::parse_list(&a.schedule)?,
    };
    let pump = PumpSpec {
        fundamental: a.fundamental,
        n_harmonics: a.harmonics,
        amplitude: a.amplitude,
        jitter: a.jitter,
    };
    let (ts, truth) = gen_mixed::<f64>(a.fs, a.duration, &pump, &schedule, a.seed.unwrap_or(cfg.seed))?;
    ts.save(&a.output, series_format(&a.output, a.format))?;
    let truth_path = a.truth.unwrap_or_else(|| {
        a.output
            .parent()
            .map(|p| p.join("schedule.json"))
            .unwrap_or_else(|| PathBuf::from("schedule.json"))
    });
    let json = serde_json::to_string_pretty(&truth).expect("schedule serializes") + "\n";
    fs::write(&truth_path, json).map_err(|e| Error::Io {
        path: truth_path.clone(),
        source: e,
    })?;
    Ok(format!(
        "synthesised {} samples at {} Hz, pump on for {} s, truth {}",
        ts.len(),
        ts.fs(),
        truth.total_seconds(),
        truth_path.display()
    ))
}
