//! Text interchange formats shared with the classic SVM command-line tools:
//! sparse pattern files (`<label> <idx>:<value> ...`) and scaling range files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label, ScaleRange};
use crate::scalar::{fmt_real, Scalar};

/// Parse one `idx:value` token list (1-based, strictly ascending).
pub(crate) fn parse_sparse_tokens<'a, F: Scalar>(
    tokens: impl Iterator<Item = &'a str>,
    name: &str,
    lineno: usize,
) -> Result<Vec<(usize, F)>> {
    let mut out: Vec<(usize, F)> = Vec::new();
    for tok in tokens {
        let loc = format!("line {lineno}");
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(name, &loc, format!("expected idx:value, got {tok:?}")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::parse(name, &loc, format!("bad index {idx:?}")))?;
        if idx == 0 {
            return Err(Error::parse(name, &loc, "indices are 1-based"));
        }
        let val: F = val
            .parse()
            .map_err(|_| Error::parse(name, &loc, format!("bad value {val:?}")))?;
        if !val.is_finite() {
            return Err(Error::parse(name, &loc, format!("non-finite value {val}")));
        }
        if out.last().is_some_and(|&(prev, _)| idx <= prev) {
            return Err(Error::parse(name, &loc, "indices not ascending"));
        }
        out.push((idx, val));
    }
    Ok(out)
}

pub(crate) fn write_sparse_row<F: Scalar>(w: &mut impl Write, row: &[F]) -> std::io::Result<()> {
    for (i, &x) in row.iter().enumerate() {
        if !x.is_zero() {
            write!(w, " {}:{}", i + 1, fmt_real(x))?;
        }
    }
    Ok(())
}

/// Write one pattern per line; unlabelled matrices use the label `0`.
pub fn write_sparse<F: Scalar>(fm: &FeatureMatrix<F>, w: &mut impl Write) -> std::io::Result<()> {
    for (i, row) in fm.patterns().enumerate() {
        let label = fm.labels().map_or("0", |l| l[i].as_token());
        w.write_all(label.as_bytes())?;
        write_sparse_row(w, row)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Parse a sparse pattern file.
///
/// The feature count is the largest index seen, widened to `n_features` when
/// given (trailing all-zero features leave no trace in the text). A file whose
/// labels are all `0` reads back unlabelled.
pub fn read_sparse<F: Scalar>(text: &str, name: &str, n_features: Option<usize>) -> Result<FeatureMatrix<F>> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut tokens = line.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(name, format!("line {lineno}"), format!("bad label {label_tok:?}")))?;
        let label = match label {
            1.0 => Some(Label::Positive),
            -1.0 => Some(Label::Negative),
            0.0 => None,
            _ => {
                return Err(Error::parse(
                    name,
                    format!("line {lineno}"),
                    format!("label must be +1, -1 or 0, got {label_tok}"),
                ))
            }
        };
        let entries = parse_sparse_tokens::<F>(tokens, name, lineno)?;
        if let Some(&(last, _)) = entries.last() {
            width = width.max(last);
        }
        rows.push(entries);
        labels.push(label);
    }
    if let Some(n) = n_features {
        if width > n {
            return Err(Error::DimensionMismatch { expected: n, found: width });
        }
        width = n;
    }
    let mut data = vec![F::zero(); rows.len() * width];
    for (r, entries) in rows.iter().enumerate() {
        for &(idx, v) in entries {
            data[r * width + idx - 1] = v;
        }
    }
    let fm = FeatureMatrix::new(data, width)?;
    let labelled = labels.iter().filter(|l| l.is_some()).count();
    if labelled == 0 {
        Ok(fm)
    } else if labelled == labels.len() {
        fm.with_labels(labels.into_iter().flatten().collect())
    } else {
        Err(Error::parse(name, "labels", "mix of labelled (+1/-1) and unlabelled (0) patterns"))
    }
}

pub fn save_sparse<F: Scalar>(fm: &FeatureMatrix<F>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_sparse(fm, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_sparse<F: Scalar>(path: impl AsRef<Path>, n_features: Option<usize>) -> Result<FeatureMatrix<F>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_sparse(&text, &path.display().to_string(), n_features)
}

/// Range file: `x`, then `<lower> <upper>`, then `<idx> <min> <max>` per feature.
pub fn write_range<F: Scalar>(range: &ScaleRange<F>, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "x")?;
    writeln!(w, "{} {}", fmt_real(range.lower), fmt_real(range.upper))?;
    for (i, (lo, hi)) in range.mins.iter().zip(&range.maxs).enumerate() {
        writeln!(w, "{} {} {}", i + 1, fmt_real(*lo), fmt_real(*hi))?;
    }
    Ok(())
}

/// Parse a range file. Features missing from the listing are treated as
/// constant zero, which scales them to 0.
pub fn read_range<F: Scalar>(text: &str, name: &str) -> Result<ScaleRange<F>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "x" => {}
        Some((i, _)) => return Err(Error::parse(name, format!("line {}", i + 1), "expected `x`")),
        None => return Err(Error::parse(name, "line 1", "empty range file")),
    }
    let (i, bounds) = lines
        .next()
        .ok_or_else(|| Error::parse(name, "line 2", "missing `<lower> <upper>`"))?;
    let nums = parse_numbers::<F>(bounds, name, i + 1)?;
    let [lower, upper] = nums[..] else {
        return Err(Error::parse(name, format!("line {}", i + 1), "expected `<lower> <upper>`"));
    };
    let mut entries: Vec<(usize, F, F)> = Vec::new();
    for (i, line) in lines {
        let loc = format!("line {}", i + 1);
        let mut it = line.split_whitespace();
        let idx: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .filter(|&idx| idx > 0)
            .ok_or_else(|| Error::parse(name, &loc, "bad feature index"))?;
        let rest: Vec<&str> = it.collect();
        let nums = parse_numbers::<F>(&rest.join(" "), name, i + 1)?;
        let [lo, hi] = nums[..] else {
            return Err(Error::parse(name, loc, "expected `<idx> <min> <max>`"));
        };
        if entries.last().is_some_and(|&(prev, _, _)| idx <= prev) {
            return Err(Error::parse(name, loc, "indices not ascending"));
        }
        entries.push((idx, lo, hi));
    }
    let width = entries.last().map_or(0, |e| e.0);
    let mut mins = vec![F::zero(); width];
    let mut maxs = vec![F::zero(); width];
    for (idx, lo, hi) in entries {
        mins[idx - 1] = lo;
        maxs[idx - 1] = hi;
    }
    ScaleRange::new(lower, upper, mins, maxs)
}

fn parse_numbers<F: Scalar>(line: &str, name: &str, lineno: usize) -> Result<Vec<F>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<F>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(name, format!("line {lineno}"), format!("bad number {t:?}")))
        })
        .collect()
}

pub fn save_range<F: Scalar>(range: &ScaleRange<F>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_range(range, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_range<F: Scalar>(path: impl AsRef<Path>) -> Result<ScaleRange<F>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_range(&text, &path.display().to_string())
}
