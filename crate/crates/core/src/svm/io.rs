//! Model text file in the layout used by the classic SVM tools:
//! a `key value` header, a line `SV`, then `<coef> <idx>:<value> ...` per
//! support vector. `rho` is the negated bias.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{fmt_real, Scalar};
use crate::sparse::{parse_sparse_tokens, write_sparse_row};

use super::kernel::{KernelKind, KernelSpec};
use super::model::SvmModel;

pub fn write_model<F: Scalar>(model: &SvmModel<F>, w: &mut impl Write) -> std::io::Result<()> {
    let k = &model.kernel;
    writeln!(w, "svm_type c_svc")?;
    writeln!(w, "kernel_type {}", k.kind)?;
    if k.kind == KernelKind::Polynomial {
        writeln!(w, "degree {}", k.degree)?;
    }
    if k.kind.uses_gamma() {
        writeln!(w, "gamma {}", fmt_real(k.gamma))?;
    }
    if k.kind.uses_coef0() {
        writeln!(w, "coef0 {}", fmt_real(k.coef0))?;
    }
    let (pos, neg) = model.n_support_per_class();
    writeln!(w, "nr_class 2")?;
    writeln!(w, "total_sv {}", model.n_support())?;
    writeln!(w, "rho {}", fmt_real(-model.bias))?;
    writeln!(w, "label 1 -1")?;
    writeln!(w, "nr_sv {pos} {neg}")?;
    writeln!(w, "SV")?;
    for (j, &c) in model.sv_coef().iter().enumerate() {
        write!(w, "{}", fmt_real(c))?;
        write_sparse_row(w, model.support_vector(j))?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn save_model<F: Scalar>(model: &SvmModel<F>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_model(model, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_model<F: Scalar>(path: impl AsRef<Path>) -> Result<SvmModel<F>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_model(&text, &path.display().to_string())
}

/// Parse a model file. The feature count is the largest index among the
/// support vectors; see [`SvmModel::widen`].
pub fn read_model<F: Scalar>(text: &str, name: &str) -> Result<SvmModel<F>> {
    let mut lines = text.lines().enumerate();
    let mut kind = None;
    let mut gamma = None;
    let mut coef0 = None;
    let mut degree = None;
    let mut total_sv = None;
    let mut rho = None;
    let mut flipped = false;
    let num = |v: &str, loc: &str| -> Result<F> {
        v.parse::<F>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::parse(name, loc, format!("bad number {v:?}")))
    };
    loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::parse(name, "end of file", "missing `SV` section"));
        };
        let loc = format!("line {}", i + 1);
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "SV" {
            break;
        }
        let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let value = value.trim();
        match key {
            "svm_type" if value == "c_svc" => {}
            "svm_type" => return Err(Error::parse(name, loc, format!("unsupported svm_type {value:?}"))),
            "kernel_type" => {
                kind = Some(
                    value
                        .parse::<KernelKind>()
                        .map_err(|_| Error::parse(name, &loc, format!("unknown kernel {value:?}")))?,
                )
            }
            "gamma" => gamma = Some(num(value, &loc)?),
            "coef0" => coef0 = Some(num(value, &loc)?),
            "degree" => {
                degree = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| Error::parse(name, &loc, format!("bad degree {value:?}")))?,
                )
            }
            "nr_class" if value == "2" => {}
            "nr_class" => return Err(Error::parse(name, loc, "only binary models are supported")),
            "total_sv" => {
                total_sv = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::parse(name, &loc, format!("bad total_sv {value:?}")))?,
                )
            }
            "rho" => rho = Some(num(value, &loc)?),
            "label" => {
                let labels: Vec<&str> = value.split_whitespace().collect();
                flipped = match labels[..] {
                    ["1", "-1"] | ["+1", "-1"] => false,
                    ["-1", "1"] | ["-1", "+1"] => true,
                    _ => return Err(Error::parse(name, loc, format!("labels must be 1 and -1, got {value:?}"))),
                };
            }
            // recomputed from the coefficient signs
            "nr_sv" => {}
            other => return Err(Error::parse(name, loc, format!("unknown header key {other:?}"))),
        }
    }
    let kind = kind.ok_or_else(|| Error::parse(name, "header", "missing kernel_type"))?;
    let mut kernel = KernelSpec {
        kind,
        gamma: F::one(),
        coef0: F::zero(),
        degree: 1,
    };
    if kind.uses_gamma() {
        kernel.gamma = gamma.ok_or_else(|| Error::parse(name, "header", format!("{kind} kernel needs gamma")))?;
    }
    if kind.uses_coef0() {
        kernel.coef0 = coef0.ok_or_else(|| Error::parse(name, "header", format!("{kind} kernel needs coef0")))?;
    }
    if kind == KernelKind::Polynomial {
        kernel.degree = degree.ok_or_else(|| Error::parse(name, "header", "polynomial kernel needs degree"))?;
    }
    let rho = rho.ok_or_else(|| Error::parse(name, "header", "missing rho"))?;
    let total_sv = total_sv.ok_or_else(|| Error::parse(name, "header", "missing total_sv"))?;

    let mut entries = Vec::with_capacity(total_sv);
    let mut coefs = Vec::with_capacity(total_sv);
    let mut width = 0;
    for (i, line) in lines {
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else {
            continue;
        };
        let loc = format!("line {}", i + 1);
        let coef = num(first, &loc)?;
        let sv = parse_sparse_tokens::<F>(tokens, name, i + 1)?;
        if let Some(&(last, _)) = sv.last() {
            width = width.max(last);
        }
        coefs.push(if flipped { -coef } else { coef });
        entries.push(sv);
    }
    if entries.len() != total_sv {
        return Err(Error::parse(
            name,
            "SV",
            format!("total_sv is {total_sv} but {} support vectors follow", entries.len()),
        ));
    }
    let width = width.max(1);
    let svs: Vec<Vec<F>> = entries
        .into_iter()
        .map(|sv| {
            let mut dense = vec![F::zero(); width];
            for (idx, v) in sv {
                dense[idx - 1] = v;
            }
            dense
        })
        .collect();
    let bias = if flipped { rho } else { -rho };
    SvmModel::new(kernel, &svs, &coefs, bias).map_err(|e| Error::parse(name, "SV", e.to_string()))
}
