//! Truth-table and spectrum file format.
//!
//! Header line `n=<int> kind=<indicator|signed|real>`, with the extra token
//! `spectrum` for coefficient files, followed by `2^n` whitespace-separated
//! values in index order. Values are printed in Rust's shortest
//! round-trip-exact form, so dyadic tables survive a write/read cycle
//! bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::function::{BooleanFunction, FunctionKind};
use crate::spectrum::Spectrum;
use crate::{Error, Result};

const VALUES_PER_LINE: usize = 8;

fn render(n: usize, kind: FunctionKind, spectrum: bool, values: &[f64]) -> String {
    let mut out = String::new();
    write!(out, "n={n} kind={}", kind.as_str()).unwrap();
    if spectrum {
        out.push_str(" spectrum");
    }
    out.push('\n');
    for chunk in values.chunks(VALUES_PER_LINE) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_function(f: &BooleanFunction) -> String {
    render(f.n(), f.kind(), false, f.table())
}

/// Renders a spectrum; `kind` records the class of the source function.
pub fn render_spectrum(sp: &Spectrum, kind: FunctionKind) -> String {
    render(sp.n(), kind, true, sp.coeffs())
}

struct Parsed {
    n: usize,
    kind: FunctionKind,
    spectrum: bool,
    values: Vec<f64>,
}

fn parse(text: &str) -> Result<Parsed> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("empty truth-table file"))?;
    let mut n = None;
    let mut kind = None;
    let mut spectrum = false;
    for token in header.split_whitespace() {
        if let Some(v) = token.strip_prefix("n=") {
            n = Some(
                v.parse::<usize>()
                    .map_err(|e| Error::parse(format!("bad n: {e}")))?,
            );
        } else if let Some(v) = token.strip_prefix("kind=") {
            kind = Some(v.parse::<FunctionKind>()?);
        } else if token == "spectrum" {
            spectrum = true;
        } else {
            return Err(Error::parse(format!("unexpected header token `{token}`")));
        }
    }
    let n = n.ok_or_else(|| Error::parse("header missing n=<int>"))?;
    let kind = kind.ok_or_else(|| Error::parse("header missing kind=<...>"))?;

    let rest = lines.collect::<Vec<_>>().join(" ");
    let values: Vec<f64> = rest
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| Error::parse(format!("bad value `{tok}`: {e}")))
        })
        .collect::<Result<_>>()?;
    if n == 0 || n > crate::MAX_N {
        return Err(Error::parse(format!("n={n} outside 1..={}", crate::MAX_N)));
    }
    if values.len() != 1usize << n {
        return Err(Error::parse(format!(
            "expected {} values for n={n}, found {}",
            1usize << n,
            values.len()
        )));
    }
    Ok(Parsed {
        n,
        kind,
        spectrum,
        values,
    })
}

pub fn parse_function(text: &str) -> Result<BooleanFunction> {
    let p = parse(text)?;
    if p.spectrum {
        return Err(Error::parse(
            "file holds a spectrum; use parse_spectrum_text",
        ));
    }
    BooleanFunction::new(p.n, p.kind, p.values)
}

/// Returns the spectrum together with the recorded source kind.
pub fn parse_spectrum_text(text: &str) -> Result<(Spectrum, FunctionKind)> {
    let p = parse(text)?;
    if !p.spectrum {
        return Err(Error::parse("file holds a truth table, not a spectrum"));
    }
    Ok((Spectrum::from_coeffs(p.n, p.values)?, p.kind))
}

pub fn write_function(path: &Path, f: &BooleanFunction) -> Result<()> {
    std::fs::write(path, render_function(f)).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_function(path: &Path) -> Result<BooleanFunction> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_function(&text)
}

pub fn write_spectrum(path: &Path, sp: &Spectrum, kind: FunctionKind) -> Result<()> {
    std::fs::write(path, render_spectrum(sp, kind))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_spectrum(path: &Path) -> Result<(Spectrum, FunctionKind)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_spectrum_text(&text)
}
