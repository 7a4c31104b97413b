//! Flat key=value config files and the small value grammars shared by flags
//! and config entries (noise models, family specs, grids).

use std::collections::BTreeMap;
use std::path::Path;

use cubesense_core::families::{
    make_family, make_tribes_sized, runs_median_threshold, FamilySpec,
};
use cubesense_core::function::BooleanFunction;
use cubesense_core::majority::WeightedMajority;
use cubesense_core::noise::NoiseModel;
use cubesense_core::{Error, Result};

/// Parses `key=value` lines; blank lines and `#` comments are ignored.
/// Unknown keys are rejected by the subcommand that consumes the map.
pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::parse(format!("{}:{}: expected key=value", path.display(), idx + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// `{bernoulli: 0.1}` or `{fixed: 12}`.
pub fn parse_noise(text: &str) -> Result<NoiseModel> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::parse(format!("noise spec `{text}` must be {{kind: value}}")))?;
    let (kind, value) = inner
        .split_once(':')
        .ok_or_else(|| Error::parse(format!("noise spec `{text}` missing `:`")))?;
    match kind.trim() {
        "bernoulli" => {
            let eps: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::parse(format!("bad bernoulli rate: {e}")))?;
            Ok(NoiseModel::Bernoulli(eps))
        }
        "fixed" => {
            let q: usize = value
                .trim()
                .parse()
                .map_err(|e| Error::parse(format!("bad fixed flip count: {e}")))?;
            Ok(NoiseModel::FixedSize(q))
        }
        other => Err(Error::parse(format!("unknown noise kind `{other}`"))),
    }
}

/// Family specs as compact strings:
/// `dictator:N`, `parity:N`, `majority:N`, `tribes:N` (sized for balance,
/// leftover variables as dummies), `tribes:TxS` (explicit), `recmaj:DEPTH`,
/// `runs:N` (median threshold), `runs:N:T` (explicit threshold).
pub fn build_family(text: &str) -> Result<BooleanFunction> {
    if let Some(arg) = text.strip_prefix("tribes:") {
        if !arg.contains('x') {
            let n: usize = arg
                .parse()
                .map_err(|e| Error::parse(format!("bad tribes n: {e}")))?;
            return make_tribes_sized(n);
        }
    }
    make_family(&parse_family(text)?)
}

fn parse_family(text: &str) -> Result<FamilySpec> {
    let mut parts = text.split(':');
    let kind = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    let usize_arg = |idx: usize, what: &str| -> Result<usize> {
        rest.get(idx)
            .ok_or_else(|| Error::parse(format!("family `{text}` missing {what}")))?
            .parse()
            .map_err(|e| Error::parse(format!("family `{text}`: bad {what}: {e}")))
    };
    match kind {
        "dictator" => Ok(FamilySpec::Dictator { n: usize_arg(0, "n")? }),
        "parity" => Ok(FamilySpec::Parity { n: usize_arg(0, "n")? }),
        "majority" => Ok(FamilySpec::Majority { n: usize_arg(0, "n")? }),
        "tribes" => {
            let arg = rest
                .first()
                .ok_or_else(|| Error::parse(format!("family `{text}` missing size")))?;
            let (t, s) = arg
                .split_once('x')
                .ok_or_else(|| Error::parse(format!("family `{text}`: expected TxS")))?;
            Ok(FamilySpec::Tribes {
                tribe_count: t
                    .parse()
                    .map_err(|e| Error::parse(format!("bad tribe count: {e}")))?,
                tribe_size: s
                    .parse()
                    .map_err(|e| Error::parse(format!("bad tribe size: {e}")))?,
            })
        }
        "recmaj" => Ok(FamilySpec::RecursiveMajority3 {
            depth: usize_arg(0, "depth")? as u32,
        }),
        "runs" => {
            let n = usize_arg(0, "n")?;
            let threshold = match rest.get(1) {
                Some(t) => Some(
                    t.parse::<u32>()
                        .map_err(|e| Error::parse(format!("bad runs threshold: {e}")))?,
                ),
                None => Some(runs_median_threshold(n)?),
            };
            Ok(FamilySpec::Runs { n, threshold })
        }
        other => Err(Error::parse(format!("unknown family kind `{other}`"))),
    }
}

/// One real per line, as accepted by `--weights`.
pub fn load_weights(path: &Path) -> Result<WeightedMajority> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let weights: Vec<f64> = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| Error::parse(format!("bad weight `{tok}`: {e}")))
        })
        .collect::<Result<_>>()?;
    WeightedMajority::new(weights, 0.0)
}

/// Comma-separated reals, e.g. `0.05,0.1,0.2`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(format!("bad grid entry `{tok}`: {e}")))
        })
        .collect()
}
