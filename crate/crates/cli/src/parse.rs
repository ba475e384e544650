//! Flag value grammars: lists, signals, targets, sweep ranges.

use std::path::Path;

use qtruncate_core::optimizer::Param;
use qtruncate_core::{expr, Complex64, Occupation, SingleModeInput, TargetPattern};

use crate::CliError;

fn config(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Comma-separated literal expressions.
pub fn real_list(field: &str, input: &str) -> Result<Vec<f64>, CliError> {
    expr::eval_list(input).map_err(|e| config(field, e.to_string()))
}

/// As [`real_list`], with `?` marking a free entry.
pub fn param_list(field: &str, input: &str) -> Result<Vec<Param>, CliError> {
    expr::split_top_level(input)
        .into_iter()
        .map(|item| match item.trim() {
            "?" => Ok(Param::Free),
            s => expr::eval(s)
                .map(Param::Fixed)
                .map_err(|e| config(field, e.to_string())),
        })
        .collect()
}

pub fn count_list(field: &str, input: &str) -> Result<Occupation, CliError> {
    input
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| config(field, format!("`{}` is not a photon count", s.trim())))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Occupation::new)
}

fn parse_usize(field: &str, s: &str) -> Result<usize, CliError> {
    s.trim().parse().map_err(|_| {
        config(
            field,
            format!("`{}` is not a non-negative integer", s.trim()),
        )
    })
}

/// `trunc:D`, `punch:D:K1,K2,…`, `fock:D:K`.
pub fn target(input: &str) -> Result<TargetPattern, CliError> {
    const FIELD: &str = "--target";
    let parts: Vec<&str> = input.split(':').collect();
    let built = match parts.as_slice() {
        ["trunc", d] => TargetPattern::truncation(parse_usize(FIELD, d)?),
        ["punch", d, holes] => {
            let holes = holes
                .split(',')
                .map(|h| parse_usize(FIELD, h))
                .collect::<Result<Vec<_>, _>>()?;
            TargetPattern::punch(parse_usize(FIELD, d)?, &holes)
        }
        ["fock", d, k] => TargetPattern::fock(parse_usize(FIELD, d)?, parse_usize(FIELD, k)?),
        _ => {
            return Err(config(
                FIELD,
                format!("`{input}`: expected trunc:D, punch:D:K1,K2 or fock:D:K"),
            ))
        }
    };
    built.map_err(|e| config(FIELD, e.to_string()))
}

/// `coherent:ALPHA[:CUTOFF]`, `fock:K`, `custom:FILE`.
pub fn signal(input: &str) -> Result<SingleModeInput, CliError> {
    const FIELD: &str = "--signal";
    let (kind, rest) = input.split_once(':').unwrap_or((input, ""));
    match kind {
        "coherent" => {
            let (alpha, cutoff) = match rest.split_once(':') {
                Some((a, c)) => (a, Some(parse_usize(FIELD, c)? as u32)),
                None => (rest, None),
            };
            let alpha = expr::eval(alpha).map_err(|e| config(FIELD, e.to_string()))?;
            Ok(SingleModeInput::Coherent {
                alpha: Complex64::new(alpha, 0.0),
                cutoff,
            })
        }
        "fock" => Ok(SingleModeInput::Fock(parse_usize(FIELD, rest)? as u32)),
        "custom" => custom_signal(Path::new(rest)),
        _ => Err(config(
            FIELD,
            format!("`{input}`: expected coherent:ALPHA[:CUTOFF], fock:K or custom:FILE"),
        )),
    }
}

/// JSON array; each entry a number, a literal string, or `[re, im]`.
fn custom_signal(path: &Path) -> Result<SingleModeInput, CliError> {
    let field = format!("--signal custom:{}", path.display());
    let src = std::fs::read_to_string(path).map_err(|e| config(&field, e.to_string()))?;
    let value: serde_json::Value =
        serde_json::from_str(&src).map_err(|e| config(&field, e.to_string()))?;
    let items = value
        .as_array()
        .ok_or_else(|| config(&field, "expected a JSON array of amplitudes"))?;
    let real = |v: &serde_json::Value, at: usize| -> Result<f64, CliError> {
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| config(&field, format!("entry {at}: not a number"))),
            serde_json::Value::String(s) => {
                expr::eval(s).map_err(|e| config(&field, format!("entry {at}: {e}")))
            }
            _ => Err(config(
                &field,
                format!("entry {at}: expected a number or literal"),
            )),
        }
    };
    let mut coeffs = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let c = match item.as_array().map(Vec::as_slice) {
            Some([re, im]) => Complex64::new(real(re, i)?, real(im, i)?),
            Some(_) => return Err(config(&field, format!("entry {i}: expected [re, im]"))),
            None => Complex64::new(real(item, i)?, 0.0),
        };
        coeffs.push(c);
    }
    if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(config(&field, "signal has no nonzero amplitude"));
    }
    Ok(SingleModeInput::Custom(coeffs))
}

/// A swept device parameter, addressed by element number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    Transmittance(usize),
    Phase(usize),
}

/// `T4`, `XI1`, or a tied set such as `T2,T4`.
pub fn swept_params(input: &str) -> Result<Vec<SweptParam>, CliError> {
    const FIELD: &str = "--param";
    let one = |s: &str| {
        let s = s.trim();
        let upper = s.to_ascii_uppercase();
        let (ctor, num): (fn(usize) -> SweptParam, &str) = if let Some(n) = upper.strip_prefix("XI")
        {
            (SweptParam::Phase, n)
        } else if let Some(n) = upper.strip_prefix('T') {
            (SweptParam::Transmittance, n)
        } else {
            return Err(config(FIELD, format!("`{s}`: expected T<k> or XI<k>")));
        };
        Ok(ctor(parse_usize(FIELD, num)?))
    };
    let params = input.split(',').map(one).collect::<Result<Vec<_>, _>>()?;
    if params.is_empty() {
        return Err(config(FIELD, "no parameter given"));
    }
    Ok(params)
}

/// `a:b:steps`; one step yields just `a`.
pub fn range(input: &str) -> Result<Vec<f64>, CliError> {
    const FIELD: &str = "--range";
    let parts: Vec<&str> = input.split(':').collect();
    let [a, b, steps] = parts.as_slice() else {
        return Err(config(FIELD, format!("`{input}`: expected a:b:steps")));
    };
    let a = expr::eval(a).map_err(|e| config(FIELD, e.to_string()))?;
    let b = expr::eval(b).map_err(|e| config(FIELD, e.to_string()))?;
    let steps = parse_usize(FIELD, steps)?;
    if steps == 0 {
        return Err(config(FIELD, "steps must be at least 1"));
    }
    if steps == 1 {
        return Ok(vec![a]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                b
            } else {
                a + (b - a) * i as f64 / last
            }
        })
        .collect())
}
