//! Number formatting shared by every command: 12 significant digits,
//! complex values as `[re, im]`.

use qtruncate_core::{Complex64, ScatteringMatrix};
use serde::Serialize;
use serde_json::Value;

/// Round to 12 significant digits. `-0.0` becomes `0.0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn pairs(cs: &[Complex64]) -> Vec<[f64; 2]> {
    cs.iter().copied().map(pair).collect()
}

pub fn matrix(s: &ScatteringMatrix) -> Vec<Vec<[f64; 2]>> {
    s.entries()
        .rows()
        .into_iter()
        .map(|row| row.iter().copied().map(pair).collect())
        .collect()
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Indented layout; arrays of scalars (complex pairs, parameter lists) stay
/// on one line.
fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Array(items) if items.iter().all(is_scalar) => {
            let inner: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&inner.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// JSON with every float rounded, newline-terminated.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_value(&mut v);
    let mut s = String::new();
    write_value(&mut s, &v, 0);
    s.push('\n');
    s
}

/// One CSV field.
pub fn num(x: f64) -> String {
    let x = round12(x);
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serializes")
    } else {
        "nan".to_string()
    }
}
