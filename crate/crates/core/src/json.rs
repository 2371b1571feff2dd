//! JSON helpers. Floats are written with 17 significant digits.

use nalgebra::DMatrix;
use serde_json::{Number, Value};

/// `x` as a JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // -0.0 prints as "-0.0000000000000000e0", which is valid JSON but noisy.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn vec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Row-major nested array.
pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Nested array of the given shape from row-major flat data.
pub fn nested(data: &[f64], shape: &[usize]) -> Value {
    match shape {
        [] => num(data[0]),
        [n] => vec(&data[..*n]),
        [n, rest @ ..] => {
            let stride: usize = rest.iter().product();
            Value::Array(
                (0..*n)
                    .map(|i| nested(&data[i * stride..(i + 1) * stride], rest))
                    .collect(),
            )
        }
    }
}

/// Pretty-printed document followed by a newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let v = num(0.1);
        assert_eq!(v.to_string(), "1.0000000000000001e-1");
        let back: f64 = v.to_string().parse().unwrap();
        assert_eq!(back, 0.1);
        assert!(!num(-0.0).to_string().starts_with('-'));
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn nested_shapes() {
        let v = nested(&[1.0, 2.0, 3.0, 4.0], &[2, 2]);
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(v[1][0].as_f64().unwrap(), 3.0);
    }
}
