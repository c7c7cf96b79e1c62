//! Serialization helpers. Every float leaves the program with 12
//! significant digits so reports diff cleanly across runs.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use clockwalk::oracle::ConvergenceRow;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn rounded_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_occupation_csv<W: Write>(mut out: W, p: &[f64]) -> io::Result<()> {
    writeln!(out, "j,p")?;
    for (j, &pj) in p.iter().enumerate() {
        writeln!(out, "{j},{}", round_sig(pj))?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[ConvergenceRow]) -> io::Result<()> {
    writeln!(out, "t,deviation")?;
    for r in rows {
        writeln!(out, "{},{}", round_sig(r.t), round_sig(r.deviation))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(3.668_295_834_054_49), 3.66829583405);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(2.5e-17), 2.5e-17);
    }

    #[test]
    fn json_floats_rounded_recursively() {
        let v = serde_json::json!({"a": [0.1 + 0.2, 1], "b": {"c": 2.0 / 3.0}});
        let text = String::from_utf8(rounded_json(&v).unwrap()).unwrap();
        assert!(text.contains("0.3\n") || text.contains("0.3,"));
        assert!(text.contains("0.666666666667"));
        assert!(text.contains(" 1\n"));
    }

    #[test]
    fn occupation_csv_layout() {
        let mut buf = Vec::new();
        write_occupation_csv(&mut buf, &[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "j,p\n0,0.5\n1,0.25\n2,0.25\n");
    }
}
