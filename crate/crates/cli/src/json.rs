//! JSON output with floats at 17 significant digits.

use serde::Serialize;
use serde_json::Value;

/// Formats a finite float as `d.dddddddddddddddde±x`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

fn write(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => out.push_str(&u.to_string()),
            (_, Some(i), _) => out.push_str(&i.to_string()),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with sorted keys and fixed-precision floats.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut out = String::new();
    write(&v, 0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-1.75), "-1.7500000000000000e0");
        let s = to_string(&serde_json::json!({"b": 1, "a": [0.5, 2]}));
        assert_eq!(s, "{\n  \"a\": [\n    5.0000000000000000e-1,\n    2\n  ],\n  \"b\": 1\n}\n");
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -123456.789, 0.0] {
            let back: f64 = format_float(x).parse().unwrap();
            assert_eq!(back, x);
        }
    }
}
