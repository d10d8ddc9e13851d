//! Compact JSON with every float printed at the shared fixed precision.

use std::io;

use gzlab_core::format::fmt_num;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser).expect("report serializes");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_fixed_format() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            b: f64,
            c: f64,
            d: u64,
        }
        let s = to_string(&R { a: 1.0 / 3.0, b: 2.5e-7, c: f64::NAN, d: 7 });
        assert_eq!(s, r#"{"a":0.333333333333,"b":2.50000000000e-7,"c":null,"d":7}"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["b"].as_f64(), Some(2.5e-7));
    }
}
