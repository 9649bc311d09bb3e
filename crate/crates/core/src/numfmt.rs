//! Fixed 17-significant-digit number formatting shared by every text output.
//!
//! Seventeen significant digits identify an `f64` uniquely, so a value written
//! here parses back to the same bits and re-serializes to the same string.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;

/// Formats `v` in scientific notation with 17 significant digits.
pub fn sci17(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter that writes every float via [`sci17`], optionally indented.
pub struct Sci17Formatter<'a> {
    pretty: Option<PrettyFormatter<'a>>,
}

impl<'a> Sci17Formatter<'a> {
    pub fn compact() -> Self {
        Self { pretty: None }
    }

    pub fn pretty() -> Self {
        Self {
            pretty: Some(PrettyFormatter::new()),
        }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                match &mut self.pretty {
                    Some(p) => p.$name(writer $(, $arg)*),
                    None => serde_json::ser::CompactFormatter.$name(writer $(, $arg)*),
                }
            }
        )*
    };
}

impl Formatter for Sci17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(sci17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Serializes `value` to JSON with 17-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T, pretty: bool) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = if pretty {
        Sci17Formatter::pretty()
    } else {
        Sci17Formatter::compact()
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sci17(6.0), "6.0000000000000000e0");
        assert_eq!(sci17(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(sci17(-0.0), "-0.0000000000000000e0");
    }

    #[test]
    fn json_floats_are_fixed_width() {
        let s = to_json(&vec![0.5f64, 2.0], false).unwrap();
        assert_eq!(s, "[5.0000000000000000e-1,2.0000000000000000e0]");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.5, 2.0]);
    }

    #[test]
    fn pretty_json_is_indented() {
        let s = to_json(&serde_json::json!({"a": [1.5]}), true).unwrap();
        assert!(s.contains("\n  \"a\": [\n    1.5000000000000000e0\n  ]"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sci17_roundtrips_bits(bits in any::<u64>()) {
                let v = f64::from_bits(bits);
                prop_assume!(v.is_finite());
                let s = sci17(v);
                let back: f64 = s.parse().unwrap();
                prop_assert_eq!(back.to_bits(), v.to_bits());
                prop_assert_eq!(sci17(back), s.clone());
                let j: f64 = serde_json::from_str(&s).unwrap();
                prop_assert_eq!(j.to_bits(), v.to_bits());
            }
        }
    }
}
