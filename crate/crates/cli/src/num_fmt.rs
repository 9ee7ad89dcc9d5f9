//! Decimal float text format shared by every file the tool writes.
//!
//! Values are printed in scientific notation with 17 significant digits,
//! which is enough to reproduce any finite f64 exactly on parse. All file
//! formats in this crate round-trip floats bit-for-bit through these two
//! functions.

/// 17-significant-digit scientific notation, e.g. `1.2500000000000000e-1`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses a finite float; rejects NaN and infinities, which no valid file
/// contains.
pub fn parse_f64(text: &str) -> Option<f64> {
    let value: f64 = text.parse().ok()?;
    value.is_finite().then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use layerwise_core::Xorshift64Star;

    #[test]
    fn round_trips_are_bit_exact() {
        let specials = [
            0.0,
            -0.0,
            1.0,
            -1.0,
            0.1,
            f64::MAX,
            f64::MIN,
            f64::MIN_POSITIVE,
            5e-324,
            1.0 / 3.0,
            core::f64::consts::PI,
        ];
        for x in specials {
            let back = parse_f64(&fmt_f64(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x:e}");
        }
        let mut rng = Xorshift64Star::new(7);
        for _ in 0..1000 {
            let x = rng.uniform(-1e12, 1e12);
            let back = parse_f64(&fmt_f64(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x:e}");
        }
    }

    #[test]
    fn non_finite_values_are_rejected_on_parse() {
        assert_eq!(parse_f64("NaN"), None);
        assert_eq!(parse_f64("inf"), None);
        assert_eq!(parse_f64("-inf"), None);
        assert_eq!(parse_f64("1e999"), None);
        assert_eq!(parse_f64("not a number"), None);
        assert_eq!(parse_f64(""), None);
    }

    #[test]
    fn format_has_seventeen_significant_digits() {
        let s = fmt_f64(core::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
    }
}
