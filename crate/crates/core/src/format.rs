//! Float serialization shared by every CSV and JSON writer.

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-5 <= |x| < 1e17`.
///
/// Seventeen digits round-trip every finite `f64`. Non-finite values print
/// as `inf`, `-inf` and `nan`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", m, sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Parses what [`g17`] writes, plus anything `f64::from_str` accepts.
pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "Infinity" => Some(f64::INFINITY),
        "-inf" | "-Infinity" => Some(f64::NEG_INFINITY),
        "nan" | "NaN" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(5.0 / 19.0), "0.26315789473684209");
        assert_eq!(g17(2f64.sqrt() - 1.0), "0.41421356237309515");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(-1.25), "-1.25");
        assert_eq!(g17(f64::INFINITY), "inf");
        assert_eq!(g17(123456.0), "123456");
    }

    proptest! {
        #[test]
        fn round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = g17(x);
            prop_assert_eq!(parse_f64(&s).unwrap().to_bits(), x.to_bits());
        }
    }
}
