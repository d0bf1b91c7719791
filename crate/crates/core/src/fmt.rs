//! Number formatting shared by text summaries.

/// `x` rounded to 9 significant digits, without trailing zeros. Plain
/// notation between 1e-5 and 1e15, exponent notation outside.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if (1e-5..1e15).contains(&a) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(12.5), "12.5");
        assert_eq!(sig9(-0.5), "-0.5");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(2f64.sqrt()), "1.41421356");
        assert_eq!(sig9(0.1 + 0.2), "0.3");
        assert_eq!(sig9(1e-12), "1e-12");
        assert_eq!(sig9(123456789012.0), "123456789000");
        assert_eq!(sig9(f64::NAN), "NaN");
    }
}
