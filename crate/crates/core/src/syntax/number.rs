use alloc::string::String;

/// A non-blank numeric field that is neither standard nor E-less notation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed number {text:?}")]
pub struct MalformedNumber {
    pub text: String,
}

/// Parse an EXFOR numeric field.
///
/// Blank fields are missing values. Besides the usual `1.5E+01` form the
/// Fortran E-less exponent is accepted, where the exponent sign follows the
/// mantissa directly: `1.234+5` is `1.234E+5`. `D` works as an exponent
/// marker too.
pub fn parse_fortran_number(field: &str) -> Result<Option<f64>, MalformedNumber> {
    let text = field.trim();
    if text.is_empty() {
        return Ok(None);
    }
    let malformed = || MalformedNumber { text: String::from(text) };
    let bytes = text.as_bytes();
    let mut pos = 0;

    if matches!(bytes.first(), Some(b'+' | b'-')) {
        pos += 1;
    }
    let int_digits = count_digits(&bytes[pos..]);
    pos += int_digits;
    let mut frac_digits = 0;
    if bytes.get(pos) == Some(&b'.') {
        pos += 1;
        frac_digits = count_digits(&bytes[pos..]);
        pos += frac_digits;
    }
    if int_digits + frac_digits == 0 {
        return Err(malformed());
    }
    let mantissa = &text[..pos];

    let exponent = match bytes.get(pos) {
        None => None,
        Some(b'e' | b'E' | b'd' | b'D') => Some(&text[pos + 1..]),
        Some(b'+' | b'-') => Some(&text[pos..]),
        Some(_) => return Err(malformed()),
    };

    let value = match exponent {
        None => mantissa.parse::<f64>().map_err(|_| malformed())?,
        Some(exp) => {
            let digits = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            if digits.is_empty() || count_digits(digits.as_bytes()) != digits.len() {
                return Err(malformed());
            }
            let mut normalized = String::with_capacity(mantissa.len() + exp.len() + 1);
            normalized.push_str(mantissa);
            normalized.push('e');
            normalized.push_str(exp);
            normalized.parse::<f64>().map_err(|_| malformed())?
        }
    };
    if value.is_finite() {
        Ok(Some(value))
    } else {
        Err(malformed())
    }
}

fn count_digits(bytes: &[u8]) -> usize {
    bytes.iter().take_while(|b| b.is_ascii_digit()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    fn parse(s: &str) -> Option<f64> {
        parse_fortran_number(s).unwrap()
    }

    #[test]
    fn blank_is_missing() {
        assert_eq!(parse("           "), None);
        assert_eq!(parse(""), None);
    }

    #[test]
    fn eless_exponent() {
        assert_eq!(parse("  1.234+5  "), Some(123400.0));
        assert_eq!(parse("2.5-3"), Some(2.5e-3));
        assert_eq!(parse("-7.0+02"), Some(-700.0));
    }

    #[test]
    fn standard_forms() {
        assert_eq!(parse(" 1.5E+01   "), Some(15.0));
        assert_eq!(parse("14."), Some(14.0));
        assert_eq!(parse(".5"), Some(0.5));
        assert_eq!(parse("-3"), Some(-3.0));
        assert_eq!(parse("1.0D-2"), Some(0.01));
        assert_eq!(parse("1e3"), Some(1000.0));
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["+", "-", ".", "1.2.3", "ABC", "1.0E", "1.0+", "1.0E+X", "inf", "NaN", "1 2", "1.0+99999"] {
            assert!(parse_fortran_number(bad).is_err(), "{bad:?} should be malformed");
        }
    }

    proptest! {
        #[test]
        fn rendered_scientific_values_parse_back(x in -1.0e30f64..1.0e30) {
            let text = format!("{x:.4E}");
            prop_assume!(text.len() <= 11);
            let parsed = parse(&text).unwrap();
            prop_assert!((parsed - x).abs() <= 1e-4 * x.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn never_panics(s in "\\PC{0,11}") {
            let _ = parse_fortran_number(&s);
        }
    }
}
