//! Strict parser for complex numbers written as `a+bi`.
//!
//! Accepted forms: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, `a+i`. Each number is
//! an optional sign, digits with an optional fractional part, and an optional
//! exponent. Whitespace is not allowed.

use num_complex::Complex64;

fn decimal_len(s: &[u8]) -> usize {
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < s.len() && s[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - start
    };
    let int = digits(&mut i);
    let mut frac = 0;
    if i < s.len() && s[i] == b'.' {
        i += 1;
        frac = digits(&mut i);
    }
    if int + frac == 0 {
        return 0;
    }
    if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
        let mut j = i + 1;
        if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
            j += 1;
        }
        if digits(&mut j) > 0 {
            i = j;
        }
    }
    i
}

fn signed(s: &[u8]) -> (f64, usize) {
    match s.first() {
        Some(b'-') => (-1.0, 1),
        Some(b'+') => (1.0, 1),
        _ => (1.0, 0),
    }
}

pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let bad = || format!("invalid complex number {text:?}, expected a+bi");
    let s = text.as_bytes();
    let (sign, mut i) = signed(s);
    let n = decimal_len(&s[i..]);
    let first: Option<f64> = (n > 0).then(|| text[i..i + n].parse().expect("validated decimal"));
    i += n;
    if i == s.len() {
        return first.map(|x| Complex64::new(sign * x, 0.0)).ok_or_else(bad);
    }
    if s[i] == b'i' && i + 1 == s.len() {
        return Ok(Complex64::new(0.0, sign * first.unwrap_or(1.0)));
    }
    let re = sign * first.ok_or_else(bad)?;
    if s[i] != b'+' && s[i] != b'-' {
        return Err(bad());
    }
    let (isign, skip) = signed(&s[i..]);
    i += skip;
    let n = decimal_len(&s[i..]);
    let im: f64 = if n > 0 { text[i..i + n].parse().expect("validated decimal") } else { 1.0 };
    i += n;
    if i + 1 != s.len() || s[i] != b'i' {
        return Err(bad());
    }
    Ok(Complex64::new(re, isign * im))
}

pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
