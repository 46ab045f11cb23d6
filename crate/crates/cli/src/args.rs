//! Parsers for command-line values.

use num_complex::Complex64;

/// Accepts `re,im`, `i`, `-i`, a plain real, or `a+bi` / `a-bi` / `bi`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read `{text}` as a complex number (try `re,im`, `i` or `a+bi`)");
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((re, im)) = t.split_once(',') {
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    if let Ok(x) = t.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Err(bad());
    };
    // split at the last sign that is not the leading one and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse().map_err(|_| bad())?,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Comma-separated integers, e.g. `2,0,-4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntList(pub Vec<i64>);

pub fn parse_ints(text: &str) -> Result<IntList, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| format!("cannot read `{s}` in `{text}` as an integer"))
        })
        .collect::<Result<_, _>>()
        .map(IntList)
}

/// Formats `z` as `re,im`, the same shape the parser accepts.
pub fn format_complex(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}
