//! Text records for domains and complex literals.
//!
//! A domain record is a whitespace separated list of `key=value` fields:
//! `kind=disk`, `kind=ellipse q=0.5` or
//! `kind=custom cap=1.0 coeffs=[0,0.2,0.1i]`.

use planar_ortho::{DomainSpec, ExteriorMap, C64};

use crate::error::CliError;

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`. Exponents are allowed in
/// either part.
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::config(format!("bad complex literal `{text}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(&t).map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not leading and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k]).map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => parse_real(s).map_err(|_| bad())?,
    };
    Ok(C64::new(re, im))
}

/// `f64` parsing that also accepts `inf`/`∞`.
pub fn parse_real(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let v = match t {
        "inf" | "+inf" | "∞" | "infinity" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| CliError::config(format!("bad number `{text}`")))?,
    };
    if v.is_nan() {
        return Err(CliError::config(format!("bad number `{text}`")));
    }
    Ok(v)
}

/// Inverse of [`parse_complex`]; `Display` for `f64` round-trips exactly.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Parses `[a, b, ...]` (brackets optional) into complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<C64>, CliError> {
    split_list(text).map(parse_complex).collect()
}

pub fn parse_real_list(text: &str) -> Result<Vec<f64>, CliError> {
    split_list(text).map(parse_real).collect()
}

pub fn parse_usize_list(text: &str) -> Result<Vec<usize>, CliError> {
    split_list(text)
        .map(|s| s.parse::<usize>().map_err(|_| CliError::config(format!("bad integer `{s}`"))))
        .collect()
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    let t = text.trim();
    let t = t.strip_prefix('[').unwrap_or(t);
    let t = t.strip_suffix(']').unwrap_or(t);
    t.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn format_list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    let parts: Vec<String> = items.iter().map(f).collect();
    format!("[{}]", parts.join(","))
}

/// Builds a domain from its fields. `kind` is required; the others depend
/// on it.
pub fn domain_from_fields(
    kind: &str,
    q: Option<&str>,
    cap: Option<&str>,
    coeffs: Option<&str>,
) -> Result<DomainSpec, CliError> {
    let unused = |name: &str, v: Option<&str>| match v {
        Some(_) => Err(CliError::config(format!("`{name}` does not apply to kind={kind}"))),
        None => Ok(()),
    };
    match kind {
        "disk" => {
            unused("q", q)?;
            unused("cap", cap)?;
            unused("coeffs", coeffs)?;
            Ok(DomainSpec::Disk)
        }
        "ellipse" => {
            unused("cap", cap)?;
            unused("coeffs", coeffs)?;
            let q = parse_real(q.ok_or_else(|| CliError::config("ellipse needs q"))?)?;
            // Validates q ∈ [0, 1).
            ExteriorMap::ellipse(q).map_err(CliError::from_core_input)?;
            Ok(DomainSpec::Ellipse { q })
        }
        "custom" => {
            unused("q", q)?;
            let cap = parse_real(cap.unwrap_or("1"))?;
            let coeffs = parse_complex_list(coeffs.unwrap_or("[]"))?;
            let map = ExteriorMap::new(cap, coeffs).map_err(CliError::from_core_input)?;
            Ok(DomainSpec::Custom(map))
        }
        other => Err(CliError::config(format!("unknown domain kind `{other}`"))),
    }
}

/// Parses a one-line domain record.
pub fn parse_domain(record: &str) -> Result<DomainSpec, CliError> {
    let mut kind = None;
    let mut q = None;
    let mut cap = None;
    let mut coeffs = None;
    for field in record_fields(record)? {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("domain field `{field}` is not key=value")))?;
        let slot = match k {
            "kind" => &mut kind,
            "q" => &mut q,
            "cap" => &mut cap,
            "coeffs" => &mut coeffs,
            _ => return Err(CliError::config(format!("unknown domain field `{k}`"))),
        };
        if slot.replace(v).is_some() {
            return Err(CliError::config(format!("domain field `{k}` given twice")));
        }
    }
    let kind = kind.ok_or_else(|| CliError::config("domain record needs kind="))?;
    domain_from_fields(kind, q, cap, coeffs)
}

/// Splits on whitespace outside brackets, so `coeffs=[1, 2i]` stays whole.
fn record_fields(record: &str) -> Result<Vec<&str>, CliError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (k, ch) in record.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(CliError::config("unbalanced `]` in domain record"));
        }
        if ch.is_whitespace() && depth == 0 {
            if let Some(s) = start.take() {
                out.push(&record[s..k]);
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if depth != 0 {
        return Err(CliError::config("unbalanced `[` in domain record"));
    }
    if let Some(s) = start {
        out.push(&record[s..]);
    }
    Ok(out)
}

pub fn format_domain(domain: &DomainSpec) -> String {
    match domain {
        DomainSpec::Disk => "kind=disk".into(),
        DomainSpec::Ellipse { q } => format!("kind=ellipse q={q}"),
        DomainSpec::Custom(map) => format!(
            "kind=custom cap={} coeffs={}",
            map.capacity(),
            format_list(map.laurent_coeffs(), |c| format_complex(*c))
        ),
    }
}
