//! FCIDUMP reader and writer.
//!
//! Header: a namelist `&FCI NORB=.., NELEC=.., MS2=.., ... &END` (a bare `/`
//! also terminates it). Body: `value p q r s` records with 1-based indices;
//! `p q 0 0` is a one-body term, `0 0 0 0` the constant, and `p 0 0 0`
//! (orbital energies) is accepted and ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::{Eri, IntegralSet};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

struct Header {
    norb: usize,
    nelec: usize,
    body_start: usize,
}

fn parse_header(lines: &[&str]) -> Result<Header> {
    let mut text = String::new();
    let mut end = None;
    for (i, raw) in lines.iter().enumerate() {
        let upper = raw.to_ascii_uppercase();
        let trimmed = upper.trim();
        if trimmed == "/" || trimmed.starts_with("&END") || trimmed.ends_with("&END") {
            text.push_str(&upper.replace("&END", " "));
            end = Some(i + 1);
            break;
        }
        text.push_str(&upper);
        text.push(' ');
    }
    let body_start = end.ok_or_else(|| parse_err(1, "malformed header: missing &END or '/'"))?;
    if !text.trim_start().starts_with("&FCI") {
        return Err(parse_err(1, "malformed header: expected '&FCI'"));
    }
    let text = text.trim_start().trim_start_matches("&FCI").replace('=', " = ");
    let tokens: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();

    let mut values: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    let mut i = 0;
    while i < tokens.len() {
        if i + 1 < tokens.len() && tokens[i + 1] == "=" {
            let key = tokens[i].to_string();
            values.entry(key.clone()).or_default();
            current = Some(key);
            i += 2;
            continue;
        }
        match &current {
            Some(key) => values.get_mut(key).unwrap().push(tokens[i].to_string()),
            None => return Err(parse_err(1, format!("malformed header near '{}'", tokens[i]))),
        }
        i += 1;
    }

    let int_field = |key: &str| -> Result<i64> {
        let v = values
            .get(key)
            .and_then(|v| v.first())
            .ok_or_else(|| parse_err(1, format!("malformed header: missing {key}")))?;
        v.parse::<i64>()
            .map_err(|_| parse_err(1, format!("malformed header: {key}={v}")))
    };
    let norb = int_field("NORB")?;
    if norb <= 0 {
        return Err(parse_err(1, format!("NORB must be positive, got {norb}")));
    }
    let nelec = int_field("NELEC")?;
    if nelec <= 0 || nelec % 2 != 0 {
        return Err(parse_err(1, format!("NELEC must be positive and even, got {nelec}")));
    }
    if values.contains_key("MS2") && int_field("MS2")? != 0 {
        return Err(parse_err(1, "only closed-shell MS2=0 is supported"));
    }
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        body_start,
    })
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    if tok.starts_with('(') {
        return Err(parse_err(line, "complex integrals are not supported"));
    }
    tok.replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad value '{tok}'")))
}

#[derive(Hash, PartialEq, Eq, Clone, Copy)]
enum Slot {
    Nuc,
    One(usize, usize),
    Two(usize),
}

/// Parse FCIDUMP text into an [`IntegralSet`].
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let lines: Vec<&str> = text.lines().collect();
    let header = parse_header(&lines)?;
    let n = header.norb;

    let mut h1 = DMatrix::zeros(n, n);
    let mut eri = Eri::zeros(n);
    let mut e_nuc = 0.0;
    let mut seen: HashMap<Slot, (f64, usize)> = HashMap::new();

    for (offset, raw) in lines[header.body_start..].iter().enumerate() {
        let line_no = header.body_start + offset + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(parse_err(line_no, "expected 'value p q r s'"));
        }
        let value = parse_value(toks[0], line_no)?;
        let mut idx = [0usize; 4];
        for (k, t) in toks[1..].iter().enumerate() {
            let v: i64 = t
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad index '{t}'")))?;
            if v < 0 || v as usize > n {
                return Err(parse_err(line_no, format!("index out of range: {v} (NORB={n})")));
            }
            idx[k] = v as usize;
        }
        let [p, q, r, s] = idx;
        let slot = match (p, q, r, s) {
            (0, 0, 0, 0) => Slot::Nuc,
            (p, 0, 0, 0) if p > 0 => continue,
            (p, q, 0, 0) if p > 0 && q > 0 => Slot::One(p.max(q) - 1, p.min(q) - 1),
            (p, q, r, s) if p > 0 && q > 0 && r > 0 && s > 0 => {
                Slot::Two(Eri::slot(p - 1, q - 1, r - 1, s - 1))
            }
            _ => return Err(parse_err(line_no, "invalid index pattern")),
        };
        if let Some(&(prev, prev_line)) = seen.get(&slot) {
            if (prev - value).abs() > 1e-12 * prev.abs().max(1.0) {
                return Err(parse_err(
                    line_no,
                    format!("conflicting duplicate entry (first on line {prev_line})"),
                ));
            }
            continue;
        }
        seen.insert(slot, (value, line_no));
        match slot {
            Slot::Nuc => e_nuc = value,
            Slot::One(a, b) => {
                h1[(a, b)] = value;
                h1[(b, a)] = value;
            }
            Slot::Two(_) => eri.set(p - 1, q - 1, r - 1, s - 1, value),
        }
    }

    IntegralSet::new(header.nelec, e_nuc, h1, eri, "fcidump")
}

/// Read and parse an FCIDUMP file; the label records the path.
pub fn read_fcidump(path: impl AsRef<Path>) -> Result<IntegralSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut set = parse_fcidump(&text)?;
    set.label = path.display().to_string();
    Ok(set)
}

/// Serialize with full round-trip precision; exact zeros are omitted.
pub fn write_fcidump(set: &IntegralSet) -> String {
    let n = set.n_orb;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={n},NELEC={},MS2=0,", set.n_elec);
    let orbsym = vec!["1"; n].join(",");
    let _ = writeln!(out, "  ORBSYM={orbsym},");
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    for (p, q, r, s, v) in set.eri.unique_entries() {
        if v != 0.0 {
            let _ = writeln!(out, "{v:.17e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1);
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = set.h1[(p, q)];
            if v != 0.0 {
                let _ = writeln!(out, "{v:.17e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:.17e} 0 0 0 0", set.e_nuc);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = " &FCI NORB=1,NELEC=2,MS2=0,\n  ORBSYM=1,\n  ISYM=1,\n &END\n\
        0.5 1 1 0 0\n0.25 1 1 1 1\n1.0 0 0 0 0\n";

    #[test]
    fn tiny_header_and_body() {
        let set = parse_fcidump(TINY).unwrap();
        assert_eq!(set.n_orb, 1);
        assert_eq!(set.n_elec, 2);
        assert_eq!(set.h1[(0, 0)], 0.5);
        assert_eq!(set.get_eri(0, 0, 0, 0), 0.25);
        assert_eq!(set.e_nuc, 1.0);
    }

    #[test]
    fn slash_terminated_header_and_fortran_exponent() {
        let text = "&FCI NORB=2, NELEC=2,\n/\n0.5D0 1 1 0 0\n0.1 2 1 1 1\n";
        let set = parse_fcidump(text).unwrap();
        assert_eq!(set.h1[(0, 0)], 0.5);
        assert_eq!(set.get_eri(0, 0, 1, 0), 0.1);
        assert_eq!(set.get_eri(1, 1, 1, 1), 0.0);
    }

    #[test]
    fn index_out_of_range_names_line() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 3 1 0 0\n";
        match parse_fcidump(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("index out of range"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_errors() {
        assert!(parse_fcidump("NORB=2\n0.1 1 1 0 0\n").is_err());
        assert!(parse_fcidump("&FCI NORB=0,NELEC=2,\n&END\n").is_err());
        assert!(parse_fcidump("&FCI NORB=2,NELEC=3,\n&END\n").is_err());
        assert!(parse_fcidump("&FCI NELEC=2,\n&END\n").is_err());
        assert!(parse_fcidump("&FCI NORB=2,NELEC=2,MS2=2,\n&END\n").is_err());
    }

    #[test]
    fn conflicting_duplicates_rejected_equal_duplicates_allowed() {
        let ok = "&FCI NORB=2,NELEC=2,\n&END\n0.3 2 1 1 1\n0.3 1 1 1 2\n";
        assert!(parse_fcidump(ok).is_ok());
        let bad = "&FCI NORB=2,NELEC=2,\n&END\n0.3 2 1 1 1\n0.4 1 1 1 2\n";
        match parse_fcidump(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_values_rejected() {
        let text = "&FCI NORB=1,NELEC=2,\n&END\n(0.5,0.1) 1 1 0 0\n";
        assert!(parse_fcidump(text).is_err());
    }

    #[test]
    fn writer_round_trip() {
        let set = parse_fcidump(TINY).unwrap();
        let again = parse_fcidump(&write_fcidump(&set)).unwrap();
        assert!(set.max_difference(&again) < 1e-12);
    }
}
