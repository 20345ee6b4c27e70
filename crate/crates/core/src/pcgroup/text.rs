//! Text format for presentations:
//!
//! ```text
//! pcgroup p=3 n=4
//! pow 1 = g3
//! comm 2 1 = g3^2 g4
//! ```
//!
//! Omitted relations are trivial. `#` starts a comment.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::{Element, GroupError, PcGroup, PcPresentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.into() }
}

/// Tokens of a line with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_usize(tok: &str, line: usize, col: usize) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| err(line, col, format!("expected a number, found `{tok}`")))
}

fn parse_word(toks: &[(usize, &str)], p: u32, n: usize, line: usize) -> Result<Element, ParseError> {
    let mut exps = vec![0u32; n];
    let mut last = 0usize;
    for &(col, tok) in toks {
        if tok == "1" && toks.len() == 1 {
            break;
        }
        let body = tok
            .strip_prefix('g')
            .ok_or_else(|| err(line, col, format!("expected g<index>[^<exp>], found `{tok}`")))?;
        let (idx, e) = match body.split_once('^') {
            Some((i, e)) => (i, e),
            None => (body, "1"),
        };
        let idx = parse_usize(idx, line, col)?;
        let e: u32 = e.parse().map_err(|_| err(line, col, format!("bad exponent in `{tok}`")))?;
        if idx == 0 || idx > n {
            return Err(err(line, col, format!("generator g{idx} out of range 1..={n}")));
        }
        if idx <= last {
            return Err(err(line, col, "word must list generators in increasing order"));
        }
        if e >= p {
            return Err(err(line, col, format!("exponent {e} must be below p={p}")));
        }
        last = idx;
        exps[idx - 1] = e;
    }
    Ok(Element(exps))
}

/// Parse a presentation without the consistency test.
pub fn parse_presentation_unchecked(text: &str) -> Result<PcPresentation, ParseError> {
    let mut pres: Option<PcPresentation> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col0, head)) = toks.first() else { continue };
        match (&mut pres, head) {
            (None, "pcgroup") => {
                let mut p = None;
                let mut n = None;
                for &(col, t) in &toks[1..] {
                    match t.split_once('=') {
                        Some(("p", v)) => p = Some(parse_usize(v, line, col + 2)? as u32),
                        Some(("n", v)) => n = Some(parse_usize(v, line, col + 2)?),
                        _ => return Err(err(line, col, format!("unexpected `{t}` in header"))),
                    }
                }
                let p = p.ok_or_else(|| err(line, col0, "header is missing p=<prime>"))?;
                let n = n.ok_or_else(|| err(line, col0, "header is missing n=<count>"))?;
                pres = Some(PcPresentation::trivial(p, n).map_err(|e| err(line, col0, e.to_string()))?);
            }
            (None, _) => return Err(err(line, col0, "expected header `pcgroup p=<prime> n=<count>`")),
            (Some(_), "pcgroup") => return Err(err(line, col0, "duplicate header")),
            (Some(pr), "pow") => {
                let (p, n) = (pr.p(), pr.n());
                if toks.len() < 3 || toks[2].1 != "=" {
                    return Err(err(line, col0, "expected `pow i = <word>`"));
                }
                let i = parse_usize(toks[1].1, line, toks[1].0)?;
                if i == 0 || i > n {
                    return Err(err(line, toks[1].0, format!("generator {i} out of range")));
                }
                let w = parse_word(&toks[3..], p, n, line)?;
                pr.set_power(i - 1, w).map_err(|e| err(line, toks[1].0, e.to_string()))?;
            }
            (Some(pr), "comm") => {
                let (p, n) = (pr.p(), pr.n());
                if toks.len() < 4 || toks[3].1 != "=" {
                    return Err(err(line, col0, "expected `comm j i = <word>`"));
                }
                let j = parse_usize(toks[1].1, line, toks[1].0)?;
                let i = parse_usize(toks[2].1, line, toks[2].0)?;
                if !(1 <= i && i < j && j <= n) {
                    return Err(err(line, toks[1].0, format!("need 1 <= i < j <= {n}, got j={j} i={i}")));
                }
                let w = parse_word(&toks[4..], p, n, line)?;
                pr.set_commutator(j - 1, i - 1, w).map_err(|e| err(line, toks[1].0, e.to_string()))?;
            }
            (Some(_), other) => return Err(err(line, col0, format!("unknown directive `{other}`"))),
        }
    }
    pres.ok_or_else(|| err(1, 1, "empty input: missing header"))
}

/// Parse and run the consistency test.
pub fn parse_presentation(text: &str) -> Result<Arc<PcGroup>, ParseError> {
    Ok(PcGroup::new_checked(parse_presentation_unchecked(text)?)?)
}

fn word(e: &Element) -> String {
    let parts: Vec<String> = e
        .0
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| if x == 1 { format!("g{}", i + 1) } else { format!("g{}^{}", i + 1, x) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// Print in the text format; trivial relations are omitted.
pub fn print_presentation(pres: &PcPresentation) -> String {
    let mut s = format!("pcgroup p={} n={}\n", pres.p(), pres.n());
    for i in 0..pres.n() {
        if !pres.power(i).is_identity() {
            let _ = writeln!(s, "pow {} = {}", i + 1, word(pres.power(i)));
        }
    }
    for j in 0..pres.n() {
        for i in 0..j {
            let c = pres.commutator_rel(j, i);
            if !c.is_identity() {
                let _ = writeln!(s, "comm {} {} = {}", j + 1, i + 1, word(c));
            }
        }
    }
    s
}
