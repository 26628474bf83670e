//! Basis text format.
//!
//! ```text
//! # comment
//! C
//! s 3
//!   71.616837  0.15432897
//!   13.045096  0.53532814
//!   3.5305122  0.44463454
//! p 1
//!   0.2222899  1.0
//! ```
//!
//! An element line opens a block; each shell header is `<l> <count>` with
//! `l` one of `s p d f` or `0..3`, followed by `count` rows of
//! `exponent coefficient` (exponent in bohr⁻²).

use super::{fmt_f64, tokens, Lines, ParseDiagnostic, ParseResult, Token};
use crate::element::Element;
use crate::embed::{BasisLibrary, Primitive, ShellSpec, MAX_L};

fn shell_l(t: &Token) -> Option<u8> {
    match t.text.to_ascii_lowercase().as_str() {
        "s" | "0" => Some(0),
        "p" | "1" => Some(1),
        "d" | "2" => Some(2),
        "f" | "3" => Some(3),
        _ => None,
    }
}

fn strip_comment(l: &str) -> &str {
    l.split('#').next().unwrap_or("")
}

pub fn parse_basis(text: &str) -> ParseResult<BasisLibrary> {
    let mut lines = Lines::new(text);
    let mut lib = BasisLibrary::default();
    let mut current: Option<Element> = None;
    while !lines.at_end() {
        let (ln, raw) = lines.next("basis line")?;
        let toks = tokens(strip_comment(raw), ln);
        match toks.len() {
            0 => continue,
            1 => {
                let el = Element::parse(toks[0].text).map_err(|_| toks[0].err(format!("unknown element '{}'", toks[0].text)))?;
                if lib.elements.contains_key(&el) {
                    return Err(toks[0].err(format!("element {} defined twice", el.symbol())));
                }
                lib.elements.insert(el, Vec::new());
                current = Some(el);
            }
            2 => {
                let el = current.ok_or_else(|| toks[0].err("shell header before any element line"))?;
                let l = shell_l(&toks[0]).ok_or_else(|| toks[0].err(format!("unknown angular momentum '{}'", toks[0].text)))?;
                debug_assert!(l <= MAX_L);
                let count = toks[1].usize()?;
                if count == 0 {
                    return Err(toks[1].err("shell needs at least one primitive"));
                }
                let mut primitives = Vec::new();
                for _ in 0..count {
                    let (pl, praw) = lines.next("primitive row")?;
                    let pt = tokens(strip_comment(praw), pl);
                    if pt.len() != 2 {
                        return Err(ParseDiagnostic::error(pl, 1, format!("expected 'exponent coefficient', found {} fields", pt.len())));
                    }
                    let exponent = pt[0].f64()?;
                    if exponent <= 0.0 {
                        return Err(pt[0].err("exponent must be positive"));
                    }
                    primitives.push(Primitive { exponent, coefficient: pt[1].f64()? });
                }
                if let Some(v) = lib.elements.get_mut(&el) {
                    v.push(ShellSpec { l, primitives });
                }
            }
            _ => return Err(toks[2].err("expected an element symbol or a shell header '<l> <count>'")),
        }
    }
    Ok(lib)
}

pub fn write_basis(lib: &BasisLibrary) -> String {
    let mut out = String::new();
    for (el, shells) in &lib.elements {
        out.push_str(el.symbol());
        out.push('\n');
        for s in shells {
            out.push_str(&format!("{} {}\n", ["s", "p", "d", "f"][s.l as usize], s.primitives.len()));
            for p in &s.primitives {
                out.push_str(&format!("  {}  {}\n", fmt_f64(p.exponent), fmt_f64(p.coefficient)));
            }
        }
    }
    out
}
