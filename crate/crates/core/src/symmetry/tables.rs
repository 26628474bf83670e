//! Character tables and the plain-text format they ship in.
//!
//! ```text
//! group C2v
//! E C2 sv 1sv'
//! A1  1  1  1  1
//! A2  1  1 -1 -1
//! ```
//!
//! The header lists classes, each optionally prefixed with its size. One
//! row per irrep follows: name, then one character per class. `#` starts a
//! comment; blank lines separate groups.

use serde::Serialize;

use super::SymmetryError;

pub(crate) const EMBEDDED_TABLES: &str = "\
# classes: s = sigma, h/v/d = horizontal/vertical/dihedral, i = inversion
group C1
E
A 1

group Cs
E sh
A'  1  1
A'' 1 -1

group C2
E C2
A 1  1
B 1 -1

group C2v
E C2 sv sv'
A1 1  1  1  1
A2 1  1 -1 -1
B1 1 -1  1 -1
B2 1 -1 -1  1

group C3v
E 2C3 3sv
A1 1  1  1
A2 1  1 -1
E  2 -1  0

group D3d
E 2C3 3C2' i 2S6 3sd
A1g 1  1  1  1  1  1
A2g 1  1 -1  1  1 -1
Eg  2 -1  0  2 -1  0
A1u 1  1  1 -1 -1 -1
A2u 1  1 -1 -1 -1  1
Eu  2 -1  0 -2  1  0

group Td
E 8C3 3C2 6S4 6sd
A1 1  1  1  1  1
A2 1  1  1 -1 -1
E  2 -1  2  0  0
T1 3  0 -1  1 -1
T2 3  0 -1 -1  1
";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassInfo {
    pub label: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Irrep {
    pub name: String,
    pub characters: Vec<f64>,
}

impl Irrep {
    pub fn dimension(&self) -> usize {
        self.characters[0].round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterTable {
    pub group: String,
    pub classes: Vec<ClassInfo>,
    pub irreps: Vec<Irrep>,
}

/// Result of decomposing a character vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition {
    Irreducible { irrep: String },
    Reducible { components: Vec<(String, usize)> },
}

impl Decomposition {
    pub fn irreducible(&self) -> Option<&str> {
        match self {
            Decomposition::Irreducible { irrep } => Some(irrep),
            Decomposition::Reducible { .. } => None,
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            Decomposition::Irreducible { irrep } => vec![irrep.clone()],
            Decomposition::Reducible { components } => components
                .iter()
                .flat_map(|(n, k)| std::iter::repeat_n(n.clone(), *k))
                .collect(),
        }
    }
}

impl std::fmt::Display for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decomposition::Irreducible { irrep } => f.write_str(irrep),
            Decomposition::Reducible { components } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|(n, k)| if *k == 1 { n.clone() } else { format!("{k}{n}") })
                    .collect();
                f.write_str(&parts.join(" + "))
            }
        }
    }
}

/// Canonical spelling used for matching irrep names: ASCII, primes as `'`,
/// lower-case.
pub fn normalize_irrep_name(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.trim().chars() {
        match ch {
            '₀'..='₉' => out.push(char::from(b'0' + (ch as u32 - '₀' as u32) as u8)),
            '′' => out.push('\''),
            '″' => out.push_str("''"),
            'ᵍ' => out.push('g'),
            'ᵤ' => out.push('u'),
            '"' => out.push_str("''"),
            c => out.extend(c.to_lowercase()),
        }
    }
    out
}

/// Mulliken rendering with Unicode subscripts, e.g. `B2` → `B₂`,
/// `A''` → `A″`.
pub fn mulliken(name: &str) -> String {
    let name = name.replace("''", "″").replace('\'', "′");
    name.chars()
        .map(|c| match c {
            '0'..='9' => char::from_u32('₀' as u32 + (c as u32 - '0' as u32)).unwrap_or(c),
            c => c,
        })
        .collect()
}

fn superscript(n: usize) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| SUP[(c as u8 - b'0') as usize]).collect()
}

/// `¹B₂`-style state label.
pub fn state_label(multiplicity: usize, irrep: &str) -> String {
    format!("{}{}", superscript(multiplicity), mulliken(irrep))
}

impl CharacterTable {
    pub fn order(&self) -> usize {
        self.classes.iter().map(|c| c.size).sum()
    }

    pub fn irrep_index(&self, name: &str) -> Option<usize> {
        let key = normalize_irrep_name(name);
        self.irreps.iter().position(|r| normalize_irrep_name(&r.name) == key)
    }

    pub fn irrep(&self, name: &str) -> Result<&Irrep, SymmetryError> {
        self.irrep_index(name)
            .map(|i| &self.irreps[i])
            .ok_or_else(|| SymmetryError::UnknownIrrep { irrep: name.to_string(), group: self.group.clone() })
    }

    /// Name of the totally symmetric irrep (first row).
    pub fn identity_irrep(&self) -> &str {
        &self.irreps[0].name
    }

    /// Multiplicities of each irrep in a class-function `chars`.
    pub fn multiplicities(&self, chars: &[f64]) -> Result<Vec<usize>, SymmetryError> {
        let g = self.order() as f64;
        let mut out = Vec::with_capacity(self.irreps.len());
        for r in &self.irreps {
            let m: f64 = self
                .classes
                .iter()
                .zip(chars.iter().zip(&r.characters))
                .map(|(c, (a, b))| c.size as f64 * a * b)
                .sum::<f64>()
                / g;
            let k = m.round();
            if (m - k).abs() > 1e-6 || k < 0.0 {
                return Err(SymmetryError::NotARepresentation(format!("{m}")));
            }
            out.push(k as usize);
        }
        Ok(out)
    }

    pub fn decompose(&self, chars: &[f64]) -> Result<Decomposition, SymmetryError> {
        let m = self.multiplicities(chars)?;
        let comps: Vec<(String, usize)> = m
            .iter()
            .zip(&self.irreps)
            .filter(|(k, _)| **k > 0)
            .map(|(k, r)| (r.name.clone(), *k))
            .collect();
        if comps.len() == 1 && comps[0].1 == 1 {
            Ok(Decomposition::Irreducible { irrep: comps[0].0.clone() })
        } else {
            Ok(Decomposition::Reducible { components: comps })
        }
    }

    /// Direct product of two irreps.
    pub fn product(&self, a: &str, b: &str) -> Result<Decomposition, SymmetryError> {
        let x = self.irrep(a)?;
        let y = self.irrep(b)?;
        let chars: Vec<f64> = x.characters.iter().zip(&y.characters).map(|(p, q)| p * q).collect();
        self.decompose(&chars)
    }

    /// Full product table (row-major over irreps).
    pub fn product_table(&self) -> Vec<Vec<Decomposition>> {
        self.irreps
            .iter()
            .map(|a| {
                self.irreps
                    .iter()
                    .map(|b| self.product(&a.name, &b.name).expect("table irreps multiply"))
                    .collect()
            })
            .collect()
    }

    /// Row orthogonality Σ_c |c| χ_a χ_b = |G| δ_ab and a dimension check.
    pub fn validate(&self) -> Result<(), SymmetryError> {
        let bad = |m: String| Err(SymmetryError::InvalidTable { group: self.group.clone(), message: m });
        if self.classes.is_empty() || self.irreps.is_empty() {
            return bad("table has no classes or irreps".into());
        }
        if self.classes[0].size != 1 {
            return bad("first class must be the identity".into());
        }
        let g = self.order() as f64;
        let mut dim2 = 0.0;
        for (ia, a) in self.irreps.iter().enumerate() {
            if a.characters.len() != self.classes.len() {
                return bad(format!("irrep {} has {} characters", a.name, a.characters.len()));
            }
            dim2 += a.characters[0] * a.characters[0];
            for b in &self.irreps[ia..] {
                let s: f64 = self
                    .classes
                    .iter()
                    .zip(a.characters.iter().zip(&b.characters))
                    .map(|(c, (x, y))| c.size as f64 * x * y)
                    .sum();
                let want = if std::ptr::eq(a, b) { g } else { 0.0 };
                if (s - want).abs() > 1e-9 {
                    return bad(format!("rows {} and {} are not orthogonal", a.name, b.name));
                }
            }
        }
        if (dim2 - g).abs() > 1e-9 || self.irreps.len() != self.classes.len() {
            return bad("irrep dimensions do not exhaust the group order".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("group {}\n", self.group);
        let header: Vec<String> = self
            .classes
            .iter()
            .map(|c| if c.size == 1 { c.label.clone() } else { format!("{}{}", c.size, c.label) })
            .collect();
        s.push_str(&header.join(" "));
        s.push('\n');
        for r in &self.irreps {
            s.push_str(&r.name);
            for x in &r.characters {
                s.push(' ');
                s.push_str(&format!("{x}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Parse one or more tables. Errors carry 1-based line numbers.
pub fn parse_character_tables(text: &str) -> Result<Vec<CharacterTable>, SymmetryError> {
    let mut out = Vec::new();
    let mut cur: Option<CharacterTable> = None;
    let err = |line: usize, m: &str| SymmetryError::TableParse { line, message: m.to_string() };
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if let Some(t) = cur.take() {
                out.push(t);
            }
            continue;
        }
        let mut words = line.split_whitespace();
        let first = words.next().unwrap_or("");
        if first == "group" {
            if let Some(t) = cur.take() {
                out.push(t);
            }
            let name = words.next().ok_or_else(|| err(line_no, "missing group name"))?;
            if words.next().is_some() {
                return Err(err(line_no, "trailing tokens after group name"));
            }
            cur = Some(CharacterTable { group: name.to_string(), classes: Vec::new(), irreps: Vec::new() });
            continue;
        }
        let t = cur.as_mut().ok_or_else(|| err(line_no, "expected 'group NAME'"))?;
        if t.classes.is_empty() {
            for tok in line.split_whitespace() {
                let digits = tok.chars().take_while(|c| c.is_ascii_digit()).count();
                let (num, label) = tok.split_at(digits);
                if label.is_empty() {
                    return Err(err(line_no, &format!("class token '{tok}' has no label")));
                }
                let size = if num.is_empty() {
                    1
                } else {
                    num.parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(|| err(line_no, "bad class size"))?
                };
                t.classes.push(ClassInfo { label: label.to_string(), size });
            }
            continue;
        }
        let mut chars = Vec::with_capacity(t.classes.len());
        for tok in words {
            let x: f64 = tok.parse().map_err(|_| err(line_no, &format!("bad character '{tok}'")))?;
            if !x.is_finite() {
                return Err(err(line_no, "non-finite character"));
            }
            chars.push(x);
        }
        if chars.len() != t.classes.len() {
            return Err(err(
                line_no,
                &format!("irrep {first} has {} characters for {} classes", chars.len(), t.classes.len()),
            ));
        }
        t.irreps.push(Irrep { name: first.to_string(), characters: chars });
    }
    if let Some(t) = cur.take() {
        out.push(t);
    }
    for t in &out {
        t.validate()?;
    }
    Ok(out)
}

pub(crate) fn embedded_tables() -> Vec<CharacterTable> {
    parse_character_tables(EMBEDDED_TABLES).expect("embedded tables are valid")
}
