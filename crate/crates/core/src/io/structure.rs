//! POSCAR and XYZ.
//!
//! POSCAR writing groups sites by species in order of first appearance and
//! renumbers ids from zero; that is the canonical form. XYZ files carry no
//! cell: they are placed in a non-periodic cubic box whose edge is a power
//! of two, centred on the origin, so that the Cartesian↔fractional mapping
//! is exact and canonicalization is idempotent.

use super::{fmt_f64, tokens, Lines, ParseDiagnostic, ParseResult};
use crate::element::Element;
use crate::lattice::{LatticeError, Site, Structure, UnitCell, Vec3};

/// Vacuum added around XYZ coordinates, Å.
pub const XYZ_PADDING: f64 = 10.0;

fn lattice_diag(err: LatticeError, line_of_site: &dyn Fn(usize) -> usize, fallback: usize) -> ParseDiagnostic {
    let line = match &err {
        LatticeError::InvalidSite(id, _) => line_of_site(*id),
        LatticeError::SitesTooClose(_, b) => line_of_site(*b),
        _ => fallback,
    };
    ParseDiagnostic::error(line, 1, err.to_string())
}

pub fn parse_poscar(text: &str) -> ParseResult<Structure> {
    read_poscar(&mut Lines::new(text))
}

/// POSCAR block at the reader's position; also the CHGCAR header.
pub(crate) fn read_poscar(lines: &mut Lines) -> ParseResult<Structure> {
    lines.next("comment line")?;
    let (scale_line, scale_toks) = lines.next_tokens("scale factor")?;
    let scale_tok = scale_toks.first().ok_or_else(|| ParseDiagnostic::error(scale_line, 1, "missing scale factor"))?;
    let scale = scale_tok.f64()?;
    if scale == 0.0 {
        return Err(scale_tok.err("scale factor must be non-zero"));
    }
    let lattice_line = lines.line_no();
    let mut vectors = [[0.0; 3]; 3];
    for v in &mut vectors {
        let f = lines.floats(3, "lattice vector")?;
        v.copy_from_slice(&f);
    }
    let raw = UnitCell::new(vectors, [true; 3]).map_err(|e| ParseDiagnostic::error(lattice_line, 1, e.to_string()))?;
    // A negative scale is the target volume.
    let factor = if scale < 0.0 { (-scale / raw.volume()).cbrt() } else { scale };
    for v in &mut vectors {
        for x in v.iter_mut() {
            *x *= factor;
        }
    }
    let cell = UnitCell::new(vectors, [true; 3]).map_err(|e| ParseDiagnostic::error(lattice_line, 1, e.to_string()))?;

    let (sp_line, sp_toks) = lines.next_tokens("species line")?;
    if sp_toks.is_empty() {
        return Err(ParseDiagnostic::error(sp_line, 1, "empty species line"));
    }
    if sp_toks[0].text.parse::<usize>().is_ok() {
        return Err(sp_toks[0].err("species names are required (VASP 5 format)"));
    }
    let species: Vec<Element> = sp_toks
        .iter()
        .map(|t| Element::parse(t.text).map_err(|_| t.err(format!("unknown element '{}'", t.text))))
        .collect::<ParseResult<_>>()?;
    let (cnt_line, cnt_toks) = lines.next_tokens("atom counts")?;
    if cnt_toks.len() != species.len() {
        let col = cnt_toks.first().map_or(1, |t| t.column);
        return Err(ParseDiagnostic::error(
            cnt_line,
            col,
            format!("{} counts for {} species", cnt_toks.len(), species.len()),
        ));
    }
    let counts: Vec<usize> = cnt_toks.iter().map(|t| t.usize()).collect::<ParseResult<_>>()?;
    let total = counts
        .iter()
        .try_fold(0usize, |a, &c| a.checked_add(c))
        .ok_or_else(|| ParseDiagnostic::error(cnt_line, 1, "atom count overflows"))?;

    let (mut mode_line, mut mode) = lines.next("coordinate mode")?;
    if mode.trim_start().starts_with(['S', 's']) {
        (mode_line, mode) = lines.next("coordinate mode")?;
    }
    let cartesian = match mode.trim_start().chars().next() {
        Some('D' | 'd') => false,
        Some('C' | 'c' | 'K' | 'k') => true,
        _ => return Err(ParseDiagnostic::error(mode_line, 1, "expected 'Direct' or 'Cartesian'")),
    };

    let first_coord_line = lines.line_no();
    let mut sites = Vec::new();
    let mut kinds = species.iter().zip(&counts).flat_map(|(&e, &c)| std::iter::repeat_n(e, c));
    for id in 0..total {
        let f = lines.floats(3, "atomic coordinates")?;
        let mut v = Vec3::new(f[0], f[1], f[2]);
        if cartesian {
            v = cell.to_fractional(&(v * factor));
        }
        let species = kinds.next().unwrap_or(Element::C);
        sites.push(Site { id, species, frac: [v.x, v.y, v.z] });
    }
    Structure::new(cell, sites).map_err(|e| lattice_diag(e, &|id| first_coord_line + id, first_coord_line))
}

pub fn write_poscar(s: &Structure, comment: &str) -> String {
    let mut order: Vec<Element> = Vec::new();
    for site in s.sites() {
        if !order.contains(&site.species) {
            order.push(site.species);
        }
    }
    let mut out = String::new();
    out.push_str(comment.lines().next().unwrap_or("").trim());
    out.push('\n');
    out.push_str("1.0\n");
    for v in s.cell().vectors() {
        out.push_str(&format!("  {}  {}  {}\n", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])));
    }
    let counts: Vec<usize> = order.iter().map(|e| s.sites().iter().filter(|x| x.species == *e).count()).collect();
    out.push_str(&order.iter().map(|e| e.symbol()).collect::<Vec<_>>().join(" "));
    out.push('\n');
    out.push_str(&counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    out.push_str("\nDirect\n");
    for e in &order {
        for site in s.sites().iter().filter(|x| x.species == *e) {
            let f = site.frac;
            out.push_str(&format!("  {}  {}  {}\n", fmt_f64(f[0]), fmt_f64(f[1]), fmt_f64(f[2])));
        }
    }
    out
}

/// Raw XYZ atoms, Cartesian Å as written.
pub fn parse_xyz_atoms(text: &str) -> ParseResult<Vec<(Element, Vec3)>> {
    let mut lines = Lines::new(text);
    let (n_line, toks) = lines.next_tokens("atom count")?;
    let n = toks.first().ok_or_else(|| ParseDiagnostic::error(n_line, 1, "missing atom count"))?.usize()?;
    lines.next("comment line")?;
    let mut atoms = Vec::new();
    for _ in 0..n {
        let (ln, l) = lines.next("atom line")?;
        let t = tokens(l, ln);
        if t.len() < 4 {
            return Err(ParseDiagnostic::error(ln, 1, format!("expected 'element x y z', found {} fields", t.len())));
        }
        let el = Element::parse(t[0].text).map_err(|_| t[0].err(format!("unknown element '{}'", t[0].text)))?;
        atoms.push((el, Vec3::new(t[1].f64()?, t[2].f64()?, t[3].f64()?)));
    }
    Ok(atoms)
}

pub fn parse_xyz(text: &str) -> ParseResult<Structure> {
    let atoms = parse_xyz_atoms(text)?;
    let first = 3;
    let extent = atoms.iter().map(|(_, r)| r.amax()).fold(0.0, f64::max);
    if extent > 1e12 {
        return Err(ParseDiagnostic::error(first, 1, "coordinates are too large"));
    }
    let edge = (4.0 * (extent + XYZ_PADDING)).log2().ceil().exp2();
    let cell = UnitCell::new([[edge, 0.0, 0.0], [0.0, edge, 0.0], [0.0, 0.0, edge]], [false; 3])
        .map_err(|e| ParseDiagnostic::error(first, 1, e.to_string()))?;
    let sites = atoms
        .iter()
        .enumerate()
        .map(|(id, (el, r))| Site { id, species: *el, frac: [r.x / edge + 0.5, r.y / edge + 0.5, r.z / edge + 0.5] })
        .collect();
    Structure::new(cell, sites).map_err(|e| lattice_diag(e, &|id| first + id, first))
}

/// Cartesian coordinates; non-periodic axes are centred on the origin.
pub fn write_xyz(s: &Structure, comment: &str) -> String {
    let mut out = format!("{}\n{}\n", s.len(), comment.lines().next().unwrap_or("").trim());
    let periodic = s.cell().periodic();
    for site in s.sites() {
        let mut f = Vec3::from(site.frac);
        for k in 0..3 {
            if !periodic[k] {
                f[k] -= 0.5;
            }
        }
        let r = s.cell().to_cartesian(&f);
        out.push_str(&format!("{}  {}  {}  {}\n", site.species.symbol(), fmt_f64(r.x), fmt_f64(r.y), fmt_f64(r.z)));
    }
    out
}

/// Raw atom list as XYZ, coordinates written as given.
pub fn write_xyz_atoms(atoms: &[(Element, Vec3)], comment: &str) -> String {
    let mut out = format!("{}\n{}\n", atoms.len(), comment.lines().next().unwrap_or("").trim());
    for (el, r) in atoms {
        out.push_str(&format!("{}  {}  {}  {}\n", el.symbol(), fmt_f64(r.x), fmt_f64(r.y), fmt_f64(r.z)));
    }
    out
}

/// A structure file format.
pub trait StructureFormat: Send + Sync {
    fn name(&self) -> &'static str;
    fn parse(&self, text: &str) -> ParseResult<Structure>;
    fn write(&self, s: &Structure, comment: &str) -> String;
}

pub struct Poscar;
pub struct Xyz;

impl StructureFormat for Poscar {
    fn name(&self) -> &'static str {
        "poscar"
    }
    fn parse(&self, text: &str) -> ParseResult<Structure> {
        parse_poscar(text)
    }
    fn write(&self, s: &Structure, comment: &str) -> String {
        write_poscar(s, comment)
    }
}

impl StructureFormat for Xyz {
    fn name(&self) -> &'static str {
        "xyz"
    }
    fn parse(&self, text: &str) -> ParseResult<Structure> {
        parse_xyz(text)
    }
    fn write(&self, s: &Structure, comment: &str) -> String {
        write_xyz(s, comment)
    }
}

pub struct StructureFormats {
    formats: Vec<Box<dyn StructureFormat>>,
}

impl Default for StructureFormats {
    fn default() -> Self {
        StructureFormats { formats: vec![Box::new(Poscar), Box::new(Xyz)] }
    }
}

impl StructureFormats {
    pub fn register(&mut self, f: Box<dyn StructureFormat>) {
        self.formats.retain(|g| g.name() != f.name());
        self.formats.push(f);
    }

    pub fn get(&self, name: &str) -> Option<&dyn StructureFormat> {
        let name = name.to_ascii_lowercase();
        self.formats.iter().find(|f| f.name() == name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formats.iter().map(|f| f.name()).collect()
    }
}

/// Parse with a named format from the default registry.
pub fn parse_structure(text: &str, format: &str) -> ParseResult<Structure> {
    let reg = StructureFormats::default();
    let f = reg
        .get(format)
        .ok_or_else(|| ParseDiagnostic::error(1, 1, format!("unknown structure format '{format}'")))?;
    f.parse(text)
}
