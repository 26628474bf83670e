//! Volumetric grids: CHGCAR and a minimal "simple" format.
//!
//! CHGCAR: POSCAR header, blank line, `n1 n2 n3`, values x-fastest stored
//! as density × cell volume. A spin-polarized file repeats the dims line
//! later; everything between the blocks (augmentation occupancies, per-atom
//! moments) is skipped.
//!
//! Simple: comment line, three lattice-vector lines (Å), `n1 n2 n3`, then
//! the values x-fastest in raw units, any line layout.

use super::structure::{read_poscar, write_poscar};
use super::{fmt_f64, Lines, ParseDiagnostic, ParseResult};
use crate::grid::{GridConvention, VolumetricGrid};
use crate::lattice::{Structure, UnitCell};

const VALUES_PER_LINE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub structure: Option<Structure>,
    pub grid: VolumetricGrid,
    /// Magnetization block of a spin-polarized CHGCAR.
    pub spin: Option<VolumetricGrid>,
}

fn read_dims(lines: &mut Lines) -> ParseResult<[usize; 3]> {
    let (ln, toks) = lines.next_tokens("grid dimensions")?;
    if toks.len() != 3 {
        let col = toks.last().map_or(1, |t| t.column + t.text.chars().count());
        return Err(ParseDiagnostic::error(ln, col, format!("expected 3 grid dimensions, found {}", toks.len())));
    }
    let mut d = [0; 3];
    for (k, t) in toks.iter().enumerate() {
        d[k] = t.usize()?;
        if d[k] < 2 {
            return Err(t.err("grid dimensions must be at least 2"));
        }
    }
    if d.iter().try_fold(1usize, |a, &n| a.checked_mul(n)).is_none() {
        return Err(ParseDiagnostic::error(ln, 1, "grid is too large"));
    }
    Ok(d)
}

fn read_block(lines: &mut Lines, cell: &UnitCell, dims: [usize; 3], conv: GridConvention, what: &str) -> ParseResult<VolumetricGrid> {
    let start = lines.line_no();
    let values = lines.float_block(dims[0] * dims[1] * dims[2], what)?;
    VolumetricGrid::new(cell.clone(), dims, values, Some(conv)).map_err(|e| ParseDiagnostic::error(start, 1, e.to_string()))
}

fn skip_blank(lines: &mut Lines) {
    while lines.peek().is_some_and(|l| l.trim().is_empty()) {
        let _ = lines.next("");
    }
}

pub fn parse_chgcar(text: &str) -> ParseResult<GridFile> {
    let mut lines = Lines::new(text);
    let structure = read_poscar(&mut lines)?;
    skip_blank(&mut lines);
    let dims = read_dims(&mut lines)?;
    let grid = read_block(&mut lines, structure.cell(), dims, GridConvention::Volume, "charge density")?;
    let dims_tokens: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    let mut spin = None;
    while let Some(l) = lines.peek() {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t == dims_tokens {
            lines.next("")?;
            spin = Some(read_block(&mut lines, structure.cell(), dims, GridConvention::Volume, "magnetization density")?);
            break;
        }
        lines.next("")?;
    }
    Ok(GridFile { structure: Some(structure), grid, spin })
}

fn push_values(out: &mut String, values: &[f64]) {
    for chunk in values.chunks(VALUES_PER_LINE) {
        let row: Vec<String> = chunk.iter().map(|&v| fmt_f64(v)).collect();
        out.push(' ');
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn write_chgcar(structure: &Structure, grid: &VolumetricGrid, spin: Option<&VolumetricGrid>, comment: &str) -> String {
    let mut out = write_poscar(structure, comment);
    out.push('\n');
    for g in std::iter::once(grid).chain(spin) {
        let d = g.dims();
        out.push_str(&format!("{} {} {}\n", d[0], d[1], d[2]));
        push_values(&mut out, g.values());
    }
    out
}

pub fn parse_simple_grid(text: &str) -> ParseResult<GridFile> {
    let mut lines = Lines::new(text);
    lines.next("comment line")?;
    let first = lines.line_no();
    let mut v = [[0.0; 3]; 3];
    for row in &mut v {
        row.copy_from_slice(&lines.floats(3, "lattice vector")?);
    }
    let cell = UnitCell::new(v, [true; 3]).map_err(|e| ParseDiagnostic::error(first, 1, e.to_string()))?;
    let dims = read_dims(&mut lines)?;
    let grid = read_block(&mut lines, &cell, dims, GridConvention::Raw, "grid values")?;
    Ok(GridFile { structure: None, grid, spin: None })
}

pub fn write_simple_grid(grid: &VolumetricGrid, comment: &str) -> String {
    let mut out = format!("{}\n", comment.lines().next().unwrap_or("").trim());
    for v in grid.cell().vectors() {
        out.push_str(&format!("{} {} {}\n", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])));
    }
    let d = grid.dims();
    out.push_str(&format!("{} {} {}\n", d[0], d[1], d[2]));
    push_values(&mut out, grid.values());
    out
}

pub trait GridFormat: Send + Sync {
    fn name(&self) -> &'static str;
    fn parse(&self, text: &str) -> ParseResult<GridFile>;
    fn write(&self, file: &GridFile, comment: &str) -> String;
}

pub struct ChgcarFormat;
pub struct SimpleGridFormat;

impl GridFormat for ChgcarFormat {
    fn name(&self) -> &'static str {
        "chgcar"
    }
    fn parse(&self, text: &str) -> ParseResult<GridFile> {
        parse_chgcar(text)
    }
    /// Falls back to the simple format when no structure is attached.
    fn write(&self, f: &GridFile, comment: &str) -> String {
        match &f.structure {
            Some(s) => write_chgcar(s, &f.grid, f.spin.as_ref(), comment),
            None => write_simple_grid(&f.grid, comment),
        }
    }
}

impl GridFormat for SimpleGridFormat {
    fn name(&self) -> &'static str {
        "simple"
    }
    fn parse(&self, text: &str) -> ParseResult<GridFile> {
        parse_simple_grid(text)
    }
    fn write(&self, f: &GridFile, comment: &str) -> String {
        write_simple_grid(&f.grid, comment)
    }
}

pub struct GridFormats {
    formats: Vec<Box<dyn GridFormat>>,
}

impl Default for GridFormats {
    fn default() -> Self {
        GridFormats { formats: vec![Box::new(ChgcarFormat), Box::new(SimpleGridFormat)] }
    }
}

impl GridFormats {
    pub fn register(&mut self, f: Box<dyn GridFormat>) {
        self.formats.retain(|g| g.name() != f.name());
        self.formats.push(f);
    }

    pub fn get(&self, name: &str) -> Option<&dyn GridFormat> {
        let name = name.to_ascii_lowercase();
        self.formats.iter().find(|f| f.name() == name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formats.iter().map(|f| f.name()).collect()
    }
}

pub fn parse_grid(text: &str, format: &str) -> ParseResult<GridFile> {
    let reg = GridFormats::default();
    let f = reg.get(format).ok_or_else(|| ParseDiagnostic::error(1, 1, format!("unknown grid format '{format}'")))?;
    f.parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Vec3;

    const ONES: &str = "ones\n2 0 0\n0 3 0\n0 0 4\n2 2 2\n1 1 1 1 1\n1 1 1\n";

    #[test]
    fn simple_all_ones() {
        let f = parse_simple_grid(ONES).unwrap();
        assert_eq!(f.grid.convention(), Some(GridConvention::Raw));
        assert!((f.grid.integral().unwrap() - 24.0).abs() < 1e-12);
        let w = write_simple_grid(&f.grid, "ones");
        assert_eq!(write_simple_grid(&parse_simple_grid(&w).unwrap().grid, "ones"), w);
    }

    #[test]
    fn dims_errors_are_located() {
        let e = parse_simple_grid(&ONES.replace("2 2 2", "3 3")).unwrap_err();
        assert_eq!(e.line, 5);
        let head = "ones\n2 0 0\n0 3 0\n0 0 4\n2 2 2\n1 1 1 1 1\n";
        let e = parse_simple_grid(&format!("{head}1 1\n")).unwrap_err();
        assert_eq!(e.line, 8);
        assert!(e.message.contains("expected 8 values"));
        let e = parse_simple_grid(&format!("{head}1 1 nan\n")).unwrap_err();
        assert_eq!((e.line, e.column), (7, 5));
    }

    fn gaussian_chgcar(n: usize) -> (String, f64) {
        let text = crate::io::structure::tests::DIAMOND8.replace("3.56775", "7.1355");
        let s = crate::io::parse_poscar(&text).unwrap();
        let l = s.cell().vector(0).norm();
        let centre = Vec3::repeat(l / 2.0);
        let a: f64 = 2.0;
        let electrons = 3.0;
        let norm = electrons * (a / std::f64::consts::PI).powf(1.5);
        let vol = s.cell().volume();
        let g = VolumetricGrid::from_fn(s.cell().clone(), [n; 3], Some(GridConvention::Volume), |r| {
            norm * (-a * (r - centre).norm_squared()).exp() * vol
        })
        .unwrap();
        let spin = VolumetricGrid::new(s.cell().clone(), [n; 3], vec![0.5; n * n * n], Some(GridConvention::Volume)).unwrap();
        let mut text = write_chgcar(&s, &g, None, "gauss");
        // spin-polarized tail with an augmentation block in between
        text.push_str("augmentation occupancies   1   2\n 0.1 0.2\n");
        text.push_str(&format!("{n} {n} {n}\n"));
        for c in spin.values().chunks(5) {
            text.push_str(&c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
            text.push('\n');
        }
        (text, electrons)
    }

    #[test]
    fn chgcar_electron_count_and_spin_block() {
        let (text, n_e) = gaussian_chgcar(24);
        let f = parse_chgcar(&text).unwrap();
        assert_eq!(f.grid.convention(), Some(GridConvention::Volume));
        assert!((f.grid.integral().unwrap() - n_e).abs() < 1e-6);
        let spin = f.spin.unwrap();
        assert!((spin.integral().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn values_survive_bit_exactly() {
        let (text, _) = gaussian_chgcar(6);
        let f = parse_chgcar(&text).unwrap();
        let again = parse_chgcar(&write_chgcar(f.structure.as_ref().unwrap(), &f.grid, None, "gauss")).unwrap();
        assert_eq!(
            f.grid.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            again.grid.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
