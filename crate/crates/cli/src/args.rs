//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "colorcenter", version, about = "Point-defect post-processing toolkit for diamond")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Worker threads for parallel sections (results do not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file of numeric defaults (overrides $COLORCENTER_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one default, `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Supercells, defect fixtures, cluster carving and capping.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Continuous symmetry measures, detection, irrep algebra.
    #[command(subcommand)]
    Sym(SymCmd),
    /// Oscillator strengths and radiative lifetimes.
    #[command(subcommand)]
    Optics(OpticsCmd),
    /// Zero-field splitting.
    #[command(subcommand)]
    Zfs(ZfsCmd),
    /// Charged-cell finite-size corrections.
    #[command(subcommand)]
    Corr(CorrCmd),
    /// Reaction energies and level diagrams.
    #[command(subcommand)]
    Thermo(ThermoCmd),
    /// Embedding-potential projection and density matching.
    #[command(subcommand)]
    Embed(EmbedCmd),
}

/// A defected structure: a built-in fixture or a POSCAR plus dopant id.
#[derive(Debug, Args)]
pub struct StructureSource {
    /// Built-in fixture: ocvc or vcocvc.
    #[arg(long, conflicts_with = "structure", required_unless_present = "structure")]
    pub kind: Option<String>,
    /// POSCAR of a defected supercell.
    #[arg(long, requires = "dopant")]
    pub structure: Option<PathBuf>,
    /// Site id (0-based, file order) of the dopant in --structure.
    #[arg(long, requires = "structure")]
    pub dopant: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Pristine diamond supercell.
    Build {
        /// Multiples along each vector.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Use 8-atom conventional cubic cells instead of primitive cells.
        #[arg(long)]
        conventional: bool,
        #[arg(long)]
        a0: Option<f64>,
        /// Also write the structure as POSCAR.
        #[arg(long)]
        poscar: Option<PathBuf>,
    },
    /// Built-in defect fixture with its coordination report.
    Defect {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        a0: Option<f64>,
        #[arg(long)]
        poscar: Option<PathBuf>,
    },
    /// Carve the defect cluster.
    Carve {
        #[command(flatten)]
        source: StructureSource,
    },
    /// Carve and cap the defect cluster.
    Cap {
        #[command(flatten)]
        source: StructureSource,
        /// Capping scheme: cluster or environment.
        #[arg(long, default_value = "cluster")]
        scheme: String,
        /// Also write the capped atoms as XYZ.
        #[arg(long)]
        xyz: Option<PathBuf>,
    },
}

/// Points to analyse: a capped built-in cluster or raw XYZ atoms.
#[derive(Debug, Args)]
pub struct PointSource {
    /// Capped cluster of a built-in fixture (ocvc or vcocvc).
    #[arg(long, conflicts_with = "xyz", required_unless_present = "xyz")]
    pub kind: Option<String>,
    /// XYZ file, coordinates used as written.
    #[arg(long)]
    pub xyz: Option<PathBuf>,
    /// Reference point x,y,z (Å). Defaults to the dopant for --kind and to
    /// the centroid for --xyz.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub center: Option<[f64; 3]>,
}

#[derive(Debug, Subcommand)]
pub enum SymCmd {
    /// S'(G) in a given frame.
    Csm {
        #[command(flatten)]
        points: PointSource,
        #[arg(long)]
        group: String,
        /// Frame z axis, x,y,z (with --xyz; --kind uses the fixture frame).
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, requires = "x_axis")]
        z_axis: Option<[f64; 3]>,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, requires = "z_axis")]
        x_axis: Option<[f64; 3]>,
    },
    /// Highest-order group with S' below the threshold.
    Detect {
        #[command(flatten)]
        points: PointSource,
        #[arg(long)]
        threshold: Option<f64>,
        /// Comma-separated candidate groups (default: all).
        #[arg(long, value_delimiter = ',')]
        groups: Vec<String>,
    },
    /// Direct product of two irreps.
    Product {
        #[arg(long)]
        group: String,
        a: String,
        b: String,
    },
    /// State label of an orbital configuration.
    Label {
        #[arg(long)]
        group: String,
        /// LABEL:IRREP[:COMPONENT]=OCC, repeatable, e.g. 3a1:A1=1.
        #[arg(long = "orbital", required = true)]
        orbitals: Vec<String>,
        /// Total spin S.
        #[arg(long)]
        spin: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OpticsCmd {
    /// Evaluate a transition table (JSON).
    Eval {
        file: PathBuf,
        /// Refractive index for records without their own.
        #[arg(long)]
        n_r: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZfsCmd {
    /// D, E and principal axes of a tensor (GHz).
    Params {
        /// Nine row-major components.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        tensor: Vec<f64>,
    },
    /// Triplet levels and transitions for (D, E).
    Levels {
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long, allow_negative_numbers = true)]
        e: f64,
    },
    /// Point-dipole tensor of a spin-site model (JSON).
    Dipolar { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct CellArgs {
    /// Cubic cell edge, Å.
    #[arg(long = "L")]
    pub l: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Madelung constant.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum CorrCmd {
    /// Monopole–monopole term.
    Mm {
        #[arg(long, allow_negative_numbers = true)]
        q: i32,
        #[command(flatten)]
        cell: CellArgs,
    },
    /// Charge, dipole and second radial moment of a density grid.
    Moments {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        grid_format: String,
        /// Origin x,y,z (Å); defaults to the cell centre.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        origin: Option<[f64; 3]>,
    },
    /// All correction terms, optionally applied to a raw energy.
    Apply {
        #[arg(long, allow_negative_numbers = true)]
        q: i32,
        #[command(flatten)]
        cell: CellArgs,
        /// Quadrupole of the charged defect, e·Å².
        #[arg(long, allow_negative_numbers = true, requires = "q0")]
        qq: Option<f64>,
        /// Quadrupole of the neutral reference, e·Å².
        #[arg(long, allow_negative_numbers = true, requires = "qq")]
        q0: Option<f64>,
        /// Dipole x,y,z, e·Å (neutral cells only).
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        dipole: Option<[f64; 3]>,
        /// Uncorrected total energy, eV.
        #[arg(long, allow_negative_numbers = true)]
        e_raw: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ThermoCmd {
    /// Energy of a balanced reaction (JSON ledger + reaction).
    React { file: PathBuf },
    /// One level from a charge-transfer energy, or the complement of a level.
    Ladder {
        #[arg(long, allow_negative_numbers = true, conflicts_with = "level", required_unless_present = "level")]
        delta_e_ct: Option<f64>,
        /// (IE + ε_CBM) given directly, eV.
        #[arg(long, allow_negative_numbers = true)]
        level: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        anchor: Option<f64>,
        #[arg(long)]
        gap: Option<f64>,
    },
    /// Level diagram and donor/acceptor pairs (JSON level list).
    Diagram {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        anchor: Option<f64>,
        #[arg(long)]
        gap: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EmbedCmd {
    /// Project a potential grid onto a Gaussian basis.
    Project {
        /// Potential grid, hartree.
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        /// XYZ atoms carrying the basis, Å in the grid's cell frame.
        #[arg(long)]
        atoms: PathBuf,
        #[arg(long, default_value = "auto")]
        grid_format: String,
        /// Fold basis functions into the nearest periodic image.
        #[arg(long)]
        wrap: bool,
    },
    /// ρ_cl + ρ_env − ρ_caps − ρ_full and its norms.
    Residual {
        #[arg(long)]
        cl: PathBuf,
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        caps: PathBuf,
        #[arg(long)]
        full: PathBuf,
        #[arg(long, default_value = "auto")]
        grid_format: String,
    },
    /// Value of the density-matching functional.
    Wuyang {
        #[arg(long, allow_negative_numbers = true)]
        e_cl: f64,
        #[arg(long, allow_negative_numbers = true)]
        e_env: f64,
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        rho_full: PathBuf,
        #[arg(long)]
        rho_caps: PathBuf,
        #[arg(long, default_value = "auto")]
        grid_format: String,
    },
}

pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("'{p}' is not a finite number"))?;
    }
    Ok(v)
}
