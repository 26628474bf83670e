//! Subcommand handlers: read inputs, call the library, build a report.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use colorcenter::corrections::{
    corrected_energy, correction_report, cubic_length, grid_moments, madelung_mm, CorrectionPieces, DielectricModel,
};
use colorcenter::element::Element;
use colorcenter::embed::{density_residual, project_potential, wu_yang_value, EvalOptions};
use colorcenter::io::{
    parse_basis, parse_grid, parse_levels, parse_poscar, parse_reaction_input, parse_spinsites, parse_transitions,
    parse_xyz_atoms, write_poscar, write_xyz_atoms, GridFile, ParseDiagnostic, ReportEnvelope,
};
use colorcenter::lattice::{
    build_diamond_supercell, build_primitive_supercell, cap_cluster, carve_cluster, coordination,
    defect_cluster_selection, defect_fixture_with, CappingRegistry, CarvedCluster, CoordinationReport, DefectFixture,
    DefectKind, SiteClass, Structure, Vec3, DEFAULT_SECOND_SHELL_CUTOFF,
};
use colorcenter::optics::evaluate;
use colorcenter::symmetry::{
    assign_state_irrep, csm, detect_point_group, irrep_product, DetectOptions, ElectronConfiguration, Orbital,
    PointGroup, GROUP_NAMES,
};
use colorcenter::thermo::{build_level_diagram, reaction_energy, LevelInput};
use colorcenter::zfs::{dipolar_constant_ghz, point_dipole_tensor, principal_params, triplet_levels, ZfsTensor};

use crate::args::{
    Command, CorrCmd, EmbedCmd, LatticeCmd, OpticsCmd, PointSource, StructureSource, SymCmd, ThermoCmd, ZfsCmd,
};
use crate::{domain, CliError, Ctx, Report};

pub(crate) fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Report, CliError> {
    match cmd {
        Command::Lattice(c) => lattice(c, ctx),
        Command::Sym(c) => sym(c, ctx),
        Command::Optics(c) => optics(c, ctx),
        Command::Zfs(c) => zfs(c, ctx),
        Command::Corr(c) => corr(c, ctx),
        Command::Thermo(c) => thermo(c, ctx),
        Command::Embed(c) => embed(c, ctx),
    }
}

fn envelope(module: &str, op: &str, payload: impl Serialize) -> Result<ReportEnvelope, CliError> {
    ReportEnvelope::new(module, op, payload).map_err(domain)
}

fn report(envelope: ReportEnvelope) -> Report {
    Report { envelope, artifacts: Vec::new() }
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {x}")))
    }
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::from(a)
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

// ---------------------------------------------------------------- lattice

fn fixture(kind: &str, a0: f64) -> Result<DefectFixture, CliError> {
    let k = DefectKind::parse(kind)
        .ok_or_else(|| CliError::Usage(format!("unknown fixture '{kind}' (expected ocvc or vcocvc)")))?;
    defect_fixture_with(k, positive("a0", a0)?).map_err(domain)
}

#[derive(Serialize)]
struct CoordSummary {
    bond_cutoff: f64,
    /// All three-fold coordinated carbons, C[3c].
    c3c: usize,
    type_i: usize,
    type_ii: usize,
    three_fold_other: usize,
    dopant_neighbors: usize,
    four_fold: usize,
}

fn coord_summary(r: &CoordinationReport) -> CoordSummary {
    CoordSummary {
        bond_cutoff: r.bond_cutoff,
        c3c: r.three_fold_carbons().len(),
        type_i: r.count(SiteClass::ThreeFoldTypeI),
        type_ii: r.count(SiteClass::ThreeFoldTypeII),
        three_fold_other: r.count(SiteClass::ThreeFoldOther),
        dopant_neighbors: r.count(SiteClass::DopantNeighbor),
        four_fold: r.count(SiteClass::FourFold),
    }
}

fn cell_json(s: &Structure) -> serde_json::Value {
    json!({ "vectors": s.cell().vectors(), "volume": s.cell().volume() })
}

struct Carved {
    carved: CarvedCluster,
    dopant_id: usize,
    /// Frame of a built-in fixture.
    axes: Option<[Vec3; 3]>,
}

fn carve(src: &StructureSource, ctx: &mut Ctx) -> Result<Carved, CliError> {
    let bond = positive("bond_cutoff", ctx.settings.bond_cutoff)?;
    let (s, dopant_id, axes) = match (&src.kind, &src.structure, src.dopant) {
        (Some(k), _, _) => {
            let f = fixture(k, ctx.settings.a0)?;
            (f.structure, f.dopant_id, Some(f.axes))
        }
        (None, Some(p), Some(d)) => {
            let text = ctx.read("structure", p)?;
            (ctx.parsed(p, parse_poscar(&text))?, d, None)
        }
        _ => return Err(CliError::Usage("give --kind, or --structure with --dopant".into())),
    };
    let sel = defect_cluster_selection(&s, dopant_id, bond, DEFAULT_SECOND_SHELL_CUTOFF).map_err(domain)?;
    let carved = carve_cluster(&s, &sel, bond).map_err(domain)?;
    Ok(Carved { carved, dopant_id, axes })
}

fn lattice(c: &LatticeCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    match c {
        LatticeCmd::Build { n, conventional, a0, poscar } => {
            let a0 = positive("a0", a0.unwrap_or(ctx.settings.a0))?;
            if *n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let s = if *conventional {
                build_diamond_supercell([*n; 3], a0)
            } else {
                build_primitive_supercell([*n; 3], a0)
            }
            .map_err(domain)?;
            let payload = json!({
                "a0": a0,
                "multiples": [n, n, n],
                "cell_type": if *conventional { "conventional" } else { "primitive" },
                "atoms": s.len(),
                "formula": s.formula(),
                "cell": cell_json(&s),
            });
            let mut r = report(envelope("lattice", "build", payload)?.unit("a0", "angstrom").unit("cell.volume", "angstrom^3"));
            if let Some(p) = poscar {
                r.artifacts.push((p.clone(), write_poscar(&s, &format!("diamond {n}x{n}x{n}"))));
            }
            Ok(r)
        }
        LatticeCmd::Defect { kind, a0, poscar } => {
            let f = fixture(kind, a0.unwrap_or(ctx.settings.a0))?;
            let coord = coordination(&f.structure, positive("bond_cutoff", ctx.settings.bond_cutoff)?);
            let payload = json!({
                "kind": f.kind.name(),
                "atoms": f.structure.len(),
                "formula": f.structure.formula(),
                "dopant_id": f.dopant_id,
                "vacancy_ids": f.vacancy_ids,
                "center": arr(&f.center),
                "axes": f.axes.map(|a| arr(&a)),
                "point_group": f.point_group,
                "coordination": coord_summary(&coord),
                "cell": cell_json(&f.structure),
            });
            let mut r = report(envelope("lattice", "defect", payload)?.unit("center", "angstrom"));
            if let Some(p) = poscar {
                r.artifacts.push((p.clone(), write_poscar(&f.structure, f.kind.name())));
            }
            Ok(r)
        }
        LatticeCmd::Carve { source } => {
            let c = carve(source, ctx)?;
            let k = &c.carved;
            let payload = json!({
                "dopant_id": c.dopant_id,
                "core_formula": k.core_formula(),
                "core_atoms": k.core.len(),
                "core_ids": k.core.iter().map(|a| a.id).collect::<Vec<_>>(),
                "boundary_bonds": k.bonds.len(),
                "external_sites": k.external.len(),
                "multiplicity_histogram": k.multiplicity_histogram(),
                "bond_cutoff": k.bond_cutoff,
            });
            Ok(report(envelope("lattice", "carve", payload)?.unit("bond_cutoff", "angstrom")))
        }
        LatticeCmd::Cap { source, scheme, xyz } => {
            let c = carve(source, ctx)?;
            let reg = CappingRegistry::default();
            let sch = reg
                .get(scheme)
                .ok_or_else(|| CliError::Usage(format!("unknown capping scheme '{scheme}' (known: {})", reg.names().join(", "))))?;
            let capped = cap_cluster(&c.carved, sch).map_err(domain)?;
            let count = |e: Element| capped.caps.iter().filter(|x| x.element == e).count();
            let payload = json!({
                "scheme": capped.scheme,
                "formula": capped.formula(),
                "fragment_atoms": capped.atoms.len(),
                "caps": { "F": count(Element::F), "O": count(Element::O), "B": count(Element::B) },
                "cap_electrons": capped.cap_electrons(),
                "total_atoms": capped.atoms.len() + capped.caps.len(),
            });
            let mut r = report(envelope("lattice", "cap", payload)?);
            if let Some(p) = xyz {
                r.artifacts.push((p.clone(), write_xyz_atoms(&capped.all_atoms(), &capped.formula())));
            }
            Ok(r)
        }
    }
}

// ---------------------------------------------------------------- sym

fn group(name: &str) -> Result<PointGroup, CliError> {
    PointGroup::new(name).map_err(|e| CliError::Usage(e.to_string()))
}

struct Points {
    species: Vec<Element>,
    positions: Vec<Vec3>,
    center: Option<Vec3>,
    axes: Option<[Vec3; 3]>,
}

fn points(src: &PointSource, ctx: &mut Ctx) -> Result<Points, CliError> {
    let mut p = match (&src.kind, &src.xyz) {
        (Some(k), _) => {
            let c = carve(&StructureSource { kind: Some(k.clone()), structure: None, dopant: None }, ctx)?;
            let reg = CappingRegistry::default();
            let capped = cap_cluster(&c.carved, reg.get("cluster").expect("built-in scheme")).map_err(domain)?;
            let dopant = c.carved.core.iter().find(|a| a.id == c.dopant_id).map(|a| Vec3::from(a.position));
            let (species, positions) = capped.all_atoms().into_iter().unzip();
            Points { species, positions, center: dopant, axes: c.axes }
        }
        (None, Some(path)) => {
            let text = ctx.read("xyz", path)?;
            let atoms = ctx.parsed(path, parse_xyz_atoms(&text))?;
            let (species, positions) = atoms.into_iter().unzip();
            Points { species, positions, center: None, axes: None }
        }
        _ => return Err(CliError::Usage("give --kind or --xyz".into())),
    };
    if let Some(c) = src.center {
        p.center = Some(v3(c));
    }
    Ok(p)
}

/// Right-handed frame from a z axis and an approximate x axis.
fn frame(z: [f64; 3], x: [f64; 3]) -> Result<[Vec3; 3], CliError> {
    let z = v3(z);
    let x = v3(x);
    if z.norm() == 0.0 {
        return Err(CliError::Usage("--z-axis must be non-zero".into()));
    }
    let z = z.normalize();
    let x = x - z * x.dot(&z);
    if x.norm() < 1e-9 {
        return Err(CliError::Usage("--x-axis must not be parallel to --z-axis".into()));
    }
    let x = x.normalize();
    Ok([x, z.cross(&x), z])
}

fn sym(c: &SymCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    match c {
        SymCmd::Csm { points: src, group: gname, z_axis, x_axis } => {
            let g = group(gname)?;
            let p = points(src, ctx)?;
            let axes = match (z_axis, x_axis) {
                (Some(z), Some(x)) => Some(frame(*z, *x)?),
                _ => p.axes,
            };
            let g = match &axes {
                Some(a) => g.oriented(a).map_err(domain)?,
                None => g,
            };
            let r = csm(&p.species, &p.positions, &g, p.center).map_err(domain)?;
            let payload = json!({
                "group": r.group,
                "s_prime": r.s_prime,
                "max_displacement": r.max_displacement(),
                "per_op_max_displacement": r.per_op_max_displacement,
                "center": arr(&r.center),
                "scale": r.scale,
                "atoms": p.positions.len(),
                "axes": g.axes().map(|a| arr(&a)),
            });
            Ok(report(envelope("sym", "csm", payload)?.unit("center", "angstrom").unit("scale", "angstrom")))
        }
        SymCmd::Detect { points: src, threshold, groups } => {
            let names: Vec<String> =
                if groups.is_empty() { GROUP_NAMES.iter().map(|s| s.to_string()).collect() } else { groups.clone() };
            let candidates = names.iter().map(|n| group(n)).collect::<Result<Vec<_>, _>>()?;
            let p = points(src, ctx)?;
            let threshold = threshold.unwrap_or(ctx.settings.sym_threshold);
            let opts = DetectOptions { threshold: positive("threshold", threshold)?, ..DetectOptions::default() };
            let d = detect_point_group(&p.species, &p.positions, &candidates, None, &opts).map_err(domain)?;
            let payload = json!({
                "group": d.group,
                "axes": d.axes,
                "s_prime": d.result.s_prime,
                "max_displacement": d.result.max_displacement(),
                "threshold": threshold,
                "scores": d.scores,
            });
            Ok(report(envelope("sym", "detect", payload)?))
        }
        SymCmd::Product { group: gname, a, b } => {
            let g = group(gname)?;
            let d = irrep_product(a, b, &g).map_err(|e| CliError::Usage(e.to_string()))?;
            let payload = json!({ "group": g.name, "a": a, "b": b, "product": d, "label": d.names().join(" + ") });
            Ok(report(envelope("sym", "product", payload)?))
        }
        SymCmd::Label { group: gname, orbitals, spin } => {
            let g = group(gname)?;
            let mut cfg = ElectronConfiguration { orbitals: Vec::new(), occupations: Vec::new(), spin: *spin };
            for spec in orbitals {
                let (o, n) = parse_orbital(spec)?;
                cfg.orbitals.push(o);
                cfg.occupations.push(n);
            }
            let l = assign_state_irrep(&cfg, &g).map_err(domain)?;
            let payload = json!({
                "group": g.name,
                "label": l.label,
                "multiplicity": l.multiplicity,
                "spatial": l.spatial,
                "electrons": cfg.electron_count(),
            });
            Ok(report(envelope("sym", "label", payload)?))
        }
    }
}

/// `LABEL:IRREP[:COMPONENT]=OCC`.
fn parse_orbital(spec: &str) -> Result<(Orbital, u8), CliError> {
    let bad = || CliError::Usage(format!("--orbital '{spec}': expected LABEL:IRREP[:COMPONENT]=OCC"));
    let (lhs, occ) = spec.split_once('=').ok_or_else(bad)?;
    let occ: u8 = occ.trim().parse().map_err(|_| bad())?;
    let parts: Vec<&str> = lhs.split(':').map(str::trim).collect();
    if parts.len() < 2 || parts.len() > 3 || parts.iter().any(|p| p.is_empty()) {
        return Err(bad());
    }
    let o = Orbital { label: parts[0].into(), irrep: parts[1].into(), component: parts.get(2).map(|s| s.to_string()) };
    Ok((o, occ))
}

// ---------------------------------------------------------------- optics

fn optics(c: &OpticsCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    let OpticsCmd::Eval { file, n_r } = c;
    let text = ctx.read("transitions", file)?;
    let input = ctx.parsed(file, parse_transitions(&text))?;
    let n_default = positive("n_r", n_r.or(input.n_r).unwrap_or(ctx.settings.n_r))?;
    let rows = input.transitions.iter().map(|t| evaluate(t, n_default)).collect::<Result<Vec<_>, _>>().map_err(domain)?;
    let payload = json!({ "n_r_default": n_default, "rows": rows });
    Ok(report(
        envelope("optics", "eval", payload)?
            .unit("rows.vee_ev", "eV")
            .unit("rows.mu_debye", "debye")
            .unit("rows.lifetime.tau_ns", "ns")
            .unit("rows.lifetime.einstein_a_per_ns", "1/ns"),
    ))
}

// ---------------------------------------------------------------- zfs

fn zfs(c: &ZfsCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    let ghz = |e: ReportEnvelope| e.unit("d", "GHz").unit("e", "GHz").unit("tensor", "GHz").unit("levels", "GHz");
    match c {
        ZfsCmd::Params { tensor } => {
            if tensor.len() != 9 {
                return Err(CliError::Usage(format!("--tensor needs 9 comma-separated values, got {}", tensor.len())));
            }
            let rows: [[f64; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|k| tensor[3 * r + k]));
            let t = ZfsTensor::new(rows).map_err(domain)?;
            let p = principal_params(&t);
            let payload = json!({
                "tensor": t.rows(),
                "d": p.params.d,
                "e": p.params.e,
                "axes": p.params.axes,
                "principal_values": p.principal_values,
                "isotropic": p.isotropic,
                "ambiguous_axis": p.ambiguous_axis,
                "levels": triplet_levels(p.params.d, p.params.e),
            });
            Ok(report(ghz(envelope("zfs", "params", payload)?)))
        }
        ZfsCmd::Levels { d, e } => {
            if !(d.is_finite() && e.is_finite()) {
                return Err(CliError::Usage("--d and --e must be finite".into()));
            }
            let l = triplet_levels(*d, *e);
            let payload = json!({ "d": d, "e": e, "levels": l.levels, "transitions": l.transitions });
            Ok(report(ghz(envelope("zfs", "levels", payload)?).unit("transitions", "GHz")))
        }
        ZfsCmd::Dipolar { file } => {
            let text = ctx.read("spinsites", file)?;
            let m = ctx.parsed(file, parse_spinsites(&text))?;
            let t = point_dipole_tensor(&m).map_err(domain)?;
            let p = principal_params(&t);
            let payload = json!({
                "tensor": t.rows(),
                "d": p.params.d,
                "e": p.params.e,
                "axes": p.params.axes,
                "principal_values": p.principal_values,
                "g_factor": m.g_factor,
                "sites": m.sites.len(),
                "dipolar_constant_ghz": dipolar_constant_ghz(m.g_factor),
                "levels": triplet_levels(p.params.d, p.params.e),
            });
            Ok(report(ghz(envelope("zfs", "dipolar", payload)?).unit("dipolar_constant_ghz", "GHz*angstrom^3")))
        }
    }
}

// ---------------------------------------------------------------- corr

fn read_grid(ctx: &mut Ctx, role: &str, path: &Path, format: &str) -> Result<GridFile, CliError> {
    let text = ctx.read(role, path)?;
    let fmt = match format {
        "auto" => {
            // CHGCAR line 2 is a single scale factor; the simple format
            // starts with a lattice vector.
            match text.lines().nth(1).map(|l| l.split_whitespace().count()) {
                Some(1) => "chgcar",
                _ => "simple",
            }
        }
        f => f,
    };
    if !matches!(fmt, "chgcar" | "simple") {
        return Err(CliError::Usage(format!("unknown grid format '{fmt}' (expected auto, chgcar or simple)")));
    }
    ctx.parsed(path, parse_grid(&text, fmt))
}

fn corr(c: &CorrCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    match c {
        CorrCmd::Mm { q, cell } => {
            let diel = DielectricModel::new(cell.eps.unwrap_or(ctx.settings.eps_r)).map_err(domain)?;
            let alpha = cell.alpha.unwrap_or(ctx.settings.alpha);
            let e = madelung_mm(*q as f64, cell.l, &diel, alpha).map_err(domain)?;
            let payload = json!({ "q": q, "l": cell.l, "eps_r": diel.eps_r, "alpha": alpha, "e_mm": e });
            Ok(report(envelope("corr", "mm", payload)?.unit("l", "angstrom").unit("e_mm", "eV")))
        }
        CorrCmd::Moments { file, grid_format, origin } => {
            let g = read_grid(ctx, "grid", file, grid_format)?.grid;
            let o = match origin {
                Some(o) => v3(*o),
                None => g.cell().to_cartesian(&Vec3::repeat(0.5)),
            };
            let m = grid_moments(&g, &o).map_err(domain)?;
            let payload = json!({
                "origin": arr(&o),
                "charge": m.charge,
                "dipole": m.dipole,
                "quadrupole": m.quadrupole,
                "cubic_length": cubic_length(g.cell()).ok(),
                "dims": g.dims(),
            });
            Ok(report(
                envelope("corr", "moments", payload)?
                    .unit("origin", "angstrom")
                    .unit("charge", "e")
                    .unit("dipole", "e*angstrom")
                    .unit("quadrupole", "e*angstrom^2")
                    .unit("cubic_length", "angstrom"),
            ))
        }
        CorrCmd::Apply { q, cell, qq, q0, dipole, e_raw } => {
            let diel = DielectricModel::new(cell.eps.unwrap_or(ctx.settings.eps_r)).map_err(domain)?;
            let alpha = cell.alpha.unwrap_or(ctx.settings.alpha);
            let quad = qq.zip(*q0);
            let r = correction_report(*q, cell.l, &diel, alpha, quad, *dipole).map_err(domain)?;
            let corrected = match e_raw {
                Some(e) => {
                    let charged = *q != 0;
                    let pieces = CorrectionPieces {
                        e_mm: charged.then_some(r.e_mm),
                        e_mq: (charged && quad.is_some()).then_some(r.e_mq),
                        e_dd: dipole.map(|_| r.e_dd),
                    };
                    Some(corrected_energy(*e, &pieces).map_err(domain)?)
                }
                None => None,
            };
            let payload = json!({ "correction": r, "e_raw": e_raw, "e_corrected": corrected });
            Ok(report(
                envelope("corr", "apply", payload)?
                    .unit("correction.l", "angstrom")
                    .unit("correction.e_mm", "eV")
                    .unit("correction.e_mq", "eV")
                    .unit("correction.e_dd", "eV")
                    .unit("correction.total", "eV")
                    .unit("e_raw", "eV")
                    .unit("e_corrected", "eV"),
            ))
        }
    }
}

// ---------------------------------------------------------------- thermo

fn thermo(c: &ThermoCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    match c {
        ThermoCmd::React { file } => {
            let text = ctx.read("reaction", file)?;
            let input = ctx.parsed(file, parse_reaction_input(&text))?;
            let r = reaction_energy(&input.ledger, &input.reaction).map_err(domain)?;
            let payload = json!({
                "delta_e": r.delta_e,
                "mixed_corrections": r.mixed_corrections,
                "lhs": input.reaction.lhs,
                "rhs": input.reaction.rhs,
            });
            Ok(report(envelope("thermo", "react", payload)?.unit("delta_e", "eV")))
        }
        ThermoCmd::Ladder { delta_e_ct, level, anchor, gap } => {
            let anchor = anchor.unwrap_or(ctx.settings.anchor);
            let gap = gap.unwrap_or(ctx.settings.gap);
            let input = LevelInput { label: "level".into(), delta_e_ct: *delta_e_ct, level: *level };
            let d = build_level_diagram(&[input], anchor, gap).map_err(domain)?;
            let l = &d.levels[0];
            let payload = json!({
                "delta_e_ct": delta_e_ct,
                "anchor": anchor,
                "gap": gap,
                "ie_plus_cbm": l.ie_plus_cbm,
                "ea_minus_vbm": l.ea_minus_vbm,
                "sum_rule_holds": d.sum_rule_holds(),
            });
            Ok(report(
                envelope("thermo", "ladder", payload)?
                    .unit("delta_e_ct", "eV")
                    .unit("anchor", "eV")
                    .unit("gap", "eV")
                    .unit("ie_plus_cbm", "eV")
                    .unit("ea_minus_vbm", "eV"),
            ))
        }
        ThermoCmd::Diagram { file, anchor, gap } => {
            let text = ctx.read("levels", file)?;
            let input = ctx.parsed(file, parse_levels(&text))?;
            let anchor = anchor.or(input.anchor).unwrap_or(ctx.settings.anchor);
            let gap = gap.or(input.gap).unwrap_or(ctx.settings.gap);
            let d = build_level_diagram(&input.levels, anchor, gap).map_err(domain)?;
            let payload = json!({ "diagram": d, "sum_rule_holds": d.sum_rule_holds() });
            Ok(report(
                envelope("thermo", "diagram", payload)?
                    .unit("diagram.gap", "eV")
                    .unit("diagram.anchor", "eV")
                    .unit("diagram.levels", "eV (suffix _nev: integer nano-eV)")
                    .unit("diagram.pairs.margin", "eV"),
            ))
        }
    }
}

// ---------------------------------------------------------------- embed

fn grids(ctx: &mut Ctx, fmt: &str, items: &[(&str, &PathBuf)]) -> Result<Vec<GridFile>, CliError> {
    items.iter().map(|(role, p)| read_grid(ctx, role, p, fmt)).collect()
}

fn square(values: &[f64], n: usize) -> Vec<Vec<f64>> {
    values.chunks(n.max(1)).map(|r| r.to_vec()).collect()
}

fn embed(c: &EmbedCmd, ctx: &mut Ctx) -> Result<Report, CliError> {
    match c {
        EmbedCmd::Project { potential, basis, atoms, grid_format, wrap } => {
            let v = read_grid(ctx, "potential", potential, grid_format)?.grid;
            let btext = ctx.read("basis", basis)?;
            let lib = ctx.parsed(basis, parse_basis(&btext))?;
            let atext = ctx.read("atoms", atoms)?;
            let at = ctx.parsed(atoms, parse_xyz_atoms(&atext))?;
            if at.is_empty() {
                return Err(CliError::Parse {
                    source: atoms.display().to_string(),
                    diag: ParseDiagnostic::error(1, 1, "no atoms"),
                });
            }
            let set = lib.build(&at).map_err(domain)?;
            let m = project_potential(&v, &set, EvalOptions { wrap: *wrap }).map_err(domain)?;
            let spacing = (0..3).map(|k| v.cell().vector(k).norm() / v.dims()[k] as f64).fold(0.0, f64::max);
            let functions: Vec<_> =
                set.functions().iter().map(|f| json!({ "atom": f.atom, "shell": f.shell, "label": f.label })).collect();
            let payload = json!({
                "n": m.n,
                "functions": functions,
                "matrix": square(&m.values, m.n),
                "overlap": square(&set.overlap_matrix(), m.n),
                "convention": m.convention,
                "basis_fingerprint": m.basis_fingerprint,
                "grid_fingerprint": m.grid_fingerprint,
                "dims": v.dims(),
                "max_spacing": spacing,
                "coarser_than_default": spacing > ctx.settings.grid_spacing,
                "wrap": wrap,
            });
            Ok(report(envelope("embed", "project", payload)?.unit("matrix", "hartree").unit("max_spacing", "angstrom")))
        }
        EmbedCmd::Residual { cl, env, caps, full, grid_format } => {
            let g = grids(ctx, grid_format, &[("cl", cl), ("env", env), ("caps", caps), ("full", full)])?;
            let r = density_residual(&g[0].grid, &g[1].grid, &g[2].grid, &g[3].grid).map_err(domain)?;
            let payload = json!({ "l1": r.l1, "linf": r.linf, "integrated": r.integrated, "dims": g[0].grid.dims() });
            Ok(report(
                envelope("embed", "residual", payload)?.unit("l1", "e").unit("integrated", "e").unit("linf", "e/angstrom^3"),
            ))
        }
        EmbedCmd::Wuyang { e_cl, e_env, potential, rho_full, rho_caps, grid_format } => {
            let g = grids(ctx, grid_format, &[("potential", potential), ("rho_full", rho_full), ("rho_caps", rho_caps)])?;
            let w = wu_yang_value(*e_cl, *e_env, &g[0].grid, &g[1].grid, &g[2].grid).map_err(domain)?;
            let payload = json!({ "e_cl": e_cl, "e_env": e_env, "w": w });
            Ok(report(envelope("embed", "wuyang", payload)?.unit("e_cl", "eV").unit("e_env", "eV").unit("w", "eV")))
        }
    }
}
