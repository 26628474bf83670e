//! Parsers never panic and always point inside the input when they fail.

use colorcenter::io::*;
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

type Parser = fn(&str) -> Result<(), ParseDiagnostic>;

const PARSERS: [(&str, Parser); 10] = [
    ("poscar", |t| parse_poscar(t).map(drop)),
    ("xyz", |t| parse_xyz(t).map(drop)),
    ("chgcar", |t| parse_chgcar(t).map(drop)),
    ("simple", |t| parse_simple_grid(t).map(drop)),
    ("basis", |t| parse_basis(t).map(drop)),
    ("ledger", |t| parse_ledger(t).map(drop)),
    ("reaction", |t| parse_reaction_input(t).map(drop)),
    ("transitions", |t| parse_transitions(t).map(drop)),
    ("spinsites", |t| parse_spinsites(t).map(drop)),
    ("levels", |t| parse_levels(t).map(drop)),
];

/// The diagnostic must name a real line (or the one just past the end) and
/// a column no further than one past that line's last character.
fn located(text: &str, d: &ParseDiagnostic) -> bool {
    let lines: Vec<&str> = text.split('\n').collect();
    if d.line == 0 || d.column == 0 || d.line > lines.len() + 1 {
        return false;
    }
    let width = lines.get(d.line - 1).map_or(0, |l| l.chars().count());
    d.column <= width + 2
}

fn check_all(text: &str) -> Result<(), TestCaseError> {
    for (name, p) in PARSERS {
        if let Err(d) = p(text) {
            prop_assert!(located(text, &d), "{name}: {d} for {text:?}");
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_text(text in "\\PC{0,200}") {
        check_all(&text)?;
    }

    #[test]
    fn numeric_soup(text in "[0-9eE+\\-. \\n\\tCOFa-z{}\\[\\]:,\"]{0,300}") {
        check_all(&text)?;
    }

    #[test]
    fn mutated_fixtures(which in 0usize..6, pos in any::<prop::sample::Index>(), junk in "\\PC{0,8}", cut in any::<bool>()) {
        let name = ["diamond8.vasp", "atoms.xyz", "basis.txt", "levels.json", "reaction.json", "table1.json"][which];
        let base = fixture(name);
        let mut at = pos.index(base.len() + 1);
        while !base.is_char_boundary(at) {
            at -= 1;
        }
        let text = if cut { base[..at].to_string() } else { format!("{}{junk}{}", &base[..at], &base[at..]) };
        check_all(&text)?;
    }
}

#[test]
fn writers_round_trip() {
    let s = parse_poscar(&fixture("diamond8.vasp")).unwrap();
    assert_eq!(parse_poscar(&write_poscar(&s, "x")).unwrap(), s);
    let lib = parse_basis(&fixture("basis.txt")).unwrap();
    assert_eq!(parse_basis(&write_basis(&lib)).unwrap(), lib);
    let atoms = parse_xyz_atoms(&fixture("atoms.xyz")).unwrap();
    assert_eq!(parse_xyz_atoms(&write_xyz_atoms(&atoms, "x")).unwrap(), atoms);
    let g = parse_simple_grid(&fixture("gauss.grid")).unwrap();
    assert_eq!(parse_simple_grid(&write_simple_grid(&g.grid, "x")).unwrap().grid, g.grid);
}
