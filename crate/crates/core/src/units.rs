//! Physical constants and unit conversions.
//!
//! Every conversion factor used anywhere in the crate lives here. Values are
//! CODATA-2018 unless noted; the optical lifetime constants are the ones
//! printed alongside the lifetime formula and take precedence over CODATA.

/// Hartree energy in eV.
pub const HARTREE_EV: f64 = 27.211386245988;
/// Bohr radius in Å.
pub const BOHR_ANGSTROM: f64 = 0.529177210903;
/// One debye in e·bohr.
pub const DEBYE_E_BOHR: f64 = 0.393430269;

/// Speed of light in atomic units (inverse fine-structure constant), as
/// used by the radiative lifetime expression.
pub const C_AU: f64 = 137.03604;
/// Atomic unit of time expressed in ns, as used by the lifetime expression.
pub const AU_TIME_NS: f64 = 2.418884e-8;

/// 4πε₀ in e² eV⁻¹ Å⁻¹.
pub const FOUR_PI_EPS0: f64 = 0.069446;

/// Vacuum permeability μ₀ in N A⁻².
pub const MU0: f64 = 1.25663706212e-6;
/// Bohr magneton in J T⁻¹.
pub const BOHR_MAGNETON: f64 = 9.2740100783e-24;
/// Planck constant in J s.
pub const PLANCK: f64 = 6.62607015e-34;
/// Free-electron g-factor (magnitude).
pub const G_ELECTRON: f64 = 2.00231930436256;

pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn hartree_to_ev(ha: f64) -> f64 {
    ha * HARTREE_EV
}

pub fn debye_to_au(debye: f64) -> f64 {
    debye * DEBYE_E_BOHR
}

pub fn au_to_debye(e_bohr: f64) -> f64 {
    e_bohr / DEBYE_E_BOHR
}

pub fn angstrom_to_bohr(a: f64) -> f64 {
    a / BOHR_ANGSTROM
}

pub fn bohr_to_angstrom(b: f64) -> f64 {
    b * BOHR_ANGSTROM
}

/// Units policy string printed in report headers.
pub const UNITS_POLICY: &str = "length=angstrom energy=eV dipole=debye(input)|e*angstrom(grid moments) \
quadrupole=e*angstrom^2 zfs=GHz time=ns potential=hartree basis-exponent=bohr^-2";
