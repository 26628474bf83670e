//! Numeric defaults and how they are overridden.
//!
//! Precedence, highest first: per-command flags, `--set key=value`, the
//! config file (`--config` or `$COLORCENTER_CONFIG`), built-in defaults.
//! The config file is flat TOML, e.g.
//!
//! ```toml
//! eps_r = 5.69
//! anchor = 3.09
//! ```

use serde::Serialize;

use colorcenter::corrections::{DEFAULT_EPS_R, MADELUNG_SC};
use colorcenter::embed::DEFAULT_SPACING;
use colorcenter::lattice::{DEFAULT_A0, DEFAULT_BOND_CUTOFF};
use colorcenter::optics::DEFAULT_REFRACTIVE_INDEX;
use colorcenter::symmetry::DEFAULT_THRESHOLD;
use colorcenter::thermo::{DEFAULT_GAP, DEFAULT_LADDER_ANCHOR};

pub const CONFIG_ENV: &str = "COLORCENTER_CONFIG";

pub const KEYS: [&str; 9] =
    ["a0", "eps_r", "n_r", "gap", "anchor", "alpha", "sym_threshold", "grid_spacing", "bond_cutoff"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    /// Cubic lattice constant, Å.
    pub a0: f64,
    pub eps_r: f64,
    pub n_r: f64,
    /// Band gap, eV.
    pub gap: f64,
    /// Ladder anchor, eV.
    pub anchor: f64,
    /// Madelung constant.
    pub alpha: f64,
    pub sym_threshold: f64,
    /// Å
    pub grid_spacing: f64,
    /// Å
    pub bond_cutoff: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            a0: DEFAULT_A0,
            eps_r: DEFAULT_EPS_R,
            n_r: DEFAULT_REFRACTIVE_INDEX,
            gap: DEFAULT_GAP,
            anchor: DEFAULT_LADDER_ANCHOR,
            alpha: MADELUNG_SC,
            sym_threshold: DEFAULT_THRESHOLD,
            grid_spacing: DEFAULT_SPACING,
            bond_cutoff: DEFAULT_BOND_CUTOFF,
        }
    }
}

impl Settings {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "a0" => &mut self.a0,
            "eps_r" => &mut self.eps_r,
            "n_r" => &mut self.n_r,
            "gap" => &mut self.gap,
            "anchor" => &mut self.anchor,
            "alpha" => &mut self.alpha,
            "sym_threshold" => &mut self.sym_threshold,
            "grid_spacing" => &mut self.grid_spacing,
            "bond_cutoff" => &mut self.bond_cutoff,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        if !value.is_finite() {
            return Err(format!("{key} must be finite"));
        }
        // The anchor is an energy offset and may take any sign.
        if key != "anchor" && value <= 0.0 {
            return Err(format!("{key} must be positive, got {value}"));
        }
        let slot = self.slot(key).ok_or_else(|| format!("unknown setting '{key}' (known: {})", KEYS.join(", ")))?;
        *slot = value;
        Ok(())
    }

    /// `key=value` from the command line.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), String> {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got '{kv}'"))?;
        let k = k.trim();
        let v: f64 = v.trim().parse().map_err(|_| format!("value of {k} is not a number: '{}'", v.trim()))?;
        self.set(k, v)
    }

    /// Flat TOML; errors carry a 1-based (line, column).
    pub fn apply_toml(&mut self, text: &str) -> Result<(), (usize, usize, String)> {
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            let (l, c) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            (l, c, e.message().to_string())
        })?;
        for (k, v) in &table {
            let (l, c) = key_location(text, k);
            let x = match v {
                toml::Value::Float(f) => *f,
                toml::Value::Integer(i) => *i as f64,
                _ => return Err((l, c, format!("{k} must be a number"))),
            };
            self.set(k, x).map_err(|m| (l, c, m))?;
        }
        Ok(())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let start = before.rfind('\n').map_or(0, |p| p + 1);
    (line, before[start..].chars().count() + 1)
}

fn key_location(text: &str, key: &str) -> (usize, usize) {
    for (n, l) in text.lines().enumerate() {
        let t = l.trim_start();
        let rest = t.strip_prefix(key).or_else(|| t.strip_prefix(&format!("\"{key}\"")));
        if rest.is_some_and(|r| r.trim_start().starts_with('=')) {
            return (n + 1, l.len() - t.len() + 1);
        }
    }
    (1, 1)
}
