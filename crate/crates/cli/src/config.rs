//! Material overrides from `key = value` files.

use anyhow::{bail, Context, Result};
use dotbus::energetics::{Energy, MaterialParams, ELECTRON_MASS};
use std::path::Path;

const KEYS: [&str; 4] = ["m_eff", "eps_r", "hbar_omega0_mev", "eta"];

/// Parses `key = value` lines over GaAs defaults. `m_eff` is in electron
/// masses and `hbar_omega0_mev` in meV. Blank lines and `#`
/// comments are skipped; unknown or repeated keys are rejected.
pub fn parse_material(text: &str) -> Result<MaterialParams> {
    let mut params = MaterialParams::gaas();
    let mut seen = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            bail!("line {}: unknown key '{key}' (expected one of {})", lineno + 1, KEYS.join(", "));
        }
        if seen.contains(&key) {
            bail!("line {}: '{key}' given twice", lineno + 1);
        }
        seen.push(key);
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("line {}: '{}' is not a number", lineno + 1, value.trim()))?;
        match key {
            "m_eff" => params.m_eff = value * ELECTRON_MASS,
            "eps_r" => params.eps_r = value,
            "hbar_omega0_mev" => params.hbar_omega0 = Energy::from_mev(value),
            "eta" => params.eta = value,
            _ => unreachable!(),
        }
    }
    params.validate()?;
    Ok(params)
}

pub fn load_material(path: Option<&Path>) -> Result<MaterialParams> {
    match path {
        None => Ok(MaterialParams::gaas()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_material(&text).with_context(|| format!("in {}", p.display()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        assert_eq!(parse_material("").unwrap(), MaterialParams::gaas());
        let p = parse_material("# silicon-ish\nm_eff = 0.19\neps_r=11.7 # inline\n\nhbar_omega0_mev = 2.5\n").unwrap();
        assert_eq!(p.m_eff, 0.19 * ELECTRON_MASS);
        assert_eq!(p.eps_r, 11.7);
        assert!((p.hbar_omega0.mev() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_material("mass = 0.1").is_err());
        assert!(parse_material("m_eff 0.1").is_err());
        assert!(parse_material("m_eff = abc").is_err());
        assert!(parse_material("m_eff = 0.1\nm_eff = 0.2").is_err());
        assert!(parse_material("eps_r = -1").is_err());
    }
}
