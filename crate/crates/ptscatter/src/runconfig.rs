//! Run-configuration files: a strict JSON schema carrying one sweep's
//! physics, device, grid and output directory.
//!
//! All physical inputs use display units — eV for energies and potentials,
//! μm for lengths — so figure captions are directly typable. Unknown fields
//! are rejected rather than ignored; a typo should fail loudly, not
//! silently run the wrong physics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::PhysParams;
use crate::spinflip::DeviceConfig;
use crate::sweep::{Outputs, SweepSpec};

fn default_mass_ratio() -> f64 {
    1.0
}

fn default_e0() -> f64 {
    1.0
}

fn default_n_points() -> usize {
    4000
}

fn default_out_dir() -> String {
    ".".into()
}

/// One run, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Real part of the potential, eV.
    pub v_r_ev: f64,
    /// Gain/loss strength (imaginary part), eV.
    pub v_i_ev: f64,
    /// Total barrier length, μm.
    pub l_um: f64,
    /// Particle mass over the free-electron mass.
    #[serde(default = "default_mass_ratio")]
    pub mass_ratio: f64,
    /// Reference energy scale, eV.
    #[serde(default = "default_e0")]
    pub e0_ev: f64,
    /// Device string, grammar `(L[012])?M(R[012])?`.
    pub config: String,
    /// Grid start, eV (included).
    pub e_min: f64,
    /// Grid end, eV (excluded).
    pub e_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    /// Directory all datasets are written under.
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
}

impl RunConfig {
    /// Parse the device string under the component grammar.
    pub fn device(&self) -> Result<DeviceConfig> {
        self.config.parse()
    }

    /// Convert to a validated sweep specification (all outputs on).
    pub fn to_sweep_spec(&self) -> Result<SweepSpec> {
        let spec = SweepSpec {
            params: PhysParams::new(self.v_r_ev, self.v_i_ev, self.l_um, self.mass_ratio, self.e0_ev)?,
            config: self.device()?,
            e_min: self.e_min,
            e_max: self.e_max,
            n_points: self.n_points,
            outputs: Outputs::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Serialize back to pretty JSON (the round-trip inverse of
    /// [`parse_run_config`]).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes infallibly")
    }
}

/// Strict-schema parse of a run-configuration file.
///
/// Defaults applied: `mass_ratio` 1, `e0_ev` 1, `n_points` 4000, `out_dir`
/// the current directory. Unknown fields and type mismatches fail with the
/// serde field path; the device string is validated against the component
/// grammar.
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Schema {
        message: e.to_string(),
    })?;
    cfg.device()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"v_r_ev":0.3,"v_i_ev":0.005,"l_um":0.5,"config":"L0M","e_min":0.31,"e_max":1.0}"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_run_config(MINIMAL).unwrap();
        assert_eq!(cfg.mass_ratio, 1.0);
        assert_eq!(cfg.e0_ev, 1.0);
        assert_eq!(cfg.n_points, 4000);
        assert_eq!(cfg.out_dir, ".");
        let spec = cfg.to_sweep_spec().unwrap();
        assert_eq!(spec.n_points, 4000);
        assert_eq!(spec.config, "L0M".parse().unwrap());
    }

    #[test]
    fn unknown_fields_are_named_in_the_error() {
        let text = r#"{"v_r_ev":0.3,"v_i_ev":0.005,"l_um":0.5,"config":"M","e_min":0.31,"e_max":1.0,"typo_field":1}"#;
        match parse_run_config(text).unwrap_err() {
            Error::Schema { message } => assert!(message.contains("typo_field"), "{message}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_field_is_a_schema_error() {
        let text = r#"{"v_i_ev":0.005,"l_um":0.5,"config":"M","e_min":0.31,"e_max":1.0}"#;
        match parse_run_config(text).unwrap_err() {
            Error::Schema { message } => assert!(message.contains("v_r_ev"), "{message}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn bad_device_string_is_a_grammar_error() {
        let text = r#"{"v_r_ev":0.3,"v_i_ev":0.005,"l_um":0.5,"config":"L3M","e_min":0.31,"e_max":1.0}"#;
        assert!(matches!(
            parse_run_config(text).unwrap_err(),
            Error::Grammar { .. }
        ));
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = parse_run_config(MINIMAL).unwrap();
        let again = parse_run_config(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn inconsistent_grid_fails_at_spec_conversion() {
        let text = r#"{"v_r_ev":0.3,"v_i_ev":0.005,"l_um":0.5,"config":"M","e_min":1.0,"e_max":0.31}"#;
        let cfg = parse_run_config(text).unwrap();
        assert!(matches!(
            cfg.to_sweep_spec().unwrap_err(),
            Error::InvalidSpec { .. }
        ));
    }
}
