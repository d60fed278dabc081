//! Scenario files.
//!
//! A scenario file is flat TOML with dotted section keys. Every key is
//! optional; omitted keys take the defaults of [`Scenario::default`] (or of
//! a bundled preset used as the base). Unknown and duplicate keys are
//! rejected.
//!
//! ```toml
//! name = "step-roll"
//! mode = "closed_loop"
//! duration = 20.0
//! schedule = [[1.0, 10.0, 0.0, 0.0]]   # [t, roll, pitch, yaw]
//! filter.alpha = 0.93
//! gains.roll.kp = 1.41
//! noise.seed = 7
//! ```

use std::path::Path;

use serde::Deserialize;
use toml::Table;

use super::scenario::Scenario;
use crate::error::{Error, Result};

/// Reads and validates a scenario file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config_str(&text, None)
}

/// Parses scenario text, applying its keys over `base` (or the defaults).
pub fn parse_config_str(text: &str, base: Option<&Scenario>) -> Result<Scenario> {
    // Deserializing the document directly gives span-annotated diagnostics
    // for unknown keys and type errors.
    let direct: Scenario = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;

    let scenario = match base {
        None => direct,
        Some(base) => {
            let overlay: Table =
                toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
            let mut merged =
                Table::try_from(base).map_err(|e| Error::ConfigParse(e.to_string()))?;
            merge(&mut merged, overlay);
            Scenario::deserialize(merged).map_err(|e| Error::ConfigParse(e.to_string()))?
        }
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Renders a scenario as a complete scenario file.
pub fn to_config_string(s: &Scenario) -> Result<String> {
    toml::to_string(s).map_err(|e| Error::ConfigParse(e.to_string()))
}

fn merge(into: &mut Table, from: Table) {
    for (key, value) in from {
        match (into.get_mut(&key), value) {
            (Some(toml::Value::Table(dst)), toml::Value::Table(src)) => merge(dst, src),
            (_, value) => {
                into.insert(key, value);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::Mode;
    use crate::imu::PitchExtraction;

    #[test]
    fn empty_config_is_all_defaults() {
        let s = parse_config_str("", None).unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.filter.alpha, 0.93);
        assert_eq!(s.dt, 0.01);
        assert_eq!(
            [s.gains.roll.kp, s.gains.roll.ki, s.gains.roll.kd],
            [1.41, 0.91, 1.31]
        );
    }

    #[test]
    fn dotted_keys_and_integers() {
        let text = r#"
            # comment
            name = "custom"
            mode = "open_loop_sweep"
            duration = 30
            filter.alpha = 0.98
            gains.yaw.kp = 2
            noise.seed = 42
            noise.gyro_bias = [0.1, 0.2, 0.3]
            pitch_extraction = "planar"
            schedule = [[0, 30, 0, 0], [6.5, 60, 0, 0]]
        "#;
        let s = parse_config_str(text, None).unwrap();
        assert_eq!(s.name, "custom");
        assert_eq!(s.mode, Mode::OpenLoopSweep);
        assert_eq!(s.duration, 30.0);
        assert_eq!(s.filter.alpha, 0.98);
        assert_eq!(s.gains.yaw.kp, 2.0);
        assert_eq!(s.gains.yaw.ki, 0.91);
        assert_eq!(s.noise.seed, 42);
        assert_eq!(s.noise.gyro_bias.z, 0.3);
        assert_eq!(s.pitch_extraction, PitchExtraction::Planar);
        assert_eq!(s.schedule[1].t, 6.5);
        assert_eq!(s.schedule[1].setpoint.roll, 60.0);
    }

    #[test]
    fn range_error_names_alpha() {
        let e = parse_config_str("filter.alpha = 1.5", None).unwrap_err();
        assert!(matches!(&e, Error::InvalidParameter { field, .. } if field == "filter.alpha"));
        assert!(e.to_string().contains("alpha"));
    }

    #[test]
    fn duplicate_key_rejected() {
        let e = parse_config_str("dt = 0.01\ndt = 0.02\n", None).unwrap_err();
        assert!(matches!(e, Error::ConfigParse(_)), "{e}");
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let e = parse_config_str("duration = 5\nfilter.beta = 0.1\n", None).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("beta"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        assert!(parse_config_str("bogus = 1", None).is_err());
    }

    #[test]
    fn type_error_reported() {
        let e = parse_config_str("duration = \"long\"", None).unwrap_err();
        assert!(e.to_string().contains("duration"), "{e}");
    }

    #[test]
    fn overlay_on_base() {
        let mut base = Scenario::default();
        base.name = "base".into();
        base.gains.roll.kp = 3.0;
        base.schedule = vec![[1.0, 10.0, 0.0, 0.0].into()];
        let s = parse_config_str("gains.roll.ki = 0.0\nnoise.seed = 9", Some(&base)).unwrap();
        assert_eq!(s.name, "base");
        assert_eq!(s.gains.roll.kp, 3.0);
        assert_eq!(s.gains.roll.ki, 0.0);
        assert_eq!(s.noise.seed, 9);
        assert_eq!(s.schedule, base.schedule);
    }

    #[test]
    fn rendered_config_round_trips() {
        let mut s = Scenario::default();
        s.schedule = vec![[1.0, 10.0, -5.0, 90.0].into()];
        s.noise.seed = u32::MAX as u64;
        let text = to_config_string(&s).unwrap();
        assert_eq!(parse_config_str(&text, None).unwrap(), s);
    }
}
