//! Run configuration: a flat `key = value` file format, shared by the
//! configuration file and the command line's `--set KEY=VALUE` overrides.
//!
//! `#` starts a comment, blank lines are skipped, unknown keys and malformed
//! values are configuration errors that carry the offending line number.
//! [`FlowConfig::render_resolved`] writes the fully resolved settings back
//! in a fixed key order; the output parses back to an identical config.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::discretization::GridMode;
use crate::flow::{FlowMode, InitialData};
use crate::monitors::MonitorContext;
use crate::tolerances;
use crate::{Error, Result};

/// How the gauge constant `c` of `Θ(t, c) = e^{-t/n + c}` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CConvention {
    /// `c = (min φ₀ + max φ₀) / 2` over the initial raw data (recommended:
    /// it centers the rescaled radius bracket around 1).
    Midpoint,
    /// An explicit value.
    Value(f64),
}

impl fmt::Display for CConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CConvention::Midpoint => write!(f, "midpoint"),
            CConvention::Value(c) => write!(f, "value:{c}"),
        }
    }
}

impl FromStr for CConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "midpoint" {
            return Ok(CConvention::Midpoint);
        }
        if let Some(num) = s.strip_prefix("value:") {
            if let Ok(c) = num.parse::<f64>() {
                if c.is_finite() {
                    return Ok(CConvention::Value(c));
                }
            }
        }
        Err(Error::Config(format!(
            "invalid c_convention '{s}' (expected 'midpoint' or 'value:<number>')"
        )))
    }
}

/// Complete description of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub mode: GridMode,
    pub n: usize,
    pub rho_max: f64,
    pub cells: usize,
    pub cells_theta: usize,
    pub u0: InitialData,
    pub c_convention: CConvention,
    pub cfl_gamma: f64,
    /// Fixed step override; `None` selects the automatic parabolic bound.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub t_end_rescaled: f64,
    /// Record a trajectory row every this many steps (0 = initial row only).
    pub csv_every: u64,
    /// Write a snapshot every this many steps (0 = none during the run).
    pub snapshot_every: u64,
    pub out_dir: PathBuf,
    /// Monitor tolerances; `None` means the automatic `1e-6 + h²` floor.
    pub tol_c0: Option<f64>,
    pub tol_phidot: Option<f64>,
    pub tol_gradient: Option<f64>,
    pub tol_area: f64,
    pub tol_rescaled_area: f64,
    pub tol_conv: f64,
    pub tol_rinf: f64,
    pub h_theta_ceiling: f64,
    pub eps_spacelike: f64,
    pub eps_mean_convex: f64,
    pub oracle_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            mode: GridMode::Radial,
            n: 2,
            rho_max: 1.0,
            cells: 256,
            cells_theta: 64,
            u0: InitialData::Constant { r0: 1.5 },
            c_convention: CConvention::Midpoint,
            cfl_gamma: 0.2,
            dt: None,
            t_end: 2.0,
            t_end_rescaled: 12.0,
            csv_every: 100,
            snapshot_every: 0,
            out_dir: PathBuf::from("out"),
            tol_c0: None,
            tol_phidot: None,
            tol_gradient: None,
            tol_area: tolerances::TOL_AREA_LAW,
            tol_rescaled_area: tolerances::TOL_RESCALED_AREA,
            tol_conv: tolerances::TOL_CONVERGENCE_OSC,
            tol_rinf: tolerances::TOL_R_INFINITY,
            h_theta_ceiling: tolerances::H_THETA_CEILING,
            eps_spacelike: tolerances::EPS_SPACELIKE,
            eps_mean_convex: tolerances::EPS_MEAN_CONVEX,
            oracle_tol: tolerances::TOL_ORACLE_COMPARE,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, what: &str) -> Result<T> {
    value.parse::<T>().map_err(|_| {
        Error::Config(format!(
            "invalid value '{value}' for {key} (expected {what})"
        ))
    })
}

fn parse_opt_f64(key: &str, value: &str) -> Result<Option<f64>> {
    if value == "auto" {
        Ok(None)
    } else {
        parse_num::<f64>(key, value, "a number or 'auto'").map(Some)
    }
}

impl FlowConfig {
    /// Apply one `key = value` assignment.  This is the single authority on
    /// key names, shared by config files and command-line overrides.
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => self.mode = value.parse()?,
            "n" => self.n = parse_num(key, value, "a positive integer")?,
            "rho_max" => self.rho_max = parse_num(key, value, "a number")?,
            "cells" => self.cells = parse_num(key, value, "a positive integer")?,
            "cells_theta" => self.cells_theta = parse_num(key, value, "a positive integer")?,
            "u0" => self.u0 = value.parse()?,
            "c_convention" => self.c_convention = value.parse()?,
            "cfl_gamma" => self.cfl_gamma = parse_num(key, value, "a number")?,
            "dt" => {
                self.dt = if value == "auto" {
                    None
                } else {
                    Some(parse_num(key, value, "a number or 'auto'")?)
                }
            }
            "t_end" => self.t_end = parse_num(key, value, "a number")?,
            "t_end_rescaled" => self.t_end_rescaled = parse_num(key, value, "a number")?,
            "csv_every" => self.csv_every = parse_num(key, value, "a non-negative integer")?,
            "snapshot_every" => {
                self.snapshot_every = parse_num(key, value, "a non-negative integer")?
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            "tol_c0" => self.tol_c0 = parse_opt_f64(key, value)?,
            "tol_phidot" => self.tol_phidot = parse_opt_f64(key, value)?,
            "tol_gradient" => self.tol_gradient = parse_opt_f64(key, value)?,
            "tol_area" => self.tol_area = parse_num(key, value, "a number")?,
            "tol_rescaled_area" => self.tol_rescaled_area = parse_num(key, value, "a number")?,
            "tol_conv" => self.tol_conv = parse_num(key, value, "a number")?,
            "tol_rinf" => self.tol_rinf = parse_num(key, value, "a number")?,
            "h_theta_ceiling" => self.h_theta_ceiling = parse_num(key, value, "a number")?,
            "eps_spacelike" => self.eps_spacelike = parse_num(key, value, "a number")?,
            "eps_mean_convex" => self.eps_mean_convex = parse_num(key, value, "a number")?,
            "oracle_tol" => self.oracle_tol = parse_num(key, value, "a number")?,
            other => {
                return Err(Error::Config(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    /// Parse a flat config text on top of the defaults.
    pub fn parse_str(text: &str) -> Result<FlowConfig> {
        let mut cfg = FlowConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {lineno}: expected KEY = VALUE, got '{line}'"))
            })?;
            cfg.apply_key(key.trim(), value.trim())
                .map_err(|e| match e {
                    Error::Config(msg) => Error::Config(format!("line {lineno}: {msg}")),
                    other => other,
                })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and parse a config file.
    pub fn from_file(path: &std::path::Path) -> Result<FlowConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config file '{}': {e}", path.display()))
        })?;
        Self::parse_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Reject settings no run could accept, independent of grid building.
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_gamma > 0.0 && self.cfl_gamma <= 0.5) {
            return Err(Error::Config(format!(
                "cfl_gamma must lie in (0, 0.5] (got {})",
                self.cfl_gamma
            )));
        }
        if let Some(dt) = self.dt {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(Error::Config(format!(
                    "dt must be positive and finite (got {dt})"
                )));
            }
        }
        for (name, value) in [
            ("t_end", self.t_end),
            ("t_end_rescaled", self.t_end_rescaled),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite (got {value})"
                )));
            }
        }
        for (name, value) in [
            ("tol_area", self.tol_area),
            ("tol_rescaled_area", self.tol_rescaled_area),
            ("tol_conv", self.tol_conv),
            ("tol_rinf", self.tol_rinf),
            ("h_theta_ceiling", self.h_theta_ceiling),
            ("oracle_tol", self.oracle_tol),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite (got {value})"
                )));
            }
        }
        for (name, value) in [
            ("eps_spacelike", self.eps_spacelike),
            ("eps_mean_convex", self.eps_mean_convex),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be non-negative and finite (got {value})"
                )));
            }
        }
        for (name, value) in [
            ("tol_c0", self.tol_c0),
            ("tol_phidot", self.tol_phidot),
            ("tol_gradient", self.tol_gradient),
        ] {
            if let Some(v) = value {
                if !v.is_finite() || v <= 0.0 {
                    return Err(Error::Config(format!(
                        "{name} must be positive and finite or 'auto' (got {v})"
                    )));
                }
            }
        }
        self.u0.validate()?;
        Ok(())
    }

    /// Render the fully resolved configuration in a fixed key order.
    /// The output parses back to an identical configuration.
    pub fn render_resolved(&self) -> String {
        let opt = |v: Option<f64>| match v {
            Some(x) => x.to_string(),
            None => "auto".to_string(),
        };
        let mut s = String::new();
        s.push_str(&format!("mode = {}\n", self.mode));
        s.push_str(&format!("n = {}\n", self.n));
        s.push_str(&format!("rho_max = {}\n", self.rho_max));
        s.push_str(&format!("cells = {}\n", self.cells));
        s.push_str(&format!("cells_theta = {}\n", self.cells_theta));
        s.push_str(&format!("u0 = {}\n", self.u0));
        s.push_str(&format!("c_convention = {}\n", self.c_convention));
        s.push_str(&format!("cfl_gamma = {}\n", self.cfl_gamma));
        s.push_str(&format!("dt = {}\n", opt(self.dt)));
        s.push_str(&format!("t_end = {}\n", self.t_end));
        s.push_str(&format!("t_end_rescaled = {}\n", self.t_end_rescaled));
        s.push_str(&format!("csv_every = {}\n", self.csv_every));
        s.push_str(&format!("snapshot_every = {}\n", self.snapshot_every));
        s.push_str(&format!("out_dir = {}\n", self.out_dir.display()));
        s.push_str(&format!("tol_c0 = {}\n", opt(self.tol_c0)));
        s.push_str(&format!("tol_phidot = {}\n", opt(self.tol_phidot)));
        s.push_str(&format!("tol_gradient = {}\n", opt(self.tol_gradient)));
        s.push_str(&format!("tol_area = {}\n", self.tol_area));
        s.push_str(&format!("tol_rescaled_area = {}\n", self.tol_rescaled_area));
        s.push_str(&format!("tol_conv = {}\n", self.tol_conv));
        s.push_str(&format!("tol_rinf = {}\n", self.tol_rinf));
        s.push_str(&format!("h_theta_ceiling = {}\n", self.h_theta_ceiling));
        s.push_str(&format!("eps_spacelike = {}\n", self.eps_spacelike));
        s.push_str(&format!("eps_mean_convex = {}\n", self.eps_mean_convex));
        s.push_str(&format!("oracle_tol = {}\n", self.oracle_tol));
        s
    }

    /// Assemble the monitor context for a run made with this config.
    pub fn monitor_context(&self, mode: FlowMode, cap_area: f64, grid_h: f64) -> MonitorContext {
        MonitorContext {
            mode,
            n: self.n,
            cap_area,
            grid_h,
            tol_c0: self.tol_c0,
            tol_phidot: self.tol_phidot,
            tol_gradient: self.tol_gradient,
            tol_area: self.tol_area,
            tol_rescaled_area: self.tol_rescaled_area,
            tol_conv: self.tol_conv,
            tol_r_inf: self.tol_rinf,
            h_theta_ceiling: self.h_theta_ceiling,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_documented_baseline() {
        let cfg = FlowConfig::default();
        assert_eq!(cfg.mode, GridMode::Radial);
        assert_eq!(cfg.n, 2);
        assert_eq!(cfg.cells, 256);
        assert_eq!(cfg.cells_theta, 64);
        assert_eq!(cfg.u0, InitialData::Constant { r0: 1.5 });
        assert_eq!(cfg.cfl_gamma, 0.2);
        assert_eq!(cfg.dt, None);
        assert_eq!(cfg.t_end, 2.0);
        assert_eq!(cfg.t_end_rescaled, 12.0);
        assert_eq!(cfg.csv_every, 100);
        assert_eq!(cfg.snapshot_every, 0);
        cfg.validate().unwrap();
    }

    #[test]
    fn parse_accepts_comments_blanks_and_overrides() {
        let text = "\
# full line comment

mode = disk   # trailing comment
cells = 48
cells_theta = 32
u0 = bump:1.5,0.05
dt = 0.0001
tol_c0 = 0.01
";
        let cfg = FlowConfig::parse_str(text).unwrap();
        assert_eq!(cfg.mode, GridMode::Disk);
        assert_eq!(cfg.cells, 48);
        assert_eq!(cfg.cells_theta, 32);
        assert_eq!(cfg.u0, InitialData::Bump { r0: 1.5, eps: 0.05 });
        assert_eq!(cfg.dt, Some(1e-4));
        assert_eq!(cfg.tol_c0, Some(0.01));
        // Untouched keys keep their defaults.
        assert_eq!(cfg.t_end, 2.0);
    }

    #[test]
    fn errors_carry_line_numbers_and_key_names() {
        let err = FlowConfig::parse_str("cells = 64\nbogus_key = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("bogus_key"), "{msg}");
        assert_eq!(err.exit_code(), 4);

        let err = FlowConfig::parse_str("cells 64\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");

        let err = FlowConfig::parse_str("cells = sixty\n").unwrap_err();
        assert!(err.to_string().contains("cells"), "{err}");
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        assert!(FlowConfig::parse_str("cfl_gamma = 0\n").is_err());
        assert!(FlowConfig::parse_str("cfl_gamma = 0.7\n").is_err());
        assert!(FlowConfig::parse_str("dt = -1\n").is_err());
        assert!(FlowConfig::parse_str("t_end = 0\n").is_err());
        assert!(FlowConfig::parse_str("u0 = bump:1.0,1.5\n").is_err());
        assert!(FlowConfig::parse_str("tol_conv = -1e-6\n").is_err());
        assert!(FlowConfig::parse_str("cfl_gamma = 0.5\n").is_ok());
    }

    #[test]
    fn resolved_rendering_round_trips() {
        let mut cfg = FlowConfig::default();
        cfg.apply_key("mode", "disk").unwrap();
        cfg.apply_key("cells", "48").unwrap();
        cfg.apply_key("u0", "bump:1.25,0.1").unwrap();
        cfg.apply_key("dt", "0.00025").unwrap();
        cfg.apply_key("tol_phidot", "0.003").unwrap();
        cfg.apply_key("c_convention", "value:0.40546510810816444")
            .unwrap();
        let text = cfg.render_resolved();
        let back = FlowConfig::parse_str(&text).unwrap();
        assert_eq!(back, cfg);
        // Rendering is deterministic.
        assert_eq!(text, back.render_resolved());
        // Every key appears exactly once.
        for key in [
            "mode",
            "n",
            "rho_max",
            "cells",
            "cells_theta",
            "u0",
            "c_convention",
            "cfl_gamma",
            "dt",
            "t_end",
            "t_end_rescaled",
            "csv_every",
            "snapshot_every",
            "out_dir",
            "tol_c0",
            "tol_phidot",
            "tol_gradient",
            "tol_area",
            "tol_rescaled_area",
            "tol_conv",
            "tol_rinf",
            "h_theta_ceiling",
            "eps_spacelike",
            "eps_mean_convex",
            "oracle_tol",
        ] {
            let hits = text
                .lines()
                .filter(|l| l.starts_with(&format!("{key} = ")))
                .count();
            assert_eq!(hits, 1, "key {key} appears {hits} times");
        }
    }

    #[test]
    fn dt_auto_and_tolerance_auto_round_trip() {
        let cfg = FlowConfig::default();
        let text = cfg.render_resolved();
        assert!(text.contains("dt = auto"));
        assert!(text.contains("tol_c0 = auto"));
        let back = FlowConfig::parse_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
