//! Resolved run configuration: defaults, then the config file, then flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fdkp::experiments::SweepConfig;
use fdkp::{Error, PicardForm, Result, ZeroMode};

/// Environment variable holding the default output root.
pub const OUT_ENV: &str = "FDKP_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    Gaussian,
    Random,
}

#[derive(Clone, Debug)]
pub struct CliConfig {
    pub command: String,
    pub sweep: SweepConfig,
    eps_set: bool,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub omega_max: f64,
    pub samples: usize,
    pub init: Init,
    pub skip_descent: bool,
}

pub const KEYS: &[&str] = &[
    "command",
    "beta",
    "eps",
    "n",
    "ds_nx",
    "ds_ny",
    "lx",
    "ly",
    "delta_factor",
    "harmonics",
    "ds_tol",
    "teps_tol",
    "max_iter",
    "newton_tol",
    "picard",
    "zero_mode",
    "seed",
    "out",
    "jobs",
    "omega_max",
    "samples",
    "init",
    "skip_descent",
];

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidConfig(format!("bad value {value:?} for {key}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| bad(key, value))
}

impl CliConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            sweep: SweepConfig::default(),
            eps_set: false,
            out: None,
            jobs: 1,
            omega_max: 6.0,
            samples: 241,
            init: Init::Gaussian,
            skip_descent: false,
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.sweep;
        match key {
            "command" => {
                if value != self.command {
                    return Err(Error::InvalidConfig(format!(
                        "config is for command {value:?}, running {:?}",
                        self.command
                    )));
                }
            }
            "beta" => s.beta = num(key, value)?,
            "eps" => {
                s.eps_list = value
                    .split(',')
                    .map(|v| num(key, v))
                    .collect::<Result<_>>()?;
                self.eps_set = true;
            }
            "n" => {
                s.ds_nx = num(key, value)?;
                s.ds_ny = s.ds_nx;
            }
            "ds_nx" => s.ds_nx = num(key, value)?,
            "ds_ny" => s.ds_ny = num(key, value)?,
            "lx" => s.lx = num(key, value)?,
            "ly" => s.ly = num(key, value)?,
            "delta_factor" => s.delta_factor = num(key, value)?,
            "harmonics" => s.harmonics = num(key, value)?,
            "ds_tol" => s.ds_tol = num(key, value)?,
            "teps_tol" => s.teps_tol = num(key, value)?,
            "max_iter" => s.max_iter = num(key, value)?,
            "newton_tol" => s.newton_tol = num(key, value)?,
            "picard" => {
                s.picard = match value {
                    "shifted" => PicardForm::Shifted,
                    "literal" => PicardForm::Literal,
                    _ => return Err(bad(key, value)),
                }
            }
            "zero_mode" => {
                s.zero_mode = match value {
                    "zero-mass" => ZeroMode::ZeroMassLimit,
                    "axis" => ZeroMode::AxisLimit,
                    _ => return Err(bad(key, value)),
                }
            }
            "seed" => s.seed = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "jobs" => {
                self.jobs = num(key, value)?;
                if self.jobs == 0 {
                    return Err(bad(key, value));
                }
            }
            "omega_max" => self.omega_max = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "init" => {
                self.init = match value {
                    "gaussian" => Init::Gaussian,
                    "random" => Init::Random,
                    _ => return Err(bad(key, value)),
                }
            }
            "skip_descent" => {
                self.skip_descent = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(bad(key, value)),
                }
            }
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "line {}: expected key = value",
                    no + 1
                )));
            };
            self.set(k.trim(), v.trim()).map_err(|e| match e {
                Error::InvalidConfig(m) => Error::InvalidConfig(format!("line {}: {m}", no + 1)),
                e => e,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// The single `eps` of `solve-fdkp`, defaulting to 0.1.
    pub fn single_eps(&self) -> Result<f64> {
        if !self.eps_set {
            return Ok(0.1);
        }
        match self.sweep.eps_list.as_slice() {
            [e] => Ok(*e),
            _ => Err(Error::InvalidConfig("solve-fdkp takes exactly one eps".into())),
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        if self.command == "solve-fdkp" {
            self.sweep.eps_list = vec![self.single_eps()?];
            self.eps_set = true;
        }
        if self.samples < 2 {
            return Err(bad("samples", &self.samples.to_string()));
        }
        self.sweep.validate()
    }

    /// Output directory: `out`, else `$FDKP_OUT/<command>`, else `fdkp-out/<command>`.
    pub fn out_dir(&self) -> PathBuf {
        if let Some(o) = &self.out {
            return o.clone();
        }
        let root = std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("fdkp-out"));
        root.join(&self.command)
    }

    /// Everything outside the solver configuration, as `key = value` lines.
    pub fn describe_run(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "out = {}", self.out_dir().display());
        let _ = writeln!(s, "jobs = {}", self.jobs);
        let _ = writeln!(s, "omega_max = {:?}", self.omega_max);
        let _ = writeln!(s, "samples = {}", self.samples);
        let init = match self.init {
            Init::Gaussian => "gaussian",
            Init::Random => "random",
        };
        let _ = writeln!(s, "init = {init}");
        let _ = writeln!(s, "skip_descent = {}", self.skip_descent);
        s
    }

    pub fn describe(&self) -> String {
        format!("{}{}", self.describe_run(), self.sweep.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = CliConfig::new("sweep");
        c.apply_text("# comment\nbeta = 0.25\neps = 0.2, 0.1\nn = 64 # inline\n")
            .unwrap();
        c.set("beta", "0.3").unwrap();
        assert_eq!(c.sweep.beta, 0.3);
        assert_eq!(c.sweep.eps_list, vec![0.2, 0.1]);
        assert_eq!((c.sweep.ds_nx, c.sweep.ds_ny), (64, 64));
    }

    #[test]
    fn unknown_and_malformed_lines_are_errors() {
        let mut c = CliConfig::new("sweep");
        assert!(c.apply_text("betta = 0.2").is_err());
        assert!(c.apply_text("beta 0.2").is_err());
        assert!(c.apply_text("picard = fast").is_err());
        assert!(c.apply_text("command = check").is_err());
        assert!(c.apply_text("jobs = 0").is_err());
    }

    #[test]
    fn resolved_config_parses_back() {
        let mut c = CliConfig::new("sweep");
        c.set("eps", "0.2,0.05").unwrap();
        c.set("init", "random").unwrap();
        c.set("picard", "literal").unwrap();
        c.set("out", "/tmp/x").unwrap();
        let mut d = CliConfig::new("sweep");
        d.apply_text(&c.describe()).unwrap();
        assert_eq!(d.describe(), c.describe());
    }

    #[test]
    fn every_key_is_accepted() {
        let text = CliConfig::new("sweep").describe();
        let keys: Vec<&str> = text
            .lines()
            .map(|l| l.split_once('=').unwrap().0.trim())
            .collect();
        for k in keys {
            assert!(KEYS.contains(&k), "{k}");
        }
    }

    #[test]
    fn solve_fdkp_takes_one_eps() {
        let mut c = CliConfig::new("solve-fdkp");
        c.finish().unwrap();
        assert_eq!(c.sweep.eps_list, vec![0.1]);
        let mut c = CliConfig::new("solve-fdkp");
        c.set("eps", "0.2,0.1").unwrap();
        assert!(c.finish().is_err());
    }
}
