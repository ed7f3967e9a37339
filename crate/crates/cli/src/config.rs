//! Run configuration, read from a TOML file.

use std::fmt;
use std::path::Path;

use gaussian_esd::channel::ChannelParams;
use gaussian_esd::fock::{MAX_CUTOFF, MIN_CUTOFF};
use gaussian_esd::gaussian::GaussianParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateSection,
    pub channel: ChannelSection,
    pub time: TimeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub z1: f64,
    pub z2: f64,
    pub r: f64,
    pub nu1: f64,
    pub nu2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub gamma1: f64,
    pub gamma2: f64,
    pub nb1: f64,
    pub nb2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Z0,
    R0,
    Nu,
    T,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Z0 => "z0",
            SweepVariable::R0 => "r0",
            SweepVariable::Nu => "nu",
            SweepVariable::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub range: [f64; 2],
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// `-` writes to standard output.
    #[serde(default = "default_path")]
    pub path: String,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_path() -> String {
    "-".into()
}

fn default_format() -> Format {
    Format::Csv
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { path: default_path(), format: default_format() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<f64>,
    /// Run the 27-case certified grid instead of the configured state.
    #[serde(default)]
    pub suite: bool,
}

fn default_cutoff() -> usize {
    20
}

fn default_dt() -> f64 {
    0.01
}

fn default_checkpoints() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { cutoff: default_cutoff(), dt: default_dt(), checkpoints: default_checkpoints(), suite: false }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Read(String),
    Parse(String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "cannot parse config: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Starting point printed by `dump-config` when no file is given.
    pub fn template() -> Self {
        RunConfig {
            state: StateSection { z1: 0.0, z2: 0.0, r: 1.0, nu1: 0.0, nu2: 0.0 },
            channel: ChannelSection { gamma1: 0.1, gamma2: 0.1, nb1: 0.0, nb2: 0.0 },
            time: TimeSection { t_max: 30.0, n_points: 301 },
            sweep: None,
            output: OutputSection::default(),
            oracle: OracleSection::default(),
        }
    }

    /// Structural checks. Physical admissibility is left to the library.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.time.t_max > 0.0) || !self.time.t_max.is_finite() {
            return bad(format!("time.t_max must be positive, got {}", self.time.t_max));
        }
        if self.time.n_points < 2 {
            return bad(format!("time.n_points must be at least 2, got {}", self.time.n_points));
        }
        if let Some(s) = &self.sweep {
            let [lo, hi] = s.range;
            if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
                return bad(format!("sweep.range [{lo}, {hi}] is degenerate"));
            }
            if s.steps < 2 {
                return bad(format!("sweep.steps must be at least 2, got {}", s.steps));
            }
            if matches!(s.variable, SweepVariable::T | SweepVariable::Nu) && lo < 0.0 {
                return bad(format!("sweep.range for {} must start at 0 or later", s.variable.name()));
            }
        }
        let o = &self.oracle;
        if !(MIN_CUTOFF..=MAX_CUTOFF).contains(&o.cutoff) {
            return bad(format!("oracle.cutoff must lie in [{MIN_CUTOFF}, {MAX_CUTOFF}], got {}", o.cutoff));
        }
        if !(o.dt > 0.0) || !o.dt.is_finite() {
            return bad(format!("oracle.dt must be positive, got {}", o.dt));
        }
        if o.checkpoints.is_empty()
            || o.checkpoints.iter().any(|t| !(t.is_finite() && *t >= 0.0))
            || o.checkpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return bad("oracle.checkpoints must be non-empty, non-negative and increasing".into());
        }
        Ok(())
    }

    pub fn params(&self) -> gaussian_esd::Result<GaussianParams> {
        let s = &self.state;
        GaussianParams::new(s.z1, s.z2, s.r, s.nu1, s.nu2)
    }

    pub fn channel_params(&self) -> gaussian_esd::Result<ChannelParams> {
        let c = &self.channel;
        ChannelParams::new(c.gamma1, c.gamma2, c.nb1, c.nb2)
    }
}
