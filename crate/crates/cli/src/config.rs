//! Flat `key = value` run configuration with dotted sections.
//!
//! Every field has a default except the problem name; unknown keys are
//! rejected. `--set a.b=v` overrides are applied after the file parse, and
//! the final effective configuration is echoed into the output directory.

use std::fmt::Write as _;
use std::path::PathBuf;

use pinn_ode::error::{Error, Result};
use pinn_ode::network::MlpConfig;
use pinn_ode::problems::{by_name, OdeProblem, ProblemParams};
use pinn_ode::training::{LossWeights, TrainingConfig};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub params: ProblemParams,
    pub hidden_layers: usize,
    pub neurons_per_layer: usize,
    pub output_dim: Option<usize>,
    pub n_data: usize,
    pub data_t_lo: Option<f64>,
    pub data_t_hi: Option<f64>,
    pub n_c: usize,
    pub collocation_t_lo: Option<f64>,
    pub collocation_t_hi: Option<f64>,
    pub eta: f64,
    pub n_epochs: usize,
    pub w_data: f64,
    pub w_b: f64,
    pub w_f: f64,
    pub w_e: f64,
    pub seed: u64,
    pub mse_every: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: None,
            params: ProblemParams::default(),
            hidden_layers: 3,
            neurons_per_layer: 32,
            output_dim: None,
            n_data: 1,
            data_t_lo: None,
            data_t_hi: None,
            n_c: 1,
            collocation_t_lo: None,
            collocation_t_hi: None,
            eta: 1e-3,
            n_epochs: 1000,
            w_data: 1.0,
            w_b: 0.0,
            w_f: 0.0,
            w_e: 0.0,
            seed: 0,
            mse_every: 100,
            output_dir: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::parse(format!("bad value for `{key}`: `{value}`")))
}

impl RunConfig {
    /// Parse a config file body (comments start with `#`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Apply one `key=value` assignment; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem" => self.problem = Some(value.to_string()),
            "problem.omega0" => self.params.omega0 = Some(parse_num(key, value)?),
            "problem.epsilon" => self.params.epsilon = Some(parse_num(key, value)?),
            "problem.y0" => self.params.y0 = Some(parse_num(key, value)?),
            "problem.t_end" => self.params.t_end = Some(parse_num(key, value)?),
            "network.hidden_layers" => self.hidden_layers = parse_num(key, value)?,
            "network.neurons_per_layer" => self.neurons_per_layer = parse_num(key, value)?,
            "network.output_dim" => self.output_dim = Some(parse_num(key, value)?),
            "training.n_data" => self.n_data = parse_num(key, value)?,
            "training.data_t_lo" => self.data_t_lo = Some(parse_num(key, value)?),
            "training.data_t_hi" => self.data_t_hi = Some(parse_num(key, value)?),
            "training.n_c" => self.n_c = parse_num(key, value)?,
            "training.collocation_t_lo" => self.collocation_t_lo = Some(parse_num(key, value)?),
            "training.collocation_t_hi" => self.collocation_t_hi = Some(parse_num(key, value)?),
            "training.eta" => self.eta = parse_num(key, value)?,
            "training.n_epochs" => self.n_epochs = parse_num(key, value)?,
            "training.w_data" => self.w_data = parse_num(key, value)?,
            "training.w_b" => self.w_b = parse_num(key, value)?,
            "training.w_f" => self.w_f = parse_num(key, value)?,
            "training.w_e" => self.w_e = parse_num(key, value)?,
            "training.seed" => self.seed = parse_num(key, value)?,
            "training.mse_every" => self.mse_every = parse_num(key, value)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            other => return Err(Error::config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<OdeProblem> {
        let name = self
            .problem
            .as_deref()
            .ok_or_else(|| Error::config("missing required field `problem`"))?;
        by_name(name, self.params)
    }

    pub fn build_training(&self, problem: &OdeProblem) -> Result<TrainingConfig> {
        let interval = |lo: Option<f64>, hi: Option<f64>, what: &str| match (lo, hi) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) => Ok(Some((a, b))),
            _ => Err(Error::config(format!(
                "{what} interval needs both `_t_lo` and `_t_hi`"
            ))),
        };
        Ok(TrainingConfig {
            n_data: self.n_data,
            data_interval: interval(self.data_t_lo, self.data_t_hi, "data")?,
            n_c: self.n_c,
            collocation_interval: interval(
                self.collocation_t_lo,
                self.collocation_t_hi,
                "collocation",
            )?,
            eta: self.eta,
            n_epochs: self.n_epochs,
            weights: LossWeights {
                w_data: self.w_data,
                w_b: self.w_b,
                w_f: self.w_f,
                w_e: self.w_e,
            },
            network: MlpConfig {
                input_dim: 1,
                hidden_layers: self.hidden_layers,
                neurons_per_layer: self.neurons_per_layer,
                output_dim: self.output_dim.unwrap_or_else(|| problem.dim()),
                seed: self.seed,
            },
            seed: self.seed,
            mse_every: self.mse_every,
        })
    }

    /// The effective configuration as config-file text, for provenance.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem = {}", self.problem.as_deref().unwrap_or(""));
        let mut opt = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v}");
            }
        };
        opt("problem.omega0", self.params.omega0);
        opt("problem.epsilon", self.params.epsilon);
        opt("problem.y0", self.params.y0);
        opt("problem.t_end", self.params.t_end);
        let _ = writeln!(out, "network.hidden_layers = {}", self.hidden_layers);
        let _ = writeln!(
            out,
            "network.neurons_per_layer = {}",
            self.neurons_per_layer
        );
        if let Some(d) = self.output_dim {
            let _ = writeln!(out, "network.output_dim = {d}");
        }
        let _ = writeln!(out, "training.n_data = {}", self.n_data);
        let mut opt = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v}");
            }
        };
        opt("training.data_t_lo", self.data_t_lo);
        opt("training.data_t_hi", self.data_t_hi);
        let _ = writeln!(out, "training.n_c = {}", self.n_c);
        let mut opt = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v}");
            }
        };
        opt("training.collocation_t_lo", self.collocation_t_lo);
        opt("training.collocation_t_hi", self.collocation_t_hi);
        let _ = writeln!(out, "training.eta = {}", self.eta);
        let _ = writeln!(out, "training.n_epochs = {}", self.n_epochs);
        let _ = writeln!(out, "training.w_data = {}", self.w_data);
        let _ = writeln!(out, "training.w_b = {}", self.w_b);
        let _ = writeln!(out, "training.w_f = {}", self.w_f);
        let _ = writeln!(out, "training.w_e = {}", self.w_e);
        let _ = writeln!(out, "training.seed = {}", self.seed);
        let _ = writeln!(out, "training.mse_every = {}", self.mse_every);
        if let Some(dir) = &self.output_dir {
            let _ = writeln!(out, "output_dir = {}", dir.display());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dotted_keys_and_comments() {
        let cfg = RunConfig::parse(
            "# harmonic run\nproblem = harmonic\nproblem.omega0 = 20\n\ntraining.eta = 3e-4 # lr\ntraining.n_epochs = 54000\n",
        )
        .unwrap();
        assert_eq!(cfg.problem.as_deref(), Some("harmonic"));
        assert_eq!(cfg.params.omega0, Some(20.0));
        assert_eq!(cfg.eta, 3e-4);
        assert_eq!(cfg.n_epochs, 54000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("nonsense = 1\n").is_err());
        assert!(RunConfig::parse("training.nonsense = 1\n").is_err());
    }

    #[test]
    fn echo_round_trips_through_parse() {
        let mut cfg = RunConfig::default();
        cfg.set("problem", "vdp").unwrap();
        cfg.set("problem.epsilon", "5").unwrap();
        cfg.set("training.n_data", "20").unwrap();
        cfg.set("training.w_f", "1e-5").unwrap();
        let echoed = cfg.echo();
        let reparsed = RunConfig::parse(&echoed).unwrap();
        assert_eq!(reparsed.problem, cfg.problem);
        assert_eq!(reparsed.params.epsilon, cfg.params.epsilon);
        assert_eq!(reparsed.n_data, cfg.n_data);
        assert_eq!(reparsed.w_f, cfg.w_f);
    }

    #[test]
    fn missing_problem_is_reported_by_name() {
        let cfg = RunConfig::default();
        let err = match cfg.build_problem() {
            Err(e) => e.to_string(),
            Ok(_) => panic!("expected missing-problem error"),
        };
        assert!(err.contains("problem"), "{err}");
    }

    #[test]
    fn output_dim_defaults_to_problem_dimension() {
        let mut cfg = RunConfig::default();
        cfg.set("problem", "pendulum-system").unwrap();
        cfg.set("training.n_data", "2").unwrap();
        let p = cfg.build_problem().unwrap();
        let t = cfg.build_training(&p).unwrap();
        assert_eq!(t.network.output_dim, 2);
    }
}
