//! Resolution of command-line flags, config-file entries and defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use super::args::{CommonArgs, Format, Integration, Model, QPolicy};
use super::CliError;
use crate::analytic::{IntegrationMethod, IntegrationPolicy, SystemParams};
use crate::stochastic::{SimConfig, Window};

pub const DEFAULT_THRESHOLD_DB: f64 = 1.0;
pub const DEFAULT_ANTENNAS: usize = 4;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Keys accepted in a config file; identical to the long flag names.
const CONFIG_KEYS: &[&str] = &[
    "alpha",
    "intensity",
    "lambda",
    "p",
    "d",
    "epsilon",
    "threshold-db",
    "antennas",
    "q",
    "q-squared",
    "q-policy",
    "model",
    "trials",
    "seed",
    "workers",
    "window",
    "integration",
    "samples",
    "out",
    "format",
];

/// Converts a threshold in dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear threshold for `db`, rejecting values that do not map to a
/// positive finite ratio.
pub fn threshold_linear(db: f64) -> Result<f64, CliError> {
    let t = db_to_linear(db);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(CliError::Usage(format!(
            "threshold {db} dB does not give a positive finite SIR threshold"
        )))
    }
}

/// Parsed `key = value` config file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: expected `key = value`",
                    lineno + 1
                ))
            })?;
            let key = key.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}` = `{v}`: {e}")))
            })
            .transpose()
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.entries.get(key).map(|v| parse_list(v)).transpose()
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad number `{s}`: {e}")))
        })
        .collect()
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding) or a
/// comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(text),
        [start, stop, step] => {
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("bad grid bound `{s}`: {e}")))
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(CliError::Usage(format!(
                    "grid `{text}` needs start <= stop and a positive step"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
            if count > 100_000 {
                return Err(CliError::Usage(format!(
                    "grid `{text}` has too many points"
                )));
            }
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(CliError::Usage(format!(
            "grid `{text}` is neither `start:stop:step` nor a list"
        ))),
    }
}

/// Integer grid for antenna counts.
pub fn antenna_grid(values: &[f64]) -> Result<Vec<usize>, CliError> {
    values
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 && v <= 64.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Usage(format!(
                    "antenna count must be an integer in 1..=64, got {v}"
                )))
            }
        })
        .collect()
}

fn parse_window(text: &str) -> Result<Window, CliError> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(Window::Auto);
    }
    match text.parse::<f64>() {
        Ok(l) if l > 0.0 && l.is_finite() => Ok(Window::HalfWidth(l)),
        _ => Err(CliError::Usage(format!(
            "window must be `auto` or a positive half-width, got `{text}`"
        ))),
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub params: SystemParams,
    pub threshold_db: f64,
    pub antennas: usize,
    pub q_policy: QPolicy,
    /// Weight used by the fixed policy.
    pub q_fixed: Option<f64>,
    /// Extra `q²` values reported by sweeps.
    pub q_squared: Vec<f64>,
    pub model: Model,
    pub sim: SimConfig,
    /// True when no seed was given and one was drawn at random.
    pub seed_generated: bool,
    pub integration: IntegrationPolicy,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub config_path: Option<PathBuf>,
}

impl Settings {
    /// Resolves `args` with precedence flags > config file > defaults.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Self::resolve_with(args, &file)
    }

    pub fn resolve_with(args: &CommonArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let defaults = SystemParams::default();
        let alpha = pick(args.alpha, file.get("alpha")?, defaults.alpha);
        let d = pick(args.d, file.get("d")?, defaults.d);
        let epsilon = pick(args.epsilon, file.get("epsilon")?, defaults.epsilon);

        // density: the flag group overrides the file group as a whole
        let flags_set_density =
            args.intensity.is_some() || args.lambda.is_some() || args.p.is_some();
        let (intensity, lambda, p) = if flags_set_density {
            (args.intensity, args.lambda, args.p)
        } else {
            (file.get("intensity")?, file.get("lambda")?, file.get("p")?)
        };
        let (lambda, p) = match intensity {
            Some(_) if lambda.is_some() || p.is_some() => {
                return Err(CliError::Usage(
                    "`intensity` cannot be combined with `lambda` or `p`".into(),
                ))
            }
            Some(lp) => (lp, 1.0),
            None => (lambda.unwrap_or(defaults.lambda), p.unwrap_or(defaults.p)),
        };
        let params = SystemParams {
            lambda,
            p,
            alpha,
            d,
            epsilon,
        };
        params
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let threshold_db = pick(
            args.threshold_db,
            file.get("threshold-db")?,
            DEFAULT_THRESHOLD_DB,
        );
        threshold_linear(threshold_db)?;
        let antennas = pick(args.antennas, file.get("antennas")?, DEFAULT_ANTENNAS);
        if antennas == 0 {
            return Err(CliError::Usage("antenna count must be at least 1".into()));
        }

        let flags_set_q = args.q.is_some() || args.q_squared.is_some();
        let (q, q_squared) = if flags_set_q {
            (args.q, args.q_squared.clone())
        } else {
            (file.get::<f64>("q")?, file.get_list("q-squared")?)
        };
        if q.is_some() && q_squared.is_some() {
            return Err(CliError::Usage(
                "give either `q` or `q-squared`, not both".into(),
            ));
        }
        let q_squared = q_squared.unwrap_or_default();
        if let Some(q) = q {
            if !(0.0..=1.0).contains(&q) {
                return Err(CliError::Usage(format!("q must lie in [0, 1], got {q}")));
            }
        }
        if let Some(bad) = q_squared.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CliError::Usage(format!("q² must lie in [0, 1], got {bad}")));
        }
        let q_fixed = q.or_else(|| q_squared.first().map(|v| v.sqrt()));
        let explicit_policy = match args.q_policy {
            Some(policy) => Some(policy),
            None => file.get_enum("q-policy")?,
        };
        let q_policy = explicit_policy.unwrap_or(if q.is_some() {
            QPolicy::Fixed
        } else {
            QPolicy::Tuned
        });
        if q_policy == QPolicy::Fixed && q_fixed.is_none() {
            return Err(CliError::Usage(
                "the fixed q policy needs `q` or `q-squared`".into(),
            ));
        }

        let model = pick(args.model, file.get_enum("model")?, Model::Ppp);
        let trials = pick(args.trials, file.get("trials")?, DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::Usage("trial count must be positive".into()));
        }
        let seed = args.seed.or(file.get("seed")?);
        let seed_generated = seed.is_none();
        let seed = seed.unwrap_or_else(rand::random);
        let workers = args
            .workers
            .or(file.get("workers")?)
            .unwrap_or(SimConfig::default().workers);
        let window = match args
            .window
            .as_deref()
            .map(str::to_string)
            .or_else(|| file.entries.get("window").cloned())
        {
            Some(text) => parse_window(&text)?,
            None => Window::Auto,
        };
        let sim = SimConfig {
            trials,
            master_seed: seed,
            window,
            workers,
        };

        let mut integration = IntegrationPolicy::default();
        integration.method = match pick(
            args.integration,
            file.get_enum("integration")?,
            Integration::Auto,
        ) {
            Integration::Auto => IntegrationMethod::Auto,
            Integration::Quadrature => IntegrationMethod::Quadrature,
            Integration::Sampling => IntegrationMethod::Sampling,
        };
        if let Some(samples) = args.samples.or(file.get("samples")?) {
            if samples == 0 {
                return Err(CliError::Usage("sample count must be positive".into()));
            }
            integration.sample_count = samples;
        }

        let out = args
            .out
            .clone()
            .or_else(|| file.entries.get("out").map(PathBuf::from));
        let format = pick(args.format, file.get_enum("format")?, Format::Csv);
        Ok(Self {
            params,
            threshold_db,
            antennas,
            q_policy,
            q_fixed,
            q_squared,
            model,
            sim,
            seed_generated,
            integration,
            out,
            format,
            config_path: args.config.clone(),
        })
    }

    /// `key=value` pairs describing the run, for the output header.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("alpha".to_string(), self.params.alpha.to_string()),
            ("lambda".to_string(), format!("{:?}", self.params.lambda)),
            ("p".to_string(), self.params.p.to_string()),
            (
                "intensity".to_string(),
                format!("{:?}", self.params.lambda_p()),
            ),
            ("d".to_string(), self.params.d.to_string()),
            ("epsilon".to_string(), self.params.epsilon.to_string()),
            ("threshold_db".to_string(), self.threshold_db.to_string()),
            ("antennas".to_string(), self.antennas.to_string()),
            (
                "q_policy".to_string(),
                policy_name(self.q_policy).to_string(),
            ),
        ];
        if let (QPolicy::Fixed, Some(q)) = (self.q_policy, self.q_fixed) {
            out.push(("q_fixed".to_string(), q.to_string()));
        }
        if !self.q_squared.is_empty() {
            let list: Vec<String> = self.q_squared.iter().map(|v| v.to_string()).collect();
            out.push(("q_squared".to_string(), list.join(",")));
        }
        let seed = if self.seed_generated {
            format!("{} (generated)", self.sim.master_seed)
        } else {
            self.sim.master_seed.to_string()
        };
        out.extend([
            ("trials".to_string(), self.sim.trials.to_string()),
            ("seed".to_string(), seed),
            ("workers".to_string(), self.sim.workers.to_string()),
            (
                "window".to_string(),
                match self.sim.window {
                    Window::Auto => "auto".to_string(),
                    Window::HalfWidth(l) => l.to_string(),
                },
            ),
            (
                "integration".to_string(),
                format!("{:?}", self.integration.method).to_lowercase(),
            ),
        ]);
        if let Some(path) = &self.config_path {
            out.push(("config".to_string(), path.display().to_string()));
        }
        out
    }
}

pub fn policy_name(policy: QPolicy) -> &'static str {
    match policy {
        QPolicy::Tuned => "tuned",
        QPolicy::CorrMatch => "corr-match",
        QPolicy::Fixed => "fixed",
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(-3.0) - 0.501_187_233_627_272_3).abs() < 1e-15);
        assert!(matches!(
            threshold_linear(f64::NEG_INFINITY),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            threshold_linear(f64::NAN),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("-10:10:5").unwrap(),
            vec![-10.0, -5.0, 0.0, 5.0, 10.0]
        );
        assert_eq!(parse_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("3, 1,2").unwrap(), vec![3.0, 1.0, 2.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:b").is_err());
        assert_eq!(antenna_grid(&[1.0, 6.0]).unwrap(), vec![1, 6]);
        assert!(antenna_grid(&[1.5]).is_err());
        assert!(antenna_grid(&[0.0]).is_err());
    }

    #[test]
    fn defaults() {
        let s = Settings::resolve_with(
            &CommonArgs {
                seed: Some(5),
                ..Default::default()
            },
            &ConfigFile::default(),
        )
        .unwrap();
        assert_eq!(s.params, SystemParams::default());
        assert_eq!(s.threshold_db, 1.0);
        assert_eq!(s.sim.trials, 1_000_000);
        assert_eq!(s.sim.window, Window::Auto);
        assert_eq!(s.q_policy, QPolicy::Tuned);
        assert!(!s.seed_generated);
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = ConfigFile::parse(
            "# run settings\nalpha = 3.5\nd=20\nthreshold_db = -4 # comment\nintensity = 1e-3\nwindow = 250\n",
        )
        .unwrap();
        let args = CommonArgs {
            alpha: Some(5.0),
            seed: Some(1),
            ..Default::default()
        };
        let s = Settings::resolve_with(&args, &file).unwrap();
        assert_eq!(s.params.alpha, 5.0);
        assert_eq!(s.params.d, 20.0);
        assert_eq!(s.threshold_db, -4.0);
        assert_eq!(s.params.lambda_p(), 1e-3);
        assert_eq!(s.sim.window, Window::HalfWidth(250.0));
        assert_eq!(s.sim.trials, DEFAULT_TRIALS);

        // a density flag replaces the file's density settings as a group
        let args = CommonArgs {
            lambda: Some(2e-4),
            p: Some(0.5),
            seed: Some(1),
            ..Default::default()
        };
        let s = Settings::resolve_with(&args, &file).unwrap();
        assert_eq!((s.params.lambda, s.params.p), (2e-4, 0.5));
    }

    #[test]
    fn config_errors() {
        assert!(ConfigFile::parse("colour = blue").is_err());
        assert!(ConfigFile::parse("alpha 4").is_err());
        let file = ConfigFile::parse("alpha = four").unwrap();
        assert!(matches!(
            Settings::resolve_with(&CommonArgs::default(), &file),
            Err(CliError::Usage(_))
        ));
        let file = ConfigFile::parse("intensity = 1e-3\np = 0.5").unwrap();
        assert!(Settings::resolve_with(&CommonArgs::default(), &file).is_err());
    }

    #[test]
    fn q_policy_resolution() {
        let resolve = |args: CommonArgs| Settings::resolve_with(&args, &ConfigFile::default());
        let s = resolve(CommonArgs {
            q: Some(0.9),
            ..Default::default()
        })
        .unwrap();
        assert_eq!((s.q_policy, s.q_fixed), (QPolicy::Fixed, Some(0.9)));
        let s = resolve(CommonArgs {
            q_squared: Some(vec![0.76, 0.9]),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.q_policy, QPolicy::Tuned);
        assert_eq!(s.q_squared, vec![0.76, 0.9]);
        assert!(resolve(CommonArgs {
            q_policy: Some(QPolicy::Fixed),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(CommonArgs {
            q: Some(1.5),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(CommonArgs {
            q_squared: Some(vec![-0.1]),
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let resolve = |args: CommonArgs| Settings::resolve_with(&args, &ConfigFile::default());
        assert!(resolve(CommonArgs {
            alpha: Some(2.0),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(CommonArgs {
            threshold_db: Some(f64::NEG_INFINITY),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(CommonArgs {
            antennas: Some(0),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(CommonArgs {
            trials: Some(0),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(CommonArgs {
            window: Some("-3".into()),
            ..Default::default()
        })
        .is_err());
        let s = resolve(CommonArgs::default()).unwrap();
        assert!(s.seed_generated);
    }
}
