//! Flat key = value experiment configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines ignored.
//! `schema_version = 1` is required so future format changes fail loudly
//! instead of being misread. Unknown and duplicate keys are errors.

use crate::anneal::{AnnealConfig, Mode};
use crate::decode::{Method, ProblemWeights};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Scaling,
    Threshold,
    Demo,
    GroundStats,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Threshold => "threshold",
            ExperimentKind::Demo => "demo",
            ExperimentKind::GroundStats => "ground-stats",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub distances: Vec<usize>,
    pub error_rates: Vec<f64>,
    pub trials: u64,
    pub methods: Vec<Method>,
    pub weights: ProblemWeights,
    /// Annealer parameters; the mode field is set per method at decode time.
    pub anneal: AnnealConfig,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    /// Exponent of mean iterations vs problem size on log-log axes.
    Loglog,
    /// Power law for the logical error rate below threshold.
    PowerLaw,
}

#[derive(Debug, Clone)]
pub struct FitSpec {
    pub kind: FitKind,
    /// Results CSV from a previous run.
    pub input: PathBuf,
    pub method: Method,
    /// Row filter for log-log fits: one error rate per fit.
    pub error_rate: Option<f64>,
    pub p_th: f64,
    pub p_min: f64,
    pub p_max: f64,
}

/// Raw parse: key -> (line number, value). Detects syntax errors only.
fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config { line, reason: format!("expected key = value, got {raw:?}") });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(Error::Config { line, reason: "empty key".into() });
        }
        if map.insert(key.clone(), (line, value)).is_some() {
            return Err(Error::Config { line, reason: format!("duplicate key {key:?}") });
        }
    }
    Ok(map)
}

struct Pairs(BTreeMap<String, (usize, String)>);

impl Pairs {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value.parse().map(Some).map_err(|_| Error::Config {
                line,
                reason: format!("bad value for {key}: {value:?}"),
            }),
        }
    }

    fn take_list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(|item| {
                    item.trim().parse().map_err(|_| Error::Config {
                        line,
                        reason: format!("bad list item for {key}: {:?}", item.trim()),
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn finish(self) -> Result<()> {
        match self.0.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => {
                Err(Error::Config { line, reason: format!("unknown key {key:?}") })
            }
        }
    }
}

fn check_schema(pairs: &mut Pairs) -> Result<()> {
    match pairs.take_parsed::<u64>("schema_version")? {
        Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Config {
            line: 0,
            reason: format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}"),
        }),
        None => Err(Error::Config { line: 0, reason: "missing schema_version".into() }),
    }
}

impl ExperimentSpec {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Pairs(parse_pairs(text)?);
        check_schema(&mut pairs)?;

        let kind = match pairs.take("experiment") {
            Some((_, v)) if v == "scaling" => ExperimentKind::Scaling,
            Some((_, v)) if v == "threshold" => ExperimentKind::Threshold,
            Some((_, v)) if v == "demo" => ExperimentKind::Demo,
            Some((_, v)) if v == "ground-stats" => ExperimentKind::GroundStats,
            Some((line, v)) => {
                return Err(Error::Config { line, reason: format!("unknown experiment {v:?}") })
            }
            None => return Err(Error::Config { line: 0, reason: "missing experiment".into() }),
        };

        let distances: Vec<usize> = pairs
            .take_list("distances")?
            .ok_or(Error::Config { line: 0, reason: "missing distances".into() })?;
        let error_rates: Vec<f64> = pairs
            .take_list("error_rates")?
            .ok_or(Error::Config { line: 0, reason: "missing error_rates".into() })?;
        let trials = pairs.take_parsed("trials")?.unwrap_or(1);
        let methods: Vec<Method> =
            pairs.take_list("methods")?.unwrap_or_else(|| vec![Method::Da]);

        let coupling = pairs.take_parsed("coupling")?.unwrap_or(1024);
        let field = pairs.take_parsed("field")?.unwrap_or(1);
        let penalty = pairs.take_parsed("penalty")?.unwrap_or(8 * coupling);
        let weights = ProblemWeights { coupling, field, penalty };

        let seed = pairs.take_parsed("seed")?.unwrap_or(0);
        let anneal = AnnealConfig {
            mode: Mode::DaReplicaExchange,
            replicas: pairs.take_parsed("replicas")?.unwrap_or(128),
            t_max: pairs.take_parsed("t_max")?.unwrap_or(5.0),
            t_min: pairs.take_parsed("t_min")?.unwrap_or(0.1),
            max_iterations: pairs.take_parsed("max_iterations")?.unwrap_or(1_000_000),
            exchange_interval: pairs.take_parsed("exchange_interval")?.unwrap_or(20),
            offset_increment: pairs.take_parsed("offset_increment")?.unwrap_or(1),
            stall_iterations: pairs.take_parsed("stall_iterations")?,
            seed,
        };
        let workers = pairs.take_parsed("workers")?.unwrap_or(1);
        pairs.finish()?;

        let spec = ExperimentSpec {
            kind,
            distances,
            error_rates,
            trials,
            methods,
            weights,
            anneal,
            seed,
            workers,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| {
            Err(Error::InvalidParameter { name, reason })
        };
        if self.distances.is_empty() {
            return bad("distances", "must not be empty".into());
        }
        if let Some(&d) = self.distances.iter().find(|&&d| d < 2) {
            return bad("distances", format!("distance {d} is below 2"));
        }
        if self.error_rates.is_empty() {
            return bad("error_rates", "must not be empty".into());
        }
        if let Some(&p) = self
            .error_rates
            .iter()
            .find(|&&p| !(0.0..=1.0).contains(&p) || p.is_nan())
        {
            return bad("error_rates", format!("rate {p} is outside [0, 1]"));
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("methods", "must not be empty".into());
        }
        if self.weights.coupling <= 0 || self.weights.field <= 0 || self.weights.penalty <= 0 {
            return bad("weights", "coupling, field, and penalty must be positive".into());
        }
        if self.workers == 0 {
            return bad("workers", "must be at least 1".into());
        }
        if self.methods.iter().any(|&m| m != Method::Mwpm) {
            self.anneal.validate()?;
        }
        Ok(())
    }
}

impl FitSpec {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Pairs(parse_pairs(text)?);
        check_schema(&mut pairs)?;

        let kind = match pairs.take("fit") {
            Some((_, v)) if v == "loglog" => FitKind::Loglog,
            Some((_, v)) if v == "power-law" => FitKind::PowerLaw,
            Some((line, v)) => {
                return Err(Error::Config { line, reason: format!("unknown fit kind {v:?}") })
            }
            None => return Err(Error::Config { line: 0, reason: "missing fit".into() }),
        };
        let input: PathBuf = match pairs.take("input") {
            Some((_, v)) => PathBuf::from(v),
            None => return Err(Error::Config { line: 0, reason: "missing input".into() }),
        };
        let method = pairs.take_parsed("method")?.unwrap_or(Method::Da);
        let error_rate = pairs.take_parsed("error_rate")?;
        let spec = FitSpec {
            kind,
            input,
            method,
            error_rate,
            p_th: pairs.take_parsed("p_th")?.unwrap_or(0.096),
            p_min: pairs.take_parsed("p_min")?.unwrap_or(0.04),
            p_max: pairs.take_parsed("p_max")?.unwrap_or(0.08),
        };
        pairs.finish()?;
        if spec.kind == FitKind::Loglog && spec.error_rate.is_none() {
            return Err(Error::Config {
                line: 0,
                reason: "loglog fit requires error_rate to select rows".into(),
            });
        }
        if spec.p_th <= 0.0 || spec.p_min <= 0.0 || spec.p_max < spec.p_min {
            return Err(Error::Config {
                line: 0,
                reason: "need 0 < p_min <= p_max and p_th > 0".into(),
            });
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "\
# threshold sweep
schema_version = 1
experiment = threshold
distances = 5, 7, 9, 11
error_rates = 0.07, 0.08, 0.09
trials = 2000
methods = da, mwpm
coupling = 1024
field = 1
replicas = 32
t_max = 5.0
t_min = 0.1
max_iterations = 1000000
exchange_interval = 20
offset_increment = 256
stall_iterations = 1500
seed = 42
workers = 4
";

    #[test]
    fn full_config_parses() {
        let spec = ExperimentSpec::from_text(FULL).unwrap();
        assert_eq!(spec.kind, ExperimentKind::Threshold);
        assert_eq!(spec.distances, vec![5, 7, 9, 11]);
        assert_eq!(spec.error_rates, vec![0.07, 0.08, 0.09]);
        assert_eq!(spec.trials, 2000);
        assert_eq!(spec.methods, vec![Method::Da, Method::Mwpm]);
        assert_eq!(spec.weights.penalty, 8192, "penalty defaults to 8x coupling");
        assert_eq!(spec.anneal.replicas, 32);
        assert_eq!(spec.anneal.offset_increment, 256);
        assert_eq!(spec.anneal.stall_iterations, Some(1500));
        assert_eq!(spec.anneal.seed, 42);
        assert_eq!(spec.workers, 4);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let text = "schema_version = 1\nexperiment = scaling\ndistances = 4\nerror_rates = 0.01\n";
        let spec = ExperimentSpec::from_text(text).unwrap();
        assert_eq!(spec.trials, 1);
        assert_eq!(spec.methods, vec![Method::Da]);
        assert_eq!(spec.weights.coupling, 1024);
        assert_eq!(spec.anneal.replicas, 128);
        assert_eq!(spec.anneal.stall_iterations, None);
        assert_eq!(spec.workers, 1);
    }

    #[test]
    fn syntax_errors_cite_lines() {
        let e = ExperimentSpec::from_text("schema_version = 1\nnonsense\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e}");

        let e = ExperimentSpec::from_text("schema_version = 1\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }), "{e}");

        let text = "schema_version = 1\nexperiment = scaling\ndistances = 4\nerror_rates = 0.01\ncolor = red\n";
        let e = ExperimentSpec::from_text(text).unwrap_err();
        assert!(matches!(e, Error::Config { line: 5, .. }), "{e}");

        let text = "schema_version = 1\nexperiment = scaling\ndistances = four\nerror_rates = 0.01\n";
        let e = ExperimentSpec::from_text(text).unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }), "{e}");
    }

    #[test]
    fn schema_version_is_enforced() {
        assert!(ExperimentSpec::from_text("experiment = scaling\ndistances = 4\nerror_rates = 0.01\n").is_err());
        assert!(ExperimentSpec::from_text("schema_version = 2\nexperiment = scaling\ndistances = 4\nerror_rates = 0.01\n").is_err());
    }

    #[test]
    fn semantic_validation() {
        let text = "schema_version = 1\nexperiment = scaling\ndistances = 1\nerror_rates = 0.01\n";
        assert!(ExperimentSpec::from_text(text).is_err());
        let text = "schema_version = 1\nexperiment = scaling\ndistances = 4\nerror_rates = 1.5\n";
        assert!(ExperimentSpec::from_text(text).is_err());
        let text = "schema_version = 1\nexperiment = scaling\ndistances = 4\nerror_rates = 0.01\ntrials = 0\n";
        assert!(ExperimentSpec::from_text(text).is_err());
    }

    #[test]
    fn fit_config_parses() {
        let text = "schema_version = 1\nfit = power-law\ninput = runs/threshold.csv\nmethod = da\n";
        let spec = FitSpec::from_text(text).unwrap();
        assert_eq!(spec.kind, FitKind::PowerLaw);
        assert_eq!(spec.input, PathBuf::from("runs/threshold.csv"));
        assert_eq!(spec.p_th, 0.096);
        assert_eq!((spec.p_min, spec.p_max), (0.04, 0.08));

        let text = "schema_version = 1\nfit = loglog\ninput = a.csv\nerror_rate = 0.01\nmethod = sa\n";
        let spec = FitSpec::from_text(text).unwrap();
        assert_eq!(spec.kind, FitKind::Loglog);
        assert_eq!(spec.error_rate, Some(0.01));
        assert_eq!(spec.method, Method::Sa);

        // loglog without a row filter is ambiguous.
        let text = "schema_version = 1\nfit = loglog\ninput = a.csv\n";
        assert!(FitSpec::from_text(text).is_err());
    }
}
