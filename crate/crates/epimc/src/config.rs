//! Flat `key = value` run configuration.
//!
//! A run file fully determines a fit up to the RNG seed: the model family
//! and initial compartments, the data file and how each process is
//! observed, the prior or fixed value of every rate, and the sampler with
//! its iteration budget. The grammar is one `key = value` pair per line,
//! `#` starts a comment, blank lines are ignored, and every key is
//! validated — unknown or duplicate keys are parse errors, so a typo
//! cannot silently fall back to a default. Relative paths in the file are
//! resolved against the directory containing the configuration.
//!
//! ## Keys
//!
//! | key | value | notes |
//! |-----|-------|-------|
//! | `model` | `sir` or `seir` | required |
//! | `population` | integer | required; total community size |
//! | `i0` | integer | required; initially infectious |
//! | `e0` | integer | SEIR only; initially exposed (default 0) |
//! | `r0` | integer | initially removed (default 0) |
//! | `data` | path | optional; observation file |
//! | `data_format` | `removal_times`, `daily_counts`, `events` | with `data` |
//! | `horizon` | real | required without daily counts data |
//! | `days` | integer | optional row-count check for daily counts |
//! | `observe_x` / `observe_y` / `observe_z` | `path` or `none` | events format only |
//! | `count_x` | integer | observe only X's endpoint count |
//! | `beta_fixed` or `beta_prior` | real / `shape,rate` | required |
//! | `beta2_fixed` or `beta2_prior` | real / `shape,rate` | with `change_point` |
//! | `change_point` | real | transmission-rate switch time |
//! | `alpha_fixed` or `alpha_prior` | real / `shape,rate` | SEIR required |
//! | `gamma_fixed` or `gamma_prior` | real / `shape,rate` | required |
//! | `theta0` | real | SIR start-time prior rate |
//! | `sampler` | `benchmark` or `new` | required |
//! | `iters` | integer | required |
//! | `burn_in` | integer | required |
//! | `update_fraction` | real in (0,1] | new sampler only (default 1) |
//! | `tune_target` | real in (0,1) | new sampler only; burn-in tuning |
//! | `init_count_low` / `init_count_high` | integer | latent-count init range |
//! | `seed` | integer | optional here; a run needs it here or on the CLI |
//! | `trace` | path | trace CSV output (default `trace.csv`) |

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::dataio;
use crate::error::{Error, Result};
use crate::path::{InitialState, ModelKind};
use crate::sampler::{
    GammaPrior, ModelConfig, Observation, ProcessObs, RateSetting,
};

/// Which file format the `data` key points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    RemovalTimes,
    DailyCounts,
    Events,
}

/// Which sampling algorithm drives the latent paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerChoice {
    /// Single-event add/remove/move reversible moves.
    Benchmark,
    /// Whole- or partial-path proposals from the conditional birth process.
    New,
}

/// How one process in an event table is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObserveMode {
    /// Observed as a full path when present in the file, latent otherwise.
    #[default]
    Auto,
    /// Must be present in the file; observed as a full path.
    Path,
    /// Latent even if the file carries its rows.
    None,
}

/// A parsed, internally consistent run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub population: u64,
    pub i0: u64,
    pub e0: u64,
    pub r0: u64,
    pub data: Option<PathBuf>,
    pub data_format: Option<DataFormat>,
    pub horizon: Option<f64>,
    pub days: Option<usize>,
    pub observe_x: ObserveMode,
    pub observe_y: ObserveMode,
    pub observe_z: ObserveMode,
    pub count_x: Option<u64>,
    pub beta: RateSetting,
    pub beta2: Option<RateSetting>,
    pub change_point: Option<f64>,
    pub alpha: Option<RateSetting>,
    pub gamma: RateSetting,
    pub theta0: Option<f64>,
    pub sampler: SamplerChoice,
    pub iters: usize,
    pub burn_in: usize,
    pub update_fraction: f64,
    pub tune_target: Option<f64>,
    pub init_count_range: (usize, usize),
    pub seed: Option<u64>,
    pub trace: PathBuf,
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "population",
    "i0",
    "e0",
    "r0",
    "data",
    "data_format",
    "horizon",
    "days",
    "observe_x",
    "observe_y",
    "observe_z",
    "count_x",
    "beta_fixed",
    "beta_prior",
    "beta2_fixed",
    "beta2_prior",
    "change_point",
    "alpha_fixed",
    "alpha_prior",
    "gamma_fixed",
    "gamma_prior",
    "theta0",
    "sampler",
    "iters",
    "burn_in",
    "update_fraction",
    "tune_target",
    "init_count_low",
    "init_count_high",
    "seed",
    "trace",
];

/// Raw `key = value` pairs with the line each key appeared on.
struct RawConfig {
    file: String,
    pairs: HashMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str, file: &str) -> Result<Self> {
        let mut pairs: HashMap<String, (usize, String)> = HashMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    file: file.to_string(),
                    line: line_no,
                    message: format!("expected key = value, got {line:?}"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse {
                    file: file.to_string(),
                    line: line_no,
                    message: format!("unknown key {key:?}"),
                });
            }
            if let Some((first, _)) = pairs.get(&key) {
                return Err(Error::Parse {
                    file: file.to_string(),
                    line: line_no,
                    message: format!("duplicate key {key:?} (first set on line {first})"),
                });
            }
            pairs.insert(key, (line_no, value));
        }
        Ok(Self { file: file.to_string(), pairs })
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse { file: self.file.clone(), line, message: message.into() }
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.pairs.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| self.err(line, format!("{key}: expected {what}, got {v:?}"))),
        }
    }

    fn require<T>(&self, key: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| self.err(0, format!("missing required key {key:?}")))
    }
}

fn parse_prior(raw: &RawConfig, line: usize, key: &str, v: &str) -> Result<GammaPrior> {
    let Some((a, b)) = v.split_once(',') else {
        return Err(raw.err(line, format!("{key}: expected \"shape,rate\", got {v:?}")));
    };
    let shape: f64 = a
        .trim()
        .parse()
        .map_err(|_| raw.err(line, format!("{key}: shape is not a number: {a:?}")))?;
    let rate: f64 = b
        .trim()
        .parse()
        .map_err(|_| raw.err(line, format!("{key}: rate is not a number: {b:?}")))?;
    GammaPrior::new(shape, rate)
}

/// Reads one rate's setting from the `<name>_fixed` / `<name>_prior` pair.
fn take_rate(raw: &mut RawConfig, name: &str) -> Result<Option<RateSetting>> {
    let fixed = raw.take(&format!("{name}_fixed"));
    let prior = raw.take(&format!("{name}_prior"));
    match (fixed, prior) {
        (Some((line, _)), Some(_)) => Err(raw.err(
            line,
            format!("{name}_fixed and {name}_prior are mutually exclusive"),
        )),
        (Some((line, v)), None) => {
            let rate: f64 = v
                .parse()
                .map_err(|_| raw.err(line, format!("{name}_fixed: not a number: {v:?}")))?;
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(raw.err(line, format!("{name}_fixed must be >= 0, got {rate}")));
            }
            Ok(Some(RateSetting::Fixed(rate)))
        }
        (None, Some((line, v))) => {
            Ok(Some(RateSetting::Prior(parse_prior(raw, line, name, &v)?)))
        }
        (None, None) => Ok(None),
    }
}

fn take_observe(raw: &mut RawConfig, key: &str) -> Result<ObserveMode> {
    match raw.take(key) {
        None => Ok(ObserveMode::Auto),
        Some((line, v)) => match v.as_str() {
            "path" => Ok(ObserveMode::Path),
            "none" => Ok(ObserveMode::None),
            other => Err(raw.err(line, format!("{key}: expected path or none, got {other:?}"))),
        },
    }
}

impl RunConfig {
    /// Parses a configuration file; relative paths inside it are resolved
    /// against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str_with_base(&text, base, &path.display().to_string())
    }

    /// Parses configuration text, resolving relative paths against `base`;
    /// `file` labels parse errors.
    pub fn from_str_with_base(text: &str, base: &Path, file: &str) -> Result<Self> {
        let mut raw = RawConfig::parse(text, file)?;

        let model = match raw.take("model") {
            Some((_, v)) if v == "sir" => ModelKind::Sir,
            Some((_, v)) if v == "seir" => ModelKind::Seir,
            Some((line, v)) => {
                return Err(raw.err(line, format!("model: expected sir or seir, got {v:?}")))
            }
            None => return Err(raw.err(0, "missing required key \"model\"")),
        };
        let population = raw.take_parsed::<u64>("population", "an integer")?;
        let population = raw.require("population", population)?;
        let i0 = raw.take_parsed::<u64>("i0", "an integer")?;
        let i0 = raw.require("i0", i0)?;
        let e0 = raw.take_parsed::<u64>("e0", "an integer")?.unwrap_or(0);
        let r0 = raw.take_parsed::<u64>("r0", "an integer")?.unwrap_or(0);
        if model == ModelKind::Sir && e0 != 0 {
            return Err(raw.err(0, "e0 is only meaningful for seir models"));
        }

        let data = raw.take("data").map(|(_, v)| resolve(base, &v));
        let data_format = match raw.take("data_format") {
            None => None,
            Some((line, v)) => Some(match v.as_str() {
                "removal_times" => DataFormat::RemovalTimes,
                "daily_counts" => DataFormat::DailyCounts,
                "events" => DataFormat::Events,
                other => {
                    return Err(raw.err(
                        line,
                        format!(
                            "data_format: expected removal_times, daily_counts, or events, \
                             got {other:?}"
                        ),
                    ))
                }
            }),
        };
        match (&data, &data_format) {
            (Some(_), None) => return Err(raw.err(0, "data requires data_format")),
            (None, Some(_)) => return Err(raw.err(0, "data_format requires data")),
            _ => {}
        }
        let horizon = raw.take_parsed::<f64>("horizon", "a number")?;
        if let Some(h) = horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(raw.err(0, format!("horizon must be positive, got {h}")));
            }
        }
        if data_format == Some(DataFormat::DailyCounts) && horizon.is_some() {
            return Err(raw.err(0, "horizon is implied by a daily-count table; remove it"));
        }
        if data_format != Some(DataFormat::DailyCounts) && horizon.is_none() {
            match data_format {
                Some(DataFormat::RemovalTimes) => {} // defaults to the last removal
                _ => return Err(raw.err(0, "missing required key \"horizon\"")),
            }
        }
        let days = raw.take_parsed::<usize>("days", "an integer")?;
        if days.is_some() && data_format != Some(DataFormat::DailyCounts) {
            return Err(raw.err(0, "days only applies to daily_counts data"));
        }

        let observe_x = take_observe(&mut raw, "observe_x")?;
        let observe_y = take_observe(&mut raw, "observe_y")?;
        let observe_z = take_observe(&mut raw, "observe_z")?;
        let any_observe = [observe_x, observe_y, observe_z]
            .iter()
            .any(|m| *m != ObserveMode::Auto);
        if any_observe && data_format.is_some() && data_format != Some(DataFormat::Events) {
            return Err(raw.err(0, "observe_x/y/z only apply to events data"));
        }
        let count_x = raw.take_parsed::<u64>("count_x", "an integer")?;

        let beta = take_rate(&mut raw, "beta")?;
        let beta = raw.require("beta_fixed or beta_prior", beta)?;
        let beta2 = take_rate(&mut raw, "beta2")?;
        let change_point = raw.take_parsed::<f64>("change_point", "a number")?;
        if beta2.is_some() != change_point.is_some() {
            return Err(raw.err(0, "beta2 and change_point must be configured together"));
        }
        let alpha = take_rate(&mut raw, "alpha")?;
        match (model, &alpha) {
            (ModelKind::Seir, None) => {
                return Err(raw.err(0, "seir models need alpha_fixed or alpha_prior"))
            }
            (ModelKind::Sir, Some(_)) => {
                return Err(raw.err(0, "alpha is only meaningful for seir models"))
            }
            _ => {}
        }
        let gamma = take_rate(&mut raw, "gamma")?;
        let gamma = raw.require("gamma_fixed or gamma_prior", gamma)?;
        let theta0 = raw.take_parsed::<f64>("theta0", "a number")?;
        if theta0.is_some() && model == ModelKind::Seir {
            return Err(raw.err(0, "theta0 start-time inference is only wired for sir models"));
        }

        let sampler = match raw.take("sampler") {
            Some((_, v)) if v == "benchmark" => SamplerChoice::Benchmark,
            Some((_, v)) if v == "new" => SamplerChoice::New,
            Some((line, v)) => {
                return Err(raw.err(line, format!("sampler: expected benchmark or new, got {v:?}")))
            }
            None => return Err(raw.err(0, "missing required key \"sampler\"")),
        };
        let iters = raw.take_parsed::<usize>("iters", "an integer")?;
        let iters = raw.require("iters", iters)?;
        let burn_in = raw.take_parsed::<usize>("burn_in", "an integer")?;
        let burn_in = raw.require("burn_in", burn_in)?;
        if iters == 0 || burn_in >= iters {
            return Err(raw.err(0, format!("need burn_in < iters, got {burn_in} >= {iters}")));
        }
        let update_fraction =
            raw.take_parsed::<f64>("update_fraction", "a number")?.unwrap_or(1.0);
        let tune_target = raw.take_parsed::<f64>("tune_target", "a number")?;
        if sampler == SamplerChoice::Benchmark
            && (update_fraction != 1.0 || tune_target.is_some())
        {
            return Err(raw.err(
                0,
                "update_fraction and tune_target only apply to the new sampler",
            ));
        }
        let low = raw.take_parsed::<usize>("init_count_low", "an integer")?.unwrap_or(1);
        let high = raw.take_parsed::<usize>("init_count_high", "an integer")?.unwrap_or(50);
        if low > high {
            return Err(raw.err(0, format!("init_count_low {low} > init_count_high {high}")));
        }
        let seed = raw.take_parsed::<u64>("seed", "an integer")?;
        let trace = raw
            .take("trace")
            .map(|(_, v)| resolve(base, &v))
            .unwrap_or_else(|| PathBuf::from("trace.csv"));

        debug_assert!(raw.pairs.is_empty(), "unconsumed keys: {:?}", raw.pairs.keys());
        Ok(Self {
            model,
            population,
            i0,
            e0,
            r0,
            data,
            data_format,
            horizon,
            days,
            observe_x,
            observe_y,
            observe_z,
            count_x,
            beta,
            beta2,
            change_point,
            alpha,
            gamma,
            theta0,
            sampler,
            iters,
            burn_in,
            update_fraction,
            tune_target,
            init_count_range: (low, high),
            seed,
            trace,
        })
    }

    /// Initial compartment sizes implied by the configuration.
    pub fn init_state(&self) -> Result<InitialState> {
        match self.model {
            ModelKind::Sir => InitialState::sir(self.population, self.i0, self.r0),
            ModelKind::Seir => InitialState::seir(self.population, self.e0, self.i0, self.r0),
        }
    }

    /// The prior/rate structure the samplers consume.
    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            beta: self.beta,
            beta2: self.beta2,
            change_point: self.change_point,
            alpha: self.alpha,
            gamma: self.gamma,
            theta0: self.theta0,
            init_count_range: self.init_count_range,
        }
    }

    /// Loads the observation record this configuration describes, together
    /// with any ingestion warnings (for example tie adjustments).
    pub fn load_observation(&self) -> Result<(Observation, Vec<String>)> {
        let init = self.init_state()?;
        match (self.data.as_deref(), self.data_format) {
            (Some(path), Some(DataFormat::RemovalTimes)) => {
                dataio::load_removal_times(path, init, self.horizon)
            }
            (Some(path), Some(DataFormat::DailyCounts)) => {
                Ok((dataio::load_daily_counts(path, init, self.days)?, Vec::new()))
            }
            (Some(path), Some(DataFormat::Events)) => {
                let horizon = self
                    .horizon
                    .ok_or_else(|| Error::invalid("events data needs an explicit horizon"))?;
                let events = dataio::read_events(path, horizon)?;
                let pick = |mode: ObserveMode,
                            path: Option<crate::path::EventPath>,
                            name: &str|
                 -> Result<ProcessObs> {
                    match (mode, path) {
                        (ObserveMode::None, _) => Ok(ProcessObs::Unobserved),
                        (ObserveMode::Auto, Some(p)) | (ObserveMode::Path, Some(p)) => {
                            Ok(ProcessObs::Path(p))
                        }
                        (ObserveMode::Auto, None) => Ok(ProcessObs::Unobserved),
                        (ObserveMode::Path, None) => Err(Error::invalid(format!(
                            "observe_{name} = path but the events file has no {name} rows"
                        ))),
                    }
                };
                let x_path = if events.x.is_empty() { None } else { Some(events.x) };
                let mut x = pick(self.observe_x, x_path, "x")?;
                if let Some(n) = self.count_x {
                    x = ProcessObs::Count(n);
                }
                let y_path = if events.y.is_empty() { None } else { Some(events.y) };
                let y = pick(self.observe_y, y_path, "y")?;
                let z = match self.model {
                    ModelKind::Sir => None,
                    ModelKind::Seir => Some(pick(self.observe_z, events.z, "z")?),
                };
                Ok((Observation { init, horizon, x, y, z }, Vec::new()))
            }
            (None, _) => {
                let horizon = self
                    .horizon
                    .ok_or_else(|| Error::invalid("a run without data needs a horizon"))?;
                let x = match self.count_x {
                    Some(n) => ProcessObs::Count(n),
                    None => ProcessObs::Unobserved,
                };
                let z = match self.model {
                    ModelKind::Sir => None,
                    ModelKind::Seir => Some(ProcessObs::Unobserved),
                };
                Ok((
                    Observation { init, horizon, x, y: ProcessObs::Unobserved, z },
                    Vec::new(),
                ))
            }
            (Some(_), None) => unreachable!("format checked during parse"),
        }
    }
}

fn resolve(base: &Path, v: &str) -> PathBuf {
    let p = PathBuf::from(v);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_str_with_base(text, Path::new("/cfgdir"), "test.cfg")
    }

    const MINIMAL: &str = "\
model = sir
population = 120
i0 = 1
beta_prior = 10,100
gamma_prior = 10,100
sampler = new
iters = 5000
burn_in = 500
horizon = 76
";

    #[test]
    fn minimal_configuration_parses_with_defaults() {
        let cfg = parse(MINIMAL).unwrap();
        assert_eq!(cfg.model, ModelKind::Sir);
        assert_eq!((cfg.population, cfg.i0, cfg.e0, cfg.r0), (120, 1, 0, 0));
        assert_eq!(cfg.sampler, SamplerChoice::New);
        assert_eq!(cfg.update_fraction, 1.0);
        assert_eq!(cfg.init_count_range, (1, 50));
        assert_eq!(cfg.trace, PathBuf::from("trace.csv"));
        assert!(cfg.seed.is_none());
        let beta = match cfg.beta {
            RateSetting::Prior(p) => p,
            other => panic!("expected prior, got {other:?}"),
        };
        assert_eq!((beta.shape, beta.rate), (10.0, 100.0));
        let init = cfg.init_state().unwrap();
        assert_eq!((init.s0(), init.i0()), (119, 1));
        let (obs, warnings) = cfg.load_observation().unwrap();
        assert!(warnings.is_empty());
        assert!(matches!(obs.x, ProcessObs::Unobserved));
        assert!(matches!(obs.y, ProcessObs::Unobserved));
        assert_eq!(obs.horizon, 76.0);
    }

    #[test]
    fn comments_and_spacing_are_tolerated() {
        let text = MINIMAL.replace("iters = 5000", "  iters=5000   # big run");
        let cfg = parse(&text).unwrap();
        assert_eq!(cfg.iters, 5000);
    }

    #[test]
    fn unknown_duplicate_and_malformed_keys_error_with_lines() {
        let err = parse(&format!("{MINIMAL}bogus_key = 1\n")).unwrap_err().to_string();
        assert!(err.contains("test.cfg:10") && err.contains("unknown key"), "{err}");
        let err = parse(&format!("{MINIMAL}iters = 6000\n")).unwrap_err().to_string();
        assert!(err.contains("duplicate key") && err.contains("line 7"), "{err}");
        let err = parse(&format!("{MINIMAL}seed\n")).unwrap_err().to_string();
        assert!(err.contains("expected key = value"), "{err}");
    }

    #[test]
    fn required_keys_and_exclusive_rates_are_enforced() {
        let missing = MINIMAL.replace("gamma_prior = 10,100\n", "");
        let err = parse(&missing).unwrap_err().to_string();
        assert!(err.contains("gamma_fixed or gamma_prior"), "{err}");
        let both = format!("{MINIMAL}beta_fixed = 0.2\n");
        let err = parse(&both).unwrap_err().to_string();
        assert!(err.contains("mutually exclusive"), "{err}");
        let err = parse(&MINIMAL.replace("burn_in = 500", "burn_in = 5000"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("burn_in < iters"), "{err}");
    }

    #[test]
    fn structural_pairings_are_enforced() {
        let err = parse(&format!("{MINIMAL}change_point = 16\n")).unwrap_err().to_string();
        assert!(err.contains("beta2 and change_point"), "{err}");
        let err = parse(&format!("{MINIMAL}alpha_fixed = 0.1\n")).unwrap_err().to_string();
        assert!(err.contains("only meaningful for seir"), "{err}");
        let seir_missing_alpha = MINIMAL.replace("model = sir", "model = seir");
        let err = parse(&seir_missing_alpha).unwrap_err().to_string();
        assert!(err.contains("need alpha"), "{err}");
        let err = parse(&format!(
            "{}theta0 = 0.1\nalpha_fixed = 0.1\n",
            MINIMAL.replace("model = sir", "model = seir")
        ))
        .unwrap_err()
        .to_string();
        assert!(err.contains("theta0"), "{err}");
        let bench_frac = MINIMAL.replace("sampler = new", "sampler = benchmark");
        let err = parse(&format!("{bench_frac}update_fraction = 0.5\n"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("only apply to the new sampler"), "{err}");
    }

    #[test]
    fn relative_paths_resolve_against_the_config_directory() {
        let cfg = parse(&format!(
            "{MINIMAL}data = times.txt\ndata_format = removal_times\ntrace = out/run.csv\n"
        ))
        .unwrap();
        assert_eq!(cfg.data.as_deref(), Some(Path::new("/cfgdir/times.txt")));
        assert_eq!(cfg.trace, PathBuf::from("/cfgdir/out/run.csv"));
    }

    #[test]
    fn observation_modes_shape_the_loaded_record() {
        use crate::likelihood::SirParams;
        use crate::rng::RngStream;
        use crate::simulate::gillespie_sir;

        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("events.csv");
        let init = InitialState::sir(300, 5, 0).unwrap();
        let mut rng = RngStream::new(0xC0F1, 0);
        let outbreak =
            gillespie_sir(init, &SirParams { beta: 0.7, gamma: 0.3 }, 6.0, &mut rng).unwrap();
        crate::dataio::write_events(&file, &outbreak).unwrap();

        let base = format!(
            "model = sir\npopulation = 300\ni0 = 5\nbeta_fixed = 0.7\ngamma_fixed = 0.3\n\
             sampler = new\niters = 100\nburn_in = 10\nhorizon = 6\n\
             data = events.csv\ndata_format = events\n"
        );
        let cfg = RunConfig::from_str_with_base(
            &format!("{base}observe_x = none\n"),
            dir.path(),
            "run.cfg",
        )
        .unwrap();
        let (obs, _) = cfg.load_observation().unwrap();
        assert!(matches!(obs.x, ProcessObs::Unobserved));
        assert!(matches!(&obs.y, ProcessObs::Path(p) if p == &outbreak.y));

        let cfg = RunConfig::from_str_with_base(
            &format!("{base}observe_x = none\nobserve_y = none\ncount_x = 40\n"),
            dir.path(),
            "run.cfg",
        )
        .unwrap();
        let (obs, _) = cfg.load_observation().unwrap();
        assert!(matches!(obs.x, ProcessObs::Count(40)));
        assert!(matches!(obs.y, ProcessObs::Unobserved));
    }

    #[test]
    fn daily_counts_config_forbids_redundant_horizon() {
        let text = format!(
            "{}data = daily.csv\ndata_format = daily_counts\n",
            MINIMAL.replace("horizon = 76\n", "")
        );
        assert!(parse(&text).is_ok());
        let text = format!("{MINIMAL}data = daily.csv\ndata_format = daily_counts\n");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("implied by a daily-count table"), "{err}");
    }
}
