//! Data-augmentation MCMC for partially observed outbreaks.
//!
//! Two samplers share this module's machinery:
//!
//! * [`benchmark`] — single-site event-time moves plus add/remove/move
//!   dimension steps, the classic scheme whose mixing degrades as latent
//!   dimension grows;
//! * [`birth`] — whole-path (or partial, in exponential coordinates)
//!   proposals drawn from each process's conditional birth-process law,
//!   accepted through the complementary likelihood factors alone.
//!
//! Both operate on an [`AugmentedState`] holding exact event times for
//! every process, observed or latent, and both interleave conjugate
//! gamma draws for the rates with the path updates. States live in the
//! *epidemic frame*: time 0 is the start of the outbreak. When the start
//! time is itself unknown (an [`ModelConfig::theta0`] prior), observed
//! event times are re-anchored after every start-time draw.

pub mod benchmark;
pub mod birth;

pub use benchmark::{rj_step, run_benchmark_chain, RjMove};
pub use birth::{propose_full_path, propose_partial_path, run_new_chain, NewSamplerConfig};

use std::fmt;

use crate::error::{Error, Result};
use crate::intensity::IntensitySpec;
use crate::likelihood::{
    birth_loglik, seir_stats, sir_stats, SeirParams, SeirStats, SirParams, SirStats,
};
use crate::path::{EventPath, InitialState, ModelKind};
use crate::rng::RngStream;

/// Identifies one of the model's counting processes.
///
/// `X` counts infections, `Y` counts SIR removals or SEIR progressions,
/// `Z` counts SEIR removals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessId {
    X,
    Y,
    Z,
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessId::X => "x",
            ProcessId::Y => "y",
            ProcessId::Z => "z",
        })
    }
}

/// Gamma prior with shape `a` and rate `b` (mean `a/b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid(format!(
                "gamma prior needs positive shape and rate, got ({shape}, {rate})"
            )));
        }
        Ok(Self { shape, rate })
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }
}

/// How one rate parameter is treated: held fixed, or given a gamma prior
/// and drawn from its full conditional each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateSetting {
    Fixed(f64),
    Prior(GammaPrior),
}

impl RateSetting {
    fn initial_draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            RateSetting::Fixed(v) => *v,
            RateSetting::Prior(p) => rng.gamma(p.shape, p.rate),
        }
    }

    fn conditional_draw(
        &self,
        n_events: usize,
        exposure: f64,
        rng: &mut RngStream,
    ) -> Result<f64> {
        match self {
            RateSetting::Fixed(v) => Ok(*v),
            RateSetting::Prior(p) => draw_rate_conditional(n_events, exposure, p, rng),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, RateSetting::Fixed(_))
    }
}

/// One draw from the gamma full conditional of a rate with `n_events`
/// observed jumps and integrated `exposure`: `Gamma(n + a, exposure + b)`.
pub fn draw_rate_conditional(
    n_events: usize,
    exposure: f64,
    prior: &GammaPrior,
    rng: &mut RngStream,
) -> Result<f64> {
    if !(exposure.is_finite() && exposure >= 0.0) {
        return Err(Error::invalid(format!(
            "exposure must be finite and >= 0, got {exposure}"
        )));
    }
    Ok(rng.gamma(n_events as f64 + prior.shape, exposure + prior.rate))
}

/// What is observed about one counting process.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessObs {
    /// Every event time known exactly.
    Path(EventPath),
    /// Only the number of events in each consecutive interval of length
    /// `day_len` is known; times within each interval are latent.
    DailyCounts { counts: Vec<u64>, day_len: f64 },
    /// Only the total number of events by the horizon is known.
    Count(u64),
    /// Nothing observed — even the number of events is unknown.
    Unobserved,
}

impl ProcessObs {
    /// True when the event times are latent but their total count is fixed.
    pub fn has_known_count(&self) -> bool {
        matches!(self, ProcessObs::DailyCounts { .. } | ProcessObs::Count(_))
    }

    pub fn is_unobserved(&self) -> bool {
        matches!(self, ProcessObs::Unobserved)
    }
}

/// The complete observation record: initial compartment sizes, horizon,
/// and per-process observations (`z` present exactly for SEIR models).
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub init: InitialState,
    pub horizon: f64,
    pub x: ProcessObs,
    pub y: ProcessObs,
    pub z: Option<ProcessObs>,
}

impl Observation {
    fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::BadHorizon { horizon: self.horizon });
        }
        match self.init.kind() {
            ModelKind::Sir if self.z.is_some() => {
                return Err(Error::invalid("SIR models have no Z process observation"));
            }
            ModelKind::Seir if self.z.is_none() => {
                return Err(Error::invalid("SEIR models need a Z process observation"));
            }
            _ => {}
        }
        for (name, obs) in self.entries() {
            match obs {
                ProcessObs::Path(p) => {
                    if p.horizon() != self.horizon {
                        return Err(Error::HorizonMismatch {
                            first: self.horizon,
                            second: p.horizon(),
                        });
                    }
                }
                ProcessObs::DailyCounts { counts, day_len } => {
                    if !(day_len.is_finite() && *day_len > 0.0) {
                        return Err(Error::invalid(format!(
                            "day length for process {name} must be positive, got {day_len}"
                        )));
                    }
                    let span = counts.len() as f64 * day_len;
                    if (span - self.horizon).abs() > 1e-9 * (1.0 + self.horizon) {
                        return Err(Error::invalid(format!(
                            "daily counts for process {name} cover {span} but the horizon is {}",
                            self.horizon
                        )));
                    }
                }
                ProcessObs::Count(_) | ProcessObs::Unobserved => {}
            }
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(ProcessId, &ProcessObs)> {
        let mut v = vec![(ProcessId::X, &self.x), (ProcessId::Y, &self.y)];
        if let Some(z) = &self.z {
            v.push((ProcessId::Z, z));
        }
        v
    }
}

/// Priors, fixed rates, and structural settings for a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Transmission rate (the pre-change rate when `change_point` is set).
    pub beta: RateSetting,
    /// Post-change transmission rate; present iff `change_point` is.
    pub beta2: Option<RateSetting>,
    /// Time at which the transmission rate switches from `beta` to `beta2`.
    pub change_point: Option<f64>,
    /// Progression rate (SEIR only).
    pub alpha: Option<RateSetting>,
    /// Removal rate.
    pub gamma: RateSetting,
    /// Prior rate for the unknown epidemic start time: the start sits an
    /// `Exp(theta0 + γ + β S₀/N)`-distributed interval before the first
    /// event. `None` pins the start at time 0. SIR only.
    pub theta0: Option<f64>,
    /// Latent event counts for unobserved processes are initialized
    /// uniformly in this inclusive range.
    pub init_count_range: (usize, usize),
}

impl ModelConfig {
    /// A minimal configuration with all rates fixed and no start-time
    /// inference — convenient for tests and fixed-parameter runs.
    pub fn sir_fixed(beta: f64, gamma: f64) -> Self {
        Self {
            beta: RateSetting::Fixed(beta),
            beta2: None,
            change_point: None,
            alpha: None,
            gamma: RateSetting::Fixed(gamma),
            theta0: None,
            init_count_range: (1, 50),
        }
    }
}

/// Current rate parameters of either model family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Sir(SirParams),
    Seir(SeirParams),
}

impl Params {
    pub fn as_sir(&self) -> Result<SirParams> {
        match self {
            Params::Sir(p) => Ok(*p),
            Params::Seir(_) => Err(Error::invalid("expected SIR parameters")),
        }
    }

    pub fn as_seir(&self) -> Result<SeirParams> {
        match self {
            Params::Seir(p) => Ok(*p),
            Params::Sir(_) => Err(Error::invalid("expected SEIR parameters")),
        }
    }
}

/// The full MCMC state: rate parameters plus one exact-event-time path per
/// process (observed paths included), all in the epidemic frame, plus the
/// epidemic start time in data coordinates when it is being inferred.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub params: Params,
    pub x: EventPath,
    pub y: EventPath,
    pub z: Option<EventPath>,
    /// Data-frame time of the outbreak's start (epidemic-frame time 0);
    /// `Some` exactly when the start time is being inferred.
    pub t0x: Option<f64>,
}

impl AugmentedState {
    pub fn path(&self, id: ProcessId) -> Option<&EventPath> {
        match id {
            ProcessId::X => Some(&self.x),
            ProcessId::Y => Some(&self.y),
            ProcessId::Z => self.z.as_ref(),
        }
    }

    fn set_path(&mut self, id: ProcessId, path: EventPath) {
        match id {
            ProcessId::X => self.x = path,
            ProcessId::Y => self.y = path,
            ProcessId::Z => self.z = Some(path),
        }
    }

    /// Event count of one process.
    pub fn count(&self, id: ProcessId) -> usize {
        self.path(id).map_or(0, EventPath::len)
    }
}

/// A validated (configuration, observation) pair — the target posterior —
/// with the evaluation machinery both samplers share.
pub struct Model<'a> {
    cfg: &'a ModelConfig,
    obs: &'a Observation,
}

impl<'a> Model<'a> {
    pub fn new(cfg: &'a ModelConfig, obs: &'a Observation) -> Result<Self> {
        obs.validate()?;
        let kind = obs.init.kind();
        if cfg.beta2.is_some() != cfg.change_point.is_some() {
            return Err(Error::invalid(
                "beta2 and change_point must be configured together",
            ));
        }
        if let Some(cp) = cfg.change_point {
            if !(cp.is_finite() && cp > 0.0 && cp < obs.horizon) {
                return Err(Error::invalid(format!(
                    "change point must lie strictly inside (0, {}), got {cp}",
                    obs.horizon
                )));
            }
            if kind != ModelKind::Seir {
                return Err(Error::invalid("change points are supported for SEIR models"));
            }
        }
        match kind {
            ModelKind::Sir if cfg.alpha.is_some() => {
                return Err(Error::invalid("SIR models have no progression rate alpha"));
            }
            ModelKind::Seir if cfg.alpha.is_none() => {
                return Err(Error::invalid("SEIR models need a progression rate alpha"));
            }
            _ => {}
        }
        if let Some(theta0) = cfg.theta0 {
            if !(theta0.is_finite() && theta0 > 0.0) {
                return Err(Error::invalid(format!(
                    "theta0 must be positive, got {theta0}"
                )));
            }
            if kind != ModelKind::Sir {
                return Err(Error::invalid(
                    "start-time inference is supported for SIR models",
                ));
            }
            let daily = obs
                .entries()
                .iter()
                .any(|(_, o)| matches!(o, ProcessObs::DailyCounts { .. }));
            if daily {
                return Err(Error::invalid(
                    "start-time inference cannot be combined with daily-count data \
                     (the day grid is anchored to the data frame)",
                ));
            }
        }
        if cfg.init_count_range.0 > cfg.init_count_range.1 {
            return Err(Error::invalid("empty latent-count initialization range"));
        }
        Ok(Self { cfg, obs })
    }

    pub fn kind(&self) -> ModelKind {
        self.obs.init.kind()
    }

    pub fn config(&self) -> &ModelConfig {
        self.cfg
    }

    pub fn observation(&self) -> &Observation {
        self.obs
    }

    /// Horizon of the data frame (observation window end).
    pub fn data_horizon(&self) -> f64 {
        self.obs.horizon
    }

    /// The processes this model has.
    pub fn processes(&self) -> &'static [ProcessId] {
        match self.kind() {
            ModelKind::Sir => &[ProcessId::X, ProcessId::Y],
            ModelKind::Seir => &[ProcessId::X, ProcessId::Y, ProcessId::Z],
        }
    }

    pub fn obs_for(&self, id: ProcessId) -> Result<&ProcessObs> {
        match id {
            ProcessId::X => Ok(&self.obs.x),
            ProcessId::Y => Ok(&self.obs.y),
            ProcessId::Z => self
                .obs
                .z
                .as_ref()
                .ok_or_else(|| Error::invalid("SIR models have no Z process")),
        }
    }

    pub fn has_free_params(&self) -> bool {
        let mut free = !self.cfg.beta.is_fixed() || !self.cfg.gamma.is_fixed();
        if let Some(b2) = &self.cfg.beta2 {
            free |= !b2.is_fixed();
        }
        if let Some(a) = &self.cfg.alpha {
            free |= !a.is_fixed();
        }
        free
    }

    /// Joint log-likelihood of the state's complete event configuration.
    pub fn loglik(&self, st: &AugmentedState) -> Result<f64> {
        self.loglik_with(st, ProcessId::X, &st.x)
    }

    /// Joint log-likelihood with `path` substituted for process `id`.
    pub fn loglik_with(
        &self,
        st: &AugmentedState,
        id: ProcessId,
        path: &EventPath,
    ) -> Result<f64> {
        let x = if id == ProcessId::X { path } else { &st.x };
        let y = if id == ProcessId::Y { path } else { &st.y };
        match self.kind() {
            ModelKind::Sir => {
                let p = st.params.as_sir()?;
                Ok(sir_stats(x, y, self.obs.init)?.loglik(&p))
            }
            ModelKind::Seir => {
                let z = if id == ProcessId::Z {
                    path
                } else {
                    st.z.as_ref().expect("SEIR state has a Z path")
                };
                let p = st.params.as_seir()?;
                Ok(seir_stats(x, y, z, self.obs.init, p.change_point())?.loglik(&p))
            }
        }
    }

    /// Draws every prior-equipped rate from its gamma full conditional and
    /// returns the new parameters with the joint log-likelihood under them.
    pub fn draw_params(
        &self,
        st: &AugmentedState,
        rng: &mut RngStream,
    ) -> Result<(Params, f64)> {
        match self.kind() {
            ModelKind::Sir => {
                let stats = self.sir_state_stats(st)?;
                let beta = self.cfg.beta.conditional_draw(stats.n_x, stats.int_si_over_n, rng)?;
                let gamma = self.cfg.gamma.conditional_draw(stats.n_y, stats.int_i, rng)?;
                let p = SirParams::new(beta, gamma)?;
                Ok((Params::Sir(p), stats.loglik(&p)))
            }
            ModelKind::Seir => {
                let stats = self.seir_state_stats(st)?;
                let old = st.params.as_seir()?;
                let beta1 =
                    self.cfg.beta.conditional_draw(stats.n_x_pre, stats.int_si_over_n_pre, rng)?;
                let beta_change = match (&self.cfg.beta2, self.cfg.change_point) {
                    (Some(setting), Some(cp)) => Some((
                        setting.conditional_draw(stats.n_x_post, stats.int_si_over_n_post, rng)?,
                        cp,
                    )),
                    _ => None,
                };
                let alpha = self
                    .cfg
                    .alpha
                    .as_ref()
                    .expect("validated SEIR config has alpha")
                    .conditional_draw(stats.n_y, stats.int_e, rng)?;
                let gamma = self.cfg.gamma.conditional_draw(stats.n_z, stats.int_i, rng)?;
                let p = SeirParams::new(beta1, beta_change, alpha, gamma)?;
                debug_assert_eq!(p.change_point(), old.change_point());
                Ok((Params::Seir(p), stats.loglik(&p)))
            }
        }
    }

    fn sir_state_stats(&self, st: &AugmentedState) -> Result<SirStats> {
        let stats = sir_stats(&st.x, &st.y, self.obs.init)?;
        if !stats.feasible {
            return Err(Error::invalid(
                "conjugate update reached an infeasible state (sampler invariant violated)",
            ));
        }
        Ok(stats)
    }

    fn seir_state_stats(&self, st: &AugmentedState) -> Result<SeirStats> {
        let p = st.params.as_seir()?;
        let z = st.z.as_ref().expect("SEIR state has a Z path");
        let stats = seir_stats(&st.x, &st.y, z, self.obs.init, p.change_point())?;
        if !stats.feasible {
            return Err(Error::invalid(
                "conjugate update reached an infeasible state (sampler invariant violated)",
            ));
        }
        Ok(stats)
    }

    /// The conditional birth-process intensity of process `id` given the
    /// state's other paths and parameters — the law the birth sampler
    /// proposes from, and the process's own likelihood factor.
    pub fn intensity_for(
        &self,
        st: &AugmentedState,
        id: ProcessId,
    ) -> Result<IntensitySpec> {
        let init = self.obs.init;
        match (self.kind(), id) {
            (ModelKind::Sir, ProcessId::X) => {
                IntensitySpec::sir_infection(&st.y, init, st.params.as_sir()?.beta)
            }
            (ModelKind::Sir, ProcessId::Y) => {
                IntensitySpec::sir_recovery(&st.x, init, st.params.as_sir()?.gamma)
            }
            (ModelKind::Sir, ProcessId::Z) => {
                Err(Error::invalid("SIR models have no Z process"))
            }
            (ModelKind::Seir, ProcessId::X) => {
                let p = st.params.as_seir()?;
                let z = st.z.as_ref().expect("SEIR state has a Z path");
                IntensitySpec::seir_infection(&st.y, z, init, |t| p.beta_at(t), p.change_point())
            }
            (ModelKind::Seir, ProcessId::Y) => {
                IntensitySpec::seir_progression(&st.x, init, st.params.as_seir()?.alpha)
            }
            (ModelKind::Seir, ProcessId::Z) => {
                IntensitySpec::seir_removal(&st.y, init, st.params.as_seir()?.gamma)
            }
        }
    }

    /// Sum of the likelihood factors of the *other* processes that read
    /// process `id`'s path, evaluated with `path` substituted for it.
    ///
    /// This is exactly the quantity whose difference drives acceptance of
    /// birth-process proposals: the proposed process's own factor cancels
    /// against the proposal density.
    pub fn complementary_with(
        &self,
        st: &AugmentedState,
        id: ProcessId,
        path: &EventPath,
    ) -> Result<f64> {
        let x = if id == ProcessId::X { path } else { &st.x };
        let y = if id == ProcessId::Y { path } else { &st.y };
        let init = self.obs.init;
        match (self.kind(), id) {
            // SIR: the other factor reads this path's compartment effects.
            (ModelKind::Sir, ProcessId::X) => {
                let p = st.params.as_sir()?;
                birth_loglik(y, &IntensitySpec::sir_recovery(x, init, p.gamma)?)
            }
            (ModelKind::Sir, ProcessId::Y) => {
                let p = st.params.as_sir()?;
                birth_loglik(x, &IntensitySpec::sir_infection(y, init, p.beta)?)
            }
            (ModelKind::Sir, ProcessId::Z) => {
                Err(Error::invalid("SIR models have no Z process"))
            }
            // SEIR: infections read (y, z); progressions read x; removals
            // read y. So x's complement is the progression factor; y's is
            // the infection and removal factors; z's is the infection one.
            (ModelKind::Seir, ProcessId::X) => {
                let p = st.params.as_seir()?;
                birth_loglik(y, &IntensitySpec::seir_progression(x, init, p.alpha)?)
            }
            (ModelKind::Seir, ProcessId::Y) => {
                let p = st.params.as_seir()?;
                let z = st.z.as_ref().expect("SEIR state has a Z path");
                let fx = birth_loglik(
                    x,
                    &IntensitySpec::seir_infection(y, z, init, |t| p.beta_at(t), p.change_point())?,
                )?;
                if fx == f64::NEG_INFINITY {
                    return Ok(f64::NEG_INFINITY);
                }
                let fz = birth_loglik(z, &IntensitySpec::seir_removal(y, init, p.gamma)?)?;
                Ok(fx + fz)
            }
            (ModelKind::Seir, ProcessId::Z) => {
                let p = st.params.as_seir()?;
                let z = path;
                birth_loglik(
                    x,
                    &IntensitySpec::seir_infection(y, z, init, |t| p.beta_at(t), p.change_point())?,
                )
            }
        }
    }

    /// Gibbs update of the epidemic start time (when configured): the start
    /// sits a truncated-exponential interval before the first event, and the
    /// whole state is re-anchored so that epidemic-frame time 0 is the start.
    pub fn update_t0(&self, st: &mut AugmentedState, rng: &mut RngStream) -> Result<()> {
        let theta0 = self
            .cfg
            .theta0
            .ok_or_else(|| Error::invalid("start-time inference is not configured"))?;
        let first_frame = match (st.x.times().first(), st.y.times().first()) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => return Ok(()), // no events: nothing anchors the start
        };
        let t0_old = st.t0x.unwrap_or(0.0);
        let t1_data = t0_old + first_frame;
        let p = st.params.as_sir()?;
        let t0_new = draw_t0(
            theta0,
            &p,
            self.obs.init.s0(),
            self.obs.init.population(),
            t1_data,
            rng,
        )?;
        let new_h = self.obs.horizon - t0_new;
        let shift = t0_old - t0_new;
        for &id in self.processes() {
            // Observed paths re-anchor from their pristine data-frame
            // times so floating-point error cannot accumulate over
            // thousands of start-time draws; latent paths shift.
            let new_path = match self.obs_for(id)? {
                ProcessObs::Path(data) => shift_times(data.times(), -t0_new, new_h)?,
                _ => {
                    let cur = st.path(id).expect("model process has a path");
                    shift_times(cur.times(), shift, new_h)?
                }
            };
            st.set_path(id, new_path);
        }
        st.t0x = Some(t0_new);
        Ok(())
    }
}

/// Shifts every time by `shift` onto a new horizon, absorbing up to a few
/// ulps of overshoot at the right endpoint.
fn shift_times(times: &[f64], shift: f64, new_horizon: f64) -> Result<EventPath> {
    let tol = 1e-9 * (1.0 + new_horizon.abs());
    let shifted = times
        .iter()
        .map(|&t| {
            let s = t + shift;
            if s > new_horizon && s - new_horizon < tol {
                new_horizon
            } else {
                s
            }
        })
        .collect();
    EventPath::new(shifted, new_horizon)
}

/// Draws the epidemic start time from its full conditional: a point
/// `Exp(θ)`-distributed before the first event at `t1`, where
/// `θ = theta0 + γ + β·S₀/N`.
pub fn draw_t0(
    theta0: f64,
    p: &SirParams,
    s0: u64,
    n: u64,
    t1: f64,
    rng: &mut RngStream,
) -> Result<f64> {
    if !(theta0.is_finite() && theta0 > 0.0) {
        return Err(Error::invalid(format!("theta0 must be positive, got {theta0}")));
    }
    if n == 0 || !t1.is_finite() {
        return Err(Error::invalid("draw_t0 needs a positive population and finite t1"));
    }
    let theta = theta0 + p.gamma + p.beta * s0 as f64 / n as f64;
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::invalid(format!("total start-time rate {theta} must be positive")));
    }
    Ok(t1 + rng.open01().ln() / theta)
}

/// True when `t` exactly equals an event time in any process other than
/// `skip` — such proposals are rejected to keep all event times distinct.
fn collides(st: &AugmentedState, skip: ProcessId, t: f64) -> bool {
    let check = |p: &EventPath| {
        p.times()
            .binary_search_by(|s| s.partial_cmp(&t).expect("event times are never NaN"))
            .is_ok()
    };
    let mut hit = false;
    if skip != ProcessId::X {
        hit |= check(&st.x);
    }
    if skip != ProcessId::Y {
        hit |= check(&st.y);
    }
    if let Some(z) = &st.z {
        if skip != ProcessId::Z {
            hit |= check(z);
        }
    }
    hit
}

/// True when any time of `cand` exactly equals an event time in a process
/// other than `skip`.
fn collides_path(st: &AugmentedState, skip: ProcessId, cand: &EventPath) -> bool {
    cand.times().iter().any(|&t| collides(st, skip, t))
}

/// The open proposal window for a single-site move of event `index` of
/// process `id`: the whole observation window for count-only data, the
/// event's own day for daily-count data.
fn site_window(model: &Model, st: &AugmentedState, id: ProcessId, index: usize) -> Result<(f64, f64)> {
    let path = st
        .path(id)
        .ok_or_else(|| Error::invalid("process has no path in this model"))?;
    if index >= path.len() {
        return Err(Error::invalid(format!(
            "event index {index} out of range for process {id} with {} events",
            path.len()
        )));
    }
    match model.obs_for(id)? {
        ProcessObs::Count(_) => Ok((0.0, path.horizon())),
        ProcessObs::DailyCounts { day_len, .. } => {
            let t = path.times()[index];
            let day = (t / day_len).ceil().max(1.0);
            Ok(((day - 1.0) * day_len, day * day_len))
        }
        _ => Err(Error::invalid(
            "single-site moves apply to processes with latent times but known counts",
        )),
    }
}

/// Single-site Metropolis update of one latent event time: an independence
/// proposal uniform over the event's window, accepted with the joint
/// likelihood ratio. Returns whether the move was accepted.
pub fn mh_move_event_time(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    index: usize,
    rng: &mut RngStream,
) -> Result<bool> {
    let cur_ll = model.loglik(st)?;
    let (accepted, _) = site_move_inner(model, st, id, index, cur_ll, rng)?;
    Ok(accepted)
}

/// Internals of [`mh_move_event_time`] with the current log-likelihood
/// threaded through, returning the (possibly updated) value.
fn site_move_inner(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    index: usize,
    cur_ll: f64,
    rng: &mut RngStream,
) -> Result<(bool, f64)> {
    let (lo, hi) = site_window(model, st, id, index)?;
    let t_new = rng.uniform_open(lo, hi);
    if collides(st, id, t_new) {
        return Ok((false, cur_ll));
    }
    let path = st.path(id).expect("window lookup verified the path");
    let cand = match path.with_moved(index, t_new) {
        Ok(c) => c,
        // Landing exactly on a sibling event in the same process has zero
        // probability but would break strict ordering; treat as a reject.
        Err(Error::NotIncreasing { .. }) => return Ok((false, cur_ll)),
        Err(e) => return Err(e),
    };
    let cand_ll = model.loglik_with(st, id, &cand)?;
    if rng.accept_log(cand_ll - cur_ll) {
        st.set_path(id, cand);
        Ok((true, cand_ll))
    } else {
        Ok((false, cur_ll))
    }
}

/// Sweeps a single-site update over every latent event of every
/// known-count process. Returns (accepted, attempted) totals and the
/// updated joint log-likelihood.
fn site_sweep(
    model: &Model,
    st: &mut AugmentedState,
    mut cur_ll: f64,
    rng: &mut RngStream,
    mut per_process: impl FnMut(ProcessId, usize, usize),
) -> Result<f64> {
    for &id in model.processes() {
        if !model.obs_for(id)?.has_known_count() {
            continue;
        }
        let n = st.count(id);
        let mut accepted = 0;
        for index in 0..n {
            let (acc, ll) = site_move_inner(model, st, id, index, cur_ll, rng)?;
            cur_ll = ll;
            accepted += usize::from(acc);
        }
        per_process(id, accepted, n);
    }
    Ok(cur_ll)
}

/// Draws an initial state: parameters from their priors (or fixed values),
/// latent paths uniform over their windows, retrying until the joint
/// likelihood is finite; then anchors the start time if it is inferred.
///
/// When the uniform draws never keep the epidemic alive (typical with a tiny
/// initial infective pool and many observed transitions), a second round of
/// attempts places each latent infection just before the transition that
/// needs it, which is feasible whenever any configuration is.
pub fn init_state(model: &Model, rng: &mut RngStream) -> Result<AugmentedState> {
    for _attempt in 0..1000 {
        if let Some(st) = init_attempt(model, rng, false)? {
            return Ok(st);
        }
    }
    for _attempt in 0..1000 {
        if let Some(st) = init_attempt(model, rng, true)? {
            return Ok(st);
        }
    }
    Err(Error::invalid(
        "could not find a feasible initial configuration in 1000 attempts; \
         widen init_count_range or check the observation for consistency",
    ))
}

/// One initialization attempt; `Ok(None)` means "retry with fresh draws".
/// With `lead_infections`, a latent X is built by the just-in-time
/// construction instead of uniform draws.
fn init_attempt(
    model: &Model,
    rng: &mut RngStream,
    lead_infections: bool,
) -> Result<Option<AugmentedState>> {
    let horizon = model.data_horizon();
    let (lo, hi) = model.config().init_count_range;
    let params = match model.kind() {
        ModelKind::Sir => Params::Sir(SirParams::new(
            model.config().beta.initial_draw(rng),
            model.config().gamma.initial_draw(rng),
        )?),
        ModelKind::Seir => {
            let beta1 = model.config().beta.initial_draw(rng);
            let beta_change = match (&model.config().beta2, model.config().change_point) {
                (Some(s), Some(cp)) => Some((s.initial_draw(rng), cp)),
                _ => None,
            };
            let alpha = model
                .config()
                .alpha
                .as_ref()
                .expect("validated SEIR config has alpha")
                .initial_draw(rng);
            let gamma = model.config().gamma.initial_draw(rng);
            Params::Seir(SeirParams::new(beta1, beta_change, alpha, gamma)?)
        }
    };
    // Build X last so the just-in-time construction can see the successor
    // process (Y) it must feed.
    let mut entries = model.observation().entries();
    entries.rotate_left(1);
    let mut paths: Vec<(ProcessId, EventPath)> = Vec::new();
    for (id, obs) in entries {
        let built = match obs {
            ProcessObs::Path(p) => Ok(p.clone()),
            ProcessObs::Count(n) if lead_infections && id == ProcessId::X => {
                early_stack_times(*n as usize, &paths, horizon)
            }
            ProcessObs::Count(n) => random_times(*n as usize, 0.0, horizon, horizon, rng),
            ProcessObs::DailyCounts { counts, day_len } => {
                let mut times = Vec::new();
                for (d, &c) in counts.iter().enumerate() {
                    let lo = d as f64 * day_len;
                    let hi = lo + day_len;
                    for _ in 0..c {
                        times.push(rng.uniform_open(lo, hi));
                    }
                }
                times.sort_by(f64::total_cmp);
                EventPath::new(times, horizon)
            }
            ProcessObs::Unobserved if lead_infections && id == ProcessId::X => {
                let free = match model.kind() {
                    ModelKind::Sir => model.observation().init.i0(),
                    ModelKind::Seir => model.observation().init.e0(),
                } as usize;
                let fed = paths
                    .iter()
                    .find(|(i, _)| *i == ProcessId::Y)
                    .map_or(0, |(_, p)| p.times().len());
                early_stack_times(fed.saturating_sub(free), &paths, horizon)
            }
            ProcessObs::Unobserved => {
                let n = rng.int_inclusive(lo as u64, hi as u64) as usize;
                random_times(n, 0.0, horizon, horizon, rng)
            }
        };
        match built {
            Ok(p) => paths.push((id, p)),
            // Exact ties among uniform draws: try again.
            Err(Error::NotIncreasing { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    let mut st = AugmentedState {
        params,
        x: EventPath::empty(horizon)?,
        y: EventPath::empty(horizon)?,
        z: None,
        t0x: None,
    };
    for (id, p) in paths {
        st.set_path(id, p);
    }
    match model.loglik(&st) {
        Ok(ll) if ll.is_finite() => {
            if model.config().theta0.is_some() {
                st.t0x = Some(0.0);
                model.update_t0(&mut st, rng)?;
            }
            Ok(Some(st))
        }
        Ok(_) => Ok(None),
        // Cross-process ties among the random draws: try again.
        Err(Error::Tie { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Places `n` infection times evenly in the window before the first event of
/// any other process. Front-loading the infections keeps every pool as full
/// as it can be at every later event, so the configuration is feasible
/// whenever any configuration with `n` infections is (given at least one
/// initial infective to seed the chain of transmissions).
fn early_stack_times(n: usize, built: &[(ProcessId, EventPath)], horizon: f64) -> Result<EventPath> {
    let mut window = horizon;
    for (_, p) in built {
        if let Some(&first) = p.times().first() {
            window = window.min(first);
        }
    }
    let times = (1..=n).map(|j| window * j as f64 / (n + 1) as f64).collect();
    EventPath::new(times, horizon)
}

/// `n` sorted uniform draws from the open interval `(lo, hi)` as a path.
fn random_times(
    n: usize,
    lo: f64,
    hi: f64,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<EventPath> {
    let mut times: Vec<f64> = (0..n).map(|_| rng.uniform_open(lo, hi)).collect();
    times.sort_by(f64::total_cmp);
    EventPath::new(times, horizon)
}

/// Per-iteration records of an MCMC run, stored column-major under stable
/// column names (parameters, event counts, log-likelihood, acceptance
/// indicators).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    cols: Vec<(String, Vec<f64>)>,
}

impl ChainTrace {
    pub fn with_columns<S: Into<String>>(names: Vec<S>) -> Self {
        Self {
            cols: names.into_iter().map(|n| (n.into(), Vec::new())).collect(),
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.cols.iter().map(|(n, _)| n.as_str())
    }

    /// Column names with their recorded values, in column order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.cols.iter().map(|(n, v)| (n.as_str(), v.as_slice()))
    }

    pub fn n_columns(&self) -> usize {
        self.cols.len()
    }

    /// Number of recorded iterations.
    pub fn len(&self) -> usize {
        self.cols.first().map_or(0, |(_, v)| v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.cols
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.cols.len() {
            return Err(Error::invalid(format!(
                "trace row has {} values but {} columns",
                row.len(),
                self.cols.len()
            )));
        }
        for ((_, col), &v) in self.cols.iter_mut().zip(row) {
            col.push(v);
        }
        Ok(())
    }

    /// The `i`-th row in column order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.cols.iter().map(|(_, v)| v[i]).collect()
    }
}

/// Names of the parameter/state columns shared by both samplers.
fn state_columns(model: &Model) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    match model.kind() {
        ModelKind::Sir => {
            cols.push("beta".into());
            cols.push("gamma".into());
        }
        ModelKind::Seir => {
            cols.push("beta1".into());
            if model.config().change_point.is_some() {
                cols.push("beta2".into());
            }
            cols.push("alpha".into());
            cols.push("gamma".into());
        }
    }
    if model.config().theta0.is_some() {
        cols.push("t0x".into());
    }
    cols.push("n_x".into());
    cols.push("n_y".into());
    if model.kind() == ModelKind::Seir {
        cols.push("n_z".into());
    }
    cols.push("loglik".into());
    cols
}

/// Values for [`state_columns`], in the same order.
fn state_values(model: &Model, st: &AugmentedState, loglik: f64) -> Result<Vec<f64>> {
    let mut row = Vec::new();
    match st.params {
        Params::Sir(p) => {
            row.push(p.beta);
            row.push(p.gamma);
        }
        Params::Seir(p) => {
            row.push(p.beta1);
            if let Some((b2, _)) = p.beta_change {
                row.push(b2);
            }
            row.push(p.alpha);
            row.push(p.gamma);
        }
    }
    if model.config().theta0.is_some() {
        row.push(st.t0x.unwrap_or(0.0));
    }
    row.push(st.x.len() as f64);
    row.push(st.y.len() as f64);
    if let Some(z) = &st.z {
        row.push(z.len() as f64);
    }
    if !loglik.is_finite() {
        return Err(Error::invalid(
            "recorded state has non-finite log-likelihood (sampler invariant violated)",
        ));
    }
    row.push(loglik);
    Ok(row)
}
