//! The birth-process proposal sampler.
//!
//! Each unobserved process is refreshed by proposing a *whole path* from
//! its conditional birth-process law given the other paths and the current
//! rates. Because that law is also the process's own likelihood factor,
//! the factor cancels in the acceptance ratio and only the complementary
//! factors remain — so acceptance stays well-behaved no matter how many
//! latent events the path carries.
//!
//! A partial variant rewrites only some of the path's *exponential
//! coordinates* (the unit-rate waiting times obtained by integrating the
//! proposal intensity along the path, plus one censored coordinate for
//! surviving past the last event). Each coordinate is redrawn from Exp(1)
//! independently with probability `c`, which is a draw from its law under
//! the proposal, so the same complementary-factor acceptance ratio
//! applies. In coordinate space this is an independence
//! Metropolis-within-Gibbs update of the selected block; because the
//! selection law never looks at the current path, every value of `c`
//! leaves the posterior exactly invariant, and `c` tunes the step size
//! from timid single-coordinate nudges to the whole-path refresh at
//! `c = 1`.

use super::{
    collides_path, init_state, site_sweep, state_columns, state_values, AugmentedState, ChainTrace,
    Model, ModelConfig, Observation, ProcessId,
};
use crate::error::{Error, Result};
use crate::path::EventPath;
use crate::rng::RngStream;
use crate::simulate::{coords_to_path, path_to_coords, sample_birth_path};

/// Settings for [`run_new_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewSamplerConfig {
    /// Probability `c` that each exponential coordinate is redrawn in an
    /// update (so about `c · (n + 1)` of a path of `n` events move); `1`
    /// refreshes the whole path.
    pub update_fraction: f64,
    /// Processes to update with birth-process proposals; `None` means
    /// every fully unobserved process. Listed processes must be
    /// unobserved — known-count processes keep their single-site moves.
    pub targets: Option<Vec<ProcessId>>,
    /// Total iterations (including burn-in).
    pub iters: usize,
    /// Iterations treated as burn-in (tuning, when enabled, happens here).
    pub burn_in: usize,
    /// When set, adapt `update_fraction` during burn-in by stochastic
    /// approximation on its log-odds so the path acceptance rate
    /// approaches this target; the fraction is frozen after burn-in.
    pub tune_target: Option<f64>,
}

impl NewSamplerConfig {
    /// Whole-path refreshes, no tuning.
    pub fn full_refresh(iters: usize, burn_in: usize) -> Self {
        Self {
            update_fraction: 1.0,
            targets: None,
            iters,
            burn_in,
            tune_target: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.update_fraction.is_finite()
            && self.update_fraction > 0.0
            && self.update_fraction <= 1.0)
        {
            return Err(Error::invalid(format!(
                "update fraction must lie in (0, 1], got {}",
                self.update_fraction
            )));
        }
        if self.iters == 0 {
            return Err(Error::invalid("iteration count must be positive"));
        }
        if self.burn_in >= self.iters {
            return Err(Error::invalid(format!(
                "burn-in {} must be smaller than the iteration count {}",
                self.burn_in, self.iters
            )));
        }
        if let Some(t) = self.tune_target {
            if !(t.is_finite() && t > 0.0 && t < 1.0) {
                return Err(Error::invalid(format!(
                    "acceptance target must lie in (0, 1), got {t}"
                )));
            }
        }
        Ok(())
    }
}

fn require_unobserved(model: &Model, id: ProcessId) -> Result<()> {
    if !model.obs_for(id)?.is_unobserved() {
        return Err(Error::invalid(
            "birth-process proposals change the event count, so they apply to fully unobserved processes",
        ));
    }
    Ok(())
}

/// Proposes a complete replacement path for process `id` from its
/// conditional birth-process law and accepts with the complementary-factor
/// ratio. Returns whether the proposal was accepted.
pub fn propose_full_path(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    rng: &mut RngStream,
) -> Result<bool> {
    require_unobserved(model, id)?;
    let spec = model.intensity_for(st, id)?;
    let cand = match sample_birth_path(&spec, rng) {
        Ok((path, _)) => path,
        // Two generated times collapsing to the same float: reject.
        Err(Error::NotIncreasing { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    accept_on_complement(model, st, id, cand, rng)
}

/// Partial refresh: converts the current path of process `id` to
/// exponential coordinates (the censored survival mass counts as one
/// coordinate, materialized as an Exp(1) overshoot past it), redraws each
/// coordinate independently with probability `c`, rebuilds the path, and
/// accepts with the complementary-factor ratio.
///
/// The per-coordinate inclusion law does not depend on the current number
/// of events — a subset-selection rule that did (say, a fixed subset size
/// scaled to the dimension) would make the scan probabilities
/// state-dependent and bias the invariant distribution. With independent
/// inclusion every fixed subset gives an exactly invariant move, so the
/// mixture is exact for every `c`; `c = 1` is a whole-path refresh.
///
/// Returns `None` when the selection picked no coordinate (the state is
/// untouched and nothing was proposed), otherwise whether the proposal
/// was accepted.
pub fn propose_partial_path(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    c: f64,
    rng: &mut RngStream,
) -> Result<Option<bool>> {
    require_unobserved(model, id)?;
    if !(c.is_finite() && c > 0.0 && c <= 1.0) {
        return Err(Error::invalid(format!(
            "update fraction must lie in (0, 1], got {c}"
        )));
    }
    let spec = model.intensity_for(st, id)?;
    let path = st.path(id).expect("model process has a path");
    let coords = path_to_coords(path, &spec)?;
    let mut u = coords.waits;
    // The censored coordinate: the path survived `censored_mass` units of
    // integrated intensity past its last event, so its (n+1)-th waiting
    // time is that mass plus a fresh Exp(1) overshoot (memorylessness).
    u.push(coords.censored_mass + rng.exp1());
    let mut any = false;
    for slot in u.iter_mut() {
        if rng.uniform_open(0.0, 1.0) < c {
            *slot = rng.exp1();
            any = true;
        }
    }
    if !any {
        return Ok(None);
    }
    let cand = match coords_to_path(&u, &spec, || Some(rng.exp1())) {
        Ok(path) => path,
        Err(Error::NotIncreasing { .. }) => return Ok(Some(false)),
        Err(e) => return Err(e),
    };
    accept_on_complement(model, st, id, cand, rng).map(Some)
}

/// Metropolis–Hastings acceptance for a birth-process proposal: the
/// process's own factor cancels against the proposal density, leaving the
/// complementary factors' difference. Collisions with other processes'
/// event times are rejected to keep all times distinct.
fn accept_on_complement(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    cand: EventPath,
    rng: &mut RngStream,
) -> Result<bool> {
    if collides_path(st, id, &cand) {
        return Ok(false);
    }
    let cur = st.path(id).expect("model process has a path");
    let comp_cur = model.complementary_with(st, id, cur)?;
    let comp_cand = model.complementary_with(st, id, &cand)?;
    if rng.accept_log(comp_cand - comp_cur) {
        st.set_path(id, cand);
        Ok(true)
    } else {
        Ok(false)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Runs the birth-process sampler for `ncfg.iters` iterations.
///
/// Each iteration: gamma full-conditional draws for every prior-equipped
/// rate, a single-site sweep over latent times with known counts, one
/// partial birth-process refresh per target process, and a start-time
/// draw when configured. The trace records parameters, latent counts,
/// log-likelihood, per-process site acceptance fractions, and per-target
/// `path_accept_*` flags with the update fraction used (`path_frac_*`).
pub fn run_new_chain(
    cfg: &ModelConfig,
    data: &Observation,
    ncfg: &NewSamplerConfig,
    rng: &mut RngStream,
) -> Result<ChainTrace> {
    ncfg.validate()?;
    let model = Model::new(cfg, data)?;
    let targets: Vec<ProcessId> = match &ncfg.targets {
        Some(list) => {
            for &p in list {
                require_unobserved(&model, p)?;
            }
            list.clone()
        }
        None => model
            .processes()
            .iter()
            .copied()
            .filter(|&p| model.obs_for(p).map(|o| o.is_unobserved()).unwrap_or(false))
            .collect(),
    };
    let site_procs: Vec<ProcessId> = model
        .processes()
        .iter()
        .copied()
        .filter(|&p| model.obs_for(p).map(|o| o.has_known_count()).unwrap_or(false))
        .collect();
    let mut cols = state_columns(&model);
    for p in &site_procs {
        cols.push(format!("site_accept_{p}"));
    }
    for p in &targets {
        cols.push(format!("path_accept_{p}"));
        cols.push(format!("path_frac_{p}"));
    }
    let mut trace = ChainTrace::with_columns(cols);
    let mut st = init_state(&model, rng)?;
    let mut cur_ll = model.loglik(&st)?;
    // Stochastic-approximation state for the optional acceptance tuner:
    // the fraction moves on the log-odds scale with step 2/(1+k)^0.6.
    // Empty selections carry no information about the step size, so only
    // real proposals feed the tuner.
    let mut frac = ncfg.update_fraction;
    let mut frac_logit = logit(frac.clamp(1e-6, 1.0 - 1e-6));
    let mut tune_steps = 0u64;
    for it in 0..ncfg.iters {
        if model.has_free_params() {
            let (params, ll) = model.draw_params(&st, rng)?;
            st.params = params;
            cur_ll = ll;
        }
        let mut site_fracs: Vec<f64> = Vec::with_capacity(site_procs.len());
        if !site_procs.is_empty() {
            cur_ll = site_sweep(&model, &mut st, cur_ll, rng, |_, accepted, attempted| {
                site_fracs.push(if attempted == 0 {
                    0.0
                } else {
                    accepted as f64 / attempted as f64
                });
            })?;
        }
        let mut path_records: Vec<(f64, f64)> = Vec::with_capacity(targets.len());
        let mut any_path_change = false;
        for &p in &targets {
            let used_frac = frac;
            let outcome = propose_partial_path(&model, &mut st, p, used_frac, rng)?;
            let acc = outcome == Some(true);
            any_path_change |= acc;
            path_records.push((if acc { 1.0 } else { 0.0 }, used_frac));
            if let (Some(target), Some(proposed)) = (ncfg.tune_target, outcome) {
                if it < ncfg.burn_in {
                    tune_steps += 1;
                    let step = 2.0 / (1.0 + tune_steps as f64).powf(0.6);
                    frac_logit += step * (if proposed { 1.0 } else { 0.0 } - target);
                    frac_logit = frac_logit.clamp(-12.0, 12.0);
                    frac = sigmoid(frac_logit);
                }
            }
        }
        if model.config().theta0.is_some() {
            model.update_t0(&mut st, rng)?;
            cur_ll = model.loglik(&st)?;
        } else if any_path_change {
            cur_ll = model.loglik(&st)?;
        }
        let mut row = state_values(&model, &st, cur_ll)?;
        row.extend_from_slice(&site_fracs);
        for (acc, used) in &path_records {
            row.push(*acc);
            row.push(*used);
        }
        trace.push_row(&row)?;
    }
    Ok(trace)
}
