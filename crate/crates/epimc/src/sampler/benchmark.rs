//! The classic single-site data-augmentation sampler.
//!
//! Latent event times move one at a time (uniform independence proposals),
//! and processes of unknown dimension change by one event per iteration
//! through an add/remove/move step with the matching dimension-balanced
//! acceptance ratios. Mixing therefore slows down linearly with the number
//! of latent events — the behaviour the birth-process sampler improves on.

use super::{
    collides, init_state, site_sweep, state_columns, state_values, AugmentedState, ChainTrace,
    Model, ModelConfig, Observation, ProcessId,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Which dimension move an add/remove/move step proposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RjMove {
    Add,
    Remove,
    Move,
}

impl RjMove {
    /// Stable numeric code used in trace columns (0 add, 1 remove, 2 move).
    pub fn code(self) -> f64 {
        match self {
            RjMove::Add => 0.0,
            RjMove::Remove => 1.0,
            RjMove::Move => 2.0,
        }
    }
}

/// One dimension-changing update of an unobserved process: add a uniform
/// new event (accepted with likelihood ratio × T/(n+1)), remove a uniform
/// existing one (ratio × n/T), or move one to a fresh uniform time (plain
/// likelihood ratio). Each variant is proposed with probability ⅓;
/// remove/move on an empty path count as proposed-and-rejected.
pub fn rj_step(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    rng: &mut RngStream,
) -> Result<(RjMove, bool)> {
    if !model.obs_for(id)?.is_unobserved() {
        return Err(Error::invalid(
            "dimension moves apply to fully unobserved processes",
        ));
    }
    let cur_ll = model.loglik(st)?;
    let (mv, acc, _) = rj_step_inner(model, st, id, cur_ll, rng)?;
    Ok((mv, acc))
}

/// Internals of [`rj_step`] with the current log-likelihood threaded
/// through; returns the move kind, acceptance, and updated log-likelihood.
pub(super) fn rj_step_inner(
    model: &Model,
    st: &mut AugmentedState,
    id: ProcessId,
    cur_ll: f64,
    rng: &mut RngStream,
) -> Result<(RjMove, bool, f64)> {
    let path = st.path(id).expect("model process has a path");
    let horizon = path.horizon();
    let n = path.len();
    let mv = match rng.index(3) {
        0 => RjMove::Add,
        1 => RjMove::Remove,
        _ => RjMove::Move,
    };
    let reject = |cur_ll| Ok((mv, false, cur_ll));
    let (cand, log_ratio) = match mv {
        RjMove::Add => {
            let t = rng.uniform_open(0.0, horizon);
            if collides(st, id, t) {
                return reject(cur_ll);
            }
            let cand = match path.with_inserted(t) {
                Ok(c) => c,
                Err(Error::NotIncreasing { .. }) => return reject(cur_ll),
                Err(e) => return Err(e),
            };
            let cand_ll = model.loglik_with(st, id, &cand)?;
            let ratio = cand_ll - cur_ll + horizon.ln() - ((n + 1) as f64).ln();
            ((cand, cand_ll), ratio)
        }
        RjMove::Remove => {
            if n == 0 {
                return reject(cur_ll);
            }
            let cand = path.with_removed(rng.index(n))?;
            let cand_ll = model.loglik_with(st, id, &cand)?;
            let ratio = cand_ll - cur_ll + (n as f64).ln() - horizon.ln();
            ((cand, cand_ll), ratio)
        }
        RjMove::Move => {
            if n == 0 {
                return reject(cur_ll);
            }
            let index = rng.index(n);
            let t = rng.uniform_open(0.0, horizon);
            if collides(st, id, t) {
                return reject(cur_ll);
            }
            let cand = match path.with_moved(index, t) {
                Ok(c) => c,
                Err(Error::NotIncreasing { .. }) => return reject(cur_ll),
                Err(e) => return Err(e),
            };
            let cand_ll = model.loglik_with(st, id, &cand)?;
            ((cand, cand_ll), cand_ll - cur_ll)
        }
    };
    if rng.accept_log(log_ratio) {
        let (path, ll) = cand;
        st.set_path(id, path);
        Ok((mv, true, ll))
    } else {
        Ok((mv, false, cur_ll))
    }
}

/// Runs the single-site sampler for `iters` iterations.
///
/// Each iteration: gamma full-conditional draws for every prior-equipped
/// rate, a single-site sweep over all latent times with known counts, one
/// add/remove/move step per unobserved process, and a start-time draw when
/// configured. The trace records parameters, latent counts, log-likelihood,
/// per-process site acceptance fractions, and the dimension move taken
/// (`rj_move_*` codes 0/1/2) with its acceptance flag.
pub fn run_benchmark_chain(
    cfg: &ModelConfig,
    data: &Observation,
    iters: usize,
    rng: &mut RngStream,
) -> Result<ChainTrace> {
    let model = Model::new(cfg, data)?;
    let mut st = init_state(&model, rng)?;
    let site_procs: Vec<ProcessId> = model
        .processes()
        .iter()
        .copied()
        .filter(|&p| model.obs_for(p).map(|o| o.has_known_count()).unwrap_or(false))
        .collect();
    let rj_procs: Vec<ProcessId> = model
        .processes()
        .iter()
        .copied()
        .filter(|&p| model.obs_for(p).map(|o| o.is_unobserved()).unwrap_or(false))
        .collect();
    let mut cols = state_columns(&model);
    for p in &site_procs {
        cols.push(format!("site_accept_{p}"));
    }
    for p in &rj_procs {
        cols.push(format!("rj_move_{p}"));
        cols.push(format!("rj_accept_{p}"));
    }
    let mut trace = ChainTrace::with_columns(cols);
    let mut cur_ll = model.loglik(&st)?;
    for _ in 0..iters {
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
        let mut rj_records: Vec<(f64, f64)> = Vec::with_capacity(rj_procs.len());
        for &p in &rj_procs {
            let (mv, acc, ll) = rj_step_inner(&model, &mut st, p, cur_ll, rng)?;
            cur_ll = ll;
            rj_records.push((mv.code(), if acc { 1.0 } else { 0.0 }));
        }
        if model.config().theta0.is_some() {
            model.update_t0(&mut st, rng)?;
            cur_ll = model.loglik(&st)?;
        }
        let mut row = state_values(&model, &st, cur_ll)?;
        row.extend_from_slice(&site_fracs);
        for (code, acc) in &rj_records {
            row.push(*code);
            row.push(*acc);
        }
        trace.push_row(&row)?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::{sir_loglik, SirParams};
    use crate::path::{EventPath, InitialState};
    use crate::sampler::{GammaPrior, ProcessObs, RateSetting};

    use crate::sampler::test_support::{chi_square, toy_count_probabilities, toy_model};

    fn rng(stream: u64) -> RngStream {
        RngStream::new(0xBE7C, stream)
    }

    #[test]
    fn toy_count_law_matches_likelihood_quadrature() {
        // Independent check of the closed form: integrate the joint
        // density over event times by Simpson quadrature for one and two
        // latent removals and compare with the binomial weights.
        let (_, obs) = toy_model();
        let init = obs.init;
        let p = SirParams::new(0.5, 0.3).unwrap();
        let horizon = 2.0;
        let x = EventPath::empty(horizon).unwrap();
        let ll0 = sir_loglik(&x, &EventPath::empty(horizon).unwrap(), init, &p).unwrap();
        // Simpson weights on a uniform grid of last+1 points (last even).
        let simpson = |j: usize, last: usize| -> f64 {
            if j == 0 || j == last {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let m = 400usize;
        let h = horizon / (2 * m) as f64;
        let density1 = |t: f64| -> f64 {
            let y = EventPath::new(vec![t], horizon).unwrap();
            (sir_loglik(&x, &y, init, &p).unwrap() - ll0).exp()
        };
        let mut int1 = 0.0;
        for j in 0..=2 * m {
            let t = (j as f64 * h).min(horizon).max(1e-12);
            int1 += simpson(j, 2 * m) * density1(t);
        }
        int1 *= h / 3.0;
        let probs = toy_count_probabilities();
        let expect1 = probs[1] / probs[0];
        assert!(
            (int1 - expect1).abs() < 1e-4 * expect1,
            "k=1 mass ratio {int1} vs closed form {expect1}"
        );
        // Two events: integrate over 0 < t1 < t2 < T on a coarser grid.
        let m2 = 150usize;
        let h2 = horizon / (2 * m2) as f64;
        let mut int2 = 0.0;
        for j2 in 0..=2 * m2 {
            let t2 = (j2 as f64 * h2).min(horizon).max(2e-9);
            // Inner integral over t1 in (0, t2).
            let mut inner = 0.0;
            for j1 in 0..=2 * m2 {
                let t1 = (j1 as f64 * h2 / horizon * t2).min(t2 - 1e-12).max(1e-12);
                let y = EventPath::new(vec![t1, t2], horizon).unwrap();
                let d = (sir_loglik(&x, &y, init, &p).unwrap() - ll0).exp();
                inner += simpson(j1, 2 * m2) * d;
            }
            inner *= (t2 / horizon) * h2 / 3.0;
            int2 += simpson(j2, 2 * m2) * inner;
        }
        int2 *= h2 / 3.0;
        let expect2 = probs[2] / probs[0];
        assert!(
            (int2 - expect2).abs() < 1e-3 * expect2,
            "k=2 mass ratio {int2} vs closed form {expect2}"
        );
    }

    #[test]
    fn add_and_remove_ratios_are_inverse() {
        // The stated acceptance ratios for add(y -> y') and remove(y' -> y)
        // must multiply to one, so the pair is dimension-balanced.
        let (cfg, obs) = toy_model();
        let model = Model::new(&cfg, &obs).unwrap();
        let mut r = rng(1);
        let mut st = init_state(&model, &mut r).unwrap();
        let horizon = 2.0f64;
        // A small definite path keeps both states comfortably feasible.
        st.set_path(ProcessId::Y, EventPath::new(vec![0.5], horizon).unwrap());
        let ll = model.loglik(&st).unwrap();
        let t_new = 1.234;
        let bigger = st.y.with_inserted(t_new).unwrap();
        let ll_big = model.loglik_with(&st, ProcessId::Y, &bigger).unwrap();
        assert!(ll.is_finite() && ll_big.is_finite());
        let n = st.y.len() as f64;
        let log_add = ll_big - ll + horizon.ln() - (n + 1.0).ln();
        let log_remove_back = ll - ll_big + (n + 1.0).ln() - horizon.ln();
        assert!(
            (log_add + log_remove_back).abs() < 1e-12,
            "add/remove log ratios must cancel, got {log_add} + {log_remove_back}"
        );
    }

    #[test]
    fn remove_on_empty_path_counts_as_rejected() {
        let (cfg, obs) = toy_model();
        let model = Model::new(&cfg, &obs).unwrap();
        let mut r = rng(2);
        let mut st = init_state(&model, &mut r).unwrap();
        st.set_path(ProcessId::Y, EventPath::empty(2.0).unwrap());
        let mut ll = model.loglik(&st).unwrap();
        let mut saw_remove = false;
        for _ in 0..200 {
            let was_empty = st.y.is_empty();
            let (mv, acc, new_ll) =
                rj_step_inner(&model, &mut st, ProcessId::Y, ll, &mut r).unwrap();
            ll = new_ll;
            if mv == RjMove::Remove && was_empty {
                assert!(!acc, "removing from an empty path must be rejected");
                saw_remove = true;
            }
        }
        assert!(saw_remove, "200 draws should propose at least one remove");
    }

    #[test]
    fn toy_posterior_count_distribution_passes_chi_square() {
        let (cfg, obs) = toy_model();
        let mut r = rng(3);
        let trace = run_benchmark_chain(&cfg, &obs, 100_000, &mut r).unwrap();
        let counts = trace.column("n_y").unwrap();
        // Thin past the burn-in so the chi-square's independence
        // assumption is reasonable for this slowly-mixing chain.
        let (burn, thin) = (5_000, 50);
        let mut observed = [0u32; 7];
        for (i, &c) in counts.iter().enumerate().skip(burn) {
            if (i - burn) % thin == 0 {
                observed[c as usize] += 1;
            }
        }
        let chi2 = chi_square(&observed, &toy_count_probabilities());
        // 6 dof, 1% quantile 16.81.
        assert!(chi2 < 16.81, "chi2 {chi2} vs Binomial oracle");
    }

    #[test]
    fn fully_observed_data_reduces_to_exact_conjugate_draws() {
        // With both paths observed the chain's beta draws are iid from
        // Gamma(n_x + a, int SI/N + b): check the sample mean.
        let horizon = 4.0;
        let init = InitialState::sir(30, 3, 0).unwrap();
        let x = EventPath::new(vec![0.5, 1.2, 2.0, 2.2], horizon).unwrap();
        let y = EventPath::new(vec![1.0, 2.5, 3.0], horizon).unwrap();
        let stats = crate::likelihood::sir_stats(&x, &y, init).unwrap();
        let prior = GammaPrior::new(2.0, 2.0).unwrap();
        let cfg = ModelConfig {
            beta: RateSetting::Prior(prior),
            gamma: RateSetting::Prior(prior),
            ..ModelConfig::sir_fixed(0.0, 0.0)
        };
        let obs = Observation {
            init,
            horizon,
            x: ProcessObs::Path(x),
            y: ProcessObs::Path(y),
            z: None,
        };
        let mut r = rng(4);
        let iters = 20_000;
        let trace = run_benchmark_chain(&cfg, &obs, iters, &mut r).unwrap();
        let betas = trace.column("beta").unwrap();
        let mean: f64 = betas.iter().sum::<f64>() / betas.len() as f64;
        let shape = stats.n_x as f64 + 2.0;
        let rate = stats.int_si_over_n + 2.0;
        let expect = shape / rate;
        let se = (shape / (rate * rate) / iters as f64).sqrt();
        assert!(
            (mean - expect).abs() < 3.5 * se,
            "posterior beta mean {mean} vs exact {expect} (se {se})"
        );
    }
}
