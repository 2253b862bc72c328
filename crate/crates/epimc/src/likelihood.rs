//! Exact log-likelihoods for event-time epidemic data.
//!
//! Two independent routes compute the same joint density:
//!
//! * the *direct* route walks the merged trajectory once, accumulating the
//!   survival integrals and per-jump rate terms of the counting-process
//!   likelihood;
//! * the *factor* route treats each process as a conditional birth process
//!   ([`birth_loglik`] with an [`IntensitySpec`]) and sums the factors.
//!
//! The two agree to floating-point accuracy on every feasible configuration;
//! the test suite leans on that redundancy. All values are log-densities,
//! with `f64::NEG_INFINITY` the ordinary value for zero-density states
//! (a jump at zero rate, a negative compartment): samplers reject such
//! proposals without any error machinery.

use crate::error::{Error, Result};
use crate::intensity::IntensitySpec;
use crate::path::{CompartmentView, EventPath, InitialState, Transition};

/// SIR rate parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirParams {
    /// Per-contact transmission rate β (events occur at rate β·S·I/N).
    pub beta: f64,
    /// Removal rate γ (events occur at rate γ·I).
    pub gamma: f64,
}

impl SirParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { beta, gamma })
    }
}

/// SEIR rate parameters, with an optional transmission change point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeirParams {
    /// Transmission rate β₁ (before the change point, if any).
    pub beta1: f64,
    /// Transmission rate β₂ from the change point on, paired with its time.
    pub beta_change: Option<(f64, f64)>,
    /// Progression rate α (E -> I events occur at rate α·E).
    pub alpha: f64,
    /// Removal rate γ (I -> R events occur at rate γ·I).
    pub gamma: f64,
}

impl SeirParams {
    pub fn new(beta1: f64, beta_change: Option<(f64, f64)>, alpha: f64, gamma: f64) -> Result<Self> {
        let mut named = vec![("beta1", beta1), ("alpha", alpha), ("gamma", gamma)];
        if let Some((beta2, cp)) = beta_change {
            named.push(("beta2", beta2));
            if !(cp.is_finite() && cp > 0.0) {
                return Err(Error::invalid(format!("change point must be positive, got {cp}")));
            }
        }
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { beta1, beta_change, alpha, gamma })
    }

    /// The transmission rate in force at time `t` (right-continuous at the
    /// change point).
    pub fn beta_at(&self, t: f64) -> f64 {
        match self.beta_change {
            Some((beta2, cp)) if t >= cp => beta2,
            _ => self.beta1,
        }
    }

    /// The change-point time, if one is configured.
    pub fn change_point(&self) -> Option<f64> {
        self.beta_change.map(|(_, cp)| cp)
    }
}

/// Parameter-free sufficient statistics of an SIR configuration.
///
/// `sir_loglik` is affine in `(β, γ)` given these, so samplers compute them
/// once per state and reassemble the likelihood for any parameter values —
/// the same quantities drive the gamma full conditionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirStats {
    /// Number of infection events.
    pub n_x: usize,
    /// Number of removal events.
    pub n_y: usize,
    /// `∫ S(t) I(t) / N dt` — transmission exposure.
    pub int_si_over_n: f64,
    /// `∫ I(t) dt` — removal exposure.
    pub int_i: f64,
    /// `Σ log(S(t⁻) I(t⁻) / N)` over infection jumps; `-inf` if any jump
    /// happened at zero rate.
    pub log_si_jumps: f64,
    /// `Σ log I(t⁻)` over removal jumps; `-inf` if any jump at zero rate.
    pub log_i_jumps: f64,
    /// False when a compartment count went negative somewhere.
    pub feasible: bool,
}

impl SirStats {
    /// Assembles the joint log-likelihood for the given rates.
    pub fn loglik(&self, p: &SirParams) -> f64 {
        if !self.feasible {
            return f64::NEG_INFINITY;
        }
        rate_power(self.n_x, p.beta) + self.log_si_jumps - p.beta * self.int_si_over_n
            + rate_power(self.n_y, p.gamma) + self.log_i_jumps - p.gamma * self.int_i
    }
}

/// `n·log(rate)` with the `n = 0` convention `0·log 0 = 0`.
fn rate_power(n: usize, rate: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * rate.ln()
    }
}

/// Walks an SIR configuration once, collecting [`SirStats`].
///
/// Errors only on malformed inputs (tied times, mismatched horizons);
/// infeasible states come back with `feasible = false`.
pub fn sir_stats(x: &EventPath, y: &EventPath, init: InitialState) -> Result<SirStats> {
    let view = CompartmentView::sir(init, x, y)?;
    let n = init.population() as f64;
    let mut stats = SirStats {
        n_x: x.len(),
        n_y: y.len(),
        int_si_over_n: 0.0,
        int_i: 0.0,
        log_si_jumps: 0.0,
        log_i_jumps: 0.0,
        feasible: true,
    };
    let walked = view.walk(
        0.0,
        view.horizon(),
        |t0, t1, c| {
            let dt = t1 - t0;
            stats.int_si_over_n += (c.s * c.i) as f64 / n * dt;
            stats.int_i += c.i as f64 * dt;
        },
        |_, label, before| match label {
            Transition::X => stats.log_si_jumps += ((before.s * before.i) as f64 / n).ln(),
            Transition::Y => stats.log_i_jumps += (before.i as f64).ln(),
            Transition::Z => unreachable!("SIR views have no Z process"),
        },
    );
    match walked {
        Ok(()) => Ok(stats),
        Err(Error::Infeasible { .. }) => {
            stats.feasible = false;
            Ok(stats)
        }
        Err(e) => Err(e),
    }
}

/// Joint log-density of a complete SIR configuration `(x, y)` under rates
/// `(β, γ)`: survival integrals plus per-jump rate terms, exactly.
///
/// Returns `-inf` (never an error) for configurations with zero density.
pub fn sir_loglik(
    x: &EventPath,
    y: &EventPath,
    init: InitialState,
    p: &SirParams,
) -> Result<f64> {
    Ok(sir_stats(x, y, init)?.loglik(p))
}

/// Parameter-free sufficient statistics of an SEIR configuration.
///
/// Transmission quantities are split at the change point (the `pre` parts
/// cover everything when no change point is configured).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeirStats {
    /// Infection events before / from the change point.
    pub n_x_pre: usize,
    pub n_x_post: usize,
    /// Progression and removal event counts.
    pub n_y: usize,
    pub n_z: usize,
    /// `∫ S I / N dt` split at the change point.
    pub int_si_over_n_pre: f64,
    pub int_si_over_n_post: f64,
    /// `∫ E dt` and `∫ I dt`.
    pub int_e: f64,
    pub int_i: f64,
    /// `Σ log(S(t⁻) I(t⁻) / N)` over infection jumps, split at the change point.
    pub log_si_jumps_pre: f64,
    pub log_si_jumps_post: f64,
    /// `Σ log E(t⁻)` over progression jumps and `Σ log I(t⁻)` over removals.
    pub log_e_jumps: f64,
    pub log_i_jumps: f64,
    pub feasible: bool,
}

impl SeirStats {
    /// Assembles the joint log-likelihood for the given rates.
    pub fn loglik(&self, p: &SeirParams) -> f64 {
        if !self.feasible {
            return f64::NEG_INFINITY;
        }
        let beta2 = p.beta_change.map_or(p.beta1, |(b2, _)| b2);
        rate_power(self.n_x_pre, p.beta1) + self.log_si_jumps_pre
            - p.beta1 * self.int_si_over_n_pre
            + rate_power(self.n_x_post, beta2) + self.log_si_jumps_post
            - beta2 * self.int_si_over_n_post
            + rate_power(self.n_y, p.alpha) + self.log_e_jumps - p.alpha * self.int_e
            + rate_power(self.n_z, p.gamma) + self.log_i_jumps - p.gamma * self.int_i
    }
}

/// Walks an SEIR configuration once, collecting [`SeirStats`].
///
/// `change_point` may be `None` for a constant transmission rate; it only
/// controls how transmission statistics are split, not their total.
pub fn seir_stats(
    x: &EventPath,
    y: &EventPath,
    z: &EventPath,
    init: InitialState,
    change_point: Option<f64>,
) -> Result<SeirStats> {
    let view = CompartmentView::seir(init, x, y, z)?;
    let horizon = view.horizon();
    let cp = change_point.unwrap_or(f64::INFINITY);
    if cp <= 0.0 {
        return Err(Error::invalid(format!("change point must be positive, got {cp}")));
    }
    let n = init.population() as f64;
    let mut stats = SeirStats {
        n_x_pre: 0,
        n_x_post: 0,
        n_y: y.len(),
        n_z: z.len(),
        int_si_over_n_pre: 0.0,
        int_si_over_n_post: 0.0,
        int_e: 0.0,
        int_i: 0.0,
        log_si_jumps_pre: 0.0,
        log_si_jumps_post: 0.0,
        log_e_jumps: 0.0,
        log_i_jumps: 0.0,
        feasible: true,
    };
    let walked = view.walk(
        0.0,
        horizon,
        |t0, t1, c| {
            let si = (c.s * c.i) as f64 / n;
            // Split the segment at the change point if it straddles it.
            let pre = (t1.min(cp) - t0).max(0.0);
            let post = (t1 - t0) - pre;
            stats.int_si_over_n_pre += si * pre;
            stats.int_si_over_n_post += si * post;
            stats.int_e += c.e as f64 * (t1 - t0);
            stats.int_i += c.i as f64 * (t1 - t0);
        },
        |t, label, before| match label {
            Transition::X => {
                let log_si = ((before.s * before.i) as f64 / n).ln();
                if t < cp {
                    stats.n_x_pre += 1;
                    stats.log_si_jumps_pre += log_si;
                } else {
                    stats.n_x_post += 1;
                    stats.log_si_jumps_post += log_si;
                }
            }
            Transition::Y => stats.log_e_jumps += (before.e as f64).ln(),
            Transition::Z => stats.log_i_jumps += (before.i as f64).ln(),
        },
    );
    match walked {
        Ok(()) => Ok(stats),
        Err(Error::Infeasible { .. }) => {
            stats.feasible = false;
            Ok(stats)
        }
        Err(e) => Err(e),
    }
}

/// Joint log-density of a complete SEIR configuration `(x, y, z)`.
///
/// Returns `-inf` (never an error) for configurations with zero density.
pub fn seir_loglik(
    x: &EventPath,
    y: &EventPath,
    z: &EventPath,
    init: InitialState,
    p: &SeirParams,
) -> Result<f64> {
    Ok(seir_stats(x, y, z, init, p.change_point())?.loglik(p))
}

/// Log-density of a counting path under a birth-process intensity:
/// `Σ_j log λ_j(t_j) - ∫₀ᵀ λ_{count(t)}(t) dt`.
///
/// The `j`-th jump (0-based) fires at own-count `j`; the survival integral
/// follows the path's own count between jumps. A jump where the clamped
/// intensity vanishes yields `-inf`.
pub fn birth_loglik(events: &EventPath, spec: &IntensitySpec) -> Result<f64> {
    if events.horizon() != spec.horizon() {
        return Err(Error::HorizonMismatch { first: events.horizon(), second: spec.horizon() });
    }
    let mut loglik = 0.0;
    let mut prev = 0.0;
    for (j, &t) in events.times().iter().enumerate() {
        loglik -= spec.integral(j, prev, t)?;
        let rate = spec.lambda_at(j, t)?;
        loglik += rate.ln(); // rate == 0 gives -inf, as intended
        prev = t;
    }
    loglik -= spec.integral(events.len(), prev, events.horizon())?;
    Ok(loglik)
}

/// The SIR joint density factored into conditional birth-process densities:
/// `(f_X(x | y), f_Y(y | x))`, whose sum equals [`sir_loglik`].
pub fn sir_factors(
    x: &EventPath,
    y: &EventPath,
    init: InitialState,
    p: &SirParams,
) -> Result<(f64, f64)> {
    let fx = birth_loglik(x, &IntensitySpec::sir_infection(y, init, p.beta)?)?;
    let fy = birth_loglik(y, &IntensitySpec::sir_recovery(x, init, p.gamma)?)?;
    Ok((fx, fy))
}

/// The SEIR joint density factored into conditional birth-process densities:
/// `(f_X(x | y, z), f_Y(y | x), f_Z(z | y))`, summing to [`seir_loglik`].
///
/// Conditional structure: the infection intensity reads I(t) off `(y, z)`,
/// the progression intensity reads E(t) off `x` (z-free), and the removal
/// intensity reads I(t) off `y` (x-free).
pub fn seir_factors(
    x: &EventPath,
    y: &EventPath,
    z: &EventPath,
    init: InitialState,
    p: &SeirParams,
) -> Result<(f64, f64, f64)> {
    let spec_x =
        IntensitySpec::seir_infection(y, z, init, |t| p.beta_at(t), p.change_point())?;
    let fx = birth_loglik(x, &spec_x)?;
    let fy = birth_loglik(y, &IntensitySpec::seir_progression(x, init, p.alpha)?)?;
    let fz = birth_loglik(z, &IntensitySpec::seir_removal(y, init, p.gamma)?)?;
    Ok((fx, fy, fz))
}
