//! Birth-process intensities driven by companion paths.
//!
//! Conditioned on the other transition processes, each counting process in an
//! SIR/SEIR model is a pure birth process whose intensity depends on its own
//! count `k` and, through the companion paths, piecewise-constantly on time.
//! [`IntensitySpec`] captures exactly that family: on each time segment the
//! rate is a clamped function of `k`, so cumulative hazards and their
//! inverses have closed forms segment by segment — the backbone of both the
//! conditional path densities and the exponential-coordinate samplers.
//!
//! Time convention: segments are right-continuous, `[start, next_start)`.
//! A jump of the *own* process never coincides with a companion jump (ties
//! are rejected upstream), so evaluating the rate "just before" an own jump
//! at `t` is the same as evaluating it at `t`.

use crate::error::{Error, Result};
use crate::path::{EventPath, InitialState};

/// Rate as a function of the process's own count `k`, clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RateForm {
    /// `[base + slope * k]⁺` — linear birth/death style rates.
    Affine { base: f64, slope: f64 },
    /// `[scale * (cap - k) * (shift + k)]⁺` — mass-action infection rates.
    Product { scale: f64, cap: f64, shift: f64 },
}

impl RateForm {
    fn value(&self, k: f64) -> f64 {
        let raw = match *self {
            RateForm::Affine { base, slope } => base + slope * k,
            RateForm::Product { scale, cap, shift } => scale * (cap - k) * (shift + k),
        };
        raw.max(0.0)
    }
}

/// A clamped, piecewise-constant-in-time birth intensity `λ_k(t)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySpec {
    horizon: f64,
    /// Segment start times; `starts[0] == 0`, strictly increasing, `< horizon`.
    starts: Vec<f64>,
    /// Rate form on each segment; same length as `starts`.
    rates: Vec<RateForm>,
}

impl IntensitySpec {
    fn from_parts(horizon: f64, starts: Vec<f64>, rates: Vec<RateForm>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::BadHorizon { horizon });
        }
        if starts.is_empty() || starts[0] != 0.0 || starts.len() != rates.len() {
            return Err(Error::invalid("intensity segments must start at 0 and match rates"));
        }
        for w in starts.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(format!(
                    "segment starts must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if *starts.last().unwrap() >= horizon {
            return Err(Error::invalid("last segment must start before the horizon"));
        }
        Ok(Self { horizon, starts, rates })
    }

    /// Constant rate for every count: a homogeneous Poisson intensity.
    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        Self::from_parts(horizon, vec![0.0], vec![RateForm::Affine { base: rate, slope: 0.0 }])
    }

    /// SIR infection intensity given the removal path:
    /// `λ_k(t) = [β (S0 - k)(I0 + k - y(t)) / N]⁺`.
    pub fn sir_infection(y: &EventPath, init: InitialState, beta: f64) -> Result<Self> {
        let scale = beta / init.population() as f64;
        let cap = init.s0() as f64;
        let i0 = init.i0() as f64;
        Self::companion_segments(y, |count| RateForm::Product {
            scale,
            cap,
            shift: i0 - count,
        })
    }

    /// SIR recovery intensity given the infection path:
    /// `λ_k(t) = [γ (I0 + x(t) - k)]⁺`.
    pub fn sir_recovery(x: &EventPath, init: InitialState, gamma: f64) -> Result<Self> {
        let i0 = init.i0() as f64;
        Self::companion_segments(x, |count| RateForm::Affine {
            base: gamma * (i0 + count),
            slope: -gamma,
        })
    }

    /// SEIR infection intensity given progression and removal paths:
    /// `λ_k(t) = [β(t) (S0 - k) I(t) / N]⁺` with `I(t) = I0 + y(t) - z(t)`.
    ///
    /// `beta_of_t` supplies the (possibly change-point) transmission rate.
    pub fn seir_infection(
        y: &EventPath,
        z: &EventPath,
        init: InitialState,
        beta_of_t: impl Fn(f64) -> f64,
        change_point: Option<f64>,
    ) -> Result<Self> {
        let horizon = y.horizon();
        if z.horizon() != horizon {
            return Err(Error::HorizonMismatch { first: horizon, second: z.horizon() });
        }
        // Boundaries: companion jumps plus the transmission-rate change point.
        let mut bounds: Vec<f64> = Vec::with_capacity(y.len() + z.len() + 2);
        bounds.push(0.0);
        bounds.extend_from_slice(y.times());
        bounds.extend_from_slice(z.times());
        if let Some(cp) = change_point {
            if cp > 0.0 && cp < horizon {
                bounds.push(cp);
            }
        }
        bounds.sort_by(f64::total_cmp);
        bounds.dedup();
        bounds.retain(|&t| t < horizon);
        let n = init.population() as f64;
        let s0 = init.s0() as f64;
        let i0 = init.i0() as f64;
        let mut rates = Vec::with_capacity(bounds.len());
        for &start in &bounds {
            let infectious = i0 + y.count_at(start)? as f64 - z.count_at(start)? as f64;
            let scale = beta_of_t(start) * infectious / n;
            rates.push(RateForm::Affine { base: scale * s0, slope: -scale });
        }
        Self::from_parts(horizon, bounds, rates)
    }

    /// SEIR progression (E -> I) intensity given the infection path:
    /// `λ_k(t) = [α (E0 + x(t) - k)]⁺`.
    pub fn seir_progression(x: &EventPath, init: InitialState, alpha: f64) -> Result<Self> {
        let e0 = init.e0() as f64;
        Self::companion_segments(x, |count| RateForm::Affine {
            base: alpha * (e0 + count),
            slope: -alpha,
        })
    }

    /// SEIR removal (I -> R) intensity given the progression path:
    /// `λ_k(t) = [γ (I0 + y(t) - k)]⁺`.
    pub fn seir_removal(y: &EventPath, init: InitialState, gamma: f64) -> Result<Self> {
        let i0 = init.i0() as f64;
        Self::companion_segments(y, |count| RateForm::Affine {
            base: gamma * (i0 + count),
            slope: -gamma,
        })
    }

    /// Count-independent intensity modulated by a companion path:
    /// `λ_k(t) = [base + factor * path(t)]⁺` for every `k`.
    pub fn modulated(base: f64, factor: f64, path: &EventPath) -> Result<Self> {
        Self::companion_segments(path, |count| RateForm::Affine {
            base: base + factor * count,
            slope: 0.0,
        })
    }

    /// Builds segments at a single companion path's jumps.
    fn companion_segments(
        companion: &EventPath,
        rate_at: impl Fn(f64) -> RateForm,
    ) -> Result<Self> {
        let horizon = companion.horizon();
        let mut starts = Vec::with_capacity(companion.len() + 1);
        let mut rates = Vec::with_capacity(companion.len() + 1);
        starts.push(0.0);
        rates.push(rate_at(0.0));
        for (j, &t) in companion.times().iter().enumerate() {
            if t < horizon {
                starts.push(t);
                rates.push(rate_at((j + 1) as f64));
            }
        }
        Self::from_parts(horizon, starts, rates)
    }

    /// The observation horizon `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Segment start times (first is always 0).
    pub fn boundaries(&self) -> &[f64] {
        &self.starts
    }

    /// Index of the segment containing `t` (right-continuous; `t = T` maps to
    /// the last segment).
    fn segment_index(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    /// The intensity `λ_k(t)`.
    pub fn lambda_at(&self, k: usize, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 || t > self.horizon {
            return Err(Error::QueryOutOfRange { time: t, horizon: self.horizon });
        }
        Ok(self.rates[self.segment_index(t)].value(k as f64))
    }

    /// Cumulative hazard `Λ_k(from, to) = ∫_from^to λ_k(s) ds`.
    ///
    /// Exact: the integrand is constant on each segment, so this is a finite
    /// sum of rate-times-length products.
    pub fn integral(&self, k: usize, from: f64, to: f64) -> Result<f64> {
        if !(from.is_finite() && to.is_finite() && 0.0 <= from && from <= to && to <= self.horizon)
        {
            return Err(Error::invalid(format!(
                "hazard window [{from}, {to}] outside [0, {}]",
                self.horizon
            )));
        }
        let kf = k as f64;
        let mut idx = self.segment_index(from);
        let mut lo = from;
        let mut acc = 0.0;
        while lo < to {
            let seg_end = self.starts.get(idx + 1).copied().unwrap_or(self.horizon);
            let hi = seg_end.min(to);
            acc += self.rates[idx].value(kf) * (hi - lo);
            lo = hi;
            idx += 1;
        }
        Ok(acc)
    }

    /// Inverse cumulative hazard: the smallest waiting time `w` with
    /// `Λ_k(from, from + w) = u`, or `+∞` when the total remaining mass on
    /// `[from, T]` falls short of `u` (no birth before the horizon).
    ///
    /// Zero-rate stretches carry no mass and are skipped; the returned `w`
    /// never overshoots the segment that absorbs the remaining mass.
    pub fn inverse(&self, k: usize, from: f64, u: f64) -> Result<f64> {
        if !(from.is_finite() && 0.0 <= from && from <= self.horizon) {
            return Err(Error::QueryOutOfRange { time: from, horizon: self.horizon });
        }
        if !(u.is_finite() && u >= 0.0) {
            return Err(Error::invalid(format!("hazard mass must be finite and >= 0, got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let kf = k as f64;
        let mut idx = self.segment_index(from);
        let mut lo = from;
        let mut acc = 0.0;
        while lo < self.horizon {
            let seg_end = self.starts.get(idx + 1).copied().unwrap_or(self.horizon);
            let rate = self.rates[idx].value(kf);
            let mass = rate * (seg_end - lo);
            if rate > 0.0 && acc + mass >= u {
                let within = ((u - acc) / rate).min(seg_end - lo);
                return Ok((lo - from) + within);
            }
            acc += mass;
            lo = seg_end;
            idx += 1;
        }
        Ok(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    /// Spec with rate 1 on [0,1) and 3 on [1,horizon), independent of k.
    fn two_step(horizon: f64) -> IntensitySpec {
        IntensitySpec::from_parts(
            horizon,
            vec![0.0, 1.0],
            vec![
                RateForm::Affine { base: 1.0, slope: 0.0 },
                RateForm::Affine { base: 3.0, slope: 0.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn inverse_crosses_segment_boundary() {
        // Mass 1 accrues on [0,1); the remaining 1 unit at rate 3 takes 1/3.
        let spec = two_step(10.0);
        let w = spec.inverse(0, 0.0, 2.0).unwrap();
        assert!((w - (1.0 + 1.0 / 3.0)).abs() < 1e-15, "got {w}");
    }

    #[test]
    fn inverse_returns_infinity_when_mass_runs_out() {
        let spec = two_step(2.0);
        // Total mass on [0,2] is 1 + 3 = 4.
        assert_eq!(spec.inverse(0, 0.0, 4.5).unwrap(), f64::INFINITY);
        assert!(spec.inverse(0, 0.0, 3.9).unwrap().is_finite());
    }

    #[test]
    fn inverse_skips_zero_rate_plateau() {
        // Rate 2 on [0,1), zero on [1,3), then 4: mass resumes at t = 3.
        let spec = IntensitySpec::from_parts(
            5.0,
            vec![0.0, 1.0, 3.0],
            vec![
                RateForm::Affine { base: 2.0, slope: 0.0 },
                RateForm::Affine { base: 0.0, slope: 0.0 },
                RateForm::Affine { base: 4.0, slope: 0.0 },
            ],
        )
        .unwrap();
        let w = spec.inverse(0, 0.0, 3.0).unwrap();
        // 2 units by t=1, nothing until 3, last unit at rate 4 takes 1/4.
        assert!((w - 3.25).abs() < 1e-15, "got {w}");
        // If the remaining intensity is identically zero, no birth ever comes.
        let dead = IntensitySpec::from_parts(
            5.0,
            vec![0.0, 1.0],
            vec![
                RateForm::Affine { base: 2.0, slope: 0.0 },
                RateForm::Affine { base: 0.0, slope: 0.0 },
            ],
        )
        .unwrap();
        assert_eq!(dead.inverse(0, 0.5, 1.1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn integral_and_inverse_are_mutually_inverse() {
        let mut rng = RngStream::new(21, 0);
        for _ in 0..200 {
            // Random step intensity with a mix of zero and positive rates.
            let horizon = 8.0;
            let nseg = 1 + rng.index(6);
            let mut starts: Vec<f64> =
                (0..nseg - 1).map(|_| rng.uniform_open(0.0, horizon)).collect();
            starts.push(0.0);
            starts.sort_by(f64::total_cmp);
            starts.dedup();
            let rates: Vec<RateForm> = starts
                .iter()
                .map(|_| {
                    let base = if rng.index(4) == 0 { 0.0 } else { rng.uniform_open(0.1, 5.0) };
                    RateForm::Affine { base, slope: 0.0 }
                })
                .collect();
            let spec = IntensitySpec::from_parts(horizon, starts, rates).unwrap();
            let from = rng.uniform_open(0.0, horizon / 2.0);
            let u = rng.exp1();
            let w = spec.inverse(0, from, u).unwrap();
            if w.is_finite() {
                let back = spec.integral(0, from, from + w).unwrap();
                assert!((back - u).abs() < 1e-10, "Λ(Λ⁻¹(u)) = {back} but u = {u}");
            } else {
                let total = spec.integral(0, from, horizon).unwrap();
                assert!(total < u, "infinite waiting time but mass {total} >= u = {u}");
            }
        }
    }

    #[test]
    fn sir_infection_rate_matches_hand_computation() {
        // S0 = 8, I0 = 2, N = 10, beta = 0.5; one removal at t = 3.
        let init = InitialState::sir(10, 2, 0).unwrap();
        let y = EventPath::new(vec![3.0], 10.0).unwrap();
        let spec = IntensitySpec::sir_infection(&y, init, 0.5).unwrap();
        // Before the removal, k = 1 infection so far: 0.5 * 7 * 3 / 10.
        let expected = 0.5 * (8.0 - 1.0) * (2.0 + 1.0 - 0.0) / 10.0;
        assert!((spec.lambda_at(1, 2.0).unwrap() - expected).abs() < 1e-15);
        // After the removal the infectious pool shrinks by one.
        let expected = 0.5 * (8.0 - 1.0) * (2.0 + 1.0 - 1.0) / 10.0;
        assert!((spec.lambda_at(1, 3.0).unwrap() - expected).abs() < 1e-15);
        // Susceptibles exhausted: k = S0 kills the rate.
        assert_eq!(spec.lambda_at(8, 2.0).unwrap(), 0.0);
        // Beyond exhaustion the clamp keeps the rate at zero's side of sanity.
        assert!(spec.lambda_at(9, 4.0).unwrap() >= 0.0);
    }

    #[test]
    fn sir_recovery_rate_tracks_infection_path() {
        // I0 = 2; infections at 1 and 2 raise the recoverable pool.
        let init = InitialState::sir(10, 2, 0).unwrap();
        let x = EventPath::new(vec![1.0, 2.0], 10.0).unwrap();
        let spec = IntensitySpec::sir_recovery(&x, init, 0.25).unwrap();
        assert!((spec.lambda_at(0, 0.5).unwrap() - 0.25 * 2.0).abs() < 1e-15);
        assert!((spec.lambda_at(0, 1.5).unwrap() - 0.25 * 3.0).abs() < 1e-15);
        assert!((spec.lambda_at(1, 2.5).unwrap() - 0.25 * 3.0).abs() < 1e-15);
        // Clamp: more recoveries than ever infected gives zero, not negative.
        assert_eq!(spec.lambda_at(5, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn change_point_switches_transmission_rate() {
        let init = InitialState::seir(100, 5, 3, 0).unwrap();
        let y = EventPath::new(vec![2.0], 10.0).unwrap();
        let z = EventPath::empty(10.0).unwrap();
        let beta = |t: f64| if t < 4.0 { 0.8 } else { 0.2 };
        let spec = IntensitySpec::seir_infection(&y, &z, init, beta, Some(4.0)).unwrap();
        // I(t) = 3 before the progression at t = 2, then 4.
        let s0 = 92.0;
        let expect = |b: f64, i: f64, k: f64| b * (s0 - k) * i / 100.0;
        assert!((spec.lambda_at(0, 1.0).unwrap() - expect(0.8, 3.0, 0.0)).abs() < 1e-12);
        assert!((spec.lambda_at(2, 3.0).unwrap() - expect(0.8, 4.0, 2.0)).abs() < 1e-12);
        assert!((spec.lambda_at(2, 4.0).unwrap() - expect(0.2, 4.0, 2.0)).abs() < 1e-12,
            "at the change point the new rate applies (right-continuous)");
        assert!((spec.lambda_at(2, 7.0).unwrap() - expect(0.2, 4.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn integral_is_additive_and_matches_rate_times_length_on_constant_spec() {
        let spec = IntensitySpec::constant(0.4, 5.0).unwrap();
        assert!((spec.integral(3, 0.0, 5.0).unwrap() - 2.0).abs() < 1e-15);
        let a = spec.integral(0, 0.0, 2.3).unwrap();
        let b = spec.integral(0, 2.3, 5.0).unwrap();
        assert!((a + b - 2.0).abs() < 1e-15);
    }

    #[test]
    fn queries_outside_domain_error() {
        let spec = IntensitySpec::constant(1.0, 5.0).unwrap();
        assert!(spec.lambda_at(0, -0.1).is_err());
        assert!(spec.lambda_at(0, 5.1).is_err());
        assert!(spec.integral(0, 3.0, 2.0).is_err());
        assert!(spec.integral(0, 0.0, 6.0).is_err());
        assert!(spec.inverse(0, 6.0, 1.0).is_err());
        assert!(spec.inverse(0, 0.0, f64::NAN).is_err());
    }
}
