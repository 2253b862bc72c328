//! Outbreak simulation and the exponential-coordinate view of birth paths.
//!
//! [`gillespie_sir`] / [`gillespie_seir`] draw exact-event-time outbreaks by
//! the direct stochastic simulation algorithm. The remaining functions map
//! a counting path with intensity `λ_k(t)` to and from its sequence of
//! unit-exponential inter-event masses `u_j = ∫ λ_j` — the coordinates in
//! which birth-process proposals are made:
//!
//! * [`sample_birth_path`] draws a fresh path by inverting iid `Exp(1)`
//!   masses through the cumulative intensity;
//! * [`path_to_coords`] recovers those masses from an existing path;
//! * [`coords_to_path`] rebuilds a path from (possibly partially redrawn)
//!   masses, pulling fresh tail draws on demand.
//!
//! Round-tripping is exact up to floating-point error, and a path built
//! from masses `u` has log-density `Σ log λ_j(t_j) − Σ u_j − L` where `L`
//! is the censored mass past the last event.

use crate::error::{Error, Result};
use crate::intensity::IntensitySpec;
use crate::likelihood::{SeirParams, SirParams};
use crate::path::{EventPath, InitialState, ModelKind};
use crate::rng::RngStream;

/// A complete simulated SIR or SEIR outbreak over `(0, horizon]`.
#[derive(Debug, Clone)]
pub struct Outbreak {
    /// Infection events (S -> E for SEIR, S -> I for SIR).
    pub x: EventPath,
    /// SIR removals, or SEIR progressions (E -> I).
    pub y: EventPath,
    /// SEIR removals (I -> R); empty with the same horizon for SIR.
    pub z: Option<EventPath>,
}

/// Simulates an SIR outbreak exactly (direct method) up to `horizon`.
pub fn gillespie_sir(
    init: InitialState,
    p: &SirParams,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<Outbreak> {
    if init.kind() != ModelKind::Sir {
        return Err(Error::invalid("gillespie_sir needs an SIR initial state"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::BadHorizon { horizon });
    }
    let n = init.population() as f64;
    let (mut s, mut i) = (init.s0() as f64, init.i0() as f64);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut t = 0.0;
    loop {
        let rate_x = p.beta * s * i / n;
        let rate_y = p.gamma * i;
        let total = rate_x + rate_y;
        if total <= 0.0 {
            break;
        }
        t += rng.exp(total);
        if t > horizon {
            break;
        }
        if rng.open01() * total < rate_x {
            xs.push(t);
            s -= 1.0;
            i += 1.0;
        } else {
            ys.push(t);
            i -= 1.0;
        }
    }
    Ok(Outbreak {
        x: EventPath::new(xs, horizon)?,
        y: EventPath::new(ys, horizon)?,
        z: None,
    })
}

/// Simulates an SEIR outbreak exactly up to `horizon`.
///
/// A transmission change point is handled without discretization error:
/// when a candidate event would land past the change point, the clock
/// restarts there with the new rate (valid by memorylessness of the
/// exponential waiting time).
pub fn gillespie_seir(
    init: InitialState,
    p: &SeirParams,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<Outbreak> {
    if init.kind() != ModelKind::Seir {
        return Err(Error::invalid("gillespie_seir needs an SEIR initial state"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::BadHorizon { horizon });
    }
    let n = init.population() as f64;
    let (mut s, mut e, mut i) =
        (init.s0() as f64, init.e0() as f64, init.i0() as f64);
    let (mut xs, mut ys, mut zs) = (Vec::new(), Vec::new(), Vec::new());
    let mut t = 0.0;
    loop {
        let beta = p.beta_at(t);
        let rate_x = beta * s * i / n;
        let rate_y = p.alpha * e;
        let rate_z = p.gamma * i;
        let total = rate_x + rate_y + rate_z;
        if total <= 0.0 {
            break;
        }
        let candidate = t + rng.exp(total);
        if let Some(cp) = p.change_point() {
            if t < cp && candidate >= cp {
                // The transmission rate changes mid-wait: restart at the
                // change point with the post-change rate.
                t = cp;
                continue;
            }
        }
        if candidate > horizon {
            break;
        }
        t = candidate;
        let pick = rng.open01() * total;
        if pick < rate_x {
            xs.push(t);
            s -= 1.0;
            e += 1.0;
        } else if pick < rate_x + rate_y {
            ys.push(t);
            e -= 1.0;
            i += 1.0;
        } else {
            zs.push(t);
            i -= 1.0;
        }
    }
    Ok(Outbreak {
        x: EventPath::new(xs, horizon)?,
        y: EventPath::new(ys, horizon)?,
        z: Some(EventPath::new(zs, horizon)?),
    })
}

/// Cumulative intensity `∫_from^to λ_k(s) ds` at fixed own-count `k` —
/// free-function form of [`IntensitySpec::integral`].
pub fn lambda_integral(intensity: &IntensitySpec, k: usize, from: f64, to: f64) -> Result<f64> {
    intensity.integral(k, from, to)
}

/// Time offset `Δ` with `∫_from^{from+Δ} λ_k = u`, or `+∞` when the mass
/// before the horizon falls short — free-function form of
/// [`IntensitySpec::inverse`].
pub fn lambda_inverse(intensity: &IntensitySpec, k: usize, from: f64, u: f64) -> Result<f64> {
    intensity.inverse(k, from, u)
}

/// The exponential-coordinate representation of a counting path.
///
/// `waits[j]` is the cumulative-intensity mass between events `j-1` and `j`
/// (unit-exponential under the path's own law); `censored_mass` is the mass
/// between the last event and the horizon — the path only witnesses that
/// the next wait exceeds it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpCoords {
    pub waits: Vec<f64>,
    pub censored_mass: f64,
}

impl ExpCoords {
    /// Number of realized events.
    pub fn len(&self) -> usize {
        self.waits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waits.is_empty()
    }
}

/// Draws a path from the birth process defined by `spec`, returning the
/// path together with the exponential coordinates that produced it.
pub fn sample_birth_path(
    spec: &IntensitySpec,
    rng: &mut RngStream,
) -> Result<(EventPath, ExpCoords)> {
    let horizon = spec.horizon();
    let mut times = Vec::new();
    let mut waits = Vec::new();
    let mut prev = 0.0;
    loop {
        let k = times.len();
        let u = rng.exp1();
        let delta = spec.inverse(k, prev, u)?;
        if !delta.is_finite() {
            // The drawn mass exceeds what remains before the horizon: the
            // path ends here. Its exact value is irrelevant past that point
            // (memorylessness), so it is discarded rather than stored.
            let censored_mass = spec.integral(k, prev, horizon)?;
            let path = EventPath::new(times, horizon)?;
            return Ok((path, ExpCoords { waits, censored_mass }));
        }
        prev += delta;
        times.push(prev);
        waits.push(u);
    }
}

/// Recovers the exponential coordinates of `events` under `spec`.
///
/// Fails with [`Error::Inversion`] when some event sits at zero clamped
/// intensity — such a path has zero density and no coordinate preimage.
pub fn path_to_coords(events: &EventPath, spec: &IntensitySpec) -> Result<ExpCoords> {
    if events.horizon() != spec.horizon() {
        return Err(Error::HorizonMismatch {
            first: events.horizon(),
            second: spec.horizon(),
        });
    }
    let mut waits = Vec::with_capacity(events.len());
    let mut prev = 0.0;
    for (j, &t) in events.times().iter().enumerate() {
        if spec.lambda_at(j, t)? <= 0.0 {
            return Err(Error::Inversion { time: t });
        }
        waits.push(spec.integral(j, prev, t)?);
        prev = t;
    }
    let censored_mass = spec.integral(events.len(), prev, events.horizon())?;
    Ok(ExpCoords { waits, censored_mass })
}

/// Rebuilds a path from exponential coordinates under `spec`.
///
/// Coordinates are consumed in order; once `waits` is exhausted, `fresh`
/// supplies further `Exp(1)` draws — or `None` to end the path there, which
/// reproduces the input of [`path_to_coords`] exactly (up to floating-point
/// error in the inversions). The path ends naturally whenever a wait
/// exceeds the intensity mass left before the horizon.
pub fn coords_to_path(
    waits: &[f64],
    spec: &IntensitySpec,
    mut fresh: impl FnMut() -> Option<f64>,
) -> Result<EventPath> {
    let horizon = spec.horizon();
    let mut times = Vec::new();
    let mut prev = 0.0;
    loop {
        let k = times.len();
        let u = match waits.get(k) {
            Some(&u) => u,
            None => match fresh() {
                Some(u) => u,
                None => break,
            },
        };
        let delta = spec.inverse(k, prev, u)?;
        if !delta.is_finite() {
            break;
        }
        prev += delta;
        times.push(prev);
    }
    EventPath::new(times, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::birth_loglik;

    fn rng(stream: u64) -> RngStream {
        RngStream::new(0x51_13, stream)
    }

    #[test]
    fn same_seed_reproduces_the_same_outbreak() {
        let init = InitialState::sir(100, 3, 0).unwrap();
        let p = SirParams::new(1.2, 0.4).unwrap();
        let a = gillespie_sir(init, &p, 8.0, &mut rng(1)).unwrap();
        let b = gillespie_sir(init, &p, 8.0, &mut rng(1)).unwrap();
        assert_eq!(a.x.times(), b.x.times());
        assert_eq!(a.y.times(), b.y.times());
    }

    #[test]
    fn first_event_type_frequency_matches_rate_ratio() {
        // S0=8, I0=2, N=10, beta=gamma=1: infection rate 1.6 vs removal 2.0,
        // so the first event is an infection with probability 1.6/3.6.
        let init = InitialState::sir(10, 2, 0).unwrap();
        let p = SirParams::new(1.0, 1.0).unwrap();
        let mut r = rng(2);
        let reps = 40_000;
        let mut infections_first = 0u32;
        for _ in 0..reps {
            let out = gillespie_sir(init, &p, 50.0, &mut r).unwrap();
            let tx = out.x.times().first().copied().unwrap_or(f64::INFINITY);
            let ty = out.y.times().first().copied().unwrap_or(f64::INFINITY);
            assert!(tx.is_finite() || ty.is_finite(), "some event always fires");
            if tx < ty {
                infections_first += 1;
            }
        }
        let p_hat = infections_first as f64 / reps as f64;
        let p_true = 1.6 / 3.6;
        let se = (p_true * (1.0 - p_true) / reps as f64).sqrt();
        assert!(
            (p_hat - p_true).abs() < 3.5 * se,
            "p_hat {p_hat} vs {p_true} (se {se})"
        );
    }

    #[test]
    fn linear_seir_means_match_closed_form() {
        // With beta = 0 the E and I compartments form a linear chain with
        // exact means: E[E(t)] = E0 e^{-at},
        // E[I(t)] = I0 e^{-gt} + E0 a/(g-a) (e^{-at} - e^{-gt}).
        let init = InitialState::seir(1000, 40, 10, 0).unwrap();
        let (a, g, t_end) = (0.7, 0.3, 2.0);
        let p = SeirParams::new(0.0, None, a, g).unwrap();
        let mut r = rng(3);
        let reps = 4000;
        let (mut sum_e, mut sum_i, mut sum_e2, mut sum_i2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..reps {
            let out = gillespie_seir(init, &p, t_end, &mut r).unwrap();
            let n_y = out.y.len() as f64;
            let n_z = out.z.as_ref().unwrap().len() as f64;
            let e_t = 40.0 - n_y;
            let i_t = 10.0 + n_y - n_z;
            sum_e += e_t;
            sum_i += i_t;
            sum_e2 += e_t * e_t;
            sum_i2 += i_t * i_t;
        }
        let m = reps as f64;
        let (mean_e, mean_i) = (sum_e / m, sum_i / m);
        let se_e = ((sum_e2 / m - mean_e * mean_e) / m).sqrt();
        let se_i = ((sum_i2 / m - mean_i * mean_i) / m).sqrt();
        let expect_e = 40.0 * (-a * t_end).exp();
        let expect_i = 10.0 * (-g * t_end).exp()
            + 40.0 * a / (g - a) * ((-a * t_end).exp() - (-g * t_end).exp());
        assert!(
            (mean_e - expect_e).abs() < 3.5 * se_e,
            "E mean {mean_e} vs {expect_e} (se {se_e})"
        );
        assert!(
            (mean_i - expect_i).abs() < 3.5 * se_i,
            "I mean {mean_i} vs {expect_i} (se {se_i})"
        );
    }

    #[test]
    fn change_point_from_zero_transmission_starts_infections_at_the_change() {
        let init = InitialState::seir(500, 0, 5, 0).unwrap();
        let p = SeirParams::new(0.0, Some((3.0, 2.0)), 0.5, 0.1).unwrap();
        let mut r = rng(4);
        let mut saw_post = false;
        for _ in 0..200 {
            let out = gillespie_seir(init, &p, 6.0, &mut r).unwrap();
            for &t in out.x.times() {
                assert!(t >= 2.0, "no transmission before the change point, got {t}");
            }
            saw_post |= !out.x.is_empty();
        }
        assert!(saw_post, "post-change transmission at rate 3 must show up");
    }

    #[test]
    fn sampled_path_coordinates_satisfy_the_density_identity() {
        // log f(path) == sum log-rates at events - sum waits - censored mass.
        let init = InitialState::sir(30, 4, 0).unwrap();
        let companion = EventPath::new(vec![0.7, 2.1], 5.0).unwrap();
        let spec = IntensitySpec::sir_infection(&companion, init, 0.9).unwrap();
        let mut r = rng(5);
        for _ in 0..200 {
            let (path, coords) = sample_birth_path(&spec, &mut r).unwrap();
            let mut expect = -coords.censored_mass;
            for (j, (&t, &u)) in path.times().iter().zip(&coords.waits).enumerate() {
                expect += spec.lambda_at(j, t).unwrap().ln() - u;
            }
            let ll = birth_loglik(&path, &spec).unwrap();
            assert!(
                (ll - expect).abs() < 1e-9,
                "density identity violated: {ll} vs {expect}"
            );
        }
    }

    #[test]
    fn coords_round_trip_is_the_identity() {
        let init = InitialState::sir(30, 4, 0).unwrap();
        let companion = EventPath::new(vec![0.7, 2.1, 4.4], 5.0).unwrap();
        let spec = IntensitySpec::sir_recovery(&companion, init, 0.6).unwrap();
        let mut r = rng(6);
        for _ in 0..300 {
            let (path, coords) = sample_birth_path(&spec, &mut r).unwrap();
            let recovered = path_to_coords(&path, &spec).unwrap();
            assert_eq!(recovered.len(), coords.len());
            for (a, b) in recovered.waits.iter().zip(&coords.waits) {
                assert!((a - b).abs() < 1e-9, "wait mismatch {a} vs {b}");
            }
            assert!((recovered.censored_mass - coords.censored_mass).abs() < 1e-9);
            let rebuilt = coords_to_path(&recovered.waits, &spec, || None).unwrap();
            assert_eq!(rebuilt.len(), path.len());
            for (a, b) in rebuilt.times().iter().zip(path.times()) {
                assert!((a - b).abs() < 1e-9, "time mismatch {a} vs {b}");
            }
        }
    }

    #[test]
    fn pure_death_event_count_is_binomial() {
        // With x empty, the removal process is I0 independent Exp(gamma)
        // clocks: the count by T is Binomial(I0, 1 - e^{-gamma T}).
        let init = InitialState::sir(20, 5, 0).unwrap();
        let x = EventPath::empty(2.0).unwrap();
        let spec = IntensitySpec::sir_recovery(&x, init, 0.4).unwrap();
        let mut r = rng(7);
        let reps = 20_000usize;
        let mut counts = [0u32; 6];
        for _ in 0..reps {
            let (path, _) = sample_birth_path(&spec, &mut r).unwrap();
            counts[path.len()] += 1;
        }
        let q = 1.0 - (-0.4f64 * 2.0).exp();
        let mut chi2 = 0.0;
        for (k, &obs) in counts.iter().enumerate() {
            let mut p = q.powi(k as i32) * (1.0 - q).powi(5 - k as i32);
            p *= [1.0, 5.0, 10.0, 10.0, 5.0, 1.0][k];
            let expect = p * reps as f64;
            chi2 += (obs as f64 - expect).powi(2) / expect;
        }
        // 5 degrees of freedom; the 0.001 quantile is 20.5.
        assert!(chi2 < 20.5, "chi2 {chi2} against Binomial(5, {q})");
    }

    #[test]
    fn sampler_agrees_with_an_independent_segmentwise_simulator() {
        // Replays the same birth process with a test-local simulator that
        // only uses lambda_at and the segment boundaries (constant-rate
        // racing within segments), then compares event-count distributions.
        let init = InitialState::sir(12, 3, 0).unwrap();
        let companion = EventPath::new(vec![0.9, 1.7], 4.0).unwrap();
        let spec = IntensitySpec::sir_infection(&companion, init, 1.1).unwrap();
        let reps = 20_000usize;
        let mut counts_a = std::collections::HashMap::new();
        let mut r = rng(8);
        for _ in 0..reps {
            let (p, _) = sample_birth_path(&spec, &mut r).unwrap();
            *counts_a.entry(p.len()).or_insert(0u32) += 1;
        }
        let mut counts_b = std::collections::HashMap::new();
        let mut r2 = rng(9);
        let mut bounds = spec.boundaries().to_vec();
        bounds.push(spec.horizon());
        for _ in 0..reps {
            let mut k = 0usize;
            let mut t = 0.0f64;
            'run: for w in bounds.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                t = t.max(lo);
                loop {
                    // Within [lo, hi) the rate is constant in t.
                    let rate = spec.lambda_at(k, t).unwrap();
                    if rate <= 0.0 {
                        // Constant-in-t within a segment: dead until hi.
                        t = hi;
                        break;
                    }
                    let next = t + r2.exp(rate);
                    if next > hi {
                        t = hi;
                        break;
                    }
                    t = next;
                    k += 1;
                    if t >= spec.horizon() {
                        break 'run;
                    }
                }
            }
            *counts_b.entry(k).or_insert(0u32) += 1;
        }
        // Two-sample chi-square over pooled bins with expected counts >= 5.
        let max_k = *counts_a.keys().chain(counts_b.keys()).max().unwrap();
        let mut chi2 = 0.0;
        let mut dof: i32 = -1;
        let (mut tail_a, mut tail_b) = (0.0f64, 0.0f64);
        for k in 0..=max_k {
            let a = *counts_a.get(&k).unwrap_or(&0) as f64 + tail_a;
            let b = *counts_b.get(&k).unwrap_or(&0) as f64 + tail_b;
            if a + b < 20.0 {
                tail_a = a;
                tail_b = b;
                continue;
            }
            tail_a = 0.0;
            tail_b = 0.0;
            chi2 += (a - b).powi(2) / (a + b);
            dof += 1;
        }
        assert!(dof >= 3, "need several populated bins, got dof {dof}");
        // Generous 0.001-level bound for the observed dof (chi2_{0.999,12} < 33).
        assert!(chi2 < 33.0, "two-sample chi2 {chi2} with dof {dof}");
    }

    #[test]
    fn importance_weights_against_a_constant_proposal_average_to_one() {
        // E_g[f/g] = 1 when the target's support is inside the proposal's:
        // a direct check that birth_loglik is a normalized path density.
        let init = InitialState::sir(20, 2, 0).unwrap();
        let x = EventPath::empty(2.0).unwrap();
        let target = IntensitySpec::sir_recovery(&x, init, 0.5).unwrap();
        let proposal = IntensitySpec::constant(0.8, 2.0).unwrap();
        let mut r = rng(10);
        let reps = 40_000usize;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..reps {
            let (path, _) = sample_birth_path(&proposal, &mut r).unwrap();
            let lf = birth_loglik(&path, &target).unwrap();
            let lg = birth_loglik(&path, &proposal).unwrap();
            let w = if lf == f64::NEG_INFINITY { 0.0 } else { (lf - lg).exp() };
            sum += w;
            sum2 += w * w;
        }
        let m = reps as f64;
        let mean = sum / m;
        let se = ((sum2 / m - mean * mean) / m).sqrt();
        assert!(
            (mean - 1.0).abs() < 3.5 * se,
            "importance mean {mean} (se {se}) should be 1"
        );
    }

    #[test]
    fn partial_coordinate_rebuild_extends_with_fresh_tail_draws() {
        let spec = IntensitySpec::constant(2.0, 3.0).unwrap();
        // Two small waits, then fresh draws; with a constant rate the
        // rebuilt times are cumulative waits / rate.
        let waits = [0.5, 0.5];
        let mut tail = vec![0.8, 10.0].into_iter();
        let path = coords_to_path(&waits, &spec, || tail.next()).unwrap();
        assert_eq!(path.len(), 3);
        let expect = [0.25, 0.5, 0.9];
        for (a, b) in path.times().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
