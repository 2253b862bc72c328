//! Event paths and compartment trajectories.
//!
//! A counting process is represented by the ordered set of its jump times on
//! a finite observation window `[0, T]`. Compartment occupancies (S, E, I, R)
//! are derived step functions of one, two, or three such paths plus the
//! initial occupancy, and every integral the likelihoods need is a finite sum
//! over the segments between consecutive jumps — no quadrature anywhere.
//!
//! Conventions, enforced at construction time:
//! * jump times are strictly increasing and lie in `(0, T]`;
//! * counting functions are right-continuous: `count_at(t)` includes a jump
//!   at exactly `t`, `left_limit_at(t)` does not;
//! * coincident jumps across paths are rejected ([`Error::Tie`]) — data with
//!   tied timestamps must be jittered at ingestion, the core stays strict.

use crate::error::{Error, Result};

/// An ordered set of event times on `(0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventPath {
    times: Vec<f64>,
    horizon: f64,
}

impl EventPath {
    /// Builds a path from event times, validating ordering and range.
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::BadHorizon { horizon });
        }
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t <= 0.0 || t > horizon {
                return Err(Error::TimeOutOfRange { time: t, horizon });
            }
            if i > 0 && times[i - 1] >= t {
                return Err(Error::NotIncreasing { index: i, prev: times[i - 1], next: t });
            }
        }
        Ok(Self { times, horizon })
    }

    /// A path with no events.
    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(Vec::new(), horizon)
    }

    /// Number of events.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when the path has no events.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The event times, strictly increasing.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// The observation horizon `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Right-continuous count `#{ i : t_i <= t }` for `t` in `[0, T]`.
    pub fn count_at(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < 0.0 || t > self.horizon {
            return Err(Error::QueryOutOfRange { time: t, horizon: self.horizon });
        }
        Ok(self.times.partition_point(|&s| s <= t))
    }

    /// Left limit `#{ i : t_i < t }` for `t` in `(0, T]`.
    pub fn left_limit_at(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t <= 0.0 || t > self.horizon {
            return Err(Error::QueryOutOfRange { time: t, horizon: self.horizon });
        }
        Ok(self.times.partition_point(|&s| s < t))
    }

    /// A copy with one extra event inserted at `t`.
    pub fn with_inserted(&self, t: f64) -> Result<Self> {
        let mut times = self.times.clone();
        let pos = times.partition_point(|&s| s < t);
        times.insert(pos, t);
        Self::new(times, self.horizon)
    }

    /// A copy with the event at `index` removed.
    pub fn with_removed(&self, index: usize) -> Result<Self> {
        if index >= self.times.len() {
            return Err(Error::invalid(format!(
                "event index {index} out of range for a path with {} events",
                self.times.len()
            )));
        }
        let mut times = self.times.clone();
        times.remove(index);
        Self::new(times, self.horizon)
    }

    /// A copy with the event at `index` moved to time `t` (re-sorted).
    pub fn with_moved(&self, index: usize, t: f64) -> Result<Self> {
        self.with_removed(index)?.with_inserted(t)
    }
}

/// Which compartmental model a state or view describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Susceptible - Infectious - Removed.
    Sir,
    /// Susceptible - Exposed - Infectious - Removed.
    Seir,
}

/// Compartment occupancy at time zero.
///
/// The population is closed: `s0 + e0 + i0 + r0 == n` always holds, with
/// `e0 = 0` for SIR states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitialState {
    kind: ModelKind,
    n: u64,
    s0: u64,
    e0: u64,
    i0: u64,
    r0: u64,
}

impl InitialState {
    /// SIR initial state; susceptibles are the remainder `n - i0 - r0`.
    pub fn sir(n: u64, i0: u64, r0: u64) -> Result<Self> {
        let s0 = n.checked_sub(i0 + r0).ok_or_else(|| {
            Error::invalid(format!("initial compartments exceed population: I0={i0} R0={r0} N={n}"))
        })?;
        Ok(Self { kind: ModelKind::Sir, n, s0, e0: 0, i0, r0 })
    }

    /// SEIR initial state; susceptibles are the remainder `n - e0 - i0 - r0`.
    pub fn seir(n: u64, e0: u64, i0: u64, r0: u64) -> Result<Self> {
        let s0 = n.checked_sub(e0 + i0 + r0).ok_or_else(|| {
            Error::invalid(format!(
                "initial compartments exceed population: E0={e0} I0={i0} R0={r0} N={n}"
            ))
        })?;
        Ok(Self { kind: ModelKind::Seir, n, s0, e0, i0, r0 })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn population(&self) -> u64 {
        self.n
    }

    pub fn s0(&self) -> u64 {
        self.s0
    }

    pub fn e0(&self) -> u64 {
        self.e0
    }

    pub fn i0(&self) -> u64 {
        self.i0
    }

    pub fn r0(&self) -> u64 {
        self.r0
    }
}

/// Compartment occupancies at one instant. Signed so that infeasible
/// configurations are representable and detectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub s: i64,
    pub e: i64,
    pub i: i64,
    pub r: i64,
}

impl Counts {
    /// The first negative compartment, if any.
    fn first_negative(&self) -> Option<(&'static str, i64)> {
        if self.s < 0 {
            Some(("susceptible", self.s))
        } else if self.e < 0 {
            Some(("exposed", self.e))
        } else if self.i < 0 {
            Some(("infectious", self.i))
        } else if self.r < 0 {
            Some(("removed", self.r))
        } else {
            None
        }
    }
}

/// Which transition an event time belongs to when paths are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// Leaving S: infection (S->I for SIR, S->E for SEIR).
    X,
    /// SIR removal I->R, or SEIR progression E->I.
    Y,
    /// SEIR removal I->R.
    Z,
}

/// Merges labelled paths into one globally ordered event sequence.
///
/// Returns `(time, label)` pairs sorted by time. Any exact time collision
/// across (or within) the inputs is an [`Error::Tie`]; distinct but close
/// times — e.g. `1.0` and `1.0 + 1e-12` — merge fine.
pub fn merge_events<L: Copy>(paths: &[(&EventPath, L)]) -> Result<Vec<(f64, L)>> {
    let mut merged: Vec<(f64, L)> = Vec::with_capacity(paths.iter().map(|(p, _)| p.len()).sum());
    for &(path, label) in paths {
        merged.extend(path.times().iter().map(|&t| (t, label)));
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in merged.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Tie { time: w[0].0 });
        }
    }
    Ok(merged)
}

/// Compartment occupancies derived from an initial state and event paths.
///
/// For SIR views `x` counts infections and `y` removals:
/// `S(t) = S0 - x(t)`, `I(t) = I0 + x(t) - y(t)`.
/// For SEIR views `y` counts E->I progressions and `z` removals:
/// `E(t) = E0 + x(t) - y(t)`, `I(t) = I0 + y(t) - z(t)`.
#[derive(Debug, Clone, Copy)]
pub struct CompartmentView<'a> {
    init: InitialState,
    x: &'a EventPath,
    y: &'a EventPath,
    z: Option<&'a EventPath>,
}

impl<'a> CompartmentView<'a> {
    /// SIR view over an infection path and a removal path.
    pub fn sir(init: InitialState, x: &'a EventPath, y: &'a EventPath) -> Result<Self> {
        if init.kind() != ModelKind::Sir {
            return Err(Error::invalid("SIR view requires an SIR initial state"));
        }
        check_horizons(&[x, y])?;
        Ok(Self { init, x, y, z: None })
    }

    /// SEIR view over infection, progression, and removal paths.
    pub fn seir(
        init: InitialState,
        x: &'a EventPath,
        y: &'a EventPath,
        z: &'a EventPath,
    ) -> Result<Self> {
        if init.kind() != ModelKind::Seir {
            return Err(Error::invalid("SEIR view requires an SEIR initial state"));
        }
        check_horizons(&[x, y, z])?;
        Ok(Self { init, x, y, z: Some(z) })
    }

    pub fn init(&self) -> InitialState {
        self.init
    }

    pub fn horizon(&self) -> f64 {
        self.x.horizon()
    }

    /// Occupancies given cumulative event counts `(x, y, z)`.
    fn counts_from(&self, nx: i64, ny: i64, nz: i64) -> Counts {
        let init = &self.init;
        match init.kind() {
            ModelKind::Sir => Counts {
                s: init.s0() as i64 - nx,
                e: 0,
                i: init.i0() as i64 + nx - ny,
                r: init.r0() as i64 + ny,
            },
            ModelKind::Seir => Counts {
                s: init.s0() as i64 - nx,
                e: init.e0() as i64 + nx - ny,
                i: init.i0() as i64 + ny - nz,
                r: init.r0() as i64 + nz,
            },
        }
    }

    /// Right-continuous occupancies at time `t` in `[0, T]`.
    pub fn counts_at(&self, t: f64) -> Result<Counts> {
        let nx = self.x.count_at(t)? as i64;
        let ny = self.y.count_at(t)? as i64;
        let nz = match self.z {
            Some(z) => z.count_at(t)? as i64,
            None => 0,
        };
        Ok(self.counts_from(nx, ny, nz))
    }

    /// Left-limit occupancies at time `t` in `(0, T]`.
    pub fn counts_before(&self, t: f64) -> Result<Counts> {
        let nx = self.x.left_limit_at(t)? as i64;
        let ny = self.y.left_limit_at(t)? as i64;
        let nz = match self.z {
            Some(z) => z.left_limit_at(t)? as i64,
            None => 0,
        };
        Ok(self.counts_from(nx, ny, nz))
    }

    /// Walks the piecewise-constant trajectory over `[a, b]`.
    ///
    /// Calls `visit(t0, t1, counts)` for every maximal interval on which the
    /// occupancies are constant, and `jump(t, label, counts_before)` for every
    /// event in `(a, b]` with the occupancies immediately before it. Errors on
    /// tied event times or a negative compartment anywhere in the window.
    pub fn walk<FS, FJ>(&self, a: f64, b: f64, mut visit: FS, mut jump: FJ) -> Result<()>
    where
        FS: FnMut(f64, f64, Counts),
        FJ: FnMut(f64, Transition, Counts),
    {
        let horizon = self.horizon();
        if !(0.0 <= a && a <= b && b <= horizon) {
            return Err(Error::invalid(format!(
                "integration window [{a}, {b}] outside [0, {horizon}]"
            )));
        }
        let (xs, ys) = (self.x.times(), self.y.times());
        let zs = self.z.map_or(&[][..], |z| z.times());
        let mut ix = xs.partition_point(|&t| t <= a);
        let mut iy = ys.partition_point(|&t| t <= a);
        let mut iz = zs.partition_point(|&t| t <= a);
        let mut counts = self.counts_from(ix as i64, iy as i64, iz as i64);
        if let Some((compartment, count)) = counts.first_negative() {
            return Err(Error::Infeasible { compartment, count, time: a });
        }
        let mut t = a;
        loop {
            // Next event of each process strictly after `t`, if within (a, b].
            let tx = xs.get(ix).copied().unwrap_or(f64::INFINITY);
            let ty = ys.get(iy).copied().unwrap_or(f64::INFINITY);
            let tz = zs.get(iz).copied().unwrap_or(f64::INFINITY);
            let tnext = tx.min(ty).min(tz);
            if tnext > b {
                if b > t {
                    visit(t, b, counts);
                }
                return Ok(());
            }
            if (tnext == tx) as u8 + (tnext == ty) as u8 + (tnext == tz) as u8 > 1 {
                return Err(Error::Tie { time: tnext });
            }
            if tnext > t {
                visit(t, tnext, counts);
            }
            let label = if tnext == tx {
                ix += 1;
                Transition::X
            } else if tnext == ty {
                iy += 1;
                Transition::Y
            } else {
                iz += 1;
                Transition::Z
            };
            jump(tnext, label, counts);
            counts = self.counts_from(ix as i64, iy as i64, iz as i64);
            if let Some((compartment, count)) = counts.first_negative() {
                return Err(Error::Infeasible { compartment, count, time: tnext });
            }
            t = tnext;
        }
    }
}

fn check_horizons(paths: &[&EventPath]) -> Result<()> {
    for pair in paths.windows(2) {
        if pair[0].horizon() != pair[1].horizon() {
            return Err(Error::HorizonMismatch {
                first: pair[0].horizon(),
                second: pair[1].horizon(),
            });
        }
    }
    Ok(())
}

/// Exact integral `∫₀ᵀ f(counts(t)) dt` over the view's full window.
///
/// The trajectory is piecewise constant, so the integral is the finite sum of
/// `f` times segment lengths. Errors if any compartment goes negative.
pub fn integrate_product<F: Fn(Counts) -> f64>(view: &CompartmentView, f: F) -> Result<f64> {
    integrate_range(view, 0.0, view.horizon(), f)
}

/// Exact integral `∫ₐᵇ f(counts(t)) dt` over a sub-window.
pub fn integrate_range<F: Fn(Counts) -> f64>(
    view: &CompartmentView,
    a: f64,
    b: f64,
    f: F,
) -> Result<f64> {
    let mut total = 0.0;
    view.walk(a, b, |t0, t1, c| total += f(c) * (t1 - t0), |_, _, _| ())?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn sir_view<'a>(
        init: InitialState,
        x: &'a EventPath,
        y: &'a EventPath,
    ) -> CompartmentView<'a> {
        CompartmentView::sir(init, x, y).expect("valid view")
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(EventPath::new(vec![1.0, 1.0], 5.0).is_err(), "duplicate times");
        assert!(EventPath::new(vec![2.0, 1.0], 5.0).is_err(), "unordered times");
        assert!(EventPath::new(vec![0.0], 5.0).is_err(), "time at zero");
        assert!(EventPath::new(vec![5.1], 5.0).is_err(), "time past horizon");
        assert!(EventPath::new(vec![f64::NAN], 5.0).is_err(), "NaN time");
        assert!(EventPath::new(vec![1.0], f64::INFINITY).is_err(), "infinite horizon");
        assert!(EventPath::new(vec![1.0], 0.0).is_err(), "zero horizon");
        assert!(EventPath::new(vec![1.0, 5.0], 5.0).is_ok(), "event at horizon is legal");
    }

    #[test]
    fn counts_are_right_continuous_with_left_limits() {
        let p = EventPath::new(vec![1.0, 2.5, 4.0], 5.0).unwrap();
        assert_eq!(p.count_at(0.0).unwrap(), 0);
        assert_eq!(p.count_at(1.0).unwrap(), 1, "count includes a jump at exactly t");
        assert_eq!(p.left_limit_at(1.0).unwrap(), 0, "left limit excludes the jump at t");
        assert_eq!(p.count_at(2.4999).unwrap(), 1);
        assert_eq!(p.count_at(5.0).unwrap(), 3);
        assert_eq!(p.left_limit_at(5.0).unwrap(), 3);
        assert!(p.count_at(-0.1).is_err());
        assert!(p.count_at(5.1).is_err());
        assert!(p.left_limit_at(0.0).is_err(), "left limit needs t > 0");
    }

    #[test]
    fn count_equals_left_limit_plus_indicator() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..50 {
            let n = rng.index(20);
            let mut times: Vec<f64> = (0..n).map(|_| rng.uniform_open(0.0, 10.0)).collect();
            times.sort_by(f64::total_cmp);
            times.dedup();
            let p = EventPath::new(times.clone(), 10.0).unwrap();
            for _ in 0..20 {
                // Mix exact event times and fresh uniform queries.
                let t = if !times.is_empty() && rng.index(2) == 0 {
                    times[rng.index(times.len())]
                } else {
                    rng.uniform_open(0.0, 10.0)
                };
                let indicator = times.contains(&t) as usize;
                assert_eq!(
                    p.count_at(t).unwrap(),
                    p.left_limit_at(t).unwrap() + indicator,
                    "right-continuity identity failed at t = {t}"
                );
            }
        }
    }

    #[test]
    fn merge_orders_events_and_detects_ties() {
        let x = EventPath::new(vec![1.0, 3.0], 5.0).unwrap();
        let y = EventPath::new(vec![2.0, 3.5], 5.0).unwrap();
        let merged = merge_events(&[(&x, 'x'), (&y, 'y')]).unwrap();
        let times: Vec<f64> = merged.iter().map(|&(t, _)| t).collect();
        let labels: Vec<char> = merged.iter().map(|&(_, l)| l).collect();
        assert_eq!(times, vec![1.0, 2.0, 3.0, 3.5]);
        assert_eq!(labels, vec!['x', 'y', 'x', 'y']);

        let tied = EventPath::new(vec![3.0], 5.0).unwrap();
        assert!(matches!(merge_events(&[(&x, 'x'), (&tied, 'y')]), Err(Error::Tie { .. })));

        // Times one part in 10^12 apart are distinct, not tied.
        let close = EventPath::new(vec![1.0 + 1e-12], 5.0).unwrap();
        let merged = merge_events(&[(&x, 'x'), (&close, 'y')]).unwrap();
        assert_eq!(merged.len(), 3);
        assert_eq!(merged[0].1, 'x');
        assert_eq!(merged[1].1, 'y');
    }

    #[test]
    fn merge_matches_concat_sort_oracle() {
        let mut rng = RngStream::new(12, 0);
        for _ in 0..100 {
            let mk = |rng: &mut RngStream| {
                let n = rng.index(15);
                let mut ts: Vec<f64> = (0..n).map(|_| rng.uniform_open(0.0, 8.0)).collect();
                ts.sort_by(f64::total_cmp);
                ts.dedup();
                EventPath::new(ts, 8.0).unwrap()
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let mut oracle: Vec<f64> = Vec::new();
            oracle.extend(a.times());
            oracle.extend(b.times());
            oracle.extend(c.times());
            oracle.sort_by(f64::total_cmp);
            let has_tie = oracle.windows(2).any(|w| w[0] == w[1]);
            match merge_events(&[(&a, 0u8), (&b, 1), (&c, 2)]) {
                Ok(merged) => {
                    assert!(!has_tie);
                    let times: Vec<f64> = merged.iter().map(|&(t, _)| t).collect();
                    assert_eq!(times, oracle, "merge must equal concat+sort");
                }
                Err(Error::Tie { .. }) => assert!(has_tie),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn integrate_si_product_no_events() {
        // S0 = 8, I0 = 2 held for the whole window of length 5.
        let init = InitialState::sir(10, 2, 0).unwrap();
        let x = EventPath::empty(5.0).unwrap();
        let y = EventPath::empty(5.0).unwrap();
        let view = sir_view(init, &x, &y);
        let got = integrate_product(&view, |c| (c.s * c.i) as f64).unwrap();
        assert_eq!(got, 80.0, "8 * 2 * 5 = 80 exactly");
    }

    #[test]
    fn integrate_si_product_one_infection() {
        // Infection at t = 2 splits [0,5] into 8*2 for 2 units, 7*3 for 3.
        let init = InitialState::sir(10, 2, 0).unwrap();
        let x = EventPath::new(vec![2.0], 5.0).unwrap();
        let y = EventPath::empty(5.0).unwrap();
        let view = sir_view(init, &x, &y);
        let got = integrate_product(&view, |c| (c.s * c.i) as f64).unwrap();
        assert_eq!(got, 95.0, "8*2*2 + 7*3*3 = 95 exactly");
    }

    #[test]
    fn integrate_infectious_occupancy_with_recovery() {
        // Infection at 2, removal at 3: I is 2, then 3, then 2 again.
        let init = InitialState::sir(10, 2, 0).unwrap();
        let x = EventPath::new(vec![2.0], 5.0).unwrap();
        let y = EventPath::new(vec![3.0], 5.0).unwrap();
        let view = sir_view(init, &x, &y);
        let got = integrate_product(&view, |c| c.i as f64).unwrap();
        assert_eq!(got, 11.0, "2*2 + 3*1 + 2*2 = 11 exactly");
    }

    #[test]
    fn integrate_is_additive_over_splits() {
        let mut rng = RngStream::new(13, 0);
        for _ in 0..50 {
            let init = InitialState::sir(30, 5, 0).unwrap();
            let t_end = 6.0;
            let nx = rng.index(10);
            let mut xt: Vec<f64> = (0..nx).map(|_| rng.uniform_open(0.0, t_end)).collect();
            xt.sort_by(f64::total_cmp);
            xt.dedup();
            let x = EventPath::new(xt, t_end).unwrap();
            let y = EventPath::empty(t_end).unwrap();
            let view = sir_view(init, &x, &y);
            let split = rng.uniform_open(0.0, t_end);
            let f = |c: Counts| (c.s * c.i) as f64 / 30.0;
            let whole = integrate_product(&view, f).unwrap();
            let left = integrate_range(&view, 0.0, split, f).unwrap();
            let right = integrate_range(&view, split, t_end, f).unwrap();
            assert!(
                (whole - (left + right)).abs() < 1e-10,
                "additivity violated: {whole} vs {} + {}",
                left,
                right
            );
        }
    }

    #[test]
    fn infeasible_trajectory_is_an_error() {
        // Two removals with only one infectious individual: I goes negative.
        let init = InitialState::sir(10, 1, 0).unwrap();
        let x = EventPath::empty(5.0).unwrap();
        let y = EventPath::new(vec![1.0, 2.0], 5.0).unwrap();
        let view = sir_view(init, &x, &y);
        let err = integrate_product(&view, |c| c.i as f64).unwrap_err();
        assert!(matches!(err, Error::Infeasible { compartment: "infectious", .. }), "{err}");
    }

    #[test]
    fn walk_reports_left_limits_at_jumps() {
        let init = InitialState::sir(10, 2, 0).unwrap();
        let x = EventPath::new(vec![2.0], 5.0).unwrap();
        let y = EventPath::new(vec![3.0], 5.0).unwrap();
        let view = sir_view(init, &x, &y);
        let mut jumps = Vec::new();
        view.walk(0.0, 5.0, |_, _, _| (), |t, label, before| jumps.push((t, label, before)))
            .unwrap();
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].0, 2.0);
        assert_eq!(jumps[0].1, Transition::X);
        assert_eq!(jumps[0].2.s, 8, "infection sees S before its own jump");
        assert_eq!(jumps[0].2.i, 2);
        assert_eq!(jumps[1].1, Transition::Y);
        assert_eq!(jumps[1].2.i, 3, "removal sees I before its own jump");
    }

    #[test]
    fn seir_view_tracks_exposed_compartment() {
        let init = InitialState::seir(20, 3, 2, 0).unwrap();
        let x = EventPath::new(vec![1.0], 6.0).unwrap(); // S -> E
        let y = EventPath::new(vec![2.0], 6.0).unwrap(); // E -> I
        let z = EventPath::new(vec![4.0], 6.0).unwrap(); // I -> R
        let view = CompartmentView::seir(init, &x, &y, &z).unwrap();
        let c0 = view.counts_at(0.5).unwrap();
        assert_eq!((c0.s, c0.e, c0.i, c0.r), (15, 3, 2, 0));
        let c1 = view.counts_at(1.5).unwrap();
        assert_eq!((c1.s, c1.e, c1.i, c1.r), (14, 4, 2, 0));
        let c2 = view.counts_at(3.0).unwrap();
        assert_eq!((c2.s, c2.e, c2.i, c2.r), (14, 3, 3, 0));
        let c3 = view.counts_at(6.0).unwrap();
        assert_eq!((c3.s, c3.e, c3.i, c3.r), (14, 3, 2, 1));
        let int_e = integrate_product(&view, |c| c.e as f64).unwrap();
        assert_eq!(int_e, 3.0 * 1.0 + 4.0 * 1.0 + 3.0 * 4.0, "E dwell integral");
    }

    #[test]
    fn integrate_matches_riemann_oracle_on_random_paths() {
        // Midpoint Riemann sums converge to the exact segment sums; the step
        // function has at most n discontinuities, so the error is bounded by
        // n * step * max|f|.
        let mut rng = RngStream::new(14, 0);
        for _ in 0..20 {
            let t_end = 3.0;
            let init = InitialState::sir(50, 10, 0).unwrap();
            let mut xt: Vec<f64> = (0..rng.index(12)).map(|_| rng.uniform_open(0.0, t_end)).collect();
            let mut yt: Vec<f64> = (0..rng.index(8)).map(|_| rng.uniform_open(0.0, t_end)).collect();
            xt.sort_by(f64::total_cmp);
            xt.dedup();
            yt.sort_by(f64::total_cmp);
            yt.retain(|t| !xt.contains(t));
            yt.dedup();
            let x = EventPath::new(xt, t_end).unwrap();
            let y = EventPath::new(yt, t_end).unwrap();
            if CompartmentView::sir(init, &x, &y)
                .and_then(|v| integrate_product(&v, |_| 0.0))
                .is_err()
            {
                continue; // infeasible random pairing: removals outran infections
            }
            let view = sir_view(init, &x, &y);
            let f = |c: Counts| (c.s * c.i) as f64 / 50.0;
            let exact = integrate_product(&view, f).unwrap();
            let step = 1e-5;
            let steps = (t_end / step) as usize;
            let mut riemann = 0.0;
            for k in 0..steps {
                let t = (k as f64 + 0.5) * step;
                riemann += f(view.counts_at(t).unwrap()) * step;
            }
            let denom = exact.abs().max(1.0);
            assert!(
                ((exact - riemann) / denom).abs() < 1e-3,
                "Riemann oracle disagrees: exact {exact}, Riemann {riemann}"
            );
        }
    }
}
