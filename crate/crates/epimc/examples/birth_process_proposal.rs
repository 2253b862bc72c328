//! Birth-process path proposals and their exponential coordinates.
//!
//! A counting path with a piecewise-constant stochastic intensity can be
//! mapped to a vector of unit-exponential inter-event masses (plus the
//! censored mass after the last event) and back. This example
//!
//!   1. builds the infection-intensity specification implied by a fixed
//!      removal path in an SIR model,
//!   2. draws an infection path from that conditional birth-process law,
//!   3. maps the path to its exponential coordinates and back, verifying
//!      the round trip to 1e-10, and
//!   4. perturbs one coordinate to show how a small coordinate change
//!      moves every later event smoothly.
//!
//! These coordinates are the proposal space of the birth-process sampler:
//! redrawing some of them from Exp(1) is exactly a draw from the path's
//! conditional prior in the directions the redraw touches.
//!
//! ```text
//! cargo run --release --example birth_process_proposal
//! ```

use epimc::intensity::IntensitySpec;
use epimc::path::{EventPath, InitialState};
use epimc::rng::RngStream;
use epimc::simulate::{coords_to_path, path_to_coords, sample_birth_path};

fn main() -> epimc::Result<()> {
    let mut rng = RngStream::new(23, 0);

    // A fixed removal path; the infection intensity beta S(t) I(t) / N
    // depends on the infection path only through its own jump count, so
    // conditionally on the removals it is a birth-process intensity.
    let init = InitialState::sir(50, 3, 0)?;
    let horizon = 12.0;
    let removals = EventPath::new(vec![1.5, 3.0, 4.2, 7.0, 9.5], horizon)?;
    let spec = IntensitySpec::sir_infection(&removals, init, 0.6)?;

    let (path, coords) = sample_birth_path(&spec, &mut rng)?;
    println!("Sampled infection path with {} events (first 10 shown):", path.len());
    for (j, t) in path.times().iter().enumerate().take(10) {
        println!("  event {:2}  t = {:8.5}   wait mass u_{j} = {:.5}", j + 1, t, coords.waits[j]);
    }
    println!("  censored mass after last event: {:.5}", coords.censored_mass);

    // Round trip: coordinates -> path must reproduce the original times.
    let back = coords_to_path(&coords.waits, &spec, || None)?;
    let worst = path
        .times()
        .iter()
        .zip(back.times())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert_eq!(back.len(), path.len());
    assert!(worst < 1e-10, "round-trip error {worst}");
    println!();
    println!("Round trip path -> coordinates -> path: max |Δt| = {worst:.3e}");

    // And the other direction: recovering the coordinates of the path.
    let rec = path_to_coords(&path, &spec)?;
    let worst_u = coords
        .waits
        .iter()
        .zip(&rec.waits)
        .map(|(a, b)| (a - b).abs())
        .fold((coords.censored_mass - rec.censored_mass).abs(), f64::max);
    println!("Round trip coordinates -> path -> coordinates: max |Δu| = {worst_u:.3e}");

    // Local perturbation: nudge the first wait; later events shift but the
    // map stays a path (strictly increasing, inside the horizon).
    if !coords.waits.is_empty() {
        let mut nudged = coords.waits.clone();
        nudged[0] *= 1.05;
        let moved = coords_to_path(&nudged, &spec, || None)?;
        println!();
        println!("After scaling u_0 by 1.05 ({} events, first 10 shown):", moved.len());
        for (j, (a, b)) in path.times().iter().zip(moved.times()).enumerate().take(10) {
            println!("  event {:2}  t = {:8.5}  ->  {:8.5}", j + 1, a, b);
        }
    }
    Ok(())
}
