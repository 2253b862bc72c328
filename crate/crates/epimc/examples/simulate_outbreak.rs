//! Simulate stochastic SIR and SEIR outbreaks with exact event times.
//!
//! Runs the Gillespie (direct) method for both model families, prints the
//! resulting event counts and final compartment sizes, and writes the SIR
//! event list as CSV to standard output in the same `time,process` format
//! the `epimc simulate` subcommand produces.
//!
//! ```text
//! cargo run --release --example simulate_outbreak
//! ```

use epimc::dataio::events_to_csv;
use epimc::likelihood::{SeirParams, SirParams};
use epimc::path::{CompartmentView, InitialState};
use epimc::rng::RngStream;
use epimc::simulate::{gillespie_seir, gillespie_sir};

fn main() -> epimc::Result<()> {
    let mut rng = RngStream::new(7, 0);

    // --- SIR: 1000 individuals, 10 initially infective, observed 40 days.
    let init = InitialState::sir(1000, 10, 0)?;
    let params = SirParams::new(0.4, 0.2)?;
    let horizon = 40.0;
    let outbreak = gillespie_sir(init, &params, horizon, &mut rng)?;

    println!("SIR outbreak  (N = 1000, I0 = 10, beta = 0.4, gamma = 0.2, T = 40)");
    println!("  infections: {}", outbreak.x.len());
    println!("  removals:   {}", outbreak.y.len());
    let view = CompartmentView::sir(init, &outbreak.x, &outbreak.y)?;
    let end = view.counts_at(horizon)?;
    println!("  final state: S = {}, I = {}, R = {}", end.s, end.i, end.r);

    // --- SEIR: latency between infection and infectiousness.
    let init = InitialState::seir(1000, 5, 5, 0)?;
    let params = SeirParams::new(0.4, None, 0.3, 0.2)?;
    let outbreak_seir = gillespie_seir(init, &params, horizon, &mut rng)?;
    let z = outbreak_seir.z.as_ref().expect("SEIR outbreaks carry a removal process");

    println!();
    println!("SEIR outbreak (N = 1000, E0 = 5, I0 = 5, alpha = 0.3, T = 40)");
    println!("  infections (S->E):   {}", outbreak_seir.x.len());
    println!("  progressions (E->I): {}", outbreak_seir.y.len());
    println!("  removals (I->R):     {}", z.len());
    let view = CompartmentView::seir(init, &outbreak_seir.x, &outbreak_seir.y, z)?;
    let end = view.counts_at(horizon)?;
    println!(
        "  final state: S = {}, E = {}, I = {}, R = {}",
        end.s, end.e, end.i, end.r
    );

    println!();
    println!("First SIR events as CSV (the `simulate` subcommand's file format):");
    let csv = events_to_csv(&outbreak)?;
    for line in csv.lines().take(8) {
        println!("  {line}");
    }
    println!("  ... ({} data rows total)", csv.lines().count() - 1);
    Ok(())
}
