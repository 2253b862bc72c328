//! Fit an SEIR model with a transmission change point to daily count data.
//!
//! This is the workflow for surveillance-style data (for example the
//! `configs/mayotte.cfg` COVID-19 setup): exact event times are never
//! seen — only how many confirmations and removals fell on each day.
//! Concretely,
//!
//!   * infections (S -> E) are entirely latent,
//!   * progressions (E -> I, "confirmed cases") are observed as daily
//!     counts, with the times inside each day latent,
//!   * removals (I -> R) are observed as daily counts too, and
//!   * the transmission rate drops at a known intervention day.
//!
//! The example simulates a ground-truth outbreak, bins it into a daily
//! `day,confirmed,removed` CSV, loads that file back with the daily-count
//! reader, fits with the birth-process proposal sampler, and compares the
//! posterior to the simulation truth.
//!
//! ```text
//! cargo run --release --example seir_daily_counts
//! ```

use epimc::dataio::load_daily_counts;
use epimc::diagnostics::summarize;
use epimc::likelihood::SeirParams;
use epimc::path::{EventPath, InitialState};
use epimc::rng::RngStream;
use epimc::sampler::{
    run_new_chain, GammaPrior, ModelConfig, NewSamplerConfig, RateSetting,
};
use epimc::simulate::gillespie_seir;

/// Events per whole day over `days` days.
fn daily(path: &EventPath, days: usize) -> Vec<u64> {
    let mut counts = vec![0u64; days];
    for &t in path.times() {
        let d = (t.floor() as usize).min(days - 1);
        counts[d] += 1;
    }
    counts
}

fn main() -> epimc::Result<()> {
    // Ground truth: transmission halves at the intervention on day 12.
    let init = InitialState::seir(500, 10, 5, 0)?;
    let days = 28usize;
    let change_point = 12.0;
    let truth = SeirParams::new(0.5, Some((0.15, change_point)), 0.3, 0.15)?;
    let mut rng = RngStream::new(97, 0);
    let ob = gillespie_seir(init, &truth, days as f64, &mut rng)?;
    let z = ob.z.as_ref().expect("SEIR outbreaks carry a removal process");
    println!(
        "Simulated outbreak: {} infections, {} confirmations, {} removals over {days} days",
        ob.x.len(),
        ob.y.len(),
        z.len()
    );

    // Bin to a daily CSV and read it back through the standard loader.
    let confirmed = daily(&ob.y, days);
    let removed = daily(z, days);
    let mut csv = String::from("day,confirmed,removed\n");
    for d in 0..days {
        csv.push_str(&format!("{},{},{}\n", d + 1, confirmed[d], removed[d]));
    }
    let tmp = std::env::temp_dir().join("epimc_example_daily.csv");
    std::fs::write(&tmp, &csv).map_err(|e| epimc::Error::io("writing the daily CSV", e))?;
    let obs = load_daily_counts(&tmp, init, Some(days))?;
    println!("Daily CSV written to {} and loaded back.", tmp.display());

    let prior = |shape: f64, rate: f64| -> epimc::Result<RateSetting> {
        Ok(RateSetting::Prior(GammaPrior::new(shape, rate)?))
    };
    let cfg = ModelConfig {
        beta: prior(1.0, 2.0)?,
        beta2: Some(prior(1.0, 2.0)?),
        change_point: Some(change_point),
        alpha: Some(prior(1.0, 2.0)?),
        gamma: prior(1.0, 2.0)?,
        theta0: None,
        init_count_range: (30, 200),
    };
    let ncfg = NewSamplerConfig {
        update_fraction: 0.3,
        targets: None,
        iters: 2_000,
        burn_in: 400,
        tune_target: Some(0.2),
    };
    let mut rng = RngStream::new(97, 1);
    let trace = run_new_chain(&cfg, &obs, &ncfg, &mut rng)?;
    let summary = summarize(&trace, ncfg.burn_in)?;

    println!();
    println!("Posterior vs simulation truth ({} kept draws):", summary.n_samples);
    let truths = [
        ("beta1", truth.beta1),
        ("beta2", 0.15),
        ("alpha", truth.alpha),
        ("gamma", truth.gamma),
    ];
    for (name, t) in truths {
        let s = summary
            .parameters
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .expect("rate column present");
        println!(
            "  {name:6} truth {t:5.2}   mean {:7.4}  95% [{:7.4}, {:7.4}]",
            s.mean, s.quantiles[0], s.quantiles[2]
        );
    }
    if let Some((_, s)) = summary.parameters.iter().find(|(n, _)| n == "n_x") {
        println!(
            "  latent infection count: mean {:.1} (simulated outbreak had {})",
            s.mean,
            ob.x.len()
        );
    }
    std::fs::remove_file(&tmp).ok();
    Ok(())
}
