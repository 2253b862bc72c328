//! Fit a partially observed SIR outbreak with the whole-path
//! birth-process proposal sampler, and compare it to the benchmark.
//!
//! Instead of moving one latent event per iteration, this sampler redraws
//! the entire latent path (or a random subset of its exponential
//! coordinates) from its conditional birth-process law and accepts with a
//! ratio involving only the complementary likelihood factors — the pieces
//! of the joint density the proposal law does not already contain. One
//! accepted proposal can change every latent event at once.
//!
//! Scenario: the infection path of a simulated outbreak is observed and
//! the removal path is latent (count and times unknown). Three samplers
//! run on identical data:
//!
//!   (a) the single-site reversible-jump benchmark, 100 000 iterations;
//!   (b) whole-path refreshes, 20 000 iterations;
//!   (c) partial coordinate updates with the acceptance-rate tuner,
//!       20 000 iterations.
//!
//! All three agree on the posterior (within Monte Carlo error, quoted per
//! run); the effective-sample-size-per-iteration column shows why the
//! birth-process proposals are worth having.
//!
//! ```text
//! cargo run --release --example birth_proposal_sampler
//! ```

use epimc::diagnostics::summarize;
use epimc::likelihood::SirParams;
use epimc::path::InitialState;
use epimc::rng::RngStream;
use epimc::sampler::{
    run_benchmark_chain, run_new_chain, GammaPrior, ModelConfig, NewSamplerConfig, Observation,
    ProcessObs, RateSetting,
};
use epimc::simulate::gillespie_sir;

fn main() -> epimc::Result<()> {
    let init = InitialState::sir(200, 5, 0)?;
    let truth = SirParams::new(0.5, 0.25)?;
    let horizon = 25.0;
    let mut rng = RngStream::new(31, 0);
    let outbreak = gillespie_sir(init, &truth, horizon, &mut rng)?;
    println!(
        "Simulated data: {} infections (observed), {} removals (latent), T = {horizon}",
        outbreak.x.len(),
        outbreak.y.len()
    );

    let obs = Observation {
        init,
        horizon,
        x: ProcessObs::Path(outbreak.x.clone()),
        y: ProcessObs::Unobserved,
        z: None,
    };
    let cfg = ModelConfig {
        beta: RateSetting::Prior(GammaPrior::new(2.0, 4.0)?),
        beta2: None,
        change_point: None,
        alpha: None,
        gamma: RateSetting::Prior(GammaPrior::new(2.0, 8.0)?),
        theta0: None,
        init_count_range: (60, 160),
    };

    struct Run {
        label: &'static str,
        iters: usize,
        summary: epimc::diagnostics::TraceSummary,
        seconds: f64,
    }
    let mut runs: Vec<Run> = Vec::new();

    // (a) Benchmark: single-event moves need a long chain.
    let (iters, burn) = (100_000, 20_000);
    let mut r = RngStream::new(77, 1);
    let started = std::time::Instant::now();
    let trace = run_benchmark_chain(&cfg, &obs, iters, &mut r)?;
    runs.push(Run {
        label: "benchmark (single-site)",
        iters,
        summary: summarize(&trace, burn)?,
        seconds: started.elapsed().as_secs_f64(),
    });

    // (b) Whole-path refreshes.
    let (iters, burn) = (20_000, 4_000);
    let full = NewSamplerConfig::full_refresh(iters, burn);
    let mut r = RngStream::new(77, 2);
    let started = std::time::Instant::now();
    let trace = run_new_chain(&cfg, &obs, &full, &mut r)?;
    runs.push(Run {
        label: "birth proposal, full path",
        iters,
        summary: summarize(&trace, burn)?,
        seconds: started.elapsed().as_secs_f64(),
    });

    // (c) Partial updates: each exponential coordinate of the latent path
    // is redrawn with a probability tuned during burn-in toward a 25%
    // path acceptance rate.
    let partial = NewSamplerConfig {
        update_fraction: 0.5,
        targets: None,
        iters,
        burn_in: burn,
        tune_target: Some(0.25),
    };
    let mut r = RngStream::new(77, 3);
    let started = std::time::Instant::now();
    let trace = run_new_chain(&cfg, &obs, &partial, &mut r)?;
    runs.push(Run {
        label: "birth proposal, partial",
        iters,
        summary: summarize(&trace, burn)?,
        seconds: started.elapsed().as_secs_f64(),
    });

    println!();
    println!("Truth: beta = {}, gamma = {} (posterior blends data with the priors)", truth.beta, truth.gamma);
    println!(
        "{:26} {:>8} {:>6} {:>16} {:>16} {:>9} {:>10}",
        "sampler", "iters", "secs", "beta (mean+-se)", "gamma (mean+-se)", "ESS(b)", "ESS/iter"
    );
    for run in &runs {
        let stat = |name: &str| {
            run.summary
                .parameters
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| s)
                .expect("parameter column present")
        };
        let beta = stat("beta");
        let gamma = stat("gamma");
        println!(
            "{:26} {:>8} {:>6.1} {:>8.4}+-{:.4} {:>8.4}+-{:.4} {:>9.0} {:>10.5}",
            run.label,
            run.iters,
            run.seconds,
            beta.mean,
            (beta.variance / beta.ess).sqrt(),
            gamma.mean,
            (gamma.variance / gamma.ess).sqrt(),
            beta.ess,
            beta.ess / run.iters as f64
        );
    }

    println!();
    println!("Path-move acceptance rates:");
    for run in &runs {
        let rates: Vec<String> = run
            .summary
            .acceptance_rates
            .iter()
            .map(|(n, r)| format!("{n} = {r:.3}"))
            .collect();
        println!("  {:26} {}", run.label, rates.join(", "));
    }
    println!();
    println!(
        "The three posteriors agree within their quoted Monte Carlo errors,\n\
         and the birth-process proposals need several times fewer iterations\n\
         per effective sample than the single-site benchmark. The gap widens\n\
         with the latent path length: on a population of a million (see the\n\
         acceptance suite) it exceeds a factor of ten."
    );
    Ok(())
}
