//! Chain diagnostics: effective sample size, posterior summaries, and
//! acceptance-rate reporting for [`crate::sampler::ChainTrace`] output.

use crate::error::{Error, Result};
use crate::sampler::ChainTrace;

/// Effective sample size by the method of batch means with batch size
/// `⌊√n⌋`: `n · s² / (b · var(batch means))`, clipped to `[1, n]`.
///
/// A constant series has zero long-run variance; by convention its ESS is
/// `n` (callers can detect constancy through [`SummaryStats::constant`]).
pub fn ess_batch_means(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 16 {
        return Err(Error::invalid(format!(
            "effective sample size needs at least 16 samples, got {n}"
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("series contains non-finite values"));
    }
    let b = (n as f64).sqrt().floor() as usize; // batch size
    let a = n / b; // number of batches
    let used = a * b;
    let mean = series[..used].iter().sum::<f64>() / used as f64;
    let s2 = series[..used].iter().map(|v| (v - mean).powi(2)).sum::<f64>() / used as f64;
    if s2 == 0.0 {
        return Ok(n as f64);
    }
    let mut batch_var = 0.0;
    for i in 0..a {
        let bm = series[i * b..(i + 1) * b].iter().sum::<f64>() / b as f64;
        batch_var += (bm - mean).powi(2);
    }
    batch_var /= (a - 1) as f64;
    let long_run = b as f64 * batch_var;
    if long_run == 0.0 {
        return Ok(n as f64);
    }
    Ok((n as f64 * s2 / long_run).clamp(1.0, n as f64))
}

/// Posterior summary of one tracked scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub variance: f64,
    /// 2.5%, 50%, and 97.5% quantiles.
    pub quantiles: [f64; 3],
    pub ess: f64,
    /// True when every post-burn-in sample is identical (ESS is then `n`
    /// by convention and the variance is zero).
    pub constant: bool,
}

/// Summary of a whole trace: per-scalar statistics plus acceptance rates
/// derived from the samplers' bookkeeping columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSummary {
    /// Post-burn-in sample count.
    pub n_samples: usize,
    /// One entry per tracked scalar column, in trace order.
    pub parameters: Vec<(String, SummaryStats)>,
    /// Mean acceptance per move type: site and path columns yield one rate
    /// each; add/remove/move bookkeeping yields one rate per move kind.
    pub acceptance_rates: Vec<(String, f64)>,
}

/// True for bookkeeping columns that describe moves rather than state.
fn is_move_column(name: &str) -> bool {
    name.starts_with("site_accept_")
        || name.starts_with("rj_move_")
        || name.starts_with("rj_accept_")
        || name.starts_with("path_accept_")
        || name.starts_with("path_frac_")
}

/// Empirical quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

fn summarize_series(series: &[f64]) -> Result<SummaryStats> {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let variance = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let constant = sorted.first() == sorted.last();
    Ok(SummaryStats {
        mean,
        variance,
        quantiles: [
            quantile(&sorted, 0.025),
            quantile(&sorted, 0.5),
            quantile(&sorted, 0.975),
        ],
        ess: ess_batch_means(series)?,
        constant,
    })
}

/// Summarizes every tracked scalar of `trace` after discarding `burn_in`
/// iterations: mean, variance, central 95% quantiles, batch-means ESS,
/// and acceptance rates per move type.
pub fn summarize(trace: &ChainTrace, burn_in: usize) -> Result<TraceSummary> {
    let len = trace.len();
    if burn_in >= len {
        return Err(Error::invalid(format!(
            "burn-in {burn_in} leaves no samples from a trace of length {len}"
        )));
    }
    let mut parameters = Vec::new();
    let mut acceptance_rates = Vec::new();
    for (name, col) in trace.entries() {
        let kept = &col[burn_in..];
        if !is_move_column(name) {
            parameters.push((name.to_string(), summarize_series(kept)?));
        } else if name.starts_with("site_accept_") || name.starts_with("path_accept_") {
            let rate = kept.iter().sum::<f64>() / kept.len() as f64;
            acceptance_rates.push((name.to_string(), rate));
        } else if let Some(proc_name) = name.strip_prefix("rj_move_") {
            // Pair the move-kind codes with their accept flags to report
            // acceptance per add/remove/move kind.
            let accept_col = trace
                .column(&format!("rj_accept_{proc_name}"))
                .ok_or_else(|| {
                    Error::invalid(format!("trace has {name} but no rj_accept_{proc_name}"))
                })?;
            let accepts = &accept_col[burn_in..];
            for (code, label) in [(0.0, "add"), (1.0, "remove"), (2.0, "move")] {
                let mut attempts = 0u64;
                let mut accepted = 0u64;
                for (k, a) in kept.iter().zip(accepts) {
                    if *k == code {
                        attempts += 1;
                        accepted += (*a != 0.0) as u64;
                    }
                }
                let rate = if attempts == 0 {
                    0.0
                } else {
                    accepted as f64 / attempts as f64
                };
                acceptance_rates.push((format!("rj_{label}_{proc_name}"), rate));
            }
        }
        // rj_accept_* and path_frac_* are consumed alongside their partners.
    }
    Ok(TraceSummary {
        n_samples: len - burn_in,
        parameters,
        acceptance_rates,
    })
}

/// Split-R̂ across chains on one scalar (a convenience, not part of the
/// core method): each chain is halved, and R̂ compares between-half and
/// within-half variances. Values near 1 indicate the chains agree.
pub fn split_rhat(chains: &[&[f64]]) -> Result<f64> {
    let mut halves: Vec<&[f64]> = Vec::new();
    for c in chains {
        if c.len() < 4 {
            return Err(Error::invalid("split R-hat needs at least 4 samples per chain"));
        }
        let mid = c.len() / 2;
        halves.push(&c[..mid]);
        halves.push(&c[mid..mid * 2]);
    }
    let m = halves.len() as f64;
    let n = halves.iter().map(|h| h.len()).min().expect("nonempty") as f64;
    let means: Vec<f64> = halves
        .iter()
        .map(|h| h.iter().sum::<f64>() / h.len() as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / m;
    let between = n / (m - 1.0) * means.iter().map(|mu| (mu - grand).powi(2)).sum::<f64>();
    let within = halves
        .iter()
        .zip(&means)
        .map(|(h, mu)| {
            h.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (h.len() as f64 - 1.0)
        })
        .sum::<f64>()
        / m;
    if within == 0.0 {
        return Ok(1.0);
    }
    let var_plus = (n - 1.0) / n * within + between / n;
    Ok((var_plus / within).sqrt())
}
