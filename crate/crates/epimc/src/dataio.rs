//! File formats: event-time tables, removal-time lists, daily-count tables,
//! and chain-trace CSV.
//!
//! Every format is plain text with a mandatory header row, written with
//! 17-significant-digit decimals so that a written file reparses to exactly
//! the same 64-bit floats. Parsers are strict: unknown headers, malformed
//! cells, or structural gaps are reported as [`Error::Parse`] with a
//! 1-based line number.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::path::{merge_events, EventPath, InitialState, ModelKind};
use crate::sampler::{ChainTrace, Observation, ProcessId, ProcessObs};
use crate::simulate::Outbreak;

/// Formats a float with 17 significant digits, enough to reproduce the
/// exact bit pattern on reparse.
pub fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(file: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { file: file.display().to_string(), line, message: message.into() }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

fn write_string(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Lines of a file with 1-based numbers, trailing `\r` stripped, blank
/// lines skipped.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l).trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_f64(file: &Path, line: usize, cell: &str, what: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(file, line, format!("{what}: not a number: {cell:?}")))
}

fn parse_u64(file: &Path, line: usize, cell: &str, what: &str) -> Result<u64> {
    cell.trim()
        .parse::<u64>()
        .map_err(|_| parse_err(file, line, format!("{what}: not a non-negative integer: {cell:?}")))
}

// ---------------------------------------------------------------------------
// Event tables
// ---------------------------------------------------------------------------

const EVENT_HEADER: &str = "time,process";

/// Renders the exact event times of an outbreak as a two-column table
/// (`time,process`), all processes interleaved in time order.
pub fn events_to_csv(outbreak: &Outbreak) -> Result<String> {
    let mut labeled = vec![(&outbreak.x, ProcessId::X), (&outbreak.y, ProcessId::Y)];
    if let Some(z) = &outbreak.z {
        labeled.push((z, ProcessId::Z));
    }
    let merged = merge_events(&labeled)?;
    let mut out = String::with_capacity(32 * (merged.len() + 1));
    out.push_str(EVENT_HEADER);
    out.push('\n');
    for (t, id) in merged {
        let _ = writeln!(out, "{},{id}", format_full(t));
    }
    Ok(out)
}

/// Writes [`events_to_csv`] to a file.
pub fn write_events(path: &Path, outbreak: &Outbreak) -> Result<()> {
    write_string(path, &events_to_csv(outbreak)?)
}

/// Reads an event table written by [`write_events`] back into per-process
/// paths on the given horizon. The `z` component is present exactly when
/// the file contains `z` rows.
pub fn read_events(path: &Path, horizon: f64) -> Result<Outbreak> {
    let text = read_to_string(path)?;
    let mut lines = numbered_lines(&text);
    match lines.next() {
        Some((_, l)) if l == EVENT_HEADER => {}
        Some((n, l)) => {
            return Err(parse_err(path, n, format!("expected header {EVENT_HEADER:?}, got {l:?}")))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let (mut xs, mut ys, mut zs) = (Vec::new(), Vec::new(), Vec::new());
    let mut saw_z = false;
    for (n, line) in lines {
        let mut cells = line.split(',');
        let (time, proc) = match (cells.next(), cells.next(), cells.next()) {
            (Some(t), Some(p), None) => (t, p),
            _ => return Err(parse_err(path, n, format!("expected 2 cells, got {line:?}"))),
        };
        let t = parse_f64(path, n, time, "time")?;
        match proc.trim() {
            "x" => xs.push(t),
            "y" => ys.push(t),
            "z" => {
                saw_z = true;
                zs.push(t);
            }
            other => {
                return Err(parse_err(path, n, format!("unknown process label {other:?}")))
            }
        }
    }
    Ok(Outbreak {
        x: EventPath::new(xs, horizon)?,
        y: EventPath::new(ys, horizon)?,
        z: if saw_z { Some(EventPath::new(zs, horizon)?) } else { None },
    })
}

// ---------------------------------------------------------------------------
// Removal-time lists
// ---------------------------------------------------------------------------

/// Loads a one-number-per-line list of removal times into an observation
/// whose removal process carries the full path and whose other processes
/// are latent.
///
/// Times must be non-negative and non-decreasing. The event-path core
/// requires strictly increasing times in `(0, horizon]`, so any value that
/// does not clear its predecessor (ties, and a leading zero) is nudged up
/// by the minimal number of `1e-6` steps; each nudge is reported in the
/// returned warning list. The horizon defaults to the last (adjusted)
/// time; `horizon_override` may extend it.
pub fn load_removal_times(
    path: &Path,
    init: InitialState,
    horizon_override: Option<f64>,
) -> Result<(Observation, Vec<String>)> {
    const NUDGE: f64 = 1e-6;
    let text = read_to_string(path)?;
    let mut times: Vec<f64> = Vec::new();
    let mut warnings = Vec::new();
    let mut last = 0.0f64;
    for (n, line) in numbered_lines(&text) {
        let raw = parse_f64(path, n, line, "removal time")?;
        if !raw.is_finite() || raw < 0.0 {
            return Err(parse_err(path, n, format!("removal time must be >= 0, got {raw}")));
        }
        if raw + NUDGE < last {
            return Err(parse_err(
                path,
                n,
                format!("removal times must be non-decreasing: {raw} after {last}"),
            ));
        }
        let mut t = raw;
        if t <= last {
            t = last + NUDGE;
            warnings.push(format!(
                "{}:{n}: removal time {raw} adjusted to {t} to keep event times strictly \
                 increasing",
                path.display()
            ));
        }
        times.push(t);
        last = t;
    }
    if times.is_empty() {
        return Err(parse_err(path, 1, "no removal times in file"));
    }
    let horizon = match horizon_override {
        Some(h) => {
            if !(h.is_finite() && h >= last) {
                return Err(Error::invalid(format!(
                    "horizon override {h} is before the last removal at {last}"
                )));
            }
            h
        }
        None => last,
    };
    let removal_path = ProcessObs::Path(EventPath::new(times, horizon)?);
    let obs = match init.kind() {
        ModelKind::Sir => Observation {
            init,
            horizon,
            x: ProcessObs::Unobserved,
            y: removal_path,
            z: None,
        },
        ModelKind::Seir => Observation {
            init,
            horizon,
            x: ProcessObs::Unobserved,
            y: ProcessObs::Unobserved,
            z: Some(removal_path),
        },
    };
    Ok((obs, warnings))
}

// ---------------------------------------------------------------------------
// Daily-count tables
// ---------------------------------------------------------------------------

const DAILY_HEADER: &str = "day,confirmed,removed";

/// Loads a `day,confirmed,removed` table into an observation with one
/// count per unit-length day.
///
/// Days must run exactly `1..=D` in order. For an SIR initial state the
/// confirmed column counts infection events (`x`) and the removed column
/// counts removals (`y`); for SEIR the confirmed column counts
/// infectious-case confirmations (`y`), the removed column removals (`z`),
/// and the infection process stays latent. `expected_days` asserts the
/// table length when the caller knows the reporting range.
pub fn load_daily_counts(
    path: &Path,
    init: InitialState,
    expected_days: Option<usize>,
) -> Result<Observation> {
    let text = read_to_string(path)?;
    let mut lines = numbered_lines(&text);
    match lines.next() {
        Some((_, l)) if l == DAILY_HEADER => {}
        Some((n, l)) => {
            return Err(parse_err(path, n, format!("expected header {DAILY_HEADER:?}, got {l:?}")))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let mut confirmed: Vec<u64> = Vec::new();
    let mut removed: Vec<u64> = Vec::new();
    for (n, line) in lines {
        let mut cells = line.split(',');
        let (day, conf, rem) = match (cells.next(), cells.next(), cells.next(), cells.next()) {
            (Some(d), Some(c), Some(r), None) => (d, c, r),
            _ => return Err(parse_err(path, n, format!("expected 3 cells, got {line:?}"))),
        };
        let day = parse_u64(path, n, day, "day")?;
        let expected = confirmed.len() as u64 + 1;
        if day != expected {
            return Err(parse_err(
                path,
                n,
                format!("days must run 1,2,... without gaps; expected day {expected}, got {day}"),
            ));
        }
        confirmed.push(parse_u64(path, n, conf, "confirmed count")?);
        removed.push(parse_u64(path, n, rem, "removed count")?);
    }
    if confirmed.is_empty() {
        return Err(parse_err(path, 2, "no daily rows in file"));
    }
    if let Some(d) = expected_days {
        if confirmed.len() != d {
            return Err(parse_err(
                path,
                confirmed.len() + 1,
                format!("expected {d} daily rows, found {}", confirmed.len()),
            ));
        }
    }
    let horizon = confirmed.len() as f64;
    let day = |counts: Vec<u64>| ProcessObs::DailyCounts { counts, day_len: 1.0 };
    let obs = match init.kind() {
        ModelKind::Sir => Observation {
            init,
            horizon,
            x: day(confirmed),
            y: day(removed),
            z: None,
        },
        ModelKind::Seir => Observation {
            init,
            horizon,
            x: ProcessObs::Unobserved,
            y: day(confirmed),
            z: Some(day(removed)),
        },
    };
    Ok(obs)
}

// ---------------------------------------------------------------------------
// Chain traces
// ---------------------------------------------------------------------------

/// Renders a chain trace as CSV with a leading 1-based `iteration` column.
pub fn trace_to_csv(trace: &ChainTrace) -> String {
    let mut out = String::new();
    out.push_str("iteration");
    for name in trace.columns() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..trace.len() {
        let _ = write!(out, "{}", i + 1);
        for v in trace.row(i) {
            out.push(',');
            out.push_str(&format_full(v));
        }
        out.push('\n');
    }
    out
}

/// Writes a chain trace as CSV (see [`trace_to_csv`]).
pub fn write_trace(path: &Path, trace: &ChainTrace) -> Result<()> {
    write_string(path, &trace_to_csv(trace))
}

/// Reads a trace CSV produced by [`write_trace`] (the `iteration` column is
/// validated and dropped).
pub fn read_trace(path: &Path) -> Result<ChainTrace> {
    let text = read_to_string(path)?;
    let mut lines = numbered_lines(&text);
    let (header_line, header) = match lines.next() {
        Some((n, l)) => (n, l),
        None => return Err(parse_err(path, 1, "empty file")),
    };
    let mut names = header.split(',').map(str::trim);
    match names.next() {
        Some("iteration") => {}
        other => {
            return Err(parse_err(
                path,
                header_line,
                format!("first column must be \"iteration\", got {other:?}"),
            ))
        }
    }
    let names: Vec<&str> = names.collect();
    if names.is_empty() || names.iter().any(|n| n.is_empty()) {
        return Err(parse_err(path, header_line, "trace header needs named value columns"));
    }
    let mut trace = ChainTrace::with_columns(names);
    let mut row = Vec::new();
    let mut expected_iter = 1u64;
    for (n, line) in lines {
        row.clear();
        let mut cells = line.split(',');
        let iter_cell = cells.next().unwrap_or("");
        let iter = parse_u64(path, n, iter_cell, "iteration")?;
        if iter != expected_iter {
            return Err(parse_err(
                path,
                n,
                format!("iterations must run 1,2,...; expected {expected_iter}, got {iter}"),
            ));
        }
        expected_iter += 1;
        for cell in cells {
            row.push(parse_f64(path, n, cell, "value")?);
        }
        if row.len() != trace.n_columns() {
            return Err(parse_err(
                path,
                n,
                format!("expected {} value cells, got {}", trace.n_columns(), row.len()),
            ));
        }
        trace.push_row(&row).map_err(|e| parse_err(path, n, e.to_string()))?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::{sir_loglik, SirParams};
    use crate::rng::RngStream;
    use crate::simulate::gillespie_sir;

    fn tmp(name: &str) -> tempfile::TempDir {
        tempfile::Builder::new().prefix(name).tempdir().unwrap()
    }

    #[test]
    fn seventeen_digits_reproduce_the_exact_bits() {
        let values = [
            0.1f64 + 0.2,
            std::f64::consts::PI,
            1e-300,
            5e-324,
            -7.23e17,
            0.0,
            123.456789,
        ];
        for &v in &values {
            let back: f64 = format_full(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} reparsed as {back}");
        }
    }

    #[test]
    fn event_table_round_trips_simulated_outbreaks_and_their_loglik() {
        let dir = tmp("events");
        let file = dir.path().join("events.csv");
        let init = InitialState::sir(200, 5, 0).unwrap();
        let p = SirParams { beta: 0.6, gamma: 0.3 };
        let horizon = 8.0;
        let mut rng = RngStream::new(0xDA7A, 0);
        let outbreak = gillespie_sir(init, &p, horizon, &mut rng).unwrap();
        assert!(!outbreak.x.is_empty(), "want a non-trivial outbreak");
        write_events(&file, &outbreak).unwrap();
        let back = read_events(&file, horizon).unwrap();
        assert_eq!(back.x, outbreak.x);
        assert_eq!(back.y, outbreak.y);
        assert!(back.z.is_none());
        let ll = sir_loglik(&outbreak.x, &outbreak.y, init, &p).unwrap();
        let ll_back = sir_loglik(&back.x, &back.y, init, &p).unwrap();
        assert!((ll - ll_back).abs() < 1e-10, "{ll} vs {ll_back}");
    }

    #[test]
    fn event_table_rejects_malformed_rows() {
        let dir = tmp("badevents");
        let file = dir.path().join("events.csv");
        std::fs::write(&file, "time,process\n0.5,x\n0.7,w\n").unwrap();
        let err = read_events(&file, 1.0).unwrap_err().to_string();
        assert!(err.contains(":3:") && err.contains("unknown process"), "{err}");
        std::fs::write(&file, "time,kind\n").unwrap();
        let err = read_events(&file, 1.0).unwrap_err().to_string();
        assert!(err.contains("header"), "{err}");
    }

    #[test]
    fn removal_times_nudge_ties_and_the_leading_zero() {
        let dir = tmp("removals");
        let file = dir.path().join("times.txt");
        std::fs::write(&file, "0\n0\n13\n13\n13\n20\n").unwrap();
        let init = InitialState::sir(120, 1, 0).unwrap();
        let (obs, warnings) = load_removal_times(&file, init, None).unwrap();
        assert_eq!(warnings.len(), 4, "{warnings:?}");
        let y = match &obs.y {
            ProcessObs::Path(p) => p,
            other => panic!("expected a path, got {other:?}"),
        };
        let expect = [1e-6, 2e-6, 13.0, 13.0 + 1e-6, 13.0 + 2e-6, 20.0];
        for (a, b) in y.times().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(obs.horizon, 20.0);
        assert!(matches!(obs.x, ProcessObs::Unobserved));
        // An override may extend the window past the last removal.
        let (obs, _) = load_removal_times(&file, init, Some(25.0)).unwrap();
        assert_eq!(obs.horizon, 25.0);
        assert!(load_removal_times(&file, init, Some(19.0)).is_err());
    }

    #[test]
    fn removal_times_reject_bad_lines() {
        let dir = tmp("badremovals");
        let file = dir.path().join("times.txt");
        for (content, needle, line) in [
            ("1.0\nfoo\n", "not a number", ":2:"),
            ("-1\n", "must be >= 0", ":1:"),
            ("5\n3\n", "non-decreasing", ":2:"),
            ("", "no removal times", ":1:"),
        ] {
            std::fs::write(&file, content).unwrap();
            let init = InitialState::sir(120, 1, 0).unwrap();
            let err = load_removal_times(&file, init, None).unwrap_err().to_string();
            assert!(err.contains(needle) && err.contains(line), "{content:?} -> {err}");
        }
    }

    #[test]
    fn daily_counts_load_per_model_kind() {
        let dir = tmp("daily");
        let file = dir.path().join("daily.csv");
        std::fs::write(&file, "day,confirmed,removed\n1,2,0\n2,0,1\n3,4,2\n").unwrap();
        let seir = InitialState::seir(1000, 15, 3, 0).unwrap();
        let obs = load_daily_counts(&file, seir, Some(3)).unwrap();
        assert_eq!(obs.horizon, 3.0);
        assert!(matches!(obs.x, ProcessObs::Unobserved));
        match (&obs.y, obs.z.as_ref().unwrap()) {
            (
                ProcessObs::DailyCounts { counts: c, day_len: d },
                ProcessObs::DailyCounts { counts: r, day_len: d2 },
            ) => {
                assert_eq!((c.as_slice(), *d), ([2, 0, 4].as_slice(), 1.0));
                assert_eq!((r.as_slice(), *d2), ([0, 1, 2].as_slice(), 1.0));
            }
            other => panic!("unexpected observation {other:?}"),
        }
        let sir = InitialState::sir(1000, 3, 0).unwrap();
        let obs = load_daily_counts(&file, sir, None).unwrap();
        assert!(matches!(&obs.x, ProcessObs::DailyCounts { counts, .. } if counts == &[2, 0, 4]));
        assert!(matches!(&obs.y, ProcessObs::DailyCounts { counts, .. } if counts == &[0, 1, 2]));
    }

    #[test]
    fn daily_counts_reject_structural_errors() {
        let dir = tmp("baddaily");
        let file = dir.path().join("daily.csv");
        let init = InitialState::sir(1000, 3, 0).unwrap();
        for (content, needle) in [
            ("day,confirmed,removed\n1,2,0\n3,0,1\n", "expected day 2"),
            ("day,confirmed,removed\n1,-2,0\n", "not a non-negative integer"),
            ("day,cases,removed\n1,2,0\n", "header"),
            ("day,confirmed,removed\n", "no daily rows"),
            ("day,confirmed,removed\n1,2,0,9\n", "expected 3 cells"),
        ] {
            std::fs::write(&file, content).unwrap();
            let err = load_daily_counts(&file, init, None).unwrap_err().to_string();
            assert!(err.contains(needle), "{content:?} -> {err}");
        }
        std::fs::write(&file, "day,confirmed,removed\n1,2,0\n2,0,1\n").unwrap();
        let err = load_daily_counts(&file, init, Some(5)).unwrap_err().to_string();
        assert!(err.contains("expected 5 daily rows"), "{err}");
    }

    #[test]
    fn trace_csv_round_trips_bitwise() {
        let dir = tmp("trace");
        let file = dir.path().join("trace.csv");
        let mut trace = ChainTrace::with_columns(vec!["beta", "n_y", "loglik"]);
        trace.push_row(&[0.1234567890123456, 4.0, -17.25]).unwrap();
        trace.push_row(&[std::f64::consts::E, 5.0, -16.5]).unwrap();
        write_trace(&file, &trace).unwrap();
        let back = read_trace(&file).unwrap();
        assert_eq!(back, trace);
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(text.starts_with("iteration,beta,n_y,loglik\n"), "{text}");
    }

    #[test]
    fn trace_csv_rejects_corrupt_files() {
        let dir = tmp("badtrace");
        let file = dir.path().join("trace.csv");
        for (content, needle) in [
            ("step,beta\n1,0.5\n", "first column must be \"iteration\""),
            ("iteration,beta\n2,0.5\n", "expected 1, got 2"),
            ("iteration,beta\n1,abc\n", "not a number"),
            ("iteration,beta\n1,0.5,9.0\n", "expected 1 value cells"),
            ("iteration\n1\n", "named value columns"),
        ] {
            std::fs::write(&file, content).unwrap();
            let err = read_trace(&file).unwrap_err().to_string();
            assert!(err.contains(needle), "{content:?} -> {err}");
        }
    }
}
