//! `xrtg allocate`: two packet traces → one radio grid → relative per-RB
//! throughput error of the candidate against the reference.

use std::io::Write;
use std::path::Path;

use xrtg::error::{Error, Result};
use xrtg::ingest::{read_pcap, StreamTrace};
use xrtg::rangrid::{
    allocation_error, export_matrix_csv, export_rb_totals_csv, schedule, AllocationMatrix,
    GridConfig,
};

use crate::manifest::RunManifest;
use crate::{usage, AllocateArgs, CliResult};

/// Trace spans may differ by at most this fraction of the longer one:
/// the error metric compares like-for-like horizons, so a short trace
/// against a long one would just measure the missing tail.
const SPAN_TOLERANCE: f64 = 0.05;

pub fn run(args: &AllocateArgs) -> CliResult {
    if !(args.bandwidth.is_finite() && args.bandwidth > 0.0) {
        return Err(usage(format!("--bandwidth must be positive Hz, got {}", args.bandwidth)));
    }

    let trace_a = read_pcap(&args.trace_a, args.port)?;
    let trace_b = read_pcap(&args.trace_b, args.port)?;

    let cfg = grid_for(&trace_a, &trace_b, args)?;
    let matrix_a = schedule(&trace_a, &cfg, args.direction)?;
    let matrix_b = schedule(&trace_b, &cfg, args.direction)?;
    let error_pct = allocation_error(&matrix_a, &matrix_b)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    for (matrix, stem) in [(&matrix_a, "a"), (&matrix_b, "b")] {
        export_matrix_csv(matrix, &args.out.join(format!("matrix_{stem}.csv")))?;
        export_rb_totals_csv(matrix, &args.out.join(format!("rb_totals_{stem}.csv")))?;
    }
    write_error_csv(args, &cfg, &matrix_a, error_pct, &args.out.join("error.csv"))?;

    RunManifest::new("allocate", &args.out)
        .input(&args.trace_a)
        .input(&args.trace_b)
        .write(&args.out)?;

    eprintln!(
        "e = {error_pct:.4}% over {} RBs x {} slots{}",
        matrix_a.n_rb(),
        cfg.n_slots(),
        if matrix_a.saturated() || matrix_b.saturated() {
            " (warning: grid saturated; the error partly measures queue overflow)"
        } else {
            ""
        }
    );
    Ok(())
}

/// Builds the shared grid: duration is the longer trace span rounded up to
/// a whole slot. Spans differing beyond tolerance are a configuration
/// mismatch — comparing them would conflate model error with trace length.
fn grid_for(a: &StreamTrace, b: &StreamTrace, args: &AllocateArgs) -> Result<GridConfig> {
    let span_a = span_us(a);
    let span_b = span_us(b);
    let longer = span_a.max(span_b);
    if longer == 0 {
        return Err(Error::EmptyData(
            "neither trace spans any time; nothing to schedule".into(),
        ));
    }
    let diff = span_a.abs_diff(span_b);
    if diff as f64 > SPAN_TOLERANCE * longer as f64 {
        return Err(Error::ConfigMismatch(format!(
            "trace spans differ by {:.1}% (a: {:.3} s, b: {:.3} s); regenerate with matching \
             horizons",
            100.0 * diff as f64 / longer as f64,
            span_a as f64 / 1e6,
            span_b as f64 / 1e6,
        )));
    }

    let mut cfg = GridConfig::new(args.bandwidth, args.mu, 1.0)?;
    let slot = cfg.slot_us();
    cfg.duration_s = (longer.div_ceil(slot) * slot) as f64 / 1e6;
    cfg.validate()?;
    Ok(cfg)
}

fn span_us(trace: &StreamTrace) -> u64 {
    match (trace.packets.first(), trace.packets.last()) {
        (Some(first), Some(last)) => last.timestamp_us - first.timestamp_us,
        _ => 0,
    }
}

fn write_error_csv(
    args: &AllocateArgs,
    cfg: &GridConfig,
    matrix_a: &AllocationMatrix,
    error_pct: f64,
    path: &Path,
) -> Result<()> {
    let text = format!(
        "trace_a,trace_b,bandwidth_hz,mu,direction,duration_s,n_rb,error_pct\n\
         {},{},{},{},{},{},{},{}\n",
        args.trace_a.display(),
        args.trace_b.display(),
        cfg.bandwidth_hz,
        cfg.mu,
        args.direction,
        cfg.duration_s,
        matrix_a.n_rb(),
        error_pct,
    );
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
