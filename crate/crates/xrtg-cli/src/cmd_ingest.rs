//! `xrtg ingest`: PCAP → frame metrics + summary statistics.

use std::io::Write;
use std::path::Path;

use xrtg::error::{Error, Result};
use xrtg::ingest::{
    compute_metrics, export_metrics, mark_frames, read_pcap, summarize, ArrayStats, FrameMetrics,
};

use crate::manifest::RunManifest;
use crate::{usage, CliResult, IngestArgs};

pub fn run(args: &IngestArgs) -> CliResult {
    if !(args.gap_threshold.is_finite() && args.gap_threshold > 0.0) {
        return Err(usage(format!(
            "--gap-threshold must be a positive number of seconds, got {}",
            args.gap_threshold
        )));
    }

    let trace = read_pcap(&args.pcap, args.port)?;
    let trace = mark_frames(trace, args.gap_threshold)?;
    let metrics = compute_metrics(&trace)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let metrics_path = args.out.join("metrics.bin");
    export_metrics(&metrics, &metrics_path)?;
    let stats_path = args.out.join("stats.csv");
    write_stats_csv(&metrics, &stats_path)?;

    RunManifest::new("ingest", &args.out).input(&args.pcap).write(&args.out)?;

    eprintln!(
        "{}: {} packets, {} frames -> {} + {}",
        args.pcap.display(),
        trace.packets.len(),
        metrics.frame_sizes.len(),
        metrics_path.display(),
        stats_path.display()
    );
    Ok(())
}

/// One row per metric array: count, mean, population std dev, p95.
fn write_stats_csv(metrics: &FrameMetrics, path: &Path) -> Result<()> {
    let summary = summarize(metrics);
    let mut rows = String::from("array,count,mean,std_dev,p95\n");
    let mut push = |name: &str, values: &[f64], stats: &Option<ArrayStats>| match stats {
        Some(s) => {
            rows.push_str(&format!(
                "{name},{},{},{},{}\n",
                values.len(),
                s.mean,
                s.std_dev,
                s.p95
            ));
        }
        None => rows.push_str(&format!("{name},0,,,\n")),
    };
    push("frame_sizes", &metrics.frame_sizes, &summary.frame_sizes);
    push("inter_frame_intervals", &metrics.inter_frame_intervals, &summary.inter_frame_intervals);
    push(
        "inter_packet_intervals",
        &metrics.inter_packet_intervals,
        &summary.inter_packet_intervals,
    );
    push("packet_sizes", &metrics.packet_sizes, &summary.packet_sizes);

    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(rows.as_bytes()).map_err(|e| Error::io(path, e))
}
