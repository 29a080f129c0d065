//! `xrtg generate`: stream model → synthetic trace → PCAP + throughput
//! report.

use std::io::Write;
use std::net::Ipv4Addr;
use std::path::Path;

use xrtg::error::{Error, Result};
use xrtg::modelbank::{builtin, captured_mbps, load_model, ModelBankEntry};
use xrtg::tracegen::{generate, write_pcap, GenConfig, SpanSpec, SyntheticTrace};

use crate::manifest::RunManifest;
use crate::{usage, CliResult, GenerateArgs, DEFAULT_RTP_PORT};

/// Synthetic traces address a fixed private destination; the payload is
/// what matters, not the endpoints.
const DEST_ADDR: Ipv4Addr = Ipv4Addr::new(10, 0, 0, 2);

pub fn run(args: &GenerateArgs) -> CliResult {
    let (entry, reference) = load_source(args)?;

    if !args.no_ks_warning {
        warn_on_poor_fits(&entry);
    }

    let span = match (args.duration, args.frames) {
        (Some(d), None) => SpanSpec::Duration(d),
        (None, Some(n)) => SpanSpec::Frames(n),
        _ => unreachable!("clap enforces exactly one span flag"),
    };
    if let SpanSpec::Duration(d) = span {
        if !(d.is_finite() && d > 0.0) {
            return Err(usage(format!("--duration must be positive seconds, got {d}")));
        }
    }
    if span == SpanSpec::Frames(0) {
        return Err(usage("--frames must be at least 1"));
    }

    let mut cfg = GenConfig { span, ..GenConfig::duration(1.0, args.seed) };
    cfg.policy = args.policy;
    let st = generate(&entry.model, &cfg)?;

    let out_dir = manifest_dir(args)?;
    for output in [&args.pcap_out, &args.report].into_iter().flatten() {
        if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    if let Some(pcap_path) = &args.pcap_out {
        write_pcap(&st, pcap_path, DEFAULT_RTP_PORT, DEST_ADDR)?;
        eprintln!(
            "wrote {} ({} packets, {} frames, {:.3} s)",
            pcap_path.display(),
            st.trace.packets.len(),
            st.frames,
            st.duration_s
        );
    }
    if let Some(report_path) = &args.report {
        write_report_csv(&st, reference, report_path)?;
        eprintln!("wrote {}", report_path.display());
    }

    let mut manifest = RunManifest::new("generate", &out_dir)
        .model_id(&entry.model.stream_id)
        .seed(args.seed);
    if let Some(path) = &args.model {
        manifest = manifest.input(path);
    }
    manifest.write(&out_dir)?;
    Ok(())
}

/// Resolves --builtin/--model into a model plus, for builtins, the
/// captured reference rate for the report's error column.
fn load_source(args: &GenerateArgs) -> Result<(ModelBankEntry, Option<f64>)> {
    match (&args.builtin, &args.model) {
        (Some(id), None) => Ok((builtin(id)?, captured_mbps(id))),
        (None, Some(path)) => Ok((load_model(path)?, None)),
        _ => unreachable!("clap enforces exactly one model source"),
    }
}

fn warn_on_poor_fits(entry: &ModelBankEntry) {
    let dists = [
        ("frame sizes", &entry.model.frame_size_dist),
        ("inter-frame intervals", &entry.model.inter_frame_dist),
        ("inter-packet intervals", &entry.model.inter_packet_dist),
    ];
    for (what, dist) in dists {
        if let Some(ks) = dist.ks {
            if ks > 0.1 {
                eprintln!(
                    "warning: {} fit for {what} scored KS {ks:.3} (> 0.1); \
                     the synthetic trace may not resemble the capture \
                     (--no-ks-warning silences this)",
                    entry.model.stream_id
                );
            }
        }
    }
}

/// The report directory doubles as the manifest directory: the PCAP's
/// parent when one is written, otherwise the report's.
fn manifest_dir(args: &GenerateArgs) -> Result<std::path::PathBuf> {
    let primary = args.pcap_out.as_ref().or(args.report.as_ref());
    let path = primary.expect("clap requires at least one output");
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    Ok(dir.to_path_buf())
}

fn write_report_csv(st: &SyntheticTrace, reference: Option<f64>, path: &Path) -> Result<()> {
    let report = xrtg::tracegen::throughput_report(st, reference)?;
    let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let text = format!(
        "stream_id,policy,seed,duration_s,mean_mbps,ref_mbps,error_pct\n{},{},{},{},{},{},{}\n",
        st.model_id,
        st.policy_label(),
        st.seed,
        st.duration_s,
        report.mean_mbps,
        fmt_opt(report.ref_mbps),
        fmt_opt(report.error_pct),
    );
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
