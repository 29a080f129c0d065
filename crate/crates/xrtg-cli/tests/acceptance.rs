//! Acceptance gate: eight independent checks covering the whole pipeline,
//! one printed PASS/FAIL line each (run with `--nocapture` to see the
//! lines for passing checks too).
//!
//! Two kinds of reference data anchor these tests: the builtin models'
//! distribution parameters, and summary statistics measured on the
//! original captures those models were fitted to. Checks 2 is KNOWN RED —
//! see its comment; it fails honestly rather than widening its gate.

use std::net::Ipv4Addr;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use xrtg::dist::{
    fit_mle, jsu_cdf, jsu_mean, jsu_pdf, jsu_quantile, jsu_sample, ks_statistic, DistModel,
    EmpiricalSample, Family, JohnsonSUParams, Units,
};
use xrtg::ingest::{compute_metrics, mark_frames, read_pcap, summarize, ArrayStats};
use xrtg::modelbank::{builtin, builtin_ids, captured_mbps, PacketSizePolicy};
use xrtg::rangrid::{allocation_error, schedule, GridConfig, TddPattern};
use xrtg::tracegen::{generate, generate_norm, throughput_report, write_pcap, GenConfig, NormStats};
use xrtg::Direction;

/// Mean frame size (bytes) measured on each builtin's source capture.
const REF_FRAME_MEANS: [(&str, f64); 8] = [
    ("stream1-low", 34602.44),
    ("stream1-med", 86149.87),
    ("stream1-high", 232084.33),
    ("stream2-72", 207968.42),
    ("stream2-90", 163548.89),
    ("stream3-low", 4968.50),
    ("stream3-med", 8273.98),
    ("stream3-high", 24378.90),
];

fn verdict(n: u32, name: &str, ok: bool, detail: &str) {
    println!("criterion {n} ({name}): {} — {detail}", if ok { "PASS" } else { "FAIL" });
}

fn budget(n: u32, started: Instant, limit_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "criterion {n} exceeded its {limit_s} s budget ({elapsed:.1} s)"
    );
}

fn all_jsu_sets() -> Vec<(String, JohnsonSUParams)> {
    let mut sets = Vec::new();
    for id in builtin_ids() {
        let m = builtin(id).unwrap().model;
        for (what, dist) in [
            ("frame", &m.frame_size_dist),
            ("inter_frame", &m.inter_frame_dist),
            ("inter_packet", &m.inter_packet_dist),
        ] {
            sets.push((format!("{id}/{what}"), dist.as_jsu().unwrap()));
        }
    }
    sets
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    debug_assert!(panels % 2 == 0);
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn criterion_1_distribution_correctness() {
    let t0 = Instant::now();
    let sets = all_jsu_sets();
    let mut worst_mass = 0.0_f64;
    let mut worst_round = 0.0_f64;
    let mut worst_ks = 0.0_f64;
    let mut failures = Vec::new();

    for (i, (name, p)) in sets.iter().enumerate() {
        // density mass over quantile-placed buckets: dyadic spacing in the
        // tails (a tail bucket spans a bounded x-ratio, which Simpson
        // resolves; equal-probability buckets there would stretch over
        // decades of x), linear spacing through the body. The quantiles only
        // place breakpoints — the integral itself is plain Simpson in x.
        const EPS: f64 = 1e-10;
        let mut breaks = vec![EPS];
        let mut q = EPS;
        while q < 1.0 / 64.0 {
            q *= 2.0;
            breaks.push(q);
        }
        let body_start = *breaks.last().unwrap();
        for j in 1..=256 {
            breaks.push(body_start + (1.0 - 2.0 * body_start) * j as f64 / 256.0);
        }
        let cutoff = *breaks.last().unwrap();
        let tail: Vec<f64> = breaks.iter().rev().map(|b| 1.0 - b).collect();
        breaks.extend(tail.into_iter().filter(|&b| b > cutoff));

        let mut mass = 0.0;
        let mut lo = jsu_quantile(breaks[0], p).unwrap();
        for &q in &breaks[1..] {
            let hi = jsu_quantile(q.min(1.0 - EPS), p).unwrap();
            mass += simpson(|x| jsu_pdf(x, p), lo, hi, 64);
            lo = hi;
        }
        let mass_err = (mass + 2.0 * EPS - 1.0).abs();
        worst_mass = worst_mass.max(mass_err);
        if mass_err > 1e-6 {
            failures.push(format!("{name}: density mass off by {mass_err:.2e}"));
        }

        // cdf∘quantile round-trip across the support, tails included
        let mut qs: Vec<f64> = (0..=400).map(|k| 10f64.powf(-9.0 + 8.7 * k as f64 / 400.0)).collect();
        let mirrored: Vec<f64> = qs.iter().map(|q| 1.0 - q).collect();
        qs.extend(mirrored);
        qs.push(0.5);
        let round = qs
            .iter()
            .map(|&q| (jsu_cdf(jsu_quantile(q, p).unwrap(), p) - q).abs())
            .fold(0.0_f64, f64::max);
        worst_round = worst_round.max(round);
        if round > 1e-9 {
            failures.push(format!("{name}: cdf/quantile round-trip off by {round:.2e}"));
        }

        // concentration: the empirical CDF of 200k self-draws stays within
        // the 0.005 band (violation odds ~1e-4 per the DKW inequality)
        let mut rng = ChaCha12Rng::seed_from_u64(100 + i as u64);
        let draws = jsu_sample(200_000, p, &mut rng);
        let sample = EmpiricalSample::new(draws, Units::Bytes).unwrap();
        let model =
            DistModel::johnson_su(p.location(), p.scale(), p.shape_a(), p.shape_b()).unwrap();
        let ks = ks_statistic(&sample, &model);
        worst_ks = worst_ks.max(ks);
        if ks >= 0.005 {
            failures.push(format!("{name}: self-draw KS {ks:.4}"));
        }
    }

    let ok = failures.is_empty();
    verdict(
        1,
        "distribution correctness",
        ok,
        &format!(
            "{} parameter sets; worst density-mass error {worst_mass:.1e}, worst round-trip \
             {worst_round:.1e}, worst self-draw KS {worst_ks:.4} (in {:.1} s)",
            sets.len(),
            t0.elapsed().as_secs_f64()
        ),
    );
    budget(1, t0, 60.0);
    assert!(ok, "distribution correctness failures: {failures:?}");
}

// KNOWN RED: stream2-72's fitted frame-size mean integrates 3.25% below the
// mean measured on its capture — outside this check's 3% gate. Both numbers
// are fixed reference inputs; the other seven conditions sit within 2.6%.
// The discrepancy is reported, not patched away.
#[test]
fn criterion_2_builtin_means_match_capture_stats() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for (id, ref_mean) in REF_FRAME_MEANS {
        let p = builtin(id).unwrap().model.frame_size_dist.as_jsu().unwrap();
        let err = 100.0 * (jsu_mean(&p) / ref_mean - 1.0);
        worst = worst.max(err.abs());
        if err.abs() > 3.0 {
            failures.push(format!("{id}: closed-form mean {err:+.2}% from captured mean"));
        }
    }
    let ok = failures.is_empty();
    verdict(
        2,
        "model means vs capture stats",
        ok,
        &format!("worst |error| {worst:.2}% against the 3% gate"),
    );
    budget(2, t0, 1.0);
    assert!(ok, "builtin mean deviations: {failures:?}");
}

#[test]
fn criterion_3_captured_rates_reproduced_at_600s() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let mut seed = 3000;
    for id in builtin_ids() {
        let model = builtin(id).unwrap().model;
        let reference = captured_mbps(id).expect("every builtin has a captured rate");
        for policy in [PacketSizePolicy::MaxPacket, PacketSizePolicy::MeanPacket] {
            seed += 1;
            let mut cfg = GenConfig::duration(600.0, seed);
            cfg.policy = Some(policy);
            let st = generate(&model, &cfg).unwrap();
            let report = throughput_report(&st, Some(reference)).unwrap();
            let err = report.error_pct.unwrap();
            worst = worst.max(err);
            if err > 2.0 {
                failures.push(format!(
                    "{id}/{policy}: {:.2} vs {reference} Mbps ({err:.2}%)",
                    report.mean_mbps
                ));
            }
        }
    }
    let ok = failures.is_empty();
    verdict(
        3,
        "600 s throughput vs captured rates",
        ok,
        &format!(
            "16 model/policy cells within 2% (worst {worst:.2}%, in {:.1} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
    budget(3, t0, 120.0);
    assert!(ok, "throughput deviations: {failures:?}");
}

#[test]
fn criterion_4_generator_ingest_closed_loop() {
    let t0 = Instant::now();
    let model = builtin("stream3-low").unwrap().model;
    let st = generate(&model, &GenConfig::frames(30_000, 4001)).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let pcap_path = dir.path().join("loop.pcap");
    write_pcap(&st, &pcap_path, 5004, Ipv4Addr::new(10, 0, 0, 2)).unwrap();
    let trace = read_pcap(&pcap_path, 5004).unwrap();
    // markers are exact in synthetic traces; the wide threshold keeps frame
    // splitting marker-driven (fitted gap tails can exceed any tight cutoff)
    let trace = mark_frames(trace, 1.0).unwrap();
    let metrics = compute_metrics(&trace).unwrap();

    let frames = metrics.frame_sizes.len();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let size_err =
        100.0 * (mean(&metrics.frame_sizes) / model.frame_size_dist.mean() - 1.0).abs();
    let gap_err = 100.0
        * (mean(&metrics.inter_frame_intervals) / model.inter_frame_dist.mean() - 1.0).abs();

    let ok = frames == 30_000 && size_err < 1.0 && gap_err < 1.0;
    verdict(
        4,
        "generate→pcap→ingest closed loop",
        ok,
        &format!(
            "{frames}/30000 frames, mean frame size off {size_err:.3}%, mean pacing off \
             {gap_err:.3}% (in {:.1} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
    budget(4, t0, 60.0);
    assert!(ok, "closed loop drifted: {frames} frames, {size_err:.3}% / {gap_err:.3}%");
}

#[test]
fn criterion_5_mle_recovery_from_synthetic_frames() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut worst_mean = 0.0_f64;
    let mut worst_dist = 0.0_f64;
    for (i, id) in builtin_ids().into_iter().enumerate() {
        let gen = builtin(id).unwrap().model.frame_size_dist.as_jsu().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5000 + i as u64);
        let draws = jsu_sample(100_000, &gen, &mut rng);
        let sample = EmpiricalSample::new(draws, Units::Bytes).unwrap();
        let refit = fit_mle(&sample, Family::JohnsonSU).unwrap();

        let mean_err = 100.0 * (refit.mean() / jsu_mean(&gen) - 1.0).abs();
        worst_mean = worst_mean.max(mean_err);

        // sup CDF distance between refit and generator over a dense
        // quantile grid of the generator
        let refit_p = refit.as_jsu().unwrap();
        let dist = (1..2000)
            .map(|k| {
                let q = k as f64 / 2000.0;
                let x = jsu_quantile(q, &gen).unwrap();
                (jsu_cdf(x, &refit_p) - q).abs()
            })
            .fold(0.0_f64, f64::max);
        worst_dist = worst_dist.max(dist);

        if mean_err > 2.0 || dist >= 0.02 {
            failures.push(format!("{id}: mean off {mean_err:.2}%, model distance {dist:.4}"));
        }
    }
    let ok = failures.is_empty();
    verdict(
        5,
        "MLE recovery on 100k synthetic frames",
        ok,
        &format!(
            "worst mean error {worst_mean:.2}% (gate 2%), worst refit-vs-generator distance \
             {worst_dist:.4} (gate 0.02) (in {:.1} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
    budget(5, t0, 120.0);
    assert!(ok, "MLE recovery failures: {failures:?}");
}

#[test]
fn criterion_6_norm_baseline_loses_and_gap_grows_with_bandwidth() {
    let t0 = Instant::now();
    const DURATION: f64 = 40.0;
    const GRID_SPAN: f64 = 40.5; // headroom for frames finishing past the horizon
    const REF_SEED: u64 = 99;
    let seeds = [1u64, 2, 3, 4, 5];
    let bandwidths = [200e6, 400e6, 800e6];

    // mixed workload: one uplink and one downlink stream on the same grid
    let legs = [
        (Direction::Uplink, builtin("stream1-med").unwrap().model),
        (Direction::Downlink, builtin("stream3-med").unwrap().model),
    ];

    let mut gaps = Vec::new();
    let mut verdict_ok = true;
    let mut lines = Vec::new();
    for &bw in &bandwidths {
        let cfg = GridConfig {
            bandwidth_hz: bw,
            mu: 3,
            tdd: TddPattern::default(),
            bits_per_rb: 2016,
            duration_s: GRID_SPAN,
        };
        let mut err_model = 0.0; // candidate drawn from the full fitted model
        let mut err_norm = 0.0; // candidate from the mean/std-only baseline
        for (direction, model) in &legs {
            let reference = generate(model, &GenConfig::duration(DURATION, REF_SEED)).unwrap();
            let ref_matrix = schedule(&reference.trace, &cfg, *direction).unwrap();
            let stats = NormStats::from_model(model).unwrap();
            for &seed in &seeds {
                let jsu = generate(model, &GenConfig::duration(DURATION, seed)).unwrap();
                let norm =
                    generate_norm(&stats, model.fps, &GenConfig::duration(DURATION, seed))
                        .unwrap();
                let jsu_m = schedule(&jsu.trace, &cfg, *direction).unwrap();
                let norm_m = schedule(&norm.trace, &cfg, *direction).unwrap();
                err_model += allocation_error(&ref_matrix, &jsu_m).unwrap();
                err_norm += allocation_error(&ref_matrix, &norm_m).unwrap();
            }
        }
        let n = (seeds.len() * legs.len()) as f64;
        let (e_model, e_norm) = (err_model / n, err_norm / n);
        verdict_ok &= e_norm > e_model;
        gaps.push(e_norm - e_model);
        lines.push(format!(
            "{:.0} MHz: e(norm) {e_norm:.2}% vs e(model) {e_model:.2}%",
            bw / 1e6
        ));
    }
    let monotone = gaps.windows(2).all(|w| w[1] >= w[0]);
    let ok = verdict_ok && monotone;
    verdict(
        6,
        "grid error ordering and growth",
        ok,
        &format!(
            "{}; gaps {:.2} → {:.2} → {:.2} pp (in {:.1} s)",
            lines.join("; "),
            gaps[0],
            gaps[1],
            gaps[2],
            t0.elapsed().as_secs_f64()
        ),
    );
    budget(6, t0, 300.0);
    assert!(ok, "ordering/monotonicity violated: {lines:?}, gaps {gaps:?}");
}

/// Reference summary statistics for the original captures, used by the
/// dataset-gated check: (mean, population std, p95) per metric array.
/// Intervals are in seconds, sizes in bytes.
struct RefRow {
    frame: (f64, f64, f64),
    inter_frame: (f64, f64, f64),
    inter_packet: (f64, f64, f64),
    packet: (f64, f64, f64),
}

fn ref_row(id: &str) -> Option<RefRow> {
    let ms = 1e-3;
    let us = 1e-6;
    let row = match id {
        "stream1-low" => RefRow {
            frame: (34602.44, 9529.36, 55735.0),
            inter_frame: (16.76 * ms, 0.26 * ms, 17.12 * ms),
            inter_packet: (3.94 * us, 6.08 * us, 17.10 * us),
            packet: (1280.79, 356.58, 1428.0),
        },
        "stream1-med" => RefRow {
            frame: (86149.87, 19936.04, 132384.0),
            inter_frame: (16.76 * ms, 0.50 * ms, 17.53 * ms),
            inter_packet: (3.53 * us, 5.47 * us, 17.27 * us),
            packet: (1364.81, 244.83, 1428.0),
        },
        "stream1-high" => RefRow {
            frame: (232084.33, 28141.99, 269008.0),
            inter_frame: (16.80 * ms, 2.57 * ms, 21.29 * ms),
            inter_packet: (4.55 * us, 11.02 * us, 6.43 * us),
            packet: (1403.88, 154.31, 1428.0),
        },
        "stream2-72" => RefRow {
            frame: (207968.42, 122929.70, 396402.0),
            inter_frame: (13.88 * ms, 0.05 * ms, 13.94 * ms),
            inter_packet: (3.41 * us, 9.18 * us, 4.85 * us),
            packet: (1400.04, 171.38, 1428.0),
        },
        "stream2-90" => RefRow {
            frame: (163548.89, 116837.86, 339396.0),
            inter_frame: (11.11 * ms, 0.04 * ms, 11.17 * ms),
            inter_packet: (3.66 * us, 9.08 * us, 6.91 * us),
            packet: (1392.66, 191.91, 1428.0),
        },
        "stream3-low" => RefRow {
            frame: (4968.50, 2175.03, 7708.0),
            inter_frame: (16.76 * ms, 0.20 * ms, 17.05 * ms),
            inter_packet: (7.01 * us, 6.17 * us, 15.04 * us),
            packet: (749.83, 517.39, 1428.0),
        },
        "stream3-med" => RefRow {
            frame: (8273.98, 3921.00, 13970.0),
            inter_frame: (16.75 * ms, 0.61 * ms, 17.77 * ms),
            inter_packet: (5.87 * us, 9.61 * us, 15.34 * us),
            packet: (933.53, 527.48, 1428.0),
        },
        "stream3-high" => RefRow {
            frame: (24378.90, 11440.59, 43458.0),
            inter_frame: (17.10 * ms, 3.30 * ms, 22.44 * ms),
            inter_packet: (7.54 * us, 24.80 * us, 24.63 * us),
            packet: (1216.27, 419.88, 1428.0),
        },
        _ => return None,
    };
    Some(row)
}

#[derive(serde::Deserialize)]
struct DatasetManifest {
    captures: Vec<DatasetCapture>,
}

#[derive(serde::Deserialize)]
struct DatasetCapture {
    id: String,
    pcap: PathBuf,
    #[serde(default = "default_port")]
    port: u16,
    #[serde(default = "default_gap_threshold")]
    gap_threshold: f64,
}

fn default_port() -> u16 {
    5004
}

fn default_gap_threshold() -> f64 {
    0.005
}

#[test]
fn criterion_7_original_captures_reproduce_reference_stats() {
    let t0 = Instant::now();
    let Some(root) = std::env::var_os("XRTG_DATASET_DIR") else {
        println!(
            "criterion 7 (capture stats round-trip): SKIP — XRTG_DATASET_DIR unset; \
             see README for the dataset.toml layout"
        );
        return;
    };
    let root = PathBuf::from(root);
    let manifest_path = root.join("dataset.toml");
    let text = std::fs::read_to_string(&manifest_path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", manifest_path.display()));
    let manifest: DatasetManifest =
        toml::from_str(&text).unwrap_or_else(|e| panic!("bad dataset.toml: {e}"));

    let mut failures = Vec::new();
    let mut checked = 0;
    for capture in &manifest.captures {
        let Some(expected) = ref_row(&capture.id) else {
            failures.push(format!("{}: not a known stream id", capture.id));
            continue;
        };
        let trace = read_pcap(root.join(&capture.pcap), capture.port).unwrap();
        let trace = mark_frames(trace, capture.gap_threshold).unwrap();
        let summary = summarize(&compute_metrics(&trace).unwrap());
        let arrays: [(&str, Option<ArrayStats>, (f64, f64, f64)); 4] = [
            ("frame_sizes", summary.frame_sizes, expected.frame),
            ("inter_frame", summary.inter_frame_intervals, expected.inter_frame),
            ("inter_packet", summary.inter_packet_intervals, expected.inter_packet),
            ("packet_sizes", summary.packet_sizes, expected.packet),
        ];
        for (what, got, (mean, std, p95)) in arrays {
            let Some(got) = got else {
                failures.push(format!("{}/{what}: empty", capture.id));
                continue;
            };
            if (got.mean / mean - 1.0).abs() > 0.005 {
                failures.push(format!("{}/{what}: mean {} vs {mean}", capture.id, got.mean));
            }
            if (got.std_dev / std - 1.0).abs() > 0.05 {
                failures.push(format!("{}/{what}: std {} vs {std}", capture.id, got.std_dev));
            }
            if what == "packet_sizes" && got.p95 != p95 {
                failures.push(format!("{}/packet p95 {} != {p95}", capture.id, got.p95));
            }
        }
        checked += 1;
    }
    let ok = failures.is_empty() && checked > 0;
    verdict(
        7,
        "capture stats round-trip",
        ok,
        &format!(
            "{checked} captures checked against reference rows (in {:.1} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
    assert!(ok, "capture stat mismatches: {failures:?}");
}

#[test]
fn criterion_8_reruns_are_byte_identical() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_xrtg");
    let dir = tempfile::tempdir().unwrap();

    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary should spawn");
        assert!(
            out.status.success(),
            "command failed: xrtg {args:?}\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let snapshot = |paths: &[PathBuf]| -> Vec<Vec<u8>> {
        paths.iter().map(|p| std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))).collect()
    };

    // "same manifest" means the same command with the same paths, so the
    // second round overwrites the first in place; outputs are snapshotted
    // between rounds.
    let base = dir.path();
    let pcap = base.join("trace.pcap");
    let report = base.join("report.csv");
    let ingest = base.join("ingest");
    let alloc = base.join("alloc");
    let run_all = || {
        run(&[
            "generate", "--builtin", "stream2-90", "--duration", "2", "--seed", "42",
            "--pcap-out", pcap.to_str().unwrap(), "--report", report.to_str().unwrap(),
        ]);
        run(&["ingest", pcap.to_str().unwrap(), "--out", ingest.to_str().unwrap()]);
        run(&[
            "allocate", "--trace-a", pcap.to_str().unwrap(), "--trace-b",
            pcap.to_str().unwrap(), "--bandwidth", "100e6", "--mu", "3", "--out",
            alloc.to_str().unwrap(),
        ]);
    };
    let files = vec![
        pcap.clone(),
        report.clone(),
        ingest.join("metrics.bin"),
        ingest.join("stats.csv"),
        alloc.join("matrix_a.csv"),
        alloc.join("matrix_b.csv"),
        alloc.join("rb_totals_a.csv"),
        alloc.join("rb_totals_b.csv"),
        alloc.join("error.csv"),
    ];
    run_all();
    let first = snapshot(&files);
    run_all();
    let second = snapshot(&files);

    let mut mismatches = Vec::new();
    let mut compared = 0;
    for (i, path) in files.iter().enumerate() {
        compared += 1;
        if first[i] != second[i] {
            mismatches.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    let ok = mismatches.is_empty();
    verdict(
        8,
        "rerun determinism",
        ok,
        &format!(
            "{compared} output files byte-identical across reruns (in {:.1} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
    assert!(ok, "outputs differed between identical runs: {mismatches:?}");
}

/// The two synthetic PCAPs used across this suite have to disagree when the
/// seeds disagree — otherwise criterion 8 would pass vacuously.
#[test]
fn different_seeds_actually_change_the_trace() {
    let model = builtin("stream2-90").unwrap().model;
    let a = generate(&model, &GenConfig::duration(1.0, 1)).unwrap();
    let b = generate(&model, &GenConfig::duration(1.0, 2)).unwrap();
    assert_ne!(a.trace.packets, b.trace.packets);
    let path_a = {
        let dir = tempfile::tempdir().unwrap();
        let pa = dir.path().join("a.pcap");
        let pb = dir.path().join("b.pcap");
        write_pcap(&a, &pa, 5004, Ipv4Addr::new(10, 0, 0, 2)).unwrap();
        write_pcap(&b, &pb, 5004, Ipv4Addr::new(10, 0, 0, 2)).unwrap();
        assert_ne!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
        pa
    };
    drop(path_a);
}

/// Sanity anchor for the reference tables themselves: every builtin id used
/// in this suite must exist, and the captured-rate lookup must cover all of
/// them.
#[test]
fn reference_tables_cover_all_builtins() {
    for id in builtin_ids() {
        assert!(builtin(id).is_ok());
        assert!(captured_mbps(id).is_some(), "{id} missing a captured rate");
        assert!(ref_row(id).is_some(), "{id} missing a reference stats row");
    }
    assert_eq!(builtin_ids().len(), 8);
    assert_eq!(REF_FRAME_MEANS.len(), 8);
}

