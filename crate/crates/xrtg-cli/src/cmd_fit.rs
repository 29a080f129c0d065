//! `xrtg fit`: frame metrics → fitted stream model + KS ranking table.
//!
//! The nine possible fits (three metric arrays × up to three families) are
//! independent, so `--jobs` spreads them across threads. Each array keeps
//! its full ranking (ascending KS); the winners assemble the saved model.

use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use xrtg::dist::{fit_mle, DistModel, EmpiricalSample, Family, Units};
use xrtg::error::{Error, Result};
use xrtg::ingest::{import_metrics, FrameMetrics};
use xrtg::modelbank::{save_model, ModelBankEntry, PacketSizePolicy, StreamModel};

use crate::manifest::RunManifest;
use crate::{usage, CliResult, FitArgs};

const ARRAYS: [(&str, Units); 3] = [
    ("frame_sizes", Units::Bytes),
    ("inter_frame_intervals", Units::Seconds),
    ("inter_packet_intervals", Units::Seconds),
];

pub fn run(args: &FitArgs, jobs: usize) -> CliResult {
    if args.families.is_empty() {
        return Err(usage("--families needs at least one candidate family"));
    }
    let metrics = import_metrics(&args.metrics_file)?;
    if metrics.inter_frame_intervals.is_empty() {
        return Err(Error::EmptyData(
            "metrics contain no inter-frame intervals; cannot derive a frame rate".into(),
        )
        .into());
    }

    // Frame rate from the data itself: the reciprocal mean pacing interval.
    let mean_gap = metrics.inter_frame_intervals.iter().sum::<f64>()
        / metrics.inter_frame_intervals.len() as f64;
    let fps = 1.0 / mean_gap;
    let stream_id = args
        .metrics_file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stream".to_string());

    let rankings = fit_all(&metrics, &args.families, jobs)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let ranking_path = args.out.join("ranking.csv");
    write_ranking_csv(&rankings, &ranking_path)?;

    let entry = assemble_model(&metrics, &rankings, &stream_id, fps)?;
    let model_path = args.out.join("model.toml");
    save_model(&entry, &model_path)?;

    RunManifest::new("fit", &args.out)
        .input(&args.metrics_file)
        .model_id(&stream_id)
        .write(&args.out)?;

    for (name, ranked) in &rankings {
        let best = &ranked[0];
        eprintln!(
            "{name}: best {} (KS {:.4})",
            best.family,
            best.ks.unwrap_or(f64::NAN)
        );
    }
    eprintln!("wrote {} + {}", model_path.display(), ranking_path.display());
    Ok(())
}

type Ranking = Vec<(&'static str, Vec<DistModel>)>;

/// Runs every (array, family) fit on up to `jobs` threads and ranks each
/// array's results ascending by KS, failures last.
fn fit_all(metrics: &FrameMetrics, families: &[Family], jobs: usize) -> Result<Ranking> {
    let arrays: [&[f64]; 3] = [
        &metrics.frame_sizes,
        &metrics.inter_frame_intervals,
        &metrics.inter_packet_intervals,
    ];
    let samples: Vec<(usize, EmpiricalSample)> = ARRAYS
        .iter()
        .enumerate()
        .map(|(i, &(name, units))| {
            let sample = EmpiricalSample::new(arrays[i].to_vec(), units).map_err(|e| match e {
                Error::EmptyData(m) => Error::EmptyData(format!("{name}: {m}")),
                other => Error::FitFailure(format!("{name}: {other}")),
            })?;
            Ok((i, sample))
        })
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, Family)> = samples
        .iter()
        .flat_map(|&(i, _)| families.iter().map(move |&f| (i, f)))
        .collect();
    let next = Mutex::new(0usize);
    let done: Mutex<Vec<(usize, DistModel, Option<Error>)>> = Mutex::new(Vec::new());

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let idx = {
                    let mut n = next.lock().expect("task counter");
                    let idx = *n;
                    *n += 1;
                    idx
                };
                let Some(&(array_idx, family)) = tasks.get(idx) else { break };
                let sample = &samples[array_idx].1;
                let (model, err) = match fit_mle(sample, family) {
                    Ok(m) => (m, None),
                    Err(e) => (DistModel::failed(family), Some(e)),
                };
                done.lock().expect("result sink").push((array_idx, model, err));
            });
        }
    });

    let mut fits: Vec<Vec<DistModel>> = vec![Vec::new(); ARRAYS.len()];
    let mut errs: [Option<Error>; 3] = [None, None, None];
    for (array_idx, model, err) in done.into_inner().expect("result sink") {
        if let Some(e) = err {
            errs[array_idx] = Some(e);
        }
        fits[array_idx].push(model);
    }

    let mut rankings = Vec::new();
    for (i, mut ranked) in fits.into_iter().enumerate() {
        if ranked.iter().all(DistModel::is_failed) {
            let e = errs[i].take().expect("a failure was recorded for this array");
            return Err(Error::FitFailure(format!(
                "every requested family failed on {}; last error: {e}",
                ARRAYS[i].0
            )));
        }
        ranked.sort_by(|a, b| {
            let (ka, kb) = (a.ks.unwrap_or(1.0), b.ks.unwrap_or(1.0));
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal).then(a.family.cmp(&b.family))
        });
        rankings.push((ARRAYS[i].0, ranked));
    }
    Ok(rankings)
}

/// `array,family,ks,params` rows, grouped per array, best fit first.
/// Failed fits keep their row with empty ks/params so the attempt is
/// visible.
fn write_ranking_csv(rankings: &Ranking, path: &Path) -> Result<()> {
    let mut text = String::from("array,family,ks,params\n");
    for (name, ranked) in rankings {
        for model in ranked {
            if model.is_failed() {
                text.push_str(&format!("{name},{},,\n", model.family));
            } else {
                let params =
                    model.params.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
                text.push_str(&format!(
                    "{name},{},{},{params}\n",
                    model.family,
                    model.ks.unwrap_or(f64::NAN)
                ));
            }
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

fn assemble_model(
    metrics: &FrameMetrics,
    rankings: &Ranking,
    stream_id: &str,
    fps: f64,
) -> Result<ModelBankEntry> {
    if metrics.packet_sizes.is_empty() {
        return Err(Error::EmptyData("no packet sizes to derive a size policy from".into()));
    }
    let mean_packet =
        metrics.packet_sizes.iter().sum::<f64>() / metrics.packet_sizes.len() as f64;
    let max_packet = metrics.packet_sizes.iter().fold(0.0_f64, |a, &b| a.max(b)).round() as u32;

    let best = |idx: usize| rankings[idx].1[0].clone();
    let model = StreamModel {
        stream_id: stream_id.to_string(),
        fps,
        mean_packet,
        max_packet,
        packet_size_policy: PacketSizePolicy::MaxPacket,
        frame_size_dist: best(0),
        inter_frame_dist: best(1),
        inter_packet_dist: best(2),
    };
    model.validate()?;
    Ok(ModelBankEntry { model, provenance: "fitted".to_string() })
}
