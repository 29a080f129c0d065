//! Synthetic trace generation. Frames are drawn from the model's
//! distributions, split into fixed-size packets per the active sizing
//! policy, and stamped on a start-to-start frame clock; the frame-level
//! "Norm" baseline collapses each frame into a single packet instead.

mod pcap_out;

pub use pcap_out::write_pcap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::dist::DistModel;
use crate::error::{Error, Result};
use crate::ingest::{PacketRecord, StreamTrace};
use crate::modelbank::{PacketSizePolicy, StreamModel};
use crate::Direction;

/// How long to generate: a wall-clock horizon or an exact frame count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpanSpec {
    /// Seconds; frames whose start falls inside [0, d) are generated.
    Duration(f64),
    Frames(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub span: SpanSpec,
    pub seed: u64,
    /// Overrides the model's own packet sizing when set.
    pub policy: Option<PacketSizePolicy>,
    /// Draws below the floors are pulled up to them. Sizes never go below
    /// one byte; intervals never below zero. Kept this mild on purpose:
    /// packet-count rounding already erases anything smaller than one
    /// packet, so harsher floors only bias the generated volume.
    pub size_floor: f64,
    pub interval_floor: f64,
}

impl GenConfig {
    pub fn duration(seconds: f64, seed: u64) -> Self {
        GenConfig {
            span: SpanSpec::Duration(seconds),
            seed,
            policy: None,
            size_floor: 1.0,
            interval_floor: 0.0,
        }
    }

    pub fn frames(n: u64, seed: u64) -> Self {
        GenConfig { span: SpanSpec::Frames(n), seed, policy: None, size_floor: 1.0, interval_floor: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self.span {
            SpanSpec::Duration(d) if !(d.is_finite() && d > 0.0) => {
                return Err(Error::ParamDomain(format!("duration must be > 0 s, got {d}")));
            }
            SpanSpec::Frames(0) => {
                return Err(Error::ParamDomain("frame count must be ≥ 1".into()));
            }
            _ => {}
        }
        if !(self.size_floor.is_finite() && self.size_floor >= 1.0) {
            return Err(Error::ParamDomain(format!(
                "size floor must be ≥ 1 byte, got {}",
                self.size_floor
            )));
        }
        if !(self.interval_floor.is_finite() && self.interval_floor >= 0.0) {
            return Err(Error::ParamDomain(format!(
                "interval floor must be ≥ 0 s, got {}",
                self.interval_floor
            )));
        }
        Ok(())
    }
}

/// A generated trace plus everything needed to reproduce and report on it.
#[derive(Debug, Clone)]
pub struct SyntheticTrace {
    pub trace: StreamTrace,
    pub model_id: String,
    pub seed: u64,
    /// `None` for frame-level (Norm) traces, which have no packet sizing.
    pub policy: Option<PacketSizePolicy>,
    /// Horizon covered in seconds: the requested duration, or for
    /// frame-count spans the span the drawn inter-frame gaps add up to.
    pub duration_s: f64,
    pub frames: u64,
}

impl SyntheticTrace {
    pub fn policy_label(&self) -> String {
        match self.policy {
            Some(p) => p.to_string(),
            None => "frame-level".to_string(),
        }
    }
}

/// Mean/std pairs for the frame-level baseline generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub frame_mean: f64,
    pub frame_std: f64,
    /// Seconds.
    pub inter_frame_mean: f64,
    pub inter_frame_std: f64,
}

impl NormStats {
    pub fn validate(&self) -> Result<()> {
        let ok = self.frame_mean.is_finite()
            && self.frame_mean >= 1.0
            && self.frame_std.is_finite()
            && self.frame_std >= 0.0
            && self.inter_frame_mean.is_finite()
            && self.inter_frame_mean > 0.0
            && self.inter_frame_std.is_finite()
            && self.inter_frame_std >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::ParamDomain(format!(
                "norm stats need frame_mean ≥ 1, inter_frame_mean > 0 and stds ≥ 0, got {self:?}"
            )))
        }
    }

    /// Moment-matches a model's frame and pacing distributions.
    pub fn from_model(model: &StreamModel) -> Result<Self> {
        model.validate()?;
        let s = NormStats {
            frame_mean: model.frame_size_dist.mean(),
            frame_std: model.frame_size_dist.variance().sqrt(),
            inter_frame_mean: model.inter_frame_dist.mean(),
            inter_frame_std: model.inter_frame_dist.variance().sqrt(),
        };
        s.validate()?;
        Ok(s)
    }
}

const REJECTION_CAP: u32 = 1_000_000;
const MAX_PACKETS_PER_FRAME: u64 = 10_000_000;
const MAX_TOTAL_PACKETS: usize = 100_000_000;

fn draw_clamped<R: Rng + ?Sized>(dist: &DistModel, floor: f64, rng: &mut R) -> f64 {
    dist.draw(rng).max(floor)
}

/// Rejection-truncated Normal draw; a point mass handles std = 0.
fn draw_norm_truncated<R: Rng + ?Sized>(
    mean: f64,
    std: f64,
    floor: f64,
    rng: &mut R,
) -> Result<f64> {
    for _ in 0..REJECTION_CAP {
        let x = if std == 0.0 {
            mean
        } else {
            let z: f64 = rng.sample(StandardNormal);
            mean + std * z
        };
        if x >= floor {
            return Ok(x);
        }
        if std == 0.0 {
            break;
        }
    }
    Err(Error::DegenerateModel(format!(
        "normal({mean}, {std}) cannot reach floor {floor} (gave up after {REJECTION_CAP} draws)"
    )))
}

fn done(span: SpanSpec, frames: u64, t_frame_us: f64) -> bool {
    match span {
        SpanSpec::Frames(n) => frames >= n,
        SpanSpec::Duration(d) => t_frame_us >= d * 1e6,
    }
}

/// Draws frames from the model, splits each into `max(1, round(size/s_ip))`
/// packets of exactly `s_ip` bytes, spaces the packets with inter-packet
/// draws, and advances the frame clock start-to-start by one inter-frame
/// draw (never behind the frame's own last packet).
pub fn generate(model: &StreamModel, cfg: &GenConfig) -> Result<SyntheticTrace> {
    model.validate()?;
    cfg.validate()?;
    let s_ip = model.resolved_packet_size(cfg.policy);
    if s_ip < 12 {
        return Err(Error::ParamDomain(format!(
            "packet size {s_ip} cannot carry the 12-byte RTP header"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut packets: Vec<PacketRecord> = Vec::new();
    let mut t_frame_us = 0.0_f64; // frame clock, microseconds
    let mut frames = 0_u64;
    while !done(cfg.span, frames, t_frame_us) {
        let frame_bytes = draw_clamped(&model.frame_size_dist, cfg.size_floor, &mut rng);
        let n_ip = ((frame_bytes / s_ip as f64).round() as u64).max(1);
        if n_ip > MAX_PACKETS_PER_FRAME {
            return Err(Error::DegenerateModel(format!(
                "frame of {frame_bytes:.0} bytes splits into {n_ip} packets of {s_ip}"
            )));
        }
        let mut t = t_frame_us;
        for j in 0..n_ip {
            if j > 0 {
                t += draw_clamped(&model.inter_packet_dist, cfg.interval_floor, &mut rng) * 1e6;
            }
            packets.push(PacketRecord {
                timestamp_us: t.round() as u64,
                payload_size: s_ip,
                marker: j + 1 == n_ip,
                frame_start: j == 0,
            });
        }
        let dt_if = draw_clamped(&model.inter_frame_dist, cfg.interval_floor, &mut rng);
        // start-to-start pacing; a frame that outlasts its slot pushes the
        // clock so time never runs backwards
        t_frame_us = (t_frame_us + dt_if * 1e6).max(t);
        frames += 1;
        if packets.len() > MAX_TOTAL_PACKETS {
            return Err(Error::DegenerateModel(format!(
                "over {MAX_TOTAL_PACKETS} packets generated; span and model disagree badly"
            )));
        }
    }
    let duration_s = match cfg.span {
        SpanSpec::Duration(d) => d,
        SpanSpec::Frames(_) => t_frame_us / 1e6,
    };
    Ok(SyntheticTrace {
        trace: StreamTrace {
            packets,
            source: format!("synthetic:{}:seed{}", model.stream_id, cfg.seed),
            direction: Direction::Downlink,
        },
        model_id: model.stream_id.clone(),
        seed: cfg.seed,
        policy: Some(match cfg.policy {
            Some(p) => p,
            None => model.packet_size_policy,
        }),
        duration_s,
        frames,
    })
}

/// Frame-level baseline: normal frame sizes and pacing, the whole frame's
/// bytes in a single packet per frame.
pub fn generate_norm(stats: &NormStats, fps: f64, cfg: &GenConfig) -> Result<SyntheticTrace> {
    stats.validate()?;
    cfg.validate()?;
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::ParamDomain(format!("fps must be > 0, got {fps}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut packets: Vec<PacketRecord> = Vec::new();
    let mut t_frame_us = 0.0_f64;
    let mut frames = 0_u64;
    while !done(cfg.span, frames, t_frame_us) {
        let frame_bytes =
            draw_norm_truncated(stats.frame_mean, stats.frame_std, cfg.size_floor, &mut rng)?;
        packets.push(PacketRecord {
            timestamp_us: t_frame_us.round() as u64,
            payload_size: frame_bytes.round() as u32,
            marker: true,
            frame_start: true,
        });
        let dt_if = draw_norm_truncated(
            stats.inter_frame_mean,
            stats.inter_frame_std,
            cfg.interval_floor,
            &mut rng,
        )?;
        t_frame_us += dt_if * 1e6;
        frames += 1;
        if packets.len() > MAX_TOTAL_PACKETS {
            return Err(Error::DegenerateModel(format!(
                "over {MAX_TOTAL_PACKETS} packets generated; span and stats disagree badly"
            )));
        }
    }
    let duration_s = match cfg.span {
        SpanSpec::Duration(d) => d,
        SpanSpec::Frames(_) => t_frame_us / 1e6,
    };
    Ok(SyntheticTrace {
        trace: StreamTrace {
            packets,
            source: format!("synthetic:norm@{fps}fps:seed{}", cfg.seed),
            direction: Direction::Downlink,
        },
        model_id: format!("norm@{fps}fps"),
        seed: cfg.seed,
        policy: None,
        duration_s,
        frames,
    })
}

/// Mean generated rate and, when a reference is given, the percentage gap.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ThroughputReport {
    /// Payload bits (headers excluded) per second of packet span, in Mbps.
    pub mean_mbps: f64,
    pub ref_mbps: Option<f64>,
    /// `100·|mean − ref| / ref`.
    pub error_pct: Option<f64>,
}

pub fn throughput_report(
    st: &SyntheticTrace,
    reference_mbps: Option<f64>,
) -> Result<ThroughputReport> {
    let packets = &st.trace.packets;
    if packets.len() < 2 {
        return Err(Error::Precondition(
            "throughput needs at least two packets spanning time".into(),
        ));
    }
    let span_us = packets[packets.len() - 1].timestamp_us - packets[0].timestamp_us;
    if span_us == 0 {
        return Err(Error::Precondition("all packets share one timestamp; no span".into()));
    }
    let bits: u64 = packets.iter().map(|p| p.payload_size as u64 * 8).sum();
    let mean_mbps = bits as f64 / (span_us as f64 / 1e6) / 1e6;
    let error_pct = match reference_mbps {
        Some(r) if !(r.is_finite() && r > 0.0) => {
            return Err(Error::ParamDomain(format!("reference must be > 0 Mbps, got {r}")));
        }
        Some(r) => Some(100.0 * (mean_mbps - r).abs() / r),
        None => None,
    };
    Ok(ThroughputReport { mean_mbps, ref_mbps: reference_mbps, error_pct })
}
