//! Capture ingestion: recover RTP frames from a UDP packet stream and
//! reduce them to the four metric arrays everything downstream consumes
//! (frame sizes, inter-frame intervals, intra-frame inter-packet intervals,
//! packet sizes).

mod metrics_io;
mod pcap;

pub use metrics_io::{export_metrics, import_metrics};
pub use pcap::read_pcap;

use crate::error::{Error, Result};
use crate::Direction;

/// One UDP packet of the stream. Timestamps are integer microseconds since
/// the capture epoch — float drift over 10-minute traces is not acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketRecord {
    pub timestamp_us: u64,
    /// UDP payload bytes. ≤ 65535 for anything read from the wire; synthetic
    /// frame-level records (the Norm baseline) may exceed it and get chunked
    /// at PCAP-write time.
    pub payload_size: u32,
    /// RTP marker bit as captured (or as synthesized).
    pub marker: bool,
    /// Set by [`mark_frames`]; first packet of each RTP frame.
    pub frame_start: bool,
}

impl PacketRecord {
    pub fn timestamp_seconds(&self) -> f64 {
        self.timestamp_us as f64 / 1e6
    }
}

/// An ordered packet stream plus provenance.
#[derive(Debug, Clone)]
pub struct StreamTrace {
    pub packets: Vec<PacketRecord>,
    pub source: String,
    pub direction: Direction,
}

/// The four per-stream metric arrays. Intervals are seconds, sizes bytes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMetrics {
    /// One entry per RTP frame: sum of its packets' payloads.
    pub frame_sizes: Vec<f64>,
    /// Start-to-start spacing of consecutive frames; length = frames − 1.
    pub inter_frame_intervals: Vec<f64>,
    /// Consecutive gaps strictly inside a frame, pooled across frames;
    /// length = packets − frames.
    pub inter_packet_intervals: Vec<f64>,
    /// Every packet's payload size.
    pub packet_sizes: Vec<f64>,
}

/// mean / population std-dev / nearest-rank 95th percentile of one array.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ArrayStats {
    pub mean: f64,
    pub std_dev: f64,
    pub p95: f64,
}

/// Summary per metric array; `None` where the array was empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub frame_sizes: Option<ArrayStats>,
    pub inter_frame_intervals: Option<ArrayStats>,
    pub inter_packet_intervals: Option<ArrayStats>,
    pub packet_sizes: Option<ArrayStats>,
}

/// Flags the first packet of every RTP frame: packet i starts a frame iff
/// i = 0, packet i−1 carried the marker bit, or the timestamp gap to packet
/// i−1 exceeds `gap_threshold` (seconds, strictly greater). Idempotent.
pub fn mark_frames(mut trace: StreamTrace, gap_threshold: f64) -> Result<StreamTrace> {
    if !(gap_threshold > 0.0 && gap_threshold.is_finite()) {
        return Err(Error::ParamDomain(format!(
            "gap_threshold must be positive and finite, got {gap_threshold}"
        )));
    }
    if trace.packets.is_empty() {
        return Err(Error::EmptyData("cannot mark frames on an empty trace".into()));
    }
    let threshold_us = (gap_threshold * 1e6).round() as u64;
    trace.packets[0].frame_start = true;
    for i in 1..trace.packets.len() {
        let gap = trace.packets[i].timestamp_us - trace.packets[i - 1].timestamp_us;
        trace.packets[i].frame_start = trace.packets[i - 1].marker || gap > threshold_us;
    }
    Ok(trace)
}

/// Reduces a frame-marked trace to the four metric arrays.
pub fn compute_metrics(trace: &StreamTrace) -> Result<FrameMetrics> {
    if trace.packets.is_empty() {
        return Err(Error::EmptyData("empty trace".into()));
    }
    if !trace.packets[0].frame_start {
        return Err(Error::Precondition(
            "compute_metrics requires mark_frames to have run (first packet unflagged)".into(),
        ));
    }
    let mut m = FrameMetrics::default();
    let mut frame_bytes = 0u64;
    let mut frame_start_us = 0u64;
    for (i, p) in trace.packets.iter().enumerate() {
        m.packet_sizes.push(p.payload_size as f64);
        if p.frame_start {
            if i > 0 {
                m.frame_sizes.push(frame_bytes as f64);
                m.inter_frame_intervals.push((p.timestamp_us - frame_start_us) as f64 / 1e6);
            }
            frame_bytes = p.payload_size as u64;
            frame_start_us = p.timestamp_us;
        } else {
            frame_bytes += p.payload_size as u64;
            let gap = p.timestamp_us - trace.packets[i - 1].timestamp_us;
            m.inter_packet_intervals.push(gap as f64 / 1e6);
        }
    }
    m.frame_sizes.push(frame_bytes as f64);
    debug_assert_eq!(
        m.inter_packet_intervals.len() + m.frame_sizes.len(),
        trace.packets.len()
    );
    Ok(m)
}

/// mean, population standard deviation and nearest-rank p95 per array.
pub fn summarize(metrics: &FrameMetrics) -> SummaryStats {
    SummaryStats {
        frame_sizes: array_stats(&metrics.frame_sizes),
        inter_frame_intervals: array_stats(&metrics.inter_frame_intervals),
        inter_packet_intervals: array_stats(&metrics.inter_packet_intervals),
        packet_sizes: array_stats(&metrics.packet_sizes),
    }
}

fn array_stats(xs: &[f64]) -> Option<ArrayStats> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = (0.95 * n).ceil() as usize; // nearest-rank: 1-based
    let p95 = sorted[rank.max(1) - 1];
    Some(ArrayStats { mean, std_dev: var.sqrt(), p95 })
}
