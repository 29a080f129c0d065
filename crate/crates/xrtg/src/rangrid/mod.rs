//! A deliberately simplified single-user 5G TDD resource grid: replay a
//! packet trace through a FIFO queue, serve it slot by slot at a fixed
//! per-resource-block capacity, log bits per (RB, slot), and compare two
//! allocations with the relative per-RB throughput error.
//!
//! Capacity is a constant per RB-slot on purpose — isolating what the
//! *traffic model* does to the grid requires the channel to stay fixed.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::StreamTrace;
use crate::Direction;

/// Alternating TDD slot pattern: each cycle is `dl` downlink slots followed
/// by `ul` uplink slots. The default 1:1 puts downlink on even slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TddPattern {
    pub dl: u32,
    pub ul: u32,
}

impl Default for TddPattern {
    fn default() -> Self {
        TddPattern { dl: 1, ul: 1 }
    }
}

impl TddPattern {
    pub const DL_ONLY: TddPattern = TddPattern { dl: 1, ul: 0 };

    pub fn validate(&self) -> Result<()> {
        if self.dl == 0 && self.ul == 0 {
            return Err(Error::ParamDomain("TDD pattern needs at least one slot".into()));
        }
        Ok(())
    }

    pub fn direction_of(&self, slot: u64) -> Direction {
        let cycle = u64::from(self.dl) + u64::from(self.ul);
        if slot % cycle < u64::from(self.dl) {
            Direction::Downlink
        } else {
            Direction::Uplink
        }
    }
}

/// Default per-RB-slot capacity: 12 subcarriers · 14 symbols · 8 bits
/// (256-QAM) · 2 layers · 0.75 coding = 2016 bits.
pub const DEFAULT_BITS_PER_RB: u64 = 2016;

const SUBCARRIERS_PER_RB: f64 = 12.0;
const BASE_SCS_HZ: f64 = 15_000.0;
const GUARD_BAND_FACTOR: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub bandwidth_hz: f64,
    /// Numerology 0..=3; slot length is 1 ms / 2^μ.
    pub mu: u8,
    pub tdd: TddPattern,
    pub bits_per_rb: u64,
    pub duration_s: f64,
}

impl GridConfig {
    pub fn new(bandwidth_hz: f64, mu: u8, duration_s: f64) -> Result<Self> {
        let cfg = GridConfig {
            bandwidth_hz,
            mu,
            tdd: TddPattern::default(),
            bits_per_rb: DEFAULT_BITS_PER_RB,
            duration_s,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu > 3 {
            return Err(Error::ParamDomain(format!("numerology must be 0..=3, got {}", self.mu)));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::ParamDomain(format!(
                "bandwidth must be > 0 Hz, got {}",
                self.bandwidth_hz
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::ParamDomain(format!(
                "grid duration must be > 0 s, got {}",
                self.duration_s
            )));
        }
        if self.bits_per_rb == 0 {
            return Err(Error::ParamDomain("bits_per_rb must be ≥ 1".into()));
        }
        self.tdd.validate()?;
        if self.n_rb() < 1 {
            return Err(Error::ParamDomain(format!(
                "{} Hz at μ={} leaves no usable resource blocks",
                self.bandwidth_hz, self.mu
            )));
        }
        Ok(())
    }

    /// Slot length in microseconds: 1000, 500, 250 or 125.
    pub fn slot_us(&self) -> u64 {
        1000 >> self.mu
    }

    /// Usable resource blocks after a 10% guard band.
    pub fn n_rb(&self) -> u64 {
        let scs = BASE_SCS_HZ * f64::from(1u32 << self.mu);
        (self.bandwidth_hz * GUARD_BAND_FACTOR / (SUBCARRIERS_PER_RB * scs)).floor() as u64
    }

    pub fn n_slots(&self) -> u64 {
        let duration_us = (self.duration_s * 1e6).round() as u64;
        duration_us.div_ceil(self.slot_us())
    }
}

/// Result of replaying one trace through the grid. Because RBs fill in
/// ascending index order, the full (rb, slot) matrix is derivable from the
/// per-slot totals, which is what gets stored.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationMatrix {
    n_rb: u64,
    bits_per_rb: u64,
    slot_us: u64,
    duration_s: f64,
    direction: Direction,
    slot_bits: Vec<u64>,
    offered_bits: u64,
    served_bits: u64,
    backlog_bits: u64,
    saturated_slots: u64,
}

impl AllocationMatrix {
    pub fn n_rb(&self) -> u64 {
        self.n_rb
    }

    pub fn bits_per_rb(&self) -> u64 {
        self.bits_per_rb
    }

    pub fn slot_us(&self) -> u64 {
        self.slot_us
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_s
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn n_slots(&self) -> u64 {
        self.slot_bits.len() as u64
    }

    /// Total bits served in each slot (zero on slots of the other
    /// direction).
    pub fn slot_bits(&self) -> &[u64] {
        &self.slot_bits
    }

    /// Bits allocated to one (rb, slot) cell: ascending fill means RB i
    /// holds whatever remains of the slot total past `i` full blocks.
    pub fn bits_at(&self, rb: u64, slot: u64) -> u64 {
        let total = self.slot_bits[slot as usize];
        total.saturating_sub(rb * self.bits_per_rb).min(self.bits_per_rb)
    }

    /// Total bits per RB across the whole run.
    pub fn rb_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n_rb as usize];
        for &s in &self.slot_bits {
            let full = (s / self.bits_per_rb).min(self.n_rb);
            for t in totals.iter_mut().take(full as usize) {
                *t += self.bits_per_rb;
            }
            if full < self.n_rb {
                totals[full as usize] += s % self.bits_per_rb;
            }
        }
        totals
    }

    /// t(i): bits per second carried by RB i over the run.
    pub fn throughput_per_rb(&self) -> Vec<f64> {
        self.rb_totals().iter().map(|&b| b as f64 / self.duration_s).collect()
    }

    pub fn offered_bits(&self) -> u64 {
        self.offered_bits
    }

    pub fn served_bits(&self) -> u64 {
        self.served_bits
    }

    /// Bits still queued when the run ended.
    pub fn backlog_bits(&self) -> u64 {
        self.backlog_bits
    }

    /// Active-direction slots that ended with traffic still queued.
    pub fn saturated_slots(&self) -> u64 {
        self.saturated_slots
    }

    /// Warning flag: the run ended more than ten slot-capacities behind.
    pub fn saturated(&self) -> bool {
        self.backlog_bits > 10 * self.n_rb * self.bits_per_rb
    }
}

/// Replays `trace` (timestamps rebased to its first packet) through the
/// grid, serving the FIFO queue on every slot whose TDD direction matches
/// `direction`. Packets become eligible at the next slot boundary at or
/// after their arrival.
pub fn schedule(
    trace: &StreamTrace,
    cfg: &GridConfig,
    direction: Direction,
) -> Result<AllocationMatrix> {
    cfg.validate()?;
    let slot_us = cfg.slot_us();
    let n_slots = cfg.n_slots();
    let n_rb = cfg.n_rb();
    let capacity = n_rb * cfg.bits_per_rb;
    let mut m = AllocationMatrix {
        n_rb,
        bits_per_rb: cfg.bits_per_rb,
        slot_us,
        duration_s: cfg.duration_s,
        direction,
        slot_bits: vec![0; n_slots as usize],
        offered_bits: 0,
        served_bits: 0,
        backlog_bits: 0,
        saturated_slots: 0,
    };
    if trace.packets.is_empty() {
        return Ok(m);
    }
    let t0 = trace.packets[0].timestamp_us;
    let duration_us = (cfg.duration_s * 1e6).round() as u64;
    let last = trace.packets.last().expect("nonempty").timestamp_us;
    if last - t0 > duration_us {
        return Err(Error::Precondition(format!(
            "trace spans {:.3} s but the grid only covers {} s",
            (last - t0) as f64 / 1e6,
            cfg.duration_s
        )));
    }
    // eligibility slot per packet: next boundary at or after arrival
    let mut arrivals = trace.packets.iter().map(|p| {
        let t = p.timestamp_us - t0;
        (t.div_ceil(slot_us), u64::from(p.payload_size) * 8)
    });
    let mut pending = arrivals.next();
    let mut queue: u64 = 0;
    for slot in 0..n_slots {
        while let Some((eligible, bits)) = pending {
            if eligible > slot {
                break;
            }
            queue += bits;
            m.offered_bits += bits;
            pending = arrivals.next();
        }
        if cfg.tdd.direction_of(slot) != direction {
            continue;
        }
        let served = queue.min(capacity);
        queue -= served;
        m.slot_bits[slot as usize] = served;
        m.served_bits += served;
        if queue > 0 {
            m.saturated_slots += 1;
        }
    }
    // arrivals eligible only past the final boundary count as offered
    for (_, bits) in pending.into_iter().chain(arrivals) {
        queue += bits;
        m.offered_bits += bits;
    }
    m.backlog_bits = queue;
    Ok(m)
}

/// Relative per-RB throughput error: `100 · Σ|t_ref(i) − t_cand(i)| /
/// Σ t_ref(i)`.
pub fn error_from_throughputs(t_ref: &[f64], t_cand: &[f64]) -> Result<f64> {
    if t_ref.len() != t_cand.len() {
        return Err(Error::ConfigMismatch(format!(
            "throughput vectors differ in length: {} vs {}",
            t_ref.len(),
            t_cand.len()
        )));
    }
    let denom: f64 = t_ref.iter().sum();
    if denom <= 0.0 {
        return Err(Error::EmptyData("reference allocation is all-zero".into()));
    }
    let num: f64 = t_ref.iter().zip(t_cand).map(|(r, c)| (r - c).abs()).sum();
    Ok(100.0 * num / denom)
}

pub fn allocation_error(reference: &AllocationMatrix, candidate: &AllocationMatrix) -> Result<f64> {
    if reference.n_rb != candidate.n_rb
        || reference.bits_per_rb != candidate.bits_per_rb
        || reference.slot_us != candidate.slot_us
        || reference.duration_s != candidate.duration_s
        || reference.direction != candidate.direction
    {
        return Err(Error::ConfigMismatch(
            "allocation matrices come from different grid configurations".into(),
        ));
    }
    error_from_throughputs(&reference.throughput_per_rb(), &candidate.throughput_per_rb())
}

/// Nonzero cells as `rb_index,slot_index,bits` rows.
pub fn export_matrix_csv(m: &AllocationMatrix, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut put = |line: String| w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e));
    put("rb_index,slot_index,bits\n".into())?;
    for slot in 0..m.n_slots() {
        for rb in 0..m.n_rb {
            let bits = m.bits_at(rb, slot);
            if bits == 0 {
                break; // ascending fill: nothing past the first empty RB
            }
            put(format!("{rb},{slot},{bits}\n"))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per RB: totals and time-averaged throughput.
pub fn export_rb_totals_csv(m: &AllocationMatrix, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    w.write_all(b"rb_index,total_bits,throughput_bps\n").map_err(|e| Error::io(path, e))?;
    let totals = m.rb_totals();
    for (rb, &bits) in totals.iter().enumerate() {
        let line = format!("{rb},{bits},{}\n", bits as f64 / m.duration_s);
        w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
