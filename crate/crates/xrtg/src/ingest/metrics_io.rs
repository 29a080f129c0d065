//! Binary container for [`FrameMetrics`]: a 16-byte magic, then the four
//! arrays in fixed order (frame sizes, inter-frame, inter-packet, packet
//! sizes), each as a little-endian u64 count followed by that many
//! little-endian f64 values. Bitwise round-trip is part of the contract —
//! repeated pipelines must reproduce files exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FrameMetrics;
use crate::error::{Error, Result};

const MAGIC: &[u8; 16] = b"XRTGMETRICS\0\0\0\0\x01";

pub fn export_metrics(metrics: &FrameMetrics, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |buf: &[u8]| w.write_all(buf).map_err(|e| Error::io(path, e));
    put(MAGIC)?;
    for arr in [
        &metrics.frame_sizes,
        &metrics.inter_frame_intervals,
        &metrics.inter_packet_intervals,
        &metrics.packet_sizes,
    ] {
        put(&(arr.len() as u64).to_le_bytes())?;
        for v in arr {
            put(&v.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn import_metrics(path: &Path) -> Result<FrameMetrics> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 16];
    r.read_exact(&mut magic)
        .map_err(|_| Error::format(path, "file too short for metrics header"))?;
    if &magic != MAGIC {
        return Err(Error::format(path, "not a metrics file (bad magic)"));
    }
    let mut arrays: [Vec<f64>; 4] = Default::default();
    for (idx, slot) in arrays.iter_mut().enumerate() {
        let mut len8 = [0u8; 8];
        r.read_exact(&mut len8)
            .map_err(|_| Error::format(path, format!("truncated before array {idx} length")))?;
        let len = u64::from_le_bytes(len8);
        // A count that couldn't possibly fit in the file is corruption, not
        // an allocation request.
        if len > (1 << 33) {
            return Err(Error::format(path, format!("implausible array length {len}")));
        }
        let mut vals = Vec::with_capacity(len as usize);
        let mut v8 = [0u8; 8];
        for i in 0..len {
            r.read_exact(&mut v8).map_err(|_| {
                Error::format(path, format!("truncated in array {idx} at element {i} of {len}"))
            })?;
            vals.push(f64::from_le_bytes(v8));
        }
        *slot = vals;
    }
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => return Err(Error::format(path, "trailing bytes after metrics arrays")),
        Err(e) => return Err(Error::io(path, e)),
    }
    let [frame_sizes, inter_frame_intervals, inter_packet_intervals, packet_sizes] = arrays;
    Ok(FrameMetrics { frame_sizes, inter_frame_intervals, inter_packet_intervals, packet_sizes })
}
