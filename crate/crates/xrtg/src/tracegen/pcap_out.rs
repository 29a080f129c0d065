//! Classic-libpcap output (µs timestamps, Ethernet link type). Every
//! record becomes Ethernet + IPv4 + UDP + a minimal 12-byte RTP header +
//! zero filler; payloads too big for one UDP datagram are chunked so the
//! byte totals and marker placement survive a read-back.

use std::io::{BufWriter, Write};
use std::net::Ipv4Addr;
use std::path::Path;

use super::SyntheticTrace;
use crate::error::{Error, Result};

const MAX_UDP_PAYLOAD: u32 = 65_507; // 65535 − 20 (IPv4) − 8 (UDP)
const RTP_HEADER: u32 = 12;
const SSRC: u32 = 0x5852_5447; // "XRTG"

/// One write is fully deterministic: same trace, port and address produce
/// byte-identical files.
pub fn write_pcap(
    st: &SyntheticTrace,
    path: &Path,
    udp_port: u16,
    dest_addr: Ipv4Addr,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut header = Vec::with_capacity(24);
    header.extend_from_slice(&0xa1b2_c3d4_u32.to_le_bytes()); // µs magic
    header.extend_from_slice(&2_u16.to_le_bytes());
    header.extend_from_slice(&4_u16.to_le_bytes());
    header.extend_from_slice(&0_i32.to_le_bytes()); // thiszone
    header.extend_from_slice(&0_u32.to_le_bytes()); // sigfigs
    header.extend_from_slice(&262_144_u32.to_le_bytes()); // snaplen
    header.extend_from_slice(&1_u32.to_le_bytes()); // Ethernet
    w.write_all(&header).map_err(|e| Error::io(path, e))?;

    let src_addr = Ipv4Addr::new(10, 0, 0, 1);
    let mut rtp_seq: u16 = 0;
    let mut ip_id: u16 = 0;
    let mut buf: Vec<u8> = Vec::with_capacity(1600);
    for (idx, p) in st.trace.packets.iter().enumerate() {
        let chunks = chunk_sizes(p.payload_size).map_err(|_| {
            Error::ParamDomain(format!(
                "packet {idx} payload {} cannot carry the {RTP_HEADER}-byte RTP header",
                p.payload_size
            ))
        })?;
        let last = chunks.len() - 1;
        for (ci, &chunk) in chunks.iter().enumerate() {
            buf.clear();
            let marker = p.marker && ci == last;
            // record header
            buf.extend_from_slice(&((p.timestamp_us / 1_000_000) as u32).to_le_bytes());
            buf.extend_from_slice(&((p.timestamp_us % 1_000_000) as u32).to_le_bytes());
            let wire_len = 14 + 20 + 8 + chunk;
            buf.extend_from_slice(&wire_len.to_le_bytes()); // incl_len
            buf.extend_from_slice(&wire_len.to_le_bytes()); // orig_len
            // Ethernet
            buf.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x02]); // dst
            buf.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x01]); // src
            buf.extend_from_slice(&0x0800_u16.to_be_bytes());
            // IPv4
            let ip_total = (20 + 8 + chunk) as u16;
            let ip_start = buf.len();
            buf.push(0x45);
            buf.push(0);
            buf.extend_from_slice(&ip_total.to_be_bytes());
            buf.extend_from_slice(&ip_id.to_be_bytes());
            ip_id = ip_id.wrapping_add(1);
            buf.extend_from_slice(&0x4000_u16.to_be_bytes()); // DF, offset 0
            buf.push(64); // ttl
            buf.push(17); // UDP
            buf.extend_from_slice(&[0, 0]); // checksum placeholder
            buf.extend_from_slice(&src_addr.octets());
            buf.extend_from_slice(&dest_addr.octets());
            let csum = ipv4_checksum(&buf[ip_start..ip_start + 20]);
            buf[ip_start + 10..ip_start + 12].copy_from_slice(&csum.to_be_bytes());
            // UDP (checksum 0 = unused)
            buf.extend_from_slice(&udp_port.to_be_bytes());
            buf.extend_from_slice(&udp_port.to_be_bytes());
            buf.extend_from_slice(&((8 + chunk) as u16).to_be_bytes());
            buf.extend_from_slice(&[0, 0]);
            // RTP header + zero filler
            buf.push(0x80); // version 2
            buf.push(96 | (u8::from(marker) << 7));
            buf.extend_from_slice(&rtp_seq.to_be_bytes());
            rtp_seq = rtp_seq.wrapping_add(1);
            buf.extend_from_slice(&((p.timestamp_us & 0xFFFF_FFFF) as u32).to_be_bytes());
            buf.extend_from_slice(&SSRC.to_be_bytes());
            buf.resize(buf.len() + (chunk - RTP_HEADER) as usize, 0);
            w.write_all(&buf).map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Splits a payload into UDP-sized chunks that sum to it exactly, each big
/// enough for an RTP header. A short remainder borrows from a full chunk.
fn chunk_sizes(payload: u32) -> std::result::Result<Vec<u32>, ()> {
    if payload < RTP_HEADER {
        return Err(());
    }
    if payload <= MAX_UDP_PAYLOAD {
        return Ok(vec![payload]);
    }
    let full = payload / MAX_UDP_PAYLOAD;
    let rem = payload % MAX_UDP_PAYLOAD;
    let mut v = vec![MAX_UDP_PAYLOAD; full as usize];
    if rem >= RTP_HEADER {
        v.push(rem);
    } else if rem > 0 {
        *v.last_mut().expect("payload > MAX ⇒ one full chunk") -= RTP_HEADER - rem;
        v.push(RTP_HEADER);
    }
    debug_assert_eq!(v.iter().sum::<u32>(), payload);
    Ok(v)
}

fn ipv4_checksum(header: &[u8]) -> u16 {
    let mut sum = 0u32;
    for pair in header.chunks(2) {
        sum += u32::from(u16::from_be_bytes([pair[0], pair[1]]));
    }
    while sum > 0xFFFF {
        sum = (sum & 0xFFFF) + (sum >> 16);
    }
    !(sum as u16)
}
