//! Classic libpcap reader, header-minimal by design: it recovers timestamp,
//! UDP payload length and the RTP marker bit — nothing else is trusted.

use super::{PacketRecord, StreamTrace};
use crate::error::{Error, Result};
use crate::Direction;
use std::io::Read;
use std::path::Path;

#[derive(Clone, Copy)]
struct PcapFlavor {
    big_endian: bool,
    nanos: bool,
}

const LINKTYPE_ETHERNET: u32 = 1;
const LINKTYPE_RAW_IP: u32 = 101;
const LINKTYPE_LINUX_SLL: u32 = 113;

/// Parses a classic libpcap file and keeps every UDP packet whose source or
/// destination port matches `udp_port`, in timestamp order.
///
/// `payload_size` is taken from the UDP length field (not the captured
/// bytes), so snaplen-truncated captures still report true sizes. The RTP
/// marker bit is read when at least two payload bytes were captured and the
/// RTP version is 2; anything else keeps the packet with `marker = false`.
pub fn read_pcap(path: impl AsRef<Path>, udp_port: u16) -> Result<StreamTrace> {
    let path = path.as_ref();
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(|e| Error::io(path, e))?;
    parse_pcap(&buf, udp_port, &path.display().to_string())
}

pub(crate) fn parse_pcap(buf: &[u8], udp_port: u16, source: &str) -> Result<StreamTrace> {
    if buf.len() < 24 {
        return Err(Error::PcapParse {
            offset: 0,
            reason: format!("file too short for a pcap global header ({} bytes)", buf.len()),
        });
    }
    let flavor = match buf[..4] {
        [0xd4, 0xc3, 0xb2, 0xa1] => PcapFlavor { big_endian: false, nanos: false },
        [0xa1, 0xb2, 0xc3, 0xd4] => PcapFlavor { big_endian: true, nanos: false },
        [0x4d, 0x3c, 0xb2, 0xa1] => PcapFlavor { big_endian: false, nanos: true },
        [0xa1, 0xb2, 0x3c, 0x4d] => PcapFlavor { big_endian: true, nanos: true },
        [0x0a, 0x0d, 0x0d, 0x0a] => {
            return Err(Error::PcapParse {
                offset: 0,
                reason: "pcapng file detected; only classic libpcap is supported \
                         (convert with `tshark -F libpcap`)"
                    .into(),
            })
        }
        _ => {
            return Err(Error::PcapParse {
                offset: 0,
                reason: format!(
                    "bad magic {:02x}{:02x}{:02x}{:02x}; not a classic libpcap file",
                    buf[0], buf[1], buf[2], buf[3]
                ),
            })
        }
    };
    let u32_at = |off: usize| -> u32 {
        let b: [u8; 4] = buf[off..off + 4].try_into().unwrap();
        if flavor.big_endian {
            u32::from_be_bytes(b)
        } else {
            u32::from_le_bytes(b)
        }
    };
    let linktype = u32_at(20);
    let link_header = match linktype {
        LINKTYPE_ETHERNET => 14,
        LINKTYPE_LINUX_SLL => 16,
        LINKTYPE_RAW_IP => 0,
        other => {
            return Err(Error::PcapParse {
                offset: 20,
                reason: format!(
                    "unsupported link type {other}; expected Ethernet (1), raw IP (101) \
                     or Linux cooked (113)"
                ),
            })
        }
    };

    let mut packets = Vec::new();
    let mut off = 24usize;
    while off < buf.len() {
        if buf.len() - off < 16 {
            return Err(Error::PcapParse {
                offset: off as u64,
                reason: format!("truncated record header ({} bytes left)", buf.len() - off),
            });
        }
        let ts_sec = u32_at(off) as u64;
        let ts_frac = u32_at(off + 4) as u64;
        let incl_len = u32_at(off + 8) as usize;
        let record_off = off;
        off += 16;
        if incl_len > 0x0400_0000 {
            return Err(Error::PcapParse {
                offset: record_off as u64,
                reason: format!("implausible captured length {incl_len}"),
            });
        }
        if buf.len() - off < incl_len {
            return Err(Error::PcapParse {
                offset: record_off as u64,
                reason: format!(
                    "truncated packet record: captured length {incl_len} but only {} bytes left",
                    buf.len() - off
                ),
            });
        }
        let data = &buf[off..off + incl_len];
        off += incl_len;

        let timestamp_us =
            ts_sec * 1_000_000 + if flavor.nanos { ts_frac / 1000 } else { ts_frac };
        if let Some(rec) = parse_record(data, link_header, linktype, udp_port, timestamp_us) {
            packets.push(rec?);
        }
    }

    if packets.is_empty() {
        return Err(Error::EmptyData(format!(
            "no UDP packets matching port {udp_port} in {source}"
        )));
    }
    packets.sort_by_key(|p| p.timestamp_us);
    Ok(StreamTrace { packets, source: source.to_string(), direction: Direction::Downlink })
}

/// None = not ours (skip); Some(Err) = structurally broken UDP claiming our port.
fn parse_record(
    data: &[u8],
    link_header: usize,
    linktype: u32,
    udp_port: u16,
    timestamp_us: u64,
) -> Option<Result<PacketRecord>> {
    if data.len() < link_header {
        return None;
    }
    // Non-IPv4 ethertypes/protocols are foreign traffic, not errors.
    match linktype {
        LINKTYPE_ETHERNET => {
            if u16::from_be_bytes([data[12], data[13]]) != 0x0800 {
                return None;
            }
        }
        LINKTYPE_LINUX_SLL => {
            if u16::from_be_bytes([data[14], data[15]]) != 0x0800 {
                return None;
            }
        }
        _ => {}
    }
    let ip = &data[link_header..];
    if ip.len() < 20 || ip[0] >> 4 != 4 {
        return None;
    }
    let ihl = usize::from(ip[0] & 0x0f) * 4;
    if ihl < 20 || ip.len() < ihl {
        return None;
    }
    if ip[9] != 17 {
        return None; // not UDP
    }
    if u16::from_be_bytes([ip[6], ip[7]]) & 0x1fff != 0 {
        return None; // non-first fragment: no UDP header to look at
    }
    let udp = &ip[ihl..];
    if udp.len() < 8 {
        return None;
    }
    let src = u16::from_be_bytes([udp[0], udp[1]]);
    let dst = u16::from_be_bytes([udp[2], udp[3]]);
    if src != udp_port && dst != udp_port {
        return None;
    }
    let udp_len = u16::from_be_bytes([udp[4], udp[5]]) as usize;
    if udp_len < 8 {
        return Some(Err(Error::PcapParse {
            offset: 0,
            reason: format!("UDP length field {udp_len} is smaller than the UDP header"),
        }));
    }
    let payload_size = (udp_len - 8) as u32;
    if payload_size == 0 {
        return None; // keepalive/empty datagram, nothing to model
    }
    let captured_payload = &udp[8..];
    let marker = if captured_payload.len() >= 2 && captured_payload[0] >> 6 == 2 {
        captured_payload[1] & 0x80 != 0
    } else {
        false
    };
    Some(Ok(PacketRecord { timestamp_us, payload_size, marker, frame_start: false }))
}
