//! XR traffic modeling toolkit: fit heavy-tailed distributions to RTP video
//! captures, replay them as synthetic packet traces, and compare scheduling
//! behavior on a simplified 5G TDD resource grid.
//!
//! Pipeline: [`ingest`] parses PCAPs into per-frame metrics → [`dist`] fits
//! candidate families by maximum likelihood and ranks them by KS →
//! [`modelbank`] binds fits (or the published built-ins) to packet-size
//! policies → [`tracegen`] synthesizes seeded packet traces and PCAPs →
//! [`rangrid`] replays traces through a resource-block grid and scores
//! allocation error between runs.

pub mod dist;
pub mod error;
pub mod ingest;
pub mod modelbank;
pub mod rangrid;
pub mod tracegen;

pub use error::{Error, Result};

/// Traffic direction, shared by ingest metadata and the TDD grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Downlink,
    Uplink,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Downlink => "downlink",
            Direction::Uplink => "uplink",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "downlink" | "dl" | "down" => Ok(Direction::Downlink),
            "uplink" | "ul" | "up" => Ok(Direction::Uplink),
            other => Err(Error::ParamDomain(format!(
                "unknown direction {other:?}; expected downlink | uplink"
            ))),
        }
    }
}
