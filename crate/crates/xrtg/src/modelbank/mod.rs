//! Named stream models: eight built-in parameter sets measured from real
//! XR traffic captures, a versioned TOML file format, and fitting a fresh
//! model out of metric arrays.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{select_best, DistModel, EmpiricalSample, Family, Units};
use crate::error::{Error, Result};
use crate::ingest::FrameMetrics;

pub const MODEL_FORMAT_VERSION: &str = "xrtg-model v1";

/// How the generator sizes the IP packets a frame is split into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketSizePolicy {
    /// Every packet as large as the biggest one seen in the capture.
    MaxPacket,
    /// Every packet the capture's mean packet size (rounded to bytes).
    MeanPacket,
    /// A fixed byte size.
    Explicit(u32),
}

impl fmt::Display for PacketSizePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PacketSizePolicy::MaxPacket => f.write_str("max-packet"),
            PacketSizePolicy::MeanPacket => f.write_str("mean-packet"),
            PacketSizePolicy::Explicit(n) => write!(f, "explicit:{n}"),
        }
    }
}

impl FromStr for PacketSizePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-packet" => Ok(PacketSizePolicy::MaxPacket),
            "mean-packet" => Ok(PacketSizePolicy::MeanPacket),
            _ => {
                if let Some(n) = s.strip_prefix("explicit:") {
                    let n: u32 = n.parse().map_err(|_| {
                        Error::ParamDomain(format!("bad explicit packet size in {s:?}"))
                    })?;
                    if n == 0 {
                        return Err(Error::ParamDomain("explicit packet size must be ≥ 1".into()));
                    }
                    Ok(PacketSizePolicy::Explicit(n))
                } else {
                    Err(Error::ParamDomain(format!(
                        "unknown policy {s:?}; expected max-packet | mean-packet | explicit:N"
                    )))
                }
            }
        }
    }
}

/// A complete generative description of one stream: frame-level and
/// packet-level timing distributions plus packet sizing inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamModel {
    pub stream_id: String,
    /// Nominal frame rate; the inter-frame distribution is the authority on
    /// actual pacing, this is metadata for reports.
    pub fps: f64,
    /// Mean capture packet size in bytes (payload incl. 12-byte RTP header).
    pub mean_packet: f64,
    /// Largest capture packet size in bytes.
    pub max_packet: u32,
    pub packet_size_policy: PacketSizePolicy,
    /// Frame sizes in bytes.
    pub frame_size_dist: DistModel,
    /// Start-to-start frame spacing in seconds.
    pub inter_frame_dist: DistModel,
    /// Intra-frame packet gaps in seconds.
    pub inter_packet_dist: DistModel,
}

impl StreamModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::ParamDomain(format!("fps must be > 0, got {}", self.fps)));
        }
        if !(self.mean_packet.is_finite() && self.mean_packet > 0.0) {
            return Err(Error::ParamDomain(format!(
                "mean_packet must be > 0, got {}",
                self.mean_packet
            )));
        }
        if self.max_packet == 0 || self.mean_packet > self.max_packet as f64 {
            return Err(Error::ParamDomain(format!(
                "need 0 < mean_packet ≤ max_packet, got {} vs {}",
                self.mean_packet, self.max_packet
            )));
        }
        for (name, d) in [
            ("frame_size_dist", &self.frame_size_dist),
            ("inter_frame_dist", &self.inter_frame_dist),
            ("inter_packet_dist", &self.inter_packet_dist),
        ] {
            d.validate()
                .map_err(|e| Error::ParamDomain(format!("{name} of {}: {e}", self.stream_id)))?;
        }
        Ok(())
    }

    /// Packet size in bytes under `policy` (defaulting to the model's own).
    pub fn resolved_packet_size(&self, policy: Option<PacketSizePolicy>) -> u32 {
        match policy.unwrap_or(self.packet_size_policy) {
            PacketSizePolicy::MaxPacket => self.max_packet,
            PacketSizePolicy::MeanPacket => self.mean_packet.round() as u32,
            PacketSizePolicy::Explicit(n) => n,
        }
    }
}

/// A stream model plus a note on where its numbers came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBankEntry {
    pub model: StreamModel,
    pub provenance: String,
}

const BUILTIN_PROVENANCE: &str = "builtin-v1";

struct BuiltinParams {
    id: &'static str,
    fps: f64,
    mean_packet: f64,
    /// Johnson S_U rows as [location, scale, shape_a, shape_b, ks].
    frame: [f64; 5],
    inter_frame: [f64; 5],
    inter_packet: [f64; 5],
}

/// Fitted reference parameters for the eight measured stream conditions.
/// Stream 1: cloud-rendered VR game, three video bitrates at 60 fps.
/// Stream 2: phone-mirrored AR session at 72 and 90 fps.
/// Stream 3: desktop-streamed MR workload, three bitrates at 60 fps.
const BUILTINS: &[BuiltinParams] = &[
    BuiltinParams {
        id: "stream1-low",
        fps: 60.0,
        mean_packet: 1280.79,
        frame: [28205.00, 4990.40, -0.8691, 1.1236, 0.0270],
        inter_frame: [0.0168, 0.000204, 0.0282, 1.2227, 0.0025],
        inter_packet: [1.61e-6, 4.11e-8, -1.2004, 0.4658, 0.0820],
    },
    BuiltinParams {
        id: "stream1-med",
        fps: 60.0,
        mean_packet: 1364.81,
        frame: [73230.79, 12559.32, -0.7814, 1.1801, 0.0259],
        inter_frame: [0.0168, 0.000621, 0.1143, 1.5517, 0.0059],
        inter_packet: [1.71e-6, 4.08e-8, -1.1691, 0.5173, 0.0543],
    },
    BuiltinParams {
        id: "stream1-high",
        fps: 60.0,
        mean_packet: 1403.88,
        frame: [220497.49, 20161.10, -0.4782, 1.2396, 0.0192],
        inter_frame: [0.0151, 0.007549, -0.6793, 3.1580, 0.0221],
        inter_packet: [1.86e-6, 1.65e-7, -1.4515, 0.7052, 0.0725],
    },
    BuiltinParams {
        id: "stream2-72",
        fps: 72.0,
        mean_packet: 1400.04,
        frame: [216500.38, 52883.59, 0.1206, 0.8444, 0.0958],
        inter_frame: [0.0139, 4.37e-5, -0.1091, 1.4920, 0.0165],
        inter_packet: [1.59e-6, 5.40e-8, -1.2095, 0.5422, 0.0548],
    },
    BuiltinParams {
        id: "stream2-90",
        fps: 90.0,
        mean_packet: 1392.66,
        frame: [-136187.45, 14897.10, -9.7610, 2.6910, 0.0504],
        inter_frame: [0.0111, 2.30e-5, -0.1329, 1.5173, 0.0121],
        inter_packet: [1.62e-6, 5.31e-8, -1.2583, 0.5210, 0.0523],
    },
    BuiltinParams {
        id: "stream3-low",
        fps: 60.0,
        mean_packet: 749.83,
        frame: [4144.51, 1962.34, -0.4428, 1.4412, 0.0177],
        inter_frame: [0.0168, 0.0001, -0.0092, 1.0634, 0.0128],
        inter_packet: [1.17e-6, 1.91e-8, -5.7054, 0.9577, 0.1805],
    },
    BuiltinParams {
        id: "stream3-med",
        fps: 60.0,
        mean_packet: 933.53,
        frame: [5547.72, 3879.20, -0.8572, 1.5868, 0.0115],
        inter_frame: [0.0168, 0.0008, -0.0097, 1.6355, 0.0106],
        inter_packet: [1.53e-6, 6.07e-8, -2.4255, 0.6070, 0.1781],
    },
    BuiltinParams {
        id: "stream3-high",
        fps: 60.0,
        mean_packet: 1216.27,
        frame: [-3633.72, 16105.91, -3.8006, 2.9880, 0.0220],
        inter_frame: [0.0164, 0.0023, -0.2288, 1.1306, 0.0227],
        inter_packet: [2.14e-6, 2.07e-7, -0.9957, 0.4937, 0.0788],
    },
];

/// Every packet-size column of the reference captures topped out at the
/// same path-MTU-shaped value.
const BUILTIN_MAX_PACKET: u32 = 1428;

pub fn builtin_ids() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.id).collect()
}

/// Mean application-layer rate (Mbps) measured on each builtin's source
/// capture. Serves as the reference column in generation reports.
pub fn captured_mbps(id: &str) -> Option<f64> {
    match id {
        "stream1-low" => Some(16.51),
        "stream1-med" => Some(41.11),
        "stream1-high" => Some(110.55),
        "stream2-72" => Some(119.79),
        "stream2-90" => Some(117.76),
        "stream3-low" => Some(2.37),
        "stream3-med" => Some(3.95),
        "stream3-high" => Some(11.4),
        _ => None,
    }
}

fn jsu_row(row: [f64; 5]) -> DistModel {
    let mut d = DistModel::johnson_su(row[0], row[1], row[2], row[3])
        .expect("builtin parameters are valid");
    d.ks = Some(row[4]);
    d
}

pub fn builtin(id: &str) -> Result<ModelBankEntry> {
    let entry = BUILTINS.iter().find(|b| b.id == id).ok_or_else(|| Error::UnknownStream {
        id: id.to_string(),
        valid: builtin_ids().join(", "),
    })?;
    let model = StreamModel {
        stream_id: entry.id.to_string(),
        fps: entry.fps,
        mean_packet: entry.mean_packet,
        max_packet: BUILTIN_MAX_PACKET,
        packet_size_policy: PacketSizePolicy::MaxPacket,
        frame_size_dist: jsu_row(entry.frame),
        inter_frame_dist: jsu_row(entry.inter_frame),
        inter_packet_dist: jsu_row(entry.inter_packet),
    };
    debug_assert!(model.validate().is_ok());
    Ok(ModelBankEntry { model, provenance: BUILTIN_PROVENANCE.to_string() })
}

/// Fits the three metric arrays and assembles a model. `families` is the
/// candidate set per array; the best KS wins each.
pub fn model_from_metrics(
    metrics: &FrameMetrics,
    stream_id: &str,
    fps: f64,
    families: &[Family],
) -> Result<ModelBankEntry> {
    if metrics.packet_sizes.is_empty() {
        return Err(Error::EmptyData("no packet sizes to derive a policy from".into()));
    }
    let mean_packet =
        metrics.packet_sizes.iter().sum::<f64>() / metrics.packet_sizes.len() as f64;
    let max_packet = metrics.packet_sizes.iter().fold(0.0_f64, |a, &b| a.max(b)).round() as u32;

    let fit_best = |values: &[f64], units: Units, what: &str| -> Result<DistModel> {
        let sample = EmpiricalSample::new(values.to_vec(), units)
            .map_err(|e| Error::FitFailure(format!("{what}: {e}")))?;
        let ranked = select_best(&sample, families)?;
        Ok(ranked.into_iter().next().expect("select_best returns ≥ 1 model"))
    };

    let model = StreamModel {
        stream_id: stream_id.to_string(),
        fps,
        mean_packet,
        max_packet,
        packet_size_policy: PacketSizePolicy::MaxPacket,
        frame_size_dist: fit_best(&metrics.frame_sizes, Units::Bytes, "frame sizes")?,
        inter_frame_dist: fit_best(
            &metrics.inter_frame_intervals,
            Units::Seconds,
            "inter-frame intervals",
        )?,
        inter_packet_dist: fit_best(
            &metrics.inter_packet_intervals,
            Units::Seconds,
            "inter-packet intervals",
        )?,
    };
    model.validate()?;
    Ok(ModelBankEntry { model, provenance: "fitted".to_string() })
}

// ---- file format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: String,
    stream_id: String,
    fps: f64,
    mean_packet: f64,
    max_packet: u32,
    policy: String,
    provenance: String,
    frame_size_dist: Option<DistBlock>,
    inter_frame_dist: Option<DistBlock>,
    inter_packet_dist: Option<DistBlock>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistBlock {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    location: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exp_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ks: Option<f64>,
}

impl DistBlock {
    fn from_model(d: &DistModel) -> Self {
        let mut b = DistBlock { family: d.family.name().to_string(), ks: d.ks, ..Default::default() };
        match d.family {
            Family::JohnsonSU => {
                b.location = Some(d.params[0]);
                b.scale = Some(d.params[1]);
                b.shape_a = Some(d.params[2]);
                b.shape_b = Some(d.params[3]);
            }
            Family::Normal => {
                b.mean = Some(d.params[0]);
                b.std_dev = Some(d.params[1]);
            }
            Family::ExpModifiedNormal => {
                b.gaussian_mean = Some(d.params[0]);
                b.gaussian_sd = Some(d.params[1]);
                b.exp_rate = Some(d.params[2]);
            }
        }
        b
    }

    fn to_model(&self, block: &str) -> Result<DistModel> {
        let family: Family = self.family.parse().map_err(|e| {
            Error::ParamDomain(format!("[{block}]: {e}"))
        })?;
        let req = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::ParamDomain(format!("[{block}] missing {name}")))
        };
        let params = match family {
            Family::JohnsonSU => vec![
                req(self.location, "location")?,
                req(self.scale, "scale")?,
                req(self.shape_a, "shape_a")?,
                req(self.shape_b, "shape_b")?,
            ],
            Family::Normal => vec![req(self.mean, "mean")?, req(self.std_dev, "std_dev")?],
            Family::ExpModifiedNormal => vec![
                req(self.gaussian_mean, "gaussian_mean")?,
                req(self.gaussian_sd, "gaussian_sd")?,
                req(self.exp_rate, "exp_rate")?,
            ],
        };
        let d = DistModel { family, params, ks: self.ks };
        d.validate().map_err(|e| Error::ParamDomain(format!("[{block}]: {e}")))?;
        Ok(d)
    }
}

pub fn save_model(entry: &ModelBankEntry, path: &Path) -> Result<()> {
    entry.model.validate()?;
    let m = &entry.model;
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION.to_string(),
        stream_id: m.stream_id.clone(),
        fps: m.fps,
        mean_packet: m.mean_packet,
        max_packet: m.max_packet,
        policy: m.packet_size_policy.to_string(),
        provenance: entry.provenance.clone(),
        frame_size_dist: Some(DistBlock::from_model(&m.frame_size_dist)),
        inter_frame_dist: Some(DistBlock::from_model(&m.inter_frame_dist)),
        inter_packet_dist: Some(DistBlock::from_model(&m.inter_packet_dist)),
    };
    let text = toml::to_string_pretty(&file)
        .map_err(|e| Error::format(path, format!("model serialization: {e}")))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelBankEntry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile =
        toml::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::format(
            path,
            format!(
                "unsupported format_version {:?}, this build reads {MODEL_FORMAT_VERSION:?}",
                file.format_version
            ),
        ));
    }
    let block = |b: &Option<DistBlock>, name: &str| -> Result<DistModel> {
        b.as_ref()
            .ok_or_else(|| Error::format(path, format!("missing [{name}] block")))?
            .to_model(name)
            .map_err(|e| Error::format(path, e.to_string()))
    };
    let model = StreamModel {
        stream_id: file.stream_id.clone(),
        fps: file.fps,
        mean_packet: file.mean_packet,
        max_packet: file.max_packet,
        packet_size_policy: file
            .policy
            .parse()
            .map_err(|e: Error| Error::format(path, e.to_string()))?,
        frame_size_dist: block(&file.frame_size_dist, "frame_size_dist")?,
        inter_frame_dist: block(&file.inter_frame_dist, "inter_frame_dist")?,
        inter_packet_dist: block(&file.inter_packet_dist, "inter_packet_dist")?,
    };
    model.validate().map_err(|e| Error::format(path, e.to_string()))?;
    Ok(ModelBankEntry { model, provenance: file.provenance })
}
