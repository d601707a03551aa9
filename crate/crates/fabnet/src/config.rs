//! Run configurations, loaded from TOML or JSON. Every field has a default,
//! so an empty file is valid; unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use fabnet_core::event::{Nanos, NS_PER_MS, NS_PER_S, NS_PER_US};
use fabnet_core::loc::{Anchor, RangingNoise, Vec3};
use fabnet_core::mac::{AccessMethod, PhaseModel, PhyParams, Scenario, SchedulerKind, TrafficClass};
use fabnet_core::nlos::{FeatureSubset, ForestParams, SyntheticCirParams};
use fabnet_core::phy::{BerOptions, ChannelModel, Constellation, Estimator, GfdmConfig, Pulse, Receiver};
use fabnet_core::Complex64;

/// Reads `path` as TOML (`.toml`) or JSON (`.json`).
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display())),
        Some("json") => serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display())),
        _ => bail!("{}: config must end in .toml or .json", path.display()),
    }
}

fn ns(value: f64, unit: Nanos, what: &str) -> Result<Nanos> {
    if !(value.is_finite() && value >= 0.0) {
        bail!("{what} must be a non-negative number");
    }
    Ok((value * unit as f64).round() as Nanos)
}

/// Inclusive integer range written `A..B[:step]`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub start: u32,
    pub end: u32,
    pub step: u32,
}

impl IntRange {
    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.end).step_by(self.step as usize).collect()
    }
}

/// Inclusive real range written `A..B[:step]`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl RealRange {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

fn split_range(s: &str) -> (&str, Option<&str>, Option<&str>) {
    let (body, step) = match s.split_once(':') {
        Some((b, st)) => (b, Some(st)),
        None => (s, None),
    };
    match body.split_once("..") {
        Some((a, b)) => (a, Some(b), step),
        None => (body, None, step),
    }
}

impl FromStr for IntRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b, step) = split_range(s.trim());
        let start: u32 = a.trim().parse().with_context(|| format!("bad range `{s}`"))?;
        let end = b.map(|b| b.trim().parse()).transpose().with_context(|| format!("bad range `{s}`"))?;
        let step = step.map(|x| x.trim().parse()).transpose().with_context(|| format!("bad range `{s}`"))?;
        let r = IntRange {
            start,
            end: end.unwrap_or(start),
            step: step.unwrap_or(1),
        };
        if r.step == 0 || r.end < r.start {
            bail!("bad range `{s}`: need start <= end and step > 0");
        }
        Ok(r)
    }
}

impl FromStr for RealRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b, step) = split_range(s.trim());
        let start: f64 = a.trim().parse().with_context(|| format!("bad range `{s}`"))?;
        let end = b.map(|b| b.trim().parse()).transpose().with_context(|| format!("bad range `{s}`"))?;
        let step = step.map(|x| x.trim().parse()).transpose().with_context(|| format!("bad range `{s}`"))?;
        let r = RealRange {
            start,
            end: end.unwrap_or(start),
            step: step.unwrap_or(1.0),
        };
        if !(r.step > 0.0 && r.end >= r.start && r.start.is_finite() && r.end.is_finite()) {
            bail!("bad range `{s}`: need finite start <= end and step > 0");
        }
        Ok(r)
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}:{}", self.start, self.end, self.step)
    }
}

impl fmt::Display for RealRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}:{}", self.start, self.end, self.step)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Num(f64),
    Text(String),
}

fn range_from<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr<Err = anyhow::Error>,
{
    let text = match NumOrText::deserialize(d)? {
        NumOrText::Num(x) => x.to_string(),
        NumOrText::Text(s) => s,
    };
    text.parse().map_err(serde::de::Error::custom)
}

macro_rules! serde_via_string {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                range_from(d)
            }
        }
    };
}

serde_via_string!(IntRange);
serde_via_string!(RealRange);

/// Accepts `1000000` as well as `1e6`.
fn count<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    let x = match NumOrText::deserialize(d)? {
        NumOrText::Num(x) => x,
        NumOrText::Text(s) => s.parse().map_err(serde::de::Error::custom)?,
    };
    if !(x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(serde::de::Error::custom(format!("{x} is not a whole count")));
    }
    Ok(x as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Dcf,
    Pcf,
    Hcca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sched {
    Ref,
    Edf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Phases {
    Synchronous,
    Random,
}

/// PHY and MAC timing, in the units of the field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingConfig {
    pub slot_us: f64,
    pub sifs_us: f64,
    pub difs_us: f64,
    pub pifs_us: f64,
    pub data_rate_mbps: f64,
    pub ack_us: f64,
    pub beacon_interval_ms: f64,
    pub frame_overhead_us: f64,
    pub cw_min: u32,
    pub cw_max: u32,
    pub retry_limit: u32,
    pub max_msdu_bytes: u32,
    pub beacon_bytes: u32,
}

impl Default for TimingConfig {
    fn default() -> Self {
        let p = PhyParams::default();
        let us = |v: Nanos| v as f64 / NS_PER_US as f64;
        Self {
            slot_us: us(p.slot),
            sifs_us: us(p.sifs),
            difs_us: us(p.difs),
            pifs_us: us(p.pifs),
            data_rate_mbps: p.data_rate_kbps as f64 / 1000.0,
            ack_us: us(p.ack_duration),
            beacon_interval_ms: p.beacon_interval as f64 / NS_PER_MS as f64,
            frame_overhead_us: us(p.per_frame_overhead),
            cw_min: p.cw_min,
            cw_max: p.cw_max,
            retry_limit: p.retry_limit,
            max_msdu_bytes: p.max_msdu_bytes,
            beacon_bytes: p.beacon_bytes,
        }
    }
}

impl TimingConfig {
    pub fn phy_params(&self) -> Result<PhyParams> {
        let p = PhyParams {
            slot: ns(self.slot_us, NS_PER_US, "slot_us")?,
            sifs: ns(self.sifs_us, NS_PER_US, "sifs_us")?,
            difs: ns(self.difs_us, NS_PER_US, "difs_us")?,
            pifs: ns(self.pifs_us, NS_PER_US, "pifs_us")?,
            data_rate_kbps: ns(self.data_rate_mbps, 1000, "data_rate_mbps")?,
            ack_duration: ns(self.ack_us, NS_PER_US, "ack_us")?,
            beacon_interval: ns(self.beacon_interval_ms, NS_PER_MS, "beacon_interval_ms")?,
            per_frame_overhead: ns(self.frame_overhead_us, NS_PER_US, "frame_overhead_us")?,
            cw_min: self.cw_min,
            cw_max: self.cw_max,
            retry_limit: self.retry_limit,
            max_msdu_bytes: self.max_msdu_bytes,
            beacon_bytes: self.beacon_bytes,
        };
        p.validate()?;
        Ok(p)
    }
}

/// `mac-sim` and the MAC figure drivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MacConfig {
    pub access: Access,
    pub scheduler: Sched,
    pub n_ar: IntRange,
    pub n_safety: u32,
    pub safety_msi_ms: f64,
    /// Safety generation period; follows `safety_msi_ms` when absent.
    pub safety_period_ms: Option<f64>,
    pub safety_payload_bytes: u32,
    pub ar_msi_ms: f64,
    /// AR generation period; follows `ar_msi_ms` when absent.
    pub ar_period_ms: Option<f64>,
    pub ar_burst_bytes: u32,
    pub duration_s: f64,
    pub seed: u64,
    pub phases: Phases,
    pub timing: TimingConfig,
}

impl Default for MacConfig {
    fn default() -> Self {
        let s = Scenario::default();
        let ms = |v: Nanos| v as f64 / NS_PER_MS as f64;
        Self {
            access: Access::Hcca,
            scheduler: Sched::Ref,
            n_ar: IntRange { start: 5, end: 50, step: 5 },
            n_safety: s.n_safety,
            safety_msi_ms: ms(s.safety.msi),
            safety_period_ms: None,
            safety_payload_bytes: s.safety.payload_bytes,
            ar_msi_ms: ms(s.ar.msi),
            ar_period_ms: None,
            ar_burst_bytes: s.ar.payload_bytes,
            duration_s: s.duration as f64 / NS_PER_S as f64,
            seed: s.seed,
            phases: Phases::Synchronous,
            timing: TimingConfig::default(),
        }
    }
}

impl MacConfig {
    /// Scenario for the first point of the sweep.
    pub fn scenario(&self) -> Result<Scenario> {
        let safety_msi = ns(self.safety_msi_ms, NS_PER_MS, "safety_msi_ms")?;
        let ar_msi = ns(self.ar_msi_ms, NS_PER_MS, "ar_msi_ms")?;
        let period = |p: Option<f64>, msi: Nanos, what| p.map(|v| ns(v, NS_PER_MS, what)).unwrap_or(Ok(msi));
        let sc = Scenario {
            n_safety: self.n_safety,
            n_ar: self.n_ar.start,
            access: match self.access {
                Access::Dcf => AccessMethod::Dcf,
                Access::Pcf => AccessMethod::Pcf,
                Access::Hcca => AccessMethod::Hcca,
            },
            scheduler: match self.scheduler {
                Sched::Ref => SchedulerKind::Reference,
                Sched::Edf => SchedulerKind::Edf,
            },
            duration: ns(self.duration_s, NS_PER_S, "duration_s")?,
            seed: self.seed,
            safety: TrafficClass {
                msi: safety_msi,
                generation_period: period(self.safety_period_ms, safety_msi, "safety_period_ms")?,
                payload_bytes: self.safety_payload_bytes,
                ..TrafficClass::safety()
            },
            ar: TrafficClass {
                msi: ar_msi,
                generation_period: period(self.ar_period_ms, ar_msi, "ar_period_ms")?,
                payload_bytes: self.ar_burst_bytes,
                ..TrafficClass::ar()
            },
            phases: match self.phases {
                Phases::Synchronous => PhaseModel::Synchronous,
                Phases::Random => PhaseModel::Random,
            },
            trace: false,
        };
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PulseKind {
    Rc,
    Rrc,
    Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReceiverKind {
    Zf,
    Mf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Ls,
    Genie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// FIR taps as `[re, im]` pairs.
    pub taps: Vec<[f64; 2]>,
    pub normalize: bool,
    /// Add noise at each sweep SNR; off gives a noiseless channel.
    pub awgn: bool,
    /// Carrier offset, subcarrier spacings.
    pub cfo: f64,
    pub delay: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            taps: vec![[1.0, 0.0]],
            normalize: true,
            awgn: true,
            cfo: 0.0,
            delay: 0,
        }
    }
}

/// `phy ber`: one GFDM configuration, a channel and an Eb/N0 sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyBerConfig {
    pub k: usize,
    pub m: usize,
    /// Active subcarriers; all when absent.
    pub active: Option<Vec<usize>>,
    pub pulse: PulseKind,
    pub rolloff: f64,
    pub cp_len: usize,
    pub cs_len: usize,
    pub window_len: usize,
    pub constellation: Modulation,
    pub receiver: ReceiverKind,
    pub channel: ChannelConfig,
    /// Eb/N0 points, dB.
    pub snr_db: RealRange,
    #[serde(deserialize_with = "count")]
    pub bits: u64,
    pub seed: u64,
    pub preamble_boost_db: f64,
    pub estimator: EstimatorKind,
}

impl Default for PhyBerConfig {
    fn default() -> Self {
        Self {
            k: 64,
            m: 1,
            active: None,
            pulse: PulseKind::Rect,
            rolloff: 0.5,
            cp_len: 16,
            cs_len: 0,
            window_len: 0,
            constellation: Modulation::Qpsk,
            receiver: ReceiverKind::Zf,
            channel: ChannelConfig::default(),
            snr_db: RealRange { start: 0.0, end: 10.0, step: 2.0 },
            bits: 1_000_000,
            seed: 1,
            preamble_boost_db: 0.0,
            estimator: EstimatorKind::Ls,
        }
    }
}

impl PhyBerConfig {
    pub fn gfdm(&self) -> Result<GfdmConfig> {
        let pulse = match self.pulse {
            PulseKind::Rc => Pulse::RaisedCosine { rolloff: self.rolloff },
            PulseKind::Rrc => Pulse::RootRaisedCosine { rolloff: self.rolloff },
            PulseKind::Rect => Pulse::Rect,
        };
        let mut c = GfdmConfig::new(self.k, self.m, pulse)
            .with_guards(self.cp_len, self.cs_len)
            .with_window(self.window_len)
            .with_constellation(match self.constellation {
                Modulation::Bpsk => Constellation::Bpsk,
                Modulation::Qpsk => Constellation::Qpsk,
                Modulation::Qam16 => Constellation::Qam16,
            })
            .with_receiver(match self.receiver {
                ReceiverKind::Zf => Receiver::ZeroForcing,
                ReceiverKind::Mf => Receiver::MatchedFilter,
            });
        if let Some(a) = &self.active {
            c = c.with_active(a.clone());
        }
        c.validate()?;
        Ok(c)
    }

    /// Channel at Es/N0 `es_n0_db`.
    pub fn channel_model(&self, es_n0_db: f64) -> ChannelModel {
        let ch = &self.channel;
        ChannelModel {
            taps: ch.taps.iter().map(|t| Complex64::new(t[0], t[1])).collect(),
            normalize: ch.normalize,
            snr_db: ch.awgn.then_some(es_n0_db),
            cfo: ch.cfo,
            delay: ch.delay,
        }
    }

    pub fn ber_options(&self) -> BerOptions {
        BerOptions {
            n_bits: self.bits,
            seed: self.seed,
            preamble_boost_db: self.preamble_boost_db,
            estimator: match self.estimator {
                EstimatorKind::Ls => Estimator::Ls,
                EstimatorKind::Genie => Estimator::Genie,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<AnchorSpec> for Anchor {
    fn from(a: AnchorSpec) -> Self {
        Anchor::new(a.id, a.x, a.y, a.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<Point> for Vec3 {
    fn from(p: Point) -> Self {
        Vec3::new(p.x, p.y, p.z)
    }
}

/// `loc sim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocConfig {
    pub anchors: Vec<AnchorSpec>,
    /// Mobile positions to locate in order; random positions in the room
    /// when absent.
    pub path: Option<Vec<Point>>,
    pub sigma_d: f64,
    pub bias: f64,
    pub trials: u32,
    pub seed: u64,
    pub room_min: [f64; 3],
    pub room_max: [f64; 3],
    pub processing_delay_us: f64,
    pub frame_airtime_us: f64,
    pub timeout_us: f64,
}

impl Default for LocConfig {
    fn default() -> Self {
        let a = |id, x, y, z| AnchorSpec { id, x, y, z };
        Self {
            anchors: vec![a(1, 0.0, 0.0, 3.0), a(2, 10.0, 0.0, 0.0), a(3, 0.0, 10.0, 0.0), a(4, 10.0, 10.0, 3.0)],
            path: None,
            sigma_d: 1.0,
            bias: 0.0,
            trials: 1000,
            seed: 1,
            room_min: [0.0; 3],
            room_max: [10.0, 10.0, 3.0],
            processing_delay_us: 100.0,
            frame_airtime_us: 20.0,
            timeout_us: 1000.0,
        }
    }
}

impl LocConfig {
    pub fn anchors(&self) -> Vec<Anchor> {
        self.anchors.iter().map(|&a| a.into()).collect()
    }

    pub fn noise(&self) -> RangingNoise {
        RangingNoise {
            sigma_d: self.sigma_d,
            bias: self.bias,
        }
    }

    pub fn timing(&self) -> Result<(Nanos, Nanos, Nanos)> {
        Ok((
            ns(self.processing_delay_us, NS_PER_US, "processing_delay_us")?,
            ns(self.frame_airtime_us, NS_PER_US, "frame_airtime_us")?,
            ns(self.timeout_us, NS_PER_US, "timeout_us")?,
        ))
    }
}

/// `nlos gen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NlosGenConfig {
    pub n_per_class: usize,
    pub tap_count: usize,
    pub k_factor_db: f64,
    pub los_delay_spread: f64,
    pub nlos_spread_ratio: f64,
    pub normalize: bool,
    pub seed: u64,
}

impl Default for NlosGenConfig {
    fn default() -> Self {
        let p = SyntheticCirParams::default();
        Self {
            n_per_class: p.n_per_class,
            tap_count: p.tap_count,
            k_factor_db: p.k_factor_db,
            los_delay_spread: p.los_delay_spread,
            nlos_spread_ratio: p.nlos_spread_ratio,
            normalize: p.normalize,
            seed: p.seed,
        }
    }
}

impl NlosGenConfig {
    pub fn params(&self) -> SyntheticCirParams {
        SyntheticCirParams {
            n_per_class: self.n_per_class,
            tap_count: self.tap_count,
            k_factor_db: self.k_factor_db,
            los_delay_spread: self.los_delay_spread,
            nlos_spread_ratio: self.nlos_spread_ratio,
            normalize: self.normalize,
            seed: self.seed,
        }
    }
}

/// Feature subset names `s1`..`s4` as they appear in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetName(pub FeatureSubset);

impl Serialize for SubsetName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0.name())
    }
}

impl<'de> Deserialize<'de> for SubsetName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FeatureSubset::parse(&s)
            .map(SubsetName)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown subset `{s}`, expected s1..s4")))
    }
}

/// `nlos eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NlosEvalConfig {
    /// CIR file written by `nlos gen`.
    pub data: PathBuf,
    pub subsets: Vec<SubsetName>,
    pub seed: u64,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub bootstrap: bool,
    /// Features tried per split; `ceil(sqrt(d))` when absent.
    pub max_features: Option<usize>,
}

impl Default for NlosEvalConfig {
    fn default() -> Self {
        let f = ForestParams::default();
        Self {
            data: PathBuf::from("cirs.bin"),
            subsets: FeatureSubset::ALL.iter().map(|&s| SubsetName(s)).collect(),
            seed: 1,
            n_trees: f.n_trees,
            max_depth: f.max_depth,
            min_leaf: f.min_leaf,
            bootstrap: f.bootstrap,
            max_features: f.max_features,
        }
    }
}

impl NlosEvalConfig {
    pub fn forest(&self) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            bootstrap: self.bootstrap,
            max_features: self.max_features,
        }
    }

    pub fn subsets(&self) -> Vec<FeatureSubset> {
        self.subsets.iter().map(|s| s.0).collect()
    }
}

/// Parses `s1,s3` style lists.
pub fn parse_subsets(s: &str) -> Result<Vec<SubsetName>> {
    s.split(',')
        .map(|p| {
            FeatureSubset::parse(p.trim())
                .map(SubsetName)
                .ok_or_else(|| anyhow!("unknown subset `{p}`, expected s1..s4"))
        })
        .collect()
}
