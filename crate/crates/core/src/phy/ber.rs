use alloc::vec::Vec;

use super::channel::ChannelModel;
use super::config::GfdmConfig;
use super::frame::{build_frame, preamble, Frame};
use super::grid::{demap_resources, map_resources};
use super::modem::Modem;
use super::sync::schmidl_cox_sync;
use super::{ls_channel_estimate, PhyError};
use crate::math::{cis, db_to_lin, log10, sqrt, PI};
use crate::rng::SimRng;
use crate::Complex64;

/// How the receiver learns timing, CFO and channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// Schmidl-Cox on the received samples, LS estimate from the preamble.
    #[default]
    Ls,
    /// Known timing, CFO and taps.
    Genie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerOptions {
    pub n_bits: u64,
    pub seed: u64,
    /// Preamble power above the payload, dB.
    pub preamble_boost_db: f64,
    pub estimator: Estimator,
}

impl Default for BerOptions {
    fn default() -> Self {
        Self {
            n_bits: 1_000_000,
            seed: 1,
            preamble_boost_db: 0.0,
            estimator: Estimator::Ls,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerResult {
    pub ber: f64,
    pub bits: u64,
    pub errors: u64,
    pub frames: u64,
    /// Frames without a detection; all their bits count as errors.
    pub missed_frames: u64,
}

/// Es/N0 in dB for a given Eb/N0 in dB.
pub fn es_n0_db(eb_n0_db: f64, bits_per_symbol: usize) -> f64 {
    eb_n0_db + 10.0 * log10(bits_per_symbol as f64)
}

/// Monte-Carlo uncoded BER through map, modulate, frame, channel, sync,
/// estimate, demodulate and decide. Frame `i` draws its bits and noise from
/// stream `i` of `opts.seed`; whole frames are sent until at least
/// `opts.n_bits` bits have been counted.
pub fn ber_run(config: &GfdmConfig, channel: &ChannelModel, opts: &BerOptions) -> Result<BerResult, PhyError> {
    let modem = Modem::new(config)?;
    let cons = config.constellation;
    let per_frame = config.bits_per_block() as u64;
    let frames = opts.n_bits.div_ceil(per_frame).max(1);
    let pre = boosted_preamble(config, opts);
    let genie_h = genie_response(&modem, channel);
    let (n, k) = (config.n(), config.k);
    let mut errors = 0u64;
    let mut missed = 0u64;
    let mut rx_bits = Vec::with_capacity(per_frame as usize);
    for f in 0..frames {
        let (bits, frame, mut rx) = transmit(config, &modem, &pre, channel, opts.seed, f)?;
        let (start, h) = match opts.estimator {
            Estimator::Genie => {
                derotate(&mut rx, channel.cfo, k);
                (channel.delay, genie_h.clone())
            }
            Estimator::Ls => match schmidl_cox_sync(&rx, config) {
                Ok(s) if s.frame_start + config.frame_len() <= rx.len() => {
                    derotate(&mut rx, s.cfo, k);
                    // Move the block window into the CP to stay clear of
                    // the channel's tail; the LS estimate absorbs the shift.
                    let start = s.frame_start - (config.cp_len / 2).min(s.frame_start);
                    let p0 = start + frame.preamble_start;
                    (start, ls_channel_estimate(&rx[p0..p0 + n], &pre)?)
                }
                _ => {
                    missed += 1;
                    errors += per_frame;
                    continue;
                }
            },
        };
        let y0 = start + frame.payload_start;
        let est = modem.demodulate(&rx[y0..y0 + n], Some(&h))?;
        rx_bits.clear();
        cons.demodulate_into(&demap_resources(&est, config), &mut rx_bits);
        errors += bits.iter().zip(&rx_bits).filter(|(a, b)| a != b).count() as u64;
    }
    let total = frames * per_frame;
    Ok(BerResult {
        ber: errors as f64 / total as f64,
        bits: total,
        errors,
        frames,
        missed_frames: missed,
    })
}

fn boosted_preamble(config: &GfdmConfig, opts: &BerOptions) -> Vec<Complex64> {
    let boost = sqrt(db_to_lin(opts.preamble_boost_db));
    preamble(config, opts.seed).iter().map(|v| v * boost).collect()
}

fn transmit(
    config: &GfdmConfig,
    modem: &Modem,
    pre: &[Complex64],
    channel: &ChannelModel,
    seed: u64,
    index: u64,
) -> Result<(Vec<u8>, Frame, Vec<Complex64>), PhyError> {
    let mut rng = SimRng::stream(seed, index);
    let bits: Vec<u8> = (0..config.bits_per_block()).map(|_| rng.bit() as u8).collect();
    let grid = map_resources(&config.constellation.modulate(&bits), config)?;
    let frame = build_frame(pre, &modem.modulate(&grid)?, config)?;
    let rx = channel.apply(&frame.samples, config.k, &mut rng);
    Ok((bits, frame, rx))
}

/// Transmitted and received samples of frame `index` of a [`ber_run`] with
/// the same arguments.
pub fn frame_samples(
    config: &GfdmConfig,
    channel: &ChannelModel,
    opts: &BerOptions,
    index: u64,
) -> Result<(Vec<Complex64>, Vec<Complex64>), PhyError> {
    let modem = Modem::new(config)?;
    let pre = boosted_preamble(config, opts);
    let (_, frame, rx) = transmit(config, &modem, &pre, channel, opts.seed, index)?;
    Ok((frame.samples, rx))
}

fn derotate(rx: &mut [Complex64], cfo: f64, k: usize) {
    if cfo == 0.0 {
        return;
    }
    let w = -2.0 * PI * cfo / k as f64;
    for (i, v) in rx.iter_mut().enumerate() {
        *v *= cis(w * i as f64);
    }
}

/// Frequency response of the channel taps on the block's N bins.
fn genie_response(modem: &Modem, channel: &ChannelModel) -> Vec<Complex64> {
    let n = modem.config().n();
    let taps = channel.effective_taps();
    (0..n)
        .map(|f| {
            taps.iter()
                .enumerate()
                .map(|(l, t)| t * cis(-2.0 * PI * ((f * l) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}
