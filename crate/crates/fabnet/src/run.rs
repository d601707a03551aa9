//! Subcommand drivers. Sweep points run on the rayon pool; rows come back in
//! parameter order whatever the completion order.

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fabnet_core::loc::{random_positions, run_trials, LocalizationServer, Vec3};
use fabnet_core::mac::sweep::{point_seed, sweep_point};
use fabnet_core::nlos::{evaluate_subsets_with, generate_dataset, train_tree, Cir, Forest, ForestParams, Label, NlosError};
use fabnet_core::phy::{ber_run, es_n0_db, frame_samples};

use crate::config::{LocConfig, MacConfig, NlosEvalConfig, NlosGenConfig, PhyBerConfig};
use crate::io;
use crate::manifest::{Outputs, RunManifest};
use crate::usage;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacRow {
    pub n_ar: u32,
    pub class: &'static str,
    pub mean_ms: f64,
    pub max_ms: f64,
    pub miss_rate: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerRow {
    pub snr_db: f64,
    pub ber: f64,
    pub bits: u64,
}

/// Estimate columns are empty for a failed round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixRow {
    pub trial: u32,
    pub true_x: f64,
    pub true_y: f64,
    pub true_z: f64,
    pub est_x: Option<f64>,
    pub est_y: Option<f64>,
    pub est_z: Option<f64>,
    pub err_m: Option<f64>,
    pub residual_rms: Option<f64>,
    pub iterations: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccRow {
    pub subset: &'static str,
    pub los_acc: f64,
    pub nlos_acc: f64,
    pub overall: f64,
}

/// Latency rows, safety then AR, for each `n_ar` of the sweep.
pub fn mac_rows(cfg: &MacConfig) -> Result<Vec<MacRow>> {
    let base = cfg.scenario().map_err(usage)?;
    let phy = cfg.timing.phy_params().map_err(usage)?;
    let points = cfg
        .n_ar
        .values()
        .into_par_iter()
        .map(|n| sweep_point(&base, &phy, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(points
        .into_iter()
        .flatten()
        .map(|r| MacRow {
            n_ar: r.n_ar,
            class: r.class.as_str(),
            mean_ms: r.mean_ms,
            max_ms: r.max_ms,
            miss_rate: r.miss_rate,
            samples: r.samples,
        })
        .collect())
}

/// Event trace of a single-point sweep.
pub fn mac_trace(cfg: &MacConfig) -> Result<Vec<fabnet_core::event::TraceRecord>> {
    let values = cfg.n_ar.values();
    let [n] = values[..] else {
        bail!(crate::UsageError("a trace needs a single n_ar value".into()));
    };
    let mut sc = cfg.scenario().map_err(usage)?;
    sc.n_ar = n;
    sc.seed = point_seed(cfg.seed, n);
    sc.trace = true;
    Ok(sc.run(&cfg.timing.phy_params().map_err(usage)?)?.trace)
}

/// One row per Eb/N0 point.
pub fn ber_rows(cfg: &PhyBerConfig) -> Result<Vec<BerRow>> {
    let gfdm = cfg.gfdm().map_err(usage)?;
    let opts = cfg.ber_options();
    let bps = gfdm.constellation.bits_per_symbol();
    let rows = cfg
        .snr_db
        .values()
        .into_par_iter()
        .map(|eb_n0| {
            let r = ber_run(&gfdm, &cfg.channel_model(es_n0_db(eb_n0, bps)), &opts)?;
            Ok(BerRow {
                snr_db: eb_n0,
                ber: r.ber,
                bits: r.bits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

/// Received samples of the first frame at the first Eb/N0 point.
pub fn ber_dump(cfg: &PhyBerConfig) -> Result<Vec<fabnet_core::Complex64>> {
    let gfdm = cfg.gfdm().map_err(usage)?;
    let es = es_n0_db(cfg.snr_db.start, gfdm.constellation.bits_per_symbol());
    let (_, rx) = frame_samples(&gfdm, &cfg.channel_model(es), &cfg.ber_options(), 0)?;
    Ok(rx)
}

/// One row per mobile position, from `path` if given, else `trials` random
/// positions in the room.
pub fn loc_rows(cfg: &LocConfig) -> Result<Vec<FixRow>> {
    let (processing_delay, frame_airtime, timeout) = cfg.timing().map_err(usage)?;
    let mut server = LocalizationServer::new(cfg.anchors(), cfg.noise()).map_err(usage)?;
    server.processing_delay = processing_delay;
    server.frame_airtime = frame_airtime;
    server.timeout = timeout;
    let positions: Vec<Vec3> = match &cfg.path {
        Some(p) => p.iter().map(|&q| q.into()).collect(),
        None => {
            let [lx, ly, lz] = cfg.room_min;
            let [hx, hy, hz] = cfg.room_max;
            if !(lx <= hx && ly <= hy && lz <= hz) {
                bail!(crate::UsageError("room_min must not exceed room_max".into()));
            }
            random_positions(cfg.trials, cfg.seed, Vec3::new(lx, ly, lz), Vec3::new(hx, hy, hz))
        }
    };
    let trials = run_trials(&mut server, &positions, cfg.seed)?;
    Ok(trials
        .iter()
        .map(|t| {
            let est = t.outcome.as_ref().ok();
            FixRow {
                trial: t.index,
                true_x: t.truth.x,
                true_y: t.truth.y,
                true_z: t.truth.z,
                est_x: est.map(|e| e.position.x),
                est_y: est.map(|e| e.position.y),
                est_z: est.map(|e| e.position.z),
                err_m: t.error(),
                residual_rms: est.map(|e| e.residual_rms),
                iterations: est.map(|e| e.iterations),
            }
        })
        .collect())
}

pub fn nlos_dataset(cfg: &NlosGenConfig) -> Result<Vec<Cir>> {
    let p = cfg.params();
    p.validate().map_err(usage)?;
    Ok(generate_dataset(&p)?)
}

/// Trees trained in parallel; equal to `train_forest` with the same inputs.
pub fn par_train_forest(x: &[Vec<f64>], y: &[Label], params: &ForestParams, seed: u64) -> Result<Forest, NlosError> {
    params.validate()?;
    let trees = (0..params.n_trees as u64)
        .into_par_iter()
        .map(|t| train_tree(x, y, params, seed, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Forest::from_trees(trees, x.first().map_or(0, Vec::len)))
}

pub fn nlos_accuracy(cfg: &NlosEvalConfig, cirs: &[Cir]) -> Result<Vec<AccRow>> {
    let params = cfg.forest();
    params.validate().map_err(usage)?;
    let acc = evaluate_subsets_with(cirs, &cfg.subsets(), &params, cfg.seed, par_train_forest)?;
    Ok(acc
        .iter()
        .map(|a| AccRow {
            subset: a.subset.name(),
            los_acc: a.los_acc,
            nlos_acc: a.nlos_acc,
            overall: a.overall,
        })
        .collect())
}

/// A fully resolved run; what a manifest stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "config", rename_all = "kebab-case")]
pub enum Job {
    MacSim(MacConfig),
    PhyBer(PhyBerConfig),
    LocSim(LocConfig),
    NlosGen(NlosGenConfig),
    NlosEval(NlosEvalConfig),
}

impl Job {
    pub fn seed(&self) -> u64 {
        match self {
            Job::MacSim(c) => c.seed,
            Job::PhyBer(c) => c.seed,
            Job::LocSim(c) => c.seed,
            Job::NlosGen(c) => c.seed,
            Job::NlosEval(c) => c.seed,
        }
    }

    /// Writes the outputs and the manifest beside the main one; returns the
    /// manifest.
    pub fn execute(&self, out: &Outputs) -> Result<RunManifest> {
        match self {
            Job::MacSim(c) => {
                if let Some(d) = &out.dump {
                    io::write_trace(d, &mac_trace(c)?)?;
                }
                io::write_csv(&out.main, &mac_rows(c)?)?;
            }
            Job::PhyBer(c) => {
                if let Some(d) = &out.dump {
                    io::write_iq(d, &ber_dump(c)?)?;
                }
                io::write_csv(&out.main, &ber_rows(c)?)?;
            }
            Job::LocSim(c) => io::write_csv(&out.main, &loc_rows(c)?)?,
            Job::NlosGen(c) => io::write_cirs(&out.main, &nlos_dataset(c)?)?,
            Job::NlosEval(c) => {
                let cirs = io::read_cirs(&c.data)?;
                io::write_csv(&out.main, &nlos_accuracy(c, &cirs)?)?;
            }
        }
        let m = RunManifest::new(self.clone(), out.clone());
        m.write()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fabnet_core::nlos::{train_forest, SyntheticCirParams};

    #[test]
    fn parallel_forest_matches_sequential() {
        let cirs = generate_dataset(&SyntheticCirParams {
            n_per_class: 100,
            ..Default::default()
        })
        .unwrap();
        let x: Vec<Vec<f64>> = cirs
            .iter()
            .map(|c| fabnet_core::nlos::extract_features(&c.taps).unwrap().as_array().to_vec())
            .collect();
        let y: Vec<Label> = cirs.iter().map(|c| c.label).collect();
        let p = ForestParams {
            n_trees: 12,
            ..Default::default()
        };
        assert_eq!(par_train_forest(&x, &y, &p, 5).unwrap(), train_forest(&x, &y, &p, 5).unwrap());
    }

    #[test]
    fn mac_rows_keep_parameter_order() {
        let cfg = MacConfig {
            n_ar: "2..8:3".parse().unwrap(),
            duration_s: 0.5,
            ..Default::default()
        };
        let rows = mac_rows(&cfg).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.n_ar, r.class)).collect();
        assert_eq!(keys, [(2, "safety"), (2, "ar"), (5, "safety"), (5, "ar"), (8, "safety"), (8, "ar")]);
    }

    #[test]
    fn job_serializes_with_subcommand_tag() {
        let j = Job::NlosGen(NlosGenConfig::default());
        let v = serde_json::to_value(&j).unwrap();
        assert_eq!(v["subcommand"], "nlos-gen");
        assert_eq!(serde_json::from_value::<Job>(v).unwrap(), j);
        let m = RunManifest::new(j, Outputs::new("a.bin"));
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
