use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::channel::{run_ob2b, LinkConfig};
use crate::error::{Error, Result};
use crate::metrics::{linear_fit, FitResult};
use crate::ofdm::{rx_chain, tx_chain, QamConstellation};
use crate::plan::{derive_drof_plan, derive_plan_with, ModulationPlan};
use crate::rng::derive_seed;

/// Stream index of the data bits; noise streams use the sweep point index.
const DATA_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub inv_eta: f64,
    pub order_m: usize,
    pub n_p: usize,
    pub n_r: usize,
    pub snr_db: f64,
    pub evm_pct: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug)]
pub struct PointFailure {
    pub inv_eta: f64,
    pub error: String,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    /// One entry per grid point, in grid order.
    pub points: Vec<std::result::Result<SweepRecord, PointFailure>>,
    pub fit: std::result::Result<FitResult, String>,
}

impl SweepOutcome {
    pub fn records(&self) -> impl Iterator<Item = &SweepRecord> {
        self.points.iter().filter_map(|p| p.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PointFailure> {
        self.points.iter().filter_map(|p| p.as_ref().err())
    }
}

/// Payload bits of one frame; identical for every point of a sweep.
pub fn frame_bits(cfg: &RunConfig) -> Result<Vec<u8>> {
    let qam = QamConstellation::new(cfg.ofdm.qam_order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, DATA_STREAM));
    Ok((0..cfg.ofdm.n_symbols * qam.bits_per_symbol())
        .map(|_| rng.gen_range(0..2u8))
        .collect())
}

fn stage<T>(name: &'static str, inv_eta: f64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        inv_eta,
        source: Box::new(e),
    })
}

fn simulate(
    cfg: &RunConfig,
    plan: &ModulationPlan,
    link: &LinkConfig,
    noise_seed: u64,
    record_label: f64,
) -> Result<SweepRecord> {
    let started = Instant::now();
    let bits = stage("data", record_label, frame_bits(cfg))?;
    let tx = stage(
        "tx_chain",
        record_label,
        tx_chain(&bits, &cfg.ofdm, plan, link),
    )?;
    let rx_wave = stage(
        "channel",
        record_label,
        run_ob2b(&tx.waveform, link, cfg.ofdm.sample_rate(), noise_seed),
    )?;
    let rx = stage(
        "rx_chain",
        record_label,
        rx_chain(&rx_wave, &tx, &cfg.ofdm, plan),
    )?;
    log::debug!(
        "inv_eta={record_label} snr={:.3} dB bit_errors={}",
        rx.snr_db,
        rx.bit_errors
    );
    Ok(SweepRecord {
        inv_eta: record_label,
        order_m: plan.order_m,
        n_p: plan.n_p,
        n_r: plan.n_r,
        snr_db: rx.snr_db,
        evm_pct: 100.0 * rx.evm,
        seed: noise_seed,
        wall_time_s: if cfg.output.record_wall_time {
            started.elapsed().as_secs_f64()
        } else {
            0.0
        },
    })
}

/// One end-to-end run at sweep point `index` (which selects the noise stream).
pub fn run_point(cfg: &RunConfig, inv_eta: f64, index: u64) -> Result<SweepRecord> {
    let plan = stage(
        "plan",
        inv_eta,
        derive_plan_with(inv_eta, cfg.ofdm.n_symbols, &cfg.plan.options()),
    )?;
    simulate(cfg, &plan, &cfg.link, derive_seed(cfg.seed, index), inv_eta)
}

pub fn run_single(cfg: &RunConfig, inv_eta: f64) -> Result<SweepRecord> {
    run_point(cfg, inv_eta, 0)
}

/// Digital-only run of order `m` over the link configured in `cfg.drof`.
pub fn run_drof(cfg: &RunConfig, m: usize) -> Result<SweepRecord> {
    let label = m as f64;
    let plan = stage(
        "plan",
        label,
        derive_drof_plan(m, cfg.ofdm.n_symbols, &cfg.plan.options()),
    )?;
    let link = LinkConfig {
        impairments: cfg.drof.impairments,
        ..cfg.link.clone()
    };
    simulate(cfg, &plan, &link, derive_seed(cfg.seed, 0), label)
}

/// Runs every grid point (concurrently when `parallel`) and fits SNR against 1/eta.
pub fn run_sweep(cfg: &RunConfig, parallel: bool) -> SweepOutcome {
    let grid = cfg.sweep.points();
    let one = |(i, x): (usize, &f64)| {
        run_point(cfg, *x, i as u64).map_err(|e| PointFailure {
            inv_eta: *x,
            error: e.to_string(),
        })
    };
    let points: Vec<_> = if parallel {
        grid.par_iter().enumerate().map(one).collect()
    } else {
        grid.iter().enumerate().map(one).collect()
    };
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.as_ref().ok())
        .map(|r| (r.inv_eta, r.snr_db))
        .collect();
    let fit = linear_fit(&xy).map_err(|e| e.to_string());
    SweepOutcome { points, fit }
}
