//! Transmitter and receiver DSP chains around the EDA multiplex.
//!
//! Burst layout at the symbol rate: `[guard | preamble | multiplex | guard]`.
//! Guards are zero symbols that absorb the edges of the circular spectral
//! filters in the link.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gsop::split_iq;
use super::{
    gram_schmidt_orthonormalize, insert_pilot, lms_equalize, ofdm_demodulate, ofdm_modulate,
    pilot_foc_cpr, pre_emphasize, pulse_shape, rrc_filter, rrc_taps, synchronize, LmsConfig,
    OfdmConfig, QamConstellation,
};
use crate::channel::{dac_quantize, LinkConfig};
use crate::eda::{eda_demodulate, eda_modulate, EdaMultiplex, SignalFrame};
use crate::error::{ensure_len, Result};
use crate::metrics::{evm_rms, snr_db_from_evm};
use crate::plan::ModulationPlan;

const PREAMBLE_SEED: u64 = 0x5052_4541_4D42_4C45;

/// Time-domain preamble: OFDM symbols of pseudo-random QPSK.
pub fn preamble_symbols(cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(PREAMBLE_SEED);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let freq: Vec<Complex64> = (0..cfg.preamble_len * cfg.fft_size)
        .map(|_| {
            Complex64::new(
                if rng.gen::<bool>() { h } else { -h },
                if rng.gen::<bool>() { h } else { -h },
            )
        })
        .collect();
    ofdm_modulate(&freq, cfg.fft_size)
}

#[derive(Clone, Debug)]
pub struct TxFrame {
    /// Oversampled transmit waveform after the DAC.
    pub waveform: Vec<Complex64>,
    pub bits: Vec<u8>,
    /// QAM symbols before OFDM modulation; the EVM reference.
    pub data_symbols: Vec<Complex64>,
    pub preamble: Vec<Complex64>,
    /// Multiplex as transmitted; its layout and stage records are the side information.
    pub multiplex: EdaMultiplex,
}

#[derive(Clone, Debug)]
pub struct RxOutput {
    pub bits: Vec<u8>,
    pub symbols: Vec<Complex64>,
    pub evm: f64,
    pub snr_db: f64,
    pub bit_errors: usize,
    pub sync_offset: usize,
}

pub fn tx_chain(
    bits: &[u8],
    cfg: &OfdmConfig,
    plan: &ModulationPlan,
    link: &LinkConfig,
) -> Result<TxFrame> {
    let qam = QamConstellation::new(cfg.qam_order)?;
    let data_symbols = qam.map(bits)?;
    ensure_len(plan.frame_len, data_symbols.len())?;
    let time = ofdm_modulate(&data_symbols, cfg.fft_size)?;
    let multiplex = eda_modulate(&SignalFrame::original(time, cfg.symbol_rate()), plan)?;
    let preamble = preamble_symbols(cfg)?;

    let zero = Complex64::new(0.0, 0.0);
    let mut burst = vec![zero; cfg.guard_symbols];
    burst.extend_from_slice(&preamble);
    burst.extend_from_slice(&multiplex.samples);
    burst.extend(std::iter::repeat_n(zero, cfg.guard_symbols));

    let taps = rrc_taps(cfg.rolloff, cfg.sps, cfg.rrc_taps);
    let mut wave = pulse_shape(&burst, &taps, cfg.sps);
    if link.impairments.tx_response {
        let resp = link.tx_response.resolve()?;
        wave = pre_emphasize(&wave, cfg.sample_rate(), &resp, cfg.preemphasis_clamp_db);
    }
    wave = insert_pilot(&wave, cfg);
    if link.impairments.dac {
        wave = dac_quantize(&wave, link.enob_bits, cfg.clip_ratio_db);
    }

    Ok(TxFrame {
        waveform: wave,
        bits: bits.to_vec(),
        data_symbols,
        preamble,
        multiplex,
    })
}

pub fn rx_chain(
    received: &[Complex64],
    tx: &TxFrame,
    cfg: &OfdmConfig,
    plan: &ModulationPlan,
) -> Result<RxOutput> {
    let (i, q) = split_iq(received);
    let y = gram_schmidt_orthonormalize(&i, &q)?;
    let y = pilot_foc_cpr(&y, cfg)?;
    let taps = rrc_taps(cfg.rolloff, cfg.sps, cfg.rrc_taps);
    let y = rrc_filter(&y, &taps);

    let offset = synchronize(&y, &tx.preamble, cfg.sps, cfg.sync_threshold)?;
    let n_pre = tx.preamble.len();
    let n_mux = tx.multiplex.samples.len();
    let lms = LmsConfig {
        taps: cfg.lms_taps,
        step: cfg.lms_step,
        sps: cfg.sps,
    };
    let eq = lms_equalize(&y[offset..], &tx.preamble, n_pre + n_mux, &lms)?;

    let mux = tx.multiplex.with_samples(eq.symbols[n_pre..].to_vec())?;
    let frame = eda_demodulate(&mux, plan, true)?;
    let symbols = ofdm_demodulate(&frame.samples, cfg.fft_size)?;

    let evm = evm_rms(&symbols, &tx.data_symbols)?;
    let bits = QamConstellation::new(cfg.qam_order)?.demap(&symbols);
    let bit_errors = bits.iter().zip(&tx.bits).filter(|(a, b)| a != b).count();
    Ok(RxOutput {
        bits,
        symbols,
        evm,
        snr_db: snr_db_from_evm(evm),
        bit_errors,
        sync_offset: offset,
    })
}
