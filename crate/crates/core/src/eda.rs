//! The modulation/demodulation kernels and the time-division multiplex.
//!
//! Stage `i` interleaves its input, splits it into a transitional part
//! `S_P,i` and a pass-through part `S_R,i`, quantizes `S_P,i` into the digital
//! segment `S_D,i` and keeps the renormalised difference as the analog
//! residual `S_A,i`, which feeds stage `i + 1`. The multiplex is
//! `[S_D,1 .. S_D,M | S_A,M | S_R,M]`, each segment power-scaled by its alpha.
//! Demodulation unwinds the cascade from stage `M` back to stage 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::rms;
use crate::error::{ensure_len, Error, Result};
use crate::plan::ModulationPlan;
use crate::quantizer::{quantize, residual, slice_to_lattice, QuantizerSpec};
use crate::rng::{derive_seed, permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameRole {
    Original,
    Transitional,
    Digital(usize),
    AnalogResidual,
    ResidualArof,
    Multiplexed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalFrame {
    pub samples: Vec<Complex64>,
    pub role: FrameRole,
    /// Samples per second; metadata only.
    pub sample_rate: f64,
}

impl SignalFrame {
    pub fn new(samples: Vec<Complex64>, role: FrameRole, sample_rate: f64) -> Self {
        Self {
            samples,
            role,
            sample_rate,
        }
    }

    pub fn original(samples: Vec<Complex64>, sample_rate: f64) -> Self {
        Self::new(samples, FrameRole::Original, sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    Digital,
    Analog,
    Residual,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    /// 1-based cascade stage that produced the segment.
    pub stage: usize,
    pub offset: usize,
    pub len: usize,
    /// Gain applied before multiplexing (alpha / segment RMS).
    pub scale: f64,
}

/// Side information a stage leaves for the demodulator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Quantizer with its realised full-scale range.
    pub quantizer: QuantizerSpec,
    /// Gain that renormalised the analog residual (`r_b / rms`).
    pub residual_gain: f64,
    pub clipped: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdaMultiplex {
    pub samples: Vec<Complex64>,
    pub layout: Vec<Segment>,
    pub stages: Vec<StageRecord>,
    pub plan: ModulationPlan,
}

impl EdaMultiplex {
    /// Same layout and side information carrying `samples` (e.g. after a channel).
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        ensure_len(self.samples.len(), samples.len())?;
        Ok(Self {
            samples,
            layout: self.layout.clone(),
            stages: self.stages.clone(),
            plan: self.plan.clone(),
        })
    }

    pub fn segment(&self, kind: SegmentKind, stage: usize) -> Option<&Segment> {
        self.layout
            .iter()
            .find(|s| s.kind == kind && s.stage == stage)
    }

    pub fn segment_samples(&self, seg: &Segment) -> &[Complex64] {
        &self.samples[seg.offset..seg.offset + seg.len]
    }
}

pub struct KernelOutput {
    pub s_r: SignalFrame,
    pub s_d: SignalFrame,
    pub s_a: SignalFrame,
    pub record: StageRecord,
}

fn stage_seed(plan: &ModulationPlan, stage: usize) -> u64 {
    derive_seed(plan.interleaver_seed, stage as u64)
}

/// Applies the seeded permutation: `y[k] = x[perm[k]]`.
pub fn interleave(x: &[Complex64], seed: u64) -> Vec<Complex64> {
    permutation(x.len(), seed)
        .into_iter()
        .map(|i| x[i])
        .collect()
}

pub fn deinterleave(y: &[Complex64], seed: u64) -> Vec<Complex64> {
    let mut x = vec![Complex64::new(0.0, 0.0); y.len()];
    for (k, i) in permutation(y.len(), seed).into_iter().enumerate() {
        x[i] = y[k];
    }
    x
}

/// First `n_p` samples are transitional, the last `n_r` are residual.
pub fn partition(
    x: &[Complex64],
    n_p: usize,
    n_r: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    ensure_len(x.len(), n_p + n_r)?;
    Ok((x[..n_p].to_vec(), x[n_p..].to_vec()))
}

pub fn combine(transitional: &[Complex64], residual: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(transitional.len() + residual.len());
    out.extend_from_slice(transitional);
    out.extend_from_slice(residual);
    out
}

/// One cascade stage (1-based `stage`).
pub fn modulation_kernel(
    s_in: &SignalFrame,
    stage: usize,
    plan: &ModulationPlan,
) -> Result<KernelOutput> {
    if stage == 0 || stage > plan.order_m {
        return Err(Error::domain(format!(
            "stage {stage} outside 1..={}",
            plan.order_m
        )));
    }
    let expected_role = if stage == 1 {
        FrameRole::Original
    } else {
        FrameRole::AnalogResidual
    };
    if s_in.role != expected_role {
        return Err(Error::domain(format!(
            "stage {stage} expects a {expected_role:?} frame, got {:?}",
            s_in.role
        )));
    }
    ensure_len(plan.frame_len, s_in.len())?;

    let fs = s_in.sample_rate;
    let mixed = interleave(&s_in.samples, stage_seed(plan, stage));
    let (n_p, n_r) = plan.stage_partition(stage);
    let (s_p, s_r) = partition(&mixed, n_p, n_r)?;

    let template = plan.stage_quantizers[stage - 1];
    let peak = template.peak_of(&s_p);
    let full_scale = if peak > 0.0 { plan.r_a * peak } else { 1.0 };
    let quantizer = template.with_full_scale(full_scale);
    let q = quantize(&s_p, &quantizer);
    let mut s_a = residual(&s_p, &q.samples)?;
    let res_rms = rms(&s_a);
    let residual_gain = if res_rms > 0.0 {
        plan.r_b / res_rms
    } else {
        1.0
    };
    s_a.iter_mut().for_each(|v| *v *= residual_gain);

    Ok(KernelOutput {
        s_r: SignalFrame::new(s_r, FrameRole::ResidualArof, fs),
        s_d: SignalFrame::new(q.samples, FrameRole::Digital(stage), fs),
        s_a: SignalFrame::new(s_a, FrameRole::AnalogResidual, fs),
        record: StageRecord {
            quantizer,
            residual_gain,
            clipped: q.clipped,
        },
    })
}

fn segment_scale(x: &[Complex64], alpha: f64) -> f64 {
    let r = rms(x);
    if r > 0.0 {
        alpha / r
    } else {
        1.0
    }
}

/// Runs the full cascade and time-multiplexes the scaled segments.
pub fn eda_modulate(s_o: &SignalFrame, plan: &ModulationPlan) -> Result<EdaMultiplex> {
    if s_o.role != FrameRole::Original {
        return Err(Error::domain("eda_modulate expects an original frame"));
    }
    ensure_len(plan.frame_len, s_o.len())?;

    let mut digital = Vec::with_capacity(plan.order_m);
    let mut stages = Vec::with_capacity(plan.order_m);
    let mut input = s_o.clone();
    let mut last_r = Vec::new();
    for stage in 1..=plan.order_m {
        let out = modulation_kernel(&input, stage, plan)?;
        digital.push(out.s_d.samples);
        stages.push(out.record);
        last_r = out.s_r.samples;
        input = out.s_a;
    }
    let last_a = input.samples;

    let mut pieces: Vec<(SegmentKind, usize, Vec<Complex64>, f64)> = digital
        .into_iter()
        .enumerate()
        .map(|(i, d)| (SegmentKind::Digital, i + 1, d, plan.alpha_d))
        .collect();
    if !plan.drof_mode {
        pieces.push((SegmentKind::Analog, plan.order_m, last_a, plan.alpha_a));
        pieces.push((SegmentKind::Residual, plan.order_m, last_r, plan.alpha_r));
    }

    let mut samples = Vec::with_capacity(plan.mux_len());
    let mut layout = Vec::new();
    for (kind, stage, seg, alpha) in pieces {
        if seg.is_empty() {
            continue;
        }
        let scale = segment_scale(&seg, alpha);
        layout.push(Segment {
            kind,
            stage,
            offset: samples.len(),
            len: seg.len(),
            scale,
        });
        samples.extend(seg.into_iter().map(|v| v * scale));
    }

    Ok(EdaMultiplex {
        samples,
        layout,
        stages,
        plan: plan.clone(),
    })
}

fn check_layout(mux: &EdaMultiplex, plan: &ModulationPlan) -> Result<()> {
    if mux.plan != *plan {
        return Err(Error::domain("multiplex was produced by a different plan"));
    }
    if mux.stages.len() != plan.order_m {
        return Err(Error::domain("stage records do not match plan order"));
    }
    let mut expected: Vec<(SegmentKind, usize, usize)> = (1..=plan.order_m)
        .map(|s| (SegmentKind::Digital, s, plan.stage_partition(s).0))
        .collect();
    if !plan.drof_mode {
        expected.push((SegmentKind::Analog, plan.order_m, plan.n_p));
        expected.push((SegmentKind::Residual, plan.order_m, plan.n_r));
    }
    expected.retain(|e| e.2 > 0);
    if expected.len() != mux.layout.len() {
        return Err(Error::domain("layout segment count does not match plan"));
    }
    let mut offset = 0;
    for (seg, (kind, stage, len)) in mux.layout.iter().zip(expected) {
        if seg.kind != kind || seg.stage != stage || seg.len != len || seg.offset != offset {
            return Err(Error::domain(format!(
                "layout entry {seg:?} inconsistent with plan"
            )));
        }
        if !(seg.scale > 0.0 && seg.scale.is_finite()) {
            return Err(Error::domain("segment scale must be positive"));
        }
        offset += len;
    }
    ensure_len(offset, mux.samples.len())
}

/// Inverts [`eda_modulate`]. With `noisy`, each digital segment is first
/// sliced back onto its stage lattice.
pub fn eda_demodulate(
    mux: &EdaMultiplex,
    plan: &ModulationPlan,
    noisy: bool,
) -> Result<SignalFrame> {
    check_layout(mux, plan)?;

    let unscaled = |kind, stage| -> Vec<Complex64> {
        match mux.segment(kind, stage) {
            Some(seg) => mux
                .segment_samples(seg)
                .iter()
                .map(|v| v / seg.scale)
                .collect(),
            None => Vec::new(),
        }
    };

    let m = plan.order_m;
    let mut analog = if plan.drof_mode {
        vec![Complex64::new(0.0, 0.0); plan.n_p]
    } else {
        unscaled(SegmentKind::Analog, m)
    };
    let residual_seg = if plan.drof_mode {
        Vec::new()
    } else {
        unscaled(SegmentKind::Residual, m)
    };
    if analog.is_empty() {
        analog = vec![Complex64::new(0.0, 0.0); plan.n_p];
    }

    let mut current = Vec::new();
    for stage in (1..=m).rev() {
        let record = &mux.stages[stage - 1];
        let mut digital = unscaled(SegmentKind::Digital, stage);
        if noisy {
            digital = slice_to_lattice(&digital, &record.quantizer);
        }
        let s_a = if stage == m {
            std::mem::take(&mut analog)
        } else {
            current
        };
        ensure_len(digital.len(), s_a.len())?;
        let s_p: Vec<Complex64> = digital
            .iter()
            .zip(&s_a)
            .map(|(d, a)| d + a / record.residual_gain)
            .collect();
        let pass = if stage == m {
            residual_seg.as_slice()
        } else {
            &[]
        };
        let mixed = combine(&s_p, pass);
        ensure_len(plan.frame_len, mixed.len())?;
        current = deinterleave(&mixed, stage_seed(plan, stage));
    }

    Ok(SignalFrame::new(current, FrameRole::Original, 0.0))
}
