//! The non-collapsing measurement oracle `Q` and its output law `DQ^O_C`.
//!
//! A program is split at its `MEASURE` gates into segments `(C_i, M_i)`;
//! gates after the last measurement form a final segment with empty `M`.
//! Each segment may end in one phase-style oracle call. After `M_i` the
//! oracle draws a full sample `v_i` that leaves the state alone.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::circuit::sim::apply_gate;
use crate::circuit::{Gate, OracleAidedCircuit, OracleStyle, SimError};
use crate::oracle::Oracle;
use crate::qstate::{measure, sample_noncollapsing, BotExtendedState, FiniteDistribution, StateError};

/// Largest `ℓ·T` handled by exact enumeration.
pub const MAX_TRANSCRIPT_BITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("segment {0} makes more than one oracle call")]
    ManyCalls(usize),
    #[error("segment {0}: the oracle call must be the last gate")]
    CallNotLast(usize),
    #[error("segment {0}: oracle calls must be phase style")]
    NotPhase(usize),
    #[error("gate {gate} alters measured qubit {qubit}")]
    WritesMeasured { gate: usize, qubit: usize },
    #[error("transcript of {0} bits is too large to enumerate")]
    TooLarge(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub gates: Vec<Gate>,
    pub measured: Vec<usize>,
}

/// The samples `(v_1, …, v_T)` of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovTranscript {
    pub steps: Vec<BitString>,
}

impl MarkovTranscript {
    /// `v_1 ‖ … ‖ v_T` with `v_1` in the low bits.
    pub fn to_bitstring(&self) -> BitString {
        self.steps.iter().fold(BitString::empty(), |acc, v| acc.concat(v))
    }
}

/// Splits and checks a program.
pub fn segments(c: &OracleAidedCircuit) -> Result<Vec<Segment>, QError> {
    c.validate().map_err(SimError::from)?;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for g in &c.gates {
        match g {
            Gate::Measure(m) => out.push(Segment { gates: std::mem::take(&mut cur), measured: m.clone() }),
            g => cur.push(g.clone()),
        }
    }
    if !cur.is_empty() || out.is_empty() {
        out.push(Segment { gates: cur, measured: Vec::new() });
    }
    let mut frozen: Vec<usize> = Vec::new();
    let mut gate_idx = 0;
    for (i, seg) in out.iter().enumerate() {
        let calls: Vec<usize> = (0..seg.gates.len()).filter(|&k| seg.gates[k].is_oracle()).collect();
        if calls.len() > 1 {
            return Err(QError::ManyCalls(i));
        }
        if let Some(&k) = calls.first() {
            if k + 1 != seg.gates.len() {
                return Err(QError::CallNotLast(i));
            }
            if !matches!(seg.gates[k], Gate::Oracle { style: OracleStyle::Phase, .. }) {
                return Err(QError::NotPhase(i));
            }
        }
        for g in &seg.gates {
            if let Some(&q) = frozen.iter().find(|&&q| !g.preserves_basis_of(q)) {
                return Err(QError::WritesMeasured { gate: gate_idx, qubit: q });
            }
            gate_idx += 1;
        }
        gate_idx += 1;
        frozen.extend(seg.measured.iter().copied());
    }
    Ok(out)
}

fn run_segment(state: &mut BotExtendedState, seg: &Segment, o: &dyn Oracle) -> Result<(), QError> {
    for g in &seg.gates {
        apply_gate(state, g, o)?;
    }
    Ok(())
}

/// One draw from `DQ^O_C`.
pub fn q_sample<R: Rng + ?Sized>(
    c: &OracleAidedCircuit,
    o: &dyn Oracle,
    rng: &mut R,
) -> Result<MarkovTranscript, QError> {
    let segs = segments(c)?;
    let mut state = BotExtendedState::zero(c.num_qubits);
    let mut steps = Vec::with_capacity(segs.len());
    for seg in &segs {
        run_segment(&mut state, seg, o)?;
        if !seg.measured.is_empty() {
            state = measure(&state, &seg.measured, rng)?.1;
        }
        steps.push(sample_noncollapsing(&state, rng)?);
    }
    Ok(MarkovTranscript { steps })
}

/// Exact law of `v_1 ‖ … ‖ v_T`, enumerating every measurement branch.
pub fn dq_distribution(c: &OracleAidedCircuit, o: &dyn Oracle) -> Result<FiniteDistribution, QError> {
    let segs = segments(c)?;
    let l = c.num_qubits;
    let bits = l * segs.len();
    if bits > MAX_TRANSCRIPT_BITS {
        return Err(QError::TooLarge(bits));
    }
    let law = suffix_law(&segs, 0, BotExtendedState::zero(l), o)?;
    Ok(FiniteDistribution::from_weights(law.into_iter().map(|(v, p)| (BitString::new(v, bits), p)))?)
}

fn suffix_law(
    segs: &[Segment],
    i: usize,
    mut state: BotExtendedState,
    o: &dyn Oracle,
) -> Result<BTreeMap<u64, f64>, QError> {
    let mut out = BTreeMap::new();
    if i == segs.len() {
        out.insert(0, 1.0);
        return Ok(out);
    }
    let l = state.num_qubits();
    run_segment(&mut state, &segs[i], o)?;
    let posts = if segs[i].measured.is_empty() {
        vec![(1.0, state)]
    } else {
        state.branches(&segs[i].measured)?.into_iter().map(|(_, p, s)| (p, s)).collect()
    };
    for (p, post) in posts {
        let born = post.probabilities();
        let rest = suffix_law(segs, i + 1, post, o)?;
        for (v, &pv) in born.iter().enumerate().filter(|(_, &pv)| pv > 0.0) {
            for (&tail, &pt) in &rest {
                *out.entry(v as u64 | (tail << l)).or_insert(0.0) += p * pv * pt;
            }
        }
    }
    Ok(out)
}

/// Expected query-register mass on `set` at each oracle call, averaged over
/// the measurement branches.
pub fn q_query_masses(
    c: &OracleAidedCircuit,
    o: &dyn Oracle,
    set: &std::collections::BTreeSet<BitString>,
) -> Result<Vec<f64>, QError> {
    let segs = segments(c)?;
    let calls = segs.iter().filter(|s| s.gates.last().is_some_and(Gate::is_oracle)).count();
    let mut out = vec![0.0; calls];
    masses_from(&segs, 0, 0, 1.0, BotExtendedState::zero(c.num_qubits), o, set, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn masses_from(
    segs: &[Segment],
    i: usize,
    call: usize,
    weight: f64,
    mut state: BotExtendedState,
    o: &dyn Oracle,
    set: &std::collections::BTreeSet<BitString>,
    out: &mut [f64],
) -> Result<(), QError> {
    if i == segs.len() {
        return Ok(());
    }
    let mut call = call;
    for g in &segs[i].gates {
        if let Gate::Oracle { query, .. } = g {
            let probs = state.outcome_probabilities(query)?;
            out[call] +=
                weight * set.iter().filter(|x| x.len() == query.len()).map(|x| probs[x.value() as usize]).sum::<f64>();
            call += 1;
        }
        apply_gate(&mut state, g, o)?;
    }
    if segs[i].measured.is_empty() {
        return masses_from(segs, i + 1, call, weight, state, o, set, out);
    }
    for (_, p, post) in state.branches(&segs[i].measured)? {
        masses_from(segs, i + 1, call, weight * p, post, o, set, out)?;
    }
    Ok(())
}
