//! Statevector simulation of oracle-aided circuits.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{CircuitError, Gate, OracleAidedCircuit, OracleStyle};
use crate::bits::BitString;
use crate::oracle::Oracle;
use crate::qstate::{gather, scatter, BotExtendedState, FiniteDistribution, StateError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Invalid(#[from] CircuitError),
    #[error("oracle answered {got} bits for a {expected}-bit response register")]
    ResponseWidth { expected: usize, got: usize },
    #[error("phase query needs a 1-bit answer, oracle gave {0} bits")]
    PhaseWidth(usize),
    #[error("measurement gate in a unitary simulation")]
    Measurement,
    #[error(transparent)]
    State(#[from] StateError),
}

/// Snapshots taken immediately before each oracle call.
#[derive(Clone, Debug, Default)]
pub struct QueryTrace {
    pub pre_states: Vec<BotExtendedState>,
    pub marginals: Vec<FiniteDistribution>,
}

impl QueryTrace {
    pub fn len(&self) -> usize {
        self.pre_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pre_states.is_empty()
    }

    /// Query mass on `set` summed over every call.
    pub fn query_mass(&self, set: &BTreeSet<BitString>) -> f64 {
        self.marginals.iter().map(|m| set.iter().map(|x| m.prob(x)).sum::<f64>()).sum()
    }
}

/// Answers of `o` on every value of a `width`-bit query register.
fn answer_table(o: &dyn Oracle, width: usize) -> Vec<Option<BitString>> {
    (0..1u64 << width).map(|x| o.query(&BitString::new(x, width))).collect()
}

/// One oracle call in place. ⊥ answers act as the identity.
pub(crate) fn apply_oracle(
    state: &mut BotExtendedState,
    style: OracleStyle,
    query: &[usize],
    response: &[usize],
    o: &dyn Oracle,
) -> Result<(), SimError> {
    let answers = answer_table(o, query.len());
    let n = state.num_qubits();
    match style {
        OracleStyle::Xor => {
            let mut masks = vec![0usize; answers.len()];
            for (x, a) in answers.iter().enumerate() {
                if let Some(y) = a {
                    if y.len() != response.len() {
                        return Err(SimError::ResponseWidth { expected: response.len(), got: y.len() });
                    }
                    masks[x] = scatter(y.value() as usize, response);
                }
            }
            let amps = state.amplitudes_mut();
            let mut next = vec![C64::new(0.0, 0.0); 1 << n];
            for (i, a) in amps[..1 << n].iter().enumerate() {
                next[i ^ masks[gather(i, query)]] = *a;
            }
            amps[..1 << n].copy_from_slice(&next);
        }
        OracleStyle::Phase => {
            let mut flip = vec![false; answers.len()];
            for (x, a) in answers.iter().enumerate() {
                if let Some(y) = a {
                    if y.len() != 1 {
                        return Err(SimError::PhaseWidth(y.len()));
                    }
                    flip[x] = y.bit(0);
                }
            }
            for (i, a) in state.amplitudes_mut()[..1 << n].iter_mut().enumerate() {
                if flip[gather(i, query)] {
                    *a = -*a;
                }
            }
        }
    }
    Ok(())
}

/// Applies one non-measurement gate.
pub(crate) fn apply_gate(state: &mut BotExtendedState, g: &Gate, o: &dyn Oracle) -> Result<(), SimError> {
    match g {
        Gate::Oracle { style, query, response } => apply_oracle(state, *style, query, response, o),
        Gate::Measure(_) => Err(SimError::Measurement),
        Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::U2(a, b, _) => {
            state.apply_2q(*a, *b, &g.matrix_2q().unwrap());
            Ok(())
        }
        _ => {
            let q = g.qubits()[0];
            state.apply_1q(q, &g.matrix_1q().unwrap());
            Ok(())
        }
    }
}

fn run(
    c: &OracleAidedCircuit,
    o: &dyn Oracle,
    mut state: BotExtendedState,
    mut trace: Option<&mut QueryTrace>,
) -> Result<BotExtendedState, SimError> {
    c.validate()?;
    if state.num_qubits() != c.num_qubits {
        return Err(StateError::DimensionMismatch(state.num_qubits(), c.num_qubits).into());
    }
    for g in &c.gates {
        if let (Some(t), Gate::Oracle { query, .. }) = (trace.as_deref_mut(), g) {
            let probs = state.outcome_probabilities(query)?;
            let m = FiniteDistribution::from_weights(
                probs.iter().enumerate().map(|(x, &p)| (BitString::new(x as u64, query.len()), p)),
            )?;
            t.pre_states.push(state.clone());
            t.marginals.push(m);
        }
        apply_gate(&mut state, g, o)?;
    }
    Ok(state)
}

/// `C^O|0…0⟩`.
pub fn simulate(c: &OracleAidedCircuit, o: &dyn Oracle) -> Result<BotExtendedState, SimError> {
    run(c, o, BotExtendedState::zero(c.num_qubits), None)
}

/// `C^O` applied to an arbitrary input state.
pub fn simulate_from(
    c: &OracleAidedCircuit,
    o: &dyn Oracle,
    input: BotExtendedState,
) -> Result<BotExtendedState, SimError> {
    run(c, o, input, None)
}

pub fn simulate_traced(c: &OracleAidedCircuit, o: &dyn Oracle) -> Result<(BotExtendedState, QueryTrace), SimError> {
    let mut trace = QueryTrace::default();
    let out = run(c, o, BotExtendedState::zero(c.num_qubits), Some(&mut trace))?;
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::c;
    use crate::oracle::ClassicalOracle;
    use crate::qstate::{euclidean_distance, TOL};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn identity_oracle(width: usize) -> ClassicalOracle {
        ClassicalOracle::from_fn(width, width, |x| Some(*x))
    }

    #[test]
    fn empty_circuit_gives_zero_state() {
        let out = simulate(&OracleAidedCircuit::new(2), &identity_oracle(1)).unwrap();
        assert_eq!(out, BotExtendedState::zero(2));
    }

    #[test]
    fn xor_query_copies_into_response() {
        let circ = OracleAidedCircuit::with_gates(
            2,
            vec![Gate::H(0), Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] }],
        );
        let out = simulate(&circ, &identity_oracle(1)).unwrap();
        let h = c(FRAC_1_SQRT_2, 0.0);
        let z = c(0.0, 0.0);
        let want = BotExtendedState::from_amplitudes(2, vec![h, z, z, h], false).unwrap();
        assert!(euclidean_distance(&out, &want).unwrap() < TOL);
    }

    #[test]
    fn phase_query_acts_as_z() {
        let circ = OracleAidedCircuit::with_gates(
            1,
            vec![Gate::H(0), Gate::Oracle { style: OracleStyle::Phase, query: vec![0], response: vec![] }],
        );
        let out = simulate(&circ, &identity_oracle(1)).unwrap();
        let h = FRAC_1_SQRT_2;
        let want = BotExtendedState::from_amplitudes(1, vec![c(h, 0.0), c(-h, 0.0)], false).unwrap();
        assert!(euclidean_distance(&out, &want).unwrap() < TOL);
    }

    #[test]
    fn trace_records_query_mass() {
        let plain = OracleAidedCircuit::with_gates(1, vec![Gate::H(0)]);
        let (_, t) = simulate_traced(&plain, &identity_oracle(1)).unwrap();
        assert!(t.is_empty());

        let circ = OracleAidedCircuit::with_gates(
            1,
            vec![Gate::H(0), Gate::Oracle { style: OracleStyle::Phase, query: vec![0], response: vec![] }],
        );
        let (_, t) = simulate_traced(&circ, &identity_oracle(1)).unwrap();
        assert_eq!(t.len(), 1);
        let one: BitString = "1".parse().unwrap();
        assert!((t.marginals[0].prob(&one) - 0.5).abs() < TOL);
        assert!((t.query_mass(&BTreeSet::from([one])) - 0.5).abs() < TOL);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let circ = OracleAidedCircuit::with_gates(
            2,
            vec![Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] }],
        );
        let wide = ClassicalOracle::from_fn(1, 2, |_| Some(BitString::new(1, 2)));
        assert_eq!(simulate(&circ, &wide), Err(SimError::ResponseWidth { expected: 1, got: 2 }));
        let phase = OracleAidedCircuit::with_gates(
            1,
            vec![Gate::Oracle { style: OracleStyle::Phase, query: vec![0], response: vec![] }],
        );
        assert_eq!(simulate(&phase, &wide), Err(SimError::PhaseWidth(2)));
    }

    #[test]
    fn conjugate_circuit_conjugates_amplitudes() {
        let circ = OracleAidedCircuit::with_gates(
            2,
            vec![
                Gate::H(0),
                Gate::S(0),
                Gate::T(0),
                Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] },
                Gate::H(1),
                Gate::S(1),
            ],
        );
        let o = identity_oracle(1);
        let a = simulate(&circ, &o).unwrap();
        let b = simulate(&crate::circuit::conjugate_circuit(&circ), &o).unwrap();
        assert!(euclidean_distance(&a.conj(), &b).unwrap() < TOL);
    }
}
