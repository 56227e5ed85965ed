//! The collision distribution `DCol^O_C` and its doubled state.

use rand::Rng;

use crate::bits::BitString;
use crate::circuit::{canonical_decode, simulate, OracleAidedCircuit};
use crate::oracle::Oracle;
use crate::qstate::{measure, BotExtendedState, FiniteDistribution, StateError, C64, MAX_QUBITS, PROB_EPS};
use crate::seed::keyed_rng;

/// One branch `√p_s |s⟩|ψ_s⟩` of the output state.
#[derive(Clone, Debug)]
pub struct Branch {
    pub s: BitString,
    pub p: f64,
    /// `|ψ_s⟩` over the B register, bit `j` = qubit `B[j]`.
    pub psi: Vec<C64>,
}

#[derive(Clone, Debug)]
pub enum ColKind {
    /// Invalid key: the literal |⊥⟩.
    Bot,
    Doubled {
        a_len: usize,
        b_len: usize,
        branches: Vec<Branch>,
        /// `Σ_s √p_s |s⟩|ψ_s⟩|ψ_s⟩` over A, B, B′ (A in the low positions).
        state: BotExtendedState,
    },
}

#[derive(Clone, Debug)]
pub struct ColState {
    pub key: Vec<u8>,
    pub kind: ColKind,
}

impl ColState {
    pub fn is_bot(&self) -> bool {
        matches!(self.kind, ColKind::Bot)
    }

    pub fn state(&self) -> Option<&BotExtendedState> {
        match &self.kind {
            ColKind::Bot => None,
            ColKind::Doubled { state, .. } => Some(state),
        }
    }

    /// Width of the doubled register, `|A| + 2|B|`.
    pub fn width(&self) -> Option<usize> {
        match &self.kind {
            ColKind::Bot => None,
            ColKind::Doubled { a_len, b_len, .. } => Some(a_len + 2 * b_len),
        }
    }

    /// Exact law of `DCol^O_C`; `None` for the ⊥ key.
    pub fn distribution(&self) -> Option<FiniteDistribution> {
        let s = self.state()?;
        let n = s.num_qubits();
        FiniteDistribution::from_weights(
            s.probabilities()
                .into_iter()
                .enumerate()
                .filter(|(_, p)| *p > 0.0)
                .map(|(i, p)| (BitString::new(i as u64, n), p)),
        )
        .ok()
    }
}

/// Schmidt data of a circuit output, grouped by the A value.
pub fn branches(c: &OracleAidedCircuit, out: &BotExtendedState) -> Vec<Branch> {
    let (a, b) = (&c.split.a, &c.split.b);
    let mut groups = vec![vec![C64::new(0.0, 0.0); 1 << b.len()]; 1 << a.len()];
    for (i, amp) in out.amplitudes()[..1 << c.num_qubits].iter().enumerate() {
        groups[crate::qstate::gather(i, a)][crate::qstate::gather(i, b)] = *amp;
    }
    groups
        .into_iter()
        .enumerate()
        .filter_map(|(s, g)| {
            let p: f64 = g.iter().map(|z| z.norm_sqr()).sum();
            (p >= PROB_EPS).then(|| {
                let norm = p.sqrt();
                Branch { s: BitString::new(s as u64, a.len()), p, psi: g.iter().map(|z| z / norm).collect() }
            })
        })
        .collect()
}

/// Doubled state from branches; the dropped mass is renormalized away.
pub fn doubled_state(a_len: usize, b_len: usize, branches: &[Branch]) -> Result<BotExtendedState, StateError> {
    let n = a_len + 2 * b_len;
    if n > MAX_QUBITS {
        return Err(StateError::TooManyQubits(n));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for br in branches {
        let sq = br.p.sqrt();
        for (b1, x) in br.psi.iter().enumerate() {
            if x.norm() == 0.0 {
                continue;
            }
            for (b2, y) in br.psi.iter().enumerate() {
                let idx = br.s.value() as usize | (b1 << a_len) | (b2 << (a_len + b_len));
                amps[idx] = sq * x * y;
            }
        }
    }
    let mut s = BotExtendedState::from_unnormalized(n, amps, false)?;
    s.normalize()?;
    Ok(s)
}

/// `|ψ^O_C⟩` for a decoded circuit; ⊥ when it measures, fails to simulate, or
/// its doubled register exceeds the qubit budget.
pub fn col_state_of(c: &OracleAidedCircuit, key: Vec<u8>, o: &dyn Oracle) -> ColState {
    let bot = ColState { key: key.clone(), kind: ColKind::Bot };
    if c.has_measurements() || c.split.a.len() + 2 * c.split.b.len() > MAX_QUBITS {
        return bot;
    }
    let Ok(out) = simulate(c, o) else { return bot };
    let brs = branches(c, &out);
    match doubled_state(c.split.a.len(), c.split.b.len(), &brs) {
        Ok(state) => ColState {
            key,
            kind: ColKind::Doubled { a_len: c.split.a.len(), b_len: c.split.b.len(), branches: brs, state },
        },
        Err(_) => bot,
    }
}

pub fn col_state(key: &[u8], o: &dyn Oracle) -> ColState {
    match canonical_decode(key) {
        Ok(c) => col_state_of(&c, key.to_vec(), o),
        Err(_) => ColState { key: key.to_vec(), kind: ColKind::Bot },
    }
}

/// One draw from `DCol^O_C`; `None` is ⊥.
pub fn col_sample<R: Rng + ?Sized>(key: &[u8], o: &dyn Oracle, rng: &mut R) -> Option<BitString> {
    let st = col_state(key, o);
    let s = st.state()?;
    let n = s.num_qubits();
    let (out, _) = measure(s, &(0..n).collect::<Vec<_>>(), rng).ok()?;
    Some(out)
}

/// `Col^O` as a fixed function: the sample for a key is drawn once from a
/// stream keyed by `(master, key, pad)`. Distinct pads give independent draws.
pub struct ColOracle<'o> {
    pub oracle: &'o dyn Oracle,
    pub master: u64,
}

impl ColOracle<'_> {
    pub fn answer(&self, key: &[u8], pad: &BitString) -> Option<BitString> {
        let mut k = key.to_vec();
        k.push(pad.len() as u8);
        k.extend_from_slice(&pad.value().to_le_bytes());
        let mut rng = keyed_rng(self.master, "col", &k);
        col_sample(key, self.oracle, &mut rng)
    }
}
