//! Dense state vectors with an optional ⊥ slot, finite distributions, and the
//! distance functionals used by the checkers.
//!
//! Basis index `i` assigns qubit `q` the value of bit `q` of `i`. The ⊥ slot,
//! when present, sits at index `2^n`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::seed::index_at;

pub type C64 = Complex64;

/// Tolerance for exact checks.
pub const TOL: f64 = 1e-9;
/// Branches below this probability are treated as empty.
pub const PROB_EPS: f64 = 1e-12;
pub const MAX_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("register of {0} qubits exceeds the {MAX_QUBITS}-qubit budget")]
    TooManyQubits(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("qubit {0} out of range")]
    QubitOutOfRange(usize),
    #[error("duplicate qubit {0}")]
    DuplicateQubit(usize),
    #[error("every measurement branch is empty")]
    EmptySupport,
    #[error("operation undefined on a state with ⊥ weight")]
    BotSlot,
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BotExtendedState {
    num_qubits: usize,
    amps: Vec<C64>,
    bot: bool,
}

impl BotExtendedState {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        BotExtendedState { num_qubits: n, amps, bot: false }
    }

    /// The literal |⊥⟩ in the ⊥-extension of an `n`-qubit space.
    pub fn bot(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        let mut amps = vec![C64::new(0.0, 0.0); (1 << n) + 1];
        amps[1 << n] = C64::new(1.0, 0.0);
        BotExtendedState { num_qubits: n, amps, bot: true }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>, bot: bool) -> Result<Self, StateError> {
        let s = Self::from_unnormalized(n, amps, bot)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Shape checks only.
    pub fn from_unnormalized(n: usize, amps: Vec<C64>, bot: bool) -> Result<Self, StateError> {
        if n > MAX_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let expected = (1usize << n) + bot as usize;
        if amps.len() != expected {
            return Err(StateError::BadLength { expected, got: amps.len() });
        }
        Ok(BotExtendedState { num_qubits: n, amps, bot })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn has_bot(&self) -> bool {
        self.bot
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn bot_amplitude(&self) -> C64 {
        if self.bot {
            self.amps[1 << self.num_qubits]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Same amplitudes in the ⊥-extended space.
    pub fn with_bot_slot(&self) -> Self {
        let mut s = self.clone();
        if !s.bot {
            s.amps.push(C64::new(0.0, 0.0));
            s.bot = true;
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOL
    }

    pub fn normalize(&mut self) -> Result<(), StateError> {
        let n = self.norm();
        if n < PROB_EPS {
            return Err(StateError::EmptySupport);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(())
    }

    fn check_same_space(&self, other: &Self) -> Result<(), StateError> {
        if self.dim() != other.dim() || self.num_qubits != other.num_qubits {
            return Err(StateError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<C64, StateError> {
        self.check_same_space(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn conj(&self) -> Self {
        BotExtendedState {
            num_qubits: self.num_qubits,
            amps: self.amps.iter().map(|a| a.conj()).collect(),
            bot: self.bot,
        }
    }

    /// Computational-basis probabilities of the qubit part.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps[..1 << self.num_qubits].iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.num_qubits {
            return Err(StateError::QubitOutOfRange(q));
        }
        Ok(())
    }

    /// Applies the row-major 2×2 matrix `m` to qubit `q`. The ⊥ slot is untouched.
    pub fn apply_1q(&mut self, q: usize, m: &[C64; 4]) {
        let bit = 1usize << q;
        for i in 0..(1usize << self.num_qubits) {
            if i & bit == 0 {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0] * a + m[1] * b;
                self.amps[j] = m[2] * a + m[3] * b;
            }
        }
    }

    /// Applies the row-major 4×4 matrix `m` with local index `2·bit(a) + bit(b)`.
    pub fn apply_2q(&mut self, a: usize, b: usize, m: &[C64; 16]) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..(1usize << self.num_qubits) {
            if i & ba == 0 && i & bb == 0 {
                let idx = [i, i | bb, i | ba, i | ba | bb];
                let v = idx.map(|k| self.amps[k]);
                for r in 0..4 {
                    self.amps[idx[r]] = (0..4).map(|c| m[4 * r + c] * v[c]).sum();
                }
            }
        }
    }

    /// Outcome distribution of measuring `targets`, with bit `j` of the
    /// outcome index taken from `targets[j]`.
    pub fn outcome_probabilities(&self, targets: &[usize]) -> Result<Vec<f64>, StateError> {
        check_targets(self.num_qubits, targets)?;
        let mut probs = vec![0.0; 1 << targets.len()];
        for (i, a) in self.amps[..1 << self.num_qubits].iter().enumerate() {
            probs[gather(i, targets)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Renormalized projection onto `outcome` of `targets`.
    pub fn project(&self, targets: &[usize], outcome: usize) -> Result<(f64, Self), StateError> {
        check_targets(self.num_qubits, targets)?;
        let mut post = self.clone();
        let mut p = 0.0;
        for i in 0..(1usize << self.num_qubits) {
            if gather(i, targets) == outcome {
                p += post.amps[i].norm_sqr();
            } else {
                post.amps[i] = C64::new(0.0, 0.0);
            }
        }
        if post.bot {
            post.amps[1 << self.num_qubits] = C64::new(0.0, 0.0);
        }
        if p < PROB_EPS {
            return Err(StateError::EmptySupport);
        }
        let s = p.sqrt();
        for a in &mut post.amps {
            *a /= s;
        }
        Ok((p, post))
    }

    /// Every non-empty measurement branch in outcome order.
    pub fn branches(&self, targets: &[usize]) -> Result<Vec<(BitString, f64, Self)>, StateError> {
        self.reject_bot_weight()?;
        let probs = self.outcome_probabilities(targets)?;
        let mut out = Vec::new();
        for (o, &p) in probs.iter().enumerate() {
            if p >= PROB_EPS {
                let (p, post) = self.project(targets, o)?;
                out.push((BitString::new(o as u64, targets.len()), p, post));
            }
        }
        if out.is_empty() {
            return Err(StateError::EmptySupport);
        }
        Ok(out)
    }

    fn reject_bot_weight(&self) -> Result<(), StateError> {
        if self.bot_amplitude().norm_sqr() > TOL {
            return Err(StateError::BotSlot);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Vec<C64>, StateError> {
        self.check_same_space(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect())
    }
}

pub(crate) fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((index >> q) & 1) << j))
}

pub(crate) fn scatter(value: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((value >> j) & 1) << q))
}

fn check_targets(n: usize, targets: &[usize]) -> Result<(), StateError> {
    for (k, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(StateError::QubitOutOfRange(q));
        }
        if targets[..k].contains(&q) {
            return Err(StateError::DuplicateQubit(q));
        }
    }
    Ok(())
}

fn check_normalized(s: &BotExtendedState) -> Result<(), StateError> {
    let n = s.norm();
    if (n - 1.0).abs() > TOL {
        return Err(StateError::NotNormalized(n));
    }
    Ok(())
}

/// Collapsing measurement of `targets`.
pub fn measure<R: Rng + ?Sized>(
    state: &BotExtendedState,
    targets: &[usize],
    rng: &mut R,
) -> Result<(BitString, BotExtendedState), StateError> {
    check_normalized(state)?;
    state.reject_bot_weight()?;
    let probs = state.outcome_probabilities(targets)?;
    let weights: Vec<f64> = probs.iter().map(|&p| if p >= PROB_EPS { p } else { 0.0 }).collect();
    let o = index_at(&weights, rng.gen()).ok_or(StateError::EmptySupport)?;
    let (_, post) = state.project(targets, o)?;
    Ok((BitString::new(o as u64, targets.len()), post))
}

/// Full computational-basis sample that leaves the state alone.
pub fn sample_noncollapsing<R: Rng + ?Sized>(state: &BotExtendedState, rng: &mut R) -> Result<BitString, StateError> {
    if state.has_bot() {
        return Err(StateError::BotSlot);
    }
    check_normalized(state)?;
    let probs = state.probabilities();
    let i = index_at(&probs, rng.gen()).ok_or(StateError::EmptySupport)?;
    Ok(BitString::new(i as u64, state.num_qubits()))
}

pub fn trace_distance_pure(a: &BotExtendedState, b: &BotExtendedState) -> Result<f64, StateError> {
    check_normalized(a)?;
    check_normalized(b)?;
    let ov = a.inner(b)?.norm_sqr();
    Ok((1.0 - ov).max(0.0).sqrt())
}

pub fn euclidean_distance(a: &BotExtendedState, b: &BotExtendedState) -> Result<f64, StateError> {
    Ok(a.sub(b)?.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt())
}

/// `min_θ ‖a − e^{iθ} b‖ = √(2 − 2|⟨a|b⟩|)`.
pub fn min_phase_distance(a: &BotExtendedState, b: &BotExtendedState) -> Result<f64, StateError> {
    check_normalized(a)?;
    check_normalized(b)?;
    let ov = a.inner(b)?.norm();
    Ok((2.0 - 2.0 * ov).max(0.0).sqrt())
}

/// Finite distribution over bit strings.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution {
    probs: BTreeMap<BitString, f64>,
}

impl FiniteDistribution {
    pub fn new(probs: BTreeMap<BitString, f64>) -> Result<Self, StateError> {
        let mut total = 0.0;
        for (k, &p) in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(StateError::BadDistribution(format!("probability {p} at {k}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > TOL {
            return Err(StateError::BadDistribution(format!("total mass {total}")));
        }
        Ok(FiniteDistribution { probs })
    }

    pub fn from_pairs<I: IntoIterator<Item = (BitString, f64)>>(pairs: I) -> Result<Self, StateError> {
        let mut probs = BTreeMap::new();
        for (k, p) in pairs {
            *probs.entry(k).or_insert(0.0) += p;
        }
        Self::new(probs)
    }

    /// Accumulates weights and divides by their total.
    pub fn from_weights<I: IntoIterator<Item = (BitString, f64)>>(pairs: I) -> Result<Self, StateError> {
        let mut probs: BTreeMap<BitString, f64> = BTreeMap::new();
        for (k, p) in pairs {
            *probs.entry(k).or_insert(0.0) += p;
        }
        let total: f64 = probs.values().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(StateError::BadDistribution("zero total weight".into()));
        }
        for p in probs.values_mut() {
            *p /= total;
        }
        Self::new(probs)
    }

    pub fn point(x: BitString) -> Self {
        FiniteDistribution { probs: BTreeMap::from([(x, 1.0)]) }
    }

    pub fn uniform(len: usize) -> Self {
        let p = 1.0 / (1u64 << len) as f64;
        FiniteDistribution { probs: BitString::all(len).map(|x| (x, p)).collect() }
    }

    pub fn uniform_over<I: IntoIterator<Item = BitString>>(items: I) -> Result<Self, StateError> {
        Self::from_weights(items.into_iter().map(|x| (x, 1.0)))
    }

    pub fn prob(&self, x: &BitString) -> f64 {
        self.probs.get(x).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &f64)> {
        self.probs.iter()
    }

    /// Outcomes with positive probability.
    pub fn support(&self) -> impl Iterator<Item = &BitString> {
        self.probs.iter().filter(|(_, &p)| p > 0.0).map(|(k, _)| k)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Inverse-CDF sample in outcome order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        self.sample_at(rng.gen())
    }

    pub fn sample_at(&self, u: f64) -> BitString {
        let keys: Vec<&BitString> = self.probs.keys().collect();
        let weights: Vec<f64> = self.probs.values().copied().collect();
        *keys[index_at(&weights, u).expect("normalized distribution")]
    }

    /// Law of `f(x)` for `x` drawn from `self`.
    pub fn map<F: Fn(&BitString) -> BitString>(&self, f: F) -> Self {
        let mut probs = BTreeMap::new();
        for (k, &p) in &self.probs {
            *probs.entry(f(k)).or_insert(0.0) += p;
        }
        FiniteDistribution { probs }
    }

    pub fn marginal(&self, offset: usize, len: usize) -> Self {
        self.map(|x| x.slice(offset, len))
    }
}

/// Half the L1 distance over the union of supports.
pub fn statistical_distance(p: &FiniteDistribution, q: &FiniteDistribution) -> f64 {
    let mut keys: Vec<&BitString> = p.probs.keys().chain(q.probs.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys.iter().map(|k| (p.prob(k) - q.prob(k)).abs()).sum::<f64>()
}

/// Σ_x √p(x) |x⟩ over the common width of the support.
pub fn dist_state(p: &FiniteDistribution) -> Result<BotExtendedState, StateError> {
    let width =
        p.probs.keys().next().map(|k| k.len()).ok_or_else(|| StateError::BadDistribution("empty support".into()))?;
    if p.probs.keys().any(|k| k.len() != width) {
        return Err(StateError::BadDistribution("mixed widths".into()));
    }
    if width > MAX_QUBITS {
        return Err(StateError::TooManyQubits(width));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << width];
    for (k, &pr) in &p.probs {
        amps[k.value() as usize] = C64::new(pr.sqrt(), 0.0);
    }
    BotExtendedState::from_amplitudes(width, amps, false)
}
