//! The bundle `S = (f, Obf, Eval^f)` at a single security parameter λ.
//!
//! Input layouts: `Obf` takes `C ‖ r` (2λ bits, C in the low positions) and
//! returns a 3λ-bit string; `Eval` takes `c̃ ‖ x`. A [`BundleView`] answers
//! queries of every width: λ-bit inputs go to f, 2λ-bit inputs to Obf, and
//! inputs of at least 3λ bits to Eval, which answers ⊥ unless `|x| = λ`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::{Oracle, PunctureSet};
use crate::bits::BitString;
use crate::circuit::classical::ClassicalProgram;
use crate::seed::trial_rng;

pub const MAX_LAMBDA: usize = 10;
/// Retries per Obf input before sampling gives up.
pub const OBF_RETRY_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("λ = {0} outside 1..={MAX_LAMBDA}")]
    Lambda(usize),
    #[error("obfuscation sampling exceeded {OBF_RETRY_CAP} retries")]
    RetryCap,
}

#[derive(Clone, Debug)]
pub struct OracleBundle {
    lambda: usize,
    f: Vec<u64>,
    f_inv: Vec<u64>,
    obf: Arc<Vec<u64>>,
    obf_inv: Arc<HashMap<u64, u64>>,
}

/// Uniform permutation of `{0,1}^λ` by Fisher–Yates.
pub fn sample_permutation<R: Rng + ?Sized>(lambda: usize, rng: &mut R) -> Vec<u64> {
    let mut p: Vec<u64> = (0..1u64 << lambda).collect();
    p.shuffle(rng);
    p
}

/// Uniform injection `{0,1}^{2λ} → {0,1}^{3λ}` by rejection sampling.
pub fn sample_injection<R: Rng + ?Sized>(lambda: usize, rng: &mut R) -> Result<Vec<u64>, BundleError> {
    let range = 1u64 << (3 * lambda);
    let mut used = std::collections::HashSet::with_capacity(1 << (2 * lambda));
    let mut out = Vec::with_capacity(1 << (2 * lambda));
    for _ in 0..1u64 << (2 * lambda) {
        let mut tries = 0;
        loop {
            let v = rng.gen_range(0..range);
            if used.insert(v) {
                out.push(v);
                break;
            }
            tries += 1;
            if tries >= OBF_RETRY_CAP {
                return Err(BundleError::RetryCap);
            }
        }
    }
    Ok(out)
}

fn invert(p: &[u64]) -> Vec<u64> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u64;
    }
    inv
}

pub fn sample_bundle(lambda: usize, seed: u64) -> Result<OracleBundle, BundleError> {
    if lambda == 0 || lambda > MAX_LAMBDA {
        return Err(BundleError::Lambda(lambda));
    }
    let f = sample_permutation(lambda, &mut trial_rng(seed, "bundle-f", lambda as u64));
    let obf = sample_injection(lambda, &mut trial_rng(seed, "bundle-obf", lambda as u64))?;
    Ok(OracleBundle::from_tables(lambda, f, obf))
}

impl OracleBundle {
    /// `f` must be a permutation of `0..2^λ` and `obf` injective into `0..2^{3λ}`.
    pub fn from_tables(lambda: usize, f: Vec<u64>, obf: Vec<u64>) -> Self {
        assert_eq!(f.len(), 1 << lambda);
        assert_eq!(obf.len(), 1 << (2 * lambda));
        let f_inv = invert(&f);
        let obf_inv = Arc::new(obf.iter().enumerate().map(|(i, &v)| (v, i as u64)).collect());
        OracleBundle { lambda, f, f_inv, obf: Arc::new(obf), obf_inv }
    }

    /// Same Obf, shared rather than copied, with a fresh f.
    pub fn with_f(&self, f: Vec<u64>) -> Self {
        assert_eq!(f.len(), 1 << self.lambda);
        OracleBundle {
            lambda: self.lambda,
            f_inv: invert(&f),
            f,
            obf: Arc::clone(&self.obf),
            obf_inv: Arc::clone(&self.obf_inv),
        }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn f(&self, x: &BitString) -> Option<BitString> {
        (x.len() == self.lambda).then(|| BitString::new(self.f[x.value() as usize], self.lambda))
    }

    pub fn f_inverse(&self, y: &BitString) -> Option<BitString> {
        (y.len() == self.lambda).then(|| BitString::new(self.f_inv[y.value() as usize], self.lambda))
    }

    pub fn obf(&self, c: &BitString, r: &BitString) -> Option<BitString> {
        if c.len() != self.lambda || r.len() != self.lambda {
            return None;
        }
        Some(BitString::new(self.obf[c.concat(r).value() as usize], 3 * self.lambda))
    }

    /// `(C, r)` with `Obf(C, r) = c̃`, if any.
    pub fn obf_inverse(&self, ct: &BitString) -> Option<(BitString, BitString)> {
        if ct.len() != 3 * self.lambda {
            return None;
        }
        let i = *self.obf_inv.get(&ct.value())?;
        let cr = BitString::new(i, 2 * self.lambda);
        Some((cr.slice(0, self.lambda), cr.slice(self.lambda, self.lambda)))
    }

    pub fn f_table(&self) -> &[u64] {
        &self.f
    }

    pub fn obf_table(&self) -> &[u64] {
        &self.obf
    }

    pub fn view(&self) -> BundleView<'_> {
        BundleView { bundle: self, f_punct: PunctureSet::empty(), obf_punct: PunctureSet::empty() }
    }

    /// `(f_X, Obf_Y, Eval^{f_X})`.
    pub fn punctured(&self, f_punct: PunctureSet, obf_punct: PunctureSet) -> BundleView<'_> {
        BundleView { bundle: self, f_punct, obf_punct }
    }
}

/// A possibly punctured bundle. Eval always inverts the full Obf table and
/// runs the decoded program against the punctured f.
#[derive(Clone, Debug)]
pub struct BundleView<'a> {
    bundle: &'a OracleBundle,
    f_punct: PunctureSet,
    obf_punct: PunctureSet,
}

/// The f component of a view as a standalone oracle.
#[derive(Clone, Copy, Debug)]
pub struct FView<'v, 'a> {
    view: &'v BundleView<'a>,
}

impl Oracle for FView<'_, '_> {
    fn query(&self, x: &BitString) -> Option<BitString> {
        self.view.f(x)
    }
}

impl<'a> BundleView<'a> {
    pub fn bundle(&self) -> &'a OracleBundle {
        self.bundle
    }

    pub fn lambda(&self) -> usize {
        self.bundle.lambda
    }

    pub fn f(&self, x: &BitString) -> Option<BitString> {
        if self.f_punct.contains(x) {
            return None;
        }
        self.bundle.f(x)
    }

    pub fn f_oracle(&self) -> FView<'_, 'a> {
        FView { view: self }
    }

    pub fn obf(&self, c: &BitString, r: &BitString) -> Option<BitString> {
        if c.len() != self.lambda() || r.len() != self.lambda() || self.obf_punct.contains(&c.concat(r)) {
            return None;
        }
        self.bundle.obf(c, r)
    }

    /// `Eval^{f'}(c̃, x)` with f' the view's f.
    pub fn eval(&self, ct: &BitString, x: &BitString) -> Option<BitString> {
        let (c, _) = self.bundle.obf_inverse(ct)?;
        if x.len() != self.lambda() {
            return None;
        }
        ClassicalProgram::from_bits(c).run(x, &self.f_oracle())
    }

    pub fn eval_tracked(&self, ct: &BitString, x: &BitString) -> Option<crate::circuit::classical::TrackedRun> {
        let (c, _) = self.bundle.obf_inverse(ct)?;
        if x.len() != self.lambda() {
            return None;
        }
        Some(ClassicalProgram::from_bits(c).run_tracked(x, &self.f_oracle()))
    }
}

impl Oracle for BundleView<'_> {
    fn query(&self, y: &BitString) -> Option<BitString> {
        let l = self.lambda();
        match y.len() {
            n if n == l => self.f(y),
            n if n == 2 * l => self.obf(&y.slice(0, l), &y.slice(l, l)),
            n if n >= 3 * l => self.eval(&y.slice(0, 3 * l), &y.slice(3 * l, n - 3 * l)),
            _ => None,
        }
    }
}

/// `Eval^f(c̃, x)` on the unpunctured bundle.
pub fn eval_oracle(s: &OracleBundle, ct: &BitString, x: &BitString) -> Option<BitString> {
    s.view().eval(ct, x)
}

/// Outcomes of the second branch of Find: uniform over tracked queries.
fn find_queries(f_prime: &dyn Oracle, obf: &OracleBundle, y: &BitString) -> Vec<BitString> {
    let l = obf.lambda();
    if y.len() != 4 * l {
        return Vec::new();
    }
    let Some((c, _)) = obf.obf_inverse(&y.slice(0, 3 * l)) else {
        return Vec::new();
    };
    ClassicalProgram::from_bits(c).run_tracked(&y.slice(3 * l, l), f_prime).queries
}

/// With probability 1/2 returns `y`; otherwise parses `y = (c̃, x̃)`, runs the
/// decoded program on `x̃` against `f_prime` and returns one of its f-queries
/// uniformly, or ⊥ when there is nothing to return.
pub fn find<R: Rng + ?Sized>(
    f_prime: &dyn Oracle,
    obf: &OracleBundle,
    y: &BitString,
    rng: &mut R,
) -> Option<BitString> {
    if rng.gen_bool(0.5) {
        return Some(*y);
    }
    let qs = find_queries(f_prime, obf, y);
    if qs.is_empty() {
        return None;
    }
    Some(qs[rng.gen_range(0..qs.len())])
}

/// Exact output law of [`find`].
pub fn find_distribution(f_prime: &dyn Oracle, obf: &OracleBundle, y: &BitString) -> BTreeMap<Option<BitString>, f64> {
    let mut out = BTreeMap::new();
    *out.entry(Some(*y)).or_insert(0.0) += 0.5;
    let qs = find_queries(f_prime, obf, y);
    if qs.is_empty() {
        *out.entry(None).or_insert(0.0) += 0.5;
    } else {
        let w = 0.5 / qs.len() as f64;
        for q in qs {
            *out.entry(Some(q)).or_insert(0.0) += w;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::classical::ClassicalOp;
    use crate::seed::rng_from_seed;
    use std::collections::HashSet;

    #[test]
    fn tables_are_bijective_and_injective() {
        let s = sample_bundle(4, 11).unwrap();
        let mut f: Vec<u64> = s.f_table().to_vec();
        f.sort_unstable();
        assert_eq!(f, (0..16).collect::<Vec<_>>());
        let distinct: HashSet<u64> = s.obf_table().iter().copied().collect();
        assert_eq!(distinct.len(), 256);
        assert!(s.obf_table().iter().all(|&v| v < 1 << 12));
    }

    #[test]
    fn same_seed_same_tables() {
        let a = sample_bundle(5, 3).unwrap();
        let b = sample_bundle(5, 3).unwrap();
        assert_eq!(a.f_table(), b.f_table());
        assert_eq!(a.obf_table(), b.obf_table());
        assert!(sample_bundle(0, 1).is_err());
        assert!(sample_bundle(11, 1).is_err());
    }

    #[test]
    fn eval_inverts_obf() {
        let s = sample_bundle(4, 5).unwrap();
        let c = ClassicalProgram::encode(&[ClassicalOp::F], 4).unwrap().bits();
        let r = BitString::new(9, 4);
        let ct = s.obf(&c, &r).unwrap();
        for x in BitString::all(4) {
            assert_eq!(eval_oracle(&s, &ct, &x), s.f(&x));
        }
        assert_eq!(eval_oracle(&s, &ct, &BitString::new(0, 3)), None);
        let image: HashSet<u64> = s.obf_table().iter().copied().collect();
        let outside = (0..1u64 << 12).find(|v| !image.contains(v)).unwrap();
        assert_eq!(eval_oracle(&s, &BitString::new(outside, 12), &BitString::new(0, 4)), None);
    }

    #[test]
    fn view_dispatches_by_width() {
        let s = sample_bundle(3, 8).unwrap();
        let v = s.view();
        let x = BitString::new(5, 3);
        assert_eq!(v.query(&x), s.f(&x));
        let c = BitString::new(1, 3);
        let r = BitString::new(6, 3);
        let ct = v.query(&c.concat(&r)).unwrap();
        assert_eq!(ct, s.obf(&c, &r).unwrap());
        assert_eq!(v.query(&ct.concat(&x)), eval_oracle(&s, &ct, &x));
        assert_eq!(v.query(&ct.concat(&BitString::new(0, 2))), None);
        assert_eq!(v.query(&BitString::new(0, 5)), None);
    }

    #[test]
    fn eval_sees_the_punctured_f() {
        let s = sample_bundle(4, 21).unwrap();
        let c = ClassicalProgram::encode(&[ClassicalOp::F, ClassicalOp::F], 4).unwrap().bits();
        let ct = s.obf(&c, &BitString::new(2, 4)).unwrap();
        let x = BitString::new(7, 4);
        let mid = s.f(&x).unwrap();
        let v = s.punctured(PunctureSet::points([mid]), PunctureSet::empty());
        assert_eq!(v.eval(&ct, &x), None);
        let untouched = BitString::all(4).find(|z| *z != x && s.f(z) != Some(mid) && *z != mid).unwrap();
        assert_eq!(v.eval(&ct, &untouched), eval_oracle(&s, &ct, &untouched));
    }

    #[test]
    fn find_outside_image_is_half_y_half_bot() {
        let s = sample_bundle(3, 2).unwrap();
        let image: HashSet<u64> = s.obf_table().iter().copied().collect();
        let outside = (0..1u64 << 9).find(|v| !image.contains(v)).unwrap();
        let y = BitString::new(outside, 9).concat(&BitString::new(1, 3));
        let d = find_distribution(&s.view().f_oracle(), &s, &y);
        assert_eq!(d.len(), 2);
        assert_eq!(d[&Some(y)], 0.5);
        assert_eq!(d[&None], 0.5);
        let mut rng = rng_from_seed(1);
        for _ in 0..50 {
            let out = find(&s.view().f_oracle(), &s, &y, &mut rng);
            assert!(out == Some(y) || out.is_none());
        }
    }

    #[test]
    fn find_hits_planted_disagreement() {
        let s = sample_bundle(4, 13).unwrap();
        let c = ClassicalProgram::encode(&[ClassicalOp::F, ClassicalOp::Not], 4).unwrap().bits();
        let ct = s.obf(&c, &BitString::new(3, 4)).unwrap();
        let x = BitString::new(6, 4);
        let y = ct.concat(&x);
        let view = s.punctured(PunctureSet::points([x]), PunctureSet::empty());
        let d = find_distribution(&view.f_oracle(), &s, &y);
        let hit = d.get(&Some(x)).copied().unwrap_or(0.0);
        assert!(hit >= 1.0 / (2.0 * y.len() as f64));
        assert_eq!(hit, 0.5);
    }
}
