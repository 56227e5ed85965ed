//! Adversaries that query a swap unitary `U = Σ_x |x⟩⟨x| ⊗ U_x`, with `U_x`
//! exchanging ⊥ and `|φ_x⟩` on a target register.
//!
//! Registers are the query register X (`k` bits), the target D (`m` basis
//! states plus ⊥) and a work register W (`w` bits); basis index
//! `x + 2^k·(d + (m+1)·wk)`. The adversary starts in `|0, ⊥, 0⟩` and applies
//! `A_0, U, A_1, …, U, A_q`.

use rand::Rng;

use super::SlackReport;
use crate::compressed::{swap_bot, ProductDistribution};
use crate::gen::{haar_unitary, random_distribution, random_vector};
use crate::qstate::{statistical_distance, C64};

#[derive(Clone, Debug)]
pub struct AdversaryProgram {
    pub alphabet_bits: usize,
    pub target_dim: usize,
    pub work_bits: usize,
    /// `q + 1` row-major unitaries on the full space.
    pub unitaries: Vec<Vec<C64>>,
}

fn matvec(u: &[C64], v: &[C64]) -> Vec<C64> {
    let d = v.len();
    (0..d).map(|i| u[i * d..(i + 1) * d].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

impl AdversaryProgram {
    pub fn random<R: Rng + ?Sized>(
        q: usize,
        alphabet_bits: usize,
        target_dim: usize,
        work_bits: usize,
        rng: &mut R,
    ) -> Self {
        let dim = (1 << alphabet_bits) * (target_dim + 1) * (1 << work_bits);
        AdversaryProgram {
            alphabet_bits,
            target_dim,
            work_bits,
            unitaries: (0..=q).map(|_| haar_unitary(dim, rng)).collect(),
        }
    }

    pub fn queries(&self) -> usize {
        self.unitaries.len() - 1
    }

    pub fn dim(&self) -> usize {
        (1 << self.alphabet_bits) * (self.target_dim + 1) * (1 << self.work_bits)
    }

    fn initial(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[(1 << self.alphabet_bits) * self.target_dim] = C64::new(1.0, 0.0);
        v
    }

    fn query(&self, phis: &[Vec<C64>], v: &mut [C64]) {
        let nx = 1 << self.alphabet_bits;
        let m1 = self.target_dim + 1;
        let mut local = vec![C64::new(0.0, 0.0); m1];
        for wk in 0..1 << self.work_bits {
            for (x, phi) in phis.iter().enumerate() {
                let idx = |d: usize| x + nx * (d + m1 * wk);
                for (d, l) in local.iter_mut().enumerate() {
                    *l = v[idx(d)];
                }
                swap_bot(phi, &mut local);
                for (d, l) in local.iter().enumerate() {
                    v[idx(d)] = *l;
                }
            }
        }
    }

    /// Final state and, per query, the distribution of X just before it.
    pub fn run(&self, phis: &[Vec<C64>]) -> (Vec<C64>, Vec<Vec<f64>>) {
        assert_eq!(phis.len(), 1 << self.alphabet_bits);
        assert!(phis.iter().all(|p| p.len() == self.target_dim));
        let nx = 1 << self.alphabet_bits;
        let mut v = matvec(&self.unitaries[0], &self.initial());
        let mut marginals = Vec::with_capacity(self.queries());
        for u in &self.unitaries[1..] {
            let mut px = vec![0.0; nx];
            for (i, a) in v.iter().enumerate() {
                px[i % nx] += a.norm_sqr();
            }
            marginals.push(px);
            self.query(phis, &mut v);
            v = matvec(u, &v);
        }
        (v, marginals)
    }

    /// `Δ` between the runs and the law of `B^U`'s output.
    pub fn delta_and_b(&self, phis: &[Vec<C64>], phis2: &[Vec<C64>]) -> (f64, Vec<f64>) {
        let (psi, marginals) = self.run(phis);
        let (psi2, _) = self.run(phis2);
        let q = self.queries() as f64;
        let mut b = vec![0.0; 1 << self.alphabet_bits];
        for m in &marginals {
            for (x, p) in m.iter().enumerate() {
                b[x] += p / q;
            }
        }
        (distance(&psi, &psi2), b)
    }
}

/// `E_{x←B^U} ‖φ_x − φ′_x‖ ≥ Δ²/(32q²)`.
pub fn check_ow2h_comp(adv: &AdversaryProgram, phis: &[Vec<C64>], phis2: &[Vec<C64>], seed: u64) -> SlackReport {
    let (delta, b) = adv.delta_and_b(phis, phis2);
    let e: f64 = b.iter().zip(phis.iter().zip(phis2)).map(|(p, (a, c))| p * distance(a, c)).sum();
    let q = adv.queries() as f64;
    SlackReport::le("ow2h-comp", seed, delta * delta / (32.0 * q * q), e)
}

/// `E_{x←B^U} SD(D_x, D′_x) ≥ Δ²/(16q²)` with `U, U′` the compression
/// unitaries of the two product distributions.
pub fn check_ow2h_dist(
    adv: &AdversaryProgram,
    d: &ProductDistribution,
    d2: &ProductDistribution,
    seed: u64,
) -> SlackReport {
    let n = 1usize << d.in_len();
    let phis: Vec<Vec<C64>> = (0..n).map(|x| d.row_state(x)).collect();
    let phis2: Vec<Vec<C64>> = (0..n).map(|x| d2.row_state(x)).collect();
    let (delta, b) = adv.delta_and_b(&phis, &phis2);
    let e: f64 = (0..n).map(|x| b[x] * statistical_distance(&d.rows()[x], &d2.rows()[x])).sum();
    let q = adv.queries() as f64;
    SlackReport::le("ow2h-dist", seed, delta * delta / (16.0 * q * q), e)
}

/// A random instance: `φ′` keeps, perturbs or redraws each `φ_x`.
pub fn random_ow2h_comp<R: Rng + ?Sized>(rng: &mut R) -> (AdversaryProgram, Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let q = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=2);
    let m = rng.gen_range(2..=4);
    let w = rng.gen_range(0..=1);
    let adv = AdversaryProgram::random(q, k, m, w, rng);
    let phis: Vec<Vec<C64>> = (0..1 << k).map(|_| random_vector(m, rng)).collect();
    let phis2 = phis
        .iter()
        .map(|p| match rng.gen_range(0..3) {
            0 => p.clone(),
            1 => {
                let t: f64 = rng.gen_range(0.0..0.5);
                let r = random_vector(m, rng);
                let mixed: Vec<C64> = p.iter().zip(&r).map(|(a, b)| a * (1.0 - t) + b * t).collect();
                let n = mixed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                mixed.into_iter().map(|z| z / n).collect()
            }
            _ => random_vector(m, rng),
        })
        .collect();
    (adv, phis, phis2)
}

pub fn random_ow2h_dist<R: Rng + ?Sized>(rng: &mut R) -> (AdversaryProgram, ProductDistribution, ProductDistribution) {
    let q = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=2);
    let out = rng.gen_range(1..=2);
    let w = rng.gen_range(0..=1);
    let adv = AdversaryProgram::random(q, k, 1 << out, w, rng);
    let rows: Vec<_> = (0..1 << k).map(|_| random_distribution(out, rng)).collect();
    let rows2 =
        rows.iter().map(|r| if rng.gen_bool(0.5) { r.clone() } else { random_distribution(out, rng) }).collect();
    let d = ProductDistribution::new(k, out, rows).expect("rows");
    let d2 = ProductDistribution::new(k, out, rows2).expect("rows");
    (adv, d, d2)
}
