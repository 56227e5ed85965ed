//! Finding collisions with two non-collapsing samples.
//!
//! The program prepares `Σ_x |x⟩|f(x)⟩`, measures the image register, and
//! reads two samples of the collapsed state from the Q oracle. Each output
//! bit `f_j` is written by `H · Z^{f_j(x)} · H` on its qubit, with the phase
//! query `x ‖ b ‖ j` answered by `b · f_j(x)`. The index `j` sits on its own
//! ancilla qubits, which are measured right after their call.

use rand::Rng;

use crate::bits::BitString;
use crate::circuit::{Gate, OracleAidedCircuit, OracleStyle};
use crate::cloners::{q_sample, QError};
use crate::oracle::{ClassicalOracle, Oracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionAttempt {
    Distinct(BitString, BitString),
    /// Both samples gave the same preimage.
    Same(BitString),
}

/// The Q-form program and its phase oracle for an `n → m` function.
#[derive(Clone, Debug)]
pub struct CollisionProgram {
    pub circuit: OracleAidedCircuit,
    pub oracle: ClassicalOracle,
    pub in_len: usize,
    pub out_len: usize,
}

/// Width of the index register; at least one qubit so that every call can
/// be followed by a measurement.
fn index_bits(m: usize) -> usize {
    ((usize::BITS - (m.max(1) - 1).leading_zeros()) as usize).max(1)
}

/// Builds the program for `f`, given as a table oracle.
pub fn collision_program(f: &ClassicalOracle) -> CollisionProgram {
    let (n, m) = (f.in_len(), f.out_len());
    let k = index_bits(m);
    let y = |j: usize| n + j;
    let sel = |j: usize| n + m + j * k;
    let nq = n + m + m * k;
    let mut gates: Vec<Gate> = (0..n).map(Gate::H).collect();
    for j in 0..m {
        if j > 0 {
            gates.push(Gate::H(y(j - 1)));
        }
        for t in 0..k {
            if (j >> t) & 1 == 1 {
                gates.push(Gate::X(sel(j) + t));
            }
        }
        gates.push(Gate::H(y(j)));
        let mut query: Vec<usize> = (0..n).collect();
        query.push(y(j));
        query.extend(sel(j)..sel(j) + k);
        gates.push(Gate::Oracle { style: OracleStyle::Phase, query, response: Vec::new() });
        gates.push(Gate::Measure((sel(j)..sel(j) + k).collect()));
    }
    if m > 0 {
        gates.push(Gate::H(y(m - 1)));
    }
    let image: Vec<usize> = (0..m).map(y).collect();
    gates.push(Gate::Measure(image.clone()));
    gates.push(Gate::Measure(image));
    let table = f.clone();
    let oracle = ClassicalOracle::from_fn(n + 1 + k, 1, move |q| {
        let x = q.slice(0, n);
        let b = q.bit(n);
        let j = q.slice(n + 1, k).value() as usize;
        let fx = table.query(&x)?;
        Some(BitString::new((b && j < m && fx.bit(j)) as u64, 1))
    });
    CollisionProgram { circuit: OracleAidedCircuit::with_gates(nq, gates), oracle, in_len: n, out_len: m }
}

/// One attempt: the last two transcript samples, restricted to `x`.
pub fn collision_via_q<R: Rng + ?Sized>(prog: &CollisionProgram, rng: &mut R) -> Result<CollisionAttempt, QError> {
    let t = q_sample(&prog.circuit, &prog.oracle, rng)?;
    let k = t.steps.len();
    let a = t.steps[k - 2].slice(0, prog.in_len);
    let b = t.steps[k - 1].slice(0, prog.in_len);
    Ok(if a == b { CollisionAttempt::Same(a) } else { CollisionAttempt::Distinct(a, b) })
}

/// A uniformly random 2-to-1 function from `n` to `n − 1` bits.
pub fn planted_two_to_one<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ClassicalOracle {
    assert!(n >= 1);
    let mut order: Vec<u64> = (0..1u64 << n).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    let mut images: Vec<u64> = (0..1u64 << (n - 1)).collect();
    rand::seq::SliceRandom::shuffle(images.as_mut_slice(), rng);
    let mut rows = vec![None; 1 << n];
    for (k, x) in order.iter().enumerate() {
        rows[*x as usize] = Some(BitString::new(images[k / 2], n - 1));
    }
    ClassicalOracle::from_rows(n, n - 1, rows)
}

/// `Σ_y Pr[y] · (1 − Σ_{x ∈ f^{-1}(y)} 1/|f^{-1}(y)|²)` for uniform `x`.
pub fn distinct_probability(f: &ClassicalOracle) -> f64 {
    let n = f.in_len();
    let mut sizes = std::collections::BTreeMap::new();
    for x in BitString::all(n) {
        *sizes.entry(f.query(&x)).or_insert(0usize) += 1;
    }
    let total = (1u64 << n) as f64;
    sizes.values().map(|&s| s as f64 / total * (1.0 - 1.0 / s as f64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn rate(f: &ClassicalOracle, trials: usize, seed: u64) -> f64 {
        let prog = collision_program(f);
        let mut rng = rng_from_seed(seed);
        let mut hits = 0;
        for _ in 0..trials {
            match collision_via_q(&prog, &mut rng).unwrap() {
                CollisionAttempt::Distinct(a, b) => {
                    assert_eq!(f.query(&a), f.query(&b));
                    hits += 1;
                }
                CollisionAttempt::Same(_) => {}
            }
        }
        hits as f64 / trials as f64
    }

    #[test]
    fn injective_never_collides() {
        let f = ClassicalOracle::from_fn(2, 2, |x| Some(BitString::new(x.value() ^ 1, 2)));
        assert_eq!(rate(&f, 300, 1), 0.0);
    }

    #[test]
    fn constant_on_two_bits_is_three_quarters() {
        let f = ClassicalOracle::from_fn(2, 1, |_| Some(BitString::zeros(1)));
        assert!((distinct_probability(&f) - 0.75).abs() < 1e-12);
        let p = 0.75;
        let n = 4000;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((rate(&f, n, 2) - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn two_to_one_is_half() {
        let f = ClassicalOracle::from_fn(3, 2, |x| Some(BitString::new(x.value() >> 1, 2)));
        assert!((distinct_probability(&f) - 0.5).abs() < 1e-12);
        let n = 4000;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((rate(&f, n, 3) - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn planted_function_is_two_to_one() {
        let f = planted_two_to_one(3, &mut rng_from_seed(4));
        let mut counts = std::collections::BTreeMap::new();
        for x in BitString::all(3) {
            *counts.entry(f.query(&x).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn index_width() {
        assert_eq!(index_bits(1), 1);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(3), 2);
        assert_eq!(index_bits(4), 2);
    }
}
