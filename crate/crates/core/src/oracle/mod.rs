//! Classical oracles: table-backed, lazily seeded and punctured, plus the
//! obfuscation bundle in [`bundle`].
//!
//! `None` is the ⊥ answer. It is never a bit string.

pub mod bundle;

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitString;
use crate::compressed::ProductDistribution;
use crate::seed::keyed_unit;

pub use bundle::{eval_oracle, find, find_distribution, sample_bundle, BundleError, BundleView, OracleBundle};

/// Deterministic partial function on bit strings.
pub trait Oracle: Send + Sync {
    fn query(&self, x: &BitString) -> Option<BitString>;
}

impl<T: Oracle + ?Sized> Oracle for &T {
    fn query(&self, x: &BitString) -> Option<BitString> {
        (**self).query(x)
    }
}

impl<T: Oracle + ?Sized> Oracle for Box<T> {
    fn query(&self, x: &BitString) -> Option<BitString> {
        (**self).query(x)
    }
}

impl<T: Oracle + ?Sized> Oracle for Arc<T> {
    fn query(&self, x: &BitString) -> Option<BitString> {
        (**self).query(x)
    }
}

/// Largest input width materialized as a dense table.
pub const MAX_TABLE_BITS: usize = 24;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("input width {0} too large to materialize")]
    TooWide(usize),
    #[error("dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Input set on which a punctured oracle answers ⊥.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PunctureSet {
    Points(BTreeSet<BitString>),
    /// Strings of length `total_len` whose bits `offset..offset+len` equal `value`.
    Slice {
        total_len: usize,
        offset: usize,
        value: BitString,
    },
    Union(Vec<PunctureSet>),
}

impl PunctureSet {
    pub fn empty() -> Self {
        PunctureSet::Points(BTreeSet::new())
    }

    pub fn points<I: IntoIterator<Item = BitString>>(xs: I) -> Self {
        PunctureSet::Points(xs.into_iter().collect())
    }

    /// `(*, r) = {(C, r) : C ∈ {0,1}^λ}` for `λ = |r|`.
    pub fn randomness(r: BitString) -> Self {
        PunctureSet::Slice { total_len: 2 * r.len(), offset: r.len(), value: r }
    }

    pub fn union(self, other: PunctureSet) -> Self {
        PunctureSet::Union(vec![self, other])
    }

    pub fn contains(&self, x: &BitString) -> bool {
        match self {
            PunctureSet::Points(s) => s.contains(x),
            PunctureSet::Slice { total_len, offset, value } => {
                x.len() == *total_len && x.slice(*offset, value.len()) == *value
            }
            PunctureSet::Union(parts) => parts.iter().any(|p| p.contains(x)),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            PunctureSet::Points(s) => s.is_empty(),
            PunctureSet::Slice { .. } => false,
            PunctureSet::Union(parts) => parts.iter().all(PunctureSet::is_empty),
        }
    }
}

/// Dense table over all inputs of one width; missing rows are ⊥.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOracle {
    in_len: usize,
    out_len: usize,
    rows: Vec<Option<BitString>>,
}

#[derive(Clone, Debug)]
pub enum LazyRows {
    Uniform { out_len: usize },
    Product(Arc<ProductDistribution>),
}

/// Rows derived on demand from a keyed hash of `(seed, id, input)`.
#[derive(Clone, Debug)]
pub struct LazyOracle {
    seed: u64,
    id: u64,
    in_len: usize,
    rows: LazyRows,
}

#[derive(Clone, Debug)]
pub enum ClassicalOracle {
    Table(TableOracle),
    Lazy(LazyOracle),
    Punctured { base: Box<ClassicalOracle>, set: PunctureSet },
}

impl LazyOracle {
    fn key(&self, x: &BitString) -> [u8; 17] {
        let mut k = [0u8; 17];
        k[..8].copy_from_slice(&self.id.to_le_bytes());
        k[8] = x.len() as u8;
        k[9..].copy_from_slice(&x.value().to_le_bytes());
        k
    }

    fn eval(&self, x: &BitString) -> Option<BitString> {
        if x.len() != self.in_len {
            return None;
        }
        let u = keyed_unit(self.seed, "lazy-oracle", &self.key(x));
        match &self.rows {
            LazyRows::Uniform { out_len } => {
                let v = (u * (1u64 << out_len) as f64) as u64;
                Some(BitString::new(v, *out_len))
            }
            LazyRows::Product(d) => Some(d.row(x)?.sample_at(u)),
        }
    }

    fn out_len(&self) -> usize {
        match &self.rows {
            LazyRows::Uniform { out_len } => *out_len,
            LazyRows::Product(d) => d.out_len(),
        }
    }
}

impl ClassicalOracle {
    /// Table from a function, evaluated on every `in_len`-bit input.
    pub fn from_fn<F: FnMut(&BitString) -> Option<BitString>>(in_len: usize, out_len: usize, mut f: F) -> Self {
        assert!(in_len <= MAX_TABLE_BITS, "table of 2^{in_len} rows");
        ClassicalOracle::Table(TableOracle { in_len, out_len, rows: BitString::all(in_len).map(|x| f(&x)).collect() })
    }

    pub fn from_rows(in_len: usize, out_len: usize, rows: Vec<Option<BitString>>) -> Self {
        assert_eq!(rows.len(), 1 << in_len);
        ClassicalOracle::Table(TableOracle { in_len, out_len, rows })
    }

    pub fn lazy_uniform(seed: u64, id: u64, in_len: usize, out_len: usize) -> Self {
        assert!(out_len <= 52, "uniform rows limited to 52 bits");
        ClassicalOracle::Lazy(LazyOracle { seed, id, in_len, rows: LazyRows::Uniform { out_len } })
    }

    pub fn lazy_product(seed: u64, id: u64, d: Arc<ProductDistribution>) -> Self {
        ClassicalOracle::Lazy(LazyOracle { seed, id, in_len: d.in_len(), rows: LazyRows::Product(d) })
    }

    pub fn in_len(&self) -> usize {
        match self {
            ClassicalOracle::Table(t) => t.in_len,
            ClassicalOracle::Lazy(l) => l.in_len,
            ClassicalOracle::Punctured { base, .. } => base.in_len(),
        }
    }

    pub fn out_len(&self) -> usize {
        match self {
            ClassicalOracle::Table(t) => t.out_len,
            ClassicalOracle::Lazy(l) => l.out_len(),
            ClassicalOracle::Punctured { base, .. } => base.out_len(),
        }
    }

    /// Dense table with the same answers on every `in_len`-bit input.
    pub fn materialize(&self) -> Result<ClassicalOracle, OracleError> {
        let n = self.in_len();
        if n > MAX_TABLE_BITS {
            return Err(OracleError::TooWide(n));
        }
        Ok(ClassicalOracle::from_fn(n, self.out_len(), |x| self.query(x)))
    }

    /// Inputs of the declared width on which `self` and `other` answer differently.
    pub fn differing_set(&self, other: &dyn Oracle) -> BTreeSet<BitString> {
        BitString::all(self.in_len()).filter(|x| self.query(x) != other.query(x)).collect()
    }

    /// `in_hex out_hex` per input, `-` for ⊥, after a width header.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<(), OracleError> {
        writeln!(w, "# in_bits={} out_bits={}", self.in_len(), self.out_len())?;
        for x in BitString::all(self.in_len()) {
            match self.query(&x) {
                Some(y) => writeln!(w, "{} {}", x.to_hex(), y.to_hex())?,
                None => writeln!(w, "{} -", x.to_hex())?,
            }
        }
        Ok(())
    }

    pub fn parse_dump<R: BufRead>(r: R) -> Result<ClassicalOracle, OracleError> {
        let bad = |line: usize, msg: &str| OracleError::Dump { line, msg: msg.to_string() };
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty dump"))?;
        let header = header?;
        let widths: Vec<usize> = header
            .trim_start_matches('#')
            .split_whitespace()
            .filter_map(|t| t.split_once('=').and_then(|(_, v)| v.parse().ok()))
            .collect();
        let [in_len, out_len] = widths[..] else { return Err(bad(1, "bad header")) };
        if in_len > MAX_TABLE_BITS {
            return Err(OracleError::TooWide(in_len));
        }
        let mut rows = vec![None; 1 << in_len];
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (x, y) = line.split_once(' ').ok_or_else(|| bad(i + 1, "expected two fields"))?;
            let x = BitString::from_hex(x, in_len).map_err(|_| bad(i + 1, "bad input"))?;
            rows[x.value() as usize] = match y {
                "-" => None,
                y => Some(BitString::from_hex(y, out_len).map_err(|_| bad(i + 1, "bad output"))?),
            };
        }
        Ok(ClassicalOracle::from_rows(in_len, out_len, rows))
    }
}

impl Oracle for ClassicalOracle {
    fn query(&self, x: &BitString) -> Option<BitString> {
        match self {
            ClassicalOracle::Table(t) => {
                if x.len() != t.in_len {
                    return None;
                }
                t.rows[x.value() as usize]
            }
            ClassicalOracle::Lazy(l) => l.eval(x),
            ClassicalOracle::Punctured { base, set } => {
                if set.contains(x) {
                    None
                } else {
                    base.query(x)
                }
            }
        }
    }
}

/// `o` with ⊥ on `set` and unchanged elsewhere.
pub fn puncture(o: ClassicalOracle, set: PunctureSet) -> ClassicalOracle {
    ClassicalOracle::Punctured { base: Box::new(o), set }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    fn random_table(in_len: usize, out_len: usize, seed: u64) -> ClassicalOracle {
        let mut rng = rng_from_seed(seed);
        ClassicalOracle::from_fn(in_len, out_len, |_| Some(BitString::new(rng.gen(), out_len)))
    }

    #[test]
    fn empty_puncture_is_identity() {
        let f = random_table(4, 4, 1);
        let p = puncture(f.clone(), PunctureSet::empty());
        assert!(f.differing_set(&p).is_empty());
    }

    #[test]
    fn point_puncture() {
        let f = random_table(4, 4, 2);
        let x = BitString::new(5, 4);
        let p = puncture(f.clone(), PunctureSet::points([x]));
        assert_eq!(p.query(&x), None);
        assert_eq!(f.differing_set(&p), BTreeSet::from([x]));
    }

    #[test]
    fn randomness_slice_puncture_hits_exactly_the_slice() {
        let lambda = 4;
        let o = random_table(2 * lambda, 3 * lambda, 3);
        let r = BitString::new(0b1010, lambda);
        let p = puncture(o, PunctureSet::randomness(r));
        let bots: Vec<BitString> = BitString::all(2 * lambda).filter(|x| p.query(x).is_none()).collect();
        assert_eq!(bots.len(), 1 << lambda);
        assert!(bots.iter().all(|x| x.slice(lambda, lambda) == r));
    }

    #[test]
    fn lazy_is_deterministic_and_matches_its_table() {
        let lazy = ClassicalOracle::lazy_uniform(9, 1, 6, 5);
        let table = lazy.materialize().unwrap();
        for x in BitString::all(6) {
            assert_eq!(lazy.query(&x), lazy.query(&x));
            assert_eq!(lazy.query(&x), table.query(&x));
        }
        let other = ClassicalOracle::lazy_uniform(9, 2, 6, 5);
        assert!(!lazy.differing_set(&other).is_empty());
        assert_eq!(lazy.query(&BitString::new(0, 5)), None);
    }

    #[test]
    fn dump_round_trip() {
        let f = puncture(random_table(5, 7, 4), PunctureSet::points([BitString::new(3, 5)]));
        let mut buf = Vec::new();
        f.dump(&mut buf).unwrap();
        let back = ClassicalOracle::parse_dump(&buf[..]).unwrap();
        assert!(f.materialize().unwrap().differing_set(&back).is_empty());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# in_bits=5 out_bits=7\n"));
        assert!(text.contains("\n03 -\n"));
    }
}
