//! λ-bit f-aided classical programs, the circuits handled by the
//! obfuscation bundle.
//!
//! A program is any λ-bit string read two bits at a time: `00` no-op, `01`
//! apply f, `10` complement, `11` rotate left by one. A trailing odd bit is
//! part of the encoding but has no effect. The program runs on a λ-bit
//! register initialised to its input. Shorter op sequences are zero-padded
//! to exactly λ bits.

use crate::bits::BitString;
use crate::oracle::Oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalOp {
    Nop,
    F,
    Not,
    Rot,
}

impl ClassicalOp {
    fn code(self) -> u64 {
        match self {
            ClassicalOp::Nop => 0,
            ClassicalOp::F => 1,
            ClassicalOp::Not => 2,
            ClassicalOp::Rot => 3,
        }
    }

    fn from_code(v: u64) -> Self {
        match v & 3 {
            0 => ClassicalOp::Nop,
            1 => ClassicalOp::F,
            2 => ClassicalOp::Not,
            _ => ClassicalOp::Rot,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalProgram {
    bits: BitString,
}

/// Result of one run together with the f-queries it made, in order. A ⊥
/// answer stops the run and is the last tracked query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedRun {
    pub output: Option<BitString>,
    pub queries: Vec<BitString>,
}

impl ClassicalProgram {
    pub fn from_bits(bits: BitString) -> Self {
        ClassicalProgram { bits }
    }

    /// Zero-pads `ops` to λ bits; `None` if they do not fit.
    pub fn encode(ops: &[ClassicalOp], lambda: usize) -> Option<Self> {
        if 2 * ops.len() > lambda {
            return None;
        }
        let v = ops.iter().enumerate().fold(0u64, |acc, (k, op)| acc | (op.code() << (2 * k)));
        Some(ClassicalProgram { bits: BitString::new(v, lambda) })
    }

    pub fn bits(&self) -> BitString {
        self.bits
    }

    pub fn lambda(&self) -> usize {
        self.bits.len()
    }

    pub fn ops(&self) -> Vec<ClassicalOp> {
        (0..self.lambda() / 2).map(|k| ClassicalOp::from_code(self.bits.value() >> (2 * k))).collect()
    }

    pub fn max_queries(&self) -> usize {
        self.ops().iter().filter(|&&op| op == ClassicalOp::F).count()
    }

    /// `C^f(x)`. Inputs of the wrong width give ⊥.
    pub fn run_tracked(&self, x: &BitString, f: &dyn Oracle) -> TrackedRun {
        let lambda = self.lambda();
        let mut queries = Vec::new();
        if x.len() != lambda {
            return TrackedRun { output: None, queries };
        }
        let full = if lambda == 64 { u64::MAX } else { (1u64 << lambda) - 1 };
        let mut w = *x;
        for op in self.ops() {
            w = match op {
                ClassicalOp::Nop => w,
                ClassicalOp::F => {
                    queries.push(w);
                    match f.query(&w) {
                        Some(y) if y.len() == lambda => y,
                        _ => return TrackedRun { output: None, queries },
                    }
                }
                ClassicalOp::Not => BitString::new(!w.value() & full, lambda),
                ClassicalOp::Rot => {
                    let v = w.value();
                    BitString::new((v << 1) | (v >> (lambda - 1)), lambda)
                }
            };
        }
        TrackedRun { output: Some(w), queries }
    }

    pub fn run(&self, x: &BitString, f: &dyn Oracle) -> Option<BitString> {
        self.run_tracked(x, f).output
    }
}

/// True when both programs agree on every λ-bit input under `f`.
pub fn functionally_equivalent(a: &ClassicalProgram, b: &ClassicalProgram, f: &dyn Oracle) -> bool {
    a.lambda() == b.lambda() && BitString::all(a.lambda()).all(|x| a.run(&x, f) == b.run(&x, f))
}
