//! Line-oriented text format.
//!
//! ```text
//! QUBITS 3
//! H 0
//! CNOT 0 1
//! ORACLE xor q=0,1 r=2
//! U1 2 0.0 0.0 1.0 0.0 1.0 0.0 0.0 0.0
//! SPLIT A=0 B=1,2
//! MEASURE 0,1
//! ```
//!
//! `#` starts a comment. Without `QUBITS` the width is one past the largest
//! index used. Without `SPLIT` every qubit is in A. Literal entries are
//! `re im` pairs in row-major order.

use thiserror::Error;

use super::{c, CircuitError, Gate, OracleAidedCircuit, OracleStyle, OutputSplit};
use crate::qstate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] CircuitError),
}

fn err(line: usize, msg: impl Into<String>) -> TextError {
    TextError::Syntax { line, msg: msg.into() }
}

fn parse_list(s: &str, line: usize) -> Result<Vec<usize>, TextError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| err(line, format!("bad index {t:?}")))).collect()
}

fn keyed<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str, TextError> {
    tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')).ok_or_else(|| err(line, format!("expected {key}=...")))
}

fn parse_literal<const N: usize>(toks: &[&str], line: usize) -> Result<[C64; N], TextError> {
    if toks.len() != 2 * N {
        return Err(err(line, format!("expected {} numbers", 2 * N)));
    }
    let mut m = [c(0.0, 0.0); N];
    for (k, z) in m.iter_mut().enumerate() {
        let re: f64 = toks[2 * k].parse().map_err(|_| err(line, "bad number"))?;
        let im: f64 = toks[2 * k + 1].parse().map_err(|_| err(line, "bad number"))?;
        *z = c(re, im);
    }
    Ok(m)
}

pub fn parse_text(src: &str) -> Result<OracleAidedCircuit, TextError> {
    let mut num_qubits = None;
    let mut gates = Vec::new();
    let mut split = None;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let idx = |k: usize| -> Result<usize, TextError> {
            toks.get(k).ok_or_else(|| err(line, "missing operand"))?.parse().map_err(|_| err(line, "bad index"))
        };
        let arity = |n: usize| -> Result<(), TextError> {
            if toks.len() != n + 1 {
                return Err(err(line, format!("{} takes {n} operands", toks[0])));
            }
            Ok(())
        };
        let op = toks[0].to_ascii_uppercase();
        match op.as_str() {
            "QUBITS" => {
                arity(1)?;
                num_qubits = Some(idx(1)?);
            }
            "H" | "X" | "Z" | "S" | "SDG" | "T" | "TDG" => {
                arity(1)?;
                let q = idx(1)?;
                gates.push(match op.as_str() {
                    "H" => Gate::H(q),
                    "X" => Gate::X(q),
                    "Z" => Gate::Z(q),
                    "S" => Gate::S(q),
                    "SDG" => Gate::Sdg(q),
                    "T" => Gate::T(q),
                    _ => Gate::Tdg(q),
                });
            }
            "CNOT" | "CZ" => {
                arity(2)?;
                let (a, b) = (idx(1)?, idx(2)?);
                gates.push(if op == "CNOT" { Gate::Cnot(a, b) } else { Gate::Cz(a, b) });
            }
            "U1" => gates.push(Gate::U1(idx(1)?, parse_literal::<4>(&toks[2..], line)?)),
            "U2" => {
                if toks.len() < 3 {
                    return Err(err(line, "U2 needs two qubits"));
                }
                gates.push(Gate::U2(idx(1)?, idx(2)?, parse_literal::<16>(&toks[3..], line)?))
            }
            "ORACLE" => {
                let style = match toks.get(1).copied() {
                    Some("xor") => OracleStyle::Xor,
                    Some("phase") => OracleStyle::Phase,
                    _ => return Err(err(line, "ORACLE needs style xor or phase")),
                };
                let query = parse_list(keyed(toks.get(2).copied().unwrap_or(""), "q", line)?, line)?;
                let response = match toks.get(3) {
                    Some(t) => parse_list(keyed(t, "r", line)?, line)?,
                    None => Vec::new(),
                };
                if toks.len() > 4 {
                    return Err(err(line, "trailing tokens"));
                }
                gates.push(Gate::Oracle { style, query, response });
            }
            "SPLIT" => {
                let a = parse_list(keyed(toks.get(1).copied().unwrap_or(""), "A", line)?, line)?;
                let b = match toks.get(2) {
                    Some(t) => parse_list(keyed(t, "B", line)?, line)?,
                    None => Vec::new(),
                };
                split = Some(OutputSplit { a, b });
            }
            "MEASURE" => {
                if toks.len() > 2 {
                    return Err(err(line, "MEASURE takes one list"));
                }
                gates.push(Gate::Measure(parse_list(toks.get(1).copied().unwrap_or(""), line)?));
            }
            other => return Err(err(line, format!("unknown gate {other}"))),
        }
    }
    let n = num_qubits.unwrap_or_else(|| {
        let used = gates.iter().flat_map(Gate::qubits);
        let in_split = split.iter().flat_map(|s| s.a.iter().chain(&s.b).copied());
        used.chain(in_split).max().map_or(0, |m| m + 1)
    });
    let circ = OracleAidedCircuit {
        num_qubits: n,
        gates,
        split: split.unwrap_or(OutputSplit { a: (0..n).collect(), b: Vec::new() }),
    };
    circ.validate()?;
    Ok(circ)
}

fn join(qs: &[usize]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

fn literal(m: &[C64]) -> String {
    m.iter().map(|z| format!("{:?} {:?}", z.re, z.im)).collect::<Vec<_>>().join(" ")
}

/// Text form that parses back to an equal circuit.
pub fn to_text(circ: &OracleAidedCircuit) -> String {
    let mut out = format!("QUBITS {}\n", circ.num_qubits);
    for g in &circ.gates {
        let line = match g {
            Gate::H(q) => format!("H {q}"),
            Gate::X(q) => format!("X {q}"),
            Gate::Z(q) => format!("Z {q}"),
            Gate::S(q) => format!("S {q}"),
            Gate::Sdg(q) => format!("SDG {q}"),
            Gate::T(q) => format!("T {q}"),
            Gate::Tdg(q) => format!("TDG {q}"),
            Gate::Cnot(a, b) => format!("CNOT {a} {b}"),
            Gate::Cz(a, b) => format!("CZ {a} {b}"),
            Gate::U1(q, m) => format!("U1 {q} {}", literal(m)),
            Gate::U2(a, b, m) => format!("U2 {a} {b} {}", literal(m)),
            Gate::Oracle { style, query, response } => {
                let s = match style {
                    OracleStyle::Xor => "xor",
                    OracleStyle::Phase => "phase",
                };
                format!("ORACLE {s} q={} r={}", join(query), join(response))
            }
            Gate::Measure(qs) if qs.is_empty() => "MEASURE".to_string(),
            Gate::Measure(qs) => format!("MEASURE {}", join(qs)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!("SPLIT A={} B={}\n", join(&circ.split.a), join(&circ.split.b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_forms() {
        let src = "H 0\nCNOT 0 1\nORACLE xor q=0,1 r=2,3\nSPLIT A=0 B=1,2,3\nMEASURE 0,1\n";
        let circ = parse_text(src).unwrap();
        assert_eq!(circ.num_qubits, 4);
        assert_eq!(circ.gates.len(), 4);
        assert_eq!(circ.gates[2], Gate::Oracle { style: OracleStyle::Xor, query: vec![0, 1], response: vec![2, 3] });
        assert_eq!(circ.split.b, vec![1, 2, 3]);
        assert_eq!(circ.gates[3], Gate::Measure(vec![0, 1]));
    }

    #[test]
    fn text_round_trip_with_literals() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let circ = OracleAidedCircuit::with_gates(
            2,
            vec![
                Gate::U1(1, [c(h, 0.0), c(0.0, h), c(0.0, h), c(h, 0.0)]),
                Gate::Oracle { style: OracleStyle::Phase, query: vec![0], response: vec![] },
                Gate::Measure(vec![]),
            ],
        )
        .with_split(vec![1], vec![0]);
        assert_eq!(parse_text(&to_text(&circ)).unwrap(), circ);
    }

    #[test]
    fn comments_and_errors() {
        assert!(parse_text("# nothing\nQUBITS 1\nH 0 # trailing\n").is_ok());
        assert!(matches!(parse_text("FOO 1"), Err(TextError::Syntax { line: 1, .. })));
        assert!(matches!(parse_text("QUBITS 1\nH 3"), Err(TextError::Invalid(_))));
        assert!(parse_text("ORACLE maybe q=0").is_err());
    }
}
