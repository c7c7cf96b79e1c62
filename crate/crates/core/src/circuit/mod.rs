//! Classical reversible circuits over the gate set {NOT, CNOT, TOFFOLI}.
//!
//! Every gate is an involutive permutation of computational basis states, so a
//! circuit is a permutation as well and its inverse is the same gate list read
//! backwards. Work registers are packed into a `u128` with wire `i` stored at
//! bit `i`; bit strings shown to users put wire 0 leftmost.

mod parse;
mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use parse::parse_circuit;
pub use schema::{
    build_counter_schema, build_toggle_schema, SchemaDescriptor, SchemaKind,
    DEFAULT_CONTRACT_WIDTH_CAP,
};

/// Widest work register a circuit may declare.
pub const MAX_WIRES: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate wire {wire} in gate")]
    DuplicateWire { line: usize, wire: usize },
    #[error("line {line}: wire {wire} out of range for width {width}")]
    WireOutOfRange { line: usize, wire: usize, width: usize },
    #[error("gate {index}: duplicate wire {wire}")]
    GateDuplicateWire { index: usize, wire: usize },
    #[error("gate {index}: wire {wire} out of range for width {width}")]
    GateWireOutOfRange { index: usize, wire: usize, width: usize },
    #[error("circuit width {0} exceeds the supported maximum of {MAX_WIRES} wires")]
    TooWide(usize),
    #[error("input has {got} bits but the circuit has {expected} wires")]
    WidthMismatch { expected: usize, got: usize },
    #[error("invalid bit string {0:?}: expected only '0' and '1'")]
    InvalidBits(String),
    #[error("predicate circuit has no gates")]
    EmptyPredicate,
    #[error("predicate circuit declares wire {wire} as {role}, which the schema reserves")]
    ReservedRole { wire: usize, role: WireRole },
    #[error("predicate circuit has no scratch wire to hold its result")]
    MissingScratch,
    #[error("predicate circuit changes input wire {wire} for input {input}")]
    InputModified { wire: usize, input: BitString },
    #[error("predicate circuit leaves ancilla wire {wire} set for input {input}")]
    ScratchNotRestored { wire: usize, input: BitString },
    #[error("counter width must be at least 1")]
    ZeroCounterWidth,
    #[error("schema contract violated for input {input}: expected {expected}, got {got}")]
    ContractViolated {
        input: BitString,
        expected: BitString,
        got: BitString,
    },
    #[error("circuit needs at least 2 gates for a well-formed clock, got {0}")]
    TooFewGates(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::Cnot => 2,
            GateKind::Toffoli => 3,
        }
    }

    fn mnemonic(self) -> &'static str {
        match self {
            GateKind::Not => "x",
            GateKind::Cnot => "cx",
            GateKind::Toffoli => "ccx",
        }
    }
}

/// A multi-controlled NOT: controls first, target last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    wires: [usize; 3],
}

impl Gate {
    pub fn not(target: usize) -> Self {
        Gate {
            kind: GateKind::Not,
            wires: [target, 0, 0],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Cnot,
            wires: [control, target, 0],
        }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Toffoli,
            wires: [c1, c2, target],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires[..self.kind.arity()]
    }

    pub fn target(&self) -> usize {
        self.wires[self.kind.arity() - 1]
    }

    pub fn controls(&self) -> &[usize] {
        &self.wires[..self.kind.arity() - 1]
    }

    fn duplicate_wire(&self) -> Option<usize> {
        let w = self.wires();
        for (i, a) in w.iter().enumerate() {
            if w[i + 1..].contains(a) {
                return Some(*a);
            }
        }
        None
    }

    /// Applies the gate to a packed work register.
    #[inline]
    pub fn apply(&self, word: u128) -> u128 {
        let fire = self.controls().iter().all(|&c| word >> c & 1 == 1);
        if fire {
            word ^ (1u128 << self.target())
        } else {
            word
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.mnemonic())?;
        for w in self.wires() {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WireRole {
    Input,
    Output,
    Scratch,
    Toggle,
}

impl fmt::Display for WireRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WireRole::Input => "input",
            WireRole::Output => "output",
            WireRole::Scratch => "scratch",
            WireRole::Toggle => "toggle",
        })
    }
}

impl FromStr for WireRole {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "input" => Ok(WireRole::Input),
            "output" => Ok(WireRole::Output),
            "scratch" => Ok(WireRole::Scratch),
            "toggle" => Ok(WireRole::Toggle),
            _ => Err(()),
        }
    }
}

/// Fixed-width bit vector, wire 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Packs into a word with wire `i` at bit `i`.
    pub fn to_word(&self) -> u128 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u128::from(b) << i))
    }

    pub fn from_word(word: u128, len: usize) -> Self {
        BitString((0..len).map(|i| word >> i & 1 == 1).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, CircuitError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CircuitError::InvalidBits(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

/// Ordered gate list on `width` work wires, with optional wire roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibleCircuit {
    width: usize,
    gates: Vec<Gate>,
    roles: BTreeMap<usize, WireRole>,
}

impl ReversibleCircuit {
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        if width > MAX_WIRES {
            return Err(CircuitError::TooWide(width));
        }
        for (index, g) in gates.iter().enumerate() {
            if let Some(wire) = g.duplicate_wire() {
                return Err(CircuitError::GateDuplicateWire { index, wire });
            }
            if let Some(&wire) = g.wires().iter().find(|&&w| w >= width) {
                return Err(CircuitError::GateWireOutOfRange { index, wire, width });
            }
        }
        Ok(ReversibleCircuit {
            width,
            gates,
            roles: BTreeMap::new(),
        })
    }

    pub fn with_role(mut self, wire: usize, role: WireRole) -> Result<Self, CircuitError> {
        if wire >= self.width {
            return Err(CircuitError::GateWireOutOfRange {
                index: self.gates.len(),
                wire,
                width: self.width,
            });
        }
        self.roles.insert(wire, role);
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn roles(&self) -> &BTreeMap<usize, WireRole> {
        &self.roles
    }

    pub fn role(&self, wire: usize) -> Option<WireRole> {
        self.roles.get(&wire).copied()
    }

    /// Wires carrying `role`, ascending.
    pub fn wires_with_role(&self, role: WireRole) -> Vec<usize> {
        self.roles
            .iter()
            .filter(|(_, &r)| r == role)
            .map(|(&w, _)| w)
            .collect()
    }

    /// The gate list in reverse order. Since every gate is an involution this
    /// is the inverse permutation.
    pub fn reversed(&self) -> Self {
        ReversibleCircuit {
            width: self.width,
            gates: self.gates.iter().rev().copied().collect(),
            roles: self.roles.clone(),
        }
    }

    #[inline]
    pub fn apply_word(&self, word: u128) -> u128 {
        self.gates.iter().fold(word, |w, g| g.apply(w))
    }

    pub fn simulate(&self, input: &BitString) -> Result<BitString, CircuitError> {
        if input.len() != self.width {
            return Err(CircuitError::WidthMismatch {
                expected: self.width,
                got: input.len(),
            });
        }
        Ok(BitString::from_word(
            self.apply_word(input.to_word()),
            self.width,
        ))
    }

    /// Renders the circuit in the line-based text format read by
    /// [`parse_circuit`].
    pub fn to_text(&self) -> String {
        let mut out = format!("wires {}\n", self.width);
        for (w, r) in &self.roles {
            out.push_str(&format!("role {w} {r}\n"));
        }
        for g in &self.gates {
            out.push_str(&format!("{g}\n"));
        }
        out
    }
}

/// Applies `simulate` by name, for callers that prefer a free function.
pub fn simulate_circuit(
    circuit: &ReversibleCircuit,
    input: &BitString,
) -> Result<BitString, CircuitError> {
    circuit.simulate(input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn toffoli_truth_table() {
        let c = ReversibleCircuit::new(4, vec![Gate::toffoli(0, 1, 3)]).unwrap();
        assert_eq!(c.simulate(&bits("1100")).unwrap(), bits("1101"));
        assert_eq!(c.simulate(&bits("1101")).unwrap(), bits("1100"));
        assert_eq!(c.simulate(&bits("1000")).unwrap(), bits("1000"));
        assert_eq!(c.simulate(&bits("0101")).unwrap(), bits("0101"));
    }

    #[test]
    fn not_not_is_identity() {
        let c = ReversibleCircuit::new(1, vec![Gate::not(0), Gate::not(0)]).unwrap();
        assert_eq!(c.simulate(&bits("0")).unwrap(), bits("0"));
        assert_eq!(c.simulate(&bits("1")).unwrap(), bits("1"));
    }

    #[test]
    fn cnot_truth_table() {
        let c = ReversibleCircuit::new(2, vec![Gate::cnot(0, 1)]).unwrap();
        assert_eq!(c.simulate(&bits("10")).unwrap(), bits("11"));
        assert_eq!(c.simulate(&bits("11")).unwrap(), bits("10"));
        assert_eq!(c.simulate(&bits("01")).unwrap(), bits("01"));
    }

    #[test]
    fn width_mismatch() {
        let c = ReversibleCircuit::new(2, vec![Gate::cnot(0, 1)]).unwrap();
        assert_eq!(
            c.simulate(&bits("1")),
            Err(CircuitError::WidthMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn rejects_bad_gates() {
        assert!(matches!(
            ReversibleCircuit::new(2, vec![Gate::cnot(1, 1)]),
            Err(CircuitError::GateDuplicateWire { wire: 1, .. })
        ));
        assert!(matches!(
            ReversibleCircuit::new(2, vec![Gate::toffoli(0, 1, 2)]),
            Err(CircuitError::GateWireOutOfRange { wire: 2, .. })
        ));
        assert!(ReversibleCircuit::new(MAX_WIRES + 1, vec![]).is_err());
    }

    #[test]
    fn every_gate_is_a_permutation_on_three_wires() {
        let gates = [Gate::not(2), Gate::cnot(0, 2), Gate::toffoli(0, 1, 2)];
        for g in gates {
            let mut seen = [false; 8];
            for x in 0..8u128 {
                let y = g.apply(x);
                assert!(y < 8);
                assert!(!seen[y as usize]);
                seen[y as usize] = true;
                assert_eq!(g.apply(y), x);
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let c = ReversibleCircuit::new(4, vec![Gate::toffoli(0, 1, 3), Gate::not(2)])
            .unwrap()
            .with_role(3, WireRole::Scratch)
            .unwrap();
        assert_eq!(parse_circuit(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn bitstring_word_layout() {
        let b = bits("1000");
        assert_eq!(b.to_word(), 1);
        assert_eq!(BitString::from_word(0b1010, 4), bits("0101"));
        assert!("10a".parse::<BitString>().is_err());
    }
}
