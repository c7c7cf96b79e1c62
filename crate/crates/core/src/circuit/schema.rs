//! Schema circuits: wrap a predicate circuit `G` into a circuit `V` whose
//! `r`-fold repetition adds `f(x)` to an output register and restores every
//! other wire.
//!
//! Both builders use a toggle wire `t` that alternates between repetitions, so
//! the output changes only during the first half of each logical cycle and the
//! `r = 2` repetition returns all scratch state to zero.

use serde::Serialize;

use super::{BitString, CircuitError, Gate, ReversibleCircuit, WireRole};

/// Largest number of free bits (inputs plus output register) enumerated when
/// checking a schema contract exhaustively.
pub const DEFAULT_CONTRACT_WIDTH_CAP: usize = 12;

const SCHEMA_REPETITIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaKind {
    Toggle,
    Counter,
}

/// Wire layout and repetition data of a schema circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaDescriptor {
    pub kind: SchemaKind,
    /// Repetitions of `V` per logical cycle; always even.
    pub r: usize,
    /// Output register width in bits.
    pub c: usize,
    /// Gates in the embedded predicate circuit.
    pub compute_gate_count: usize,
    pub input_wires: Vec<usize>,
    pub scratch_wire: usize,
    pub ancilla_wires: Vec<usize>,
    /// Output register, least significant bit first.
    pub output_wires: Vec<usize>,
    pub toggle_wire: usize,
}

impl SchemaDescriptor {
    /// Wire whose reduced state distinguishes yes from no instances: the
    /// most significant output bit.
    pub fn output_wire(&self) -> usize {
        *self.output_wires.last().expect("c >= 1")
    }

    /// Number of logical cycles before the output register wraps for a
    /// yes-instance.
    pub fn counter_period(&self) -> usize {
        1 << self.c
    }

    /// Work register with `x` on the input wires and everything else zero.
    pub fn initial_work(&self, x: &BitString, width: usize) -> Result<BitString, CircuitError> {
        if x.len() != self.input_wires.len() {
            return Err(CircuitError::WidthMismatch {
                expected: self.input_wires.len(),
                got: x.len(),
            });
        }
        let mut bits = vec![false; width];
        for (&w, &b) in self.input_wires.iter().zip(x.bits()) {
            bits[w] = b;
        }
        Ok(BitString::new(bits))
    }

    /// Evaluates the embedded predicate on `x` by running the compute
    /// prefix of `v`.
    pub fn predicate(&self, v: &ReversibleCircuit, x: &BitString) -> Result<bool, CircuitError> {
        let word = self.initial_work(x, v.width())?.to_word();
        let out = v.gates()[..self.compute_gate_count]
            .iter()
            .fold(word, |w, g| g.apply(w));
        Ok(out >> self.scratch_wire & 1 == 1)
    }

    /// Reads the output register of a packed work word.
    pub fn read_output(&self, word: u128) -> usize {
        self.output_wires
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &w)| acc | (((word >> w & 1) as usize) << i))
    }
}

struct PredicateLayout {
    inputs: Vec<usize>,
    scratch: usize,
    ancillas: Vec<usize>,
}

fn predicate_layout(g: &ReversibleCircuit) -> Result<PredicateLayout, CircuitError> {
    if g.is_empty() {
        return Err(CircuitError::EmptyPredicate);
    }
    if let Some((&wire, &role)) = g
        .roles()
        .iter()
        .find(|(_, &r)| matches!(r, WireRole::Output | WireRole::Toggle))
    {
        return Err(CircuitError::ReservedRole { wire, role });
    }
    let scratch = *g
        .wires_with_role(WireRole::Scratch)
        .first()
        .ok_or(CircuitError::MissingScratch)?;
    let declared = g.wires_with_role(WireRole::Input);
    let inputs = if declared.is_empty() {
        (0..g.width()).filter(|&w| w != scratch).collect()
    } else {
        declared
    };
    let ancillas = (0..g.width())
        .filter(|w| *w != scratch && !inputs.contains(w))
        .collect();
    Ok(PredicateLayout {
        inputs,
        scratch,
        ancillas,
    })
}

fn spread(value: u128, wires: &[usize]) -> u128 {
    wires
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &w)| acc | ((value >> i & 1) << w))
}

/// Checks that `g` fixes its inputs, writes `f(x)` to the scratch wire and
/// leaves every ancilla at zero.
fn check_predicate(
    g: &ReversibleCircuit,
    layout: &PredicateLayout,
    cap: usize,
) -> Result<(), CircuitError> {
    if layout.inputs.len() > cap {
        return Ok(());
    }
    for x in 0..(1u128 << layout.inputs.len()) {
        let word = spread(x, &layout.inputs);
        let out = g.apply_word(word);
        let input = || BitString::from_word(word, g.width());
        if let Some(&wire) = layout
            .inputs
            .iter()
            .find(|&&w| (out ^ word) >> w & 1 == 1)
        {
            return Err(CircuitError::InputModified {
                wire,
                input: input(),
            });
        }
        if let Some(&wire) = layout.ancillas.iter().find(|&&w| out >> w & 1 == 1) {
            return Err(CircuitError::ScratchNotRestored {
                wire,
                input: input(),
            });
        }
    }
    Ok(())
}

fn assemble(
    g: &ReversibleCircuit,
    layout: &PredicateLayout,
    width: usize,
    toggle: usize,
    update: Vec<Gate>,
) -> Result<ReversibleCircuit, CircuitError> {
    let mut gates = Vec::with_capacity(2 * g.len() + update.len() + 3);
    gates.extend_from_slice(g.gates());
    gates.push(Gate::not(toggle));
    gates.extend(update);
    gates.push(Gate::not(toggle));
    gates.extend(g.gates().iter().rev().copied());
    gates.push(Gate::not(toggle));

    let mut v = ReversibleCircuit::new(width, gates)?;
    for &w in &layout.inputs {
        v = v.with_role(w, WireRole::Input)?;
    }
    v = v.with_role(layout.scratch, WireRole::Scratch)?;
    for &w in &layout.ancillas {
        v = v.with_role(w, WireRole::Scratch)?;
    }
    Ok(v.with_role(toggle, WireRole::Toggle)?)
}

/// Verifies `V^r (x, y, 0) = (x, y + f(x) mod 2^c, 0)` for every `x` and `y`
/// when the enumerated width fits under `cap`.
fn check_contract(
    v: &ReversibleCircuit,
    desc: &SchemaDescriptor,
    cap: usize,
) -> Result<(), CircuitError> {
    let free = desc.input_wires.len() + desc.c;
    if free > cap {
        return Ok(());
    }
    let modulus = 1u128 << desc.c;
    let compute = &v.gates()[..desc.compute_gate_count];
    for x in 0..(1u128 << desc.input_wires.len()) {
        let xw = spread(x, &desc.input_wires);
        let f = compute.iter().fold(xw, |w, g| g.apply(w)) >> desc.scratch_wire & 1;
        for y in 0..modulus {
            let start = xw | spread(y, &desc.output_wires);
            let expected = xw | spread((y + f) % modulus, &desc.output_wires);
            let got = (0..desc.r).fold(start, |w, _| v.apply_word(w));
            if got != expected {
                return Err(CircuitError::ContractViolated {
                    input: BitString::from_word(start, v.width()),
                    expected: BitString::from_word(expected, v.width()),
                    got: BitString::from_word(got, v.width()),
                });
            }
        }
    }
    Ok(())
}

/// Builds `V = [G; X(t); CCX(w, t, y); X(t); G⁻¹; X(t)]` on G's wires plus an
/// output wire `y` and a toggle wire `t` (appended in that order).
///
/// `V²` maps `(x, y, 0…0)` to `(x, y ⊕ f(x), 0…0)`. The contract is checked
/// exhaustively when `inputs + 1 <= cap`.
pub fn build_toggle_schema(
    g: &ReversibleCircuit,
    cap: usize,
) -> Result<(ReversibleCircuit, SchemaDescriptor), CircuitError> {
    let layout = predicate_layout(g)?;
    check_predicate(g, &layout, cap)?;

    let y = g.width();
    let t = y + 1;
    let v = assemble(
        g,
        &layout,
        g.width() + 2,
        t,
        vec![Gate::toffoli(layout.scratch, t, y)],
    )?
    .with_role(y, WireRole::Output)?;

    let desc = SchemaDescriptor {
        kind: SchemaKind::Toggle,
        r: SCHEMA_REPETITIONS,
        c: 1,
        compute_gate_count: g.len(),
        input_wires: layout.inputs,
        scratch_wire: layout.scratch,
        ancilla_wires: layout.ancillas,
        output_wires: vec![y],
        toggle_wire: t,
    };
    check_contract(&v, &desc, cap)?;
    Ok((v, desc))
}

/// Builds a schema whose output is a `c`-bit counter advanced by `f(x)` once
/// per logical cycle.
///
/// Wires appended after G's: toggle `t`, counter `y_0 … y_{c-1}` (LSB first),
/// then carry ancillas `a_0 … a_{c-1}`. The increment is a ripple of
/// Toffolis computing `a_i = w·t·y_0⋯y_{i-1}`, flipping counter bits from the
/// top down and uncomputing each carry as it goes.
pub fn build_counter_schema(
    g: &ReversibleCircuit,
    c: usize,
    cap: usize,
) -> Result<(ReversibleCircuit, SchemaDescriptor), CircuitError> {
    if c == 0 {
        return Err(CircuitError::ZeroCounterWidth);
    }
    let layout = predicate_layout(g)?;
    check_predicate(g, &layout, cap)?;

    let t = g.width();
    let ys: Vec<usize> = (0..c).map(|i| t + 1 + i).collect();
    let carries: Vec<usize> = (0..c).map(|i| t + 1 + c + i).collect();
    let width = t + 1 + 2 * c;

    let w = layout.scratch;
    let mut inc = vec![Gate::toffoli(w, t, carries[0])];
    for i in 1..c {
        inc.push(Gate::toffoli(carries[i - 1], ys[i - 1], carries[i]));
    }
    for i in (1..c).rev() {
        inc.push(Gate::cnot(carries[i], ys[i]));
        inc.push(Gate::toffoli(carries[i - 1], ys[i - 1], carries[i]));
    }
    inc.push(Gate::cnot(carries[0], ys[0]));
    inc.push(Gate::toffoli(w, t, carries[0]));

    let mut v = assemble(g, &layout, width, t, inc)?;
    for &y in &ys {
        v = v.with_role(y, WireRole::Output)?;
    }
    for &a in &carries {
        v = v.with_role(a, WireRole::Scratch)?;
    }

    let mut ancillas = layout.ancillas;
    ancillas.extend_from_slice(&carries);
    let desc = SchemaDescriptor {
        kind: SchemaKind::Counter,
        r: SCHEMA_REPETITIONS,
        c,
        compute_gate_count: g.len(),
        input_wires: layout.inputs,
        scratch_wire: layout.scratch,
        ancilla_wires: ancillas,
        output_wires: ys,
        toggle_wire: t,
    };
    check_contract(&v, &desc, cap)?;
    Ok((v, desc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn and_predicate() -> ReversibleCircuit {
        parse_circuit("wires 3\nrole 0 input\nrole 1 input\nrole 2 scratch\nccx 0 1 2").unwrap()
    }

    fn const_one() -> ReversibleCircuit {
        parse_circuit("wires 2\nrole 0 input\nrole 1 scratch\nx 1").unwrap()
    }

    /// Reference semantics: apply `V` `n` times by explicit gate-by-gate
    /// simulation on bit vectors.
    fn power(v: &ReversibleCircuit, input: &BitString, n: usize) -> BitString {
        (0..n).fold(input.clone(), |b, _| v.simulate(&b).unwrap())
    }

    #[test]
    fn and_toggle_layout() {
        let (v, d) = build_toggle_schema(&and_predicate(), DEFAULT_CONTRACT_WIDTH_CAP).unwrap();
        assert_eq!(v.width(), 5);
        assert_eq!(v.len(), 6);
        assert_eq!(d.r, 2);
        assert_eq!(d.c, 1);
        assert_eq!(d.output_wires, vec![3]);
        assert_eq!(d.toggle_wire, 4);
        assert_eq!(
            v.gates(),
            &[
                Gate::toffoli(0, 1, 2),
                Gate::not(4),
                Gate::toffoli(2, 4, 3),
                Gate::not(4),
                Gate::toffoli(0, 1, 2),
                Gate::not(4),
            ]
        );
    }

    #[test]
    fn and_toggle_squared_over_all_work_states() {
        let (v, _) = build_toggle_schema(&and_predicate(), DEFAULT_CONTRACT_WIDTH_CAP).unwrap();
        // wires: q0 q1 w y t; only states with w = t = 0 are in the contract
        for word in 0..32u128 {
            let b = BitString::from_word(word, 5);
            let bits = b.bits();
            let out = power(&v, &b, 2);
            if !bits[2] && !bits[4] {
                let f = bits[0] && bits[1];
                let mut want = bits.to_vec();
                want[3] ^= f;
                assert_eq!(out.bits(), &want[..], "{b}");
            }
            // V is a permutation: V^2 has an inverse given by reversal
            let back = power(&v.reversed(), &out, 2);
            assert_eq!(back, b);
        }
    }

    #[test]
    fn constant_one_toggle() {
        let (v, d) = build_toggle_schema(&const_one(), DEFAULT_CONTRACT_WIDTH_CAP).unwrap();
        assert_eq!(v.len(), 6);
        for x in ["0", "1"] {
            for y in [false, true] {
                let x: BitString = x.parse().unwrap();
                let mut start = d.initial_work(&x, v.width()).unwrap().bits().to_vec();
                start[2] = y;
                let out = power(&v, &BitString::new(start.clone()), 2);
                start[2] = !y;
                assert_eq!(out.bits(), &start[..]);
            }
        }
    }

    #[test]
    fn empty_predicate_rejected() {
        let g = parse_circuit("wires 2\nrole 1 scratch").unwrap();
        assert_eq!(
            build_toggle_schema(&g, 12).unwrap_err(),
            CircuitError::EmptyPredicate
        );
    }

    #[test]
    fn reserved_roles_rejected() {
        let g = parse_circuit("wires 3\nrole 1 scratch\nrole 2 output\nccx 0 2 1").unwrap();
        assert!(matches!(
            build_toggle_schema(&g, 12),
            Err(CircuitError::ReservedRole { wire: 2, .. })
        ));
        let g = parse_circuit("wires 3\nrole 1 scratch\nrole 2 toggle\nx 1").unwrap();
        assert!(matches!(
            build_counter_schema(&g, 2, 12),
            Err(CircuitError::ReservedRole { wire: 2, .. })
        ));
    }

    #[test]
    fn dirty_predicates_rejected() {
        // leaves ancilla wire 2 set
        let g = parse_circuit("wires 3\nrole 0 input\nrole 1 scratch\ncx 0 1\nx 2").unwrap();
        assert!(matches!(
            build_toggle_schema(&g, 12),
            Err(CircuitError::ScratchNotRestored { wire: 2, .. })
        ));
        // flips its input
        let g = parse_circuit("wires 2\nrole 0 input\nrole 1 scratch\nx 0").unwrap();
        assert!(matches!(
            build_toggle_schema(&g, 12),
            Err(CircuitError::InputModified { wire: 0, .. })
        ));
        let g = parse_circuit("wires 2\nx 0").unwrap();
        assert_eq!(
            build_toggle_schema(&g, 12).unwrap_err(),
            CircuitError::MissingScratch
        );
    }

    #[test]
    fn roles_default_to_inputs() {
        let g = parse_circuit("wires 3\nrole 2 scratch\nccx 0 1 2").unwrap();
        let (_, d) = build_toggle_schema(&g, 12).unwrap();
        assert_eq!(d.input_wires, vec![0, 1]);
        assert!(d.ancilla_wires.is_empty());
    }

    #[test]
    fn counter_c1_matches_toggle_semantics() {
        let (tv, td) = build_toggle_schema(&and_predicate(), 12).unwrap();
        let (cv, cd) = build_counter_schema(&and_predicate(), 1, 12).unwrap();
        assert_eq!(cd.r, 2);
        for x in 0..4u128 {
            let x = BitString::from_word(x, 2);
            for n in 0..=4 {
                let t = power(&tv, &td.initial_work(&x, tv.width()).unwrap(), n);
                let c = power(&cv, &cd.initial_work(&x, cv.width()).unwrap(), n);
                assert_eq!(
                    td.read_output(t.to_word()),
                    cd.read_output(c.to_word()),
                    "x={x} n={n}"
                );
            }
        }
    }

    #[test]
    fn counter_advances_mod_2c() {
        for c in 1..=3 {
            let (v, d) = build_counter_schema(&and_predicate(), c, 12).unwrap();
            for x in 0..4u128 {
                let x = BitString::from_word(x, 2);
                let f = usize::from(d.predicate(&v, &x).unwrap());
                let start = d.initial_work(&x, v.width()).unwrap();
                for cycles in 0..=(1usize << c) {
                    let out = power(&v, &start, d.r * cycles);
                    assert_eq!(d.read_output(out.to_word()), (cycles * f) % (1 << c));
                    let mut rest = out.to_word();
                    for &w in &d.output_wires {
                        rest &= !(1 << w);
                    }
                    assert_eq!(rest, start.to_word());
                }
            }
        }
    }

    #[test]
    fn counter_zero_width() {
        assert_eq!(
            build_counter_schema(&and_predicate(), 0, 12).unwrap_err(),
            CircuitError::ZeroCounterWidth
        );
    }

    #[test]
    fn emitted_gates_have_support_at_most_three() {
        let (v, _) = build_counter_schema(&and_predicate(), 4, 12).unwrap();
        assert!(v.gates().iter().all(|g| g.wires().len() <= 3));
    }
}
