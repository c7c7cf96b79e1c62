//! Feynman clock operators.
//!
//! A circuit with gates `T_0 … T_{s-1}` on `m` work wires is paired with an
//! `s`-wire one-hot clock. Term `k` of the forward-time operator `F` applies
//! `T_k` to the work register and hops the clock from position `k` to
//! `k + 1 mod s`; the Hamiltonian is `A = F + Fᵀ` (all entries are real).
//!
//! Composite basis states order the work wires first and the clock wires
//! after them, with wire 0 as the most significant bit of the basis index.

use std::collections::BTreeSet;
use std::io::{self, Write};

use thiserror::Error;

use crate::circuit::{CircuitError, Gate, ReversibleCircuit, MAX_WIRES};

/// Default row cap for explicit matrix assembly.
pub const DEFAULT_MAX_DIM: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClockError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("clock needs at most {MAX_WIRES} positions, circuit has {0} gates")]
    TooManyGates(usize),
    #[error("full space has 2^{bits} states, above the dimension cap of {cap}")]
    DimensionCap { bits: usize, cap: usize },
    #[error("term {index} refers to clock position {position} but the clock has {s} positions")]
    BadTerm {
        index: usize,
        position: usize,
        s: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    /// Work register, wire `i` at bit `i`.
    pub work: u128,
    /// Clock register, position `k` at bit `k`.
    pub clock: u128,
}

impl BasisState {
    /// Work register `work` with the clock's single 1 at `position`.
    pub fn at(work: u128, position: usize) -> Self {
        BasisState {
            work,
            clock: 1 << position,
        }
    }

    pub fn clock_position(&self) -> Option<usize> {
        (self.clock.count_ones() == 1).then(|| self.clock.trailing_zeros() as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// The forward-time operator.
    F,
    /// The Hamiltonian `F + Fᵀ`.
    A,
}

/// One summand of `F`: a gate paired with a clock hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalTerm {
    pub gate: Gate,
    pub from: usize,
    pub to: usize,
}

impl LocalTerm {
    /// Wires the term acts on non-trivially, as composite wire indices
    /// (clock position `k` is wire `m + k`).
    pub fn support(&self, m: usize) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.gate.wires().iter().copied().collect();
        s.insert(m + self.from);
        s.insert(m + self.to);
        s
    }

    #[inline]
    fn image(&self, state: BasisState, dir: Direction) -> Option<BasisState> {
        let (occupied, empty) = match dir {
            Direction::Forward => (self.from, self.to),
            Direction::Backward => (self.to, self.from),
        };
        let hop = state.clock >> occupied & 1 == 1 && state.clock >> empty & 1 == 0;
        hop.then(|| BasisState {
            work: self.gate.apply(state.work),
            clock: state.clock ^ (1 << occupied) ^ (1 << empty),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ClockOperator {
    circuit: ReversibleCircuit,
    terms: Vec<LocalTerm>,
}

/// Builds `F` for `circuit`; term `k` hops the clock `k → k+1 mod s`.
pub fn build_forward_operator(circuit: &ReversibleCircuit) -> Result<ClockOperator, ClockError> {
    let s = circuit.len();
    if s < 2 {
        return Err(CircuitError::TooFewGates(s).into());
    }
    let terms = circuit
        .gates()
        .iter()
        .enumerate()
        .map(|(k, &gate)| LocalTerm {
            gate,
            from: k,
            to: (k + 1) % s,
        })
        .collect();
    ClockOperator::from_terms(circuit.clone(), terms)
}

impl ClockOperator {
    /// Builds an operator from an explicit term list. Used for negative
    /// controls; [`build_forward_operator`] is the normal entry point.
    pub fn from_terms(
        circuit: ReversibleCircuit,
        terms: Vec<LocalTerm>,
    ) -> Result<Self, ClockError> {
        let s = circuit.len();
        if s > MAX_WIRES {
            return Err(ClockError::TooManyGates(s));
        }
        for (index, t) in terms.iter().enumerate() {
            for position in [t.from, t.to] {
                if position >= s {
                    return Err(ClockError::BadTerm { index, position, s });
                }
            }
        }
        Ok(ClockOperator { circuit, terms })
    }

    pub fn circuit(&self) -> &ReversibleCircuit {
        &self.circuit
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    /// Work wires.
    pub fn m(&self) -> usize {
        self.circuit.width()
    }

    /// Clock positions, equal to the gate count.
    pub fn s(&self) -> usize {
        self.circuit.len()
    }

    pub fn total_wires(&self) -> usize {
        self.m() + self.s()
    }

    pub fn max_term_support(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.support(self.m()).len())
            .max()
            .unwrap_or(0)
    }

    /// All basis states reached from `state` by one application of `F`
    /// (or `Fᵀ`), with multiplicity. Every coefficient is 1.
    pub fn images(&self, state: BasisState, dir: Direction) -> Vec<BasisState> {
        self.terms
            .iter()
            .filter_map(|t| t.image(state, dir))
            .collect()
    }

    /// Moves a one-hot clock state one step forward or backward.
    ///
    /// Returns `None` when the clock is all zero (`F` annihilates the state)
    /// and for clock patterns that are not one-hot, whose images leave the
    /// dynamical sector; [`ClockOperator::images`] covers those.
    pub fn step(&self, state: BasisState, dir: Direction) -> Option<BasisState> {
        state.clock_position()?;
        match self.images(state, dir)[..] {
            [next] => Some(next),
            _ => None,
        }
    }

    /// Basis index of a state: work bits (wire 0 first) are the most
    /// significant, then clock positions 0 … s-1.
    pub fn index_of(&self, state: BasisState) -> usize {
        let (m, s) = (self.m(), self.s());
        ((reverse_low_bits(state.work, m) << s) | reverse_low_bits(state.clock, s)) as usize
    }

    pub fn state_at(&self, index: usize) -> BasisState {
        let (m, s) = (self.m(), self.s());
        let index = index as u128;
        BasisState {
            work: reverse_low_bits(index >> s, m),
            clock: reverse_low_bits(index & ((1 << s) - 1), s),
        }
    }

    fn check_cap(&self, cap: usize) -> Result<usize, ClockError> {
        let bits = self.total_wires();
        if bits >= usize::BITS as usize - 1 || (1usize << bits) > cap {
            return Err(ClockError::DimensionCap { bits, cap });
        }
        Ok(1 << bits)
    }

    /// Assembles `F` or `A` over the full `2^(m+s)` space. Duplicate
    /// contributions are summed, so a collision shows up as an entry of 2.
    pub fn assemble_matrix(&self, which: Which, cap: usize) -> Result<SparseIntMatrix, ClockError> {
        let dim = self.check_cap(cap)?;
        let mut triplets = Vec::new();
        for col in 0..dim {
            let b = self.state_at(col);
            for img in self.images(b, Direction::Forward) {
                let row = self.index_of(img);
                triplets.push((row, col));
                if which == Which::A {
                    triplets.push((col, row));
                }
            }
        }
        Ok(SparseIntMatrix::from_triplets(dim, triplets))
    }

    /// Exhaustive structural check of `A` over every basis state, including
    /// invalid clock patterns.
    pub fn verify_structure(&self, cap: usize) -> Result<StructureReport, ClockError> {
        let a = self.assemble_matrix(Which::A, cap)?;
        Ok(StructureReport {
            is_symmetric: a.is_symmetric(),
            entries_01: a.values().iter().all(|&v| v == 1),
            zero_diagonal: (0..a.dim()).all(|i| a.get(i, i) == 0),
            max_term_support: self.max_term_support(),
            full_dimension: a.dim(),
            nonzeros: a.nnz(),
        })
    }
}

fn reverse_low_bits(x: u128, n: usize) -> u128 {
    if n == 0 {
        0
    } else {
        x.reverse_bits() >> (128 - n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct StructureReport {
    pub is_symmetric: bool,
    pub entries_01: bool,
    pub zero_diagonal: bool,
    pub max_term_support: usize,
    pub full_dimension: usize,
    pub nonzeros: usize,
}

impl StructureReport {
    /// Whether `A` is the adjacency matrix of a simple graph and at most
    /// 5-local.
    pub fn is_local_adjacency(&self) -> bool {
        self.is_symmetric && self.entries_01 && self.zero_diagonal && self.max_term_support <= 5
    }
}

/// Compressed-row integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<u32>,
}

impl SparseIntMatrix {
    /// Sums unit entries at the given `(row, col)` positions.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize)>) -> Self {
        triplets.sort_unstable();
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<u32> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += 1;
            } else {
                cols.push(c);
                values.push(1);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseIntMatrix {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(i) => self.values[span.start + i],
            Err(_) => 0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| self.row(r).all(|(c, v)| self.get(c, r) == v))
    }

    /// Undirected edges `u < v` of a symmetric matrix.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim).flat_map(move |u| self.row(u).filter(move |&(v, _)| v > u).map(move |(v, _)| (u, v)))
    }

    /// Writes one `u v` line per undirected edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Dense row-major copy as `f64`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim * self.dim];
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                d[r * self.dim + c] = f64::from(v);
            }
        }
        d
    }
}
