//! The orbit of a basis state under `F`.
//!
//! From a valid clock state exactly one term of `F` applies, so repeated
//! stepping traces a single path of basis states. Because every gate is a
//! permutation, the first repeated state can only be the starting one and
//! `F` acts on the span of the path as a cyclic shift.

use std::collections::HashMap;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{BitString, SchemaDescriptor};
use crate::clockham::{BasisState, ClockOperator, Direction};

/// Step limit for circuits without a schema descriptor.
pub const DEFAULT_RAW_ORBIT_CAP: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("initial state must have a one-hot clock at position 0")]
    InvalidInitial,
    #[error("forward step annihilated the state at orbit index {0}")]
    Annihilated(usize),
    #[error("orbit index {index} revisits index {earlier} instead of the initial state")]
    PrematureRecurrence { index: usize, earlier: usize },
    #[error("no recurrence within {0} steps")]
    TooLong(usize),
    #[error("orbit dimension {d} is neither s*r = {sr} nor s*r*2^c = {yes} (not a schema orbit)")]
    NonSchemaOrbit { d: usize, sr: usize, yes: usize },
    #[error("orbit dimension says {from_dimension:?} but the output register after one logical cycle says otherwise")]
    InconsistentReadout { from_dimension: Classification },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Yes,
    No,
}

#[derive(Debug, Clone)]
pub struct Orbit {
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
    m: usize,
    s: usize,
    r: usize,
    c: usize,
}

impl Orbit {
    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    /// Orbit dimension.
    pub fn d(&self) -> usize {
        self.states.len()
    }

    /// Work register width.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn position(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn contains(&self, state: &BasisState) -> bool {
        self.index.contains_key(state)
    }

    /// Value of work wire `wire` along the orbit.
    pub fn wire_values(&self, wire: usize) -> Vec<bool> {
        self.states.iter().map(|b| b.work >> wire & 1 == 1).collect()
    }

    /// Writes `j,work_bits,clock_position,output_bit` rows. The output
    /// column is left empty when `output_wire` is `None`.
    pub fn write_csv<W: Write>(&self, mut out: W, output_wire: Option<usize>) -> io::Result<()> {
        writeln!(out, "j,work_bits,clock_position,output_bit")?;
        for (j, b) in self.states.iter().enumerate() {
            let bit = output_wire
                .map(|w| (b.work >> w & 1).to_string())
                .unwrap_or_default();
            writeln!(
                out,
                "{j},{},{},{bit}",
                BitString::from_word(b.work, self.m),
                b.clock_position().expect("orbit states have one-hot clocks"),
            )?;
        }
        Ok(())
    }
}

/// Steps forward from `initial` until it recurs.
///
/// With a schema descriptor the step limit is `2·s·r·2^c`; otherwise
/// [`DEFAULT_RAW_ORBIT_CAP`].
pub fn enumerate_orbit(
    op: &ClockOperator,
    initial: BasisState,
    schema: Option<&SchemaDescriptor>,
) -> Result<Orbit, OrbitError> {
    if initial.clock_position() != Some(0) {
        return Err(OrbitError::InvalidInitial);
    }
    let s = op.s();
    let (r, c, cap) = match schema {
        Some(d) => (d.r, d.c, 2 * s * d.r * d.counter_period()),
        None => (1, 0, DEFAULT_RAW_ORBIT_CAP),
    };

    let mut states = vec![initial];
    let mut index = HashMap::from([(initial, 0)]);
    let mut current = initial;
    loop {
        let next = op
            .step(current, Direction::Forward)
            .ok_or(OrbitError::Annihilated(states.len() - 1))?;
        if next == initial {
            break;
        }
        if let Some(&earlier) = index.get(&next) {
            return Err(OrbitError::PrematureRecurrence {
                index: states.len(),
                earlier,
            });
        }
        if states.len() >= cap {
            return Err(OrbitError::TooLong(cap));
        }
        index.insert(next, states.len());
        states.push(next);
        current = next;
    }
    Ok(Orbit {
        states,
        index,
        m: op.m(),
        s,
        r,
        c,
    })
}

/// Classifies a schema orbit by its dimension and cross-checks against the
/// output register after one logical cycle (`s·r` steps).
pub fn classify_instance(
    orbit: &Orbit,
    schema: &SchemaDescriptor,
) -> Result<Classification, OrbitError> {
    let sr = orbit.s() * schema.r;
    let yes = sr * schema.counter_period();
    let d = orbit.d();
    let class = if d == yes {
        Classification::Yes
    } else if d == sr {
        Classification::No
    } else {
        return Err(OrbitError::NonSchemaOrbit { d, sr, yes });
    };

    let start = schema.read_output(orbit.states()[0].work);
    let after = schema.read_output(orbit.states()[sr % d].work);
    let advanced = (after + schema.counter_period() - start) % schema.counter_period();
    let expected = usize::from(class == Classification::Yes);
    if advanced != expected {
        return Err(OrbitError::InconsistentReadout {
            from_dimension: class,
        });
    }
    Ok(class)
}
