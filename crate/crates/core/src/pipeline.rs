//! End-to-end runs: predicate circuit and input in, analysis report out.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    closed_form_entropy, compare_even_fourier, ds_bound, occupation_distribution,
    orbit_eigenstate_distance, output_interval, reduce_output_qubit, time_average_orbit,
    von_neumann_entropy, AnalysisError, EvenFourierComparison,
};
use crate::circuit::{
    build_counter_schema, build_toggle_schema, BitString, CircuitError, ReversibleCircuit,
    SchemaDescriptor, WireRole,
};
use crate::clockham::{build_forward_operator, BasisState, ClockError, ClockOperator, StructureReport};
use crate::linalg::trace_distance;
use crate::oracle::{
    convergence_series, embed_orbit_state, fourier_to_orbit_states, log_log_slope,
    orbit_populations, weight_outside_orbit, ConvergenceRow, OracleError, SpectralOracle,
};
use crate::orbit::{classify_instance, enumerate_orbit, Classification, Orbit, OrbitError};

/// Horizons used for the finite-time convergence table.
pub const DEFAULT_HORIZONS: [f64; 5] = [50.0, 100.0, 200.0, 400.0, 800.0];

/// Oracle and closed form must agree to this trace distance.
pub const ORACLE_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("unknown schema mode {0:?}; expected raw, toggle or counter:<c>")]
    BadSchemaMode(String),
    #[error("input has {got} bits but the circuit declares {expected} input wires")]
    InputLength { expected: usize, got: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl PipelineError {
    /// Whether the failure points at a bug rather than at bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, PipelineError::Invariant(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaMode {
    /// Use the circuit as given.
    Raw,
    Toggle,
    Counter(usize),
}

impl fmt::Display for SchemaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaMode::Raw => f.write_str("raw"),
            SchemaMode::Toggle => f.write_str("toggle"),
            SchemaMode::Counter(c) => write!(f, "counter:{c}"),
        }
    }
}

impl FromStr for SchemaMode {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PipelineError::BadSchemaMode(s.to_owned());
        match s {
            "raw" => Ok(SchemaMode::Raw),
            "toggle" => Ok(SchemaMode::Toggle),
            _ => {
                let c = s.strip_prefix("counter:").ok_or_else(bad)?;
                c.parse().map(SchemaMode::Counter).map_err(|_| bad())
            }
        }
    }
}

/// A clock operator together with the initial basis state of the walk.
#[derive(Debug, Clone)]
pub struct Instance {
    pub mode: SchemaMode,
    pub circuit: ReversibleCircuit,
    pub schema: Option<SchemaDescriptor>,
    pub op: ClockOperator,
    pub input: BitString,
    pub initial: BasisState,
}

/// Applies the schema (if any) and builds `F`, without fixing an input.
pub fn build_circuit(
    g: &ReversibleCircuit,
    mode: SchemaMode,
    contract_cap: usize,
) -> Result<(ReversibleCircuit, Option<SchemaDescriptor>), PipelineError> {
    Ok(match mode {
        SchemaMode::Raw => (g.clone(), None),
        SchemaMode::Toggle => {
            let (v, d) = build_toggle_schema(g, contract_cap)?;
            (v, Some(d))
        }
        SchemaMode::Counter(c) => {
            let (v, d) = build_counter_schema(g, c, contract_cap)?;
            (v, Some(d))
        }
    })
}

/// Wires an input bit string is written to: the declared input wires of the
/// predicate, or every wire of a raw circuit that declares none.
fn raw_input_wires(g: &ReversibleCircuit) -> Vec<usize> {
    let declared = g.wires_with_role(WireRole::Input);
    if declared.is_empty() {
        (0..g.width()).collect()
    } else {
        declared
    }
}

impl Instance {
    pub fn new(
        g: &ReversibleCircuit,
        mode: SchemaMode,
        input: &BitString,
        contract_cap: usize,
    ) -> Result<Self, PipelineError> {
        let (circuit, schema) = build_circuit(g, mode, contract_cap)?;
        let work = match &schema {
            Some(desc) => {
                if input.len() != desc.input_wires.len() {
                    return Err(PipelineError::InputLength {
                        expected: desc.input_wires.len(),
                        got: input.len(),
                    });
                }
                desc.initial_work(input, circuit.width())?.to_word()
            }
            None => {
                let wires = raw_input_wires(g);
                if input.len() != wires.len() {
                    return Err(PipelineError::InputLength {
                        expected: wires.len(),
                        got: input.len(),
                    });
                }
                wires
                    .iter()
                    .zip(input.bits())
                    .filter(|(_, &b)| b)
                    .fold(0u128, |acc, (&w, _)| acc | 1 << w)
            }
        };
        let op = build_forward_operator(&circuit)?;
        Ok(Instance {
            mode,
            circuit,
            schema,
            op,
            input: input.clone(),
            initial: BasisState::at(work, 0),
        })
    }

    /// Wire whose reduced state is reported: the schema's output bit, or
    /// the first declared output wire of a raw circuit.
    pub fn output_wire(&self) -> Option<usize> {
        match &self.schema {
            Some(desc) => Some(desc.output_wire()),
            None => self.circuit.wires_with_role(WireRole::Output).first().copied(),
        }
    }

    /// Orbit of the initial state. For schema circuits any failure here
    /// means the schema construction is broken.
    pub fn orbit(&self) -> Result<Orbit, PipelineError> {
        match &self.schema {
            Some(desc) => enumerate_orbit(&self.op, self.initial, Some(desc))
                .map_err(|e| PipelineError::Invariant(format!("schema orbit: {e}"))),
            None => Ok(enumerate_orbit(&self.op, self.initial, None)?),
        }
    }

    pub fn classify(&self, orbit: &Orbit) -> Result<Option<Classification>, PipelineError> {
        self.schema
            .as_ref()
            .map(|desc| {
                classify_instance(orbit, desc)
                    .map_err(|e| PipelineError::Invariant(format!("classification: {e}")))
            })
            .transpose()
    }

    /// `2^(m+s)`, saturating.
    pub fn full_dimension(&self) -> Option<usize> {
        1usize.checked_shl(self.op.total_wires() as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub oracle: bool,
    /// Cap on the full dimension for structure checks and the dense oracle.
    pub max_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSection {
    pub full_dimension: usize,
    pub eigenspaces: usize,
    pub ambiguous_gaps: usize,
    pub entropy_bits: f64,
    pub trace_distance_to_closed_form: f64,
    pub max_occupation_error: f64,
    pub weight_outside_orbit: f64,
    pub convergence: Vec<ConvergenceRow>,
    pub convergence_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub input: String,
    pub m: usize,
    pub d: usize,
    pub s: usize,
    pub r: usize,
    pub c: usize,
    pub classification: Option<Classification>,
    /// `None` when the full dimension exceeds the cap.
    pub structure: Option<StructureReport>,
    pub entropy_bits: f64,
    pub closed_form_entropy_bits: f64,
    /// `log₂` of the number of distinct eigenvalues on the orbit.
    pub max_entropy_bits: f64,
    pub eigenstate_distance: f64,
    pub occupation: Vec<f64>,
    pub fourier_magnitudes: Vec<f64>,
    pub tv: f64,
    pub ds_bound: f64,
    pub ds_holds: bool,
    pub l1_deviation: f64,
    pub l1_cap: f64,
    pub l1_within_cap: bool,
    pub claimed_tv2_bound: f64,
    pub even_fourier: EvenFourierComparison,
    pub output_wire: Option<usize>,
    pub output_occupation_p: Option<f64>,
    pub interval: [f64; 2],
    pub oracle: Option<OracleSection>,
}

/// Runs structure verification, orbit enumeration, the closed-form analysis
/// and optionally the dense oracle.
pub fn run_report(inst: &Instance, opts: ReportOptions) -> Result<Report, PipelineError> {
    let within_cap = inst.full_dimension().is_some_and(|n| n <= opts.max_dim);
    let structure = if within_cap {
        let rep = inst.op.verify_structure(opts.max_dim)?;
        if inst.schema.is_some() && !rep.is_local_adjacency() {
            return Err(PipelineError::Invariant(format!(
                "schema circuit produced a non-adjacency or non-local A: {rep:?}"
            )));
        }
        Some(rep)
    } else {
        None
    };

    let orbit = inst.orbit()?;
    let classification = inst.classify(&orbit)?;
    let d = orbit.d();
    let dist = occupation_distribution(d)?;
    let ds = ds_bound(&dist);
    if !ds.holds {
        return Err(PipelineError::Invariant(format!(
            "tv² = {} exceeds the Diaconis–Shahshahani bound {}",
            ds.tv * ds.tv,
            ds.ds_bound
        )));
    }
    let rho = time_average_orbit(d)?;
    let output_wire = inst.output_wire();
    let output_occupation_p = output_wire
        .map(|w| reduce_output_qubit(&orbit, &dist, w).map(|r| r.get(1, 1).re))
        .transpose()?;

    let oracle = if opts.oracle {
        if !within_cap {
            return Err(ClockError::DimensionCap {
                bits: inst.op.total_wires(),
                cap: opts.max_dim,
            }
            .into());
        }
        Some(oracle_section(inst, &orbit, &dist.p, opts.max_dim)?)
    } else {
        None
    };

    let (s, r, c) = (orbit.s(), orbit.r(), orbit.c());
    Ok(Report {
        schema: inst.mode.to_string(),
        input: inst.input.to_string(),
        m: orbit.m(),
        d,
        s,
        r,
        c,
        classification,
        structure,
        entropy_bits: von_neumann_entropy(&rho)?,
        closed_form_entropy_bits: closed_form_entropy(d),
        max_entropy_bits: ((d / 2 + 1) as f64).log2(),
        eigenstate_distance: orbit_eigenstate_distance(d)?,
        fourier_magnitudes: dist.fourier_magnitudes(),
        even_fourier: compare_even_fourier(&dist),
        occupation: dist.p,
        tv: ds.tv,
        ds_bound: ds.ds_bound,
        ds_holds: ds.holds,
        l1_deviation: ds.l1_deviation,
        l1_cap: ds.l1_cap,
        l1_within_cap: ds.l1_deviation <= ds.l1_cap,
        claimed_tv2_bound: ds.claimed_tv2_bound,
        output_wire,
        output_occupation_p,
        interval: output_interval(d),
        oracle,
    })
}

fn oracle_section(
    inst: &Instance,
    orbit: &Orbit,
    closed_p: &[f64],
    cap: usize,
) -> Result<OracleSection, PipelineError> {
    let oracle = SpectralOracle::new(&inst.op, cap)?;
    let avg = oracle.time_average(&inst.op, inst.initial)?;
    let rho = &avg.rho_bar;

    let closed = fourier_to_orbit_states(&time_average_orbit(orbit.d())?)?;
    let embedded = embed_orbit_state(&closed, &inst.op, orbit, oracle.dim())?;
    let distance = trace_distance(rho, &embedded).map_err(OracleError::from)?;
    if distance > ORACLE_AGREEMENT_TOL {
        return Err(PipelineError::Invariant(format!(
            "oracle and closed form differ by trace distance {distance:e}"
        )));
    }
    let max_occupation_error = orbit_populations(rho, &inst.op, orbit)
        .iter()
        .zip(closed_p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let convergence = convergence_series(&oracle, &inst.op, inst.initial, &DEFAULT_HORIZONS)?;
    let points: Vec<(f64, f64)> = convergence.iter().map(|c| (c.t, c.deviation)).collect();
    Ok(OracleSection {
        full_dimension: oracle.dim(),
        eigenspaces: avg.eigenspaces,
        ambiguous_gaps: avg.ambiguous_gaps.len(),
        entropy_bits: von_neumann_entropy(rho)?,
        trace_distance_to_closed_form: distance,
        max_occupation_error,
        weight_outside_orbit: weight_outside_orbit(rho, &inst.op, orbit),
        convergence_slope: log_log_slope(&points),
        convergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, DEFAULT_CONTRACT_WIDTH_CAP};
    use crate::clockham::DEFAULT_MAX_DIM;

    const AND: &str = "wires 3\nrole 0 input\nrole 1 input\nrole 2 scratch\nccx 0 1 2\n";

    fn instance(mode: SchemaMode, x: &str) -> Instance {
        let g = parse_circuit(AND).unwrap();
        Instance::new(&g, mode, &x.parse().unwrap(), DEFAULT_CONTRACT_WIDTH_CAP).unwrap()
    }

    #[test]
    fn schema_mode_roundtrip() {
        for s in ["raw", "toggle", "counter:3"] {
            assert_eq!(s.parse::<SchemaMode>().unwrap().to_string(), s);
        }
        for bad in ["", "counter", "counter:x", "Toggle"] {
            assert!(matches!(
                bad.parse::<SchemaMode>(),
                Err(PipelineError::BadSchemaMode(_))
            ));
        }
    }

    #[test]
    fn report_without_oracle() {
        let opts = ReportOptions {
            oracle: false,
            max_dim: DEFAULT_MAX_DIM,
        };
        let yes = run_report(&instance(SchemaMode::Toggle, "11"), opts).unwrap();
        assert_eq!((yes.d, yes.s, yes.r), (24, 6, 2));
        assert_eq!(yes.classification, Some(Classification::Yes));
        assert!((yes.entropy_bits - yes.closed_form_entropy_bits).abs() < 1e-10);
        assert!((yes.output_occupation_p.unwrap() - 0.5).abs() < 1e-12);
        assert!(yes.structure.unwrap().is_local_adjacency());

        let no = run_report(&instance(SchemaMode::Toggle, "00"), opts).unwrap();
        assert_eq!(no.classification, Some(Classification::No));
        assert_eq!(no.output_occupation_p, Some(0.0));
    }

    #[test]
    fn structure_skipped_above_cap() {
        let opts = ReportOptions {
            oracle: false,
            max_dim: 1024,
        };
        let rep = run_report(&instance(SchemaMode::Toggle, "11"), opts).unwrap();
        assert!(rep.structure.is_none());
        let opts = ReportOptions { oracle: true, ..opts };
        assert!(matches!(
            run_report(&instance(SchemaMode::Toggle, "11"), opts),
            Err(PipelineError::Clock(ClockError::DimensionCap { .. }))
        ));
    }

    #[test]
    fn input_length_checked() {
        let g = parse_circuit(AND).unwrap();
        let err = Instance::new(&g, SchemaMode::Toggle, &"1".parse().unwrap(), 12).unwrap_err();
        assert_eq!(err, PipelineError::InputLength { expected: 2, got: 1 });
    }

    #[test]
    fn raw_mode_uses_declared_inputs() {
        let g = parse_circuit("wires 2\nrole 0 input\nrole 1 output\nx 0\nx 0\n").unwrap();
        let inst = Instance::new(&g, SchemaMode::Raw, &"1".parse().unwrap(), 12).unwrap();
        assert_eq!(inst.initial, BasisState::at(1, 0));
        assert_eq!(inst.output_wire(), Some(1));
        let orbit = inst.orbit().unwrap();
        assert_eq!(orbit.d(), 2);
        assert_eq!(inst.classify(&orbit).unwrap(), None);
    }
}
