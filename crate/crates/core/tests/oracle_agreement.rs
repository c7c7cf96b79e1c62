//! Dense full-space diagonalization against the orbit closed forms.

use std::time::Instant;

use clockwalk::analysis::{occupation_distribution, time_average_orbit, von_neumann_entropy};
use clockwalk::clockham::DEFAULT_MAX_DIM;
use clockwalk::linalg::trace_distance;
use clockwalk::oracle::{
    embed_orbit_state, fourier_to_orbit_states, orbit_populations, weight_outside_orbit,
    SpectralOracle,
};
use clockwalk::{
    build_forward_operator, build_toggle_schema, closed_form_entropy, enumerate_orbit,
    parse_circuit, BasisState,
};

const AND: &str = "wires 3\nrole 0 input\nrole 1 input\nrole 2 scratch\nccx 0 1 2\n";

#[test]
fn and_toggle_oracle_matches_closed_forms() {
    let (v, desc) = build_toggle_schema(&parse_circuit(AND).unwrap(), 12).unwrap();
    let op = build_forward_operator(&v).unwrap();
    let t0 = Instant::now();
    let oracle = SpectralOracle::new(&op, DEFAULT_MAX_DIM).unwrap();
    eprintln!("diagonalized {} in {:?}", oracle.dim(), t0.elapsed());
    for x in ["00", "01", "10", "11"] {
        let t1 = Instant::now();
        let work = desc.initial_work(&x.parse().unwrap(), v.width()).unwrap().to_word();
        let init = BasisState::at(work, 0);
        let orbit = enumerate_orbit(&op, init, Some(&desc)).unwrap();
        let d = orbit.d();
        let avg = oracle.time_average(&op, init).unwrap();
        let rho = &avg.rho_bar;

        let s = von_neumann_entropy(rho).unwrap();
        assert!((s - closed_form_entropy(d)).abs() < 1e-8, "x={x}: {s}");
        assert!(weight_outside_orbit(rho, &op, &orbit) < 1e-10);

        let p = orbit_populations(rho, &op, &orbit);
        let closed = occupation_distribution(d).unwrap();
        for (a, b) in p.iter().zip(&closed.p) {
            assert!((a - b).abs() < 1e-10);
        }

        let states = fourier_to_orbit_states(&time_average_orbit(d).unwrap()).unwrap();
        let embedded = embed_orbit_state(&states, &op, &orbit, oracle.dim()).unwrap();
        assert!(trace_distance(rho, &embedded).unwrap() < 1e-8);
        eprintln!("x={x} d={d} in {:?}", t1.elapsed());
    }
}
