use super::{CircuitError, Gate, ReversibleCircuit, WireRole, MAX_WIRES};

/// Parses the line-based circuit format.
///
/// ```text
/// wires 4            # must come first
/// role 3 scratch
/// ccx 0 1 3
/// ```
///
/// Gates are `x t`, `cx c t` and `ccx c1 c2 t`; `#` starts a comment.
pub fn parse_circuit(text: &str) -> Result<ReversibleCircuit, CircuitError> {
    let mut width: Option<usize> = None;
    let mut gates = Vec::new();
    let mut roles = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();

        let syntax = |message: String| CircuitError::Syntax { line, message };

        let Some(m) = width else {
            if head != "wires" {
                return Err(syntax(format!(
                    "expected \"wires <m>\" header, found {head:?}"
                )));
            }
            let [n] = args[..] else {
                return Err(syntax("\"wires\" takes exactly one argument".into()));
            };
            let n: usize = n
                .parse()
                .map_err(|_| syntax(format!("invalid wire count {n:?}")))?;
            if n > MAX_WIRES {
                return Err(CircuitError::TooWide(n));
            }
            width = Some(n);
            continue;
        };

        let parse_wire = |tok: &str| -> Result<usize, CircuitError> {
            let w: usize = tok
                .parse()
                .map_err(|_| syntax(format!("invalid wire index {tok:?}")))?;
            if w >= m {
                return Err(CircuitError::WireOutOfRange {
                    line,
                    wire: w,
                    width: m,
                });
            }
            Ok(w)
        };

        match head {
            "wires" => return Err(syntax("duplicate \"wires\" header".into())),
            "role" => {
                let [w, r] = args[..] else {
                    return Err(syntax("\"role\" takes a wire and a role name".into()));
                };
                let wire = parse_wire(w)?;
                let role: WireRole = r
                    .parse()
                    .map_err(|_| syntax(format!("unknown role {r:?}")))?;
                roles.push((wire, role));
            }
            "x" | "cx" | "ccx" => {
                let arity = match head {
                    "x" => 1,
                    "cx" => 2,
                    _ => 3,
                };
                if args.len() != arity {
                    return Err(syntax(format!(
                        "\"{head}\" takes {arity} wire(s), got {}",
                        args.len()
                    )));
                }
                let w = args
                    .iter()
                    .map(|t| parse_wire(t))
                    .collect::<Result<Vec<_>, _>>()?;
                let gate = match w[..] {
                    [t] => Gate::not(t),
                    [c, t] => Gate::cnot(c, t),
                    [a, b, t] => Gate::toffoli(a, b, t),
                    _ => unreachable!(),
                };
                if let Some(wire) = gate.duplicate_wire() {
                    return Err(CircuitError::DuplicateWire { line, wire });
                }
                gates.push(gate);
            }
            other => return Err(syntax(format!("unknown gate {other:?}"))),
        }
    }

    let width = width.ok_or(CircuitError::Syntax {
        line: text.lines().count().max(1),
        message: "missing \"wires <m>\" header".into(),
    })?;
    let mut circuit = ReversibleCircuit::new(width, gates)?;
    for (wire, role) in roles {
        circuit = circuit.with_role(wire, role)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn single_toffoli() {
        let c = parse_circuit("wires 4\nccx 0 1 3").unwrap();
        assert_eq!(c.width(), 4);
        assert_eq!(c.gates(), &[Gate::toffoli(0, 1, 3)]);
        assert_eq!(c.gates()[0].kind(), GateKind::Toffoli);
    }

    #[test]
    fn not_not() {
        let c = parse_circuit("wires 1\nx 0\nx 0").unwrap();
        assert_eq!(c.width(), 1);
        assert_eq!(c.gates(), &[Gate::not(0), Gate::not(0)]);
    }

    #[test]
    fn duplicate_wire() {
        assert_eq!(
            parse_circuit("wires 2\ncx 0 0"),
            Err(CircuitError::DuplicateWire { line: 2, wire: 0 })
        );
    }

    #[test]
    fn wire_out_of_range() {
        assert_eq!(
            parse_circuit("wires 2\nx 0\ncx 0 2"),
            Err(CircuitError::WireOutOfRange {
                line: 3,
                wire: 2,
                width: 2
            })
        );
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let cases = [
            ("x 0", 1),
            ("wires 2\nfoo 1", 2),
            ("wires 2\n\n# c\ncx 0", 4),
            ("wires two", 1),
            ("wires 2\nrole 0 sideways", 2),
            ("wires 2\nx -1", 2),
            ("wires 2\nwires 3", 2),
        ];
        for (text, want) in cases {
            match parse_circuit(text) {
                Err(CircuitError::Syntax { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_circuit("# nothing"),
            Err(CircuitError::Syntax { .. })
        ));
    }

    #[test]
    fn comments_and_roles() {
        let text = "# AND predicate\nwires 3  # q0 q1 w\nrole 0 input\nrole 1 input\nrole 2 scratch\n\nccx 0 1 2 # w ^= q0 q1\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.wires_with_role(WireRole::Input), vec![0, 1]);
        assert_eq!(c.role(2), Some(WireRole::Scratch));
    }
}
