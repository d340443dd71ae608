//! Line-oriented text format for networks.
//!
//! ```text
//! # optional comments
//! units 4
//! spares 3
//! edge 0 0
//! edge 1 0
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::SpareNetwork;

pub fn serialize_network(net: &SpareNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "units {}", net.n_units());
    let _ = writeln!(out, "spares {}", net.n_spares());
    for &(u, s) in net.edges() {
        let _ = writeln!(out, "edge {u} {s}");
    }
    out
}

pub fn parse_network(text: &str) -> Result<SpareNetwork> {
    let mut units: Option<usize> = None;
    let mut spares: Option<usize> = None;
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: line_no,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split(' ').collect();
        match fields.as_slice() {
            ["units", n] => {
                if units.is_some() {
                    return Err(err("duplicate units line"));
                }
                if spares.is_some() || !edges.is_empty() {
                    return Err(err("units must come first"));
                }
                units = Some(parse_index(n).ok_or_else(|| err("bad unit count"))?);
            }
            ["spares", n] => {
                if units.is_none() {
                    return Err(err("spares line before units line"));
                }
                if spares.is_some() {
                    return Err(err("duplicate spares line"));
                }
                spares = Some(parse_index(n).ok_or_else(|| err("bad spare count"))?);
            }
            ["edge", u, s] => {
                let (Some(n_units), Some(n_spares)) = (units, spares) else {
                    return Err(err("edge before units/spares header"));
                };
                let u = parse_index(u).ok_or_else(|| err("bad unit index"))?;
                let s = parse_index(s).ok_or_else(|| err("bad spare index"))?;
                if u >= n_units || s >= n_spares {
                    return Err(err(&format!(
                        "edge ({u}, {s}) out of range for {n_units} units and {n_spares} spares"
                    )));
                }
                edges.push((u, s));
            }
            _ => return Err(err(&format!("unrecognized line {line:?}"))),
        }
    }

    let last = text.lines().count();
    let n_units = units.ok_or(Error::Parse {
        line: last,
        message: "missing units line".into(),
    })?;
    let n_spares = spares.ok_or(Error::Parse {
        line: last,
        message: "missing spares line".into(),
    })?;
    SpareNetwork::new(n_units, n_spares, edges).map_err(|e| Error::Parse {
        line: last,
        message: e.to_string(),
    })
}

/// Plain decimal digits only; no sign, no whitespace.
fn parse_index(field: &str) -> Option<usize> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    field.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::generate_random;
    use proptest::prelude::*;

    #[test]
    fn reference_round_trip() {
        let n0 = SpareNetwork::reference_example();
        let text = serialize_network(&n0);
        assert!(text.starts_with("units 4\nspares 3\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 6);
        assert_eq!(parse_network(&text).unwrap(), n0);
    }

    #[test]
    fn out_of_range_edge_reports_line() {
        let err = parse_network("units 4\nspares 3\nedge 0 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn duplicate_edges_collapse() {
        let net = parse_network("# dup\nunits 2\nspares 2\nedge 1 1\nedge 1 1").unwrap();
        assert_eq!(net.edges(), &[(1, 1)]);
    }

    #[test]
    fn rejects_malformed_lines() {
        for (text, line) in [
            ("units 2\nspares 1\nedges 0 0\n", 3),
            ("units 2\nspares 1\nedge 0  0\n", 3),
            ("units 2\nspares 1\nedge -1 0\n", 3),
            ("spares 1\nunits 2\n", 1),
            ("units 2\nunits 2\n", 2),
            ("units 2\n\nspares 1\n", 2),
            ("units x\n", 1),
        ] {
            match parse_network(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(parse_network("units 2\n").is_err());
        assert!(parse_network("").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(nu in 1usize..12, ns in 0usize..10, fill in 0.0f64..=1.0, seed: u64) {
            let ne = ((nu * ns) as f64 * fill) as usize;
            let net = generate_random(nu, ns, ne, seed).unwrap();
            prop_assert_eq!(parse_network(&serialize_network(&net)).unwrap(), net);
        }
    }
}
