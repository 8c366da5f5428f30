//! Line-oriented instance files.
//!
//! ```text
//! # two agents per side
//! k 0.5
//! o 0.5
//! L 0
//! left 0 0.2
//! right 0.8 1
//! ```
//!
//! `k` and `o` are required, `L` defaults to `0`, and `left`/`right` take any
//! number of ascending locations. `#` starts a comment.

use std::fmt::Write as _;

use super::{Instance, Params, Side};
use crate::error::{Error, Result};

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut k = None;
    let mut o = None;
    let mut length = None;
    let mut left: Option<(usize, Vec<f64>)> = None;
    let mut right: Option<(usize, Vec<f64>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let key = fields.next().unwrap_or_default();
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("malformed number `{f}`"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;

        let scalar = |slot: &mut Option<f64>, name: &str| -> Result<()> {
            if slot.is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate `{name}` directive"),
                });
            }
            match values.as_slice() {
                [v] => {
                    *slot = Some(*v);
                    Ok(())
                }
                _ => Err(Error::Parse {
                    line,
                    message: format!("`{name}` takes exactly one value"),
                }),
            }
        };

        match key {
            "k" => scalar(&mut k, "k")?,
            "o" => scalar(&mut o, "o")?,
            "L" => scalar(&mut length, "L")?,
            "left" | "right" => {
                let slot = if key == "left" { &mut left } else { &mut right };
                if slot.is_some() {
                    return Err(Error::Parse {
                        line,
                        message: format!("duplicate `{key}` directive"),
                    });
                }
                *slot = Some((line, values));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let missing = |name: &str| Error::Parse {
        line: 0,
        message: format!("missing required `{name}` directive"),
    };
    let k = k.ok_or_else(|| missing("k"))?;
    let o = o.ok_or_else(|| missing("o"))?;
    let params = Params::new(k, o, length.unwrap_or(0.0))?;
    let (_, left) = left.unwrap_or_default();
    let (_, right) = right.unwrap_or_default();
    Instance::with_params(params, left, right)
}

/// Canonical text form. Numbers use the shortest representation that parses
/// back to the same value, so `parse_instance(serialize_instance(i)) == i`.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let p = inst.params();
    let _ = writeln!(out, "k {}", p.k);
    let _ = writeln!(out, "o {}", p.o);
    let _ = writeln!(out, "L {}", p.length);
    for side in [Side::Left, Side::Right] {
        out.push_str(&side.to_string());
        for x in inst.side(side) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let i = parse_instance("k 0.5\no 0.5\nL 0\nleft 0 0.2\nright 0.8 1\n").unwrap();
        assert_eq!(i.k(), 0.5);
        assert_eq!(i.left(), &[0.0, 0.2]);
        assert_eq!(i.right(), &[0.8, 1.0]);
    }

    #[test]
    fn comments_and_defaults() {
        let i = parse_instance("# header\n  o 0.4 # obstacle\nk 0\nleft 0.1\n\n").unwrap();
        assert_eq!(i.length(), 0.0);
        assert!(i.right().is_empty());
    }

    #[test]
    fn diagnostics_are_distinct() {
        let inside = parse_instance("k 0.5\no 0.5\nL 0\nleft 0.6\n").unwrap_err();
        assert!(inside.to_string().contains("agent inside or beyond obstacle"));

        let unsorted = parse_instance("k 0.5\no 0.5\nleft 0.3 0.1\n").unwrap_err();
        assert!(matches!(unsorted, Error::Unsorted { side: Side::Left }));

        let range = parse_instance("k 0.5\no 1.5\nleft 0.3\n").unwrap_err();
        assert!(matches!(range, Error::ParameterOutOfRange { name: "o", .. }));

        let malformed = parse_instance("k 0.5\no 0.5\nleft 0.x\n").unwrap_err();
        assert!(matches!(malformed, Error::Parse { line: 3, .. }));

        let unknown = parse_instance("k 0.5\no 0.5\nmiddle 0.5\n").unwrap_err();
        assert!(matches!(unknown, Error::Parse { line: 3, .. }));

        let missing = parse_instance("o 0.5\nleft 0.1\n").unwrap_err();
        assert!(missing.to_string().contains("missing required `k`"));

        let beyond = parse_instance("k 0\no 0.5\nright 1.2\n").unwrap_err();
        assert!(matches!(beyond, Error::AgentOutOfRange { .. }));
    }

    #[test]
    fn canonical_form() {
        let text = "# c\nright 0.8 1\nleft 0 0.2\no 0.5\nk 0.5\n";
        let canon = serialize_instance(&parse_instance(text).unwrap());
        assert_eq!(canon, "k 0.5\no 0.5\nL 0\nleft 0 0.2\nright 0.8 1\n");
        assert_eq!(serialize_instance(&parse_instance(&canon).unwrap()), canon);
    }

    proptest! {
        #[test]
        fn round_trip(
            k in 0.0..1.0f64,
            o in 0.05..0.95f64,
            lfrac in 0.0..0.9f64,
            us in proptest::collection::vec((0.0..1.0f64, any::<bool>()), 1..10),
        ) {
            let length = lfrac * (1.0 - o);
            let (mut left, mut right) = (vec![], vec![]);
            for (u, is_left) in us {
                if is_left { left.push(o * u) } else { right.push(1.0 - (1.0 - o - length) * u) }
            }
            let inst = Instance::from_unsorted(k, o, length, left, right).unwrap();
            let back = parse_instance(&serialize_instance(&inst)).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
