//! Catalog of hand-built instances with known mechanism behavior.

use crate::error::{Error, Result};
use crate::mechanisms::{NamedMechanism, TwoExtremeVariant};
use crate::model::{Edge, Instance, Side};

use super::Objective;

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    /// The mechanism returns this edge.
    Edge { mechanism: NamedMechanism, edge: Edge },
    /// Mechanism value over optimum, in closed form at the given parameters.
    Ratio {
        mechanism: NamedMechanism,
        objective: Objective,
        value: f64,
    },
    /// A single agent gains `gain` by reporting `report`.
    Misreport {
        mechanism: NamedMechanism,
        agent: (Side, usize),
        report: f64,
        gain: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub name: String,
    pub instance: Instance,
    pub anchor: &'static str,
    pub expectations: Vec<Expectation>,
}

const CATALOG: [(&str, &str); 7] = [
    ("optmc-nonsp", "optmc is manipulable: the agent at 0.2 reports 0.4"),
    ("midpoints", "optmc returns the midpoints of both regions"),
    ("twoextreme-tight", "inner two-extreme ratio tends to 2/(1+k) as eps -> 0"),
    ("appendixA-sc", "median mechanism vs social optimum on (0, eps, 1-eps | 1)"),
    ("appendixA-mc", "median mechanism vs max-cost optimum on (0, eps, 1-eps | 1)"),
    ("appendixB", "outer and left-pair two-extreme ratios tend to 2"),
    ("appendixB-mirror", "right-pair two-extreme ratio tends to 2"),
];

pub fn witness_names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|c| c.0)
}

/// Looks up a witness by name. Parametric witnesses accept `name(k)` or
/// `name(k, eps)`.
pub fn paper_witness(query: &str) -> Result<Witness> {
    let query = query.trim();
    let (name, args) = match query.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownWitness(query.to_string()))?;
            let args = inner
                .split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| Error::UnknownWitness(query.to_string()))?;
            (name.trim(), args)
        }
        None => (query, vec![]),
    };
    let anchor = CATALOG
        .iter()
        .find(|c| c.0 == name)
        .map(|c| c.1)
        .ok_or_else(|| Error::UnknownWitness(query.to_string()))?;
    if args.len() > 2 {
        return Err(Error::UnknownWitness(query.to_string()));
    }
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);

    let (instance, expectations) = match name {
        "optmc-nonsp" => {
            let k = arg(0, 0.5);
            (
                midpoints(k)?,
                vec![Expectation::Misreport {
                    mechanism: NamedMechanism::OptMaxCost,
                    agent: (Side::Left, 1),
                    report: 0.4,
                    gain: 0.1 + 0.1 * k,
                }],
            )
        }
        "midpoints" => {
            let k = arg(0, 0.0);
            let p = crate::mechanisms::rand_max_cost_probability(k);
            // The inner edge has max cost 0.4 + 0.6k, the optimum 0.2 + 0.8k.
            let opt = 0.2 + 0.8 * k;
            (
                midpoints(k)?,
                vec![
                    Expectation::Edge {
                        mechanism: NamedMechanism::OptMaxCost,
                        edge: Edge { a: 0.1, b: 0.9 },
                    },
                    Expectation::Edge {
                        mechanism: NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner),
                        edge: Edge { a: 0.2, b: 0.8 },
                    },
                    Expectation::Ratio {
                        mechanism: NamedMechanism::RandMaxCost,
                        objective: Objective::MaxCost,
                        value: (p * (0.4 + 0.6 * k) + (1.0 - p) * opt) / opt,
                    },
                ],
            )
        }
        "twoextreme-tight" => {
            let (k, eps) = (arg(0, 0.0), arg(1, 1e-4));
            let inst = two_extreme_tight(k, eps, 0.0)?;
            (
                inst,
                vec![Expectation::Ratio {
                    mechanism: NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner),
                    objective: Objective::MaxCost,
                    value: (1.0 - (1.0 - k) * eps) / ((1.0 + k) / 2.0 - (1.0 - k) * eps / 2.0),
                }],
            )
        }
        "appendixA-sc" | "appendixA-mc" => {
            let (k, eps) = (arg(0, 0.75), arg(1, 0.01));
            let inst = median_bad(k, eps)?;
            let mut exp = vec![Expectation::Edge {
                mechanism: NamedMechanism::Median,
                edge: Edge { a: eps, b: 1.0 },
            }];
            if name == "appendixA-mc" {
                exp.push(Expectation::Ratio {
                    mechanism: NamedMechanism::Median,
                    objective: Objective::MaxCost,
                    value: (k * (1.0 - eps) + 1.0 - 2.0 * eps)
                        / (k * (1.0 + eps) / 2.0 + (1.0 - eps) / 2.0),
                });
            } else if k > 0.5 {
                exp.push(Expectation::Edge {
                    mechanism: NamedMechanism::OptSocCost,
                    edge: Edge { a: 1.0 - eps, b: 1.0 },
                });
                exp.push(Expectation::Ratio {
                    mechanism: NamedMechanism::Median,
                    objective: Objective::SocialCost,
                    value: (4.0 * k * (1.0 - eps) + 1.0) / (4.0 * k * eps + 3.0 - 4.0 * eps),
                });
            }
            (inst, exp)
        }
        "appendixB" | "appendixB-mirror" => {
            let (k, eps) = (arg(0, 0.0), arg(1, 1e-3));
            let value = (1.0 - eps + k) / ((1.0 + k) / 2.0 - (1.0 - k) * eps / 2.0);
            let ratio = |v| Expectation::Ratio {
                mechanism: NamedMechanism::TwoExtreme(v),
                objective: Objective::MaxCost,
                value,
            };
            if name == "appendixB" {
                (
                    outer_bad(k, eps)?,
                    vec![ratio(TwoExtremeVariant::Outer), ratio(TwoExtremeVariant::LeftPair)],
                )
            } else {
                (outer_bad_mirror(k, eps)?, vec![ratio(TwoExtremeVariant::RightPair)])
            }
        }
        _ => unreachable!("catalog names are exhaustive"),
    };
    Ok(Witness {
        name: query.to_string(),
        instance,
        anchor,
        expectations,
    })
}

fn midpoints(k: f64) -> Result<Instance> {
    Instance::new(k, 0.5, 0.0, vec![0.0, 0.2], vec![0.8, 1.0])
}

/// `x_l = 0`, `x_r = t`, `y_l = y_r = t + L + eps` with the obstacle in the
/// gap.
fn two_extreme_tight(k: f64, eps: f64, length: f64) -> Result<Instance> {
    let t = (1.0 - length) / 2.0 - eps / 2.0;
    Instance::new(k, t + eps / 2.0, length, vec![0.0, t], vec![t + length + eps])
}

fn median_bad(k: f64, eps: f64) -> Result<Instance> {
    Instance::new(k, 1.0 - eps / 2.0, 0.0, vec![0.0, eps, 1.0 - eps], vec![1.0])
}

fn outer_bad(k: f64, eps: f64) -> Result<Instance> {
    Instance::new(k, 1.0 - eps / 2.0, 0.0, vec![0.0, 1.0 - eps], vec![1.0])
}

fn outer_bad_mirror(k: f64, eps: f64) -> Result<Instance> {
    Instance::new(k, eps / 2.0, 0.0, vec![0.0], vec![eps, 1.0])
}

/// One agent at 0, `t` agents at `eps` and `t` at 1, obstacle below `eps`.
fn median_many(k: f64, eps: f64, t: usize) -> Result<Instance> {
    Instance::new(k, eps / 2.0, 0.0, vec![0.0], [vec![eps; t], vec![1.0; t]].concat())
}

/// Structured worst-case candidates for ratio search at `(k, L)`.
pub(crate) fn families(k: f64, length: f64) -> Vec<Instance> {
    let mut out = vec![];
    for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
        out.extend(two_extreme_tight(k, eps, length));
        if length == 0.0 {
            out.extend(median_bad(k, eps));
            out.extend(outer_bad(k, eps));
            out.extend(outer_bad_mirror(k, eps));
            for t in [1, 3, 10] {
                out.extend(median_many(k, eps, t));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::Mechanism;
    use crate::verify::ratio;

    #[test]
    fn catalog_expectations_hold() {
        for name in witness_names() {
            let w = paper_witness(name).unwrap();
            for e in &w.expectations {
                match *e {
                    Expectation::Edge { mechanism, edge } => {
                        let got = mechanism.outcome(&w.instance).unwrap().as_edge().unwrap();
                        assert!((got.a - edge.a).abs() < 1e-12 && (got.b - edge.b).abs() < 1e-12, "{name}");
                    }
                    Expectation::Ratio {
                        mechanism,
                        objective,
                        value,
                    } => {
                        let r = ratio(&mechanism, &w.instance, objective).unwrap();
                        assert!((r - value).abs() < 1e-9, "{name}: {r} vs {value}");
                    }
                    Expectation::Misreport { .. } => {}
                }
            }
        }
    }

    #[test]
    fn parametric_names() {
        let w = paper_witness("twoextreme-tight(0.5, 0.001)").unwrap();
        assert_eq!(w.instance.k(), 0.5);
        assert!(paper_witness("appendixB(0.2)").is_ok());
        assert!(matches!(paper_witness("nope"), Err(Error::UnknownWitness(_))));
        assert!(matches!(paper_witness("appendixB(x)"), Err(Error::UnknownWitness(_))));
    }

    #[test]
    fn families_are_valid_for_long_obstacles() {
        assert!(!families(0.3, 0.2).is_empty());
        assert!(families(0.3, 0.0).len() > families(0.3, 0.2).len());
    }
}
