//! Brute-force oracles, incentive fuzzers and approximation-ratio search.

mod incentives;
mod sampler;
mod witness;

use std::fmt;
use std::str::FromStr;

pub use incentives::{
    check_incentives, check_monotone, check_single_peaked, IncentiveCheck, MonotoneViolation,
    PeakViolation, Violation,
};
pub use sampler::{InstanceSampler, LengthMode};
pub use witness::{paper_witness, witness_names, Expectation, Witness};

use crate::error::{Error, Result};
use crate::mechanisms::{opt_max_cost, opt_soc_cost, Mechanism};
use crate::model::{max_cost, social_cost, Edge, Instance, Outcome};

/// Optimal values at or below this are too small to divide by.
pub const DEGENERATE_OPTIMUM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    SocialCost,
    MaxCost,
}

impl Objective {
    pub fn of_edge(self, edge: Edge, inst: &Instance) -> f64 {
        match self {
            Objective::SocialCost => social_cost(edge, inst),
            Objective::MaxCost => max_cost(edge, inst),
        }
    }

    /// Objective value of a mechanism output; lotteries take the expectation.
    pub fn of_outcome(self, outcome: &Outcome, inst: &Instance) -> f64 {
        match self {
            Objective::SocialCost => outcome.social_cost(inst),
            Objective::MaxCost => outcome.max_cost(inst),
        }
    }

    /// The exact optimum.
    pub fn optimum(self, inst: &Instance) -> (Edge, f64) {
        let edge = match self {
            Objective::SocialCost => opt_soc_cost(inst),
            Objective::MaxCost => opt_max_cost(inst),
        };
        (edge, self.of_edge(edge, inst))
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::SocialCost => "sc",
            Objective::MaxCost => "mc",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sc" => Ok(Objective::SocialCost),
            "mc" => Ok(Objective::MaxCost),
            other => Err(Error::InvalidArgument(format!(
                "unknown objective `{other}` (expected sc or mc)"
            ))),
        }
    }
}

/// Exhaustive minimization over the `(resolution + 1)^2` grid on
/// `[0, o] x [o + L, 1]`. Ties go to the first grid point in `(a, b)`
/// lexicographic order.
pub fn grid_opt(inst: &Instance, objective: Objective, resolution: usize) -> Result<(Edge, f64)> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let o = inst.o();
    let lo = inst.params().obstacle_end();
    let r = resolution as f64;
    let bs: Vec<f64> = (0..=resolution)
        .map(|j| lo + (1.0 - lo) * j as f64 / r)
        .collect();
    let mut best = (Edge::raw(0.0, 1.0), f64::INFINITY);
    for i in 0..=resolution {
        let a = o * i as f64 / r;
        for &b in &bs {
            let e = Edge::raw(a, b);
            let v = objective.of_edge(e, inst);
            if v < best.1 {
                best = (e, v);
            }
        }
    }
    Ok(best)
}

/// Mechanism value over optimal value on one instance. Lotteries are
/// scored by the expectation of the per-realization objective.
pub fn ratio(mechanism: &dyn Mechanism, inst: &Instance, objective: Objective) -> Result<f64> {
    Ok(ratio_parts(mechanism, inst, objective)?.0)
}

fn ratio_parts(
    mechanism: &dyn Mechanism,
    inst: &Instance,
    objective: Objective,
) -> Result<(f64, f64, f64)> {
    let (_, opt) = objective.optimum(inst);
    if opt <= DEGENERATE_OPTIMUM {
        return Err(Error::DegenerateOptimum(opt));
    }
    let value = objective.of_outcome(&mechanism.outcome(inst)?, inst);
    Ok((value / opt, value, opt))
}

/// Worst ratio found by [`worst_ratio_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub mechanism: String,
    pub objective: Objective,
    pub k: f64,
    pub length: f64,
    pub worst_ratio: f64,
    pub witness: Instance,
    pub mech_value: f64,
    pub opt_value: f64,
}

/// Largest ratio over `budget` seeded random instances with the given `k`
/// and `L` and agents on both sides, plus the structured worst-case
/// families that exist for those parameters. Instances with a vanishing
/// optimum are skipped.
pub fn worst_ratio_search(
    mechanism: &dyn Mechanism,
    objective: Objective,
    k: f64,
    length: f64,
    budget: u64,
    seed: u64,
) -> Result<RatioReport> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let sampler = InstanceSampler::new(seed)
        .with_k(k)
        .with_length(LengthMode::Fixed(length))
        .two_sided();
    let mut best: Option<RatioReport> = None;
    let mut consider = |inst: Instance| -> Result<()> {
        let (r, value, opt) = match ratio_parts(mechanism, &inst, objective) {
            Ok(parts) => parts,
            Err(Error::DegenerateOptimum(_)) => return Ok(()),
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| r > b.worst_ratio) {
            best = Some(RatioReport {
                mechanism: mechanism.name(),
                objective,
                k,
                length,
                worst_ratio: r,
                witness: inst,
                mech_value: value,
                opt_value: opt,
            });
        }
        Ok(())
    };
    for inst in witness::families(k, length) {
        consider(inst)?;
    }
    for i in 0..budget {
        consider(sampler.instance(i))?;
    }
    best.ok_or(Error::DegenerateOptimum(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{NamedMechanism, TwoExtremeVariant};

    fn inst(k: f64, o: f64, left: &[f64], right: &[f64]) -> Instance {
        Instance::new(k, o, 0.0, left.to_vec(), right.to_vec()).unwrap()
    }

    #[test]
    fn grid_opt_examples() {
        let (e, v) = grid_opt(&inst(0.0, 0.5, &[0.0], &[]), Objective::MaxCost, 100).unwrap();
        assert_eq!((e, v), (Edge::raw(0.0, 1.0), 0.0));
        let i = inst(0.0, 0.5, &[0.0, 0.2], &[0.8, 1.0]);
        let (e, v) = grid_opt(&i, Objective::MaxCost, 100).unwrap();
        // The exact optimum (0.1, 0.9) costs 0.2 for every agent.
        assert!((0.2 - 1e-12..=0.2 + 0.02).contains(&v));
        assert!((e.a - 0.1).abs() <= 0.01 && (e.b - 0.9).abs() <= 0.01);
        assert!(grid_opt(&i, Objective::MaxCost, 1).is_err());
    }

    #[test]
    fn ratio_examples() {
        let inner = NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner);
        let eps = 1e-4;
        let i = inst(0.0, 0.3 + eps / 2.0, &[0.0, 0.3], &[0.3 + eps]);
        assert!((ratio(&inner, &i, Objective::MaxCost).unwrap() - 2.0).abs() <= 1e-2);
        let mid = inst(0.0, 0.5, &[0.0, 0.2], &[0.8, 1.0]);
        let optmc = NamedMechanism::OptMaxCost;
        assert_eq!(ratio(&optmc, &mid, Objective::MaxCost).unwrap(), 1.0);
        let r = ratio(&NamedMechanism::RandMaxCost, &mid, Objective::MaxCost).unwrap();
        assert!(r <= 4.0 / 3.0 + 1e-9);
        let zero = inst(0.0, 0.5, &[0.0], &[]);
        assert!(matches!(
            ratio(&optmc, &zero, Objective::MaxCost),
            Err(Error::DegenerateOptimum(_))
        ));
    }

    #[test]
    fn objective_names() {
        assert_eq!("sc".parse::<Objective>().unwrap(), Objective::SocialCost);
        assert_eq!(Objective::MaxCost.to_string(), "mc");
        assert!("xx".parse::<Objective>().is_err());
    }
}
