use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use detour_core::bounds::{self, LowerBoundRecord, OMode};
use detour_core::verify::{
    self, check_incentives, check_monotone, check_single_peaked, IncentiveCheck, InstanceSampler,
    LengthMode, Objective,
};
use detour_core::{parse_instance, serialize_instance, Error, Instance, Mechanism, NamedMechanism};

use crate::out::{self, f6};
use crate::{Property, RunConfig, VerifyArgs};

/// Exit status and message for a command that could not run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 5,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownMechanism(_)
            | Error::UnknownWitness(_)
            | Error::InvalidArgument(_)
            | Error::ParameterOutOfRange { .. } => 2,
            Error::Parse { .. } => 3,
            Error::UnsupportedRegime { .. } => 4,
            _ => 5,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::other(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::other(e.to_string())
    }
}

/// Any problem reading or validating the file is a parse failure.
fn load(path: &Path) -> Result<Instance, Failure> {
    let fail = |message: String| Failure { code: 3, message };
    let text = std::fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn mechanism(name: &str) -> Result<NamedMechanism, Failure> {
    Ok(name.parse::<NamedMechanism>()?)
}

fn objective(name: &str) -> Result<Objective, Failure> {
    Ok(name.parse::<Objective>()?)
}

pub fn solve(config: &RunConfig, name: &str, input: &Path, objective_name: &str) -> Result<u8, Failure> {
    let mech = mechanism(name)?;
    let objective = objective(objective_name)?;
    let inst = load(input)?;
    let outcome = mech.outcome(&inst)?;
    let value = objective.of_outcome(&outcome, &inst);
    let (_, opt) = objective.optimum(&inst);
    let ratio = if opt > verify::DEGENERATE_OPTIMUM {
        f6(value / opt)
    } else {
        "undefined".to_string()
    };
    let mut w = out::sink(config.output.as_deref())?;
    writeln!(w, "mechanism {mech}")?;
    writeln!(w, "{}", out::outcome_line(&outcome))?;
    writeln!(w, "objective {objective}")?;
    writeln!(w, "value {}", f6(value))?;
    writeln!(w, "optimum {}", f6(opt))?;
    writeln!(w, "ratio {ratio}")?;
    w.flush()?;
    Ok(0)
}

fn trial_instances(config: &RunConfig, args: &VerifyArgs, mech: Option<NamedMechanism>) -> Result<Vec<(u64, Instance)>, Failure> {
    if let Some(path) = &args.input {
        return Ok(vec![(0, load(path)?)]);
    }
    let length = match mech {
        Some(m) if m.requires_point_obstacle() => LengthMode::Zero,
        _ => LengthMode::Mixed,
    };
    let sampler = InstanceSampler::new(config.seed).with_length(length);
    Ok((0..args.trials).map(|t| (t, sampler.instance(t))).collect())
}

pub fn verify(config: &RunConfig, args: &VerifyArgs) -> Result<u8, Failure> {
    let mech = match (args.property, &args.mechanism) {
        (Property::Peaked, _) => None,
        (_, Some(name)) => Some(mechanism(name)?),
        (_, None) => return Err(Failure::usage("--mechanism is required")),
    };
    let coalition_size = match (args.property, args.coalition) {
        (Property::Sp, None | Some(1)) => 1,
        (Property::Sp, Some(c)) => {
            return Err(Failure::usage(format!("sp checks single agents, got --coalition {c}")))
        }
        (Property::Gsp, c) => c.unwrap_or(2),
        _ => 1,
    };
    let trials = trial_instances(config, args, mech)?;
    let seed_of = |t: u64| config.seed.wrapping_add(t);

    let (header, rows): (&[&str], Vec<Option<Vec<String>>>) = match args.property {
        Property::Sp | Property::Gsp => {
            let mech = mech.expect("checked above");
            let rows = trials
                .par_iter()
                .map(|(t, inst)| {
                    let opts = IncentiveCheck {
                        coalition_size,
                        resolution: args.grid,
                        tol: config.tol,
                        cross_region: args.cross_region,
                        seed: seed_of(*t),
                        ..IncentiveCheck::default()
                    };
                    Ok(check_incentives(&mech, inst, &opts)?.map(|v| {
                        let coalition: Vec<String> = v.coalition.iter().map(|&(s, i)| out::agent(s, i)).collect();
                        let mut row = vec![
                            t.to_string(),
                            coalition.join(" "),
                            out::locations(&v.misreports),
                            out::locations(&v.gains),
                        ];
                        row.extend(out::instance_fields(inst));
                        row
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            (&["trial", "coalition", "misreports", "gains", "k", "o", "L", "left", "right"], rows)
        }
        Property::Mono => {
            let mech = mech.expect("checked above");
            let rows = trials
                .par_iter()
                .map(|(t, inst)| {
                    Ok(check_monotone(&mech, inst, args.grid, config.tol, seed_of(*t))?.map(|v| {
                        let mut row = vec![
                            t.to_string(),
                            out::agent(v.agent.0, v.agent.1),
                            f6(v.moved_to),
                            f6(v.before.a),
                            f6(v.before.b),
                            f6(v.after.a),
                            f6(v.after.b),
                        ];
                        row.extend(out::instance_fields(inst));
                        row
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            (
                &["trial", "agent", "moved_to", "before_a", "before_b", "after_a", "after_b", "k", "o", "L", "left", "right"],
                rows,
            )
        }
        Property::Peaked => {
            let rows = trials
                .par_iter()
                .map(|(t, inst)| {
                    check_single_peaked(inst, args.grid, seed_of(*t)).map(|v| {
                        let mut row = vec![
                            t.to_string(),
                            out::agent(v.agent.0, v.agent.1),
                            f6(v.closer.a),
                            f6(v.closer.b),
                            f6(v.farther.a),
                            f6(v.farther.b),
                            f6(v.closer_cost),
                            f6(v.farther_cost),
                        ];
                        row.extend(out::instance_fields(inst));
                        row
                    })
                })
                .collect();
            (
                &[
                    "trial", "agent", "closer_a", "closer_b", "farther_a", "farther_b", "closer_cost", "farther_cost", "k", "o",
                    "L", "left", "right",
                ],
                rows,
            )
        }
    };

    let mut w = out::csv_writer(config.output.as_deref())?;
    w.write_record(header)?;
    let mut count = 0;
    for row in rows.into_iter().flatten() {
        w.write_record(&row)?;
        count += 1;
    }
    w.flush()?;
    let subject = mech.map(|m| format!(" {m}")).unwrap_or_default();
    let property = match args.property {
        Property::Sp => "sp",
        Property::Gsp => "gsp",
        Property::Mono => "mono",
        Property::Peaked => "peaked",
    };
    eprintln!("{property}{subject}: {count} violation(s) in {} instance(s)", trials.len());
    Ok(if count == 0 { 0 } else { 1 })
}

fn write_table(config: &RunConfig, records: &[LowerBoundRecord]) -> Result<(), Failure> {
    let mut w = out::csv_writer(config.output.as_deref())?;
    w.write_record(["k", "raw", "safe", "analytic", "grid_n", "o_mode"])?;
    for r in records {
        w.write_record([
            f6(r.k),
            f6(r.raw),
            f6(r.safe),
            f6(r.analytic),
            r.grid_n.to_string(),
            r.o_mode.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn bounds_table(
    config: &RunConfig,
    k_start: f64,
    k_end: f64,
    k_step: f64,
    grid: usize,
    o_mode: &str,
    verbose: bool,
) -> Result<u8, Failure> {
    let o_mode: OMode = o_mode.parse()?;
    let ks = bounds::k_values(k_start, k_end, k_step)?;
    let records = bounds::lower_bound_table(&ks, grid, o_mode, config.eps)?;
    if verbose {
        for r in &records {
            eprintln!("k {}: {} grid cell(s) with out-of-order profiles", f6(r.k), r.unordered_cells);
        }
    }
    write_table(config, &records)?;
    Ok(0)
}

/// k values covering `[0, 1)` with the given step.
fn unit_range(step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Failure::usage(format!("k step must lie in (0, 1), got {step}")));
    }
    Ok(bounds::k_values(0.0, 1.0 - step / 2.0, step)?)
}

pub fn bounds_curves(config: &RunConfig, k_step: f64, with_lb: bool, grid: usize) -> Result<u8, Failure> {
    let ks = unit_range(k_step)?;
    let rows = ks
        .iter()
        .map(|&k| {
            let lb = if with_lb {
                Some(bounds::b_of_k(k, grid, OMode::Fixed05, config.eps)?.safe)
            } else {
                None
            };
            bounds::curve_row(k, lb)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut w = out::csv_writer(config.output.as_deref())?;
    let mut header = vec!["k", "two_extreme", "restrict", "det_lb"];
    if with_lb {
        header.push("computer_lb_safe");
    }
    header.extend(["rand_upper", "rand_lb"]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![f6(r.k), f6(r.two_extreme), f6(r.restrict), f6(r.det_lb)];
        if let Some(lb) = r.computer_lb_safe {
            rec.push(f6(lb));
        }
        rec.extend([f6(r.rand_upper), f6(r.rand_lb)]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(0)
}

pub fn bounds_gaps(config: &RunConfig, k_step: f64, table_step: f64, grid: usize) -> Result<u8, Failure> {
    unit_range(k_step)?;
    let table = bounds::lower_bound_table(&unit_range(table_step)?, grid, OMode::Fixed05, config.eps)?;
    let g = bounds::gap_stats(k_step, &table)?;
    let mut w = out::csv_writer(config.output.as_deref())?;
    w.write_record(["det_gap", "det_argk", "rand_gap", "rand_argk"])?;
    w.write_record([f6(g.det_gap), f6(g.det_argk), f6(g.rand_gap), f6(g.rand_argk)])?;
    w.flush()?;
    Ok(0)
}

pub fn ratio(
    config: &RunConfig,
    name: &str,
    objective_name: &str,
    k: f64,
    length: f64,
    budget: u64,
) -> Result<u8, Failure> {
    let mech = mechanism(name)?;
    let objective = objective(objective_name)?;
    if mech.requires_point_obstacle() && length != 0.0 {
        return Err(Error::UnsupportedRegime {
            mechanism: mech.to_string(),
            length,
        }
        .into());
    }
    let report = verify::worst_ratio_search(&mech, objective, k, length, budget, config.seed)?;
    let bound = match objective {
        Objective::MaxCost => bounds::mechanism_bound(mech, k, length).map(f6),
        Objective::SocialCost => None,
    };
    let mut w = out::sink(config.output.as_deref())?;
    writeln!(w, "mechanism {mech}")?;
    writeln!(w, "objective {objective}")?;
    writeln!(w, "k {}", f6(k))?;
    writeln!(w, "L {}", f6(length))?;
    writeln!(w, "worst {}", f6(report.worst_ratio))?;
    writeln!(w, "value {}", f6(report.mech_value))?;
    writeln!(w, "optimum {}", f6(report.opt_value))?;
    writeln!(w, "bound {}", bound.as_deref().unwrap_or("none"))?;
    writeln!(w, "witness")?;
    write!(w, "{}", serialize_instance(&report.witness))?;
    w.flush()?;
    Ok(0)
}
