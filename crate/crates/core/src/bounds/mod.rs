//! Closed-form approximation-ratio curves and the grid-search lower bound
//! `B(k)` for deterministic strategyproof mechanisms.

mod search;

use std::fmt;
use std::str::FromStr;

pub use search::{
    b_of_k, f_k, inner_min, lower_bound_table, profiles16, LowerBoundRecord, OMode,
    SixteenProfiles, PROFILE_EPS, SAFE_MARGIN, SKIP_EPS,
};

use crate::error::{Error, Result};
use crate::mechanisms::{restrict_c, NamedMechanism, PhantomRule, TwoExtremeVariant};

/// `(9 - sqrt(73)) / 4`, where the two branches of the unbounded randomized
/// mechanism's ratio meet.
pub fn kappa() -> f64 {
    (9.0 - 73f64.sqrt()) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curve {
    TwoExtreme,
    Restrict,
    RandMaxCost,
    RandUnbound,
}

impl Curve {
    pub const ALL: [Curve; 4] = [
        Curve::TwoExtreme,
        Curve::Restrict,
        Curve::RandMaxCost,
        Curve::RandUnbound,
    ];
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Curve::TwoExtreme => "two_extreme",
            Curve::Restrict => "restrict",
            Curve::RandMaxCost => "randmc",
            Curve::RandUnbound => "randub",
        })
    }
}

impl FromStr for Curve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Curve::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown curve `{s}`")))
    }
}

/// A sampled value of a named curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub k: f64,
    pub length: f64,
    pub curve: String,
    pub value: f64,
}

fn check_k(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ParameterOutOfRange {
            name: "k",
            value: k,
            expected: "0 <= k < 1",
        });
    }
    Ok(())
}

/// `R1..R4` of the restricted mechanism's bound at `c = restrict_c(k)`.
/// At `k = 0` the first two are `0/0`; all four tend to 1 there.
pub fn restrict_terms(k: f64) -> Result<[f64; 4]> {
    let c = restrict_c(k)?;
    if k == 0.0 {
        return Ok([1.0; 4]);
    }
    let r1 = (1.0 - (1.0 - k) * c) / (1.0 + k - (1.0 - k) * c);
    let r2 = (k * (2.0 * c - c * c) + 1.0 - c * c) / (2.0 - 2.0 * c + 2.0 * c * k);
    let r3 = (1.0 + 2.0 * c * k) / (2.0 - (1.0 - k) * c);
    Ok([r1, r2, r3, c])
}

/// Proven approximation ratio for the maximum cost.
pub fn upper_curve(curve: Curve, k: f64, length: f64) -> Result<f64> {
    check_k(k)?;
    if !(0.0..1.0).contains(&length) {
        return Err(Error::ParameterOutOfRange {
            name: "L",
            value: length,
            expected: "0 <= L < 1",
        });
    }
    if curve != Curve::TwoExtreme && length != 0.0 {
        return Err(Error::UnsupportedRegime {
            mechanism: curve.to_string(),
            length,
        });
    }
    Ok(match curve {
        Curve::TwoExtreme => {
            (2.0 - 2.0 * (1.0 - k) * length) / (1.0 + k - (1.0 - k) * length)
        }
        Curve::Restrict => 2.0 * restrict_terms(k)?.into_iter().fold(f64::MIN, f64::max),
        Curve::RandMaxCost => ((4.0 - 2.0 * k) / (3.0 - k)).max((1.0 + k) / (1.0 + k * k)),
        Curve::RandUnbound => {
            if k <= kappa() {
                (4.0 - 2.0 * k) / (3.0 - k)
            } else {
                (11.0 + 2.0 * k.powi(3) - 9.0 * k * k) / (9.0 + k * k - 6.0 * k)
            }
        }
    })
}

/// Proven maximum-cost ratio of a named mechanism at `(k, L)`, if any.
pub fn mechanism_bound(mechanism: NamedMechanism, k: f64, length: f64) -> Option<f64> {
    match mechanism {
        NamedMechanism::OptMaxCost => Some(1.0),
        NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner)
        | NamedMechanism::GeneralizedMedian(PhantomRule::Inner) => {
            upper_curve(Curve::TwoExtreme, k, length).ok()
        }
        NamedMechanism::TwoExtreme(_) => Some(2.0),
        NamedMechanism::Restrict | NamedMechanism::GeneralizedMedian(PhantomRule::Restrict) => {
            upper_curve(Curve::Restrict, k, length).ok()
        }
        NamedMechanism::RandMaxCost => upper_curve(Curve::RandMaxCost, k, length).ok(),
        NamedMechanism::RandUnbound => upper_curve(Curve::RandUnbound, k, length).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LowerBoundKind {
    Deterministic,
    Randomized,
}

fn g_terms(k: f64, length: f64, a: f64) -> (f64, f64) {
    let first = (a + k * (1.0 - a)) / (a / 2.0 + k * (1.0 - a / 2.0));
    let second = 2.0 * ((a.max(1.0 - length - a)) + k * (1.0 - a))
        / (1.0 - length + k * (1.0 + length));
    (first, second)
}

fn g_at(k: f64, length: f64, a: f64) -> f64 {
    let (f, s) = g_terms(k, length, a);
    f.max(s)
}

/// Positive root of `(1+k)(1-k) a^2 + k B a - k(1+k)(1-L) = 0` with
/// `B = (1-k)L + 2(1+k)`, the balance point of the deterministic bound.
pub fn det_lb_a0(k: f64, length: f64) -> f64 {
    let b = (1.0 - k) * length + 2.0 * (1.0 + k);
    let disc = k * k * b * b + 4.0 * (1.0 + k) * (1.0 - k) * k * (1.0 + k) * (1.0 - length);
    (-k * b + disc.sqrt()) / (2.0 * (1.0 + k) * (1.0 - k))
}

/// The deterministic bound by golden-section search over `a`; the objective
/// is a maximum of an increasing and a unimodal function.
pub fn det_lb_numeric(k: f64, length: f64) -> f64 {
    if k == 0.0 {
        return 2.0;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0 - length);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (g_at(k, length, c), g_at(k, length, d));
    for _ in 0..200 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = g_at(k, length, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = g_at(k, length, d);
        }
    }
    g_at(k, length, (lo + hi) / 2.0)
}

/// Lower bounds on the ratio of any strategyproof mechanism. The
/// randomized bound is stated for `L = 0` and ignores `length`.
pub fn analytic_lb(kind: LowerBoundKind, k: f64, length: f64) -> Result<f64> {
    check_k(k)?;
    Ok(match kind {
        LowerBoundKind::Randomized => (6.0 + 6.0 * k) / (5.0 + 7.0 * k),
        LowerBoundKind::Deterministic => {
            if !(0.0..1.0).contains(&length) {
                return Err(Error::ParameterOutOfRange {
                    name: "L",
                    value: length,
                    expected: "0 <= L < 1",
                });
            }
            if k == 0.0 {
                2.0
            } else {
                g_at(k, length, det_lb_a0(k, length).min((1.0 - length) / 2.0))
            }
        }
    })
}

/// `2 / (1 + sqrt(k))`, the deterministic bound at `L = 0`.
pub fn sqrt_bound(k: f64) -> f64 {
    if k > 0.0 {
        2.0 / (1.0 + k.sqrt())
    } else {
        2.0
    }
}

/// `count` evenly spaced values from `start` with step `step`, up to `end`
/// inclusive. Steps of the form `1/m` are generated as `i / m` so that, for
/// example, step 0.01 yields exactly `0.07` rather than `7 * 0.01`.
pub fn k_values(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end >= start) || start < 0.0 || end >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "invalid k range {start}..={end} step {step}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    let m = (1.0 / step).round();
    let exact = (m * step - 1.0).abs() < 1e-12;
    let first = (start * m).round();
    Ok((0..count)
        .map(|i| {
            if exact && (first / m - start).abs() < 1e-12 {
                (first + i as f64) / m
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}

/// One row of the curves table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub k: f64,
    pub two_extreme: f64,
    pub restrict: f64,
    pub det_lb: f64,
    pub computer_lb_safe: Option<f64>,
    pub rand_upper: f64,
    pub rand_lb: f64,
}

pub fn curve_row(k: f64, computer_lb_safe: Option<f64>) -> Result<CurveRow> {
    Ok(CurveRow {
        k,
        two_extreme: upper_curve(Curve::TwoExtreme, k, 0.0)?,
        restrict: upper_curve(Curve::Restrict, k, 0.0)?,
        det_lb: analytic_lb(LowerBoundKind::Deterministic, k, 0.0)?,
        computer_lb_safe,
        rand_upper: upper_curve(Curve::RandMaxCost, k, 0.0)?,
        rand_lb: analytic_lb(LowerBoundKind::Randomized, k, 0.0)?,
    })
}

pub fn curve_points(k: f64, length: f64) -> Vec<CurvePoint> {
    Curve::ALL
        .into_iter()
        .filter_map(|c| {
            upper_curve(c, k, length).ok().map(|value| CurvePoint {
                k,
                length,
                curve: c.to_string(),
                value,
            })
        })
        .collect()
}

/// Largest distances between proven upper bounds and lower bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapStats {
    pub det_gap: f64,
    pub det_argk: f64,
    pub rand_gap: f64,
    pub rand_argk: f64,
}

/// The deterministic gap compares the restricted mechanism's curve with
/// the safe grid-search bound at the k values of `table`; the randomized
/// gap compares the randomized curve with its analytic bound on a `k_step`
/// grid over `[0, 1)`. Ties keep the smallest k.
pub fn gap_stats(k_step: f64, table: &[LowerBoundRecord]) -> Result<GapStats> {
    let mut det = (f64::NEG_INFINITY, f64::NAN);
    for rec in table {
        let gap = upper_curve(Curve::Restrict, rec.k, 0.0)? - rec.safe;
        if gap > det.0 {
            det = (gap, rec.k);
        }
    }
    let end = 1.0 - k_step / 2.0;
    let mut rand = (f64::NEG_INFINITY, f64::NAN);
    for k in k_values(0.0, end, k_step)? {
        let gap = upper_curve(Curve::RandMaxCost, k, 0.0)?
            - analytic_lb(LowerBoundKind::Randomized, k, 0.0)?;
        if gap > rand.0 {
            rand = (gap, k);
        }
    }
    Ok(GapStats {
        det_gap: det.0,
        det_argk: det.1,
        rand_gap: rand.0,
        rand_argk: rand.1,
    })
}
