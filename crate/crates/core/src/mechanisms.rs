//! Every mechanism of the workbench, each a total function from an
//! [`Instance`] to an [`Edge`] or a [`Lottery`].
//!
//! Deterministic strategyproof mechanisms here are all two-dimensional
//! generalized medians: each coordinate of the outcome is the median of the
//! agents' peaks on that axis together with `n + 1` fixed phantoms. A left
//! agent at `x` peaks at `(x, 1)`, a right agent at `y` peaks at `(0, y)`.
//! [`generalized_median`] is the generic engine; [`PhantomProfile`] has the
//! encodings of the named mechanisms.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::model::{Edge, Instance, Lottery, Outcome, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoExtremeVariant {
    /// `(x_r, y_l)`: the two agents nearest the obstacle.
    Inner,
    /// `(x_l, y_r)`
    Outer,
    /// `(x_l, y_l)`
    LeftPair,
    /// `(x_r, y_r)`
    RightPair,
}

impl TwoExtremeVariant {
    pub const ALL: [TwoExtremeVariant; 4] = [
        TwoExtremeVariant::Inner,
        TwoExtremeVariant::Outer,
        TwoExtremeVariant::LeftPair,
        TwoExtremeVariant::RightPair,
    ];

    fn tag(self) -> &'static str {
        match self {
            TwoExtremeVariant::Inner => "inner",
            TwoExtremeVariant::Outer => "outer",
            TwoExtremeVariant::LeftPair => "left",
            TwoExtremeVariant::RightPair => "right",
        }
    }
}

/// Social-cost optimal edge.
///
/// `a*` is the supremum of the cut points `x` where moving `a` rightwards
/// still lowers the social cost,
/// `(|N1 <= x| + |N2|)(1 - k) < |N1 > x| (1 + k)`, and `b*` is the mirror
/// image on the right region. The condition is constant between consecutive
/// agent locations and, once false, stays false, so both scans stop at the
/// first failing interval. `a* <= x_r` and `b* >= y_l`.
pub fn opt_soc_cost(inst: &Instance) -> Edge {
    let k = inst.k();
    let left = inst.left();
    let right = inst.right();
    let (n1, n2) = (left.len(), right.len());
    let lowers = |near: usize, far: usize, other: usize| {
        ((near + other) as f64) * (1.0 - k) < (far as f64) * (1.0 + k)
    };

    // Left scan over [start, p), counting agents at or below `start`.
    let mut a = 0.0;
    let mut i = 0;
    let mut start = 0.0;
    while i < n1 && left[i] <= start {
        i += 1;
    }
    loop {
        let p = if i < n1 { left[i] } else { inst.o() };
        if p > start {
            if lowers(i, n1 - i, n2) {
                a = p;
            } else {
                break;
            }
        }
        if i == n1 {
            break;
        }
        start = p;
        while i < n1 && left[i] <= start {
            i += 1;
        }
    }

    // Right scan over (q, start], counting agents at or above `start`.
    let mut b = 1.0;
    let mut j = n2;
    let mut start = 1.0;
    while j > 0 && right[j - 1] >= start {
        j -= 1;
    }
    loop {
        let q = if j > 0 {
            right[j - 1]
        } else {
            inst.params().obstacle_end()
        };
        if q < start {
            let near = n2 - j;
            if lowers(near, n2 - near, n1) {
                b = q;
            } else {
                break;
            }
        }
        if j == 0 {
            break;
        }
        start = q;
        while j > 0 && right[j - 1] >= start {
            j -= 1;
        }
    }

    Edge::raw(a, b)
}

/// Closed-form maximum-cost optimum for extremes `(x_l, x_r, y_l, y_r)` of a
/// two-sided profile. No ordering checks; callers enumerating degenerate
/// profiles get the formula value unchanged.
#[inline]
pub fn opt_max_cost_formula(xl: f64, xr: f64, yl: f64, yr: f64) -> (f64, f64) {
    if 1.0 - yr >= xl {
        ((xl + xr) / 2.0, (yl - xl) / 2.0 + 0.5)
    } else {
        ((xr - yr) / 2.0 + 0.5, (yl + yr) / 2.0)
    }
}

/// The unique maximum-cost optimal edge.
///
/// Two-sided instances use the closed form; its cost is attained by both
/// the agents at `x_r` and `y_l`. With one region empty the optimum puts the
/// empty side's endpoint at the region boundary and the other at the
/// midpoint of its extremes.
pub fn opt_max_cost(inst: &Instance) -> Edge {
    let e = inst.extremes();
    match (inst.left().is_empty(), inst.right().is_empty()) {
        (false, false) => {
            let (a, b) = opt_max_cost_formula(e.left_min, e.left_max, e.right_min, e.right_max);
            Edge::raw(a, b)
        }
        (false, true) => Edge::raw((e.left_min + e.left_max) / 2.0, 1.0),
        (true, false) => Edge::raw(0.0, (e.right_min + e.right_max) / 2.0),
        (true, true) => unreachable!("instances always have an agent"),
    }
}

pub fn two_extreme(inst: &Instance, variant: TwoExtremeVariant) -> Edge {
    let e = inst.extremes();
    let (a, b) = match variant {
        TwoExtremeVariant::Inner => (e.left_max, e.right_min),
        TwoExtremeVariant::Outer => (e.left_min, e.right_max),
        TwoExtremeVariant::LeftPair => (e.left_min, e.right_min),
        TwoExtremeVariant::RightPair => (e.left_max, e.right_max),
    };
    Edge::raw(a, b)
}

fn check_coefficient(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ParameterOutOfRange {
            name: "k",
            value: k,
            expected: "0 <= k < 1",
        });
    }
    Ok(())
}

/// Distance-from-obstacle fraction of the restricted two-extreme mechanism,
/// `c = (1 + k^2 - sqrt(R)) / (1 - k^2)` with `R = k^4 - k^3 + 3k^2 + k`,
/// evaluated in the rationalized form `(1 - k) / (1 + k^2 + sqrt(R))`.
pub fn restrict_c(k: f64) -> Result<f64> {
    check_coefficient(k)?;
    let radicand = k.powi(4) - k.powi(3) + 3.0 * k * k + k;
    Ok((1.0 - k) / (1.0 + k * k + radicand.sqrt()))
}

/// Thresholds `(o (1 - c), o + c (1 - o))` the restricted mechanism keeps
/// its endpoints beyond.
pub fn restrict_thresholds(k: f64, o: f64) -> Result<(f64, f64)> {
    let c = restrict_c(k)?;
    Ok((o - o * c, o + c - o * c))
}

fn require_point_obstacle(inst: &Instance, mechanism: &str) -> Result<()> {
    if inst.length() != 0.0 {
        return Err(Error::UnsupportedRegime {
            mechanism: mechanism.to_string(),
            length: inst.length(),
        });
    }
    Ok(())
}

pub fn two_extreme_restrict(inst: &Instance) -> Result<Edge> {
    require_point_obstacle(inst, "restrict")?;
    let (lo, hi) = restrict_thresholds(inst.k(), inst.o())?;
    let e = inst.extremes();
    Ok(Edge::raw(e.left_max.min(lo), e.right_min.max(hi)))
}

/// Probability of the inner edge in [`rand_max_cost`].
pub fn rand_max_cost_probability(k: f64) -> f64 {
    ((1.0 + k) / (3.0 - k)).max((k + k * k) / (1.0 + k * k))
}

/// `(x_r, y_l)` with probability `p`, else the two midpoints
/// `(x_r / 2, (y_l + 1) / 2)`.
pub fn rand_max_cost(inst: &Instance) -> Result<Lottery> {
    require_point_obstacle(inst, "randmc")?;
    let p = rand_max_cost_probability(inst.k());
    let e = inst.extremes();
    Lottery::new([
        (Edge::raw(e.left_max, e.right_min), p),
        (Edge::raw(e.left_max / 2.0, (e.right_min + 1.0) / 2.0), 1.0 - p),
    ])
}

/// Product lottery: `a` is `x_r` or `x_r / 2` and, independently, `b` is
/// `y_l` or `(1 + y_l) / 2`, each near endpoint with probability
/// `(1 + k) / (3 - k)`.
pub fn rand_unbound(inst: &Instance) -> Result<Lottery> {
    require_point_obstacle(inst, "randub")?;
    let k = inst.k();
    let near = (1.0 + k) / (3.0 - k);
    let far = 2.0 * (1.0 - k) / (3.0 - k);
    let e = inst.extremes();
    let a = [(e.left_max, near), (e.left_max / 2.0, far)];
    let b = [(e.right_min, near), ((1.0 + e.right_min) / 2.0, far)];
    Lottery::new(
        a.iter()
            .flat_map(|&(a, pa)| b.iter().map(move |&(b, pb)| (Edge::raw(a, b), pa * pb))),
    )
}

/// Phantom values of a two-dimensional generalized median mechanism. Each
/// axis holds `n + 1` extended reals for an `n`-agent instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PhantomProfile {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.iter().chain(&ys).any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("phantom values must not be NaN".into()));
        }
        Ok(PhantomProfile { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// `x`: one `-inf` then `+inf`; `y`: `-inf` except one `+inf`. Selects
    /// the largest left peak and the smallest right peak.
    pub fn two_extreme_inner(n: usize) -> Self {
        let mut xs = vec![f64::INFINITY; n + 1];
        xs[0] = f64::NEG_INFINITY;
        let mut ys = vec![f64::NEG_INFINITY; n + 1];
        ys[n] = f64::INFINITY;
        PhantomProfile { xs, ys }
    }

    /// `|N1|` phantoms at `(o (1 - c), 0)`, `|N2|` at `(1, o + c (1 - o))`
    /// and one at `(0, 1)`.
    pub fn restrict(inst: &Instance) -> Result<Self> {
        let (lo, hi) = restrict_thresholds(inst.k(), inst.o())?;
        let (n1, n2) = (inst.left().len(), inst.right().len());
        let mut xs = Vec::with_capacity(n1 + n2 + 1);
        let mut ys = Vec::with_capacity(n1 + n2 + 1);
        xs.extend(std::iter::repeat_n(lo, n1));
        ys.extend(std::iter::repeat_n(0.0, n1));
        xs.extend(std::iter::repeat_n(1.0, n2));
        ys.extend(std::iter::repeat_n(hi, n2));
        xs.push(0.0);
        ys.push(1.0);
        Ok(PhantomProfile { xs, ys })
    }

    /// `ceil(n / 2)` phantoms at `-inf` and the rest at `+inf`, on both axes.
    pub fn median(n: usize) -> Self {
        let low = n.div_ceil(2);
        let xs: Vec<f64> = (0..=n)
            .map(|i| {
                if i < low {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        PhantomProfile {
            ys: xs.clone(),
            xs,
        }
    }
}

type Axis = SmallVec<[f64; 24]>;

fn median_of(values: &mut [f64]) -> f64 {
    let mid = values.len() / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Coordinatewise median of the `n` agent peaks and the `n + 1` phantoms.
/// Fails when the phantom arity is wrong or the median falls outside the
/// feasible box.
pub fn generalized_median(inst: &Instance, phantoms: &PhantomProfile) -> Result<Edge> {
    let n = inst.len();
    for axis in [&phantoms.xs, &phantoms.ys] {
        if axis.len() != n + 1 {
            return Err(Error::PhantomArity {
                expected: n + 1,
                got: axis.len(),
            });
        }
    }
    let mut xs = Axis::with_capacity(2 * n + 1);
    let mut ys = Axis::with_capacity(2 * n + 1);
    for (loc, side) in inst.agents() {
        let (px, py) = match side {
            Side::Left => (loc, 1.0),
            Side::Right => (0.0, loc),
        };
        xs.push(px);
        ys.push(py);
    }
    xs.extend_from_slice(&phantoms.xs);
    ys.extend_from_slice(&phantoms.ys);
    let a = median_of(&mut xs);
    let b = median_of(&mut ys);
    Edge::new(a, b, inst.params()).map_err(|_| Error::InfeasibleOutcome { a, b })
}

/// Generalized median with [`PhantomProfile::median`]. With `ceil(n/2)`
/// phantoms at `-inf` the median is the peak of rank `floor(n/2)` on each
/// axis, read off the sorted lists directly.
pub fn median_mechanism(inst: &Instance) -> Edge {
    let (left, right) = (inst.left(), inst.right());
    let rank = inst.len() / 2;
    // x peaks sorted: |N2| zeros then the left locations; y peaks: the right
    // locations then |N1| ones.
    let a = if rank < right.len() { 0.0 } else { left[rank - right.len()] };
    let b = if rank < right.len() { right[rank] } else { 1.0 };
    Edge::raw(a, b)
}

/// Draws edges from a lottery; the sequence is a pure function of the seed.
pub struct LotterySampler<'a> {
    lottery: &'a Lottery,
    index: WeightedIndex<f64>,
    rng: ChaCha8Rng,
}

impl<'a> LotterySampler<'a> {
    pub fn new(lottery: &'a Lottery, seed: u64) -> Self {
        let index = WeightedIndex::new(lottery.support().iter().map(|&(_, p)| p))
            .expect("lottery probabilities are validated on construction");
        LotterySampler {
            lottery,
            index,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Iterator for LotterySampler<'_> {
    type Item = Edge;

    fn next(&mut self) -> Option<Edge> {
        let i = self.index.sample(&mut self.rng);
        Some(self.lottery.support()[i].0)
    }
}

pub fn sample(lottery: &Lottery, seed: u64) -> Edge {
    LotterySampler::new(lottery, seed)
        .next()
        .expect("sampler is infinite")
}

/// A mechanism: maps reported locations to an outcome.
pub trait Mechanism: Send + Sync {
    fn name(&self) -> String;

    fn outcome(&self, inst: &Instance) -> Result<Outcome>;

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// Phantom encoding used by the `genmedian` mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomRule {
    Median,
    Inner,
    Restrict,
}

impl PhantomRule {
    pub fn profile(self, inst: &Instance) -> Result<PhantomProfile> {
        match self {
            PhantomRule::Median => Ok(PhantomProfile::median(inst.len())),
            PhantomRule::Inner => Ok(PhantomProfile::two_extreme_inner(inst.len())),
            PhantomRule::Restrict => PhantomProfile::restrict(inst),
        }
    }
}

/// The mechanisms addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedMechanism {
    OptSocCost,
    OptMaxCost,
    TwoExtreme(TwoExtremeVariant),
    Restrict,
    RandMaxCost,
    RandUnbound,
    Median,
    GeneralizedMedian(PhantomRule),
}

impl NamedMechanism {
    /// Every mechanism with a (group) strategyproofness guarantee.
    pub fn strategyproof() -> Vec<NamedMechanism> {
        let mut all = vec![NamedMechanism::OptSocCost];
        all.extend(TwoExtremeVariant::ALL.map(NamedMechanism::TwoExtreme));
        all.extend([
            NamedMechanism::Restrict,
            NamedMechanism::Median,
            NamedMechanism::RandMaxCost,
            NamedMechanism::RandUnbound,
        ]);
        all
    }

    /// Whether the mechanism refuses obstacles of positive length.
    pub fn requires_point_obstacle(self) -> bool {
        matches!(
            self,
            NamedMechanism::Restrict
                | NamedMechanism::RandMaxCost
                | NamedMechanism::RandUnbound
                | NamedMechanism::GeneralizedMedian(PhantomRule::Restrict)
        )
    }
}

impl fmt::Display for NamedMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedMechanism::OptSocCost => f.write_str("optsc"),
            NamedMechanism::OptMaxCost => f.write_str("optmc"),
            NamedMechanism::TwoExtreme(v) => write!(f, "twoextreme:{}", v.tag()),
            NamedMechanism::Restrict => f.write_str("restrict"),
            NamedMechanism::RandMaxCost => f.write_str("randmc"),
            NamedMechanism::RandUnbound => f.write_str("randub"),
            NamedMechanism::Median => f.write_str("median"),
            NamedMechanism::GeneralizedMedian(PhantomRule::Median) => f.write_str("genmedian"),
            NamedMechanism::GeneralizedMedian(PhantomRule::Inner) => {
                f.write_str("genmedian:inner")
            }
            NamedMechanism::GeneralizedMedian(PhantomRule::Restrict) => {
                f.write_str("genmedian:restrict")
            }
        }
    }
}

impl FromStr for NamedMechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s {
            "optsc" => NamedMechanism::OptSocCost,
            "optmc" => NamedMechanism::OptMaxCost,
            "twoextreme" | "twoextreme:inner" => {
                NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner)
            }
            "twoextreme:outer" => NamedMechanism::TwoExtreme(TwoExtremeVariant::Outer),
            "twoextreme:left" => NamedMechanism::TwoExtreme(TwoExtremeVariant::LeftPair),
            "twoextreme:right" => NamedMechanism::TwoExtreme(TwoExtremeVariant::RightPair),
            "restrict" => NamedMechanism::Restrict,
            "randmc" => NamedMechanism::RandMaxCost,
            "randub" => NamedMechanism::RandUnbound,
            "median" => NamedMechanism::Median,
            "genmedian" | "genmedian:median" => NamedMechanism::GeneralizedMedian(PhantomRule::Median),
            "genmedian:inner" => NamedMechanism::GeneralizedMedian(PhantomRule::Inner),
            "genmedian:restrict" => NamedMechanism::GeneralizedMedian(PhantomRule::Restrict),
            other => return Err(Error::UnknownMechanism(other.to_string())),
        };
        Ok(m)
    }
}

impl Mechanism for NamedMechanism {
    fn name(&self) -> String {
        self.to_string()
    }

    fn outcome(&self, inst: &Instance) -> Result<Outcome> {
        Ok(match *self {
            NamedMechanism::OptSocCost => opt_soc_cost(inst).into(),
            NamedMechanism::OptMaxCost => opt_max_cost(inst).into(),
            NamedMechanism::TwoExtreme(v) => two_extreme(inst, v).into(),
            NamedMechanism::Restrict => two_extreme_restrict(inst)?.into(),
            NamedMechanism::RandMaxCost => rand_max_cost(inst)?.into(),
            NamedMechanism::RandUnbound => rand_unbound(inst)?.into(),
            NamedMechanism::Median => median_mechanism(inst).into(),
            NamedMechanism::GeneralizedMedian(rule) => {
                if rule == PhantomRule::Restrict {
                    require_point_obstacle(inst, "genmedian:restrict")?;
                }
                generalized_median(inst, &rule.profile(inst)?)?.into()
            }
        })
    }

    fn is_deterministic(&self) -> bool {
        !matches!(
            self,
            NamedMechanism::RandMaxCost | NamedMechanism::RandUnbound
        )
    }
}
