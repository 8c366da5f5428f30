//! Instances, pathway edges, lotteries and the agent cost model.
//!
//! The line `[0, 1]` is split by an obstacle `[o, o + L]`. Agents left of the
//! obstacle travel to the far right end `1` and agents right of it travel to
//! `0`, both through the pathway `(a, b)` whose traversal costs `k (b - a)`.

mod text;

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use text::{parse_instance, serialize_instance};

/// Tolerance on the total probability mass of a [`Lottery`].
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Default offset used to express limits such as `o^-` and `o^+`.
pub const DEFAULT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Obstacle geometry and pathway cost coefficient shared by every agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub k: f64,
    pub o: f64,
    pub length: f64,
}

impl Params {
    pub fn new(k: f64, o: f64, length: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "k",
                value: k,
                expected: "0 <= k < 1",
            });
        }
        if k >= 1.0 {
            return Err(Error::TrivialRegime(k));
        }
        if !(o > 0.0 && o < 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "o",
                value: o,
                expected: "0 < o < 1",
            });
        }
        if !(length >= 0.0 && length < 1.0 - o) {
            return Err(Error::ParameterOutOfRange {
                name: "L",
                value: length,
                expected: "0 <= L < 1 - o",
            });
        }
        Ok(Params { k, o, length })
    }

    /// Right end of the obstacle, `o + L`.
    #[inline]
    pub fn obstacle_end(&self) -> f64 {
        self.o + self.length
    }

    /// Which side of the obstacle `x` lies on, or `None` inside it or off the line.
    pub fn side_of(&self, x: f64) -> Option<Side> {
        if (0.0..self.o).contains(&x) {
            Some(Side::Left)
        } else if x > self.obstacle_end() && x <= 1.0 {
            Some(Side::Right)
        } else {
            None
        }
    }
}

/// A candidate pathway from `a` on the left region to `b` on the right region.
///
/// Edges live on the closed box `[0, o] x [o + L, 1]`; limit outcomes that
/// touch the obstacle are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: f64,
    pub b: f64,
}

impl Edge {
    pub fn new(a: f64, b: f64, params: &Params) -> Result<Self> {
        let lo = params.obstacle_end();
        if !(a >= 0.0 && a <= params.o && b >= lo && b <= 1.0) {
            return Err(Error::InvalidEdge {
                a,
                b,
                o: params.o,
                lo,
            });
        }
        Ok(Edge { a, b })
    }

    #[inline]
    pub(crate) fn raw(a: f64, b: f64) -> Self {
        Edge { a, b }
    }

    pub fn contains_tol(&self, params: &Params, tol: f64) -> bool {
        self.a >= -tol
            && self.a <= params.o + tol
            && self.b >= params.obstacle_end() - tol
            && self.b <= 1.0 + tol
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.a, self.b)
    }
}

/// Cost of an agent at `x` on `side` when the pathway is `edge`.
#[inline]
pub fn agent_cost(edge: Edge, x: f64, side: Side, k: f64) -> f64 {
    let span = k * (edge.b - edge.a);
    match side {
        Side::Left => (x - edge.a).abs() + span + (1.0 - edge.b),
        Side::Right => (x - edge.b).abs() + span + edge.a,
    }
}

/// The four boundary agent locations. Empty sides use the region endpoint as
/// a virtual agent: `0` on the left and `1` on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub left_min: f64,
    pub left_max: f64,
    pub right_min: f64,
    pub right_max: f64,
}

/// Agent counts on each side of a cut point `x`: `left_at_or_below`
/// counts left agents with `x_i <= x`, `right_below` counts right agents
/// with `x_j < x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutCounts {
    pub left_at_or_below: usize,
    pub left_above: usize,
    pub right_below: usize,
    pub right_at_or_above: usize,
}

/// A problem instance: parameters plus the reported agent locations of both
/// regions, each kept sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    params: Params,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Instance {
    pub fn new(k: f64, o: f64, length: f64, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        Self::with_params(Params::new(k, o, length)?, left, right)
    }

    pub fn with_params(params: Params, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        if left.is_empty() && right.is_empty() {
            return Err(Error::NoAgents);
        }
        check_side(&params, Side::Left, &left)?;
        check_side(&params, Side::Right, &right)?;
        Ok(Instance {
            params,
            left,
            right,
        })
    }

    /// Like [`Instance::new`] but sorts both location lists first.
    pub fn from_unsorted(
        k: f64,
        o: f64,
        length: f64,
        mut left: Vec<f64>,
        mut right: Vec<f64>,
    ) -> Result<Self> {
        left.sort_by(f64::total_cmp);
        right.sort_by(f64::total_cmp);
        Self::new(k, o, length, left, right)
    }

    /// Rebuilds the location lists in place as the sorted `left_base` and
    /// `right_base` plus the `extra` reports. Everything must already be
    /// valid for these parameters.
    pub(crate) fn refill_merged(
        &mut self,
        left_base: &[f64],
        right_base: &[f64],
        extra: &[(f64, Side)],
    ) {
        self.left.clear();
        self.left.extend_from_slice(left_base);
        self.right.clear();
        self.right.extend_from_slice(right_base);
        for &(x, side) in extra {
            let list = match side {
                Side::Left => &mut self.left,
                Side::Right => &mut self.right,
            };
            let at = list.partition_point(|&v| v < x);
            list.insert(at, x);
        }
        debug_assert!(!(self.left.is_empty() && self.right.is_empty()));
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn k(&self) -> f64 {
        self.params.k
    }

    pub fn o(&self) -> f64 {
        self.params.o
    }

    pub fn length(&self) -> f64 {
        self.params.length
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// All agents as `(location, side)`, left region first.
    pub fn agents(&self) -> impl Iterator<Item = (f64, Side)> + '_ {
        self.left
            .iter()
            .map(|&x| (x, Side::Left))
            .chain(self.right.iter().map(|&x| (x, Side::Right)))
    }

    pub fn extremes(&self) -> Extremes {
        let (left_min, left_max) = match (self.left.first(), self.left.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0.0, 0.0),
        };
        let (right_min, right_max) = match (self.right.first(), self.right.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (1.0, 1.0),
        };
        Extremes {
            left_min,
            left_max,
            right_min,
            right_max,
        }
    }

    pub fn cut_counts(&self, x: f64) -> CutCounts {
        let left_at_or_below = self.left.partition_point(|&v| v <= x);
        let right_below = self.right.partition_point(|&v| v < x);
        CutCounts {
            left_at_or_below,
            left_above: self.left.len() - left_at_or_below,
            right_below,
            right_at_or_above: self.right.len() - right_below,
        }
    }

    pub fn with_k(&self, k: f64) -> Result<Instance> {
        Instance::new(
            k,
            self.o(),
            self.length(),
            self.left.clone(),
            self.right.clone(),
        )
    }
}

fn check_side(params: &Params, side: Side, xs: &[f64]) -> Result<()> {
    for &x in xs {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            return Err(Error::AgentOutOfRange { side, value: x });
        }
        if params.side_of(x) != Some(side) {
            return Err(Error::AgentInsideObstacle { side, value: x });
        }
    }
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsorted { side });
    }
    Ok(())
}

pub fn extremes(inst: &Instance) -> Extremes {
    inst.extremes()
}

pub fn social_cost(edge: Edge, inst: &Instance) -> f64 {
    let k = inst.k();
    inst.agents().map(|(x, s)| agent_cost(edge, x, s, k)).sum()
}

/// Largest agent cost. Attained by one of the four extreme agents, so only
/// those are evaluated.
pub fn max_cost(edge: Edge, inst: &Instance) -> f64 {
    let k = inst.k();
    let mut worst = f64::NEG_INFINITY;
    if let (Some(&lo), Some(&hi)) = (inst.left.first(), inst.left.last()) {
        worst = worst
            .max(agent_cost(edge, lo, Side::Left, k))
            .max(agent_cost(edge, hi, Side::Left, k));
    }
    if let (Some(&lo), Some(&hi)) = (inst.right.first(), inst.right.last()) {
        worst = worst
            .max(agent_cost(edge, lo, Side::Right, k))
            .max(agent_cost(edge, hi, Side::Right, k));
    }
    worst
}

/// A discrete distribution over edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    support: SmallVec<[(Edge, f64); 4]>,
}

impl Lottery {
    pub fn new<I>(support: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Edge, f64)>,
    {
        let support: SmallVec<[(Edge, f64); 4]> = support.into_iter().collect();
        if support.is_empty() {
            return Err(Error::InvalidLottery("empty support"));
        }
        if support.iter().any(|&(_, p)| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidLottery("negative or non-finite probability"));
        }
        let total: f64 = support.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(Lottery { support })
    }

    pub fn point(edge: Edge) -> Self {
        let mut support = SmallVec::new();
        support.push((edge, 1.0));
        Lottery { support }
    }

    pub fn support(&self) -> &[(Edge, f64)] {
        &self.support
    }

    /// Expected left and right endpoints.
    pub fn mean_edge(&self) -> Edge {
        let (a, b) = self
            .support
            .iter()
            .fold((0.0, 0.0), |(a, b), &(e, p)| (a + p * e.a, b + p * e.b));
        Edge::raw(a, b)
    }
}

pub fn lottery_cost(lottery: &Lottery, x: f64, side: Side, k: f64) -> f64 {
    lottery
        .support
        .iter()
        .map(|&(e, p)| p * agent_cost(e, x, side, k))
        .sum()
}

/// Expected maximum cost: the per-realization maximum, averaged over the
/// lottery. This is not the maximum of the expected agent costs.
pub fn lottery_max_cost(lottery: &Lottery, inst: &Instance) -> f64 {
    lottery
        .support
        .iter()
        .map(|&(e, p)| p * max_cost(e, inst))
        .sum()
}

pub fn lottery_social_cost(lottery: &Lottery, inst: &Instance) -> f64 {
    lottery
        .support
        .iter()
        .map(|&(e, p)| p * social_cost(e, inst))
        .sum()
}

/// What a mechanism returns: a single edge or a lottery over edges.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Edge(Edge),
    Lottery(Lottery),
}

impl Outcome {
    pub fn cost(&self, x: f64, side: Side, k: f64) -> f64 {
        match self {
            Outcome::Edge(e) => agent_cost(*e, x, side, k),
            Outcome::Lottery(l) => lottery_cost(l, x, side, k),
        }
    }

    pub fn max_cost(&self, inst: &Instance) -> f64 {
        match self {
            Outcome::Edge(e) => max_cost(*e, inst),
            Outcome::Lottery(l) => lottery_max_cost(l, inst),
        }
    }

    pub fn social_cost(&self, inst: &Instance) -> f64 {
        match self {
            Outcome::Edge(e) => social_cost(*e, inst),
            Outcome::Lottery(l) => lottery_social_cost(l, inst),
        }
    }

    pub fn as_edge(&self) -> Option<Edge> {
        match self {
            Outcome::Edge(e) => Some(*e),
            Outcome::Lottery(_) => None,
        }
    }

    pub fn into_lottery(self) -> Lottery {
        match self {
            Outcome::Edge(e) => Lottery::point(e),
            Outcome::Lottery(l) => l,
        }
    }
}

impl From<Edge> for Outcome {
    fn from(e: Edge) -> Self {
        Outcome::Edge(e)
    }
}

impl From<Lottery> for Outcome {
    fn from(l: Lottery) -> Self {
        Outcome::Lottery(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(k: f64, o: f64, left: &[f64], right: &[f64]) -> Instance {
        Instance::new(k, o, 0.0, left.to_vec(), right.to_vec()).unwrap()
    }

    #[test]
    fn agent_cost_examples() {
        let e = Edge::raw(0.1, 0.9);
        assert!((agent_cost(e, 0.2, Side::Left, 0.5) - 0.6).abs() < 1e-15);
        assert_eq!(agent_cost(Edge::raw(0.3, 1.0), 0.3, Side::Left, 0.0), 0.0);
        assert!((agent_cost(e, 1.0, Side::Right, 0.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn social_and_max_cost_examples() {
        let i = inst(0.0, 0.5, &[0.2], &[0.8]);
        assert!((social_cost(Edge::raw(0.0, 1.0), &i) - 0.4).abs() < 1e-15);

        let i = inst(0.3, 0.5, &[], &[1.0]);
        assert!((social_cost(Edge::raw(0.0, 1.0), &i) - 0.3).abs() < 1e-15);

        let i = inst(0.0, 0.5, &[0.0, 0.2], &[0.8, 1.0]);
        // Every agent pays 0.2 at the midpoints.
        for (x, side) in i.agents() {
            assert!((agent_cost(Edge::raw(0.1, 0.9), x, side, 0.0) - 0.2).abs() < 1e-15);
        }
        assert!((max_cost(Edge::raw(0.1, 0.9), &i) - 0.2).abs() < 1e-15);
        assert!((max_cost(Edge::raw(0.2, 0.8), &i) - 0.4).abs() < 1e-15);

        let x = 0.35;
        let i = inst(0.4, 0.5, &[x], &[]);
        assert!((max_cost(Edge::raw(x, 1.0), &i) - 0.4 * (1.0 - x)).abs() < 1e-15);
    }

    #[test]
    fn lottery_costs() {
        let lot = Lottery::new([
            (Edge::raw(0.2, 0.8), 1.0 / 3.0),
            (Edge::raw(0.1, 0.9), 2.0 / 3.0),
        ])
        .unwrap();
        let c = lottery_cost(&lot, 0.0, Side::Left, 0.0);
        assert!((c - (0.4 / 3.0 + 0.4 / 3.0)).abs() < 1e-15);

        let i = inst(0.0, 0.5, &[0.0, 0.2], &[0.8, 1.0]);
        assert!((lottery_max_cost(&lot, &i) - (0.4 / 3.0 + 2.0 * 0.2 / 3.0)).abs() < 1e-15);

        let point = Lottery::point(Edge::raw(0.2, 0.8));
        assert!((lottery_cost(&point, 0.0, Side::Left, 0.0) - 0.4).abs() < 1e-15);
        assert_eq!(
            lottery_max_cost(&point, &i),
            max_cost(Edge::raw(0.2, 0.8), &i)
        );
    }

    #[test]
    fn lottery_rejects_bad_mass() {
        let e = Edge::raw(0.2, 0.8);
        assert!(matches!(
            Lottery::new([(e, 0.4), (e, 0.5)]),
            Err(Error::ProbabilitySum(_))
        ));
        assert!(Lottery::new(std::iter::empty()).is_err());
        assert!(Lottery::new([(e, 1.5), (e, -0.5)]).is_err());
    }

    #[test]
    fn extremes_and_conventions() {
        let e = inst(0.0, 0.5, &[0.0, 0.2], &[0.8, 1.0]).extremes();
        assert_eq!(
            (e.left_min, e.left_max, e.right_min, e.right_max),
            (0.0, 0.2, 0.8, 1.0)
        );
        let e = inst(0.0, 0.5, &[], &[0.8]).extremes();
        assert_eq!(
            (e.left_min, e.left_max, e.right_min, e.right_max),
            (0.0, 0.0, 0.8, 0.8)
        );
        let e = inst(0.0, 0.5, &[0.3], &[]).extremes();
        assert_eq!(
            (e.left_min, e.left_max, e.right_min, e.right_max),
            (0.3, 0.3, 1.0, 1.0)
        );
    }

    #[test]
    fn cut_counts_partition_agents() {
        let i = inst(0.0, 0.5, &[0.0, 0.2, 0.2], &[0.8, 1.0]);
        let c = i.cut_counts(0.2);
        assert_eq!((c.left_at_or_below, c.left_above), (3, 0));
        let c = i.cut_counts(0.8);
        assert_eq!((c.right_below, c.right_at_or_above), (0, 2));
        let c = i.cut_counts(0.9);
        assert_eq!((c.right_below, c.right_at_or_above), (1, 1));
    }

    #[test]
    fn constructor_validation() {
        assert_eq!(
            Instance::new(0.0, 0.5, 0.0, vec![], vec![]),
            Err(Error::NoAgents)
        );
        assert!(matches!(
            Instance::new(1.0, 0.5, 0.0, vec![0.1], vec![]),
            Err(Error::TrivialRegime(_))
        ));
        assert!(matches!(
            Instance::new(0.5, 0.5, 0.0, vec![0.6], vec![]),
            Err(Error::AgentInsideObstacle { .. })
        ));
        assert!(matches!(
            Instance::new(0.5, 0.5, 0.2, vec![], vec![0.6]),
            Err(Error::AgentInsideObstacle { .. })
        ));
        assert!(matches!(
            Instance::new(0.5, 0.5, 0.0, vec![0.3, 0.1], vec![]),
            Err(Error::Unsorted { side: Side::Left })
        ));
        assert!(matches!(
            Instance::new(0.5, 0.5, 0.5, vec![0.1], vec![]),
            Err(Error::ParameterOutOfRange { name: "L", .. })
        ));
        assert!(Edge::new(0.5, 0.5, &Params::new(0.0, 0.5, 0.0).unwrap()).is_ok());
        assert!(Edge::new(0.5, 0.6, &Params::new(0.0, 0.5, 0.2).unwrap()).is_err());
    }
}
