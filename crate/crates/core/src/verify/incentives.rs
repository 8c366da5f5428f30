use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{agent_cost, Edge, Instance, Outcome, Side};

/// A coalition whose members all strictly gain by misreporting together.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub instance: Instance,
    /// Members as `(side, index within that side)`.
    pub coalition: Vec<(Side, usize)>,
    pub misreports: Vec<f64>,
    /// Truthful cost minus misreport cost, per member.
    pub gains: Vec<f64>,
}

impl Violation {
    pub fn min_gain(&self) -> f64 {
        self.gains.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Settings for [`check_incentives`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveCheck {
    /// 1 checks strategyproofness, 2 and 3 group strategyproofness.
    pub coalition_size: usize,
    /// Misreport grid points per region.
    pub resolution: usize,
    pub tol: f64,
    /// Draw misreports from one grid over all of `[0, 1]` instead of the
    /// member's own region.
    pub cross_region: bool,
    /// Random (coalition, misreport) draws for coalitions of three.
    pub sampled_deviations: usize,
    pub seed: u64,
}

impl Default for IncentiveCheck {
    fn default() -> Self {
        IncentiveCheck {
            coalition_size: 1,
            resolution: 200,
            tol: 1e-9,
            cross_region: false,
            sampled_deviations: 20_000,
            seed: 42,
        }
    }
}

/// Left grid `o i / G` for `i < G`, right grid `1 - (1 - lo) i / G` for
/// `i < G`. Both stay inside their region; the right one ends exactly at 1.
fn report_grid(inst: &Instance, side: Side, g: usize) -> Vec<(f64, Side)> {
    let gf = g as f64;
    match side {
        Side::Left => {
            let o = inst.o();
            (0..g).map(|i| (o * i as f64 / gf, Side::Left)).collect()
        }
        Side::Right => {
            let lo = inst.params().obstacle_end();
            (0..g)
                .rev()
                .map(|i| (1.0 - (1.0 - lo) * i as f64 / gf, Side::Right))
                .collect()
        }
    }
}

/// `i / (G - 1)` for `i < G`, dropping points on the obstacle, each tagged
/// with the region it falls in.
fn unit_grid(inst: &Instance, g: usize) -> Vec<(f64, Side)> {
    let p = inst.params();
    let step = (g.max(2) - 1) as f64;
    (0..g.max(2))
        .filter_map(|i| {
            let x = i as f64 / step;
            p.side_of(x).map(|s| (x, s))
        })
        .collect()
}

struct Search<'a> {
    mechanism: &'a dyn Mechanism,
    inst: &'a Instance,
    agents: Vec<(f64, Side)>,
    truthful: Vec<f64>,
    grids: [Vec<(f64, Side)>; 2],
    scratch: Instance,
    base: [Vec<f64>; 2],
    /// `base` plus every member's report except the last one.
    partial: [Vec<f64>; 2],
    k: f64,
    tol: f64,
}

impl<'a> Search<'a> {
    fn new(mechanism: &'a dyn Mechanism, inst: &'a Instance, opts: &IncentiveCheck) -> Result<Self> {
        let k = inst.k();
        let truth = mechanism.outcome(inst)?;
        let agents: Vec<(f64, Side)> = inst.agents().collect();
        let truthful = agents.iter().map(|&(x, s)| truth.cost(x, s, k)).collect();
        let mut grids = [
            report_grid(inst, Side::Left, opts.resolution),
            report_grid(inst, Side::Right, opts.resolution),
        ];
        if opts.cross_region {
            let all = unit_grid(inst, opts.resolution);
            grids = [all.clone(), all];
        }
        Ok(Search {
            mechanism,
            inst,
            base: [vec![], vec![]],
            agents,
            truthful,
            grids,
            scratch: inst.clone(),
            partial: [vec![], vec![]],
            k,
            tol: opts.tol,
        })
    }

    fn grid(&self, member: usize) -> &[(f64, Side)] {
        match self.agents[member].1 {
            Side::Left => &self.grids[0],
            Side::Right => &self.grids[1],
        }
    }

    /// Truthful locations of everyone outside `members`, per side.
    fn set_members(&mut self, members: &[usize]) {
        for (b, side) in self.base.iter_mut().zip([Side::Left, Side::Right]) {
            b.clear();
            b.extend(
                self.agents
                    .iter()
                    .enumerate()
                    .filter(|&(m, &(_, s))| s == side && !members.contains(&m))
                    .map(|(_, &(x, _))| x),
            );
        }
    }

    fn set_prefix(&mut self, prefix: &[(f64, Side)]) {
        for (i, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            let list = &mut self.partial[i];
            list.clear();
            list.extend_from_slice(&self.base[i]);
            for &(x, s) in prefix {
                if s == side {
                    let at = list.partition_point(|&v| v < x);
                    list.insert(at, x);
                }
            }
        }
    }

    /// Gains of `members` when they report `choice`; `None` unless every
    /// member gains more than the tolerance. All reports but the last must
    /// already be in place through `set_prefix`.
    fn gains(&mut self, members: &[usize], choice: &[(f64, Side)]) -> Result<Option<f64>> {
        let last = choice.len() - 1;
        self.scratch
            .refill_merged(&self.partial[0], &self.partial[1], &choice[last..]);
        let out: Outcome = self.mechanism.outcome(&self.scratch)?;
        let k = self.k;
        let mut min_gain = f64::INFINITY;
        for &m in members {
            let (x, s) = self.agents[m];
            let gain = self.truthful[m] - out.cost(x, s, k);
            if gain <= self.tol {
                return Ok(None);
            }
            min_gain = min_gain.min(gain);
        }
        Ok(Some(min_gain))
    }

    fn violation(&mut self, members: &[usize], choice: &[(f64, Side)]) -> Result<Violation> {
        self.scratch.refill_merged(&self.base[0], &self.base[1], choice);
        let out = self.mechanism.outcome(&self.scratch)?;
        let k = self.inst.k();
        let n1 = self.inst.left().len();
        let coalition = members
            .iter()
            .map(|&m| {
                let side = self.agents[m].1;
                (side, if side == Side::Left { m } else { m - n1 })
            })
            .collect();
        let gains = members
            .iter()
            .map(|&m| {
                let (x, s) = self.agents[m];
                self.truthful[m] - out.cost(x, s, k)
            })
            .collect();
        Ok(Violation {
            instance: self.inst.clone(),
            coalition,
            misreports: choice.iter().map(|r| r.0).collect(),
            gains,
        })
    }

    /// Best joint misreport of one coalition over the full grid product.
    fn coalition(&mut self, members: &[usize]) -> Result<Option<Violation>> {
        self.set_members(members);
        let grids: Vec<Vec<(f64, Side)>> = members.iter().map(|&m| self.grid(m).to_vec()).collect();
        let mut idx = vec![0usize; members.len()];
        let mut choice: Vec<(f64, Side)> = grids.iter().map(|g| g[0]).collect();
        let mut best: Option<(f64, Vec<(f64, Side)>)> = None;
        let last = members.len() - 1;
        self.set_prefix(&choice[..last]);
        loop {
            if let Some(g) = self.gains(members, &choice)? {
                if best.as_ref().is_none_or(|b| g > b.0) {
                    best = Some((g, choice.clone()));
                }
            }
            // Odometer increment, last member fastest.
            let mut pos = members.len();
            loop {
                if pos == 0 {
                    return match best {
                        Some((_, c)) => self.violation(members, &c).map(Some),
                        None => Ok(None),
                    };
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < grids[pos].len() {
                    choice[pos] = grids[pos][idx[pos]];
                    if pos < last {
                        self.set_prefix(&choice[..last]);
                    }
                    break;
                }
                idx[pos] = 0;
                choice[pos] = grids[pos][0];
            }
        }
    }
}

fn combinations(n: usize, size: usize, mut visit: impl FnMut(&[usize]) -> Result<bool>) -> Result<()> {
    if size == 0 || size > n {
        return Ok(());
    }
    let mut c: Vec<usize> = (0..size).collect();
    loop {
        if visit(&c)? {
            return Ok(());
        }
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if c[i] < n - size + i {
                c[i] += 1;
                for j in i + 1..size {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Searches for a coalition of `opts.coalition_size` agents that can all
/// strictly lower their cost by misreporting on the grid.
///
/// Coalitions are visited in lexicographic order over the left agents then
/// the right agents. Sizes 1 and 2 try the full product of grids; size 3
/// draws `opts.sampled_deviations` random coalitions and reports. The first
/// violating coalition is returned with the report that maximizes its
/// smallest gain.
pub fn check_incentives(
    mechanism: &dyn Mechanism,
    inst: &Instance,
    opts: &IncentiveCheck,
) -> Result<Option<Violation>> {
    if !(1..=3).contains(&opts.coalition_size) {
        return Err(Error::InvalidArgument(format!(
            "coalition size must be 1, 2 or 3, got {}",
            opts.coalition_size
        )));
    }
    if opts.resolution < 1 {
        return Err(Error::InvalidArgument("misreport grid must be non-empty".into()));
    }
    let mut search = Search::new(mechanism, inst, opts)?;
    let n = inst.len();
    let mut found = None;
    if opts.coalition_size <= 2 {
        combinations(n, opts.coalition_size, |members| {
            found = search.coalition(members)?;
            Ok(found.is_some())
        })?;
        return Ok(found);
    }
    if n < 3 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.sampled_deviations {
        let mut members = sample_indices(&mut rng, n, 3).into_vec();
        members.sort_unstable();
        let choice: Vec<(f64, Side)> = members
            .iter()
            .map(|&m| {
                let g = search.grid(m);
                g[rng.random_range(0..g.len())]
            })
            .collect();
        search.set_members(&members);
        search.set_prefix(&choice[..2]);
        if search.gains(&members, &choice)?.is_some() {
            return search.violation(&members, &choice).map(Some);
        }
    }
    Ok(None)
}

/// An agent move that changed the output although it did not cross the
/// agent's output coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneViolation {
    pub instance: Instance,
    pub agent: (Side, usize),
    pub moved_to: f64,
    pub before: Edge,
    pub after: Edge,
}

/// Random same-side moves that stay on the same side of the output
/// coordinate (`a` for left agents, `b` for right agents) must leave a
/// generalized median mechanism's output unchanged. Agents sitting exactly
/// on their coordinate are not moved.
pub fn check_monotone(
    mechanism: &dyn Mechanism,
    inst: &Instance,
    moves: usize,
    tol: f64,
    seed: u64,
) -> Result<Option<MonotoneViolation>> {
    let before = mechanism
        .outcome(inst)?
        .as_edge()
        .ok_or_else(|| Error::InvalidArgument("monotonicity needs a deterministic mechanism".into()))?;
    let o = inst.o();
    let lo = inst.params().obstacle_end();
    let n1 = inst.left().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..moves {
        let m = rng.random_range(0..inst.len());
        let (side, idx) = if m < n1 { (Side::Left, m) } else { (Side::Right, m - n1) };
        let x = inst.side(side)[idx];
        let (coord, lower, upper) = match side {
            Side::Left => (before.a, 0.0, o),
            Side::Right => (before.b, lo, 1.0),
        };
        if x == coord {
            continue;
        }
        let (from, to) = if x < coord { (lower, coord) } else { (coord, upper) };
        let target = from + (to - from) * rng.random::<f64>();
        let inside = match side {
            Side::Left => target >= 0.0 && target < o,
            Side::Right => target > lo && target <= 1.0,
        };
        if !inside || target == coord || (x < coord) != (target < coord) {
            continue;
        }
        let (mut left, mut right) = (inst.left().to_vec(), inst.right().to_vec());
        match side {
            Side::Left => left[idx] = target,
            Side::Right => right[idx] = target,
        }
        let moved = Instance::from_unsorted(inst.k(), o, inst.length(), left, right)?;
        let after = mechanism
            .outcome(&moved)?
            .as_edge()
            .expect("deterministic mechanism");
        if (after.a - before.a).abs() > tol || (after.b - before.b).abs() > tol {
            return Ok(Some(MonotoneViolation {
                instance: inst.clone(),
                agent: (side, idx),
                moved_to: target,
                before,
                after,
            }));
        }
    }
    Ok(None)
}

/// An outcome pair where the one closer to the agent's peak on both axes
/// costs more.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakViolation {
    pub agent: (Side, usize),
    pub closer: Edge,
    pub farther: Edge,
    pub closer_cost: f64,
    pub farther_cost: f64,
}

/// Dominance check of two-dimensional single-peakedness. For each agent,
/// draws `samples` pairs `(alpha, beta)` in the edge box with `alpha`
/// between `beta` and the agent's peak on both axes; some pairs move along
/// one axis only. `alpha` must cost no more than `beta`.
pub fn check_single_peaked(inst: &Instance, samples: usize, seed: u64) -> Option<PeakViolation> {
    let k = inst.k();
    let o = inst.o();
    let lo = inst.params().obstacle_end();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n1 = inst.left().len();
    for (m, (x, side)) in inst.agents().enumerate() {
        let peak = match side {
            Side::Left => (x, 1.0),
            Side::Right => (0.0, x),
        };
        for _ in 0..samples {
            let beta = Edge::raw(o * rng.random::<f64>(), lo + (1.0 - lo) * rng.random::<f64>());
            let (mut ta, mut tb) = (rng.random::<f64>(), rng.random::<f64>());
            match rng.random_range(0..4) {
                0 => ta = 0.0,
                1 => tb = 0.0,
                _ => {}
            }
            let alpha = Edge::raw(
                beta.a + ta * (peak.0 - beta.a),
                beta.b + tb * (peak.1 - beta.b),
            );
            let ca = agent_cost(alpha, x, side, k);
            let cb = agent_cost(beta, x, side, k);
            if ca > cb + 1e-12 {
                return Some(PeakViolation {
                    agent: (side, if side == Side::Left { m } else { m - n1 }),
                    closer: alpha,
                    farther: beta,
                    closer_cost: ca,
                    farther_cost: cb,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{NamedMechanism, TwoExtremeVariant};

    fn witness(k: f64) -> Instance {
        Instance::new(k, 0.5, 0.0, vec![0.0, 0.2], vec![0.8, 1.0]).unwrap()
    }

    #[test]
    fn outer_variant_loses_to_cross_region_reports() {
        // The agent at 0.3 reports 1: the edge moves from (0.1, 0.8) to
        // (0.1, 1) and its cost drops from 0.4 to 0.2.
        let inst = Instance::new(0.0, 0.5, 0.0, vec![0.1, 0.3], vec![0.8]).unwrap();
        let outer = NamedMechanism::TwoExtreme(TwoExtremeVariant::Outer);
        let inner = NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner);
        let own = IncentiveCheck::default();
        let cross = IncentiveCheck {
            cross_region: true,
            ..own
        };
        assert!(check_incentives(&outer, &inst, &own).unwrap().is_none());
        assert!(check_incentives(&inner, &inst, &cross).unwrap().is_none());
        let v = check_incentives(&outer, &inst, &cross).unwrap().unwrap();
        assert!(v.misreports[0] > inst.o());
        let moved = Instance::new(0.0, 0.5, 0.0, vec![0.1], vec![0.8, 1.0]).unwrap();
        let e = outer.outcome(&moved).unwrap().as_edge().unwrap();
        assert_eq!(e, Edge::raw(0.1, 1.0));
        assert!((agent_cost(e, 0.3, Side::Left, 0.0) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn optmc_misreport_found() {
        for k in [0.0, 0.5, 0.9] {
            let v = check_incentives(&NamedMechanism::OptMaxCost, &witness(k), &IncentiveCheck::default())
                .unwrap()
                .expect("optmc is manipulable");
            assert_eq!(v.coalition, vec![(Side::Left, 1)]);
            assert_eq!(v.misreports, vec![0.4]);
            assert!((v.gains[0] - (0.1 + 0.1 * k)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_extreme_is_strategyproof_here() {
        let m = NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner);
        for size in [1, 2] {
            let opts = IncentiveCheck {
                coalition_size: size,
                resolution: 40,
                ..IncentiveCheck::default()
            };
            assert_eq!(check_incentives(&m, &witness(0.5), &opts).unwrap(), None);
        }
    }

    #[test]
    fn size_three_sampling() {
        let i = Instance::new(0.3, 0.5, 0.0, vec![0.0, 0.2, 0.3], vec![0.8, 1.0]).unwrap();
        let opts = IncentiveCheck {
            coalition_size: 3,
            sampled_deviations: 2000,
            ..IncentiveCheck::default()
        };
        assert_eq!(check_incentives(&NamedMechanism::OptSocCost, &i, &opts).unwrap(), None);
        assert!(check_incentives(&NamedMechanism::OptMaxCost, &i, &opts).unwrap().is_some());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = vec![];
        combinations(4, 2, |c| {
            seen.push(c.to_vec());
            Ok(false)
        })
        .unwrap();
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
    }

    #[test]
    fn monotone_examples() {
        let m = NamedMechanism::TwoExtreme(TwoExtremeVariant::Inner);
        assert_eq!(check_monotone(&m, &witness(0.3), 500, 1e-12, 1).unwrap(), None);
        assert!(check_monotone(&NamedMechanism::OptMaxCost, &witness(0.5), 500, 1e-12, 1)
            .unwrap()
            .is_some());
        assert!(check_monotone(&NamedMechanism::RandMaxCost, &witness(0.5), 5, 1e-12, 1).is_err());
    }

    #[test]
    fn single_peaked_examples() {
        let i = Instance::new(0.4, 0.5, 0.0, vec![0.1], vec![0.7]).unwrap();
        let (alpha, beta) = (Edge::raw(0.1, 0.95), Edge::raw(0.05, 0.9));
        assert!(agent_cost(alpha, 0.1, Side::Left, 0.4) <= agent_cost(beta, 0.1, Side::Left, 0.4));
        assert_eq!(check_single_peaked(&i, 10_000, 3), None);
    }
}
