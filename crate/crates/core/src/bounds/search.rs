//! Minimax grid search over the 16 profiles that a deterministic
//! strategyproof mechanism must answer identically.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::sqrt_bound;
use crate::error::{Error, Result};
use crate::mechanisms::opt_max_cost_formula;

/// Offset of `o-` and `o+` from the obstacle.
pub const PROFILE_EPS: f64 = 1e-6;
/// Profiles whose optimum is below this are ignored.
pub const SKIP_EPS: f64 = 1e-8;
/// Subtracted from the grid value to cover discretization error.
pub const SAFE_MARGIN: f64 = 0.003;

/// The 16 profiles `(x_l, x_r, y_l, y_r)` with `x_l in {0, a0}`,
/// `x_r in {a0, o - eps}`, `y_l in {o + eps, b0}`, `y_r in {b0, 1}`.
/// Orderings are not enforced, so a profile may have `x_l > x_r` or
/// `y_l > y_r` near the obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct SixteenProfiles {
    pub o: f64,
    pub a0: f64,
    pub b0: f64,
    pub eps: f64,
    pub profiles: [[f64; 4]; 16],
}

impl SixteenProfiles {
    /// Number of profiles whose extremes are out of order.
    pub fn unordered(&self) -> usize {
        self.profiles
            .iter()
            .filter(|p| p[0] > p[1] || p[2] > p[3])
            .count()
    }
}

pub fn profiles16(o: f64, a0: f64, b0: f64, eps: f64) -> SixteenProfiles {
    let mut profiles = [[0.0; 4]; 16];
    let mut n = 0;
    for xl in [0.0, a0] {
        for xr in [a0, o - eps] {
            for yl in [o + eps, b0] {
                for yr in [b0, 1.0] {
                    profiles[n] = [xl, xr, yl, yr];
                    n += 1;
                }
            }
        }
    }
    SixteenProfiles {
        o,
        a0,
        b0,
        eps,
        profiles,
    }
}

#[inline(always)]
fn mc4(a: f64, b: f64, p: &[f64; 4], k: f64) -> f64 {
    let left = |x: f64| (x - a).abs() + k * (b - a) + (1.0 - b);
    let right = |x: f64| (x - b).abs() + k * (b - a) + a;
    left(p[0]).max(left(p[1])).max(right(p[2])).max(right(p[3]))
}

/// Worst ratio of the fixed edge `(a0, b0)` over the 16 profiles, stopping
/// early once it reaches `cutoff`.
#[inline]
fn f_k_until(o: f64, a0: f64, b0: f64, k: f64, eps: f64, eps_skip: f64, cutoff: f64) -> f64 {
    let mut worst = 0.0f64;
    for xl in [0.0, a0] {
        for xr in [a0, o - eps] {
            for yl in [o + eps, b0] {
                for yr in [b0, 1.0] {
                    let p = [xl, xr, yl, yr];
                    let alg = mc4(a0, b0, &p, k);
                    let (a, b) = opt_max_cost_formula(xl, xr, yl, yr);
                    let opt = mc4(a, b, &p, k);
                    if opt < eps_skip {
                        continue;
                    }
                    worst = worst.max(alg / opt);
                    if worst >= cutoff {
                        return worst;
                    }
                }
            }
        }
    }
    worst
}

/// Worst ratio over the 16 profiles of the edge `(a0, b0)` against each
/// profile's max-cost optimum. Profiles with optimum below `eps_skip` are
/// skipped; with none left the value is 0.
pub fn f_k(o: f64, a0: f64, b0: f64, k: f64, eps: f64, eps_skip: f64) -> f64 {
    f_k_until(o, a0, b0, k, eps, eps_skip, f64::INFINITY)
}

/// Minimum of `f_k` over `a0 = o i / N`, `b0 = o + (1 - o) j / N` for
/// `i, j < N`, with profile offset `eps`. Rows are searched in parallel; the
/// minimum is exact, so the result does not depend on the number of threads.
pub fn inner_min(k: f64, o: f64, grid_n: usize, eps: f64) -> f64 {
    let nf = grid_n as f64;
    let bs: Vec<f64> = (0..grid_n).map(|j| o + (1.0 - o) * j as f64 / nf).collect();
    (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let a0 = o * i as f64 / nf;
            let mut best = f64::INFINITY;
            for &b0 in &bs {
                let r = f_k_until(o, a0, b0, k, eps, SKIP_EPS, best);
                if r < best {
                    best = r;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OMode {
    /// `o = 0.5` only.
    Fixed05,
    /// `o = 0.5 + i / 40` for `i = 0..=20`.
    Sweep,
}

impl OMode {
    pub fn o_values(self) -> Vec<f64> {
        match self {
            OMode::Fixed05 => vec![0.5],
            OMode::Sweep => (0..=20).map(|i| 0.5 + i as f64 / 40.0).collect(),
        }
    }
}

impl fmt::Display for OMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OMode::Fixed05 => "fixed05",
            OMode::Sweep => "sweep",
        })
    }
}

impl FromStr for OMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed05" => Ok(OMode::Fixed05),
            "sweep" => Ok(OMode::Sweep),
            other => Err(Error::InvalidArgument(format!(
                "unknown o mode `{other}` (expected fixed05 or sweep)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRecord {
    pub k: f64,
    pub grid_n: usize,
    pub o_mode: OMode,
    pub o_values: Vec<f64>,
    /// `inner_min` per entry of `o_values`.
    pub per_o: Vec<f64>,
    /// `max` over `o` of `max(inner_min, 2 / (1 + sqrt k))`.
    pub raw: f64,
    /// `max(analytic, raw - 0.003)`.
    pub safe: f64,
    pub analytic: f64,
    /// Grid cells (summed over `o`) whose profiles include out-of-order
    /// extremes.
    pub unordered_cells: usize,
}

fn unordered_cells(o: f64, grid_n: usize, eps: f64) -> usize {
    let nf = grid_n as f64;
    let good_a = (0..grid_n)
        .filter(|&i| o * i as f64 / nf <= o - eps)
        .count();
    let good_b = (0..grid_n)
        .filter(|&j| o + (1.0 - o) * j as f64 / nf >= o + eps)
        .count();
    grid_n * grid_n - good_a * good_b
}

pub fn b_of_k(k: f64, grid_n: usize, o_mode: OMode, eps: f64) -> Result<LowerBoundRecord> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ParameterOutOfRange {
            name: "k",
            value: k,
            expected: "0 <= k < 1",
        });
    }
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size must be at least 2, got {grid_n}"
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::ParameterOutOfRange {
            name: "eps",
            value: eps,
            expected: "0 < eps < 0.5",
        });
    }
    let analytic = sqrt_bound(k);
    let o_values = o_mode.o_values();
    let per_o: Vec<f64> = o_values.iter().map(|&o| inner_min(k, o, grid_n, eps)).collect();
    let raw = per_o.iter().fold(analytic, |acc, &v| acc.max(v.max(analytic)));
    let unordered = o_values.iter().map(|&o| unordered_cells(o, grid_n, eps)).sum();
    Ok(LowerBoundRecord {
        k,
        grid_n,
        o_mode,
        o_values,
        per_o,
        raw,
        safe: analytic.max(raw - SAFE_MARGIN),
        analytic,
        unordered_cells: unordered,
    })
}

pub fn lower_bound_table(
    ks: &[f64],
    grid_n: usize,
    o_mode: OMode,
    eps: f64,
) -> Result<Vec<LowerBoundRecord>> {
    ks.iter().map(|&k| b_of_k(k, grid_n, o_mode, eps)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Straight transcription of the 16-profile ratio, without early exit.
    fn f_k_plain(o: f64, a0: f64, b0: f64, k: f64) -> f64 {
        let cl = |x: f64, a: f64, b: f64| (x - a).abs() + k * (b - a) + (1.0 - b);
        let cr = |x: f64, a: f64, b: f64| (x - b).abs() + k * (b - a) + a;
        let mc = |a: f64, b: f64, p: [f64; 4]| {
            [cl(p[0], a, b), cl(p[1], a, b), cr(p[2], a, b), cr(p[3], a, b)]
                .into_iter()
                .fold(f64::MIN, f64::max)
        };
        let mut worst = 0.0f64;
        for p in profiles16(o, a0, b0, 1e-6).profiles {
            let (a, b) = if 1.0 - p[3] >= p[0] {
                ((p[0] + p[1]) / 2.0, (p[2] - p[0]) / 2.0 + 0.5)
            } else {
                ((p[1] - p[3]) / 2.0 + 0.5, (p[2] + p[3]) / 2.0)
            };
            let opt = mc(a, b, p);
            if opt < 1e-8 {
                continue;
            }
            worst = worst.max(mc(a0, b0, p) / opt);
        }
        worst
    }

    #[test]
    fn profile_counts() {
        let p = profiles16(0.5, 0.25, 0.75, 1e-6);
        assert_eq!(p.profiles.len(), 16);
        let mut distinct = p.profiles.to_vec();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        assert_eq!(distinct.len(), 16);
        assert_eq!(p.unordered(), 0);

        let q = profiles16(0.5, 0.0, 1.0, 1e-6);
        let mut d = q.profiles.to_vec();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d.dedup();
        assert_eq!(d.len(), 4);
        assert!(q.profiles.iter().all(|p| p[0] == 0.0 && p[3] == 1.0));
        assert!(profiles16(0.5, 0.2, 0.5, 1e-6).unordered() > 0);
    }

    #[test]
    fn f_k_matches_plain_enumeration() {
        for (k, a0, b0) in [(0.0, 0.25, 0.75), (0.3, 0.1, 0.9), (0.7, 0.45, 0.55), (0.5, 0.0, 0.5)] {
            let v = f_k(0.5, a0, b0, k, PROFILE_EPS, SKIP_EPS);
            assert_eq!(v, f_k_plain(0.5, a0, b0, k));
        }
        // Values from the reference procedure run separately.
        for (a0, b0, k, want) in [
            (0.25, 0.75, 0.0, 2.0),
            (0.1, 0.9, 0.3, 1.5416657074645783),
            (0.45, 0.55, 0.7, 1.1616766467065869),
            (0.0, 0.5, 0.5, 1.6666664444442962),
        ] {
            let v = f_k(0.5, a0, b0, k, PROFILE_EPS, SKIP_EPS);
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
        // At k = 0, (0, 0.25, 0.75, 0.75) has optimum 0.25 at (0.125, 0.875)
        // while (0.25, 0.75) leaves the agent at 0 with cost 0.5.
        let worst = profiles16(0.5, 0.25, 0.75, PROFILE_EPS)
            .profiles
            .contains(&[0.0, 0.25, 0.75, 0.75]);
        assert!(worst);
    }

    #[test]
    fn f_k_dominates_inner_min_and_optimum() {
        let k = 0.4;
        let m = inner_min(k, 0.5, 60, PROFILE_EPS);
        for (a0, b0) in [(0.1, 0.6), (0.3, 0.9), (0.0, 0.5)] {
            assert!(f_k(0.5, a0, b0, k, PROFILE_EPS, SKIP_EPS) >= m);
        }
        assert!(f_k(0.5, 0.25, 0.75, k, PROFILE_EPS, SKIP_EPS) >= 1.0);
    }

    #[test]
    fn inner_min_matches_exhaustive() {
        for k in [0.0, 0.2, 0.6] {
            let n = 40;
            let mut best = f64::INFINITY;
            for i in 0..n {
                for j in 0..n {
                    let a0 = 0.5 * i as f64 / n as f64;
                    let b0 = 0.5 + 0.5 * j as f64 / n as f64;
                    best = best.min(f_k_plain(0.5, a0, b0, k));
                }
            }
            assert_eq!(inner_min(k, 0.5, n, PROFILE_EPS), best);
        }
    }

    #[test]
    fn record_invariants() {
        let r = b_of_k(0.3, 50, OMode::Fixed05, PROFILE_EPS).unwrap();
        assert!(r.raw >= r.analytic);
        assert_eq!(r.safe, r.analytic.max(r.raw - 0.003));
        assert_eq!(OMode::Sweep.o_values().len(), 21);
        assert_eq!("sweep".parse::<OMode>().unwrap(), OMode::Sweep);
        assert!(b_of_k(1.0, 50, OMode::Fixed05, PROFILE_EPS).is_err());
    }
}
