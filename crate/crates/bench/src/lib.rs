//! Shared inputs for the benchmarks.

use detour_core::verify::{InstanceSampler, LengthMode};
use detour_core::{Instance, NamedMechanism};

pub const SEED: u64 = 7;

/// `count` point-obstacle instances, so every mechanism accepts them.
pub fn corpus(count: u64) -> Vec<Instance> {
    InstanceSampler::new(SEED)
        .with_length(LengthMode::Zero)
        .instances(count)
        .collect()
}

/// An instance with exactly `per_side` agents on each side.
pub fn balanced(per_side: usize) -> Instance {
    let n = per_side as f64 + 1.0;
    let left = (0..per_side).map(|i| 0.5 * i as f64 / n).collect();
    let right = (0..per_side).map(|i| 1.0 - 0.5 * i as f64 / n).rev().collect();
    Instance::new(0.3, 0.5, 0.0, left, right).expect("balanced instance is valid")
}

pub fn mechanisms() -> Vec<NamedMechanism> {
    [
        "optsc",
        "optmc",
        "twoextreme:inner",
        "restrict",
        "randmc",
        "randub",
        "median",
        "genmedian:restrict",
    ]
    .iter()
    .map(|n| n.parse().expect("known mechanism"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_valid() {
        assert_eq!(corpus(10).len(), 10);
        let b = balanced(4);
        assert_eq!((b.left().len(), b.right().len()), (4, 4));
        assert_eq!(mechanisms().len(), 8);
    }
}
