use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, Params};

/// How the sampler picks the obstacle length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthMode {
    /// Always `L = 0`.
    Zero,
    /// `L = 0` half of the time, otherwise uniform in `[0, (1 - o) / 2]`.
    Mixed,
    /// A fixed `L`; `o` is then scaled into `(0.1 (1 - L), 0.9 (1 - L))` so
    /// both regions stay non-empty.
    Fixed(f64),
}

/// Seeded generator of random instances.
///
/// Instance `i` is drawn from its own ChaCha stream, so it depends only on
/// the seed and `i` and never on how work is split between threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSampler {
    pub seed: u64,
    /// Fixed `k`, or `None` for uniform in `[0, 1)`.
    pub k: Option<f64>,
    pub length: LengthMode,
    pub max_agents: usize,
    /// At least one agent on each side.
    pub two_sided: bool,
}

impl InstanceSampler {
    pub fn new(seed: u64) -> Self {
        InstanceSampler {
            seed,
            k: None,
            length: LengthMode::Mixed,
            max_agents: 8,
            two_sided: false,
        }
    }

    pub fn two_sided(mut self) -> Self {
        self.two_sided = true;
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_length(mut self, length: LengthMode) -> Self {
        self.length = length;
        self
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    pub fn instance(&self, index: u64) -> Instance {
        let mut rng = self.rng(index);
        let k = self.k.unwrap_or_else(|| rng.random::<f64>());
        let mut o = 0.1 + 0.8 * rng.random::<f64>();
        let length = match self.length {
            LengthMode::Zero => 0.0,
            LengthMode::Mixed => {
                if rng.random_bool(0.5) {
                    0.0
                } else {
                    rng.random::<f64>() * (1.0 - o) / 2.0
                }
            }
            LengthMode::Fixed(l) => {
                o *= 1.0 - l;
                l
            }
        };
        let params = Params::new(k, o, length).expect("sampled parameters are in range");
        let lo = params.obstacle_end();
        let min = if self.two_sided { 2 } else { 1 };
        let n = rng.random_range(min..=self.max_agents.max(min));
        let (mut left, mut right) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let go_left = match (self.two_sided, i) {
                (true, 0) => true,
                (true, 1) => false,
                _ => rng.random_bool(0.5),
            };
            if go_left {
                left.push(draw(&mut rng, |u| o * u, |x| x < o));
            } else {
                right.push(draw(&mut rng, |u| 1.0 - (1.0 - lo) * u, |y| y > lo));
            }
        }
        left.sort_by(f64::total_cmp);
        right.sort_by(f64::total_cmp);
        Instance::with_params(params, left, right).expect("sampled locations are valid")
    }

    pub fn instances(&self, count: u64) -> impl Iterator<Item = Instance> + '_ {
        (0..count).map(move |i| self.instance(i))
    }
}

fn draw(rng: &mut ChaCha8Rng, map: impl Fn(f64) -> f64, ok: impl Fn(f64) -> bool) -> f64 {
    loop {
        let v = map(rng.random::<f64>());
        if ok(v) {
            return v;
        }
    }
}
