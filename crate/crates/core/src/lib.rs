//! Strategyproof mechanisms for placing a pathway across an obstacle on the
//! unit interval, with brute-force oracles, incentive fuzzers and the
//! approximation-ratio curves and lower-bound search that go with them.

pub mod bounds;
pub mod error;
pub mod mechanisms;
pub mod model;
pub mod verify;

pub use error::{Error, Result};
pub use mechanisms::{Mechanism, NamedMechanism, PhantomProfile, PhantomRule, TwoExtremeVariant};
pub use model::{
    agent_cost, lottery_cost, lottery_max_cost, lottery_social_cost, max_cost, parse_instance,
    serialize_instance, social_cost, CutCounts, Edge, Extremes, Instance, Lottery, Outcome,
    Params, Side,
};
