//! Entanglement distribution rates between two adjacent quantum repeater
//! nodes.
//!
//! Five node arrangements are modeled: meet-in-the-middle (MM),
//! sender-receiver (SR) and midpoint source (MS) with spin-photon memories,
//! and the AFC-MM / AFC-MS variants built on an absorptive atomic frequency
//! comb memory with temporal multimode storage. For each, [`analytic`] gives
//! the closed-form rates and [`montecarlo`] a seeded round-level simulation.
//! [`swapping`] covers the heralding penalty on entanglement swapping and
//! [`harness`] the figure presets and CSV/JSON output used by the CLI.

pub mod analytic;
pub mod error;
pub mod harness;
pub mod montecarlo;
pub mod params;
pub mod rng;
pub mod swapping;

pub use analytic::{
    analytic_rate, exact_rate, feasibility_check, rate_ratio, round_time, single_trial_success,
    trials_per_round, AnalyticRates, CoherenceBudget, MsSyncFactor, SchemeConfig, SchemeKind,
};
pub use error::{Error, Result};
pub use montecarlo::{estimate_rate, simulate_round, sweep, McControls, RateEstimate, Sampling};
pub use params::{derive_probs, AfcSpec, DerivedProbs, LinkParams, Memory, MemoryKind, MemorySpec};
pub use swapping::{chain_factor, swap_budget, Heralding, SwapBudget, SwapParams};
