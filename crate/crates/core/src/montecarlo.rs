//! Round-by-round Monte Carlo simulation of entanglement distribution.
//!
//! A round runs the scheme's `K` trials, latches the successes up to the
//! memory capacity, and lasts `t_round`. Rounds are independent: memories
//! latched but unused in one round are not carried over.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    feasibility_check, round_time, single_trial_success, trial_budget, SchemeConfig, SchemeKind,
};
use crate::error::{Error, Result};
use crate::params::Memory;
use crate::rng::{rng_from_seed, sub_seed, SimRng};

/// How the `K` trials of a round are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sampling {
    /// One `Binomial(K, p)` draw per round.
    #[default]
    #[serde(rename = "binomial")]
    Binomial,
    /// `K` Bernoulli draws per round.
    #[serde(rename = "per-trial")]
    PerTrial,
}

impl Sampling {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "binomial" => Some(Sampling::Binomial),
            "per-trial" | "bernoulli" => Some(Sampling::PerTrial),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McControls {
    pub rounds: u64,
    pub seed: u64,
    pub sampling: Sampling,
}

impl McControls {
    pub fn new(rounds: u64, seed: u64) -> Self {
        Self {
            rounds,
            seed,
            sampling: Sampling::default(),
        }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidParameter {
                field: "rounds",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// Pairs latched over all rounds.
    pub successes: u64,
    /// Simulated time, `rounds * t_round`.
    pub elapsed: f64,
    pub rate: f64,
    /// Standard error of `rate` from the spread of per-round counts.
    pub stderr: f64,
    pub rounds: u64,
    pub seed: u64,
}

/// Per-round sampling state prepared once for a configuration.
#[derive(Debug, Clone)]
pub struct RoundSampler {
    trials: u64,
    p_single: f64,
    capacity: u64,
    t_round: f64,
    binomial: Binomial,
}

impl RoundSampler {
    /// Fails for AFC configurations whose round exceeds the spin coherence.
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.kind.is_afc() {
            let budget = feasibility_check(cfg)?;
            if !budget.is_feasible() {
                return Err(Error::Infeasible {
                    used: budget.used,
                    limit: budget.limit,
                });
            }
        }
        let (trials, _) = trial_budget(cfg)?;
        let p_single = single_trial_success(cfg)?;
        let binomial = Binomial::new(trials, p_single).map_err(|_| Error::InvalidParameter {
            field: "p_single",
            value: p_single,
            reason: "not a valid binomial probability",
        })?;
        Ok(Self {
            trials,
            p_single,
            capacity: cfg.capacity()? as u64,
            t_round: round_time(cfg)?,
            binomial,
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn p_single(&self) -> f64 {
        self.p_single
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn t_round(&self) -> f64 {
        self.t_round
    }

    /// Pairs latched in one round.
    pub fn sample(&self, rng: &mut SimRng, sampling: Sampling) -> u64 {
        let raw = match sampling {
            Sampling::Binomial => self.binomial.sample(rng),
            Sampling::PerTrial => {
                let p = self.p_single;
                (0..self.trials).filter(|_| rng.random::<f64>() < p).count() as u64
            }
        };
        raw.min(self.capacity)
    }
}

/// Pairs latched in a single round of `cfg`.
pub fn simulate_round(cfg: &SchemeConfig, rng: &mut SimRng, sampling: Sampling) -> Result<u64> {
    Ok(RoundSampler::new(cfg)?.sample(rng, sampling))
}

pub fn estimate_rate(cfg: &SchemeConfig, mc: &McControls) -> Result<RateEstimate> {
    mc.validate()?;
    let sampler = RoundSampler::new(cfg)?;
    let mut rng = rng_from_seed(mc.seed);
    let mut sum = 0u64;
    let mut sum_sq = 0f64;
    for _ in 0..mc.rounds {
        let x = sampler.sample(&mut rng, mc.sampling);
        sum += x;
        sum_sq += (x * x) as f64;
    }
    let n = mc.rounds as f64;
    let mean = sum as f64 / n;
    let variance = if mc.rounds > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let elapsed = n * sampler.t_round;
    Ok(RateEstimate {
        successes: sum,
        elapsed,
        rate: sum as f64 / elapsed,
        stderr: (variance / n).sqrt() / sampler.t_round,
        rounds: mc.rounds,
        seed: mc.seed,
    })
}

/// Factorization of one trial into a shared event, one event chain per side,
/// and a central event. A side *latches* when the shared event and its own
/// latch event occur.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TrialModel {
    shared: f64,
    latch: f64,
    relay: f64,
    central: f64,
}

impl TrialModel {
    fn of(cfg: &SchemeConfig) -> Result<Self> {
        let d = cfg.derived()?;
        let transmission = cfg.link.half_link_transmission();
        Ok(match (cfg.kind, &cfg.memory) {
            // photon reaches the analyzer; analyzer heralds
            (SchemeKind::Mm | SchemeKind::Sr, _) => Self {
                shared: 1.0,
                latch: d.p_optical,
                relay: 1.0,
                central: d.p_bsa,
            },
            // source emits; each node's analyzer latches its half
            (SchemeKind::Ms, _) => Self {
                shared: d.p_m,
                latch: d.p_bsa * d.p_optical,
                relay: 1.0,
                central: 1.0,
            },
            // local source fills the AFC; partner photon travels to the analyzer
            (SchemeKind::AfcMm, _) => Self {
                shared: 1.0,
                latch: d.p_m * d.p_memory,
                relay: transmission,
                central: d.p_bsa,
            },
            (SchemeKind::AfcMs, Memory::Afc(a)) => Self {
                shared: d.p_m,
                latch: a.p_pass * d.p_optical,
                relay: 1.0,
                central: 1.0,
            },
            (SchemeKind::AfcMs, Memory::SpinPhoton(_)) => unreachable!("validated"),
        })
    }
}

/// Latch diagnostics of one explicitly simulated round.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatchCounts {
    pub trials: u64,
    pub left: u64,
    pub right: u64,
    /// Latched pairs, capped at capacity.
    pub successes: u64,
}

/// Simulates a round drawing the shared, left, right and central events of
/// every trial separately instead of the joint success probability.
pub fn simulate_round_latches(cfg: &SchemeConfig, rng: &mut SimRng) -> Result<LatchCounts> {
    let sampler = RoundSampler::new(cfg)?;
    let model = TrialModel::of(cfg)?;
    let mut counts = LatchCounts {
        trials: sampler.trials,
        ..Default::default()
    };
    let mut hits = 0u64;
    for _ in 0..sampler.trials {
        let shared = rng.random::<f64>() < model.shared;
        let left = rng.random::<f64>() < model.latch;
        let left_relay = rng.random::<f64>() < model.relay;
        let right = rng.random::<f64>() < model.latch;
        let right_relay = rng.random::<f64>() < model.relay;
        let central = rng.random::<f64>() < model.central;
        counts.left += (shared && left) as u64;
        counts.right += (shared && right) as u64;
        hits += (shared && left && left_relay && right && right_relay && central) as u64;
    }
    counts.successes = hits.min(sampler.capacity);
    Ok(counts)
}

/// One point of a distance × source-efficiency sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub config: SchemeConfig,
    pub seed: u64,
    /// False when an AFC round would outlast the spin coherence.
    pub feasible: bool,
    pub estimate: Option<RateEstimate>,
}

/// Simulates the Cartesian product of `distances_km` (outer) and `p_m_values`
/// (inner). Point `i` uses seed `sub_seed(mc.seed, i)`; points run in
/// parallel and come back in index order.
pub fn sweep(
    template: &SchemeConfig,
    distances_km: &[f64],
    p_m_values: &[f64],
    mc: &McControls,
) -> Result<Vec<SweepPoint>> {
    if distances_km.is_empty() || p_m_values.is_empty() {
        return Err(Error::Config(
            "sweep needs at least one distance and one p_m".into(),
        ));
    }
    mc.validate()?;
    let configs: Vec<SchemeConfig> = distances_km
        .iter()
        .flat_map(|&l| {
            p_m_values
                .iter()
                .map(move |&p_m| template.with_distance(l).with_p_m(p_m))
        })
        .collect();
    configs
        .into_par_iter()
        .enumerate()
        .map(|(index, config)| run_point(index, config, mc))
        .collect()
}

pub(crate) fn run_point(index: usize, config: SchemeConfig, mc: &McControls) -> Result<SweepPoint> {
    let seed = sub_seed(mc.seed, index as u64);
    let feasible = if config.kind.is_afc() {
        feasibility_check(&config)?.is_feasible()
    } else {
        config.validate()?;
        true
    };
    let estimate = if feasible {
        Some(estimate_rate(&config, &McControls { seed, ..*mc })?)
    } else {
        None
    };
    Ok(SweepPoint {
        index,
        config,
        seed,
        feasible,
        estimate,
    })
}
