//! Closed-form single-trial probabilities, trial budgets, round times and
//! entanglement distribution rates for the five node arrangements.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    check_probability, derive_probs, AfcSpec, DerivedProbs, LinkParams, Memory, MemorySpec,
};

/// Node arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Meet-in-the-middle: Bell-state analyzer at the midpoint.
    #[serde(rename = "MM")]
    Mm,
    /// Sender-receiver: analyzer inside the receiving node.
    #[serde(rename = "SR")]
    Sr,
    /// Midpoint source: pair source at the midpoint, analyzers in the nodes.
    #[serde(rename = "MS")]
    Ms,
    /// Meet-in-the-middle with a local pair source feeding an AFC memory.
    #[serde(rename = "AFC-MM")]
    AfcMm,
    /// Midpoint source with heralded AFC absorption.
    #[serde(rename = "AFC-MS")]
    AfcMs,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Mm,
        SchemeKind::Sr,
        SchemeKind::Ms,
        SchemeKind::AfcMm,
        SchemeKind::AfcMs,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Mm => "MM",
            SchemeKind::Sr => "SR",
            SchemeKind::Ms => "MS",
            SchemeKind::AfcMm => "AFC-MM",
            SchemeKind::AfcMs => "AFC-MS",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        Self::ALL.into_iter().find(|k| k.as_str() == norm)
    }

    pub fn is_afc(&self) -> bool {
        matches!(self, SchemeKind::AfcMm | SchemeKind::AfcMs)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Denominator convention of the midpoint-source rate forms.
///
/// The standard MS and AFC-MS closed forms divide by `2 t_link`, which does
/// not follow from `K p / t_round`. `Double` reproduces that form,
/// `Single` the direct `K p / t_link` derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MsSyncFactor {
    Single,
    #[default]
    Double,
}

impl MsSyncFactor {
    pub fn value(&self) -> f64 {
        match self {
            MsSyncFactor::Single => 1.0,
            MsSyncFactor::Double => 2.0,
        }
    }

    pub fn from_value(v: u32) -> Option<Self> {
        match v {
            1 => Some(MsSyncFactor::Single),
            2 => Some(MsSyncFactor::Double),
            _ => None,
        }
    }
}

/// One evaluation point: arrangement, link, memory hardware and source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub link: LinkParams,
    pub memory: Memory,
    /// Pair generation probability of the entangled photon source.
    pub p_m: f64,
    /// Sender-side memories `N_A` for SR; defaults to `N`. The receiver holds
    /// `N_B = 2N - N_A`.
    pub sender_memories: Option<u32>,
    pub ms_sync_factor: MsSyncFactor,
}

impl SchemeConfig {
    pub fn new(kind: SchemeKind, link: LinkParams, memory: Memory, p_m: f64) -> Self {
        Self {
            kind,
            link,
            memory,
            p_m,
            sender_memories: None,
            ms_sync_factor: MsSyncFactor::default(),
        }
    }

    pub fn spin(kind: SchemeKind, link: LinkParams, memory: MemorySpec, p_m: f64) -> Self {
        Self::new(kind, link, Memory::SpinPhoton(memory), p_m)
    }

    pub fn afc(kind: SchemeKind, link: LinkParams, afc: AfcSpec, p_m: f64) -> Self {
        Self::new(kind, link, Memory::Afc(afc), p_m)
    }

    pub fn with_sender_memories(mut self, n_a: u32) -> Self {
        self.sender_memories = Some(n_a);
        self
    }

    pub fn with_ms_sync_factor(mut self, factor: MsSyncFactor) -> Self {
        self.ms_sync_factor = factor;
        self
    }

    pub fn with_distance(mut self, distance_km: f64) -> Self {
        self.link.distance_km = distance_km;
        self
    }

    pub fn with_p_m(mut self, p_m: f64) -> Self {
        self.p_m = p_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.memory.validate()?;
        check_probability("p_m", self.p_m)?;
        match (self.kind.is_afc(), &self.memory) {
            (true, Memory::SpinPhoton(_)) => {
                return Err(Error::MemoryMismatch {
                    scheme: self.kind.as_str(),
                    expected: "AFC",
                })
            }
            (false, Memory::Afc(_)) => {
                return Err(Error::MemoryMismatch {
                    scheme: self.kind.as_str(),
                    expected: "spin-photon",
                })
            }
            _ => {}
        }
        if self.kind == SchemeKind::Sr {
            let n = self.spin_memory()?.count;
            let n_a = self.sender_memories.unwrap_or(n);
            if n_a < 1 || n_a >= 2 * n {
                return Err(Error::InvalidParameter {
                    field: "N_A",
                    value: n_a as f64,
                    reason: "sender memories must satisfy 1 <= N_A <= 2N - 1",
                });
            }
        }
        Ok(())
    }

    pub fn derived(&self) -> Result<DerivedProbs> {
        self.validate()?;
        derive_probs(&self.link, &self.memory, self.p_m)
    }

    fn spin_memory(&self) -> Result<&MemorySpec> {
        match &self.memory {
            Memory::SpinPhoton(m) => Ok(m),
            Memory::Afc(_) => Err(Error::MemoryMismatch {
                scheme: self.kind.as_str(),
                expected: "spin-photon",
            }),
        }
    }

    fn afc_memory(&self) -> Result<&AfcSpec> {
        match &self.memory {
            Memory::Afc(a) => Ok(a),
            Memory::SpinPhoton(_) => Err(Error::MemoryMismatch {
                scheme: self.kind.as_str(),
                expected: "AFC",
            }),
        }
    }

    /// `N_A` for SR (defaulting to `N`).
    pub fn sender_count(&self) -> Result<u32> {
        let m = self.spin_memory()?;
        Ok(self.sender_memories.unwrap_or(m.count))
    }

    /// Maximum number of pairs that can be latched in one round.
    pub fn capacity(&self) -> Result<u32> {
        self.validate()?;
        match self.kind {
            SchemeKind::Sr => self.sender_count(),
            SchemeKind::Mm | SchemeKind::Ms => Ok(self.spin_memory()?.count),
            SchemeKind::AfcMm | SchemeKind::AfcMs => Ok(self.afc_memory()?.modes),
        }
    }

    /// Time per trial: `t_clock` of the spin memory or `t'_clock` of the AFC.
    pub fn trial_time(&self) -> Result<f64> {
        Ok(match &self.memory {
            Memory::SpinPhoton(m) => m.t_clock,
            Memory::Afc(a) => a.t_clock,
        })
    }
}

/// Ceiling that absorbs floating-point noise on exact integers, so that
/// `51 µs / 10 ns` gives 5100 rather than 5101.
pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Probability that entanglement is shared in a single trial.
pub fn single_trial_success(cfg: &SchemeConfig) -> Result<f64> {
    let d = cfg.derived()?;
    Ok(match cfg.kind {
        SchemeKind::Mm | SchemeKind::Sr => d.p_bsa * d.p_optical * d.p_optical,
        SchemeKind::Ms => {
            let side = d.p_bsa * d.p_optical;
            d.p_m * side * side
        }
        SchemeKind::AfcMm => {
            let side = d.p_m * d.p_optical;
            d.p_bsa * side * side
        }
        SchemeKind::AfcMs => {
            let side = cfg.afc_memory()?.p_pass * d.p_optical;
            d.p_m * side * side
        }
    })
}

/// Probability that one side latches a qubit in one trial. Only defined for
/// the schemes whose trial budget is set by latching (MS, AFC-MM, AFC-MS).
pub fn latch_probability(cfg: &SchemeConfig) -> Result<Option<f64>> {
    let d = cfg.derived()?;
    Ok(match cfg.kind {
        SchemeKind::Mm | SchemeKind::Sr => None,
        SchemeKind::Ms => Some(d.p_m * d.p_bsa * d.p_optical),
        SchemeKind::AfcMm => Some(d.p_m * d.p_memory),
        SchemeKind::AfcMs => Some(d.p_m * cfg.afc_memory()?.p_pass * d.p_optical),
    })
}

/// Trials that fit in one rephasing period, `⌈(2π/Δ) / t'_clock⌉`.
pub fn rephasing_cap(afc: &AfcSpec) -> u64 {
    ceil_tolerant(afc.t_rephase / afc.t_clock) as u64
}

/// Trial budget `K` and whether the AFC rephasing cap replaced it.
pub fn trial_budget(cfg: &SchemeConfig) -> Result<(u64, bool)> {
    cfg.validate()?;
    match cfg.kind {
        SchemeKind::Mm => Ok((cfg.spin_memory()?.count as u64, false)),
        SchemeKind::Sr => Ok((cfg.sender_count()? as u64, false)),
        SchemeKind::Ms | SchemeKind::AfcMm | SchemeKind::AfcMs => {
            let latch = latch_probability(cfg)?.expect("latch-limited scheme");
            let target = match &cfg.memory {
                Memory::SpinPhoton(m) => m.count,
                Memory::Afc(a) => a.modes,
            } as f64;
            let k = ceil_tolerant(target / latch);
            if !k.is_finite() || k > u64::MAX as f64 {
                return Err(Error::UnboundedTrialBudget);
            }
            let k = k as u64;
            if let Memory::Afc(a) = &cfg.memory {
                if k as f64 * a.t_clock > a.t_rephase {
                    return Ok((rephasing_cap(a), true));
                }
            }
            Ok((k, false))
        }
    }
}

/// Trials per synchronization round, `K`.
pub fn trials_per_round(cfg: &SchemeConfig) -> Result<u64> {
    trial_budget(cfg).map(|(k, _)| k)
}

/// Duration of one synchronization round.
pub fn round_time(cfg: &SchemeConfig) -> Result<f64> {
    let t_link = cfg.link.t_link()?;
    let k = trials_per_round(cfg)? as f64;
    let t_trial = cfg.trial_time()?;
    Ok(match cfg.kind {
        SchemeKind::Sr => 2.0 * t_link + k * t_trial,
        _ => t_link + k * t_trial,
    })
}

fn require_link(cfg: &SchemeConfig) -> Result<f64> {
    let t_link = cfg.link.t_link()?;
    if t_link > 0.0 {
        Ok(t_link)
    } else {
        Err(Error::InvalidParameter {
            field: "L_km",
            value: cfg.link.distance_km,
            reason: "closed-form rates need L > 0",
        })
    }
}

/// Closed-form entanglement distribution rate (pairs per second), valid when
/// the trial phase is short against `t_link`. AFC schemes whose budget hits
/// the rephasing cap fall back to `K p / t_round`.
pub fn analytic_rate(cfg: &SchemeConfig) -> Result<f64> {
    let t_link = require_link(cfg)?;
    let d = cfg.derived()?;
    let sync = cfg.ms_sync_factor.value();
    let transmission = cfg.link.half_link_transmission();
    match cfg.kind {
        SchemeKind::Mm => {
            let n = cfg.spin_memory()?.count as f64;
            Ok(n * d.p_bsa * d.p_optical * d.p_optical / t_link)
        }
        SchemeKind::Sr => {
            let n_a = cfg.sender_count()? as f64;
            Ok(n_a * d.p_bsa * d.p_optical * d.p_optical / (2.0 * t_link))
        }
        SchemeKind::Ms => {
            let n = cfg.spin_memory()?.count as f64;
            Ok(n * d.p_bsa * d.p_optical / (sync * t_link))
        }
        SchemeKind::AfcMm | SchemeKind::AfcMs => {
            let (k, capped) = trial_budget(cfg)?;
            if capped {
                // AFC-MS keeps its sync factor so the capped branch never
                // exceeds the uncapped closed form.
                let f = if cfg.kind == SchemeKind::AfcMs {
                    sync
                } else {
                    1.0
                };
                return Ok(k as f64 * single_trial_success(cfg)? / (f * round_time(cfg)?));
            }
            let a = cfg.afc_memory()?;
            let modes = a.modes as f64;
            if cfg.kind == SchemeKind::AfcMm {
                Ok(modes * d.p_bsa * d.p_m * a.p_afc * transmission * transmission / t_link)
            } else {
                Ok(modes * a.p_pass * a.p_afc * transmission / (sync * t_link))
            }
        }
    }
}

/// `E[min(X, capacity)]` for `X ~ Binomial(trials, p)`.
pub fn expected_latched(trials: u64, p: f64, capacity: u64) -> f64 {
    if trials <= capacity {
        return trials as f64 * p;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return capacity as f64;
    }
    // cap - Σ_{k<cap} (cap - k) P(X = k), pmf walked in log space
    let n = trials as f64;
    let log_odds = (p / (1.0 - p)).ln();
    let mut log_pmf = n * (-p).ln_1p();
    let mut deficit = 0.0;
    for k in 0..capacity {
        deficit += (capacity - k) as f64 * log_pmf.exp();
        let kf = k as f64;
        log_pmf += ((n - kf) / (kf + 1.0)).ln() + log_odds;
    }
    capacity as f64 - deficit
}

/// Expected latched pairs per round under the round model: `K` trials,
/// successes capped at the memory capacity.
pub fn expected_successes_per_round(cfg: &SchemeConfig) -> Result<f64> {
    let k = trials_per_round(cfg)?;
    let p = single_trial_success(cfg)?;
    let cap = cfg.capacity()? as u64;
    Ok(expected_latched(k, p, cap))
}

/// Rate of the round model without the short-trial-phase approximation:
/// expected latched pairs per round over the full round time. This is the
/// value a Monte Carlo estimate converges to.
pub fn exact_rate(cfg: &SchemeConfig) -> Result<f64> {
    Ok(expected_successes_per_round(cfg)? / round_time(cfg)?)
}

/// Everything the closed-form model says about one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRates {
    pub p_single: f64,
    pub t_round: f64,
    pub trials: u64,
    /// True when the AFC rephasing period limited `trials`.
    pub capped: bool,
    pub rate: f64,
    pub exact_rate: f64,
}

pub fn evaluate(cfg: &SchemeConfig) -> Result<AnalyticRates> {
    let (trials, capped) = trial_budget(cfg)?;
    Ok(AnalyticRates {
        p_single: single_trial_success(cfg)?,
        t_round: round_time(cfg)?,
        trials,
        capped,
        rate: analytic_rate(cfg)?,
        exact_rate: exact_rate(cfg)?,
    })
}

/// Ratio of the closed-form rates `R(a) / R(b)` over a shared link.
pub fn rate_ratio(a: &SchemeConfig, b: &SchemeConfig) -> Result<f64> {
    if !a.link.same_link(&b.link) {
        return Err(Error::LinkMismatch);
    }
    let denom = analytic_rate(b)?;
    if denom == 0.0 {
        return Err(Error::ZeroRate);
    }
    Ok(analytic_rate(a)? / denom)
}

/// Closed-form ratios between pairs of schemes. Each takes the numerator and
/// denominator configurations and evaluates the reduced expression directly;
/// they agree with [`rate_ratio`] whenever the AFC budgets are uncapped.
pub mod ratios {
    use super::*;

    fn check_kinds(
        num: &SchemeConfig,
        den: &SchemeConfig,
        want: (SchemeKind, SchemeKind),
    ) -> Result<()> {
        if (num.kind, den.kind) != want {
            return Err(Error::Config(format!(
                "ratio expects {} / {}, got {} / {}",
                want.0, want.1, num.kind, den.kind
            )));
        }
        if !num.link.same_link(&den.link) {
            return Err(Error::LinkMismatch);
        }
        num.validate()?;
        den.validate()
    }

    /// `R^MS / R^MM = 1 / (f p_memory exp(-L/2L_att))`; both configs must use
    /// the same spin memory.
    pub fn ms_over_mm(ms: &SchemeConfig, mm: &SchemeConfig) -> Result<f64> {
        check_kinds(ms, mm, (SchemeKind::Ms, SchemeKind::Mm))?;
        if ms.memory != mm.memory {
            return Err(Error::Config("MS/MM ratio needs identical memories".into()));
        }
        let p_memory = ms.spin_memory()?.p_memory();
        let f = ms.ms_sync_factor.value();
        Ok(1.0 / (f * p_memory * ms.link.half_link_transmission()))
    }

    /// `R^MS' / R^MM' = p_pass / (f p_BSA p_m exp(-L/2L_att))`; both configs
    /// must share memory and source.
    pub fn afc_ms_over_afc_mm(afc_ms: &SchemeConfig, afc_mm: &SchemeConfig) -> Result<f64> {
        check_kinds(afc_ms, afc_mm, (SchemeKind::AfcMs, SchemeKind::AfcMm))?;
        if afc_ms.memory != afc_mm.memory || afc_ms.p_m != afc_mm.p_m {
            return Err(Error::Config(
                "AFC-MS/AFC-MM ratio needs identical memory and p_m".into(),
            ));
        }
        let a = afc_ms.afc_memory()?;
        let f = afc_ms.ms_sync_factor.value();
        Ok(
            a.p_pass
                / (f * afc_ms.link.p_bsa() * afc_ms.p_m * afc_ms.link.half_link_transmission()),
        )
    }

    /// `R^MM' / R^MS = f N_AFC p_m p_AFC exp(-L/2L_att) / (N p_memory)`.
    pub fn afc_mm_over_ms(afc_mm: &SchemeConfig, ms: &SchemeConfig) -> Result<f64> {
        check_kinds(afc_mm, ms, (SchemeKind::AfcMm, SchemeKind::Ms))?;
        let a = afc_mm.afc_memory()?;
        let m = ms.spin_memory()?;
        let f = ms.ms_sync_factor.value();
        Ok(
            f * a.modes as f64 * afc_mm.p_m * a.p_afc * afc_mm.link.half_link_transmission()
                / (m.count as f64 * m.p_memory()),
        )
    }

    /// `R^MS' / R^MS = N_AFC p_AFC p_pass / (N p_BSA p_memory)`, scaled by the
    /// ratio of the two sync factors when they differ.
    pub fn afc_ms_over_ms(afc_ms: &SchemeConfig, ms: &SchemeConfig) -> Result<f64> {
        check_kinds(afc_ms, ms, (SchemeKind::AfcMs, SchemeKind::Ms))?;
        let a = afc_ms.afc_memory()?;
        let m = ms.spin_memory()?;
        let sync = ms.ms_sync_factor.value() / afc_ms.ms_sync_factor.value();
        Ok(sync * a.modes as f64 * a.p_afc * a.p_pass
            / (m.count as f64 * ms.link.p_bsa() * m.p_memory()))
    }
}

/// Spin-coherence budget of one AFC round: rephasing plus fiber flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceBudget {
    pub used: f64,
    pub limit: f64,
}

impl CoherenceBudget {
    pub fn is_feasible(&self) -> bool {
        self.used <= self.limit
    }
}

/// Checks `t_rephase + t_link <= t_spin_coherence`. The budget is returned
/// whether or not it fits.
pub fn feasibility_check(cfg: &SchemeConfig) -> Result<CoherenceBudget> {
    if !cfg.kind.is_afc() {
        return Err(Error::NotApplicable(cfg.kind.as_str()));
    }
    cfg.validate()?;
    let a = cfg.afc_memory()?;
    Ok(CoherenceBudget {
        used: a.t_rephase + cfg.link.t_link()?,
        limit: a.t_spin_coherence,
    })
}
