//! Physical parameters of the link and the memories, and the probability
//! chain derived from them.
//!
//! All distances are in km, all times in seconds, all efficiencies are
//! probabilities in `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ATTENUATION_LENGTH_KM: f64 = 22.0;
pub const DEFAULT_LIGHT_SPEED_KM_PER_S: f64 = 2.998e5;
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 1.5;
pub const DEFAULT_DETECTOR_EFFICIENCY: f64 = 0.8;

pub(crate) fn check_probability(field: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            reason: "must be a probability in [0, 1]",
        })
    }
}

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn check_count(field: &'static str, value: u32) -> Result<()> {
    if value >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value: value as f64,
            reason: "must be >= 1",
        })
    }
}

/// Fiber link between two adjacent repeater nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Node separation `L`.
    pub distance_km: f64,
    /// Fiber attenuation length `L_att`.
    pub attenuation_length_km: f64,
    pub refractive_index: f64,
    /// Vacuum speed of light.
    pub light_speed_km_per_s: f64,
    /// Single-photon detector efficiency `p_d`.
    pub detector_efficiency: f64,
}

impl LinkParams {
    /// Link of length `distance_km` with the default fiber and detector
    /// constants (22 km attenuation length, n = 1.5, p_d = 0.8).
    pub fn with_distance(distance_km: f64) -> Self {
        Self {
            distance_km,
            attenuation_length_km: DEFAULT_ATTENUATION_LENGTH_KM,
            refractive_index: DEFAULT_REFRACTIVE_INDEX,
            light_speed_km_per_s: DEFAULT_LIGHT_SPEED_KM_PER_S,
            detector_efficiency: DEFAULT_DETECTOR_EFFICIENCY,
        }
    }

    /// `L = 0` is accepted so that degenerate limits can be evaluated; the
    /// closed-form rates reject it separately since they divide by `t_link`.
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_km >= 0.0 && self.distance_km.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "L_km",
                value: self.distance_km,
                reason: "must be finite and >= 0",
            });
        }
        check_positive("L_att_km", self.attenuation_length_km)?;
        if !(self.refractive_index >= 1.0 && self.refractive_index.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "n",
                value: self.refractive_index,
                reason: "must be finite and >= 1",
            });
        }
        check_positive("c_km_per_s", self.light_speed_km_per_s)?;
        check_probability("p_d", self.detector_efficiency)
    }

    /// One-way fiber traversal time `n L / c`.
    pub fn t_link(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.refractive_index * self.distance_km / self.light_speed_km_per_s)
    }

    /// Transmission over half the link, `exp(-L / 2 L_att)`.
    pub fn half_link_transmission(&self) -> f64 {
        (-self.distance_km / (2.0 * self.attenuation_length_km)).exp()
    }

    /// Linear-optics Bell measurement success `p_d^2 / 2`.
    pub fn p_bsa(&self) -> f64 {
        self.detector_efficiency * self.detector_efficiency / 2.0
    }

    /// True when both links describe the same fiber and detectors.
    pub fn same_link(&self, other: &LinkParams) -> bool {
        self == other
    }
}

impl Default for LinkParams {
    fn default() -> Self {
        Self::with_distance(10.0)
    }
}

/// Memory technologies with spin-photon entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MemoryKind {
    #[serde(rename = "ion")]
    TrappedIon,
    #[serde(rename = "NV")]
    NvCenter,
    #[serde(rename = "QD")]
    QuantumDot,
}

impl MemoryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MemoryKind::TrappedIon => "ion",
            MemoryKind::NvCenter => "NV",
            MemoryKind::QuantumDot => "QD",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ion" | "trapped-ion" | "trapped_ion" => Some(MemoryKind::TrappedIon),
            "nv" => Some(MemoryKind::NvCenter),
            "qd" => Some(MemoryKind::QuantumDot),
            _ => None,
        }
    }
}

/// Memory emitting photons entangled with a spin qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorySpec {
    pub kind: MemoryKind,
    /// Time per trial, `t_clock`.
    pub t_clock: f64,
    pub emission_fraction: f64,
    pub collection_efficiency: f64,
    /// Memories per node, `N`.
    pub count: u32,
}

impl MemorySpec {
    /// Table values for each memory technology with `count` memories per node.
    pub fn preset(kind: MemoryKind, count: u32) -> Self {
        let (t_clock, emission_fraction, collection_efficiency) = match kind {
            MemoryKind::TrappedIon => (1e-6, 1.00, 0.05),
            MemoryKind::NvCenter => (100e-9, 0.50, 0.50),
            MemoryKind::QuantumDot => (10e-9, 0.90, 0.50),
        };
        Self {
            kind,
            t_clock,
            emission_fraction,
            collection_efficiency,
            count,
        }
    }

    pub fn trapped_ion() -> Self {
        Self::preset(MemoryKind::TrappedIon, 3)
    }

    pub fn nv_center() -> Self {
        Self::preset(MemoryKind::NvCenter, 3)
    }

    pub fn quantum_dot() -> Self {
        Self::preset(MemoryKind::QuantumDot, 3)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("memory.t_clock_s", self.t_clock)?;
        check_probability("memory.emission_fraction", self.emission_fraction)?;
        check_probability("memory.collection_efficiency", self.collection_efficiency)?;
        check_count("memory.N", self.count)
    }

    /// Probability that a photon is emitted and coupled into the fiber.
    pub fn p_memory(&self) -> f64 {
        self.emission_fraction * self.collection_efficiency
    }
}

/// Absorptive atomic-frequency-comb memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfcSpec {
    /// Temporal modes, `N_AFC`.
    pub modes: u32,
    /// Rephasing period `2π/Δ`.
    pub t_rephase: f64,
    pub t_spin_coherence: f64,
    /// Absorption efficiency `p_AFC`.
    pub p_afc: f64,
    /// Non-destructive photon detector transmission `p_pass`.
    pub p_pass: f64,
    /// Time per trial, `t'_clock`.
    pub t_clock: f64,
}

impl AfcSpec {
    /// Eu:YSO figures: 100 modes, 51 µs rephasing, 1 ms spin coherence,
    /// 53 % efficiency, p_pass = 0.9, 10 ns trials.
    pub fn realistic() -> Self {
        Self {
            modes: 100,
            t_rephase: 51e-6,
            t_spin_coherence: 1e-3,
            p_afc: 0.53,
            p_pass: 0.9,
            t_clock: 10e-9,
        }
    }

    /// 1060 modes with unit absorption efficiency.
    pub fn optimistic() -> Self {
        Self {
            modes: 1060,
            p_afc: 1.0,
            ..Self::realistic()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_count("afc.N_AFC", self.modes)?;
        check_positive("afc.t_rephase_s", self.t_rephase)?;
        check_positive("afc.t_spin_coherence_s", self.t_spin_coherence)?;
        if self.t_spin_coherence < self.t_rephase {
            return Err(Error::InvalidParameter {
                field: "afc.t_spin_coherence_s",
                value: self.t_spin_coherence,
                reason: "must be >= the rephasing period",
            });
        }
        check_probability("afc.p_AFC", self.p_afc)?;
        check_probability("afc.p_pass", self.p_pass)?;
        check_positive("afc.t_clock_s", self.t_clock)
    }
}

/// Memory hardware inside each node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Memory {
    SpinPhoton(MemorySpec),
    Afc(AfcSpec),
}

impl Memory {
    pub fn validate(&self) -> Result<()> {
        match self {
            Memory::SpinPhoton(m) => m.validate(),
            Memory::Afc(a) => a.validate(),
        }
    }
}

/// Probabilities shared by every scheme at one link length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedProbs {
    pub p_bsa: f64,
    /// Emission-and-coupling probability. For AFC memories this holds `p_AFC`,
    /// the efficiency at the memory end of the fiber.
    pub p_memory: f64,
    /// `p_memory * exp(-L / 2 L_att)`.
    pub p_optical: f64,
    /// `p_AFC * exp(-L / 2 L_att)`; `None` for spin-photon memories.
    pub p_optical_prime: Option<f64>,
    /// Pair generation probability of the entangled photon source.
    pub p_m: f64,
}

pub fn derive_probs(link: &LinkParams, memory: &Memory, p_m: f64) -> Result<DerivedProbs> {
    link.validate()?;
    memory.validate()?;
    check_probability("p_m", p_m)?;
    let transmission = link.half_link_transmission();
    let (p_memory, p_optical_prime) = match memory {
        Memory::SpinPhoton(m) => (m.p_memory(), None),
        Memory::Afc(a) => (a.p_afc, Some(a.p_afc * transmission)),
    };
    Ok(DerivedProbs {
        p_bsa: link.p_bsa(),
        p_memory,
        p_optical: p_memory * transmission,
        p_optical_prime,
        p_m,
    })
}
