//! Expected throughput of entanglement swapping between two AFC-MS links
//! under perfect and imperfect (weak) heralding.

use serde::{Deserialize, Serialize};

use crate::analytic::ceil_tolerant;
use crate::error::{Error, Result};
use crate::params::{check_count, check_probability};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapParams {
    /// Pairs shared on each elementary link, `J`.
    pub pairs: u32,
    /// Re-emission probability of the AFC.
    pub p_emit: f64,
    pub p_bsa: f64,
    pub p_pass: f64,
    pub p_afc: f64,
    /// Elementary links joined, `i`.
    pub links: u32,
}

impl SwapParams {
    /// Realistic AFC values with `p_emit` defaulting to `p_AFC`.
    pub fn realistic(pairs: u32, links: u32) -> Self {
        Self {
            pairs,
            p_emit: 0.53,
            p_bsa: 0.32,
            p_pass: 0.9,
            p_afc: 0.53,
            links,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_count("J", self.pairs)?;
        check_count("i", self.links)?;
        check_probability("p_emit", self.p_emit)?;
        check_probability("p_BSA", self.p_bsa)?;
        check_probability("p_pass", self.p_pass)?;
        check_probability("p_AFC", self.p_afc)
    }

    fn heralding_efficiency(&self) -> f64 {
        self.p_pass * self.p_afc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heralding {
    #[serde(rename = "perfect")]
    Perfect,
    #[serde(rename = "imperfect")]
    Imperfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapBudget {
    /// Swap attempts; real-valued, see [`SwapBudget::trials_ceil`].
    pub trials: f64,
    pub p_swap: f64,
    pub expected_successes: f64,
}

impl SwapBudget {
    /// Whole number of attempts covering `trials`.
    pub fn trials_ceil(&self) -> u64 {
        ceil_tolerant(self.trials) as u64
    }
}

pub fn swap_budget(p: &SwapParams, heralding: Heralding) -> Result<SwapBudget> {
    p.validate()?;
    let j = p.pairs as f64;
    let base = p.p_emit * p.p_emit * p.p_bsa;
    match heralding {
        Heralding::Perfect => Ok(SwapBudget {
            trials: j,
            p_swap: base,
            expected_successes: j * base,
        }),
        Heralding::Imperfect => {
            let h = p.heralding_efficiency();
            if h <= 0.0 {
                return Err(Error::ZeroHeralding);
            }
            Ok(SwapBudget {
                trials: j / h,
                p_swap: h * h * base,
                expected_successes: j * h * base,
            })
        }
    }
}

/// Rate penalty of imperfect heralding after swapping across `i` links,
/// `(p_pass p_AFC)^(i-1)`.
pub fn chain_factor(p: &SwapParams) -> Result<f64> {
    p.validate()?;
    Ok(p.heralding_efficiency().powi(p.links as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn perfect_heralding() {
        let b = swap_budget(&SwapParams::realistic(1000, 1), Heralding::Perfect).unwrap();
        assert_eq!(b.trials, 1000.0);
        assert!(rel(b.p_swap, 0.089888) < 1e-12);
        assert!(rel(b.expected_successes, 89.888) < 1e-12);
    }

    #[test]
    fn imperfect_heralding() {
        let b = swap_budget(&SwapParams::realistic(1000, 1), Heralding::Imperfect).unwrap();
        assert!(rel(b.trials, 2096.4360587002093) < 1e-12);
        assert_eq!(b.trials_ceil(), 2097);
        assert!(rel(b.expected_successes, 42.876576) < 1e-12);
    }

    #[test]
    fn unit_heralding_reduces_to_perfect() {
        let mut p = SwapParams::realistic(250, 3);
        p.p_pass = 1.0;
        p.p_afc = 1.0;
        assert_eq!(
            swap_budget(&p, Heralding::Perfect).unwrap(),
            swap_budget(&p, Heralding::Imperfect).unwrap()
        );
    }

    #[test]
    fn zero_heralding_is_an_error() {
        let mut p = SwapParams::realistic(10, 1);
        p.p_pass = 0.0;
        assert_eq!(
            swap_budget(&p, Heralding::Imperfect),
            Err(Error::ZeroHeralding)
        );
        assert!(swap_budget(&p, Heralding::Perfect).is_ok());
    }

    #[test]
    fn chain_factor_values() {
        let f = |i| chain_factor(&SwapParams::realistic(1, i)).unwrap();
        assert_eq!(f(1), 1.0);
        assert!(rel(f(2), 0.477) < 1e-12);
        assert!(rel(f(10), 0.0012783960243203797) < 1e-12);
        assert!(chain_factor(&SwapParams::realistic(1, 0)).is_err());
    }

    proptest! {
        #[test]
        fn imperfect_is_perfect_times_heralding(
            j in 1u32..100_000,
            e in 0.0f64..=1.0,
            b in 0.0f64..=0.5,
            pass in 0.01f64..=1.0,
            afc in 0.01f64..=1.0,
        ) {
            let p = SwapParams { pairs: j, p_emit: e, p_bsa: b, p_pass: pass, p_afc: afc, links: 1 };
            let perfect = swap_budget(&p, Heralding::Perfect).unwrap();
            let imperfect = swap_budget(&p, Heralding::Imperfect).unwrap();
            let scaled = perfect.expected_successes * pass * afc;
            prop_assert!((imperfect.expected_successes - scaled).abs() <= 1e-12 * scaled.abs());
            prop_assert!(imperfect.trials >= perfect.trials);
            if pass * afc < 1.0 {
                prop_assert!(imperfect.trials > perfect.trials);
            }
        }

        #[test]
        fn chain_factor_is_multiplicative(
            i1 in 1u32..30,
            i2 in 1u32..30,
            pass in 0.01f64..=1.0,
            afc in 0.01f64..=1.0,
        ) {
            let at = |i| chain_factor(&SwapParams { p_pass: pass, p_afc: afc, ..SwapParams::realistic(1, i) }).unwrap();
            let lhs = at(i1 + i2 - 1);
            let rhs = at(i1) * at(i2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
        }
    }
}
