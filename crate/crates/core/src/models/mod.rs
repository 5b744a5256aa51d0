//! Concrete targets and samplers: the standard-normal toy, a bimodal
//! Gaussian mixture with a tempered variant, an exactly solvable
//! finite-state chain, and the stochastic-volatility posterior.

mod finite;
mod mixture;
mod normal_toy;
pub mod sv;

pub use finite::{FiniteKernel, FiniteLogMass, FiniteStateModel};
pub use mixture::GaussianMixture;
pub use normal_toy::NormalToy;
pub use sv::{center_returns, sv_simulate, SvModel, SvParams, SvPriors};

use std::sync::Arc;

use crate::core::{LogDensity, State};

/// Flattened (tempered) version of a target: log h(x) / T. Shares the modes
/// of the base target but mixes faster; the usual auxiliary-chain target.
pub struct Tempered {
    inner: Arc<dyn LogDensity>,
    temper: f64,
}

impl Tempered {
    /// `temper` is the T in h^(1/T); T >= 1.
    pub fn new(inner: Arc<dyn LogDensity>, temper: f64) -> crate::Result<Self> {
        if !(temper >= 1.0) || !temper.is_finite() {
            return Err(crate::Error::InvalidConfig(format!(
                "temper must be >= 1, got {temper}"
            )));
        }
        Ok(Self { inner, temper })
    }

    pub fn temper(&self) -> f64 {
        self.temper
    }
}

impl LogDensity for Tempered {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn log_density(&self, x: &State) -> f64 {
        self.inner.log_density(x) / self.temper
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // For an unnormalized exponential-family kernel, tempering by T = 2 is
    // exactly half the raw log-density, pointwise.
    #[test]
    fn tempered_toy_is_exactly_half() {
        let base = Arc::new(NormalToy);
        let half = Tempered::new(base.clone(), 2.0).unwrap();
        for i in -40..=40 {
            let x = State::scalar(i as f64 * 0.25);
            assert_eq!(half.log_density(&x), base.log_density(&x) / 2.0);
        }
    }

    #[test]
    fn tempered_mixture_shares_modes() {
        let base = Arc::new(GaussianMixture::new(vec![0.3, 0.7], vec![-4.0, 4.0], vec![0.5, 0.5]).unwrap());
        let flat = Tempered::new(base.clone(), 2.0).unwrap();
        for m in [-4.0, 4.0] {
            let at = flat.log_density(&State::scalar(m));
            for dx in [-0.3, 0.3] {
                assert!(at > flat.log_density(&State::scalar(m + dx)));
            }
        }
    }

    #[test]
    fn temper_below_one_rejected() {
        assert!(Tempered::new(Arc::new(NormalToy), 0.5).is_err());
    }
}
