use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// QALS tunables. `i_max` has no default and must always be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QalsParams {
    /// Floor the perturbation probability decays towards.
    pub p_delta: f64,
    /// Decay rate of the perturbation probability.
    pub eta: f64,
    /// Probability of flipping bits of a fresh candidate.
    pub q: f64,
    /// The perturbation probability decays every `period` iterations.
    pub period: usize,
    /// Upper bound of the tabu weight.
    pub lambda0: f64,
    /// Sampler reads per iteration.
    pub k: usize,
    pub i_max: usize,
    pub n_max: usize,
    pub d_min: usize,
    /// Divides `f' - f*` in the acceptance exponent.
    #[serde(default = "one")]
    pub energy_scale: f64,
    /// Feed ±1 vectors instead of 0/1 vectors into the tabu update.
    #[serde(default)]
    pub tabu_spin_form: bool,
}

fn one() -> f64 {
    1.0
}

impl QalsParams {
    /// Values used for number partitioning.
    pub fn npp_defaults(i_max: usize) -> Self {
        Self {
            p_delta: 0.1,
            eta: 0.01,
            q: 0.2,
            period: 10,
            lambda0: 1.5,
            k: 10,
            i_max,
            n_max: 100,
            d_min: 70,
            energy_scale: 1.0,
            tabu_spin_form: false,
        }
    }

    /// Values used for the travelling salesman problem.
    pub fn tsp_defaults(i_max: usize) -> Self {
        Self {
            eta: 0.2,
            period: 5,
            k: 5,
            ..Self::npp_defaults(i_max)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(invalid(format!("invalid QALS parameter: {what}")))
            }
        };
        check(
            self.p_delta > 0.0 && self.p_delta < 0.5,
            "p_delta must lie in (0, 0.5)",
        )?;
        check(self.eta > 0.0 && self.eta <= 1.0, "eta must lie in (0, 1]")?;
        check(self.q > 0.0 && self.q <= 1.0, "q must lie in (0, 1]")?;
        check(self.period >= 1, "period must be at least 1")?;
        check(
            self.lambda0 > 0.0 && self.lambda0.is_finite(),
            "lambda0 must be positive",
        )?;
        check(self.k >= 1, "k must be at least 1")?;
        check(
            self.energy_scale > 0.0 && self.energy_scale.is_finite(),
            "energy_scale must be positive",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        QalsParams::npp_defaults(10).validate().unwrap();
        let t = QalsParams::tsp_defaults(10);
        t.validate().unwrap();
        assert_eq!((t.eta, t.period, t.k), (0.2, 5, 5));
    }

    #[test]
    fn rejects_out_of_range() {
        let base = QalsParams::npp_defaults(1);
        for p in [
            QalsParams {
                p_delta: 0.5,
                ..base.clone()
            },
            QalsParams {
                p_delta: 0.0,
                ..base.clone()
            },
            QalsParams {
                eta: 0.0,
                ..base.clone()
            },
            QalsParams {
                q: 0.0,
                ..base.clone()
            },
            QalsParams {
                period: 0,
                ..base.clone()
            },
            QalsParams {
                lambda0: -1.0,
                ..base.clone()
            },
            QalsParams {
                k: 0,
                ..base.clone()
            },
            QalsParams {
                energy_scale: 0.0,
                ..base.clone()
            },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn optional_fields_default() {
        let p: QalsParams = serde_json::from_str(
            r#"{"p_delta":0.1,"eta":0.01,"q":0.2,"period":10,"lambda0":1.5,
                "k":10,"i_max":50,"n_max":100,"d_min":70}"#,
        )
        .unwrap();
        assert_eq!(p, QalsParams::npp_defaults(50));
        assert!(serde_json::from_str::<QalsParams>(r#"{"p_delta":0.1}"#).is_err());
    }
}
