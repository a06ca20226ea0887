use serde::{Deserialize, Serialize};

use super::{
    AffineMaximizerSpec, FixedPaymentGwvcg, FixedPriceDictatorship, Gwvcg, Mechanism, MechanismError, MechanismOutcome,
    PriceRow,
};
use crate::hexfloat;
use crate::utility::TypeProfile;

/// Serializable description of one of the built-in mechanisms. A missing
/// `tiebreak` means index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismSpec {
    Gwvcg {
        #[serde(with = "hexfloat::vec")]
        weights: Vec<f64>,
        #[serde(with = "hexfloat::vec")]
        constants: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tiebreak: Option<Vec<usize>>,
    },
    Dictatorship {
        dictator: usize,
        #[serde(with = "hexfloat::vec")]
        fixed_prices: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tiebreak: Option<Vec<usize>>,
    },
    GwvcgFixed {
        #[serde(with = "hexfloat::vec")]
        weights: Vec<f64>,
        #[serde(with = "hexfloat::vec")]
        constants: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tiebreak: Option<Vec<usize>>,
        #[serde(with = "hexfloat")]
        z_star: f64,
    },
}

fn affine(weights: &[f64], constants: &[f64], tiebreak: &Option<Vec<usize>>) -> AffineMaximizerSpec {
    let mut spec = AffineMaximizerSpec::new(weights.to_vec(), constants.to_vec());
    if let Some(t) = tiebreak {
        spec.tiebreak = t.clone();
    }
    spec
}

impl MechanismSpec {
    pub fn gwvcg(spec: &AffineMaximizerSpec) -> Self {
        MechanismSpec::Gwvcg {
            weights: spec.weights.clone(),
            constants: spec.constants.clone(),
            tiebreak: Some(spec.tiebreak.clone()),
        }
    }

    /// The affine-maximiser part, for the two VCG variants.
    pub fn affine_spec(&self) -> Option<AffineMaximizerSpec> {
        match self {
            MechanismSpec::Gwvcg {
                weights,
                constants,
                tiebreak,
            }
            | MechanismSpec::GwvcgFixed {
                weights,
                constants,
                tiebreak,
                ..
            } => Some(affine(weights, constants, tiebreak)),
            MechanismSpec::Dictatorship { .. } => None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Mechanism + Send + Sync>, MechanismError> {
        Ok(match self {
            MechanismSpec::Gwvcg {
                weights,
                constants,
                tiebreak,
            } => {
                let s = affine(weights, constants, tiebreak);
                s.validate()?;
                Box::new(Gwvcg(s))
            }
            MechanismSpec::GwvcgFixed {
                weights,
                constants,
                tiebreak,
                z_star,
            } => {
                let s = affine(weights, constants, tiebreak);
                s.validate()?;
                if !z_star.is_finite() {
                    return Err(MechanismError::NonFinite { what: "z_star", index: 0 });
                }
                Box::new(FixedPaymentGwvcg { spec: s, z_star: *z_star })
            }
            MechanismSpec::Dictatorship {
                dictator,
                fixed_prices,
                tiebreak,
            } => {
                let mut d = FixedPriceDictatorship::new(*dictator, fixed_prices.clone());
                if let Some(t) = tiebreak {
                    d.tiebreak = t.clone();
                }
                super::validate_tiebreak(&d.tiebreak, fixed_prices.len())?;
                Box::new(d)
            }
        })
    }
}

impl Mechanism for MechanismSpec {
    fn name(&self) -> String {
        self.build().map(|m| m.name()).unwrap_or_else(|_| "invalid".into())
    }

    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        self.build()?.run(profile)
    }

    fn prices(&self, profile: &TypeProfile, agent: usize) -> Option<Result<PriceRow, MechanismError>> {
        match self.build() {
            Ok(m) => m.prices(profile, agent),
            Err(e) => Some(Err(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_hand_written_specs() {
        let s: MechanismSpec = serde_json::from_str(r#"{"kind":"gwvcg","weights":[1,2],"constants":[0,0,1]}"#).unwrap();
        assert_eq!(s.affine_spec().unwrap(), AffineMaximizerSpec::new(vec![1.0, 2.0], vec![0.0, 0.0, 1.0]));
        let d: MechanismSpec =
            serde_json::from_str(r#"{"kind":"dictatorship","dictator":0,"fixed_prices":["0x1p+0",1,0]}"#).unwrap();
        assert!(d.affine_spec().is_none());
        let f: MechanismSpec =
            serde_json::from_str(r#"{"kind":"gwvcg_fixed","weights":[1],"constants":[0,0],"z_star":-1}"#).unwrap();
        assert_eq!(f.build().unwrap().name(), "gwvcg_fixed(z*=-1)");
    }

    #[test]
    fn rejects_unknown_kinds_and_fields() {
        assert!(serde_json::from_str::<MechanismSpec>(r#"{"kind":"vickrey"}"#).is_err());
        assert!(serde_json::from_str::<MechanismSpec>(r#"{"kind":"gwvcg","weights":[1],"constants":[0],"extra":1}"#).is_err());
    }

    #[test]
    fn round_trips() {
        let s = MechanismSpec::GwvcgFixed {
            weights: vec![0.1, 0.0],
            constants: vec![1.0 / 3.0, 0.0],
            tiebreak: Some(vec![1, 0]),
            z_star: 0.7,
        };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<MechanismSpec>(&text).unwrap(), s);
    }

    #[test]
    fn build_validates() {
        let s = MechanismSpec::Gwvcg {
            weights: vec![0.0],
            constants: vec![0.0],
            tiebreak: None,
        };
        assert!(matches!(s.build(), Err(MechanismError::AllWeightsZero)));
    }
}
