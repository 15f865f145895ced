//! Structured-config schemas: Young-function specs, spaces, random
//! variables, and scenario files, all serde-backed so other tools can
//! share the same data byte for byte.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{DyadicSpace, RandomVariable, SpaceError};
use crate::young::YoungFunction;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown young-function kind '{0}'")]
    UnknownKind(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(&'static str),
    #[error("bad value for '{field}': {why}")]
    BadValue { field: &'static str, why: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Young(#[from] crate::young::YoungError),
}

/// {kind, parameters, x_max}; piecewise functions carry their
/// breakpoints explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YoungConfig {
    pub kind: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub points: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub x_max: Option<f64>,
}

impl YoungConfig {
    pub fn named(kind: &str) -> Self {
        YoungConfig {
            kind: kind.into(),
            parameters: BTreeMap::new(),
            points: None,
            x_max: None,
        }
    }

    fn param(&self, name: &'static str) -> Result<f64, ConfigError> {
        self.parameters
            .get(name)
            .copied()
            .ok_or(ConfigError::MissingParameter(name))
    }

    pub fn build(&self) -> Result<YoungFunction, ConfigError> {
        let phi = match self.kind.as_str() {
            "power" => YoungFunction::power(self.param("p")?),
            "scaled_power" => YoungFunction::scaled_power(self.param("coeff")?, self.param("p")?),
            "quadratic" => YoungFunction::quadratic(),
            "entropic" => YoungFunction::entropic(),
            "entropic_star" => YoungFunction::entropic_star(),
            "exp_minus_one" => YoungFunction::exp_minus_one(),
            "exp_minus_one_star" => YoungFunction::exp_minus_one_star(),
            "piecewise" => {
                let points = self.points.clone().ok_or(ConfigError::BadValue {
                    field: "points",
                    why: "piecewise kind needs breakpoints".into(),
                })?;
                YoungFunction::piecewise(points)?
            }
            other => return Err(ConfigError::UnknownKind(other.into())),
        };
        Ok(match self.x_max {
            Some(x) => phi.with_cutoff(x),
            None => phi,
        })
    }
}

/// {k, weights?}: weights as numerator/denominator pairs so custom
/// spaces stay exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub k: u32,
    #[serde(default)]
    pub weights: Option<Vec<(u64, u64)>>,
}

impl SpaceConfig {
    pub fn build(&self) -> Result<Arc<DyadicSpace>, ConfigError> {
        match &self.weights {
            None => Ok(DyadicSpace::uniform(self.k)),
            Some(ws) => {
                let ratios = ws
                    .iter()
                    .map(|&(n, d)| {
                        if d == 0 {
                            Err(ConfigError::BadValue {
                                field: "weights",
                                why: "zero denominator".into(),
                            })
                        } else {
                            Ok(Ratio::new(n as u128, d as u128))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(DyadicSpace::with_weights(self.k, ratios)?)
            }
        }
    }
}

/// {space, values | generator}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RvConfig {
    pub space: SpaceConfig,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl GeneratorConfig {
    pub fn param(&self, name: &'static str) -> Result<f64, ConfigError> {
        self.params
            .get(name)
            .copied()
            .ok_or(ConfigError::MissingParameter(name))
    }
}

impl RvConfig {
    pub fn build(&self) -> Result<RandomVariable, ConfigError> {
        let space = self.space.build()?;
        match (&self.values, &self.generator) {
            (Some(values), _) => Ok(RandomVariable::new(space, values.clone())?),
            (None, Some(g)) => match g.name.as_str() {
                "constant" => Ok(RandomVariable::constant(space, g.param("c")?)),
                "indicator_block" => {
                    let atoms = space.atoms_in(g.param("lo")?, g.param("hi")?);
                    Ok(RandomVariable::indicator(space, &atoms, g.param("height")?))
                }
                "ramp" => {
                    // v_i = offset + slope·i, a deterministic non-flat fixture
                    let (offset, slope) = (g.param("offset")?, g.param("slope")?);
                    let values = (0..space.atoms())
                        .map(|i| offset + slope * i as f64)
                        .collect();
                    Ok(RandomVariable::new(space, values)?)
                }
                other => Err(ConfigError::UnknownKind(other.into())),
            },
            (None, None) => Err(ConfigError::BadValue {
                field: "values",
                why: "need values or a generator".into(),
            }),
        }
    }
}

/// One declared scenario check: which audit to run and whether it must
/// pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictConfig {
    pub check: String,
    pub expect_pass: bool,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl VerdictConfig {
    pub fn param(&self, name: &'static str) -> Result<f64, ConfigError> {
        self.params
            .get(name)
            .copied()
            .ok_or(ConfigError::MissingParameter(name))
    }
}

/// On-disk scenario schema:
/// {name, ladder, young, sequence, verdicts}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub ladder: Vec<u32>,
    pub young: YoungConfig,
    pub sequence: SequenceConfig,
    pub verdicts: Vec<VerdictConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceConfig {
    pub name: String,
    pub prefix_len: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl SequenceConfig {
    pub fn param(&self, name: &'static str) -> Result<f64, ConfigError> {
        self.params
            .get(name)
            .copied()
            .ok_or(ConfigError::MissingParameter(name))
    }
}
