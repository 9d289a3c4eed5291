//! JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cantor::{normalize_pair, AffineIfs, AffineMap, CantorPair, TwoMapCantorSet};
use crate::classify::SampleBounds;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(with = "rational::as_str")]
    pub r: Rational,
    #[serde(with = "rational::as_str")]
    pub t: Rational,
}

/// A set given either by the two-map parameters or by affine maps on `[0, a]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    TwoMap {
        #[serde(with = "rational::as_str")]
        p0: Rational,
        #[serde(with = "rational::as_str")]
        p1: Rational,
        #[serde(with = "rational::as_str")]
        a: Rational,
    },
    Ifs {
        #[serde(with = "rational::as_str")]
        a: Rational,
        maps: Vec<MapSpec>,
    },
}

impl SetSpec {
    /// A single map is accepted as a degenerate construction.
    pub fn to_ifs(&self) -> Result<AffineIfs> {
        match self {
            SetSpec::TwoMap { p0, p1, a } => {
                Ok(TwoMapCantorSet::new(p0.clone(), p1.clone(), a.clone())?.to_ifs())
            }
            SetSpec::Ifs { a, maps } => {
                let hull = Interval::new(Rational::from_integer(0.into()), a.clone())?;
                let maps: Vec<AffineMap> = maps
                    .iter()
                    .map(|m| AffineMap::new(m.r.clone(), m.t.clone()))
                    .collect();
                if maps.len() == 1 {
                    AffineIfs::construction(hull, maps)
                } else {
                    AffineIfs::new(hull, maps)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(with = "rational::as_str")]
    pub s: Rational,
    #[serde(with = "rational::as_str")]
    pub t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub s: Interval,
    pub t: Interval,
}

/// Everything a command may read; each command checks for the fields it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: Option<SetSpec>,
    pub k_prime: Option<SetSpec>,
    #[serde(default, with = "rational::opt_as_str")]
    pub lambda: Option<Rational>,
    pub depth: Option<usize>,
    /// Box-counting scales `2^-d`.
    pub depths: Option<Vec<u32>>,
    /// Depths of the Hausdorff-content table.
    pub content_depths: Option<Vec<usize>>,
    /// Exponent for the content table; defaults to `min(dim K + dim K', 1)`.
    pub content_exponent: Option<f64>,
    pub point: Option<PointSpec>,
    #[serde(rename = "box")]
    pub region: Option<BoxSpec>,
    #[serde(default, with = "rational::vec_as_str")]
    pub grid: Vec<Rational>,
    pub bounds: Option<SampleBounds>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default, with = "rational::opt_as_str")]
    pub t: Option<Rational>,
    #[serde(default, with = "rational::opt_as_str")]
    pub radius: Option<Rational>,
    pub budget: Option<usize>,
    pub node_budget: Option<u64>,
    pub depth_cap: Option<usize>,
    pub gap_samples: Option<usize>,
    pub svg: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn specs(&self) -> Result<(&SetSpec, &SetSpec)> {
        match (&self.k, &self.k_prime) {
            (Some(k), Some(kp)) => Ok((k, kp)),
            _ => Err(Error::Config(
                "config needs both \"k\" and \"k_prime\"".into(),
            )),
        }
    }

    pub fn ifs_pair(&self) -> Result<(AffineIfs, AffineIfs)> {
        let (k, kp) = self.specs()?;
        Ok((k.to_ifs()?, kp.to_ifs()?))
    }

    /// The pair in the two-map family and the map `phi` with `A - B = phi(K - K')`.
    pub fn pair(&self) -> Result<(CantorPair, AffineMap)> {
        match self.specs()? {
            (
                SetSpec::TwoMap { p0, p1, a },
                SetSpec::TwoMap {
                    p0: q0,
                    p1: q1,
                    a: b,
                },
            ) => Ok((
                CantorPair::new(
                    TwoMapCantorSet::new(p0.clone(), p1.clone(), a.clone())?,
                    TwoMapCantorSet::new(q0.clone(), q1.clone(), b.clone())?,
                ),
                AffineMap::identity(),
            )),
            (k, kp) => normalize_pair(&k.to_ifs()?, &kp.to_ifs()?),
        }
    }

    pub fn lambda_or_one(&self) -> Rational {
        self.lambda.clone().unwrap_or_else(|| rational::int(1))
    }
}
