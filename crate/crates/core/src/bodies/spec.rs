use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{dilate, Body, HPolytope, LqBall, Symmetry};
use crate::error::Result;
use crate::means::ExtReal;

/// Serializable description of a primitive body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    LqBall {
        q: ExtReal,
        radii: Vec<f64>,
    },
    HPolytope {
        halfspaces: Vec<HalfspaceSpec>,
        #[serde(default)]
        symmetry: Symmetry,
    },
    Dilate {
        body: Box<BodySpec>,
        t: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl BodySpec {
    pub fn build(&self) -> Result<Body> {
        Ok(match self {
            BodySpec::LqBall { q, radii } => LqBall::new(q.to_f64(), radii.clone())?.into(),
            BodySpec::HPolytope {
                halfspaces,
                symmetry,
            } => {
                let hs = halfspaces
                    .iter()
                    .map(|h| (h.normal.clone(), h.offset))
                    .collect();
                Body::HPolytope(Arc::new(HPolytope::new(hs, *symmetry)?))
            }
            BodySpec::Dilate { body, t } => dilate(&body.build()?, *t)?,
        })
    }
}
