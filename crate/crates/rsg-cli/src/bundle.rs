//! The input bundle: one JSON document holding a graph and whatever the
//! command needs (machines, nucleus, elements, cone pairs, an oracle).

use std::fs;
use std::path::Path as FsPath;

use rsg_atoms::{GroupOracle, OracleSpec};
use rsg_core::graph::GraphJson;
use rsg_core::path::PathJson;
use rsg_core::rsg::{FullRsg, RsgElementJson};
use rsg_core::thompson::{RationalPointJson, VElementJson};
use rsg_core::transducer::{NucleusJson, TransducerJson};
use rsg_core::{ClopenSet, DirectedGraph, NucleusSet, Path, RationalMap, RationalPoint, VElement};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Bundle {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<TransducerJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<TransducerJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nucleus: Option<NucleusJson>,
    /// Ambient clopen set E; the whole shift when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<Vec<PathJson>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<RsgElementJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<VElementJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(PathJson, PathJson)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<PathJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<RationalPointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
}

impl Bundle {
    pub fn load(p: Option<&FsPath>) -> Result<Bundle, CliError> {
        match p {
            None => Ok(Bundle::default()),
            Some(p) => Ok(serde_json::from_str(&fs::read_to_string(p)?)?),
        }
    }

    pub fn graph(&self) -> Result<DirectedGraph, CliError> {
        Ok(DirectedGraph::from_json(self.graph.as_ref().ok_or(CliError::Missing("graph"))?)?)
    }

    pub fn ambient(&self, g: &DirectedGraph) -> Result<ClopenSet, CliError> {
        match &self.ambient {
            None => Ok(ClopenSet::whole()),
            Some(a) => Ok(ClopenSet::from_json(g, a)?),
        }
    }

    pub fn map(&self, g: &DirectedGraph) -> Result<RationalMap, CliError> {
        Ok(RationalMap::from_json(g, self.map.as_ref().ok_or(CliError::Missing("map"))?)?)
    }

    pub fn maps(&self, g: &DirectedGraph, n: usize) -> Result<Vec<RationalMap>, CliError> {
        if self.maps.len() < n {
            return Err(CliError::Missing("maps"));
        }
        self.maps.iter().map(|m| Ok(RationalMap::from_json(g, m)?)).collect()
    }

    pub fn nucleus(&self, g: &DirectedGraph) -> Result<NucleusSet, CliError> {
        Ok(NucleusSet::from_json(g, self.nucleus.as_ref().ok_or(CliError::Missing("nucleus"))?)?)
    }

    pub fn rsg(&self) -> Result<FullRsg, CliError> {
        let g = self.graph()?;
        let n = self.nucleus(&g)?;
        let e = self.ambient(&g)?;
        Ok(FullRsg::new(g, n, e)?)
    }

    pub fn v_elements(&self, g: &DirectedGraph, n: usize) -> Result<Vec<VElement>, CliError> {
        if self.v.len() < n {
            return Err(CliError::Missing("v"));
        }
        self.v.iter().map(|j| Ok(VElement::from_json(g, j)?)).collect()
    }

    pub fn pairs(&self, g: &DirectedGraph) -> Result<Vec<(Path, Path)>, CliError> {
        self.pairs.iter().map(|(a, b)| Ok((Path::from_json(g, a)?, Path::from_json(g, b)?))).collect()
    }

    pub fn inputs(&self, g: &DirectedGraph) -> Result<Vec<Path>, CliError> {
        self.inputs.iter().map(|p| Ok(Path::from_json(g, p)?)).collect()
    }

    pub fn point(&self, g: &DirectedGraph) -> Result<RationalPoint, CliError> {
        Ok(RationalPoint::from_json(g, self.point.as_ref().ok_or(CliError::Missing("point"))?)?)
    }

    /// The oracle from `--oracle` when given, else from the bundle.
    pub fn oracle(&self, inline: Option<&str>) -> Result<GroupOracle, CliError> {
        if let Some(s) = inline {
            return Ok(GroupOracle::from_json(s)?);
        }
        let spec = self.oracle.clone().ok_or(CliError::Missing("oracle"))?;
        Ok(GroupOracle::from_spec(spec)?)
    }
}
