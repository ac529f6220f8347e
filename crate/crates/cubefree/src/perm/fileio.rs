//! The JSON group-file format consumed and produced by every tool in this
//! crate: `{"degree": d, "generators": ["(1,2,3)", ...], "name": optional}`.

use serde::{Deserialize, Serialize};

use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

/// Serialized form of a permutation group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    /// Generators in cycle notation over 1-based points.
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GroupFile {
    pub fn from_group(g: &PermGroup) -> GroupFile {
        GroupFile {
            degree: g.degree(),
            generators: g.generators().iter().map(|p| p.to_string()).collect(),
            name: g.name().map(str::to_string),
        }
    }

    pub fn to_group(&self) -> Result<PermGroup> {
        if self.degree == 0 {
            return Err(Error::GroupFile("degree must be positive".into()));
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for text in &self.generators {
            gens.push(Permutation::parse(text, self.degree)?);
        }
        let g = PermGroup::new(self.degree, gens)?;
        Ok(match &self.name {
            Some(n) => g.with_name(n),
            None => g,
        })
    }

    pub fn from_json(text: &str) -> Result<GroupFile> {
        serde_json::from_str(text).map_err(|e| Error::GroupFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group file serializes")
    }
}

/// Parse a group straight from JSON text.
pub fn group_from_json(text: &str) -> Result<PermGroup> {
    GroupFile::from_json(text)?.to_group()
}

/// Serialize a group to JSON text.
pub fn group_to_json(g: &PermGroup) -> String {
    GroupFile::from_group(g).to_json()
}
