//! On-disk input schemas for the CLI. These are deliberately plainer than the
//! library types: covers are name → point-id lists, actions name their
//! generator permutations "g0", "g1", ... in the order of the group spec's
//! generating set.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use coarsedim_core::coarse::{Cover, Member, PointSet, Subset};
use coarsedim_core::dynamics::FiniteAction;
use coarsedim_core::ltc::NearOrbitWitness;
use coarsedim_core::{Error, GroupSpec, Result};

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Deserialize)]
pub struct WireAction {
    pub points: usize,
    pub group: GroupSpec,
    /// "g{i}" → permutation of 0..points, one per generator of `group`.
    pub generators: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub ball_radius: Option<u32>,
}

impl WireAction {
    pub fn into_action(self) -> Result<FiniteAction> {
        let mut perms = Vec::new();
        for i in 0..self.group.generators.len() {
            let key = format!("g{i}");
            let p = self.generators.get(&key).ok_or_else(|| {
                Error::Structure(format!("action file missing generator {key:?}"))
            })?;
            perms.push(p.clone());
        }
        FiniteAction::new(
            self.group,
            PointSet::new(self.points),
            perms,
            self.ball_radius.unwrap_or(4),
        )
    }
}

#[derive(Debug, Deserialize)]
pub struct WireCover {
    pub members: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub colors: Option<BTreeMap<String, usize>>,
}

impl WireCover {
    pub fn into_cover(self, size: usize) -> Result<Cover> {
        let colors = self.colors.unwrap_or_default();
        let members = self
            .members
            .into_iter()
            .map(|(name, ids)| {
                let color = colors.get(&name).copied();
                Member { name, points: ids.into_iter().collect::<Subset>(), color }
            })
            .collect();
        Cover::new(size, members)
    }
}

#[derive(Debug, Deserialize)]
pub struct WireWitness {
    pub cover: WireCover,
    /// Member name → (point id → selected point id). An optional "labels"
    /// field (member name → point id → coset id) is accepted and ignored
    /// here; only coset-labeled verification reads labels.
    pub selection: BTreeMap<String, BTreeMap<usize, usize>>,
}

impl WireWitness {
    pub fn into_witness(self, size: usize) -> Result<NearOrbitWitness> {
        Ok(NearOrbitWitness {
            cover: self.cover.into_cover(size)?,
            selection: self.selection,
        })
    }
}
