//! JSON descriptions of matroids, set systems, objectives and instances.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::element::{ElementId, WeightVector};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matroid::{MatroidFamily, MatroidOracle};
use crate::objective::{Coverage, Objective};
use crate::set_system::SetSystem;
use crate::stochastic::SppInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidDesc {
    Uniform { n: usize, rank: usize },
    Partition { blocks: Vec<Vec<usize>>, caps: Vec<usize> },
    Graphic { graph: Graph },
    Explicit { ground: Vec<usize>, independent: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemDesc {
    Matroid { matroid: MatroidDesc },
    Intersection { matroids: Vec<MatroidDesc> },
    Matching { graph: Graph },
    Rank1 { n: usize },
    Blocks { m: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveDesc {
    Additive {
        w: Vec<f64>,
    },
    Coverage {
        universe: usize,
        sets: Vec<Vec<usize>>,
        #[serde(default)]
        normalized: bool,
    },
    EqualPartition {
        n: usize,
        r: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDesc {
    pub name: String,
    pub system: SystemDesc,
    pub objective: ObjectiveDesc,
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

fn checked_graph(g: &Graph) -> Result<Graph> {
    Graph::new(g.vertices, g.edges.clone())
}

impl MatroidDesc {
    pub fn build(&self) -> Result<MatroidOracle> {
        let family = match self {
            MatroidDesc::Uniform { n, rank } => MatroidFamily::uniform(*n, *rank),
            MatroidDesc::Partition { blocks, caps } => MatroidFamily::partition(blocks.clone(), caps.clone())?,
            MatroidDesc::Graphic { graph } => MatroidFamily::graphic(checked_graph(graph)?),
            MatroidDesc::Explicit { ground, independent } => {
                let family = MatroidFamily::explicit(ground.clone(), independent.clone())?;
                if let MatroidFamily::Explicit(x) = &family {
                    if !x.is_matroid() {
                        return Err(Error::invalid("explicit family violates the augmentation axiom"));
                    }
                }
                family
            }
        };
        Ok(family.into())
    }

    pub fn describe(m: &MatroidOracle) -> Result<Self> {
        if !m.is_base() {
            return Err(Error::invalid("only unviewed matroids can be described"));
        }
        let ids = |v: &[ElementId]| v.iter().map(|e| e.0).collect::<Vec<_>>();
        Ok(match m.base() {
            MatroidFamily::Uniform { n, rank } => MatroidDesc::Uniform { n: *n, rank: *rank },
            MatroidFamily::Partition(p) => MatroidDesc::Partition {
                blocks: p.blocks().iter().map(|b| ids(b)).collect(),
                caps: p.caps().to_vec(),
            },
            MatroidFamily::Graphic(g) => MatroidDesc::Graphic { graph: g.clone() },
            MatroidFamily::Explicit(x) => {
                let ground = ids(x.ground());
                let mut independent: Vec<Vec<usize>> = x
                    .masks()
                    .map(|mask| (0..ground.len()).filter(|i| mask & (1 << i) != 0).map(|i| ground[i]).collect())
                    .collect();
                independent.sort();
                MatroidDesc::Explicit { ground, independent }
            }
        })
    }
}

impl SystemDesc {
    pub fn build(&self) -> Result<SetSystem> {
        Ok(match self {
            SystemDesc::Matroid { matroid } => SetSystem::SingleMatroid(matroid.build()?),
            SystemDesc::Intersection { matroids } => {
                SetSystem::intersection(matroids.iter().map(MatroidDesc::build).collect::<Result<_>>()?)?
            }
            SystemDesc::Matching { graph } => SetSystem::Matching(checked_graph(graph)?),
            SystemDesc::Rank1 { n } => SetSystem::Rank1 { n: *n },
            SystemDesc::Blocks { m, k } => SetSystem::Blocks { m: *m, k: *k },
        })
    }

    pub fn describe(s: &SetSystem) -> Result<Self> {
        Ok(match s {
            SetSystem::SingleMatroid(m) => SystemDesc::Matroid { matroid: MatroidDesc::describe(m)? },
            SetSystem::Intersection(ms) => {
                SystemDesc::Intersection { matroids: ms.iter().map(MatroidDesc::describe).collect::<Result<_>>()? }
            }
            SetSystem::Matching(g) => SystemDesc::Matching { graph: g.clone() },
            SetSystem::Rank1 { n } => SystemDesc::Rank1 { n: *n },
            SetSystem::Blocks { m, k } => SystemDesc::Blocks { m: *m, k: *k },
        })
    }
}

impl ObjectiveDesc {
    pub fn build(&self) -> Result<Objective> {
        Ok(match self {
            ObjectiveDesc::Additive { w } => Objective::Additive(WeightVector::new(w.clone())?),
            ObjectiveDesc::Coverage { universe, sets, normalized } => {
                Objective::Coverage(Coverage::new(*universe, sets.clone(), *normalized)?)
            }
            ObjectiveDesc::EqualPartition { n, r } => Objective::equal_partition(*n, *r)?,
        })
    }

    pub fn describe(o: &Objective) -> Self {
        match o {
            Objective::Additive(w) => ObjectiveDesc::Additive { w: w.as_slice().to_vec() },
            Objective::Coverage(c) => ObjectiveDesc::Coverage {
                universe: c.universe(),
                sets: c.sets().iter().map(|s| s.iter().map(|&pt| pt as usize).collect()).collect(),
                normalized: c.normalized(),
            },
            Objective::EqualPartition { n, r } => ObjectiveDesc::EqualPartition { n: *n, r: *r },
        }
    }
}

impl InstanceDesc {
    pub fn build(&self) -> Result<SppInstance> {
        let mut inst = SppInstance::new(&self.name, self.system.build()?, self.objective.build()?, self.p, self.seed)?;
        inst.meta = self.meta.clone();
        Ok(inst)
    }

    pub fn describe(inst: &SppInstance) -> Result<Self> {
        Ok(InstanceDesc {
            name: inst.name.clone(),
            system: SystemDesc::describe(&inst.system)?,
            objective: ObjectiveDesc::describe(&inst.objective),
            p: inst.p,
            seed: inst.seed,
            meta: inst.meta.clone(),
        })
    }
}

pub fn parse_instance(text: &str) -> Result<SppInstance> {
    let desc: InstanceDesc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    desc.build()
}

pub fn load_instance(path: &Path) -> Result<SppInstance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn instance_to_json(inst: &SppInstance) -> Result<String> {
    let desc = InstanceDesc::describe(inst)?;
    serde_json::to_string_pretty(&desc).map_err(|e| Error::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let text = r#"{"name":"x","p":0.5,
            "system":{"kind":"intersection","matroids":[
                {"family":"partition","blocks":[[0,1],[2]],"caps":[1,1]},
                {"family":"uniform","n":3,"rank":2}]},
            "objective":{"objective":"additive","w":[1,2,3]}}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.system.kind_name(), "intersection");
        for sys in [
            r#"{"kind":"matching","graph":{"vertices":3,"edges":[[0,1],[1,2],[2,0]]}}"#,
            r#"{"kind":"rank1","n":3}"#,
            r#"{"kind":"blocks","m":1,"k":3}"#,
            r#"{"kind":"matroid","matroid":{"family":"graphic","graph":{"vertices":3,"edges":[[0,1],[1,2],[0,2]]}}}"#,
        ] {
            let d: SystemDesc = serde_json::from_str(sys).unwrap();
            assert_eq!(d.build().unwrap().ground_len(), 3);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_instance("{").is_err());
        let bad_graph = r#"{"kind":"matching","graph":{"vertices":2,"edges":[[0,5]]}}"#;
        assert!(serde_json::from_str::<SystemDesc>(bad_graph).unwrap().build().is_err());
        let not_matroid = MatroidDesc::Explicit { ground: vec![0, 1, 2], independent: vec![vec![], vec![0], vec![1], vec![2], vec![0, 1]] };
        assert!(not_matroid.build().is_err());
    }

    #[test]
    fn round_trip() {
        let inst = crate::adversarial::block_hard_instance(2, 3).unwrap();
        let back = parse_instance(&instance_to_json(&inst).unwrap()).unwrap();
        assert_eq!(instance_to_json(&back).unwrap(), instance_to_json(&inst).unwrap());
    }
}
