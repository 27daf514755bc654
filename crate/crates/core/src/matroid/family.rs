use std::collections::{HashMap, HashSet};

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest ground set accepted by [`MatroidFamily::Explicit`].
pub const EXPLICIT_MAX_GROUND: usize = 20;

/// Base matroids, answering independence on their own ground set.
#[derive(Clone, Debug)]
pub enum MatroidFamily {
    Uniform { n: usize, rank: usize },
    Partition(PartitionFamily),
    Graphic(Graph),
    Explicit(ExplicitFamily),
}

#[derive(Clone, Debug)]
pub struct PartitionFamily {
    blocks: Vec<Vec<ElementId>>,
    caps: Vec<usize>,
    block_of: HashMap<ElementId, usize>,
}

impl PartitionFamily {
    pub fn new(blocks: Vec<Vec<ElementId>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::invalid(format!(
                "partition matroid has {} blocks but {} capacities",
                blocks.len(),
                caps.len()
            )));
        }
        let mut block_of = HashMap::new();
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if block_of.insert(e, b).is_some() {
                    return Err(Error::invalid(format!("element {e} appears in two blocks")));
                }
            }
        }
        Ok(PartitionFamily { blocks, caps, block_of })
    }

    pub fn blocks(&self) -> &[Vec<ElementId>] {
        &self.blocks
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn block_of(&self, e: ElementId) -> Option<usize> {
        self.block_of.get(&e).copied()
    }
}

/// A matroid given by the list of all its independent sets. Test oracle only.
#[derive(Clone, Debug)]
pub struct ExplicitFamily {
    ground: Vec<ElementId>,
    position: HashMap<ElementId, usize>,
    independent: HashSet<u32>,
}

impl ExplicitFamily {
    pub fn new(ground: Vec<ElementId>, independent: Vec<Vec<ElementId>>) -> Result<Self> {
        if ground.len() > EXPLICIT_MAX_GROUND {
            return Err(Error::SizeLimit {
                what: "explicit matroid ground",
                size: ground.len(),
                limit: EXPLICIT_MAX_GROUND,
            });
        }
        let position: HashMap<ElementId, usize> =
            ground.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        if position.len() != ground.len() {
            return Err(Error::invalid("explicit ground set lists an element twice"));
        }
        let mut family = HashSet::new();
        for set in &independent {
            let mut mask = 0u32;
            for e in set {
                let i = *position.get(e).ok_or(Error::Domain(*e))?;
                mask |= 1 << i;
            }
            family.insert(mask);
        }
        if !family.contains(&0) {
            return Err(Error::invalid("explicit family must contain the empty set"));
        }
        for &mask in &family {
            for i in 0..ground.len() {
                if mask & (1 << i) != 0 && !family.contains(&(mask & !(1 << i))) {
                    return Err(Error::invalid("explicit family is not downward-closed"));
                }
            }
        }
        Ok(ExplicitFamily { ground, position, independent: family })
    }

    pub fn ground(&self) -> &[ElementId] {
        &self.ground
    }

    fn mask(&self, s: &ElementSet) -> Result<u32> {
        let mut mask = 0;
        for e in s {
            mask |= 1 << *self.position.get(e).ok_or(Error::Domain(*e))?;
        }
        Ok(mask)
    }

    /// Independent sets as masks over `ground()` positions.
    pub fn masks(&self) -> impl Iterator<Item = u32> + '_ {
        self.independent.iter().copied()
    }

    /// Checks the augmentation axiom, i.e. that the family is a matroid.
    pub fn is_matroid(&self) -> bool {
        let sets: Vec<u32> = self.independent.iter().copied().collect();
        sets.iter().all(|&a| {
            sets.iter().all(|&b| {
                a.count_ones() >= b.count_ones()
                    || (0..self.ground.len()).any(|i| {
                        let bit = 1 << i;
                        b & bit != 0 && a & bit == 0 && self.independent.contains(&(a | bit))
                    })
            })
        })
    }
}

impl MatroidFamily {
    pub fn uniform(n: usize, rank: usize) -> Self {
        MatroidFamily::Uniform { n, rank }
    }

    pub fn partition(blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        let blocks = blocks.into_iter().map(|b| b.into_iter().map(ElementId).collect()).collect();
        Ok(MatroidFamily::Partition(PartitionFamily::new(blocks, caps)?))
    }

    pub fn graphic(graph: Graph) -> Self {
        MatroidFamily::Graphic(graph)
    }

    pub fn explicit(ground: Vec<usize>, independent: Vec<Vec<usize>>) -> Result<Self> {
        Ok(MatroidFamily::Explicit(ExplicitFamily::new(
            ground.into_iter().map(ElementId).collect(),
            independent.into_iter().map(|s| s.into_iter().map(ElementId).collect()).collect(),
        )?))
    }

    pub fn ground(&self) -> ElementSet {
        match self {
            MatroidFamily::Uniform { n, .. } => (0..*n).map(ElementId).collect(),
            MatroidFamily::Partition(p) => p.blocks.iter().flatten().copied().collect(),
            MatroidFamily::Graphic(g) => (0..g.num_edges()).map(ElementId).collect(),
            MatroidFamily::Explicit(x) => x.ground.iter().copied().collect(),
        }
    }

    pub fn contains(&self, e: ElementId) -> bool {
        match self {
            MatroidFamily::Uniform { n, .. } => e.0 < *n,
            MatroidFamily::Partition(p) => p.block_of.contains_key(&e),
            MatroidFamily::Graphic(g) => e.0 < g.num_edges(),
            MatroidFamily::Explicit(x) => x.position.contains_key(&e),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MatroidFamily::Uniform { .. } => "uniform",
            MatroidFamily::Partition(_) => "partition",
            MatroidFamily::Graphic(_) => "graphic",
            MatroidFamily::Explicit(_) => "explicit",
        }
    }

    pub fn is_independent(&self, s: &ElementSet) -> Result<bool> {
        match self {
            MatroidFamily::Uniform { n, rank } => match s.iter().find(|e| e.0 >= *n) {
                Some(&e) => Err(Error::Domain(e)),
                None => Ok(s.len() <= *rank),
            },
            MatroidFamily::Partition(p) => {
                let mut used = vec![0usize; p.caps.len()];
                for e in s {
                    let b = p.block_of(*e).ok_or(Error::Domain(*e))?;
                    used[b] += 1;
                    if used[b] > p.caps[b] {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            MatroidFamily::Graphic(g) => g.is_forest(s),
            MatroidFamily::Explicit(x) => Ok(x.independent.contains(&x.mask(s)?)),
        }
    }
}
