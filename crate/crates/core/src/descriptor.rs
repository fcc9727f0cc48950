//! JSON descriptors for groups, sets and maps.
//!
//! ```json
//! {"group": {"kind": "cyclic", "n": 1009},
//!  "set": {"kind": "ap", "start": 0, "step": 1, "length": 120}}
//! ```
//!
//! Elements may be written as canonical indices or as coordinate arrays.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freiman::{gap_realize, FreimanMap, GapSpec};
use crate::group::{Element, Group, GroupSpec};
use crate::rational::{self, Rational};
use crate::setcalc::{generated_subgroup, GSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDesc {
    Cyclic { n: usize },
    CyclicProduct { moduli: Vec<usize> },
    VectorSpace { p: usize, n: u32 },
    Symmetric { n: usize },
    Dihedral { n: usize },
    Table { table: Vec<Vec<usize>> },
}

impl GroupDesc {
    pub fn build(&self) -> Result<Arc<Group>> {
        match self {
            GroupDesc::Cyclic { n } => Group::cyclic(*n),
            GroupDesc::CyclicProduct { moduli } => Group::product(moduli),
            GroupDesc::VectorSpace { p, n } => Group::vector_space(*p, *n),
            GroupDesc::Symmetric { n } => Group::symmetric(*n),
            GroupDesc::Dihedral { n } => Group::dihedral(*n),
            GroupDesc::Table { table } => Group::from_table(table.clone()),
        }
    }

    pub fn from_spec(spec: &GroupSpec) -> GroupDesc {
        match spec {
            GroupSpec::CyclicProduct { moduli } if moduli.len() == 1 => GroupDesc::Cyclic { n: moduli[0] },
            GroupSpec::CyclicProduct { moduli } => GroupDesc::CyclicProduct { moduli: moduli.clone() },
            GroupSpec::VectorSpace { p, n } => GroupDesc::VectorSpace { p: *p, n: *n },
            GroupSpec::Table { table } => GroupDesc::Table { table: table.clone() },
        }
    }
}

/// An element given by index or by coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemRef {
    Index(usize),
    Coords(Vec<usize>),
}

impl ElemRef {
    pub fn resolve(&self, group: &Group) -> Result<Element> {
        match self {
            ElemRef::Index(i) => group.check(*i),
            ElemRef::Coords(c) => group.from_coords(c),
        }
    }
}

fn resolve_all(group: &Group, refs: &[ElemRef]) -> Result<Vec<Element>> {
    refs.iter().map(|r| r.resolve(group)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetGen {
    Explicit {
        elements: Vec<ElemRef>,
    },
    /// Each element independently with probability `density`.
    Random {
        #[serde(with = "rational::as_string")]
        density: Rational,
        seed: u64,
    },
    /// `⋃ r·⟨generators⟩`.
    SubgroupUnion {
        generators: Vec<ElemRef>,
        representatives: Vec<ElemRef>,
    },
    /// `start · step^i` for `i < length`.
    Ap {
        start: ElemRef,
        step: ElemRef,
        length: usize,
    },
    Gap {
        base: ElemRef,
        generators: Vec<ElemRef>,
        lengths: Vec<usize>,
    },
    /// `{x : x_i < lengths_i}` in coordinates.
    Box {
        lengths: Vec<usize>,
    },
}

impl SetGen {
    pub fn build(&self, group: &Arc<Group>) -> Result<GSet> {
        match self {
            SetGen::Explicit { elements } => GSet::new(group, resolve_all(group, elements)?),
            SetGen::Random { density, seed } => {
                if *density.numer() < 0 || density.numer() > density.denom() {
                    return Err(Error::InvalidArgument("density must lie in [0, 1]".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let (num, den) = (*density.numer() as u64, *density.denom() as u64);
                let picks: Vec<Element> = group.elements().filter(|_| rng.random_range(0..den) < num).collect();
                GSet::new(group, picks)
            }
            SetGen::SubgroupUnion {
                generators,
                representatives,
            } => {
                let h = generated_subgroup(group, &resolve_all(group, generators)?)?;
                resolve_all(group, representatives)?
                    .into_iter()
                    .try_fold(GSet::empty(group), |acc, r| acc.union(&h.left_translate(r)?))
            }
            SetGen::Ap { start, step, length } => {
                let (s, d) = (start.resolve(group)?, step.resolve(group)?);
                let mut cur = s;
                let mut out = Vec::with_capacity(*length);
                for _ in 0..*length {
                    out.push(cur);
                    cur = group.op(cur, d);
                }
                GSet::new(group, out)
            }
            SetGen::Gap {
                base,
                generators,
                lengths,
            } => {
                let spec = GapSpec {
                    base: base.resolve(group)?,
                    generators: resolve_all(group, generators)?,
                    lengths: lengths.clone(),
                };
                Ok(gap_realize(&spec, group, false)?.set)
            }
            SetGen::Box { lengths } => {
                let moduli = group
                    .moduli()
                    .ok_or_else(|| Error::Unsupported("boxes need coordinates".into()))?;
                if lengths.len() != moduli.len() {
                    return Err(Error::InvalidArgument(format!(
                        "box needs {} side lengths",
                        moduli.len()
                    )));
                }
                let mut out = Vec::new();
                for x in group.elements() {
                    if group.coords(x)?.iter().zip(lengths).all(|(c, n)| c < n) {
                        out.push(x);
                    }
                }
                GSet::new(group, out)
            }
        }
    }
}

/// A set together with its group. Exactly one of `elements` and `set`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDescriptor {
    pub group: GroupDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElemRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetGen>,
}

impl SetDescriptor {
    pub fn new(group: GroupDesc, set: SetGen) -> SetDescriptor {
        SetDescriptor {
            group,
            elements: None,
            set: Some(set),
        }
    }

    pub fn from_set(set: &GSet) -> SetDescriptor {
        SetDescriptor {
            group: GroupDesc::from_spec(set.group().spec()),
            elements: Some(set.iter().map(ElemRef::Index).collect()),
            set: None,
        }
    }

    pub fn build(&self) -> Result<GSet> {
        let group = self.group.build()?;
        self.build_in(&group)
    }

    /// Builds inside an already constructed group, which must match.
    pub fn build_in(&self, group: &Arc<Group>) -> Result<GSet> {
        if self.group.build()?.spec() != group.spec() {
            return Err(Error::GroupMismatch);
        }
        match (&self.elements, &self.set) {
            (Some(e), None) => SetGen::Explicit { elements: e.clone() }.build(group),
            (None, Some(g)) => g.build(group),
            _ => Err(Error::InvalidArgument(
                "a set descriptor needs exactly one of \"elements\" and \"set\"".into(),
            )),
        }
    }

    pub fn from_json(text: &str) -> Result<SetDescriptor> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A finite map `domain → target` given by its pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub source: GroupDesc,
    pub target: GroupDesc,
    pub pairs: Vec<(ElemRef, ElemRef)>,
}

impl MapDescriptor {
    pub fn build(&self) -> Result<FreimanMap> {
        let source = self.source.build()?;
        let target = self.target.build()?;
        let pairs = self
            .pairs
            .iter()
            .map(|(x, y)| Ok((x.resolve(&source)?, y.resolve(&target)?)))
            .collect::<Result<Vec<_>>>()?;
        FreimanMap::new(&source, &target, pairs)
    }

    pub fn from_json(text: &str) -> Result<MapDescriptor> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_and_coordinate_elements() {
        let d = SetDescriptor::from_json(r#"{"group":{"kind":"cyclic_product","moduli":[2,4]},"elements":[0,[1,1],3]}"#).unwrap();
        let s = d.build().unwrap();
        assert_eq!(s.to_vec(), vec![0, 3]);
    }

    #[test]
    fn generators() {
        let g = Group::cyclic(100).unwrap();
        let ap = SetGen::Ap {
            start: ElemRef::Index(98),
            step: ElemRef::Index(1),
            length: 4,
        };
        assert_eq!(ap.build(&g).unwrap().to_vec(), vec![0, 1, 98, 99]);
        let gap = SetGen::Gap {
            base: ElemRef::Index(0),
            generators: vec![ElemRef::Index(1), ElemRef::Index(10)],
            lengths: vec![3, 3],
        };
        assert_eq!(gap.build(&g).unwrap().len(), 9);
        let union = SetGen::SubgroupUnion {
            generators: vec![ElemRef::Index(25)],
            representatives: vec![ElemRef::Index(0), ElemRef::Index(1)],
        };
        assert_eq!(union.build(&g).unwrap().to_vec(), vec![0, 1, 25, 26, 50, 51, 75, 76]);
        let r1 = SetGen::Random {
            density: Rational::new(1, 3),
            seed: 4,
        };
        assert_eq!(r1.build(&g).unwrap(), r1.build(&g).unwrap());
        let v = Group::vector_space(3, 2).unwrap();
        let bx = SetGen::Box { lengths: vec![2, 1] };
        assert_eq!(bx.build(&v).unwrap().len(), 2);
    }

    #[test]
    fn round_trip_and_errors() {
        let g = Group::symmetric(3).unwrap();
        let s = GSet::new(&g, [0, 4]).unwrap();
        let d = SetDescriptor::from_set(&s);
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(SetDescriptor::from_json(&text).unwrap().build().unwrap(), s);
        assert!(SetDescriptor::from_json(r#"{"group":{"kind":"cyclic","n":5}}"#).unwrap().build().is_err());
        assert!(SetDescriptor::from_json(r#"{"group":{"kind":"cyclic","n":5},"elements":[7]}"#).unwrap().build().is_err());
    }

    #[test]
    fn map_descriptor() {
        let m = MapDescriptor::from_json(
            r#"{"source":{"kind":"cyclic","n":5},"target":{"kind":"cyclic","n":10},"pairs":[[0,0],[1,2],[2,4]]}"#,
        )
        .unwrap()
        .build()
        .unwrap();
        assert_eq!(m.apply(1), Some(2));
    }
}
