//! Open subspaces, closure, the frame of opens and topologicality.

use thiserror::Error;

use super::{HomKey, Index, Target, UltraSpace};
use crate::ufcore::Subset;

pub use crate::ucmaps::characteristic_map;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpensError {
    #[error("{subset} is not open: {witness}")]
    NotOpen { subset: String, witness: String },
}

/// A point of `u` with an ultra-arrow to a family outside `u`, if any.
pub fn open_witness(space: &dyn UltraSpace, u: Subset) -> Option<HomKey> {
    let targets = space.targets();
    u.iter().filter(|&x| x < space.points().len()).find_map(|x| {
        targets
            .iter()
            .filter(|t| !u.contains(t.point))
            .map(|&target| HomKey { src: x, target })
            .find(|key| !space.hom(key).is_empty())
    })
}

/// `U` is open iff `x ∈ U` and `x ⇝ lim (y_i)_{i→μ}` imply `y_i ∈ U` μ-eventually.
pub fn is_open(space: &dyn UltraSpace, u: Subset) -> bool {
    open_witness(space, u).is_none()
}

/// Points that converge to some ultrafamily lying eventually in `s`.
pub fn closure(space: &dyn UltraSpace, s: Subset) -> Subset {
    let targets: Vec<Target> = space.targets().into_iter().filter(|t| s.contains(t.point)).collect();
    Subset::from_indices(
        (0..space.points().len()).filter(|&x| targets.iter().any(|&t| space.converges(x, t))),
    )
}

/// The opens of a space, with the frame laws available as a check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub size: usize,
    pub opens: Vec<Subset>,
}

impl Frame {
    pub fn contains(&self, u: Subset) -> bool {
        self.opens.binary_search(&u).is_ok()
    }

    /// Finite meets and all joins, checked exhaustively.
    pub fn check_laws(&self) -> Result<(), String> {
        if !self.contains(Subset::EMPTY) || !self.contains(Subset::full(self.size)) {
            return Err("missing bottom or top".into());
        }
        for &a in &self.opens {
            for &b in &self.opens {
                if !self.contains(a.intersection(b)) {
                    return Err(format!("meet of {:?} and {:?} missing", a, b));
                }
            }
        }
        if self.opens.len() <= 20 {
            for fam in 0u64..(1u64 << self.opens.len()) {
                let join = (0..self.opens.len())
                    .filter(|b| fam >> b & 1 == 1)
                    .fold(Subset::EMPTY, |acc, b| acc.union(self.opens[b]));
                if !self.contains(join) {
                    return Err(format!("join of family {fam:#b} missing"));
                }
            }
        } else {
            for &a in &self.opens {
                for &b in &self.opens {
                    if !self.contains(a.union(b)) {
                        return Err(format!("join of {:?} and {:?} missing", a, b));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn opens_frame(space: &dyn UltraSpace) -> Frame {
    Frame {
        size: space.points().len(),
        opens: space.points().subsets().filter(|&u| is_open(space, u)).collect(),
    }
}

/// At most one ultra-arrow of each type, and convergence along a reindexed
/// family implies convergence along the original one.
pub fn is_topological(space: &dyn UltraSpace) -> bool {
    let keys = space.hom_keys();
    if keys.iter().any(|k| space.hom(k).len() > 1) {
        return false;
    }
    // any two principal index objects are joined by a UF-arrow, so the
    // reindexing condition asks that convergence not depend on the index
    keys.iter().all(|k| {
        let here = space.converges(k.src, k.target);
        space
            .universe()
            .indices()
            .iter()
            .all(|&nu: &Index| space.converges(k.src, k.target.at(nu)) == here)
    })
}
