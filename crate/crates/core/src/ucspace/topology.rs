//! Finite topological spaces and their two-valued ultraconvergence encoding.

use std::fmt;

use thiserror::Error;

use super::opens::is_open;
use super::{label, Arrow, HomKey, Index, Label, UCSpace, UltraSpace, Universe};
use crate::ufcore::{FinSet, Subset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("refusing to enumerate topologies on {0} points")]
    TooLarge(usize),
}

/// A topology on a finite set, as its sorted family of open sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinTopSpace {
    points: FinSet,
    opens: Vec<Subset>,
}

impl FinTopSpace {
    pub fn new(points: FinSet, opens: impl IntoIterator<Item = Subset>) -> Result<FinTopSpace, TopologyError> {
        let mut opens: Vec<Subset> = opens.into_iter().collect();
        opens.sort();
        opens.dedup();
        let full = points.full();
        let show = |s: Subset| points.fmt_subset(s);
        if let Some(&u) = opens.iter().find(|u| !u.is_subset_of(full)) {
            return Err(TopologyError::NotATopology(format!("{} is not a subset", show(u))));
        }
        if !opens.contains(&Subset::EMPTY) {
            return Err(TopologyError::NotATopology("∅ is not open".into()));
        }
        if !opens.contains(&full) {
            return Err(TopologyError::NotATopology("the whole space is not open".into()));
        }
        for &a in &opens {
            for &b in &opens {
                if opens.binary_search(&a.union(b)).is_err() {
                    return Err(TopologyError::NotATopology(format!("{} ∪ {} is not open", show(a), show(b))));
                }
                if opens.binary_search(&a.intersection(b)).is_err() {
                    return Err(TopologyError::NotATopology(format!("{} ∩ {} is not open", show(a), show(b))));
                }
            }
        }
        Ok(FinTopSpace { points, opens })
    }

    pub fn discrete(points: FinSet) -> FinTopSpace {
        let opens: Vec<Subset> = points.subsets().collect();
        FinTopSpace::new(points, opens).expect("power set")
    }

    pub fn indiscrete(points: FinSet) -> FinTopSpace {
        let full = points.full();
        FinTopSpace::new(points, [Subset::EMPTY, full]).expect("indiscrete")
    }

    pub fn points(&self) -> &FinSet {
        &self.points
    }

    pub fn opens(&self) -> &[Subset] {
        &self.opens
    }

    pub fn is_open(&self, u: Subset) -> bool {
        self.opens.binary_search(&u).is_ok()
    }

    /// `x ≼ y`: every open neighbourhood of `x` contains `y`.
    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.opens.iter().all(|u| !u.contains(x) || u.contains(y))
    }

    /// Continuity of a point map into another topology.
    pub fn is_continuous(&self, dst: &FinTopSpace, map: &[usize]) -> bool {
        dst.opens.iter().all(|&v| {
            let pre = Subset::from_indices((0..self.points.len()).filter(|&x| v.contains(map[x])));
            self.is_open(pre)
        })
    }

    /// The subspace topology on `keep`, with points relabelled in increasing order.
    pub fn subspace(&self, keep: Subset) -> FinTopSpace {
        let old: Vec<usize> = keep.iter().filter(|&i| i < self.points.len()).collect();
        let points = FinSet::new(
            format!("{}|{}", self.points.name(), self.points.fmt_subset(keep)),
            old.iter().map(|&p| self.points.label(p).to_string()),
        )
        .expect("distinct labels");
        let opens = self
            .opens
            .iter()
            .map(|u| Subset::from_indices((0..old.len()).filter(|&i| u.contains(old[i]))));
        FinTopSpace::new(points, opens.collect::<Vec<_>>()).expect("subspace topology")
    }
}

impl fmt::Display for FinTopSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opens: Vec<String> = self.opens.iter().map(|&u| self.points.fmt_subset(u)).collect();
        write!(f, "{} with opens {}", self.points, opens.join(" "))
    }
}

/// The Sierpiński space: points `0`, `1`; opens `∅`, `{1}`, `{0,1}`.
pub fn sierpinski() -> FinTopSpace {
    let pts = FinSet::new("S", ["0", "1"]).expect("labels");
    FinTopSpace::new(pts, [Subset::EMPTY, Subset::singleton(1), Subset::full(2)]).expect("Sierpiński")
}

/// Every topology on `{0, …, n-1}`, by brute force over families of subsets.
pub fn enumerate_topologies(n: usize) -> Result<Vec<FinTopSpace>, TopologyError> {
    if n > 4 {
        return Err(TopologyError::TooLarge(n));
    }
    let points = FinSet::range("T", n);
    let full = Subset::full(n);
    let proper: Vec<Subset> = Subset::all(n).filter(|&s| !s.is_empty() && s != full).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << proper.len()) {
        let mut fam = vec![Subset::EMPTY, full];
        fam.extend((0..proper.len()).filter(|b| mask >> b & 1 == 1).map(|b| proper[b]));
        if let Ok(t) = FinTopSpace::new(points.clone(), fam) {
            out.push(t);
        }
    }
    Ok(out)
}

/// The two-valued space of a topology: one ultra-arrow `*` of type
/// `x ⇝ lim (y)_{i→μ}` iff every open neighbourhood of `x` contains `y`.
#[derive(Clone, Debug)]
pub struct EncodedSpace {
    name: String,
    top: FinTopSpace,
    universe: Universe,
    star: Label,
}

impl EncodedSpace {
    pub fn new(top: &FinTopSpace, universe: &Universe) -> EncodedSpace {
        EncodedSpace {
            name: format!("Top({})", top.points().name()),
            top: top.clone(),
            universe: universe.clone(),
            star: label("*"),
        }
    }

    fn star_if(&self, ok: bool) -> Option<Label> {
        ok.then(|| self.star.clone())
    }

    fn is_star(&self, r: &Arrow) -> bool {
        r.label == self.star && self.top.specializes(r.src(), r.dst())
    }
}

impl UltraSpace for EncodedSpace {
    fn name(&self) -> &str {
        &self.name
    }

    fn points(&self) -> &FinSet {
        self.top.points()
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn hom(&self, key: &HomKey) -> Vec<Label> {
        self.star_if(self.top.specializes(key.src, key.dst())).into_iter().collect()
    }

    fn ident(&self, _x: usize) -> Option<Label> {
        Some(self.star.clone())
    }

    fn reindex(&self, r: &Arrow, _kappa: Index) -> Option<Label> {
        self.star_if(self.is_star(r))
    }

    fn compose(&self, s: &Arrow, r: &Arrow) -> Option<Label> {
        self.star_if(self.is_star(s) && self.is_star(r) && s.src() == r.dst())
    }
}

pub fn topology_encode(top: &FinTopSpace, universe: &Universe) -> UCSpace {
    UCSpace::materialize(&EncodedSpace::new(top, universe))
}

/// The opens of a space: subsets `U` such that every ultra-arrow out of a
/// point of `U` targets a family eventually in `U`.
pub fn topology_decode(space: &dyn UltraSpace) -> FinTopSpace {
    let opens: Vec<Subset> = space.points().subsets().filter(|&u| is_open(space, u)).collect();
    FinTopSpace::new(space.points().clone(), opens).expect("opens of an ultraconvergence space form a topology")
}
