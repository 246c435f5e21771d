//! Finite ultraconvergence spaces.
//!
//! Index objects are principal ultrafilters `(I, [i0])` on `I = {0, …, n-1}`,
//! written [`Index`]. A target family `(y_i)_{i→μ}` is held by its normal form
//! (the value at the point of μ), written [`Target`]. Because any two principal
//! index objects are joined by exactly one `UF`-arrow class, reindexing is
//! keyed by the new index object alone, and a μ-family of ultra-arrows is held
//! by its value at the point, extended constantly. The composite
//! `(s)_{i→μ} · r` of `r : x ⇝ (μ, y)` and `s : y ⇝ (ν, z)` therefore lands
//! at index `μ ⊗ ν`; it is only tabulated when that index lies in the declared
//! [`Universe`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::ufcore::{uf_hom, FinSet, FinUltrafilter, Subset, UfArrow};

mod alexandroff;
mod axioms;
mod category;
mod opens;
mod topology;

pub use alexandroff::{alexandroff, specialization, specialization_with_arrows, AlexSpace};
pub use axioms::{check_axioms, check_principal_collapse, Axiom, AxiomReport, TableEntry, Violation};
pub use category::{
    enumerate_functors, enumerate_nat_trans, find_isomorphism, random_category, CatArrow, CategoryError,
    FinCategory, Functor, NatTrans,
};
pub use opens::{characteristic_map, closure, is_open, is_topological, open_witness, opens_frame, Frame, OpensError};
pub use topology::{enumerate_topologies, EncodedSpace, sierpinski, topology_decode, topology_encode, FinTopSpace, TopologyError};

/// An opaque ultra-arrow label.
pub type Label = Arc<str>;

pub fn label(s: impl AsRef<str>) -> Label {
    Arc::from(s.as_ref())
}

/// The principal ultrafilter `[point]` on `{0, …, size-1}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    pub size: usize,
    pub point: usize,
}

impl Index {
    pub const ONE: Index = Index { size: 1, point: 0 };

    pub fn new(size: usize, point: usize) -> Option<Index> {
        (point < size).then_some(Index { size, point })
    }

    /// `self ⊗ other`, lexicographic with the outer index first.
    pub fn tensor(self, other: Index) -> Index {
        Index {
            size: self.size * other.size,
            point: self.point * other.size + other.point,
        }
    }

    pub fn carrier(self) -> FinSet {
        if self.size == 1 {
            FinUltrafilter::one().carrier().clone()
        } else {
            FinSet::range(format!("I{}", self.size), self.size)
        }
    }

    pub fn ultrafilter(self) -> FinUltrafilter {
        if self.size == 1 {
            FinUltrafilter::one()
        } else {
            crate::ufcore::mk_principal(&self.carrier(), &self.point.to_string()).expect("point in range")
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.size, self.point)
    }
}

impl FromStr for Index {
    type Err = UniverseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || UniverseError::Syntax(s.to_string());
        let (n, p) = s.trim().split_once(':').ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let p = p.trim().parse().map_err(|_| bad())?;
        Index::new(n, p).ok_or_else(bad)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("malformed universe or index `{0}` (expected `upto:N` or `n:p,n:p,...`)")]
    Syntax(String),
    #[error("universe must contain the singleton index 1:0")]
    MissingOne,
}

/// The finite set of index objects over which hom tables range.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Universe(Vec<Index>);

impl Universe {
    pub fn new(indices: impl IntoIterator<Item = Index>) -> Result<Universe, UniverseError> {
        let mut v: Vec<Index> = indices.into_iter().collect();
        v.sort();
        v.dedup();
        if !v.contains(&Index::ONE) {
            return Err(UniverseError::MissingOne);
        }
        Ok(Universe(v))
    }

    /// Every `(I, [i])` with `|I| ≤ n`.
    pub fn up_to(n: usize) -> Universe {
        Universe::new((1..=n.max(1)).flat_map(|s| (0..s).map(move |p| Index { size: s, point: p })))
            .expect("contains 1:0")
    }

    pub fn singleton() -> Universe {
        Universe(vec![Index::ONE])
    }

    pub fn indices(&self) -> &[Index] {
        &self.0
    }

    pub fn contains(&self, i: Index) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Representatives of the `UF`-arrow classes `src → dst`.
    pub fn arrows(&self, src: Index, dst: Index) -> Vec<UfArrow> {
        uf_hom(&src.ultrafilter(), &dst.ultrafilter())
    }
}

impl Default for Universe {
    fn default() -> Self {
        Universe::up_to(2)
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Index::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Universe {
    type Err = UniverseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("upto:") {
            let n = n.trim().parse().map_err(|_| UniverseError::Syntax(s.to_string()))?;
            return Ok(Universe::up_to(n));
        }
        let indices = s.split(',').map(str::parse).collect::<Result<Vec<Index>, _>>()?;
        Universe::new(indices)
    }
}

/// A target ultrafamily of points, held by its value at the index point.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Target {
    pub index: Index,
    pub point: usize,
}

impl Target {
    /// The 1-family at `y`.
    pub fn one(point: usize) -> Target {
        Target { index: Index::ONE, point }
    }

    pub fn at(self, index: Index) -> Target {
        Target { index, point: self.point }
    }
}

/// The type `x ⇝ lim (y_i)_{i→μ}` of an ultra-arrow.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomKey {
    pub src: usize,
    pub target: Target,
}

impl HomKey {
    pub fn new(src: usize, index: Index, point: usize) -> HomKey {
        HomKey {
            src,
            target: Target { index, point },
        }
    }

    pub fn index(&self) -> Index {
        self.target.index
    }

    pub fn dst(&self) -> usize {
        self.target.point
    }
}

/// An ultra-arrow together with its type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub key: HomKey,
    pub label: Label,
}

impl Arrow {
    pub fn new(key: HomKey, label: Label) -> Arrow {
        Arrow { key, label }
    }

    pub fn index(&self) -> Index {
        self.key.target.index
    }

    pub fn src(&self) -> usize {
        self.key.src
    }

    pub fn dst(&self) -> usize {
        self.key.target.point
    }

    /// `label:src->dst@n:p` with point labels.
    pub fn display(&self, points: &FinSet) -> String {
        format!(
            "{}:{}->{}@{}",
            self.label,
            points.label(self.src()),
            points.label(self.dst()),
            self.index()
        )
    }
}

/// Read access to the structure of a (possibly lazily computed) space.
pub trait UltraSpace: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;
    fn points(&self) -> &FinSet;
    fn universe(&self) -> &Universe;
    /// Labels of `Hom_ult(x, (y)_{i→μ})`, in canonical order.
    fn hom(&self, key: &HomKey) -> Vec<Label>;
    fn ident(&self, x: usize) -> Option<Label>;
    /// `r[h]` for the unique class `h : κ → r.index()`.
    fn reindex(&self, r: &Arrow, kappa: Index) -> Option<Label>;
    /// `(s)_{i→μ} · r`, landing at index `r.index() ⊗ s.index()`.
    fn compose(&self, s: &Arrow, r: &Arrow) -> Option<Label>;

    fn has_arrow(&self, key: &HomKey, label: &str) -> bool {
        self.hom(key).iter().any(|l| &**l == label)
    }

    fn targets(&self) -> Vec<Target> {
        let n = self.points().len();
        self.universe()
            .indices()
            .iter()
            .flat_map(|&index| (0..n).map(move |point| Target { index, point }))
            .collect()
    }

    fn hom_keys(&self) -> Vec<HomKey> {
        let targets = self.targets();
        (0..self.points().len())
            .flat_map(|src| targets.iter().map(move |&target| HomKey { src, target }))
            .collect()
    }

    fn arrows_from(&self, x: usize) -> Vec<Arrow> {
        self.targets()
            .into_iter()
            .flat_map(|target| {
                let key = HomKey { src: x, target };
                self.hom(&key).into_iter().map(move |label| Arrow { key, label })
            })
            .collect()
    }

    fn arrows(&self) -> Vec<Arrow> {
        (0..self.points().len()).flat_map(|x| self.arrows_from(x)).collect()
    }

    fn identity_arrow(&self, x: usize) -> Option<Arrow> {
        self.ident(x).map(|label| Arrow {
            key: HomKey::new(x, Index::ONE, x),
            label,
        })
    }

    fn reindex_arrow(&self, r: &Arrow, kappa: Index) -> Option<Arrow> {
        self.reindex(r, kappa).map(|label| Arrow {
            key: HomKey {
                src: r.src(),
                target: r.key.target.at(kappa),
            },
            label,
        })
    }

    fn compose_arrow(&self, s: &Arrow, r: &Arrow) -> Option<Arrow> {
        if s.src() != r.dst() {
            return None;
        }
        let index = r.index().tensor(s.index());
        self.compose(s, r).map(|label| Arrow {
            key: HomKey::new(r.src(), index, s.dst()),
            label,
        })
    }

    /// `x ⇝ lim (y)_{i→μ}` has at least one witness.
    fn converges(&self, x: usize, target: Target) -> bool {
        !self.hom(&HomKey { src: x, target }).is_empty()
    }
}

/// A space given by explicit tables. Any table may be malformed; use
/// [`check_axioms`] to validate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UCSpace {
    name: String,
    points: FinSet,
    universe: Universe,
    hom: BTreeMap<HomKey, Vec<Label>>,
    idents: BTreeMap<usize, Label>,
    reindex: BTreeMap<(Arrow, Index), Label>,
    comp: BTreeMap<(Arrow, Arrow), Label>,
}

impl UCSpace {
    /// A space with the given points and no arrows or structure yet.
    pub fn empty_tables(name: impl Into<String>, points: FinSet, universe: Universe) -> UCSpace {
        UCSpace {
            name: name.into(),
            points,
            universe,
            hom: BTreeMap::new(),
            idents: BTreeMap::new(),
            reindex: BTreeMap::new(),
            comp: BTreeMap::new(),
        }
    }

    /// Tabulate every entry of another space.
    pub fn materialize(space: &dyn UltraSpace) -> UCSpace {
        UCSpace::materialize_as(space, space.name())
    }

    pub fn materialize_as(space: &dyn UltraSpace, name: &str) -> UCSpace {
        let mut out = UCSpace::empty_tables(name, space.points().clone(), space.universe().clone());
        let mut by_src: Vec<Vec<Arrow>> = vec![Vec::new(); space.points().len()];
        for key in space.hom_keys() {
            let labels = space.hom(&key);
            if labels.is_empty() {
                continue;
            }
            for l in &labels {
                by_src[key.src].push(Arrow::new(key, l.clone()));
            }
            out.hom.insert(key, labels);
        }
        for x in 0..space.points().len() {
            if let Some(id) = space.ident(x) {
                out.idents.insert(x, id);
            }
        }
        let universe = space.universe().clone();
        for r in by_src.iter().flatten() {
            for &kappa in universe.indices() {
                if let Some(l) = space.reindex(r, kappa) {
                    out.reindex.insert((r.clone(), kappa), l);
                }
            }
            for s in &by_src[r.dst()] {
                if universe.contains(r.index().tensor(s.index())) {
                    if let Some(l) = space.compose(s, r) {
                        out.comp.insert((s.clone(), r.clone()), l);
                    }
                }
            }
        }
        out
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn set_hom(&mut self, key: HomKey, labels: Vec<Label>) {
        if labels.is_empty() {
            self.hom.remove(&key);
        } else {
            self.hom.insert(key, labels);
        }
    }

    pub fn add_arrow(&mut self, key: HomKey, l: Label) {
        let entry = self.hom.entry(key).or_default();
        if !entry.contains(&l) {
            entry.push(l);
        }
    }

    pub fn remove_arrow(&mut self, key: &HomKey, l: &str) {
        if let Some(v) = self.hom.get_mut(key) {
            v.retain(|x| &**x != l);
            if v.is_empty() {
                self.hom.remove(key);
            }
        }
    }

    pub fn set_ident(&mut self, x: usize, l: Option<Label>) {
        match l {
            Some(l) => self.idents.insert(x, l),
            None => self.idents.remove(&x),
        };
    }

    pub fn set_reindex(&mut self, r: Arrow, kappa: Index, l: Option<Label>) {
        match l {
            Some(l) => self.reindex.insert((r, kappa), l),
            None => self.reindex.remove(&(r, kappa)),
        };
    }

    pub fn set_comp(&mut self, s: Arrow, r: Arrow, l: Option<Label>) {
        match l {
            Some(l) => self.comp.insert((s, r), l),
            None => self.comp.remove(&(s, r)),
        };
    }

    pub fn hom_table(&self) -> &BTreeMap<HomKey, Vec<Label>> {
        &self.hom
    }

    pub fn ident_table(&self) -> &BTreeMap<usize, Label> {
        &self.idents
    }

    pub fn reindex_table(&self) -> &BTreeMap<(Arrow, Index), Label> {
        &self.reindex
    }

    pub fn comp_table(&self) -> &BTreeMap<(Arrow, Arrow), Label> {
        &self.comp
    }

    /// Table size as (arrows, reindex entries, composition entries).
    pub fn size(&self) -> (usize, usize, usize) {
        (
            self.hom.values().map(Vec::len).sum(),
            self.reindex.len(),
            self.comp.len(),
        )
    }

    /// The full subspace on a set of points, relabelled in increasing order.
    pub fn subspace(&self, keep: Subset) -> UCSpace {
        let old: Vec<usize> = keep.iter().filter(|&i| i < self.points.len()).collect();
        let new_of = |p: usize| old.iter().position(|&q| q == p);
        let points = FinSet::new(
            format!("{}|{}", self.points.name(), self.points.fmt_subset(keep)),
            old.iter().map(|&p| self.points.label(p).to_string()),
        )
        .expect("labels stay distinct");
        let map_key = |k: &HomKey| -> Option<HomKey> {
            Some(HomKey::new(new_of(k.src)?, k.index(), new_of(k.dst())?))
        };
        let map_arrow = |a: &Arrow| map_key(&a.key).map(|key| Arrow::new(key, a.label.clone()));
        let mut out = UCSpace::empty_tables(format!("{}|sub", self.name), points, self.universe.clone());
        for (k, v) in &self.hom {
            if let Some(k) = map_key(k) {
                out.hom.insert(k, v.clone());
            }
        }
        for (&x, l) in &self.idents {
            if let Some(x) = new_of(x) {
                out.idents.insert(x, l.clone());
            }
        }
        for ((r, kappa), l) in &self.reindex {
            if let Some(r) = map_arrow(r) {
                out.reindex.insert((r, *kappa), l.clone());
            }
        }
        for ((s, r), l) in &self.comp {
            if let (Some(s), Some(r)) = (map_arrow(s), map_arrow(r)) {
                out.comp.insert((s, r), l.clone());
            }
        }
        out
    }
}

impl UltraSpace for UCSpace {
    fn name(&self) -> &str {
        &self.name
    }

    fn points(&self) -> &FinSet {
        &self.points
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn hom(&self, key: &HomKey) -> Vec<Label> {
        self.hom.get(key).cloned().unwrap_or_default()
    }

    fn ident(&self, x: usize) -> Option<Label> {
        self.idents.get(&x).cloned()
    }

    fn reindex(&self, r: &Arrow, kappa: Index) -> Option<Label> {
        self.reindex.get(&(r.clone(), kappa)).cloned()
    }

    fn compose(&self, s: &Arrow, r: &Arrow) -> Option<Label> {
        self.comp.get(&(s.clone(), r.clone())).cloned()
    }

    fn arrows_from(&self, x: usize) -> Vec<Arrow> {
        let lo = HomKey::new(x, Index { size: 0, point: 0 }, 0);
        self.hom
            .range(lo..)
            .take_while(|(k, _)| k.src == x)
            .flat_map(|(k, v)| v.iter().map(move |l| Arrow::new(*k, l.clone())))
            .collect()
    }
}

/// Hom sets of two spaces agree entry by entry after matching labels.
pub fn same_structure(a: &dyn UltraSpace, b: &dyn UltraSpace) -> bool {
    if a.points() != b.points() || a.universe() != b.universe() {
        return false;
    }
    let (ta, tb) = (UCSpace::materialize_as(a, ""), UCSpace::materialize_as(b, ""));
    ta == tb
}
