//! Finite categories, functors and natural transformations.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::ufcore::{FinSet, UfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("duplicate arrow name `{0}`")]
    DuplicateArrow(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("composite {g} ∘ {f} is not defined")]
    MissingComposite { g: String, f: String },
    #[error("composite {g} ∘ {f} = {h} has the wrong type")]
    IllTyped { g: String, f: String, h: String },
    #[error("{g} ∘ {f} given twice with different results")]
    Conflict { g: String, f: String },
    #[error("`{0}` and `{1}` are not composable")]
    NotComposable(String, String),
    #[error("associativity fails at {h} ∘ {g} ∘ {f}")]
    NotAssociative { h: String, g: String, f: String },
    #[error("identity law fails at `{0}`")]
    Identity(String),
    #[error(transparent)]
    Set(#[from] UfError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CatArrow {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite category with named arrows and an explicit composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    name: String,
    objects: FinSet,
    arrows: Vec<CatArrow>,
    ids: Vec<usize>,
    comp: BTreeMap<(usize, usize), usize>,
}

impl FinCategory {
    /// Build a category from its non-identity arrows `(name, src, dst)` and the
    /// composites `(g, f, g∘f)` of non-identity composable pairs. Identities
    /// named `id_<object>` are added. The result is checked.
    pub fn new(
        name: impl Into<String>,
        objects: FinSet,
        arrows: &[(&str, &str, &str)],
        composites: &[(&str, &str, &str)],
    ) -> Result<FinCategory, CategoryError> {
        let mut all: Vec<CatArrow> = (0..objects.len())
            .map(|x| CatArrow {
                name: format!("id_{}", objects.label(x)),
                src: x,
                dst: x,
            })
            .collect();
        for (n, s, d) in arrows {
            let obj = |o: &str| objects.position(o).ok_or_else(|| CategoryError::UnknownObject(o.to_string()));
            all.push(CatArrow {
                name: n.to_string(),
                src: obj(s)?,
                dst: obj(d)?,
            });
        }
        let ids = (0..objects.len()).collect();
        let mut cat = FinCategory {
            name: name.into(),
            objects,
            arrows: all,
            ids,
            comp: BTreeMap::new(),
        };
        let find = |c: &FinCategory, n: &str| c.find(n).ok_or_else(|| CategoryError::UnknownArrow(n.to_string()));
        let mut table = BTreeMap::new();
        for (g, f, h) in composites {
            let (g, f, h) = (find(&cat, g)?, find(&cat, f)?, find(&cat, h)?);
            if table.insert((g, f), h).is_some_and(|old| old != h) {
                return Err(CategoryError::Conflict {
                    g: cat.arrows[g].name.clone(),
                    f: cat.arrows[f].name.clone(),
                });
            }
        }
        for a in 0..cat.arrows.len() {
            table.insert((cat.ids[cat.arrows[a].dst], a), a);
            table.insert((a, cat.ids[cat.arrows[a].src]), a);
        }
        cat.comp = table;
        cat.validate()?;
        Ok(cat)
    }

    /// Assemble a category from raw parts, then check it.
    pub fn from_parts(
        name: impl Into<String>,
        objects: FinSet,
        arrows: Vec<CatArrow>,
        ids: Vec<usize>,
        comp: BTreeMap<(usize, usize), usize>,
    ) -> Result<FinCategory, CategoryError> {
        let cat = FinCategory {
            name: name.into(),
            objects,
            arrows,
            ids,
            comp,
        };
        cat.validate()?;
        Ok(cat)
    }

    pub fn validate(&self) -> Result<(), CategoryError> {
        let mut names = BTreeSet::new();
        for a in &self.arrows {
            if !names.insert(&a.name) {
                return Err(CategoryError::DuplicateArrow(a.name.clone()));
            }
        }
        let nm = |i: usize| self.arrows[i].name.clone();
        if self.ids.len() != self.objects.len() || self.ids.iter().any(|&i| i >= self.arrows.len()) {
            return Err(CategoryError::Identity(self.name.clone()));
        }
        if let Some(a) = self.arrows.iter().find(|a| a.src >= self.objects.len() || a.dst >= self.objects.len()) {
            return Err(CategoryError::UnknownObject(a.name.clone()));
        }
        for (x, &id) in self.ids.iter().enumerate() {
            let a = &self.arrows[id];
            if a.src != x || a.dst != x {
                return Err(CategoryError::Identity(a.name.clone()));
            }
        }
        for f in 0..self.arrows.len() {
            for g in 0..self.arrows.len() {
                let composable = self.arrows[g].src == self.arrows[f].dst;
                match (composable, self.comp.get(&(g, f))) {
                    (true, None) => return Err(CategoryError::MissingComposite { g: nm(g), f: nm(f) }),
                    (false, Some(_)) => return Err(CategoryError::NotComposable(nm(g), nm(f))),
                    (true, Some(&h)) => {
                        let (a, b) = (&self.arrows[h], (&self.arrows[f], &self.arrows[g]));
                        if a.src != b.0.src || a.dst != b.1.dst {
                            return Err(CategoryError::IllTyped { g: nm(g), f: nm(f), h: nm(h) });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for f in 0..self.arrows.len() {
            if self.comp[&(self.ids[self.arrows[f].dst], f)] != f || self.comp[&(f, self.ids[self.arrows[f].src])] != f {
                return Err(CategoryError::Identity(nm(f)));
            }
        }
        for (&(g, f), &gf) in &self.comp {
            for h in self.out_of(self.arrows[g].dst) {
                let lhs = self.comp[&(h, gf)];
                let rhs = self.comp[&(self.comp[&(h, g)], f)];
                if lhs != rhs {
                    return Err(CategoryError::NotAssociative { h: nm(h), g: nm(g), f: nm(f) });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &FinSet {
        &self.objects
    }

    pub fn arrows(&self) -> &[CatArrow] {
        &self.arrows
    }

    pub fn arrow(&self, i: usize) -> &CatArrow {
        &self.arrows[i]
    }

    pub fn id(&self, x: usize) -> usize {
        self.ids[x]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.ids[self.arrows[a].src] == a
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&a| self.arrows[a].src == x && self.arrows[a].dst == y)
            .collect()
    }

    fn out_of(&self, x: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].src == x).collect()
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    pub fn comp_table(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.comp
    }

    /// Non-identity composites as name triples `(g, f, g∘f)`.
    pub fn composite_names(&self) -> Vec<(String, String, String)> {
        self.comp
            .iter()
            .filter(|(&(g, f), _)| !self.is_identity(g) && !self.is_identity(f))
            .map(|(&(g, f), &h)| (self.arrows[g].name.clone(), self.arrows[f].name.clone(), self.arrows[h].name.clone()))
            .collect()
    }

    /// At most one arrow between any two objects.
    pub fn is_thin(&self) -> bool {
        (0..self.objects.len()).all(|x| (0..self.objects.len()).all(|y| self.hom(x, y).len() <= 1))
    }

    /// Thin with no isomorphic distinct objects.
    pub fn is_poset(&self) -> bool {
        let n = self.objects.len();
        self.is_thin()
            && (0..n).all(|x| (0..n).all(|y| x == y || self.hom(x, y).is_empty() || self.hom(y, x).is_empty()))
    }

    /// The poset on `elements` with `x ≤ y` given by `leq`; arrows named `x<y`.
    pub fn poset(name: &str, objects: FinSet, leq: impl Fn(usize, usize) -> bool) -> Result<Self, CategoryError> {
        let n = objects.len();
        let names: Vec<(String, usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && leq(x, y))
            .map(|(x, y)| (format!("{}<{}", objects.label(x), objects.label(y)), x, y))
            .collect();
        let labels = objects.clone();
        let arrows: Vec<(&str, &str, &str)> = names
            .iter()
            .map(|(nm, x, y)| (nm.as_str(), labels.label(*x), labels.label(*y)))
            .collect();
        let mut comps = Vec::new();
        for (g, gx, gy) in &names {
            for (f, fx, fy) in &names {
                if fy == gx {
                    if fx == gy {
                        continue;
                    }
                    let h = names.iter().find(|(_, a, b)| a == fx && b == gy);
                    let Some((h, _, _)) = h else {
                        return Err(CategoryError::MissingComposite { g: g.clone(), f: f.clone() });
                    };
                    comps.push((g.clone(), f.clone(), h.clone()));
                }
            }
        }
        let comps: Vec<(&str, &str, &str)> = comps.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        FinCategory::new(name, objects, &arrows, &comps)
    }
}

/// A functor given by its object and arrow maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Functor {
    pub obj: Vec<usize>,
    pub arr: Vec<usize>,
}

impl Functor {
    pub fn identity(c: &FinCategory) -> Functor {
        Functor {
            obj: (0..c.objects().len()).collect(),
            arr: (0..c.arrows().len()).collect(),
        }
    }

    pub fn is_valid(&self, src: &FinCategory, dst: &FinCategory) -> bool {
        self.obj.len() == src.objects().len()
            && self.arr.len() == src.arrows().len()
            && src.arrows().iter().enumerate().all(|(i, a)| {
                let b = dst.arrow(self.arr[i]);
                b.src == self.obj[a.src] && b.dst == self.obj[a.dst]
            })
            && (0..src.objects().len()).all(|x| self.arr[src.id(x)] == dst.id(self.obj[x]))
            && src
                .comp_table()
                .iter()
                .all(|(&(g, f), &h)| dst.compose(self.arr[g], self.arr[f]) == Some(self.arr[h]))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Functor {
        Functor {
            obj: self.obj.iter().map(|&x| other.obj[x]).collect(),
            arr: self.arr.iter().map(|&a| other.arr[a]).collect(),
        }
    }

    pub fn is_bijective(&self, dst: &FinCategory) -> bool {
        let objs: BTreeSet<_> = self.obj.iter().collect();
        let arrs: BTreeSet<_> = self.arr.iter().collect();
        objs.len() == self.obj.len()
            && objs.len() == dst.objects().len()
            && arrs.len() == self.arr.len()
            && arrs.len() == dst.arrows().len()
    }
}

/// Every functor `src → dst`, up to `limit` of them.
pub fn enumerate_functors(src: &FinCategory, dst: &FinCategory, limit: usize) -> Vec<Functor> {
    let n = src.objects().len();
    let m = dst.objects().len();
    let mut out = Vec::new();
    if n > 0 && m == 0 {
        return out;
    }
    let mut obj = vec![0usize; n];
    loop {
        extend_functor(src, dst, &obj, &mut vec![usize::MAX; src.arrows().len()], 0, limit, &mut out);
        if out.len() >= limit {
            return out;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            obj[k] += 1;
            if obj[k] < m {
                break;
            }
            obj[k] = 0;
        }
    }
}

fn extend_functor(
    src: &FinCategory,
    dst: &FinCategory,
    obj: &[usize],
    arr: &mut Vec<usize>,
    next: usize,
    limit: usize,
    out: &mut Vec<Functor>,
) {
    if out.len() >= limit {
        return;
    }
    if next == arr.len() {
        out.push(Functor {
            obj: obj.to_vec(),
            arr: arr.clone(),
        });
        return;
    }
    let a = src.arrow(next);
    let candidates = if src.is_identity(next) {
        vec![dst.id(obj[a.src])]
    } else {
        dst.hom(obj[a.src], obj[a.dst])
    };
    for c in candidates {
        arr[next] = c;
        let consistent = src.comp_table().iter().all(|(&(g, f), &h)| {
            let known = g <= next && f <= next && h <= next;
            !known || dst.compose(arr[g], arr[f]) == Some(arr[h])
        });
        if consistent {
            extend_functor(src, dst, obj, arr, next + 1, limit, out);
        }
    }
    arr[next] = usize::MAX;
}

/// An isomorphism `a → b`, if one exists.
pub fn find_isomorphism(a: &FinCategory, b: &FinCategory) -> Option<Functor> {
    if a.objects().len() != b.objects().len() || a.arrows().len() != b.arrows().len() {
        return None;
    }
    enumerate_functors(a, b, usize::MAX).into_iter().find(|f| f.is_bijective(b))
}

/// A natural transformation, by components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NatTrans {
    pub components: Vec<usize>,
}

impl NatTrans {
    pub fn identity(f: &Functor, dst: &FinCategory) -> NatTrans {
        NatTrans {
            components: f.obj.iter().map(|&y| dst.id(y)).collect(),
        }
    }

    pub fn is_valid(&self, src: &FinCategory, dst: &FinCategory, f: &Functor, g: &Functor) -> bool {
        (0..src.objects().len()).all(|x| {
            let c = dst.arrow(self.components[x]);
            c.src == f.obj[x] && c.dst == g.obj[x]
        }) && src.arrows().iter().enumerate().all(|(i, a)| {
            dst.compose(g.arr[i], self.components[a.src]) == dst.compose(self.components[a.dst], f.arr[i])
        })
    }
}

/// Every natural transformation `f ⇒ g`.
pub fn enumerate_nat_trans(src: &FinCategory, dst: &FinCategory, f: &Functor, g: &Functor) -> Vec<NatTrans> {
    let choices: Vec<Vec<usize>> = (0..src.objects().len()).map(|x| dst.hom(f.obj[x], g.obj[x])).collect();
    let mut partial: Vec<Vec<usize>> = vec![vec![]];
    for c in &choices {
        partial = partial
            .into_iter()
            .flat_map(|p| c.iter().map(move |&a| [p.clone(), vec![a]].concat()))
            .collect();
    }
    partial
        .into_iter()
        .map(|components| NatTrans { components })
        .filter(|t| t.is_valid(src, dst, f, g))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Monoid {
    Trivial,
    Cyclic2,
    Idempotent,
}

impl Monoid {
    fn size(self) -> usize {
        if self == Monoid::Trivial {
            1
        } else {
            2
        }
    }

    fn mul(self, a: usize, b: usize) -> usize {
        match self {
            Monoid::Trivial => 0,
            Monoid::Cyclic2 => (a + b) % 2,
            Monoid::Idempotent => a.max(b),
        }
    }
}

/// A random category with at most `max_objects` objects and at most two
/// parallel arrows: the subcategory of (chaotic category) × (monoid with at
/// most two elements) generated by random arrows.
pub fn random_category<R: Rng + ?Sized>(rng: &mut R, max_objects: usize) -> FinCategory {
    let n = rng.gen_range(1..=max_objects.max(1));
    let monoid = [Monoid::Trivial, Monoid::Cyclic2, Monoid::Idempotent][rng.gen_range(0..3)];
    let density = rng.gen_range(0.1..0.6);
    let mut set: BTreeSet<(usize, usize, usize)> = (0..n).map(|x| (x, x, 0)).collect();
    for x in 0..n {
        for y in 0..n {
            for m in 0..monoid.size() {
                if (x != y || m != 0) && rng.gen_bool(density) {
                    set.insert((x, y, m));
                }
            }
        }
    }
    loop {
        let mut grown = set.clone();
        for &(x, y, m1) in &set {
            for &(y2, z, m2) in &set {
                if y == y2 {
                    grown.insert((x, z, monoid.mul(m2, m1)));
                }
            }
        }
        if grown.len() == set.len() {
            break;
        }
        set = grown;
    }
    let objects = FinSet::range("C", n);
    let elems: Vec<(usize, usize, usize)> = set.into_iter().collect();
    let name = |&(x, y, m): &(usize, usize, usize)| match (m, x == y) {
        (0, true) => format!("id_{x}"),
        (0, false) => format!("f{x}{y}"),
        _ => format!("g{x}{y}"),
    };
    let arrows: Vec<CatArrow> = elems
        .iter()
        .map(|e| CatArrow {
            name: name(e),
            src: e.0,
            dst: e.1,
        })
        .collect();
    let pos = |e: &(usize, usize, usize)| elems.iter().position(|x| x == e).expect("closed");
    let ids = (0..n).map(|x| pos(&(x, x, 0))).collect();
    let mut comp = BTreeMap::new();
    for (fi, &(x, y, m1)) in elems.iter().enumerate() {
        for (gi, &(y2, z, m2)) in elems.iter().enumerate() {
            if y == y2 {
                comp.insert((gi, fi), pos(&(x, z, monoid.mul(m2, m1))));
            }
        }
    }
    FinCategory::from_parts(format!("R{n}{monoid:?}"), objects, arrows, ids, comp).expect("generated category is lawful")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::catalog::c2;

    #[test]
    fn builds_and_validates() {
        let c = c2();
        assert_eq!(c.arrows().len(), 3);
        assert_eq!(c.hom(0, 1).len(), 1);
        assert!(c.hom(1, 0).is_empty());
        assert!(c.is_poset());
        let bad = FinCategory::new(
            "B",
            FinSet::new("O", ["u"]).unwrap(),
            &[("e", "u", "u")],
            &[],
        );
        assert!(matches!(bad, Err(CategoryError::MissingComposite { .. })));
        let z2 = FinCategory::new("Z2", FinSet::new("O", ["u"]).unwrap(), &[("g", "u", "u")], &[("g", "g", "id_u")]);
        assert!(z2.is_ok());
    }

    #[test]
    fn functor_enumeration_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let a = random_category(&mut rng, 2);
            let b = random_category(&mut rng, 2);
            let fast = enumerate_functors(&a, &b, usize::MAX);
            // brute force over all object and arrow maps
            let mut count = 0;
            let na = a.objects().len();
            let nb = b.objects().len();
            let arrows = a.arrows().len();
            let total_obj = nb.pow(na as u32);
            let total_arr = b.arrows().len().pow(arrows as u32);
            for om in 0..total_obj {
                let obj: Vec<usize> = (0..na).map(|k| om / nb.pow(k as u32) % nb).collect();
                for am in 0..total_arr {
                    let arr: Vec<usize> = (0..arrows).map(|k| am / b.arrows().len().pow(k as u32) % b.arrows().len()).collect();
                    if (Functor { obj: obj.clone(), arr }).is_valid(&a, &b) {
                        count += 1;
                    }
                }
            }
            assert_eq!(fast.len(), count);
            assert!(fast.iter().all(|f| f.is_valid(&a, &b)));
        }
    }

    #[test]
    fn random_categories_are_small_and_lawful() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let c = random_category(&mut rng, 3);
            assert!(c.validate().is_ok());
            assert!(c.objects().len() <= 3);
            for x in 0..c.objects().len() {
                for y in 0..c.objects().len() {
                    assert!(c.hom(x, y).len() <= 2);
                }
            }
            assert!(find_isomorphism(&c, &c).is_some());
        }
    }

    #[test]
    fn posets_and_nat_trans() {
        let p = FinCategory::poset("P", FinSet::range("P", 3), |x, y| x <= y).unwrap();
        assert!(p.is_poset());
        assert_eq!(p.arrows().len(), 6);
        let fs = enumerate_functors(&p, &p, usize::MAX);
        // monotone self-maps of the 3-chain
        assert_eq!(fs.len(), 10);
        let id = Functor::identity(&p);
        assert_eq!(enumerate_nat_trans(&p, &p, &id, &id).len(), 1);
        assert!(NatTrans::identity(&id, &p).is_valid(&p, &p, &id, &id));
        assert!(find_isomorphism(&p, &c2()).is_none());
    }
}
