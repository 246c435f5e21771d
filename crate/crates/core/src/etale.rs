//! Étale maps: unique lifting of ultra-arrows along a continuous map.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::ucmaps::{check_continuous, pullback, ContinuousMap, MapError, Pullback, SpaceRef};
use crate::ucspace::{is_open, label, opens_frame, Arrow, HomKey, Index, UCSpace, UltraSpace, Universe};
use crate::ufcore::{FinSet, Subset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EtaleError {
    #[error("not continuous: {0}")]
    NotContinuous(String),
    #[error("not étale: {0}")]
    NotEtale(String),
    #[error("{0} is not open")]
    NotOpen(String),
    #[error("point map is not bijective")]
    NotBijective,
    #[error("lemma check failed: {0}")]
    LemmaViolation(String),
    #[error("local injectivity criteria disagree at {0}")]
    MethodsDisagree(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Lift counts of a continuous map, one entry per point and base arrow.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EtaleReport {
    /// `(e, r)` with no lift.
    pub missing: Vec<(usize, Arrow)>,
    /// `(e, r, count)` with more than one lift.
    pub ambiguous: Vec<(usize, Arrow, usize)>,
    pub lifts: BTreeMap<(usize, Arrow), Arrow>,
}

impl EtaleReport {
    pub fn is_etale(&self) -> bool {
        self.missing.is_empty() && self.ambiguous.is_empty()
    }

    /// A human-readable witness for the first failure.
    pub fn witness(&self, map: &ContinuousMap) -> Option<String> {
        let (e_pts, b_pts) = (map.src().points(), map.dst().points());
        if let Some((e, r)) = self.missing.first() {
            return Some(format!("{} at {} has no lift", r.display(b_pts), e_pts.label(*e)));
        }
        self.ambiguous
            .first()
            .map(|(e, r, n)| format!("{} at {} has {} lifts", r.display(b_pts), e_pts.label(*e), n))
    }
}

/// Count the lifts of every base arrow at every point, by exhaustive search.
pub fn check_etale(map: &ContinuousMap) -> EtaleReport {
    let (e_space, b_space) = (map.src(), map.dst());
    let mut rep = EtaleReport::default();
    for e in 0..e_space.points().len() {
        let mut over: BTreeMap<Arrow, Vec<Arrow>> = BTreeMap::new();
        for a in e_space.arrows_from(e) {
            if let Some(img) = map.apply(&a) {
                over.entry(img).or_default().push(a);
            }
        }
        for r in b_space.arrows_from(map.point(e)) {
            match over.remove(&r).unwrap_or_default().as_slice() {
                [] => rep.missing.push((e, r)),
                [one] => {
                    rep.lifts.insert((e, r), one.clone());
                }
                many => rep.ambiguous.push((e, r, many.len())),
            }
        }
    }
    rep
}

/// A continuous map `π : E → B` with its (validated) table of unique lifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleMap {
    map: ContinuousMap,
    lifts: BTreeMap<(usize, Arrow), Arrow>,
}

impl EtaleMap {
    pub fn new(map: ContinuousMap) -> Result<EtaleMap, EtaleError> {
        let cont = check_continuous(&map);
        if let Some(v) = cont.violations.first() {
            return Err(EtaleError::NotContinuous(format!("{}: {}", v.law, v.message)));
        }
        let rep = check_etale(&map);
        if let Some(w) = rep.witness(&map) {
            return Err(EtaleError::NotEtale(w));
        }
        Ok(EtaleMap { map, lifts: rep.lifts })
    }

    pub fn map(&self) -> &ContinuousMap {
        &self.map
    }

    pub fn total(&self) -> &SpaceRef {
        self.map.src()
    }

    pub fn base(&self) -> &SpaceRef {
        self.map.dst()
    }

    pub fn lifts(&self) -> &BTreeMap<(usize, Arrow), Arrow> {
        &self.lifts
    }

    /// The unique `r̄ : e ⇝ r(e)` over `r`.
    pub fn lift(&self, e: usize, r: &Arrow) -> Option<&Arrow> {
        self.lifts.get(&(e, r.clone()))
    }

    pub fn project(&self, e: usize) -> usize {
        self.map.point(e)
    }

    pub fn fiber(&self, b: usize) -> Subset {
        Subset::from_indices((0..self.map.points().len()).filter(|&e| self.map.point(e) == b))
    }

    /// `|E| = Σ_b |π⁻¹(b)|`.
    pub fn partition_holds(&self) -> bool {
        let fibers: Vec<Subset> = (0..self.base().points().len()).map(|b| self.fiber(b)).collect();
        let disjoint = fibers.iter().enumerate().all(|(i, a)| fibers[i + 1..].iter().all(|b| a.intersection(*b).is_empty()));
        disjoint && fibers.iter().map(|s| s.len()).sum::<usize>() == self.total().points().len()
    }

    /// `other ∘ self`, which is étale again.
    pub fn then(&self, other: &EtaleMap) -> Result<EtaleMap, EtaleError> {
        EtaleMap::new(other.map.after(&self.map)?)
    }
}

/// `π[V]` for an open `V ⊆ E`, checked to be open in `B`.
pub fn etale_image(pi: &EtaleMap, v: Subset) -> Result<Subset, EtaleError> {
    let e = pi.total();
    if !is_open(&**e, v) {
        return Err(EtaleError::NotOpen(e.points().fmt_subset(v)));
    }
    let image = Subset::from_indices(v.iter().map(|x| pi.project(x)));
    if !is_open(&**pi.base(), image) {
        return Err(EtaleError::LemmaViolation(format!(
            "image {} of an open is not open",
            pi.base().points().fmt_subset(image)
        )));
    }
    Ok(image)
}

/// The inverse of a bijective étale map: `σ(r)` is the lift of `r` at `σ(b)`.
pub fn invert_bijective_etale(pi: &EtaleMap) -> Result<ContinuousMap, EtaleError> {
    let n = pi.base().points().len();
    let mut inv = vec![usize::MAX; n];
    for (e, &b) in pi.map.points().iter().enumerate() {
        if inv[b] != usize::MAX {
            return Err(EtaleError::NotBijective);
        }
        inv[b] = e;
    }
    if inv.contains(&usize::MAX) {
        return Err(EtaleError::NotBijective);
    }
    let mut arrows = BTreeMap::new();
    for r in pi.base().arrows() {
        let lift = pi
            .lift(inv[r.src()], &r)
            .ok_or_else(|| EtaleError::LemmaViolation(format!("no lift of {}", r.display(pi.base().points()))))?;
        arrows.insert(r, lift.label.clone());
    }
    let sigma = ContinuousMap::new(pi.base().clone(), pi.total().clone(), inv, arrows)?;
    verify_inverse(pi, &sigma)?;
    Ok(sigma)
}

/// Both composites of `π` and `σ` are identities at the label level.
pub fn verify_inverse(pi: &EtaleMap, sigma: &ContinuousMap) -> Result<(), EtaleError> {
    if !check_continuous(sigma).passed() {
        return Err(EtaleError::LemmaViolation("inverse is not continuous".into()));
    }
    if pi.map.after(sigma)? != ContinuousMap::identity(pi.base().clone()) {
        return Err(EtaleError::LemmaViolation("π ∘ σ is not the identity".into()));
    }
    if sigma.after(&pi.map)? != ContinuousMap::identity(pi.total().clone()) {
        return Err(EtaleError::LemmaViolation("σ ∘ π is not the identity".into()));
    }
    Ok(())
}

/// The pullback of `π` along `f : Y → B`, with its projection to `Y`.
#[derive(Clone, Debug)]
pub struct EtalePullback {
    pub square: Pullback,
    pub etale: EtaleMap,
}

/// Pull `π` back along `f`; the projection to `Y` must be étale and its lifts
/// must be `<lift of f(s) | s>`.
pub fn pullback_etale(pi: &EtaleMap, f: &ContinuousMap) -> Result<EtalePullback, EtaleError> {
    let square = pullback(f, &pi.map)?;
    let etale = EtaleMap::new(square.p2.clone()).map_err(|e| EtaleError::LemmaViolation(format!("pullback: {e}")))?;
    for ((p, s), lift) in etale.lifts() {
        let (e, _) = square.pairs[*p];
        let fs = f
            .apply(s)
            .ok_or_else(|| EtaleError::LemmaViolation(format!("f has no value on {}", s.display(f.src().points()))))?;
        let up = pi
            .lift(e, &fs)
            .ok_or_else(|| EtaleError::LemmaViolation("missing lift upstairs".into()))?;
        let expect = label(format!("<{}|{}>", up.label, s.label));
        if lift.label != expect || square.pairs[lift.dst()] != (up.dst(), s.dst()) {
            return Err(EtaleError::LemmaViolation(format!(
                "lift of {} is {} instead of {}",
                s.display(f.src().points()),
                lift.label,
                expect
            )));
        }
    }
    Ok(EtalePullback { square, etale })
}

/// Local injectivity at `e`, decided by an injective open neighbourhood and by
/// parallel pairs of base arrows; the two answers must agree.
pub fn locally_injective_at(pi: &EtaleMap, e: usize) -> Result<bool, EtaleError> {
    let total = pi.total();
    let by_open = opens_frame(&**total).opens.into_iter().any(|v| {
        v.contains(e) && {
            let pts: Vec<usize> = v.iter().map(|x| pi.project(x)).collect();
            let mut dedup = pts.clone();
            dedup.sort();
            dedup.dedup();
            dedup.len() == pts.len()
        }
    });
    let at = pi.base().arrows_from(pi.project(e));
    let by_pairs = at.iter().all(|r| {
        at.iter()
            .filter(|r2| r2.key == r.key)
            .all(|r2| match (pi.lift(e, r), pi.lift(e, r2)) {
                (Some(a), Some(b)) => a.dst() == b.dst(),
                _ => false,
            })
    });
    if by_open != by_pairs {
        return Err(EtaleError::MethodsDisagree(total.points().label(e).to_string()));
    }
    Ok(by_open)
}

/// `π` restricted to the full subspace on `v`.
pub fn restrict(pi: &EtaleMap, v: Subset) -> ContinuousMap {
    restrict_map(&pi.map, v)
}

pub(crate) fn restrict_map(map: &ContinuousMap, v: Subset) -> ContinuousMap {
    let sub = UCSpace::materialize(&**map.src()).subspace(v);
    let old: Vec<usize> = v.iter().filter(|&x| x < map.points().len()).collect();
    let arrows = sub
        .arrows()
        .into_iter()
        .filter_map(|a| {
            let orig = Arrow::new(HomKey::new(old[a.src()], a.index(), old[a.dst()]), a.label.clone());
            Some((a, map.arrow_table().get(&orig)?.clone()))
        })
        .collect();
    let points = old.iter().map(|&x| map.point(x)).collect();
    ContinuousMap::new(Arc::new(sub), map.dst().clone(), points, arrows).expect("restriction keeps shapes")
}

/// The restrictions of `π` to the opens of `E`; restrictions to every other
/// subset are checked to fail.
pub fn etale_subobjects(pi: &EtaleMap) -> Result<Vec<(Subset, EtaleMap)>, EtaleError> {
    let total = pi.total();
    let mut out = Vec::new();
    for v in total.points().subsets() {
        let r = restrict(pi, v);
        let etale = check_continuous(&r).passed() && check_etale(&r).is_etale();
        match (is_open(&**total, v), etale) {
            (true, true) => out.push((v, EtaleMap::new(r)?)),
            (false, false) => {}
            (open, _) => {
                return Err(EtaleError::LemmaViolation(format!(
                    "restriction to {} (open: {open}) has the wrong étaleness",
                    total.points().fmt_subset(v)
                )))
            }
        }
    }
    Ok(out)
}

/// Fibre sizes plus, for each singleton-indexed base arrow, where each fibre
/// point is sent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftChoice {
    pub sizes: Vec<usize>,
    pub actions: BTreeMap<Arrow, Vec<usize>>,
}

/// The étale space over `base` described by a lift choice, if lawful.
///
/// Points are `(b, i)`; the lift of `r : b ⇝ (μ, b′)` at `(b, i)` has the label
/// of `r` and lands at `(b′, action(r[1])(i))`.
pub fn etale_from_lifts(base: &SpaceRef, choice: &LiftChoice) -> Option<EtaleMap> {
    let bp = base.points();
    etale_from_lifts_named(base, choice, |b, i| format!("{}.{}", bp.label(b), i))
}

/// [`etale_from_lifts`] with the total space's points named by `name(b, i)`.
pub fn etale_from_lifts_named(
    base: &SpaceRef,
    choice: &LiftChoice,
    name: impl Fn(usize, usize) -> String,
) -> Option<EtaleMap> {
    let bp = base.points();
    let mut pts = Vec::new();
    let mut first = Vec::new();
    for b in 0..bp.len() {
        first.push(pts.len());
        for i in 0..choice.sizes[b] {
            pts.push((b, i));
        }
    }
    let labels: Vec<String> = pts.iter().map(|&(b, i)| name(b, i)).collect();
    let points = FinSet::new(format!("E({})", bp.name()), labels).ok()?;
    let universe: Universe = base.universe().clone();
    let mut e = UCSpace::empty_tables(format!("E({})", base.name()), points, universe.clone());
    let land = |r: &Arrow, i: usize| -> Option<usize> {
        let one = base.reindex_arrow(r, Index::ONE)?;
        let j = *choice.actions.get(&one)?.get(i)?;
        (j < choice.sizes[r.dst()]).then(|| first[r.dst()] + j)
    };
    let lift_of = |p: usize, r: &Arrow| -> Option<Arrow> {
        let (_, i) = pts[p];
        Some(Arrow::new(HomKey::new(p, r.index(), land(r, i)?), r.label.clone()))
    };
    let mut arrows = BTreeMap::new();
    for (p, &(b, _)) in pts.iter().enumerate() {
        for r in base.arrows_from(b) {
            let a = lift_of(p, &r)?;
            e.add_arrow(a.key, a.label.clone());
            arrows.insert(a, r.label.clone());
        }
        e.set_ident(p, base.ident(b));
    }
    for (p, &(b, _)) in pts.iter().enumerate() {
        for r in base.arrows_from(b) {
            let a = lift_of(p, &r)?;
            for &kappa in universe.indices() {
                let rk = base.reindex_arrow(&r, kappa)?;
                e.set_reindex(a.clone(), kappa, Some(lift_of(p, &rk)?.label));
            }
            for s in base.arrows_from(r.dst()) {
                if !universe.contains(r.index().tensor(s.index())) {
                    continue;
                }
                let c = base.compose_arrow(&s, &r)?;
                let s_up = lift_of(a.dst(), &s)?;
                e.set_comp(s_up, a.clone(), Some(lift_of(p, &c)?.label));
            }
        }
    }
    let total: SpaceRef = Arc::new(e);
    if !crate::ucspace::check_axioms(&*total).passed() {
        return None;
    }
    let map = ContinuousMap::new(total, base.clone(), pts.iter().map(|p| p.0).collect(), arrows).ok()?;
    EtaleMap::new(map).ok()
}

/// Every étale space over `base` with fibres of size at most `max_fiber`, one
/// per lawful lift choice.
pub fn etale_catalog(base: &SpaceRef, max_fiber: usize) -> Vec<EtaleMap> {
    let n = base.points().len();
    let ones: Vec<Arrow> = base.arrows().into_iter().filter(|a| a.index() == Index::ONE).collect();
    let mut out = Vec::new();
    for sizes in crate::ucmaps::point_maps(n, max_fiber + 1) {
        // each singleton-indexed arrow acts by a function between fibres
        let mut partial: Vec<BTreeMap<Arrow, Vec<usize>>> = vec![BTreeMap::new()];
        for r in &ones {
            let funcs = crate::ucmaps::point_maps(sizes[r.src()], sizes[r.dst()]);
            let is_id = base.ident(r.src()).as_ref() == Some(&r.label) && r.src() == r.dst();
            let mut next = Vec::new();
            for p in &partial {
                for f in &funcs {
                    if is_id && f.iter().enumerate().any(|(i, &j)| i != j) {
                        continue;
                    }
                    let mut q = p.clone();
                    q.insert(r.clone(), f.clone());
                    if composition_consistent(base, &q) {
                        next.push(q);
                    }
                }
            }
            partial = next;
        }
        for actions in partial {
            let choice = LiftChoice {
                sizes: sizes.clone(),
                actions,
            };
            if let Some(pi) = etale_from_lifts(base, &choice) {
                out.push(pi);
            }
        }
    }
    out
}

/// The actions chosen so far respect composition of singleton-indexed arrows.
fn composition_consistent(base: &SpaceRef, actions: &BTreeMap<Arrow, Vec<usize>>) -> bool {
    actions.iter().all(|(r, fr)| {
        base.arrows_from(r.dst())
            .into_iter()
            .filter(|s| s.index() == Index::ONE)
            .all(|s| {
                let (Some(fs), Some(c)) = (actions.get(&s), base.compose_arrow(&s, r)) else { return true };
                let Some(fc) = actions.get(&c) else { return true };
                fr.iter().enumerate().all(|(i, &j)| fs.get(j) == fc.get(i))
            })
    })
}

/// The identity of a space, as an étale map.
pub fn identity_etale(space: &SpaceRef) -> EtaleMap {
    EtaleMap::new(ContinuousMap::identity(space.clone())).expect("identities are étale")
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::catalog::{c2, parallel_pair, sierpinski_space, terminal_category};
    use crate::ucmaps::{alex_functor, continuity_structures, continuous_maps};
    use crate::ucspace::{
        alexandroff, enumerate_topologies, is_topological, topology_encode, FinCategory, FinTopSpace, Functor, Label,
    };

    fn sierp() -> SpaceRef {
        Arc::new(sierpinski_space(&Universe::default()))
    }

    fn point() -> SpaceRef {
        Arc::new(alexandroff(&terminal_category(), &Universe::default()))
    }

    /// Fibres `{e0}` over 0 and `{e1, e1′}` over 1, with `e0 ⇝ e1`.
    fn sierpinski_fibres() -> EtaleMap {
        let s = sierp();
        let up = Arrow::new(HomKey::new(0, Index::ONE, 1), label("*"));
        let choice = LiftChoice {
            sizes: vec![1, 2],
            actions: [
                (Arrow::new(HomKey::new(0, Index::ONE, 0), label("*")), vec![0]),
                (up, vec![0]),
                (Arrow::new(HomKey::new(1, Index::ONE, 1), label("*")), vec![0, 1]),
            ]
            .into_iter()
            .collect(),
        };
        etale_from_lifts(&s, &choice).unwrap()
    }

    #[test]
    fn identity_and_fold_are_etale() {
        let s = sierp();
        let id = identity_etale(&s);
        for ((e, r), a) in id.lifts() {
            assert_eq!((r.src(), r), (*e, a));
        }
        let d: SpaceRef = Arc::new(topology_encode(&FinTopSpace::discrete(FinSet::range("D", 2)), &Universe::default()));
        let fold = continuity_structures(&d, &point(), &[0, 0], 2);
        assert_eq!(fold.len(), 1);
        assert!(EtaleMap::new(fold[0].clone()).is_ok());
    }

    #[test]
    fn sierpinski_fibre_example() {
        let pi = sierpinski_fibres();
        assert_eq!(pi.fiber(1).len(), 2);
        assert!(pi.partition_holds());
        let up = Arrow::new(HomKey::new(0, Index::ONE, 1), label("*"));
        assert_eq!(pi.lift(0, &up).unwrap().dst(), 1);
        // a second arrow e0 ⇝ e1′ of the same type makes the lift ambiguous
        let mut e = UCSpace::materialize(&**pi.total());
        let extra = Arrow::new(HomKey::new(0, Index::ONE, 2), label("*"));
        e.add_arrow(extra.key, extra.label.clone());
        let e: SpaceRef = Arc::new(e);
        let mut m = pi.map().with_endpoints(e.clone(), pi.base().clone());
        m.set_arrow(extra, label("*"));
        let rep = check_etale(&m);
        assert!(!rep.is_etale());
        assert_eq!(rep.ambiguous[0].2, 2);
        // and with neither arrow present the lift is missing
        let sub = restrict(&pi, Subset::from_indices([0, 2]));
        let rep = check_etale(&sub);
        assert!(!rep.missing.is_empty());
        assert!(rep.witness(&sub).unwrap().contains("no lift"));
    }

    #[test]
    fn images_of_opens() {
        let pi = sierpinski_fibres();
        assert_eq!(etale_image(&pi, Subset::full(3)).unwrap(), Subset::full(2));
        assert_eq!(etale_image(&pi, Subset::EMPTY).unwrap(), Subset::EMPTY);
        assert_eq!(etale_image(&pi, Subset::singleton(1)).unwrap(), Subset::singleton(1));
        assert!(matches!(etale_image(&pi, Subset::singleton(0)), Err(EtaleError::NotOpen(_))));
        // images distribute over unions of opens
        let opens = opens_frame(&**pi.total()).opens;
        for &a in &opens {
            for &b in &opens {
                let u = etale_image(&pi, a.union(b)).unwrap();
                assert_eq!(u, etale_image(&pi, a).unwrap().union(etale_image(&pi, b).unwrap()));
            }
        }
    }

    #[test]
    fn inverting_bijective_etale_maps() {
        let s = sierp();
        let id = identity_etale(&s);
        assert_eq!(invert_bijective_etale(&id).unwrap(), ContinuousMap::identity(s.clone()));
        let copy = FinTopSpace::new(FinSet::new("S2", ["a", "b"]).unwrap(), [Subset::EMPTY, Subset::singleton(1), Subset::full(2)]).unwrap();
        let copy: SpaceRef = Arc::new(topology_encode(&copy, &Universe::default()));
        let iso = EtaleMap::new(continuity_structures(&copy, &s, &[0, 1], 2).remove(0)).unwrap();
        let inv = invert_bijective_etale(&iso).unwrap();
        assert_eq!(inv.points(), &[0, 1]);
        assert!(matches!(invert_bijective_etale(&sierpinski_fibres()), Err(EtaleError::NotBijective)));
        // over parallel arrows the inverse's arrow action is forced
        let par: SpaceRef = Arc::new(alexandroff(&parallel_pair(), &Universe::default()));
        let pi = identity_etale(&par);
        let sigma = invert_bijective_etale(&pi).unwrap();
        let f = Arrow::new(HomKey::new(0, Index::ONE, 1), label("f"));
        let mut tampered = sigma.clone();
        tampered.set_arrow(f, label("g"));
        assert!(verify_inverse(&pi, &tampered).is_err());
    }

    #[test]
    fn pullbacks_of_the_fibre_example() {
        let pi = sierpinski_fibres();
        let s = sierp();
        let along_id = pullback_etale(&pi, &ContinuousMap::identity(s.clone())).unwrap();
        assert_eq!(along_id.etale.total().points().len(), 3);
        assert_eq!(along_id.etale.map().points(), pi.map().points());
        let at1 = continuity_structures(&point(), &s, &[1], 2).remove(0);
        let fibre = pullback_etale(&pi, &at1).unwrap();
        let e = fibre.etale.total();
        assert_eq!(e.points().len(), 2);
        assert!(is_topological(&**e));
        assert!(e.arrows().iter().all(|a| a.src() == a.dst()));
        let at0 = continuity_structures(&point(), &s, &[0], 2).remove(0);
        assert_eq!(pullback_etale(&pi, &at0).unwrap().etale.total().points().len(), 1);
    }

    /// A discrete opfibration over `u ⇉ v` whose two lifts at `e` land apart.
    fn split_opfibration() -> EtaleMap {
        let par = parallel_pair();
        let e = FinCategory::new(
            "E",
            FinSet::new("E", ["e", "e1", "e2"]).unwrap(),
            &[("f", "e", "e1"), ("g", "e", "e2")],
            &[],
        )
        .unwrap();
        let p = Functor {
            obj: vec![0, 1, 1],
            arr: e
                .arrows()
                .iter()
                .map(|a| match a.name.as_str() {
                    "f" => par.find("f").unwrap(),
                    "g" => par.find("g").unwrap(),
                    _ => par.id([0, 1, 1][a.src]),
                })
                .collect(),
        };
        assert!(p.is_valid(&e, &par));
        let (xe, xp): (SpaceRef, SpaceRef) = (
            Arc::new(alexandroff(&e, &Universe::default())),
            Arc::new(alexandroff(&par, &Universe::default())),
        );
        EtaleMap::new(alex_functor(&p, &e, &par, xe, xp)).unwrap()
    }

    #[test]
    fn local_injectivity() {
        let id = identity_etale(&sierp());
        assert!((0..2).all(|x| locally_injective_at(&id, x).unwrap()));
        let pi = split_opfibration();
        assert!(!locally_injective_at(&pi, 0).unwrap());
        assert!(locally_injective_at(&pi, 1).unwrap());
        for t in enumerate_topologies(2).unwrap() {
            let b: SpaceRef = Arc::new(topology_encode(&t, &Universe::default()));
            for pi in etale_catalog(&b, 2) {
                assert!(is_topological(&**pi.total()));
                for e in 0..pi.total().points().len() {
                    assert!(locally_injective_at(&pi, e).unwrap());
                }
            }
        }
    }

    #[test]
    fn subobjects_are_opens() {
        let s = sierp();
        let subs = etale_subobjects(&identity_etale(&s)).unwrap();
        assert_eq!(subs.len(), 3);
        let empty: SpaceRef = Arc::new(topology_encode(&FinTopSpace::discrete(FinSet::range("Z", 0)), &Universe::default()));
        assert_eq!(etale_subobjects(&identity_etale(&empty)).unwrap().len(), 1);
        let pi = sierpinski_fibres();
        let subs = etale_subobjects(&pi).unwrap();
        assert_eq!(subs.len(), opens_frame(&**pi.total()).opens.len());
    }

    #[test]
    fn catalog_over_sierpinski_matches_functor_count() {
        // functors 0 ≤ 1 → sets of size ≤ 2: Σ_{a,b ≤ 2} b^a
        let oracle: usize = (0..3u32).flat_map(|a| (0..3usize).map(move |b| b.pow(a))).sum();
        assert_eq!(etale_catalog(&sierp(), 2).len(), oracle);
        let c: SpaceRef = Arc::new(alexandroff(&c2(), &Universe::default()));
        assert_eq!(etale_catalog(&c, 2).len(), oracle);
    }

    #[test]
    fn etale_maps_compose() {
        let s = sierp();
        let cat = etale_catalog(&s, 2);
        for pi in &cat {
            let total = pi.total().clone();
            for rho in etale_catalog(&total, 1).iter().take(6) {
                let comp = rho.then(pi).unwrap();
                assert!(comp.partition_holds());
            }
        }
    }

    /// Unique lifting as a bijection of hom sets, fibrewise over target families.
    fn lifting_is_bijective(map: &ContinuousMap) -> bool {
        let (e, b) = (map.src(), map.dst());
        (0..e.points().len()).all(|x| {
            b.targets().into_iter().all(|t| {
                let base = b.hom(&HomKey { src: map.point(x), target: t });
                let mut over: Vec<Label> = (0..e.points().len())
                    .filter(|&y| map.point(y) == t.point)
                    .flat_map(|y| {
                        e.hom(&HomKey::new(x, t.index, y))
                            .into_iter()
                            .filter_map(|l| map.arrow_table().get(&Arrow::new(HomKey::new(x, t.index, y), l)).cloned())
                            .collect::<Vec<_>>()
                    })
                    .collect();
                over.sort();
                let mut base = base;
                base.sort();
                over == base
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn unique_lifting_is_fibrewise_bijection(t in 0usize..29, f in 0usize..64) {
            let tops = enumerate_topologies(3).unwrap();
            let b: SpaceRef = Arc::new(topology_encode(&tops[t], &Universe::default()));
            let d: SpaceRef = Arc::new(topology_encode(&tops[(t * 7 + f) % 29], &Universe::default()));
            for m in continuous_maps(&d, &b, 16) {
                prop_assert_eq!(check_etale(&m).is_etale(), lifting_is_bijective(&m));
            }
            let cat = etale_catalog(&b, 2);
            let pi = &cat[f % cat.len()];
            prop_assert!(lifting_is_bijective(pi.map()));
            prop_assert!(pi.partition_holds());
        }
    }
}
