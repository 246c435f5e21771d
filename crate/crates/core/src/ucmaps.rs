//! Continuous maps, 2-cells, pullbacks and the `Alex ⊣ Sp` checks.
//!
//! A continuous map is held as a point function plus an explicit table sending
//! each ultra-arrow of the source to a label in the matching hom set of the
//! target. Maps can be built by hand (and checked), or searched for: because
//! reindexing along `({*},1) ≅ (I,[i0])` is bijective in a valid space, the
//! search assigns the singleton-indexed arrows first and the remaining
//! variables are pinned by the reindexing constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ucspace::{
    alexandroff, enumerate_functors, label, open_witness, sierpinski, specialization_with_arrows, topology_encode,
    Arrow, FinCategory, Functor, HomKey, Index, Label, NatTrans, OpensError, UCSpace, UltraSpace,
};
use crate::ufcore::{FinSet, Subset};

/// A shared handle on a space, lazy or tabulated.
pub type SpaceRef = Arc<dyn UltraSpace>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("point map has {got} entries, source has {expected} points")]
    PointArity { expected: usize, got: usize },
    #[error("point {0} is sent outside the target")]
    PointOutOfRange(usize),
    #[error("maps are not composable: {0}")]
    NotComposable(String),
    #[error("source and target use different index universes")]
    UniverseMismatch,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapLaw {
    /// Every ultra-arrow has an image in the right hom set.
    Typing,
    Identity,
    Reindexing,
    Composition,
    /// `f′(r)·α_x = (α_{x_i})_{i→μ}·f(r)`.
    Exchange,
}

impl MapLaw {
    pub fn name(self) -> &'static str {
        match self {
            MapLaw::Typing => "typing",
            MapLaw::Identity => "identity",
            MapLaw::Reindexing => "reindexing",
            MapLaw::Composition => "composition",
            MapLaw::Exchange => "exchange",
        }
    }
}

impl fmt::Display for MapLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapViolation {
    pub law: MapLaw,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MapReport {
    pub violations: Vec<MapViolation>,
    pub instances: usize,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, law: MapLaw) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    fn record(&mut self, ok: bool, law: MapLaw, message: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations.push(MapViolation { law, message: message() });
        }
    }
}

/// A point function with an action on ultra-arrows.
#[derive(Clone)]
pub struct ContinuousMap {
    src: SpaceRef,
    dst: SpaceRef,
    points: Vec<usize>,
    arrows: BTreeMap<Arrow, Label>,
}

impl fmt::Debug for ContinuousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousMap")
            .field("src", &self.src.name())
            .field("dst", &self.dst.name())
            .field("points", &self.points)
            .field("arrows", &self.arrows)
            .finish()
    }
}

/// Label-level equality: same point function and same arrow table.
impl PartialEq for ContinuousMap {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.arrows == other.arrows
    }
}

impl Eq for ContinuousMap {}

impl ContinuousMap {
    /// A map from explicit tables. Only the shapes are checked here; use
    /// [`check_continuous`] for the laws.
    pub fn new(
        src: SpaceRef,
        dst: SpaceRef,
        points: Vec<usize>,
        arrows: BTreeMap<Arrow, Label>,
    ) -> Result<ContinuousMap, MapError> {
        if points.len() != src.points().len() {
            return Err(MapError::PointArity {
                expected: src.points().len(),
                got: points.len(),
            });
        }
        if let Some(x) = (0..points.len()).find(|&x| points[x] >= dst.points().len()) {
            return Err(MapError::PointOutOfRange(x));
        }
        if src.universe() != dst.universe() {
            return Err(MapError::UniverseMismatch);
        }
        Ok(ContinuousMap {
            src,
            dst,
            points,
            arrows,
        })
    }

    pub fn identity(space: SpaceRef) -> ContinuousMap {
        let points = (0..space.points().len()).collect();
        let arrows = space.arrows().into_iter().map(|a| {
            let l = a.label.clone();
            (a, l)
        });
        ContinuousMap {
            arrows: arrows.collect(),
            points,
            dst: space.clone(),
            src: space,
        }
    }

    pub fn src(&self) -> &SpaceRef {
        &self.src
    }

    pub fn dst(&self) -> &SpaceRef {
        &self.dst
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn point(&self, x: usize) -> usize {
        self.points[x]
    }

    pub fn arrow_table(&self) -> &BTreeMap<Arrow, Label> {
        &self.arrows
    }

    /// The type of `f(r)` for an ultra-arrow of type `key`.
    pub fn image_key(&self, key: &HomKey) -> HomKey {
        HomKey::new(self.points[key.src], key.index(), self.points[key.dst()])
    }

    /// `f(r)`, if the table has an entry for `r`.
    pub fn apply(&self, r: &Arrow) -> Option<Arrow> {
        self.arrows.get(r).map(|l| Arrow::new(self.image_key(&r.key), l.clone()))
    }

    pub fn set_arrow(&mut self, r: Arrow, l: Label) {
        self.arrows.insert(r, l);
    }

    /// Same map, viewed with different (structurally equal) endpoint handles.
    pub fn with_endpoints(&self, src: SpaceRef, dst: SpaceRef) -> ContinuousMap {
        ContinuousMap {
            src,
            dst,
            points: self.points.clone(),
            arrows: self.arrows.clone(),
        }
    }

    /// The inverse, when points and arrows are matched bijectively.
    pub fn inverse(&self) -> Option<ContinuousMap> {
        let n = self.dst.points().len();
        if self.points.len() != n {
            return None;
        }
        let mut points = vec![usize::MAX; n];
        for (x, &y) in self.points.iter().enumerate() {
            if points[y] != usize::MAX {
                return None;
            }
            points[y] = x;
        }
        let mut arrows = BTreeMap::new();
        for r in self.arrows.keys() {
            let img = self.apply(r)?;
            if arrows.insert(img, r.label.clone()).is_some() {
                return None;
            }
        }
        if arrows.len() != self.dst.arrows().len() {
            return None;
        }
        Some(ContinuousMap {
            src: self.dst.clone(),
            dst: self.src.clone(),
            points,
            arrows,
        })
    }

    /// An isomorphism: continuous, with a continuous two-sided inverse.
    pub fn is_iso(&self) -> bool {
        check_continuous(self).passed()
            && self.inverse().is_some_and(|g| {
                check_continuous(&g).passed()
                    && g.after(self).is_ok_and(|x| x == ContinuousMap::identity(self.src.clone()))
                    && self.after(&g).is_ok_and(|x| x == ContinuousMap::identity(self.dst.clone()))
            })
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ContinuousMap) -> Result<ContinuousMap, MapError> {
        if first.dst.points() != self.src.points() || first.dst.universe() != self.src.universe() {
            return Err(MapError::NotComposable(format!(
                "{} does not land in {}",
                first.dst.name(),
                self.src.name()
            )));
        }
        let points = first.points.iter().map(|&y| self.points[y]).collect();
        let arrows = first
            .arrows
            .iter()
            .filter_map(|(r, _)| {
                let mid = first.apply(r)?;
                let l = self.arrows.get(&mid)?;
                Some((r.clone(), l.clone()))
            })
            .collect();
        Ok(ContinuousMap {
            src: first.src.clone(),
            dst: self.dst.clone(),
            points,
            arrows,
        })
    }
}

/// `g ∘ f`.
pub fn compose(g: &ContinuousMap, f: &ContinuousMap) -> Result<ContinuousMap, MapError> {
    g.after(f)
}

/// The three continuity laws, quantified over the full source table.
pub fn check_continuous(f: &ContinuousMap) -> MapReport {
    let (src, dst) = (&*f.src, &*f.dst);
    let pts = src.points();
    let mut rep = MapReport::default();
    let show = |r: &Arrow| r.display(pts);
    let arrows = src.arrows();
    for r in &arrows {
        let ok = f.apply(r).is_some_and(|img| dst.has_arrow(&img.key, &img.label));
        rep.record(ok, MapLaw::Typing, || format!("f({}) is missing or ill-typed", show(r)));
    }
    for x in 0..pts.len() {
        let ok = match (src.identity_arrow(x), dst.ident(f.points[x])) {
            (Some(id), Some(l)) => f.arrows.get(&id) == Some(&l),
            _ => false,
        };
        rep.record(ok, MapLaw::Identity, || format!("f(id_{}) ≠ id_f({})", pts.label(x), pts.label(x)));
    }
    let universe = src.universe().clone();
    for r in &arrows {
        for &kappa in universe.indices() {
            let Some(rk) = src.reindex_arrow(r, kappa) else { continue };
            let lhs = f.arrows.get(&rk);
            let rhs = f.apply(r).and_then(|img| dst.reindex(&img, kappa));
            rep.record(lhs.is_some() && lhs == rhs.as_ref(), MapLaw::Reindexing, || {
                format!("f({}[{}]) ≠ f({})[{}]", show(r), kappa, show(r), kappa)
            });
        }
    }
    for r in &arrows {
        for s in src.arrows_from(r.dst()) {
            if !universe.contains(r.index().tensor(s.index())) {
                continue;
            }
            let Some(c) = src.compose_arrow(&s, r) else { continue };
            let lhs = f.arrows.get(&c);
            let rhs = match (f.apply(&s), f.apply(r)) {
                (Some(fs), Some(fr)) => dst.compose(&fs, &fr),
                _ => None,
            };
            rep.record(lhs.is_some() && lhs == rhs.as_ref(), MapLaw::Composition, || {
                format!("f({}·{}) ≠ f({})·f({})", show(&s), show(r), show(&s), show(r))
            });
        }
    }
    rep
}

enum Constraint {
    Ident(Label),
    Reindex { r: usize, kappa: Index },
    Comp { s: usize, r: usize },
}

/// Every arrow action making `points` continuous, up to `limit` of them.
pub fn continuity_structures(src: &SpaceRef, dst: &SpaceRef, points: &[usize], limit: usize) -> Vec<ContinuousMap> {
    if points.len() != src.points().len() || src.universe() != dst.universe() || limit == 0 {
        return Vec::new();
    }
    let mut vars = src.arrows();
    vars.sort_by_key(|a| a.index() != Index::ONE);
    let pos: BTreeMap<&Arrow, usize> = vars.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let key_of = |a: &Arrow| HomKey::new(points[a.src()], a.index(), points[a.dst()]);
    let domains: Vec<Vec<Label>> = vars.iter().map(|a| dst.hom(&key_of(a))).collect();
    if domains.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    // each constraint is checked once its last variable is assigned
    let mut checks: Vec<Vec<(usize, Constraint)>> = (0..vars.len()).map(|_| Vec::new()).collect();
    for x in 0..points.len() {
        let id = src.identity_arrow(x).and_then(|a| pos.get(&a).copied());
        match (id, dst.ident(points[x])) {
            (Some(v), Some(l)) => checks[v].push((v, Constraint::Ident(l))),
            _ => return Vec::new(),
        }
    }
    let universe = src.universe().clone();
    for (ri, r) in vars.iter().enumerate() {
        for &kappa in universe.indices() {
            if let Some(out) = src.reindex_arrow(r, kappa).and_then(|a| pos.get(&a).copied()) {
                checks[ri.max(out)].push((out, Constraint::Reindex { r: ri, kappa }));
            }
        }
        for s in src.arrows_from(r.dst()) {
            if !universe.contains(r.index().tensor(s.index())) {
                continue;
            }
            let si = pos[&s];
            if let Some(out) = src.compose_arrow(&s, r).and_then(|a| pos.get(&a).copied()) {
                checks[ri.max(si).max(out)].push((out, Constraint::Comp { s: si, r: ri }));
            }
        }
    }
    let mut search = Search {
        dst: &**dst,
        vars: &vars,
        keys: vars.iter().map(key_of).collect(),
        domains: &domains,
        checks: &checks,
        assigned: vec![0; vars.len()],
        limit,
        found: Vec::new(),
    };
    search.run(0);
    search
        .found
        .into_iter()
        .map(|choice| ContinuousMap {
            src: src.clone(),
            dst: dst.clone(),
            points: points.to_vec(),
            arrows: vars
                .iter()
                .zip(&choice)
                .map(|(a, &c)| (a.clone(), domains[pos[a]][c].clone()))
                .collect(),
        })
        .collect()
}

struct Search<'a> {
    dst: &'a dyn UltraSpace,
    vars: &'a [Arrow],
    keys: Vec<HomKey>,
    domains: &'a [Vec<Label>],
    checks: &'a [Vec<(usize, Constraint)>],
    assigned: Vec<usize>,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn value(&self, v: usize) -> Arrow {
        Arrow::new(self.keys[v], self.domains[v][self.assigned[v]].clone())
    }

    fn holds(&self, out: usize, c: &Constraint) -> bool {
        let want = &self.domains[out][self.assigned[out]];
        let got = match c {
            Constraint::Ident(l) => Some(l.clone()),
            Constraint::Reindex { r, kappa } => self.dst.reindex(&self.value(*r), *kappa),
            Constraint::Comp { s, r } => self.dst.compose(&self.value(*s), &self.value(*r)),
        };
        got.as_ref() == Some(want)
    }

    fn run(&mut self, v: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if v == self.vars.len() {
            self.found.push(self.assigned.clone());
            return;
        }
        for c in 0..self.domains[v].len() {
            self.assigned[v] = c;
            if self.checks[v].iter().all(|(out, k)| self.holds(*out, k)) {
                self.run(v + 1);
            }
        }
    }
}

/// Every point function `n → m`, in lexicographic order.
pub fn point_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < m {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Every tuple `(k_0, …)` with `k_i < sizes[i]`, in lexicographic order.
pub fn point_maps_ragged(sizes: &[usize]) -> Vec<Vec<usize>> {
    if sizes.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Every continuous map `src → dst`, up to `limit` of them.
pub fn continuous_maps(src: &SpaceRef, dst: &SpaceRef, limit: usize) -> Vec<ContinuousMap> {
    let mut out = Vec::new();
    for pm in point_maps(src.points().len(), dst.points().len()) {
        if out.len() >= limit {
            break;
        }
        out.extend(continuity_structures(src, dst, &pm, limit - out.len()));
    }
    out
}

/// The map `X → S` into the encoded Sierpiński space classifying an open `U`.
pub fn characteristic_map(space: SpaceRef, u: Subset) -> Result<ContinuousMap, OpensError> {
    let pts = space.points().clone();
    let not_open = |witness: String| OpensError::NotOpen {
        subset: pts.fmt_subset(u),
        witness,
    };
    if let Some(k) = open_witness(&*space, u) {
        return Err(not_open(format!(
            "{} ⇝ {}@{}",
            pts.label(k.src),
            pts.label(k.dst()),
            k.index()
        )));
    }
    let s: SpaceRef = Arc::new(topology_encode(&sierpinski(), space.universe()));
    let points: Vec<usize> = (0..pts.len()).map(|x| usize::from(u.contains(x))).collect();
    let mut found = continuity_structures(&space, &s, &points, 2);
    match found.len() {
        1 => Ok(found.remove(0)),
        0 => Err(not_open("no continuity structure".into())),
        _ => Err(not_open("continuity structure is not unique".into())),
    }
}

/// A 2-cell `α : f ⇒ f′`, with `α_x : f(x) ⇝ lim_{*→1} f′(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCell {
    pub source: ContinuousMap,
    pub target: ContinuousMap,
    pub components: Vec<Label>,
}

impl TwoCell {
    pub fn component(&self, x: usize) -> Arrow {
        Arrow::new(
            HomKey::new(self.source.point(x), Index::ONE, self.target.point(x)),
            self.components[x].clone(),
        )
    }

    /// Components are identities.
    pub fn identity(f: &ContinuousMap) -> Option<TwoCell> {
        let components = f.points.iter().map(|&y| f.dst.ident(y)).collect::<Option<Vec<_>>>()?;
        Some(TwoCell {
            source: f.clone(),
            target: f.clone(),
            components,
        })
    }

    /// `β ∘ α`, componentwise `β_x · α_x`.
    pub fn vertical(&self, beta: &TwoCell) -> Option<TwoCell> {
        let dst = &self.source.dst;
        let components = (0..self.components.len())
            .map(|x| dst.compose(&beta.component(x), &self.component(x)))
            .collect::<Option<Vec<_>>>()?;
        Some(TwoCell {
            source: self.source.clone(),
            target: beta.target.clone(),
            components,
        })
    }

    /// `g α : g f ⇒ g f′`.
    pub fn whisker_after(&self, g: &ContinuousMap) -> Option<TwoCell> {
        let components = (0..self.components.len())
            .map(|x| g.arrows.get(&self.component(x)).cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(TwoCell {
            source: g.after(&self.source).ok()?,
            target: g.after(&self.target).ok()?,
            components,
        })
    }

    /// `α h : f h ⇒ f′ h`.
    pub fn whisker_before(&self, h: &ContinuousMap) -> Option<TwoCell> {
        Some(TwoCell {
            source: self.source.after(h).ok()?,
            target: self.target.after(h).ok()?,
            components: h.points.iter().map(|&w| self.components[w].clone()).collect(),
        })
    }
}

/// The exchange law over every ultra-arrow of the source space.
pub fn check_two_cell(alpha: &TwoCell) -> MapReport {
    let (f, g) = (&alpha.source, &alpha.target);
    let src = &*f.src;
    let dst = &*f.dst;
    let pts = src.points();
    let mut rep = MapReport::default();
    if f.points.len() != alpha.components.len() || g.points.len() != alpha.components.len() {
        rep.record(false, MapLaw::Typing, || "component count differs from the point count".into());
        return rep;
    }
    for x in 0..pts.len() {
        let c = alpha.component(x);
        rep.record(dst.has_arrow(&c.key, &c.label), MapLaw::Typing, || {
            format!("α_{} = {} is not an ultra-arrow", pts.label(x), c.display(dst.points()))
        });
    }
    for r in src.arrows() {
        let lhs = g.apply(&r).and_then(|gr| dst.compose(&gr, &alpha.component(r.src())));
        let rhs = f.apply(&r).and_then(|fr| dst.compose(&alpha.component(r.dst()), &fr));
        rep.record(lhs.is_some() && lhs == rhs, MapLaw::Exchange, || {
            format!("exchange fails on {}", r.display(pts))
        });
    }
    rep
}

/// A pullback square together with the projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub space: Arc<UCSpace>,
    /// `(z, y)` for each point of the pullback.
    pub pairs: Vec<(usize, usize)>,
    /// `P → Z`.
    pub p1: ContinuousMap,
    /// `P → Y`.
    pub p2: ContinuousMap,
}

impl Pullback {
    /// The map `W → P` induced by a cone `a : W → Z`, `b : W → Y`.
    pub fn induce(&self, a: &ContinuousMap, b: &ContinuousMap) -> Option<ContinuousMap> {
        let points = (0..a.points.len())
            .map(|w| self.pairs.iter().position(|&p| p == (a.points[w], b.points[w])))
            .collect::<Option<Vec<_>>>()?;
        let arrows = a
            .arrows
            .iter()
            .map(|(r, la)| Some((r.clone(), pair_label(la, b.arrows.get(r)?))))
            .collect::<Option<BTreeMap<_, _>>>()?;
        ContinuousMap::new(a.src.clone(), self.space.clone(), points, arrows).ok()
    }
}

fn pair_label(r: &str, s: &str) -> Label {
    label(format!("<{r}|{s}>"))
}

/// `Z ×_X Y` for `f : Y → X` and `g : Z → X`.
pub fn pullback(f: &ContinuousMap, g: &ContinuousMap) -> Result<Pullback, MapError> {
    if f.dst.points() != g.dst.points() || f.dst.universe() != g.dst.universe() {
        return Err(MapError::NotComposable("maps have different codomains".into()));
    }
    let (y, z) = (&f.src, &g.src);
    let pairs: Vec<(usize, usize)> = (0..z.points().len())
        .flat_map(|zi| (0..y.points().len()).map(move |yi| (zi, yi)))
        .filter(|&(zi, yi)| g.points[zi] == f.points[yi])
        .collect();
    let labels: Vec<String> = pairs
        .iter()
        .map(|&(zi, yi)| format!("({},{})", z.points().label(zi), y.points().label(yi)))
        .collect();
    let points = FinSet::new(format!("{}×{}", z.points().name(), y.points().name()), labels)
        .map_err(|e| MapError::NotComposable(e.to_string()))?;
    let universe = f.dst.universe().clone();
    let name = format!("{}×_{}{}", z.name(), f.dst.name(), y.name());
    let mut space = UCSpace::empty_tables(name, points, universe.clone());
    // (pullback arrow) ↦ (Z arrow, Y arrow)
    let mut split: BTreeMap<Arrow, (Arrow, Arrow)> = BTreeMap::new();
    for (p, &(zp, yp)) in pairs.iter().enumerate() {
        for &mu in universe.indices() {
            for (q, &(zq, yq)) in pairs.iter().enumerate() {
                let key = HomKey::new(p, mu, q);
                let zs = z.hom(&HomKey::new(zp, mu, zq));
                let ys = y.hom(&HomKey::new(yp, mu, yq));
                for lr in &zs {
                    let r = Arrow::new(HomKey::new(zp, mu, zq), lr.clone());
                    for ls in &ys {
                        let s = Arrow::new(HomKey::new(yp, mu, yq), ls.clone());
                        if g.arrows.contains_key(&r) && g.arrows.get(&r) == f.arrows.get(&s) {
                            let l = pair_label(lr, ls);
                            space.add_arrow(key, l.clone());
                            split.insert(Arrow::new(key, l), (r.clone(), s));
                        }
                    }
                }
            }
        }
    }
    let find = |zr: &Arrow, ys: &Arrow, p: usize, q: usize, mu: Index| -> Option<Label> {
        let a = Arrow::new(HomKey::new(p, mu, q), pair_label(&zr.label, &ys.label));
        split.contains_key(&a).then_some(a.label)
    };
    for (p, &(zp, yp)) in pairs.iter().enumerate() {
        if let (Some(iz), Some(iy)) = (z.identity_arrow(zp), y.identity_arrow(yp)) {
            if let Some(l) = find(&iz, &iy, p, p, Index::ONE) {
                space.set_ident(p, Some(l));
            }
        }
    }
    let pos = |zi: usize, yi: usize| pairs.iter().position(|&pr| pr == (zi, yi));
    for (a, (r, s)) in &split {
        for &kappa in universe.indices() {
            if let (Some(rk), Some(sk)) = (z.reindex_arrow(r, kappa), y.reindex_arrow(s, kappa)) {
                let l = find(&rk, &sk, a.src(), a.dst(), kappa);
                space.set_reindex(a.clone(), kappa, l);
            }
        }
        for (b, (r2, s2)) in split.range(Arrow::new(HomKey::new(a.dst(), Index { size: 0, point: 0 }, 0), label(""))..) {
            if b.src() != a.dst() {
                break;
            }
            let mu = a.index().tensor(b.index());
            if !universe.contains(mu) {
                continue;
            }
            if let (Some(rc), Some(sc)) = (z.compose_arrow(r2, r), y.compose_arrow(s2, s)) {
                let q = pos(rc.dst(), sc.dst());
                let l = q.and_then(|q| find(&rc, &sc, a.src(), q, mu));
                space.set_comp(b.clone(), a.clone(), l);
            }
        }
    }
    let space = Arc::new(space);
    let p1 = ContinuousMap {
        src: space.clone(),
        dst: z.clone(),
        points: pairs.iter().map(|p| p.0).collect(),
        arrows: split.iter().map(|(a, (r, _))| (a.clone(), r.label.clone())).collect(),
    };
    let p2 = ContinuousMap {
        src: space.clone(),
        dst: y.clone(),
        points: pairs.iter().map(|p| p.1).collect(),
        arrows: split.iter().map(|(a, (_, s))| (a.clone(), s.label.clone())).collect(),
    };
    Ok(Pullback { space, pairs, p1, p2 })
}

/// Distinct ultra-arrows of the same type have distinct projections.
pub fn projections_jointly_monic(pb: &Pullback) -> bool {
    let mut seen = BTreeSet::new();
    pb.space.arrows().iter().all(|a| {
        let img = (a.key, pb.p1.arrows.get(a).cloned(), pb.p2.arrows.get(a).cloned());
        seen.insert(img)
    })
}

/// Outcome of checking a pullback's universal property against test cones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UniversalReport {
    pub cones: usize,
    pub failures: Vec<String>,
}

impl UniversalReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every cone from a test space, exactly one continuous map into the
/// pullback commutes with both projections.
pub fn check_pullback_universal(
    pb: &Pullback,
    f: &ContinuousMap,
    g: &ContinuousMap,
    cone_sources: &[SpaceRef],
    limit: usize,
) -> UniversalReport {
    let mut rep = UniversalReport::default();
    let p: SpaceRef = pb.space.clone();
    for w in cone_sources {
        let to_z = continuous_maps(w, &g.src, limit);
        let to_y = continuous_maps(w, &f.src, limit);
        for a in &to_z {
            for b in &to_y {
                let (Ok(ga), Ok(fb)) = (g.after(a), f.after(b)) else { continue };
                if ga != fb {
                    continue;
                }
                rep.cones += 1;
                let Some(u) = pb.induce(a, b) else {
                    rep.failures.push(format!("cone from {} has no induced map", w.name()));
                    continue;
                };
                let factoring = continuity_structures(w, &p, &u.points, usize::MAX)
                    .into_iter()
                    .filter(|v| pb.p1.after(v).is_ok_and(|x| &x == a) && pb.p2.after(v).is_ok_and(|x| &x == b))
                    .count();
                if factoring != 1 || !check_continuous(&u).passed() {
                    rep.failures
                        .push(format!("cone from {} factors {} times", w.name(), factoring));
                }
            }
        }
    }
    rep
}

/// `Alex(F) : Alex(C) → Alex(D)` between the given tabulations.
pub fn alex_functor(f: &Functor, c: &FinCategory, d: &FinCategory, src: SpaceRef, dst: SpaceRef) -> ContinuousMap {
    let arrows = src
        .arrows()
        .into_iter()
        .filter_map(|r| {
            let a = c.find(&r.label)?;
            Some((r, label(&d.arrow(f.arr[a]).name)))
        })
        .collect();
    ContinuousMap {
        src,
        dst,
        points: f.obj.clone(),
        arrows,
    }
}

/// `Alex(α) : Alex(F) ⇒ Alex(G)`.
pub fn alex_nat(alpha: &NatTrans, d: &FinCategory, source: ContinuousMap, target: ContinuousMap) -> TwoCell {
    TwoCell {
        source,
        target,
        components: alpha.components.iter().map(|&a| label(&d.arrow(a).name)).collect(),
    }
}

/// Outcome of the `Alex ⊣ Sp` checks for one pair `(C, X)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdjunctionReport {
    pub unit_iso: bool,
    pub maps: usize,
    pub functors: usize,
    pub naturality_instances: usize,
    pub failures: Vec<String>,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.unit_iso && self.failures.is_empty()
    }
}

/// The transpose of `F : Alex(C) → X` as a functor `C → Sp(X)`.
fn transpose(c: &FinCategory, f: &ContinuousMap, sp_arrows: &BTreeMap<Arrow, usize>) -> Option<Functor> {
    let arr = c
        .arrows()
        .iter()
        .map(|a| {
            let r = Arrow::new(HomKey::new(a.src, Index::ONE, a.dst), label(&a.name));
            sp_arrows.get(&f.apply(&r)?).copied()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Functor {
        obj: f.points.clone(),
        arr,
    })
}

/// The continuous map `Alex(C) → X` corresponding to `G : C → Sp(X)`.
fn untranspose(c: &FinCategory, g: &Functor, alex: &SpaceRef, x: &SpaceRef, sp_arrows: &[Arrow]) -> ContinuousMap {
    let arrows = alex
        .arrows()
        .into_iter()
        .filter_map(|r| {
            let a = c.find(&r.label)?;
            let l = x.reindex(&sp_arrows[g.arr[a]], r.index())?;
            Some((r, l))
        })
        .collect();
    ContinuousMap {
        src: alex.clone(),
        dst: x.clone(),
        points: g.obj.clone(),
        arrows,
    }
}

/// The unit `C ≅ Sp(Alex(C))` and the bijection `UltSp(Alex C, X) ≅ Cat(C, Sp X)`,
/// with naturality tested against up to `naturality_cap` endofunctors of `C`
/// and endomaps of `X`.
pub fn adjunction_checks(c: &FinCategory, x: &SpaceRef, naturality_cap: usize) -> AdjunctionReport {
    let mut rep = AdjunctionReport::default();
    let alex: SpaceRef = Arc::new(alexandroff(c, x.universe()));
    let unit_cat = specialization_with_arrows(&*alex);
    rep.unit_iso = match &unit_cat {
        Ok((sp, _)) => {
            let arr: Option<Vec<usize>> = c.arrows().iter().map(|a| sp.find(&a.name)).collect();
            arr.map(|arr| Functor {
                obj: (0..c.objects().len()).collect(),
                arr,
            })
            .is_some_and(|u| u.is_valid(c, sp) && u.is_bijective(sp))
        }
        Err(_) => false,
    };
    let (sp_x, sp_arrows) = match specialization_with_arrows(&**x) {
        Ok(v) => v,
        Err(e) => {
            rep.failures.push(format!("Sp({}) is not a category: {e}", x.name()));
            return rep;
        }
    };
    let sp_pos: BTreeMap<Arrow, usize> = sp_arrows.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let maps = continuous_maps(&alex, x, usize::MAX);
    let functors = enumerate_functors(c, &sp_x, usize::MAX);
    rep.maps = maps.len();
    rep.functors = functors.len();
    if maps.len() != functors.len() {
        rep.failures
            .push(format!("{} continuous maps but {} functors", maps.len(), functors.len()));
    }
    let mut images = BTreeSet::new();
    for f in &maps {
        match transpose(c, f, &sp_pos) {
            Some(t) if t.is_valid(c, &sp_x) => {
                if untranspose(c, &t, &alex, x, &sp_arrows) != *f {
                    rep.failures.push(format!("map {:?} does not round-trip", f.points));
                }
                images.insert(t.arr.clone());
            }
            _ => rep.failures.push(format!("map {:?} has no transpose", f.points)),
        }
    }
    for g in &functors {
        let back = untranspose(c, g, &alex, x, &sp_arrows);
        if !check_continuous(&back).passed() {
            rep.failures.push(format!("functor {:?} gives a discontinuous map", g.obj));
        } else if transpose(c, &back, &sp_pos).as_ref() != Some(g) {
            rep.failures.push(format!("functor {:?} does not round-trip", g.obj));
        }
    }
    if images.len() != maps.len() {
        rep.failures.push("transpose is not injective".into());
    }
    // naturality: transpose(k ∘ F ∘ Alex(H)) = Sp(k) ∘ transpose(F) ∘ H
    let endo_c = enumerate_functors(c, c, naturality_cap);
    let endo_x = continuous_maps(x, x, naturality_cap);
    for h in &endo_c {
        let ah = alex_functor(h, c, c, alex.clone(), alex.clone());
        for k in &endo_x {
            let Some(sp_k) = transpose_endo(k, &sp_arrows, &sp_pos) else {
                rep.failures.push("an endomap of X has no specialization".into());
                continue;
            };
            for f in maps.iter().take(naturality_cap) {
                rep.naturality_instances += 1;
                let lhs = k.after(f).and_then(|kf| kf.after(&ah)).ok().and_then(|m| transpose(c, &m, &sp_pos));
                let rhs = transpose(c, f, &sp_pos).map(|t| h.then(&t).then(&sp_k));
                if lhs.is_none() || lhs != rhs {
                    rep.failures.push(format!("naturality fails for H={:?}, k={:?}", h.obj, k.points));
                }
            }
        }
    }
    rep
}

fn transpose_endo(k: &ContinuousMap, sp_arrows: &[Arrow], sp_pos: &BTreeMap<Arrow, usize>) -> Option<Functor> {
    let arr = sp_arrows
        .iter()
        .map(|a| sp_pos.get(&k.apply(a)?).copied())
        .collect::<Option<Vec<_>>>()?;
    Some(Functor {
        obj: k.points.clone(),
        arr,
    })
}
