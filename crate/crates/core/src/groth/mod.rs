//! Étale spaces over `B` against continuous maps `B → Set`, at finite scale.
//!
//! `Set` is replaced by [`FinSetSpace`]: its points are the subsets of
//! `{0, …, bound-1}` and an ultra-arrow `A ⇝ lim (B)_{i→μ}` is a function
//! `A → B`, written `[a>b,…]`. Fibres of étale maps are numbered `0, …, k-1`
//! in point order.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::etale::{etale_from_lifts_named, EtaleError, EtaleMap, LiftChoice};
use crate::ucmaps::{check_continuous, check_two_cell, continuity_structures, ContinuousMap, MapError, SpaceRef, TwoCell};
use crate::ucspace::{label, Arrow, HomKey, Index, Label, UltraSpace, Universe};
use crate::ufcore::{FinSet, Subset};

mod pretopos;

pub use pretopos::{
    check_coproduct, check_equalizer, check_image, check_product, check_quotient, check_terminal, conservativity_check,
    coproduct, equalizer, forgetful, image, is_iso_cell, kernel_pair, pairing, product, pullback_cells, quotient,
    structure_count, terminal, underlying, Coproduct, Equalizer, Image, Leg, Product, Quotient, SetPullback,
};

/// Largest supported bound; the space has `2^bound` points.
pub const MAX_BOUND: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrothError {
    #[error("a fibre of size {needed} exceeds the bound {bound}")]
    BoundExceeded { needed: usize, bound: usize },
    #[error("bound {0} is outside 1..={MAX_BOUND}")]
    BadBound(usize),
    #[error("not a continuous set-valued map: {0}")]
    NotContinuous(String),
    #[error("relation at point {point} is not an equivalence relation")]
    NotAnEquivalence { point: String },
    #[error("relation is not preserved by the arrow action of {0}")]
    NotACongruence(String),
    #[error("morphisms do not match: {0}")]
    Mismatch(String),
    #[error("total space construction failed: {0}")]
    TotalSpace(String),
    #[error(transparent)]
    Etale(#[from] EtaleError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A finite function, as its graph.
pub type FinMap = BTreeMap<usize, usize>;

/// `[a>b,…]` with the domain in increasing order.
pub fn fn_label(f: &FinMap) -> Label {
    let parts: Vec<String> = f.iter().map(|(a, b)| format!("{a}>{b}")).collect();
    label(format!("[{}]", parts.join(",")))
}

pub fn parse_fn(l: &str) -> Option<FinMap> {
    let body = l.strip_prefix('[')?.strip_suffix(']')?;
    if body.is_empty() {
        return Some(FinMap::new());
    }
    let mut out = FinMap::new();
    for part in body.split(',') {
        let (a, b) = part.split_once('>')?;
        if out.insert(a.parse().ok()?, b.parse().ok()?).is_some() {
            return None;
        }
    }
    // only the canonical spelling is a label
    (&*fn_label(&out) == l).then_some(out)
}

fn set_label(s: Subset) -> String {
    let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// The finite fragment of `Set` on subsets of `{0, …, bound-1}`.
#[derive(Clone, Debug)]
pub struct FinSetSpace {
    name: String,
    bound: usize,
    points: FinSet,
    universe: Universe,
}

impl FinSetSpace {
    pub fn new(bound: usize, universe: &Universe) -> Result<FinSetSpace, GrothError> {
        if bound == 0 || bound > MAX_BOUND {
            return Err(GrothError::BadBound(bound));
        }
        let labels = (0..1u64 << bound).map(|m| set_label(Subset(m)));
        Ok(FinSetSpace {
            name: format!("Set≤{bound}"),
            bound,
            points: FinSet::new(format!("P{bound}"), labels).expect("distinct subsets"),
            universe: universe.clone(),
        })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn point_of(s: Subset) -> usize {
        s.0 as usize
    }

    pub fn subset_of(p: usize) -> Subset {
        Subset(p as u64)
    }

    fn is_fn(f: &FinMap, a: Subset, b: Subset) -> bool {
        f.len() == a.len() && f.iter().all(|(&x, &y)| a.contains(x) && b.contains(y))
    }

    fn typed(&self, r: &Arrow) -> Option<FinMap> {
        let f = parse_fn(&r.label)?;
        Self::is_fn(&f, Self::subset_of(r.src()), Self::subset_of(r.dst())).then_some(f)
    }
}

impl UltraSpace for FinSetSpace {
    fn name(&self) -> &str {
        &self.name
    }

    fn points(&self) -> &FinSet {
        &self.points
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    /// All functions `A → B`: the ultraproduct of a constant family over a
    /// principal index is its value at the point.
    fn hom(&self, key: &HomKey) -> Vec<Label> {
        let a: Vec<usize> = Self::subset_of(key.src).iter().collect();
        let b: Vec<usize> = Self::subset_of(key.dst()).iter().collect();
        crate::ucmaps::point_maps(a.len(), b.len())
            .into_iter()
            .map(|m| fn_label(&a.iter().zip(&m).map(|(&x, &j)| (x, b[j])).collect()))
            .collect()
    }

    fn has_arrow(&self, key: &HomKey, l: &str) -> bool {
        parse_fn(l).is_some_and(|f| Self::is_fn(&f, Self::subset_of(key.src), Self::subset_of(key.dst())))
    }

    fn converges(&self, x: usize, target: crate::ucspace::Target) -> bool {
        Self::subset_of(x).is_empty() || !Self::subset_of(target.point).is_empty()
    }

    fn ident(&self, x: usize) -> Option<Label> {
        Some(fn_label(&Self::subset_of(x).iter().map(|i| (i, i)).collect()))
    }

    fn reindex(&self, r: &Arrow, _kappa: Index) -> Option<Label> {
        self.typed(r).map(|_| r.label.clone())
    }

    fn compose(&self, s: &Arrow, r: &Arrow) -> Option<Label> {
        let (f, g) = (self.typed(r)?, self.typed(s)?);
        let h: Option<FinMap> = f.iter().map(|(&x, y)| Some((x, *g.get(y)?))).collect();
        h.map(|h| fn_label(&h))
    }
}

/// A continuous map from a base space into [`FinSetSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetValuedMap {
    map: ContinuousMap,
}

impl SetValuedMap {
    pub fn map(&self) -> &ContinuousMap {
        &self.map
    }

    pub fn base(&self) -> &SpaceRef {
        self.map.src()
    }

    pub fn value(&self, b: usize) -> Subset {
        FinSetSpace::subset_of(self.map.point(b))
    }

    pub fn values(&self) -> Vec<Subset> {
        (0..self.map.points().len()).map(|b| self.value(b)).collect()
    }

    /// The function `f(r) : f(b) → f(b′)`.
    pub fn action(&self, r: &Arrow) -> FinMap {
        self.map.arrow_table().get(r).and_then(|l| parse_fn(l)).unwrap_or_default()
    }

    /// Position of `v` in `f(b)`.
    pub fn position(&self, b: usize, v: usize) -> usize {
        self.value(b).iter().position(|x| x == v).expect("element of the value")
    }

    pub fn element(&self, b: usize, i: usize) -> usize {
        self.value(b).iter().nth(i).expect("position in range")
    }
}

/// Base space, `Set` fragment and bound shared by the constructions over a base.
#[derive(Clone, Debug)]
pub struct Groth {
    pub base: SpaceRef,
    pub set: SpaceRef,
    pub bound: usize,
}

impl Groth {
    pub fn new(base: SpaceRef, bound: usize) -> Result<Groth, GrothError> {
        let set: SpaceRef = Arc::new(FinSetSpace::new(bound, base.universe())?);
        Ok(Groth { base, set, bound })
    }

    fn check_size(&self, needed: usize) -> Result<(), GrothError> {
        if needed > self.bound {
            return Err(GrothError::BoundExceeded {
                needed,
                bound: self.bound,
            });
        }
        Ok(())
    }

    /// Wrap and validate a map into the `Set` fragment.
    pub fn set_valued(&self, map: ContinuousMap) -> Result<SetValuedMap, GrothError> {
        if map.dst().points() != self.set.points() {
            return Err(GrothError::NotContinuous("codomain is not the Set fragment".into()));
        }
        if let Some(v) = check_continuous(&map).violations.first() {
            return Err(GrothError::NotContinuous(format!("{}: {}", v.law, v.message)));
        }
        Ok(SetValuedMap {
            map: map.with_endpoints(self.base.clone(), self.set.clone()),
        })
    }

    /// A set-valued map from its values and the action of each singleton-indexed
    /// base arrow; other arrows act as their reindexing to `1`.
    pub fn from_action(
        &self,
        values: &[Subset],
        act: impl Fn(&Arrow) -> Option<FinMap>,
    ) -> Result<SetValuedMap, GrothError> {
        if let Some(s) = values.iter().find(|s| s.len() > self.bound || !s.is_subset_of(Subset::full(self.bound))) {
            return Err(GrothError::BoundExceeded {
                needed: s.iter().last().map_or(0, |x| x + 1).max(s.len()),
                bound: self.bound,
            });
        }
        let mut arrows = BTreeMap::new();
        for r in self.base.arrows() {
            let one = self
                .base
                .reindex_arrow(&r, Index::ONE)
                .ok_or_else(|| GrothError::NotContinuous(format!("{} has no reindexing", r.label)))?;
            let f = act(&one).ok_or_else(|| GrothError::NotContinuous(format!("no action for {}", r.label)))?;
            arrows.insert(r, fn_label(&f));
        }
        let points = values.iter().map(|&s| FinSetSpace::point_of(s)).collect();
        let map = ContinuousMap::new(self.base.clone(), self.set.clone(), points, arrows)?;
        self.set_valued(map)
    }

    /// A morphism `f ⇒ g` from its components.
    pub fn morphism(&self, f: &SetValuedMap, g: &SetValuedMap, components: &[FinMap]) -> TwoCell {
        TwoCell {
            source: f.map.clone(),
            target: g.map.clone(),
            components: components.iter().map(fn_label).collect(),
        }
    }

    /// Components of a morphism, as functions.
    pub fn components(&self, alpha: &TwoCell) -> Vec<FinMap> {
        alpha.components.iter().map(|l| parse_fn(l).unwrap_or_default()).collect()
    }

    /// The identity-valued map `b ↦ {0}`.
    pub fn terminal(&self) -> SetValuedMap {
        terminal(self)
    }

    /// `π*`: `b ↦ π⁻¹(b)` numbered in point order, `r ↦ (e ↦ r(e))`.
    pub fn fiber_map(&self, pi: &EtaleMap) -> Result<SetValuedMap, GrothError> {
        let n = self.base.points().len();
        let fibres: Vec<Vec<usize>> = (0..n).map(|b| pi.fiber(b).iter().collect()).collect();
        if let Some(big) = fibres.iter().map(Vec::len).max() {
            self.check_size(big)?;
        }
        let mut arrows = BTreeMap::new();
        for r in self.base.arrows() {
            let mut f = FinMap::new();
            for (i, &e) in fibres[r.src()].iter().enumerate() {
                let lift = pi.lift(e, &r).ok_or_else(|| GrothError::Mismatch(format!("no lift of {}", r.label)))?;
                let j = fibres[r.dst()].iter().position(|&x| x == lift.dst()).expect("lift lands in the fibre");
                f.insert(i, j);
            }
            arrows.insert(r, fn_label(&f));
        }
        let points = fibres.iter().map(|v| FinSetSpace::point_of(Subset::full(v.len()))).collect();
        self.set_valued(ContinuousMap::new(self.base.clone(), self.set.clone(), points, arrows)?)
    }

    /// `∫f`: points `(b, v)` with `v ∈ f(b)`; the lift of `r` at `(b, v)` lands at `(b′, f(r)(v))`.
    pub fn total_space(&self, f: &SetValuedMap) -> Result<EtaleMap, GrothError> {
        let n = self.base.points().len();
        let sizes: Vec<usize> = (0..n).map(|b| f.value(b).len()).collect();
        let actions = self
            .base
            .arrows()
            .into_iter()
            .filter(|r| r.index() == Index::ONE)
            .map(|r| {
                let act = f.action(&r);
                let pos: Vec<usize> = f
                    .value(r.src())
                    .iter()
                    .map(|v| f.position(r.dst(), act[&v]))
                    .collect();
                (r, pos)
            })
            .collect();
        let bp = self.base.points();
        let choice = LiftChoice { sizes, actions };
        etale_from_lifts_named(&self.base, &choice, |b, i| format!("({},{})", bp.label(b), f.element(b, i)))
            .ok_or_else(|| GrothError::TotalSpace(format!("∫ of a map over {}", self.base.name())))
    }

    /// The unit `E → ∫π*`, `e ↦ (π(e), e)`, `r̄ ↦ π(r̄)`.
    pub fn unit(&self, pi: &EtaleMap) -> Result<(ContinuousMap, EtaleMap), GrothError> {
        let t = self.total_space(&self.fiber_map(pi)?)?;
        let mut offset = vec![0; self.base.points().len() + 1];
        for b in 0..self.base.points().len() {
            offset[b + 1] = offset[b] + pi.fiber(b).len();
        }
        let points = (0..pi.total().points().len())
            .map(|e| {
                let b = pi.project(e);
                offset[b] + pi.fiber(b).iter().position(|x| x == e).expect("in own fibre")
            })
            .collect();
        let arrows = pi
            .map()
            .arrow_table()
            .iter()
            .map(|(a, l)| (a.clone(), l.clone()))
            .collect();
        let u = ContinuousMap::new(pi.total().clone(), t.total().clone(), points, arrows)?;
        Ok((u, t))
    }

    /// The counit `f ⇒ (∫f)*`, numbering each `f(b)` in increasing order.
    pub fn counit(&self, f: &SetValuedMap) -> Result<(TwoCell, SetValuedMap), GrothError> {
        let star = self.fiber_map(&self.total_space(f)?)?;
        let components: Vec<FinMap> = (0..self.base.points().len())
            .map(|b| f.value(b).iter().enumerate().map(|(i, v)| (v, i)).collect())
            .collect();
        Ok((self.morphism(f, &star, &components), star))
    }

    /// `h*` for a map `h : E → E′` over the base.
    pub fn star_morphism(&self, pi: &EtaleMap, rho: &EtaleMap, h: &ContinuousMap) -> Result<TwoCell, GrothError> {
        let (f, g) = (self.fiber_map(pi)?, self.fiber_map(rho)?);
        let components: Vec<FinMap> = (0..self.base.points().len())
            .map(|b| {
                let dst: Vec<usize> = rho.fiber(b).iter().collect();
                pi.fiber(b)
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (i, dst.iter().position(|&x| x == h.point(e)).unwrap_or(usize::MAX)))
                    .collect()
            })
            .collect();
        Ok(self.morphism(&f, &g, &components))
    }

    /// `∫α : ∫f → ∫g`, `(b, v) ↦ (b, α_b(v))`.
    pub fn integral_morphism(
        &self,
        alpha: &TwoCell,
        f: &SetValuedMap,
        g: &SetValuedMap,
        tf: &EtaleMap,
        tg: &EtaleMap,
    ) -> Result<ContinuousMap, GrothError> {
        let comps = self.components(alpha);
        let locate = |t: &EtaleMap, m: &SetValuedMap, b: usize, v: usize| -> Option<usize> {
            let i = m.value(b).iter().position(|x| x == v)?;
            t.fiber(b).iter().nth(i)
        };
        let points = (0..tf.total().points().len())
            .map(|p| {
                let b = tf.project(p);
                let i = tf.fiber(b).iter().position(|x| x == p)?;
                locate(tg, g, b, *comps[b].get(&f.element(b, i))?)
            })
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| GrothError::Mismatch("component leaves the value".into()))?;
        let arrows = tf.total().arrows().into_iter().map(|a| {
            let l = a.label.clone();
            (a, l)
        });
        Ok(ContinuousMap::new(tf.total().clone(), tg.total().clone(), points, arrows.collect())?)
    }

    /// Every morphism `f ⇒ g`, up to `limit`.
    pub fn set_morphisms(&self, f: &SetValuedMap, g: &SetValuedMap, limit: usize) -> Vec<TwoCell> {
        let n = self.base.points().len();
        let choices: Vec<Vec<FinMap>> = (0..n)
            .map(|b| {
                let (a, c): (Vec<usize>, Vec<usize>) = (f.value(b).iter().collect(), g.value(b).iter().collect());
                crate::ucmaps::point_maps(a.len(), c.len())
                    .into_iter()
                    .map(|m| a.iter().zip(&m).map(|(&x, &j)| (x, c[j])).collect())
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for pick in crate::ucmaps::point_maps_ragged(&choices.iter().map(Vec::len).collect::<Vec<_>>()) {
            if out.len() >= limit {
                break;
            }
            let comps: Vec<FinMap> = pick.iter().enumerate().map(|(b, &k)| choices[b][k].clone()).collect();
            let cell = self.morphism(f, g, &comps);
            if check_two_cell(&cell).passed() {
                out.push(cell);
            }
        }
        out
    }

    /// Every map `E → E′` over the base, up to `limit`.
    pub fn etale_morphisms(&self, pi: &EtaleMap, rho: &EtaleMap, limit: usize) -> Vec<ContinuousMap> {
        let sizes: Vec<usize> = (0..pi.total().points().len())
            .map(|e| rho.fiber(pi.project(e)).len())
            .collect();
        let mut out = Vec::new();
        for pick in crate::ucmaps::point_maps_ragged(&sizes) {
            if out.len() >= limit {
                break;
            }
            let points: Vec<usize> = pick
                .iter()
                .enumerate()
                .map(|(e, &k)| rho.fiber(pi.project(e)).iter().nth(k).expect("in range"))
                .collect();
            for h in continuity_structures(pi.total(), rho.total(), &points, limit - out.len()) {
                if rho.map().after(&h).is_ok_and(|x| &x == pi.map()) {
                    out.push(h);
                }
            }
        }
        out
    }

    /// Every set-valued map whose values have at most `max_size` elements.
    pub fn set_valued_catalog(&self, max_size: usize) -> Vec<SetValuedMap> {
        self.set_valued_catalog_within(self.bound, max_size)
    }

    /// As [`Groth::set_valued_catalog`], with values inside `{0, …, elements-1}`.
    pub fn set_valued_catalog_within(&self, elements: usize, max_size: usize) -> Vec<SetValuedMap> {
        let values: Vec<Subset> = Subset::all(elements.min(self.bound)).filter(|s| s.len() <= max_size).collect();
        let n = self.base.points().len();
        let mut out = Vec::new();
        for pick in crate::ucmaps::point_maps(n, values.len()) {
            let points: Vec<usize> = pick.iter().map(|&k| FinSetSpace::point_of(values[k])).collect();
            for m in continuity_structures(&self.base, &self.set, &points, usize::MAX) {
                out.push(SetValuedMap { map: m });
            }
        }
        out
    }
}

/// Outcome of the unit, counit and functoriality checks over one base.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundTripReport {
    pub units: usize,
    pub counits: usize,
    pub morphisms: usize,
    pub failures: Vec<String>,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn cell_eq(a: &TwoCell, b: &TwoCell) -> bool {
    a.components == b.components && a.source == b.source && a.target == b.target
}

/// The unit and counit of `∫ ⊣ (−)*` are isomorphisms, and both functors act
/// correctly on up to `morphism_cap` morphisms per pair.
pub fn roundtrip_checks(
    ctx: &Groth,
    etales: &[EtaleMap],
    set_maps: &[SetValuedMap],
    morphism_cap: usize,
) -> RoundTripReport {
    let mut rep = RoundTripReport::default();
    let mut units = Vec::new();
    for (k, pi) in etales.iter().enumerate() {
        rep.units += 1;
        match ctx.unit(pi) {
            Ok((u, t)) => {
                let over = t.map().after(&u).is_ok_and(|x| &x == pi.map());
                if !u.is_iso() || !over {
                    rep.failures.push(format!("unit of étale map #{k} is not an isomorphism over the base"));
                }
                units.push(Some((u, t)));
            }
            Err(e) => {
                rep.failures.push(format!("unit of étale map #{k}: {e}"));
                units.push(None);
            }
        }
    }
    let mut counits = Vec::new();
    for (k, f) in set_maps.iter().enumerate() {
        rep.counits += 1;
        match ctx.counit(f) {
            Ok((eps, star)) => {
                let sizes = f.values().iter().map(|s| s.len()).eq(star.values().iter().map(|s| s.len()));
                if !check_two_cell(&eps).passed() || !is_iso_cell(ctx, &eps) || !sizes {
                    rep.failures.push(format!("counit of set-valued map #{k} is not an isomorphism"));
                }
                counits.push(ctx.total_space(f).ok().map(|t| (eps, star, t)));
            }
            Err(e) => {
                rep.failures.push(format!("counit of set-valued map #{k}: {e}"));
                counits.push(None);
            }
        }
    }
    // (−)* then ∫ agrees with the original morphism up to the units
    for (i, pi) in etales.iter().enumerate() {
        for (j, rho) in etales.iter().enumerate() {
            let (Some((u_pi, t_pi)), Some((u_rho, t_rho))) = (&units[i], &units[j]) else { continue };
            for h in ctx.etale_morphisms(pi, rho, morphism_cap) {
                rep.morphisms += 1;
                let ok = (|| -> Result<bool, GrothError> {
                    let hs = ctx.star_morphism(pi, rho, &h)?;
                    if !check_two_cell(&hs).passed() {
                        return Ok(false);
                    }
                    let (fs, gs) = (ctx.fiber_map(pi)?, ctx.fiber_map(rho)?);
                    let ih = ctx.integral_morphism(&hs, &fs, &gs, t_pi, t_rho)?;
                    Ok(ih.after(u_pi)? == u_rho.after(&h)?)
                })();
                if !ok.unwrap_or(false) {
                    rep.failures.push(format!("∫h* ≠ h up to units for étale maps #{i} → #{j}"));
                }
            }
        }
    }
    // ∫ then (−)* agrees with the original morphism up to the counits
    for (i, f) in set_maps.iter().enumerate() {
        for (j, g) in set_maps.iter().enumerate() {
            let (Some((ef, sf, tf)), Some((eg, sg, tg))) = (&counits[i], &counits[j]) else { continue };
            for alpha in ctx.set_morphisms(f, g, morphism_cap) {
                rep.morphisms += 1;
                let ok = (|| -> Result<bool, GrothError> {
                    let ia = ctx.integral_morphism(&alpha, f, g, tf, tg)?;
                    if !check_continuous(&ia).passed() || tg.map().after(&ia)? != *tf.map() {
                        return Ok(false);
                    }
                    let back = ctx.star_morphism(tf, tg, &ia)?;
                    let back = TwoCell {
                        source: sf.map.clone(),
                        target: sg.map.clone(),
                        components: back.components,
                    };
                    match (ef.vertical(&back), alpha.vertical(eg)) {
                        (Some(l), Some(r)) => Ok(cell_eq(&l, &r)),
                        _ => Ok(false),
                    }
                })();
                if !ok.unwrap_or(false) {
                    rep.failures.push(format!("(∫α)* ≠ α up to counits for set-valued maps #{i} → #{j}"));
                }
            }
        }
    }
    rep
}
