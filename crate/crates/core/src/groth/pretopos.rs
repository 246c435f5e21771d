//! Finite limits, coproducts, images and quotients of set-valued maps.
//!
//! Each operation is computed pointwise and equipped with the arrow action
//! that makes its structure maps natural; the `structures` field records how
//! many continuity structures on the same values do so (always one).

use std::collections::BTreeSet;

use super::{FinMap, FinSetSpace, Groth, GrothError, SetValuedMap};
use crate::ucmaps::{check_two_cell, continuity_structures, TwoCell};
use crate::ufcore::Subset;

/// A structure map attached to a candidate object.
pub enum Leg<'a> {
    /// `from ⇒ new`.
    Into { from: &'a SetValuedMap, components: Vec<FinMap> },
    /// `new ⇒ to`.
    OutOf { to: &'a SetValuedMap, components: Vec<FinMap> },
}

/// Number of continuity structures on `values` making every leg a morphism.
pub fn structure_count(ctx: &Groth, values: &[Subset], legs: &[Leg]) -> usize {
    let points: Vec<usize> = values.iter().map(|&s| FinSetSpace::point_of(s)).collect();
    continuity_structures(&ctx.base, &ctx.set, &points, usize::MAX)
        .into_iter()
        .filter(|m| {
            let cand = SetValuedMap { map: m.clone() };
            legs.iter().all(|leg| {
                let cell = match leg {
                    Leg::Into { from, components } => ctx.morphism(from, &cand, components),
                    Leg::OutOf { to, components } => ctx.morphism(&cand, to, components),
                };
                check_two_cell(&cell).passed()
            })
        })
        .count()
}

/// Elements of each value.
pub fn forgetful(f: &SetValuedMap) -> Vec<Vec<usize>> {
    f.values().iter().map(|s| s.iter().collect()).collect()
}

/// Components of a morphism as plain functions.
pub fn underlying(ctx: &Groth, alpha: &TwoCell) -> Vec<FinMap> {
    ctx.components(alpha)
}

fn source_of(alpha: &TwoCell) -> SetValuedMap {
    SetValuedMap {
        map: alpha.source.clone(),
    }
}

fn target_of(alpha: &TwoCell) -> SetValuedMap {
    SetValuedMap {
        map: alpha.target.clone(),
    }
}

fn pointwise_bijective(ctx: &Groth, alpha: &TwoCell) -> bool {
    let (f, g) = (source_of(alpha), target_of(alpha));
    ctx.components(alpha).iter().enumerate().all(|(b, c)| {
        let image: BTreeSet<usize> = c.values().copied().collect();
        c.len() == f.value(b).len() && image.len() == c.len() && image == g.value(b).iter().collect()
    })
}

/// An isomorphism of set-valued maps: pointwise bijective, and the pointwise
/// inverse is again a morphism.
pub fn is_iso_cell(ctx: &Groth, alpha: &TwoCell) -> bool {
    if !check_two_cell(alpha).passed() || !pointwise_bijective(ctx, alpha) {
        return false;
    }
    let inverse: Vec<FinMap> = ctx
        .components(alpha)
        .iter()
        .map(|c| c.iter().map(|(&v, &w)| (w, v)).collect())
        .collect();
    check_two_cell(&ctx.morphism(&target_of(alpha), &source_of(alpha), &inverse)).passed()
}

/// `φ` is an isomorphism exactly when its underlying family is bijective.
pub fn conservativity_check(ctx: &Groth, phi: &TwoCell) -> bool {
    is_iso_cell(ctx, phi) == pointwise_bijective(ctx, phi)
}

fn after(ctx: &Groth, second: &TwoCell, first: &TwoCell) -> Option<Vec<FinMap>> {
    first.vertical(second).map(|c| ctx.components(&c))
}

/// `b ↦ {0}`.
pub fn terminal(ctx: &Groth) -> SetValuedMap {
    let values = vec![Subset::singleton(0); ctx.base.points().len()];
    ctx.from_action(&values, |_| Some([(0, 0)].into_iter().collect()))
        .expect("the terminal map is continuous")
}

/// Exactly one morphism from each test map into the terminal map.
pub fn check_terminal(ctx: &Groth, tests: &[SetValuedMap]) -> Result<usize, String> {
    let one = terminal(ctx);
    let count = structure_count(ctx, &one.values(), &[]);
    if count != 1 {
        return Err(format!("terminal values carry {count} structures"));
    }
    for (k, h) in tests.iter().enumerate() {
        let n = ctx.set_morphisms(h, &one, usize::MAX).len();
        if n != 1 {
            return Err(format!("test map #{k} has {n} morphisms to the terminal map"));
        }
    }
    Ok(tests.len())
}

#[derive(Clone, Debug)]
pub struct Product {
    pub obj: SetValuedMap,
    pub p1: TwoCell,
    pub p2: TwoCell,
    pub structures: usize,
}

/// `f × g`, with `(v, w)` numbered `pos(v)·|g(b)| + pos(w)`.
pub fn product(ctx: &Groth, f: &SetValuedMap, g: &SetValuedMap) -> Result<Product, GrothError> {
    let n = ctx.base.points().len();
    let size = |b: usize| f.value(b).len() * g.value(b).len();
    let values: Vec<Subset> = (0..n).map(|b| Subset::full(size(b))).collect();
    if let Some(big) = (0..n).map(size).max().filter(|&s| s > ctx.bound) {
        return Err(GrothError::BoundExceeded {
            needed: big,
            bound: ctx.bound,
        });
    }
    let width = |b: usize| g.value(b).len();
    let obj = ctx.from_action(&values, |r| {
        let (fa, ga) = (f.action(r), g.action(r));
        Some(
            (0..size(r.src()))
                .map(|k| {
                    let v = fa[&f.element(r.src(), k / width(r.src()))];
                    let w = ga[&g.element(r.src(), k % width(r.src()))];
                    (k, f.position(r.dst(), v) * width(r.dst()) + g.position(r.dst(), w))
                })
                .collect(),
        )
    })?;
    let c1: Vec<FinMap> = (0..n)
        .map(|b| (0..size(b)).map(|k| (k, f.element(b, k / width(b)))).collect())
        .collect();
    let c2: Vec<FinMap> = (0..n)
        .map(|b| (0..size(b)).map(|k| (k, g.element(b, k % width(b)))).collect())
        .collect();
    let structures = structure_count(
        ctx,
        &values,
        &[
            Leg::OutOf {
                to: f,
                components: c1.clone(),
            },
            Leg::OutOf {
                to: g,
                components: c2.clone(),
            },
        ],
    );
    Ok(Product {
        p1: ctx.morphism(&obj, f, &c1),
        p2: ctx.morphism(&obj, g, &c2),
        obj,
        structures,
    })
}

/// `⟨α, β⟩ : h ⇒ f × g`.
pub fn pairing(ctx: &Groth, prod: &Product, alpha: &TwoCell, beta: &TwoCell) -> TwoCell {
    let (f, g) = (target_of(&prod.p1), target_of(&prod.p2));
    let h = source_of(alpha);
    let (a, b) = (ctx.components(alpha), ctx.components(beta));
    let comps: Vec<FinMap> = (0..a.len())
        .map(|p| {
            a[p].iter()
                .map(|(&x, &v)| (x, f.position(p, v) * g.value(p).len() + g.position(p, b[p][&x])))
                .collect()
        })
        .collect();
    ctx.morphism(&h, &prod.obj, &comps)
}

/// Universal property against every cone from the test maps, pointwise
/// agreement with the product of sets, and reflection of pointwise products.
pub fn check_product(
    ctx: &Groth,
    prod: &Product,
    f: &SetValuedMap,
    g: &SetValuedMap,
    tests: &[SetValuedMap],
    cap: usize,
) -> Result<usize, String> {
    if prod.structures != 1 {
        return Err(format!("product values carry {} structures", prod.structures));
    }
    // the underlying family is the product of sets
    let (a, b) = (ctx.components(&prod.p1), ctx.components(&prod.p2));
    for p in 0..ctx.base.points().len() {
        let pairs: BTreeSet<(usize, usize)> = prod.obj.value(p).iter().map(|k| (a[p][&k], b[p][&k])).collect();
        let expect: BTreeSet<(usize, usize)> =
            f.value(p).iter().flat_map(|v| g.value(p).iter().map(move |w| (v, w))).collect();
        if pairs != expect || pairs.len() != prod.obj.value(p).len() {
            return Err("product is not pointwise the product of sets".into());
        }
    }
    let mut cones = 0;
    for h in tests {
        let to_f = ctx.set_morphisms(h, f, cap);
        let to_g = ctx.set_morphisms(h, g, cap);
        let to_p = ctx.set_morphisms(h, &prod.obj, usize::MAX);
        for alpha in &to_f {
            for beta in &to_g {
                cones += 1;
                let (ca, cb) = (ctx.components(alpha), ctx.components(beta));
                let factoring: Vec<&TwoCell> = to_p
                    .iter()
                    .filter(|gam| after(ctx, &prod.p1, gam) == Some(ca.clone()) && after(ctx, &prod.p2, gam) == Some(cb.clone()))
                    .collect();
                if factoring.len() != 1 || factoring[0].components != pairing(ctx, prod, alpha, beta).components {
                    return Err(format!("a cone factors {} times through the product", factoring.len()));
                }
                // a pointwise product cone is a product
                let gam = factoring[0];
                if pointwise_bijective(ctx, gam) != is_iso_cell(ctx, gam) {
                    return Err("comparison map is pointwise bijective but not invertible".into());
                }
            }
        }
    }
    Ok(cones)
}

#[derive(Clone, Debug)]
pub struct Equalizer {
    pub obj: SetValuedMap,
    pub incl: TwoCell,
    pub structures: usize,
}

/// `{v ∈ f(b) : α_b(v) = β_b(v)}` with the restricted action.
pub fn equalizer(ctx: &Groth, alpha: &TwoCell, beta: &TwoCell) -> Result<Equalizer, GrothError> {
    let f = source_of(alpha);
    if beta.source != alpha.source || beta.target != alpha.target {
        return Err(GrothError::Mismatch("equalizer of non-parallel morphisms".into()));
    }
    let (a, b) = (ctx.components(alpha), ctx.components(beta));
    let values: Vec<Subset> = (0..a.len())
        .map(|p| Subset::from_indices(f.value(p).iter().filter(|v| a[p].get(v) == b[p].get(v))))
        .collect();
    let obj = ctx.from_action(&values, |r| {
        let act = f.action(r);
        let restricted: FinMap = values[r.src()].iter().map(|v| (v, act[&v])).collect();
        restricted.values().all(|&w| values[r.dst()].contains(w)).then_some(restricted)
    })?;
    let comps: Vec<FinMap> = values.iter().map(|s| s.iter().map(|v| (v, v)).collect()).collect();
    let structures = structure_count(
        ctx,
        &values,
        &[Leg::OutOf {
            to: &f,
            components: comps.clone(),
        }],
    );
    Ok(Equalizer {
        incl: ctx.morphism(&obj, &f, &comps),
        obj,
        structures,
    })
}

/// Universal property of the equalizer against every morphism from a test map.
pub fn check_equalizer(
    ctx: &Groth,
    eq: &Equalizer,
    alpha: &TwoCell,
    beta: &TwoCell,
    tests: &[SetValuedMap],
    cap: usize,
) -> Result<usize, String> {
    if eq.structures != 1 {
        return Err(format!("equalizer values carry {} structures", eq.structures));
    }
    let f = source_of(alpha);
    let (a, b) = (ctx.components(alpha), ctx.components(beta));
    for p in 0..ctx.base.points().len() {
        let expect = Subset::from_indices(f.value(p).iter().filter(|v| a[p][v] == b[p][v]));
        if eq.obj.value(p) != expect {
            return Err("equalizer is not pointwise the equalizer of sets".into());
        }
    }
    let mut cones = 0;
    for h in tests {
        let into = ctx.set_morphisms(h, &eq.obj, usize::MAX);
        for gam in ctx.set_morphisms(h, &f, cap) {
            cones += 1;
            let equalizes = after(ctx, alpha, &gam) == after(ctx, beta, &gam);
            let cg = ctx.components(&gam);
            let n = into.iter().filter(|d| after(ctx, &eq.incl, d) == Some(cg.clone())).count();
            if n != usize::from(equalizes) {
                return Err(format!("a morphism factors {n} times through the equalizer"));
            }
        }
    }
    Ok(cones)
}

#[derive(Clone, Debug)]
pub struct Coproduct {
    pub obj: SetValuedMap,
    pub i1: TwoCell,
    pub i2: TwoCell,
    pub structures: usize,
}

/// `f + g`, with `f(b)` first and `g(b)` after it.
pub fn coproduct(ctx: &Groth, f: &SetValuedMap, g: &SetValuedMap) -> Result<Coproduct, GrothError> {
    let n = ctx.base.points().len();
    let size = |b: usize| f.value(b).len() + g.value(b).len();
    if let Some(big) = (0..n).map(size).max().filter(|&s| s > ctx.bound) {
        return Err(GrothError::BoundExceeded {
            needed: big,
            bound: ctx.bound,
        });
    }
    let values: Vec<Subset> = (0..n).map(|b| Subset::full(size(b))).collect();
    let left = |b: usize| f.value(b).len();
    let obj = ctx.from_action(&values, |r| {
        let (fa, ga) = (f.action(r), g.action(r));
        Some(
            (0..size(r.src()))
                .map(|k| {
                    let image = if k < left(r.src()) {
                        f.position(r.dst(), fa[&f.element(r.src(), k)])
                    } else {
                        left(r.dst()) + g.position(r.dst(), ga[&g.element(r.src(), k - left(r.src()))])
                    };
                    (k, image)
                })
                .collect(),
        )
    })?;
    let c1: Vec<FinMap> = (0..n).map(|b| f.value(b).iter().enumerate().map(|(i, v)| (v, i)).collect()).collect();
    let c2: Vec<FinMap> = (0..n)
        .map(|b| g.value(b).iter().enumerate().map(|(i, w)| (w, left(b) + i)).collect())
        .collect();
    let structures = structure_count(
        ctx,
        &values,
        &[
            Leg::Into {
                from: f,
                components: c1.clone(),
            },
            Leg::Into {
                from: g,
                components: c2.clone(),
            },
        ],
    );
    Ok(Coproduct {
        i1: ctx.morphism(f, &obj, &c1),
        i2: ctx.morphism(g, &obj, &c2),
        obj,
        structures,
    })
}

/// `[α, β] : f + g ⇒ h`.
pub fn copairing(ctx: &Groth, co: &Coproduct, alpha: &TwoCell, beta: &TwoCell) -> TwoCell {
    let (a, b) = (ctx.components(alpha), ctx.components(beta));
    let (f, g) = (source_of(alpha), source_of(beta));
    let comps: Vec<FinMap> = (0..a.len())
        .map(|p| {
            let left = f.value(p).len();
            (0..co.obj.value(p).len())
                .map(|k| {
                    let image = if k < left {
                        a[p][&f.element(p, k)]
                    } else {
                        b[p][&g.element(p, k - left)]
                    };
                    (k, image)
                })
                .collect()
        })
        .collect();
    ctx.morphism(&co.obj, &target_of(alpha), &comps)
}

#[derive(Clone, Debug)]
pub struct SetPullback {
    pub obj: SetValuedMap,
    pub p1: TwoCell,
    pub p2: TwoCell,
    /// `(v, w)` for each element, per point.
    pub pairs: Vec<Vec<(usize, usize)>>,
}

/// The pullback of `α : f ⇒ h` and `β : g ⇒ h`.
pub fn pullback_cells(ctx: &Groth, alpha: &TwoCell, beta: &TwoCell) -> Result<SetPullback, GrothError> {
    let (f, g) = (source_of(alpha), source_of(beta));
    let (a, b) = (ctx.components(alpha), ctx.components(beta));
    let n = ctx.base.points().len();
    let pairs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|p| {
            f.value(p)
                .iter()
                .flat_map(|v| g.value(p).iter().map(move |w| (v, w)))
                .filter(|(v, w)| a[p][v] == b[p][w])
                .collect()
        })
        .collect();
    if let Some(big) = pairs.iter().map(Vec::len).max().filter(|&s| s > ctx.bound) {
        return Err(GrothError::BoundExceeded {
            needed: big,
            bound: ctx.bound,
        });
    }
    let values: Vec<Subset> = pairs.iter().map(|v| Subset::full(v.len())).collect();
    let obj = ctx.from_action(&values, |r| {
        let (fa, ga) = (f.action(r), g.action(r));
        pairs[r.src()]
            .iter()
            .enumerate()
            .map(|(k, (v, w))| {
                let q = (fa[v], ga[w]);
                Some((k, pairs[r.dst()].iter().position(|&x| x == q)?))
            })
            .collect()
    })?;
    let c1: Vec<FinMap> = pairs.iter().map(|v| v.iter().enumerate().map(|(k, p)| (k, p.0)).collect()).collect();
    let c2: Vec<FinMap> = pairs.iter().map(|v| v.iter().enumerate().map(|(k, p)| (k, p.1)).collect()).collect();
    Ok(SetPullback {
        p1: ctx.morphism(&obj, &f, &c1),
        p2: ctx.morphism(&obj, &g, &c2),
        obj,
        pairs,
    })
}

/// Universal property, disjointness and pullback stability of `f + g`.
pub fn check_coproduct(
    ctx: &Groth,
    co: &Coproduct,
    f: &SetValuedMap,
    g: &SetValuedMap,
    tests: &[SetValuedMap],
    cap: usize,
) -> Result<usize, String> {
    if co.structures != 1 {
        return Err(format!("coproduct values carry {} structures", co.structures));
    }
    for p in 0..ctx.base.points().len() {
        if co.obj.value(p).len() != f.value(p).len() + g.value(p).len() {
            return Err("coproduct is not pointwise the disjoint union".into());
        }
    }
    let meet = pullback_cells(ctx, &co.i1, &co.i2).map_err(|e| e.to_string())?;
    if meet.pairs.iter().any(|v| !v.is_empty()) {
        return Err("coproduct injections overlap".into());
    }
    let mut cones = 0;
    for h in tests {
        let from_f = ctx.set_morphisms(f, h, cap);
        let from_g = ctx.set_morphisms(g, h, cap);
        let out = ctx.set_morphisms(&co.obj, h, usize::MAX);
        for alpha in &from_f {
            for beta in &from_g {
                cones += 1;
                let (ca, cb) = (ctx.components(alpha), ctx.components(beta));
                let n = out
                    .iter()
                    .filter(|gam| after(ctx, gam, &co.i1) == Some(ca.clone()) && after(ctx, gam, &co.i2) == Some(cb.clone()))
                    .count();
                if n != 1 {
                    return Err(format!("a cocone factors {n} times through the coproduct"));
                }
                let cp = copairing(ctx, co, alpha, beta);
                if !check_two_cell(&cp).passed() {
                    return Err("copairing is not a morphism".into());
                }
            }
        }
        // stability: h splits along any χ : h ⇒ f + g
        for chi in ctx.set_morphisms(h, &co.obj, cap) {
            cones += 1;
            let (Ok(l), Ok(r)) = (pullback_cells(ctx, &co.i1, &chi), pullback_cells(ctx, &co.i2, &chi)) else {
                return Err("pullback of an injection exceeds the bound".into());
            };
            let split = coproduct(ctx, &l.obj, &r.obj).map_err(|e| e.to_string())?;
            let back = copairing(ctx, &split, &l.p2, &r.p2);
            if !is_iso_cell(ctx, &back) {
                return Err("coproduct is not stable under pullback".into());
            }
        }
    }
    Ok(cones)
}

#[derive(Clone, Debug)]
pub struct Image {
    pub obj: SetValuedMap,
    pub epi: TwoCell,
    pub mono: TwoCell,
    pub structures: usize,
}

/// `φ_b[f(b)] ⊆ g(b)` with the action of `g`.
pub fn image(ctx: &Groth, phi: &TwoCell) -> Result<Image, GrothError> {
    let (f, g) = (source_of(phi), target_of(phi));
    let c = ctx.components(phi);
    let values: Vec<Subset> = c.iter().map(|m| Subset::from_indices(m.values().copied())).collect();
    let obj = ctx.from_action(&values, |r| {
        let act = g.action(r);
        Some(values[r.src()].iter().map(|w| (w, act[&w])).collect())
    })?;
    let epi: Vec<FinMap> = c.clone();
    let mono: Vec<FinMap> = values.iter().map(|s| s.iter().map(|w| (w, w)).collect()).collect();
    let structures = structure_count(
        ctx,
        &values,
        &[
            Leg::Into {
                from: &f,
                components: epi.clone(),
            },
            Leg::OutOf {
                to: &g,
                components: mono.clone(),
            },
        ],
    );
    Ok(Image {
        epi: ctx.morphism(&f, &obj, &epi),
        mono: ctx.morphism(&obj, &g, &mono),
        obj,
        structures,
    })
}

pub fn check_image(ctx: &Groth, im: &Image, phi: &TwoCell) -> Result<usize, String> {
    if im.structures != 1 {
        return Err(format!("image values carry {} structures", im.structures));
    }
    let (e, m) = (ctx.components(&im.epi), ctx.components(&im.mono));
    for p in 0..e.len() {
        let onto: BTreeSet<usize> = e[p].values().copied().collect();
        if onto != im.obj.value(p).iter().collect() {
            return Err("image epi is not pointwise surjective".into());
        }
        let injective: BTreeSet<usize> = m[p].values().copied().collect();
        if injective.len() != m[p].len() {
            return Err("image mono is not pointwise injective".into());
        }
    }
    if after(ctx, &im.mono, &im.epi) != Some(ctx.components(phi)) {
        return Err("mono ∘ epi ≠ φ".into());
    }
    Ok(1)
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub obj: SetValuedMap,
    pub map: TwoCell,
    pub structures: usize,
}

/// Pointwise quotient of `f` by `rel`, each class named by its least element.
pub fn quotient(ctx: &Groth, f: &SetValuedMap, rel: &[BTreeSet<(usize, usize)>]) -> Result<Quotient, GrothError> {
    let n = ctx.base.points().len();
    let pts = ctx.base.points();
    if rel.len() != n {
        return Err(GrothError::Mismatch("relation has the wrong number of points".into()));
    }
    for p in 0..n {
        let dom: Vec<usize> = f.value(p).iter().collect();
        let r = &rel[p];
        let inside = r.iter().all(|(v, w)| f.value(p).contains(*v) && f.value(p).contains(*w));
        let refl = dom.iter().all(|&v| r.contains(&(v, v)));
        let sym = r.iter().all(|&(v, w)| r.contains(&(w, v)));
        let trans = r.iter().all(|&(u, v)| r.iter().filter(|(x, _)| *x == v).all(|&(_, w)| r.contains(&(u, w))));
        if !(inside && refl && sym && trans) {
            return Err(GrothError::NotAnEquivalence {
                point: pts.label(p).to_string(),
            });
        }
    }
    for r in ctx.base.arrows() {
        let act = f.action(&r);
        if !rel[r.src()].iter().all(|(v, w)| rel[r.dst()].contains(&(act[v], act[w]))) {
            return Err(GrothError::NotACongruence(r.display(pts)));
        }
    }
    let rep = |p: usize, v: usize| rel[p].iter().filter(|(_, w)| *w == v).map(|(u, _)| *u).min().unwrap_or(v);
    let values: Vec<Subset> = (0..n).map(|p| Subset::from_indices(f.value(p).iter().map(|v| rep(p, v)))).collect();
    let obj = ctx.from_action(&values, |r| {
        let act = f.action(r);
        Some(values[r.src()].iter().map(|v| (v, rep(r.dst(), act[&v]))).collect())
    })?;
    let comps: Vec<FinMap> = (0..n).map(|p| f.value(p).iter().map(|v| (v, rep(p, v))).collect()).collect();
    let structures = structure_count(
        ctx,
        &values,
        &[Leg::Into {
            from: f,
            components: comps.clone(),
        }],
    );
    Ok(Quotient {
        map: ctx.morphism(f, &obj, &comps),
        obj,
        structures,
    })
}

/// `{(v, w) : q(v) = q(w)}`, per point. As a relation it is not subject to the bound.
pub fn kernel_pair(ctx: &Groth, q: &TwoCell) -> Result<Vec<BTreeSet<(usize, usize)>>, GrothError> {
    if !check_two_cell(q).passed() {
        return Err(GrothError::Mismatch("kernel pair of a non-morphism".into()));
    }
    Ok(ctx
        .components(q)
        .iter()
        .map(|c| c.iter().flat_map(|(v, x)| c.iter().filter(move |(_, y)| x == *y).map(move |(w, _)| (*v, *w))).collect())
        .collect())
}

/// Effectivity and the universal property of the quotient.
pub fn check_quotient(
    ctx: &Groth,
    quo: &Quotient,
    f: &SetValuedMap,
    rel: &[BTreeSet<(usize, usize)>],
    tests: &[SetValuedMap],
    cap: usize,
) -> Result<usize, String> {
    if quo.structures != 1 {
        return Err(format!("quotient values carry {} structures", quo.structures));
    }
    let kp = kernel_pair(ctx, &quo.map).map_err(|e| e.to_string())?;
    if kp != rel {
        return Err("kernel pair of the quotient map differs from the relation".into());
    }
    let mut cones = 0;
    for h in tests {
        let out = ctx.set_morphisms(&quo.obj, h, usize::MAX);
        for chi in ctx.set_morphisms(f, h, cap) {
            let c = ctx.components(&chi);
            if !rel.iter().enumerate().all(|(p, r)| r.iter().all(|(v, w)| c[p][v] == c[p][w])) {
                continue;
            }
            cones += 1;
            let n = out.iter().filter(|d| after(ctx, d, &quo.map) == Some(c.clone())).count();
            if n != 1 {
                return Err(format!("a coequalizing morphism factors {n} times through the quotient"));
            }
        }
    }
    Ok(cones)
}
