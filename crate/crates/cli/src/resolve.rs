//! Turn a parsed document into checked objects, keyed by name.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use ultraconv::etale::{etale_from_lifts, EtaleMap, LiftChoice};
use ultraconv::groth::{parse_fn, quotient, FinMap, Groth, SetValuedMap};
use ultraconv::ucmaps::{check_continuous, check_two_cell, continuity_structures, ContinuousMap, SpaceRef, TwoCell};
use ultraconv::ucspace::{
    alexandroff, check_axioms, label, topology_encode, Arrow, FinCategory, FinTopSpace, HomKey, Index, UCSpace,
    UltraSpace, Universe,
};
use ultraconv::ufcore::{FinSet, Subset};

use crate::doc::{Document, SpaceDecl};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("unknown {kind} `{name}`")]
    Missing { kind: &'static str, name: String },
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("`{name}`: {message}")]
    Malformed { name: String, message: String },
    #[error("space `{0}` is marked invalid and can only be checked")]
    InvalidSpace(String),
}

/// A declaration that resolves but breaks a law.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{name}` fails {law}: {message}{}", if entries.is_empty() { String::new() } else { format!(" [{}]", entries.join("; ")) })]
pub struct ValidationError {
    pub name: String,
    pub law: String,
    pub message: String,
    pub entries: Vec<String>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] crate::doc::ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

fn malformed(name: &str, message: impl Into<String>) -> ResolveError {
    ResolveError::Malformed {
        name: name.to_string(),
        message: message.into(),
    }
}

/// Settings that may come from the document or the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub universe: Option<Universe>,
    pub bound: Option<usize>,
}

pub const DEFAULT_BOUND: usize = 2;

/// Pairs related at each base point.
pub type Relation = Vec<BTreeSet<(usize, usize)>>;

#[derive(Clone, Debug)]
pub struct Workspace {
    pub universe: Universe,
    pub bound: usize,
    pub categories: BTreeMap<String, FinCategory>,
    pub topologies: BTreeMap<String, FinTopSpace>,
    spaces: BTreeMap<String, SpaceRef>,
    invalid: BTreeSet<String>,
    pub maps: BTreeMap<String, ContinuousMap>,
    pub etales: BTreeMap<String, EtaleMap>,
    /// Set-valued maps with the name of their base.
    pub setmaps: BTreeMap<String, (String, SetValuedMap)>,
    groth: BTreeMap<String, Groth>,
    /// Morphisms with the name of their base.
    pub morphisms: BTreeMap<String, (String, TwoCell)>,
    /// Relations with the set-valued map they live on.
    pub relations: BTreeMap<String, (String, Relation)>,
}

fn lookup<'a, T>(m: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T, ResolveError> {
    m.get(name).ok_or_else(|| ResolveError::Missing {
        kind,
        name: name.to_string(),
    })
}

/// `label: src -> dst [@ n:p]` against the points of `space`.
pub fn parse_arrow(space: &dyn UltraSpace, text: &str) -> Result<Arrow, String> {
    let (body, index) = match text.rsplit_once('@') {
        Some((b, i)) => (b, i.trim().parse::<Index>().map_err(|e| e.to_string())?),
        None => (text, Index::ONE),
    };
    let (head, dst) = body.split_once("->").ok_or_else(|| format!("`{text}` is not `label: src -> dst`"))?;
    let (l, src) = head.rsplit_once(':').ok_or_else(|| format!("`{text}` is not `label: src -> dst`"))?;
    let pts = space.points();
    let point = |p: &str| pts.position(p.trim()).ok_or_else(|| format!("no point `{}` in {}", p.trim(), space.name()));
    Ok(Arrow::new(HomKey::new(point(src)?, index, point(dst)?), label(l.trim())))
}

/// Comma-separated point labels; `{}` or the empty string is the empty set.
pub fn parse_subset(space: &dyn UltraSpace, text: &str) -> Result<Subset, String> {
    let body = text.trim().trim_start_matches('{').trim_end_matches('}');
    let pts = space.points();
    let mut s = Subset(0);
    for p in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        s = s.with(pts.position(p).ok_or_else(|| format!("no point `{p}` in {}", space.name()))?);
    }
    Ok(s)
}

impl Workspace {
    pub fn resolve(doc: &Document, over: &Overrides) -> Result<Workspace, LoadError> {
        let universe = match (&over.universe, &doc.universe) {
            (Some(u), _) => u.clone(),
            (None, Some(s)) => s.parse().map_err(|e: ultraconv::ucspace::UniverseError| malformed("universe", e.to_string()))?,
            (None, None) => Universe::default(),
        };
        let mut ws = Workspace {
            universe,
            bound: over.bound.or(doc.bound).unwrap_or(DEFAULT_BOUND),
            categories: BTreeMap::new(),
            topologies: BTreeMap::new(),
            spaces: BTreeMap::new(),
            invalid: BTreeSet::new(),
            maps: BTreeMap::new(),
            etales: BTreeMap::new(),
            setmaps: BTreeMap::new(),
            groth: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            relations: BTreeMap::new(),
        };
        let mut seen = BTreeSet::new();
        let names = doc
            .category
            .iter()
            .map(|d| &d.name)
            .chain(doc.topology.iter().map(|d| &d.name))
            .chain(doc.space.iter().map(|d| &d.name))
            .chain(doc.map.iter().map(|d| &d.name))
            .chain(doc.etale.iter().map(|d| &d.name))
            .chain(doc.setmap.iter().map(|d| &d.name))
            .chain(doc.morphism.iter().map(|d| &d.name))
            .chain(doc.relation.iter().map(|d| &d.name));
        for n in names {
            if !seen.insert(n.clone()) {
                return Err(ResolveError::Duplicate(n.clone()).into());
            }
        }

        for d in &doc.category {
            let objects = FinSet::new(d.name.clone(), d.objects.iter().cloned()).map_err(|e| malformed(&d.name, e.to_string()))?;
            let arrows: Vec<(&str, &str, &str)> = d.arrows.iter().map(|[a, b, c]| (a.as_str(), b.as_str(), c.as_str())).collect();
            let comps: Vec<(&str, &str, &str)> = d.compose.iter().map(|[a, b, c]| (a.as_str(), b.as_str(), c.as_str())).collect();
            let cat = FinCategory::new(d.name.clone(), objects, &arrows, &comps).map_err(|e| ValidationError {
                name: d.name.clone(),
                law: "category laws".into(),
                message: e.to_string(),
                entries: vec![],
            })?;
            ws.categories.insert(d.name.clone(), cat);
        }
        for d in &doc.topology {
            let points = FinSet::new(d.name.clone(), d.points.iter().cloned()).map_err(|e| malformed(&d.name, e.to_string()))?;
            let mut opens = Vec::new();
            for o in &d.opens {
                let mut s = Subset(0);
                for p in o {
                    s = s.with(points.position(p).ok_or_else(|| malformed(&d.name, format!("no point `{p}`")))?);
                }
                opens.push(s);
            }
            let t = FinTopSpace::new(points, opens).map_err(|e| ValidationError {
                name: d.name.clone(),
                law: "topology".into(),
                message: e.to_string(),
                entries: vec![],
            })?;
            ws.topologies.insert(d.name.clone(), t);
        }
        for d in &doc.space {
            ws.add_space(d)?;
        }
        for d in &doc.map {
            let (src, dst) = (ws.space(&d.src)?.clone(), ws.space(&d.dst)?.clone());
            let mut points = Vec::new();
            for p in src.points().elements() {
                let q = d.points.get(p).ok_or_else(|| malformed(&d.name, format!("no image for point `{p}`")))?;
                points.push(dst.points().position(q).ok_or_else(|| malformed(&d.name, format!("no point `{q}` in {}", d.dst)))?);
            }
            let map = if d.arrows.is_empty() {
                let found = continuity_structures(&src, &dst, &points, 2);
                match found.len() {
                    0 => {
                        return Err(ValidationError {
                            name: d.name.clone(),
                            law: "continuity".into(),
                            message: "no continuous map has this point map".into(),
                            entries: vec![],
                        }
                        .into())
                    }
                    1 => found.into_iter().next().expect("one"),
                    _ => return Err(malformed(&d.name, "several continuity structures; list the arrows").into()),
                }
            } else {
                let mut arrows = BTreeMap::new();
                for [a, l] in &d.arrows {
                    arrows.insert(parse_arrow(&*src, a).map_err(|m| malformed(&d.name, m))?, label(l));
                }
                let m = ContinuousMap::new(src, dst, points, arrows).map_err(|e| malformed(&d.name, e.to_string()))?;
                let rep = check_continuous(&m);
                if let Some(v) = rep.violations.first() {
                    return Err(ValidationError {
                        name: d.name.clone(),
                        law: v.law.to_string(),
                        message: v.message.clone(),
                        entries: vec![],
                    }
                    .into());
                }
                m
            };
            ws.maps.insert(d.name.clone(), map);
        }
        for d in &doc.etale {
            let e = match (&d.map, &d.base) {
                (Some(m), None) => {
                    let map = lookup(&ws.maps, "map", m)?.clone();
                    EtaleMap::new(map).map_err(|e| ValidationError {
                        name: d.name.clone(),
                        law: "étaleness".into(),
                        message: e.to_string(),
                        entries: vec![],
                    })?
                }
                (None, Some(b)) => {
                    let base = ws.space(b)?.clone();
                    let mut sizes = Vec::new();
                    for p in base.points().elements() {
                        sizes.push(*d.fibres.get(p).ok_or_else(|| malformed(&d.name, format!("no fibre size for `{p}`")))?);
                    }
                    let mut actions = BTreeMap::new();
                    for l in &d.lifts {
                        let a = parse_arrow(&*base, &l.arrow).map_err(|m| malformed(&d.name, m))?;
                        actions.insert(a, l.to.clone());
                    }
                    for x in 0..sizes.len() {
                        if let Some(id) = base.identity_arrow(x) {
                            actions.entry(id).or_insert_with(|| (0..sizes[x]).collect());
                        }
                    }
                    etale_from_lifts(&base, &LiftChoice { sizes, actions }).ok_or_else(|| ValidationError {
                        name: d.name.clone(),
                        law: "étaleness".into(),
                        message: "the lifts do not form an étale space".into(),
                        entries: vec![],
                    })?
                }
                _ => return Err(malformed(&d.name, "give exactly one of `map` or `base`").into()),
            };
            ws.etales.insert(d.name.clone(), e);
        }
        for d in &doc.setmap {
            let ctx = ws.groth(&d.base)?;
            let base = ctx.base.clone();
            let mut values = Vec::new();
            for p in base.points().elements() {
                let v = d.values.get(p).ok_or_else(|| malformed(&d.name, format!("no value at `{p}`")))?;
                values.push(Subset::from_indices(v.iter().copied()));
            }
            let mut actions: BTreeMap<Arrow, FinMap> = BTreeMap::new();
            for [a, f] in &d.actions {
                let arrow = parse_arrow(&*base, a).map_err(|m| malformed(&d.name, m))?;
                let f = parse_fn(f).ok_or_else(|| malformed(&d.name, format!("`{f}` is not a function `[a>b,…]`")))?;
                actions.insert(arrow, f);
            }
            let f = ctx
                .from_action(&values, |r| {
                    actions.get(r).cloned().or_else(|| {
                        (base.identity_arrow(r.src()).as_ref() == Some(r))
                            .then(|| values[r.src()].iter().map(|v| (v, v)).collect())
                    })
                })
                .map_err(|e| ValidationError {
                    name: d.name.clone(),
                    law: "continuity".into(),
                    message: e.to_string(),
                    entries: vec![],
                })?;
            ws.setmaps.insert(d.name.clone(), (d.base.clone(), f));
        }
        for d in &doc.morphism {
            let (bf, f) = lookup(&ws.setmaps, "set-valued map", &d.src)?.clone();
            let (bg, g) = lookup(&ws.setmaps, "set-valued map", &d.dst)?.clone();
            if bf != bg {
                return Err(malformed(&d.name, format!("`{}` and `{}` have different bases", d.src, d.dst)).into());
            }
            let ctx = ws.groth(&bf)?;
            let mut comps = Vec::new();
            for p in ctx.base.points().elements() {
                let c = d.components.get(p).ok_or_else(|| malformed(&d.name, format!("no component at `{p}`")))?;
                comps.push(parse_fn(c).ok_or_else(|| malformed(&d.name, format!("`{c}` is not a function `[a>b,…]`")))?);
            }
            let cell = ctx.morphism(&f, &g, &comps);
            if let Some(v) = check_two_cell(&cell).violations.first() {
                return Err(ValidationError {
                    name: d.name.clone(),
                    law: v.law.to_string(),
                    message: v.message.clone(),
                    entries: vec![],
                }
                .into());
            }
            ws.morphisms.insert(d.name.clone(), (bf, cell));
        }
        for d in &doc.relation {
            let (b, f) = lookup(&ws.setmaps, "set-valued map", &d.on)?.clone();
            let ctx = ws.groth(&b)?;
            let mut rel = Vec::new();
            for (p, name) in ctx.base.points().elements().iter().enumerate() {
                let mut r: BTreeSet<(usize, usize)> = f.value(p).iter().map(|v| (v, v)).collect();
                r.extend(d.pairs.get(name).into_iter().flatten().map(|&[a, b]| (a, b)));
                rel.push(r);
            }
            if let Some(bad) = d.pairs.keys().find(|k| ctx.base.points().position(k).is_none()) {
                return Err(malformed(&d.name, format!("no point `{bad}`")).into());
            }
            quotient(&ctx, &f, &rel).map_err(|e| ValidationError {
                name: d.name.clone(),
                law: "congruence".into(),
                message: e.to_string(),
                entries: vec![],
            })?;
            ws.relations.insert(d.name.clone(), (d.on.clone(), rel));
        }
        Ok(ws)
    }

    fn add_space(&mut self, d: &SpaceDecl) -> Result<(), LoadError> {
        let sources = [d.alexandroff.is_some(), d.encode.is_some(), d.from.is_some(), d.points.is_some()];
        if sources.iter().filter(|&&b| b).count() != 1 {
            return Err(malformed(&d.name, "give exactly one of `alexandroff`, `encode`, `from` or `points`").into());
        }
        let mut x = if let Some(c) = &d.alexandroff {
            alexandroff(lookup(&self.categories, "category", c)?, &self.universe)
        } else if let Some(t) = &d.encode {
            topology_encode(lookup(&self.topologies, "topology", t)?, &self.universe)
        } else if let Some(f) = &d.from {
            UCSpace::materialize(&**self.space_any(f)?)
        } else {
            let pts = d.points.clone().unwrap_or_default();
            let set = FinSet::new(d.name.clone(), pts).map_err(|e| malformed(&d.name, e.to_string()))?;
            UCSpace::empty_tables(d.name.clone(), set, self.universe.clone())
        };
        x.rename(d.name.clone());
        let arrow = |x: &UCSpace, s: &str| parse_arrow(x, s).map_err(|m| malformed(&d.name, m));
        let entry = |l: &str| (!l.is_empty()).then(|| label(l));
        for a in &d.hom {
            let a = arrow(&x, a)?;
            x.add_arrow(a.key, a.label);
        }
        for a in &d.remove {
            let a = arrow(&x, a)?;
            x.remove_arrow(&a.key, &a.label);
        }
        for (p, l) in &d.ident {
            let p = x.points().position(p).ok_or_else(|| malformed(&d.name, format!("no point `{p}`")))?;
            x.set_ident(p, entry(l));
        }
        for [a, k, l] in &d.reindex {
            let a = arrow(&x, a)?;
            let k: Index = k.parse().map_err(|e: ultraconv::ucspace::UniverseError| malformed(&d.name, e.to_string()))?;
            x.set_reindex(a, k, entry(l));
        }
        for [s, r, l] in &d.comp {
            let (s, r) = (arrow(&x, s)?, arrow(&x, r)?);
            x.set_comp(s, r, entry(l));
        }
        let rep = check_axioms(&x);
        let expect_invalid = match d.expect.as_deref() {
            None => false,
            Some("invalid") => true,
            Some(other) => return Err(malformed(&d.name, format!("unknown expectation `{other}`")).into()),
        };
        match (rep.violations.first(), expect_invalid) {
            (Some(v), false) => {
                return Err(ValidationError {
                    name: d.name.clone(),
                    law: v.axiom.to_string(),
                    message: v.message.clone(),
                    entries: v.entries.iter().map(|e| e.display(&x)).collect(),
                }
                .into())
            }
            (None, true) => {
                return Err(ValidationError {
                    name: d.name.clone(),
                    law: "expectation".into(),
                    message: "marked invalid but satisfies every axiom".into(),
                    entries: vec![],
                }
                .into())
            }
            (Some(_), true) => {
                self.invalid.insert(d.name.clone());
            }
            (None, false) => {}
        }
        self.spaces.insert(d.name.clone(), Arc::new(x));
        Ok(())
    }

    /// A lawful space.
    pub fn space(&self, name: &str) -> Result<&SpaceRef, ResolveError> {
        if self.invalid.contains(name) {
            return Err(ResolveError::InvalidSpace(name.to_string()));
        }
        lookup(&self.spaces, "space", name)
    }

    /// Any declared space, including those marked invalid.
    pub fn space_any(&self, name: &str) -> Result<&SpaceRef, ResolveError> {
        lookup(&self.spaces, "space", name)
    }

    pub fn is_marked_invalid(&self, name: &str) -> bool {
        self.invalid.contains(name)
    }

    /// The shared context for set-valued maps over a base.
    pub fn groth(&mut self, base: &str) -> Result<Groth, LoadError> {
        if let Some(g) = self.groth.get(base) {
            return Ok(g.clone());
        }
        let b = self.space(base)?.clone();
        let g = Groth::new(b, self.bound).map_err(|e| malformed(base, e.to_string()))?;
        self.groth.insert(base.to_string(), g.clone());
        Ok(g)
    }

    pub fn setmap(&self, name: &str) -> Result<&(String, SetValuedMap), ResolveError> {
        lookup(&self.setmaps, "set-valued map", name)
    }

    pub fn morphism(&self, name: &str) -> Result<&(String, TwoCell), ResolveError> {
        lookup(&self.morphisms, "morphism", name)
    }

    pub fn etale(&self, name: &str) -> Result<&EtaleMap, ResolveError> {
        lookup(&self.etales, "étale map", name)
    }

    pub fn map(&self, name: &str) -> Result<&ContinuousMap, ResolveError> {
        lookup(&self.maps, "map", name)
    }

    pub fn category(&self, name: &str) -> Result<&FinCategory, ResolveError> {
        lookup(&self.categories, "category", name)
    }

    pub fn topology(&self, name: &str) -> Result<&FinTopSpace, ResolveError> {
        lookup(&self.topologies, "topology", name)
    }

    pub fn relation(&self, name: &str) -> Result<&(String, Relation), ResolveError> {
        lookup(&self.relations, "relation", name)
    }

    /// Number of resolved declarations.
    pub fn len(&self) -> usize {
        self.categories.len()
            + self.topologies.len()
            + self.spaces.len()
            + self.maps.len()
            + self.etales.len()
            + self.setmaps.len()
            + self.morphisms.len()
            + self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(src: &str) -> Result<Workspace, LoadError> {
        Workspace::resolve(&Document::parse(src, "test").unwrap(), &Overrides::default())
    }

    const C2: &str = "[[category]]\nname = \"C2\"\nobjects = [\"u\", \"v\"]\narrows = [[\"f\", \"u\", \"v\"]]\n\n[[space]]\nname = \"S\"\nalexandroff = \"C2\"\n";

    #[test]
    fn arrows_and_subsets_parse_against_points() {
        let w = ws(C2).unwrap();
        let s = w.space("S").unwrap();
        let a = parse_arrow(&**s, "f: u -> v").unwrap();
        assert_eq!(a.display(s.points()), "f:u->v@1:0");
        assert_eq!(parse_arrow(&**s, &a.display(s.points())).unwrap(), a);
        assert_eq!(parse_arrow(&**s, "f: u -> v @ 2:1").unwrap().index(), Index { size: 2, point: 1 });
        assert!(parse_arrow(&**s, "f: u -> w").is_err());
        assert!(parse_arrow(&**s, "f u v").is_err());
        assert_eq!(parse_subset(&**s, "{u, v}").unwrap(), Subset(0b11));
        assert_eq!(parse_subset(&**s, "").unwrap(), Subset(0));
    }

    #[test]
    fn names_are_unique_across_kinds() {
        let src = format!("{C2}\n[[topology]]\nname = \"S\"\npoints = []\nopens = [[]]\n");
        assert!(matches!(ws(&src), Err(LoadError::Resolve(ResolveError::Duplicate(n))) if n == "S"));
    }

    #[test]
    fn one_source_per_space() {
        let src = format!("{C2}\n[[space]]\nname = \"X\"\nalexandroff = \"C2\"\nfrom = \"S\"\n");
        assert!(matches!(ws(&src), Err(LoadError::Resolve(ResolveError::Malformed { .. }))));
    }

    #[test]
    fn lawful_space_cannot_be_marked_invalid() {
        let src = format!("{C2}\n[[space]]\nname = \"X\"\nfrom = \"S\"\nexpect = \"invalid\"\n");
        match ws(&src) {
            Err(LoadError::Validation(v)) => assert_eq!(v.law, "expectation"),
            other => panic!("{:?}", other.map(|w| w.len())),
        }
    }

    #[test]
    fn unnatural_morphisms_are_rejected() {
        let src = format!(
            "{C2}\n[[setmap]]\nname = \"F\"\nbase = \"S\"\nvalues = {{ u = [0, 1], v = [0, 1] }}\nactions = [[\"f: u -> v\", \"[0>0,1>0]\"]]\n\n\
             [[morphism]]\nname = \"m\"\nsrc = \"F\"\ndst = \"F\"\ncomponents = {{ u = \"[0>0,1>1]\", v = \"[0>1,1>0]\" }}\n"
        );
        assert!(matches!(ws(&src), Err(LoadError::Validation(_))));
    }

    #[test]
    fn map_structure_is_derived_when_unique() {
        let src = format!("{C2}\n[[map]]\nname = \"c\"\nsrc = \"S\"\ndst = \"S\"\npoints = {{ u = \"v\", v = \"v\" }}\n");
        let w = ws(&src).unwrap();
        assert_eq!(w.map("c").unwrap().point(0), 1);
    }
}
