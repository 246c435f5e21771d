//! Exhaustive checker for the ultraconvergence space axioms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Arrow, HomKey, Index, Label, Target, UltraSpace};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// Every structure map is defined and lands in the right hom set.
    Typing,
    Functoriality,
    LeftNaturality,
    RightNaturality,
    RightIdentity,
    LeftIdentity,
    Associativity,
    /// Reindexing along `({*}, 1) ≅ (I, [i0])` is a bijection of hom sets.
    PrincipalCollapse,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Typing => "typing",
            Axiom::Functoriality => "functoriality",
            Axiom::LeftNaturality => "left-naturality",
            Axiom::RightNaturality => "right-naturality",
            Axiom::RightIdentity => "right-identity",
            Axiom::LeftIdentity => "left-identity",
            Axiom::Associativity => "associativity",
            Axiom::PrincipalCollapse => "principal-collapse",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single table entry consulted while checking an axiom instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableEntry {
    Hom(HomKey),
    Ident(usize),
    Reindex(Arrow, Index),
    Comp(Arrow, Arrow),
}

impl TableEntry {
    pub fn display(&self, space: &dyn UltraSpace) -> String {
        let pts = space.points();
        match self {
            TableEntry::Hom(k) => format!(
                "hom({} ⇝ {}@{})",
                pts.label(k.src),
                pts.label(k.dst()),
                k.index()
            ),
            TableEntry::Ident(x) => format!("id({})", pts.label(*x)),
            TableEntry::Reindex(r, k) => format!("reindex({}, {})", r.display(pts), k),
            TableEntry::Comp(s, r) => format!("comp({}, {})", s.display(pts), r.display(pts)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub message: String,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
    pub instances: BTreeMap<Axiom, usize>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    /// Whether some violation cites the given entry.
    pub fn cites(&self, entry: &TableEntry) -> bool {
        self.violations.iter().any(|v| v.entries.contains(entry))
    }

    pub fn axioms_violated(&self) -> BTreeSet<Axiom> {
        self.violations.iter().map(|v| v.axiom).collect()
    }

    fn count(&mut self, axiom: Axiom) {
        *self.instances.entry(axiom).or_default() += 1;
    }

    fn fail(&mut self, axiom: Axiom, message: String, entries: Vec<TableEntry>) {
        self.violations.push(Violation {
            axiom,
            message,
            entries,
        });
    }
}

struct Checker<'a> {
    space: &'a dyn UltraSpace,
    report: AxiomReport,
    homs: BTreeMap<HomKey, Vec<Label>>,
}

impl<'a> Checker<'a> {
    fn hom(&self, key: &HomKey) -> &[Label] {
        self.homs.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    fn has(&self, key: &HomKey, l: &Label) -> bool {
        self.hom(key).contains(l)
    }

    fn show(&self, a: &Arrow) -> String {
        a.display(self.space.points())
    }

    /// `r[κ]` if defined and well typed.
    fn reindex(&self, r: &Arrow, kappa: Index) -> Option<Arrow> {
        let a = self.space.reindex_arrow(r, kappa)?;
        self.has(&a.key, &a.label).then_some(a)
    }

    fn compose(&self, s: &Arrow, r: &Arrow) -> Option<Arrow> {
        let a = self.space.compose_arrow(s, r)?;
        self.has(&a.key, &a.label).then_some(a)
    }

    fn ident(&self, x: usize) -> Option<Arrow> {
        let a = self.space.identity_arrow(x)?;
        self.has(&a.key, &a.label).then_some(a)
    }
}

/// Quantify every axiom over all table entries and all index objects of the
/// space's universe. Instances whose tensors leave the universe are skipped.
pub fn check_axioms(space: &dyn UltraSpace) -> AxiomReport {
    let universe = space.universe().clone();
    let n = space.points().len();
    let mut c = Checker {
        space,
        report: AxiomReport::default(),
        homs: space
            .hom_keys()
            .into_iter()
            .map(|k| (k, space.hom(&k)))
            .filter(|(_, v)| !v.is_empty())
            .collect(),
    };
    let arrows: Vec<Arrow> = c
        .homs
        .iter()
        .flat_map(|(k, v)| v.iter().map(move |l| Arrow::new(*k, l.clone())))
        .collect();
    let mut from: Vec<Vec<Arrow>> = vec![Vec::new(); n];
    for a in &arrows {
        from[a.src()].push(a.clone());
    }

    // typing
    for (k, v) in &c.homs {
        let distinct: BTreeSet<&Label> = v.iter().collect();
        c.report.count(Axiom::Typing);
        if distinct.len() != v.len() {
            c.report.fail(Axiom::Typing, "duplicate label in hom set".into(), vec![TableEntry::Hom(*k)]);
        }
    }
    for x in 0..n {
        c.report.count(Axiom::Typing);
        let key = HomKey::new(x, Index::ONE, x);
        match space.ident(x) {
            None => c.report.fail(
                Axiom::Typing,
                format!("no identity at {}", space.points().label(x)),
                vec![TableEntry::Ident(x)],
            ),
            Some(l) if !c.has(&key, &l) => c.report.fail(
                Axiom::Typing,
                format!("identity `{l}` at {} is not an ultra-arrow x ⇝ x", space.points().label(x)),
                vec![TableEntry::Ident(x), TableEntry::Hom(key)],
            ),
            Some(_) => {}
        }
    }
    for r in &arrows {
        for &kappa in universe.indices() {
            c.report.count(Axiom::Typing);
            let entry = TableEntry::Reindex(r.clone(), kappa);
            match space.reindex_arrow(r, kappa) {
                None => c
                    .report
                    .fail(Axiom::Typing, format!("reindex of {} along {kappa} undefined", c.show(r)), vec![entry]),
                Some(a) if !c.has(&a.key, &a.label) => {
                    let msg = format!("reindex of {} along {kappa} gives foreign label `{}`", c.show(r), a.label);
                    c.report.fail(Axiom::Typing, msg, vec![entry, TableEntry::Hom(a.key)])
                }
                Some(_) => {}
            }
        }
        for s in &from[r.dst()] {
            if !universe.contains(r.index().tensor(s.index())) {
                continue;
            }
            c.report.count(Axiom::Typing);
            let entry = TableEntry::Comp(s.clone(), r.clone());
            match space.compose_arrow(s, r) {
                None => c.report.fail(
                    Axiom::Typing,
                    format!("composite of {} after {} undefined", c.show(s), c.show(r)),
                    vec![entry],
                ),
                Some(a) if !c.has(&a.key, &a.label) => {
                    let msg = format!(
                        "composite of {} after {} gives foreign label `{}`",
                        c.show(s),
                        c.show(r),
                        a.label
                    );
                    c.report.fail(Axiom::Typing, msg, vec![entry, TableEntry::Hom(a.key)])
                }
                Some(_) => {}
            }
        }
    }

    // (1) functoriality
    for r in &arrows {
        c.report.count(Axiom::Functoriality);
        if let Some(a) = c.reindex(r, r.index()) {
            if a.label != r.label {
                let msg = format!("{}[id] = `{}`", c.show(r), a.label);
                c.report
                    .fail(Axiom::Functoriality, msg, vec![TableEntry::Reindex(r.clone(), r.index())]);
            }
        }
        for &kappa in universe.indices() {
            let Some(rk) = c.reindex(r, kappa) else { continue };
            for &lambda in universe.indices() {
                c.report.count(Axiom::Functoriality);
                let (Some(rkl), Some(rl)) = (c.reindex(&rk, lambda), c.reindex(r, lambda)) else {
                    continue;
                };
                if rkl.label != rl.label {
                    let msg = format!(
                        "{}[{kappa}][{lambda}] = `{}` but {}[{lambda}] = `{}`",
                        c.show(r),
                        rkl.label,
                        c.show(r),
                        rl.label
                    );
                    c.report.fail(
                        Axiom::Functoriality,
                        msg,
                        vec![
                            TableEntry::Reindex(r.clone(), kappa),
                            TableEntry::Reindex(rk.clone(), lambda),
                            TableEntry::Reindex(r.clone(), lambda),
                        ],
                    );
                }
            }
        }
    }

    for r in &arrows {
        let mu = r.index();
        for s in &from[r.dst()] {
            let nu = s.index();
            if !universe.contains(mu.tensor(nu)) {
                continue;
            }
            let Some(sr) = c.compose(s, r) else { continue };

            // (2) left-naturality: s · r[κ] = (s · r)[κ ⊗ ν]
            for &kappa in universe.indices() {
                let kn = kappa.tensor(nu);
                if !universe.contains(kn) {
                    continue;
                }
                c.report.count(Axiom::LeftNaturality);
                let Some(rk) = c.reindex(r, kappa) else { continue };
                let (Some(lhs), Some(rhs)) = (c.compose(s, &rk), c.reindex(&sr, kn)) else {
                    continue;
                };
                if lhs.label != rhs.label {
                    let msg = format!(
                        "{} · {}[{kappa}] = `{}` but ({} · {})[{kn}] = `{}`",
                        c.show(s),
                        c.show(r),
                        lhs.label,
                        c.show(s),
                        c.show(r),
                        rhs.label
                    );
                    c.report.fail(
                        Axiom::LeftNaturality,
                        msg,
                        vec![
                            TableEntry::Reindex(r.clone(), kappa),
                            TableEntry::Comp(s.clone(), rk),
                            TableEntry::Comp(s.clone(), r.clone()),
                            TableEntry::Reindex(sr.clone(), kn),
                        ],
                    );
                }
            }

            // (3) right-naturality: s[κ] · r = (s · r)[μ ⊗ κ]
            for &kappa in universe.indices() {
                let mk = mu.tensor(kappa);
                if !universe.contains(mk) {
                    continue;
                }
                c.report.count(Axiom::RightNaturality);
                let Some(sk) = c.reindex(s, kappa) else { continue };
                let (Some(lhs), Some(rhs)) = (c.compose(&sk, r), c.reindex(&sr, mk)) else {
                    continue;
                };
                if lhs.label != rhs.label {
                    let msg = format!(
                        "{}[{kappa}] · {} = `{}` but ({} · {})[{mk}] = `{}`",
                        c.show(s),
                        c.show(r),
                        lhs.label,
                        c.show(s),
                        c.show(r),
                        rhs.label
                    );
                    c.report.fail(
                        Axiom::RightNaturality,
                        msg,
                        vec![
                            TableEntry::Reindex(s.clone(), kappa),
                            TableEntry::Comp(sk, r.clone()),
                            TableEntry::Comp(s.clone(), r.clone()),
                            TableEntry::Reindex(sr.clone(), mk),
                        ],
                    );
                }
            }

            // (6) associativity
            for t in &from[s.dst()] {
                let xi = t.index();
                if !universe.contains(nu.tensor(xi)) || !universe.contains(mu.tensor(nu).tensor(xi)) {
                    continue;
                }
                c.report.count(Axiom::Associativity);
                let Some(ts) = c.compose(t, s) else { continue };
                let (Some(lhs), Some(rhs)) = (c.compose(t, &sr), c.compose(&ts, r)) else {
                    continue;
                };
                if lhs.label != rhs.label {
                    let msg = format!(
                        "{} · ({} · {}) = `{}` but ({} · {}) · {} = `{}`",
                        c.show(t),
                        c.show(s),
                        c.show(r),
                        lhs.label,
                        c.show(t),
                        c.show(s),
                        c.show(r),
                        rhs.label
                    );
                    c.report.fail(
                        Axiom::Associativity,
                        msg,
                        vec![
                            TableEntry::Comp(s.clone(), r.clone()),
                            TableEntry::Comp(t.clone(), sr.clone()),
                            TableEntry::Comp(t.clone(), s.clone()),
                            TableEntry::Comp(ts, r.clone()),
                        ],
                    );
                }
            }
        }

        // (4) right identity: r · id_x = r
        c.report.count(Axiom::RightIdentity);
        if let Some(id) = c.ident(r.src()) {
            if let Some(a) = c.compose(r, &id) {
                if a.label != r.label {
                    let msg = format!("{} · id = `{}`", c.show(r), a.label);
                    c.report.fail(
                        Axiom::RightIdentity,
                        msg,
                        vec![TableEntry::Ident(r.src()), TableEntry::Comp(r.clone(), id)],
                    );
                }
            }
        }
        // (5) left identity: id_y · r = r
        c.report.count(Axiom::LeftIdentity);
        if let Some(id) = c.ident(r.dst()) {
            if let Some(a) = c.compose(&id, r) {
                if a.label != r.label {
                    let msg = format!("id · {} = `{}`", c.show(r), a.label);
                    c.report.fail(
                        Axiom::LeftIdentity,
                        msg,
                        vec![TableEntry::Ident(r.dst()), TableEntry::Comp(id, r.clone())],
                    );
                }
            }
        }
    }
    c.report
}

/// For every hom set over `(I, [i0])`, reindexing along the canonical iso
/// `({*}, 1) ≅ (I, [i0])` must be a bijection onto the 1-indexed hom set.
pub fn check_principal_collapse(space: &dyn UltraSpace) -> AxiomReport {
    let mut report = AxiomReport::default();
    for key in space.hom_keys() {
        report.count(Axiom::PrincipalCollapse);
        let one_key = HomKey {
            src: key.src,
            target: Target::one(key.dst()),
        };
        let source = space.hom(&key);
        let target = space.hom(&one_key);
        let images: Vec<Option<Label>> = source
            .iter()
            .map(|l| space.reindex(&Arrow::new(key, l.clone()), Index::ONE))
            .collect();
        let mut hit = BTreeSet::new();
        let mut ok = images.len() == target.len();
        for img in &images {
            match img {
                Some(l) if target.contains(l) && hit.insert(l.clone()) => {}
                _ => ok = false,
            }
        }
        if !ok {
            report.fail(
                Axiom::PrincipalCollapse,
                format!(
                    "reindexing {} arrows at {} to index 1:0 is not a bijection onto {} arrows",
                    source.len(),
                    key.index(),
                    target.len()
                ),
                vec![TableEntry::Hom(key), TableEntry::Hom(one_key)],
            );
        }
    }
    report
}
