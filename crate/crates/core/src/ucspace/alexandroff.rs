//! The Alexandroff space of a category and the specialization category of a space.

use std::collections::{BTreeMap, BTreeSet};

use super::category::{CatArrow, CategoryError, FinCategory};
use super::{label, Arrow, HomKey, Index, Label, Target, UCSpace, UltraSpace, Universe};
use crate::ufcore::FinSet;
use crate::ultrafam::{ultraproduct, CarrierFamily};

/// `Alex(C)`, computed on demand: `Hom_ult(x, (y_i)_{i→μ}) = ∏_{i→μ} C(x, y_i)`.
#[derive(Clone, Debug)]
pub struct AlexSpace {
    name: String,
    cat: FinCategory,
    universe: Universe,
}

impl AlexSpace {
    pub fn new(cat: &FinCategory, universe: &Universe) -> AlexSpace {
        AlexSpace {
            name: format!("Alex({})", cat.name()),
            cat: cat.clone(),
            universe: universe.clone(),
        }
    }

    pub fn category(&self) -> &FinCategory {
        &self.cat
    }

    fn arrow_named(&self, l: &str, src: usize, dst: usize) -> Option<usize> {
        self.cat.find(l).filter(|&a| {
            let a = self.cat.arrow(a);
            a.src == src && a.dst == dst
        })
    }
}

impl UltraSpace for AlexSpace {
    fn name(&self) -> &str {
        &self.name
    }

    fn points(&self) -> &FinSet {
        self.cat.objects()
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn hom(&self, key: &HomKey) -> Vec<Label> {
        let index = key.index();
        let names = self.cat.hom(key.src, key.dst()).into_iter().map(|a| self.cat.arrow(a).name.clone());
        let homset = FinSet::new(format!("C({},{})", key.src, key.dst()), names).expect("arrow names are distinct");
        // the target family is the constant extension of its value at the point
        let family = CarrierFamily::constant("C", &index.carrier(), &homset);
        let (product, _) = ultraproduct(&index.ultrafilter(), &family);
        product.elements().iter().map(label).collect()
    }

    fn ident(&self, x: usize) -> Option<Label> {
        Some(label(&self.cat.arrow(self.cat.id(x)).name))
    }

    fn reindex(&self, r: &Arrow, _kappa: Index) -> Option<Label> {
        self.arrow_named(&r.label, r.src(), r.dst()).map(|_| r.label.clone())
    }

    fn compose(&self, s: &Arrow, r: &Arrow) -> Option<Label> {
        let f = self.arrow_named(&r.label, r.src(), r.dst())?;
        let g = self.arrow_named(&s.label, s.src(), s.dst())?;
        self.cat.compose(g, f).map(|h| label(&self.cat.arrow(h).name))
    }
}

/// `Alex(C)` as an explicit table over the given universe.
pub fn alexandroff(cat: &FinCategory, universe: &Universe) -> UCSpace {
    UCSpace::materialize(&AlexSpace::new(cat, universe))
}

/// `Sp(X)`: objects are points, arrows are the ultra-arrows `x ⇝ lim_{*→1} y`.
///
/// Arrow names are the labels; when a label occurs in more than one hom set,
/// every name is qualified as `label[x,y]`.
pub fn specialization(space: &dyn UltraSpace) -> Result<FinCategory, CategoryError> {
    specialization_with_arrows(space).map(|(c, _)| c)
}

/// [`specialization`] together with the ultra-arrow behind each category arrow.
pub fn specialization_with_arrows(space: &dyn UltraSpace) -> Result<(FinCategory, Vec<Arrow>), CategoryError> {
    let pts = space.points();
    let n = pts.len();
    let mut arrows: Vec<Arrow> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let key = HomKey {
                src: x,
                target: Target::one(y),
            };
            arrows.extend(space.hom(&key).into_iter().map(|l| Arrow::new(key, l)));
        }
    }
    let mut seen = BTreeSet::new();
    let clash = arrows.iter().any(|a| !seen.insert(a.label.clone()));
    let cat_arrows: Vec<CatArrow> = arrows
        .iter()
        .map(|a| CatArrow {
            name: if clash {
                format!("{}[{},{}]", a.label, pts.label(a.src()), pts.label(a.dst()))
            } else {
                a.label.to_string()
            },
            src: a.src(),
            dst: a.dst(),
        })
        .collect();
    let position: BTreeMap<&Arrow, usize> = arrows.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let ids = (0..n)
        .map(|x| {
            space
                .identity_arrow(x)
                .and_then(|a| position.get(&a).copied())
                .ok_or_else(|| CategoryError::Identity(pts.label(x).to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut comp = BTreeMap::new();
    for (fi, f) in arrows.iter().enumerate() {
        for (gi, g) in arrows.iter().enumerate() {
            if g.src() != f.dst() {
                continue;
            }
            if let Some(h) = space.compose_arrow(g, f).and_then(|h| position.get(&h).copied()) {
                comp.insert((gi, fi), h);
            }
        }
    }
    let cat = FinCategory::from_parts(format!("Sp({})", space.name()), pts.clone(), cat_arrows, ids, comp)?;
    Ok((cat, arrows))
}
