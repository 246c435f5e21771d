//! Ultrafamilies, ultraproducts over finite index sets, and the category `βX`.
//!
//! A μ-family is a class of partial families that agree on a μ-large set. Its
//! normal form is the value at the generating point of μ; a presentation on a
//! larger large set may be kept alongside but never affects equality.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ufcore::{dependent_sum, uf_hom, FinSet, FinUltrafilter, Subset, UfArrow, UfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("domain {domain} of the assignment is not large")]
    DomainNotLarge { domain: String },
    #[error("value `{value}` at index `{index}` lies outside carrier `{carrier}`")]
    ValueOutOfCarrier {
        index: String,
        value: String,
        carrier: String,
    },
    #[error("index mismatch: expected {expected}, found {found}")]
    IndexMismatch { expected: String, found: String },
    #[error("carrier family has {found} sets, index has {expected} elements")]
    CarrierArity { expected: usize, found: usize },
    #[error(transparent)]
    Uf(#[from] UfError),
}

/// A declared family of finite value sets `(X_i)_{i ∈ I}` sharing a tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrierFamily {
    tag: String,
    index: FinSet,
    sets: Vec<FinSet>,
}

impl CarrierFamily {
    pub fn new(tag: impl Into<String>, index: FinSet, sets: Vec<FinSet>) -> Result<Self, FamilyError> {
        if sets.len() != index.len() {
            return Err(FamilyError::CarrierArity {
                expected: index.len(),
                found: sets.len(),
            });
        }
        Ok(CarrierFamily {
            tag: tag.into(),
            index,
            sets,
        })
    }

    pub fn constant(tag: impl Into<String>, index: &FinSet, set: &FinSet) -> Self {
        CarrierFamily {
            tag: tag.into(),
            index: index.clone(),
            sets: vec![set.clone(); index.len()],
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn index(&self) -> &FinSet {
        &self.index
    }

    pub fn at(&self, i: usize) -> &FinSet {
        &self.sets[i]
    }

    /// `(X_{h(k)})_{k ∈ K}`.
    pub fn pull_back(&self, h: &UfArrow) -> Result<CarrierFamily, FamilyError> {
        if h.dst().carrier() != &self.index {
            return Err(FamilyError::IndexMismatch {
                expected: self.index.name().to_string(),
                found: h.dst().carrier().name().to_string(),
            });
        }
        let sets = (0..h.src().carrier().len())
            .map(|k| self.sets[h.rep().apply(k)].clone())
            .collect();
        CarrierFamily::new(self.tag.clone(), h.src().carrier().clone(), sets)
    }
}

/// A μ-family `(x_i)_{i→μ}` with values of type `V`.
#[derive(Debug, Clone)]
pub struct UltraFamily<V = String> {
    index: FinUltrafilter,
    tag: String,
    canonical: V,
    presentation: Option<BTreeMap<usize, V>>,
}

impl<V: PartialEq> PartialEq for UltraFamily<V> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.tag == other.tag && self.canonical == other.canonical
    }
}

impl<V: Eq> Eq for UltraFamily<V> {}

impl<V: Clone> UltraFamily<V> {
    /// A family given only by its normal form.
    pub fn canonical_only(index: FinUltrafilter, tag: impl Into<String>, value: V) -> Self {
        UltraFamily {
            index,
            tag: tag.into(),
            canonical: value,
            presentation: None,
        }
    }

    /// Build a family from a partial assignment whose domain must be large.
    pub fn from_assignment(
        index: FinUltrafilter,
        tag: impl Into<String>,
        assignment: BTreeMap<usize, V>,
    ) -> Result<Self, FamilyError> {
        let domain = Subset::from_indices(assignment.keys().copied());
        if !index.is_large(domain) {
            return Err(FamilyError::DomainNotLarge {
                domain: index.carrier().fmt_subset(domain),
            });
        }
        let canonical = assignment[&index.point()].clone();
        Ok(UltraFamily {
            index,
            tag: tag.into(),
            canonical,
            presentation: Some(assignment),
        })
    }

    pub fn index(&self) -> &FinUltrafilter {
        &self.index
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn canonical(&self) -> &V {
        &self.canonical
    }

    pub fn presentation(&self) -> Option<&BTreeMap<usize, V>> {
        self.presentation.as_ref()
    }

    /// Value at `i` if it is known from the presentation (or `i` is the point).
    pub fn value_at(&self, i: usize) -> Option<&V> {
        if i == self.index.point() {
            return Some(&self.canonical);
        }
        self.presentation.as_ref().and_then(|p| p.get(&i))
    }

    /// `ε_h`: reindex along `h : (K, κ) → (I, μ)`, giving `(x_{h(k)})_{k→κ}`.
    pub fn reindex(&self, h: &UfArrow) -> Result<UltraFamily<V>, FamilyError> {
        if h.dst() != &self.index {
            return Err(FamilyError::Uf(UfError::PushforwardMismatch {
                expected: self.index.to_string(),
                actual: h.dst().to_string(),
            }));
        }
        let presentation = self.presentation.as_ref().map(|p| {
            (0..h.src().carrier().len())
                .filter_map(|k| p.get(&h.rep().apply(k)).map(|v| (k, v.clone())))
                .collect()
        });
        Ok(UltraFamily {
            index: h.src().clone(),
            tag: self.tag.clone(),
            canonical: self.value_at(h.rep().apply(h.src().point())).cloned().expect("point value"),
            presentation,
        })
    }

    /// Drop the presentation, keeping the normal form.
    pub fn normalized(&self) -> UltraFamily<V> {
        UltraFamily::canonical_only(self.index.clone(), self.tag.clone(), self.canonical.clone())
    }
}

impl<V: fmt::Display> fmt::Display for UltraFamily<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})_{{i→{}}}", self.canonical, self.index)
    }
}

/// `mk_family`: values are labels checked against the declared carriers.
pub fn mk_family(
    index: &FinUltrafilter,
    carriers: &CarrierFamily,
    assignment: &[(&str, &str)],
) -> Result<UltraFamily, FamilyError> {
    if carriers.index() != index.carrier() {
        return Err(FamilyError::IndexMismatch {
            expected: index.carrier().name().to_string(),
            found: carriers.index().name().to_string(),
        });
    }
    let mut map = BTreeMap::new();
    for (i, v) in assignment {
        let i = index.carrier().index_of(i)?;
        if carriers.at(i).position(v).is_none() {
            return Err(FamilyError::ValueOutOfCarrier {
                index: index.carrier().label(i).to_string(),
                value: v.to_string(),
                carrier: carriers.at(i).name().to_string(),
            });
        }
        map.insert(i, v.to_string());
    }
    UltraFamily::from_assignment(index.clone(), carriers.tag(), map)
}

/// `reindex(h, fam)`.
pub fn reindex<V: Clone>(h: &UfArrow, fam: &UltraFamily<V>) -> Result<UltraFamily<V>, FamilyError> {
    fam.reindex(h)
}

/// The ultraproduct `∏_{i→μ} X_i` as a finite set of canonical families.
///
/// The element labels are those of `X_{μ.point}`, in the same order.
pub fn ultraproduct(index: &FinUltrafilter, sets: &CarrierFamily) -> (FinSet, Vec<UltraFamily>) {
    let fiber = sets.at(index.point());
    let name = format!("∏{}", sets.tag());
    let elems = fiber
        .elements()
        .iter()
        .map(|v| UltraFamily::canonical_only(index.clone(), sets.tag(), v.clone()))
        .collect();
    (fiber.renamed(name), elems)
}

/// `Σ_{i→μ} ν_i`-family from a μ-family of `ν_i`-families.
pub fn depsum_flatten(
    nested: &UltraFamily<UltraFamily>,
    inner: &[FinUltrafilter],
) -> Result<UltraFamily, FamilyError> {
    let sum = dependent_sum(nested.index(), inner)?;
    let mut flat = BTreeMap::new();
    let outer = nested.index().carrier().len();
    for i in 0..outer {
        let Some(fam) = nested.value_at(i) else { continue };
        if fam.index() != &inner[i] {
            return Err(FamilyError::IndexMismatch {
                expected: inner[i].to_string(),
                found: fam.index().to_string(),
            });
        }
        for j in 0..inner[i].carrier().len() {
            if let Some(v) = fam.value_at(j) {
                flat.insert(sum.inject(i, j), v.clone());
            }
        }
    }
    let inner_tag = nested.canonical().tag().to_string();
    UltraFamily::from_assignment(sum.into_ultrafilter(), inner_tag, flat)
}

/// Inverse of [`depsum_flatten`].
pub fn depsum_unflatten(
    flat: &UltraFamily,
    outer: &FinUltrafilter,
    inner: &[FinUltrafilter],
    outer_tag: &str,
) -> Result<UltraFamily<UltraFamily>, FamilyError> {
    let sum = dependent_sum(outer, inner)?;
    if flat.index() != sum.ultrafilter() {
        return Err(FamilyError::IndexMismatch {
            expected: sum.ultrafilter().to_string(),
            found: flat.index().to_string(),
        });
    }
    let mut nested = BTreeMap::new();
    for (i, nu) in inner.iter().enumerate() {
        let slice: BTreeMap<usize, String> = (0..nu.carrier().len())
            .filter_map(|j| flat.value_at(sum.inject(i, j)).map(|v| (j, v.clone())))
            .collect();
        if let Ok(fam) = UltraFamily::from_assignment(nu.clone(), flat.tag(), slice) {
            nested.insert(i, fam);
        }
    }
    UltraFamily::from_assignment(outer.clone(), outer_tag, nested)
}

/// An arrow of `βX`: a `UF`-arrow `f : (J, ν) → (I, μ)` with `x ∘ f = y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaArrow {
    pub src: UltraFamily,
    pub dst: UltraFamily,
    pub arrow: UfArrow,
}

/// All arrows `src → dst` of `βX`, one per μ-class.
pub fn beta_hom(src: &UltraFamily, dst: &UltraFamily) -> Vec<BetaArrow> {
    if src.tag() != dst.tag() {
        return Vec::new();
    }
    uf_hom(dst.index(), src.index())
        .into_iter()
        .filter(|f| src.reindex(f).is_ok_and(|r| &r == dst))
        .map(|arrow| BetaArrow {
            src: src.clone(),
            dst: dst.clone(),
            arrow,
        })
        .collect()
}
