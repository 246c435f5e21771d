//! Ultrafilters on finite index sets and the category `UF` of ultrafilters.
//!
//! Every ultrafilter on a finite set is principal. [`FinUltrafilter`] stores
//! the generating point, but the rest of the crate talks to it through the
//! large-set interface ([`FinUltrafilter::is_large`]) and through `UF`-arrows,
//! never through the point directly.

use std::fmt;

use thiserror::Error;

/// Largest carrier representable with bitmask subsets.
pub const MAX_CARRIER: usize = 64;

/// Largest carrier on which subset families are enumerated by brute force.
pub const MAX_ENUMERATED: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UfError {
    #[error("duplicate element `{elem}` in finite set `{set}`")]
    DuplicateElement { set: String, elem: String },
    #[error("unknown element `{elem}` in finite set `{set}`")]
    UnknownElement { set: String, elem: String },
    #[error("finite set `{0}` exceeds the supported size")]
    TooLarge(String),
    #[error("not an ultrafilter: {axiom} fails at {witness}")]
    NotAnUltrafilter {
        axiom: UltrafilterAxiom,
        witness: String,
    },
    #[error("subset {subset} is not large")]
    NotLarge { subset: String },
    #[error("domain mismatch: expected `{expected}`, found `{found}`")]
    DomainMismatch { expected: String, found: String },
    #[error("function value {value} out of range for `{set}`")]
    ValueOutOfRange { set: String, value: usize },
    #[error("pushforward mismatch: rep sends the ultrafilter to {actual}, expected {expected}")]
    PushforwardMismatch { expected: String, actual: String },
    #[error("no ultrafilter given for index element `{0}`")]
    MissingFiber(String),
    #[error("arrows are not composable: `{0}` does not match `{1}`")]
    NotComposable(String, String),
    #[error("fibers of the dependent sum are not constant")]
    NotATensor,
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// The axiom reported as violated by [`from_large_sets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UltrafilterAxiom {
    UpwardClosure,
    FiniteMeets,
    Totality,
}

impl fmt::Display for UltrafilterAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UltrafilterAxiom::UpwardClosure => "upward closure",
            UltrafilterAxiom::FiniteMeets => "closure under finite meets",
            UltrafilterAxiom::Totality => "totality (exactly one of A, complement A)",
        })
    }
}

/// A subset of a finite carrier, as a bitmask over element positions.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1u64 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Subset {
        indices.into_iter().fold(Subset::EMPTY, |s, i| s.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    /// Complement relative to a carrier of `n` elements.
    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// All subsets of a carrier with `n` elements, in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n <= MAX_ENUMERATED, "refusing to enumerate 2^{n} subsets");
        (0..(1u64 << n)).map(Subset)
    }
}

/// A named finite set with an ordered list of distinct element labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    name: String,
    elements: Vec<String>,
}

impl FinSet {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        elements: impl IntoIterator<Item = S>,
    ) -> Result<FinSet, UfError> {
        let name = name.into();
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.len() > MAX_CARRIER {
            return Err(UfError::TooLarge(name));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(UfError::DuplicateElement {
                    set: name,
                    elem: e.clone(),
                });
            }
        }
        Ok(FinSet { name, elements })
    }

    /// The set `{0, …, n-1}` with decimal labels.
    pub fn range(name: impl Into<String>, n: usize) -> FinSet {
        FinSet::new(name, (0..n).map(|i| i.to_string())).expect("range labels are distinct")
    }

    /// The singleton `{*}`.
    pub fn singleton() -> FinSet {
        FinSet::new("1", ["*"]).expect("singleton")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize, UfError> {
        self.position(label).ok_or_else(|| UfError::UnknownElement {
            set: self.name.clone(),
            elem: label.to_string(),
        })
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset(&self, labels: &[&str]) -> Result<Subset, UfError> {
        labels
            .iter()
            .try_fold(Subset::EMPTY, |s, l| Ok(s.with(self.index_of(l)?)))
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        Subset::all(self.len())
    }

    pub fn fmt_subset(&self, s: Subset) -> String {
        let labels: Vec<&str> = s.iter().filter(|&i| i < self.len()).map(|i| self.label(i)).collect();
        format!("{{{}}}", labels.join(","))
    }

    pub fn renamed(&self, name: impl Into<String>) -> FinSet {
        FinSet {
            name: name.into(),
            elements: self.elements.clone(),
        }
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name, self.elements.join(","))
    }
}

/// A total function between finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinFn {
    dom: FinSet,
    cod: FinSet,
    map: Vec<usize>,
}

impl FinFn {
    pub fn new(dom: FinSet, cod: FinSet, map: Vec<usize>) -> Result<FinFn, UfError> {
        if map.len() != dom.len() {
            return Err(UfError::DomainMismatch {
                expected: format!("{} values", dom.len()),
                found: format!("{} values", map.len()),
            });
        }
        if let Some(&v) = map.iter().find(|&&v| v >= cod.len()) {
            return Err(UfError::ValueOutOfRange {
                set: cod.name.clone(),
                value: v,
            });
        }
        Ok(FinFn { dom, cod, map })
    }

    /// Build a function from `(argument, value)` label pairs; every element of
    /// the domain must be mapped exactly once.
    pub fn from_labels(dom: FinSet, cod: FinSet, pairs: &[(&str, &str)]) -> Result<FinFn, UfError> {
        let mut map = vec![None; dom.len()];
        for (a, b) in pairs {
            map[dom.index_of(a)?] = Some(cod.index_of(b)?);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| UfError::UnknownElement {
                    set: cod.name.clone(),
                    elem: format!("image of {}", dom.label(i)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        FinFn::new(dom, cod, map)
    }

    pub fn identity(set: &FinSet) -> FinFn {
        FinFn {
            dom: set.clone(),
            cod: set.clone(),
            map: (0..set.len()).collect(),
        }
    }

    pub fn constant(dom: &FinSet, cod: &FinSet, value: usize) -> FinFn {
        FinFn {
            dom: dom.clone(),
            cod: cod.clone(),
            map: vec![value; dom.len()],
        }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn values(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinFn) -> Result<FinFn, UfError> {
        if first.cod != self.dom {
            return Err(UfError::NotComposable(
                first.cod.name.clone(),
                self.dom.name.clone(),
            ));
        }
        Ok(FinFn {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            map: first.map.iter().map(|&i| self.map[i]).collect(),
        })
    }

    pub fn preimage(&self, b: Subset) -> Subset {
        Subset::from_indices((0..self.dom.len()).filter(|&i| b.contains(self.map[i])))
    }

    pub fn image(&self) -> Subset {
        Subset::from_indices(self.map.iter().copied())
    }

    pub fn is_surjective(&self) -> bool {
        self.image() == self.cod.full()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = Subset::EMPTY;
        for &v in &self.map {
            if seen.contains(v) {
                return false;
            }
            seen = seen.with(v);
        }
        true
    }

    /// Every function `dom → cod`, in lexicographic order of value vectors.
    pub fn all(dom: &FinSet, cod: &FinSet) -> Vec<FinFn> {
        let mut out = Vec::new();
        if cod.is_empty() {
            if dom.is_empty() {
                out.push(FinFn::new(dom.clone(), cod.clone(), vec![]).expect("empty function"));
            }
            return out;
        }
        let mut map = vec![0usize; dom.len()];
        loop {
            out.push(FinFn {
                dom: dom.clone(),
                cod: cod.clone(),
                map: map.clone(),
            });
            let mut k = dom.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                map[k] += 1;
                if map[k] < cod.len() {
                    break;
                }
                map[k] = 0;
            }
        }
    }
}

/// An ultrafilter on a finite set. Always principal; queried by large sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinUltrafilter {
    carrier: FinSet,
    point: usize,
}

/// Objects of `UF` are pairs `(I, μ)`; the carrier is part of the ultrafilter.
pub type UfObject = FinUltrafilter;

impl FinUltrafilter {
    pub fn carrier(&self) -> &FinSet {
        &self.carrier
    }

    pub fn is_large(&self, a: Subset) -> bool {
        a.contains(self.point)
    }

    /// The generating point, i.e. the unique element of the least large set.
    pub fn point(&self) -> usize {
        self.point
    }

    pub fn point_label(&self) -> &str {
        self.carrier.label(self.point)
    }

    /// The unique ultrafilter `1` on the singleton `{*}`.
    pub fn one() -> FinUltrafilter {
        FinUltrafilter {
            carrier: FinSet::singleton(),
            point: 0,
        }
    }

    pub(crate) fn at(carrier: FinSet, point: usize) -> FinUltrafilter {
        debug_assert!(point < carrier.len());
        FinUltrafilter { carrier, point }
    }
}

impl fmt::Display for FinUltrafilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] on {}", self.point_label(), self.carrier)
    }
}

/// The principal ultrafilter `[i0]` on `I`.
pub fn mk_principal(carrier: &FinSet, point: &str) -> Result<FinUltrafilter, UfError> {
    let point = carrier.index_of(point)?;
    Ok(FinUltrafilter::at(carrier.clone(), point))
}

/// Recognise a family of subsets as an ultrafilter. Upward closure, finite
/// meets and totality are checked in that order and the first failure is
/// reported with a witness.
pub fn from_large_sets(carrier: &FinSet, family: &[Subset]) -> Result<FinUltrafilter, UfError> {
    if carrier.len() > MAX_ENUMERATED {
        return Err(UfError::TooLarge(carrier.name().to_string()));
    }
    let n = carrier.len();
    let mut member = vec![false; 1usize << n];
    for a in family {
        if !a.is_subset_of(carrier.full()) {
            return Err(UfError::UnknownElement {
                set: carrier.name().to_string(),
                elem: format!("mask {:#b}", a.0),
            });
        }
        member[a.0 as usize] = true;
    }
    let fmt = |s: Subset| carrier.fmt_subset(s);
    for a in carrier.subsets().filter(|a| member[a.0 as usize]) {
        for b in carrier.subsets() {
            if a.is_subset_of(b) && !member[b.0 as usize] {
                return Err(UfError::NotAnUltrafilter {
                    axiom: UltrafilterAxiom::UpwardClosure,
                    witness: format!("{} large but {} not", fmt(a), fmt(b)),
                });
            }
        }
    }
    for a in carrier.subsets().filter(|a| member[a.0 as usize]) {
        for b in carrier.subsets().filter(|b| member[b.0 as usize]) {
            if !member[a.intersection(b).0 as usize] {
                return Err(UfError::NotAnUltrafilter {
                    axiom: UltrafilterAxiom::FiniteMeets,
                    witness: format!("{} ∩ {} not large", fmt(a), fmt(b)),
                });
            }
        }
    }
    for a in carrier.subsets() {
        let c = a.complement(n);
        if member[a.0 as usize] == member[c.0 as usize] {
            return Err(UfError::NotAnUltrafilter {
                axiom: UltrafilterAxiom::Totality,
                witness: format!("{} and {}", fmt(a), fmt(c)),
            });
        }
    }
    // Totality rules out the empty family, so some singleton is large.
    let point = (0..n)
        .find(|&i| member[Subset::singleton(i).0 as usize])
        .ok_or_else(|| UfError::Internal("ultrafilter without a least large set".into()))?;
    Ok(FinUltrafilter::at(carrier.clone(), point))
}

/// `f(μ) = { B ⊆ J | f⁻¹(B) ∈ μ }`.
pub fn pushforward(f: &FinFn, mu: &FinUltrafilter) -> Result<FinUltrafilter, UfError> {
    if f.dom() != mu.carrier() {
        return Err(UfError::DomainMismatch {
            expected: mu.carrier().name().to_string(),
            found: f.dom().name().to_string(),
        });
    }
    // The least large set of f(μ) is the image of the least large set of μ.
    let least = f.image_of(Subset::singleton(mu.point()));
    let point = least.iter().next().expect("image of a singleton is a singleton");
    Ok(FinUltrafilter::at(f.cod().clone(), point))
}

impl FinFn {
    fn image_of(&self, a: Subset) -> Subset {
        Subset::from_indices(a.iter().map(|i| self.map[i]))
    }
}

/// The restriction `μ|I0` to a large subset, with the inclusion `I0 ↪ I`.
pub fn restrict(mu: &FinUltrafilter, sub: Subset) -> Result<(FinUltrafilter, FinFn), UfError> {
    if !sub.is_subset_of(mu.carrier().full()) || !mu.is_large(sub) {
        return Err(UfError::NotLarge {
            subset: mu.carrier().fmt_subset(sub),
        });
    }
    let members: Vec<usize> = sub.iter().collect();
    let carrier = FinSet::new(
        format!("{}|{}", mu.carrier().name(), mu.carrier().fmt_subset(sub)),
        members.iter().map(|&i| mu.carrier().label(i).to_string()),
    )?;
    let point = members
        .iter()
        .position(|&i| i == mu.point())
        .expect("large subset contains the point");
    let inclusion = FinFn::new(carrier.clone(), mu.carrier().clone(), members)?;
    Ok((FinUltrafilter::at(carrier, point), inclusion))
}

/// The dependent sum `Σ_{i→μ} ν_i` together with its tagged carrier.
///
/// Elements are pairs `(i, j)` ordered lexicographically, index tag first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependentSum {
    uf: FinUltrafilter,
    outer: FinSet,
    fibers: Vec<FinSet>,
    offsets: Vec<usize>,
}

impl DependentSum {
    pub fn ultrafilter(&self) -> &FinUltrafilter {
        &self.uf
    }

    pub fn into_ultrafilter(self) -> FinUltrafilter {
        self.uf
    }

    pub fn outer(&self) -> &FinSet {
        &self.outer
    }

    pub fn fiber(&self, i: usize) -> &FinSet {
        &self.fibers[i]
    }

    /// Position of `(i, j)` in the sum carrier.
    pub fn inject(&self, i: usize, j: usize) -> usize {
        self.offsets[i] + j
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        let i = self.offsets.partition_point(|&o| o <= k) - 1;
        // skip empty fibers sharing the same offset
        let i = (i..self.fibers.len())
            .find(|&i| k < self.offsets[i] + self.fibers[i].len())
            .expect("position inside the sum");
        (i, k - self.offsets[i])
    }

    /// `π_I : Σ J_i → I`.
    pub fn outer_projection(&self) -> FinFn {
        let map = (0..self.uf.carrier().len()).map(|k| self.split(k).0).collect();
        FinFn::new(self.uf.carrier().clone(), self.outer.clone(), map).expect("projection")
    }

    /// `π_J : I × J → J`, defined when all fibers coincide.
    pub fn inner_projection(&self) -> Result<FinFn, UfError> {
        let j = self.fibers.first().ok_or(UfError::NotATensor)?;
        if self.fibers.iter().any(|f| f != j) {
            return Err(UfError::NotATensor);
        }
        let map = (0..self.uf.carrier().len()).map(|k| self.split(k).1).collect();
        FinFn::new(self.uf.carrier().clone(), j.clone(), map)
    }
}

/// `Σ_{i→μ} ν_i`: a set `U` is large iff `U ∩ J_i` is `ν_i`-large μ-eventually.
pub fn dependent_sum(mu: &FinUltrafilter, nu: &[FinUltrafilter]) -> Result<DependentSum, UfError> {
    let outer = mu.carrier();
    if nu.len() < outer.len() {
        return Err(UfError::MissingFiber(outer.label(nu.len()).to_string()));
    }
    if nu.len() > outer.len() {
        return Err(UfError::DomainMismatch {
            expected: format!("{} fibers", outer.len()),
            found: format!("{} fibers", nu.len()),
        });
    }
    let mut offsets = Vec::with_capacity(nu.len());
    let mut labels = Vec::new();
    for (i, n) in nu.iter().enumerate() {
        offsets.push(labels.len());
        for j in n.carrier().elements() {
            labels.push(format!("({},{})", outer.label(i), j));
        }
    }
    let names: Vec<&str> = nu.iter().map(|n| n.carrier().name()).collect();
    let carrier = FinSet::new(format!("Σ{}.({})", outer.name(), names.join("|")), labels)?;
    let i0 = mu.point();
    let point = offsets[i0] + nu[i0].point();
    Ok(DependentSum {
        uf: FinUltrafilter::at(carrier, point),
        outer: outer.clone(),
        fibers: nu.iter().map(|n| n.carrier().clone()).collect(),
        offsets,
    })
}

/// `μ ⊗ ν`, the dependent sum of a constant family.
pub fn tensor(mu: &FinUltrafilter, nu: &FinUltrafilter) -> DependentSum {
    dependent_sum(mu, &vec![nu.clone(); mu.carrier().len()]).expect("constant family is total")
}

/// An arrow of `UF`: the μ-class of a function `f` with `f(μ) = ν`.
#[derive(Debug, Clone)]
pub struct UfArrow {
    src: FinUltrafilter,
    dst: FinUltrafilter,
    rep: FinFn,
}

impl PartialEq for UfArrow {
    /// Arrows are equal when their representatives agree μ-eventually.
    fn eq(&self, other: &Self) -> bool {
        if self.src != other.src || self.dst != other.dst {
            return false;
        }
        let agree = Subset::from_indices(
            (0..self.src.carrier().len()).filter(|&i| self.rep.apply(i) == other.rep.apply(i)),
        );
        self.src.is_large(agree)
    }
}

impl Eq for UfArrow {}

impl UfArrow {
    /// `uf_arrow`: checks that the pushforward of `src` along `rep` is `dst`.
    pub fn new(rep: FinFn, src: FinUltrafilter, dst: FinUltrafilter) -> Result<UfArrow, UfError> {
        if rep.cod() != dst.carrier() {
            return Err(UfError::DomainMismatch {
                expected: dst.carrier().name().to_string(),
                found: rep.cod().name().to_string(),
            });
        }
        let pushed = pushforward(&rep, &src)?;
        if pushed != dst {
            return Err(UfError::PushforwardMismatch {
                expected: dst.to_string(),
                actual: pushed.to_string(),
            });
        }
        Ok(UfArrow { src, dst, rep })
    }

    pub fn identity(obj: &FinUltrafilter) -> UfArrow {
        UfArrow {
            src: obj.clone(),
            dst: obj.clone(),
            rep: FinFn::identity(obj.carrier()),
        }
    }

    pub fn src(&self) -> &FinUltrafilter {
        &self.src
    }

    pub fn dst(&self) -> &FinUltrafilter {
        &self.dst
    }

    pub fn rep(&self) -> &FinFn {
        &self.rep
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &UfArrow) -> Result<UfArrow, UfError> {
        if first.dst != self.src {
            return Err(UfError::NotComposable(first.dst.to_string(), self.src.to_string()));
        }
        let rep = self.rep.after(&first.rep)?;
        UfArrow::new(rep, first.src.clone(), self.dst.clone())
    }

    /// True iff some arrow back composes to identities on both sides.
    pub fn is_iso(&self) -> bool {
        let id_src = UfArrow::identity(&self.src);
        let id_dst = UfArrow::identity(&self.dst);
        uf_hom(&self.dst, &self.src).iter().any(|g| {
            g.after(self).map(|c| c == id_src).unwrap_or(false)
                && self.after(g).map(|c| c == id_dst).unwrap_or(false)
        })
    }
}

impl fmt::Display for UfArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = (0..self.src.carrier().len())
            .map(|i| {
                format!(
                    "{}↦{}",
                    self.src.carrier().label(i),
                    self.dst.carrier().label(self.rep.apply(i))
                )
            })
            .collect();
        write!(f, "({}) : {} → {}", vals.join(","), self.src, self.dst)
    }
}

/// `uf_compose(g, f) = g ∘ f`.
pub fn uf_compose(g: &UfArrow, f: &UfArrow) -> Result<UfArrow, UfError> {
    g.after(f)
}

/// One representative per μ-class of `UF(src, dst)`.
///
/// A class is fixed by the value taken at the generating point of `src`, which
/// must be the generating point of `dst`; the constant function is used as
/// representative.
pub fn uf_hom(src: &FinUltrafilter, dst: &FinUltrafilter) -> Vec<UfArrow> {
    let rep = FinFn::constant(src.carrier(), dst.carrier(), dst.point());
    UfArrow::new(rep, src.clone(), dst.clone()).into_iter().collect()
}

/// `h ⊗ id : (k→κ) ⊗ ν_{h(k)} → (i→μ) ⊗ ν_i`, with rep `(k, j) ↦ (h(k), j)`.
pub fn tensor_arrows(h: &UfArrow, nu: &[FinUltrafilter]) -> Result<UfArrow, UfError> {
    let target = dependent_sum(h.dst(), nu)?;
    let pulled: Vec<FinUltrafilter> = (0..h.src().carrier().len())
        .map(|k| nu[h.rep().apply(k)].clone())
        .collect();
    let source = dependent_sum(h.src(), &pulled)?;
    let map = (0..source.ultrafilter().carrier().len())
        .map(|p| {
            let (k, j) = source.split(p);
            target.inject(h.rep().apply(k), j)
        })
        .collect();
    let rep = FinFn::new(
        source.ultrafilter().carrier().clone(),
        target.ultrafilter().carrier().clone(),
        map,
    )?;
    UfArrow::new(rep, source.into_ultrafilter(), target.into_ultrafilter())
}

/// `id ⊗ (h_i) : (i→μ) ⊗ κ_i → (i→μ) ⊗ ν_i`, with rep `(i, j) ↦ (i, h_i(j))`.
pub fn tensor_arrows_right(hs: &[UfArrow], mu: &FinUltrafilter) -> Result<UfArrow, UfError> {
    let sources: Vec<FinUltrafilter> = hs.iter().map(|h| h.src().clone()).collect();
    let targets: Vec<FinUltrafilter> = hs.iter().map(|h| h.dst().clone()).collect();
    let source = dependent_sum(mu, &sources)?;
    let target = dependent_sum(mu, &targets)?;
    let map = (0..source.ultrafilter().carrier().len())
        .map(|p| {
            let (i, j) = source.split(p);
            target.inject(i, hs[i].rep().apply(j))
        })
        .collect();
    let rep = FinFn::new(
        source.ultrafilter().carrier().clone(),
        target.ultrafilter().carrier().clone(),
        map,
    )?;
    UfArrow::new(rep, source.into_ultrafilter(), target.into_ultrafilter())
}

/// Output of [`quasi_right_inverse`].
#[derive(Debug, Clone)]
pub struct QuasiRightInverse {
    /// Surjective representative `f' : (I', μ') → (J, ν)` of the input class.
    pub surjective: UfArrow,
    /// The comparison iso `(I', μ') → (I, μ)`.
    pub comparison: UfArrow,
    /// `K`, the sections of the surjective representative.
    pub sections: FinSet,
    /// `section_maps[k][j]` is the value of the `k`-th section at `j`.
    pub section_maps: Vec<Vec<usize>>,
    pub kappa: FinUltrafilter,
    /// `κ ⊗ ν` on `K × J`.
    pub tensor: DependentSum,
    /// `g : (K × J, κ ⊗ ν) → (I, μ)` with `f ∘ g = π_J`.
    pub g: UfArrow,
}

/// Largest section set the construction will enumerate.
const MAX_SECTIONS: usize = MAX_CARRIER;

/// For `f : (I, μ) → (J, ν)`, build `(K, κ, g)` with `f ∘ g = π_J` and
/// `g(κ ⊗ ν) = μ`, where `K` is the set of sections of a surjective
/// representative of `f` and `κ` contains every
/// `N_A = { k | (k f)⁻¹(A) ∈ μ }` for `A ∈ μ`.
///
/// When several `κ` qualify, the principal ultrafilter at the least section
/// (lexicographic in carrier order) of `⋂ N_A` is chosen.
pub fn quasi_right_inverse(f: &UfArrow) -> Result<QuasiRightInverse, UfError> {
    let (i_set, j_set) = (f.src().carrier(), f.dst().carrier());

    // Surjective representative: adjoin the elements of J missed by f.
    let missed: Vec<usize> = (0..j_set.len()).filter(|&j| !f.rep().image().contains(j)).collect();
    let (surjective, comparison) = if missed.is_empty() {
        (f.clone(), UfArrow::identity(f.src()))
    } else {
        let mut labels: Vec<String> = i_set.elements().to_vec();
        labels.extend(missed.iter().map(|&j| format!("{}'", j_set.label(j))));
        let widened = FinSet::new(format!("{}+", i_set.name()), labels)?;
        let mut rep = f.rep().values().to_vec();
        rep.extend(missed.iter().copied());
        let mu_wide = FinUltrafilter::at(widened.clone(), f.src().point());
        let surj = UfArrow::new(FinFn::new(widened.clone(), j_set.clone(), rep)?, mu_wide.clone(), f.dst().clone())?;
        let mut back: Vec<usize> = (0..i_set.len()).collect();
        back.extend(std::iter::repeat_n(f.src().point(), missed.len()));
        let retraction = UfArrow::new(FinFn::new(widened, i_set.clone(), back)?, mu_wide, f.src().clone())?;
        (surj, retraction)
    };
    let wide = surjective.src().carrier().clone();
    if wide.len() > MAX_ENUMERATED {
        return Err(UfError::TooLarge(wide.name().to_string()));
    }

    // K: all sections k : J → I' with f' k = id, in lexicographic order.
    let fibers: Vec<Vec<usize>> = (0..j_set.len())
        .map(|j| (0..wide.len()).filter(|&i| surjective.rep().apply(i) == j).collect())
        .collect();
    let count = fibers.iter().try_fold(1usize, |acc, fib| acc.checked_mul(fib.len()));
    if count.is_none_or(|c| c > MAX_SECTIONS) {
        return Err(UfError::TooLarge(format!("sections of {}", surjective)));
    }
    let mut sections: Vec<Vec<usize>> = vec![vec![]];
    for fib in &fibers {
        sections = sections
            .into_iter()
            .flat_map(|prefix| {
                fib.iter().map(move |&i| {
                    let mut s = prefix.clone();
                    s.push(i);
                    s
                })
            })
            .collect();
    }
    let section_labels = sections.iter().map(|s| {
        let parts: Vec<String> = s
            .iter()
            .enumerate()
            .map(|(j, &i)| format!("{}:{}", j_set.label(j), wide.label(i)))
            .collect();
        format!("<{}>", parts.join(","))
    });
    let k_set = FinSet::new("K", section_labels)?;

    // ⋂ N_A over the large sets A of μ', then the least section in it.
    let mu_wide = surjective.src();
    let mut meet = k_set.full();
    for a in wide.subsets().filter(|&a| mu_wide.is_large(a)) {
        let n_a = Subset::from_indices((0..sections.len()).filter(|&k| {
            let back = Subset::from_indices(
                (0..wide.len()).filter(|&i| a.contains(sections[k][surjective.rep().apply(i)])),
            );
            mu_wide.is_large(back)
        }));
        meet = meet.intersection(n_a);
    }
    let least = meet
        .iter()
        .next()
        .ok_or_else(|| UfError::Internal("N_A family has empty intersection".into()))?;
    let kappa = FinUltrafilter::at(k_set.clone(), least);

    // g(k, j) = k(j), then back along the comparison.
    let kj = tensor(&kappa, f.dst());
    let map = (0..kj.ultrafilter().carrier().len())
        .map(|p| {
            let (k, j) = kj.split(p);
            comparison.rep().apply(sections[k][j])
        })
        .collect();
    let g_rep = FinFn::new(kj.ultrafilter().carrier().clone(), i_set.clone(), map)?;
    let g = UfArrow::new(g_rep, kj.ultrafilter().clone(), f.src().clone())?;

    let proj = UfArrow::new(kj.inner_projection()?, kj.ultrafilter().clone(), f.dst().clone())?;
    if f.after(&g)? != proj {
        return Err(UfError::Internal("triangle f ∘ g = π_J does not commute".into()));
    }
    Ok(QuasiRightInverse {
        surjective,
        comparison,
        sections: k_set,
        section_maps: sections,
        kappa,
        tensor: kj,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(name: &str, elems: &[&str]) -> FinSet {
        FinSet::new(name, elems.iter().copied()).unwrap()
    }

    /// Definition-level pushforward, independent of the point shortcut.
    fn pushforward_oracle(f: &FinFn, mu: &FinUltrafilter) -> FinUltrafilter {
        let fam: Vec<Subset> = f.cod().subsets().filter(|&b| mu.is_large(f.preimage(b))).collect();
        from_large_sets(f.cod(), &fam).unwrap()
    }

    #[test]
    fn principal_membership() {
        let i = set("I", &["a", "b"]);
        let mu = mk_principal(&i, "a").unwrap();
        assert!(mu.is_large(i.subset(&["a"]).unwrap()));
        assert!(!mu.is_large(i.subset(&["b"]).unwrap()));
        let one = mk_principal(&FinSet::singleton(), "*").unwrap();
        assert_eq!(one, FinUltrafilter::one());
        let abc = set("I", &["a", "b", "c"]);
        let nu = mk_principal(&abc, "b").unwrap();
        assert!(nu.is_large(abc.subset(&["a", "b"]).unwrap()));
        assert!(!nu.is_large(abc.subset(&["a", "c"]).unwrap()));
        assert!(matches!(mk_principal(&abc, "z"), Err(UfError::UnknownElement { .. })));
    }

    #[test]
    fn recognises_large_set_families() {
        let i = set("I", &["a", "b"]);
        let fam = [i.subset(&["a"]).unwrap(), i.full()];
        assert_eq!(from_large_sets(&i, &fam).unwrap().point_label(), "a");
        let err = from_large_sets(&i, &[i.full()]).unwrap_err();
        assert!(matches!(
            err,
            UfError::NotAnUltrafilter { axiom: UltrafilterAxiom::Totality, .. }
        ));
        let up = from_large_sets(&i, &[i.subset(&["a"]).unwrap()]).unwrap_err();
        assert!(matches!(
            up,
            UfError::NotAnUltrafilter { axiom: UltrafilterAxiom::UpwardClosure, .. }
        ));
        let abc = set("I", &["a", "b", "c"]);
        let c = abc.index_of("c").unwrap();
        let supersets: Vec<Subset> = abc.subsets().filter(|s| s.contains(c)).collect();
        assert_eq!(from_large_sets(&abc, &supersets).unwrap().point_label(), "c");
    }

    #[test]
    fn finite_meet_failure_is_reported() {
        let abc = set("I", &["a", "b", "c"]);
        // {a,b} and {b,c} and everything above, but not {b}
        let fam: Vec<Subset> = abc
            .subsets()
            .filter(|s| s.len() >= 2)
            .collect();
        let err = from_large_sets(&abc, &fam).unwrap_err();
        assert!(matches!(
            err,
            UfError::NotAnUltrafilter { axiom: UltrafilterAxiom::FiniteMeets, .. }
        ));
    }

    #[test]
    fn pushforward_examples() {
        let ab = set("I", &["a", "b"]);
        let zero = set("J", &["0"]);
        let f = FinFn::constant(&ab, &zero, 0);
        let mu = mk_principal(&ab, "a").unwrap();
        assert_eq!(pushforward(&f, &mu).unwrap().point_label(), "0");
        assert_eq!(pushforward(&FinFn::identity(&ab), &mu).unwrap(), mu);

        let three = FinSet::range("I", 3);
        let two = FinSet::range("J", 2);
        let g = FinFn::new(three.clone(), two.clone(), vec![0, 0, 1]).unwrap();
        let nu = mk_principal(&three, "1").unwrap();
        let pushed = pushforward(&g, &nu).unwrap();
        assert_eq!(pushed.point_label(), "0");
        assert_eq!(pushed, pushforward_oracle(&g, &nu));
    }

    #[test]
    fn restriction() {
        let ab = set("I", &["a", "b"]);
        let mu = mk_principal(&ab, "a").unwrap();
        let (r, _) = restrict(&mu, ab.subset(&["a"]).unwrap()).unwrap();
        assert_eq!(r.point_label(), "a");
        assert_eq!(r.carrier().len(), 1);
        assert!(matches!(
            restrict(&mu, ab.subset(&["b"]).unwrap()),
            Err(UfError::NotLarge { .. })
        ));
        let abc = set("I", &["a", "b", "c"]);
        let nu = mk_principal(&abc, "c").unwrap();
        let (r, incl) = restrict(&nu, abc.subset(&["b", "c"]).unwrap()).unwrap();
        assert_eq!(r.point_label(), "c");
        assert_eq!(pushforward(&incl, &r).unwrap(), nu);
    }

    #[test]
    fn dependent_sum_examples() {
        let i = set("I", &["1", "2"]);
        let j = set("J", &["x", "y"]);
        let mu = mk_principal(&i, "1").unwrap();
        let nus = [mk_principal(&j, "x").unwrap(), mk_principal(&j, "y").unwrap()];
        let sum = dependent_sum(&mu, &nus).unwrap();
        assert_eq!(sum.ultrafilter().point_label(), "(1,x)");
        assert!(matches!(dependent_sum(&mu, &nus[..1]), Err(UfError::MissingFiber(_))));

        let t = tensor(&mk_principal(&i, "2").unwrap(), &mk_principal(&j, "y").unwrap());
        assert_eq!(t.ultrafilter().point_label(), "(2,y)");
    }

    #[test]
    fn dependent_sum_defining_condition_exhaustive() {
        let ab = set("I", &["a", "b"]);
        let mu = mk_principal(&ab, "a").unwrap();
        let nus = [
            mk_principal(&set("Ja", &["p"]), "p").unwrap(),
            mk_principal(&set("Jb", &["q", "r"]), "q").unwrap(),
        ];
        let sum = dependent_sum(&mu, &nus).unwrap();
        assert_eq!(sum.ultrafilter().point_label(), "(a,p)");
        let carrier = sum.ultrafilter().carrier().clone();
        assert_eq!(carrier.len(), 3);
        for u in carrier.subsets() {
            let eventually = Subset::from_indices((0..2).filter(|&i| {
                let slice = Subset::from_indices(
                    (0..nus[i].carrier().len()).filter(|&j| u.contains(sum.inject(i, j))),
                );
                nus[i].is_large(slice)
            }));
            assert_eq!(sum.ultrafilter().is_large(u), mu.is_large(eventually));
        }
    }

    #[test]
    fn tensor_projections() {
        let i = FinSet::range("I", 3);
        let j = FinSet::range("J", 2);
        let mu = mk_principal(&i, "2").unwrap();
        let nu = mk_principal(&j, "1").unwrap();
        let t = tensor(&mu, &nu);
        assert_eq!(pushforward(&t.outer_projection(), t.ultrafilter()).unwrap(), mu);
        assert_eq!(pushforward(&t.inner_projection().unwrap(), t.ultrafilter()).unwrap(), nu);
    }

    #[test]
    fn arrows_and_isos() {
        let star = FinSet::singleton();
        let i = set("I", &["a", "b", "c"]);
        let mu = mk_principal(&i, "b").unwrap();
        let h = UfArrow::new(FinFn::constant(&star, &i, 1), FinUltrafilter::one(), mu.clone()).unwrap();
        assert!(h.is_iso());
        let back = UfArrow::new(FinFn::constant(&i, &star, 0), mu.clone(), FinUltrafilter::one()).unwrap();
        assert_eq!(back.after(&h).unwrap(), UfArrow::identity(&FinUltrafilter::one()));
        assert_eq!(h.after(&back).unwrap(), UfArrow::identity(&mu));

        let id = UfArrow::new(FinFn::identity(&i), mu.clone(), mu.clone()).unwrap();
        assert_eq!(id, UfArrow::identity(&mu));

        let ab = set("I", &["a", "b"]);
        let swap = FinFn::new(ab.clone(), ab.clone(), vec![1, 0]).unwrap();
        let a = mk_principal(&ab, "a").unwrap();
        let b = mk_principal(&ab, "b").unwrap();
        let s = UfArrow::new(swap.clone(), a.clone(), b.clone()).unwrap();
        assert!(s.is_iso());
        let inv = UfArrow::new(swap.clone(), b.clone(), a.clone()).unwrap();
        assert_eq!(inv.after(&s).unwrap(), UfArrow::identity(&a));
        assert!(matches!(
            UfArrow::new(swap, a.clone(), a),
            Err(UfError::PushforwardMismatch { .. })
        ));
    }

    #[test]
    fn arrow_equality_is_eventual() {
        let i = FinSet::range("I", 3);
        let j = FinSet::range("J", 2);
        let mu = mk_principal(&i, "0").unwrap();
        let nu = mk_principal(&j, "1").unwrap();
        let f = UfArrow::new(FinFn::new(i.clone(), j.clone(), vec![1, 0, 0]).unwrap(), mu.clone(), nu.clone()).unwrap();
        let g = UfArrow::new(FinFn::new(i.clone(), j.clone(), vec![1, 1, 1]).unwrap(), mu, nu).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn tensor_arrow_constructions() {
        let ab = set("I", &["a", "b"]);
        let mu = mk_principal(&ab, "a").unwrap();
        let pq = set("J", &["p", "q"]);
        let nus = [mk_principal(&pq, "p").unwrap(), mk_principal(&pq, "q").unwrap()];

        let id = UfArrow::identity(&mu);
        let lifted = tensor_arrows(&id, &nus).unwrap();
        assert_eq!(lifted, UfArrow::identity(lifted.dst()));

        let h = UfArrow::new(FinFn::constant(&FinSet::singleton(), &ab, 0), FinUltrafilter::one(), mu.clone()).unwrap();
        let hx = tensor_arrows(&h, &nus).unwrap();
        assert_eq!(hx.dst().point_label(), "(a,p)");
        for p in 0..hx.src().carrier().len() {
            let src_label = hx.src().carrier().label(p);
            let dst_label = hx.dst().carrier().label(hx.rep().apply(p));
            assert_eq!(src_label.replace("(*,", "(a,"), dst_label);
        }

        let ids: Vec<UfArrow> = nus.iter().map(UfArrow::identity).collect();
        let right = tensor_arrows_right(&ids, &mu).unwrap();
        assert_eq!(right, UfArrow::identity(right.src()));
    }

    #[test]
    fn quasi_right_inverse_examples() {
        let i = FinSet::range("I", 3);
        let mu = mk_principal(&i, "1").unwrap();
        let q = quasi_right_inverse(&UfArrow::identity(&mu)).unwrap();
        assert_eq!(q.sections.len(), 1);
        assert_eq!(q.kappa.carrier().len(), 1);

        let j = FinSet::range("J", 2);
        let mu0 = mk_principal(&i, "0").unwrap();
        let nu0 = mk_principal(&j, "0").unwrap();
        let f = UfArrow::new(FinFn::new(i.clone(), j.clone(), vec![0, 0, 1]).unwrap(), mu0.clone(), nu0).unwrap();
        let q = quasi_right_inverse(&f).unwrap();
        assert_eq!(q.sections.len(), 2);
        assert_eq!(q.kappa.point_label(), "<0:0,1:2>");
        assert_eq!(pushforward(q.g.rep(), q.tensor.ultrafilter()).unwrap(), mu0);

        let star = FinUltrafilter::one();
        let term = UfArrow::new(FinFn::constant(&i, star.carrier(), 0), mu.clone(), star).unwrap();
        let q = quasi_right_inverse(&term).unwrap();
        assert_eq!(q.sections.len(), 3);
        assert_eq!(q.g.dst(), &mu);
    }

    #[test]
    fn quasi_right_inverse_non_surjective() {
        let star = FinUltrafilter::one();
        let j = FinSet::range("J", 3);
        let nu = mk_principal(&j, "2").unwrap();
        let f = UfArrow::new(FinFn::constant(star.carrier(), &j, 2), star.clone(), nu.clone()).unwrap();
        let q = quasi_right_inverse(&f).unwrap();
        assert!(q.surjective.rep().is_surjective());
        assert!(q.comparison.is_iso());
        assert_eq!(pushforward(q.g.rep(), q.tensor.ultrafilter()).unwrap(), star);
    }

    #[test]
    fn all_functions_enumerated() {
        let a = FinSet::range("A", 2);
        let b = FinSet::range("B", 3);
        assert_eq!(FinFn::all(&a, &b).len(), 9);
        assert_eq!(FinFn::all(&FinSet::range("E", 0), &b).len(), 1);
        assert_eq!(FinFn::all(&a, &FinSet::range("E", 0)).len(), 0);
    }

    /// Boolean-algebra homomorphism test for the characteristic map of a family.
    fn is_boolean_hom(n: usize, fam: &[Subset]) -> bool {
        let chi = |a: Subset| fam.contains(&a);
        Subset::all(n).all(|a| {
            chi(a) != chi(a.complement(n))
                && Subset::all(n).all(|b| chi(a.intersection(b)) == (chi(a) && chi(b)))
        })
    }

    fn all_arrows(max: usize) -> Vec<UfArrow> {
        let mut out = Vec::new();
        for n in 1..=max {
            let i = FinSet::range("I", n);
            for m in 1..=max {
                let j = FinSet::range("J", m);
                for f in FinFn::all(&i, &j) {
                    for p in 0..n {
                        let mu = FinUltrafilter::at(i.clone(), p);
                        let nu = pushforward(&f, &mu).unwrap();
                        out.push(UfArrow::new(f.clone(), mu, nu).unwrap());
                    }
                }
            }
        }
        out
    }

    /// Checks the defining conditions of a quasi-right-inverse without
    /// relying on the particular choice of κ.
    pub(crate) fn qri_conditions_hold(f: &UfArrow, q: &QuasiRightInverse) -> bool {
        let i_wide = q.surjective.src().carrier();
        let mu_wide = q.surjective.src();
        let j = f.dst().carrier();
        let k_set = q.kappa.carrier();
        // each k in K is a section of the surjective representative
        let kj = q.tensor.ultrafilter().carrier();
        let section = |k: usize, jj: usize| q.section_maps[k][jj];
        for k in 0..k_set.len() {
            for jj in 0..j.len() {
                if q.surjective.rep().apply(section(k, jj)) != jj {
                    return false;
                }
            }
        }
        // κ contains every N_A
        for a in i_wide.subsets().filter(|&a| mu_wide.is_large(a)) {
            let n_a = Subset::from_indices((0..k_set.len()).filter(|&k| {
                let pre = Subset::from_indices(
                    (0..i_wide.len()).filter(|&i| a.contains(section(k, q.surjective.rep().apply(i)))),
                );
                mu_wide.is_large(pre)
            }));
            if !q.kappa.is_large(n_a) {
                return false;
            }
        }
        // f ∘ g = π_J, compared on a large set by definition
        let fg: Vec<usize> = (0..kj.len()).map(|p| f.rep().apply(q.g.rep().apply(p))).collect();
        let pj = q.tensor.inner_projection().unwrap();
        let agree = Subset::from_indices((0..kj.len()).filter(|&p| fg[p] == pj.apply(p)));
        let triangle = q.tensor.ultrafilter().is_large(agree);
        // g(κ ⊗ ν) = μ via large sets
        let pushed = f
            .src()
            .carrier()
            .subsets()
            .all(|a| f.src().is_large(a) == q.tensor.ultrafilter().is_large(q.g.rep().preimage(a)));
        triangle && pushed
    }

    #[test]
    fn large_set_recognition_matches_boolean_hom_oracle() {
        for n in 0..=2 {
            let i = FinSet::range("I", n);
            let subsets: Vec<Subset> = i.subsets().collect();
            let mut accepted = 0;
            for fam_mask in 0u64..(1 << subsets.len()) {
                let fam: Vec<Subset> = (0..subsets.len())
                    .filter(|b| fam_mask & (1 << b) != 0)
                    .map(|b| subsets[b])
                    .collect();
                let ok = from_large_sets(&i, &fam).is_ok();
                assert_eq!(ok, is_boolean_hom(n, &fam), "n={n} family {fam:?}");
                accepted += ok as usize;
            }
            assert_eq!(accepted, n);
        }
    }

    #[test]
    fn quasi_right_inverse_exhaustive_up_to_four() {
        for f in all_arrows(4) {
            let q = quasi_right_inverse(&f).unwrap();
            assert!(qri_conditions_hold(&f, &q), "{f}");
        }
    }

    #[test]
    fn every_object_is_isomorphic_to_one() {
        let star = FinSet::singleton();
        for n in 1..=4 {
            let i = FinSet::range("I", n);
            for p in 0..n {
                let mu = FinUltrafilter::at(i.clone(), p);
                let h = UfArrow::new(FinFn::constant(&star, &i, p), FinUltrafilter::one(), mu).unwrap();
                assert!(h.is_iso());
            }
        }
    }

    #[test]
    fn tensor_depsum_spec_example() {
        let ab = set("I", &["a", "b"]);
        let pq = set("J", &["p", "q"]);
        let mu = mk_principal(&ab, "a").unwrap();
        let nus = [mk_principal(&pq, "p").unwrap(), mk_principal(&pq, "q").unwrap()];
        let h = UfArrow::new(FinFn::constant(&FinSet::singleton(), &ab, 0), FinUltrafilter::one(), mu).unwrap();
        let hx = tensor_arrows(&h, &nus).unwrap();
        let oracle = pushforward_oracle(hx.rep(), hx.src());
        assert_eq!(oracle.point_label(), "(a,p)");
        assert_eq!(&oracle, hx.dst());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn uf_on(max: usize) -> impl Strategy<Value = FinUltrafilter> {
            (1..=max).prop_flat_map(|n| (0..n).prop_map(move |p| FinUltrafilter::at(FinSet::range("I", n), p)))
        }

        fn func(dom: usize, cod: usize) -> impl Strategy<Value = Vec<usize>> {
            proptest::collection::vec(0..cod, dom)
        }

        proptest! {
            #[test]
            fn pushforward_is_functorial(
                (mu, f, g) in uf_on(4).prop_flat_map(|mu| {
                    let n = mu.carrier().len();
                    (Just(mu), (1usize..=4).prop_flat_map(move |m| (Just(m), func(n, m))),
                     (1usize..=4))
                        .prop_flat_map(|(mu, (m, f), k)| (Just(mu), Just((m, f)), func(m, k).prop_map(move |g| (k, g))))
                })
            ) {
                let (m, fv) = f;
                let (k, gv) = g;
                let f = FinFn::new(mu.carrier().clone(), FinSet::range("J", m), fv).unwrap();
                let g = FinFn::new(FinSet::range("J", m), FinSet::range("K", k), gv).unwrap();
                let gf = g.after(&f).unwrap();
                let lhs = pushforward(&gf, &mu).unwrap();
                let rhs = pushforward(&g, &pushforward(&f, &mu).unwrap()).unwrap();
                prop_assert_eq!(&lhs, &rhs);
                prop_assert_eq!(&lhs, &pushforward_oracle(&gf, &mu));
            }

            #[test]
            fn tensor_projects_to_factors(mu in uf_on(4), nu in uf_on(4)) {
                let t = tensor(&mu, &nu);
                prop_assert_eq!(pushforward(&t.outer_projection(), t.ultrafilter()).unwrap(), mu.clone());
                prop_assert_eq!(pushforward(&t.inner_projection().unwrap(), t.ultrafilter()).unwrap(), nu.clone());
                let d = dependent_sum(&mu, &vec![nu.clone(); mu.carrier().len()]).unwrap();
                prop_assert_eq!(d.ultrafilter(), t.ultrafilter());
                prop_assert_eq!(t.ultrafilter().point_label(),
                    format!("({},{})", mu.point_label(), nu.point_label()));
            }

            #[test]
            fn split_inverts_inject(mu in uf_on(3), sizes in proptest::collection::vec(1usize..4, 3)) {
                let nus: Vec<FinUltrafilter> = (0..mu.carrier().len())
                    .map(|i| FinUltrafilter::at(FinSet::range(format!("J{i}"), sizes[i]), 0))
                    .collect();
                let d = dependent_sum(&mu, &nus).unwrap();
                for i in 0..nus.len() {
                    for j in 0..sizes[i] {
                        prop_assert_eq!(d.split(d.inject(i, j)), (i, j));
                    }
                }
            }
        }
    }
}
