//! A non-principal ultrafilter oracle on eventually periodic subsets of ℕ.
//!
//! [`GenericUltrafilter`] decides membership greedily: a set is answered YES
//! whenever it meets every previously committed set infinitely often. The
//! committed sets always have infinite intersection, so the answers extend to
//! a genuine non-principal ultrafilter.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::ufcore::FinSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LazyError {
    #[error("malformed eventually periodic set literal `{literal}`: {reason}")]
    BadLiteral { literal: String, reason: String },
    #[error("line {line}: {message}")]
    Script { line: usize, message: String },
    #[error("sequence value {value} out of range for `{set}`")]
    ValueOutOfRange { set: String, value: usize },
    #[error("sequences take values in different sets")]
    ValueSetMismatch,
    #[error("Łoś check failed for {formula}: pointwise {pointwise}, atomwise {atomwise}")]
    LosViolation {
        formula: String,
        pointwise: bool,
        atomwise: bool,
    },
    #[error("oracle answered YES for {count} level sets of one sequence")]
    LimitNotUnique { count: usize },
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Reduce `(prefix, pattern)` to minimal period, then minimal prefix.
/// The pattern is indexed by `n mod period` for all `n ≥ prefix.len()`.
fn normalize<T: PartialEq + Clone>(mut prefix: Vec<T>, pattern: Vec<T>) -> (Vec<T>, Vec<T>) {
    let p = pattern.len();
    let d = (1..=p)
        .filter(|d| p.is_multiple_of(*d))
        .find(|&d| (0..p).all(|k| pattern[k] == pattern[k % d]))
        .unwrap_or(p);
    let pattern = pattern[..d].to_vec();
    while let Some(last) = prefix.last() {
        if *last == pattern[(prefix.len() - 1) % d] {
            prefix.pop();
        } else {
            break;
        }
    }
    (prefix, pattern)
}

/// An eventually periodic subset of ℕ in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EPSet {
    prefix: Vec<bool>,
    pattern: Vec<bool>,
}

impl EPSet {
    /// Membership below `prefix.len()` is explicit; from there on it is
    /// `pattern[n mod pattern.len()]`. An empty pattern is treated as `[false]`.
    pub fn new(prefix: Vec<bool>, pattern: Vec<bool>) -> EPSet {
        let pattern = if pattern.is_empty() { vec![false] } else { pattern };
        let (prefix, pattern) = normalize(prefix, pattern);
        EPSet { prefix, pattern }
    }

    pub fn empty() -> EPSet {
        EPSet::new(vec![], vec![false])
    }

    pub fn all() -> EPSet {
        EPSet::new(vec![], vec![true])
    }

    /// `{ n | n ≡ r mod m }`.
    pub fn residue(r: usize, m: usize) -> EPSet {
        assert!(m > 0);
        EPSet::new(vec![], (0..m).map(|k| k == r % m).collect())
    }

    pub fn evens() -> EPSet {
        EPSet::residue(0, 2)
    }

    pub fn odds() -> EPSet {
        EPSet::residue(1, 2)
    }

    pub fn multiples(m: usize) -> EPSet {
        EPSet::residue(0, m)
    }

    pub fn finite(elems: &[usize]) -> EPSet {
        let len = elems.iter().max().map_or(0, |m| m + 1);
        EPSet::new((0..len).map(|n| elems.contains(&n)).collect(), vec![false])
    }

    pub fn singleton(n: usize) -> EPSet {
        EPSet::finite(&[n])
    }

    pub fn cofinite(missing: &[usize]) -> EPSet {
        EPSet::finite(missing).complement()
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn contains(&self, n: usize) -> bool {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.pattern[n % self.pattern.len()]
        }
    }

    fn combine(&self, other: &EPSet, op: impl Fn(bool, bool) -> bool) -> EPSet {
        let n0 = self.prefix.len().max(other.prefix.len());
        let p = lcm(self.period(), other.period());
        let at = |n: usize| op(self.contains(n), other.contains(n));
        let prefix = (0..n0).map(at).collect();
        // residue r is realised by the least n ≥ n0 with n ≡ r mod p
        let pattern = (0..p).map(|r| at(n0 + (r + p - n0 % p) % p)).collect();
        EPSet::new(prefix, pattern)
    }

    pub fn union(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn complement(&self) -> EPSet {
        EPSet::new(
            self.prefix.iter().map(|b| !b).collect(),
            self.pattern.iter().map(|b| !b).collect(),
        )
    }

    pub fn is_infinite(&self) -> bool {
        self.pattern.iter().any(|&b| b)
    }

    pub fn is_cofinite(&self) -> bool {
        self.pattern.iter().all(|&b| b)
    }

    pub fn is_empty(&self) -> bool {
        !self.is_infinite() && self.prefix.iter().all(|&b| !b)
    }

    /// A random set with prefix length below `max_prefix` and period at most `max_period`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_prefix: usize, max_period: usize) -> EPSet {
        let n0 = rng.gen_range(0..max_prefix.max(1));
        let p = rng.gen_range(1..=max_period.max(1));
        EPSet::new(
            (0..n0).map(|_| rng.gen_bool(0.5)).collect(),
            (0..p).map(|_| rng.gen_bool(0.5)).collect(),
        )
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "prefix={};period={};pattern={}",
            bits(&self.prefix),
            self.period(),
            bits(&self.pattern)
        )
    }
}

impl FromStr for EPSet {
    type Err = LazyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| LazyError::BadLiteral {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let parse_bits = |v: &str| -> Result<Vec<bool>, LazyError> {
            v.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad("bit strings use 0 and 1")),
                })
                .collect()
        };
        let (mut prefix, mut period, mut pattern) = (None, None, None);
        for part in s.trim().split(';') {
            let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key.trim() {
                "prefix" => prefix = Some(parse_bits(value.trim())?),
                "period" => {
                    period = Some(value.trim().parse::<usize>().map_err(|_| bad("period is not a number"))?)
                }
                "pattern" => pattern = Some(parse_bits(value.trim())?),
                _ => return Err(bad("unknown key")),
            }
        }
        let prefix = prefix.ok_or_else(|| bad("missing prefix"))?;
        let period = period.ok_or_else(|| bad("missing period"))?;
        let pattern = pattern.ok_or_else(|| bad("missing pattern"))?;
        if period == 0 || pattern.len() != period {
            return Err(bad("pattern length must equal the positive period"));
        }
        Ok(EPSet::new(prefix, pattern))
    }
}

/// The session state of the greedy generic ultrafilter.
#[derive(Debug, Clone)]
pub struct GenericUltrafilter {
    core: EPSet,
    committed: Vec<EPSet>,
    log: Vec<(EPSet, bool)>,
}

impl Default for GenericUltrafilter {
    fn default() -> Self {
        GenericUltrafilter::new()
    }
}

impl GenericUltrafilter {
    pub fn new() -> Self {
        GenericUltrafilter {
            core: EPSet::all(),
            committed: Vec::new(),
            log: Vec::new(),
        }
    }

    /// YES iff `a` meets the intersection of all committed sets infinitely;
    /// the answer is then committed (as `a` or its complement).
    pub fn query(&mut self, a: &EPSet) -> bool {
        let meet = self.core.intersection(a);
        let yes = meet.is_infinite();
        let commit = if yes { a.clone() } else { a.complement() };
        self.core = self.core.intersection(&commit);
        debug_assert!(self.core.is_infinite());
        self.committed.push(commit);
        self.log.push((a.clone(), yes));
        yes
    }

    pub fn committed(&self) -> &[EPSet] {
        &self.committed
    }

    pub fn log(&self) -> &[(EPSet, bool)] {
        &self.log
    }

    /// The intersection of every committed set.
    pub fn core(&self) -> &EPSet {
        &self.core
    }
}

/// An eventually periodic sequence with values in a finite set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EPSequence {
    values: FinSet,
    prefix: Vec<usize>,
    pattern: Vec<usize>,
}

impl EPSequence {
    pub fn new(values: FinSet, prefix: Vec<usize>, pattern: Vec<usize>) -> Result<Self, LazyError> {
        if pattern.is_empty() {
            return Err(LazyError::BadLiteral {
                literal: "sequence".into(),
                reason: "empty pattern".into(),
            });
        }
        if let Some(&v) = prefix.iter().chain(&pattern).find(|&&v| v >= values.len()) {
            return Err(LazyError::ValueOutOfRange {
                set: values.name().to_string(),
                value: v,
            });
        }
        let (prefix, pattern) = normalize(prefix, pattern);
        Ok(EPSequence { values, prefix, pattern })
    }

    pub fn constant(values: FinSet, v: usize) -> Result<Self, LazyError> {
        EPSequence::new(values, vec![], vec![v])
    }

    pub fn values(&self) -> &FinSet {
        &self.values
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn pattern(&self) -> &[usize] {
        &self.pattern
    }

    pub fn at(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.pattern[n % self.pattern.len()]
        }
    }

    /// Eventual structure shared by two sequences: a common prefix length and
    /// period such that both are determined by them.
    fn frame(&self, other_prefix: usize, other_period: usize) -> (usize, usize) {
        (self.prefix.len().max(other_prefix), lcm(self.pattern.len(), other_period))
    }

    fn set_where(&self, n0: usize, p: usize, pred: impl Fn(usize) -> bool) -> EPSet {
        let prefix = (0..n0).map(&pred).collect();
        let pattern = (0..p).map(|r| pred(n0 + (r + p - n0 % p) % p)).collect();
        EPSet::new(prefix, pattern)
    }

    /// `{ n | s_n = v }`.
    pub fn level_set(&self, v: usize) -> EPSet {
        let (n0, p) = self.frame(0, 1);
        self.set_where(n0, p, |n| self.at(n) == v)
    }

    /// `{ n | s_n = t_n }`.
    pub fn agreement(&self, other: &EPSequence) -> Result<EPSet, LazyError> {
        if self.values != other.values {
            return Err(LazyError::ValueSetMismatch);
        }
        let (n0, p) = self.frame(other.prefix.len(), other.pattern.len());
        Ok(self.set_where(n0, p, |n| self.at(n) == other.at(n)))
    }

    /// `g ∘ s` for `g` given as a value table into `cod`.
    pub fn map(&self, cod: &FinSet, g: &[usize]) -> Result<EPSequence, LazyError> {
        EPSequence::new(
            cod.clone(),
            self.prefix.iter().map(|&v| g[v]).collect(),
            self.pattern.iter().map(|&v| g[v]).collect(),
        )
    }
}

/// The μ-limit of a sequence, i.e. the pushforward of μ along it.
///
/// Level sets are queried in the canonical order of the value set.
pub fn limit_point(mu: &mut GenericUltrafilter, s: &EPSequence) -> Result<usize, LazyError> {
    let yes: Vec<usize> = (0..s.values().len()).filter(|&v| mu.query(&s.level_set(v))).collect();
    match yes.as_slice() {
        [v] => Ok(*v),
        _ => Err(LazyError::LimitNotUnique { count: yes.len() }),
    }
}

/// Whether `s` and `t` agree μ-eventually.
pub fn seq_eq(mu: &mut GenericUltrafilter, s: &EPSequence, t: &EPSequence) -> Result<bool, LazyError> {
    Ok(mu.query(&s.agreement(t)?))
}

/// Propositional formulas over eventually periodic atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolFormula {
    True,
    False,
    Atom(EPSet),
    Not(Box<BoolFormula>),
    And(Box<BoolFormula>, Box<BoolFormula>),
    Or(Box<BoolFormula>, Box<BoolFormula>),
}

impl BoolFormula {
    pub fn atom(a: EPSet) -> Self {
        BoolFormula::Atom(a)
    }

    pub fn not(a: BoolFormula) -> Self {
        BoolFormula::Not(Box::new(a))
    }

    pub fn and(a: BoolFormula, b: BoolFormula) -> Self {
        BoolFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolFormula, b: BoolFormula) -> Self {
        BoolFormula::Or(Box::new(a), Box::new(b))
    }

    /// The set of indices where the formula holds.
    pub fn pointwise(&self) -> EPSet {
        match self {
            BoolFormula::True => EPSet::all(),
            BoolFormula::False => EPSet::empty(),
            BoolFormula::Atom(a) => a.clone(),
            BoolFormula::Not(a) => a.pointwise().complement(),
            BoolFormula::And(a, b) => a.pointwise().intersection(&b.pointwise()),
            BoolFormula::Or(a, b) => a.pointwise().union(&b.pointwise()),
        }
    }

    /// Evaluate with each atom replaced by the oracle's answer.
    pub fn by_atoms(&self, mu: &mut GenericUltrafilter) -> bool {
        match self {
            BoolFormula::True => true,
            BoolFormula::False => false,
            BoolFormula::Atom(a) => mu.query(a),
            BoolFormula::Not(a) => !a.by_atoms(mu),
            BoolFormula::And(a, b) => {
                let x = a.by_atoms(mu);
                let y = b.by_atoms(mu);
                x && y
            }
            BoolFormula::Or(a, b) => {
                let x = a.by_atoms(mu);
                let y = b.by_atoms(mu);
                x || y
            }
        }
    }

    /// Build a random formula of bounded depth over random atoms.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> BoolFormula {
        if depth == 0 || rng.gen_ratio(1, 3) {
            return match rng.gen_range(0..10) {
                0 => BoolFormula::True,
                1 => BoolFormula::False,
                _ => BoolFormula::Atom(EPSet::random(rng, 5, 6)),
            };
        }
        match rng.gen_range(0..3) {
            0 => BoolFormula::not(BoolFormula::random(rng, depth - 1)),
            1 => BoolFormula::and(BoolFormula::random(rng, depth - 1), BoolFormula::random(rng, depth - 1)),
            _ => BoolFormula::or(BoolFormula::random(rng, depth - 1), BoolFormula::random(rng, depth - 1)),
        }
    }
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolFormula::True => f.write_str("⊤"),
            BoolFormula::False => f.write_str("⊥"),
            BoolFormula::Atom(a) => write!(f, "[{a}]"),
            BoolFormula::Not(a) => write!(f, "¬{a}"),
            BoolFormula::And(a, b) => write!(f, "({a} ∧ {b})"),
            BoolFormula::Or(a, b) => write!(f, "({a} ∨ {b})"),
        }
    }
}

/// Łoś at the propositional level: the pointwise set of `φ` is queried first,
/// then each atom; both routes must give the same truth value.
pub fn los_boolean(mu: &mut GenericUltrafilter, phi: &BoolFormula) -> Result<bool, LazyError> {
    let pointwise = mu.query(&phi.pointwise());
    let atomwise = phi.by_atoms(mu);
    if pointwise != atomwise {
        return Err(LazyError::LosViolation {
            formula: phi.to_string(),
            pointwise,
            atomwise,
        });
    }
    Ok(pointwise)
}

/// Parse a query script: one `Q <literal>` per line; blank lines and lines
/// starting with `#` are skipped.
pub fn parse_script(src: &str) -> Result<Vec<EPSet>, LazyError> {
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line.strip_prefix("Q ").ok_or_else(|| LazyError::Script {
            line: n + 1,
            message: "expected `Q <epset-literal>`".into(),
        })?;
        out.push(rest.parse().map_err(|e: LazyError| LazyError::Script {
            line: n + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Run a script on a fresh session and return the answer trace.
pub fn run_script(src: &str) -> Result<Vec<(EPSet, bool)>, LazyError> {
    let mut mu = GenericUltrafilter::new();
    for q in parse_script(src)? {
        mu.query(&q);
    }
    Ok(mu.log().to_vec())
}
