//! Multivariate polynomials over GF(2) modulo the field equations `x^2 = x`.
//!
//! Monomials are squarefree sets of variables, so the field equations never
//! appear explicitly. Polynomials are kept as strictly descending lists of
//! monomials under a graded reverse-lexicographic order in which a smaller
//! [`VarId`] index is a *larger* variable. Models put the variables they
//! want eliminated first at the low indices.

pub mod anf;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A squarefree monomial. The empty monomial is the constant `1`.
#[derive(Clone)]
pub struct Monomial(Repr);

/// Up to three variables inline, more on the heap. Canonical: a monomial
/// of degree <= 3 is always inline, with unused slots zeroed.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Inline(u8, [VarId; 3]),
    // a thin pointer keeps the enum at 16 bytes
    #[allow(clippy::box_collection)]
    Heap(Box<Vec<VarId>>),
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Repr::Inline(0, [VarId(0); 3]))
    }

    pub fn var(v: VarId) -> Self {
        Monomial(Repr::Inline(1, [v, VarId(0), VarId(0)]))
    }

    /// The product `lo * hi` of two distinct variables, `lo < hi`.
    pub(crate) fn pair(lo: VarId, hi: VarId) -> Self {
        debug_assert!(lo < hi);
        Monomial(Repr::Inline(2, [lo, hi, VarId(0)]))
    }

    /// From a strictly increasing variable list.
    fn from_sorted(vars: &[VarId]) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        if vars.len() <= 3 {
            let mut buf = [VarId(0); 3];
            buf[..vars.len()].copy_from_slice(vars);
            Monomial(Repr::Inline(vars.len() as u8, buf))
        } else {
            Monomial(Repr::Heap(Box::new(vars.to_vec())))
        }
    }

    pub fn from_vars<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        let mut vars: SmallVec<[VarId; 4]> = vars.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        Self::from_sorted(&vars)
    }

    #[inline]
    pub fn vars(&self) -> &[VarId] {
        match &self.0 {
            Repr::Inline(n, buf) => &buf[..*n as usize],
            Repr::Heap(v) => v,
        }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        match &self.0 {
            Repr::Inline(n, _) => *n as usize,
            Repr::Heap(v) => v.len(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.degree() == 0
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.vars().binary_search(&v).is_ok()
    }

    /// Product in the Boolean ring: the union of the variable sets.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (self.vars(), other.vars());
        let mut out = SmallVec::<[VarId; 8]>::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial::from_sorted(&out)
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        for &v in self.vars() {
            if !a.get(v).ok_or(Error::Unassigned(v))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Ord for Monomial {
    /// Graded reverse lexicographic order. Among monomials of equal degree,
    /// the one containing the highest-index variable of the symmetric
    /// difference is the smaller one.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.vars().iter().rev().zip(other.vars().iter().rev()) {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialEq for Monomial {
    #[inline]
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for Monomial {}

impl std::hash::Hash for Monomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vars().hash(state);
    }
}

impl Default for Monomial {
    fn default() -> Self {
        Self::one()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Monomial").field(&self.vars()).finish()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free function form of [`Monomial::mul`].
pub fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    a.mul(b)
}

/// A polynomial over GF(2) in the Boolean quotient ring.
///
/// Terms are stored in strictly descending monomial order, so the first term
/// is the leading monomial. The zero polynomial has no terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BoolPoly {
    terms: Vec<Monomial>,
}

impl BoolPoly {
    pub fn zero() -> Self {
        BoolPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        BoolPoly {
            terms: vec![Monomial::one()],
        }
    }

    pub fn constant(bit: bool) -> Self {
        if bit {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn var(v: VarId) -> Self {
        BoolPoly {
            terms: vec![Monomial::var(v)],
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        BoolPoly { terms: vec![m] }
    }

    /// Builds a polynomial from a list of monomials; repeated monomials cancel
    /// in pairs.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let mut terms: Vec<Monomial> = monomials.into_iter().collect();
        normalize(&mut terms);
        BoolPoly { terms }
    }

    /// Builds a polynomial from an already strictly descending term list.
    pub(crate) fn from_sorted_unchecked(terms: Vec<Monomial>) -> Self {
        BoolPoly { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    /// Total degree, `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.terms.first().map_or(-1, |m| m.degree() as isize)
    }

    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.first()
    }

    pub fn has_constant(&self) -> bool {
        self.terms.last().is_some_and(Monomial::is_one)
    }

    /// Sorted, deduplicated list of the variables occurring in the polynomial.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .terms
            .iter()
            .flat_map(|m| m.vars().iter().copied())
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn add(&self, other: &BoolPoly) -> BoolPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        BoolPoly { terms: out }
    }

    pub fn add_assign(&mut self, other: &BoolPoly) {
        *self = self.add(other);
    }

    pub fn mul(&self, other: &BoolPoly) -> BoolPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        normalize(&mut terms);
        BoolPoly { terms }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> BoolPoly {
        let mut terms: Vec<Monomial> = self.terms.iter().map(|t| t.mul(m)).collect();
        normalize(&mut terms);
        BoolPoly { terms }
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        let mut acc = false;
        for m in &self.terms {
            acc ^= m.evaluate(a)?;
        }
        Ok(acc)
    }

    /// Replaces every assigned variable by its value. Unassigned variables
    /// are left symbolic.
    pub fn partial_eval(&self, a: &Assignment) -> BoolPoly {
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut changed = false;
        'terms: for m in &self.terms {
            if m.vars().iter().all(|&v| a.get(v).is_none()) {
                terms.push(m.clone());
                continue;
            }
            changed = true;
            let mut kept = SmallVec::<[VarId; 4]>::new();
            for &v in m.vars() {
                match a.get(v) {
                    Some(false) => continue 'terms,
                    Some(true) => {}
                    None => kept.push(v),
                }
            }
            terms.push(Monomial::from_sorted(&kept));
        }
        if changed {
            normalize(&mut terms);
        }
        BoolPoly { terms }
    }

    pub fn display<'a>(&'a self, registry: &'a VarRegistry) -> PolyDisplay<'a> {
        PolyDisplay {
            poly: self,
            registry,
        }
    }
}

/// Sorts descending and cancels equal pairs.
fn normalize(terms: &mut Vec<Monomial>) {
    terms.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = 0;
    let mut i = 0;
    while i < terms.len() {
        let mut j = i + 1;
        while j < terms.len() && terms[j] == terms[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            terms.swap(out, i);
            out += 1;
        }
        i = j;
    }
    terms.truncate(out);
}

pub fn poly_add(p: &BoolPoly, q: &BoolPoly) -> BoolPoly {
    p.add(q)
}

pub fn poly_mul(p: &BoolPoly, q: &BoolPoly) -> BoolPoly {
    p.mul(q)
}

/// Maximum degree of a set of polynomials. Zero polynomials are ignored;
/// the empty set has `maxdeg = -1`.
pub fn maxdeg<'a, I: IntoIterator<Item = &'a BoolPoly>>(polys: I) -> isize {
    polys.into_iter().map(BoolPoly::degree).max().unwrap_or(-1)
}

/// A possibly partial assignment of bits to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(n: usize) -> Self {
        Assignment {
            values: vec![None; n],
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, bool)>>(pairs: I) -> Self {
        let mut a = Assignment::new();
        for (v, b) in pairs {
            a.set(v, b);
        }
        a
    }

    pub fn set(&mut self, v: VarId, bit: bool) {
        if v.index() >= self.values.len() {
            self.values.resize(v.index() + 1, None);
        }
        self.values[v.index()] = Some(bit);
    }

    pub fn unset(&mut self, v: VarId) {
        if let Some(slot) = self.values.get_mut(v.index()) {
            *slot = None;
        }
    }

    #[inline]
    pub fn get(&self, v: VarId) -> Option<bool> {
        self.values.get(v.index()).copied().flatten()
    }

    /// Number of assigned variables.
    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| (VarId(i as u32), b)))
    }
}

pub fn evaluate(p: &BoolPoly, a: &Assignment) -> Result<bool> {
    p.evaluate(a)
}

/// An interreduced set of linear polynomials, viewed as the substitution
/// `lead -> tail` for each element.
#[derive(Clone, Debug, Default)]
pub struct LinearSubstitution {
    tails: Vec<Option<BoolPoly>>,
    count: usize,
}

impl LinearSubstitution {
    /// Validates that every element has degree one, that leading variables
    /// are distinct, and that no leading variable occurs in another element.
    pub fn new(linear: &[BoolPoly]) -> Result<Self> {
        let mut tails: Vec<Option<BoolPoly>> = Vec::new();
        let mut count = 0;
        for p in linear {
            if p.degree() != 1 {
                return Err(Error::NotLinear {
                    degree: p.degree(),
                });
            }
            let lead = p.terms[0].vars()[0];
            if lead.index() >= tails.len() {
                tails.resize(lead.index() + 1, None);
            }
            if tails[lead.index()].is_some() {
                return Err(Error::NotInterreduced(lead));
            }
            tails[lead.index()] = Some(BoolPoly::from_sorted_unchecked(p.terms[1..].to_vec()));
            count += 1;
        }
        let subst = LinearSubstitution { tails, count };
        for tail in subst.tails.iter().flatten() {
            for m in tail.terms() {
                if let Some(&v) = m.vars().first() {
                    if subst.lead_tail(v).is_some() {
                        return Err(Error::NotInterreduced(v));
                    }
                }
            }
        }
        Ok(subst)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    fn lead_tail(&self, v: VarId) -> Option<&BoolPoly> {
        self.tails.get(v.index()).and_then(Option::as_ref)
    }

    pub fn is_lead(&self, v: VarId) -> bool {
        self.lead_tail(v).is_some()
    }

    /// Normal form of `p`: every leading variable is replaced by its tail.
    pub fn apply(&self, p: &BoolPoly) -> BoolPoly {
        if self.count == 0 {
            return p.clone();
        }
        let mut out: Vec<Monomial> = Vec::with_capacity(p.len());
        let mut changed = false;
        for m in p.terms() {
            if !m.vars().iter().any(|&v| self.is_lead(v)) {
                out.push(m.clone());
                continue;
            }
            changed = true;
            let mut kept = SmallVec::<[VarId; 4]>::new();
            let mut acc: Option<BoolPoly> = None;
            for &v in m.vars() {
                match self.lead_tail(v) {
                    Some(tail) => {
                        acc = Some(match acc {
                            None => tail.clone(),
                            Some(a) => a.mul(tail),
                        });
                    }
                    None => kept.push(v),
                }
            }
            let kept = Monomial::from_sorted(&kept);
            if let Some(acc) = acc {
                out.extend(acc.terms.into_iter().map(|t| t.mul(&kept)));
            }
        }
        if changed {
            normalize(&mut out);
        }
        BoolPoly { terms: out }
    }
}

/// Normal form of `p` with respect to an interreduced linear set.
pub fn substitute_linear(p: &BoolPoly, linear: &[BoolPoly]) -> Result<BoolPoly> {
    Ok(LinearSubstitution::new(linear)?.apply(p))
}

/// Maps variable names to indices. Immutable once a system is built.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
    lookup: HashMap<String, VarId>,
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with variables `x0 .. x{n-1}`.
    pub fn numbered(n: usize) -> Self {
        let mut r = VarRegistry::new();
        for i in 0..n {
            r.add(&format!("x{i}")).expect("generated names are valid and distinct");
        }
        r
    }

    pub fn add(&mut self, name: &str) -> Result<VarId> {
        if !is_valid_name(name) {
            return Err(Error::InvalidName(name.to_string()));
        }
        if self.lookup.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.names.len() as u32).map(VarId)
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a BoolPoly,
    registry: &'a VarRegistry,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (i, m) in self.poly.terms().iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str("1")?;
                continue;
            }
            for (j, &v) in m.vars().iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                f.write_str(self.registry.name(v))?;
            }
        }
        Ok(())
    }
}

/// An ordered list of nonzero polynomials over a shared registry.
#[derive(Clone, Debug, Default)]
pub struct PolySystem {
    pub registry: VarRegistry,
    pub polys: Vec<BoolPoly>,
}

impl PolySystem {
    pub fn new(registry: VarRegistry) -> Self {
        PolySystem {
            registry,
            polys: Vec::new(),
        }
    }

    /// Appends `p`, silently dropping the zero polynomial.
    pub fn push(&mut self, p: BoolPoly) {
        if !p.is_zero() {
            self.polys.push(p);
        }
    }

    pub fn maxdeg(&self) -> isize {
        maxdeg(&self.polys)
    }

    /// Variables occurring in at least one polynomial, ascending.
    pub fn active_vars(&self) -> Vec<VarId> {
        active_vars(&self.polys)
    }

    /// A copy with every assigned variable replaced by its value.
    pub fn instantiate(&self, a: &Assignment) -> PolySystem {
        let mut out = PolySystem::new(self.registry.clone());
        for p in &self.polys {
            out.push(p.partial_eval(a));
        }
        out
    }
}

pub fn active_vars(polys: &[BoolPoly]) -> Vec<VarId> {
    let mut vars: Vec<VarId> = polys
        .iter()
        .flat_map(|p| p.terms().iter().flat_map(|m| m.vars().iter().copied()))
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}
