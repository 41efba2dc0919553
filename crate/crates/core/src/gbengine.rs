//! Degree-bounded Gröbner computation over the Boolean ring.
//!
//! `groebner_bounded` is realized as iterated linearization: build the
//! Macaulay matrix of the current nonlinear polynomials up to degree `d`,
//! reduce it, harvest the linear consequences, substitute them back and
//! repeat. Multiples of already-known linear polynomials never need to be
//! formed explicitly: after substitution they reduce to zero, and the
//! normal forms of the remaining generators span the same linear
//! consequences.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolring::{active_vars, maxdeg, BoolPoly, LinearSubstitution, Monomial};
use crate::error::{Error, Result};
use crate::gf2linalg::{extract_polys, macaulay_rows, polys_to_matrix, rref};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Tame,
    Wild,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GbOutcome {
    pub status: Status,
    /// Empty when wild; otherwise `{1}` or an interreduced linear set.
    pub basis: Vec<BoolPoly>,
}

/// Result of interreducing a set of polynomials of degree at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearBasis {
    Inconsistent,
    /// Reduced row echelon form: distinct leading variables, none of which
    /// occurs in another element.
    Basis(Vec<BoolPoly>),
}

/// Gauss-Jordan elimination of a linear set.
///
/// Panics if an element has degree greater than one.
pub fn interreduce_linear(polys: &[BoolPoly]) -> LinearBasis {
    let rows: Vec<BoolPoly> = polys.iter().filter(|p| !p.is_zero()).cloned().collect();
    assert!(maxdeg(&rows) <= 1, "interreduce_linear needs degree <= 1");
    if rows.is_empty() {
        return LinearBasis::Basis(Vec::new());
    }
    let (m, idx) = polys_to_matrix(&rows);
    let r = rref(m, None).expect("no deadline");
    let basis = extract_polys(&r.matrix, &idx);
    if basis.iter().any(BoolPoly::is_one) {
        LinearBasis::Inconsistent
    } else {
        LinearBasis::Basis(basis)
    }
}

fn sort_desc(polys: &mut [BoolPoly]) {
    polys.sort_by(|a, b| b.leading().cmp(&a.leading()).then_with(|| b.terms().cmp(a.terms())));
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One linearization round: Macaulay matrix of `polys` up to degree `d`,
/// reduced to echelon form. Rows that share no monomial of degree >= 2 are
/// eliminated independently; the combined linear parts are interreduced by
/// the caller.
fn eliminate(polys: &[BoolPoly], d: usize, deadline: Option<Instant>) -> Result<Vec<BoolPoly>> {
    let universe = active_vars(polys);
    let rows = macaulay_rows(polys, d, &universe)?;

    let mut uf = UnionFind::new(rows.len());
    let mut owner: HashMap<&Monomial, usize> = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        for m in row.terms().iter().filter(|m| m.degree() >= 2) {
            match owner.get(m) {
                Some(&j) => uf.union(i, j),
                None => {
                    owner.insert(m, i);
                }
            }
        }
    }
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..rows.len() {
        let root = uf.find(i);
        let g = *group_of.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }

    let reduced: Vec<Result<Vec<BoolPoly>>> = groups
        .par_iter()
        .map(|g| {
            if g.len() == 1 {
                return Ok(vec![rows[g[0]].clone()]);
            }
            let sub: Vec<BoolPoly> = g.iter().map(|&i| rows[i].clone()).collect();
            let (m, idx) = polys_to_matrix(&sub);
            let r = rref(m, deadline).map_err(|_| Error::Timeout)?;
            Ok(extract_polys(&r.matrix, &idx))
        })
        .collect();
    let mut out = Vec::new();
    for r in reduced {
        out.extend(r?);
    }
    Ok(out)
}

enum Merge {
    Inconsistent,
    Ok,
}

fn merge_linear(basis: &mut Vec<BoolPoly>, subst: &mut LinearSubstitution, new: Vec<BoolPoly>) -> Result<Merge> {
    let mut all = std::mem::take(basis);
    all.extend(new);
    match interreduce_linear(&all) {
        LinearBasis::Inconsistent => Ok(Merge::Inconsistent),
        LinearBasis::Basis(b) => {
            *subst = LinearSubstitution::new(&b)?;
            *basis = b;
            Ok(Merge::Ok)
        }
    }
}

/// Degree-bounded Gröbner computation.
///
/// Returns `{1}` when the constant is reached, otherwise an interreduced
/// linear subset together with the interreduced residual polynomials of
/// degree `2..=d`. Fails with [`Error::Timeout`] once `deadline` passes and
/// with [`Error::DegreeExceeded`] if an input has degree above `d`.
pub fn groebner_bounded(h: &[BoolPoly], d: usize, deadline: Option<Instant>) -> Result<Vec<BoolPoly>> {
    let md = maxdeg(h);
    if md > d as isize {
        return Err(Error::DegreeExceeded {
            degree: md as usize,
            bound: d,
        });
    }
    let inconsistent = || Ok(vec![BoolPoly::one()]);

    let (lin, mut q): (Vec<BoolPoly>, Vec<BoolPoly>) =
        h.iter().filter(|p| !p.is_zero()).cloned().partition(|p| p.degree() <= 1);
    let mut basis = Vec::new();
    let mut subst = LinearSubstitution::default();
    if let Merge::Inconsistent = merge_linear(&mut basis, &mut subst, lin)? {
        return inconsistent();
    }

    let mut prev_leads: Option<Vec<Monomial>> = None;
    loop {
        if deadline.is_some_and(|t| Instant::now() >= t) {
            return Err(Error::Timeout);
        }
        // propagate known linear polynomials until nothing new drops out
        loop {
            let (new_lin, rest): (Vec<BoolPoly>, Vec<BoolPoly>) = q
                .iter()
                .map(|p| subst.apply(p))
                .filter(|p| !p.is_zero())
                .partition(|p| p.degree() <= 1);
            q = rest;
            if new_lin.is_empty() {
                break;
            }
            if let Merge::Inconsistent = merge_linear(&mut basis, &mut subst, new_lin)? {
                return inconsistent();
            }
            prev_leads = None;
        }
        if q.is_empty() {
            break;
        }

        let reduced = eliminate(&q, d, deadline)?;
        let (new_lin, rest): (Vec<BoolPoly>, Vec<BoolPoly>) =
            reduced.into_iter().partition(|p| p.degree() <= 1);
        if !new_lin.is_empty() {
            if let Merge::Inconsistent = merge_linear(&mut basis, &mut subst, new_lin)? {
                return inconsistent();
            }
            q = rest;
            prev_leads = None;
            continue;
        }
        q = rest;
        // Nothing linear appeared. If every polynomial already has degree d
        // the next Macaulay matrix has the same rows, so this is a fixpoint;
        // otherwise iterate until the leading monomials stop changing.
        let mut leads: Vec<Monomial> = q.iter().filter_map(|p| p.leading().cloned()).collect();
        leads.sort_unstable();
        let saturated = q.iter().all(|p| p.degree() == d as isize);
        if saturated || prev_leads.as_ref() == Some(&leads) {
            break;
        }
        prev_leads = Some(leads);
    }

    let mut out = q;
    out.extend(basis);
    sort_desc(&mut out);
    Ok(out)
}

/// Normal form of each element of `g` with respect to the interreduced
/// linear set `l`; zero results are dropped.
pub fn reduce_full(g: &[BoolPoly], l: &[BoolPoly]) -> Result<Vec<BoolPoly>> {
    let subst = LinearSubstitution::new(l)?;
    Ok(g.iter().map(|p| subst.apply(p)).filter(|p| !p.is_zero()).collect())
}

/// Linear elimination preprocessor.
///
/// Returns `(L, G)` with `L` linear and interreduced. A linear input comes
/// back interreduced as `(∅, G)`; `d1 = 0` leaves a nonlinear input
/// untouched.
pub fn gb_elim_lin(h: &[BoolPoly], d1: usize) -> Result<(Vec<BoolPoly>, Vec<BoolPoly>)> {
    let h: Vec<BoolPoly> = h.iter().filter(|p| !p.is_zero()).cloned().collect();
    let one = || (Vec::new(), vec![BoolPoly::one()]);
    if h.iter().any(BoolPoly::is_one) {
        return Ok(one());
    }
    if maxdeg(&h) <= 1 {
        return Ok(match interreduce_linear(&h) {
            LinearBasis::Inconsistent => one(),
            LinearBasis::Basis(b) => (Vec::new(), b),
        });
    }
    if d1 == 0 {
        return Ok((Vec::new(), h));
    }

    let (low, high): (Vec<BoolPoly>, Vec<BoolPoly>) =
        h.into_iter().partition(|p| p.degree() <= d1 as isize);
    let g = groebner_bounded(&low, d1, None)?;
    if g.iter().any(BoolPoly::is_one) {
        return Ok(one());
    }
    let (l, mut rest): (Vec<BoolPoly>, Vec<BoolPoly>) = g.into_iter().partition(|p| p.degree() == 1);
    if high.is_empty() && rest.is_empty() {
        return Ok((Vec::new(), l));
    }
    rest.extend(high);
    let g = reduce_full(&rest, &l)?;
    if g.iter().any(BoolPoly::is_one) {
        return Ok((l, vec![BoolPoly::one()]));
    }
    Ok((l, g))
}

/// Runs `groebner_bounded(h, d2)` under the time budget `tau`. Tame iff the
/// computation finished with a basis of degree at most one.
pub fn groebner_safe(h: &[BoolPoly], d2: usize, tau: Duration) -> Result<GbOutcome> {
    let wild = GbOutcome {
        status: Status::Wild,
        basis: Vec::new(),
    };
    let md = maxdeg(h);
    if md > d2 as isize {
        return Err(Error::DegreeExceeded {
            degree: md as usize,
            bound: d2,
        });
    }
    let deadline = Instant::now() + tau;
    match groebner_bounded(h, d2, Some(deadline)) {
        Ok(g) if maxdeg(&g) <= 1 => Ok(GbOutcome {
            status: Status::Tame,
            basis: g,
        }),
        Ok(_) | Err(Error::Timeout) => Ok(wild),
        Err(e) => Err(e),
    }
}
