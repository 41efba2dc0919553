//! Oracle-driven depth-first guessing.
//!
//! Each node fixes a prefix of the guess order, runs the elimination
//! preprocessor and either settles the node directly, hands it to a bounded
//! Gröbner attempt when the oracle says tame, or branches on the next
//! variable with bit 0 explored before bit 1.

mod oracle;
mod stats;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use oracle::{remaining_vars, Oracle, OracleH, OracleNrv, OracleSpec, OracleT, OracleW};
pub use stats::{speedup_ratio, tree_counts, tree_verify, GbCall, SolveTree};

use crate::boolring::{active_vars, maxdeg, Assignment, BoolPoly, PolySystem, VarId};
use crate::error::{Error, Result};
use crate::gbengine::{gb_elim_lin, groebner_safe, interreduce_linear, LinearBasis, Status};

/// Ordered list of guessed variables and their values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guess {
    pub pairs: Vec<(VarId, bool)>,
}

impl Guess {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: Vec<(VarId, bool)>) -> Self {
        Guess { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, v: VarId, bit: bool) {
        self.pairs.push((v, bit));
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.pairs.iter().any(|&(w, _)| w == v)
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::from_pairs(self.pairs.iter().copied())
    }
}

/// `x + c` for every guessed pair `(x, c)`.
pub fn eval_set(g: &Guess) -> Vec<BoolPoly> {
    g.pairs
        .iter()
        .map(|&(v, c)| BoolPoly::var(v).add(&BoolPoly::constant(c)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct SolveParams {
    /// Degree bound of the elimination preprocessor; 0 disables it.
    pub d1: usize,
    /// Degree bound of the Gröbner attempts.
    pub d2: usize,
    pub tau: Duration,
    /// Preferred branching order. Active variables missing from it are
    /// appended in ascending order.
    pub order: Vec<VarId>,
    /// Abandons the whole search with [`Error::Timeout`] once passed.
    pub deadline: Option<Instant>,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            d1: 0,
            d2: 2,
            tau: Duration::from_secs(60),
            order: Vec::new(),
            deadline: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    /// `{1}` or an interreduced linear basis fixing every variable.
    pub basis: Vec<BoolPoly>,
    pub solution: Option<Assignment>,
    pub stats: SolveTree,
}

impl SolveResult {
    pub fn is_inconsistent(&self) -> bool {
        self.solution.is_none()
    }
}

enum Node {
    Inconsistent,
    Solved(Vec<BoolPoly>),
}

struct Search<'a> {
    oracle: &'a dyn Oracle,
    params: &'a SolveParams,
    /// Branching order, excluding the initially guessed variables.
    order: Vec<VarId>,
    base_depth: usize,
    stats: SolveTree,
}

fn finish_linear(polys: &[BoolPoly]) -> Node {
    match interreduce_linear(polys) {
        LinearBasis::Inconsistent => Node::Inconsistent,
        LinearBasis::Basis(b) => Node::Solved(b),
    }
}

impl Search<'_> {
    /// `h` is the input system with every guessed value already substituted.
    fn node(&mut self, h: &[BoolPoly], guess: &mut Guess) -> Result<Node> {
        let depth = guess.len();
        if self.params.deadline.is_some_and(|t| Instant::now() >= t) {
            return Err(Error::Timeout);
        }
        self.stats.visit(depth);

        let mut g0 = eval_set(guess);
        g0.extend(h.iter().cloned());
        let (l, g) = gb_elim_lin(&g0, self.params.d1)?;
        if g.iter().any(BoolPoly::is_one) {
            self.stats.resolved_early += 1;
            self.stats.leaf(depth);
            return Ok(Node::Inconsistent);
        }
        if maxdeg(&g) <= 1 {
            self.stats.resolved_early += 1;
            self.stats.leaf(depth);
            let mut all = l;
            all.extend(g);
            return Ok(finish_linear(&all));
        }

        match self.oracle.decide(&g, depth) {
            Status::Tame => {
                self.stats.predicted_tame += 1;
                let start = Instant::now();
                let out = groebner_safe(&g, self.params.d2, self.params.tau)?;
                self.stats.gb_calls.push(GbCall {
                    depth,
                    status: out.status,
                    seconds: start.elapsed().as_secs_f64(),
                });
                if out.status == Status::Tame {
                    self.stats.computed_tame += 1;
                    self.stats.leaf(depth);
                    if out.basis.iter().any(BoolPoly::is_one) {
                        return Ok(Node::Inconsistent);
                    }
                    let mut all = l;
                    all.extend(out.basis);
                    return Ok(finish_linear(&all));
                }
                self.stats.computed_wild += 1;
            }
            Status::Wild => self.stats.predicted_wild += 1,
        }
        self.stats.branch(depth);

        let v = *self
            .order
            .get(depth - self.base_depth)
            .ok_or(Error::GuessOrderExhausted(depth))?;
        for bit in [false, true] {
            let fix = Assignment::from_pairs([(v, bit)]);
            let child: Vec<BoolPoly> = h
                .iter()
                .map(|p| p.partial_eval(&fix))
                .filter(|p| !p.is_zero())
                .collect();
            guess.push(v, bit);
            let res = self.node(&child, guess);
            guess.pairs.pop();
            if let Node::Solved(b) = res? {
                if !bit {
                    self.stats.early_termination = true;
                }
                return Ok(Node::Solved(b));
            }
        }
        Ok(Node::Inconsistent)
    }
}

/// Reads off the point fixed by a linear basis on `vars`.
fn extract_solution(basis: &[BoolPoly], vars: &[VarId]) -> Result<Assignment> {
    let mut a = Assignment::new();
    for p in basis {
        let vs = p.vars();
        if vs.len() == 1 && p.degree() == 1 {
            a.set(vs[0], p.has_constant());
        }
    }
    for &v in vars {
        if a.get(v).is_none() {
            return Err(Error::Underdetermined(v));
        }
    }
    Ok(a)
}

/// Solves `h` under the initial guess `g`.
///
/// The system must have at most one solution over its active variables.
/// Returns the basis `{1}` if there is none, otherwise the solution found
/// first in DFS order.
pub fn multi_solve(h: &[BoolPoly], g: &Guess, oracle: &dyn Oracle, params: &SolveParams) -> Result<SolveResult> {
    let md = maxdeg(h);
    if md > params.d2 as isize {
        return Err(Error::DegreeExceeded {
            degree: md as usize,
            bound: params.d2,
        });
    }
    let mut vars = active_vars(h);
    for &(v, _) in &g.pairs {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.sort_unstable();

    let mut order: Vec<VarId> = Vec::with_capacity(vars.len());
    for &v in params.order.iter().chain(vars.iter()) {
        if !g.contains(v) && !order.contains(&v) {
            order.push(v);
        }
    }

    let fixed = g.assignment();
    let start: Vec<BoolPoly> = h
        .iter()
        .map(|p| p.partial_eval(&fixed))
        .filter(|p| !p.is_zero())
        .collect();
    let mut search = Search {
        oracle,
        params,
        order,
        base_depth: g.len(),
        stats: SolveTree::default(),
    };
    let mut guess = g.clone();
    let node = search.node(&start, &mut guess)?;
    let stats = search.stats;
    match node {
        Node::Inconsistent => Ok(SolveResult {
            basis: vec![BoolPoly::one()],
            solution: None,
            stats,
        }),
        Node::Solved(basis) => {
            let solution = extract_solution(&basis, &vars)?;
            Ok(SolveResult {
                basis,
                solution: Some(solution),
                stats,
            })
        }
    }
}

/// [`multi_solve`] on a whole system with the empty initial guess.
pub fn solve(system: &PolySystem, oracle: &dyn Oracle, params: &SolveParams) -> Result<SolveResult> {
    multi_solve(&system.polys, &Guess::new(), oracle, params)
}

/// Every point of `GF(2)^n` on which all polynomials of the system vanish,
/// `n` being the registry size, in increasing binary order with variable 0
/// as the least significant bit.
pub fn brute_force_variety(system: &PolySystem) -> Result<Vec<Assignment>> {
    let n = system.registry.len();
    if n > 24 {
        return Err(Error::BruteForceBudget(n));
    }
    let masks: Vec<Vec<u32>> = system
        .polys
        .iter()
        .map(|p| {
            p.terms()
                .iter()
                .map(|m| m.vars().iter().fold(0u32, |acc, v| acc | 1 << v.0))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for point in 0u32..(1u32 << n) {
        let vanishes = masks
            .iter()
            .all(|terms| terms.iter().filter(|&&m| point & m == m).count() % 2 == 0);
        if vanishes {
            out.push(Assignment::from_pairs((0..n as u32).map(|i| (VarId(i), point >> i & 1 == 1))));
        }
    }
    Ok(out)
}

/// Common zeros of `polys` over their active variables only. The returned
/// assignments fix exactly those variables.
pub fn brute_force_polys(polys: &[BoolPoly]) -> Result<Vec<Assignment>> {
    let vars = active_vars(polys);
    if vars.len() > 24 {
        return Err(Error::BruteForceBudget(vars.len()));
    }
    let registry = crate::boolring::VarRegistry::numbered(vars.len());
    let local = |v: &VarId| VarId(vars.binary_search(v).expect("active") as u32);
    let mut system = PolySystem::new(registry);
    for p in polys {
        system.push(BoolPoly::from_monomials(
            p.terms()
                .iter()
                .map(|m| crate::boolring::Monomial::from_vars(m.vars().iter().map(local))),
        ));
    }
    Ok(brute_force_variety(&system)?
        .into_iter()
        .map(|a| Assignment::from_pairs(a.iter().map(|(v, b)| (vars[v.index()], b))))
        .collect())
}
