//! Oracles deciding whether a node is worth a bounded Gröbner attempt.

use std::fmt;
use std::str::FromStr;

use crate::boolring::{BoolPoly, VarId};
use crate::error::Error;
use crate::gbengine::Status;

/// Decision function consulted at every unresolved node of the search.
///
/// `g` is the post-elimination set handed down by the solver and `depth` the
/// number of guessed variables. Implementations must be pure.
pub trait Oracle: Send + Sync {
    fn decide(&self, g: &[BoolPoly], depth: usize) -> Status;
    fn name(&self) -> String;
}

/// Always tame: every unresolved node gets a Gröbner attempt.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleT;

/// Always wild: pure enumeration.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleW;

/// Wild strictly below depth `threshold`, tame from there on.
#[derive(Clone, Copy, Debug)]
pub struct OracleH {
    pub threshold: usize,
}

/// Tame iff at most `bound` variables remain in the set.
///
/// Variables pinned by a polynomial `x + c` count as eliminated.
#[derive(Clone, Copy, Debug)]
pub struct OracleNrv {
    pub bound: usize,
}

impl Oracle for OracleT {
    fn decide(&self, _: &[BoolPoly], _: usize) -> Status {
        Status::Tame
    }

    fn name(&self) -> String {
        "t".into()
    }
}

impl Oracle for OracleW {
    fn decide(&self, _: &[BoolPoly], _: usize) -> Status {
        Status::Wild
    }

    fn name(&self) -> String {
        "w".into()
    }
}

impl Oracle for OracleH {
    fn decide(&self, _: &[BoolPoly], depth: usize) -> Status {
        if depth < self.threshold {
            Status::Wild
        } else {
            Status::Tame
        }
    }

    fn name(&self) -> String {
        format!("h:{}", self.threshold)
    }
}

/// Distinct variables of `g` that are not fixed by a univariate linear element.
pub fn remaining_vars(g: &[BoolPoly]) -> usize {
    let pinned: Vec<VarId> = g
        .iter()
        .filter(|p| p.degree() == 1 && p.vars().len() == 1)
        .map(|p| p.vars()[0])
        .collect();
    crate::boolring::active_vars(g)
        .into_iter()
        .filter(|v| !pinned.contains(v))
        .count()
}

impl Oracle for OracleNrv {
    fn decide(&self, g: &[BoolPoly], _: usize) -> Status {
        if remaining_vars(g) > self.bound {
            Status::Wild
        } else {
            Status::Tame
        }
    }

    fn name(&self) -> String {
        format!("nrv:{}", self.bound)
    }
}

/// Textual oracle selector: `t`, `w`, `h:<B>` or `nrv:<B>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleSpec {
    T,
    W,
    H(usize),
    Nrv(usize),
}

impl OracleSpec {
    pub fn build(self) -> Box<dyn Oracle> {
        match self {
            OracleSpec::T => Box::new(OracleT),
            OracleSpec::W => Box::new(OracleW),
            OracleSpec::H(b) => Box::new(OracleH { threshold: b }),
            OracleSpec::Nrv(b) => Box::new(OracleNrv { bound: b }),
        }
    }
}

impl FromStr for OracleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::OracleSpec(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        match t.split_once(':') {
            None if t == "t" => Ok(OracleSpec::T),
            None if t == "w" => Ok(OracleSpec::W),
            Some((kind, b)) => {
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                match kind.trim() {
                    "h" => Ok(OracleSpec::H(b)),
                    "nrv" => Ok(OracleSpec::Nrv(b)),
                    _ => Err(bad()),
                }
            }
            None => Err(bad()),
        }
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleSpec::T => write!(f, "t"),
            OracleSpec::W => write!(f, "w"),
            OracleSpec::H(b) => write!(f, "h:{b}"),
            OracleSpec::Nrv(b) => write!(f, "nrv:{b}"),
        }
    }
}
