//! Plain-text ANF format.
//!
//! ```text
//! # vars: 3
//! # var 0 a
//! # var 1 b
//! # var 2 c
//! a*b + c + 1
//! ```
//!
//! One polynomial per line, monomials joined by `+`, variables by `*`.
//! Lines starting with `#` are comments; the `# vars:` and `# var` lines fix
//! the registry and its order. Without them, variables are registered in
//! order of first appearance.

use super::{BoolPoly, Monomial, PolySystem, VarRegistry};
use crate::error::{Error, Result};

/// Renders a system. `annotate(i)` may return a tag body for polynomial `i`,
/// emitted as `# tag <line> <body>` right before it, where `<line>` is the
/// 1-based line number of the polynomial itself.
pub fn write_anf<F>(system: &PolySystem, mut annotate: F) -> String
where
    F: FnMut(usize) -> Option<String>,
{
    let mut lines: Vec<String> = Vec::with_capacity(system.polys.len() + system.registry.len() + 1);
    lines.push(format!("# vars: {}", system.registry.len()));
    for v in system.registry.vars() {
        lines.push(format!("# var {} {}", v.0, system.registry.name(v)));
    }
    for (i, p) in system.polys.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        if let Some(tag) = annotate(i) {
            // the polynomial lands on the line after the tag
            lines.push(format!("# tag {} {}", lines.len() + 2, tag));
        }
        lines.push(p.display(&system.registry).to_string());
    }
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn to_anf_string(system: &PolySystem) -> String {
    write_anf(system, |_| None)
}

pub fn parse_anf(text: &str) -> Result<PolySystem> {
    let mut registry = VarRegistry::new();
    let mut header_vars: Option<usize> = None;
    let mut polys = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(n) = comment.strip_prefix("vars:") {
                let n = n.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad variable count {:?}", n.trim()),
                })?;
                header_vars = Some(n);
            } else if let Some(rest) = comment.strip_prefix("var ") {
                let mut parts = rest.split_whitespace();
                let (Some(index), Some(name), None) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected `# var <index> <name>`".into(),
                    });
                };
                let index: usize = index.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad variable index {index:?}"),
                })?;
                if index != registry.len() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("variable index {index} out of sequence"),
                    });
                }
                registry.add(name).map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
            }
            continue;
        }

        let fixed = header_vars.is_some();
        let mut monomials = Vec::new();
        for term in line.split('+') {
            let term = term.trim();
            match term {
                "" => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "empty monomial".into(),
                    })
                }
                "1" => monomials.push(Monomial::one()),
                "0" => {}
                _ => {
                    let mut vars = Vec::new();
                    for name in term.split('*') {
                        let name = name.trim();
                        let v = match registry.get(name) {
                            Some(v) => v,
                            None if fixed => {
                                return Err(Error::Parse {
                                    line: lineno,
                                    msg: Error::UnknownVariable(name.to_string()).to_string(),
                                })
                            }
                            None => registry.add(name).map_err(|e| Error::Parse {
                                line: lineno,
                                msg: e.to_string(),
                            })?,
                        };
                        vars.push(v);
                    }
                    monomials.push(Monomial::from_vars(vars));
                }
            }
        }
        polys.push(BoolPoly::from_monomials(monomials));
    }

    if let Some(n) = header_vars {
        if n != registry.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {n} variables but {} are listed", registry.len()),
            });
        }
    }
    let mut system = PolySystem::new(registry);
    for p in polys {
        system.push(p);
    }
    Ok(system)
}
