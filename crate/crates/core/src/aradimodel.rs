//! Polynomial model of reduced-round ARADI.
//!
//! Unknowns are the 256 key bits and the 128 S-box outputs of every round.
//! The plaintext enters as constants; round keys and diffusion are affine
//! forms, so only the S-box layers introduce variables.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::aradi::{self, Key, L_SHIFTS};
use crate::boolring::{anf, Assignment, BoolPoly, Monomial, PolySystem, VarId, VarRegistry};
use crate::error::{Error, Result};

/// 32 polynomials, entry `j` standing for bit `j` of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicWord {
    pub bits: Vec<BoolPoly>,
}

impl SymbolicWord {
    pub fn constant(w: u32) -> Self {
        SymbolicWord {
            bits: (0..32).map(|j| BoolPoly::constant(w >> j & 1 == 1)).collect(),
        }
    }

    pub fn from_vars(vars: &[VarId]) -> Self {
        SymbolicWord {
            bits: vars.iter().map(|&v| BoolPoly::var(v)).collect(),
        }
    }

    pub fn xor(&self, other: &SymbolicWord) -> SymbolicWord {
        SymbolicWord {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn xor_const(&self, c: u32) -> SymbolicWord {
        self.xor(&SymbolicWord::constant(c))
    }

    pub fn rotl(&self, m: usize) -> SymbolicWord {
        SymbolicWord {
            bits: (0..32).map(|j| self.bits[(j + 32 - m) % 32].clone()).collect(),
        }
    }

    /// Value of the word under `a`.
    pub fn evaluate(&self, a: &Assignment) -> Result<u32> {
        let mut w = 0u32;
        for (j, p) in self.bits.iter().enumerate() {
            if p.evaluate(a)? {
                w |= 1 << j;
            }
        }
        Ok(w)
    }
}

/// The S-box relations in `x0..x3` (input bits of `W, X, Y, Z`) and
/// `y0..y3` (output bits).
pub const SBOX_TEMPLATE: [&str; 21] = [
    "x0*x2 + x1*x2 + x3 + y3",
    "x0*x1 + x0*x2 + x0*y1",
    "x0*x2 + x0*y2 + x0*y3",
    "x0*x2 + x0*x3 + x1*y1 + x0*y2 + y1",
    "x0*x3 + x1*x3 + x0*y0 + x0*y2 + x1*y2 + y0",
    "x0*x2 + x0*x3 + x1*x3 + x0*y2 + x1*y3 + x3 + y3",
    "x0*x2 + x1 + y1",
    "x0*x2 + x0*y2 + x2 + y2",
    "x2*y1 + x3 + y3",
    "x0*x2 + x0*x3 + x1*x3 + x0*y2 + x2*y2 + x0 + x2 + x3 + y0 + y3",
    "x2*x3 + x2*y3 + x3 + y3",
    "x0*x2 + x0*x3 + x2*y0 + x3*y0 + x0 + y0",
    "x3*y1 + x0 + x3 + y0 + y3",
    "x0*x1 + x0*x2 + x2*x3 + x1*y0 + x0*y2 + x3*y2 + x0 + y0",
    "x0*x2 + x2*y0 + x3*y3 + y3",
    "x0*x1 + x0*x2 + y0*y1 + x0 + y0",
    "x0*x2 + x0*y0 + x2*y0 + x0*y2 + y0*y2 + x0",
    "x0*x2 + x0*y2 + y0*y3 + x0 + y0",
    "x0*y0 + y1*y2 + x0 + x3 + y3",
    "y1*y3 + x0 + y0",
    "x0*x2 + x2*x3 + x0*y2 + y2*y3 + x3 + y3",
];

/// The template over formal variables `x0..x3, y0..y3` (ids 0..8).
pub fn sbox_template() -> PolySystem {
    let mut text = String::from("# vars: 8\n");
    for (i, name) in ["x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3"].iter().enumerate() {
        text.push_str(&format!("# var {i} {name}\n"));
    }
    for p in SBOX_TEMPLATE {
        text.push_str(p);
        text.push('\n');
    }
    anf::parse_anf(&text).expect("template is well formed")
}

// Degree <= 2 monomials packed into u64 keys whose ascending order is the
// descending monomial order: a quadratic {lo < hi} is hi << 32 | lo, a
// variable is QUAD_END | v and the constant is u64::MAX.
const QUAD_END: u64 = 1 << 63;

/// Sum of two sorted key lists, fed to `emit` in order.
fn xor_merge_with<T: Ord + Copy>(a: &[T], b: &[T], mut emit: impl FnMut(T)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                emit(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                emit(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    a[i..].iter().chain(&b[j..]).for_each(|&k| emit(k));
}

fn xor_merge(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    xor_merge_with(a, b, |k| out.push(k));
    out
}

/// An affine polynomial as (variables, constant).
struct Affine {
    vars: Vec<u32>,
    constant: bool,
}

impl Affine {
    fn new(p: &BoolPoly) -> Self {
        assert!(p.degree() <= 1, "S-box inputs must be affine");
        Affine {
            vars: p.terms().iter().filter(|m| m.degree() == 1).map(|m| m.vars()[0].0).collect(),
            constant: p.has_constant(),
        }
    }

    fn add(&self, other: &Affine) -> Affine {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        xor_merge_with(&self.vars, &other.vars, |v| vars.push(v));
        Affine {
            vars,
            constant: self.constant ^ other.constant,
        }
    }

    fn keys(&self) -> Vec<u64> {
        let mut k: Vec<u64> = self.vars.iter().map(|&v| QUAD_END | v as u64).collect();
        if self.constant {
            k.push(u64::MAX);
        }
        k
    }

    /// Product, emitted directly in key order: quadratics grouped by their
    /// higher variable, then the linear part, then the constant.
    fn mul(&self, other: &Affine) -> Vec<u64> {
        let (a, b) = (&self.vars, &other.vars);
        let mut k = Vec::with_capacity((a.len() + 1) * (b.len() + 1));
        let (mut i, mut j) = (0, 0);
        let mut diagonal = Vec::new();
        while i < a.len() || j < b.len() {
            let v = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => x.min(y),
                (Some(&x), None) => x,
                (None, Some(&y)) => y,
                (None, None) => unreachable!(),
            };
            let in_a = a.get(i) == Some(&v);
            let in_b = b.get(j) == Some(&v);
            // v times the smaller variables of the other factor
            let high = (v as u64) << 32;
            match (in_a, in_b) {
                (true, true) => {
                    diagonal.push(QUAD_END | v as u64);
                    xor_merge_with(&b[..j], &a[..i], |u| k.push(high | u as u64));
                }
                (true, false) => k.extend(b[..j].iter().map(|&u| high | u as u64)),
                _ => k.extend(a[..i].iter().map(|&u| high | u as u64)),
            }
            if in_a {
                i += 1;
            }
            if in_b {
                j += 1;
            }
        }
        let mut linear = diagonal;
        if other.constant {
            linear = xor_merge(&linear, &self.keys_linear());
        }
        if self.constant {
            linear = xor_merge(&linear, &other.keys_linear());
        }
        k.extend(linear);
        if self.constant && other.constant {
            k.push(u64::MAX);
        }
        k
    }

    fn keys_linear(&self) -> Vec<u64> {
        self.vars.iter().map(|&v| QUAD_END | v as u64).collect()
    }
}

fn key_monomial(k: u64) -> Monomial {
    if k == u64::MAX {
        Monomial::one()
    } else if k & QUAD_END != 0 {
        Monomial::var(VarId(k as u32))
    } else {
        Monomial::pair(VarId(k as u32), VarId((k >> 32) as u32))
    }
}

/// Sum of the products `images[a] * images[b]` over the monomials `a*b`,
/// factored greedily so that each variable shared by several monomials costs
/// one product: `x0*x1 + x0*x2 = x0 * (x1 + x2)`.
fn factored_product(monomials: &[&Monomial], images: &[Affine]) -> Vec<u64> {
    let mut pairs: Vec<[usize; 2]> = monomials.iter().map(|m| [m.vars()[0].index(), m.vars()[1].index()]).collect();
    let mut acc: Option<Vec<u64>> = None;
    while !pairs.is_empty() {
        let mut count = [0usize; 8];
        pairs.iter().flatten().for_each(|&i| count[i] += 1);
        let pivot = (0..8).rev().max_by_key(|&i| count[i]).unwrap();
        let mut factor = Affine {
            vars: Vec::new(),
            constant: false,
        };
        pairs.retain(|&[a, b]| {
            let other = match (a == pivot, b == pivot) {
                (true, _) => b,
                (_, true) => a,
                _ => return true,
            };
            factor = factor.add(&images[other]);
            false
        });
        let product = images[pivot].mul(&factor);
        acc = Some(match acc {
            None => product,
            Some(prev) => xor_merge(&prev, &product),
        });
    }
    acc.unwrap_or_default()
}

/// The 21 relations with inputs `inp` (affine) and outputs `out`.
pub fn sbox_constraints(inp: &[BoolPoly; 4], out: &[VarId; 4]) -> Vec<BoolPoly> {
    static TEMPLATE: OnceLock<PolySystem> = OnceLock::new();
    let template = TEMPLATE.get_or_init(sbox_template);
    let mut images: Vec<Affine> = inp.iter().map(Affine::new).collect();
    images.extend(out.iter().map(|&v| Affine {
        vars: vec![v.0],
        constant: false,
    }));

    // Products of two inputs are large and shared between relations, so
    // each input-quadratic part is built once, keyed by its monomials.
    let mut quadratic: HashMap<Vec<&Monomial>, Vec<u64>> = HashMap::new();
    let mut result = Vec::with_capacity(template.polys.len());
    for p in &template.polys {
        let (xx, rest): (Vec<&Monomial>, Vec<&Monomial>) =
            p.terms().iter().partition(|m| m.degree() == 2 && m.vars().iter().all(|v| v.index() < 4));
        if !xx.is_empty() && !quadratic.contains_key(&xx) {
            let part = factored_product(&xx, &images);
            quadratic.insert(xx.clone(), part);
        }
        let mut small: Vec<u64> = Vec::new();
        for m in rest {
            let part = match m.vars() {
                [] => vec![u64::MAX],
                [a] => images[a.index()].keys(),
                [a, b] => images[a.index()].mul(&images[b.index()]),
                _ => unreachable!("template is quadratic"),
            };
            small = xor_merge(&small, &part);
        }
        let big = quadratic.get(&xx[..]).map_or(&[][..], |v| &v[..]);
        let mut terms = Vec::with_capacity(big.len() + small.len());
        xor_merge_with(big, &small, |k| terms.push(key_monomial(k)));
        result.push(BoolPoly::from_sorted_unchecked(terms));
    }
    result
}

/// Symbolic image of one word under the linear map of round `i`.
pub fn diffusion_forms(word: &SymbolicWord, i: usize) -> SymbolicWord {
    let (a, b, c) = L_SHIFTS[i % 4];
    let (a, b, c) = (a as usize, b as usize, c as usize);
    let lo = |j: usize| &word.bits[j % 16];
    let hi = |j: usize| &word.bits[16 + j % 16];
    let mut bits = Vec::with_capacity(32);
    for j in 0..16 {
        bits.push(lo(j).add(lo(j + 16 - a)).add(hi(j + 16 - b)));
    }
    for j in 0..16 {
        bits.push(hi(j).add(hi(j + 16 - a)).add(lo(j + 16 - c)));
    }
    SymbolicWord { bits }
}

fn m_symbolic(a: &SymbolicWord, b: &SymbolicWord, s: usize, t: usize) -> (SymbolicWord, SymbolicWord) {
    let first = a.rotl(s).xor(b);
    let second = b.rotl(t).xor(&first);
    (first, second)
}

/// Round keys `RK^0 ..= RK^rounds` as affine forms in `key_vars`, where
/// `key_vars[j]` stands for key bit `k_j`.
pub fn symbolic_round_keys(key_vars: &[VarId], rounds: usize) -> Vec<[SymbolicWord; 4]> {
    assert_eq!(key_vars.len(), 256);
    let mut k: Vec<SymbolicWord> = (0..8)
        .map(|r| SymbolicWord::from_vars(&(0..32).map(|j| key_vars[32 * r + 31 - j]).collect::<Vec<_>>()))
        .collect();
    let select = |k: &[SymbolicWord], i: usize| {
        let o = if i.is_multiple_of(2) { 0 } else { 4 };
        [k[o].clone(), k[o + 1].clone(), k[o + 2].clone(), k[o + 3].clone()]
    };
    let mut out = vec![select(&k, 0)];
    for i in 0..rounds {
        if i % 2 == 0 {
            (k[0], k[1]) = m_symbolic(&k[0], &k[1], 1, 3);
            (k[4], k[5]) = m_symbolic(&k[4], &k[5], 1, 3);
            k.swap(1, 2);
            k.swap(5, 6);
        } else {
            (k[2], k[3]) = m_symbolic(&k[2], &k[3], 9, 28);
            (k[6], k[7]) = m_symbolic(&k[6], &k[7], 9, 28);
            k.swap(1, 4);
            k.swap(3, 6);
        }
        k[7] = k[7].xor_const(aradi::round_counter(i));
        out.push(select(&k, i + 1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagKind {
    Sbox,
    Final,
}

/// Origin of one polynomial of the model; rounds are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tag {
    pub round: usize,
    pub kind: TagKind,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TagKind::Sbox => "sbox",
            TagKind::Final => "final",
        };
        write!(f, "round={} kind={}", self.round, kind)
    }
}

#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub rounds: usize,
    /// Fold the last round key into the final equations; `target` is then
    /// the ciphertext proper.
    pub include_final_whitening: bool,
    pub plaintext: u128,
    /// Block the final equations are equated to: the state after the last
    /// linear layer, or the ciphertext with whitening.
    pub target: u128,
}

impl ModelConfig {
    /// Configuration for the instance generated by `key` and `pt`.
    pub fn for_key(key: &Key, pt: u128, rounds: usize, include_final_whitening: bool) -> Result<Self> {
        let t = aradi::encrypt_traced(key, pt, rounds)?;
        let target = if include_final_whitening {
            t.ciphertext.to_u128()
        } else {
            t.rounds[rounds - 1].after_lambda.to_u128()
        };
        Ok(ModelConfig {
            rounds,
            include_final_whitening,
            plaintext: pt,
            target,
        })
    }

    /// Configuration from a known ciphertext; without whitening the caller
    /// must supply the last round key to strip it.
    pub fn from_ciphertext(rounds: usize, pt: u128, ct: u128, whitening: Option<[u32; 4]>) -> Self {
        match whitening {
            None => ModelConfig {
                rounds,
                include_final_whitening: true,
                plaintext: pt,
                target: ct,
            },
            Some(rk) => {
                let rk = aradi::State::from_words(rk).to_u128();
                ModelConfig {
                    rounds,
                    include_final_whitening: false,
                    plaintext: pt,
                    target: ct ^ rk,
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct AradiSystem {
    pub system: PolySystem,
    pub tags: Vec<Tag>,
    /// `key_vars[j]` is key bit `k_j`.
    pub key_vars: Vec<VarId>,
    /// `sbox_vars[r][w][j]`: output bit `j` of word `w` (W, X, Y, Z) in round
    /// `r + 1`.
    pub sbox_vars: Vec<[[VarId; 32]; 4]>,
    pub rounds: usize,
}

const WORD_NAMES: [&str; 4] = ["w", "x", "y", "z"];

pub fn build_system(cfg: &ModelConfig) -> Result<AradiSystem> {
    let rounds = cfg.rounds;
    if !(1..=aradi::ROUNDS).contains(&rounds) {
        return Err(Error::Rounds(rounds));
    }

    // later rounds first, then the key
    let mut registry = VarRegistry::new();
    let mut sbox_vars = vec![[[VarId(0); 32]; 4]; rounds];
    for r in (0..rounds).rev() {
        for (w, name) in WORD_NAMES.iter().enumerate() {
            for (j, slot) in sbox_vars[r][w].iter_mut().enumerate() {
                *slot = registry.add(&format!("s_{}_{}_{}", name, r + 1, j))?;
            }
        }
    }
    let key_vars: Vec<VarId> = (0..256).map(|j| registry.add(&format!("k{j}"))).collect::<Result<_>>()?;

    let rks = symbolic_round_keys(&key_vars, rounds);
    let mut system = PolySystem::new(registry);
    let mut tags = Vec::with_capacity(rounds * 672 + 128);
    let mut push = |system: &mut PolySystem, p: BoolPoly, tag: Tag| {
        if !p.is_zero() {
            system.polys.push(p);
            tags.push(tag);
        }
    };

    let pt = aradi::State::from_u128(cfg.plaintext).words();
    let mut state: Vec<SymbolicWord> = pt.iter().map(|&w| SymbolicWord::constant(w)).collect();
    for (i, rk) in rks.iter().enumerate().take(rounds) {
        let keyed: Vec<SymbolicWord> = state.iter().zip(rk.iter()).map(|(s, k)| s.xor(k)).collect();
        let tag = Tag {
            round: i + 1,
            kind: TagKind::Sbox,
        };
        #[allow(clippy::needless_range_loop)]
        for j in 0..32 {
            let inp = [0, 1, 2, 3].map(|w| keyed[w].bits[j].clone());
            let out = [0, 1, 2, 3].map(|w| sbox_vars[i][w][j]);
            for p in sbox_constraints(&inp, &out) {
                push(&mut system, p, tag);
            }
        }
        state = (0..4)
            .map(|w| diffusion_forms(&SymbolicWord::from_vars(&sbox_vars[i][w]), i))
            .collect();
    }

    if cfg.include_final_whitening {
        state = state.iter().zip(rks[rounds].iter()).map(|(s, k)| s.xor(k)).collect();
    }
    let target = aradi::State::from_u128(cfg.target).words();
    let tag = Tag {
        round: rounds,
        kind: TagKind::Final,
    };
    for (w, word) in state.iter().enumerate() {
        for p in &word.xor_const(target[w]).bits {
            push(&mut system, p.clone(), tag);
        }
    }

    Ok(AradiSystem {
        system,
        tags,
        key_vars,
        sbox_vars,
        rounds,
    })
}

impl AradiSystem {
    /// ANF text with a provenance tag before every polynomial.
    pub fn to_anf(&self) -> String {
        anf::write_anf(&self.system, |i| Some(self.tags[i].to_string()))
    }

    /// Assignment of the key variables alone.
    pub fn key_assignment(&self, key: &Key) -> Assignment {
        Assignment::from_pairs(self.key_vars.iter().enumerate().map(|(j, &v)| (v, aradi::key_bit(key, j))))
    }

    /// Reads the key back out of a complete assignment.
    pub fn key_from_assignment(&self, a: &Assignment) -> Result<Key> {
        let bits: Vec<bool> = self
            .key_vars
            .iter()
            .map(|&v| a.get(v).ok_or(Error::Unassigned(v)))
            .collect::<Result<_>>()?;
        Ok(aradi::key_from_bits(&bits))
    }
}

/// The witness of an encryption: key bits and every S-box output.
pub fn trace_assignment(model: &AradiSystem, trace: &aradi::EncryptionTrace, key: &Key) -> Result<Assignment> {
    if trace.rounds.len() != model.rounds {
        return Err(Error::RoundMismatch {
            trace: trace.rounds.len(),
            model: model.rounds,
        });
    }
    let mut a = model.key_assignment(key);
    for (r, rt) in trace.rounds.iter().enumerate() {
        let words = rt.after_pi.words();
        for (vars, word) in model.sbox_vars[r].iter().zip(words) {
            for (j, &v) in vars.iter().enumerate() {
                a.set(v, word >> j & 1 == 1);
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use proptest::prelude::*;

    fn random_key(rng: &mut ChaCha8Rng) -> Key {
        std::array::from_fn(|_| rng.gen())
    }

    #[test]
    fn template_shape() {
        let t = sbox_template();
        assert_eq!(t.polys.len(), 21);
        assert!(t.polys.iter().all(|p| p.degree() == 2));
        assert_eq!(t.polys[0].display(&t.registry).to_string(), "x0*x2 + x1*x2 + x3 + y3");
    }

    #[test]
    fn template_literal_inputs_unchanged() {
        let inp = [0, 1, 2, 3].map(|i| BoolPoly::var(VarId(i)));
        let out = [4, 5, 6, 7].map(VarId);
        assert_eq!(sbox_constraints(&inp, &out), sbox_template().polys);
    }

    #[test]
    fn constraints_vanish_on_sbox_graph() {
        let out = [0, 1, 2, 3].map(VarId);
        for v in 0u8..16 {
            let inp = [0, 1, 2, 3].map(|i| BoolPoly::constant(v >> i & 1 == 1));
            let s = aradi::sbox(v);
            let a = Assignment::from_pairs((0..4).map(|i| (VarId(i), s >> i & 1 == 1)));
            for p in sbox_constraints(&inp, &out) {
                assert!(!p.evaluate(&a).unwrap());
            }
        }
    }

    #[test]
    fn affine_inputs_stay_quadratic() {
        let inp = [
            BoolPoly::var(VarId(0)).add(&BoolPoly::var(VarId(1))),
            BoolPoly::var(VarId(2)).add(&BoolPoly::one()),
            BoolPoly::var(VarId(0)),
            BoolPoly::var(VarId(3)).add(&BoolPoly::var(VarId(1))),
        ];
        let out = [10, 11, 12, 13].map(VarId);
        assert!(sbox_constraints(&inp, &out).iter().all(|p| p.degree() <= 2));
    }

    /// Template relations composed with `inp`, `out` by ring arithmetic.
    fn composed(inp: &[BoolPoly; 4], out: &[VarId; 4]) -> Vec<BoolPoly> {
        let images: Vec<BoolPoly> = inp.iter().cloned().chain(out.iter().map(|&v| BoolPoly::var(v))).collect();
        sbox_template()
            .polys
            .iter()
            .map(|p| {
                p.terms().iter().fold(BoolPoly::zero(), |acc, m| {
                    acc.add(&m.vars().iter().fold(BoolPoly::one(), |t, v| t.mul(&images[v.index()])))
                })
            })
            .collect()
    }

    fn arb_affine() -> impl Strategy<Value = BoolPoly> {
        (proptest::collection::vec(0u32..40, 0..12), any::<bool>()).prop_map(|(vars, c)| {
            vars.into_iter().fold(BoolPoly::constant(c), |p, v| p.add(&BoolPoly::var(VarId(v))))
        })
    }

    proptest! {
        #[test]
        fn constraints_match_composition(
            inp in proptest::array::uniform4(arb_affine()),
            out in proptest::array::uniform4(0u32..48),
        ) {
            let out = out.map(VarId);
            prop_assert_eq!(sbox_constraints(&inp, &out), composed(&inp, &out));
        }
    }

    #[test]
    fn diffusion_matches_l_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let w: u32 = rng.gen();
            let i = rng.gen_range(0..4);
            let (a, b, c) = L_SHIFTS[i];
            let sym = diffusion_forms(&SymbolicWord::constant(w), i);
            assert_eq!(sym.evaluate(&Assignment::new()).unwrap(), aradi::l_map(w, a, b, c));
        }
        assert_eq!(diffusion_forms(&SymbolicWord::constant(0), 2), SymbolicWord::constant(0));
    }

    #[test]
    fn diffusion_involution() {
        let vars: Vec<VarId> = (0..32).map(VarId).collect();
        let w = SymbolicWord::from_vars(&vars);
        for i in 0..4 {
            assert_eq!(diffusion_forms(&diffusion_forms(&w, i), i), w);
        }
    }

    #[test]
    fn round_keys_match_schedule() {
        let key_vars: Vec<VarId> = (0..256).map(VarId).collect();
        let sym = symbolic_round_keys(&key_vars, 16);
        assert_eq!(sym.len(), 17);
        for j in 0..32 {
            assert_eq!(sym[0][0].bits[j], BoolPoly::var(VarId(31 - j as u32)));
        }
        assert!(sym.iter().flatten().flat_map(|w| &w.bits).all(|p| p.degree() <= 1));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let key = random_key(&mut rng);
            let a = Assignment::from_pairs((0..256).map(|j| (VarId(j as u32), aradi::key_bit(&key, j))));
            let rks = aradi::key_schedule(&key);
            for (r, words) in sym.iter().enumerate() {
                for w in 0..4 {
                    assert_eq!(words[w].evaluate(&a).unwrap(), rks[r][w]);
                }
            }
        }
    }

    #[test]
    fn one_round_shape() {
        let cfg = ModelConfig::for_key(&[0; 8], 0, 1, false).unwrap();
        let m = build_system(&cfg).unwrap();
        assert_eq!(m.system.polys.len(), 672 + 128);
        assert_eq!(m.system.registry.len(), 256 + 128);
        assert_eq!(m.tags.len(), m.system.polys.len());
        assert_eq!(m.system.registry.name(VarId(0)), "s_w_1_0");
        assert_eq!(m.system.registry.name(m.key_vars[0]), "k0");
        assert_eq!(m.system.polys.iter().filter(|p| p.degree() == 1).count(), 128);
    }

    #[test]
    fn trace_consistency_and_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for rounds in [1, 2, 3] {
            for whitening in [false, true] {
                let key = random_key(&mut rng);
                let pt: u128 = rng.gen();
                let m = build_system(&ModelConfig::for_key(&key, pt, rounds, whitening).unwrap()).unwrap();
                let t = aradi::encrypt_traced(&key, pt, rounds).unwrap();
                let mut a = trace_assignment(&m, &t, &key).unwrap();
                assert_eq!(a.len(), 256 + 128 * rounds);
                assert!(m.system.polys.iter().all(|p| !p.evaluate(&a).unwrap()));
                assert_eq!(m.key_from_assignment(&a).unwrap(), key);

                let v = m.sbox_vars[rounds - 1][rng.gen_range(0..4)][rng.gen_range(0..32)];
                a.set(v, !a.get(v).unwrap());
                assert!(m.system.polys.iter().any(|p| p.evaluate(&a).unwrap()));
            }
        }
    }

    #[test]
    fn ciphertext_configuration() {
        let key: Key = [1, 2, 3, 4, 5, 6, 7, 8];
        let ct = aradi::encrypt(&key, 7, 2).unwrap();
        let rk = aradi::key_schedule(&key)[2];
        let a = ModelConfig::from_ciphertext(2, 7, ct, Some(rk));
        let b = ModelConfig::for_key(&key, 7, 2, false).unwrap();
        assert_eq!(a.target, b.target);
        assert_eq!(ModelConfig::from_ciphertext(2, 7, ct, None).target, ct);
    }

    #[test]
    fn trace_round_mismatch() {
        let m = build_system(&ModelConfig::for_key(&[0; 8], 0, 2, false).unwrap()).unwrap();
        let t = aradi::encrypt_traced(&[0; 8], 0, 3).unwrap();
        assert!(matches!(trace_assignment(&m, &t, &[0; 8]), Err(Error::RoundMismatch { trace: 3, model: 2 })));
    }

    #[test]
    fn anf_tags() {
        let m = build_system(&ModelConfig::for_key(&[0; 8], 0, 1, false).unwrap()).unwrap();
        let text = m.to_anf();
        let lines: Vec<&str> = text.lines().collect();
        let first = lines.iter().position(|l| l.starts_with("# tag")).unwrap();
        assert_eq!(lines[first], format!("# tag {} round=1 kind=sbox", first + 2));
        assert!(!lines.last().unwrap().is_empty());
        assert!(text.contains("kind=final"));
        let back = anf::parse_anf(&text).unwrap();
        assert_eq!(back.polys, m.system.polys);
    }
}
