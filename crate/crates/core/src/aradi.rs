//! Reference implementation of the ARADI block cipher.
//!
//! Conventions: a block is `W‖X‖Y‖Z` with `W` the most significant word; bit
//! `j` of a word is the coefficient of `2^j`; a word splits into halves
//! `(u, l)` = (bits 31..16, bits 15..0); rotations move bits toward higher
//! indices. The key is `K0‖…‖K7` with `K0` most significant, so key bit
//! `k_{32r+t}` is bit `31 - t` of `K_r`.


use crate::error::{Error, Result};

pub const ROUNDS: usize = 16;

/// Shift offsets `(a, b, c)` of the four linear maps.
pub const L_SHIFTS: [(u32, u32, u32); 4] = [(11, 8, 14), (10, 9, 11), (9, 4, 14), (8, 9, 7)];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct State {
    pub w: u32,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

pub type Key = [u32; 8];
pub type RoundKey = [u32; 4];

impl State {
    pub fn from_u128(v: u128) -> Self {
        State {
            w: (v >> 96) as u32,
            x: (v >> 64) as u32,
            y: (v >> 32) as u32,
            z: v as u32,
        }
    }

    pub fn to_u128(self) -> u128 {
        (self.w as u128) << 96 | (self.x as u128) << 64 | (self.y as u128) << 32 | self.z as u128
    }

    pub fn words(self) -> [u32; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_words(w: [u32; 4]) -> Self {
        State {
            w: w[0],
            x: w[1],
            y: w[2],
            z: w[3],
        }
    }

    fn xor_key(self, rk: &RoundKey) -> Self {
        State {
            w: self.w ^ rk[0],
            x: self.x ^ rk[1],
            y: self.y ^ rk[2],
            z: self.z ^ rk[3],
        }
    }
}

/// Left rotation of a `width`-bit word, `width` in {16, 32}.
pub fn rotl(w: u32, m: u32, width: u32) -> Result<u32> {
    if !(width == 16 || width == 32) || m >= width {
        return Err(Error::ShiftOutOfRange { shift: m, width });
    }
    Ok(if width == 32 {
        w.rotate_left(m)
    } else {
        (w as u16).rotate_left(m) as u32
    })
}

pub fn pi_layer(s: State) -> State {
    let State { mut w, mut x, mut y, mut z } = s;
    x ^= w & y;
    z ^= x & y;
    y ^= w & z;
    w ^= x & z;
    State { w, x, y, z }
}

pub fn pi_inverse(s: State) -> State {
    let State { mut w, mut x, mut y, mut z } = s;
    w ^= x & z;
    y ^= w & z;
    z ^= x & y;
    x ^= w & y;
    State { w, x, y, z }
}

/// The S-box acting on one bit slice: input nibble bits 0..3 are the bits of
/// `W, X, Y, Z` at a common position.
pub fn sbox(v: u8) -> u8 {
    let bit = |i: u8| ((v >> i) & 1) as u32;
    let s = pi_layer(State {
        w: bit(0),
        x: bit(1),
        y: bit(2),
        z: bit(3),
    });
    (s.w | s.x << 1 | s.y << 2 | s.z << 3) as u8
}

pub fn l_map(w: u32, a: u32, b: u32, c: u32) -> u32 {
    let u = (w >> 16) as u16;
    let l = w as u16;
    let u2 = u ^ u.rotate_left(a) ^ l.rotate_left(c);
    let l2 = l ^ l.rotate_left(a) ^ u.rotate_left(b);
    (u2 as u32) << 16 | l2 as u32
}

pub fn lambda_layer(s: State, i: usize) -> State {
    let (a, b, c) = L_SHIFTS[i % 4];
    State::from_words(s.words().map(|w| l_map(w, a, b, c)))
}

fn m0(a: u32, b: u32) -> (u32, u32) {
    let t = a.rotate_left(1) ^ b;
    (t, b.rotate_left(3) ^ t)
}

fn m1(a: u32, b: u32) -> (u32, u32) {
    let t = a.rotate_left(9) ^ b;
    (t, b.rotate_left(28) ^ t)
}

/// The constant mixed into `K7` by update step `i`.
pub fn round_counter(i: usize) -> u32 {
    i as u32
}

/// Update step `i` of the key registers.
pub fn key_update(k: &mut Key, i: usize) {
    if i.is_multiple_of(2) {
        (k[0], k[1]) = m0(k[0], k[1]);
        (k[4], k[5]) = m0(k[4], k[5]);
        k.swap(1, 2);
        k.swap(5, 6);
    } else {
        (k[2], k[3]) = m1(k[2], k[3]);
        (k[6], k[7]) = m1(k[6], k[7]);
        k.swap(1, 4);
        k.swap(3, 6);
    }
    k[7] ^= round_counter(i);
}

fn select(k: &Key, i: usize) -> RoundKey {
    let o = if i.is_multiple_of(2) { 0 } else { 4 };
    [k[o], k[o + 1], k[o + 2], k[o + 3]]
}

/// Round keys `RK^0 ..= RK^16`.
pub fn key_schedule(master: &Key) -> Vec<RoundKey> {
    let mut k = *master;
    let mut out = Vec::with_capacity(ROUNDS + 1);
    out.push(select(&k, 0));
    for i in 0..ROUNDS {
        key_update(&mut k, i);
        out.push(select(&k, i + 1));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrace {
    pub after_key: State,
    pub after_pi: State,
    pub after_lambda: State,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptionTrace {
    pub plaintext: State,
    pub rounds: Vec<RoundTrace>,
    pub round_keys: Vec<RoundKey>,
    pub ciphertext: State,
}

fn check_rounds(rounds: usize) -> Result<()> {
    if (1..=ROUNDS).contains(&rounds) {
        Ok(())
    } else {
        Err(Error::Rounds(rounds))
    }
}

/// `rounds` rounds of key addition, π and Λ, then whitening with
/// `RK^rounds`.
pub fn encrypt(key: &Key, pt: u128, rounds: usize) -> Result<u128> {
    Ok(encrypt_traced(key, pt, rounds)?.ciphertext.to_u128())
}

pub fn encrypt_traced(key: &Key, pt: u128, rounds: usize) -> Result<EncryptionTrace> {
    check_rounds(rounds)?;
    let rks = key_schedule(key);
    let mut s = State::from_u128(pt);
    let mut trace = Vec::with_capacity(rounds);
    for (i, rk) in rks.iter().enumerate().take(rounds) {
        let after_key = s.xor_key(rk);
        let after_pi = pi_layer(after_key);
        let after_lambda = lambda_layer(after_pi, i);
        trace.push(RoundTrace {
            after_key,
            after_pi,
            after_lambda,
        });
        s = after_lambda;
    }
    Ok(EncryptionTrace {
        plaintext: State::from_u128(pt),
        rounds: trace,
        ciphertext: s.xor_key(&rks[rounds]),
        round_keys: rks,
    })
}

pub fn decrypt(key: &Key, ct: u128, rounds: usize) -> Result<u128> {
    check_rounds(rounds)?;
    let rks = key_schedule(key);
    let mut s = State::from_u128(ct).xor_key(&rks[rounds]);
    for i in (0..rounds).rev() {
        s = pi_inverse(lambda_layer(s, i)).xor_key(&rks[i]);
    }
    Ok(s.to_u128())
}

/// Key from 64 hex digits, `K0` first.
pub fn parse_key(hex: &str) -> Result<Key> {
    let h = hex.trim();
    if h.len() != 64 || !h.bytes().all(|c| c.is_ascii_hexdigit()) {
        return Err(Error::Hex(hex.to_string()));
    }
    let mut k = [0u32; 8];
    for (r, word) in k.iter_mut().enumerate() {
        *word = u32::from_str_radix(&h[8 * r..8 * r + 8], 16).map_err(|_| Error::Hex(hex.to_string()))?;
    }
    Ok(k)
}

/// Block from 32 hex digits, `W` first.
pub fn parse_block(hex: &str) -> Result<u128> {
    let h = hex.trim();
    if h.len() != 32 || !h.bytes().all(|c| c.is_ascii_hexdigit()) {
        return Err(Error::Hex(hex.to_string()));
    }
    u128::from_str_radix(h, 16).map_err(|_| Error::Hex(hex.to_string()))
}

pub fn key_hex(k: &Key) -> String {
    k.iter().map(|w| format!("{w:08x}")).collect()
}

pub fn block_hex(b: u128) -> String {
    format!("{b:032x}")
}

/// Key bit `k_j` in the packing above.
pub fn key_bit(k: &Key, j: usize) -> bool {
    k[j / 32] >> (31 - j % 32) & 1 == 1
}

pub fn key_from_bits(bits: &[bool]) -> Key {
    assert_eq!(bits.len(), 256);
    let mut k = [0u32; 8];
    for (j, &b) in bits.iter().enumerate() {
        if b {
            k[j / 32] |= 1 << (31 - j % 32);
        }
    }
    k
}

fn state_json(s: &State) -> serde_json::Value {
    serde_json::Value::String(block_hex(s.to_u128()))
}

/// Trace as JSON with every block and round key in hex.
pub fn trace_json(t: &EncryptionTrace) -> serde_json::Value {
    use serde_json::json;
    json!({
        "rounds": t.rounds.len(),
        "plaintext": state_json(&t.plaintext),
        "ciphertext": state_json(&t.ciphertext),
        "round_keys": t.round_keys.iter().map(|rk| rk.iter().map(|w| format!("{w:08x}")).collect::<String>()).collect::<Vec<_>>(),
        "trace": t.rounds.iter().enumerate().map(|(i, r)| json!({
            "round": i,
            "after_key_add": state_json(&r.after_key),
            "after_pi": state_json(&r.after_pi),
            "after_lambda": state_json(&r.after_lambda),
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation() {
        assert_eq!(rotl(0x0001, 1, 16).unwrap(), 0x0002);
        assert_eq!(rotl(0x8000, 1, 16).unwrap(), 0x0001);
        assert_eq!(rotl(0x8000_0000, 1, 32).unwrap(), 1);
        assert!(rotl(1, 16, 16).is_err());
        assert!(rotl(1, 32, 32).is_err());
        assert!(rotl(1, 1, 8).is_err());
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi_layer(State::default()), State::default());
        let mut seen = [false; 16];
        for v in 0..16 {
            seen[sbox(v) as usize] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn lambda_constants() {
        let s = State::from_u128(0x0123_4567_89ab_cdef_0f1e_2d3c_4b5a_6978);
        assert_eq!(lambda_layer(s, 4), lambda_layer(s, 0));
        assert_eq!(lambda_layer(s, 0).w, l_map(s.w, 11, 8, 14));
        assert_eq!(l_map(0, 11, 8, 14), 0);
    }

    #[test]
    fn l_map_involution_bulk() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(a, b, c) in &L_SHIFTS {
            for _ in 0..10_000 {
                let w: u32 = rng.gen();
                assert_eq!(l_map(l_map(w, a, b, c), a, b, c), w);
            }
        }
    }

    #[test]
    fn first_round_key_is_key_prefix() {
        let k: Key = [1, 2, 3, 4, 5, 6, 7, 8];
        let rks = key_schedule(&k);
        assert_eq!(rks.len(), 17);
        assert_eq!(rks[0], [1, 2, 3, 4]);
    }

    #[test]
    fn hex_round_trip() {
        let k = parse_key("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f").unwrap();
        assert_eq!(k[0], 0x0001_0203);
        assert_eq!(k[7], 0x1c1d_1e1f);
        assert_eq!(key_hex(&k), "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
        assert!(key_bit(&[0x8000_0000, 0, 0, 0, 0, 0, 0, 0], 0));
        assert!(key_bit(&[0, 1, 0, 0, 0, 0, 0, 0], 63));
        assert!(parse_key("00").is_err());
        assert!(parse_block(&"g".repeat(32)).is_err());
        assert_eq!(block_hex(parse_block("0123456789abcdef0123456789ABCDEF").unwrap()), "0123456789abcdef0123456789abcdef");
    }

    #[test]
    fn rejects_bad_round_counts() {
        assert!(encrypt(&[0; 8], 0, 0).is_err());
        assert!(encrypt(&[0; 8], 0, 17).is_err());
        assert!(decrypt(&[0; 8], 0, 17).is_err());
    }

    #[test]
    fn trace_replays_to_ciphertext() {
        let k: Key = [9, 8, 7, 6, 5, 4, 3, 2];
        let t = encrypt_traced(&k, 42, 5).unwrap();
        assert_eq!(t.rounds.len(), 5);
        let mut s = t.plaintext;
        for (i, r) in t.rounds.iter().enumerate() {
            assert_eq!(s.xor_key(&t.round_keys[i]), r.after_key);
            s = lambda_layer(pi_layer(r.after_key), i);
            assert_eq!(s, r.after_lambda);
        }
        assert_eq!(s.xor_key(&t.round_keys[5]), t.ciphertext);
        let j = trace_json(&t);
        assert_eq!(j["trace"].as_array().unwrap().len(), 5);
    }

    fn arb_key() -> impl Strategy<Value = Key> {
        proptest::array::uniform8(any::<u32>())
    }

    proptest! {
        #[test]
        fn round_trip(k in arb_key(), pt in any::<u128>(), r in 1usize..=16) {
            let ct = encrypt(&k, pt, r).unwrap();
            prop_assert_eq!(decrypt(&k, ct, r).unwrap(), pt);
        }

        #[test]
        fn pi_inverts(v in any::<u128>()) {
            let s = State::from_u128(v);
            prop_assert_eq!(pi_inverse(pi_layer(s)), s);
        }

        #[test]
        fn rotation_inverse(w in any::<u32>(), m in 1u32..16) {
            prop_assert_eq!(rotl(rotl(w & 0xffff, m, 16).unwrap(), 16 - m, 16).unwrap(), w & 0xffff);
            prop_assert_eq!(rotl(w, 0, 32).unwrap(), w);
        }

        #[test]
        fn l_map_linear(u in any::<u32>(), v in any::<u32>(), i in 0usize..4) {
            let (a, b, c) = L_SHIFTS[i];
            prop_assert_eq!(l_map(u ^ v, a, b, c), l_map(u, a, b, c) ^ l_map(v, a, b, c));
        }

        #[test]
        fn key_schedule_affine(k1 in arb_key(), k2 in arb_key()) {
            let x: Key = std::array::from_fn(|i| k1[i] ^ k2[i]);
            let (s0, s1, s2, sx) = (key_schedule(&[0; 8]), key_schedule(&k1), key_schedule(&k2), key_schedule(&x));
            for r in 0..=ROUNDS {
                for w in 0..4 {
                    prop_assert_eq!(sx[r][w] ^ s0[r][w], (s1[r][w] ^ s0[r][w]) ^ (s2[r][w] ^ s0[r][w]));
                }
            }
        }

        #[test]
        fn plaintext_bit_flip_changes_ciphertext(k in arb_key(), pt in any::<u128>(), bit in 0u32..128) {
            prop_assert_ne!(encrypt(&k, pt, 16).unwrap(), encrypt(&k, pt ^ 1 << bit, 16).unwrap());
        }
    }
}
