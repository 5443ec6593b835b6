//! Finite sequences of naturals, their prime-power codes, and the pairing
//! maps used by the address systems.
//!
//! A sequence u = (u_0, ..., u_{n-1}) is coded as the natural
//! prod_{i<n} p_i^{u_i + 1} with p_i the i-th prime; the empty sequence
//! codes as 1. Codes are arbitrary-precision, but the coding grows fast:
//! intended use is length <= 8 with entries <= 8.

use std::cmp::Ordering;

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{BigInt, One, Zero};

use crate::error::{Error, Result};

/// A finite sequence of naturals. The empty vector is the empty sequence.
pub type FinSeq = Vec<u64>;

/// True iff u is a (not necessarily proper) prefix of v.
pub fn is_prefix(u: &[u64], v: &[u64]) -> bool {
    u.len() <= v.len() && u.iter().zip(v.iter()).all(|(a, b)| a == b)
}

/// Pointwise comparison on the common length: c(i) <= u(i) for all
/// i < min(lh(c), lh(u)). Vacuously true when either is empty.
pub fn preceq(c: &[u64], u: &[u64]) -> bool {
    c.iter().zip(u.iter()).all(|(a, b)| a <= b)
}

/// First `n` primes.
pub fn primes(n: usize) -> Vec<u64> {
    let mut ps: Vec<u64> = Vec::with_capacity(n);
    let mut cand: u64 = 2;
    while ps.len() < n {
        if ps.iter().take_while(|p| *p * *p <= cand).all(|p| cand % p != 0) {
            ps.push(cand);
        }
        cand += 1;
    }
    ps
}

const MAX_ENCODE_LEN: usize = 64;
const MAX_ENCODE_ENTRY: u64 = 1 << 20;

/// Prime-power code of a finite sequence: prod p_i^{u_i+1}, empty -> 1.
pub fn encode_seq(u: &[u64]) -> Result<BigUint> {
    if u.len() > MAX_ENCODE_LEN {
        return Err(Error::InputTooLarge(format!("sequence length {}", u.len())));
    }
    if let Some(e) = u.iter().find(|e| **e > MAX_ENCODE_ENTRY) {
        return Err(Error::InputTooLarge(format!("sequence entry {e}")));
    }
    let ps = primes(u.len());
    let mut acc = BigUint::one();
    for (i, &e) in u.iter().enumerate() {
        acc *= BigUint::from(ps[i]).pow(e as u32 + 1);
    }
    Ok(acc)
}

/// Inverse of [`encode_seq`] where defined: factor out p_0, p_1, ... in
/// order; the input is a code iff the exponents are positive on an initial
/// segment of the primes and nothing is left over.
pub fn decode_seq(s: &BigUint) -> Option<FinSeq> {
    if s.is_zero() {
        return None;
    }
    let mut rest = s.clone();
    let mut out: FinSeq = Vec::new();
    let mut i = 0usize;
    while !rest.is_one() {
        let p = BigUint::from(primes(i + 1)[i]);
        let mut e = 0u64;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e == 0 {
            // A prime beyond the contiguous block still divides the rest.
            return None;
        }
        out.push(e - 1);
        i += 1;
    }
    Some(out)
}

/// Component access (s)_i: the i-th entry of the decoded sequence, or 0
/// when i is out of range or s is not a code.
pub fn component(s: &BigUint, i: usize) -> u64 {
    decode_seq(s).and_then(|u| u.get(i).copied()).unwrap_or(0)
}

/// The enumeration s -> (s)_0 / ((s)_1 + 1) of the non-negative rationals.
pub fn rational_enum(s: &BigUint) -> BigRational {
    let num = BigInt::from(component(s, 0));
    let den = BigInt::from(component(s, 1) + 1);
    BigRational::new(num, den)
}

/// Kleene-Brouwer comparison: u comes before v iff u properly extends v,
/// or at the first index where they differ u has the smaller entry.
pub fn kb_compare(u: &[u64], v: &[u64]) -> Ordering {
    for (a, b) in u.iter().zip(v.iter()) {
        match a.cmp(b) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    // One is a prefix of the other; the longer one is smaller.
    v.len().cmp(&u.len())
}

/// Cantor pair (a+b)(a+b+1)/2 + b.
pub fn cantor_pair(a: u64, b: u64) -> u64 {
    let s = a + b;
    s * (s + 1) / 2 + b
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(z: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= z.
    let mut s = ((((8u128 * z as u128 + 1) as f64).sqrt() as u64).saturating_sub(1)) / 2;
    while (s + 1) * (s + 2) / 2 <= z {
        s += 1;
    }
    while s * (s + 1) / 2 > z {
        s -= 1;
    }
    let b = z - s * (s + 1) / 2;
    (s - b, b)
}

/// Iterated Cantor pairing of an N-tuple, right-associated:
/// (t_0, t_1, ..., t_{N-1}) -> pair(t_0, pair(t_1, ...)). For N = 1 this
/// is the identity.
pub fn pair_tuple(t: &[u64]) -> u64 {
    match t {
        [] => 0,
        [x] => *x,
        [x, rest @ ..] => cantor_pair(*x, pair_tuple(rest)),
    }
}

/// Inverse of [`pair_tuple`] at width n.
pub fn unpair_tuple(z: u64, n: usize) -> Vec<u64> {
    match n {
        0 => Vec::new(),
        1 => vec![z],
        _ => {
            let (a, rest) = cantor_unpair(z);
            let mut out = vec![a];
            out.extend(unpair_tuple(rest, n - 1));
            out
        }
    }
}

/// Componentwise pairing of two equal-length sequences.
pub fn pair_seqs(u: &[u64], v: &[u64]) -> Result<FinSeq> {
    if u.len() != v.len() {
        return Err(Error::Precondition(format!(
            "paired sequences must have equal length: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(u.iter().zip(v.iter()).map(|(a, b)| cantor_pair(*a, *b)).collect())
}

/// Componentwise unpairing: the two coordinate sequences of a paired one.
pub fn split_seq(w: &[u64]) -> (FinSeq, FinSeq) {
    let mut u = Vec::with_capacity(w.len());
    let mut v = Vec::with_capacity(w.len());
    for &z in w {
        let (a, b) = cantor_unpair(z);
        u.push(a);
        v.push(b);
    }
    (u, v)
}
