//! Exact rationals, real-number codes as fast-converging Cauchy sequences of
//! rationals, the hat totalization, comparison verdicts, and finite-sequence
//! coding.
//!
//! A code `x` is a total program `k ↦ q_k` with `|q_n − q_{n+i}| < 2^{−n}`;
//! `[x](k) := q_k` is the k-th approximation. Equality `x =_ℝ y` is Π⁰₁ and
//! therefore only refutable: [`real_eq_upto`] returns sound `distinct`
//! witnesses and evidence-only `consistent_up_to` verdicts. No floating point
//! anywhere.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::BigUint;
use thiserror::Error;

/// Exact rational arithmetic. Wraps `BigRational`, which keeps numerator and
/// denominator reduced with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: u64) -> Rat {
        assert!(den > 0, "denominator must be positive");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// `2^{-k}` exactly.
    pub fn pow2_neg(k: u64) -> Rat {
        Rat(BigRational::new(
            BigInt::one(),
            BigInt::from(2u8).pow(k as u32),
        ))
    }

    /// `2^{1-k}` exactly (k may be 0).
    pub fn pow2_one_minus(k: u64) -> Rat {
        if k == 0 {
            Rat::from_int(2)
        } else {
            Rat(BigRational::new(
                BigInt::from(2u8),
                BigInt::from(2u8).pow(k as u32),
            ))
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        Rat(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl std::ops::Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        Rat(&self.0 / &rhs.0)
    }
}

impl std::ops::Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0.clone())
    }
}

// ---------------------------------------------------------------------------
// Real codes
// ---------------------------------------------------------------------------

/// A real-number code: a total, memoized program from indices to rationals
/// satisfying the fast-convergence discipline (enforced by [`hat`];
/// spot-checked, not assumed, for codes built directly).
#[derive(Clone)]
pub struct RealCode {
    program: Rc<dyn Fn(u64) -> Rat>,
    memo: Rc<RefCell<HashMap<u64, Rat>>>,
}

impl RealCode {
    /// Wraps `program` without totalization; the caller asserts fast
    /// convergence. Use [`hat`] for arbitrary raw sequences.
    pub fn from_program(program: impl Fn(u64) -> Rat + 'static) -> RealCode {
        RealCode {
            program: Rc::new(program),
            memo: Rc::new(RefCell::new(HashMap::new())),
        }
    }

    /// The constant code of a rational (trivially fast-converging).
    pub fn constant(q: Rat) -> RealCode {
        RealCode::from_program(move |_| q.clone())
    }

    /// `x - q` for a rational shift (fast convergence is preserved).
    pub fn shift_by(&self, q: &Rat) -> RealCode {
        let inner = self.clone();
        let q = q.clone();
        RealCode::from_program(move |k| &inner.approx(k) - &q)
    }

    /// `[x](k)`, the k-th rational approximation.
    pub fn approx(&self, k: u64) -> Rat {
        if let Some(q) = self.memo.borrow().get(&k) {
            return q.clone();
        }
        let q = (self.program)(k);
        self.memo.borrow_mut().insert(k, q.clone());
        q
    }
}

/// `[x](k) := q_k`.
pub fn approx(x: &RealCode, k: u64) -> Rat {
    x.approx(k)
}

/// Kohlenbach-style totalization: output(n) = raw(n) as long as the prefix
/// raw(0..=n) satisfies the pairwise fast-convergence bound; at the first
/// violation the code freezes at the last valid index. Idempotent on valid
/// codes.
pub fn hat(raw: impl Fn(u64) -> Rat + 'static) -> RealCode {
    let raw = Rc::new(raw);
    let state: Rc<RefCell<HatState>> = Rc::new(RefCell::new(HatState {
        checked_upto: 0,
        frozen_at: None,
        cache: vec![],
    }));
    RealCode::from_program(move |n| {
        let mut st = state.borrow_mut();
        st.extend_to(n, &*raw);
        st.value_at(n)
    })
}

struct HatState {
    /// indices < checked_upto are validated (or frozen)
    checked_upto: u64,
    /// Some(n0): the first violation happened at index n0+1
    frozen_at: Option<u64>,
    cache: Vec<Rat>,
}

impl HatState {
    fn extend_to(&mut self, n: u64, raw: &dyn Fn(u64) -> Rat) {
        while self.checked_upto <= n {
            if self.frozen_at.is_some() {
                return;
            }
            let j = self.checked_upto;
            let qj = raw(j);
            // pairwise check against all earlier entries: |q_i - q_j| < 2^{-i}
            let mut ok = true;
            for i in 0..j {
                let qi = &self.cache[i as usize];
                if (qi - &qj).abs() >= Rat::pow2_neg(i) {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.cache.push(qj);
                self.checked_upto = j + 1;
            } else {
                self.frozen_at = Some(j.saturating_sub(1));
                return;
            }
        }
    }

    fn value_at(&self, n: u64) -> Rat {
        match self.frozen_at {
            Some(n0) if n > n0 => self.cache[n0 as usize].clone(),
            _ => self.cache[(n as usize).min(self.cache.len() - 1)].clone(),
        }
    }
}

/// Verdict of an equality probe up to index K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqVerdict {
    ConsistentUpTo(u64),
    /// `|q_n − r_n| > 2^{1−n}`: a sound refutation of `x =_ℝ y`.
    Distinct { witness: u64 },
}

/// Checks `(∀n ≤ K)(|q_n − r_n| ≤ 2^{1−n})`; a violation soundly refutes
/// equality, a pass is evidence only.
pub fn real_eq_upto(x: &RealCode, y: &RealCode, k: u64) -> EqVerdict {
    for n in 0..=k {
        let d = (&x.approx(n) - &y.approx(n)).abs();
        if d > Rat::pow2_one_minus(n) {
            return EqVerdict::Distinct { witness: n };
        }
    }
    EqVerdict::ConsistentUpTo(k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtVerdict {
    /// `q_n + 2^{1−n} < r_n`, hence `x <_ℝ y`.
    Lt { witness: u64 },
    Unresolved,
}

/// Searches `n ≤ K` with `q_n + 2^{1−n} < r_n`.
pub fn real_lt_witness(x: &RealCode, y: &RealCode, k: u64) -> LtVerdict {
    for n in 0..=k {
        if &x.approx(n) + &Rat::pow2_one_minus(n) < y.approx(n) {
            return LtVerdict::Lt { witness: n };
        }
    }
    LtVerdict::Unresolved
}

// ---------------------------------------------------------------------------
// Finite sequences and their codes
// ---------------------------------------------------------------------------

/// A finite sequence of naturals together with its Gödel code.
///
/// Coding: `code(⟨⟩) = 0`, `code(s * ⟨x⟩) = pair(code(s), x) + 1` with the
/// Cantor pairing `pair(a, b) = (a+b)(a+b+1)/2 + b`. Codes grow fast, hence
/// the `BigUint`. Golden vectors live in the tests and the format chapter of
/// the book.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSeq {
    pub elements: Vec<u64>,
}

impl FinSeq {
    pub fn new(elements: Vec<u64>) -> FinSeq {
        FinSeq { elements }
    }

    pub fn empty() -> FinSeq {
        FinSeq { elements: vec![] }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn code(&self) -> BigUint {
        seq_encode(&self.elements)
    }
}

fn cantor_pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u8)) / 2u8 + b
}

fn cantor_unpair(p: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8p+1)-1)/2)
    let eight_p_plus_1 = p * 8u8 + 1u8;
    let r = eight_p_plus_1.sqrt();
    let w = (&r - 1u8) / 2u8;
    let t = (&w * (&w + 1u8)) / 2u8;
    let b = p - &t;
    let a = &w - &b;
    (a, b)
}

/// Natural-number code of a list.
pub fn seq_encode(elements: &[u64]) -> BigUint {
    let mut code = BigUint::zero();
    for &x in elements {
        code = cantor_pair(&code, &BigUint::from(x)) + 1u8;
    }
    code
}

/// Inverse of `seq_encode`.
pub fn seq_decode(code: &BigUint) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = code.clone();
    while !c.is_zero() {
        let (rest, last) = cantor_unpair(&(&c - 1u8));
        out.push(u64::try_from(&last).expect("element fits u64"));
        c = rest;
    }
    out.reverse();
    out
}

/// `s * t`: `(s*t)(i) = s(i)` for `i < |s|` and `(s*t)(j) = t(j − |s|)` for
/// the tail.
pub fn seq_concat(s: &FinSeq, t: &FinSeq) -> FinSeq {
    let mut elements = s.elements.clone();
    elements.extend_from_slice(&t.elements);
    FinSeq { elements }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("truncation length {n} exceeds sequence length {len}")]
    TruncBeyondLength { n: usize, len: usize },
}

/// `s̄N = ⟨s(0), …, s(N−1)⟩` on finite sequences; errors past the length.
pub fn seq_trunc(s: &FinSeq, n: usize) -> Result<FinSeq, SeqError> {
    if n > s.len() {
        return Err(SeqError::TruncBeyondLength { n, len: s.len() });
    }
    Ok(FinSeq::new(s.elements[..n].to_vec()))
}

/// `ᾱN` on streams, defined for any N.
pub fn stream_trunc(alpha: impl Fn(u64) -> u64, n: u64) -> FinSeq {
    FinSeq::new((0..n).map(alpha).collect())
}

// ---------------------------------------------------------------------------
// Rational codes for the term language (naturals <-> rationals)
// ---------------------------------------------------------------------------

/// Codes a rational as a natural: `pair(pair(sign, num), den−1)` with
/// sign ∈ {0,1}. Used by the reserved rational-comparison symbols in axiom
/// templates; the executable side of those symbols lives here.
pub fn rat_encode(q: &Rat) -> BigUint {
    let sign = if q.0.is_negative() { 1u8 } else { 0u8 };
    let num = q.numer().abs().to_biguint().expect("abs");
    let den = (q.denom().to_biguint().expect("positive denom")) - 1u8;
    cantor_pair(&cantor_pair(&BigUint::from(sign), &num), &den)
}

pub fn rat_decode(code: &BigUint) -> Rat {
    let (sn, den_m1) = cantor_unpair(code);
    let (sign, num) = cantor_unpair(&sn);
    let num = BigInt::from(num);
    let den = BigInt::from(den_m1 + 1u8);
    let num = if sign.is_zero() { num } else { -num };
    Rat(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> Rat {
        Rat::new(1, 3)
    }

    #[test]
    fn hat_keeps_valid_codes() {
        let x = hat(move |_| third());
        for k in [0, 1, 5, 20] {
            assert_eq!(approx(&x, k), third());
        }
    }

    #[test]
    fn hat_freezes_alternating() {
        // 0,1,0,1,... violates |q_0 - q_1| < 1 at index 1; freezes at 0
        let x = hat(|n| Rat::from_int((n % 2) as i64));
        for k in [0, 1, 2, 9] {
            assert_eq!(approx(&x, k), Rat::zero());
        }
    }

    #[test]
    fn hat_accepts_geometric_tail() {
        // q_n = 1/3 + 4^{-n}/8 converges fast enough strictly
        let x = hat(|n| {
            let tail = Rat(BigRational::new(
                BigInt::one(),
                BigInt::from(4u8).pow(n as u32) * 8,
            ));
            &third() + &tail
        });
        let q5 = approx(&x, 5);
        assert!((&q5 - &third()).abs() < Rat::pow2_neg(5));
        // untouched where valid: idempotence clause
        let expected = &third() + &Rat(BigRational::new(BigInt::one(), BigInt::from(4u8).pow(5) * 8));
        assert_eq!(q5, expected);
    }

    #[test]
    fn eq_and_lt_verdicts() {
        let zero = RealCode::constant(Rat::zero());
        let one = RealCode::constant(Rat::one());
        match real_eq_upto(&zero, &one, 10) {
            EqVerdict::Distinct { witness } => assert!(witness <= 2),
            other => panic!("expected distinct, got {other:?}"),
        }
        let t1 = RealCode::constant(third());
        // a different code of 1/3: truncated binary-ish approximations
        let t2 = hat(|n| {
            // round 1/3 to denominator 2^{n+2}
            let den = BigInt::from(2u8).pow(n as u32 + 2);
            let num = (&den + 1) / 3;
            Rat(BigRational::new(num, den))
        });
        assert_eq!(real_eq_upto(&t1, &t2, 64), EqVerdict::ConsistentUpTo(64));
        assert_eq!(real_eq_upto(&t1, &t1, 16), EqVerdict::ConsistentUpTo(16));

        match real_lt_witness(&zero, &one, 10) {
            LtVerdict::Lt { witness } => assert!(witness <= 3),
            other => panic!("expected lt, got {other:?}"),
        }
        assert_eq!(real_lt_witness(&t1, &t1, 20), LtVerdict::Unresolved);
        // 1/3 < 1/3 + 2^{-10} resolved once the margin clears
        let bump = &third() + &Rat::pow2_neg(10);
        let t3 = RealCode::constant(bump);
        assert!(matches!(real_lt_witness(&t1, &t3, 20), LtVerdict::Lt { .. }));
    }

    #[test]
    fn seq_golden_vectors() {
        assert_eq!(seq_encode(&[]), BigUint::zero());
        assert_eq!(seq_encode(&[0]), BigUint::from(1u8));
        assert_eq!(seq_encode(&[1]), BigUint::from(3u8));
        assert_eq!(seq_encode(&[0, 0]), BigUint::from(2u8));
        assert_eq!(seq_encode(&[1, 2]), BigUint::from(18u8));
        assert_eq!(seq_decode(&BigUint::from(18u8)), vec![1, 2]);
    }

    #[test]
    fn seq_ops() {
        let s = FinSeq::new(vec![1, 2]);
        let t = FinSeq::new(vec![3]);
        assert_eq!(seq_concat(&s, &t).elements, vec![1, 2, 3]);
        assert_eq!(FinSeq::empty().len(), 0);
        assert_eq!(seq_trunc(&FinSeq::new(vec![7, 8, 9]), 2).unwrap().elements, vec![7, 8]);
        assert!(seq_trunc(&t, 2).is_err());
        assert_eq!(stream_trunc(|n| n * n, 4).elements, vec![0, 1, 4, 9]);
    }

    #[test]
    fn rat_coding_round_trips() {
        for q in [Rat::zero(), Rat::one(), Rat::new(-7, 3), Rat::new(22, 7)] {
            assert_eq!(rat_decode(&rat_encode(&q)), q);
        }
    }
}
