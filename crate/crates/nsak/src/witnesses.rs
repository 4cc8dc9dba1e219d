//! Executable forms of the concrete constructions of the theory,
//! parameterized by a finite nonstandardness scale N. Every guarantee
//! degrades explicitly in 1/N or 2^{−N}.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::rc::Rc;

use thiserror::Error;

use crate::reals::{approx, Rat, RealCode};

/// The finite stand-in for "nonstandard N".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NScale(pub u64);

impl NScale {
    pub fn new(n: u64) -> NScale {
        assert!(n >= 1, "nonstandardness scale must be >= 1");
        NScale(n)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("input is not a binary tree: {0}")]
    NotABinaryTree(String),
    #[error("leaf enumeration cap exceeded: N = {n} > {cap}")]
    CapExceeded { n: u64, cap: u64 },
    #[error("functional queried index {index} outside {{0..{bound}}}: not N-determined")]
    NotNDetermined { index: u64, bound: u64 },
}

// ---------------------------------------------------------------------------
// Type-two functionals with query logs
// ---------------------------------------------------------------------------

/// A total map from infinite 0-sequences to naturals. Each call inspects only
/// finitely many oracle values; [`Functional2::call_logged`] reports the
/// inspected support.
#[derive(Clone)]
pub struct Functional2 {
    f: Rc<dyn Fn(&dyn Fn(u64) -> u64) -> u64>,
}

impl Functional2 {
    pub fn new(f: impl Fn(&dyn Fn(u64) -> u64) -> u64 + 'static) -> Functional2 {
        Functional2 { f: Rc::new(f) }
    }

    pub fn constant(c: u64) -> Functional2 {
        Functional2::new(move |_| c)
    }

    /// Plain call; oracle queries are memoized for the duration of the call.
    pub fn call(&self, oracle: &dyn Fn(u64) -> u64) -> u64 {
        self.call_logged(oracle).0
    }

    /// Call with the set of queried indices.
    pub fn call_logged(&self, oracle: &dyn Fn(u64) -> u64) -> (u64, BTreeSet<u64>) {
        let memo: RefCell<std::collections::HashMap<u64, u64>> =
            RefCell::new(std::collections::HashMap::new());
        let log: RefCell<BTreeSet<u64>> = RefCell::new(BTreeSet::new());
        let wrapped = |n: u64| -> u64 {
            if let Some(v) = memo.borrow().get(&n) {
                return *v;
            }
            let v = oracle(n);
            memo.borrow_mut().insert(n, v);
            log.borrow_mut().insert(n);
            v
        };
        let out = (self.f)(&wrapped);
        (out, log.into_inner())
    }
}

/// An infinite 0-sequence given as a host function.
pub type Stream = Rc<dyn Fn(u64) -> u64>;

/// The stream `σ * 0^ω` for a finite prefix.
pub fn prefix_then_zeros(prefix: &[u64]) -> Stream {
    let p = prefix.to_vec();
    Rc::new(move |n| if (n as usize) < p.len() { p[n as usize] } else { 0 })
}

// ---------------------------------------------------------------------------
// The discontinuity witness
// ---------------------------------------------------------------------------

/// The zero-detecting functional at scale N: `0` if some `f(n) = 0` with
/// `n <= N+1`, else `1`. Support is contained in `{0..N+1}`.
pub fn y0(scale: NScale) -> Functional2 {
    let n = scale.0;
    Functional2::new(move |f| {
        for i in 0..=n + 1 {
            if f(i) == 0 {
                return 0;
            }
        }
        1
    })
}

/// The pair separated by [`y0`]: `f0` all ones, `g0` equal to `f0` on the
/// first N values and zero from index N on.
pub struct CounterexamplePair {
    pub f0: Stream,
    pub g0: Stream,
    pub agreement: u64,
}

pub fn counterexample_pair(scale: NScale) -> CounterexamplePair {
    let n = scale.0;
    CounterexamplePair {
        f0: Rc::new(|_| 1),
        g0: Rc::new(move |i| u64::from(i < n)),
        agreement: n,
    }
}

/// The sign transform `Z`: `Z(f)(n) = 0` iff `f(n) = 0`, else `1`; the output
/// is a binary sequence whatever `f` is.
pub fn z_transform(f: Stream) -> Stream {
    Rc::new(move |n| u64::from(f(n) != 0))
}

// ---------------------------------------------------------------------------
// Real-number side: sign functional, binary digits, standard part
// ---------------------------------------------------------------------------

/// The sign functional at scale N: `Φ(x) = 0` if `[x](N) <= 1/N`, else `1`.
///
/// Quantitatively: `Φ(x) = 0` implies `x <= 1/N + 2^{−N}`, and `Φ(x) = 1`
/// implies `x > 1/N − 2^{−N} >= −2^{−N}`.
pub fn phi_sign(scale: NScale) -> impl Fn(&RealCode) -> u64 {
    let n = scale.0;
    move |x: &RealCode| {
        let threshold = Rat::new(1, n);
        if approx(x, n) <= threshold {
            0
        } else {
            1
        }
    }
}

/// Interval-halving binary approximation: bit k is `Φ(x − midpoint_k)`.
/// Dyadic-midpoint ties resolve toward bit 0 (the weak inequality in Φ).
///
/// With `m = Σ_{i<n} b_i·2^{−(i+1)}`: `|x − m| <= 2^{−n} + 2(1/N + 2^{−N})`
/// for `x ∈ [0,1]`.
pub fn binary_digits(x: &RealCode, n_digits: u64, scale: NScale) -> Vec<u8> {
    let phi = phi_sign(scale);
    let mut bits = Vec::with_capacity(n_digits as usize);
    let mut partial = Rat::zero(); // Σ b_i / 2^{i+1}
    for k in 0..n_digits {
        let midpoint = &partial + &Rat::pow2_neg(k + 1);
        let b = phi(&x.shift_by(&midpoint));
        bits.push(b as u8);
        if b == 1 {
            partial = midpoint;
        }
    }
    bits
}

/// Exact value of the partial sum `Σ_{i<n} b_i·2^{−(i+1)}`.
pub fn digits_value(bits: &[u8]) -> Rat {
    let mut acc = Rat::zero();
    for (i, &b) in bits.iter().enumerate() {
        if b == 1 {
            acc = &acc + &Rat::pow2_neg(i as u64 + 1);
        }
    }
    acc
}

/// The exact binary expansion oracle for rationals in [0, 1]: bit k is 1 iff
/// `x >= midpoint` at that interval-halving step.
pub fn exact_expansion(x: &Rat, n_digits: u64) -> Vec<u8> {
    let mut bits = Vec::with_capacity(n_digits as usize);
    let mut lo = Rat::zero();
    for k in 0..n_digits {
        let mid = &lo + &Rat::pow2_neg(k + 1);
        if *x >= mid {
            bits.push(1);
            lo = mid;
        } else {
            bits.push(0);
        }
    }
    bits
}

/// Result of [`standard_part`]: the standard binary code and its exact value.
pub struct StandardPart {
    /// v(x, N): the digit stream, all zeros when the guard rejects x.
    pub digits: Vec<u8>,
    /// u(x, N) as a real code: partial sums Σ_{i<=n} digits(i)/2^{i+1}.
    pub code: RealCode,
    /// The exact value of the (eventually constant) sum.
    pub value: Rat,
    /// Whether the guard band `−1/N <= [x](min(2^N, 2^cap)) <= 1 + 1/N` held.
    pub in_guard: bool,
    /// The guard index actually queried.
    pub guard_index: u64,
}

/// The standard-part map `u(x, N) = w(v(x, N))` with `w(α)(n) =
/// Σ_{i<=n} α(i)/2^{i+1}`. For `x ∈ [0,1]`: `|u(x,N) − x| <= 4/N`. Outside
/// the guard band the result is the code of 0.
///
/// The guard queries `[x](2^N)`; since that index overflows quickly it is
/// capped at `2^cap_exp` (default 60), adding a `2^{−cap}` term that is
/// absorbed by the stated bound.
pub fn standard_part(x: &RealCode, scale: NScale, cap_exp: u32) -> StandardPart {
    let n = scale.0;
    let guard_index = if n >= cap_exp as u64 {
        1u64 << cap_exp
    } else {
        1u64 << n
    };
    let probe = approx(x, guard_index);
    let band = Rat::new(1, n);
    let in_guard = probe >= (&Rat::zero() - &band) && probe <= (&Rat::one() + &band);
    let digits: Vec<u8> = if in_guard {
        binary_digits(x, n + 1, scale)
    } else {
        vec![0; (n + 1) as usize]
    };
    let value = digits_value(&digits);
    let code = {
        let ds = digits.clone();
        RealCode::from_program(move |k| {
            let upto = ((k + 1) as usize).min(ds.len());
            digits_value(&ds[..upto])
        })
    };
    StandardPart {
        digits,
        code,
        value,
        in_guard,
        guard_index,
    }
}

/// `s(Y, N)(f) = Y(f̄N * 00…)` if `f̄N` is binary, else `n0`. The result's
/// support is contained in `{0..N−1}`.
pub fn functional_standard_part(y: &Functional2, scale: NScale, n0: u64) -> Functional2 {
    let n = scale.0;
    let y = y.clone();
    Functional2::new(move |f| {
        let prefix: Vec<u64> = (0..n).map(f).collect();
        if prefix.iter().any(|&b| b > 1) {
            return n0;
        }
        let trunc = prefix_then_zeros(&prefix);
        y.call(&*trunc)
    })
}

/// Checks per call whether `Y`'s value on the truncation was determined by
/// the first N bits (the query log stayed below N).
pub fn functional_standard_part_checked(
    y: &Functional2,
    scale: NScale,
    n0: u64,
    f: &dyn Fn(u64) -> u64,
) -> (u64, bool) {
    let n = scale.0;
    let prefix: Vec<u64> = (0..n).map(f).collect();
    if prefix.iter().any(|&b| b > 1) {
        return (n0, true);
    }
    let trunc = prefix_then_zeros(&prefix);
    let (out, log) = y.call_logged(&*trunc);
    let determined = log.iter().all(|&q| q < n);
    (out, determined)
}

// ---------------------------------------------------------------------------
// Binary trees: WKL path and the Heine-Borel cover
// ---------------------------------------------------------------------------

/// A finite set of finite binary sequences.
pub type Tree = BTreeSet<Vec<u8>>;

/// Prefix-closed with binary entries?
pub fn is_binary_tree(t: &Tree) -> bool {
    for s in t {
        if s.iter().any(|&b| b > 1) {
            return false;
        }
        if !s.is_empty() && !t.contains(&s[..s.len() - 1].to_vec()) {
            return false;
        }
    }
    true
}

/// The left-most binary sequence of maximal length `<= N` in `t`, extended by
/// zeros; the all-zero stream when `t` is empty.
pub fn wkl_path(t: &Tree, scale: NScale) -> Result<Stream, WitnessError> {
    if !is_binary_tree(t) {
        return Err(WitnessError::NotABinaryTree(
            "not prefix-closed or non-binary entries".into(),
        ));
    }
    let n = scale.0 as usize;
    let max_len = t.iter().map(|s| s.len().min(n)).max().unwrap_or(0);
    let leftmost = t
        .iter()
        .filter(|s| s.len() == max_len)
        .min()
        .cloned()
        .unwrap_or_default();
    let prefix: Vec<u64> = leftmost.iter().map(|&b| b as u64).collect();
    Ok(prefix_then_zeros(&prefix))
}

/// Depth of the deepest node.
pub fn tree_depth(t: &Tree) -> usize {
    t.iter().map(Vec::len).max().unwrap_or(0)
}

/// Outcome of the canonical-cover search at depth N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverOutcome {
    /// One cylinder per length-N leaf σ: the pair (σ, G(σ*0ω)).
    Cover(Vec<(Vec<u8>, u64)>),
    /// Some leaf's radius exceeds N.
    Insufficient { n: u64, offending_leaf: Vec<u8> },
}

/// Enumerates the 2^N leaves `β_σ = σ*00…`; a cover exists iff
/// `max_σ G(β_σ) <= N`, and then every binary f lies in the cylinder
/// `[β̄_σ G(β_σ)]` for σ = f̄N.
pub fn hbu_cover(g: &Functional2, n: u64, cap: u64) -> Result<CoverOutcome, WitnessError> {
    if n > cap {
        return Err(WitnessError::CapExceeded { n, cap });
    }
    let mut cover = Vec::with_capacity(1usize << n);
    for leaf in 0..(1u64 << n) {
        let sigma: Vec<u8> = (0..n).map(|i| ((leaf >> i) & 1) as u8).collect();
        let beta = prefix_then_zeros(&sigma.iter().map(|&b| b as u64).collect::<Vec<_>>());
        let radius = g.call(&*beta);
        if radius > n {
            return Ok(CoverOutcome::Insufficient {
                n,
                offending_leaf: sigma,
            });
        }
        cover.push((sigma, radius));
    }
    Ok(CoverOutcome::Cover(cover))
}

/// First N (tested in the doubling order 0, 1, 2, 4, 8, …) with a cover.
pub fn find_cover(
    g: &Functional2,
    n_max: u64,
    cap: u64,
) -> Result<Option<(u64, Vec<(Vec<u8>, u64)>)>, WitnessError> {
    let mut n = 0u64;
    loop {
        if n > n_max {
            return Ok(None);
        }
        match hbu_cover(g, n, cap)? {
            CoverOutcome::Cover(c) => return Ok(Some((n, c))),
            CoverOutcome::Insufficient { .. } => {}
        }
        n = if n == 0 { 1 } else { n * 2 };
    }
}

/// Max of `Y(σ*0^ω)` over all 2^N binary σ of length N; errors if a query
/// leaves `{0..N−1}`.
pub fn sup_on_cantor(y: &Functional2, n: u64, cap: u64) -> Result<u64, WitnessError> {
    if n > cap {
        return Err(WitnessError::CapExceeded { n, cap });
    }
    let mut best = 0u64;
    for leaf in 0..(1u64 << n) {
        let sigma: Vec<u64> = (0..n).map(|i| (leaf >> i) & 1).collect();
        let beta = prefix_then_zeros(&sigma);
        let (v, log) = y.call_logged(&*beta);
        if let Some(&bad) = log.iter().find(|&&q| q >= n) {
            return Err(WitnessError::NotNDetermined { index: bad, bound: n });
        }
        best = best.max(v);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Church's thesis diagonal and the machine-step interface
// ---------------------------------------------------------------------------

/// A decidable halting-step predicate: `step(e, n, s)` reports the output if
/// machine `e` on input `n` halts within `s` steps. Monotone in `s`;
/// `step(e, n, 0)` never reports halted.
pub trait MachineStep {
    fn step(&self, e: u64, n: u64, s: u64) -> Option<u64>;
    /// Number of machine indices in the shipped table.
    fn machines(&self) -> u64;
}

/// The diagonal at scale N: `f0(e) = 1` iff machine `e` on input `e` halts
/// within N steps with output 0.
pub fn ct_diagonal<'a>(scale: NScale, machines: &'a dyn MachineStep) -> impl Fn(u64) -> u64 + 'a {
    let n = scale.0;
    move |e: u64| match machines.step(e, e, n) {
        Some(0) => 1,
        _ => 0,
    }
}

/// A tiny register machine: finitely many registers, increment /
/// decrement-or-jump / halt. The shipped program table is the interface; any
/// universal model works.
pub mod machine {
    use super::MachineStep;

    /// Instructions over registers r0, r1, ...
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Instr {
        /// rX += 1
        Inc(usize),
        /// if rX == 0 jump to L else rX -= 1
        DecJz(usize, usize),
        Halt,
    }

    #[derive(Debug, Clone)]
    pub struct Program(pub Vec<Instr>);

    /// Runs `prog` with r0 = input for at most `steps` steps; the output is
    /// r1 at the halt.
    pub fn run(prog: &Program, input: u64, steps: u64) -> Option<u64> {
        let mut regs = [0u64; 4];
        regs[0] = input;
        let mut pc = 0usize;
        for _ in 0..steps {
            match prog.0.get(pc) {
                None | Some(Instr::Halt) => return Some(regs[1]),
                Some(Instr::Inc(r)) => {
                    regs[*r] += 1;
                    pc += 1;
                }
                Some(Instr::DecJz(r, l)) => {
                    if regs[*r] == 0 {
                        pc = *l;
                    } else {
                        regs[*r] -= 1;
                        pc += 1;
                    }
                }
            }
        }
        None
    }

    /// The shipped table of 16 toy machines. Index 0 immediately outputs 0;
    /// index 1 loops forever; the rest compute small arithmetic so the
    /// diagonal has varied behaviour.
    pub struct ToyTable {
        programs: Vec<Program>,
    }

    impl Default for ToyTable {
        fn default() -> ToyTable {
            use Instr::*;
            let programs = vec![
                // 0: output 0 immediately
                Program(vec![Halt]),
                // 1: tight loop, never halts (r2 stays 0)
                Program(vec![DecJz(2, 0)]),
                // 2: output 1
                Program(vec![Inc(1), Halt]),
                // 3: identity (move r0 to r1)
                Program(vec![DecJz(0, 3), Inc(1), DecJz(3, 0), Halt]),
                // 4: constant 0 after burning the input
                Program(vec![DecJz(0, 2), DecJz(3, 0), Halt]),
                // 5: output 2
                Program(vec![Inc(1), Inc(1), Halt]),
                // 6: double the input
                Program(vec![DecJz(0, 4), Inc(1), Inc(1), DecJz(3, 0), Halt]),
                // 7: diverge unless input is 0, then output 0
                Program(vec![DecJz(0, 3), Inc(0), DecJz(3, 0), Halt]),
                // 8: successor
                Program(vec![Inc(1), DecJz(0, 4), Inc(1), DecJz(3, 1), Halt]),
                // 9: output 0 after a short burn
                Program(vec![Inc(2), DecJz(2, 2), Halt]),
                // 10: 1 iff input odd
                Program(vec![
                    DecJz(0, 5),
                    DecJz(0, 4),
                    DecJz(3, 0),
                    Halt,
                    Inc(1),
                    Halt,
                ]),
                // 11: predecessor
                Program(vec![
                    DecJz(0, 5),
                    DecJz(0, 5),
                    Inc(1),
                    DecJz(3, 1),
                    Halt,
                    Halt,
                ]),
                // 12: output 0 after two bounces
                Program(vec![Inc(2), DecJz(2, 2), DecJz(3, 3), Halt]),
                // 13: halts iff input nonzero, outputs 0
                Program(vec![DecJz(0, 1), Halt, Inc(2), DecJz(3, 2)]),
                // 14: output 3
                Program(vec![Inc(1), Inc(1), Inc(1), Halt]),
                // 15: diverge on 0, output 0 otherwise
                Program(vec![DecJz(0, 2), Halt, DecJz(3, 2)]),
            ];
            ToyTable { programs }
        }
    }

    impl MachineStep for ToyTable {
        fn step(&self, e: u64, n: u64, s: u64) -> Option<u64> {
            if s == 0 {
                return None;
            }
            self.programs.get(e as usize).and_then(|p| run(p, n, s))
        }

        fn machines(&self) -> u64 {
            self.programs.len() as u64
        }
    }
}

// ---------------------------------------------------------------------------
// Arithmetical-comprehension refuter and the Kripke construction
// ---------------------------------------------------------------------------

/// `f0(n, m) = 0` iff `m > h0(n)`: every row has a zero with least witness
/// `h0(n)+1`, while no `m <= h0(n)` works.
pub fn aca_refuter(h0: impl Fn(u64) -> u64 + 'static) -> impl Fn(u64, u64) -> u64 {
    move |n, m| u64::from(m <= h0(n))
}

/// Output of [`kripke_gamma`].
pub struct KripkeGamma {
    pub g0: Rc<dyn Fn(u64) -> u64>,
    pub h0: Rc<dyn Fn(u64) -> u64>,
    pub gamma: Rc<dyn Fn(u64) -> u64>,
}

/// `g0(m)`: least `k <= N` with `α(k,m) != 0`, else N. `h0(m)`: least
/// `k <= N` with `β(k,m) = 0`, else N. `γ(m) = 0` iff `g0(m) > h0(m)`.
pub fn kripke_gamma(
    alpha: impl Fn(u64, u64) -> u64 + 'static,
    beta: impl Fn(u64, u64) -> u64 + 'static,
    scale: NScale,
) -> KripkeGamma {
    let n = scale.0;
    let alpha = Rc::new(alpha);
    let beta = Rc::new(beta);
    let g0 = {
        let alpha = alpha.clone();
        Rc::new(move |m: u64| (0..=n).find(|&k| alpha(k, m) != 0).unwrap_or(n))
    };
    let h0 = {
        let beta = beta.clone();
        Rc::new(move |m: u64| (0..=n).find(|&k| beta(k, m) == 0).unwrap_or(n))
    };
    let gamma = {
        let g0: Rc<dyn Fn(u64) -> u64> = g0.clone();
        let h0: Rc<dyn Fn(u64) -> u64> = h0.clone();
        Rc::new(move |m: u64| u64::from(g0(m) <= h0(m)))
    };
    KripkeGamma { g0, h0, gamma }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y0_examples() {
        let y = y0(NScale::new(4));
        assert_eq!(y.call(&|_| 1), 1);
        assert_eq!(y.call(&|n| u64::from(n != 0)), 0);
        // first zero at N+2 is invisible
        assert_eq!(y.call(&|n| u64::from(n < 6)), 1);
        // support stays within {0..N+1}
        let (_, log) = y.call_logged(&|_| 1);
        assert!(log.iter().all(|&q| q <= 5));
    }

    #[test]
    fn counterexample_pair_examples() {
        for n in [1u64, 8] {
            let scale = NScale::new(n);
            let pair = counterexample_pair(scale);
            let y = y0(scale);
            assert_eq!(y.call(&*pair.f0), 1);
            assert_eq!(y.call(&*pair.g0), 0);
            for i in 0..n {
                assert_eq!((pair.f0)(i), (pair.g0)(i));
            }
            assert_ne!((pair.f0)(n), (pair.g0)(n));
            assert_eq!(pair.agreement, n);
        }
    }

    #[test]
    fn z_transform_examples() {
        let f: Stream = Rc::new(|n| if n == 0 || n == 2 { 0 } else { 5 });
        let z = z_transform(f.clone());
        assert_eq!((z(0), z(1), z(2), z(3)), (0, 1, 0, 1));
        let zero: Stream = Rc::new(|_| 0);
        let zz = z_transform(zero);
        assert_eq!(zz(17), 0);
        for k in 0..10 {
            let has_zero_f = (0..=k).any(|n| f(n) == 0);
            let has_zero_z = (0..=k).any(|n| z(n) == 0);
            assert_eq!(has_zero_f, has_zero_z);
        }
    }

    #[test]
    fn phi_sign_examples() {
        let phi = phi_sign(NScale::new(16));
        assert_eq!(phi(&RealCode::constant(Rat::from_int(-1))), 0);
        assert_eq!(phi(&RealCode::constant(Rat::one())), 1);
        assert_eq!(phi(&RealCode::constant(Rat::zero())), 0);
    }

    #[test]
    fn binary_digit_examples() {
        let scale = NScale::new(1 << 10);
        let zero = RealCode::constant(Rat::zero());
        assert_eq!(binary_digits(&zero, 4, scale), vec![0, 0, 0, 0]);
        let x = RealCode::constant(Rat::new(7, 10));
        assert_eq!(binary_digits(&x, 4, scale), vec![1, 0, 1, 1]);
        assert_eq!(exact_expansion(&Rat::new(7, 10), 4), vec![1, 0, 1, 1]);
        let one = RealCode::constant(Rat::one());
        assert_eq!(binary_digits(&one, 4, scale), vec![1, 1, 1, 1]);
    }

    #[test]
    fn standard_part_examples() {
        let scale = NScale::new(64);
        let zero = RealCode::constant(Rat::zero());
        let sp = standard_part(&zero, scale, 60);
        assert!(sp.in_guard);
        assert_eq!(sp.value, Rat::zero());
        assert!(sp.digits.iter().all(|&b| b == 0));

        let x = RealCode::constant(Rat::new(3, 10));
        let sp = standard_part(&x, NScale::new(1024), 60);
        let err = (&sp.value - &Rat::new(3, 10)).abs();
        assert!(err <= Rat::new(4, 1024));

        let two = RealCode::constant(Rat::from_int(2));
        let sp = standard_part(&two, scale, 60);
        assert!(!sp.in_guard);
        assert_eq!(sp.value, Rat::zero());
    }

    #[test]
    fn standard_part_code_is_fast_converging() {
        let x = RealCode::constant(Rat::new(2, 3));
        let sp = standard_part(&x, NScale::new(32), 60);
        for n in 0..20u64 {
            for i in 0..10u64 {
                let d = (&approx(&sp.code, n) - &approx(&sp.code, n + i)).abs();
                assert!(d < Rat::pow2_neg(n));
            }
        }
    }

    #[test]
    fn functional_standard_part_examples() {
        // Y depending only on f(0) is preserved
        let y = Functional2::new(|f| f(0) + 7);
        let s = functional_standard_part(&y, NScale::new(1), 99);
        for f0 in [0u64, 1] {
            assert_eq!(s.call(&move |_| f0), y.call(&move |_| f0));
        }
        // non-binary prefix falls back to n0
        let f_bad = |n: u64| if n == 0 { 2 } else { 0 };
        assert_eq!(s.call(&f_bad), 99);
        // truncation loses zeros beyond N
        let scale = NScale::new(3);
        let y_big = y0(NScale::new(5));
        let s2 = functional_standard_part(&y_big, scale, 0);
        assert_eq!(y_big.call(&|_| 1), 1);
        assert_eq!(s2.call(&|_| 1), 0); // sees the padding zeros at index 3 <= 6

        let (v, determined) =
            functional_standard_part_checked(&y, NScale::new(1), 99, &|_| 1);
        assert_eq!(v, 8);
        assert!(determined);
        let (_, determined) = functional_standard_part_checked(&y_big, scale, 0, &|_| 1);
        assert!(!determined);
    }

    #[test]
    fn wkl_path_examples() {
        let mut t: Tree = BTreeSet::new();
        for depth in 0..=5usize {
            // full binary tree to depth 5
            for leaf in 0..(1u32 << depth) {
                t.insert((0..depth).map(|i| ((leaf >> i) & 1) as u8).collect());
            }
        }
        let p = wkl_path(&t, NScale::new(5)).unwrap();
        assert!((0..10).all(|i| p(i) == 0));

        let chain: Tree = [vec![], vec![1], vec![1, 1], vec![1, 1, 1]]
            .into_iter()
            .collect();
        let p = wkl_path(&chain, NScale::new(3)).unwrap();
        assert_eq!((p(0), p(1), p(2), p(3), p(4)), (1, 1, 1, 0, 0));

        let broken: Tree = [vec![1, 1]].into_iter().collect();
        assert!(wkl_path(&broken, NScale::new(2)).is_err());
    }

    #[test]
    fn hbu_cover_examples() {
        let g3 = Functional2::constant(3);
        match hbu_cover(&g3, 3, 20).unwrap() {
            CoverOutcome::Cover(c) => {
                assert_eq!(c.len(), 8);
                assert!(c.iter().all(|(_, r)| *r == 3));
            }
            other => panic!("expected cover, got {other:?}"),
        }

        let g = Functional2::new(|f| f(0) + 1);
        match hbu_cover(&g, 1, 20).unwrap() {
            CoverOutcome::Insufficient { offending_leaf, .. } => {
                assert_eq!(offending_leaf, vec![1]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(hbu_cover(&g, 2, 20).unwrap(), CoverOutcome::Cover(_)));
        assert_eq!(find_cover(&g, 20, 20).unwrap().unwrap().0, 2);

        let g0 = Functional2::constant(0);
        match hbu_cover(&g0, 0, 20).unwrap() {
            CoverOutcome::Cover(c) => assert_eq!(c, vec![(vec![], 0)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(find_cover(&g0, 20, 20).unwrap().unwrap().0, 0);

        let too_big = Functional2::constant(21);
        assert_eq!(find_cover(&too_big, 20, 20).unwrap(), None);
    }

    #[test]
    fn sup_on_cantor_examples() {
        let y = Functional2::new(|f| f(0) + f(1));
        assert_eq!(sup_on_cantor(&y, 2, 20).unwrap(), 2);
        let c = Functional2::constant(9);
        assert_eq!(sup_on_cantor(&c, 1, 20).unwrap(), 9);
        let y0f = y0(NScale::new(4));
        assert_eq!(sup_on_cantor(&y0f, 6, 20).unwrap(), 1);
        // querying beyond N-1 is flagged
        assert!(matches!(
            sup_on_cantor(&y0f, 2, 20),
            Err(WitnessError::NotNDetermined { .. })
        ));
    }

    #[test]
    fn ct_diagonal_examples() {
        let table = machine::ToyTable::default();
        let f0 = ct_diagonal(NScale::new(1000), &table);
        // machine 0 outputs 0 immediately: f0(0) = 1 while the machine says 0
        assert_eq!(f0(0), 1);
        assert_eq!(table.step(0, 0, 1000), Some(0));
        // machine 1 never halts
        assert_eq!(f0(1), 0);
        assert_eq!(table.step(1, 1, 1000), None);
        // N = 0: nothing halts by the step invariant
        let g = ct_diagonal(NScale(0), &table);
        for e in 0..table.machines() {
            assert_eq!(g(e), 0);
        }
    }

    #[test]
    fn machine_step_is_monotone() {
        let table = machine::ToyTable::default();
        for e in 0..table.machines() {
            for n in 0..4u64 {
                let mut seen: Option<u64> = None;
                for s in 0..200u64 {
                    match (seen, table.step(e, n, s)) {
                        (None, Some(v)) => seen = Some(v),
                        (Some(v), Some(w)) => assert_eq!(v, w),
                        (Some(_), None) => panic!("halting is monotone in s"),
                        (None, None) => {}
                    }
                }
                assert_eq!(table.step(e, n, 0), None);
            }
        }
    }

    #[test]
    fn aca_refuter_examples() {
        let f0 = aca_refuter(|n| n);
        assert_eq!(f0(2, 3), 0);
        assert_eq!(f0(2, 2), 1);
        for n in 0..6u64 {
            let least = (0..).find(|&m| f0(n, m) == 0).unwrap();
            assert_eq!(least, n + 1);
        }
    }

    #[test]
    fn kripke_gamma_examples() {
        let n = NScale::new(5);
        let k = kripke_gamma(|_, _| 0, |k, _| u64::from(k != 0), n);
        assert_eq!((k.g0)(3), 5);
        assert_eq!((k.h0)(3), 0);
        assert_eq!((k.gamma)(3), 0);

        let k2 = kripke_gamma(|k, _| u64::from(k == 0), |_, _| 1, n);
        assert_eq!((k2.g0)(0), 0);
        assert_eq!((k2.h0)(0), 5);
        assert_eq!((k2.gamma)(0), 1);

        // g0 == h0 gives gamma = 1
        let k3 = kripke_gamma(|k, _| u64::from(k == 2), |k, _| u64::from(k != 2), n);
        assert_eq!((k3.g0)(9), 2);
        assert_eq!((k3.h0)(9), 2);
        assert_eq!((k3.gamma)(9), 1);
    }
}
