//! Normalization of T-terms with fuel, big-step evaluation against semantic
//! oracles, and full evaluation in finite type structures with a truncated
//! base domain.
//!
//! Reduction is leftmost-outermost over the rules
//!
//! ```text
//! (lam x. t) u        ~> t[x := u]
//! Rec 0 b s           ~> b
//! Rec (S n) b s       ~> s n (Rec n b s)
//! fst <a, b>          ~> a          snd <a, b> ~> b
//! S <numeral n>       ~> <numeral n+1>
//! ```
//!
//! with `NumLit(n+1)` treated as the successor form `S (NumLit n)` wherever a
//! rule demands one. Free variables are inert, so open terms normalize
//! symbolically as far as the rules carry.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::checker::{infer_type, subst_term, Context, TypeError};
use crate::syntax::{FiniteType, Term};

/// Default reduction budget (overridable via `--fuel` / `NSAK_FUEL`).
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Default cap on finite-model sizes (number of elements per type).
pub const DEFAULT_MODEL_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    pub max_steps: u64,
}

impl Fuel {
    pub fn new(max_steps: u64) -> Fuel {
        assert!(max_steps > 0, "fuel must be positive");
        Fuel { max_steps }
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::new(DEFAULT_FUEL)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("normal form is not a numeral: `{0}`; this signals a kernel bug for closed well-typed terms")]
    NotANumeral(String),
    #[error("type error during evaluation: {0}")]
    Type(#[from] TypeError),
    #[error("model size guard exceeded: type {ty} has {size} elements at B={b} (cap {cap})")]
    SizeGuard {
        ty: FiniteType,
        size: u128,
        b: u64,
        cap: u64,
    },
    #[error("evaluation stuck on free variable `{0}` without a binding")]
    StuckOnFree(String),
    #[error("oracle argument arity/type mismatch: {0}")]
    BadOracle(String),
}

// ---------------------------------------------------------------------------
// Syntactic normalization
// ---------------------------------------------------------------------------

/// Views `t` as a successor form `S m`, treating positive numerals as sugar.
fn as_succ(t: &Term) -> Option<Term> {
    match t {
        Term::NumLit(n) if *n >= 1 => Some(Term::num(n - 1)),
        Term::App(f, a) if matches!(**f, Term::Succ) => Some((**a).clone()),
        _ => None,
    }
}

/// One leftmost-outermost reduction step, or `None` on normal forms.
fn step(t: &Term) -> Option<Term> {
    // outermost redex at this node?
    match t {
        Term::App(f, a) => {
            // beta
            if let Term::Lam(x, _, body) = &**f {
                return Some(subst_term(body, x, a));
            }
            // projections
            if matches!(**f, Term::Fst) {
                if let Term::Pair(l, _) = &**a {
                    return Some((**l).clone());
                }
            }
            if matches!(**f, Term::Snd) {
                if let Term::Pair(_, r) = &**a {
                    return Some((**r).clone());
                }
            }
            // numeral folding
            if matches!(**f, Term::Succ) {
                if let Some(n) = a.as_numeral() {
                    return Some(Term::NumLit(n + 1));
                }
            }
            // recursor: Rec n b s
            if let Some((n, b, s)) = match_rec(t) {
                if n.as_numeral() == Some(0) {
                    return Some(b.clone());
                }
                if let Some(m) = as_succ(n) {
                    let rec_m = Term::apps(
                        rec_head(t).expect("match_rec implies rec head"),
                        [m.clone(), b.clone(), s.clone()],
                    );
                    return Some(Term::apps(s.clone(), [m, rec_m]));
                }
            }
            // descend leftmost-outermost
            if let Some(f2) = step(f) {
                return Some(Term::app(f2, (**a).clone()));
            }
            if let Some(a2) = step(a) {
                return Some(Term::app((**f).clone(), a2));
            }
            None
        }
        Term::Lam(x, ty, body) => step(body).map(|b| Term::Lam(x.clone(), ty.clone(), Box::new(b))),
        Term::Pair(a, b) => {
            if let Some(a2) = step(a) {
                return Some(Term::Pair(Box::new(a2), b.clone()));
            }
            step(b).map(|b2| Term::Pair(a.clone(), Box::new(b2)))
        }
        _ => None,
    }
}

/// Matches `Rec[τ] n b s` fully applied.
fn match_rec(t: &Term) -> Option<(&Term, &Term, &Term)> {
    if let Term::App(f1, s) = t {
        if let Term::App(f2, b) = &**f1 {
            if let Term::App(f3, n) = &**f2 {
                if matches!(**f3, Term::Rec(_)) {
                    return Some((n, b, s));
                }
            }
        }
    }
    None
}

fn rec_head(t: &Term) -> Option<Term> {
    if let Term::App(f1, _) = t {
        if let Term::App(f2, _) = &**f1 {
            if let Term::App(f3, _) = &**f2 {
                if matches!(**f3, Term::Rec(_)) {
                    return Some((**f3).clone());
                }
            }
        }
    }
    None
}

/// Normalizes `term` under the fixed leftmost-outermost strategy.
pub fn normalize(term: &Term, fuel: Fuel) -> Result<Term, EvalError> {
    let mut t = term.clone();
    let mut steps = 0u64;
    while let Some(t2) = step(&t) {
        steps += 1;
        if steps > fuel.max_steps {
            return Err(EvalError::FuelExhausted { steps });
        }
        t = t2;
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Big-step evaluation over the full naturals
// ---------------------------------------------------------------------------

/// Semantic values: numbers, functions, pairs.
#[derive(Clone)]
pub enum Value {
    Nat(u64),
    Fun(Rc<dyn Fn(&Value, &mut Budget) -> Result<Value, EvalError>>),
    Pair(Rc<Value>, Rc<Value>),
}

impl Value {
    pub fn as_nat(&self) -> Result<u64, EvalError> {
        match self {
            Value::Nat(n) => Ok(*n),
            _ => Err(EvalError::NotANumeral("<function value>".into())),
        }
    }

    pub fn apply(&self, arg: &Value, budget: &mut Budget) -> Result<Value, EvalError> {
        budget.tick()?;
        match self {
            Value::Fun(f) => f(arg, budget),
            _ => Err(EvalError::NotANumeral("<apply on non-function>".into())),
        }
    }
}

/// Work budget shared through one big-step evaluation.
pub struct Budget {
    remaining: u64,
    spent: u64,
}

impl Budget {
    pub fn new(fuel: Fuel) -> Budget {
        Budget {
            remaining: fuel.max_steps,
            spent: 0,
        }
    }

    pub fn tick(&mut self) -> Result<(), EvalError> {
        if self.remaining == 0 {
            return Err(EvalError::FuelExhausted { steps: self.spent });
        }
        self.remaining -= 1;
        self.spent += 1;
        Ok(())
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }
}

#[derive(Clone, Default)]
struct Env(Option<Rc<EnvNode>>);

struct EnvNode {
    name: String,
    value: Value,
    rest: Env,
}

impl Env {
    fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode {
            name: name.to_string(),
            value,
            rest: self.clone(),
        })))
    }

    fn lookup(&self, name: &str) -> Option<Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(node.value.clone());
            }
            cur = &node.rest.0;
        }
        None
    }
}

fn eval_value(term: &Term, env: &Env, budget: &mut Budget) -> Result<Value, EvalError> {
    budget.tick()?;
    match term {
        Term::Var(x) => env
            .lookup(x)
            .ok_or_else(|| EvalError::StuckOnFree(x.clone())),
        Term::Zero => Ok(Value::Nat(0)),
        Term::NumLit(n) => Ok(Value::Nat(*n)),
        Term::Succ => Ok(Value::Fun(Rc::new(|v, _| Ok(Value::Nat(v.as_nat()? + 1))))),
        Term::Fst => Ok(Value::Fun(Rc::new(|v, _| match v {
            Value::Pair(a, _) => Ok((**a).clone()),
            _ => Err(EvalError::NotANumeral("fst on non-pair".into())),
        }))),
        Term::Snd => Ok(Value::Fun(Rc::new(|v, _| match v {
            Value::Pair(_, b) => Ok((**b).clone()),
            _ => Err(EvalError::NotANumeral("snd on non-pair".into())),
        }))),
        Term::Pair(a, b) => {
            let va = eval_value(a, env, budget)?;
            let vb = eval_value(b, env, budget)?;
            Ok(Value::Pair(Rc::new(va), Rc::new(vb)))
        }
        Term::Lam(x, _, body) => {
            let x = x.clone();
            let body = (**body).clone();
            let env = env.clone();
            Ok(Value::Fun(Rc::new(move |v, budget| {
                eval_value(&body, &env.bind(&x, v.clone()), budget)
            })))
        }
        Term::Rec(_) => Ok(Value::Fun(Rc::new(|n, _| {
            let n = n.as_nat()?;
            Ok(Value::Fun(Rc::new(move |b, _| {
                let b = b.clone();
                Ok(Value::Fun(Rc::new(move |s, budget| {
                    let mut acc = b.clone();
                    for k in 0..n {
                        let sk = s.apply(&Value::Nat(k), budget)?;
                        acc = sk.apply(&acc, budget)?;
                    }
                    Ok(acc)
                })))
            })))
        }))),
        Term::App(f, a) => {
            let vf = eval_value(f, env, budget)?;
            let va = eval_value(a, env, budget)?;
            vf.apply(&va, budget)
        }
    }
}

/// Evaluates a closed term of type `0` to its numeral value.
pub fn eval_nat(term: &Term, fuel: Fuel) -> Result<u64, EvalError> {
    let mut budget = Budget::new(fuel);
    eval_value(term, &Env::default(), &mut budget)?.as_nat()
}

/// A semantic oracle argument for [`apply_functional`].
#[derive(Clone)]
pub enum OracleArg {
    Nat(u64),
    /// A total function `ℕ -> ℕ`; calls are memoized per evaluation and the
    /// inspected support is reported.
    Fn(Rc<dyn Fn(u64) -> u64>),
}

/// Applies a closed functional `term : σ₁ -> … -> σ_k -> 0` to semantic
/// oracles, returning the value and the set of points each function oracle
/// was queried at.
pub fn apply_functional(
    term: &Term,
    args: &[OracleArg],
    fuel: Fuel,
) -> Result<(u64, Vec<Vec<u64>>), EvalError> {
    let mut budget = Budget::new(fuel);
    let mut v = eval_value(term, &Env::default(), &mut budget)?;
    let logs: Vec<Rc<RefCell<BTreeMap<u64, u64>>>> =
        args.iter().map(|_| Rc::new(RefCell::new(BTreeMap::new()))).collect();
    for (i, arg) in args.iter().enumerate() {
        let va = match arg {
            OracleArg::Nat(n) => Value::Nat(*n),
            OracleArg::Fn(f) => {
                let f = f.clone();
                let log = logs[i].clone();
                Value::Fun(Rc::new(move |v, _| {
                    let n = v.as_nat()?;
                    let mut log = log.borrow_mut();
                    let y = *log.entry(n).or_insert_with(|| f(n));
                    Ok(Value::Nat(y))
                }))
            }
        };
        v = v.apply(&va, &mut budget)?;
    }
    let out = v.as_nat()?;
    let support = logs
        .iter()
        .map(|l| l.borrow().keys().copied().collect())
        .collect();
    Ok((out, support))
}

// ---------------------------------------------------------------------------
// Finite type-structure models with truncated base domain {0..B}
// ---------------------------------------------------------------------------

/// An element of the finite model at some type: a number at `0`, a total
/// table at arrow types (indexed by the canonical enumeration of the domain),
/// a pair at products.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModelElement {
    Nat(u64),
    Table(Vec<ModelElement>),
    Pair(Box<ModelElement>, Box<ModelElement>),
}

/// Number of elements of the model at `ty` with base domain `{0..B}`.
pub fn model_size(ty: &FiniteType, b: u64) -> u128 {
    match ty {
        FiniteType::Base => (b + 1) as u128,
        FiniteType::Product(l, r) => model_size(l, b).saturating_mul(model_size(r, b)),
        FiniteType::Arrow(d, c) => {
            let dom = model_size(d, b);
            let cod = model_size(c, b);
            if dom > 64 {
                return u128::MAX;
            }
            let mut acc: u128 = 1;
            for _ in 0..dom {
                acc = acc.saturating_mul(cod);
                if acc == u128::MAX {
                    return acc;
                }
            }
            acc
        }
    }
}

/// Exhaustive, duplicate-free enumeration of the model at `ty`.
pub fn enumerate_model(ty: &FiniteType, b: u64, cap: u64) -> Result<Vec<ModelElement>, EvalError> {
    let size = model_size(ty, b);
    if size > cap as u128 {
        return Err(EvalError::SizeGuard {
            ty: ty.clone(),
            size,
            b,
            cap,
        });
    }
    Ok(enumerate_unchecked(ty, b))
}

fn enumerate_unchecked(ty: &FiniteType, b: u64) -> Vec<ModelElement> {
    match ty {
        FiniteType::Base => (0..=b).map(ModelElement::Nat).collect(),
        FiniteType::Product(l, r) => {
            let ls = enumerate_unchecked(l, b);
            let rs = enumerate_unchecked(r, b);
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for le in &ls {
                for re in &rs {
                    out.push(ModelElement::Pair(Box::new(le.clone()), Box::new(re.clone())));
                }
            }
            out
        }
        FiniteType::Arrow(d, c) => {
            let dom = enumerate_unchecked(d, b).len();
            let cod = enumerate_unchecked(c, b);
            // tables as base-|cod| digit strings over the domain enumeration
            let mut out = Vec::new();
            let total = cod.len().checked_pow(dom as u32).expect("guarded");
            for idx in 0..total {
                let mut digits = Vec::with_capacity(dom);
                let mut rest = idx;
                for _ in 0..dom {
                    digits.push(cod[rest % cod.len()].clone());
                    rest /= cod.len();
                }
                out.push(ModelElement::Table(digits));
            }
            out
        }
    }
}

/// Canonical index of `elem` in `enumerate_model(ty, B)`.
pub fn elem_index(ty: &FiniteType, b: u64, elem: &ModelElement) -> usize {
    match (ty, elem) {
        (FiniteType::Base, ModelElement::Nat(n)) => *n as usize,
        (FiniteType::Product(l, r), ModelElement::Pair(a, c)) => {
            let rs = model_size(r, b) as usize;
            elem_index(l, b, a) * rs + elem_index(r, b, c)
        }
        (FiniteType::Arrow(d, c), ModelElement::Table(entries)) => {
            let _ = d;
            let cs = model_size(c, b) as usize;
            let mut idx = 0usize;
            for e in entries.iter().rev() {
                idx = idx * cs + elem_index(c, b, e);
            }
            idx
        }
        _ => panic!("elem_index: element does not inhabit {ty}"),
    }
}

/// Applies a table element to an argument element.
pub fn apply_elem(f: &ModelElement, dom: &FiniteType, b: u64, arg: &ModelElement) -> ModelElement {
    match f {
        ModelElement::Table(entries) => entries[elem_index(dom, b, arg)].clone(),
        _ => panic!("apply_elem on non-table"),
    }
}

/// Semantic values over the truncated model; functions stay lazy so `Rec`
/// never materializes its function-space domain.
#[derive(Clone)]
enum MVal {
    Nat(u64),
    Fun(Rc<dyn Fn(&MVal, &mut Budget) -> Result<MVal, EvalError>>),
    Pair(Rc<MVal>, Rc<MVal>),
}

impl MVal {
    fn as_nat(&self) -> Result<u64, EvalError> {
        match self {
            MVal::Nat(n) => Ok(*n),
            _ => Err(EvalError::NotANumeral("<model function>".into())),
        }
    }

    fn apply(&self, arg: &MVal, budget: &mut Budget) -> Result<MVal, EvalError> {
        budget.tick()?;
        match self {
            MVal::Fun(f) => f(arg, budget),
            _ => Err(EvalError::NotANumeral("<model apply on non-function>".into())),
        }
    }
}

#[derive(Clone, Default)]
struct MEnv(Option<Rc<MEnvNode>>);

struct MEnvNode {
    name: String,
    value: MVal,
    rest: MEnv,
}

impl MEnv {
    fn bind(&self, name: &str, value: MVal) -> MEnv {
        MEnv(Some(Rc::new(MEnvNode {
            name: name.to_string(),
            value,
            rest: self.clone(),
        })))
    }
    fn lookup(&self, name: &str) -> Option<MVal> {
        let mut cur = &self.0;
        while let Some(n) = cur {
            if n.name == name {
                return Some(n.value.clone());
            }
            cur = &n.rest.0;
        }
        None
    }
}

fn inject(elem: &ModelElement, ty: &FiniteType, b: u64) -> MVal {
    match (elem, ty) {
        (ModelElement::Nat(n), FiniteType::Base) => MVal::Nat(*n),
        (ModelElement::Pair(l, r), FiniteType::Product(lt, rt)) => MVal::Pair(
            Rc::new(inject(l, lt, b)),
            Rc::new(inject(r, rt, b)),
        ),
        (ModelElement::Table(_), FiniteType::Arrow(d, c)) => {
            let elem = elem.clone();
            let d = (**d).clone();
            let c = (**c).clone();
            MVal::Fun(Rc::new(move |arg, budget| {
                let arg_elem = reify(arg, &d, b, budget)?;
                let out = apply_elem(&elem, &d, b, &arg_elem);
                Ok(inject(&out, &c, b))
            }))
        }
        _ => panic!("inject: element/type mismatch"),
    }
}

fn reify(v: &MVal, ty: &FiniteType, b: u64, budget: &mut Budget) -> Result<ModelElement, EvalError> {
    match (v, ty) {
        (MVal::Nat(n), FiniteType::Base) => Ok(ModelElement::Nat((*n).min(b))),
        (MVal::Pair(l, r), FiniteType::Product(lt, rt)) => Ok(ModelElement::Pair(
            Box::new(reify(l, lt, b, budget)?),
            Box::new(reify(r, rt, b, budget)?),
        )),
        (MVal::Fun(_), FiniteType::Arrow(d, c)) => {
            let dom = enumerate_unchecked(d, b);
            let mut entries = Vec::with_capacity(dom.len());
            for de in &dom {
                let arg = inject(de, d, b);
                let out = v.apply(&arg, budget)?;
                entries.push(reify(&out, c, b, budget)?);
            }
            Ok(ModelElement::Table(entries))
        }
        _ => Err(EvalError::NotANumeral("model value/type mismatch".into())),
    }
}

fn eval_model_val(term: &Term, b: u64, env: &MEnv, budget: &mut Budget) -> Result<MVal, EvalError> {
    budget.tick()?;
    match term {
        Term::Var(x) => env
            .lookup(x)
            .ok_or_else(|| EvalError::StuckOnFree(x.clone())),
        Term::Zero => Ok(MVal::Nat(0)),
        Term::NumLit(n) => Ok(MVal::Nat((*n).min(b))),
        // saturating successor keeps every term denotable in the model
        Term::Succ => Ok(MVal::Fun(Rc::new(move |v, _| {
            Ok(MVal::Nat((v.as_nat()? + 1).min(b)))
        }))),
        Term::Fst => Ok(MVal::Fun(Rc::new(|v, _| match v {
            MVal::Pair(a, _) => Ok((**a).clone()),
            _ => Err(EvalError::NotANumeral("fst on non-pair".into())),
        }))),
        Term::Snd => Ok(MVal::Fun(Rc::new(|v, _| match v {
            MVal::Pair(_, r) => Ok((**r).clone()),
            _ => Err(EvalError::NotANumeral("snd on non-pair".into())),
        }))),
        Term::Pair(l, r) => Ok(MVal::Pair(
            Rc::new(eval_model_val(l, b, env, budget)?),
            Rc::new(eval_model_val(r, b, env, budget)?),
        )),
        Term::Lam(x, _, body) => {
            let x = x.clone();
            let body = (**body).clone();
            let env = env.clone();
            Ok(MVal::Fun(Rc::new(move |v, budget| {
                eval_model_val(&body, b, &env.bind(&x, v.clone()), budget)
            })))
        }
        Term::Rec(_) => Ok(MVal::Fun(Rc::new(|n, _| {
            let n = n.as_nat()?;
            Ok(MVal::Fun(Rc::new(move |base, _| {
                let base = base.clone();
                Ok(MVal::Fun(Rc::new(move |s, budget| {
                    let mut acc = base.clone();
                    for k in 0..n {
                        let sk = s.apply(&MVal::Nat(k), budget)?;
                        acc = sk.apply(&acc, budget)?;
                    }
                    Ok(acc)
                })))
            })))
        }))),
        Term::App(f, a) => {
            let vf = eval_model_val(f, b, env, budget)?;
            let va = eval_model_val(a, b, env, budget)?;
            vf.apply(&va, budget)
        }
    }
}

/// A typed environment for finite-model evaluation.
#[derive(Debug, Clone, Default)]
pub struct ModelEnv {
    pub entries: Vec<(String, FiniteType, ModelElement)>,
}

impl ModelEnv {
    pub fn new() -> ModelEnv {
        ModelEnv::default()
    }

    pub fn bind(&mut self, name: &str, ty: FiniteType, elem: ModelElement) {
        self.entries.push((name.to_string(), ty, elem));
    }

    fn context(&self) -> Context {
        let mut ctx = Context::new();
        for (n, t, _) in &self.entries {
            // shadowing duplicates are fine here
            if ctx.lookup(n).is_none() {
                ctx.declare(n, t.clone()).expect("fresh");
            }
        }
        ctx
    }
}

/// Compositional evaluation of `term` in the B-truncated model.
pub fn eval_finite_model(
    term: &Term,
    b: u64,
    env: &ModelEnv,
    fuel: Fuel,
) -> Result<ModelElement, EvalError> {
    let ty = infer_type(term, &env.context())?;
    let mut budget = Budget::new(fuel);
    let mut menv = MEnv::default();
    for (n, t, e) in &env.entries {
        menv = menv.bind(n, inject(e, t, b));
    }
    let v = eval_model_val(term, b, &menv, &mut budget)?;
    reify(&v, &ty, b, &mut budget)
}

/// Memoizing wrapper turning a plain closure into a reusable oracle.
#[derive(Clone)]
pub struct MemoOracle {
    f: Rc<dyn Fn(u64) -> u64>,
    memo: Rc<RefCell<HashMap<u64, u64>>>,
}

impl MemoOracle {
    pub fn new(f: impl Fn(u64) -> u64 + 'static) -> MemoOracle {
        MemoOracle {
            f: Rc::new(f),
            memo: Rc::new(RefCell::new(HashMap::new())),
        }
    }

    pub fn get(&self, n: u64) -> u64 {
        if let Some(v) = self.memo.borrow().get(&n) {
            return *v;
        }
        let v = (self.f)(n);
        self.memo.borrow_mut().insert(n, v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::terms;

    fn nf(s: &str) -> Term {
        normalize(&parse_term(s).unwrap(), Fuel::default()).unwrap()
    }

    #[test]
    fn recursor_base_case() {
        let t = Term::apps(
            Term::Rec(FiniteType::Base),
            [Term::Zero, Term::var("b"), Term::var("s")],
        );
        assert_eq!(normalize(&t, Fuel::default()).unwrap(), Term::var("b"));
    }

    #[test]
    fn beta_reduces() {
        assert_eq!(nf("(lam x:0. x) 7"), Term::NumLit(7));
    }

    #[test]
    fn addition_kernel_agrees_with_unary_oracle() {
        let add = terms::add();
        for m in 0..6u64 {
            for n in 0..6u64 {
                let t = Term::apps(add.clone(), [Term::num(m), Term::num(n)]);
                assert_eq!(eval_nat(&t, Fuel::default()).unwrap(), m + n);
                assert_eq!(normalize(&t, Fuel::default()).unwrap(), Term::num(m + n));
            }
        }
    }

    #[test]
    fn eval_nat_examples() {
        assert_eq!(eval_nat(&Term::Zero, Fuel::default()).unwrap(), 0);
        assert_eq!(eval_nat(&parse_term("S (S 0)").unwrap(), Fuel::default()).unwrap(), 2);
    }

    #[test]
    fn monus_and_friends() {
        for (a, b) in [(0u64, 0u64), (3, 1), (1, 3), (5, 5), (7, 2)] {
            let t = Term::apps(terms::monus(), [Term::num(a), Term::num(b)]);
            assert_eq!(eval_nat(&t, Fuel::default()).unwrap(), a.saturating_sub(b));
            let e = Term::apps(terms::eqnat(), [Term::num(a), Term::num(b)]);
            assert_eq!(eval_nat(&e, Fuel::default()).unwrap(), u64::from(a == b));
            let mx = Term::apps(terms::max0(), [Term::num(a), Term::num(b)]);
            assert_eq!(eval_nat(&mx, Fuel::default()).unwrap(), a.max(b));
            let mn = Term::apps(terms::min0(), [Term::num(a), Term::num(b)]);
            assert_eq!(eval_nat(&mn, Fuel::default()).unwrap(), a.min(b));
        }
    }

    #[test]
    fn fuel_exhaustion_reports_steps() {
        let t = Term::apps(terms::add(), [Term::num(50), Term::num(50)]);
        match eval_nat(&t, Fuel::new(10)) {
            Err(EvalError::FuelExhausted { steps }) => assert!(steps >= 10),
            other => panic!("expected fuel exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn symbolic_normalization_with_free_vars() {
        // monus t 0 ~> t even for open t
        let t = Term::apps(terms::monus(), [Term::var("t"), Term::Zero]);
        assert_eq!(normalize(&t, Fuel::default()).unwrap(), Term::var("t"));
        // pred (S y) ~> y
        let p = Term::app(terms::pred(), Term::succ_of(Term::var("y")));
        assert_eq!(normalize(&p, Fuel::default()).unwrap(), Term::var("y"));
    }

    #[test]
    fn apply_functional_examples() {
        // (lam f:0->0. f 3) with oracle n ↦ n² gives 9
        let t = parse_term("lam f:0->0. f 3").unwrap();
        let (v, support) = apply_functional(
            &t,
            &[OracleArg::Fn(Rc::new(|n| n * n))],
            Fuel::default(),
        )
        .unwrap();
        assert_eq!(v, 9);
        assert_eq!(support[0], vec![3]);

        // constant functional ignores its oracle
        let c = parse_term("lam f:0->0. 5").unwrap();
        let (v, support) =
            apply_functional(&c, &[OracleArg::Fn(Rc::new(|_| 0))], Fuel::default()).unwrap();
        assert_eq!(v, 5);
        assert!(support[0].is_empty());
    }

    #[test]
    fn y0_term_matches_its_contract() {
        let y0 = terms::y0_term(4);
        let all_ones = OracleArg::Fn(Rc::new(|_| 1));
        assert_eq!(apply_functional(&y0, &[all_ones], Fuel::default()).unwrap().0, 1);
        let zero_at_0 = OracleArg::Fn(Rc::new(|n| u64::from(n != 0)));
        assert_eq!(apply_functional(&y0, &[zero_at_0], Fuel::default()).unwrap().0, 0);
        // first zero at N+2 is out of reach
        let late_zero = OracleArg::Fn(Rc::new(|n| u64::from(n < 6)));
        assert_eq!(apply_functional(&y0, &[late_zero], Fuel::default()).unwrap().0, 1);
    }

    #[test]
    fn enumerate_model_sizes() {
        assert_eq!(
            enumerate_model(&FiniteType::Base, 1, DEFAULT_MODEL_CAP).unwrap().len(),
            2
        );
        assert_eq!(
            enumerate_model(&FiniteType::nat_fn(), 1, DEFAULT_MODEL_CAP).unwrap().len(),
            4
        );
        assert_eq!(
            enumerate_model(&FiniteType::type2(), 1, DEFAULT_MODEL_CAP).unwrap().len(),
            16
        );
        // duplicate-free
        let elems = enumerate_model(&FiniteType::nat_fn(), 2, DEFAULT_MODEL_CAP).unwrap();
        let set: std::collections::HashSet<_> = elems.iter().collect();
        assert_eq!(set.len(), elems.len());
    }

    #[test]
    fn size_guard_trips() {
        let t2 = FiniteType::type2();
        assert!(matches!(
            enumerate_model(&t2, 2, 1000),
            Err(EvalError::SizeGuard { .. })
        ));
    }

    #[test]
    fn saturating_successor() {
        let t = parse_term("S 3").unwrap();
        assert_eq!(
            eval_finite_model(&t, 3, &ModelEnv::new(), Fuel::default()).unwrap(),
            ModelElement::Nat(3)
        );
        let add11 = Term::apps(terms::add(), [Term::num(1), Term::num(1)]);
        assert_eq!(
            eval_finite_model(&add11, 3, &ModelEnv::new(), Fuel::default()).unwrap(),
            ModelElement::Nat(2)
        );
        let k0 = parse_term("lam x:0. 0").unwrap();
        assert_eq!(
            eval_finite_model(&k0, 2, &ModelEnv::new(), Fuel::default()).unwrap(),
            ModelElement::Table(vec![
                ModelElement::Nat(0),
                ModelElement::Nat(0),
                ModelElement::Nat(0)
            ])
        );
    }

    #[test]
    fn elem_index_round_trips() {
        for ty in [
            FiniteType::Base,
            FiniteType::nat_fn(),
            FiniteType::product(FiniteType::Base, FiniteType::nat_fn()),
        ] {
            let elems = enumerate_model(&ty, 2, DEFAULT_MODEL_CAP).unwrap();
            for (i, e) in elems.iter().enumerate() {
                assert_eq!(elem_index(&ty, 2, e), i);
            }
        }
    }
}
