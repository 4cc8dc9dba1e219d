//! Type inference for terms, well-formedness for formulas, the
//! internal/external classifier, relativization to the standard world, and
//! unfolding of the defined equalities `=_τ`, `<=_τ`, `~_τ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{FiniteType, Formula, Term};
use crate::terms;

/// An ordered typing context. Later declarations shadow earlier ones, which
/// is what binder scoping needs; `declare` refuses duplicates for the
/// user-facing surface.
#[derive(Debug, Clone, Default)]
pub struct Context {
    entries: Vec<(String, FiniteType)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn declare(&mut self, name: &str, ty: FiniteType) -> Result<(), TypeError> {
        if self.entries.iter().any(|(n, _)| n == name) {
            return Err(TypeError::Duplicate {
                name: name.to_string(),
            });
        }
        self.entries.push((name.to_string(), ty));
        Ok(())
    }

    fn push(&mut self, name: &str, ty: FiniteType) {
        self.entries.push((name.to_string(), ty));
    }

    fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&FiniteType> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FiniteType)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable `{name}` at {path}")]
    Unbound { name: String, path: Path },
    #[error("duplicate declaration of `{name}`")]
    Duplicate { name: String },
    #[error("type mismatch at {path}: expected {expected}, found {found}")]
    Mismatch {
        expected: FiniteType,
        found: FiniteType,
        path: Path,
    },
    #[error("term at {path} has type {found}, which is not a function type")]
    NotAFunction { found: FiniteType, path: Path },
    #[error("term at {path} has type {found}, which is not a product type")]
    NotAProduct { found: FiniteType, path: Path },
    #[error("bare `{what}` at {path} has no unique type; apply it to an argument")]
    Ambiguous { what: String, path: Path },
}

/// Subterm path for error reports: a descent like `fn.arg.body`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Path(pub Vec<&'static str>);

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("root")
        } else {
            f.write_str(&self.0.join("."))
        }
    }
}

/// Infers the unique type of `term`; free variables must be declared in
/// `context`.
pub fn infer_type(term: &Term, context: &Context) -> Result<FiniteType, TypeError> {
    let mut ctx = context.clone();
    let mut path = Vec::new();
    infer_rec(term, &mut ctx, &mut path)
}

fn infer_rec(
    term: &Term,
    ctx: &mut Context,
    path: &mut Vec<&'static str>,
) -> Result<FiniteType, TypeError> {
    match term {
        Term::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| TypeError::Unbound {
            name: x.clone(),
            path: Path(path.clone()),
        }),
        Term::Zero | Term::NumLit(_) => Ok(FiniteType::Base),
        Term::Succ => Ok(FiniteType::nat_fn()),
        Term::Rec(t) => Ok(FiniteType::arrow(
            FiniteType::Base,
            FiniteType::arrow(
                t.clone(),
                FiniteType::arrow(
                    FiniteType::arrow(FiniteType::Base, FiniteType::arrow(t.clone(), t.clone())),
                    t.clone(),
                ),
            ),
        )),
        Term::Pair(a, b) => {
            path.push("pair.0");
            let ta = infer_rec(a, ctx, path)?;
            path.pop();
            path.push("pair.1");
            let tb = infer_rec(b, ctx, path)?;
            path.pop();
            Ok(FiniteType::product(ta, tb))
        }
        Term::Fst | Term::Snd => Err(TypeError::Ambiguous {
            what: if matches!(term, Term::Fst) { "fst" } else { "snd" }.to_string(),
            path: Path(path.clone()),
        }),
        Term::Lam(x, ty, body) => {
            ctx.push(x, ty.clone());
            path.push("body");
            let tb = infer_rec(body, ctx, path);
            path.pop();
            ctx.pop();
            Ok(FiniteType::arrow(ty.clone(), tb?))
        }
        Term::App(f, a) => {
            // Projections only type in applied position.
            if matches!(**f, Term::Fst | Term::Snd) {
                path.push("arg");
                let ta = infer_rec(a, ctx, path)?;
                path.pop();
                match ta {
                    FiniteType::Product(l, r) => Ok(if matches!(**f, Term::Fst) { *l } else { *r }),
                    other => Err(TypeError::NotAProduct {
                        found: other,
                        path: Path(path.clone()),
                    }),
                }
            } else {
                path.push("fn");
                let tf = infer_rec(f, ctx, path)?;
                path.pop();
                match tf {
                    FiniteType::Arrow(dom, cod) => {
                        path.push("arg");
                        let ta = infer_rec(a, ctx, path)?;
                        if ta != *dom {
                            return Err(TypeError::Mismatch {
                                expected: *dom,
                                found: ta,
                                path: Path(path.clone()),
                            });
                        }
                        path.pop();
                        Ok(*cod)
                    }
                    other => Err(TypeError::NotAFunction {
                        found: other,
                        path: Path(path.clone()),
                    }),
                }
            }
        }
    }
}

/// Checks that every atom of `formula` is well-typed: equality arguments have
/// type `0`, `st[τ](t)` demands `t : τ`, bounds of bounded quantifiers have
/// type `0`.
pub fn wf_formula(formula: &Formula, context: &Context) -> Result<(), TypeError> {
    let mut ctx = context.clone();
    wf_rec(formula, &mut ctx)
}

fn wf_rec(formula: &Formula, ctx: &mut Context) -> Result<(), TypeError> {
    let expect_base = |t: &Term, ctx: &mut Context| -> Result<(), TypeError> {
        let mut path = Vec::new();
        let ty = infer_rec(t, ctx, &mut path)?;
        if ty != FiniteType::Base {
            return Err(TypeError::Mismatch {
                expected: FiniteType::Base,
                found: ty,
                path: Path(path),
            });
        }
        Ok(())
    };
    match formula {
        Formula::Falsum => Ok(()),
        Formula::AtomEq0(a, b) => {
            expect_base(a, ctx)?;
            expect_base(b, ctx)
        }
        Formula::St(ty, t) => {
            let mut path = Vec::new();
            let found = infer_rec(t, ctx, &mut path)?;
            if found != *ty {
                return Err(TypeError::Mismatch {
                    expected: ty.clone(),
                    found,
                    path: Path(path),
                });
            }
            Ok(())
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            wf_rec(a, ctx)?;
            wf_rec(b, ctx)
        }
        Formula::Forall(x, ty, body)
        | Formula::Exists(x, ty, body)
        | Formula::ForallSt(x, ty, body)
        | Formula::ExistsSt(x, ty, body)
        | Formula::ForallMonSt(x, ty, body)
        | Formula::ExistsMonSt(x, ty, body) => {
            ctx.push(x, ty.clone());
            let r = wf_rec(body, ctx);
            ctx.pop();
            r
        }
        Formula::BoundedNumForall(x, bound, body) | Formula::BoundedNumExists(x, bound, body) => {
            expect_base(bound, ctx)?;
            ctx.push(x, FiniteType::Base);
            let r = wf_rec(body, ctx);
            ctx.pop();
            r
        }
    }
}

/// A formula is internal iff no `st` predicate and no st-relativized
/// quantifier occurs anywhere in it.
pub fn is_internal(formula: &Formula) -> bool {
    match formula {
        Formula::Falsum | Formula::AtomEq0(..) => true,
        Formula::St(..) => false,
        Formula::ForallSt(..)
        | Formula::ExistsSt(..)
        | Formula::ForallMonSt(..)
        | Formula::ExistsMonSt(..) => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            is_internal(a) && is_internal(b)
        }
        Formula::Forall(_, _, body) | Formula::Exists(_, _, body) => is_internal(body),
        Formula::BoundedNumForall(_, _, body) | Formula::BoundedNumExists(_, _, body) => {
            is_internal(body)
        }
    }
}

/// A formula is quantifier-free modulo bounded number quantifiers and free of
/// `st`. This is the matrix discipline for `QF-AC` and `WC-N₀`.
pub fn is_qf_modulo_bounded(formula: &Formula) -> bool {
    match formula {
        Formula::Falsum | Formula::AtomEq0(..) => true,
        Formula::St(..) => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            is_qf_modulo_bounded(a) && is_qf_modulo_bounded(b)
        }
        Formula::BoundedNumForall(_, _, body) | Formula::BoundedNumExists(_, _, body) => {
            is_qf_modulo_bounded(body)
        }
        _ => false,
    }
}

/// The relativization `A^st`: every unbounded quantifier becomes its
/// st-relativized form; bounded number quantifiers and atoms are untouched.
/// Idempotent.
pub fn relativize(formula: &Formula) -> Formula {
    match formula {
        Formula::Falsum | Formula::AtomEq0(..) | Formula::St(..) => formula.clone(),
        Formula::And(a, b) => Formula::and(relativize(a), relativize(b)),
        Formula::Or(a, b) => Formula::or(relativize(a), relativize(b)),
        Formula::Implies(a, b) => Formula::implies(relativize(a), relativize(b)),
        Formula::Forall(x, ty, body) => {
            Formula::ForallSt(x.clone(), ty.clone(), Box::new(relativize(body)))
        }
        Formula::Exists(x, ty, body) => {
            Formula::ExistsSt(x.clone(), ty.clone(), Box::new(relativize(body)))
        }
        Formula::ForallSt(x, ty, body) => {
            Formula::ForallSt(x.clone(), ty.clone(), Box::new(relativize(body)))
        }
        Formula::ExistsSt(x, ty, body) => {
            Formula::ExistsSt(x.clone(), ty.clone(), Box::new(relativize(body)))
        }
        Formula::ForallMonSt(x, ty, body) => {
            Formula::ForallMonSt(x.clone(), ty.clone(), Box::new(relativize(body)))
        }
        Formula::ExistsMonSt(x, ty, body) => {
            Formula::ExistsMonSt(x.clone(), ty.clone(), Box::new(relativize(body)))
        }
        Formula::BoundedNumForall(x, bound, body) => {
            Formula::BoundedNumForall(x.clone(), bound.clone(), Box::new(relativize(body)))
        }
        Formula::BoundedNumExists(x, bound, body) => {
            Formula::BoundedNumExists(x.clone(), bound.clone(), Box::new(relativize(body)))
        }
    }
}

// ---------------------------------------------------------------------------
// Defined equalities
// ---------------------------------------------------------------------------

/// The three defined relation sugars of the equality remark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualitySugar {
    /// `=_τ`: pointwise `=_0` under internal quantifiers.
    Eq,
    /// `<=_τ`: the same shape with `<=_0` at the matrix.
    Leq,
    /// `~_τ`: approximate equality, the z-quantifiers relativized to `st`.
    Approx,
}

/// `x <=_0 y` as the internal atom `monus x y = 0`.
pub fn leq0_atom(x: Term, y: Term) -> Formula {
    Formula::eq0(Term::apps(terms::monus(), [x, y]), Term::Zero)
}

/// Unfolds `lhs ⋈_τ rhs` per the defined-equality discipline.
///
/// For composed `τ ≡ τ₁ -> … -> τ_k -> 0` this is
/// `(∀ z₁ … z_k)(lhs z̄ ⋈_0 rhs z̄)`, with the z-quantifiers st-relativized
/// when the sugar is `Approx`. At `τ = 0` the atom itself is returned.
/// Product components unfold componentwise through the projections.
pub fn unfold_equality(
    sugar: EqualitySugar,
    ty: &FiniteType,
    lhs: &Term,
    rhs: &Term,
) -> Formula {
    let mut avoid = free_term_vars(lhs);
    avoid.extend(free_term_vars(rhs));
    unfold_eq_rec(sugar, ty, lhs.clone(), rhs.clone(), &mut avoid, &mut 0)
}

fn unfold_eq_rec(
    sugar: EqualitySugar,
    ty: &FiniteType,
    lhs: Term,
    rhs: Term,
    avoid: &mut BTreeSet<String>,
    counter: &mut usize,
) -> Formula {
    match ty {
        FiniteType::Base => match sugar {
            EqualitySugar::Eq | EqualitySugar::Approx => Formula::eq0(lhs, rhs),
            EqualitySugar::Leq => leq0_atom(lhs, rhs),
        },
        FiniteType::Product(l, r) => {
            let a = unfold_eq_rec(
                sugar,
                l,
                Term::app(Term::Fst, lhs.clone()),
                Term::app(Term::Fst, rhs.clone()),
                avoid,
                counter,
            );
            let b = unfold_eq_rec(
                sugar,
                r,
                Term::app(Term::Snd, lhs),
                Term::app(Term::Snd, rhs),
                avoid,
                counter,
            );
            Formula::and(a, b)
        }
        FiniteType::Arrow(dom, cod) => {
            let z = fresh_name("z", avoid, counter);
            let body = unfold_eq_rec(
                sugar,
                cod,
                Term::app(lhs, Term::var(&z)),
                Term::app(rhs, Term::var(&z)),
                avoid,
                counter,
            );
            match sugar {
                EqualitySugar::Approx => Formula::ForallSt(z, (**dom).clone(), Box::new(body)),
                _ => Formula::Forall(z, (**dom).clone(), Box::new(body)),
            }
        }
    }
}

pub fn fresh_name(stem: &str, avoid: &mut BTreeSet<String>, counter: &mut usize) -> String {
    loop {
        *counter += 1;
        let cand = format!("{stem}{counter}");
        if !avoid.contains(&cand) {
            avoid.insert(cand.clone());
            return cand;
        }
    }
}

// ---------------------------------------------------------------------------
// Free variables, substitution, alpha equivalence
// ---------------------------------------------------------------------------

/// Free variable names of a term (no types).
pub fn free_term_vars(term: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_term_fv(term, &mut Vec::new(), &mut out);
    out
}

fn collect_term_fv(term: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match term {
        Term::Var(x) => {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, _, body) => {
            bound.push(x.clone());
            collect_term_fv(body, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_term_fv(f, bound, out);
            collect_term_fv(a, bound, out);
        }
        Term::Pair(a, b) => {
            collect_term_fv(a, bound, out);
            collect_term_fv(b, bound, out);
        }
        _ => {}
    }
}

/// Free variable names of a formula (no types).
pub fn free_formula_vars(formula: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_formula_fv(formula, &mut Vec::new(), &mut out);
    out
}

fn collect_formula_fv(formula: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let term = |t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>| {
        let mut fv = BTreeSet::new();
        collect_term_fv(t, &mut Vec::new(), &mut fv);
        for x in fv {
            if !bound.iter().any(|b| *b == x) {
                out.insert(x);
            }
        }
    };
    match formula {
        Formula::Falsum => {}
        Formula::AtomEq0(a, b) => {
            term(a, bound, out);
            term(b, bound, out);
        }
        Formula::St(_, t) => term(t, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_formula_fv(a, bound, out);
            collect_formula_fv(b, bound, out);
        }
        Formula::Forall(x, _, body)
        | Formula::Exists(x, _, body)
        | Formula::ForallSt(x, _, body)
        | Formula::ExistsSt(x, _, body)
        | Formula::ForallMonSt(x, _, body)
        | Formula::ExistsMonSt(x, _, body) => {
            bound.push(x.clone());
            collect_formula_fv(body, bound, out);
            bound.pop();
        }
        Formula::BoundedNumForall(x, b, body) | Formula::BoundedNumExists(x, b, body) => {
            term(b, bound, out);
            bound.push(x.clone());
            collect_formula_fv(body, bound, out);
            bound.pop();
        }
    }
}

/// Typed free variables, with types recovered by first-order unification over
/// the usage sites. Bound variables take their annotation; a free variable
/// whose type stays undetermined after solving defaults to `0`, keeping the
/// operation total.
pub fn free_vars(formula: &Formula) -> BTreeMap<String, FiniteType> {
    let mut inf = VarTypeInference::default();
    inf.formula(formula, &mut Vec::new());
    inf.finish()
}

/// Typed free variables of a term.
pub fn free_vars_term(term: &Term) -> BTreeMap<String, FiniteType> {
    let mut inf = VarTypeInference::default();
    inf.term_unconstrained(term, &mut Vec::new());
    inf.finish()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum UTy {
    Base,
    Arrow(Box<UTy>, Box<UTy>),
    Product(Box<UTy>, Box<UTy>),
    Meta(usize),
}

impl UTy {
    fn of(t: &FiniteType) -> UTy {
        match t {
            FiniteType::Base => UTy::Base,
            FiniteType::Arrow(a, b) => UTy::Arrow(Box::new(UTy::of(a)), Box::new(UTy::of(b))),
            FiniteType::Product(a, b) => UTy::Product(Box::new(UTy::of(a)), Box::new(UTy::of(b))),
        }
    }
}

#[derive(Default)]
struct VarTypeInference {
    free: BTreeMap<String, usize>,
    solution: Vec<Option<UTy>>,
}

impl VarTypeInference {
    fn fresh(&mut self) -> UTy {
        self.solution.push(None);
        UTy::Meta(self.solution.len() - 1)
    }

    fn resolve(&self, t: &UTy) -> UTy {
        match t {
            UTy::Meta(i) => match &self.solution[*i] {
                Some(u) => self.resolve(&u.clone()),
                None => t.clone(),
            },
            UTy::Base => UTy::Base,
            UTy::Arrow(a, b) => UTy::Arrow(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            UTy::Product(a, b) => {
                UTy::Product(Box::new(self.resolve(a)), Box::new(self.resolve(b)))
            }
        }
    }

    fn unify(&mut self, a: &UTy, b: &UTy) {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (a, b) {
            (UTy::Meta(i), t) | (t, UTy::Meta(i)) => {
                if t != UTy::Meta(i) && !occurs(i, &t) {
                    self.solution[i] = Some(t);
                }
                // A clash or occurs-failure leaves the meta unsolved; the
                // variable then defaults to Base. wf_formula is the place
                // where genuine type errors get reported.
            }
            (UTy::Arrow(a1, b1), UTy::Arrow(a2, b2))
            | (UTy::Product(a1, b1), UTy::Product(a2, b2)) => {
                self.unify(&a1, &a2);
                self.unify(&b1, &b2);
            }
            _ => {}
        }
    }

    fn var_ty(&mut self, x: &str, bound: &[(String, UTy)]) -> UTy {
        if let Some((_, t)) = bound.iter().rev().find(|(n, _)| n == x) {
            return t.clone();
        }
        if let Some(i) = self.free.get(x) {
            return UTy::Meta(*i);
        }
        let t = self.fresh();
        if let UTy::Meta(i) = t {
            self.free.insert(x.to_string(), i);
        }
        t
    }

    fn term(&mut self, t: &Term, bound: &mut Vec<(String, UTy)>) -> UTy {
        match t {
            Term::Var(x) => self.var_ty(x, bound),
            Term::Zero | Term::NumLit(_) => UTy::Base,
            Term::Succ => UTy::Arrow(Box::new(UTy::Base), Box::new(UTy::Base)),
            Term::Rec(ty) => {
                let t = UTy::of(ty);
                UTy::Arrow(
                    Box::new(UTy::Base),
                    Box::new(UTy::Arrow(
                        Box::new(t.clone()),
                        Box::new(UTy::Arrow(
                            Box::new(UTy::Arrow(
                                Box::new(UTy::Base),
                                Box::new(UTy::Arrow(Box::new(t.clone()), Box::new(t.clone()))),
                            )),
                            Box::new(t),
                        )),
                    )),
                )
            }
            Term::Pair(a, b) => {
                let ta = self.term(a, bound);
                let tb = self.term(b, bound);
                UTy::Product(Box::new(ta), Box::new(tb))
            }
            Term::Fst => {
                let a = self.fresh();
                let b = self.fresh();
                UTy::Arrow(Box::new(UTy::Product(Box::new(a.clone()), Box::new(b))), Box::new(a))
            }
            Term::Snd => {
                let a = self.fresh();
                let b = self.fresh();
                UTy::Arrow(Box::new(UTy::Product(Box::new(a), Box::new(b.clone()))), Box::new(b))
            }
            Term::Lam(x, ty, body) => {
                bound.push((x.clone(), UTy::of(ty)));
                let tb = self.term(body, bound);
                bound.pop();
                UTy::Arrow(Box::new(UTy::of(ty)), Box::new(tb))
            }
            Term::App(f, a) => {
                let tf = self.term(f, bound);
                let ta = self.term(a, bound);
                let cod = self.fresh();
                self.unify(&tf, &UTy::Arrow(Box::new(ta), Box::new(cod.clone())));
                cod
            }
        }
    }

    fn term_at(&mut self, t: &Term, want: &UTy, bound: &mut Vec<(String, UTy)>) {
        let found = self.term(t, bound);
        self.unify(&found, want);
    }

    fn term_unconstrained(&mut self, t: &Term, bound: &mut Vec<(String, UTy)>) {
        let _ = self.term(t, bound);
    }

    fn formula(&mut self, f: &Formula, bound: &mut Vec<(String, UTy)>) {
        match f {
            Formula::Falsum => {}
            Formula::AtomEq0(a, b) => {
                self.term_at(a, &UTy::Base, bound);
                self.term_at(b, &UTy::Base, bound);
            }
            Formula::St(ty, t) => {
                let want = UTy::of(ty);
                self.term_at(t, &want, bound);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.formula(a, bound);
                self.formula(b, bound);
            }
            Formula::Forall(x, ty, body)
            | Formula::Exists(x, ty, body)
            | Formula::ForallSt(x, ty, body)
            | Formula::ExistsSt(x, ty, body)
            | Formula::ForallMonSt(x, ty, body)
            | Formula::ExistsMonSt(x, ty, body) => {
                bound.push((x.clone(), UTy::of(ty)));
                self.formula(body, bound);
                bound.pop();
            }
            Formula::BoundedNumForall(x, b, body) | Formula::BoundedNumExists(x, b, body) => {
                self.term_at(b, &UTy::Base, bound);
                bound.push((x.clone(), UTy::Base));
                self.formula(body, bound);
                bound.pop();
            }
        }
    }

    fn finish(self) -> BTreeMap<String, FiniteType> {
        let mut out = BTreeMap::new();
        for (name, idx) in &self.free {
            let t = self.resolve(&UTy::Meta(*idx));
            out.insert(name.clone(), defaulted(&t));
        }
        out
    }
}

fn occurs(i: usize, t: &UTy) -> bool {
    match t {
        UTy::Meta(j) => *j == i,
        UTy::Base => false,
        UTy::Arrow(a, b) | UTy::Product(a, b) => occurs(i, a) || occurs(i, b),
    }
}

fn defaulted(t: &UTy) -> FiniteType {
    match t {
        UTy::Base | UTy::Meta(_) => FiniteType::Base,
        UTy::Arrow(a, b) => FiniteType::arrow(defaulted(a), defaulted(b)),
        UTy::Product(a, b) => FiniteType::product(defaulted(a), defaulted(b)),
    }
}

/// Capture-avoiding substitution `t[x := s]`.
pub fn subst_term(t: &Term, x: &str, s: &Term) -> Term {
    match t {
        Term::Var(y) if y == x => s.clone(),
        Term::Var(_)
        | Term::Zero
        | Term::NumLit(_)
        | Term::Succ
        | Term::Rec(_)
        | Term::Fst
        | Term::Snd => t.clone(),
        Term::App(f, a) => Term::app(subst_term(f, x, s), subst_term(a, x, s)),
        Term::Pair(a, b) => Term::Pair(
            Box::new(subst_term(a, x, s)),
            Box::new(subst_term(b, x, s)),
        ),
        Term::Lam(y, ty, body) => {
            if y == x {
                t.clone()
            } else if free_term_vars(s).contains(y) && free_term_vars(body).contains(x) {
                let mut avoid = free_term_vars(s);
                avoid.extend(free_term_vars(body));
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &mut avoid, &mut 0);
                let body2 = subst_term(body, y, &Term::var(&y2));
                Term::Lam(y2, ty.clone(), Box::new(subst_term(&body2, x, s)))
            } else {
                Term::Lam(y.clone(), ty.clone(), Box::new(subst_term(body, x, s)))
            }
        }
    }
}

/// Capture-avoiding substitution in a formula.
pub fn subst_formula(f: &Formula, x: &str, s: &Term) -> Formula {
    let binder = |y: &String,
                  body: &Formula,
                  rebuild: &dyn Fn(String, Box<Formula>) -> Formula|
     -> Formula {
        if y == x {
            rebuild(y.clone(), Box::new(body.clone()))
        } else if free_term_vars(s).contains(y) && free_formula_vars(body).contains(x) {
            let mut avoid = free_term_vars(s);
            avoid.extend(free_formula_vars(body));
            avoid.insert(x.to_string());
            let y2 = fresh_name(y, &mut avoid, &mut 0);
            let body2 = subst_formula(body, y, &Term::var(&y2));
            rebuild(y2, Box::new(subst_formula(&body2, x, s)))
        } else {
            rebuild(y.clone(), Box::new(subst_formula(body, x, s)))
        }
    };
    match f {
        Formula::Falsum => Formula::Falsum,
        Formula::AtomEq0(a, b) => Formula::eq0(subst_term(a, x, s), subst_term(b, x, s)),
        Formula::St(ty, t) => Formula::St(ty.clone(), subst_term(t, x, s)),
        Formula::And(a, b) => Formula::and(subst_formula(a, x, s), subst_formula(b, x, s)),
        Formula::Or(a, b) => Formula::or(subst_formula(a, x, s), subst_formula(b, x, s)),
        Formula::Implies(a, b) => {
            Formula::implies(subst_formula(a, x, s), subst_formula(b, x, s))
        }
        Formula::Forall(y, ty, body) => {
            let ty = ty.clone();
            binder(y, body, &move |y2, b| Formula::Forall(y2, ty.clone(), b))
        }
        Formula::Exists(y, ty, body) => {
            let ty = ty.clone();
            binder(y, body, &move |y2, b| Formula::Exists(y2, ty.clone(), b))
        }
        Formula::ForallSt(y, ty, body) => {
            let ty = ty.clone();
            binder(y, body, &move |y2, b| Formula::ForallSt(y2, ty.clone(), b))
        }
        Formula::ExistsSt(y, ty, body) => {
            let ty = ty.clone();
            binder(y, body, &move |y2, b| Formula::ExistsSt(y2, ty.clone(), b))
        }
        Formula::ForallMonSt(y, ty, body) => {
            let ty = ty.clone();
            binder(y, body, &move |y2, b| Formula::ForallMonSt(y2, ty.clone(), b))
        }
        Formula::ExistsMonSt(y, ty, body) => {
            let ty = ty.clone();
            binder(y, body, &move |y2, b| Formula::ExistsMonSt(y2, ty.clone(), b))
        }
        Formula::BoundedNumForall(y, bound, body) => {
            let bound2 = subst_term(bound, x, s);
            binder(y, body, &move |y2, b| {
                Formula::BoundedNumForall(y2, bound2.clone(), b)
            })
        }
        Formula::BoundedNumExists(y, bound, body) => {
            let bound2 = subst_term(bound, x, s);
            binder(y, body, &move |y2, b| {
                Formula::BoundedNumExists(y2, bound2.clone(), b)
            })
        }
    }
}

/// Alpha equivalence of terms.
pub fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                for (l, r) in env.iter().rev() {
                    if l == x || r == y {
                        return l == x && r == y;
                    }
                }
                x == y
            }
            (Term::Zero, Term::Zero)
            | (Term::Succ, Term::Succ)
            | (Term::Fst, Term::Fst)
            | (Term::Snd, Term::Snd) => true,
            (Term::NumLit(m), Term::NumLit(n)) => m == n,
            (Term::Rec(s), Term::Rec(t)) => s == t,
            (Term::App(f1, a1), Term::App(f2, a2)) => go(f1, f2, env) && go(a1, a2, env),
            (Term::Pair(x1, y1), Term::Pair(x2, y2)) => go(x1, x2, env) && go(y1, y2, env),
            (Term::Lam(x, s, b1), Term::Lam(y, t, b2)) => {
                if s != t {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Alpha equivalence of formulas.
pub fn alpha_eq_formula(a: &Formula, b: &Formula) -> bool {
    fn tgo(a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                for (l, r) in env.iter().rev() {
                    if l == x || r == y {
                        return l == x && r == y;
                    }
                }
                x == y
            }
            (Term::Zero, Term::Zero)
            | (Term::Succ, Term::Succ)
            | (Term::Fst, Term::Fst)
            | (Term::Snd, Term::Snd) => true,
            (Term::NumLit(m), Term::NumLit(n)) => m == n,
            (Term::Rec(s), Term::Rec(t)) => s == t,
            (Term::App(f1, a1), Term::App(f2, a2)) => tgo(f1, f2, env) && tgo(a1, a2, env),
            (Term::Pair(x1, y1), Term::Pair(x2, y2)) => tgo(x1, x2, env) && tgo(y1, y2, env),
            (Term::Lam(x, s, b1), Term::Lam(y, t, b2)) => {
                if s != t {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = tgo(b1, b2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Formula::Falsum, Formula::Falsum) => true,
            (Formula::AtomEq0(a1, b1), Formula::AtomEq0(a2, b2)) => {
                tgo(a1, a2, env) && tgo(b1, b2, env)
            }
            (Formula::St(s, t1), Formula::St(t, t2)) => s == t && tgo(t1, t2, env),
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Or(a1, b1), Formula::Or(a2, b2))
            | (Formula::Implies(a1, b1), Formula::Implies(a2, b2)) => {
                go(a1, a2, env) && go(b1, b2, env)
            }
            (Formula::Forall(x, s, b1), Formula::Forall(y, t, b2))
            | (Formula::Exists(x, s, b1), Formula::Exists(y, t, b2))
            | (Formula::ForallSt(x, s, b1), Formula::ForallSt(y, t, b2))
            | (Formula::ExistsSt(x, s, b1), Formula::ExistsSt(y, t, b2))
            | (Formula::ForallMonSt(x, s, b1), Formula::ForallMonSt(y, t, b2))
            | (Formula::ExistsMonSt(x, s, b1), Formula::ExistsMonSt(y, t, b2)) => {
                if s != t {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            (Formula::BoundedNumForall(x, s, b1), Formula::BoundedNumForall(y, t, b2))
            | (Formula::BoundedNumExists(x, s, b1), Formula::BoundedNumExists(y, t, b2)) => {
                if !tgo(s, t, env) {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Classification result for a formula: internal/external status plus
/// binding facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedFormula {
    pub formula: Formula,
    pub internal: bool,
    pub free: BTreeMap<String, FiniteType>,
    pub closed: bool,
}

pub fn classify(formula: &Formula) -> ClassifiedFormula {
    let free = free_vars(formula);
    ClassifiedFormula {
        formula: formula.clone(),
        internal: is_internal(formula),
        closed: free.is_empty(),
        free,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term, parse_type};

    fn ty(s: &str) -> FiniteType {
        parse_type(s).unwrap()
    }

    #[test]
    fn infer_type_examples() {
        let ctx = Context::new();
        let t = parse_term("lam f:0->0. f 0").unwrap();
        assert_eq!(infer_type(&t, &ctx).unwrap(), ty("(0->0)->0"));

        let add_kernel = parse_term("Rec[0] 0 (lam k:0. lam r:0. S r)").unwrap();
        // Rec[0] applied to the base and step: one more 0 argument missing
        assert_eq!(
            infer_type(&add_kernel, &ctx).unwrap_err(),
            TypeError::Mismatch {
                expected: ty("0"),
                found: ty("0->0->0"),
                path: Path(vec!["arg"]),
            }
        );
        let add = parse_term("lam m:0. lam n:0. Rec[0] n m (lam k:0. lam r:0. S r)").unwrap();
        assert_eq!(infer_type(&add, &ctx).unwrap(), ty("0->0->0"));
    }

    #[test]
    fn self_application_is_untypable() {
        let t = parse_term("lam x:0. x x").unwrap();
        let err = infer_type(&t, &Context::new()).unwrap_err();
        assert!(matches!(err, TypeError::NotAFunction { .. }));
    }

    #[test]
    fn internal_classifier() {
        assert!(is_internal(&parse_formula("forall x:0. x = x").unwrap()));
        assert!(!is_internal(&parse_formula("st[0](y)").unwrap()));
        assert!(!is_internal(
            &parse_formula("forall~st x:0->0. x 0 = x 0").unwrap()
        ));
    }

    #[test]
    fn relativize_examples() {
        let f = parse_formula("forall x:0. x = x").unwrap();
        assert_eq!(
            relativize(&f),
            parse_formula("forall-st x:0. x = x").unwrap()
        );
        let atom = parse_formula("x = y").unwrap();
        assert_eq!(relativize(&atom), atom);
        let bounded = parse_formula("forall n <= t. n = n").unwrap();
        assert_eq!(relativize(&bounded), bounded);
        // idempotence
        assert_eq!(relativize(&relativize(&f)), relativize(&f));
    }

    #[test]
    fn unfold_equality_examples() {
        let x = Term::var("x");
        let y = Term::var("y");
        let f = unfold_equality(EqualitySugar::Eq, &ty("0->0"), &x, &y);
        assert_eq!(f, parse_formula("forall z1:0. x z1 = y z1").unwrap());

        let g = unfold_equality(EqualitySugar::Approx, &ty("0->0"), &x, &y);
        assert_eq!(g, parse_formula("forall-st z1:0. x z1 = y z1").unwrap());
        assert!(!is_internal(&g));
        assert!(is_internal(&f));

        let atom = unfold_equality(EqualitySugar::Eq, &ty("0"), &x, &y);
        assert_eq!(atom, parse_formula("x = y").unwrap());
    }

    #[test]
    fn free_vars_examples() {
        let f = parse_formula("x = y").unwrap();
        let fv = free_vars(&f);
        assert_eq!(fv.get("x"), Some(&FiniteType::Base));
        assert_eq!(fv.get("y"), Some(&FiniteType::Base));

        let g = parse_formula("forall x:0. x = y").unwrap();
        let fv = free_vars(&g);
        assert_eq!(fv.len(), 1);
        assert!(fv.contains_key("y"));

        let t = parse_term("lam x:0. x").unwrap();
        assert!(free_vars_term(&t).is_empty());

        // applied free variable gets a function type
        let h = parse_formula("f 0 = 0").unwrap();
        assert_eq!(free_vars(&h).get("f"), Some(&ty("0->0")));
    }

    #[test]
    fn subst_avoids_capture() {
        // (lam y:0. x) [x := y]  must rename the binder
        let t = Term::lam("y", FiniteType::Base, Term::var("x"));
        let r = subst_term(&t, "x", &Term::var("y"));
        match r {
            Term::Lam(b, _, body) => {
                assert_ne!(b, "y");
                assert_eq!(*body, Term::var("y"));
            }
            other => panic!("expected lam, got {other:?}"),
        }
    }

    #[test]
    fn alpha_equivalence() {
        let a = parse_formula("forall x:0. x = z").unwrap();
        let b = parse_formula("forall y:0. y = z").unwrap();
        assert!(alpha_eq_formula(&a, &b));
        let c = parse_formula("forall y:0. z = y").unwrap();
        assert!(!alpha_eq_formula(&a, &c));
    }
}
