//! The strong majorizability relation `<=*` at every finite type: exact
//! decision in finite models, sampled verdicts over the full naturals,
//! monotonicity, syntactic majorants for closed terms, and the syntactic
//! unfolding of `<=*` as an internal formula.
//!
//! The arrow clause is the standard Howard–Bezem one: for `v <=* u`,
//! `x v <=* y u` and `y v <=* y u`. The printed variant that applies `x` to
//! the larger argument is available as [`ClauseReading::PaperLiteral`] for
//! comparison; the derivations this crate checks only go through under the
//! standard reading.

use std::rc::Rc;

use rand::Rng;

use crate::checker::{fresh_name, free_term_vars, leq0_atom};
use crate::evaluator::{
    apply_elem, enumerate_model, eval_finite_model, EvalError, Fuel, ModelElement, ModelEnv,
};
use crate::syntax::{FiniteType, Formula, Term};
use crate::terms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClauseReading {
    /// For `v <=* u`: `x v <=* y u  ∧  y v <=* y u`.
    #[default]
    Standard,
    /// The clause as printed: for `v <=* u`: `x u <=* y v  ∧  y u <=* y v`.
    PaperLiteral,
}

/// Verdict of a majorizability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MajVerdict {
    Holds,
    /// A concrete argument pair violating a clause; re-checkable.
    Fails { u: Vec<u64>, v: Vec<u64> },
    /// Sampling found no violation; evidence only.
    HoldsOnSamples { count: usize },
}

// ---------------------------------------------------------------------------
// Exact decision in the finite model
// ---------------------------------------------------------------------------

/// Decides `x <=*_ty y` in the B-truncated model by exhaustion.
pub fn leq_star_model(
    x: &ModelElement,
    y: &ModelElement,
    ty: &FiniteType,
    b: u64,
    cap: u64,
) -> Result<bool, EvalError> {
    leq_star_model_with(x, y, ty, b, cap, ClauseReading::Standard)
}

pub fn leq_star_model_with(
    x: &ModelElement,
    y: &ModelElement,
    ty: &FiniteType,
    b: u64,
    cap: u64,
    reading: ClauseReading,
) -> Result<bool, EvalError> {
    match ty {
        FiniteType::Base => match (x, y) {
            (ModelElement::Nat(a), ModelElement::Nat(c)) => Ok(a <= c),
            _ => Ok(false),
        },
        FiniteType::Product(l, r) => match (x, y) {
            (ModelElement::Pair(x1, x2), ModelElement::Pair(y1, y2)) => {
                Ok(leq_star_model_with(x1, y1, l, b, cap, reading)?
                    && leq_star_model_with(x2, y2, r, b, cap, reading)?)
            }
            _ => Ok(false),
        },
        FiniteType::Arrow(dom, cod) => {
            let dom_elems = enumerate_model(dom, b, cap)?;
            for u in &dom_elems {
                for v in &dom_elems {
                    if !leq_star_model_with(v, u, dom, b, cap, reading)? {
                        continue;
                    }
                    let (xa, ya_small) = match reading {
                        ClauseReading::Standard => (
                            apply_elem(x, dom, b, v),
                            apply_elem(y, dom, b, v),
                        ),
                        ClauseReading::PaperLiteral => (
                            apply_elem(x, dom, b, u),
                            apply_elem(y, dom, b, u),
                        ),
                    };
                    let y_big = match reading {
                        ClauseReading::Standard => apply_elem(y, dom, b, u),
                        ClauseReading::PaperLiteral => apply_elem(y, dom, b, v),
                    };
                    // the y-clause first: it fails for every x once y is bad
                    if !leq_star_model_with(&ya_small, &y_big, cod, b, cap, reading)? {
                        return Ok(false);
                    }
                    if !leq_star_model_with(&xa, &y_big, cod, b, cap, reading)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// `x` is monotone iff `x <=* x`.
pub fn is_monotone_model(
    x: &ModelElement,
    ty: &FiniteType,
    b: u64,
    cap: u64,
) -> Result<bool, EvalError> {
    leq_star_model(x, x, ty, b, cap)
}

/// The pointwise-maximum element of the model at `ty`: `B` at base, the
/// constant table at arrows. Majorizes every element (verified in tests, not
/// assumed).
pub fn top_element(ty: &FiniteType, b: u64, cap: u64) -> Result<ModelElement, EvalError> {
    match ty {
        FiniteType::Base => Ok(ModelElement::Nat(b)),
        FiniteType::Product(l, r) => Ok(ModelElement::Pair(
            Box::new(top_element(l, b, cap)?),
            Box::new(top_element(r, b, cap)?),
        )),
        FiniteType::Arrow(dom, cod) => {
            let n = enumerate_model(dom, b, cap)?.len();
            let t = top_element(cod, b, cap)?;
            Ok(ModelElement::Table(vec![t; n]))
        }
    }
}

// ---------------------------------------------------------------------------
// Sampled verdicts over the naturals (types up to 2)
// ---------------------------------------------------------------------------

/// A unary oracle for sampled checks at type 1 and below, or the argument
/// generator window for type-2 functionals.
pub type NatFn = Rc<dyn Fn(u64) -> u64>;

/// An object of type at most 2 given semantically.
#[derive(Clone)]
pub enum SampledObject {
    Nat(u64),
    Fn(NatFn),
    Functional(Rc<dyn Fn(&NatFn) -> u64>),
}

/// Tests `x <=* y` on `n_samples` randomly generated argument pairs drawn
/// from the sampler. `Fails` verdicts carry a true counterexample; a passing
/// run is evidence only.
pub fn leq_star_sampled(
    x: &SampledObject,
    y: &SampledObject,
    rng: &mut impl Rng,
    n_samples: usize,
    window: u64,
) -> MajVerdict {
    match (x, y) {
        (SampledObject::Nat(a), SampledObject::Nat(b)) => {
            if a <= b {
                MajVerdict::Holds
            } else {
                MajVerdict::Fails { u: vec![], v: vec![] }
            }
        }
        (SampledObject::Fn(xf), SampledObject::Fn(yf)) => {
            for _ in 0..n_samples {
                let u = rng.gen_range(0..window);
                let v = rng.gen_range(0..=u);
                // v <=*_0 u automatically; check x v <= y u and y v <= y u
                if xf(v) > yf(u) || yf(v) > yf(u) {
                    return MajVerdict::Fails { u: vec![u], v: vec![v] };
                }
            }
            MajVerdict::HoldsOnSamples { count: n_samples }
        }
        (SampledObject::Functional(xf), SampledObject::Functional(yf)) => {
            for _ in 0..n_samples {
                let (u, v) = sample_majorized_fn_pair(rng, window);
                let (ut, vt) = (u.clone(), v.clone());
                let uf: NatFn = Rc::new(move |n| u_eval(&ut, n));
                let vf: NatFn = Rc::new(move |n| u_eval(&vt, n));
                if xf(&vf) > yf(&uf) || yf(&vf) > yf(&uf) {
                    return MajVerdict::Fails { u, v };
                }
            }
            MajVerdict::HoldsOnSamples { count: n_samples }
        }
        _ => MajVerdict::Fails { u: vec![], v: vec![] },
    }
}

fn u_eval(table: &[u64], n: u64) -> u64 {
    let i = (n as usize).min(table.len().saturating_sub(1));
    if table.is_empty() {
        0
    } else {
        table[i]
    }
}

/// Generates a pair `(u, v)` of finite tables with `v <=*_1 u`: `u` is
/// non-decreasing and `v` is pointwise below it, which implies the hereditary
/// clause.
fn sample_majorized_fn_pair(rng: &mut impl Rng, window: u64) -> (Vec<u64>, Vec<u64>) {
    let len = window.max(2) as usize;
    let mut u = Vec::with_capacity(len);
    let mut cur = rng.gen_range(0..4u64);
    for _ in 0..len {
        cur += rng.gen_range(0..3u64);
        u.push(cur);
    }
    let v = u.iter().map(|&hi| rng.gen_range(0..=hi)).collect();
    (u, v)
}

/// Is `x` monotone on samples.
pub fn is_monotone_sampled(
    x: &SampledObject,
    rng: &mut impl Rng,
    n_samples: usize,
    window: u64,
) -> MajVerdict {
    leq_star_sampled(x, x, rng, n_samples, window)
}

// ---------------------------------------------------------------------------
// Syntactic majorants
// ---------------------------------------------------------------------------

/// Howard-style syntactic majorant of a closed term: numerals and the basic
/// constants map to themselves, abstraction and application are
/// compositional, and the recursor is replaced by its cumulative-max variant
/// so the iterate is monotone in every argument.
pub fn majorant(t: &Term) -> Term {
    match t {
        Term::Var(_)
        | Term::Zero
        | Term::NumLit(_)
        | Term::Succ
        | Term::Fst
        | Term::Snd => t.clone(),
        Term::Pair(a, b) => Term::Pair(Box::new(majorant(a)), Box::new(majorant(b))),
        Term::App(f, a) => Term::app(majorant(f), majorant(a)),
        Term::Lam(x, ty, body) => Term::Lam(x.clone(), ty.clone(), Box::new(majorant(body))),
        Term::Rec(ty) => rec_cummax(ty),
    }
}

/// `lam n. lam b. lam s. Rec[ty] n b (lam k. lam r. max_ty (s k r) r)`.
fn rec_cummax(ty: &FiniteType) -> Term {
    let step_ty = FiniteType::arrow(
        FiniteType::Base,
        FiniteType::arrow(ty.clone(), ty.clone()),
    );
    let inner = max_at_type(
        ty,
        Term::apps(Term::var("s"), [Term::var("k"), Term::var("r")]),
        Term::var("r"),
    );
    Term::lam(
        "n",
        FiniteType::Base,
        Term::lam(
            "b",
            ty.clone(),
            Term::lam(
                "s",
                step_ty,
                Term::apps(
                    Term::Rec(ty.clone()),
                    [
                        Term::var("n"),
                        Term::var("b"),
                        Term::lam(
                            "k",
                            FiniteType::Base,
                            Term::lam("r", ty.clone(), inner),
                        ),
                    ],
                ),
            ),
        ),
    )
}

/// Pointwise maximum at an arbitrary type.
fn max_at_type(ty: &FiniteType, a: Term, b: Term) -> Term {
    match ty {
        FiniteType::Base => Term::apps(terms::max0(), [a, b]),
        FiniteType::Product(l, r) => Term::Pair(
            Box::new(max_at_type(l, Term::app(Term::Fst, a.clone()), Term::app(Term::Fst, b.clone()))),
            Box::new(max_at_type(r, Term::app(Term::Snd, a), Term::app(Term::Snd, b))),
        ),
        FiniteType::Arrow(dom, cod) => {
            let mut avoid = free_term_vars(&a);
            avoid.extend(free_term_vars(&b));
            let x = fresh_name("w", &mut avoid, &mut 0);
            Term::Lam(
                x.clone(),
                (**dom).clone(),
                Box::new(max_at_type(
                    cod,
                    Term::app(a, Term::var(&x)),
                    Term::app(b, Term::var(&x)),
                )),
            )
        }
    }
}

/// The certificate the majorant construction ships with: in every tested
/// model, `⟦t⟧ <=* ⟦t*⟧` and `⟦t*⟧` is monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorantCertificate {
    pub term: Term,
    pub majorant: Term,
    pub checked_b: Vec<u64>,
}

pub fn certify_majorant(
    t: &Term,
    ty: &FiniteType,
    b_max: u64,
    cap: u64,
) -> Result<MajorantCertificate, EvalError> {
    let m = majorant(t);
    let mut checked = Vec::new();
    for b in 1..=b_max {
        if crate::evaluator::model_size(ty, b) > cap as u128 {
            continue;
        }
        let te = eval_finite_model(t, b, &ModelEnv::new(), Fuel::default())?;
        let me = eval_finite_model(&m, b, &ModelEnv::new(), Fuel::default())?;
        if !leq_star_model(&te, &me, ty, b, cap)? {
            return Err(EvalError::NotANumeral(format!(
                "majorant certificate failed at B={b}: t <=* t* does not hold"
            )));
        }
        if !is_monotone_model(&me, ty, b, cap)? {
            return Err(EvalError::NotANumeral(format!(
                "majorant certificate failed at B={b}: t* not monotone"
            )));
        }
        checked.push(b);
    }
    Ok(MajorantCertificate {
        term: t.clone(),
        majorant: m,
        checked_b: checked,
    })
}

// ---------------------------------------------------------------------------
// <=* as an internal formula
// ---------------------------------------------------------------------------

/// The syntactic unfolding of `x <=*_ty y` as an internal formula, used by
/// the axiom catalog (monotone quantifiers, axiom (b), MAJ, I, ...).
pub fn leq_star_formula(ty: &FiniteType, x: &Term, y: &Term) -> Formula {
    let mut avoid = free_term_vars(x);
    avoid.extend(free_term_vars(y));
    let mut counter = 0;
    leq_star_formula_rec(ty, x.clone(), y.clone(), &mut avoid, &mut counter)
}

fn leq_star_formula_rec(
    ty: &FiniteType,
    x: Term,
    y: Term,
    avoid: &mut std::collections::BTreeSet<String>,
    counter: &mut usize,
) -> Formula {
    match ty {
        FiniteType::Base => leq0_atom(x, y),
        FiniteType::Product(l, r) => Formula::and(
            leq_star_formula_rec(
                l,
                Term::app(Term::Fst, x.clone()),
                Term::app(Term::Fst, y.clone()),
                avoid,
                counter,
            ),
            leq_star_formula_rec(
                r,
                Term::app(Term::Snd, x),
                Term::app(Term::Snd, y),
                avoid,
                counter,
            ),
        ),
        FiniteType::Arrow(dom, cod) => {
            // u and v share an index so nested clauses read u1/v1, u2/v2, ...
            let (u, vname) = loop {
                *counter += 1;
                let cu = format!("u{counter}");
                let cv = format!("v{counter}");
                if !avoid.contains(&cu) && !avoid.contains(&cv) {
                    avoid.insert(cu.clone());
                    avoid.insert(cv.clone());
                    break (cu, cv);
                }
            };
            let guard = leq_star_formula_rec(
                dom,
                Term::var(&vname),
                Term::var(&u),
                avoid,
                counter,
            );
            let xc = leq_star_formula_rec(
                cod,
                Term::app(x, Term::var(&vname)),
                Term::app(y.clone(), Term::var(&u)),
                avoid,
                counter,
            );
            let yc = leq_star_formula_rec(
                cod,
                Term::app(y.clone(), Term::var(&vname)),
                Term::app(y, Term::var(&u)),
                avoid,
                counter,
            );
            Formula::forall(
                &u,
                (**dom).clone(),
                Formula::forall(&vname, (**dom).clone(), Formula::implies(guard, Formula::and(xc, yc))),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::DEFAULT_MODEL_CAP;
    use crate::syntax::parse_term;

    const CAP: u64 = DEFAULT_MODEL_CAP;

    #[test]
    fn base_clause_is_numeric_leq() {
        let two = ModelElement::Nat(2);
        let three = ModelElement::Nat(3);
        assert!(leq_star_model(&two, &three, &FiniteType::Base, 3, CAP).unwrap());
        assert!(!leq_star_model(&three, &two, &FiniteType::Base, 3, CAP).unwrap());
    }

    #[test]
    fn identity_below_constant_two_at_type_one() {
        let ty = FiniteType::nat_fn();
        let id = ModelElement::Table(vec![
            ModelElement::Nat(0),
            ModelElement::Nat(1),
            ModelElement::Nat(2),
        ]);
        let c2 = ModelElement::Table(vec![ModelElement::Nat(2); 3]);
        assert!(leq_star_model(&id, &c2, &ty, 2, CAP).unwrap());
    }

    #[test]
    fn decreasing_majorants_nothing() {
        // B = 1: y(0)=1, y(1)=0 fails the y-clause at u=1, v=0
        let ty = FiniteType::nat_fn();
        let dec = ModelElement::Table(vec![ModelElement::Nat(1), ModelElement::Nat(0)]);
        for x in enumerate_model(&ty, 1, CAP).unwrap() {
            assert!(!leq_star_model(&x, &dec, &ty, 1, CAP).unwrap());
        }
        assert!(!is_monotone_model(&dec, &ty, 1, CAP).unwrap());
    }

    #[test]
    fn base_elements_are_monotone() {
        for b in 0..=2 {
            assert!(is_monotone_model(&ModelElement::Nat(b), &FiniteType::Base, 2, CAP).unwrap());
        }
    }

    #[test]
    fn constant_tables_are_monotone() {
        let ty = FiniteType::nat_fn();
        for c in 0..=2u64 {
            let t = ModelElement::Table(vec![ModelElement::Nat(c); 3]);
            assert!(is_monotone_model(&t, &ty, 2, CAP).unwrap());
        }
    }

    #[test]
    fn paper_literal_reading_differs() {
        // identity <=* identity holds standardly; under the literal reading
        // the clause x u <=* y v with u=1, v=0 demands id(1) <= id(0).
        let ty = FiniteType::nat_fn();
        let id = ModelElement::Table(vec![
            ModelElement::Nat(0),
            ModelElement::Nat(1),
            ModelElement::Nat(2),
        ]);
        assert!(leq_star_model(&id, &id, &ty, 2, CAP).unwrap());
        assert!(!leq_star_model_with(&id, &id, &ty, 2, CAP, ClauseReading::PaperLiteral).unwrap());
    }

    #[test]
    fn sampled_examples() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let id: SampledObject = SampledObject::Fn(Rc::new(|n| n));
        let succ: SampledObject = SampledObject::Fn(Rc::new(|n| n + 1));
        assert!(matches!(
            leq_star_sampled(&id, &succ, &mut rng, 1000, 64),
            MajVerdict::HoldsOnSamples { count: 1000 }
        ));
        let dbl: SampledObject = SampledObject::Fn(Rc::new(|n| 2 * n));
        match leq_star_sampled(&dbl, &id, &mut rng, 1000, 64) {
            MajVerdict::Fails { u, v } => {
                // re-check the witness: 2v > u is a genuine violation
                assert!(2 * v[0] > u[0] || v[0] > u[0]);
            }
            other => panic!("expected failure, got {other:?}"),
        }
        let z: SampledObject = SampledObject::Fn(Rc::new(|_| 0));
        assert!(matches!(
            leq_star_sampled(&z, &z, &mut rng, 10, 64),
            MajVerdict::HoldsOnSamples { .. }
        ));
    }

    #[test]
    fn majorant_examples() {
        // Zero and S majorize themselves
        assert_eq!(majorant(&Term::Zero), Term::Zero);
        assert_eq!(majorant(&Term::Succ), Term::Succ);
        let cert = certify_majorant(&Term::Succ, &FiniteType::nat_fn(), 2, CAP).unwrap();
        assert_eq!(cert.checked_b, vec![1, 2]);

        // add gets a monotone majorant certified at B <= 2
        let add = terms::add();
        let ty = crate::syntax::parse_type("0->0->0").unwrap();
        let cert = certify_majorant(&add, &ty, 2, CAP).unwrap();
        assert!(!cert.checked_b.is_empty());

        // an antitone term is repaired by the cumulative-max recursor
        let anti = parse_term("lam x:0. Rec[0] x 1 (lam k:0. lam r:0. 0)").unwrap();
        let ty1 = FiniteType::nat_fn();
        let cert = certify_majorant(&anti, &ty1, 2, CAP).unwrap();
        assert!(!cert.checked_b.is_empty());
    }

    #[test]
    fn top_element_majorizes_everything_at_type_one() {
        let ty = FiniteType::nat_fn();
        for b in [1, 2] {
            let top = top_element(&ty, b, CAP).unwrap();
            for x in enumerate_model(&ty, b, CAP).unwrap() {
                assert!(leq_star_model(&x, &top, &ty, b, CAP).unwrap());
            }
        }
    }

    #[test]
    fn leq_star_formula_at_base_and_arrow() {
        let f = leq_star_formula(&FiniteType::Base, &Term::var("x"), &Term::var("y"));
        assert!(crate::checker::is_internal(&f));
        let g = leq_star_formula(&FiniteType::nat_fn(), &Term::var("x"), &Term::var("y"));
        assert!(crate::checker::is_internal(&g));
        let mut ctx = crate::checker::Context::new();
        ctx.declare("x", FiniteType::nat_fn()).unwrap();
        ctx.declare("y", FiniteType::nat_fn()).unwrap();
        crate::checker::wf_formula(&g, &ctx).unwrap();
    }
}
