//! Catalog and instantiation of the axiom schemas and named principles of
//! the theory, with mechanical validation of side conditions, plus a finite
//! model checker for instances under configurable interpretations of the
//! standardness predicate.
//!
//! Conventions fixed here and used verbatim by the proof kernel:
//!
//! * `x <=*_σ y` is the internal unfolding from
//!   [`crate::majorizability::leq_star_formula`]; at type 0 it is the atom
//!   `monus x y = 0`.
//! * Monotone-standard quantifiers desugar as
//!   `(∀̃^st x)A := forall-st x. (x <=* x -> A)` and
//!   `(∃̃^st x)A := exists-st x. (x <=* x & A)`.
//! * `f` is binary (`f <=_1 1`) renders as `forall k:0. monus (f k) 1 = 0`.
//! * Sequence agreement `f̄t = ḡt` renders as the inclusive bounded
//!   quantifier `forall m <= t. f m = g m`.
//! * Tree and machine templates are stated over the reserved function
//!   variables `bar : (0->0)->0->0` (prefix code), `haltv : 0->0->0->0`
//!   (`haltv e n s` is `S m` if machine e on input n halts within s steps
//!   with output m, else 0), and `ratbelow`/`ratabove : 0->0->0` for the
//!   margin comparisons on coded rationals.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::checker::{
    free_formula_vars, is_internal, is_qf_modulo_bounded, leq0_atom, relativize, subst_formula,
    wf_formula, Context,
};
use crate::evaluator::{enumerate_model, eval_finite_model, EvalError, Fuel, ModelElement, ModelEnv};
use crate::majorizability::{leq_star_formula, leq_star_model};
use crate::syntax::{FiniteType, Formula, Term};
use crate::terms;

// ---------------------------------------------------------------------------
// Schema identifiers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithFact {
    LeqRefl,
    LeqTrans,
    LeqSucc,
    LeqSuccMono,
    MonusSuccSelf,
    MonusUpper,
    MinUpper,
    SignZero,
    IszeroNonzero,
    EqnatNeq,
    EqnatEqZero,
    EqDec,
    BoundedSearch,
}

pub const ARITH_FACTS: [ArithFact; 13] = [
    ArithFact::LeqRefl,
    ArithFact::LeqTrans,
    ArithFact::LeqSucc,
    ArithFact::LeqSuccMono,
    ArithFact::MonusSuccSelf,
    ArithFact::MonusUpper,
    ArithFact::MinUpper,
    ArithFact::SignZero,
    ArithFact::IszeroNonzero,
    ArithFact::EqnatNeq,
    ArithFact::EqnatEqZero,
    ArithFact::EqDec,
    ArithFact::BoundedSearch,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaId {
    StA,
    StB,
    StC,
    StD,
    IaSt,
    MAc,
    R,
    I,
    Ip,
    M,
    Maj,
    E,
    Mp,
    PfTpE,
    PfTpA,
    Pi01Trans,
    E2Exists,
    TjSt,
    Aca0,
    Wt,
    Fan,
    Wkl,
    Uwkl,
    HbuC,
    Muc,
    Se,
    ContC,
    BctC,
    WcN,
    WcN0,
    CctC,
    Ks0,
    Ct,
    QfAc,
    Simpler,
    Gafot,
    NearStd,
    Arith(ArithFact),
    NsLt,
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl SchemaId {
    pub fn name(&self) -> &'static str {
        use SchemaId::*;
        match self {
            StA => "ST_A",
            StB => "ST_B",
            StC => "ST_C",
            StD => "ST_D",
            IaSt => "IA_ST",
            MAc => "mAC",
            R => "R",
            I => "I",
            Ip => "IP",
            M => "M",
            Maj => "MAJ",
            E => "E",
            Mp => "MP",
            PfTpE => "PF_TP_E",
            PfTpA => "PF_TP_A",
            Pi01Trans => "PI01_TRANS",
            E2Exists => "E2_EXISTS",
            TjSt => "TJ_ST",
            Aca0 => "ACA0",
            Wt => "WT",
            Fan => "FAN",
            Wkl => "WKL",
            Uwkl => "UWKL",
            HbuC => "HBU_C",
            Muc => "MUC",
            Se => "SE",
            ContC => "CONT_C",
            BctC => "BCT_C",
            WcN => "WC_N",
            WcN0 => "WC_N0",
            CctC => "CCT_C",
            Ks0 => "KS0",
            Ct => "CT",
            QfAc => "QF_AC",
            Simpler => "SIMPLER",
            Gafot => "GAFOT",
            NearStd => "NEAR_STD",
            Arith(a) => a.name(),
            NsLt => "NS_LT",
        }
    }

    pub fn parse(s: &str) -> Option<SchemaId> {
        all_ids().into_iter().find(|id| id.name() == s)
    }

    /// Part of the base theory: basic axioms, the non-basic axioms,
    /// extensionality, and the machine-validated arithmetic lemmas (each a
    /// theorem of the internal base system).
    pub fn dg_safe(&self) -> bool {
        use SchemaId::*;
        matches!(
            self,
            StA | StB | StC | StD | IaSt | MAc | R | I | Ip | M | Maj | E | Arith(_)
        )
    }
}

impl ArithFact {
    pub fn name(&self) -> &'static str {
        use ArithFact::*;
        match self {
            LeqRefl => "ARITH_LEQ_REFL",
            LeqTrans => "ARITH_LEQ_TRANS",
            LeqSucc => "ARITH_LEQ_SUCC",
            LeqSuccMono => "ARITH_LEQ_SUCC_MONO",
            MonusSuccSelf => "ARITH_MONUS_SUCC_SELF",
            MonusUpper => "ARITH_MONUS_UPPER",
            MinUpper => "ARITH_MIN_UPPER",
            SignZero => "ARITH_SIGN_ZERO",
            IszeroNonzero => "ARITH_ISZERO_NONZERO",
            EqnatNeq => "ARITH_EQNAT_NEQ",
            EqnatEqZero => "ARITH_EQNAT_EQ_ZERO",
            EqDec => "ARITH_EQ_DEC",
            BoundedSearch => "ARITH_BOUNDED_SEARCH",
        }
    }
}

pub fn all_ids() -> Vec<SchemaId> {
    use SchemaId::*;
    let mut ids = vec![
        StA, StB, StC, StD, IaSt, MAc, R, I, Ip, M, Maj, E, Mp, PfTpE, PfTpA, Pi01Trans,
        E2Exists, TjSt, Aca0, Wt, Fan, Wkl, Uwkl, HbuC, Muc, Se, ContC, BctC, WcN, WcN0, CctC,
        Ks0, Ct, QfAc, Simpler, Gafot, NearStd,
    ];
    ids.extend(ARITH_FACTS.map(Arith));
    ids.push(NsLt);
    ids
}

/// One catalog row: identifier, template description, side conditions.
pub struct CatalogEntry {
    pub id: SchemaId,
    pub template: &'static str,
    pub side_conditions: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    use SchemaId::*;
    let row = |id: SchemaId| -> CatalogEntry {
        let (template, side): (&'static str, &'static str) = match id {
            StA => ("x =_s y -> (st(x) -> st(y)), closed universally", "type argument"),
            StB => ("st(y) -> (x <=*_s y -> st(x)), closed universally", "type argument"),
            StC => ("st(t) for a closed term t", "term must be closed"),
            StD => ("st(z) -> (st(x) -> st(z x)), closed universally", "two type arguments"),
            IaSt => (
                "Phi(0) & (forall-st n. Phi(n) -> Phi(n+1)) -> forall-st n. Phi(n)",
                "any Phi; instance must be closed by the induction variable",
            ),
            MAc => (
                "(m-forall-st x)(m-exists-st y)Phi -> (m-exists-st f)(m-forall-st x)(exists y <=* f x)Phi",
                "any Phi",
            ),
            R => (
                "(forall x)(exists-st y)Phi -> (m-exists-st z)(forall x)(exists y <=* z)Phi",
                "any Phi",
            ),
            I => (
                "(m-forall-st z)(exists x)(forall y <=* z)phi -> (exists x)(forall-st y)phi",
                "internal phi",
            ),
            Ip => (
                "[(m-forall-st x)phi -> (m-exists-st y)Psi] -> (m-exists-st z)[(m-forall-st x)phi -> (m-exists y <=* z)Psi]",
                "internal phi",
            ),
            M => (
                "[(m-forall-st x)phi -> psi] -> (m-exists-st y)[(forall x <=* y)phi -> psi]",
                "internal phi, psi",
            ),
            Maj => ("(forall-st x)(exists-st y)(x <=* y)", "type argument"),
            E => (
                "(forall phi, x, y)(x =_r y -> phi x =_t phi y)",
                "arrow type argument",
            ),
            Mp => ("(forall f)(not not (exists n)(f n = 0) -> (exists n)(f n = 0))", "none"),
            PfTpE => (
                "(exists xs)phi -> (exists-st xs)phi",
                "internal phi; free variables exactly the transferred tuple",
            ),
            PfTpA => (
                "(forall-st xs)phi -> (forall xs)phi",
                "internal phi; free variables exactly the transferred tuple",
            ),
            Pi01Trans => (
                "(forall-st f)[(forall-st n)(f n = 0) -> (forall n)(f n = 0)]",
                "none",
            ),
            E2Exists => (
                "(exists phi)(forall f)[(exists n)(f n = 0) <-> phi f = 0]",
                "none",
            ),
            TjSt => (
                "(exists-st phi)(forall-st f)[(exists n)(f n = 0) <-> phi f = 0]",
                "none",
            ),
            Aca0 => (
                "(forall f <= 1)(exists g <= 1)(forall n)[(exists m)(f n m = 0) <-> g n = 0]",
                "none",
            ),
            Wt => (
                "(forall-st Y)[(exists f in C)(Y f = 0) -> (exists-st f in C)(Y f = 0)]",
                "none",
            ),
            Fan => (
                "(forall T <= 1)[(forall a in C)(exists m)(bar a m not-in T) -> (exists n)(forall b in C)(bar b n not-in T)]",
                "over the reserved prefix-code symbol `bar`",
            ),
            Wkl => (
                "(forall T <= 1)[(forall n)(exists b in C)(bar b n in T) -> (exists a in C)(forall m)(bar a m in T)]",
                "over `bar`",
            ),
            Uwkl => (
                "(exists Psi)(forall T <= 1)[tree infinite -> (forall m)(bar (Psi T) m in T)]",
                "over `bar`",
            ),
            HbuC => (
                "(forall G)(exists w, k)(forall a in C)(exists i <= k)(a in cylinder of w i at radius G (w i))",
                "pointwise cylinders; inclusive radius",
            ),
            Muc => (
                "(exists Om)(forall Y)(forall f, g in C)(agreement below Om Y -> Y f = Y g)",
                "none",
            ),
            Se => (
                "(forall Y, f, g)(Y f != Y g -> (exists z)(f z != g z))",
                "none",
            ),
            ContC => (
                "cont_C(Y): (forall f in C)(exists N)(forall g in C)(agreement below N -> Y f = Y g)",
                "term argument Y",
            ),
            BctC => ("(forall Y)cont_C(Y)", "none"),
            WcN => (
                "(forall a)(exists n)A -> (forall a)(exists n, m)(forall b)(agreement below n -> A(b, m))",
                "any A over (a, n)",
            ),
            WcN0 => (
                "WC_N with quantifier-free matrix",
                "A quantifier-free modulo bounded number quantifiers",
            ),
            CctC => ("(forall-st Y)(cont_C(Y) -> cont_C(Y)^st)", "none"),
            Ks0 => (
                "(forall a <= 1)(exists b <= 1)(forall m)[(forall k)(a k m = 0) <-> (exists n)(b n m = 0)]",
                "none",
            ),
            Ct => (
                "(forall f)(exists e)(forall n, m)[(exists s)(haltv e n s = S m) <-> f n = m]",
                "over the reserved machine-step symbol `haltv`",
            ),
            QfAc => (
                "(forall xs)(exists y)psi -> (exists F)(forall xs)psi[y := F xs]",
                "psi internal and quantifier-free modulo bounded number quantifiers",
            ),
            Simpler => (
                "(exists-st Phi)(forall x)[(Phi x = 0 -> x below-margin) & (Phi x = 1 -> x above-margin)]",
                "over the reserved symbols ratbelow/ratabove",
            ),
            Gafot => (
                "(forall-st f in C)(forall g in C)(f ~_1 g -> Y f = Y g)",
                "term argument Y",
            ),
            NearStd => ("(forall-st f)(exists-st n)(Y f = n)", "term argument Y"),
            Arith(_) => (
                "internal arithmetic lemma over the fixed monus/iszero/eqnat combinators",
                "machine-validated; none",
            ),
            NsLt => (
                "numeral < N for a declared constant N",
                "first term argument must be a numeral",
            ),
        };
        CatalogEntry {
            id,
            template,
            side_conditions: side,
        }
    };
    all_ids().into_iter().map(row).collect()
}

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

/// Arguments for one schema instance. Arity and side conditions are checked
/// by [`instantiate`].
#[derive(Debug, Clone, Default)]
pub struct Instantiation {
    pub schema: Option<SchemaId>,
    pub type_args: Vec<FiniteType>,
    pub term_args: Vec<Term>,
    pub formula_args: Vec<Formula>,
    /// Named, typed variables for schemas binding over a tuple (`PF_TP`,
    /// `QF_AC`, `IA_ST`, the x/y variables of mAC/R/I/IP/M, WC_N).
    pub var_args: Vec<(String, FiniteType)>,
    /// Admit the relativized instance instead (the `^st` marker in theory
    /// declarations).
    pub relativized: bool,
}

impl Instantiation {
    pub fn of(schema: SchemaId) -> Instantiation {
        Instantiation {
            schema: Some(schema),
            ..Default::default()
        }
    }

    pub fn with_types(mut self, tys: impl IntoIterator<Item = FiniteType>) -> Instantiation {
        self.type_args.extend(tys);
        self
    }

    pub fn with_terms(mut self, ts: impl IntoIterator<Item = Term>) -> Instantiation {
        self.term_args.extend(ts);
        self
    }

    pub fn with_formulas(mut self, fs: impl IntoIterator<Item = Formula>) -> Instantiation {
        self.formula_args.extend(fs);
        self
    }

    pub fn with_vars(
        mut self,
        vs: impl IntoIterator<Item = (String, FiniteType)>,
    ) -> Instantiation {
        self.var_args.extend(vs);
        self
    }

    pub fn relativized(mut self) -> Instantiation {
        self.relativized = true;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("schema {schema}: arity mismatch: {what}")]
    Arity { schema: SchemaId, what: String },
    #[error("schema {schema}: side condition violated: {condition}; offending part: {offender}")]
    SideCondition {
        schema: SchemaId,
        condition: String,
        offender: String,
    },
    #[error("no such schema id")]
    UnknownSchema,
    #[error("instance is not well-formed: {0}")]
    IllFormed(String),
}

fn side(schema: SchemaId, condition: &str, offender: impl fmt::Display) -> SchemaError {
    SchemaError::SideCondition {
        schema,
        condition: condition.to_string(),
        offender: offender.to_string(),
    }
}

fn arity(schema: SchemaId, what: &str) -> SchemaError {
    SchemaError::Arity {
        schema,
        what: what.to_string(),
    }
}

/// Reserved function variables used by tree/machine/real templates, with
/// their fixed types.
pub fn reserved_symbols() -> Vec<(&'static str, FiniteType)> {
    let t1 = FiniteType::nat_fn();
    vec![
        ("bar", FiniteType::arrow(t1, FiniteType::nat_fn())),
        (
            "haltv",
            FiniteType::arrow(
                FiniteType::Base,
                FiniteType::arrow(FiniteType::Base, FiniteType::nat_fn()),
            ),
        ),
        ("ratbelow", FiniteType::arrow(FiniteType::Base, FiniteType::nat_fn())),
        ("ratabove", FiniteType::arrow(FiniteType::Base, FiniteType::nat_fn())),
    ]
}

// Shorthand constructors for the templates.

fn v(x: &str) -> Term {
    Term::var(x)
}

fn t0() -> FiniteType {
    FiniteType::Base
}

fn t1() -> FiniteType {
    FiniteType::nat_fn()
}

fn t2() -> FiniteType {
    FiniteType::type2()
}

fn ap(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    Term::apps(f, args)
}

fn eq(a: Term, b: Term) -> Formula {
    Formula::eq0(a, b)
}

/// `(∀̃^st x^ty)A`.
fn mon_forall_st(x: &str, ty: &FiniteType, body: Formula) -> Formula {
    Formula::forall_st(
        x,
        ty.clone(),
        Formula::implies(leq_star_formula(ty, &v(x), &v(x)), body),
    )
}

/// `(∃̃^st x^ty)A`.
fn mon_exists_st(x: &str, ty: &FiniteType, body: Formula) -> Formula {
    Formula::exists_st(
        x,
        ty.clone(),
        Formula::and(leq_star_formula(ty, &v(x), &v(x)), body),
    )
}

/// `(∃y <=*_ty bound)A`.
fn bounded_star_exists(y: &str, ty: &FiniteType, bound: &Term, body: Formula) -> Formula {
    Formula::exists(
        y,
        ty.clone(),
        Formula::and(leq_star_formula(ty, &v(y), bound), body),
    )
}

/// `(∀x <=*_ty bound)A`.
fn bounded_star_forall(x: &str, ty: &FiniteType, bound: &Term, body: Formula) -> Formula {
    Formula::forall(
        x,
        ty.clone(),
        Formula::implies(leq_star_formula(ty, &v(x), bound), body),
    )
}

/// `f <=_1 1` pointwise: `forall k. f k <= 1`.
fn is_binary(f: &str) -> Formula {
    Formula::forall("k", t0(), leq0_atom(ap(v(f), [v("k")]), Term::NumLit(1)))
}

/// `x <=_{0→0→0} 1` pointwise for double sequences.
fn is_binary2(f: &str) -> Formula {
    Formula::forall(
        "k",
        t0(),
        Formula::forall("l", t0(), leq0_atom(ap(v(f), [v("k"), v("l")]), Term::NumLit(1))),
    )
}

/// Agreement `f̄t = ḡt` as the inclusive bounded quantifier.
fn agreement(f: &str, g: &str, bound: Term) -> Formula {
    Formula::bforall("m", bound, eq(ap(v(f), [v("m")]), ap(v(g), [v("m")])))
}

/// `(∃n)(f n = 0)`.
fn has_zero(f: &str) -> Formula {
    Formula::exists("n", t0(), eq(ap(v(f), [v("n")]), Term::Zero))
}

/// The TJ matrix `(∃n)(f n = 0) <-> phi f = 0` as two implications.
fn tj_matrix(f: &str, phi: &str) -> Formula {
    Formula::and(
        Formula::implies(has_zero(f), eq(ap(v(phi), [v(f)]), Term::Zero)),
        Formula::implies(eq(ap(v(phi), [v(f)]), Term::Zero), has_zero(f)),
    )
}

/// `cont_C(Y)` for a given term Y.
fn cont_c(y: &Term) -> Formula {
    Formula::forall(
        "f",
        t1(),
        Formula::implies(
            is_binary("f"),
            Formula::exists(
                "N",
                t0(),
                Formula::forall(
                    "g",
                    t1(),
                    Formula::implies(
                        is_binary("g"),
                        Formula::implies(
                            agreement("f", "g", v("N")),
                            eq(ap(y.clone(), [v("f")]), ap(y.clone(), [v("g")])),
                        ),
                    ),
                ),
            ),
        ),
    )
}

fn check_internal(schema: SchemaId, f: &Formula, what: &str) -> Result<(), SchemaError> {
    if !is_internal(f) {
        return Err(side(schema, &format!("internal {what} required"), f));
    }
    Ok(())
}

/// Instantiates a schema; returns the instance exactly in the conventions
/// documented at module level, after desugaring monotone quantifiers and
/// defined equalities. Side conditions are enforced.
pub fn instantiate(inst: &Instantiation) -> Result<Formula, SchemaError> {
    let schema = inst.schema.ok_or(SchemaError::UnknownSchema)?;
    let base = instantiate_unrelativized(schema, inst)?;
    Ok(if inst.relativized { relativize(&base) } else { base })
}

fn instantiate_unrelativized(
    schema: SchemaId,
    inst: &Instantiation,
) -> Result<Formula, SchemaError> {
    use SchemaId::*;
    let one_type = || -> Result<&FiniteType, SchemaError> {
        inst.type_args
            .first()
            .ok_or_else(|| arity(schema, "one type argument expected"))
    };
    let fresh_against = |stems: &[&str], fs: &[&Formula]| -> Vec<String> {
        let mut avoid: BTreeSet<String> = BTreeSet::new();
        for f in fs {
            avoid.extend(free_formula_vars(f));
        }
        for (n, _) in &inst.var_args {
            avoid.insert(n.clone());
        }
        stems
            .iter()
            .map(|s| {
                let mut c = 0usize;
                loop {
                    let cand = if c == 0 { s.to_string() } else { format!("{s}{c}") };
                    if !avoid.contains(&cand) {
                        avoid.insert(cand.clone());
                        return cand;
                    }
                    c += 1;
                }
            })
            .collect()
    };
    match schema {
        StA => {
            let s = one_type()?;
            let matrix = crate::checker::unfold_equality(
                crate::checker::EqualitySugar::Eq,
                s,
                &v("x"),
                &v("y"),
            );
            Ok(Formula::forall(
                "x",
                s.clone(),
                Formula::forall(
                    "y",
                    s.clone(),
                    Formula::implies(
                        matrix,
                        Formula::implies(
                            Formula::St(s.clone(), v("x")),
                            Formula::St(s.clone(), v("y")),
                        ),
                    ),
                ),
            ))
        }
        StB => {
            let s = one_type()?;
            Ok(Formula::forall(
                "y",
                s.clone(),
                Formula::forall(
                    "x",
                    s.clone(),
                    Formula::implies(
                        Formula::St(s.clone(), v("y")),
                        Formula::implies(
                            leq_star_formula(s, &v("x"), &v("y")),
                            Formula::St(s.clone(), v("x")),
                        ),
                    ),
                ),
            ))
        }
        StC => {
            let s = one_type()?;
            let t = inst
                .term_args
                .first()
                .ok_or_else(|| arity(schema, "one term argument expected"))?;
            if !crate::checker::free_term_vars(t).is_empty() {
                return Err(side(schema, "term must be closed", t));
            }
            let found = crate::checker::infer_type(t, &Context::new())
                .map_err(|e| SchemaError::IllFormed(e.to_string()))?;
            if found != *s {
                return Err(side(
                    schema,
                    &format!("term must have the declared type {s}"),
                    t,
                ));
            }
            Ok(Formula::St(s.clone(), t.clone()))
        }
        StD => {
            if inst.type_args.len() != 2 {
                return Err(arity(schema, "two type arguments expected"));
            }
            let s = &inst.type_args[0];
            let t = &inst.type_args[1];
            let st = FiniteType::arrow(s.clone(), t.clone());
            Ok(Formula::forall(
                "z",
                st.clone(),
                Formula::forall(
                    "x",
                    s.clone(),
                    Formula::implies(
                        Formula::St(st.clone(), v("z")),
                        Formula::implies(
                            Formula::St(s.clone(), v("x")),
                            Formula::St(t.clone(), ap(v("z"), [v("x")])),
                        ),
                    ),
                ),
            ))
        }
        IaSt => {
            let (n, nty) = inst
                .var_args
                .first()
                .ok_or_else(|| arity(schema, "induction variable expected"))?;
            if *nty != t0() {
                return Err(side(schema, "induction variable must have type 0", nty));
            }
            let phi = inst
                .formula_args
                .first()
                .ok_or_else(|| arity(schema, "one formula argument expected"))?;
            let extra: Vec<String> = free_formula_vars(phi)
                .into_iter()
                .filter(|x| x != n)
                .collect();
            if !extra.is_empty() {
                return Err(side(
                    schema,
                    "instance must be closed by the induction variable; close remaining parameters first",
                    extra.join(", "),
                ));
            }
            let base = subst_formula(phi, n, &Term::Zero);
            let step_body =
                Formula::implies(phi.clone(), subst_formula(phi, n, &Term::succ_of(v(n))));
            Ok(Formula::implies(
                Formula::and(base, Formula::forall_st(n, t0(), step_body)),
                Formula::forall_st(n, t0(), phi.clone()),
            ))
        }
        MAc => {
            let [(x, sx), (y, sy)] = two_vars(schema, inst)?;
            let phi = one_formula(schema, inst)?;
            let names = fresh_against(&["f"], &[phi]);
            let f = &names[0];
            let fty = FiniteType::arrow(sx.clone(), sy.clone());
            let prem = mon_forall_st(&x, &sx, mon_exists_st(&y, &sy, phi.clone()));
            let concl = mon_exists_st(
                f,
                &fty,
                mon_forall_st(
                    &x,
                    &sx,
                    bounded_star_exists(&y, &sy, &ap(v(f), [v(&x)]), phi.clone()),
                ),
            );
            Ok(Formula::implies(prem, concl))
        }
        R => {
            let [(x, sx), (y, sy)] = two_vars(schema, inst)?;
            let phi = one_formula(schema, inst)?;
            let names = fresh_against(&["z"], &[phi]);
            let z = &names[0];
            let prem =
                Formula::forall(&x, sx.clone(), Formula::exists_st(&y, sy.clone(), phi.clone()));
            let concl = mon_exists_st(
                z,
                &sy,
                Formula::forall(&x, sx.clone(), bounded_star_exists(&y, &sy, &v(z), phi.clone())),
            );
            Ok(Formula::implies(prem, concl))
        }
        I => {
            let [(x, sx), (y, sy)] = two_vars(schema, inst)?;
            let phi = one_formula(schema, inst)?;
            check_internal(schema, phi, "phi")?;
            let names = fresh_against(&["z"], &[phi]);
            let z = &names[0];
            let prem = mon_forall_st(
                z,
                &sy,
                Formula::exists(&x, sx.clone(), bounded_star_forall(&y, &sy, &v(z), phi.clone())),
            );
            let concl =
                Formula::exists(&x, sx.clone(), Formula::forall_st(&y, sy.clone(), phi.clone()));
            Ok(Formula::implies(prem, concl))
        }
        Ip => {
            let [(x, sx), (y, sy)] = two_vars(schema, inst)?;
            if inst.formula_args.len() != 2 {
                return Err(arity(schema, "two formula arguments (phi, Psi) expected"));
            }
            let phi = &inst.formula_args[0];
            let psi = &inst.formula_args[1];
            check_internal(schema, phi, "phi")?;
            let names = fresh_against(&["z"], &[phi, psi]);
            let z = &names[0];
            let antecedent = mon_forall_st(&x, &sx, phi.clone());
            let prem = Formula::implies(antecedent.clone(), mon_exists_st(&y, &sy, psi.clone()));
            let tilde_bounded = Formula::exists(
                &y,
                sy.clone(),
                Formula::and(
                    leq_star_formula(&sy, &v(&y), &v(&y)),
                    Formula::and(leq_star_formula(&sy, &v(&y), &v(z)), psi.clone()),
                ),
            );
            let concl = mon_exists_st(z, &sy, Formula::implies(antecedent, tilde_bounded));
            Ok(Formula::implies(prem, concl))
        }
        M => {
            let (x, sx) = inst
                .var_args
                .first()
                .cloned()
                .ok_or_else(|| arity(schema, "variable (x, type) expected"))?;
            if inst.formula_args.len() != 2 {
                return Err(arity(schema, "two formula arguments (phi, psi) expected"));
            }
            let phi = &inst.formula_args[0];
            let psi = &inst.formula_args[1];
            check_internal(schema, phi, "phi")?;
            check_internal(schema, psi, "psi")?;
            if free_formula_vars(psi).contains(&x) {
                return Err(side(schema, "psi must not contain the quantified x", psi));
            }
            let names = fresh_against(&["y"], &[phi, psi]);
            let y = &names[0];
            let prem = Formula::implies(mon_forall_st(&x, &sx, phi.clone()), psi.clone());
            let concl = mon_exists_st(
                y,
                &sx,
                Formula::implies(bounded_star_forall(&x, &sx, &v(y), phi.clone()), psi.clone()),
            );
            Ok(Formula::implies(prem, concl))
        }
        Maj => {
            let s = one_type()?;
            Ok(Formula::forall_st(
                "x",
                s.clone(),
                Formula::exists_st("y", s.clone(), leq_star_formula(s, &v("x"), &v("y"))),
            ))
        }
        E => {
            let s = one_type()?;
            let (dom, cod) = match s {
                FiniteType::Arrow(d, c) => ((**d).clone(), (**c).clone()),
                _ => return Err(side(schema, "extensionality takes an arrow type", s)),
            };
            let arg_eq = crate::checker::unfold_equality(
                crate::checker::EqualitySugar::Eq,
                &dom,
                &v("x"),
                &v("y"),
            );
            let out_eq = crate::checker::unfold_equality(
                crate::checker::EqualitySugar::Eq,
                &cod,
                &ap(v("phi"), [v("x")]),
                &ap(v("phi"), [v("y")]),
            );
            Ok(Formula::forall(
                "phi",
                s.clone(),
                Formula::forall(
                    "x",
                    dom.clone(),
                    Formula::forall("y", dom, Formula::implies(arg_eq, out_eq)),
                ),
            ))
        }
        Mp => {
            let matrix = has_zero("f");
            Ok(Formula::forall(
                "f",
                t1(),
                Formula::implies(Formula::neg(Formula::neg(matrix.clone())), matrix),
            ))
        }
        PfTpE | PfTpA => {
            let phi = one_formula(schema, inst)?;
            check_internal(schema, phi, "phi")?;
            if inst.var_args.is_empty() {
                return Err(arity(schema, "nonempty transferred tuple expected"));
            }
            let tuple: BTreeSet<String> = inst.var_args.iter().map(|(n, _)| n.clone()).collect();
            let free = free_formula_vars(phi);
            if free != tuple {
                return Err(side(
                    schema,
                    "parameter-freeness: free variables of phi must be exactly the transferred tuple",
                    format!("free = {{{}}}", free.into_iter().collect::<Vec<_>>().join(", ")),
                ));
            }
            let quantify = |body: Formula, st: bool, ex: bool| -> Formula {
                inst.var_args.iter().rev().fold(body, |acc, (n, ty)| match (st, ex) {
                    (false, true) => Formula::exists(n, ty.clone(), acc),
                    (true, true) => Formula::exists_st(n, ty.clone(), acc),
                    (false, false) => Formula::forall(n, ty.clone(), acc),
                    (true, false) => Formula::forall_st(n, ty.clone(), acc),
                })
            };
            Ok(if schema == PfTpE {
                Formula::implies(
                    quantify(phi.clone(), false, true),
                    quantify(phi.clone(), true, true),
                )
            } else {
                Formula::implies(
                    quantify(phi.clone(), true, false),
                    quantify(phi.clone(), false, false),
                )
            })
        }
        Pi01Trans => {
            let all_zero = |st: bool| {
                let body = eq(ap(v("f"), [v("n")]), Term::Zero);
                if st {
                    Formula::forall_st("n", t0(), body)
                } else {
                    Formula::forall("n", t0(), body)
                }
            };
            Ok(Formula::forall_st(
                "f",
                t1(),
                Formula::implies(all_zero(true), all_zero(false)),
            ))
        }
        E2Exists => Ok(Formula::exists(
            "phi",
            t2(),
            Formula::forall("f", t1(), tj_matrix("f", "phi")),
        )),
        TjSt => Ok(Formula::exists_st(
            "phi",
            t2(),
            Formula::forall_st("f", t1(), tj_matrix("f", "phi")),
        )),
        Aca0 => {
            let tf = FiniteType::arrow(t0(), t1());
            let row_zero =
                Formula::exists("m", t0(), eq(ap(v("f"), [v("n"), v("m")]), Term::Zero));
            let matrix = Formula::and(
                Formula::implies(row_zero.clone(), eq(ap(v("g"), [v("n")]), Term::Zero)),
                Formula::implies(eq(ap(v("g"), [v("n")]), Term::Zero), row_zero),
            );
            Ok(Formula::forall(
                "f",
                tf,
                Formula::implies(
                    is_binary2("f"),
                    Formula::exists(
                        "g",
                        t1(),
                        Formula::and(is_binary("g"), Formula::forall("n", t0(), matrix)),
                    ),
                ),
            ))
        }
        Wt => {
            let hit = |st: bool| {
                let body = Formula::and(is_binary("f"), eq(ap(v("Y"), [v("f")]), Term::Zero));
                if st {
                    Formula::exists_st("f", t1(), body)
                } else {
                    Formula::exists("f", t1(), body)
                }
            };
            Ok(Formula::forall_st(
                "Y",
                t2(),
                Formula::implies(hit(false), hit(true)),
            ))
        }
        Fan => {
            let out = |x: &str, n: &str| {
                eq(ap(v("T"), [ap(v("bar"), [v(x), v(n)])]), Term::Zero)
            };
            Ok(Formula::forall(
                "T",
                t1(),
                Formula::implies(
                    is_binary("T"),
                    Formula::implies(
                        Formula::forall(
                            "a",
                            t1(),
                            Formula::implies(
                                is_binary("a"),
                                Formula::exists("m", t0(), out("a", "m")),
                            ),
                        ),
                        Formula::exists(
                            "n",
                            t0(),
                            Formula::forall(
                                "b",
                                t1(),
                                Formula::implies(is_binary("b"), out("b", "n")),
                            ),
                        ),
                    ),
                ),
            ))
        }
        Wkl => {
            let in_tree =
                |x: &str, n: &str| eq(ap(v("T"), [ap(v("bar"), [v(x), v(n)])]), Term::NumLit(1));
            Ok(Formula::forall(
                "T",
                t1(),
                Formula::implies(
                    is_binary("T"),
                    Formula::implies(
                        Formula::forall(
                            "n",
                            t0(),
                            Formula::exists(
                                "b",
                                t1(),
                                Formula::and(is_binary("b"), in_tree("b", "n")),
                            ),
                        ),
                        Formula::exists(
                            "a",
                            t1(),
                            Formula::and(
                                is_binary("a"),
                                Formula::forall("m", t0(), in_tree("a", "m")),
                            ),
                        ),
                    ),
                ),
            ))
        }
        Uwkl => {
            let psi_ty = FiniteType::arrow(t1(), t1());
            let in_tree_b =
                eq(ap(v("T"), [ap(v("bar"), [v("b"), v("n")])]), Term::NumLit(1));
            let in_tree_psi = eq(
                ap(v("T"), [ap(v("bar"), [ap(v("Psi"), [v("T")]), v("m")])]),
                Term::NumLit(1),
            );
            Ok(Formula::exists(
                "Psi",
                psi_ty,
                Formula::forall(
                    "T",
                    t1(),
                    Formula::implies(
                        is_binary("T"),
                        Formula::implies(
                            Formula::forall(
                                "n",
                                t0(),
                                Formula::exists(
                                    "b",
                                    t1(),
                                    Formula::and(is_binary("b"), in_tree_b.clone()),
                                ),
                            ),
                            Formula::forall("m", t0(), in_tree_psi.clone()),
                        ),
                    ),
                ),
            ))
        }
        HbuC => {
            let wt = FiniteType::arrow(t0(), t1());
            let member = Formula::bforall(
                "j",
                ap(v("G"), [ap(v("w"), [v("i")])]),
                eq(ap(v("a"), [v("j")]), ap(v("w"), [v("i"), v("j")])),
            );
            Ok(Formula::forall(
                "G",
                t2(),
                Formula::exists(
                    "w",
                    wt,
                    Formula::exists(
                        "k",
                        t0(),
                        Formula::forall(
                            "a",
                            t1(),
                            Formula::implies(is_binary("a"), Formula::bexists("i", v("k"), member)),
                        ),
                    ),
                ),
            ))
        }
        Muc => {
            let om_ty = FiniteType::arrow(t2(), t0());
            Ok(Formula::exists(
                "Om",
                om_ty,
                Formula::forall(
                    "Y",
                    t2(),
                    Formula::forall(
                        "f",
                        t1(),
                        Formula::forall(
                            "g",
                            t1(),
                            Formula::implies(
                                is_binary("f"),
                                Formula::implies(
                                    is_binary("g"),
                                    Formula::implies(
                                        agreement("f", "g", ap(v("Om"), [v("Y")])),
                                        eq(ap(v("Y"), [v("f")]), ap(v("Y"), [v("g")])),
                                    ),
                                ),
                            ),
                        ),
                    ),
                ),
            ))
        }
        Se => Ok(Formula::forall(
            "Y",
            t2(),
            Formula::forall(
                "f",
                t1(),
                Formula::forall(
                    "g",
                    t1(),
                    Formula::implies(
                        Formula::neg(eq(ap(v("Y"), [v("f")]), ap(v("Y"), [v("g")]))),
                        Formula::exists(
                            "z",
                            t0(),
                            Formula::neg(eq(ap(v("f"), [v("z")]), ap(v("g"), [v("z")]))),
                        ),
                    ),
                ),
            ),
        )),
        ContC => {
            let y = inst
                .term_args
                .first()
                .ok_or_else(|| arity(schema, "term argument Y expected"))?;
            Ok(cont_c(y))
        }
        BctC => Ok(Formula::forall("Y", t2(), cont_c(&v("Y")))),
        WcN | WcN0 => {
            let [(a, aty), (n, nty)] = two_vars(schema, inst)?;
            if aty != t1() || nty != t0() {
                return Err(side(schema, "variables must be (alpha: 1, n: 0)", "types"));
            }
            let phi = one_formula(schema, inst)?;
            if schema == WcN0 && !is_qf_modulo_bounded(phi) {
                return Err(side(
                    schema,
                    "quantifier-free matrix required (bounded number quantifiers allowed)",
                    phi,
                ));
            }
            let names = fresh_against(&["m", "b"], &[phi]);
            let (m, bvar) = (&names[0], &names[1]);
            let phi_bm = subst_formula(&subst_formula(phi, &a, &v(bvar)), &n, &v(m));
            let prem = Formula::forall(&a, t1(), Formula::exists(&n, t0(), phi.clone()));
            let concl = Formula::forall(
                &a,
                t1(),
                Formula::exists(
                    &n,
                    t0(),
                    Formula::exists(
                        m,
                        t0(),
                        Formula::forall(
                            bvar,
                            t1(),
                            Formula::implies(agreement(&a, bvar, v(&n)), phi_bm),
                        ),
                    ),
                ),
            );
            Ok(Formula::implies(prem, concl))
        }
        CctC => {
            let c = cont_c(&v("Y"));
            Ok(Formula::forall_st(
                "Y",
                t2(),
                Formula::implies(c.clone(), relativize(&c)),
            ))
        }
        Ks0 => {
            let tf = FiniteType::arrow(t0(), t1());
            let alpha_zero =
                Formula::forall("k", t0(), eq(ap(v("a"), [v("k"), v("m")]), Term::Zero));
            let beta_zero =
                Formula::exists("n", t0(), eq(ap(v("b"), [v("n"), v("m")]), Term::Zero));
            let matrix = Formula::and(
                Formula::implies(alpha_zero.clone(), beta_zero.clone()),
                Formula::implies(beta_zero, alpha_zero),
            );
            Ok(Formula::forall(
                "a",
                tf.clone(),
                Formula::implies(
                    is_binary2("a"),
                    Formula::exists(
                        "b",
                        tf,
                        Formula::and(is_binary2("b"), Formula::forall("m", t0(), matrix)),
                    ),
                ),
            ))
        }
        Ct => {
            let halts = Formula::exists(
                "s",
                t0(),
                eq(ap(v("haltv"), [v("e"), v("n"), v("s")]), Term::succ_of(v("m"))),
            );
            let fv = eq(ap(v("f"), [v("n")]), v("m"));
            let matrix = Formula::and(
                Formula::implies(halts.clone(), fv.clone()),
                Formula::implies(fv, halts),
            );
            Ok(Formula::forall(
                "f",
                t1(),
                Formula::exists(
                    "e",
                    t0(),
                    Formula::forall("n", t0(), Formula::forall("m", t0(), matrix)),
                ),
            ))
        }
        QfAc => {
            if inst.var_args.len() < 2 {
                return Err(arity(schema, "variable tuple (x1..xk, y) expected, y last"));
            }
            let psi = one_formula(schema, inst)?;
            check_internal(schema, psi, "psi")?;
            if !is_qf_modulo_bounded(psi) {
                return Err(side(
                    schema,
                    "quantifier-free matrix required (bounded number quantifiers allowed)",
                    psi,
                ));
            }
            let (y, yty) = inst.var_args.last().cloned().expect("nonempty");
            let xs = &inst.var_args[..inst.var_args.len() - 1];
            let allowed: BTreeSet<String> =
                inst.var_args.iter().map(|(n, _)| n.clone()).collect();
            let free = free_formula_vars(psi);
            if !free.is_subset(&allowed) {
                return Err(side(
                    schema,
                    "free variables of psi must lie in the tuple",
                    format!("{:?}", free.difference(&allowed).collect::<Vec<_>>()),
                ));
            }
            let names = fresh_against(&["F"], &[psi]);
            let fvar = &names[0];
            let fty = xs
                .iter()
                .rev()
                .fold(yty.clone(), |acc, (_, t)| FiniteType::arrow(t.clone(), acc));
            let fx = ap(v(fvar), xs.iter().map(|(n, _)| v(n)));
            let psi_choice = subst_formula(psi, &y, &fx);
            let prem = xs.iter().rev().fold(
                Formula::exists(&y, yty.clone(), psi.clone()),
                |acc, (n, t)| Formula::forall(n, t.clone(), acc),
            );
            let concl_inner = xs
                .iter()
                .rev()
                .fold(psi_choice, |acc, (n, t)| Formula::forall(n, t.clone(), acc));
            Ok(Formula::implies(prem, Formula::exists(fvar, fty, concl_inner)))
        }
        Simpler => {
            let below = Formula::forall_st(
                "k",
                t0(),
                eq(ap(v("ratbelow"), [ap(v("x"), [v("k")]), v("k")]), Term::NumLit(1)),
            );
            let above = Formula::forall_st(
                "k",
                t0(),
                eq(ap(v("ratabove"), [ap(v("x"), [v("k")]), v("k")]), Term::NumLit(1)),
            );
            Ok(Formula::exists_st(
                "Phi",
                t2(),
                Formula::forall(
                    "x",
                    t1(),
                    Formula::and(
                        Formula::implies(eq(ap(v("Phi"), [v("x")]), Term::Zero), below),
                        Formula::implies(eq(ap(v("Phi"), [v("x")]), Term::NumLit(1)), above),
                    ),
                ),
            ))
        }
        Gafot => {
            let y = inst
                .term_args
                .first()
                .ok_or_else(|| arity(schema, "term argument Y expected"))?;
            let approx_eq =
                Formula::forall_st("z", t0(), eq(ap(v("f"), [v("z")]), ap(v("g"), [v("z")])));
            Ok(Formula::forall_st(
                "f",
                t1(),
                Formula::implies(
                    is_binary("f"),
                    Formula::forall(
                        "g",
                        t1(),
                        Formula::implies(
                            is_binary("g"),
                            Formula::implies(
                                approx_eq,
                                eq(ap(y.clone(), [v("f")]), ap(y.clone(), [v("g")])),
                            ),
                        ),
                    ),
                ),
            ))
        }
        NearStd => {
            let y = inst
                .term_args
                .first()
                .ok_or_else(|| arity(schema, "term argument Y expected"))?;
            Ok(Formula::forall_st(
                "f",
                t1(),
                Formula::exists_st("n", t0(), eq(ap(y.clone(), [v("f")]), v("n"))),
            ))
        }
        Arith(fact) => Ok(arith_formula(fact)),
        NsLt => {
            if inst.term_args.len() != 2 {
                return Err(arity(schema, "numeral and constant expected"));
            }
            let n = &inst.term_args[0];
            let big = &inst.term_args[1];
            if n.as_numeral().is_none() {
                return Err(side(schema, "first term argument must be a numeral", n));
            }
            Ok(leq0_atom(Term::succ_of(n.clone()), big.clone()))
        }
    }
}

fn two_vars(
    schema: SchemaId,
    inst: &Instantiation,
) -> Result<[(String, FiniteType); 2], SchemaError> {
    if inst.var_args.len() != 2 {
        return Err(arity(schema, "two (variable, type) arguments expected"));
    }
    Ok([inst.var_args[0].clone(), inst.var_args[1].clone()])
}

fn one_formula<'a>(schema: SchemaId, inst: &'a Instantiation) -> Result<&'a Formula, SchemaError> {
    inst.formula_args
        .first()
        .ok_or_else(|| arity(schema, "one formula argument expected"))
}

/// The fixed internal arithmetic lemmas over the monus/iszero/eqnat
/// combinators. Each is validated by exhaustive small-range evaluation in the
/// test suite.
pub fn arith_formula(fact: ArithFact) -> Formula {
    use ArithFact::*;
    let m = |a: Term, b: Term| ap(terms::monus(), [a, b]);
    let le = |a: Term, b: Term| eq(m(a, b), Term::Zero);
    let fa = |x: &str, body: Formula| Formula::forall(x, t0(), body);
    match fact {
        LeqRefl => fa("a", le(v("a"), v("a"))),
        LeqTrans => fa(
            "a",
            fa(
                "b",
                fa(
                    "c",
                    Formula::implies(
                        le(v("a"), v("b")),
                        Formula::implies(le(v("b"), v("c")), le(v("a"), v("c"))),
                    ),
                ),
            ),
        ),
        LeqSucc => fa("a", le(v("a"), Term::succ_of(v("a")))),
        LeqSuccMono => fa(
            "a",
            fa(
                "b",
                Formula::implies(
                    le(v("a"), v("b")),
                    le(Term::succ_of(v("a")), Term::succ_of(v("b"))),
                ),
            ),
        ),
        MonusSuccSelf => fa("a", eq(m(Term::succ_of(v("a")), v("a")), Term::NumLit(1))),
        MonusUpper => fa("a", fa("b", le(m(v("a"), v("b")), v("a")))),
        MinUpper => fa("a", fa("b", le(m(v("a"), m(v("a"), v("b"))), v("b")))),
        SignZero => fa(
            "k",
            Formula::implies(
                eq(m(Term::NumLit(1), ap(terms::iszero(), [v("k")])), Term::Zero),
                eq(v("k"), Term::Zero),
            ),
        ),
        IszeroNonzero => fa(
            "a",
            Formula::implies(
                Formula::neg(eq(v("a"), Term::Zero)),
                eq(ap(terms::iszero(), [v("a")]), Term::Zero),
            ),
        ),
        EqnatNeq => fa(
            "a",
            fa(
                "b",
                Formula::implies(
                    Formula::neg(eq(v("a"), v("b"))),
                    eq(ap(terms::eqnat(), [v("a"), v("b")]), Term::Zero),
                ),
            ),
        ),
        EqnatEqZero => fa(
            "a",
            fa(
                "b",
                Formula::implies(
                    eq(ap(terms::eqnat(), [v("a"), v("b")]), Term::Zero),
                    Formula::neg(eq(v("a"), v("b"))),
                ),
            ),
        ),
        EqDec => fa(
            "a",
            fa(
                "b",
                Formula::or(eq(v("a"), v("b")), Formula::neg(eq(v("a"), v("b")))),
            ),
        ),
        BoundedSearch => Formula::forall(
            "f",
            t1(),
            fa(
                "m",
                Formula::or(
                    Formula::forall(
                        "n",
                        t0(),
                        Formula::implies(
                            le(v("n"), v("m")),
                            Formula::neg(eq(ap(v("f"), [v("n")]), Term::Zero)),
                        ),
                    ),
                    Formula::exists(
                        "n",
                        t0(),
                        Formula::and(le(v("n"), v("m")), eq(ap(v("f"), [v("n")]), Term::Zero)),
                    ),
                ),
            ),
        ),
    }
}

// ---------------------------------------------------------------------------
// Finite model checking of instances
// ---------------------------------------------------------------------------

/// How `st` is interpreted in the finite model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StInterp {
    /// Everything is standard.
    All,
    /// The <=*-downward closure of the constant-k majorant, computed by
    /// fixpoint (downward closed by construction).
    Threshold(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelVerdict {
    Valid,
    Countermodel { assignment: Vec<(String, String)> },
    Inconclusive { reason: String },
}

pub struct ModelChecker {
    pub b: u64,
    pub cap: u64,
    pub st: StInterp,
    pub budget: u64,
    std_sets: HashMap<FiniteType, HashSet<ModelElement>>,
    spent: u64,
}

impl ModelChecker {
    pub fn new(b: u64, cap: u64, st: StInterp, budget: u64) -> ModelChecker {
        ModelChecker {
            b,
            cap,
            st,
            budget,
            std_sets: HashMap::new(),
            spent: 0,
        }
    }

    fn tick(&mut self) -> Result<(), String> {
        self.spent += 1;
        if self.spent > self.budget {
            Err(format!("budget {} exceeded", self.budget))
        } else {
            Ok(())
        }
    }

    /// The constant-k majorant at a type.
    fn const_elem(&self, ty: &FiniteType, k: u64) -> Result<ModelElement, EvalError> {
        match ty {
            FiniteType::Base => Ok(ModelElement::Nat(k.min(self.b))),
            FiniteType::Product(l, r) => Ok(ModelElement::Pair(
                Box::new(self.const_elem(l, k)?),
                Box::new(self.const_elem(r, k)?),
            )),
            FiniteType::Arrow(d, c) => {
                let n = enumerate_model(d, self.b, self.cap)?.len();
                Ok(ModelElement::Table(vec![self.const_elem(c, k)?; n]))
            }
        }
    }

    fn std_set(&mut self, ty: &FiniteType) -> Result<HashSet<ModelElement>, String> {
        if let Some(s) = self.std_sets.get(ty) {
            return Ok(s.clone());
        }
        let set: HashSet<ModelElement> = match self.st {
            StInterp::All => enumerate_model(ty, self.b, self.cap)
                .map_err(|e| e.to_string())?
                .into_iter()
                .collect(),
            StInterp::Threshold(k) => {
                let all = enumerate_model(ty, self.b, self.cap).map_err(|e| e.to_string())?;
                let seed = self.const_elem(ty, k).map_err(|e| e.to_string())?;
                let mut set: HashSet<ModelElement> = HashSet::new();
                set.insert(seed);
                loop {
                    let mut grew = false;
                    for x in &all {
                        if set.contains(x) {
                            continue;
                        }
                        for y in set.clone() {
                            if leq_star_model(x, &y, ty, self.b, self.cap)
                                .map_err(|e| e.to_string())?
                            {
                                set.insert(x.clone());
                                grew = true;
                                break;
                            }
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                set
            }
        };
        self.std_sets.insert(ty.clone(), set.clone());
        Ok(set)
    }

    fn eval(
        &mut self,
        f: &Formula,
        env: &mut Vec<(String, FiniteType, ModelElement)>,
    ) -> Result<bool, String> {
        self.tick()?;
        match f {
            Formula::Falsum => Ok(false),
            Formula::AtomEq0(a, b) => {
                let ea = self.eval_term(a, env)?;
                let eb = self.eval_term(b, env)?;
                Ok(ea == eb)
            }
            Formula::St(ty, t) => {
                let e = self.eval_term(t, env)?;
                let s = self.std_set(ty)?;
                Ok(s.contains(&e))
            }
            Formula::And(a, b) => Ok(self.eval(a, env)? && self.eval(b, env)?),
            Formula::Or(a, b) => Ok(self.eval(a, env)? || self.eval(b, env)?),
            Formula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::Forall(x, ty, body) | Formula::ForallSt(x, ty, body) => {
                let st_guard = matches!(f, Formula::ForallSt(..));
                let elems = enumerate_model(ty, self.b, self.cap).map_err(|e| e.to_string())?;
                for e in elems {
                    if st_guard && !self.std_set(ty)?.contains(&e) {
                        continue;
                    }
                    env.push((x.clone(), ty.clone(), e));
                    let r = self.eval(body, env)?;
                    env.pop();
                    if !r {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists(x, ty, body) | Formula::ExistsSt(x, ty, body) => {
                let st_guard = matches!(f, Formula::ExistsSt(..));
                let elems = enumerate_model(ty, self.b, self.cap).map_err(|e| e.to_string())?;
                for e in elems {
                    if st_guard && !self.std_set(ty)?.contains(&e) {
                        continue;
                    }
                    env.push((x.clone(), ty.clone(), e));
                    let r = self.eval(body, env)?;
                    env.pop();
                    if r {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::ForallMonSt(x, ty, body) | Formula::ExistsMonSt(x, ty, body) => {
                let existential = matches!(f, Formula::ExistsMonSt(..));
                let elems = enumerate_model(ty, self.b, self.cap).map_err(|e| e.to_string())?;
                for e in elems {
                    if !self.std_set(ty)?.contains(&e)
                        || !leq_star_model(&e, &e, ty, self.b, self.cap)
                            .map_err(|er| er.to_string())?
                    {
                        continue;
                    }
                    env.push((x.clone(), ty.clone(), e));
                    let r = self.eval(body, env)?;
                    env.pop();
                    if existential && r {
                        return Ok(true);
                    }
                    if !existential && !r {
                        return Ok(false);
                    }
                }
                Ok(!existential)
            }
            Formula::BoundedNumForall(x, bound, body)
            | Formula::BoundedNumExists(x, bound, body) => {
                let existential = matches!(f, Formula::BoundedNumExists(..));
                let bv = match self.eval_term(bound, env)? {
                    ModelElement::Nat(n) => n,
                    _ => return Err("bound did not evaluate to a number".into()),
                };
                for i in 0..=bv.min(self.b) {
                    env.push((x.clone(), FiniteType::Base, ModelElement::Nat(i)));
                    let r = self.eval(body, env)?;
                    env.pop();
                    if existential && r {
                        return Ok(true);
                    }
                    if !existential && !r {
                        return Ok(false);
                    }
                }
                Ok(!existential)
            }
        }
    }

    fn eval_term(
        &mut self,
        t: &Term,
        env: &[(String, FiniteType, ModelElement)],
    ) -> Result<ModelElement, String> {
        let mut menv = ModelEnv::new();
        for (n, ty, e) in env {
            menv.bind(n, ty.clone(), e.clone());
        }
        eval_finite_model(t, self.b, &menv, Fuel::default()).map_err(|e| e.to_string())
    }

    /// Walks a failed universal prefix to exhibit a concrete countermodel
    /// assignment.
    fn countermodel(
        &mut self,
        f: &Formula,
        env: &mut Vec<(String, FiniteType, ModelElement)>,
    ) -> Result<Vec<(String, String)>, String> {
        match f {
            Formula::Forall(x, ty, body) | Formula::ForallSt(x, ty, body) => {
                let st_guard = matches!(f, Formula::ForallSt(..));
                let elems = enumerate_model(ty, self.b, self.cap).map_err(|e| e.to_string())?;
                for e in elems {
                    if st_guard && !self.std_set(ty)?.contains(&e) {
                        continue;
                    }
                    env.push((x.clone(), ty.clone(), e.clone()));
                    let holds = self.eval(body, env)?;
                    if !holds {
                        let mut out = self.countermodel(body, env)?;
                        out.insert(0, (x.clone(), format!("{e:?}")));
                        env.pop();
                        return Ok(out);
                    }
                    env.pop();
                }
                Ok(vec![])
            }
            Formula::Implies(a, b) => {
                if self.eval(a, env)? {
                    self.countermodel(b, env)
                } else {
                    Ok(vec![])
                }
            }
            _ => Ok(vec![]),
        }
    }
}

/// Checks a closed instance in the B-truncated model under the chosen
/// standardness interpretation.
pub fn model_check_instance(
    formula: &Formula,
    b: u64,
    cap: u64,
    st: StInterp,
    budget: u64,
) -> ModelVerdict {
    if let Err(e) = wf_formula(formula, &Context::new()) {
        return ModelVerdict::Inconclusive {
            reason: format!("not a closed well-formed instance: {e}"),
        };
    }
    let mut mc = ModelChecker::new(b, cap, st, budget);
    let mut env = Vec::new();
    match mc.eval(formula, &mut env) {
        Ok(true) => ModelVerdict::Valid,
        Ok(false) => {
            let assignment = mc.countermodel(formula, &mut env).unwrap_or_default();
            ModelVerdict::Countermodel { assignment }
        }
        Err(reason) => ModelVerdict::Inconclusive { reason },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::alpha_eq_formula;
    use crate::evaluator::DEFAULT_MODEL_CAP;
    use crate::syntax::{parse_formula, parse_term};

    #[test]
    fn catalog_is_stable_and_large_enough() {
        let c = catalog();
        assert!(c.len() >= 30);
        let i_entry = c.iter().find(|e| e.id == SchemaId::I).unwrap();
        assert!(i_entry.side_conditions.contains("internal"));
        let ia_entry = c.iter().find(|e| e.id == SchemaId::IaSt).unwrap();
        assert!(ia_entry.side_conditions.to_lowercase().contains("any"));
        let mut names = BTreeSet::new();
        for e in &c {
            assert!(names.insert(e.id.name()));
            assert_eq!(SchemaId::parse(e.id.name()), Some(e.id));
        }
    }

    #[test]
    fn pf_tp_e_example() {
        let phi = parse_formula("x = x").unwrap();
        let inst = Instantiation::of(SchemaId::PfTpE)
            .with_vars([("x".to_string(), FiniteType::Base)])
            .with_formulas([phi]);
        let f = instantiate(&inst).unwrap();
        assert_eq!(
            f,
            parse_formula("(exists x:0. x = x) -> (exists-st x:0. x = x)").unwrap()
        );
        assert!(!is_internal(&f));
        assert!(free_formula_vars(&f).is_empty());
    }

    #[test]
    fn pf_tp_rejects_parameters() {
        let phi = parse_formula("x = y").unwrap(); // y is a parameter
        let inst = Instantiation::of(SchemaId::PfTpE)
            .with_vars([("x".to_string(), FiniteType::Base)])
            .with_formulas([phi]);
        assert!(matches!(
            instantiate(&inst),
            Err(SchemaError::SideCondition { .. })
        ));
    }

    #[test]
    fn i_rejects_external_phi() {
        let phi = parse_formula("st[0](y)").unwrap();
        let inst = Instantiation::of(SchemaId::I)
            .with_vars([
                ("x".to_string(), FiniteType::Base),
                ("y".to_string(), FiniteType::Base),
            ])
            .with_formulas([phi]);
        match instantiate(&inst) {
            Err(SchemaError::SideCondition { condition, .. }) => {
                assert!(condition.contains("internal"));
            }
            other => panic!("expected side condition error, got {other:?}"),
        }
    }

    #[test]
    fn extensionality_at_type_two() {
        let inst = Instantiation::of(SchemaId::E).with_types([FiniteType::type2()]);
        let f = instantiate(&inst).unwrap();
        let expected = parse_formula(
            "forall phi:(0->0)->0. forall x:0->0. forall y:0->0. \
             (forall z1:0. x z1 = y z1) -> phi x = phi y",
        )
        .unwrap();
        assert!(alpha_eq_formula(&f, &expected));
        // the relativized instance carries approximate equality in the premise
        let st = instantiate(&inst.clone().relativized()).unwrap();
        assert!(!is_internal(&st));
        let expected_st = parse_formula(
            "forall-st phi:(0->0)->0. forall-st x:0->0. forall-st y:0->0. \
             (forall-st z1:0. x z1 = y z1) -> phi x = phi y",
        )
        .unwrap();
        assert!(alpha_eq_formula(&st, &expected_st));
    }

    #[test]
    fn instances_are_closed_and_wf() {
        let mut ctx = Context::new();
        for (name, ty) in reserved_symbols() {
            ctx.declare(name, ty).unwrap();
        }
        let t_b = FiniteType::Base;
        let insts = vec![
            Instantiation::of(SchemaId::StA).with_types([FiniteType::nat_fn()]),
            Instantiation::of(SchemaId::StB).with_types([FiniteType::nat_fn()]),
            Instantiation::of(SchemaId::StC)
                .with_types([FiniteType::nat_fn()])
                .with_terms([crate::terms::one_fn()]),
            Instantiation::of(SchemaId::StD).with_types([t_b.clone(), t_b.clone()]),
            Instantiation::of(SchemaId::Maj).with_types([FiniteType::nat_fn()]),
            Instantiation::of(SchemaId::Mp),
            Instantiation::of(SchemaId::Pi01Trans),
            Instantiation::of(SchemaId::E2Exists),
            Instantiation::of(SchemaId::TjSt),
            Instantiation::of(SchemaId::Aca0),
            Instantiation::of(SchemaId::Wt),
            Instantiation::of(SchemaId::Fan),
            Instantiation::of(SchemaId::Wkl),
            Instantiation::of(SchemaId::Uwkl),
            Instantiation::of(SchemaId::HbuC),
            Instantiation::of(SchemaId::Muc),
            Instantiation::of(SchemaId::Se),
            Instantiation::of(SchemaId::BctC),
            Instantiation::of(SchemaId::CctC),
            Instantiation::of(SchemaId::Ks0),
            Instantiation::of(SchemaId::Ct),
            Instantiation::of(SchemaId::Simpler),
            Instantiation::of(SchemaId::ContC).with_terms([parse_term("lam f:0->0. 0").unwrap()]),
            Instantiation::of(SchemaId::Gafot).with_terms([parse_term("lam f:0->0. 0").unwrap()]),
            Instantiation::of(SchemaId::NearStd)
                .with_terms([parse_term("lam f:0->0. 0").unwrap()]),
        ];
        for inst in insts {
            let f = instantiate(&inst).unwrap_or_else(|e| panic!("{e}"));
            crate::checker::wf_formula(&f, &ctx)
                .unwrap_or_else(|e| panic!("{} not wf: {e}", inst.schema.unwrap()));
            let fv = free_formula_vars(&f);
            let reserved: BTreeSet<String> = reserved_symbols()
                .iter()
                .map(|(n, _)| n.to_string())
                .collect();
            assert!(
                fv.iter().all(|x| reserved.contains(x)),
                "{}: unexpected free vars {fv:?}",
                inst.schema.unwrap()
            );
        }
        for fact in ARITH_FACTS {
            let f = arith_formula(fact);
            crate::checker::wf_formula(&f, &Context::new()).unwrap();
            assert!(free_formula_vars(&f).is_empty());
            assert!(is_internal(&f));
        }
    }

    #[test]
    fn conclusion_of_pf_tp_is_external() {
        let phi = parse_formula("x = x").unwrap();
        let inst = Instantiation::of(SchemaId::PfTpE)
            .with_vars([("x".to_string(), FiniteType::Base)])
            .with_formulas([phi]);
        assert!(!is_internal(&instantiate(&inst).unwrap()));
    }

    #[test]
    fn monotone_desugaring_matches_definition() {
        // MAJ at base: x <=* y is monus x y = 0
        let inst = Instantiation::of(SchemaId::Maj).with_types([FiniteType::Base]);
        let f = instantiate(&inst).unwrap();
        let expected = Formula::forall_st(
            "x",
            FiniteType::Base,
            Formula::exists_st("y", FiniteType::Base, leq0_atom(v("x"), v("y"))),
        );
        assert!(alpha_eq_formula(&f, &expected));

        // I at base types desugars its monotone quantifier into a guarded
        // relativized forall
        let iphi = leq0_atom(v("y"), v("x"));
        let iinst = Instantiation::of(SchemaId::I)
            .with_vars([
                ("x".to_string(), FiniteType::Base),
                ("y".to_string(), FiniteType::Base),
            ])
            .with_formulas([iphi]);
        let f = instantiate(&iinst).unwrap();
        assert!(!is_internal(&f));
        match f {
            Formula::Implies(prem, _) => match *prem {
                Formula::ForallSt(_, _, body) => {
                    assert!(matches!(*body, Formula::Implies(..)));
                }
                other => panic!("premise should be a relativized monotone forall, got {other}"),
            },
            other => panic!("instance should be an implication, got {other}"),
        }
    }

    #[test]
    fn instantiate_injective_on_distinct_instantiations() {
        let a =
            instantiate(&Instantiation::of(SchemaId::Maj).with_types([FiniteType::Base])).unwrap();
        let b = instantiate(&Instantiation::of(SchemaId::Maj).with_types([FiniteType::nat_fn()]))
            .unwrap();
        assert!(!alpha_eq_formula(&a, &b));
    }

    #[test]
    fn model_check_maj_at_base() {
        let f =
            instantiate(&Instantiation::of(SchemaId::Maj).with_types([FiniteType::Base])).unwrap();
        let v = model_check_instance(&f, 2, DEFAULT_MODEL_CAP, StInterp::All, 1_000_000);
        assert_eq!(v, ModelVerdict::Valid);
    }

    #[test]
    fn model_check_st_b_with_threshold() {
        let f = instantiate(&Instantiation::of(SchemaId::StB).with_types([FiniteType::nat_fn()]))
            .unwrap();
        let v = model_check_instance(&f, 2, DEFAULT_MODEL_CAP, StInterp::Threshold(1), 10_000_000);
        assert_eq!(v, ModelVerdict::Valid);
    }

    #[test]
    fn model_check_budget_exceeded_is_inconclusive() {
        let f = instantiate(&Instantiation::of(SchemaId::StB).with_types([FiniteType::nat_fn()]))
            .unwrap();
        match model_check_instance(&f, 2, DEFAULT_MODEL_CAP, StInterp::All, 5) {
            ModelVerdict::Inconclusive { reason } => assert!(reason.contains("budget")),
            other => panic!("expected inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn tailored_e2_instance_has_threshold_countermodel() {
        // The mid-derivation form (∃^st φ)(∀f)[(∃^st n)(f n = 0) <-> φ f = 0]
        // with the inner ∀f unrelativized: once the standard world shrinks
        // below the full function space, no standard φ can decide
        // standard-zero-hitting for every f. The fully relativized instance,
        // by contrast, stays valid.
        let tailored = Formula::exists_st(
            "phi",
            t2(),
            Formula::forall(
                "f",
                t1(),
                Formula::and(
                    Formula::implies(
                        Formula::exists_st("n", t0(), eq(ap(v("f"), [v("n")]), Term::Zero)),
                        eq(ap(v("phi"), [v("f")]), Term::Zero),
                    ),
                    Formula::implies(
                        eq(ap(v("phi"), [v("f")]), Term::Zero),
                        Formula::exists_st("n", t0(), eq(ap(v("f"), [v("n")]), Term::Zero)),
                    ),
                ),
            ),
        );
        let v = model_check_instance(
            &tailored,
            1,
            DEFAULT_MODEL_CAP,
            StInterp::Threshold(0),
            10_000_000,
        );
        assert!(
            matches!(v, ModelVerdict::Countermodel { .. }),
            "expected countermodel at toy scale, got {v:?}"
        );

        let full = instantiate(&Instantiation::of(SchemaId::E2Exists).relativized()).unwrap();
        let v = model_check_instance(&full, 1, DEFAULT_MODEL_CAP, StInterp::Threshold(0), 10_000_000);
        assert_eq!(v, ModelVerdict::Valid);
    }

    #[test]
    fn ns_lt_requires_numeral() {
        let bad =
            Instantiation::of(SchemaId::NsLt).with_terms([Term::var("x"), Term::var("N")]);
        assert!(matches!(
            instantiate(&bad),
            Err(SchemaError::SideCondition { .. })
        ));
        let good = Instantiation::of(SchemaId::NsLt).with_terms([Term::num(3), Term::var("N")]);
        let f = instantiate(&good).unwrap();
        assert_eq!(
            free_formula_vars(&f),
            BTreeSet::from(["N".to_string()])
        );
    }
}
