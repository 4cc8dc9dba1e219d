//! Closed T-terms for the arithmetic primitives that defined notions and the
//! shipped proof scripts build on. `x <=_0 y` is rendered everywhere as the
//! atom `monus x y = 0`.

use crate::syntax::{FiniteType, Term};

fn lam0(x: &str, body: Term) -> Term {
    Term::lam(x, FiniteType::Base, body)
}

/// `pred : 0->0`, cut-off predecessor.
pub fn pred() -> Term {
    // lam n:0. Rec[0] n 0 (lam k:0. lam r:0. k)
    lam0(
        "n",
        Term::apps(
            Term::Rec(FiniteType::Base),
            [
                Term::var("n"),
                Term::Zero,
                lam0("k", lam0("r", Term::var("k"))),
            ],
        ),
    )
}

/// `monus : 0->0->0`, truncated subtraction `m ∸ n` by iterated cut-off
/// predecessor. Kept in beta-normal form so proof scripts can state the same
/// term verbatim:
/// `lam m:0. lam n:0. Rec[0] n m (lam k:0. lam r:0. Rec[0] r 0 (lam a:0. lam b:0. a))`.
pub fn monus() -> Term {
    lam0(
        "m",
        lam0(
            "n",
            Term::apps(
                Term::Rec(FiniteType::Base),
                [
                    Term::var("n"),
                    Term::var("m"),
                    lam0(
                        "k",
                        lam0(
                            "r",
                            Term::apps(
                                Term::Rec(FiniteType::Base),
                                [
                                    Term::var("r"),
                                    Term::Zero,
                                    lam0("a", lam0("b", Term::var("a"))),
                                ],
                            ),
                        ),
                    ),
                ],
            ),
        ),
    )
}

/// `add : 0->0->0`.
pub fn add() -> Term {
    lam0(
        "m",
        lam0(
            "n",
            Term::apps(
                Term::Rec(FiniteType::Base),
                [
                    Term::var("n"),
                    Term::var("m"),
                    lam0("k", lam0("r", Term::succ_of(Term::var("r")))),
                ],
            ),
        ),
    )
}

/// `iszero : 0->0`, `1` at `0` and `0` elsewhere.
pub fn iszero() -> Term {
    lam0(
        "n",
        Term::apps(
            Term::Rec(FiniteType::Base),
            [
                Term::var("n"),
                Term::NumLit(1),
                lam0("k", lam0("r", Term::Zero)),
            ],
        ),
    )
}

/// `or01 : 0->0->0` on 0/1 flags: `b` if `a = 0`, else `1`.
pub fn or01() -> Term {
    lam0(
        "a",
        lam0(
            "b",
            Term::apps(
                Term::Rec(FiniteType::Base),
                [
                    Term::var("a"),
                    Term::var("b"),
                    lam0("k", lam0("r", Term::NumLit(1))),
                ],
            ),
        ),
    )
}

/// `max0 : 0->0->0`, `(a ∸ b) + b`.
pub fn max0() -> Term {
    lam0(
        "a",
        lam0(
            "b",
            Term::apps(
                add(),
                [
                    Term::apps(monus(), [Term::var("a"), Term::var("b")]),
                    Term::var("b"),
                ],
            ),
        ),
    )
}

/// `min0 : 0->0->0`, `a ∸ (a ∸ b)`.
pub fn min0() -> Term {
    lam0(
        "a",
        lam0(
            "b",
            Term::apps(
                monus(),
                [
                    Term::var("a"),
                    Term::apps(monus(), [Term::var("a"), Term::var("b")]),
                ],
            ),
        ),
    )
}

/// `eqnat : 0->0->0`, the 0/1 equality test `iszero((a∸b)+(b∸a))`.
pub fn eqnat() -> Term {
    lam0(
        "a",
        lam0(
            "b",
            Term::app(
                iszero(),
                Term::apps(
                    add(),
                    [
                        Term::apps(monus(), [Term::var("a"), Term::var("b")]),
                        Term::apps(monus(), [Term::var("b"), Term::var("a")]),
                    ],
                ),
            ),
        ),
    )
}

/// `zfound : (0->0)->0->0`; `zfound f m = 1` iff `f` has a zero below `m`.
pub fn zfound() -> Term {
    Term::lam(
        "f",
        FiniteType::nat_fn(),
        lam0(
            "m",
            Term::apps(
                Term::Rec(FiniteType::Base),
                [
                    Term::var("m"),
                    Term::Zero,
                    lam0(
                        "k",
                        lam0(
                            "r",
                            Term::apps(
                                or01(),
                                [
                                    Term::var("r"),
                                    Term::app(
                                        iszero(),
                                        Term::app(Term::var("f"), Term::var("k")),
                                    ),
                                ],
                            ),
                        ),
                    ),
                ],
            ),
        ),
    )
}

/// The zero-detecting functional at scale `N`: returns `0` if `f` has a zero
/// at some index `<= N+1`, and `1` otherwise.
pub fn y0_term(n: u64) -> Term {
    Term::lam(
        "f",
        FiniteType::nat_fn(),
        Term::apps(
            monus(),
            [
                Term::NumLit(1),
                Term::apps(zfound(), [Term::var("f"), Term::num(n + 2)]),
            ],
        ),
    )
}

/// The sign transform `Z : 1 -> 1`: `Z f n = 0` iff `f n = 0`, else `1`.
pub fn z_term() -> Term {
    Term::lam(
        "f",
        FiniteType::nat_fn(),
        lam0(
            "n",
            Term::apps(
                monus(),
                [
                    Term::NumLit(1),
                    Term::app(iszero(), Term::app(Term::var("f"), Term::var("n"))),
                ],
            ),
        ),
    )
}

/// The constant-one function of type `1`.
pub fn one_fn() -> Term {
    lam0("k", Term::NumLit(1))
}

/// The constant-one functional of type `2`.
pub fn one_functional() -> Term {
    Term::lam("f", FiniteType::nat_fn(), Term::NumLit(1))
}

/// `x <= y` at type 0, i.e. `monus x y = 0`, as a term-level pair for reuse.
pub fn leq_term(x: Term, y: Term) -> Term {
    Term::apps(monus(), [x, y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{infer_type, Context};
    use crate::syntax::parse_type;

    #[test]
    fn combinators_are_closed_and_well_typed() {
        let ctx = Context::new();
        for (t, ty) in [
            (pred(), "0->0"),
            (monus(), "0->0->0"),
            (add(), "0->0->0"),
            (iszero(), "0->0"),
            (or01(), "0->0->0"),
            (max0(), "0->0->0"),
            (min0(), "0->0->0"),
            (eqnat(), "0->0->0"),
            (zfound(), "(0->0)->0->0"),
            (y0_term(3), "(0->0)->0"),
            (z_term(), "(0->0)->0->0"),
            (one_fn(), "0->0"),
            (one_functional(), "(0->0)->0"),
        ] {
            assert_eq!(infer_type(&t, &ctx).unwrap(), parse_type(ty).unwrap());
            assert!(crate::checker::free_term_vars(&t).is_empty());
        }
    }
}
