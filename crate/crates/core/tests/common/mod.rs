#![allow(dead_code)]

use langinduct::grammar::{Production, Rule};
use langinduct::{Atom, Expr, ExpressionGrammar, FactorizedProgram, LanguageId, Prob};

/// Hand-built programs for the test languages, each paired with the
/// language every output must belong to. Termination probabilities are
/// chosen so that 24 enumerated flips leave little unexplored mass, and so
/// that 2048 samples cover the Dyck witness's branching support well.
pub const WITNESSES: [(&str, LanguageId, &str); 6] = [
    ("an", LanguageId::An, "(pair a (if (flip 0.5) nil (F1 nil)))"),
    ("abn", LanguageId::AbN, "(pair (pair a b) (if (flip 0.5) nil (F1 nil)))"),
    // the argument accumulates the b's still to be written
    (
        "anbn",
        LanguageId::AnBn,
        "(pair a (if (flip 0.5) (pair b x) (F1 (pair b x))))",
    ),
    (
        "anb2n",
        LanguageId::AnB2n,
        "(pair a (if (flip 0.5) (pair (pair b b) x) (F1 (pair (pair b b) x))))",
    ),
    (
        "dyck",
        LanguageId::Dyck,
        "(pair a (pair (if (flip 0.9) nil (F1 nil)) (pair b (if (flip 0.9) nil (F1 nil)))))",
    ),
    (
        "anbncn",
        LanguageId::AnBnCn,
        "(pair (pair a (if (flip 0.5) (pair b x) (F1 (pair b x)))) c)",
    ),
];

/// Further witnesses for languages that need several factors.
pub const EXTRA_WITNESSES: [(&str, LanguageId, &str); 3] = [
    // F1 draws a nonempty string, F2 doubles its argument
    ("xx", LanguageId::XX, "(pair (if (flip 0.5) a b) (if (flip 0.6) nil (F1 nil))) | (pair x x) | (F2 (F1 nil))"),
    (
        "xxr",
        LanguageId::XXR,
        "(if (flip 0.5) (pair a (pair (if (flip 0.6) nil (F1 nil)) a)) (pair b (pair (if (flip 0.6) nil (F1 nil)) b)))",
    ),
    // F2 writes a's and collects c's; F1 writes b's and appends c's then d's
    (
        "anbmcndm",
        LanguageId::AnBmCnDm,
        "(pair b (if (flip 0.5) (pair x d) (F1 (pair x d)))) | (pair a (if (flip 0.5) (F1 (pair x c)) (F2 (pair x c))))",
    ),
];

pub fn program(src: &str) -> FactorizedProgram {
    src.parse().unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// A grammar small enough to list every expression it can produce:
/// `list -> pair | if | atom`, `bool -> flip`, one token and three flip
/// weights, with recursion allowed down to depth 2.
pub fn micro_grammar() -> ExpressionGrammar {
    let mut prods = vec![
        Production::new(Rule::Pair, 1.0),
        Production::new(Rule::If, 1.0),
        Production::new(Rule::Atom, 1.0),
        Production::new(Rule::Flip, 1.0),
        Production::new(Rule::Token(Atom::new("a").unwrap()), 1.0),
    ];
    for t in [5, 7, 9] {
        prods.push(Production::new(Rule::Const(Prob::from_tenths(t).unwrap()), 1.0));
    }
    ExpressionGrammar::from_productions(prods, 2).unwrap()
}

/// Every single-factor program of [`micro_grammar`], built bottom-up from
/// the depth rule rather than from the sampler.
pub fn micro_space() -> Vec<FactorizedProgram> {
    fn level(depth: usize) -> Vec<Expr> {
        let mut out = vec![Expr::lit("a")];
        if depth > 2 {
            return out;
        }
        let below = level(depth + 1);
        for l in &below {
            for r in &below {
                out.push(Expr::pair(l.clone(), r.clone()));
            }
        }
        for t in [5, 7, 9] {
            for l in &below {
                for r in &below {
                    out.push(Expr::if_(Expr::flip(t), l.clone(), r.clone()));
                }
            }
        }
        out
    }
    level(1)
        .into_iter()
        .map(|e| FactorizedProgram::single(e).unwrap())
        .collect()
}
