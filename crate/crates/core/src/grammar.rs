//! The probabilistic grammar over expressions.
//!
//! ```text
//! START       -> λx. list
//! list        -> pair(list, list) | Fi(list) | rest(list) | first(list)
//!              | if(bool, list, list) | ∅ | x | atom
//! bool        -> flip(probability) | empty(list)
//! atom        -> a | b | ...            (per-run alphabet)
//! probability -> 0.5 | 0.6 | 0.7 | 0.8 | 0.9
//! ```
//!
//! Weights default to uniform within each nonterminal. The `Fi(list)`
//! production's mass is shared equally among the factors callable from the
//! factor being generated (`F1..Fj` inside `Fj`).
//!
//! Sampling below `max_depth` only uses productions without a `list` slot.
//! Priors ignore that truncation; [`ExpressionGrammar::log_sample_prob`]
//! gives the probability under the truncated sampler, which is what
//! proposal densities need.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, FactorizedProgram, Prob, Sort};

pub const DEFAULT_MAX_DEPTH: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Nonterminal {
    Start,
    List,
    Bool,
    Atom,
    Probability,
}

/// Right-hand side of a production.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    Pair,
    Call,
    Rest,
    First,
    If,
    Nil,
    Arg,
    Atom,
    Flip,
    Empty,
    Token(Atom),
    Const(Prob),
}

impl Rule {
    pub const LIST: [Rule; 8] = [
        Rule::Pair,
        Rule::Call,
        Rule::Rest,
        Rule::First,
        Rule::If,
        Rule::Nil,
        Rule::Arg,
        Rule::Atom,
    ];

    pub fn lhs(self) -> Nonterminal {
        match self {
            Rule::Pair | Rule::Call | Rule::Rest | Rule::First | Rule::If | Rule::Nil | Rule::Arg | Rule::Atom => {
                Nonterminal::List
            }
            Rule::Flip | Rule::Empty => Nonterminal::Bool,
            Rule::Token(_) => Nonterminal::Atom,
            Rule::Const(_) => Nonterminal::Probability,
        }
    }

    /// Has a `list` slot on the right-hand side.
    pub fn is_recursive(self) -> bool {
        matches!(
            self,
            Rule::Pair | Rule::Call | Rule::Rest | Rule::First | Rule::If | Rule::Empty
        )
    }

    /// Configuration name of a list/bool rule.
    pub fn name(self) -> &'static str {
        match self {
            Rule::Pair => "pair",
            Rule::Call => "call",
            Rule::Rest => "rest",
            Rule::First => "first",
            Rule::If => "if",
            Rule::Nil => "nil",
            Rule::Arg => "x",
            Rule::Atom => "atom",
            Rule::Flip => "flip",
            Rule::Empty => "empty",
            Rule::Token(_) => "token",
            Rule::Const(_) => "probability",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::LIST
            .iter()
            .chain(&[Rule::Flip, Rule::Empty])
            .copied()
            .find(|r| r.name() == name)
    }

    fn of(e: &Expr) -> Rule {
        match e {
            Expr::Pair(..) => Rule::Pair,
            Expr::Call(..) => Rule::Call,
            Expr::Rest(_) => Rule::Rest,
            Expr::First(_) => Rule::First,
            Expr::If(..) => Rule::If,
            Expr::Nil => Rule::Nil,
            Expr::Arg => Rule::Arg,
            Expr::Lit(_) => Rule::Atom,
            Expr::Flip(_) => Rule::Flip,
            Expr::IsEmpty(_) => Rule::Empty,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Production {
    pub lhs: Nonterminal,
    pub rule: Rule,
    pub weight: f64,
}

impl Production {
    pub fn new(rule: Rule, weight: f64) -> Production {
        Production {
            lhs: rule.lhs(),
            rule,
            weight,
        }
    }
}

/// Weighted choices for one nonterminal.
#[derive(Clone, Debug)]
struct Choices<T> {
    options: Vec<(T, f64)>,
    total: f64,
    /// Total weight of the non-recursive options.
    leaf_total: f64,
}

impl<T> Default for Choices<T> {
    fn default() -> Self {
        Choices {
            options: Vec::new(),
            total: 0.0,
            leaf_total: 0.0,
        }
    }
}

impl<T: Copy + PartialEq> Choices<T> {
    fn push(&mut self, item: T, weight: f64, recursive: bool) {
        self.options.push((item, weight));
        self.total += weight;
        if !recursive {
            self.leaf_total += weight;
        }
    }

    fn weight(&self, item: T) -> Option<f64> {
        self.options.iter().find(|(t, _)| *t == item).map(|(_, w)| *w)
    }
}

#[derive(Clone, Debug)]
pub struct ExpressionGrammar {
    productions: Vec<Production>,
    max_depth: usize,
    list: Choices<Rule>,
    boolean: Choices<Rule>,
    atoms: Choices<Atom>,
    probs: Choices<Prob>,
}

impl ExpressionGrammar {
    /// Every list and bool production with weight 1, all five probabilities,
    /// and no atoms yet.
    pub fn base() -> ExpressionGrammar {
        let mut prods: Vec<Production> = Rule::LIST.iter().map(|&r| Production::new(r, 1.0)).collect();
        prods.push(Production::new(Rule::Flip, 1.0));
        prods.push(Production::new(Rule::Empty, 1.0));
        prods.extend(Prob::ALL.iter().map(|&p| Production::new(Rule::Const(p), 1.0)));
        ExpressionGrammar::from_productions(prods, DEFAULT_MAX_DEPTH).expect("base grammar is valid")
    }

    /// The default grammar over `alphabet`.
    pub fn standard(alphabet: &[Atom]) -> Result<ExpressionGrammar> {
        ExpressionGrammar::base().extend_with_atoms(alphabet)
    }

    /// Build from an explicit production list. Productions not listed are
    /// absent. `list -> atom` is ignored while the alphabet is empty.
    pub fn from_productions(productions: Vec<Production>, max_depth: usize) -> Result<ExpressionGrammar> {
        if max_depth == 0 {
            return Err(Error::Grammar("max_depth must be at least 1".into()));
        }
        let mut g = ExpressionGrammar {
            productions: Vec::new(),
            max_depth,
            list: Choices::default(),
            boolean: Choices::default(),
            atoms: Choices::default(),
            probs: Choices::default(),
        };
        let has_tokens = productions.iter().any(|p| matches!(p.rule, Rule::Token(_)));
        for p in &productions {
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(Error::Grammar(format!("weight of {:?} must be positive", p.rule)));
            }
            if p.lhs != p.rule.lhs() {
                return Err(Error::Grammar(format!("{:?} is not a {:?} production", p.rule, p.lhs)));
            }
            if g.productions.iter().any(|q| q.rule == p.rule) {
                return Err(Error::Grammar(format!("duplicate production {:?}", p.rule)));
            }
            match p.rule {
                Rule::Token(a) => g.atoms.push(a, p.weight, false),
                Rule::Const(c) => g.probs.push(c, p.weight, false),
                Rule::Flip | Rule::Empty => g.boolean.push(p.rule, p.weight, p.rule.is_recursive()),
                Rule::Atom if !has_tokens => {}
                r => g.list.push(r, p.weight, r.is_recursive()),
            }
            g.productions.push(*p);
        }
        if g.list.leaf_total <= 0.0 {
            return Err(Error::Grammar("list needs a production without a list slot".into()));
        }
        if g.list.weight(Rule::If).is_some() && g.boolean.leaf_total <= 0.0 {
            return Err(Error::Grammar("if needs bool -> flip".into()));
        }
        if g.boolean.weight(Rule::Flip).is_some() && g.probs.total <= 0.0 {
            return Err(Error::Grammar("flip needs at least one probability".into()));
        }
        Ok(g)
    }

    /// Add one uniformly weighted `atom -> token` production per token.
    pub fn extend_with_atoms(&self, alphabet: &[Atom]) -> Result<ExpressionGrammar> {
        if alphabet.is_empty() {
            return Err(Error::Grammar("alphabet is empty".into()));
        }
        let mut prods = self.productions.clone();
        for &a in alphabet {
            if prods.iter().any(|p| p.rule == Rule::Token(a)) {
                return Err(Error::Grammar(format!("duplicate atom {a}")));
            }
            prods.push(Production::new(Rule::Token(a), 1.0));
        }
        ExpressionGrammar::from_productions(prods, self.max_depth)
    }

    /// Change the weight of a production, adding it if absent.
    pub fn with_weight(&self, rule: Rule, weight: f64) -> Result<ExpressionGrammar> {
        let mut prods = self.productions.clone();
        match prods.iter_mut().find(|p| p.rule == rule) {
            Some(p) => p.weight = weight,
            None => prods.push(Production::new(rule, weight)),
        }
        ExpressionGrammar::from_productions(prods, self.max_depth)
    }

    /// Drop a production.
    pub fn without(&self, rule: Rule) -> Result<ExpressionGrammar> {
        let prods = self.productions.iter().copied().filter(|p| p.rule != rule).collect();
        ExpressionGrammar::from_productions(prods, self.max_depth)
    }

    pub fn with_max_depth(&self, max_depth: usize) -> Result<ExpressionGrammar> {
        ExpressionGrammar::from_productions(self.productions.clone(), max_depth)
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn alphabet(&self) -> Vec<Atom> {
        self.atoms.options.iter().map(|(a, _)| *a).collect()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Normalized probability of each production of `nt`, as used when
    /// generating factor `factor_index`. Calls are listed per callee.
    pub fn normalized(&self, nt: Nonterminal, factor_index: usize) -> Vec<(String, f64)> {
        match nt {
            Nonterminal::Start => vec![("λx. list".into(), 1.0)],
            Nonterminal::List => {
                let mut out = Vec::new();
                for &(r, w) in &self.list.options {
                    let p = w / self.list.total;
                    if r == Rule::Call {
                        for i in 1..=factor_index {
                            out.push((format!("F{i}(list)"), p / factor_index as f64));
                        }
                    } else {
                        out.push((r.name().to_string(), p));
                    }
                }
                out
            }
            Nonterminal::Bool => self
                .boolean
                .options
                .iter()
                .map(|&(r, w)| (r.name().to_string(), w / self.boolean.total))
                .collect(),
            Nonterminal::Atom => self
                .atoms
                .options
                .iter()
                .map(|&(a, w)| (a.to_string(), w / self.atoms.total))
                .collect(),
            Nonterminal::Probability => self
                .probs
                .options
                .iter()
                .map(|&(p, w)| (p.to_string(), w / self.probs.total))
                .collect(),
        }
    }

    pub fn sample_probability<R: Rng + ?Sized>(&self, rng: &mut R) -> Prob {
        pick(&self.probs.options, self.probs.total, rng)
    }

    pub fn sample_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> Atom {
        pick(&self.atoms.options, self.atoms.total, rng)
    }

    /// Sample an expression of sort `nt` for factor `factor_index`, rooted at
    /// depth 1 and truncated below `max_depth`.
    pub fn sample_expression<R: Rng + ?Sized>(
        &self,
        nt: Nonterminal,
        factor_index: usize,
        rng: &mut R,
        max_depth: usize,
    ) -> Result<Expr> {
        let sort = match nt {
            Nonterminal::Start | Nonterminal::List => Sort::List,
            Nonterminal::Bool => Sort::Bool,
            Nonterminal::Atom => return Ok(Expr::Lit(self.sample_atom(rng))),
            Nonterminal::Probability => {
                return Err(Error::Grammar(
                    "probability is not an expression; use sample_probability".into(),
                ))
            }
        };
        if factor_index == 0 {
            return Err(Error::Grammar("factor indices start at 1".into()));
        }
        Ok(self.sample_from(sort, factor_index, rng, 1, max_depth))
    }

    /// Sample a subtree whose root sits at `depth`, using the grammar's own depth limit.
    pub fn sample_at<R: Rng + ?Sized>(&self, sort: Sort, factor_index: usize, rng: &mut R, depth: usize) -> Expr {
        self.sample_from(sort, factor_index, rng, depth, self.max_depth)
    }

    fn sample_from<R: Rng + ?Sized>(
        &self,
        sort: Sort,
        factor: usize,
        rng: &mut R,
        depth: usize,
        max_depth: usize,
    ) -> Expr {
        let truncated = depth > max_depth;
        let choices = match sort {
            Sort::List => &self.list,
            Sort::Bool => &self.boolean,
        };
        let total = if truncated { choices.leaf_total } else { choices.total };
        let mut u = rng.gen::<f64>() * total;
        let mut rule = None;
        for &(r, w) in &choices.options {
            if truncated && r.is_recursive() {
                continue;
            }
            rule = Some(r);
            if u < w {
                break;
            }
            u -= w;
        }
        let rule = rule.expect("grammar has a non-recursive production");
        let d = depth + 1;
        let list = |rng: &mut R| Box::new(self.sample_from(Sort::List, factor, rng, d, max_depth));
        match rule {
            Rule::Pair => {
                let l = list(rng);
                let r = list(rng);
                Expr::Pair(l, r)
            }
            Rule::Call => {
                let callee = rng.gen_range(1..=factor);
                Expr::Call(callee, list(rng))
            }
            Rule::Rest => Expr::Rest(list(rng)),
            Rule::First => Expr::First(list(rng)),
            Rule::If => {
                let c = Box::new(self.sample_from(Sort::Bool, factor, rng, d, max_depth));
                let t = list(rng);
                let e = list(rng);
                Expr::If(c, t, e)
            }
            Rule::Nil => Expr::Nil,
            Rule::Arg => Expr::Arg,
            Rule::Atom => Expr::Lit(self.sample_atom(rng)),
            Rule::Flip => Expr::Flip(self.sample_probability(rng)),
            Rule::Empty => Expr::IsEmpty(list(rng)),
            Rule::Token(_) | Rule::Const(_) => unreachable!(),
        }
    }

    /// Log prior of a factor body: the sum of the log probabilities of the
    /// productions used, with no depth truncation.
    pub fn log_prior_expression(&self, expr: &Expr, factor_index: usize) -> Result<f64> {
        self.log_prob(expr, Sort::List, factor_index, None)
    }

    /// Log prior of a program, including a factor of 1/2 per factor.
    pub fn log_prior_program(&self, program: &FactorizedProgram) -> Result<f64> {
        let mut total = program.k() as f64 * 0.5f64.ln();
        for (i, f) in program.factors().iter().enumerate() {
            total += self.log_prior_expression(f, i + 1)?;
        }
        Ok(total)
    }

    /// Log probability that the truncated sampler produces `expr` for a slot
    /// of `sort` at `depth`. `-inf` if it cannot.
    pub fn log_sample_prob(&self, expr: &Expr, sort: Sort, factor_index: usize, depth: usize) -> f64 {
        self.log_prob(expr, sort, factor_index, Some(depth))
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn log_prob(&self, e: &Expr, sort: Sort, factor: usize, depth: Option<usize>) -> Result<f64> {
        if e.sort() != sort {
            return Err(Error::Grammar(format!("{e} in a {sort:?} slot")));
        }
        let rule = Rule::of(e);
        let choices = match sort {
            Sort::List => &self.list,
            Sort::Bool => &self.boolean,
        };
        let weight = choices
            .weight(rule)
            .ok_or_else(|| Error::Grammar(format!("production {} is not in the grammar", rule.name())))?;
        let truncated = depth.is_some_and(|d| d > self.max_depth);
        let mut lp = if truncated {
            if rule.is_recursive() {
                return Ok(f64::NEG_INFINITY);
            }
            (weight / choices.leaf_total).ln()
        } else {
            (weight / choices.total).ln()
        };
        match e {
            Expr::Call(k, _) => {
                if *k == 0 || *k > factor {
                    return Err(Error::Grammar(format!("F{k} is not callable from F{factor}")));
                }
                lp -= (factor as f64).ln();
            }
            Expr::Lit(a) => {
                let w = self
                    .atoms
                    .weight(*a)
                    .ok_or_else(|| Error::Grammar(format!("atom {a} is not in the alphabet")))?;
                lp += (w / self.atoms.total).ln();
            }
            Expr::Flip(p) => {
                let w = self
                    .probs
                    .weight(*p)
                    .ok_or_else(|| Error::Grammar(format!("probability {p} is not in the grammar")))?;
                lp += (w / self.probs.total).ln();
            }
            _ => {}
        }
        let child_depth = depth.map(|d| d + 1);
        for (c, s) in e.children() {
            lp += self.log_prob(c, s, factor, child_depth)?;
        }
        Ok(lp)
    }
}

fn pick<T: Copy, R: Rng + ?Sized>(options: &[(T, f64)], total: f64, rng: &mut R) -> T {
    let mut u = rng.gen::<f64>() * total;
    for &(item, w) in options {
        if u < w {
            return item;
        }
        u -= w;
    }
    options.last().expect("nonempty choice set").0
}

impl fmt::Display for ExpressionGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for nt in [
            Nonterminal::List,
            Nonterminal::Bool,
            Nonterminal::Atom,
            Nonterminal::Probability,
        ] {
            for (name, p) in self.normalized(nt, 1) {
                writeln!(f, "{nt:?} -> {name}\t{p:.4}")?;
            }
        }
        write!(f, "max_depth = {}", self.max_depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atoms;
    use crate::rng::SplitMix64;
    use std::collections::HashMap;

    fn grammar(alpha: &[&str]) -> ExpressionGrammar {
        ExpressionGrammar::standard(&atoms(alpha).unwrap()).unwrap()
    }

    #[test]
    fn normalization() {
        let g = grammar(&["a", "b", "c"]);
        for nt in [
            Nonterminal::Start,
            Nonterminal::List,
            Nonterminal::Bool,
            Nonterminal::Atom,
            Nonterminal::Probability,
        ] {
            for j in 1..=10 {
                let s: f64 = g.normalized(nt, j).iter().map(|(_, p)| p).sum();
                assert!((s - 1.0).abs() < 1e-12, "{nt:?} in F{j}");
            }
        }
    }

    #[test]
    fn atom_productions() {
        let g = grammar(&["a"]);
        assert_eq!(g.normalized(Nonterminal::Atom, 1), vec![("a".to_string(), 1.0)]);
        let g = grammar(&["a", "b"]);
        assert_eq!(
            g.normalized(Nonterminal::Atom, 1)
                .iter()
                .map(|x| x.1)
                .collect::<Vec<_>>(),
            vec![0.5, 0.5]
        );
        let g = grammar(&["d", "n", "v", "a", "that", "if", "then"]);
        assert_eq!(g.normalized(Nonterminal::Atom, 1).len(), 7);
        assert!(ExpressionGrammar::standard(&atoms(&["a", "a"]).unwrap()).is_err());
        assert!(g.extend_with_atoms(&atoms(&["a"]).unwrap()).is_err());
        assert!(ExpressionGrammar::base().extend_with_atoms(&[]).is_err());
    }

    #[test]
    fn call_productions_respect_factor_index() {
        let g = grammar(&["a"]);
        let names: Vec<_> = g.normalized(Nonterminal::List, 3).into_iter().map(|x| x.0).collect();
        assert!(names.contains(&"F3(list)".to_string()));
        assert!(!names.contains(&"F4(list)".to_string()));
        let e: Expr = "(F2 nil)".parse().unwrap();
        assert!(g.log_prior_expression(&e, 1).is_err());
        assert!(g.log_prior_expression(&e, 2).is_ok());
    }

    #[test]
    fn simple_priors() {
        let g = grammar(&["a"]);
        let l8 = (1.0f64 / 8.0).ln();
        let lp = g.log_prior_expression(&Expr::lit("a"), 1).unwrap();
        assert!((lp - l8).abs() < 1e-12);
        // bool -> flip, probability -> 0.5
        let b = g.log_prob(&Expr::flip(5), Sort::Bool, 1, None).unwrap();
        assert!((b - (0.5f64.ln() + 0.2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn geometric_program_prior_golden() {
        // pair, atom(a), if, flip, 0.7, nil, F1, nil under alphabet {a}:
        // six list productions at 1/8, bool->flip 1/2, p=0.7 1/5, atom->a 1, call share 1/1.
        let g = grammar(&["a"]);
        let e: Expr = "(pair a (if (flip 0.7) nil (F1 nil)))".parse().unwrap();
        let golden = 6.0 * (1.0f64 / 8.0).ln() + 0.5f64.ln() + 0.2f64.ln();
        assert!((g.log_prior_expression(&e, 1).unwrap() - golden).abs() < 1e-12);
        let p = FactorizedProgram::single(e).unwrap();
        assert!((g.log_prior_program(&p).unwrap() - (golden + 0.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn factor_penalty() {
        let g = grammar(&["a", "b"]);
        let f1: Expr = "(pair a (if (flip 0.7) nil (F1 nil)))".parse().unwrap();
        let one = FactorizedProgram::new(vec![f1.clone()]).unwrap();
        let two = FactorizedProgram::new(vec![f1.clone(), f1.clone()]).unwrap();
        let diff = g.log_prior_program(&two).unwrap() - g.log_prior_program(&one).unwrap();
        let expected = 0.5f64.ln() + g.log_prior_expression(&f1, 2).unwrap();
        assert!((diff - expected).abs() < 1e-12);
        let three = FactorizedProgram::new(vec![Expr::Nil, Expr::Nil, Expr::Nil]).unwrap();
        let nil = g.log_prior_expression(&Expr::Nil, 1).unwrap();
        assert!((g.log_prior_program(&three).unwrap() - (3.0 * nil + 3.0 * 0.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn probability_samples_uniform() {
        let g = grammar(&["a"]);
        let mut rng = SplitMix64::new(4);
        let mut counts = HashMap::new();
        let n = 50_000;
        for _ in 0..n {
            *counts.entry(g.sample_probability(&mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 5);
        let sd = (n as f64 * 0.2 * 0.8).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - 0.2 * n as f64).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn depth_boundary_forces_leaves() {
        let g = grammar(&["a", "b"]);
        let mut rng = SplitMix64::new(9);
        for _ in 0..2000 {
            let e = g.sample_expression(Nonterminal::List, 1, &mut rng, 0).unwrap();
            assert!(matches!(e, Expr::Nil | Expr::Arg | Expr::Lit(_)), "{e}");
        }
    }

    #[test]
    fn sampled_depth_is_bounded() {
        let g = grammar(&["a", "b"]);
        let mut rng = SplitMix64::new(10);
        for _ in 0..2000 {
            let e = g.sample_expression(Nonterminal::List, 3, &mut rng, 5).unwrap();
            let deepest = e.nodes(Sort::List).iter().map(|n| n.depth).max().unwrap();
            assert!(deepest <= 7, "{e}");
            assert!(e.max_call() <= 3);
            e.check_sorts(Sort::List).unwrap();
        }
    }

    #[test]
    fn root_production_frequency() {
        let g = grammar(&["a", "b"]);
        let mut rng = SplitMix64::new(12);
        let n = 40_000;
        let pairs = (0..n)
            .filter(|_| {
                matches!(
                    g.sample_expression(Nonterminal::List, 1, &mut rng, 20).unwrap(),
                    Expr::Pair(..)
                )
            })
            .count();
        let p = 1.0 / 8.0;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((pairs as f64 - n as f64 * p).abs() < 3.0 * sd);
    }

    #[test]
    fn sample_prob_matches_prior_above_cutoff() {
        let g = grammar(&["a"]);
        let e: Expr = "(pair a (if (flip 0.7) nil (F1 nil)))".parse().unwrap();
        let prior = g.log_prior_expression(&e, 1).unwrap();
        assert!((g.log_sample_prob(&e, Sort::List, 1, 1) - prior).abs() < 1e-12);
        // rooted at the cutoff only leaves are possible
        let shallow = g.with_max_depth(2).unwrap();
        assert_eq!(shallow.log_sample_prob(&e, Sort::List, 1, 3), f64::NEG_INFINITY);
        let leaf = shallow.log_sample_prob(&Expr::Nil, Sort::List, 1, 3);
        assert!((leaf - (1.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn invalid_grammars() {
        let only_pair = vec![Production::new(Rule::Pair, 1.0)];
        assert!(ExpressionGrammar::from_productions(only_pair, 5).is_err());
        let bad_weight = vec![Production::new(Rule::Nil, 0.0)];
        assert!(ExpressionGrammar::from_productions(bad_weight, 5).is_err());
        let no_flip = vec![
            Production::new(Rule::Nil, 1.0),
            Production::new(Rule::If, 1.0),
            Production::new(Rule::Empty, 1.0),
        ];
        assert!(ExpressionGrammar::from_productions(no_flip, 5).is_err());
    }
}
