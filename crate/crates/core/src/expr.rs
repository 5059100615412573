//! Atoms, strings, expressions and factorized programs.
//!
//! The canonical text form is parenthesized prefix notation:
//!
//! ```text
//! (pair a (if (flip 0.7) nil (F1 nil)))
//! (pair a b) | (F1 (rest x))
//! ```
//!
//! `nil` is the empty string, `x` the factor's argument, `Fk` a call to the
//! k-th factor and `|` separates factors. Atoms that collide with a keyword
//! are written with a leading quote (`'x`).

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum number of factors in a program.
pub const MAX_FACTORS: usize = 10;

const KEYWORDS: &[&str] = &["nil", "x", "pair", "first", "rest", "if", "flip", "empty"];

/// A terminal token, stored inline as up to 8 ASCII bytes.
///
/// Ordering is lexicographic on the token text.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom([u8; 8]);

impl Atom {
    pub const MAX_LEN: usize = 8;

    pub fn new(name: &str) -> Result<Atom> {
        let bytes = name.as_bytes();
        let ok = !bytes.is_empty()
            && bytes.len() <= Self::MAX_LEN
            && bytes
                .iter()
                .all(|b| b.is_ascii_graphic() && !matches!(b, b'(' | b')' | b'|' | b'\''));
        if !ok {
            return Err(Error::InvalidAtom(name.to_string()));
        }
        let mut buf = [0u8; 8];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(Atom(buf))
    }

    pub fn as_str(&self) -> &str {
        let len = self.0.iter().position(|&b| b == 0).unwrap_or(8);
        // Only ASCII bytes are ever stored.
        std::str::from_utf8(&self.0[..len]).unwrap()
    }

    fn is_reserved(&self) -> bool {
        let s = self.as_str();
        KEYWORDS.contains(&s) || is_factor_name(s).is_some()
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Atom {
    type Err = Error;
    fn from_str(s: &str) -> Result<Atom> {
        Atom::new(s)
    }
}

/// Parse a list of atom names, e.g. `atoms(&["a", "b"])`.
pub fn atoms(names: &[&str]) -> Result<Vec<Atom>> {
    names.iter().map(|n| Atom::new(n)).collect()
}

fn is_factor_name(s: &str) -> Option<usize> {
    let digits = s.strip_prefix('F')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// A finite sequence of atoms. Displayed space-separated, `∅` when empty.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Str(Vec<Atom>);

impl Str {
    pub fn new(tokens: Vec<Atom>) -> Str {
        Str(tokens)
    }

    pub fn empty() -> Str {
        Str(Vec::new())
    }

    /// Build a string whose tokens are the single characters of `s`,
    /// e.g. `Str::chars("aabb")`.
    pub fn chars(s: &str) -> Str {
        Str(s
            .chars()
            .map(|c| Atom::new(c.encode_utf8(&mut [0; 4])).expect("single-character atom"))
            .collect())
    }

    pub fn tokens(&self) -> &[Atom] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Atom> {
        self.0
    }

    /// Concatenate the tokens into one string without separators.
    pub fn compact(&self) -> String {
        self.0.iter().map(Atom::as_str).collect()
    }
}

impl Deref for Str {
    type Target = [Atom];
    fn deref(&self) -> &[Atom] {
        &self.0
    }
}

impl From<Vec<Atom>> for Str {
    fn from(v: Vec<Atom>) -> Str {
        Str(v)
    }
}

impl fmt::Debug for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl fmt::Display for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(a.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for Str {
    type Err = Error;
    /// Whitespace-separated tokens; `∅` or blank is the empty string.
    fn from_str(s: &str) -> Result<Str> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Str::empty());
        }
        s.split_whitespace().map(Atom::new).collect::<Result<Vec<_>>>().map(Str)
    }
}

/// A flip probability, one of 0.5, 0.6, 0.7, 0.8, 0.9.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Prob(u8);

impl Prob {
    pub const ALL: [Prob; 5] = [Prob(5), Prob(6), Prob(7), Prob(8), Prob(9)];

    pub fn from_tenths(tenths: u8) -> Result<Prob> {
        if (5..=9).contains(&tenths) {
            Ok(Prob(tenths))
        } else {
            Err(Error::InvalidProgram(format!(
                "flip probability 0.{tenths} is not one of 0.5..0.9"
            )))
        }
    }

    pub fn tenths(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn value(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.{}", self.0)
    }
}

/// Result sort of an expression position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sort {
    List,
    Bool,
}

/// One factor body. Factor ids in `Call` are 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Pair(Box<Expr>, Box<Expr>),
    First(Box<Expr>),
    Rest(Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Flip(Prob),
    IsEmpty(Box<Expr>),
    Nil,
    Arg,
    Lit(Atom),
    Call(usize, Box<Expr>),
}

impl Expr {
    pub fn pair(l: Expr, r: Expr) -> Expr {
        Expr::Pair(Box::new(l), Box::new(r))
    }

    pub fn first(e: Expr) -> Expr {
        Expr::First(Box::new(e))
    }

    pub fn rest(e: Expr) -> Expr {
        Expr::Rest(Box::new(e))
    }

    pub fn if_(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn flip(tenths: u8) -> Expr {
        Expr::Flip(Prob::from_tenths(tenths).expect("probability in 0.5..0.9"))
    }

    pub fn is_empty(e: Expr) -> Expr {
        Expr::IsEmpty(Box::new(e))
    }

    pub fn lit(name: &str) -> Expr {
        Expr::Lit(Atom::new(name).expect("valid atom"))
    }

    pub fn call(factor: usize, arg: Expr) -> Expr {
        Expr::Call(factor, Box::new(arg))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Expr::Flip(_) | Expr::IsEmpty(_) => Sort::Bool,
            _ => Sort::List,
        }
    }

    /// Direct children with the sort each slot requires.
    pub fn children(&self) -> Vec<(&Expr, Sort)> {
        match self {
            Expr::Pair(l, r) => vec![(l, Sort::List), (r, Sort::List)],
            Expr::First(e) | Expr::Rest(e) | Expr::IsEmpty(e) | Expr::Call(_, e) => {
                vec![(e, Sort::List)]
            }
            Expr::If(c, t, e) => vec![(c, Sort::Bool), (t, Sort::List), (e, Sort::List)],
            Expr::Flip(_) | Expr::Nil | Expr::Arg | Expr::Lit(_) => Vec::new(),
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Pair(l, r) => vec![l, r],
            Expr::First(e) | Expr::Rest(e) | Expr::IsEmpty(e) | Expr::Call(_, e) => vec![e],
            Expr::If(c, t, e) => vec![c, t, e],
            Expr::Flip(_) | Expr::Nil | Expr::Arg | Expr::Lit(_) => Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|(c, _)| c.size()).sum::<usize>()
    }

    /// Every node in pre-order, with the sort of its slot and its depth
    /// (the root has depth 1).
    pub fn nodes(&self, root_sort: Sort) -> Vec<NodeInfo> {
        let mut out = Vec::with_capacity(16);
        fn walk(e: &Expr, sort: Sort, depth: usize, out: &mut Vec<NodeInfo>) {
            out.push(NodeInfo { sort, depth });
            for (c, s) in e.children() {
                walk(c, s, depth + 1, out);
            }
        }
        walk(self, root_sort, 1, &mut out);
        out
    }

    /// The subtree at pre-order position `index`.
    pub fn subtree(&self, index: usize) -> Option<&Expr> {
        fn find<'a>(e: &'a Expr, target: usize, counter: &mut usize) -> Option<&'a Expr> {
            if *counter == target {
                return Some(e);
            }
            *counter += 1;
            for (c, _) in e.children() {
                if let Some(hit) = find(c, target, counter) {
                    return Some(hit);
                }
            }
            None
        }
        find(self, index, &mut 0)
    }

    /// A copy of `self` with the subtree at pre-order position `index` replaced.
    pub fn replace(&self, index: usize, replacement: Expr) -> Expr {
        let mut out = self.clone();
        fn find_mut<'a>(e: &'a mut Expr, target: usize, counter: &mut usize) -> Option<&'a mut Expr> {
            if *counter == target {
                return Some(e);
            }
            *counter += 1;
            for c in e.children_mut() {
                if let Some(hit) = find_mut(c, target, counter) {
                    return Some(hit);
                }
            }
            None
        }
        if let Some(slot) = find_mut(&mut out, index, &mut 0) {
            *slot = replacement;
        }
        out
    }

    /// Largest factor id called anywhere in this expression.
    pub fn max_call(&self) -> usize {
        let own = match self {
            Expr::Call(k, _) => *k,
            _ => 0,
        };
        self.children().iter().map(|(c, _)| c.max_call()).fold(own, usize::max)
    }

    /// Check sort discipline: `Flip`/`IsEmpty` only in condition slots.
    pub fn check_sorts(&self, expected: Sort) -> Result<()> {
        if self.sort() != expected {
            return Err(Error::InvalidProgram(format!(
                "{self} has sort {:?} where {expected:?} is required",
                self.sort()
            )));
        }
        for (c, s) in self.children() {
            c.check_sorts(s)?;
        }
        Ok(())
    }

    /// Does this expression contain any `flip`?
    pub fn has_flip(&self) -> bool {
        matches!(self, Expr::Flip(_)) || self.children().iter().any(|(c, _)| c.has_flip())
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Expr::Nil => out.push_str("nil"),
            Expr::Arg => out.push('x'),
            Expr::Lit(a) => {
                if a.is_reserved() {
                    out.push('\'');
                }
                out.push_str(a.as_str());
            }
            Expr::Flip(p) => {
                out.push_str("(flip ");
                out.push_str(&p.to_string());
                out.push(')');
            }
            _ => {
                out.push('(');
                match self {
                    Expr::Pair(..) => out.push_str("pair"),
                    Expr::First(_) => out.push_str("first"),
                    Expr::Rest(_) => out.push_str("rest"),
                    Expr::If(..) => out.push_str("if"),
                    Expr::IsEmpty(_) => out.push_str("empty"),
                    Expr::Call(k, _) => {
                        out.push('F');
                        out.push_str(&k.to_string());
                    }
                    _ => unreachable!(),
                }
                for (c, _) in self.children() {
                    out.push(' ');
                    c.write_canonical(out);
                }
                out.push(')');
            }
        }
    }

    pub fn canonical(&self) -> String {
        let mut s = String::with_capacity(64);
        self.write_canonical(&mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        let tokens = tokenize(s);
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

/// Position of a node inside a factor body.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NodeInfo {
    pub sort: Sort,
    pub depth: usize,
}

/// An ordered list of factors `F1..FK`; output is `FK` applied to `∅`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FactorizedProgram {
    factors: Vec<Expr>,
}

impl FactorizedProgram {
    /// Validates factor count, sorts and the call rule (`Fj` may call `Fi` only for `i <= j`).
    pub fn new(factors: Vec<Expr>) -> Result<FactorizedProgram> {
        if factors.is_empty() || factors.len() > MAX_FACTORS {
            return Err(Error::InvalidProgram(format!(
                "a program has 1..={MAX_FACTORS} factors, got {}",
                factors.len()
            )));
        }
        for (i, f) in factors.iter().enumerate() {
            let j = i + 1;
            f.check_sorts(Sort::List)?;
            if let Some(bad) = first_bad_call(f, j) {
                return Err(Error::InvalidProgram(format!(
                    "factor F{j} calls F{bad}; only F1..F{j} are callable"
                )));
            }
        }
        Ok(FactorizedProgram { factors })
    }

    pub fn single(body: Expr) -> Result<FactorizedProgram> {
        FactorizedProgram::new(vec![body])
    }

    pub fn factors(&self) -> &[Expr] {
        &self.factors
    }

    /// Factor `j`, 1-based.
    pub fn factor(&self, j: usize) -> &Expr {
        &self.factors[j - 1]
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn size(&self) -> usize {
        self.factors.iter().map(Expr::size).sum()
    }

    /// Replace factor `j` (1-based) without re-validating.
    pub(crate) fn with_factor(&self, j: usize, body: Expr) -> FactorizedProgram {
        let mut factors = self.factors.clone();
        factors[j - 1] = body;
        FactorizedProgram { factors }
    }

    pub(crate) fn with_appended(&self, body: Expr) -> FactorizedProgram {
        let mut factors = self.factors.clone();
        factors.push(body);
        FactorizedProgram { factors }
    }

    pub(crate) fn without_last(&self) -> FactorizedProgram {
        let mut factors = self.factors.clone();
        factors.pop();
        FactorizedProgram { factors }
    }

    pub fn canonical(&self) -> String {
        let mut s = String::with_capacity(64 * self.factors.len());
        for (i, f) in self.factors.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            f.write_canonical(&mut s);
        }
        s
    }
}

fn first_bad_call(e: &Expr, j: usize) -> Option<usize> {
    if let Expr::Call(k, _) = e {
        if *k == 0 || *k > j {
            return Some(*k);
        }
    }
    e.children().into_iter().find_map(|(c, _)| first_bad_call(c, j))
}

impl fmt::Display for FactorizedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for FactorizedProgram {
    type Err = Error;
    fn from_str(s: &str) -> Result<FactorizedProgram> {
        let tokens = tokenize(s);
        let mut p = Parser { tokens, pos: 0 };
        let mut factors = vec![p.expr()?];
        while p.peek() == Some("|") {
            p.pos += 1;
            factors.push(p.expr()?);
        }
        if p.pos != p.tokens.len() {
            return Err(p.error("trailing input"));
        }
        FactorizedProgram::new(factors)
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | ')' | '|' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Parser {
    tokens: Vec<String>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn next(&mut self) -> Result<String> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.error("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        let t = self.next()?;
        if t != tok {
            self.pos -= 1;
            return Err(self.error(&format!("expected `{tok}`, found `{t}`")));
        }
        Ok(())
    }

    fn boxed(&mut self) -> Result<Box<Expr>> {
        self.expr().map(Box::new)
    }

    fn expr(&mut self) -> Result<Expr> {
        let t = self.next()?;
        match t.as_str() {
            "(" => {}
            ")" | "|" => {
                self.pos -= 1;
                return Err(self.error(&format!("unexpected `{t}`")));
            }
            "nil" | "∅" => return Ok(Expr::Nil),
            "x" => return Ok(Expr::Arg),
            _ => {
                let name = t.strip_prefix('\'').unwrap_or(&t);
                if t.starts_with('\'') || !(KEYWORDS.contains(&name) || is_factor_name(name).is_some()) {
                    return Atom::new(name).map(Expr::Lit).map_err(|_| {
                        self.pos -= 1;
                        self.error(&format!("invalid atom `{t}`"))
                    });
                }
                self.pos -= 1;
                return Err(self.error(&format!("keyword `{t}` outside parentheses")));
            }
        }
        let head = self.next()?;
        let e = match head.as_str() {
            "pair" => Expr::Pair(self.boxed()?, self.boxed()?),
            "first" => Expr::First(self.boxed()?),
            "rest" => Expr::Rest(self.boxed()?),
            "if" => Expr::If(self.boxed()?, self.boxed()?, self.boxed()?),
            "empty" => Expr::IsEmpty(self.boxed()?),
            "flip" => {
                let p = self.next()?;
                let tenths = p
                    .strip_prefix("0.")
                    .and_then(|d| d.parse::<u8>().ok())
                    .filter(|d| (5..=9).contains(d))
                    .ok_or_else(|| self.error(&format!("bad flip probability `{p}`")))?;
                Expr::Flip(Prob(tenths))
            }
            other => match is_factor_name(other) {
                Some(k) if k >= 1 => Expr::Call(k, self.boxed()?),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(&format!("unknown operator `{other}`")));
                }
            },
        };
        self.expect(")")?;
        Ok(e)
    }
}
