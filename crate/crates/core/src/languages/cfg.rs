//! A small weighted context-free grammar without empty productions or left
//! recursion: exact string probabilities (inside sums), recognition, length
//! laws, sampling, and enumeration of strings in order of decreasing
//! probability.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rand::Rng;

use crate::expr::{Atom, Str};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(Atom),
    N(usize),
}

#[derive(Clone, Debug)]
pub struct Cfg {
    names: Vec<&'static str>,
    /// Per nonterminal: (right-hand side, normalized probability).
    rules: Vec<Vec<(Vec<Symbol>, f64)>>,
    start: usize,
}

impl Cfg {
    /// `rules` lists `(lhs, rhs, weight)`; weights are normalized per lhs.
    /// Right-hand side symbols name nonterminals if they appear as a lhs.
    pub fn new(start: &'static str, rules: &[(&'static str, &[&'static str], f64)]) -> Cfg {
        let mut names: Vec<&'static str> = Vec::new();
        for (lhs, _, _) in rules {
            if !names.contains(lhs) {
                names.push(lhs);
            }
        }
        let mut table = vec![Vec::new(); names.len()];
        for (lhs, rhs, w) in rules {
            let i = names.iter().position(|n| n == lhs).expect("lhs registered");
            let syms = rhs
                .iter()
                .map(|s| match names.iter().position(|n| n == s) {
                    Some(j) => Symbol::N(j),
                    None => Symbol::T(Atom::new(s).expect("terminal is a valid atom")),
                })
                .collect();
            table[i].push((syms, *w));
        }
        for alts in &mut table {
            let total: f64 = alts.iter().map(|(_, w)| w).sum();
            for (_, w) in alts.iter_mut() {
                *w /= total;
            }
        }
        let start = names.iter().position(|n| *n == start).expect("start symbol has rules");
        Cfg {
            names,
            rules: table,
            start,
        }
    }

    pub fn terminals(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for alts in &self.rules {
            for (rhs, _) in alts {
                for s in rhs {
                    if let Symbol::T(a) = s {
                        if !out.contains(a) {
                            out.push(*a);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn nonterminal(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    /// Total probability of all derivations of `s` from the start symbol.
    pub fn inside(&self, s: &[Atom]) -> f64 {
        let mut memo = HashMap::new();
        self.ends(self.start, 0, s, &mut memo)
            .get(&s.len())
            .copied()
            .unwrap_or(0.0)
    }

    pub fn recognizes(&self, s: &[Atom]) -> bool {
        self.inside(s) > 0.0
    }

    /// End positions reachable by deriving from `nt` starting at `i`, with
    /// the summed derivation probability for each.
    fn ends(
        &self,
        nt: usize,
        i: usize,
        s: &[Atom],
        memo: &mut HashMap<(usize, usize), BTreeMap<usize, f64>>,
    ) -> BTreeMap<usize, f64> {
        if let Some(r) = memo.get(&(nt, i)) {
            return r.clone();
        }
        // Grammars here have no left recursion; the placeholder only guards
        // against looping if one ever does.
        memo.insert((nt, i), BTreeMap::new());
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        for (rhs, p) in &self.rules[nt] {
            let mut frontier: BTreeMap<usize, f64> = BTreeMap::from([(i, *p)]);
            for sym in rhs {
                let mut next = BTreeMap::new();
                for (&pos, &q) in &frontier {
                    match sym {
                        Symbol::T(a) => {
                            if s.get(pos) == Some(a) {
                                *next.entry(pos + 1).or_insert(0.0) += q;
                            }
                        }
                        Symbol::N(m) => {
                            for (end, r) in self.ends(*m, pos, s, memo) {
                                *next.entry(end).or_insert(0.0) += q * r;
                            }
                        }
                    }
                }
                frontier = next;
                if frontier.is_empty() {
                    break;
                }
            }
            for (end, q) in frontier {
                *out.entry(end).or_insert(0.0) += q;
            }
        }
        memo.insert((nt, i), out.clone());
        out
    }

    /// `law[n]` = probability that the start symbol derives a string of
    /// length `n`, for `n <= max_len`.
    pub fn length_law(&self, max_len: usize) -> Vec<f64> {
        let n_nt = self.rules.len();
        let mut law = vec![vec![0.0; max_len + 1]; n_nt];
        // Each pass settles at least one more length; unit rules need a few extra.
        for _ in 0..(max_len + 2 * n_nt + 2) {
            let mut next = vec![vec![0.0; max_len + 1]; n_nt];
            for (nt, alts) in self.rules.iter().enumerate() {
                for (rhs, p) in alts {
                    let mut conv = vec![0.0; max_len + 1];
                    conv[0] = *p;
                    for sym in rhs {
                        let mut c2 = vec![0.0; max_len + 1];
                        for (a, &x) in conv.iter().enumerate() {
                            if x == 0.0 {
                                continue;
                            }
                            match sym {
                                Symbol::T(_) => {
                                    if a < max_len {
                                        c2[a + 1] += x;
                                    }
                                }
                                Symbol::N(m) => {
                                    for (b, &y) in law[*m].iter().enumerate() {
                                        if a + b <= max_len {
                                            c2[a + b] += x * y;
                                        }
                                    }
                                }
                            }
                        }
                        conv = c2;
                    }
                    for (n, v) in conv.into_iter().enumerate() {
                        next[nt][n] += v;
                    }
                }
            }
            law = next;
        }
        law[self.start].clone()
    }

    /// Sample a string; `None` if it would exceed `max_len`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_len: usize) -> Option<Str> {
        let mut out = Vec::new();
        let mut stack = vec![Symbol::N(self.start)];
        while let Some(sym) = stack.pop() {
            match sym {
                Symbol::T(a) => {
                    out.push(a);
                    if out.len() > max_len {
                        return None;
                    }
                }
                Symbol::N(nt) => {
                    let alts = &self.rules[nt];
                    let mut u: f64 = rng.gen();
                    let mut chosen = &alts[alts.len() - 1].0;
                    for (rhs, p) in alts {
                        if u < *p {
                            chosen = rhs;
                            break;
                        }
                        u -= p;
                    }
                    stack.extend(chosen.iter().rev().copied());
                    // every pending symbol yields at least one token
                    if out.len() + stack.len() > max_len {
                        return None;
                    }
                }
            }
        }
        Some(Str::new(out))
    }

    /// Strings up to `max_len` in order of decreasing derivation
    /// probability, until `m` strings are found. Assumes the grammar is
    /// unambiguous, so each string is produced by one derivation.
    pub fn most_probable(&self, m: usize, max_len: usize) -> Vec<(Str, f64)> {
        #[derive(PartialEq)]
        struct Item {
            p: f64,
            done: Vec<Atom>,
            todo: Vec<Symbol>,
        }
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                self.p
                    .total_cmp(&other.p)
                    .then_with(|| other.done.cmp(&self.done))
                    .then_with(|| other.todo.cmp(&self.todo))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        let mut heap = BinaryHeap::new();
        heap.push(Item {
            p: 1.0,
            done: Vec::new(),
            todo: vec![Symbol::N(self.start)],
        });
        let mut found: Vec<(Str, f64)> = Vec::new();
        while let Some(Item { p, mut done, mut todo }) = heap.pop() {
            if found.len() >= m && p < found[m - 1].1 {
                break;
            }
            // move leading terminals across
            while let Some(Symbol::T(a)) = todo.last().copied() {
                todo.pop();
                done.push(a);
            }
            if done.len() + todo.len() > max_len {
                continue;
            }
            match todo.pop() {
                None => {
                    found.push((Str::new(done), p));
                    found.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                }
                Some(Symbol::N(nt)) => {
                    for (rhs, q) in &self.rules[nt] {
                        let mut t = todo.clone();
                        t.extend(rhs.iter().rev().copied());
                        heap.push(Item {
                            p: p * q,
                            done: done.clone(),
                            todo: t,
                        });
                    }
                }
                Some(Symbol::T(_)) => unreachable!(),
            }
        }
        found.truncate(m);
        found
    }
}
