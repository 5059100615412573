//! The interpreter.
//!
//! Evaluation is total: `first`/`rest` of `∅` is `∅`, and a run that makes
//! more factor calls than the budget, or builds a string longer than the
//! length cap, yields [`EvalOutcome::Bottom`].

use crate::expr::{Atom, Expr, FactorizedProgram, Prob, Str};
use crate::rng::SplitMix64;

pub const DEFAULT_CALL_BUDGET: usize = 128;
pub const DEFAULT_MAX_LEN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalLimits {
    /// Maximum number of factor calls (not counting the top-level one).
    pub call_budget: usize,
    /// Maximum length of any intermediate or final string.
    pub max_len: usize,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits {
            call_budget: DEFAULT_CALL_BUDGET,
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EvalOutcome {
    Ok(Str),
    Bottom,
}

/// Supplies the outcome of each `flip`. `None` suspends evaluation.
pub trait FlipSource {
    fn flip(&mut self, p: Prob) -> Option<bool>;
}

/// Flips drawn from a generator: `true` with probability `p`.
pub struct RandomFlips<'a>(pub &'a mut SplitMix64);

impl FlipSource for RandomFlips<'_> {
    #[inline]
    fn flip(&mut self, p: Prob) -> Option<bool> {
        Some(self.0.next_f64() < p.value())
    }
}

/// Replays a fixed sequence of outcomes, then suspends.
pub struct ScriptedFlips<'a> {
    script: &'a [bool],
    pos: usize,
}

impl<'a> ScriptedFlips<'a> {
    pub fn new(script: &'a [bool]) -> Self {
        ScriptedFlips { script, pos: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }
}

impl FlipSource for ScriptedFlips<'_> {
    fn flip(&mut self, _p: Prob) -> Option<bool> {
        let b = self.script.get(self.pos).copied()?;
        self.pos += 1;
        Some(b)
    }
}

/// Why a run stopped without a string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    Bottom,
    /// The flip source declined to answer a flip with this probability.
    Suspended(Prob),
}

/// Run `program` once on the empty input, drawing flips from `rand`.
pub fn evaluate(program: &FactorizedProgram, rand: &mut SplitMix64, limits: &EvalLimits) -> EvalOutcome {
    match run(program, &[], &mut RandomFlips(rand), limits) {
        Ok(s) => EvalOutcome::Ok(s),
        Err(_) => EvalOutcome::Bottom,
    }
}

/// Apply the last factor to `input`.
pub fn run<S: FlipSource>(
    program: &FactorizedProgram,
    input: &[Atom],
    source: &mut S,
    limits: &EvalLimits,
) -> Result<Str, Halt> {
    if input.len() > limits.max_len {
        return Err(Halt::Bottom);
    }
    run_factor(program, program.k(), input, source, limits)
}

/// Apply factor `j` (1-based) to `input`; used for testing helper factors.
pub fn run_factor<S: FlipSource>(
    program: &FactorizedProgram,
    j: usize,
    input: &[Atom],
    source: &mut S,
    limits: &EvalLimits,
) -> Result<Str, Halt> {
    let mut ev = Evaluator {
        program,
        source,
        calls_left: limits.call_budget,
        max_len: limits.max_len,
        spare: Vec::new(),
    };
    let mut out = Vec::new();
    ev.list(program.factor(j), input, &mut out)?;
    Ok(Str::new(out))
}

/// True if every run of the last factor makes unboundedly many calls, so
/// every run ends in [`EvalOutcome::Bottom`] whatever the flips.
///
/// A factor must diverge if its body must reach a call to a factor that
/// must diverge. This is the greatest solution of that recursion: start
/// with every factor marked and unmark until stable.
pub fn must_diverge(program: &FactorizedProgram) -> bool {
    let mut marked = vec![true; program.k()];
    loop {
        let mut changed = false;
        for j in 1..=program.k() {
            if marked[j - 1] && !must_reach(program.factor(j), &marked) {
                marked[j - 1] = false;
                changed = true;
            }
        }
        if !changed {
            return marked[program.k() - 1];
        }
    }
}

/// Every evaluation of `e` calls a marked factor.
fn must_reach(e: &Expr, marked: &[bool]) -> bool {
    match e {
        Expr::Nil | Expr::Arg | Expr::Lit(_) | Expr::Flip(_) => false,
        Expr::Pair(l, r) => must_reach(l, marked) || must_reach(r, marked),
        Expr::First(e) | Expr::Rest(e) | Expr::IsEmpty(e) => must_reach(e, marked),
        Expr::If(c, t, f) => must_reach(c, marked) || (must_reach(t, marked) && must_reach(f, marked)),
        Expr::Call(k, a) => marked[k - 1] || must_reach(a, marked),
    }
}

/// Results are appended to a caller-supplied buffer; the value of an
/// expression is the tail of the buffer past where it started.
struct Evaluator<'a, S> {
    program: &'a FactorizedProgram,
    source: &'a mut S,
    calls_left: usize,
    max_len: usize,
    /// Reusable buffers for call arguments.
    spare: Vec<Vec<Atom>>,
}

impl<S: FlipSource> Evaluator<'_, S> {
    fn list(&mut self, e: &Expr, arg: &[Atom], out: &mut Vec<Atom>) -> Result<(), Halt> {
        let start = out.len();
        match e {
            Expr::Nil => {}
            Expr::Arg => out.extend_from_slice(arg),
            Expr::Lit(a) => out.push(*a),
            Expr::Pair(l, r) => {
                self.list(l, arg, out)?;
                self.list(r, arg, out)?;
                if out.len() - start > self.max_len {
                    return Err(Halt::Bottom);
                }
            }
            Expr::First(e) => {
                self.list(e, arg, out)?;
                out.truncate(start + 1);
            }
            Expr::Rest(e) => {
                self.list(e, arg, out)?;
                if out.len() > start {
                    out.remove(start);
                }
            }
            Expr::If(c, t, f) => {
                if self.boolean(c, arg)? {
                    self.list(t, arg, out)?;
                } else {
                    self.list(f, arg, out)?;
                }
            }
            Expr::Call(k, a) => {
                let mut input = self.spare.pop().unwrap_or_default();
                input.clear();
                let result = self.call(*k, a, arg, &mut input, out);
                self.spare.push(input);
                result?;
            }
            Expr::Flip(_) | Expr::IsEmpty(_) => {
                unreachable!("boolean expression in list position: {e}")
            }
        }
        Ok(())
    }

    fn call(
        &mut self,
        k: usize,
        a: &Expr,
        arg: &[Atom],
        input: &mut Vec<Atom>,
        out: &mut Vec<Atom>,
    ) -> Result<(), Halt> {
        self.list(a, arg, input)?;
        if self.calls_left == 0 {
            return Err(Halt::Bottom);
        }
        self.calls_left -= 1;
        let body = self.program.factor(k);
        self.list(body, input, out)
    }

    fn boolean(&mut self, e: &Expr, arg: &[Atom]) -> Result<bool, Halt> {
        match e {
            Expr::Flip(p) => self.source.flip(*p).ok_or(Halt::Suspended(*p)),
            Expr::IsEmpty(e) => {
                let mut buf = self.spare.pop().unwrap_or_default();
                buf.clear();
                let result = self.list(e, arg, &mut buf);
                let empty = buf.is_empty();
                self.spare.push(buf);
                result.map(|()| empty)
            }
            _ => unreachable!("list expression in condition position: {e}"),
        }
    }
}
