//! Proposal kernels. Every proposal reports the log probability of the
//! forward move and of the move that would undo it, computed with the same
//! (depth-truncated) sampler that generated it.

use rand::Rng;

use crate::expr::{Expr, FactorizedProgram, Sort};
use crate::grammar::ExpressionGrammar;

#[derive(Clone, Debug)]
pub struct Proposal {
    pub program: FactorizedProgram,
    pub log_q_fwd: f64,
    pub log_q_bwd: f64,
}

/// Regenerate a uniformly chosen node of a uniformly chosen factor.
pub fn propose_regen<R: Rng + ?Sized>(
    program: &FactorizedProgram,
    grammar: &ExpressionGrammar,
    rng: &mut R,
) -> Proposal {
    let j = rng.gen_range(1..=program.k());
    let body = program.factor(j);
    let nodes = body.nodes(Sort::List);
    let idx = rng.gen_range(0..nodes.len());
    let info = nodes[idx];
    let new = grammar.sample_at(info.sort, j, rng, info.depth);
    regen_with(program, grammar, j, idx, new)
}

/// The regeneration move that puts `new` at node `idx` of factor `j`.
pub(crate) fn regen_with(
    program: &FactorizedProgram,
    grammar: &ExpressionGrammar,
    j: usize,
    idx: usize,
    new: Expr,
) -> Proposal {
    let body = program.factor(j);
    let info = body.nodes(Sort::List)[idx];
    let old = body.subtree(idx).expect("node index in range");
    let new_body = body.replace(idx, new.clone());
    let pick = -(program.k() as f64).ln();
    let log_q_fwd = pick - (body.size() as f64).ln() + grammar.log_sample_prob(&new, info.sort, j, info.depth);
    let log_q_bwd = pick - (new_body.size() as f64).ln() + grammar.log_sample_prob(old, info.sort, j, info.depth);
    Proposal {
        program: program.with_factor(j, new_body),
        log_q_fwd,
        log_q_bwd,
    }
}

/// Probability of choosing to add a factor when the program has `k`.
fn p_add(k: usize, max_factors: usize) -> f64 {
    match (k < max_factors, k > 1) {
        (true, true) => 0.5,
        (true, false) => 1.0,
        (false, _) => 0.0,
    }
}

fn p_delete(k: usize, max_factors: usize) -> f64 {
    match (k > 1, k < max_factors) {
        (true, true) => 0.5,
        (true, false) => 1.0,
        (false, _) => 0.0,
    }
}

/// Append a freshly sampled last factor or drop the last factor, each with
/// probability 1/2. An infeasible direction becomes the other one.
pub fn propose_factor_move<R: Rng + ?Sized>(
    program: &FactorizedProgram,
    grammar: &ExpressionGrammar,
    rng: &mut R,
    max_factors: usize,
) -> Proposal {
    let k = program.k();
    let pa = p_add(k, max_factors);
    let pd = p_delete(k, max_factors);
    if pa == 0.0 && pd == 0.0 {
        return Proposal {
            program: program.clone(),
            log_q_fwd: 0.0,
            log_q_bwd: 0.0,
        };
    }
    let add = rng.gen::<f64>() < pa;
    if add {
        let body = grammar.sample_at(Sort::List, k + 1, rng, 1);
        let log_q_fwd = pa.ln() + grammar.log_sample_prob(&body, Sort::List, k + 1, 1);
        let log_q_bwd = p_delete(k + 1, max_factors).ln();
        Proposal {
            program: program.with_appended(body),
            log_q_fwd,
            log_q_bwd,
        }
    } else {
        let last = program.factor(k);
        let log_q_fwd = pd.ln();
        let log_q_bwd = p_add(k - 1, max_factors).ln() + grammar.log_sample_prob(last, Sort::List, k, 1);
        Proposal {
            program: program.without_last(),
            log_q_fwd,
            log_q_bwd,
        }
    }
}
