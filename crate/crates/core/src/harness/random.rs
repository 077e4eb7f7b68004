//! Random formulas: closed ones over a model's vocabulary for schema
//! instantiation, and arbitrary ASTs for round-trip testing.

use rand::Rng;

use crate::formula::{Agent, Formula};

fn pick<'a, R: Rng>(rng: &mut R, items: &'a [String]) -> &'a str {
    &items[rng.random_range(0..items.len())]
}

/// A closed formula of depth at most `depth` over `atoms` and `agents`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, atoms: &[String], agents: &[String]) -> Formula {
    if depth <= 1 || rng.random_bool(0.25) {
        return match rng.random_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::atom(pick(rng, atoms)),
        };
    }
    let sub = |rng: &mut R| Box::new(random_formula(rng, depth - 1, atoms, agents));
    let agent = |rng: &mut R| Agent::Name(pick(rng, agents).to_string());
    match rng.random_range(0..16) {
        0 | 1 => Formula::Not(sub(rng)),
        2 => Formula::And(sub(rng), sub(rng)),
        3 => Formula::Or(sub(rng), sub(rng)),
        4 => Formula::Implies(sub(rng), sub(rng)),
        5 => Formula::Iff(sub(rng), sub(rng)),
        6 => Formula::Box(sub(rng)),
        7 => Formula::Diamond(sub(rng)),
        8 => Formula::Stit(agent(rng), sub(rng)),
        9 => Formula::Knows(agent(rng), sub(rng)),
        10 => Formula::Believes(agent(rng), None, sub(rng)),
        11 => Formula::Believes(agent(rng), Some(sub(rng)), sub(rng)),
        12 => Formula::OughtObj(agent(rng), sub(rng)),
        13 => Formula::OughtSubj(agent(rng), sub(rng)),
        _ => Formula::OughtDox(agent(rng), sub(rng)),
    }
}

const WORDS: [&str; 5] = ["p", "q1", "e_x", "doctor", "a"];
const VARS: [&str; 4] = ["X", "Y", "Phi", "Z2"];

/// Any AST, metavariables included, of depth at most `depth`.
pub fn random_ast<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    let word = |rng: &mut R| WORDS[rng.random_range(0..WORDS.len())].to_string();
    let var = |rng: &mut R| VARS[rng.random_range(0..VARS.len())].to_string();
    if depth <= 1 || rng.random_bool(0.2) {
        return match rng.random_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            2 => Formula::Var(var(rng)),
            _ => Formula::Atom(word(rng)),
        };
    }
    let sub = |rng: &mut R| Box::new(random_ast(rng, depth - 1));
    let agent = |rng: &mut R| {
        if rng.random_bool(0.3) {
            Agent::Var(var(rng))
        } else {
            Agent::Name(word(rng))
        }
    };
    match rng.random_range(0..15) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Implies(sub(rng), sub(rng)),
        4 => Formula::Iff(sub(rng), sub(rng)),
        5 => Formula::Box(sub(rng)),
        6 => Formula::Diamond(sub(rng)),
        7 => Formula::Stit(agent(rng), sub(rng)),
        8 => Formula::Knows(agent(rng), sub(rng)),
        9 => Formula::Believes(agent(rng), None, sub(rng)),
        10 => Formula::Believes(agent(rng), Some(sub(rng)), sub(rng)),
        11 => Formula::OughtObj(agent(rng), sub(rng)),
        12 => Formula::OughtSubj(agent(rng), sub(rng)),
        _ => Formula::OughtDox(agent(rng), sub(rng)),
    }
}
