//! Shared random-corpus generators for the integration suites.
//!
//! Everything is seeded so failures reproduce exactly.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use xnmr::ground::GroundProgram;
use xnmr::wfs::ResidualProgram;
use xnmr::{parse_program, parse_query, Program, Query};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atom_name(index: usize) -> String {
    format!("a{index:02}")
}

fn random_body(rng: &mut ChaCha8Rng, atoms: usize) -> (Vec<String>, Vec<String>) {
    let npos = rng.random_range(0..=2usize);
    let nneg = rng.random_range(0..=2usize);
    let pick = |rng: &mut ChaCha8Rng| atom_name(rng.random_range(0..atoms));
    let pos = (0..npos).map(|_| pick(rng)).collect();
    let neg = (0..nneg).map(|_| pick(rng)).collect();
    (pos, neg)
}

/// A residual program touching at most `max_atoms` distinct atoms.
pub fn random_residual(rng: &mut ChaCha8Rng, max_atoms: usize, max_rules: usize) -> ResidualProgram {
    let atoms = rng.random_range(1..=max_atoms);
    let rules = rng.random_range(1..=max_rules);
    let mut builder = ResidualProgram::builder();
    for _ in 0..rules {
        let head = atom_name(rng.random_range(0..atoms));
        let (pos, neg) = random_body(rng, atoms);
        let pos: Vec<&str> = pos.iter().map(String::as_str).collect();
        let neg: Vec<&str> = neg.iter().map(String::as_str).collect();
        builder = builder.rule(&head, &pos, &neg);
    }
    builder.build()
}

/// A ground program touching at most `max_atoms` distinct atoms.
pub fn random_ground(rng: &mut ChaCha8Rng, max_atoms: usize, max_rules: usize) -> GroundProgram {
    let atoms = rng.random_range(1..=max_atoms);
    let rules = rng.random_range(1..=max_rules);
    let mut builder = GroundProgram::builder();
    for _ in 0..rules {
        let head = atom_name(rng.random_range(0..atoms));
        let (pos, neg) = random_body(rng, atoms);
        let pos: Vec<&str> = pos.iter().map(String::as_str).collect();
        let neg: Vec<&str> = neg.iter().map(String::as_str).collect();
        builder = builder.rule(&head, &pos, &neg);
    }
    builder.build()
}

/// A safe non-ground program over unary predicates `p0..p3`, the same
/// program extended with rules whose head predicates `z0..z2` are
/// unreachable from the query, and a query over the `p` predicates.
pub fn random_relevance_triple(rng: &mut ChaCha8Rng) -> (Program, Program, Query) {
    let mut text = String::new();
    for _ in 0..rng.random_range(1..=4) {
        text.push_str(&format!(
            "p{}({}).\n",
            rng.random_range(0..4),
            rng.random_range(1..=3)
        ));
    }
    for _ in 0..rng.random_range(1..=4) {
        let head = rng.random_range(0..4);
        let body = rng.random_range(0..4);
        if rng.random_bool(0.5) {
            let neg = rng.random_range(0..4);
            text.push_str(&format!("p{head}(X) :- p{body}(X), not p{neg}(X).\n"));
        } else {
            text.push_str(&format!("p{head}(X) :- p{body}(X).\n"));
        }
    }
    let base = parse_program(&text).expect("generated base program parses");
    for _ in 0..rng.random_range(1..=3) {
        match rng.random_range(0..3) {
            0 => text.push_str(&format!(
                "z{}({}).\n",
                rng.random_range(0..3),
                rng.random_range(1..=3)
            )),
            1 => text.push_str(&format!(
                "z{}(X) :- p{}(X), not z{}(X).\n",
                rng.random_range(0..3),
                rng.random_range(0..4),
                rng.random_range(0..3)
            )),
            _ => text.push_str(&format!(
                "z{}(X) :- z{}(X).\n",
                rng.random_range(0..3),
                rng.random_range(0..3)
            )),
        }
    }
    let extended = parse_program(&text).expect("generated extended program parses");
    let query = match rng.random_range(0..3) {
        0 => "p0(X)",
        1 => "p1(1)",
        _ => "p2(X), not p3(X)",
    };
    let query = parse_query(query).expect("generated query parses");
    (base, extended, query)
}

/// Source text for a random `win`/`move` game over `nodes` vertices.
pub fn random_game(rng: &mut ChaCha8Rng, nodes: usize, edges: usize) -> String {
    let mut text = String::new();
    for _ in 0..edges {
        let from = rng.random_range(1..=nodes);
        let to = rng.random_range(1..=nodes);
        text.push_str(&format!("move({from},{to}).\n"));
    }
    text.push_str("win(X) :- move(X,Y), not win(Y).\n");
    text
}
