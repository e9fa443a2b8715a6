//! Stable-model enumeration over residual programs.
//!
//! The search interleaves deterministic propagation ([`expand`]) with
//! chronological backtracking. Propagation closes an assignment under
//! forward truth, all-rules-dead falsification, and greatest-unfounded-set
//! falsification; branching picks the unknown atom occurring in the most
//! rule bodies (ties: lowest id) and tries true before false. Every total
//! assignment is confirmed against the Gelfond-Lifschitz reduct before it
//! is reported, so enumeration is sound regardless of how much the
//! propagator prunes.

use std::collections::BTreeSet;

use crate::ground::{AtomId, AtomProgram, GroundRule};
use crate::wfs::{gl_reduct_least_model, OracleTooLarge, ResidualProgram};

/// Three-valued truth state of one atom during search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

/// An atom forced both true and false; a normal search outcome that
/// triggers backtracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("atom {atom} forced both true and false")]
pub struct Conflict {
    pub atom: AtomId,
}

/// Partial three-valued assignment with an undo trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Truth>,
    trail: Vec<AtomId>,
}

impl Assignment {
    /// All-unknown assignment over atoms `1..=atom_count`.
    pub fn new(atom_count: usize) -> Self {
        Assignment {
            values: vec![Truth::Unknown; atom_count + 1],
            trail: Vec::new(),
        }
    }

    pub fn value(&self, atom: AtomId) -> Truth {
        self.values[atom]
    }

    /// Sets an atom, reporting a [`Conflict`] when it is already set the
    /// other way. Returns whether the atom was newly assigned.
    pub fn assign(&mut self, atom: AtomId, value: bool) -> Result<bool, Conflict> {
        let target = if value { Truth::True } else { Truth::False };
        match self.values[atom] {
            Truth::Unknown => {
                self.values[atom] = target;
                self.trail.push(atom);
                Ok(true)
            }
            current if current == target => Ok(false),
            _ => Err(Conflict { atom }),
        }
    }

    pub fn is_total(&self) -> bool {
        self.values[1..].iter().all(|&v| v != Truth::Unknown)
    }

    pub fn true_atoms(&self) -> BTreeSet<AtomId> {
        (1..self.values.len())
            .filter(|&a| self.values[a] == Truth::True)
            .collect()
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn backtrack_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let atom = self.trail.pop().unwrap();
            self.values[atom] = Truth::Unknown;
        }
    }
}

fn rule_dead(rule: &GroundRule, a: &Assignment) -> bool {
    rule.pos.iter().any(|&p| a.value(p) == Truth::False)
        || rule.neg.iter().any(|&n| a.value(n) == Truth::True)
}

fn body_true(rule: &GroundRule, a: &Assignment) -> bool {
    rule.pos.iter().all(|&p| a.value(p) == Truth::True)
        && rule.neg.iter().all(|&n| a.value(n) == Truth::False)
}

/// Atoms with a non-circular derivation through rules not yet dead
/// under `a`; the complement is the greatest unfounded set.
fn founded_set(rp: &ResidualProgram, a: &Assignment) -> Vec<bool> {
    let n = rp.atom_count();
    let mut founded = vec![false; n + 1];
    let mut counts: Vec<(usize, AtomId)> = Vec::new();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut queue: Vec<AtomId> = Vec::new();
    let found = |atom: AtomId, founded: &mut Vec<bool>, queue: &mut Vec<AtomId>| {
        if !founded[atom] {
            founded[atom] = true;
            queue.push(atom);
        }
    };
    for rule in rp.rules() {
        if rule_dead(rule, a) {
            continue;
        }
        if rule.pos.is_empty() {
            found(rule.head, &mut founded, &mut queue);
        } else {
            let index = counts.len();
            counts.push((rule.pos.len(), rule.head));
            for &p in &rule.pos {
                watchers[p].push(index);
            }
        }
    }
    while let Some(atom) = queue.pop() {
        for &index in &watchers[atom] {
            let (remaining, head) = &mut counts[index];
            *remaining -= 1;
            if *remaining == 0 {
                found(*head, &mut founded, &mut queue);
            }
        }
    }
    founded
}

fn propagate(rp: &ResidualProgram, a: &mut Assignment) -> Result<(), Conflict> {
    let n = rp.atom_count();
    let mut by_head: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (index, rule) in rp.rules().iter().enumerate() {
        by_head[rule.head].push(index);
    }
    loop {
        let mut changed = false;
        for rule in rp.rules() {
            if body_true(rule, a) {
                changed |= a.assign(rule.head, true)?;
            }
        }
        for atom in 1..=n {
            if a.value(atom) != Truth::False
                && by_head[atom]
                    .iter()
                    .all(|&i| rule_dead(&rp.rules()[i], a))
            {
                changed |= a.assign(atom, false)?;
            }
        }
        let founded = founded_set(rp, a);
        for atom in 1..=n {
            if !founded[atom] {
                changed |= a.assign(atom, false)?;
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Closes `a` under propagation, or reports the [`Conflict`] that makes
/// it unextendable.
pub fn expand(rp: &ResidualProgram, mut a: Assignment) -> Result<Assignment, Conflict> {
    propagate(rp, &mut a)?;
    Ok(a)
}

/// One stable model: the atoms that are true (all others are false).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StableModel {
    pub true_atoms: BTreeSet<AtomId>,
}

/// Gelfond-Lifschitz stability check: `candidate` must be exactly the
/// least model of the reduct of `program` w.r.t. itself.
pub fn is_stable_model<P: AtomProgram + ?Sized>(
    program: &P,
    candidate: &BTreeSet<AtomId>,
) -> bool {
    gl_reduct_least_model(program, candidate) == *candidate
}

struct Frame {
    mark: usize,
    atom: AtomId,
    tried_false: bool,
}

/// Resumable enumeration of the stable models of a residual program, in
/// search-discovery order.
pub struct StableModelIter<'a> {
    rp: &'a ResidualProgram,
    assignment: Assignment,
    frames: Vec<Frame>,
    occurrences: Vec<usize>,
    exploring: bool,
    done: bool,
}

impl<'a> StableModelIter<'a> {
    fn new(rp: &'a ResidualProgram) -> Self {
        let mut occurrences = vec![0; rp.atom_count() + 1];
        for rule in rp.rules() {
            let body: BTreeSet<AtomId> = rule.pos.iter().chain(&rule.neg).copied().collect();
            for atom in body {
                occurrences[atom] += 1;
            }
        }
        StableModelIter {
            rp,
            assignment: Assignment::new(rp.atom_count()),
            frames: Vec::new(),
            occurrences,
            exploring: true,
            done: false,
        }
    }

    fn pick_branch(&self) -> Option<AtomId> {
        let mut best: Option<(usize, AtomId)> = None;
        for atom in 1..=self.rp.atom_count() {
            if self.assignment.value(atom) == Truth::Unknown
                && best.map_or(true, |(count, _)| self.occurrences[atom] > count)
            {
                best = Some((self.occurrences[atom], atom));
            }
        }
        best.map(|(_, atom)| atom)
    }

    /// Undoes decisions until one can be flipped to false; returns false
    /// when the whole tree is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(frame) = self.frames.last_mut() {
            if frame.tried_false {
                let frame = self.frames.pop().unwrap();
                self.assignment.backtrack_to(frame.mark);
            } else {
                frame.tried_false = true;
                let (mark, atom) = (frame.mark, frame.atom);
                self.assignment.backtrack_to(mark);
                self.assignment
                    .assign(atom, false)
                    .expect("freshly unassigned atom cannot conflict");
                return true;
            }
        }
        false
    }
}

impl Iterator for StableModelIter<'_> {
    type Item = StableModel;

    fn next(&mut self) -> Option<StableModel> {
        if self.done {
            return None;
        }
        loop {
            if !self.exploring {
                if self.backtrack() {
                    self.exploring = true;
                } else {
                    self.done = true;
                    return None;
                }
            }
            match propagate(self.rp, &mut self.assignment) {
                Err(_) => self.exploring = false,
                Ok(()) => match self.pick_branch() {
                    Some(atom) => {
                        self.frames.push(Frame {
                            mark: self.assignment.mark(),
                            atom,
                            tried_false: false,
                        });
                        self.assignment
                            .assign(atom, true)
                            .expect("branch atom is unknown");
                    }
                    None => {
                        let candidate = self.assignment.true_atoms();
                        self.exploring = false;
                        if is_stable_model(self.rp, &candidate) {
                            return Some(StableModel {
                                true_atoms: candidate,
                            });
                        }
                    }
                },
            }
        }
    }
}

/// Resumable stable-model cursor over `rp`.
pub fn stable_models(rp: &ResidualProgram) -> StableModelIter<'_> {
    StableModelIter::new(rp)
}

/// Up to `max_models` stable models (all of them when `None`), in
/// search-discovery order.
pub fn enumerate_stable(rp: &ResidualProgram, max_models: Option<usize>) -> Vec<StableModel> {
    let iter = stable_models(rp);
    match max_models {
        Some(max) => iter.take(max).collect(),
        None => iter.collect(),
    }
}

const ORACLE_BOUND: usize = 20;

/// Every subset of atoms passing [`is_stable_model`], in lexicographic
/// subset order; the ground-truth oracle for enumeration.
pub fn brute_force_stable<P: AtomProgram>(
    program: &P,
) -> Result<Vec<StableModel>, OracleTooLarge> {
    let n = program.atom_count();
    if n > ORACLE_BOUND {
        return Err(OracleTooLarge {
            atoms: n,
            bound: ORACLE_BOUND,
        });
    }
    let mut subsets: Vec<Vec<AtomId>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let subset: Vec<AtomId> = (1..=n).filter(|&a| mask >> (a - 1) & 1 == 1).collect();
        subsets.push(subset);
    }
    subsets.sort();
    Ok(subsets
        .into_iter()
        .map(|s| s.into_iter().collect::<BTreeSet<AtomId>>())
        .filter(|candidate| is_stable_model(program, candidate))
        .map(|true_atoms| StableModel { true_atoms })
        .collect())
}
