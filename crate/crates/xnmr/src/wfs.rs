//! Well-founded semantics and residual extraction.
//!
//! The well-founded model is computed by the alternating fixpoint of the
//! Gelfond-Lifschitz operator: starting from T = ∅, iterate T ← Γ(Γ(T))
//! until stable. The limit T∞ holds the true atoms, everything outside
//! Γ(T∞) is false, and Γ(T∞) \ T∞ is undefined. The residual program is
//! the simplification of the input onto the undefined atoms.

use std::collections::BTreeSet;

use crate::ground::{AtomId, AtomProgram, AtomTable, GroundProgram, GroundRule, ProgramBuilder};

/// Three-valued labeling of every atom of a ground program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfsResult {
    pub true_set: BTreeSet<AtomId>,
    pub false_set: BTreeSet<AtomId>,
    pub undefined_set: BTreeSet<AtomId>,
}

impl WfsResult {
    pub fn is_total(&self) -> bool {
        self.undefined_set.is_empty()
    }
}

/// The simplified ground program over the atoms left undefined by the
/// well-founded model, renumbered densely from 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResidualProgram {
    atoms: AtomTable,
    rules: Vec<GroundRule>,
}

impl ResidualProgram {
    pub(crate) fn from_parts(atoms: AtomTable, rules: Vec<GroundRule>) -> Self {
        ResidualProgram { atoms, rules }
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.rules.is_empty()
    }

    /// Hand-construction entry point, mainly for tests and oracles.
    pub fn builder() -> ResidualBuilder {
        ResidualBuilder(ProgramBuilder::default())
    }
}

impl AtomProgram for ResidualProgram {
    fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    fn atom_text(&self, id: AtomId) -> &str {
        self.atoms.text(id)
    }
}

/// Builds residual programs directly from atom texts.
#[derive(Debug, Default)]
pub struct ResidualBuilder(ProgramBuilder);

impl ResidualBuilder {
    pub fn rule(self, head: &str, pos: &[&str], neg: &[&str]) -> Self {
        ResidualBuilder(self.0.rule(head, pos, neg))
    }

    pub fn fact(self, head: &str) -> Self {
        ResidualBuilder(self.0.fact(head))
    }

    pub fn build(self) -> ResidualProgram {
        let (atoms, rules, _) = self.0.parts();
        ResidualProgram { atoms, rules }
    }
}

/// A program too large for a brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("oracle limited to {bound} atoms, program has {atoms}")]
pub struct OracleTooLarge {
    pub atoms: usize,
    pub bound: usize,
}

/// Least model of the Gelfond-Lifschitz reduct of `program` w.r.t.
/// `assumed`: rules with a negative literal inside `assumed` are deleted,
/// remaining negative literals erased, and the least model of the
/// resulting definite program is computed by counting down unsatisfied
/// positive subgoals.
pub fn gl_reduct_least_model<P: AtomProgram + ?Sized>(
    program: &P,
    assumed: &BTreeSet<AtomId>,
) -> BTreeSet<AtomId> {
    let n = program.atom_count();
    let mut truth = vec![false; n + 1];
    let mut counts: Vec<(usize, AtomId)> = Vec::new();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut queue: Vec<AtomId> = Vec::new();
    let fire = |head: AtomId, truth: &mut Vec<bool>, queue: &mut Vec<AtomId>| {
        if !truth[head] {
            truth[head] = true;
            queue.push(head);
        }
    };
    for rule in program.rules() {
        if rule.neg.iter().any(|a| assumed.contains(a)) {
            continue;
        }
        if rule.pos.is_empty() {
            fire(rule.head, &mut truth, &mut queue);
        } else {
            let index = counts.len();
            counts.push((rule.pos.len(), rule.head));
            for &a in &rule.pos {
                watchers[a].push(index);
            }
        }
    }
    while let Some(atom) = queue.pop() {
        for &index in &watchers[atom] {
            let (remaining, head) = &mut counts[index];
            *remaining -= 1;
            if *remaining == 0 {
                fire(*head, &mut truth, &mut queue);
            }
        }
    }
    (1..=n).filter(|&a| truth[a]).collect()
}

/// Computes the well-founded model by the alternating Γ² fixpoint.
pub fn well_founded(gp: &GroundProgram) -> WfsResult {
    let mut true_set = BTreeSet::new();
    loop {
        let gamma = gl_reduct_least_model(gp, &true_set);
        let next = gl_reduct_least_model(gp, &gamma);
        if next == true_set {
            let undefined_set: BTreeSet<AtomId> = gamma.difference(&true_set).copied().collect();
            let false_set = (1..=gp.atoms().len())
                .filter(|a| !gamma.contains(a))
                .collect();
            return WfsResult {
                true_set,
                false_set,
                undefined_set,
            };
        }
        true_set = next;
    }
}

/// Projects `gp` onto its undefined atoms: rules with a settled-false
/// body are dropped, settled-true literals are erased, and the survivors
/// are renumbered, deduplicated, and sorted.
pub fn extract_residual(gp: &GroundProgram, w: &WfsResult) -> ResidualProgram {
    let texts: Vec<String> = w
        .undefined_set
        .iter()
        .map(|&a| gp.atoms().text(a).to_string())
        .collect();
    let atoms = AtomTable::from_sorted_texts(texts);
    let renumber = |a: AtomId| atoms.id(gp.atoms().text(a)).unwrap();
    let mut rules: BTreeSet<GroundRule> = BTreeSet::new();
    for rule in gp.rules() {
        if !w.undefined_set.contains(&rule.head) {
            continue;
        }
        if rule.pos.iter().any(|a| w.false_set.contains(a))
            || rule.neg.iter().any(|a| w.true_set.contains(a))
        {
            continue;
        }
        let pos = rule
            .pos
            .iter()
            .filter(|a| w.undefined_set.contains(a))
            .map(|&a| renumber(a))
            .collect();
        let neg = rule
            .neg
            .iter()
            .filter(|a| w.undefined_set.contains(a))
            .map(|&a| renumber(a))
            .collect();
        rules.insert(GroundRule::new(renumber(rule.head), pos, neg));
    }
    debug_assert!((1..=atoms.len()).all(|a| rules.iter().any(|r| r.head == a)));
    ResidualProgram {
        atoms,
        rules: rules.into_iter().collect(),
    }
}

const ORACLE_BOUND: usize = 20;

/// Independent recomputation of the well-founded model for small
/// programs: a naive Γ (reduct materialized as a rule list, least model
/// by repeated scanning), iterated from ∅ for the least fixpoint of Γ²
/// and from the full atom set for the greatest, checking that the pair
/// brackets as the alternating-fixpoint theory demands.
pub fn brute_force_wfs(gp: &GroundProgram) -> Result<WfsResult, OracleTooLarge> {
    let n = gp.atoms().len();
    if n > ORACLE_BOUND {
        return Err(OracleTooLarge {
            atoms: n,
            bound: ORACLE_BOUND,
        });
    }
    let naive_gamma = |assumed: &BTreeSet<AtomId>| -> BTreeSet<AtomId> {
        let reduct: Vec<(AtomId, &[AtomId])> = gp
            .rules()
            .iter()
            .filter(|r| r.neg.iter().all(|a| !assumed.contains(a)))
            .map(|r| (r.head, r.pos.as_slice()))
            .collect();
        let mut model = BTreeSet::new();
        loop {
            let mut changed = false;
            for (head, pos) in &reduct {
                if !model.contains(head) && pos.iter().all(|a| model.contains(a)) {
                    model.insert(*head);
                    changed = true;
                }
            }
            if !changed {
                return model;
            }
        }
    };
    let fixpoint = |mut set: BTreeSet<AtomId>| -> BTreeSet<AtomId> {
        loop {
            let next = naive_gamma(&naive_gamma(&set));
            if next == set {
                return set;
            }
            set = next;
        }
    };
    let least = fixpoint(BTreeSet::new());
    let greatest = fixpoint((1..=n).collect());
    let gamma_least = naive_gamma(&least);
    assert_eq!(
        gamma_least, greatest,
        "Γ of the least fixpoint must be the greatest fixpoint"
    );
    Ok(WfsResult {
        undefined_set: gamma_least.difference(&least).copied().collect(),
        false_set: (1..=n).filter(|a| !gamma_least.contains(a)).collect(),
        true_set: least,
    })
}
