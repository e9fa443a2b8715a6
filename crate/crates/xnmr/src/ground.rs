//! Query-relevant grounding.
//!
//! A query is compiled into an internal answer rule
//! `__ans(V1..Vk) :- query-literals`, then the ground subprogram that can
//! influence those answer atoms is built in three phases:
//!
//! 1. predicate-level relevance: keep the rules whose head predicate is
//!    reachable from the query over the predicate dependency graph;
//! 2. instantiation: compute a positive over-approximation (the least
//!    model of the rules with negation erased) by semi-naive iteration,
//!    and emit every instance whose positive body lies inside it, deleting
//!    negative literals over atoms the over-approximation cannot derive
//!    (such atoms are certainly false, so `not a` is already satisfied);
//! 3. atom-level relevance: keep the ground rules reachable from the
//!    instantiated answer atoms.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::syntax::{Atom, Program, Query, Rule, Term};

/// Identifier of a ground atom, dense from 1 within one program.
pub type AtomId = usize;

/// Predicates starting with this prefix are reserved for internal use.
pub const RESERVED_PREFIX: &str = "__";

const ANSWER_PREDICATE: &str = "__ans";

/// Grounding failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    /// Grounding would intern more atoms than the configured cap.
    #[error("ground atom limit exceeded (more than {limit} atoms)")]
    ResourceLimitExceeded { limit: usize },
    /// The source program or query uses the reserved `__` namespace.
    #[error("predicate `{predicate}` uses the reserved `__` prefix")]
    InternalPredicateClash { predicate: String },
}

/// Caps on grounding work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceLimits {
    /// Maximum number of ground atoms interned while grounding.
    pub max_ground_atoms: usize,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits {
            max_ground_atoms: 1_000_000,
        }
    }
}

/// Bidirectional map between canonical ground-atom text and dense ids.
///
/// Ids start at 1 and follow the ascending lexicographic order of the
/// atom texts, so equal programs always number their atoms identically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomTable {
    texts: Vec<String>,
    ids: HashMap<String, AtomId>,
}

impl AtomTable {
    /// Builds a table from texts already sorted strictly ascending.
    pub(crate) fn from_sorted_texts(texts: Vec<String>) -> Self {
        debug_assert!(texts.windows(2).all(|w| w[0] < w[1]));
        let ids = texts
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i + 1))
            .collect();
        AtomTable { texts, ids }
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn id(&self, text: &str) -> Option<AtomId> {
        self.ids.get(text).copied()
    }

    /// Text of an atom id.
    ///
    /// # Panics
    /// Panics if the id is 0 or past the table.
    pub fn text(&self, id: AtomId) -> &str {
        &self.texts[id - 1]
    }

    /// All `(id, text)` pairs in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &str)> {
        self.texts.iter().enumerate().map(|(i, t)| (i + 1, t.as_str()))
    }
}

/// One variable-free rule over atom ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub head: AtomId,
    /// Positive body atoms, sorted and duplicate-free.
    pub pos: Vec<AtomId>,
    /// Negative body atoms, sorted and duplicate-free.
    pub neg: Vec<AtomId>,
}

impl GroundRule {
    pub fn new(head: AtomId, mut pos: Vec<AtomId>, mut neg: Vec<AtomId>) -> Self {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        GroundRule { head, pos, neg }
    }
}

/// A ground program over an [`AtomTable`], rules deduplicated and sorted
/// by `(head, pos, neg)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    atoms: AtomTable,
    rules: Vec<GroundRule>,
    query_atoms: BTreeSet<AtomId>,
}

impl GroundProgram {
    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    /// Ids of the instantiated `__ans` answer atoms.
    pub fn query_atoms(&self) -> &BTreeSet<AtomId> {
        &self.query_atoms
    }

    /// Hand-construction entry point, mainly for tests and oracles.
    pub fn builder() -> ProgramBuilder {
        ProgramBuilder::default()
    }
}

/// Any immutable program over a dense atom table.
///
/// Shared by [`GroundProgram`] and the residual program so that reducts,
/// model checks, and serialization are written once.
pub trait AtomProgram {
    fn atom_count(&self) -> usize;
    fn rules(&self) -> &[GroundRule];
    fn atom_text(&self, id: AtomId) -> &str;
}

impl AtomProgram for GroundProgram {
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

/// Builds ground programs directly from atom texts, canonicalizing ids,
/// rule order, and duplicates on `build`.
#[derive(Debug, Default)]
pub struct ProgramBuilder {
    rules: Vec<(String, Vec<String>, Vec<String>)>,
    query_atoms: Vec<String>,
}

impl ProgramBuilder {
    pub fn rule(mut self, head: &str, pos: &[&str], neg: &[&str]) -> Self {
        self.rules.push((
            head.to_string(),
            pos.iter().map(|s| s.to_string()).collect(),
            neg.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    pub fn fact(self, head: &str) -> Self {
        self.rule(head, &[], &[])
    }

    pub fn query_atom(mut self, atom: &str) -> Self {
        self.query_atoms.push(atom.to_string());
        self
    }

    pub(crate) fn parts(self) -> (AtomTable, Vec<GroundRule>, BTreeSet<AtomId>) {
        let mut texts: BTreeSet<&String> = self.query_atoms.iter().collect();
        for (head, pos, neg) in &self.rules {
            texts.insert(head);
            texts.extend(pos);
            texts.extend(neg);
        }
        let atoms = AtomTable::from_sorted_texts(texts.into_iter().cloned().collect());
        let id = |t: &String| atoms.id(t).unwrap();
        let rules: BTreeSet<GroundRule> = self
            .rules
            .iter()
            .map(|(head, pos, neg)| {
                GroundRule::new(
                    id(head),
                    pos.iter().map(id).collect(),
                    neg.iter().map(id).collect(),
                )
            })
            .collect();
        let query_atoms = self.query_atoms.iter().map(id).collect();
        (atoms, rules.into_iter().collect(), query_atoms)
    }

    pub fn build(self) -> GroundProgram {
        let (atoms, rules, query_atoms) = self.parts();
        GroundProgram {
            atoms,
            rules,
            query_atoms,
        }
    }
}

type PredKey = (String, usize);
type Triple = (String, Vec<String>, Vec<String>);

fn pred_key(atom: &Atom) -> PredKey {
    (atom.predicate.clone(), atom.arity())
}

/// Variable bindings with mark/undo for backtracking joins.
#[derive(Default)]
struct Bindings(Vec<(String, Term)>);

impl Bindings {
    fn lookup(&self, var: &str) -> Option<&Term> {
        self.0.iter().find(|(v, _)| v == var).map(|(_, t)| t)
    }

    fn mark(&self) -> usize {
        self.0.len()
    }

    fn undo(&mut self, mark: usize) {
        self.0.truncate(mark);
    }
}

/// Extends `theta` to match `pattern` against a ground atom of the same
/// predicate and arity; leaves partial bindings for the caller to undo.
fn match_pattern(pattern: &Atom, fact: &Atom, theta: &mut Bindings) -> bool {
    for (p, f) in pattern.args.iter().zip(&fact.args) {
        match p {
            Term::Variable(v) => match theta.lookup(v) {
                Some(bound) => {
                    if bound != f {
                        return false;
                    }
                }
                None => theta.0.push((v.clone(), f.clone())),
            },
            ground => {
                if ground != f {
                    return false;
                }
            }
        }
    }
    true
}

fn apply(atom: &Atom, theta: &Bindings) -> Atom {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => theta
                .lookup(v)
                .expect("safe rules bind every variable in the positive body")
                .clone(),
            ground => ground.clone(),
        })
        .collect();
    Atom::new(atom.predicate.clone(), args)
}

type Index = HashMap<PredKey, Vec<Atom>>;

/// Enumerates all matches of `pats[i..]`; position `slot` (if any) draws
/// candidates from `delta`, everything else from `full`.
fn join_from(
    pats: &[&Atom],
    slot: Option<usize>,
    i: usize,
    full: &Index,
    delta: &Index,
    theta: &mut Bindings,
    emit: &mut dyn FnMut(&Bindings),
) {
    if i == pats.len() {
        emit(theta);
        return;
    }
    let source = if slot == Some(i) { delta } else { full };
    let Some(cands) = source.get(&pred_key(pats[i])) else {
        return;
    };
    for cand in cands {
        let mark = theta.mark();
        if match_pattern(pats[i], cand, theta) {
            join_from(pats, slot, i + 1, full, delta, theta, emit);
        }
        theta.undo(mark);
    }
}

fn check_reserved(program: &Program, query: &Query) -> Result<(), GroundError> {
    let atoms = program
        .rules()
        .iter()
        .flat_map(|r| std::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)))
        .chain(query.literals().iter().map(|l| &l.atom));
    for atom in atoms {
        if atom.predicate.starts_with(RESERVED_PREFIX) {
            return Err(GroundError::InternalPredicateClash {
                predicate: atom.predicate.clone(),
            });
        }
    }
    Ok(())
}

/// Computes the query-relevant ground subprogram of `program`.
///
/// The returned program contains the instantiated answer rules for
/// `query` (their heads are [`GroundProgram::query_atoms`]) together with
/// every ground rule that can reach them.
pub fn relevant_ground(
    program: &Program,
    query: &Query,
    limits: ResourceLimits,
) -> Result<GroundProgram, GroundError> {
    check_reserved(program, query)?;

    let answer_rule = Rule {
        head: Atom::new(
            ANSWER_PREDICATE,
            query
                .variables()
                .into_iter()
                .map(|v| Term::Variable(v.to_string()))
                .collect(),
        ),
        body: query.literals().to_vec(),
    };
    let mut rules: Vec<&Rule> = program.rules().iter().collect();
    rules.push(&answer_rule);

    // Phase 1: predicate-level relevance. Reachability from the answer
    // predicate covers the query's predicates through the answer rule.
    let mut edges: HashMap<PredKey, HashSet<PredKey>> = HashMap::new();
    for rule in &rules {
        let entry = edges.entry(pred_key(&rule.head)).or_default();
        entry.extend(rule.body.iter().map(|l| pred_key(&l.atom)));
    }
    let start = pred_key(&answer_rule.head);
    let mut reachable: HashSet<PredKey> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(key) = queue.pop_front() {
        for next in edges.get(&key).into_iter().flatten() {
            if reachable.insert(next.clone()) {
                queue.push_back(next.clone());
            }
        }
    }
    let relevant: Vec<&Rule> = rules
        .into_iter()
        .filter(|r| reachable.contains(&pred_key(&r.head)))
        .collect();

    // Phase 2a: positive over-approximation by semi-naive iteration.
    let mut oa: HashSet<Atom> = HashSet::new();
    let mut full: Index = HashMap::new();
    let mut delta: Vec<Atom> = Vec::new();
    let insert = |atom: Atom, oa: &mut HashSet<Atom>, delta: &mut Vec<Atom>| {
        if oa.insert(atom.clone()) {
            delta.push(atom);
        }
    };
    for rule in &relevant {
        if rule.body.iter().all(|l| l.negated) {
            insert(rule.head.clone(), &mut oa, &mut delta);
        }
    }
    while !delta.is_empty() {
        if oa.len() > limits.max_ground_atoms {
            return Err(GroundError::ResourceLimitExceeded {
                limit: limits.max_ground_atoms,
            });
        }
        let mut delta_index: Index = HashMap::new();
        for atom in delta.drain(..) {
            full.entry(pred_key(&atom)).or_default().push(atom.clone());
            delta_index.entry(pred_key(&atom)).or_default().push(atom);
        }
        let mut next: Vec<Atom> = Vec::new();
        for rule in &relevant {
            let pats: Vec<&Atom> = rule
                .body
                .iter()
                .filter(|l| !l.negated)
                .map(|l| &l.atom)
                .collect();
            for slot in 0..pats.len() {
                let mut theta = Bindings::default();
                join_from(
                    &pats,
                    Some(slot),
                    0,
                    &full,
                    &delta_index,
                    &mut theta,
                    &mut |theta| {
                        let head = apply(&rule.head, theta);
                        if !oa.contains(&head) && !next.contains(&head) {
                            next.push(head);
                        }
                    },
                );
            }
        }
        for atom in next {
            insert(atom, &mut oa, &mut delta);
        }
    }

    // Phase 2b: emit instances whose positive body lies inside the
    // over-approximation; negative literals over underivable atoms are
    // deleted. A ground query always emits its answer-rule instance so
    // that an underivable query still gets a (false) verdict.
    let answer_index = relevant.len().saturating_sub(1);
    let mut triples: BTreeSet<Triple> = BTreeSet::new();
    let mut answer_heads: BTreeSet<String> = BTreeSet::new();
    for (i, rule) in relevant.iter().enumerate() {
        let is_answer = i == answer_index && std::ptr::eq(*rule, &answer_rule);
        let pats: Vec<&Atom> = rule
            .body
            .iter()
            .filter(|l| !l.negated)
            .map(|l| &l.atom)
            .collect();
        let mut emit_instance = |theta: &Bindings| {
            let head = apply(&rule.head, theta);
            let mut pos: BTreeSet<String> = BTreeSet::new();
            let mut neg: BTreeSet<String> = BTreeSet::new();
            for lit in &rule.body {
                let atom = apply(&lit.atom, theta);
                if lit.negated {
                    if oa.contains(&atom) {
                        neg.insert(atom.to_string());
                    }
                } else {
                    pos.insert(atom.to_string());
                }
            }
            if is_answer {
                answer_heads.insert(head.to_string());
            }
            triples.insert((
                head.to_string(),
                pos.into_iter().collect(),
                neg.into_iter().collect(),
            ));
        };
        let mut theta = Bindings::default();
        join_from(&pats, None, 0, &full, &full, &mut theta, &mut emit_instance);
        if is_answer && rule.head.is_ground() && rule.body.iter().all(|l| l.atom.is_ground()) {
            emit_instance(&Bindings::default());
        }
    }

    // Phase 3: atom-level relevance from the instantiated answer atoms.
    let mut by_head: BTreeMap<&str, Vec<&Triple>> = BTreeMap::new();
    for triple in &triples {
        by_head.entry(&triple.0).or_default().push(triple);
    }
    let mut reach: BTreeSet<&str> = answer_heads.iter().map(String::as_str).collect();
    let mut queue: VecDeque<&str> = reach.iter().copied().collect();
    while let Some(atom) = queue.pop_front() {
        for triple in by_head.get(atom).into_iter().flatten() {
            for body_atom in triple.1.iter().chain(&triple.2) {
                if reach.insert(body_atom) {
                    queue.push_back(body_atom);
                }
            }
        }
    }
    let kept: Vec<&Triple> = triples.iter().filter(|t| reach.contains(t.0.as_str())).collect();

    let mut texts: BTreeSet<&str> = BTreeSet::new();
    for (head, pos, neg) in kept.iter().map(|t| (&t.0, &t.1, &t.2)) {
        texts.insert(head);
        texts.extend(pos.iter().map(String::as_str));
        texts.extend(neg.iter().map(String::as_str));
    }
    if texts.len() > limits.max_ground_atoms {
        return Err(GroundError::ResourceLimitExceeded {
            limit: limits.max_ground_atoms,
        });
    }
    let atoms = AtomTable::from_sorted_texts(texts.into_iter().map(str::to_string).collect());
    let id = |t: &str| atoms.id(t).unwrap();
    let rules: BTreeSet<GroundRule> = kept
        .iter()
        .map(|(head, pos, neg)| {
            GroundRule::new(
                id(head),
                pos.iter().map(|t| id(t)).collect(),
                neg.iter().map(|t| id(t)).collect(),
            )
        })
        .collect();
    let query_atoms = answer_heads.iter().map(|t| id(t)).collect();
    Ok(GroundProgram {
        atoms,
        rules: rules.into_iter().collect(),
        query_atoms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_query};

    fn ground(program: &str, query: &str) -> Result<GroundProgram, GroundError> {
        relevant_ground(
            &parse_program(program).unwrap(),
            &parse_query(query).unwrap(),
            ResourceLimits::default(),
        )
    }

    fn texts(gp: &GroundProgram) -> Vec<&str> {
        gp.atoms().iter().map(|(_, t)| t).collect()
    }

    #[test]
    fn win_move_chain() {
        let gp = ground("move(1,2). move(2,3). win(X) :- move(X,Y), not win(Y).", "win(1)")
            .unwrap();
        assert_eq!(
            texts(&gp),
            ["__ans", "move(1,2)", "move(2,3)", "win(1)", "win(2)"]
        );
        assert_eq!(
            gp.rules(),
            [
                GroundRule::new(1, vec![4], vec![]),
                GroundRule::new(2, vec![], vec![]),
                GroundRule::new(3, vec![], vec![]),
                GroundRule::new(4, vec![2], vec![5]),
                GroundRule::new(5, vec![3], vec![]),
            ]
        );
        assert_eq!(gp.query_atoms(), &BTreeSet::from([1]));
    }

    #[test]
    fn irrelevant_rule_discarded_and_underivable_negation_deleted() {
        let gp = ground("q :- not r. p :- not p.", "q").unwrap();
        assert_eq!(texts(&gp), ["__ans", "q"]);
        assert_eq!(
            gp.rules(),
            [
                GroundRule::new(1, vec![2], vec![]),
                GroundRule::new(2, vec![], vec![]),
            ]
        );
    }

    #[test]
    fn mutual_cycle_kept_with_negations() {
        let gp = ground("p :- not q. q :- not p.", "p").unwrap();
        assert_eq!(texts(&gp), ["__ans", "p", "q"]);
        assert_eq!(
            gp.rules(),
            [
                GroundRule::new(1, vec![2], vec![]),
                GroundRule::new(2, vec![], vec![3]),
                GroundRule::new(3, vec![], vec![2]),
            ]
        );
    }

    #[test]
    fn dead_answer_rule_for_underivable_ground_query() {
        let gp = ground("a.", "q").unwrap();
        assert_eq!(texts(&gp), ["__ans", "q"]);
        assert_eq!(gp.rules(), [GroundRule::new(1, vec![2], vec![])]);
        assert_eq!(gp.query_atoms(), &BTreeSet::from([1]));
    }

    #[test]
    fn nonground_query_instantiates_over_derivable_atoms() {
        let gp = ground("move(1,2). move(2,3). win(X) :- move(X,Y), not win(Y).", "win(X)")
            .unwrap();
        assert_eq!(
            texts(&gp),
            [
                "__ans(1)",
                "__ans(2)",
                "move(1,2)",
                "move(2,3)",
                "win(1)",
                "win(2)"
            ]
        );
        assert_eq!(gp.query_atoms(), &BTreeSet::from([1, 2]));
    }

    #[test]
    fn nonground_query_without_bindings_is_empty() {
        let gp = ground("a.", "q(X)").unwrap();
        assert_eq!(gp.atoms().len(), 0);
        assert!(gp.rules().is_empty());
        assert!(gp.query_atoms().is_empty());
    }

    #[test]
    fn conjunctive_query() {
        let gp = ground(
            "move(1,2). move(2,3). win(X) :- move(X,Y), not win(Y).",
            "move(X,Y), not win(Y)",
        )
        .unwrap();
        let ans: Vec<&str> = gp
            .query_atoms()
            .iter()
            .map(|&a| gp.atoms().text(a))
            .collect();
        assert_eq!(ans, ["__ans(1,2)", "__ans(2,3)"]);
    }

    #[test]
    fn reserved_prefix_rejected() {
        let program = parse_program("__helper :- p. p.").unwrap();
        let query = parse_query("p").unwrap();
        assert_eq!(
            relevant_ground(&program, &query, ResourceLimits::default()),
            Err(GroundError::InternalPredicateClash {
                predicate: "__helper".to_string()
            })
        );
        let program = parse_program("p.").unwrap();
        let query = parse_query("__ans").unwrap();
        assert!(matches!(
            relevant_ground(&program, &query, ResourceLimits::default()),
            Err(GroundError::InternalPredicateClash { .. })
        ));
    }

    #[test]
    fn atom_limit_enforced() {
        let program =
            parse_program("d(1). d(2). d(3). d(4). d(5). p(X,Y) :- d(X), d(Y).").unwrap();
        let query = parse_query("p(X,Y)").unwrap();
        let limits = ResourceLimits {
            max_ground_atoms: 10,
        };
        assert_eq!(
            relevant_ground(&program, &query, limits),
            Err(GroundError::ResourceLimitExceeded { limit: 10 })
        );
    }

    #[test]
    fn grounding_is_deterministic() {
        let src = "move(1,2). move(2,3). move(3,4). win(X) :- move(X,Y), not win(Y).";
        let a = ground(src, "win(X)").unwrap();
        let b = ground(src, "win(X)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn builder_canonicalizes() {
        let gp = GroundProgram::builder()
            .rule("q", &["p"], &[])
            .rule("q", &["p", "p"], &[])
            .fact("p")
            .build();
        assert_eq!(texts(&gp), ["p", "q"]);
        assert_eq!(
            gp.rules(),
            [
                GroundRule::new(1, vec![], vec![]),
                GroundRule::new(2, vec![1], vec![]),
            ]
        );
    }

    #[test]
    fn duplicate_source_rules_merge() {
        let gp = ground("p :- not q. p :- not q. q.", "p").unwrap();
        let p_rules: Vec<_> = gp
            .rules()
            .iter()
            .filter(|r| gp.atoms().text(r.head) == "p")
            .collect();
        assert_eq!(p_rules.len(), 1);
    }
}
