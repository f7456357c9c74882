//! Weighted first-order rules over scene relations, their grounding, and
//! query inference.
//!
//! The vocabulary is fixed: six observable (evidence) predicates produced
//! by geometry, four latent (query) predicates inferred here. Rules are
//! universally quantified formulas with either a hard weight (worlds that
//! violate one are impossible) or a soft log-odds weight. A world's
//! unnormalized log weight is the sum over soft rules of weight times the
//! number of true ground instances.

mod ground;
mod infer;
mod text;

pub use ground::{ground, GroundInstance, GroundNetwork, InstanceTruth};
pub use infer::{
    classify_queries, query_marginals_exact, query_marginals_gibbs, unnormalized_prior,
    world_log_weight, Decision, PriorMode, PriorValue, QueryResult, Support,
};
pub use text::{evidence_to_text, knowledge_base_to_text, parse_evidence, parse_knowledge_base};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredKind {
    /// Fixed by the scene under the closed-world assumption.
    Evidence,
    /// Latent; inference assigns it a marginal.
    Query,
}

#[derive(Clone, Copy, Debug)]
pub struct PredicateDef {
    pub name: &'static str,
    pub arity: usize,
    pub kind: PredKind,
}

/// Index into [`VOCABULARY`].
pub type PredId = usize;

pub const VOCABULARY: [PredicateDef; 10] = [
    PredicateDef { name: "stable", arity: 1, kind: PredKind::Evidence },
    PredicateDef { name: "table", arity: 1, kind: PredKind::Evidence },
    PredicateDef { name: "contact", arity: 2, kind: PredKind::Evidence },
    PredicateDef { name: "intersect", arity: 2, kind: PredKind::Evidence },
    PredicateDef { name: "hover", arity: 1, kind: PredKind::Evidence },
    PredicateDef { name: "higher", arity: 2, kind: PredKind::Evidence },
    PredicateDef { name: "supportive", arity: 1, kind: PredKind::Query },
    PredicateDef { name: "supported", arity: 1, kind: PredKind::Query },
    PredicateDef { name: "hidden", arity: 1, kind: PredKind::Query },
    PredicateDef { name: "false", arity: 1, kind: PredKind::Query },
];

pub fn pred_by_name(name: &str) -> Option<PredId> {
    VOCABULARY.iter().position(|p| p.name == name)
}

/// Variable slot within one rule (0 for `o1`, 1 for `o2`, ...).
pub type Var = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct FormulaAtom {
    pub pred: PredId,
    pub args: Vec<Var>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Atom(FormulaAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Evaluates under a variable binding, pulling ground-atom truth from
    /// `lookup`.
    pub fn eval(&self, binding: &[usize], lookup: &mut dyn FnMut(PredId, &[usize]) -> bool) -> bool {
        match self {
            Formula::Atom(a) => {
                let args: Vec<usize> = a.args.iter().map(|v| binding[*v]).collect();
                lookup(a.pred, &args)
            }
            Formula::Not(f) => !f.eval(binding, lookup),
            Formula::And(l, r) => l.eval(binding, lookup) && r.eval(binding, lookup),
            Formula::Or(l, r) => l.eval(binding, lookup) || r.eval(binding, lookup),
            Formula::Implies(l, r) => !l.eval(binding, lookup) || r.eval(binding, lookup),
        }
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&FormulaAtom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(inner) => inner.visit_atoms(f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.visit_atoms(f);
                r.visit_atoms(f);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleWeight {
    /// Violating worlds carry zero probability.
    Hard,
    /// Log-odds weight added once per satisfied ground instance.
    Soft(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub label: String,
    pub weight: RuleWeight,
    pub formula: Formula,
    pub var_names: Vec<String>,
}

impl Rule {
    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnowledgeBase {
    rules: Vec<Rule>,
}

impl KnowledgeBase {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Query predicates mentioned by at least one rule; these are the
    /// predicates that ground to query atoms.
    pub fn query_predicates(&self) -> Vec<PredId> {
        let mut used = [false; VOCABULARY.len()];
        for rule in &self.rules {
            rule.formula.visit_atoms(&mut |a| used[a.pred] = true);
        }
        (0..VOCABULARY.len())
            .filter(|&p| used[p] && VOCABULARY[p].kind == PredKind::Query)
            .collect()
    }

    pub fn parse(input: &str) -> Result<Self> {
        text::parse_knowledge_base(input)
    }

    pub fn to_text(&self) -> String {
        text::knowledge_base_to_text(self)
    }
}

fn atom(name: &str, vars: &[Var]) -> Formula {
    Formula::Atom(FormulaAtom {
        pred: pred_by_name(name).expect("builder uses vocabulary names"),
        args: vars.to_vec(),
    })
}

fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

fn and(l: Formula, r: Formula) -> Formula {
    Formula::And(Box::new(l), Box::new(r))
}

fn or(l: Formula, r: Formula) -> Formula {
    Formula::Or(Box::new(l), Box::new(r))
}

fn implies(l: Formula, r: Formula) -> Formula {
    Formula::Implies(Box::new(l), Box::new(r))
}

/// Soft-rule weight expressing odds `p : (1 - p)` for satisfaction.
pub fn log_odds(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// The sixteen standing rules of the table-top domain.
///
/// r1-r10 are structural hard rules (irreflexivity, symmetry of touch
/// relations, antisymmetry of height, table axioms, support detection).
/// r11-r16 are soft rules scoring the interplay of support, visibility
/// and estimate trust.
pub fn default_knowledge_base() -> KnowledgeBase {
    const O1: Var = 0;
    const O2: Var = 1;
    let one = || vec!["o1".to_owned()];
    let two = || vec!["o1".to_owned(), "o2".to_owned()];

    let hard = |label: &str, vars: Vec<String>, formula: Formula| Rule {
        label: label.to_owned(),
        weight: RuleWeight::Hard,
        formula,
        var_names: vars,
    };
    let soft = |label: &str, p: f64, vars: Vec<String>, formula: Formula| Rule {
        label: label.to_owned(),
        weight: RuleWeight::Soft(log_odds(p)),
        formula,
        var_names: vars,
    };

    KnowledgeBase::new(vec![
        hard("r1", one(), not(atom("higher", &[O1, O1]))),
        hard("r2", one(), not(atom("intersect", &[O1, O1]))),
        hard("r3", one(), not(atom("contact", &[O1, O1]))),
        hard(
            "r4",
            two(),
            implies(atom("contact", &[O1, O2]), atom("contact", &[O2, O1])),
        ),
        hard(
            "r5",
            two(),
            implies(atom("intersect", &[O1, O2]), atom("intersect", &[O2, O1])),
        ),
        hard(
            "r6",
            two(),
            implies(atom("higher", &[O1, O2]), not(atom("higher", &[O2, O1]))),
        ),
        hard("r7", one(), implies(atom("table", &[O1]), not(atom("false", &[O1])))),
        hard("r8", one(), implies(atom("table", &[O1]), not(atom("hidden", &[O1])))),
        hard("r9", one(), implies(atom("table", &[O1]), atom("stable", &[O1]))),
        hard(
            "r10",
            two(),
            implies(
                and(
                    and(
                        and(atom("stable", &[O1]), atom("stable", &[O2])),
                        atom("contact", &[O1, O2]),
                    ),
                    atom("higher", &[O1, O2]),
                ),
                and(atom("supportive", &[O2]), atom("supported", &[O1])),
            ),
        ),
        soft(
            "r11",
            0.70,
            one(),
            implies(atom("supported", &[O1]), not(atom("hidden", &[O1]))),
        ),
        soft(
            "r12",
            0.90,
            one(),
            implies(not(atom("stable", &[O1])), not(atom("supportive", &[O1]))),
        ),
        soft(
            "r13",
            0.90,
            one(),
            implies(
                atom("hover", &[O1]),
                or(atom("false", &[O1]), atom("hidden", &[O1])),
            ),
        ),
        soft(
            "r14",
            0.90,
            two(),
            implies(
                atom("intersect", &[O1, O2]),
                or(atom("false", &[O1]), atom("false", &[O2])),
            ),
        ),
        soft(
            "r15",
            0.70,
            one(),
            implies(atom("supportive", &[O1]), not(atom("false", &[O1]))),
        ),
        soft("r16", 0.90, one(), implies(atom("stable", &[O1]), not(atom("false", &[O1])))),
    ])
}

/// Ground literals over named constants.
///
/// Evidence-predicate atoms are closed-world: everything not asserted
/// true is false. Query-predicate literals may also be asserted; they
/// clamp the corresponding ground query atom during inference.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvidenceSet {
    /// First-appearance order; grounding preserves it.
    constants: Vec<String>,
    entries: BTreeMap<(PredId, Vec<String>), bool>,
}

impl EvidenceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constant(&mut self, name: &str) {
        if !self.constants.iter().any(|c| c == name) {
            self.constants.push(name.to_owned());
        }
    }

    pub fn assert_atom(&mut self, pred_name: &str, args: &[&str], value: bool) -> Result<()> {
        let pred = pred_by_name(pred_name)
            .ok_or_else(|| Error::Schema(format!("unknown predicate {pred_name}")))?;
        let def = &VOCABULARY[pred];
        if args.len() != def.arity {
            return Err(Error::Schema(format!(
                "{pred_name} takes {} arguments, got {}",
                def.arity,
                args.len()
            )));
        }
        for arg in args {
            self.add_constant(arg);
        }
        self.entries
            .insert((pred, args.iter().map(|s| (*s).to_owned()).collect()), value);
        Ok(())
    }

    pub fn entry(&self, pred: PredId, args: &[String]) -> Option<bool> {
        self.entries.get(&(pred, args.to_vec())).copied()
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn iter(&self) -> impl Iterator<Item = (PredId, &[String], bool)> {
        self.entries
            .iter()
            .map(|((pred, args), value)| (*pred, args.as_slice(), *value))
    }

    pub fn parse(input: &str) -> Result<Self> {
        text::parse_evidence(input)
    }

    pub fn to_text(&self) -> String {
        text::evidence_to_text(self)
    }
}

/// Renders a ground atom in evidence-file syntax, e.g. `contact(O1,table)`.
pub fn format_ground_atom(pred: PredId, args: &[String]) -> String {
    format!("{}({})", VOCABULARY[pred].name, args.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_kb_has_sixteen_rules_with_expected_weights() {
        let kb = default_knowledge_base();
        assert_eq!(kb.rules().len(), 16);
        for rule in &kb.rules()[..10] {
            assert_eq!(rule.weight, RuleWeight::Hard, "{} should be hard", rule.label);
        }
        let soft = |i: usize| match kb.rules()[i].weight {
            RuleWeight::Soft(w) => w,
            RuleWeight::Hard => panic!("rule {i} should be soft"),
        };
        assert_relative_eq!(soft(10), 0.8472978603872034, epsilon = 1e-12); // r11
        assert_relative_eq!(soft(11), 2.1972245773362196, epsilon = 1e-12); // r12
        assert_relative_eq!(soft(12), 2.1972245773362196, epsilon = 1e-12); // r13
        assert_relative_eq!(soft(13), 2.1972245773362196, epsilon = 1e-12); // r14
        assert_relative_eq!(soft(14), 0.8472978603872034, epsilon = 1e-12); // r15
        assert_relative_eq!(soft(15), 2.1972245773362196, epsilon = 1e-12); // r16
    }

    #[test]
    fn query_predicates_follow_rule_mentions() {
        let kb = default_knowledge_base();
        let names: Vec<&str> = kb.query_predicates().iter().map(|&p| VOCABULARY[p].name).collect();
        assert_eq!(names, vec!["supportive", "supported", "hidden", "false"]);

        let only_r16 = KnowledgeBase::new(vec![kb.rules()[15].clone()]);
        let names: Vec<&str> =
            only_r16.query_predicates().iter().map(|&p| VOCABULARY[p].name).collect();
        assert_eq!(names, vec!["false"]);
    }

    #[test]
    fn evidence_is_closed_world() {
        let mut ev = EvidenceSet::new();
        ev.assert_atom("stable", &["O1"], true).unwrap();
        let stable = pred_by_name("stable").unwrap();
        assert_eq!(ev.entry(stable, &["O1".to_owned()]), Some(true));
        assert_eq!(ev.entry(stable, &["O2".to_owned()]), None);
        assert_eq!(ev.constants(), ["O1"]);
    }

    #[test]
    fn evidence_rejects_unknown_predicate_and_bad_arity() {
        let mut ev = EvidenceSet::new();
        assert!(matches!(
            ev.assert_atom("floats", &["O1"], true),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            ev.assert_atom("contact", &["O1"], true),
            Err(Error::Schema(_))
        ));
    }
}
