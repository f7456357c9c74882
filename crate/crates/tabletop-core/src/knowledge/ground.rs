//! Grounding: rules times constants, with evidence folded in.
//!
//! Each rule yields one ground instance per tuple of constants (tuples
//! with repeated constants included). At grounding time every instance is
//! reduced against the evidence: instances whose truth the evidence fixes
//! become constants, the rest become truth tables over the few query
//! atoms they still depend on. Inference never re-evaluates formulas.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::knowledge::{
    format_ground_atom, EvidenceSet, KnowledgeBase, PredId, PredKind, RuleWeight, VOCABULARY,
};

/// Truth of a ground instance as a function of its free query atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceTruth {
    /// Fixed by evidence and clamps alone.
    Fixed(bool),
    /// Lookup table indexed by dependency bits (dep k contributes bit k).
    Table(Vec<bool>),
}

#[derive(Clone, Debug)]
pub struct GroundInstance {
    /// Index into the rule list.
    pub rule: usize,
    /// Constant indices bound to the rule variables, diagnostic only.
    pub binding: Vec<usize>,
    /// Sorted indices of the unclamped query atoms this instance reads.
    pub deps: Vec<usize>,
    pub truth: InstanceTruth,
}

impl GroundInstance {
    /// Truth under a full query-world assignment.
    pub fn truth_in(&self, world: &[bool]) -> bool {
        match &self.truth {
            InstanceTruth::Fixed(v) => *v,
            InstanceTruth::Table(table) => {
                let mut bits = 0usize;
                for (k, &dep) in self.deps.iter().enumerate() {
                    bits |= (world[dep] as usize) << k;
                }
                table[bits]
            }
        }
    }

    /// Truth with one dependency overridden, for single-site updates.
    pub fn truth_with(&self, world: &[bool], atom: usize, value: bool) -> bool {
        match &self.truth {
            InstanceTruth::Fixed(v) => *v,
            InstanceTruth::Table(table) => {
                let mut bits = 0usize;
                for (k, &dep) in self.deps.iter().enumerate() {
                    let v = if dep == atom { value } else { world[dep] };
                    bits |= (v as usize) << k;
                }
                table[bits]
            }
        }
    }
}

/// A knowledge base grounded over a constant set under fixed evidence.
#[derive(Clone, Debug)]
pub struct GroundNetwork {
    constants: Vec<String>,
    atoms: Vec<(PredId, Vec<usize>)>,
    atom_names: Vec<String>,
    clamps: Vec<Option<bool>>,
    instances: Vec<GroundInstance>,
    /// Per atom: indices of instances that depend on it.
    atom_instances: Vec<Vec<usize>>,
    rule_labels: Vec<String>,
    rule_weights: Vec<RuleWeight>,
}

const MAX_INSTANCE_DEPS: usize = 16;

/// Grounds `kb` over `constants`. Evidence may mention a subset of the
/// constants; query literals in the evidence clamp their atoms.
pub fn ground(kb: &KnowledgeBase, constants: &[String], evidence: &EvidenceSet) -> Result<GroundNetwork> {
    let mut const_index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, c) in constants.iter().enumerate() {
        if const_index.insert(c.as_str(), i).is_some() {
            return Err(Error::Schema(format!("duplicate constant {c}")));
        }
    }

    // Split the evidence into closed-world facts and query clamps, both
    // re-keyed by constant index.
    let mut facts: BTreeMap<(PredId, Vec<usize>), bool> = BTreeMap::new();
    let mut clamp_entries: Vec<(PredId, Vec<usize>, bool)> = Vec::new();
    for (pred, args, value) in evidence.iter() {
        let mut indices = Vec::with_capacity(args.len());
        for arg in args {
            let idx = const_index.get(arg.as_str()).ok_or_else(|| {
                Error::Schema(format!(
                    "evidence atom {} uses constant {arg} outside the constant set",
                    format_ground_atom(pred, args)
                ))
            })?;
            indices.push(*idx);
        }
        match VOCABULARY[pred].kind {
            PredKind::Evidence => {
                facts.insert((pred, indices), value);
            }
            PredKind::Query => clamp_entries.push((pred, indices, value)),
        }
    }

    // Ground query atoms: every grounding of every query predicate the
    // rules mention, in (predicate, arguments) order.
    let query_preds = kb.query_predicates();
    let mut atoms = Vec::new();
    let mut atom_index: BTreeMap<(PredId, Vec<usize>), usize> = BTreeMap::new();
    for &pred in &query_preds {
        for args in arg_tuples(constants.len(), VOCABULARY[pred].arity) {
            atom_index.insert((pred, args.clone()), atoms.len());
            atoms.push((pred, args));
        }
    }
    let atom_names: Vec<String> = atoms
        .iter()
        .map(|(pred, args)| {
            let names: Vec<String> = args.iter().map(|&c| constants[c].clone()).collect();
            format_ground_atom(*pred, &names)
        })
        .collect();

    let mut clamps = vec![None; atoms.len()];
    for (pred, args, value) in clamp_entries {
        let name = format_ground_atom(pred, &args.iter().map(|&c| constants[c].clone()).collect::<Vec<_>>());
        let idx = atom_index
            .get(&(pred, args))
            .ok_or_else(|| Error::Schema(format!("clamped atom {name} is not in the network")))?;
        clamps[*idx] = Some(value);
    }

    // Compile instances.
    let mut instances = Vec::new();
    for (rule_idx, rule) in kb.rules().iter().enumerate() {
        for binding in arg_tuples(constants.len(), rule.var_count()) {
            // Collect the unclamped query atoms the formula touches.
            let mut deps: Vec<usize> = Vec::new();
            rule.formula.visit_atoms(&mut |a| {
                if VOCABULARY[a.pred].kind == PredKind::Query {
                    let args: Vec<usize> = a.args.iter().map(|&v| binding[v]).collect();
                    let idx = atom_index[&(a.pred, args)];
                    if clamps[idx].is_none() && !deps.contains(&idx) {
                        deps.push(idx);
                    }
                }
            });
            deps.sort_unstable();
            if deps.len() > MAX_INSTANCE_DEPS {
                return Err(Error::Schema(format!(
                    "rule {} grounds to an instance with {} free query atoms (max {})",
                    rule.label,
                    deps.len(),
                    MAX_INSTANCE_DEPS
                )));
            }

            let eval_with = |assignment: &dyn Fn(usize) -> bool| {
                let mut lookup = |pred: PredId, args: &[usize]| -> bool {
                    match VOCABULARY[pred].kind {
                        PredKind::Evidence => {
                            facts.get(&(pred, args.to_vec())).copied().unwrap_or(false)
                        }
                        PredKind::Query => {
                            let idx = atom_index[&(pred, args.to_vec())];
                            match clamps[idx] {
                                Some(v) => v,
                                None => assignment(idx),
                            }
                        }
                    }
                };
                rule.formula.eval(&binding, &mut lookup)
            };

            let truth = if deps.is_empty() {
                InstanceTruth::Fixed(eval_with(&|_| unreachable!("no free atoms")))
            } else {
                let table: Vec<bool> = (0..1usize << deps.len())
                    .map(|mask| {
                        eval_with(&|atom_idx| {
                            let k = deps.iter().position(|&d| d == atom_idx).expect("dep listed");
                            mask >> k & 1 == 1
                        })
                    })
                    .collect();
                InstanceTruth::Table(table)
            };

            instances.push(GroundInstance { rule: rule_idx, binding, deps, truth });
        }
    }

    let mut atom_instances = vec![Vec::new(); atoms.len()];
    for (i, inst) in instances.iter().enumerate() {
        for &dep in &inst.deps {
            atom_instances[dep].push(i);
        }
    }

    Ok(GroundNetwork {
        constants: constants.to_vec(),
        atoms,
        atom_names,
        clamps,
        instances,
        atom_instances,
        rule_labels: kb.rules().iter().map(|r| r.label.clone()).collect(),
        rule_weights: kb.rules().iter().map(|r| r.weight).collect(),
    })
}

/// All `arity`-tuples over `n` constants in lexicographic order; the
/// single empty tuple when `arity` is zero.
fn arg_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for c in 0..n {
                let mut tuple = prefix.clone();
                tuple.push(c);
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}

impl GroundNetwork {
    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[(PredId, Vec<usize>)] {
        &self.atoms
    }

    pub fn atom_name(&self, idx: usize) -> &str {
        &self.atom_names[idx]
    }

    pub fn clamps(&self) -> &[Option<bool>] {
        &self.clamps
    }

    pub fn instances(&self) -> &[GroundInstance] {
        &self.instances
    }

    pub fn instances_of_atom(&self, atom: usize) -> &[usize] {
        &self.atom_instances[atom]
    }

    pub fn rule_weight(&self, rule: usize) -> RuleWeight {
        self.rule_weights[rule]
    }

    pub fn rule_label(&self, rule: usize) -> &str {
        &self.rule_labels[rule]
    }

    pub fn find_atom(&self, pred_name: &str, arg_names: &[&str]) -> Option<usize> {
        let name = format!("{}({})", pred_name, arg_names.join(","));
        self.atom_names.iter().position(|n| *n == name)
    }

    /// Hard-rule instances the evidence alone already violates. Non-empty
    /// means no query world is feasible.
    pub fn violated_hard_rules(&self) -> Vec<String> {
        self.instances
            .iter()
            .filter(|inst| {
                self.rule_weights[inst.rule] == RuleWeight::Hard
                    && inst.truth == InstanceTruth::Fixed(false)
            })
            .map(|inst| {
                let binding: Vec<&str> =
                    inst.binding.iter().map(|&c| self.constants[c].as_str()).collect();
                format!("{}({})", self.rule_labels[inst.rule], binding.join(","))
            })
            .collect()
    }
}
