//! Brute-force reference evaluator for query marginals.
//!
//! Deliberately shares nothing with the production inference path
//! beyond the parsed rule structures: no grounding step, no compiled
//! truth tables, no factorization, no log-space tricks. Every world is
//! enumerated, every rule is re-evaluated in place by recursion, and
//! the sums run in plain probability space. Slow and simple on purpose;
//! disagreement with the fast path means one of them is wrong.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::knowledge::{
    Formula, KnowledgeBase, PredId, PredKind, QueryResult, RuleWeight, Support, EvidenceSet,
    VOCABULARY,
};

/// One ground query atom: predicate and constant indices.
type AtomKey = (PredId, Vec<usize>);

fn eval_formula(
    formula: &Formula,
    binding: &[usize],
    truth: &dyn Fn(PredId, &[usize]) -> bool,
) -> bool {
    match formula {
        Formula::Atom(atom) => {
            let args: Vec<usize> = atom.args.iter().map(|&v| binding[v]).collect();
            truth(atom.pred, &args)
        }
        Formula::Not(inner) => !eval_formula(inner, binding, truth),
        Formula::And(lhs, rhs) => {
            eval_formula(lhs, binding, truth) && eval_formula(rhs, binding, truth)
        }
        Formula::Or(lhs, rhs) => {
            eval_formula(lhs, binding, truth) || eval_formula(rhs, binding, truth)
        }
        Formula::Implies(lhs, rhs) => {
            !eval_formula(lhs, binding, truth) || eval_formula(rhs, binding, truth)
        }
    }
}

/// Every assignment of `vars` variables to constant indices, least
/// significant variable first.
fn bindings(vars: usize, constant_count: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; vars]];
    if vars == 0 {
        return out;
    }
    out.clear();
    let total = constant_count.pow(vars as u32);
    for mut code in 0..total {
        let mut b = vec![0; vars];
        for slot in b.iter_mut() {
            *slot = code % constant_count;
            code /= constant_count;
        }
        out.push(b);
    }
    out
}

fn arg_tuples(arity: usize, constant_count: usize) -> Vec<Vec<usize>> {
    // Lexicographic in the constant indices, first argument most
    // significant; this is the published atom order.
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..constant_count).map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}

/// Exact query marginals by full enumeration. The atom set is the
/// groundings of every query predicate the rules mention, in vocabulary
/// order; clamped atoms stay in the output with their clamped value.
pub fn oracle_query_marginals(
    kb: &KnowledgeBase,
    constants: &[String],
    evidence: &EvidenceSet,
    cap: usize,
) -> Result<QueryResult> {
    let const_index: BTreeMap<&str, usize> =
        constants.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    if const_index.len() != constants.len() {
        return Err(Error::Schema("duplicate constant".into()));
    }

    // Atom list.
    let mut query_preds: Vec<PredId> = Vec::new();
    for rule in kb.rules() {
        rule.formula.visit_atoms(&mut |atom| {
            if VOCABULARY[atom.pred].kind == PredKind::Query && !query_preds.contains(&atom.pred)
            {
                query_preds.push(atom.pred);
            }
        });
    }
    query_preds.sort_unstable();
    let mut atoms: Vec<AtomKey> = Vec::new();
    for &pred in &query_preds {
        for args in arg_tuples(VOCABULARY[pred].arity, constants.len()) {
            atoms.push((pred, args));
        }
    }
    if atoms.len() > cap {
        return Err(Error::Capacity { atoms: atoms.len(), cap });
    }
    let atom_index: BTreeMap<&AtomKey, usize> =
        atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();

    // Evidence facts and query clamps, both keyed by constant index.
    let mut facts: BTreeMap<AtomKey, bool> = BTreeMap::new();
    let mut clamps: BTreeMap<usize, bool> = BTreeMap::new();
    for (pred, args, value) in evidence.iter() {
        let mut indices = Vec::with_capacity(args.len());
        for a in args {
            match const_index.get(a.as_str()) {
                Some(&i) => indices.push(i),
                None => {
                    return Err(Error::Schema(format!("evidence names unknown constant {a}")))
                }
            }
        }
        let key = (pred, indices);
        if VOCABULARY[pred].kind == PredKind::Query {
            match atom_index.get(&key) {
                Some(&i) => {
                    clamps.insert(i, value);
                }
                None => {
                    return Err(Error::Schema(format!(
                        "clamp on an atom no rule mentions: {}",
                        VOCABULARY[pred].name
                    )))
                }
            }
        } else {
            facts.insert(key, value);
        }
    }

    let rule_bindings: Vec<Vec<Vec<usize>>> = kb
        .rules()
        .iter()
        .map(|r| bindings(r.var_names.len(), constants.len()))
        .collect();

    let n = atoms.len();
    let mut total = 0.0f64;
    let mut atom_sums = vec![0.0f64; n];
    let mut feasible = 0u64;

    'worlds: for mask in 0u64..(1u64 << n) {
        for (&atom, &value) in &clamps {
            if ((mask >> atom) & 1 == 1) != value {
                continue 'worlds;
            }
        }
        let truth = |pred: PredId, args: &[usize]| -> bool {
            let key = (pred, args.to_vec());
            match VOCABULARY[pred].kind {
                PredKind::Query => {
                    let i = atom_index[&key];
                    (mask >> i) & 1 == 1
                }
                // Closed world: unstated evidence is false.
                PredKind::Evidence => facts.get(&key).copied().unwrap_or(false),
            }
        };
        let mut log_weight = 0.0;
        for (rule, binds) in kb.rules().iter().zip(&rule_bindings) {
            for binding in binds {
                let holds = eval_formula(&rule.formula, binding, &truth);
                match rule.weight {
                    RuleWeight::Hard => {
                        if !holds {
                            continue 'worlds;
                        }
                    }
                    RuleWeight::Soft(w) => {
                        if holds {
                            log_weight += w;
                        }
                    }
                }
            }
        }
        let weight = log_weight.exp();
        feasible += 1;
        total += weight;
        for (i, sum) in atom_sums.iter_mut().enumerate() {
            if (mask >> i) & 1 == 1 {
                *sum += weight;
            }
        }
    }

    if feasible == 0 {
        return Err(Error::Infeasible {
            violations: vec!["no query world satisfies the hard rules".into()],
        });
    }

    let entries = atoms
        .iter()
        .zip(&atom_sums)
        .map(|((pred, args), sum)| {
            let names: Vec<&str> = args.iter().map(|&i| constants[i].as_str()).collect();
            (format!("{}({})", VOCABULARY[*pred].name, names.join(",")), sum / total)
        })
        .collect();
    Ok(QueryResult::from_entries(entries, Support::FeasibleWorlds(feasible)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge::{
        default_knowledge_base, ground, parse_knowledge_base, query_marginals_exact,
    };
    use approx::assert_relative_eq;

    fn strings(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_soft_rule_matches_hand_computation() {
        let kb = parse_knowledge_base("2.1972245773362196 stable(o) -> !false(o)\n").unwrap();
        let mut e = EvidenceSet::default();
        e.add_constant("O1");
        e.assert_atom("stable", &["O1"], true).unwrap();
        let r = oracle_query_marginals(&kb, &strings(&["O1"]), &e, 22).unwrap();
        // Worlds: false(O1)=0 satisfies (weight 9), false(O1)=1 does not
        // (weight 1). P(false) = 1/10.
        assert_relative_eq!(r.get("false(O1)").unwrap(), 0.1, epsilon = 1e-12);
        assert_eq!(r.support, Support::FeasibleWorlds(2));
    }

    #[test]
    fn agrees_with_fast_path_on_default_rules() {
        let kb = default_knowledge_base();
        let consts = strings(&["table", "O1", "O2"]);
        let mut e = EvidenceSet::default();
        for c in &consts {
            e.add_constant(c);
        }
        e.assert_atom("table", &["table"], true).unwrap();
        e.assert_atom("stable", &["table"], true).unwrap();
        e.assert_atom("stable", &["O1"], true).unwrap();
        e.assert_atom("contact", &["O1", "table"], true).unwrap();
        e.assert_atom("contact", &["table", "O1"], true).unwrap();
        e.assert_atom("higher", &["O1", "table"], true).unwrap();
        e.assert_atom("hover", &["O2"], true).unwrap();
        e.assert_atom("higher", &["O2", "table"], true).unwrap();
        e.assert_atom("higher", &["O2", "O1"], true).unwrap();

        let slow = oracle_query_marginals(&kb, &consts, &e, 22).unwrap();
        let gn = ground(&kb, &consts, &e).unwrap();
        let fast = query_marginals_exact(&gn, 22).unwrap();
        assert_eq!(slow.entries().len(), fast.entries().len());
        for (name, p) in slow.entries() {
            let q = fast.get(name).unwrap();
            assert_relative_eq!(*p, q, epsilon = 1e-9);
        }
        assert_eq!(slow.support, fast.support);
    }

    #[test]
    fn agrees_with_fast_path_under_clamps() {
        let kb = default_knowledge_base();
        let consts = strings(&["table", "O1"]);
        let mut e = EvidenceSet::default();
        for c in &consts {
            e.add_constant(c);
        }
        e.assert_atom("table", &["table"], true).unwrap();
        e.assert_atom("stable", &["table"], true).unwrap();
        e.assert_atom("stable", &["O1"], true).unwrap();
        e.assert_atom("supported", &["O1"], true).unwrap();

        let slow = oracle_query_marginals(&kb, &consts, &e, 22).unwrap();
        let gn = ground(&kb, &consts, &e).unwrap();
        let fast = query_marginals_exact(&gn, 22).unwrap();
        for (name, p) in slow.entries() {
            assert_relative_eq!(*p, fast.get(name).unwrap(), epsilon = 1e-9);
        }
        assert_relative_eq!(slow.get("supported(O1)").unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(slow.get("hidden(O1)").unwrap(), 0.3, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_evidence_is_an_error() {
        let kb = default_knowledge_base();
        let consts = strings(&["table"]);
        let mut e = EvidenceSet::default();
        e.add_constant("table");
        e.assert_atom("table", &["table"], true).unwrap();
        e.assert_atom("stable", &["table"], true).unwrap();
        // Hard: table is never a false estimate, so this clamp rules
        // out every world.
        e.assert_atom("false", &["table"], true).unwrap();
        assert!(matches!(
            oracle_query_marginals(&kb, &consts, &e, 22),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn capacity_is_enforced() {
        let kb = default_knowledge_base();
        let consts = strings(&["table", "O1", "O2", "O3", "O4", "O5"]);
        let mut e = EvidenceSet::default();
        for c in &consts {
            e.add_constant(c);
        }
        e.assert_atom("table", &["table"], true).unwrap();
        e.assert_atom("stable", &["table"], true).unwrap();
        // 4 unary query predicates over 6 constants is 24 atoms.
        assert!(matches!(
            oracle_query_marginals(&kb, &consts, &e, 22),
            Err(Error::Capacity { atoms: 24, cap: 22 })
        ));
    }
}
