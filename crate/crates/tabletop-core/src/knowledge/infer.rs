//! Inference over a ground network: world scores, the unnormalized
//! prior, and query marginals by exact enumeration or Gibbs sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knowledge::{GroundNetwork, InstanceTruth, RuleWeight};

/// How the prior treats the query atoms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PriorMode {
    /// Sum the weight of every feasible query world (log-sum-exp).
    #[default]
    Marginalize,
    /// Score only the single best query world.
    MapWorld,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorValue {
    /// Log of the unnormalized scene weight; negative infinity when no
    /// query world is feasible.
    pub log_weight: f64,
    pub feasible: bool,
}

/// Log weight of one full query world: the weighted count of satisfied
/// soft instances, or negative infinity if the world breaks a hard rule
/// or contradicts a clamp.
pub fn world_log_weight(gn: &GroundNetwork, world: &[bool]) -> f64 {
    assert_eq!(world.len(), gn.atom_count(), "world must assign every query atom");
    for (idx, clamp) in gn.clamps().iter().enumerate() {
        if let Some(v) = clamp {
            if world[idx] != *v {
                return f64::NEG_INFINITY;
            }
        }
    }
    let mut total = 0.0;
    for inst in gn.instances() {
        let truth = inst.truth_in(world);
        match gn.rule_weight(inst.rule) {
            RuleWeight::Hard => {
                if !truth {
                    return f64::NEG_INFINITY;
                }
            }
            RuleWeight::Soft(w) => {
                if truth {
                    total += w;
                }
            }
        }
    }
    total
}

/// Online log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        Self { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

const MAX_COMPONENT_ATOMS: usize = 26;

/// Unnormalized log prior of the evidence behind `gn`.
///
/// The ground network factorizes over connected components of query
/// atoms (atoms linked by a shared non-fixed instance), so the log of
/// the sum over all feasible worlds is the sum of per-component
/// log-sum-exp terms plus `ln 2` per completely unconstrained atom.
/// This equals brute-force enumeration over all worlds and stays
/// tractable for any scene the default rules produce.
pub fn unnormalized_prior(gn: &GroundNetwork, mode: PriorMode) -> Result<PriorValue> {
    let infeasible = PriorValue { log_weight: f64::NEG_INFINITY, feasible: false };

    // Base contribution from instances decided by evidence alone.
    let mut base = 0.0;
    for inst in gn.instances() {
        if let InstanceTruth::Fixed(truth) = inst.truth {
            match gn.rule_weight(inst.rule) {
                RuleWeight::Hard => {
                    if !truth {
                        return Ok(infeasible);
                    }
                }
                RuleWeight::Soft(w) => {
                    if truth {
                        base += w;
                    }
                }
            }
        }
    }

    // Union atoms linked by an instance.
    let n = gn.atom_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for inst in gn.instances() {
        for pair in inst.deps.windows(2) {
            let a = find(&mut parent, pair[0]);
            let b = find(&mut parent, pair[1]);
            parent[a] = b;
        }
    }

    let mut comp_atoms: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for atom in 0..n {
        if gn.clamps()[atom].is_some() {
            continue; // folded into the tables at grounding time
        }
        if gn.instances_of_atom(atom).is_empty() && find(&mut parent, atom) == atom {
            continue; // fully unconstrained, handled in closed form
        }
        let root = find(&mut parent, atom);
        comp_atoms.entry(root).or_default().push(atom);
    }
    let free_atoms = (0..n)
        .filter(|&a| gn.clamps()[a].is_none())
        .filter(|&a| !comp_atoms.contains_key(&find(&mut parent, a)))
        .count();

    let mut comp_instances: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, inst) in gn.instances().iter().enumerate() {
        if let Some(&first) = inst.deps.first() {
            let root = find(&mut parent, first);
            comp_instances.entry(root).or_default().push(i);
        }
    }

    let mut total = base;
    let mut world = vec![false; n];
    for (idx, clamp) in gn.clamps().iter().enumerate() {
        if let Some(v) = clamp {
            world[idx] = *v;
        }
    }
    for (root, atoms) in &comp_atoms {
        if atoms.len() > MAX_COMPONENT_ATOMS {
            return Err(Error::Capacity { atoms: atoms.len(), cap: MAX_COMPONENT_ATOMS });
        }
        let instances = comp_instances.get(root).map(Vec::as_slice).unwrap_or(&[]);
        let mut acc = LogSum::new();
        let mut best = f64::NEG_INFINITY;
        'world: for mask in 0..(1usize << atoms.len()) {
            for (k, &atom) in atoms.iter().enumerate() {
                world[atom] = mask >> k & 1 == 1;
            }
            let mut score = 0.0;
            for &i in instances {
                let inst = &gn.instances()[i];
                let truth = inst.truth_in(&world);
                match gn.rule_weight(inst.rule) {
                    RuleWeight::Hard => {
                        if !truth {
                            continue 'world;
                        }
                    }
                    RuleWeight::Soft(w) => {
                        if truth {
                            score += w;
                        }
                    }
                }
            }
            acc.add(score);
            if score > best {
                best = score;
            }
        }
        let comp_value = match mode {
            PriorMode::Marginalize => acc.value(),
            PriorMode::MapWorld => best,
        };
        if comp_value == f64::NEG_INFINITY {
            return Ok(infeasible);
        }
        total += comp_value;
    }

    if mode == PriorMode::Marginalize {
        total += free_atoms as f64 * std::f64::consts::LN_2;
    }
    Ok(PriorValue { log_weight: total, feasible: true })
}

/// How much evidence backs a marginal estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// Exact enumeration over this many feasible worlds.
    FeasibleWorlds(u64),
    /// Gibbs frequency over this many post-burn-in sweeps.
    Samples(u64),
}

/// Posterior marginals for every ground query atom.
#[derive(Clone, Debug)]
pub struct QueryResult {
    entries: Vec<(String, f64)>,
    pub support: Support,
}

impl QueryResult {
    pub fn from_entries(entries: Vec<(String, f64)>, support: Support) -> Self {
        Self { entries, support }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn get(&self, atom_name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == atom_name).map(|(_, v)| *v)
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.entries.iter().cloned().collect()
    }
}

/// Exact marginals by enumeration over all feasible query worlds.
///
/// P(atom) = sum of world weights with the atom true over the total; both
/// sums are carried with a running-max log-sum-exp. Networks with more
/// than `cap` ground query atoms are rejected.
pub fn query_marginals_exact(gn: &GroundNetwork, cap: usize) -> Result<QueryResult> {
    let n = gn.atom_count();
    if n > cap {
        return Err(Error::Capacity { atoms: n, cap });
    }

    let free: Vec<usize> = (0..n).filter(|&a| gn.clamps()[a].is_none()).collect();
    let active: Vec<&crate::knowledge::GroundInstance> =
        gn.instances().iter().filter(|i| !matches!(i.truth, InstanceTruth::Fixed(_))).collect();

    // Evidence-fixed instances decide feasibility once.
    for inst in gn.instances() {
        if gn.rule_weight(inst.rule) == RuleWeight::Hard && inst.truth == InstanceTruth::Fixed(false)
        {
            return Err(Error::Infeasible { violations: gn.violated_hard_rules() });
        }
    }

    let mut world = vec![false; n];
    for (idx, clamp) in gn.clamps().iter().enumerate() {
        if let Some(v) = clamp {
            world[idx] = *v;
        }
    }

    let mut max_score = f64::NEG_INFINITY;
    let mut total = 0.0f64;
    let mut sums = vec![0.0f64; n];
    let mut feasible = 0u64;

    'world: for mask in 0..(1u64 << free.len()) {
        for (k, &atom) in free.iter().enumerate() {
            world[atom] = mask >> k & 1 == 1;
        }
        let mut score = 0.0;
        for inst in &active {
            let truth = inst.truth_in(&world);
            match gn.rule_weight(inst.rule) {
                RuleWeight::Hard => {
                    if !truth {
                        continue 'world;
                    }
                }
                RuleWeight::Soft(w) => {
                    if truth {
                        score += w;
                    }
                }
            }
        }
        feasible += 1;
        if score > max_score {
            let rescale = if max_score == f64::NEG_INFINITY { 0.0 } else { (max_score - score).exp() };
            total *= rescale;
            for s in &mut sums {
                *s *= rescale;
            }
            max_score = score;
        }
        let w = (score - max_score).exp();
        total += w;
        for (atom, s) in sums.iter_mut().enumerate() {
            if world[atom] {
                *s += w;
            }
        }
    }

    if feasible == 0 {
        let mut violations = gn.violated_hard_rules();
        if violations.is_empty() {
            violations.push("no feasible assignment of the query atoms".to_owned());
        }
        return Err(Error::Infeasible { violations });
    }

    let entries = (0..n)
        .map(|atom| (gn.atom_name(atom).to_owned(), sums[atom] / total))
        .collect();
    Ok(QueryResult { entries, support: Support::FeasibleWorlds(feasible) })
}

/// Gibbs marginals on the softened network: hard rules are replaced by
/// soft rules of weight `hard_cap_weight` and single-site updates sweep
/// the unclamped atoms in index order. The marginal of an atom is its
/// frequency over post-burn-in sweeps. Deterministic for a fixed seed.
pub fn query_marginals_gibbs(
    gn: &GroundNetwork,
    sweeps: u64,
    burn_in: u64,
    hard_cap_weight: f64,
    seed: u64,
) -> QueryResult {
    assert!(sweeps > burn_in, "sweeps ({sweeps}) must exceed burn-in ({burn_in})");
    let n = gn.atom_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let weight_of = |rule: usize| match gn.rule_weight(rule) {
        RuleWeight::Hard => hard_cap_weight,
        RuleWeight::Soft(w) => w,
    };

    let mut world = vec![false; n];
    let mut sites = Vec::new();
    for atom in 0..n {
        match gn.clamps()[atom] {
            Some(v) => world[atom] = v,
            None => {
                world[atom] = rng.random::<bool>();
                sites.push(atom);
            }
        }
    }

    let mut counts = vec![0u64; n];
    let kept = sweeps - burn_in;
    for sweep in 0..sweeps {
        for &atom in &sites {
            let mut delta = 0.0;
            for &i in gn.instances_of_atom(atom) {
                let inst = &gn.instances()[i];
                let w = weight_of(inst.rule);
                let on = inst.truth_with(&world, atom, true);
                let off = inst.truth_with(&world, atom, false);
                delta += w * (on as i64 - off as i64) as f64;
            }
            let p_true = 1.0 / (1.0 + (-delta).exp());
            world[atom] = rng.random::<f64>() < p_true;
        }
        if sweep >= burn_in {
            for (atom, &v) in world.iter().enumerate() {
                counts[atom] += v as u64;
            }
        }
    }

    let entries = (0..n)
        .map(|atom| {
            let p = match gn.clamps()[atom] {
                Some(v) => v as u64 as f64,
                None => counts[atom] as f64 / kept as f64,
            };
            (gn.atom_name(atom).to_owned(), p)
        })
        .collect();
    QueryResult { entries, support: Support::Samples(kept) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    True,
    False,
    Undecided,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::True => write!(f, "true"),
            Decision::False => write!(f, "false"),
            Decision::Undecided => write!(f, "undecided"),
        }
    }
}

/// Thresholds marginals into decisions: above `hi` true, below `lo`
/// false, otherwise undecided.
pub fn classify_queries(result: &QueryResult, lo: f64, hi: f64) -> BTreeMap<String, Decision> {
    assert!(lo < hi, "thresholds must satisfy lo < hi");
    result
        .entries()
        .iter()
        .map(|(name, p)| {
            let decision = if *p > hi {
                Decision::True
            } else if *p < lo {
                Decision::False
            } else {
                Decision::Undecided
            };
            (name.clone(), decision)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge::{default_knowledge_base, ground, EvidenceSet, KnowledgeBase};
    use approx::assert_relative_eq;

    fn consts(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| (*s).to_owned()).collect()
    }

    fn rule_subset(labels: &[&str]) -> KnowledgeBase {
        let kb = default_knowledge_base();
        KnowledgeBase::new(
            kb.rules().iter().filter(|r| labels.contains(&r.label.as_str())).cloned().collect(),
        )
    }

    fn stable_single_object() -> (KnowledgeBase, Vec<String>, EvidenceSet) {
        let kb = rule_subset(&["r16"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("stable", &["O1"], true).unwrap();
        (kb, consts(&["O1"]), ev)
    }

    #[test]
    fn world_weight_for_single_soft_rule() {
        let (kb, c, ev) = stable_single_object();
        let gn = ground(&kb, &c, &ev).unwrap();
        assert_eq!(gn.atom_count(), 1); // false(O1) is the only atom r16 mentions
        let lw_false = world_log_weight(&gn, &[false]);
        let lw_true = world_log_weight(&gn, &[true]);
        assert_relative_eq!(lw_false, 9.0_f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(lw_true, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn world_weight_is_minus_infinity_on_hard_violation() {
        let kb = rule_subset(&["r7"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("table", &["T"], true).unwrap();
        let gn = ground(&kb, &consts(&["T"]), &ev).unwrap();
        assert_eq!(world_log_weight(&gn, &[true]), f64::NEG_INFINITY);
        assert_eq!(world_log_weight(&gn, &[false]), 0.0);
    }

    #[test]
    fn prior_marginalizes_over_query_worlds() {
        let (kb, c, ev) = stable_single_object();
        let gn = ground(&kb, &c, &ev).unwrap();
        let prior = unnormalized_prior(&gn, PriorMode::Marginalize).unwrap();
        assert!(prior.feasible);
        assert_relative_eq!(prior.log_weight, 10.0_f64.ln(), epsilon = 1e-12);
        let map = unnormalized_prior(&gn, PriorMode::MapWorld).unwrap();
        assert_relative_eq!(map.log_weight, 9.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn prior_flags_infeasible_evidence() {
        let kb = rule_subset(&["r6"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("higher", &["A", "B"], true).unwrap();
        ev.assert_atom("higher", &["B", "A"], true).unwrap();
        let gn = ground(&kb, &consts(&["A", "B"]), &ev).unwrap();
        let prior = unnormalized_prior(&gn, PriorMode::Marginalize).unwrap();
        assert!(!prior.feasible);
        assert_eq!(prior.log_weight, f64::NEG_INFINITY);
    }

    #[test]
    fn prior_counts_unconstrained_atoms() {
        // r11 mentions supported and hidden; with empty evidence both atoms
        // of the single constant are free only through the one instance.
        let kb = rule_subset(&["r16", "r11"]);
        let gn = ground(&kb, &consts(&["A"]), &EvidenceSet::new()).unwrap();
        // Atoms: supported(A), hidden(A), false(A). stable(A) is false, so
        // every r16 world satisfies the implication: a constant factor 9,
        // with false(A) unconstrained contributing factor 2. r11 couples
        // the other two: worlds (F,F),(F,T),(T,F) satisfy, (T,T) violates.
        let prior = unnormalized_prior(&gn, PriorMode::Marginalize).unwrap();
        let w11 = 0.7_f64 / 0.3;
        let expected = 9.0_f64.ln() + (3.0 * w11 + 1.0).ln() + 2.0_f64.ln();
        assert_relative_eq!(prior.log_weight, expected, epsilon = 1e-12);
    }

    #[test]
    fn exact_marginal_single_stable_object() {
        let (kb, c, ev) = stable_single_object();
        let gn = ground(&kb, &c, &ev).unwrap();
        let result = query_marginals_exact(&gn, 22).unwrap();
        assert_relative_eq!(result.get("false(O1)").unwrap(), 0.1, epsilon = 1e-12);
        assert_eq!(result.support, Support::FeasibleWorlds(2));
    }

    #[test]
    fn exact_marginal_unconstrained_atom_is_half() {
        let kb = rule_subset(&["r16"]);
        let gn = ground(&kb, &consts(&["O1"]), &EvidenceSet::new()).unwrap();
        // stable(O1) is false, so r16 never fires and false(O1) is free.
        let result = query_marginals_exact(&gn, 22).unwrap();
        assert_relative_eq!(result.get("false(O1)").unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn exact_marginal_hovering_object() {
        let kb = rule_subset(&["r13"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("hover", &["O1"], true).unwrap();
        let gn = ground(&kb, &consts(&["O1"]), &ev).unwrap();
        let result = query_marginals_exact(&gn, 22).unwrap();
        // Worlds over (false, hidden): three satisfy hover -> false v hidden
        // at weight 9 each, one violates at weight 1.
        let expected = 18.0 / 28.0;
        assert_relative_eq!(result.get("false(O1)").unwrap(), expected, epsilon = 1e-12);
        assert_relative_eq!(result.get("hidden(O1)").unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn exact_marginal_supported_clamp() {
        let kb = rule_subset(&["r11"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("supported", &["O1"], true).unwrap();
        let gn = ground(&kb, &consts(&["O1"]), &ev).unwrap();
        let result = query_marginals_exact(&gn, 22).unwrap();
        assert_relative_eq!(result.get("hidden(O1)").unwrap(), 0.3, epsilon = 1e-12);
        assert_relative_eq!(result.get("supported(O1)").unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_rejects_oversized_network() {
        let kb = default_knowledge_base();
        let names: Vec<String> = (0..6).map(|i| format!("O{i}")).collect();
        let gn = ground(&kb, &names, &EvidenceSet::new()).unwrap();
        assert_eq!(gn.atom_count(), 24);
        assert!(matches!(
            query_marginals_exact(&gn, 22),
            Err(Error::Capacity { atoms: 24, cap: 22 })
        ));
    }

    #[test]
    fn exact_errors_on_infeasible_evidence() {
        let kb = rule_subset(&["r6", "r16"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("higher", &["A", "B"], true).unwrap();
        ev.assert_atom("higher", &["B", "A"], true).unwrap();
        let gn = ground(&kb, &consts(&["A", "B"]), &ev).unwrap();
        assert!(matches!(query_marginals_exact(&gn, 22), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn gibbs_tracks_exact_on_micro_network() {
        let (kb, c, ev) = stable_single_object();
        let gn = ground(&kb, &c, &ev).unwrap();
        let exact = query_marginals_exact(&gn, 22).unwrap();
        let gibbs = query_marginals_gibbs(&gn, 20_000, 2_000, 100.0, 7);
        let diff = (exact.get("false(O1)").unwrap() - gibbs.get("false(O1)").unwrap()).abs();
        assert!(diff < 0.02, "gibbs off by {diff}");
    }

    #[test]
    fn gibbs_is_deterministic_for_a_seed() {
        let kb = rule_subset(&["r13", "r16"]);
        let mut ev = EvidenceSet::new();
        ev.assert_atom("hover", &["O1"], true).unwrap();
        ev.assert_atom("stable", &["O1"], true).unwrap();
        let gn = ground(&kb, &consts(&["O1"]), &ev).unwrap();
        let a = query_marginals_gibbs(&gn, 5_000, 500, 100.0, 42);
        let b = query_marginals_gibbs(&gn, 5_000, 500, 100.0, 42);
        assert_eq!(a.entries(), b.entries());
    }

    #[test]
    fn weight_zero_rule_changes_nothing() {
        let kb = rule_subset(&["r16"]);
        let mut rules = kb.rules().to_vec();
        let mut padded = rules.clone();
        padded.push(crate::knowledge::Rule {
            label: "r0".into(),
            weight: RuleWeight::Soft(0.0),
            formula: rules[0].formula.clone(),
            var_names: rules[0].var_names.clone(),
        });
        let mut ev = EvidenceSet::new();
        ev.assert_atom("stable", &["O1"], true).unwrap();
        let base = query_marginals_exact(
            &ground(&KnowledgeBase::new(rules.drain(..).collect()), &consts(&["O1"]), &ev).unwrap(),
            22,
        )
        .unwrap();
        let with_zero = query_marginals_exact(
            &ground(&KnowledgeBase::new(padded), &consts(&["O1"]), &ev).unwrap(),
            22,
        )
        .unwrap();
        for ((n1, p1), (n2, p2)) in base.entries().iter().zip(with_zero.entries()) {
            assert_eq!(n1, n2);
            assert_relative_eq!(p1, p2, epsilon = 1e-12);
        }
    }

    #[test]
    fn marginals_are_invariant_under_constant_renaming() {
        let kb = default_knowledge_base();
        let mut ev = EvidenceSet::new();
        ev.assert_atom("stable", &["A", ], true).unwrap();
        ev.assert_atom("stable", &["B"], true).unwrap();
        ev.assert_atom("contact", &["A", "B"], true).unwrap();
        ev.assert_atom("contact", &["B", "A"], true).unwrap();
        ev.assert_atom("higher", &["A", "B"], true).unwrap();
        let base =
            query_marginals_exact(&ground(&kb, &consts(&["A", "B"]), &ev).unwrap(), 22).unwrap();

        let mut renamed = EvidenceSet::new();
        renamed.assert_atom("stable", &["B"], true).unwrap();
        renamed.assert_atom("stable", &["A"], true).unwrap();
        renamed.assert_atom("contact", &["B", "A"], true).unwrap();
        renamed.assert_atom("contact", &["A", "B"], true).unwrap();
        renamed.assert_atom("higher", &["B", "A"], true).unwrap();
        let swapped =
            query_marginals_exact(&ground(&kb, &consts(&["A", "B"]), &renamed).unwrap(), 22)
                .unwrap();

        for (name, p) in base.entries() {
            let other = name.replace('A', "#").replace('B', "A").replace('#', "B");
            assert_relative_eq!(swapped.get(&other).unwrap(), p, epsilon = 1e-12);
        }
    }

    #[test]
    fn classify_uses_strict_thresholds() {
        let result = QueryResult {
            entries: vec![
                ("false(O6)".into(), 0.912),
                ("false(O1)".into(), 0.046),
                ("hidden(O2)".into(), 0.518),
                ("hidden(O3)".into(), 0.6),
            ],
            support: Support::FeasibleWorlds(1),
        };
        let decisions = classify_queries(&result, 0.4, 0.6);
        assert_eq!(decisions["false(O6)"], Decision::True);
        assert_eq!(decisions["false(O1)"], Decision::False);
        assert_eq!(decisions["hidden(O2)"], Decision::Undecided);
        assert_eq!(decisions["hidden(O3)"], Decision::Undecided);
    }
}
