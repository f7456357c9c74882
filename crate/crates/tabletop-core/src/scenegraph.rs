//! Scene graphs: support structure plus per-object flags.
//!
//! The graph is read off the extracted relations: a support edge runs
//! from supporter to supported wherever two stable entities touch and
//! one sits higher, remaining touching pairs become undirected contact
//! edges. Query marginals attach to each node as probabilities and
//! thresholded flags.

use serde::{Deserialize, Serialize};

use crate::knowledge::{pred_by_name, Decision, EvidenceSet, QueryResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub hidden: Decision,
    #[serde(rename = "false")]
    pub false_estimate: Decision,
    pub p_hidden: f64,
    pub p_false: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    /// Table first, then objects in ascending id order.
    pub nodes: Vec<GraphNode>,
    /// Directed supporter-to-supported pairs.
    pub support: Vec<(String, String)>,
    /// Undirected touching pairs without a support direction, each
    /// listed once in node order.
    pub contact: Vec<(String, String)>,
    /// Structural oddities (support cycles). Diagnostic only.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

fn node_order(constants: &[String]) -> Vec<String> {
    let mut out: Vec<String> = constants.to_vec();
    let rank = |name: &str| -> (u8, u64, String) {
        if name == crate::scene::SceneModel::TABLE_CONSTANT {
            return (0, 0, String::new());
        }
        match name.strip_prefix('O').and_then(|s| s.parse::<u64>().ok()) {
            Some(n) => (1, n, String::new()),
            None => (2, 0, name.to_owned()),
        }
    };
    out.sort_by_key(|n| rank(n));
    out
}

/// Marginal of one ground atom, by predicate and argument. An atom the
/// network never mentioned is unconstrained, so its marginal is exactly
/// one half.
fn marginal(marginals: &QueryResult, pred: &str, arg: &str) -> f64 {
    marginals.get(&format!("{pred}({arg})")).unwrap_or(0.5)
}

/// Assembles the graph from extracted relations and query marginals.
/// `lo` and `hi` are the decision thresholds: above `hi` a flag is
/// true, below `lo` false, otherwise undecided.
pub fn build_graph(
    evidence: &EvidenceSet,
    marginals: &QueryResult,
    lo: f64,
    hi: f64,
) -> SceneGraph {
    assert!(lo < hi, "thresholds must satisfy lo < hi");
    let stable = pred_by_name("stable").expect("vocabulary has stable");
    let contact = pred_by_name("contact").expect("vocabulary has contact");
    let higher = pred_by_name("higher").expect("vocabulary has higher");

    let order = node_order(evidence.constants());
    let classify = |p: f64| {
        if p > hi {
            Decision::True
        } else if p < lo {
            Decision::False
        } else {
            Decision::Undecided
        }
    };

    let nodes = order
        .iter()
        .map(|id| {
            let p_hidden = marginal(marginals, "hidden", id);
            let p_false = marginal(marginals, "false", id);
            GraphNode {
                id: id.clone(),
                hidden: classify(p_hidden),
                false_estimate: classify(p_false),
                p_hidden,
                p_false,
            }
        })
        .collect();

    let holds = |pred, a: &str, b: &str| {
        evidence.entry(pred, &[a.to_owned(), b.to_owned()]).unwrap_or(false)
    };
    let is_stable =
        |a: &str| evidence.entry(stable, &[a.to_owned()]).unwrap_or(false);

    let mut support = Vec::new();
    let mut contacts = Vec::new();
    let mut warnings = Vec::new();
    for (i, a) in order.iter().enumerate() {
        for b in &order[i + 1..] {
            if !(holds(contact, a, b) || holds(contact, b, a)) {
                continue;
            }
            let both_stable = is_stable(a) && is_stable(b);
            let up = both_stable && holds(higher, a, b);
            let down = both_stable && holds(higher, b, a);
            match (up, down) {
                (true, true) => {
                    warnings.push(format!("{a} and {b} claim to be higher than each other"));
                    contacts.push((a.clone(), b.clone()));
                }
                (true, false) => support.push((b.clone(), a.clone())),
                (false, true) => support.push((a.clone(), b.clone())),
                (false, false) => contacts.push((a.clone(), b.clone())),
            }
        }
    }

    let mut graph = SceneGraph { nodes, support, contact: contacts, warnings };
    graph.warnings.extend(support_cycles(&graph));
    graph
}

/// Depth-first search for cycles in the support digraph. Extracted
/// geometry cannot produce one (support always points downhill), but
/// hand-written relation files can.
fn support_cycles(graph: &SceneGraph) -> Vec<String> {
    let index: std::collections::BTreeMap<&str, usize> =
        graph.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let mut adjacency = vec![Vec::new(); graph.nodes.len()];
    for (from, to) in &graph.support {
        if let (Some(&f), Some(&t)) = (index.get(from.as_str()), index.get(to.as_str())) {
            adjacency[f].push(t);
        }
    }
    // 0 unvisited, 1 on the current path, 2 done.
    let mut state = vec![0u8; graph.nodes.len()];
    let mut warnings = Vec::new();
    fn visit(
        v: usize,
        adjacency: &[Vec<usize>],
        state: &mut [u8],
        names: &[GraphNode],
        warnings: &mut Vec<String>,
    ) {
        state[v] = 1;
        for &w in &adjacency[v] {
            match state[w] {
                0 => visit(w, adjacency, state, names, warnings),
                1 => warnings.push(format!(
                    "support cycle through {} and {}",
                    names[v].id, names[w].id
                )),
                _ => {}
            }
        }
        state[v] = 2;
    }
    for v in 0..graph.nodes.len() {
        if state[v] == 0 {
            visit(v, &adjacency, &mut state, &graph.nodes, &mut warnings);
        }
    }
    warnings
}

impl SceneGraph {
    /// Canonical pretty JSON; field and node order are fixed, so equal
    /// graphs serialize to identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene graph serializes")
    }

    pub fn from_json(text: &str) -> crate::error::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Graphviz rendering: support edges are directed, contact edges
    /// undirected; nodes flagged as false estimates are red, hidden
    /// ones cyan (false takes precedence when both hold).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph scene {\n");
        for n in &self.nodes {
            let mut attrs = Vec::new();
            if n.id == crate::scene::SceneModel::TABLE_CONSTANT {
                attrs.push("shape=box".to_owned());
            }
            if n.false_estimate == Decision::True {
                attrs.push("color=red".to_owned());
            } else if n.hidden == Decision::True {
                attrs.push("color=cyan".to_owned());
            }
            if attrs.is_empty() {
                out.push_str(&format!("  {};\n", n.id));
            } else {
                out.push_str(&format!("  {} [{}];\n", n.id, attrs.join(", ")));
            }
        }
        for (from, to) in &self.support {
            out.push_str(&format!("  {from} -> {to};\n"));
        }
        for (a, b) in &self.contact {
            out.push_str(&format!("  {a} -> {b} [dir=none];\n"));
        }
        out.push_str("}\n");
        out
    }
}
