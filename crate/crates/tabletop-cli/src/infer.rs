//! `infer`: query marginals for a hand-written evidence file. Pure
//! logic, no geometry or sampling; also home to the marginal-computation
//! helpers `analyze` shares.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use tabletop_core::knowledge::{
    classify_queries, default_knowledge_base, ground, parse_evidence, pred_by_name,
    query_marginals_exact, query_marginals_gibbs, unnormalized_prior, Decision, EvidenceSet,
    GroundNetwork, KnowledgeBase, QueryResult, Support,
};
use tabletop_core::scene::SceneModel;
use tabletop_core::Error;

use crate::config::{InferenceMode, RunConfig};
use crate::{output, read_input, CmdResult, Failure};

#[derive(Args)]
pub struct InferArgs {
    /// Evidence file: one ground literal per line, `!` negates.
    #[arg(long, value_name = "FILE")]
    evidence: PathBuf,

    /// Rule file overriding the built-in knowledge base.
    #[arg(long, value_name = "FILE")]
    kb: Option<PathBuf>,

    /// Marginal computation: exact, gibbs, or auto. Overrides
    /// inference.mode.
    #[arg(long)]
    mode: Option<String>,
}

pub fn run(args: &InferArgs, cfg: &RunConfig, out: &Path) -> CmdResult<()> {
    let mut evidence = parse_evidence(&read_input(&args.evidence)?)?;
    inject_table(&mut evidence)?;
    let kb = load_kb(args.kb.as_deref())?;
    let mode = resolve_mode(args.mode.as_deref(), cfg)?;

    let constants = evidence.constants().to_vec();
    let gn = ground(&kb, &constants, &evidence)?;
    check_feasible(&gn, cfg)?;
    let marginals = compute_marginals(&gn, mode, cfg, cfg.seed)?;

    let decisions = classify_queries(&marginals, cfg.lo, cfg.hi);
    for (atom, p) in marginals.to_map() {
        println!("{atom:<24} {p:.4}  {}", decisions[&atom]);
    }
    let path = output::write_one(out, "marginals.json", marginals_json(&marginals, cfg))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Hand-written evidence rarely bothers to describe the table, but the
/// rules lean on its atoms, so `table(table)` and `stable(table)` are
/// asserted whenever the file leaves them unstated. An explicit
/// statement of either literal, in either polarity, wins.
fn inject_table(evidence: &mut EvidenceSet) -> CmdResult<()> {
    let args = [SceneModel::TABLE_CONSTANT.to_owned()];
    for pred_name in ["table", "stable"] {
        let pred = pred_by_name(pred_name).expect("vocabulary covers the injected predicates");
        if evidence.entry(pred, &args).is_none() {
            evidence
                .assert_atom(pred_name, &[SceneModel::TABLE_CONSTANT], true)
                .map_err(Failure::Core)?;
        }
    }
    Ok(())
}

pub(crate) fn load_kb(path: Option<&Path>) -> CmdResult<KnowledgeBase> {
    match path {
        None => Ok(default_knowledge_base()),
        Some(p) => Ok(KnowledgeBase::parse(&read_input(p)?)?),
    }
}

pub(crate) fn resolve_mode(flag: Option<&str>, cfg: &RunConfig) -> CmdResult<InferenceMode> {
    match flag {
        None => Ok(cfg.mode),
        Some(s) => s.parse().map_err(Failure::Usage),
    }
}

/// Rejects evidence no query world can satisfy, naming the hard rules
/// it breaks, before any marginal computation runs.
pub(crate) fn check_feasible(gn: &GroundNetwork, cfg: &RunConfig) -> CmdResult<()> {
    let prior = unnormalized_prior(gn, cfg.prior_mode)?;
    if prior.feasible {
        return Ok(());
    }
    let mut violations = gn.violated_hard_rules();
    if violations.is_empty() {
        violations.push("clamped query atoms are jointly unsatisfiable".into());
    }
    Err(Failure::Core(Error::Infeasible { violations }))
}

pub(crate) fn compute_marginals(
    gn: &GroundNetwork,
    mode: InferenceMode,
    cfg: &RunConfig,
    seed: Option<u64>,
) -> CmdResult<QueryResult> {
    let exact = match mode {
        InferenceMode::Exact => true,
        InferenceMode::Gibbs => false,
        InferenceMode::Auto => gn.atom_count() <= cfg.exact_cap,
    };
    if exact {
        Ok(query_marginals_exact(gn, cfg.exact_cap)?)
    } else {
        let seed = seed.ok_or_else(|| {
            Failure::Usage("gibbs marginals are randomized; pass --seed or set chain.seed".into())
        })?;
        Ok(query_marginals_gibbs(gn, cfg.gibbs_sweeps, cfg.burn_in(), cfg.hard_cap_weight, seed))
    }
}

#[derive(Serialize)]
struct MarginalsFile {
    atoms: BTreeMap<String, f64>,
    decisions: BTreeMap<String, Decision>,
    support: SupportInfo,
}

#[derive(Serialize)]
struct SupportInfo {
    kind: &'static str,
    count: u64,
}

pub(crate) fn marginals_json(marginals: &QueryResult, cfg: &RunConfig) -> String {
    let support = match marginals.support {
        Support::FeasibleWorlds(n) => SupportInfo { kind: "feasible_worlds", count: n },
        Support::Samples(n) => SupportInfo { kind: "samples", count: n },
    };
    let file = MarginalsFile {
        atoms: marginals.to_map(),
        decisions: classify_queries(marginals, cfg.lo, cfg.hi),
        support,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("marginals serialize");
    text.push('\n');
    text
}

