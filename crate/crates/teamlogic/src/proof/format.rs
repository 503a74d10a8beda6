//! The on-disk proof format: a flat node list plus a root id.
//!
//! ```json
//! { "system": "mlinc",
//!   "nodes": [
//!     {"id": 0, "rule": "Assume", "label": "h1", "conclusion": "p"},
//!     {"id": 1, "rule": "SubId", "conclusion": "top <= top", "premises": []},
//!     {"id": 2, "rule": "SubExp", "conclusion": "top, top <= p, top",
//!      "premises": [0, 1], "discharges": []}
//!   ],
//!   "root": 2 }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Derivation, ProofError, RuleName, System};
use crate::syntax::{parse_any, print_formula};

#[derive(Serialize, Deserialize)]
struct ProofFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    system: Option<String>,
    nodes: Vec<NodeFile>,
    root: u32,
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    id: u32,
    rule: String,
    conclusion: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    discharges: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// Parses a proof file into its declared system (if any) and derivation
/// tree. Every node must be used exactly once: the node list must form a
/// tree rooted at `root`.
pub fn derivation_from_json(text: &str) -> Result<(Option<System>, Derivation), ProofError> {
    let file: ProofFile =
        serde_json::from_str(text).map_err(|e| ProofError::Format(e.to_string()))?;
    let system = match &file.system {
        None => None,
        Some(s) => Some(
            System::from_name(s)
                .ok_or_else(|| ProofError::Format(format!("unknown system `{s}`")))?,
        ),
    };
    let mut nodes: BTreeMap<u32, &NodeFile> = BTreeMap::new();
    for n in &file.nodes {
        if nodes.insert(n.id, n).is_some() {
            return Err(ProofError::Format(format!("duplicate node id {}", n.id)));
        }
    }
    let mut used: BTreeMap<u32, bool> = nodes.keys().map(|&k| (k, false)).collect();
    let root = build(file.root, &nodes, &mut used)?;
    if let Some((&id, _)) = used.iter().find(|(_, &v)| !v) {
        return Err(ProofError::Format(format!(
            "node {id} is not reachable from the root"
        )));
    }
    Ok((system, root))
}

fn build(
    id: u32,
    nodes: &BTreeMap<u32, &NodeFile>,
    used: &mut BTreeMap<u32, bool>,
) -> Result<Derivation, ProofError> {
    let node = nodes
        .get(&id)
        .ok_or_else(|| ProofError::Format(format!("missing node id {id}")))?;
    match used.get_mut(&id) {
        Some(flag) if !*flag => *flag = true,
        _ => {
            return Err(ProofError::Format(format!(
                "node {id} is referenced more than once; proofs are trees"
            )))
        }
    }
    let formula = parse_any(&node.conclusion)
        .map_err(|e| ProofError::Format(format!("node {id}: {e}")))?;
    if node.rule == "Assume" {
        let label = node
            .label
            .clone()
            .ok_or_else(|| ProofError::Format(format!("node {id}: Assume needs a label")))?;
        if !node.premises.is_empty() {
            return Err(ProofError::Format(format!(
                "node {id}: Assume takes no premises"
            )));
        }
        return Ok(Derivation::Assume { label, formula });
    }
    let rule = RuleName::from_name(&node.rule)
        .ok_or_else(|| ProofError::Format(format!("node {id}: unknown rule `{}`", node.rule)))?;
    let premises = node
        .premises
        .iter()
        .map(|&p| build(p, nodes, used))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation::Infer {
        rule,
        conclusion: formula,
        premises,
        discharges: node.discharges.clone(),
    })
}

/// Serializes a derivation (ids assigned in postorder).
pub fn derivation_to_json(system: System, d: &Derivation) -> String {
    let mut nodes = Vec::new();
    let root = emit(d, &mut nodes);
    let file = ProofFile {
        system: Some(system.name().to_string()),
        nodes,
        root,
    };
    serde_json::to_string_pretty(&file).expect("proof serialization cannot fail")
}

fn emit(d: &Derivation, nodes: &mut Vec<NodeFile>) -> u32 {
    match d {
        Derivation::Assume { label, formula } => {
            let id = nodes.len() as u32;
            nodes.push(NodeFile {
                id,
                rule: "Assume".to_string(),
                conclusion: print_formula(formula),
                premises: vec![],
                discharges: vec![],
                label: Some(label.clone()),
            });
            id
        }
        Derivation::Infer {
            rule,
            conclusion,
            premises,
            discharges,
        } => {
            let premise_ids = premises.iter().map(|p| emit(p, nodes)).collect();
            let id = nodes.len() as u32;
            nodes.push(NodeFile {
                id,
                rule: rule.name().to_string(),
                conclusion: print_formula(conclusion),
                premises: premise_ids,
                discharges: discharges.clone(),
                label: None,
            });
            id
        }
    }
}
