//! Counterexample artifacts.
//!
//! A [`CexDocument`] is the serializable face of a counterexample tree:
//! state names paired with the states they map to in the system the tree
//! embeds in, transitions with exact rational probabilities rendered as
//! strings (`"9/10"`, never a float), the root, and a small metadata block
//! saying which premise failed and how many refinement rounds preceded the
//! tree. JSON output is deterministic — same document, same bytes — so
//! artifacts can be diffed and cached; DOT and plain-text renderings serve
//! human eyes.

use serde::{Deserialize, Serialize};

use crate::model::{ActionTable, Lpts};
use crate::tree::StochasticTree;

/// Output format for [`emit_cex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CexFormat {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CexState {
    pub id: String,
    /// Name of the state this tree node maps to in the violated system.
    pub maps_to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CexEntry {
    /// Exact probability, e.g. `"1/3"` or `"1"`.
    pub prob: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CexTransition {
    pub from: String,
    pub action: String,
    pub support: Vec<CexEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CexMeta {
    /// The premise the tree refutes, e.g. `"L1 || L2 ⪯ P"`.
    pub premise: String,
    /// Refinement rounds that preceded this counterexample.
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CexDocument {
    pub states: Vec<CexState>,
    pub transitions: Vec<CexTransition>,
    pub root: String,
    pub meta: CexMeta,
}

impl CexDocument {
    /// Captures a counterexample tree. `target` is the system the tree's
    /// execution mapping points into; `actions` resolves action names.
    pub fn from_tree(
        tree: &StochasticTree,
        target: &Lpts,
        actions: &ActionTable,
        meta: CexMeta,
    ) -> CexDocument {
        let l = tree.lpts();
        let states = l
            .states()
            .map(|s| CexState {
                id: l.state_name(s).to_string(),
                maps_to: target.state_name(tree.maps_to(s)).to_string(),
            })
            .collect();
        let transitions = l
            .transitions()
            .iter()
            .map(|t| CexTransition {
                from: l.state_name(t.from).to_string(),
                action: actions.name(t.action).to_string(),
                support: t
                    .dist
                    .iter()
                    .map(|(s, w)| CexEntry {
                        prob: crate::rational::rat_to_string(w),
                        to: l.state_name(s).to_string(),
                    })
                    .collect(),
            })
            .collect();
        CexDocument {
            states,
            transitions,
            root: l.state_name(l.start()).to_string(),
            meta,
        }
    }
}

/// Renders a counterexample document. JSON output is byte-deterministic.
pub fn emit_cex(doc: &CexDocument, format: CexFormat) -> String {
    match format {
        CexFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
            s.push('\n');
            s
        }
        CexFormat::Dot => render_dot(doc),
        CexFormat::Text => render_text(doc),
    }
}

/// Parses a JSON counterexample back into a document.
/// `parse_cex_json(&emit_cex(doc, Json))` returns the same document.
pub fn parse_cex_json(s: &str) -> Result<CexDocument, serde_json::Error> {
    serde_json::from_str(s)
}

fn render_dot(doc: &CexDocument) -> String {
    let mut out = String::new();
    out.push_str("digraph cex {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [shape=ellipse];\n");
    for s in &doc.states {
        out.push_str(&format!("  \"{}\" [label=\"{}\\n({})\"];\n", s.id, s.id, s.maps_to));
    }
    for (i, t) in doc.transitions.iter().enumerate() {
        out.push_str(&format!("  \"t{i}\" [shape=point];\n"));
        out.push_str(&format!("  \"{}\" -> \"t{i}\" [label=\"{}\"];\n", t.from, t.action));
        for e in &t.support {
            out.push_str(&format!("  \"t{i}\" -> \"{}\" [label=\"{}\"];\n", e.to, e.prob));
        }
    }
    out.push_str("}\n");
    out
}

fn render_text(doc: &CexDocument) -> String {
    let maps_to = |id: &str| {
        doc.states
            .iter()
            .find(|s| s.id == id)
            .map(|s| s.maps_to.as_str())
            .unwrap_or("?")
    };
    let edges_of = |id: &str| -> Vec<(&str, &str, &str)> {
        doc.transitions
            .iter()
            .filter(|t| t.from == id)
            .flat_map(|t| {
                t.support
                    .iter()
                    .map(move |e| (t.action.as_str(), e.prob.as_str(), e.to.as_str()))
            })
            .collect()
    };
    let mut out = format!("{} ({})\n", doc.root, maps_to(&doc.root));
    // Pre-order: each edge prints, then its child's whole subtree, then the
    // next sibling edge. The stack is LIFO, so edges go on in reverse.
    let mut stack: Vec<(&str, &str, &str, usize)> = Vec::new();
    for edge in edges_of(&doc.root).into_iter().rev() {
        stack.push((edge.0, edge.1, edge.2, 1));
    }
    while let Some((action, prob, to, depth)) = stack.pop() {
        out.push_str(&format!(
            "{}--{action}[{prob}]--> {to} ({})\n",
            "  ".repeat(depth),
            maps_to(to)
        ));
        for edge in edges_of(to).into_iter().rev() {
            stack.push((edge.0, edge.1, edge.2, depth + 1));
        }
    }
    out
}
