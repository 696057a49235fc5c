//! Stochastic trees with execution mappings.
//!
//! Counterexamples to simulation are stochastic trees: tree-shaped LPTSes
//! whose every state carries a reference to a state of the system the tree
//! was unfolded from. The pair (tree, mapping) is a [`StochasticTree`]; the
//! mapping is valid when the tree's root maps to the system's start state
//! and every tree transition is a relabeled copy of a transition available
//! at the mapped state ([`check_exec_map`]).

use std::collections::BTreeSet;

use crate::model::{
    classify, ActionId, ActionTable, Dist, Lpts, RawLpts, RawTransition, StateId, Transition,
};
use crate::rational::{rat_to_string, Rat};

/// A tree-shaped LPTS together with its execution mapping into a target
/// system (`exec_map[s]` is the target state that tree state `s` executes).
#[derive(Clone, Debug)]
pub struct StochasticTree {
    lpts: Lpts,
    exec_map: Vec<StateId>,
}

impl StochasticTree {
    /// Wraps an LPTS and a mapping; the LPTS must be a tree and the mapping
    /// must cover every tree state.
    pub fn new(lpts: Lpts, exec_map: Vec<StateId>) -> Self {
        assert!(classify(&lpts).tree, "counterexample carrier must be a tree");
        assert_eq!(exec_map.len(), lpts.n_states(), "execution mapping must cover all states");
        StochasticTree { lpts, exec_map }
    }

    pub fn lpts(&self) -> &Lpts {
        &self.lpts
    }

    pub fn root(&self) -> StateId {
        self.lpts.start()
    }

    /// The target state that tree state `s` maps to.
    pub fn maps_to(&self, s: StateId) -> StateId {
        self.exec_map[s.index()]
    }

    pub fn exec_map(&self) -> &[StateId] {
        &self.exec_map
    }
}

/// Finds the first (in canonical order) transition of `target` from
/// `maps_to(from)` on `action` that `dist` is a relabeled copy of: the
/// mapping must be injective on `supp(dist)` and carry each weight onto the
/// target weight exactly.
pub(crate) fn find_matched_transition<'a>(
    tree: &StochasticTree,
    from: StateId,
    action: ActionId,
    dist: &Dist,
    target: &'a Lpts,
) -> Option<&'a Transition> {
    target
        .transitions_on(tree.maps_to(from), action)
        .iter()
        .find(|t| dist_is_copy_of(tree, dist, &t.dist))
}

pub(crate) fn dist_is_copy_of(tree: &StochasticTree, dist: &Dist, target: &Dist) -> bool {
    let mut image = BTreeSet::new();
    for (c, w) in dist.iter() {
        if !image.insert(tree.maps_to(c)) {
            return false; // not injective on the support
        }
        if target.get(tree.maps_to(c)) != *w {
            return false;
        }
    }
    // Weights match pointwise and both sides have mass 1, so the image
    // covers the target support; assert rather than trust it.
    debug_assert!(target.support().all(|t| image.contains(&t)));
    true
}

/// Checks that the tree's execution mapping is valid for `target`: the root
/// maps to the start state, and every tree transition is a copy (through the
/// mapping, injectively on its support) of some transition enabled at the
/// mapped state.
pub fn check_exec_map(tree: &StochasticTree, target: &Lpts) -> Result<(), String> {
    if tree.maps_to(tree.root()) != target.start() {
        return Err(format!(
            "root maps to {} instead of the start state {}",
            target.state_name(tree.maps_to(tree.root())),
            target.state_name(target.start()),
        ));
    }
    for s in tree.lpts.states() {
        if tree.maps_to(s).index() >= target.n_states() {
            return Err(format!("state {} maps outside the target", tree.lpts.state_name(s)));
        }
    }
    for t in tree.lpts.transitions() {
        if find_matched_transition(tree, t.from, t.action, &t.dist, target).is_none() {
            return Err(format!(
                "transition from {} (mapped to {}) matches no target transition",
                tree.lpts.state_name(t.from),
                target.state_name(tree.maps_to(t.from)),
            ));
        }
    }
    Ok(())
}

/// Incremental constructor for stochastic trees. Nodes are created
/// parent-first and named by their path (`root`, `root.0`, `root.0.1`, …),
/// so two trees built by the same sequence of calls are identical.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    names: Vec<String>,
    maps_to: Vec<StateId>,
    child_count: Vec<usize>,
    transitions: Vec<(StateId, ActionId, Vec<(StateId, Rat)>)>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder::default()
    }

    /// Creates the root node; must be the first node created.
    pub fn root(&mut self, maps_to: StateId) -> StateId {
        assert!(self.names.is_empty(), "root must be created first");
        self.push("root".into(), maps_to)
    }

    /// Creates a fresh child of `parent`.
    pub fn child(&mut self, parent: StateId, maps_to: StateId) -> StateId {
        let name = format!("{}.{}", self.names[parent.index()], self.child_count[parent.index()]);
        self.child_count[parent.index()] += 1;
        self.push(name, maps_to)
    }

    fn push(&mut self, name: String, maps_to: StateId) -> StateId {
        let id = StateId(self.names.len() as u32);
        self.names.push(name);
        self.maps_to.push(maps_to);
        self.child_count.push(0);
        id
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn maps_to(&self, node: StateId) -> StateId {
        self.maps_to[node.index()]
    }

    /// Redirects a node's execution mapping (used when grafting a memoized
    /// subtree whose root must take over an existing node).
    pub fn set_maps_to(&mut self, node: StateId, maps_to: StateId) {
        self.maps_to[node.index()] = maps_to;
    }

    pub fn add_transition(&mut self, from: StateId, action: ActionId, entries: Vec<(StateId, Rat)>) {
        self.transitions.push((from, action, entries));
    }

    /// Finalizes the tree. The alphabet must contain every action used.
    pub fn finish(self, name: impl Into<String>, alphabet: BTreeSet<ActionId>) -> StochasticTree {
        let raw = RawLpts {
            name: name.into(),
            states: self.names,
            start: StateId(0),
            alphabet,
            transitions: self
                .transitions
                .into_iter()
                .map(|(from, action, entries)| RawTransition { from, action, entries })
                .collect(),
        };
        let lpts = raw.build().unwrap_or_else(|violations| {
            let detail: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            panic!("tree construction produced an invalid LPTS: {}", detail.join("; "))
        });
        StochasticTree::new(lpts, self.maps_to)
    }
}

/// Renders a tree as indented text, one node per line with its mapped
/// target state; handy in error messages and the CLI's text format.
pub fn render_text(tree: &StochasticTree, target: &Lpts, actions: &ActionTable) -> String {
    let mut out = String::new();
    let l = tree.lpts();
    let mut stack = vec![(tree.root(), 0usize, None::<(ActionId, Rat)>)];
    while let Some((s, depth, via)) = stack.pop() {
        out.push_str(&"  ".repeat(depth));
        match via {
            None => {}
            Some((a, p)) => {
                out.push_str(&format!("--{}[{}]--> ", actions.name(a), rat_to_string(&p)));
            }
        }
        out.push_str(&format!("{} ({})\n", l.state_name(s), target.state_name(tree.maps_to(s))));
        // Push in reverse so children pop in canonical order.
        for t in l.transitions_from(s).iter().rev() {
            let entries: Vec<_> = t.dist.iter().collect();
            for (child, w) in entries.into_iter().rev() {
                stack.push((child, depth + 1, Some((t.action, w.clone()))));
            }
        }
    }
    out
}
