//! Compositional verification by assume-guarantee abstraction refinement.
//!
//! To decide `L0 ∥ L1 ∥ … ∥ L_{n−1} ⪯ P` without ever building the full
//! product, the engine maintains one assumption per composition seam.
//! Deepest first: `X_{n−2} = L_{n−1}`, and `X_k = L_{k+1} ∥ A_{k+1}` for
//! shallower `k`; each assumption `A_k` is a quotient of `X_k`, so
//! `X_k ⪯ A_k` holds by construction and only the top premise
//! `L0 ∥ A_0 ⪯ P` is ever model-checked. When it fails, the counterexample
//! tree is projected onto the assumption side and replayed one seam at a
//! time: a spurious tree refines the partition at the offending level (the
//! shallower partitions reset, their state spaces changed), while a genuine
//! one is lifted from the assumption into the system it abstracts and pushed
//! a level deeper. Reaching the final level genuinely means the original
//! composition really violates the spec.
//!
//! [`lift_tree`] performs the push: given a tree embedded in an assumption
//! and a simulation witness into the concrete system behind it, it rebuilds
//! the tree's branching out of that system's own transitions, so the result
//! carries an execution mapping there and can be projected across the next
//! seam.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cex::{build_cex, CexError};
use crate::compose::{compose, project, ComposeError, ComposedLpts, Side};
use crate::model::{complete_spec, Lpts, StateId};
use crate::partition::Partition;
use crate::refine::{analyze_and_refine, quotient, RefineError, RefinementOutcome};
use crate::relation::PairSet;
use crate::simulate::{check_simulation, dist_leq, DistLeq, ScanMode};
use crate::tree::{StochasticTree, TreeBuilder};

#[derive(Debug, Error)]
pub enum AgarError {
    #[error("assume-guarantee reasoning needs at least two components")]
    TooFewComponents,
    #[error("lift witness is not a simulation: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Cex(#[from] CexError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgarVerdict {
    Holds,
    Fails,
}

/// One step of the engine's progress, suitable for line-oriented logging.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgarLogRecord {
    /// Outer check–refine round, 1-based.
    pub round: usize,
    /// Seam the event concerns (0 is the top seam).
    pub level: usize,
    /// `"holds"`, `"counterexample"`, `"spurious"` or `"real"`.
    pub event: String,
    /// States in the composed system checked or analyzed at this point.
    pub composed_states: usize,
    /// States in the assumption at this level.
    pub assumption_states: usize,
}

/// Result of an assume-guarantee run.
#[derive(Clone, Debug)]
pub struct AgarOutcome {
    pub verdict: AgarVerdict,
    /// Largest composed system ever built (states).
    pub max_composed_states: usize,
    /// Largest assumption ever built (states).
    pub max_assumption_states: usize,
    /// Refinement rounds per level.
    pub refinements: Vec<usize>,
    /// Final assumptions, shallowest first.
    pub assumptions: Vec<Lpts>,
    /// On failure, the genuine counterexample over `L0 ∥ A_0`.
    pub cex: Option<StochasticTree>,
    pub log: Vec<AgarLogRecord>,
}

/// Rebuilds a tree embedded in an assumption as a tree embedded in `target`,
/// the system the assumption abstracts. `r` must be a strong simulation
/// between the tree's underlying LPTS and `target` containing the start
/// pair; this is re-verified before building. The input tree embeds in the
/// result, and the result embeds in `target` via its execution mapping.
pub fn lift_tree(
    c: &StochasticTree,
    r: &PairSet,
    target: &Lpts,
) -> Result<StochasticTree, AgarError> {
    if r.dims() != (c.lpts().n_states(), target.n_states()) {
        return Err(AgarError::InvalidWitness("dimension mismatch".into()));
    }
    if !r.contains(c.root(), target.start()) {
        return Err(AgarError::InvalidWitness("start pair is not related".into()));
    }
    for (s1, s2) in r.iter() {
        for t in c.lpts().transitions_from(s1) {
            let matched = target
                .transitions_on(s2, t.action)
                .iter()
                .any(|t2| dist_leq(&t.dist, &t2.dist, r).holds());
            if !matched {
                return Err(AgarError::InvalidWitness(format!(
                    "pair ({}, {}) has no match on an outgoing transition",
                    c.lpts().state_name(s1),
                    target.state_name(s2),
                )));
            }
        }
    }

    let mut b = TreeBuilder::new();
    let root = b.root(target.start());
    let mut stack = vec![(c.root(), root)];
    while let Some((cn, tn)) = stack.pop() {
        let u = b.maps_to(tn);
        for t in c.lpts().transitions_from(cn) {
            let (mu_t, w) = target
                .transitions_on(u, t.action)
                .iter()
                .find_map(|t2| match dist_leq(&t.dist, &t2.dist, r) {
                    DistLeq::Holds(w) => Some((t2.dist.clone(), w)),
                    DistLeq::Fails(_) => None,
                })
                .expect("verified above: every related pair matches every transition");
            let mut fresh: BTreeMap<StateId, StateId> = BTreeMap::new();
            let mut entries = Vec::new();
            for (v, weight) in mu_t.iter() {
                let nv = b.child(tn, v);
                fresh.insert(v, nv);
                entries.push((nv, weight.clone()));
            }
            b.add_transition(tn, t.action, entries);
            for ((cc, v), wt) in w.iter() {
                if !wt.is_zero() {
                    stack.push((cc, fresh[&v]));
                }
            }
        }
    }
    Ok(b.finish(format!("{}_lift", c.lpts().name()), target.alphabet().clone()))
}

/// Per-seam bookkeeping: the composed system behind the assumption (absent
/// at the deepest seam, where it is the last component itself), the current
/// partition of its states, and the assumption quotient.
struct Level {
    comp: Option<ComposedLpts>,
    pi: Partition,
    a: Lpts,
}

fn level_system<'a>(levels: &'a [Level], components: &'a [Lpts], k: usize) -> &'a Lpts {
    match &levels[k].comp {
        Some(c) => c.lpts(),
        None => components.last().expect("components are non-empty"),
    }
}

/// Two-component assume-guarantee check: `l1 ∥ l2 ⪯ p` with a single
/// learned assumption abstracting `l2`.
pub fn agar2(l1: &Lpts, l2: &Lpts, p: &Lpts) -> Result<AgarOutcome, AgarError> {
    agar_n(&[l1.clone(), l2.clone()], p)
}

/// N-component assume-guarantee check of `components[0] ∥ … ∥
/// components[n−1] ⪯ p`, one assumption per seam, nested right-to-left.
pub fn agar_n(components: &[Lpts], p: &Lpts) -> Result<AgarOutcome, AgarError> {
    let n = components.len();
    if n < 2 {
        return Err(AgarError::TooFewComponents);
    }
    let mut alpha = p.alphabet().clone();
    for l in components {
        alpha.extend(l.alphabet().iter().copied());
    }
    let p = complete_spec(p, &alpha).expect("the target includes the spec alphabet");

    let mut max_composed = 0usize;
    let mut max_assumption = 0usize;
    let mut refinements = vec![0usize; n - 1];
    let mut log = Vec::new();

    // Deepest seam first, then wrap shallower ones around it.
    let deepest = &components[n - 1];
    let mut levels_rev = Vec::with_capacity(n - 1);
    let pi = Partition::coarsest(deepest.n_states());
    let a = quotient(deepest, &pi);
    max_assumption = max_assumption.max(a.n_states());
    levels_rev.push(Level { comp: None, pi, a });
    for j in (0..n - 2).rev() {
        let comp = compose(&components[j + 1], &levels_rev.last().unwrap().a);
        max_composed = max_composed.max(comp.lpts().n_states());
        let pi = Partition::coarsest(comp.lpts().n_states());
        let a = quotient(comp.lpts(), &pi);
        max_assumption = max_assumption.max(a.n_states());
        levels_rev.push(Level { comp: Some(comp), pi, a });
    }
    levels_rev.reverse();
    let mut levels = levels_rev;

    let mut round = 0usize;
    loop {
        round += 1;
        assert!(round <= 100_000, "assume-guarantee loop failed to converge");
        let top = compose(&components[0], &levels[0].a);
        max_composed = max_composed.max(top.lpts().n_states());
        log::info!(
            "round {round}: checking {} ({} states) against {}",
            top.lpts().name(),
            top.lpts().n_states(),
            p.name()
        );
        let chk = check_simulation(top.lpts(), &p, ScanMode::EarlyExit);
        if chk.holds {
            log.push(AgarLogRecord {
                round,
                level: 0,
                event: "holds".into(),
                composed_states: top.lpts().n_states(),
                assumption_states: levels[0].a.n_states(),
            });
            return Ok(AgarOutcome {
                verdict: AgarVerdict::Holds,
                max_composed_states: max_composed,
                max_assumption_states: max_assumption,
                refinements,
                assumptions: levels.iter().map(|lv| lv.a.clone()).collect(),
                cex: None,
                log,
            });
        }
        log.push(AgarLogRecord {
            round,
            level: 0,
            event: "counterexample".into(),
            composed_states: top.lpts().n_states(),
            assumption_states: levels[0].a.n_states(),
        });
        let c_top = build_cex(&chk, chk.start, top.lpts())?;
        let mut cur = project(&c_top, &top, Side::Right)?;
        let mut k = 0usize;
        loop {
            let x = level_system(&levels, components, k);
            match analyze_and_refine(&cur, &levels[k].a, x, &levels[k].pi)? {
                RefinementOutcome::Spurious { refined, splits } => {
                    debug_assert!(refined.n_classes() > levels[k].pi.n_classes(), "strict progress");
                    debug_assert!(refined.is_finer_than(&levels[k].pi));
                    log::info!(
                        "round {round}: spurious at level {k}, {} -> {} classes",
                        levels[k].pi.n_classes(),
                        refined.n_classes()
                    );
                    for s in &splits {
                        log::debug!(
                            "  split around state {}: {} inside / {} outside",
                            s.pivot.index(),
                            s.inside.len(),
                            s.outside.len()
                        );
                    }
                    log.push(AgarLogRecord {
                        round,
                        level: k,
                        event: "spurious".into(),
                        composed_states: x.n_states(),
                        assumption_states: levels[k].a.n_states(),
                    });
                    refinements[k] += 1;
                    levels[k].pi = refined;
                    // Rebuild this assumption, then recompose everything
                    // shallower from scratch: those state spaces changed.
                    for j in (0..=k).rev() {
                        if j < k {
                            let comp = compose(&components[j + 1], &levels[j + 1].a);
                            max_composed = max_composed.max(comp.lpts().n_states());
                            levels[j].pi = Partition::coarsest(comp.lpts().n_states());
                            levels[j].comp = Some(comp);
                        }
                        let a = quotient(level_system(&levels, components, j), &levels[j].pi);
                        max_assumption = max_assumption.max(a.n_states());
                        levels[j].a = a;
                    }
                    break;
                }
                RefinementOutcome::Real { relation } => {
                    log::info!("round {round}: counterexample is real at level {k}");
                    log.push(AgarLogRecord {
                        round,
                        level: k,
                        event: "real".into(),
                        composed_states: x.n_states(),
                        assumption_states: levels[k].a.n_states(),
                    });
                    if k == n - 2 {
                        return Ok(AgarOutcome {
                            verdict: AgarVerdict::Fails,
                            max_composed_states: max_composed,
                            max_assumption_states: max_assumption,
                            refinements,
                            assumptions: levels.iter().map(|lv| lv.a.clone()).collect(),
                            cex: Some(c_top),
                            log,
                        });
                    }
                    let lifted = lift_tree(&cur, &relation, x)?;
                    let comp = levels[k].comp.as_ref().expect("non-deepest levels are composed");
                    cur = project(&lifted, comp, Side::Right)?;
                    k += 1;
                }
            }
        }
    }
}
