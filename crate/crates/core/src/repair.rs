//! Running fault sequences and the offline (global reassignment) check.

use std::fmt;

use crate::error::{Error, Result};
use crate::network::SpareNetwork;
use crate::policy::{Decision, Policy, PolicySelector, SpareSelector};
use crate::rng::Stream;
use crate::state::SystemState;

/// Ordered functional-unit slots hit by successive faults. A repeated slot
/// means the spare now covering it failed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaultSequence(Vec<usize>);

impl FaultSequence {
    pub fn new(net: &SpareNetwork, slots: Vec<usize>) -> Result<Self> {
        if let Some(&u) = slots.iter().find(|&&u| u >= net.n_units()) {
            return Err(Error::NodeOutOfRange {
                node: format!("u{u}"),
            });
        }
        Ok(FaultSequence(slots))
    }

    /// `len` slots drawn uniformly over all units.
    pub fn random(net: &SpareNetwork, len: usize, rng: &mut Stream) -> Self {
        FaultSequence((0..len).map(|_| rng.below(net.n_units())).collect())
    }

    pub fn slots(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, len: usize) -> FaultSequence {
        FaultSequence(self.0[..len].to_vec())
    }

    /// Per-unit multiplicities.
    pub fn counts(&self, n_units: usize) -> Vec<u32> {
        let mut counts = vec![0; n_units];
        for &u in &self.0 {
            counts[u] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// 1-based step of the first immediate replacement failure.
    pub failed_at_step: Option<usize>,
    pub decisions: Vec<Decision>,
    /// Decisions settled by the tie-break mode rather than by ranking.
    pub ties_seen: usize,
    /// Faults repaired per unit when the run stopped.
    pub fault_counts: Vec<u32>,
}

impl RunOutcome {
    pub fn survived(&self) -> bool {
        self.failed_at_step.is_none()
    }

    /// Number of faults repaired before stopping.
    pub fn repaired(&self) -> usize {
        self.decisions.len()
    }

    /// Per-step trace lines, `step <k>: fault u<i> -> spare s<j>` or `-> FAIL`.
    pub fn trace(&self, seq: &FaultSequence) -> TraceLines<'_> {
        TraceLines {
            outcome: self,
            slots: seq.slots().to_vec(),
        }
    }
}

pub struct TraceLines<'a> {
    outcome: &'a RunOutcome,
    slots: Vec<usize>,
}

impl fmt::Display for TraceLines<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.outcome.decisions.iter().enumerate() {
            writeln!(f, "step {}: fault u{} -> spare s{}", i + 1, d.faulty_unit, d.chosen_spare)?;
        }
        if let Some(step) = self.outcome.failed_at_step {
            writeln!(f, "step {step}: fault u{} -> FAIL", self.slots[step - 1])?;
        }
        Ok(())
    }
}

/// Runs `seq` under `policy`; ties are drawn from a stream seeded with `seed`.
pub fn run_sequence(
    net: &SpareNetwork,
    seq: &FaultSequence,
    policy: &Policy,
    seed: u64,
) -> Result<RunOutcome> {
    let mut rng = Stream::new(seed);
    let mut selector = PolicySelector {
        policy: *policy,
        rng: &mut rng,
    };
    let mut outcome = run_with(net, seq, &mut selector)?;
    outcome.ties_seen = outcome
        .decisions
        .iter()
        .filter(|d| policy.kind.needed_tiebreak(d))
        .count();
    Ok(outcome)
}

/// Runs `seq` with an arbitrary selector, stopping at the first fault that
/// has no live spare. `ties_seen` is left at zero.
pub fn run_with<S: SpareSelector>(
    net: &SpareNetwork,
    seq: &FaultSequence,
    selector: &mut S,
) -> Result<RunOutcome> {
    let mut state = SystemState::new(net);
    let mut decisions = Vec::with_capacity(seq.len());
    let mut failed_at_step = None;
    for (i, &unit) in seq.slots().iter().enumerate() {
        if unit >= net.n_units() {
            return Err(Error::NodeOutOfRange {
                node: format!("u{unit}"),
            });
        }
        match selector.select(&state, unit, i + 1) {
            Ok(decision) => {
                state.apply_repair(unit, decision.chosen_spare)?;
                decisions.push(decision);
            }
            Err(Error::ImmediateReplacementFailure { .. }) => {
                failed_at_step = Some(i + 1);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RunOutcome {
        failed_at_step,
        decisions,
        ties_seen: 0,
        fault_counts: state.fault_counts().to_vec(),
    })
}

/// Whether every fault occurrence can be given its own spare adjacent (in
/// the original topology) to its unit, i.e. whether a global reassignment
/// repairs the system.
pub fn is_globally_repairable(net: &SpareNetwork, fault_counts: &[u32]) -> bool {
    let total: u64 = fault_counts.iter().map(|&c| u64::from(c)).sum();
    if total > net.n_spares() as u64 {
        return false;
    }
    let mut matcher = OccurrenceMatcher::new(net);
    for (unit, &count) in fault_counts.iter().enumerate() {
        for _ in 0..count {
            if !matcher.push(unit) {
                return false;
            }
        }
    }
    true
}

/// Incremental maximum matching between fault occurrences and spares
/// (augmenting paths). Occurrences are added and removed in stack order.
#[derive(Debug, Clone)]
pub(crate) struct OccurrenceMatcher<'a> {
    net: &'a SpareNetwork,
    /// Unit of each occurrence.
    occurrence_unit: Vec<usize>,
    /// Spare matched to each occurrence.
    occurrence_spare: Vec<usize>,
    spare_owner: Vec<Option<usize>>,
    visited: Vec<bool>,
}

impl<'a> OccurrenceMatcher<'a> {
    pub(crate) fn new(net: &'a SpareNetwork) -> Self {
        OccurrenceMatcher {
            net,
            occurrence_unit: Vec::new(),
            occurrence_spare: Vec::new(),
            spare_owner: vec![None; net.n_spares()],
            visited: vec![false; net.n_spares()],
        }
    }

    /// Adds an occurrence at `unit` and tries to extend the matching. On
    /// failure nothing changes and `false` is returned.
    pub(crate) fn push(&mut self, unit: usize) -> bool {
        let occ = self.occurrence_unit.len();
        self.occurrence_unit.push(unit);
        self.occurrence_spare.push(usize::MAX);
        self.visited.fill(false);
        if self.augment(occ) {
            true
        } else {
            self.occurrence_unit.pop();
            self.occurrence_spare.pop();
            false
        }
    }

    /// Removes the most recent occurrence.
    pub(crate) fn pop(&mut self) {
        if let Some(spare) = self.occurrence_spare.pop() {
            self.occurrence_unit.pop();
            self.spare_owner[spare] = None;
        }
    }

    fn augment(&mut self, occ: usize) -> bool {
        let unit = self.occurrence_unit[occ];
        for &spare in self.net.unit_spares(unit) {
            if self.visited[spare] {
                continue;
            }
            self.visited[spare] = true;
            let free = match self.spare_owner[spare] {
                None => true,
                Some(other) => self.augment(other),
            };
            if free {
                self.spare_owner[spare] = Some(occ);
                self.occurrence_spare[occ] = spare;
                return true;
            }
        }
        false
    }
}
