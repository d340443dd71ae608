//! Spare-selection rules applied when a single fault arrives.
//!
//! * `Pe` keeps the candidates whose weakest other dependent is strongest
//!   (largest essentiality value).
//! * `Pp` keeps the least popular candidates (smallest live spare degree).
//! * `PePp` / `PpPe` apply one rule and break its ties with the other.
//! * `Random` treats every candidate as tied.
//!
//! Whatever survives the ranking stages goes to the tie-break mode: a
//! uniform draw from the caller's stream, or the lowest spare index.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::Degree;
use crate::rng::Stream;
use crate::state::SystemState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Random,
    Pe,
    Pp,
    PePp,
    PpPe,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Random,
        PolicyKind::Pe,
        PolicyKind::Pp,
        PolicyKind::PePp,
        PolicyKind::PpPe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Random => "random",
            PolicyKind::Pe => "pe",
            PolicyKind::Pp => "pp",
            PolicyKind::PePp => "pe+pp",
            PolicyKind::PpPe => "pp+pe",
        }
    }

    fn stages(self) -> &'static [Criterion] {
        match self {
            PolicyKind::Random => &[],
            PolicyKind::Pe => &[Criterion::Essentiality],
            PolicyKind::Pp => &[Criterion::Popularity],
            PolicyKind::PePp => &[Criterion::Essentiality, Criterion::Popularity],
            PolicyKind::PpPe => &[Criterion::Popularity, Criterion::Essentiality],
        }
    }

    /// Whether the last ranking stage of this policy left several
    /// candidates, i.e. the tie-break mode had to decide.
    pub fn needed_tiebreak(self, decision: &Decision) -> bool {
        match self.stages().len() {
            0 => false,
            1 => decision.tie_after_primary,
            _ => decision.tie_after_secondary,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "policy",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieBreak {
    /// Uniform draw from the caller's random stream.
    Seeded,
    /// Lowest spare index; makes the policy a pure function of the state.
    LowestIndex,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seeded" => Ok(TieBreak::Seeded),
            "lowest" => Ok(TieBreak::LowestIndex),
            _ => Err(Error::UnknownName {
                kind: "tie-break mode",
                name: s.to_string(),
            }),
        }
    }
}

/// Whether the faulty unit itself counts toward a candidate's essentiality.
///
/// `IncludeFaulty` scores each candidate by the minimum over its whole live
/// neighborhood. `ExcludeFaulty` drops the faulty unit, whose degree is the
/// same for every candidate; it separates candidates more often but shifts
/// the policy further toward short-horizon protection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EssentialityMode {
    #[default]
    IncludeFaulty,
    ExcludeFaulty,
}

impl FromStr for EssentialityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "include" => Ok(EssentialityMode::IncludeFaulty),
            "exclude" => Ok(EssentialityMode::ExcludeFaulty),
            _ => Err(Error::UnknownName {
                kind: "essentiality mode",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Policy {
    pub kind: PolicyKind,
    pub tiebreak: TieBreak,
    pub essentiality: EssentialityMode,
}

impl Policy {
    /// Seeded tie-breaks, whole neighborhood counted for essentiality.
    pub fn new(kind: PolicyKind) -> Self {
        Policy {
            kind,
            tiebreak: TieBreak::Seeded,
            essentiality: EssentialityMode::default(),
        }
    }

    /// Deterministic variant of `kind`.
    pub fn lowest(kind: PolicyKind) -> Self {
        Policy::new(kind).with_tiebreak(TieBreak::LowestIndex)
    }

    pub fn with_tiebreak(mut self, tiebreak: TieBreak) -> Self {
        self.tiebreak = tiebreak;
        self
    }

    pub fn with_essentiality(mut self, mode: EssentialityMode) -> Self {
        self.essentiality = mode;
        self
    }

    pub fn is_deterministic(&self) -> bool {
        self.tiebreak == TieBreak::LowestIndex
    }
}

/// One recorded spare choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub faulty_unit: usize,
    pub chosen_spare: usize,
    /// Live spares of the faulty unit at decision time, ascending.
    pub candidates: Vec<usize>,
    pub tie_after_primary: bool,
    pub tie_after_secondary: bool,
}

#[derive(Debug, Clone, Copy)]
enum Criterion {
    Essentiality,
    Popularity,
}

/// Live spares of `unit`, ascending. Empty means an immediate replacement
/// failure.
pub fn candidate_spares(state: &SystemState<'_>, unit: usize) -> Vec<usize> {
    state.live_spares(unit).collect()
}

/// Chooses the spare that repairs a fault at `unit`.
pub fn select_spare(
    state: &SystemState<'_>,
    unit: usize,
    policy: &Policy,
    rng: &mut Stream,
) -> Result<Decision> {
    if unit >= state.topology().n_units() {
        return Err(Error::NodeOutOfRange {
            node: format!("u{unit}"),
        });
    }
    let candidates = candidate_spares(state, unit);
    if candidates.is_empty() {
        return Err(Error::ImmediateReplacementFailure { unit });
    }

    let excluded = match policy.essentiality {
        EssentialityMode::ExcludeFaulty => Some(unit),
        EssentialityMode::IncludeFaulty => None,
    };
    let mut pool = candidates.clone();
    let mut ties = [false; 2];
    for (stage, criterion) in policy.kind.stages().iter().enumerate() {
        if pool.len() == 1 {
            break;
        }
        match criterion {
            // larger essentiality is better
            Criterion::Essentiality => {
                keep_best(&mut pool, |s| std::cmp::Reverse(state.essentiality_unchecked(s, excluded)))
            }
            Criterion::Popularity => keep_best(&mut pool, |s| Degree::Finite(state.spare_degree(s))),
        }
        ties[stage] = pool.len() > 1;
    }

    let chosen_spare = match policy.tiebreak {
        TieBreak::LowestIndex => pool[0],
        TieBreak::Seeded if pool.len() == 1 => pool[0],
        TieBreak::Seeded => rng.pick(&pool),
    };
    Ok(Decision {
        faulty_unit: unit,
        chosen_spare,
        candidates,
        tie_after_primary: ties[0],
        tie_after_secondary: ties[1],
    })
}

/// Retains the elements with the smallest key, preserving order.
fn keep_best<K: Ord, F: Fn(usize) -> K>(pool: &mut Vec<usize>, key: F) {
    let keys: Vec<K> = pool.iter().map(|&s| key(s)).collect();
    let best = keys.iter().min().expect("non-empty pool");
    let mut i = 0;
    pool.retain(|_| {
        let keep = keys[i] == *best;
        i += 1;
        keep
    });
}

/// Something that picks a spare for each fault of a run.
pub trait SpareSelector {
    /// `step` is the 1-based position of the fault in its sequence.
    fn select(&mut self, state: &SystemState<'_>, unit: usize, step: usize) -> Result<Decision>;
}

/// A [`Policy`] bound to a tie-break stream.
pub struct PolicySelector<'r> {
    pub policy: Policy,
    pub rng: &'r mut Stream,
}

impl SpareSelector for PolicySelector<'_> {
    fn select(&mut self, state: &SystemState<'_>, unit: usize, _step: usize) -> Result<Decision> {
        select_spare(state, unit, &self.policy, self.rng)
    }
}

/// Replays a fixed list of spare choices, one per step. Used to reproduce
/// hand-drawn repair traces.
#[derive(Debug, Clone)]
pub struct ScriptedSelector {
    choices: Vec<usize>,
}

impl ScriptedSelector {
    pub fn new(choices: Vec<usize>) -> Self {
        ScriptedSelector { choices }
    }
}

impl SpareSelector for ScriptedSelector {
    fn select(&mut self, state: &SystemState<'_>, unit: usize, step: usize) -> Result<Decision> {
        let candidates = candidate_spares(state, unit);
        if candidates.is_empty() {
            return Err(Error::ImmediateReplacementFailure { unit });
        }
        let spare = *self
            .choices
            .get(step - 1)
            .ok_or(Error::ScriptExhausted { step })?;
        if !candidates.contains(&spare) {
            return Err(Error::NotAdjacent { unit, spare });
        }
        Ok(Decision {
            faulty_unit: unit,
            chosen_spare: spare,
            candidates,
            tie_after_primary: false,
            tie_after_secondary: false,
        })
    }
}
