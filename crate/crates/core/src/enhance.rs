//! Adding a few extra edges where they help repairability most.
//!
//! Spares are ranked most exploitable first: largest essentiality (weakest
//! dependent is strongest; no dependents ranks first), then least popular,
//! then lowest index. Units are ranked most vulnerable first: smallest
//! degree, then largest minimum degree among their spares (relieving a
//! popular spare helps more units), then lowest index.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{generate_random, SpareNetwork};
use crate::rng::Stream;
use crate::state::SystemState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnhancementStrategy {
    /// Uniform unconnected (unit, spare) pair.
    RandomRandom,
    /// Most exploitable spare, random unit.
    SpareOnly,
    /// Most vulnerable unit, random spare.
    UnitOnly,
    /// Most vulnerable unit and most exploitable spare.
    Full,
}

impl EnhancementStrategy {
    pub const ALL: [EnhancementStrategy; 4] = [
        EnhancementStrategy::RandomRandom,
        EnhancementStrategy::SpareOnly,
        EnhancementStrategy::UnitOnly,
        EnhancementStrategy::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnhancementStrategy::RandomRandom => "rand-rand",
            EnhancementStrategy::SpareOnly => "spare-only",
            EnhancementStrategy::UnitOnly => "unit-only",
            EnhancementStrategy::Full => "full",
        }
    }
}

impl fmt::Display for EnhancementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnhancementStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnhancementStrategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "strategy",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSuggestion {
    pub unit: usize,
    pub spare: usize,
    /// Units considered, in the order they were considered.
    pub unit_rank_trace: Vec<usize>,
    /// Spares considered, in the order they were considered.
    pub spare_rank_trace: Vec<usize>,
}

/// Live spares, most exploitable first.
pub fn rank_spares(state: &SystemState<'_>) -> Vec<usize> {
    let mut spares: Vec<usize> = (0..state.topology().n_spares())
        .filter(|&s| !state.is_consumed(s))
        .collect();
    spares.sort_by_key(|&s| {
        (
            Reverse(state.essentiality_unchecked(s, None)),
            state.spare_degree(s),
            s,
        )
    });
    spares
}

/// Units, most vulnerable first.
pub fn rank_units(state: &SystemState<'_>) -> Vec<usize> {
    let mut units: Vec<usize> = (0..state.topology().n_units()).collect();
    units.sort_by_key(|&u| (state.unit_degree(u), Reverse(state.unit_support(u)), u));
    units
}

/// Proposes one new edge for `net` under `strategy`.
pub fn suggest_edge(
    net: &SpareNetwork,
    strategy: EnhancementStrategy,
    rng: &mut Stream,
) -> Result<EdgeSuggestion> {
    if net.is_complete() {
        return Err(Error::CompleteNetwork);
    }
    let state = SystemState::new(net);
    let free_units = |s: usize| -> Vec<usize> {
        (0..net.n_units()).filter(|&u| !net.has_edge(u, s)).collect()
    };
    let free_spares = |u: usize| -> Vec<usize> {
        (0..net.n_spares()).filter(|&s| !net.has_edge(u, s)).collect()
    };

    let suggestion = match strategy {
        EnhancementStrategy::Full => {
            let units = rank_units(&state);
            let spares = rank_spares(&state);
            let (unit, spare) = units
                .iter()
                .flat_map(|&u| spares.iter().map(move |&s| (u, s)))
                .find(|&(u, s)| !net.has_edge(u, s))
                .expect("incomplete network has a free cell");
            EdgeSuggestion {
                unit,
                spare,
                unit_rank_trace: units,
                spare_rank_trace: spares,
            }
        }
        EnhancementStrategy::SpareOnly => {
            let spares = rank_spares(&state);
            let spare = *spares
                .iter()
                .find(|&&s| net.spare_degree(s) < net.n_units())
                .expect("incomplete network has a free cell");
            let pool = free_units(spare);
            EdgeSuggestion {
                unit: rng.pick(&pool),
                spare,
                unit_rank_trace: pool,
                spare_rank_trace: spares,
            }
        }
        EnhancementStrategy::UnitOnly => {
            let units = rank_units(&state);
            let unit = *units
                .iter()
                .find(|&&u| net.unit_degree(u) < net.n_spares())
                .expect("incomplete network has a free cell");
            let pool = free_spares(unit);
            EdgeSuggestion {
                unit,
                spare: rng.pick(&pool),
                unit_rank_trace: units,
                spare_rank_trace: pool,
            }
        }
        EnhancementStrategy::RandomRandom => {
            let cells: Vec<(usize, usize)> = (0..net.n_units())
                .flat_map(|u| (0..net.n_spares()).map(move |s| (u, s)))
                .filter(|&(u, s)| !net.has_edge(u, s))
                .collect();
            let (unit, spare) = rng.pick(&cells);
            EdgeSuggestion {
                unit,
                spare,
                unit_rank_trace: Vec::new(),
                spare_rank_trace: Vec::new(),
            }
        }
    };
    Ok(suggestion)
}

/// Adds `k` edges one at a time, re-ranking after every addition.
pub fn enhance(
    net: &SpareNetwork,
    k: usize,
    strategy: EnhancementStrategy,
    seed: u64,
) -> Result<SpareNetwork> {
    let free = net.capacity() - net.n_edges();
    if k > free {
        return Err(Error::TooManyEdges {
            requested: net.n_edges() + k,
            capacity: net.capacity(),
        });
    }
    let mut rng = Stream::new(seed);
    let mut current = net.clone();
    for _ in 0..k {
        let s = suggest_edge(&current, strategy, &mut rng)?;
        current = current.with_edges([(s.unit, s.spare)])?;
    }
    Ok(current)
}

/// `m_random` uniform edges followed by `m_selected` edges added with the
/// full strategy.
pub fn build_spectrum(
    n_units: usize,
    n_spares: usize,
    m_random: usize,
    m_selected: usize,
    seed: u64,
) -> Result<SpareNetwork> {
    let capacity = n_units * n_spares;
    if m_random + m_selected > capacity {
        return Err(Error::TooManyEdges {
            requested: m_random + m_selected,
            capacity,
        });
    }
    let base = generate_random(n_units, n_spares, m_random, seed)?;
    enhance(&base, m_selected, EnhancementStrategy::Full, seed)
}
