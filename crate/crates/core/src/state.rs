//! Mutable run-time view of a network under immediate spare replacement.
//!
//! Edges only disappear when their spare is consumed, so the live edge set
//! is exactly the original edges whose spare is still unused.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::{Degree, Node, SpareNetwork};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemState<'a> {
    topology: &'a SpareNetwork,
    consumed: Vec<bool>,
    n_consumed: usize,
    /// Live degree of every functional unit.
    unit_live: Vec<usize>,
    fault_counts: Vec<u32>,
}

impl<'a> SystemState<'a> {
    pub fn new(topology: &'a SpareNetwork) -> Self {
        SystemState {
            topology,
            consumed: vec![false; topology.n_spares()],
            n_consumed: 0,
            unit_live: (0..topology.n_units())
                .map(|u| topology.unit_degree(u))
                .collect(),
            fault_counts: vec![0; topology.n_units()],
        }
    }

    pub fn topology(&self) -> &'a SpareNetwork {
        self.topology
    }

    /// Restores the fresh state without reallocating.
    pub fn reset(&mut self) {
        self.consumed.fill(false);
        self.n_consumed = 0;
        for (u, d) in self.unit_live.iter_mut().enumerate() {
            *d = self.topology.unit_degree(u);
        }
        self.fault_counts.fill(0);
    }

    pub fn is_consumed(&self, spare: usize) -> bool {
        self.consumed[spare]
    }

    pub fn consumed_spares(&self) -> impl Iterator<Item = usize> + '_ {
        self.consumed
            .iter()
            .enumerate()
            .filter_map(|(s, &c)| c.then_some(s))
    }

    pub fn n_consumed(&self) -> usize {
        self.n_consumed
    }

    /// Repairs performed per functional unit so far.
    pub fn fault_counts(&self) -> &[u32] {
        &self.fault_counts
    }

    /// Consumed-spare bitmask; together with the topology it determines
    /// every live degree.
    pub fn consumed_key(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.consumed.len().div_ceil(64)];
        for s in self.consumed_spares() {
            words[s / 64] |= 1 << (s % 64);
        }
        words
    }

    pub fn live_edges(&self) -> BTreeSet<(usize, usize)> {
        self.topology
            .edges()
            .iter()
            .copied()
            .filter(|&(_, s)| !self.consumed[s])
            .collect()
    }

    pub fn unit_degree(&self, unit: usize) -> usize {
        self.unit_live[unit]
    }

    pub fn spare_degree(&self, spare: usize) -> usize {
        if self.consumed[spare] {
            0
        } else {
            self.topology.spare_degree(spare)
        }
    }

    pub fn degree(&self, node: Node) -> usize {
        match node {
            Node::Unit(u) => self.unit_degree(u),
            Node::Spare(s) => self.spare_degree(s),
        }
    }

    /// Live spares of `unit`, ascending.
    pub fn live_spares(&self, unit: usize) -> impl Iterator<Item = usize> + '_ {
        self.topology
            .unit_spares(unit)
            .iter()
            .copied()
            .filter(|&s| !self.consumed[s])
    }

    /// Live units of `spare`, ascending; empty once consumed.
    pub fn live_units(&self, spare: usize) -> &'a [usize] {
        if self.consumed[spare] {
            &[]
        } else {
            self.topology.spare_units(spare)
        }
    }

    /// Live adjacency of a unit or spare.
    pub fn neighbors(&self, node: Node) -> Result<Vec<Node>> {
        self.topology.check_node(node)?;
        Ok(match node {
            Node::Unit(u) => self.live_spares(u).map(Node::Spare).collect(),
            Node::Spare(s) => self.live_units(s).iter().map(|&u| Node::Unit(u)).collect(),
        })
    }

    /// Minimum live degree over a same-side node set.
    pub fn min_deg(&self, nodes: &[Node]) -> Result<Degree> {
        let units = nodes.iter().filter(|n| matches!(n, Node::Unit(_))).count();
        if units != 0 && units != nodes.len() {
            return Err(Error::MixedSides);
        }
        for &n in nodes {
            self.topology.check_node(n)?;
        }
        Ok(Degree::min_of(nodes.iter().map(|&n| self.degree(n))))
    }

    /// Degree of the weakest unit relying on `spare`, optionally ignoring
    /// one unit.
    pub fn essentiality(&self, spare: usize, excluded_unit: Option<usize>) -> Result<Degree> {
        self.topology.check_node(Node::Spare(spare))?;
        if self.consumed[spare] {
            return Err(Error::ConsumedSpare(spare));
        }
        Ok(self.essentiality_unchecked(spare, excluded_unit))
    }

    pub(crate) fn essentiality_unchecked(&self, spare: usize, excluded_unit: Option<usize>) -> Degree {
        Degree::min_of(
            self.live_units(spare)
                .iter()
                .filter(|&&u| Some(u) != excluded_unit)
                .map(|&u| self.unit_live[u]),
        )
    }

    /// Minimum live degree among the spares adjacent to `unit`.
    pub fn unit_support(&self, unit: usize) -> Degree {
        Degree::min_of(self.live_spares(unit).map(|s| self.spare_degree(s)))
    }

    /// Consumes `spare` to repair a fault at `unit`.
    pub fn apply_repair(&mut self, unit: usize, spare: usize) -> Result<()> {
        self.topology.check_node(Node::Unit(unit))?;
        self.topology.check_node(Node::Spare(spare))?;
        if self.consumed[spare] || !self.topology.has_edge(unit, spare) {
            return Err(Error::NotAdjacent { unit, spare });
        }
        self.consumed[spare] = true;
        self.n_consumed += 1;
        for &u in self.topology.spare_units(spare) {
            self.unit_live[u] -= 1;
        }
        self.fault_counts[unit] += 1;
        Ok(())
    }
}
