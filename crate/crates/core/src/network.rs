//! Bipartite spare-sharing topology and topology generators.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::Stream;

/// A vertex of the sharing graph. Indices are 0-based on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Unit(usize),
    Spare(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Unit(u) => write!(f, "u{u}"),
            Node::Spare(s) => write!(f, "s{s}"),
        }
    }
}

/// A vertex degree, or `Infinite` for the minimum over an empty set.
///
/// Variant order gives `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    Finite(usize),
    Infinite,
}

impl Degree {
    /// Minimum over an iterator of degrees; `Infinite` when empty.
    pub fn min_of<I: IntoIterator<Item = usize>>(degrees: I) -> Degree {
        degrees
            .into_iter()
            .min()
            .map_or(Degree::Infinite, Degree::Finite)
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::Infinite => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::Infinite => f.write_str("inf"),
        }
    }
}

/// Immutable bipartite graph of functional units, spare units and the
/// replacement edges between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpareNetwork {
    n_units: usize,
    n_spares: usize,
    /// Sorted, duplicate-free.
    edges: Vec<(usize, usize)>,
    unit_adj: Vec<Vec<usize>>,
    spare_adj: Vec<Vec<usize>>,
}

impl SpareNetwork {
    /// Validates indices and collapses duplicate edges.
    pub fn new<I>(n_units: usize, n_spares: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n_units == 0 {
            return Err(Error::NoUnits);
        }
        let mut list = Vec::new();
        for (unit, spare) in edges {
            if unit >= n_units || spare >= n_spares {
                return Err(Error::EdgeOutOfRange {
                    unit,
                    spare,
                    n_units,
                    n_spares,
                });
            }
            list.push((unit, spare));
        }
        list.sort_unstable();
        list.dedup();

        let mut unit_adj = vec![Vec::new(); n_units];
        let mut spare_adj = vec![Vec::new(); n_spares];
        for &(u, s) in &list {
            unit_adj[u].push(s);
            spare_adj[s].push(u);
        }
        // `list` is sorted by (u, s) so unit lists are already ascending.
        for adj in &mut spare_adj {
            adj.sort_unstable();
        }
        Ok(SpareNetwork {
            n_units,
            n_spares,
            edges: list,
            unit_adj,
            spare_adj,
        })
    }

    /// The four-unit, three-spare example network used throughout the docs:
    /// u0-s0, u1-s0, u1-s1, u2-s1, u3-s1, u3-s2.
    pub fn reference_example() -> Self {
        SpareNetwork::new(4, 3, [(0, 0), (1, 0), (1, 1), (2, 1), (3, 1), (3, 2)])
            .expect("reference network is valid")
    }

    /// Every unit connected to every spare.
    pub fn complete(n_units: usize, n_spares: usize) -> Result<Self> {
        SpareNetwork::new(
            n_units,
            n_spares,
            (0..n_units).flat_map(|u| (0..n_spares).map(move |s| (u, s))),
        )
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn n_spares(&self) -> usize {
        self.n_spares
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of (unit, spare) cells in the full bipartite grid.
    pub fn capacity(&self) -> usize {
        self.n_units * self.n_spares
    }

    pub fn is_complete(&self) -> bool {
        self.n_edges() == self.capacity()
    }

    pub fn has_edge(&self, unit: usize, spare: usize) -> bool {
        unit < self.n_units && self.unit_adj[unit].binary_search(&spare).is_ok()
    }

    /// Spares adjacent to `unit` in the original topology, ascending.
    pub fn unit_spares(&self, unit: usize) -> &[usize] {
        &self.unit_adj[unit]
    }

    /// Units adjacent to `spare` in the original topology, ascending.
    pub fn spare_units(&self, spare: usize) -> &[usize] {
        &self.spare_adj[spare]
    }

    pub fn unit_degree(&self, unit: usize) -> usize {
        self.unit_adj[unit].len()
    }

    pub fn spare_degree(&self, spare: usize) -> usize {
        self.spare_adj[spare].len()
    }

    /// Minimum functional-unit degree of the untouched topology.
    pub fn min_unit_degree(&self) -> usize {
        self.unit_adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Copy of this network with extra edges.
    pub fn with_edges<I>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        SpareNetwork::new(
            self.n_units,
            self.n_spares,
            self.edges.iter().copied().chain(extra),
        )
    }

    pub(crate) fn check_node(&self, node: Node) -> Result<()> {
        let ok = match node {
            Node::Unit(u) => u < self.n_units,
            Node::Spare(s) => s < self.n_spares,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: node.to_string(),
            })
        }
    }
}

/// Uniform random topology: `n_edges` distinct cells drawn without
/// replacement from the `n_units x n_spares` grid. No connectivity guarantee.
pub fn generate_random(
    n_units: usize,
    n_spares: usize,
    n_edges: usize,
    seed: u64,
) -> Result<SpareNetwork> {
    let capacity = n_units * n_spares;
    if n_edges > capacity {
        return Err(Error::TooManyEdges {
            requested: n_edges,
            capacity,
        });
    }
    let mut rng = Stream::new(seed);
    let mut cells: Vec<usize> = (0..capacity).collect();
    // Partial Fisher-Yates: the first n_edges slots end up a uniform sample.
    for i in 0..n_edges {
        let j = i + rng.below(capacity - i);
        cells.swap(i, j);
    }
    SpareNetwork::new(
        n_units,
        n_spares,
        cells[..n_edges]
            .iter()
            .map(|&c| (c / n_spares, c % n_spares)),
    )
}

/// Deterministic evenly-spread topology ("high-order ring").
///
/// Edge `k` joins unit `k mod U` to spare `(k + k / L) mod S`, with
/// `L = lcm(U, S)`. Each block of `L` consecutive edges covers one residue
/// class of `spare - unit (mod gcd(U, S))`, so no cell repeats, and within
/// any prefix both sides receive edges round-robin. Unit degrees therefore
/// differ by at most one, and so do spare degrees.
pub fn generate_balanced_ring(
    n_units: usize,
    n_spares: usize,
    n_edges: usize,
) -> Result<SpareNetwork> {
    let capacity = n_units * n_spares;
    if n_edges > capacity {
        return Err(Error::TooManyEdges {
            requested: n_edges,
            capacity,
        });
    }
    if n_units == 0 {
        return Err(Error::NoUnits);
    }
    let block = lcm(n_units, n_spares.max(1));
    let edges = (0..n_edges).map(|k| (k % n_units, (k + k / block) % n_spares));
    SpareNetwork::new(n_units, n_spares, edges)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
