//! Recursive minimal partitioning and the guard budget built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SimplePolygon;
use crate::triangulation::{balanced_diagonal, chain, triangulate, triangulate_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    Hexagon,
    Septagon,
    Octagon,
    Nonagon,
    Remainder,
}

impl PartitionKind {
    fn for_edges(e: usize) -> PartitionKind {
        match e {
            6 => PartitionKind::Hexagon,
            7 => PartitionKind::Septagon,
            8 => PartitionKind::Octagon,
            9 => PartitionKind::Nonagon,
            _ => PartitionKind::Remainder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub polygon: SimplePolygon,
    /// Indices into the parent polygon, counter-clockwise.
    pub vertex_ids: Vec<usize>,
    pub original_edge_count: usize,
    pub diagonal_edge_count: usize,
    pub kind: PartitionKind,
}

impl Partition {
    pub fn from_ids(parent: &SimplePolygon, ids: Vec<usize>) -> Partition {
        let n = parent.len();
        let m = ids.len();
        let k = (0..m)
            .filter(|&j| (ids[j] + 1) % n == ids[(j + 1) % m])
            .count();
        Partition {
            polygon: parent.sub_polygon(&ids),
            vertex_ids: ids,
            original_edge_count: k,
            diagonal_edge_count: m - k,
            kind: PartitionKind::for_edges(m),
        }
    }

    pub fn edges(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn is_remainder(&self) -> bool {
        self.kind == PartitionKind::Remainder
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSet {
    pub n: usize,
    pub partitions: Vec<Partition>,
    /// Cut diagonals as parent vertex index pairs.
    pub cut_diagonals: Vec<(usize, usize)>,
    /// Partition pairs sharing a cut diagonal.
    pub adjacency: Vec<(usize, usize)>,
    /// Number of non-remainder partitions.
    pub r: usize,
}

/// Edge-accounting identity of a partition set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIdentity {
    pub n: usize,
    pub r: usize,
    pub k_prime: usize,
    pub pieces: usize,
    /// Σ (k_i + k̂_i) over non-remainder partitions.
    pub sum: usize,
    /// `n + 2 (pieces - 1) - k'` equals `sum`.
    pub holds: bool,
    /// The same identity written with `r` in place of the piece count.
    pub holds_with_r: bool,
}

impl PartitionSet {
    pub fn remainder(&self) -> Option<&Partition> {
        self.partitions.iter().find(|p| p.is_remainder())
    }

    pub fn k_prime(&self) -> usize {
        self.remainder().map_or(0, Partition::edges)
    }

    pub fn edge_identity(&self) -> EdgeIdentity {
        let k_prime = self.k_prime();
        let pieces = self.partitions.len();
        let sum = self
            .partitions
            .iter()
            .filter(|p| !p.is_remainder())
            .map(|p| p.original_edge_count + p.diagonal_edge_count)
            .sum();
        let lhs = |m: usize| (self.n + 2 * m).checked_sub(2 + k_prime);
        EdgeIdentity {
            n: self.n,
            r: self.r,
            k_prime,
            pieces,
            sum,
            holds: lhs(pieces) == Some(sum),
            holds_with_r: lhs(self.r) == Some(sum),
        }
    }
}

fn cut_once(poly: &SimplePolygon, n: usize) -> Result<crate::triangulation::BalancedCut> {
    let mut last = None;
    for start in 0..n {
        let t = if start == 0 {
            triangulate(poly)
        } else {
            triangulate_from(poly, start)
        };
        match t.and_then(|t| balanced_diagonal(&t)) {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::PartitionFailed("empty polygon".into())))
}

/// Cuts `poly` into pieces of 6 to 9 edges plus at most one piece of 3 to 5
/// edges, by repeatedly removing the 5..8-edge side of a balanced diagonal.
pub fn minimal_partition(poly: &SimplePolygon) -> Result<PartitionSet> {
    let n = poly.len();
    let mut current: Vec<usize> = (0..n).collect();
    let mut partitions = Vec::new();
    let mut cut_diagonals = Vec::new();
    while current.len() >= 10 {
        let m = current.len();
        let sub = poly.sub_polygon(&current);
        let cut = cut_once(&sub, m)?;
        let piece: Vec<usize> = chain(m, cut.from, cut.to)
            .into_iter()
            .map(|j| current[j])
            .collect();
        let rest: Vec<usize> = chain(m, cut.to, cut.from)
            .into_iter()
            .map(|j| current[j])
            .collect();
        cut_diagonals.push((current[cut.diagonal.0], current[cut.diagonal.1]));
        partitions.push(Partition::from_ids(poly, piece));
        current = rest;
    }
    partitions.push(Partition::from_ids(poly, current));
    let adjacency = adjacency(&partitions, &cut_diagonals);
    let r = partitions.iter().filter(|p| !p.is_remainder()).count();
    Ok(PartitionSet {
        n,
        partitions,
        cut_diagonals,
        adjacency,
        r,
    })
}

fn has_edge(ids: &[usize], a: usize, b: usize) -> bool {
    let m = ids.len();
    (0..m).any(|j| {
        let (u, v) = (ids[j], ids[(j + 1) % m]);
        (u == a && v == b) || (u == b && v == a)
    })
}

fn adjacency(parts: &[Partition], cuts: &[(usize, usize)]) -> Vec<(usize, usize)> {
    cuts.iter()
        .filter_map(|&(a, b)| {
            let mut owners = parts
                .iter()
                .enumerate()
                .filter(|(_, p)| has_edge(&p.vertex_ids, a, b))
                .map(|(i, _)| i);
            Some((owners.next()?, owners.next()?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardBudget {
    pub total: usize,
    pub bound: usize,
    pub satisfies: bool,
    /// The counting argument applies: at least three partitions, or no
    /// remainder.
    pub hypothesis: bool,
}

/// Guard total for per-partition guard counts (non-remainder partitions in
/// order), plus one for the remainder, against `⌊n/3⌋`.
pub fn guard_budget(ps: &PartitionSet, per_partition_guards: &[usize]) -> GuardBudget {
    let extra = usize::from(ps.remainder().is_some());
    let total = per_partition_guards.iter().sum::<usize>() + extra;
    let bound = ps.n / 3;
    GuardBudget {
        total,
        bound,
        satisfies: total < bound,
        hypothesis: ps.r >= 3 || extra == 0,
    }
}

/// Splits a 9-edge polygon along a diagonal with 4 edges on one side into a
/// pentagon and a hexagon. Returned ids index into `poly`.
pub fn nonagon_split(poly: &SimplePolygon) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = poly.len();
    if n != 9 {
        return Err(Error::NotANonagon(n));
    }
    let t = triangulate(poly)?;
    for &(a, b) in &t.diagonals {
        let (from, to) = if b - a == 4 {
            (a, b)
        } else if n - (b - a) == 4 {
            (b, a)
        } else {
            continue;
        };
        return Ok((chain(n, from, to), chain(n, to, from)));
    }
    Err(Error::PartitionFailed(
        "triangulation has no diagonal with 4 edges on one side".into(),
    ))
}
