//! Orthogonal polygons: convex quadrilateralization, the quad dual tree,
//! groups of 2 to 4 quads and the `⌊n/4⌋` budget.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::deploy::{assemble, check_speed, deploy_partition, static_point, CellDeployment, DeploymentPlan, GuardMode};
use crate::error::{Error, Result};
use crate::geometry::{dist_point_segment, eps, orient, segment_visible, SimplePolygon};
use crate::partition::GuardBudget;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrilateralization {
    pub polygon: SimplePolygon,
    /// Counter-clockwise vertex indices of each quad.
    pub quads: Vec<[usize; 4]>,
    pub diagonals: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDualTree {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl QuadDualTree {
    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == node || b == node).count()
    }

    fn neighbours(&self, node: usize, alive: &[bool]) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match () {
                _ if a == node => Some(b),
                _ if b == node => Some(a),
                _ => None,
            })
            .filter(|&m| alive[m])
            .collect()
    }

    pub fn is_tree(&self) -> bool {
        if self.nodes == 0 || self.edges.len() != self.nodes - 1 {
            return false;
        }
        let alive = vec![true; self.nodes];
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for m in self.neighbours(v, &alive) {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadGroup {
    pub quads: Vec<usize>,
    pub q: usize,
    pub polygon: SimplePolygon,
}

/// Counting identities of a grouping. `r` is the number of quads, so
/// `n = 2r + 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadCounts {
    pub r: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub k_prime: usize,
    pub quad_sum_holds: bool,
    /// `⌊(r + 1) / 2⌋`, equal to `⌊n/4⌋`.
    pub half: usize,
    /// `n2 + n3 + n4 + k' + ⌊(n3 + 2 n4) / 2⌋`.
    pub half_paper_form: usize,
    /// `n2 + n3 + n4 + ⌊(n3 + 2 n4 + k' + 1) / 2⌋`.
    pub half_exact_form: usize,
    pub paper_form_holds: bool,
    pub exact_form_holds: bool,
    /// `n3 >= 2` or `n4 >= 1`.
    pub hypothesis: bool,
}

impl QuadCounts {
    pub fn new(r: usize, sizes: &[usize], k_prime: usize) -> QuadCounts {
        let count = |q: usize| sizes.iter().filter(|&&s| s == q).count();
        let (n2, n3, n4) = (count(2), count(3), count(4));
        let base = n2 + n3 + n4;
        let half = (r + 1) / 2;
        let half_paper_form = base + k_prime + (n3 + 2 * n4) / 2;
        let half_exact_form = base + (n3 + 2 * n4 + k_prime + 1) / 2;
        QuadCounts {
            r,
            n2,
            n3,
            n4,
            k_prime,
            quad_sum_holds: r == 2 * n2 + 3 * n3 + 4 * n4 + k_prime,
            half,
            half_paper_form,
            half_exact_form,
            paper_form_holds: half == half_paper_form,
            exact_form_holds: half == half_exact_form,
            hypothesis: n3 >= 2 || n4 >= 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalReport {
    pub quadrilateralization: Quadrilateralization,
    pub supplied: bool,
    pub dual: QuadDualTree,
    pub groups: Vec<QuadGroup>,
    pub leftover: Option<usize>,
    pub counts: QuadCounts,
    pub max_group_reflex: usize,
}

pub fn check_orthogonal(poly: &SimplePolygon) -> Result<()> {
    if poly.len() % 2 == 1 {
        return Err(Error::NotOrthogonal(format!("{} vertices", poly.len())));
    }
    for (i, (a, b)) in poly.edges().enumerate() {
        let d = b - a;
        if d.x.abs() > eps() && d.y.abs() > eps() {
            return Err(Error::NotOrthogonal(format!("edge {i} is not axis-parallel")));
        }
    }
    Ok(())
}

struct Chords<'a> {
    poly: &'a SimplePolygon,
    cache: HashMap<(usize, usize), bool>,
}

impl Chords<'_> {
    fn is_edge(&self, a: usize, b: usize) -> bool {
        let n = self.poly.len();
        (a + 1) % n == b || (b + 1) % n == a
    }

    /// Polygon edge, or a diagonal inside the polygon touching the boundary
    /// only at its ends.
    fn ok(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        if self.is_edge(a, b) {
            return true;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let (p, q) = (self.poly.vertex(a), self.poly.vertex(b));
        let clear = (0..self.poly.len())
            .filter(|&v| v != a && v != b)
            .all(|v| dist_point_segment(self.poly.vertex(v), p, q) > eps());
        let v = clear && self.poly.contains_strict((p + q) / 2.0) && segment_visible(self.poly, p, q);
        self.cache.insert(key, v);
        v
    }
}

/// Convex with positive area; a straight angle is allowed, as collinear
/// reflex vertices (combs) leave no strictly convex choice.
fn convex_quad(poly: &SimplePolygon, q: [usize; 4]) -> bool {
    let tol = eps() * poly.diameter().max(1.0);
    let p = q.map(|i| poly.vertex(i));
    let turns_left = (0..4).all(|i| orient(p[i], p[(i + 1) % 4], p[(i + 2) % 4]) >= -tol);
    let area2: f64 = (0..4).map(|i| p[i].cross(p[(i + 1) % 4])).sum();
    turns_left && area2 > tol
}

fn diagonals_of(poly: &SimplePolygon, quads: &[[usize; 4]]) -> Vec<(usize, usize)> {
    let n = poly.len();
    let mut out: Vec<(usize, usize)> = quads
        .iter()
        .flat_map(|q| (0..4).map(move |i| (q[i], q[(i + 1) % 4])))
        .filter(|&(a, b)| (a + 1) % n != b && (b + 1) % n != a)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Convex quadrilateralization with vertices on polygon vertices, by
/// dynamic programming over chords.
pub fn quadrilateralize(poly: &SimplePolygon) -> Result<Quadrilateralization> {
    check_orthogonal(poly)?;
    let n = poly.len();
    let mut chords = Chords {
        poly,
        cache: HashMap::new(),
    };
    // best[i][j]: split (k, l) for the sub-chain i..=j closed by chord (i, j)
    let mut best: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; n]; n];
    let mut solved = vec![vec![false; n]; n];
    for i in 0..n - 1 {
        solved[i][i + 1] = true;
    }
    for span in (3..n).step_by(2) {
        for i in 0..n - span {
            let j = i + span;
            if !chords.ok(i, j) {
                continue;
            }
            'search: for k in i + 1..j {
                if !solved[i][k] || !chords.ok(i, k) {
                    continue;
                }
                for l in k + 1..j {
                    if solved[k][l]
                        && solved[l][j]
                        && chords.ok(k, l)
                        && chords.ok(l, j)
                        && convex_quad(poly, [i, k, l, j])
                    {
                        best[i][j] = Some((k, l));
                        solved[i][j] = true;
                        break 'search;
                    }
                }
            }
        }
    }
    if !solved[0][n - 1] {
        return Err(Error::QuadrilateralizationFailed(
            "no convex quadrilateralization on the polygon's vertices".into(),
        ));
    }
    let mut quads = Vec::new();
    let mut stack = vec![(0, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if let Some((k, l)) = best[i][j] {
            quads.push([i, k, l, j]);
            stack.extend([(i, k), (k, l), (l, j)]);
        }
    }
    quads.sort_unstable();
    Ok(Quadrilateralization {
        diagonals: diagonals_of(poly, &quads),
        polygon: poly.clone(),
        quads,
    })
}

/// Checks a supplied quad list: convex quads on chords of the polygon whose
/// areas add up to the polygon's.
pub fn accept_quads(poly: &SimplePolygon, quads: &[[usize; 4]]) -> Result<Quadrilateralization> {
    check_orthogonal(poly)?;
    let n = poly.len();
    let fail = |m: String| Err(Error::QuadrilateralizationFailed(m));
    let mut chords = Chords {
        poly,
        cache: HashMap::new(),
    };
    let mut total = 0.0;
    for (qi, q) in quads.iter().enumerate() {
        if q.iter().any(|&v| v >= n) {
            return fail(format!("quad {qi} has an index out of range"));
        }
        if !convex_quad(poly, *q) {
            return fail(format!("quad {qi} is not convex and counter-clockwise"));
        }
        if !(0..4).all(|i| chords.ok(q[i], q[(i + 1) % 4])) {
            return fail(format!("quad {qi} has a side outside the polygon"));
        }
        let pts: Vec<_> = q.iter().map(|&v| poly.vertex(v)).collect();
        total += SimplePolygon::from_derived(pts).map_or(0.0, |p| p.area());
    }
    if (total - poly.area()).abs() > 1e-9 * poly.area() {
        return fail(format!("quads cover area {total}, polygon has {}", poly.area()));
    }
    let q = Quadrilateralization {
        polygon: poly.clone(),
        quads: quads.to_vec(),
        diagonals: diagonals_of(poly, quads),
    };
    if !quad_dual_tree(&q).is_tree() {
        return fail("quads do not form a tree".into());
    }
    Ok(q)
}

pub fn quad_dual_tree(q: &Quadrilateralization) -> QuadDualTree {
    let side = |x: &[usize; 4], a: usize, b: usize| (0..4).any(|i| x[i] == a && x[(i + 1) % 4] == b);
    let mut edges = Vec::new();
    for i in 0..q.quads.len() {
        for j in i + 1..q.quads.len() {
            let shared = (0..4).any(|s| side(&q.quads[j], q.quads[i][(s + 1) % 4], q.quads[i][s]));
            if shared {
                edges.push((i, j));
            }
        }
    }
    QuadDualTree {
        nodes: q.quads.len(),
        edges,
    }
}

/// Union of quads as one polygon on parent vertices, straight angles dropped.
fn merge(q: &Quadrilateralization, ids: &[usize]) -> Result<SimplePolygon> {
    let mut directed: Vec<(usize, usize)> = ids
        .iter()
        .flat_map(|&i| {
            let x = q.quads[i];
            (0..4).map(move |s| (x[s], x[(s + 1) % 4]))
        })
        .collect();
    let all = directed.clone();
    directed.retain(|&(a, b)| !all.contains(&(b, a)));
    let next: HashMap<usize, usize> = directed.iter().copied().collect();
    let start = directed.iter().map(|e| e.0).min().unwrap_or(0);
    let mut ring = vec![start];
    let mut v = next[&start];
    while v != start && ring.len() <= directed.len() {
        ring.push(v);
        v = next[&v];
    }
    SimplePolygon::from_derived(ring.iter().map(|&v| q.polygon.vertex(v)).collect())
        .ok_or_else(|| Error::QuadrilateralizationFailed("group union is degenerate".into()))
}

fn path_order(t: &QuadDualTree) -> Option<Vec<usize>> {
    if t.nodes == 1 {
        return Some(vec![0]);
    }
    if (0..t.nodes).any(|v| t.degree(v) > 2) {
        return None;
    }
    let alive = vec![true; t.nodes];
    let mut order = vec![(0..t.nodes).find(|&v| t.degree(v) == 1)?];
    while order.len() < t.nodes {
        let last = *order.last()?;
        let nxt = t
            .neighbours(last, &alive)
            .into_iter()
            .find(|m| !order.contains(m))?;
        order.push(nxt);
    }
    Some(order)
}

/// Splits the dual tree into groups of 2 to 4 quads and at most one
/// leftover quad. A path is cut into consecutive triples; any other tree
/// loses, one at a time, the smallest subtree of at least two quads.
pub fn quad_group(q: &Quadrilateralization) -> Result<(Vec<QuadGroup>, Option<usize>)> {
    let t = quad_dual_tree(q);
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut leftover = None;
    if let Some(order) = path_order(&t) {
        for chunk in order.chunks(3) {
            if chunk.len() == 1 {
                leftover = Some(chunk[0]);
            } else {
                parts.push(chunk.to_vec());
            }
        }
    } else {
        let mut alive = vec![true; t.nodes];
        loop {
            let rest: Vec<usize> = (0..t.nodes).filter(|&v| alive[v]).collect();
            if rest.len() <= 4 {
                match rest.len() {
                    0 => {}
                    1 => leftover = Some(rest[0]),
                    _ => parts.push(rest),
                }
                break;
            }
            let sub = smallest_split(&t, &alive, rest[0]);
            for &v in &sub {
                alive[v] = false;
            }
            parts.push(sub);
        }
    }
    let groups = parts
        .into_iter()
        .map(|mut quads| {
            quads.sort_unstable();
            Ok(QuadGroup {
                q: quads.len(),
                polygon: merge(q, &quads)?,
                quads,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((groups, leftover))
}

/// Smallest subtree of size >= 2 hanging off an edge, rooted at `root`.
fn smallest_split(t: &QuadDualTree, alive: &[bool], root: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; t.nodes];
    let mut order = vec![root];
    let mut seen = vec![false; t.nodes];
    seen[root] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for m in t.neighbours(v, alive) {
            if !seen[m] {
                seen[m] = true;
                parent[m] = v;
                order.push(m);
            }
        }
        i += 1;
    }
    let mut size = vec![1usize; t.nodes];
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    let pick = order
        .iter()
        .copied()
        .filter(|&v| v != root && size[v] >= 2)
        .min_by_key(|&v| (size[v], v))
        .unwrap_or(root);
    let mut sub = vec![pick];
    let mut k = 0;
    while k < sub.len() {
        let v = sub[k];
        sub.extend(order.iter().copied().filter(|&m| parent[m] == v));
        k += 1;
    }
    sub
}

/// Quad groups each deployed as one cell, one static guard for the leftover
/// quad, against `⌊n/4⌋`.
pub fn deploy_orthogonal(
    name: &str,
    poly: &SimplePolygon,
    quads: Option<&[[usize; 4]]>,
    v_e: f64,
) -> Result<DeploymentPlan> {
    check_speed(v_e)?;
    let (ql, supplied) = match quads {
        Some(q) => (accept_quads(poly, q)?, true),
        None => (quadrilateralize(poly)?, false),
    };
    let dual = quad_dual_tree(&ql);
    if !dual.is_tree() || (0..dual.nodes).any(|v| dual.degree(v) > 4) {
        return Err(Error::QuadrilateralizationFailed(
            "dual graph is not a tree of degree at most 4".into(),
        ));
    }
    let (groups, leftover) = quad_group(&ql)?;
    let mut parts = Vec::new();
    for (gid, g) in groups.iter().enumerate() {
        parts.push((gid, deploy_partition(&g.polygon, v_e)?));
    }
    if let Some(l) = leftover {
        let quad = merge(&ql, &[l])?;
        let position = static_point(&quad)
            .ok_or_else(|| Error::DegenerateInput("leftover quad has no kernel".into()))?;
        parts.push((
            groups.len(),
            CellDeployment {
                polygon: quad,
                guards: vec![GuardMode::Static { position }],
                fallback: None,
            },
        ));
    }
    let sizes: Vec<usize> = groups.iter().map(|g| g.q).collect();
    let counts = QuadCounts::new(ql.quads.len(), &sizes, usize::from(leftover.is_some()));
    let total: usize = parts.iter().map(|(_, c)| c.guards.len()).sum();
    let bound = poly.len() / 4;
    let budget = GuardBudget {
        total,
        bound,
        satisfies: total < bound,
        hypothesis: counts.hypothesis,
    };
    let max_group_reflex = groups
        .iter()
        .map(|g| g.polygon.reflex_indices().len())
        .max()
        .unwrap_or(0);
    let mut plan = assemble(name, poly, v_e, parts, bound, budget);
    plan.orthogonal = Some(OrthogonalReport {
        quadrilateralization: ql,
        supplied,
        dual,
        groups,
        leftover,
        counts,
        max_group_reflex,
    });
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn poly(pts: &[(f64, f64)]) -> SimplePolygon {
        SimplePolygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn rectangle_is_one_quad_and_one_static_guard() {
        let r = poly(&[(0., 0.), (3., 0.), (3., 1.), (0., 1.)]);
        let q = quadrilateralize(&r).unwrap();
        assert_eq!(q.quads.len(), 1);
        let plan = deploy_orthogonal("rect", &r, None, 1.0).unwrap();
        assert_eq!(plan.guard_total, 1);
        assert_eq!(plan.orthogonal.unwrap().leftover, Some(0));
    }

    #[test]
    fn l_shape_is_two_quads_in_one_group() {
        let l = poly(&[(0., 0.), (4., 0.), (4., 2.), (2., 2.), (2., 4.), (0., 4.)]);
        let q = quadrilateralize(&l).unwrap();
        assert_eq!(q.quads.len(), 2);
        let area: f64 = q
            .quads
            .iter()
            .map(|x| SimplePolygon::from_derived(x.iter().map(|&v| l.vertex(v)).collect()).unwrap().area())
            .sum();
        assert!((area - 12.0).abs() < 1e-9);
        let (g, left) = quad_group(&q).unwrap();
        assert_eq!((g.len(), g[0].q, left), (1, 2, None));
    }

    #[test]
    fn staircase_is_a_path() {
        let s = poly(&[(0., 0.), (3., 0.), (3., 1.), (2., 1.), (2., 2.), (1., 2.), (1., 3.), (0., 3.)]);
        let q = quadrilateralize(&s).unwrap();
        assert_eq!(q.quads.len(), 3);
        let t = quad_dual_tree(&q);
        assert!(t.is_tree());
        assert!(path_order(&t).is_some());
    }

    #[test]
    fn counting_forms() {
        // n3 odd without a leftover: the paper's form is one short
        let c = QuadCounts::new(3, &[3], 0);
        assert!(c.quad_sum_holds && c.exact_form_holds);
        assert!(!c.paper_form_holds);
        let c = QuadCounts::new(8, &[3, 3, 2], 0);
        assert!(c.quad_sum_holds && c.exact_form_holds && c.paper_form_holds && c.hypothesis);
        assert_eq!(c.half, 4);
    }

    #[test]
    fn supplied_quads_are_checked() {
        let l = poly(&[(0., 0.), (4., 0.), (4., 2.), (2., 2.), (2., 4.), (0., 4.)]);
        assert!(accept_quads(&l, &[[0, 1, 2, 3], [0, 3, 4, 5]]).is_ok());
        assert!(matches!(
            accept_quads(&l, &[[0, 1, 2, 3]]),
            Err(Error::QuadrilateralizationFailed(_))
        ));
        let tri = poly(&[(0., 0.), (1., 0.), (0., 1.)]);
        assert!(matches!(quadrilateralize(&tri), Err(Error::NotOrthogonal(_))));
    }
}
