use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Min-max radius program: minimise `max_i d_i / r_i` subject to
/// `r_i <= caps[i]` and `r_j + r_k <= c` for every pair cap `(j, k, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedProblem {
    pub lengths: Vec<f64>,
    pub caps: Vec<f64>,
    pub pair_caps: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedBound {
    pub v_star: f64,
    /// `v_star / v_e`; independent of the intruder speed.
    pub ratio: f64,
    pub radii: Vec<f64>,
    pub active_constraints: Vec<String>,
}

impl SpeedProblem {
    /// Radii `d_i / kappa` satisfy every cap.
    pub fn feasible(&self, kappa: f64) -> bool {
        let r = |i: usize| self.lengths[i] / kappa;
        (0..self.lengths.len()).all(|i| r(i) <= self.caps[i])
            && self.pair_caps.iter().all(|&(j, k, c)| r(j) + r(k) <= c)
    }
}

/// Bisection on the speed ratio. A zero-length road map needs no speed.
pub fn speed_bound(p: &SpeedProblem, v_e: f64) -> Result<SpeedBound> {
    if p.caps.len() != p.lengths.len() {
        return Err(Error::Infeasible("one cap per segment is required".into()));
    }
    if !(v_e >= 0.0 && v_e.is_finite()) {
        return Err(Error::Infeasible(format!("intruder speed {v_e} is invalid")));
    }
    let active: Vec<usize> = (0..p.lengths.len()).filter(|&i| p.lengths[i] > 0.0).collect();
    if active.is_empty() {
        return Ok(SpeedBound {
            v_star: 0.0,
            ratio: 0.0,
            radii: p.caps.clone(),
            active_constraints: vec![],
        });
    }
    for &i in &active {
        if !(p.caps[i] > 0.0) {
            return Err(Error::Infeasible(format!("segment {i} has no room for a zone")));
        }
    }
    for &(j, k, c) in &p.pair_caps {
        if !(c > 0.0) && (p.lengths[j] > 0.0 || p.lengths[k] > 0.0) {
            return Err(Error::Infeasible(format!("segments {j} and {k} touch")));
        }
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !p.feasible(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Infeasible("no finite speed satisfies the caps".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let kappa = hi;
    let radii: Vec<f64> = p
        .lengths
        .iter()
        .zip(&p.caps)
        .map(|(&d, &c)| if d > 0.0 { d / kappa } else { c })
        .collect();
    let tight = |used: f64, cap: f64| cap - used <= 1e-9 * cap.abs().max(1.0);
    let mut active_constraints = Vec::new();
    for &i in &active {
        if tight(radii[i], p.caps[i]) {
            active_constraints.push(format!("r{} <= {}", i + 1, p.caps[i]));
        }
    }
    for &(j, k, c) in &p.pair_caps {
        if p.lengths[j] > 0.0 && p.lengths[k] > 0.0 && tight(radii[j] + radii[k], c) {
            active_constraints.push(format!("r{} + r{} <= {}", j + 1, k + 1, c));
        }
    }
    Ok(SpeedBound {
        v_star: kappa * v_e,
        ratio: kappa,
        radii,
        active_constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_segment() {
        let p = SpeedProblem {
            lengths: vec![2.0],
            caps: vec![1.0],
            pair_caps: vec![],
        };
        let b = speed_bound(&p, 1.0).unwrap();
        assert!((b.v_star - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_segments_with_a_shared_cap() {
        let p = SpeedProblem {
            lengths: vec![3.0, 4.0],
            caps: vec![2.0, 3.0],
            pair_caps: vec![(0, 1, 4.0)],
        };
        let b = speed_bound(&p, 1.0).unwrap();
        assert!((b.v_star - 1.75).abs() < 1e-12);
        assert!((b.radii[0] - 12.0 / 7.0).abs() < 1e-12);
        assert_eq!(b.active_constraints, vec!["r1 + r2 <= 4".to_string()]);
        assert_eq!(speed_bound(&p, 2.0).unwrap().v_star, 2.0 * b.v_star);
    }

    #[test]
    fn zero_length_and_degenerate_caps() {
        let z = SpeedProblem {
            lengths: vec![0.0],
            caps: vec![1.0],
            pair_caps: vec![],
        };
        assert_eq!(speed_bound(&z, 1.0).unwrap().v_star, 0.0);
        let bad = SpeedProblem {
            lengths: vec![1.0],
            caps: vec![0.0],
            pair_caps: vec![],
        };
        assert!(matches!(speed_bound(&bad, 1.0), Err(Error::Infeasible(_))));
    }
}
