//! Brute-force ground truth for small instances.

use serde::{Deserialize, Serialize};

use crate::error::{RapError, Result};
use crate::model::{Configuration, Instance, NormalizedInstance, SeriesParallel, Shape};
use crate::testset::TestSet;

/// Largest number of lattice points the oracle will enumerate.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub optimum: Option<Vec<Vec<i64>>>,
    pub opt_cost: Option<i64>,
    /// Reliable, bounded, non-empty points seen during enumeration.
    pub feasible_count: u64,
}

fn box_size(lower: &[i64], upper: &[i64]) -> u128 {
    lower.iter().zip(upper).fold(1u128, |acc, (l, u)| acc.saturating_mul((u - l + 1) as u128))
}

fn guard(lower: &[i64], upper: &[i64]) -> Result<()> {
    let size = box_size(lower, upper);
    if size > ENUMERATION_LIMIT {
        return Err(RapError::EnumerationTooLarge { size, limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

/// Row-major enumeration of every integer point in `[lower, upper]`.
fn for_each_point(lower: &[i64], upper: &[i64], mut visit: impl FnMut(&[i64])) {
    let mut x = lower.to_vec();
    loop {
        visit(&x);
        let mut pos = x.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if x[pos] < upper[pos] {
                x[pos] += 1;
                break;
            }
            x[pos] = lower[pos];
        }
    }
}

fn subsystems_non_empty(shape: &Shape, x: &[i64]) -> bool {
    (0..shape.n()).all(|i| x[shape.range(i)].iter().sum::<i64>() >= 1)
}

/// Enumerates every bounded configuration and returns the cheapest reliable one
/// (ties broken lexicographically in the instance's own variable order).
pub fn brute_force_optimum(inst: &Instance) -> Result<OracleResult> {
    let (lower, upper) = (inst.lower(), inst.upper());
    guard(lower, upper)?;
    let shape = inst.shape();
    let costs = inst.costs();
    let r0 = inst.r0();
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut feasible_count = 0u64;
    for_each_point(lower, upper, |x| {
        if !subsystems_non_empty(shape, x) || inst.reliability_of(x) < r0 {
            return;
        }
        feasible_count += 1;
        let cost: i64 = costs.iter().zip(x).map(|(c, v)| c * v).sum();
        let better = match &best {
            None => true,
            Some((bc, bx)) => cost < *bc || (cost == *bc && x < bx.as_slice()),
        };
        if better {
            best = Some((cost, x.to_vec()));
        }
    });
    Ok(match best {
        Some((cost, x)) => OracleResult {
            status: OracleStatus::Optimal,
            optimum: Some(shape.to_rows(&x)),
            opt_cost: Some(cost),
            feasible_count,
        },
        None => OracleResult { status: OracleStatus::Infeasible, optimum: None, opt_cost: None, feasible_count },
    })
}

/// Checks the defining property of a test set on the budget-cut fiber of `ninst`.
///
/// Every LRP-feasible point other than the minimum must admit a move `g` with
/// `α − g` feasible and smaller in the cost order; the minimum must admit none.
pub fn brute_force_testset_property(ninst: &NormalizedInstance, testset: &TestSet) -> Result<bool> {
    let upper = ninst.upper();
    let lower = vec![0; upper.len()];
    guard(&lower, upper)?;
    ninst.budget()?;
    let costs = ninst.costs();
    let key = |x: &Configuration| (costs.iter().zip(x.values()).map(|(c, v)| c * v).sum::<i64>(), x.clone());

    let mut feasible = Vec::new();
    let mut error = None;
    for_each_point(&lower, upper, |x| {
        let x = Configuration::new(x.to_vec());
        match ninst.is_lrp_feasible(&x) {
            Ok(true) => feasible.push(x),
            Ok(false) => {}
            Err(e) => error = Some(e),
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    let Some(minimum) = feasible.iter().min_by_key(|x| key(x)).cloned() else {
        return Ok(true);
    };

    for alpha in &feasible {
        let alpha_key = key(alpha);
        let mut improving = false;
        for g in testset.moves() {
            let next = g.apply_forward(alpha);
            if ninst.is_lrp_feasible(&next)? && key(&next) < alpha_key {
                improving = true;
                break;
            }
        }
        if *alpha == minimum {
            // nothing below the minimum may be reachable either
            for g in testset.moves() {
                if ninst.is_lrp_feasible(&g.apply_forward(alpha))? {
                    return Ok(false);
                }
            }
        } else if !improving {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::normalize;
    use crate::testset::build_test_set;

    fn t1(r0: f64) -> Instance {
        Instance::new(vec![vec![0.9, 0.8]], vec![vec![5, 3]], vec![vec![0, 0]], vec![vec![2, 2]], r0).unwrap()
    }

    #[test]
    fn t1_optimum() {
        let r = brute_force_optimum(&t1(0.97)).unwrap();
        assert_eq!(r.status, OracleStatus::Optimal);
        assert_eq!(r.optimum, Some(vec![vec![1, 1]]));
        assert_eq!(r.opt_cost, Some(8));
    }

    #[test]
    fn infeasible_marker() {
        let r = brute_force_optimum(&t1(0.9999)).unwrap();
        assert_eq!(r.status, OracleStatus::Infeasible);
        assert_eq!(r.opt_cost, None);
        assert_eq!(r.feasible_count, 0);
    }

    #[test]
    fn zero_floor_picks_one_cheapest_unit_per_subsystem() {
        let inst = Instance::new(
            vec![vec![0.9, 0.8], vec![0.7, 0.6, 0.5]],
            vec![vec![5, 3], vec![4, 2, 6]],
            vec![vec![0, 0], vec![0, 0, 0]],
            vec![vec![2, 2], vec![1, 1, 1]],
            0.0,
        )
        .unwrap();
        let r = brute_force_optimum(&inst).unwrap();
        assert_eq!(r.optimum, Some(vec![vec![0, 1], vec![0, 1, 0]]));
        assert_eq!(r.opt_cost, Some(5));
    }

    #[test]
    fn zero_width_ranges_enumerate() {
        let inst = Instance::new(
            vec![vec![0.9, 0.8]],
            vec![vec![5, 3]],
            vec![vec![0, 0]],
            vec![vec![0, 3]],
            0.99,
        )
        .unwrap();
        let r = brute_force_optimum(&inst).unwrap();
        assert_eq!(r.optimum, Some(vec![vec![0, 3]]));
        assert_eq!(r.feasible_count, 1);
    }

    #[test]
    fn enumeration_guard() {
        let inst = Instance::new(vec![vec![0.9; 8]], vec![vec![1; 8]], vec![vec![0; 8]], vec![vec![10; 8]], 0.5)
            .unwrap();
        assert!(matches!(brute_force_optimum(&inst), Err(RapError::EnumerationTooLarge { .. })));
    }

    #[test]
    fn t1_testset_property_and_mutation() {
        let n = normalize(&t1(0.97)).with_budget(8);
        let g = build_test_set(&n).unwrap();
        assert!(brute_force_testset_property(&n, &g).unwrap());
        // without RemoveOne(1,2) the point (0,2) has no improving move
        assert!(!brute_force_testset_property(&n, &g.without(1)).unwrap());
    }

    #[test]
    fn single_type_subsystems_need_only_removals() {
        let inst = Instance::new(
            vec![vec![0.9], vec![0.8], vec![0.7]],
            vec![vec![3], vec![2], vec![5]],
            vec![vec![0], vec![0], vec![0]],
            vec![vec![3], vec![2], vec![2]],
            0.5,
        )
        .unwrap();
        let n = normalize(&inst).with_budget(100);
        let g = build_test_set(&n).unwrap();
        assert_eq!(g.len(), 3);
        assert!(brute_force_testset_property(&n, &g).unwrap());
    }
}
