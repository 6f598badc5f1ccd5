//! Greedy construction of a reliable starting point.
//!
//! Starting from the upper-bound configuration, components are stripped in
//! order of decreasing cost per unit of log-unreliability reduction, as long
//! as the system stays reliable and every subsystem keeps a component. The
//! cost of the result is the budget `c0` used to cut the linear relaxation.

use serde::Serialize;

use crate::error::{RapError, Result};
use crate::model::{Configuration, NormalizedInstance, SeriesParallel};

/// Cost per unit of `−ln(1 − r)` for one component type (normalized indices, zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreedyRate {
    pub subsystem: usize,
    pub component: usize,
    pub rate: f64,
}

/// All component types ordered by non-increasing rate, ties in `(i, j)` order.
pub fn rates(ninst: &NormalizedInstance) -> Vec<GreedyRate> {
    let base = ninst.base();
    let shape = base.shape();
    let mut out = Vec::with_capacity(shape.len());
    for i in 0..shape.n() {
        for j in 0..shape.k()[i] {
            let f = shape.index(i, j);
            let rate = base.costs()[f] as f64 / -(1.0 - base.reliabilities()[f]).ln();
            out.push(GreedyRate { subsystem: i, component: j, rate });
        }
    }
    // stable: equal rates keep (i, j) order
    out.sort_by(|a, b| b.rate.total_cmp(&a.rate));
    out
}

/// Runs the greedy heuristic and returns a reliable configuration `y0`.
///
/// The caller records `c0 = cost(y0)` on the instance (see [`crate::solver::prepare`]).
pub fn greedy_feasible(ninst: &NormalizedInstance) -> Result<Configuration> {
    let shape = ninst.shape().clone();
    let r0 = ninst.r0();
    let mut y = ninst.upper().to_vec();

    let need = ninst.min_units();
    let mut sums: Vec<i64> = (0..shape.n()).map(|i| y[shape.range(i)].iter().sum()).collect();
    if let Some(i) = (0..shape.n()).find(|&i| sums[i] < need[i]) {
        return Err(RapError::EmptySubsystemBound { subsystem: i + 1 });
    }
    let mut factors: Vec<f64> = (0..shape.n()).map(|i| ninst.subsystem_reliability(i, &y)).collect();
    let system = |factors: &[f64]| factors.iter().fold(1.0, |acc, f| acc * f);
    let max_reliability = system(&factors);
    if max_reliability < r0 {
        return Err(RapError::Infeasible { max_reliability, required: r0 });
    }

    for GreedyRate { subsystem: i, component: j, .. } in rates(ninst) {
        let f = shape.index(i, j);
        let mut reliable = true;
        let mut non_empty = true;
        while reliable && non_empty && y[f] > 0 {
            let saved = factors[i];
            y[f] -= 1;
            sums[i] -= 1;
            if sums[i] < need[i] {
                non_empty = false;
            }
            factors[i] = ninst.subsystem_reliability(i, &y);
            if system(&factors) < r0 {
                reliable = false;
            }
            if !reliable || !non_empty {
                y[f] += 1;
                sums[i] += 1;
                factors[i] = saved;
            }
        }
    }
    Ok(Configuration::new(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{normalize, Instance};

    fn t1(r0: f64) -> NormalizedInstance {
        normalize(
            &Instance::new(vec![vec![0.9, 0.8]], vec![vec![5, 3]], vec![vec![0, 0]], vec![vec![2, 2]], r0)
                .unwrap(),
        )
    }

    #[test]
    fn t1_rates() {
        let r = rates(&t1(0.97));
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].subsystem, r[0].component), (0, 0));
        assert!((r[0].rate - 2.1715).abs() < 1e-4);
        assert!((r[1].rate - 1.8641).abs() < 1e-4);
    }

    #[test]
    fn rate_ties_follow_index_order() {
        let inst = Instance::new(
            vec![vec![0.9], vec![0.9]],
            vec![vec![4], vec![4]],
            vec![vec![0], vec![0]],
            vec![vec![1], vec![1]],
            0.5,
        )
        .unwrap();
        let r = rates(&normalize(&inst));
        assert_eq!(r[0].subsystem, 0);
        assert_eq!(r[1].subsystem, 1);
    }

    #[test]
    fn single_component_rates() {
        let inst = Instance::new(vec![vec![0.9]], vec![vec![4]], vec![vec![0]], vec![vec![1]], 0.5).unwrap();
        assert_eq!(rates(&normalize(&inst)).len(), 1);
    }

    #[test]
    fn t1_greedy_trace() {
        let n = t1(0.97);
        let y0 = greedy_feasible(&n).unwrap();
        assert_eq!(y0.values(), &[1, 1]);
        assert_eq!(n.cost(&y0).unwrap(), 8);
    }

    #[test]
    fn zero_floor_keeps_one_unit_per_subsystem() {
        let inst = Instance::new(
            vec![vec![0.9, 0.8, 0.7], vec![0.6, 0.95]],
            vec![vec![5, 3, 2], vec![9, 4]],
            vec![vec![0, 0, 0], vec![0, 0]],
            vec![vec![2, 3, 1], vec![4, 2]],
            0.0,
        )
        .unwrap();
        let n = normalize(&inst);
        let y0 = greedy_feasible(&n).unwrap();
        for i in 0..2 {
            assert_eq!(y0.values()[n.shape().range(i)].iter().sum::<i64>(), 1);
        }
    }

    #[test]
    fn infeasible_and_empty_bounds() {
        let n = t1(0.9999);
        assert!(matches!(greedy_feasible(&n), Err(RapError::Infeasible { .. })));
        let inst = Instance::new(
            vec![vec![0.9], vec![0.9, 0.8]],
            vec![vec![1], vec![1, 1]],
            vec![vec![0], vec![0, 0]],
            vec![vec![1], vec![0, 0]],
            0.1,
        )
        .unwrap();
        assert_eq!(greedy_feasible(&normalize(&inst)), Err(RapError::EmptySubsystemBound { subsystem: 2 }));
    }
}
