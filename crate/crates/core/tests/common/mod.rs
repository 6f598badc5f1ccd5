#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rap_core::oracle::ENUMERATION_LIMIT;
use rap_core::{Instance, SeriesParallel};

/// Bounds for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct SmallSpec {
    pub max_n: usize,
    pub max_k: usize,
    pub max_u: i64,
    pub cmax: i64,
    pub rmin: f64,
    pub rmax: f64,
    /// Fraction of `R(u)` used as the floor.
    pub floor: f64,
}

pub const ORACLE_SUITE: SmallSpec =
    SmallSpec { max_n: 4, max_k: 3, max_u: 3, cmax: 20, rmin: 0.6, rmax: 0.99, floor: 0.9 };

pub const TESTSET_SUITE: SmallSpec =
    SmallSpec { max_n: 3, max_k: 3, max_u: 2, cmax: 20, rmin: 0.6, rmax: 0.99, floor: 0.9 };

fn box_size(inst: &Instance) -> u128 {
    inst.upper().iter().zip(inst.lower()).map(|(u, l)| (u - l + 1) as u128).product()
}

/// Random instance with `n ≤ max_n`, `k_i ≤ max_k`, `u_ij ≤ max_u`, integer
/// costs in `[1, cmax]` and `R0 = floor · R(u)`. Instances whose box exceeds
/// the oracle's enumeration limit are redrawn.
pub fn random_instance(spec: &SmallSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(1..=spec.max_n);
        let mut r = Vec::new();
        let mut c = Vec::new();
        let mut u = Vec::new();
        for _ in 0..n {
            let k = rng.gen_range(1..=spec.max_k);
            r.push((0..k).map(|_| rng.gen_range(spec.rmin..=spec.rmax)).collect::<Vec<f64>>());
            c.push((0..k).map(|_| rng.gen_range(1..=spec.cmax)).collect::<Vec<i64>>());
            let mut ui: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=spec.max_u)).collect();
            if ui.iter().all(|&v| v == 0) {
                let j = rng.gen_range(0..k);
                ui[j] = rng.gen_range(1..=spec.max_u);
            }
            u.push(ui);
        }
        let l = u.iter().map(|row| vec![0; row.len()]).collect();
        let inst = Instance::new(r, c, l, u, 0.5).unwrap();
        if box_size(&inst) > ENUMERATION_LIMIT {
            continue;
        }
        let top = inst.reliability(&inst.upper_configuration()).unwrap();
        return inst.with_r0(spec.floor * top).unwrap();
    }
}

/// Exact optimum cost by dynamic programming over the budget.
///
/// Each subsystem is enumerated on its own; `best[b]` holds the largest
/// reliability reachable with total cost at most `b`. Reliability factors are
/// computed with direct powers, independently of the library's log-domain code.
pub fn dp_optimum_cost(inst: &Instance) -> Option<i64> {
    let shape = inst.shape();
    let (r, c, l, u) = (inst.reliabilities(), inst.costs(), inst.lower(), inst.upper());
    let budget: i64 = c.iter().zip(u).map(|(c, u)| c * u).sum();
    let width = budget as usize + 1;
    let mut best = vec![1.0f64; width];
    for i in 0..shape.n() {
        let range = shape.range(i);
        let mut choices: Vec<(usize, f64)> = Vec::new();
        let mut x: Vec<i64> = l[range.clone()].to_vec();
        loop {
            if x.iter().sum::<i64>() >= 1 {
                let mut q = 1.0;
                let mut cost = 0;
                for (j, f) in range.clone().enumerate() {
                    q *= (1.0 - r[f]).powi(x[j] as i32);
                    cost += c[f] * x[j];
                }
                choices.push((cost as usize, 1.0 - q));
            }
            let mut pos = x.len();
            let done = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                if x[pos] < u[range.start + pos] {
                    x[pos] += 1;
                    break false;
                }
                x[pos] = l[range.start + pos];
            };
            if done {
                break;
            }
        }
        let mut next = vec![0.0f64; width];
        for b in 0..width {
            for &(cost, f) in &choices {
                if cost <= b {
                    next[b] = next[b].max(best[b - cost] * f);
                }
            }
        }
        best = next;
    }
    best.iter().position(|&v| v >= inst.r0()).map(|b| b as i64)
}
