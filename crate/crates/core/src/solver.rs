//! Exact search over the reverse test-set graph.
//!
//! The search starts at the optimum `β` of the linear relaxation and walks
//! uphill along reversed test-set moves. Every reverse step strictly increases
//! the cost-induced order, so reliable points are met in non-decreasing order
//! of cost along any path, and a path can be cut as soon as it hits a reliable
//! point or passes the incumbent.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RapError, Result};
use crate::greedy::greedy_feasible;
use crate::model::{normalize, Configuration, Instance, NormalizedInstance, SeriesParallel};
use crate::testset::{build_test_set, TestSet};

/// Frontier discipline of the walk-back search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// FIFO frontier, exhaustive expansion with incumbent pruning.
    Paper,
    /// Frontier ordered by the cost-induced order; stops at the first reliable point.
    #[default]
    BestFirst,
}

impl FromStr for Strategy {
    type Err = RapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Strategy::Paper),
            "bestfirst" => Ok(Strategy::BestFirst),
            other => Err(RapError::Parse(format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Paper => "paper",
            Strategy::BestFirst => "bestfirst",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: Strategy,
    /// Worker threads for node expansion; `0` or `1` runs single-threaded.
    pub parallel: usize,
    /// Return the first reliable point found instead of proving optimality.
    pub early_stop: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { strategy: Strategy::BestFirst, parallel: 1, early_stop: false }
    }
}

impl SolveOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SolveOptions { strategy, ..Default::default() }
    }
}

/// Result of a solve, in original coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub optimum: Vec<Vec<i64>>,
    pub opt_cost: i64,
    pub opt_reliability: f64,
    pub nodes_generated: u64,
    pub nodes_expanded: u64,
    pub nodes_pruned_bound: u64,
    pub nodes_pruned_duplicate: u64,
    pub greedy_cost: i64,
    /// Seconds spent in the walk-back search.
    pub wall_time: f64,
}

/// Order checks gathered during a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchDiagnostics {
    /// Nodes pushed onto the frontier.
    pub insertions: u64,
    /// Pushed nodes that were not strictly above their parent in the cost order.
    pub order_violations: u64,
    /// Best-first dequeues that came out below the previous dequeue.
    pub dequeue_violations: u64,
}

/// `a ≺_c b`: lower cost, or equal cost and lexicographically smaller.
pub fn less_c(a: &Configuration, b: &Configuration, c: &[i64]) -> Result<bool> {
    for v in [a, b] {
        if v.len() != c.len() {
            return Err(RapError::ShapeMismatch { expected: c.len(), found: v.len() });
        }
    }
    let cost = |x: &Configuration| crate::model::dot(c, x.values());
    Ok((cost(a), a) < (cost(b), b))
}

/// The ≺_c-minimal point of the linear relaxation: one unit of the cheapest
/// available component per subsystem, equal costs resolved to the highest index.
/// Subsystems already populated by their lower bounds stay at zero.
pub fn lrp_optimum(ninst: &NormalizedInstance) -> Result<Configuration> {
    let c0 = ninst.budget()?;
    let shape = ninst.shape();
    let (c, u) = (ninst.costs(), ninst.upper());
    let mut beta = Configuration::zeros(shape);
    let mut total = 0;
    for i in 0..shape.n() {
        if ninst.min_units()[i] == 0 {
            continue;
        }
        let best = shape
            .range(i)
            .filter(|&f| u[f] > 0)
            .min_by_key(|&f| (c[f], Reverse(f)))
            .ok_or(RapError::EmptySubsystemBound { subsystem: i + 1 })?;
        beta.values_mut()[best] = 1;
        total += c[best];
    }
    if total > c0 {
        return Err(RapError::BudgetTooSmall { required: total, budget: c0 });
    }
    Ok(beta)
}

/// Normalized instance with its budget, greedy point and test set.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub ninst: NormalizedInstance,
    pub y0: Configuration,
    pub testset: TestSet,
}

/// Normalizes, runs the greedy heuristic, records `c0` and builds the test set.
pub fn prepare(inst: &Instance) -> Result<Prepared> {
    let mut ninst = normalize(inst);
    let y0 = greedy_feasible(&ninst)?;
    ninst.set_budget(ninst.cost(&y0)?);
    let testset = build_test_set(&ninst)?;
    Ok(Prepared { ninst, y0, testset })
}

/// Full pipeline: prepare and walk back.
pub fn solve(inst: &Instance, options: &SolveOptions) -> Result<SolveReport> {
    let p = prepare(inst)?;
    walk_back(&p.ninst, &p.testset, &p.y0, options)
}

pub fn walk_back(
    ninst: &NormalizedInstance,
    testset: &TestSet,
    y0: &Configuration,
    options: &SolveOptions,
) -> Result<SolveReport> {
    walk_back_detailed(ninst, testset, y0, options).map(|(r, _)| r)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Node {
    cost: i64,
    x: Vec<i64>,
}

struct Candidate {
    node: Node,
    reliable: bool,
}

enum Frontier {
    Fifo(VecDeque<Node>),
    Heap(BinaryHeap<Reverse<Node>>),
}

impl Frontier {
    fn push(&mut self, node: Node) {
        match self {
            Frontier::Fifo(q) => q.push_back(node),
            Frontier::Heap(h) => h.push(Reverse(node)),
        }
    }

    fn pop(&mut self) -> Option<Node> {
        match self {
            Frontier::Fifo(q) => q.pop_front(),
            Frontier::Heap(h) => h.pop().map(|Reverse(n)| n),
        }
    }

    fn peek(&self) -> Option<&Node> {
        match self {
            Frontier::Fifo(q) => q.front(),
            Frontier::Heap(h) => h.peek().map(|Reverse(n)| n),
        }
    }
}

#[derive(Default)]
struct Counters {
    generated: u64,
    expanded: u64,
    pruned_bound: u64,
    pruned_duplicate: u64,
}

fn bump(counter: &mut u64) -> Result<()> {
    *counter = counter.checked_add(1).ok_or(RapError::CounterOverflow)?;
    Ok(())
}

/// Walk-back search that also returns order diagnostics.
pub fn walk_back_detailed(
    ninst: &NormalizedInstance,
    testset: &TestSet,
    y0: &Configuration,
    options: &SolveOptions,
) -> Result<(SolveReport, SearchDiagnostics)> {
    let started = Instant::now();
    let r0 = ninst.r0();
    let c0 = ninst.budget()?;
    let beta = lrp_optimum(ninst)?;
    if !ninst.is_reliable(y0, r0)? {
        return Err(RapError::InvalidInstance("starting point is not reliable".into()));
    }

    let mut counters = Counters::default();
    let mut diag = SearchDiagnostics::default();
    let mut incumbent = Node { cost: ninst.cost(y0)?, x: y0.values().to_vec() };

    if ninst.is_reliable(&beta, r0)? {
        incumbent = Node { cost: ninst.cost(&beta)?, x: beta.into_values() };
        return finish(ninst, incumbent, counters, diag, started);
    }

    let mut visited: HashSet<Vec<i64>> = HashSet::new();
    let root = Node { cost: ninst.cost(&beta)?, x: beta.into_values() };
    visited.insert(root.x.clone());
    let mut frontier = match options.strategy {
        Strategy::Paper => Frontier::Fifo(VecDeque::new()),
        Strategy::BestFirst => Frontier::Heap(BinaryHeap::new()),
    };
    frontier.push(root);

    let pool = if options.parallel > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.parallel)
                .build()
                .map_err(|e| RapError::Io(e.to_string()))?,
        )
    } else {
        None
    };
    let batch_size = options.parallel.max(1) * 8;
    let best_first = options.strategy == Strategy::BestFirst;

    let expand = |alpha: &Node| -> Vec<Candidate> {
        testset
            .moves()
            .iter()
            .filter_map(|g| g.reverse_step(ninst, &alpha.x, alpha.cost, c0))
            .map(|(x, cost)| {
                let reliable = ninst.reliability_of(&x) >= r0;
                Candidate { node: Node { cost, x }, reliable }
            })
            .collect()
    };

    let mut last_dequeued: Option<Node> = None;
    'search: loop {
        let mut batch = Vec::new();
        while batch.len() < if pool.is_some() { batch_size } else { 1 } {
            // the heap top is the smallest open node; once it is above the
            // incumbent nothing left can improve on it
            if best_first && frontier.peek().is_some_and(|top| incumbent < *top) {
                break;
            }
            let Some(alpha) = frontier.pop() else { break };
            if best_first {
                if last_dequeued.as_ref().is_some_and(|prev| alpha < *prev) {
                    bump(&mut diag.dequeue_violations)?;
                }
                last_dequeued = Some(alpha.clone());
            }
            batch.push(alpha);
        }
        if batch.is_empty() {
            break;
        }

        let expansions: Vec<Vec<Candidate>> = match &pool {
            Some(pool) => pool.install(|| batch.par_iter().map(expand).collect()),
            None => batch.iter().map(expand).collect(),
        };

        for (alpha, candidates) in batch.iter().zip(expansions) {
            bump(&mut counters.expanded)?;
            for Candidate { node, reliable } in candidates {
                bump(&mut counters.generated)?;
                if !visited.insert(node.x.clone()) {
                    bump(&mut counters.pruned_duplicate)?;
                    continue;
                }
                if reliable {
                    if node < incumbent {
                        incumbent = node;
                    }
                    if options.early_stop {
                        break 'search;
                    }
                    continue;
                }
                if incumbent < node {
                    bump(&mut counters.pruned_bound)?;
                    continue;
                }
                bump(&mut diag.insertions)?;
                if node <= *alpha {
                    bump(&mut diag.order_violations)?;
                }
                frontier.push(node);
            }
        }
    }

    finish(ninst, incumbent, counters, diag, started)
}

fn finish(
    ninst: &NormalizedInstance,
    best: Node,
    counters: Counters,
    diag: SearchDiagnostics,
    started: Instant,
) -> Result<(SolveReport, SearchDiagnostics)> {
    let wall_time = started.elapsed().as_secs_f64();
    let y = Configuration::new(best.x);
    let x = ninst.denormalize(&y)?;
    let original = ninst.original();
    let report = SolveReport {
        optimum: x.rows(original.shape()),
        opt_cost: original.cost(&x)?,
        opt_reliability: original.reliability(&x)?,
        nodes_generated: counters.generated,
        nodes_expanded: counters.expanded,
        nodes_pruned_bound: counters.pruned_bound,
        nodes_pruned_duplicate: counters.pruned_duplicate,
        greedy_cost: ninst.original_cost(&Configuration::zeros(ninst.shape()))? + ninst.budget()?,
        wall_time,
    };
    Ok((report, diag))
}
