//! Problem data for series-parallel systems: instances, configurations,
//! reliability and cost evaluation, slack variables and normalization.
//!
//! A configuration is stored as a flat vector of multiplicities laid out
//! subsystem by subsystem (`x_11, .., x_1k1, x_21, .., x_nkn`). [`Shape`]
//! carries the per-subsystem offsets into that vector.

use std::ops::Range;

use crate::error::{RapError, Result};

/// Largest accepted upper bound on a single multiplicity.
pub const MAX_UPPER_BOUND: i64 = 1_000_000;

/// Ragged layout of the decision variables: `k[i]` component types in subsystem `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    k: Vec<usize>,
    offsets: Vec<usize>,
}

impl Shape {
    pub fn new(k: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(k.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &ki in &k {
            acc += ki;
            offsets.push(acc);
        }
        Shape { k, offsets }
    }

    /// Number of subsystems.
    pub fn n(&self) -> usize {
        self.k.len()
    }

    /// Component types per subsystem.
    pub fn k(&self) -> &[usize] {
        &self.k
    }

    /// Total number of variables `N = Σ k_i`.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index range of subsystem `i`.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Flat index of component `j` in subsystem `i` (both zero-based).
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(j < self.k[i]);
        self.offsets[i] + j
    }

    /// Inverse of [`Shape::index`].
    pub fn locate(&self, flat: usize) -> (usize, usize) {
        let i = self.offsets.partition_point(|&o| o <= flat) - 1;
        (i, flat - self.offsets[i])
    }

    /// Splits a flat vector into one row per subsystem.
    pub fn to_rows<T: Clone>(&self, flat: &[T]) -> Vec<Vec<T>> {
        (0..self.n()).map(|i| flat[self.range(i)].to_vec()).collect()
    }

    fn check(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(RapError::ShapeMismatch { expected: self.len(), found });
        }
        Ok(())
    }
}

/// Multiplicity vector `x`, one entry per component type, flat layout.
///
/// Ordering (`Ord`) is the lexicographic order over the flat variable order,
/// which is the tie-break of the cost-induced order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<i64>);

impl Configuration {
    pub fn new(values: Vec<i64>) -> Self {
        Configuration(values)
    }

    pub fn zeros(shape: &Shape) -> Self {
        Configuration(vec![0; shape.len()])
    }

    /// Builds a configuration from ragged rows, checking them against `shape`.
    pub fn from_rows(shape: &Shape, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.len() != shape.n() || rows.iter().zip(shape.k()).any(|(r, &k)| r.len() != k) {
            return Err(RapError::ShapeMismatch {
                expected: shape.len(),
                found: rows.iter().map(Vec::len).sum(),
            });
        }
        Ok(Configuration(rows.concat()))
    }

    pub fn rows(&self, shape: &Shape) -> Vec<Vec<i64>> {
        shape.to_rows(&self.0)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0)
    }
}

impl From<Vec<i64>> for Configuration {
    fn from(values: Vec<i64>) -> Self {
        Configuration(values)
    }
}

/// Slack variables of the equality form of the linear relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackVector {
    /// `d_i = Σ_j x_ij − m_i`, with `m_i` from [`NormalizedInstance::min_units`].
    pub d: Vec<i64>,
    /// `t_ij = u_ij − x_ij`, flat layout.
    pub t: Vec<i64>,
    /// `b = c0 − Σ c_ij x_ij`
    pub b: i64,
}

impl SlackVector {
    pub fn is_feasible(&self) -> bool {
        self.b >= 0 && self.d.iter().all(|&v| v >= 0) && self.t.iter().all(|&v| v >= 0)
    }

    /// Recovers `x` from the upper-bound slacks: `x = u − t`.
    pub fn reconstruct(&self, ninst: &NormalizedInstance) -> Configuration {
        let u = ninst.base().upper();
        Configuration(u.iter().zip(&self.t).map(|(u, t)| u - t).collect())
    }
}

/// Common evaluation surface for raw and normalized instances.
pub trait SeriesParallel {
    fn shape(&self) -> &Shape;

    /// Flat cost vector.
    fn costs(&self) -> &[i64];

    /// System reliability without shape checks; `x.len()` must equal the variable count.
    fn reliability_of(&self, x: &[i64]) -> f64;

    /// System reliability `Π_i (1 − Π_j (1 − r_ij)^x_ij)`.
    fn reliability(&self, x: &Configuration) -> Result<f64> {
        self.shape().check(x.len())?;
        Ok(self.reliability_of(x.values()))
    }

    /// `reliability(x) >= r0`, compared exactly.
    fn is_reliable(&self, x: &Configuration, r0: f64) -> Result<bool> {
        Ok(self.reliability(x)? >= r0)
    }

    fn cost(&self, x: &Configuration) -> Result<i64> {
        self.shape().check(x.len())?;
        Ok(dot(self.costs(), x.values()))
    }
}

pub(crate) fn dot(c: &[i64], x: &[i64]) -> i64 {
    c.iter().zip(x).map(|(c, x)| c * x).sum()
}

/// Raw problem data.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    shape: Shape,
    r: Vec<f64>,
    c: Vec<i64>,
    l: Vec<i64>,
    u: Vec<i64>,
    r0: f64,
    ln_q: Vec<f64>,
}

impl Instance {
    /// Builds and validates an instance from ragged per-subsystem rows.
    pub fn new(
        r: Vec<Vec<f64>>,
        c: Vec<Vec<i64>>,
        l: Vec<Vec<i64>>,
        u: Vec<Vec<i64>>,
        r0: f64,
    ) -> Result<Self> {
        if r.is_empty() {
            return Err(RapError::InvalidInstance("at least one subsystem is required".into()));
        }
        let shape = Shape::new(r.iter().map(Vec::len).collect());
        for (name, lens) in [
            ("c", c.iter().map(Vec::len).collect::<Vec<_>>()),
            ("l", l.iter().map(Vec::len).collect()),
            ("u", u.iter().map(Vec::len).collect()),
        ] {
            if lens != shape.k() {
                return Err(RapError::InvalidInstance(format!(
                    "`{name}` has row lengths {lens:?}, expected {:?}",
                    shape.k()
                )));
            }
        }
        Self::from_flat(shape, r.concat(), c.concat(), l.concat(), u.concat(), r0)
    }

    pub(crate) fn from_flat(
        shape: Shape,
        r: Vec<f64>,
        c: Vec<i64>,
        l: Vec<i64>,
        u: Vec<i64>,
        r0: f64,
    ) -> Result<Self> {
        let bad = |msg: String| Err(RapError::InvalidInstance(msg));
        if let Some(i) = shape.k().iter().position(|&k| k == 0) {
            return bad(format!("subsystem {} has no component types", i + 1));
        }
        if !(0.0..=1.0).contains(&r0) {
            return bad(format!("R0 = {r0} is outside [0, 1]"));
        }
        let mut max_cost: i128 = 0;
        for f in 0..shape.len() {
            let (i, j) = shape.locate(f);
            let at = format!("component ({}, {})", i + 1, j + 1);
            if !(r[f] > 0.0 && r[f] < 1.0) {
                return bad(format!("{at}: reliability {} is not in (0, 1)", r[f]));
            }
            if c[f] < 1 {
                return bad(format!("{at}: cost {} must be a positive integer", c[f]));
            }
            if l[f] < 0 || l[f] > u[f] {
                return bad(format!("{at}: bounds l = {}, u = {} violate 0 <= l <= u", l[f], u[f]));
            }
            if u[f] > MAX_UPPER_BOUND {
                return bad(format!("{at}: upper bound {} exceeds {MAX_UPPER_BOUND}", u[f]));
            }
            max_cost += c[f] as i128 * u[f] as i128;
        }
        if max_cost > (i64::MAX / 4) as i128 {
            return bad("total cost of the upper-bound configuration overflows".into());
        }
        let ln_q = r.iter().map(|&r| (1.0 - r).ln()).collect();
        Ok(Instance { shape, r, c, l, u, r0, ln_q })
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn k(&self) -> &[usize] {
        self.shape.k()
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Same data with a different reliability floor.
    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r0) {
            return Err(RapError::InvalidInstance(format!("R0 = {r0} is outside [0, 1]")));
        }
        Ok(Instance { r0, ..self.clone() })
    }

    /// Flat component reliabilities.
    pub fn reliabilities(&self) -> &[f64] {
        &self.r
    }

    pub fn lower(&self) -> &[i64] {
        &self.l
    }

    pub fn upper(&self) -> &[i64] {
        &self.u
    }

    pub fn r_rows(&self) -> Vec<Vec<f64>> {
        self.shape.to_rows(&self.r)
    }

    pub fn c_rows(&self) -> Vec<Vec<i64>> {
        self.shape.to_rows(&self.c)
    }

    pub fn l_rows(&self) -> Vec<Vec<i64>> {
        self.shape.to_rows(&self.l)
    }

    pub fn u_rows(&self) -> Vec<Vec<i64>> {
        self.shape.to_rows(&self.u)
    }

    /// The configuration with every multiplicity at its upper bound.
    pub fn upper_configuration(&self) -> Configuration {
        Configuration(self.u.clone())
    }
}

/// `1 − exp(Σ count_j · ln(1 − r_j))` for one subsystem.
#[inline]
fn subsystem_factor(log_unrel: f64) -> f64 {
    1.0 - log_unrel.exp()
}

impl SeriesParallel for Instance {
    fn shape(&self) -> &Shape {
        &self.shape
    }

    fn costs(&self) -> &[i64] {
        &self.c
    }

    fn reliability_of(&self, x: &[i64]) -> f64 {
        let mut rel = 1.0;
        for i in 0..self.shape.n() {
            let mut s = 0.0;
            for f in self.shape.range(i) {
                s += x[f] as f64 * self.ln_q[f];
            }
            rel *= subsystem_factor(s);
        }
        rel
    }
}

/// Instance with lower bounds shifted to zero and each subsystem sorted by
/// descending cost (ties by original index).
#[derive(Debug, Clone)]
pub struct NormalizedInstance {
    original: Instance,
    base: Instance,
    /// `perm[i][p]` = original component index of normalized component `p`.
    perm: Vec<Vec<usize>>,
    /// Normalized flat slot of each original flat index.
    slot_of_original: Vec<usize>,
    baseline_unrel: Vec<f64>,
    /// Units each subsystem still needs after the shift: `max(0, 1 − Σ_j l_ij)`.
    min_units: Vec<i64>,
    c0: Option<i64>,
}

/// Shifts lower bounds out and sorts components by descending cost.
pub fn normalize(inst: &Instance) -> NormalizedInstance {
    let shape = inst.shape.clone();
    let mut perm = Vec::with_capacity(shape.n());
    let mut slot_of_original = vec![0; shape.len()];
    let (mut r, mut c, mut u) = (Vec::new(), Vec::new(), Vec::new());
    let mut baseline_unrel = Vec::with_capacity(shape.n());
    let mut min_units = Vec::with_capacity(shape.n());
    for i in 0..shape.n() {
        let range = shape.range(i);
        let mut order: Vec<usize> = (0..shape.k()[i]).collect();
        order.sort_by_key(|&j| std::cmp::Reverse(inst.c[range.start + j]));
        for (p, &j) in order.iter().enumerate() {
            let f = range.start + j;
            slot_of_original[f] = range.start + p;
            r.push(inst.r[f]);
            c.push(inst.c[f]);
            u.push(inst.u[f] - inst.l[f]);
        }
        let s: f64 = range.clone().map(|f| inst.l[f] as f64 * inst.ln_q[f]).sum();
        baseline_unrel.push(s.exp());
        min_units.push((1 - inst.l[range.clone()].iter().sum::<i64>()).max(0));
        perm.push(order);
    }
    let l = vec![0; shape.len()];
    let base = Instance::from_flat(shape, r, c, l, u, inst.r0)
        .expect("normalization preserves instance validity");
    NormalizedInstance {
        original: inst.clone(),
        base,
        perm,
        slot_of_original,
        baseline_unrel,
        min_units,
        c0: None,
    }
}

impl NormalizedInstance {
    /// Shifted and sorted data (`l = 0`).
    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn original(&self) -> &Instance {
        &self.original
    }

    pub fn perm(&self) -> &[Vec<usize>] {
        &self.perm
    }

    /// `Π_j (1 − r_ij)^l_ij` per subsystem.
    pub fn baseline_unrel(&self) -> &[f64] {
        &self.baseline_unrel
    }

    /// Right-hand side of the subsystem rows: 1, or 0 once the lower
    /// bounds alone keep the subsystem non-empty.
    pub fn min_units(&self) -> &[i64] {
        &self.min_units
    }

    pub fn r0(&self) -> f64 {
        self.base.r0
    }

    pub fn upper(&self) -> &[i64] {
        &self.base.u
    }

    pub fn budget(&self) -> Result<i64> {
        self.c0.ok_or(RapError::BudgetUnset)
    }

    pub fn set_budget(&mut self, c0: i64) {
        self.c0 = Some(c0);
    }

    pub fn with_budget(mut self, c0: i64) -> Self {
        self.c0 = Some(c0);
        self
    }

    /// Checks the descending-cost precondition.
    pub fn check_sorted(&self) -> Result<()> {
        for i in 0..self.base.n() {
            let c = &self.base.c[self.base.shape.range(i)];
            if c.windows(2).any(|w| w[0] < w[1]) {
                return Err(RapError::NotNormalized { subsystem: i + 1 });
            }
        }
        Ok(())
    }

    /// Slack variables of `x` with respect to the budget `c0`.
    pub fn slacks(&self, x: &Configuration) -> Result<SlackVector> {
        self.base.shape.check(x.len())?;
        let c0 = self.budget()?;
        let x = x.values();
        let d = (0..self.base.n())
            .map(|i| x[self.base.shape.range(i)].iter().sum::<i64>() - self.min_units[i])
            .collect();
        let t = self.base.u.iter().zip(x).map(|(u, x)| u - x).collect();
        Ok(SlackVector { d, t, b: c0 - dot(&self.base.c, x) })
    }

    /// Non-negative and every slack non-negative.
    pub fn is_lrp_feasible(&self, x: &Configuration) -> Result<bool> {
        Ok(x.is_nonnegative() && self.slacks(x)?.is_feasible())
    }

    /// Maps a normalized configuration back to original coordinates.
    pub fn denormalize(&self, y: &Configuration) -> Result<Configuration> {
        self.base.shape.check(y.len())?;
        let y = y.values();
        Ok(Configuration(
            self.slot_of_original
                .iter()
                .zip(&self.original.l)
                .map(|(&slot, &l)| y[slot] + l)
                .collect(),
        ))
    }

    /// Maps an original configuration into normalized coordinates.
    pub fn normalize_configuration(&self, x: &Configuration) -> Result<Configuration> {
        self.base.shape.check(x.len())?;
        let mut y = vec![0; x.len()];
        for (f, (&slot, &l)) in self.slot_of_original.iter().zip(&self.original.l).enumerate() {
            y[slot] = x.values()[f] - l;
        }
        Ok(Configuration(y))
    }

    /// Reliability factor `1 − Π_j (1 − r_ij)^(y_ij + l_ij)` of subsystem `i`.
    ///
    /// Evaluated through the original component order so that the result is
    /// bit-identical to [`Instance::reliability_of`] on the denormalized point.
    pub fn subsystem_reliability(&self, i: usize, y: &[i64]) -> f64 {
        let orig = &self.original;
        let mut s = 0.0;
        for f in orig.shape.range(i) {
            s += (y[self.slot_of_original[f]] + orig.l[f]) as f64 * orig.ln_q[f];
        }
        subsystem_factor(s)
    }

    #[cfg(test)]
    pub(crate) fn with_reversed_costs(mut self, i: usize) -> Self {
        let range = self.base.shape.range(i);
        self.base.c[range].reverse();
        self
    }

    /// Cost of `y` in original coordinates (adds back `Σ c_ij l_ij`).
    pub fn original_cost(&self, y: &Configuration) -> Result<i64> {
        Ok(self.cost(y)? + dot(&self.original.c, &self.original.l))
    }
}

impl SeriesParallel for NormalizedInstance {
    fn shape(&self) -> &Shape {
        &self.base.shape
    }

    fn costs(&self) -> &[i64] {
        &self.base.c
    }

    fn reliability_of(&self, y: &[i64]) -> f64 {
        let mut rel = 1.0;
        for i in 0..self.original.shape.n() {
            rel *= self.subsystem_reliability(i, y);
        }
        rel
    }
}
