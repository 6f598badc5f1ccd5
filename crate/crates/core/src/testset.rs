//! Closed-form test set of the budget-cut linear relaxation.
//!
//! With variables `z = (x, d, t, b)` and every subsystem sorted by
//! descending cost, the reduced Gröbner basis of the toric ideal of the
//! constraint matrix consists of two binomial families:
//!
//! * `x_ik d_i − t_ik b^c_ik` for every component type, and
//! * `x_iq t_ip − x_ip t_iq b^(c_iq − c_ip)` for every pair `q < p` of one subsystem.
//!
//! Each binomial becomes a [`TestMove`]: the exponent difference of its two
//! monomials. Subtracting a move from a feasible point walks downhill in the
//! cost order; adding it walks uphill, which is what the walk-back search does.

use std::fmt;

use crate::error::{RapError, Result};
use crate::model::{Configuration, NormalizedInstance, SeriesParallel, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Drop one unit of component `component` from `subsystem`.
    RemoveOne { subsystem: usize, component: usize },
    /// Replace one unit of the pricier `pricier` by the cheaper `cheaper` (`pricier < cheaper`).
    SwapDown { subsystem: usize, pricier: usize, cheaper: usize },
}

/// One element of the test set. Indices are zero-based and normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TestMove {
    kind: MoveKind,
    /// Flat index whose x-coordinate is `+1` in the move.
    plus: usize,
    /// Flat index whose x-coordinate is `−1` (swap moves only).
    minus: Option<usize>,
    /// Budget-slack exponent: the move's `b` coordinate is `−budget_exponent`.
    budget_exponent: i64,
}

impl TestMove {
    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    pub fn budget_exponent(&self) -> i64 {
        self.budget_exponent
    }

    /// Nonzero x-coordinates of the move as `(flat index, delta)`.
    pub fn x_delta(&self) -> Vec<(usize, i64)> {
        let mut out = vec![(self.plus, 1)];
        if let Some(m) = self.minus {
            out.push((m, -1));
        }
        out
    }

    /// Full lattice vector over `(x, d, t, b)`, length `2N + n + 1`.
    pub fn lattice_vector(&self, shape: &Shape) -> Vec<i64> {
        let (nv, ns) = (shape.len(), shape.n());
        let mut g = vec![0; 2 * nv + ns + 1];
        let (t_off, b_idx) = (nv + ns, 2 * nv + ns);
        g[self.plus] += 1;
        g[t_off + self.plus] -= 1;
        match self.kind {
            MoveKind::RemoveOne { subsystem, .. } => g[nv + subsystem] += 1,
            MoveKind::SwapDown { .. } => {
                let m = self.minus.expect("swap move has a minus index");
                g[m] -= 1;
                g[t_off + m] += 1;
            }
        }
        g[b_idx] = -self.budget_exponent;
        g
    }

    /// `x − g` on the x-coordinates. May produce negative entries.
    pub fn apply_forward(&self, x: &Configuration) -> Configuration {
        let mut y = x.clone();
        let v = y.values_mut();
        v[self.plus] -= 1;
        if let Some(m) = self.minus {
            v[m] += 1;
        }
        y
    }

    /// `x + g` on the x-coordinates. May produce negative entries.
    pub fn apply_reverse(&self, x: &Configuration) -> Configuration {
        let mut y = x.clone();
        let v = y.values_mut();
        v[self.plus] += 1;
        if let Some(m) = self.minus {
            v[m] -= 1;
        }
        y
    }

    /// Reverse step from an LRP-feasible point `x` of cost `cost`.
    ///
    /// Returns the successor and its cost when it is LRP-feasible. Only the
    /// slacks touched by the move are checked: `x + g` keeps every subsystem
    /// sum at least as large, so `d` cannot turn negative.
    pub fn reverse_step(&self, ninst: &NormalizedInstance, x: &[i64], cost: i64, c0: i64) -> Option<(Vec<i64>, i64)> {
        let upper = ninst.upper();
        if x[self.plus] >= upper[self.plus] {
            return None;
        }
        if let Some(m) = self.minus {
            if x[m] <= 0 {
                return None;
            }
        }
        let next_cost = cost + self.budget_exponent;
        if next_cost > c0 {
            return None;
        }
        let mut w = x.to_vec();
        w[self.plus] += 1;
        if let Some(m) = self.minus {
            w[m] -= 1;
        }
        Some((w, next_cost))
    }
}

impl fmt::Display for TestMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::RemoveOne { subsystem, component } => {
                write!(f, "RemoveOne i={} k={}", subsystem + 1, component + 1)?
            }
            MoveKind::SwapDown { subsystem, pricier, cheaper } => {
                write!(f, "SwapDown i={} q={} p={}", subsystem + 1, pricier + 1, cheaper + 1)?
            }
        }
        let delta: Vec<String> = self.x_delta().iter().map(|(idx, d)| format!("x[{idx}]{d:+}")).collect();
        write!(f, " delta=[{}] b^{}", delta.join(","), self.budget_exponent)
    }
}

/// The closed-form test set for one normalized instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSet {
    moves: Vec<TestMove>,
}

impl TestSet {
    pub fn from_moves(moves: Vec<TestMove>) -> Self {
        TestSet { moves }
    }

    pub fn moves(&self) -> &[TestMove] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Text dump, one move per line.
    pub fn dump(&self) -> String {
        self.moves.iter().map(|m| format!("{m}\n")).collect()
    }

    /// Copy of the set without the move at `index`.
    pub fn without(&self, index: usize) -> Self {
        let mut moves = self.moves.clone();
        moves.remove(index);
        TestSet { moves }
    }
}

/// Builds the `Σ_i (k_i + k_i(k_i − 1)/2)` moves: every `RemoveOne` in `(i, k)`
/// order, then every `SwapDown` in `(i, q, p)` order.
pub fn build_test_set(ninst: &NormalizedInstance) -> Result<TestSet> {
    ninst.check_sorted()?;
    let shape = ninst.shape();
    let c = ninst.costs();
    let mut moves = Vec::new();
    for i in 0..shape.n() {
        for k in 0..shape.k()[i] {
            let f = shape.index(i, k);
            moves.push(TestMove {
                kind: MoveKind::RemoveOne { subsystem: i, component: k },
                plus: f,
                minus: None,
                budget_exponent: c[f],
            });
        }
    }
    for i in 0..shape.n() {
        for q in 0..shape.k()[i] {
            for p in q + 1..shape.k()[i] {
                let (fq, fp) = (shape.index(i, q), shape.index(i, p));
                moves.push(TestMove {
                    kind: MoveKind::SwapDown { subsystem: i, pricier: q, cheaper: p },
                    plus: fq,
                    minus: Some(fp),
                    budget_exponent: c[fq] - c[fp],
                });
            }
        }
    }
    Ok(TestSet { moves })
}

/// Dense constraint matrix of the equality form
///
/// ```text
/// | D    −I_n  0    0 |   | x |   |  m  |
/// | I_N   0    I_N  0 | · | d | = |  u  |
/// | c     0    0    1 |   | t |   | c0  |
///                         | b |
/// ```
///
/// `m` is 1 per subsystem unless lower bounds already fill it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintMatrix {
    shape: Shape,
    rows: Vec<Vec<i64>>,
    rhs: Vec<i64>,
}

impl ConstraintMatrix {
    pub fn new(ninst: &NormalizedInstance) -> Result<Self> {
        let shape = ninst.shape().clone();
        let c0 = ninst.budget()?;
        let (nv, ns) = (shape.len(), shape.n());
        let cols = 2 * nv + ns + 1;
        let mut rows = Vec::with_capacity(ns + nv + 1);
        let mut rhs = Vec::with_capacity(ns + nv + 1);
        for i in 0..ns {
            let mut row = vec![0; cols];
            for f in shape.range(i) {
                row[f] = 1;
            }
            row[nv + i] = -1;
            rows.push(row);
            rhs.push(ninst.min_units()[i]);
        }
        for f in 0..nv {
            let mut row = vec![0; cols];
            row[f] = 1;
            row[nv + ns + f] = 1;
            rows.push(row);
            rhs.push(ninst.upper()[f]);
        }
        let mut row = vec![0; cols];
        row[..nv].copy_from_slice(ninst.costs());
        row[cols - 1] = 1;
        rows.push(row);
        rhs.push(c0);
        Ok(ConstraintMatrix { shape, rows, rhs })
    }

    pub fn cols(&self) -> usize {
        2 * self.shape.len() + self.shape.n() + 1
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[i64] {
        &self.rhs
    }

    /// `A · v` in exact integer arithmetic.
    pub fn mul(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols() {
            return Err(RapError::DimensionMismatch { expected: self.cols(), found: v.len() });
        }
        Ok(self.rows.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn is_kernel_vector(&self, v: &[i64]) -> Result<bool> {
        Ok(self.mul(v)?.iter().all(|&e| e == 0))
    }

    /// Lifts `x` to `(x, d, t, b)` using its slacks.
    pub fn lift(&self, ninst: &NormalizedInstance, x: &Configuration) -> Result<Vec<i64>> {
        let s = ninst.slacks(x)?;
        let mut z = x.values().to_vec();
        z.extend(s.d);
        z.extend(s.t);
        z.push(s.b);
        Ok(z)
    }
}

/// True iff `A · g = 0` for the lattice vector of `g`.
pub fn kernel_check(a: &ConstraintMatrix, g: &TestMove) -> Result<bool> {
    let needed = g.minus.unwrap_or(0).max(g.plus) + 1;
    if needed > a.shape.len() {
        return Err(RapError::DimensionMismatch { expected: a.shape.len(), found: needed });
    }
    a.is_kernel_vector(&g.lattice_vector(&a.shape))
}
