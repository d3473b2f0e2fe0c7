//! Revised simplex over an exact field.
//!
//! The core solver works on standard form `max gᵗz, Mz = h, z ≥ 0` and keeps an explicit
//! basis inverse, so columns can be appended and the solve resumed from the current basis.
//! [`InequalityLp`] wraps it for `max cᵗp, Ap ≥ b, p free` by solving the dual.


use crate::matrix::Matrix;
use crate::num::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Col(usize),
    Art(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StdStatus {
    Optimal,
    Infeasible,
    /// Objective unbounded along the returned column combination.
    Unbounded(usize),
}

/// Consecutive degenerate pivots after which pricing switches to Bland's rule.
const DEGENERATE_SWITCH: usize = 30;

#[derive(Debug, Clone)]
pub struct StandardLp<T> {
    m: usize,
    sign: Vec<T>,
    cols: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<Var>,
    in_basis: Vec<Option<usize>>,
    binv: Matrix<T>,
    xb: Vec<T>,
    feasible: bool,
    pub pivots: usize,
}

impl<T: Field> StandardLp<T> {
    pub fn new(rhs: Vec<T>) -> Self {
        let m = rhs.len();
        let sign: Vec<T> = rhs.iter().map(|x| if *x < T::zero() { -T::one() } else { T::one() }).collect();
        let rhs: Vec<T> = rhs.iter().zip(&sign).map(|(a, s)| a.clone() * s.clone()).collect();
        StandardLp {
            m,
            sign,
            cols: Vec::new(),
            cost: Vec::new(),
            xb: rhs,
            basis: (0..m).map(Var::Art).collect(),
            in_basis: Vec::new(),
            binv: Matrix::identity(m),
            feasible: false,
            pivots: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn add_column(&mut self, col: Vec<T>, cost: T) -> usize {
        assert_eq!(col.len(), self.m);
        let col = col.into_iter().zip(&self.sign).map(|(a, s)| a * s.clone()).collect();
        self.cols.push(col);
        self.cost.push(cost);
        self.in_basis.push(None);
        self.cols.len() - 1
    }

    fn column(&self, v: Var) -> Vec<T> {
        match v {
            Var::Col(j) => self.cols[j].clone(),
            Var::Art(r) => {
                let mut e = vec![T::zero(); self.m];
                e[r] = T::one();
                e
            }
        }
    }

    fn var_cost(&self, v: Var, phase1: bool) -> T {
        match (v, phase1) {
            (Var::Art(_), true) => -T::one(),
            (Var::Art(_), false) => T::zero(),
            (Var::Col(_), true) => T::zero(),
            (Var::Col(j), false) => self.cost[j].clone(),
        }
    }

    fn multipliers(&self, phase1: bool) -> Vec<T> {
        let mut pi = vec![T::zero(); self.m];
        for (i, &v) in self.basis.iter().enumerate() {
            let c = self.var_cost(v, phase1);
            if c.is_zero() {
                continue;
            }
            for (r, p) in pi.iter_mut().enumerate() {
                let b = &self.binv[(i, r)];
                if !b.is_zero() {
                    *p = p.clone() + c.clone() * b.clone();
                }
            }
        }
        pi
    }

    fn ftran(&self, col: &[T]) -> Vec<T> {
        self.binv.mul_vec(col)
    }

    fn pivot(&mut self, row: usize, enter: Var, w: &[T]) {
        let pv = w[row].clone();
        let theta = self.xb[row].clone() / pv.clone();
        for i in 0..self.m {
            if i != row && !w[i].is_zero() {
                self.xb[i] = self.xb[i].clone() - theta.clone() * w[i].clone();
            }
        }
        self.xb[row] = theta;
        let prow: Vec<T> = (0..self.m).map(|j| self.binv[(row, j)].clone() / pv.clone()).collect();
        for i in 0..self.m {
            if i == row || w[i].is_zero() {
                continue;
            }
            let f = w[i].clone();
            for (j, p) in prow.iter().enumerate() {
                if !p.is_zero() {
                    self.binv[(i, j)] = self.binv[(i, j)].clone() - f.clone() * p.clone();
                }
            }
        }
        for (j, p) in prow.into_iter().enumerate() {
            self.binv[(row, j)] = p;
        }
        if let Var::Col(j) = self.basis[row] {
            self.in_basis[j] = None;
        }
        if let Var::Col(j) = enter {
            self.in_basis[j] = Some(row);
        }
        self.basis[row] = enter;
        self.pivots += 1;
    }

    /// Runs simplex iterations for the given phase until optimal or unbounded.
    fn iterate(&mut self, phase1: bool) -> StdStatus {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_SWITCH;
            let pi = self.multipliers(phase1);
            let mut enter: Option<(usize, T)> = None;
            for j in 0..self.cols.len() {
                if self.in_basis[j].is_some() {
                    continue;
                }
                let mut d = if phase1 { T::zero() } else { self.cost[j].clone() };
                for (p, a) in pi.iter().zip(&self.cols[j]) {
                    if !p.is_zero() && !a.is_zero() {
                        d = d - p.clone() * a.clone();
                    }
                }
                if d > T::zero() {
                    if bland {
                        enter = Some((j, d));
                        break;
                    }
                    if enter.as_ref().is_none_or(|(_, best)| d > *best) {
                        enter = Some((j, d));
                    }
                }
            }
            let Some((j, _)) = enter else { return StdStatus::Optimal };
            let w = self.ftran(&self.cols[j]);
            // ratio test; zero-level artificials block any nonzero direction
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let blocking_art = !phase1 && matches!(self.basis[i], Var::Art(_)) && !w[i].is_zero();
                if w[i] > T::zero() || blocking_art {
                    let ratio = if blocking_art { T::zero() } else { self.xb[i].clone() / w[i].clone() };
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.var_order(self.basis[i]) < self.var_order(self.basis[*li]))
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else { return StdStatus::Unbounded(j) };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, Var::Col(j), &w);
        }
    }

    fn var_order(&self, v: Var) -> usize {
        match v {
            Var::Col(j) => j,
            Var::Art(r) => self.cols.len() + r,
        }
    }

    /// Solves (or resumes) the problem.
    pub fn solve(&mut self) -> StdStatus {
        if !self.feasible {
            match self.iterate(true) {
                StdStatus::Optimal => {}
                StdStatus::Unbounded(_) => unreachable!("phase 1 is bounded"),
                StdStatus::Infeasible => return StdStatus::Infeasible,
            }
            let infeas: T = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(v, _)| matches!(v, Var::Art(_)))
                .fold(T::zero(), |a, (_, x)| a + x.clone());
            if infeas > T::zero() {
                return StdStatus::Infeasible;
            }
            self.drive_out_artificials();
            self.feasible = true;
        }
        self.iterate(false)
    }

    fn drive_out_artificials(&mut self) {
        for row in 0..self.m {
            if !matches!(self.basis[row], Var::Art(_)) {
                continue;
            }
            for j in 0..self.cols.len() {
                if self.in_basis[j].is_some() {
                    continue;
                }
                let w = self.ftran(&self.cols[j]);
                if !w[row].is_zero() {
                    self.pivot(row, Var::Col(j), &w);
                    break;
                }
            }
        }
    }

    /// Values of the structural columns.
    pub fn solution(&self) -> Vec<T> {
        let mut z = vec![T::zero(); self.cols.len()];
        for (i, v) in self.basis.iter().enumerate() {
            if let Var::Col(j) = v {
                z[*j] = self.xb[i].clone();
            }
        }
        z
    }

    pub fn objective(&self) -> T {
        self.basis
            .iter()
            .zip(&self.xb)
            .fold(T::zero(), |a, (v, x)| a + self.var_cost(*v, false) * x.clone())
    }

    /// Simplex multipliers `y` with `yᵗ M_B = g_B`, in the original row signs.
    pub fn duals(&self) -> Vec<T> {
        self.multipliers(false).into_iter().zip(&self.sign).map(|(p, s)| p * s.clone()).collect()
    }

    /// Basic structural columns.
    pub fn basic_columns(&self) -> Vec<usize> {
        self.basis.iter().filter_map(|v| if let Var::Col(j) = v { Some(*j) } else { None }).collect()
    }

    /// Direction `Δz` (structural coordinates) of an unbounded ray entering at column `j`.
    pub fn ray(&self, j: usize) -> Vec<T> {
        let w = self.ftran(&self.column(Var::Col(j)));
        let mut z = vec![T::zero(); self.cols.len()];
        z[j] = T::one();
        for (i, v) in self.basis.iter().enumerate() {
            if let Var::Col(k) = v {
                z[*k] = -w[i].clone();
            }
        }
        z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult<T> {
    Optimal { point: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

/// `max cᵗp` subject to `a_i·p ≥ b_i`, `p` free, solved through its dual
/// `max Σ b_i z_i, Σ z_i a_i = −c, z ≥ 0`. Constraints may be appended between solves.
#[derive(Debug, Clone)]
pub struct InequalityLp<T> {
    c: Vec<T>,
    dual: StandardLp<T>,
    rows: Vec<(Vec<T>, T)>,
}

impl<T: Field> InequalityLp<T> {
    pub fn new(c: Vec<T>) -> Self {
        let h: Vec<T> = c.iter().map(|x| -x.clone()).collect();
        InequalityLp { c, dual: StandardLp::new(h), rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn constraint(&self, i: usize) -> &(Vec<T>, T) {
        &self.rows[i]
    }

    pub fn add_constraint(&mut self, a: Vec<T>, b: T) -> usize {
        assert_eq!(a.len(), self.c.len());
        self.dual.add_column(a.clone(), b.clone());
        self.rows.push((a, b));
        self.rows.len() - 1
    }

    pub fn pivots(&self) -> usize {
        self.dual.pivots
    }

    pub fn solve(&mut self) -> LpResult<T> {
        match self.dual.solve() {
            StdStatus::Optimal => {
                let point = self.dual.duals();
                let value = self.c.iter().zip(&point).fold(T::zero(), |a, (x, y)| a + x.clone() * y.clone());
                LpResult::Optimal { point, value }
            }
            StdStatus::Unbounded(_) => LpResult::Infeasible,
            StdStatus::Infeasible => LpResult::Unbounded,
        }
    }

    /// Indices of constraints in the optimal basis (tight at the returned vertex).
    pub fn basic_constraints(&self) -> Vec<usize> {
        self.dual.basic_columns()
    }

    /// Indices of constraints tight at `p`.
    pub fn tight_at(&self, p: &[T]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| {
                let (a, b) = &self.rows[i];
                let v = a.iter().zip(p).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                v == *b
            })
            .collect()
    }
}

/// One-shot helper for [`InequalityLp`].
pub fn maximize<T: Field>(c: &[T], constraints: &[(Vec<T>, T)]) -> LpResult<T> {
    let mut lp = InequalityLp::new(c.to_vec());
    for (a, b) in constraints {
        lp.add_constraint(a.clone(), b.clone());
    }
    lp.solve()
}
