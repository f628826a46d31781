//! Exact rational linear programming.
//!
//! A dense two-phase simplex over [`Rational`] with Bland's anti-cycling
//! pivot rule. Infeasibility is certified by a Farkas witness `y >= 0` with
//! `y^T A = 0`, `y^T b < 0`; optimality witnesses are re-verified by
//! substitution before they are returned, so downstream geometric predicates
//! are self-checking.

use crate::error::{Error, Result};
use crate::exact::{dot, Matrix, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Linear program `opt c^T x` subject to `A x <= b`, with per-variable
/// nonnegativity flags. Variables without the flag are free.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub constraints: Matrix,
    pub rhs: Vec<Rational>,
    pub sense: Sense,
    pub nonneg: Vec<bool>,
}

impl LpProblem {
    pub fn new(
        objective: Vec<Rational>,
        constraints: Matrix,
        rhs: Vec<Rational>,
        sense: Sense,
    ) -> Self {
        let n = constraints.cols();
        LpProblem {
            objective,
            constraints,
            rhs,
            sense,
            nonneg: vec![false; n],
        }
    }

    pub fn with_nonneg(mut self, nonneg: Vec<bool>) -> Self {
        self.nonneg = nonneg;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.constraints.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.constraints.cols(),
                got: self.objective.len(),
                context: "LP objective length",
            });
        }
        if self.rhs.len() != self.constraints.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.constraints.rows(),
                got: self.rhs.len(),
                context: "LP rhs length",
            });
        }
        if self.nonneg.len() != self.constraints.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.constraints.cols(),
                got: self.nonneg.len(),
                context: "LP nonneg mask length",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// No feasible point; carries a verified Farkas certificate.
    Infeasible {
        certificate: Vec<Rational>,
    },
    Unbounded,
    Optimal {
        value: Rational,
        witness: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }
}

/// Column-to-variable bookkeeping for the split standard form.
struct StandardForm {
    /// (variable index, sign) per structural column.
    columns: Vec<(usize, i8)>,
    nvars: usize,
}

impl StandardForm {
    fn build(nonneg: &[bool]) -> Self {
        let mut columns = Vec::new();
        for (j, &nn) in nonneg.iter().enumerate() {
            columns.push((j, 1));
            if !nn {
                columns.push((j, -1));
            }
        }
        StandardForm {
            columns,
            nvars: nonneg.len(),
        }
    }

    fn recover(&self, column_values: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.nvars];
        for (col, &(var, sign)) in self.columns.iter().enumerate() {
            if sign > 0 {
                x[var] += &column_values[col];
            } else {
                x[var] -= &column_values[col];
            }
        }
        x
    }
}

struct Tableau {
    /// m x (ncols + 1); last column is the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row, length ncols, plus the negated objective value.
    cost: Vec<Rational>,
    cost_value: Rational,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    /// Installs a minimization cost vector and rebuilds the reduced-cost row
    /// in canonical form with respect to the current basis. `cost_value`
    /// carries the negated objective, matching the pivot update.
    fn install_cost(&mut self, costs: &[Rational]) {
        let mut reduced = costs.to_vec();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (slot, entry) in reduced.iter_mut().zip(&self.rows[i]) {
                let adj = &cb * entry;
                *slot -= &adj;
            }
            value -= &(&cb * self.rhs(i));
        }
        self.cost = reduced;
        self.cost_value = value;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        debug_assert!(!pivot.is_zero());
        let inv = pivot.recip();
        for v in self.rows[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let adj = &factor * &self.rows[row][j];
                self.rows[i][j] -= &adj;
            }
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for j in 0..self.ncols {
                let adj = &factor * &self.rows[row][j];
                self.cost[j] -= &adj;
            }
            self.cost_value -= &(&factor * self.rhs(row));
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering column is the lowest index with a negative
    /// reduced cost; the leaving row breaks ratio ties by the lowest basic
    /// column index. Returns false at optimality; `Err` when unbounded.
    fn simplex_step(&mut self, allowed: usize) -> Result<bool> {
        let Some(enter) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
            return Ok(false);
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..self.rows.len() {
            let coef = &self.rows[i][enter];
            if !coef.is_positive() {
                continue;
            }
            let ratio = self.rhs(i) / coef;
            let better = match &leave {
                None => true,
                Some((cur, best)) => {
                    ratio < *best || (ratio == *best && self.basis[i] < self.basis[*cur])
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        match leave {
            Some((row, _)) => {
                self.pivot(row, enter);
                Ok(true)
            }
            None => Err(Error::Internal("unbounded".into())),
        }
    }
}

/// Solves the LP exactly. Deterministic: identical inputs produce identical
/// outcomes, witnesses included.
pub fn solve(problem: &LpProblem) -> Result<LpOutcome> {
    problem.validate()?;
    let m = problem.constraints.rows();
    let form = StandardForm::build(&problem.nonneg);
    let nstruct = form.columns.len();
    let nslack = m;
    // One artificial per row whose scaled slack cannot start in the basis.
    let scale: Vec<i8> = problem
        .rhs
        .iter()
        .map(|b| if b.is_negative() { -1 } else { 1 })
        .collect();
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| scale[i] < 0).collect();
    let nart = artificial_rows.len();
    let ncols = nstruct + nslack + nart;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_of_row = vec![usize::MAX; m];
    for (k, &i) in artificial_rows.iter().enumerate() {
        art_of_row[i] = nstruct + nslack + k;
    }
    for i in 0..m {
        let mut row = vec![Rational::zero(); ncols + 1];
        let sigma = Rational::from_integer(scale[i] as i64);
        for (col, &(var, sign)) in form.columns.iter().enumerate() {
            let a = problem.constraints.get(i, var);
            if a.is_zero() {
                continue;
            }
            let signed = if sign > 0 { a.clone() } else { -a };
            row[col] = &sigma * &signed;
        }
        row[nstruct + i] = sigma.clone();
        row[ncols] = &sigma * &problem.rhs[i];
        if scale[i] < 0 {
            row[art_of_row[i]] = Rational::one();
            basis.push(art_of_row[i]);
        } else {
            basis.push(nstruct + i);
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        cost: vec![Rational::zero(); ncols],
        cost_value: Rational::zero(),
        basis,
        ncols,
    };

    // Phase 1: minimize the sum of artificials.
    if nart > 0 {
        let mut phase1 = vec![Rational::zero(); ncols];
        for cost in phase1.iter_mut().skip(nstruct + nslack) {
            *cost = Rational::one();
        }
        tab.install_cost(&phase1);
        while tab.simplex_step(ncols)? {}
        let infeasibility = -tab.cost_value.clone();
        if infeasibility.is_positive() {
            // Farkas multipliers are the final reduced costs of the slack
            // columns (the slack column of row i carries sigma_i * e_i).
            let certificate: Vec<Rational> =
                (0..m).map(|i| tab.cost[nstruct + i].clone()).collect();
            verify_farkas(&certificate, &problem.constraints, &problem.rhs)?;
            return Ok(LpOutcome::Infeasible { certificate });
        }
        // Drive leftover zero-level artificials out of the basis.
        for i in 0..m {
            if tab.basis[i] < nstruct + nslack {
                continue;
            }
            if let Some(col) = (0..nstruct + nslack).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, col);
            }
            // A row with no eligible pivot is redundant; its artificial stays
            // basic at level zero and never re-enters because phase 2 only
            // prices the non-artificial columns.
        }
    }

    // Phase 2 over the original objective (as a minimization).
    let mut phase2 = vec![Rational::zero(); ncols];
    for (col, &(var, sign)) in form.columns.iter().enumerate() {
        let c = &problem.objective[var];
        let signed = if sign > 0 { c.clone() } else { -c };
        phase2[col] = match problem.sense {
            Sense::Minimize => signed,
            Sense::Maximize => -signed,
        };
    }
    tab.install_cost(&phase2);
    loop {
        match tab.simplex_step(nstruct + nslack) {
            Ok(true) => {}
            Ok(false) => break,
            Err(_) => return Ok(LpOutcome::Unbounded),
        }
    }

    let mut column_values = vec![Rational::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        column_values[b] = tab.rhs(i).clone();
    }
    let witness = form.recover(&column_values);
    let value = dot(&problem.objective, &witness);

    // Substitution check: the witness must satisfy every constraint exactly
    // and attain the reported objective value.
    let lhs = problem.constraints.mul_vec(&witness)?;
    for (i, l) in lhs.iter().enumerate() {
        if l > &problem.rhs[i] {
            return Err(Error::Internal(format!(
                "optimal witness violates row {i}: {l} > {}",
                problem.rhs[i]
            )));
        }
    }
    let tableau_value = match problem.sense {
        Sense::Minimize => -tab.cost_value.clone(),
        Sense::Maximize => tab.cost_value.clone(),
    };
    if value != tableau_value {
        return Err(Error::Internal(format!(
            "objective mismatch: substitution gives {value}, tableau gives {tableau_value}"
        )));
    }
    Ok(LpOutcome::Optimal { value, witness })
}

fn verify_farkas(y: &[Rational], a: &Matrix, b: &[Rational]) -> Result<()> {
    if y.iter().any(Rational::is_negative) {
        return Err(Error::Internal(
            "Farkas certificate has negative entry".into(),
        ));
    }
    for j in 0..a.cols() {
        let combo: Rational = (0..a.rows()).map(|i| &y[i] * a.get(i, j)).sum();
        if !combo.is_zero() {
            return Err(Error::Internal(format!(
                "Farkas certificate: y^T A column {j} is {combo}, not 0"
            )));
        }
    }
    let yb: Rational = y.iter().zip(b).map(|(yi, bi)| yi * bi).sum();
    if !yb.is_negative() {
        return Err(Error::Internal(format!(
            "Farkas certificate: y^T b is {yb}, not negative"
        )));
    }
    Ok(())
}
