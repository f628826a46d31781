//! Polyhedra `P(A, b) = {x : Ax <= b}` with exact geometric predicates:
//! emptiness, dimension via implicit equalities, relative-interior points,
//! boundedness, and connected components of finite unions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{dot, Matrix, Rational};
use crate::lp::{solve, LpOutcome, LpProblem, Sense};

/// Solution set of `Ax <= b` over exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyhedronRepr", into = "PolyhedronRepr")]
pub struct Polyhedron {
    a: Matrix,
    b: Vec<Rational>,
}

/// Wire format `{"A": [[...]], "b": [...]}` with shape validation on load.
#[derive(Serialize, Deserialize)]
struct PolyhedronRepr {
    #[serde(rename = "A")]
    a: Matrix,
    b: Vec<Rational>,
}

impl TryFrom<PolyhedronRepr> for Polyhedron {
    type Error = Error;

    fn try_from(repr: PolyhedronRepr) -> Result<Self> {
        Polyhedron::new(repr.a, repr.b)
    }
}

impl From<Polyhedron> for PolyhedronRepr {
    fn from(p: Polyhedron) -> Self {
        PolyhedronRepr { a: p.a, b: p.b }
    }
}

/// Partition of the rows of a system into implicit equalities (satisfied with
/// equality by every feasible point) and the remaining inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitSplit {
    pub equality_indices: Vec<usize>,
    pub strict_indices: Vec<usize>,
}

impl Polyhedron {
    pub fn new(a: Matrix, b: Vec<Rational>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
                context: "polyhedron rhs length",
            });
        }
        if a.cols() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
                context: "polyhedron ambient dimension",
            });
        }
        Ok(Polyhedron { a, b })
    }

    /// The whole space, as a single trivial row `0 <= 0`.
    pub fn full_space(dim: usize) -> Self {
        Polyhedron {
            a: Matrix::zeros(1, dim),
            b: vec![Rational::zero()],
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.b
    }

    pub fn ambient_dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        let lhs = self.a.mul_vec(x)?;
        Ok(lhs.iter().zip(&self.b).all(|(l, r)| l <= r))
    }

    /// Stacked system: `self`'s rows first, then `other`'s.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: other.ambient_dim(),
                context: "polyhedron intersection",
            });
        }
        let a = self.a.vstack(&other.a)?;
        let mut b = self.b.clone();
        b.extend_from_slice(&other.b);
        Polyhedron::new(a, b)
    }

    /// Decided by exact LP feasibility; infeasibility carries a Farkas
    /// certificate inside the solver.
    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// A feasible point, if one exists.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let n = self.ambient_dim();
        let p = LpProblem::new(
            vec![Rational::zero(); n],
            self.a.clone(),
            self.b.clone(),
            Sense::Maximize,
        );
        match solve(&p).expect("feasibility LP is well-formed") {
            LpOutcome::Optimal { witness, .. } => Some(witness),
            LpOutcome::Infeasible { .. } => None,
            LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
        }
    }

    /// Row `i` is an implicit equality iff the minimum of `<a_i, x>` over the
    /// polyhedron equals `b_i`; one LP per row.
    pub fn implicit_split(&self) -> Result<ImplicitSplit> {
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron("implicit_split"));
        }
        let mut equality_indices = Vec::new();
        let mut strict_indices = Vec::new();
        for i in 0..self.num_rows() {
            let p = LpProblem::new(
                self.a.row(i).to_vec(),
                self.a.clone(),
                self.b.clone(),
                Sense::Minimize,
            );
            let implied = match solve(&p)? {
                LpOutcome::Optimal { value, .. } => value == self.b[i],
                LpOutcome::Unbounded => false,
                LpOutcome::Infeasible { .. } => {
                    unreachable!("non-empty polyhedron cannot be infeasible")
                }
            };
            if implied {
                equality_indices.push(i);
            } else {
                strict_indices.push(i);
            }
        }
        Ok(ImplicitSplit {
            equality_indices,
            strict_indices,
        })
    }

    /// Dimension of the affine hull: `n - rank(A=)`, with `-1` for the empty
    /// polyhedron.
    pub fn dimension(&self) -> Result<i64> {
        if self.is_empty() {
            return Ok(-1);
        }
        let split = self.implicit_split()?;
        if split.equality_indices.is_empty() {
            return Ok(self.ambient_dim() as i64);
        }
        let eq = self.a.select_rows(&split.equality_indices)?;
        Ok(self.ambient_dim() as i64 - eq.rank() as i64)
    }

    /// Fast full-dimension test: a single LP maximizing a shared slack on all
    /// nonzero rows. Agrees with `dimension() == n` but avoids the per-row
    /// implicit-equality scan.
    pub fn is_full_dimensional(&self) -> bool {
        let n = self.ambient_dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (i, row) in self.a.row_iter().enumerate() {
            if row.iter().all(Rational::is_zero) {
                if self.b[i].is_negative() {
                    return false; // 0 <= b < 0: empty
                }
                continue; // 0 <= b always holds; no effect on the interior
            }
            let mut r = row.to_vec();
            r.push(Rational::one());
            rows.push(r);
            rhs.push(self.b[i].clone());
        }
        if rows.is_empty() {
            return true;
        }
        // Cap t <= 1 so the LP stays bounded.
        let mut cap = vec![Rational::zero(); n];
        cap.push(Rational::one());
        rows.push(cap);
        rhs.push(Rational::one());
        let mut objective = vec![Rational::zero(); n];
        objective.push(Rational::one());
        let constraints = Matrix::from_rows(rows).expect("uniform row widths");
        let p = LpProblem::new(objective, constraints, rhs, Sense::Maximize);
        match solve(&p).expect("full-dimension LP is well-formed") {
            LpOutcome::Optimal { value, .. } => value.is_positive(),
            LpOutcome::Infeasible { .. } => false,
            LpOutcome::Unbounded => unreachable!("slack is capped"),
        }
    }

    /// A point of the relative interior: implicit equalities hold exactly and
    /// every remaining inequality is strict. Found by maximizing a shared
    /// slack over the strict rows.
    pub fn interior_point(&self) -> Result<Vec<Rational>> {
        let Some(feasible) = self.feasible_point() else {
            return Err(Error::EmptyPolyhedron("interior_point"));
        };
        let split = self.implicit_split()?;
        if split.strict_indices.is_empty() {
            return Ok(feasible);
        }
        let n = self.ambient_dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..self.num_rows() {
            let mut r = self.a.row(i).to_vec();
            r.push(if split.strict_indices.contains(&i) {
                Rational::one()
            } else {
                Rational::zero()
            });
            rows.push(r);
            rhs.push(self.b[i].clone());
        }
        let mut cap = vec![Rational::zero(); n];
        cap.push(Rational::one());
        rows.push(cap);
        rhs.push(Rational::one());
        let mut objective = vec![Rational::zero(); n];
        objective.push(Rational::one());
        let p = LpProblem::new(objective, Matrix::from_rows(rows)?, rhs, Sense::Maximize);
        match solve(&p)? {
            LpOutcome::Optimal { value, mut witness } => {
                if !value.is_positive() {
                    return Err(Error::Internal(
                        "no strict slack on a non-implicit row".into(),
                    ));
                }
                witness.truncate(n);
                // Contract check by exact substitution.
                for &i in &split.equality_indices {
                    if dot(self.a.row(i), &witness) != self.b[i] {
                        return Err(Error::Internal("interior point misses equality row".into()));
                    }
                }
                for &i in &split.strict_indices {
                    if dot(self.a.row(i), &witness) >= self.b[i] {
                        return Err(Error::Internal("interior point not strict".into()));
                    }
                }
                Ok(witness)
            }
            _ => Err(Error::Internal(
                "interior LP must be bounded feasible".into(),
            )),
        }
    }

    /// True iff every coordinate has a finite maximum and minimum (2n LPs).
    pub fn is_bounded(&self) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron("is_bounded"));
        }
        let n = self.ambient_dim();
        for j in 0..n {
            for sense in [Sense::Maximize, Sense::Minimize] {
                let mut objective = vec![Rational::zero(); n];
                objective[j] = Rational::one();
                let p = LpProblem::new(objective, self.a.clone(), self.b.clone(), sense);
                if matches!(solve(&p)?, LpOutcome::Unbounded) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Connected components of a union of polyhedra: nodes are the inputs, edges
/// join pairs whose (closed) intersection is non-empty, components come from
/// breadth-first traversal. Output is a partition ordered by smallest member.
pub fn connected_components(polys: &[Polyhedron]) -> Vec<Vec<usize>> {
    let n = polys.len();
    if n == 0 {
        return Vec::new();
    }
    let mut adjacent = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let nonempty = polys[i]
                .intersect(&polys[j])
                .map(|p| !p.is_empty())
                .unwrap_or(false);
            if nonempty {
                adjacent[i].push(j);
                adjacent[j].push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        let mut component = Vec::new();
        while let Some(v) = queue.pop_front() {
            component.push(v);
            for &w in &adjacent[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}
