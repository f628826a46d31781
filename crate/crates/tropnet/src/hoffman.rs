//! Hoffman constants of matrices, tropical polynomials, and tropical rational
//! maps, plus the sampling-radius bound they yield. All norms are infinity
//! norms; the 2-norm appears only inside the floating upper bound.
//!
//! The exact value enumerates row subsets: a subset `J` contributes `1/t(J)`
//! when the exact LP `min ||A_J^T v||_1 over v >= 0, ||v||_1 = 1` has a
//! positive optimum (then `J` is A-surjective). Lower bounds sample subsets;
//! upper bounds use `1/rho(A_J)` with the smallest singular value, valid for
//! the infinity norm since the 1-norm dominates the 2-norm.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational};
use crate::lp::{solve, LpOutcome, LpProblem, Sense};
use crate::tropical::{TropicalPolynomial, TropicalRationalMap};

/// Result of a Hoffman computation; exact and lower values are rational,
/// the upper bound is floating (its singular values are).
#[derive(Debug, Clone)]
pub enum HoffmanResult {
    Exact {
        value: Rational,
        witness_subset: Option<Vec<usize>>,
    },
    Lower {
        value: Rational,
        witness_subset: Option<Vec<usize>>,
    },
    Upper {
        value: f64,
    },
}

impl HoffmanResult {
    pub fn exact_value(&self) -> Option<&Rational> {
        match self {
            HoffmanResult::Exact { value, .. } | HoffmanResult::Lower { value, .. } => Some(value),
            HoffmanResult::Upper { .. } => None,
        }
    }

    pub fn float_value(&self) -> f64 {
        match self {
            HoffmanResult::Exact { value, .. } | HoffmanResult::Lower { value, .. } => {
                value.to_f64()
            }
            HoffmanResult::Upper { value } => *value,
        }
    }

    pub fn witness_subset(&self) -> Option<&[usize]> {
        match self {
            HoffmanResult::Exact { witness_subset, .. }
            | HoffmanResult::Lower { witness_subset, .. } => witness_subset.as_deref(),
            HoffmanResult::Upper { .. } => None,
        }
    }
}

/// The optimum `t` of `min ||A_J^T v||_1  s.t.  v in R^J_+, ||v||_1 = 1`,
/// linearized with slack variables. `t > 0` iff `J` is A-surjective, and then
/// `H_J(A) = 1/t`.
pub fn surjectivity_value(a: &Matrix, subset: &[usize]) -> Result<Rational> {
    if subset.is_empty() {
        return Err(Error::Internal("empty row subset".into()));
    }
    let rows = a.select_rows(subset)?;
    let k = subset.len();
    let n = a.cols();
    // Variables: v_0..v_{k-1}, s_0..s_{n-1}.
    let mut cons = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..n {
        // (A_J^T v)_r <= s_r  and  -(A_J^T v)_r <= s_r
        for sign in [1i64, -1] {
            let mut row = vec![Rational::zero(); k + n];
            for (j, slot) in row.iter_mut().enumerate().take(k) {
                let coef = rows.get(j, r).clone();
                *slot = if sign > 0 { coef } else { -coef };
            }
            row[k + r] = Rational::from_integer(-1);
            cons.push(row);
            rhs.push(Rational::zero());
        }
    }
    // ||v||_1 = sum v = 1 as two inequalities.
    let mut sum_row = vec![Rational::zero(); k + n];
    for item in sum_row.iter_mut().take(k) {
        *item = Rational::one();
    }
    cons.push(sum_row.clone());
    rhs.push(Rational::one());
    cons.push(sum_row.into_iter().map(|v| -v).collect());
    rhs.push(Rational::from_integer(-1));

    let mut objective = vec![Rational::zero(); k + n];
    for item in objective.iter_mut().skip(k) {
        *item = Rational::one();
    }
    let problem = LpProblem::new(objective, Matrix::from_rows(cons)?, rhs, Sense::Minimize)
        .with_nonneg(vec![true; k + n]);
    match solve(&problem)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Internal(format!(
            "surjectivity LP must have an optimum, got {other:?}"
        ))),
    }
}

/// Exact Hoffman constant by enumerating all non-empty row subsets; requires
/// the row count to be within the cap (2^m LP solves).
pub fn hoffman_exact(a: &Matrix, cap: usize) -> Result<HoffmanResult> {
    let m = a.rows();
    if m > cap {
        return Err(Error::SubsetCapExceeded { rows: m, cap });
    }
    let mut best = Rational::zero();
    let mut witness = None;
    for mask in 1u64..(1u64 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let t = surjectivity_value(a, &subset)?;
        if t.is_positive() {
            let candidate = t.recip();
            if candidate > best {
                best = candidate;
                witness = Some(subset);
            }
        }
    }
    Ok(HoffmanResult::Exact {
        value: best,
        witness_subset: witness,
    })
}

/// Sampled lower bound: draws `iterations` random subsets (size uniform on
/// `1..=m`) and keeps the best surjective value. Always `<= H(A)`;
/// reproducible from the seed.
pub fn hoffman_lower(a: &Matrix, iterations: usize, seed: u64) -> Result<HoffmanResult> {
    let m = a.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Rational::zero();
    let mut witness = None;
    for _ in 0..iterations {
        let k = rng.gen_range(1..=m);
        let mut indices: Vec<usize> = (0..m).collect();
        indices.shuffle(&mut rng);
        let mut subset: Vec<usize> = indices.into_iter().take(k).collect();
        subset.sort_unstable();
        let t = surjectivity_value(a, &subset)?;
        if t.is_positive() {
            let candidate = t.recip();
            if candidate > best {
                best = candidate;
                witness = Some(subset);
            }
        }
    }
    Ok(HoffmanResult::Lower {
        value: best,
        witness_subset: witness,
    })
}

/// Subset enumeration mode for the floating upper bound.
#[derive(Debug, Clone, Copy)]
pub enum UpperMode {
    /// All non-empty subsets; requires the row count within the cap.
    Exhaustive { cap: usize },
    /// Random subsets, as in the lower-bound estimator.
    Sampled { iterations: usize, seed: u64 },
}

/// Floating upper bound `max_J 1/rho(A_J)` over full-rank row subsets, where
/// `rho` is the smallest singular value. The reported value is padded by 1e-9
/// to absorb the eigen-solver tolerance.
pub fn hoffman_upper(a: &Matrix, mode: UpperMode) -> Result<HoffmanResult> {
    let m = a.rows();
    let dense: Vec<Vec<f64>> = a
        .row_iter()
        .map(|r| r.iter().map(Rational::to_f64).collect())
        .collect();
    let mut best = 0.0f64;
    let mut consider = |subset: &[usize]| {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| dense[i].as_slice()).collect();
        let rho = smallest_singular_value(&rows);
        if rho > 1e-12 {
            best = best.max(1.0 / rho);
        }
    };
    match mode {
        UpperMode::Exhaustive { cap } => {
            if m > cap {
                return Err(Error::SubsetCapExceeded { rows: m, cap });
            }
            for mask in 1u64..(1u64 << m) {
                let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
                consider(&subset);
            }
        }
        UpperMode::Sampled { iterations, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..iterations {
                let k = rng.gen_range(1..=m);
                let mut indices: Vec<usize> = (0..m).collect();
                indices.shuffle(&mut rng);
                let mut subset: Vec<usize> = indices.into_iter().take(k).collect();
                subset.sort_unstable();
                consider(&subset);
            }
        }
    }
    Ok(HoffmanResult::Upper {
        value: if best > 0.0 { best + 1e-9 } else { 0.0 },
    })
}

/// Smallest singular value of a row-slice matrix via cyclic Jacobi rotations
/// on the smaller Gram matrix.
fn smallest_singular_value(rows: &[&[f64]]) -> f64 {
    let m = rows.len();
    let n = rows[0].len();
    let k = m.min(n);
    let mut gram = vec![vec![0.0f64; k]; k];
    if m <= n {
        for i in 0..m {
            for j in 0..m {
                gram[i][j] = rows[i].iter().zip(rows[j]).map(|(a, b)| a * b).sum();
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = rows.iter().map(|r| r[i] * r[j]).sum();
            }
        }
    }
    let eigs = jacobi_eigenvalues(&mut gram);
    let min = eigs.into_iter().fold(f64::INFINITY, f64::min);
    min.max(0.0).sqrt()
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi sweeps
/// (convergence tolerance 1e-12 on the off-diagonal mass).
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(a: &mut [Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    if n == 1 {
        return vec![a[0][0]];
    }
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Hoffman value of a tropical expression: exact when every candidate matrix
/// is within the subset cap, otherwise a (lower, upper) sandwich.
#[derive(Debug, Clone)]
pub enum TropicalHoffman {
    Exact(HoffmanResult),
    Bounds {
        lower: HoffmanResult,
        upper: HoffmanResult,
    },
}

impl TropicalHoffman {
    /// A value usable as a valid multiplier in the radius bound: the exact
    /// constant, or the floating upper bound exactified.
    pub fn radius_multiplier(&self) -> Rational {
        match self {
            TropicalHoffman::Exact(r) => r.exact_value().expect("exact").clone(),
            TropicalHoffman::Bounds { upper, .. } => {
                Rational::from_f64(upper.float_value()).expect("finite upper bound")
            }
        }
    }
}

/// Fallback configuration when the cap forces the sandwich path.
#[derive(Debug, Clone, Copy)]
pub struct BoundConfig {
    pub iterations: usize,
    pub seed: u64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            iterations: 64,
            seed: 0,
        }
    }
}

/// The region system of monomial `i` with the rows of every other monomial:
/// `A - 1 a_i`, over the exponent matrix `A`.
fn centered_matrix(exponents: &Matrix, i: usize) -> Matrix {
    let mut rows = Vec::with_capacity(exponents.rows());
    let pivot = exponents.row(i);
    for r in exponents.row_iter() {
        rows.push(r.iter().zip(pivot).map(|(a, p)| a - p).collect());
    }
    Matrix::from_rows(rows).expect("uniform widths")
}

/// The centered region systems of a polynomial's irredundant monomials, one
/// matrix per linear region.
pub fn centered_region_matrices(f: &TropicalPolynomial) -> Vec<Matrix> {
    let pruned = f.prune();
    let exponents = pruned.exponent_matrix();
    (0..pruned.len())
        .map(|i| centered_matrix(&exponents, i))
        .collect()
}

/// Hoffman constant of a tropical polynomial: the max of the exact constants
/// of the centered systems of its irredundant monomials.
pub fn hoffman_tropical_poly(
    f: &TropicalPolynomial,
    cap: usize,
    fallback: BoundConfig,
) -> Result<TropicalHoffman> {
    let matrices = centered_region_matrices(f);
    hoffman_over_matrices(&matrices, cap, fallback)
}

/// Hoffman constant of a rational map `p (/) q` for the given expression:
/// the max over all monomial pairs `(i, j)` of the exact constant of the
/// stacked centered system.
pub fn hoffman_tropical_map(
    f: &TropicalRationalMap,
    cap: usize,
    fallback: BoundConfig,
) -> Result<TropicalHoffman> {
    let matrices = stacked_pair_matrices(f);
    hoffman_over_matrices(&matrices, cap, fallback)
}

/// The stacked matrices `[A; A'] - 1 [a_i; a'_j]` for all pairs of the given
/// expression's monomials.
pub fn stacked_pair_matrices(f: &TropicalRationalMap) -> Vec<Matrix> {
    let ap = f.numerator.exponent_matrix();
    let aq = f.denominator.exponent_matrix();
    let mut out = Vec::with_capacity(ap.rows() * aq.rows());
    for i in 0..ap.rows() {
        let top = centered_matrix(&ap, i);
        for j in 0..aq.rows() {
            let bottom = centered_matrix(&aq, j);
            out.push(top.vstack(&bottom).expect("same variable count"));
        }
    }
    out
}

fn hoffman_over_matrices(
    matrices: &[Matrix],
    cap: usize,
    fallback: BoundConfig,
) -> Result<TropicalHoffman> {
    let within_cap = matrices.iter().all(|m| m.rows() <= cap);
    if within_cap {
        let mut best = Rational::zero();
        let mut witness = None;
        for m in matrices {
            if let HoffmanResult::Exact {
                value,
                witness_subset,
            } = hoffman_exact(m, cap)?
            {
                if value > best {
                    best = value;
                    witness = witness_subset;
                }
            }
        }
        return Ok(TropicalHoffman::Exact(HoffmanResult::Exact {
            value: best,
            witness_subset: witness,
        }));
    }
    let mut lower = Rational::zero();
    let mut lower_witness = None;
    let mut upper = 0.0f64;
    for (idx, m) in matrices.iter().enumerate() {
        let seed = fallback.seed.wrapping_add(idx as u64);
        if let HoffmanResult::Lower {
            value,
            witness_subset,
        } = hoffman_lower(m, fallback.iterations, seed)?
        {
            if value > lower {
                lower = value;
                lower_witness = witness_subset;
            }
        }
        if let HoffmanResult::Upper { value } = hoffman_upper(
            m,
            UpperMode::Sampled {
                iterations: fallback.iterations,
                seed,
            },
        )? {
            upper = upper.max(value);
        }
    }
    Ok(TropicalHoffman::Bounds {
        lower: HoffmanResult::Lower {
            value: lower,
            witness_subset: lower_witness,
        },
        upper: HoffmanResult::Upper { value: upper },
    })
}

/// Sampling-radius bound at `x`: `H(p (/) q) * max{p(x) - min_p(x),
/// q(x) - min_q(x)}`, where `min_p` is the min-conjugate of `p`. A ball of
/// this infinity-radius around `x` meets every linear region of the map.
pub fn radius_bound(
    f: &TropicalRationalMap,
    x: &[Rational],
    cap: usize,
    fallback: BoundConfig,
) -> Result<Rational> {
    let hoffman = hoffman_tropical_map(f, cap, fallback)?;
    let h = hoffman.radius_multiplier();
    let p_gap = f.numerator.evaluate(x)? - f.numerator.evaluate_min(x)?;
    let q_gap = f.denominator.evaluate(x)? - f.denominator.evaluate_min(x)?;
    Ok(h * p_gap.max(q_gap))
}
