//! Independent oracle for the surjectivity LP: the linearized feasible set is
//! a pointed polyhedron, so the minimum of the slack sum is attained at a
//! vertex. The oracle enumerates every basis subset, solves the square system
//! with its own Gaussian elimination (no simplex involved), filters feasible
//! vertices, and minimizes the objective over them.

use tropnet::exact::{Matrix, Rational};
use tropnet::hoffman::surjectivity_value;

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Solve `M z = rhs` for square `M` by plain Gaussian elimination; `None`
/// when singular.
#[allow(clippy::needless_range_loop)]
fn solve_square(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col].clone();
            for j in col..=n {
                let adj = &factor * &a[col][j];
                a[i][j] -= &adj;
            }
        }
    }
    Some(
        a.into_iter()
            .map(|row| row[row.len() - 1].clone())
            .collect(),
    )
}

/// Brute-force vertex enumeration for
/// `min sum(s)  s.t.  |A_J^T v| <= s, sum v = 1, v >= 0, s >= 0`.
fn oracle_value(a: &Matrix, subset: &[usize]) -> Rational {
    let k = subset.len();
    let n = a.cols();
    let dim = k + n;
    // Constraint rows as (coeffs, rhs, is_equality).
    let mut rows: Vec<(Vec<Rational>, Rational, bool)> = Vec::new();
    for col in 0..n {
        for sign in [1i64, -1] {
            let mut row = vec![Rational::zero(); dim];
            for (j, &idx) in subset.iter().enumerate() {
                let coef = a.get(idx, col).clone();
                row[j] = if sign > 0 { coef } else { -coef };
            }
            row[k + col] = r(-1);
            rows.push((row, Rational::zero(), false));
        }
    }
    let mut sum_row = vec![Rational::zero(); dim];
    for item in sum_row.iter_mut().take(k) {
        *item = Rational::one();
    }
    rows.push((sum_row, Rational::one(), true));
    for var in 0..dim {
        let mut row = vec![Rational::zero(); dim];
        row[var] = r(-1);
        rows.push((row, Rational::zero(), false));
    }

    let feasible = |z: &[Rational]| {
        rows.iter().all(|(coeffs, rhs, eq)| {
            let lhs: Rational = coeffs.iter().zip(z).map(|(c, v)| c * v).sum();
            if *eq {
                lhs == *rhs
            } else {
                lhs <= *rhs
            }
        })
    };

    // Every vertex is the unique solution of `dim` tight constraints.
    let nrows = rows.len();
    let mut best: Option<Rational> = None;
    let mut stack = vec![(0usize, Vec::<usize>::new())];
    while let Some((start, chosen)) = stack.pop() {
        if chosen.len() == dim {
            let m: Vec<Vec<Rational>> = chosen.iter().map(|&i| rows[i].0.clone()).collect();
            let rhs: Vec<Rational> = chosen.iter().map(|&i| rows[i].1.clone()).collect();
            if let Some(z) = solve_square(&m, &rhs) {
                if feasible(&z) {
                    let objective: Rational = z[k..].iter().sum();
                    best = Some(match best {
                        None => objective,
                        Some(b) => b.min(objective),
                    });
                }
            }
            continue;
        }
        let needed = dim - chosen.len();
        for i in start..nrows {
            if nrows - i < needed {
                break;
            }
            let mut next = chosen.clone();
            next.push(i);
            stack.push((i + 1, next));
        }
    }
    best.expect("the simplex of admissible v is non-empty")
}

#[test]
fn matches_vertex_enumeration_on_hand_instances() {
    let cases: Vec<(Matrix, Vec<usize>)> = vec![
        (Matrix::from_i64_rows(&[&[1], &[-1]]), vec![0, 1]),
        (Matrix::from_i64_rows(&[&[1], &[-1]]), vec![0]),
        (Matrix::from_i64_rows(&[&[2, 0], &[0, 3]]), vec![0, 1]),
        (
            Matrix::from_i64_rows(&[&[1, 1], &[1, -1], &[0, 1]]),
            vec![0, 1, 2],
        ),
        (
            Matrix::from_i64_rows(&[&[1, 0, 2], &[0, -1, 1], &[1, 1, 1]]),
            vec![0, 1, 2],
        ),
    ];
    for (a, subset) in cases {
        let got = surjectivity_value(&a, &subset).unwrap();
        let want = oracle_value(&a, &subset);
        assert_eq!(got, want, "matrix {a:?} subset {subset:?}");
    }
}

#[test]
fn matches_vertex_enumeration_on_random_instances() {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(88);
    for trial in 0..12 {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=3);
        let a = Matrix::from_rows(
            (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| Rational::new(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3)))
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        // Random non-empty subset.
        let mask = rng.gen_range(1u32..(1 << m));
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let got = surjectivity_value(&a, &subset).unwrap();
        let want = oracle_value(&a, &subset);
        assert_eq!(got, want, "trial {trial}: matrix {a:?} subset {subset:?}");
    }
}
