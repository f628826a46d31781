//! Property-based invariants: exact field axioms, rank symmetry, injective
//! exactification, tropical semiring laws as function equalities, pruning as
//! a function-preserving rewrite, and polyhedral membership laws.

use proptest::prelude::*;

use tropnet::exact::{Matrix, Rational};
use tropnet::polyhedra::{connected_components, Polyhedron};
use tropnet::tropical::{Monomial, TropicalPolynomial};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=20).prop_map(|(p, q)| Rational::new(p, q))
}

fn nonneg_rational() -> impl Strategy<Value = Rational> {
    (0i64..=40, 1i64..=12).prop_map(|(p, q)| Rational::new(p, q))
}

fn small_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(proptest::collection::vec(rational(), cols), rows)
            .prop_map(|data| Matrix::from_rows(data).unwrap())
    })
}

fn tropical_poly(nvars: usize) -> impl Strategy<Value = TropicalPolynomial> {
    proptest::collection::vec(
        (
            rational(),
            proptest::collection::vec(nonneg_rational(), nvars),
        ),
        1..=4,
    )
    .prop_map(move |terms| {
        TropicalPolynomial::new(
            nvars,
            terms
                .into_iter()
                .map(|(c, e)| Monomial::new(c, e))
                .collect(),
        )
        .unwrap()
    })
}

fn points(nvars: usize, count: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    proptest::collection::vec(proptest::collection::vec(rational(), nvars), count)
}

proptest! {
    #[test]
    fn addition_is_associative(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!((&a + &b) + &c, a + (b + c));
    }

    #[test]
    fn multiplicative_inverse_cancels(a in rational()) {
        prop_assume!(!a.is_zero());
        prop_assert_eq!(&a * &a.recip(), Rational::one());
    }

    #[test]
    fn multiplication_distributes(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
    }

    #[test]
    fn rank_is_transpose_invariant(m in small_matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn exactify_is_injective(a in any::<f64>(), b in any::<f64>()) {
        prop_assume!(a.is_finite() && b.is_finite() && a != b);
        prop_assert_ne!(Rational::from_f64(a).unwrap(), Rational::from_f64(b).unwrap());
    }

    #[test]
    fn tropical_sum_is_pointwise_max(
        f in tropical_poly(2),
        g in tropical_poly(2),
        xs in points(2, 8),
    ) {
        let sum = f.tropical_add(&g).unwrap();
        for x in &xs {
            let expected = f.evaluate(x).unwrap().max(g.evaluate(x).unwrap());
            prop_assert_eq!(sum.evaluate(x).unwrap(), expected);
        }
    }

    #[test]
    fn tropical_product_is_pointwise_sum(
        f in tropical_poly(2),
        g in tropical_poly(2),
        xs in points(2, 8),
    ) {
        let prod = f.tropical_mul(&g).unwrap();
        for x in &xs {
            let expected = f.evaluate(x).unwrap() + g.evaluate(x).unwrap();
            prop_assert_eq!(prod.evaluate(x).unwrap(), expected);
        }
    }

    #[test]
    fn semiring_laws_hold_as_functions(
        f in tropical_poly(2),
        g in tropical_poly(2),
        h in tropical_poly(2),
        xs in points(2, 6),
    ) {
        let add_comm = (f.tropical_add(&g).unwrap(), g.tropical_add(&f).unwrap());
        let add_assoc = (
            f.tropical_add(&g).unwrap().tropical_add(&h).unwrap(),
            f.tropical_add(&g.tropical_add(&h).unwrap()).unwrap(),
        );
        let add_idem = (f.tropical_add(&f).unwrap(), f.clone());
        let mul_comm = (f.tropical_mul(&g).unwrap(), g.tropical_mul(&f).unwrap());
        let mul_assoc = (
            f.tropical_mul(&g).unwrap().tropical_mul(&h).unwrap(),
            f.tropical_mul(&g.tropical_mul(&h).unwrap()).unwrap(),
        );
        let distrib = (
            f.tropical_mul(&g.tropical_add(&h).unwrap()).unwrap(),
            f.tropical_mul(&g).unwrap().tropical_add(&f.tropical_mul(&h).unwrap()).unwrap(),
        );
        for x in &xs {
            for (label, (lhs, rhs)) in [
                ("(+) commutative", &add_comm),
                ("(+) associative", &add_assoc),
                ("(+) idempotent", &add_idem),
                ("(*) commutative", &mul_comm),
                ("(*) associative", &mul_assoc),
                ("(*) distributes", &distrib),
            ] {
                prop_assert_eq!(
                    lhs.evaluate(x).unwrap(),
                    rhs.evaluate(x).unwrap(),
                    "{} at {:?}", label, x
                );
            }
        }
    }

    #[test]
    fn prune_preserves_the_function(f in tropical_poly(2), xs in points(2, 25)) {
        let pruned = f.prune();
        for x in &xs {
            prop_assert_eq!(pruned.evaluate(x).unwrap(), f.evaluate(x).unwrap());
        }
    }

    #[test]
    fn kept_monomials_have_full_dimensional_regions(f in tropical_poly(2)) {
        let keep = f.irredundant_indices();
        for i in 0..f.len() {
            let dim = f.monomial_region(i).unwrap().dimension().unwrap();
            if keep.contains(&i) {
                prop_assert_eq!(dim, 2, "kept monomial {} must span", i);
            } else {
                prop_assert!(dim < 2, "removed monomial {} has dimension {}", i, dim);
            }
        }
    }

    #[test]
    fn intersection_membership_is_conjunction(
        a in small_polyhedron(),
        b in small_polyhedron(),
        xs in points(2, 10),
    ) {
        let both = a.intersect(&b).unwrap();
        for x in &xs {
            prop_assert_eq!(
                both.contains(x).unwrap(),
                a.contains(x).unwrap() && b.contains(x).unwrap()
            );
        }
    }

    #[test]
    fn intersection_dimension_is_monotone(a in small_polyhedron(), b in small_polyhedron()) {
        let da = a.dimension().unwrap();
        let db = b.dimension().unwrap();
        let dab = a.intersect(&b).unwrap().dimension().unwrap();
        prop_assert!(dab <= da.min(db));
        prop_assert!((-1..=2).contains(&dab));
    }

    #[test]
    fn components_partition_the_inputs(segments in proptest::collection::vec((-6i64..=6, 0i64..=4), 1..=6)) {
        let polys: Vec<Polyhedron> = segments
            .iter()
            .map(|&(lo, len)| {
                Polyhedron::new(
                    Matrix::from_i64_rows(&[&[1], &[-1]]),
                    vec![Rational::from_integer(lo + len), Rational::from_integer(-lo)],
                )
                .unwrap()
            })
            .collect();
        let comps = connected_components(&polys);
        let mut seen: Vec<usize> = comps.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..polys.len()).collect::<Vec<_>>());
        // Any two distinct components must have empty pairwise intersections.
        for (i, ci) in comps.iter().enumerate() {
            for cj in comps.iter().skip(i + 1) {
                for &a in ci {
                    for &b in cj {
                        prop_assert!(polys[a].intersect(&polys[b]).unwrap().is_empty());
                    }
                }
            }
        }
    }
}

fn small_polyhedron() -> impl Strategy<Value = Polyhedron> {
    (1usize..=4).prop_flat_map(|rows| {
        proptest::collection::vec(
            (proptest::collection::vec(-3i64..=3, 2), -4i64..=4),
            rows..=rows,
        )
        .prop_map(|data| {
            let (a, b): (Vec<Vec<i64>>, Vec<i64>) = data.into_iter().unzip();
            Polyhedron::new(
                Matrix::from_rows(
                    a.into_iter()
                        .map(|row| row.into_iter().map(Rational::from_integer).collect())
                        .collect(),
                )
                .unwrap(),
                b.into_iter().map(Rational::from_integer).collect(),
            )
            .unwrap()
        })
    })
}
