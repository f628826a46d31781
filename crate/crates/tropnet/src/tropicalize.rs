//! Conversion of ReLU networks into tropical Puiseux rational maps.
//!
//! Each coordinate of every layer output is carried as a quotient of tropical
//! polynomials `F (/) G`. A layer with weights `A = A+ - A-` (entrywise
//! nonnegative split) and bias `b` updates the pair as
//!
//! ```text
//! H_i = b_i (*) prod_j F_j^{A+_ij} (*) prod_j G_j^{A-_ij}
//! G'_i =       prod_j F_j^{A-_ij} (*) prod_j G_j^{A+_ij}
//! F'_i = H_i (+) G'_i        (when the layer is followed by ReLU)
//! F'_i = H_i                 (last layer without a final activation)
//! ```
//!
//! with tropical products and powers, so exponents stay nonnegative rationals
//! and the resulting map evaluates exactly to the network output.

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::network::Network;
use crate::tropical::{TropicalPolynomial, TropicalRationalMap};

/// A tropicalized output coordinate with the formal term counts of the
/// construction: the number of max-terms written down before the final
/// canonical merge collapses repeated exponent vectors (the two tracks always
/// share the all-inactive corner monomial, so the stored numerator can be one
/// shorter than the formal sum).
#[derive(Debug, Clone)]
pub struct TropicalizedOutput {
    pub map: TropicalRationalMap,
    pub formal_numerator_terms: usize,
    pub formal_denominator_terms: usize,
}

/// One rational map per output coordinate.
pub fn tropicalize(net: &Network) -> Result<Vec<TropicalRationalMap>> {
    Ok(tropicalize_detailed(net)?
        .into_iter()
        .map(|out| out.map)
        .collect())
}

/// Tropicalization with formal term counts per output coordinate.
pub fn tropicalize_detailed(net: &Network) -> Result<Vec<TropicalizedOutput>> {
    let n = net.input_dim();
    let depth = net.layers().len();
    let mut numerators: Vec<TropicalPolynomial> =
        (0..n).map(|j| TropicalPolynomial::variable(n, j)).collect();
    let mut denominators: Vec<TropicalPolynomial> = vec![TropicalPolynomial::unit(n); n];
    let mut formal_terms = vec![(1usize, 1usize); n];

    for (idx, layer) in net.layers().iter().enumerate() {
        let apply_relu = idx + 1 < depth || net.final_activation();
        let rows = layer.weights.rows();
        let mut next_num = Vec::with_capacity(rows);
        let mut next_den = Vec::with_capacity(rows);
        let mut next_terms = Vec::with_capacity(rows);
        for i in 0..rows {
            let mut h = TropicalPolynomial::constant(n, layer.bias[i].clone());
            let mut g = TropicalPolynomial::unit(n);
            for (j, w) in layer.weights.row(i).iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                if w.is_positive() {
                    h = h.tropical_mul(&numerators[j].tropical_pow(w)?)?;
                    g = g.tropical_mul(&denominators[j].tropical_pow(w)?)?;
                } else {
                    let mag = w.abs();
                    h = h.tropical_mul(&denominators[j].tropical_pow(&mag)?)?;
                    g = g.tropical_mul(&numerators[j].tropical_pow(&mag)?)?;
                }
            }
            let formal = if apply_relu {
                (h.len() + g.len(), g.len())
            } else {
                (h.len(), g.len())
            };
            let f = if apply_relu { h.tropical_add(&g)? } else { h };
            next_num.push(f);
            next_den.push(g);
            next_terms.push(formal);
        }
        numerators = next_num;
        denominators = next_den;
        formal_terms = next_terms;
    }

    numerators
        .into_iter()
        .zip(denominators)
        .zip(formal_terms)
        .map(|((p, q), (fp, fq))| {
            Ok(TropicalizedOutput {
                map: TropicalRationalMap::new(p, q)?,
                formal_numerator_terms: fp,
                formal_denominator_terms: fq,
            })
        })
        .collect()
}

/// The single rational map of a scalar-output network.
pub fn tropicalize_scalar(net: &Network) -> Result<TropicalRationalMap> {
    if net.output_dim() != 1 {
        return Err(Error::ScalarOutputRequired(net.output_dim()));
    }
    Ok(tropicalize(net)?.pop().expect("one output"))
}

/// Exact equality check `evaluate(tropicalize(net), x) == forward(net, x)`
/// on a single point; the workhorse behind the oracle tests.
pub fn agrees_at(net: &Network, maps: &[TropicalRationalMap], x: &[Rational]) -> Result<bool> {
    let out = net.forward(x)?;
    for (k, map) in maps.iter().enumerate() {
        if map.evaluate(x)? != out[k] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Matrix;
    use crate::network::Layer;
    use crate::tropical::Monomial;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn single_neuron(weight: i64, final_activation: bool) -> Network {
        Network::new(
            vec![Layer {
                weights: Matrix::from_i64_rows(&[&[weight]]),
                bias: vec![r(0)],
            }],
            final_activation,
        )
        .unwrap()
    }

    fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| Rational::from_f64(rng.gen_range(-10.0..10.0)).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn relu_of_identity_is_max_x_zero() {
        let net = single_neuron(1, true);
        let map = tropicalize_scalar(&net).unwrap();
        let expected_num = TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(0), vec![r(0)]),
                Monomial::new(r(0), vec![r(1)]),
            ],
        )
        .unwrap();
        assert_eq!(map.numerator, expected_num);
        assert_eq!(map.denominator, TropicalPolynomial::unit(1));
    }

    #[test]
    fn negative_weight_routes_through_denominator() {
        let net = single_neuron(-1, true);
        let map = tropicalize_scalar(&net).unwrap();
        // max(0, -x) realized with nonnegative exponents: (0 (+) 0 T) (/) 0 T.
        for x in random_points(1, 100, 3) {
            assert_eq!(
                map.evaluate(&x).unwrap(),
                net.forward(&x).unwrap()[0],
                "at {x:?}"
            );
        }
        for m in map
            .numerator
            .monomials()
            .iter()
            .chain(map.denominator.monomials())
        {
            for e in &m.exps {
                assert!(!e.is_negative());
            }
        }
    }

    #[test]
    fn oracle_equality_on_random_nets() {
        for (arch, base_seed) in [
            (vec![2usize, 3, 1], 100u64),
            (vec![3, 2, 1], 200),
            (vec![2, 2, 2, 1], 300),
        ] {
            for s in 0..3 {
                let net = Network::random_with_biases(&arch, base_seed + s).unwrap();
                let maps = tropicalize(&net).unwrap();
                for x in random_points(arch[0], 25, base_seed + 7 * s + 1) {
                    assert!(
                        agrees_at(&net, &maps, &x).unwrap(),
                        "disagreement for {arch:?} seed {}",
                        base_seed + s
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_equality_with_final_activation() {
        let mut layers = Vec::new();
        let net = Network::random_with_biases(&[2, 3, 1], 17).unwrap();
        for l in net.layers() {
            layers.push(Layer {
                weights: l.weights.clone(),
                bias: l.bias.clone(),
            });
        }
        let with_sigma = Network::new(layers, true).unwrap();
        let maps = tropicalize(&with_sigma).unwrap();
        for x in random_points(2, 50, 18) {
            assert!(agrees_at(&with_sigma, &maps, &x).unwrap());
        }
    }

    #[test]
    fn multi_output_networks_get_one_map_per_coordinate() {
        let net = Network::random_with_biases(&[2, 3, 2], 23).unwrap();
        let maps = tropicalize(&net).unwrap();
        assert_eq!(maps.len(), 2);
        for x in random_points(2, 20, 24) {
            assert!(agrees_at(&net, &maps, &x).unwrap());
        }
    }

    #[test]
    fn exponents_stay_nonnegative_on_deep_nets() {
        let net = Network::random_with_biases(&[2, 2, 2, 1], 31).unwrap();
        let map = tropicalize_scalar(&net).unwrap();
        for m in map
            .numerator
            .monomials()
            .iter()
            .chain(map.denominator.monomials())
        {
            assert!(m.exps.iter().all(|e| !e.is_negative()));
        }
    }

    #[test]
    fn monomial_growth_with_width_and_depth() {
        let total = |m: &TropicalRationalMap| m.numerator.len() + m.denominator.len();
        // Wider hidden layers produce more native monomials.
        let narrow = tropicalize_scalar(&Network::random(&[2, 2, 1], 5).unwrap()).unwrap();
        let wide = tropicalize_scalar(&Network::random(&[2, 6, 1], 5).unwrap()).unwrap();
        assert!(total(&wide) > total(&narrow));
        // So does an extra hidden layer at the same width.
        for seed in 60..68 {
            let shallow = tropicalize_scalar(&Network::random(&[2, 2, 1], seed).unwrap()).unwrap();
            let deep = tropicalize_scalar(&Network::random(&[2, 2, 2, 1], seed).unwrap()).unwrap();
            assert!(
                total(&deep) > total(&shallow),
                "seed {seed}: deep {} vs shallow {}",
                total(&deep),
                total(&shallow)
            );
        }
    }
}
