//! Tropical Puiseux polynomials and rational maps over the max-plus semiring.
//!
//! A polynomial is a finite list of monomials `(coeff, exponent vector)` with
//! nonnegative rational exponents; as a function it evaluates to
//! `max_j (coeff_j + <exps_j, x>)`. A rational map is a formal quotient
//! `p (/) q` evaluating to `p(x) - q(x)`. Construction canonicalizes: equal
//! exponent vectors are merged keeping the larger coefficient (max-plus
//! addition is idempotent), and monomials are sorted, so structural equality
//! is meaningful.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{dot, Matrix, Rational};
use crate::polyhedra::Polyhedron;

/// One max-plus monomial `coeff + <exps, x>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Rational,
    pub exps: Vec<Rational>,
}

impl Monomial {
    pub fn new(coeff: Rational, exps: Vec<Rational>) -> Self {
        Monomial { coeff, exps }
    }

    fn affine_value(&self, x: &[Rational]) -> Rational {
        &self.coeff + dot(&self.exps, x)
    }
}

/// An affine map `x -> <gradient, x> + intercept`; the linear map a tropical
/// expression realizes on one of its regions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineMap {
    pub gradient: Vec<Rational>,
    pub intercept: Rational,
}

impl AffineMap {
    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        dot(&self.gradient, x) + &self.intercept
    }

    pub fn sub(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(a, b)| a - b)
                .collect(),
            intercept: &self.intercept - &other.intercept,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    nvars: usize,
    monomials: Vec<Monomial>,
}

impl TropicalPolynomial {
    /// Canonicalizing constructor. Rejects empty monomial lists (the tropical
    /// zero `-inf` is not representable), wrong exponent arities, and negative
    /// exponents (the Puiseux condition).
    pub fn new(nvars: usize, monomials: Vec<Monomial>) -> Result<Self> {
        if monomials.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        let mut merged: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for m in monomials {
            if m.exps.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: m.exps.len(),
                    context: "monomial exponent arity",
                });
            }
            if let Some(bad) = m.exps.iter().find(|e| e.is_negative()) {
                return Err(Error::NegativeExponent(bad.to_string()));
            }
            merged
                .entry(m.exps)
                .and_modify(|c| {
                    if m.coeff > *c {
                        *c = m.coeff.clone();
                    }
                })
                .or_insert(m.coeff);
        }
        Ok(TropicalPolynomial {
            nvars,
            monomials: merged
                .into_iter()
                .map(|(exps, coeff)| Monomial { coeff, exps })
                .collect(),
        })
    }

    /// The multiplicative unit: single monomial `0 * T^0`.
    pub fn unit(nvars: usize) -> Self {
        TropicalPolynomial {
            nvars,
            monomials: vec![Monomial::new(
                Rational::zero(),
                vec![Rational::zero(); nvars],
            )],
        }
    }

    /// The constant polynomial `c * T^0`.
    pub fn constant(nvars: usize, c: Rational) -> Self {
        TropicalPolynomial {
            nvars,
            monomials: vec![Monomial::new(c, vec![Rational::zero(); nvars])],
        }
    }

    /// The coordinate monomial `0 * T_j`.
    pub fn variable(nvars: usize, j: usize) -> Self {
        let mut exps = vec![Rational::zero(); nvars];
        exps[j] = Rational::one();
        TropicalPolynomial {
            nvars,
            monomials: vec![Monomial::new(Rational::zero(), exps)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Number of monomials; at least 1 by construction.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    /// Max-plus evaluation.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        self.check_arity(x)?;
        Ok(self
            .monomials
            .iter()
            .map(|m| m.affine_value(x))
            .max()
            .expect("non-empty"))
    }

    /// Min counterpart over the same monomials (the min-conjugate value).
    pub fn evaluate_min(&self, x: &[Rational]) -> Result<Rational> {
        self.check_arity(x)?;
        Ok(self
            .monomials
            .iter()
            .map(|m| m.affine_value(x))
            .min()
            .expect("non-empty"))
    }

    fn check_arity(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
                context: "evaluation point arity",
            });
        }
        Ok(())
    }

    fn check_same_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
                context: "tropical operands",
            });
        }
        Ok(())
    }

    /// Tropical sum: pointwise max; concatenates monomials and canonicalizes.
    pub fn tropical_add(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut monomials = self.monomials.clone();
        monomials.extend(other.monomials.iter().cloned());
        TropicalPolynomial::new(self.nvars, monomials)
    }

    /// Tropical product: pointwise sum; all pairwise monomial products
    /// (coefficients add, exponents add).
    pub fn tropical_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut monomials = Vec::with_capacity(self.len() * other.len());
        for a in &self.monomials {
            for b in &other.monomials {
                monomials.push(Monomial {
                    coeff: &a.coeff + &b.coeff,
                    exps: a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect(),
                });
            }
        }
        TropicalPolynomial::new(self.nvars, monomials)
    }

    /// Tropical power by a nonnegative rational: scales every coefficient and
    /// exponent by `c` (pointwise `c * f(x)`, which commutes with max only
    /// for `c >= 0`).
    pub fn tropical_pow(&self, c: &Rational) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::NegativePower(c.to_string()));
        }
        let monomials = self
            .monomials
            .iter()
            .map(|m| Monomial {
                coeff: &m.coeff * c,
                exps: m.exps.iter().map(|e| e * c).collect(),
            })
            .collect();
        TropicalPolynomial::new(self.nvars, monomials)
    }

    /// The polyhedron on which monomial `i` attains the maximum: one row per
    /// monomial `j` (including the trivial row `j = i`), namely
    /// `<exps_j - exps_i, x> <= coeff_i - coeff_j`.
    pub fn monomial_region(&self, i: usize) -> Result<Polyhedron> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        let pivot = &self.monomials[i];
        let rows = self
            .monomials
            .iter()
            .map(|m| {
                m.exps
                    .iter()
                    .zip(&pivot.exps)
                    .map(|(aj, ai)| aj - ai)
                    .collect()
            })
            .collect();
        let rhs = self
            .monomials
            .iter()
            .map(|m| &pivot.coeff - &m.coeff)
            .collect();
        Polyhedron::new(Matrix::from_rows(rows)?, rhs)
    }

    /// Indices of irredundant monomials: those whose region is
    /// full-dimensional. The others never attain the maximum on an open set
    /// and can be dropped without changing the function.
    pub fn irredundant_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                self.monomial_region(i)
                    .expect("index in range")
                    .is_full_dimensional()
            })
            .collect()
    }

    /// Removes every monomial whose region has dimension below the variable
    /// count. The result evaluates identically everywhere.
    pub fn prune(&self) -> Self {
        self.prune_detailed().0
    }

    /// Pruned polynomial together with the removed monomial indices.
    pub fn prune_detailed(&self) -> (Self, Vec<usize>) {
        let keep = self.irredundant_indices();
        let removed = (0..self.len()).filter(|i| !keep.contains(i)).collect();
        let monomials = keep.iter().map(|&i| self.monomials[i].clone()).collect();
        (
            TropicalPolynomial {
                nvars: self.nvars,
                monomials,
            },
            removed,
        )
    }

    /// The affine map of monomial `i`.
    pub fn affine_map(&self, i: usize) -> AffineMap {
        AffineMap {
            gradient: self.monomials[i].exps.clone(),
            intercept: self.monomials[i].coeff.clone(),
        }
    }

    /// Random polynomial with coefficients and exponents drawn uniformly from
    /// `[0, 1)` as exactified doubles; reproducible from the seed.
    pub fn random(nvars: usize, nmono: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut monomials = Vec::with_capacity(nmono);
        for _ in 0..nmono {
            let coeff = Rational::from_f64(rng.gen::<f64>())?;
            let exps = (0..nvars)
                .map(|_| Rational::from_f64(rng.gen::<f64>()))
                .collect::<Result<Vec<_>>>()?;
            monomials.push(Monomial { coeff, exps });
        }
        TropicalPolynomial::new(nvars, monomials)
    }

    /// Exponent rows as a matrix (one row per monomial).
    pub fn exponent_matrix(&self) -> Matrix {
        Matrix::from_rows(self.monomials.iter().map(|m| m.exps.clone()).collect())
            .expect("uniform arity")
    }
}

impl fmt::Display for TropicalPolynomial {
    /// One monomial per line: `coeff | e1 e2 ... en`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.monomials {
            let exps = m
                .exps
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(f, "{} | {}", m.coeff, exps)?;
        }
        Ok(())
    }
}

impl FromStr for TropicalPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut monomials = Vec::new();
        let mut nvars = None;
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (coeff, exps) = line.split_once('|').ok_or_else(|| {
                Error::Parse(format!("line {}: expected 'coeff | exponents'", lineno + 1))
            })?;
            let coeff: Rational = coeff.parse()?;
            let exps: Vec<Rational> = exps
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_>>()?;
            if let Some(n) = nvars {
                if exps.len() != n {
                    return Err(Error::Parse(format!(
                        "line {}: {} exponents, expected {}",
                        lineno + 1,
                        exps.len(),
                        n
                    )));
                }
            } else {
                nvars = Some(exps.len());
            }
            monomials.push(Monomial { coeff, exps });
        }
        let nvars = nvars.ok_or(Error::EmptyPolynomial)?;
        TropicalPolynomial::new(nvars, monomials)
    }
}

impl Serialize for TropicalPolynomial {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.monomials.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TropicalPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let monomials = Vec::<Monomial>::deserialize(deserializer)?;
        let nvars = monomials
            .first()
            .map(|m| m.exps.len())
            .ok_or_else(|| serde::de::Error::custom("empty tropical polynomial"))?;
        TropicalPolynomial::new(nvars, monomials).map_err(serde::de::Error::custom)
    }
}

/// Formal quotient `p (/) q`, evaluating as `p(x) - q(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropicalRationalMap {
    pub numerator: TropicalPolynomial,
    pub denominator: TropicalPolynomial,
}

impl TropicalRationalMap {
    pub fn new(numerator: TropicalPolynomial, denominator: TropicalPolynomial) -> Result<Self> {
        if numerator.nvars() != denominator.nvars() {
            return Err(Error::DimensionMismatch {
                expected: numerator.nvars(),
                got: denominator.nvars(),
                context: "rational map numerator/denominator arity",
            });
        }
        Ok(TropicalRationalMap {
            numerator,
            denominator,
        })
    }

    /// `p` viewed as `p (/) 0`.
    pub fn from_polynomial(p: TropicalPolynomial) -> Self {
        let unit = TropicalPolynomial::unit(p.nvars());
        TropicalRationalMap {
            numerator: p,
            denominator: unit,
        }
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        Ok(self.numerator.evaluate(x)? - self.denominator.evaluate(x)?)
    }

    /// Irredundant monomial counts `(m, n)` of numerator and denominator
    /// after pruning.
    pub fn monomial_complexity(&self) -> (usize, usize) {
        (self.numerator.prune().len(), self.denominator.prune().len())
    }

    pub fn prune(&self) -> Self {
        TropicalRationalMap {
            numerator: self.numerator.prune(),
            denominator: self.denominator.prune(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    /// max{0, 1+x, 1+2x}: worked one-variable example with three regions.
    pub(crate) fn example_one() -> TropicalPolynomial {
        TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(0), vec![r(0)]),
                Monomial::new(r(1), vec![r(1)]),
                Monomial::new(r(1), vec![r(2)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_picks_the_max_term() {
        let f = example_one();
        assert_eq!(f.evaluate(&[r(-2)]).unwrap(), r(0));
        assert_eq!(f.evaluate(&[r(1)]).unwrap(), r(3));
        // A dominating monomial contributes its affine value.
        assert_eq!(f.evaluate(&[r(10)]).unwrap(), r(21));
        assert!(f.evaluate(&[r(0), r(0)]).is_err());
    }

    #[test]
    fn idempotent_addition_merges_equal_exponents() {
        let a = TropicalPolynomial::unit(1);
        let sum = a.tropical_add(&a).unwrap();
        assert_eq!(sum.len(), 1);
        assert_eq!(sum, a);
    }

    #[test]
    fn product_adds_coefficients_and_exponents() {
        let a = TropicalPolynomial::new(1, vec![Monomial::new(r(1), vec![r(1)])]).unwrap();
        let b = TropicalPolynomial::new(1, vec![Monomial::new(r(1), vec![r(2)])]).unwrap();
        let prod = a.tropical_mul(&b).unwrap();
        assert_eq!(prod.len(), 1);
        assert_eq!(prod.monomials()[0], Monomial::new(r(2), vec![r(3)]));
    }

    #[test]
    fn square_of_binomial_equals_doubled_function() {
        // (0 (+) 0 T)^2 evaluates as 2*max{0, x} everywhere.
        let f = TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(0), vec![r(0)]),
                Monomial::new(r(0), vec![r(1)]),
            ],
        )
        .unwrap();
        let sq = f.tropical_mul(&f).unwrap();
        assert_eq!(sq.len(), 3);
        for k in -50..50 {
            let x = [Rational::new(k, 7)];
            let expected = r(2) * f.evaluate(&x).unwrap();
            assert_eq!(sq.evaluate(&x).unwrap(), expected);
        }
        // The power by scalar 2 gives the same function with fewer monomials.
        let pow = f.tropical_pow(&r(2)).unwrap();
        for k in -20..20 {
            let x = [Rational::new(k, 3)];
            assert_eq!(pow.evaluate(&x).unwrap(), sq.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn negative_power_is_rejected() {
        let f = TropicalPolynomial::unit(2);
        assert!(f.tropical_pow(&r(-1)).is_err());
        assert!(f.tropical_pow(&Rational::new(1, 2)).is_ok());
    }

    #[test]
    fn negative_exponent_is_rejected() {
        let bad = TropicalPolynomial::new(1, vec![Monomial::new(r(0), vec![r(-1)])]);
        assert!(bad.is_err());
    }

    #[test]
    fn monomial_regions_of_example_one() {
        let f = example_one();
        // Index 0 (constant term): {x <= -1}.
        let m0 = f.monomial_region(0).unwrap();
        assert!(m0.contains(&[r(-1)]).unwrap());
        assert!(m0.contains(&[r(-5)]).unwrap());
        assert!(!m0.contains(&[Rational::new(-1, 2)]).unwrap());
        // Index 2 (T^2 term): {x >= 0}.
        let m2 = f.monomial_region(2).unwrap();
        assert!(m2.contains(&[r(0)]).unwrap());
        assert!(m2.contains(&[r(7)]).unwrap());
        assert!(!m2.contains(&[r(-1)]).unwrap());
    }

    #[test]
    fn monomial_region_empty_case() {
        // max{1+2x, 1+3x, 2+4x}: the middle monomial needs both x >= 0 and
        // x <= -1, so its region is empty and pruning drops it.
        let f = TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(1), vec![r(2)]),
                Monomial::new(r(1), vec![r(3)]),
                Monomial::new(r(2), vec![r(4)]),
            ],
        )
        .unwrap();
        assert!(f.monomial_region(1).unwrap().is_empty());
        let (pruned, removed) = f.prune_detailed();
        assert_eq!(removed, vec![1]);
        assert_eq!(pruned.len(), 2);
    }

    #[test]
    fn prune_removes_never_winning_monomial() {
        // max{1, 1+x, 1+2x}: the middle term only wins on {x = 0}.
        let f = TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(1), vec![r(0)]),
                Monomial::new(r(1), vec![r(1)]),
                Monomial::new(r(1), vec![r(2)]),
            ],
        )
        .unwrap();
        let (pruned, removed) = f.prune_detailed();
        assert_eq!(removed, vec![1]);
        assert_eq!(pruned.len(), 2);
        for k in -30..30 {
            let x = [Rational::new(k, 4)];
            assert_eq!(pruned.evaluate(&x).unwrap(), f.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn prune_keeps_single_monomial() {
        let f = TropicalPolynomial::new(2, vec![Monomial::new(r(3), vec![r(1), r(2)])]).unwrap();
        assert_eq!(f.prune(), f);
    }

    #[test]
    fn monomial_complexity_counts_after_pruning() {
        let p = TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(1), vec![r(0)]),
                Monomial::new(r(1), vec![r(1)]),
                Monomial::new(r(1), vec![r(2)]),
            ],
        )
        .unwrap();
        let f = TropicalRationalMap::from_polynomial(p);
        assert_eq!(f.monomial_complexity(), (2, 1));
        let c = TropicalRationalMap::new(
            TropicalPolynomial::constant(1, r(5)),
            TropicalPolynomial::constant(1, r(2)),
        )
        .unwrap();
        assert_eq!(c.monomial_complexity(), (1, 1));
    }

    #[test]
    fn random_polynomial_is_reproducible_and_in_range() {
        let f = TropicalPolynomial::random(3, 20, 42).unwrap();
        assert_eq!(f.len(), 20);
        for m in f.monomials() {
            assert!(!m.coeff.is_negative() && m.coeff < r(1));
            for e in &m.exps {
                assert!(!e.is_negative() && *e < r(1));
            }
        }
        assert_eq!(TropicalPolynomial::random(3, 20, 42).unwrap(), f);
        assert_ne!(TropicalPolynomial::random(3, 20, 43).unwrap(), f);
    }

    #[test]
    fn text_format_round_trips() {
        let f = example_one();
        let text = f.to_string();
        let back: TropicalPolynomial = text.parse().unwrap();
        assert_eq!(back, f);
        let json = serde_json::to_string(&f).unwrap();
        let back: TropicalPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rational_map_evaluates_as_difference() {
        let p = example_one();
        let q = TropicalPolynomial::new(
            1,
            vec![
                Monomial::new(r(0), vec![r(0)]),
                Monomial::new(r(0), vec![r(1)]),
            ],
        )
        .unwrap();
        let f = TropicalRationalMap::new(p.clone(), q.clone()).unwrap();
        let x = [r(2)];
        assert_eq!(
            f.evaluate(&x).unwrap(),
            p.evaluate(&x).unwrap() - q.evaluate(&x).unwrap()
        );
    }
}
