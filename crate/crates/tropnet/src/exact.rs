//! Arbitrary-precision rational scalars and dense exact linear algebra.
//!
//! Every symbolic computation in this crate runs over [`Rational`], so results
//! are exact: no tolerances, no rounding. Values are always stored reduced
//! (gcd 1, positive denominator), which makes equality, ordering and hashing
//! canonical.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, kept fully reduced after every operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `numer/denom`, reducing to canonical form.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Converts a finite IEEE-754 double to the exact dyadic rational it
    /// represents. Rejects NaN and infinities.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        BigRational::from_float(x)
            .map(Rational)
            .ok_or(Error::NonFinite(x))
    }

    /// Correctly rounded nearest double (ties to even); bit-identical
    /// round-trip for rationals that came from a finite double.
    pub fn to_f64(&self) -> f64 {
        use num_integer::Integer;
        if self.is_zero() {
            return 0.0;
        }
        let neg = self.is_negative();
        let p = self.0.numer().magnitude();
        let q = self.0.denom().magnitude();

        // Search the exponent e with value = (n + rem/den) * 2^e and n in the
        // 53-bit mantissa window; e is floored at the subnormal limit.
        let mut e: i64 = p.bits() as i64 - q.bits() as i64 - 53;
        loop {
            let e_eff = e.max(-1074);
            let (num2, den2) = if e_eff <= 0 {
                (p << ((-e_eff) as u64), q.clone())
            } else {
                (p.clone(), q << (e_eff as u64))
            };
            let (quot, rem) = num2.div_rem(&den2);
            let bits = quot.bits() as i64;
            if bits > 53 || (bits < 53 && e_eff > -1074) {
                e = e_eff + (bits - 53);
                continue;
            }
            // Round to nearest, ties to even.
            let mut n = quot;
            let round_up = match (&rem << 1u8).cmp(&den2) {
                Ordering::Greater => true,
                Ordering::Equal => n.is_odd(),
                Ordering::Less => false,
            };
            if round_up {
                n += 1u8;
            }
            let mut e_out = e_eff;
            if n.bits() > 53 {
                n >>= 1u8; // carry into the next binade; the shifted bit is 0
                e_out += 1;
            }
            let n64 = n.to_u64().expect("mantissa fits in 64 bits");
            let sign_bit = (neg as u64) << 63;
            return if n64 == 0 {
                f64::from_bits(sign_bit)
            } else if n.bits() == 53 {
                let biased = e_out + 52 + 1023;
                if biased >= 2047 {
                    if neg {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                } else {
                    f64::from_bits(sign_bit | ((biased as u64) << 52) | (n64 & ((1 << 52) - 1)))
                }
            } else {
                // Subnormal: e_out = -1074 and fewer than 53 mantissa bits.
                f64::from_bits(sign_bit | n64)
            };
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Rational {
    /// Canonical text form `p/q`, with `/q` omitted when the denominator is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
        };
        match s.split_once('/') {
            Some((p, q)) => {
                let numer = parse_int(p)?;
                let denom = parse_int(q)?;
                if denom.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    /// Accepts the canonical `"p/q"` string, plain integer strings, or JSON
    /// numbers (exactified bit-for-bit when floating).
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\" string or a JSON number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
                Rational::from_f64(v).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

/// Exact inner product; lengths must match.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    got: r.len(),
                    context: "matrix row width",
                });
            }
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer literals, mainly for tests.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
        .expect("ragged integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        self.data.chunks(self.cols)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Matrix-vector product `Mx`.
    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
                context: "matrix-vector product",
            });
        }
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// Returns the submatrix with the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Matrix> {
        let mut rows = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.rows,
                });
            }
            rows.push(self.row(i).to_vec());
        }
        Matrix::from_rows(rows)
    }

    /// Stacks `other` below `self`; column counts must agree.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
                context: "vertical stack",
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Exact rank by fraction-free (Bareiss) elimination. Rows are first
    /// scaled to integers; the two-term update with exact division keeps
    /// intermediate entries from exploding.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Clear denominators row by row; scaling rows does not change rank.
        let mut m: Vec<Vec<BigInt>> = self
            .row_iter()
            .map(|r| {
                let lcm = r.iter().fold(BigInt::one(), |acc, v| {
                    num_integer::lcm(acc, v.denom().clone())
                });
                r.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
            })
            .collect();
        let mut rank = 0usize;
        let mut prev = BigInt::one();
        for col in 0..self.cols {
            let Some(pivot_row) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot_row);
            for i in rank + 1..self.rows {
                for j in col + 1..self.cols {
                    let num = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                    m[i][j] = num / &prev;
                }
                m[i][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in self.row_iter() {
            writeln!(
                f,
                "  [{}]",
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.row_iter().map(|r| r.to_vec()))
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Rational>> = Vec::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(de::Error::custom)
    }
}

/// Total order helper for sorting rational vectors lexicographically.
pub fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent bit-level decomposition of a finite double, used as the
    /// oracle for `Rational::from_f64`.
    fn dyadic_from_bits(x: f64) -> Rational {
        assert!(x.is_finite());
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (mantissa, exp) = if exp_bits == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mut numer = BigInt::from(mantissa) * BigInt::from(sign);
        let mut denom = BigInt::one();
        if exp >= 0 {
            numer <<= exp as usize;
        } else {
            denom <<= (-exp) as usize;
        }
        format!("{numer}/{denom}").parse().unwrap()
    }

    #[test]
    fn exactify_simple_dyadics() {
        assert_eq!(Rational::from_f64(0.5).unwrap().to_string(), "1/2");
        assert_eq!(Rational::from_f64(0.0).unwrap().to_string(), "0");
        assert_eq!(Rational::from_f64(-3.0).unwrap().to_string(), "-3");
    }

    #[test]
    fn exactify_tenth_matches_bit_level_oracle() {
        let got = Rational::from_f64(0.1).unwrap();
        assert_eq!(got, dyadic_from_bits(0.1));
        assert_eq!(got.to_string(), "3602879701896397/36028797018963968");
    }

    #[test]
    fn exactify_rejects_non_finite() {
        assert!(Rational::from_f64(f64::NAN).is_err());
        assert!(Rational::from_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn exactify_round_trips_bit_identically() {
        let samples = [
            0.1,
            -0.3,
            1.5e-300,
            -7.25e120,
            f64::MIN_POSITIVE,
            2.225_073_858_507_2e-310, // subnormal
            123456.789,
            0.0,
            -0.0,
        ];
        for &x in &samples {
            let r = Rational::from_f64(x).unwrap();
            assert_eq!(r, dyadic_from_bits(x), "bit oracle disagrees at {x:e}");
            let back = r.to_f64();
            assert_eq!(back.to_bits(), (x + 0.0).to_bits(), "round trip at {x:e}");
        }
    }

    #[test]
    fn to_f64_rounds_correctly_on_non_dyadics() {
        // The nearest double to each fraction is the IEEE result of the
        // floating division.
        let cases = [
            (1i64, 3i64),
            (-2, 3),
            (1, 7),
            (22, 7),
            (355, 113),
            (-97, 61),
        ];
        for (p, q) in cases {
            let r = Rational::new(p, q);
            let expected = p as f64 / q as f64;
            assert_eq!(
                r.to_f64().to_bits(),
                expected.to_bits(),
                "mis-rounded {p}/{q}"
            );
        }
    }

    #[test]
    fn to_f64_halfway_ties_to_even() {
        // 2^52 + 1/2 is exactly between two representable integers; ties go
        // to the even mantissa (2^52).
        let base = BigInt::from(1u64 << 52);
        let r: Rational = format!("{}/2", &base * 2 + 1).parse().unwrap();
        assert_eq!(r.to_f64(), (1u64 << 52) as f64);
        // 2^52 + 3/2 rounds up to the even 2^52 + 2.
        let r: Rational = format!("{}/2", &base * 2 + 3).parse().unwrap();
        assert_eq!(r.to_f64(), ((1u64 << 52) + 2) as f64);
    }

    #[test]
    fn to_f64_saturates_and_handles_tiny() {
        let huge: Rational = format!("{}", BigInt::one() << 1100).parse().unwrap();
        assert_eq!(huge.to_f64(), f64::INFINITY);
        assert_eq!((-huge).to_f64(), f64::NEG_INFINITY);
        let tiny: Rational = format!("1/{}", BigInt::one() << 1200).parse().unwrap();
        assert_eq!(tiny.to_f64(), 0.0);
    }

    #[test]
    fn display_and_parse() {
        let r = Rational::new(-6, 4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!("-3/2".parse::<Rational>().unwrap(), r);
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_integer(7));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn rank_identity_and_dependent_rows() {
        assert_eq!(Matrix::identity(2).rank(), 2);
        let m = Matrix::from_i64_rows(&[&[1, 1], &[2, 2]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_row_sum_dependency() {
        // Third row is the sum of the first two, so the rank drops to 2.
        let m = Matrix::from_i64_rows(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_with_rational_entries() {
        let m = Matrix::from_rows(vec![
            vec![Rational::new(1, 2), Rational::new(1, 3)],
            vec![Rational::new(3, 2), Rational::one()],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn serde_rational_accepts_numbers_and_strings() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/2", 3, 0.25]"#).unwrap();
        assert_eq!(v[0], Rational::new(1, 2));
        assert_eq!(v[1], Rational::from_integer(3));
        assert_eq!(v[2], Rational::new(1, 4));
        assert_eq!(serde_json::to_string(&v[0]).unwrap(), "\"1/2\"");
    }
}
