//! Exact integer and rational utilities.
//!
//! Everything here works on `i128` with checked arithmetic. Magnitudes that
//! appear in the sieve computations (phase numerators, `b·g(m, n)`, Farey
//! cross products) stay far below 2^127 at desk scale; anything larger is
//! reported as [`Error::Overflow`] rather than wrapped.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// A reduced fraction `num/den` with `den >= 1` and `gcd(|num|, den) = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Reduces `num/den` to lowest terms with a positive denominator.
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        if num == i128::MIN || den == i128::MIN {
            return Err(Error::Overflow("rational reduction"));
        }
        let g = gcd(num, den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Ok(Rational { num, den })
    }

    pub const fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn abs(&self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den,
        }
    }

    pub fn signum(&self) -> i128 {
        self.num.signum()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        // Reduce through the gcd of the denominators to keep intermediates small.
        let g = gcd(self.den, rhs.den);
        let l = self.den / g;
        let r = rhs.den / g;
        let num = self
            .num
            .checked_mul(r)
            .and_then(|x| rhs.num.checked_mul(l).and_then(|y| x.checked_add(y)))
            .ok_or(Error::Overflow("rational addition"))?;
        let den = l
            .checked_mul(rhs.den)
            .ok_or(Error::Overflow("rational addition"))?;
        Rational::new(num, den)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&rhs.checked_neg()?)
    }

    pub fn checked_neg(&self) -> Result<Self> {
        Ok(Rational {
            num: self.num.checked_neg().ok_or(Error::Overflow("rational negation"))?,
            den: self.den,
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let g1 = gcd(self.num, rhs.den).max(1);
        let g2 = gcd(rhs.num, self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or(Error::Overflow("rational multiplication"))?;
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or(Error::Overflow("rational multiplication"))?;
        Rational::new(num, den)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.num == 0 {
            return Err(Error::ZeroDenominator);
        }
        self.checked_mul(&Rational::new(rhs.den, rhs.num)?)
    }

    pub fn recip(&self) -> Result<Self> {
        Rational::new(self.den, self.num)
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> i128 {
        -(-self.num).div_euclid(self.den)
    }

    /// Representative of `self` modulo 1 in `[0, 1)`.
    pub fn frac(&self) -> Self {
        Rational {
            num: self.num.rem_euclid(self.den),
            den: self.den,
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Both parts are exact below 2^53; beyond that the quotient is still
        // within a few ulps.
        self.num as f64 / self.den as f64
    }

    fn to_big(self) -> (BigInt, BigInt) {
        (BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => {
                let (a, b) = self.to_big();
                let (c, d) = other.to_big();
                (a * d).cmp(&(c * b))
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

/// Parses `"a/b"` or a bare integer `"a"`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<i128>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(&rhs)
                    .unwrap_or_else(|e| panic!("rational {}: {e}", stringify!($method)))
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.checked_neg().expect("rational negation overflow")
    }
}

/// Returns the unique reduced representative of `num/den`.
pub fn reduce(num: i128, den: i128) -> Result<Rational> {
    Rational::new(num, den)
}

/// Prime factorization of `n >= 1` by trial division, as `(prime, exponent)`.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n as u128) == [(n as u128, 1)]
}

/// Euler's totient.
pub fn euler_phi(q: u64) -> Result<u64> {
    if q == 0 {
        return domain("euler_phi is undefined at 0");
    }
    Ok(factorize(q as u128)
        .into_iter()
        .fold(q, |acc, (p, _)| acc / p as u64 * (p as u64 - 1)))
}

/// Number of positive divisors of `|k|`.
pub fn divisor_count(k: i128) -> Result<u64> {
    if k == 0 {
        return domain("divisor count is undefined at 0");
    }
    Ok(factorize(k.unsigned_abs())
        .into_iter()
        .map(|(_, e)| e as u64 + 1)
        .product())
}

/// All ordered pairs `(u, v)` with `u·v = k`, sorted by `u` ascending.
pub fn divisor_pairs(k: i128) -> Result<Vec<(i128, i128)>> {
    if k == 0 {
        return domain("0 has infinitely many factorizations");
    }
    let n = k.unsigned_abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    let positive: Vec<i128> = small
        .into_iter()
        .chain(large.into_iter().rev())
        .map(|d| d as i128)
        .collect();

    let mut pairs: Vec<(i128, i128)> = positive
        .iter()
        .rev()
        .map(|&d| (-d, k / -d))
        .chain(positive.iter().map(|&d| (d, k / d)))
        .collect();
    debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
    pairs.shrink_to_fit();
    Ok(pairs)
}

/// Exact value of a finite `f64` as `num/den` with `den > 0` a power of two.
fn f64_to_ratio(x: f64) -> (BigInt, BigInt) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let m = BigInt::from(mantissa) * sign;
    if exp >= 0 {
        (m << exp as usize, BigInt::one())
    } else {
        (m, BigInt::one() << (-exp) as usize)
    }
}

/// Rational approximation `a/b` with `1 <= b <= bound` and
/// `|theta - a/b| < 1/(b·bound)`.
///
/// Walks the continued-fraction convergents of the exact binary value of
/// `theta` and keeps the last one whose denominator fits under `bound`.
pub fn dirichlet_approx(theta: f64, bound: u64) -> Result<Rational> {
    if bound == 0 {
        return domain("dirichlet_approx needs bound >= 1");
    }
    if !theta.is_finite() {
        return domain(format!("dirichlet_approx needs a finite real, got {theta}"));
    }
    let bound_big = BigInt::from(bound);
    let (mut num, mut den) = f64_to_ratio(theta);

    // (h1, k1) is the latest convergent, (h2, k2) the one before.
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    let mut best: Option<(BigInt, BigInt)> = None;
    loop {
        let a = num.div_floor(&den);
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        if k > bound_big {
            break;
        }
        best = Some((h.clone(), k.clone()));
        let r = &num - &a * &den;
        if r.is_zero() {
            break;
        }
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
        (num, den) = (den, r);
    }
    // The first convergent has denominator 1, so `best` is always set.
    let (h, k) = best.expect("first convergent has denominator 1");
    let h = h.to_i128().ok_or(Error::Overflow("dirichlet_approx"))?;
    let k = k.to_i128().ok_or(Error::Overflow("dirichlet_approx"))?;
    debug_assert!(!BigInt::from(k).is_negative());
    Rational::new(h, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(2, 4).unwrap(), r(1, 2));
        let z = reduce(0, 7).unwrap();
        assert_eq!((z.num(), z.den()), (0, 1));
        let x = reduce(-6, -4).unwrap();
        assert_eq!((x.num(), x.den()), (3, 2));
        // cross-multiplication oracle
        assert_eq!(-6 * x.den(), -4 * x.num());
        assert_eq!(reduce(3, 0), Err(Error::ZeroDenominator));
        assert_eq!((reduce(5, -10).unwrap().num(), reduce(5, -10).unwrap().den()), (-1, 2));
    }

    #[test]
    fn rational_ops_and_parsing() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(1, 2) - r(1, 3), r(1, 6));
        assert_eq!(r(2, 3) * r(9, 4), r(3, 2));
        assert_eq!(r(2, 3) / r(4, 9), r(3, 2));
        assert!(r(1, 3) < r(1, 2));
        assert_eq!(r(-7, 3).floor(), -3);
        assert_eq!(r(-7, 3).ceil(), -2);
        assert_eq!(r(-7, 3).frac(), r(2, 3));
        assert_eq!(r(7, 3).frac(), r(1, 3));
        assert_eq!("-3/4".parse::<Rational>().unwrap(), r(-3, 4));
        assert_eq!("5".parse::<Rational>().unwrap(), r(5, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!(r(0, 1).to_string(), "0/1");
        assert_eq!(
            Rational::from_integer(i128::MAX).checked_add(&Rational::ONE),
            Err(Error::Overflow("rational addition"))
        );
    }

    #[test]
    fn euler_phi_examples() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(9).unwrap(), 6);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert!(euler_phi(0).is_err());
    }

    #[test]
    fn divisor_count_examples() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(divisor_count(-49).unwrap(), 3);
        assert!(divisor_count(0).is_err());
    }

    #[test]
    fn divisor_pairs_examples() {
        assert_eq!(divisor_pairs(1).unwrap(), vec![(-1, -1), (1, 1)]);
        assert_eq!(
            divisor_pairs(6).unwrap(),
            vec![(-6, -1), (-3, -2), (-2, -3), (-1, -6), (1, 6), (2, 3), (3, 2), (6, 1)]
        );
        assert_eq!(
            divisor_pairs(-4).unwrap(),
            vec![(-4, 1), (-2, 2), (-1, 4), (1, -4), (2, -2), (4, -1)]
        );
        assert!(divisor_pairs(0).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_approx(0.5, 10).unwrap(), r(1, 2));
        assert_eq!(dirichlet_approx(0.0, 100).unwrap(), r(0, 1));
        let x = dirichlet_approx(2f64.sqrt() - 1.0, 10).unwrap();
        assert_eq!(x, r(2, 5));
        assert!((2f64.sqrt() - 1.0 - 0.4).abs() < 1.0 / 50.0);
        // -3/4 = [-1; 4]: the second convergent already has denominator 4 > 3
        assert_eq!(dirichlet_approx(-0.75, 3).unwrap(), r(-1, 1));
        assert!(dirichlet_approx(0.3, 0).is_err());
        assert!(dirichlet_approx(f64::NAN, 5).is_err());
        // subnormal input: a0 = 0 and the next quotient is astronomically large
        assert_eq!(dirichlet_approx(5e-324, 1000).unwrap(), r(0, 1));
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
