//! Farey point sets and spacing modulo 1.

use crate::arith::Rational;
use crate::error::{domain, Result};

/// The Farey fractions of order `Q` in `[0, 1)`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySet {
    order: u64,
    points: Vec<Rational>,
}

impl FareySet {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact minimal gap modulo 1, including the wraparound gap to `1 = 0`.
    pub fn min_gap(&self) -> Result<Rational> {
        min_gap_mod1_exact(&self.points)
    }

    /// Gap from each point to its successor modulo 1.
    pub fn gaps(&self) -> Vec<Rational> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let next = if i + 1 < n {
                    self.points[i + 1]
                } else {
                    Rational::ONE
                };
                next - self.points[i]
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.points.iter().map(Rational::to_f64).collect()
    }
}

/// Farey sequence of order `q_max` via the neighbour recurrence: from
/// consecutive `a/b < c/d`, the next term is `(k·c − a)/(k·d − b)` with
/// `k = ⌊(Q + b)/d⌋`.
pub fn farey_sequence(q_max: u64) -> Result<FareySet> {
    if q_max == 0 {
        return domain("Farey order must be at least 1");
    }
    let q = q_max as i128;
    let mut points = Vec::new();
    let (mut a, mut b, mut c, mut d) = (0i128, 1i128, 1i128, q);
    points.push(Rational::ZERO);
    while c < d {
        points.push(Rational::new(c, d)?);
        let k = (q + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    Ok(FareySet {
        order: q_max,
        points,
    })
}

/// Points in `[0, 1)` together with their minimal separation modulo 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacedPoints {
    points: Vec<f64>,
    min_gap: f64,
}

impl SpacedPoints {
    /// Reduces every point modulo 1 and rejects sets with a repeated point.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return domain("spaced points must be finite");
        }
        let points: Vec<f64> = points.into_iter().map(|x| x - x.floor()).collect();
        let min_gap = min_gap_mod1(&points)?;
        if min_gap <= 0.0 {
            return domain("points coincide modulo 1");
        }
        Ok(SpacedPoints { points, min_gap })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }
}

/// `min_{j≠k} ‖x_j − x_k‖` with `‖t‖` the distance to the nearest integer.
pub fn min_gap_mod1(points: &[f64]) -> Result<f64> {
    if points.len() < 2 {
        return domain("minimal gap needs at least two points");
    }
    let mut reduced: Vec<f64> = points.iter().map(|x| x - x.floor()).collect();
    reduced.sort_by(f64::total_cmp);
    let inner = reduced
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let wrap = 1.0 - reduced[reduced.len() - 1] + reduced[0];
    Ok(inner.min(wrap))
}

/// Exact counterpart of [`min_gap_mod1`].
pub fn min_gap_mod1_exact(points: &[Rational]) -> Result<Rational> {
    if points.len() < 2 {
        return domain("minimal gap needs at least two points");
    }
    let mut reduced: Vec<Rational> = points.iter().map(Rational::frac).collect();
    reduced.sort();
    let wrap = Rational::ONE - reduced[reduced.len() - 1] + reduced[0];
    Ok(reduced
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap, std::cmp::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{euler_phi, gcd};

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    // enumerate-and-sort oracle
    fn farey_brute(q: i128) -> Vec<Rational> {
        let mut v: Vec<Rational> = (1..=q)
            .flat_map(|d| (0..d).filter(move |&n| gcd(n, d) == 1).map(move |n| r(n, d)))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn small_orders() {
        assert_eq!(farey_sequence(1).unwrap().points(), &[r(0, 1)]);
        let f4 = farey_sequence(4).unwrap();
        assert_eq!(
            f4.points(),
            &[r(0, 1), r(1, 4), r(1, 3), r(1, 2), r(2, 3), r(3, 4)]
        );
        assert_eq!(f4.points(), farey_brute(4).as_slice());
        assert_eq!(farey_sequence(20).unwrap().len(), 128);
        assert!(farey_sequence(0).is_err());
    }

    #[test]
    fn recurrence_matches_enumeration() {
        for q in 1..=60 {
            assert_eq!(farey_sequence(q).unwrap().points(), farey_brute(q as i128).as_slice());
        }
    }

    #[test]
    fn size_matches_totient_sum() {
        let mut total = 0;
        for q in 1..=200u64 {
            total += euler_phi(q).unwrap() as usize;
            assert_eq!(farey_sequence(q).unwrap().len(), total);
        }
    }

    #[test]
    fn neighbours_are_unimodular() {
        for q in 1..=50 {
            let f = farey_sequence(q).unwrap();
            for w in f.points().windows(2) {
                assert_eq!(w[1].num() * w[0].den() - w[0].num() * w[1].den(), 1);
                assert_eq!(w[1] - w[0], r(1, w[0].den() * w[1].den()));
            }
        }
    }

    #[test]
    fn exact_min_gap() {
        assert_eq!(farey_sequence(4).unwrap().min_gap().unwrap(), r(1, 12));
        for q in 2..=50i128 {
            let f = farey_sequence(q as u64).unwrap();
            assert_eq!(f.min_gap().unwrap(), r(1, q * (q - 1)));
        }
        assert!(farey_sequence(1).unwrap().min_gap().is_err());
    }

    #[test]
    fn float_min_gap() {
        assert_eq!(min_gap_mod1(&[0.0, 0.5]).unwrap(), 0.5);
        assert!((min_gap_mod1(&[0.1, 0.95]).unwrap() - 0.15).abs() < 1e-15);
        let f4 = farey_sequence(4).unwrap().to_f64();
        assert!((min_gap_mod1(&f4).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!(min_gap_mod1(&[0.3]).is_err());
    }

    #[test]
    fn spaced_points() {
        let s = SpacedPoints::new(vec![1.25, -0.5, 0.0]).unwrap();
        assert_eq!(s.points(), &[0.25, 0.5, 0.0]);
        assert_eq!(s.min_gap(), 0.25);
        assert!(SpacedPoints::new(vec![0.25, 1.25]).is_err());
        assert!(SpacedPoints::new(vec![0.2]).is_err());
    }

    #[test]
    fn gaps_wrap_around() {
        let g = farey_sequence(3).unwrap().gaps();
        assert_eq!(g, vec![r(1, 3), r(1, 6), r(1, 6), r(1, 3)]);
    }
}
