//! The prime-square construction showing that `(δ⁻¹ + N)·Z` cannot bound
//! quadratic-amplitude sums over Farey points.
//!
//! Take `Q = p²`, `M = 0`, `p | N`, and `aₙ = p` when `p | n`, else 0. For
//! the modulus `q = Q` every reduced residue `a` gives `e(a·n²/p²) = 1` on
//! the support, so the single modulus already contributes `φ(p²)·N²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{euler_phi, gcd, is_prime, Rational};
use crate::bounds::additive_rhs;
use crate::error::{domain, Error, Result};
use crate::expsum::{exp_sum, ls_lhs, CoeffSeq, QuadraticAmplitude};
use crate::farey::farey_sequence;
use crate::sum::sum_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleInstance {
    p: u64,
    seq: CoeffSeq,
}

impl CounterexampleInstance {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `Q = p²`.
    pub fn q(&self) -> u64 {
        self.p * self.p
    }

    pub fn n(&self) -> u64 {
        self.seq.len() as u64
    }

    pub fn seq(&self) -> &CoeffSeq {
        &self.seq
    }

    /// `Z = N·p`, exactly.
    pub fn z(&self) -> u64 {
        self.n() * self.p
    }
}

pub fn build(p: u64, n: u64) -> Result<CounterexampleInstance> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if n == 0 || !n.is_multiple_of(p) {
        return domain(format!("N = {n} must be a positive multiple of p = {p}"));
    }
    if p.checked_mul(p).is_none() {
        return Err(Error::Overflow("p squared"));
    }
    let values = (1..=n)
        .map(|k| {
            if k % p == 0 {
                Complex64::new(p as f64, 0.0)
            } else {
                Complex64::default()
            }
        })
        .collect();
    Ok(CounterexampleInstance {
        p,
        seq: CoeffSeq::new(0, values)?,
    })
}

/// Reduced residues used for modulus `q`: `1 <= a <= q` with `gcd(a, q) = 1`,
/// except that `q = 1` uses `a = 0` (the Farey point `0/1`).
fn reduced_residues(q: u64) -> Vec<Rational> {
    if q == 1 {
        return vec![Rational::ZERO];
    }
    (1..q)
        .filter(|&a| gcd(a as i128, q as i128) == 1)
        .map(|a| Rational::new(a as i128, q as i128).expect("q > 0"))
        .collect()
}

/// `Σ_{a mod q, gcd(a,q)=1} |Σₙ aₙ e((a/q)·n²)|²` with exact phases.
pub fn modulus_term(inst: &CounterexampleInstance, q: u64) -> Result<f64> {
    if q == 0 || q > inst.q() {
        return domain(format!("modulus q = {q} must lie in [1, {}]", inst.q()));
    }
    let f = QuadraticAmplitude::square();
    let terms = reduced_residues(q)
        .into_iter()
        .map(|x| exp_sum(&inst.seq, &f, x).map(|s| s.norm_sqr()))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_f64(terms))
}

/// `φ(p²)·N²`.
pub fn closed_form(inst: &CounterexampleInstance) -> u128 {
    let phi = euler_phi(inst.q()).expect("Q >= 4") as u128;
    phi * (inst.n() as u128).pow(2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub p: u64,
    #[serde(rename = "Q")]
    pub q: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "Z")]
    pub z: u64,
    /// `Σ_{x ∈ F(Q)} |S(x)|²` with `f(n) = n²`.
    pub full_lhs: f64,
    /// The `q = Q` term alone.
    pub modulus_term: f64,
    pub closed_form: u128,
    /// `(Q² + N)·Z`.
    pub naive_rhs: f64,
    /// `Q^{5/2}·N + Q^{1/2}·N²`.
    pub asymptotic_rhs: f64,
    pub lower_bound_exceeds_naive: bool,
}

impl FailureReport {
    pub fn summary(&self) -> String {
        if self.lower_bound_exceeds_naive {
            format!(
                "failure demonstrated: {} > {}",
                self.modulus_term, self.naive_rhs
            )
        } else {
            format!(
                "naive bound not violated at this size: {} <= {}",
                self.modulus_term, self.naive_rhs
            )
        }
    }
}

pub fn demonstrate_failure(inst: &CounterexampleInstance) -> Result<FailureReport> {
    let q = inst.q();
    let farey = farey_sequence(q)?;
    let full_lhs = ls_lhs(&inst.seq, &QuadraticAmplitude::square(), &farey)?;
    let term = modulus_term(inst, q)?;
    let naive = additive_rhs(q, inst.n(), inst.z() as f64);
    let (qf, nf) = (q as f64, inst.n() as f64);
    Ok(FailureReport {
        p: inst.p,
        q,
        n: inst.n(),
        z: inst.z(),
        full_lhs,
        modulus_term: term,
        closed_form: closed_form(inst),
        naive_rhs: naive,
        asymptotic_rhs: qf.powf(2.5) * nf + qf.sqrt() * nf * nf,
        lower_bound_exceeds_naive: term > naive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_examples() {
        let i = build(3, 810).unwrap();
        assert_eq!(i.z(), 2430);
        assert_eq!(i.seq().power(), 2430.0);
        assert_eq!(i.seq().values().iter().filter(|v| v.re != 0.0).count(), 270);
        let i = build(5, 50).unwrap();
        assert_eq!(i.z(), 250);
        let i = build(2, 2).unwrap();
        assert_eq!(i.seq().values(), &[Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)]);
        assert_eq!(i.z(), 4);
        assert!(build(4, 8).is_err());
        assert!(build(3, 10).is_err());
        assert!(build(3, 0).is_err());
    }

    #[test]
    fn modulus_term_examples() {
        let i = build(3, 810).unwrap();
        assert_eq!(modulus_term(&i, 9).unwrap(), 3_936_600.0);
        assert_eq!(modulus_term(&i, 1).unwrap(), 656_100.0);
        assert!(modulus_term(&i, 10).is_err());
        assert!(modulus_term(&i, 0).is_err());
        let i = build(5, 50).unwrap();
        assert_eq!(modulus_term(&i, 25).unwrap(), 50_000.0);
    }

    #[test]
    fn failure_examples() {
        let rep = demonstrate_failure(&build(3, 810).unwrap()).unwrap();
        assert_eq!(rep.modulus_term, 3_936_600.0);
        assert_eq!(rep.naive_rhs, 2_165_130.0);
        assert!(rep.lower_bound_exceeds_naive);
        assert!(rep.full_lhs >= rep.modulus_term);
        assert_eq!(rep.summary(), "failure demonstrated: 3936600 > 2165130");

        let rep = demonstrate_failure(&build(3, 9).unwrap()).unwrap();
        assert_eq!((rep.modulus_term, rep.naive_rhs), (486.0, 2430.0));
        assert!(!rep.lower_bound_exceeds_naive);

        let rep = demonstrate_failure(&build(2, 8).unwrap()).unwrap();
        assert_eq!((rep.modulus_term, rep.naive_rhs), (128.0, 384.0));
        assert!(!rep.lower_bound_exceeds_naive);
    }
}
