//! Right-hand sides of the large sieve inequalities, as plain arithmetic.
//!
//! Only [`classical_rhs`], [`sharp_rhs`] and [`additive_rhs`] are
//! inequalities with constant 1. The trivial, quadratic ε and pair-count shapes
//! carry unspecified implied constants and are evaluated with constant 1 for
//! ratio studies only. [`conjecture_rhs`] is a reference curve.

use serde::Serialize;

use crate::arith::{gcd, Rational};
use crate::error::{domain, Result};

/// Parameters shared by the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub q: u64,
    pub m: i64,
    pub n: u64,
    pub alpha: f64,
    pub a: i64,
    pub b: u64,
    pub eps: f64,
    pub delta: f64,
    pub z: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.b == 0 || gcd(self.a as i128, self.b as i128) != 1 {
            return domain(format!("ratio {}/{} is not reduced", self.a, self.b));
        }
        if !(self.alpha > 0.0) {
            return domain("alpha must be positive");
        }
        if !(self.eps > 0.0) {
            return domain("eps must be positive");
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return domain(format!("delta must lie in (0, 1/2], got {}", self.delta));
        }
        if self.q == 0 || self.n == 0 {
            return domain("Q and N must be positive");
        }
        if !(self.z >= 0.0) {
            return domain("Z must be nonnegative");
        }
        Ok(())
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.a as i128, self.b as i128).expect("b > 0")
    }

    pub fn classical(&self) -> Result<f64> {
        classical_rhs(self.delta, self.n, self.z)
    }

    pub fn sharp(&self) -> Result<f64> {
        sharp_rhs(self.delta, self.n, self.z)
    }

    pub fn additive(&self) -> f64 {
        additive_rhs(self.q, self.n, self.z)
    }

    pub fn trivial(&self) -> Result<f64> {
        trivial_rhs(self.delta, self.alpha, self.m, self.n, self.z)
    }

    pub fn theorem2(&self) -> Result<f64> {
        theorem2_rhs(self.q, self.alpha, self.a, self.b, self.m, self.n, self.eps, self.z)
    }

    pub fn conjecture(&self) -> f64 {
        conjecture_rhs(self.q, self.n, self.z)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 {
        Ok(())
    } else {
        domain(format!("spacing delta must be positive, got {delta}"))
    }
}

/// `(δ⁻¹ + N)·Z`.
pub fn classical_rhs(delta: f64, n: u64, z: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((delta.recip() + n as f64) * z)
}

/// `(δ⁻¹ − 1 + N)·Z`, the sharp form.
pub fn sharp_rhs(delta: f64, n: u64, z: f64) -> Result<f64> {
    check_delta(delta)?;
    let factor = delta.recip() - 1.0 + n as f64;
    if !(factor > 0.0) {
        return domain(format!("sharp factor 1/delta - 1 + N = {factor} is not positive"));
    }
    Ok(factor * z)
}

/// `(Q² + N)·Z` for the additive-character form over Farey points.
pub fn additive_rhs(q: u64, n: u64, z: f64) -> f64 {
    let q = q as f64;
    (q * q + n as f64) * z
}

/// `(δ⁻¹ + |α|(|M| + N)²)·Z`.
pub fn trivial_rhs(delta: f64, alpha: f64, m: i64, n: u64, z: f64) -> Result<f64> {
    check_delta(delta)?;
    let span = m.unsigned_abs() as f64 + n as f64;
    Ok((delta.recip() + alpha.abs() * span * span) * z)
}

/// `(b/α + 1)^{1/2+ε} · [N·b·(|M|+N) + |a| + b/α]^ε`.
pub fn pi_factor(alpha: f64, a: i64, b: u64, m: i64, n: u64, eps: f64) -> Result<f64> {
    if !(alpha > 0.0) || b == 0 || !(eps > 0.0) || n == 0 {
        return domain("pi_factor needs alpha > 0, b >= 1, eps > 0, N >= 1");
    }
    let b_over_alpha = b as f64 / alpha;
    let span = m.unsigned_abs() as f64 + n as f64;
    let base = n as f64 * b as f64 * span + a.unsigned_abs() as f64 + b_over_alpha;
    Ok((b_over_alpha + 1.0).powf(0.5 + eps) * base.powf(eps))
}

/// `α·N·(|M| + N + a/b) + 1`, the radicand of the quadratic ε shape.
pub fn theorem2_radicand(alpha: f64, a: i64, b: u64, m: i64, n: u64) -> f64 {
    let n = n as f64;
    alpha * n * (m.unsigned_abs() as f64 + n + a as f64 / b as f64) + 1.0
}

/// `(Q² + Q·√(αN(|M|+N+a/b) + 1))·Π·Z`, with constant 1.
#[allow(clippy::too_many_arguments)]
pub fn theorem2_rhs(
    q: u64,
    alpha: f64,
    a: i64,
    b: u64,
    m: i64,
    n: u64,
    eps: f64,
    z: f64,
) -> Result<f64> {
    let radicand = theorem2_radicand(alpha, a, b, m, n);
    if !(radicand >= 0.0) {
        return domain(format!("negative radicand {radicand}"));
    }
    let q = q as f64;
    Ok((q * q + q * radicand.sqrt()) * pi_factor(alpha, a, b, m, n, eps)? * z)
}

/// `(Q² + Q·N)·Z`. Reference curve only.
pub fn conjecture_rhs(q: u64, n: u64, z: f64) -> f64 {
    let q = q as f64;
    (q * q + q * n as f64) * z
}

/// `lhs / rhs`, absent for `0/0`.
pub fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    if rhs == 0.0 && lhs == 0.0 {
        None
    } else {
        Some(lhs / rhs)
    }
}

/// One evaluated instance with every right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub params: BoundParams,
    pub lhs: f64,
    pub rhs_classical: f64,
    pub rhs_sharp: f64,
    pub rhs_additive: f64,
    pub rhs_trivial: f64,
    pub rhs_theorem2: Option<f64>,
    pub rhs_conjecture: f64,
    pub seed: u64,
    pub runtime_ms: Option<f64>,
}

impl BoundReport {
    /// Evaluates every formula at `params`. A negative radicand leaves
    /// `rhs_theorem2` empty instead of failing the row.
    pub fn evaluate(params: BoundParams, lhs: f64, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(BoundReport {
            params,
            lhs,
            rhs_classical: params.classical()?,
            rhs_sharp: params.sharp()?,
            rhs_additive: params.additive(),
            rhs_trivial: params.trivial()?,
            rhs_theorem2: params.theorem2().ok(),
            rhs_conjecture: params.conjecture(),
            seed,
            runtime_ms: None,
        })
    }

    pub fn ratio_classical(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs_classical)
    }

    pub fn ratio_sharp(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs_sharp)
    }

    pub fn ratio_additive(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs_additive)
    }

    pub fn ratio_trivial(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs_trivial)
    }

    pub fn ratio_theorem2(&self) -> Option<f64> {
        self.rhs_theorem2.and_then(|r| ratio(self.lhs, r))
    }

    pub fn ratio_conjecture(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs_conjecture)
    }
}
