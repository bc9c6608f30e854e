//! Double large sieve and the pair-counting lemma behind the quadratic bound.
//!
//! For points `|x_m| <= X/2`, `|y_n| <= Y/2` and `δ = X/(XY+1)`, `ε = 1/X`:
//!
//! ```text
//! |Σ_m Σ_n a_m b_n e(x_m y_n)|² <= (π/2)⁴ · A(δ) · B(ε) · (XY + 1)
//! A(δ) = Σ_{m,r} |a_m||a_r| Λ((x_m − x_r)/δ)
//! B(ε) = Σ_{n,r} b_n conj(b_r) Λ((y_n − y_r)/ε)
//! ```
//!
//! with the triangle kernel `Λ(x) = max(1 − |x|, 0)`. Note the asymmetry:
//! `A` uses moduli, `B` signed products.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{divisor_pairs, gcd, Rational};
use crate::error::{domain, Error, Result};
use crate::expsum::{ls_lhs, CoeffSeq, QuadraticAmplitude};
use crate::farey::FareySet;
use crate::sum::{sum_c64, ComplexNeumaierSum, NeumaierSum};

/// `(π/2)⁴`.
pub const DLS_CONSTANT: f64 = FRAC_PI_2 * FRAC_PI_2 * FRAC_PI_2 * FRAC_PI_2;

/// Relative slack allowed on the right-hand side of a hard inequality.
pub const REL_SLACK: f64 = 1e-9;

/// Default cap on the window length for the quadratic pair counters.
pub const LEMMA4_CAP: u64 = 500;

pub fn triangle_kernel(x: f64) -> f64 {
    (1.0 - x.abs()).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlsInstance {
    xs: Vec<f64>,
    ys: Vec<f64>,
    aw: Vec<Complex64>,
    bw: Vec<Complex64>,
    x_span: f64,
    y_span: f64,
}

impl DlsInstance {
    /// `x_span` and `y_span` are `X` and `Y`; every `|x| <= X/2`, `|y| <= Y/2`.
    pub fn new(
        xs: Vec<f64>,
        ys: Vec<f64>,
        aw: Vec<Complex64>,
        bw: Vec<Complex64>,
        x_span: f64,
        y_span: f64,
    ) -> Result<Self> {
        if !(x_span > 0.0 && y_span > 0.0) || !x_span.is_finite() || !y_span.is_finite() {
            return domain("X and Y must be positive and finite");
        }
        if aw.len() != xs.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                got: aw.len(),
            });
        }
        if bw.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: ys.len(),
                got: bw.len(),
            });
        }
        if let Some(x) = xs.iter().find(|x| !(x.abs() <= x_span / 2.0)) {
            return domain(format!("x = {x} lies outside [-X/2, X/2] for X = {x_span}"));
        }
        if let Some(y) = ys.iter().find(|y| !(y.abs() <= y_span / 2.0)) {
            return domain(format!("y = {y} lies outside [-Y/2, Y/2] for Y = {y_span}"));
        }
        Ok(DlsInstance {
            xs,
            ys,
            aw,
            bw,
            x_span,
            y_span,
        })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn x_span(&self) -> f64 {
        self.x_span
    }

    pub fn y_span(&self) -> f64 {
        self.y_span
    }

    /// `δ = X/(XY + 1)`.
    pub fn delta(&self) -> f64 {
        self.x_span / (self.x_span * self.y_span + 1.0)
    }

    /// `ε = 1/X`.
    pub fn epsilon(&self) -> f64 {
        self.x_span.recip()
    }

    /// `|Σ_m Σ_n a_m b_n e(x_m y_n)|²`.
    pub fn bilinear_sum_sq(&self) -> f64 {
        let total = sum_c64(self.xs.iter().zip(&self.aw).flat_map(|(&x, &a)| {
            self.ys
                .iter()
                .zip(&self.bw)
                .map(move |(&y, &b)| a * b * crate::expsum::e(x * y))
        }));
        total.norm_sqr()
    }

    /// `A(δ)` by the full double sum.
    pub fn a_delta(&self) -> f64 {
        let delta = self.delta();
        let mut acc = NeumaierSum::new();
        for (x, a) in self.xs.iter().zip(&self.aw) {
            for (xr, ar) in self.xs.iter().zip(&self.aw) {
                acc.add(a.norm() * ar.norm() * triangle_kernel((x - xr) / delta));
            }
        }
        acc.total()
    }

    /// `B(ε)` by the full double sum, keeping the signed products.
    pub fn b_epsilon(&self) -> Complex64 {
        let eps = self.epsilon();
        let mut acc = ComplexNeumaierSum::new();
        for (y, b) in self.ys.iter().zip(&self.bw) {
            for (yr, br) in self.ys.iter().zip(&self.bw) {
                acc.add(b * br.conj() * triangle_kernel((y - yr) / eps));
            }
        }
        acc.total()
    }

    /// `A(δ)` visiting only pairs closer than `δ`, after sorting.
    pub fn a_delta_windowed(&self) -> f64 {
        let weights: Vec<f64> = self.aw.iter().map(|a| a.norm()).collect();
        windowed_real(&self.xs, &weights, self.delta())
    }

    /// `B(ε)` visiting only pairs closer than `ε`. Pairs are combined
    /// symmetrically, so the result is real.
    pub fn b_epsilon_windowed(&self) -> f64 {
        windowed_complex(&self.ys, &self.bw, self.epsilon())
    }

    pub fn check(&self) -> DlsCheck {
        dls_check(self)
    }
}

fn sorted_order(points: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points[i].total_cmp(&points[j]).then(i.cmp(&j)));
    idx
}

fn windowed_real(points: &[f64], weights: &[f64], width: f64) -> f64 {
    let idx = sorted_order(points);
    let mut acc = NeumaierSum::new();
    for (pos, &i) in idx.iter().enumerate() {
        acc.add(weights[i] * weights[i]);
        for &j in &idx[pos + 1..] {
            let d = points[j] - points[i];
            if d >= width {
                break;
            }
            acc.add(2.0 * weights[i] * weights[j] * triangle_kernel(d / width));
        }
    }
    acc.total()
}

fn windowed_complex(points: &[f64], weights: &[Complex64], width: f64) -> f64 {
    let idx = sorted_order(points);
    let mut acc = NeumaierSum::new();
    for (pos, &i) in idx.iter().enumerate() {
        acc.add(weights[i].norm_sqr());
        for &j in &idx[pos + 1..] {
            let d = points[j] - points[i];
            if d >= width {
                break;
            }
            acc.add(2.0 * (weights[i] * weights[j].conj()).re * triangle_kernel(d / width));
        }
    }
    acc.total()
}

/// Outcome of one double large sieve evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DlsCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub a_delta: f64,
    pub b_epsilon_re: f64,
    pub b_epsilon_im: f64,
    pub holds: bool,
    /// `B(ε)` had an imaginary part above `1e-9` relative; `rhs` is then
    /// computed from the real part but should not be trusted.
    pub anomaly: bool,
}

pub fn dls_check(inst: &DlsInstance) -> DlsCheck {
    let lhs = inst.bilinear_sum_sq();
    let a = inst.a_delta();
    let b = inst.b_epsilon();
    let anomaly = b.im.abs() > REL_SLACK * b.norm().max(f64::MIN_POSITIVE);
    let rhs = DLS_CONSTANT * a * b.re * (inst.x_span * inst.y_span + 1.0);
    DlsCheck {
        lhs,
        rhs,
        a_delta: a,
        b_epsilon_re: b.re,
        b_epsilon_im: b.im,
        holds: lhs <= rhs * (1.0 + REL_SLACK),
        anomaly,
    }
}

/// `g(s, t) = (s − t)(s + t + a/b)`, exactly.
pub fn g_eval(s: i64, t: i64, a: i64, b: i64) -> Result<Rational> {
    if b <= 0 || gcd(a as i128, b as i128) != 1 {
        return domain(format!("g needs b > 0 and gcd(a, b) = 1, got {a}/{b}"));
    }
    let (s, t) = (s as i128, t as i128);
    Rational::from_integer(s - t)
        .checked_mul(&Rational::from_integer(s + t).checked_add(&Rational::new(a as i128, b as i128)?)?)
}

/// `b·g(s, t) = (s − t)(b·s + b·t + a)`, an integer.
pub fn g_scaled(s: i64, t: i64, a: i64, b: i64) -> i128 {
    let (s, t, a, b) = (s as i128, t as i128, a as i128, b as i128);
    (s - t) * (b * s + b * t + a)
}

/// One query of the pair count: window `S = [M+1, M+N]`, amplitude data
/// `α`, `a/b`, and a fixed pair `(m, n)` in `S²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma4Instance {
    pub offset: i64,
    pub len: u64,
    pub alpha: Rational,
    pub a: i64,
    pub b: i64,
    pub m: i64,
    pub n: i64,
}

impl Lemma4Instance {
    pub fn new(offset: i64, len: u64, alpha: Rational, a: i64, b: i64, m: i64, n: i64) -> Result<Self> {
        let inst = Lemma4Instance {
            offset,
            len,
            alpha,
            a,
            b,
            m,
            n,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.len == 0 {
            return domain("window length must be positive");
        }
        if self.alpha.signum() <= 0 {
            return domain("alpha must be positive");
        }
        if self.b <= 0 || gcd(self.a as i128, self.b as i128) != 1 {
            return domain(format!("{}/{} is not a reduced ratio with b > 0", self.a, self.b));
        }
        if !self.contains(self.m) || !self.contains(self.n) {
            return domain(format!("({}, {}) is not in the window", self.m, self.n));
        }
        Ok(())
    }

    pub fn contains(&self, s: i64) -> bool {
        s > self.offset && s <= self.offset + self.len as i64
    }

    pub fn window(&self) -> std::ops::RangeInclusive<i64> {
        self.offset + 1..=self.offset + self.len as i64
    }

    /// `1/(2α)`.
    pub fn tolerance(&self) -> Rational {
        Rational::from_integer(2)
            .checked_mul(&self.alpha)
            .and_then(|d| d.recip())
            .expect("alpha is positive")
    }

    fn check_cap(&self, cap: u64) -> Result<()> {
        if self.len > cap {
            return Err(Error::CapExceeded { n: self.len, cap });
        }
        Ok(())
    }
}

/// `|g(m,n) − g(m',n')| <= 1/(2α)`, compared in exact rationals.
pub fn within_tolerance(g: Rational, g_other: Rational, alpha: Rational) -> Result<bool> {
    if alpha.signum() <= 0 {
        return domain("alpha must be positive");
    }
    // |p1/q1 − p2/q2| <= d/(2n)  ⇔  2n·|p1·q2 − p2·q1| <= d·q1·q2
    let overflow = || Error::Overflow("tolerance comparison");
    let diff = g
        .num()
        .checked_mul(g_other.den())
        .zip(g_other.num().checked_mul(g.den()))
        .and_then(|(x, y)| x.checked_sub(y))
        .ok_or_else(overflow)?;
    let lhs = diff
        .abs()
        .checked_mul(2 * alpha.num())
        .ok_or_else(overflow)?;
    let rhs = alpha
        .den()
        .checked_mul(g.den())
        .and_then(|x| x.checked_mul(g_other.den()))
        .ok_or_else(overflow)?;
    Ok(lhs <= rhs)
}

/// `|b·g(m,n) − b·g(m',n')| <= b/(2α)`, the scaled integer form.
pub fn within_tolerance_scaled(bg: i128, bg_other: i128, alpha: Rational, b: i64) -> Result<bool> {
    if alpha.signum() <= 0 || b <= 0 {
        return domain("alpha and b must be positive");
    }
    let overflow = || Error::Overflow("scaled tolerance comparison");
    let diff = bg.checked_sub(bg_other).ok_or_else(overflow)?;
    let lhs = diff.abs().checked_mul(2 * alpha.num()).ok_or_else(overflow)?;
    let rhs = alpha.den().checked_mul(b as i128).ok_or_else(overflow)?;
    Ok(lhs <= rhs)
}

/// Counts `(m', n') ∈ S²` with `g(m', n') ≠ 0` and
/// `|g(m, n) − g(m', n')| <= 1/(2α)` by scanning all of `S²`.
pub fn lemma4_count_bruteforce(inst: &Lemma4Instance) -> Result<u64> {
    lemma4_count_bruteforce_capped(inst, LEMMA4_CAP)
}

pub fn lemma4_count_bruteforce_capped(inst: &Lemma4Instance, cap: u64) -> Result<u64> {
    inst.validate()?;
    inst.check_cap(cap)?;
    let g = g_eval(inst.m, inst.n, inst.a, inst.b)?;
    let mut count = 0;
    for mp in inst.window() {
        for np in inst.window() {
            let gp = g_eval(mp, np, inst.a, inst.b)?;
            if !gp.is_zero() && within_tolerance(g, gp, inst.alpha)? {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Same count by factoring: every admissible pair has `b·g(m', n') = k`
/// for an integer `k ≠ 0` within `b/(2α)` of `b·g(m, n)`, and `k = u·v`
/// with `u = m' − n'`, `v = b·m' + b·n' + a`, so
/// `m' = (b·u + v − a)/(2b)` and `n' = (v − a − b·u)/(2b)`.
pub fn lemma4_count_divisor(inst: &Lemma4Instance) -> Result<u64> {
    lemma4_count_divisor_capped(inst, LEMMA4_CAP)
}

pub fn lemma4_count_divisor_capped(inst: &Lemma4Instance, cap: u64) -> Result<u64> {
    inst.validate()?;
    inst.check_cap(cap)?;
    let (a, b) = (inst.a as i128, inst.b as i128);
    let center = g_scaled(inst.m, inst.n, inst.a, inst.b);
    let reach = Rational::from_integer(b).checked_mul(&inst.tolerance())?;
    let lo = Rational::from_integer(center).checked_sub(&reach)?.ceil();
    let hi = Rational::from_integer(center).checked_add(&reach)?.floor();

    let mut count = 0;
    for k in lo..=hi {
        if k == 0 {
            continue;
        }
        for (u, v) in divisor_pairs(k)? {
            let mp = b * u + v - a;
            let np = -b * u + v - a;
            if mp % (2 * b) != 0 || np % (2 * b) != 0 {
                continue;
            }
            let (mp, np) = (mp / (2 * b), np / (2 * b));
            let in_window = |s: i128| s > inst.offset as i128 && s <= inst.offset as i128 + inst.len as i128;
            if in_window(mp) && in_window(np) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `(b/α + 1)·[N·b·(|M|+N) + |a| + b/α]^ε`, as stated (constant 1).
pub fn lemma4_bound(alpha: f64, a: i64, b: u64, m: i64, n: u64, eps: f64) -> Result<f64> {
    check_lemma4_args(alpha, b, eps)?;
    let ba = b as f64 / alpha;
    let base = n as f64 * b as f64 * (m.unsigned_abs() as f64 + n as f64) + a.unsigned_abs() as f64 + ba;
    Ok((ba + 1.0) * base.powf(eps))
}

/// `(b/α + 1)·(N·b·(|M|+N+|a|) + b/α)^ε`, the variant reached in the proof.
pub fn lemma4_bound_proof_form(alpha: f64, a: i64, b: u64, m: i64, n: u64, eps: f64) -> Result<f64> {
    check_lemma4_args(alpha, b, eps)?;
    let ba = b as f64 / alpha;
    let span = m.unsigned_abs() as f64 + n as f64 + a.unsigned_abs() as f64;
    Ok((ba + 1.0) * (n as f64 * b as f64 * span + ba).powf(eps))
}

fn check_lemma4_args(alpha: f64, b: u64, eps: f64) -> Result<()> {
    if !(alpha > 0.0) || b == 0 || !(eps > 0.0) {
        return domain("lemma4_bound needs alpha > 0, b >= 1, eps > 0");
    }
    Ok(())
}

/// The double large sieve applied to `Σ_{x ∈ F(Q)} |S(x)|²` for a quadratic
/// amplitude with rational `α` and `β/α = a/b`: points `α·x`, frequencies
/// `g(s, t)`, weights `c_s·conj(c_t)`, `X = 2α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticChain {
    pub lhs: f64,
    pub a_delta: f64,
    pub b_epsilon: f64,
    /// `Y = 2·max |g(s, t)|` over the window, so every `|y| <= Y/2` holds.
    pub y_span: f64,
    /// `2|M|N + N² + N·a/b`, the value of `Y` used in the proof.
    pub y_span_closed: f64,
    /// `(π/2)²·√(A(δ)·B(ε)·(XY + 1))`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn quadratic_chain(
    seq: &CoeffSeq,
    f: &QuadraticAmplitude,
    farey: &FareySet,
) -> Result<QuadraticChain> {
    let [alpha, _, _] = f
        .exact_coeffs()
        .ok_or_else(|| Error::Domain("chain bound needs rational coefficients".into()))?;
    let ratio = f
        .ratio()
        .ok_or_else(|| Error::Domain("chain bound needs a rational beta/alpha".into()))?;
    if alpha.signum() <= 0 {
        return domain("chain bound needs alpha > 0");
    }
    let (a, b) = (
        i64::try_from(ratio.num()).map_err(|_| Error::Overflow("ratio numerator"))?,
        i64::try_from(ratio.den()).map_err(|_| Error::Overflow("ratio denominator"))?,
    );
    let alpha_f = alpha.to_f64();
    let x_span = 2.0 * alpha_f;

    // group the N² frequencies by their exact value b·g(s, t)
    let mut groups: BTreeMap<i128, ComplexNeumaierSum> = BTreeMap::new();
    let mut max_abs: i128 = 0;
    for (s, cs) in seq.iter() {
        for (t, ct) in seq.iter() {
            let k = g_scaled(s, t, a, b);
            max_abs = max_abs.max(k.abs());
            groups.entry(k).or_default().add(cs * ct.conj());
        }
    }
    let y_span = (2 * max_abs) as f64 / b as f64;
    let ys: Vec<f64> = groups.keys().map(|&k| k as f64 / b as f64).collect();
    let ws: Vec<Complex64> = groups.values().map(|w| w.total()).collect();

    // Y can be 0 when the window has a single point; any positive Y then works
    let y_span = if y_span > 0.0 { y_span } else { 1.0 };
    let xs: Vec<f64> = farey.points().iter().map(|x| alpha_f * x.to_f64()).collect();
    let inst = DlsInstance::new(
        xs,
        ys,
        vec![Complex64::new(1.0, 0.0); farey.len()],
        ws,
        x_span,
        y_span,
    )?;
    let a_delta = inst.a_delta_windowed();
    let b_epsilon = inst.b_epsilon_windowed();
    let lhs = ls_lhs(seq, f, farey)?;
    let rhs = FRAC_PI_2 * FRAC_PI_2 * (a_delta * b_epsilon.max(0.0) * (x_span * y_span + 1.0)).sqrt();

    let n = seq.len() as f64;
    let y_span_closed = 2.0 * seq.offset().unsigned_abs() as f64 * n + n * n + n * ratio.to_f64();
    Ok(QuadraticChain {
        lhs,
        a_delta,
        b_epsilon,
        y_span,
        y_span_closed,
        rhs,
        holds: lhs <= rhs * (1.0 + REL_SLACK),
    })
}

/// Largest `|b·g(s, t)|` over the window `[M+1, M+N]`.
pub fn max_abs_g(offset: i64, len: u64, a: i64, b: i64) -> i128 {
    let window = offset + 1..=offset + len as i64;
    window
        .clone()
        .flat_map(|s| window.clone().map(move |t| g_scaled(s, t, a, b).abs()))
        .max()
        .unwrap_or(0)
}
