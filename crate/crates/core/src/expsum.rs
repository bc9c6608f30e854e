//! Exponential sums `S(x) = Σ aₙ e(x·f(n))` with quadratic amplitudes.
//!
//! `e(t) = exp(2πi·t)`. When both the point `x` and the coefficients of `f`
//! are rational, every phase `x·f(n)` is reduced modulo 1 in integer
//! arithmetic before it reaches floating point, so the only rounding is in
//! the final `sin_cos`. Otherwise products are split with an FMA and reduced
//! piecewise; phases beyond 2^52 in magnitude are unreliable and callers can
//! detect them with [`QuadraticAmplitude::phase_precision_lost`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::arith::{dirichlet_approx, gcd, Rational};
use crate::error::{domain, Error, Result};
use crate::farey::{FareySet, SpacedPoints};
use crate::sum::{sum_c64, sum_f64};

/// `e(t) = exp(2πi·t)`.
pub fn e(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// A sample point: exact rational (Farey points) or an arbitrary real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Exact(Rational),
    Real(f64),
}

impl Point {
    pub fn to_f64(&self) -> f64 {
        match self {
            Point::Exact(r) => r.to_f64(),
            Point::Real(x) => *x,
        }
    }
}

impl From<Rational> for Point {
    fn from(r: Rational) -> Self {
        Point::Exact(r)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Real(x)
    }
}

/// Anything that can be evaluated as a list of sample points.
pub trait SamplePoints {
    fn sample_points(&self) -> Vec<Point>;
}

impl SamplePoints for FareySet {
    fn sample_points(&self) -> Vec<Point> {
        self.points().iter().copied().map(Point::Exact).collect()
    }
}

impl SamplePoints for SpacedPoints {
    fn sample_points(&self) -> Vec<Point> {
        self.points().iter().copied().map(Point::Real).collect()
    }
}

impl SamplePoints for [Point] {
    fn sample_points(&self) -> Vec<Point> {
        self.to_vec()
    }
}

impl SamplePoints for Vec<Point> {
    fn sample_points(&self) -> Vec<Point> {
        self.clone()
    }
}

/// Complex coefficients `aₙ` on the window `n = M+1, …, M+N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    offset: i64,
    values: Vec<Complex64>,
}

impl CoeffSeq {
    pub fn new(offset: i64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return domain("coefficient window must have N >= 1");
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return domain("coefficients must be finite");
        }
        Ok(CoeffSeq { offset, values })
    }

    pub fn from_real(offset: i64, values: &[f64]) -> Result<Self> {
        Self::new(offset, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// The window offset `M`.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// The window length `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pairs `(n, aₙ)` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        (self.offset + 1..).zip(self.values.iter().copied())
    }

    /// `Z = Σ |aₙ|²`.
    pub fn power(&self) -> f64 {
        sum_f64(self.values.iter().map(|v| v.norm_sqr()))
    }

    pub fn scaled(&self, by: Complex64) -> Self {
        CoeffSeq {
            offset: self.offset,
            values: self.values.iter().map(|v| v * by).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ExactQuadratic {
    coeffs: [Rational; 3],
    /// Common denominator `D` with `f(n) = (A·n² + B·n + C)/D`.
    den: i128,
    ints: [i128; 3],
}

impl ExactQuadratic {
    fn new(coeffs: [Rational; 3]) -> Result<Self> {
        let mut den = 1i128;
        for c in &coeffs {
            den = (den / gcd(den, c.den()))
                .checked_mul(c.den())
                .ok_or(Error::Overflow("amplitude denominator"))?;
        }
        let mut ints = [0i128; 3];
        for (slot, c) in ints.iter_mut().zip(&coeffs) {
            *slot = c
                .num()
                .checked_mul(den / c.den())
                .ok_or(Error::Overflow("amplitude numerator"))?;
        }
        Ok(ExactQuadratic { coeffs, den, ints })
    }
}

/// `f(x) = αx² + βx + γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticAmplitude {
    alpha: f64,
    beta: f64,
    gamma: f64,
    ratio: Option<Rational>,
    exact: Option<ExactQuadratic>,
}

impl QuadraticAmplitude {
    /// Real coefficients; no rational data attached.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be positive and finite, got {alpha}"));
        }
        if !beta.is_finite() || !gamma.is_finite() {
            return domain("beta and gamma must be finite");
        }
        Ok(QuadraticAmplitude {
            alpha,
            beta,
            gamma,
            ratio: None,
            exact: None,
        })
    }

    /// Rational coefficients; `β/α` is recorded as the ratio `a/b`.
    pub fn exact(alpha: Rational, beta: Rational, gamma: Rational) -> Result<Self> {
        if alpha.signum() <= 0 {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        Ok(QuadraticAmplitude {
            alpha: alpha.to_f64(),
            beta: beta.to_f64(),
            gamma: gamma.to_f64(),
            ratio: Some(beta.checked_div(&alpha)?),
            exact: Some(ExactQuadratic::new([alpha, beta, gamma])?),
        })
    }

    /// `f(n) = α·n² + α·(a/b)·n + γ`, i.e. `β/α = a/b` exactly.
    pub fn with_ratio(alpha: Rational, ratio: Rational, gamma: Rational) -> Result<Self> {
        Self::exact(alpha, alpha.checked_mul(&ratio)?, gamma)
    }

    /// `f(n) = n²`.
    pub fn square() -> Self {
        Self::exact(Rational::ONE, Rational::ZERO, Rational::ZERO).expect("n^2 is valid")
    }

    /// `f(n) = n`, the classical (linear) amplitude. This is the one
    /// constructor that allows `α = 0`.
    pub fn linear() -> Self {
        QuadraticAmplitude {
            alpha: 0.0,
            beta: 1.0,
            gamma: 0.0,
            ratio: None,
            exact: Some(
                ExactQuadratic::new([Rational::ZERO, Rational::ONE, Rational::ZERO])
                    .expect("n is valid"),
            ),
        }
    }

    /// Attaches a rational approximation `a/b` of `β/α` with
    /// `|β/α − a/b| < 1/(4bN)`, as needed for irrational ratios.
    pub fn with_ratio_approx(mut self, window_len: u64) -> Result<Self> {
        if window_len == 0 {
            return domain("window length must be positive");
        }
        if self.alpha == 0.0 {
            return domain("ratio beta/alpha needs alpha > 0");
        }
        let bound = window_len
            .checked_mul(4)
            .ok_or(Error::Overflow("approximation bound"))?;
        self.ratio = Some(dirichlet_approx(self.beta / self.alpha, bound)?);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn ratio(&self) -> Option<Rational> {
        self.ratio
    }

    pub fn exact_coeffs(&self) -> Option<[Rational; 3]> {
        self.exact.as_ref().map(|e| e.coeffs)
    }

    pub fn eval(&self, n: i64) -> f64 {
        if let Some(Ok(v)) = self.eval_exact(n) {
            return v.to_f64();
        }
        let n = n as f64;
        self.alpha * n * n + self.beta * n + self.gamma
    }

    /// Exact `f(n)`, present when all coefficients are rational.
    pub fn eval_exact(&self, n: i64) -> Option<Result<Rational>> {
        let ex = self.exact.as_ref()?;
        let n = n as i128;
        let v = n
            .checked_mul(n)
            .and_then(|nn| ex.ints[0].checked_mul(nn))
            .and_then(|a| ex.ints[1].checked_mul(n).and_then(|b| a.checked_add(b)))
            .and_then(|ab| ab.checked_add(ex.ints[2]))
            .ok_or(Error::Overflow("amplitude evaluation"));
        Some(v.and_then(|v| Rational::new(v, ex.den)))
    }

    /// Whether some `|x·f(n)|` on the window exceeds 2^52 on the
    /// floating-point phase path. Always `false` when the exact path applies.
    pub fn phase_precision_lost(&self, x: Point, offset: i64, len: usize) -> bool {
        if matches!(x, Point::Exact(_)) && self.exact.is_some() {
            return false;
        }
        let x = x.to_f64().abs();
        let lo = offset + 1;
        let hi = offset + len as i64;
        let mut candidates = vec![lo, hi];
        if self.alpha > 0.0 {
            let vertex = (-self.beta / (2.0 * self.alpha)).round() as i64;
            if (lo..=hi).contains(&vertex) {
                candidates.push(vertex);
            }
        }
        candidates
            .into_iter()
            .any(|n| x * self.eval(n).abs() > 2f64.powi(52))
    }

    fn kernel(&self, x: Point) -> Result<PhaseKernel> {
        match (x, &self.exact) {
            (Point::Exact(x), Some(ex)) => {
                let modulus = x
                    .den()
                    .checked_mul(ex.den)
                    .filter(|m| *m <= 1 << 62)
                    .ok_or(Error::Overflow("phase modulus"))?;
                Ok(PhaseKernel::Exact {
                    x_num: x.num().rem_euclid(modulus),
                    modulus,
                    ints: ex.ints.map(|c| c.rem_euclid(modulus)),
                })
            }
            _ => {
                let x = x.to_f64();
                Ok(PhaseKernel::Real {
                    xa: two_prod(x, self.alpha),
                    xb: two_prod(x, self.beta),
                    xc: frac(x * self.gamma),
                })
            }
        }
    }
}

/// Evaluates `f(n)`; the exact result is present when `f` has rational
/// coefficients.
pub fn eval_amplitude(f: &QuadraticAmplitude, n: i64) -> (f64, Option<Result<Rational>>) {
    (f.eval(n), f.eval_exact(n))
}

#[inline]
fn frac(t: f64) -> f64 {
    t - t.floor()
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `frac(a·b)` using the FMA residual of the product.
#[inline]
fn frac_prod(a: f64, b: f64) -> f64 {
    let (p, err) = two_prod(a, b);
    frac(frac(p) + err)
}

/// `e(r/m)` for an integer residue `0 <= r < m`; quarter turns are exact.
#[inline]
fn unit_from_residue(r: i128, modulus: i128) -> Complex64 {
    if (4 * r) % modulus == 0 {
        return match 4 * r / modulus {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // symmetric representative keeps e(1 − t) the exact conjugate of e(t)
    let centered = if 2 * r > modulus { r - modulus } else { r };
    e(centered as f64 / modulus as f64)
}

#[derive(Debug, Clone, Copy)]
enum PhaseKernel {
    Exact {
        x_num: i128,
        modulus: i128,
        ints: [i128; 3],
    },
    Real {
        xa: (f64, f64),
        xb: (f64, f64),
        xc: f64,
    },
}

impl PhaseKernel {
    /// `e(x·f(n))`.
    #[inline]
    fn unit(&self, n: i64) -> Complex64 {
        match *self {
            PhaseKernel::Exact {
                x_num,
                modulus,
                ints: [a, b, c],
            } => {
                // every operand is reduced below modulus <= 2^62, so the
                // products fit in i128
                let n = (n as i128).rem_euclid(modulus);
                let nn = n * n % modulus;
                let poly = ((a * nn % modulus + b * n % modulus) % modulus + c) % modulus;
                unit_from_residue(x_num * poly % modulus, modulus)
            }
            PhaseKernel::Real { xa, xb, xc } => {
                let nf = n as f64;
                let (nn, nn_err) = two_prod(nf, nf);
                let t = frac_prod(xa.0, nn)
                    + frac_prod(xa.1, nn)
                    + frac_prod(xa.0, nn_err)
                    + frac_prod(xb.0, nf)
                    + frac_prod(xb.1, nf)
                    + xc;
                e(frac(t))
            }
        }
    }
}

/// `S(x) = Σ aₙ e(x·f(n))`, summed in index order with compensation.
pub fn exp_sum(seq: &CoeffSeq, f: &QuadraticAmplitude, x: impl Into<Point>) -> Result<Complex64> {
    let kernel = f.kernel(x.into())?;
    Ok(sum_c64(seq.iter().map(|(n, a)| a * kernel.unit(n))))
}

/// Straightforward `Σ aₙ exp(2πi·x·f(n))` in double precision, without
/// phase reduction. Reference path for accuracy comparisons.
pub fn exp_sum_naive(seq: &CoeffSeq, f: &QuadraticAmplitude, x: f64) -> Complex64 {
    let (alpha, beta, gamma) = (f.alpha(), f.beta(), f.gamma());
    seq.iter()
        .map(|(n, a)| {
            let n = n as f64;
            a * e(x * (alpha * n * n + beta * n + gamma))
        })
        .sum()
}

/// `Σ_k |S(x_k)|²`. Points are evaluated in parallel; the reduction runs in
/// point order.
pub fn ls_lhs<P: SamplePoints + ?Sized>(
    seq: &CoeffSeq,
    f: &QuadraticAmplitude,
    points: &P,
) -> Result<f64> {
    let terms = point_terms(seq, f, &points.sample_points())?;
    Ok(sum_f64(terms))
}

/// The per-point terms `|S(x_k)|²` of [`ls_lhs`], in point order.
pub fn point_terms(seq: &CoeffSeq, f: &QuadraticAmplitude, points: &[Point]) -> Result<Vec<f64>> {
    points
        .par_iter()
        .map(|&x| exp_sum(seq, f, x).map(|s| s.norm_sqr()))
        .collect()
}

/// Dual form `Σ_{n=M+1}^{M+N} |Σ_k c_k e(x_k f(n))|²`.
pub fn dual_lhs<P: SamplePoints + ?Sized>(
    dual: &[Complex64],
    f: &QuadraticAmplitude,
    points: &P,
    offset: i64,
    len: usize,
) -> Result<f64> {
    let points = points.sample_points();
    if dual.len() != points.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: dual.len(),
        });
    }
    let kernels = points
        .iter()
        .map(|&x| f.kernel(x))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<f64> = (offset + 1..=offset + len as i64)
        .into_par_iter()
        .map(|n| {
            sum_c64(dual.iter().zip(&kernels).map(|(c, k)| c * k.unit(n))).norm_sqr()
        })
        .collect();
    Ok(sum_f64(terms))
}

/// The `K × N` matrix `t_{kn} = e(x_k f(n))`, rows indexed by points.
pub fn phase_matrix<P: SamplePoints + ?Sized>(
    f: &QuadraticAmplitude,
    points: &P,
    offset: i64,
    len: usize,
) -> Result<Vec<Vec<Complex64>>> {
    points
        .sample_points()
        .into_iter()
        .map(|x| {
            let k = f.kernel(x)?;
            Ok((offset + 1..=offset + len as i64).map(|n| k.unit(n)).collect())
        })
        .collect()
}

/// Largest eigenvalues of `T*T` and `TT*`, both estimated by power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityNorms {
    pub primal: f64,
    pub dual: f64,
    pub primal_iterations: usize,
    pub dual_iterations: usize,
}

impl DualityNorms {
    pub fn discrepancy(&self) -> f64 {
        (self.primal - self.dual).abs()
    }
}

/// Estimates the best constant `D` in both the primal inequality
/// `Σ_k |Σ_n aₙ t_{kn}|² <= D·Σ|aₙ|²` and its dual, for `t_{kn} = e(x_k f(n))`.
///
/// Each estimate stops once the residual `‖Gv − ρv‖` falls to `tol·ρ`.
/// Failing that within `iterations` steps yields
/// [`Error::NotConverged`] carrying the partial estimates.
pub fn duality_norm_check<P: SamplePoints + ?Sized>(
    f: &QuadraticAmplitude,
    points: &P,
    offset: i64,
    len: usize,
    iterations: usize,
    tol: f64,
) -> Result<DualityNorms> {
    if iterations == 0 {
        return domain("iterations must be at least 1");
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    if len == 0 {
        return domain("window length must be positive");
    }
    let t = phase_matrix(f, points, offset, len)?;
    if t.is_empty() {
        return domain("need at least one point");
    }
    let (rows, cols) = (t.len(), len);

    let apply_t = |v: &[Complex64]| -> Vec<Complex64> {
        t.iter()
            .map(|row| sum_c64(row.iter().zip(v).map(|(a, b)| a * b)))
            .collect()
    };
    let apply_t_adj = |u: &[Complex64]| -> Vec<Complex64> {
        (0..cols)
            .map(|j| sum_c64(t.iter().zip(u).map(|(row, b)| row[j].conj() * b)))
            .collect()
    };

    let primal = power_iteration(cols, iterations, tol, |v| apply_t_adj(&apply_t(v)));
    let dual = power_iteration(rows, iterations, tol, |u| apply_t(&apply_t_adj(u)));
    match (primal, dual) {
        (Ok((p, pi)), Ok((d, di))) => Ok(DualityNorms {
            primal: p,
            dual: d,
            primal_iterations: pi,
            dual_iterations: di,
        }),
        (p, d) => Err(Error::NotConverged {
            iterations,
            primal: p.unwrap_or_else(|x| x).0,
            dual: d.unwrap_or_else(|x| x).0,
        }),
    }
}

fn norm(v: &[Complex64]) -> f64 {
    sum_f64(v.iter().map(|z| z.norm_sqr())).sqrt()
}

/// Top eigenvalue of a positive semidefinite Hermitian operator. Returns
/// `(estimate, iterations)`; the error side carries the last estimate.
fn power_iteration(
    dim: usize,
    iterations: usize,
    tol: f64,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> std::result::Result<(f64, usize), (f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d0a1);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|z| *z /= n0);

    let mut rho = 0.0;
    for it in 1..=iterations {
        let w = apply(&v);
        rho = sum_c64(v.iter().zip(&w).map(|(a, b)| a.conj() * b)).re;
        let residual = norm(
            &w.iter()
                .zip(&v)
                .map(|(wi, vi)| wi - vi * rho)
                .collect::<Vec<_>>(),
        );
        if residual <= tol * rho.abs() {
            return Ok((rho, it));
        }
        let wn = norm(&w);
        if wn == 0.0 {
            return Ok((0.0, it));
        }
        v = w.into_iter().map(|z| z / wn).collect();
    }
    Err((rho, iterations))
}
