use num_complex::Complex64;
use proptest::prelude::*;

use sievelab::arith::{
    dirichlet_approx, divisor_count, divisor_pairs, euler_phi, gcd, is_prime, Rational,
};
use sievelab::bounds::{additive_rhs, sharp_rhs};
use sievelab::counterexample::{build, modulus_term};
use sievelab::dls::{
    dls_check, g_eval, lemma4_count_bruteforce, lemma4_count_divisor, DlsInstance, Lemma4Instance,
};
use sievelab::expsum::{exp_sum, ls_lhs, CoeffSeq, QuadraticAmplitude};
use sievelab::farey::farey_sequence;

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d).unwrap()
}

fn seq_strategy(max_len: usize) -> impl Strategy<Value = (i64, Vec<(f64, f64)>)> {
    (-200i64..200, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_len))
}

fn to_seq((offset, v): &(i64, Vec<(f64, f64)>)) -> CoeffSeq {
    CoeffSeq::new(*offset, v.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
}

/// `e(x·f(n))` summed directly in floating point.
fn naive(seq: &CoeffSeq, f: (f64, f64, f64), x: f64) -> Complex64 {
    seq.iter()
        .map(|(n, a)| {
            let n = n as f64;
            let t = x * (f.0 * n * n + f.1 * n + f.2);
            a * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t.rem_euclid(1.0))
        })
        .sum()
}

fn mobius(mut n: u64) -> i64 {
    let mut sign = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Ramanujan sum `c_q(k) = Σ_{d | gcd(q,k)} μ(q/d)·d`.
fn ramanujan(q: u64, k: i64) -> i64 {
    let g = gcd(q as i128, k as i128) as u64;
    (1..=g).filter(|d| g.is_multiple_of(*d)).map(|d| mobius(q / d) * d as i64).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_field_laws(a in -1000i128..1000, b in 1i128..1000, c in -1000i128..1000, d in 1i128..1000) {
        let (x, y) = (r(a, b), r(c, d));
        prop_assert_eq!(gcd(x.num(), x.den()).abs(), 1);
        prop_assert!(x.den() > 0);
        prop_assert_eq!(x + y, y + x);
        prop_assert_eq!(x * y, y * x);
        prop_assert_eq!((x + y) - y, x);
        prop_assert_eq!(x < y, (a * d) < (c * b));
        prop_assert!(x.floor() <= x.ceil());
        prop_assert!(Rational::from_integer(x.floor()) <= x);
        prop_assert_eq!(x.frac() + Rational::from_integer(x.floor()), x);
        let back: Rational = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn phi_and_divisors_match_counting(n in 1u64..3000) {
        let coprime = (1..=n).filter(|&k| gcd(k as i128, n as i128) == 1).count() as u64;
        prop_assert_eq!(euler_phi(n).unwrap(), coprime);
        let divisors = (1..=n).filter(|d| n % d == 0).count() as u64;
        prop_assert_eq!(divisor_count(n as i128).unwrap(), divisors);
        prop_assert_eq!(is_prime(n), divisors == 2);
    }

    #[test]
    fn divisor_pairs_factor_k(k in -5000i128..5000) {
        prop_assume!(k != 0);
        let pairs = divisor_pairs(k).unwrap();
        prop_assert_eq!(pairs.len() as u64, 2 * divisor_count(k).unwrap());
        prop_assert!(pairs.iter().all(|&(u, v)| u * v == k));
        prop_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn dirichlet_precondition(theta in -10.0f64..10.0, n in 1u64..2000) {
        let a_b = dirichlet_approx(theta, 4 * n).unwrap();
        let b = a_b.den() as f64;
        prop_assert!(a_b.den() as u64 <= 4 * n);
        prop_assert!((theta - a_b.to_f64()).abs() < 1.0 / (4.0 * b * n as f64));
    }

    #[test]
    fn exact_matches_naive(s in seq_strategy(60), p in -5i128..=5, q in 1i128..=7, al in 1i128..=5, ad in 1i128..=5, x_num in 0i128..50, x_den in 1i128..50) {
        let seq = to_seq(&s);
        let (alpha, beta) = (r(al, ad), r(p, q));
        let f = QuadraticAmplitude::exact(alpha, beta, Rational::ZERO).unwrap();
        let x = r(x_num, x_den);
        let got = exp_sum(&seq, &f, x).unwrap();
        let want = naive(&seq, (alpha.to_f64(), beta.to_f64(), 0.0), x.to_f64());
        prop_assert!((got - want).norm() <= 1e-8 * (1.0 + want.norm()), "{} vs {}", got, want);
    }

    #[test]
    fn global_phase_is_invisible(s in seq_strategy(40), theta in 0.0f64..1.0, q in 2u64..12) {
        let seq = to_seq(&s);
        let farey = farey_sequence(q).unwrap();
        let f = QuadraticAmplitude::square();
        let rotated = seq.scaled(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta));
        let (a, b) = (ls_lhs(&seq, &f, &farey).unwrap(), ls_lhs(&rotated, &f, &farey).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn parseval(s in seq_strategy(120), q in 1i128..=20) {
        let seq = to_seq(&s);
        let f = QuadraticAmplitude::linear();
        let lhs: f64 = (0..q).map(|a| exp_sum(&seq, &f, r(a, q)).unwrap().norm_sqr()).sum();
        let mut buckets = vec![Complex64::default(); q as usize];
        for (n, a) in seq.iter() {
            buckets[(n as i128).rem_euclid(q) as usize] += a;
        }
        let rhs = q as f64 * buckets.iter().map(|b| b.norm_sqr()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1e-300));
    }

    #[test]
    fn classical_bounds_hold(s in seq_strategy(256), q in 2u64..=32) {
        let seq = to_seq(&s);
        let farey = farey_sequence(q).unwrap();
        let lhs = ls_lhs(&seq, &QuadraticAmplitude::linear(), &farey).unwrap();
        let z = seq.power();
        let delta = farey.min_gap().unwrap().to_f64();
        prop_assert!(lhs <= sharp_rhs(delta, seq.len() as u64, z).unwrap() * (1.0 + 1e-9));
        prop_assert!(lhs <= additive_rhs(q, seq.len() as u64, z) * (1.0 + 1e-9));
    }

    #[test]
    fn double_large_sieve_holds(
        xs in prop::collection::vec(-0.5f64..0.5, 1..30),
        ys in prop::collection::vec(-0.5f64..0.5, 1..30),
        lx in -1.4f64..2.0, ly in -1.4f64..2.0,
        seed in any::<u64>(),
    ) {
        let (x_span, y_span) = (10f64.powf(lx), 10f64.powf(ly));
        let xs: Vec<f64> = xs.iter().map(|u| u * x_span).collect();
        let ys: Vec<f64> = ys.iter().map(|u| u * y_span).collect();
        let w = |i: usize, k: u64| Complex64::new(((seed ^ k).wrapping_mul(i as u64 + 7) % 97) as f64 / 97.0 - 0.4, (i % 5) as f64 / 5.0);
        let aw: Vec<Complex64> = (0..xs.len()).map(|i| w(i, 1)).collect();
        let bw: Vec<Complex64> = (0..ys.len()).map(|i| w(i, 2)).collect();
        let direct: f64 = {
            let s: Complex64 = xs.iter().zip(&aw).flat_map(|(x, a)| {
                ys.iter().zip(&bw).map(move |(y, b)| a * b * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (x * y).rem_euclid(1.0)))
            }).sum();
            s.norm_sqr()
        };
        let inst = DlsInstance::new(xs, ys, aw, bw, x_span, y_span).unwrap();
        let chk = dls_check(&inst);
        prop_assert!((chk.lhs - direct).abs() <= 1e-9 * direct.max(1.0));
        prop_assert!(chk.holds, "{:?}", chk);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_counters_agree(offset in -10i64..10, len in 1u64..=12, an in 1i128..=6, ad in 1i128..=12, a in -5i64..=5, b in 1i64..=6, pick in any::<(u64, u64)>()) {
        prop_assume!(gcd(a as i128, b as i128) == 1);
        let m = offset + 1 + (pick.0 % len) as i64;
        let n = offset + 1 + (pick.1 % len) as i64;
        let inst = Lemma4Instance::new(offset, len, r(an, ad), a, b, m, n).unwrap();
        let brute = lemma4_count_bruteforce(&inst).unwrap();
        prop_assert_eq!(brute, lemma4_count_divisor(&inst).unwrap());

        // integer oracle: 2α·|b·g − b·g'| <= b, with α = an/ad
        let g0 = g_eval(m, n, a, b).unwrap();
        let bg0 = g0.num() * (b as i128 / g0.den());
        let mut count = 0;
        for s in offset + 1..=offset + len as i64 {
            for t in offset + 1..=offset + len as i64 {
                let bg = (s - t) as i128 * (b as i128 * (s + t) as i128 + a as i128);
                if bg != 0 && 2 * an * (bg - bg0).abs() <= b as i128 * ad {
                    count += 1;
                }
            }
        }
        prop_assert_eq!(brute, count);

        // a larger α shrinks the window 1/(2α)
        let tighter = Lemma4Instance::new(offset, len, r(2 * an, ad), a, b, m, n).unwrap();
        prop_assert!(lemma4_count_bruteforce(&tighter).unwrap() <= brute);
    }
}

#[test]
fn counterexample_matches_ramanujan_oracle() {
    for p in [2u64, 3, 5] {
        for k in [1u64, 2, 4] {
            let inst = build(p, p * k).unwrap();
            for q in 1..=p * p {
                // Σ_a |p Σ_j e(a p² j²/q)|² = p² Σ_{j,j'} c_q(p²(j² − j'²))
                let mut want = 0i64;
                for j in 1..=k as i64 {
                    for jp in 1..=k as i64 {
                        want += ramanujan(q, (p * p) as i64 * (j * j - jp * jp));
                    }
                }
                want *= (p * p) as i64;
                let got = modulus_term(&inst, q).unwrap();
                assert!(
                    (got - want as f64).abs() <= 1e-9 * (want as f64).max(1.0),
                    "p={p} N={} q={q}: {got} vs {want}",
                    p * k
                );
            }
        }
    }
}

#[test]
fn counterexample_ratio_tends_to_p_minus_one() {
    for p in [2u64, 3, 5] {
        let mut last = 0.0;
        for k in [1u64, 10, 100, 1000] {
            let inst = build(p, p * k).unwrap();
            let ratio = modulus_term(&inst, p * p).unwrap() / additive_rhs(p * p, p * k, inst.z() as f64);
            assert!(ratio > last && ratio < (p - 1) as f64, "p={p} k={k}: {ratio}");
            last = ratio;
        }
    }
}
