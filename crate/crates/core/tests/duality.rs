use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sievelab::expsum::{dual_lhs, duality_norm_check, ls_lhs, phase_matrix, CoeffSeq, Point, QuadraticAmplitude};
use sievelab::farey::farey_sequence;
use sievelab::{Error, Rational};

fn gram_top_eigenvalue(t: &DMatrix<Complex64>) -> f64 {
    let g = t.adjoint() * t;
    g.symmetric_eigen().eigenvalues.iter().copied().fold(f64::MIN, f64::max)
}

fn to_matrix(rows: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

#[test]
fn farey_norms_match_dense_eigensolver() {
    for q in [3u64, 5, 7] {
        let farey = farey_sequence(q).unwrap();
        for (alpha, beta) in [((1, 1), (0, 1)), ((1, 3), (1, 2)), ((2, 5), (-1, 3))] {
            let f = QuadraticAmplitude::exact(
                Rational::new(alpha.0, alpha.1).unwrap(),
                Rational::new(beta.0, beta.1).unwrap(),
                Rational::ZERO,
            )
            .unwrap();
            let len = 24;
            let norms = duality_norm_check(&f, &farey, -5, len, 100_000, 1e-12).unwrap();
            let oracle = gram_top_eigenvalue(&to_matrix(&phase_matrix(&f, &farey, -5, len).unwrap()));
            assert!((norms.primal - oracle).abs() <= 1e-6 * oracle, "{norms:?} vs {oracle}");
            assert!((norms.dual - oracle).abs() <= 1e-6 * oracle, "{norms:?} vs {oracle}");
        }
    }
}

#[test]
fn primal_and_dual_forms_respect_the_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = QuadraticAmplitude::exact(
        Rational::new(1, 2).unwrap(),
        Rational::new(1, 3).unwrap(),
        Rational::ZERO,
    )
    .unwrap();
    let pts: Vec<Point> = (0..15).map(|_| Point::Real(rng.random())).collect();
    let len = 30;
    let norms = duality_norm_check(&f, &pts, 0, len, 100_000, 1e-12).unwrap();
    for _ in 0..20 {
        let a: Vec<Complex64> = (0..len).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let seq = CoeffSeq::new(0, a).unwrap();
        assert!(ls_lhs(&seq, &f, pts.as_slice()).unwrap() <= norms.primal * seq.power() * (1.0 + 1e-9));
        let c: Vec<Complex64> = (0..pts.len()).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let z: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        assert!(dual_lhs(&c, &f, pts.as_slice(), 0, len).unwrap() <= norms.dual * z * (1.0 + 1e-9));
    }
}

#[test]
fn dual_length_mismatch_is_reported() {
    let farey = farey_sequence(3).unwrap();
    let err = dual_lhs(&[Complex64::default(); 2], &QuadraticAmplitude::square(), &farey, 0, 4).unwrap_err();
    assert!(matches!(err, Error::LengthMismatch { expected: 4, got: 2 }));
}
