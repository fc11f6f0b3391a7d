//! Hurwitz test and the continuous Lyapunov equation `AW + WAᵀ = -Q`.
//!
//! The equation is solved directly as the Kronecker-sum system
//! `(I⊗A + A⊗I) vec(W) = -vec(Q)` with pivoted elimination, after scaling by
//! the norm of `A`, followed by a few rounds of iterative refinement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::scalar::Scalar;

/// Largest order accepted by the kernels here.
pub const MAX_ORDER: usize = 16;
/// Relative residual above which a solution is flagged.
pub const RESIDUAL_GATE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HurwitzTest<T> {
    pub is_hurwitz: bool,
    /// Largest real part of the spectrum.
    pub abscissa: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovSolution<T: Scalar> {
    pub w: Matrix<T>,
    /// `‖AW + WAᵀ + Q‖_F / ‖Q‖_F` (absolute when `Q = 0`).
    pub residual_norm: T,
}

impl<T: Scalar> LyapunovSolution<T> {
    pub fn passes_gate(&self) -> bool {
        self.residual_norm.as_f64() < RESIDUAL_GATE
    }
}

fn check_square<T: Scalar>(a: &Matrix<T>, what: &str) -> Result<usize> {
    if !a.is_square() || a.nrows() == 0 || a.nrows() > MAX_ORDER {
        return Err(Error::Dimension(format!(
            "{what} must be square of order 1..={MAX_ORDER}, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// Stable iff the spectral abscissa is below `-1e-12·‖A‖_F`.
pub fn is_hurwitz<T: Scalar>(a: &Matrix<T>) -> Result<HurwitzTest<T>> {
    check_square(a, "drift matrix")?;
    let abscissa = a
        .eigenvalues()?
        .iter()
        .map(|z| z.re)
        .fold(T::neg_infinity(), T::max);
    let tol = T::lit(1e-12) * a.frobenius_norm();
    Ok(HurwitzTest {
        is_hurwitz: abscissa < -tol,
        abscissa,
    })
}

/// `AW + WAᵀ + Q` for symmetric `W`.
pub fn lyapunov_residual<T: Scalar>(a: &Matrix<T>, w: &Matrix<T>, q: &Matrix<T>) -> Matrix<T> {
    let aw = a * w;
    &(&aw + &aw.transpose()) + q
}

/// Solves `AW + WAᵀ = -Q` after checking that `A` is Hurwitz.
pub fn solve_lyapunov<T: Scalar>(a: &Matrix<T>, q: &Matrix<T>) -> Result<LyapunovSolution<T>> {
    let h = is_hurwitz(a)?;
    if !h.is_hurwitz {
        return Err(Error::NotHurwitz {
            abscissa: h.abscissa.as_f64(),
        });
    }
    solve_lyapunov_unchecked(a, q)
}

/// Same as [`solve_lyapunov`] for callers that already established
/// stability. A singular Kronecker system still reports an error.
pub fn solve_lyapunov_unchecked<T: Scalar>(
    a: &Matrix<T>,
    q: &Matrix<T>,
) -> Result<LyapunovSolution<T>> {
    let n = check_square(a, "drift matrix")?;
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::Dimension(format!(
            "diffusion matrix is {}x{}, drift is {n}x{n}",
            q.nrows(),
            q.ncols()
        )));
    }
    let s = a.max_abs();
    if s.is_zero() {
        return Err(Error::Singular);
    }
    let a_s = a.scale(s.recip());
    let q_s = q.scale(s.recip());

    // vec index i*n + j holds W[i, j]
    let nn = n * n;
    let mut k = Matrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for l in 0..n {
                k[(row, l * n + j)] = k[(row, l * n + j)] + a_s[(i, l)];
                k[(row, i * n + l)] = k[(row, i * n + l)] + a_s[(j, l)];
            }
        }
    }
    let lu = Lu::factor(&k)?;
    let rhs: Vec<T> = q_s.as_slice().iter().map(|&x| -x).collect();
    let x = lu.solve(&rhs);

    // the residual helper assumes a symmetric W, so refine the symmetric part
    let mut w = Matrix::from_fn(n, n, |i, j| x[i * n + j]).symmetrized();
    for _ in 0..3 {
        let r = lyapunov_residual(&a_s, &w, &q_s);
        let neg: Vec<T> = r.as_slice().iter().map(|&v| -v).collect();
        let dx = lu.solve(&neg);
        w = Matrix::from_fn(n, n, |i, j| w[(i, j)] + dx[i * n + j]).symmetrized();
    }

    let qn = q.frobenius_norm();
    let rn = lyapunov_residual(a, &w, q).frobenius_norm();
    let residual_norm = if qn.is_zero() { rn } else { rn / qn };
    Ok(LyapunovSolution { w, residual_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hurwitz(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        let m = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let shift = m
            .eigenvalues()
            .unwrap()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        &m - &Matrix::identity(n).scale(shift + rng.gen_range(0.05..1.0))
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        let b = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &b * &b.transpose()
    }

    #[test]
    fn scalar_case() {
        let a = Matrix::from_rows(&[[-2.0f64]]);
        let q = Matrix::from_rows(&[[4.0]]);
        let sol = solve_lyapunov(&a, &q).unwrap();
        assert!((sol.w[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hurwitz_examples() {
        let h = is_hurwitz(&Matrix::<f64>::identity(3).scale(-1.0)).unwrap();
        assert!(h.is_hurwitz);
        assert!((h.abscissa + 1.0).abs() < 1e-14);
        let rot = Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!(!is_hurwitz(&rot).unwrap().is_hurwitz);
        assert!(matches!(
            solve_lyapunov(&rot, &Matrix::identity(2)),
            Err(Error::NotHurwitz { .. })
        ));
    }

    #[test]
    fn damped_rotation_block() {
        // A + Aᵀ = -2κ I for the optical block, so W = (N + ½) I
        let (k, d, n) = (0.7f64, 1.9, 0.3);
        let a = Matrix::from_rows(&[[-k, d], [-d, -k]]);
        let q = Matrix::identity(2).scale(k * (2.0 * n + 1.0));
        let w = solve_lyapunov(&a, &q).unwrap().w;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { n + 0.5 } else { 0.0 };
                assert!((w[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn random_order_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_hurwitz(&mut rng, 8);
            let q = random_psd(&mut rng, 8);
            let sol = solve_lyapunov(&a, &q).unwrap();
            assert!(sol.residual_norm < 1e-10, "{}", sol.residual_norm);
            assert!(sol.w.asymmetry() == 0.0);
        }
    }

    #[test]
    fn lightly_damped_oscillator_meets_gate() {
        // zero detuning: the mirror sees only its intrinsic damping, W is
        // large and the individual terms of AW cancel to ~1e-5 relative
        let (w, g, k, c, n) = (1.0f64, 1e-5, 1.4, 1.46, 836.0);
        let a = Matrix::from_rows(&[
            [0.0, w, 0.0, 0.0],
            [-w, -g, c, 0.0],
            [0.0, 0.0, -k, 0.0],
            [c, 0.0, 0.0, -k],
        ]);
        let q = Matrix::from_diagonal(&[0.0, g * (2.0 * n + 1.0), k, k]);
        let sol = solve_lyapunov(&a, &q).unwrap();
        assert!(sol.passes_gate(), "{:e}", sol.residual_norm);
        assert!(sol.w[(0, 1)].abs() < 1e-9 * sol.w.max_abs());
    }

    #[test]
    fn f32_solve() {
        let a = Matrix::from_rows(&[[-1.0f32, 2.0], [-2.0, -1.0]]);
        let q = Matrix::identity(2).scale(3.0f32);
        let sol = solve_lyapunov(&a, &q).unwrap();
        assert!(sol.residual_norm < 1e-5);
        assert!((sol.w[(0, 0)] - 1.5).abs() < 1e-5);
    }

    #[test]
    fn dimension_mismatch() {
        let a = Matrix::<f64>::identity(3).scale(-1.0);
        assert!(matches!(
            solve_lyapunov(&a, &Matrix::identity(2)),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn linear_in_q(seed in any::<u64>(), c in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hurwitz(&mut rng, 6);
            let q = random_psd(&mut rng, 6);
            let w1 = solve_lyapunov(&a, &q).unwrap().w;
            let w2 = solve_lyapunov(&a, &q.scale(c)).unwrap().w;
            let diff = (&w2 - &w1.scale(c)).frobenius_norm();
            prop_assert!(diff <= 1e-10 * w2.frobenius_norm());
        }

        #[test]
        fn invariant_under_reordering(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let a = random_hurwitz(&mut rng, n);
            let q = random_psd(&mut rng, n);
            let perm = [3usize, 0, 4, 2, 1];
            let pa = Matrix::from_fn(n, n, |i, j| a[(perm[i], perm[j])]);
            let pq = Matrix::from_fn(n, n, |i, j| q[(perm[i], perm[j])]);
            let w = solve_lyapunov(&a, &q).unwrap().w;
            let pw = solve_lyapunov(&pa, &pq).unwrap().w;
            let back = Matrix::from_fn(n, n, |i, j| pw[(i, j)]);
            let w_perm = Matrix::from_fn(n, n, |i, j| w[(perm[i], perm[j])]);
            prop_assert!((&back - &w_perm).frobenius_norm() <= 1e-10 * w.frobenius_norm());
        }

        #[test]
        fn stable_psd_gives_psd(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hurwitz(&mut rng, 4);
            let q = random_psd(&mut rng, 4);
            let w = solve_lyapunov(&a, &q).unwrap().w;
            let lo = w.symmetric_eigenvalues()[0];
            prop_assert!(lo >= -1e-10 * w.frobenius_norm());
        }
    }
}
