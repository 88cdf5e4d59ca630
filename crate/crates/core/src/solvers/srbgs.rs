//! Symmetric red-black Gauss-Seidel for `(I - sigma_tau * Laplacian) x = b`
//! with Neumann boundary, used as a feasible preconditioner inside pDR.

use crate::grid::ScalarField;
use crate::scalar::Real;

/// Relaxes every pixel with `(row + col) % 2 == parity` in place.
fn relax_color<T: Real>(x: &mut ScalarField<T>, b: &ScalarField<T>, sigma_tau: T, parity: usize) {
    let (w, h) = x.dims();
    let xs = x.as_mut_slice();
    let bs = b.as_slice();
    let one = T::one();
    for i in 0..h {
        let row = i * w;
        let start = (parity + i) % 2;
        for j in (start..w).step_by(2) {
            let k = row + j;
            let mut sum = T::zero();
            let mut degree = 0usize;
            if j > 0 {
                sum = sum + xs[k - 1];
                degree += 1;
            }
            if j + 1 < w {
                sum = sum + xs[k + 1];
                degree += 1;
            }
            if i > 0 {
                sum = sum + xs[k - w];
                degree += 1;
            }
            if i + 1 < h {
                sum = sum + xs[k + w];
                degree += 1;
            }
            let diag = one + sigma_tau * T::from_usize(degree).unwrap();
            xs[k] = (bs[k] + sigma_tau * sum) / diag;
        }
    }
}

/// Runs `sweeps` symmetric red-black passes starting from `x`.
///
/// One pass is red, black, black, red; the repeated black half-sweep is a
/// no-op, so it is applied once. The result equals `x + M^{-1} (b - T x)` for
/// a symmetric `M >= T`.
pub fn srbgs_apply<T: Real>(x: &ScalarField<T>, b: &ScalarField<T>, sigma_tau: T, sweeps: usize) -> ScalarField<T> {
    let mut out = x.clone();
    srbgs_in_place(&mut out, b, sigma_tau, sweeps);
    out
}

pub fn srbgs_in_place<T: Real>(x: &mut ScalarField<T>, b: &ScalarField<T>, sigma_tau: T, sweeps: usize) {
    assert_eq!(x.dims(), b.dims(), "srbgs on mismatched fields");
    for _ in 0..sweeps {
        relax_color(x, b, sigma_tau, 0);
        relax_color(x, b, sigma_tau, 1);
        relax_color(x, b, sigma_tau, 0);
    }
}

/// Applies `M^{-1}` of the `sweeps`-pass preconditioner to `r`.
pub fn srbgs_preconditioner_inverse<T: Real>(r: &ScalarField<T>, sigma_tau: T, sweeps: usize) -> ScalarField<T> {
    let (w, h) = r.dims();
    srbgs_apply(&ScalarField::zeros(w, h), r, sigma_tau, sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Field;
    use crate::operators::laplacian_apply;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ScalarField<f64> {
        ScalarField::from_fn(w, h, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn exact_solution_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random(&mut rng, 7, 6);
        let b = laplacian_apply(&x, 0.8);
        for sweeps in [1, 3] {
            let y = srbgs_apply(&x, &b, 0.8, sweeps);
            for (a, c) in x.as_slice().iter().zip(y.as_slice()) {
                assert!((a - c).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_rhs_converges_to_constant() {
        let b = ScalarField::constant(8, 8, 0.6f64);
        let x = srbgs_apply(&ScalarField::zeros(8, 8), &b, 0.8, 200);
        assert!(x.as_slice().iter().all(|&v| (v - 0.6).abs() < 1e-10));
    }

    #[test]
    fn residual_does_not_grow() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let b = random(&mut rng, 9, 7);
            let mut x = random(&mut rng, 9, 7);
            let st = rng.gen_range(0.05..5.0);
            let mut prev = b.zip_map(&laplacian_apply(&x, st), |p, q| p - q).norm_squared();
            for _ in 0..10 {
                srbgs_in_place(&mut x, &b, st, 1);
                let r = b.zip_map(&laplacian_apply(&x, st), |p, q| p - q).norm_squared();
                assert!(r <= prev * (1.0 + 1e-12) + 1e-28);
                prev = r;
            }
        }
    }
}
