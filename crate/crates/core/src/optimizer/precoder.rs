use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Factorized;
use crate::real::{CMatrix, Real};

/// Regularized precoder before and after power normalization.
#[derive(Debug, Clone)]
pub struct Precoder<T: Real> {
    /// `(H^H H + mu I)^{-1} H^H`
    pub w_bar: CMatrix<T>,
    /// `sqrt(P) w_bar / ||w_bar||_F`
    pub w: CMatrix<T>,
    /// `L sigma^2 / P`
    pub mu: T,
}

fn frobenius<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
}

/// Closed-form MMSE-type precoder with full-power normalization.
pub fn regularized_precoder<T: Real>(h: &CMatrix<T>, power: T, sigma_n2: T) -> Result<Precoder<T>> {
    if !(power > T::zero()) {
        return Err(Error::InvalidArgument(format!("transmit power must be positive, got {power}")));
    }
    if !(sigma_n2 >= T::zero()) {
        return Err(Error::InvalidArgument(format!("noise power must be non-negative, got {sigma_n2}")));
    }
    let scale = frobenius(h);
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::DegenerateChannel);
    }
    let (l, m) = h.shape();
    let mu = T::lit(l as f64) * sigma_n2 / power;

    // Work on H / ||H||_F so the Gram matrix is O(1); the shift scales with it.
    let hs = h.map(|v| v / Complex::new(scale, T::zero()));
    let hs_adj = hs.adjoint();
    let mut gram = &hs_adj * &hs;
    let shift = Complex::new(mu / (scale * scale), T::zero());
    for i in 0..m {
        gram[(i, i)] += shift;
    }
    let w_scaled = match Cholesky::new(gram.clone()) {
        Some(ch) => ch.solve(&hs_adj),
        None => Factorized::new(gram, "H^H H + mu I")?.solve(&hs_adj),
    };
    // (H^H H + mu I)^{-1} H^H = (Hs^H Hs + mu/s^2 I)^{-1} Hs^H / s
    let w_bar = w_scaled.map(|v| v / Complex::new(scale, T::zero()));
    let nb = frobenius(&w_bar);
    if !(nb > T::zero()) || !nb.is_finite() {
        return Err(Error::DegenerateChannel);
    }
    let k = Complex::new(power.sqrt() / nb, T::zero());
    let w = w_bar.map(|v| v * k);
    Ok(Precoder { w_bar, w, mu })
}

/// Power-normalized precoder `W` (M x L).
pub fn optimal_precoder<T: Real>(h: &CMatrix<T>, power: T, sigma_n2: T) -> Result<CMatrix<T>> {
    Ok(regularized_precoder(h, power, sigma_n2)?.w)
}

/// Relative residual of the zero-gradient condition
/// `(H^H H + mu I) W_bar = H^H`, normalized by `||H||_F`.
pub fn stationarity_residual<T: Real>(h: &CMatrix<T>, w_bar: &CMatrix<T>, mu: T) -> T {
    let m = h.ncols();
    let mut a = h.adjoint() * h;
    for i in 0..m {
        a[(i, i)] += Complex::new(mu, T::zero());
    }
    let r: DMatrix<Complex<T>> = a * w_bar - h.adjoint();
    frobenius(&r) / frobenius(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C64 = Complex<f64>;

    fn random(r: usize, c: usize, scale: f64, seed: u64) -> CMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(r, c, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale
        })
    }

    #[test]
    fn full_power() {
        for (seed, scale) in [(1, 1.0), (2, 1e-3), (3, 1e3)] {
            let h = random(2, 4, scale, seed);
            for p in [0.1, 1.0, 7.5] {
                let w = optimal_precoder(&h, p, 1e-11).unwrap();
                let e: f64 = w.iter().map(|v| v.norm_sqr()).sum();
                assert!((e - p).abs() <= 1e-12 * p, "{e} vs {p}");
            }
        }
    }

    #[test]
    fn scalar_phase_conjugate() {
        let h = DMatrix::from_element(1, 1, C64::new(-0.3, 0.4));
        let w = optimal_precoder(&h, 2.0, 0.1).unwrap();
        let expect = h[(0, 0)].conj() / h[(0, 0)].norm() * 2f64.sqrt();
        assert!((w[(0, 0)] - expect).norm() < 1e-14);
    }

    #[test]
    fn residual_small_across_scales() {
        for (seed, scale) in [(4, 1.0), (5, 1e-3), (6, 1e-5)] {
            let h = random(3, 4, scale, seed);
            let p = regularized_precoder(&h, 1.0, 1e-11).unwrap();
            assert!(stationarity_residual(&h, &p.w_bar, p.mu) < 1e-8);
        }
    }

    #[test]
    fn zero_channel_is_degenerate() {
        let h = DMatrix::<C64>::zeros(2, 4);
        assert!(matches!(optimal_precoder(&h, 1.0, 1e-3), Err(Error::DegenerateChannel)));
    }

    #[test]
    fn zero_forcing_limit() {
        // tiny regularization: H W_bar ~ I
        let h = random(2, 4, 1.0, 9);
        let p = regularized_precoder(&h, 1.0, 1e-14).unwrap();
        let hw = &h * &p.w_bar;
        let err = (hw - DMatrix::<C64>::identity(2, 2)).norm();
        assert!(err < 1e-10);
    }
}
