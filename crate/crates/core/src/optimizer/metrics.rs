use crate::error::{Error, Result};
use crate::real::{CMatrix, Real};

fn check_dims<T: Real>(h: &CMatrix<T>, w: &CMatrix<T>) -> Result<()> {
    if h.ncols() != w.nrows() || h.nrows() != w.ncols() {
        return Err(Error::Dimension {
            context: "channel/precoder",
            expected: format!("precoder {}x{}", h.ncols(), h.nrows()),
            got: format!("{}x{}", w.nrows(), w.ncols()),
        });
    }
    Ok(())
}

/// Sum of the per-user mean squared errors with unit-gain receivers,
/// for the channel `h_d + h_ris`.
pub fn smse<T: Real>(
    h_d: &CMatrix<T>,
    h_ris: &CMatrix<T>,
    w: &CMatrix<T>,
    sigma_n2: T,
) -> Result<T> {
    if h_d.shape() != h_ris.shape() {
        return Err(Error::Dimension {
            context: "channel parts",
            expected: format!("{:?}", h_d.shape()),
            got: format!("{:?}", h_ris.shape()),
        });
    }
    smse_total(&(h_d + h_ris), w, sigma_n2)
}

/// SMSE for a full channel matrix `H` (L x M).
pub fn smse_total<T: Real>(h: &CMatrix<T>, w: &CMatrix<T>, sigma_n2: T) -> Result<T> {
    check_dims(h, w)?;
    let l = h.nrows();
    let hw = h * w;
    let power: T = hw.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
    let gain: T = (0..l).fold(T::zero(), |acc, i| acc + hw[(i, i)].re);
    let lf = T::lit(l as f64);
    Ok(power - T::lit(2.0) * gain + lf * (T::one() + sigma_n2))
}

/// Per-user SINR with single-user decoding.
pub fn sinr<T: Real>(h: &CMatrix<T>, w: &CMatrix<T>, sigma_n2: T) -> Result<Vec<T>> {
    check_dims(h, w)?;
    let hw = h * w;
    Ok((0..h.nrows())
        .map(|l| {
            let desired = hw[(l, l)].norm_sqr();
            let interference = (0..h.nrows())
                .filter(|&k| k != l)
                .fold(T::zero(), |acc, k| acc + hw[(l, k)].norm_sqr());
            desired / (interference + sigma_n2)
        })
        .collect())
}

/// Sum-rate in bits/s/Hz.
pub fn sum_rate<T: Real>(h: &CMatrix<T>, w: &CMatrix<T>, sigma_n2: T) -> Result<T> {
    Ok(sinr(h, w, sigma_n2)?
        .into_iter()
        .fold(T::zero(), |acc, g| acc + (T::one() + g).log2()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C64 = Complex<f64>;

    fn random(r: usize, c: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn zero_precoder() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random(3, 4, &mut rng);
        let w = DMatrix::zeros(4, 3);
        let v = smse_total(&h, &w, 0.25).unwrap();
        assert!((v - 3.0 * 1.25).abs() < 1e-15);
    }

    #[test]
    fn matched_scalar() {
        let h = DMatrix::from_element(1, 1, C64::new(0.6, 0.8));
        let w = DMatrix::from_element(1, 1, C64::new(0.6, -0.8));
        assert!(smse_total(&h, &w, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn smse_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hd = random(2, 4, &mut rng);
        let hr = random(2, 4, &mut rng);
        let w = random(4, 2, &mut rng);
        let s2 = 0.3;
        let mut brute = 0.0;
        for l in 0..2 {
            for k in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..4 {
                    acc += (hd[(l, m)] + hr[(l, m)]) * w[(m, k)];
                }
                brute += acc.norm_sqr();
                if k == l {
                    brute -= 2.0 * acc.re;
                }
            }
        }
        brute += 2.0 * (1.0 + s2);
        assert!((smse(&hd, &hr, &w, s2).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn rate_without_interference() {
        // diagonal effective channel, |h w_l|^2 = sigma^2
        let s2: f64 = 0.5;
        let h = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)]);
        let a = s2.sqrt();
        let w = DMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, -a)]);
        assert!((sum_rate(&h, &w, s2).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_user_rate() {
        let h = DMatrix::from_row_slice(1, 2, &[C64::new(0.3, 0.1), C64::new(-0.2, 0.4)]);
        let w = DMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.5), C64::new(0.1, -0.3)]);
        let g = (&h * &w)[(0, 0)].norm_sqr();
        let expect = (1.0 + g / 0.01).log2();
        assert!((sum_rate(&h, &w, 0.01).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn rate_matches_scalar_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random(3, 4, &mut rng);
        let w = random(4, 3, &mut rng);
        let s2 = 0.07;
        let mut r = 0.0;
        for l in 0..3 {
            let mut num = 0.0;
            let mut den = s2;
            for k in 0..3 {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..4 {
                    acc += h[(l, m)] * w[(m, k)];
                }
                if k == l {
                    num = acc.norm_sqr();
                } else {
                    den += acc.norm_sqr();
                }
            }
            r += (1.0f64 + num / den).log2();
        }
        assert!((sum_rate(&h, &w, s2).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let h = DMatrix::<C64>::zeros(2, 3);
        let w = DMatrix::<C64>::zeros(2, 2);
        assert!(matches!(smse_total(&h, &w, 1.0), Err(Error::Dimension { .. })));
        assert!(sum_rate(&h, &w, 1.0).is_err());
    }
}
