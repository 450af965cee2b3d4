//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{cabs, CMatrix, CVector, Real};

/// Matrices with a (1-norm) condition number above this are rejected as
/// numerically singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// LU factorization of a square matrix with its condition number estimate.
#[derive(Debug, Clone)]
pub struct Factorized<T: Real> {
    n: usize,
    lu: Option<LU<Complex<T>, Dyn, Dyn>>,
    l_adj: CMatrix<T>,
    u_adj: CMatrix<T>,
    condition: f64,
}

impl<T: Real> Factorized<T> {
    /// Factorize `a`; `block` names the matrix in the singularity error.
    pub fn new(a: CMatrix<T>, block: &'static str) -> Result<Self> {
        assert!(a.is_square(), "{block} must be square");
        let n = a.nrows();
        if n == 0 {
            return Ok(Factorized {
                n,
                lu: None,
                l_adj: DMatrix::zeros(0, 0),
                u_adj: DMatrix::zeros(0, 0),
                condition: 1.0,
            });
        }
        let norm_a = norm1(&a);
        let lu = a.lu();
        if !lu.is_invertible() || !norm_a.is_finite() {
            return Err(Error::Singular {
                block,
                condition: f64::INFINITY,
            });
        }
        let mut f = Factorized {
            n,
            l_adj: lu.l().adjoint(),
            u_adj: lu.u().adjoint(),
            lu: Some(lu),
            condition: 0.0,
        };
        let condition = norm_a * f.inverse_norm1_estimate();
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::Singular { block, condition });
        }
        f.condition = condition;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Estimated 1-norm condition number.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `A^{-1} B`
    pub fn solve(&self, b: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(b.nrows(), self.n, "right-hand side has wrong row count");
        match &self.lu {
            None => DMatrix::zeros(0, b.ncols()),
            Some(lu) => lu.solve(b).expect("factorization checked invertible"),
        }
    }

    pub fn solve_vec(&self, b: &CVector<T>) -> CVector<T> {
        assert_eq!(b.len(), self.n, "right-hand side has wrong length");
        match &self.lu {
            None => DVector::zeros(0),
            Some(lu) => lu.solve(b).expect("factorization checked invertible"),
        }
    }

    /// `A^{-H} b`, reusing the factors of `A` (`P A = L U`).
    pub fn solve_adjoint_vec(&self, b: &CVector<T>) -> CVector<T> {
        let Some(lu) = &self.lu else {
            return DVector::zeros(0);
        };
        let w = self
            .u_adj
            .solve_lower_triangular(b)
            .expect("nonsingular U");
        let mut v = self
            .l_adj
            .solve_upper_triangular(&w)
            .expect("unit-diagonal L");
        lu.p().inv_permute_rows(&mut v);
        v
    }

    pub fn inverse(&self) -> CMatrix<T> {
        self.solve(&DMatrix::identity(self.n, self.n))
    }

    /// Hager/Higham estimate of `||A^{-1}||_1`.
    fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        let nf = T::lit(n as f64);
        let mut x: CVector<T> = DVector::from_element(n, Complex::new(T::one() / nf, T::zero()));
        let mut est = 0.0f64;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve_vec(&x);
            est = est.max(vec_norm1(&y));
            let xi = y.map(|v| {
                let m = cabs(v);
                if m == T::zero() {
                    Complex::new(T::one(), T::zero())
                } else {
                    v / m
                }
            });
            let z = self.solve_adjoint_vec(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .fold((0, T::zero()), |(bj, bm), (i, v)| {
                    let m = cabs(*v);
                    if m > bm { (i, m) } else { (bj, bm) }
                });
            let ztx = z.dotc(&x).re;
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x = DVector::zeros(n);
            x[j] = Complex::new(T::one(), T::zero());
        }
        // alternating probe guards against the cases where the iteration stalls
        let alt = DVector::from_fn(n, |i, _| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
            Complex::new(T::lit(sign * (1.0 + i as f64 / denom)), T::zero())
        });
        let y = self.solve_vec(&alt);
        est.max(2.0 * vec_norm1(&y) / (3.0 * n as f64))
    }
}

/// Explicit inverse with its exact 1-norm condition number.
///
/// Cheaper than [`Factorized`] when only the inverse is needed.
pub fn invert<T: Real>(a: CMatrix<T>, block: &'static str) -> Result<(CMatrix<T>, f64)> {
    assert!(a.is_square(), "{block} must be square");
    if a.nrows() == 0 {
        return Ok((a, 1.0));
    }
    let norm_a = norm1(&a);
    let singular = Error::Singular {
        block,
        condition: f64::INFINITY,
    };
    if !norm_a.is_finite() {
        return Err(singular);
    }
    let inv = a.lu().try_inverse().ok_or(singular)?;
    let condition = norm_a * norm1(&inv);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::Singular { block, condition });
    }
    Ok((inv, condition))
}

fn vec_norm1<T: Real>(v: &CVector<T>) -> f64 {
    v.iter().map(|c| cabs(*c).to_f64_lossy()).sum()
}

/// Maximum absolute column sum.
pub fn norm1<T: Real>(a: &CMatrix<T>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|c| cabs(*c).to_f64_lossy()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, c| m.max(cabs(*c)))
}

/// `max_ij |a_ij - b_ij| / max_ij |b_ij|`, the relative error measure used
/// throughout the tests (`b` is the reference).
pub fn max_rel_error<T: Real>(a: &CMatrix<T>, reference: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), reference.shape());
    let scale = max_abs(reference);
    let diff = max_abs(&(a - reference));
    if scale == T::zero() {
        diff
    } else {
        diff / scale
    }
}

/// Spectral norm, `sqrt(lambda_max(A^H A))` from a Hermitian eigenvalue
/// solve.
pub fn norm2<T: Real>(a: &CMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    let gram = a.ad_mul(a);
    gram.symmetric_eigenvalues()
        .iter()
        .fold(T::zero(), |m, s| m.max(*s))
        .sqrt()
}

/// Spectral norm by power iteration on `A^H A`.
///
/// Stops when successive estimates agree to `rel_tol` or after `max_iter`
/// iterations.
pub fn spectral_norm<T: Real>(a: &CMatrix<T>, rel_tol: T, max_iter: usize) -> T {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return T::zero();
    }
    let mut v: CVector<T> = DVector::from_fn(n, |i, _| {
        Complex::new(T::one() + T::lit(i as f64 / n as f64), T::zero())
    });
    v /= Complex::new(v.norm(), T::zero());
    let mut sigma = T::zero();
    for _ in 0..max_iter {
        let u = a * &v;
        let w = a.ad_mul(&u);
        let wn = w.norm();
        if wn == T::zero() {
            return T::zero();
        }
        let next = wn.sqrt();
        v = w / Complex::new(wn, T::zero());
        let done = (next - sigma).abs() <= rel_tol * next;
        sigma = next;
        if done {
            break;
        }
    }
    sigma
}
