use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex;

use crate::channel::FoldedChannel;
use crate::error::{Error, Result};
use crate::linalg::Factorized;
use crate::optimizer::state::OptimizerState;
use crate::real::{cabs, CMatrix, CVector, Real};

/// Linearization of the channel around the current loads, together with
/// the regularized step computed from it.
#[derive(Debug, Clone)]
pub struct DeltaStep<T: Real> {
    /// Per user, the `(N+1) x M` matrix with rows `[H_R ; h_d]`, so that
    /// `[delta^H, 1] H_bar` is the linearized channel row.
    pub h_bar: Vec<CMatrix<T>>,
    pub b: CVector<T>,
    pub delta_tilde: CVector<T>,
    pub delta: CVector<T>,
}

/// Outcome of [`solve_delta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaOutcome {
    Step,
    /// `delta_tilde` vanished; nothing to normalize.
    Stationary,
}

impl<T: Real> DeltaStep<T> {
    pub fn n(&self) -> usize {
        self.h_bar.first().map_or(0, |h| h.nrows() - 1)
    }

    /// `H_R` block of user `l`.
    pub fn h_r(&self, l: usize) -> CMatrix<T> {
        let n = self.n();
        self.h_bar[l].rows(0, n).into_owned()
    }

    /// `h_d` row of user `l` (expansion-point channel minus its RIS part).
    pub fn h_d(&self, l: usize) -> CMatrix<T> {
        let n = self.n();
        self.h_bar[l].rows(n, 1).into_owned()
    }

    /// Linearized channel `h_d + delta^H H_R` (L x M) for an arbitrary
    /// perturbation `delta`.
    pub fn linearized_channel(&self, delta: &CVector<T>) -> CMatrix<T> {
        let l = self.h_bar.len();
        let m = self.h_bar.first().map_or(0, |h| h.ncols());
        let n = self.n();
        let dh = delta.adjoint();
        let mut h = DMatrix::zeros(l, m);
        for (i, hb) in self.h_bar.iter().enumerate() {
            let row = &dh * hb.rows(0, n) + hb.rows(n, 1);
            h.row_mut(i).copy_from(&row);
        }
        h
    }
}

/// Linearize the channel at the state's loads.
///
/// With `u_l = z_RL,l Z_ROS G` and `V = G Z_SOT Z_TG`, the RIS block of user
/// `l` is `diag(u_l) V` and the constant row is `h_d,l - u_l Z_SOT Z_TG`.
pub fn build_delta_system<T: Real>(f: &FoldedChannel<T>, state: &OptimizerState<T>) -> Result<DeltaStep<T>> {
    if !state.g_is_current() {
        return Err(Error::StaleInverse);
    }
    let g = &state.g;
    if g.nrows() != f.n() {
        return Err(Error::Dimension {
            context: "inner inverse",
            expected: f.n().to_string(),
            got: g.nrows().to_string(),
        });
    }
    let n = f.n();
    let m = f.m();
    let u = &f.rx * g; // L x N
    let v = g * &f.tx; // N x M
    let ut = &u * &f.tx; // L x M
    let h_bar = (0..f.l())
        .map(|l| {
            let mut hb = DMatrix::zeros(n + 1, m);
            for i in 0..n {
                let s = u[(l, i)];
                for j in 0..m {
                    hb[(i, j)] = s * v[(i, j)];
                }
            }
            for j in 0..m {
                hb[(n, j)] = f.h_d[(l, j)] - ut[(l, j)];
            }
            hb
        })
        .collect();
    Ok(DeltaStep {
        h_bar,
        b: DVector::zeros(n),
        delta_tilde: DVector::zeros(n),
        delta: DVector::zeros(n),
    })
}

/// The Hermitian system `sum_l H_R,l W W^H H_R,l^H + sigma^2 I` and the
/// right-hand side `sum_l (H_R,l w_l - H_R,l W W^H h_d,l^H)`.
pub fn delta_system<T: Real>(ds: &DeltaStep<T>, w: &CMatrix<T>, sigma_n2: T) -> (CMatrix<T>, CVector<T>) {
    let n = ds.n();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for (l, hb) in ds.h_bar.iter().enumerate() {
        let p = hb * w; // rows: H_R W ; h_d W
        let ar = p.rows(0, n);
        a.gemm(Complex::new(T::one(), T::zero()), &ar, &ar.adjoint(), Complex::new(T::one(), T::zero()));
        // H_R (w_l - W W^H h_d^H) = H_R W (e_l - (h_d W)^H)
        let mut coef = p.row(n).adjoint();
        coef.neg_mut();
        coef[l] += Complex::new(T::one(), T::zero());
        b += ar * coef;
    }
    for i in 0..n {
        a[(i, i)] += Complex::new(sigma_n2, T::zero());
    }
    (a, b)
}

/// Solve for the regularized step and normalize it so that
/// `max_n |delta_n| = 1 / ||G||`.
pub fn solve_delta<T: Real>(
    ds: &mut DeltaStep<T>,
    w: &CMatrix<T>,
    sigma_n2: T,
    g_norm: T,
) -> Result<DeltaOutcome> {
    if !(g_norm > T::zero()) || !g_norm.is_finite() {
        return Err(Error::InvalidArgument(format!("||G|| must be positive, got {g_norm}")));
    }
    let (a, b) = delta_system(ds, w, sigma_n2);
    let x = match Cholesky::new(a.clone()) {
        Some(ch) => ch.solve(&b),
        None => Factorized::new(a, "delta system")?.solve_vec(&b),
    };
    ds.b = b;
    ds.delta_tilde = x;

    let mut peak = T::zero();
    for v in ds.delta_tilde.iter() {
        let a = cabs(*v);
        if !a.is_finite() {
            return Err(Error::Singular {
                block: "delta system",
                condition: f64::INFINITY,
            });
        }
        // strict comparison keeps the first index on ties
        if a > peak {
            peak = a;
        }
    }
    if peak == T::zero() {
        ds.delta = DVector::zeros(ds.n());
        return Ok(DeltaOutcome::Stationary);
    }
    let k = Complex::new(T::one() / (peak * g_norm), T::zero());
    ds.delta = ds.delta_tilde.map(|v| v * k);
    Ok(DeltaOutcome::Step)
}
