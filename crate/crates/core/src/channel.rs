//! End-to-end channel of the coupled-dipole model.
//!
//! The ESO block is eliminated once per scenario by a Schur complement,
//! leaving a representation in which the RIS loads only enter through the
//! `N x N` inner matrix `Z_SS + Z_SOS + Z_RIS`:
//!
//! ```text
//! H = Z_RL [ Z_ROT - Z_ROS (Z_SS + Z_SOS + Z_RIS)^{-1} Z_SOT ] Z_TG
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::em::ImpedanceSet;
use crate::error::{Error, Result};
use crate::linalg::{invert, Factorized};
use crate::real::{CMatrix, CVector, Real};

/// Diagonal RIS termination `R0 + j x_n` with reactances confined to a
/// closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RisLoads<T: Real> {
    r0: T,
    reactances: Vec<T>,
    interval: (T, T),
}

impl<T: Real> RisLoads<T> {
    pub fn new(r0: T, reactances: Vec<T>, interval: (T, T)) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "reactance interval [{lo}, {hi}] is empty or unbounded"
            )));
        }
        if !(r0 >= T::zero()) || !r0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "load resistance must be non-negative, got {r0}"
            )));
        }
        if let Some(x) = reactances.iter().find(|x| !(**x >= lo && **x <= hi)) {
            return Err(Error::InvalidArgument(format!(
                "reactance {x} outside [{lo}, {hi}]"
            )));
        }
        Ok(RisLoads {
            r0,
            reactances,
            interval,
        })
    }

    /// Every cell at reactance `x`.
    pub fn uniform(n: usize, r0: T, x: T, interval: (T, T)) -> Result<Self> {
        Self::new(r0, vec![x; n], interval)
    }

    /// Every cell at the midpoint of the interval.
    pub fn midpoint(n: usize, r0: T, interval: (T, T)) -> Result<Self> {
        Self::uniform(n, r0, (interval.0 + interval.1) / T::lit(2.0), interval)
    }

    pub fn r0(&self) -> T {
        self.r0
    }
    pub fn reactances(&self) -> &[T] {
        &self.reactances
    }
    pub fn interval(&self) -> (T, T) {
        self.interval
    }
    pub fn len(&self) -> usize {
        self.reactances.len()
    }
    pub fn is_empty(&self) -> bool {
        self.reactances.is_empty()
    }

    /// Same loads with new reactances, each clamped onto the interval.
    pub fn projected(&self, reactances: impl IntoIterator<Item = T>) -> Self {
        let (lo, hi) = self.interval;
        RisLoads {
            reactances: reactances
                .into_iter()
                .map(|x| x.max(lo).min(hi))
                .collect(),
            ..self.clone()
        }
    }

    pub fn diagonal(&self) -> CVector<T> {
        DVector::from_iterator(
            self.reactances.len(),
            self.reactances.iter().map(|&x| Complex::new(self.r0, x)),
        )
    }

    /// `Z_RIS` as a dense diagonal matrix.
    pub fn z_ris(&self) -> CMatrix<T> {
        DMatrix::from_diagonal(&self.diagonal())
    }
}

/// ESO-eliminated channel quantities; immutable once built and cheap to
/// evaluate for any RIS loading.
#[derive(Debug, Clone)]
pub struct FoldedChannel<T: Real> {
    /// `Z_OO + Z_US`
    pub zbar_oo: CMatrix<T>,
    /// Condition number estimate of `zbar_oo`.
    pub zbar_oo_condition: f64,
    pub z_rot: CMatrix<T>,
    pub z_ros: CMatrix<T>,
    pub z_sos: CMatrix<T>,
    pub z_sot: CMatrix<T>,
    pub z_ss: CMatrix<T>,
    /// `(I + Z_RR Z_L^{-1})^{-1}`
    pub z_rl: CMatrix<T>,
    /// `(Z_TT + Z_G)^{-1}`
    pub z_tg: CMatrix<T>,
    /// Load-independent part `Z_RL Z_ROT Z_TG`.
    pub h_d: CMatrix<T>,
    /// `Z_RL Z_ROS`, row `l` is the receive-side weight of user `l`.
    pub(crate) rx: CMatrix<T>,
    /// `Z_SOT Z_TG`
    pub(crate) tx: CMatrix<T>,
}

fn zeros<T: Real>(r: usize, c: usize) -> CMatrix<T> {
    DMatrix::zeros(r, c)
}

impl<T: Real> FoldedChannel<T> {
    pub fn m(&self) -> usize {
        self.h_d.ncols()
    }
    pub fn l(&self) -> usize {
        self.h_d.nrows()
    }
    pub fn n(&self) -> usize {
        self.z_ss.nrows()
    }

    /// `Z_SS + Z_SOS + Z_RIS`
    pub fn inner_matrix(&self, loads: &RisLoads<T>) -> Result<CMatrix<T>> {
        self.check_loads(loads)?;
        let mut a = &self.z_ss + &self.z_sos;
        for (i, z) in loads.diagonal().iter().enumerate() {
            a[(i, i)] += *z;
        }
        Ok(a)
    }

    /// `G = (Z_SS + Z_SOS + Z_RIS)^{-1}` and the 1-norm condition number of the inverted matrix.
    pub fn inner_inverse(&self, loads: &RisLoads<T>) -> Result<(CMatrix<T>, f64)> {
        invert(self.inner_matrix(loads)?, "Z_SS + Z_SOS + Z_RIS")
    }

    /// Channel for a precomputed inner inverse `G`.
    pub fn channel_from_inverse(&self, g: &CMatrix<T>) -> CMatrix<T> {
        &self.h_d - &self.rx * (g * &self.tx)
    }

    /// Split into the load-independent rows `h_d` and the RIS-dependent
    /// part, so that `H = h_d + h_ris`.
    pub fn channel_parts(&self, loads: &RisLoads<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
        let f = Factorized::new(self.inner_matrix(loads)?, "Z_SS + Z_SOS + Z_RIS")?;
        let h_ris = -(&self.rx * f.solve(&self.tx));
        Ok((self.h_d.clone(), h_ris))
    }

    /// The same scenario with the RIS/ESO interaction ignored: ESO
    /// scattering survives only as an additive, load-independent term.
    pub fn decoupled(&self, z: &ImpedanceSet<T>) -> Self {
        let n = self.n();
        let z_ros = -z.z_rs();
        let z_sot = -z.z_st();
        FoldedChannel {
            zbar_oo: self.zbar_oo.clone(),
            zbar_oo_condition: self.zbar_oo_condition,
            z_rot: self.z_rot.clone(),
            rx: &self.z_rl * &z_ros,
            tx: &z_sot * &self.z_tg,
            z_ros,
            z_sos: zeros(n, n),
            z_sot,
            z_ss: self.z_ss.clone(),
            z_rl: self.z_rl.clone(),
            z_tg: self.z_tg.clone(),
            h_d: self.h_d.clone(),
        }
    }

    fn check_loads(&self, loads: &RisLoads<T>) -> Result<()> {
        if loads.len() != self.n() {
            return Err(Error::Dimension {
                context: "RIS loads",
                expected: self.n().to_string(),
                got: loads.len().to_string(),
            });
        }
        Ok(())
    }
}

/// Eliminate the ESO block from the impedance structure.
///
/// `Zbar_OO^{-1}` is only ever applied through its LU factors.
pub fn fold_esos<T: Real>(z: &ImpedanceSet<T>) -> Result<FoldedChannel<T>> {
    let (m, l, n_eso, n) = (z.m(), z.l(), z.n_eso(), z.n_ris());

    let zbar_oo = z.z_oo() + z.z_us();
    let fact = Factorized::new(zbar_oo.clone(), "Zbar_OO")?;

    // Zbar_OO^{-1} [Z_OT | Z_OS]
    let mut rhs = zeros(n_eso, m + n);
    rhs.columns_mut(0, m).copy_from(&z.z_ot());
    rhs.columns_mut(m, n).copy_from(&z.z_os());
    let solved = fact.solve(&rhs);
    let inv_ot = solved.columns(0, m).into_owned();
    let inv_os = solved.columns(m, n).into_owned();

    let z_ro = z.z_ro();
    let z_so = z.z_so();
    let z_rot = z.z_rt() - &z_ro * &inv_ot;
    let z_ros = &z_ro * &inv_os - z.z_rs();
    let z_sos = -(&z_so * &inv_os);
    let z_sot = &z_so * &inv_ot - z.z_st();

    let z_rl = {
        let loads = &z.terminations().receiver;
        if loads.iter().any(|v| *v == Complex::new(T::zero(), T::zero())) {
            return Err(Error::Singular {
                block: "Z_L",
                condition: f64::INFINITY,
            });
        }
        let zl_inv = DMatrix::from_diagonal(&loads.map(|v| Complex::new(T::one(), T::zero()) / v));
        let a = DMatrix::identity(l, l) + z.z_rr() * zl_inv;
        Factorized::new(a, "I + Z_RR Z_L^-1")?.inverse()
    };
    let z_tg = Factorized::new(z.z_tt() + z.z_g(), "Z_TT + Z_G")?.inverse();

    let h_d = &z_rl * &z_rot * &z_tg;
    Ok(FoldedChannel {
        rx: &z_rl * &z_ros,
        tx: &z_sot * &z_tg,
        zbar_oo,
        zbar_oo_condition: fact.condition(),
        z_rot,
        z_ros,
        z_sos,
        z_sot,
        z_ss: z.z_ss(),
        z_rl,
        z_tg,
        h_d,
    })
}

/// `H_E2E` (L x M) for the given RIS loading.
pub fn end_to_end_channel<T: Real>(f: &FoldedChannel<T>, loads: &RisLoads<T>) -> Result<CMatrix<T>> {
    let (h_d, h_ris) = f.channel_parts(loads)?;
    Ok(h_d + h_ris)
}

/// Channel predicted by the additive-multipath model that ignores the
/// RIS/ESO interaction:
/// `Z_RL [Z_RT - Z_RO Zbar_OO^{-1} Z_OT - Z_RS (Z_SS + Z_RIS)^{-1} Z_ST] Z_TG`.
pub fn mismatched_channel<T: Real>(
    f: &FoldedChannel<T>,
    z: &ImpedanceSet<T>,
    loads: &RisLoads<T>,
) -> Result<CMatrix<T>> {
    end_to_end_channel(&f.decoupled(z), loads)
}

/// The four blocks of `[[Zbar_OO, Z_OS], [Z_SO, Z_SS + Z_RIS]]^{-1}` from
/// the Schur complement `S = Z_SS + Z_SOS + Z_RIS` of the ESO block, in
/// the order `[top-left, top-right, bottom-left, bottom-right]`.
pub fn schur_blocks<T: Real>(z: &ImpedanceSet<T>, loads: &RisLoads<T>) -> Result<[CMatrix<T>; 4]> {
    let f = fold_esos(z)?;
    let zoo = Factorized::new(f.zbar_oo.clone(), "Zbar_OO")?;
    let zoo_inv = zoo.inverse();
    let g = f.inner_inverse(loads)?.0;
    let left = &zoo_inv * z.z_os(); // Zbar^{-1} Z_OS
    let right = z.z_so() * &zoo_inv; // Z_SO Zbar^{-1}
    let tr = -(&left * &g);
    let bl = -(&g * &right);
    let tl = &zoo_inv + &left * &g * &right;
    Ok([tl, tr, bl, g])
}
