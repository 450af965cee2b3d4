//! Induced-EMF self and mutual impedance of parallel thin-wire dipoles.
//!
//! Each dipole carries the sinusoidal current `I(z) = I_m sin(k(h - |z|))`.
//! The z-directed near field of such a current is known in closed form,
//!
//! ```text
//! E_z(rho, z) = -j eta/(4 pi) I_m [ e^{-jkR1}/R1 + e^{-jkR2}/R2 - 2 cos(kh) e^{-jkR0}/R0 ]
//! ```
//!
//! with `R0`, `R1`, `R2` the distances to the center and the two ends of the
//! source wire. Reacting that field with the observer's current and
//! referring both currents to the feed gives
//!
//! ```text
//! Z_ab = j eta/(4 pi sin(k h_a) sin(k h_b)) * integral_{-h_a}^{h_a} sin(k(h_a - |z|)) [ ... ] dz
//! ```
//!
//! which is evaluated with a graded composite Gauss–Legendre rule. For the
//! self term the field is taken on the wire surface (`rho = a`).

use num_complex::Complex;

use super::dipole::Dipole;
use super::quadrature::{gauss_legendre, QuadratureRule};
use crate::error::{Error, Result};
use crate::real::Real;

/// Characteristic impedance of vacuum in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730_313_668;

/// Impedance evaluator for one wavelength and quadrature resolution.
#[derive(Debug, Clone)]
pub struct ImpedanceKernel<T> {
    wavelength: T,
    wavenumber: T,
    rule: QuadratureRule,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> ImpedanceKernel<T> {
    pub fn new(wavelength: T) -> Result<Self> {
        Self::with_rule(wavelength, QuadratureRule::default())
    }

    pub fn with_rule(wavelength: T, rule: QuadratureRule) -> Result<Self> {
        if !(wavelength > T::zero()) || !wavelength.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavelength must be positive and finite, got {wavelength}"
            )));
        }
        if rule.order == 0 || rule.refine == 0 || !(rule.max_panel > 0.0) || !(rule.grading > 1.0)
        {
            return Err(Error::InvalidArgument(format!("bad quadrature rule {rule:?}")));
        }
        let (x, w) = gauss_legendre(rule.order);
        Ok(ImpedanceKernel {
            wavelength,
            wavenumber: T::two_pi() / wavelength,
            rule,
            nodes: x.into_iter().map(T::lit).collect(),
            weights: w.into_iter().map(T::lit).collect(),
        })
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    /// Impedance between the ports of `a` and `b` in ohms.
    ///
    /// Identical wires give the self-impedance. The pair is put in a
    /// canonical order first, so `impedance(a, b)` and `impedance(b, a)`
    /// are bitwise equal.
    pub fn impedance(&self, a: &Dipole<T>, b: &Dipole<T>) -> Result<Complex<T>> {
        a.validate()?;
        b.validate()?;
        if a.same_wire(b) {
            return self.induced_emf(a, a, a.wire_radius);
        }
        let dist = a.center_distance(b);
        if dist < a.wire_radius + b.wire_radius {
            return Err(Error::Geometry(format!(
                "distinct dipoles overlap: center distance {} < {}",
                dist,
                a.wire_radius + b.wire_radius
            )));
        }
        let (obs, src) = match a.geometric_cmp(b) {
            std::cmp::Ordering::Greater => (b, a),
            _ => (a, b),
        };
        let rho = obs
            .horizontal_distance(src)
            .max(obs.wire_radius.max(src.wire_radius));
        self.induced_emf(obs, src, rho)
    }

    fn induced_emf(&self, obs: &Dipole<T>, src: &Dipole<T>, rho: T) -> Result<Complex<T>> {
        let k = self.wavenumber;
        let two = T::lit(2.0);
        let ha = obs.length / two;
        let hb = src.length / two;
        let zb = src.position[2] - obs.position[2];

        let (sin_a, sin_b) = ((k * ha).sin(), (k * hb).sin());
        let guard = T::lit(1e-6);
        if sin_a.abs() < guard || sin_b.abs() < guard {
            return Err(Error::Geometry(
                "dipole length puts a current null at the feed".into(),
            ));
        }
        let cos_b = (k * hb).cos();
        let center_term = cos_b.abs() > T::lit(1e-12);

        let f = |x: T| x.to_f64_lossy();
        let mut breaks = vec![(0.0, false), (f(zb - hb), true), (f(zb + hb), true)];
        if center_term {
            breaks.push((f(zb), true));
        }
        let panels = self.rule.panels(
            f(-ha),
            f(ha),
            &breaks,
            f(rho),
            f(self.wavelength),
        );

        let rho2 = rho * rho;
        let green = |r2: T| {
            let r = r2.sqrt();
            let (s, c) = (k * r).sin_cos();
            Complex::new(c / r, -s / r)
        };
        let mut acc = Complex::new(T::zero(), T::zero());
        for (lo, hi) in panels {
            let (lo, hi) = (T::lit(lo), T::lit(hi));
            let half = (hi - lo) / two;
            let mid = (hi + lo) / two;
            let mut panel = Complex::new(T::zero(), T::zero());
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let z = mid + half * *x;
                let current = (k * (ha - z.abs())).sin();
                let d1 = z - zb - hb;
                let d2 = z - zb + hb;
                let mut field = green(rho2 + d1 * d1) + green(rho2 + d2 * d2);
                if center_term {
                    let d0 = z - zb;
                    field -= green(rho2 + d0 * d0) * (two * cos_b);
                }
                panel += field * (*w * current);
            }
            acc += panel * half;
        }
        let scale = T::lit(FREE_SPACE_IMPEDANCE) / (T::lit(4.0) * T::pi() * sin_a * sin_b);
        // j * scale * acc
        Ok(Complex::new(-acc.im * scale, acc.re * scale))
    }
}

/// Self or mutual impedance of two z-aligned thin-wire dipoles (ohms) with
/// the default quadrature resolution.
pub fn mutual_impedance<T: Real>(a: &Dipole<T>, b: &Dipole<T>, wavelength: T) -> Result<Complex<T>> {
    ImpedanceKernel::new(wavelength)?.impedance(a, b)
}
