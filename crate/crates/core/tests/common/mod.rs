#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saris_core::em::{Dipole, ImpedanceSet, Terminations};
use saris_core::{CMatrix64, RisLoads64};

pub const ETA0: f64 = 376.730313668;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cplx(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale
}

/// Reciprocal multiport matrix with dipole-like self terms and weaker
/// random couplings.
pub fn random_impedance_set(rng: &mut ChaCha8Rng, m: usize, l: usize, n_eso: usize, n_ris: usize) -> ImpedanceSet<f64> {
    let p = m + l + n_eso + n_ris;
    let mut z = DMatrix::from_element(p, p, Complex64::new(0.0, 0.0));
    for i in 0..p {
        z[(i, i)] = Complex64::new(73.0 + 5.0 * rng.random::<f64>(), 42.0 + 10.0 * (rng.random::<f64>() - 0.5));
        for j in 0..i {
            let v = cplx(rng, 20.0);
            z[(i, j)] = v;
            z[(j, i)] = v;
        }
    }
    let term = Terminations {
        generator: nalgebra::DVector::from_fn(m, |_, _| Complex64::new(50.0, 0.0)),
        receiver: nalgebra::DVector::from_fn(l, |_, _| Complex64::new(50.0, 0.0)),
        eso: nalgebra::DVector::from_fn(n_eso, |_, _| Complex64::new(rng.random::<f64>(), 0.0)),
    };
    ImpedanceSet::from_full(z, m, l, n_eso, n_ris, term).unwrap()
}

pub fn random_loads(rng: &mut ChaCha8Rng, n: usize) -> RisLoads64 {
    let q = (-302.50, -19.66);
    let x = (0..n).map(|_| q.0 + (q.1 - q.0) * rng.random::<f64>()).collect();
    RisLoads64::new(0.2, x, q).unwrap()
}

fn inv(a: &CMatrix64) -> CMatrix64 {
    a.clone().try_inverse().expect("invertible")
}

/// Direct evaluation of the end-to-end channel from the full block
/// structure, `Z_RL [Z_RT - Z_RE (Z_EE + Z_SC)^{-1} Z_ET] Z_TG`, without
/// eliminating the scatterers first.
pub fn unfolded_channel(z: &ImpedanceSet<f64>, loads: &RisLoads64) -> CMatrix64 {
    let (m, l, o, n) = (z.m(), z.l(), z.n_eso(), z.n_ris());
    let full = z.full();
    let e0 = m + l;
    let z_rt = full.view((m, 0), (l, m)).into_owned();
    let z_re = full.view((m, e0), (l, o + n)).into_owned();
    let z_et = full.view((e0, 0), (o + n, m)).into_owned();
    let mut z_ee = full.view((e0, e0), (o + n, o + n)).into_owned();
    let t = z.terminations();
    for i in 0..o {
        z_ee[(i, i)] += t.eso[i];
    }
    for (i, x) in loads.reactances().iter().enumerate() {
        z_ee[(o + i, o + i)] += Complex64::new(loads.r0(), *x);
    }
    let z_tt = full.view((0, 0), (m, m)).into_owned();
    let z_rr = full.view((m, m), (l, l)).into_owned();
    let z_tg = inv(&(z_tt + DMatrix::from_diagonal(&t.generator)));
    let zl_inv = DMatrix::from_diagonal(&t.receiver.map(|v| Complex64::new(1.0, 0.0) / v));
    let z_rl = inv(&(DMatrix::identity(l, l) + z_rr * zl_inv));
    z_rl * (z_rt - z_re * inv(&z_ee) * z_et) * z_tg
}

/// `max |a - b| / max |b|`
pub fn rel_err(a: &CMatrix64, b: &CMatrix64) -> f64 {
    let num = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    num / den
}

/// Adaptive Simpson on a complex integrand.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn step(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64, whole: Complex64, tol: f64, depth: u32) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
        let right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Induced-EMF impedance between two parallel z-directed dipoles,
/// integrated adaptively piece by piece between the points where the
/// integrand has kinks.
pub fn emf_oracle(a: &Dipole<f64>, b: &Dipole<f64>, wavelength: f64, rho: f64) -> Complex64 {
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let (ha, hb) = (a.length / 2.0, b.length / 2.0);
    let zb = b.position[2] - a.position[2];
    let g = |r: f64| Complex64::new(0.0, -k * r).exp() / r;
    let f = |z: f64| {
        let r1 = (rho * rho + (z - zb - hb).powi(2)).sqrt();
        let r2 = (rho * rho + (z - zb + hb).powi(2)).sqrt();
        let r0 = (rho * rho + (z - zb).powi(2)).sqrt();
        (g(r1) + g(r2) - 2.0 * (k * hb).cos() * g(r0)) * (k * (ha - z.abs())).sin()
    };
    let mut cuts = vec![-ha, ha, 0.0, zb - hb, zb + hb, zb];
    cuts.retain(|c| *c >= -ha && *c <= ha);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let mut acc = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        acc += adaptive_simpson(&f, w[0], w[1], 1e-13);
    }
    Complex64::new(0.0, 1.0) * ETA0 / (4.0 * std::f64::consts::PI * (k * ha).sin() * (k * hb).sin()) * acc
}

/// Realization `index` of the reference deployment with `overrides`
/// (config-file lines) applied.
pub fn desk(overrides: &str, index: u64) -> (saris_core::ScenarioConfig, saris_core::scenario::Realization<f64>) {
    let cfg = saris_core::parse_config(overrides).unwrap();
    let r = saris_core::scenario::realize::<f64>(&cfg, index).unwrap();
    (cfg, r)
}
