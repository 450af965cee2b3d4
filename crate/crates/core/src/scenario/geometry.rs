use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::config::ScenarioConfig;
use crate::channel::{fold_esos, FoldedChannel};
use crate::em::{assemble_impedances, Dipole, ImpedanceSet, Role, Terminations};
use crate::error::{Error, Result};
use crate::optimizer::SarisConfig;
use crate::real::Real;

/// Attempts per cluster before giving up on a deployment.
const CLUSTER_RETRIES: usize = 1000;
/// Attempts per scatterer inside an accepted cluster center.
const POINT_RETRIES: usize = 1000;
/// Minimum scatterer spacing in wire radii.
const MIN_SPACING_RADII: f64 = 5.0;

/// Generator for realization `index`: one ChaCha20 stream per realization
/// of the configured seed.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point on the half-disk of radius `radius` around `center`,
/// on the side of decreasing `y`.
pub fn sample_cluster_center<R: Rng + ?Sized>(rng: &mut R, center: [f64; 2], radius: f64) -> [f64; 2] {
    let rho = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::PI * (1.0 + rng.random::<f64>());
    [center[0] + rho * phi.cos(), center[1] + rho * phi.sin()]
}

fn sample_disk<R: Rng + ?Sized>(rng: &mut R, center: [f64; 2], radius: f64) -> [f64; 2] {
    let rho = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    [center[0] + rho * phi.cos(), center[1] + rho * phi.sin()]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// All dipoles of realization `index`: the transmit array, the users, the
/// RIS grid and the scattering clusters, in that order.
///
/// The transmit array is a line along `x` centered at `p_BS`; the RIS is a
/// square grid in the `xy`-plane centered at `p_RIS`. Cluster centers are
/// uniform on the half-disk of radius `R` facing the users and scatterers
/// are uniform on disks of radius `r`. A cluster with a scatterer closer
/// than `λ/10` to a terminal or RIS cell is drawn again.
pub fn generate<T: Real>(config: &ScenarioConfig, index: u64) -> Result<Vec<Dipole<T>>> {
    config.validate()?;
    let lam = config.wavelength;
    let a = config.wire_radius.to_meters(lam);
    let dipole = |xy: [f64; 2], role: Role| {
        Dipole::half_wave([T::lit(xy[0]), T::lit(xy[1]), T::zero()], T::lit(lam), T::lit(a), role)
    };

    let mut fixed: Vec<([f64; 2], Role)> = Vec::new();
    let bs = config.p_bs.to_meters(lam);
    let spacing = config.tx_spacing.to_meters(lam);
    for i in 0..config.m {
        let off = (i as f64 - (config.m as f64 - 1.0) / 2.0) * spacing;
        fixed.push(([bs[0] + off, bs[1]], Role::Transmitter));
    }
    for p in config.ue_positions() {
        fixed.push((p, Role::Receiver));
    }
    let ris = config.p_ris.to_meters(lam);
    let side = config.side();
    let d = config.d.to_meters(lam);
    let half = (side as f64 - 1.0) / 2.0;
    for iy in 0..side {
        for ix in 0..side {
            fixed.push((
                [ris[0] + (ix as f64 - half) * d, ris[1] + (iy as f64 - half) * d],
                Role::RisCell,
            ));
        }
    }
    for i in 0..fixed.len() {
        for j in 0..i {
            if dist(fixed[i].0, fixed[j].0) < MIN_SPACING_RADII * a {
                return Err(Error::Geometry(format!(
                    "{:?} and {:?} overlap at {:?}",
                    fixed[j].1, fixed[i].1, fixed[i].0
                )));
            }
        }
    }

    let mut rng = realization_rng(config.seed, index);
    let region = config.region_radius.to_meters(lam);
    let r = config.cluster_radius.to_meters(lam);
    let keep_out = lam / 10.0;
    let min_gap = MIN_SPACING_RADII * a;
    let mut scatterers: Vec<[f64; 2]> = Vec::with_capacity(config.n_s());
    for c in 0..config.n_c {
        let mut placed = false;
        'cluster: for _ in 0..CLUSTER_RETRIES {
            let center = sample_cluster_center(&mut rng, ris, region);
            let mut cluster: Vec<[f64; 2]> = Vec::with_capacity(config.n_o);
            for _ in 0..config.n_o {
                let mut point = None;
                for _ in 0..POINT_RETRIES {
                    let p = sample_disk(&mut rng, center, r);
                    let crowded = scatterers
                        .iter()
                        .chain(cluster.iter())
                        .any(|q| dist(p, *q) < min_gap);
                    if !crowded {
                        point = Some(p);
                        break;
                    }
                }
                let Some(p) = point else { continue 'cluster };
                if fixed.iter().any(|(q, _)| dist(p, *q) < keep_out) {
                    continue 'cluster;
                }
                cluster.push(p);
            }
            scatterers.extend(cluster);
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::Geometry(format!(
                "cluster {c} could not be placed clear of the terminals in {CLUSTER_RETRIES} attempts"
            )));
        }
    }

    fixed
        .into_iter()
        .chain(scatterers.into_iter().map(|p| (p, Role::Eso)))
        .map(|(p, role)| dipole(p, role))
        .collect()
}

/// Terminations of the configured scenario.
pub fn terminations<T: Real>(config: &ScenarioConfig) -> Terminations<T> {
    let c = |z: num_complex::Complex64| num_complex::Complex::new(T::lit(z.re), T::lit(z.im));
    Terminations::uniform(config.m, config.l, config.n_s(), c(config.z_g), c(config.z_l), c(config.z_us))
}

/// Optimizer parameters of the configured scenario (default loop settings).
pub fn saris_config<T: Real>(config: &ScenarioConfig) -> SarisConfig<T> {
    SarisConfig {
        power: T::lit(config.power),
        sigma_n2: T::lit(config.sigma_n2),
        interval: (T::lit(config.q_interval.0), T::lit(config.q_interval.1)),
        r0: T::lit(config.r0),
        ..SarisConfig::default()
    }
}

/// One Monte-Carlo realization with its impedances and folded channel.
#[derive(Debug, Clone)]
pub struct Realization<T: Real> {
    pub index: u64,
    pub dipoles: Vec<Dipole<T>>,
    pub impedances: ImpedanceSet<T>,
    pub channel: FoldedChannel<T>,
}

/// Generate, assemble and fold realization `index`.
pub fn realize<T: Real>(config: &ScenarioConfig, index: u64) -> Result<Realization<T>> {
    let dipoles = generate::<T>(config, index)?;
    let impedances = assemble_impedances(&dipoles, T::lit(config.wavelength), terminations(config))?;
    let channel = fold_esos(&impedances)?;
    Ok(Realization {
        index,
        dipoles,
        impedances,
        channel,
    })
}
