use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use super::dipole::{Dipole, Role};
use super::kernel::ImpedanceKernel;
use crate::error::{Error, Result};
use crate::real::{CMatrix, CVector, Real};

/// Diagonal terminations: generator impedances at the transmitter, loads at
/// the receivers, and scatterer loads.
#[derive(Debug, Clone, PartialEq)]
pub struct Terminations<T: Real> {
    pub generator: CVector<T>,
    pub receiver: CVector<T>,
    pub eso: CVector<T>,
}

impl<T: Real> Terminations<T> {
    pub fn uniform(
        m: usize,
        l: usize,
        n_eso: usize,
        generator: Complex<T>,
        receiver: Complex<T>,
        eso: Complex<T>,
    ) -> Self {
        Terminations {
            generator: DVector::from_element(m, generator),
            receiver: DVector::from_element(l, receiver),
            eso: DVector::from_element(n_eso, eso),
        }
    }
}

/// Block impedance structure of a scenario.
///
/// Stored as one reciprocal multiport matrix with port order
/// `[transmitters; receivers; ESOs; RIS cells]`; the blocks are views into
/// it. The scattering environment `E` is `[ESOs; RIS]`, so `Z_EE` splits
/// into `Z_OO`, `Z_OS`, `Z_SO`, `Z_SS` with the ESO block first.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceSet<T: Real> {
    full: CMatrix<T>,
    m: usize,
    l: usize,
    n_eso: usize,
    n_ris: usize,
    terminations: Terminations<T>,
}

impl<T: Real> ImpedanceSet<T> {
    /// Wrap an explicit multiport matrix. Dimensions must add up; symmetry
    /// is not enforced so synthetic non-reciprocal instances can be built.
    pub fn from_full(
        full: CMatrix<T>,
        m: usize,
        l: usize,
        n_eso: usize,
        n_ris: usize,
        terminations: Terminations<T>,
    ) -> Result<Self> {
        let p = m + l + n_eso + n_ris;
        if full.nrows() != p || full.ncols() != p {
            return Err(Error::Dimension {
                context: "impedance matrix",
                expected: format!("{p}x{p}"),
                got: format!("{}x{}", full.nrows(), full.ncols()),
            });
        }
        if m == 0 || l == 0 || n_ris == 0 {
            return Err(Error::InvalidArgument(
                "need at least one transmitter, receiver and RIS cell".into(),
            ));
        }
        let t = &terminations;
        if t.generator.len() != m || t.receiver.len() != l || t.eso.len() != n_eso {
            return Err(Error::Dimension {
                context: "terminations",
                expected: format!("({m}, {l}, {n_eso})"),
                got: format!("({}, {}, {})", t.generator.len(), t.receiver.len(), t.eso.len()),
            });
        }
        Ok(ImpedanceSet {
            full,
            m,
            l,
            n_eso,
            n_ris,
            terminations,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn n_eso(&self) -> usize {
        self.n_eso
    }
    pub fn n_ris(&self) -> usize {
        self.n_ris
    }
    pub fn terminations(&self) -> &Terminations<T> {
        &self.terminations
    }
    pub fn full(&self) -> &CMatrix<T> {
        &self.full
    }

    fn offsets(&self) -> [usize; 4] {
        let t = 0;
        let r = self.m;
        let o = r + self.l;
        let s = o + self.n_eso;
        [t, r, o, s]
    }

    fn block(&self, row: usize, nrow: usize, col: usize, ncol: usize) -> CMatrix<T> {
        self.full.view((row, col), (nrow, ncol)).into_owned()
    }

    pub fn z_tt(&self) -> CMatrix<T> {
        let [t, ..] = self.offsets();
        self.block(t, self.m, t, self.m)
    }
    pub fn z_rr(&self) -> CMatrix<T> {
        let [_, r, ..] = self.offsets();
        self.block(r, self.l, r, self.l)
    }
    pub fn z_rt(&self) -> CMatrix<T> {
        let [t, r, ..] = self.offsets();
        self.block(r, self.l, t, self.m)
    }
    /// `[Z_RO | Z_RS]`
    pub fn z_re(&self) -> CMatrix<T> {
        let [_, r, o, _] = self.offsets();
        self.block(r, self.l, o, self.n_eso + self.n_ris)
    }
    /// `[Z_OT; Z_ST]`
    pub fn z_et(&self) -> CMatrix<T> {
        let [t, _, o, _] = self.offsets();
        self.block(o, self.n_eso + self.n_ris, t, self.m)
    }
    pub fn z_ee(&self) -> CMatrix<T> {
        let [_, _, o, _] = self.offsets();
        let ne = self.n_eso + self.n_ris;
        self.block(o, ne, o, ne)
    }
    pub fn z_ro(&self) -> CMatrix<T> {
        let [_, r, o, _] = self.offsets();
        self.block(r, self.l, o, self.n_eso)
    }
    pub fn z_rs(&self) -> CMatrix<T> {
        let [_, r, _, s] = self.offsets();
        self.block(r, self.l, s, self.n_ris)
    }
    pub fn z_ot(&self) -> CMatrix<T> {
        let [t, _, o, _] = self.offsets();
        self.block(o, self.n_eso, t, self.m)
    }
    pub fn z_st(&self) -> CMatrix<T> {
        let [t, _, _, s] = self.offsets();
        self.block(s, self.n_ris, t, self.m)
    }
    pub fn z_oo(&self) -> CMatrix<T> {
        let [_, _, o, _] = self.offsets();
        self.block(o, self.n_eso, o, self.n_eso)
    }
    pub fn z_os(&self) -> CMatrix<T> {
        let [_, _, o, s] = self.offsets();
        self.block(o, self.n_eso, s, self.n_ris)
    }
    pub fn z_so(&self) -> CMatrix<T> {
        let [_, _, o, s] = self.offsets();
        self.block(s, self.n_ris, o, self.n_eso)
    }
    pub fn z_ss(&self) -> CMatrix<T> {
        let [_, _, _, s] = self.offsets();
        self.block(s, self.n_ris, s, self.n_ris)
    }
    pub fn z_g(&self) -> CMatrix<T> {
        DMatrix::from_diagonal(&self.terminations.generator)
    }
    pub fn z_l(&self) -> CMatrix<T> {
        DMatrix::from_diagonal(&self.terminations.receiver)
    }
    pub fn z_us(&self) -> CMatrix<T> {
        DMatrix::from_diagonal(&self.terminations.eso)
    }

    /// Copy with the RIS/ESO interaction removed (`Z_SO = Z_OS^T = 0`).
    pub fn without_ris_eso_coupling(&self) -> Self {
        let mut out = self.clone();
        let [_, _, o, s] = self.offsets();
        let zero = Complex::new(T::zero(), T::zero());
        out.full
            .view_mut((o, s), (self.n_eso, self.n_ris))
            .fill(zero);
        out.full
            .view_mut((s, o), (self.n_ris, self.n_eso))
            .fill(zero);
        out
    }

    /// Apply the same permutation to the ESO ports (and their loads).
    pub fn permute_esos(&self, perm: &[usize]) -> Result<Self> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.n_eso).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument("not a permutation of the ESO ports".into()));
        }
        let [_, _, o, _] = self.offsets();
        let p = self.full.nrows();
        let map = |i: usize| {
            if i >= o && i < o + self.n_eso {
                o + perm[i - o]
            } else {
                i
            }
        };
        let full = DMatrix::from_fn(p, p, |i, j| self.full[(map(i), map(j))]);
        let mut terminations = self.terminations.clone();
        terminations.eso = DVector::from_fn(self.n_eso, |i, _| self.terminations.eso[perm[i]]);
        Ok(ImpedanceSet { full, terminations, ..self.clone() })
    }

    /// `||Z - Z^T||_F / ||Z||_F` of the multiport matrix.
    pub fn reciprocity_defect(&self) -> T {
        let asym = (&self.full - self.full.transpose()).norm();
        asym / self.full.norm()
    }
}

/// Compute every self and mutual impedance of the scenario.
///
/// Dipoles are grouped by role into the port order of [`ImpedanceSet`],
/// keeping their relative order within a role. Each unordered pair is
/// evaluated once and mirrored; entries are independent of each other, so
/// the parallel evaluation is bitwise reproducible.
pub fn assemble_impedances<T: Real>(
    dipoles: &[Dipole<T>],
    wavelength: T,
    terminations: Terminations<T>,
) -> Result<ImpedanceSet<T>> {
    let kernel = ImpedanceKernel::new(wavelength)?;
    assemble_with_kernel(dipoles, &kernel, terminations)
}

pub(crate) fn assemble_with_kernel<T: Real>(
    dipoles: &[Dipole<T>],
    kernel: &ImpedanceKernel<T>,
    terminations: Terminations<T>,
) -> Result<ImpedanceSet<T>> {
    let by_role = |role: Role| dipoles.iter().filter(move |d| d.role == role);
    let ordered: Vec<&Dipole<T>> = by_role(Role::Transmitter)
        .chain(by_role(Role::Receiver))
        .chain(by_role(Role::Eso))
        .chain(by_role(Role::RisCell))
        .collect();
    let count = |role: Role| by_role(role).count();
    let (m, l, n_eso, n_ris) = (
        count(Role::Transmitter),
        count(Role::Receiver),
        count(Role::Eso),
        count(Role::RisCell),
    );

    let p = ordered.len();
    for i in 0..p {
        for j in 0..i {
            if ordered[i].position == ordered[j].position {
                return Err(Error::Geometry(format!(
                    "two dipoles ({:?} and {:?}) share the position {:?}",
                    ordered[j].role, ordered[i].role, ordered[i].position
                )));
            }
        }
    }

    // upper triangle, row by row
    let rows: Vec<Vec<Complex<T>>> = (0..p)
        .into_par_iter()
        .map(|i| {
            (i..p)
                .map(|j| kernel.impedance(ordered[i], ordered[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut full = DMatrix::from_element(p, p, Complex::new(T::zero(), T::zero()));
    for (i, row) in rows.into_iter().enumerate() {
        for (off, z) in row.into_iter().enumerate() {
            let j = i + off;
            full[(i, j)] = z;
            full[(j, i)] = z;
        }
    }
    ImpedanceSet::from_full(full, m, l, n_eso, n_ris, terminations)
}
