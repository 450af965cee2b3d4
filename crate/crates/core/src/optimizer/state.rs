use crate::channel::{FoldedChannel, RisLoads};
use crate::error::Result;
use crate::linalg::norm2;
use crate::real::{CMatrix, Real};

/// Why an optimization run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// SMSE change fell below the threshold.
    Tolerance,
    /// The normalized step direction vanished.
    Stationary,
    /// No step along the current direction lowered the SMSE.
    NoDescent,
    /// Iteration budget exhausted.
    MaxIterations,
    /// Not an iterative run (baselines).
    Sampled,
}

/// Iterate of the alternating optimization.
#[derive(Debug, Clone)]
pub struct OptimizerState<T: Real> {
    pub w: CMatrix<T>,
    pub loads: RisLoads<T>,
    /// `(Z_SS + Z_SOS + Z_RIS)^{-1}` for the loads it was computed at.
    pub g: CMatrix<T>,
    /// Spectral norm of `g`.
    pub g_norm: T,
    /// SMSE after the initial precoder and after every load update.
    pub smse_trace: Vec<T>,
    /// Sum-rate at the same points as `smse_trace`.
    pub rate_trace: Vec<T>,
    /// `max_n |delta_n| * ||G||` of every accepted step.
    pub guard_trace: Vec<T>,
    /// Stationarity residual after every precoder update.
    pub precoder_residuals: Vec<T>,
    /// `||W||_F^2` at the same points as `smse_trace`.
    pub power_trace: Vec<T>,
    /// Loads at the same points as `smse_trace`.
    pub load_trace: Vec<RisLoads<T>>,
    /// Precoder updates rejected because they raised the SMSE.
    pub rejected_precoders: usize,
    /// Step halvings performed over the run.
    pub backtracks: usize,
    pub iteration: usize,
    pub converged: bool,
    pub stop: StopReason,
    g_loads: RisLoads<T>,
}

impl<T: Real> OptimizerState<T> {
    /// Fresh state with `G` factored at `loads`.
    pub fn new(f: &FoldedChannel<T>, w: CMatrix<T>, loads: RisLoads<T>) -> Result<Self> {
        let (g, _) = f.inner_inverse(&loads)?;
        let g_norm = norm2(&g);
        Ok(OptimizerState {
            w,
            g_loads: loads.clone(),
            loads,
            g,
            g_norm,
            smse_trace: Vec::new(),
            rate_trace: Vec::new(),
            guard_trace: Vec::new(),
            precoder_residuals: Vec::new(),
            power_trace: Vec::new(),
            load_trace: Vec::new(),
            rejected_precoders: 0,
            backtracks: 0,
            iteration: 0,
            converged: false,
            stop: StopReason::MaxIterations,
        })
    }

    /// Replace the loads and refactor `G`.
    pub fn set_loads(&mut self, f: &FoldedChannel<T>, loads: RisLoads<T>) -> Result<()> {
        let (g, _) = f.inner_inverse(&loads)?;
        self.install(loads, g);
        Ok(())
    }

    pub(crate) fn install(&mut self, loads: RisLoads<T>, g: CMatrix<T>) {
        self.g_norm = norm2(&g);
        self.g = g;
        self.g_loads = loads.clone();
        self.loads = loads;
    }

    pub(crate) fn record(&mut self) {
        self.power_trace.push(self.w.iter().fold(T::zero(), |a, v| a + v.norm_sqr()));
        self.load_trace.push(self.loads.clone());
    }

    /// Whether `g` was computed for the current `loads`.
    pub fn g_is_current(&self) -> bool {
        self.g_loads == self.loads
    }

    pub fn final_smse(&self) -> Option<T> {
        self.smse_trace.last().copied()
    }

    pub fn final_rate(&self) -> Option<T> {
        self.rate_trace.last().copied()
    }
}
