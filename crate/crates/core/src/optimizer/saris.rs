use rand::Rng;

use crate::channel::{FoldedChannel, RisLoads};
use crate::em::ImpedanceSet;
use crate::error::{Error, Result};
use crate::optimizer::delta::{build_delta_system, solve_delta, DeltaOutcome};
use crate::optimizer::metrics::{smse_total, sum_rate};
use crate::optimizer::precoder::{regularized_precoder, stationarity_residual};
use crate::optimizer::state::{OptimizerState, StopReason};
use crate::real::{CMatrix, Real};

/// Parameters of the alternating optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SarisConfig<T: Real> {
    /// Total transmit power `P` (W).
    pub power: T,
    /// Noise power (W).
    pub sigma_n2: T,
    /// Absolute SMSE change that ends the loop.
    pub epsilon: T,
    pub max_iter: usize,
    /// Feasible reactance interval `Q` (Ohm).
    pub interval: (T, T),
    /// RIS load resistance (Ohm).
    pub r0: T,
    /// Initial reactances; the midpoint of `interval` when `None`.
    pub x_init: Option<Vec<T>>,
    /// Measure `epsilon` against the SMSE reduction of the initial
    /// precoder, `L(1 + sigma^2) - SMSE_0`, instead of absolutely.
    pub relative_epsilon: bool,
    /// Step halvings tried when a full step raises the SMSE. Together with
    /// rejecting precoder updates that raise it, this keeps the SMSE trace
    /// monotone. `0` runs the unguarded iteration.
    pub max_backtracks: usize,
}

impl<T: Real> Default for SarisConfig<T> {
    fn default() -> Self {
        SarisConfig {
            power: T::one(),
            sigma_n2: T::lit(1e-11),
            epsilon: T::lit(1e-4),
            max_iter: 500,
            interval: (T::lit(-302.50), T::lit(-19.66)),
            r0: T::lit(0.2),
            x_init: None,
            relative_epsilon: true,
            max_backtracks: 30,
        }
    }
}

impl<T: Real> SarisConfig<T> {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.power > T::zero()) {
            return bad("power must be positive");
        }
        if !(self.sigma_n2 > T::zero()) {
            return bad("noise power must be positive");
        }
        if !(self.epsilon > T::zero()) {
            return bad("epsilon must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        Ok(())
    }

    fn guarded(&self) -> bool {
        self.max_backtracks > 0
    }

    pub fn initial_loads(&self, n: usize) -> Result<RisLoads<T>> {
        match &self.x_init {
            Some(x) if x.len() != n => Err(Error::Dimension {
                context: "x_init",
                expected: n.to_string(),
                got: x.len().to_string(),
            }),
            Some(x) => RisLoads::new(self.r0, x.clone(), self.interval),
            None => RisLoads::midpoint(n, self.r0, self.interval),
        }
    }
}

/// Alternate the closed-form precoder and the normalized load step until
/// the SMSE settles.
pub fn saris_optimize<T: Real>(f: &FoldedChannel<T>, config: &SarisConfig<T>) -> Result<OptimizerState<T>> {
    run(f, f, config)
}

/// Optimize against the interaction-free channel of `z`, reporting the
/// traces on the true channel `f`.
pub fn mismatched_optimize<T: Real>(
    f: &FoldedChannel<T>,
    z: &ImpedanceSet<T>,
    config: &SarisConfig<T>,
) -> Result<OptimizerState<T>> {
    let design = f.decoupled(z);
    run(&design, f, config)
}

fn run<T: Real>(design: &FoldedChannel<T>, eval: &FoldedChannel<T>, cfg: &SarisConfig<T>) -> Result<OptimizerState<T>> {
    cfg.validate()?;
    let loads = cfg.initial_loads(design.n())?;
    let (g, _) = design.inner_inverse(&loads)?;
    let mut h = design.channel_from_inverse(&g);
    let pre = regularized_precoder(&h, cfg.power, cfg.sigma_n2)?;

    let mut st = OptimizerState::new(design, pre.w.clone(), loads)?;
    st.precoder_residuals.push(stationarity_residual(&h, &pre.w_bar, pre.mu));
    let mut current = smse_total(&h, &st.w, cfg.sigma_n2)?;
    st.smse_trace.push(current);
    st.rate_trace.push(evaluate_rate(eval, &st.loads, &st.w, cfg.sigma_n2, design, &h)?);
    st.record();
    let threshold = if cfg.relative_epsilon {
        let idle = T::lit(design.l() as f64) * (T::one() + cfg.sigma_n2);
        cfg.epsilon * (idle - current).abs()
    } else {
        cfg.epsilon
    };

    loop {
        st.iteration += 1;
        let mut ds = build_delta_system(design, &st)?;
        if solve_delta(&mut ds, &st.w, cfg.sigma_n2, st.g_norm)? == DeltaOutcome::Stationary {
            st.converged = true;
            st.stop = StopReason::Stationary;
            break;
        }

        // loads move by -Im(delta); halve the step while the SMSE rises
        let x0: Vec<T> = st.loads.reactances().to_vec();
        let dir: Vec<T> = ds.delta.iter().map(|d| -d.im).collect();
        let mut scale = T::one();
        let mut accepted = None;
        for attempt in 0..=cfg.max_backtracks {
            let cand = st.loads.projected(x0.iter().zip(&dir).map(|(x, t)| *x + scale * *t));
            let (g, _) = design.inner_inverse(&cand)?;
            let h_new = design.channel_from_inverse(&g);
            let value = smse_total(&h_new, &st.w, cfg.sigma_n2)?;
            if !cfg.guarded() || value <= current {
                accepted = Some((cand, g, h_new, value));
                break;
            }
            if attempt < cfg.max_backtracks {
                st.backtracks += 1;
                scale /= T::lit(2.0);
            }
        }
        let Some((loads, g, h_new, value)) = accepted else {
            st.converged = true;
            st.stop = StopReason::NoDescent;
            break;
        };
        // |scale * delta_n| * ||G|| peaks at `scale` by construction
        st.guard_trace.push(scale);
        st.install(loads, g);
        h = h_new;
        let change = (value - current).abs();
        current = value;

        let pre = regularized_precoder(&h, cfg.power, cfg.sigma_n2)?;
        let cand = smse_total(&h, &pre.w, cfg.sigma_n2)?;
        if !cfg.guarded() || cand <= current {
            st.precoder_residuals.push(stationarity_residual(&h, &pre.w_bar, pre.mu));
            st.w = pre.w;
            current = cand;
        } else {
            st.rejected_precoders += 1;
        }
        st.smse_trace.push(current);
        st.rate_trace.push(evaluate_rate(eval, &st.loads, &st.w, cfg.sigma_n2, design, &h)?);
        st.record();

        if change <= threshold {
            st.converged = true;
            st.stop = StopReason::Tolerance;
            break;
        }
        if st.iteration >= cfg.max_iter {
            st.stop = StopReason::MaxIterations;
            break;
        }
    }
    Ok(st)
}

fn evaluate_rate<T: Real>(
    eval: &FoldedChannel<T>,
    loads: &RisLoads<T>,
    w: &CMatrix<T>,
    sigma_n2: T,
    design: &FoldedChannel<T>,
    h_design: &CMatrix<T>,
) -> Result<T> {
    if std::ptr::eq(eval, design) {
        return sum_rate(h_design, w, sigma_n2);
    }
    let (g, _) = eval.inner_inverse(loads)?;
    sum_rate(&eval.channel_from_inverse(&g), w, sigma_n2)
}

/// Best of `trials` uniformly drawn reactance vectors, each paired with
/// the closed-form precoder.
pub fn random_baseline<T: Real, R: Rng + ?Sized>(
    f: &FoldedChannel<T>,
    config: &SarisConfig<T>,
    trials: usize,
    rng: &mut R,
) -> Result<OptimizerState<T>> {
    config.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument("random baseline needs at least one trial".into()));
    }
    let (lo, hi) = config.interval;
    let (lo64, hi64) = (lo.to_f64_lossy(), hi.to_f64_lossy());
    let mut best: Option<(T, T, RisLoads<T>, CMatrix<T>, CMatrix<T>, T)> = None;
    for _ in 0..trials {
        let x: Vec<T> = (0..f.n())
            .map(|_| {
                let v = if hi64 > lo64 { rng.random_range(lo64..=hi64) } else { lo64 };
                // conversion may round just outside for f32
                let v = T::lit(v);
                if v < lo { lo } else if v > hi { hi } else { v }
            })
            .collect();
        let loads = RisLoads::new(config.r0, x, config.interval)?;
        let (g, _) = f.inner_inverse(&loads)?;
        let h = f.channel_from_inverse(&g);
        let pre = regularized_precoder(&h, config.power, config.sigma_n2)?;
        let rate = sum_rate(&h, &pre.w, config.sigma_n2)?;
        if best.as_ref().map_or(true, |b| rate > b.0) {
            let residual = stationarity_residual(&h, &pre.w_bar, pre.mu);
            let value = smse_total(&h, &pre.w, config.sigma_n2)?;
            best = Some((rate, value, loads, g, pre.w, residual));
        }
    }
    let (rate, value, loads, _, w, residual) = best.expect("at least one trial");
    let mut st = OptimizerState::new(f, w, loads)?;
    st.smse_trace.push(value);
    st.rate_trace.push(rate);
    st.precoder_residuals.push(residual);
    st.record();
    st.iteration = 1;
    st.converged = true;
    st.stop = StopReason::Sampled;
    Ok(st)
}
