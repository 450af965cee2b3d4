//! Composite Gauss–Legendre rules with geometric grading toward
//! near-singular points of the wire kernel.

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on the three-term Legendre recurrence; accurate to
/// machine precision for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule order must be at least one");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Resolution of the wire-kernel quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Longest panel, in wavelengths.
    pub max_panel: f64,
    /// Growth ratio of graded panels moving away from a near-singular point.
    pub grading: f64,
    /// Every panel is split into this many equal pieces (1 = default mesh).
    pub refine: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            order: 12,
            max_panel: 0.125,
            grading: 4.0,
            refine: 1,
        }
    }
}

impl QuadratureRule {
    /// Same mesh with every panel halved: twice the integration points.
    pub fn doubled(self) -> Self {
        QuadratureRule {
            refine: self.refine * 2,
            ..self
        }
    }

    /// Panel boundaries covering `[lo, hi]`.
    ///
    /// `breaks` are interior points where the integrand has a kink or a
    /// near-singularity of width `rho`; panels are graded geometrically
    /// toward the `singular` ones.
    pub(crate) fn panels(
        &self,
        lo: f64,
        hi: f64,
        breaks: &[(f64, bool)],
        rho: f64,
        wavelength: f64,
    ) -> Vec<(f64, f64)> {
        let tiny = 1e-12 * (hi - lo);
        let mut pts: Vec<(f64, bool)> = vec![(lo, false), (hi, false)];
        for &(p, singular) in breaks {
            if let Some(existing) = pts.iter_mut().find(|(q, _)| (q - p).abs() <= tiny) {
                existing.1 |= singular;
            } else if p > lo && p < hi {
                pts.push((p, singular));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));

        let max_len = self.max_panel * wavelength;
        let mut out = Vec::new();
        for win in pts.windows(2) {
            let ((u, su), (v, sv)) = (win[0], win[1]);
            let mut cuts = vec![u, v];
            let len = v - u;
            if rho * self.grading < len {
                let limit = if su && sv { 0.5 * len } else { len };
                let mut s = rho;
                while s < limit {
                    if su {
                        cuts.push(u + s);
                    }
                    if sv {
                        cuts.push(v - s);
                    }
                    s *= self.grading;
                }
            }
            cuts.sort_by(|a, b| a.total_cmp(b));
            cuts.dedup_by(|a, b| (*a - *b).abs() <= tiny);
            for c in cuts.windows(2) {
                let (a, b) = (c[0], c[1]);
                let pieces = ((b - a) / max_len).ceil().max(1.0) as usize * self.refine;
                let h = (b - a) / pieces as f64;
                for k in 0..pieces {
                    let start = a + h * k as f64;
                    let end = if k + 1 == pieces { b } else { start + h };
                    out.push((start, end));
                }
            }
        }
        out
    }
}
