use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A length either in meters or in multiples of the wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Length {
    pub value: f64,
    pub in_wavelengths: bool,
}

impl Length {
    pub const fn meters(value: f64) -> Self {
        Length { value, in_wavelengths: false }
    }
    pub const fn wavelengths(value: f64) -> Self {
        Length { value, in_wavelengths: true }
    }
    pub fn to_meters(self, wavelength: f64) -> f64 {
        if self.in_wavelengths {
            self.value * wavelength
        } else {
            self.value
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.in_wavelengths {
            write!(f, "{}λ", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// A point in the `z = 0` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub xy: [f64; 2],
    pub in_wavelengths: bool,
}

impl Point {
    pub const fn wavelengths(x: f64, y: f64) -> Self {
        Point { xy: [x, y], in_wavelengths: true }
    }
    pub const fn meters(x: f64, y: f64) -> Self {
        Point { xy: [x, y], in_wavelengths: false }
    }
    pub fn to_meters(self, wavelength: f64) -> [f64; 2] {
        let k = if self.in_wavelengths { wavelength } else { 1.0 };
        [self.xy[0] * k, self.xy[1] * k]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.xy[0], self.xy[1])?;
        if self.in_wavelengths {
            write!(f, "λ")?;
        }
        Ok(())
    }
}

/// Name of the only supported random generator.
pub const RNG_NAME: &str = "chacha20";

/// Deployment, termination and optimizer parameters of a simulation.
///
/// Defaults reproduce the reference deployment; every field maps to one
/// key of the text format read by [`parse_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// `wavelength` (m).
    pub wavelength: f64,
    /// `M`: transmit antennas.
    pub m: usize,
    /// `L`: single-antenna users.
    pub l: usize,
    /// `N`: RIS cells, a perfect square.
    pub n: usize,
    /// `N_c`: scattering clusters.
    pub n_c: usize,
    /// `N_O`: scatterers per cluster.
    pub n_o: usize,
    /// `d`: RIS cell spacing along both grid axes.
    pub d: Length,
    /// `R`: radius of the half-disk holding the cluster centers.
    pub region_radius: Length,
    /// `r`: radius of each cluster.
    pub cluster_radius: Length,
    /// `wire_radius`: radius of every dipole wire.
    pub wire_radius: Length,
    /// `tx_spacing`: element spacing of the transmit array.
    pub tx_spacing: Length,
    pub p_bs: Point,
    pub p_ris: Point,
    /// `p_UE1`, `p_UE2`, ...; users without an entry follow
    /// [`default_ue_position`].
    pub p_ue: Vec<Point>,
    /// `R0` (Ohm).
    pub r0: f64,
    /// `Q_interval` (Ohm).
    pub q_interval: (f64, f64),
    /// `Z_G`, `Z_L`, `Z_US`: diagonal termination values (Ohm).
    pub z_g: Complex64,
    pub z_l: Complex64,
    pub z_us: Complex64,
    /// `P` (W).
    pub power: f64,
    /// `sigma_n2` (W).
    pub sigma_n2: f64,
    pub seed: u64,
    pub trials: usize,
    /// `rng`: generator identity, recorded for reproducibility.
    pub rng: String,
}

/// Position of user `index` (0-based) when none is configured: users
/// sit on the line `y = 24 λ` starting at `x = 16 λ`, `4 λ` apart.
pub fn default_ue_position(index: usize) -> Point {
    Point::wavelengths(16.0 + 4.0 * index as f64, 24.0)
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            wavelength: 0.06,
            m: 4,
            l: 2,
            n: 16,
            n_c: 4,
            n_o: 50,
            d: Length::wavelengths(0.5),
            region_radius: Length::wavelengths(40.0),
            cluster_radius: Length::wavelengths(1.0),
            wire_radius: Length::wavelengths(0.002),
            tx_spacing: Length::wavelengths(0.5),
            p_bs: Point::wavelengths(0.0, 0.0),
            p_ris: Point::wavelengths(0.0, 40.0),
            p_ue: Vec::new(),
            r0: 0.2,
            q_interval: (-302.50, -19.66),
            z_g: Complex64::new(50.0, 0.0),
            z_l: Complex64::new(50.0, 0.0),
            z_us: Complex64::new(0.0, 0.0),
            power: 1.0,
            sigma_n2: 1e-11,
            seed: 0,
            trials: 1000,
            rng: RNG_NAME.to_string(),
        }
    }
}

impl ScenarioConfig {
    /// Total number of scatterers `N_c N_O`.
    pub fn n_s(&self) -> usize {
        self.n_c * self.n_o
    }

    /// Cells per grid side.
    pub fn side(&self) -> usize {
        (self.n as f64).sqrt().round() as usize
    }

    /// User positions in meters, one per user.
    pub fn ue_positions(&self) -> Vec<[f64; 2]> {
        (0..self.l)
            .map(|i| {
                self.p_ue
                    .get(i)
                    .copied()
                    .unwrap_or_else(|| default_ue_position(i))
                    .to_meters(self.wavelength)
            })
            .collect()
    }

    /// Check every invariant; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        self.validate_at(&HashMap::new())
    }

    fn validate_at(&self, lines: &HashMap<String, usize>) -> Result<()> {
        let fail = |key: &str, message: String| -> Result<()> {
            Err(Error::Config {
                line: lines.get(key).copied().unwrap_or(0),
                message: format!("{key}: {message}"),
            })
        };
        let lam = self.wavelength;
        if !(lam > 0.0 && lam.is_finite()) {
            return fail("wavelength", format!("must be positive, got {lam}"));
        }
        for (key, v) in [("M", self.m), ("L", self.l), ("N", self.n), ("N_O", self.n_o), ("trials", self.trials)] {
            if v == 0 {
                return fail(key, "must be at least 1".into());
            }
        }
        let side = self.side();
        if side * side != self.n {
            return fail("N", format!("{} is not a perfect square", self.n));
        }
        for (key, len) in [
            ("d", self.d),
            ("R", self.region_radius),
            ("r", self.cluster_radius),
            ("wire_radius", self.wire_radius),
            ("tx_spacing", self.tx_spacing),
        ] {
            let v = len.to_meters(lam);
            if !(v > 0.0 && v.is_finite()) {
                return fail(key, format!("must be a positive length, got {len}"));
            }
        }
        let a = self.wire_radius.to_meters(lam);
        if a >= lam / 20.0 {
            return fail("wire_radius", format!("{a} m is not thin compared with a half-wave dipole"));
        }
        if self.cluster_radius.to_meters(lam) > self.region_radius.to_meters(lam) {
            return fail("r", "cluster radius exceeds the region radius R".into());
        }
        if self.p_ue.len() > self.l {
            return fail(&format!("p_UE{}", self.p_ue.len()), format!("only L = {} users", self.l));
        }
        if !(self.r0 >= 0.0 && self.r0.is_finite()) {
            return fail("R0", format!("must be non-negative, got {}", self.r0));
        }
        let (lo, hi) = self.q_interval;
        if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
            return fail("Q_interval", format!("[{lo}, {hi}] is not a bounded interval"));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return fail("P", format!("must be positive, got {}", self.power));
        }
        if !(self.sigma_n2 > 0.0 && self.sigma_n2.is_finite()) {
            return fail("sigma_n2", format!("must be positive, got {}", self.sigma_n2));
        }
        if self.rng != RNG_NAME {
            return fail("rng", format!("unsupported generator '{}', expected {RNG_NAME}", self.rng));
        }
        Ok(())
    }

    /// Text form accepted by [`parse_config`]; parsing it gives back an
    /// equal configuration.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("wavelength", self.wavelength.to_string());
        put("M", self.m.to_string());
        put("L", self.l.to_string());
        put("N", self.n.to_string());
        put("N_c", self.n_c.to_string());
        put("N_O", self.n_o.to_string());
        put("d", self.d.to_string());
        put("R", self.region_radius.to_string());
        put("r", self.cluster_radius.to_string());
        put("wire_radius", self.wire_radius.to_string());
        put("tx_spacing", self.tx_spacing.to_string());
        put("p_BS", self.p_bs.to_string());
        put("p_RIS", self.p_ris.to_string());
        for (i, p) in self.p_ue.iter().enumerate() {
            put(&format!("p_UE{}", i + 1), p.to_string());
        }
        put("R0", self.r0.to_string());
        put("Q_interval", format!("[{}, {}]", self.q_interval.0, self.q_interval.1));
        put("Z_G", format_complex(self.z_g));
        put("Z_L", format_complex(self.z_l));
        put("Z_US", format_complex(self.z_us));
        put("P", self.power.to_string());
        put("sigma_n2", self.sigma_n2.to_string());
        put("seed", self.seed.to_string());
        put("trials", self.trials.to_string());
        put("rng", self.rng.clone());
        out
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        z.re.to_string()
    } else if z.im < 0.0 {
        format!("{}-{}j", z.re, -z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{}' is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("'{}' is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.trim().parse().map_err(|_| format!("'{}' is not a non-negative integer", s.trim()))
}

fn strip_lambda(s: &str) -> (&str, bool) {
    let t = s.trim();
    for suffix in ["λ", "lambda"] {
        if let Some(rest) = t.strip_suffix(suffix) {
            return (rest.trim_end(), true);
        }
    }
    (t, false)
}

fn parse_length(s: &str) -> std::result::Result<Length, String> {
    let (num, lam) = strip_lambda(s);
    Ok(Length { value: parse_f64(num)?, in_wavelengths: lam })
}

fn parse_pair(s: &str) -> std::result::Result<([f64; 2], bool), String> {
    let (body, lam) = strip_lambda(s);
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| format!("expected '[a, b]', got '{}'", s.trim()))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two components, got {}", parts.len()));
    }
    Ok(([parse_f64(parts[0])?, parse_f64(parts[1])?], lam))
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (xy, lam) = parse_pair(s)?;
    Ok(Point { xy, in_wavelengths: lam })
}

/// `a`, `bj`, `a+bj` or `a-bj` (also with `i`).
fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('j').or_else(|| t.strip_suffix('i')) else {
        return Ok(Complex64::new(parse_f64(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> std::result::Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_f64(x),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(parse_f64(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Parse the flat `key = value` format. Blank lines and `#` comments are
/// ignored; omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut lines: HashMap<String, usize> = HashMap::new();
    let mut ues: Vec<(usize, Point)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config { line: line_no, message };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{content}'")))?;
        let key = key.trim();
        let value = value.trim();
        if lines.insert(key.to_string(), line_no).is_some() {
            return Err(err(format!("duplicate key '{key}'")));
        }
        let with_key = |m: String| err(format!("{key}: {m}"));
        match key {
            "wavelength" => {
                let (num, lam) = strip_lambda(value);
                if lam {
                    return Err(with_key("the wavelength itself must be given in meters".into()));
                }
                cfg.wavelength = parse_f64(num).map_err(with_key)?;
            }
            "M" => cfg.m = parse_usize(value).map_err(with_key)?,
            "L" => cfg.l = parse_usize(value).map_err(with_key)?,
            "N" => cfg.n = parse_usize(value).map_err(with_key)?,
            "N_c" => cfg.n_c = parse_usize(value).map_err(with_key)?,
            "N_O" => cfg.n_o = parse_usize(value).map_err(with_key)?,
            "d" => cfg.d = parse_length(value).map_err(with_key)?,
            "R" => cfg.region_radius = parse_length(value).map_err(with_key)?,
            "r" => cfg.cluster_radius = parse_length(value).map_err(with_key)?,
            "wire_radius" => cfg.wire_radius = parse_length(value).map_err(with_key)?,
            "tx_spacing" => cfg.tx_spacing = parse_length(value).map_err(with_key)?,
            "p_BS" => cfg.p_bs = parse_point(value).map_err(with_key)?,
            "p_RIS" => cfg.p_ris = parse_point(value).map_err(with_key)?,
            "R0" => cfg.r0 = parse_f64(value).map_err(with_key)?,
            "Q_interval" => {
                let (q, lam) = parse_pair(value).map_err(with_key)?;
                if lam {
                    return Err(with_key("reactances are in Ohm, not wavelengths".into()));
                }
                cfg.q_interval = (q[0], q[1]);
            }
            "Z_G" => cfg.z_g = parse_complex(value).map_err(with_key)?,
            "Z_L" => cfg.z_l = parse_complex(value).map_err(with_key)?,
            "Z_US" => cfg.z_us = parse_complex(value).map_err(with_key)?,
            "P" => cfg.power = parse_f64(value).map_err(with_key)?,
            "sigma_n2" => cfg.sigma_n2 = parse_f64(value).map_err(with_key)?,
            "seed" => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| with_key(format!("'{value}' is not a 64-bit unsigned integer")))?
            }
            "trials" => cfg.trials = parse_usize(value).map_err(with_key)?,
            "rng" => cfg.rng = value.to_string(),
            _ => {
                let index = key
                    .strip_prefix("p_UE")
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|i| *i >= 1);
                match index {
                    Some(i) => ues.push((i, parse_point(value).map_err(with_key)?)),
                    None => return Err(err(format!("unknown key '{key}'"))),
                }
            }
        }
    }

    ues.sort_by_key(|(i, _)| *i);
    for (k, (i, p)) in ues.into_iter().enumerate() {
        if i != k + 1 {
            return Err(Error::Config {
                line: lines.get(&format!("p_UE{i}")).copied().unwrap_or(0),
                message: format!("p_UE{i} given without p_UE{}", k + 1),
            });
        }
        cfg.p_ue.push(p);
    }
    cfg.validate_at(&lines)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.n_s(), 200);
        let ue = cfg.ue_positions();
        assert!((ue[0][0] - 0.96).abs() < 1e-12 && (ue[0][1] - 1.44).abs() < 1e-12);
        assert!((ue[1][0] - 1.20).abs() < 1e-12);
    }

    #[test]
    fn non_square_rejected_at_its_line() {
        let e = parse_config("# comment\n\nN = 15\n").unwrap_err();
        match e {
            Error::Config { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("perfect square"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_malformed() {
        assert!(matches!(parse_config("M = 4\nfoo = 1"), Err(Error::Config { line: 2, .. })));
        assert!(matches!(parse_config("M 4"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("M = -4"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("M = 4\nM = 5"), Err(Error::Config { line: 2, .. })));
        assert!(matches!(parse_config("p_UE3 = [1, 2]"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("rng = pcg"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("Q_interval = [1, 0]"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn lengths_and_units() {
        let cfg = parse_config("d = 0.25λ\nR = 2.4\nr = 1 lambda\np_UE1 = [1, 2]\np_UE2 = [3, 4]λ").unwrap();
        assert_eq!(cfg.d, Length::wavelengths(0.25));
        assert!((cfg.d.to_meters(cfg.wavelength) - 0.015).abs() < 1e-15);
        assert_eq!(cfg.region_radius, Length::meters(2.4));
        assert_eq!(cfg.ue_positions()[0], [1.0, 2.0]);
        assert!((cfg.ue_positions()[1][1] - 0.24).abs() < 1e-15);
    }

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("50").unwrap(), Complex64::new(50.0, 0.0));
        assert_eq!(parse_complex("1.5-2j").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex("1e-3+4e+2j").unwrap(), Complex64::new(1e-3, 400.0));
        assert_eq!(parse_complex("-j").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("-3.5i").unwrap(), Complex64::new(0.0, -3.5));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "wavelength = 0.05\nL = 3\nN = 25\nN_c = 2\nd = 0.3λ\np_UE2 = [1.25, -3]\np_UE1 = [7, 8]λ\n\
                    Z_L = 50-12.5j\nZ_US = 0.1+1e-7j\nsigma_n2 = 3.3e-12\nseed = 18446744073709551615\nR0 = 1";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.p_ue.len(), 2);
        let again = parse_config(&cfg.serialize()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(parse_config(&ScenarioConfig::default().serialize()).unwrap(), ScenarioConfig::default());
    }
}
