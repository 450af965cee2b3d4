use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::real::Real;

/// What a dipole stands for in the link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Transmitter,
    Receiver,
    RisCell,
    Eso,
}

/// A z-aligned, center-fed thin-wire dipole.
///
/// Every element of a scenario (transmit antennas, receivers, RIS cells and
/// environmental scatterers) is one of these, with one port at its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole<T> {
    /// Center position in meters.
    pub position: [T; 3],
    /// Total length in meters.
    pub length: T,
    /// Wire radius in meters.
    pub wire_radius: T,
    pub role: Role,
}

impl<T: Real> Dipole<T> {
    pub fn new(position: [T; 3], length: T, wire_radius: T, role: Role) -> Result<Self> {
        let d = Dipole {
            position,
            length,
            wire_radius,
            role,
        };
        d.validate()?;
        Ok(d)
    }

    /// Half-wave dipole for the given wavelength.
    pub fn half_wave(position: [T; 3], wavelength: T, wire_radius: T, role: Role) -> Result<Self> {
        Self::new(position, wavelength / T::lit(2.0), wire_radius, role)
    }

    /// Thin-wire validity: positive length and radius, radius below a tenth
    /// of the length, finite coordinates.
    pub fn validate(&self) -> Result<()> {
        let finite = self.position.iter().all(|p| p.is_finite())
            && self.length.is_finite()
            && self.wire_radius.is_finite();
        if !finite {
            return Err(Error::Geometry("non-finite dipole parameter".into()));
        }
        if self.length <= T::zero() {
            return Err(Error::Geometry(format!(
                "dipole length must be positive, got {}",
                self.length
            )));
        }
        if self.wire_radius <= T::zero() {
            return Err(Error::Geometry(format!(
                "wire radius must be positive, got {}",
                self.wire_radius
            )));
        }
        if self.wire_radius >= self.length / T::lit(10.0) {
            return Err(Error::Geometry(format!(
                "wire radius {} violates the thin-wire limit (length {} / 10)",
                self.wire_radius, self.length
            )));
        }
        Ok(())
    }

    /// Distance in the xy-plane between the two dipole axes.
    pub fn horizontal_distance(&self, other: &Self) -> T {
        let dx = self.position[0] - other.position[0];
        let dy = self.position[1] - other.position[1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn center_distance(&self, other: &Self) -> T {
        let dz = self.position[2] - other.position[2];
        let rho = self.horizontal_distance(other);
        (rho * rho + dz * dz).sqrt()
    }

    /// Same physical wire (role is irrelevant to the electromagnetics).
    pub fn same_wire(&self, other: &Self) -> bool {
        self.position == other.position
            && self.length == other.length
            && self.wire_radius == other.wire_radius
    }

    /// Total order on the electromagnetic parameters, used to evaluate
    /// every unordered pair through a single code path.
    pub(crate) fn geometric_cmp(&self, other: &Self) -> Ordering {
        let key = |d: &Self| {
            [
                d.position[0],
                d.position[1],
                d.position[2],
                d.length,
                d.wire_radius,
            ]
        };
        let (ka, kb) = (key(self), key(other));
        for (x, y) in ka.iter().zip(kb.iter()) {
            match x.partial_cmp(y) {
                Some(Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_thick_or_degenerate_wires() {
        assert!(Dipole::new([0.0, 0.0, 0.0], 0.03, 0.003, Role::Eso).is_err());
        assert!(Dipole::new([0.0, 0.0, 0.0], 0.0, 1e-4, Role::Eso).is_err());
        assert!(Dipole::new([0.0, 0.0, 0.0], 0.03, -1e-4, Role::Eso).is_err());
        assert!(Dipole::new([f64::NAN, 0.0, 0.0], 0.03, 1e-4, Role::Eso).is_err());
        assert!(Dipole::new([0.0, 0.0, 0.0], 0.03, 1.2e-4, Role::Eso).is_ok());
    }

    #[test]
    fn half_wave_length() {
        let d = Dipole::half_wave([0.0f64; 3], 0.06, 1.2e-4, Role::RisCell).unwrap();
        assert_eq!(d.length, 0.03);
    }
}
