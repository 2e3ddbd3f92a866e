//! Scalar spin polarization and the matching thermal bias parameter.

use crate::error::{Error, Result};

/// Spin polarization `P = p0 - p1`: the population difference of a two-level
/// spin, in [-1, 1]. Positive values mean excess population in the bit-0
/// ("up") state. Related to the thermal bias by `P = tanh(eps)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Polarization(f64);

impl Polarization {
    /// The unpolarized (maximally mixed) value.
    pub const ZERO: Self = Polarization(0.0);

    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite(p));
        }
        if p.abs() > 1.0 {
            return Err(Error::PolarizationOutOfRange(p));
        }
        Ok(Polarization(p))
    }

    /// Accepts values that drift a few ulp past +-1 from floating-point
    /// arithmetic and clamps them back; anything further out is a bug.
    pub(crate) fn from_computed(p: f64) -> Self {
        assert!(
            p.is_finite() && p.abs() <= 1.0 + 1e-12,
            "internal error: computed polarization {p} outside [-1, 1]"
        );
        Polarization(p.clamp(-1.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The thermal bias `eps = atanh(P)`. Rejected for `|P| = 1`, which has
    /// no finite bias.
    pub fn epsilon(self) -> Result<Epsilon> {
        if self.0.abs() >= 1.0 {
            return Err(Error::UnitPolarization);
        }
        Epsilon::new(self.0.atanh())
    }
}

/// Thermal bias exponent of a spin: the populations of a spin equilibrated at
/// bias `eps` are proportional to `e^{+eps}` (bit 0) and `e^{-eps}` (bit 1),
/// so its polarization is `tanh(eps)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub const ZERO: Self = Epsilon(0.0);

    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() {
            return Err(Error::NonFinite(eps));
        }
        Ok(Epsilon(eps))
    }

    pub fn from_polarization(p: Polarization) -> Result<Self> {
        p.epsilon()
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn polarization(self) -> Polarization {
        Polarization(self.0.tanh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarization_rejects_out_of_range() {
        assert!(Polarization::new(1.5).is_err());
        assert!(Polarization::new(-1.0001).is_err());
        assert!(Polarization::new(f64::NAN).is_err());
        assert!(Polarization::new(f64::INFINITY).is_err());
        assert!(Polarization::new(1.0).is_ok());
        assert!(Polarization::new(-1.0).is_ok());
    }

    #[test]
    fn epsilon_rejects_non_finite() {
        assert!(Epsilon::new(f64::NAN).is_err());
        assert!(Epsilon::new(f64::NEG_INFINITY).is_err());
        assert!(Epsilon::new(-3.0).is_ok());
    }

    #[test]
    fn unit_polarization_has_no_bias() {
        assert_eq!(
            Polarization::new(1.0).unwrap().epsilon(),
            Err(Error::UnitPolarization)
        );
        assert_eq!(
            Polarization::new(-1.0).unwrap().epsilon(),
            Err(Error::UnitPolarization)
        );
    }

    #[test]
    fn bias_round_trips_with_polarization() {
        for &p in &[-0.95, -0.3, 0.0, 0.2, 0.7, 0.999] {
            let pol = Polarization::new(p).unwrap();
            let back = pol.epsilon().unwrap().polarization().value();
            assert!((back - p).abs() < 1e-12, "round trip {p} -> {back}");
        }
    }
}
