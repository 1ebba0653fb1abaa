//! Weight `c_Ω` of the divergence residual.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::mesh::{DomainKind, DomainSpec};

/// Principal Dirichlet eigenvalue of the L-shape `(−1, 1)² \ [0, 1)²`.
pub const LSHAPE_EIGENVALUE: f64 = 9.6397238389738806;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    One,
    Diameter,
    Width,
    /// Friedrichs constant; `ℓ·λ₁^{−1/2}` on the L-shape.
    Friedrichs,
    /// `ℓ/π` on every domain.
    EllOverPi,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::One => "one",
            WeightMode::Diameter => "diameter",
            WeightMode::Width => "width",
            WeightMode::Friedrichs => "friedrichs",
            WeightMode::EllOverPi => "ell_over_pi",
        }
    }

    pub const ALL: [WeightMode; 5] = [
        WeightMode::One,
        WeightMode::Diameter,
        WeightMode::Width,
        WeightMode::Friedrichs,
        WeightMode::EllOverPi,
    ];
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        WeightMode::ALL
            .into_iter()
            .find(|m| m.as_str() == key)
            .ok_or_else(|| {
                format!("unknown weight '{s}' (expected one, diameter, width, friedrichs or ell_over_pi)")
            })
    }
}

/// `c_Ω` for `mode` on `domain`.
pub fn weight(mode: WeightMode, domain: &DomainSpec) -> f64 {
    let l = domain.ell;
    match (mode, domain.kind) {
        (WeightMode::One, _) => 1.0,
        (WeightMode::EllOverPi, _) => l / PI,
        (WeightMode::Diameter, DomainKind::Square) => 2f64.sqrt() * l,
        (WeightMode::Diameter, DomainKind::Rectangle) => l.hypot(1.0),
        (WeightMode::Diameter, DomainKind::LShape) => 2.0 * 2f64.sqrt() * l,
        (WeightMode::Width, DomainKind::Square) => l,
        (WeightMode::Width, DomainKind::Rectangle) => l.min(1.0),
        (WeightMode::Width, DomainKind::LShape) => 2.0 * l,
        (WeightMode::Friedrichs, DomainKind::Square | DomainKind::Rectangle) => l / PI,
        (WeightMode::Friedrichs, DomainKind::LShape) => l / LSHAPE_EIGENVALUE.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_weights() {
        let d = DomainSpec::square(10.0).unwrap();
        assert_eq!(weight(WeightMode::Friedrichs, &d), 10.0 / PI);
        assert_eq!(weight(WeightMode::Width, &d), 10.0);
        assert!((weight(WeightMode::Diameter, &d) - 10.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(weight(WeightMode::One, &d), 1.0);
    }

    #[test]
    fn lshape_modes_differ() {
        let d = DomainSpec::lshape(1.0).unwrap();
        let fr = weight(WeightMode::Friedrichs, &d);
        assert!((fr - 9.6397238389738806f64.powf(-0.5)).abs() < 1e-15);
        assert!((weight(WeightMode::EllOverPi, &d) - fr).abs() > 1e-3);
    }

    #[test]
    fn parse() {
        assert_eq!("ell-over-pi".parse::<WeightMode>().unwrap(), WeightMode::EllOverPi);
        assert!("huge".parse::<WeightMode>().is_err());
    }
}
