//! Points on the unit circle, stored by angle.
//!
//! A point keeps an exact rational number of turns whenever it was built
//! from one (roots of unity, analytic rotation angles). The radian value is
//! always present and is what numeric code consumes.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Rational number of full turns.
pub type Turns = Ratio<i64>;

/// Largest denominator tried when recognising an angle as a rational turn.
pub const SNAP_DENOMINATOR: i64 = 64;
/// Tolerance (in turns) for rational recognition.
pub const SNAP_TOLERANCE: f64 = 1e-9;

/// `ω = exp(iφ)` with `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitCirclePoint {
    radians: f64,
    turns: Option<Turns>,
}

impl UnitCirclePoint {
    pub fn one() -> Self {
        Self::from_turns(Turns::zero())
    }

    pub fn minus_one() -> Self {
        Self::from_turns(Turns::new(1, 2))
    }

    pub fn from_radians(angle: f64) -> Self {
        let mut r = angle.rem_euclid(TAU);
        if r >= TAU {
            r = 0.0;
        }
        Self {
            radians: r,
            turns: None,
        }
    }

    pub fn from_turns(turns: Turns) -> Self {
        let reduced = reduce_turns(turns);
        Self {
            radians: reduced.to_f64().unwrap_or(0.0) * TAU,
            turns: Some(reduced),
        }
    }

    /// `p/q` of a full turn.
    pub fn from_fraction(p: i64, q: i64) -> Self {
        Self::from_turns(Turns::new(p, q))
    }

    /// Recognise a radian value as a rational turn with small denominator.
    pub fn snapped(angle: f64) -> Self {
        let base = Self::from_radians(angle);
        match rational_turns(base.radians / TAU, SNAP_DENOMINATOR, SNAP_TOLERANCE) {
            Some(t) => Self::from_turns(t),
            None => base,
        }
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    /// Angle in `(-π, π]`.
    pub fn signed_radians(&self) -> f64 {
        if self.radians > PI {
            self.radians - TAU
        } else {
            self.radians
        }
    }

    pub fn turns(&self) -> Option<Turns> {
        self.turns
    }

    pub fn is_exact(&self) -> bool {
        self.turns.is_some()
    }

    pub fn to_complex(&self) -> Complex64 {
        if let Some(t) = self.turns {
            // exact values for the quarter points
            match (*t.numer(), *t.denom()) {
                (0, _) => return Complex64::new(1.0, 0.0),
                (1, 4) => return Complex64::new(0.0, 1.0),
                (1, 2) => return Complex64::new(-1.0, 0.0),
                (3, 4) => return Complex64::new(0.0, -1.0),
                _ => {}
            }
        }
        Complex64::from_polar(1.0, self.radians)
    }

    pub fn conj(&self) -> Self {
        match self.turns {
            Some(t) => Self::from_turns(-t),
            None => Self::from_radians(-self.radians),
        }
    }

    /// `ω · exp(iδ)`; exactness is lost.
    pub fn rotated(&self, delta: f64) -> Self {
        Self::from_radians(self.radians + delta)
    }

    pub fn pow(&self, m: u32) -> Self {
        match self.turns {
            Some(t) => Self::from_turns(t * Turns::from_integer(i64::from(m))),
            None => Self::from_radians(self.radians * f64::from(m)),
        }
    }

    /// All `m` points `ω` with `ω^m = self`, in increasing angle.
    pub fn roots(&self, m: u32) -> Vec<Self> {
        let m = i64::from(m.max(1));
        match self.turns {
            Some(t) => (0..m)
                .map(|k| Self::from_turns((t + Turns::from_integer(k)) / m))
                .collect(),
            None => (0..m)
                .map(|k| Self::from_radians((self.radians + TAU * k as f64) / m as f64))
                .collect(),
        }
    }

    /// Angular distance in `[0, π]`.
    pub fn distance(&self, other: &Self) -> f64 {
        angular_distance(self.radians, other.radians)
    }

    pub fn is_one(&self) -> bool {
        match self.turns {
            Some(t) => t.is_zero(),
            None => self.radians == 0.0,
        }
    }
}

impl fmt::Display for UnitCirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.turns {
            Some(t) => write!(f, "{}/{} turn", t.numer(), t.denom()),
            None => write!(f, "{:.12} rad", self.radians),
        }
    }
}

/// Serialized as the pair `(radians, "p/q")` so reports stay exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleRecord {
    pub radians: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub turns: Option<String>,
}

impl From<&UnitCirclePoint> for AngleRecord {
    fn from(p: &UnitCirclePoint) -> Self {
        Self {
            radians: p.radians,
            turns: p.turns.map(|t| format!("{}/{}", t.numer(), t.denom())),
        }
    }
}

pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn reduce_turns(t: Turns) -> Turns {
    let fl = t.floor();
    t - fl
}

/// Smallest-denominator rational within `tol` of `x`, reduced mod 1.
pub fn rational_turns(x: f64, max_den: i64, tol: f64) -> Option<Turns> {
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= tol {
            return Some(reduce_turns(Turns::new(p as i64, q)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity_are_exact() {
        let roots = UnitCirclePoint::one().roots(4);
        let turns: Vec<_> = roots.iter().map(|r| r.turns().unwrap()).collect();
        assert_eq!(
            turns,
            vec![
                Turns::new(0, 1),
                Turns::new(1, 4),
                Turns::new(1, 2),
                Turns::new(3, 4)
            ]
        );
        for r in &roots {
            assert!(r.pow(4).is_one());
        }
    }

    #[test]
    fn snapping_recognises_small_denominators() {
        let p = UnitCirclePoint::snapped(2.0 * PI / 3.0 + 1e-13);
        assert_eq!(p.turns(), Some(Turns::new(1, 3)));
        let q = UnitCirclePoint::snapped(TAU - 1e-12);
        assert!(q.is_one());
        let r = UnitCirclePoint::snapped(1.0);
        assert!(!r.is_exact());
    }

    #[test]
    fn conjugate_and_distance() {
        let w = UnitCirclePoint::from_fraction(1, 3);
        assert_eq!(w.conj().turns(), Some(Turns::new(2, 3)));
        assert!((w.distance(&w.conj()) - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((UnitCirclePoint::from_radians(-0.1).signed_radians() + 0.1).abs() < 1e-12);
    }
}
