//! Half-integer angular momentum labels stored as doubled integers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest spin accepted for particle labels.
pub const MAX_PARTICLE_SPIN_TWICE: u32 = 4;

/// A non-negative half-integer `j`, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);

    pub fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    /// Parses a real value that must be a non-negative multiple of one half.
    pub fn new(value: f64) -> Result<Self> {
        let twice = twice_of(value)?;
        if twice < 0 {
            return Err(Error::InvalidParameter(format!("negative spin {value}")));
        }
        Ok(Spin(twice as u32))
    }

    /// Particle spins are capped at 2.
    pub fn particle(value: f64) -> Result<Self> {
        let s = Self::new(value)?;
        if s.0 > MAX_PARTICLE_SPIN_TWICE {
            return Err(Error::InvalidParameter(format!("spin {value} exceeds cap of 2")));
        }
        Ok(s)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Multiplicity `2j + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Doubled projections `2m`, ordered `m = j, j-1, ..., -j`.
    pub fn twice_projections(self) -> impl Iterator<Item = i32> {
        let j2 = self.0 as i32;
        (0..=j2).map(move |i| j2 - 2 * i)
    }

    /// Index of the doubled projection `2m` in the descending ordering.
    pub fn index_of(self, twice_m: i32) -> Option<usize> {
        let j2 = self.0 as i32;
        if twice_m.abs() > j2 || (j2 - twice_m) % 2 != 0 {
            return None;
        }
        Some(((j2 - twice_m) / 2) as usize)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Spin::particle(v).map_err(serde::de::Error::custom)
    }
}

/// Doubles a real number that must be an integer multiple of 1/2.
pub fn twice_of(value: f64) -> Result<i32> {
    let t = (2.0 * value).round();
    if !value.is_finite() || (2.0 * value - t).abs() > 1e-9 || t.abs() > 1e6 {
        return Err(Error::InvalidParameter(format!("{value} is not a half-integer")));
    }
    Ok(t as i32)
}
