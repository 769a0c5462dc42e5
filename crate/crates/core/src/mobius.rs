//! Points of the Riemann sphere and Möbius transformations.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::C64;

use std::fmt;

/// Chordal distance below which two sphere points count as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtPoint {
    Finite(C64),
    Infinity,
}

impl ExtPoint {
    pub fn new(re: f64, im: f64) -> Self {
        ExtPoint::Finite(C64::new(re, im))
    }

    pub fn finite(self) -> Option<C64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }

    /// Chordal distance on the unit-diameter sphere, at most 1.
    pub fn chordal(self, other: ExtPoint) -> f64 {
        match (self, other) {
            (ExtPoint::Infinity, ExtPoint::Infinity) => 0.0,
            (ExtPoint::Finite(z), ExtPoint::Infinity) | (ExtPoint::Infinity, ExtPoint::Finite(z)) => {
                1.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (ExtPoint::Finite(z), ExtPoint::Finite(w)) => {
                (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<C64> for ExtPoint {
    fn from(z: C64) -> Self {
        ExtPoint::Finite(z)
    }
}

impl Serialize for ExtPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtPoint::Infinity => s.serialize_str("infinity"),
            ExtPoint::Finite(z) => {
                let mut t = s.serialize_tuple(2)?;
                t.serialize_element(&z.re)?;
                t.serialize_element(&z.im)?;
                t.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ExtPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ExtPoint;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("[re, im] or \"infinity\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtPoint, E> {
                match v {
                    "infinity" | "inf" => Ok(ExtPoint::Infinity),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }

            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<ExtPoint, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                if !re.is_finite() || !im.is_finite() {
                    return Err(de::Error::custom("non-finite coordinate"));
                }
                Ok(ExtPoint::new(re, im))
            }
        }
        d.deserialize_any(V)
    }
}

/// `z -> (a z + b) / (c z + d)` with `ad - bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::Conditioning("Mobius determinant vanishes".into()));
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn affine(scale: C64, shift: C64) -> Result<Self> {
        Self::new(scale, shift, C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn apply(&self, p: ExtPoint) -> ExtPoint {
        match p {
            ExtPoint::Infinity => {
                if self.c.norm() == 0.0 {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
            ExtPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `self o other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Derivative at a finite point with finite image.
    pub fn derivative(&self, z: C64) -> C64 {
        let den = self.c * z + self.d;
        1.0 / (den * den)
    }

    /// Sends `z1, z2, z3` to `0, 1, infinity`:
    /// `T(z) = (z - z1)(z2 - z3) / ((z - z3)(z2 - z1))`.
    pub fn to_zero_one_infinity(z1: ExtPoint, z2: ExtPoint, z3: ExtPoint) -> Result<Self> {
        for (p, q) in [(z1, z2), (z1, z3), (z2, z3)] {
            if p.chordal(q) < COINCIDENCE_TOL {
                return Err(Error::Conditioning("normalizing points coincide".into()));
            }
        }
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match (z1, z2, z3) {
            (ExtPoint::Infinity, ExtPoint::Finite(b), ExtPoint::Finite(c)) => Self::new(zero, b - c, one, -c),
            (ExtPoint::Finite(a), ExtPoint::Infinity, ExtPoint::Finite(c)) => Self::new(one, -a, one, -c),
            (ExtPoint::Finite(a), ExtPoint::Finite(b), ExtPoint::Infinity) => Self::new(one, -a, zero, b - a),
            (ExtPoint::Finite(a), ExtPoint::Finite(b), ExtPoint::Finite(c)) => {
                Self::new(b - c, -a * (b - c), b - a, -c * (b - a))
            }
            _ => unreachable!("coincidence check excludes two infinities"),
        }
    }

    /// The unique map sending `src[i]` to `dst[i]`.
    pub fn from_triples(src: [ExtPoint; 3], dst: [ExtPoint; 3]) -> Result<Self> {
        let s = Self::to_zero_one_infinity(src[0], src[1], src[2])?;
        let t = Self::to_zero_one_infinity(dst[0], dst[1], dst[2])?;
        Ok(t.inverse().compose(&s))
    }
}
