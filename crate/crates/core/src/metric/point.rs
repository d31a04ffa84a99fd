use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Coordinate of the sparse sequence space: a level tag and an index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoordinateKey {
    pub level: u32,
    pub index: u64,
}

impl CoordinateKey {
    pub fn new(level: u32, index: u64) -> Self {
        CoordinateKey { level, index }
    }
}

impl fmt::Display for CoordinateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.level, self.index)
    }
}

impl FromStr for CoordinateKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("malformed coordinate key {s:?}"));
        let (l, i) = s.split_once(',').ok_or_else(bad)?;
        Ok(CoordinateKey {
            level: l.trim().parse().map_err(|_| bad())?,
            index: i.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// A finitely supported real sequence. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparsePoint {
    coords: BTreeMap<CoordinateKey, f64>,
}

impl SparsePoint {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(key: CoordinateKey) -> Self {
        let mut p = Self::zero();
        p.set(key, 1.0);
        p
    }

    /// A point of `R^n` placed on level 0.
    pub fn from_dense(values: &[f64]) -> Self {
        let mut p = Self::zero();
        for (i, &v) in values.iter().enumerate() {
            p.set(CoordinateKey::new(0, i as u64), v);
        }
        p
    }

    pub fn get(&self, key: CoordinateKey) -> f64 {
        self.coords.get(&key).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, key: CoordinateKey, value: f64) {
        if value == 0.0 {
            self.coords.remove(&key);
        } else {
            self.coords.insert(key, value);
        }
    }

    pub fn add(&mut self, key: CoordinateKey, value: f64) {
        let v = self.get(key) + value;
        self.set(key, v);
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CoordinateKey, f64)> + '_ {
        self.coords.iter().map(|(&k, &v)| (k, v))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::zero();
        for (k, v) in self.iter() {
            out.set(k, v * factor);
        }
        out
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        lp_distance(self, &SparsePoint::zero(), norm)
    }
}

impl Serialize for SparsePoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(String, f64)> = self.iter().map(|(k, v)| (k.to_string(), v)).collect();
        entries.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SparsePoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<(String, f64)>::deserialize(de)?;
        let mut p = SparsePoint::zero();
        for (k, v) in entries {
            let key: CoordinateKey = k.parse().map_err(serde::de::Error::custom)?;
            if !v.is_finite() {
                return Err(serde::de::Error::custom("non-finite coordinate"));
            }
            p.add(key, v);
        }
        Ok(p)
    }
}

/// The exponent of an `l_p` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Norm {
    P(f64),
    Inf,
}

impl Norm {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Norm::Inf)
        } else if p.is_nan() || p < 1.0 {
            Err(Error::param(format!("norm exponent must be at least 1, got {p}")))
        } else {
            Ok(Norm::P(p))
        }
    }

    /// The finite exponent; errors for the sup norm.
    pub fn finite(self) -> Result<f64> {
        match self {
            Norm::P(p) => Ok(p),
            Norm::Inf => Err(Error::param("a finite exponent is required here")),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::P(p) => write!(f, "{p}"),
            Norm::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "INF" | "infinity" => Ok(Norm::Inf),
            other => Norm::new(
                other
                    .parse()
                    .map_err(|_| Error::param(format!("bad norm exponent {other:?}")))?,
            ),
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Norm::P(p) => ser.serialize_f64(*p),
            Norm::Inf => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(p) => Norm::new(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// `||x - y||_p` over the union of the supports.
pub fn lp_distance(x: &SparsePoint, y: &SparsePoint, norm: Norm) -> f64 {
    let mut diffs = Vec::with_capacity(x.support_len() + y.support_len());
    let mut a = x.coords.iter().peekable();
    let mut b = y.coords.iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (Some((ka, va)), Some((kb, vb))) => match ka.cmp(kb) {
                std::cmp::Ordering::Less => {
                    diffs.push(va.abs());
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    diffs.push(vb.abs());
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    diffs.push((*va - *vb).abs());
                    a.next();
                    b.next();
                }
            },
            (Some((_, va)), None) => {
                diffs.push(va.abs());
                a.next();
            }
            (None, Some((_, vb))) => {
                diffs.push(vb.abs());
                b.next();
            }
            (None, None) => break,
        }
    }
    match norm {
        Norm::Inf => diffs.into_iter().fold(0.0, f64::max),
        Norm::P(1.0) => diffs.into_iter().sum(),
        Norm::P(2.0) => diffs.into_iter().map(|d| d * d).sum::<f64>().sqrt(),
        Norm::P(p) => diffs.into_iter().map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p),
    }
}
