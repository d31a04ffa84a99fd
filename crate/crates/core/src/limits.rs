use crate::{Error, Result};

/// Size ceilings guarding every enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: u128,
    pub max_pairs: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 100_000,
            max_pairs: 10_000_000,
        }
    }
}

impl Limits {
    pub const ENV_VAR: &'static str = "UMBELKIT_CEILING";

    pub fn unlimited() -> Self {
        Limits {
            max_vertices: u128::MAX,
            max_pairs: u128::MAX,
        }
    }

    /// Reads `UMBELKIT_CEILING` as `VERTICES` or `VERTICES,PAIRS`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(raw) => Self::parse(&raw),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn parse(raw: &str) -> Result<Self> {
        let mut limits = Self::default();
        let mut parts = raw.split(',').map(str::trim);
        let bad = || Error::param(format!("cannot parse ceiling {raw:?}"));
        if let Some(v) = parts.next() {
            limits.max_vertices = v.parse().map_err(|_| bad())?;
        }
        if let Some(p) = parts.next() {
            limits.max_pairs = p.parse().map_err(|_| bad())?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(limits)
    }

    pub fn check_vertices(&self, n: u128) -> Result<()> {
        if n > self.max_vertices {
            return Err(Error::SizeCeiling {
                what: "vertex count",
                requested: n,
                limit: self.max_vertices,
            });
        }
        Ok(())
    }

    pub fn check_pairs(&self, n: u128) -> Result<()> {
        if n > self.max_pairs {
            return Err(Error::SizeCeiling {
                what: "pair count",
                requested: n,
                limit: self.max_pairs,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_env_formats() {
        assert_eq!(Limits::parse("10").unwrap().max_vertices, 10);
        let l = Limits::parse("10, 20").unwrap();
        assert_eq!((l.max_vertices, l.max_pairs), (10, 20));
        assert!(Limits::parse("x").is_err());
        assert!(Limits::parse("1,2,3").is_err());
    }

    #[test]
    fn guards() {
        let l = Limits::parse("5,7").unwrap();
        assert!(l.check_vertices(5).is_ok());
        assert!(matches!(l.check_vertices(6), Err(Error::SizeCeiling { .. })));
        assert!(l.check_pairs(8).is_err());
    }
}
