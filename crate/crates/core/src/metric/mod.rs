//! Sparse `l_p` points, embedding tables, distortion and compression
//! analyzers, and residual checkers for the umbel and diamond inequalities.

mod analyze;
mod inequality;
mod point;
mod table;

pub use analyze::{compression_curve, distortion, CompressionCurve, CurvePoint, Distortion};
pub(crate) use inequality::min_gap;
pub use inequality::{
    beta_config_check, diamond_inequality_residual, infrasup_umbel_residual, midpoint_set,
    Residual, SpaceParams,
};
pub use point::{lp_distance, CoordinateKey, Norm, SparsePoint};
pub use table::{Distances, EmbeddingTable, PointSet};

use crate::graph::FiniteMetric;
use crate::{Error, Result};

/// Multiplying every distance by a positive factor.
pub trait Rescale: Sized {
    fn rescaled(&self, factor: f64) -> Result<Self>;
}

fn check_factor(factor: f64) -> Result<()> {
    if factor > 0.0 && factor.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("rescale factor must be positive, got {factor}")))
    }
}

impl Rescale for FiniteMetric {
    fn rescaled(&self, factor: f64) -> Result<Self> {
        check_factor(factor)?;
        Ok(self.scaled(factor))
    }
}

impl Rescale for PointSet {
    fn rescaled(&self, factor: f64) -> Result<Self> {
        check_factor(factor)?;
        Ok(PointSet::new(
            self.norm,
            self.points.iter().map(|p| p.scaled(factor)).collect(),
        ))
    }
}

impl Rescale for EmbeddingTable {
    /// Scales the points and `lambda` together so the declared
    /// bi-Lipschitz window follows the image.
    fn rescaled(&self, factor: f64) -> Result<Self> {
        check_factor(factor)?;
        Ok(EmbeddingTable {
            points: self.points.iter().map(|p| p.scaled(factor)).collect(),
            lambda: self.lambda * factor,
            ..self.clone()
        })
    }
}
