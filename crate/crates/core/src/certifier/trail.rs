use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::metric::{Distances, EmbeddingTable};
use crate::{Error, Result};

/// A replayable expression over the distances of an embedding table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Quantity {
    Const { value: f64 },
    /// Raw `d_X(a, b)`.
    Dist { a: String, b: String },
    /// `d_X(a, b) / lambda`.
    NDist { a: String, b: String },
    /// The certificate's `lambda`.
    Lambda,
    Scale { by: f64, of: Box<Quantity> },
    Pow { base: Box<Quantity>, exp: f64 },
    Sum { terms: Vec<Quantity> },
    Min { terms: Vec<Quantity> },
    Max { terms: Vec<Quantity> },
}

impl Quantity {
    pub fn constant(value: f64) -> Self {
        Quantity::Const { value }
    }

    pub fn scale(self, by: f64) -> Self {
        Quantity::Scale {
            by,
            of: Box::new(self),
        }
    }

    pub fn pow(self, exp: f64) -> Self {
        Quantity::Pow {
            base: Box::new(self),
            exp,
        }
    }

    /// Homogeneity degree in distance units.
    pub fn degree(&self) -> f64 {
        match self {
            Quantity::Const { .. } | Quantity::NDist { .. } => 0.0,
            Quantity::Dist { .. } | Quantity::Lambda => 1.0,
            Quantity::Scale { of, .. } => of.degree(),
            Quantity::Pow { base, exp } => base.degree() * exp,
            Quantity::Sum { terms } | Quantity::Min { terms } | Quantity::Max { terms } => {
                terms.iter().map(Quantity::degree).fold(0.0, f64::max)
            }
        }
    }

    pub fn eval(&self, ctx: &EvalContext) -> Result<f64> {
        Ok(match self {
            Quantity::Const { value } => *value,
            Quantity::Dist { a, b } => ctx.dist(a, b)?,
            Quantity::NDist { a, b } => ctx.dist(a, b)? / ctx.lambda,
            Quantity::Lambda => ctx.lambda,
            Quantity::Scale { by, of } => by * of.eval(ctx)?,
            Quantity::Pow { base, exp } => base.eval(ctx)?.powf(*exp),
            Quantity::Sum { terms } => terms.iter().map(|t| t.eval(ctx)).sum::<Result<f64>>()?,
            Quantity::Min { terms } => terms
                .iter()
                .map(|t| t.eval(ctx))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min),
            Quantity::Max { terms } => terms
                .iter()
                .map(|t| t.eval(ctx))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Distances looked up by vertex id.
pub struct EvalContext<'a> {
    table: &'a EmbeddingTable,
    index: HashMap<&'a str, usize>,
    lambda: f64,
}

impl<'a> EvalContext<'a> {
    pub fn new(table: &'a EmbeddingTable, lambda: f64) -> Self {
        let index = table
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        EvalContext {
            table,
            index,
            lambda,
        }
    }

    fn dist(&self, a: &str, b: &str) -> Result<f64> {
        let lookup = |id: &str| {
            self.index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Mismatch(format!("no point for vertex {id}")))
        };
        Ok(self.table.dist(lookup(a)?, lookup(b)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
}

/// Relative tolerance of trail comparisons and replays.
pub const TRAIL_TOLERANCE: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= TRAIL_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs || close(lhs, rhs),
            Relation::Lt => lhs < rhs,
            Relation::Eq => close(lhs, rhs),
        }
    }
}

/// One recorded inequality: its values as the pipeline computed them and the
/// expressions that recompute them from the table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub source: String,
    pub holds: bool,
    pub lhs_expr: Quantity,
    pub rhs_expr: Quantity,
}

impl TrailEntry {
    pub fn new(
        lhs: (f64, Quantity),
        relation: Relation,
        rhs: (f64, Quantity),
        source: impl Into<String>,
    ) -> Self {
        TrailEntry {
            lhs: lhs.0,
            relation,
            rhs: rhs.0,
            source: source.into(),
            holds: relation.holds(lhs.0, rhs.0),
            lhs_expr: lhs.1,
            rhs_expr: rhs.1,
        }
    }

    /// Whether both sides re-evaluate to the recorded values and the
    /// relation has the recorded outcome.
    pub fn replays(&self, ctx: &EvalContext) -> Result<bool> {
        let lhs = self.lhs_expr.eval(ctx)?;
        let rhs = self.rhs_expr.eval(ctx)?;
        Ok(close(lhs, self.lhs) && close(rhs, self.rhs) && self.relation.holds(lhs, rhs) == self.holds)
    }

    pub fn rescaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.lhs *= factor.powf(self.lhs_expr.degree());
        out.rhs *= factor.powf(self.rhs_expr.degree());
        out
    }
}
