use serde::Serialize;
use std::fmt;

use crate::units::PhysicalSystem;

/// How an [`MsdCurve`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    IdealAnalytic,
    ExactSum,
    BreveSum,
    BreveClosed,
    CollisionModel,
    MonteCarlo,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::IdealAnalytic => "ideal-analytic",
            Method::ExactSum => "exact-sum",
            Method::BreveSum => "breve-sum",
            Method::BreveClosed => "breve-closed",
            Method::CollisionModel => "collision-model",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    /// Plateau methods are constant in time and do not start at zero.
    pub fn is_constant(&self) -> bool {
        matches!(self, Method::BreveSum | Method::BreveClosed)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parameters a curve was computed with. Fields that do not apply stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CurveParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<PhysicalSystem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// MSD samples in m^2 on a time grid in s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MsdCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub params: CurveParams,
}

impl MsdCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks the structural invariants: matching lengths, nonnegative values
    /// and a zero start for time-dependent methods.
    pub fn check(&self) -> Result<(), String> {
        if self.times.len() != self.values.len() {
            return Err(format!(
                "length mismatch: {} times vs {} values",
                self.times.len(),
                self.values.len()
            ));
        }
        if let Some(i) = self.values.iter().position(|v| v.is_nan() || *v < 0.0) {
            return Err(format!(
                "negative or NaN value {} at index {i}",
                self.values[i]
            ));
        }
        if !self.method.is_constant() && self.times.first() == Some(&0.0) && self.values[0] != 0.0 {
            return Err(format!("{} curve does not start at zero", self.method));
        }
        Ok(())
    }

    /// Mean of the values whose time lies in `[lo, hi]`.
    pub fn window_mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let v: Vec<f64> = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(_, v)| *v)
            .collect();
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    }

    /// Mean over the last 20% of the grid points, used as the plateau estimate.
    pub fn tail_mean(&self) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        let start = self.len() - (self.len() / 5).max(1);
        let tail = &self.values[start..];
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}
