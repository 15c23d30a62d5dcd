//! Time grids and the textual `kind:start:stop:count` grid specification.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{MsdError, Result};

/// Strictly increasing, nonnegative sample times in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(MsdError::EmptyGrid);
        }
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 || (i > 0 && t <= times[i - 1]) {
                return Err(MsdError::BadGrid { index: i });
            }
        }
        Ok(TimeGrid { times })
    }

    /// `count` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(MsdError::EmptyGrid),
            1 => Self::new(vec![start]),
            _ => {
                let step = (stop - start) / (count - 1) as f64;
                let mut v: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
                v[count - 1] = stop;
                Self::new(v)
            }
        }
    }

    /// `count` log-spaced points from `start` to `stop` inclusive; `start > 0`.
    pub fn geometric(start: f64, stop: f64, count: usize) -> Result<Self> {
        if start.is_nan() || start <= 0.0 {
            return Err(MsdError::invalid("grid", "geometric grid needs start > 0"));
        }
        match count {
            0 => Err(MsdError::EmptyGrid),
            1 => Self::new(vec![start]),
            _ => {
                let ratio = (stop / start).ln() / (count - 1) as f64;
                let mut v: Vec<f64> = (0..count)
                    .map(|i| start * (ratio * i as f64).exp())
                    .collect();
                v[0] = start;
                v[count - 1] = stop;
                Self::new(v)
            }
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Linear,
    Geometric,
}

/// Grid description in units of the thermal time `t_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub const fn linear(start: f64, stop: f64, count: usize) -> Self {
        GridSpec {
            kind: GridKind::Linear,
            start,
            stop,
            count,
        }
    }

    pub const fn geometric(start: f64, stop: f64, count: usize) -> Self {
        GridSpec {
            kind: GridKind::Geometric,
            start,
            stop,
            count,
        }
    }

    /// Materializes the grid in seconds.
    pub fn build(&self, t_b: f64) -> Result<TimeGrid> {
        if (self.start.is_nan() || self.stop.is_nan() || self.stop <= self.start) && self.count > 1
        {
            return Err(MsdError::invalid("grid", "stop must exceed start"));
        }
        match self.kind {
            GridKind::Linear => TimeGrid::linear(self.start * t_b, self.stop * t_b, self.count),
            GridKind::Geometric => {
                TimeGrid::geometric(self.start * t_b, self.stop * t_b, self.count)
            }
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            GridKind::Linear => "linear",
            GridKind::Geometric => "geometric",
        };
        write!(f, "{kind}:{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = MsdError;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || MsdError::invalid("grid", format!("expected kind:start:stop:count, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let kind = match parts[0] {
            "linear" => GridKind::Linear,
            "geometric" => GridKind::Geometric,
            _ => return Err(bad()),
        };
        let start: f64 = parts[1].parse().map_err(|_| bad())?;
        let stop: f64 = parts[2].parse().map_err(|_| bad())?;
        let count: usize = parts[3].parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() || start < 0.0 {
            return Err(bad());
        }
        Ok(GridSpec {
            kind,
            start,
            stop,
            count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let g: GridSpec = "linear:0:30:300".parse().unwrap();
        assert_eq!(g, GridSpec::linear(0.0, 30.0, 300));
        assert_eq!(g.to_string(), "linear:0:30:300");
        let g: GridSpec = "geometric:0.01:100:50".parse().unwrap();
        assert_eq!(g.kind, GridKind::Geometric);
        assert!("cubic:0:1:2".parse::<GridSpec>().is_err());
        assert!("linear:0:1".parse::<GridSpec>().is_err());
        assert!("linear:0:1:0".parse::<GridSpec>().is_err());
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = TimeGrid::linear(0.0, 3.0, 4).unwrap();
        assert_eq!(g.times(), &[0.0, 1.0, 2.0, 3.0]);
        let g = TimeGrid::geometric(1e-2, 1e2, 5).unwrap();
        assert_eq!(g.times()[0], 1e-2);
        assert_eq!(g.times()[4], 1e2);
        assert!((g.times()[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(TimeGrid::new(vec![]), Err(MsdError::EmptyGrid)));
        assert!(matches!(
            TimeGrid::new(vec![0.0, 0.0]),
            Err(MsdError::BadGrid { index: 1 })
        ));
        assert!(matches!(
            TimeGrid::new(vec![-1.0]),
            Err(MsdError::BadGrid { index: 0 })
        ));
        assert!(TimeGrid::geometric(0.0, 1.0, 3).is_err());
    }
}
