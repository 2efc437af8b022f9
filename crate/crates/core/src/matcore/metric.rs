use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance between matrix indices, used for generalized banding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMetric {
    n: usize,
    source: MetricSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetricSource {
    /// `|i - j|`.
    Index,
    /// Euclidean distance between points, row-major `n x dim`.
    Points { dim: usize, coords: Vec<f64> },
    /// Explicit row-major `n x n` distance table.
    Table(Vec<f64>),
}

impl IndexMetric {
    pub fn index(n: usize) -> Self {
        Self {
            n,
            source: MetricSource::Index,
        }
    }

    pub fn points(n: usize, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() != n * dim {
            return Err(Error::InvalidMetric(format!(
                "expected {n} points of dimension {dim}, got {} coordinates",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n,
            source: MetricSource::Points { dim, coords },
        })
    }

    /// Validates symmetry, zero diagonal, non-negativity and the triangle
    /// inequality (with 1e-12 relative slack).
    pub fn table(n: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "distance table needs {} entries, got {}",
                n * n,
                table.len()
            )));
        }
        let at = |i: usize, j: usize| table[i * n + j];
        let scale = table.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let slack = 1e-12 * scale;
        for i in 0..n {
            if at(i, i) != 0.0 {
                return Err(Error::InvalidMetric(format!("rho({i},{i}) != 0")));
            }
            for j in 0..n {
                let v = at(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "rho({i},{j}) = {v} is not a non-negative number"
                    )));
                }
                if v != at(j, i) {
                    return Err(Error::InvalidMetric(format!("rho({i},{j}) != rho({j},{i})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if at(i, j) > at(i, l) + at(l, j) + slack {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{l},{j})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            n,
            source: MetricSource::Table(table),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn source(&self) -> &MetricSource {
        &self.source
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.source {
            MetricSource::Index => i.abs_diff(j) as f64,
            MetricSource::Points { dim, coords } => {
                let (a, b) = (&coords[i * dim..(i + 1) * dim], &coords[j * dim..(j + 1) * dim]);
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
            MetricSource::Table(t) => t[i * self.n + j],
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }

    /// Integer shell of a distance: `0` for `rho = 0`, otherwise the `r`
    /// with `rho` in `(r - 1, r]`.
    pub fn shell(rho: f64) -> u64 {
        rho.ceil() as u64
    }

    pub(crate) fn check_size(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::MetricMismatch {
                metric: self.n,
                matrix: n,
            });
        }
        Ok(())
    }
}
