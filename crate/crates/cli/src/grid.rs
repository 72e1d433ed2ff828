//! `lo:hi:count,…` grid specifications.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, k: usize) -> f64 {
        if self.count == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (self.count - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn parse(src: &str, dimension: usize) -> Result<Grid, String> {
        if src.trim().is_empty() {
            return Err("empty grid".into());
        }
        let axes = src
            .split(',')
            .map(|part| {
                let fields: Vec<&str> = part.split(':').map(str::trim).collect();
                let [lo, hi, count] = fields[..] else {
                    return Err(format!("grid axis `{part}` is not lo:hi:count"));
                };
                let num = |s: &str| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| format!("`{s}` is not a number"))
                };
                let count: usize = count.parse().map_err(|_| format!("`{count}` is not a count"))?;
                if count == 0 {
                    return Err(format!("grid axis `{part}` has no points"));
                }
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(format!("grid axis `{part}` has lo > hi"));
                }
                Ok(Axis { lo, hi, count })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if axes.len() != dimension {
            return Err(format!("grid has {} axes, metric has dimension {dimension}", axes.len()));
        }
        Ok(Grid { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Point `index` in row-major order (last axis fastest).
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.axes.len()];
        for (slot, axis) in p.iter_mut().zip(&self.axes).rev() {
            *slot = axis.value(index % axis.count);
            index /= axis.count;
        }
        p
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

pub fn parse_point(src: &str, dimension: usize) -> Result<Vec<f64>, String> {
    let p = src
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{s}` is not a coordinate"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if p.len() != dimension {
        return Err(format!("point has {} coordinates, metric has dimension {dimension}", p.len()));
    }
    Ok(p)
}
