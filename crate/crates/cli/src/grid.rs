//! Grid arguments: comma lists (`0,0.25,0.5`) or inclusive ranges (`start:stop:count`).

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

fn err(msg: impl Into<String>) -> GridError {
    GridError(msg.into())
}

/// Real grid, sorted ascending with duplicates removed.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid(pub Vec<f64>);

impl std::str::FromStr for RealGrid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(err("grid is empty"));
        }
        let mut values = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').map(str::trim).collect();
            let [start, stop, count] = parts[..] else {
                return Err(err(format!("range `{s}` must have the form start:stop:count")));
            };
            let start: f64 = parse_real(start)?;
            let stop: f64 = parse_real(stop)?;
            let count: usize = count.parse().map_err(|_| err(format!("bad point count `{count}`")))?;
            match count {
                0 => return Err(err("range needs at least one point")),
                1 => vec![start],
                _ => (0..count)
                    .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                    .collect(),
            }
        } else {
            s.split(',').map(|p| parse_real(p.trim())).collect::<Result<Vec<_>, _>>()?
        };
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(RealGrid(values))
    }
}

fn parse_real(s: &str) -> Result<f64, GridError> {
    let v: f64 = s.parse().map_err(|_| err(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(format!("`{s}` is not finite")));
    }
    Ok(v)
}

impl RealGrid {
    /// Rejects any point outside `[lo, hi]`, with open ends where requested.
    pub fn check(&self, name: &str, lo: f64, hi: f64, open_lo: bool, open_hi: bool) -> Result<&[f64], GridError> {
        for &v in &self.0 {
            let below = if open_lo { v <= lo } else { v < lo };
            let above = if open_hi { v >= hi } else { v > hi };
            if below || above {
                let l = if open_lo { '(' } else { '[' };
                let h = if open_hi { ')' } else { ']' };
                return Err(err(format!("{name} value {v} outside {l}{lo}, {hi}{h}")));
            }
        }
        Ok(&self.0)
    }
}

/// Integer grid: `2,3,5` or the inclusive range `2:5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimGrid(pub Vec<usize>);

impl std::str::FromStr for DimGrid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(err("dimension list is empty"));
        }
        let parse = |p: &str| -> Result<usize, GridError> {
            p.trim().parse().map_err(|_| err(format!("`{p}` is not a dimension")))
        };
        let mut values = if let Some((a, b)) = s.split_once(':') {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(err(format!("empty dimension range {a}:{b}")));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
        };
        values.sort_unstable();
        values.dedup();
        Ok(DimGrid(values))
    }
}

impl DimGrid {
    pub fn check_min(&self, name: &str, min: usize) -> Result<&[usize], GridError> {
        match self.0.iter().find(|&&v| v < min) {
            Some(v) => Err(err(format!("{name} = {v} is below the minimum {min}"))),
            None => Ok(&self.0),
        }
    }
}
