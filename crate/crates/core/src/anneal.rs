//! Linear interpolation `H(s) = (1 - s) H0 + s Hp` and spectral-gap scans.
//!
//! Both the first gap and the gap to the second excited level are kept:
//! problem Hamiltonians with a global-flip symmetry have a doubly degenerate
//! ground space at `s = 1`, so the first gap closes there by symmetry.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::OperatorMatrix;
use crate::spectra::{self, fmt12, DEFAULT_DIM_CAP};

pub const DEFAULT_GRID_POINTS: usize = 101;

pub fn interpolate(h0: &OperatorMatrix, hp: &OperatorMatrix, s: f64) -> Result<OperatorMatrix> {
    if h0.dim() != hp.dim() {
        return Err(Error::DimensionMismatch { expected: h0.dim(), found: hp.dim() });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidSchedule(format!("s = {s} outside [0, 1]")));
    }
    OperatorMatrix::linear_combination(1.0 - s, h0, s, hp)
}

/// `points` uniformly spaced values from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    let last = points.saturating_sub(1).max(1) as f64;
    (0..points).map(|k| if k + 1 == points { 1.0 } else { k as f64 / last }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub s: f64,
    pub gap01: f64,
    pub gap02: f64,
    /// The three lowest eigenvalues at `s`.
    pub low: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub value: f64,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScan {
    pub records: Vec<GapRecord>,
    pub min_gap01: GapMinimum,
    pub min_gap02: GapMinimum,
}

#[derive(Serialize)]
pub struct GapSummary {
    pub points: usize,
    pub min_gap01: GapMinimum,
    pub min_gap02: GapMinimum,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidSchedule(format!("grid needs at least 3 points, got {}", grid.len())));
    }
    if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
        return Err(Error::InvalidSchedule("grid must start at 0 and end at 1".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule("grid must be strictly increasing".into()));
    }
    Ok(())
}

pub fn gap_scan(h0: &OperatorMatrix, hp: &OperatorMatrix, grid: &[f64]) -> Result<GapScan> {
    gap_scan_with_cap(h0, hp, grid, DEFAULT_DIM_CAP)
}

/// Diagonalizes `H(s)` at every grid point and records the two low gaps.
pub fn gap_scan_with_cap(
    h0: &OperatorMatrix,
    hp: &OperatorMatrix,
    grid: &[f64],
    cap: usize,
) -> Result<GapScan> {
    check_grid(grid)?;
    if h0.dim() < 3 {
        return Err(Error::InvalidSchedule("need at least three levels to report gap02".into()));
    }
    let records = grid
        .par_iter()
        .map(|&s| {
            let at = |e: Error| Error::AtSchedulePoint { s, source: Box::new(e) };
            let h = interpolate(h0, hp, s).map_err(at)?;
            let ev = spectra::eigenvalues(&h, cap).map_err(at)?;
            Ok(GapRecord { s, gap01: ev[1] - ev[0], gap02: ev[2] - ev[0], low: [ev[0], ev[1], ev[2]] })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_by = |f: fn(&GapRecord) -> f64| {
        records
            .iter()
            .map(|r| GapMinimum { value: f(r), s: r.s })
            .reduce(|a, b| if b.value < a.value { b } else { a })
            .expect("grid is nonempty")
    };
    let min_gap01 = min_by(|r| r.gap01);
    let min_gap02 = min_by(|r| r.gap02);
    Ok(GapScan { records, min_gap01, min_gap02 })
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    s: String,
    gap01: String,
    gap02: String,
}

impl GapScan {
    pub fn summary(&self) -> GapSummary {
        GapSummary { points: self.records.len(), min_gap01: self.min_gap01, min_gap02: self.min_gap02 }
    }

    /// CSV with header `s,gap01,gap02`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(CsvRow { s: fmt12(r.s), gap01: fmt12(r.gap01), gap02: fmt12(r.gap02) })
                .map_err(spectra::csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{build_h0_transverse, build_hp, build_ising};
    use crate::sat::{Clause, Instance};

    #[test]
    fn endpoints_and_midpoint() {
        let h0 = build_h0_transverse(3);
        let hp = build_ising(3);
        let a = interpolate(&h0, &hp, 0.0).unwrap();
        let b = interpolate(&h0, &hp, 1.0).unwrap();
        let m = interpolate(&h0, &hp, 0.5).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(a.get(r, c), h0.get(r, c));
                assert_eq!(b.get(r, c), hp.get(r, c));
                assert_eq!(m.get(r, c), 0.5 * h0.get(r, c) + 0.5 * hp.get(r, c));
            }
        }
        assert!(m.is_symmetric());
    }

    #[test]
    fn interpolate_errors() {
        let h0 = build_h0_transverse(3);
        assert!(interpolate(&h0, &build_h0_transverse(2), 0.5).is_err());
        assert!(interpolate(&h0, &h0, 1.5).is_err());
        assert!(interpolate(&h0, &h0, -0.1).is_err());
    }

    #[test]
    fn grid_validation() {
        let h0 = build_h0_transverse(2);
        assert!(gap_scan(&h0, &h0, &[0.0, 1.0]).is_err());
        assert!(gap_scan(&h0, &h0, &[0.0, 0.6, 0.5, 1.0]).is_err());
        assert!(gap_scan(&h0, &h0, &[0.1, 0.5, 1.0]).is_err());
        assert_eq!(uniform_grid(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn constant_path_has_constant_gaps() {
        let h = build_ising(3);
        let scan = gap_scan(&h, &h, &uniform_grid(7)).unwrap();
        let first = &scan.records[0];
        for r in &scan.records {
            assert!((r.gap01 - first.gap01).abs() < 1e-12);
            assert!((r.gap02 - first.gap02).abs() < 1e-12);
        }
    }

    #[test]
    fn driver_and_problem_endpoints() {
        // six solutions, so the problem end is sixfold degenerate
        let inst = Instance::new(3, vec![Clause::new(1, 2, 3).unwrap()]).unwrap();
        let scan = gap_scan(&build_h0_transverse(3), &build_hp(&inst), &uniform_grid(11)).unwrap();
        assert_eq!(scan.records.len(), 11);
        assert!((scan.records[0].gap01 - 1.0).abs() < 1e-10);
        let end = scan.records.last().unwrap();
        assert_eq!(end.s, 1.0);
        assert!(end.gap01.abs() <= 1e-10);
        assert!(end.gap02.abs() <= 1e-10);
        assert!(scan.min_gap02.value <= 1e-10);
    }

    #[test]
    fn csv_layout() {
        let h = build_h0_transverse(2);
        let scan = gap_scan(&h, &h, &uniform_grid(3)).unwrap();
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,gap01,gap02");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.00000000000e0,"));
    }
}
