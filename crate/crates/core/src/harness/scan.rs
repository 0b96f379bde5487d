use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::series::Majorant;
use crate::zoo::mobius_extremal;

/// Truncation degree of the extremal series; its tail at `r ≤ 1/2` is far
/// below double precision for every `a < 1`.
pub const SCAN_DEGREE: usize = 256;

/// Accepted distance between the located threshold and `1/(1 + 2a)`.
pub const THRESHOLD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub r: f64,
    pub lo: f64,
    pub hi: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessScan {
    pub a: f64,
    pub rows: Vec<ScanRow>,
    /// First grid radius with a certified `M_r > 1`.
    pub first_exceed: Option<f64>,
    /// Crossing of `M_r = 1` refined by bisection, if the range brackets it.
    pub threshold: Option<f64>,
    /// Closed form `1/(1 + 2a)`.
    pub predicted: f64,
    pub pass: bool,
}

/// Tabulates `M_r` of `(a + z)/(1 + a z)` on `steps` equispaced radii in
/// `[rmin, rmax]` and locates where it first exceeds one.
///
/// Passes when the bisected threshold lies within [`THRESHOLD_TOL`] of
/// `1/(1 + 2a)`.
pub fn run_sharpness_scan(a: f64, rmin: f64, rmax: f64, steps: usize) -> Result<SharpnessScan> {
    if !(0.0..1.0).contains(&rmin) || !(rmin < rmax && rmax < 1.0) {
        return Err(invalid(format!("need 0 <= rmin < rmax < 1, got [{rmin}, {rmax}]")));
    }
    if steps < 2 {
        return Err(invalid("scan needs at least two steps"));
    }
    let f = mobius_extremal(a, SCAN_DEGREE)?;
    let m = f.as_matrix_series().majorant()?;
    let rows = (0..steps)
        .map(|i| {
            let r = rmin + (rmax - rmin) * i as f64 / (steps - 1) as f64;
            let s = m.bohr_sum(r)?;
            Ok(ScanRow {
                r,
                lo: s.lo(),
                hi: s.hi(),
                exceeds: s.lo() > 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = rows.iter().position(|row| row.exceeds);
    let threshold = match first {
        Some(0) | None => None,
        Some(i) if rows[i - 1].hi <= 1.0 => Some(bisect_threshold(&m, rows[i - 1].r, rows[i].r)?),
        Some(_) => None,
    };
    let predicted = 1.0 / (1.0 + 2.0 * a);
    Ok(SharpnessScan {
        a,
        first_exceed: first.map(|i| rows[i].r),
        threshold,
        predicted,
        pass: threshold.is_some_and(|t| (t - predicted).abs() <= THRESHOLD_TOL),
        rows,
    })
}

/// Shrinks `[lo, hi]` with `M_lo ≤ 1 < M_hi` until it no longer splits.
fn bisect_threshold(m: &Majorant, mut lo: f64, mut hi: f64) -> Result<f64> {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(0.5 * (lo + hi));
        }
        if m.bohr_sum(mid)?.lo() > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTrend {
    pub scans: Vec<SharpnessScan>,
    /// Thresholds strictly decrease with `a` and stay above `1/3`.
    pub decreasing_to_third: bool,
    pub pass: bool,
}

/// Scans each `a` (in increasing order) and checks that the thresholds
/// approach `1/3` from above.
pub fn threshold_trend(values: &[f64], rmin: f64, rmax: f64, steps: usize) -> Result<ThresholdTrend> {
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    let scans = values
        .iter()
        .map(|&a| run_sharpness_scan(a, rmin, rmax, steps))
        .collect::<Result<Vec<_>>>()?;
    let thresholds: Vec<Option<f64>> = scans.iter().map(|s| s.threshold).collect();
    let decreasing_to_third = thresholds.iter().all(|t| t.is_some_and(|t| t > 1.0 / 3.0))
        && thresholds.windows(2).all(|w| w[1] < w[0]);
    let pass = decreasing_to_third && scans.iter().all(|s| s.pass);
    Ok(ThresholdTrend {
        scans,
        decreasing_to_third,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_threshold() {
        let s = run_sharpness_scan(0.5, 0.3, 0.6, 31).unwrap();
        assert!(s.pass);
        assert!((s.threshold.unwrap() - 0.5).abs() < 1e-12);
        // M_{1/3} = 0.5 + 0.75 (1/3)/(1 − 1/6) = 0.8
        let row = s.rows.iter().find(|r| (r.r - 0.3).abs() < 1e-15).unwrap();
        assert!(row.lo < 1.0);
        let m = mobius_extremal(0.5, SCAN_DEGREE).unwrap().bohr_sum(1.0 / 3.0).unwrap();
        assert!((m.lo() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn near_one() {
        let s = run_sharpness_scan(0.99, 0.3, 0.34, 41).unwrap();
        assert!(s.first_exceed.unwrap() <= 0.34);
        assert!((s.predicted - 1.0 / 2.98).abs() < 1e-15);
        assert!(s.pass);
    }

    #[test]
    fn range_without_crossing() {
        let s = run_sharpness_scan(0.5, 0.1, 0.4, 10).unwrap();
        assert!(s.first_exceed.is_none());
        assert!(!s.pass);
        assert!(run_sharpness_scan(0.5, 0.4, 0.1, 10).is_err());
        assert!(run_sharpness_scan(1.0, 0.1, 0.4, 10).is_err());
    }

    #[test]
    fn trend() {
        let t = threshold_trend(&[0.999, 0.9, 0.99], 0.3, 0.4, 101).unwrap();
        assert!(t.pass);
        assert_eq!(t.scans[0].a, 0.9);
    }
}
