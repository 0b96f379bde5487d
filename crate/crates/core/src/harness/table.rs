use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::campaign::ReportFormat;
use crate::error::Result;
use crate::radii::{solve_radius, FamilyKind, FamilyParams, PolyOrder, RadiusFamily, RootResult};

/// Parameter grid for [`radius_table`]; each family uses the axes it has.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub k: Vec<f64>,
    pub p: Vec<PolyOrder>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        let mut p: Vec<PolyOrder> = (2..=8).map(PolyOrder::Finite).collect();
        p.push(PolyOrder::Unbounded);
        Self {
            k: vec![0.25, 0.5, 1.0],
            p,
            gamma: vec![0.0, 0.25, 0.5],
            beta: vec![0.5, 1.0, 2.0],
            lambda: vec![0.5, 1.0],
        }
    }
}

impl ParamGrid {
    /// Every family instance on the grid, in a fixed order.
    pub fn families(&self, kinds: &[FamilyKind]) -> Result<Vec<RadiusFamily>> {
        let mut out = Vec::new();
        for &kind in kinds {
            let (extra, set): (&[f64], fn(&mut FamilyParams, f64)) = match kind {
                FamilyKind::GeneralSc => (&self.lambda, |q, v| q.lambda = v),
                FamilyKind::OmegaGamma => (&self.gamma, |q, v| q.gamma = v),
                FamilyKind::ConvexSub => (&self.beta, |q, v| q.beta = v),
                FamilyKind::HalfPlane | FamilyKind::StarlikeSub => (&[f64::NAN], |_, _| {}),
            };
            for &x in extra {
                for &k in &self.k {
                    for &p in &self.p {
                        let mut params = FamilyParams {
                            k,
                            p,
                            ..Default::default()
                        };
                        set(&mut params, x);
                        out.push(kind.with_params(&params)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub family: String,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub k: f64,
    pub p: PolyOrder,
    pub root: Option<f64>,
    pub bracket_lo: Option<f64>,
    pub bracket_hi: Option<f64>,
    pub cap: f64,
    pub radius: f64,
    pub binding: String,
}

impl From<&RootResult> for TableRow {
    fn from(res: &RootResult) -> Self {
        let (lambda, gamma, beta) = match res.family {
            RadiusFamily::GeneralSc { lambda, .. } => (Some(lambda), None, None),
            RadiusFamily::OmegaGamma { gamma, .. } => (None, Some(gamma), None),
            RadiusFamily::ConvexSub { beta, .. } => (None, None, Some(beta)),
            RadiusFamily::HalfPlane { .. } | RadiusFamily::StarlikeSub { .. } => (None, None, None),
        };
        Self {
            family: res.family.tag().to_string(),
            lambda,
            gamma,
            beta,
            k: res.family.k(),
            p: res.family.order(),
            root: res.root,
            bracket_lo: res.bracket.map(|b| b.lo),
            bracket_hi: res.bracket.map(|b| b.hi),
            cap: res.cap,
            radius: res.radius,
            binding: res.binding().to_string(),
        }
    }
}

pub fn radius_table(families: &[RadiusFamily], tol: f64) -> Result<Vec<TableRow>> {
    families
        .iter()
        .map(|f| Ok(TableRow::from(&solve_radius(f, tol)?)))
        .collect()
}

pub fn write_table(rows: &[TableRow], path: &Path, format: ReportFormat) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    match format {
        ReportFormat::Json => fs::write(path, serde_json::to_string_pretty(rows)? + "\n")?,
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record([
                "family", "lambda", "gamma", "beta", "k", "p", "root", "bracket_lo", "bracket_hi", "cap", "radius",
                "binding",
            ])?;
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            for r in rows {
                w.write_record([
                    r.family.clone(),
                    opt(r.lambda),
                    opt(r.gamma),
                    opt(r.beta),
                    r.k.to_string(),
                    r.p.to_string(),
                    opt(r.root),
                    opt(r.bracket_lo),
                    opt(r.bracket_hi),
                    r.cap.to_string(),
                    r.radius.to_string(),
                    r.binding.clone(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radii::DEFAULT_TOL;

    fn row(kind: FamilyKind, params: FamilyParams) -> TableRow {
        let fam = kind.with_params(&params).unwrap();
        radius_table(&[fam], DEFAULT_TOL).unwrap().remove(0)
    }

    #[test]
    fn example_rows() {
        let og = row(FamilyKind::OmegaGamma, FamilyParams::default());
        assert!((og.root.unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-11);
        assert!((og.radius - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(og.binding, "cap");

        let zero_k = row(
            FamilyKind::GeneralSc,
            FamilyParams {
                k: 0.0,
                ..Default::default()
            },
        );
        assert_eq!(zero_k.root, None);
        assert_eq!(zero_k.radius, zero_k.cap);

        let hp = row(FamilyKind::HalfPlane, FamilyParams::default());
        assert_eq!(hp.cap, 0.5);
        let r = hp.root.unwrap();
        assert!((2.0 * (1.0 - r) * (1.0 - r) - r + r.powi(3)).abs() < 1e-11);
    }

    #[test]
    fn grid_size() {
        let grid = ParamGrid::default();
        let fams = grid.families(&FamilyKind::ALL).unwrap();
        // 8 orders × 3 k × (2 λ + 3 γ + 1 + 3 β + 1)
        assert_eq!(fams.len(), 8 * 3 * 10);
    }

    #[test]
    fn writes_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let rows = radius_table(
            &ParamGrid::default().families(&[FamilyKind::StarlikeSub]).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        let csv_path = dir.path().join("t.csv");
        write_table(&rows, &csv_path, ReportFormat::Csv).unwrap();
        let text = fs::read_to_string(&csv_path).unwrap();
        assert_eq!(text.lines().count(), rows.len() + 1);
        let json_path = dir.path().join("t.json");
        write_table(&rows, &json_path, ReportFormat::Json).unwrap();
        let back: Vec<TableRow> = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(back, rows);
    }
}
