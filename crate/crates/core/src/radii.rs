//! Radius equations for polyanalytic Bohr inequalities and a certified
//! bracketing solver for their smallest root in `(0, 1)`.
//!
//! Every family has the shape `c (1 − r)^m − κ r + κ r^{p+1}` with a positive
//! leading constant `c` and a product parameter `κ` (`kλ`, `k`, `kβ`). After
//! dividing by `1 − r` the left-hand side is strictly decreasing on `(0, 1)`,
//! so a positive `κ` gives exactly one interior root.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::series::RInterval;

/// Number of grid points scanned for the first sign change.
pub const SCAN_POINTS: usize = 2048;

/// Default bracket width.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Polyanalytic order `p`, or the `p → ∞` limit that drops the `r^{p+1}` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyOrder {
    Finite(u32),
    Unbounded,
}

impl PolyOrder {
    fn validate(self) -> Result<()> {
        match self {
            PolyOrder::Finite(p) if p < 2 => Err(invalid(format!("order p must be >= 2, got {p}"))),
            _ => Ok(()),
        }
    }

    /// `r^{p+1}`, zero in the unbounded limit.
    fn high_power(self, r: f64) -> f64 {
        match self {
            PolyOrder::Finite(p) => r.powi(p as i32 + 1),
            PolyOrder::Unbounded => 0.0,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            PolyOrder::Finite(p) => Some(p),
            PolyOrder::Unbounded => None,
        }
    }
}

impl fmt::Display for PolyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyOrder::Finite(p) => write!(f, "{p}"),
            PolyOrder::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for PolyOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(PolyOrder::Unbounded),
            _ => s
                .parse::<u32>()
                .map(PolyOrder::Finite)
                .map_err(|_| invalid(format!("order must be an integer or 'inf', got '{s}'"))),
        }
    }
}

impl Serialize for PolyOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PolyOrder::Finite(p) => s.serialize_u32(*p),
            PolyOrder::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PolyOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(p) => Ok(PolyOrder::Finite(p)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One radius equation together with its cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadiusFamily {
    /// `(1−r)² − kλ r + kλ r^{p+1}`, cap `1/(1+2λ)`.
    ///
    /// `statement_form` switches to `(1−r)² − λ r − λ r^{p+1}`, the variant
    /// without `k` and with the opposite sign on the high power. It does not
    /// follow from the bound `kλ (r/(1−r)) ((1−r^p)/(1−r)) ≤ 1` and is kept
    /// only for comparison.
    GeneralSc {
        lambda: f64,
        k: f64,
        p: PolyOrder,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        statement_form: bool,
    },
    /// `(1+γ)(1−r)² − k r + k r^{p+1}`, cap `(1+γ)/(3+γ)`.
    OmegaGamma { gamma: f64, k: f64, p: PolyOrder },
    /// `2(1−r)² − k r + k r^{p+1}`, cap `1/2`.
    HalfPlane { k: f64, p: PolyOrder },
    /// `(1−r)² − kβ r + kβ r^{p+1}`, cap `1/3`.
    ConvexSub { beta: f64, k: f64, p: PolyOrder },
    /// `(1−r)³ − k r + k r^{p+1}`, cap `1/3`. The root is `r_S(p, k)`.
    StarlikeSub { k: f64, p: PolyOrder },
}

fn check_k(k: f64) -> Result<()> {
    if (0.0..=1.0).contains(&k) {
        Ok(())
    } else {
        Err(invalid(format!("k must lie in [0, 1], got {k}")))
    }
}

impl RadiusFamily {
    pub fn general(lambda: f64, k: f64, p: PolyOrder) -> Self {
        RadiusFamily::GeneralSc {
            lambda,
            k,
            p,
            statement_form: false,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            RadiusFamily::GeneralSc { .. } => "general_sc",
            RadiusFamily::OmegaGamma { .. } => "omega_gamma",
            RadiusFamily::HalfPlane { .. } => "half_plane",
            RadiusFamily::ConvexSub { .. } => "convex_sub",
            RadiusFamily::StarlikeSub { .. } => "starlike_sub",
        }
    }

    pub fn k(&self) -> f64 {
        match *self {
            RadiusFamily::GeneralSc { k, .. }
            | RadiusFamily::OmegaGamma { k, .. }
            | RadiusFamily::HalfPlane { k, .. }
            | RadiusFamily::ConvexSub { k, .. }
            | RadiusFamily::StarlikeSub { k, .. } => k,
        }
    }

    pub fn order(&self) -> PolyOrder {
        match *self {
            RadiusFamily::GeneralSc { p, .. }
            | RadiusFamily::OmegaGamma { p, .. }
            | RadiusFamily::HalfPlane { p, .. }
            | RadiusFamily::ConvexSub { p, .. }
            | RadiusFamily::StarlikeSub { p, .. } => p,
        }
    }

    /// Same family with the order replaced.
    pub fn with_order(mut self, order: PolyOrder) -> Self {
        match &mut self {
            RadiusFamily::GeneralSc { p, .. }
            | RadiusFamily::OmegaGamma { p, .. }
            | RadiusFamily::HalfPlane { p, .. }
            | RadiusFamily::ConvexSub { p, .. }
            | RadiusFamily::StarlikeSub { p, .. } => *p = order,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.order().validate()?;
        check_k(self.k())?;
        match *self {
            RadiusFamily::GeneralSc { lambda, .. } if !(lambda >= 0.0 && lambda.is_finite()) => {
                Err(invalid(format!("lambda must be finite and >= 0, got {lambda}")))
            }
            RadiusFamily::OmegaGamma { gamma, .. } if !(0.0..1.0).contains(&gamma) => {
                Err(invalid(format!("gamma must lie in [0, 1), got {gamma}")))
            }
            RadiusFamily::ConvexSub { beta, .. } if !(beta > 0.0 && beta.is_finite()) => {
                Err(invalid(format!("beta must be finite and > 0, got {beta}")))
            }
            _ => Ok(()),
        }
    }

    /// Coefficient `κ` multiplying `r` and `r^{p+1}`.
    pub fn product(&self) -> f64 {
        match *self {
            RadiusFamily::GeneralSc { lambda, k, statement_form, .. } => {
                if statement_form {
                    lambda
                } else {
                    k * lambda
                }
            }
            RadiusFamily::OmegaGamma { k, .. }
            | RadiusFamily::HalfPlane { k, .. }
            | RadiusFamily::StarlikeSub { k, .. } => k,
            RadiusFamily::ConvexSub { beta, k, .. } => k * beta,
        }
    }

    /// Left-hand side of the radius equation at `r`.
    pub fn lhs(&self, r: f64) -> Result<f64> {
        self.validate()?;
        if !(0.0..=1.0).contains(&r) {
            return Err(invalid(format!("radius equation is evaluated on [0, 1], got {r}")));
        }
        Ok(self.lhs_unchecked(r))
    }

    fn lhs_unchecked(&self, r: f64) -> f64 {
        let s = 1.0 - r;
        let kappa = self.product();
        let high = self.order().high_power(r);
        match *self {
            RadiusFamily::GeneralSc {
                statement_form: true,
                ..
            } => s * s - kappa * r - kappa * high,
            RadiusFamily::GeneralSc { .. } | RadiusFamily::ConvexSub { .. } => s * s - kappa * r + kappa * high,
            RadiusFamily::OmegaGamma { gamma, .. } => (1.0 + gamma) * s * s - kappa * r + kappa * high,
            RadiusFamily::HalfPlane { .. } => 2.0 * s * s - kappa * r + kappa * high,
            RadiusFamily::StarlikeSub { .. } => s * s * s - kappa * r + kappa * high,
        }
    }

    pub fn cap(&self) -> f64 {
        match *self {
            RadiusFamily::GeneralSc { lambda, .. } => 1.0 / (1.0 + 2.0 * lambda),
            RadiusFamily::OmegaGamma { gamma, .. } => (1.0 + gamma) / (3.0 + gamma),
            RadiusFamily::HalfPlane { .. } => 0.5,
            RadiusFamily::ConvexSub { .. } | RadiusFamily::StarlikeSub { .. } => 1.0 / 3.0,
        }
    }

    pub fn solve(&self, tol: f64) -> Result<RootResult> {
        solve_radius(self, tol)
    }
}

/// Family tag without parameters, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    GeneralSc,
    OmegaGamma,
    HalfPlane,
    ConvexSub,
    StarlikeSub,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::GeneralSc,
        FamilyKind::OmegaGamma,
        FamilyKind::HalfPlane,
        FamilyKind::ConvexSub,
        FamilyKind::StarlikeSub,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FamilyKind::GeneralSc => "general_sc",
            FamilyKind::OmegaGamma => "omega_gamma",
            FamilyKind::HalfPlane => "half_plane",
            FamilyKind::ConvexSub => "convex_sub",
            FamilyKind::StarlikeSub => "starlike_sub",
        }
    }

    /// Instantiates the family, ignoring parameters it does not use.
    pub fn with_params(self, params: &FamilyParams) -> Result<RadiusFamily> {
        let FamilyParams {
            lambda,
            gamma,
            beta,
            k,
            p,
            statement_form,
        } = *params;
        let family = match self {
            FamilyKind::GeneralSc => RadiusFamily::GeneralSc {
                lambda,
                k,
                p,
                statement_form,
            },
            FamilyKind::OmegaGamma => RadiusFamily::OmegaGamma { gamma, k, p },
            FamilyKind::HalfPlane => RadiusFamily::HalfPlane { k, p },
            FamilyKind::ConvexSub => RadiusFamily::ConvexSub { beta, k, p },
            FamilyKind::StarlikeSub => RadiusFamily::StarlikeSub { k, p },
        };
        family.validate()?;
        Ok(family)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "general_sc" | "general" | "sc" | "disk" => Ok(FamilyKind::GeneralSc),
            "omega_gamma" | "omega" => Ok(FamilyKind::OmegaGamma),
            "half_plane" | "halfplane" => Ok(FamilyKind::HalfPlane),
            "convex_sub" | "convex" => Ok(FamilyKind::ConvexSub),
            "starlike_sub" | "starlike" => Ok(FamilyKind::StarlikeSub),
            _ => Err(invalid(format!("unknown radius family '{s}'"))),
        }
    }
}

/// Parameter bundle for [`FamilyKind::with_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub lambda: f64,
    pub gamma: f64,
    pub beta: f64,
    pub k: f64,
    pub p: PolyOrder,
    pub statement_form: bool,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            gamma: 0.0,
            beta: 1.0,
            k: 1.0,
            p: PolyOrder::Finite(2),
            statement_form: false,
        }
    }
}

/// Which constraint determines the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Root,
    Cap,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binding::Root => "root",
            Binding::Cap => "cap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub family: RadiusFamily,
    /// Midpoint of the bracket.
    pub root: Option<f64>,
    pub bracket: Option<RInterval>,
    pub cap: f64,
    /// `min(bracket.lo, cap)`, or the cap when there is no root. Using the
    /// lower bracket end keeps the radius on the safe side of the root.
    pub radius: f64,
}

impl RootResult {
    pub fn binding(&self) -> Binding {
        match self.bracket {
            Some(b) if b.lo < self.cap => Binding::Root,
            _ => Binding::Cap,
        }
    }
}

/// Smallest root in `(0, 1)`: first sign change on a [`SCAN_POINTS`] grid
/// over `[tol, 1 − tol]`, then bisection down to width `tol`.
pub fn solve_radius(family: &RadiusFamily, tol: f64) -> Result<RootResult> {
    family.validate()?;
    if !(tol > 0.0 && tol < 0.5) {
        return Err(invalid(format!("tolerance must lie in (0, 0.5), got {tol}")));
    }
    let cap = family.cap();
    let no_root = RootResult {
        family: *family,
        root: None,
        bracket: None,
        cap,
        radius: cap,
    };
    if family.product() == 0.0 {
        // The equation reduces to c (1 − r)^m > 0 on (0, 1).
        return Ok(no_root);
    }

    let f = |r: f64| family.lhs_unchecked(r);
    let step = (1.0 - 2.0 * tol) / (SCAN_POINTS - 1) as f64;
    let mut lo = tol;
    let mut f_lo = f(lo);
    let mut found = None;
    if f_lo == 0.0 {
        found = Some((lo, lo));
    }
    for i in 1..SCAN_POINTS {
        if found.is_some() {
            break;
        }
        let x = if i == SCAN_POINTS - 1 { 1.0 - tol } else { tol + i as f64 * step };
        let fx = f(x);
        if fx == 0.0 {
            found = Some((x, x));
        } else if fx.signum() != f_lo.signum() {
            found = Some((lo, x));
        } else {
            lo = x;
            f_lo = fx;
        }
    }
    let Some((mut a, mut b)) = found else {
        return Ok(no_root);
    };
    let f_a = f(a);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
        } else if fm.signum() == f_a.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    let bracket = RInterval::new(a, b)?;
    Ok(RootResult {
        family: *family,
        root: Some(bracket.midpoint()),
        bracket: Some(bracket),
        cap,
        radius: bracket.lo.min(cap),
    })
}

pub fn bohr_radius_cap(family: &RadiusFamily) -> Result<f64> {
    family.validate()?;
    Ok(family.cap())
}

/// Domains with a documented upper bound on the coefficient-growth constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum Domain {
    Disk,
    OmegaGamma { gamma: f64 },
}

/// Upper bound for `sup ‖A_n‖ / ‖I − |A_0|²‖` over contractive functions on
/// the domain: `1` on the disk, `1/(1+γ)` on `Ω_γ`.
pub fn lambda_bound(domain: Domain) -> Result<f64> {
    match domain {
        Domain::Disk => Ok(1.0),
        Domain::OmegaGamma { gamma } if (0.0..1.0).contains(&gamma) => Ok(1.0 / (1.0 + gamma)),
        Domain::OmegaGamma { gamma } => Err(invalid(format!("gamma must lie in [0, 1), got {gamma}"))),
    }
}
