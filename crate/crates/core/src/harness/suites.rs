//! One randomized trial per call. Each trial returns the smallest margin
//! `bound − value` over its grid, with certified upper endpoints on the value
//! side.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::Value;

use super::campaign::{CampaignConfig, Suite};
use crate::error::{invalid, Result};
use crate::opmat::CMatrix;
use crate::radii::{PolyOrder, RadiusFamily};
use crate::series::{Majorant, MatrixSeries, ScalarSeries, TailBound};
use crate::zoo::{
    blaschke_series, build_polyanalytic, contraction_from_blaschke, gen_omega, gen_quasi_factor, gen_schur_matrix, random_disk_point,
    random_blaschke, random_phase, random_self_map, random_unitary, starlike_from_q, CaratheodoryScalar, SchurOptions,
};

/// Largest polyanalytic order the campaign builds.
pub const MAX_CAMPAIGN_ORDER: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worst {
    pub margin: f64,
    pub r: Option<f64>,
}

impl Worst {
    fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            r: None,
        }
    }

    /// NaN margins count as failures.
    fn observe(&mut self, r: Option<f64>, margin: f64) {
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if margin < self.margin || self.r.is_none() && margin == self.margin {
            self.margin = margin;
            self.r = r;
        }
    }
}

pub struct TrialEval {
    pub params: BTreeMap<String, Value>,
    pub worst: Worst,
    pub instance: Option<Value>,
}

struct Trial {
    params: BTreeMap<String, Value>,
    worst: Worst,
    instance: Option<serde_json::Map<String, Value>>,
}

impl Trial {
    fn new(capture: bool) -> Self {
        Self {
            params: BTreeMap::new(),
            worst: Worst::new(),
            instance: capture.then(serde_json::Map::new),
        }
    }

    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    fn keep<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        if let Some(map) = &mut self.instance {
            map.insert(key.to_string(), serde_json::to_value(value)?);
        }
        Ok(())
    }

    fn finish(self) -> TrialEval {
        TrialEval {
            params: self.params,
            worst: self.worst,
            instance: self.instance.map(Value::Object),
        }
    }
}

pub fn evaluate<R: Rng + ?Sized>(config: &CampaignConfig, rng: &mut R, capture: bool) -> Result<TrialEval> {
    let mut t = Trial::new(capture);
    match config.suite {
        Suite::Algebra => algebra(config, rng, &mut t)?,
        Suite::Schwarz => schwarz(config, rng, &mut t)?,
        Suite::Subordination => subordination(config, rng, &mut t)?,
        Suite::QuasiSubordination { bound, beta } => quasi_subordination(config, rng, &mut t, bound, beta)?,
        Suite::VonNeumann => von_neumann(config, rng, &mut t)?,
        Suite::CoefficientBound => coefficient_bound(config, rng, &mut t)?,
        Suite::Polyanalytic { family } => polyanalytic(config, rng, &mut t, &family)?,
        Suite::Composition => composition(config, rng, &mut t)?,
    }
    Ok(t.finish())
}

/// Families with a generator for `f_0`: the disk case of the general
/// theorem (any `λ ≥ 1` is implied by `λ = 1`) and the two subordination
/// families, all with finite order.
pub fn check_polyanalytic_family(family: &RadiusFamily) -> Result<()> {
    family.validate()?;
    match family.order() {
        PolyOrder::Finite(p) if p <= MAX_CAMPAIGN_ORDER => {}
        p => {
            return Err(invalid(format!(
                "polyanalytic campaigns need a finite order 2..={MAX_CAMPAIGN_ORDER}, got {p}"
            )))
        }
    }
    match *family {
        RadiusFamily::GeneralSc {
            lambda,
            statement_form: false,
            ..
        } if lambda >= 1.0 => Ok(()),
        RadiusFamily::ConvexSub { .. } | RadiusFamily::StarlikeSub { .. } => Ok(()),
        _ => Err(invalid(format!(
            "no campaign recipe for {}; use general_sc with lambda >= 1, convex_sub or starlike_sub",
            family.tag()
        ))),
    }
}

fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> Result<CMatrix> {
    let entries = (0..dim * dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let m = CMatrix::new(dim, entries)?;
    let current = m.op_norm()?;
    Ok(if current > 0.0 { m.scale_real(norm / current) } else { m })
}

/// Polynomial of the given degree with coefficient norms uniform in `[0, 1]`
/// (one in five coefficients zero), padded with zeros to `padded`.
fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize, padded: usize) -> Result<MatrixSeries> {
    let mut coeffs = Vec::with_capacity(padded + 1);
    for _ in 0..=degree {
        coeffs.push(if rng.random_range(0..5) == 0 {
            CMatrix::zeros(dim)
        } else {
            let norm = rng.random::<f64>();
            random_matrix(rng, dim, norm)?
        });
    }
    coeffs.resize(padded + 1, CMatrix::zeros(dim));
    MatrixSeries::new(coeffs, Some(TailBound::constant(0.0)))
}

fn algebra<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R, t: &mut Trial) -> Result<()> {
    let dim = rng.random_range(1..=cfg.dim);
    let n = cfg.degree;
    let f = random_polynomial(rng, dim, n, 2 * n)?;
    let g = random_polynomial(rng, dim, n, 2 * n)?;
    let alpha = random_disk_point(rng, 2.0);
    t.param("dim", dim);
    t.param("alpha_abs", alpha.norm());
    t.keep("f", &f)?;
    t.keep("g", &g)?;
    t.keep("alpha", &alpha)?;

    let mf = f.majorant()?;
    let mg = g.majorant()?;
    let sum = f.add(&g)?.majorant()?;
    let prod = f.mul(&g)?.majorant()?;
    let scaled = f.scale(alpha).majorant()?;
    let unit = MatrixSeries::identity(dim, n).majorant()?;
    let zero = MatrixSeries::zero(dim, n).majorant()?;
    for &r in &cfg.r_grid {
        let (bf, bg) = (mf.bohr_sum(r)?, mg.bohr_sum(r)?);
        let checks = [
            bf.lo() + bg.lo() - sum.bohr_sum(r)?.hi(),
            bf.lo() * bg.lo() - prod.bohr_sum(r)?.hi(),
            -(scaled.bohr_sum(r)?.hi() - alpha.norm() * bf.hi()).abs(),
            -(unit.bohr_sum(r)?.hi() - 1.0).abs(),
            -zero.bohr_sum(r)?.hi().abs(),
        ];
        for m in checks {
            t.worst.observe(Some(r), m);
        }
    }
    Ok(())
}

fn schwarz<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R, t: &mut Trial) -> Result<()> {
    let spec = random_blaschke(rng, true);
    t.param("zeros", spec.zeros.len());
    let phi = blaschke_series(&spec, cfg.degree)?;
    t.keep("phi", phi.as_matrix_series())?;
    let m = phi.as_matrix_series().majorant()?;
    for &r in &cfg.r_grid {
        t.worst.observe(Some(r), r - m.bohr_sum(r)?.hi());
    }
    Ok(())
}

/// `U diag(g_1, …, g_d) U*` from scalar entries, with a coefficient bound
/// that also holds for every function subordinate to it.
fn diagonal_target<R: Rng + ?Sized>(
    rng: &mut R,
    entries: &[ScalarSeries],
    tail: TailBound,
) -> Result<MatrixSeries> {
    let u = random_unitary(rng, entries.len());
    contraction_from_blaschke(entries, &u, &u.adjoint())?.with_tail(Some(tail))
}

/// `β z / (1 − e^{iθ} z)`: convex, with `g'(0) = β`.
fn rotated_half_plane<R: Rng + ?Sized>(rng: &mut R, beta: f64, degree: usize) -> Result<ScalarSeries> {
    let rot = random_phase(rng);
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(Complex64::new(0.0, 0.0));
    let mut pow = Complex64::new(beta, 0.0);
    for _ in 1..=degree {
        coeffs.push(pow);
        pow *= rot;
    }
    ScalarSeries::new(&coeffs, Some(TailBound::constant(beta)))
}

fn convex_target<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize, beta: f64) -> Result<MatrixSeries> {
    let entries = (0..dim)
        .map(|_| rotated_half_plane(rng, beta, degree))
        .collect::<Result<Vec<_>>>()?;
    diagonal_target(rng, &entries, TailBound::constant(beta))
}

/// Normalised starlike entries; subordinates satisfy `‖A_n‖ ≤ n`.
fn starlike_target<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize) -> Result<MatrixSeries> {
    let entries = (0..dim)
        .map(|_| {
            let q = CaratheodoryScalar::new(random_disk_point(rng, 1.0))?;
            ScalarSeries::try_from(starlike_from_q(&q, 1, degree)?)
        })
        .collect::<Result<Vec<_>>>()?;
    diagonal_target(rng, &entries, TailBound::polynomial(1.0, 1))
}

/// Random `g` for the subordination suites, chosen among a contraction, a
/// convex map and a starlike map.
fn subordination_target<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    t: &mut Trial,
) -> Result<MatrixSeries> {
    Ok(match rng.random_range(0..3) {
        0 => {
            t.param("target", "schur");
            gen_schur_matrix(rng, dim, degree, SchurOptions::default())?
        }
        1 => {
            let beta = rng.random_range(0.5..=2.0);
            t.param("target", "convex");
            t.param("beta", beta);
            convex_target(rng, dim, degree, beta)?
        }
        _ => {
            t.param("target", "starlike");
            starlike_target(rng, dim, degree)?
        }
    })
}

/// `g ∘ φ` with the coefficient bound of `g` carried over.
fn subordinate(g: &MatrixSeries, phi: &ScalarSeries) -> Result<MatrixSeries> {
    g.compose(phi)?.with_tail(g.tail())
}

fn subordination<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R, t: &mut Trial) -> Result<()> {
    let g = subordination_target(rng, cfg.dim, cfg.degree, t)?;
    let phi = random_self_map(rng, cfg.degree)?;
    let f = subordinate(&g, &phi)?;
    t.keep("g", &g)?;
    t.keep("phi", phi.as_matrix_series())?;
    let (mf, mg) = (f.majorant()?, g.majorant()?);
    for &r in &cfg.r_grid {
        let bg = mg.bohr_sum(r)?;
        t.worst.observe(Some(r), bg.lo() + bg.slack() - mf.bohr_sum(r)?.hi());
    }
    Ok(())
}

fn quasi_subordination<R: Rng + ?Sized>(
    cfg: &CampaignConfig,
    rng: &mut R,
    t: &mut Trial,
    bound: f64,
    beta: f64,
) -> Result<()> {
    let h = if rng.random_range(0..4) == 0 {
        t.param("factor", "constant");
        MatrixSeries::constant(cfg.dim, cfg.degree, Complex64::new(bound, 0.0))
    } else {
        t.param("factor", "polynomial");
        gen_quasi_factor(rng, cfg.dim, cfg.degree, bound, beta)?
    };
    let g = subordination_target(rng, cfg.dim, cfg.degree, t)?;
    let phi = random_self_map(rng, cfg.degree)?;
    let composed = subordinate(&g, &phi)?;
    // ‖f_n‖ ≤ Σ_j ‖h_j‖ ‖c_{n−j}‖ ≤ (Σ_j ‖h_j‖) C n^q.
    let h_mass: f64 = h.majorant()?.norms().iter().sum();
    let tail = composed.tail().map(|c| TailBound {
        scale: h_mass * c.scale,
        growth: c.growth,
    });
    let f = h.mul(&composed)?.with_tail(tail)?;
    t.keep("h", &h)?;
    t.keep("g", &g)?;
    t.keep("phi", phi.as_matrix_series())?;
    let (mf, mg) = (f.majorant()?, g.majorant()?);
    for &r in &cfg.r_grid {
        let bg = mg.bohr_sum(r)?;
        t.worst.observe(Some(r), bound * (bg.lo() + bg.slack()) - mf.bohr_sum(r)?.hi());
    }
    Ok(())
}

fn scalar_head_contraction<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize) -> Result<MatrixSeries> {
    gen_schur_matrix(
        rng,
        dim,
        degree,
        SchurOptions {
            fix_origin: false,
            scalar_head: true,
        },
    )
}

fn von_neumann<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R, t: &mut Trial) -> Result<()> {
    let f = scalar_head_contraction(rng, cfg.dim, cfg.degree)?;
    let phi = random_self_map(rng, cfg.degree)?;
    // f ∘ φ is again a contraction, so its coefficients are bounded by one.
    let fp = f.compose(&phi)?.with_tail(Some(TailBound::constant(1.0)))?;
    t.param("alpha_abs", f.coeff(0).get(0, 0).norm());
    t.keep("f", &f)?;
    t.keep("phi", phi.as_matrix_series())?;
    let m = fp.majorant()?;
    for &r in &cfg.r_grid {
        t.worst.observe(Some(r), 1.0 - m.bohr_sum(r)?.hi());
    }
    Ok(())
}

fn coefficient_bound<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R, t: &mut Trial) -> Result<()> {
    let f = scalar_head_contraction(rng, cfg.dim, cfg.degree)?;
    let a0 = f.coeff(0).abs_op()?;
    let defect = &CMatrix::identity(cfg.dim) - &(&a0 * &a0);
    let bound = defect.op_norm()?;
    t.param("alpha_abs", f.coeff(0).get(0, 0).norm());
    t.param("bound", bound);
    t.keep("f", &f)?;
    let mut worst_n = 1;
    for n in 1..=f.degree() {
        let m = bound - f.coeff(n).op_norm()?;
        if m < t.worst.margin {
            worst_n = n;
        }
        t.worst.observe(None, m);
    }
    t.param("worst_n", worst_n);
    Ok(())
}

fn polyanalytic<R: Rng + ?Sized>(
    cfg: &CampaignConfig,
    rng: &mut R,
    t: &mut Trial,
    family: &RadiusFamily,
) -> Result<()> {
    check_polyanalytic_family(family)?;
    let p = family.order().finite().expect("checked finite order") as usize;
    let k = family.k();
    let (dim, degree) = (cfg.dim, cfg.degree);
    let f0 = match *family {
        RadiusFamily::GeneralSc { .. } => gen_schur_matrix(
            rng,
            dim,
            degree,
            SchurOptions {
                fix_origin: true,
                scalar_head: false,
            },
        )?,
        RadiusFamily::ConvexSub { beta, .. } => {
            let g = convex_target(rng, dim, degree, beta)?;
            subordinate(&g, &random_self_map(rng, degree)?)?
        }
        RadiusFamily::StarlikeSub { .. } => {
            let g = starlike_target(rng, dim, degree)?;
            subordinate(&g, &random_self_map(rng, degree)?)?
        }
        _ => unreachable!("rejected by check_polyanalytic_family"),
    };
    let omegas = (1..p)
        .map(|_| gen_omega(rng, dim, degree, k))
        .collect::<Result<Vec<_>>>()?;
    let f = build_polyanalytic(&f0, &omegas, k)?;
    t.param("p", p);
    t.param("k", k);
    t.keep("F", &f)?;
    t.keep("omegas", &omegas)?;

    let majorants: Vec<Majorant> = f
        .components()
        .iter()
        .map(MatrixSeries::majorant)
        .collect::<Result<_>>()?;
    for &r in &cfg.r_grid {
        let mut hi = 0.0;
        let mut weight = 1.0;
        for m in &majorants {
            hi += weight * m.bohr_sum(r)?.hi();
            weight *= r;
        }
        t.worst.observe(Some(r), 1.0 - hi);
    }
    Ok(())
}

/// `‖(g ∘ φ)(z) − g(φ(z))‖` at 32 points whose moduli cycle through the
/// grid, against the truncation bound `2 r^{N+1}/(1 − r)`.
fn composition<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R, t: &mut Trial) -> Result<()> {
    let g = gen_schur_matrix(rng, cfg.dim, cfg.degree, SchurOptions::default())?;
    let phi = random_self_map(rng, cfg.degree)?;
    let gp = g.compose(&phi)?;
    t.keep("g", &g)?;
    t.keep("phi", phi.as_matrix_series())?;
    let n = gp.degree() as i32;
    for j in 0..32 {
        let r = cfg.r_grid[j % cfg.r_grid.len()];
        let z = random_phase(rng) * r;
        let err = (&gp.eval(z) - &g.eval(phi.eval(z))).op_norm()?;
        let bound = 2.0 * r.powi(n + 1) / (1.0 - r);
        t.worst.observe(Some(r), bound - err);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(suite: Suite, trials: usize) -> Vec<TrialEval> {
        let mut cfg = CampaignConfig::new(suite, trials, 0).unwrap();
        cfg.degree = cfg.degree.min(32);
        (0..trials)
            .map(|i| evaluate(&cfg, &mut ChaCha8Rng::seed_from_u64(i as u64), false).unwrap())
            .collect()
    }

    #[test]
    fn every_suite_passes_small_runs() {
        let suites = [
            Suite::Algebra,
            Suite::Schwarz,
            Suite::Subordination,
            Suite::QuasiSubordination { bound: 1.5, beta: 0.9 },
            Suite::VonNeumann,
            Suite::CoefficientBound,
            Suite::Polyanalytic {
                family: RadiusFamily::StarlikeSub {
                    k: 1.0,
                    p: PolyOrder::Finite(3),
                },
            },
            Suite::Composition,
        ];
        for suite in suites {
            for e in run(suite, 8) {
                assert!(e.worst.margin >= -1e-8, "{suite}: margin {}", e.worst.margin);
                assert!(e.instance.is_none());
            }
        }
    }

    #[test]
    fn capture_records_instance() {
        let cfg = CampaignConfig::new(Suite::Subordination, 1, 0).unwrap();
        let a = evaluate(&cfg, &mut ChaCha8Rng::seed_from_u64(5), true).unwrap();
        let b = evaluate(&cfg, &mut ChaCha8Rng::seed_from_u64(5), false).unwrap();
        assert_eq!(a.worst, b.worst);
        let inst = a.instance.unwrap();
        let g: MatrixSeries = serde_json::from_value(inst["g"].clone()).unwrap();
        assert_eq!(g.degree(), 64);
    }

    #[test]
    fn worst_tracks_nan_as_failure() {
        let mut w = Worst::new();
        w.observe(Some(0.1), 0.5);
        w.observe(Some(0.2), f64::NAN);
        assert_eq!(w.margin, f64::NEG_INFINITY);
        assert_eq!(w.r, Some(0.2));
    }

    #[test]
    fn recipes() {
        assert!(check_polyanalytic_family(&RadiusFamily::general(1.0, 0.5, PolyOrder::Finite(3))).is_ok());
        assert!(check_polyanalytic_family(&RadiusFamily::general(1.0, 0.5, PolyOrder::Unbounded)).is_err());
        assert!(check_polyanalytic_family(&RadiusFamily::HalfPlane {
            k: 1.0,
            p: PolyOrder::Finite(2)
        })
        .is_err());
    }
}
