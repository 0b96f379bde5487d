//! Contractive (Schur-class) generators.
//!
//! Matrix contractions are assembled as `U · diag(b_1(z), …, b_d(z)) · V`
//! with unitary `U`, `V` and scalar Blaschke-type `b_i`, so `‖f(z)‖ ≤ 1` on
//! the disk holds structurally.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::opmat::CMatrix;
use crate::series::{MatrixSeries, ScalarSeries, TailBound};

use super::models::mobius;

/// Random Blaschke zeros are drawn from `|a| ≤ 0.9`.
pub const MAX_RANDOM_ZERO_MODULUS: f64 = 0.9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite Blaschke product `θ · Π (z − a_j)/(1 − ā_j z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSpec {
    pub zeros: Vec<Complex64>,
    pub rotation: Complex64,
}

impl BlaschkeSpec {
    pub fn new(zeros: Vec<Complex64>, rotation: Complex64) -> Result<Self> {
        if let Some(a) = zeros.iter().find(|a| a.norm().is_nan() || a.norm() >= 1.0) {
            return Err(invalid(format!("Blaschke zero {a} is not inside the unit disk")));
        }
        if (rotation.norm() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("Blaschke rotation {rotation} is not unimodular")));
        }
        Ok(Self { zeros, rotation })
    }

    pub fn fixes_origin(&self) -> bool {
        self.zeros.contains(&ZERO)
    }
}

fn poly_mul_truncated(a: &[Complex64], b: &[Complex64], degree: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; degree + 1];
    for (i, &x) in a.iter().enumerate().take(degree + 1) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Taylor coefficients of a finite Blaschke product, with coefficient bound 1.
pub fn blaschke_series(spec: &BlaschkeSpec, degree: usize) -> Result<ScalarSeries> {
    let spec = BlaschkeSpec::new(spec.zeros.clone(), spec.rotation)?;
    let mut acc = vec![ZERO; degree + 1];
    acc[0] = spec.rotation;
    for &a in &spec.zeros {
        // (z − a)/(1 − ā z) = −a + (1 − |a|²) Σ_{n≥1} ā^{n−1} z^n
        let mut factor = Vec::with_capacity(degree + 1);
        factor.push(-a);
        let k = 1.0 - a.norm_sqr();
        let mut pow = Complex64::new(1.0, 0.0);
        for _ in 1..=degree {
            factor.push(pow * k);
            pow *= a.conj();
        }
        acc = poly_mul_truncated(&acc, &factor, degree);
    }
    ScalarSeries::new(&acc, Some(TailBound::constant(1.0)))
}

pub fn random_disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let rho = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, TAU * rng.random::<f64>())
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, TAU * rng.random::<f64>())
}

/// Random Blaschke product with up to three zeros in `|a| ≤ 0.9`; when
/// `fix_origin` is set one of the zeros sits at the origin.
pub fn random_blaschke<R: Rng + ?Sized>(rng: &mut R, fix_origin: bool) -> BlaschkeSpec {
    let extra = rng.random_range(0..=if fix_origin { 2 } else { 3 });
    let mut zeros = Vec::with_capacity(extra + 1);
    if fix_origin {
        zeros.push(ZERO);
    }
    zeros.extend((0..extra).map(|_| random_disk_point(rng, MAX_RANDOM_ZERO_MODULUS)));
    BlaschkeSpec {
        zeros,
        rotation: random_phase(rng),
    }
}

/// Self-map `φ` of the disk with `φ(0) = 0`: a shrunken origin-fixed
/// Blaschke product, or the identity with probability 1/8.
pub fn random_self_map<R: Rng + ?Sized>(rng: &mut R, degree: usize) -> Result<ScalarSeries> {
    if rng.random_range(0..8) == 0 {
        return Ok(ScalarSeries::identity(degree));
    }
    let shrink = rng.random_range(0.5..=1.0);
    let b = blaschke_series(&random_blaschke(rng, true), degree)?;
    ScalarSeries::try_from(b.into_matrix_series().scale(Complex64::new(shrink, 0.0)))
}

/// Haar-distributed unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        cols.push(v);
    }
    CMatrix::from_dmatrix(DMatrix::from_fn(dim, dim, |i, j| cols[j][i]))
}

/// `U · diag(b_1, …, b_d) · V` from scalar Schur-class diagonal entries.
pub fn contraction_from_blaschke(
    diagonal: &[ScalarSeries],
    left: &CMatrix,
    right: &CMatrix,
) -> Result<MatrixSeries> {
    if diagonal.is_empty() {
        return Err(invalid("need at least one diagonal entry"));
    }
    let degree = diagonal.iter().map(ScalarSeries::degree).min().unwrap_or(0);
    let entries: Vec<Vec<Complex64>> = diagonal.iter().map(ScalarSeries::coeff_vec).collect();
    let coeffs = (0..=degree)
        .map(|n| {
            let diag: Vec<Complex64> = entries.iter().map(|e| e[n]).collect();
            &(left * &CMatrix::from_diagonal(&diag)) * right
        })
        .collect();
    MatrixSeries::new(coeffs, None)?.with_tail(Some(TailBound::constant(1.0)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurOptions {
    /// Force `f(0) = 0`.
    pub fix_origin: bool,
    /// Force `f(0) = α₀ I` with `|α₀| < 1`.
    pub scalar_head: bool,
}

/// Random analytic `f` with `‖f(z)‖ ≤ 1` on the disk and coefficient bound 1.
///
/// With `scalar_head`, every diagonal entry is an origin-fixed Blaschke
/// product post-composed with one common Möbius map, and `V = U*`, so that
/// `f(0) = α₀ I`. `fix_origin` wins over `scalar_head` by taking `α₀ = 0`.
pub fn gen_schur_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    opts: SchurOptions,
) -> Result<MatrixSeries> {
    if dim == 0 || degree == 0 {
        return Err(invalid("Schur generator needs dim >= 1 and degree >= 1"));
    }
    let left = random_unitary(rng, dim);
    let right = if opts.scalar_head {
        left.adjoint()
    } else {
        random_unitary(rng, dim)
    };
    let head = if opts.scalar_head && !opts.fix_origin {
        Some(mobius(random_disk_point(rng, 0.95), degree)?)
    } else {
        None
    };
    let mut diagonal = Vec::with_capacity(dim);
    for _ in 0..dim {
        let spec = random_blaschke(rng, opts.fix_origin || opts.scalar_head);
        let shrink = rng.random_range(0.5..=1.0);
        let b = blaschke_series(&spec, degree)?
            .into_matrix_series()
            .scale(Complex64::new(shrink, 0.0));
        let b = match &head {
            Some(m) => m.as_matrix_series().compose(&ScalarSeries::try_from(b)?)?,
            None => b,
        };
        diagonal.push(ScalarSeries::try_from(b)?);
    }
    contraction_from_blaschke(&diagonal, &left, &right)
}

pub fn gen_schur_matrix_seeded(seed: u64, dim: usize, degree: usize, opts: SchurOptions) -> Result<MatrixSeries> {
    gen_schur_matrix(&mut ChaCha8Rng::seed_from_u64(seed), dim, degree, opts)
}

/// `ω = k · f` with `f` a scalar-head contraction, so `‖ω(z)‖ ≤ k` and
/// `ω(0) = α I` with `|α| < k`.
pub fn gen_omega<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize, k: f64) -> Result<MatrixSeries> {
    if !(0.0..=1.0).contains(&k) {
        return Err(invalid(format!("contraction level k must lie in [0, 1], got {k}")));
    }
    let f = gen_schur_matrix(
        rng,
        dim,
        degree,
        SchurOptions {
            fix_origin: false,
            scalar_head: true,
        },
    )?;
    Ok(f.scale(Complex64::new(k, 0.0)))
}

/// Polynomial factor `h` with `‖h(z)‖ ≤ bound` on `|z| < beta` and
/// `h(0) = α I`, `|α| ≤ bound`.
///
/// `h(z) = bound · U diag(s_i(z/β)) U*` where
/// `s_i(w) = c + (1 − |c|) w p_i(w)` and each `p_i` is a convex combination of
/// rotated monomials, hence bounded by one on the closed disk. `h` is entire,
/// so the tail bound is zero.
pub fn gen_quasi_factor<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    bound: f64,
    beta: f64,
) -> Result<MatrixSeries> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    if !(bound >= 0.0 && bound.is_finite()) {
        return Err(invalid(format!("bound must be finite and >= 0, got {bound}")));
    }
    let u = random_unitary(rng, dim);
    let c = random_disk_point(rng, 0.95);
    let spread = 1.0 - c.norm();
    let poly_degree = rng.random_range(0..=4usize);
    let full = poly_degree + 1;
    let mut diag_coeffs = vec![vec![ZERO; dim]; full + 1];
    #[allow(clippy::needless_range_loop)]
    for i in 0..dim {
        let weights: Vec<f64> = (0..=poly_degree).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        diag_coeffs[0][i] = c;
        for (j, w) in weights.iter().enumerate() {
            let n = j + 1;
            diag_coeffs[n][i] = random_phase(rng) * (spread * w / total) / beta.powi(n as i32);
        }
    }
    let mut coeffs: Vec<CMatrix> = diag_coeffs
        .iter()
        .map(|d| (&(&u * &CMatrix::from_diagonal(d)) * &u.adjoint()).scale_real(bound))
        .collect();
    while coeffs.len() < degree + 1 {
        coeffs.push(CMatrix::zeros(dim));
    }
    MatrixSeries::new(coeffs, Some(TailBound::constant(0.0)))?.truncate(degree)
}
