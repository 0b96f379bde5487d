use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::series::{MatrixSeries, ScalarSeries, TailBound};

/// `(w + α)/(1 + ᾱ w) = α + (1 − |α|²) Σ_{n≥1} (−ᾱ)^{n−1} w^n`.
pub fn mobius(alpha: Complex64, degree: usize) -> Result<ScalarSeries> {
    if alpha.norm().is_nan() || alpha.norm() >= 1.0 {
        return Err(invalid(format!("Möbius parameter must lie in the open disk, got {alpha}")));
    }
    let k = 1.0 - alpha.norm_sqr();
    let ratio = -alpha.conj();
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(alpha);
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 1..=degree {
        coeffs.push(pow * k);
        pow *= ratio;
    }
    ScalarSeries::new(&coeffs, Some(TailBound::constant(k)))
}

/// The classical extremal function `(a + z)/(1 + a z)`, `0 < a < 1`, whose
/// Bohr sum `a + (1 − a²) r/(1 − a r)` exceeds one exactly for
/// `r > 1/(1 + 2a)`.
pub fn mobius_extremal(a: f64, degree: usize) -> Result<ScalarSeries> {
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid(format!("extremal parameter must lie in (0, 1), got {a}")));
    }
    mobius(Complex64::new(a, 0.0), degree)
}

/// `β z/(1 − z) · I`, a convex map onto a half-plane with `‖g'(0)‖ = β`.
pub fn convex_model(beta: f64, dim: usize, degree: usize) -> Result<MatrixSeries> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("convex model needs beta > 0, got {beta}")));
    }
    let mut coeffs = vec![Complex64::new(beta, 0.0); degree + 1];
    coeffs[0] = Complex64::new(0.0, 0.0);
    MatrixSeries::from_scalar_coeffs(dim, &coeffs, Some(TailBound::constant(beta)))
}

/// Carathéodory model `q(z) = (1 + u z)/(1 − u z)` with `|u| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryScalar {
    u: Complex64,
}

impl CaratheodoryScalar {
    pub fn new(u: Complex64) -> Result<Self> {
        if u.is_finite() && u.norm() <= 1.0 + 1e-15 {
            Ok(Self { u })
        } else {
            Err(invalid(format!("Carathéodory parameter must satisfy |u| <= 1, got {u}")))
        }
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    /// `q_0 = 1`, `q_n = 2 u^n`.
    pub fn coeffs(&self, degree: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(degree + 1);
        out.push(Complex64::new(1.0, 0.0));
        let mut pow = Complex64::new(1.0, 0.0);
        for _ in 1..=degree {
            pow *= self.u;
            out.push(pow * 2.0);
        }
        out
    }
}

/// Normalised starlike map `g` with `z g'(z) = q(z) g(z)`, built from the
/// coefficient recurrence `(n−1) g_n = Σ_{j=1}^{n−1} q_j g_{n−j}`, `g_1 = I`.
pub fn starlike_from_q(q: &CaratheodoryScalar, dim: usize, degree: usize) -> Result<MatrixSeries> {
    if degree < 1 {
        return Err(invalid("starlike model needs degree >= 1"));
    }
    let qs = q.coeffs(degree);
    let mut g = vec![Complex64::new(0.0, 0.0); degree + 1];
    g[1] = Complex64::new(1.0, 0.0);
    for n in 2..=degree {
        let sum: Complex64 = (1..n).map(|j| qs[j] * g[n - j]).sum();
        g[n] = sum / (n - 1) as f64;
    }
    // |q_n| <= 2 gives ‖g_n‖ <= n for every n.
    MatrixSeries::from_scalar_coeffs(dim, &g, Some(TailBound::polynomial(1.0, 1)))
}
