//! Truncated power series `Σ A_n z^n` with matrix coefficients, and the Bohr
//! operator `M_r(f) = Σ ‖A_n‖ r^n`.
//!
//! A series stores `A_0 … A_N` exactly and may carry a [`TailBound`]
//! certifying `‖A_n‖ ≤ scale · n^growth` for every `n > N`. With a tail bound
//! present, [`MatrixSeries::bohr_sum`] returns an enclosure of the full
//! (untruncated) Bohr sum; without one the enclosure collapses to the partial
//! sum and is flagged as uncertified.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_radius, invalid, Error, Result};
use crate::opmat::CMatrix;

/// Default truncation degree for generated instances.
pub const DEFAULT_DEGREE: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Closed real interval `[lo, hi]`. Serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct RInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(invalid(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &RInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Multiplies by a nonnegative factor.
    pub fn scale(&self, factor: f64) -> Self {
        debug_assert!(factor >= 0.0);
        Self {
            lo: self.lo * factor,
            hi: self.hi * factor,
        }
    }
}

impl std::ops::Add for RInterval {
    type Output = RInterval;

    fn add(self, rhs: RInterval) -> RInterval {
        RInterval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl From<RInterval> for [f64; 2] {
    fn from(iv: RInterval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl TryFrom<[f64; 2]> for RInterval {
    type Error = Error;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self> {
        RInterval::new(lo, hi)
    }
}

/// Certificate `‖A_n‖ ≤ scale · n^growth` for all coefficients past the
/// stored degree. `growth == 0` is a plain constant coefficient bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub scale: f64,
    pub growth: u32,
}

impl TailBound {
    pub fn constant(scale: f64) -> Self {
        Self { scale, growth: 0 }
    }

    pub fn polynomial(scale: f64, growth: u32) -> Self {
        Self { scale, growth }
    }

    fn validate(&self) -> Result<()> {
        if self.scale.is_finite() && self.scale >= 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("coefficient bound {} must be finite and >= 0", self.scale)))
        }
    }

    fn term(&self, n: usize, r: f64) -> f64 {
        let n = n as f64;
        self.scale * (self.growth as f64 * n.ln() + n * r.ln()).exp()
    }

    /// Upper bound for `Σ_{n > degree} scale · n^growth · r^n`.
    pub fn tail_sum(&self, degree: usize, r: f64) -> f64 {
        if r == 0.0 || self.scale == 0.0 {
            return 0.0;
        }
        let first = degree + 1;
        if self.growth == 0 {
            return self.scale * r.powi(first as i32) / (1.0 - r);
        }
        // Term ratios ((n+1)/n)^q r decrease towards r; once a ratio drops
        // below sqrt(r) the rest is dominated by a geometric series.
        let q = self.growth as i32;
        let switch = r.sqrt();
        let mut explicit = 0.0;
        let mut n = first;
        loop {
            let ratio = ((n as f64 + 1.0) / n as f64).powi(q) * r;
            if ratio <= switch {
                return explicit + self.term(n, r) / (1.0 - ratio);
            }
            explicit += self.term(n, r);
            n += 1;
        }
    }

    /// Smallest bound of the same growth that also covers the given
    /// `(index, norm)` pairs.
    fn absorb(mut self, norms: impl IntoIterator<Item = (usize, f64)>) -> Self {
        for (n, norm) in norms {
            let denom = (n.max(1) as f64).powi(self.growth as i32);
            self.scale = self.scale.max(norm / denom);
        }
        self
    }
}

/// Result of evaluating the Bohr operator on a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BohrSum {
    pub interval: RInterval,
    /// `false` when the series carried no tail bound: `hi` is then only the
    /// truncated partial sum.
    pub certified: bool,
}

impl BohrSum {
    pub fn lo(&self) -> f64 {
        self.interval.lo
    }

    pub fn hi(&self) -> f64 {
        self.interval.hi
    }

    /// Width attributable to the truncation tail.
    pub fn slack(&self) -> f64 {
        self.interval.width()
    }
}

/// Nonnegative coefficient sequence `b_n = ‖A_n‖`, the summand of `M_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Majorant {
    norms: Vec<f64>,
    tail: Option<TailBound>,
}

impl Majorant {
    pub fn new(norms: Vec<f64>, tail: Option<TailBound>) -> Result<Self> {
        if norms.is_empty() {
            return Err(invalid("majorant needs at least one coefficient"));
        }
        if let Some(bad) = norms.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return Err(invalid(format!("majorant coefficient {bad} is not a finite nonnegative real")));
        }
        if let Some(t) = &tail {
            t.validate()?;
        }
        Ok(Self { norms, tail })
    }

    pub fn degree(&self) -> usize {
        self.norms.len() - 1
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    /// Partial sum `Σ_{n≤N} b_n r^n` plus, when certified, the tail bound.
    pub fn bohr_sum(&self, r: f64) -> Result<BohrSum> {
        check_radius(r)?;
        let lo = self.norms.iter().rev().fold(0.0, |acc, &b| acc * r + b);
        Ok(match self.tail {
            Some(t) => BohrSum {
                interval: RInterval {
                    lo,
                    hi: lo + t.tail_sum(self.degree(), r),
                },
                certified: true,
            },
            None => BohrSum {
                interval: RInterval::point(lo),
                certified: false,
            },
        })
    }
}

/// Truncated power series with `CMatrix` coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct MatrixSeries {
    dim: usize,
    coeffs: Vec<CMatrix>,
    tail: Option<TailBound>,
}

impl MatrixSeries {
    pub fn new(coeffs: Vec<CMatrix>, tail: Option<TailBound>) -> Result<Self> {
        let dim = coeffs
            .first()
            .map(CMatrix::dim)
            .ok_or_else(|| invalid("series needs at least the constant coefficient"))?;
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        if let Some(t) = &tail {
            t.validate()?;
        }
        Ok(Self { dim, coeffs, tail })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            coeffs: vec![CMatrix::zeros(dim); degree + 1],
            tail: Some(TailBound::constant(0.0)),
        }
    }

    /// The constant series `alpha * I`, exact (zero tail).
    pub fn constant(dim: usize, degree: usize, alpha: Complex64) -> Self {
        let mut s = Self::zero(dim, degree);
        s.coeffs[0] = CMatrix::scalar(dim, alpha);
        s
    }

    pub fn identity(dim: usize, degree: usize) -> Self {
        Self::constant(dim, degree, ONE)
    }

    /// `Σ c_n z^n · I`.
    pub fn from_scalar_coeffs(dim: usize, coeffs: &[Complex64], tail: Option<TailBound>) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| CMatrix::scalar(dim, c)).collect(), tail)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &CMatrix {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    /// The constant coefficient bound, when the tail certificate is one.
    pub fn coeff_bound(&self) -> Option<f64> {
        self.tail.filter(|t| t.growth == 0).map(|t| t.scale)
    }

    pub fn with_tail(mut self, tail: Option<TailBound>) -> Result<Self> {
        if let Some(t) = &tail {
            t.validate()?;
        }
        self.tail = tail;
        Ok(self)
    }

    /// True when every stored coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CMatrix::is_zero)
    }

    fn check_dim(&self, other: &MatrixSeries) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    /// Drops coefficients above `degree`, widening the tail bound so that it
    /// still covers the discarded ones.
    pub fn truncate(&self, degree: usize) -> Result<Self> {
        if degree >= self.degree() {
            return Ok(self.clone());
        }
        let tail = match self.tail {
            Some(t) => {
                let dropped = (degree + 1..=self.degree())
                    .map(|n| Ok((n, self.coeffs[n].op_norm()?)))
                    .collect::<Result<Vec<_>>>()?;
                Some(t.absorb(dropped))
            }
            None => None,
        };
        Ok(Self {
            dim: self.dim,
            coeffs: self.coeffs[..=degree].to_vec(),
            tail,
        })
    }

    /// Coefficientwise sum, truncated to the smaller degree.
    pub fn add(&self, other: &MatrixSeries) -> Result<Self> {
        self.check_dim(other)?;
        let degree = self.degree().min(other.degree());
        let (f, g) = (self.truncate(degree)?, other.truncate(degree)?);
        let coeffs = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a + b).collect();
        let tail = match (f.tail, g.tail) {
            (Some(a), Some(b)) => Some(TailBound {
                scale: a.scale + b.scale,
                growth: a.growth.max(b.growth),
            }),
            _ => None,
        };
        Ok(Self {
            dim: self.dim,
            coeffs,
            tail,
        })
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|a| a.scale(alpha)).collect(),
            tail: self.tail.map(|t| TailBound {
                scale: t.scale * alpha.norm(),
                growth: t.growth,
            }),
        }
    }

    /// `U · f(z) · V`.
    pub fn sandwich(&self, left: &CMatrix, right: &CMatrix) -> Result<Self> {
        if left.dim() != self.dim || right.dim() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: if left.dim() != self.dim { left.dim() } else { right.dim() },
            });
        }
        let factor = left.op_norm()? * right.op_norm()?;
        Ok(Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|a| &(left * a) * right).collect(),
            tail: self.tail.map(|t| TailBound {
                scale: t.scale * factor,
                growth: t.growth,
            }),
        })
    }

    /// Cauchy product, truncated to the smaller degree. The tail bound is
    /// dropped.
    pub fn mul(&self, other: &MatrixSeries) -> Result<Self> {
        self.check_dim(other)?;
        let degree = self.degree().min(other.degree());
        let coeffs = (0..=degree)
            .map(|n| {
                let mut acc = CMatrix::zeros(self.dim);
                for j in 0..=n {
                    acc.add_product_assign(&self.coeffs[j], &other.coeffs[n - j]);
                }
                acc
            })
            .collect();
        Ok(Self {
            dim: self.dim,
            coeffs,
            tail: None,
        })
    }

    /// Taylor coefficients of `g ∘ φ` up to `min(deg g, deg φ)`.
    ///
    /// Requires `φ(0) = 0` exactly, which makes every returned coefficient
    /// exact: `[z^m] φ^n` vanishes for `n > m` and depends only on
    /// `φ_1 … φ_m`. The tail bound is dropped.
    pub fn compose(&self, inner: &ScalarSeries) -> Result<Self> {
        let phi = inner.coeff_vec();
        if phi[0] != ZERO {
            return Err(Error::Precondition(format!(
                "inner function must vanish at the origin, got constant term {}",
                phi[0]
            )));
        }
        let degree = self.degree().min(inner.degree());
        let powers = scalar_powers(&phi[..=degree], degree);
        let coeffs = (0..=degree)
            .map(|m| {
                let mut acc = CMatrix::zeros(self.dim);
                for (n, power) in powers.iter().enumerate().take(m + 1) {
                    let c = power[m];
                    if c != ZERO {
                        acc.add_scaled_assign(c, &self.coeffs[n]);
                    }
                }
                acc
            })
            .collect();
        Ok(Self {
            dim: self.dim,
            coeffs,
            tail: None,
        })
    }

    /// Termwise derivative `Σ n A_n z^{n-1}`.
    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            // The first coefficient of f' would be A_1, which is not stored.
            return Self {
                dim: self.dim,
                coeffs: vec![CMatrix::zeros(self.dim)],
                tail: self.tail.filter(|t| t.scale == 0.0),
            };
        }
        let coeffs = (1..=n)
            .map(|k| self.coeffs[k].scale_real(k as f64))
            .collect();
        // (n+1) s (n+1)^q <= s 2^{q+1} n^{q+1} for n >= 1.
        let tail = self.tail.map(|t| TailBound {
            scale: t.scale * 2f64.powi(t.growth as i32 + 1),
            growth: t.growth + 1,
        });
        Self {
            dim: self.dim,
            coeffs,
            tail,
        }
    }

    /// Termwise antiderivative with prescribed constant term.
    pub fn integrate0(&self, constant: &CMatrix) -> Result<Self> {
        if constant.dim() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: constant.dim(),
            });
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(constant.clone());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a.scale_real(1.0 / (k as f64 + 1.0))),
        );
        // s (n-1)^q / n <= s n^{q-1} for q >= 1, and <= s for q = 0.
        let tail = self.tail.map(|t| TailBound {
            scale: t.scale,
            growth: t.growth.saturating_sub(1),
        });
        Ok(Self {
            dim: self.dim,
            coeffs,
            tail,
        })
    }

    pub fn majorant(&self) -> Result<Majorant> {
        let norms = self
            .coeffs
            .iter()
            .map(CMatrix::op_norm)
            .collect::<Result<Vec<_>>>()?;
        Majorant::new(norms, self.tail)
    }

    /// Enclosure of `M_r(f)` for `0 <= r < 1`.
    pub fn bohr_sum(&self, r: f64) -> Result<BohrSum> {
        check_radius(r)?;
        self.majorant()?.bohr_sum(r)
    }

    /// Horner evaluation of the stored polynomial.
    pub fn eval(&self, z: Complex64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim);
        for a in self.coeffs.iter().rev() {
            acc = acc.scale(z);
            acc.add_scaled_assign(ONE, a);
        }
        acc
    }
}

/// Rows `φ^0 … φ^degree`, each truncated to `degree`.
fn scalar_powers(phi: &[Complex64], degree: usize) -> Vec<Vec<Complex64>> {
    let mut powers = Vec::with_capacity(degree + 1);
    let mut unit = vec![ZERO; degree + 1];
    unit[0] = ONE;
    powers.push(unit);
    for n in 1..=degree {
        let prev: &Vec<Complex64> = &powers[n - 1];
        let mut next = vec![ZERO; degree + 1];
        // φ^{n-1} starts at z^{n-1} and φ at z^1.
        for (i, &a) in prev.iter().enumerate().take(degree).skip(n - 1) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in phi.iter().enumerate().take(degree - i + 1).skip(1) {
                next[i + j] += a * b;
            }
        }
        powers.push(next);
    }
    powers
}

/// A `1×1` series, used for inner functions `φ` of compositions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixSeries", into = "MatrixSeries")]
pub struct ScalarSeries(MatrixSeries);

impl ScalarSeries {
    pub fn new(coeffs: &[Complex64], tail: Option<TailBound>) -> Result<Self> {
        Ok(Self(MatrixSeries::from_scalar_coeffs(1, coeffs, tail)?))
    }

    /// The identity map `z`.
    pub fn identity(degree: usize) -> Self {
        let mut c = vec![ZERO; degree.max(1) + 1];
        c[1] = ONE;
        Self::new(&c, Some(TailBound::constant(0.0))).expect("valid coefficients")
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.0.coeff(n).get(0, 0)
    }

    pub fn coeff_vec(&self) -> Vec<Complex64> {
        self.0.coeffs().iter().map(|c| c.get(0, 0)).collect()
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.0.tail()
    }

    pub fn with_tail(self, tail: Option<TailBound>) -> Result<Self> {
        Ok(Self(self.0.with_tail(tail)?))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeff_vec().iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn bohr_sum(&self, r: f64) -> Result<BohrSum> {
        self.0.bohr_sum(r)
    }

    /// `Σ c_n z^n · I_dim`.
    pub fn to_matrix_series(&self, dim: usize) -> MatrixSeries {
        MatrixSeries::from_scalar_coeffs(dim, &self.coeff_vec(), self.tail()).expect("valid coefficients")
    }

    pub fn as_matrix_series(&self) -> &MatrixSeries {
        &self.0
    }

    pub fn into_matrix_series(self) -> MatrixSeries {
        self.0
    }
}

impl TryFrom<MatrixSeries> for ScalarSeries {
    type Error = Error;

    fn try_from(series: MatrixSeries) -> Result<Self> {
        if series.dim() == 1 {
            Ok(Self(series))
        } else {
            Err(invalid(format!("scalar series must have dim 1, got {}", series.dim())))
        }
    }
}

impl From<ScalarSeries> for MatrixSeries {
    fn from(s: ScalarSeries) -> Self {
        s.0
    }
}

/// Wire form: `{"dim", "degree", "coeff_bound", "coeffs"}`, plus
/// `"coeff_growth"` only for polynomial-growth tails.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    dim: usize,
    degree: usize,
    coeff_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    coeff_growth: u32,
    coeffs: Vec<CMatrix>,
}

fn is_zero_u32(x: &u32) -> bool {
    *x == 0
}

impl From<MatrixSeries> for SeriesRepr {
    fn from(s: MatrixSeries) -> Self {
        SeriesRepr {
            dim: s.dim,
            degree: s.degree(),
            coeff_bound: s.tail.map(|t| t.scale),
            coeff_growth: s.tail.map_or(0, |t| t.growth),
            coeffs: s.coeffs,
        }
    }
}

impl TryFrom<SeriesRepr> for MatrixSeries {
    type Error = Error;

    fn try_from(repr: SeriesRepr) -> Result<Self> {
        if repr.coeffs.len() != repr.degree + 1 {
            return Err(invalid(format!(
                "series declares degree {} but has {} coefficients",
                repr.degree,
                repr.coeffs.len()
            )));
        }
        let tail = repr.coeff_bound.map(|scale| TailBound {
            scale,
            growth: repr.coeff_growth,
        });
        let s = MatrixSeries::new(repr.coeffs, tail)?;
        if s.dim != repr.dim {
            return Err(Error::DimMismatch {
                left: repr.dim,
                right: s.dim,
            });
        }
        Ok(s)
    }
}
