use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_radius, invalid, Error, Result};
use crate::opmat::CMatrix;
use crate::series::{BohrSum, MatrixSeries, RInterval, TailBound};

/// `F(z) = Σ_{l<p} z̄^l f_l(z)` with analytic matrix-valued components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct PolyanalyticFn {
    k: f64,
    components: Vec<MatrixSeries>,
}

impl PolyanalyticFn {
    pub fn new(components: Vec<MatrixSeries>, k: f64) -> Result<Self> {
        if components.len() < 2 {
            return Err(invalid(format!(
                "polyanalytic order must be at least 2, got {}",
                components.len()
            )));
        }
        if !(0.0..=1.0).contains(&k) {
            return Err(invalid(format!("contraction level k must lie in [0, 1], got {k}")));
        }
        let dim = components[0].dim();
        if let Some(bad) = components.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        Ok(Self { k, components })
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[MatrixSeries] {
        &self.components
    }

    /// `Σ_l r^l M_r(f_l)`, the majorant used for `M_r(F)`.
    pub fn bohr_sum(&self, r: f64) -> Result<BohrSum> {
        check_radius(r)?;
        let mut total = RInterval::point(0.0);
        let mut certified = true;
        let mut weight = 1.0;
        for f in &self.components {
            let s = f.bohr_sum(r)?;
            total = total + s.interval.scale(weight);
            certified &= s.certified;
            weight *= r;
        }
        Ok(BohrSum {
            interval: total,
            certified,
        })
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim());
        let mut weight = Complex64::new(1.0, 0.0);
        for f in &self.components {
            acc.add_scaled_assign(weight, &f.eval(z));
            weight *= z.conj();
        }
        acc
    }
}

/// Assembles `F` from `f_0` and the quotients `ω_l = f_l' (f_0')^{-1}`:
/// `f_l = ∫_0 ω_l f_0'`, with zero constant term.
///
/// When `f_0` and every `ω_l` carry tail bounds, `f_l` gets one too: with
/// `‖ω_j‖ ≤ K` and `‖A_{m,0}‖ ≤ c m^q` for all indices,
/// `‖A_{n,l}‖ ≤ (1/n) Σ_{m≤n} K m c m^q ≤ K c n^{q+1}`.
pub fn build_polyanalytic(f0: &MatrixSeries, omegas: &[MatrixSeries], k: f64) -> Result<PolyanalyticFn> {
    if !(0.0..=1.0).contains(&k) {
        return Err(invalid(format!("contraction level k must lie in [0, 1], got {k}")));
    }
    if omegas.is_empty() {
        return Err(invalid("need at least one omega (order p >= 2)"));
    }
    if !f0.coeff(0).is_zero() {
        return Err(Error::Precondition("f_0 must vanish at the origin".into()));
    }
    let dim = f0.dim();
    let f0_prime = f0.derivative();
    let f0_growth = match f0.tail() {
        Some(t) => Some(
            (1..=f0.degree())
                .map(|n| Ok((n, f0.coeff(n).op_norm()?)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(t, |acc, (n, norm)| {
                    let cap = norm / (n as f64).powi(acc.growth as i32);
                    TailBound {
                        scale: acc.scale.max(cap),
                        growth: acc.growth,
                    }
                }),
        ),
        None => None,
    };

    let mut components = Vec::with_capacity(omegas.len() + 1);
    components.push(f0.clone());
    for (l, omega) in omegas.iter().enumerate() {
        if omega.dim() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: omega.dim(),
            });
        }
        let head = omega.coeff(0).op_norm()?;
        if head > k + 1e-12 {
            return Err(Error::Precondition(format!(
                "omega_{} has ‖ω(0)‖ = {head} > k = {k}",
                l + 1
            )));
        }
        let fl = omega.mul(&f0_prime)?.integrate0(&CMatrix::zeros(dim))?;
        let tail = match (omega.tail(), f0_growth) {
            (Some(w), Some(g)) if w.growth == 0 => {
                let sup = omega
                    .coeffs()
                    .iter()
                    .map(CMatrix::op_norm)
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(w.scale, f64::max);
                Some(TailBound::polynomial(sup * g.scale, g.growth + 1))
            }
            _ => None,
        };
        components.push(fl.with_tail(tail)?);
    }
    PolyanalyticFn::new(components, k)
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    p: usize,
    k: f64,
    components: Vec<MatrixSeries>,
}

impl From<PolyanalyticFn> for PolyRepr {
    fn from(f: PolyanalyticFn) -> Self {
        PolyRepr {
            p: f.order(),
            k: f.k,
            components: f.components,
        }
    }
}

impl TryFrom<PolyRepr> for PolyanalyticFn {
    type Error = Error;

    fn try_from(repr: PolyRepr) -> Result<Self> {
        if repr.p != repr.components.len() {
            return Err(invalid(format!(
                "declared order {} but {} components",
                repr.p,
                repr.components.len()
            )));
        }
        PolyanalyticFn::new(repr.components, repr.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{gen_omega, gen_schur_matrix, SchurOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_f0(dim: usize) -> MatrixSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        gen_schur_matrix(
            &mut rng,
            dim,
            64,
            SchurOptions {
                fix_origin: true,
                scalar_head: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_omega_gives_zero_component() {
        let f0 = sample_f0(2);
        let f = build_polyanalytic(&f0, &[MatrixSeries::zero(2, 64)], 0.5).unwrap();
        assert_eq!(f.order(), 2);
        assert!(f.components()[1].is_zero());
        for z in [c(0.1, 0.2), c(-0.3, 0.0)] {
            assert_eq!(f.eval(z), f0.eval(z));
        }
    }

    #[test]
    fn constant_omega_scales_f0() {
        let f0 = sample_f0(2);
        let k = 0.75;
        let omega = MatrixSeries::constant(2, 64, c(k, 0.0));
        let f = build_polyanalytic(&f0, &[omega], k).unwrap();
        let f1 = &f.components()[1];
        for n in 0..=64 {
            let diff = (f1.coeff(n) - &f0.coeff(n).scale_real(k)).op_norm().unwrap();
            assert!(diff < 1e-14, "n = {n}: {diff}");
        }
    }

    #[test]
    fn components_respect_k_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let f0 = sample_f0(3);
        for k in [0.25, 0.5, 1.0] {
            let omegas: Vec<_> = (0..3).map(|_| gen_omega(&mut rng, 3, 64, k).unwrap()).collect();
            let f = build_polyanalytic(&f0, &omegas, k).unwrap();
            let base = f0.bohr_sum(0.25).unwrap().lo();
            for fl in &f.components()[1..] {
                let s = fl.bohr_sum(0.25).unwrap();
                assert!(s.certified);
                assert!(s.hi() <= k * base + s.slack() + 1e-12);
            }
        }
    }

    #[test]
    fn poly_bohr_sum_and_eval() {
        let f0 = sample_f0(2);
        let f = build_polyanalytic(&f0, &[MatrixSeries::identity(2, 64)], 1.0).unwrap();
        // f_1 = f_0 here, so the majorant is (1 + r) M_r(f_0).
        let r = 0.3;
        let single = f0.bohr_sum(r).unwrap();
        let both = f.bohr_sum(r).unwrap();
        assert!((both.lo() - (1.0 + r) * single.lo()).abs() < 1e-14);
        assert_eq!(f.bohr_sum(0.0).unwrap().lo(), 0.0);

        let g0 = MatrixSeries::from_scalar_coeffs(2, &[c(0.0, 0.0), c(1.0, 0.0)], None).unwrap();
        let g = PolyanalyticFn::new(vec![g0.clone(), g0], 0.5).unwrap();
        let z = c(0.4, 0.0);
        assert_eq!(g.eval(z), CMatrix::scalar(2, c(0.4 + 0.16, 0.0)));
        for z in [c(0.2, 0.5), c(-0.6, -0.1)] {
            assert!(f.eval(z).op_norm().unwrap() <= f.bohr_sum(z.norm()).unwrap().hi() + 1e-12);
        }
    }

    #[test]
    fn builder_errors() {
        let f0 = sample_f0(2);
        let omega = MatrixSeries::zero(2, 64);
        assert!(build_polyanalytic(&f0, &[], 0.5).is_err());
        assert!(build_polyanalytic(&f0, std::slice::from_ref(&omega), 1.5).is_err());
        assert!(build_polyanalytic(&f0, &[MatrixSeries::zero(3, 64)], 0.5).is_err());
        let shifted = f0.add(&MatrixSeries::identity(2, 64)).unwrap();
        assert!(matches!(
            build_polyanalytic(&shifted, &[omega], 0.5),
            Err(Error::Precondition(_))
        ));
        let big = MatrixSeries::identity(2, 64);
        assert!(build_polyanalytic(&f0, &[big], 0.5).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f0 = sample_f0(1);
        let f = build_polyanalytic(&f0, &[MatrixSeries::constant(1, 64, c(0.5, 0.0))], 0.5).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.starts_with(r#"{"p":2,"k":0.5,"components":["#));
        let back: PolyanalyticFn = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
