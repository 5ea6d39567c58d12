//! The cover `C(T) ⊕ M_2` of the disc algebra and the Möbius map that does
//! not extend to it.
//!
//! A polynomial `p` embeds as `ι(p) = p|_T ⊕ (p(0)I + p'(0)N)` with
//! `N = [[0,0],[1,0]]`. The circle is sampled on a uniform grid; the 2×2
//! parts are exact.

use std::f64::consts::PI;
use std::ops::{Mul, Sub};

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix, C64};

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_DEGREE: usize = 64;

/// Dense complex polynomial, `coeffs[k]` multiplying `z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `z`.
    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&C64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(C64::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial given degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn value_at_zero(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn derivative_at_zero(&self) -> C64 {
        self.coeffs.get(1).copied().unwrap_or_default()
    }

    /// Sum of coefficient moduli, which bounds `sup_{|z|≤1} |p(z)|`.
    pub fn coefficient_mass(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// First `n + 1` Taylor coefficients of `φ(z) = (z − 1/2)/(1 − z/2)`:
/// `a_0 = −1/2` and `a_k = 3/2^{k+1}`.
pub fn mobius_coeffs(n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::Precondition("need at least two coefficients (n ≥ 1)".into()));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(C64::new(-0.5, 0.0));
    for k in 1..=n {
        out.push(C64::new(3.0 * 0.5f64.powi(k as i32 + 1), 0.0));
    }
    Ok(out)
}

/// `φ` evaluated in closed form.
pub fn mobius(z: C64) -> C64 {
    (z - 0.5) / (C64::new(1.0, 0.0) - z * 0.5)
}

/// The nilpotent `N = [[0,0],[1,0]]`.
pub fn nilpotent() -> CMatrix {
    let mut n = CMatrix::zeros(2, 2);
    n[(1, 0)] = C64::new(1.0, 0.0);
    n
}

/// Grid size and truncation degree of the model `C(T) ⊕ M_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverAlgebra {
    max_degree: usize,
    points: Vec<C64>,
}

impl CoverAlgebra {
    pub fn new(max_degree: usize, grid: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::Configuration("grid must have at least one point".into()));
        }
        let points = (0..grid)
            .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / grid as f64))
            .collect();
        Ok(CoverAlgebra { max_degree, points })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn grid(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// `ι(p) = p|_T ⊕ (p(0)I + p'(0)N)`.
    pub fn embed_poly(&self, p: &Polynomial) -> Result<CoverElement> {
        if p.degree() > self.max_degree {
            return Err(Error::DegreeOverflow {
                degree: p.degree(),
                max: self.max_degree,
            });
        }
        let func_part = self.points.iter().map(|&z| p.eval(z)).collect();
        let mat_part = CMatrix::identity(2, 2) * p.value_at_zero() + nilpotent() * p.derivative_at_zero();
        Ok(CoverElement { func_part, mat_part })
    }
}

/// Element of `C(T) ⊕ M_2`, the function part sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverElement {
    pub func_part: Vec<C64>,
    pub mat_part: CMatrix,
}

impl CoverElement {
    pub fn adjoint(&self) -> CoverElement {
        CoverElement {
            func_part: self.func_part.iter().map(|z| z.conj()).collect(),
            mat_part: self.mat_part.adjoint(),
        }
    }

    pub fn func_sup(&self) -> f64 {
        self.func_part.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The element `0 ⊕ mat_part`.
    pub fn matrix_only(&self) -> CoverElement {
        CoverElement {
            func_part: vec![C64::new(0.0, 0.0); self.func_part.len()],
            mat_part: self.mat_part.clone(),
        }
    }
}

impl Mul for &CoverElement {
    type Output = CoverElement;

    fn mul(self, rhs: &CoverElement) -> CoverElement {
        assert_eq!(self.func_part.len(), rhs.func_part.len(), "grid mismatch");
        CoverElement {
            func_part: self.func_part.iter().zip(&rhs.func_part).map(|(a, b)| a * b).collect(),
            mat_part: &self.mat_part * &rhs.mat_part,
        }
    }
}

impl Sub for &CoverElement {
    type Output = CoverElement;

    fn sub(self, rhs: &CoverElement) -> CoverElement {
        assert_eq!(self.func_part.len(), rhs.func_part.len(), "grid mismatch");
        CoverElement {
            func_part: self.func_part.iter().zip(&rhs.func_part).map(|(a, b)| a - b).collect(),
            mat_part: &self.mat_part - &rhs.mat_part,
        }
    }
}

/// `max(sup_grid |f|, ‖A‖)`.
pub fn cover_norm(x: &CoverElement) -> f64 {
    x.func_sup().max(op_norm(&x.mat_part))
}

/// Outcome of comparing `D_0 = ι(z) − ι(z²)ι(z)*` with its would-be image
/// `D_1 = ι(ψ) − ι(ψ)²ι(ψ)*`.
#[derive(Debug, Clone)]
pub struct AdmissibilityGap {
    /// `ι(ψ)` for the (truncated) map.
    pub image: CoverElement,
    pub d0: CoverElement,
    pub d1: CoverElement,
    /// Norm of the matrix part of `D_1`.
    pub image_norm: f64,
    /// Norm of the matrix part of `D_0`.
    pub source_norm: f64,
    /// Largest grid value of the function parts, which should vanish.
    pub d0_residual: f64,
    pub d1_residual: f64,
}

impl AdmissibilityGap {
    /// `(‖D_1‖, ‖D_0‖)` on the matrix parts.
    pub fn pair(&self) -> (f64, f64) {
        (self.image_norm, self.source_norm)
    }

    /// A *-automorphism extending the map would carry `D_0` onto `D_1`
    /// isometrically, so a strict gap rules it out.
    pub fn obstructs(&self, tol: f64) -> bool {
        self.image_norm < self.source_norm - tol
    }
}

/// Gap for an arbitrary polynomial map `ψ` standing in for the dynamics.
pub fn admissibility_gap_for(algebra: &CoverAlgebra, psi: &Polynomial) -> Result<AdmissibilityGap> {
    let z = algebra.embed_poly(&Polynomial::identity())?;
    let z2 = algebra.embed_poly(&Polynomial::monomial(2))?;
    let d0 = &z - &(&z2 * &z.adjoint());
    let image = algebra.embed_poly(psi)?;
    let d1 = &image - &(&(&image * &image) * &image.adjoint());
    Ok(AdmissibilityGap {
        image_norm: cover_norm(&d1.matrix_only()),
        source_norm: cover_norm(&d0.matrix_only()),
        d0_residual: d0.func_sup(),
        d1_residual: d1.func_sup(),
        image,
        d0,
        d1,
    })
}

/// The Möbius counterexample with `φ` truncated at `trunc_degree` and the
/// circle sampled at `grid` points. Expected pair: `(3√10/16, 1)`.
pub fn admissibility_gap(trunc_degree: usize, grid: usize) -> Result<AdmissibilityGap> {
    if trunc_degree < 2 {
        return Err(Error::Precondition(format!(
            "truncation degree {trunc_degree} < 2"
        )));
    }
    if grid < 64 {
        return Err(Error::Precondition(format!("grid of {grid} points < 64")));
    }
    let algebra = CoverAlgebra::new(trunc_degree, grid)?;
    let phi = Polynomial::new(mobius_coeffs(trunc_degree)?);
    admissibility_gap_for(&algebra, &phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;

    #[test]
    fn mobius_coefficients() {
        let a = mobius_coeffs(3).unwrap();
        let re: Vec<f64> = a.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![-0.5, 0.75, 0.375, 0.1875]);
        assert!(mobius_coeffs(0).is_err());
    }

    #[test]
    fn mobius_partial_sums_vanish_at_half() {
        for n in [4, 8, 16, 32] {
            let p = Polynomial::new(mobius_coeffs(n).unwrap());
            let err = p.eval(C64::new(0.5, 0.0)).norm();
            assert!(err < 0.5f64.powi(n as i32), "n = {n}: {err}");
        }
    }

    #[test]
    fn embed_examples() {
        let alg = CoverAlgebra::new(64, 64).unwrap();
        assert_eq!(alg.embed_poly(&Polynomial::identity()).unwrap().mat_part, nilpotent());
        assert_eq!(
            alg.embed_poly(&Polynomial::from_real(&[1.0])).unwrap().mat_part,
            CMatrix::identity(2, 2)
        );
        let phi = Polynomial::new(mobius_coeffs(64).unwrap());
        assert_eq!(
            alg.embed_poly(&phi).unwrap().mat_part,
            real_matrix(2, 2, &[-0.5, 0.0, 0.75, -0.5])
        );
        let small = CoverAlgebra::new(2, 64).unwrap();
        assert!(matches!(
            small.embed_poly(&phi),
            Err(Error::DegreeOverflow { degree: 64, max: 2 })
        ));
    }

    #[test]
    fn cover_norm_examples() {
        let alg = CoverAlgebra::new(4, 128).unwrap();
        let z = alg.embed_poly(&Polynomial::identity()).unwrap();
        assert!((cover_norm(&z) - 1.0).abs() < 1e-15);
        let m = CoverElement {
            func_part: vec![C64::new(0.0, 0.0); 4],
            mat_part: real_matrix(2, 2, &[-0.375, -0.1875, 0.375, 0.1875]),
        };
        assert!((cover_norm(&m) - 3.0 * 10f64.sqrt() / 16.0).abs() < 1e-15);
        let n = CoverElement {
            func_part: vec![C64::new(0.0, 0.0); 4],
            mat_part: nilpotent(),
        };
        assert_eq!(cover_norm(&n), 1.0);
    }

    #[test]
    fn gap_matches_closed_form() {
        let gap = admissibility_gap(DEFAULT_DEGREE, DEFAULT_GRID).unwrap();
        assert_eq!(gap.d1.mat_part, real_matrix(2, 2, &[-0.375, -0.1875, 0.375, 0.1875]));
        assert_eq!(gap.d0.mat_part, nilpotent());
        let (a, b) = gap.pair();
        assert!((a - 3.0 * 10f64.sqrt() / 16.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
        assert!(gap.d0_residual < 1e-9 && gap.d1_residual < 1e-9);
        assert!(gap.obstructs(1e-9));
    }

    #[test]
    fn degree_two_keeps_matrix_parts() {
        let low = admissibility_gap(2, 64).unwrap();
        let high = admissibility_gap(64, 64).unwrap();
        assert_eq!(low.d1.mat_part, high.d1.mat_part);
        assert!(high.d1_residual < 1e-9);
    }

    #[test]
    fn identity_map_has_no_gap() {
        let alg = CoverAlgebra::new(2, 64).unwrap();
        let gap = admissibility_gap_for(&alg, &Polynomial::identity()).unwrap();
        assert_eq!(gap.pair(), (1.0, 1.0));
        assert!(!gap.obstructs(1e-9));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(admissibility_gap(1, 4096), Err(Error::Precondition(_))));
        assert!(matches!(admissibility_gap(64, 63), Err(Error::Precondition(_))));
    }
}
