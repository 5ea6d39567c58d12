//! Dense complex-matrix primitives: norms, positivity tests, square roots,
//! defect operators, compressions and invariant-subspace closures.
//!
//! Matrices are plain [`nalgebra::DMatrix`] values over [`Complex64`]. Every
//! function here is pure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default cap on the dimension of any constructed space.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Constant in the commutation estimate
/// `‖U·(I−T*T)^{1/2} − (I−T*T)^{1/2}·U‖ ≤ C·√‖U·(I−T*T) − (I−T*T)·U‖`.
///
/// With `A = I − T*T` and `B = U A U*` both positive, operator monotonicity of
/// the square root gives `‖A^{1/2} − B^{1/2}‖ ≤ ‖A − B‖^{1/2}`, and
/// `‖A − B‖ = ‖UA − AU‖`, so `C = 1`.
pub const HALMOS_COMMUTATION_CONSTANT: f64 = 1.0;

/// Numerical thresholds shared by every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Threshold for defects, Hermiticity and contractivity slack.
    pub eps: f64,
    /// Eigenvalues in `[-eig_clip, 0)` are treated as zero; also the rank cutoff.
    pub eig_clip: f64,
    /// Largest dimension any construction may produce.
    pub max_dim: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps: 1e-8,
            eig_clip: 1e-10,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

impl Tolerance {
    pub fn new(eps: f64, eig_clip: f64, max_dim: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Configuration(format!("eps must be positive, got {eps}")));
        }
        if !(eig_clip > 0.0 && eig_clip.is_finite()) {
            return Err(Error::Configuration(format!(
                "eig_clip must be positive, got {eig_clip}"
            )));
        }
        if max_dim == 0 {
            return Err(Error::Configuration("max_dim must be positive".into()));
        }
        Ok(Tolerance {
            eps,
            eig_clip,
            max_dim,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Fails with a resource error if `dim` exceeds the cap.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            Err(Error::ResourceCap {
                requested: dim,
                cap: self.max_dim,
            })
        } else {
            Ok(())
        }
    }
}

/// Orthonormal basis of a subspace of `C^ambient_dim`, stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    /// Wraps a matrix whose columns are orthonormal within `tol.eps`.
    pub fn new(basis: CMatrix, tol: &Tolerance) -> Result<Self> {
        let k = basis.ncols();
        if k > basis.nrows() {
            return Err(Error::Dimension(format!(
                "{k} basis vectors in dimension {}",
                basis.nrows()
            )));
        }
        let gram = basis.adjoint() * &basis;
        let defect = op_norm(&(gram - CMatrix::identity(k, k)));
        if defect > tol.eps {
            return Err(Error::Structure(format!(
                "basis is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Subspace {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    /// The whole space `C^n` with its standard basis.
    pub fn full(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: CMatrix::identity(n, n),
        }
    }

    /// Span of the first `k` standard basis vectors of `C^n`.
    pub fn leading(n: usize, k: usize) -> Self {
        assert!(k <= n);
        Subspace {
            ambient_dim: n,
            basis: CMatrix::identity(n, k),
        }
    }

    pub(crate) fn from_orthonormal_unchecked(ambient_dim: usize, basis: CMatrix) -> Self {
        debug_assert_eq!(basis.nrows(), ambient_dim);
        Subspace { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis vectors as columns (an isometry `C^dim → C^ambient_dim`).
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<CVector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Orthogonal projection onto the subspace.
    pub fn projection(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn distance(&self, v: &CVector) -> f64 {
        let coeffs = self.basis.adjoint() * v;
        (v - &self.basis * coeffs).norm()
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real matrix from row-major data, promoted to complex.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

/// Largest singular value. The empty matrix has norm 0.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

fn require_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// `(M + M*)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
///
/// Cyclic Jacobi with complex rotations. nalgebra's complex
/// `symmetric_eigen` returns correct eigenvalues but a wrong eigenbasis on
/// some block-structured inputs, which the defect square roots here hit
/// routinely, so it is not used.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let mut a = hermitian_part(m);
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm();
    if n == 0 || scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                // Rotating away entries this small only loses unitarity once
                // they reach the subnormal range.
                if a[(p, q)].norm() <= f64::EPSILON * scale * 1e-3 {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    (values, vectors)
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Annihilates `a[(p, q)]` by `A ← J*AJ`, accumulating `V ← VJ`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let j = [
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [-phase.conj() * s, phase.conj() * c],
    ];
    let n = a.nrows();
    for r in 0..n {
        let (x, y) = (a[(r, p)], a[(r, q)]);
        a[(r, p)] = x * j[0][0] + y * j[1][0];
        a[(r, q)] = x * j[0][1] + y * j[1][1];
        let (x, y) = (v[(r, p)], v[(r, q)]);
        v[(r, p)] = x * j[0][0] + y * j[1][0];
        v[(r, q)] = x * j[0][1] + y * j[1][1];
    }
    for col in 0..n {
        let (x, y) = (a[(p, col)], a[(q, col)]);
        a[(p, col)] = j[0][0].conj() * x + j[1][0].conj() * y;
        a[(q, col)] = j[0][1].conj() * x + j[1][1].conj() * y;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Smallest and largest eigenvalue of the Hermitian part; `(0, 0)` when empty.
pub fn eig_extremes(m: &CMatrix) -> (f64, f64) {
    let (vals, _) = eigh(m);
    match (vals.first(), vals.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    }
}

/// True iff `m` is Hermitian within `tol.eps` and its smallest eigenvalue is
/// at least `-tol.eig_clip`.
pub fn is_psd(m: &CMatrix, tol: &Tolerance) -> Result<bool> {
    require_square(m, "positivity test input")?;
    if op_norm(&(m - m.adjoint())) > tol.eps {
        return Ok(false);
    }
    Ok(eig_extremes(m).0 >= -tol.eig_clip)
}

// Eigenvalues with |λ| ≤ floor are treated as exact zeros: their square
// roots would otherwise turn 1e-16 rounding into 1e-8 components.
fn sqrt_from_spectrum(values: &[f64], vectors: &CMatrix, floor: f64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let s = if lambda <= floor { 0.0 } else { lambda.sqrt() };
        scaled.column_mut(k).scale_mut(s);
    }
    let root = scaled * vectors.adjoint();
    debug_assert_eq!(root.nrows(), n);
    hermitian_part(&root)
}

/// Positive square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-tol.eig_clip, 0)` are clipped to zero, and so are
/// positive ones up to `tol.eig_clip`.
pub fn psd_sqrt(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    require_square(m, "square-root input")?;
    let skew = op_norm(&(m - m.adjoint()));
    if skew > tol.eps {
        return Err(Error::Positivity { min_eig: f64::NAN });
    }
    let (values, vectors) = eigh(m);
    if let Some(&lowest) = values.first() {
        if lowest < -tol.eig_clip {
            return Err(Error::Positivity { min_eig: lowest });
        }
    }
    Ok(sqrt_from_spectrum(&values, &vectors, tol.eig_clip))
}

/// The defect operator `(I − T*T)^{1/2}` of a contraction.
///
/// Once `‖T‖ ≤ 1 + tol.eps` is established, all negative eigenvalues of
/// `I − T*T` are rounding artefacts and are clamped to zero, as are positive
/// ones up to `tol.eig_clip`.
pub fn defect_sqrt(t: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let norm = op_norm(t);
    if norm > 1.0 + tol.eps {
        return Err(Error::Contractivity { norm });
    }
    let n = t.ncols();
    let gap = CMatrix::identity(n, n) - t.adjoint() * t;
    let (values, vectors) = eigh(&gap);
    Ok(sqrt_from_spectrum(&values, &vectors, tol.eig_clip))
}

/// `B*·M·B` where `B` holds the subspace basis.
pub fn compress(m: &CMatrix, s: &Subspace) -> Result<CMatrix> {
    require_square(m, "compressed operator")?;
    if m.nrows() != s.ambient_dim() {
        return Err(Error::Dimension(format!(
            "operator of size {} compressed to a subspace of C^{}",
            m.nrows(),
            s.ambient_dim()
        )));
    }
    Ok(s.basis().adjoint() * m * s.basis())
}

/// Orthogonalizes `v` against `basis` twice, in place.
fn orthogonalize(v: &mut CVector, basis: &[CVector]) {
    for _ in 0..2 {
        for q in basis {
            let coeff = q.dotc(v);
            v.axpy(-coeff, q, C64::new(1.0, 0.0));
        }
    }
}

/// Smallest subspace containing `seeds` and invariant under every generator.
///
/// Vectors are added by repeated application and double Gram–Schmidt; a
/// candidate whose residual falls below `tol.eig_clip` (relative to its
/// norm, floored at 1) is discarded. Terminates once no generator produces a
/// new direction.
pub fn orthonormal_closure(
    ambient_dim: usize,
    seeds: &[CVector],
    generators: &[CMatrix],
    tol: &Tolerance,
) -> Result<Subspace> {
    for g in generators {
        if g.nrows() != ambient_dim || g.ncols() != ambient_dim {
            return Err(Error::Dimension(format!(
                "generator of size {}x{} on C^{ambient_dim}",
                g.nrows(),
                g.ncols()
            )));
        }
    }
    let mut basis: Vec<CVector> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();

    let try_push = |basis: &mut Vec<CVector>, mut v: CVector| -> bool {
        let scale = v.norm().max(1.0);
        orthogonalize(&mut v, basis);
        let n = v.norm();
        if n > tol.eig_clip * scale && basis.len() < ambient_dim {
            v.unscale_mut(n);
            basis.push(v);
            true
        } else {
            false
        }
    };

    for s in seeds {
        if s.len() != ambient_dim {
            return Err(Error::Dimension(format!(
                "seed of length {} in C^{ambient_dim}",
                s.len()
            )));
        }
        if try_push(&mut basis, s.clone()) {
            queue.push(basis.len() - 1);
        }
    }
    while let Some(idx) = queue.pop() {
        let v = basis[idx].clone();
        for g in generators {
            if try_push(&mut basis, g * &v) {
                queue.push(basis.len() - 1);
            }
        }
    }
    let mat = if basis.is_empty() {
        CMatrix::zeros(ambient_dim, 0)
    } else {
        CMatrix::from_columns(&basis)
    };
    Ok(Subspace::from_orthonormal_unchecked(ambient_dim, mat))
}

/// Orthonormal basis of the range of an orthogonal projection.
///
/// The rank is the rounded trace; columns are chosen by pivoted Gram–Schmidt
/// (largest residual first, lowest index on ties), so a diagonal projection
/// yields standard basis vectors in increasing order.
pub fn projection_range_basis(p: &CMatrix) -> CMatrix {
    let n = p.nrows();
    let rank = p.trace().re.round().max(0.0) as usize;
    let rank = rank.min(n);
    let mut residual = p.clone();
    let mut chosen: Vec<CVector> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut best = 0;
        let mut best_norm = -1.0;
        for j in 0..n {
            let nj = residual.column(j).norm();
            if nj > best_norm + 1e-12 {
                best = j;
                best_norm = nj;
            }
        }
        if best_norm <= 0.0 {
            break;
        }
        let mut q: CVector = residual.column(best).into_owned();
        orthogonalize(&mut q, &chosen);
        let nq = q.norm();
        if nq == 0.0 {
            break;
        }
        q.unscale_mut(nq);
        let overlap = q.adjoint() * &residual;
        residual -= &q * overlap;
        chosen.push(q);
    }
    if chosen.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&chosen)
    }
}

/// Block-diagonal matrix `A ⊕ B`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Frobenius residual of `target` after orthogonal projection onto the
/// linear span of `spanning` (all viewed as vectors).
pub fn span_residual(target: &CMatrix, spanning: &[CMatrix], tol: &Tolerance) -> Result<f64> {
    let shape = target.shape();
    let mut basis: Vec<CVector> = Vec::new();
    for m in spanning {
        if m.shape() != shape {
            return Err(Error::Dimension(format!(
                "spanning matrix of shape {:?}, expected {:?}",
                m.shape(),
                shape
            )));
        }
        let mut v = CVector::from_column_slice(m.as_slice());
        let scale = v.norm().max(1.0);
        orthogonalize(&mut v, &basis);
        let n = v.norm();
        if n > tol.eig_clip * scale {
            v.unscale_mut(n);
            basis.push(v);
        }
    }
    let mut t = CVector::from_column_slice(target.as_slice());
    orthogonalize(&mut t, &basis);
    Ok(t.norm())
}

/// `‖A − B‖` in operator norm.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn eigh_on_block_structured_gram() {
        // I − T*T for T = [u v* | 0 | w v*] style rows: many exact zeros and
        // a triply degenerate eigenvalue 1.
        let c = |re: f64, im: f64| C64::new(re, im);
        let t = CMatrix::from_row_slice(
            2,
            5,
            &[
                c(0.3, 0.1), c(0.0, 0.0), c(0.2, -0.4), c(0.0, 0.0), c(0.1, 0.1),
                c(0.0, 0.0), c(0.5, 0.2), c(0.0, 0.0), c(-0.3, 0.3), c(0.0, 0.0),
            ],
        );
        let h = CMatrix::identity(5, 5) - t.adjoint() * &t;
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|p| p[0] <= p[1]));
        let d = CMatrix::from_diagonal(&CVector::from_iterator(5, vals.iter().map(|&x| c(x, 0.0))));
        assert!(op_norm(&(&vecs * d * vecs.adjoint() - &h)) < 1e-14);
        assert!(op_norm(&(vecs.adjoint() * &vecs - CMatrix::identity(5, 5))) < 1e-14);
    }

    #[test]
    fn eigh_handles_tiny_off_diagonal() {
        let mut h = real_matrix(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        h[(0, 2)] = C64::new(1e-300, 1e-310);
        h[(2, 0)] = h[(0, 2)].conj();
        let (vals, vecs) = eigh(&h);
        assert_abs_diff_eq!(vals[2], 3.0, epsilon = 1e-15);
        assert!(op_norm(&(vecs.adjoint() * &vecs - CMatrix::identity(3, 3))) < 1e-15);
    }

    #[test]
    fn op_norm_examples() {
        assert_abs_diff_eq!(op_norm(&real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0])), 1.0, epsilon = 1e-14);
        let m = real_matrix(2, 2, &[-3.0 / 8.0, -3.0 / 16.0, 3.0 / 8.0, 3.0 / 16.0]);
        assert_abs_diff_eq!(op_norm(&m), 3.0 * 10f64.sqrt() / 16.0, epsilon = 1e-14);
        assert_abs_diff_eq!(op_norm(&CMatrix::identity(5, 5)), 1.0, epsilon = 1e-14);
        assert_eq!(op_norm(&CMatrix::zeros(0, 0)), 0.0);
        assert_eq!(op_norm(&CMatrix::zeros(3, 0)), 0.0);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]), &tol()).unwrap());
        assert!(!is_psd(&real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]), &tol()).unwrap());
        assert!(!is_psd(&real_matrix(2, 2, &[1.0, 0.0, 0.0, -1e-3]), &tol()).unwrap());
        assert!(matches!(
            is_psd(&CMatrix::zeros(2, 3), &tol()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn sqrt_examples() {
        let s = psd_sqrt(&real_matrix(2, 2, &[4.0, 0.0, 0.0, 9.0]), &tol()).unwrap();
        assert!(distance(&s, &real_matrix(2, 2, &[2.0, 0.0, 0.0, 3.0])) < 1e-12);
        let s = psd_sqrt(&real_matrix(1, 1, &[0.75]), &tol()).unwrap();
        assert_abs_diff_eq!(s[(0, 0)].re, 3f64.sqrt() / 2.0, epsilon = 1e-14);
        let z = psd_sqrt(&CMatrix::zeros(3, 3), &tol()).unwrap();
        assert_eq!(op_norm(&z), 0.0);
        assert!(matches!(
            psd_sqrt(&real_matrix(1, 1, &[-1e-3]), &tol()),
            Err(Error::Positivity { .. })
        ));
        // Clipped, not rejected.
        let s = psd_sqrt(&real_matrix(1, 1, &[-1e-12]), &tol()).unwrap();
        assert_eq!(s[(0, 0)].re, 0.0);
    }

    #[test]
    fn defect_examples() {
        let d = defect_sqrt(&real_matrix(1, 1, &[0.5]), &tol()).unwrap();
        assert_abs_diff_eq!(d[(0, 0)].re, 3f64.sqrt() / 2.0, epsilon = 1e-14);
        let col = real_matrix(2, 1, &[0.6, 0.8]);
        assert!(op_norm(&defect_sqrt(&col, &tol()).unwrap()) < 1e-7);
        let d = defect_sqrt(&CMatrix::zeros(3, 3), &tol()).unwrap();
        assert!(distance(&d, &CMatrix::identity(3, 3)) < 1e-14);
        assert!(matches!(
            defect_sqrt(&real_matrix(1, 1, &[1.5]), &tol()),
            Err(Error::Contractivity { .. })
        ));
    }

    #[test]
    fn compress_examples() {
        let s = Subspace::leading(2, 1);
        let r3 = 3f64.sqrt() / 2.0;
        let m = real_matrix(2, 2, &[0.5, 0.0, r3, 0.0]);
        let k = compress(&m, &s).unwrap();
        assert_eq!(k.shape(), (1, 1));
        assert_abs_diff_eq!(k[(0, 0)].re, 0.5, epsilon = 1e-15);
        let id = compress(&CMatrix::identity(2, 2), &s).unwrap();
        assert!(distance(&id, &CMatrix::identity(1, 1)) < 1e-15);
        assert!(compress(&CMatrix::identity(3, 3), &s).is_err());
    }

    #[test]
    fn closure_examples() {
        let e0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = orthonormal_closure(3, std::slice::from_ref(&e0), &[], &tol()).unwrap();
        assert_eq!(s.dim(), 1);

        let shift = real_matrix(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let s = orthonormal_closure(3, &[e0], &[shift], &tol()).unwrap();
        assert_eq!(s.dim(), 3);

        let e0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let diag = real_matrix(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let s = orthonormal_closure(2, &[e0], &[diag], &tol()).unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn range_basis_of_diagonal_projection_is_standard() {
        let p = real_matrix(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let b = projection_range_basis(&p);
        assert_eq!(b.shape(), (3, 2));
        assert!(distance(&b, &real_matrix(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn range_basis_of_rank_one_projection() {
        let v = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let p = &v * v.adjoint();
        let b = projection_range_basis(&p);
        assert_eq!(b.ncols(), 1);
        assert!(distance(&(&b * b.adjoint()), &p) < 1e-14);
    }

    #[test]
    fn tolerance_rejects_nonpositive() {
        assert!(Tolerance::new(0.0, 1e-10, 10).is_err());
        assert!(Tolerance::new(1e-8, -1.0, 10).is_err());
        assert!(Tolerance::default().check_dim(4097).is_err());
    }
}
