//! Dense complex linear algebra helpers shared by all modules.
//!
//! Everything operates on dynamically sized `DMatrix<Complex<T>>`; register
//! dimensions stay small (at most 2^7), so dense algebra is the right tool.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::CoreError;
use crate::scalar::{cplx, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Role tag for a dense operator, used to validate module boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Hermitian,
    Density,
    Superoperator,
}

/// A dense complex square matrix with a declared role.
#[derive(Clone, Debug)]
pub struct OperatorMatrix<T: Real> {
    pub matrix: CMatrix<T>,
    pub kind: OperatorKind,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new_unchecked(matrix: CMatrix<T>, kind: OperatorKind) -> Self {
        Self { matrix, kind }
    }

    /// Wraps a matrix as a unitary, verifying U†U = 1 to `tol`.
    pub fn unitary(matrix: CMatrix<T>, tol: T) -> Result<Self, CoreError> {
        let dev = unitarity_defect(&matrix);
        if dev > tol {
            return Err(CoreError::NotUnitary {
                defect: dev.as_f64(),
            });
        }
        Ok(Self::new_unchecked(matrix, OperatorKind::Unitary))
    }

    /// Wraps a matrix as a density operator: unit trace, Hermitian,
    /// eigenvalues above `-tol`.
    pub fn density(matrix: CMatrix<T>, tol: T) -> Result<Self, CoreError> {
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(CoreError::NotDensity {
                reason: format!("trace = {} + {}i", tr.re.as_f64(), tr.im.as_f64()),
            });
        }
        if hermiticity_defect(&matrix) > tol {
            return Err(CoreError::NotDensity {
                reason: "not Hermitian".into(),
            });
        }
        if min_eigenvalue_hermitian(&matrix) < -tol {
            return Err(CoreError::NotDensity {
                reason: "negative eigenvalue".into(),
            });
        }
        Ok(Self::new_unchecked(matrix, OperatorKind::Density))
    }

    pub fn hermitian(matrix: CMatrix<T>, tol: T) -> Result<Self, CoreError> {
        if hermiticity_defect(&matrix) > tol {
            return Err(CoreError::NotHermitian);
        }
        Ok(Self::new_unchecked(matrix, OperatorKind::Hermitian))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x<T: Real>() -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)])
}

pub fn pauli_y<T: Real>() -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(0.0, 1.0), cplx(0.0, 0.0)])
}

pub fn pauli_z<T: Real>() -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(-1.0, 0.0)])
}

/// cos(phi)·X + sin(phi)·Y, the in-plane Pauli at azimuth `phi`.
pub fn pauli_phi<T: Real>(phi: T) -> CMatrix<T> {
    let mut m = pauli_x::<T>() * Complex::new(phi.cos(), T::zero());
    m += pauli_y::<T>() * Complex::new(phi.sin(), T::zero());
    m
}

/// n̂·σ for a real unit (or general) 3-vector.
pub fn pauli_dot<T: Real>(n: &nalgebra::Vector3<T>) -> CMatrix<T> {
    let mut m = pauli_x::<T>() * Complex::new(n.x, T::zero());
    m += pauli_y::<T>() * Complex::new(n.y, T::zero());
    m += pauli_z::<T>() * Complex::new(n.z, T::zero());
    m
}

/// Kronecker product of a list of factors, leftmost factor most significant.
pub fn kron_all<T: Real>(factors: &[CMatrix<T>]) -> CMatrix<T> {
    let mut out = identity::<T>(1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Embeds a single-qubit operator at `slot` in a register of `n_slots` qubits.
pub fn embed_qubit_op<T: Real>(op: &CMatrix<T>, slot: usize, n_slots: usize) -> CMatrix<T> {
    let mut out = identity::<T>(1);
    for s in 0..n_slots {
        if s == slot {
            out = out.kronecker(op);
        } else {
            out = out.kronecker(&identity::<T>(2));
        }
    }
    out
}

pub fn max_abs_entry<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| if b > a { b } else { a }).sqrt()
}

pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    max_abs_entry(&(m - m.adjoint()))
}

pub fn unitarity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let d = m.nrows();
    max_abs_entry(&(m.adjoint() * m - identity::<T>(d)))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian<T: Real>(m: &CMatrix<T>) -> T {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .copied()
        .fold(T::of(f64::INFINITY), |a, b| if b < a { b } else { a })
}

/// exp(scale · H) for Hermitian H, through the eigendecomposition.
///
/// `scale` is typically `-i·dt`; the result is then unitary by construction.
pub fn expm_hermitian<T: Real>(h: &CMatrix<T>, scale: Complex<T>) -> CMatrix<T> {
    let eig = h.clone().symmetric_eigen();
    let d = h.nrows();
    let mut phases = CMatrix::<T>::zeros(d, d);
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        let z = scale * Complex::new(*lam, T::zero());
        let mag = z.re.exp();
        phases[(k, k)] = Complex::new(mag * z.im.cos(), mag * z.im.sin());
    }
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

fn one_norm<T: Real>(m: &CMatrix<T>) -> T {
    let mut best = T::zero();
    for j in 0..m.ncols() {
        let s = m.column(j).iter().fold(T::zero(), |a, z| a + z.norm_sqr().sqrt());
        if s > best {
            best = s;
        }
    }
    best
}

/// exp(A) for a general complex matrix: Padé(13) with scaling and squaring.
pub fn expm<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;

    let d = a.nrows();
    let nrm = one_norm(a).as_f64();
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = a * cplx::<T>(0.5f64.powi(s as i32), 0.0);

    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let id = identity::<T>(d);

    let b = |k: usize| cplx::<T>(B[k], 0.0);
    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = &scaled * (&a6 * u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut result = lhs
        .lu()
        .solve(&rhs)
        .expect("Pade denominator is singular; matrix exponential failed");
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Partial trace that keeps the leading `dim_keep`-dimensional factor.
pub fn partial_trace_rest<T: Real>(rho: &CMatrix<T>, dim_keep: usize) -> CMatrix<T> {
    let d = rho.nrows();
    assert_eq!(d % dim_keep, 0, "dimension mismatch in partial trace");
    let dim_rest = d / dim_keep;
    let mut out = CMatrix::<T>::zeros(dim_keep, dim_keep);
    for i in 0..dim_keep {
        for j in 0..dim_keep {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..dim_rest {
                acc += rho[(i * dim_rest + k, j * dim_rest + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ) for column-stacked vectorization.
pub fn superop_sandwich<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    b.transpose().kronecker(a)
}

/// Superoperator of unitary conjugation ρ → U ρ U†.
pub fn superop_conjugation<T: Real>(u: &CMatrix<T>) -> CMatrix<T> {
    superop_sandwich(u, &u.adjoint())
}

pub fn vectorize<T: Real>(rho: &CMatrix<T>) -> CVector<T> {
    let d = rho.nrows();
    let mut v = CVector::<T>::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            v[j * d + i] = rho[(i, j)];
        }
    }
    v
}

pub fn unvectorize<T: Real>(v: &CVector<T>, dim: usize) -> CMatrix<T> {
    let mut m = CMatrix::<T>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] = v[j * dim + i];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli_x::<f64>();
        let y = pauli_y::<f64>();
        let z = pauli_z::<f64>();
        let xy = &x * &y;
        let iz = &z * cplx::<f64>(0.0, 1.0);
        assert!(max_abs_entry(&(xy - iz)) < 1e-15);
        assert!(hermiticity_defect(&x) < 1e-15);
        assert!(hermiticity_defect(&y) < 1e-15);
    }

    #[test]
    fn hermitian_exponential_is_unitary() {
        let h = pauli_x::<f64>() * cplx::<f64>(1.3, 0.0) + pauli_z::<f64>() * cplx::<f64>(-0.4, 0.0);
        let u = expm_hermitian(&h, cplx::<f64>(0.0, -0.7));
        assert!(unitarity_defect(&u) < 1e-12);
        // exp(-i t n·σ) = cos(t|n|) - i sin(t|n|) n̂·σ
        let norm = (1.3f64 * 1.3 + 0.4 * 0.4).sqrt();
        let angle = 0.7 * norm;
        let expected = identity::<f64>(2) * cplx::<f64>(angle.cos(), 0.0)
            + &h * cplx::<f64>(0.0, -angle.sin() / norm);
        assert!(max_abs_entry(&(u - expected)) < 1e-12);
    }

    #[test]
    fn general_expm_matches_hermitian_path() {
        let h = pauli_y::<f64>() * cplx::<f64>(0.9, 0.0) + pauli_z::<f64>() * cplx::<f64>(2.1, 0.0);
        let direct = expm(&(&h * cplx::<f64>(0.0, -1.0)));
        let via_eig = expm_hermitian(&h, cplx::<f64>(0.0, -1.0));
        assert!(max_abs_entry(&(direct - via_eig)) < 1e-12);
    }

    #[test]
    fn expm_large_norm_uses_scaling() {
        let a = pauli_x::<f64>() * cplx::<f64>(0.0, -40.0);
        let u = expm(&a);
        // exp(-i 40 X) = cos(40) I - i sin(40) X
        assert_close(u[(0, 0)].re, 40.0f64.cos(), 1e-10);
        assert_close(u[(0, 1)].im, -(40.0f64.sin()), 1e-10);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let up = CMatrix::<f64>::from_row_slice(2, 2, &[
            cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0),
        ]);
        let mixed = identity::<f64>(2) * cplx::<f64>(0.5, 0.0);
        let joint = up.kronecker(&mixed);
        let reduced = partial_trace_rest(&joint, 2);
        assert!(max_abs_entry(&(reduced - up)) < 1e-15);
    }

    #[test]
    fn vectorization_roundtrip_and_sandwich() {
        let rho = CMatrix::<f64>::from_row_slice(2, 2, &[
            cplx(0.7, 0.0), cplx(0.1, 0.2), cplx(0.1, -0.2), cplx(0.3, 0.0),
        ]);
        let u = expm_hermitian(&pauli_x::<f64>(), cplx::<f64>(0.0, -0.3));
        let direct = &u * &rho * u.adjoint();
        let via_superop = unvectorize(&(superop_conjugation(&u) * vectorize(&rho)), 2);
        assert!(max_abs_entry(&(direct - via_superop)) < 1e-13);
        assert!(max_abs_entry(&(unvectorize(&vectorize(&rho), 2) - rho)) < 1e-15);
    }
}
