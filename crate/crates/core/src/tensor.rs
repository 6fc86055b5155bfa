//! Small fixed-size vocabulary shared by the rest of the crate: real 3-vectors,
//! complex 3x3 tensors, the 6x6 block matrix, polarization triads and the
//! handful of k-space symbols (curl, transverse projector).

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vec3 = Vector3<f64>;
pub type Tensor3C = Matrix3<C64>;
pub type Matrix6C = Matrix6<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity3() -> Tensor3C {
    Tensor3C::identity()
}

pub fn zero3() -> Tensor3C {
    Tensor3C::zeros()
}

/// Promote a real vector to a complex column.
pub fn complexify(v: &Vec3) -> Vector3<C64> {
    v.map(|x| C64::new(x, 0.0))
}

/// Real outer product `a bᵀ` as a complex tensor.
pub fn outer(a: &Vec3, b: &Vec3) -> Tensor3C {
    Matrix3::from_fn(|i, j| C64::new(a[i] * b[j], 0.0))
}

pub fn real_diag(d: [f64; 3]) -> Tensor3C {
    Tensor3C::from_diagonal(&Vector3::new(c(d[0], 0.0), c(d[1], 0.0), c(d[2], 0.0)))
}

/// Frobenius norm.
pub fn norm(t: &Tensor3C) -> f64 {
    t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm6(t: &Matrix6C) -> f64 {
    t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian part `(A + A†)/2`; the "real part" of a response tensor.
pub fn hermitian_part(t: &Tensor3C) -> Tensor3C {
    (t + t.adjoint()) * c(0.5, 0.0)
}

/// Anti-Hermitian part divided by `i`, `(A − A†)/2i`; the "imaginary part"
/// of a response tensor. Hermitian by construction.
pub fn antihermitian_part(t: &Tensor3C) -> Tensor3C {
    (t - t.adjoint()) * c(0.0, -0.5)
}

pub fn is_finite(t: &Tensor3C) -> bool {
    t.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_hermitian(t: &Tensor3C, tol: f64) -> bool {
    norm(&(t - t.adjoint())) <= tol * norm(t).max(1.0)
}

pub fn is_real(t: &Tensor3C, tol: f64) -> bool {
    t.iter().all(|z| z.im.abs() <= tol)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(t: &Tensor3C) -> f64 {
    let h = hermitian_part(t);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn is_psd(t: &Tensor3C, tol: f64) -> bool {
    is_hermitian(t, tol) && min_eigenvalue(t) >= -tol
}

/// Physical constants. Natural units (all one) unless SI is requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
    pub mu0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

impl PhysicalConstants {
    pub const fn natural() -> Self {
        Self { hbar: 1.0, c: 1.0, eps0: 1.0, mu0: 1.0 }
    }

    /// CODATA 2018 values; μ₀ is derived so that ε₀μ₀c² = 1 holds exactly in
    /// floating point up to rounding.
    pub fn si() -> Self {
        let c = 299_792_458.0;
        let eps0 = 8.854_187_812_8e-12;
        Self { hbar: 1.054_571_817e-34, c, eps0, mu0: 1.0 / (eps0 * c * c) }
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.hbar, self.c, self.eps0, self.mu0]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::InvalidInput("physical constants must be positive".into()));
        }
        let closure = self.eps0 * self.mu0 * self.c * self.c;
        if (closure - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("eps0*mu0*c^2 = {closure}, expected 1")));
        }
        Ok(())
    }

    /// Photon dispersion ω_k = c|k|.
    pub fn omega_k(&self, k: &Vec3) -> f64 {
        self.c * k.norm()
    }
}

/// Orthonormal frame attached to a wave vector: two transverse polarizations
/// `e1, e2`, their partners `s_λ = k̂ × e_λ`, and the longitudinal `k̂`
/// (which serves as both `v₃` and `s₃`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationTriad {
    pub unit: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub s1: Vec3,
    pub s2: Vec3,
}

impl PolarizationTriad {
    /// `v_ν` for ν = 1, 2, 3.
    pub fn v(&self) -> [Vec3; 3] {
        [self.e1, self.e2, self.unit]
    }

    /// `s_ν` for ν = 1, 2, 3.
    pub fn s(&self) -> [Vec3; 3] {
        [self.s1, self.s2, self.unit]
    }

    pub fn transverse(&self) -> [Vec3; 2] {
        [self.e1, self.e2]
    }
}

/// Deterministic polarization triad for `k`.
///
/// `e1` is the component of a reference axis orthogonal to `k̂` (ẑ, or x̂ when
/// `k̂` is within ~25° of ẑ), `e2 = k̂ × e1`.
pub fn triad(k: &Vec3) -> Result<PolarizationTriad> {
    let n = k.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroWaveVector);
    }
    let unit = k / n;
    let reference = if unit.z.abs() > 0.9 { Vec3::x() } else { Vec3::z() };
    let e1 = (reference - unit * reference.dot(&unit)).normalize();
    let e2 = unit.cross(&e1);
    Ok(PolarizationTriad { unit, e1, e2, s1: unit.cross(&e1), s2: unit.cross(&e2) })
}

/// k-space symbol of the curl: `O(k) v = i k × v`.
pub fn curl_symbol(k: &Vec3) -> Tensor3C {
    let (k1, k2, k3) = (k.x, k.y, k.z);
    Tensor3C::new(
        c(0.0, 0.0),
        c(0.0, -k3),
        c(0.0, k2),
        c(0.0, k3),
        c(0.0, 0.0),
        c(0.0, -k1),
        c(0.0, -k2),
        c(0.0, k1),
        c(0.0, 0.0),
    )
}

/// `δ_ij − k_i k_j / |k|²`.
pub fn transverse_projector(k: &Vec3) -> Result<Tensor3C> {
    let n2 = k.norm_squared();
    if !(n2 > 0.0) {
        return Err(Error::ZeroWaveVector);
    }
    Ok(identity3() - outer(k, k) / c(n2, 0.0))
}

/// `k_i k_j / |k|²`.
pub fn longitudinal_projector(k: &Vec3) -> Result<Tensor3C> {
    Ok(identity3() - transverse_projector(k)?)
}

/// Principal positive-semidefinite square root of a Hermitian tensor.
///
/// Eigenvalues in `[-tol, 0)` are clipped to zero; anything more negative is
/// rejected. The result `S` is Hermitian, so `S S† = S² = T`.
pub fn hermitian_sqrt(t: &Tensor3C, tol: f64) -> Result<Tensor3C> {
    let scale = norm(t).max(f64::MIN_POSITIVE);
    let deviation = norm(&(t - t.adjoint())) / scale;
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::new(hermitian_part(t));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let roots = eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    Ok(v * Tensor3C::from_diagonal(&roots) * v.adjoint())
}

/// Assemble a 6x6 matrix from four 3x3 blocks `[[a, b], [c, d]]`.
pub fn blocks6(a: &Tensor3C, b: &Tensor3C, cc: &Tensor3C, d: &Tensor3C) -> Matrix6C {
    let mut m = Matrix6C::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(cc);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

/// Block `(row, col)` with `row, col ∈ {0, 1}`.
pub fn block(m: &Matrix6C, row: usize, col: usize) -> Tensor3C {
    m.fixed_view::<3, 3>(3 * row, 3 * col).into_owned()
}

fn norm1(m: &Matrix6C) -> f64 {
    (0..6)
        .map(|j| (0..6).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse together with the reciprocal 1-norm condition number.
pub fn inverse_with_rcond(m: &Matrix6C) -> Option<(Matrix6C, f64)> {
    let inv = m.lu().try_inverse()?;
    if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    let rcond = 1.0 / (norm1(m) * norm1(&inv));
    Some((inv, rcond))
}

/// Rotation by `angle` about `axis` (normalized internally).
pub fn rotation(axis: &Vec3, angle: f64) -> Tensor3C {
    let r = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), angle);
    r.matrix().map(|x| C64::new(x, 0.0))
}
