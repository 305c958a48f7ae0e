//! Small fixed-size complex vectors and matrices.
//!
//! Two- and three-level problems do not justify a general linear algebra
//! dependency on the hot path, so the handful of operations needed are
//! written out here.

pub use num_complex::Complex64 as C64;

pub type Vec2 = [C64; 2];
pub type Mat2 = [[C64; 2]; 2];
pub type Vec3 = [C64; 3];
pub type Mat3 = [[C64; 3]; 3];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `exp(i x)`.
#[inline]
pub fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

#[inline]
pub fn mat2_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub fn mat3_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [ZERO; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

/// `<a|b>` with the first argument conjugated.
pub fn inner<const N: usize>(a: &[C64; N], b: &[C64; N]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Returns `None` for the zero vector.
pub fn normalized<const N: usize>(v: &[C64; N]) -> Option<[C64; N]> {
    let n = norm_sqr(v).sqrt();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.map(|x| x / n))
}

/// Squared overlap of two vectors after normalising both; blind to global phase.
pub fn fidelity<const N: usize>(a: &[C64; N], b: &[C64; N]) -> f64 {
    let na = norm_sqr(a);
    let nb = norm_sqr(b);
    inner(a, b).norm_sqr() / (na * nb)
}

pub fn is_finite<const N: usize>(v: &[C64; N]) -> bool {
    v.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// Wraps an angle into `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can return `period` itself for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_pm_pi(x: f64) -> f64 {
    use std::f64::consts::PI;
    let r = wrap(x + PI, 2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}
