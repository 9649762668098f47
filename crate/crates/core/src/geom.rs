//! Small fixed-size vector helpers on `[f64; 3]`.

pub type Point3 = [f64; 3];

#[inline]
pub fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross(a: &Point3, b: &Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Polar angle in `[0, π]` and azimuth in `[0, 2π)` of a nonzero vector.
pub fn angles(a: &Point3) -> (f64, f64) {
    let r = norm(a);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let theta = (a[2] / r).clamp(-1.0, 1.0).acos();
    let mut phi = a[1].atan2(a[0]);
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    (theta, phi)
}

/// Unit vector for polar angle `theta` and azimuth `phi`.
#[inline]
pub fn unit_from_angles(theta: f64, phi: f64) -> Point3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Row-major 3x3 rotation matrix applied to a point.
#[inline]
pub fn rotate(m: &[[f64; 3]; 3], a: &Point3) -> Point3 {
    [dot(&m[0], a), dot(&m[1], a), dot(&m[2], a)]
}

/// Rotation by `angle` about the unit `axis` (Rodrigues form).
pub fn rotation_matrix(axis: &Point3, angle: f64) -> [[f64; 3]; 3] {
    let n = norm(axis);
    let [x, y, z] = scale(axis, 1.0 / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}
