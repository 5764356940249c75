//! Dense vector alias and the sampling helpers shared by the certificate checks.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type Vector = DVector<f64>;

pub(crate) fn check_dim(expected: usize, x: &Vector) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(())
}

/// First canonical basis vector of R^n.
pub fn first_basis(dim: usize) -> Vector {
    let mut e = Vector::zeros(dim);
    if dim > 0 {
        e[0] = 1.0;
    }
    e
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

/// Uniform sample from the closed ball `B(center, radius)`.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, center: &Vector, radius: f64) -> Vector {
    let dim = center.len();
    let mut dir = gaussian(rng, dim);
    let n = dir.norm();
    if n == 0.0 {
        return center.clone();
    }
    dir /= n;
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / dim as f64);
    center + dir * r
}

/// Uniform sample from the axis-aligned cube of half-width `half` around `center`.
pub fn sample_cube<R: Rng + ?Sized>(rng: &mut R, center: &Vector, half: f64) -> Vector {
    Vector::from_fn(center.len(), |i, _| {
        center[i] + half * (2.0 * rng.random::<f64>() - 1.0)
    })
}

/// Random unit vector orthogonal to the unit vector `u`, or `None` in one dimension.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, u: &Vector) -> Option<Vector> {
    if u.len() < 2 {
        return None;
    }
    loop {
        let mut w = gaussian(rng, u.len());
        let along = w.dot(u);
        w -= u * along;
        let n = w.norm();
        if n > 1e-8 {
            return Some(w / n);
        }
    }
}
