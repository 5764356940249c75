//! Closed convex feasible sets.
//!
//! Every set supports exact Euclidean projection, a membership test with a
//! distance band, an interior test and a unit normal-cone selector. Values are
//! immutable once built, so a set can be shared freely across threads.

use rand::Rng;

use crate::vector::{check_dim, sample_ball, sample_cube, Vector};
use crate::{Error, Result};

/// Default width of the band used to decide boundary membership.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Geometry of a [`FeasibleSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    WholeSpace {
        dim: usize,
    },
    Box {
        lower: Vector,
        upper: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    /// `{ x : <normal, x> <= offset }`
    Halfspace {
        normal: Vector,
        offset: f64,
    },
}

/// A nonempty closed convex subset of R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    shape: Shape,
}

fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl FeasibleSet {
    pub fn whole_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be at least 1"));
        }
        Ok(Self {
            shape: Shape::WholeSpace { dim },
        })
    }

    pub fn boxed(lower: impl Into<Vec<f64>>, upper: impl Into<Vec<f64>>) -> Result<Self> {
        let lower = Vector::from_vec(lower.into());
        let upper = Vector::from_vec(upper.into());
        if lower.is_empty() {
            return Err(Error::param("lower", "box must have dimension at least 1"));
        }
        check_dim(lower.len(), &upper)?;
        if !all_finite(&lower) || !all_finite(&upper) {
            return Err(Error::param("lower/upper", "bounds must be finite"));
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::param(
                "lower",
                format!(
                    "lower[{i}] = {} exceeds upper[{i}] = {}",
                    lower[i], upper[i]
                ),
            ));
        }
        Ok(Self {
            shape: Shape::Box { lower, upper },
        })
    }

    pub fn ball(center: impl Into<Vec<f64>>, radius: f64) -> Result<Self> {
        let center = Vector::from_vec(center.into());
        if center.is_empty() {
            return Err(Error::param(
                "center",
                "ball must have dimension at least 1",
            ));
        }
        if !all_finite(&center) {
            return Err(Error::param("center", "must be finite"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param(
                "radius",
                format!("must be positive, got {radius}"),
            ));
        }
        Ok(Self {
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn halfspace(normal: impl Into<Vec<f64>>, offset: f64) -> Result<Self> {
        let normal = Vector::from_vec(normal.into());
        if normal.is_empty() {
            return Err(Error::param(
                "normal",
                "halfspace must have dimension at least 1",
            ));
        }
        if !all_finite(&normal) || !offset.is_finite() {
            return Err(Error::param("normal/offset", "must be finite"));
        }
        if normal.norm() == 0.0 {
            return Err(Error::param("normal", "must be nonzero"));
        }
        Ok(Self {
            shape: Shape::Halfspace { normal, offset },
        })
    }

    /// The single point `x`, as a degenerate box.
    pub fn point(x: impl Into<Vec<f64>>) -> Result<Self> {
        let x: Vec<f64> = x.into();
        Self::boxed(x.clone(), x)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::WholeSpace { dim } => *dim,
            Shape::Box { lower, .. } => lower.len(),
            Shape::Ball { center, .. } => center.len(),
            Shape::Halfspace { normal, .. } => normal.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.shape, Shape::Box { .. } | Shape::Ball { .. })
    }

    /// Euclidean projection onto the set, in closed form for every shape.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x)?;
        Ok(match &self.shape {
            Shape::WholeSpace { .. } => x.clone(),
            Shape::Box { lower, upper } => {
                Vector::from_fn(x.len(), |i, _| x[i].clamp(lower[i], upper[i]))
            }
            Shape::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center + d * (*radius / n)
                }
            }
            Shape::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x - normal * (excess / normal.norm_squared())
                }
            }
        })
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        Ok(match &self.shape {
            Shape::WholeSpace { .. } => 0.0,
            Shape::Box { lower, upper } => x
                .iter()
                .enumerate()
                .map(|(i, &xi)| {
                    let e = (lower[i] - xi).max(xi - upper[i]).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            Shape::Ball { center, radius } => ((x - center).norm() - radius).max(0.0),
            Shape::Halfspace { normal, offset } => {
                ((normal.dot(x) - offset) / normal.norm()).max(0.0)
            }
        })
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(Error::param("tol", "must be nonnegative"));
        }
        Ok(self.distance(x)? <= tol)
    }

    fn require_member(&self, x: &Vector, tol: f64) -> Result<()> {
        let distance = self.distance(x)?;
        if distance > tol {
            return Err(Error::Infeasible { distance, tol });
        }
        Ok(())
    }

    /// Distance from a member `x` to the boundary of the set.
    fn depth(&self, x: &Vector) -> f64 {
        match &self.shape {
            Shape::WholeSpace { .. } => f64::INFINITY,
            Shape::Box { lower, upper } => (0..x.len())
                .map(|i| (x[i] - lower[i]).min(upper[i] - x[i]))
                .fold(f64::INFINITY, f64::min),
            Shape::Ball { center, radius } => radius - (x - center).norm(),
            Shape::Halfspace { normal, offset } => (offset - normal.dot(x)) / normal.norm(),
        }
    }

    /// Whether `x` lies farther than `tol` from the boundary.
    ///
    /// `x` must be a member of the set up to `tol`.
    pub fn is_interior(&self, x: &Vector, tol: f64) -> Result<bool> {
        self.require_member(x, tol)?;
        Ok(self.depth(x) > tol)
    }

    /// A unit element of the normal cone at `x`, or zero when `x` is interior.
    ///
    /// At box corners the normalized sum of the active outward face normals is
    /// returned. A face counts as active when `x` is within `tol` of it.
    pub fn unit_normal(&self, x: &Vector, tol: f64) -> Result<Vector> {
        if self.is_interior(x, tol)? {
            return Ok(Vector::zeros(x.len()));
        }
        Ok(match &self.shape {
            Shape::WholeSpace { dim } => Vector::zeros(*dim),
            Shape::Box { lower, upper } => {
                let mut g = Vector::from_fn(x.len(), |i, _| {
                    if x[i] >= upper[i] - tol {
                        1.0
                    } else if x[i] <= lower[i] + tol {
                        -1.0
                    } else {
                        0.0
                    }
                });
                let n = g.norm();
                g /= n;
                g
            }
            Shape::Ball { center, .. } => {
                let d = x - center;
                let n = d.norm();
                d / n
            }
            Shape::Halfspace { normal, .. } => normal / normal.norm(),
        })
    }

    /// Draw a point of the set, uniformly within `B(anchor, radius)` when the
    /// set is unbounded and uniformly over the set when it is a box or ball.
    ///
    /// `anchor` must lie in the set. Returns `None` if rejection sampling runs
    /// out of attempts.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        anchor: &Vector,
        radius: f64,
    ) -> Option<Vector> {
        match &self.shape {
            Shape::Box { lower, upper } => Some(Vector::from_fn(lower.len(), |i, _| {
                lower[i] + (upper[i] - lower[i]) * rng.random::<f64>()
            })),
            Shape::Ball { center, radius } => Some(sample_ball(rng, center, *radius)),
            Shape::WholeSpace { .. } => Some(sample_ball(rng, anchor, radius)),
            Shape::Halfspace { .. } => (0..1000)
                .map(|_| sample_ball(rng, anchor, radius))
                .find(|z| self.distance(z).map(|d| d == 0.0).unwrap_or(false)),
        }
    }

    /// Draw a point uniformly from `B(center, radius) ∩ X` by rejection.
    pub fn sample_in_ball<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        center: &Vector,
        radius: f64,
    ) -> Option<Vector> {
        (0..10_000)
            .map(|_| sample_ball(rng, center, radius))
            .find(|z| self.distance(z).map(|d| d == 0.0).unwrap_or(false))
    }

    /// Axis-aligned bounding cube `(center, half_width)`, if the set is bounded.
    pub fn bounding_cube(&self) -> Option<(Vector, f64)> {
        match &self.shape {
            Shape::Box { lower, upper } => {
                let c = (lower + upper) * 0.5;
                let half = (upper - lower).amax() * 0.5;
                Some((c, half))
            }
            Shape::Ball { center, radius } => Some((center.clone(), *radius)),
            _ => None,
        }
    }

    /// A uniform sample from the bounding cube, used by tests that need
    /// points around (not only inside) a bounded set.
    pub fn sample_around<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Option<Vector> {
        self.bounding_cube()
            .map(|(c, half)| sample_cube(rng, &c, half.max(1.0) * scale))
    }
}
