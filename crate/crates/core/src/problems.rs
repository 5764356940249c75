//! Catalog of quasi-convex objectives with certified optimal data.
//!
//! Each [`ProblemInstance`] bundles an objective, a feasible set, the known
//! optimal value and optimal set, a Hölder certificate and (optionally) a
//! weak-sharp-minima certificate. The universally quantified conditions behind
//! the certificates are checked by randomized sampling.

use rand::Rng;

use crate::sets::{FeasibleSet, Shape};
use crate::vector::{check_dim, first_basis, random_orthogonal, sample_ball, sample_cube, Vector};
use crate::{Error, Result};

/// Absolute slack used by every sampled inequality check.
pub const SAMPLE_TOL: f64 = 1e-9;

/// Maximum number of rejected draws per requested sample.
const REJECTION_BUDGET: usize = 1000;

/// Catalog objective.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    /// `f(x) = M ‖x − center‖^p`
    PowerNorm {
        center: Vector,
        exponent: f64,
        modulus: f64,
    },
    /// `f(x) = ‖x − center‖^inner` inside the unit ball around `center`,
    /// `‖x − center‖^outer` outside it.
    PiecewisePower {
        center: Vector,
        outer: f64,
        inner: f64,
    },
    /// `f(x) = (<numer, x> + numer_offset) / (<denom, x> + denom_offset)`
    LinearFractional {
        numer: Vector,
        numer_offset: f64,
        denom: Vector,
        denom_offset: f64,
    },
}

/// Scalar profile `t ↦ φ(t)` of an objective of the form `φ(‖x − center‖)`.
#[derive(Debug, Clone, Copy)]
enum Radial {
    Power { p: f64, m: f64 },
    Piecewise { p: f64, q: f64 },
}

impl Radial {
    fn value(self, t: f64) -> f64 {
        match self {
            Radial::Power { p, m } => m * t.powf(p),
            Radial::Piecewise { p, q } => {
                if t <= 1.0 {
                    t.powf(q)
                } else {
                    t.powf(p)
                }
            }
        }
    }

    /// Radius of the strict sublevel set `{φ < level}`.
    fn radius_at(self, level: f64) -> f64 {
        if level <= 0.0 {
            return 0.0;
        }
        match self {
            Radial::Power { p, m } => (level / m).powf(1.0 / p),
            Radial::Piecewise { p, q } => {
                if level <= 1.0 {
                    level.powf(1.0 / q)
                } else {
                    level.powf(1.0 / p)
                }
            }
        }
    }
}

impl ObjectiveSpec {
    pub fn dim(&self) -> usize {
        match self {
            ObjectiveSpec::PowerNorm { center, .. }
            | ObjectiveSpec::PiecewisePower { center, .. } => center.len(),
            ObjectiveSpec::LinearFractional { numer, .. } => numer.len(),
        }
    }

    fn radial(&self) -> Option<(&Vector, Radial)> {
        match self {
            ObjectiveSpec::PowerNorm {
                center,
                exponent,
                modulus,
            } => Some((
                center,
                Radial::Power {
                    p: *exponent,
                    m: *modulus,
                },
            )),
            ObjectiveSpec::PiecewisePower {
                center,
                outer,
                inner,
            } => Some((
                center,
                Radial::Piecewise {
                    p: *outer,
                    q: *inner,
                },
            )),
            ObjectiveSpec::LinearFractional { .. } => None,
        }
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        if let Some((center, profile)) = self.radial() {
            return Ok(profile.value((x - center).norm()));
        }
        let ObjectiveSpec::LinearFractional {
            numer,
            numer_offset,
            denom,
            denom_offset,
        } = self
        else {
            unreachable!()
        };
        let den = denom.dot(x) + denom_offset;
        if !(den > 0.0) {
            return Err(Error::Domain(format!(
                "linear-fractional denominator is {den:e} (must be positive)"
            )));
        }
        Ok((numer.dot(x) + numer_offset) / den)
    }
}

/// Hölder condition of order `p` with modulus `L`, restricted to the optimal set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HolderCertificate {
    pub order: f64,
    pub modulus: f64,
}

impl HolderCertificate {
    pub fn new(order: f64, modulus: f64) -> Result<Self> {
        if !(order > 0.0 && order <= 1.0) {
            return Err(Error::param(
                "order",
                format!("Hölder order must lie in (0,1], got {order}"),
            ));
        }
        if !(modulus > 0.0 && modulus.is_finite()) {
            return Err(Error::param(
                "modulus",
                format!("must be positive, got {modulus}"),
            ));
        }
        Ok(Self { order, modulus })
    }
}

/// Weak sharp minima of order `q` with modulus `η`, certified on `B(0, radius)`.
///
/// `radius = ∞` certifies the bound globally. Orders below one are accepted.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SharpCertificate {
    pub order: f64,
    pub modulus: f64,
    pub radius: f64,
}

impl SharpCertificate {
    pub fn new(order: f64, modulus: f64, radius: f64) -> Result<Self> {
        if !(order > 0.0 && order.is_finite()) {
            return Err(Error::param(
                "order",
                format!("must be positive, got {order}"),
            ));
        }
        if !(modulus > 0.0 && modulus.is_finite()) {
            return Err(Error::param(
                "modulus",
                format!("must be positive, got {modulus}"),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::param(
                "radius",
                format!("must be positive, got {radius}"),
            ));
        }
        Ok(Self {
            order,
            modulus,
            radius,
        })
    }

    pub fn global(order: f64, modulus: f64) -> Result<Self> {
        Self::new(order, modulus, f64::INFINITY)
    }
}

/// A quasi-convex program `min f(x) s.t. x ∈ X` with known optimal data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    name: String,
    objective: ObjectiveSpec,
    feasible: FeasibleSet,
    optimal_value: f64,
    optimal_set: FeasibleSet,
    holder: HolderCertificate,
    sharp: Option<SharpCertificate>,
}

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(name, format!("must lie in (0,1], got {p}")));
    }
    Ok(())
}

impl ProblemInstance {
    /// Assemble an instance from explicit parts without deriving anything.
    pub fn from_parts(
        name: impl Into<String>,
        objective: ObjectiveSpec,
        feasible: FeasibleSet,
        optimal_value: f64,
        optimal_set: FeasibleSet,
        holder: HolderCertificate,
        sharp: Option<SharpCertificate>,
    ) -> Result<Self> {
        let dim = objective.dim();
        for d in [feasible.dim(), optimal_set.dim()] {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: d,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            objective,
            feasible,
            optimal_value,
            optimal_set,
            holder,
            sharp,
        })
    }

    fn radial_instance(
        name: &str,
        objective: ObjectiveSpec,
        feasible: FeasibleSet,
        holder: HolderCertificate,
        sharp: Option<SharpCertificate>,
    ) -> Result<Self> {
        let (center, _) = objective.radial().expect("radial objective");
        check_dim(feasible.dim(), center)?;
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::param("center", "must be finite"));
        }
        let gap = feasible.distance(center)?;
        if gap > 0.0 {
            return Err(Error::param(
                "center",
                format!("must lie in the feasible set (distance {gap:e})"),
            ));
        }
        let optimal_set = FeasibleSet::point(center.as_slice().to_vec())?;
        Self::from_parts(name, objective, feasible, 0.0, optimal_set, holder, sharp)
    }

    /// `f(x) = M ‖x − center‖^p` over `feasible`; the center must be feasible.
    pub fn power_norm(
        center: impl Into<Vec<f64>>,
        exponent: f64,
        modulus: f64,
        feasible: FeasibleSet,
    ) -> Result<Self> {
        check_exponent("p", exponent)?;
        let holder = HolderCertificate::new(exponent, modulus)?;
        let sharp = SharpCertificate::global(exponent, modulus)?;
        let objective = ObjectiveSpec::PowerNorm {
            center: Vector::from_vec(center.into()),
            exponent,
            modulus,
        };
        Self::radial_instance("power_norm", objective, feasible, holder, Some(sharp))
    }

    /// `‖x − center‖^q` inside the unit ball around the center and
    /// `‖x − center‖^p` outside, with `0 < p ≤ 1` and `q ≥ p`.
    pub fn piecewise_power(
        center: impl Into<Vec<f64>>,
        outer: f64,
        inner: f64,
        feasible: FeasibleSet,
    ) -> Result<Self> {
        check_exponent("p", outer)?;
        if !(inner >= outer && inner.is_finite()) {
            return Err(Error::param(
                "q",
                format!("inner order must be ≥ p = {outer}, got {inner}"),
            ));
        }
        let holder = HolderCertificate::new(outer, 1.0)?;
        let objective = ObjectiveSpec::PiecewisePower {
            center: Vector::from_vec(center.into()),
            outer,
            inner,
        };
        let mut problem =
            Self::radial_instance("piecewise_power", objective, feasible, holder, None)?;
        problem.sharp = problem.sharp_certificate_of_order(inner, 1.0);
        Ok(problem)
    }

    /// Linear-fractional objective over a box on which the denominator is positive.
    ///
    /// The optimal value and optimal face are found by vertex enumeration, so
    /// the box dimension is limited to 16.
    pub fn linear_fractional(
        numer: impl Into<Vec<f64>>,
        numer_offset: f64,
        denom: impl Into<Vec<f64>>,
        denom_offset: f64,
        feasible: FeasibleSet,
    ) -> Result<Self> {
        let numer = Vector::from_vec(numer.into());
        let denom = Vector::from_vec(denom.into());
        check_dim(numer.len(), &denom)?;
        check_dim(feasible.dim(), &numer)?;
        let Shape::Box { lower, upper } = feasible.shape().clone() else {
            return Err(Error::param(
                "feasible",
                "linear_fractional requires a box feasible set",
            ));
        };
        let n = lower.len();
        if n > 16 {
            return Err(Error::param(
                "feasible",
                "linear_fractional supports at most 16 dimensions",
            ));
        }
        // minimum of an affine form over a box face
        let affine_min = |a: &Vector, offset: f64, lo: &Vector, hi: &Vector| {
            offset
                + (0..n)
                    .map(|i| (a[i] * lo[i]).min(a[i] * hi[i]))
                    .sum::<f64>()
        };
        let affine_max = |a: &Vector, offset: f64, lo: &Vector, hi: &Vector| {
            offset
                + (0..n)
                    .map(|i| (a[i] * lo[i]).max(a[i] * hi[i]))
                    .sum::<f64>()
        };
        let den_min = affine_min(&denom, denom_offset, &lower, &upper);
        if !(den_min > 0.0) {
            return Err(Error::param(
                "denom",
                format!("denominator must be positive on the feasible set (minimum {den_min:e})"),
            ));
        }
        let objective = ObjectiveSpec::LinearFractional {
            numer: numer.clone(),
            numer_offset,
            denom: denom.clone(),
            denom_offset,
        };
        let (mut f_min, mut f_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for mask in 0u32..(1u32 << n) {
            let v = Vector::from_fn(n, |i, _| {
                if mask >> i & 1 == 1 {
                    upper[i]
                } else {
                    lower[i]
                }
            });
            let f = objective.value(&v)?;
            f_min = f_min.min(f);
            f_max = f_max.max(f);
        }
        let w = &numer - &denom * f_min;
        let w_tol = 1e-12 * (numer.norm() + f_min.abs() * denom.norm()).max(1e-300);
        let mut face_lo = lower.clone();
        let mut face_hi = upper.clone();
        for i in 0..n {
            if w[i] > w_tol {
                face_hi[i] = lower[i];
            } else if w[i] < -w_tol {
                face_lo[i] = upper[i];
            }
        }
        let optimal_set =
            FeasibleSet::boxed(face_lo.as_slice().to_vec(), face_hi.as_slice().to_vec())?;
        // <c − ℓe, x − x*> = den(x*)(f(x) − f*) on the level ℓ = f(x); the
        // modulus bounds ‖c − ℓe‖ / den(x*) over ℓ ∈ [f*, f_max].
        let w_max = (&numer - &denom * f_max).norm().max(w.norm());
        let den_star = affine_min(&denom, denom_offset, &face_lo, &face_hi);
        let holder = if w_max > 0.0 {
            HolderCertificate::new(1.0, w_max / den_star)?
        } else {
            HolderCertificate::new(1.0, 1.0)?
        };
        let active_min = (0..n)
            .filter(|&i| w[i].abs() > w_tol)
            .map(|i| w[i].abs())
            .fold(f64::INFINITY, f64::min);
        let den_max = affine_max(&denom, denom_offset, &lower, &upper);
        let sharp = if active_min.is_finite() {
            Some(SharpCertificate::global(1.0, active_min / den_max)?)
        } else {
            None
        };
        Self::from_parts(
            "linear_fractional",
            objective,
            feasible,
            f_min,
            optimal_set,
            holder,
            sharp,
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_sharp(mut self, sharp: Option<SharpCertificate>) -> Self {
        self.sharp = sharp;
        self
    }

    pub fn with_holder(mut self, holder: HolderCertificate) -> Self {
        self.holder = holder;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objective(&self) -> &ObjectiveSpec {
        &self.objective
    }

    pub fn feasible(&self) -> &FeasibleSet {
        &self.feasible
    }

    pub fn optimal_value(&self) -> f64 {
        self.optimal_value
    }

    pub fn optimal_set(&self) -> &FeasibleSet {
        &self.optimal_set
    }

    pub fn holder(&self) -> HolderCertificate {
        self.holder
    }

    pub fn sharp(&self) -> Option<SharpCertificate> {
        self.sharp
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        self.objective.value(x)
    }

    pub fn distance_to_optimum(&self, x: &Vector) -> Result<f64> {
        self.optimal_set.distance(x)
    }

    /// Unit quasi-subgradient: a unit normal of the strict sublevel set at `x`.
    ///
    /// Where the strict sublevel set is empty every direction qualifies and
    /// the first basis vector is returned.
    pub fn quasi_subgradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x)?;
        if let Some((center, _)) = self.objective.radial() {
            let d = x - center;
            let n = d.norm();
            return Ok(if n > 0.0 { d / n } else { first_basis(x.len()) });
        }
        let level = self.value(x)?;
        Ok(self
            .level_normal(level)
            .unwrap_or_else(|| first_basis(x.len())))
    }

    /// Unit normal `(c − ℓe)/‖c − ℓe‖` of the linear-fractional level set at `ℓ`.
    fn level_normal(&self, level: f64) -> Option<Vector> {
        let ObjectiveSpec::LinearFractional { numer, denom, .. } = &self.objective else {
            return None;
        };
        let w = numer - denom * level;
        let n = w.norm();
        (n > 0.0).then(|| w / n)
    }

    /// Unit ε-quasi-subgradient with an adversarial tilt.
    ///
    /// `tilt = 0` returns the exact quasi-subgradient. For radially structured
    /// objectives `tilt = 1` rotates it, within a random 2-plane containing the
    /// radial direction, to the largest angle still normal to the strict
    /// sublevel set at level `f(x) − ε`. For linear-fractional objectives the
    /// tilt interpolates between the level normals at `f(x)` and `f(x) − ε`.
    pub fn eps_quasi_subgradient<R: Rng + ?Sized>(
        &self,
        x: &Vector,
        eps: f64,
        tilt: f64,
        rng: &mut R,
    ) -> Result<Vector> {
        if !(eps > 0.0) {
            return Err(Error::param(
                "epsilon",
                format!("must be positive, got {eps}"),
            ));
        }
        if !(0.0..=1.0).contains(&tilt) {
            return Err(Error::param(
                "tilt",
                format!("must lie in [0,1], got {tilt}"),
            ));
        }
        let fx = self.value(x)?;
        let exact = self.quasi_subgradient(x)?;
        if fx <= self.optimal_value + eps || tilt == 0.0 {
            return Ok(exact);
        }
        let level = fx - eps;
        if let Some((center, profile)) = self.objective.radial() {
            let r = (x - center).norm();
            let rho = profile.radius_at(level);
            let max_angle = (rho / r).min(1.0).acos();
            let angle = tilt * max_angle;
            return Ok(match random_orthogonal(rng, &exact) {
                Some(w) => exact * angle.cos() + w * angle.sin(),
                None => exact,
            });
        }
        let Some(relaxed) = self.level_normal(level) else {
            return Ok(exact);
        };
        let mix = exact * (1.0 - tilt) + relaxed * tilt;
        let n = mix.norm();
        Ok(if n > 0.0 {
            mix / n
        } else {
            self.quasi_subgradient(x)?
        })
    }

    /// Lower bound `((f(x) − f* − ε)/L)^{1/p}` on `<g, x − x*>` for unit
    /// ε-quasi-subgradients `g`, or `None` when `f(x) ≤ f* + ε`.
    pub fn inner_product_lower_bound(&self, x: &Vector, eps: f64) -> Result<Option<f64>> {
        let excess = self.value(x)? - self.optimal_value - eps;
        Ok((excess > 0.0).then(|| (excess / self.holder.modulus).powf(1.0 / self.holder.order)))
    }

    /// Center used to bound sublevel-set sampling around `x`.
    fn sampling_center(&self, x: &Vector) -> Result<Vector> {
        match self.objective.radial() {
            Some((center, _)) => Ok(center.clone()),
            None => self.optimal_set.project(x),
        }
    }

    /// Sampled check of `<g, y − x> ≤ 0` over the strict sublevel set at
    /// `f(x) − ε`.
    ///
    /// Points are drawn by rejection from the cube of side
    /// `4·max(1, ‖x − center‖)` around the objective center (the nearest
    /// optimal point for linear-fractional objectives). The check is vacuously
    /// true when the sublevel set is empty.
    pub fn check_subgradient_certificate<R: Rng + ?Sized>(
        &self,
        x: &Vector,
        g: &Vector,
        eps: f64,
        samples: usize,
        rng: &mut R,
    ) -> Result<bool> {
        check_dim(self.dim(), g)?;
        if (g.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "g",
                format!("must have unit norm, got {}", g.norm()),
            ));
        }
        if !(eps >= 0.0) {
            return Err(Error::param("epsilon", "must be nonnegative"));
        }
        let level = self.value(x)? - eps;
        if level <= self.optimal_value {
            return Ok(true);
        }
        let center = self.sampling_center(x)?;
        let half = 2.0 * (x - &center).norm().max(1.0);
        let mut accepted = 0;
        for _ in 0..samples.saturating_mul(REJECTION_BUDGET) {
            if accepted == samples {
                break;
            }
            let y = sample_cube(rng, &center, half);
            let Ok(fy) = self.value(&y) else { continue };
            if fy < level {
                accepted += 1;
                if g.dot(&(y - x)) > SAMPLE_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Sampled check of `f(x) − f* ≤ L dist^p(x, X*)` over `B(0, box_radius)`.
    ///
    /// Linear-fractional objectives are only defined where the denominator is
    /// positive, so for them the samples are restricted to the feasible box.
    pub fn validate_holder<R: Rng + ?Sized>(
        &self,
        samples: usize,
        box_radius: f64,
        rng: &mut R,
    ) -> Result<bool> {
        if !(box_radius > 0.0) {
            return Err(Error::param("box_radius", "must be positive"));
        }
        let origin = Vector::zeros(self.dim());
        let HolderCertificate { order, modulus } = self.holder;
        for _ in 0..samples {
            let x = match self.objective {
                ObjectiveSpec::LinearFractional { .. } => {
                    match self.feasible.sample_in_ball(rng, &origin, box_radius) {
                        Some(x) => x,
                        None => continue,
                    }
                }
                _ => sample_ball(rng, &origin, box_radius),
            };
            let lhs = self.value(&x)? - self.optimal_value;
            let rhs = modulus * self.distance_to_optimum(&x)?.powf(order);
            if lhs > rhs + SAMPLE_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sampled check of `f(y) − f* ≥ η dist^q(y, X*)` over `B(0, r) ∩ X`.
    ///
    /// A global certificate on an unbounded feasible set is sampled on
    /// `B(0, 1000)`.
    pub fn validate_sharp<R: Rng + ?Sized>(
        &self,
        cert: &SharpCertificate,
        samples: usize,
        rng: &mut R,
    ) -> Result<bool> {
        let origin = Vector::zeros(self.dim());
        for _ in 0..samples {
            let y = if cert.radius.is_finite() {
                self.sample_feasible_within(rng, cert.radius)
            } else if self.feasible.is_bounded() {
                self.feasible.sample(rng, &origin, 0.0)
            } else {
                self.sample_feasible_within(rng, 1000.0)
            };
            let Some(y) = y else { continue };
            let lhs = self.value(&y)? - self.optimal_value;
            let rhs = cert.modulus * self.distance_to_optimum(&y)?.powf(cert.order);
            if lhs < rhs - SAMPLE_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Uniform draw from `B(0, r) ∩ X`, sampling whichever of the two regions
    /// is smaller and rejecting.
    fn sample_feasible_within<R: Rng + ?Sized>(&self, rng: &mut R, r: f64) -> Option<Vector> {
        let origin = Vector::zeros(self.dim());
        let set_is_smaller = self
            .feasible
            .bounding_cube()
            .map(|(_, half)| half < r)
            .unwrap_or(false);
        if set_is_smaller {
            (0..10_000)
                .filter_map(|_| self.feasible.sample(rng, &origin, 0.0))
                .find(|y| y.norm() <= r)
        } else {
            self.feasible.sample_in_ball(rng, &origin, r)
        }
    }

    /// Weak-sharp-minima certificate of order `q` on `B(0, r)` derived from
    /// the radial profile, or `None` when no positive modulus exists (or the
    /// objective is not radial).
    ///
    /// With `R = r + ‖center‖`, the modulus is `inf_{0 < t ≤ R} φ(t)/t^q`.
    pub fn sharp_certificate_of_order(&self, q: f64, r: f64) -> Option<SharpCertificate> {
        let (center, profile) = self.objective.radial()?;
        let reach = r + center.norm();
        let modulus = match profile {
            Radial::Power { p, m } => {
                if q < p || !reach.is_finite() && q > p {
                    return None;
                }
                m * reach.powf(p - q)
            }
            Radial::Piecewise { p, q: inner } => {
                if q < inner || !reach.is_finite() && q > p {
                    return None;
                }
                let inside = reach.min(1.0).powf(inner - q);
                let outside = if reach > 1.0 {
                    reach.powf(p - q)
                } else {
                    f64::INFINITY
                };
                inside.min(outside)
            }
        };
        SharpCertificate::new(q, modulus, r).ok()
    }
}

/// Reference instances covering every objective family and feasible-set shape.
pub fn catalog() -> Vec<ProblemInstance> {
    let build = || -> Result<Vec<ProblemInstance>> {
        Ok(vec![
            ProblemInstance::power_norm(
                vec![0.0, 0.0],
                1.0,
                1.0,
                FeasibleSet::boxed(vec![-10.0; 2], vec![10.0; 2])?,
            )?
            .with_name("norm_box"),
            ProblemInstance::power_norm(
                vec![1.0, -1.0],
                0.5,
                2.0,
                FeasibleSet::ball(vec![0.0, 0.0], 5.0)?,
            )?
            .with_name("sqrt_norm_ball"),
            ProblemInstance::piecewise_power(
                vec![0.0, 0.0],
                1.0,
                2.0,
                FeasibleSet::whole_space(2)?,
            )?
            .with_name("piecewise_plane"),
            ProblemInstance::piecewise_power(
                vec![0.5, 0.0, -0.5],
                0.5,
                1.5,
                FeasibleSet::halfspace(vec![1.0, 1.0, 1.0], 1.0)?,
            )?
            .with_name("piecewise_halfspace"),
            ProblemInstance::linear_fractional(
                vec![1.0, -1.0],
                2.0,
                vec![0.2, 0.1],
                1.0,
                FeasibleSet::boxed(vec![0.0; 2], vec![2.0; 2])?,
            )?
            .with_name("ratio_box"),
        ])
    };
    build().expect("catalog parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    fn plane() -> FeasibleSet {
        FeasibleSet::whole_space(2).unwrap()
    }

    fn norm_problem(p: f64, m: f64) -> ProblemInstance {
        ProblemInstance::power_norm(vec![0.0, 0.0], p, m, plane()).unwrap()
    }

    #[test]
    fn value_examples() {
        assert_eq!(norm_problem(1.0, 1.0).value(&v(&[3.0, 4.0])).unwrap(), 5.0);
        let pw = ProblemInstance::piecewise_power(vec![0.0, 0.0], 1.0, 2.0, plane()).unwrap();
        assert_eq!(pw.value(&v(&[0.5, 0.0])).unwrap(), 0.25);
        assert_eq!(pw.value(&v(&[2.0, 0.0])).unwrap(), 2.0);
        // continuous at the breakpoint
        assert_eq!(pw.value(&v(&[1.0, 0.0])).unwrap(), 1.0);
        assert!((pw.value(&v(&[1.0 + 1e-12, 0.0])).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn linear_fractional_domain_error() {
        let obj = ObjectiveSpec::LinearFractional {
            numer: v(&[1.0, 0.0]),
            numer_offset: 0.0,
            denom: v(&[1.0, 0.0]),
            denom_offset: 0.0,
        };
        assert!(matches!(obj.value(&v(&[-1.0, 0.0])), Err(Error::Domain(_))));
        assert!(matches!(obj.value(&v(&[0.0, 3.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn linear_fractional_requires_positive_denominator() {
        let set = FeasibleSet::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let err = ProblemInstance::linear_fractional(vec![1.0, 0.0], 0.0, vec![1.0, 0.0], 0.5, set);
        assert!(err.is_err());
        let ball = FeasibleSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(
            ProblemInstance::linear_fractional(vec![1.0, 0.0], 0.0, vec![0.0, 0.0], 1.0, ball)
                .is_err()
        );
    }

    #[test]
    fn linear_fractional_optimal_face() {
        let set = FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let lf = ProblemInstance::linear_fractional(vec![1.0, 0.0], 0.0, vec![0.0, 0.0], 1.0, set)
            .unwrap();
        assert_eq!(lf.optimal_value(), 0.0);
        assert_eq!(lf.distance_to_optimum(&v(&[0.7, 0.3])).unwrap(), 0.7);
        assert_eq!(lf.distance_to_optimum(&v(&[0.0, 0.9])).unwrap(), 0.0);
        assert_eq!(
            lf.holder(),
            HolderCertificate {
                order: 1.0,
                modulus: 1.0
            }
        );
    }

    #[test]
    fn quasi_subgradient_examples() {
        let half = norm_problem(0.5, 1.0);
        assert_eq!(
            half.quasi_subgradient(&v(&[4.0, 0.0])).unwrap(),
            v(&[1.0, 0.0])
        );
        let one = norm_problem(1.0, 1.0);
        assert_eq!(
            one.quasi_subgradient(&v(&[0.0, 0.0])).unwrap(),
            v(&[1.0, 0.0])
        );
        let set = FeasibleSet::boxed(vec![0.0, 0.0], vec![5.0, 5.0]).unwrap();
        let lf = ProblemInstance::linear_fractional(vec![1.0, 0.0], 0.0, vec![0.0, 0.0], 1.0, set)
            .unwrap();
        let g = lf.quasi_subgradient(&v(&[2.0, 3.0])).unwrap();
        assert!((g.clone() - v(&[1.0, 0.0])).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(lf
            .check_subgradient_certificate(&v(&[2.0, 3.0]), &g, 0.0, 10_000, &mut rng)
            .unwrap());
    }

    #[test]
    fn eps_subgradient_tilt_examples() {
        let p = norm_problem(1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = v(&[2.0, 0.0]);
        let g0 = p.eps_quasi_subgradient(&x, 1.0, 0.0, &mut rng).unwrap();
        assert_eq!(g0, v(&[1.0, 0.0]));
        let g1 = p.eps_quasi_subgradient(&x, 1.0, 1.0, &mut rng).unwrap();
        assert!((g1.norm() - 1.0).abs() < 1e-12);
        assert!((g1.dot(&x) - 1.0).abs() < 1e-12);
        assert!((g1[0] - 0.5).abs() < 1e-12);
        assert!((g1[1].abs() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(p
            .check_subgradient_certificate(&x, &g1, 1.0, 10_000, &mut rng)
            .unwrap());
        // at a point already within ε of optimal the exact direction comes back
        let near = v(&[0.5, 0.0]);
        assert_eq!(
            p.eps_quasi_subgradient(&near, 1.0, 1.0, &mut rng).unwrap(),
            p.quasi_subgradient(&near).unwrap()
        );
        assert!(p.eps_quasi_subgradient(&x, 0.0, 0.5, &mut rng).is_err());
        assert!(p.eps_quasi_subgradient(&x, 1.0, 1.5, &mut rng).is_err());
    }

    #[test]
    fn distance_examples() {
        let p = norm_problem(1.0, 1.0);
        assert_eq!(p.distance_to_optimum(&v(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(p.distance_to_optimum(&v(&[0.0, 0.0])).unwrap(), 0.0);
        let ball_opt = ProblemInstance::from_parts(
            "ring",
            ObjectiveSpec::PowerNorm {
                center: v(&[0.0, 0.0]),
                exponent: 1.0,
                modulus: 1.0,
            },
            plane(),
            0.0,
            FeasibleSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
            HolderCertificate::new(1.0, 1.0).unwrap(),
            None,
        )
        .unwrap();
        assert!((ball_opt.distance_to_optimum(&v(&[3.0, 4.0])).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn certificate_check_examples() {
        let p = norm_problem(1.0, 1.0);
        let x = v(&[2.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(p
            .check_subgradient_certificate(&x, &v(&[1.0, 0.0]), 0.0, 10_000, &mut rng)
            .unwrap());
        assert!(!p
            .check_subgradient_certificate(&x, &v(&[-1.0, 0.0]), 0.0, 10_000, &mut rng)
            .unwrap());
        let g = v(&[0.5, 3f64.sqrt() / 2.0]);
        assert!(p
            .check_subgradient_certificate(&x, &g, 1.0, 10_000, &mut rng)
            .unwrap());
        // empty sublevel set
        assert!(p
            .check_subgradient_certificate(&x, &v(&[-1.0, 0.0]), 2.0, 10, &mut rng)
            .unwrap());
        assert!(p
            .check_subgradient_certificate(&x, &v(&[2.0, 0.0]), 0.0, 10, &mut rng)
            .is_err());
    }

    #[test]
    fn holder_validation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [0.3, 0.5, 1.0] {
            assert!(norm_problem(p, 2.5)
                .validate_holder(10_000, 10.0, &mut rng)
                .unwrap());
        }
        let pw = ProblemInstance::piecewise_power(vec![0.0, 0.0], 1.0, 2.0, plane()).unwrap();
        assert!(pw.validate_holder(10_000, 5.0, &mut rng).unwrap());
        let wrong = norm_problem(1.0, 2.0).with_holder(HolderCertificate::new(1.0, 1.0).unwrap());
        assert!(!wrong.validate_holder(10_000, 2.0, &mut rng).unwrap());
    }

    #[test]
    fn sharp_validation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for p in [0.5, 1.0] {
            let prob = norm_problem(p, 1.0);
            let cert = SharpCertificate::new(p, 1.0, 7.0).unwrap();
            assert!(prob.validate_sharp(&cert, 10_000, &mut rng).unwrap());
        }
        let prob = norm_problem(1.0, 1.0);
        let r = 4.0;
        let ok = SharpCertificate::new(2.0, 1.0 / r, r).unwrap();
        assert!(prob.validate_sharp(&ok, 10_000, &mut rng).unwrap());
        let bad = SharpCertificate::new(2.0, 2.0 / r, r).unwrap();
        assert!(!prob.validate_sharp(&bad, 10_000, &mut rng).unwrap());
    }

    #[test]
    fn derived_sharp_certificates() {
        let line = FeasibleSet::boxed(vec![-10.0], vec![10.0]).unwrap();
        let p = ProblemInstance::power_norm(vec![0.0], 1.0, 1.0, line).unwrap();
        let cert = p.sharp_certificate_of_order(2.0, 10.0).unwrap();
        assert!((cert.modulus - 0.1).abs() < 1e-15);
        assert!(p.sharp_certificate_of_order(0.5, 10.0).is_none());
        assert!(p.sharp_certificate_of_order(2.0, f64::INFINITY).is_none());
        let pw = ProblemInstance::piecewise_power(vec![0.0, 0.0], 1.0, 2.0, plane()).unwrap();
        assert_eq!(pw.sharp().unwrap().modulus, 1.0);
        let wide = pw.sharp_certificate_of_order(2.0, 4.0).unwrap();
        assert!((wide.modulus - 0.25).abs() < 1e-15);
    }

    #[test]
    fn center_must_be_feasible() {
        let set = FeasibleSet::boxed(vec![1.0, 1.0], vec![2.0, 2.0]).unwrap();
        assert!(ProblemInstance::power_norm(vec![0.0, 0.0], 1.0, 1.0, set).is_err());
        assert!(ProblemInstance::power_norm(vec![0.0, 0.0], 1.5, 1.0, plane()).is_err());
        assert!(ProblemInstance::piecewise_power(vec![0.0, 0.0], 1.0, 0.5, plane()).is_err());
    }
}
