//! The two-model setup: per-model priors, prior model probabilities and the
//! unit-variance Gaussian data summary.

use crate::error::{Error, Result};
use crate::kernels;
use crate::scalar::Real;

/// Prior on θ under a single model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prior<T> {
    /// `N(0, variance)`.
    ZeroMeanNormal { variance: T },
    /// Dirac mass at `location`. Never approximated by a narrow normal.
    PointMass { location: T },
}

impl<T: Real> Prior<T> {
    pub fn normal(variance: T) -> Result<Self> {
        if variance > T::zero() && variance.is_finite() {
            Ok(Prior::ZeroMeanNormal { variance })
        } else {
            Err(Error::InvalidModel(format!("prior variance must be positive, got {variance}")))
        }
    }

    pub fn point_mass(location: T) -> Result<Self> {
        if location.is_finite() {
            Ok(Prior::PointMass { location })
        } else {
            Err(Error::InvalidModel(format!("point mass location must be finite, got {location}")))
        }
    }

    /// Density of the continuous part at θ (zero for a point mass).
    pub fn continuous_density(&self, theta: T) -> T {
        match *self {
            Prior::ZeroMeanNormal { variance } => {
                kernels::normal_pdf(theta, T::zero(), variance).unwrap_or_else(|_| T::zero())
            }
            Prior::PointMass { .. } => T::zero(),
        }
    }

    pub fn atom(&self) -> Option<T> {
        match *self {
            Prior::PointMass { location } => Some(location),
            Prior::ZeroMeanNormal { .. } => None,
        }
    }
}

/// An atom of probability mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T> {
    pub location: T,
    pub mass: T,
}

/// Value of the mixture prior at a point: its continuous density plus any atom
/// sitting exactly there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorDensity<T> {
    pub continuous: T,
    pub atom: Option<Atom<T>>,
}

/// M₀ versus M₁. M₁ is always a zero-mean normal; M₀ may be a normal or a point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPair<T> {
    prior0: Prior<T>,
    prior1: Prior<T>,
    prior_prob_m0: T,
}

impl<T: Real> ModelPair<T> {
    pub fn new(prior0: Prior<T>, prior1: Prior<T>, prior_prob_m0: T) -> Result<Self> {
        if !matches!(prior1, Prior::ZeroMeanNormal { .. }) {
            return Err(Error::InvalidModel("M1 prior must be a zero-mean normal".into()));
        }
        if !(prior_prob_m0 > T::zero() && prior_prob_m0 < T::one()) {
            return Err(Error::InvalidModel(format!(
                "prior probability of M0 must lie in (0, 1), got {prior_prob_m0}"
            )));
        }
        // re-validate through the checked constructors
        for prior in [prior0, prior1] {
            match prior {
                Prior::ZeroMeanNormal { variance } => {
                    Prior::normal(variance)?;
                }
                Prior::PointMass { location } => {
                    Prior::point_mass(location)?;
                }
            }
        }
        Ok(Self { prior0, prior1, prior_prob_m0 })
    }

    /// Two zero-mean normals with variances `g0` and `g1`.
    pub fn two_normals(g0: T, g1: T, prior_prob_m0: T) -> Result<Self> {
        Self::new(Prior::normal(g0)?, Prior::normal(g1)?, prior_prob_m0)
    }

    /// Spike-and-slab: point mass at `theta0` versus `N(0, g1)`.
    pub fn point_null(theta0: T, g1: T, prior_prob_m0: T) -> Result<Self> {
        Self::new(Prior::point_mass(theta0)?, Prior::normal(g1)?, prior_prob_m0)
    }

    pub fn prior0(&self) -> Prior<T> {
        self.prior0
    }

    pub fn prior1(&self) -> Prior<T> {
        self.prior1
    }

    pub fn prior_prob_m0(&self) -> T {
        self.prior_prob_m0
    }

    pub fn prior_prob_m1(&self) -> T {
        T::one() - self.prior_prob_m0
    }

    /// Variance of the M₁ slab.
    pub fn g1(&self) -> T {
        match self.prior1 {
            Prior::ZeroMeanNormal { variance } => variance,
            Prior::PointMass { .. } => unreachable!("validated in ModelPair::new"),
        }
    }

    pub fn is_point_null(&self) -> bool {
        matches!(self.prior0, Prior::PointMass { .. })
    }

    /// Location tested by the models: the atom if present, otherwise 0.
    pub fn null_location(&self) -> T {
        self.prior0.atom().unwrap_or_else(T::zero)
    }

    /// `Pr(M₀)π₀(θ) + Pr(M₁)π₁(θ)`, with a point-mass component reported as an
    /// atom rather than an infinite density.
    pub fn mixture_prior_density(&self, theta: T) -> PriorDensity<T> {
        let continuous = self.prior_prob_m0 * self.prior0.continuous_density(theta)
            + self.prior_prob_m1() * self.prior1.continuous_density(theta);
        let atom =
            self.prior0.atom().filter(|&loc| loc == theta).map(|location| Atom { location, mass: self.prior_prob_m0 });
        PriorDensity { continuous, atom }
    }

    /// Continuous part of the mixture prior density; the integrand for the
    /// continuous-prior limit results.
    pub fn continuous_prior_density(&self, theta: T) -> T {
        self.mixture_prior_density(theta).continuous
    }

    /// Prior mass carried by an atom, zero when both priors are continuous.
    pub fn prior_atom_mass(&self) -> T {
        if self.is_point_null() {
            self.prior_prob_m0
        } else {
            T::zero()
        }
    }
}

/// Sufficient statistics for `n` unit-variance normal observations.
///
/// `n` is a positive real so sample-size sweeps can be smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSummary<T> {
    n: T,
    z: T,
}

impl<T: Real> DataSummary<T> {
    /// From `z = √n·ȳ`.
    pub fn from_z(n: T, z: T) -> Result<Self> {
        if !(n >= T::one() && n.is_finite()) {
            return Err(Error::InvalidData(format!("sample size must be finite and at least 1, got {n}")));
        }
        if !z.is_finite() {
            return Err(Error::InvalidData(format!("z must be finite, got {z}")));
        }
        Ok(Self { n, z })
    }

    pub fn from_ybar(n: T, ybar: T) -> Result<Self> {
        if !ybar.is_finite() {
            return Err(Error::InvalidData(format!("sample mean must be finite, got {ybar}")));
        }
        Self::from_z(n, n.sqrt() * ybar)
    }

    pub fn from_observations(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("no observations".into()));
        }
        let n = T::from_usize(values.len()).expect("sample size fits the scalar type");
        let sum = values.iter().fold(T::zero(), |acc, &y| acc + y);
        Self::from_ybar(n, sum / n)
    }

    pub fn n(&self) -> T {
        self.n
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn ybar(&self) -> T {
        self.z / self.n.sqrt()
    }

    /// One-sided p-value against `H₀: θ < null_location`, i.e. `1 − Φ(√n(ȳ − θ₀))`.
    pub fn p_value_one_sided(&self, null_location: T) -> T {
        kernels::std_normal_sf(self.z - self.n.sqrt() * null_location)
    }
}
