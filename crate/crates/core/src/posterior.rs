//! Bayes factors, posterior model probabilities and the model-averaged
//! posterior, including its atom-aware CDF and generalized quantile.

use crate::error::{Error, Result};
use crate::kernels;
use crate::model::{DataSummary, ModelPair, Prior};
use crate::scalar::Real;

/// `BF₀₁` carried in log space; the linear value overflows long before the
/// log does for large samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesFactor<T> {
    pub log_bf01: T,
}

impl<T: Real> BayesFactor<T> {
    /// Linear `BF₀₁`; `+∞` or `0` when not representable.
    pub fn bf01(&self) -> T {
        self.log_bf01.exp()
    }

    pub fn log_bf10(&self) -> T {
        -self.log_bf01
    }

    pub fn is_representable(&self) -> bool {
        let bf = self.bf01();
        bf.is_finite() && bf > T::zero()
    }
}

/// Posterior model probabilities `Pr(M₀|data)` and `Pr(M₁|data)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorModelProbs<T> {
    pub pm0: T,
    pub pm1: T,
}

/// Marginal-likelihood ratio M₀ : M₁ for the conjugate unit-variance model.
pub fn bayes_factor_01<T: Real>(pair: &ModelPair<T>, data: &DataSummary<T>) -> BayesFactor<T> {
    let half = T::lit(0.5);
    let (n, z) = (data.n(), data.z());
    let g1 = pair.g1();
    let ng1 = n * g1;
    let log_bf01 = match pair.prior0() {
        Prior::ZeroMeanNormal { variance: g0 } => {
            let ng0 = n * g0;
            half * (ng1.ln_1p() - ng0.ln_1p())
                + (g0 - g1) * n * z * z / ((T::one() + ng0) * (T::one() + ng1) * T::lit(2.0))
        }
        Prior::PointMass { location } => {
            // z² − (z − √n·θ₀)², exactly zero for θ₀ = 0
            let shift = n.sqrt() * location;
            let offset = shift * (T::lit(2.0) * z - shift);
            half * ng1.ln_1p() - half * z * z * ng1 / (T::one() + ng1) + half * offset
        }
    };
    BayesFactor { log_bf01 }
}

/// `Pr(M₀|data) = Pr(M₀) / (Pr(M₁)/BF₀₁ + Pr(M₀))`, evaluated as a logistic of
/// the posterior log-odds.
pub fn posterior_model_probs<T: Real>(pair: &ModelPair<T>, data: &DataSummary<T>) -> PosteriorModelProbs<T> {
    let bf = bayes_factor_01(pair, data);
    let log_odds = (pair.prior_prob_m0() / pair.prior_prob_m1()).ln() + bf.log_bf01;
    let pm0 = T::one() / (T::one() + (-log_odds).exp());
    let pm1 = T::one() / (T::one() + log_odds.exp());
    PosteriorModelProbs { pm0, pm1 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalComponent<T> {
    pub mean: T,
    pub variance: T,
}

impl<T: Real> NormalComponent<T> {
    /// Conjugate update of a `N(0, g)` prior: mean `z·g/(√n(1/n + g))`, variance `g/(1 + g·n)`.
    fn conjugate(g: T, data: &DataSummary<T>) -> Self {
        let (n, z) = (data.n(), data.z());
        let mean = z * g / (n.sqrt() * (n.recip() + g));
        let variance = g / (T::one() + g * n);
        Self { mean, variance }
    }

    pub fn sd(&self) -> T {
        self.variance.sqrt()
    }

    pub fn cdf(&self, t: T) -> T {
        kernels::std_normal_cdf((t - self.mean) / self.sd())
    }

    pub fn pdf(&self, t: T) -> T {
        kernels::std_normal_pdf((t - self.mean) / self.sd()) / self.sd()
    }
}

/// Posterior under a single model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component<T> {
    Normal(NormalComponent<T>),
    Atom { location: T },
}

/// The jump of the posterior CDF at the atom: `[Pr(θ<θ₀|data), Pr(θ≤θ₀|data)]`.
/// No quantile exists for levels strictly inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncredibilityInterval<T> {
    pub lower: T,
    pub upper: T,
    pub atom_location: T,
    /// Atom mass, the exact size of the jump; `upper − lower` may differ from it by rounding.
    pub mass: T,
}

impl<T: Real> IncredibilityInterval<T> {
    pub fn width(&self) -> T {
        self.mass
    }

    pub fn contains_strictly(&self, alpha: T) -> bool {
        self.lower < alpha && alpha < self.upper
    }

    pub fn contains(&self, alpha: T) -> bool {
        self.lower <= alpha && alpha <= self.upper
    }
}

/// Outcome of inverting the posterior CDF at level α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileResult<T> {
    /// `Pr(θ < θ*) = α` at a point of continuity.
    Exact(T),
    /// α is an endpoint of the jump. `open = false` means `θ* = θ₀` (α is the
    /// lower end, interval `[θ₀, ∞)`); `open = true` means `θ* = θ₀⁺` (α is the
    /// upper end, interval `(θ₀, ∞)`).
    AtAtom { location: T, open: bool },
    /// α lies strictly inside the jump; no θ* satisfies the equality.
    InsideJump(IncredibilityInterval<T>),
}

impl<T: Real> QuantileResult<T> {
    /// Boundary value and whether it is open, when a quantile exists.
    pub fn bound(&self) -> Option<(T, bool)> {
        match *self {
            QuantileResult::Exact(x) => Some((x, false)),
            QuantileResult::AtAtom { location, open } => Some((location, open)),
            QuantileResult::InsideJump(_) => None,
        }
    }

    pub fn exists(&self) -> bool {
        !matches!(self, QuantileResult::InsideJump(_))
    }
}

/// Mixture of the two model-conditional posteriors weighted by the posterior
/// model probabilities.
///
/// With a point-null M₀ this has a genuine atom of mass `Pr(M₀|data)` at θ₀,
/// which is what makes the CDF jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelAveragedPosterior<T> {
    weights: PosteriorModelProbs<T>,
    component0: Component<T>,
    component1: NormalComponent<T>,
    null_location: T,
}

pub fn model_averaged_posterior<T: Real>(pair: &ModelPair<T>, data: &DataSummary<T>) -> ModelAveragedPosterior<T> {
    let weights = posterior_model_probs(pair, data);
    let component0 = match pair.prior0() {
        Prior::ZeroMeanNormal { variance } => Component::Normal(NormalComponent::conjugate(variance, data)),
        Prior::PointMass { location } => Component::Atom { location },
    };
    ModelAveragedPosterior {
        weights,
        component0,
        component1: NormalComponent::conjugate(pair.g1(), data),
        null_location: pair.null_location(),
    }
}

impl<T: Real> ModelAveragedPosterior<T> {
    pub fn weights(&self) -> PosteriorModelProbs<T> {
        self.weights
    }

    pub fn component0(&self) -> Component<T> {
        self.component0
    }

    pub fn component1(&self) -> NormalComponent<T> {
        self.component1
    }

    /// Atom location, if M₀ is a point mass.
    pub fn atom_location(&self) -> Option<T> {
        match self.component0 {
            Component::Atom { location } => Some(location),
            Component::Normal(_) => None,
        }
    }

    /// Posterior mass at the atom (zero when atomless).
    pub fn atom_mass(&self) -> T {
        match self.component0 {
            Component::Atom { .. } => self.weights.pm0,
            Component::Normal(_) => T::zero(),
        }
    }

    pub fn null_location(&self) -> T {
        self.null_location
    }

    /// Continuous part of the posterior density at θ.
    pub fn continuous_density(&self, theta: T) -> T {
        let d1 = self.weights.pm1 * self.component1.pdf(theta);
        match self.component0 {
            Component::Normal(c) => d1 + self.weights.pm0 * c.pdf(theta),
            Component::Atom { .. } => d1,
        }
    }

    /// `Pr(θ < t|data)` when `closed` is false, `Pr(θ ≤ t|data)` when true.
    pub fn cdf(&self, t: T, closed: bool) -> T {
        let continuous = self.weights.pm1 * self.component1.cdf(t);
        let total = match self.component0 {
            Component::Normal(c) => continuous + self.weights.pm0 * c.cdf(t),
            Component::Atom { location } => {
                if t > location || (closed && t == location) {
                    continuous + self.weights.pm0
                } else {
                    continuous
                }
            }
        };
        // pm0 + pm1 can round to just above 1
        total.min(T::one())
    }

    /// Jump bounds at the atom; degenerate `[c, c]` at the null location when atomless.
    pub fn incredibility_interval(&self) -> IncredibilityInterval<T> {
        let at = self.atom_location().unwrap_or(self.null_location);
        let lower = self.cdf(at, false);
        let upper = self.cdf(at, true);
        IncredibilityInterval { lower, upper, atom_location: at, mass: self.atom_mass() }
    }

    /// Generalized inverse of `t ↦ Pr(θ < t|data)` at level α.
    pub fn quantile(&self, alpha: T) -> Result<QuantileResult<T>> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::Domain(format!("level must lie in (0, 1), got {alpha}")));
        }
        let (lo, hi) = match self.atom_location() {
            None => (None, None),
            Some(location) => {
                let jump = self.incredibility_interval();
                if alpha == jump.lower {
                    return Ok(QuantileResult::AtAtom { location, open: false });
                }
                if alpha == jump.upper {
                    return Ok(QuantileResult::AtAtom { location, open: true });
                }
                if jump.contains_strictly(alpha) {
                    return Ok(QuantileResult::InsideJump(jump));
                }
                if alpha < jump.lower {
                    (None, Some(location))
                } else {
                    (Some(location), None)
                }
            }
        };
        self.bisect(alpha, lo, hi).map(QuantileResult::Exact)
    }

    fn bisect(&self, alpha: T, lo: Option<T>, hi: Option<T>) -> Result<T> {
        let f = |t: T| self.cdf(t, false);
        let (center, spread) = self.bracket_scale();
        let mut step = T::lit(12.0) * spread;
        let mut lo = match lo {
            Some(lo) => lo,
            None => widen(&f, alpha, center - step, -step, |v| v < alpha)?,
        };
        step = T::lit(12.0) * spread;
        let mut hi = match hi {
            Some(hi) => hi,
            None => widen(&f, alpha, center + step, step, |v| v >= alpha)?,
        };
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        for _ in 0..4096 {
            let mid = lo + (hi - lo) * T::lit(0.5);
            if !(mid > lo && mid < hi) {
                break;
            }
            if f(mid) < alpha {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::lit(1e-15) * T::one().max(hi.abs()) {
                break;
            }
        }
        let (flo, fhi) = (f(lo), f(hi));
        Ok(if (flo - alpha).abs() <= (fhi - alpha).abs() { lo } else { hi })
    }

    /// Center and width of the widest component, for bracketing.
    fn bracket_scale(&self) -> (T, T) {
        let c1 = self.component1;
        match self.component0 {
            Component::Normal(c0) if c0.sd() > c1.sd() => (c0.mean, c0.sd()),
            _ => (c1.mean, c1.sd()),
        }
    }
}

fn widen<T: Real, F: Fn(T) -> T, P: Fn(T) -> bool>(f: &F, alpha: T, start: T, step: T, ok: P) -> Result<T> {
    let mut x = start;
    let mut step = step;
    for _ in 0..200 {
        if ok(f(x)) {
            return Ok(x);
        }
        x = x + step;
        step = step * T::lit(2.0);
    }
    Err(Error::NoBracket(alpha.as_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn point_null(n: f64, z: f64) -> ModelAveragedPosterior<f64> {
        let pair = ModelPair::point_null(0.0, 1.0, 0.5).unwrap();
        model_averaged_posterior(&pair, &DataSummary::from_z(n, z).unwrap())
    }

    #[test]
    fn bayes_factor_closed_forms() {
        let pair = ModelPair::point_null(0.0, 1.0, 0.5).unwrap();
        let data = DataSummary::from_z(10.0, 1.645).unwrap();
        // √11·exp(−10·1.645²/22)
        let want = 11.0_f64.sqrt() * (-10.0 * 1.645_f64 * 1.645 / 22.0).exp();
        assert_abs_diff_eq!(bayes_factor_01(&pair, &data).bf01(), want, epsilon = 1e-14);
        assert_abs_diff_eq!(want, 0.969_42, epsilon = 1e-5);

        let same = ModelPair::two_normals(0.7, 0.7, 0.5).unwrap();
        for (n, z) in [(1.0, 0.0), (5.0, 2.0), (1e9, -3.0)] {
            let bf = bayes_factor_01(&same, &DataSummary::from_z(n, z).unwrap());
            assert_eq!(bf.bf01(), 1.0);
        }
        // no-data limit
        let tiny = bayes_factor_01(&pair, &DataSummary::from_z(1.0, 0.0).unwrap());
        assert_abs_diff_eq!(tiny.log_bf01, 0.5 * 2.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn model_probs() {
        let same = ModelPair::two_normals(1.0, 1.0, 0.5).unwrap();
        let p = posterior_model_probs(&same, &DataSummary::from_z(5.0, 2.0).unwrap());
        assert_eq!((p.pm0, p.pm1), (0.5, 0.5));

        let mix = ModelPair::two_normals(0.02, 1.0, 0.5).unwrap();
        let p = posterior_model_probs(&mix, &DataSummary::from_z(1e10, 1.645).unwrap());
        assert_abs_diff_eq!(p.pm1, 0.124, epsilon = 1e-3);

        let pn = ModelPair::point_null(0.0, 1.0, 0.5).unwrap();
        let p = posterior_model_probs(&pn, &DataSummary::from_z(1e8, 1.645).unwrap());
        assert!(p.pm0 > 0.999);
        let p: PosteriorModelProbs<f64> = posterior_model_probs(&pn, &DataSummary::from_z(1e12, 1.645).unwrap());
        assert!((p.pm0 + p.pm1 - 1.0).abs() < 1e-12 && p.pm1 > 0.0);
    }

    #[test]
    fn point_null_components() {
        let post = point_null(10.0, 1.645);
        assert_abs_diff_eq!(post.atom_mass(), 0.492_23, epsilon = 1e-5);
        let c = post.component1();
        assert_abs_diff_eq!(c.mean, 1.645 * 10.0_f64.sqrt() / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.variance, 1.0 / 11.0, epsilon = 1e-16);

        let sym = point_null(25.0, 0.0);
        assert_eq!(sym.component1().mean, 0.0);
        assert_eq!(sym.atom_location(), Some(0.0));
        assert_abs_diff_eq!(sym.cdf(-0.3, false), 1.0 - sym.cdf(0.3, true), epsilon = 1e-15);
    }

    #[test]
    fn identical_models_reduce_to_single_posterior() {
        let pair = ModelPair::two_normals(1.0, 1.0, 0.3).unwrap();
        let post = model_averaged_posterior(&pair, &DataSummary::from_z(4.0, 1.0).unwrap());
        let single = NormalComponent { mean: 1.0 * 2.0 / 5.0, variance: 0.2 };
        for t in [-1.0, 0.0, 0.4, 2.0] {
            assert_abs_diff_eq!(post.cdf(t, false), single.cdf(t), epsilon = 1e-15);
        }
    }

    #[test]
    fn cdf_reference_values() {
        let p3 = point_null(3.0, 1.645);
        assert_abs_diff_eq!(p3.cdf(0.0, false), 0.045, epsilon = 5e-4);
        assert_abs_diff_eq!(p3.cdf(0.0, true), 0.465, epsilon = 5e-4);
        let p10 = point_null(10.0, 1.645);
        assert_abs_diff_eq!(p10.cdf(0.0, false), 0.030, epsilon = 5e-4);
        assert_abs_diff_eq!(p10.cdf(0.0, true), 0.522, epsilon = 5e-4);

        let mix = ModelPair::two_normals(0.02, 1.0, 0.5).unwrap();
        let post = model_averaged_posterior(&mix, &DataSummary::from_z(10.0, 1.645).unwrap());
        assert_abs_diff_eq!(post.cdf(0.0, false), 0.160, epsilon = 5e-4);
        assert_eq!(post.cdf(0.0, false), post.cdf(0.0, true));
    }

    #[test]
    fn quantile_cases() {
        let q = point_null(2.0, 1.645).quantile(0.05).unwrap();
        match q {
            QuantileResult::Exact(x) => assert_abs_diff_eq!(x, -0.0163, epsilon = 5e-4),
            other => panic!("expected exact quantile, got {other:?}"),
        }
        match point_null(3.0, 1.645).quantile(0.05).unwrap() {
            QuantileResult::InsideJump(j) => {
                assert_abs_diff_eq!(j.lower, 0.045, epsilon = 5e-4);
                assert_abs_diff_eq!(j.upper, 0.465, epsilon = 5e-4);
            }
            other => panic!("expected jump, got {other:?}"),
        }
        let pair: ModelPair<f64> = ModelPair::two_normals(0.3, 2.0, 0.5).unwrap();
        let post = model_averaged_posterior(&pair, &DataSummary::from_z(6.0, 0.0).unwrap());
        match post.quantile(0.5).unwrap() {
            QuantileResult::Exact(x) => assert!(x.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(post.quantile(0.0).is_err());
        assert!(post.quantile(1.0).is_err());
    }

    #[test]
    fn quantile_at_jump_edges() {
        let post = point_null(10.0, 1.645);
        let jump = post.incredibility_interval();
        assert_eq!(post.quantile(jump.lower).unwrap(), QuantileResult::AtAtom { location: 0.0, open: false });
        assert_eq!(post.quantile(jump.upper).unwrap(), QuantileResult::AtAtom { location: 0.0, open: true });
        for alpha in [0.001, 0.6, 0.99] {
            let (x, _) = post.quantile(alpha).unwrap().bound().unwrap();
            assert!((post.cdf(x, false) - alpha).abs() < 1e-9);
        }
    }

    #[test]
    fn incredibility_values() {
        let j = point_null(10.0, 1.645).incredibility_interval();
        assert_abs_diff_eq!(j.lower, 0.030, epsilon = 5e-4);
        assert_abs_diff_eq!(j.upper, 0.522, epsilon = 5e-4);
        let pair = ModelPair::point_null(0.0, 1.0, 0.5).unwrap();
        let post = model_averaged_posterior(&pair, &DataSummary::from_ybar(100.0, 0.2054).unwrap());
        let j = post.incredibility_interval();
        assert_abs_diff_eq!(j.lower, 0.009, epsilon = 1e-3);
        assert_abs_diff_eq!(j.upper, 0.564, epsilon = 1e-3);

        let mix = ModelPair::two_normals(0.02, 1.0, 0.5).unwrap();
        let j = model_averaged_posterior(&mix, &DataSummary::from_z(10.0, 1.645).unwrap()).incredibility_interval();
        assert_eq!(j.width(), 0.0);
    }

    #[test]
    fn extreme_sample_sizes_stay_finite() {
        for n in [1e10, 1e12] {
            let post = point_null(n, 1.645);
            let j = post.incredibility_interval();
            assert!(j.lower.is_finite() && j.upper <= 1.0 + 1e-15);
            let (x, _) = post.quantile(0.999_999_9).unwrap().bound().unwrap();
            assert!(x.is_finite());
        }
    }

    #[test]
    fn swapping_models_inverts_bf() {
        let a = ModelPair::two_normals(0.02, 1.0, 0.5).unwrap();
        let b = ModelPair::two_normals(1.0, 0.02, 0.5).unwrap();
        let d = DataSummary::from_z(37.0, 1.2).unwrap();
        assert_abs_diff_eq!(bayes_factor_01(&a, &d).log_bf10(), bayes_factor_01(&b, &d).log_bf01, epsilon = 1e-15);
    }

    #[test]
    fn generic_over_f32() {
        let pair = ModelPair::<f32>::point_null(0.0, 1.0, 0.5).unwrap();
        let post = model_averaged_posterior(&pair, &DataSummary::from_z(10.0, 1.645).unwrap());
        let j = post.incredibility_interval();
        assert!((j.lower - 0.0296).abs() < 1e-3 && (j.upper - 0.5219).abs() < 1e-3);
    }
}
