//! Reference computations built only from the prior and the likelihood, with
//! no conjugate formulas, for checking the library against.

#![allow(dead_code)]

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub enum Null {
    Normal(f64),
    Point(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub null: Null,
    pub g1: f64,
    pub p0: f64,
    pub n: f64,
    pub z: f64,
}

pub fn normal_density(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson on `[a, b]`, pre-split into `pieces` panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

impl Setup {
    fn ybar(&self) -> f64 {
        self.z / self.n.sqrt()
    }

    /// Likelihood scaled to 1 at θ = ȳ.
    fn likelihood(&self, theta: f64) -> f64 {
        let d = theta - self.ybar();
        (-0.5 * self.n * d * d).exp()
    }

    fn continuous(&self, theta: f64) -> f64 {
        let prior0 = match self.null {
            Null::Normal(g0) => self.p0 * normal_density(theta, g0),
            Null::Point(_) => 0.0,
        };
        (prior0 + (1.0 - self.p0) * normal_density(theta, self.g1)) * self.likelihood(theta)
    }

    fn atom(&self) -> Option<(f64, f64)> {
        match self.null {
            Null::Point(t0) => Some((t0, self.p0 * self.likelihood(t0))),
            Null::Normal(_) => None,
        }
    }

    /// The posterior lives between 0 and ȳ, within a few multiples of 1/√n.
    fn range(&self) -> (f64, f64) {
        let s = 1.0 / self.n.sqrt();
        let y = self.ybar();
        let mut lo = y.min(0.0) - 14.0 * s;
        let mut hi = y.max(0.0) + 14.0 * s;
        if let Null::Point(t0) = self.null {
            lo = lo.min(t0 - 14.0 * s);
            hi = hi.max(t0 + 14.0 * s);
        }
        (lo, hi)
    }

    fn mass_below(&self, t: f64) -> f64 {
        let (lo, hi) = self.range();
        let f = |x: f64| self.continuous(x);
        let upper = t.min(hi);
        if upper <= lo {
            return 0.0;
        }
        integrate(&f, lo, upper, 1e-14, 64)
    }

    pub fn normalizer(&self) -> f64 {
        let (lo, hi) = self.range();
        let f = |x: f64| self.continuous(x);
        integrate(&f, lo, hi, 1e-14, 64) + self.atom().map_or(0.0, |(_, m)| m)
    }

    /// `Pr(θ < t|data)` or `Pr(θ ≤ t|data)`.
    pub fn cdf(&self, t: f64, closed: bool) -> f64 {
        let atom = match self.atom() {
            Some((t0, m)) if t > t0 || (closed && t == t0) => m,
            _ => 0.0,
        };
        (self.mass_below(t) + atom) / self.normalizer()
    }

    pub fn atom_prob(&self) -> f64 {
        self.atom().map_or(0.0, |(_, m)| m / self.normalizer())
    }
}
