//! Data series behind the figures: prior/posterior panels, posterior
//! probabilities of CI lower bounds, model probabilities, jump bounds, the
//! posterior CDF, and exclusion probabilities against n.

use crate::asymptotics::{self, AsymptoticRegime};
use crate::error::{Error, Result};
use crate::model::{DataSummary, ModelPair};
use crate::posterior::{model_averaged_posterior, posterior_model_probs, Component};
use crate::report::{Cell, Record, Report};

/// Canonical figure ids with their short aliases.
pub const FIGURES: [(&str, &str); 7] = [
    ("prior_posterior_panels", "fig1 (mixture) / fig3 (point-null)"),
    ("alpha_vs_n", "fig2"),
    ("model_prob_vs_n", "fig4"),
    ("jump_bounds_vs_n", "fig5"),
    ("posterior_cdf", "fig6"),
    ("lower_bound_alpha0005", "fig7"),
    ("gamma_curves", "fig8"),
];

const Z_P05: f64 = 1.645;
const Z_P0005: f64 = 2.575;
const PANEL_N: f64 = 10.0;
const PANEL_YBAR: f64 = 0.520;
const CI_TAILS: [(f64, f64); 4] = [(0.05, 1.645), (0.10, 1.282), (0.20, 0.842), (0.30, 0.524)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Panels { point_null: bool },
    AlphaVsN,
    ModelProbVsN,
    JumpBoundsVsN,
    PosteriorCdf,
    LowerBoundAlpha0005,
    GammaCurves,
}

impl FigureId {
    /// Parses an id or alias. `point_null` picks the panel variant for the
    /// canonical panel id.
    pub fn parse(id: &str, point_null: bool) -> Result<Self> {
        Ok(match id {
            "prior_posterior_panels" => FigureId::Panels { point_null },
            "fig1" => FigureId::Panels { point_null: false },
            "fig3" => FigureId::Panels { point_null: true },
            "alpha_vs_n" | "fig2" => FigureId::AlphaVsN,
            "model_prob_vs_n" | "fig4" => FigureId::ModelProbVsN,
            "jump_bounds_vs_n" | "fig5" => FigureId::JumpBoundsVsN,
            "posterior_cdf" | "fig6" => FigureId::PosteriorCdf,
            "lower_bound_alpha0005" | "fig7" => FigureId::LowerBoundAlpha0005,
            "gamma_curves" | "fig8" => FigureId::GammaCurves,
            other => {
                let valid: Vec<String> = FIGURES.iter().map(|(id, alias)| format!("{id} ({alias})")).collect();
                return Err(Error::Domain(format!("unknown figure id `{other}`; valid ids: {}", valid.join(", "))));
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Panels { .. } => "prior_posterior_panels",
            FigureId::AlphaVsN => "alpha_vs_n",
            FigureId::ModelProbVsN => "model_prob_vs_n",
            FigureId::JumpBoundsVsN => "jump_bounds_vs_n",
            FigureId::PosteriorCdf => "posterior_cdf",
            FigureId::LowerBoundAlpha0005 => "lower_bound_alpha0005",
            FigureId::GammaCurves => "gamma_curves",
        }
    }
}

/// Grid and level overrides; `None` keeps the figure's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOptions {
    pub n_grid: Option<Vec<f64>>,
    pub theta_grid: Option<Vec<f64>>,
    pub p_values: Option<Vec<f64>>,
    pub alpha: Option<f64>,
}

/// Integers 1 to 20, then roughly 10 log-spaced integers per decade up to 10⁴.
pub fn default_n_grid() -> Vec<f64> {
    const MANTISSAS: [u64; 10] = [10, 12, 16, 20, 25, 32, 40, 50, 63, 80];
    let mut grid: Vec<u64> = (1..=20).collect();
    for decade in [1u64, 10, 100] {
        grid.extend(MANTISSAS.iter().map(|m| m * decade).filter(|&n| n > 20));
    }
    grid.push(10_000);
    grid.into_iter().map(|n| n as f64).collect()
}

fn theta_grid(lo: i32, hi: i32, per_unit: f64) -> Vec<f64> {
    (lo..=hi).map(|i| f64::from(i) / per_unit).collect()
}

fn mixture() -> ModelPair<f64> {
    ModelPair::two_normals(0.02, 1.0, 0.5).expect("valid mixture")
}

fn point_null() -> ModelPair<f64> {
    ModelPair::point_null(0.0, 1.0, 0.5).expect("valid point null")
}

fn clean_grid(grid: Vec<f64>, name: &str, valid: impl Fn(f64) -> bool) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Domain(format!("{name} grid is empty")));
    }
    if let Some(bad) = grid.iter().find(|&&x| !valid(x)) {
        return Err(Error::Domain(format!("invalid {name} grid value {bad}")));
    }
    let mut grid = grid;
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

fn n_grid(opts: &FigureOptions, default: Vec<f64>) -> Result<Vec<f64>> {
    clean_grid(opts.n_grid.clone().unwrap_or(default), "n", |n| n.is_finite() && n >= 1.0)
}

/// Builds the series for `id`. `config` is echoed in the report header.
pub fn build(id: FigureId, opts: &FigureOptions, config: Record) -> Result<Report> {
    match id {
        FigureId::Panels { point_null: pn } => panels(pn, opts, config),
        FigureId::AlphaVsN => alpha_vs_n(opts, config),
        FigureId::ModelProbVsN => model_prob_vs_n(opts, config),
        FigureId::JumpBoundsVsN => jump_bounds_vs_n(opts, config),
        FigureId::PosteriorCdf => posterior_cdf(opts, config),
        FigureId::LowerBoundAlpha0005 => lower_bound_alpha0005(opts, config),
        FigureId::GammaCurves => gamma_curves(opts, config),
    }
}

fn panels(pn: bool, opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = if pn { point_null() } else { mixture() };
    let thetas =
        clean_grid(opts.theta_grid.clone().unwrap_or_else(|| theta_grid(-200, 300, 200.0)), "theta", f64::is_finite)?;
    let data = DataSummary::from_ybar(PANEL_N, PANEL_YBAR)?;
    let post = model_averaged_posterior(&pair, &data);
    let w = post.weights();
    let mut r = Report::new(
        "prior_posterior_panels",
        config,
        &["theta", "prior_m0", "prior_m1", "prior_mixture", "posterior_m0", "posterior_m1", "posterior_mixture"],
    );
    r.meta
        .push("variant", if pn { "point-null" } else { "mixture" })
        .push("n", PANEL_N)
        .push("ybar", PANEL_YBAR)
        .push("z", data.z())
        .push("pm0", w.pm0)
        .push("pm1", w.pm1)
        .push("prior_atom_mass", pair.prior_atom_mass())
        .push("posterior_atom_mass", post.atom_mass())
        .push("atom_location", post.atom_location());
    for theta in thetas {
        let c1 = post.component1().pdf(theta);
        let c0 = match post.component0() {
            Component::Normal(c) => c.pdf(theta),
            Component::Atom { .. } => 0.0,
        };
        r.push_row(vec![
            theta.into(),
            pair.prior0().continuous_density(theta).into(),
            pair.prior1().continuous_density(theta).into(),
            pair.continuous_prior_density(theta).into(),
            c0.into(),
            c1.into(),
            post.continuous_density(theta).into(),
        ]);
    }
    Ok(r)
}

fn alpha_vs_n(opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = mixture();
    let grid = n_grid(opts, default_n_grid())?;
    let mut r = Report::new("alpha_vs_n", config, &["n", "A", "k", "ci_lower", "alpha", "limit"]);
    r.meta.push("z", Z_P05).push("g0", 0.02).push("g1", 1.0);
    for (a_tail, k) in CI_TAILS {
        let regime = AsymptoticRegime::new(0.0, Z_P05, k)?;
        for &n in &grid {
            let alpha = asymptotics::ci_content_closed_form(&regime, &pair, n)?;
            r.push_row(vec![
                n.into(),
                a_tail.into(),
                k.into(),
                regime.ci_lower(n).into(),
                alpha.into(),
                regime.limit().into(),
            ]);
        }
    }
    Ok(r)
}

fn model_prob_vs_n(opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = mixture();
    let grid = n_grid(opts, default_n_grid())?;
    let limit = asymptotics::limit_posterior_model_prob(&pair);
    let mut r = Report::new("model_prob_vs_n", config, &["n", "pm0", "pm1", "prob_theta_below_0"]);
    r.meta.push("z", Z_P05).push("pm1_limit", limit).push("pm0_limit", 1.0 - limit);
    for n in grid {
        let data = DataSummary::from_z(n, Z_P05)?;
        let w = posterior_model_probs(&pair, &data);
        let below = model_averaged_posterior(&pair, &data).cdf(0.0, false);
        r.push_row(vec![n.into(), w.pm0.into(), w.pm1.into(), below.into()]);
    }
    Ok(r)
}

fn jump_bounds_vs_n(opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = point_null();
    let grid = n_grid(opts, default_n_grid())?;
    let mut r = Report::new("jump_bounds_vs_n", config, &["n", "lower", "upper", "pm0"]);
    r.meta.push("z", Z_P05);
    for n in grid {
        let post = model_averaged_posterior(&pair, &DataSummary::from_z(n, Z_P05)?);
        let jump = post.incredibility_interval();
        r.push_row(vec![n.into(), jump.lower.into(), jump.upper.into(), post.atom_mass().into()]);
    }
    Ok(r)
}

fn posterior_cdf(opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = point_null();
    let thetas =
        clean_grid(opts.theta_grid.clone().unwrap_or_else(|| theta_grid(-100, 300, 200.0)), "theta", f64::is_finite)?;
    let post = model_averaged_posterior(&pair, &DataSummary::from_z(PANEL_N, Z_P05)?);
    let mut r = Report::new("posterior_cdf", config, &["theta", "cdf_open", "cdf_closed"]);
    r.meta.push("n", PANEL_N).push("z", Z_P05).push("atom_mass", post.atom_mass());
    for t in thetas {
        r.push_row(vec![t.into(), post.cdf(t, false).into(), post.cdf(t, true).into()]);
    }
    Ok(r)
}

fn lower_bound_alpha0005(opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = point_null();
    let alpha = opts.alpha.unwrap_or(0.005);
    let grid = n_grid(opts, (1..=60).map(f64::from).collect())?;
    let n_max = grid.last().copied().unwrap_or(1.0).floor() as u64;
    let largest = asymptotics::largest_n_with_quantile(&pair, Z_P0005, alpha, n_max)?;
    let mut r = Report::new("lower_bound_alpha0005", config, &["n", "lower", "upper", "alpha", "quantile_exists"]);
    r.meta
        .push("z", Z_P0005)
        .push("alpha", alpha)
        .push("largest_n_with_quantile", largest)
        .push("first_n_without_quantile", largest.map(|n| n + 1).filter(|&n| n <= n_max));
    for n in grid {
        let jump = model_averaged_posterior(&pair, &DataSummary::from_z(n, Z_P0005)?).incredibility_interval();
        r.push_row(vec![
            n.into(),
            jump.lower.into(),
            jump.upper.into(),
            alpha.into(),
            (!jump.contains_strictly(alpha)).into(),
        ]);
    }
    Ok(r)
}

fn gamma_curves(opts: &FigureOptions, config: Record) -> Result<Report> {
    let pair = point_null();
    let alpha = opts.alpha.unwrap_or(0.05);
    let grid = n_grid(opts, default_n_grid())?;
    let ps = opts.p_values.clone().unwrap_or_else(|| vec![0.05, 0.01, 0.005, 0.001]);
    if let Some(bad) = ps.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Domain(format!("p-value {bad} outside (0, 1)")));
    }
    let mut r =
        Report::new("gamma_curves", config, &["p", "n", "z", "lower", "upper", "exclusion_prob", "alpha_in_jump"]);
    r.meta.push("alpha", alpha);
    for p in ps {
        for pt in asymptotics::jl_exclusion_curve(&pair, p, alpha, &grid)? {
            r.push_row(vec![
                p.into(),
                pt.n.into(),
                pt.z.into(),
                pt.lower.into(),
                pt.upper.into(),
                Cell::from(pt.exclusion_prob),
                pt.exclusion_prob.is_some().into(),
            ]);
        }
    }
    Ok(r)
}
