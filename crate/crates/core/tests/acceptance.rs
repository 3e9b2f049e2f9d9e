//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;

use common::{Null, Setup};
use mavg_cri::asymptotics::{
    ci_content_closed_form, ci_content_monte_carlo, ci_posterior_content, largest_n_with_quantile,
};
use mavg_cri::interval::{credible_one_sided, frequentist_ci_lower, stochastic_bound, stochastic_two_sided};
use mavg_cri::kernels::std_normal_cdf;
use mavg_cri::posterior::{model_averaged_posterior, posterior_model_probs};
use mavg_cri::simulation::simulate_stochastic_content;
use mavg_cri::{AsymptoticRegime, DataSummary, ModelPair, OneSidedCredible, QuantileResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    what: String,
    ok: bool,
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Check {
    Check { what: format!("{what} = {got:.6} (want {want} ± {tol:e})"), ok: (got - want).abs() <= tol }
}

fn holds(what: String, ok: bool) -> Check {
    Check { what, ok }
}

fn mixture() -> ModelPair<f64> {
    ModelPair::two_normals(0.02, 1.0, 0.5).unwrap()
}

fn point_null() -> ModelPair<f64> {
    ModelPair::point_null(0.0, 1.0, 0.5).unwrap()
}

fn post(pair: &ModelPair<f64>, n: f64, z: f64) -> mavg_cri::Posterior64 {
    model_averaged_posterior(pair, &DataSummary::from_z(n, z).unwrap())
}

fn c1() -> Vec<Check> {
    vec![
        within("Pr(θ<0) at n=10", post(&mixture(), 10.0, 1.645).cdf(0.0, false), 0.160, 5e-4),
        within("Pr(θ<0) at n=10000", post(&mixture(), 1e4, 1.645).cdf(0.0, false), 0.050, 5e-4),
    ]
}

fn c2() -> Vec<Check> {
    let p = posterior_model_probs(&mixture(), &DataSummary::from_z(1e10, 1.645).unwrap());
    vec![within("pm1 at n=1e10", p.pm1, 0.124, 1e-3)]
}

fn c3() -> Vec<Check> {
    let mut out = Vec::new();
    for (n, lo, hi) in [(3.0, 0.045, 0.465), (10.0, 0.030, 0.522)] {
        let j = post(&point_null(), n, 1.645).incredibility_interval();
        out.push(within(&format!("Pr(θ<0) at n={n}"), j.lower, lo, 5e-4));
        out.push(within(&format!("Pr(θ≤0) at n={n}"), j.upper, hi, 5e-4));
    }
    out
}

fn c4() -> Vec<Check> {
    let q = post(&point_null(), 2.0, 1.645).quantile(0.05).unwrap();
    let theta = match q {
        QuantileResult::Exact(t) => t,
        _ => f64::NAN,
    };
    vec![
        within("θ* at n=2", theta, -0.0163, 5e-4),
        within("Pr(θ<0) at n=1000", post(&point_null(), 1000.0, 1.645).cdf(0.0, false), 0.005, 5e-4),
    ]
}

fn c5() -> Vec<Check> {
    let y = DataSummary::from_ybar(100.0, 0.2054).unwrap();
    vec![
        within("γ at n=10", stochastic_bound(&post(&point_null(), 10.0, 1.645), 0.05).unwrap().prob_a, 0.959, 1e-3),
        within(
            "γ at n=100, ȳ=0.2054",
            stochastic_bound(&model_averaged_posterior(&point_null(), &y), 0.05).unwrap().prob_a,
            0.926,
            2e-3,
        ),
    ]
}

fn c6() -> Vec<Check> {
    let y = DataSummary::from_ybar(100.0, 0.2054).unwrap();
    let p = model_averaged_posterior(&point_null(), &y);
    let mut out = Vec::new();
    match credible_one_sided(&p, 0.05).unwrap() {
        OneSidedCredible::Undefined { closed_level, open_level, .. } => {
            out.push(within("level of [0, ∞)", closed_level, 0.991, 2e-3));
            out.push(within("level of (0, ∞)", open_level, 0.436, 2e-3));
        }
        other => out.push(holds(format!("expected an undefined interval, got {other:?}"), false)),
    }
    out.push(within("frequentist 95% lower bound", frequentist_ci_lower(&y, 0.05).unwrap(), 0.040, 5e-4));
    out
}

fn c7() -> Vec<Check> {
    let largest = largest_n_with_quantile(&point_null(), 2.575, 0.005, 200).unwrap();
    let ok = matches!(largest, Some(18..=21));
    vec![holds(format!("largest n with a quantile at z=2.575, α=0.005: {largest:?} (want 18..=21)"), ok)]
}

fn c8() -> Vec<Check> {
    let p = post(&point_null(), 1e8, 1.645);
    let gamma = stochastic_bound(&p, 0.05).unwrap().prob_a;
    let psi = stochastic_two_sided(&p, 0.05).unwrap().prob_point;
    vec![within("γ at n=1e8", gamma, 0.95, 1e-3), within("ψ at n=1e8", psi, 0.95, 1e-3)]
}

fn c9() -> Vec<Check> {
    let mut out = Vec::new();
    for k in [1.645, 1.282, 0.842, 0.524] {
        let r = AsymptoticRegime::new(0.0, 1.645, k).unwrap();
        let quad = ci_posterior_content(&r, &mixture(), 1e8).unwrap();
        let closed = ci_content_closed_form(&r, &mixture(), 1e8).unwrap();
        out.push(within(&format!("content at n=1e8, k={k}"), quad, std_normal_cdf(-k), 1e-3));
        out.push(within(&format!("closed form vs quadrature, k={k}"), closed - quad, 0.0, 1e-6));
        for n in [10.0, 1e8] {
            let quad = ci_posterior_content(&r, &mixture(), n).unwrap();
            let mc = ci_content_monte_carlo(&r, &mixture(), n, 1_000_000, 42).unwrap();
            out.push(holds(
                format!("Monte Carlo {:.5} ± {:.1e} vs quadrature {quad:.5} at n={n}, k={k}", mc.value, mc.std_error),
                (mc.value - quad).abs() <= 3.0 * mc.std_error,
            ));
        }
    }
    out
}

fn random_point_null(rng: &mut ChaCha8Rng) -> (ModelPair<f64>, f64, f64) {
    let pair = ModelPair::point_null(
        rng.random_range(-0.2..0.2),
        10f64.powf(rng.random_range(-1.0..1.0)),
        rng.random_range(0.1..0.9),
    )
    .unwrap();
    (pair, 10f64.powf(rng.random_range(0.0..8.0)), rng.random_range(-3.0..4.0))
}

fn c10() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < 100 {
        let (pair, n, z) = random_point_null(&mut rng);
        let p = post(&pair, n, z);
        let jump = p.incredibility_interval();
        if jump.upper - jump.lower <= 1e-6 {
            continue;
        }
        let alpha = rng.random_range(jump.lower..jump.upper);
        let content = 1.0 - stochastic_bound(&p, alpha).unwrap().expected_lower_tail();
        worst = worst.max((content - (1.0 - alpha)).abs());
        used += 1;
    }
    out.push(holds(format!("content identity on 100 draws, worst error {worst:.1e} (want ≤ 1e-12)"), worst <= 1e-12));

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let null = match rng.random_range(0..2) {
            0 => Null::Normal(10f64.powf(rng.random_range(-2.0..0.5))),
            _ => Null::Point(rng.random_range(-0.3..0.3)),
        };
        let s = Setup {
            null,
            g1: 10f64.powf(rng.random_range(-1.0..1.0)),
            p0: rng.random_range(0.1..0.9),
            n: 10f64.powf(rng.random_range(0.0..4.0)).round().max(1.0),
            z: rng.random_range(-3.0..4.0),
        };
        let pair = match s.null {
            Null::Normal(g0) => ModelPair::two_normals(g0, s.g1, s.p0).unwrap(),
            Null::Point(t0) => ModelPair::point_null(t0, s.g1, s.p0).unwrap(),
        };
        let p = post(&pair, s.n, s.z);
        let spread = 3.0 / s.n.sqrt();
        let t = match s.null {
            Null::Point(t0) if rng.random_bool(0.25) => t0,
            _ => s.z / s.n.sqrt() + rng.random_range(-spread..spread),
        };
        let closed = rng.random_bool(0.5);
        worst = worst.max((p.cdf(t, closed) - s.cdf(t, closed)).abs());
    }
    out.push(holds(
        format!("CDF vs quadrature oracle on 200 points, worst error {worst:.1e} (want < 1e-6)"),
        worst < 1e-6,
    ));

    let (mut monotone, mut bounded, mut exact_jump, mut ulp_jump) = (true, true, true, true);
    for _ in 0..50 {
        let (pair, n, z) = random_point_null(&mut rng);
        let p = post(&pair, n, z);
        let centre = z / n.sqrt();
        let mut last = 0.0;
        for i in -300..=300 {
            let t = centre + f64::from(i) * 0.05 / n.sqrt().min(10.0);
            let (o, c) = (p.cdf(t, false), p.cdf(t, true));
            bounded &= (0.0..=1.0).contains(&o) && (0.0..=1.0).contains(&c);
            monotone &= o >= last && c >= o;
            last = c;
        }
        let j = p.incredibility_interval();
        exact_jump &= j.width() == p.weights().pm0;
        ulp_jump &= ((j.upper - j.lower) - p.weights().pm0).abs() <= 4.0 * f64::EPSILON;
    }
    out.push(holds("CDF monotone".into(), monotone));
    out.push(holds("CDF within [0, 1]".into(), bounded));
    out.push(holds("jump width equals pm0 exactly; bounds differ by pm0 to 4 ulp".into(), exact_jump && ulp_jump));

    let r = simulate_stochastic_content(&point_null(), &DataSummary::from_z(10.0, 1.645).unwrap(), 0.05, 1_000_000, 42)
        .unwrap();
    out.push(holds(
        format!(
            "simulated content {:.5} vs {:.2} within 3·SE = {:.5} (1e6 reps, seed 42)",
            r.empirical,
            r.target,
            3.0 * r.std_error
        ),
        r.passes(),
    ));
    out
}

type Criterion = (&'static str, fn() -> Vec<Check>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mixture posterior probability of θ<0", c1),
        ("limit of Pr(M1|data)", c2),
        ("point-null jump bounds", c3),
        ("point-null quantile and large-n tail", c4),
        ("γ values", c5),
        ("nearest achievable levels and frequentist bound", c6),
        ("largest n with a quantile at α=0.005", c7),
        ("γ and ψ limits", c8),
        ("convergence of CI content to Φ(−k)", c9),
        ("property suite", c10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let checks = run();
        let ok = checks.iter().all(|c| c.ok);
        println!("criterion {:>2}: {} {name}", i + 1, if ok { "PASS" } else { "FAIL" });
        for c in &checks {
            println!("    [{}] {}", if c.ok { "ok" } else { "FAIL" }, c.what);
        }
        if !ok {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
