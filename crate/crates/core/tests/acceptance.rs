//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! if any criterion fails.

use std::cell::Cell;
use std::process::ExitCode;
use std::time::Instant;

use dispersal::analysis::{
    beta_limit, classify_profile, correlation_integral, lambda_sweep, m_infinity, run_sweep,
    verify_scenario, weighted_moments, ClaimId, Shape, Sign, SweepRun, Verdict,
};
use dispersal::cli::{self, ExitStatus};
use dispersal::grid::{inf_norm_diff, integrate, ScalarField};
use dispersal::scenario::{builtin_example, Scenario, BUILTIN_IDS};
use dispersal::solver::{jacobian, newton_solve, pseudo_transient, residual, Problem, SolverOptions};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario(id: &str) -> Scenario {
    builtin_example(id).expect("built-in scenario")
}

fn sweep(s: &Scenario) -> Result<SweepRun, String> {
    run_sweep(s).map_err(|e| format!("{}: {e}", s.name))
}

fn ex44(lambda: f64) -> Scenario {
    scenario("ex4.4").with_lambda(lambda)
}

fn manufactured_exactness() -> Outcome {
    let run = sweep(&scenario("pk_manufactured"))?;
    ensure(run.results.len() == 81, || format!("{} rows", run.results.len()))?;
    let mut worst_u: f64 = 0.0;
    let mut worst_m: f64 = 0.0;
    for (res, row) in run.results.iter().zip(&run.table.rows) {
        worst_u = worst_u.max(inf_norm_diff(&res.u, &run.fields.k).unwrap());
        worst_m = worst_m.max((row.m - run.table.int_k).abs());
    }
    ensure(worst_u <= 1e-10 && worst_m <= 1e-8, || {
        format!("max |u-K| = {worst_u:.3e}, max |M-intK| = {worst_m:.3e}")
    })?;
    Ok(format!("max |u-K| = {worst_u:.2e}, max |M-intK| = {worst_m:.2e} over 81 d"))
}

fn proportional_case_exceeds_capacity() -> Outcome {
    let mut notes = Vec::new();
    for s in [ex44(1.0), scenario("ex4.3")] {
        let run = sweep(&s)?;
        let t = &run.table;
        let min_gap = t.rows.iter().map(|r| r.m_minus_int_k).fold(f64::INFINITY, f64::min);
        ensure(min_gap > 0.0, || format!("{}: min M-intK = {min_gap:.3e}", s.name))?;
        let first = t.rows.first().unwrap().m_minus_int_k.abs();
        let last = t.rows.last().unwrap().m_minus_int_k.abs();
        ensure(first <= 0.01 * t.int_k && last <= 0.01 * t.int_k, || {
            format!("{}: endpoint gaps {first:.3e}, {last:.3e}", s.name)
        })?;
        if s.name == "ex4.4" {
            ensure((t.int_k - 2.0).abs() <= 1e-4, || format!("intK = {}", t.int_k))?;
        }
        notes.push(format!("{} min M-intK {min_gap:.2e}", s.name));
    }
    Ok(notes.join("; "))
}

fn constant_growth_below_capacity() -> Outcome {
    let run = sweep(&ex44(0.0))?;
    let worst = run.table.rows.iter().map(|r| r.m).fold(f64::NEG_INFINITY, f64::max);
    ensure(worst < 2.0, || format!("max M = {worst}"))?;
    let shape = classify_profile(&run.table).map_err(|e| e.to_string())?.shape;
    ensure(shape == Shape::Decreasing, || format!("shape {shape}"))?;
    Ok(format!("max M = {worst:.8} < 2, profile {shape}"))
}

fn positive_correlation_shapes() -> Outcome {
    let a = sweep(&scenario("ex4.2a"))?;
    let ta = &a.table;
    ensure(ta.rows[0].m > ta.int_k, || "ex4.2a: M(d_min) <= intK".into())?;
    let pa = classify_profile(ta).map_err(|e| e.to_string())?;
    let (d_lo, d_hi) = (ta.rows[0].d, ta.rows.last().unwrap().d);
    ensure(
        pa.shape == Shape::UnimodalMax && pa.argmax_d > d_lo && pa.argmax_d < d_hi,
        || format!("ex4.2a: {} at d={}", pa.shape, pa.argmax_d),
    )?;
    let b = sweep(&scenario("ex4.2b"))?;
    let tb = &b.table;
    let pb = classify_profile(tb).map_err(|e| e.to_string())?;
    let (m_lo, m_hi) = (tb.rows[0].m, tb.rows.last().unwrap().m);
    ensure(pb.shape == Shape::Increasing && m_hi > m_lo, || {
        format!("ex4.2b: {} with M {m_lo} -> {m_hi}", pb.shape)
    })?;
    Ok(format!(
        "ex4.2a unimodal_max at d={:.3e}; ex4.2b increasing {m_lo:.5} -> {m_hi:.5}",
        pa.argmax_d
    ))
}

fn zero_correlation_integral() -> Outcome {
    let mut notes = Vec::new();
    for (id, want) in [("ex4.1a", Sign::Negative), ("ex4.1b", Sign::Positive)] {
        let s = scenario(id);
        let f = s.fields().map_err(|e| e.to_string())?;
        let i = correlation_integral(&f.k, &f.p, &f.r);
        ensure(i.abs() <= 1e-6, || format!("{id}: I = {i:.3e}"))?;
        let (_, reports) = verify_scenario(&s).map_err(|e| e.to_string())?;
        for claim in [ClaimId::Lem33Pos, ClaimId::Lem33Neg] {
            let r = reports.iter().find(|r| r.claim == claim).unwrap();
            ensure(r.verdict == Verdict::Indeterminate, || {
                format!("{id} {claim}: {}", r.verdict)
            })?;
            ensure(r.observed_sign == Some(want), || {
                format!("{id} {claim}: observed {:?}", r.observed_sign)
            })?;
        }
        notes.push(format!("{id} I={i:.1e} sign {}", want.as_str()));
    }
    Ok(notes.join("; "))
}

fn two_local_maxima() -> Outcome {
    let mut notes = Vec::new();
    for n in [512, 1024] {
        let s = scenario("ex4.3").with_cells(n).map_err(|e| e.to_string())?;
        let p = classify_profile(&sweep(&s)?.table).map_err(|e| e.to_string())?;
        ensure(p.n_interior_maxima == 2 && p.n_sign_changes_of_slope == 3, || {
            format!("N={n}: {} maxima, {} sign changes", p.n_interior_maxima, p.n_sign_changes_of_slope)
        })?;
        notes.push(format!("N={n}: 2 maxima, 3 changes"));
    }
    Ok(notes.join("; "))
}

fn fast_limit_monotone_in_lambda() -> Outcome {
    let f = scenario("ex4.4").fields().map_err(|e| e.to_string())?;
    let grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let values: Vec<f64> = grid.iter().map(|&l| m_infinity(l, &f.k, &f.p)).collect();
    let min_inc = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    ensure(min_inc > 0.0, || format!("min increment {min_inc:.3e}"))?;
    let int_k = integrate(&f.k);
    let rel = (m_infinity(1.0, &f.k, &f.p) - int_k).abs() / int_k;
    ensure(rel <= 1e-12, || format!("m_infinity(1) rel. error {rel:.3e}"))?;
    Ok(format!("min increment {min_inc:.3e}; |m_inf(1)-intK|/intK = {rel:.1e}"))
}

const PANEL_LAMBDAS: [f64; 6] = [-1.0, 0.0, 0.5, 1.0, 1.4, 2.3];

fn lambda_panel_shapes() -> Outcome {
    let s = scenario("ex4.4");
    let f = s.fields().map_err(|e| e.to_string())?;
    let tables = lambda_sweep(&f.k, &f.p, 1.0, &PANEL_LAMBDAS, &s.d_values(), &s.opts)
        .map_err(|e| e.to_string())?;
    let want = [
        Shape::Decreasing,
        Shape::Decreasing,
        Shape::UnimodalMax,
        Shape::UnimodalMax,
        Shape::UnimodalMax,
        Shape::Increasing,
    ];
    let got: Vec<Shape> = tables
        .iter()
        .map(|(_, t)| classify_profile(t).map(|p| p.shape))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(got == want, || format!("shapes {got:?}"))?;
    Ok(got.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "))
}

/// Composite Simpson rule on the analytic expressions at 4096 cells, kept
/// separate from the grid module's trapezoid rule.
fn simpson(f: impl Fn(f64) -> f64) -> f64 {
    let n = 4096;
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    acc * h / 3.0
}

fn fast_dispersal_limit() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in BUILTIN_IDS {
        let s = scenario(id);
        let run = sweep(&s)?;
        let f = &run.fields;
        let limit = beta_limit(&f.r, &f.k, &f.p) * integrate(&f.p);
        let eval = |e: &dispersal::expr::Expression, x: f64| e.evaluate(x).unwrap();
        let r_at = |x: f64| match &s.growth {
            dispersal::scenario::GrowthRate::Formula(fm) => eval(fm.expr(), x),
            dispersal::scenario::GrowthRate::Power { lambda, alpha } => {
                alpha * (eval(s.k.expr(), x) / eval(s.p.expr(), x)).powf(*lambda)
            }
        };
        let num = simpson(|x| r_at(x) * eval(s.p.expr(), x));
        let den = simpson(|x| r_at(x) / eval(s.k.expr(), x) * eval(s.p.expr(), x).powi(2));
        let oracle = num / den * simpson(|x| eval(s.p.expr(), x));
        ensure((oracle - limit).abs() <= 1e-4 * oracle, || {
            format!("{id}: beta*intP {limit} vs independent {oracle}")
        })?;
        let m_max = run.table.rows.last().unwrap().m;
        let rel = (m_max - limit).abs() / limit;
        ensure(rel <= 0.01, || format!("{id}: |M(d_max) - beta intP| rel {rel:.3e}"))?;
        worst = worst.max(rel);
    }
    let s = scenario("ex4.4");
    let f = s.fields().map_err(|e| e.to_string())?;
    let tables = lambda_sweep(&f.k, &f.p, 1.0, &PANEL_LAMBDAS, &s.d_values(), &s.opts)
        .map_err(|e| e.to_string())?;
    for (lambda, t) in &tables {
        let m_inf = m_infinity(*lambda, &f.k, &f.p);
        let rel = (t.rows.last().unwrap().m - m_inf).abs() / m_inf;
        ensure(rel <= 0.01, || format!("lambda={lambda}: rel {rel:.3e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("worst relative gap {worst:.2e}"))
}

fn slow_dispersal_rate() -> Outcome {
    let f = ex44(1.0).fields().map_err(|e| e.to_string())?;
    let opts = SolverOptions::default();
    let ratio = |d: f64| -> Result<f64, String> {
        let p = Problem::new(d, f.k.clone(), f.p.clone(), f.r.clone()).map_err(|e| e.to_string())?;
        let res = newton_solve(&p, &f.k, &opts).map_err(|e| e.to_string())?;
        Ok(inf_norm_diff(&res.u, &f.k).unwrap() / d)
    };
    let (a, b) = (ratio(1e-4)?, ratio(2e-4)?);
    let spread = (a - b).abs() / a.max(b);
    ensure(spread <= 0.25, || format!("ratios {a:.4} and {b:.4}"))?;
    Ok(format!("|u-K|/d = {a:.4} and {b:.4}, spread {:.1}%", 100.0 * spread))
}

fn oracle_equivalence() -> Outcome {
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    for id in BUILTIN_IDS {
        let f = scenario(id).fields().map_err(|e| e.to_string())?;
        for d in [1e-2, 1.0, 1e2] {
            let p = Problem::new(d, f.k.clone(), f.p.clone(), f.r.clone()).map_err(|e| e.to_string())?;
            let newton = newton_solve(&p, &f.k, &opts).map_err(|e| format!("{id} d={d}: {e}"))?;
            let march = pseudo_transient(&p, &f.k.scale(0.5), &opts)
                .map_err(|e| format!("{id} d={d}: {e}"))?;
            let rel = inf_norm_diff(&newton.u, &march.u).unwrap() / newton.u.sup_norm();
            ensure(rel <= 1e-6, || format!("{id} d={d}: rel {rel:.3e}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("worst relative sup-norm gap {worst:.2e}"))
}

fn jacobian_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in BUILTIN_IDS {
        let f = scenario(id).fields().map_err(|e| e.to_string())?;
        let n = f.k.len();
        let mut runner = TestRunner::new(Config {
            cases: 10,
            failure_persistence: None,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
            ..Config::default()
        });
        let strategy = (
            prop::collection::vec(0.2f64..3.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
            prop::sample::select(vec![1e-3, 1.0, 1e3]),
        );
        let k = f.k.clone();
        let (p_field, r_field) = (f.p.clone(), f.r.clone());
        let local = Cell::new(0.0f64);
        runner
            .run(&strategy, |(scale, dir, d)| {
                let grid = *k.grid();
                let u = ScalarField::new(grid, scale.iter().zip(k.values()).map(|(s, kv)| s * kv).collect()).unwrap();
                let v = ScalarField::new(grid, dir).unwrap();
                let problem = Problem::new(d, k.clone(), p_field.clone(), r_field.clone()).unwrap();
                let jv = jacobian(&u, &problem).matvec(v.values());
                // The residual is quadratic in u, so the central difference
                // is exact up to roundoff for any step length.
                let eps = 1e-2 * u.sup_norm() / v.sup_norm();
                let plus = residual(&(&u + &v.scale(eps)), &problem);
                let minus = residual(&(&u - &v.scale(eps)), &problem);
                let fd: Vec<f64> = plus.values().iter().zip(minus.values()).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
                let scale_jv = jv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let err = jv.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale_jv;
                local.set(local.get().max(err));
                prop_assert!(err <= 1e-5, "relative error {}", err);
                Ok(())
            })
            .map_err(|e| format!("{id}: {e}"))?;
        worst = worst.max(local.get());
    }
    Ok(format!("worst relative error {worst:.2e} over 10 states x {} scenarios", BUILTIN_IDS.len()))
}

fn appendix_weighted_inequalities() -> Outcome {
    let mut notes = Vec::new();
    let run = sweep(&scenario("ex4.1a"))?;
    let f = &run.fields;
    for res in &run.results[..2] {
        let m = weighted_moments(&res.u, &f.r, &f.k, &f.p);
        ensure(m.int_ru2 < m.int_rku && m.int_rku < m.int_rk2, || {
            format!("ex4.1a: {} < {} < {} fails", m.int_ru2, m.int_rku, m.int_rk2)
        })?;
        notes.push(format!("ex4.1a gaps {:.2e}/{:.2e}", m.int_rku - m.int_ru2, m.int_rk2 - m.int_rku));
    }
    let run = sweep(&scenario("a1_demo"))?;
    let f = &run.fields;
    for res in &run.results[..2] {
        let m = weighted_moments(&res.u, &f.r, &f.k, &f.p);
        ensure(m.int_pu > m.int_pk, || format!("a1_demo: {} <= {}", m.int_pu, m.int_pk))?;
        notes.push(format!("a1_demo gap {:.2e}", m.int_pu - m.int_pk));
    }
    Ok(notes.join("; "))
}

fn discretization_convergence() -> Outcome {
    let opts = SolverOptions::default();
    let mut ms = Vec::new();
    for n in [256, 512, 1024] {
        let f = ex44(1.0).with_cells(n).and_then(|s| s.fields()).map_err(|e| e.to_string())?;
        let p = Problem::new(1.0, f.k.clone(), f.p.clone(), f.r.clone()).map_err(|e| e.to_string())?;
        let res = newton_solve(&p, &f.k, &opts).map_err(|e| e.to_string())?;
        ms.push(integrate(&res.u));
    }
    let c1 = (ms[1] - ms[0]).abs() / ms[1];
    let c2 = (ms[2] - ms[1]).abs() / ms[2];
    ensure(c1 <= 1e-4 && c2 <= 1e-4, || format!("changes {c1:.3e}, {c2:.3e}"))?;
    Ok(format!("M(1) = {:.10}; relative changes {c1:.2e}, {c2:.2e}", ms[2]))
}

fn verify_suite_clean() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("report.txt");
    let status = cli::run(["dispersal", "verify", "--all", "--report", path.to_str().unwrap()]);
    ensure(status == ExitStatus::SUCCESS, || format!("exit {}", status.code()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let claims: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    let violated = claims
        .iter()
        .filter(|l| l.split(" | ").nth(5).map(str::trim) == Some("violated"))
        .count();
    ensure(violated == 0 && !claims.is_empty(), || format!("{violated} violated lines"))?;
    Ok(format!("{} claim lines, none violated", claims.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("manufactured exactness", manufactured_exactness),
        ("proportional dispersal keeps M above intK", proportional_case_exceeds_capacity),
        ("constant growth keeps M below intK", constant_growth_below_capacity),
        ("positively correlated growth shapes", positive_correlation_shapes),
        ("vanishing correlation integral", zero_correlation_integral),
        ("two local maxima under refinement", two_local_maxima),
        ("fast-dispersal limit increasing in lambda", fast_limit_monotone_in_lambda),
        ("power-family panel shapes", lambda_panel_shapes),
        ("fast-dispersal limit", fast_dispersal_limit),
        ("slow-dispersal O(d) rate", slow_dispersal_rate),
        ("Newton vs pseudo-transient", oracle_equivalence),
        ("Jacobian vs finite differences", jacobian_consistency),
        ("weighted appendix inequalities", appendix_weighted_inequalities),
        ("discretization convergence", discretization_convergence),
        ("verify --all exits cleanly", verify_suite_clean),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", i + 1, t.elapsed()),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{:.2?}]", i + 1, t.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed in {:.2?}",
        criteria.len() - failures,
        start.elapsed()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
