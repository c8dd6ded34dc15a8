//! End-to-end acceptance checks; prints one PASS/FAIL line per criterion.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cuspkit::chern::log_coefficient_plane_curve;
use cuspkit::elliptic::{solve_linear, solve_monge_ampere_radial, LeftBoundary, LinearProblem, MongeAmpereProblem};
use cuspkit::fitter::detect_log_term;
use cuspkit::geometry::{ModelMetric, RadialField, RadialGrid};
use cuspkit::index_algebra::{
    closure, extended_union, index_set_eplus, index_set_hat_eplus, Eigenvalue, IndexTerm, IndicialFamily,
};
use cuspkit::newton::NewtonParams;
use cuspkit::parabolic::{
    cusp_constant_evolution, cusp_constant_rk4, decay_certificate, restricted_ode_solution, run_flow, DecayProblem,
    FlowProblem,
};
use cuspkit::rational::{int, ratio};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Real roots of `p` on `[lo, hi]` by sign-change scan and bisection.
fn bisection_roots(p: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let steps = 20_000;
    let dz = (hi - lo) / steps as f64;
    let mut roots = Vec::new();
    for i in 0..steps {
        let (mut a, mut b) = (lo + i as f64 * dz, lo + (i + 1) as f64 * dz);
        if p(a) == 0.0 {
            roots.push(a);
            continue;
        }
        if p(a) * p(b) >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if p(a).signum() == p(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fam = IndicialFamily::new(int(1), int(1), vec![Eigenvalue::simple(int(0))]).unwrap();
    let sb = fam.spec_b_roots();
    let elapsed = start.elapsed();
    let exact: Vec<_> = sb.roots.iter().map(|r| r.z.as_rational().cloned()).collect();
    let rational_ok = exact == vec![Some(int(-2)), Some(int(1))];
    let brute = bisection_roots(|z| 0.5 * (z * z + z) - 1.0, -50.0, 50.0);
    let float_ok = brute.len() == 2
        && brute.iter().zip(&sb.roots).all(|(b, r)| (b - r.z.to_f64()).abs() <= 1e-12);
    check(
        rational_ok && float_ok && elapsed < Duration::from_millis(1),
        format!("roots {:?} (bisection {brute:?}) in {elapsed:?}", sb.roots.iter().map(|r| r.z.to_string()).collect::<Vec<_>>()),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let all = (4..=100).all(|d| log_coefficient_plane_curve(d).unwrap() == ratio(2 * d, 3 * (d - 3)));
    let elapsed = start.elapsed();
    let d4 = log_coefficient_plane_curve(4).unwrap() == ratio(8, 3);
    let d5 = log_coefficient_plane_curve(5).unwrap() == ratio(5, 3);
    check(
        all && d4 && d5 && elapsed < Duration::from_millis(10),
        format!("identity for d = 4..100, d=4 -> 8/3, d=5 -> 5/3 in {elapsed:?}"),
    )
}

fn log_term(nodes: usize) -> f64 {
    let g = RadialGrid::new(-40.0, 0.5f64.ln(), nodes).unwrap();
    let p = MongeAmpereProblem {
        background: ModelMetric::poincare(),
        f: RadialField::from_fn(&g, |x| 1.5 * x),
        left: LeftBoundary::Asymptotic { exponent: 1.0 },
        right: 0.0,
        newton: NewtonParams::default(),
    };
    let (u, rep) = solve_monge_ampere_radial(&p).unwrap();
    assert!(rep.converged);
    detect_log_term(&u).unwrap().b_tilde
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let coarse = log_term(4096);
    let fine = log_term(2 * 4095 + 1);
    let elapsed = start.elapsed();
    let change = (fine - coarse).abs() / coarse.abs();
    check(
        (coarse - 1.0).abs() <= 0.02 && change < 0.005 && elapsed < Duration::from_secs(10),
        format!("b_tilde {coarse:.6} (refined {fine:.6}, change {:.3}%) in {elapsed:?}", 100.0 * change),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let ode_err = [(2.0, 2f64.ln()), (5.0, 3.0)]
        .iter()
        .map(|&(c0, t)| (cusp_constant_rk4(c0, t, 1e-3).unwrap() - cusp_constant_evolution(c0, t).unwrap()).abs())
        .fold(0.0, f64::max);
    let c: f64 = 2.0;
    let g = RadialGrid::default_cusp();
    let phi = RadialField::from_fn(&g, |x| 0.5 * c.ln() + 0.1 * x);
    let mut p = FlowProblem::new(ModelMetric::conformal(phi), g, 0.5, 0.01);
    p.output_times = vec![0.5];
    let states = run_flow(&p).unwrap();
    let got = states.last().unwrap().summary.boundary_constant;
    let expected = cusp_constant_evolution(c, 0.5).unwrap();
    let rel = (got - expected).abs() / expected;
    let elapsed = start.elapsed();
    check(
        ode_err <= 1e-10 && rel <= 0.01 && elapsed < Duration::from_secs(30),
        format!("RK4 error {ode_err:.2e}; boundary constant {got:.6} vs {expected:.6} ({:.3}%) in {elapsed:?}", 100.0 * rel),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut p = FlowProblem::new(ModelMetric::poincare(), RadialGrid::default_cusp(), 1.0, 1e-2);
    p.output_times = (1..=100).map(|k| k as f64 * 1e-2).collect();
    let states = run_flow(&p).unwrap();
    let sup = states.iter().map(|s| s.u.max_abs()).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    check(
        sup <= 1e-8 && states.len() == 101 && elapsed < Duration::from_secs(10),
        format!("sup |u| = {sup:.2e} over {} states in {elapsed:?}", states.len()),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let sol = restricted_ode_solution(&[2.0], 1.0, 1e-3).unwrap();
    let elapsed = start.elapsed();
    check(
        sol.max_difference <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("max |quadrature - RK4| = {:.2e}, u(1) = {:.10} in {elapsed:?}", sol.max_difference, sol.quadrature.last().unwrap()),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let p = DecayProblem::new(RadialGrid::default_cusp(), 1.0, 1.0, 0.01);
    let cert = decay_certificate(&p, &|_, _| 1.0).unwrap();
    let elapsed = start.elapsed();
    let sup = cert.trajectory.sup_ratio();
    check(
        sup.is_finite() && cert.holds() && cert.refinement_change < 0.02 && elapsed < Duration::from_secs(30),
        format!(
            "sup |u|/x = {sup:.6} <= {:.4} e^({:.4} t), refinement change {:.4}% in {elapsed:?}",
            cert.k,
            cert.c,
            100.0 * cert.refinement_change
        ),
    )
}

fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let sizes = [401, 801, 1601, 3201];
    let grid = |n: usize| RadialGrid::new(-20.0, 0.5f64.ln(), n).unwrap();
    let linear: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let g = grid(n);
            let p = LinearProblem {
                metric: ModelMetric::poincare(),
                lambda: 1.0,
                rhs: RadialField::from_fn(&g, |x| 2.0 * x * x),
                left: LeftBoundary::Dirichlet { value: g.x_min().powi(2) },
                right: g.x_max().powi(2),
            };
            let u = solve_linear(&p).unwrap();
            u.grid().xs().zip(u.values()).map(|(x, v)| (v - x * x).abs()).fold(0.0, f64::max)
        })
        .collect();
    let nonlinear: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let g = grid(n);
            let p = MongeAmpereProblem {
                background: ModelMetric::poincare(),
                f: RadialField::from_fn(&g, |x| (3.0 * x * x).ln_1p() - x * x),
                left: LeftBoundary::Dirichlet { value: g.x_min().powi(2) },
                right: g.x_max().powi(2),
                newton: NewtonParams::default(),
            };
            let (u, _) = solve_monge_ampere_radial(&p).unwrap();
            u.grid().xs().zip(u.values()).map(|(x, v)| (v - x * x).abs()).fold(0.0, f64::max)
        })
        .collect();
    let elapsed = start.elapsed();
    let (ol, on) = (orders(&linear), orders(&nonlinear));
    let ok = ol.iter().chain(&on).all(|o| (o - 2.0).abs() <= 0.5);
    check(
        ok && elapsed < Duration::from_secs(60),
        format!("linear orders {ol:.3?}, Monge-Ampere orders {on:.3?} in {elapsed:?}"),
    )
}

fn family_strategy() -> impl Strategy<Value = IndicialFamily> {
    (
        (1i64..=8, 1i64..=4),
        (1i64..=6, 1i64..=4),
        proptest::collection::btree_set(0i64..=24, 1..=4),
        1i64..=3,
    )
        .prop_map(|((ln, ld), (cn, cd), nus, den)| {
            let spectrum = nus.into_iter().map(|n| Eigenvalue::simple(ratio(n, den))).collect();
            IndicialFamily::new(ratio(ln, ld), ratio(cn, cd), spectrum).unwrap()
        })
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    let strategy = family_strategy();
    let families: Vec<IndicialFamily> =
        (0..50).map(|_| strategy.new_tree(&mut runner).unwrap().current()).collect();
    let cutoff = int(6);
    let mut failures = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        let other = &families[(i + 1) % families.len()];
        let e = closure(&index_set_eplus(fam, &int(0), &cutoff).unwrap());
        let f = closure(&index_set_eplus(other, &int(0), &cutoff).unwrap());
        let ef = extended_union(&e, &f).unwrap();
        let fe = extended_union(&f, &e).unwrap();
        if ef != fe || !e.terms().iter().chain(f.terms()).all(|t| ef.contains(t)) {
            failures.push(format!("union {i}"));
        }
        if closure(e.as_term_set()) != e {
            failures.push(format!("idempotence {i}"));
        }
        let hat = index_set_hat_eplus(fam, &int(0), &cutoff).unwrap();
        if !e.terms().iter().all(|t| hat.contains(t)) {
            failures.push(format!("hat containment {i}"));
        }
        let zs: Vec<f64> = fam.spec_b_roots().roots.iter().map(|r| r.z.to_f64()).collect();
        let n = fam.spectrum().len();
        if zs.iter().filter(|&&z| z > 0.0).count() != n || zs.iter().filter(|&&z| z < -1.0).count() != n {
            failures.push(format!("root signs {i}"));
        }
    }
    let fam = IndicialFamily::new(int(1), int(1), vec![Eigenvalue::simple(int(0)), Eigenvalue::simple(int(2))]).unwrap();
    let accidental = index_set_hat_eplus(&fam, &int(0), &int(3)).unwrap().contains(&IndexTerm::int(2, 1));
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && accidental && elapsed < Duration::from_secs(5),
        format!("50 families, failures {failures:?}, (2,1) present: {accidental} in {elapsed:?}"),
    )
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push((path.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path();
    write(cfg, "indicial.toml", "lambda = 1\nc = 1\nspectrum = [0, 2]\nalpha = 0\ncutoff = 3\n");
    write(cfg, "chern.toml", "d = 5\n");
    let grid = "[grid]\nt_min = -30.0\nnodes = 1025\n";
    write(cfg, "linear.toml", &format!("rhs = [{{ a = 1.5, z = 1.0 }}]\nprobe_delta = 0.5\n{grid}"));
    write(cfg, "ma.toml", &format!("f = [{{ a = 1.5, z = 1.0 }}]\n{grid}[left]\nkind = \"asymptotic\"\nexponent = 1.0\n"));
    write(cfg, "flow.toml", &format!("phi = [{{ a = 0.2, z = 0.0 }}, {{ a = 0.1, z = 1.0 }}]\nt_final = 0.2\ndt = 0.02\noutput_times = [0.1, 0.2]\n{grid}"));
    write(cfg, "pipeline.toml", &format!("f = [{{ a = 1.5, z = 1.0 }}]\n{grid}"));
    write(cfg, "set.json", r#"{"cutoff": 1, "terms": [{"z": 1, "k": 1}]}"#);
    write(cfg, "fit.toml", "samples = \"ma.csv\"\nindex_set = \"set.json\"\nwindow = [1e-8, 1e-2]\nremainder_n = 2.0\n");
    write(
        cfg,
        "sweep.toml",
        "jobs = 2\n[[run]]\nname = \"a\"\ncommand = \"chern-coeff\"\nconfig = \"chern.toml\"\n[[run]]\nname = \"b\"\ncommand = \"solve-ma\"\nconfig = \"ma.toml\"\n",
    );
    let bin = env!("CARGO_BIN_EXE_cuspkit");
    let run_all = |out: &Path| -> bool {
        let mut ok = true;
        let jobs = [
            ("indicial", "indicial.toml"),
            ("chern-coeff", "chern.toml"),
            ("solve-linear", "linear.toml"),
            ("solve-ma", "ma.toml"),
            ("flow", "flow.toml"),
            ("logterm-pipeline", "pipeline.toml"),
            ("sweep", "sweep.toml"),
            ("fit-expansion", "fit.toml"),
        ];
        for (sub, file) in jobs {
            if sub == "fit-expansion" {
                std::fs::copy(out.join("solve-ma/solution.csv"), cfg.join("ma.csv")).unwrap();
            }
            let status = Command::new(bin)
                .arg("--out")
                .arg(out.join(sub))
                .arg(sub)
                .arg(cfg.join(file))
                .output()
                .unwrap()
                .status;
            ok &= status.success();
        }
        ok
    };
    let out = tmp.path().join("out");
    let first_ok = run_all(&out);
    let first = snapshot(&out);
    let second_ok = run_all(&out);
    let second = snapshot(&out);
    check(
        first_ok && second_ok && first == second && first.len() >= 12,
        format!("8 subcommands run twice, {} output files byte-identical: {}", first.len(), first == second),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("indicial roots", criterion_1),
        ("log-coefficient identity", criterion_2),
        ("end-to-end log-term recovery", criterion_3),
        ("cusp-constant evolution", criterion_4),
        ("flow fixed point", criterion_5),
        ("restricted ODE mutual oracle", criterion_6),
        ("decay certificate", criterion_7),
        ("manufactured-solution convergence", criterion_8),
        ("index-algebra property suite", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = f();
        println!(
            "criterion {:>2} {:<36} {}  {}",
            i + 1,
            name,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
        failed += usize::from(!outcome.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
