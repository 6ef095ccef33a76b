//! Acceptance suite. Prints one PASS/FAIL line per criterion, with detail
//! lines indented below it, and exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use drg_core::gradients::riemannian_gradient;
use drg_core::integrators::{integrate, presets};
use drg_core::linalg::{dot, norm, sub};
use drg_core::problems::{chain_setup, top_setup};
use drg_core::quadrature::CollocationTableau;
use drg_core::{
    CenterFunction, DiscreteGradient, DrgKind, Manifold, ManifoldPoint,
    OneStepMethod, Oscillator, Problem, SkewApprox, SolverOptions, SpinChain, SpinningTop,
    Spheres, TangentVector,
};
use drg_harness::studies::{self, OrderSeries};
use drg_harness::ExperimentSpec;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn top() -> SpinningTop {
    SpinningTop::new([1.0, 2.0, 4.0]).unwrap()
}

fn kinds(chain: bool) -> Vec<(&'static str, DrgKind, f64)> {
    let mut v = vec![
        ("mp", DrgKind::Midpoint, 1e-12),
        ("ia", DrgKind::ItohAbe, 1e-12),
        ("sia", DrgKind::SymmetrizedItohAbe, 1e-12),
        ("avf", DrgKind::Avf { nq: 16 }, 1e-10),
    ];
    if chain {
        v.push(("mmp", DrgKind::ModifiedMidpoint, 1e-12));
    }
    v
}

fn default_center(kind: DrgKind) -> CenterFunction {
    match kind {
        DrgKind::ItohAbe => CenterFunction::Left,
        _ => CenterFunction::ChordalMidpoint,
    }
}

fn setups() -> Vec<(&'static str, Box<dyn Problem>, usize)> {
    vec![
        ("S2", Box::new(top()), 1),
        ("(S2)^5", Box::new(SpinChain::new(5).unwrap()), 5),
    ]
}

fn defining_identity() -> Outcome {
    let mut out = Outcome::new();
    let mut r = rng(101);
    for (name, p, b) in setups() {
        let m = p.manifold();
        for (kname, kind, tol) in kinds(b > 1) {
            let d = DiscreteGradient::new(kind, default_center(kind));
            let mut worst: f64 = 0.0;
            for _ in 0..200 {
                let u = sphere_point(&mut r, b);
                let v = nearby(&mut r, &u, 0.5);
                let g = d.evaluate(p.as_ref(), &u, &v).unwrap();
                let eta = sub(
                    &m.inverse_retract(&g.base, &v).unwrap().comps,
                    &m.inverse_retract(&g.base, &u).unwrap().comps,
                );
                let res = (p.value(v.coords()) - p.value(u.coords()) - dot(&g.comps, &eta)).abs();
                let scale = if tol == 1e-12 { 1.0 + p.value(u.coords()).abs() } else { 1.0 };
                worst = worst.max(res / scale);
            }
            out.check(worst <= tol, format!("{name} {kname}: residual {worst:.2e} (tol {tol:e})"));
        }
    }
    out
}

fn consistency() -> Outcome {
    let mut out = Outcome::new();
    let mut r = rng(102);
    for (name, p, b) in setups() {
        for (kname, kind, _) in kinds(b > 1) {
            let d = DiscreteGradient::new(kind, default_center(kind));
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let u = sphere_point(&mut r, b);
                let g = d.evaluate(p.as_ref(), &u, &u).unwrap();
                let want = riemannian_gradient(p.as_ref(), p.manifold(), &u).unwrap();
                worst = worst.max(max_abs_diff(&g.comps, &want.comps));
            }
            out.check(worst <= 1e-10, format!("{name} {kname}: {worst:.2e}"));
        }
    }
    out
}

fn energy_conservation() -> Outcome {
    let mut out = Outcome::new();
    let (top, s0) = top_setup();
    let methods = [
        ("mp", presets::mp(), 1e-10),
        ("ia", presets::ia(), 1e-10),
        ("sia", presets::sia(), 1e-10),
        ("avf", presets::avf(16), 1e-9),
    ];
    let mut worst_drg: f64 = 0.0;
    for (name, m, tol) in methods {
        let rec = integrate(&m, &top, &opts(), &s0, 1.0, 1000.0).unwrap();
        let drift = rec.max_energy_drift();
        worst_drg = worst_drg.max(drift);
        let ok = rec.failure.is_none() && drift <= tol;
        out.check(ok, format!("{name}: max drift {drift:.2e} (tol {tol:e}), failure {:?}", rec.failure));
    }
    let rec = integrate(&OneStepMethod::ImplicitMidpoint, &top, &opts(), &s0, 1.0, 1000.0).unwrap();
    let imp = rec.max_energy_drift();
    out.check(
        rec.failure.is_none() && imp >= 1e3 * worst_drg,
        format!("imp: max drift {imp:.2e}, ratio to worst DRG {:.2e} (need >= 1e3)", imp / worst_drg),
    );
    out
}

fn order_spec(problem: &str, methods: &[&str]) -> ExperimentSpec {
    let h_list: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
    let json = serde_json::json!({
        "problem": problem,
        "methods": methods,
        "h_list": h_list,
        "t_end": 10.0,
    });
    ExperimentSpec::from_json(&json.to_string()).unwrap()
}

fn convergence_orders() -> Outcome {
    let mut out = Outcome::new();
    let expected: [(&str, f64, f64); 11] = [
        ("ia", 1.0, 0.2),
        ("avf", 2.0, 0.2),
        ("mp", 2.0, 0.2),
        ("sia", 2.0, 0.2),
        ("comp2", 2.0, 0.2),
        ("comp-sia", 4.0, 0.3),
        ("comp4", 4.0, 0.3),
        ("coll2", 4.0, 0.3),
        ("coll3", 6.0, 0.3),
        ("coll4", 8.0, 0.5),
        ("mmp", 2.0, 0.2),
    ];
    for problem in ["top", "chain"] {
        let ids: Vec<&str> = expected
            .iter()
            .map(|e| e.0)
            .filter(|&id| problem == "chain" || id != "mmp")
            .collect();
        let series: Vec<OrderSeries> = studies::order(&order_spec(problem, &ids)).unwrap();
        for (s, (id, want, tol)) in series.iter().zip(expected) {
            let used = s
                .rows
                .iter()
                .filter(|r| r.err_ambient.is_finite() && r.err_ambient > drg_harness::config::DEFAULT_FIT_FLOOR)
                .count();
            let failed: Vec<String> = s.failures.iter().map(|(h, _)| format!("{h}")).collect();
            let errs: Vec<String> = s.rows.iter().map(|r| format!("{:.1e}", r.err_ambient)).collect();
            let ok = (s.slope - want).abs() <= tol;
            let line = format!(
                "{problem} {id}: slope {:.3} (want {want}±{tol}), {used} points fitted, \
                 failed h [{}], errors [{}]",
                s.slope,
                failed.join(", "),
                errs.join(" ")
            );
            // the modified midpoint method is reported but not part of the criterion
            if id == "mmp" {
                out.details.push(format!("info {line}"));
            } else {
                out.check(ok, line);
            }
        }
    }
    out
}

fn one_stage_collocation() -> Outcome {
    let mut out = Outcome::new();
    let top = top();
    let mut r = rng(105);
    let coll = OneStepMethod::Collocation(CollocationTableau::gauss(1).unwrap());
    let drg = OneStepMethod::drg(
        DiscreteGradient::new(DrgKind::Avf { nq: 16 }, CenterFunction::Left),
        SkewApprox::PulledBack { fraction: 0.5 },
    );
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u = sphere_point(&mut r, 1);
        for h in [0.1, 0.5] {
            let a = coll.step(&top, &opts(), &u, h).unwrap().point;
            let b = drg.step(&top, &opts(), &u, h).unwrap().point;
            worst = worst.max(max_abs_diff(a.coords(), b.coords()));
        }
    }
    out.check(worst <= 1e-12, format!("max difference {worst:.2e}"));
    out
}

fn classical_step(u: [f64; 2], h: f64, dg: &dyn Fn([f64; 2], [f64; 2]) -> [f64; 2]) -> [f64; 2] {
    let mut v = u;
    for _ in 0..500 {
        let g = dg(u, v);
        let next = [u[0] - h * g[1], u[1] + h * g[0]];
        let done = (next[0] - v[0]).abs().max((next[1] - v[1]).abs()) <= 1e-15;
        v = next;
        if done {
            break;
        }
    }
    v
}

fn euclidean_reduction() -> Outcome {
    let mut out = Outcome::new();
    let osc = Oscillator::new();
    let energy = |x: [f64; 2]| 0.5 * (x[0] * x[0] + x[1] * x[1]);
    let itoh_abe = move |u: [f64; 2], v: [f64; 2]| {
        let w = [v[0], u[1]];
        let a0 = if v[0] != u[0] { (energy(w) - energy(u)) / (v[0] - u[0]) } else { u[0] };
        let a1 = if v[1] != u[1] { (energy(v) - energy(w)) / (v[1] - u[1]) } else { v[1] };
        [a0, a1]
    };
    // 3-point Gauss average of the gradient along the chord
    let avf = |u: [f64; 2], v: [f64; 2]| {
        let nodes = [(0.5 - 0.15f64.sqrt(), 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + 0.15f64.sqrt(), 5.0 / 18.0)];
        let mut g = [0.0; 2];
        for (x, w) in nodes {
            for i in 0..2 {
                g[i] += w * ((1.0 - x) * u[i] + x * v[i]);
            }
        }
        g
    };
    let cases: [(&str, OneStepMethod, &dyn Fn([f64; 2], [f64; 2]) -> [f64; 2]); 2] = [
        ("ia", presets::ia(), &itoh_abe),
        ("avf", presets::avf(16), &avf),
    ];
    for (name, m, dg) in cases {
        let h = 0.1;
        let mut u = ManifoldPoint::new(vec![1.0, 0.5]);
        let mut w = [1.0, 0.5];
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            u = m.step(&osc, &opts(), &u, h).unwrap().point;
            w = classical_step(w, h, dg);
            worst = worst.max(max_abs_diff(u.coords(), &w));
        }
        out.check(worst <= 1e-13, format!("{name}: max difference over 100 steps {worst:.2e}"));
    }
    out
}

fn exact_solution_oracle() -> Outcome {
    let mut out = Outcome::new();
    let (chain, sol) = chain_setup();
    let d = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let t = 0.5 * k as f64;
        let fd: Vec<f64> = sub(sol.state(&chain, t + d).coords(), sol.state(&chain, t - d).coords())
            .iter()
            .map(|x| x / (2.0 * d))
            .collect();
        let f = chain.field(sol.state(&chain, t).coords());
        worst = worst.max(max_abs_diff(&fd, &f));
    }
    out.check(worst <= 1e-8, format!("max |fd - F| over 20 times: {worst:.2e}"));
    out
}

fn geometry_axioms() -> Outcome {
    let mut out = Outcome::new();
    let mut r = rng(108);
    for (name, m, b) in [("S2", Spheres::single(), 1), ("(S2)^5", Spheres::product(5), 5)] {
        let (mut fixes, mut moves, mut diff, mut trip, mut adj, mut basis) = (true, true, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..100 {
            let p = sphere_point(&mut r, b);
            fixes &= m.retract(&TangentVector::zero(&p)).unwrap() == p;

            let x = tangent(&mut r, &p, 0.5);
            let u = m.retract(&x).unwrap();
            if norm(&x.comps) > 1e-6 {
                moves &= max_abs_diff(u.coords(), p.coords()) > 0.0;
            }
            trip = trip.max(max_abs_diff(&m.inverse_retract(&p, &u).unwrap().comps, &x.comps));

            let v = tangent(&mut r, &p, 1.0);
            let eps = 1e-5;
            let ue = m.retract(&TangentVector::new(p.clone(), v.comps.iter().map(|c| c * eps).collect())).unwrap();
            let fd: Vec<f64> = sub(ue.coords(), p.coords()).iter().map(|z| z / eps).collect();
            diff = diff.max(norm(&sub(&fd, &v.comps)) / eps);

            let a = tangent(&mut r, &u, 1.0);
            let lhs = m.metric(&m.tangent_map_transpose(&x, &a).unwrap(), &v).unwrap();
            let rhs = m.metric(&a, &m.tangent_map(&x, &v).unwrap()).unwrap();
            adj = adj.max((lhs - rhs).abs());

            let e = m.orthonormal_basis(&p);
            for (i, ei) in e.iter().enumerate() {
                for (j, ej) in e.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    basis = basis.max((m.metric(ei, ej).unwrap() - want).abs());
                }
                basis = basis.max(normal_component(&p, ei));
            }
        }
        out.check(fixes, format!("{name} axiom 1: R_p(0) = p"));
        out.check(moves, format!("{name} axiom 2: R_p(x) != p for x != 0"));
        out.check(diff <= 1.0, format!("{name} axiom 3: |(R_p(εv) - p)/ε - v| / ε = {diff:.2e} (tol 1)"));
        out.check(trip <= 1e-12, format!("{name} inverse roundtrip {trip:.2e} (tol 1e-12)"));
        out.check(adj <= 1e-12, format!("{name} tangent-map adjointness {adj:.2e} (tol 1e-12)"));
        out.check(basis <= 1e-14, format!("{name} basis orthonormality {basis:.2e} (tol 1e-14)"));
    }
    out
}

fn normal_component(p: &ManifoldPoint, v: &TangentVector) -> f64 {
    p.coords()
        .chunks(3)
        .zip(v.comps.chunks(3))
        .map(|(s, x)| dot(s, x).abs())
        .fold(0.0, f64::max)
}

fn symmetry() -> Outcome {
    let mut out = Outcome::new();
    let top = top();
    let tol = 10.0 * opts().fp_tol;
    let methods = [
        ("avf", presets::avf(16)),
        ("mp", presets::mp()),
        ("sia", presets::sia()),
        ("ia2", presets::ia2()),
        ("comp-sia", presets::comp_sia()),
        ("comp4", presets::comp4()),
    ];
    for (name, m) in methods {
        let mut r = rng(109);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let u = sphere_point(&mut r, 1);
            let v = m.step(&top, &opts(), &u, 0.5).unwrap().point;
            let back = m.step(&top, &opts(), &v, -0.5).unwrap().point;
            worst = worst.max(max_abs_diff(back.coords(), u.coords()));
        }
        out.check(worst <= tol, format!("{name}: |ψ_-h ψ_h u - u| = {worst:.2e} (tol {tol:e})"));
    }
    out
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 discrete gradient defining identity", Duration::from_secs(5), defining_identity),
        ("2 consistency", Duration::from_secs(1), consistency),
        ("3 energy conservation on the spinning top", Duration::from_secs(30), energy_conservation),
        ("4 convergence orders", Duration::from_secs(300), convergence_orders),
        ("5 one-stage collocation equals the AVF DRG step", Duration::from_secs(5), one_stage_collocation),
        ("6 Euclidean reduction", Duration::from_secs(1), euclidean_reduction),
        ("7 exact chain solution solves the ODE", Duration::from_secs(1), exact_solution_oracle),
        ("8 geometry axioms", Duration::from_secs(5), geometry_axioms),
        ("9 symmetric methods are reversible", Duration::from_secs(5), symmetry),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= budget;
        failures += usize::from(!pass);
        println!(
            "{} criterion {name} ({:.2} s, budget {} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        for d in outcome.details {
            println!("      {d}");
        }
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
