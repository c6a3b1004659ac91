//! One line per acceptance criterion; exits nonzero when any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{
    dense, gram_of, random_instance, random_svr_instance, regularized_hinge, rng, svr_primal,
    svr_primal_minimum,
};
use ksvm::classify::{decision_value, empirical_risks};
use ksvm::data::{Dataset, LabeledDataset, RegressionDataset, TopicSpec};
use ksvm::experiment::{run_experiment, topic_comparison, ExperimentConfig, ExperimentId};
use ksvm::kernel::{gram, KernelSpec};
use ksvm::qp::{brute_force_dual, kkt_report, solve_svc_dual, SvcDualProblem};
use ksvm::regress::predict_svr;
use ksvm::{train_svc, train_svr, Result, SolverConfig, SvcModel, SvrModel};
use rand_distr::{Distribution, StandardNormal};

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn experiment(id: ExperimentId) -> Result<Outcome> {
    let report = run_experiment(&ExperimentConfig::new(id))?;
    let detail = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {} {} [{}]",
                if c.pass { "ok" } else { "FAILED" },
                c.name,
                c.observed,
                c.band
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(report.passed(), detail)
}

fn labels_of(data: &LabeledDataset) -> Vec<f64> {
    data.targets.iter().map(|&t| t as f64).collect()
}

fn oracle_equivalence() -> Result<Outcome> {
    let cfg = SolverConfig::with_tolerance(1e-8);
    let (mut worst_gap, mut worst_kkt, mut failures) = (0.0f64, 0.0f64, 0);
    for seed in 0..100 {
        let inst = random_instance(seed, 8);
        let p = SvcDualProblem::new(gram(&inst.kernel, &inst.data.samples)?, labels_of(&inst.data), inst.cost)?;
        let smo = solve_svc_dual(&p, &cfg)?;
        let oracle = brute_force_dual(&p)?;
        let gap = (smo.objective - oracle.objective).abs() / (1.0 + oracle.objective.abs());
        let kkt = kkt_report(&p, &smo)?.max_violation;
        worst_gap = worst_gap.max(gap);
        worst_kkt = worst_kkt.max(kkt);
        if gap > 1e-6 || kkt > cfg.tolerance {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("100 instances, worst relative objective gap {worst_gap:.2e} (<= 1e-6), worst KKT violation {worst_kkt:.2e} (<= 1e-8)"),
    )
}

fn analytic_fixtures() -> Result<Outcome> {
    let cfg = SolverConfig::with_tolerance(1e-12);
    let xs = vec![dense(&[-1.0]), dense(&[1.0])];
    let p = SvcDualProblem::new(gram(&KernelSpec::Linear, &xs)?, vec![-1.0, 1.0], 10.0)?;
    let s = solve_svc_dual(&p, &cfg)?;
    let data = Dataset::new(xs, vec![-1, 1])?;
    let m = train_svc(&data, &KernelSpec::Linear, 10.0, &cfg)?;
    let mut d_err = 0.0f64;
    for i in -20..=20 {
        let x = i as f64 * 0.25;
        d_err = d_err.max((decision_value(&m, &dense(&[x]))? - x).abs());
    }
    let lam_err = s.lambdas.iter().map(|l| (l - 0.5).abs()).fold(0.0, f64::max);
    let two_point = lam_err <= 1e-6 && s.bias.abs() <= 1e-6 && m.bias.abs() <= 1e-6 && d_err <= 1e-6;

    let corners = [([1.0, 1.0], 1), ([-1.0, -1.0], 1), ([1.0, -1.0], -1), ([-1.0, 1.0], -1)];
    let xor = Dataset::new(
        corners.iter().map(|(x, _)| dense(x)).collect(),
        corners.iter().map(|&(_, y)| y).collect(),
    )?;
    let q = train_svc(&xor, &KernelSpec::polynomial(1.0, 2)?, 10.0, &cfg)?;
    let probes = [([0.5, 0.5], 1), ([0.5, -0.5], -1), ([2.0, 0.5], 1), ([-0.5, 3.0], -1)];
    let mut signs = true;
    for (x, y) in corners.iter().chain(&probes) {
        signs &= (decision_value(&q, &dense(x))? * *y as f64) > 0.0;
    }
    outcome(
        two_point && q.n_support() == 4 && signs,
        format!(
            "two-point |λ-0.5| {lam_err:.1e}, b {:.1e}, max |D(x)-x| {d_err:.1e} (<= 1e-6); XOR {} support vectors, signs on corners and probes {}",
            s.bias,
            q.n_support(),
            if signs { "correct" } else { "WRONG" }
        ),
    )
}

fn line(points: &[(f64, f64)]) -> Result<RegressionDataset> {
    Dataset::new(
        points.iter().map(|&(x, _)| dense(&[x])).collect(),
        points.iter().map(|&(_, y)| y).collect(),
    )
}

fn svr_weights(m: &SvrModel, d: usize) -> Vec<f64> {
    let mut w = vec![0.0; d];
    for (sv, b) in m.support_vectors.iter().zip(&m.coefficients) {
        for (k, wk) in w.iter_mut().enumerate() {
            *wk += b * sv.get(k + 1);
        }
    }
    w
}

fn tube_gap(m: &SvrModel, data: &RegressionDataset, eps: f64) -> Result<f64> {
    // Smallest value of |residual| − ε over support vectors; never below −10τ.
    let mut worst = f64::INFINITY;
    for sv in &m.support_vectors {
        let i = data.samples.iter().position(|x| x == sv).expect("support vector from training set");
        worst = worst.min((predict_svr(m, sv)? - data.targets[i]).abs() - eps);
    }
    Ok(worst)
}

fn svr_fixtures() -> Result<Outcome> {
    let tight = SolverConfig::with_tolerance(1e-10);
    let m = train_svr(&line(&[(0.0, 1.0), (1.0, 3.0)])?, &KernelSpec::Linear, 100.0, 0.5, &tight)?;
    let w = svr_weights(&m, 1)[0];
    let flat = (w - 1.0).abs() <= 1e-4 && (m.bias - 1.5).abs() <= 1e-4;

    let c = train_svr(
        &line(&[(0.0, 2.0), (1.0, 2.0), (3.0, 2.0)])?,
        &KernelSpec::gaussian(1.0)?,
        10.0,
        0.1,
        &SolverConfig::default(),
    )?;
    let constant = c.n_support() == 0 && predict_svr(&c, &dense(&[17.0]))? == 2.0;

    let cfg = SolverConfig::with_tolerance(1e-9);
    let mut worst_gap = 0.0f64;
    for seed in 0..20 {
        let inst = random_svr_instance(seed);
        let m = train_svr(&inst.data, &KernelSpec::Linear, inst.cost, inst.epsilon, &cfg)?;
        let w = svr_weights(&m, inst.xs[0].len());
        let trained = svr_primal(&inst.xs, &inst.data.targets, &w, m.bias, inst.cost, inst.epsilon);
        let best = svr_primal_minimum(&inst.xs, &inst.data.targets, inst.cost, inst.epsilon);
        worst_gap = worst_gap.max((trained - best).abs());
    }

    let tau = 1e-6;
    let cfg = SolverConfig::with_tolerance(tau);
    let mut worst_tube = f64::INFINITY;
    let mut models = 0;
    for seed in 100..130 {
        let inst = random_svr_instance(seed);
        for kernel in [KernelSpec::Linear, KernelSpec::gaussian(1.0)?] {
            let m = train_svr(&inst.data, &kernel, inst.cost, inst.epsilon, &cfg)?;
            worst_tube = worst_tube.min(tube_gap(&m, &inst.data, inst.epsilon)?);
            models += 1;
        }
    }
    let sine = line(&(0..30).map(|i| (i as f64 * 0.2, (i as f64 * 0.2).sin())).collect::<Vec<_>>())?;
    for eps in [0.05, 0.2, 0.5] {
        let m = train_svr(&sine, &KernelSpec::gaussian(1.0)?, 100.0, eps, &cfg)?;
        worst_tube = worst_tube.min(tube_gap(&m, &sine, eps)?);
        models += 1;
    }
    let tube = worst_tube >= -10.0 * tau;
    outcome(
        flat && constant && worst_gap <= 1e-4 && tube,
        format!(
            "two-point w {w:.6} b {:.6} (1, 1.5 to 1e-4); constant targets {}; primal gap {worst_gap:.2e} over 20 instances (<= 1e-4); min |r|-ε over support vectors of {models} models {worst_tube:.2e} (>= -1e-5)",
            m.bias,
            if constant { "exact" } else { "NOT exact" }
        ),
    )
}

fn full_coefficients(model: &SvcModel, data: &LabeledDataset) -> Vec<f64> {
    data.samples
        .iter()
        .map(|x| {
            model
                .support_vectors
                .iter()
                .position(|s| s == x)
                .map_or(0.0, |i| model.coefficients[i])
        })
        .collect()
}

fn formulation_equivalence() -> Result<Outcome> {
    let cfg = SolverConfig::with_tolerance(1e-10);
    let mut r = rng(5);
    let mut margin = f64::INFINITY;
    let mut library = 0.0f64;
    for seed in 0..20 {
        let inst = random_instance(1000 + seed, 12);
        let model = train_svc(&inst.data, &inst.kernel, inst.cost, &cfg)?;
        let k = gram_of(&inst.kernel, &inst.data.samples);
        let y = labels_of(&inst.data);
        let alpha = full_coefficients(&model, &inst.data);
        let best = regularized_hinge(&k, &y, &alpha, model.bias, inst.cost);
        let scale = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1e-3);
        for _ in 0..50 {
            let a: Vec<f64> = alpha
                .iter()
                .map(|v| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    v + 1e-2 * scale * z
                })
                .collect();
            let z: f64 = StandardNormal.sample(&mut r);
            let b = model.bias + 1e-2 * model.bias.abs().max(1.0) * z;
            margin = margin.min(regularized_hinge(&k, &y, &a, b, inst.cost) - best);
        }
        let risks = empirical_risks(&model, &inst.data, None)?;
        library = library.max((risks.regularized - best).abs() / (1.0 + best));
    }
    outcome(
        margin >= -1e-12 && library <= 1e-9,
        format!("min objective increase over 1000 perturbations {margin:.3e} (>= 0); library vs oracle objective {library:.1e}"),
    )
}

fn topic_sanity() -> Result<Outcome> {
    let o = topic_comparison(&TopicSpec::default(), 1.0, &SolverConfig::default())?;
    outcome(
        o.train_error == 0.0 && o.test_error < o.nearest_neighbor_error,
        format!(
            "training error {:.2}% (0%), test error {:.2}% < 1-NN {:.2}%, {} support vectors",
            100.0 * o.train_error,
            100.0 * o.test_error,
            100.0 * o.nearest_neighbor_error,
            o.n_support
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("separable blobs", || experiment(ExperimentId::BlobsSeparable)),
        ("C sweep", || experiment(ExperimentId::CSweep)),
        ("overlapping blobs", || experiment(ExperimentId::BlobsOverlap)),
        ("outlier stability", || experiment(ExperimentId::BlobsOutliers)),
        ("waveform one-vs-one", || experiment(ExperimentId::Waveform)),
        ("dual solver vs brute force", oracle_equivalence),
        ("analytic fixtures", analytic_fixtures),
        ("regression fixtures", svr_fixtures),
        ("regularized hinge optimality", formulation_equivalence),
        ("two-topic text vs 1-NN", topic_sanity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] AC-{} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
