//! One pipeline per subcommand. Each returns a JSON report; a check whose
//! value exceeds its threshold marks the run as a verification failure.

use anyhow::{anyhow, bail, Context};
use poissonlin::forms::{
    verify_contraction, verify_lemma1, verify_lemma2, verify_lemma2_divergence, verify_lemma3,
    verify_linearization_on_orbit, verify_prop_hard, verify_volume_theorem,
};
use poissonlin::linalg::{self, CMat};
use poissonlin::measures::{duflo_compare, MIN_COMPARE_SAMPLES};
use poissonlin::rng::stream;
use poissonlin::thompson::{
    random_feasible_instance, solve, transfer_coset_to_dressing, CosetSolution, FeasibilityResult, Mode,
    SolverOptions, SpectraProblem, Verdict,
};
use poissonlin::{
    dress, e_inverse, e_map, factor_k_star, factor_star_k, hyperbolic_duflo, AntiHermitianElement, ChamberPoint,
    GroupElement, HermitianElement, TriangularPositive, UnitaryElement,
};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::io;
use crate::{Command, Options};

pub struct Outcome {
    pub failed: Vec<String>,
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    threshold: f64,
    passed: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, value: f64, threshold: f64) {
        self.0.push(Check { name: name.to_string(), value, threshold, passed: value <= threshold });
    }

    fn failed(&self) -> Vec<String> {
        self.0.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }
}

pub fn run(command: Command, opts: &Options) -> anyhow::Result<Outcome> {
    if let Some(tol) = opts.tol {
        if !(tol > 0.0) {
            bail!("--tol must be positive");
        }
    }
    if opts.samples == Some(0) {
        bail!("--samples must be at least 1");
    }
    if opts.bins == 0 {
        bail!("--bins must be at least 1");
    }
    let mut checks = Checks::default();
    let mut extra = serde_json::Map::new();
    match command {
        Command::Decompose => decompose(opts, &mut checks, &mut extra)?,
        Command::Linearize => linearize(opts, &mut checks, &mut extra)?,
        Command::Thompson => thompson(opts, &mut checks, &mut extra)?,
        Command::Transfer => transfer(opts, &mut checks, &mut extra)?,
        Command::VerifyIdentities => verify_identities(opts, &mut checks, &mut extra)?,
        Command::VolumeCheck => volume_check(opts, &mut checks, &mut extra)?,
        Command::DufloTest => duflo_test(opts, &mut checks, &mut extra)?,
    }
    let failed = checks.failed();
    let mut report = serde_json::Map::new();
    report.insert("command".into(), serde_json::to_value(command)?);
    report.insert("version".into(), json!(poissonlin::VERSION));
    report.insert("config".into(), serde_json::to_value(opts)?);
    report.insert("passed".into(), json!(failed.is_empty()));
    report.insert("checks".into(), serde_json::to_value(&checks.0)?);
    report.extend(extra);
    let mut text = serde_json::to_string_pretty(&Value::Object(report))?;
    text.push('\n');
    match &opts.output_path {
        Some(path) => io::write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(Outcome { failed })
}

fn rank(opts: &Options, default: usize) -> anyhow::Result<usize> {
    let r = opts.r.unwrap_or(default);
    if r == 0 {
        bail!("--r must be at least 1");
    }
    Ok(r)
}

fn haar(rng: &mut impl Rng, r: usize) -> UnitaryElement {
    UnitaryElement::new(linalg::haar_unitary(rng, r)).expect("Haar sample is unitary")
}

fn hermitian(rng: &mut impl Rng, r: usize, scale: f64) -> HermitianElement {
    HermitianElement::new(linalg::random_hermitian(rng, r).scale(scale)).expect("Hermitian sample")
}

fn anti_hermitian(rng: &mut impl Rng, r: usize) -> AntiHermitianElement {
    AntiHermitianElement::new(linalg::random_hermitian(rng, r) * linalg::I).expect("anti-Hermitian sample")
}

fn relative(diff: &CMat, base: &CMat) -> f64 {
    linalg::frobenius(diff) / linalg::frobenius(base)
}

fn decompose(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let mut rng = stream(opts.seed, 0);
    let matrices: Vec<CMat> = match &opts.input_path {
        Some(path) => vec![io::read_matrix(path)?],
        None => {
            let r = rank(opts, 3)?;
            (0..opts.samples.unwrap_or(1000)).map(|_| linalg::ginibre(&mut rng, r)).collect()
        }
    };
    let tol = |default: f64| opts.tol.unwrap_or(default);
    let (mut star_k, mut k_star, mut round_trip, mut dressing) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for m in &matrices {
        let g = GroupElement::new(m.clone()).context("input matrix")?;
        let (l, k) = factor_star_k(&g)?;
        star_k = star_k.max(relative(&(l.matrix() * k.matrix() - m), m));
        let (k2, l2) = factor_k_star(&g)?;
        k_star = k_star.max(relative(&(k2.matrix() * l2.matrix() - m), m));
        let back = e_map(&e_inverse(&l));
        round_trip = round_trip.max(relative(&(back.matrix() - l.matrix()), l.matrix()));
        let kk = haar(&mut rng, m.nrows());
        let (lk, kl) = dress(&kk, &l)?;
        let lhs = kk.matrix() * l.matrix();
        dressing = dressing.max(relative(&(lk.matrix() * kl.matrix() - &lhs), &lhs));
        if opts.input_path.is_some() {
            extra.insert("l".into(), io::complex_matrix(l.matrix()));
            extra.insert("k".into(), io::complex_matrix(k.matrix()));
            extra.insert("mu".into(), io::complex_matrix(e_inverse(&l).matrix()));
            extra.insert("radial_label".into(), json!(l.radial_label().values()));
        }
    }
    checks.push("factorization l k = g", star_k, tol(1e-12));
    checks.push("factorization k l = g", k_star, tol(1e-12));
    checks.push("E round trip", round_trip, tol(1e-10));
    checks.push("dressing k l = l^k k^l", dressing, tol(1e-12));
    extra.insert("resolved".into(), json!({ "r": matrices[0].nrows(), "samples": matrices.len() }));
    Ok(())
}

fn random_chamber(rng: &mut impl Rng, r: usize) -> ChamberPoint {
    ChamberPoint::from_unsorted(linalg::herm_eigenvalues(&linalg::random_hermitian(rng, r)))
}

fn linearize(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let r = rank(opts, 2)?;
    let samples = opts.samples.unwrap_or(10);
    let mut rng = stream(opts.seed, 0);
    let (mut contraction, mut orbit) = (0.0_f64, 0.0_f64);
    for _ in 0..samples {
        let mu = hermitian(&mut rng, r, 0.5);
        let xi = anti_hermitian(&mut rng, r);
        let v = hermitian(&mut rng, r, 1.0);
        contraction = contraction.max(verify_contraction(&mu, &xi, &v, 1e-5)?);
        let mu0 = random_chamber(&mut rng, r);
        let k = haar(&mut rng, r);
        let (x1, x2) = (anti_hermitian(&mut rng, r), anti_hermitian(&mut rng, r));
        orbit = orbit.max(verify_linearization_on_orbit(&mu0, &k, &x1, &x2)?);
    }
    let tol = opts.tol.unwrap_or(1e-5);
    checks.push("contraction of d beta", contraction, tol);
    checks.push("linearization on dressing orbit", orbit, tol);
    extra.insert("resolved".into(), json!({ "r": r, "samples": samples, "fd_step": 1e-5, "nodes": 64 }));
    Ok(())
}

fn solver_options(opts: &Options) -> anyhow::Result<SolverOptions> {
    let o = SolverOptions {
        tol: opts.tol.unwrap_or(1e-6),
        restarts: opts.restarts,
        max_iters: opts.max_iters,
        seed: opts.seed,
        ..SolverOptions::default()
    };
    o.validate()?;
    Ok(o)
}

fn labels_json(problem: &SpectraProblem) -> Value {
    let spectra: Vec<&[f64]> = problem.spectra.iter().map(|s| s.values()).collect();
    if problem.mode.is_additive() {
        return json!({ "eigenvalues": spectra });
    }
    let exp = |f: f64| -> Vec<Vec<f64>> { spectra.iter().map(|s| s.iter().map(|x| (f * x).exp()).collect()).collect() };
    json!({
        "log_eigenvalues_of_a_a_adjoint": spectra,
        "squared_singular_values": exp(1.0),
        "conventional_singular_values": exp(0.5),
    })
}

fn result_json(res: &FeasibilityResult) -> Value {
    json!({
        "verdict": res.verdict,
        "residual": res.residual,
        "witnesses": res.witnesses.iter().map(io::complex_matrix).collect::<Vec<_>>(),
        "certificate": res.certificate,
        "restarts_used": res.restarts_used,
        "iterations": res.iterations,
    })
}

fn thompson(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let path = opts.input_path.as_ref().ok_or_else(|| anyhow!("thompson requires --in <problem.json>"))?;
    let problem = io::read_problem(path, opts.mode)?;
    let so = solver_options(opts)?;
    let res = solve(&problem, &so)?;
    if let Value::Object(m) = result_json(&res) {
        extra.extend(m);
    }
    extra.insert("mode".into(), json!(problem.mode));
    extra.insert("labels".into(), labels_json(&problem));
    if res.verdict == Verdict::Feasible {
        checks.push("witness residual", res.residual.unwrap_or(f64::INFINITY), so.tol);
    }
    if res.verdict == Verdict::Undetermined {
        checks.push("solver reached a verdict", 1.0, 0.0);
    }
    Ok(())
}

fn transfer(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let instances: Vec<Vec<CMat>> = match &opts.input_path {
        Some(path) => {
            let problem = io::read_problem(path, Some(Mode::MultiplicativeComplex))?;
            let res = solve(&problem, &solver_options(opts)?)?;
            if res.verdict != Verdict::Feasible {
                bail!("problem in {} has no witness (verdict {})", path.display(), res.verdict.as_str());
            }
            vec![res.witnesses]
        }
        None => {
            let r = rank(opts, 3)?;
            let n = opts.n.unwrap_or(3);
            if n < 2 {
                bail!("--n must be at least 2");
            }
            (0..opts.samples.unwrap_or(100) as u64)
                .map(|i| random_feasible_instance(r, n, Mode::MultiplicativeComplex, opts.seed.wrapping_add(i)).1)
                .collect()
        }
    };
    let (mut product, mut labels, mut closure) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut last = None;
    for w in instances.iter() {
        let coset = CosetSolution::new(w.iter().map(|m| GroupElement::new(m.clone())).collect::<Result<_, _>>()?)?;
        let sol = transfer_coset_to_dressing(&coset)?;
        product = product.max(sol.product_residual());
        closure = closure.max(sol.closure_defect());
        for (a, b) in sol.labels().iter().zip(&coset.labels) {
            labels = labels.max(a.max_distance(b));
        }
        last = Some(sol);
    }
    let tol = opts.tol.unwrap_or(1e-8);
    checks.push("dressing product residual", product, tol);
    checks.push("radial label preservation", labels, tol);
    checks.push("closure defect", closure, tol);
    extra.insert("resolved".into(), json!({ "samples": instances.len(), "r": instances[0][0].nrows(), "n": instances[0].len() }));
    if opts.input_path.is_some() {
        let sol = last.expect("one instance");
        let points: Vec<Value> = sol.points.iter().map(|l: &TriangularPositive| io::complex_matrix(l.matrix())).collect();
        extra.insert("points".into(), Value::Array(points));
    }
    Ok(())
}

fn random_triangular(rng: &mut impl Rng, r: usize) -> TriangularPositive {
    e_map(&hermitian(rng, r, 0.5))
}

fn verify_identities(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let samples = opts.samples.unwrap_or(100);
    let max_r = rank(opts, 3)?;
    let tol = |default: f64| opts.tol.unwrap_or(default);
    let mut lemma1 = 0.0_f64;
    for r in 1..=max_r.max(5) {
        lemma1 = lemma1.max(verify_lemma1(r)?);
    }
    let mut rng = stream(opts.seed, 0);
    let (mut lemma2, mut lemma3, mut hard, mut divergence) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..samples {
        let r = 1 + i % max_r;
        let l = random_triangular(&mut rng, r);
        let xi = anti_hermitian(&mut rng, r);
        lemma2 = lemma2.max(verify_lemma2(&l));
        lemma3 = lemma3.max(verify_lemma3(&l, &xi)?);
        hard = hard.max(verify_prop_hard(&l, &xi)?.residual);
        if i < 10 {
            divergence = divergence.max(verify_lemma2_divergence(&l, 1e-5)?);
        }
    }
    checks.push("structure constant trace identity", lemma1, tol(1e-12));
    checks.push("S-matrix contraction with F", lemma2, tol(1e-10));
    checks.push("S-matrix divergence", divergence, tol(1e-5));
    checks.push("dressing vector pairing identity", lemma3, tol(1e-10));
    checks.push("moment condition with modular term", hard, tol(1e-9));
    extra.insert("resolved".into(), json!({ "r": max_r, "samples": samples }));
    Ok(())
}

fn volume_check(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let r = rank(opts, 2)?;
    let samples = opts.samples.unwrap_or(20);
    let mut rng = stream(opts.seed, 0);
    let (mut err, mut spread) = (0.0_f64, 0.0_f64);
    for _ in 0..samples {
        let mu0 = random_chamber(&mut rng, r);
        let expected = hyperbolic_duflo(&mu0);
        let a = verify_volume_theorem(&mu0, &haar(&mut rng, r))?;
        let b = verify_volume_theorem(&mu0, &haar(&mut rng, r))?;
        err = err.max((a - expected).abs() / expected);
        spread = spread.max((a - b).abs() / expected);
    }
    checks.push("volume ratio vs hyperbolic Duflo factor", err, opts.tol.unwrap_or(if r <= 2 { 1e-6 } else { 1e-5 }));
    checks.push("K-invariance spread", spread, opts.tol.unwrap_or(1e-8));
    extra.insert("resolved".into(), json!({ "r": r, "samples": samples }));
    Ok(())
}

fn duflo_test(opts: &Options, checks: &mut Checks, extra: &mut serde_json::Map<String, Value>) -> anyhow::Result<()> {
    let r = opts.r.or(opts.lambda1.as_ref().map(|l| l.0.len())).unwrap_or(2);
    let default = || -> Vec<f64> {
        if r == 1 {
            vec![1.0]
        } else {
            (0..r).map(|i| 1.0 - 2.0 * i as f64 / (r - 1) as f64).collect()
        }
    };
    let chamber = |v: Vec<f64>, name: &str| -> anyhow::Result<ChamberPoint> {
        if v.len() != r {
            bail!("--{name} has {} entries, expected r = {r}", v.len());
        }
        ChamberPoint::new(v).map_err(|e| anyhow!("--{name}: {e}"))
    };
    let l1 = chamber(opts.lambda1.clone().map(|l| l.0).unwrap_or_else(default), "lambda1")?;
    let l2 = chamber(opts.lambda2.clone().map(|l| l.0).unwrap_or_else(default), "lambda2")?;
    let samples = opts.samples.unwrap_or(1_000_000);
    if samples < MIN_COMPARE_SAMPLES {
        bail!("--samples must be at least {MIN_COMPARE_SAMPLES} for duflo-test");
    }
    let cmp = duflo_compare(&l1, &l2, samples, opts.bins, opts.seed)?;
    checks.push("L1 distance of radial densities", cmp.l1_distance, opts.tol.unwrap_or(0.05));
    extra.insert("l1_distance".into(), json!(cmp.l1_distance));
    extra.insert("ks_statistic".into(), json!(cmp.ks_statistic));
    extra.insert("count_additive".into(), json!(cmp.count_additive));
    extra.insert("count_multiplicative".into(), json!(cmp.count_multiplicative));
    extra.insert("resolved".into(), json!({ "r": r, "samples": samples, "lambda1": l1.values(), "lambda2": l2.values() }));
    if let Some(path) = &opts.csv {
        io::write_atomic(path, cmp.to_csv().as_bytes())?;
    }
    Ok(())
}
