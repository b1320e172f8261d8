//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repfam::affiliated::{cayley, spec_observable, CayleyElement, Observable};
use repfam::families::{
    direct_invertibility, family_report, fredholm_via_family, invertible_via_faithful, members_invertible,
    spectrum_union, Probe, RepFamily, SpectralContract,
};
use repfam::linalg::{eig_normal, hausdorff, ComplexMatrix, SpectrumSet, DEFAULT_TOL};
use repfam::model::{
    enum_prim, AlgebraElement, AlgebraModel, BaseSpace, BlockStructure, Constraint, Element, FunctionModel,
    ToeplitzElement, ToeplitzModel, TrigPoly,
};
use repfam::parametric::{invertible_parametric, spectrum_parametric, InvariantOperator, LambdaGrid};
use repfam_cli::scenario::{self, BuiltModel};
use repfam_cli::{gallery, render, run_source, RunOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Haar-like unitary by Gram-Schmidt on a random complex matrix.
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| random_complex(rng)).collect();
        for u in &cols {
            let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            u[(i, j)] = *x;
        }
    }
    u
}

/// `U diag(values) Uᴴ`: a normal matrix with a planted spectrum.
fn planted(rng: &mut ChaCha8Rng, values: &[Complex64]) -> ComplexMatrix {
    let u = random_unitary(rng, values.len());
    &(&u * &ComplexMatrix::diag(values)) * &u.adjoint()
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let report = run_source("gallery:matrix-counterexample", RunOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let text = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    let step = text["model"]["grid_step"].as_f64().ok_or("missing grid step")?;
    check(step <= 1.0 / 64.0, format!("grid step {step} > 1/64"))?;
    let classify = &text["queries"][0]["result"]["report"];
    check(classify["faithful"]["holds"] == true, "family not faithful")?;
    check(classify["full"]["holds"] == false, "family reported full")?;
    let inv = &text["queries"][1]["result"];
    check(inv["members"]["all_invertible"] == true, "some member image not invertible")?;
    check(inv["direct"]["invertible"] == false, "direct invertibility reported true")?;
    let bounds = inv["via_faithful"].as_array().ok_or("missing faithful answers")?;
    let max_bound = bounds.iter().filter_map(|b| b["bound"].as_f64()).fold(0.0, f64::max);
    check(max_bound >= 1e6, "bounds do not reach 1e6")?;
    for b in bounds {
        check(b["answer"]["value"] == false, format!("invertible_via_faithful true at bound {}", b["bound"]))?;
    }
    check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:?} >= 1 s"))?;

    // The same verdicts straight from the library.
    let m = repfam::model::diagonal_endpoint_model(64, 24).map_err(|e| e.to_string())?;
    let fam = RepFamily::eval_grid(
        &m,
        &[1.0],
        vec![repfam::model::Representation::CompressedEval { at: 1.0, block: 0 }],
        "F",
    )
    .map_err(|e| e.to_string())?;
    let f = AlgebraElement::from_fn(&m, |t| ComplexMatrix::diag(&[c(1.0), c(1.0 - t)])).map_err(|e| e.to_string())?;
    let fe: Element = f.clone().into();
    let r = family_report(&fam, &[Probe::new("f", fe.clone())]).map_err(|e| e.to_string())?;
    check(r.faithful.holds && !r.full.holds, "library classification differs")?;
    check(members_invertible(&fam, &fe).map_err(|e| e.to_string())?.all_invertible, "library: member not invertible")?;
    check(!direct_invertibility(&f).map_err(|e| e.to_string())?.invertible, "library: f invertible")?;
    for bound in [1.0, 10.0, 1e3, 1e6] {
        check(!invertible_via_faithful(&fam, &fe, bound).map_err(|e| e.to_string())?, format!("library: bound {bound}"))?;
    }
    Ok(format!("grid step {step}, runtime {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

/// The full family, the scenario's own family, leave-one-out families at a
/// spread of primitive points and random subfamilies.
fn generated_families(model: &AlgebraModel, own: Option<RepFamily>, rng: &mut ChaCha8Rng) -> Vec<RepFamily> {
    let reps: Vec<_> = enum_prim(model).iter().map(|p| p.label.representation()).collect();
    let mut out = vec![RepFamily::full(model, "full").unwrap()];
    out.extend(own);
    let stride = (reps.len() / 6).max(1);
    for skip in (0..reps.len()).step_by(stride) {
        let members: Vec<_> = reps.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r.clone()).collect();
        if !members.is_empty() {
            out.push(RepFamily::new(model.clone(), members, format!("without {}", reps[skip])).unwrap());
        }
    }
    for j in 0..6 {
        let keep = rng.gen_range(0.3..0.9);
        let members: Vec<_> = reps.iter().filter(|_| rng.gen_bool(keep)).cloned().collect();
        if !members.is_empty() {
            out.push(RepFamily::new(model.clone(), members, format!("random {j}")).unwrap());
        }
    }
    out
}

fn implication_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for name in ["discrete-blocks", "matrix-counterexample", "toeplitz-pi"] {
        let sc = scenario::parse(gallery::find(name).ok_or("missing gallery entry")?.text).map_err(|e| e.to_string())?;
        let built = scenario::build_model(&sc.model).map_err(|e| e.to_string())?;
        let BuiltModel::Algebra(model) = &built else {
            return Err(format!("{name} is not an algebra model"));
        };
        let own = sc.family.as_ref().map(|f| scenario::build_family(&built, f)).transpose().map_err(|e| e.to_string())?;
        let probes: Vec<Probe> = sc
            .elements
            .iter()
            .map(|(k, spec)| scenario::build_element(&built, k, spec).map(|e| Probe::new(k.clone(), e)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for fam in generated_families(model, own, &mut rng) {
            let r = family_report(&fam, &probes).map_err(|e| e.to_string())?;
            check(!r.full.holds || r.exhausting.holds, format!("{name}/{}: full but not exhausting", r.label))?;
            check(!r.exhausting.holds || r.faithful.holds, format!("{name}/{}: exhausting but not faithful", r.label))?;
            checked += 1;
        }
    }
    check(checked >= 20, format!("only {checked} families"))?;
    Ok(format!("{checked} families on 3 models"))
}

/// Random discrete model with at most 8 points and blocks at most 4×4.
fn random_discrete_model(rng: &mut ChaCha8Rng) -> Arc<FunctionModel> {
    let points = rng.gen_range(1..=8usize);
    let d = rng.gen_range(1..=4usize);
    let mut constraints = Vec::new();
    for p in 0..points {
        if rng.gen_bool(0.5) {
            let mut cuts = vec![0];
            for k in 1..d {
                if rng.gen_bool(0.5) {
                    cuts.push(k);
                }
            }
            cuts.push(d);
            let blocks = cuts.windows(2).map(|w| (w[0], w[1])).collect();
            constraints.push(Constraint::blocks_at(p as f64, blocks));
        }
    }
    let blocks = BlockStructure::new(d, constraints).unwrap();
    Arc::new(FunctionModel::new(BaseSpace::discrete(points).unwrap(), blocks).unwrap())
}

fn spectral_union_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let m = random_discrete_model(&mut rng);
        let model = AlgebraModel::Function(m.clone());
        let full = RepFamily::full(&model, "full").map_err(|e| e.to_string())?;
        let d = m.fiber_dim();
        let grid = m.base().grid().to_vec();
        let mut planted_points = Vec::new();
        let mut samples = Vec::new();
        for &t in &grid {
            let mut s = ComplexMatrix::zeros(d);
            for b in m.blocks().blocks_at(t).unwrap_or_else(|| vec![0..d]) {
                let values: Vec<Complex64> = (0..b.len()).map(|_| random_complex(&mut rng).scale(2.0)).collect();
                let nb = planted(&mut rng, &values);
                for r in 0..b.len() {
                    for q in 0..b.len() {
                        s[(b.start + r, b.start + q)] = nb[(r, q)];
                    }
                }
                planted_points.extend(values);
            }
            samples.push(s);
        }
        let a = AlgebraElement::from_samples(&m, grid, samples).map_err(|e| e.to_string())?;
        let u = spectrum_union(&full, &a.into()).map_err(|e| e.to_string())?;
        check(u.contract == SpectralContract::Equality, format!("element {i}: contract {:?}", u.contract))?;
        let exact = SpectrumSet::new(planted_points, DEFAULT_TOL);
        let dist = hausdorff(&u.spectrum, &exact).map_err(|e| e.to_string())?;
        check(dist <= 1e-8, format!("element {i}: Hausdorff {dist:e}"))?;
        worst = worst.max(dist);
    }
    Ok(format!("100 elements, worst Hausdorff {worst:.1e}"))
}

fn closure_union() -> Outcome {
    let mut last = f64::INFINITY;
    let mut dists = Vec::new();
    for intervals in [16usize, 64, 256] {
        let m = Arc::new(
            FunctionModel::new(BaseSpace::interval(intervals).unwrap(), BlockStructure::unconstrained(1).unwrap())
                .unwrap(),
        );
        let fam = RepFamily::eval_grid(&m, &[1.0], vec![], "dense grid").map_err(|e| e.to_string())?;
        let a = AlgebraElement::from_scalar_fn(&m, c).map_err(|e| e.to_string())?;
        let u = spectrum_union(&fam, &a.into()).map_err(|e| e.to_string())?;
        let h = 1.0 / intervals as f64;
        let exact: Vec<f64> = (0..=4 * intervals).map(|j| j as f64 * h / 4.0).collect();
        let d = hausdorff(&u.spectrum, &SpectrumSet::from_real(&exact, DEFAULT_TOL)).map_err(|e| e.to_string())?;
        check(d <= h, format!("h = 1/{intervals}: Hausdorff {d} > h"))?;
        check(d < last, format!("h = 1/{intervals}: Hausdorff {d} not below {last}"))?;
        last = d;
        dists.push(format!("{d:.2e}"));
    }
    Ok(format!("Hausdorff {}", dists.join(", ")))
}

fn cayley_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 16;
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let a = planted(&mut rng, &values.iter().map(|&x| c(x)).collect::<Vec<_>>());
        let a = (&a + &a.adjoint()).scale(c(0.5));
        let s = spec_observable(&Observable::bounded("a", a.clone()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let direct = eig_normal(&a, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let d1 = hausdorff(&s, &direct).map_err(|e| e.to_string())?;
        let d2 = hausdorff(&s, &SpectrumSet::from_real(&values, DEFAULT_TOL)).map_err(|e| e.to_string())?;
        check(d1 <= 1e-8, format!("matrix {i}: Hausdorff to eig_normal {d1:e}"))?;
        check(d2 <= 1e-8, format!("matrix {i}: Hausdorff to planted spectrum {d2:e}"))?;
        worst = worst.max(d1).max(d2);
    }
    let inf = Observable::infinite("inf");
    check(matches!(cayley(&inf).map_err(|e| e.to_string())?, CayleyElement::One), "Cayley of infinity is not 1")?;
    check(spec_observable(&inf).map_err(|e| e.to_string())?.is_empty(), "spectrum of infinity not empty")?;
    Ok(format!("100 matrices, worst Hausdorff {worst:.1e}; infinity gives u = 1 and the empty set"))
}

fn parametric_oracle() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    pool.install(|| {
        let start = Instant::now();
        let grid = LambdaGrid::new(1, 4.0, 1.0 / 32.0).map_err(|e| e.to_string())?;
        let t = InvariantOperator::shifted_laplacian(16, 1, 1.0).map_err(|e| e.to_string())?;
        let s = spectrum_parametric(&t, &grid).map_err(|e| e.to_string())?;
        let min = s.min_real().ok_or("empty spectrum")?;
        check((min - 1.0).abs() <= 1e-9, format!("min of spectrum {min}"))?;
        let analytic: Vec<f64> = (-4096..=4096)
            .flat_map(|j| {
                let l = j as f64 * 4.0 / 4096.0;
                (-16i64..=16).map(move |k| 1.0 + (k * k) as f64 + l * l)
            })
            .collect();
        let d = hausdorff(&s, &SpectrumSet::from_real(&analytic, DEFAULT_TOL)).map_err(|e| e.to_string())?;
        check(d <= 0.3, format!("Hausdorff to analytic set {d}"))?;

        let minus = InvariantOperator::shifted_laplacian(16, 1, 0.0).map_err(|e| e.to_string())?;
        let r = invertible_parametric(&minus, &grid, 0.1, 1e-6).map_err(|e| e.to_string())?;
        check(!r.invertible, "-Δ reported invertible")?;
        check(r.failing_fiber.as_deref() == Some(&[0.0][..]), format!("-Δ failing fiber {:?}", r.failing_fiber))?;
        let r = invertible_parametric(&t, &grid, 0.1, 1e-6).map_err(|e| e.to_string())?;
        check(r.invertible, "1 - Δ reported not invertible")?;
        let elapsed = start.elapsed();
        check(elapsed < Duration::from_secs(10), format!("runtime {elapsed:?} >= 10 s"))?;
        Ok(format!("min {min}, Hausdorff {d:.3}, single-threaded {:.2} s", elapsed.as_secs_f64()))
    })
}

fn toeplitz() -> Outcome {
    let cosine = ToeplitzElement::from_symbol(TrigPoly::from_terms(&[(1, c(1.0)), (-1, c(1.0))]))
        .with_sections(vec![128])
        .map_err(|e| e.to_string())?;
    let norm = repfam::model::toeplitz_norm(&cosine).value;
    let oracle = 2.0 * (PI / 129.0).cos();
    check((norm - oracle).abs() <= 1e-9, format!("section norm {norm} vs 2cos(π/129) = {oracle}"))?;
    check((norm - 2.0).abs() <= 0.005, format!("section norm {norm} not within 0.005 of 2"))?;

    let model = AlgebraModel::Toeplitz(Arc::new(ToeplitzModel::new(64).map_err(|e| e.to_string())?));
    let chars = RepFamily::toeplitz_characters(&model).map_err(|e| e.to_string())?;
    let shift = ToeplitzElement::shift();
    let r = fredholm_via_family(&chars, &shift.clone().into()).map_err(|e| e.to_string())?;
    check(r.fredholm, "e^{iθ} not Fredholm")?;
    let minus_one = shift.add(&ToeplitzElement::identity().scale(c(-1.0)));
    let r = fredholm_via_family(&chars, &minus_one.into()).map_err(|e| e.to_string())?;
    check(!r.fredholm, "e^{iθ} - 1 reported Fredholm")?;
    Ok(format!("N = 128 norm {norm:.6}; e^{{iθ}} Fredholm, e^{{iθ}} - 1 not"))
}

fn run_gallery() -> Result<Vec<String>, String> {
    gallery::GALLERY
        .iter()
        .map(|e| {
            run_source(&format!("gallery:{}", e.name), RunOptions::default())
                .map(|r| render(&r))
                .map_err(|err| format!("{}: {err}", e.name))
        })
        .collect()
}

fn determinism() -> Outcome {
    let first = run_gallery()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let second = pool.install(run_gallery)?;
    for (e, (a, b)) in gallery::GALLERY.iter().zip(first.iter().zip(&second)) {
        check(a == b, format!("{}: reports differ", e.name))?;
    }
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!("{} scenarios, {bytes} bytes identical across runs", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("counterexample reproduction", counterexample),
        ("implication chain", implication_chain),
        ("spectral union identity", spectral_union_identity),
        ("closure union", closure_union),
        ("Cayley round trip", cayley_round_trip),
        ("parametric oracle", parametric_oracle),
        ("Toeplitz norm and Fredholm", toeplitz),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("acceptance {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
