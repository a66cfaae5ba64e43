//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Built without the libtest harness so the lines always reach stdout.

use std::f64::consts::FRAC_PI_2;
use std::process::Command;

use babbage::builtin::{builtin_map, hardy_weinberg, BuiltinParams, JordanBlock};
use babbage::equation::{
    affine_complex_classify, check_pair, corollary_identities, detect_minimal_pair,
    idempotent_power, linear_solution_check, maps_equal, AffineClass, Mode, RestrictionLabel,
    Sampling,
};
use babbage::expr::{poly_canonical, Expression};
use babbage::interval::{image_chain, verify_1d_equation, Interval1};
use babbage::linearize::{
    cube_sampling, extract_gfrak, hw_conjugacy, hw_conjugacy_maps, involution_conjugacy,
    normal_form_residual, pointwise_residual, projection_conjugacy, HwVariant, LinearizeError,
};
use babbage::map::{iterate_map, MapSpec};
use babbage::obstruction::{
    gradient_vanish_scan, local_branch_count, preimage_components, GridWindow, DEFAULT_MARK_TOL,
};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn builtin(text: &str) -> MapSpec {
    builtin_map(&text.parse::<BuiltinParams>().unwrap()).unwrap()
}

fn map(vars: &[&str], comps: &[&str]) -> MapSpec {
    MapSpec::parse(vars, comps).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// Uniform point of the genotype simplex, last diagonal coordinate dropped.
fn random_simplex(rng: &mut StdRng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k * (k + 1) / 2)
        .map(|_| -rng.gen::<f64>().ln())
        .collect();
    let total: f64 = w.iter().sum();
    w[..w.len() - 1].iter().map(|v| v / total).collect()
}

fn hardy_weinberg_idempotence() -> Outcome {
    for k in [2, 3] {
        let f = builtin(&format!("builtin:hw_simple?k={k}"));
        let r = maps_equal(&f.power(2), &f, &Sampling::default(), Some(Mode::Exact))
            .map_err(|e| e.to_string())?;
        ensure(r.equal, format!("k = {k}: f∘f ≠ f exactly"))?;
    }
    let f = builtin("builtin:hw_simple?k=4");
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = random_simplex(&mut rng, 4);
        worst = worst.max(sup_gap(
            &iterate_map(&f, &x, 2).unwrap(),
            &iterate_map(&f, &x, 1).unwrap(),
        ));
    }
    ensure(worst <= 1e-12, format!("k = 4 sampled gap {worst:e}"))?;
    Ok(format!("exact for k = 2, 3; k = 4 gap {worst:.1e}"))
}

fn allele_conservation() -> Outcome {
    for k in [2usize, 3] {
        let f = builtin(&format!("builtin:hw_simple?k={k}"));
        let vars: Vec<String> = f.vars().iter().cloned().collect();
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let pairs = hardy_weinberg::pairs(k);
        for allele in 1..k {
            // p_i = x_ii + (1/2) Σ_{j≠i} x_ij
            let terms: Vec<String> = pairs
                .iter()
                .zip(&vars)
                .filter(|((i, j), _)| *i == allele || *j == allele)
                .map(|((i, j), v)| if i == j { v.clone() } else { format!("{v}/2") })
                .collect();
            let p = Expression::parse(&terms.join(" + "), &names).map_err(|e| e.to_string())?;
            let moved = p.compose(f.components()).map_err(|e| e.to_string())?;
            ensure(
                poly_canonical(&moved).unwrap() == poly_canonical(&p).unwrap(),
                format!("k = {k}: p_{allele} changes"),
            )?;
        }
        let dim = vars.len();
        let x: Vec<BigRational> = (0..dim).map(|s| q(1, (dim + 2 + s) as i64)).collect();
        ensure(
            hardy_weinberg::allele_frequencies_exact(k, &x)
                == hardy_weinberg::allele_frequencies_exact(k, &f.apply_exact(&x).unwrap()),
            format!("k = {k}: pointwise check"),
        )?;
    }
    Ok("p_i ∘ f = p_i as polynomials for k = 2, 3".into())
}

fn sexed_model() -> Outcome {
    let f = builtin("builtin:hw_sexed?k=2");
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut x = random_simplex(&mut rng, 2);
        x.extend(random_simplex(&mut rng, 2));
        worst = worst.max(sup_gap(
            &iterate_map(&f, &x, 3).unwrap(),
            &iterate_map(&f, &x, 2).unwrap(),
        ));
    }
    ensure(worst <= 1e-12, format!("f³ vs f² gap {worst:e}"))?;

    let x = [q(1, 2), q(1, 2), q(1, 3), q(2, 3)];
    let once = f.apply_exact(&x).unwrap();
    let twice = f.apply_exact(&once).unwrap();
    ensure(
        once == [q(1, 2), q(5, 12), q(1, 2), q(5, 12)],
        "f(x) differs from (1/2, 5/12)",
    )?;
    ensure(
        twice == [q(289, 576), q(238, 576), q(289, 576), q(238, 576)],
        "f²(x) differs from (289/576, 238/576)",
    )?;
    let xf = [0.5, 0.5, 1.0 / 3.0, 2.0 / 3.0];
    let gap = sup_gap(
        &iterate_map(&f, &xf, 2).unwrap(),
        &iterate_map(&f, &xf, 1).unwrap(),
    );
    ensure(
        (gap - 2.0 / 576.0).abs() <= 1e-12,
        format!("‖f² − f‖ = {gap}"),
    )?;
    Ok(format!(
        "f³ = f² gap {worst:.1e}; ‖f² − f‖∞ = {gap:.12} ≈ 2/576"
    ))
}

fn hw_conjugacies() -> Outcome {
    for k in [2, 3] {
        let r = hw_conjugacy(
            k,
            HwVariant::Simple,
            &Sampling::default(),
            Some(Mode::Exact),
        )
        .map_err(|e| e.to_string())?;
        ensure(
            r.verified && r.mode == Mode::Exact,
            format!("simple k = {k}: {r:?}"),
        )?;
    }
    let (f, phi, g) = hw_conjugacy_maps(2, HwVariant::Sexed).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut x = random_simplex(&mut rng, 2);
        x.extend(random_simplex(&mut rng, 2));
        worst = worst.max(pointwise_residual(&phi, &f, &g, &x).map_err(|e| e.to_string())?);
    }
    let at_point = pointwise_residual(&phi, &f, &g, &[0.5, 0.5, 1.0 / 3.0, 2.0 / 3.0]).unwrap();
    ensure(
        worst <= 1e-12 && at_point <= 1e-12,
        format!("sexed residual {worst:e}"),
    )?;
    Ok(format!(
        "simple exact for k = 2, 3; sexed residual {worst:.1e} on 1000 points"
    ))
}

fn image_chain_smooth() -> Outcome {
    let f = builtin("builtin:f_lambda_smooth?bits=1");
    let chain = image_chain(&f, &Interval1::closed(-10.0, 10.0).unwrap(), 2, 4001)
        .map_err(|e| e.to_string())?;
    let steps = chain.intervals();
    ensure(
        steps[1].approx_eq(&Interval1::closed(-1.0, 0.0).unwrap(), 1e-6),
        format!("f(I) = {}", steps[1]),
    )?;
    ensure(
        steps[2].approx_eq(&Interval1::point(0.0), 1e-6),
        format!("f²(I) = {}", steps[2]),
    )?;
    Ok(format!("f(I) = {}, f²(I) = {}", steps[1], steps[2]))
}

fn eventually_periodic() -> Outcome {
    let f = builtin("builtin:exp_collapse");
    let r = detect_minimal_pair(&f, 4, &Sampling::default(), None).map_err(|e| e.to_string())?;
    ensure(r.pair == Some((3, 2)), format!("detected {:?}", r.pair))?;
    let refute = r
        .refuted
        .iter()
        .find(|x| (x.n, x.k) == (2, 1))
        .ok_or("(2,1) not refuted")?;
    ensure(
        refute.deviation >= 0.3,
        format!("(2,1) deviation {}", refute.deviation),
    )?;
    Ok(format!(
        "(3,2); (2,1) refuted with deviation {:.3}",
        refute.deviation
    ))
}

fn normal_forms() -> Outcome {
    let opts = cube_sampling(2, -2.0, 2.0, 1024);
    let mut worst = 0.0f64;
    for (comps, sign) in [
        (["x + y*x^2", "0"], 1),
        (["x + y^3", "0"], 1),
        (["-x + x*y", "0"], -1),
    ] {
        let f = map(&["x", "y"], &comps);
        let nf = normal_form_residual(&f, &opts).map_err(|e| e.to_string())?;
        let residual = nf.residual.unwrap_or(f64::INFINITY);
        ensure(
            nf.passes && nf.sign == Some(sign) && residual <= 1e-10,
            format!("{}: {nf:?}", comps[0]),
        )?;
        let ex = extract_gfrak(&f, &opts).map_err(|e| e.to_string())?;
        let gap = ex.quadrature_vs_exact.ok_or("no exact 𝔤")?;
        ensure(
            gap <= 1e-10,
            format!("{}: quadrature gap {gap:e}", comps[0]),
        )?;
        worst = worst.max(residual).max(gap);
    }
    Ok(format!("three fixtures pass, worst residual {worst:.1e}"))
}

fn projection() -> Outcome {
    let f = map(&["x", "y"], &["x*(1 + y^2)", "0"]);
    let r =
        projection_conjugacy(&f, &cube_sampling(2, -3.0, 3.0, 4096)).map_err(|e| e.to_string())?;
    let min = r
        .hypotheses
        .iter()
        .find(|h| h.check == "min |dg/dx|")
        .ok_or("no derivative hypothesis")?
        .value;
    ensure(
        r.verified && r.residual <= 1e-12 && min >= 1.0,
        format!("{r:?}"),
    )?;
    let g = map(&["x", "y"], &["x + y*x^2", "0"]);
    match projection_conjugacy(&g, &cube_sampling(2, -3.0, 3.0, 4096)) {
        Err(LinearizeError::Hypothesis {
            witness: Some(w), ..
        }) => {
            let d = (1.0 + 2.0 * w[0] * w[1]).abs();
            ensure(d <= 1e-6, format!("witness {w:?} has |1+2xy| = {d:e}"))?;
            Ok(format!(
                "residual {:.1e}, min |∂g/∂x| = {min}; x+yx² witness |1+2xy| = {d:.1e}",
                r.residual
            ))
        }
        other => Err(format!("x+yx² not rejected: {other:?}")),
    }
}

fn obstructions() -> Outcome {
    let f = map(&["x", "y"], &["x + y*x^2", "0"]);
    let grid = GridWindow::cube(2, -3.0, 3.0, 600).unwrap();
    let plane =
        preimage_components(&f, &[0.0, 0.0], &grid, DEFAULT_MARK_TOL).map_err(|e| e.to_string())?;
    ensure(
        plane.count == 3 && plane.stable,
        format!("x+yx²: {} components, stable {}", plane.count, plane.stable),
    )?;

    let sexed = builtin("builtin:hw_sexed?k=2");
    let grid = GridWindow::cube(4, -1.0, 2.0, 60).unwrap();
    let target = [3.0 / 16.0, 5.0 / 8.0, 3.0 / 16.0, 5.0 / 8.0];
    let four =
        preimage_components(&sexed, &target, &grid, DEFAULT_MARK_TOL).map_err(|e| e.to_string())?;
    ensure(
        four.count == 2,
        format!("sexed preimage: {} components", four.count),
    )?;

    let p1 = builtin("builtin:poly_family?i=1").components()[0].clone();
    let at_crossing =
        local_branch_count(&p1, &[0.0, 1.0], 0.1, 64, 1e-9).map_err(|e| e.to_string())?;
    let regular = local_branch_count(&p1, &[0.0, 2.0], 0.1, 64, 1e-9).map_err(|e| e.to_string())?;
    ensure(
        at_crossing == 2 && regular == 1,
        format!("branches {at_crossing}, {regular}"),
    )?;

    let g = f.components()[0].clone();
    let scan = gradient_vanish_scan(&g, &GridWindow::cube(2, -5.0, 5.0, 100).unwrap(), 1e-6)
        .map_err(|e| e.to_string())?;
    ensure(
        scan.cells.is_empty(),
        format!("x+yx² has {} critical cells", scan.cells.len()),
    )?;
    Ok(format!(
        "3 stable components at 600², {} at 60⁴, branches 2/1, no critical cells",
        four.count
    ))
}

fn linear_solutions() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    for case in 0..200 {
        let blocks: Vec<JordanBlock> = (0..rng.gen_range(1..=3))
            .map(|_| match rng.gen_range(0..4) {
                0 => JordanBlock::One,
                1 => JordanBlock::MinusOne,
                2 => {
                    let den = rng.gen_range(1..=6);
                    JordanBlock::Rotation {
                        num: rng.gen_range(0..den),
                        den,
                    }
                }
                _ => JordanBlock::Nilpotent(rng.gen_range(1..=4)),
            })
            .collect();
        let n = rng.gen_range(2..=8);
        let k = rng.gen_range(0..n);
        let f = builtin_map(&BuiltinParams::Jordan {
            blocks: blocks.clone(),
        })
        .unwrap();
        let r = linear_solution_check(&f, n, k).map_err(|e| e.to_string())?;
        ensure(
            r.agree,
            format!("case {case}: {blocks:?} ({n},{k}) disagree"),
        )?;
    }
    let rot = builtin("builtin:jordan?blocks=R1/3");
    ensure(
        linear_solution_check(&rot, 4, 1).unwrap().satisfies,
        "R(2π/3) fails (4,1)",
    )?;
    let nil = builtin("builtin:jordan?blocks=N2");
    ensure(
        !linear_solution_check(&nil, 2, 1).unwrap().satisfies,
        "N2 satisfies (2,1)",
    )?;
    ensure(
        linear_solution_check(&nil, 3, 2).unwrap().satisfies,
        "N2 fails (3,2)",
    )?;
    Ok("200 assemblies agree; R(2π/3) ⊨ (4,1); N2 ⊭ (2,1), N2 ⊨ (3,2)".into())
}

fn elementary_identities() -> Outcome {
    let fixtures = [
        "builtin:exp_collapse",
        "builtin:hw_simple?k=2",
        "builtin:hw_sexed?k=2",
        "builtin:rot_refl?angle=1/3",
        "builtin:rot_refl?reflect=1",
        "builtin:jordan?blocks=N2,-1",
        "builtin:f_lambda_cont?bits=101",
        "builtin:f_lambda_smooth?bits=1",
    ];
    let opts = Sampling::default().with_samples(1024);
    for name in fixtures {
        let f = builtin(name);
        let (n, k) = detect_minimal_pair(&f, 6, &opts, None)
            .map_err(|e| e.to_string())?
            .pair
            .ok_or(format!("{name}: no pair"))?;
        for row in corollary_identities(&f, n, k, 2, &opts, None).map_err(|e| e.to_string())? {
            ensure(
                row.result.equal,
                format!("{name}: l1 = {}, l2 = {} fails", row.l1, row.l2),
            )?;
        }
        let h = idempotent_power(&f, n, k, &opts, None).map_err(|e| e.to_string())?;
        ensure(
            h.verified(),
            format!("{name}: h = f^{} not idempotent", h.exponent),
        )?;
    }
    Ok(format!(
        "{} fixtures, l1, l2 in 0..=2, h∘h = h",
        fixtures.len()
    ))
}

fn parity_reduction() -> Outcome {
    let cases: [(MapSpec, f64, f64, usize, usize, bool); 6] = [
        (
            map(&["x"], &["piece(x <= 0 : -x ; else : x)"]),
            -5.0,
            5.0,
            2,
            1,
            true,
        ),
        (map(&["x"], &["1 - x"]), -4.0, 5.0, 3, 1, true),
        (map(&["x"], &["x^2"]), 0.0, 0.5, 2, 1, false),
        (
            builtin("builtin:f_lambda_cont?bits=101"),
            f64::NAN,
            f64::NAN,
            2,
            1,
            true,
        ),
        (
            builtin("builtin:f_lambda_smooth?bits=1"),
            -10.0,
            10.0,
            3,
            2,
            true,
        ),
        (
            map(&["x"], &["piece(x <= 0 : 0 ; else : -exp(-1/x))"]),
            -5.0,
            5.0,
            3,
            2,
            true,
        ),
    ];
    let mut labels = Vec::new();
    for (f, lo, hi, n, k, expect) in cases {
        let [lo, hi] = if lo.is_nan() {
            f.window().unwrap().axes()[0]
        } else {
            [lo, hi]
        };
        let r = verify_1d_equation(&f, &Interval1::closed(lo, hi).unwrap(), n, k, 2001, 1e-9)
            .map_err(|e| e.to_string())?;
        ensure(
            r.verified == expect,
            format!("{f} ({n},{k}): verified {}", r.verified),
        )?;
        if !expect {
            ensure(
                r.deviation >= 3.0 / 16.0,
                format!("x² deviation {}", r.deviation),
            )?;
        }
        // the reduced identity agrees with the direct check
        let direct = check_pair(
            &f,
            k + r.reduction.step(),
            k,
            &Sampling::default()
                .with_window(babbage::sampling::Window::new(vec![[lo, hi]]).unwrap()),
            None,
        )
        .map_err(|e| e.to_string())?;
        ensure(
            direct.pair.is_some() == expect,
            format!("{f}: direct check disagrees"),
        )?;
        labels.push(format!("{:?}", r.restriction));
    }
    ensure(
        labels[1] == format!("{:?}", RestrictionLabel::Involution),
        "1−x restriction",
    )?;
    Ok(format!("restrictions {}", labels.join(", ")))
}

fn involution_linearization() -> Outcome {
    for (text, lo, hi) in [("1 - x", -4.0, 5.0), ("-x", -5.0, 5.0)] {
        let f = map(&["x"], &[text]);
        let r =
            involution_conjugacy(&f, &cube_sampling(1, lo, hi, 1024)).map_err(|e| e.to_string())?;
        ensure(
            r.verified && r.mode == Mode::Exact && r.residual == 0.0,
            format!("{text}: {r:?}"),
        )?;
    }
    Ok("1 − x and −x conjugate to −Id exactly".into())
}

fn affine_classification() -> Outcome {
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let r = affine_complex_classify(i, zero, 5, 1).map_err(|e| e.to_string())?;
    match r.class {
        AffineClass::Rotation { angle, center }
            if (angle - FRAC_PI_2).abs() <= 1e-12 && center == [0.0, 0.0] && r.satisfies => {}
        other => return Err(format!("a = i: {other:?}")),
    }
    let r = affine_complex_classify(Complex64::new(1.0, 0.0), Complex64::new(2.0, -1.0), 5, 1)
        .map_err(|e| e.to_string())?;
    ensure(
        r.class == AffineClass::TranslationNoSolution && !r.satisfies,
        format!("a = 1: {r:?}"),
    )?;
    let b = Complex64::new(0.5, 3.0);
    let r = affine_complex_classify(zero, b, 2, 1).map_err(|e| e.to_string())?;
    ensure(
        r.class == (AffineClass::Constant { value: [0.5, 3.0] }) && r.satisfies,
        format!("a = 0: {r:?}"),
    )?;
    Ok("rotation π/2 about 0; translation has no solution; constant satisfies (2,1)".into())
}

/// Report bytes with the wall-clock line removed.
fn payload(args: &[&str]) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_babbage"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"duration_ms\""))
        .collect();
    Ok((out.status.code(), kept.join("\n").into_bytes()))
}

fn determinism() -> Outcome {
    let fixture = |name: &str| format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let (exp, hyper, refl, proj, smooth) = (
        fixture("exp_collapse.spec"),
        fixture("hyperbola_axis.spec"),
        fixture("reflection.spec"),
        fixture("projection.spec"),
        fixture("smooth_retraction.spec"),
    );
    let runs: Vec<Vec<&str>> = vec![
        vec!["check", "--map", &exp, "--detect", "--nmax", "4"],
        vec!["check", "--map", &exp, "--n", "2", "--k", "1"],
        vec!["image-chain", "--map", &smooth, "--k", "2"],
        vec!["linearize", "involution", "--map", &refl],
        vec!["linearize", "projection", "--map", &proj],
        vec!["linearize", "normal-form", "--map", &hyper],
        vec!["linearize", "hw", "--k", "4"],
        vec![
            "obstruct",
            "components",
            "--map",
            &hyper,
            "--target",
            "0,0",
            "--cells",
            "300",
        ],
        vec![
            "obstruct",
            "gradzero",
            "--expr",
            "x*(1 - y)",
            "--window",
            "-3:3",
        ],
        vec![
            "obstruct",
            "branches",
            "--expr",
            "x*(1 - y)",
            "--point",
            "0,1",
        ],
    ];
    for args in &runs {
        let first = payload(args)?;
        ensure(
            first.0.is_some_and(|c| c <= 1),
            format!("{args:?}: exit {:?}", first.0),
        )?;
        ensure(first == payload(args)?, format!("{args:?}: reports differ"))?;
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 15] = [
        ("Hardy-Weinberg idempotence", hardy_weinberg_idempotence),
        ("allele conservation", allele_conservation),
        ("two-sex model", sexed_model),
        ("Hardy-Weinberg conjugacies", hw_conjugacies),
        ("image chain", image_chain_smooth),
        ("eventually periodic detection", eventually_periodic),
        ("plane normal forms", normal_forms),
        ("projection conjugacy", projection),
        ("obstructions", obstructions),
        ("linear solutions", linear_solutions),
        ("elementary identities", elementary_identities),
        ("1D parity reduction", parity_reduction),
        ("involution linearization", involution_linearization),
        ("complex affine classification", affine_classification),
        ("CLI determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        match check() {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
            Err(why) => {
                println!("FAIL criterion {n}: {name}: {why}");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria pass", criteria.len());
}
