//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always visible.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use simplexforge::bloch::{build_basis, from_bloch, structure_tensor, to_bloch, BlochVector};
use simplexforge::knaster::{
    circle_profile, continuity_coefficients, knaster_s1, last_vertex, scan_f0, OptContext,
    OptimizerConfig, ScanSchedule,
};
use simplexforge::linalg::{hermitian_eigenvalues, identity_c, trace_product};
use simplexforge::random::{haar_orthogonal, random_hermitian, rng_from_seed};
use simplexforge::simplex::{reduced_vertices, regular_simplex, stabilizer_rotation};
use simplexforge::tracepoly::{f_cubic, grad_f_cubic, grad_trace_power, purity_defect};
use simplexforge::weyl::{seed_sic, verify_sic};
use simplexforge::{CMatrix, RMatrix, RVector, C64};

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("took {:.3?}, limit {:.3?}", elapsed, limit)
    })
}

// --- oracles -------------------------------------------------------------

fn cmax(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Tr(A^m)` by plain repeated multiplication.
fn tr_pow(a: &CMatrix, m: usize) -> C64 {
    let mut p = a.clone();
    for _ in 1..m {
        p = &p * a;
    }
    p.trace()
}

/// The printed cubic polynomial of the qutrit Bloch body, `r[0]` = `r_1`.
fn printed_qutrit_cubic(r: &[f64]) -> f64 {
    let s3 = 3f64.sqrt();
    let (r1, r2, r3, r4, r5, r6, r7, r8) = (r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7]);
    2.0 * s3 * r1 * r1 * r8 + 6.0 * r1 * r2 * r3 + 6.0 * r1 * r5 * r6 + 3.0 * r2 * r2 * r7
        - s3 * r2 * r2 * r8
        - 6.0 * r2 * r4 * r6
        - 3.0 * r3 * r3 * r7
        - s3 * r3 * r3 * r8
        + 6.0 * r3 * r4 * r5
        + 2.0 * s3 * r4 * r4 * r8
        + 3.0 * r5 * r5 * r7
        - s3 * r5 * r5 * r8
        - 3.0 * r6 * r6 * r7
        - s3 * r6 * r6 * r8
        + 2.0 * s3 * r7 * r7 * r8
        - 2.0 * r8 * r8 * r8 / s3
}

fn central_difference(f: impl Fn(&RVector) -> f64, v: &RVector, h: f64) -> RVector {
    RVector::from_fn(v.len(), |j, _| {
        let mut p = v.clone();
        let mut m = v.clone();
        p[j] += h;
        m[j] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    })
}

// --- criteria ------------------------------------------------------------

fn simplex_fixtures() -> Outcome {
    let t = Instant::now();
    let s2 = regular_simplex(2).map_err(|e| e.to_string())?;
    let s3 = regular_simplex(3).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let r3 = 3f64.sqrt();
    let want2 = [[r3 / 2.0, 0.5], [-r3 / 2.0, 0.5], [0.0, -1.0]];
    let (a, b, c) = (6f64.sqrt() / 3.0, 2f64.sqrt() / 3.0, 8f64.sqrt() / 3.0);
    let want3 = [
        [a, b, 1.0 / 3.0],
        [-a, b, 1.0 / 3.0],
        [0.0, -c, 1.0 / 3.0],
        [0.0, 0.0, -1.0],
    ];
    let mut dev = 0.0f64;
    for (v, w) in s2.vertices().iter().zip(&want2) {
        dev = dev.max((v - RVector::from_row_slice(w)).amax());
    }
    for (v, w) in s3.vertices().iter().zip(&want3) {
        dev = dev.max((v - RVector::from_row_slice(w)).amax());
    }
    check(s2.len() == 3 && s3.len() == 4, || "wrong vertex count".into())?;
    check(dev <= 1e-12, || format!("coordinate deviation {dev:.3e}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("max deviation {dev:.1e}, {elapsed:.1?}"))
}

fn basis_laws() -> Outcome {
    let t = Instant::now();
    let mut rng = rng_from_seed(11);
    let (mut ortho, mut complete) = (0.0f64, 0.0f64);
    for n in 2..=6 {
        let basis = build_basis(n).map_err(|e| e.to_string())?;
        check(basis.len() == n * n - 1, || format!("n={n}: {} matrices", basis.len()))?;
        for (j, a) in basis.matrices().iter().enumerate() {
            for (k, b) in basis.matrices().iter().enumerate() {
                let want = if j == k { 2.0 } else { 0.0 };
                let g = (a.matrix() * b.matrix()).trace();
                ortho = ortho.max((g - C64::new(want, 0.0)).norm());
            }
        }
        for _ in 0..20 {
            let mut h = random_hermitian(n, &mut rng);
            let shift = h.trace() / C64::new(n as f64, 0.0);
            h -= identity_c(n) * shift;
            let mut rebuilt = CMatrix::zeros(n, n);
            for l in basis.matrices() {
                let c = 0.5 * (&h * l.matrix()).trace().re;
                rebuilt += l.matrix() * C64::new(c, 0.0);
            }
            complete = complete.max(cmax(&(rebuilt - &h)));
        }
    }
    let elapsed = t.elapsed();
    check(ortho <= 1e-12, || format!("orthogonality deviation {ortho:.3e}"))?;
    check(complete <= 1e-12, || format!("completeness deviation {complete:.3e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "orthogonality {ortho:.1e}, completeness {complete:.1e}, {elapsed:.1?}"
    ))
}

fn cubic_form_oracle() -> Outcome {
    let t = Instant::now();
    let basis = build_basis(3).map_err(|e| e.to_string())?;
    let tensor = structure_tensor(&basis);
    let mut rng = rng_from_seed(5);
    let mut dev = 0.0f64;
    for _ in 0..1000 {
        let coords = RVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
        let v = BlochVector::new(3, coords.clone()).map_err(|e| e.to_string())?;
        let got = f_cubic(&v, &tensor).map_err(|e| e.to_string())?;
        dev = dev.max((got - printed_qutrit_cubic(coords.as_slice())).abs());
    }
    let elapsed = t.elapsed();
    check(dev <= 1e-12, || format!("max deviation {dev:.3e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("max deviation {dev:.1e} over 1000 vectors, {elapsed:.1?}"))
}

fn sic_seed() -> Outcome {
    let t = Instant::now();
    let sic = seed_sic(3).map_err(|e| e.to_string())?;
    let verdict = verify_sic(&sic, 1e-12);
    let basis = build_basis(3).map_err(|e| e.to_string())?;
    let tensor = structure_tensor(&basis);
    let mut overlap = 0.0f64;
    for j in 0..9 {
        for k in 0..9 {
            if j != k {
                let v = trace_product(&sic.projectors[j], &sic.projectors[k]);
                overlap = overlap.max((v - C64::new(0.25, 0.0)).norm());
            }
        }
    }
    let (mut radius, mut cubic) = (0.0f64, 0.0f64);
    for p in &sic.projectors {
        let v = to_bloch(p, &basis).map_err(|e| e.to_string())?;
        radius = radius.max((v.norm() - (1.0f64 / 3.0).sqrt()).abs());
        cubic = cubic.max((f_cubic(&v, &tensor).map_err(|e| e.to_string())? - 2.0 / 9.0).abs());
    }
    let mut triple = C64::new(0.0, 0.0);
    for r in &sic.projectors {
        for s in &sic.projectors {
            for u in &sic.projectors {
                triple += (r.matrix() * s.matrix() * u.matrix()).trace();
            }
        }
    }
    let elapsed = t.elapsed();
    check(verdict.ok, || format!("verify_sic failed: {verdict:?}"))?;
    check(overlap <= 1e-12, || format!("overlap deviation {overlap:.3e}"))?;
    check(radius <= 1e-12, || format!("radius deviation {radius:.3e}"))?;
    check(cubic <= 1e-10, || format!("cubic deviation {cubic:.3e}"))?;
    check((triple - C64::new(81.0, 0.0)).norm() <= 1e-8, || {
        format!("triple sum {triple}")
    })?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "overlap {overlap:.1e}, radius {radius:.1e}, cubic {cubic:.1e}, triple sum {:.12}, {elapsed:.1?}",
        triple.re
    ))
}

fn qutrit_family_scan() -> Outcome {
    let ctx = OptContext::new(3).map_err(|e| e.to_string())?;
    let start = ctx.default_start(0).map_err(|e| e.to_string())?;
    let cfg = OptimizerConfig::default();
    let f = 2.0 / 9.0;
    let entries = scan_f0(-f, f, 101, &cfg, &start, &ctx, ScanSchedule::Sequential, |_| {})
        .map_err(|e| e.to_string())?;
    check(entries.len() == 101, || format!("{} entries", entries.len()))?;
    let mut good = 0;
    let mut worst_spectra = 0.0f64;
    let mut slowest = Duration::ZERO;
    for e in &entries {
        slowest = slowest.max(Duration::from_secs_f64(e.result.wall_time));
        // independent residual from the element matrices
        let resid: f64 = e
            .result
            .matrices
            .iter()
            .map(|m| {
                let shifted = m.matrix() - identity_c(3) * C64::new(1.0 / 3.0, 0.0);
                (tr_pow(&shifted, 3).re - e.f0).powi(2)
            })
            .sum();
        if !(e.result.converged && resid <= 1e-16) {
            continue;
        }
        good += 1;
        let spectra: Vec<Vec<f64>> = e
            .result
            .matrices
            .iter()
            .map(|m| hermitian_eigenvalues(m.matrix()))
            .collect();
        for s in &spectra {
            for (x, y) in s.iter().zip(&spectra[0]) {
                worst_spectra = worst_spectra.max((x - y).abs());
            }
        }
    }
    check(good >= 99, || format!("only {good}/101 converged"))?;
    check(worst_spectra <= 1e-8, || {
        format!("spectra disagree by {worst_spectra:.3e}")
    })?;
    within(slowest, Duration::from_secs(10))?;
    Ok(format!(
        "{good}/101 converged, spectra spread {worst_spectra:.1e}, slowest run {slowest:.1?}"
    ))
}

fn ququart_families() -> Outcome {
    let ctx = OptContext::new(4).map_err(|e| e.to_string())?;
    let start = ctx.default_start(0).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for (power, lo, hi) in [(3usize, -0.3, 0.3), (4usize, 0.35, 0.95)] {
        let cfg = OptimizerConfig {
            power,
            tol_residual: 1e-14,
            ..OptimizerConfig::default()
        };
        let entries = scan_f0(lo, hi, 13, &cfg, &start, &ctx, ScanSchedule::Sequential, |_| {})
            .map_err(|e| e.to_string())?;
        let mut good = 0;
        let mut slowest = Duration::ZERO;
        for e in &entries {
            slowest = slowest.max(Duration::from_secs_f64(e.result.wall_time));
            let resid: f64 = e
                .result
                .matrices
                .iter()
                .map(|m| {
                    let g = if power == 3 {
                        let shifted = m.matrix() - identity_c(4) * C64::new(0.25, 0.0);
                        tr_pow(&shifted, 3).re
                    } else {
                        tr_pow(m.matrix(), power).re
                    };
                    (g - e.f0).powi(2)
                })
                .sum();
            if e.result.converged && e.result.matrices.len() == 16 && resid <= 1e-14 {
                good += 1;
            }
        }
        check(good >= 10, || format!("m={power}: only {good} targets converged"))?;
        within(slowest, Duration::from_secs(60))?;
        summary.push(format!("m={power}: {good}/13 (slowest {slowest:.1?})"));
    }
    Ok(summary.join(", "))
}

fn continuity_circle() -> Outcome {
    let t = Instant::now();
    let sic = seed_sic(3).map_err(|e| e.to_string())?;
    let p = &sic.projectors;
    let (mut fit, mut at_zero, mut closed, mut critical, mut generic) =
        (0.0f64, 0.0f64, 0.0f64, 0usize, 0usize);
    for a in 0..9 {
        for b in a + 1..9 {
            for c in b + 1..9 {
                let prof = circle_profile(&p[a], &p[b], &p[c], 90).map_err(|e| e.to_string())?;
                // the phase of the triple product, computed here directly
                let triple = (p[a].matrix() * p[b].matrix() * p[c].matrix()).trace();
                let alpha = triple.arg().cos();
                let (want_a, want_b) = continuity_coefficients(3, alpha);
                fit = fit.max(prof.fit_residual);
                at_zero = at_zero.max((prof.trace_values[0] - 1.0).abs());
                closed = closed
                    .max((prof.fitted_constant - want_a).abs())
                    .max((prof.fitted_cos3_coefficient - want_b).abs());
                let vanishes = prof.fitted_cos3_coefficient.abs() <= 1e-9;
                let is_critical = (alpha + 1.0).abs() <= 1e-9;
                check(vanishes == is_critical, || {
                    format!("triple ({a},{b},{c}): alpha {alpha}, B {}", prof.fitted_cos3_coefficient)
                })?;
                if is_critical {
                    critical += 1;
                } else {
                    generic += 1;
                }
            }
        }
    }
    let elapsed = t.elapsed();
    check(fit <= 1e-9, || format!("fit residual {fit:.3e}"))?;
    check(at_zero <= 1e-10, || format!("theta=0 deviation {at_zero:.3e}"))?;
    check(closed <= 1e-9, || format!("closed-form deviation {closed:.3e}"))?;
    check(critical > 0 && generic > 0, || "both triple classes must occur".into())?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "{critical} triples with alpha=-1, {generic} others; fit {fit:.1e}, closed form {closed:.1e}, {elapsed:.1?}"
    ))
}

fn gradient_suite() -> Outcome {
    let mut rng = rng_from_seed(17);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for n in [3usize, 4] {
        let basis = build_basis(n).map_err(|e| e.to_string())?;
        let tensor = structure_tensor(&basis);
        let dim = n * n - 1;
        let tr_m = |coords: &RVector, m: usize| {
            let v = BlochVector::new(n, coords.clone()).expect("length");
            tr_pow(from_bloch(&v, &basis).expect("dims").matrix(), m).re
        };
        for _ in 0..100 {
            let coords = RVector::from_fn(dim, |_, _| rng.random_range(-0.5..0.5));
            let v = BlochVector::new(n, coords.clone()).map_err(|e| e.to_string())?;
            let cubic_fd = central_difference(
                |c| {
                    let shifted = from_bloch(&BlochVector::new(n, c.clone()).expect("length"), &basis)
                        .expect("dims")
                        .matrix()
                        - identity_c(n) * C64::new(1.0 / n as f64, 0.0);
                    tr_pow(&shifted, 3).re
                },
                &coords,
                h,
            );
            let cubic = grad_f_cubic(&v, &tensor).map_err(|e| e.to_string())?.coords;
            worst = worst.max((&cubic - &cubic_fd).norm() / cubic.norm().max(1e-300));
            for m in [3usize, 4] {
                let fd = central_difference(|c| tr_m(c, m), &coords, h);
                let g = grad_trace_power(&v, m, &basis).map_err(|e| e.to_string())?.coords;
                worst = worst.max((&g - &fd).norm() / g.norm().max(1e-300));
            }
        }
    }
    check(worst <= 1e-6, || format!("relative error {worst:.3e}"))?;
    Ok(format!("max relative error {worst:.1e} over 400 points x 3 gradients"))
}

fn knaster_circle_demo() -> Outcome {
    let t = Instant::now();
    let f = |x: f64, y: f64| 3.0 * x * x * y - y * y * y;
    let sol = knaster_s1(f, 3, 1e-12).map_err(|e| e.to_string())?;
    let mut sweep = 0.0f64;
    for k in 0..360 {
        let th = 2.0 * PI * k as f64 / 360.0;
        let vals: Vec<f64> = (0..3)
            .map(|j| {
                let a = th + 2.0 * PI * j as f64 / 3.0;
                f(a.cos(), a.sin())
            })
            .collect();
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        sweep = sweep.max(hi - lo);
    }
    let elapsed = t.elapsed();
    let sep_ok = sol.angles.windows(2).all(|w| {
        ((w[1] - w[0]).rem_euclid(2.0 * PI) - 2.0 * PI / 3.0).abs() < 1e-12
    });
    check(sol.angles.len() == 3 && sep_ok, || format!("not equilateral: {:?}", sol.angles))?;
    check(sol.spread <= 1e-12, || format!("spread {:.3e}", sol.spread))?;
    check(sweep <= 1e-12, || format!("sweep spread {sweep:.3e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "spread {:.1e}, 360-point sweep spread {sweep:.1e}, {elapsed:.1?}",
        sol.spread
    ))
}

fn stabilizers_and_reductions() -> Outcome {
    let t = Instant::now();
    let big_n = 8;
    let s = regular_simplex(big_n).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(23);
    let mut fixed = 0.0f64;
    for k in 1..big_n {
        let m = big_n - k;
        for _ in 0..5 {
            let mut small: RMatrix = haar_orthogonal(m, &mut rng);
            if small.determinant() < 0.0 {
                small.column_mut(0).neg_mut();
            }
            let u = stabilizer_rotation(&s, k, &small).map_err(|e| e.to_string())?;
            for j in 0..k {
                fixed = fixed.max((&u * s.vertex(j) - s.vertex(j)).amax());
            }
        }
    }
    let mut reduction = 0.0f64;
    for i in 1..=big_n {
        let imgs = reduced_vertices(&s, i).map_err(|e| e.to_string())?;
        let want = -1.0 / (big_n - i + 1) as f64;
        check(imgs.len() == big_n + 2 - i, || format!("level {i}: {} images", imgs.len()))?;
        for (a, x) in imgs.iter().enumerate() {
            check(x.len() == big_n - i + 1, || format!("level {i}: wrong ambient dim"))?;
            reduction = reduction.max((x.norm() - 1.0).abs());
            for y in &imgs[a + 1..] {
                reduction = reduction.max((x.dot(y) - want).abs());
            }
        }
    }
    let elapsed = t.elapsed();
    check(fixed <= 1e-12, || format!("fixed-vertex drift {fixed:.3e}"))?;
    check(reduction <= 1e-10, || format!("reduction deviation {reduction:.3e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "fixed vertices {fixed:.1e}, reductions {reduction:.1e}, {elapsed:.1?}"
    ))
}

fn last_vertex_closure() -> Outcome {
    let ctx = OptContext::new(3).map_err(|e| e.to_string())?;
    let start = ctx.default_start(0).map_err(|e| e.to_string())?;
    let cfg = OptimizerConfig::default();
    let entries = scan_f0(-0.2, 0.2, 9, &cfg, &start, &ctx, ScanSchedule::Sequential, |_| {})
        .map_err(|e| e.to_string())?;
    let (mut closure, mut purity, mut runs) = (0.0f64, 0.0f64, 0);
    for e in entries.iter().filter(|e| e.result.converged) {
        runs += 1;
        let m = &e.result.matrices;
        let rebuilt = last_vertex(&m[..8]).map_err(|e| e.to_string())?;
        let mut direct = identity_c(3) * C64::new(3.0, 0.0);
        for x in &m[..8] {
            direct -= x.matrix();
        }
        closure = closure
            .max(cmax(&(rebuilt.matrix() - m[8].matrix())))
            .max(cmax(&(&direct - m[8].matrix())));
        let a = purity_defect(rebuilt.matrix()).map_err(|e| e.to_string())?;
        let b = purity_defect(m[8].matrix()).map_err(|e| e.to_string())?;
        purity = purity.max((a - b).abs());
    }
    check(runs >= 8, || format!("only {runs} converged runs"))?;
    check(closure <= 1e-10, || format!("closure defect {closure:.3e}"))?;
    check(purity <= 1e-10, || format!("purity defect mismatch {purity:.3e}"))?;
    Ok(format!(
        "{runs} runs, closure {closure:.1e}, purity defect agreement {purity:.1e}"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("simplex fixtures", simplex_fixtures),
        ("basis laws", basis_laws),
        ("cubic-form oracle", cubic_form_oracle),
        ("qutrit SIC seed", sic_seed),
        ("d=3 generalized family scan", qutrit_family_scan),
        ("d=4 trace-power families", ququart_families),
        ("continuity circle", continuity_circle),
        ("gradient suite", gradient_suite),
        ("Knaster S1 demo", knaster_circle_demo),
        ("stabilizers and reductions", stabilizers_and_reductions),
        ("last-vertex closure", last_vertex_closure),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
