//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always print.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use pwcomplete::geom;
use pwcomplete::herglotz::{fit_trace, harmonic_on_grid, herglotz_eval, HerglotzDensity};
use pwcomplete::specfun::{
    bessel_zero, gauss_legendre, sph_bessel_j, sph_bessel_j_deriv, sph_bessel_y, sph_bessel_y_deriv,
    sph_harm, HarmonicIndex,
};
use pwcomplete::spectra::single_layer_eig_sweep;
use pwcomplete::surface::{
    default_direction_resolution, default_interior_count, default_surface_resolution,
    make_direction_grid, make_sphere, make_star_surface, sample_interior, PerturbationTerm,
    SurfaceGrid,
};
use pwcomplete::sweep::{sweep_k, Indicator, SubspaceIndicator, SweepOptions, SweepResult};
use pwcomplete::verify::{
    check_decomposition, check_green_reduction, check_trace_orthogonality, check_necessity,
    check_necessity_control, default_sphere_grid, green_terms, DecompositionTarget,
    VerificationReport,
};

type Outcome = Result<String, String>;

const K_LO: f64 = 3.0;
const K_HI: f64 = 6.5;
const SAMPLES: usize = 350;
/// Unit-ball Dirichlet eigenvalues in [3, 6.5] with multiplicities.
const BALL: [(f64, usize); 4] = [(PI, 1), (4.493409458, 3), (5.763459197, 5), (2.0 * PI, 1)];
/// Grid for the single-layer cross-oracle.
const SINGLE_LAYER_GRID: (usize, usize) = (30, 60);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: pwcomplete::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn star_terms() -> Vec<PerturbationTerm> {
    vec![PerturbationTerm { index: HarmonicIndex::new(2, 0).unwrap(), coefficient: 0.1 }]
}

/// Subspace sweep over [K_LO, K_HI] with the default grids for `K_HI`.
fn trace_sweep(grid: &SurfaceGrid, outer: f64, seed: u64) -> pwcomplete::Result<SweepResult> {
    let (dt, dp) = default_direction_resolution(K_HI, outer);
    let dirs = make_direction_grid(dt, dp)?;
    let interior = sample_interior(grid, default_interior_count(dirs.len()), seed)?;
    sweep_k(K_LO, K_HI, SAMPLES, grid, &dirs, &interior, &SweepOptions::default())
}

fn dip_ks(r: &SweepResult) -> Vec<f64> {
    r.dips.iter().map(|d| d.k_refined).collect()
}

fn max_pair_gap(a: &[f64], b: &[f64]) -> Result<f64, String> {
    ensure(a.len() == b.len(), format!("dip counts differ: {} vs {}", a.len(), b.len()))?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn criterion1(sphere: &SurfaceGrid, sweep: &SweepResult, seconds: f64) -> Outcome {
    let dips = &sweep.dips;
    ensure(dips.len() == 4, format!("{} dips, expected 4", dips.len()))?;
    let mut worst: f64 = 0.0;
    for (d, (k, m)) in dips.iter().zip(BALL) {
        worst = worst.max((d.k_refined - k).abs());
        ensure(d.multiplicity == m, format!("multiplicity {} at {:.6}, expected {m}", d.multiplicity, d.k_refined))?;
    }
    ensure(worst <= 1e-3, format!("dip location error {worst:.2e}"))?;
    let (dt, dp) = default_direction_resolution(K_HI, 1.0);
    let dirs = lib(make_direction_grid(dt, dp))?;
    let interior = lib(sample_interior(sphere, default_interior_count(dirs.len()), 0))?;
    let ind = SubspaceIndicator::new(sphere, &dirs, &interior);
    let at_eigs = BALL.iter().map(|(k, _)| ind.value(*k)).collect::<pwcomplete::Result<Vec<_>>>();
    let at_eigs = lib(at_eigs)?.into_iter().fold(0.0, f64::max);
    let controls = lib([3.5, 5.0, 6.0].iter().map(|k| ind.value(*k)).collect::<pwcomplete::Result<Vec<_>>>())?;
    let control_min = controls.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(at_eigs <= 0.1 * control_min, format!("indicator {at_eigs:.2e} at eigenvalues vs {control_min:.2e} at controls"))?;
    ensure(seconds <= 120.0, format!("sweep took {seconds:.1} s"))?;
    Ok(format!(
        "4 dips, max |Δk| {worst:.1e}, multiplicities 1/3/5/1, eig/control {:.1e}, sweep {seconds:.1} s",
        at_eigs / control_min
    ))
}

fn criterion2() -> Outcome {
    let (mut worst, mut control_min) = (0.0f64, f64::INFINITY);
    let mut count = 0;
    for radius in [0.7, 1.0, 2.0] {
        for l in 0..=3usize {
            for n in 1..=2usize {
                let k = lib(bessel_zero(l, n))? / radius;
                let grid = lib(default_sphere_grid(k * 1.01, radius))?;
                for m in -(l as i64)..=(l as i64) {
                    let idx = HarmonicIndex::new(l, m).unwrap();
                    worst = worst.max(lib(check_necessity(idx, n, radius, &grid, 100))?.residual);
                    control_min = control_min.min(lib(check_necessity_control(idx, n, radius, &grid, 100))?.residual);
                    count += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-8, format!("necessity residual {worst:.2e}"))?;
    ensure(control_min >= 1e-3, format!("control residual {control_min:.2e}"))?;
    Ok(format!("{count} cases, max residual {worst:.1e}, min control residual {control_min:.1e}"))
}

fn criterion3() -> Outcome {
    let fit_y00 = |k: f64| -> Result<f64, String> {
        let grid = lib(default_sphere_grid(k.max(PI), 1.0))?;
        let (dt, dp) = default_direction_resolution(k.max(PI), 1.0);
        let dirs = lib(make_direction_grid(dt, dp))?;
        let y00 = harmonic_on_grid(&grid, HarmonicIndex::new(0, 0).unwrap());
        Ok(lib(fit_trace(k, &y00, &grid, &dirs, None))?.residual)
    };
    let at_pi = fit_y00(PI)?;
    let at_one = fit_y00(1.0)?;
    ensure((at_pi - 1.0).abs() <= 1e-6, format!("residual at π {at_pi}"))?;
    ensure(at_one <= 1e-8, format!("residual at k=1 {at_one:.2e}"))?;
    Ok(format!("residual at π {at_pi:.10}, at k=1 {at_one:.1e}"))
}

fn criterion4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for l in 0..=2usize {
        for n in 1..=2usize {
            let k = lib(bessel_zero(l, n))?;
            let grid = lib(default_sphere_grid(k, 1.0))?;
            let (dt, dp) = default_direction_resolution(k, 1.0);
            let dirs = lib(make_direction_grid(dt, dp))?;
            for m in -(l as i64)..=(l as i64) {
                let r = lib(check_trace_orthogonality(HarmonicIndex::new(l, m).unwrap(), n, 1.0, &grid, &dirs, 20, 11))?;
                worst = worst.max(r.residual);
                count += 1;
            }
        }
    }
    ensure(worst <= 1e-7, format!("orthogonality residual {worst:.2e}"))?;
    let grid = lib(default_sphere_grid(PI, 1.0))?;
    let dirs = lib(make_direction_grid(14, 28))?;
    let random = lib(check_decomposition(1.0, 1.0, &grid, &dirs, DecompositionTarget::RandomBandLimited { seed: 11 }, true))?;
    let y00 = DecompositionTarget::Harmonic { l: 0, m: 0 };
    let with = lib(check_decomposition(PI, 1.0, &grid, &dirs, y00, true))?;
    let without = lib(check_decomposition(PI, 1.0, &grid, &dirs, y00, false))?;
    ensure(random.residual <= 1e-5, format!("decomposition at k=1 {:.2e}", random.residual))?;
    ensure(with.residual <= 1e-8, format!("decomposition at π with v_N {:.2e}", with.residual))?;
    ensure((without.residual - 1.0).abs() <= 1e-6, format!("traces alone at π {}", without.residual))?;
    Ok(format!(
        "{count} eigenfunctions, max orthogonality {worst:.1e}; decomposition k=1 {:.1e}, π {:.1e}, π traces alone {:.8}",
        random.residual, with.residual, without.residual
    ))
}

fn criterion5() -> Outcome {
    let ang = lib(make_direction_grid(16, 32))?;
    let mut worst: f64 = 0.0;
    for l in 0..=3usize {
        for n in 1..=2usize {
            for m in -(l as i64)..=(l as i64) {
                for nr in [32, 64] {
                    let r: VerificationReport = lib(check_green_reduction(HarmonicIndex::new(l, m).unwrap(), n, 1.0, nr, &ang))?;
                    worst = worst.max(r.residual);
                }
            }
        }
    }
    ensure(worst <= 1e-8, format!("Green residual {worst:.2e}"))?;
    // π² ∫_0^1 r² j_0(πr) dr = π² [sin(πr)/π³ − r cos(πr)/π²]_0^1 = 1
    let closed = PI * PI * ((PI.sin() / PI.powi(3)) - (PI.cos() / (PI * PI)));
    let y00 = HarmonicIndex::new(0, 0).unwrap();
    let t = lib(green_terms(y00, y00, 1, 1.0, 64, &ang))?;
    let err = (t.volume.re - closed).abs().max(t.volume.im.abs());
    ensure(err <= 1e-10, format!("l=0 volume term {} vs {closed}", t.volume))?;
    Ok(format!("max residual {worst:.1e} (32 and 64 radial nodes), l=0 closed form error {err:.1e}"))
}

fn criterion6(sphere_trace: &SweepResult) -> Outcome {
    let (nt, np) = SINGLE_LAYER_GRID;
    let opts = SweepOptions::default();
    let sphere_sl_grid = lib(make_sphere(1.0, nt, np))?;
    let sphere_sl = lib(single_layer_eig_sweep(K_LO, K_HI, SAMPLES, &sphere_sl_grid, &opts))?;
    let ball: Vec<f64> = BALL.iter().map(|(k, _)| *k).collect();
    let sphere_cross = max_pair_gap(&dip_ks(sphere_trace), &dip_ks(&sphere_sl))?;
    let trace_vs_ball = max_pair_gap(&dip_ks(sphere_trace), &ball)?;
    let sl_vs_ball = max_pair_gap(&dip_ks(&sphere_sl), &ball)?;

    let terms = star_terms();
    let outer = 1.0 + 0.1 * (5.0 / (4.0 * PI)).sqrt();
    let (st, sp) = default_surface_resolution(K_HI, outer);
    let star = lib(make_star_surface(1.0, &terms, st, sp))?;
    let star_trace = lib(trace_sweep(&star, outer, 0))?;
    let star_sl_grid = lib(make_star_surface(1.0, &terms, nt, np))?;
    let star_sl = lib(single_layer_eig_sweep(K_LO, K_HI, SAMPLES, &star_sl_grid, &opts))?;
    let star_cross = max_pair_gap(&dip_ks(&star_trace), &dip_ks(&star_sl))?;

    for (what, v) in [
        ("sphere trace vs single-layer", sphere_cross),
        ("sphere trace vs ball", trace_vs_ball),
        ("sphere single-layer vs ball", sl_vs_ball),
        ("star trace vs single-layer", star_cross),
    ] {
        ensure(v <= 5e-3, format!("{what}: {v:.2e}"))?;
    }
    Ok(format!(
        "sphere: cross {sphere_cross:.1e}, vs ball {trace_vs_ball:.1e}/{sl_vs_ball:.1e}; star ({} dips): cross {star_cross:.1e}",
        star_trace.dips.len()
    ))
}

fn criterion7() -> Outcome {
    let t0 = Instant::now();
    let mut wr: f64 = 0.0;
    let mut rec: f64 = 0.0;
    for l in 0..=20usize {
        for i in 1..=500 {
            let x = 0.1 * i as f64;
            let w = lib(sph_bessel_j(l, x))? * lib(sph_bessel_y_deriv(l, x))?
                - lib(sph_bessel_j_deriv(l, x))? * lib(sph_bessel_y(l, x))?;
            wr = wr.max((w * x * x - 1.0).abs());
            if l >= 1 {
                let (a, b, c) = (lib(sph_bessel_j(l - 1, x))?, lib(sph_bessel_j(l, x))?, lib(sph_bessel_j(l + 1, x))?);
                let mid = (2 * l + 1) as f64 / x * b;
                rec = rec.max((a + c - mid).abs() / a.abs().max(c.abs()).max(mid.abs()));
            }
        }
    }
    ensure(wr <= 1e-12, format!("Wronskian {wr:.2e}"))?;
    ensure(rec <= 1e-12, format!("recurrence {rec:.2e}"))?;

    let mut gl: f64 = 0.0;
    for n in 1..=40usize {
        let (x, w) = gauss_legendre(n);
        for deg in 0..2 * n {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            gl = gl.max((q - exact).abs());
        }
    }
    ensure(gl <= 1e-13, format!("quadrature exactness {gl:.2e}"))?;

    let d = lib(make_direction_grid(14, 28))?;
    let idxs = HarmonicIndex::all_up_to(12);
    let vals: Vec<Vec<Complex64>> = idxs
        .iter()
        .map(|i| d.directions.iter().map(|b| { let (t, p) = geom::angles(b); sph_harm(*i, t, p) }).collect())
        .collect();
    let mut orth: f64 = 0.0;
    for (a, va) in vals.iter().enumerate() {
        for (b, vb) in vals.iter().enumerate() {
            let g: Complex64 = va.iter().zip(vb).zip(&d.weights).map(|((x, y), w)| x * y.conj() * *w).sum();
            orth = orth.max((g - if a == b { 1.0 } else { 0.0 }).norm());
        }
    }
    ensure(orth <= 1e-12, format!("Y_lm Gram deviation {orth:.2e}"))?;

    let dirs = lib(make_direction_grid(24, 48))?;
    let pts = [[0.5, 0.2, -0.7], [0.0, 0.0, 1.0], [-0.9, 0.3, 0.1], [0.1, -0.6, 0.4]];
    let mut ja: f64 = 0.0;
    for k in [0.5, 2.0, 5.0, 7.9] {
        for idx in HarmonicIndex::all_up_to(8) {
            let w = lib(herglotz_eval(k, &HerglotzDensity::harmonic(&dirs, idx), &dirs, &pts))?;
            for (x, wx) in pts.iter().zip(&w) {
                let r = geom::norm(x);
                let (t, p) = geom::angles(x);
                let exact = Complex64::i().powu(idx.l as u32) * (4.0 * PI * lib(sph_bessel_j(idx.l, k * r))?) * sph_harm(idx, t, p);
                ja = ja.max((wx - exact).norm());
            }
        }
    }
    ensure(ja <= 1e-10, format!("Jacobi–Anger {ja:.2e}"))?;
    let secs = t0.elapsed().as_secs_f64();
    ensure(secs <= 60.0, format!("invariant suite took {secs:.1} s"))?;
    Ok(format!(
        "Wronskian {wr:.1e}, recurrence {rec:.1e}, quadrature {gl:.1e}, Y_lm {orth:.1e}, Jacobi–Anger {ja:.1e}, {secs:.2} s"
    ))
}

fn criterion8() -> Outcome {
    let run = |threads: usize| -> pwcomplete::Result<(Vec<u8>, String, String)> {
        let grid = make_sphere(1.0, 24, 48)?;
        let dirs = make_direction_grid(12, 24)?;
        let interior = sample_interior(&grid, 600, 42)?;
        let opts = SweepOptions { threads, ..SweepOptions::default() };
        let r = sweep_k(3.0, 3.3, 31, &grid, &dirs, &interior, &opts)?;
        let mut csv = Vec::new();
        r.write_csv(&mut csv)?;
        let reports = pwcomplete::verify::standard_suite(42)?
            .iter()
            .map(|r| r.to_json_line())
            .collect::<pwcomplete::Result<Vec<_>>>()?
            .join("\n");
        Ok((csv, r.to_json()?, reports))
    };
    let a = lib(run(1))?;
    let b = lib(run(1))?;
    let c = lib(run(3))?;
    ensure(a == b, "repeated runs differ")?;
    ensure(a == c, "thread count changes artifacts")?;
    Ok(format!("sweep CSV {} B, sweep JSON {} B, verify {} B identical across 3 runs", a.0.len(), a.1.len(), a.2.len()))
}

fn main() {
    let t0 = Instant::now();
    let sphere = {
        let (nt, np) = default_surface_resolution(K_HI, 1.0);
        make_sphere(1.0, nt, np).expect("sphere grid")
    };
    let start = Instant::now();
    let sphere_sweep = trace_sweep(&sphere, 1.0, 0);
    let sweep_secs = start.elapsed().as_secs_f64();

    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |n: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let out = f();
        eprintln!("  criterion {n} evaluated in {:.1} s", t.elapsed().as_secs_f64());
        results.push((n, name, out));
    };
    let sweep_ref = sphere_sweep.as_ref().map_err(|e| e.to_string());
    record(1, "ball dichotomy sweep", &|| criterion1(&sphere, sweep_ref.clone()?, sweep_secs));
    record(2, "necessity", &criterion2);
    record(3, "totality failure on the sphere", &criterion3);
    record(4, "orthogonality and decomposition", &criterion4);
    record(5, "Green's reduction", &criterion5);
    record(6, "cross-oracle agreement", &|| criterion6(sweep_ref.clone()?));
    record(7, "analytic invariants", &criterion7);
    record(8, "determinism", &criterion8);

    let mut failed = 0;
    for (n, name, out) in &results {
        match out {
            Ok(detail) => println!("criterion {n} [{name}]: PASS - {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} [{name}]: FAIL - {why}");
            }
        }
    }
    println!("acceptance: {}/{} passed in {:.1} s", results.len() - failed, results.len(), t0.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
