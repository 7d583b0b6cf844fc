//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use beltrami_growth::complex_polar::jacobian_wirtinger;
use beltrami_growth::dilatation::{angular_dilatation, kappa};
use beltrami_growth::growth::{
    area_bound_check, corollary_exponent, differential_inequality_at, envelope_integral, isoperimetric_check,
    iterated_log, modulus_extremes, theorem1_check, tower,
};
use beltrami_growth::verify::{build_extremal, pde_residual, real_system_residual, sharpness_ladder};
use beltrami_growth::{
    Annulus, CircleQuadrature, CoefficientField, Cplx, DerivativeMode, FieldKind, GrowthExponent, KappaProfile,
    MappingSpec, PlanePoint, RadiusLadder, SharpnessExample,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type Outcome = (bool, String);

fn q() -> CircleQuadrature {
    CircleQuadrature::new(256).unwrap()
}

fn origin() -> PlanePoint {
    PlanePoint::origin()
}

fn field(kind: FieldKind) -> CoefficientField {
    CoefficientField::at_origin(kind).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn linear_pair() -> (MappingSpec, CoefficientField) {
    let (a, b) = (Cplx::new(0.5, 0.0), Cplx::new(1.0, 0.0));
    (MappingSpec::linear(a, b, Cplx::new(0.0, 0.0)).unwrap(), field(FieldKind::Linear { a, b }))
}

/// Every closed-form catalog map paired with its coefficient.
fn catalog() -> Vec<(String, MappingSpec, CoefficientField)> {
    let (lm, lk) = linear_pair();
    let mut out = vec![
        ("identity".to_string(), MappingSpec::Identity, field(FieldKind::Power { alpha: 1.0 })),
        ("linear".to_string(), lm, lk),
        ("spiral".to_string(), MappingSpec::Spiral, field(FieldKind::Spiral)),
    ];
    for alpha in [0.5, 1.0, 2.0] {
        out.push((format!("power(α={alpha})"), MappingSpec::power(alpha).unwrap(), field(FieldKind::Power { alpha })));
    }
    for alpha in [1.0, 2.0] {
        out.push((format!("loglog(α={alpha})"), MappingSpec::loglog(alpha).unwrap(), field(FieldKind::LogLog { alpha })));
    }
    out
}

fn extremal_tables() -> Vec<(String, MappingSpec, CoefficientField)> {
    [
        ("table(constant 0.5)", KappaProfile::constant(0.5).unwrap(), 1.0),
        ("table(loglog 1)", KappaProfile::loglog_example(1.0).unwrap(), 1.0),
    ]
    .into_iter()
    .map(|(name, prof, r0)| {
        let sol = build_extremal(prof, r0, 1.0, 1e4, 64).unwrap();
        (name.to_string(), sol.mapping(), sol.coefficient())
    })
    .collect()
}

fn criterion_1() -> Outcome {
    let region = Annulus::new(0.05, 20.0, 40, 250).unwrap();
    let k = field(FieldKind::Spiral);
    let mut jac_err: f64 = 0.0;
    for (r, theta) in region.nodes() {
        let wp = MappingSpec::Spiral.wirtinger_analytic(PlanePoint::on_circle(origin(), r, theta)).unwrap();
        jac_err = jac_err.max((jacobian_wirtinger(wp) - 1.0).abs());
    }
    let rep = pde_residual(&MappingSpec::Spiral, &k, origin(), &region, DerivativeMode::Analytic).unwrap();
    let n = rep.points.len();
    let ok = jac_err <= 1e-12 && rep.max <= 1e-12 && n >= 10_000;
    (ok, format!("spiral: max|J-1| = {jac_err:.3e}, max residual = {:.3e} over {n} points", rep.max))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let ladder = RadiusLadder::new(1.0, 2.0, 40).unwrap();
    for alpha in [0.5, 1.0, 2.0] {
        let map = MappingSpec::power(alpha).unwrap();
        let k = field(FieldKind::Power { alpha });
        let mut d_err: f64 = 0.0;
        let mut k_err: f64 = 0.0;
        let mut m_err: f64 = 0.0;
        for r in ladder.radii() {
            for j in 0..8 {
                let z = PlanePoint::on_circle(origin(), r, 0.7 * j as f64 + 0.1);
                d_err = d_err.max(rel(angular_dilatation(&map, origin(), z).unwrap(), alpha));
            }
            k_err = k_err.max(rel(kappa(&k, r, q()).unwrap(), alpha));
            m_err = m_err.max(rel(modulus_extremes(&map, origin(), r, q()).unwrap().max, r.powf(1.0 / alpha)));
        }
        let t1 = theorem1_check(&map, &k, origin(), 1.0, &ladder, q()).unwrap();
        let v_err = t1.rows.iter().map(|row| (row.v - 1.0).abs()).fold((t1.min_modulus_r0 - 1.0).abs(), f64::max);
        let sharp = sharpness_ladder(SharpnessExample::Power { alpha }, &ladder, q()).unwrap();
        let s_err = sharp.rows.iter().map(|row| (row.2 - 1.0).abs()).fold(0.0, f64::max);
        let good = d_err <= 1e-9
            && k_err <= 1e-12
            && m_err <= 1e-9
            && v_err <= 1e-8
            && t1.holds
            && sharp.passes
            && t1.rows.len() == 40;
        ok &= good;
        parts.push(format!(
            "α={alpha}: D {d_err:.1e}, κ {k_err:.1e}, M {m_err:.1e}, v {v_err:.1e}, ratio {s_err:.1e}"
        ));
    }
    (ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let seam: f64 = tower(2).unwrap();
    for alpha in [1.0, 2.0] {
        let map = MappingSpec::loglog(alpha).unwrap();
        let k = field(FieldKind::LogLog { alpha });
        let mut k_err: f64 = 0.0;
        for r in [0.3, 1.0, 5.0, 15.0, seam, 20.0, 1e3, 1e6, 1e9] {
            let want = if r >= seam { alpha * r.ln() * r.ln().ln() } else { 1.0 };
            k_err = k_err.max(rel(kappa(&k, r, q()).unwrap(), want));
        }
        let ladder = RadiusLadder::spanning(seam, 1e9, 20).unwrap();
        let mut m_err: f64 = 0.0;
        for r in ladder.radii() {
            let want = r.ln().ln().powf(1.0 / alpha);
            m_err = m_err.max(rel(modulus_extremes(&map, origin(), r, q()).unwrap().max, want));
        }
        let sharp = sharpness_ladder(SharpnessExample::LogLog { alpha }, &ladder, q()).unwrap();
        let first = sharp.rows[0].2;
        let last = sharp.rows[sharp.rows.len() - 1].2;
        let good = k_err <= 1e-10 && m_err <= 1e-10 && sharp.strictly_decreasing && sharp.halved;
        ok &= good;
        parts.push(format!(
            "α={alpha}: κ {k_err:.1e}, M {m_err:.1e}, decreasing {}, final/initial {:.4}",
            sharp.strictly_decreasing,
            last / first
        ));
    }
    (ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let e3: f64 = tower(3).unwrap();
    let mut worst_const: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        let prof = KappaProfile::constant(alpha).unwrap();
        for (r0, r_big) in [(1.0, 10.0), (0.5, 1e3), (2.0, e3)] {
            let env = envelope_integral(&prof, r0, r_big).unwrap();
            worst_const = worst_const.max(rel(env.envelope, (r_big / r0).powf(1.0 / alpha)));
        }
    }
    let mut worst_log: f64 = 0.0;
    for n in [1u32, 2] {
        let start: f64 = tower(n).unwrap();
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let prof = KappaProfile::log_product(alpha, n).unwrap();
            for i in 1..=12 {
                let r_big = start * (e3 / start).powf(i as f64 / 12.0);
                let env = envelope_integral(&prof, start, r_big).unwrap();
                let want = iterated_log(n, r_big).unwrap().powf(1.0 / alpha);
                worst_log = worst_log.max(rel(env.envelope, want));
            }
        }
    }
    let ok = worst_const <= 1e-10 && worst_log <= 1e-8;
    (ok, format!("constant worst rel {worst_const:.2e}; log-product worst rel {worst_log:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut worst_ratio = f64::INFINITY;
    let mut worst_radial_eq: f64 = 0.0;
    let mut worst_slack = f64::INFINITY;
    let mut worst_radial_iso: f64 = 0.0;
    let mut cases = catalog();
    cases.extend(extremal_tables());
    for (name, map, _) in &cases {
        let (lo, hi): (f64, f64) = match map {
            MappingSpec::RadialTable(_) => (1.5, 5e3),
            _ => (0.5, 5e3),
        };
        for i in 0..10 {
            let r = lo * (hi / lo).powf(i as f64 / 9.0);
            let d = differential_inequality_at(map, origin(), r, q()).unwrap();
            let iso = isoperimetric_check(map, origin(), r, q()).unwrap();
            let l2 = iso.length * iso.length;
            worst_ratio = worst_ratio.min(d.ratio);
            worst_slack = worst_slack.min(iso.slack / l2);
            ok &= d.holds && iso.holds;
            if map.is_radial() {
                worst_radial_eq = worst_radial_eq.max((d.ratio - 1.0).abs());
                worst_radial_iso = worst_radial_iso.max(iso.slack.abs() / l2);
                if !(d.equality && iso.equality) {
                    ok = false;
                    eprintln!("criterion 5: {name} at r = {r}: ratio {}, slack {}", d.ratio, iso.slack / l2);
                }
            }
        }
    }
    (
        ok,
        format!(
            "{} maps × 10 radii: min ratio {worst_ratio:.6}, min slack/L² {worst_slack:.2e}; \
             radial |ratio-1| ≤ {worst_radial_eq:.2e}, |slack|/L² ≤ {worst_radial_iso:.2e}",
            cases.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut cases = catalog();
    cases.retain(|(name, _, _)| name != "identity");
    cases.extend(extremal_tables());
    for (name, map, k) in &cases {
        let (r0, r_big) = match map {
            MappingSpec::LogLog { .. } => (1.0, 1e6),
            MappingSpec::RadialTable(_) => (1.0, 1e4),
            _ => (1.0, 1e3),
        };
        let rep = area_bound_check(map, k, origin(), r0, r_big, q()).unwrap();
        let gap = rep.slack.abs() / rep.rhs.abs().max(rep.area_r0.abs());
        let extremal = map.is_radial();
        let good = rep.holds && (!extremal || rep.equality);
        ok &= good;
        parts.push(format!("{name} {}{}", if rep.holds { "holds" } else { "VIOLATED" }, if extremal {
            format!(" (gap {gap:.1e})")
        } else {
            String::new()
        }));
    }
    (ok, parts.join(", "))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let sol = build_extremal(KappaProfile::constant(alpha).unwrap(), 1.0, 1.0, 1e3, 64).unwrap();
        let knots: Vec<(f64, f64)> = sol.knots().collect();
        let rho_err = knots.iter().map(|&(r, rho)| rel(rho, r.powf(1.0 / alpha))).fold(0.0, f64::max);
        let map = sol.mapping();
        let k = sol.coefficient();
        let region = Annulus::new(1.5, 500.0, 16, 64).unwrap();
        let res = |h: f64| {
            pde_residual(&map, &k, origin(), &region, DerivativeMode::FiniteDifference { h }).unwrap().max_relative()
        };
        let (coarse, fine) = (res(1e-3), res(5e-4));
        let factor = coarse / fine;
        // The identity (α = 1) has no truncation error to converge.
        let converges = alpha == 1.0 || (3.0..=5.0).contains(&factor);
        let good = knots.len() >= 64 && rho_err <= 1e-10 && coarse <= 1e-4 && converges;
        ok &= good;
        parts.push(format!(
            "α={alpha}: {} knots, ρ err {rho_err:.1e}, FD residual {coarse:.2e} → {fine:.2e} (factor {factor:.3})",
            knots.len()
        ));
    }
    (ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let h = 1e-5;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut cases = catalog();
    cases.extend(extremal_tables());
    for (name, map, _) in &cases {
        let (lo, hi): (f64, f64) = match map {
            MappingSpec::RadialTable(_) => (1.2, 50.0f64),
            _ => (0.1, 50.0f64),
        };
        let knots = match map {
            MappingSpec::RadialTable(t) => t.knots().to_vec(),
            _ => Vec::new(),
        };
        let mut taken = 0;
        let mut case_worst: f64 = 0.0;
        while taken < 100 {
            let r = (rng.random_range(lo.ln()..hi.ln())).exp();
            let z = PlanePoint::on_circle(origin(), r, rng.random_range(0.0..std::f64::consts::TAU));
            // Keep the stencil off non-smooth radii, including table knots (C¹ only).
            let band = 10.0 * h * r.max(1.0);
            if map.smooth_margin(z) <= band || knots.iter().any(|k| (k - r).abs() <= band) {
                continue;
            }
            taken += 1;
            let a = map.wirtinger_analytic(z).unwrap();
            let f = map.wirtinger_fd(z, h).unwrap();
            case_worst = case_worst.max((a.d_z - f.d_z).norm().max((a.d_zbar - f.d_zbar).norm()));
        }
        if case_worst > 1e-7 {
            ok = false;
            eprintln!("criterion 8: {name}: worst derivative gap {case_worst:.3e}");
        }
        worst = worst.max(case_worst);
    }
    let mut decomp: f64 = 0.0;
    for (_, map, k) in &cases {
        let region = match map {
            MappingSpec::RadialTable(_) => Annulus::new(1.5, 5e3, 16, 32).unwrap(),
            _ => Annulus::new(0.2, 5e3, 16, 32).unwrap(),
        };
        for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference { h }] {
            let real = real_system_residual(map, k, origin(), &region, mode).unwrap();
            decomp = decomp.max(real.max_decomposition_error);
        }
    }
    ok &= decomp <= 1e-10;
    (ok, format!("{} variants × 100 points: max gap {worst:.2e}; real-system decomposition {decomp:.2e}", cases.len()))
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut ok = true;
    for _ in 0..20 {
        let alpha: f64 = rng.random_range(-3.0f64..3.0).exp();
        let a = corollary_exponent(GrowthExponent::CoefficientBound { alpha });
        let b = corollary_exponent(GrowthExponent::KappaBound { alpha: alpha * alpha });
        ok &= a.to_bits() == b.to_bits();
    }
    (ok, "20 random α: CoefficientBound{α} and KappaBound{α²} exponents bit-identical".to_string())
}

fn run_verify(config: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_beltrami"))
        .arg("verify")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .status()
        .expect("beltrami binary runs")
        .code()
        .unwrap_or(-1)
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let configs = [
        r#"{"pair":"power:alpha=2","quadrature_n":256}"#,
        r#"{"pair":"extremal","profile":{"kind":"loglog_example","alpha":1},"r0":1,"r_max":1e6,"knots":64,"quadrature_n":256}"#,
    ];
    let mut ok = true;
    let mut compared = 0;
    for text in configs {
        let work = tempfile::tempdir().unwrap();
        let cfg = work.path().join("run.json");
        std::fs::write(&cfg, text).unwrap();
        let (a, b) = (work.path().join("a"), work.path().join("b"));
        std::fs::create_dir(&a).unwrap();
        std::fs::create_dir(&b).unwrap();
        let codes = (run_verify(&cfg, &a), run_verify(&cfg, &b));
        let (fa, fb) = (csv_files(&a), csv_files(&b));
        ok &= codes == (0, 0) && !fa.is_empty() && fa == fb;
        compared += fa.len();
    }
    (ok, format!("{compared} CSV files byte-identical across repeated verify runs"))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let results: Vec<(u32, Outcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(n, f)| {
                (n, s.spawn(move || {
                    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
                        let msg = e
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_default();
                        (false, format!("panicked: {msg}"))
                    })
                }))
            })
            .collect();
        handles.into_iter().map(|(n, h)| (n, h.join().unwrap())).collect()
    });
    let mut failed = 0;
    for (n, (ok, detail)) in results {
        println!("criterion {n}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
