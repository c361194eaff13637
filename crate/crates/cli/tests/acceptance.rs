//! Acceptance suite: one test per shipped guarantee, each printing a
//! single pass/fail line (run with `--nocapture` to see them).
//!
//! Empirical constants marked "regression fixture" were pinned from the
//! first verified run and guard against silent regressions; the hard
//! tolerances (1e-38 exact relations, 1e-40 closed forms, 1e-6
//! conjugacy residuals, 1e-8 mass) are the contract itself.

use std::process::Command;
use std::sync::OnceLock;

use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use circlelab::cfarith::{cf_expand, quadratic_irrational, QuadraticKind};
use circlelab::conjugacy::{
    build_profile, commutation_residual, holder_exponent, holder_exponent_from_samples,
    homological_residual, verify_measure_identity, ConjugacyProfile, HolderVerdict,
};
use circlelab::crossratio::{
    cross_ratio_distortion, dist_bound_residual, dr_expansion_residual, ratio_distortion,
    C1Monotone, FourPoints, SmoothTestFunction,
};
use circlelab::denjoy::{denjoy_suite, epsilon, mk_profile, DenjoySuite};
use circlelab::maps::{CircleMap, Family, DEFAULT_ORBIT_CAP};
use circlelab::numerics::circle::{mod1, CirclePoint};
use circlelab::partitions::{
    build_partition, count_r, count_r_recurrence, length_scales, marked_orbit_for_level,
    verify_disjointness,
};
use circlelab::rotation::tune_parameter;
use circlelab::{Cf, Hp, Map, Real};

fn hr(s: &str) -> Hp {
    Hp::from_decimal(s).unwrap()
}

fn origin() -> CirclePoint<Hp> {
    mod1(Hp::zero()).unwrap()
}

fn golden() -> Hp {
    quadratic_irrational(&QuadraticKind::Golden).unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

struct TunedFixture {
    map: Map,
    cf: Cf,
    suite: DenjoySuite<Hp>,
}

fn make_fixture(fam: Family<Hp>, kind: QuadraticKind, depth: usize) -> TunedFixture {
    let rho: Hp = quadratic_irrational(&kind).unwrap();
    let target = cf_expand(&rho, 60).unwrap();
    let res = tune_parameter(
        &fam,
        &target,
        depth,
        &hr("1e-30"),
        &origin(),
        DEFAULT_ORBIT_CAP,
    )
    .unwrap();
    let map = fam.at(res.t_star).unwrap();
    let cf = cf_expand(&rho, 30).unwrap();
    let suite = denjoy_suite(&map, &cf, 12, 64, &origin(), DEFAULT_ORBIT_CAP).unwrap();
    TunedFixture { map, cf, suite }
}

fn arnold_golden() -> &'static TunedFixture {
    static F: OnceLock<TunedFixture> = OnceLock::new();
    F.get_or_init(|| {
        make_fixture(
            Family::arnold(hr("0.5")).unwrap(),
            QuadraticKind::Golden,
            24,
        )
    })
}

fn arnold_silver() -> &'static TunedFixture {
    static F: OnceLock<TunedFixture> = OnceLock::new();
    F.get_or_init(|| {
        make_fixture(
            Family::arnold(hr("0.5")).unwrap(),
            QuadraticKind::Silver,
            13,
        )
    })
}

fn two_harmonic_golden() -> &'static TunedFixture {
    static F: OnceLock<TunedFixture> = OnceLock::new();
    F.get_or_init(|| {
        make_fixture(
            Family::two_harmonic(hr("0.4"), hr("0.2")).unwrap(),
            QuadraticKind::Golden,
            24,
        )
    })
}

fn golden_profile_100k() -> &'static ConjugacyProfile<Hp> {
    static P: OnceLock<ConjugacyProfile<Hp>> = OnceLock::new();
    P.get_or_init(|| {
        build_profile(&arnold_golden().map, &origin(), 100_000, DEFAULT_ORBIT_CAP).unwrap()
    })
}

/// Criterion 1: the three exact relations vanish to 10^−(P−12) for the
/// tuned Arnold (golden) and two-harmonic maps at all levels n ≤ 10.
#[test]
fn criterion_1_exact_relations() {
    let tol = hr("1e-38");
    let mut worst = Hp::zero();
    for fixture in [arnold_golden(), two_harmonic_golden()] {
        for row in fixture.suite.rows.iter().filter(|r| r.n <= 10) {
            worst = worst
                .max_with(&row.res_products.abs())
                .max_with(&row.res_segment_transfer.abs())
                .max_with(&row.res_derivative_transfer.abs());
        }
    }
    report(
        "1 (exact relations)",
        worst < tol,
        &format!("max residual {:.3e} < 1e-38", worst.to_f64().unwrap()),
    );
}

/// Criterion 2: every pipeline output collapses to its closed form on
/// the rigid golden rotation.
#[test]
fn criterion_2_rigid_rotation_degeneracy() {
    let tol = hr("1e-40");
    let map = CircleMap::rotation(golden()).unwrap();
    let cf = cf_expand(&golden(), 14).unwrap();
    let suite = denjoy_suite(&map, &cf, 10, 48, &origin(), DEFAULT_ORBIT_CAP).unwrap();

    let mut ok = true;
    let mut detail = String::new();

    // S_n = 0 and exact relations at rounding level
    for row in &suite.rows {
        ok &= row.s_n < tol;
        ok &= row.res_products.abs() < tol;
    }

    // ε_n = (n+1)γⁿ and Δ_n = γ^{n+1} to 1e-40
    let orb = marked_orbit_for_level(&map, &cf, 10, &origin(), DEFAULT_ORBIT_CAP).unwrap();
    let scales = length_scales(&map, &cf, 10, &orb, 24).unwrap();
    for n in 0..=10usize {
        let eps_n = epsilon(&scales, &Hp::one(), n);
        let closed = Hp::from_usize(n + 1).unwrap() * golden().powi(n as i32);
        ok &= (eps_n - closed).abs() < tol;
        ok &= (cf.delta(n as isize).clone() - golden().powi(n as i32 + 1)).abs() < tol;
    }

    // M_n ≡ K_n ≡ 1
    for level in [2usize, 5, 8] {
        let prof = mk_profile(&map, &cf, &orb, level, 17).unwrap();
        let (mlo, mhi) = prof.m_range();
        let (klo, khi) = prof.k_range();
        ok &= (mlo - Hp::one()).abs() < tol && (mhi - Hp::one()).abs() < tol;
        ok &= (klo - Hp::one()).abs() < tol && (khi - Hp::one()).abs() < tol;
    }

    // h ≡ 1 and φ = Id − ξ₀
    let prof = build_profile(&map, &origin(), 3000, DEFAULT_ORBIT_CAP).unwrap();
    ok &= (prof.min_h() - Hp::one()).abs() < tol;
    ok &= (prof.max_h() - Hp::one()).abs() < tol;
    for k in (0..prof.sample_count()).step_by(131) {
        let expect = prof.positions()[k].clone(); // ξ₀ = 0
        ok &= (prof.phi_values()[k].clone() - expect).abs() < tol;
    }
    detail.push_str(&format!(
        "S_n, M−1, K−1, h−1, φ−Id, ε−closed-form, Δ−γ^(n+1) all < 1e-40"
    ));
    report("2 (rigid-rotation degeneracy)", ok, &detail);
}

/// Criterion 3: segment disjointness, covering to 1e-40, exact
/// r(n+m,n) counting, and l_n ≥ Δ_n for every corpus map.
#[test]
fn criterion_3_combinatorics() {
    let covering_tol = hr("1e-40");
    let gap_tol = hr("1e-42");
    let mut ok = true;
    let mut max_defect = Hp::zero();

    let rotation = CircleMap::rotation(golden()).unwrap();
    let rotation_cf = cf_expand(&golden(), 30).unwrap();
    let corpus: Vec<(&str, &Map, &Cf)> = vec![
        ("rotation-golden", &rotation, &rotation_cf),
        ("arnold-golden", &arnold_golden().map, &arnold_golden().cf),
        ("arnold-silver", &arnold_silver().map, &arnold_silver().cf),
        (
            "two-harmonic-golden",
            &two_harmonic_golden().map,
            &two_harmonic_golden().cf,
        ),
    ];

    for (name, map, cf) in &corpus {
        // disjointness + covering at a spread of levels
        for level in [2usize, 5, 8, 11] {
            let part = build_partition(*map, cf, level, &origin(), DEFAULT_ORBIT_CAP).unwrap();
            let rep = verify_disjointness(&part).unwrap();
            ok &= rep.min_gap >= -gap_tol.clone();
            ok &= rep.covering_defect < covering_tol;
            max_defect = max_defect.max_with(&rep.covering_defect);
            assert!(ok, "{name} level {level}: {rep:?}");
        }

        // r(n+m, n): direct count == recurrence, big-integer equality,
        // over every level pair with q_{n+m+1} ≤ 1e5
        let mut deepest = 0usize;
        while matches!(cf.q_usize(deepest as isize + 1), Ok(q) if q <= 100_000)
            && deepest + 2 < cf.levels()
        {
            deepest += 1;
        }
        let scan_level = deepest.saturating_sub(1);
        let orb =
            marked_orbit_for_level(*map, cf, scan_level, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        let mut pairs = 0usize;
        for n in 0..scan_level {
            for m in 0..=(scan_level - n) {
                if cf.levels() < n + m + 2 {
                    continue;
                }
                let direct = count_r(cf, n, m, &orb).unwrap();
                let recur = count_r_recurrence(cf, n, m).unwrap();
                ok &= direct == recur;
                assert!(ok, "{name}: r({}, {n}) direct {direct} != recurrence {recur}", n + m);
                pairs += 1;
            }
        }
        assert!(pairs > 20, "{name}: too few counting pairs ({pairs})");

        // l_n ≥ Δ_n at every computed level
        let n_max = 12.min(cf.max_partition_level() - 1);
        let orb2 = marked_orbit_for_level(*map, cf, n_max, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        let scales = length_scales(*map, cf, n_max, &orb2, 24).unwrap();
        for n in 0..=n_max {
            ok &= scales.l(n as isize).clone() + gap_tol.clone() >= cf.delta(n as isize).clone();
        }
        assert!(ok, "{name}: l_n ≥ Δ_n violated");
    }
    report(
        "3 (combinatorics suite)",
        ok,
        &format!(
            "4 maps: disjoint, covering defect ≤ {:.3e}, exact counting, l_n ≥ Δ_n",
            max_defect.to_f64().unwrap()
        ),
    );
}

/// Criterion 4: the Denjoy-type inequality — S_n/ε_n stays within the
/// pinned band over n = 1..12 and S_n decays geometrically.
#[test]
fn criterion_4_denjoy_inequality() {
    // regression fixture: first verified run gave max/min factors 6.12
    // (golden) and 7.57 (silver)
    let factor_pin = hr("12");
    let mut ok = true;
    let mut detail = String::new();
    for (name, fixture) in [("golden", arnold_golden()), ("silver", arnold_silver())] {
        let mut rmax = Hp::zero();
        let mut rmin = hr("1e9");
        for row in &fixture.suite.rows {
            ok &= row.s_n.is_positive();
            rmax = rmax.max_with(&row.s_over_eps);
            rmin = rmin.min_with(&row.s_over_eps);
        }
        let factor = rmax.clone() / rmin.clone();
        ok &= factor < factor_pin;
        let rate = fixture.suite.s_n_rate.clone().unwrap();
        ok &= rate < Hp::one();
        detail.push_str(&format!(
            "{name}: ratio band [{:.3}, {:.3}] factor {:.2}, S_n rate {:.3}; ",
            rmin.to_f64().unwrap(),
            rmax.to_f64().unwrap(),
            factor.to_f64().unwrap(),
            rate.to_f64().unwrap()
        ));
    }
    report("4 (Denjoy-type inequality)", ok, detail.trim_end());
}

/// Criterion 5: k_{n+1}ε_n decays geometrically and its Diophantine
/// refinement stays bounded for both tuned maps.
#[test]
fn criterion_5_kneps_decay() {
    // regression fixture: first verified run gave refined maxima 2.48
    // (golden) and 3.11 (silver)
    let refined_pin = hr("6");
    let mut ok = true;
    let mut detail = String::new();
    for (name, fixture) in [("golden", arnold_golden()), ("silver", arnold_silver())] {
        ok &= fixture.suite.kneps_rate < Hp::one();
        ok &= fixture.suite.kneps_refined_max < refined_pin;
        detail.push_str(&format!(
            "{name}: rate {:.3}, refined max {:.2}; ",
            fixture.suite.kneps_rate.to_f64().unwrap(),
            fixture.suite.kneps_refined_max.to_f64().unwrap()
        ));
    }
    report("5 (k·ε decay)", ok, detail.trim_end());
}

/// Criterion 6: the constructed conjugacy — homological and commutation
/// residuals ≤ 1e-6 at N = 1e5 with monotone decrease over doublings,
/// unit mass, positive density, measure identity at levels 3 and 8.
#[test]
fn criterion_6_conjugacy_construction() {
    let budget = hr("1e-6");
    let fixture = arnold_golden();
    let rho = golden();
    let mut ok = true;

    let mut homological = Vec::new();
    let mut commutation = Vec::new();
    for n in [25_000usize, 50_000] {
        let prof = build_profile(&fixture.map, &origin(), n, DEFAULT_ORBIT_CAP).unwrap();
        homological.push(homological_residual(&fixture.map, &prof, 4096).unwrap());
        commutation.push(commutation_residual(&prof, &rho).unwrap());
    }
    let prof = golden_profile_100k();
    homological.push(homological_residual(&fixture.map, prof, 4096).unwrap());
    commutation.push(commutation_residual(prof, &rho).unwrap());

    ok &= homological[2] < budget && commutation[2] < budget;
    ok &= homological[0] > homological[1] && homological[1] > homological[2];
    ok &= commutation[0] > commutation[1] && commutation[1] > commutation[2];

    ok &= (prof.density_mass() - Hp::one()).abs() < hr("1e-8");
    ok &= prof.min_h().is_positive();

    let mut ids = Vec::new();
    for level in [3usize, 8] {
        let defect = verify_measure_identity(&fixture.cf, prof, level).unwrap();
        ok &= defect < budget;
        ids.push(defect);
    }
    report(
        "6 (conjugacy construction)",
        ok,
        &format!(
            "homological {:.3e} → {:.3e} → {:.3e}; commutation {:.3e} → {:.3e} → {:.3e}; measure identity n=3 {:.3e}, n=8 {:.3e}",
            homological[0].to_f64().unwrap(),
            homological[1].to_f64().unwrap(),
            homological[2].to_f64().unwrap(),
            commutation[0].to_f64().unwrap(),
            commutation[1].to_f64().unwrap(),
            commutation[2].to_f64().unwrap(),
            ids[0].to_f64().unwrap(),
            ids[1].to_f64().unwrap()
        ),
    );
}

/// Criterion 7: the Hölder estimator recovers a synthetic exponent 0.7
/// within ±0.05 and reports ≥ 0.9 for the analytic tuned Arnold density.
#[test]
fn criterion_7_holder_shadow() {
    let mut ok = true;

    // synthetic calibration
    let count = 1 << 13;
    let exponent = hr("0.7");
    let mut positions = Vec::with_capacity(count);
    let mut h = Vec::with_capacity(count);
    let mut phi = Vec::with_capacity(count);
    for k in 0..count {
        let x = Hp::from_usize(k).unwrap() / Hp::from_usize(count).unwrap();
        positions.push(x.clone());
        h.push(Hp::one() + (x.clone() - hr("0.5")).abs().powf(&exponent));
        phi.push(x);
    }
    let scan = holder_exponent_from_samples(&positions, &h, &phi, 32, 3).unwrap();
    let synthetic_slope = match &scan.verdict {
        HolderVerdict::Exponent { slope } => slope.clone(),
        other => panic!("expected exponent verdict, got {other:?}"),
    };
    ok &= (synthetic_slope.clone() - exponent).abs() < hr("0.05");

    // theorem shadow on the tuned analytic map
    let scan = holder_exponent(golden_profile_100k(), 32).unwrap();
    let slope = scan.slope().expect("nonconstant density").clone();
    ok &= slope >= hr("0.9");

    report(
        "7 (Hölder estimator + theorem shadow)",
        ok,
        &format!(
            "synthetic 0.7 recovered as {:.4}; tuned Arnold exponent {:.4} ≥ 0.9",
            synthetic_slope.to_f64().unwrap(),
            slope.to_f64().unwrap()
        ),
    );
}

/// Criterion 8: cross-ratio identities on 10³ random inputs, residual
/// boundedness across all orderings, and exact invariance classes.
#[test]
fn criterion_8_crossratio_suite() {
    let tol = circlelab::prec_tol::<Hp>(5);
    let mut ok = true;

    let wide = (hr("-10"), hr("10"));
    let f = SmoothTestFunction::sine_perturbation(hr("0.85"), wide.clone());
    let g = SmoothTestFunction::exp_fn(wide.clone());
    let fg = SmoothTestFunction::compose(&g, &f);

    let mut state = 0x5DEECE66Du64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64
    };
    // identity Dist = D/D and multiplicativity on 10³ random quadruples
    for _ in 0..1000 {
        let base = next() * 4.0 - 2.0;
        let x1 = Hp::from_f64(base).unwrap();
        let x2 = x1.clone() + Hp::from_f64(next() + 1e-3).unwrap();
        let x3 = x2.clone() + Hp::from_f64(next() + 1e-3).unwrap();
        let x4 = x3.clone() + Hp::from_f64(next() + 1e-3).unwrap();
        let p = FourPoints::new(x1.clone(), x2.clone(), x3.clone(), x4.clone());

        let dist = cross_ratio_distortion(&p, &f).unwrap();
        let d123 = ratio_distortion(&x1, &x2, &x3, &f).unwrap();
        let d143 = ratio_distortion(&x1, &x4, &x3, &f).unwrap();
        ok &= (dist - d123.clone() / d143).abs() < tol;

        let whole = ratio_distortion(&x1, &x2, &x3, &fg).unwrap();
        let outer =
            ratio_distortion(&f.eval(&x1), &f.eval(&x2), &f.eval(&x3), &g).unwrap();
        ok &= (whole - d123 * outer).abs() < tol;
    }
    assert!(ok, "identity failed on random input");

    // normalized residuals bounded on shrinking families, all orderings
    let sq = SmoothTestFunction::exp_fn(wide.clone());
    let mut sup = Hp::zero();
    for j in 1..=24 {
        let t = Hp::two().powi(-j);
        let m0 = hr("0.3");
        let m1 = m0.clone() + t.clone();
        let m2 = m0.clone() + Hp::two() * t.clone();
        for (a, b, c) in [
            (m0.clone(), m1.clone(), m2.clone()),
            (m1.clone(), m0.clone(), m2.clone()),
            (m0.clone(), m2.clone(), m1.clone()),
        ] {
            sup = sup.max_with(&dr_expansion_residual(&a, &b, &c, &sq, &m1).unwrap().abs());
        }
        let p = FourPoints::new(
            m0.clone(),
            m1.clone(),
            m2,
            m0.clone() + hr("3") * t.clone(),
        );
        sup = sup.max_with(&dist_bound_residual(&p, &sq).unwrap());
    }
    ok &= sup < Hp::two();

    // affine and Möbius give Dist ≡ 1
    let affine = SmoothTestFunction::affine(hr("2.5"), hr("-0.3"), wide.clone());
    let mobius = SmoothTestFunction::mobius(hr("11"), wide);
    for tf in [affine, mobius] {
        let p = FourPoints::new(hr("-3"), hr("-1"), hr("2"), hr("5.5"));
        ok &= (cross_ratio_distortion(&p, &tf).unwrap() - Hp::one()).abs() < tol;
    }

    report(
        "8 (cross-ratio suite)",
        ok,
        &format!(
            "identities < 1e-45 on 10³ inputs; residual sup {:.3} bounded; Dist(affine/Möbius) = 1",
            sup.to_f64().unwrap()
        ),
    );
}

/// Criterion 9: identical CLI invocations produce byte-identical output.
#[test]
fn criterion_9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_lab");
    let base = std::env::temp_dir().join(format!("lab-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);

    let run = |dir: &std::path::Path, args: &[&str]| {
        std::fs::create_dir_all(dir).unwrap();
        let out = Command::new(bin).args(args).output().unwrap();
        assert!(
            out.status.success(),
            "lab {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };

    let mut ok = true;
    for pass in ["a", "b"] {
        let dir = base.join(pass);
        let dir_s = dir.to_str().unwrap().to_string();
        run(
            &dir,
            &[
                "tune", "--family", "arnold", "--a", "0.5", "--target", "golden", "--depth",
                "10", "--tol", "1e-9", "--out", &dir_s,
            ],
        );
        let tuned = dir.join("tuned.json");
        run(
            &dir,
            &[
                "denjoy",
                "--tuned",
                tuned.to_str().unwrap(),
                "--n-max",
                "8",
                "--out",
                &dir_s,
            ],
        );
        run(
            &dir,
            &[
                "conjugacy",
                "--tuned",
                tuned.to_str().unwrap(),
                "--samples",
                "5000",
                "--measure-levels",
                "3,5",
                "--out",
                &dir_s,
            ],
        );
        run(&dir, &["report", "--out", &dir_s]);
    }
    for name in [
        "tuned.json",
        "denjoy.json",
        "denjoy.csv",
        "conjugacy.json",
        "conjugacy.csv",
        "holder.txt",
        "report.json",
    ] {
        let a = std::fs::read(base.join("a").join(name)).unwrap();
        let b = std::fs::read(base.join("b").join(name)).unwrap();
        ok &= a == b;
        assert!(ok, "{name} differs between identical runs");
    }
    let _ = std::fs::remove_dir_all(&base);
    report(
        "9 (CLI determinism)",
        ok,
        "tune/denjoy/conjugacy/report byte-identical across reruns",
    );
}
