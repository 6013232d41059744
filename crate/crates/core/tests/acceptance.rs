//! Acceptance gate: runs every criterion, prints one
//! `criterion N: PASS|FAIL ...` line each and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use smoothfe_core::bernstein::TriangleGeom;
use smoothfe_core::complexes::{
    complex_spec, verify_bubble_complex, verify_complex, ComplexKind, ComplexReport, ComplexSpec, Verdict,
    VerifyOptions,
};
use smoothfe_core::elements::{build_dofs, check_unisolvence, dof_matrix, ElementSpec, Entity, Family, Frame};
use smoothfe_core::exact_linalg::rank;
use smoothfe_core::lattice::{bubble_dim, enumerate_lattice, geometric_decomposition, s0_dim, s1_dim, SmoothnessPair};
use smoothfe_core::mesh::{test_triangles, Mesh};

fn p(v: i32, e: i32) -> SmoothnessPair {
    SmoothnessPair::new(v, e)
}

fn report(n: usize, pass: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) -> bool {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let ok = pass && in_time;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s{})",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit
            .map(|l| format!(" of {}s allowed", l.as_secs()))
            .unwrap_or_default()
    );
    ok
}

/// Binomial coefficient by the multiplicative formula.
fn choose(n: i64, r: i64) -> i64 {
    if n < 0 || r < 0 || r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_01_polynomial_identity() -> bool {
    let start = Instant::now();
    let bad: Vec<i64> = (1..=20)
        .filter(|&k| 1 - choose(k + 3, 2) + 2 * choose(k + 2, 2) - choose(k + 1, 2) != 0)
        .collect();
    let lib = smoothfe_core::complexes::check_poly_identity(20);
    report(
        1,
        bad.is_empty() && lib,
        &format!("k = 1..20, failures {bad:?}"),
        start.elapsed(),
        Some(Duration::from_secs(1)),
    )
}

/// Classifies every node by brute force: vertex tube, then edge tube, then interior.
fn classify(k: usize, r: SmoothnessPair) -> (usize, usize, usize) {
    let (mut s0, mut s1, mut s2) = (0, 0, 0);
    for a in enumerate_lattice(k) {
        // Distance to vertex i is k - a[i]; to the edge opposite i it is a[i].
        let near_vertex = (0..3).any(|i| (k - a[i]) as i32 <= r.v);
        let near_edge = (0..3).any(|i| a[i] as i32 <= r.e);
        if near_vertex {
            s0 += 1;
        } else if near_edge {
            s1 += 1;
        } else {
            s2 += 1;
        }
    }
    (s0, s1, s2)
}

fn criterion_02_decomposition_census() -> bool {
    let start = Instant::now();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for k in 0..=13usize {
        for rv in -1..=5 {
            for re in -1..=2 {
                let r = p(rv, re);
                if r.check_lattice(k as i64).is_err() {
                    continue;
                }
                checked += 1;
                let (o0, o1, o2) = classify(k, r);
                let dec = geometric_decomposition(k, r).unwrap();
                let closed = (
                    s0_dim(r) as usize,
                    s1_dim(k as i64, r) as usize,
                    bubble_dim(k as i64, r) as usize,
                );
                let built = (dec.s0_len(), dec.s1_len(), dec.s2.len());
                if (o0, o1, o2) != closed || built != closed {
                    mismatches.push((k, r));
                }
            }
        }
    }
    report(
        2,
        mismatches.is_empty() && checked > 0,
        &format!("{checked} admissible parameter sets, mismatches {mismatches:?}"),
        start.elapsed(),
        Some(Duration::from_secs(5)),
    )
}

fn unisolvence_cases() -> Vec<(&'static str, ElementSpec)> {
    let s = |f, k, r1, r2| ElementSpec::new(f, k, r1, r2);
    let none = p(-1, -1);
    vec![
        ("P1", ElementSpec::scalar(1, p(0, 0))),
        ("Hermite", ElementSpec::scalar(3, p(1, 0))),
        ("Argyris", ElementSpec::scalar(5, p(2, 1))),
        ("Bramble-Zlamal", ElementSpec::scalar(9, p(4, 2))),
        ("smooth div", s(Family::VectorDiv, 4, p(1, 0), p(0, -1))),
        ("BDM1", s(Family::VectorDivTn, 1, none, none)),
        ("Stenberg", s(Family::VectorDivTn, 2, p(0, -1), none)),
        ("Hu-Zhang", s(Family::SymDiv, 3, p(0, -1), none)),
        ("divdiv plus", s(Family::SymDivDivPlus, 5, p(1, 0), p(0, 0))),
        (
            "divdiv plus, tangential-normal",
            s(Family::SymDivDivPlus, 3, p(0, -1), none),
        ),
        ("divdiv relaxed", s(Family::SymDivDivRelaxed, 3, p(0, -1), none)),
    ]
}

fn unisolvence_lines() -> Vec<(bool, String)> {
    let triangles = test_triangles(3, 20_240_601);
    unisolvence_cases()
        .into_iter()
        .map(|(name, spec)| match build_dofs(&spec) {
            Err(e) => (false, format!("{name} [{spec}]: {e}")),
            Ok(d) => {
                let verdicts: Vec<_> = triangles.iter().map(|t| check_unisolvence(&d, t).unwrap()).collect();
                let ok = verdicts.iter().all(|v| v.square && v.nonsingular);
                (
                    ok,
                    format!(
                        "{name} [{spec}]: {}x{} {:?}",
                        verdicts[0].rows,
                        verdicts[0].cols,
                        verdicts.iter().map(|v| v.rank).collect::<Vec<_>>()
                    ),
                )
            }
        })
        .collect()
}

fn criterion_03_unisolvence_suite() -> bool {
    let start = Instant::now();
    let lines = unisolvence_lines();
    let failed: Vec<&String> = lines.iter().filter(|(ok, _)| !ok).map(|(_, s)| s).collect();
    for (ok, s) in &lines {
        println!("  {} {s}", if *ok { "ok  " } else { "FAIL" });
    }
    report(
        3,
        failed.is_empty(),
        &format!("{} elements on 4 triangles, failing: {failed:?}", lines.len()),
        start.elapsed(),
        Some(Duration::from_secs(120)),
    )
}

fn derham_rows() -> Vec<(SmoothnessPair, SmoothnessPair, usize)> {
    vec![
        (p(-1, -1), p(-1, -1), 1),
        (p(1, 0), p(0, -1), 4),
        (p(1, 0), p(0, 0), 4),
        (p(0, -1), p(-1, -1), 2),
        (p(-1, -1), p(0, 0), 4),
    ]
}

fn derham_reports() -> Vec<ComplexReport> {
    let mut out = Vec::new();
    for mesh in ["builtin:square-diagonal-1", "builtin:square-crisscross-1"] {
        let m = Mesh::builtin(mesh).unwrap();
        for (r1, r2, k) in derham_rows() {
            let cs = complex_spec(ComplexKind::Derham, k, r1, r2, mesh);
            out.push(verify_complex(&cs, &m, &VerifyOptions::default()).unwrap());
        }
    }
    out
}

fn derham_ok(r: &ComplexReport) -> bool {
    r.verdict == Verdict::Exact
        && r.check("zero_compositions") == Some(true)
        && r.kernel.observed == 1
        && r.check("last_surjective") == Some(true)
        && r.alternating_sum == 0
}

fn criterion_04_derham_exactness() -> bool {
    let start = Instant::now();
    let reports = derham_reports();
    let mut ok = reports.iter().all(derham_ok);
    let fn3 = &reports[1];
    ok &= fn3.dims() == vec![29, 46, 18];
    let summary: Vec<String> = reports
        .iter()
        .map(|r| format!("{} k={} {:?} {:?}", r.spec.mesh, r.spec.k, r.dims(), r.verdict))
        .collect();
    for s in &summary {
        println!("  {s}");
    }
    report(
        4,
        ok,
        &format!("{} complexes, smooth-div row dims {:?}", reports.len(), fn3.dims()),
        start.elapsed(),
        Some(Duration::from_secs(300)),
    )
}

fn bubble_sets() -> Vec<(usize, SmoothnessPair, SmoothnessPair)> {
    vec![
        (4, p(1, 0), p(0, -1)),
        (5, p(1, 0), p(0, -1)),
        (1, p(-1, -1), p(-1, -1)),
        (2, p(0, -1), p(-1, -1)),
        (4, p(1, 0), p(0, 0)),
        (4, p(-1, -1), p(0, 0)),
    ]
}

/// Dimension of the div bubbles as the null space of the boundary functionals.
fn div_bubble_dim(k: usize, r1: SmoothnessPair, r2: SmoothnessPair) -> usize {
    let d = build_dofs(&ElementSpec::new(Family::VectorDiv, k, r1, r2)).unwrap();
    let m = dof_matrix(&d, &Frame::local(TriangleGeom::reference())).unwrap();
    let boundary: Vec<usize> = (0..d.len())
        .filter(|&i| d.functionals[i].entity != Entity::Interior)
        .collect();
    m.cols() - rank(&m.select_rows(&boundary))
}

fn bubble_reports() -> Vec<ComplexReport> {
    bubble_sets()
        .into_iter()
        .map(|(k, r1, r2)| {
            let cs = complex_spec(ComplexKind::Bubble, k, r1, r2, "builtin:reference-triangle");
            verify_bubble_complex(&cs, &VerifyOptions::default()).unwrap()
        })
        .collect()
}

fn criterion_05_bubble_complex() -> bool {
    let start = Instant::now();
    let reports = bubble_reports();
    let mut ok = reports[0].dims() == vec![0, 6, 7, 1] && reports[0].alternating_sum == 0;
    for ((k, r1, r2), r) in bubble_sets().into_iter().zip(&reports) {
        let lhs = div_bubble_dim(k, r1, r2) as i64;
        let rhs = enumerate_bubbles(k as i64 - 1, r2) + enumerate_bubbles(k as i64 + 1, r1.shifted(1)) - 1;
        ok &= lhs == rhs && r.verdict == Verdict::Exact;
        println!(
            "  k={k} r1={r1} r2={r2}: dims {:?}, div bubbles {lhs} = {rhs}, {:?}",
            r.dims(),
            r.verdict
        );
    }
    report(
        5,
        ok,
        &format!("dims {:?} and 6 dimension identities", reports[0].dims()),
        start.elapsed(),
        Some(Duration::from_secs(30)),
    )
}

/// Interior node count by direct enumeration.
fn enumerate_bubbles(k: i64, r: SmoothnessPair) -> i64 {
    if k < 0 {
        return 0;
    }
    let k = k as usize;
    enumerate_lattice(k)
        .into_iter()
        .filter(|a| (0..3).all(|i| (k - a[i]) as i32 > r.v && a[i] as i32 > r.e))
        .count() as i64
}

fn elasticity_reports() -> Vec<ComplexReport> {
    let m = Mesh::builtin("builtin:square-diagonal-1").unwrap();
    [ComplexKind::Elasticity, ComplexKind::ElasticityRotated]
        .into_iter()
        .map(|kind| {
            let cs = complex_spec(kind, 3, p(0, -1), p(-1, -1), "builtin:square-diagonal-1");
            verify_complex(&cs, &m, &VerifyOptions::default()).unwrap()
        })
        .collect()
}

fn criterion_06_elasticity() -> bool {
    let start = Instant::now();
    let r = elasticity_reports();
    let ok = r[0].verdict == Verdict::Exact
        && r[0].kernel.expected == 3
        && r[0].dims() == vec![29, 50, 24]
        && r[0].alternating_sum == 0
        && r[1].verdict == r[0].verdict
        && r[1].dims() == r[0].dims();
    report(
        6,
        ok,
        &format!(
            "elasticity {} / {:?} {:?}, hessian {:?} {:?}",
            r[0].kernel.expected,
            r[0].dims(),
            r[0].verdict,
            r[1].dims(),
            r[1].verdict
        ),
        start.elapsed(),
        None,
    )
}

fn divdiv_runs() -> Vec<(String, Result<ComplexReport, String>)> {
    let m = Mesh::builtin("builtin:square-diagonal-1").unwrap();
    let cases = [
        (ComplexKind::DivdivPlus, 5, p(1, 0), p(0, 0)),
        (ComplexKind::DivdivBdmStart, 3, p(0, -1), p(-1, -1)),
        (ComplexKind::DivdivRelaxed, 3, p(0, -1), p(-1, -1)),
    ];
    cases
        .into_iter()
        .map(|(kind, k, r1, r2)| {
            let cs = complex_spec(kind, k, r1, r2, "builtin:square-diagonal-1");
            let name = format!("{kind} k={k} r1={r1} r2={r2}");
            (
                name,
                verify_complex(&cs, &m, &VerifyOptions::default()).map_err(|e| e.to_string()),
            )
        })
        .collect()
}

fn criterion_07_divdiv() -> bool {
    let start = Instant::now();
    let runs = divdiv_runs();
    let mut ok = true;
    let mut failing = Vec::new();
    for (name, r) in &runs {
        let pass = match r {
            Ok(r) => {
                r.verdict == Verdict::Exact
                    && r.kernel.expected == 3
                    && r.kernel.observed == 3
                    && r.check("zero_compositions") == Some(true)
                    && r.check("last_surjective") == Some(true)
            }
            Err(_) => false,
        };
        ok &= pass;
        if !pass {
            failing.push(name.clone());
        }
        match r {
            Ok(r) => println!(
                "  {} {name}: dims {:?} {:?}",
                if pass { "ok  " } else { "FAIL" },
                r.dims(),
                r.verdict
            ),
            Err(e) => println!("  FAIL {name}: {e}"),
        }
    }
    report(
        7,
        ok,
        &format!("three divdiv complexes, failing: {failing:?}"),
        start.elapsed(),
        Some(Duration::from_secs(600)),
    )
}

fn curldiv_report() -> ComplexReport {
    let m = Mesh::builtin("builtin:square-diagonal-1").unwrap();
    let cs = ComplexSpec {
        r3: Some(p(-1, -1)),
        ..complex_spec(ComplexKind::Curldiv, 4, p(1, 0), p(1, 0), "builtin:square-diagonal-1")
    };
    verify_complex(&cs, &m, &VerifyOptions::default()).unwrap()
}

fn criterion_08_curldiv() -> bool {
    let start = Instant::now();
    let r = curldiv_report();
    let ok = r.verdict == Verdict::Exact && r.spaces.len() == 4 && r.kernel.observed == 1;
    report(
        8,
        ok,
        &format!("dims {:?}, kernel {}, {:?}", r.dims(), r.kernel.observed, r.verdict),
        start.elapsed(),
        None,
    )
}

fn criterion_09_mutation_flips_both_conditions() -> bool {
    let start = Instant::now();
    let m = Mesh::builtin("builtin:square-diagonal-1").unwrap();
    let specs = [
        complex_spec(ComplexKind::Derham, 4, p(1, 0), p(0, -1), "builtin:square-diagonal-1"),
        complex_spec(
            ComplexKind::Elasticity,
            3,
            p(0, -1),
            p(-1, -1),
            "builtin:square-diagonal-1",
        ),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for cs in &specs {
        let base = verify_complex(cs, &m, &VerifyOptions::default()).unwrap();
        let mutated = verify_complex(
            cs,
            &m,
            &VerifyOptions {
                mutate_last_interior: true,
                ..Default::default()
            },
        )
        .unwrap();
        let link = |r: &ComplexReport| r.check(&format!("exact_at_space_{}", r.links.len()));
        let surj = |r: &ComplexReport| r.check("last_surjective");
        ok &= surj(&base) == Some(true) && link(&base) == Some(true);
        ok &= surj(&mutated) == Some(false) && link(&mutated) == Some(false);
        ok &= base.alternating_sum == 0 && mutated.alternating_sum == 0;
        detail.push(format!(
            "{}: surjective {:?}->{:?}, ker=img {:?}->{:?}",
            cs.kind,
            surj(&base),
            surj(&mutated),
            link(&base),
            link(&mutated)
        ));
    }
    report(9, ok, &detail.join("; "), start.elapsed(), None)
}

fn all_reports() -> Vec<String> {
    let mut out: Vec<String> = unisolvence_lines()
        .into_iter()
        .map(|(ok, s)| format!("{ok} {s}"))
        .collect();
    let json = |r: &ComplexReport| serde_json::to_string(r).unwrap();
    out.extend(derham_reports().iter().map(json));
    out.extend(bubble_reports().iter().map(json));
    out.extend(elasticity_reports().iter().map(json));
    out.extend(divdiv_runs().into_iter().map(|(n, r)| match r {
        Ok(r) => json(&r),
        Err(e) => format!("{n}: {e}"),
    }));
    out.push(json(&curldiv_report()));
    out
}

fn criterion_10_determinism() -> bool {
    let start = Instant::now();
    let a = all_reports();
    let b = all_reports();
    let bytes: usize = a.iter().map(String::len).sum();
    report(
        10,
        a == b,
        &format!("{} reports, {bytes} bytes compared", a.len()),
        start.elapsed(),
        None,
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> bool; 10] = [
        criterion_01_polynomial_identity,
        criterion_02_decomposition_census,
        criterion_03_unisolvence_suite,
        criterion_04_derham_exactness,
        criterion_05_bubble_complex,
        criterion_06_elasticity,
        criterion_07_divdiv,
        criterion_08_curldiv,
        criterion_09_mutation_flips_both_conditions,
        criterion_10_determinism,
    ];
    let passed = criteria.iter().filter(|c| c()).count();
    println!("acceptance: {passed} of {} criteria pass", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
