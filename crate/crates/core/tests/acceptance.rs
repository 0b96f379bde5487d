//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::process::ExitCode;
use std::time::Instant;

use bohrlab::harness::{run_campaign, run_sharpness_scan, threshold_trend, CampaignConfig, Report, Suite};
use bohrlab::{solve_radius, FamilyKind, FamilyParams, PolyOrder, RadiusFamily, DEFAULT_TOL};

const ALGEBRA_TOL: f64 = 1e-10;
const CAMPAIGN_TOL: f64 = 1e-8;
const ROOT_WIDTH: f64 = 1e-12;
const LIMIT_TOL: f64 = 1e-9;
const THRESHOLD_TOL: f64 = 1e-6;
const COMPOSITION_TOL: f64 = 1e-10;
const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn campaign(suite: Suite, trials: usize, dim: usize, degree: usize, tol: f64) -> Report {
    let mut cfg = CampaignConfig::new(suite, trials, SEED).expect("valid suite");
    cfg.dim = dim;
    cfg.degree = degree;
    cfg.tolerance = tol;
    run_campaign(&cfg).expect("campaign runs")
}

fn describe(reports: &[Report]) -> Outcome {
    let trials: usize = reports.iter().map(|r| r.trials.len()).sum();
    let failures: usize = reports.iter().map(|r| r.summary.fail_count).sum();
    let min = reports
        .iter()
        .filter_map(|r| r.summary.min_margin)
        .fold(f64::INFINITY, f64::min);
    outcome(failures == 0, format!("{trials} trials, {failures} failures, min margin {min:.3e}"))
}

fn c1_algebra() -> Outcome {
    describe(&[campaign(Suite::Algebra, 1000, 4, 32, ALGEBRA_TOL)])
}

fn c2_schwarz() -> Outcome {
    describe(&[campaign(Suite::Schwarz, 500, 1, 64, CAMPAIGN_TOL)])
}

fn c3_subordination() -> Outcome {
    describe(&[campaign(Suite::Subordination, 500, 3, 64, CAMPAIGN_TOL)])
}

fn c4_quasi() -> Outcome {
    let reports: Vec<Report> = [(1.0, 1.0), (1.5, 0.9), (2.0, 0.5)]
        .into_iter()
        .map(|(bound, beta)| campaign(Suite::QuasiSubordination { bound, beta }, 200, 3, 64, CAMPAIGN_TOL))
        .collect();
    describe(&reports)
}

fn c5_von_neumann() -> Outcome {
    describe(&[campaign(Suite::VonNeumann, 500, 3, 64, CAMPAIGN_TOL)])
}

fn c6_coefficients() -> Outcome {
    describe(&[campaign(Suite::CoefficientBound, 500, 3, 64, CAMPAIGN_TOL)])
}

fn c7_exact_roots() -> Outcome {
    let mut problems = Vec::new();
    let og = RadiusFamily::OmegaGamma {
        gamma: 0.0,
        k: 1.0,
        p: PolyOrder::Finite(2),
    };
    let res = solve_radius(&og, ROOT_WIDTH).unwrap();
    let b = res.bracket.expect("bracket");
    if !(b.contains(2f64.sqrt() - 1.0) && b.width() <= ROOT_WIDTH) {
        problems.push(format!("bracket [{}, {}]", b.lo, b.hi));
    }
    if res.radius != 1.0 / 3.0 {
        problems.push(format!("radius {}", res.radius));
    }
    let mut check = |name: &str, got: f64, want: f64| {
        if (got - want).abs() > 1e-15 {
            problems.push(format!("{name}: cap {got}, expected {want}"));
        }
    };
    let k1 = |kind: FamilyKind, params: FamilyParams| kind.with_params(&params).unwrap().cap();
    check("disk", k1(FamilyKind::ConvexSub, FamilyParams::default()), 1.0 / 3.0);
    for (gamma, want) in [(0.0, 1.0 / 3.0), (0.25, 5.0 / 13.0), (0.5, 3.0 / 7.0)] {
        let params = FamilyParams {
            gamma,
            ..Default::default()
        };
        check(&format!("omega_gamma {gamma}"), k1(FamilyKind::OmegaGamma, params), want);
    }
    check("half_plane", k1(FamilyKind::HalfPlane, FamilyParams::default()), 0.5);
    let pass = problems.is_empty();
    outcome(
        pass,
        if pass {
            format!("sqrt(2)-1 in [{:.13}, {:.13}], radius 1/3, caps exact", b.lo, b.hi)
        } else {
            problems.join("; ")
        },
    )
}

fn root(family: &RadiusFamily) -> f64 {
    solve_radius(family, DEFAULT_TOL)
        .unwrap()
        .root
        .unwrap_or(f64::INFINITY)
}

fn c8_root_structure() -> Outcome {
    let ks = [0.25, 0.5, 1.0];
    let ps: Vec<PolyOrder> = (2..=8).map(PolyOrder::Finite).collect();
    let mut problems = Vec::new();
    let mut solved = 0;
    let tol = DEFAULT_TOL;

    // Every family instance on the grid with a positive product has a root.
    let mut grid: Vec<(FamilyKind, FamilyParams)> = Vec::new();
    for &k in &ks {
        for &p in &ps {
            let base = FamilyParams {
                k,
                p,
                ..Default::default()
            };
            for lambda in [0.5, 1.0, 2.0] {
                grid.push((FamilyKind::GeneralSc, FamilyParams { lambda, ..base }));
            }
            for gamma in [0.0, 0.25, 0.5] {
                grid.push((FamilyKind::OmegaGamma, FamilyParams { gamma, ..base }));
            }
            for beta in [0.5, 1.0, 2.0] {
                grid.push((FamilyKind::ConvexSub, FamilyParams { beta, ..base }));
            }
            grid.push((FamilyKind::HalfPlane, base));
            grid.push((FamilyKind::StarlikeSub, base));
        }
    }
    for (kind, params) in &grid {
        let fam = kind.with_params(params).unwrap();
        let res = solve_radius(&fam, tol).unwrap();
        match res.bracket {
            Some(b) if b.lo > 0.0 && b.hi < 1.0 => {
                let (flo, fhi) = (fam.lhs(b.lo).unwrap(), fam.lhs(b.hi).unwrap());
                if flo * fhi > 0.0 {
                    problems.push(format!("{fam:?}: no sign change across bracket"));
                }
                solved += 1;
            }
            _ => problems.push(format!("{fam:?}: no root")),
        }
    }

    // Monotone non-increasing along each axis.
    let mut monotone = |label: &str, seq: Vec<f64>| {
        if seq.windows(2).any(|w| w[1] > w[0] + tol) {
            problems.push(format!("{label} not monotone: {seq:?}"));
        }
    };
    for kind in FamilyKind::ALL {
        for &p in &ps {
            let seq = ks
                .iter()
                .map(|&k| {
                    root(
                        &kind
                            .with_params(&FamilyParams {
                                k,
                                p,
                                ..Default::default()
                            })
                            .unwrap(),
                    )
                })
                .collect();
            monotone(&format!("{kind} in k at p={p}"), seq);
        }
        for &k in &ks {
            let seq = ps
                .iter()
                .map(|&p| {
                    root(
                        &kind
                            .with_params(&FamilyParams {
                                k,
                                p,
                                ..Default::default()
                            })
                            .unwrap(),
                    )
                })
                .collect();
            monotone(&format!("{kind} in p at k={k}"), seq);
        }
    }
    for &k in &ks {
        for &p in &ps {
            let base = FamilyParams {
                k,
                p,
                ..Default::default()
            };
            let seq = [0.5, 1.0, 2.0]
                .iter()
                .map(|&lambda| root(&FamilyKind::GeneralSc.with_params(&FamilyParams { lambda, ..base }).unwrap()))
                .collect();
            monotone(&format!("general_sc in lambda at k={k}, p={p}"), seq);
            let seq = [0.5, 1.0, 2.0]
                .iter()
                .map(|&beta| root(&FamilyKind::ConvexSub.with_params(&FamilyParams { beta, ..base }).unwrap()))
                .collect();
            monotone(&format!("convex_sub in beta at k={k}, p={p}"), seq);
        }
    }

    // p = 60 against the p → ∞ limit at k = λ = 1, for every family.
    let mut worst_gap: f64 = 0.0;
    for kind in FamilyKind::ALL {
        let fam = kind.with_params(&FamilyParams::default()).unwrap();
        let gap = (root(&fam.with_order(PolyOrder::Finite(60))) - root(&fam.with_order(PolyOrder::Unbounded))).abs();
        worst_gap = worst_gap.max(gap);
        if gap > LIMIT_TOL {
            problems.push(format!("{kind}: |root(60) - root(inf)| = {gap:e}"));
        }
    }
    let pass = problems.is_empty();
    outcome(
        pass,
        if pass {
            format!(
                "{solved} roots bracketed, monotone in k, lambda, beta, p; max |root(60) - root(inf)| = {worst_gap:.1e}"
            )
        } else {
            problems.join("; ")
        },
    )
}

fn c9_polyanalytic() -> Outcome {
    let mut families = Vec::new();
    for p in [2, 3, 5] {
        for k in [0.25, 0.5, 1.0] {
            let p = PolyOrder::Finite(p);
            families.push(RadiusFamily::general(1.0, k, p));
            for beta in [0.5, 1.0] {
                families.push(RadiusFamily::ConvexSub { beta, k, p });
            }
            families.push(RadiusFamily::StarlikeSub { k, p });
        }
    }
    let reports: Vec<Report> = families
        .into_iter()
        .map(|family| campaign(Suite::Polyanalytic { family }, 200, 3, 64, CAMPAIGN_TOL))
        .collect();
    let mut out = describe(&reports);
    out.detail = format!("{} families; {}", reports.len(), out.detail);
    out
}

fn c10_sharpness() -> Outcome {
    let scan = run_sharpness_scan(0.99, 0.30, 0.34, 41).unwrap();
    let exceeds = scan.first_exceed.is_some_and(|r| r <= 0.34);
    let trend = threshold_trend(&[0.9, 0.99, 0.999], 0.30, 0.40, 101).unwrap();
    let errors: Vec<f64> = trend
        .scans
        .iter()
        .map(|s| s.threshold.map_or(f64::INFINITY, |t| (t - s.predicted).abs()))
        .collect();
    let close = errors.iter().all(|e| *e <= THRESHOLD_TOL);
    let pass = exceeds && close && trend.decreasing_to_third;
    let thresholds: Vec<String> = trend
        .scans
        .iter()
        .map(|s| format!("{:.8}", s.threshold.unwrap_or(f64::NAN)))
        .collect();
    outcome(
        pass,
        format!(
            "a=0.99 first M_r > 1 at r={}; thresholds [{}], max error {:.1e}, decreasing to 1/3: {}",
            scan.first_exceed.map_or("none".into(), |r| r.to_string()),
            thresholds.join(", "),
            errors.iter().cloned().fold(0.0, f64::max),
            trend.decreasing_to_third
        ),
    )
}

fn c11_composition() -> Outcome {
    describe(&[campaign(Suite::Composition, 100, 3, 64, COMPOSITION_TOL)])
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Bohr operator algebra", c1_algebra),
        ("self-maps fixing the origin", c2_schwarz),
        ("subordination", c3_subordination),
        ("quasi-subordination", c4_quasi),
        ("von Neumann type", c5_von_neumann),
        ("coefficient bound", c6_coefficients),
        ("exact roots and caps", c7_exact_roots),
        ("root structure", c8_root_structure),
        ("polyanalytic radii", c9_polyanalytic),
        ("sharpness of 1/3", c10_sharpness),
        ("composition oracle", c11_composition),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!(
            "criterion {:>2} [{}] {name}: {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
