use std::fs;

use bohrlab::harness::{
    replay_trial, run_campaign_with_threads, CampaignConfig, OutputSpec, Report, ReportFormat, Suite,
};
use bohrlab::zoo::{convex_model, gen_schur_matrix_seeded, mobius, SchurOptions};
use bohrlab::{CMatrix, Complex64, MatrixSeries, PolyOrder, RadiusFamily, ScalarSeries, TailBound};

fn strip_time(mut r: Report) -> Report {
    r.wall_time_secs = 0.0;
    r
}

#[test]
fn reports_are_deterministic() {
    for suite in [
        Suite::VonNeumann,
        Suite::Polyanalytic {
            family: RadiusFamily::ConvexSub {
                beta: 1.0,
                k: 0.5,
                p: PolyOrder::Finite(3),
            },
        },
    ] {
        let mut cfg = CampaignConfig::new(suite, 10, 9).unwrap();
        cfg.degree = 32;
        let a = strip_time(run_campaign_with_threads(&cfg, Some(1)).unwrap());
        let b = strip_time(run_campaign_with_threads(&cfg, Some(3)).unwrap());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.all_passed());
    }
}

#[test]
fn different_seeds_differ() {
    let cfg = CampaignConfig::new(Suite::Subordination, 4, 1).unwrap();
    let mut other = cfg.clone();
    other.seed = 2;
    let a = run_campaign_with_threads(&cfg, Some(1)).unwrap();
    let b = run_campaign_with_threads(&other, Some(1)).unwrap();
    assert_ne!(a.trials[0].instance_seed, b.trials[0].instance_seed);
}

#[test]
fn failures_are_written_for_replay() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = CampaignConfig::new(Suite::Schwarz, 40, 3).unwrap();
    // Beyond 1/3 the Schwarz-type bound fails for products with extra zeros.
    cfg.explore = true;
    cfg.r_grid = vec![0.2, 0.9];
    cfg.degree = 48;
    cfg.output = Some(OutputSpec::new(dir.path().join("run.json"), ReportFormat::Json));
    let report = run_campaign_with_threads(&cfg, Some(2)).unwrap();
    assert!(report.summary.fail_count > 0);
    assert_eq!(report.summary.pass_count + report.summary.fail_count, 40);

    let failed = report.failures().next().unwrap();
    assert_eq!(failed.worst_r, Some(0.9));
    let file = failed.instance_file.as_ref().unwrap();
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(doc["instance_seed"], failed.instance_seed);
    let phi: MatrixSeries = serde_json::from_value(doc["instance"]["phi"].clone()).unwrap();
    let recomputed = 0.9 - phi.bohr_sum(0.9).unwrap().hi();
    assert!((recomputed - failed.worst_margin.unwrap()).abs() < 1e-15);

    let (again, _) = replay_trial(&cfg, failed.trial).unwrap();
    assert_eq!(again.worst_margin, failed.worst_margin);

    report.write(cfg.output.as_ref().unwrap()).unwrap();
    let text = fs::read_to_string(dir.path().join("run.json")).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back.summary, report.summary);
}

#[test]
fn csv_report_has_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig::new(Suite::CoefficientBound, 7, 5).unwrap();
    let report = run_campaign_with_threads(&cfg, Some(1)).unwrap();
    let out = OutputSpec::new(dir.path().join("nested/out.csv"), ReportFormat::Csv);
    report.write(&out).unwrap();
    let mut rdr = csv::Reader::from_path(&out.path).unwrap();
    assert_eq!(rdr.headers().unwrap().get(3), Some("worst_margin"));
    assert_eq!(rdr.records().count(), 7);
}

/// With `φ = z` the subordinate equals `g`, and margins vanish exactly.
#[test]
fn identity_self_map_is_equality() {
    let g = gen_schur_matrix_seeded(11, 3, 64, SchurOptions::default()).unwrap();
    let f = g.compose(&ScalarSeries::identity(64)).unwrap();
    assert_eq!(f.coeffs(), g.coeffs());
}

/// `g = z/(1 − z)`, `φ = z²`: the subordinate has majorant `Σ r^{2n}`.
#[test]
fn even_subordinate_majorant() {
    let g = convex_model(1.0, 1, 64).unwrap();
    let mut c = vec![Complex64::new(0.0, 0.0); 65];
    c[2] = Complex64::new(1.0, 0.0);
    let phi = ScalarSeries::new(&c, Some(TailBound::constant(0.0))).unwrap();
    let f = g.compose(&phi).unwrap();
    for r in [0.1f64, 0.2, 1.0 / 3.0] {
        let want: f64 = (1..=32).map(|n| r.powi(2 * n)).sum();
        let got = f.bohr_sum(r).unwrap().lo();
        assert!((got - want).abs() < 1e-15);
        assert!(got <= g.bohr_sum(r).unwrap().lo());
    }
}

/// `M_{1/3}` of a Möbius map equals `a + (1 − a²)/(3 − a)` and stays below 1.
#[test]
fn mobius_at_one_third() {
    for a in [0.1, 0.5, 0.9, 0.99] {
        let f = mobius(Complex64::new(a, 0.0), 128).unwrap();
        let m = f.bohr_sum(1.0 / 3.0).unwrap();
        let want = a + (1.0 - a * a) / (3.0 - a);
        assert!(m.lo() <= want + 1e-15 && m.hi() >= want - 1e-15);
        assert!(m.hi() <= 1.0);
    }
}

/// `h ≡ 2I` doubles the subordination bound.
#[test]
fn constant_factor_scales_margin() {
    let g = gen_schur_matrix_seeded(4, 2, 64, SchurOptions::default()).unwrap();
    let h = MatrixSeries::constant(2, 64, Complex64::new(2.0, 0.0));
    let f = h.mul(&g).unwrap();
    for r in [0.1, 0.3] {
        let lhs = f.bohr_sum(r).unwrap().lo();
        assert!((lhs - 2.0 * g.bohr_sum(r).unwrap().lo()).abs() < 1e-13);
    }
    assert_eq!(h.coeff(0), &CMatrix::scalar(2, Complex64::new(2.0, 0.0)));
}
