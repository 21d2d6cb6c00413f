use holotrace::config::{ExperimentKind, ExperimentSpec, ScenarioSpec, TargetChoice};
use holotrace::sweep::{run_sweep, target_geometry};
use holotrace_core::trial::{spoof_offset, Method};

fn experiment(kind: ExperimentKind, methods: &[&str], axis: &[f64]) -> ExperimentSpec {
    ExperimentSpec {
        kind,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        targets: vec![TargetChoice::Primary],
        trials: 3,
        powers_dbm: if kind == ExperimentKind::Power { axis.to_vec() } else { vec![] },
        sigmas_ue_m: if kind == ExperimentKind::Uncertainty { axis.to_vec() } else { vec![] },
        sigma_sp_m: 0.1,
        power_dbm: Some(35.0),
        coverage_radius_m: Some(150.0),
    }
}

#[test]
fn non_spoofing_methods_run_only_for_the_first_target() {
    let base = ScenarioSpec::reference().trial_config(false, 0).unwrap();
    let mut exp = experiment(ExperimentKind::Power, &["no_spoof", "oht"], &[35.0]);
    exp.targets = vec![TargetChoice::Primary, TargetChoice::Behind];
    exp.trials = 2;
    let report = run_sweep(&base, &exp, exp.trials).unwrap();
    let keys: Vec<(&str, &str)> = report.points.iter().map(|p| (p.summary.method.tag(), p.target.tag())).collect();
    assert_eq!(keys, [("no_spoof", "primary"), ("oht", "primary"), ("oht", "behind")]);
    let behind = report.point(Method::Oracle, TargetChoice::Behind, 35.0).unwrap();
    assert!((behind.eps_off_m - spoof_offset(&base.truth, &base.target)).abs() < 1e-9);
    assert!(behind.summary.rmse_dev_m < 0.1);
}

#[test]
fn behind_target_lies_on_the_bs_ue_ray() {
    let base = ScenarioSpec::reference().trial_config(false, 0).unwrap();
    let g = target_geometry(&base, TargetChoice::Behind).unwrap();
    let (u, t) = (base.truth.ue.position, g.ue.position);
    let cross = u[0] * t[1] - u[1] * t[0];
    assert!(cross.abs() < 1e-9);
    assert!(t[0].hypot(t[1]) > u[0].hypot(u[1]));
    let shift = [t[0] - u[0], t[1] - u[1]];
    let sp = [base.truth.scatter_points[0][0] + shift[0], base.truth.scatter_points[0][1] + shift[1]];
    assert!((g.scatter_points[0][0] - sp[0]).abs() < 1e-12 && (g.scatter_points[0][1] - sp[1]).abs() < 1e-12);
}

#[test]
fn zero_uncertainty_matches_the_power_sweep_point() {
    let base = ScenarioSpec::reference().trial_config(false, 0).unwrap();
    let mut power = experiment(ExperimentKind::Power, &["oht"], &[35.0]);
    power.coverage_radius_m = Some(150.0);
    let mut unc = experiment(ExperimentKind::Uncertainty, &["oht"], &[0.0]);
    unc.sigma_sp_m = 0.0;
    let a = run_sweep(&base, &power, 3).unwrap();
    let b = run_sweep(&base, &unc, 3).unwrap();
    let (pa, pb) = (&a.points[0], &b.points[0]);
    assert_eq!(pa.summary.rmse_est_m, pb.summary.rmse_est_m);
    assert_eq!(pa.summary.rmse_dev_m, pb.summary.rmse_dev_m);
    assert_eq!(a.axis_name, "tx_power_dbm");
    assert_eq!(b.axis_name, "sigma_ue_m");
}

#[test]
fn counts_add_up_to_the_trial_count() {
    let base = ScenarioSpec::reference().trial_config(false, 3).unwrap();
    let exp = experiment(ExperimentKind::Power, &["no_spoof", "bht", "aobht"], &[20.0]);
    let report = run_sweep(&base, &exp, 3).unwrap();
    for row in report.summary_rows() {
        assert_eq!(row.valid + row.no_estimate + row.degenerate + row.out_of_coverage + row.failed, row.trials);
        if row.valid == 0 {
            assert_eq!(row.rmse_est_m, None);
        }
    }
    assert_eq!(report.deviation_rows().len(), 3 * 2);
}
