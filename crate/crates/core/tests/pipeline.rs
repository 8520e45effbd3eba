use std::f64::consts::PI;

use muskat::commands::{cmd_run, cmd_sweep, simple_config, RunRequest, CSV_HEADER};
use muskat::config::InitialData;
use muskat::fluid::FluidConfig;
use muskat::trajectory::Schedule;

fn fluid() -> FluidConfig {
    FluidConfig::new(0.5, 0.2, 1.0, 1.0).unwrap()
}

#[test]
fn csv_rows_match_trajectory() {
    let sch = Schedule { t_end: 0.5, dt: 0.05, snapshot_every: 5, checkpoint_every: None };
    let cfg = simple_config(fluid(), 64, 2.0 * PI, InitialData::SingleMode { k: 2, amplitude: 0.02 }, sch);
    let tmp = tempfile::tempdir().unwrap();
    let (tr, cert) = cmd_run(&cfg, &RunRequest { output_dir: tmp.path().into(), ..Default::default() }).unwrap();
    assert!(cert.is_admissible());
    let csv = std::fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let times: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    let want: Vec<f64> = tr.rows.iter().map(|r| r.t).collect();
    assert_eq!(times, want);
    assert_eq!(times.len(), 3);

    // decaying mode, budget holds
    let f11: Vec<f64> = tr.rows.iter().map(|r| r.plain.f11).collect();
    assert!(f11.windows(2).all(|w| w[1] < w[0]));
    assert!(tr.rows.iter().all(|r| r.budget.iter().flatten().all(|b| b.holds())));

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config_hash"], cfg.hash());
    assert_eq!(meta["nu"].as_f64().unwrap(), cert.nu);
}

#[test]
fn sweep_reports_each_member() {
    let tmp = tempfile::tempdir().unwrap();
    let sch = Schedule { t_end: 0.1, dt: 0.05, snapshot_every: 1, checkpoint_every: None };
    let good = simple_config(fluid(), 32, 2.0 * PI, InitialData::SingleMode { k: 1, amplitude: 0.01 }, sch);
    let tall = simple_config(fluid(), 32, 2.0 * PI, InitialData::SingleMode { k: 1, amplitude: 0.9 }, sch);
    let paths: Vec<_> = [("good.json", &good), ("tall.json", &tall)]
        .iter()
        .map(|(name, c)| {
            let p = tmp.path().join(name);
            std::fs::write(&p, serde_json::to_string(c).unwrap()).unwrap();
            p
        })
        .collect();
    let out = cmd_sweep(&paths, &tmp.path().join("runs"), 1, true).unwrap();
    let codes: Vec<i32> = out.iter().map(|o| o.exit_code).collect();
    assert_eq!(codes, vec![0, 6]);
    assert_ne!(out[0].output_dir, out[1].output_dir);
}
