//! Bit-exact restart: run halfway with checkpoints, resume, compare.

use muskat::commands::{cmd_run, simple_config, RunRequest};
use muskat::config::InitialData;
use muskat::fluid::FluidConfig;
use muskat::trajectory::Schedule;

fn main() -> muskat::Result<()> {
    let fluid = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    let sch = Schedule { t_end: 1.0, dt: 0.05, snapshot_every: 2, checkpoint_every: Some(10) };
    let cfg = simple_config(fluid, 64, 2.0 * std::f64::consts::PI, InitialData::SingleMode { k: 2, amplitude: 0.02 }, sch);
    let root = std::env::temp_dir().join("muskat-restart-example");
    let (a, b) = (root.join("full"), root.join("resumed"));

    cmd_run(&cfg, &RunRequest { output_dir: a.clone(), ..Default::default() })?;
    std::fs::create_dir_all(&b)?;
    std::fs::copy(a.join("trajectory.csv"), b.join("trajectory.csv"))?;
    let cp = a.join("checkpoint_0000000010.json");
    cmd_run(&cfg, &RunRequest { output_dir: b.clone(), resume: Some(cp), ..Default::default() })?;

    for file in ["trajectory.csv", "metadata.json"] {
        let same = std::fs::read(a.join(file))? == std::fs::read(b.join(file))?;
        println!("{file}: {}", if same { "identical" } else { "DIFFERENT" });
    }
    Ok(())
}
