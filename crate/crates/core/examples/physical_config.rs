//! Loading a JSON run config built from physical parameters.

use muskat::config::RunConfig;

const CONFIG: &str = r#"{
    "fluid": {
        "h2": 1.0,
        "physical": {"kappa1": 3.0, "kappa2": 1.0, "mu1": 1.2, "mu2": 0.8,
                     "rho1": 1.0, "rho2": 1.5, "g": 1.0}
    },
    "grid": {"n": 64},
    "initial": {"kind": "random_modes", "modes": 6, "amplitude": 0.003, "decay": 0.4},
    "schedule": {"t_end": 1.0, "dt": 0.05, "snapshot_every": 5},
    "seed": 42
}"#;

fn main() -> muskat::Result<()> {
    let cfg = RunConfig::from_json(CONFIG)?;
    let fluid = cfg.fluid()?;
    println!("A_kappa = {}, A_mu = {}, A_rho = {}", fluid.a_kappa, fluid.a_mu, fluid.a_rho);
    println!("config hash {}", cfg.hash());
    let cert = muskat::commands::cmd_certify(&cfg)?;
    print!("{}", cert.table());
    Ok(())
}
