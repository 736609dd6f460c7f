//! Drives the command runner from an inline TOML configuration, as the
//! `respoles` binary does from a file, and prints what it wrote.

use resonance_poles::cli::{run_command, Command, RunConfig};

const CONFIG: &str = r#"
[crystal]
radius = 0.3
eps_rod = 9.0
polarization = "H-parallel"

[contour]
kind = "circle"
center = [2.53, -0.28]
radius = 0.15
nodes = 48
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::parse(CONFIG)?;
    let dir = std::env::temp_dir().join("respoles-run-config");
    for command in [Command::FindPole, Command::RefinePole] {
        let files = run_command(command, &config, &dir)?;
        for f in files.iter().filter(|f| f.extension().is_some_and(|e| e == "json")) {
            println!("{}:\n{}", f.display(), std::fs::read_to_string(f)?);
        }
    }

    let broken = CONFIG.replace("H-parallel", "TE");
    match RunConfig::parse(&broken) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
