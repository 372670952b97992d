//! Running a named experiment from Rust and writing its report.

use rigidity_lab::cli::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> rigidity_lab::Result<()> {
    let mut cfg = ExperimentConfig::default_for(ExperimentKind::JensenDensity);
    cfg.output_dir = Some(std::env::temp_dir().join("rigidlab-example"));
    let (report, dir) = run_experiment(&cfg)?;
    for c in &report.checks {
        println!("{}", c.summary_line());
    }
    println!("files in {}: {:?}", dir.display(), report.artifacts);
    Ok(())
}
