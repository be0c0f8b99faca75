//! Drive an experiment from a TOML config and write its report and grid CSVs.

use lipflow::experiment::{run_and_report, ExperimentConfig, Subcommand};

const CONFIG: &str = r#"
flow = "logistic"
points = 30
seed = 7
window = 10.0
m_max = 10
"#;

fn main() -> lipflow::Result<()> {
    let mut cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let dir = std::env::temp_dir().join("lipflow-example");
    cfg.output = Some(dir.clone());
    let (code, out) = run_and_report(Subcommand::EmbedBorel, &cfg);
    let out = out?;
    print!("{}", out.report.to_csv_string());
    println!("exit code {code}; {} grid files in {}", out.grids.len(), dir.display());

    match ExperimentConfig::from_toml_str("flow = \"torus2\"\nfoo = 1\n") {
        Err(e) => println!("bad config: {e}"),
        Ok(_) => println!("bad config accepted"),
    }
    Ok(())
}
