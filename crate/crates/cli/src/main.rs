mod config;
mod experiments;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Failure;

#[derive(Parser)]
#[command(
    name = "csie",
    version,
    about = "Runs resonance and approximation-error experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config; writes a CSV and a provenance sidecar
    Run { config: PathBuf },
    /// Print the experiment catalogue with parameter schemas
    List,
    /// Parse and validate a config without running it
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => run(&config),
        Command::List => {
            print!("{}", experiments::catalogue());
            Ok(())
        }
        Command::Validate { config } => validate(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code() as u8)
        }
    }
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn validate(path: &Path) -> Result<(), Failure> {
    let text = read_config(path)?;
    let (_, exp) = config::parse_config(&text)?;
    println!("ok: {}", exp.name());
    Ok(())
}

fn init_thread_pool() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("CSIE_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            Failure::Validation(format!("CSIE_THREADS must be a positive integer, got {v:?}"))
        })?;
        if n == 0 {
            return Err(Failure::Validation(
                "CSIE_THREADS must be a positive integer, got 0".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Io(format!("cannot size the work pool: {e}")))?;
    }
    Ok(())
}

fn run(path: &Path) -> Result<(), Failure> {
    let text = read_config(path)?;
    let (cfg, exp) = config::parse_config(&text)?;
    init_thread_pool()?;
    let output = experiments::run(&exp)?;

    let out_path = PathBuf::from(&cfg.output_path);
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Failure::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let mut csv = String::with_capacity(output.rows.len() * 80 + 80);
    csv.push_str(output.header);
    csv.push('\n');
    for row in &output.rows {
        csv.push_str(row);
        csv.push('\n');
    }
    fs::write(&out_path, csv)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", out_path.display())))?;

    let provenance = serde_json::json!({
        "config": serde_json::from_str::<serde_json::Value>(&text)
            .expect("config already parsed once"),
        "library_version": env!("CARGO_PKG_VERSION"),
        "generated_at": chrono::Utc::now().to_rfc3339(),
        "quadrature": output.quadrature,
    });
    let sidecar = out_path.with_extension("provenance.json");
    fs::write(&sidecar, format!("{:#}\n", provenance))
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", sidecar.display())))?;

    println!(
        "wrote {} rows to {} (provenance: {})",
        output.rows.len(),
        out_path.display(),
        sidecar.display()
    );
    Ok(())
}
