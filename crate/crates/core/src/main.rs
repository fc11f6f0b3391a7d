use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optomech::gaussian::BipartitePair;
use optomech::presets::{fig_preset, gnuplot_script, PresetKind};
use optomech::sweep::{
    evaluate_point, run_stability, run_sweep, write_stability_csv, write_sweep_csv, PointOptions,
    PointResult,
};
use optomech::{Result, SweepConfig};

#[derive(Parser)]
#[command(name = "optomech", version, about = "Stationary entanglement of two hopping-coupled optomechanical cavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the base point of a configuration (axes are ignored).
    Point {
        #[arg(long)]
        config: PathBuf,
        /// Print the full result, including matrices, as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a one- or two-axis sweep and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a named figure preset, writing `<name>.csv` and `<name>.gp` into a directory.
    Fig {
        preset: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Map the stability conditions over a detuning axis and a hop_strength axis.
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Parse and check a configuration without computing anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn print_point(pr: &PointResult) {
    let wm = pr.params.omega_m();
    println!(
        "branches: {} (selected {:?})",
        pr.branches.len(),
        pr.selected
    );
    for b in &pr.branches {
        let ss = &b.steady;
        println!(
            "branch {}: |a1| = {:.6e}, |a2| = {:.6e}, G/omega_m = ({:.6e}, {:.6e}), stable = {}, abscissa = {:.6e}",
            b.index,
            ss.amp[0].norm(),
            ss.amp[1].norm(),
            ss.eff_coupling[0] / wm,
            ss.eff_coupling[1] / wm,
            b.hurwitz.is_hurwitz,
            b.hurwitz.abscissa
        );
        if let Some((s1, s2)) = b.conditions {
            println!("  s1 = {s1:.6e}, s2 = {s2:.6e}");
        }
        if let Some(m) = &b.measures {
            for pair in BipartitePair::ALL {
                if let Some(r) = m.pair(pair) {
                    println!("  E_N({pair}) = {:.6e}  theta- = {:.6e}", r.log_neg, r.theta_minus);
                }
            }
            if let (Some(f), Some(fb)) = (m.fidelity, m.fidelity_bound) {
                println!("  F = {f:.6e}, F_bound = {fb:.6e}");
            }
            println!(
                "  lyapunov residual = {:.3e}, min symplectic eigenvalue = {:.6e}",
                m.lyapunov_residual, m.min_symplectic
            );
        }
        if let Some(e) = &b.error {
            println!("  error: {e}");
        }
    }
}

fn load(path: &Path, workers: Option<usize>) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::from_path(path)?;
    if workers.is_some() {
        cfg.workers = workers;
    }
    for w in cfg.base.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Point { config, json } => {
            let cfg = load(&config, None)?;
            let pr = evaluate_point(&cfg.base, &cfg.bath.bath(), &PointOptions::from_config(&cfg))?;
            if json {
                let stdout = io::stdout();
                let mut out = stdout.lock();
                serde_json::to_writer_pretty(&mut out, &pr)?;
                writeln!(out)?;
            } else {
                print_point(&pr);
            }
            let failed = pr
                .selected
                .iter()
                .any(|&k| pr.branches[k].gate_failed || pr.branches[k].error.is_some());
            Ok(if failed { 2 } else { 0 })
        }
        Command::Sweep { config, out, workers } => {
            let cfg = load(&config, workers)?;
            let table = run_sweep(&cfg)?;
            let mut w = create(&out)?;
            write_sweep_csv(&mut w, &cfg, &table)?;
            w.flush()?;
            eprintln!(
                "{} rows written to {} ({} with errors)",
                table.records.len(),
                out.display(),
                table.errors()
            );
            Ok(if table.gate_failures() > 0 { 2 } else { 0 })
        }
        Command::Fig { preset, out, workers } => {
            let mut p = fig_preset(&preset)?;
            if workers.is_some() {
                p.config.workers = workers;
            }
            fs::create_dir_all(&out)?;
            let csv = out.join(format!("{}.csv", p.name));
            let mut w = create(&csv)?;
            let code = match p.kind {
                PresetKind::Sweep => {
                    let table = run_sweep(&p.config)?;
                    write_sweep_csv(&mut w, &p.config, &table)?;
                    if table.gate_failures() > 0 {
                        2
                    } else {
                        0
                    }
                }
                PresetKind::Stability => {
                    let map = run_stability(&p.config)?;
                    write_stability_csv(&mut w, &p.config, &map)?;
                    0
                }
            };
            w.flush()?;
            fs::write(out.join(format!("{}.gp", p.name)), gnuplot_script(&p))?;
            eprintln!("wrote {}", csv.display());
            Ok(code)
        }
        Command::Stability { config, out, workers } => {
            let cfg = load(&config, workers)?;
            let map = run_stability(&cfg)?;
            let mut w = create(&out)?;
            write_stability_csv(&mut w, &cfg, &map)?;
            w.flush()?;
            eprintln!(
                "{} cells, agreement {:.4}, {} disagreements",
                map.cells.len(),
                map.agreement_fraction(),
                map.disagreements.len()
            );
            Ok(0)
        }
        Command::Validate { config } => {
            let cfg = load(&config, None)?;
            if !cfg.axes.is_empty() {
                cfg.validate_sweep()?;
            }
            println!("ok: {} grid points", if cfg.axes.is_empty() { 1 } else { cfg.grid().len() });
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

