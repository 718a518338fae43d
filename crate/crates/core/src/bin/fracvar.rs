use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracvar::functional::eval_composition;
use fracvar::io::{self, sig9, ResultFile};
use fracvar::selftest::{self, SelftestOptions};
use fracvar::solver::solve_ritz;
use fracvar::variational::{el_residual, ResidualOptions, DEFAULT_GRID_SIZE};
use fracvar::{Error, Result};

#[derive(Parser)]
#[command(name = "fracvar", version, about = "Fractional composition functionals: evaluate, check, solve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print L and F for a trajectory; write t, x, x^(alpha_i) to eval.csv
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Euler-Lagrange residual and natural defects; writes residual.csv
    Residual {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
        /// Distance kept from b (default (b-a)*1e-3)
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Ritz search; writes result.json, trajectory.csv and residual.csv
    Solve {
        #[arg(long)]
        problem: PathBuf,
        /// Basis exponents, e.g. 0.5,1
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the acceptance checks; exit 0 only if all pass
    Selftest {
        /// Force this many uniform quadrature panels
        #[arg(long)]
        panels: Option<usize>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    problem: PathBuf,
    /// JSON {"base", "terms"} or CSV base,coefficient,exponent
    #[arg(long)]
    trajectory: PathBuf,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn print_natural(left: Option<f64>, right: Option<f64>) {
    if let Some(d) = left {
        println!("natural defect at a: {}", sig9(d));
    }
    if let Some(d) = right {
        println!("natural defect at b: {}", sig9(d));
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Eval { input, grid, out } => {
            let setup = io::load_setup(&input.problem)?;
            let x = io::load_trajectory(&input.trajectory)?;
            let e = eval_composition(&setup.problem, &x, &setup.quadrature)?;
            println!("L = {}", sig9(e.objective));
            for (i, f) in e.functionals.iter().enumerate() {
                println!("F{} = {}", i + 1, sig9(*f));
            }
            io::write_eval_csv(&setup.problem, &x, grid, create(&out, "eval.csv")?)?;
        }
        Command::Residual { input, grid, eps, out } => {
            let setup = io::load_setup(&input.problem)?;
            let x = io::load_trajectory(&input.trajectory)?;
            let opts = ResidualOptions { grid_size: grid, eps, quadrature: setup.quadrature, ..Default::default() };
            let report = el_residual(&setup.problem, &x, &opts)?;
            println!("sup |R| = {}", sig9(report.sup_norm));
            println!("L1 |R| = {}", sig9(report.l1_norm));
            print_natural(report.natural_left, report.natural_right);
            io::write_residual_csv(&report, create(&out, "residual.csv")?)?;
        }
        Command::Solve { problem, basis, seed, out } => {
            let mut setup = io::load_setup(&problem)?;
            if let Some(basis) = basis {
                setup.ritz.basis = basis;
            }
            if let Some(seed) = seed {
                setup.ritz.seed = seed;
            }
            let result = solve_ritz(&setup.problem, &setup.ritz, &setup.quadrature)?;
            println!("status: {} ({})", result.status, result.label);
            println!("L = {}", sig9(result.objective));
            for (i, f) in result.functionals.iter().enumerate() {
                println!("F{} = {}", i + 1, sig9(*f));
            }
            for term in result.trajectory.terms() {
                println!("  {} * (t-a)^{}", sig9(term.coefficient), sig9(term.exponent));
            }
            println!("sup |R| = {}", sig9(result.residual.sup_norm));
            print_natural(result.residual.natural_left, result.residual.natural_right);
            let file = ResultFile::new(&result, &setup.ritz);
            std::io::Write::write_all(&mut create(&out, "result.json")?, file.to_json()?.as_bytes())?;
            io::write_trajectory_csv(&result.trajectory, create(&out, "trajectory.csv")?)?;
            io::write_residual_csv(&result.residual, create(&out, "residual.csv")?)?;
        }
        Command::Selftest { panels } => {
            let rows = selftest::run(&SelftestOptions { panels });
            for row in &rows {
                println!("{row}");
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            println!("{} passed, {failed} failed", rows.len() - failed);
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
