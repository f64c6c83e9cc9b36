use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cubicspec::bc::{classify_bc, BoundaryParams, VerdictReport};
use cubicspec::identities::identity_suite;
use cubicspec::inverse::{default_probe, reconstruct_v, simulate_bundle, ReconstructOptions};
use cubicspec::io::{self, CoefficientFile, RecoveredReport};
use cubicspec::oracle::{compare_spectra, discretize};
use cubicspec::perturbation::{spectrum_alpha_with, DEFAULT_ZERO_TOL};
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{eigs_l0, Basis};
use cubicspec::{Error, Result};

#[derive(Parser)]
#[command(name = "cubicspec", version, about = "Spectra and inverse problems for i y''' with a rank-one non-local potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the unperturbed operator for |n| <= n_max
    Eigs0 {
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// directory for spectrum_l0.json (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues of the perturbed operator for a potential file (.csv table or .json coefficients)
    Eigs {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// truncation of the secular sum
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// coincidence tolerance for double eigenvalues (default 1e-8 (1 + |lambda|))
        #[arg(long)]
        tol: Option<f64>,
        /// coefficients below this count as zero
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        zero_tol: f64,
        /// use the potential as given instead of normalizing it
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward-solve the four spectra for v, v + g, v + i g and write a bundle
    Bundle {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// probe g (default 1 - x)
        #[arg(long)]
        probe: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover alpha, |v_n|^2 and v from a bundle manifest
    Reconstruct {
        #[arg(long)]
        bundle: PathBuf,
        /// probe g (default 1 - x)
        #[arg(long)]
        probe: Option<PathBuf>,
        /// smallest |g_n| accepted as a divisor
        #[arg(long, default_value_t = 1e-6)]
        g_floor: f64,
        /// relative tolerance between |v_n| from cross terms and from weights
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// sample count of the emitted CSV potential
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// potential to compare the reconstruction against
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Multiplicity regime for general separated boundary conditions
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare secular eigenvalues with a finite-difference discretization (CSV)
    Oracle {
        /// potential file (zero potential if omitted)
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// number of grid nodes
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        /// nonzero eigenvalues to compare
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the relations between c, s, d at random points and print the worst residuals
    Identities {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>, name: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            io::write_json(&dir.join(name), value)
        }
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn load_probe(path: Option<&Path>, basis: &Basis) -> Result<Potential> {
    match path {
        Some(p) => io::load_potential(p, basis),
        None => Ok(default_probe(basis)),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eigs0 { n_max, out } => emit_json(&eigs_l0(n_max)?, out.as_deref(), "spectrum_l0.json"),
        Command::Eigs { potential, alpha, n_max, tol, zero_tol, raw, out } => {
            let basis = Basis::new(n_max)?;
            let mut v = io::load_potential(&potential, &basis)?;
            if !raw {
                v = v.normalized();
            }
            let s = spectrum_alpha_with(&v, alpha, &basis, tol, zero_tol)?;
            emit_json(&s, out.as_deref(), "spectrum_alpha.json")
        }
        Command::Bundle { potential, alpha, n_max, probe, out } => {
            let basis = Basis::new(n_max)?;
            let v = io::load_potential(&potential, &basis)?.normalized();
            let g = load_probe(probe.as_deref(), &basis)?;
            let b = simulate_bundle(&v, alpha, &g, &basis)?;
            let manifest = io::write_bundle(&out, &b)?;
            println!("{}", manifest.display());
            Ok(())
        }
        Command::Reconstruct { bundle, probe, g_floor, tol, grid, reference, out } => {
            let b = io::load_bundle(&bundle)?;
            let n_max = usize::try_from(b.s0.n_max()).map_err(|_| Error::InvalidInput("empty spectrum".into()))?;
            let basis = Basis::new(n_max)?;
            let g = load_probe(probe.as_deref(), &basis)?;
            let rec = reconstruct_v(&b, &g, &basis, ReconstructOptions { g_floor, modulus_tol: tol })?;
            std::fs::create_dir_all(&out)?;
            io::write_json(&out.join("recovered.json"), &RecoveredReport::new(&rec))?;
            io::write_json(&out.join("v_hat.json"), &CoefficientFile::new(&rec.coefficients, n_max))?;
            io::write_potential_csv(&out.join("v_hat.csv"), &rec.v_hat, grid.max(2))?;
            println!("alpha_hat = {}", rec.alpha_hat);
            if let Some(r) = reference {
                let v = io::load_potential(&r, &basis)?.normalized();
                let err: f64 = basis
                    .modes()
                    .iter()
                    .filter(|m| m.n != 0 || !rec.zero_gauge_note)
                    .map(|m| (v.coeff(*m) - rec.v_hat.coeff(*m)).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                println!("round-trip error = {err:e}");
            }
            Ok(())
        }
        Command::Classify { gamma, beta, phi, tol, out } => {
            let p = BoundaryParams::new(gamma, beta, phi);
            emit_json(&VerdictReport::new(p, &classify_bc(p, tol)), out.as_deref(), "verdict.json")
        }
        Command::Oracle { potential, alpha, n_max, grid, count, out } => {
            let basis = Basis::new(n_max)?;
            let v = match potential {
                Some(p) => io::load_potential(&p, &basis)?.normalized(),
                None => Potential::zero(n_max),
            };
            let s = spectrum_alpha_with(&v, alpha, &basis, None, DEFAULT_ZERO_TOL)?;
            let op = discretize(&v, alpha, grid)?;
            let rows = compare_spectra(&s, &op, count)?;
            let mut text = String::from("secular,oracle,rel_diff\n");
            for r in rows {
                text.push_str(&format!("{},{},{}\n", r.secular, r.oracle, r.rel_diff));
            }
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join("oracle.csv"), text)?;
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Identities { samples, radius, seed } => {
            let reports = identity_suite(samples, radius, seed);
            for r in &reports {
                println!("{:<14} {:>10.3e}  (tol {:.0e})  {}", r.name, r.max_residual, r.tol, if r.passed() { "ok" } else { "FAIL" });
            }
            if reports.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(Error::InvalidInput("identity residual above tolerance".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("CUBICSPEC_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = io::ErrorReport::from(&e);
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| e.to_string()));
            ExitCode::FAILURE
        }
    }
}
