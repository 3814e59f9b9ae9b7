use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qkdv::fock::commute_report;
use qkdv::hierarchy::s_series;
use qkdv::intersection::{admissible_genera, assemble_polynomial, StrataPolynomial};
use qkdv::reconstruction::{compare_with_wang, reconstruct, reconstruct_auto};
use qkdv::verify::{self, Level};
use qkdv::{HamiltonianCache, Result};

#[derive(Parser)]
#[command(
    name = "qkdv",
    version,
    about = "Quantized dispersionless KdV hierarchy toolkit"
)]
struct Cli {
    /// Hamiltonian cache directory [env QKDV_CACHE, default ./.qkdv-cache]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Print the density H_d.
    Hamiltonian {
        #[arg(short, allow_negative_numbers = true, value_parser = hamiltonian_index)]
        d: i64,
    },
    /// Print S_0, ..., S_kmax.
    SSeries {
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Check [H_d1, H_d2] = 0 on all sectors of momentum <= mmax.
    Commute {
        #[arg(long, allow_negative_numbers = true, value_parser = hamiltonian_index)]
        d1: i64,
        #[arg(long, allow_negative_numbers = true, value_parser = hamiltonian_index)]
        d2: i64,
        #[arg(long, default_value_t = 6)]
        mmax: u32,
    },
    /// Rebuild H_d up to hbar^G from commutation with H_1.
    Reconstruct {
        #[arg(short, allow_negative_numbers = true, value_parser = hamiltonian_index)]
        d: i64,
        #[arg(short = 'G', default_value_t = 1)]
        order: u32,
        /// Fixed momentum bound; chosen automatically when absent.
        #[arg(long)]
        mmax: Option<u32>,
        /// Require equality with the closed form.
        #[arg(long)]
        compare: bool,
    },
    /// Polynomial in the stratum parameters for (d, g).
    Intersect {
        #[arg(short, allow_negative_numbers = true, value_parser = hamiltonian_index)]
        d: i64,
        /// All admissible genera when absent.
        #[arg(short)]
        g: Option<u32>,
    },
    /// Run the whole verification suite.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

fn hamiltonian_index(s: &str) -> std::result::Result<i64, String> {
    let d: i64 = s.parse().map_err(|e| format!("{e}"))?;
    if d < -1 {
        return Err(format!("Hamiltonian indices start at -1, got {d}"));
    }
    Ok(d)
}

fn cache_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("QKDV_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".qkdv-cache"))
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn to_pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn strata_text(p: &StrataPolynomial) -> String {
    format!(
        "d = {}, g = {}, n = {}\nfalling: {}\npower: {}",
        p.d,
        p.g,
        p.n,
        p.falling_text(),
        p.power_text()
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cache = HamiltonianCache::with_dir(cache_dir(cli.cache_dir));
    let format = cli.format;
    if format == Format::Latex && !matches!(cli.command, Command::Intersect { .. }) {
        return Ok(usage("--format latex is only available for intersect"));
    }
    match cli.command {
        Command::Hamiltonian { d } => {
            let h = cache.get(d)?;
            match format {
                Format::Json => {
                    let mut v = h.density.to_json_value();
                    let obj = v.as_object_mut().expect("object");
                    obj.insert("d".into(), d.into());
                    obj.insert(
                        "functional".into(),
                        h.functional.normal_form().to_json_value(),
                    );
                    println!("{}", to_pretty(&v));
                }
                _ => {
                    println!("{}", h.density);
                    println!("functional: {}", h.functional);
                }
            }
        }
        Command::SSeries { kmax } => {
            let s = s_series(kmax);
            match format {
                Format::Json => {
                    let terms: Vec<_> = s.coeffs.iter().map(|p| p.to_json_value()).collect();
                    println!("{}", to_pretty(&json!({ "kmax": kmax, "S": terms })));
                }
                _ => {
                    for (k, p) in s.coeffs.iter().enumerate() {
                        println!("S_{k} = {p}");
                    }
                }
            }
        }
        Command::Commute { d1, d2, mmax } => {
            let report = commute_report(&cache, d1, d2, mmax)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                _ => {
                    for p in &report.pairs {
                        println!(
                            "{}: [H_{}, H_{}] on {} sectors up to momentum {}",
                            p.status, p.d1, p.d2, p.sectors, p.mmax
                        );
                    }
                    if let Some(w) = &report.witness {
                        println!(
                            "witness: <{}| [H_{}, H_{}] |{}> = {}",
                            w.output, w.d1, w.d2, w.partition, w.coefficient
                        );
                    }
                }
            }
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Reconstruct {
            d,
            order,
            mmax,
            compare,
        } => {
            let rec = match mmax {
                Some(m) => reconstruct(&cache, d, order, m)?,
                None => reconstruct_auto(&cache, d, order)?,
            };
            let equal = if compare {
                Some(compare_with_wang(&cache, &rec)?)
            } else {
                None
            };
            let cert = &rec.certificate;
            match format {
                Format::Json => {
                    let mut v = serde_json::to_value(cert)?;
                    if let Some(eq) = equal {
                        v.as_object_mut()
                            .expect("object")
                            .insert("matches_closed_form".into(), eq.into());
                    }
                    println!("{}", to_pretty(&v));
                }
                _ => {
                    println!("Q_{d} = {}", cert.functional);
                    println!("ansatz dimensions: {:?}", cert.ansatz_dims);
                    println!(
                        "unique at momentum {} (kernel dimension {}), re-verified up to {}",
                        cert.mmax, cert.homogeneous_kernel_dim, cert.reverified_up_to
                    );
                    if let Some(eq) = equal {
                        println!(
                            "{}",
                            if eq {
                                "equal to H_d"
                            } else {
                                "differs from H_d"
                            }
                        );
                    }
                }
            }
            if equal == Some(false) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Intersect { d, g } => {
            let genera = match g {
                Some(g) => {
                    let n = d + 2 - 2 * g as i64;
                    if n < 1 {
                        return Ok(usage(&format!(
                            "no stratum for d = {d}, g = {g}: the number of points n = d + 2 - 2g = {n} must be at least 1"
                        )));
                    }
                    vec![g]
                }
                None => admissible_genera(d),
            };
            let polys = genera
                .into_iter()
                .map(|g| assemble_polynomial(&cache, d, g))
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Json => {
                    let v: Vec<_> = polys.iter().map(|p| p.to_json()).collect();
                    let v = if v.len() == 1 {
                        v.into_iter().next().expect("one")
                    } else {
                        serde_json::Value::Array(v)
                    };
                    println!("{}", to_pretty(&v));
                }
                Format::Latex => {
                    for p in &polys {
                        println!("{}", p.latex_row());
                    }
                }
                Format::Text => {
                    let blocks: Vec<String> = polys.iter().map(strata_text).collect();
                    println!("{}", blocks.join("\n\n"));
                }
            }
        }
        Command::VerifyAll { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let summary = verify::run(level, &cache);
            match format {
                Format::Json => println!("{}", summary.to_json()),
                _ => print!("{}", summary.to_text()),
            }
            if !summary.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
