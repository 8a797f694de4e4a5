//! Command-line front end. Exit codes: 0 success, 1 numeric or audit
//! failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use riley_slice::checks;
use riley_slice::farey::Slope;
use riley_slice::rays::{self, Branch, RayError, Schedule, CONDITIONING_DEGREE};
use riley_slice::slice::{self, ExportFormat, ViewBox};
use riley_slice::words;

#[derive(Parser)]
#[command(
    name = "riley",
    version,
    about = "Slope words, trace polynomials, and pleating rays of the Riley slice"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Relative Newton residual tolerance.
    #[arg(long, global = true, env = "RILEY_NEWTON_TOL", default_value_t = 1e-12)]
    newton_tol: f64,
    /// Continuation start; must be <= -1e3.
    #[arg(long, global = true, env = "RILEY_T_START", default_value_t = -1e8, allow_hyphen_values = true)]
    t_start: f64,
    /// Geometric schedule density; must be >= 4.
    #[arg(long, global = true, env = "RILEY_STEPS_PER_DECADE", default_value_t = 16)]
    steps_per_decade: u32,
    /// Uniform step size on the near-cusp segment [-10, -2].
    #[arg(long, global = true, env = "RILEY_NEAR_CUSP_STEP", default_value_t = 0.05)]
    near_cusp_step: f64,
    /// SVG window: re_min,re_max,im_min,im_max.
    #[arg(
        long,
        global = true,
        env = "RILEY_VIEWBOX",
        value_delimiter = ',',
        num_args = 4,
        default_values_t = [-5.0, 5.0, -5.0, 5.0],
        allow_hyphen_values = true
    )]
    viewbox: Vec<f64>,
    /// Significant digits for printed numbers.
    #[arg(long, global = true, env = "RILEY_PRECISION", default_value_t = 12)]
    precision: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical slope, its word, length, and sign changes.
    Word {
        slope: String,
        /// Also print the Γ-cutting sequence.
        #[arg(long)]
        gamma: bool,
    },
    /// Print the trace polynomial coefficients, lowest degree first.
    Trace { slope: String },
    /// Trace one branch of a pleating ray.
    Ray {
        slope: String,
        #[arg(long)]
        branch: BranchArg,
        #[arg(long, value_enum, default_value_t = RayFormat::Csv)]
        format: RayFormat,
    },
    /// Build the full diagram up to a denominator bound and write it out.
    Slice {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_denominator: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: SliceFormat,
    },
    /// Run the verification suites and print a pass/fail table.
    Check {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 8)]
        max_denominator: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Upper,
    Lower,
    Real,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Upper => Branch::Upper,
            BranchArg::Lower => Branch::Lower,
            BranchArg::Real => Branch::Real,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum RayFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SliceFormat {
    Svg,
    Csv,
    Json,
}

const EXIT_OK: u8 = 0;
const EXIT_NUMERIC: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli))
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn parse_slope(text: &str) -> Result<Slope, u8> {
    text.parse::<Slope>()
        .map_err(|e| usage_error(&format!("{e}")))
}

fn build_schedule(cfg: &ConfigArgs) -> Result<Schedule, u8> {
    if cfg.newton_tol.is_nan() || cfg.newton_tol <= 0.0 {
        return Err(usage_error("newton-tol must be positive"));
    }
    if cfg.precision == 0 {
        return Err(usage_error("precision must be at least 1"));
    }
    Schedule::new(cfg.t_start, cfg.steps_per_decade, cfg.near_cusp_step)
        .map_err(|e| usage_error(&e.to_string()))
}

fn fmt_float(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.*e}", precision.saturating_sub(1), x);
    // positional form when the exponent is modest
    let (_, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..12).contains(&exp) {
        let mut out = format!("{:.*}", (precision as i32 - 1 - exp).max(0) as usize, x);
        if out.contains('.') {
            out = out.trim_end_matches('0').trim_end_matches('.').to_string();
        }
        out
    } else {
        s
    }
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Word { ref slope, gamma } => {
            let s = match parse_slope(slope) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let canonical = s.canonicalize();
            let w = words::v_word(canonical);
            println!("slope: {canonical}");
            println!("word: {w}");
            println!("length: {}", w.len());
            match words::sign_changes(&w) {
                Ok(n) => println!("sign_changes: {n}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_NUMERIC;
                }
            }
            if gamma {
                println!("gamma: {}", words::gamma_cutting_sequence(canonical, 0));
            }
            EXIT_OK
        }
        Command::Trace { ref slope } => {
            let s = match parse_slope(slope) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let poly = rays::trace_polynomial_of(s);
            let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
            println!("{}", coeffs.join(" "));
            EXIT_OK
        }
        Command::Ray {
            ref slope,
            branch,
            format,
        } => {
            let s = match parse_slope(slope) {
                Ok(s) => s.canonicalize(),
                Err(code) => return code,
            };
            let schedule = match build_schedule(&cli.config) {
                Ok(sc) => sc,
                Err(code) => return code,
            };
            if s.q() > CONDITIONING_DEGREE {
                eprintln!(
                    "warning: denominator {} exceeds {}; double-precision tracing may be ill-conditioned",
                    s.q(),
                    CONDITIONING_DEGREE
                );
            }
            let branch: Branch = branch.into();
            match rays::trace_ray_with_tol(s, branch, &schedule, cli.config.newton_tol) {
                Ok(path) => {
                    match format {
                        RayFormat::Csv => print!("{}", slice::ray_to_csv(&path)),
                        RayFormat::Json => {
                            println!("{}", serde_json::to_string_pretty(&path).unwrap())
                        }
                    }
                    EXIT_OK
                }
                Err(RayError::InvalidBranch { slope, branch }) => usage_error(&format!(
                    "branch `{branch}` is not valid for slope {slope}"
                )),
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_NUMERIC
                }
            }
        }
        Command::Slice {
            max_denominator,
            ref out,
            format,
        } => {
            let schedule = match build_schedule(&cli.config) {
                Ok(sc) => sc,
                Err(code) => return code,
            };
            let vb = ViewBox {
                re_min: cli.config.viewbox[0],
                re_max: cli.config.viewbox[1],
                im_min: cli.config.viewbox[2],
                im_max: cli.config.viewbox[3],
            };
            if vb.re_min >= vb.re_max || vb.im_min >= vb.im_max {
                return usage_error("viewbox must satisfy re_min < re_max and im_min < im_max");
            }
            if max_denominator as i64 > CONDITIONING_DEGREE {
                eprintln!(
                    "warning: denominators above {CONDITIONING_DEGREE} may be ill-conditioned in double precision"
                );
            }
            let diagram = slice::build_slice(max_denominator, &schedule);
            let format = match format {
                SliceFormat::Svg => ExportFormat::Svg,
                SliceFormat::Csv => ExportFormat::Csv,
                SliceFormat::Json => ExportFormat::Json,
            };
            if let Err(e) = slice::export(&diagram, format, out, &vb) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return EXIT_NUMERIC;
            }
            let failures: Vec<&slice::AuditEntry> =
                diagram.audit.iter().filter(|a| !a.pass).collect();
            eprintln!(
                "{} rays, {} cusps, {} audit checks ({} failed) -> {}",
                diagram.rays.len(),
                diagram.cusps.len(),
                diagram.audit.len(),
                failures.len(),
                out.display()
            );
            for a in &failures {
                eprintln!(
                    "audit FAIL {}: value {} ({})",
                    a.name,
                    fmt_float(a.value, cli.config.precision),
                    a.detail
                );
            }
            if failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_NUMERIC
            }
        }
        Command::Check { max_denominator } => {
            let results = checks::run_all(max_denominator);
            let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let mut all_pass = true;
            println!(
                "{:width$}  {:6}  {:>14}  detail",
                "check",
                "result",
                "deviation",
                width = width
            );
            for r in &results {
                all_pass &= r.pass;
                println!(
                    "{:width$}  {:6}  {:>14}  {}",
                    r.name,
                    if r.pass { "PASS" } else { "FAIL" },
                    fmt_float(r.deviation, cli.config.precision.min(6)),
                    r.detail,
                    width = width
                );
            }
            if all_pass {
                println!("all {} checks passed (q <= {max_denominator})", results.len());
                EXIT_OK
            } else {
                EXIT_NUMERIC
            }
        }
    }
}
