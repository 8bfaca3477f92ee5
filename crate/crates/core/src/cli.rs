//! Command-line front end. Subcommands map one-to-one onto the library
//! API: `validate`, `counting`, `integral`, `carleson`, `identity-check`,
//! `analyze`, and `catalog`.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical non-convergence (a
//! flagged report is still written), 4 output error.

use crate::carleson::{carleson_ratio_profile, induced_measure, induced_measure_seeded};
use crate::essnorm::{self, CarlesonConfig, ReportConfig};
use crate::mapspec::SelfMap;
use crate::nevanlinna::AngleBudget;
use crate::quad::{QuadConfig, Refinement};
use crate::report;
use crate::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

const GRAMMAR: &str = "\
Map-spec grammar:

  expr    := name | name \"(\" args \")\" ;
  args    := arg { \",\" arg } ;
  arg     := expr | complex | integer ;
  complex := real [ (\"+\"|\"-\") real \"i\" ] | real \"i\" ;
  name    := \"identity\" | \"const\" | \"monomial\" | \"mobius\" | \"blaschke\"
           | \"poly\" | \"rational\" | \"atomic\" | \"scale\" | \"compose\"
           | \"halfplane\" ;

rational(c0,...,cm; d0,...,dk) separates numerator and denominator
coefficients with \";\". Examples: \"monomial(2)\", \"mobius(0.3+0.1i)\",
\"scale(0.5, identity)\", \"compose(monomial(2), mobius(0.5))\".";

/// Exit codes used by `run`.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser)]
#[command(
    name = "compop",
    about = "Compactness analysis of composition operators on H^2",
    after_help = GRAMMAR
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sampling-based self-map validation; reports the maximum modulus.
    #[command(after_help = GRAMMAR)]
    Validate {
        #[arg(long)]
        map: String,
        /// Samples per circle (>= 64).
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Counting-side profile sup N_psi(r e^{i t})/(1-r) over the schedule.
    #[command(after_help = GRAMMAR)]
    Counting {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        schedule: ScheduleOpts,
        #[command(flatten)]
        numerics: NumericOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Integral-side profile sup (1-|a|^2) ∫ |1 - conj(a) psi|^{-2} dm.
    #[command(after_help = GRAMMAR)]
    Integral {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        schedule: ScheduleOpts,
        #[command(flatten)]
        numerics: NumericOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Carleson window-ratio profile of the induced measure.
    #[command(after_help = GRAMMAR)]
    Carleson {
        #[arg(long)]
        map: String,
        /// Boundary atoms (power of two, >= 256).
        #[arg(long, default_value_t = 1 << 14)]
        atoms: usize,
        /// Draw boundary angles from a seeded sampler instead of the
        /// uniform grid.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the empirical measure (CSV re,im,weight) to this path.
        #[arg(long)]
        measure_out: Option<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Both finite-radius suprema and their gap at one radius.
    #[command(name = "identity-check", after_help = GRAMMAR)]
    IdentityCheck {
        #[arg(long)]
        map: String,
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        numerics: NumericOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Full analysis: profiles, gap, essential-norm estimate, verdict.
    #[command(after_help = GRAMMAR)]
    Analyze {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        schedule: ScheduleOpts,
        #[command(flatten)]
        numerics: NumericOpts,
        /// Include the Carleson window-ratio section.
        #[arg(long)]
        carleson: bool,
        /// Atoms for the Carleson section.
        #[arg(long, default_value_t = 1 << 14)]
        atoms: usize,
        /// Seed for the stress-test boundary sampler (grid when absent).
        #[arg(long)]
        seed: Option<u64>,
        /// Measure wall time into runtime_seconds (breaks byte-for-byte
        /// determinism of repeated runs).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// List the built-in map catalog with known verdicts.
    #[command(after_help = GRAMMAR)]
    Catalog {
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Args)]
struct ScheduleOpts {
    /// Radius schedule r_k = 1 - 2^{-k}, k = 1..=kmax (3..=14).
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Explicit comma-separated radii in (0,1), overriding --kmax.
    #[arg(long)]
    radii: Option<String>,
}

#[derive(Args)]
struct NumericOpts {
    /// Minimum profile angle budget (>= 64).
    #[arg(long, default_value_t = 256)]
    angles: usize,
    #[arg(long, default_value_t = 1e-9)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

#[derive(Args)]
struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl ScheduleOpts {
    fn resolve(&self) -> Result<Vec<f64>, Error> {
        if let Some(text) = &self.radii {
            let radii: Result<Vec<f64>, Error> = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad radius '{s}'")))
                })
                .collect();
            let radii = radii?;
            crate::nevanlinna::validate_radii(&radii)?;
            Ok(radii)
        } else {
            if !(3..=14).contains(&self.kmax) {
                return Err(Error::Domain("kmax must lie in [3, 14]".into()));
            }
            Ok(essnorm::default_schedule(self.kmax))
        }
    }
}

impl NumericOpts {
    fn budget(&self) -> Result<AngleBudget, Error> {
        AngleBudget::new(self.angles, 1 << 16)
    }

    fn quad(&self) -> Result<QuadConfig, Error> {
        QuadConfig::new(self.abs_tol, self.rel_tol, 1 << 20, Refinement::Doubling)
    }
}

/// Default window grid trimmed to the atom-resolution guard
/// (`h >= 8 * 2pi / atoms`).
fn adapted_carleson(atoms: usize, seed: Option<u64>) -> CarlesonConfig {
    let base = CarlesonConfig::default();
    let guard = 8.0 * 2.0 * std::f64::consts::PI / atoms as f64;
    CarlesonConfig {
        atoms,
        h_grid: base.h_grid.into_iter().filter(|h| *h >= guard).collect(),
        n_theta: base.n_theta,
        seed,
    }
}

fn write_artifact(out: &OutputOpts, content: &str) -> i32 {
    match &out.out {
        None => {
            print!("{content}");
            EXIT_OK
        }
        Some(path) => match std::fs::write(path, content) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: cannot write {path}: {e}");
                EXIT_IO
            }
        },
    }
}

fn input_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_INPUT
}

/// Entry point; takes the full argv (including the program name) and
/// returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            if code == EXIT_INPUT {
                eprintln!("\n{GRAMMAR}");
            }
            return code;
        }
    };
    match cli.cmd {
        Cmd::Validate { map, samples, out } => {
            let parsed = match SelfMap::parse(&map) {
                Ok(m) => m,
                Err(e) => return input_error(&e),
            };
            match parsed.validate(samples) {
                Ok(rep) => write_artifact(
                    &out,
                    &report::validation_to_json(&parsed.spec_string(), rep.max_modulus, rep.n_samples, true),
                ),
                Err(e) => input_error(&e),
            }
        }
        Cmd::Counting {
            map,
            schedule,
            numerics,
            out,
        } => profile_cmd(&map, &schedule, &numerics, &out, ProfileKind::Counting),
        Cmd::Integral {
            map,
            schedule,
            numerics,
            out,
        } => profile_cmd(&map, &schedule, &numerics, &out, ProfileKind::Integral),
        Cmd::Carleson {
            map,
            atoms,
            seed,
            measure_out,
            out,
        } => {
            let parsed = match SelfMap::parse(&map) {
                Ok(m) => m,
                Err(e) => return input_error(&e),
            };
            let measure = match seed {
                Some(s) => induced_measure_seeded(&parsed, atoms, s),
                None => induced_measure(&parsed, atoms),
            };
            let measure = match measure {
                Ok(m) => m,
                Err(e) => return input_error(&e),
            };
            if let Some(path) = measure_out {
                if let Err(e) = std::fs::write(&path, measure.to_csv()) {
                    eprintln!("error: cannot write {path}: {e}");
                    return EXIT_IO;
                }
            }
            let cfg = adapted_carleson(atoms, seed);
            match carleson_ratio_profile(&measure, &cfg.h_grid, cfg.n_theta) {
                Ok(p) => {
                    let content = match out.format {
                        Format::Json => {
                            report::carleson_to_json(&parsed.spec_string(), &p.h, &p.ratios, 0.0)
                        }
                        Format::Csv => report::carleson_to_csv(&p.h, &p.ratios),
                    };
                    write_artifact(&out, &content)
                }
                Err(e) => input_error(&e),
            }
        }
        Cmd::IdentityCheck {
            map,
            radius,
            numerics,
            out,
        } => {
            let parsed = match SelfMap::parse(&map) {
                Ok(m) => m,
                Err(e) => return input_error(&e),
            };
            if !(0.0 < radius && radius < 1.0) {
                return input_error(&Error::Domain("radius must lie in (0, 1)".into()));
            }
            let (budget, quad) = match (numerics.budget(), numerics.quad()) {
                (Ok(b), Ok(q)) => (b, q),
                (Err(e), _) | (_, Err(e)) => return input_error(&e),
            };
            // non-convergence degrades to a flagged artifact
            let mut flags = Vec::new();
            let counting = match essnorm::counting_side_at(&parsed, radius, &budget) {
                Ok(v) => v,
                Err(e) if e.is_numerical() => {
                    flags.push(format!("counting r={radius}: {e}"));
                    0.0
                }
                Err(e) => return input_error(&e),
            };
            let integral = match essnorm::integral_side_at(&parsed, radius, &budget, &quad) {
                Ok((v, flag)) => {
                    if let Some(f) = flag {
                        flags.push(f);
                    }
                    v
                }
                Err(e) => return input_error(&e),
            };
            let gap = (counting - integral).abs();
            let content = match out.format {
                Format::Json => report::identity_to_json(
                    &parsed.spec_string(),
                    radius,
                    counting,
                    integral,
                    gap,
                    &flags,
                ),
                Format::Csv => report::identity_to_csv(radius, counting, integral, gap),
            };
            let code = write_artifact(&out, &content);
            if code == EXIT_OK && !flags.is_empty() {
                EXIT_NUMERIC
            } else {
                code
            }
        }
        Cmd::Analyze {
            map,
            schedule,
            numerics,
            carleson,
            atoms,
            seed,
            timing,
            out,
        } => {
            let parsed = match SelfMap::parse(&map) {
                Ok(m) => m,
                Err(e) => return input_error(&e),
            };
            let radii = match schedule.resolve() {
                Ok(r) => r,
                Err(e) => return input_error(&e),
            };
            let (budget, quad) = match (numerics.budget(), numerics.quad()) {
                (Ok(b), Ok(q)) => (b, q),
                (Err(e), _) | (_, Err(e)) => return input_error(&e),
            };
            let cfg = ReportConfig {
                radii,
                angles: budget,
                quad,
                carleson: if carleson {
                    Some(adapted_carleson(atoms, seed))
                } else {
                    None
                },
                timing,
            };
            match essnorm::essential_norm_report(&parsed, &cfg) {
                Ok(report_data) => {
                    let content = match out.format {
                        Format::Json => report::report_to_json(&report_data),
                        Format::Csv => report::report_to_csv(&report_data),
                    };
                    let code = write_artifact(&out, &content);
                    if code == EXIT_OK && !report_data.flags.is_empty() {
                        EXIT_NUMERIC
                    } else {
                        code
                    }
                }
                Err(e) => input_error(&e),
            }
        }
        Cmd::Catalog { out } => {
            let content = match out.format {
                Format::Json => report::catalog_to_json(),
                Format::Csv => report::catalog_to_csv(),
            };
            write_artifact(&out, &content)
        }
    }
}

enum ProfileKind {
    Counting,
    Integral,
}

fn profile_cmd(
    map: &str,
    schedule: &ScheduleOpts,
    numerics: &NumericOpts,
    out: &OutputOpts,
    kind: ProfileKind,
) -> i32 {
    let parsed = match SelfMap::parse(map) {
        Ok(m) => m,
        Err(e) => return input_error(&e),
    };
    let radii = match schedule.resolve() {
        Ok(r) => r,
        Err(e) => return input_error(&e),
    };
    let (budget, quad) = match (numerics.budget(), numerics.quad()) {
        (Ok(b), Ok(q)) => (b, q),
        (Err(e), _) | (_, Err(e)) => return input_error(&e),
    };
    // per-radius degradation: non-convergence flags the entry instead of
    // aborting the artifact
    let label = match kind {
        ProfileKind::Counting => "counting",
        ProfileKind::Integral => "integral",
    };
    let mut values = Vec::with_capacity(radii.len());
    let mut flags = Vec::new();
    for &r in &radii {
        let value = match kind {
            ProfileKind::Counting => match essnorm::counting_side_at(&parsed, r, &budget) {
                Ok(v) => v,
                Err(e) if e.is_numerical() => {
                    flags.push(format!("{label} r={r}: {e}"));
                    0.0
                }
                Err(e) => return input_error(&e),
            },
            ProfileKind::Integral => {
                match essnorm::integral_side_at(&parsed, r, &budget, &quad) {
                    Ok((v, flag)) => {
                        if let Some(f) = flag {
                            flags.push(f);
                        }
                        v
                    }
                    Err(e) => return input_error(&e),
                }
            }
        };
        values.push(value);
    }
    let content = match out.format {
        Format::Json => {
            report::profile_to_json(&parsed.spec_string(), label, &radii, &values, &flags, 0.0)
        }
        Format::Csv => report::profile_to_csv(label, &radii, &values),
    };
    let code = write_artifact(out, &content);
    if code == EXIT_OK && !flags.is_empty() {
        EXIT_NUMERIC
    } else {
        code
    }
}
