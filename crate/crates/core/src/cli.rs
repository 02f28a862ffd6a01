//! Command-line front end behind the `cw` binary.
//!
//! Each run writes one JSON object or one CSV table. Both carry the fully
//! resolved configuration: JSON under `"config"`, CSV as a leading
//! `# config: {...}` comment line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::embedding::{
    exponent_bounds, poincare_constant_disc, q_from_ps, weighted_constant_check, ExponentBudget,
};
use crate::field::{bump_family, PolarGrid, BUMP_SEED};
use crate::maps::{ComplexPoint, ConformalMap, DomainFamily};
use crate::poisson::{solve, DirichletProblem, Lattice, Rhs};
use crate::quadrature::{
    brennan_direct, inverse_brennan, kpq_exponent, kpq_norm, DiscGridSpec, QuadResult, Verdict,
    DEFAULT_MAX_LEVELS, DEFAULT_TOL,
};
use crate::weight::WeightField;
use crate::{verify, Error};

/// Environment variable overriding the bump-family seed.
pub const SEED_ENV: &str = "CW_SEED";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "cw",
    version,
    about = "Conformal weights, Brennan integrals and Dirichlet transfer"
)]
pub struct Cli {
    /// Output format; `solve` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    #[serde(rename = "out_path")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Solver nodes mapped back to the domain.
    Disc,
    /// A rectangular lattice given by `--lattice`.
    Lattice,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct QuadArgs {
    /// Number of refinement levels.
    #[arg(long, default_value_t = DEFAULT_MAX_LEVELS)]
    pub levels: usize,
    /// Stopping tolerance between successive levels.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Radial cells of the base grid.
    #[arg(long = "n-r", default_value_t = 16)]
    pub n_r: usize,
    /// Angular cells of the base grid.
    #[arg(long = "n-theta", default_value_t = 16)]
    pub n_theta: usize,
    /// Radial grading exponent.
    #[arg(long, default_value_t = 3.0)]
    pub grading: f64,
}

impl QuadArgs {
    fn spec(&self) -> crate::Result<DiscGridSpec> {
        DiscGridSpec::new(self.n_r, self.n_theta, self.grading)
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate the conformal weight h = |phi'|^2 at a point.
    Weight {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainFamily,
        /// Point as "re,im".
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        at: ComplexPoint,
    },
    /// Integrate |phi'|^s over the domain.
    Brennan {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainFamily,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Integrate |psi'|^alpha over the disc.
    InverseBrennan {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainFamily,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Dilatation constant K_(p,q) of the composition operator.
    Kpq {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainFamily,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Admissible exponents for given p and integrability exponent alpha_0.
    Exponents {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = crate::embedding::DEFAULT_ALPHA0)]
        alpha0: f64,
        /// With s, report q = ps/(p+s-2) for p > 2 instead.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Poincare-Sobolev constant of the disc, optionally transferred to a domain.
    Constant {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 128)]
        nr: usize,
        #[arg(long, default_value_t = 128)]
        ntheta: usize,
        #[arg(long, value_parser = parse_domain)]
        domain: Option<DomainFamily>,
    },
    /// Solve Laplace(u) = f h on a domain with zero boundary values.
    Solve {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainFamily,
        /// Right-hand side: const:<c> or quartic.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rhs)]
        #[serde(serialize_with = "serialize_display")]
        f: Rhs,
        #[arg(long, default_value_t = 128)]
        nr: usize,
        #[arg(long, default_value_t = 128)]
        ntheta: usize,
        #[arg(long, value_enum, default_value_t = SampleMode::Disc)]
        sample: SampleMode,
        /// Lattice "x0,x1,y0,y1,nx,ny" for --sample lattice.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_lattice)]
        lattice: Option<Lattice>,
    },
    /// Run the full invariant suite.
    Verify,
}

fn serialize_display<S: serde::Serializer>(v: &Rhs, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_domain(s: &str) -> Result<DomainFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_point(s: &str) -> Result<ComplexPoint, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rhs(s: &str) -> Result<Rhs, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_lattice(s: &str) -> Result<Lattice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Bump seed from `CW_SEED` (decimal or `0x` hex), defaulting to `BUMP_SEED`.
pub fn seed_from_env() -> Result<u64, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            let t = v.trim();
            let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => t.parse(),
            };
            parsed.map_err(|_| {
                Error::InvalidArgument(format!("{SEED_ENV} must be an integer, got {v:?}"))
            })
        }
        Err(_) => Ok(BUMP_SEED),
    }
}

/// What a command produced, before formatting.
enum Output {
    /// One JSON object; in CSV mode written as `key,value` rows.
    Record(Value),
    /// Three-column table with extra JSON fields.
    Table {
        header: [&'static str; 3],
        rows: Vec<(f64, f64, f64)>,
        extra: Value,
    },
}

struct Outcome {
    output: Output,
    success: bool,
}

fn verdict_exit(v: Verdict) -> bool {
    v == Verdict::Converged
}

fn quad_table(res: &QuadResult, spec: DiscGridSpec, extra: Value) -> Output {
    let rows = res
        .level_values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let g = spec.at_level(k);
            (k as f64, (g.n_r * g.n_theta) as f64, *v)
        })
        .collect();
    let mut extra = extra;
    extra["verdict"] = json!(res.verdict);
    extra["value"] = json!(res.value);
    extra["error_estimate"] = json!(res.error_estimate);
    extra["levels_used"] = json!(res.levels_used);
    Output::Table {
        header: ["level", "cells", "value"],
        rows,
        extra,
    }
}

fn execute(cli: &Cli, seed: u64) -> crate::Result<Outcome> {
    let ok = |output| {
        Ok(Outcome {
            output,
            success: true,
        })
    };
    match &cli.command {
        Command::Weight { domain, at } => {
            let h = WeightField::for_family(*domain).eval(at.to_complex())?;
            ok(Output::Record(json!({ "h": h })))
        }
        Command::Brennan { domain, s, quad } => {
            let spec = quad.spec()?;
            let res = brennan_direct(
                &ConformalMap::to_disc(*domain),
                *s,
                spec,
                quad.levels,
                quad.tol,
            )?;
            Ok(Outcome {
                success: verdict_exit(res.verdict),
                output: quad_table(&res, spec, json!({})),
            })
        }
        Command::InverseBrennan {
            domain,
            alpha,
            quad,
        } => {
            let spec = quad.spec()?;
            let res = inverse_brennan(
                &ConformalMap::to_disc(*domain),
                *alpha,
                spec,
                quad.levels,
                quad.tol,
            )?;
            Ok(Outcome {
                success: verdict_exit(res.verdict),
                output: quad_table(&res, spec, json!({})),
            })
        }
        Command::Kpq { domain, p, q, quad } => {
            let spec = quad.spec()?;
            let s = kpq_exponent(*p, *q)?;
            let res = kpq_norm(
                &ConformalMap::to_disc(*domain),
                *p,
                *q,
                spec,
                quad.levels,
                quad.tol,
            )?;
            if res.verdict == Verdict::Divergent {
                return Err(Error::KpqDivergent { p: *p, q: *q });
            }
            Ok(Outcome {
                success: verdict_exit(res.verdict),
                output: quad_table(&res, spec, json!({ "s": s, "k": res.value })),
            })
        }
        Command::Exponents { p, alpha0, s } => match s {
            Some(s) => {
                let q = q_from_ps(*p, *s)?;
                let budget = ExponentBudget::new(*p, *alpha0)?.with_s(*s);
                ok(Output::Record(
                    json!({ "q": q, "alpha": budget.alpha, "conjectural": budget.is_conjectural() }),
                ))
            }
            None => {
                let b = exponent_bounds(*p, *alpha0)?;
                ok(Output::Record(
                    serde_json::to_value(b).unwrap_or(Value::Null),
                ))
            }
        },
        Command::Constant {
            r,
            nr,
            ntheta,
            domain,
        } => {
            let est = poincare_constant_disc(*r, PolarGrid::new(*nr, *ntheta)?, seed)?;
            let mut v = serde_json::to_value(est).unwrap_or(Value::Null);
            v["lower_bound"] = json!(est.is_lower_bound());
            if let Some(d) = domain {
                let bumps = bump_family(crate::embedding::BUMP_FAMILY_SIZE, seed);
                let t = weighted_constant_check(&ConformalMap::to_disc(*d), *r, &bumps)?;
                v["transfer"] = serde_json::to_value(t).unwrap_or(Value::Null);
            }
            ok(Output::Record(v))
        }
        Command::Solve {
            domain,
            f,
            nr,
            ntheta,
            sample,
            lattice,
        } => {
            let problem = DirichletProblem::new(ConformalMap::to_disc(*domain), f.clone())?;
            let sol = solve(&problem, PolarGrid::new(*nr, *ntheta)?)?;
            let rows = match (sample, lattice) {
                (SampleMode::Disc, _) => sol.domain_samples().collect(),
                (SampleMode::Lattice, Some(l)) => sol.lattice_samples(l),
                (SampleMode::Lattice, None) => {
                    return Err(Error::InvalidArgument(
                        "--sample lattice needs --lattice".into(),
                    ))
                }
            };
            let extra = json!({ "max_error": sol.max_error(&problem) });
            ok(Output::Table {
                header: ["x", "y", "u"],
                rows,
                extra,
            })
        }
        Command::Verify => {
            let report = verify::run(seed)?;
            Ok(Outcome {
                success: report.passed,
                output: Output::Record(serde_json::to_value(&report).unwrap_or(Value::Null)),
            })
        }
    }
}

fn write_output<W: Write>(
    mut out: W,
    format: OutputFormat,
    config: &Value,
    output: Output,
) -> io::Result<()> {
    match (format, output) {
        (OutputFormat::Json, Output::Record(mut v)) => {
            let mut obj = serde_json::Map::new();
            obj.insert("config".into(), config.clone());
            if let Value::Object(m) = &mut v {
                obj.append(m);
            } else {
                obj.insert("result".into(), v);
            }
            serde_json::to_writer_pretty(&mut out, &Value::Object(obj))?;
            writeln!(out)
        }
        (
            OutputFormat::Json,
            Output::Table {
                header,
                rows,
                extra,
            },
        ) => {
            let mut obj = serde_json::Map::new();
            obj.insert("config".into(), config.clone());
            if let Value::Object(mut m) = extra {
                obj.append(&mut m);
            }
            obj.insert("columns".into(), json!(header));
            obj.insert(
                "rows".into(),
                json!(rows
                    .iter()
                    .map(|(a, b, c)| [*a, *b, *c])
                    .collect::<Vec<_>>()),
            );
            serde_json::to_writer_pretty(&mut out, &Value::Object(obj))?;
            writeln!(out)
        }
        (OutputFormat::Csv, Output::Record(v)) => {
            writeln!(out, "# config: {config}")?;
            writeln!(out, "key,value")?;
            if let Value::Object(m) = v {
                for (k, val) in m {
                    match val {
                        Value::Number(n) => match n.as_f64() {
                            Some(x) if n.is_f64() => writeln!(out, "{k},{x:.16e}")?,
                            _ => writeln!(out, "{k},{n}")?,
                        },
                        other => writeln!(out, "{k},{other}")?,
                    }
                }
            }
            Ok(())
        }
        (
            OutputFormat::Csv,
            Output::Table {
                header,
                rows,
                extra,
            },
        ) => {
            writeln!(out, "# config: {config}")?;
            if let Value::Object(m) = extra {
                for (k, v) in m {
                    writeln!(out, "# {k}: {v}")?;
                }
            }
            crate::field::write_csv(out, header, rows)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExponentOutOfRange(_) | Error::KpqDivergent { .. } => 1,
        _ => 2,
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let seed = match seed_from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cw: {e}");
            return 2;
        }
    };
    let format = cli.output.unwrap_or(match cli.command {
        Command::Solve { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    });
    let mut config = serde_json::to_value(cli).unwrap_or(Value::Null);
    config["output"] = json!(format);
    config["seed"] = json!(seed);

    let outcome = match execute(cli, seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cw: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_output(&mut w, format, &config, outcome.output)?;
            w.flush()
        }),
        None => write_output(io::stdout().lock(), format, &config, outcome.output),
    };
    if let Err(e) = written {
        eprintln!("cw: cannot write output: {e}");
        return 2;
    }
    if outcome.success {
        0
    } else {
        1
    }
}
