//! Command-line front end. [`run`] parses arguments and returns the exit code
//! together with the text destined for stdout and stderr, so the whole
//! surface is testable in-process; the binary only prints.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::coeffs::{solve_coeffs, CoeffKind, CoeffTable};
use crate::counts::{count_at, fixture_dir, regular, regular_c_form, roots_numeric, two_legged, CountKind};
use crate::exact::{rat_to_string, PolyNu};
use crate::freud::gen_freud;
use crate::hypergeom::{count_general, count_sphere, count_torus, hexic_closed, quartic_closed};
use crate::lab::{expansion_check, lattice, residuals, ExpansionOptions, ResidualOptions};
use crate::oracle::{enumerate_with, DEFAULT_CAP};
use crate::series::{build_rec, build_tables};
use crate::verify::run_checks;

#[derive(Parser, Debug)]
#[command(name = "mapgenus", version, about = "Exact counts of even-valent maps by genus")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Fixture directory (overrides MAPGENUS_DATA_DIR).
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Regular,
    TwoLegged,
}

impl From<KindArg> for CountKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Regular => CountKind::Regular,
            KindArg::TwoLegged => CountKind::TwoLegged,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolyKind {
    /// Two-legged polynomial, multiplied by c_ν^j.
    #[value(name = "Q")]
    Q,
    /// Regular polynomial, multiplied by C_ν^j.
    #[value(name = "S")]
    S,
    /// Regular polynomial in the c_ν normalization.
    #[value(name = "Sc")]
    Sc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoeffArg {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    Sphere,
    Torus,
    General,
    Quartic,
    Hexic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Rec,
    Free,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of labeled maps at one valence.
    Count {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        nu: i64,
    },
    /// Count polynomial in ν, coefficients lowest degree first.
    Poly {
        #[arg(long, value_enum)]
        kind: PolyKind,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        j: u32,
        /// Also print numeric roots.
        #[arg(long)]
        roots: bool,
    },
    /// Solve for (or load) the hypergeometric coefficient table of one genus.
    Coeffs {
        #[arg(long, value_enum)]
        kind: CoeffArg,
        #[arg(long)]
        g: u32,
        /// Write the JSON table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Load from the fixture directory rather than solving.
        #[arg(long)]
        fixture: bool,
    },
    /// Evaluate a closed-form count.
    Formula {
        #[arg(long, value_enum)]
        eq: Equation,
        #[arg(long)]
        nu: Option<i64>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        j: u32,
        #[arg(long, value_enum, default_value_t = KindArg::Regular)]
        kind: KindArg,
        /// Coefficient table JSON for `--eq general` (solved on the fly if absent).
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// Dump a series table.
    Series {
        #[arg(long, value_enum)]
        table: TableArg,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        j: u32,
    },
    /// Brute-force genus histogram.
    Oracle {
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 0)]
        legs: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Freud function of one valence.
    Freud {
        #[arg(long)]
        nu: u32,
        /// Print every term, one per line.
        #[arg(long)]
        print: bool,
    },
    /// Floating-point checks.
    Lab {
        #[command(subcommand)]
        which: LabCommand,
    },
    /// Run the cross-validation matrix.
    Verify {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum LabCommand {
    /// Lattice-identity residuals per n.
    Residuals {
        #[arg(long)]
        nu: u32,
        #[arg(long = "N")]
        n_big: u32,
        #[arg(long)]
        u: f64,
        /// Highest recurrence index to extract (default 3N/2 + ν + 1).
        #[arg(long)]
        nmax: Option<usize>,
        /// Relative finite-difference step.
        #[arg(long, default_value_t = 1e-12)]
        step: f64,
    },
    /// Topological-expansion errors over a list of N.
    Expand {
        #[arg(long)]
        nu: u32,
        #[arg(long)]
        u: f64,
        #[arg(long = "Ns", value_delimiter = ',', default_values_t = vec![8u32, 16, 32])]
        ns: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Bad flags or an impossible request: exit 2.
    Usage(String),
    /// A verification mismatch: exit 1, with the report still on stdout.
    Verify(String),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    let exec = || dispatch(&cli);
    let result = match cli.threads {
        None => exec(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(exec),
            Err(e) => Err(("".into(), usage(e))),
        },
    };
    match result {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err((stdout, Failure::Usage(m))) => Outcome { code: 2, stdout, stderr: format!("error: {m}\n") },
        Err((stdout, Failure::Verify(m))) => Outcome { code: 1, stdout, stderr: format!("{m}\n") },
    }
}

type Res = Result<String, (String, Failure)>;

fn fail(f: Failure) -> (String, Failure) {
    (String::new(), f)
}

fn json_line(v: serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json value"))
}

fn coeff_strings(p: &PolyNu) -> Vec<String> {
    p.coeffs().iter().map(rat_to_string).collect()
}

fn dispatch(cli: &Cli) -> Res {
    let fmt = cli.format;
    let dir = cli.data_dir.clone().unwrap_or_else(fixture_dir);
    match &cli.command {
        Command::Count { kind, g, j, nu } => {
            if *nu < 1 || *j < 1 {
                return Err(fail(Failure::Usage("need nu >= 1 and j >= 1".into())));
            }
            let (rec, free) = build_tables(*g, *j).map_err(|e| fail(usage(e)))?;
            let c = count_at((*kind).into(), *g, *j, *nu, &rec, &free).map_err(|e| fail(usage(e)))?;
            Ok(match fmt {
                Format::Json => json_line(json!({
                    "kind": CountKind::from(*kind), "g": g, "j": j, "nu": nu, "count": c.to_string()
                })),
                _ => format!("{c}\n"),
            })
        }
        Command::Poly { kind, g, j, roots } => {
            if *j < 1 {
                return Err(fail(Failure::Usage("need j >= 1".into())));
            }
            let (poly, pre) = match kind {
                PolyKind::Q => {
                    let rec = build_rec(*g, *j).map_err(|e| fail(usage(e)))?;
                    (two_legged(*g, *j, &rec).map_err(|e| fail(usage(e)))?.polynomial, "c_nu")
                }
                PolyKind::S => {
                    let (_, free) = build_tables(*g, *j).map_err(|e| fail(usage(e)))?;
                    (regular(*g, *j, &free).map_err(|e| fail(usage(e)))?.polynomial, "catalan")
                }
                PolyKind::Sc => {
                    let (_, free) = build_tables(*g, *j).map_err(|e| fail(usage(e)))?;
                    (regular_c_form(*g, *j, &free).map_err(|e| fail(usage(e)))?, "c_nu")
                }
            };
            let name = match kind {
                PolyKind::Q => "Q",
                PolyKind::S => "S",
                PolyKind::Sc => "Sc",
            };
            // Imaginary parts at rounding level are printed as exact zeros.
            let rs: Vec<_> = if *roots { roots_numeric(&poly) } else { Vec::new() }
                .into_iter()
                .map(|z| if z.im.abs() < 1e-12 * z.re.abs().max(1.0) { num_complex::Complex64::new(z.re, 0.0) } else { z })
                .collect();
            Ok(match fmt {
                Format::Json => {
                    let mut v = json!({
                        "kind": name, "g": g, "j": j, "prefactor": pre, "coeffs": coeff_strings(&poly)
                    });
                    if *roots {
                        v["roots"] = json!(rs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>());
                    }
                    json_line(v)
                }
                _ => {
                    let mut s = format!("{name}_{{{g},{j}}}(nu) = {poly}\ncoeffs = [{}]\n", coeff_strings(&poly).join(", "));
                    for z in &rs {
                        let _ = writeln!(s, "root {:.12} {:+.12}i", z.re, z.im);
                    }
                    s
                }
            })
        }
        Command::Coeffs { kind, g, out, fixture } => {
            let k = match kind {
                CoeffArg::A => CoeffKind::A,
                CoeffArg::B => CoeffKind::B,
            };
            let t = if *fixture { CoeffTable::from_fixture(k, *g, &dir) } else { solve_coeffs(k, *g) }
                .map_err(|e| fail(usage(e)))?;
            let text = format!("{}\n", t.to_json());
            if let Some(path) = out {
                std::fs::write(path, &text).map_err(|e| fail(usage(format!("{}: {e}", path.display()))))?;
                return Ok(format!("wrote {}\n", path.display()));
            }
            Ok(match fmt {
                Format::Json => text,
                _ => {
                    let letter = if k == CoeffKind::A { 'a' } else { 'b' };
                    t.entries.iter().enumerate().map(|(l, e)| format!("{letter}_{l} = {e}\n")).collect()
                }
            })
        }
        Command::Formula { eq, nu, g, j, kind, coeffs } => formula(*eq, *nu, *g, *j, (*kind).into(), coeffs.as_ref(), fmt),
        Command::Series { table, g, j } => {
            let (rec, free) = match table {
                TableArg::Rec => (build_rec(*g, *j).map_err(|e| fail(usage(e)))?, None),
                TableArg::Free => {
                    let (r, f) = build_tables(*g, *j).map_err(|e| fail(usage(e)))?;
                    (r, Some(f))
                }
            };
            let rows = free.as_ref().unwrap_or(&rec).rows();
            Ok(match fmt {
                Format::Json => json_line(json!(rows)),
                _ => rows
                    .iter()
                    .map(|r| format!("{} {} [{}]/{} x^({}nu{:+})\n", r.g, r.j, r.coeff_num.join(", "), r.coeff_den, r.exp_a, r.exp_b))
                    .collect(),
            })
        }
        Command::Oracle { nu, j, legs, cap } => {
            let h = enumerate_with(*nu, *j, *legs, *cap, cli.threads).map_err(|e| fail(usage(e)))?;
            Ok(match fmt {
                Format::Json => format!("{}\n", h.to_json()),
                _ => {
                    let mut s = String::new();
                    for (g, c) in &h.counts {
                        let _ = writeln!(s, "g={g} {c}");
                    }
                    let _ = writeln!(s, "total_matchings {}", h.total_matchings);
                    s
                }
            })
        }
        Command::Freud { nu, print } => {
            let f = gen_freud(*nu).map_err(|e| fail(usage(e)))?;
            Ok(match (fmt, print) {
                (Format::Json, _) => json_line(json!({
                    "nu": nu, "terms": f.terms.iter().map(|t| t.shifts.clone()).collect::<Vec<_>>()
                })),
                (_, true) => f.terms.iter().map(|t| format!("{t}\n")).collect(),
                (_, false) => format!("nu={nu} terms={} distinct={}\n", f.terms.len(), f.grouped().len()),
            })
        }
        Command::Lab { which } => lab(which, fmt),
        Command::Verify { quick } => {
            let checks = run_checks(*quick, &dir);
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            let text = match fmt {
                Format::Json => json_line(json!(checks)),
                _ => checks
                    .iter()
                    .map(|c| format!("{:<32} {:<4} {}\n", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail))
                    .collect(),
            };
            if failed.is_empty() {
                Ok(text)
            } else {
                Err((text, Failure::Verify(format!("failed: {}", failed.join(", ")))))
            }
        }
    }
}

fn formula(
    eq: Equation,
    nu: Option<i64>,
    g: Option<u32>,
    j: u32,
    kind: CountKind,
    coeffs: Option<&PathBuf>,
    fmt: Format,
) -> Res {
    let need_nu = || nu.ok_or_else(|| fail(Failure::Usage("--nu is required".into())));
    let fixed_nu = |want: i64| match nu {
        Some(v) if v != want => Err(fail(Failure::Usage(format!("this formula is for nu = {want}")))),
        _ => Ok(want),
    };
    let regular_only = || {
        if kind != CountKind::Regular {
            Err(fail(Failure::Usage("this formula counts regular maps only".into())))
        } else {
            Ok(())
        }
    };
    let (value, nu_used, g_used) = match eq {
        Equation::Sphere => {
            regular_only()?;
            let v = need_nu()?;
            (count_sphere(v, j as i64).map_err(|e| fail(usage(e)))?, v, 0)
        }
        Equation::Torus => {
            regular_only()?;
            let v = need_nu()?;
            (count_torus(v, j as i64).map_err(|e| fail(usage(e)))?, v, 1)
        }
        Equation::Quartic => {
            regular_only()?;
            let gg = g.ok_or_else(|| fail(Failure::Usage("--g is required".into())))?;
            (quartic_closed(gg, j as i64).map_err(|e| fail(usage(e)))?, fixed_nu(2)?, gg)
        }
        Equation::Hexic => {
            let gg = g.ok_or_else(|| fail(Failure::Usage("--g is required".into())))?;
            (hexic_closed(kind, gg, j as i64).map_err(|e| fail(usage(e)))?, fixed_nu(3)?, gg)
        }
        Equation::General => {
            let gg = g.ok_or_else(|| fail(Failure::Usage("--g is required".into())))?;
            let v = need_nu()?;
            let ck = if kind == CountKind::Regular { CoeffKind::B } else { CoeffKind::A };
            let table = match coeffs {
                Some(path) => {
                    let s = std::fs::read_to_string(path).map_err(|e| fail(usage(format!("{}: {e}", path.display()))))?;
                    CoeffTable::from_json(&s).map_err(|e| fail(usage(e)))?
                }
                None => solve_coeffs(ck, gg).map_err(|e| fail(usage(e)))?,
            };
            (count_general(kind, gg, v, j, &table).map_err(|e| fail(usage(e)))?, v, gg)
        }
    };
    Ok(match fmt {
        Format::Json => json_line(json!({
            "eq": format!("{eq:?}").to_lowercase(), "kind": kind, "nu": nu_used, "g": g_used, "j": j,
            "count": value.to_string()
        })),
        _ => format!("{value}\n"),
    })
}

fn lab(which: &LabCommand, fmt: Format) -> Res {
    match which {
        LabCommand::Residuals { nu, n_big, u, nmax, step } => {
            let nmax = nmax.unwrap_or((3 * n_big / 2 + nu + 1) as usize);
            let st = lattice(*nu, *n_big, *u, nmax).map_err(|e| fail(usage(e)))?;
            let rep = residuals(&st, &ResidualOptions { rel_step: *step, n_range: None }).map_err(|e| fail(usage(e)))?;
            Ok(match fmt {
                Format::Json => json_line(json!(rep)),
                _ => rep.to_csv(),
            })
        }
        LabCommand::Expand { nu, u, ns } => {
            let rep = expansion_check(*nu, *u, ns, &ExpansionOptions::default()).map_err(|e| fail(usage(e)))?;
            Ok(match fmt {
                Format::Json => json_line(json!(rep)),
                Format::Csv => rep.to_csv(),
                Format::Table => {
                    let mut s = rep.to_csv();
                    for r in &rep.ratios {
                        let _ = writeln!(
                            s,
                            "# N={}->{}: err_r ratio {:.4e} (target {:.4e}), err_f ratio {:.4e} (target {:.4e}) {}",
                            r.n_big,
                            2 * r.n_big,
                            r.r_ratio,
                            r.r_target,
                            r.f_ratio,
                            r.f_target,
                            if r.passed { "PASS" } else { "FAIL" }
                        );
                    }
                    let _ = writeln!(
                        s,
                        "# f0 closed {:.17e} series {:.17e} tail {:.1e} {}",
                        rep.f0_closed,
                        rep.f0_series,
                        rep.f0_tail,
                        if rep.f0_agrees() { "PASS" } else { "FAIL" }
                    );
                    s
                }
            })
        }
    }
}
