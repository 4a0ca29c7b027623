//! Command-line front end for the `sobolev` crate.
//!
//! [`run`] parses an argument vector, dispatches to the library and returns
//! the exit code together with what should go to stdout and stderr, so the
//! binary and the tests share one code path.

pub mod audit;
pub mod json;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::panic::{self, AssertUnwindSafe};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sobolev::{Continuity, Error, Expr, QuadConfig, QuadResult, Regularity, Sobolev};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecomposeKind {
    /// Affine part and its W^{1,2} complement.
    Bergman,
    /// Part vanishing on the boundary and a combination of exp(x), exp(-x).
    Boundary,
}

#[derive(Debug, Parser)]
#[command(name = "sobolev", version, about = "W^{k,2} geometry, decompositions and weak derivatives on [0, 1]")]
struct Args {
    /// Sobolev regularity k of the inner product.
    #[arg(long, global = true, default_value_t = 1)]
    k: u32,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Subdivision budget per integral.
    #[arg(long = "max-subdiv", global = true, default_value_t = 2000)]
    max_subdiv: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// W^{k,2} norm of f.
    Norm {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// W^{k,2} inner product of f and g.
    Inner {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// W^{k,2} distance between f and g.
    Dist {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Cosine of the angle between f and g.
    Angle {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Projection of f onto the line through g.
    Proj {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Whether f lies in L2 and W^{1,2}.
    Member {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Largest Hölder quotient of f on a 201-point grid.
    Holder {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value_t = 0.5)]
        exponent: f64,
    },
    /// Checks that h is the weak derivative of f.
    Weakcheck {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        h: String,
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// Orthogonal decomposition of f in W^{1,2}.
    Decompose {
        #[arg(value_enum)]
        kind: DecomposeKind,
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Compares the closed-form boundary split with a Gram projection.
    Crosscheck {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Pairs a representer with g two ways.
    Riesz {
        #[arg(allow_hyphen_values = true)]
        representer: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Recomputes the reference values of the worked examples.
    Audit,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub k: Regularity,
    pub format: Format,
}

impl CliConfig {
    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            ..QuadConfig::default()
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Numeric(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IllConditioned { .. } => Failure::Numeric(e.to_string()),
            e if e.is_numeric() => Failure::Numeric(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn parse_expr(name: &str, src: &str) -> Result<Expr, Failure> {
    src.parse().map_err(|e: sobolev::ParseError| {
        let caret = format!("{}^", " ".repeat(src[..e.position.min(src.len())].chars().count()));
        Failure::Usage(format!("cannot parse {name}: {e}\n  {src}\n  {caret}"))
    })
}

fn f64_or_null(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn quad_json(r: &QuadResult) -> Value {
    json!({
        "value": f64_or_null(r.value),
        "error_estimate": f64_or_null(r.error_estimate),
        "subdivisions": r.subdivisions,
        "converged": r.converged,
        "diverged": r.diverged,
    })
}

fn continuity_json(c: Continuity) -> Value {
    match c {
        Continuity::Continuous => json!("continuous"),
        Continuity::Jump(size) => json!({ "jump": size }),
        Continuity::Unknown => json!("unknown"),
    }
}

struct Response {
    command: &'static str,
    inputs: Value,
    result: Value,
}

fn execute(command: &Command, cfg: &CliConfig) -> Result<Response, Failure> {
    let w = Sobolev::new(cfg.quad());
    let k = cfg.k;
    let k_json = json!(k.k());
    let response = match command {
        Command::Norm { f } => {
            let fe = parse_expr("f", f)?;
            let value = w.norm(&fe, k)?;
            Response { command: "norm", inputs: json!({ "f": f, "k": k_json }), result: json!({ "value": value }) }
        }
        Command::Inner { f, g } => {
            let (fe, ge) = (parse_expr("f", f)?, parse_expr("g", g)?);
            let value = w.inner(&fe, &ge, k)?;
            Response { command: "inner", inputs: json!({ "f": f, "g": g, "k": k_json }), result: json!({ "value": value }) }
        }
        Command::Dist { f, g } => {
            let (fe, ge) = (parse_expr("f", f)?, parse_expr("g", g)?);
            let value = w.dist(&fe, &ge, k)?;
            Response { command: "dist", inputs: json!({ "f": f, "g": g, "k": k_json }), result: json!({ "value": value }) }
        }
        Command::Angle { f, g } => {
            let (fe, ge) = (parse_expr("f", f)?, parse_expr("g", g)?);
            let c = w.cos_angle(&fe, &ge, k)?;
            Response {
                command: "angle",
                inputs: json!({ "f": f, "g": g, "k": k_json }),
                result: json!({ "cos_angle": c, "angle": c.clamp(-1.0, 1.0).acos() }),
            }
        }
        Command::Proj { f, g } => {
            let (fe, ge) = (parse_expr("f", f)?, parse_expr("g", g)?);
            let p = w.proj(&fe, &ge, k)?;
            Response {
                command: "proj",
                inputs: json!({ "f": f, "g": g, "k": k_json }),
                result: json!({ "coef": p.coef, "expression": p.expr.to_string() }),
            }
        }
        Command::Member { f } => {
            let fe = parse_expr("f", f)?;
            let m = w.membership(&fe);
            Response {
                command: "member",
                inputs: json!({ "f": f }),
                result: json!({
                    "in_L2": m.in_l2.as_str(),
                    "in_W12": m.in_w12.as_str(),
                    "continuity": continuity_json(m.continuity),
                    "detail": m.detail.iter().map(quad_json).collect::<Vec<_>>(),
                }),
            }
        }
        Command::Holder { f, exponent } => {
            let fe = parse_expr("f", f)?;
            let value = w.holder_quotient(&fe, *exponent)?;
            Response {
                command: "holder",
                inputs: json!({ "f": f, "exponent": exponent }),
                result: json!({ "value": value, "grid_points": 201 }),
            }
        }
        Command::Weakcheck { f, h, order } => {
            let (fe, he) = (parse_expr("f", f)?, parse_expr("h", h)?);
            let r = w.weak_check(&fe, &he, *order)?;
            let residuals: Vec<Value> = r
                .residuals
                .iter()
                .map(|t| json!({ "test_function": t.test_function, "lhs": t.lhs, "rhs": t.rhs, "residual": t.residual }))
                .collect();
            Response {
                command: "weakcheck",
                inputs: json!({ "f": f, "h": h, "order": order }),
                result: json!({
                    "verdict": if r.passed { "pass" } else { "fail" },
                    "max_residual": r.max_residual,
                    "scale": r.scale,
                    "residuals": residuals,
                }),
            }
        }
        Command::Decompose { kind: DecomposeKind::Bergman, f } => {
            let fe = parse_expr("f", f)?;
            let d = w.bergman_decompose(&fe)?;
            let eta = w.eta_recover(&d.q_part)?;
            let ends = |v: sobolev::decomp::EndpointValues| {
                json!({ "eta": v.eta, "eta1": v.eta1, "eta2": v.eta2.map_or(Value::Null, f64_or_null) })
            };
            Response {
                command: "decompose",
                inputs: json!({ "kind": "bergman", "f": f }),
                result: json!({
                    "p_part": d.p_part.to_string(),
                    "q_part": d.q_part.to_string(),
                    "coefficients": { "a": d.coeffs[0], "b": d.coeffs[1] },
                    "ortho_residual": d.ortho_residual,
                    "eta": {
                        "grid_points": eta.grid.len(),
                        "at_0": ends(eta.at_0),
                        "at_1": ends(eta.at_1),
                        "vanishes_on_boundary": eta.vanishes_on_boundary(1e-9),
                    },
                }),
            }
        }
        Command::Decompose { kind: DecomposeKind::Boundary, f } => {
            let fe = parse_expr("f", f)?;
            let d = w.boundary_decomposition(&fe)?;
            Response {
                command: "decompose",
                inputs: json!({ "kind": "boundary", "f": f }),
                result: json!({
                    "p_part": d.p_part.to_string(),
                    "q_part": d.q_part.to_string(),
                    "alpha": d.coeffs[0],
                    "beta": d.coeffs[1],
                    "ortho_residual": d.ortho_residual,
                }),
            }
        }
        Command::Crosscheck { f } => {
            let fe = parse_expr("f", f)?;
            let s = w.boundary_decompose(&fe)?;
            let diff = w.boundary_vs_gram_crosscheck(&fe)?;
            Response {
                command: "crosscheck",
                inputs: json!({ "f": f }),
                result: json!({ "alpha": s.alpha, "beta": s.beta, "max_abs_diff": diff }),
            }
        }
        Command::Riesz { representer, g } => {
            let (re, ge) = (parse_expr("representer", representer)?, parse_expr("g", g)?);
            let (pairing, functional_form) = w.riesz_apply(&re, &ge)?;
            Response {
                command: "riesz",
                inputs: json!({ "representer": representer, "g": g }),
                result: json!({
                    "pairing": pairing,
                    "functional_form": functional_form,
                    "abs_diff": (pairing - functional_form).abs(),
                }),
            }
        }
        Command::Audit => unreachable!("audit has its own output shape"),
    };
    Ok(response)
}

fn render_text(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(out, "{pad}{key}:");
                        render_text(v, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{key}: {}", scalar_text(v));
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(out, "{pad}-");
                        render_text(item, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}- {}", scalar_text(item));
                    }
                }
            }
        }
        v => {
            let _ = writeln!(out, "{pad}{}", scalar_text(v));
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map_or_else(|| n.to_string(), json::format_f64),
        other => other.to_string(),
    }
}

fn audit_text(report: &audit::AuditReport) -> String {
    let mut out = String::new();
    let width = report.entries.iter().map(|e| e.claim_id.len()).max().unwrap_or(0);
    for e in &report.entries {
        let diff = e.abs_diff.map_or_else(|| "-".to_string(), |d| format!("{d:.3e}"));
        let _ = writeln!(out, "{:<width$}  {:<12}  diff {:>10}  {}", e.claim_id, e.verdict.as_str(), diff, e.description);
    }
    out
}

fn dispatch(args: &Args) -> Result<String, Failure> {
    let cfg = CliConfig {
        abs_tol: args.abs_tol,
        rel_tol: args.rel_tol,
        max_subdivisions: args.max_subdiv,
        k: Regularity::new(args.k)?,
        format: args.format,
    };
    cfg.quad().validate().map_err(|e| Failure::Usage(e.to_string()))?;

    if let Command::Audit = args.command {
        let report = audit::audit(&Sobolev::new(cfg.quad()));
        return match cfg.format {
            Format::Json => json::to_string(&report, true).map(|s| s + "\n").map_err(|e| Failure::Internal(e.to_string())),
            Format::Text => Ok(audit_text(&report)),
        };
    }

    let response = execute(&args.command, &cfg)?;
    let mut doc = Map::new();
    doc.insert("command".into(), json!(response.command));
    doc.insert("inputs".into(), response.inputs);
    doc.insert("result".into(), response.result);
    doc.insert(
        "quadrature".into(),
        json!({ "abs_tol": cfg.abs_tol, "rel_tol": cfg.rel_tol, "max_subdivisions": cfg.max_subdivisions }),
    );
    let doc = Value::Object(doc);
    match cfg.format {
        Format::Json => json::to_string(&doc, true).map(|s| s + "\n").map_err(|e| Failure::Internal(e.to_string())),
        Format::Text => {
            let mut out = String::new();
            render_text(&doc, 0, &mut out);
            Ok(out)
        }
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };

    let result = panic::catch_unwind(AssertUnwindSafe(|| dispatch(&args)))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            Err(Failure::Internal(msg))
        });

    match result {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(Failure::Usage(msg)) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Numeric(msg)) => {
            Outcome { code: EXIT_NUMERIC, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
        Err(Failure::Internal(msg)) => {
            Outcome { code: EXIT_INTERNAL, stdout: String::new(), stderr: format!("internal error: {msg}\n") }
        }
    }
}
