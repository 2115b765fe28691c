//! Argument parsing and dispatch behind the `lpopalg` binary.

mod table;

use std::path::Path;
use std::time::Instant;

use clap::error::ErrorKind;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lpopalg::cuntz::{cuntz_relation_check, graph_relation_check, DirectedGraph, GraphAssignment, TruncatedRep};
use lpopalg::dynamics::{
    cantor_act, coe_verify, fixed_point_census, order_check, parse_group_word, reduced_norm, AlternatingWord, CoeData,
    CrossedElement, FiniteAction,
};
use lpopalg::groupalg::{
    fp_lambda_norm, hom_decompose_with, isom_group_verify, FiniteGroup, GroupFunction, HomCandidate,
};
use lpopalg::json::Cx;
use lpopalg::lamperti::{classify_spatial, lamperti_decompose_with};
use lpopalg::opnorm::{opnorm, opnorm_certified};
use lpopalg::suite::{run_suite, suite_names, SuiteOptions, ORACLE_TIME_LIMIT};
use lpopalg::{Error, Exponent, Operator, SearchConfig};

pub const EXIT_FAILED_CHECK: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_SCOPE: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "lpopalg", version, about = "Numerical toolkit for L^p operator algebras")]
struct Cli {
    /// Seed for every random choice made by the command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance for classification and decomposition.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Print a plain table instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Print JSON (the default; combine with --table to get both).
    #[arg(long, global = true)]
    json: bool,
    /// Include wall time in the report. Reports are then no longer reproducible.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the p → p operator norm of a matrix.
    Opnorm {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        p: f64,
        /// Certify with the grid oracle (dimension at most 3).
        #[arg(long)]
        certify: bool,
        /// Number of random starts.
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Spatial isometries and partial isometries.
    #[command(subcommand)]
    Lamperti(LampertiCmd),
    /// Reduced group algebras of finite groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Leavitt relations and graph algebras.
    #[command(subcommand)]
    Cuntz(CuntzCmd),
    /// Crossed products and the boundary action of Z2 * Z3.
    #[command(subcommand, name = "dyn")]
    Dyn(DynCmd),
    /// Run an acceptance block.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(suite_names()))]
        name: String,
        /// Largest Cantor depth for the cantor-order block.
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
}

#[derive(Args)]
struct MatrixP {
    #[arg(long)]
    matrix: String,
    #[arg(long)]
    p: f64,
}

#[derive(Subcommand)]
enum LampertiCmd {
    /// Factor an invertible isometry as phases times a weighted permutation.
    Decompose(MatrixP),
    /// Decide whether a matrix is a spatial partial isometry.
    Classify(MatrixP),
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Norm of λ_p(f).
    Norm {
        /// A name (Z4, S3, Z2xZ2, ...) or a JSON multiplication table.
        #[arg(long)]
        group: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        p: f64,
    },
    /// Check that the isometries are exactly the phase translations.
    VerifyIsom {
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Recover (θ, γ) from the images of a homomorphism.
    Hom {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Subcommand)]
enum CuntzCmd {
    /// Truncated spatial representation of the Leavitt algebra on ℓ^p(Z).
    Rep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        p: f64,
        /// Verify the relations on the interior of the window.
        #[arg(long)]
        check: bool,
    },
    /// Check the graph algebra relations for an assignment of operators.
    Graph {
        #[arg(long)]
        graph: String,
        /// Defaults to the matrix-unit assignment on ℓ^p(vertices).
        #[arg(long)]
        assignment: Option<String>,
    },
}

#[derive(Subcommand)]
enum DynCmd {
    /// Apply a group word to a point of the boundary.
    Act {
        #[arg(long)]
        word: String,
        #[arg(long)]
        point: String,
    },
    /// Verify a² = 1 and b³ = 1 on every word of depth 3..=depth.
    OrderCheck {
        #[arg(long)]
        depth: usize,
    },
    /// Fraction of depth-n words fixed by a group word.
    Census {
        #[arg(long)]
        word: String,
        #[arg(long)]
        depth: usize,
    },
    /// Reduced crossed product norm of f.
    CrossedNorm {
        #[arg(long)]
        action: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        p: f64,
    },
    /// Verify continuous orbit equivalence cocycle identities.
    Coe {
        #[arg(long)]
        data: String,
    },
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    seed: u64,
    outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time: Option<f64>,
}

/// Command failure mapped onto an exit code.
enum Failure {
    Validation(String),
    Scope(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_scope() {
            Failure::Scope(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Validation(format!("invalid JSON: {e}"))
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

/// Collects every input byte so the report can fingerprint them.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    /// Reads `arg` as a file when it names one, otherwise as inline text.
    fn read(&mut self, arg: &str) -> std::result::Result<String, Failure> {
        let text = if Path::new(arg).is_file() {
            std::fs::read_to_string(arg).map_err(|e| Failure::Validation(format!("{arg}: {e}")))?
        } else {
            arg.to_string()
        };
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn json<T: for<'de> Deserialize<'de>>(&mut self, arg: &str) -> std::result::Result<T, Failure> {
        let text = self.read(arg)?;
        serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{arg}: {e}")))
    }
}

fn exponent(p: f64) -> std::result::Result<Exponent, Failure> {
    Ok(Exponent::new(p)?)
}

fn group(inputs: &mut Inputs, arg: &str) -> std::result::Result<FiniteGroup, Failure> {
    match FiniteGroup::from_name(arg) {
        Ok(g) => Ok(g),
        Err(_) => inputs.json(arg),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HomSpec {
    Images(HomCandidate),
    Data {
        source: FiniteGroup,
        target: FiniteGroup,
        theta: Vec<usize>,
        gamma: Vec<Cx>,
    },
}

#[derive(Deserialize)]
struct CoeInput {
    sigma: FiniteAction,
    rho: FiniteAction,
    #[serde(flatten)]
    data: CoeData,
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Outcome {
    let cfg = SearchConfig::with_seed(cli.seed);
    match &cli.command {
        Command::Opnorm {
            matrix,
            p,
            certify,
            starts,
        } => {
            let a: Operator = inputs.json(matrix)?;
            let mut cfg = cfg;
            if let Some(s) = starts {
                cfg.starts = *s;
            }
            let est = if *certify {
                opnorm_certified(&a, exponent(*p)?, &cfg)?
            } else {
                opnorm(&a, exponent(*p)?, &cfg)?
            };
            Ok((to_value(&est), true))
        }
        Command::Lamperti(LampertiCmd::Decompose(m)) => {
            let a: Operator = inputs.json(&m.matrix)?;
            let si = lamperti_decompose_with(&a, exponent(m.p)?, cli.tol, &cfg)?;
            Ok((to_value(&si), true))
        }
        Command::Lamperti(LampertiCmd::Classify(m)) => {
            let a: Operator = inputs.json(&m.matrix)?;
            let v = classify_spatial(&a, exponent(m.p)?, cli.tol)?;
            Ok((to_value(&v), true))
        }
        Command::Group(GroupCmd::Norm { group: g, f, p }) => {
            let g = group(inputs, g)?;
            let values: Vec<Cx> = inputs.json(f)?;
            let f = GroupFunction::new(g, values.iter().map(|c| c.0).collect())?;
            Ok((to_value(&fp_lambda_norm(&f, exponent(*p)?, &cfg)?), true))
        }
        Command::Group(GroupCmd::VerifyIsom { group: g, p, trials }) => {
            let g = group(inputs, g)?;
            let rep = isom_group_verify(&g, exponent(*p)?, *trials, &cfg)?;
            Ok((to_value(&rep), rep.violations() == 0))
        }
        Command::Group(GroupCmd::Hom { spec, p }) => {
            let h = match inputs.json::<HomSpec>(spec)? {
                HomSpec::Images(h) => h,
                HomSpec::Data {
                    source,
                    target,
                    theta,
                    gamma,
                } => HomCandidate::from_data(&source, &target, &theta, &gamma.iter().map(|c| c.0).collect::<Vec<_>>())?,
            };
            Ok((to_value(&hom_decompose_with(&h, exponent(*p)?, cli.tol, &cfg)?), true))
        }
        Command::Cuntz(CuntzCmd::Rep { n, window, p, check }) => {
            let rep = TruncatedRep::new(*n, *window, exponent(*p)?)?;
            let interior = rep.interior();
            let mut out = json!({
                "n": n,
                "window": window,
                "p": p,
                "size": rep.size(),
                "interior": [interior.first(), interior.last()],
            });
            let mut ok = true;
            if *check {
                let report = cuntz_relation_check(&rep);
                ok = report.exact();
                out["relations"] = to_value(&report);
            }
            Ok((out, ok))
        }
        Command::Cuntz(CuntzCmd::Graph { graph, assignment }) => {
            let q: DirectedGraph = inputs.json(graph)?;
            let asg = match assignment {
                Some(a) => inputs.json(a)?,
                None => GraphAssignment::matrix_units(&q),
            };
            let report = graph_relation_check(&q, &asg, None)?;
            Ok((to_value(&report), report.passed()))
        }
        Command::Dyn(DynCmd::Act { word, point }) => {
            let g = parse_group_word(word)?;
            inputs.hasher.update(word.as_bytes());
            let text = inputs.read(point)?;
            let x: AlternatingWord = match serde_json::from_str(&text) {
                Ok(x) => x,
                Err(_) => text.trim().parse()?,
            };
            let y = cantor_act(&g, &x)?;
            Ok((json!({"word": word, "point": x, "image": y}), true))
        }
        Command::Dyn(DynCmd::OrderCheck { depth }) => {
            let reports = (3..=*depth).map(order_check).collect::<lpopalg::Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.passed());
            Ok((to_value(&reports), ok))
        }
        Command::Dyn(DynCmd::Census { word, depth }) => {
            inputs.hasher.update(word.as_bytes());
            let c = fixed_point_census(&parse_group_word(word)?, *depth)?;
            Ok((to_value(&c), true))
        }
        Command::Dyn(DynCmd::CrossedNorm { action, f, p }) => {
            let act: FiniteAction = inputs.json(action)?;
            let text = inputs.read(f)?;
            let f = CrossedElement::from_json(&act, &text)?;
            Ok((to_value(&reduced_norm(&f, exponent(*p)?, &cfg)?), true))
        }
        Command::Dyn(DynCmd::Coe { data }) => {
            let input: CoeInput = inputs.json(data)?;
            let report = coe_verify(&input.data, &input.sigma, &input.rho)?;
            Ok((to_value(&report), report.passed()))
        }
        Command::Suite { name, depth } => {
            let opts = SuiteOptions {
                seed: cli.seed,
                depth: *depth,
            };
            let report = run_suite(name, &opts)?;
            let mut out = to_value(&report);
            if cli.timing {
                for (c, r) in out["criteria"]
                    .as_array_mut()
                    .into_iter()
                    .flatten()
                    .zip(&report.criteria)
                {
                    c["elapsed_seconds"] = json!(r.elapsed.as_secs_f64());
                    if r.id == 1 {
                        c["within_time_limit"] = json!(r.elapsed < ORACLE_TIME_LIMIT);
                    }
                }
            }
            Ok((out, report.passed))
        }
    }
}

/// Caps rayon at `LPOPALG_THREADS` workers when the variable is set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("LPOPALG_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            // only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line. `args` excludes the program name.
pub fn dispatch<I, S>(args: I) -> Dispatch
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("lpopalg".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                Dispatch {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Dispatch {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut inputs = Inputs { hasher: Sha256::new() };
    for a in &argv {
        inputs.hasher.update(a.as_bytes());
        inputs.hasher.update([0]);
    }
    let start = Instant::now();
    let outcome = run(&cli, &mut inputs);
    let elapsed = start.elapsed();
    match outcome {
        Ok((outputs, ok)) => {
            let report = RunReport {
                command: argv.join(" "),
                inputs_digest: hex::encode(inputs.hasher.finalize()),
                seed: cli.seed,
                outputs,
                wall_time: cli.timing.then_some(elapsed.as_secs_f64()),
            };
            let value = to_value(&report);
            let mut stdout = String::new();
            if !cli.table || cli.json {
                stdout.push_str(&serde_json::to_string_pretty(&value).expect("report serialises"));
                stdout.push('\n');
            }
            if cli.table {
                stdout.push_str(&table::render(&value));
            }
            Dispatch {
                code: if ok { 0 } else { EXIT_FAILED_CHECK },
                stdout,
                stderr: String::new(),
            }
        }
        Err(Failure::Validation(msg)) => Dispatch {
            code: EXIT_VALIDATION,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Scope(msg)) => Dispatch {
            code: EXIT_SCOPE,
            stdout: String::new(),
            stderr: format!("out of scope: {msg}\n"),
        },
    }
}
