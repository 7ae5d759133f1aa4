//! Command implementations behind the `anyonkit` binary.
//!
//! Every successful run prints one `anyonkit-out/1` JSON document on
//! stdout. Exit status 0 means success, 1 a residual above tolerance, and 2
//! bad usage or input, reported as one line on stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Read;

use anyonkit_core::braid_rep::{apply_word, build_rep, check_braid_relations, eigenphases, BraidWord};
use anyonkit_core::fusion_ring::{tensor_power, FusionTable, Label};
use anyonkit_core::fusion_trees::{
    enumerate_trees, format_tree, parse_tree, shape_of_left_comb, shape_of_right_comb, ParenShape, ParseError,
};
use anyonkit_core::model_store::{
    builtin_fibonacci, check_hexagon, check_pentagon, check_unitarity, fibonacci_model, AnyonModel, CaseResidual,
    ResidualReport, UnitarityReport,
};
use anyonkit_core::solver::{
    hexagon_residual, pentagon_residual, solve_hexagon_fibonacci, solve_pentagon_fibonacci, verify_root_identities,
    Branch, HexagonVariant, Orientation, RootIdentityReport,
};
use anyonkit_core::DEFAULT_TOL;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::json::{self, complex, matrix, num};
use crate::model_file::{load_model, save_model};
use crate::parallel::{default_workers, search_parallel};

pub const OUTPUT_FORMAT: &str = "anyonkit-out/1";

/// Name of the built-in Fibonacci model.
pub const BUILTIN: &str = "fib";

#[derive(Parser, Debug)]
#[command(
    name = "anyonkit",
    version,
    about = "Fusion rules, F/R-symbols, braid representations and braid-word search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tensor power of a simple object.
    Fuse {
        /// Model file, `-` for stdin, or `fib`.
        #[arg(long)]
        model: String,
        /// `<label>^<n>`.
        #[arg(long)]
        power: String,
    },
    /// Canonical fusion-tree basis for a shape, leaves and root.
    Trees {
        #[arg(long)]
        model: String,
        /// `left`, `right`, or a parenthesization such as `((..).)`.
        #[arg(long)]
        shape: String,
        /// Comma-separated leaf labels.
        #[arg(long)]
        leaves: String,
        #[arg(long)]
        root: String,
    },
    /// Parse a tree, print its normal form and admissibility.
    Parse {
        #[arg(long)]
        model: String,
        #[arg(long)]
        tree: String,
    },
    /// Closed-form pentagon and hexagon solutions.
    Solve {
        family: Family,
        #[arg(long, value_enum, default_value_t = BranchArg::Unitary)]
        branch: BranchArg,
        /// Gauge phase of the off-diagonal F entries.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = OrientationArg::Ccw)]
        orientation: OrientationArg,
        /// Write the model document to a file, or to stdout when no path is given.
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        emit_model: Option<String>,
    },
    /// Coherence and unitarity checks on a model.
    Check {
        which: CheckKind,
        /// Model file, `-` for stdin, or `fib`.
        #[arg(long, default_value = "-")]
        model: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Braid-group generators on a left-comb basis.
    Braidrep {
        #[arg(long)]
        model: String,
        #[arg(long)]
        leaf: String,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        root: String,
        /// Comma-separated signed generator indices, first applied first.
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Exhaustive braid-word search for a target unitary.
    Search {
        #[arg(long)]
        model: String,
        /// Strand label; defaults to the only non-unit label.
        #[arg(long)]
        leaf: Option<String>,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        root: String,
        /// JSON file holding `[[[re, im], …], …]`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_len: usize,
        /// Stop after the first length reaching a distance below this; 0 disables.
        #[arg(long, default_value_t = 0.0)]
        prune_tol: f64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Fib,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BranchArg {
    Unitary,
    Nonunitary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Ccw,
    Cw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Pentagon,
    Hexagon,
    Unitarity,
    All,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

struct UsageError(String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

enum Output {
    Doc {
        model: Option<String>,
        payload: Value,
        residuals: Map<String, Value>,
        failed: bool,
    },
    Raw(Vec<u8>),
}

/// Runs one command line (`args[0]` is the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.render().to_string().into_bytes(),
                    stderr: String::new(),
                };
            }
            let text = e.render().to_string();
            let line = text.lines().next().unwrap_or("error: invalid arguments");
            return Outcome {
                code: 2,
                stdout: Vec::new(),
                stderr: format!("{line}\n"),
            };
        }
    };
    let echo: Vec<Value> = args
        .iter()
        .skip(1)
        .map(|a| Value::from(a.to_string_lossy().into_owned()))
        .collect();
    match execute(cli.command, stdin) {
        Err(UsageError(msg)) => Outcome {
            code: 2,
            stdout: Vec::new(),
            stderr: format!("error: {msg}\n"),
        },
        Ok(Output::Raw(bytes)) => Outcome {
            code: 0,
            stdout: bytes,
            stderr: String::new(),
        },
        Ok(Output::Doc {
            model,
            payload,
            residuals,
            failed,
        }) => {
            let code = i32::from(failed);
            let mut doc = Map::new();
            doc.insert("format".into(), OUTPUT_FORMAT.into());
            doc.insert("command".into(), Value::Array(echo));
            doc.insert("model".into(), model.map_or(Value::Null, Value::from));
            doc.insert("payload".into(), payload);
            doc.insert("residuals".into(), Value::Object(residuals));
            doc.insert("status".into(), if failed { "check_failed" } else { "ok" }.into());
            doc.insert("exit_code".into(), code.into());
            Outcome {
                code,
                stdout: json::to_bytes(&Value::Object(doc)),
                stderr: if failed {
                    String::from("check failed: residual above tolerance\n")
                } else {
                    String::new()
                },
            }
        }
    }
}

fn read_source(path: &str, flag: &str, stdin: &mut dyn Read) -> Result<Vec<u8>, UsageError> {
    if path == "-" {
        let mut buf = Vec::new();
        stdin
            .read_to_end(&mut buf)
            .map_err(|e| usage(format!("{flag}: cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| usage(format!("{flag}: cannot read {path:?}: {e}")))
    }
}

fn model_arg(name: &str, stdin: &mut dyn Read) -> Result<AnyonModel, UsageError> {
    if name == BUILTIN {
        return Ok(builtin_fibonacci());
    }
    let bytes = read_source(name, "--model", stdin)?;
    load_model(&bytes).map_err(|e| usage(format!("--model: {e}")))
}

fn label_arg(table: &FusionTable, flag: &str, name: &str) -> Result<Label, UsageError> {
    table
        .label(name.trim())
        .ok_or_else(|| usage(format!("{flag}: unknown label {name:?}")))
}

fn names(table: &FusionTable, labels: &[Label]) -> Value {
    labels.iter().map(|&l| Value::from(table.name(l))).collect()
}

fn case_value(table: &FusionTable, c: &CaseResidual) -> Value {
    json!({
        "leaves": names(table, &c.leaves),
        "root": table.name(c.root),
        "dim": c.dim,
        "residual": num(c.residual),
    })
}

fn residual_report_value(table: &FusionTable, r: &ResidualReport, tol: f64) -> Value {
    json!({
        "max_residual": num(r.max_residual()),
        "passed": r.passed(tol),
        "cases": r.cases.len(),
        "worst": r.worst().map_or(Value::Null, |c| case_value(table, c)),
        "failures": r.failures(tol).map(|c| case_value(table, c)).collect::<Vec<_>>(),
    })
}

fn unitarity_value(table: &FusionTable, r: &UnitarityReport, tol: f64) -> Value {
    json!({
        "max_residual": num(r.max_residual()),
        "passed": r.passed(tol),
        "failing_f": r.failing_f(tol)
            .map(|(k, x)| json!({"key": k.render(table), "residual": num(*x)}))
            .collect::<Vec<_>>(),
        "failing_r": r.failing_r(tol)
            .map(|(k, x)| json!({"key": k.render(table), "residual": num(*x)}))
            .collect::<Vec<_>>(),
    })
}

fn root_identities_value(r: &RootIdentityReport) -> Value {
    json!({
        "identities": r.identities.iter()
            .map(|c| json!({"name": c.name, "residual": num(c.residual), "passed": c.passed}))
            .collect::<Vec<_>>(),
        "powers_minus_one": r.powers.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "primitive_tenth_root": r.primitive_tenth_root,
    })
}

fn execute(command: Command, stdin: &mut dyn Read) -> Result<Output, UsageError> {
    match command {
        Command::Fuse { model, power } => {
            let m = model_arg(&model, stdin)?;
            let table = m.table();
            let (name, n) = power
                .rsplit_once('^')
                .ok_or_else(|| usage(format!("--power: expected <label>^<n>, found {power:?}")))?;
            let label = label_arg(table, "--power", name)?;
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|_| usage(format!("--power: exponent {n:?} is not a non-negative integer")))?;
            let v = tensor_power(table, label, n).map_err(|e| usage(format!("--power: {e}")))?;
            let mut payload = Map::new();
            for l in table.labels() {
                payload.insert(table.name(l).into(), v.get(l).into());
            }
            Ok(Output::Doc {
                model: Some(model),
                payload: Value::Object(payload),
                residuals: Map::new(),
                failed: false,
            })
        }
        Command::Trees {
            model,
            shape,
            leaves,
            root,
        } => {
            let m = model_arg(&model, stdin)?;
            let table = m.table();
            let leaf_labels = leaves
                .split(',')
                .map(|s| label_arg(table, "--leaves", s))
                .collect::<Result<Vec<_>, _>>()?;
            let root_label = label_arg(table, "--root", &root)?;
            let n = leaf_labels.len();
            let shape = match shape.as_str() {
                "left" => shape_of_left_comb(n),
                "right" => shape_of_right_comb(n),
                text => ParenShape::parse(text).map_err(|e| usage(format!("--shape: {e}")))?,
            };
            let trees = enumerate_trees(table, &shape, &leaf_labels, root_label)
                .map_err(|e| usage(format!("--leaves: {e}")))?;
            Ok(Output::Doc {
                model: Some(model),
                payload: json!({
                    "shape": shape.to_string(),
                    "leaves": names(table, &leaf_labels),
                    "root": table.name(root_label),
                    "dimension": trees.len(),
                    "trees": trees.iter().map(|t| format_tree(t, table)).collect::<Vec<_>>(),
                }),
                residuals: Map::new(),
                failed: false,
            })
        }
        Command::Parse { model, tree } => {
            let m = model_arg(&model, stdin)?;
            let table = m.table();
            let (payload, failed) = match parse_tree(&tree, table) {
                Ok(t) => (
                    json!({
                        "input": tree,
                        "tree": format_tree(&t, table),
                        "admissible": true,
                        "leaves": names(table, &t.leaf_labels()),
                        "root": table.name(t.root()),
                        "shape": t.shape().to_string(),
                    }),
                    false,
                ),
                Err(e @ ParseError::Inadmissible { .. }) => {
                    let ParseError::Inadmissible { position, ref node, .. } = e else {
                        unreachable!()
                    };
                    (
                        json!({
                            "input": tree,
                            "tree": Value::Null,
                            "admissible": false,
                            "node": node,
                            "position": position,
                            "error": e.to_string(),
                        }),
                        true,
                    )
                }
                Err(e) => return Err(usage(format!("--tree: {e}"))),
            };
            Ok(Output::Doc {
                model: Some(model),
                payload,
                residuals: Map::new(),
                failed,
            })
        }
        Command::Solve {
            family: Family::Fib,
            branch,
            theta,
            orientation,
            emit_model,
        } => {
            if !theta.is_finite() {
                return Err(usage("--theta: must be finite"));
            }
            let branch = match branch {
                BranchArg::Unitary => Branch::Unitary,
                BranchArg::Nonunitary => Branch::NonUnitary,
            };
            let orient = match orientation {
                OrientationArg::Ccw => Orientation::Counterclockwise,
                OrientationArg::Cw => Orientation::Clockwise,
            };
            let f = solve_pentagon_fibonacci(branch, theta);
            let r = solve_hexagon_fibonacci(&f, orient).ok();
            if let Some(path) = emit_model {
                let r = r.ok_or_else(|| usage("--emit-model: the non-unitary branch has no R-symbols"))?;
                let bytes = save_model(&fibonacci_model(&f, &r));
                if path == "-" {
                    return Ok(Output::Raw(bytes));
                }
                fs::write(&path, &bytes).map_err(|e| usage(format!("--emit-model: cannot write {path:?}: {e}")))?;
            }
            let pent = pentagon_residual(&f);
            let mut residuals = Map::new();
            residuals.insert("pentagon".into(), num(pent));
            residuals.insert("f_unitarity".into(), num(f.unitarity_residual()));
            let mut failed = pent > DEFAULT_TOL;
            let (r_value, roots) = match &r {
                Some(r) => {
                    let hs = hexagon_residual(&f, r, HexagonVariant::Sigma);
                    let hi = hexagon_residual(&f, r, HexagonVariant::SigmaInverse);
                    residuals.insert("hexagon_sigma".into(), num(hs));
                    residuals.insert("hexagon_sigma_inverse".into(), num(hi));
                    let report = verify_root_identities(&f, r, DEFAULT_TOL);
                    failed |= hs > DEFAULT_TOL || hi > DEFAULT_TOL || !report.all_passed();
                    (
                        json!({"a": complex(r.a), "b": complex(r.b)}),
                        root_identities_value(&report),
                    )
                }
                None => (Value::Null, Value::Null),
            };
            Ok(Output::Doc {
                model: Some(BUILTIN.into()),
                payload: json!({
                    "branch": match branch { Branch::Unitary => "unitary", Branch::NonUnitary => "nonunitary" },
                    "theta": num(theta),
                    "orientation": match orient { Orientation::Counterclockwise => "ccw", Orientation::Clockwise => "cw" },
                    "F": {
                        "p": complex(f.p),
                        "q": complex(f.q),
                        "r": complex(f.r),
                        "s": complex(f.s),
                        "t": complex(f.t),
                        "tau_block": matrix(&f.tau_block()),
                    },
                    "R": r_value,
                    "root_identities": roots,
                }),
                residuals,
                failed,
            })
        }
        Command::Check { which, model, tol } => {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(usage("--tol: must be finite and non-negative"));
            }
            let m = model_arg(&model, stdin)?;
            let table = m.table();
            let mut checks = Map::new();
            let mut residuals = Map::new();
            let mut first_failure = Value::Null;
            let mut record = |name: &str, max: f64, passed: bool, report: Value| {
                if !passed && first_failure.is_null() {
                    first_failure = name.into();
                }
                residuals.insert(name.into(), num(max));
                checks.insert(name.into(), report);
            };
            if matches!(which, CheckKind::Pentagon | CheckKind::All) {
                let r = check_pentagon(&m);
                record(
                    "pentagon",
                    r.max_residual(),
                    r.passed(tol),
                    residual_report_value(table, &r, tol),
                );
            }
            if matches!(which, CheckKind::Hexagon | CheckKind::All) {
                for (name, v) in [
                    ("hexagon_sigma", HexagonVariant::Sigma),
                    ("hexagon_sigma_inverse", HexagonVariant::SigmaInverse),
                ] {
                    let r = check_hexagon(&m, v);
                    record(
                        name,
                        r.max_residual(),
                        r.passed(tol),
                        residual_report_value(table, &r, tol),
                    );
                }
            }
            if matches!(which, CheckKind::Unitarity | CheckKind::All) {
                let r = check_unitarity(&m);
                record(
                    "unitarity",
                    r.max_residual(),
                    r.passed(tol),
                    unitarity_value(table, &r, tol),
                );
            }
            let failed = !first_failure.is_null();
            Ok(Output::Doc {
                model: Some(model),
                payload: json!({"tol": num(tol), "first_failure": first_failure, "checks": checks}),
                residuals,
                failed,
            })
        }
        Command::Braidrep {
            model,
            leaf,
            n,
            root,
            word,
            tol,
        } => {
            let m = model_arg(&model, stdin)?;
            let table = m.table();
            let leaf = label_arg(table, "--leaf", &leaf)?;
            let root = label_arg(table, "--root", &root)?;
            let rep = build_rep(&m, leaf, n, root).map_err(|e| usage(format!("braidrep: {e}")))?;
            let word_value = match word {
                Some(w) => {
                    let word = parse_word(&w, n)?;
                    let mat = apply_word(&rep, &word).map_err(|e| usage(format!("--word: {e}")))?;
                    json!({"letters": word.letters, "matrix": matrix(&mat)})
                }
                None => Value::Null,
            };
            let rel = check_braid_relations(&rep);
            let phases = (1..n)
                .map(|i| {
                    eigenphases(&rep, i)
                        .map(|ps| ps.into_iter().map(num).collect::<Vec<_>>())
                        .map_err(|e| usage(format!("braidrep: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut residuals = Map::new();
            residuals.insert("unitarity".into(), num(rel.max_unitarity()));
            residuals.insert("braid_adjacent".into(), num(rel.max_adjacent()));
            residuals.insert("far_commutation".into(), num(rel.max_far()));
            Ok(Output::Doc {
                model: Some(model),
                payload: json!({
                    "leaf": table.name(leaf),
                    "n": n,
                    "root": table.name(root),
                    "dimension": rep.dim(),
                    "basis": rep.basis.iter().map(|t| format_tree(t, table)).collect::<Vec<_>>(),
                    "generators": rep.gens.iter().map(matrix).collect::<Vec<_>>(),
                    "eigenphases": phases,
                    "word": word_value,
                }),
                residuals,
                failed: !rel.passed(tol),
            })
        }
        Command::Search {
            model,
            leaf,
            n,
            root,
            target,
            max_len,
            prune_tol,
            workers,
        } => {
            let m = model_arg(&model, stdin)?;
            let table = m.table();
            let leaf = match leaf {
                Some(name) => label_arg(table, "--leaf", &name)?,
                None => {
                    let mut non_unit = table.labels().filter(|l| !l.is_unit());
                    match (non_unit.next(), non_unit.next()) {
                        (Some(l), None) => l,
                        _ => return Err(usage("--leaf: required when the model has several non-unit labels")),
                    }
                }
            };
            let root = label_arg(table, "--root", &root)?;
            let rep = build_rep(&m, leaf, n, root).map_err(|e| usage(format!("search: {e}")))?;
            let bytes = read_source(&target, "--target", stdin)?;
            let value: Value = serde_json::from_slice(&bytes).map_err(|e| usage(format!("--target: {e}")))?;
            let t = json::parse_matrix(&value).map_err(|e| usage(format!("--target: {e}")))?;
            let workers = workers.unwrap_or_else(default_workers);
            if workers == 0 {
                return Err(usage("--workers: must be at least 1"));
            }
            let res =
                search_parallel(&rep, &t, max_len, prune_tol, workers).map_err(|e| usage(format!("--target: {e}")))?;
            let mut residuals = Map::new();
            residuals.insert("distance".into(), num(res.distance));
            Ok(Output::Doc {
                model: Some(model),
                payload: json!({
                    "leaf": table.name(leaf),
                    "n": n,
                    "root": table.name(root),
                    "max_len": max_len,
                    "prune_tol": num(prune_tol),
                    "word": res.word.letters,
                    "length": res.word.len(),
                    "distance": num(res.distance),
                    "matrix": matrix(&res.matrix),
                    "words_examined": res.words_examined,
                }),
                residuals,
                failed: false,
            })
        }
    }
}

fn parse_word(text: &str, n: usize) -> Result<BraidWord, UsageError> {
    let letters = if text.trim().is_empty() {
        Vec::new()
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<i32>()
                    .map_err(|_| usage(format!("--word: {s:?} is not a signed integer")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    BraidWord::new(n, letters).map_err(|e| usage(format!("--word: {e}")))
}
