//! Command-line front end: runs the two separation pipelines end to end,
//! persists reports, and exposes the individual ingredients as tools.
//!
//! Exit codes: 0 success, 1 error or failed verification, 2 overlap
//! witness (dyck), 3 fuel exhausted (preiss).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sepkit_core::cgc::validate_cgc;
use sepkit_core::dyck::{build_product, dyck_separate, product_capacity, verify_dyck, DyckOutcome};
use sepkit_core::geom::{hull_distance_inf, rat_from_str, rat_to_string, Polytope, Rat};
use sepkit_core::graph::GraphTree;
use sepkit_core::order::lo_code_of_tree;
use sepkit_core::point::UpPoint;
use sepkit_core::preiss::{preiss_separate, sample_grid, verify_preiss};
use sepkit_core::report::{
    digest_input, dyck_report, preiss_report, to_canonical_json, DyckConfig, InputDigest,
    PreissConfig,
};
use sepkit_core::scheme::{
    build_good_scheme, validate_good, validate_normal, SchemeKind, SouslinScheme,
};
use sepkit_core::seq::{kb_compare, FinSeq};
use sepkit_core::spc::{eval_spc, is_monotone_spc, spc_norm, spc_support, Spc};

#[derive(Parser)]
#[command(name = "sepkit", version, about = "Exact separation kernels for tree-presented sets")]
struct Cli {
    /// Print machine-readable JSON instead of plain values.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separate two tree-presented subsets of Cantor space.
    Dyck {
        #[command(subcommand)]
        cmd: DyckCmd,
    },
    /// Separate a scheme-presented convex set from a disjoint tree-presented set.
    Preiss {
        #[command(subcommand)]
        cmd: PreissCmd,
    },
    /// Work with the individual ingredients directly.
    Tools {
        #[command(subcommand)]
        cmd: ToolsCmd,
    },
}

#[derive(Subcommand)]
enum DyckCmd {
    /// Emit a semi-positive separator, or an overlap witness (exit 2).
    Separate(DyckSeparate),
}

#[derive(Args)]
struct DyckSeparate {
    /// Tree presentation of the set to cover (JSON file).
    #[arg(long, value_name = "FILE")]
    t: PathBuf,
    /// Tree presentation of the set to avoid (JSON file).
    #[arg(long, value_name = "FILE")]
    s: PathBuf,
    /// Exhaustive verification depth; defaults to the product-state bound + 1.
    #[arg(long, value_name = "D")]
    verify_depth: Option<usize>,
    /// Where to write the report.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum PreissCmd {
    /// Emit a convexly generated separator, or exit 3 when fuel runs out.
    Separate(PreissSeparate),
}

#[derive(Args)]
struct PreissSeparate {
    /// Good scheme presenting the convex set (JSON file).
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    /// Baire-side tree presenting the set to avoid (JSON file).
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
    /// Working cube bound M; the guarantee covers [-(M-1), M-1]^N.
    #[arg(long, value_name = "M", default_value_t = 2)]
    cubes: u64,
    /// Node budget for the recursion.
    #[arg(long, value_name = "F", default_value_t = 10_000)]
    fuel: u64,
    /// Verification grid step denominator (grid step 1/Q).
    #[arg(long, value_name = "Q", default_value_t = 4)]
    grid_denom: i64,
    /// Address of a point of the avoided set to check against the code; repeatable.
    #[arg(long, value_name = "ADDR")]
    b_address: Vec<String>,
    /// Where to write the report.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ToolsCmd {
    /// Semi-positive set codes.
    Codes {
        #[command(subcommand)]
        cmd: CodesCmd,
    },
    /// Exact convex geometry.
    Geom {
        #[command(subcommand)]
        cmd: GeomCmd,
    },
    /// Souslin schemes.
    Schemes {
        #[command(subcommand)]
        cmd: SchemesCmd,
    },
    /// Finite linear orders and tree codes.
    Orders {
        #[command(subcommand)]
        cmd: OrdersCmd,
    },
}

#[derive(Subcommand)]
enum CodesCmd {
    /// Evaluate a code at an ultimately periodic point like "01(10)".
    Eval {
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
        #[arg(long, value_name = "POINT")]
        point: String,
    },
    /// Print the norm of a code.
    Norm {
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
    },
    /// Decide monotonicity of the coded set, exhaustively over its support.
    Monotone {
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
    },
}

#[derive(Subcommand)]
enum GeomCmd {
    /// Max-norm distance from a point to a polytope's convex hull.
    HullDist {
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        /// Comma-separated rational coordinates, e.g. "2,0" or "1/2,-3/4".
        #[arg(long, value_name = "COORDS")]
        x: String,
    },
}

#[derive(Subcommand)]
enum SchemesCmd {
    /// Build the good scheme of a Baire-side tree presentation.
    BuildGood {
        #[arg(long, value_name = "FILE")]
        tree: PathBuf,
        #[arg(long, value_name = "N")]
        dims: usize,
        #[arg(long, value_name = "D")]
        depth: usize,
        /// Working cube bound M; boxes are clipped to [-M, M]^N.
        #[arg(long, value_name = "M", default_value_t = 2)]
        cube: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Check the nesting and raise clauses (plus diameters for normal schemes).
    Validate {
        #[arg(long, value_name = "FILE")]
        scheme: PathBuf,
    },
}

#[derive(Subcommand)]
enum OrdersCmd {
    /// Kleene-Brouwer comparison of two comma-separated words.
    Kb {
        #[arg(long, value_name = "WORD")]
        u: String,
        #[arg(long, value_name = "WORD")]
        v: String,
    },
    /// Linear-order code of a finite tree, given as semicolon-separated words.
    LoOfTree {
        #[arg(long, value_name = "TREE")]
        tree: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.json, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(json: bool, command: Command) -> Result<u8> {
    match command {
        Command::Dyck { cmd: DyckCmd::Separate(args) } => run_dyck(json, args),
        Command::Preiss { cmd: PreissCmd::Separate(args) } => run_preiss(json, args),
        Command::Tools { cmd } => run_tools(json, cmd),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_tree(path: &Path) -> Result<(GraphTree, InputDigest)> {
    let bytes = read_bytes(path)?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    let tree =
        GraphTree::from_json(&value).with_context(|| format!("loading {}", path.display()))?;
    Ok((tree, digest_input(&path.display().to_string(), &bytes)))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, InputDigest)> {
    let bytes = read_bytes(path)?;
    let value: T =
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok((value, digest_input(&path.display().to_string(), &bytes)))
}

fn write_report<T: serde::Serialize>(path: &Path, report: &T) -> Result<()> {
    fs::write(path, to_canonical_json(report))
        .with_context(|| format!("writing {}", path.display()))
}

fn parse_word(s: &str) -> Result<FinSeq> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad letter {t:?}")))
        .collect()
}

fn parse_coords(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(|t| rat_from_str(t).with_context(|| format!("bad coordinate {t:?}")))
        .collect()
}

fn run_dyck(json: bool, args: DyckSeparate) -> Result<u8> {
    let (t, t_digest) = read_tree(&args.t)?;
    let (s, s_digest) = read_tree(&args.s)?;
    let max_states = product_capacity();
    let outcome = dyck_separate(&t, &s)?;
    match &outcome {
        DyckOutcome::Separator(code) => {
            let product = build_product(&t, &s)?;
            let needed =
                spc_support(code).into_iter().next_back().map_or(0, |m| m as usize + 1);
            let depth = args
                .verify_depth
                .unwrap_or_else(|| needed.max((product.num_pairs() + 1).min(24)));
            let check = verify_dyck(&t, &s, code, depth)?;
            let report = dyck_report(
                vec![t_digest, s_digest],
                DyckConfig { verify_depth: depth, max_states },
                &outcome,
                Some(&check),
            );
            write_report(&args.out, &report)?;
            if json {
                print!("{}", to_canonical_json(&report));
            } else {
                println!(
                    "code emitted; checked {} points at depth {}, {} violations",
                    check.points_checked,
                    depth,
                    check.violations.len()
                );
                println!("report written to {}", args.out.display());
            }
            Ok(if check.violations.is_empty() { 0 } else { 1 })
        }
        DyckOutcome::Witness(w) => {
            let report = dyck_report(
                vec![t_digest, s_digest],
                DyckConfig { verify_depth: 0, max_states },
                &outcome,
                None,
            );
            write_report(&args.out, &report)?;
            if json {
                print!("{}", to_canonical_json(&report));
            } else {
                println!(
                    "the projections overlap: x={} via {}, y={} via {}",
                    w.x, w.gamma_x, w.y, w.gamma_y
                );
                println!("report written to {}", args.out.display());
            }
            Ok(2)
        }
    }
}

fn run_preiss(json: bool, args: PreissSeparate) -> Result<u8> {
    let (scheme, a_digest) = read_json::<SouslinScheme>(&args.a)?;
    let (b, b_digest) = read_tree(&args.b)?;
    let scheme_check = validate_good(&scheme);
    if !scheme_check.ok() {
        bail!(
            "the scheme fails validation:\n{}",
            to_canonical_json(&scheme_check).trim_end()
        );
    }
    let mut addresses = Vec::new();
    for a in &args.b_address {
        addresses.push(UpPoint::parse(a)?);
    }
    let run = preiss_separate(&scheme, &b, args.cubes, args.fuel)?;
    let config = PreissConfig {
        cubes: args.cubes,
        fuel: args.fuel,
        grid_step_denominator: args.grid_denom,
    };
    let inputs = vec![a_digest, b_digest];
    match run.code().cloned() {
        None => {
            let report = preiss_report(inputs, config, &run, None, None);
            write_report(&args.out, &report)?;
            if json {
                print!("{}", to_canonical_json(&report));
            } else {
                println!("fuel exhausted before a code was emitted");
                println!("report written to {}", args.out.display());
            }
            Ok(3)
        }
        Some(code) => {
            let code_check = validate_cgc(&code)?;
            let samples = sample_grid(scheme.dimension(), run.guarantee_radius(), args.grid_denom);
            let check = verify_preiss(&scheme, &run, &samples, &addresses)?;
            let ok = code_check.ok() && check.ok();
            let report = preiss_report(inputs, config, &run, Some(code_check), Some(check));
            write_report(&args.out, &report)?;
            if json {
                print!("{}", to_canonical_json(&report));
            } else {
                let v = report.verification.as_ref().expect("attached above");
                println!(
                    "code emitted; {} grid points and {} addresses checked, {} violations",
                    v.a_checked,
                    v.b_checked,
                    v.a_violations.len() + v.b_violations.len() + v.fire_violations.len()
                );
                println!("report written to {}", args.out.display());
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn run_tools(json: bool, cmd: ToolsCmd) -> Result<u8> {
    match cmd {
        ToolsCmd::Codes { cmd } => run_codes(json, cmd),
        ToolsCmd::Geom { cmd } => run_geom(json, cmd),
        ToolsCmd::Schemes { cmd } => run_schemes(json, cmd),
        ToolsCmd::Orders { cmd } => run_orders(json, cmd),
    }
}

fn run_codes(json: bool, cmd: CodesCmd) -> Result<u8> {
    match cmd {
        CodesCmd::Eval { code, point } => {
            let (code, _) = read_json::<Spc>(&code)?;
            let point = UpPoint::parse(&point)?;
            let value = eval_spc(&code, &point);
            if json {
                println!("{}", serde_json::json!({ "value": value }));
            } else {
                println!("{value}");
            }
        }
        CodesCmd::Norm { code } => {
            let (code, _) = read_json::<Spc>(&code)?;
            let norm = spc_norm(&code);
            if json {
                println!("{}", serde_json::json!({ "norm": norm }));
            } else {
                println!("{norm}");
            }
        }
        CodesCmd::Monotone { code } => {
            let (code, _) = read_json::<Spc>(&code)?;
            let monotone = is_monotone_spc(&code)?;
            if json {
                println!("{}", serde_json::json!({ "monotone": monotone }));
            } else {
                println!("{monotone}");
            }
        }
    }
    Ok(0)
}

fn run_geom(json: bool, cmd: GeomCmd) -> Result<u8> {
    match cmd {
        GeomCmd::HullDist { p, x } => {
            let (p, _) = read_json::<Polytope>(&p)?;
            let x = parse_coords(&x)?;
            let d = hull_distance_inf(&x, &p)?;
            if json {
                println!("{}", serde_json::json!({ "distance": rat_to_string(&d) }));
            } else {
                println!("{d}");
            }
        }
    }
    Ok(0)
}

fn run_schemes(json: bool, cmd: SchemesCmd) -> Result<u8> {
    match cmd {
        SchemesCmd::BuildGood { tree, dims, depth, cube, out } => {
            let (tree, _) = read_tree(&tree)?;
            let scheme = build_good_scheme(&tree, dims, depth, cube)?;
            fs::write(&out, to_canonical_json(&scheme))
                .with_context(|| format!("writing {}", out.display()))?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "dimension": scheme.dimension(),
                        "depth": scheme.depth(),
                        "alphabet": scheme.alphabet(),
                        "stored_entries": scheme.stored_entries().count(),
                        "out": out.display().to_string(),
                    })
                );
            } else {
                println!(
                    "wrote a dimension-{} depth-{} scheme with {} stored entries to {}",
                    scheme.dimension(),
                    scheme.depth(),
                    scheme.stored_entries().count(),
                    out.display()
                );
            }
            Ok(0)
        }
        SchemesCmd::Validate { scheme } => {
            let (scheme, _) = read_json::<SouslinScheme>(&scheme)?;
            let check = match scheme.kind() {
                SchemeKind::Normal => validate_normal(&scheme),
                SchemeKind::Good | SchemeKind::Raw => validate_good(&scheme),
            };
            if json {
                print!("{}", to_canonical_json(&check));
            } else if check.ok() {
                println!("ok: {} entries checked", check.entries_checked);
            } else {
                println!(
                    "invalid: {} nesting, {} raise, {} diameter violations",
                    check.nesting_violations.len(),
                    check.raise_violations.len(),
                    check.diameter_violations.len()
                );
            }
            Ok(if check.ok() { 0 } else { 1 })
        }
    }
}

fn run_orders(json: bool, cmd: OrdersCmd) -> Result<u8> {
    match cmd {
        OrdersCmd::Kb { u, v } => {
            let u = parse_word(&u)?;
            let v = parse_word(&v)?;
            let order = match kb_compare(&u, &v) {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "greater",
            };
            if json {
                println!("{}", serde_json::json!({ "order": order }));
            } else {
                println!("{order}");
            }
        }
        OrdersCmd::LoOfTree { tree } => {
            let mut members: Vec<FinSeq> = vec![Vec::new()];
            for part in tree.split(';') {
                if !part.trim().is_empty() {
                    members.push(parse_word(part)?);
                }
            }
            members.sort();
            members.dedup();
            let order = lo_code_of_tree(&members)?;
            let elements: Vec<String> =
                order.sorted_elements().iter().map(|n| n.to_string()).collect();
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "order_type": order.order_type(),
                        "elements": elements,
                    })
                );
            } else {
                println!("{}", elements.join(" < "));
            }
        }
    }
    Ok(0)
}
