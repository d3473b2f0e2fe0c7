//! `mincodes`: classification drivers, single-code checks, lattice invariants and index systems.
//!
//! Exit status: 0 success, 1 the answer is "infeasible" (or nothing feasible found), 2 some row
//! is inconclusive or a budget ran out, 3 bad input, 4 internal failure.

mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mincodes::catalog;
use mincodes::classify::{classify_cyclic, evaluate, Classification, Classifier, ClassifyOptions};
use mincodes::codes::{count_cyclic_before_watson, generate_cyclic_candidates, parse_code, predicted_invariants, QuotientType};
use mincodes::eutaxy::eutaxy_class;
use mincodes::face::{class_face, face_json};
use mincodes::feasibility::{FeasibilityOptions, FeasibilityStatus};
use mincodes::index_system::{index_system_bruteforce, index_system_orderly, HalfSetAction, OrderlyOptions};
use mincodes::io::parse_gram;
use mincodes::GramMatrix;
use report::{Block, Format, Row};

#[derive(Parser, Debug)]
#[command(name = "mincodes", version, about = "Codes from quotients of lattices by minimal-vector sublattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for independent codes (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory of extra `NAME.gram` files, looked up by name.
    #[arg(long, global = true, env = "MINCODES_CATALOG")]
    catalog: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Feas {
    /// Restrict the search to the fixed space of the code's automorphism group.
    #[arg(long)]
    symmetrize: bool,
    /// Cutting-plane iterations per code.
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_iterations: u64,
}

impl Feas {
    fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            feasibility: FeasibilityOptions {
                symmetrize: self.symmetrize,
                max_iterations: self.max_iterations as usize,
                ..Default::default()
            },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cyclic codes of length n for each order in the range.
    ClassifyCyclic {
        #[arg(long)]
        n: usize,
        /// An order `7`, a range `2..8` (inclusive) or a list `5,7,9`.
        #[arg(long)]
        d: String,
        #[command(flatten)]
        feas: Feas,
    },
    /// Codes of length n with a non-cyclic quotient type such as `4x2` or `2^3`.
    ClassifyNoncyclic {
        #[arg(long)]
        n: usize,
        #[arg(long = "type")]
        ty: String,
        #[command(flatten)]
        feas: Feas,
    },
    /// Feasibility and class invariants of one code file (`n d1 [d2..]` then a generator per line).
    CheckCode {
        file: PathBuf,
        #[command(flatten)]
        feas: Feas,
    },
    /// Minimum, kissing number, perfection rank and eutaxy of a lattice.
    Invariants {
        /// A `.gram` file, a catalog name, or a builtin such as `L87`, `E8`, `D5`.
        lattice: String,
        /// Also traverse the face of the minimal class.
        #[arg(long)]
        face: bool,
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
        budget_vertices: u64,
    },
    /// Quotient types of the sublattices spanned by n minimal vectors.
    IndexSystem {
        lattice: String,
        #[arg(long, value_enum, default_value = "brute")]
        mode: Mode,
        /// Largest number of n-subsets enumerated in brute mode.
        #[arg(long, default_value_t = 50_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget_subsets: u64,
        /// Write each orderly level as a block file here.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Watson-admissible cyclic types.
    Watson {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Mode {
    Brute,
    Orderly,
}

/// Outcome of a command, mapped to the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Answer {
    Found,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

fn input<T>(r: Result<T, impl std::fmt::Display>, what: &str) -> anyhow::Result<T> {
    r.map_err(|e| InputError(format!("{what}: {e}")).into())
}

fn parse_orders(s: &str) -> anyhow::Result<Vec<i64>> {
    let bad = || InputError(format!("bad order list `{s}`"));
    let v: Vec<i64> = if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if v.is_empty() || v.iter().any(|&d| d < 2) {
        return Err(bad().into());
    }
    Ok(v)
}

fn load_lattice(name: &str, catalog_dir: Option<&Path>) -> anyhow::Result<GramMatrix> {
    let path = Path::new(name);
    if path.is_file() {
        let text = input(std::fs::read_to_string(path), name)?;
        return input(parse_gram(&text).and_then(GramMatrix::new), name);
    }
    if let Some(dir) = catalog_dir {
        let p = dir.join(format!("{name}.gram"));
        if p.is_file() {
            let text = input(std::fs::read_to_string(&p), name)?;
            return input(parse_gram(&text).and_then(GramMatrix::new), name);
        }
    }
    catalog::by_name(name).ok_or_else(|| InputError(format!("no lattice file or catalog entry `{name}`")).into())
}

fn classification_answer(cs: &[Classification]) -> Answer {
    if cs.iter().any(|c| c.has_inconclusive()) {
        Answer::Inconclusive
    } else if cs.iter().all(|c| c.feasible().next().is_none()) {
        Answer::Infeasible
    } else {
        Answer::Found
    }
}

fn run(cli: &Cli) -> anyhow::Result<(String, Answer)> {
    let format = cli.format;
    match &cli.command {
        Command::ClassifyCyclic { n, d, feas } => {
            let orders = parse_orders(d)?;
            if *n == 0 {
                bail!(InputError("n must be positive".into()));
            }
            let opts = feas.options();
            let cs = orders.iter().map(|&d| classify_cyclic(*n, d, &opts)).collect::<Result<Vec<_>, _>>()?;
            let blocks: Vec<Block> = cs.iter().map(Block::from).collect();
            Ok((report::render_blocks(&blocks, format), classification_answer(&cs)))
        }
        Command::ClassifyNoncyclic { n, ty, feas } => {
            let q = input(QuotientType::parse(ty), "--type")?;
            if q.is_cyclic() || q.is_trivial() {
                bail!(InputError(format!("`{q}` is cyclic; use classify-cyclic")));
            }
            if *n == 0 {
                bail!(InputError("n must be positive".into()));
            }
            let c = Classifier::new(*n, feas.options()).classify(&q)?;
            let answer = classification_answer(std::slice::from_ref(&c));
            Ok((report::render_blocks(&[Block::from(&c)], format), answer))
        }
        Command::CheckCode { file, feas } => {
            let text = input(std::fs::read_to_string(file), &file.display().to_string())?;
            let code = input(parse_code(&text), &file.display().to_string())?;
            let row = evaluate(&code, &code.quotient_type(), &feas.options())?;
            let answer = match row.status {
                FeasibilityStatus::Feasible => Answer::Found,
                FeasibilityStatus::Infeasible => Answer::Infeasible,
                FeasibilityStatus::Inconclusive { .. } => Answer::Inconclusive,
            };
            let predicted = if code.is_binary() { Some(predicted_invariants(&code)?) } else { None };
            let r = Row::from(&row);
            let out = match format {
                Format::Json => {
                    let mut v = serde_json::to_value(&r)?;
                    if let Some((s, rk)) = predicted {
                        v["predicted"] = serde_json::json!({"s": s, "r": rk});
                    }
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Csv => report::csv_rows(&[&r]),
                Format::Text => {
                    let mut t = report::text_rows(&[&r]);
                    if let Some((s, rk)) = predicted {
                        writeln!(t, "binary formula: s = {s}, r = {rk}")?;
                    }
                    t
                }
            };
            Ok((out, answer))
        }
        Command::Invariants { lattice, face, budget_vertices } => {
            let g = load_lattice(lattice, cli.catalog.as_deref())?;
            let mv = g.min_vectors();
            let eu = eutaxy_class(&g)?;
            let mut v = serde_json::json!({
                "lattice": lattice,
                "dim": g.dim(),
                "det": g.det().to_string(),
                "min": mv.min.to_string(),
                "s": mv.s(),
                "r": g.perfection_rank(),
                "hermite_power": g.hermite_power().to_string(),
                "eutaxy": eu.class.to_string(),
            });
            let mut answer = Answer::Found;
            if *face {
                let f = class_face(&g, *budget_vertices as usize)?;
                if f.partial {
                    answer = Answer::Inconclusive;
                }
                v["face"] = face_json(&f);
            }
            let out = match format {
                Format::Json => serde_json::to_string_pretty(&v)? + "\n",
                Format::Csv | Format::Text => {
                    let sep = if format == Format::Csv { "," } else { " " };
                    let mut t = if format == Format::Csv { "key,value\n".to_string() } else { String::new() };
                    for k in ["lattice", "dim", "det", "min", "s", "r", "hermite_power", "eutaxy"] {
                        let val = v[k].as_str().map(str::to_string).unwrap_or_else(|| v[k].to_string());
                        writeln!(t, "{k}{sep}{val}")?;
                    }
                    if let Some(f) = v.get("face") {
                        writeln!(t, "face_dim{sep}{}", f["dim"])?;
                        writeln!(t, "face_vertices{sep}{}", f["vertices"].as_array().map_or(0, |a| a.len()))?;
                        writeln!(t, "face_partial{sep}{}", f["partial"])?;
                    }
                    t
                }
            };
            Ok((out, answer))
        }
        Command::IndexSystem { lattice, mode, budget_subsets, dump_dir } => {
            let g = load_lattice(lattice, cli.catalog.as_deref())?;
            let sys = match mode {
                Mode::Brute => index_system_bruteforce(&g, *budget_subsets as u128)?,
                Mode::Orderly => {
                    let opts = OrderlyOptions { dump_dir: dump_dir.clone(), ..Default::default() };
                    let action = HalfSetAction::from_lattice(&g, opts.group_limit)?;
                    index_system_orderly(&g, &action, &opts)?
                }
            };
            let rows = sys.rows();
            let out = match format {
                Format::Json => {
                    let counts: Vec<_> = rows.iter().map(|(q, c)| serde_json::json!({"type": q.to_string(), "count": c})).collect();
                    let v = serde_json::json!({"lattice": lattice, "kind": sys.kind, "counts": counts});
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Csv => {
                    let mut t = String::from("type,count\n");
                    for (q, c) in &rows {
                        writeln!(t, "{q},{c}")?;
                    }
                    t
                }
                Format::Text => {
                    let mut t = String::new();
                    for (q, c) in &rows {
                        writeln!(t, "{:<8} {c}", q.to_string())?;
                    }
                    t
                }
            };
            Ok((out, Answer::Found))
        }
        Command::Watson { n, d } => {
            if *d < 2 || *n == 0 {
                bail!(InputError("need n >= 1 and d >= 2".into()));
            }
            let before = count_cyclic_before_watson(*n, *d);
            let types = generate_cyclic_candidates(*n, *d);
            let out = match format {
                Format::Json => {
                    let t: Vec<_> = types.iter().map(|t| serde_json::json!({"type": t.to_string(), "word": t.word()})).collect();
                    let v = serde_json::json!({"n": n, "d": d, "before": before, "after": types.len(), "types": t});
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Csv => {
                    let mut s = String::from("type,word\n");
                    for t in &types {
                        let w: Vec<String> = t.word().iter().map(|x| x.to_string()).collect();
                        writeln!(s, "\"{t}\",{}", w.join(" "))?;
                    }
                    s
                }
                Format::Text => {
                    let mut s = format!("{before} types, {} pass Watson's criterion\n", types.len());
                    for t in &types {
                        writeln!(s, "{t}")?;
                    }
                    s
                }
            };
            let answer = if types.is_empty() { Answer::Infeasible } else { Answer::Found };
            Ok((out, answer))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: bad --threads");
            return ExitCode::from(3);
        }
    }
    let result = run(&cli).and_then(|(text, answer)| {
        match &cli.out {
            Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{text}"),
        }
        Ok(answer)
    });
    match result {
        Ok(Answer::Found) => ExitCode::SUCCESS,
        Ok(Answer::Infeasible) => ExitCode::from(1),
        Ok(Answer::Inconclusive) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(3)
            } else if matches!(e.downcast_ref::<mincodes::Error>(), Some(mincodes::Error::Budget(_))) {
                ExitCode::from(2)
            } else if matches!(e.downcast_ref::<mincodes::Error>(), Some(mincodes::Error::Parse(_) | mincodes::Error::InvalidCode(_))) {
                ExitCode::from(3)
            } else {
                ExitCode::from(4)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_lists() {
        assert_eq!(parse_orders("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_orders("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_orders("7").unwrap(), vec![7]);
        assert_eq!(parse_orders("5, 7").unwrap(), vec![5, 7]);
        assert!(parse_orders("1..3").is_err());
        assert!(parse_orders("x").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
