//! Command-line surface for the local-limit synthesis pipeline.
//!
//! Exit codes: 0 success / checks passed; 1 failed checks or runtime errors;
//! 2 malformed input (files or parameter grammars); 3 scale cap exceeded.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use locallim::census::{ball_census, girth, tv_distance, DEFAULT_BALL_CAP};
use locallim::graphio::GraphFile;
use locallim::labeling::DEFAULT_ENUMERATION_CAP;
use locallim::measure::{
    marginals_atom, marginals_regular, marginals_ugw, mixture, MarginalTable,
};
use locallim::params::{parse_degree_dist, parse_mixture_list, parse_tree_spec};
use locallim::ratio::{fmt_ratio, frac, int, parse_ratio, Ratio};
use locallim::synth::{
    graph_file, synthesize, SynthCaps, SynthError, SynthMode, DEFAULT_MAX_DENOMINATOR,
    DEFAULT_MAX_SCALE, DEFAULT_SEED,
};
use locallim::validate::check;
use num::{One, Zero};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "locallim",
    version,
    about = "Synthesize finite graphs realizing involution-invariant local tree statistics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a marginal table file from a built-in measure family.
    Marginals {
        #[command(subcommand)]
        family: Family,
    },
    /// Check a table against the involution-invariance equations.
    Validate {
        table: PathBuf,
        /// Largest radius to certify (default: depth - 1).
        #[arg(long)]
        r_max: Option<u32>,
        /// Rational tolerance for externally rounded tables (default 0).
        #[arg(long, default_value = "0")]
        tolerance: String,
    },
    /// Synthesize a finite graph realizing the table at radius r within
    /// total-variation epsilon.
    Synthesize {
        table: PathBuf,
        #[arg(short, long)]
        r: u32,
        #[arg(short, long)]
        epsilon: String,
        /// 64-bit seed, or `random` for entropy.
        #[arg(long, default_value = "default")]
        seed: String,
        /// quotient (default) or faithful (needs --labels).
        #[arg(long, default_value = "quotient")]
        mode: String,
        /// Label count for faithful mode.
        #[arg(long)]
        labels: Option<u64>,
        /// Abort if the scale integer N would exceed this cap.
        #[arg(long = "max-N", default_value_t = DEFAULT_MAX_SCALE)]
        max_n: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_DENOMINATOR)]
        max_denominator: u64,
        /// Census workers (default: $LOCALLIM_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
        ball_cap: usize,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the synthesis report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact ball census of an edge-list graph file.
    Census {
        graph: PathBuf,
        #[arg(short, long)]
        r: u32,
        /// Compare against this table (exact TV distance).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
        ball_cap: usize,
        /// Also compute the girth.
        #[arg(long)]
        girth: bool,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
    /// Re-census a graph against a table and require TV <= epsilon.
    Verify {
        graph: PathBuf,
        table: PathBuf,
        #[arg(short, long)]
        r: u32,
        /// Defaults to the epsilon recorded in the graph file.
        #[arg(short, long)]
        epsilon: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
        ball_cap: usize,
    },
    /// Emit graphs G_1..G_K with r = k and epsilon = 2^-k.
    Sequence {
        table: PathBuf,
        #[arg(short = 'K', long)]
        k_max: u32,
        #[arg(long, default_value = "G")]
        out_prefix: String,
        #[arg(long, default_value = "default")]
        seed: String,
        #[arg(long, default_value_t = DEFAULT_MAX_SCALE)]
        max_n: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the built-in identity and invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Subcommand)]
enum Family {
    /// Point mass on the d-regular tree.
    Regular(CommonGen),
    /// Unimodular Galton-Watson tree with the given root degree law.
    Ugw {
        /// Degree distribution `k:p/q,...`.
        #[arg(long)]
        deg: String,
        #[command(flatten)]
        common: CommonGen,
    },
    /// Uniformly rooted finite tree.
    Atom {
        /// Tree spec: k1, k2, path<k>, star<k>, cbt<h>, or edges:0-1,...
        #[arg(long)]
        tree: String,
        #[command(flatten)]
        common: CommonGen,
    },
    /// Convex combination of existing table files: `w:path,...`.
    Mixture {
        #[arg(long)]
        of: String,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CommonGen {
    /// Degree bound (default for ugw/atom: largest degree present).
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    depth: u32,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run the larger identity instances as well.
    #[arg(long)]
    full: bool,
}

/// Errors carrying an explicit process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn workers_or_default(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("LOCALLIM_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    })
    .max(1)
}

fn parse_seed(s: &str) -> Result<u64> {
    match s {
        "default" => Ok(DEFAULT_SEED),
        "random" => Ok(rand::random()),
        v => v
            .parse()
            .with_context(|| format!("seed must be a 64-bit integer or `random`, got `{v}`")),
    }
}

fn load_table(path: &Path) -> Result<MarginalTable, Failure> {
    MarginalTable::load(path)
        .map_err(|e| Failure::new(2, format!("cannot load table {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<GraphFile, Failure> {
    GraphFile::load(path)
        .map_err(|e| Failure::new(2, format!("cannot load graph {}: {e}", path.display())))
}

fn parse_epsilon(s: &str) -> Result<Ratio, Failure> {
    let eps = parse_ratio(s).map_err(|e| Failure::new(2, format!("bad epsilon `{s}`: {e}")))?;
    if eps <= Ratio::zero() || eps >= Ratio::one() {
        return Err(Failure::new(2, "epsilon must lie strictly between 0 and 1"));
    }
    Ok(eps)
}

fn cmd_marginals(family: Family) -> Result<(), Failure> {
    let (table, out) = match family {
        Family::Regular(c) => {
            let d = c.d.ok_or_else(|| Failure::new(2, "regular needs --d"))?;
            (marginals_regular(d, c.depth), c.out)
        }
        Family::Ugw { deg, common } => {
            let dist = parse_degree_dist(&deg).map_err(|e| Failure::new(2, e.to_string()))?;
            let d = common
                .d
                .unwrap_or_else(|| dist.keys().max().copied().unwrap_or(1));
            let t = marginals_ugw(&dist, d, common.depth)
                .map_err(|e| Failure::new(1, e.to_string()))?;
            (t, common.out)
        }
        Family::Atom { tree, common } => {
            let f = parse_tree_spec(&tree).map_err(|e| Failure::new(2, e.to_string()))?;
            let d = common.d.unwrap_or_else(|| f.max_degree().max(1) as u32);
            let t = marginals_atom(&f, d, common.depth)
                .map_err(|e| Failure::new(1, e.to_string()))?;
            (t, common.out)
        }
        Family::Mixture { of, out } => {
            let list = parse_mixture_list(&of).map_err(|e| Failure::new(2, e.to_string()))?;
            let mut parts = Vec::new();
            for (w, path) in list {
                parts.push((load_table(Path::new(&path))?, w));
            }
            let t = mixture(&parts).map_err(|e| Failure::new(1, e.to_string()))?;
            (t, out)
        }
    };
    table
        .save(&out)
        .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", out.display())))?;
    println!(
        "wrote table d={} depth={} classes-at-depth={} digest={} to {}",
        table.degree_bound(),
        table.depth(),
        table.level(table.depth()).len(),
        table.digest(),
        out.display()
    );
    Ok(())
}

fn cmd_validate(table: PathBuf, r_max: Option<u32>, tolerance: String) -> Result<(), Failure> {
    let t = load_table(&table)?;
    let tol =
        parse_ratio(&tolerance).map_err(|e| Failure::new(2, format!("bad tolerance: {e}")))?;
    let r_max = r_max.unwrap_or_else(|| t.depth().saturating_sub(1));
    let report = check(&t, r_max, &tol).map_err(|e| Failure::new(2, e.to_string()))?;
    print!("{report}");
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::new(
            1,
            format!("{} violation(s)", report.violations.len()),
        ))
    }
}

fn synth_caps(
    max_n: u64,
    max_denominator: u64,
    workers: Option<usize>,
    ball_cap: usize,
) -> SynthCaps {
    SynthCaps {
        max_scale: max_n,
        max_denominator,
        enumeration_cap: DEFAULT_ENUMERATION_CAP,
        census_workers: workers_or_default(workers),
        census_ball_cap: ball_cap,
        tolerance: Ratio::zero(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_synthesize(
    table: PathBuf,
    r: u32,
    epsilon: String,
    seed: String,
    mode: String,
    labels: Option<u64>,
    max_n: u64,
    max_denominator: u64,
    workers: Option<usize>,
    ball_cap: usize,
    out: PathBuf,
    report_path: Option<PathBuf>,
) -> Result<(), Failure> {
    let t = load_table(&table)?;
    let eps = parse_epsilon(&epsilon)?;
    let seed = parse_seed(&seed).map_err(|e| Failure::new(2, e.to_string()))?;
    let mode = match mode.as_str() {
        "quotient" => SynthMode::Quotient,
        "faithful" => SynthMode::Faithful {
            n: labels.ok_or_else(|| Failure::new(2, "faithful mode needs --labels"))?,
        },
        other => return Err(Failure::new(2, format!("unknown mode `{other}`"))),
    };
    let caps = synth_caps(max_n, max_denominator, workers, ball_cap);
    match synthesize(&t, r, &eps, mode, seed, &caps) {
        Ok((graph, report)) => {
            graph_file(&graph, &report)
                .save(&out)
                .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", out.display())))?;
            if let Some(p) = report_path {
                std::fs::write(&p, report.to_text())
                    .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", p.display())))?;
            }
            print!("{}", report.to_text());
            println!("graph {}", out.display());
            Ok(())
        }
        Err(SynthError::MaxScaleExceeded {
            epsilon,
            cap,
            required,
            best_tv,
        }) => Err(Failure::new(
            3,
            format!(
                "scale cap {cap} exceeded: needs N = {required} \
                 (target epsilon {epsilon}, best TV reached {best_tv})"
            ),
        )),
        Err(e) => Err(Failure::new(1, e.to_string())),
    }
}

fn cmd_census(
    graph: PathBuf,
    r: u32,
    table: Option<PathBuf>,
    workers: Option<usize>,
    ball_cap: usize,
    want_girth: bool,
    json: bool,
) -> Result<(), Failure> {
    let g = load_graph(&graph)?;
    let t = table.map(|p| load_table(&p)).transpose()?;
    let d = t
        .as_ref()
        .map(|t| t.degree_bound())
        .unwrap_or_else(|| g.max_degree().max(1) as u32);
    let workers = workers_or_default(workers);
    let rep =
        ball_census(&g.adj, r, d, workers, ball_cap).map_err(|e| Failure::new(1, e.to_string()))?;
    let tv = t
        .as_ref()
        .map(|t| tv_distance(&rep, t))
        .transpose()
        .map_err(|e| Failure::new(1, e.to_string()))?;
    let gi = want_girth.then(|| girth(&g.adj));
    if json {
        let mut balls = serde_json::Map::new();
        for (b, c) in &rep.counts {
            balls.insert(b.token(), serde_json::json!(c));
        }
        let mut obj = serde_json::json!({
            "radius": rep.r,
            "degree_bound": rep.d,
            "vertices": rep.total,
            "classes": rep.counts.len(),
            "tree_ball_fraction": fmt_ratio(&rep.tree_ball_fraction()),
            "oversized_vertices": rep.oversized_vertices,
            "counts": serde_json::Value::Object(balls),
        });
        if let Some(tv) = &tv {
            obj["tv"] = serde_json::json!(fmt_ratio(&tv.tv));
            obj["max_dev"] = serde_json::json!(fmt_ratio(&tv.max_dev));
        }
        if let Some(gi) = gi {
            obj["girth"] = match gi {
                Some(v) => serde_json::json!(v),
                None => serde_json::json!("infinite"),
            };
        }
        println!("{}", serde_json::to_string_pretty(&obj).expect("json"));
    } else {
        println!("radius {}", rep.r);
        println!("degree-bound {}", rep.d);
        println!("vertices {}", rep.total);
        println!("classes {}", rep.counts.len());
        println!(
            "tree-ball-fraction {}",
            fmt_ratio(&rep.tree_ball_fraction())
        );
        println!("oversized {}", rep.oversized_vertices);
        if let Some(gi) = gi {
            match gi {
                Some(v) => println!("girth {v}"),
                None => println!("girth infinite"),
            }
        }
        if let Some(tv) = &tv {
            println!("tv {}", fmt_ratio(&tv.tv));
            println!("max-dev {}", fmt_ratio(&tv.max_dev));
        }
        for (b, c) in &rep.counts {
            println!("ball {} {}", b.token(), c);
        }
    }
    Ok(())
}

fn cmd_verify(
    graph: PathBuf,
    table: PathBuf,
    r: u32,
    epsilon: Option<String>,
    workers: Option<usize>,
    ball_cap: usize,
) -> Result<(), Failure> {
    let g = load_graph(&graph)?;
    let t = load_table(&table)?;
    let eps = match epsilon {
        Some(s) => parse_epsilon(&s)?,
        None => match g.meta.get("epsilon") {
            Some(s) => parse_epsilon(s)?,
            None => {
                return Err(Failure::new(
                    2,
                    "no --epsilon given and none recorded in the graph file",
                ))
            }
        },
    };
    let rep = ball_census(
        &g.adj,
        r,
        t.degree_bound(),
        workers_or_default(workers),
        ball_cap,
    )
    .map_err(|e| Failure::new(1, e.to_string()))?;
    let tv = tv_distance(&rep, &t).map_err(|e| Failure::new(1, e.to_string()))?;
    println!(
        "tv {} epsilon {} max-dev {}",
        fmt_ratio(&tv.tv),
        fmt_ratio(&eps),
        fmt_ratio(&tv.max_dev)
    );
    if tv.tv <= eps {
        println!("verify PASS");
        Ok(())
    } else {
        Err(Failure::new(1, "verify FAIL: TV above epsilon"))
    }
}

fn cmd_sequence(
    table: PathBuf,
    k_max: u32,
    out_prefix: String,
    seed: String,
    max_n: u64,
    workers: Option<usize>,
) -> Result<(), Failure> {
    let t = load_table(&table)?;
    let seed = parse_seed(&seed).map_err(|e| Failure::new(2, e.to_string()))?;
    if k_max == 0 {
        return Err(Failure::new(2, "K must be at least 1"));
    }
    if t.depth() < k_max + 2 {
        return Err(Failure::new(
            2,
            format!(
                "sequence to K = {k_max} needs table depth {} (have {})",
                k_max + 2,
                t.depth()
            ),
        ));
    }
    for k in 1..=k_max {
        let eps = frac(1, 1) / int(2i64.pow(k));
        let caps = synth_caps(max_n, DEFAULT_MAX_DENOMINATOR, workers, DEFAULT_BALL_CAP);
        match synthesize(&t, k, &eps, SynthMode::Quotient, seed, &caps) {
            Ok((graph, report)) => {
                let path = PathBuf::from(format!("{out_prefix}{k}.txt"));
                graph_file(&graph, &report).save(&path).map_err(|e| {
                    Failure::new(1, format!("cannot write {}: {e}", path.display()))
                })?;
                println!(
                    "k={k} epsilon={} vertices={} tv={} tree-ball-fraction={} file={}",
                    fmt_ratio(&eps),
                    report.vertices,
                    fmt_ratio(&report.tv),
                    fmt_ratio(&report.tree_ball_fraction),
                    path.display()
                );
            }
            Err(SynthError::MaxScaleExceeded {
                cap, required, ..
            }) => {
                return Err(Failure::new(
                    3,
                    format!("k={k}: scale cap {cap} exceeded (needs N = {required})"),
                ))
            }
            Err(e) => return Err(Failure::new(1, format!("k={k}: {e}"))),
        }
    }
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> Result<(), Failure> {
    let mut failures = 0u32;
    let mut run = |name: &str, ok: Result<bool>| match ok {
        Ok(true) => println!("ok   {name}"),
        Ok(false) => {
            failures += 1;
            println!("FAIL {name}");
        }
        Err(e) => {
            failures += 1;
            println!("FAIL {name}: {e}");
        }
    };

    run("tree-ball enumeration counts", (|| {
        Ok(locallim::ball::enumerate_tree_balls(3, 1, 10_000)?.len() == 4
            && locallim::ball::enumerate_tree_balls(2, 2, 10_000)?.len() == 6
            && locallim::ball::enumerate_tree_balls(1, 5, 10_000)?.len() == 2)
    })());

    run("involution algebra (d <= 3, r <= 2)", (|| {
        for d in 1..=3u32 {
            for r in 1..=2u32 {
                for ball in locallim::ball::enumerate_tree_balls(d, r, 100_000)? {
                    let ors = locallim::directed::orientations(&ball);
                    let total: u32 = ors.iter().map(|(_, l)| *l).sum();
                    if total != ball.root_degree() {
                        return Ok(false);
                    }
                    for (vb, _) in ors {
                        let eb = locallim::directed::edge_ball_within(&vb)?;
                        if eb.involute().involute() != eb || eb.involute().s_view() != eb.t_view()
                        {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    })());

    run("validator accepts generators", (|| {
        let q = parse_degree_dist("1:1/2,3:1/2").map_err(|e| anyhow!(e.to_string()))?;
        for t in [
            marginals_regular(2, 3),
            marginals_regular(3, 3),
            marginals_ugw(&q, 3, 3)?,
        ] {
            if !check(&t, 2, &Ratio::zero())?.pass() {
                return Ok(false);
            }
        }
        Ok(true)
    })());

    run("labeled identities (d=2, r=1, n=4, atom path3)", (|| {
        let tree = parse_tree_spec("path3").map_err(|e| anyhow!(e.to_string()))?;
        let t = marginals_atom(&tree, 2, 2)?;
        Ok(locallim::labeling::mu_n_unlabeled_identity(&t, 1, 4, DEFAULT_ENUMERATION_CAP)?.pass())
    })());

    if args.full {
        run("labeled identities (d=3, r=1, n=5, ugw(1,3))", (|| {
            let q = parse_degree_dist("1:1/2,3:1/2").map_err(|e| anyhow!(e.to_string()))?;
            let t = marginals_ugw(&q, 3, 2)?;
            Ok(
                locallim::labeling::mu_n_unlabeled_identity(&t, 1, 5, DEFAULT_ENUMERATION_CAP)?
                    .pass(),
            )
        })());
    }

    run("end-to-end synthesize + census (regular d=2)", (|| {
        let t = marginals_regular(2, 3);
        let caps = synth_caps(
            DEFAULT_MAX_SCALE,
            DEFAULT_MAX_DENOMINATOR,
            Some(2),
            DEFAULT_BALL_CAP,
        );
        let (_, rep) = synthesize(&t, 1, &frac(1, 20), SynthMode::Quotient, DEFAULT_SEED, &caps)?;
        Ok(rep.tv <= frac(1, 20))
    })());

    if failures == 0 {
        println!("selftest PASS");
        Ok(())
    } else {
        Err(Failure::new(1, format!("{failures} selftest failure(s)")))
    }
}

fn main() -> ExitCode {
    // Piping into `head` should truncate output, not panic.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Marginals { family } => cmd_marginals(family),
        Cmd::Validate {
            table,
            r_max,
            tolerance,
        } => cmd_validate(table, r_max, tolerance),
        Cmd::Synthesize {
            table,
            r,
            epsilon,
            seed,
            mode,
            labels,
            max_n,
            max_denominator,
            workers,
            ball_cap,
            out,
            report,
        } => cmd_synthesize(
            table,
            r,
            epsilon,
            seed,
            mode,
            labels,
            max_n,
            max_denominator,
            workers,
            ball_cap,
            out,
            report,
        ),
        Cmd::Census {
            graph,
            r,
            table,
            workers,
            ball_cap,
            girth,
            json,
        } => cmd_census(graph, r, table, workers, ball_cap, girth, json),
        Cmd::Verify {
            graph,
            table,
            r,
            epsilon,
            workers,
            ball_cap,
        } => cmd_verify(graph, table, r, epsilon, workers, ball_cap),
        Cmd::Sequence {
            table,
            k_max,
            out_prefix,
            seed,
            max_n,
            workers,
        } => cmd_sequence(table, k_max, out_prefix, seed, max_n, workers),
        Cmd::Selftest(args) => cmd_selftest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
