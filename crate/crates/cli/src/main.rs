//! `ptcluster`: ensemble clustering from the command line.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use ptcluster::audit::link_audit;
use ptcluster::consensus::{ClSemantics, Method, PtgpConfig};
use ptcluster::ensemble::{build_microclusters, compute_mca};
use ptcluster::error::Error;
use ptcluster::graph::build_msg;
use ptcluster::io::{read_ensemble, read_features, read_labels, write_ensemble, write_labels};
use ptcluster::metrics::{nmi, Contingency};
use ptcluster::pipeline::{ConsensusOptions, ParamSpec, Pipeline};
use ptcluster::pool::{build_pool, cluster_upper_bound, PoolMember};
use ptcluster::trajectory::{read_pts, write_pts};

#[derive(Parser)]
#[command(name = "ptcluster", version, about = "Ensemble clustering by probability trajectories")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Consensus clustering of an ensemble file.
    Run(RunArgs),
    /// Build a pool of base clusterings from features and draw an ensemble.
    Generate(GenerateArgs),
    /// NMI between two label files.
    Eval(EvalArgs),
    /// Per-weight reliability of co-association links against ground truth.
    Audit(AuditArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Ensemble CSV/TSV: one row per object, one label column per clustering.
    #[arg(long, short)]
    input: PathBuf,
    /// Consensus labels, one per line.
    #[arg(long, short)]
    output: PathBuf,
    /// pta-al, pta-cl, pta-sl, ptgp, eac-al, eac-cl or eac-sl.
    #[arg(long, default_value = "pta-al")]
    method: String,
    /// Number of consensus clusters.
    #[arg(long = "k")]
    k: usize,
    /// Elite neighbors: a count, "auto" or "all".
    #[arg(long = "K", default_value = "auto")]
    k_elite: String,
    /// Trajectory length: a count or "auto".
    #[arg(long = "T", default_value = "auto")]
    steps: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Complete-link semantics: paper-sum or min.
    #[arg(long, default_value = "paper-sum")]
    cl_semantics: String,
    /// Reuse PTS matrices across runs, keyed by ensemble, K and T.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Merge list of agglomerative methods (left,right,similarity).
    #[arg(long)]
    dendrogram: Option<PathBuf>,
    /// K-ENG edge list.
    #[arg(long)]
    graph_dump: Option<PathBuf>,
    /// Binary lower-triangular PTS dump.
    #[arg(long)]
    pts_dump: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// Feature CSV/TSV.
    #[arg(long, short)]
    data: PathBuf,
    /// The last column of the feature file holds ground-truth labels.
    #[arg(long)]
    label_column: bool,
    #[arg(long, default_value_t = 200)]
    pool_size: usize,
    /// Ensemble size drawn from the pool.
    #[arg(long = "M", default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ensemble CSV; metadata goes to the same path with a `.json` suffix.
    #[arg(long, short)]
    output: PathBuf,
    /// Ground-truth labels of the feature file (needs --label-column).
    #[arg(long)]
    truth_output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Table CSV (default: standard output).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// An error with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidParameter(_) => 2,
            Error::Io(_) => 3,
            Error::InvalidInput(_) | Error::TooLarge { .. } => 4,
            Error::Numeric(_) => 5,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn io_failure(path: &Path, err: io::Error) -> Failure {
    Failure {
        code: 3,
        message: format!("{}: {err}", path.display()),
    }
}

/// Adds the offending path to I/O errors.
fn at<T>(path: &Path, result: ptcluster::error::Result<T>) -> Result<T, Failure> {
    result.map_err(|e| match e {
        Error::Io(io) => io_failure(path, io),
        other => other.into(),
    })
}

/// Writes through a sibling temporary file so failed runs leave no partial
/// output behind.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> ptcluster::error::Result<()>) -> Result<(), Failure> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let file = fs::File::create(&tmp).map_err(|e| io_failure(&tmp, e))?;
    let mut out = BufWriter::new(file);
    let written = fill(&mut out).and_then(|_| out.flush().map_err(Error::from));
    drop(out);
    if let Err(e) = written {
        let _ = fs::remove_file(&tmp);
        return at(path, Err(e));
    }
    fs::rename(&tmp, path).map_err(|e| io_failure(path, e))
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

#[derive(Serialize)]
struct RunSummary {
    objects: usize,
    clusterings: usize,
    microclusters: usize,
    msg_links: usize,
    keng_links: usize,
    ratio_pl: f64,
    k_elite: usize,
    k_elite_spec: String,
    steps: usize,
    steps_spec: String,
    method: String,
    k: usize,
    clusters: usize,
    pts_cache: &'static str,
    seconds: f64,
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let method: Method = args.method.parse()?;
    let k_spec: ParamSpec = args.k_elite.parse()?;
    let t_spec: ParamSpec = args.steps.parse()?;
    let cl: ClSemantics = args.cl_semantics.parse()?;

    let ensemble = at(&args.input, read_ensemble(&args.input))?;
    let pipeline = Pipeline::prepare(ensemble, k_spec, t_spec)?;
    info!("resolved K = {}, T = {}", pipeline.k_elite(), pipeline.steps());

    let needs_pts = !matches!(method, Method::EacAl | Method::EacCl | Method::EacSl);
    let mut cache_state = "off";
    let cache_file = args.cache_dir.as_ref().map(|dir| {
        dir.join(format!(
            "pts-{}-K{}-T{}.bin",
            pipeline.ensemble().fingerprint(),
            pipeline.k_elite(),
            pipeline.steps()
        ))
    });
    if let (Some(file), true) = (&cache_file, needs_pts) {
        cache_state = "miss";
        if file.exists() {
            match fs::File::open(file).map_err(Error::from).and_then(|f| read_pts(io::BufReader::new(f))) {
                Ok((pts, header)) if header.k_elite == pipeline.k_elite() => match pipeline.set_pts(pts) {
                    Ok(()) => cache_state = "hit",
                    Err(e) => warn!("ignoring mismatched PTS cache {}: {e}", file.display()),
                },
                Ok(_) => warn!("ignoring mismatched PTS cache {}", file.display()),
                Err(e) => warn!("ignoring unreadable PTS cache {}: {e}", file.display()),
            }
        }
    }

    let opts = ConsensusOptions {
        cl,
        ptgp: PtgpConfig {
            seed: args.seed,
            ..Default::default()
        },
    };
    let result = pipeline.consensus(method, args.k, &opts)?;

    if let (Some(file), "miss") = (&cache_file, cache_state) {
        if let Some(pts) = pipeline.pts_if_computed() {
            let dir = file.parent().expect("cache file has a directory");
            fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            write_atomic(file, |out| write_pts(pts, pipeline.k_elite(), out))?;
        }
    }
    write_atomic(&args.output, |out| write_labels(result.labels(), out))?;
    if let Some(path) = &args.dendrogram {
        match result.dendrogram() {
            Some(d) => write_atomic(path, |out| Ok(out.write_all(d.to_csv().as_bytes())?))?,
            None => warn!("{method} builds no dendrogram; --dendrogram ignored"),
        }
    }
    if let Some(path) = &args.graph_dump {
        write_atomic(path, |out| pipeline.keng().write_edge_list(out))?;
    }
    if let Some(path) = &args.pts_dump {
        let pts = pipeline.pts()?;
        write_atomic(path, |out| write_pts(pts, pipeline.k_elite(), out))?;
    }
    if result.n_clusters() < args.k {
        warn!("{method} produced {} clusters for k = {}", result.n_clusters(), args.k);
    }

    let summary = RunSummary {
        objects: pipeline.ensemble().n_objects(),
        clusterings: pipeline.ensemble().n_clusterings(),
        microclusters: pipeline.microclusters().len(),
        msg_links: pipeline.msg().n_links(),
        keng_links: pipeline.keng().n_links(),
        ratio_pl: pipeline.ratio_pl(),
        k_elite: pipeline.k_elite(),
        k_elite_spec: k_spec.to_string(),
        steps: pipeline.steps(),
        steps_spec: t_spec.to_string(),
        method: method.to_string(),
        k: args.k,
        clusters: result.n_clusters(),
        pts_cache: cache_state,
        seconds: start.elapsed().as_secs_f64(),
    };
    if args.json {
        print_json(&summary);
    } else {
        println!("objects        {}", summary.objects);
        println!("clusterings    {}", summary.clusterings);
        println!("microclusters  {}", summary.microclusters);
        println!("MSG links      {}", summary.msg_links);
        println!("K-ENG links    {}", summary.keng_links);
        println!("RatioPL        {:.4}", summary.ratio_pl);
        println!("K              {} ({})", summary.k_elite, summary.k_elite_spec);
        println!("T              {} ({})", summary.steps, summary.steps_spec);
        println!("method         {}", summary.method);
        println!("clusters       {} of {}", summary.clusters, summary.k);
        println!("PTS cache      {}", summary.pts_cache);
        println!("wall time      {:.3} s", summary.seconds);
    }
    Ok(())
}

#[derive(Serialize)]
struct GenerateMetadata<'a> {
    objects: usize,
    features: usize,
    pool_size: usize,
    ensemble_size: usize,
    seed: u64,
    cluster_upper_bound: usize,
    /// Pool indices of the drawn members, in column order.
    selected: &'a [usize],
    members: Vec<&'a PoolMember>,
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    if args.m == 0 || args.m > args.pool_size {
        return Err(Error::InvalidParameter(format!(
            "ensemble size M = {} must be in 1..={}",
            args.m, args.pool_size
        ))
        .into());
    }
    if args.truth_output.is_some() && !args.label_column {
        return Err(Error::InvalidParameter("--truth-output needs --label-column".into()).into());
    }
    let data = at(&args.data, read_features(&args.data, args.label_column))?;
    let pool = build_pool(&data, args.pool_size, args.seed)?;
    let (ensemble, selected) = pool.draw_ensemble(args.m, args.seed.wrapping_add(1))?;
    let metadata = GenerateMetadata {
        objects: data.n(),
        features: data.dim(),
        pool_size: pool.len(),
        ensemble_size: args.m,
        seed: args.seed,
        cluster_upper_bound: cluster_upper_bound(data.n()),
        selected: &selected,
        members: selected.iter().map(|&i| &pool.members()[i]).collect(),
    };
    let json = serde_json::to_string_pretty(&metadata).expect("metadata serializes");

    let mut sidecar = args.output.as_os_str().to_owned();
    sidecar.push(".json");
    write_atomic(&args.output, |out| write_ensemble(&ensemble, out))?;
    write_atomic(Path::new(&sidecar), |out| Ok(writeln!(out, "{json}")?))?;
    if let (Some(path), Some(truth)) = (&args.truth_output, data.truth()) {
        write_atomic(path, |out| write_labels(truth, out))?;
    }
    if args.json {
        println!("{json}");
    } else {
        println!(
            "wrote {} objects x {} clusterings to {}",
            ensemble.n_objects(),
            ensemble.n_clusterings(),
            args.output.display()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    nmi: f64,
    objects: usize,
    clusters_labels: usize,
    clusters_truth: usize,
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let labels = at(&args.labels, read_labels(&args.labels))?;
    let truth = at(&args.truth, read_labels(&args.truth))?;
    let table = Contingency::new(&labels, &truth)?;
    let report = EvalReport {
        nmi: nmi(&labels, &truth)?,
        objects: labels.len(),
        clusters_labels: table.rows,
        clusters_truth: table.cols,
    };
    if args.json {
        print_json(&report);
    } else {
        println!("{:.6}", report.nmi);
    }
    Ok(())
}

fn cmd_audit(args: AuditArgs) -> Result<(), Failure> {
    let ensemble = at(&args.input, read_ensemble(&args.input))?;
    let truth: Vec<usize> = ptcluster::consensus::canonical_labels(&at(&args.truth, read_labels(&args.truth))?);
    let mcs = build_microclusters(&ensemble);
    let msg = build_msg(&compute_mca(&ensemble, &mcs), &mcs);
    let report = link_audit(&msg, &mcs, &truth)?;
    let csv = report.to_csv();
    match &args.output {
        Some(path) => write_atomic(path, |out| Ok(out.write_all(csv.as_bytes())?))?,
        None if !args.json => print!("{csv}"),
        None => {}
    }
    if args.json {
        #[derive(Serialize)]
        struct Bucket {
            weight: f64,
            links: u64,
            link_fraction: f64,
            correct: u64,
            correct_rate: Option<f64>,
        }
        #[derive(Serialize)]
        struct Report {
            clusterings: usize,
            total_links: u64,
            non_decreasing: bool,
            buckets: Vec<Bucket>,
        }
        print_json(&Report {
            clusterings: report.n_clusterings,
            total_links: report.total_links,
            non_decreasing: report.is_non_decreasing(),
            buckets: report
                .buckets
                .iter()
                .map(|b| Bucket {
                    weight: b.weight,
                    links: b.links,
                    link_fraction: b.link_fraction,
                    correct: b.correct,
                    correct_rate: b.correct_rate,
                })
                .collect(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            warn!("could not configure the thread pool: {e}");
        }
    }
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Audit(args) => cmd_audit(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
