use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use jitterdisc::binom::{self, MaxBinParams};
use jitterdisc::bounds::{all_bounds, UpperConstant};
use jitterdisc::discrepancy::{
    star_disc_certified_upper, star_disc_exact, star_disc_heuristic, CoverSpec, DiscrepancyEstimate,
    DEFAULT_RESTARTS,
};
use jitterdisc::harness::{
    collapse_analysis, json_envelope, kh_demo, load_point_set, parse_config, read_records_csv, run_sweep,
    save_point_set, save_records, write_point_set, write_records_csv, write_replications_csv, Method,
    DEFAULT_SPREAD_THRESHOLD,
};
use jitterdisc::sampler::{generate, generate_lhs, generate_uniform, PointSet, SamplerKind, StratifiedSpec};
use jitterdisc::witness::{mean_disc_is_zero_test, random_anchored_rects, witness, WitnessScheme};
use jitterdisc::{Error, Result};

#[derive(Parser)]
#[command(name = "jitterdisc", version, about = "Jittered sampling and star discrepancy toolkit")]
struct Cli {
    /// Random seed
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "JITTERDISC_THREADS")]
    threads: Option<usize>,
    /// Omit timestamps from outputs
    #[arg(long, global = true)]
    deterministic: bool,
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a point set
    Gen(GenArgs),
    /// Star discrepancy of a point set file
    Disc(DiscArgs),
    /// Lower-bound witness box for a jittered point set
    Witness(WitnessArgs),
    /// Test that stratified sets have zero-mean discrepancy on random boxes
    Zerotest(ZeroArgs),
    /// Maximum-of-binomials bounds and exact values
    Maxbin(MaxbinArgs),
    /// Discrepancy bounds for jittered sampling
    Bounds(BoundsArgs),
    /// Run a replicated sweep from a config file
    Sweep(SweepArgs),
    /// Scaling-collapse analysis of a sweep CSV
    Collapse(CollapseArgs),
    /// Koksma-Hlawka inequality check for f(x) = prod x_i
    Khdemo(KhArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "jittered")]
    sampler: SamplerKind,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    d: usize,
    /// Half-cube split dimension d'
    #[arg(long)]
    dprime: Option<usize>,
    /// Point count for uniform and lhs
    #[arg(long)]
    n: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "exact")]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Certified cover resolution M
    #[arg(long, conflicts_with = "delta")]
    grid: Option<u32>,
    /// Certified cover precision
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// construct, discrete or smallm
    #[arg(long, default_value = "discrete")]
    scheme: String,
    /// Per-axis slab widths for the construct scheme
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
}

#[derive(Args)]
struct ZeroArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    d: usize,
    /// Use 2^DPRIME half-cube boxes instead of an m^d grid
    #[arg(long)]
    half_cube: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 100)]
    boxes: usize,
    /// Boxes that must pass (default: all)
    #[arg(long)]
    min_pass: Option<usize>,
}

#[derive(Args)]
struct MaxbinArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    c: Option<f64>,
    /// Evaluate the expectation bound
    #[arg(long)]
    expect: bool,
    /// Evaluate exact values
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    d: u64,
    /// Use the constant carried through the proof of the upper bound
    #[arg(long)]
    proof_constant: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output CSV (overrides the config; with several experiments the
    /// experiment name is appended)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-replication rows
    #[arg(long)]
    replications_out: Option<PathBuf>,
}

#[derive(Args)]
struct CollapseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SPREAD_THRESHOLD)]
    threshold: f64,
}

#[derive(Args)]
struct KhArgs {
    /// Point set file; otherwise a jittered set is generated from --m and --d
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

enum Outcome {
    Pass,
    Fail,
}

struct Ctx {
    seed: u64,
    threads: Option<usize>,
    deterministic: bool,
    json: bool,
}

impl Ctx {
    fn emit<T: Serialize>(&self, kind: &str, payload: &T, text: impl FnOnce() -> String) -> Result<()> {
        let mut out = io::stdout().lock();
        if self.json {
            let v = json_envelope(kind, payload)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        } else {
            write!(out, "{}", text())?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let ctx = Ctx {
        seed: cli.seed,
        threads: cli.threads,
        deterministic: cli.deterministic,
        json: cli.json,
    };
    if let Some(t) = ctx.threads {
        if t == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(1);
        }
        if !matches!(cli.cmd, Cmd::Sweep(_)) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    match run(&ctx, cli.cmd) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(ctx: &Ctx, cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Gen(a) => cmd_gen(ctx, a),
        Cmd::Disc(a) => cmd_disc(ctx, a),
        Cmd::Witness(a) => cmd_witness(ctx, a),
        Cmd::Zerotest(a) => cmd_zerotest(ctx, a),
        Cmd::Maxbin(a) => cmd_maxbin(ctx, a),
        Cmd::Bounds(a) => cmd_bounds(ctx, a),
        Cmd::Sweep(a) => cmd_sweep(ctx, a),
        Cmd::Collapse(a) => cmd_collapse(ctx, a),
        Cmd::Khdemo(a) => cmd_khdemo(ctx, a),
    }
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Validation(format!("{what} needs --{flag}")))
}

fn cmd_gen(ctx: &Ctx, a: GenArgs) -> Result<Outcome> {
    let p = match a.sampler {
        SamplerKind::Jittered => generate(&StratifiedSpec::full_grid(need(a.m, "m", "jittered")?, a.d)?, ctx.seed)?,
        SamplerKind::HalfCube => generate(
            &StratifiedSpec::half_cube(need(a.dprime, "dprime", "halfcube")?, a.d)?,
            ctx.seed,
        )?,
        SamplerKind::Uniform => generate_uniform(need(a.n, "n", "uniform")?, a.d, ctx.seed)?,
        SamplerKind::Lhs => generate_lhs(need(a.n, "n", "lhs")?, a.d, ctx.seed)?,
        SamplerKind::External => return Err(Error::Validation("cannot generate from the external sampler".into())),
    };
    match a.out {
        Some(path) => {
            save_point_set(&p, &path)?;
            if ctx.json {
                ctx.emit("gen", &json!({"path": path, "N": p.len(), "d": p.dim()}), String::new)?;
            }
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_point_set(&p, &mut w)?;
            w.flush()?;
        }
    }
    Ok(Outcome::Pass)
}

fn estimate(p: &PointSet, method: Method, restarts: usize, cover: Option<CoverSpec>, seed: u64) -> Result<DiscrepancyEstimate> {
    match method {
        Method::Exact => star_disc_exact(p),
        Method::Heuristic => star_disc_heuristic(p, restarts, seed),
        Method::Certified => star_disc_certified_upper(p, &need(cover, "grid", "certified")?),
    }
}

fn cmd_disc(ctx: &Ctx, a: DiscArgs) -> Result<Outcome> {
    let p = load_point_set(&a.input)?;
    let cover = match (a.grid, a.delta) {
        (Some(g), _) => Some(CoverSpec::from_grid(g, p.dim())?),
        (None, Some(dl)) => Some(CoverSpec::from_delta(dl, p.dim())?),
        (None, None) => None,
    };
    let est = estimate(&p, a.method, a.restarts, cover, ctx.seed)?;
    let normalized = est.normalized(p.len())?;
    let payload = json!({
        "value": est.value,
        "kind": est.kind,
        "normalized": normalized,
        "witness": est.witness,
        "delta": est.delta,
        "N": p.len(),
        "d": p.dim(),
    });
    ctx.emit("disc", &payload, || {
        let mut s = format!("D* = {} ({:?}), D*/N = {normalized}\n", est.value, est.kind);
        if let Some(w) = &est.witness {
            s.push_str(&format!("witness corner {:?}, side {:?}\n", w.corner, w.side));
        }
        if let Some(dl) = est.delta {
            s.push_str(&format!("delta = {dl}\n"));
        }
        s
    })?;
    Ok(Outcome::Pass)
}

fn cmd_witness(ctx: &Ctx, a: WitnessArgs) -> Result<Outcome> {
    let p = load_point_set(&a.input)?;
    let scheme = match a.scheme.to_ascii_lowercase().as_str() {
        "construct" => WitnessScheme::Construct { r: a.r },
        "discrete" => WitnessScheme::DiscreteLowerMain,
        "smallm" | "small_m" => WitnessScheme::SmallM,
        other => return Err(Error::Validation(format!("unknown scheme '{other}'"))),
    };
    let w = witness(&p, &scheme)?;
    ctx.emit("witness", &w, || {
        format!(
            "scheme {}, m = {}\ncorner {:?}\nper-axis disc {:?}\ntotal {}\nbox disc {}\n",
            scheme.name(),
            w.m,
            w.corner,
            w.per_dim_disc,
            w.total,
            w.box_disc
        )
    })?;
    Ok(Outcome::Pass)
}

fn cmd_zerotest(ctx: &Ctx, a: ZeroArgs) -> Result<Outcome> {
    let spec = match (a.half_cube, a.m) {
        (Some(dp), _) => StratifiedSpec::half_cube(dp, a.d)?,
        (None, Some(m)) => StratifiedSpec::full_grid(m, a.d)?,
        (None, None) => return Err(Error::Validation("zerotest needs --m or --half-cube".into())),
    };
    let rects = random_anchored_rects(a.boxes, a.d, ctx.seed)?;
    let rep = mean_disc_is_zero_test(&spec, &rects, a.reps, ctx.seed)?;
    let min_pass = a.min_pass.unwrap_or(a.boxes);
    let ok = rep.passed >= min_pass;
    ctx.emit("zerotest", &json!({"report": rep, "min_pass": min_pass, "pass": ok}), || {
        format!(
            "{}/{} boxes consistent with zero mean over {} replications (need {min_pass}): {}\n",
            rep.passed,
            rep.rows.len(),
            rep.replications,
            if ok { "PASS" } else { "FAIL" }
        )
    })?;
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn opt<T>(r: Result<T>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn cmd_maxbin(ctx: &Ctx, a: MaxbinArgs) -> Result<Outcome> {
    let mut out = serde_json::Map::new();
    out.insert("n".into(), a.n.into());
    out.insert("k".into(), a.k.into());
    let mut ok = true;
    let mut text = format!("n = {}, k = {}\n", a.n, a.k);
    if let Some(c) = a.c {
        let params = MaxBinParams { n: a.n, k: a.k, c };
        let al = binom::alpha(&params)?;
        let (bound, reason) = opt(binom::prob_bound(&params));
        out.insert("c".into(), c.into());
        out.insert("alpha".into(), al.into());
        out.insert("prob_bound".into(), json!(bound));
        out.insert("prob_bound_error".into(), json!(reason));
        text.push_str(&format!("alpha(c) = {al}\n"));
        match (&bound, &reason) {
            (Some(b), _) => text.push_str(&format!("Pr[Xmax >= n/2 + alpha] >= {b}\n")),
            (None, Some(r)) => text.push_str(&format!("probability bound not applicable: {r}\n")),
            _ => {}
        }
        if a.oracle {
            let exact = binom::exact_max_prob(a.n, a.k, a.n as f64 / 2.0 + al)?;
            out.insert("prob_exact".into(), exact.into());
            text.push_str(&format!("exact probability = {exact}\n"));
            if let Some(b) = bound {
                out.insert("prob_margin".into(), (exact - b).into());
                text.push_str(&format!("margin = {}\n", exact - b));
                ok &= exact >= b;
            }
        }
    }
    if a.expect {
        let (bound, reason) = opt(binom::expect_bound(a.n, a.k));
        out.insert("expect_bound".into(), json!(bound));
        out.insert("expect_bound_error".into(), json!(reason));
        match (&bound, &reason) {
            (Some(b), _) => text.push_str(&format!("E[max(0, Xmax - n/2)] >= {b}\n")),
            (None, Some(r)) => text.push_str(&format!("expectation bound not applicable: {r}\n")),
            _ => {}
        }
        if a.oracle {
            let exact = binom::exact_max_binomial_expect(a.n, a.k)?;
            out.insert("expect_exact".into(), exact.into());
            text.push_str(&format!("exact expectation = {exact}\n"));
            if let Some(b) = bound {
                out.insert("expect_margin".into(), (exact - b).into());
                text.push_str(&format!("margin = {}\n", exact - b));
                ok &= exact >= b;
            }
        }
    }
    if a.c.is_none() && !a.expect {
        return Err(Error::Validation("maxbin needs --c or --expect".into()));
    }
    out.insert("pass".into(), ok.into());
    ctx.emit("maxbin", &out, || text)?;
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_bounds(ctx: &Ctx, a: BoundsArgs) -> Result<Outcome> {
    let constant = if a.proof_constant { UpperConstant::Proof } else { UpperConstant::Statement };
    let bounds = all_bounds(a.m, a.d, constant)?;
    ctx.emit("bounds", &json!({"m": a.m, "d": a.d, "bounds": bounds}), || {
        let mut s = format!("m = {}, d = {}, N = m^d\n", a.m, a.d);
        for b in &bounds {
            s.push_str(&format!("{:<14} {:>14.6e}", b.formula.to_string(), b.value));
            match &b.reason {
                Some(r) if !b.applicable => s.push_str(&format!("  (not applicable: {r})")),
                _ => {}
            }
            s.push('\n');
        }
        s
    })?;
    Ok(Outcome::Pass)
}

fn cmd_sweep(ctx: &Ctx, a: SweepArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.config)?;
    let mut cfgs = parse_config(&text)?;
    for c in &mut cfgs {
        jitterdisc::harness::sweep::validate(c)?;
    }
    let many = cfgs.len() > 1;
    let mut all = Vec::new();
    let mut all_reps = Vec::new();
    for cfg in &mut cfgs {
        if let Some(out) = &a.out {
            cfg.output = Some(if many { suffixed(out, &cfg.name) } else { out.clone() });
        }
        let res = run_sweep(cfg, ctx.threads)?;
        if let Some(path) = &cfg.output {
            save_records(&res.records, path, ctx.deterministic)?;
        }
        all.extend(res.records);
        all_reps.extend(res.replications);
    }
    if let Some(path) = &a.replications_out {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        write_replications_csv(&all_reps, &mut w)?;
        w.flush()?;
    }
    if ctx.json {
        ctx.emit("sweep", &json!({"records": all}), String::new)?;
    } else if cfgs.iter().all(|c| c.output.is_some()) {
        for c in &cfgs {
            println!("wrote {}", c.output.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        }
    } else {
        let mut w = BufWriter::new(io::stdout().lock());
        write_records_csv(&all, &mut w, None)?;
        w.flush()?;
    }
    Ok(Outcome::Pass)
}

fn suffixed(path: &std::path::Path, name: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{name}{ext}"))
}

fn cmd_collapse(ctx: &Ctx, a: CollapseArgs) -> Result<Outcome> {
    let records = read_records_csv(std::fs::File::open(&a.input)?)?;
    let rep = collapse_analysis(&records, a.threshold)?;
    ctx.emit("collapse", &rep, || {
        let mut s = String::new();
        for g in &rep.groups {
            s.push_str(&format!("{} d={} rate {}\n", g.sampler, g.d, g.rate));
            for p in &g.points {
                let m = p.m.map(|m| m.to_string()).unwrap_or_else(|| "-".into());
                s.push_str(&format!("  m={m:<4} N={:<8} mean={:<12.6} ratio={:.6}\n", p.n, p.mean_disc, p.ratio));
            }
            s.push_str(&format!(
                "  min {:.6} max {:.6} spread {:.4} (threshold {}): {}\n",
                g.min,
                g.max,
                g.spread,
                rep.threshold,
                if g.pass { "PASS" } else { "FAIL" }
            ));
        }
        s
    })?;
    Ok(if rep.pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_khdemo(ctx: &Ctx, a: KhArgs) -> Result<Outcome> {
    let p = match &a.input {
        Some(path) => load_point_set(path)?,
        None => generate(&StratifiedSpec::full_grid(a.m, a.d)?, ctx.seed)?,
    };
    let rep = kh_demo(&p)?;
    ctx.emit("khdemo", &rep, || {
        format!(
            "d = {}, N = {}\nintegration error {:.6e}\nD*/N = {:.6e} ({:?}), V_HK = {}\nbound {:.6e}: {}\n",
            rep.d,
            rep.n,
            rep.error,
            rep.disc_normalized,
            rep.disc_kind,
            rep.variation,
            rep.bound,
            if rep.holds { "PASS" } else { "FAIL" }
        )
    })?;
    Ok(if rep.holds { Outcome::Pass } else { Outcome::Fail })
}
