//! `fnef`: command-line front end for the F-nef verifications.
//!
//! Exit codes: 0 verified, 1 verification failed or inconclusive, 2 bad input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use fnef::biplane::{automorphism_group_order, build_biplane_qr, verify_biplane, Biplane, DesignReport};
use fnef::curves::{build_cp, pair_divisor_fcurve, pair_divisor_functional, CurveFunctional};
use fnef::fcone::{
    certify_not_boundary, extremality_rank, fnef_check, projection_formula_mismatches,
    sample_fcurves, verify_counterexample, verify_decomposition, CounterexampleReport, DecompositionReport,
    ExtremalityReport, FNefReport, NonBoundaryCertificate, Verdict, DEFAULT_PRIMES,
};
use fnef::formats::{format_divisor_json, format_divisor_text, parse_biplane, parse_divisor, parse_functional_json, DivisorJson};
use fnef::picard::{build_d0, build_dp, build_dp_prime, canonical_k, eliminate_psi, pullback_forgetful, reduce_canonical, DivisorClass};
use fnef::setcore::{count_fcurves, enumerate_fcurves, FCurve, SubsetMask};

#[derive(Parser)]
#[command(name = "fnef", version, about = "Verify the biplane F-nef divisor on M_{0,12}")]
struct Cli {
    /// Emit a JSON report (with run manifest) instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for scan phases.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Biplane file: eleven lines of five points in 1..=11.
    #[arg(long, global = true, value_name = "FILE")]
    biplane: Option<PathBuf>,
    /// Divisor file, JSON or `<coeff> <subset>` lines.
    #[arg(long, global = true, value_name = "FILE")]
    divisor: Option<PathBuf>,
    /// Number of markings for text divisor files and curve listings.
    #[arg(long, global = true, default_value_t = 12)]
    n: usize,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or load a biplane, check the axioms, count automorphisms.
    Biplane(BiplaneArgs),
    /// Check F-nefness, the C_P certificate and the D_0 - D'_P decomposition.
    Verify,
    /// Count or list F-curves.
    Fcurves {
        #[command(subcommand)]
        action: FcurvesAction,
    },
    /// Intersect a divisor with an F-curve or a curve functional.
    Pair(PairArgs),
    /// Certify that a divisor spans an extremal ray of the F-nef cone.
    Extremal {
        /// Prime for the modular rank; repeatable.
        #[arg(long = "prime", value_name = "P")]
        primes: Vec<u64>,
    },
    /// Pull a divisor back along the map forgetting the last marking.
    Pullback(PullbackArgs),
}

#[derive(Args)]
struct BiplaneArgs {
    /// Use the quadratic-residue construction (the default without --file).
    #[arg(long, conflicts_with = "file")]
    default: bool,
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Skip the axiom check.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Subcommand)]
enum FcurvesAction {
    Count,
    /// One curve per line in enumeration order.
    Enumerate {
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Named {
    Dp,
    D0,
    Dpprime,
    K,
}

#[derive(Args)]
struct PairArgs {
    /// Named divisor, used when no --divisor file is given.
    #[arg(long, value_enum, default_value = "dp")]
    named: Named,
    /// F-curve such as `1,2|3|4,5|6,...`.
    #[arg(long, conflicts_with = "functional")]
    curve: Option<String>,
    /// `cp` or a functional JSON file; default `cp`.
    #[arg(long)]
    functional: Option<String>,
}

#[derive(Args)]
struct PullbackArgs {
    /// Pull back D_P (the default without --divisor).
    #[arg(long)]
    dp: bool,
    /// Run the F-nef scan on the pulled-back class.
    #[arg(long)]
    scan: bool,
    /// Write the pulled-back divisor as JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Check the projection formula on this many random curves at n+1.
    #[arg(long, value_name = "COUNT")]
    spot_check: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Phase {
    name: &'static str,
    seconds: f64,
}

#[derive(Serialize)]
struct RunManifest {
    command_line: Vec<String>,
    inputs: Vec<InputDigest>,
    library_version: &'static str,
    primes: Vec<u64>,
    phases: Vec<Phase>,
}

impl RunManifest {
    fn new() -> Self {
        RunManifest {
            command_line: std::env::args().collect(),
            inputs: Vec::new(),
            library_version: fnef::VERSION,
            primes: Vec::new(),
            phases: Vec::new(),
        }
    }

    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn phase<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.phases.push(Phase { name, seconds: t.elapsed().as_secs_f64() });
        out
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    #[serde(flatten)]
    body: T,
    manifest: RunManifest,
}

struct Ctx {
    json: bool,
    n: usize,
    biplane: Option<PathBuf>,
    divisor: Option<PathBuf>,
    manifest: RunManifest,
}

impl Ctx {
    fn emit<T: Serialize>(self, command: &'static str, body: T, text: impl FnOnce(&T) -> String) -> anyhow::Result<()> {
        let out = if self.json {
            let r = Report { command, body, manifest: self.manifest };
            serde_json::to_string_pretty(&r)? + "\n"
        } else {
            text(&body)
        };
        match std::io::stdout().lock().write_all(out.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        }
    }

    /// The biplane from `path` or --biplane, else the QR construction. Shape
    /// errors come back as malformed input; axiom failures are left to the caller.
    fn load_biplane(&mut self, path: Option<PathBuf>) -> anyhow::Result<Biplane> {
        match path.or_else(|| self.biplane.clone()) {
            Some(p) => {
                let text = self.manifest.read(&p)?;
                Ok(parse_biplane(&text, false)?)
            }
            None => Ok(build_biplane_qr()),
        }
    }

    fn load_divisor(&mut self) -> anyhow::Result<Option<DivisorClass>> {
        let Some(p) = self.divisor.clone() else { return Ok(None) };
        let text = self.manifest.read(&p)?;
        Ok(Some(parse_divisor(&text, self.n)?))
    }

    fn divisor_or_dp(&mut self) -> anyhow::Result<DivisorClass> {
        match self.load_divisor()? {
            Some(d) => Ok(d),
            None => {
                let b = self.load_biplane(None)?;
                verify_biplane(&b)?;
                Ok(build_dp(&b)?)
            }
        }
    }
}

#[derive(Serialize)]
struct BiplaneBody {
    blocks: Vec<SubsetMask>,
    design: Option<DesignReport>,
    automorphism_order: u64,
}

fn cmd_biplane(mut ctx: Ctx, args: BiplaneArgs) -> anyhow::Result<bool> {
    let b = ctx.load_biplane(args.file)?;
    let design = if args.no_verify { None } else { Some(verify_biplane(&b)?) };
    let order = ctx.manifest.phase("automorphisms", || automorphism_group_order(&b));
    let body = BiplaneBody { blocks: b.blocks().to_vec(), design, automorphism_order: order };
    ctx.emit("biplane", body, |b| {
        let mut s = String::new();
        for blk in &b.blocks {
            s += &format!("{{{blk}}}\n");
        }
        if let Some(d) = &b.design {
            s += &format!(
                "pairs covered {} times, blocks meet in 2 points: {}, points on {} blocks\n",
                d.pair_replication, d.block_intersections_ok, d.point_replication
            );
        }
        s += &format!("automorphism group order {}\n", b.automorphism_order);
        s
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyBody {
    counterexample: CounterexampleReport,
    certificate: NonBoundaryCertificate,
    decomposition: DecompositionReport,
    verdict: bool,
}

fn cmd_verify(mut ctx: Ctx) -> anyhow::Result<bool> {
    let b = ctx.load_biplane(None)?;
    let counterexample = ctx.manifest.phase("counterexample", || verify_counterexample(&b))?;
    let certificate = ctx.manifest.phase("certificate", || -> fnef::Result<_> {
        certify_not_boundary(&build_dp(&b)?, &build_cp(&b)?)
    })?;
    let decomposition = ctx.manifest.phase("decomposition", || verify_decomposition(&b))?;
    let verdict = counterexample.verdict
        && certificate.not_boundary == Verdict::Certified
        && certificate.not_k_plus_boundary == Verdict::Certified
        && decomposition.reduced_equal
        && decomposition.pairing_mismatches == 0;
    ctx.emit("verify", VerifyBody { counterexample, certificate, decomposition, verdict }, |v| {
        let a = &v.counterexample.a_fnef;
        format!(
            "F-curves scanned: {}\nmin D_P.C: {} at {} ({} zeros)\nC_P boundary min: {}\nK.C_P: {}\nD_P.C_P: {}\n\
             not a boundary sum: {:?}\nnot K + boundary: {:?}\nD_P = D_0 - D'_P: {} ({} pairing mismatches)\nverdict: {}\n",
            a.curves_scanned,
            a.min_value,
            a.argmin,
            a.zero_count,
            v.counterexample.b_boundary_min,
            v.counterexample.c_k_pairing,
            v.counterexample.d_dp_pairing,
            v.certificate.not_boundary,
            v.certificate.not_k_plus_boundary,
            v.decomposition.reduced_equal,
            v.decomposition.pairing_mismatches,
            v.verdict
        )
    })?;
    Ok(verdict)
}

#[derive(Serialize)]
struct FcurvesBody {
    n: usize,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    curves: Option<Vec<FCurve>>,
}

fn cmd_fcurves(ctx: Ctx, action: FcurvesAction) -> anyhow::Result<bool> {
    let n = ctx.n;
    let count = count_fcurves(n)?;
    let curves = match action {
        FcurvesAction::Count => None,
        FcurvesAction::Enumerate { limit } => {
            Some(enumerate_fcurves(n)?.take(limit.unwrap_or(usize::MAX)).collect())
        }
    };
    ctx.emit("fcurves", FcurvesBody { n, count, curves }, |b| match &b.curves {
        None => format!("{}\n", b.count),
        Some(cs) => cs.iter().map(|c| format!("{c}\n")).collect(),
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct PairBody {
    n: usize,
    target: String,
    value: i64,
}

fn cmd_pair(mut ctx: Ctx, args: PairArgs) -> anyhow::Result<bool> {
    let d = match ctx.load_divisor()? {
        Some(d) => d,
        None => {
            let b = ctx.load_biplane(None)?;
            match args.named {
                Named::Dp => build_dp(&b)?,
                Named::D0 => build_d0(12)?,
                Named::Dpprime => build_dp_prime(&b)?,
                Named::K => canonical_k(12)?,
            }
        }
    };
    let n = d.n();
    let (target, value) = if let Some(text) = &args.curve {
        let blocks: Vec<SubsetMask> =
            text.split('|').map(str::parse).collect::<fnef::Result<_>>()?;
        let Ok(blocks) = <[SubsetMask; 4]>::try_from(blocks) else {
            bail!(fnef::Error::InvalidInput(format!("{text:?} does not have four blocks")));
        };
        let c = FCurve::new(blocks, n)?;
        (c.to_string(), pair_divisor_fcurve(&d, &c)?)
    } else {
        let source = args.functional.as_deref().unwrap_or("cp");
        let f: CurveFunctional = if source == "cp" {
            let b = ctx.load_biplane(None)?;
            verify_biplane(&b)?;
            build_cp(&b)?
        } else {
            parse_functional_json(&ctx.manifest.read(Path::new(source))?)?
        };
        (source.to_string(), pair_divisor_functional(&d, &f)?)
    };
    ctx.emit("pair", PairBody { n, target, value }, |p| format!("{}\n", p.value))?;
    Ok(true)
}

fn cmd_extremal(mut ctx: Ctx, primes: Vec<u64>) -> anyhow::Result<bool> {
    let primes = if primes.is_empty() { DEFAULT_PRIMES.to_vec() } else { primes };
    for &p in &primes {
        if p < 1 << 20 {
            eprintln!("warning: prime {p} is small; a rank drop mod p is more likely, though a full-rank result still certifies");
        }
    }
    ctx.manifest.primes = primes.clone();
    let d = ctx.divisor_or_dp()?;
    let rep: ExtremalityReport = ctx.manifest.phase("rank", || extremality_rank(&d, &primes))?;
    let ok = rep.certified_extremal;
    ctx.emit("extremal", rep, |r| {
        let mut s = format!("F-curves pairing to zero: {}\n", r.zero_set_size);
        for pr in &r.rank_mod_p {
            s += &format!("rank mod {}: {} of {}\n", pr.prime, pr.rank, r.ambient_dim);
        }
        s += &format!("extremal: {}\n", if r.certified_extremal { "certified" } else { "inconclusive" });
        s
    })?;
    Ok(ok)
}

#[derive(Serialize)]
struct SpotCheck {
    samples: usize,
    seed: u64,
    mismatches: u64,
}

#[derive(Serialize)]
struct PullbackBody {
    n_from: usize,
    n_to: usize,
    psi_eliminated: bool,
    support: usize,
    /// Zero in the Picard group, not merely as a formal sum.
    zero_class: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan: Option<FNefReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spot_check: Option<SpotCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    divisor: Option<DivisorJson>,
}

fn cmd_pullback(mut ctx: Ctx, args: PullbackArgs) -> anyhow::Result<bool> {
    if args.dp && ctx.divisor.is_some() {
        bail!(fnef::Error::InvalidInput("--dp and --divisor are exclusive".into()));
    }
    let d = ctx.divisor_or_dp()?;
    let psi_eliminated = !d.is_boundary_only();
    let boundary = if psi_eliminated { eliminate_psi(&d)? } else { d.clone() };
    let up = ctx.manifest.phase("pullback", || pullback_forgetful(&boundary))?;
    let scan = args.scan.then(|| ctx.manifest.phase("scan", || fnef_check(&up)));
    let spot_check = match args.spot_check {
        None => None,
        Some(samples) => {
            let curves = sample_fcurves(up.n(), samples, args.seed)?;
            let mismatches = ctx.manifest.phase("spot_check", || projection_formula_mismatches(&boundary, curves))?;
            Some(SpotCheck { samples, seed: args.seed, mismatches })
        }
    };
    let zero_class = ctx.manifest.phase("reduce", || reduce_canonical(&up))?.is_zero();
    if let Some(out) = &args.out {
        fs::write(out, format_divisor_json(&up)).with_context(|| format!("writing {}", out.display()))?;
    }
    let ok = scan.as_ref().map_or(true, |s| s.nonnegative)
        && spot_check.as_ref().map_or(true, |s| s.mismatches == 0);
    let body = PullbackBody {
        n_from: d.n(),
        n_to: up.n(),
        psi_eliminated,
        support: up.support_len(),
        zero_class,
        scan,
        spot_check,
        divisor: args.out.is_none().then(|| DivisorJson::from(&up)),
    };
    ctx.emit("pullback", body, |b| {
        let mut s = format!("pulled back from n = {} to n = {}; {} terms\n", b.n_from, b.n_to, b.support);
        if b.zero_class {
            s += "class is zero\n";
        }
        if let Some(r) = &b.scan {
            s += &format!(
                "F-nef scan over {} curves: min {} at {} ({} zeros)\n",
                r.curves_scanned, r.min_value, r.argmin, r.zero_count
            );
        }
        if let Some(c) = &b.spot_check {
            s += &format!("projection formula: {} mismatches on {} samples\n", c.mismatches, c.samples);
        }
        if b.divisor.is_some() {
            s += &format_divisor_text(&up);
        }
        s
    })?;
    Ok(ok)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!(fnef::Error::InvalidInput("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let ctx = Ctx {
        json: cli.json,
        n: cli.n,
        biplane: cli.biplane,
        divisor: cli.divisor,
        manifest: RunManifest::new(),
    };
    match cli.cmd {
        Command::Biplane(a) => cmd_biplane(ctx, a),
        Command::Verify => cmd_verify(ctx),
        Command::Fcurves { action } => cmd_fcurves(ctx, action),
        Command::Pair(a) => cmd_pair(ctx, a),
        Command::Extremal { primes } => cmd_extremal(ctx, primes),
        Command::Pullback(a) => cmd_pullback(ctx, a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<fnef::Error>() {
        Some(fnef::Error::DesignViolation { .. } | fnef::Error::NotFNef { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
