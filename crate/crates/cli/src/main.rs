use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tilechaos::codec::{error_profile, receive, receive_lossy, transmit, ChannelMode, MixingCodec};
use tilechaos::diagnostics::{diagnose, DiagnoseConfig};
use tilechaos::io::{
    frames_from_text, frames_to_text, group_from_json, key_from_json, key_to_json, parse_int_list, parse_int_matrix,
    parse_rational_list, profile_csv, trajectory_csv,
};
use tilechaos::ops::{generate_key, render_proof, seeded_bytes, seeded_state, KeygenRequest, ThatSource};
use tilechaos::scalar::to_scalars;
use tilechaos::{builtin_group, AffineSystem, Error, GroupSpec, ObserverKey, Rational};

#[derive(Parser)]
#[command(name = "tilechaos", version, about = "Chaotic maps on tiling quotients and dead-beat observer masking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an observer key from T̂ and the coefficients of the characteristic polynomial
    Keygen(KeygenArgs),
    /// Chaos report for a key or an (A, B, group) system, as JSON
    Diagnose(DiagnoseArgs),
    /// Trajectory CSV, or the per-step error profile of a masked run
    Simulate(SimulateArgs),
    /// Mask a byte file into channel frames
    Mask(MaskArgs),
    /// Recover the byte file from channel frames
    Unmask(UnmaskArgs),
}

#[derive(Args)]
struct GroupArgs {
    /// Built-in group: torus(n), tent, triangle-rot, sym1, sym2, klein
    #[arg(long, conflicts_with = "group_file")]
    group: Option<String>,
    /// Group spec JSON
    #[arg(long)]
    group_file: Option<PathBuf>,
}

#[derive(Args)]
struct KeySource {
    /// Key JSON written by `keygen`
    #[arg(long, conflicts_with = "reference")]
    key: Option<PathBuf>,
    /// The built-in three-dimensional reference key
    #[arg(long = "reference-key", alias = "paper-3-3")]
    reference: bool,
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    source: KeygenSource,
    #[arg(long)]
    n: Option<usize>,
    /// `random`, or rows of T̂ such as `1,2;0,1`
    #[arg(long, default_value = "random")]
    that: String,
    /// Entry bound for a random T̂
    #[arg(long, default_value_t = 2)]
    that_bound: i128,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Offset B, comma separated rationals
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[command(flatten)]
    group: GroupArgs,
    /// Key JSON destination; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct KeygenSource {
    /// alpha_1..alpha_n with chi(x) = x^n + alpha_1 x^(n-1) + ... + alpha_n
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    #[arg(long = "reference-key", alias = "paper-3-3")]
    reference: bool,
}

#[derive(Args)]
struct SystemArgs {
    #[command(flatten)]
    key: KeySource,
    /// Rows of A, e.g. `2,1;1,1`
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["key", "reference"])]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    b: Option<String>,
    #[command(flatten)]
    group: GroupArgs,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value = "2,3,5,7")]
    primes: String,
    #[arg(long, default_value_t = tilechaos::diagnostics::DEFAULT_POINT_BUDGET)]
    budget: u128,
    /// Trajectory length for the empirical statistics
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weyl probes with every |p_i| up to this radius
    #[arg(long, default_value_t = 2)]
    probe_radius: i64,
    /// Output row for the scalar Weyl sums; the key's C by default
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    Exact,
    Float,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Steps after x0
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Starting state; a seeded random point of the domain when absent
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Precision::Exact)]
    precision: Precision,
    /// Decimals in float CSV output
    #[arg(long, default_value_t = 17)]
    decimals: usize,
    /// Columns k, e_k, u_k - û_k of a masked run instead of the trajectory
    #[arg(long)]
    error_profile: bool,
    /// Payload for the error profile; `--steps` seeded random bytes when absent
    #[arg(long)]
    input: Option<PathBuf>,
    /// Observer start for the error profile; ϖ(0) when absent
    #[arg(long, allow_hyphen_values = true)]
    xhat0: Option<String>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaskArgs {
    #[command(flatten)]
    key: KeySource,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Send ⌊Y·10^q⌋; exact values when absent
    #[arg(long)]
    q: Option<u32>,
    /// Codec weights w; all zero when absent
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct UnmaskArgs {
    #[command(flatten)]
    key: KeySource,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xhat0: Option<String>,
    /// Coast through missing frames and report the damaged byte positions
    #[arg(long)]
    lossy: bool,
}

enum Failure {
    Invalid(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.into(), e))
}

fn read_bytes(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Io(path.into(), e))
}

fn write_out(path: Option<&Path>, data: &[u8]) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, data).map_err(|e| Failure::Io(p.into(), e)),
        None => io::stdout().write_all(data).map_err(|e| Failure::Io("<stdout>".into(), e)),
    }
}

fn load_group(args: &GroupArgs, default_dim: Option<usize>) -> Outcome<GroupSpec> {
    if let Some(path) = &args.group_file {
        return Ok(group_from_json(&read_text(path)?)?);
    }
    match (&args.group, default_dim) {
        (Some(name), _) => Ok(builtin_group(name)?),
        (None, Some(n)) => Ok(GroupSpec::torus(n)),
        (None, None) => Err(Error::InvalidArgument("--group or --group-file is required".into()).into()),
    }
}

fn load_key(src: &KeySource) -> Outcome<ObserverKey> {
    match &src.key {
        Some(path) => Ok(key_from_json(&read_text(path)?)?),
        None if src.reference => Ok(ObserverKey::reference()),
        None => Err(Error::InvalidArgument("--key or --reference-key is required".into()).into()),
    }
}

/// The system plus the key it came from, if any.
fn load_system(args: &SystemArgs) -> Outcome<(AffineSystem, Option<ObserverKey>)> {
    match &args.a {
        Some(a) => {
            let a = parse_int_matrix(a)?;
            let group = load_group(&args.group, Some(a.dim()))?;
            let b = match &args.b {
                Some(b) => parse_rational_list(b)?,
                None => vec![Rational::default(); a.dim()],
            };
            Ok((AffineSystem::new(a, b, group)?, None))
        }
        None => {
            let key = load_key(&args.key)?;
            Ok((key.system(), Some(key)))
        }
    }
}

fn codec_for(w: Option<&str>, n: usize) -> Outcome<MixingCodec> {
    Ok(match w {
        Some(w) => MixingCodec::new(parse_int_list(w)?),
        None => MixingCodec::plain(n),
    })
}

fn start_state(given: Option<&str>, group: &GroupSpec, seed: u64) -> Outcome<Vec<Rational>> {
    match given {
        Some(s) => Ok(parse_rational_list(s)?),
        None => Ok(seeded_state(group, seed)?),
    }
}

fn observer_start(given: Option<&str>, key: &ObserverKey) -> Outcome<Vec<Rational>> {
    match given {
        Some(s) => Ok(parse_rational_list(s)?),
        None => Ok(tilechaos::codec::default_estimate(key)?),
    }
}

fn channel_mode(q: Option<u32>) -> ChannelMode {
    q.map_or(ChannelMode::Exact, ChannelMode::Digits)
}

fn cmd_keygen(args: KeygenArgs) -> Outcome<()> {
    let key = if args.source.reference {
        ObserverKey::reference()
    } else {
        let alphas = parse_int_list(args.source.alphas.as_deref().unwrap_or_default())?;
        let that = match args.that.as_str() {
            "random" => ThatSource::Random { bound: args.that_bound },
            rows => ThatSource::Given(parse_int_matrix(rows)?),
        };
        generate_key(KeygenRequest {
            n: args.n,
            that,
            seed: args.seed,
            b: args.b.as_deref().map(parse_rational_list).transpose()?,
            group: load_group(&args.group, Some(alphas.len()))?,
            alphas,
        })?
    };
    let proof = render_proof(&key, &key.proof()?);
    let json = key_to_json(&key) + "\n";
    match &args.out {
        Some(path) => {
            write_out(Some(path), json.as_bytes())?;
            write_out(None, proof.as_bytes())
        }
        None => {
            eprint!("{proof}");
            write_out(None, json.as_bytes())
        }
    }
}

fn cmd_diagnose(args: DiagnoseArgs) -> Outcome<()> {
    let (sys, key) = load_system(&args.system)?;
    let output_c = match &args.c {
        Some(c) => Some(parse_int_list(c)?),
        None => key.map(|k| k.c().to_vec()),
    };
    let primes = parse_int_list(&args.primes)?
        .into_iter()
        .map(|p| u64::try_from(p).map_err(|_| Error::InvalidArgument(format!("bad prime {p}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = DiagnoseConfig {
        primes,
        budget: args.budget,
        steps: args.steps,
        seed: args.seed,
        probe_radius: args.probe_radius,
        output_c,
        jobs: args.jobs,
        ..DiagnoseConfig::default()
    };
    let report = diagnose(&sys, &cfg)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_out(args.out.as_deref(), json.as_bytes())
}

fn cmd_simulate(args: SimulateArgs) -> Outcome<()> {
    let (sys, key) = load_system(&args.system)?;
    let x0 = start_state(args.x0.as_deref(), sys.group(), args.seed)?;
    let csv = if args.error_profile {
        let key = key.ok_or_else(|| Error::InvalidArgument("--error-profile needs --key or --reference-key".into()))?;
        let payload = match &args.input {
            Some(p) => read_bytes(p)?,
            None => seeded_bytes(args.steps, args.seed),
        };
        let codec = codec_for(args.w.as_deref(), key.n())?;
        let xhat0 = observer_start(args.xhat0.as_deref(), &key)?;
        let mode = channel_mode(args.q);
        let rows = match args.precision {
            Precision::Exact => error_profile(&key, &codec, &payload, &x0, &xhat0, mode)?,
            Precision::Float => {
                error_profile(&key, &codec, &payload, &to_scalars::<f64>(&x0), &to_scalars::<f64>(&xhat0), mode)?
            }
        };
        profile_csv(&rows)
    } else {
        match args.precision {
            Precision::Exact => trajectory_csv(&sys.trajectory(&x0, args.steps + 1)?, args.decimals),
            Precision::Float => trajectory_csv(&sys.trajectory(&to_scalars::<f64>(&x0), args.steps + 1)?, args.decimals),
        }
    };
    write_out(args.out.as_deref(), csv.as_bytes())
}

fn cmd_mask(args: MaskArgs) -> Outcome<()> {
    let key = load_key(&args.key)?;
    let payload = read_bytes(&args.input)?;
    let codec = codec_for(args.w.as_deref(), key.n())?;
    let x0 = start_state(args.x0.as_deref(), key.group(), args.seed)?;
    let frames = transmit(&key, &codec, &payload, &x0, channel_mode(args.q))?;
    write_out(Some(&args.output), frames_to_text(&frames).as_bytes())
}

fn cmd_unmask(args: UnmaskArgs) -> Outcome<()> {
    let key = load_key(&args.key)?;
    let frames = frames_from_text(&read_text(&args.input)?)?;
    let codec = codec_for(args.w.as_deref(), key.n())?;
    let xhat0 = observer_start(args.xhat0.as_deref(), &key)?;
    let payload = if args.lossy {
        let rec = receive_lossy(&key, &codec, &frames, &xhat0)?;
        if !rec.lost.is_empty() {
            eprintln!("damaged byte positions: {:?}", rec.lost);
        }
        rec.payload
    } else {
        receive(&key, &codec, &frames, &xhat0)?
    };
    write_out(Some(&args.output), &payload)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen(a) => cmd_keygen(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Mask(a) => cmd_mask(a),
        Command::Unmask(a) => cmd_unmask(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(3)
        }
    }
}
