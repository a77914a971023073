mod output;

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use endoscopylab::acceptance::{self, DEFAULT_SEED};
use endoscopylab::bounds::{derive_exponent, random_packet, CoefficientTable};
use endoscopylab::cohomology::{degree_r, packet_of, poincare_poly, Bipartition, OrderedPartition};
use endoscopylab::decay::{profile_of_bipartition, sx_check};
use endoscopylab::endoscopy::{bijection, dominant_group, elliptic_data, iota};
use endoscopylab::hyperendoscopy::{
    chain_iota, count_chains, dominant_chains, dominant_contribution, enumerate_chains_with_guard, expand_stable,
    AssignedGroup, HyperChain, CHAIN_GUARD,
};
use endoscopylab::params::{centralizer_group, is_elliptic, ArthurShape};
use endoscopylab::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use output::{Format, Report, Table};

const GUARD_VAR: &str = "ENDOSCOPYLAB_GUARD";

#[derive(Parser)]
#[command(name = "endoscopylab", version, about = "Arthur parameters, endoscopy and cohomological packets for U(N)")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,

    /// Seed for every randomized command.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Elliptic endoscopic data of U(N), or the s ↦ (H, ψ^H) table of a shape.
    Endoscopy {
        #[arg(long = "N")]
        n: u32,
        /// Shape as a JSON file, inline JSON, or "-" for stdin.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Hyperendoscopic chains of U(N) for a shape, with their expansion.
    Chains {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        shape: String,
        /// Only the chains of the dominant group H_ψ.
        #[arg(long)]
        dominant: bool,
    },
    /// Members of the cohomological packet of U(a, b) attached to P.
    Packet {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        /// Ordered partition of a + b, e.g. "2,1,1".
        #[arg(long = "P")]
        p: String,
    },
    /// Poincaré polynomial of a bipartition, e.g. '[[1,1],[1,0]]'.
    Poincare {
        #[arg(long)]
        bipartition: String,
    },
    /// Ratio profile and p-bound of a bipartition with one mixed pair.
    Decay {
        #[arg(long)]
        bipartition: String,
    },
    /// Compare N(N − 2k) with the Sarnak–Xue exponent.
    Sx {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Step-by-step derivation of the growth exponent for U(a, N − a).
    Derive {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        k: u32,
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,
    },
    /// Test I_disc ≤ C(ψ) S(ψ, s_ψ) on random packets over a shape.
    Dominance {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Run the acceptance suite.
    Selftest,
}

/// Failures split by exit code: 2 for bad input, 1 for exceeded guards and
/// failed checks.
enum Failure {
    Usage(String),
    Guard(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::GuardExceeded { .. } => Failure::Guard(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn guard() -> std::result::Result<u64, Failure> {
    match std::env::var(GUARD_VAR) {
        Ok(text) => match text.trim().parse::<u64>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Failure::Usage(format!("{GUARD_VAR} must be a positive integer, got {text:?}"))),
        },
        Err(_) => Ok(CHAIN_GUARD),
    }
}

fn check_guard(size: u128, cap: u64) -> std::result::Result<(), Failure> {
    if size > u128::from(cap) {
        let size = u64::try_from(size).unwrap_or(u64::MAX);
        return Err(Error::GuardExceeded { size, cap }.into());
    }
    Ok(())
}

fn read_source(source: &str) -> std::result::Result<String, Failure> {
    let trimmed = source.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(source.to_string());
    }
    if source == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        return Ok(text);
    }
    fs::read_to_string(source).map_err(|e| Failure::Usage(format!("reading {source}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(source: &str, what: &str) -> std::result::Result<T, Failure> {
    let text = read_source(source)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid {what}: {e}")))
}

fn load_shape(source: &str, n: Option<u32>) -> std::result::Result<ArthurShape, Failure> {
    let shape: ArthurShape = parse_json(source, "shape")?;
    if shape.is_empty() {
        return Err(Failure::Usage("shape has no summands".into()));
    }
    if let Some(n) = n {
        if shape.rank() != n {
            return Err(Failure::Usage(format!("shape has rank {} but N = {n}", shape.rank())));
        }
    }
    if !is_elliptic(&shape) {
        return Err(Error::NotElliptic(shape.to_string()).into());
    }
    Ok(shape)
}

fn endoscopy(n: u32, shape: Option<String>, guard: u64) -> Outcome {
    if n == 0 {
        return Err(Failure::Usage("N must be positive".into()));
    }
    let Some(source) = shape else {
        let data = elliptic_data(n);
        let mut table = Table::new(format!("elliptic endoscopic data of U({n})"), &["n1", "n2", "kappa", "iota", "proper"]);
        let mut rows = Vec::new();
        for d in &data {
            let (k1, k2) = d.kappa();
            table.push(vec![
                d.n1().to_string(),
                d.n2().to_string(),
                format!("({k1},{k2})"),
                iota(d).to_string(),
                d.is_proper().to_string(),
            ]);
            rows.push(json!({"datum": d, "iota": iota(d).to_string()}));
        }
        return Ok(Report {
            command: "endoscopy",
            json: json!({"n": n, "data": rows}),
            tables: vec![table],
        });
    };
    let shape = load_shape(&source, Some(n))?;
    check_guard(1u128 << (shape.len() - 1), guard)?;
    let entries = bijection(&shape)?;
    let dominant = dominant_group(&shape)?;
    let mut table = Table::new(
        format!("S_psi for {shape}"),
        &["s", "n1", "n2", "kappa", "iota", "first", "second", "dominant"],
    );
    let mut rows = Vec::new();
    for e in &entries {
        let (k1, k2) = e.datum.kappa();
        let is_dominant = e.split == dominant.split;
        table.push(vec![
            e.element.to_string(),
            e.datum.n1().to_string(),
            e.datum.n2().to_string(),
            format!("({k1},{k2})"),
            iota(&e.datum).to_string(),
            e.split.first.to_string(),
            e.split.second.to_string(),
            is_dominant.to_string(),
        ]);
        rows.push(json!({
            "s": e.element,
            "datum": e.datum,
            "iota": iota(&e.datum).to_string(),
            "split": e.split,
            "dominant": is_dominant,
        }));
    }
    Ok(Report {
        command: "endoscopy",
        json: json!({
            "n": n,
            "shape": shape,
            "group_order": centralizer_group(&shape)?.order(),
            "entries": rows,
            "dominant": dominant,
        }),
        tables: vec![table],
    })
}

fn chain_row(i: usize, chain: &HyperChain, extra: endoscopylab::Rational) -> (Vec<String>, serde_json::Value) {
    let steps: Vec<String> = chain
        .steps
        .iter()
        .map(|s| format!("#{}: {} -> {}", s.factor, s.datum, s.split))
        .collect();
    let weight = chain_iota(chain) * extra;
    let row = vec![
        i.to_string(),
        chain.depth().to_string(),
        weight.to_string(),
        chain.terminal_symbol().to_string(),
        steps.join("; "),
    ];
    let value = json!({
        "depth": chain.depth(),
        "iota": weight.to_string(),
        "start": chain.start,
        "steps": chain.steps,
        "terminal": chain.terminal.to_string(),
        "terminal_group": chain.terminal_symbol(),
    });
    (row, value)
}

fn chains(n: u32, source: &str, dominant: bool, guard: u64) -> Outcome {
    let shape = load_shape(source, Some(n))?;
    let (list, expansion, extra, group) = if dominant {
        let dom = dominant_group(&shape)?;
        let group = if dom.is_whole_group() {
            AssignedGroup::single(&shape)?
        } else {
            AssignedGroup::new(vec![dom.split.first.clone(), dom.split.second.clone()])?
        };
        check_guard(count_chains(&group), guard)?;
        let extra = iota(&dom.datum);
        (dominant_chains(&shape)?, dominant_contribution(&shape)?, extra, group)
    } else {
        let group = AssignedGroup::single(&shape)?;
        let list = enumerate_chains_with_guard(&group, guard)?;
        let expansion = expand_stable(&group);
        (list, expansion, endoscopylab::exact::integer(1), group)
    };
    let mut table = Table::new(
        format!("chains from {} for {shape}", group.symbol()),
        &["#", "depth", "iota", "terminal", "steps"],
    );
    let mut rows = Vec::new();
    for (i, chain) in list.iter().enumerate() {
        let (row, value) = chain_row(i, chain, extra);
        table.push(row);
        rows.push(value);
    }
    let mut terms = Table::new("expansion", &["coefficient", "group", "term"]);
    for (term, c) in expansion.iter() {
        terms.push(vec![c.to_string(), term.symbol().to_string(), term.to_string()]);
    }
    Ok(Report {
        command: "chains",
        json: json!({
            "n": n,
            "shape": shape,
            "dominant": dominant,
            "start": group.symbol(),
            "count": list.len(),
            "chains": rows,
            "expansion": expansion,
        }),
        tables: vec![table, terms],
    })
}

fn packet(a: u32, b: u32, p: &str, guard: u64) -> Outcome {
    let partition = OrderedPartition::parse(p)?;
    // Each part of size Nᵢ admits at most Nᵢ + 1 splittings.
    let bound: u128 = partition.parts().iter().map(|&x| u128::from(x) + 1).product();
    check_guard(bound, guard)?;
    let members = packet_of(&partition, a, b)?;
    let mut table = Table::new(
        format!("packet of U({a},{b}) for P = {partition}"),
        &["bipartition", "R", "poincare", "duplicate_of"],
    );
    let mut rows = Vec::new();
    for m in &members {
        let poly = poincare_poly(&m.bipartition)?;
        let dup = m.duplicate_of.as_ref().map(|d| d.to_string()).unwrap_or_default();
        table.push(vec![
            m.bipartition.to_string(),
            degree_r(&m.bipartition).to_string(),
            poly.to_string(),
            dup,
        ]);
        rows.push(json!({
            "bipartition": m.bipartition,
            "R": degree_r(&m.bipartition),
            "poincare": poly,
            "poincare_text": poly.to_string(),
            "duplicate_of": m.duplicate_of,
        }));
    }
    Ok(Report {
        command: "packet",
        json: json!({"a": a, "b": b, "P": partition, "size": members.len(), "members": rows}),
        tables: vec![table],
    })
}

fn poincare(source: &str) -> Outcome {
    let bip: Bipartition = parse_json(source, "bipartition")?;
    let poly = poincare_poly(&bip)?;
    let mut table = Table::new("", &["bipartition", "a", "b", "R", "poincare", "euler"]);
    table.push(vec![
        bip.to_string(),
        bip.a().to_string(),
        bip.b().to_string(),
        degree_r(&bip).to_string(),
        poly.to_string(),
        poly.eval_at_one().to_string(),
    ]);
    Ok(Report {
        command: "poincare",
        json: json!({
            "bipartition": bip,
            "a": bip.a(),
            "b": bip.b(),
            "R": degree_r(&bip),
            "poincare": poly,
            "poincare_text": poly.to_string(),
            "euler": poly.eval_at_one().to_string(),
        }),
        tables: vec![table],
    })
}

fn decay(source: &str) -> Outcome {
    let bip: Bipartition = parse_json(source, "bipartition")?;
    let profile = profile_of_bipartition(&bip)?;
    let mut table = Table::new(
        format!("N = {}, N_k = {}, c = {}, c_k = {}", profile.n, profile.n_k, profile.c, profile.c_k),
        &["j", "ratio"],
    );
    for (j, r) in profile.ratios.iter().enumerate() {
        table.push(vec![(j + 1).to_string(), r.to_string()]);
    }
    let mut summary = Table::new("", &["max_ratio", "p_bound"]);
    summary.push(vec![profile.max_ratio().to_string(), profile.p_bound.to_string()]);
    Ok(Report {
        command: "decay",
        json: json!({"bipartition": bip, "profile": profile, "max_ratio": profile.max_ratio().to_string()}),
        tables: vec![table, summary],
    })
}

fn sx(n: u32, k: u32) -> Outcome {
    let check = sx_check(n, k)?;
    let mut table = Table::new("", &["N", "k", "theorem_exponent", "sx_exponent", "holds"]);
    table.push(vec![
        n.to_string(),
        k.to_string(),
        check.theorem_exponent.to_string(),
        check.sx_exponent.to_string(),
        check.holds.to_string(),
    ]);
    Ok(Report {
        command: "sx",
        json: serde_json::to_value(check).expect("plain data"),
        tables: vec![table],
    })
}

fn derive(n: u32, a: u32, k: u32) -> Outcome {
    let d = derive_exponent(n, a, k)?;
    let mut steps = Table::new(
        format!("U({a},{}) with P = ({}, 1^{k}), shape {}", d.b, n - k, d.shape),
        &["#", "value", "claim", "justification"],
    );
    for (i, s) in d.steps.iter().enumerate() {
        steps.push(vec![(i + 1).to_string(), s.value.to_string(), s.claim.clone(), s.justification.clone()]);
    }
    let mut chains = Table::new(
        format!(
            "terminal groups: dominant exponent {}, maximum {}, final {}",
            d.dominant_exponent, d.chain_maximum, d.final_exponent
        ),
        &["H1", "H2", "chains", "transfer", "savin", "characters", "total"],
    );
    for c in &d.chain_exponents {
        chains.push(vec![
            c.h1.to_string(),
            c.h2.to_string(),
            c.chains.to_string(),
            c.transfer.to_string(),
            c.savin.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
            c.character_count.to_string(),
            c.total.to_string(),
        ]);
    }
    Ok(Report {
        command: "derive",
        json: serde_json::to_value(&d).expect("plain data"),
        tables: vec![steps, chains],
    })
}

fn dominance(source: &str, trials: u64, seed: u64, guard: u64) -> Outcome {
    let shape = load_shape(source, None)?;
    check_guard(u128::from(trials), guard)?;
    let rank = centralizer_group(&shape)?.rank();
    let coefficients = CoefficientTable::new(&shape)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut worst: Option<endoscopylab::Rational> = None;
    for trial in 0..trials {
        let packet = random_packet(&mut rng, rank, 8);
        let d = coefficients.dominance(&packet)?;
        let bound = d.c_psi * d.s_dom;
        if !d.holds {
            violations.push(json!({"trial": trial, "packet": packet, "check": d}));
        }
        if bound > endoscopylab::exact::integer(0) {
            let ratio = d.i_disc / bound;
            worst = Some(worst.map_or(ratio, |w| w.max(ratio)));
        }
    }
    let mut table = Table::new(format!("dominance for {shape}"), &["trials", "violations", "max I/(C S)", "C(psi)", "seed"]);
    let worst_text = worst.map(|w| w.to_string()).unwrap_or_else(|| "-".into());
    table.push(vec![
        trials.to_string(),
        violations.len().to_string(),
        worst_text.clone(),
        coefficients.dominant().to_string(),
        seed.to_string(),
    ]);
    let report = Report {
        command: "dominance",
        json: json!({
            "shape": shape,
            "trials": trials,
            "seed": seed,
            "c_psi": coefficients.dominant().to_string(),
            "max_ratio": worst.map(|w| w.to_string()),
            "violations": violations,
        }),
        tables: vec![table],
    };
    Ok(report)
}

fn selftest(seed: u64) -> (Report, bool) {
    let reports = acceptance::run_all(seed);
    let passed = reports.iter().filter(|r| r.passed).count();
    let mut table = Table::new(
        format!("acceptance: {passed} passed, {} failed", reports.len() - passed),
        &["#", "status", "criterion", "cases", "seconds", "detail"],
    );
    let mut rows = Vec::new();
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let seconds = format!("{:.2}", r.elapsed.as_secs_f64());
        table.push(vec![
            r.number.to_string(),
            status.into(),
            r.title.into(),
            r.cases.to_string(),
            seconds.clone(),
            r.detail.clone(),
        ]);
        rows.push(json!({
            "number": r.number,
            "title": r.title,
            "passed": r.passed,
            "cases": r.cases,
            "seconds": seconds,
            "detail": r.detail,
        }));
    }
    let all = passed == reports.len();
    let report = Report {
        command: "selftest",
        json: json!({"seed": seed, "passed": passed, "failed": reports.len() - passed, "criteria": rows}),
        tables: vec![table],
    };
    (report, all)
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let guard = guard()?;
    let mut format = cli.format;
    let report = match cli.command {
        Command::Endoscopy { n, shape } => endoscopy(n, shape, guard)?,
        Command::Chains { n, shape, dominant } => chains(n, &shape, dominant, guard)?,
        Command::Packet { a, b, p } => packet(a, b, &p, guard)?,
        Command::Poincare { bipartition } => poincare(&bipartition)?,
        Command::Decay { bipartition } => decay(&bipartition)?,
        Command::Sx { n, k } => sx(n, k)?,
        Command::Derive { n, a, k, json } => {
            if json {
                format = Format::Json;
            }
            derive(n, a, k)?
        }
        Command::Dominance { shape, trials } => dominance(&shape, trials, cli.seed, guard)?,
        Command::Selftest => {
            let (report, ok) = selftest(cli.seed);
            emit(&report, format)?;
            return if ok { Ok(()) } else { Err(Failure::Failed("acceptance suite failed".into())) };
        }
    };
    emit(&report, format)
}

fn emit(report: &Report, format: Format) -> std::result::Result<(), Failure> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    report
        .render(format, &mut lock)
        .map_err(|e| Failure::Failed(format!("writing output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg} (raise {GUARD_VAR} to allow it)");
            ExitCode::from(1)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
