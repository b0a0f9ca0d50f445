use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use sandpile_core::algebra::{factorize, format_factorization};
use sandpile_core::geometry::{domain_of, Domain};
use sandpile_core::harmonic::{
    basis_algorithm, cyclic_subgroup_from_harmonic, dynamics_is_exact, h_diamond, h_pi, h_xy, harmonic_dynamics,
    potential_matrix, HarmonicFunction,
};
use sandpile_core::monomorphism::{mu_matrix, verify_monomorphism};
use sandpile_core::sandpile::{
    group_add, group_decomposition, group_order, identity, is_recurrent, render_pgm, render_text, GroupElement,
};
use sandpile_core::tiling::{convexity_warnings, load_polyform, search_tilings, DCTiling, PolyformRef, TilingCertificate};
use sandpile_core::Error;

/// Sandpile groups on lattice polyforms, their harmonic bases, and the
/// monomorphisms induced by DC-tilings.
///
/// Polyform specs are file paths (one `x y d` triangle per line) or
/// generators: `square:W` (side W, domain (W-1)x(W-1)), `rect:WxH`,
/// `triangle:K`, `diamond:K`, `poly:x,y;x,y;...` (doubled coordinates).
#[derive(Parser, Debug)]
#[command(name = "sandpile", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of results (tilings).
    #[arg(long, default_value_t = 100, global = true)]
    limit: usize,
    /// Seed for sampled property checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Run extra self-checks before reporting.
    #[arg(long, global = true)]
    verify: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Pgm,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order, invariant factors and factorization of the sandpile group.
    Group { spec: String },
    /// The identity element of the sandpile group.
    Identity { spec: String },
    /// Integer harmonic basis, potential matrix and its determinant.
    Basis { spec: String },
    /// DC-tilings of TARGET by TEMPLATE.
    Tile { template: String, target: String },
    /// Verify the monomorphism induced by a tiling certificate.
    Mono { certificate: PathBuf },
    /// Harmonic sandpile dynamics at the given times.
    Dynamics {
        spec: String,
        /// `xy`, `pi` or `diamond:I`.
        harmonic: String,
        /// Rational times such as `0`, `1/3`, `2/3`; put negative times after `--`.
        #[arg(required = true)]
        times: Vec<String>,
    },
}

enum Failure {
    Input(String),
    Invariant(String),
    Verification(String, String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
            Failure::Verification(..) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyDomain
            | Error::InvalidPolyform(_)
            | Error::Disconnected
            | Error::NonConvex
            | Error::HoleDetected
            | Error::Parse(_)
            | Error::InvalidArgument(_)
            | Error::IndexOutOfRange(_)
            | Error::InvalidTiling(_)
            | Error::NegativeInput(_)
            | Error::DomainMismatch
            | Error::Dimension(_)
            | Error::BoxTooSmall(_)
            | Error::TooLarge(_) => Failure::Input(e.to_string()),
            _ => Failure::Invariant(e.to_string()),
        }
    }
}

type Out = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Invariant(m) => eprintln!("invariant violated: {m}"),
                Failure::Verification(m, report) => {
                    let _ = emit(&cli, report);
                    eprintln!("verification failed: {m}");
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn run(cli: &Cli) -> Out {
    if cli.format == Format::Pgm && !matches!(cli.command, Command::Identity { .. } | Command::Dynamics { .. }) {
        return Err(Failure::Input("pgm output is only available for identity and dynamics".into()));
    }
    match &cli.command {
        Command::Group { spec } => cmd_group(cli, spec),
        Command::Identity { spec } => cmd_identity(cli, spec),
        Command::Basis { spec } => cmd_basis(cli, spec),
        Command::Tile { template, target } => cmd_tile(cli, template, target),
        Command::Mono { certificate } => cmd_mono(cli, certificate),
        Command::Dynamics { spec, harmonic, times } => cmd_dynamics(cli, spec, harmonic, times),
    }
}

fn load_domain(spec: &str) -> Result<Domain, Failure> {
    Ok(domain_of(&load_polyform(spec, None)?)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn cmd_group(cli: &Cli, spec: &str) -> Out {
    let domain = load_domain(spec)?;
    let order = group_order(&domain);
    let factors = group_decomposition(&domain);
    let product: BigInt = factors.iter().product();
    if product != order {
        return Err(Failure::Invariant(format!("invariant factors multiply to {product}, determinant is {order}")));
    }
    if cli.verify {
        let via_basis = sandpile_core::harmonic::order_via_basis(&domain)?;
        if via_basis != order {
            return Err(Failure::Invariant(format!("basis order {via_basis} differs from {order}")));
        }
    }
    let factorization = factorize(&order, 10_000_000);
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "vertices": domain.len(),
            "order": order.to_string(),
            "invariant_factors": strings(&factors),
            "factorization": factorization.as_ref().map(|f| f
                .iter()
                .map(|(p, e)| json!({"prime": p.to_string(), "exponent": e}))
                .collect::<Vec<_>>()),
        })),
        _ => format!(
            "vertices: {}\norder: {}\ninvariant factors: {}\nfactorization: {}\n",
            domain.len(),
            order,
            strings(&factors).join(" "),
            factorization.map(|f| format_factorization(&f)).unwrap_or_else(|| "unknown".into())
        ),
    })
}

fn config_json(domain: &Domain, e: &GroupElement) -> Value {
    let rows: Vec<String> = render_text(domain, e.rep()).lines().map(str::to_string).collect();
    json!({
        "vertices": domain.vertices().iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>(),
        "chips": e.rep().0,
        "rows": rows,
    })
}

fn cmd_identity(cli: &Cli, spec: &str) -> Out {
    let domain = load_domain(spec)?;
    let e = identity(&domain);
    if cli.verify {
        if !is_recurrent(&domain, e.rep()) {
            return Err(Failure::Invariant("identity is not recurrent".into()));
        }
        if group_add(&domain, &e, &e)? != e {
            return Err(Failure::Invariant("identity is not idempotent".into()));
        }
    }
    Ok(match cli.format {
        Format::Text => render_text(&domain, e.rep()),
        Format::Json => pretty(&config_json(&domain, &e)),
        Format::Pgm => render_pgm(&domain, e.rep()),
    })
}

fn cmd_basis(cli: &Cli, spec: &str) -> Out {
    let domain = load_domain(spec)?;
    let basis = basis_algorithm(&domain)?;
    let pm = potential_matrix(&basis)?;
    let det = pm.det();
    let abs = if det < BigInt::zero() { -det.clone() } else { det.clone() };
    let order = group_order(&domain);
    if abs != order {
        return Err(Failure::Invariant(format!("|det| of the potential matrix is {abs}, group order is {order}")));
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "functions": basis.len(),
            "trace": basis.trace_json(),
            "boundary": pm.boundary.iter().map(|&i| { let (x, y) = domain.vertex(i); vec![x, y] }).collect::<Vec<_>>(),
            "potential_matrix": (0..pm.matrix.rows()).map(|r| strings(pm.matrix.row(r))).collect::<Vec<_>>(),
            "det": det.to_string(),
            "order": order.to_string(),
        })),
        _ => {
            let mut s = format!("basis functions: {}\n", basis.len());
            for step in basis.trace() {
                s.push_str(&format!(
                    "  {:?} {} index {}, grown domain {}\n",
                    step.vertex, step.family, step.index, step.grown
                ));
            }
            s.push_str(&format!("|det|: {abs}\norder: {order}\n"));
            s
        }
    })
}

fn cmd_tile(cli: &Cli, template: &str, target: &str) -> Out {
    let a = load_polyform(template, None)?;
    let b = load_polyform(target, None)?;
    for w in convexity_warnings(&a, &b) {
        eprintln!("warning: {w}");
    }
    let tilings = search_tilings(&a, &b, cli.limit)?;
    let certs: Vec<TilingCertificate> = tilings
        .iter()
        .map(|t| t.certificate_with(PolyformRef::Spec(template.into()), PolyformRef::Spec(target.into())))
        .collect();
    Ok(match cli.format {
        Format::Json => pretty(&json!({ "count": certs.len(), "certificates": certs })),
        _ => {
            let mut s = format!("count: {}\n", certs.len());
            for c in &certs {
                s.push_str(&serde_json::to_string(c).expect("serializable"));
                s.push('\n');
            }
            s
        }
    })
}

fn cmd_mono(cli: &Cli, path: &Path) -> Out {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("certificate: {e}")))?;
    // Accept the output of `tile --format json` and use its first certificate.
    if let Some(list) = value.get("certificates").and_then(Value::as_array) {
        if list.is_empty() {
            return Err(Failure::Input("certificate list is empty".into()));
        }
        if list.len() > 1 {
            eprintln!("note: using certificate 1 of {}", list.len());
        }
        value = list[0].clone();
    }
    let cert: TilingCertificate =
        serde_json::from_value(value).map_err(|e| Failure::Input(format!("certificate: {e}")))?;
    let tiling = DCTiling::from_certificate(&cert, path.parent())?;
    let validation = tiling.validate();
    if !validation.valid {
        let report = pretty(&json!({
            "well_defined": false,
            "injective": false,
            "tiling_valid": false,
            "diagnostics": validation.diagnostics,
            "tiling": cert,
        }));
        return Err(Failure::Verification(validation.diagnostics.join("; "), report));
    }
    let map = mu_matrix(&tiling)?;
    let report = verify_monomorphism(&map, 20, cli.seed)?;
    let body = match cli.format {
        Format::Json => pretty(&report.to_json(Some(&cert))),
        _ => {
            let s = |x: &Option<BigInt>| x.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "not computed".into());
            format!(
                "tiles: {}\nsource order: {}\ntarget order: {}\nimage order: {}\nwell defined: {}\nhomomorphism samples: {} ({})\ninjective: {}\n",
                tiling.len(),
                s(&report.source_order),
                s(&report.target_order),
                s(&report.image_order),
                report.well_defined,
                report.homomorphism_samples,
                if report.homomorphism_ok { "ok" } else { "failed" },
                report.injective.map(|b| b.to_string()).unwrap_or_else(|| "unknown".into()),
            )
        }
    };
    if report.ok() {
        Ok(body)
    } else {
        Err(Failure::Verification(report.problems.join("; "), body))
    }
}

/// Side length of a full square domain.
fn square_side(domain: &Domain) -> Result<i64, Failure> {
    let (x0, y0, x1, y1) = domain.bounding_box();
    let n = x1 - x0 + 1;
    if y1 - y0 + 1 != n || domain.len() as i64 != n * n {
        return Err(Failure::Input("dynamics needs a square domain".into()));
    }
    Ok(n)
}

/// The named harmonic function on its reference square, together with that
/// square and the natural cyclic-subgroup order.
fn named_harmonic(name: &str, n: i64) -> Result<(HarmonicFunction, Domain, u64), Failure> {
    let bad = |m: String| Failure::Input(m);
    if name == "xy" {
        if n % 2 == 0 {
            return Err(bad(format!("xy needs an odd side, got {n}")));
        }
        Ok((h_xy(n)?, Domain::centered_square(n)?, ((n + 1) / 2) as u64))
    } else if name == "pi" {
        if n % 2 != 0 {
            return Err(bad(format!("pi needs an even side, got {n}")));
        }
        Ok((h_pi(n)?, Domain::square(n)?, (n + 1) as u64))
    } else if let Some(i) = name.strip_prefix("diamond:") {
        let i: i64 = i.parse().map_err(|_| bad(format!("bad diamond index in {name}")))?;
        Ok((h_diamond(n, i)?, Domain::square(n)?, 4))
    } else {
        Err(bad(format!("unknown harmonic `{name}` (expected xy, pi or diamond:I)")))
    }
}

fn cmd_dynamics(cli: &Cli, spec: &str, name: &str, times: &[String]) -> Out {
    let n = square_side(&load_domain(spec)?)?;
    let (h, domain, order) = named_harmonic(name, n)?;
    let values = h.restrict_int(&domain)?;
    let subgroup = match cyclic_subgroup_from_harmonic(&h, &domain, order) {
        Ok(c) => Some(c.elements(&domain)?),
        Err(Error::Divisibility(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut frames = Vec::new();
    for t in times {
        let q = BigRational::from_str(t).map_err(|_| Failure::Input(format!("bad time `{t}`")))?;
        let d = harmonic_dynamics(&domain, &values, &q)?;
        let exact = dynamics_is_exact(&domain, &values, &q);
        let member = subgroup.as_ref().map(|s| s.contains(&d));
        frames.push((t.clone(), d, exact, member));
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "harmonic": name,
            "side": n,
            "subgroup_order": subgroup.as_ref().map(|s| s.len().to_string()),
            "frames": frames.iter().map(|(t, d, exact, member)| {
                let mut v = config_json(&domain, d);
                v["t"] = json!(t);
                v["exact"] = json!(exact);
                v["in_subgroup"] = json!(member);
                v
            }).collect::<Vec<_>>(),
        })),
        Format::Pgm => frames.iter().map(|(_, d, _, _)| render_pgm(&domain, d.rep())).collect(),
        Format::Text => {
            let mut s = String::new();
            for (t, d, exact, member) in &frames {
                let m = member.map(|b| b.to_string()).unwrap_or_else(|| "unknown".into());
                s.push_str(&format!("t = {t}  exact: {exact}  in subgroup: {m}\n"));
                s.push_str(&render_text(&domain, d.rep()));
                s.push('\n');
            }
            s
        }
    })
}
