//! `tropfiber` — locate non-displaceable toric fibers of a moment polytope.
//!
//! Subcommands wrap the library pipeline: validation, primary normals,
//! tropicalizations, detection, membership, leading-term systems, metric
//! experiments, and SVG figures. Exit codes: 0 success, 1 input/parse
//! error, 2 domain error.

mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use tropfiber::balancing::{self, SlotOrder};
use tropfiber::metrics::{self, PerturbationFamily, PlanarSet};
use tropfiber::polytope::Polytope;
use tropfiber::tropical::{self, PLComplex, TropicalPolynomial};
use tropfiber::{Error, IntVec, Rat, Result};

use svg::{Overlay, RenderSpec};

#[derive(Parser)]
#[command(name = "tropfiber", version, about = "Non-displaceable toric fiber finder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the machine-readable result to this path as JSON.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Render an SVG figure to this path (2-D polytopes only).
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Tolerance for metric computations, as a rational P/Q.
    #[arg(long, global = true, value_name = "P/Q", default_value = "1/1000000")]
    tol: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check a polytope file against every structural invariant.
    Validate { file: PathBuf },
    /// List the sign-canonical primary normal directions.
    PrimaryNormals { file: PathBuf },
    /// Tropicalization of the polytope relative to a lattice direction.
    Trop {
        file: PathBuf,
        /// Integer direction, comma-separated: "a,b,...".
        #[arg(long, value_name = "a,b,...")]
        m: String,
    },
    /// Tropical hypersurface of a min-plus polynomial file.
    TropPoly { file: PathBuf },
    /// Intersect all primary tropicalizations over the interior.
    Detect { file: PathBuf },
    /// Membership of a point in tropicalizations.
    Member {
        file: PathBuf,
        /// Interior point, comma-separated rationals: "p/q,p/q".
        #[arg(long, value_name = "p/q,...")]
        u: String,
        /// Single direction to test; default is every primary normal.
        #[arg(long, value_name = "a,b,...")]
        m: Option<String>,
    },
    /// Energy filtration, adapted basis, and the leading term system.
    LeadingTerm {
        file: PathBuf,
        #[arg(long, value_name = "p/q,...")]
        u: String,
        /// Include bulk-deformation coefficient symbols.
        #[arg(long)]
        generalized: bool,
    },
    /// Isolated points of the detection locus.
    Balanced { file: PathBuf },
    /// Hausdorff distance interval between two 2-D polytopes.
    Hausdorff { file_a: PathBuf, file_b: PathBuf },
    /// Tropicalization convergence table under facet translation.
    Converge {
        file: PathBuf,
        /// Facet to translate (1-based).
        #[arg(long)]
        facet: usize,
        #[arg(long, value_name = "a,b")]
        m: String,
        /// Number of rows; row k uses delta = 2^-k.
        #[arg(long, default_value_t = 8)]
        steps: u32,
    },
    /// Figure of the polytope, optionally with one tropicalization.
    Render {
        file: PathBuf,
        #[arg(long, value_name = "a,b")]
        m: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::BadRational(_) => 1,
        _ => 2,
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_direction(s: &str, dim: usize) -> Result<IntVec> {
    let entries: Vec<BigInt> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer component {t:?}")))
        })
        .collect::<Result<_>>()?;
    if entries.len() != dim {
        return Err(Error::Parse(format!(
            "direction has {} components, polytope has dimension {dim}",
            entries.len()
        )));
    }
    Ok(IntVec::new(entries))
}

fn parse_point(s: &str, dim: usize) -> Result<Vec<Rat>> {
    let u: Vec<Rat> = s.split(',').map(Rat::from_str).collect::<Result<_>>()?;
    if u.len() != dim {
        return Err(Error::Parse(format!(
            "point has {} components, polytope has dimension {dim}",
            u.len()
        )));
    }
    Ok(u)
}

fn rat_vec(u: &[Rat]) -> String {
    let parts: Vec<String> = u.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn int_vec(m: &IntVec) -> String {
    let parts: Vec<String> = m.entries().iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Result of a subcommand: stdout text, JSON document, optional SVG.
struct Output {
    text: String,
    json: serde_json::Value,
    svg: Option<String>,
}

fn complex_output(c: &PLComplex, svg: Option<String>) -> Result<Output> {
    let json = serde_json::to_value(c)?;
    Ok(Output {
        text: format!("{}\n", serde_json::to_string_pretty(c)?),
        json,
        svg,
    })
}

fn run(cli: &Cli) -> Result<()> {
    let tol = Rat::from_str(&cli.tol)?;
    if !tol.is_positive() {
        return Err(Error::Parse(format!("tolerance must be positive, got {tol}")));
    }
    let want_svg = cli.svg.is_some();
    let out = match &cli.command {
        Command::Validate { file } => cmd_validate(&read_file(file)?)?,
        Command::PrimaryNormals { file } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let normals = balancing::primary_normals(&p)?;
            let text = normals
                .iter()
                .map(|m| format!("m = {}\n", int_vec(m)))
                .collect();
            Output {
                text,
                json: serde_json::to_value(&normals)?,
                svg: None,
            }
        }
        Command::Trop { file, m } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let m = parse_direction(m, p.dim)?;
            let c = tropical::trop_relative(&p, &m)?;
            let svg = want_svg
                .then(|| {
                    svg::render(
                        &p,
                        &[Overlay { complex: &c, emphasized: false }],
                        &RenderSpec::default(),
                    )
                })
                .transpose()?;
            complex_output(&c, svg)?
        }
        Command::TropPoly { file } => {
            let poly: TropicalPolynomial = serde_json::from_str(&read_file(file)?)?;
            let poly = TropicalPolynomial::new(poly.dim, poly.terms)?;
            let c = tropical::trop_poly(&poly, None)?;
            complex_output(&c, None)?
        }
        Command::Detect { file } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let d = balancing::detect(&p)?;
            let svg = if want_svg {
                let primaries = balancing::primary_normals(&p)?;
                let trops: Vec<PLComplex> = primaries
                    .iter()
                    .map(|m| tropical::trop_relative(&p, m))
                    .collect::<Result<_>>()?;
                let mut overlays: Vec<Overlay<'_>> = trops
                    .iter()
                    .map(|c| Overlay { complex: c, emphasized: false })
                    .collect();
                overlays.push(Overlay { complex: &d, emphasized: true });
                Some(svg::render(&p, &overlays, &RenderSpec::default())?)
            } else {
                None
            };
            complex_output(&d, svg)?
        }
        Command::Member { file, u, m } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let u = parse_point(u, p.dim)?;
            p.interior_values(&u)?;
            cmd_member(&p, &u, m.as_deref())?
        }
        Command::LeadingTerm { file, u, generalized } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let u = parse_point(u, p.dim)?;
            p.interior_values(&u)?;
            cmd_leading_term(&p, &u, *generalized)?
        }
        Command::Balanced { file } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let points = balancing::balanced_candidates(&p)?;
            let text = points.iter().map(|u| format!("{}\n", rat_vec(u))).collect();
            Output {
                text,
                json: serde_json::to_value(&points)?,
                svg: None,
            }
        }
        Command::Hausdorff { file_a, file_b } => {
            let a = Polytope::parse(&read_file(file_a)?)?;
            let b = Polytope::parse(&read_file(file_b)?)?;
            let d = metrics::hausdorff(
                &PlanarSet::from_polytope(&a)?,
                &PlanarSet::from_polytope(&b)?,
                &tol,
            )?;
            Output {
                text: format!("lower = {}\nupper = {}\n", d.lower, d.upper),
                json: serde_json::to_value(&d)?,
                svg: None,
            }
        }
        Command::Converge { file, facet, m, steps } => {
            let p = Polytope::parse(&read_file(file)?)?;
            let m = parse_direction(m, p.dim)?;
            let deltas: Vec<Rat> = (1..=*steps).map(|k| Rat::ratio(1, 1i64 << k)).collect();
            let fam = PerturbationFamily { base: p, facet: *facet, deltas };
            let rows = metrics::convergence_experiment(&fam, &m, &tol)?;
            let mut text = String::from("delta  lower  upper\n");
            let mut json_rows = Vec::new();
            for (delta, interval) in &rows {
                text.push_str(&format!("{delta}  {}  {}\n", interval.lower, interval.upper));
                json_rows.push(json!({
                    "delta": delta,
                    "lower": interval.lower,
                    "upper": interval.upper,
                }));
            }
            Output {
                text,
                json: serde_json::Value::Array(json_rows),
                svg: None,
            }
        }
        Command::Render { file, m } => {
            if cli.svg.is_none() {
                return Err(Error::Parse("render requires --svg PATH".to_string()));
            }
            let p = Polytope::parse(&read_file(file)?)?;
            let overlay_complex = m
                .as_deref()
                .map(|m| -> Result<PLComplex> {
                    let m = parse_direction(m, p.dim)?;
                    tropical::trop_relative(&p, &m)
                })
                .transpose()?;
            let overlays: Vec<Overlay<'_>> = overlay_complex
                .iter()
                .map(|c| Overlay { complex: c, emphasized: false })
                .collect();
            let svg = svg::render(&p, &overlays, &RenderSpec::default())?;
            Output {
                text: String::new(),
                json: json!({"rendered": true}),
                svg: Some(svg),
            }
        }
    };

    print!("{}", out.text);
    if let Some(path) = &cli.json {
        let doc = format!("{}\n", serde_json::to_string_pretty(&out.json)?);
        std::fs::write(path, doc).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &cli.svg {
        if let Some(svg) = &out.svg {
            std::fs::write(path, svg)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn cmd_validate(text: &str) -> Result<Output> {
    let p: Polytope = serde_json::from_str(text)?;
    if p.dim == 0 || p.facets.is_empty() {
        return Err(Error::InvalidPolytope("empty polytope description".to_string()));
    }
    for (idx, f) in p.facets.iter().enumerate() {
        if f.normal.dim() != p.dim {
            return Err(Error::Parse(format!(
                "facet {} normal has {} components, expected {}",
                idx + 1,
                f.normal.dim(),
                p.dim
            )));
        }
        if f.normal.is_zero() {
            return Err(Error::InvalidPolytope(format!("zero normal at facet {}", idx + 1)));
        }
    }
    let report = p.validate();
    let json = json!({
        "primitive": report.primitive,
        "irredundant": report.irredundant,
        "bounded": report.bounded,
        "full_dimensional": report.full_dimensional,
        "pass": report.all_pass(),
    });
    let mut text = String::new();
    text.push_str(&format!("primitive normals: {}\n", all_ok(&report.primitive)));
    text.push_str(&format!("irredundant facets: {}\n", all_ok(&report.irredundant)));
    text.push_str(&format!("bounded: {}\n", report.bounded));
    text.push_str(&format!("full-dimensional: {}\n", report.full_dimensional));
    match report.first_failure() {
        None => {
            text.push_str("valid\n");
            Ok(Output { text, json, svg: None })
        }
        Some(msg) => {
            print!("{text}");
            Err(Error::InvalidPolytope(msg))
        }
    }
}

fn all_ok(entries: &[(usize, bool)]) -> String {
    let bad: Vec<String> = entries
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(j, _)| j.to_string())
        .collect();
    if bad.is_empty() {
        "ok".to_string()
    } else {
        format!("failing at {}", bad.join(", "))
    }
}

fn cmd_member(p: &Polytope, u: &[Rat], m: Option<&str>) -> Result<Output> {
    if let Some(m) = m {
        let m = parse_direction(m, p.dim)?;
        let verdict = tropical::member_relative(p, &m, u)?;
        return Ok(Output {
            text: format!("m = {}: {}\n", int_vec(&m), verdict),
            json: json!({"point": u, "m": m, "member": verdict}),
            svg: None,
        });
    }
    let primaries = balancing::primary_normals(p)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut overall = true;
    for m in &primaries {
        let verdict = tropical::member_relative(p, m, u)?;
        overall = overall && verdict;
        text.push_str(&format!("m = {}: {}\n", int_vec(m), verdict));
        rows.push(json!({"m": m, "member": verdict}));
    }
    text.push_str(&format!("strongly bulk-balanced: {overall}\n"));
    Ok(Output {
        text,
        json: json!({"point": u, "directions": rows, "strongly_bulk_balanced": overall}),
        svg: None,
    })
}

fn cmd_leading_term(p: &Polytope, u: &[Rat], generalized: bool) -> Result<Output> {
    let basis = balancing::adapted_basis(p, u)?;
    let filtration = &basis.filtration;
    let system = balancing::leading_term_system(p, u, &basis, generalized)?;
    let solvable = balancing::solvable_over_torus_with(p, u, SlotOrder::AscendingFacet)?;

    let mut text = String::new();
    text.push_str(&format!("point: {}\n", rat_vec(u)));
    text.push_str("energy levels:\n");
    for (idx, value) in filtration.levels.iter().enumerate() {
        let facets: Vec<String> = filtration.groups[idx].iter().map(|j| j.to_string()).collect();
        text.push_str(&format!(
            "  S_{} = {value}: facets [{}] (a = {}, d = {})\n",
            idx + 1,
            facets.join(", "),
            filtration.a[idx],
            filtration.d[idx],
        ));
    }
    text.push_str(&format!("kappa = {}\n", filtration.kappa));
    text.push_str(&format!("adapted basis (D = {}):\n", basis.scale));
    for ((l, s), vector) in basis.slots.iter().zip(&basis.vectors) {
        text.push_str(&format!("  e*_{{{l},{s}}} = {}\n", rat_vec(vector)));
    }
    text.push_str("leading term system:\n");
    text.push_str(&system.render());
    text.push_str(&format!(
        "verdict: {}\n",
        if solvable { "solvable over the torus" } else { "not solvable over the torus" }
    ));

    let json = json!({
        "point": u,
        "levels": filtration.levels,
        "groups": filtration.groups,
        "a": filtration.a,
        "d": filtration.d,
        "kappa": filtration.kappa,
        "scale": basis.scale.to_string(),
        "slots": basis.slots,
        "basis": basis.vectors,
        "generalized": generalized,
        "system": system.render(),
        "solvable": solvable,
    });
    Ok(Output { text, json, svg: None })
}
