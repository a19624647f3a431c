use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use arq::cover::{build_cover, verify_cover, well_behaved_assignment};
use arq::degree::{
    degree, finite_type_check, generalized_standard_probe, knit_depth, DegreeReport, Outcome, Side, SumMap, Verdict,
};
use arq::format;
use arq::mesh::MeshCategory;
use arq::rep::{knit_ar_component, ArQuiver, Direction, Quiver, Radicals};
use arq::{ArrowId, Error, TranslationQuiver};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

const EXIT_COMPUTATION: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "arq", version, about = "Auslander-Reiten workbench for path algebras")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// degree search bound, and tau steps when knitting
    #[arg(long, global = true, default_value_t = 25)]
    bound: usize,
    /// truncation radius for covers
    #[arg(long, global = true, default_value_t = 12)]
    radius: usize,
    /// print one JSON document instead of a table
    #[arg(long, global = true)]
    json: bool,
    /// write the report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Verb {
    /// Check a quiver file: acyclic and connected for ordinary quivers,
    /// the translation quiver axioms otherwise
    Validate { file: PathBuf },
    /// Radical layer dimensions of the mesh category
    Mesh { file: PathBuf },
    /// Truncated generic cover around a vertex
    Cover {
        file: PathBuf,
        #[arg(long)]
        vertex: Option<u32>,
    },
    /// Knit the AR component of a path algebra
    Knit {
        file: PathBuf,
        /// start from the injectives instead of the projectives
        #[arg(long)]
        injectives: bool,
    },
    /// Degrees of an irreducible map given by arrows of the knitted component
    Degree {
        file: PathBuf,
        #[arg(long = "arrow", required = true)]
        arrows: Vec<u32>,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
        #[arg(long)]
        injectives: bool,
    },
    /// Decide finite representation type from end degrees
    FiniteType { file: PathBuf },
    /// Compare Hom spaces with the cover through a well-behaved functor
    Probe {
        file: PathBuf,
        #[arg(long)]
        vertex: Option<u32>,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        /// report only this many pairs, drawn with --seed
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
    Both,
}

enum Failure {
    Usage(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Usage(e.to_string()),
            e => Failure::Computation(e.to_string()),
        }
    }
}

struct Output {
    text: String,
    json: serde_json::Value,
    code: u8,
}

impl Output {
    fn new(text: String, json: impl Serialize) -> Self {
        Output { text, json: serde_json::to_value(json).expect("reports serialize"), code: 0 }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli);
    match result {
        Ok(out) => {
            let mut body =
                if cli.common.json { serde_json::to_string_pretty(&out.json).expect("json") } else { out.text };
            if !body.ends_with('\n') {
                body.push('\n');
            }
            match &cli.common.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, body) {
                        eprintln!("arq: {}: {e}", path.display());
                        return ExitCode::from(EXIT_COMPUTATION);
                    }
                }
                None => print!("{body}"),
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("arq: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Computation(m)) => {
            eprintln!("arq: {m}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}

fn load(path: &Path) -> Result<TranslationQuiver, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| match e {
        Error::Parse { .. } => Failure::Usage(format!("{}: {e}", path.display())),
        e => e.into(),
    })
}

/// No translation, no sigma and no marks: a quiver for a path algebra.
fn is_ordinary(tq: &TranslationQuiver) -> bool {
    tq.tau_pairs().next().is_none()
        && tq.sigma_pairs().next().is_none()
        && tq.projectives().next().is_none()
        && tq.injectives().next().is_none()
}

fn knit(tq: &TranslationQuiver, injectives: bool, bound: usize) -> Result<ArQuiver, Failure> {
    let q = Arc::new(Quiver::from_translation_quiver(tq)?);
    let dir = if injectives { Direction::FromInjectives } else { Direction::FromProjectives };
    Ok(knit_ar_component(&q, dir, bound)?)
}

/// The translation quiver a verb works on: the file itself, or the knitted
/// component when the file holds an ordinary quiver.
fn component(tq: TranslationQuiver, bound: usize) -> Result<TranslationQuiver, Failure> {
    if is_ordinary(&tq) {
        Ok(knit(&tq, false, bound)?.tq)
    } else {
        Ok(tq)
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let c = &cli.common;
    match &cli.verb {
        Verb::Validate { file } => validate(load(file)?),
        Verb::Mesh { file } => {
            let tq = component(load(file)?, c.bound)?;
            let table = MeshCategory::new(tq)?.dims_table();
            let mut text = String::new();
            for e in &table.pairs {
                let dims: Vec<String> = e.dims.iter().map(|d| d.to_string()).collect();
                text += &format!("{} -> {}: {}\n", e.x, e.y, dims.join(" "));
            }
            Ok(Output::new(text, &table))
        }
        Verb::Cover { file, vertex } => {
            let tq = component(load(file)?, c.bound)?;
            let v = match vertex {
                Some(v) => *v,
                None => tq.vertices().next().ok_or_else(|| Failure::Computation("empty quiver".into()))?,
            };
            let gc = build_cover(&tq, v, c.radius)?;
            let report = verify_cover(&gc);
            let doc = format::serialize_document(&gc.document());
            let interior = gc.interior();
            let mut text = format!(
                "# cover of radius {} at {}: {} vertices, {} interior, {} violations\n",
                c.radius,
                v,
                gc.cover.vertex_count(),
                interior.len(),
                report.violations.len()
            );
            text += &doc;
            for viol in &report.violations {
                eprintln!("arq: cover violation: {viol:?}");
            }
            let code = if report.is_valid() { 0 } else { EXIT_COMPUTATION };
            let json = json!({
                "radius": c.radius,
                "base_point": v,
                "vertices": gc.cover.vertex_count(),
                "arrows": gc.cover.arrow_count(),
                "interior": interior,
                "report": report,
                "document": doc,
            });
            Ok(Output::new(text, json).with_code(code))
        }
        Verb::Knit { file, injectives } => {
            let ar = knit(&load(file)?, *injectives, c.bound)?;
            let dump = ar.dump();
            let mut text =
                format!("{} modules{}\n", dump.modules.len(), if dump.truncated { " (truncated)" } else { "" });
            for m in &dump.modules {
                let dims: Vec<String> = m.module.dims.iter().map(|d| d.dim.to_string()).collect();
                let mut marks = String::new();
                if m.projective {
                    marks += " P";
                }
                if m.injective {
                    marks += " I";
                }
                let tau = m.tau.map(|t| format!(" tau={t}")).unwrap_or_default();
                text += &format!("{}: [{}]{marks}{tau}\n", m.vertex, dims.join(" "));
            }
            for a in &dump.arrows {
                text += &format!("a{}: {} -> {}\n", a.arrow, a.source, a.target);
            }
            Ok(Output::new(text, &dump))
        }
        Verb::Degree { file, arrows, side, injectives } => {
            let ar = knit(&load(file)?, *injectives, knit_depth(c.bound))?;
            let rads = Radicals::new(&ar);
            let ids: Vec<ArrowId> = arrows.clone();
            let f = SumMap::from_arrows(&ar, &ids)?;
            let sides: &[Side] = match side {
                SideArg::Left => &[Side::Left],
                SideArg::Right => &[Side::Right],
                SideArg::Both => &[Side::Left, Side::Right],
            };
            let reports = sides.iter().map(|&s| degree(&rads, &f, s, c.bound)).collect::<arq::Result<Vec<_>>>()?;
            let text = reports.iter().map(describe_degree).collect::<Vec<_>>().join("\n");
            Ok(Output::new(text, json!({ "reports": reports })))
        }
        Verb::FiniteType { file } => {
            let tq = load(file)?;
            let r = finite_type_check(&tq, c.bound)?;
            let mut text = format!(
                "verdict: {}\nbound: {}\ndiameter: {}\n",
                match r.verdict {
                    Verdict::FiniteType => "finite-type",
                    Verdict::Inconclusive => "inconclusive",
                },
                r.bound,
                r.diameter
            );
            if let Some(n) = r.indecomposables {
                text += &format!("indecomposables: {n}\n");
            }
            for e in &r.projectives {
                text += &format!("rad P{} -> P{}: {}\n", e.vertex, e.vertex, show(e.report.degree(), r.bound));
            }
            for e in &r.injectives {
                text += &format!("I{} -> I{}/soc: {}\n", e.vertex, e.vertex, show(e.report.degree(), r.bound));
            }
            for p in &r.path_bounds {
                let d = p.distance.map(|d| d.to_string()).unwrap_or_else(|| "none".into());
                text += &format!("S{} ~> I{}: distance {d} <= {}: {}\n", p.vertex, p.vertex, p.left_degree, p.holds);
            }
            let code = match r.verdict {
                Verdict::FiniteType => 0,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            };
            Ok(Output::new(text, &r).with_code(code))
        }
        Verb::Probe { file, vertex, levels, samples } => {
            let tq = load(file)?;
            let q = Quiver::from_translation_quiver(&tq)?;
            let ar = knit(&tq, false, c.bound)?;
            let root = match vertex {
                Some(v) => *v,
                None => ar.projective_vertex(q.vertex_count() - 1)?,
            };
            let gc = build_cover(&ar.tq, root, c.radius)?;
            let f = well_behaved_assignment(&gc, &ar, &Default::default())?;
            let mut r = generalized_standard_probe(&ar, &gc, &f, *levels)?;
            if let Some(k) = samples {
                use rand::seq::IndexedRandom;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(c.seed);
                let mut picked: Vec<_> = r.pairs.choose_multiple(&mut rng, *k).cloned().collect();
                picked.sort_by_key(|p| (p.x, p.y));
                r.pairs = picked;
            }
            let mut text = format!(
                "checked {} pairs, skipped {}, strict {}, levels agree: {}\n",
                r.checked, r.skipped, r.strict, r.levels_agree
            );
            for p in &r.pairs {
                text += &format!(
                    "{} -> {}: hom {} cover {} image {} {:?}\n",
                    p.x, p.y, p.hom_dim, p.cover_dim, p.image_rank, p.status
                );
            }
            Ok(Output::new(text, json!({ "consistent": r.consistent(), "report": r })))
        }
    }
}

fn show(d: Option<usize>, bound: usize) -> String {
    d.map(|n| n.to_string()).unwrap_or_else(|| format!("not found within {bound}"))
}

fn describe_degree(r: &DegreeReport) -> String {
    let side = match r.side {
        Side::Left => "left",
        Side::Right => "right",
    };
    let mut s = match &r.outcome {
        Outcome::Finite { degree, .. } => format!("{side} degree: {degree}"),
        Outcome::NotFoundWithin { bound } => format!("{side} degree: not found within {bound}"),
    };
    if let Some(w) = r.outcome.witness() {
        s += &format!(" (witness at {}, level {})", w.vertex, w.level);
    }
    if r.truncated {
        s += " [truncated]";
    }
    s
}

#[derive(Serialize)]
struct ValidateReport {
    kind: &'static str,
    valid: bool,
    vertices: usize,
    arrows: usize,
    violations: Vec<String>,
}

fn validate(tq: TranslationQuiver) -> Result<Output, Failure> {
    let ordinary = is_ordinary(&tq);
    let violations = if ordinary {
        match Quiver::from_translation_quiver(&tq) {
            Ok(_) => Vec::new(),
            Err(e) => vec![e.to_string()],
        }
    } else {
        tq.validate().violations.iter().map(|v| v.to_string()).collect()
    };
    let r = ValidateReport {
        kind: if ordinary { "ordinary" } else { "translation" },
        valid: violations.is_empty(),
        vertices: tq.vertex_count(),
        arrows: tq.arrow_count(),
        violations,
    };
    let mut text = format!(
        "{} quiver, {} vertices, {} arrows: {}\n",
        r.kind,
        r.vertices,
        r.arrows,
        if r.valid { "valid" } else { "invalid" }
    );
    for v in &r.violations {
        text += &format!("  {v}\n");
    }
    let code = if r.valid { 0 } else { EXIT_COMPUTATION };
    Ok(Output::new(text, &r).with_code(code))
}
