use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use confspace::cube::{is_locally_cat0, ComplexJson, FlagReport};
use confspace::graph::{is_admissible, parse_dot, AdmissibilityReport};
use confspace::homology::{cube_homology, surface_report};
use confspace::morse::{
    pulsar_height, pulsar_params_from_labels, split_certificate, sun_extension_height_at,
    sun_height, sun_rays_from_labels, wedge_certificate,
};
use confspace::reproduce::{self, ReproduceOptions, ReproduceReport, Target};
use confspace::{
    build_conf, generate, induced_morse, Graph, GraphFamily, HeightFunction, HomologyReport,
    SplitCertificate, SurfaceReport, WedgeCertificate, DEFAULT_COLLAPSE_BUDGET, ENGINE_VERSION,
};

/// `println!` that stops quietly when the reader goes away (`confspace gen ... | head`).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const BUDGET_ENV: &str = "CONFSPACE_COLLAPSE_BUDGET";

#[derive(Parser)]
#[command(
    name = "confspace",
    version,
    about = "Discretized 3-strand configuration spaces of graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph from one of the built-in families as JSON.
    Gen(GenArgs),
    /// Build Conf□_n of a graph and report its invariants.
    Analyze(AnalyzeArgs),
    /// Rerun a fixed reproduction suite and compare against expected values.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Cycle,
    Theta,
    Pulsar,
    Sun,
    Rose,
    Path,
}

#[derive(Args)]
struct GenArgs {
    family: FamilyKind,
    /// Number of arcs (theta, pulsar).
    #[arg(long)]
    m: Option<usize>,
    /// Number of vertices (cycle, path).
    #[arg(long)]
    k: Option<usize>,
    /// Ray counts per slot for sun graphs (comma separated), or the ray count of a rose.
    #[arg(long, value_delimiter = ',')]
    rays: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    n1: usize,
    #[arg(long, default_value_t = 0)]
    n2: usize,
    /// Number of loops (rose).
    #[arg(long)]
    circles: Option<usize>,
    /// Use the standard admissible subdivision.
    #[arg(long)]
    subdivide: bool,
    /// Output path; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Complex,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Graph file: JSON as written by `gen`, or Graphviz DOT.
    graph: PathBuf,
    /// Number of strands.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Height function: `sun`, `sun-ext`, `pulsar`, `heights` (the graph's own
    /// height2 values) or a path to a JSON file of doubled heights.
    #[arg(long)]
    morse: Option<String>,
    /// Split level (doubled); runs the split certificate instead of the wedge one.
    #[arg(long, allow_hyphen_values = true)]
    cut: Option<i64>,
    /// Include the full cell list in the report.
    #[arg(long)]
    emit: Option<Emit>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_parser = parse_target)]
    target: Target,
    /// Largest m for the theta table.
    #[arg(long, default_value_t = 12)]
    m_max: usize,
    /// Largest number of ray slots for the sun suite.
    #[arg(long, default_value_t = 4)]
    sun_n_max: usize,
    /// Largest total number of rays for the sun suite.
    #[arg(long, default_value_t = 3)]
    sun_rays_max: usize,
    #[arg(long)]
    json: bool,
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse()
        .map_err(|e: reproduce::ReproduceError| e.to_string())
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Input(String),
    Mismatch,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = budget().and_then(|budget| match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a, budget),
        Command::Reproduce(a) => cmd_reproduce(a, budget),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_ENV) {
        Err(_) => Ok(DEFAULT_COLLAPSE_BUDGET),
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Input(format!(
                "{BUDGET_ENV} must be a nonnegative integer, got '{v}'"
            ))
        }),
    }
}

fn need(v: Option<usize>, flag: &str, family: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Input(format!("{family} needs --{flag}")))
}

fn cmd_gen(a: GenArgs) -> Result<(), Failure> {
    let family = match a.family {
        FamilyKind::Cycle => GraphFamily::Cycle {
            k: need(a.k, "k", "cycle")?,
        },
        FamilyKind::Path => GraphFamily::Path {
            k: need(a.k, "k", "path")?,
        },
        FamilyKind::Theta => GraphFamily::Theta {
            m: need(a.m, "m", "theta")?,
        },
        FamilyKind::Pulsar => GraphFamily::Pulsar {
            m: need(a.m, "m", "pulsar")?,
            n1: a.n1,
            n2: a.n2,
        },
        FamilyKind::Sun => {
            if a.rays.is_empty() {
                return Err(Failure::Input("sun needs --rays x1,x2,...".into()));
            }
            GraphFamily::Sun { rays: a.rays }
        }
        FamilyKind::Rose => GraphFamily::Rose {
            circles: need(a.circles, "circles", "rose")?,
            rays: match a.rays.as_slice() {
                [] => 0,
                [r] => *r,
                _ => return Err(Failure::Input("rose takes a single --rays count".into())),
            },
        },
    };
    let g = generate(&family, a.subdivide)?;
    let text = g.to_json_string();
    match a.output {
        Some(path) => fs::write(&path, text + "\n")
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => outln!("{text}"),
    }
    Ok(())
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let is_dot = path.extension().is_some_and(|e| e == "dot" || e == "gv")
        || !text.trim_start().starts_with('{');
    let g = if is_dot {
        parse_dot(&text)?
    } else {
        Graph::from_json_str(&text)?
    };
    Ok(g)
}

/// Heights from a file: a JSON array indexed by vertex id, or an object
/// keyed by vertex label or id.
fn read_heights(path: &Path, g: &Graph) -> Result<HeightFunction, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let as_int = |v: &Value| {
        v.as_i64()
            .ok_or_else(|| Failure::Input(format!("height {v} is not an integer")))
    };
    match value {
        Value::Array(items) => Ok(HeightFunction::new(
            items.iter().map(as_int).collect::<Result<_, _>>()?,
        )),
        Value::Object(map) => {
            let mut values = vec![None; g.num_vertices()];
            for (key, v) in &map {
                let id = g
                    .vertex_by_label(key)
                    .or_else(|| key.parse().ok().filter(|&i: &usize| i < g.num_vertices()))
                    .ok_or_else(|| Failure::Input(format!("unknown vertex '{key}'")))?;
                values[id] = Some(as_int(v)?);
            }
            let missing: Vec<String> = (0..g.num_vertices())
                .filter(|&v| values[v].is_none())
                .map(|v| g.display_name(v))
                .collect();
            if !missing.is_empty() {
                return Err(Failure::Input(format!(
                    "no height for {}",
                    missing.join(", ")
                )));
            }
            Ok(HeightFunction::new(values.into_iter().flatten().collect()))
        }
        _ => Err(Failure::Input(
            "heights file must hold an array or an object".into(),
        )),
    }
}

#[derive(Serialize)]
struct InputInfo {
    path: String,
    vertices: usize,
    edges: usize,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Certificate {
    Wedge(WedgeCertificate),
    Split(Box<SplitCertificate>),
    Error { message: String },
}

#[derive(Serialize)]
struct MorseReport {
    preset: String,
    values2: Vec<i64>,
    morse_euler_sum: i64,
    certificate: Certificate,
}

#[derive(Serialize)]
struct AnalysisReport {
    input: InputInfo,
    n: usize,
    admissibility: Option<AdmissibilityReport>,
    warnings: Vec<String>,
    f_vector: Vec<usize>,
    euler_characteristic: i64,
    components: usize,
    flag: FlagReport,
    homology: HomologyReport,
    surface: SurfaceReport,
    morse: Option<MorseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complex: Option<ComplexJson>,
    engine_version: &'static str,
    /// Wall-clock milliseconds per phase; not part of the reproducible payload.
    timings_ms: BTreeMap<&'static str, f64>,
}

fn preset_height(
    name: &str,
    g: &Graph,
    graph_path: &Path,
) -> Result<(HeightFunction, Option<i64>), Failure> {
    let no_match = |what: &str| {
        Failure::Input(format!(
            "--morse {name}: graph labels do not describe a generated {what}"
        ))
    };
    match name {
        "sun" => {
            let rays = sun_rays_from_labels(g).ok_or_else(|| no_match("subdivided sun graph"))?;
            Ok((sun_height(g, &rays)?, None))
        }
        "sun-ext" => {
            let rays = sun_rays_from_labels(g).ok_or_else(|| no_match("subdivided sun graph"))?;
            let slot = rays.iter().position(|&x| x > 0).ok_or_else(|| {
                Failure::Input("--morse sun-ext needs a sun graph with at least one ray".into())
            })?;
            let mut base = rays.clone();
            base[slot] -= 1;
            let cut2 = 2 * (3 * rays.len() as i64 + 3);
            Ok((sun_extension_height_at(g, &base, slot)?, Some(cut2)))
        }
        "pulsar" => {
            let (m, n1, n2) =
                pulsar_params_from_labels(g).ok_or_else(|| no_match("subdivided pulsar graph"))?;
            Ok((pulsar_height(g, m, n1, n2)?, None))
        }
        "heights" => {
            let h = HeightFunction::from_graph(g).ok_or_else(|| {
                Failure::Input(format!("{} has no height2 values", graph_path.display()))
            })?;
            Ok((h, None))
        }
        path => Ok((read_heights(Path::new(path), g)?, None)),
    }
}

fn cmd_analyze(a: AnalyzeArgs, budget: usize) -> Result<(), Failure> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut BTreeMap<&'static str, f64>| {
        timings.insert(name, clock.elapsed().as_secs_f64() * 1000.0);
        clock = Instant::now();
    };
    if a.n == 0 {
        return Err(Failure::Input("--n must be at least 1".into()));
    }
    let g = read_graph(&a.graph)?;
    let mut warnings = Vec::new();
    let admissibility = match is_admissible(&g, a.n) {
        Ok(r) => {
            if !r.ok {
                warnings.push(format!(
                    "graph is not admissible for {} strands; the cube complex need not capture the configuration space",
                    a.n
                ));
            }
            Some(r)
        }
        Err(e) => {
            warnings.push(format!("admissibility not checked: {e}"));
            None
        }
    };
    let prepared = match &a.morse {
        Some(name) => Some(preset_height(name, &g, &a.graph)?),
        None => None,
    };
    lap("parse", &mut timings);

    let c = build_conf(&g, a.n);
    lap("build", &mut timings);
    let flag = is_locally_cat0(&c)?;
    let homology = cube_homology(&c)?;
    let surface = surface_report(&c)?;
    lap("homology", &mut timings);

    let mut passed = true;
    let morse = match (prepared, &a.morse) {
        (Some((h, default_cut)), Some(name)) => {
            let md = induced_morse(&c, &h)?;
            let certificate = match a.cut.or(default_cut) {
                Some(cut2) => match split_certificate(&md, cut2, budget) {
                    Ok(s) => {
                        passed &= s.ok;
                        Certificate::Split(Box::new(s))
                    }
                    Err(e) => {
                        passed = false;
                        Certificate::Error {
                            message: e.to_string(),
                        }
                    }
                },
                None => match wedge_certificate(&md, budget) {
                    Ok(w) => {
                        passed &= w.ok;
                        Certificate::Wedge(w)
                    }
                    Err(e) => {
                        passed = false;
                        Certificate::Error {
                            message: e.to_string(),
                        }
                    }
                },
            };
            lap("morse", &mut timings);
            Some(MorseReport {
                preset: name.clone(),
                values2: h.values2.clone(),
                morse_euler_sum: md.morse_euler_sum(),
                certificate,
            })
        }
        _ => {
            if a.cut.is_some() {
                warnings.push("--cut has no effect without --morse".into());
            }
            None
        }
    };

    let report = AnalysisReport {
        input: InputInfo {
            path: a.graph.display().to_string(),
            vertices: g.num_vertices(),
            edges: g.num_edges(),
        },
        n: a.n,
        admissibility,
        warnings,
        f_vector: c.f_vector(),
        euler_characteristic: c.euler_characteristic(),
        components: c.num_components(),
        flag,
        homology,
        surface,
        morse,
        complex: (a.emit == Some(Emit::Complex)).then(|| c.to_json()),
        engine_version: ENGINE_VERSION,
        timings_ms: timings,
    };
    if a.json {
        outln!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_analysis(&report);
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn print_analysis(r: &AnalysisReport) {
    let row = |k: &str, v: String| outln!("{k:<22} {v}");
    row(
        "graph",
        format!(
            "{} ({} vertices, {} edges)",
            r.input.path, r.input.vertices, r.input.edges
        ),
    );
    row("strands", r.n.to_string());
    if let Some(adm) = &r.admissibility {
        row("admissible", yes_no(adm.ok).to_string());
    }
    row("f-vector", format!("{:?}", r.f_vector));
    row("euler characteristic", r.euler_characteristic.to_string());
    row("components", r.components.to_string());
    row("flag links", yes_no(r.flag.ok).to_string());
    row("betti", format!("{:?}", r.homology.betti));
    let torsion: Vec<String> = r
        .homology
        .torsion
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_empty())
        .map(|(k, t)| {
            format!(
                "H{k}: {}",
                t.iter()
                    .map(|d| format!("Z/{d}"))
                    .collect::<Vec<_>>()
                    .join(" + ")
            )
        })
        .collect();
    row(
        "torsion",
        if torsion.is_empty() {
            "none".into()
        } else {
            torsion.join(", ")
        },
    );
    let s = &r.surface;
    let surface = if s.is_closed_surface {
        match (s.orientable, s.genus) {
            (Some(true), Some(g)) => format!("closed orientable, genus {g}"),
            (Some(false), _) => "closed non-orientable".to_string(),
            _ if !s.components.is_empty() => format!("{} closed components", s.components.len()),
            _ => "closed".to_string(),
        }
    } else {
        format!("no ({})", s.failure.clone().unwrap_or_default())
    };
    row("surface", surface);
    if let Some(m) = &r.morse {
        row("morse preset", m.preset.clone());
        row("morse-euler sum", m.morse_euler_sum.to_string());
        match &m.certificate {
            Certificate::Wedge(w) => {
                row(
                    "wedge certificate",
                    if w.ok {
                        "ok".into()
                    } else {
                        format!("failed ({} links)", w.failures.len())
                    },
                );
                row(
                    "link kinds",
                    format!(
                        "empty {}, contractible union {}, other {}",
                        w.summary.empty,
                        w.summary.union_of_contractible,
                        w.summary.not_contractible_union
                    ),
                );
                if let Some(rank) = w.free_rank {
                    row("free rank", rank.to_string());
                }
                for f in w.failures.iter().take(5) {
                    row(
                        "  failing vertex",
                        format!(
                            "{:?} value2 {} link {:?}",
                            f.labels, f.value2, f.link_facets
                        ),
                    );
                }
            }
            Certificate::Split(sc) => {
                let status = if sc.ok {
                    "ok".to_string()
                } else {
                    format!("failed ({:?})", sc.failure)
                };
                row("split certificate", format!("{status} at cut2 {}", sc.cut2));
                row("above cut", sc.vertices_above_cut.to_string());
                row("sublevel f-vector", format!("{:?}", sc.sublevel_f_vector));
                row("rank of free factor", sc.rank_free_factor.to_string());
                row("b2 agrees", yes_no(sc.b2_agree).to_string());
                for f in sc.failures.iter().take(5) {
                    row(
                        "  failing vertex",
                        format!("{:?} value2 {} ({})", f.labels, f.value2, f.kind),
                    );
                }
            }
            Certificate::Error { message } => row("certificate", format!("error: {message}")),
        }
    }
    for w in &r.warnings {
        row("warning", w.clone());
    }
    if let Some(c) = &r.complex {
        for (k, cells) in &c.cells {
            row(&format!("cells[{k}]"), format!("{} cubes", cells.len()));
        }
    }
}

fn cmd_reproduce(a: ReproduceArgs, budget: usize) -> Result<(), Failure> {
    let opts = ReproduceOptions {
        m_max: a.m_max,
        sun_n_max: a.sun_n_max,
        sun_rays_max: a.sun_rays_max,
        budget,
    };
    let start = Instant::now();
    let report = reproduce::run(a.target, &opts)?;
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    if a.json {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a ReproduceReport,
            options: &'a ReproduceOptions,
            engine_version: &'static str,
            timings_ms: BTreeMap<&'static str, f64>,
        }
        let out = Out {
            report: &report,
            options: &opts,
            engine_version: ENGINE_VERSION,
            timings_ms: [("total", elapsed)].into(),
        };
        outln!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        print_reproduce(&report);
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn clip(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_string()
    } else {
        let head: String = s.chars().take(width - 3).collect();
        format!("{head}...")
    }
}

fn print_reproduce(r: &ReproduceReport) {
    let name_w = r
        .checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(5)
        .clamp(5, 60);
    outln!(
        "{:<name_w$}  {:<32}  {:<32}  RESULT",
        "CHECK",
        "EXPECTED",
        "COMPUTED"
    );
    for c in &r.checks {
        outln!(
            "{:<name_w$}  {:<32}  {:<32}  {}",
            clip(&c.name, name_w),
            clip(&c.expected, 32),
            clip(&c.computed, 32),
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    for n in &r.notes {
        outln!("note: {n}");
    }
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    outln!(
        "{}: {} of {} checks pass, {}",
        r.target,
        r.checks.len() - failed,
        r.checks.len(),
        if r.pass { "PASS" } else { "FAIL" }
    );
}
