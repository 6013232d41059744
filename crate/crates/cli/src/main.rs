//! `smoothfe`: run unisolvence and exactness checks from the command line.
//!
//! Exit status is 0 when every check passes, 1 when a mathematical check
//! fails and 2 when the input is rejected before any computation.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use smoothfe_core::bernstein::TriangleGeom;
use smoothfe_core::complexes::{
    check_poly_identity, verify_complex, ComplexKind, ComplexReport, ComplexSpec, MeshSummary, Verdict, VerifyOptions,
};
use smoothfe_core::elements::{build_dofs, check_unisolvence, DofCounts, ElementSpec, Family};
use smoothfe_core::lattice::{lattice_size, SmoothnessPair};
use smoothfe_core::mesh::{test_triangles, Mesh};
use smoothfe_core::Error;

#[derive(Parser)]
#[command(
    name = "smoothfe",
    version,
    about = "Exact checks for smooth finite elements and complexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the polynomial dimension identity up to a degree.
    Identity {
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check that a DoF set determines the shape space.
    Unisolvence(UnisolvenceArgs),
    /// Assemble a complex on a mesh and decide exactness.
    Complex(ComplexArgs),
    /// List element families, complex kinds and builtin meshes.
    Catalog {
        #[command(flatten)]
        out: Output,
    },
    /// Print mesh statistics.
    MeshInfo {
        #[arg(long)]
        mesh: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct UnisolvenceArgs {
    /// Element family.
    #[arg(long)]
    family: String,
    /// Polynomial degree.
    #[arg(long)]
    k: usize,
    /// Vertex order of the first smoothness pair.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "r1")]
    rv: Option<i32>,
    /// Edge order of the first smoothness pair.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "r1")]
    re: Option<i32>,
    /// First smoothness pair as `v,e`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    r1: Option<SmoothnessPair>,
    /// Second smoothness pair as `v,e`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair, default_value = "-1,-1")]
    r2: SmoothnessPair,
    /// `ref`, `random`, or a mesh file whose triangles are all checked.
    #[arg(long, default_value = "ref")]
    triangle: String,
    /// Seed for `--triangle random`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct ComplexArgs {
    /// Complex kind.
    #[arg(long)]
    kind: String,
    /// Degree of the middle space.
    #[arg(long)]
    k: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    r0: Option<SmoothnessPair>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    r1: SmoothnessPair,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    r2: SmoothnessPair,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    r3: Option<SmoothnessPair>,
    /// `builtin:<name>` or a path to a mesh file.
    #[arg(long, default_value = "builtin:square-diagonal-1")]
    mesh: String,
    /// Treat parameters sitting on a bound as failures.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: Output,
}

fn parse_pair(s: &str) -> Result<SmoothnessPair, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command produced: a report and the names of failed checks.
struct Outcome {
    json: String,
    table: String,
    failed: Vec<String>,
}

fn input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parameter(_) | Error::Geometry(_) | Error::Topology(_) | Error::Shape(_) | Error::Parse(_)
    )
}

fn load_mesh(name: &str) -> Result<Mesh, Error> {
    if name.starts_with("builtin:") {
        return Mesh::builtin(name);
    }
    let text = std::fs::read_to_string(name).map_err(|e| Error::Parse(format!("cannot read {name}: {e}")))?;
    Mesh::load(&text)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

#[derive(Serialize)]
struct IdentityRow {
    k: usize,
    terms: [i64; 4],
    sum: i64,
}

#[derive(Serialize)]
struct IdentityReport {
    k_max: usize,
    rows: Vec<IdentityRow>,
    pass: bool,
}

fn identity(k_max: usize) -> Outcome {
    let rows: Vec<IdentityRow> = (1..=k_max)
        .map(|k| {
            let terms = [
                1,
                -(lattice_size(k + 1) as i64),
                2 * lattice_size(k) as i64,
                -(lattice_size(k - 1) as i64),
            ];
            IdentityRow {
                k,
                terms,
                sum: terms.iter().sum(),
            }
        })
        .collect();
    let pass = check_poly_identity(k_max) && rows.iter().all(|r| r.sum == 0);
    let mut table = String::from("   k      1   -P(k+1)   2P(k)   -P(k-1)   sum\n");
    for r in &rows {
        let [a, b, c, d] = r.terms;
        writeln!(table, "{:>4} {a:>6} {b:>9} {c:>7} {d:>9} {:>5}", r.k, r.sum).unwrap();
    }
    let failed = rows
        .iter()
        .filter(|r| r.sum != 0)
        .map(|r| format!("identity at k={}", r.k))
        .collect();
    let report = IdentityReport { k_max, rows, pass };
    writeln!(table, "{}", if pass { "PASS" } else { "FAIL" }).unwrap();
    Outcome {
        json: to_json(&report),
        table,
        failed,
    }
}

#[derive(Serialize)]
struct TriangleResult {
    vertices: [[String; 2]; 3],
    rows: usize,
    cols: usize,
    rank: usize,
    nonsingular: bool,
}

#[derive(Serialize)]
struct UnisolvenceReport {
    element: ElementSpec,
    triangle: String,
    counts: DofCounts,
    triangles: Vec<TriangleResult>,
    pass: bool,
}

fn triangles(arg: &str, seed: u64) -> Result<Vec<TriangleGeom>, Error> {
    match arg {
        "ref" => Ok(vec![TriangleGeom::reference()]),
        "random" => Ok(test_triangles(1, seed).split_off(1)),
        path => {
            let m = load_mesh(path)?;
            (0..m.num_triangles()).map(|t| m.cell(t).map(|c| c.geom)).collect()
        }
    }
}

fn unisolvence(a: &UnisolvenceArgs) -> Result<Outcome, Error> {
    let family = Family::parse(&a.family)?;
    let r1 = match (a.r1, a.rv, a.re) {
        (Some(r), _, _) => r,
        (None, Some(v), Some(e)) => SmoothnessPair::new(v, e),
        _ => return Err(Error::Parameter("give --r1 or both --rv and --re".into())),
    };
    let spec = ElementSpec::new(family, a.k, r1, a.r2);
    let dofs = build_dofs(&spec)?;
    let mut results = Vec::new();
    let mut table = format!(
        "{spec}\ncounts per vertex/edge/interior: {}/{}/{}\n",
        dofs.counts().vertex,
        dofs.counts().edge,
        dofs.counts().interior
    );
    let mut failed = Vec::new();
    for (i, t) in triangles(&a.triangle, a.seed)?.iter().enumerate() {
        let v = check_unisolvence(&dofs, t)?;
        let ok = v.square && v.nonsingular;
        writeln!(
            table,
            "triangle {i}: {}×{} {} (rank {})",
            v.rows,
            v.cols,
            if ok { "nonsingular" } else { "singular" },
            v.rank
        )
        .unwrap();
        if !ok {
            failed.push(format!("unisolvence on triangle {i}"));
        }
        results.push(TriangleResult {
            vertices: t.vertices.clone().map(|p| p.map(|c| c.to_string())),
            rows: v.rows,
            cols: v.cols,
            rank: v.rank,
            nonsingular: ok,
        });
    }
    let pass = failed.is_empty();
    writeln!(table, "{}", if pass { "PASS" } else { "FAIL" }).unwrap();
    let report = UnisolvenceReport {
        element: spec,
        triangle: a.triangle.clone(),
        counts: dofs.counts(),
        triangles: results,
        pass,
    };
    Ok(Outcome {
        json: to_json(&report),
        table,
        failed,
    })
}

fn complex_table(r: &ComplexReport) -> String {
    let s = &r.spec;
    let mut out = format!("complex {} k={} r1={} r2={}", s.kind, s.k, s.r1, s.r2);
    if let Some(r0) = s.r0 {
        write!(out, " r0={r0}").unwrap();
    }
    if let Some(r3) = s.r3 {
        write!(out, " r3={r3}").unwrap();
    }
    writeln!(out, " on {}", s.mesh).unwrap();
    let m = &r.mesh;
    writeln!(
        out,
        "mesh: {} vertices, {} edges, {} triangles, euler characteristic {}, {} boundary loops",
        m.vertices, m.edges, m.triangles, m.euler_characteristic, m.boundary_loops
    )
    .unwrap();
    let dims: Vec<String> = r.dims().iter().map(|d| d.to_string()).collect();
    writeln!(out, "dims: {}", dims.join("/")).unwrap();
    for sp in &r.spaces {
        write!(out, "  space {}: dim {}", sp.label, sp.dim).unwrap();
        if let Some([v, e, i]) = sp.per_entity {
            write!(out, " (per vertex {v}, per edge {e}, per triangle {i})").unwrap();
        }
        out.push('\n');
    }
    for op in &r.operators {
        writeln!(
            out,
            "  map {}: {}×{}, rank {}, nullity {}",
            op.label, op.rows, op.cols, op.rank, op.nullity
        )
        .unwrap();
    }
    let k = &r.kernel;
    writeln!(
        out,
        "kernel: {:?} expected {} observed {}",
        k.generators, k.expected, k.observed
    )
    .unwrap();
    for l in &r.links {
        writeln!(out, "  at space {}: image {}, kernel {}", l.space, l.image, l.kernel).unwrap();
    }
    writeln!(out, "alternating sum: {}", r.alternating_sum).unwrap();
    if let Some(b) = r.betti_obstruction {
        writeln!(out, "betti obstruction: {b}").unwrap();
    }
    for w in &r.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    for c in &r.checks {
        writeln!(out, "  {:<24} {}", c.name, if c.pass { "PASS" } else { "FAIL" }).unwrap();
    }
    let verdict = match r.verdict {
        Verdict::Exact => "exact",
        Verdict::NotExact => "not exact",
        Verdict::NotApplicable => "not applicable (mesh is not simply connected)",
    };
    writeln!(out, "verdict: {verdict}").unwrap();
    out
}

fn complex(a: &ComplexArgs) -> Result<Outcome, Error> {
    let spec = ComplexSpec {
        kind: ComplexKind::parse(&a.kind)?,
        k: a.k,
        r0: a.r0,
        r1: a.r1,
        r2: a.r2,
        r3: a.r3,
        mesh: a.mesh.clone(),
    };
    let mesh = load_mesh(&a.mesh)?;
    let opts = VerifyOptions {
        strict: a.strict,
        ..Default::default()
    };
    let report = verify_complex(&spec, &mesh, &opts)?;
    let failed = match report.verdict {
        Verdict::Exact => Vec::new(),
        // Only the composition check is meaningful off simply connected meshes.
        Verdict::NotApplicable => report
            .checks
            .iter()
            .filter(|c| c.name == "zero_compositions" && !c.pass)
            .map(|c| c.name.clone())
            .collect(),
        Verdict::NotExact => report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect(),
    };
    Ok(Outcome {
        json: to_json(&report),
        table: complex_table(&report),
        failed,
    })
}

#[derive(Serialize)]
struct Catalog {
    families: Vec<&'static str>,
    kinds: Vec<&'static str>,
    meshes: Vec<&'static str>,
}

const BUILTIN_MESHES: [&str; 4] = [
    "builtin:reference-triangle",
    "builtin:square-diagonal-N",
    "builtin:square-crisscross-N",
    "builtin:square-annulus",
];

fn catalog() -> Outcome {
    let c = Catalog {
        families: Family::ALL.iter().map(|f| f.name()).collect(),
        kinds: ComplexKind::ALL.iter().map(|k| k.name()).collect(),
        meshes: BUILTIN_MESHES.to_vec(),
    };
    let table = format!(
        "families: {}\nkinds: {}\nmeshes: {}\n",
        c.families.join(", "),
        c.kinds.join(", "),
        c.meshes.join(", ")
    );
    Outcome {
        json: to_json(&c),
        table,
        failed: Vec::new(),
    }
}

#[derive(Serialize)]
struct MeshInfo {
    mesh: String,
    summary: MeshSummary,
    simply_connected: bool,
    boundary_edges: usize,
}

fn mesh_info(name: &str) -> Result<Outcome, Error> {
    let m = load_mesh(name)?;
    let info = MeshInfo {
        mesh: name.to_string(),
        summary: MeshSummary::of(&m),
        simply_connected: m.is_simply_connected(),
        boundary_edges: (0..m.num_edges()).filter(|&e| m.is_boundary_edge(e)).count(),
    };
    let s = &info.summary;
    let table = format!(
        "{}\nvertices {}\nedges {} ({} on the boundary)\ntriangles {}\neuler characteristic {}\nboundary loops {}\nsimply connected {}\n",
        info.mesh,
        s.vertices,
        s.edges,
        info.boundary_edges,
        s.triangles,
        s.euler_characteristic,
        s.boundary_loops,
        info.simply_connected
    );
    Ok(Outcome {
        json: to_json(&info),
        table,
        failed: Vec::new(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format) = match &cli.command {
        Command::Identity { k_max, out } => (Ok(identity(*k_max)), out.format),
        Command::Unisolvence(a) => (unisolvence(a), a.out.format),
        Command::Complex(a) => (complex(a), a.out.format),
        Command::Catalog { out } => (Ok(catalog()), out.format),
        Command::MeshInfo { mesh, out } => (mesh_info(mesh), out.format),
    };
    match result {
        Ok(o) => {
            print!(
                "{}",
                match format {
                    Format::Json => &o.json,
                    Format::Table => &o.table,
                }
            );
            if o.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed: {}", o.failed.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if input_error(&e) { 2 } else { 1 })
        }
    }
}
