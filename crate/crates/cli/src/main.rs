use std::path::{Path, PathBuf};
use std::process::ExitCode;

use branchgrid::catalog::{lookup, CATALOG};
use branchgrid::grid::{Half, Side, StabilizeVariant};
use branchgrid::maps::stabilization::SUPPORTED;
use branchgrid::pipeline::{self, MoveReport};
use branchgrid::{parse_grid, Axis, Error, GridDiagram, GridError, HomologyReport, Ring};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

// a closed pipe (as in `| head`) is not an error
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "branchgrid",
    version,
    about = "Knot Floer homology of lifted knots in cyclic branched covers, from grid diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homology of the lifted complex
    Compute(ComputeArgs),
    /// Check the chain maps of a grid move
    Verify(VerifyArgs),
    /// Apply one grid move and print the resulting grid file
    Move(MoveArgs),
    /// List the built-in diagrams, or print one as a grid file
    Catalog { name: Option<String> },
    /// Quick consistency checks on the built-in diagrams
    Selftest,
}

#[derive(Args)]
struct Input {
    /// built-in diagram name
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    knot: Option<String>,
    /// grid file
    #[arg(long)]
    grid: Option<PathBuf>,
    /// number of sheets of the cover
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    sheets: u32,
    #[arg(long, value_enum, default_value_t = RingArg::F2)]
    ring: RingArg,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: Input,
    /// solve the signs twice in different orders and compare (Z only)
    #[arg(long)]
    verify_gauge: bool,
    #[arg(long, env = "BRANCHGRID_CACHE")]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct MoveSpec {
    #[arg(long = "move", value_enum)]
    kind: MoveKind,
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    #[arg(long, allow_negative_numbers = true)]
    shift: Option<i64>,
    #[arg(long)]
    column: Option<usize>,
    #[arg(long)]
    row: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    spec: MoveSpec,
    /// for stabilize: the stabilized grid file, instead of --row
    #[arg(long, conflicts_with = "row")]
    stabilized: Option<PathBuf>,
}

#[derive(Args)]
struct MoveArgs {
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    knot: Option<String>,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[command(flatten)]
    spec: MoveSpec,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
    #[arg(long, value_enum, default_value_t = HalfArg::Upper)]
    x_half: HalfArg,
    /// write here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RingArg {
    F2,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MoveKind {
    Cyclic,
    Commute,
    Stabilize,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Row,
    Column,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum HalfArg {
    Lower,
    Upper,
}

impl RingArg {
    fn ring(self) -> Ring {
        match self {
            RingArg::F2 => Ring::F2,
            RingArg::Z => Ring::Z,
        }
    }
}

impl AxisArg {
    fn axis(self) -> Axis {
        match self {
            AxisArg::Row => Axis::Row,
            AxisArg::Column => Axis::Column,
        }
    }
}

/// Failures, each with its exit code.
enum Failure {
    Input(String),
    Precondition(String),
    Verification,
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Grid(
                GridError::NotCommutable { .. }
                | GridError::BadIndex { .. }
                | GridError::NotDestabilizable { .. }
                | GridError::NotAStabilizationPair,
            ) => Failure::Precondition(e.to_string()),
            Error::Unsupported(_) => Failure::Precondition(e.to_string()),
            Error::Grid(_) | Error::TooLarge { .. } => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Verification => 4,
            Failure::Internal(_) => 5,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => compute(&a),
        Command::Verify(a) => verify(&a),
        Command::Move(a) => apply_move(&a),
        Command::Catalog { name } => catalog(name.as_deref()),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(s) | Failure::Precondition(s) | Failure::Internal(s) => {
                    eprintln!("error: {s}")
                }
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}

/// The diagram and the name it is reported under.
fn load(knot: Option<&str>, grid: Option<&Path>) -> Result<(GridDiagram, String), Failure> {
    if let Some(name) = knot {
        let g = lookup(name)
            .ok_or_else(|| Failure::Input(format!("no catalog entry named {name:?}")))?;
        return Ok((g, name.to_string()));
    }
    let path = grid.expect("clap requires one of --knot and --grid");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let g = parse_grid(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok((g, name))
}

fn cache_key(g: &GridDiagram, m: usize, ring: Ring) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}\nm={m}\nring={ring}\n", g.canonical_form()));
    hex::encode(h.finalize())
}

fn compute(a: &ComputeArgs) -> Result<(), Failure> {
    let (g, name) = load(a.input.knot.as_deref(), a.input.grid.as_deref())?;
    let (m, ring) = (a.input.sheets as usize, a.input.ring.ring());
    let cache = if a.no_cache {
        None
    } else {
        a.cache_dir
            .as_ref()
            .map(|d| d.join(format!("{}.json", cache_key(&g, m, ring))))
    };
    let cached: Option<HomologyReport> = cache
        .as_ref()
        .and_then(|p| std::fs::read_to_string(p).ok())
        .and_then(|s| serde_json::from_str(&s).ok());
    let hit = cached.is_some();
    let mut report = match cached {
        Some(r) if !a.verify_gauge => r,
        _ => {
            let c = pipeline::compute(&g, m, ring)?;
            if a.verify_gauge {
                if ring != Ring::Z {
                    return Err(Failure::Input("--verify-gauge needs --ring z".into()));
                }
                let gauge = pipeline::verify_gauge(&c.complex)?;
                eprintln!(
                    "gauge witness: {}, exact transform: {}, same homology: {}",
                    gauge.witness, gauge.transforms, gauge.same_homology
                );
                if !gauge.all() {
                    return Err(Failure::Verification);
                }
            }
            c.homology.to_report("", g.n(), m)
        }
    };
    if let (Some(path), false) = (&cache, hit) {
        // the cache is an optimisation; a failed write is not an error
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        let _ = std::fs::write(
            path,
            serde_json::to_string(&report).expect("reports serialize"),
        );
    }
    report.knot = name;
    match a.input.output {
        Output::Json => say!(
            "{}",
            serde_json::to_string_pretty(&report).expect("reports serialize")
        ),
        Output::Text => say_raw!("{}", homology_text(&report)),
    }
    Ok(())
}

fn homology_text(r: &HomologyReport) -> String {
    let mut s = format!("{}  n={}  m={}  ring={}\n", r.knot, r.n, r.m, r.ring);
    let total: usize = r
        .blocks
        .iter()
        .flat_map(|b| &b.levels)
        .map(|l| l.rank)
        .sum();
    let torsion: usize = r
        .blocks
        .iter()
        .flat_map(|b| &b.levels)
        .map(|l| l.torsion.len())
        .sum();
    s += &format!("total rank {total}, torsion summands {torsion}\n");
    for b in &r.blocks {
        let levels: Vec<String> = b
            .levels
            .iter()
            .map(|l| {
                if l.torsion.is_empty() {
                    format!("{}:{}", l.level, l.rank)
                } else {
                    format!("{}:{}+{:?}", l.level, l.rank, l.torsion)
                }
            })
            .collect();
        s += &format!(
            "A={} component {}  {}\n",
            b.alexander,
            b.component,
            levels.join(" ")
        );
    }
    s
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let (g, _) = load(a.input.knot.as_deref(), a.input.grid.as_deref())?;
    let (m, ring) = (a.input.sheets as usize, a.input.ring.ring());
    let n = g.n() as i64;
    let sp = &a.spec;
    let mut reports: Vec<MoveReport> = Vec::new();
    match sp.kind {
        MoveKind::Cyclic => {
            let axes = match sp.axis {
                Some(x) => vec![x.axis()],
                None => vec![Axis::Row, Axis::Column],
            };
            let shifts: Vec<i64> = match sp.shift {
                Some(s) => vec![s],
                None => (1..n).collect(),
            };
            for &axis in &axes {
                for &s in &shifts {
                    reports.push(pipeline::verify_cyclic(&g, m, ring, axis, s)?);
                }
            }
        }
        MoveKind::Commute => {
            let columns: Vec<usize> = match sp.column {
                Some(j) => vec![j],
                None => (0..g.n()).filter(|&j| g.is_commutable(j)).collect(),
            };
            if columns.is_empty() {
                return Err(Failure::Precondition(
                    "no pair of adjacent columns is commutable".into(),
                ));
            }
            for j in columns {
                reports.push(pipeline::verify_commute(&g, m, ring, j)?);
            }
        }
        MoveKind::Stabilize => {
            let row = match &a.stabilized {
                Some(path) => {
                    let (h, _) = load(None, Some(path))?;
                    (0..g.n())
                        .find(|&r| g.stabilize(r, SUPPORTED).is_ok_and(|s| s.result == h))
                        .ok_or(Failure::from(Error::Grid(GridError::NotAStabilizationPair)))?
                }
                None => sp.row.unwrap_or(0),
            };
            reports.push(pipeline::verify_stabilize(&g, m, ring, row)?);
        }
    }
    match a.input.output {
        Output::Json => say!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("reports serialize")
        ),
        Output::Text => {
            for r in &reports {
                say!(
                    "{} n={} m={} ring={}: {}",
                    r.kind,
                    r.n,
                    r.m,
                    r.ring,
                    if r.passed() { "pass" } else { "FAIL" }
                );
                for c in &r.checks {
                    let tag = if c.passed {
                        "pass"
                    } else if c.required {
                        "FAIL"
                    } else {
                        "fail (not required)"
                    };
                    say!("  {tag:<20} {}", c.name);
                }
                if let Some((x, z)) = &r.counterexample {
                    say!("  counterexample: {x:?} -> {z:?}");
                }
            }
        }
    }
    if reports.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn apply_move(a: &MoveArgs) -> Result<(), Failure> {
    let (g, _) = load(a.knot.as_deref(), a.grid.as_deref())?;
    let sp = &a.spec;
    let missing = |flag: &str| Failure::Input(format!("this move needs --{flag}"));
    let h = match sp.kind {
        MoveKind::Cyclic => g.cyclic_permute(
            sp.axis.ok_or_else(|| missing("axis"))?.axis(),
            sp.shift.ok_or_else(|| missing("shift"))?,
        ),
        MoveKind::Commute => g
            .commute(sp.column.ok_or_else(|| missing("column"))?)
            .map_err(Error::from)?,
        MoveKind::Stabilize => {
            let side = match a.side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            let x_half = match a.x_half {
                HalfArg::Lower => Half::Lower,
                HalfArg::Upper => Half::Upper,
            };
            g.stabilize(
                sp.row.ok_or_else(|| missing("row"))?,
                StabilizeVariant { side, x_half },
            )
            .map_err(Error::from)?
            .result
        }
    };
    let text = h.to_file_string();
    match &a.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => say_raw!("{text}"),
    }
    Ok(())
}

fn catalog(name: Option<&str>) -> Result<(), Failure> {
    match name {
        Some(name) => {
            let g = lookup(name)
                .ok_or_else(|| Failure::Input(format!("no catalog entry named {name:?}")))?;
            say_raw!("{}", g.to_file_string());
        }
        None => {
            for e in CATALOG {
                let g = lookup(e.name).expect("catalog grids are valid");
                say!("{:<10} {:<13} n={}  {}", e.name, e.knot, g.n(), e.note);
            }
        }
    }
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let mut ok = true;
    let mut line = |name: &str, pass: bool| {
        say!("{} {name}", if pass { "pass" } else { "FAIL" });
        ok &= pass;
    };
    for name in ["unknot2", "unknot3", "trefoil5"] {
        let g = lookup(name).expect("catalog entry");
        for m in [1, 2] {
            let f2 = pipeline::compute(&g, m, Ring::F2)?.homology;
            let z = pipeline::compute(&g, m, Ring::Z)?.homology;
            line(
                &format!("{name} m={m}: differentials square to zero, universal coefficients"),
                pipeline::universal_coefficients_hold(&f2, &z),
            );
        }
    }
    let u = lookup("unknot2").expect("catalog entry");
    let h = pipeline::compute(&u, 1, Ring::F2)?.homology;
    line("unknot2 m=1: total dimension 2", h.total_rank() == 2);
    let t = lookup("trefoil5").expect("catalog entry");
    line(
        "trefoil5 m=2: cyclic row move over Z",
        pipeline::verify_cyclic(&t, 2, Ring::Z, Axis::Row, 1)?.passed(),
    );
    line(
        "unknot4c m=2: commutation at column 0 over Z",
        pipeline::verify_commute(&lookup("unknot4c").expect("catalog entry"), 2, Ring::Z, 0)?
            .passed(),
    );
    line(
        "unknot2 m=2: stabilization over Z",
        pipeline::verify_stabilize(&u, 2, Ring::Z, 0)?.passed(),
    );
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
