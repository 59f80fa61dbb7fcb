use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use veerweave::carry::{
    carried_surface, efficient_position, flip_up, flip_walk, thurston_norm, Completion, NormOutcome,
};
use veerweave::cover::{cover_signature, cyclic_cover, lift};
use veerweave::cusp::{build_cusps, tube_report, Cusps, TubeSystem};
use veerweave::flowgraph::{cone_face, cone_membership, verify_certificate, Ambient, ConeCertificate};
use veerweave::homology::{
    check_cocycle, filled_subspace_check, homology_summary, restrict_to_cusp, same_class, Cocycle, HomologySummary,
};
use veerweave::linalg::gcd_i64 as gcd;
use veerweave::transverse::{
    blowup_graph, transversality_report, transversality_report_for_weights, ArcSystem, BlowupGraph, Verdict,
};
use veerweave::{parse_triangulation, validate, Error, VeeringTriangulation};

const FORMAT_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "veerweave",
    about = "Combinatorics of veering triangulations",
    disable_version_flag = true
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Tie-breaking seed for the cone solver.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print library and format versions.
    #[arg(long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct ClassArgs {
    /// Class coordinates in the printed H^1 basis, e.g. "1,-2" or "1/2,1".
    #[arg(long, allow_hyphen_values = true)]
    class: Option<String>,
    /// A raw cocycle as a JSON array of face weights (or @file).
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
}

#[derive(Args, Clone)]
struct TubeArgs {
    /// Tube system file; every cusp is hollow if omitted.
    #[arg(long)]
    tubes: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmbientArg {
    Cusped,
    Filled,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file describes a veering triangulation.
    Validate { file: PathBuf },
    /// Cusps, ladders and the (lambda, rho) basis of each cusp torus.
    #[command(alias = "cusp-basis")]
    Cusps { file: PathBuf },
    /// Prongs, indices and strictness of a tube system.
    Tubes {
        file: PathBuf,
        #[command(flatten)]
        tubes: TubeArgs,
    },
    /// Betti number, torsion and basis cocycles.
    Homology { file: PathBuf },
    /// Decide membership in the cone of carried classes, with a certificate.
    Cone {
        file: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        tubes: TubeArgs,
        #[arg(long, value_enum, default_value = "cusped")]
        ambient: AmbientArg,
    },
    /// Extreme rays and lineality of the cone spanned by dual-graph cycles.
    ConeFace {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[command(flatten)]
        tubes: TubeArgs,
        #[arg(long, value_enum, default_value = "cusped")]
        ambient: AmbientArg,
    },
    /// Thurston norm of a class in the carried cone.
    Norm {
        file: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        tubes: TubeArgs,
    },
    /// The carried surface of nonnegative weights.
    Carry {
        file: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        tubes: TubeArgs,
        /// innermost-plus, innermost-minus, or a JSON map cusp -> pairs.
        #[arg(long, default_value = "innermost-plus")]
        completion: String,
        /// Apply annulus moves until none is available.
        #[arg(long)]
        efficient: bool,
    },
    /// Push a carried surface up through a tetrahedron, or walk upward.
    Flip {
        file: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        tubes: TubeArgs,
        #[arg(long)]
        tet: Option<usize>,
        /// Flip the lowest available tet repeatedly, up to this many steps.
        #[arg(long)]
        walk: Option<usize>,
    },
    /// Honest or almost transversality of the carried representative.
    Transverse {
        file: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        tubes: TubeArgs,
        #[arg(long, default_value = "innermost-plus")]
        completion: String,
        /// Use nonnegative --weights as the surface instead of the solver's witness.
        #[arg(long)]
        as_surface: bool,
    },
    /// Blowup graph of an arc system.
    Blowup {
        #[arg(long)]
        arcs: PathBuf,
        /// Also print the graph in DOT format.
        #[arg(long)]
        dot: bool,
    },
    /// Cone membership on a punctured triangulation, read as the criterion
    /// for a Birkhoff section in the class.
    Birkhoff {
        file: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Lift to a finite cover given by face labels.
    #[command(hide = true)]
    Cover {
        file: PathBuf,
        /// Cyclic labels as a JSON array, with --degree.
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        /// Per-face permutations as a JSON array of arrays.
        #[arg(long)]
        perms: Option<String>,
    },
    /// List fixtures with their tets, cusps, betti number and torsion.
    #[command(hide = true)]
    Fixtures,
}

/// Exit statuses: 0 success or positive verdict, 2 negative verdict, 1 error.
enum Outcome {
    Positive,
    Negative,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.version {
        emit(&format!(
            "veerweave {} (library {}, format {FORMAT_VERSION})",
            env!("CARGO_PKG_VERSION"),
            veerweave::VERSION
        ));
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command.as_ref() else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(1);
    };
    match run(&cli, command) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(2),
        Err(e) => {
            if cli.json {
                emit(&json!({"error": e.to_string()}).to_string());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
    }
}

fn fixture_dir() -> PathBuf {
    std::env::var_os("VEERWEAVE_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"))
}

/// A path as given, or else a fixture name looked up in the fixture directory.
fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    let dir = fixture_dir();
    let direct = dir.join(path);
    if direct.exists() {
        return direct;
    }
    let with_ext = dir.join(path).with_extension("vtri");
    if with_ext.exists() {
        return with_ext;
    }
    path.to_path_buf()
}

fn read(path: &Path) -> Result<String, Error> {
    let p = resolve(path);
    std::fs::read_to_string(&p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))
}

fn load(path: &Path) -> Result<VeeringTriangulation, Error> {
    VeeringTriangulation::from_vtri(&read(path)?)
}

fn load_tubes(args: &TubeArgs, cusps: &Cusps) -> Result<TubeSystem, Error> {
    match &args.tubes {
        Some(p) => TubeSystem::parse(&read(p)?, cusps.len()),
        None => Ok(TubeSystem::all_hollow(cusps.len())),
    }
}

/// Write a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn print(cli: &Cli, value: &Value, human: &str) {
    if cli.json {
        emit(&serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        emit(human.trim_end());
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_json_ints(text: &str) -> Result<Vec<i64>, Error> {
    let text = match text.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => text.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Class coordinates, possibly rational, cleared to integers by their
/// least common denominator.
fn parse_coordinates(text: &str) -> Result<(Vec<i64>, i64), Error> {
    let mut fractions = Vec::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let (n, d) = match tok.split_once('/') {
            Some((n, d)) => (n, d),
            None => (tok, "1"),
        };
        let bad = || Error::Input(format!("bad class coordinate {tok:?}"));
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        let g = gcd(n, d).max(1) * d.signum();
        fractions.push((n / g, d / g));
    }
    let scale = fractions.iter().fold(1i64, |l, &(_, d)| l / gcd(l, d) * d);
    Ok((fractions.iter().map(|&(n, d)| n * (scale / d)).collect(), scale))
}

struct Class {
    weights: Cocycle,
    /// The weights represent `scale` times the requested class.
    scale: i64,
    coords: Option<Vec<i64>>,
}

fn class_of(
    tri: &VeeringTriangulation,
    h: &HomologySummary,
    args: &ClassArgs,
    basis: Option<&[Cocycle]>,
) -> Result<Class, Error> {
    match (&args.class, &args.weights) {
        (Some(_), Some(_)) => Err(Error::Input("give either --class or --weights".into())),
        (None, None) => Err(Error::Input("a class is required (--class or --weights)".into())),
        (None, Some(w)) => {
            let w = parse_json_ints(w)?;
            if w.len() != tri.num_faces() {
                return Err(Error::Input(format!(
                    "{} weights given, the triangulation has {} faces",
                    w.len(),
                    tri.num_faces()
                )));
            }
            check_cocycle(tri, &w)?;
            Ok(Class {
                weights: Cocycle(w),
                scale: 1,
                coords: None,
            })
        }
        (Some(c), None) => {
            let (coords, scale) = parse_coordinates(c)?;
            let weights = match basis {
                None => h.from_coordinates(tri, &coords)?,
                Some(b) => {
                    if coords.len() != b.len() {
                        return Err(Error::Input(format!(
                            "{} coordinates given, the ambient basis has rank {}",
                            coords.len(),
                            b.len()
                        )));
                    }
                    let mut w = Cocycle::zero(tri.num_faces());
                    for (k, v) in coords.iter().zip(b) {
                        w = w.add(&v.scale(*k));
                    }
                    w
                }
            };
            Ok(Class {
                weights,
                scale,
                coords: Some(coords),
            })
        }
    }
}

fn fraction(n: i64, d: i64) -> String {
    let g = gcd(n, d).max(1);
    let (n, d) = (n / g, d / g);
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn parse_completion(text: &str) -> Result<Completion, Error> {
    match text {
        "innermost-plus" | "plus" => Ok(Completion::InnermostPlus),
        "innermost-minus" | "minus" => Ok(Completion::InnermostMinus),
        other => {
            let text = match other.strip_prefix('@') {
                Some(p) => read(Path::new(p))?,
                None => other.to_string(),
            };
            let map = serde_json::from_str(&text).map_err(|e| Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            Ok(Completion::Explicit(map))
        }
    }
}

fn cert_summary(cert: &ConeCertificate) -> String {
    match cert {
        ConeCertificate::Member { weights, .. } => format!("member: nonnegative representative {:?}", weights.0),
        ConeCertificate::NonMember { cycle, pairing, .. } => {
            format!("not a member: the dual-graph cycle through faces {cycle:?} pairs to {pairing}")
        }
    }
}

fn run(cli: &Cli, command: &Command) -> Result<Outcome, Error> {
    match command {
        Command::Validate { file } => cmd_validate(cli, file),
        Command::Cusps { file } => cmd_cusps(cli, file),
        Command::Tubes { file, tubes } => {
            let tri = load(file)?;
            let cusps = build_cusps(&tri)?;
            let ts = load_tubes(tubes, &cusps)?;
            let report = tube_report(&cusps, &ts)?;
            let mut human = String::new();
            for e in &report.cusps {
                human += &format!("cusp {}: {:?}, {} upward ladders", e.id, e.kind, e.up_ladders);
                if let (Some(m), Some(p), Some(i)) = (e.meridian, e.prongs, e.index) {
                    human += &format!(", meridian {m:?}, {p} prongs, index {i}");
                }
                human += "\n";
            }
            human += &format!("strict: {}\n", report.strict);
            print(cli, &to_value(&report), &human);
            Ok(Outcome::Positive)
        }
        Command::Homology { file } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let human = format!(
                "betti_1 = {}\ntorsion = {:?}\nbasis:\n{}",
                h.betti_1,
                h.torsion,
                h.basis.iter().map(|b| format!("  {:?}\n", b.0)).collect::<String>()
            );
            print(cli, &to_value(&h), &human);
            Ok(Outcome::Positive)
        }
        Command::Cone {
            file,
            class,
            tubes,
            ambient,
        } => cmd_cone(cli, file, class, tubes, *ambient),
        Command::ConeFace {
            file,
            cap,
            tubes,
            ambient,
        } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let cusps = build_cusps(&tri)?;
            let ts = load_tubes(tubes, &cusps)?;
            let amb = match ambient {
                AmbientArg::Cusped => Ambient::Cusped,
                AmbientArg::Filled => Ambient::Filled,
            };
            let face = cone_face(&tri, &h, &cusps, &ts, amb, *cap)?;
            let human = format!(
                "dimension {}, {} cycle generators, lineality {}\nextreme rays:\n{}",
                face.dimension,
                face.generators,
                face.lineality_dim,
                face.extreme_rays
                    .iter()
                    .map(|r| format!("  {r:?}\n"))
                    .collect::<String>()
            );
            print(cli, &to_value(&face), &human);
            Ok(Outcome::Positive)
        }
        Command::Norm { file, class, tubes } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let cusps = build_cusps(&tri)?;
            let ts = load_tubes(tubes, &cusps)?;
            let c = class_of(&tri, &h, class, None)?;
            match thurston_norm(&tri, &cusps, &ts, &c.weights.0, cli.seed)? {
                NormOutcome::Norm(r) => {
                    let x = r.gamma_graph - 2 * r.gamma_cores;
                    let value = fraction(x, 2 * c.scale);
                    let out = json!({
                        "result": "norm",
                        "value": value,
                        "class_scale": c.scale,
                        "gamma_graph": r.gamma_graph,
                        "gamma_cores": r.gamma_cores,
                        "certificate": to_value(&r.certificate),
                    });
                    let human = format!(
                        "x(u) = {value}\n<Gamma,u> = {}, <gamma,u> = {}\nrealized by weights {:?} (chi = {})",
                        r.gamma_graph, r.gamma_cores, r.certificate.weights.0, r.certificate.euler_char
                    );
                    print(cli, &out, &human);
                    Ok(Outcome::Positive)
                }
                NormOutcome::OffCone { certificate } => {
                    let out = json!({"result": "off_cone", "certificate": to_value(&certificate)});
                    let human = format!("class is outside the carried cone\n{}", cert_summary(&certificate));
                    print(cli, &out, &human);
                    Ok(Outcome::Negative)
                }
            }
        }
        Command::Carry {
            file,
            class,
            tubes,
            completion,
            efficient,
        } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let cusps = build_cusps(&tri)?;
            let ts = load_tubes(tubes, &cusps)?;
            let c = class_of(&tri, &h, class, None)?;
            let comp = parse_completion(completion)?;
            let mut surface = carried_surface(&tri, &cusps, &ts, &c.weights.0, &comp)?;
            let mut moves = Vec::new();
            if *efficient {
                let e = efficient_position(&tri, &cusps, &ts, &surface)?;
                surface = e.surface;
                moves = e.moves;
            }
            let mut out = to_value(&surface);
            if *efficient {
                out["annulus_moves"] = to_value(&moves);
            }
            let mut human = format!(
                "chi = {} (total weight {}, edge sum {}, meridian disks {})\n",
                surface.euler_char, surface.total_weight, surface.euler.edge_sum, surface.euler.gamma_cores
            );
            for d in &surface.cusps {
                human += &format!(
                    "cusp {}: restriction {:?}, {} curves, {} ladderpole pairs, {} boundary-crossing, {} meridian disks\n",
                    d.id,
                    d.restriction,
                    d.components.len(),
                    d.ladderpole_pairs,
                    d.boundary_crossing,
                    d.meridian_disks
                );
            }
            print(cli, &out, &human);
            Ok(Outcome::Positive)
        }
        Command::Flip {
            file,
            class,
            tubes,
            tet,
            walk,
        } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let cusps = build_cusps(&tri)?;
            let ts = load_tubes(tubes, &cusps)?;
            let c = class_of(&tri, &h, class, None)?;
            let w = &c.weights.0;
            match (tet, walk) {
                (Some(t), None) => {
                    let before = carried_surface(&tri, &cusps, &ts, w, &Completion::default())?;
                    let next = flip_up(&tri, w, *t)?;
                    let after = carried_surface(&tri, &cusps, &ts, &next.0, &Completion::default())?;
                    let restrictions_equal = cusps
                        .cusps
                        .iter()
                        .all(|k| restrict_to_cusp(k, w) == restrict_to_cusp(k, &next.0));
                    let out = json!({
                        "tet": t,
                        "before": w,
                        "after": next.0,
                        "same_class": same_class(&tri, w, &next.0),
                        "total_weight": [before.total_weight, after.total_weight],
                        "euler_char": [before.euler_char, after.euler_char],
                        "restrictions_equal": restrictions_equal,
                    });
                    let human = format!(
                        "{:?} -> {:?}\nsame class: {}, total weight {} -> {}, chi {} -> {}",
                        w,
                        next.0,
                        same_class(&tri, w, &next.0),
                        before.total_weight,
                        after.total_weight,
                        before.euler_char,
                        after.euler_char
                    );
                    print(cli, &out, &human);
                    Ok(Outcome::Positive)
                }
                (None, Some(n)) => {
                    let walk = flip_walk(&tri, w, *n)?;
                    let human = match (walk.cycle_start, walk.cycle_length) {
                        (Some(s), Some(l)) => format!("flips {:?}\nrevisits step {s} after {l} flips", walk.flips),
                        _ if walk.stuck => format!("flips {:?}\nno flip available", walk.flips),
                        _ => format!("flips {:?}\nno repeat within {n} steps", walk.flips),
                    };
                    print(cli, &to_value(&walk), &human);
                    Ok(Outcome::Positive)
                }
                _ => Err(Error::Input("give exactly one of --tet and --walk".into())),
            }
        }
        Command::Transverse {
            file,
            class,
            tubes,
            completion,
            as_surface,
        } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let cusps = build_cusps(&tri)?;
            let ts = load_tubes(tubes, &cusps)?;
            let c = class_of(&tri, &h, class, None)?;
            let comp = parse_completion(completion)?;
            let report = if *as_surface {
                transversality_report_for_weights(&tri, &cusps, &ts, &c.weights.0, &comp)?
            } else {
                transversality_report(&tri, &cusps, &ts, &c.weights.0, cli.seed, &comp)?
            };
            let verdict = match report.verdict {
                Verdict::Honest if report.empty_class => "honest (empty class)",
                Verdict::Honest => "honest",
                Verdict::Almost => "almost transverse",
                Verdict::NotTransverse => "not transverse",
            };
            let mut human = format!("verdict: {verdict}\n");
            for t in &report.tubes {
                human += &format!(
                    "tube {}: {} ladderpole pairs, {} after annulus moves{}\n",
                    t.cusp,
                    t.pairs_before,
                    t.pairs_after,
                    match &t.blowup {
                        Some(g) => format!(
                            ", blowup graph with {} vertices and {} edges",
                            g.vertices.len(),
                            g.edges.len()
                        ),
                        None => String::new(),
                    }
                );
            }
            if report.verdict == Verdict::NotTransverse {
                human += &cert_summary(&report.certificate);
                human += "\n";
            }
            if let Some(n) = &report.note {
                human += n;
            }
            print(cli, &to_value(&report), &human);
            Ok(if report.verdict == Verdict::NotTransverse {
                Outcome::Negative
            } else {
                Outcome::Positive
            })
        }
        Command::Blowup { arcs, dot } => {
            let sys = ArcSystem::parse(&read(arcs)?)?;
            let g = blowup_graph(&sys)?;
            let mut out = to_value(&g);
            if *dot {
                out["dot"] = Value::String(to_dot(&g));
            }
            let mut human = if g.needs_blowup {
                format!("blowup graph: {} vertices, {} edges\n", g.vertices.len(), g.edges.len())
            } else {
                "no blowup is necessary\n".to_string()
            };
            for (i, v) in g.vertices.iter().enumerate() {
                human += &format!(
                    "  v{i}: prongs {:?}{}\n",
                    v.prongs,
                    if v.circle { " (circle)" } else { "" }
                );
            }
            for e in &g.edges {
                human += &format!("  v{} -> v{} ({:?})\n", e.from, e.to, e.kind);
            }
            if *dot {
                human += &to_dot(&g);
            }
            print(cli, &out, &human);
            Ok(Outcome::Positive)
        }
        Command::Birkhoff { file, class } => {
            let tri = load(file)?;
            let h = homology_summary(&tri)?;
            let c = class_of(&tri, &h, class, None)?;
            let cert = cone_membership(&tri, &c.weights.0, cli.seed)?;
            verify_certificate(&tri, &c.weights.0, &cert).map_err(Error::Internal)?;
            let member = cert.is_member();
            let statement = if member {
                "the class is nonnegative on every closed orbit in the complement of the punctured orbits: \
                 it is represented by a Birkhoff section of the flow"
            } else {
                "a closed orbit in the complement of the punctured orbits pairs negatively with the class: \
                 no Birkhoff section represents it"
            };
            let mut out = to_value(&cert);
            out["birkhoff_section"] = Value::Bool(member);
            out["statement"] = Value::String(statement.into());
            print(cli, &out, &format!("{statement}\n{}", cert_summary(&cert)));
            Ok(if member { Outcome::Positive } else { Outcome::Negative })
        }
        Command::Cover {
            file,
            phi,
            degree,
            perms,
        } => {
            let tri = load(file)?;
            let cover = match (phi, degree, perms) {
                (Some(phi), Some(d), None) => cyclic_cover(&tri, &parse_json_ints(phi)?, *d)?,
                (None, None, Some(p)) => {
                    let perms: Vec<Vec<usize>> = serde_json::from_str(p).map_err(|e| Error::Syntax {
                        line: e.line(),
                        column: e.column(),
                        message: e.to_string(),
                    })?;
                    VeeringTriangulation::new(lift(&tri, &perms)?)?
                }
                _ => return Err(Error::Input("give --phi with --degree, or --perms".into())),
            };
            emit(&cover.tri().to_vtri());
            Ok(Outcome::Positive)
        }
        Command::Fixtures => {
            let dir = fixture_dir();
            let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "vtri"))
                .collect();
            names.sort();
            let mut rows = Vec::new();
            let mut human = String::new();
            for p in names {
                let name = p.file_stem().unwrap().to_string_lossy().to_string();
                let row = match load(&p).and_then(|t| cover_signature(&t)) {
                    Ok((tets, cusps, betti, torsion)) => {
                        human += &format!("{name}: {tets} tets, {cusps} cusps, b1 = {betti}, torsion {torsion:?}\n");
                        json!({"name": name, "tets": tets, "cusps": cusps, "betti_1": betti, "torsion": torsion})
                    }
                    Err(e) => {
                        human += &format!("{name}: {e}\n");
                        json!({"name": name, "error": e.to_string()})
                    }
                };
                rows.push(row);
            }
            print(cli, &Value::Array(rows), &human);
            Ok(Outcome::Positive)
        }
    }
}

fn cmd_validate(cli: &Cli, file: &Path) -> Result<Outcome, Error> {
    let text = read(file)?;
    let tri = match parse_triangulation(&text) {
        Ok(t) => t,
        Err(e @ (Error::Syntax { .. } | Error::Format(_))) => return Err(e),
        Err(e) => {
            let out = json!({"valid": false, "error": e.to_string()});
            print(cli, &out, &format!("invalid: {e}"));
            return Ok(Outcome::Negative);
        }
    };
    let report = validate(&tri);
    let mut human = format!(
        "{}: {} tets, {} faces, {} edges\n",
        if report.valid { "valid" } else { "invalid" },
        report.tets,
        report.faces,
        report.edges
    );
    for c in &report.checks {
        human += &format!("  {:<24} {}\n", c.name, if c.passed { "ok" } else { "FAILED" });
        for f in &c.failures {
            human += &format!("    {f}\n");
        }
    }
    print(cli, &to_value(&report), &human);
    Ok(if report.valid {
        Outcome::Positive
    } else {
        Outcome::Negative
    })
}

fn cmd_cusps(cli: &Cli, file: &Path) -> Result<Outcome, Error> {
    let tri = load(file)?;
    let cusps = build_cusps(&tri)?;
    let mut rows = Vec::new();
    let mut human = String::new();
    for c in &cusps.cusps {
        let ladders: Vec<Value> = c
            .ladder_order
            .iter()
            .map(|&l| {
                let lad = &c.ladders[l];
                json!({
                    "direction": to_value(&lad.direction),
                    "tips": lad.tips.iter().map(|&t| [c.tips[t].tet, c.tips[t].vertex as usize]).collect::<Vec<_>>(),
                })
            })
            .collect();
        rows.push(json!({
            "id": c.id,
            "tips": c.tips.len(),
            "up_ladders": c.up_ladders(),
            "ladders": ladders,
            "lambda": c.lambda_primal,
            "lambda_dual": c.lambda_dual,
            "rho": c.rho,
        }));
        human += &format!(
            "cusp {}: {} tips, {} ladders ({} upward)\n",
            c.id,
            c.tips.len(),
            c.ladders.len(),
            c.up_ladders()
        );
        for &l in &c.ladder_order {
            let lad = &c.ladders[l];
            let tips: Vec<String> = lad
                .tips
                .iter()
                .map(|&t| format!("{}.{}", c.tips[t].tet, c.tips[t].vertex))
                .collect();
            human += &format!("  {:?}: {}\n", lad.direction, tips.join(" "));
        }
        human += &format!(
            "  lambda (side chain) {:?}\n  rho (dual chain)    {:?}\n",
            c.lambda_primal, c.rho
        );
    }
    print(cli, &json!({"cusps": rows}), &human);
    Ok(Outcome::Positive)
}

fn cmd_cone(
    cli: &Cli,
    file: &Path,
    class: &ClassArgs,
    tubes: &TubeArgs,
    ambient: AmbientArg,
) -> Result<Outcome, Error> {
    let tri = load(file)?;
    let h = homology_summary(&tri)?;
    let cusps = build_cusps(&tri)?;
    let ts = load_tubes(tubes, &cusps)?;
    let basis = match ambient {
        AmbientArg::Cusped => None,
        AmbientArg::Filled => Some(veerweave::flowgraph::ambient_basis(
            &tri,
            &h,
            &cusps,
            &ts,
            Ambient::Filled,
        )?),
    };
    let c = class_of(&tri, &h, class, basis.as_deref())?;
    let cert = cone_membership(&tri, &c.weights.0, cli.seed)?;
    verify_certificate(&tri, &c.weights.0, &cert).map_err(Error::Internal)?;
    let mut out = to_value(&cert);
    let mut member = cert.is_member();
    let mut human = cert_summary(&cert);
    if let AmbientArg::Filled = ambient {
        let filled = filled_subspace_check(&cusps, &ts, &c.weights.0)?;
        let cores_ok = filled.cores.iter().all(|k| k.a >= 0);
        if !filled.extends || !cores_ok {
            member = false;
        }
        out["filled"] = to_value(&filled);
        human += &format!(
            "\nextends over the solid tubes: {}, core pairings {:?}",
            filled.extends,
            filled.cores.iter().map(|k| (k.cusp, k.a)).collect::<Vec<_>>()
        );
        out["verdict"] = Value::String(if member { "member" } else { "non_member" }.into());
    }
    if let Some(coords) = &c.coords {
        out["coordinates"] = to_value(coords);
        out["class_scale"] = to_value(&c.scale);
    }
    print(cli, &out, &human);
    Ok(if member { Outcome::Positive } else { Outcome::Negative })
}

fn to_dot(g: &BlowupGraph) -> String {
    let mut s = String::from("digraph blowup {\n");
    for (i, v) in g.vertices.iter().enumerate() {
        let label: Vec<String> = v.prongs.iter().map(|p| p.to_string()).collect();
        s += &format!(
            "  v{i} [label=\"{}\"{}];\n",
            label.join(","),
            if v.circle { ", shape=circle" } else { "" }
        );
    }
    for e in &g.edges {
        s += &format!(
            "  v{} -> v{}{};\n",
            e.from,
            e.to,
            if e.kind == veerweave::transverse::EdgeKind::Circle {
                " [style=dashed]"
            } else {
                ""
            }
        );
    }
    s += "}\n";
    s
}
