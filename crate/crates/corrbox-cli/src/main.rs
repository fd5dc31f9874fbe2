//! Batch command-line front end for the corrbox library.
//!
//! Every command reads JSON (or .ext/.ine) files, runs one library
//! pipeline and prints a run report to standard output as JSON. Reports
//! are byte-identical across runs up to the timing field. Exit codes:
//! 0 success, 2 validation failure, 3 enumeration/size cap refusal.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use corrbox::corr::{Behavior, BellExpression};
use corrbox::detmap::{count_maps, enumerate, DetMap};
use corrbox::ineq::{
    affine_equivalent, canonicalize, covariance_from_counts, variance_optimal, CanonMode, Counts,
    ScaleConvention,
};
use corrbox::io::{
    read_ext, read_ine, write_ext, write_ine, BehaviorJson, CgJson, ComponentJson, DetMapJson,
    ExpressionJson, HRepJson, ScenarioJson, TransformationJson, VRepJson,
};
use corrbox::lifting::{census_lift, lift_behavior, lift_expression, max_payoff};
use corrbox::polytope::{
    causal_vertices, classify_facets, dd_facets, dd_vertices, extremal, ns_hrep, DdLimits, VRep,
};
use corrbox::ratlin::format_rational;
use corrbox::scenario::PartyCard;
use corrbox::stochmap::{decompose, is_completely_positive};
use corrbox::subspaces::{decompose_behavior, from_cg, to_cg};

#[derive(Parser)]
#[command(
    name = "corrbox",
    version,
    about = "Exact algebra and geometry of correlation boxes"
)]
struct Cli {
    /// Number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Gamma,
    ZeroBound,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Primitive,
    OneNorm,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    CgJson,
    Ine,
    Ext,
}

#[derive(Args)]
struct LabelBase {
    /// Label base of deterministic-map files (0 or 1).
    #[arg(long, default_value_t = 1)]
    label_base: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a behavior: nonnegativity, normalization, nonsignaling.
    Check {
        #[arg(long)]
        behavior: PathBuf,
        /// Check every source/target subset pair, not only single sources.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Decompose a behavior into subspace components, or a stochastic
    /// transformation into deterministic maps.
    Decompose {
        #[arg(long, conflicts_with = "transformation")]
        behavior: Option<PathBuf>,
        #[arg(long)]
        transformation: Option<PathBuf>,
    },
    /// Canonicalize a K-inequality.
    Canon {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Gamma)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = ScaleArg::Primitive)]
        scale: ScaleArg,
    },
    /// Decide affine equivalence of two K-inequalities.
    Equiv {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        expr2: PathBuf,
    },
    /// Variance-optimal form of an expression for given event counts.
    Variance {
        #[arg(long)]
        expr: PathBuf,
        /// JSON file: [[[x,y],[n1,n2,...]], ...] counts per joint input.
        #[arg(long)]
        counts: PathBuf,
    },
    /// Deterministic/stochastic map tooling.
    Maps {
        #[command(subcommand)]
        action: MapsAction,
    },
    /// Lift a behavior or expression through a deterministic map.
    Lift {
        #[arg(long, conflicts_with = "expr")]
        behavior: Option<PathBuf>,
        #[arg(long)]
        expr: Option<PathBuf>,
        #[arg(long)]
        map: PathBuf,
        /// Party the map acts on (0-based).
        #[arg(long, default_value_t = 0)]
        party: usize,
        #[command(flatten)]
        label_base: LabelBase,
    },
    /// Maximal average payoff of a behavior under an expression.
    Payoff {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Vertex enumeration: of an H-rep file, of a scenario's behavior
    /// polytope, or of the two-party causal polytope.
    Vertices {
        #[arg(long, conflicts_with_all = ["scenario", "causal"])]
        hrep: Option<PathBuf>,
        /// Scenario file: enumerate its behavior polytope.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Causal polytope for cardinalities like 2,2x3,3.
        #[arg(long, value_name = "A_CARDxB_CARD")]
        causal: Option<String>,
        #[arg(long)]
        max_outputs: Option<usize>,
        /// Check extremality of every output vertex.
        #[arg(long)]
        check_extremal: bool,
    },
    /// Facet enumeration of a V-rep file, optionally with relabeling-orbit
    /// classification.
    Facets {
        #[arg(long)]
        vrep: PathBuf,
        /// Scenario file for orbit classification of the facets.
        #[arg(long)]
        classify: Option<PathBuf>,
        #[arg(long)]
        max_outputs: Option<usize>,
    },
    /// Lifting census of a behavior into a target cardinality.
    Census {
        #[arg(long)]
        behavior: PathBuf,
        /// Target cardinality, e.g. 3,3,3.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        party: usize,
        #[arg(long)]
        cap: Option<u128>,
        /// Include the deduplicated images in the report.
        #[arg(long)]
        images: bool,
    },
    /// Convert between file formats (json, cg-json, ine, ext).
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        from: FormatArg,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        to: FormatArg,
    },
}

#[derive(Subcommand)]
enum MapsAction {
    /// Classify a deterministic map's invertibility.
    Classify {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        label_base: LabelBase,
    },
    /// Validate a stochastic matrix as a causal local transformation.
    Validate {
        #[arg(long)]
        transformation: PathBuf,
    },
    /// Run the completely-positive witness test on a matrix.
    Cp {
        #[arg(long)]
        transformation: PathBuf,
    },
    /// Count or list deterministic maps between cardinalities.
    Enumerate {
        /// Source cardinality, e.g. 2,2.
        #[arg(long)]
        source: String,
        /// Target cardinality, e.g. 3,3,3.
        #[arg(long)]
        target: String,
        #[arg(long)]
        cap: Option<u128>,
        /// Only report counts, not the maps themselves.
        #[arg(long)]
        count_only: bool,
    },
}

enum CliError {
    Validation(String),
    Cap(String),
}

impl From<corrbox::Error> for CliError {
    fn from(e: corrbox::Error) -> Self {
        match e {
            corrbox::Error::CapExceeded { .. } | corrbox::Error::DdLimitExceeded(_) => {
                CliError::Cap(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!(
            "malformed JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_behavior(path: &Path) -> CliResult<Behavior> {
    Ok(read_json::<BehaviorJson>(path)?.into_behavior()?)
}

fn load_expression(path: &Path) -> CliResult<BellExpression> {
    Ok(read_json::<ExpressionJson>(path)?.into_expression()?)
}

fn load_map(path: &Path, label_base: usize) -> CliResult<DetMap> {
    Ok(read_json::<DetMapJson>(path)?.into_map(label_base)?)
}

fn parse_card(text: &str) -> CliResult<PartyCard> {
    let outputs: Vec<usize> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Validation(format!("bad cardinality token {t:?}")))
        })
        .collect::<CliResult<_>>()?;
    PartyCard::new(outputs).map_err(CliError::from)
}

fn limits_with(max_outputs: Option<usize>) -> DdLimits {
    let mut limits = DdLimits::default();
    if let Some(cap) = max_outputs {
        limits.max_outputs = cap;
        limits.max_rays = cap.saturating_mul(20);
    }
    limits
}

fn vrep_json(v: &VRep) -> Value {
    serde_json::to_value(VRepJson::from_vrep(v)).expect("serializable")
}

fn run(command: &Command) -> CliResult<(String, Value)> {
    match command {
        Command::Check {
            behavior,
            exhaustive,
        } => {
            let p = load_behavior(behavior)?;
            let nonnegative = p.is_nonnegative();
            let normalized = p.is_normalized();
            let (nonsignaling, violations) = if normalized {
                let violations = p.check_nonsignaling(*exhaustive)?;
                let rendered: Vec<Value> = violations
                    .iter()
                    .map(|v| {
                        json!({
                            "sources": v.sources,
                            "targets": v.targets,
                            "source_inputs": [v.source_inputs_a, v.source_inputs_b],
                            "fixed_inputs": v.fixed_inputs,
                            "target_outputs": v.target_outputs,
                            "values": [format_rational(&v.lhs), format_rational(&v.rhs)],
                        })
                    })
                    .collect();
                (violations.is_empty(), rendered)
            } else {
                (false, vec![])
            };
            Ok((
                "check".into(),
                json!({
                    "nonnegative": nonnegative,
                    "normalized": normalized,
                    "nonsignaling": nonsignaling,
                    "violations": violations,
                }),
            ))
        }
        Command::Decompose {
            behavior: Some(path),
            ..
        } => {
            let p = load_behavior(path)?;
            let components: Vec<ComponentJson> = decompose_behavior(&p)
                .iter()
                .map(ComponentJson::from_component)
                .collect();
            Ok(("decompose".into(), json!({ "components": components })))
        }
        Command::Decompose {
            transformation: Some(path),
            ..
        } => {
            let t = read_json::<TransformationJson>(path)?.into_transformation()?;
            let d = decompose(&t);
            let terms: Vec<Value> = d
                .terms
                .iter()
                .map(|(w, m)| {
                    json!({
                        "weight": format_rational(w),
                        "map": DetMapJson::from_map(m),
                    })
                })
                .collect();
            Ok(("decompose".into(), json!({ "terms": terms })))
        }
        Command::Decompose { .. } => Err(CliError::Validation(
            "decompose needs --behavior or --transformation".into(),
        )),
        Command::Canon { expr, mode, scale } => {
            let phi = load_expression(expr)?;
            let mode = match mode {
                ModeArg::Gamma => CanonMode::GammaProjected,
                ModeArg::ZeroBound => CanonMode::ZeroBound,
            };
            let scale = match scale {
                ScaleArg::Primitive => ScaleConvention::PrimitiveIntegers,
                ScaleArg::OneNorm => ScaleConvention::OneNorm,
            };
            let canon = canonicalize(&phi, mode, scale)?;
            Ok((
                "canon".into(),
                json!({
                    "mode": match mode {
                        CanonMode::GammaProjected => "gamma",
                        CanonMode::ZeroBound => "zero-bound",
                    },
                    "scale": match scale {
                        ScaleConvention::PrimitiveIntegers => "primitive",
                        ScaleConvention::OneNorm => "one-norm",
                    },
                    "coeffs": canon.coeffs.iter().map(format_rational).collect::<Vec<_>>(),
                    "bound": format_rational(&canon.bound),
                }),
            ))
        }
        Command::Equiv { expr, expr2 } => {
            let phi1 = load_expression(expr)?;
            let phi2 = load_expression(expr2)?;
            let cert = affine_equivalent(&phi1, &phi2)?;
            Ok((
                "equiv".into(),
                match cert {
                    Some(c) => json!({
                        "equivalent": true,
                        "s": format_rational(&c.s),
                        "t": format_rational(&c.t),
                        "w": c.w.iter().map(format_rational).collect::<Vec<_>>(),
                    }),
                    None => json!({ "equivalent": false }),
                },
            ))
        }
        Command::Variance { expr, counts } => {
            let phi = load_expression(expr)?;
            let raw: Counts = read_json(counts)?;
            let cov = covariance_from_counts(phi.scenario(), &raw)?;
            let star = variance_optimal(&phi, &cov)?;
            Ok((
                "variance".into(),
                json!({
                    "expression": ExpressionJson::from_expression(&star),
                    "variance": format_rational(&cov.variance(star.coeffs())),
                    "input_variance": format_rational(&cov.variance(phi.coeffs())),
                }),
            ))
        }
        Command::Maps { action } => run_maps(action),
        Command::Lift {
            behavior: Some(path),
            map,
            party,
            label_base,
            ..
        } => {
            let p = load_behavior(path)?;
            let m = load_map(map, label_base.label_base)?;
            let lifted = lift_behavior(&p, *party, &m)?;
            Ok((
                "lift".into(),
                json!({ "behavior": BehaviorJson::from_behavior(&lifted) }),
            ))
        }
        Command::Lift {
            expr: Some(path),
            map,
            party,
            label_base,
            ..
        } => {
            let phi = load_expression(path)?;
            let m = load_map(map, label_base.label_base)?;
            let lifted = lift_expression(&phi, *party, &m)?;
            Ok((
                "lift".into(),
                json!({ "expression": ExpressionJson::from_expression(&lifted) }),
            ))
        }
        Command::Lift { .. } => Err(CliError::Validation(
            "lift needs --behavior or --expr".into(),
        )),
        Command::Payoff {
            expr,
            behavior,
            cap,
        } => {
            let phi = load_expression(expr)?;
            let p = load_behavior(behavior)?;
            let result = max_payoff(&phi, &p, *cap)?;
            Ok((
                "payoff".into(),
                json!({
                    "value": format_rational(&result.value),
                    "maps": result.maps.iter().map(DetMapJson::from_map).collect::<Vec<_>>(),
                }),
            ))
        }
        Command::Vertices {
            hrep,
            scenario,
            causal,
            max_outputs,
            check_extremal,
        } => {
            let limits = limits_with(*max_outputs);
            let h = if let Some(path) = hrep {
                if path.extension().is_some_and(|e| e == "ine") {
                    read_ine(&std::fs::read_to_string(path)?)?
                } else {
                    read_json::<HRepJson>(path)?.into_hrep()?
                }
            } else if let Some(path) = scenario {
                let s = read_json::<ScenarioJson>(path)?.into_scenario()?;
                ns_hrep(&s)
            } else if let Some(spec) = causal {
                let Some((a, b)) = spec.split_once('x') else {
                    return Err(CliError::Validation(
                        "causal cardinalities look like 2,2x3,3".into(),
                    ));
                };
                let v = causal_vertices(&parse_card(a)?, &parse_card(b)?);
                return Ok((
                    "vertices".into(),
                    json!({ "count": v.vertices.len(), "vrep": vrep_json(&v) }),
                ));
            } else {
                return Err(CliError::Validation(
                    "vertices needs --hrep, --scenario or --causal".into(),
                ));
            };
            let v = dd_vertices(&h, &limits)?;
            let extremal_ok = if *check_extremal {
                let mut all = true;
                for vert in &v.vertices {
                    all &= extremal(vert, &h)?;
                }
                Some(all)
            } else {
                None
            };
            Ok((
                "vertices".into(),
                json!({
                    "count": v.vertices.len(),
                    "all_extremal": extremal_ok,
                    "vrep": vrep_json(&v),
                }),
            ))
        }
        Command::Facets {
            vrep,
            classify,
            max_outputs,
        } => {
            let limits = limits_with(*max_outputs);
            let v = if vrep.extension().is_some_and(|e| e == "ext") {
                read_ext(&std::fs::read_to_string(vrep)?)?
            } else {
                read_json::<VRepJson>(vrep)?.into_vrep()?
            };
            let h = dd_facets(&v, &limits)?;
            let classes = if let Some(path) = classify {
                let s = read_json::<ScenarioJson>(path)?.into_scenario()?;
                let classes = classify_facets(&h, &s)?;
                Some(
                    classes
                        .iter()
                        .map(|c| {
                            json!({
                                "orbit_size": c.orbit_size,
                                "members": c.members,
                                "representative":
                                    ExpressionJson::from_expression(&c.representative),
                            })
                        })
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            Ok((
                "facets".into(),
                json!({
                    "equalities": h.eq_a.rows(),
                    "facets": h.ineq_a.rows(),
                    "hrep": HRepJson::from_hrep(&h),
                    "classes": classes,
                }),
            ))
        }
        Command::Census {
            behavior,
            target,
            party,
            cap,
            images,
        } => {
            let p = load_behavior(behavior)?;
            let target = parse_card(target)?;
            let census = census_lift(&p, *party, &target, *cap)?;
            let image_json = if *images {
                Some(
                    census
                        .images
                        .iter()
                        .map(|b| b.coeffs().iter().map(format_rational).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            Ok((
                "census".into(),
                json!({
                    "total": census.total_maps,
                    "invertible": census.invertible_count,
                    "unique": census.unique_images,
                    "images": image_json,
                }),
            ))
        }
        Command::Convert {
            input,
            from,
            output,
            to,
        } => {
            let written = convert(input, *from, output, *to)?;
            Ok((
                "convert".into(),
                json!({ "output": output.display().to_string(), "bytes": written }),
            ))
        }
    }
}

fn run_maps(action: &MapsAction) -> CliResult<(String, Value)> {
    match action {
        MapsAction::Classify { map, label_base } => {
            let m = load_map(map, label_base.label_base)?;
            Ok((
                "maps classify".into(),
                json!({
                    "class": m.classify().to_string(),
                    "left_invertible": m.has_left_inverse(),
                    "right_invertible": m.has_right_inverse(),
                    "degenerate_input_advisory": m.degenerate_input_advisory(),
                }),
            ))
        }
        MapsAction::Validate { transformation } => {
            let t = read_json::<TransformationJson>(transformation)?;
            let (matrix, source, target) = t.matrix()?;
            match corrbox::stochmap::validate(matrix, &source, &target) {
                Ok(_) => Ok((
                    "maps validate".into(),
                    json!({ "valid": true, "violations": [] }),
                )),
                Err(violations) => Ok((
                    "maps validate".into(),
                    json!({
                        "valid": false,
                        "violations":
                            violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    }),
                )),
            }
        }
        MapsAction::Cp { transformation } => {
            let t = read_json::<TransformationJson>(transformation)?;
            let (matrix, source, target) = t.matrix()?;
            let result = is_completely_positive(&matrix, &source, &target);
            Ok((
                "maps cp".into(),
                json!({
                    "completely_positive": result.is_cp,
                    "witness": result.witness.map(|w| format!("{w:?}")),
                }),
            ))
        }
        MapsAction::Enumerate {
            source,
            target,
            cap,
            count_only,
        } => {
            let source = parse_card(source)?;
            let target = parse_card(target)?;
            let total = count_maps(&source, &target);
            if *count_only {
                return Ok(("maps enumerate".into(), json!({ "total": total })));
            }
            let mut left = 0u64;
            let mut right = 0u64;
            let mut maps = Vec::new();
            for m in enumerate(&source, &target, None, *cap)? {
                if m.has_left_inverse() {
                    left += 1;
                }
                if m.has_right_inverse() {
                    right += 1;
                }
                maps.push(DetMapJson::from_map(&m));
            }
            Ok((
                "maps enumerate".into(),
                json!({
                    "total": total,
                    "left_invertible": left,
                    "right_invertible": right,
                    "maps": maps,
                }),
            ))
        }
    }
}

fn convert(input: &Path, from: FormatArg, output: &Path, to: FormatArg) -> CliResult<usize> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", input.display())))?;
    let rendered = match (from, to) {
        (FormatArg::Json, FormatArg::CgJson) => {
            let p: BehaviorJson = serde_json::from_str(&text)?;
            let p = p.into_behavior()?;
            let cg = to_cg(&p);
            serde_json::to_string_pretty(&CgJson {
                scenario: ScenarioJson::from_scenario(p.scenario()),
                cg_coeffs: cg.iter().map(format_rational).collect(),
            })?
        }
        (FormatArg::CgJson, FormatArg::Json) => {
            let cg: CgJson = serde_json::from_str(&text)?;
            let scenario = cg.scenario.into_scenario()?;
            let coeffs = cg
                .cg_coeffs
                .iter()
                .map(|s| corrbox::ratlin::parse_rational(s))
                .collect::<corrbox::Result<Vec<_>>>()?;
            let p = from_cg(&scenario, &coeffs)?;
            serde_json::to_string_pretty(&BehaviorJson::from_behavior(&p))?
        }
        (FormatArg::Json, FormatArg::Ine) => {
            let h: HRepJson = serde_json::from_str(&text)?;
            write_ine(&h.into_hrep()?)
        }
        (FormatArg::Ine, FormatArg::Json) => {
            let h = read_ine(&text)?;
            serde_json::to_string_pretty(&HRepJson::from_hrep(&h))?
        }
        (FormatArg::Json, FormatArg::Ext) => {
            let v: VRepJson = serde_json::from_str(&text)?;
            write_ext(&v.into_vrep()?)
        }
        (FormatArg::Ext, FormatArg::Json) => {
            let v = read_ext(&text)?;
            serde_json::to_string_pretty(&VRepJson::from_vrep(&v))?
        }
        _ => {
            return Err(CliError::Validation(
                "supported conversions: json<->cg-json (behaviors), json<->ine (H-reps), \
                 json<->ext (V-reps)"
                    .into(),
            ))
        }
    };
    std::fs::write(output, &rendered)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", output.display())))?;
    Ok(rendered.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // a late or repeated initialization is harmless
        let _ = corrbox::build_thread_pool(threads);
    }
    let start = Instant::now();
    match run(&cli.command) {
        Ok((command, result)) => {
            let report = json!({
                "format": "corrbox/1",
                "command": command,
                "result": result,
                "timing_ms": start.elapsed().as_millis() as u64,
            });
            let rendered = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("report serializes");
            println!("{rendered}");
            ExitCode::SUCCESS
        }
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Cap(message)) => {
            eprintln!("refused: {message}");
            ExitCode::from(3)
        }
    }
}
