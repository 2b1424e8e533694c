//! Command-line front end. Exit codes: 0 on success/pass, 1 on a failed
//! verification check, 2 on configuration errors.

use clap::{Args, Parser, Subcommand};
use gauss_local::functions::{
    default_lambda_grid, evaluate, lp_norm_detailed, weak_lp_quasinorm, AtomSpec, FunctionSpec,
    NormDomain,
};
use gauss_local::bmo::{blo_norm_detailed, bmo_norm, bmo_star_norm, bmo_star_p_norm, BallSample};
use gauss_local::commutators::{apply_commutator, CommutatorKind};
use gauss_local::geometry::{build_covering, covering_overlap_count, BoxRegion};
use gauss_local::harness::{run_check, TheoremCheckConfig, TheoremId};
use gauss_local::operators::{
    frac_integral, frac_integral_dual, frac_integral_tilde, frac_integral_tilde_dual,
    frac_maximal, local_maximal, sharp_maximal, OperatorParams,
};
use gauss_local::{Ball, GaussContext, Point, QuadratureConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gauss-local", version, about = "Local fractional operators and BMO machinery on the Gauss measure space")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Ambient dimension n
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Admissible class parameter a
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Fractional order beta in (0, 1)
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Lebesgue exponent p
    #[arg(long, global = true)]
    p: Option<f64>,
    /// RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    radial_nodes: Option<usize>,
    #[arg(long, global = true)]
    angular_nodes: Option<usize>,
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    /// Cap the rayon worker count
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON configuration file (verify/sweep)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Gauss measures and the volume kernel
    Measure {
        #[command(subcommand)]
        what: MeasureCmd,
    },
    /// Apply an operator at points
    Apply {
        /// Operator name: I, I~, I*, I~*, M, M_beta, sharp, bracket_i_tilde, abs_i, bracket_m, abs_m, aux_t
        #[arg(long)]
        op: String,
        /// Function spec (canonical JSON)
        #[arg(long)]
        f: String,
        /// Symbol spec for commutators (canonical JSON)
        #[arg(long)]
        b: Option<String>,
        /// Semicolon-separated points, each a comma-separated coordinate list
        #[arg(long)]
        points: String,
    },
    /// Norms: lp, weak, bmo_star, bmo, bmo_star_p, blo
    Norm {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        f: String,
        /// Truncation radius for whole-space norms
        #[arg(long, default_value_t = 12.0)]
        truncation: f64,
    },
    /// Construct or validate atoms
    Atom {
        #[command(subcommand)]
        what: AtomCmd,
    },
    /// Greedy covering construction
    Covering {
        #[arg(long, default_value_t = 5.0)]
        half_width: f64,
        #[arg(long)]
        spacing: f64,
        #[arg(long, default_value_t = 4.0)]
        tau: f64,
    },
    /// Run one theorem-level verification check
    Verify {
        /// Theorem id, e.g. E4.13, GEOM, T3.1-strong
        theorem_id: String,
    },
    /// Ratio tables over parameter grids
    Sweep {
        #[arg(long)]
        theorem_id: String,
        /// Comma-separated beta values
        #[arg(long, default_value = "0.25")]
        betas: String,
        /// Comma-separated class parameters
        #[arg(long, default_value = "1.0")]
        r#as: String,
        /// Comma-separated p exponents
        #[arg(long, default_value = "2.0")]
        ps: String,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// gamma(B) for a ball
    Ball {
        #[arg(long)]
        center: String,
        #[arg(long)]
        radius: f64,
    },
    /// V(x, y) = gamma(B(x, |x-y|))
    V {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// dV/dy_i
    Dv {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        index: usize,
    },
}

#[derive(Subcommand)]
enum AtomCmd {
    Make {
        #[arg(long)]
        center: String,
        #[arg(long)]
        radius: f64,
        /// Integrability exponent r > 1
        #[arg(long)]
        r: f64,
        /// Profile spec (canonical JSON); omit for the constant-one atom
        #[arg(long)]
        profile: Option<String>,
    },
    Validate {
        /// Atom function spec (canonical JSON, as produced by `atom make`)
        #[arg(long)]
        atom: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.common.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_coords(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad coordinate {t:?}: {e}")))
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    parse_coords(s)
}

fn parse_spec(s: &str) -> Result<FunctionSpec, String> {
    FunctionSpec::from_canonical_string(s).map_err(|e| e.to_string())
}

fn quad_from(common: &CommonArgs) -> QuadratureConfig {
    let mut q = QuadratureConfig::default();
    if let Some(v) = common.radial_nodes {
        q.radial_nodes = v;
    }
    if let Some(v) = common.angular_nodes {
        q.angular_nodes = v;
    }
    if let Some(v) = common.mc_samples {
        q.mc_samples = v;
    }
    if let Some(v) = common.seed {
        q.seed = v;
    }
    q
}

fn context_from(common: &CommonArgs) -> Result<GaussContext, String> {
    let dim = common.dim.unwrap_or(1);
    GaussContext::new(dim, quad_from(common)).map_err(|e| e.to_string())
}

fn params_from(common: &CommonArgs) -> Result<OperatorParams, String> {
    let a = common.a.unwrap_or(1.0);
    let beta = common.beta.unwrap_or(0.5);
    OperatorParams::new(a, beta).map_err(|e| e.to_string())
}

fn emit(common: &CommonArgs, text: &str) -> Result<(), String> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let common = cli.common.clone();
    match cli.command {
        Command::Measure { what } => {
            let ctx = context_from(&common)?;
            let value = match what {
                MeasureCmd::Ball { center, radius } => {
                    let c = Point::new(parse_coords(&center)?).map_err(|e| e.to_string())?;
                    let b = Ball::new(c, radius).map_err(|e| e.to_string())?;
                    ctx.gauss_ball(&b).map_err(|e| e.to_string())?
                }
                MeasureCmd::V { x, y } => {
                    let xp = Point::new(parse_coords(&x)?).map_err(|e| e.to_string())?;
                    let yp = Point::new(parse_coords(&y)?).map_err(|e| e.to_string())?;
                    ctx.v_kernel(&xp, &yp).map_err(|e| e.to_string())?
                }
                MeasureCmd::Dv { x, y, index } => {
                    let xp = Point::new(parse_coords(&x)?).map_err(|e| e.to_string())?;
                    let yp = Point::new(parse_coords(&y)?).map_err(|e| e.to_string())?;
                    ctx.v_kernel_partial(&xp, &yp, index).map_err(|e| e.to_string())?
                }
            };
            emit(&common, &format!("{value:.16e}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Apply { op, f, b, points } => {
            let ctx = context_from(&common)?;
            let params = params_from(&common)?;
            let f_spec = parse_spec(&f)?;
            let b_spec = b.map(|s| parse_spec(&s)).transpose()?;
            let mut lines = String::new();
            for point_str in points.split(';') {
                let x = Point::new(parse_coords(point_str)?).map_err(|e| e.to_string())?;
                let value = apply_operator(&ctx, &params, &op, &f_spec, b_spec.as_ref(), &x)?;
                lines.push_str(&format!("{value:.16e}\n"));
            }
            emit(&common, &lines)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Norm { kind, f, truncation } => {
            let ctx = context_from(&common)?;
            let f_spec = parse_spec(&f)?;
            let p = common.p.unwrap_or(2.0);
            let a = common.a.unwrap_or(1.0);
            let value = match kind.as_str() {
                "lp" => {
                    let (v, tail) = lp_norm_detailed(
                        &ctx,
                        &f_spec,
                        p,
                        &NormDomain::Truncated { radius: truncation },
                    )
                    .map_err(|e| e.to_string())?;
                    emit(&common, &format!("{v:.16e}\ntail_bound {tail:.3e}\n"))?;
                    return Ok(ExitCode::SUCCESS);
                }
                "weak" => {
                    let hi = 10.0f64.max(evaluate(&f_spec, &Point::origin(ctx.dim())).abs());
                    let grid = default_lambda_grid(hi, 64);
                    weak_lp_quasinorm(&ctx, &f_spec, p, &grid).map_err(|e| e.to_string())?
                }
                "bmo_star" => {
                    let sample = BallSample::standard(ctx.dim(), 1.0).map_err(|e| e.to_string())?;
                    bmo_star_norm(&ctx, &f_spec, &sample).map_err(|e| e.to_string())?
                }
                "bmo" => {
                    let sample = BallSample::standard(ctx.dim(), 1.0).map_err(|e| e.to_string())?;
                    bmo_norm(&ctx, &f_spec, &sample).map_err(|e| e.to_string())?
                }
                "bmo_star_p" => {
                    let sample = BallSample::standard(ctx.dim(), a).map_err(|e| e.to_string())?;
                    bmo_star_p_norm(&ctx, &f_spec, &sample, p).map_err(|e| e.to_string())?
                }
                "blo" => {
                    let sample = BallSample::standard(ctx.dim(), a).map_err(|e| e.to_string())?;
                    let d = blo_norm_detailed(&ctx, &f_spec, &sample, 512)
                        .map_err(|e| e.to_string())?;
                    emit(
                        &common,
                        &format!(
                            "{:.16e}\nl1 {:.16e}\nmax_bracket {:.16e}\nmin_bracket {:.16e}\nnegative_bracket_seen {}\n",
                            d.value, d.l1_term, d.max_bracket, d.min_bracket, d.negative_bracket_seen
                        ),
                    )?;
                    return Ok(ExitCode::SUCCESS);
                }
                other => return Err(format!("unknown norm kind: {other}")),
            };
            emit(&common, &format!("{value:.16e}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Atom { what } => {
            let ctx = context_from(&common)?;
            match what {
                AtomCmd::Make { center, radius, r, profile } => {
                    let c = Point::new(parse_coords(&center)?).map_err(|e| e.to_string())?;
                    let ball = Ball::new(c, radius).map_err(|e| e.to_string())?;
                    let (profile_spec, constant_one) = match profile {
                        Some(p) => (parse_spec(&p)?, false),
                        None => (FunctionSpec::constant(1.0), true),
                    };
                    let spec = AtomSpec {
                        ball,
                        r,
                        profile: Box::new(profile_spec),
                        is_constant_one: constant_one,
                    };
                    let atom = gauss_local::make_atom(&ctx, &spec).map_err(|e| e.to_string())?;
                    emit(&common, &format!("{}\n", atom.to_canonical_string()))?;
                    Ok(ExitCode::SUCCESS)
                }
                AtomCmd::Validate { atom, tol } => {
                    let atom_spec = parse_spec(&atom)?;
                    let inner = match &atom_spec.kind {
                        gauss_local::functions::FunctionKind::Atom { spec, .. } => spec.clone(),
                        _ => return Err("spec is not an atom".into()),
                    };
                    let check = gauss_local::validate_atom(&ctx, &atom_spec, &inner, tol)
                        .map_err(|e| e.to_string())?;
                    emit(
                        &common,
                        &format!("pass {}\nreasons {:?}\n", check.pass, check.reasons),
                    )?;
                    Ok(if check.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
            }
        }
        Command::Covering { half_width, spacing, tau } => {
            let ctx = context_from(&common)?;
            let region = BoxRegion::cube(ctx.dim(), half_width);
            let family = build_covering(&ctx, &region, spacing).map_err(|e| e.to_string())?;
            let overlap = covering_overlap_count(&family, tau);
            emit(
                &common,
                &format!(
                    "centers {}\nkappa {}\noverlap_tau_{tau} {overlap}\n",
                    family.len(),
                    family.kappa
                ),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { theorem_id } => {
            let cfg = build_check_config(&common, &theorem_id)?;
            let report = run_check(&cfg).map_err(|e| e.to_string())?;
            let text = match common.format.as_str() {
                "json" => report.to_json(),
                "csv" => report.to_csv(),
                other => return Err(format!("unknown format: {other}")),
            };
            emit(&common, &text)?;
            eprintln!("{}", report.summary_line());
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep { theorem_id, betas, r#as, ps } => {
            let betas = parse_floats(&betas)?;
            let a_values = parse_floats(&r#as)?;
            let p_values = parse_floats(&ps)?;
            let mut all_pass = true;
            let mut out = String::from("theorem_id,a,beta,p,max_ratio,refinement_delta,pass\n");
            for &a in &a_values {
                for &beta in &betas {
                    for &p in &p_values {
                        let mut cfg = build_check_config(&common, &theorem_id)?;
                        cfg.a = a;
                        cfg.beta = beta;
                        cfg.p = p;
                        let report = run_check(&cfg).map_err(|e| e.to_string())?;
                        all_pass &= report.pass;
                        out.push_str(&format!(
                            "{},{},{},{},{:.16e},{:.16e},{}\n",
                            cfg.theorem_id.as_str(),
                            a,
                            beta,
                            p,
                            report.max_ratio,
                            report.refinement.delta,
                            report.pass
                        ));
                    }
                }
            }
            emit(&common, &out)?;
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn build_check_config(common: &CommonArgs, theorem_id: &str) -> Result<TheoremCheckConfig, String> {
    let id = TheoremId::parse(theorem_id).map_err(|e| e.to_string())?;
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
            let mut parsed: TheoremCheckConfig =
                serde_json::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
            parsed.theorem_id = id;
            parsed
        }
        None => TheoremCheckConfig::new(id),
    };
    if let Some(n) = common.dim {
        cfg.n = n;
    }
    if let Some(a) = common.a {
        cfg.a = a;
    }
    if let Some(beta) = common.beta {
        cfg.beta = beta;
    }
    if let Some(p) = common.p {
        cfg.p = p;
    } else if cfg.p >= 1.0 / cfg.beta {
        // keep the hypothesis 1 < p < 1/beta when only beta was supplied
        cfg.p = 0.5 * (1.0 + 1.0 / cfg.beta);
    }
    if let Some(seed) = common.seed {
        cfg.quad.seed = seed;
    }
    if let Some(v) = common.radial_nodes {
        cfg.quad.radial_nodes = v;
    }
    if let Some(v) = common.angular_nodes {
        cfg.quad.angular_nodes = v;
    }
    if let Some(v) = common.mc_samples {
        cfg.quad.mc_samples = v;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn apply_operator(
    ctx: &GaussContext,
    params: &OperatorParams,
    op: &str,
    f: &FunctionSpec,
    b: Option<&FunctionSpec>,
    x: &Point,
) -> Result<f64, String> {
    let need_b = || -> Result<&FunctionSpec, String> {
        b.ok_or_else(|| "this operator requires --b".to_string())
    };
    let v = match op {
        "I" => frac_integral(ctx, params, f, x),
        "I~" => frac_integral_tilde(ctx, params, f, x),
        "I*" => frac_integral_dual(ctx, params, f, x),
        "I~*" => frac_integral_tilde_dual(ctx, params, f, x),
        "M" => local_maximal(ctx, params, f, x),
        "M_beta" => frac_maximal(ctx, params, f, x),
        "sharp" => sharp_maximal(ctx, f, x, &params.grid),
        "bracket_i_tilde" => {
            apply_commutator(ctx, params, CommutatorKind::BracketITilde, need_b()?, f, x)
        }
        "abs_i" => apply_commutator(ctx, params, CommutatorKind::AbsI, need_b()?, f, x),
        "bracket_m" => apply_commutator(ctx, params, CommutatorKind::BracketM, need_b()?, f, x),
        "abs_m" => apply_commutator(ctx, params, CommutatorKind::AbsM, need_b()?, f, x),
        "aux_t" => apply_commutator(ctx, params, CommutatorKind::AuxT, need_b()?, f, x),
        other => return Err(format!("unknown operator: {other}")),
    };
    v.map_err(|e| e.to_string())
}
