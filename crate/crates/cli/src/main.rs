//! `spaceform` command-line front end.
//!
//! Exit codes: 0 success, 1 a residual above tolerance, 2 bad input or a
//! library error.

mod config;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::Config;
use serde::Serialize;
use spaceform::integrability::{equivalence_check, gcr_residuals, lax_residual, ResidualSummary};
use spaceform::liegroup::{induced_action, lorentz_generator, phi_check, q_generator, random_words};
use spaceform::reconstruct::{self as rc, ConstructOptions, DelbarInput, HolomorphicSpec, IntegrationOptions, LambdaSource};
use spaceform::spaceform::ambient_model;
use spaceform::twistor::{self as tw, DegeneracyReport};
use spaceform::{io, FundamentalData, Grid, Stencil, SurfaceCase};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spaceform", version, about = "Surfaces in four-dimensional space forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the tolerance of the run.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = "SPACEFORM_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Gauss/Codazzi/Ricci, zero-curvature and W/X/Y/Z residuals.
    Check,
    /// Twistor invariants, curvature identity and degeneracy.
    Twistor,
    /// Integrate frames from fundamental data.
    Reconstruct,
    /// Build fundamental data from W/X/Y/Z or holomorphic data.
    Construct,
    /// SO₀(3,1) → SO(3, ℂ) checks on random words.
    Group,
    /// Project stored frames to a quad mesh.
    Export,
}

enum Outcome {
    Pass,
    Fail,
}

struct Run {
    cfg: Config,
    tol: Option<f64>,
    out: PathBuf,
}

impl Run {
    fn tolerance(&self, default: f64) -> f64 {
        self.tol.or(self.cfg.tolerance).unwrap_or(default)
    }

    fn out(&self, name: impl AsRef<Path>) -> PathBuf {
        self.out.join(name)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        write_json(&self.out(name), value)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn residual_tolerance(grid: &Grid) -> f64 {
    rc::default_tolerance(grid)
}

fn summary(grid: &Grid, values: &[f64]) -> ResidualSummary {
    ResidualSummary::of(grid, values)
}

fn report_failures(items: &[(&str, &ResidualSummary)], tol: f64) -> Outcome {
    let mut ok = true;
    for (name, s) in items {
        if !(s.max <= tol) {
            ok = false;
            eprintln!(
                "{name}: max {:e} > {tol:e} at (i={}, j={}, u={:.6}, v={:.6})",
                s.max, s.argmax_i, s.argmax_j, s.argmax_u, s.argmax_v
            );
        }
    }
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

#[derive(Serialize)]
struct Header<'a> {
    case: &'a str,
    l0: f64,
    grid: Grid,
    tolerance: f64,
}

fn header(d: &FundamentalData, tol: f64) -> Header<'static> {
    Header { case: d.case().tag(), l0: d.model.l0, grid: d.grid, tolerance: tol }
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(flatten)]
    header: Header<'static>,
    stencil: &'static str,
    gauss: ResidualSummary,
    codazzi: ResidualSummary,
    ricci: ResidualSummary,
    lax: ResidualSummary,
    equivalence: ResidualSummary,
    pass: bool,
}

fn stencil_name(st: Stencil) -> &'static str {
    match st {
        Stencil::Second => "second",
        Stencil::Fourth => "fourth",
    }
}

fn check(run: &Run) -> Result<Outcome> {
    let d = run.cfg.data()?;
    let st = run.cfg.stencil(Stencil::Second)?;
    let g = d.grid;
    let tol = run.tolerance(residual_tolerance(&g));
    let gcr = gcr_residuals(&d, st);
    let lax = lax_residual(&d, st);
    let eq = equivalence_check(&d, st);

    let names = ["gauss", "codazzi_1", "codazzi_2", "codazzi_3", "codazzi_4", "ricci"].map(String::from);
    let cols: Vec<Vec<f64>> = vec![
        gcr.iter().map(|r| r.gauss).collect(),
        gcr.iter().map(|r| r.codazzi[0]).collect(),
        gcr.iter().map(|r| r.codazzi[1]).collect(),
        gcr.iter().map(|r| r.codazzi[2]).collect(),
        gcr.iter().map(|r| r.codazzi[3]).collect(),
        gcr.iter().map(|r| r.ricci).collect(),
    ];
    io::write_columns(&run.out("gcr_residuals.csv"), &g, &names, &cols)?;
    io::write_columns(&run.out("lax_residual.csv"), &g, &["lax".to_string()], &[lax.clone()])?;
    let eq_names: Vec<String> = (1..=6).map(|k| format!("combination_{k}")).collect();
    let eq_cols: Vec<Vec<f64>> = (0..6).map(|c| eq.iter().map(|r| r[c]).collect()).collect();
    io::write_columns(&run.out("equivalence_check.csv"), &g, &eq_names, &eq_cols)?;

    let codazzi: Vec<f64> = gcr.iter().map(|r| r.codazzi.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect();
    let eq_max: Vec<f64> = eq.iter().map(|r| r.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect();
    let gauss = summary(&g, &cols[0]);
    let ricci = summary(&g, &cols[5]);
    let codazzi = summary(&g, &codazzi);
    let lax = summary(&g, &lax);
    let equivalence = summary(&g, &eq_max);
    let outcome = report_failures(
        &[("gauss", &gauss), ("codazzi", &codazzi), ("ricci", &ricci), ("lax", &lax), ("equivalence", &equivalence)],
        tol,
    );
    run.write_json(
        "check_report.json",
        &CheckReport {
            header: header(&d, tol),
            stencil: stencil_name(st),
            gauss,
            codazzi,
            ricci,
            lax,
            equivalence,
            pass: matches!(outcome, Outcome::Pass),
        },
    )?;
    Ok(outcome)
}

#[derive(Serialize)]
struct TwistorReport {
    #[serde(flatten)]
    header: Header<'static>,
    identity_residual: f64,
    curvature: ResidualSummary,
    degeneracy: DegeneracyReport,
    dichotomy_consistent: bool,
    pass: bool,
}

fn twistor(run: &Run) -> Result<Outcome> {
    let d = run.cfg.data()?;
    let st = run.cfg.stencil(Stencil::Second)?;
    let tol = run.tolerance(residual_tolerance(&d.grid));
    let inv = tw::twistor_invariants(&d, st);
    io::write_invariants(&run.out("invariants.csv"), &inv)?;
    let fam = d.case().families();
    let curv: Vec<f64> = tw::curvature_residual(&d, st)
        .iter()
        .map(|m| m[..fam].iter().map(tw::max_entry).fold(0.0, f64::max))
        .collect();
    let curvature = summary(&d.grid, &curv);
    let degeneracy = tw::degeneracy_report(&d, st);
    let dichotomy_consistent = degeneracy.dichotomy_consistent(tol);
    let mut outcome = report_failures(&[("curvature identity", &curvature)], tol);
    if !dichotomy_consistent {
        eprintln!(
            "degeneracy and flat normal data disagree: min |Delta| {:e}, max |K - L0| {:e}, max |Rperp| {:e}",
            degeneracy.min_scaled_delta, degeneracy.max_k_minus_l0, degeneracy.max_rperp
        );
        outcome = Outcome::Fail;
    }
    run.write_json(
        "twistor_report.json",
        &TwistorReport {
            header: header(&d, tol),
            identity_residual: inv.identity_residual().0,
            curvature,
            degeneracy,
            dichotomy_consistent,
            pass: matches!(outcome, Outcome::Pass),
        },
    )?;
    Ok(outcome)
}

#[derive(Serialize)]
struct ReconstructReport {
    #[serde(flatten)]
    header: Header<'static>,
    integration: rc::IntegrationReport,
    extraction_error: f64,
    frames_dir: PathBuf,
    pass: bool,
}

fn reconstruct(run: &Run) -> Result<Outcome> {
    let d = run.cfg.data()?;
    let rcfg = run.cfg.reconstruct.as_ref();
    let default = config::ReconstructConfig::default();
    let rcfg = rcfg.unwrap_or(&default);
    let tol = run.tolerance(residual_tolerance(&d.grid));
    let opts = IntegrationOptions {
        transposed_check: rcfg.transposed_check,
        project_every: rcfg.project_every,
        init_tol: rcfg.init_tol.unwrap_or(IntegrationOptions::default().init_tol),
    };
    let init = rc::canonical_initial_frame(&d.model, d.lambda[0]);
    let (field, rep) = rc::integrate_frame(&d, &init, &opts)?;
    let dir = run.out(&rcfg.frames_dir);
    io::write_frames(&dir, &field)?;
    let back = rc::extract_fundamental(&field)?;
    let extraction_error = (0..9)
        .flat_map(|k| back.field(k).iter().zip(d.field(k)).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    let pass = !rep.non_integrable && rep.constraint_drift <= tol;
    if !pass {
        eprintln!(
            "integration: cross-consistency {:e}, constraint drift {:e}, input GCR {:e}",
            rep.cross_consistency, rep.constraint_drift, rep.gcr_max
        );
    }
    run.write_json(
        "reconstruct_report.json",
        &ReconstructReport { header: header(&d, tol), integration: rep, extraction_error, frames_dir: rcfg.frames_dir.clone(), pass },
    )?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn read_named_column(cfg: &Config, file: &Path, name: &str, grid: &Grid) -> Result<Vec<f64>> {
    let path = cfg.resolve(file);
    let (names, cols) = io::read_columns(&path, grid)?;
    let k = names.iter().position(|n| n == name).with_context(|| format!("{} has no `{name}` column", path.display()))?;
    Ok(cols[k].clone())
}

#[derive(Serialize)]
struct MeanCurvatureSummary {
    max_h: f64,
    all_lightlike: bool,
    eps_relation: Option<rc::EpsReport>,
}

#[derive(Serialize)]
struct ConstructReport {
    #[serde(flatten)]
    header: Header<'static>,
    mode: String,
    stencil: &'static str,
    gcr: ResidualSummary,
    degeneracy: DegeneracyReport,
    delbar_residual: Option<f64>,
    mean_curvature: Option<MeanCurvatureSummary>,
    pass: bool,
}

fn construct(run: &Run) -> Result<Outcome> {
    let cfg = &run.cfg;
    let c = cfg.construct.as_ref().context("config has no [construct] section")?;
    let (case, grid) = (cfg.case()?, cfg.grid()?);
    let tol = run.tolerance(residual_tolerance(&grid));
    let mut opts = ConstructOptions { tol: c.hypothesis_tol, ..Default::default() };
    if let Some(t) = c.identity_tol {
        opts.identity_tol = t;
    }
    if let Some(m) = c.margin {
        opts.margin = m;
    }
    let invariants = || -> Result<tw::TwistorInvariants> {
        match &c.invariants {
            Some(f) => Ok(io::read_invariants(&cfg.resolve(f), case, &grid)?),
            None => Ok(tw::twistor_invariants(&cfg.data()?, Stencil::Fourth)),
        }
    };
    let mut p_spec = None;
    let data = match c.mode.as_str() {
        "wxyz-flat" => rc::construct_from_wxyz_flat(&invariants()?, &opts)?,
        "wxyz-curved" => rc::construct_from_wxyz_curved(&invariants()?, cfg.l0, &opts)?,
        "delbar" => {
            if case != SurfaceCase::LorSpace {
                bail!("delbar mode needs case lor-space, got {case}");
            }
            let p: HolomorphicSpec = c.p.as_deref().context("delbar mode needs `p`")?.parse()?;
            let lambda = match &c.lambda_file {
                Some(f) => LambdaSource::Field(read_named_column(cfg, f, "lambda", &grid)?),
                None => LambdaSource::Liouville,
            };
            let gamma = c.gamma_file.as_ref().map(|f| read_named_column(cfg, f, "gamma", &grid)).transpose()?;
            let input = DelbarInput { grid, l0: cfg.l0, lambda, gamma, p: p.clone(), r: c.r, liouville_tol: c.liouville_tol };
            p_spec = Some(p);
            rc::construct_delbar(&input)?
        }
        other => bail!("unknown construct mode `{other}` (expected wxyz-flat, wxyz-curved or delbar)"),
    };
    io::write_data(&run.out("data.csv"), &data)?;

    let st = cfg.stencil(Stencil::Fourth)?;
    let gcr_vals: Vec<f64> = gcr_residuals(&data, st).iter().map(|r| r.max_abs()).collect();
    let gcr = summary(&data.grid, &gcr_vals);
    let degeneracy = tw::degeneracy_report(&data, st);
    let (delbar_residual, mean_curvature) = if data.case() == SurfaceCase::LorSpace {
        let res = tw::delbar_residual(&data)?.iter().map(|(a, b)| a.norm().max(b.norm())).fold(0.0, f64::max);
        // the isotropy relation is only meaningful for r = 0 and p without zeros
        let p = p_spec.as_ref().filter(|_| c.r == 0.0);
        let mc = match rc::mean_curvature_and_isotropy(&data, p) {
            Ok(m) => m,
            Err(spaceform::Error::TotallyGeodesicRegion { .. }) => rc::mean_curvature_and_isotropy(&data, None)?,
            Err(e) => return Err(e.into()),
        };
        (
            Some(res),
            Some(MeanCurvatureSummary { max_h: mc.max_h, all_lightlike: mc.all_lightlike, eps_relation: mc.eps_relation }),
        )
    } else {
        (None, None)
    };
    let outcome = report_failures(&[("GCR", &gcr)], tol);
    run.write_json(
        "construct_report.json",
        &ConstructReport {
            header: header(&data, tol),
            mode: c.mode.clone(),
            stencil: stencil_name(st),
            gcr,
            degeneracy,
            delbar_residual,
            mean_curvature,
            pass: matches!(outcome, Outcome::Pass),
        },
    )?;
    Ok(outcome)
}

#[derive(Serialize)]
struct GroupReport {
    tolerance: f64,
    words: usize,
    length: usize,
    generator_error: f64,
    phi: spaceform::liegroup::PhiReport,
    pass: bool,
}

/// Needs no config; `[group]` and `tolerance` are read when one is given.
fn group(cfg: Option<&Config>, cli_tol: Option<f64>, out: &Path) -> Result<Outcome> {
    let gcfg = cfg.and_then(|c| c.group.as_ref());
    let (seed, count, len, range) = gcfg.map_or((0, 100, 5, 1.0), |g| (g.seed, g.words, g.length, g.range));
    let tol = cli_tol.or(cfg.and_then(|c| c.tolerance)).unwrap_or(1e-9);
    let words = random_words(seed, count, len, range);
    let mut generator_error: f64 = 0.0;
    for g in words.iter().flatten() {
        let q = induced_action(&lorentz_generator(g))?;
        generator_error = generator_error.max((q - q_generator(g)).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let phi = phi_check(&words)?;
    let pass = generator_error <= tol && phi.max_residual <= tol;
    if !pass {
        eprintln!("group: generator error {generator_error:e}, word residual {:e}, tolerance {tol:e}", phi.max_residual);
    }
    write_json(&out.join("group_report.json"), &GroupReport { tolerance: tol, words: count, length: len, generator_error, phi, pass })?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn export(run: &Run) -> Result<Outcome> {
    let cfg = &run.cfg;
    let e = cfg.export.as_ref().context("config has no [export] section")?;
    let (case, grid) = (cfg.case()?, cfg.grid()?);
    let model = ambient_model(case, cfg.l0);
    let dim = model.ambient.dim();
    let dir = cfg.resolve(&e.frames_dir);
    let field = io::read_frames(&dir, model, &grid).with_context(|| format!("reading frames from {}", dir.display()))?;
    let projection = e
        .projection
        .clone()
        .unwrap_or_else(|| (0..3).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect());
    let points = io::project_positions(&field, &projection)?;
    io::write_mesh(&run.out(&e.mesh), &grid, &points)?;
    Ok(Outcome::Pass)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            bail!("--tolerance must be positive");
        }
    }
    let cfg = cli.config.as_deref().map(Config::load).transpose()?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    if let Command::Group = cli.command {
        return group(cfg.as_ref(), cli.tolerance, &cli.out);
    }
    let cfg = cfg.context("--config is required")?;
    let run = Run { cfg, tol: cli.tolerance, out: cli.out.clone() };
    match cli.command {
        Command::Check => check(&run),
        Command::Twistor => twistor(&run),
        Command::Reconstruct => reconstruct(&run),
        Command::Construct => construct(&run),
        Command::Group => unreachable!("handled above"),
        Command::Export => export(&run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
