//! Command-line front end of the `ruled-slant` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::expr::{parse_curve, parse_expression, ExprError};
use crate::report::{self, SpecEcho, Stats, TOOL_NAME, TOOL_VERSION};
use crate::synth::{self, CurvatureProfile, Preset, PresetParams, Triad, DEFAULT_SAMPLES};
use crate::{Curve, Error, RuledSurfaceSpec, Tolerances};

pub const THREADS_ENV: &str = "RULED_SLANT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ruled-slant",
    version,
    about = "Frenet frames and slant classification of ruled surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full analysis report (JSON) with optional per-sample CSV.
    Analyze {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Slant verdicts and recovered axes only.
    Classify {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual profiles of the nine differential equations only.
    Residuals {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a prescribed conical curvature and report the round trip.
    Synth {
        /// Curvature profile in the variable s.
        #[arg(long, conflicts_with = "preset", allow_hyphen_values = true)]
        kappa: Option<String>,
        /// Arc-length range "min:max" of --kappa.
        #[arg(long, requires = "kappa", allow_hyphen_values = true)]
        s: Option<String>,
        /// Profile preset (slant-family-c, quadratic, nonslant-mixed).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, default_value_t = 3000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-knot CSV of the integrated frames.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Triangulated OBJ mesh of the surface with its striction curve.
    Mesh {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 1.0)]
        vmax: f64,
        #[arg(long, default_value_t = 64)]
        nu: usize,
        #[arg(long, default_value_t = 9)]
        nv: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the presets.
    Gallery,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    /// Base curve "x(u), y(u), z(u)".
    #[arg(long, conflicts_with = "preset", allow_hyphen_values = true)]
    base: Option<String>,
    /// Director curve "x(u), y(u), z(u)".
    #[arg(
        long,
        conflicts_with = "preset",
        required_unless_present = "preset",
        allow_hyphen_values = true
    )]
    director: Option<String>,
    /// Parameter grid "min:max:count".
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
}

#[derive(Debug, Args)]
struct TolArgs {
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    ode_tol: Option<f64>,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut t = Tolerances::default();
        for (slot, value, name) in [
            (&mut t.tol_abs, self.tol_abs, "--tol-abs"),
            (&mut t.tol_rel, self.tol_rel, "--tol-rel"),
            (&mut t.ode_tol, self.ode_tol, "--ode-tol"),
        ] {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!(
                        "{name} must be a non-negative number, got {v}"
                    )));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Analysis(Error),
    Io(PathBuf, io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(e) if e.is_degenerate_surface() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Analysis(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Analysis(e)
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    configure_threads();
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Analyze { surface, tol, out, csv } => {
            let tol = tol.tolerances()?;
            let (spec, echo) = surface.resolve()?;
            let (report, field) = report::analyze(&spec, echo, &tol)?;
            if let Some(path) = csv {
                with_file(&path, |w| report::write_csv(&field, w))?;
            }
            emit(out.as_deref(), stdout, report.to_json().as_bytes())
        }
        Command::Classify { surface, tol, out } => {
            let tol = tol.tolerances()?;
            let (spec, echo) = surface.resolve()?;
            let field = crate::frame::analyze(&spec, &tol)?;
            let slant = crate::slant::classify(&field, tol.tol_abs, tol.tol_rel)?;
            #[derive(Serialize)]
            struct View<'a> {
                tool: &'static str,
                version: &'static str,
                spec: SpecEcho,
                tolerances: Tolerances,
                slant: &'a crate::slant::SlantReport,
            }
            let view = View {
                tool: TOOL_NAME,
                version: TOOL_VERSION,
                spec: echo,
                tolerances: tol,
                slant: &slant,
            };
            emit(out.as_deref(), stdout, json(&view).as_bytes())
        }
        Command::Residuals { surface, tol, out } => {
            let tol = tol.tolerances()?;
            let (spec, echo) = surface.resolve()?;
            let (report, _) = report::analyze(&spec, echo, &tol)?;
            #[derive(Serialize)]
            struct View<'a> {
                tool: &'static str,
                version: &'static str,
                spec: &'a SpecEcho,
                tolerances: Tolerances,
                ode_residuals: &'a [crate::odecheck::ResidualReport],
                consistency: &'a report::Consistency,
            }
            let view = View {
                tool: TOOL_NAME,
                version: TOOL_VERSION,
                spec: &report.spec,
                tolerances: tol,
                ode_residuals: &report.ode_residuals,
                consistency: &report.consistency,
            };
            emit(out.as_deref(), stdout, json(&view).as_bytes())
        }
        Command::Synth {
            kappa,
            s,
            preset,
            c,
            steps,
            out,
            csv,
        } => {
            let profile = match (kappa, preset) {
                (Some(text), None) => {
                    let (lo, hi) = match s {
                        Some(range) => parse_range(&range)?,
                        None => (0.0, 1.0),
                    };
                    CurvatureProfile::parse(&text, lo, hi, "command line").map_err(|e| match e {
                        Error::Expr(e) => annotate(e, "--kappa", &text),
                        other => usage(other),
                    })?
                }
                (None, Some(name)) => match synth::gallery(&name, &PresetParams { theta: None, c }).map_err(usage)? {
                    Preset::Profile(p) => p,
                    Preset::Surface(_) => {
                        return Err(CliError::Usage(format!(
                            "preset '{name}' is a surface, not a curvature profile"
                        )))
                    }
                },
                _ => return Err(CliError::Usage("synth needs --kappa or --preset".into())),
            };
            let field = synth::integrate_frenet(&profile, &Triad::identity(), steps).map_err(usage)?;
            let round_trip = synth::round_trip_error(&field)?;
            let kappa: Vec<f64> = field.field.kappa();
            #[derive(Serialize)]
            struct View {
                tool: &'static str,
                version: &'static str,
                expression: String,
                s_min: f64,
                s_max: f64,
                description: String,
                steps: usize,
                step: f64,
                initial: Triad,
                final_frame: Triad,
                kappa_q: Option<Stats>,
                max_gram_defect_before: f64,
                max_gram_defect_after: f64,
                round_trip_error: f64,
            }
            let last = field.field.samples.last().expect("at least 17 knots");
            let view = View {
                tool: TOOL_NAME,
                version: TOOL_VERSION,
                expression: profile.expr.to_string(),
                s_min: profile.s_min,
                s_max: profile.s_max,
                description: profile.description.clone(),
                steps,
                step: field.step,
                initial: field.initial,
                final_frame: Triad {
                    q: last.q,
                    h: last.h,
                    a: last.a,
                },
                kappa_q: Stats::of(&kappa),
                max_gram_defect_before: field.max_gram_defect_before,
                max_gram_defect_after: field.max_gram_defect_after,
                round_trip_error: round_trip,
            };
            if let Some(path) = csv {
                with_file(&path, |w| report::write_csv(&field.field, w))?;
            }
            emit(out.as_deref(), stdout, json(&view).as_bytes())
        }
        Command::Mesh {
            surface,
            vmax,
            nu,
            nv,
            out,
        } => {
            if nu < 2 || nv < 2 {
                return Err(CliError::Usage(format!(
                    "--nu and --nv must be at least 2, got {nu} and {nv}"
                )));
            }
            if !(vmax > 0.0 && vmax.is_finite()) {
                return Err(CliError::Usage(format!("--vmax must be positive, got {vmax}")));
            }
            let (spec, _) = surface.resolve()?;
            let mesh = report::build_mesh(&spec, vmax, nu, nv, &Tolerances::default())?;
            let mut buf = Vec::new();
            mesh.write_obj(&mut buf).expect("writing to memory");
            emit(out.as_deref(), stdout, &buf)
        }
        Command::Gallery => {
            let mut text = String::new();
            for name in synth::PRESET_NAMES {
                let line = match synth::gallery(name, &PresetParams::default())? {
                    Preset::Surface(s) => format!(
                        "{name:<16} surface  base = ({}), director = ({}), u in [{}, {}]",
                        s.base.describe(),
                        s.director.describe(),
                        s.u_min,
                        s.u_max
                    ),
                    Preset::Profile(p) => {
                        format!("{name:<16} profile  {}, s in [{}, {}]", p.description, p.s_min, p.s_max)
                    }
                };
                text.push_str(&line);
                text.push('\n');
            }
            emit(None, stdout, text.as_bytes())
        }
    }
}

impl SurfaceArgs {
    fn resolve(&self) -> Result<(RuledSurfaceSpec, SpecEcho), CliError> {
        let grid = self.u.as_deref().map(parse_grid).transpose()?;
        if let Some(name) = &self.preset {
            let params = PresetParams {
                theta: self.theta,
                c: self.c,
            };
            let mut preset = synth::gallery(name, &params).map_err(usage)?;
            let mut n = DEFAULT_SAMPLES;
            if let Some((lo, hi, count)) = grid {
                preset = preset.with_range(lo, hi).map_err(usage)?;
                n = count;
            }
            let spec = preset
                .to_spec(n)
                .map_err(|e| if e.is_degenerate_surface() { e.into() } else { usage(e) })?;
            let mut echo = SpecEcho::of(&spec);
            if let Preset::Profile(p) = &preset {
                echo.director = format!("integrated profile kappa_q(s) = {}", p.expr);
            }
            let theta = (name == "cone-theta").then(|| self.theta.unwrap_or(synth::DEFAULT_THETA));
            let c = (name == "slant-family-c").then(|| self.c.unwrap_or(synth::DEFAULT_C));
            return Ok((spec, echo.with_preset(name, theta, c)));
        }
        if self.theta.is_some() || self.c.is_some() {
            return Err(CliError::Usage("--theta and --c apply to presets only".into()));
        }
        let director_text = self
            .director
            .as_deref()
            .expect("clap requires --director without --preset");
        let base_text = self.base.as_deref().unwrap_or("0, 0, 0");
        let base = parse_curve(base_text).map_err(|e| annotate(e, "--base", base_text))?;
        let director = parse_curve(director_text).map_err(|e| annotate(e, "--director", director_text))?;
        let (lo, hi, n) = grid.unwrap_or((0.0, 1.0, DEFAULT_SAMPLES));
        let spec =
            RuledSurfaceSpec::new(Curve::from_exprs(base), Curve::from_exprs(director), lo, hi, n).map_err(usage)?;
        let echo = SpecEcho::of(&spec);
        Ok((spec, echo))
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parse error with the offending text and a caret under the position.
fn annotate(e: ExprError, flag: &str, text: &str) -> CliError {
    match e.offset() {
        Some(offset) => CliError::Usage(format!(
            "{flag}: {e}\n  {text}\n  {}^",
            " ".repeat(text[..offset.min(text.len())].chars().count())
        )),
        None => CliError::Usage(format!("{flag}: {e}")),
    }
}

fn parse_number(text: &str, what: &str) -> Result<f64, CliError> {
    let t = text.trim();
    t.parse::<f64>()
        .ok()
        .or_else(|| {
            parse_expression(t)
                .ok()
                .filter(|e| e.is_constant())
                .and_then(|e| crate::expr::eval_value(&e, 0.0).ok())
        })
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("invalid {what} '{t}'")))
}

fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("expected min:max, got '{text}'")));
    }
    Ok((
        parse_number(parts[0], "range bound")?,
        parse_number(parts[1], "range bound")?,
    ))
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("expected --u min:max:count, got '{text}'")));
    }
    let lo = parse_number(parts[0], "grid bound")?;
    let hi = parse_number(parts[1], "grid bound")?;
    let n = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("invalid sample count '{}'", parts[2])))?;
    if !(lo < hi) || n < 3 {
        return Err(CliError::Usage(format!(
            "grid '{text}' needs min < max and at least 3 samples"
        )));
    }
    Ok((lo, hi, n))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn with_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => with_file(path, |w| w.write_all(bytes)),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    }
}
