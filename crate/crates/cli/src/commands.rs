use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use entropygate_core::convexity::{
    default_conserved_region, default_extensive_region, default_lagrangian_region,
    default_temperature_region,
};
use entropygate_core::eos::linspace;
use entropygate_core::euler1d::{self, observed_order, Boundary, InitialCondition, RunOutput};
use entropygate_core::{
    certify_eta_convex, certify_sigma_concave, certify_temperature_positive, certify_wagner,
    equivalence_check, thermo, CertifyConfig, ConservedState, ConvexityReport, DerivativeRoute,
    EntropyTable, EosModel, Error, PolytropicParams, Region, Sampling, SimConfig, Verdict,
};

use crate::args::{
    BoundaryName, CertifyArgs, Check, Cli, Command, InitialName, ModelArgs, ModelName,
    SamplingName, SimulateArgs, TabulateArgs, ThermoArgs,
};
use crate::report::ReportDocument;

/// Per-step entropy change below this counts as a decrease.
pub const ENTROPY_DECREASE_TOL: f64 = 1e-12;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ABORT: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::StepRejected { .. }) => EXIT_ABORT,
            _ => EXIT_USAGE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Run a parsed command line, writing human-readable output to `out`.
/// Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Thermo(a) => cmd_thermo(&a, out),
        Command::Certify(a) => cmd_certify(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Tabulate(a) => cmd_tabulate(&a, out),
    }
}

pub fn load_tabulated(path: &Path) -> Result<EosModel, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(EosModel::tabulated(EntropyTable::parse(&text)?))
}

pub fn build_model(a: &ModelArgs) -> Result<EosModel, CliError> {
    let params = |default_gamma: f64| {
        PolytropicParams::with_reference(a.gamma.unwrap_or(default_gamma), a.cv, a.m0, a.v0, a.e0)
    };
    Ok(match a.model {
        ModelName::Polytropic => EosModel::Polytropic(params(1.4)?),
        ModelName::Pathological => EosModel::PathologicalGamma(params(0.8)?),
        ModelName::NegTemp => EosModel::negative_temperature(),
        ModelName::Tabulated => {
            let path = a
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage("--model tabulated needs --table PATH".into()))?;
            load_tabulated(path)?
        }
    })
}

fn describe_model(doc: &mut ReportDocument, a: &ModelArgs, model: &EosModel) {
    doc.text("model.kind", model.kind().name());
    if let Some(p) = model.polytropic_params() {
        doc.num("model.gamma", p.gamma);
        doc.num("model.cv", p.cv);
        doc.num("model.m0", p.m0);
        doc.num("model.v0", p.v0);
        doc.num("model.e0", p.e0);
    }
    if let (EosModel::Tabulated(t), Some(path)) = (model, &a.table) {
        doc.text("model.table", path.display());
        doc.int("model.table.rho_points", t.rho_axis().len());
        doc.int("model.table.e_points", t.e_axis().len());
    }
}

fn stamp(doc: &mut ReportDocument, no_timestamp: bool) {
    if !no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc.comment(format!("generated at unix time {secs}"));
    }
}

fn emit_report(doc: &ReportDocument, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    if path == Path::new("-") {
        write!(out, "{doc}").map_err(stdout_err)
    } else {
        fs::write(path, doc.to_string()).map_err(io_err(path))
    }
}

/// Parse `lo:hi,lo:hi,...` into exactly `N` intervals.
pub fn parse_bounds<const N: usize>(text: &str) -> Result<[(f64, f64); N], CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(CliError::Usage(format!(
            "region `{text}` needs {N} intervals `lo:hi`, found {}",
            parts.len()
        )));
    }
    let mut bounds = [(0.0, 0.0); N];
    for (b, part) in bounds.iter_mut().zip(parts) {
        *b = parse_interval(part)?;
    }
    Ok(bounds)
}

pub fn parse_interval(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("interval `{text}` is not of the form lo:hi"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn cmd_thermo(a: &ThermoArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let model = build_model(&a.model)?;
    let pt = thermo::thermo_point(&model, a.rho, a.e)?;
    let mut w = || -> io::Result<()> {
        writeln!(out, "model = {}", model.kind().name())?;
        writeln!(out, "rho = {}", pt.rho)?;
        writeln!(out, "e = {}", pt.e)?;
        writeln!(out, "s = {}", pt.s)?;
        writeln!(out, "T = {}", pt.temperature)?;
        writeln!(out, "p = {}", pt.pressure)?;
        writeln!(out, "dsigma_drho = {}", pt.dsigma_drho)?;
        writeln!(out, "dsigma_de = {}", pt.dsigma_de)?;
        if pt.temperature < 0.0 {
            writeln!(
                out,
                "WARNING: NEGATIVE-TEMPERATURE state (T = {})",
                pt.temperature
            )?;
        }
        Ok(())
    };
    w().map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn summary_line(name: &str, r: &ConvexityReport) -> String {
    format!(
        "{name}: {} (worst eigenvalue {:.3e} at [{:.4}, {:.4}, {:.4}], tolerance {:.2e}, {} samples, {} skipped)",
        r.verdict,
        r.worst_eigenvalue,
        r.worst_point[0],
        r.worst_point[1],
        r.worst_point[2],
        r.tolerance_used,
        r.samples_checked,
        r.samples_skipped
    )
}

fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let model = build_model(&a.model)?;
    let cfg = CertifyConfig {
        tol_rel: a.tol_rel,
        step_rel: a.step_rel,
        route: if a.stencil {
            DerivativeRoute::Stencil
        } else {
            DerivativeRoute::Jet
        },
        e_floor: a.e_floor,
    };
    cfg.validate()?;
    let sampling = match a.sampling {
        SamplingName::Grid => Sampling::Grid,
        SamplingName::Random => Sampling::Random { seed: a.seed },
    };
    let n = a.samples;
    let region3 = |flag: &Option<String>, default: fn(usize, Sampling) -> Region<3>| match flag {
        Some(text) => Ok::<_, CliError>(Region::new(parse_bounds::<3>(text)?, n, sampling)?),
        None => Ok(default(n, sampling)),
    };
    let ext = region3(&a.extensive, default_extensive_region)?;
    let cons = region3(&a.conserved, default_conserved_region)?;
    let lag = region3(&a.lagrangian, default_lagrangian_region)?;
    let temp = match &a.temperature {
        Some(text) => Region::new(parse_bounds::<2>(text)?, n, sampling)?,
        None => default_temperature_region(n, sampling),
    };

    let mut doc = ReportDocument::new("certify");
    stamp(&mut doc, a.no_timestamp);
    describe_model(&mut doc, &a.model, &model);
    doc.int("config.samples", n);
    match sampling {
        Sampling::Grid => doc.text("config.sampling", "grid"),
        Sampling::Random { seed } => {
            doc.text("config.sampling", "random");
            doc.text("config.seed", seed);
        }
    }
    doc.num("config.tol_rel", cfg.tol_rel);
    doc.num("config.step_rel", cfg.step_rel);
    doc.num("config.e_floor", cfg.e_floor);
    doc.text("config.route", cfg.route.name());

    let mut lines = Vec::new();
    let mut all_pass = true;
    let mut tally = |v: Verdict| all_pass &= v.is_certified();
    match a.check {
        Check::Sigma => {
            let r = certify_sigma_concave(&model, &ext, &cfg)?;
            tally(r.verdict);
            lines.push(summary_line("sigma", &r));
            doc.convexity("sigma", &r);
        }
        Check::Eta => {
            let r = certify_eta_convex(&model, &cons, &cfg)?;
            tally(r.verdict);
            lines.push(summary_line("eta", &r));
            doc.convexity("eta", &r);
        }
        Check::Wagner => {
            let r = certify_wagner(&model, &lag, &cfg)?;
            tally(r.verdict);
            lines.push(summary_line("wagner", &r));
            doc.convexity("wagner", &r);
        }
        Check::Temperature => {
            let r = certify_temperature_positive(&model, &temp)?;
            all_pass &= r.all_positive;
            lines.push(format!(
                "temperature: {} (min T {:.4} at rho {:.4}, e {:.4}; {} of {} samples non-positive)",
                r.verdict_str(),
                r.min_temperature,
                r.min_point[0],
                r.min_point[1],
                r.violations,
                r.samples_checked
            ));
            doc.temperature("temperature", &r);
        }
        Check::All => {
            let v = equivalence_check(&model, &ext, &cons, &cfg)?;
            let w = certify_wagner(&model, &lag, &cfg)?;
            lines.push(summary_line("sigma", &v.sigma));
            lines.push(format!(
                "temperature: {} (min T {:.4}, {} of {} samples non-positive)",
                v.temperature.verdict_str(),
                v.temperature.min_temperature,
                v.temperature.violations,
                v.temperature.samples_checked
            ));
            lines.push(summary_line("eta", &v.eta));
            lines.push(summary_line("wagner", &w));
            for warning in &v.warnings {
                lines.push(format!("warning: {warning}"));
            }
            let (thin, excess) = v.thinnest_certificate();
            lines.push(format!(
                "thinnest certificate: {thin} (normalized excess {excess:.3e})"
            ));
            lines.push(format!(
                "PROP3: {}",
                if v.consistent {
                    "consistent"
                } else {
                    "inconsistent"
                }
            ));
            all_pass &= v.sigma_concave && v.temperature_positive && v.eta_convex;
            all_pass &= v.consistent && w.verdict.is_certified();

            doc.convexity("sigma", &v.sigma);
            doc.temperature("temperature", &v.temperature);
            let [(r0, r1), (e0, e1)] = v.temperature_region.bounds;
            doc.num("temperature.region.rho_lo", r0);
            doc.num("temperature.region.rho_hi", r1);
            doc.num("temperature.region.e_lo", e0);
            doc.num("temperature.region.e_hi", e1);
            doc.convexity("eta", &v.eta);
            doc.convexity("wagner", &w);
            doc.flag("equivalence.sigma_concave", v.sigma_concave);
            doc.flag("equivalence.temperature_positive", v.temperature_positive);
            doc.flag("equivalence.eta_convex", v.eta_convex);
            doc.flag("equivalence.consistent", v.consistent);
            doc.text("equivalence.thinnest", thin);
            doc.int("equivalence.witnesses", v.witnesses.len());
        }
    }
    let code = if all_pass { EXIT_OK } else { EXIT_VIOLATION };
    doc.int("exit_code", code as usize);

    for line in &lines {
        writeln!(out, "{line}").map_err(stdout_err)?;
    }
    if let Some(path) = &a.report {
        emit_report(&doc, path, out)?;
    }
    Ok(code)
}

/// `diag.csv` → `diag_n200.csv` when several resolutions share one path.
pub fn suffixed(path: &Path, n: usize, multiple: bool) -> PathBuf {
    if !multiple {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_n{n}.{}", ext.to_string_lossy()),
        None => format!("{stem}_n{n}"),
    };
    path.with_file_name(name)
}

/// Rows of `rho,q,eps`; blank lines, `#` comments and a non-numeric header are skipped.
pub fn load_cells(path: &Path) -> Result<Vec<ConservedState>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut cells = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => cells.push(ConservedState::new(v[0], v[1], v[2])?),
            Err(_) if i == 0 => continue,
            _ => {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `rho,q,eps`",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(cells)
}

fn sim_config(a: &SimulateArgs, model: EosModel, n: usize) -> Result<SimConfig, CliError> {
    let cfg = match a.initial {
        InitialName::Sod => SimConfig::sod(model, n),
        InitialName::Smooth => SimConfig::smooth(model, n),
    };
    apply_overrides(a, cfg)
}

fn apply_overrides(a: &SimulateArgs, mut cfg: SimConfig) -> Result<SimConfig, CliError> {
    if let Some(t) = a.t_end {
        cfg.t_end = t;
    }
    if let Some(b) = a.boundary {
        cfg.boundary = match b {
            BoundaryName::Periodic => Boundary::Periodic,
            BoundaryName::Transmissive => Boundary::Transmissive,
        };
    }
    cfg.cfl = a.cfl;
    cfg.domain = parse_interval(&a.domain)?;
    cfg.wave_speed_factor = a.wave_speed_factor;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if a.n.is_empty() {
        return Err(CliError::Usage("--n needs at least one cell count".into()));
    }
    if a.refine && a.n.len() < 2 {
        return Err(CliError::Usage(
            "--refine needs at least two cell counts in --n".into(),
        ));
    }
    let model = build_model(&a.model)?;
    let configs = match &a.cells {
        Some(path) => {
            if a.refine {
                return Err(CliError::Usage(
                    "--refine cannot be combined with --cells".into(),
                ));
            }
            let cells = load_cells(path)?;
            let mut cfg = SimConfig::sod(model.clone(), cells.len());
            cfg.initial = InitialCondition::Custom(cells);
            vec![apply_overrides(a, cfg)?]
        }
        None => {
            a.n.iter()
                .map(|&n| sim_config(a, model.clone(), n))
                .collect::<Result<Vec<_>, _>>()?
        }
    };

    let mut doc = ReportDocument::new("simulate");
    stamp(&mut doc, a.no_timestamp);
    describe_model(&mut doc, &a.model, &model);
    let first = &configs[0];
    doc.text(
        "sim.initial",
        match first.initial {
            InitialCondition::Sod => "sod",
            InitialCondition::SmoothWave => "smooth",
            InitialCondition::Custom(_) => "custom",
        },
    );
    doc.num("sim.cfl", first.cfl);
    doc.num("sim.t_end", first.t_end);
    doc.text(
        "sim.boundary",
        match first.boundary {
            Boundary::Periodic => "periodic",
            Boundary::Transmissive => "transmissive",
        },
    );

    let multiple = configs.len() > 1;
    let mut drifts = Vec::new();
    let mut decreased = false;
    for cfg in &configs {
        let n = cfg.n;
        let run: RunOutput = euler1d::run(cfg)?;
        let steps = run.diagnostics.len() - 1;
        let drift = (run.state.entropy_total - run.initial_entropy).abs();
        drifts.push(drift);
        let ok = run.min_ds >= -ENTROPY_DECREASE_TOL;
        decreased |= !ok;
        let mut w = || -> io::Result<()> {
            writeln!(out, "n = {n}: {steps} steps to t = {}", run.state.t)?;
            writeln!(
                out,
                "min dS per step {} 0 (min = {:.3e})",
                if ok { "≥" } else { "<" },
                run.min_ds
            )?;
            writeln!(out, "total entropy produced = {:.6e}", run.entropy_produced)?;
            writeln!(out, "entropy drift |S(t_end) - S(0)| = {drift:.6e}")
        };
        w().map_err(stdout_err)?;

        let key = format!("sim.n{n}");
        doc.int(format!("{key}.steps"), steps);
        doc.num(format!("{key}.initial_entropy"), run.initial_entropy);
        doc.num(format!("{key}.final_entropy"), run.state.entropy_total);
        doc.num(format!("{key}.min_ds"), run.min_ds);
        doc.num(format!("{key}.entropy_produced"), run.entropy_produced);
        doc.num(format!("{key}.drift"), drift);
        doc.num(format!("{key}.budget_residual_l1"), run.budget_residual_l1);

        if let Some(p) = &a.diagnostics {
            let path = suffixed(p, n, multiple);
            let file = fs::File::create(&path).map_err(io_err(&path))?;
            euler1d::write_diagnostics(io::BufWriter::new(file), &run.diagnostics)
                .map_err(io_err(&path))?;
        }
        if let Some(p) = &a.profile {
            let path = suffixed(p, n, multiple);
            let mut buf = Vec::new();
            euler1d::write_profile(&mut buf, &run.state, cfg)?;
            fs::write(&path, buf).map_err(io_err(&path))?;
        }
    }
    if a.refine {
        let order = observed_order(&a.n, &drifts);
        writeln!(
            out,
            "observed entropy-drift order = {order:.4} (N {} -> {})",
            a.n[0],
            a.n[a.n.len() - 1]
        )
        .map_err(stdout_err)?;
        doc.num("sim.refine.order", order);
    }
    let code = if decreased { EXIT_VIOLATION } else { EXIT_OK };
    doc.int("exit_code", code as usize);
    if let Some(path) = &a.report {
        emit_report(&doc, path, out)?;
    }
    Ok(code)
}

fn cmd_tabulate(a: &TabulateArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if a.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let model = build_model(&a.model)?;
    let (r0, r1) = parse_interval(&a.rho_range)?;
    let (e0, e1) = parse_interval(&a.e_range)?;
    let table = EntropyTable::from_fn(
        linspace(r0, r1, a.points),
        linspace(e0, e1, a.points),
        |r, e| model.sigma_specific(r, e),
    )?;
    fs::write(&a.out, table.to_text()).map_err(io_err(&a.out))?;
    writeln!(
        out,
        "wrote {}×{} table to {}",
        a.points,
        a.points,
        a.out.display()
    )
    .map_err(stdout_err)?;
    Ok(EXIT_OK)
}
