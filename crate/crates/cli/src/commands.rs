use std::path::{Path, PathBuf};

use shearbeam::energy::{check_monotone, default_window, fit_decay, EnergyRecorder};
use shearbeam::mms::{convergence_table, observed_slope, Level, ManufacturedCase};
use shearbeam::model::{profile, validate, ConfigFile, InitialData};
use shearbeam::output::{
    csv_bytes, decay_row, fmt_f64, read_energy_csv, write_convergence_csv, write_decay_summary,
    write_energy_csv, write_loglog_csv, ProbeRecorder, SnapshotRecorder, DECAY_HEADER,
};
use shearbeam::stepper::{run, SourceTerms};
use shearbeam::transform::{eta_convergence, solve_eta, EtaProblem};
use shearbeam::femesh::UniformMesh;

use crate::args::{
    ConvergenceArgs, DtRule, EnergyArgs, EtaCheckArgs, ParamArgs, SimulateArgs, SourceCase,
    OUTPUT_DIR_ENV,
};
use crate::CliError;

type CliResult<T = ()> = Result<T, CliError>;

fn load_config(path: Option<&Path>) -> CliResult<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            if !p.is_file() {
                return Err(CliError::Config(format!("{}", p.display())));
            }
            ConfigFile::load(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn apply_params(cfg: &mut ConfigFile, params: &ParamArgs) {
    for (key, value) in params.pairs() {
        if let Some(v) = value {
            *cfg.params.field_mut(key).expect("flag names match config keys") = v;
        }
    }
}

/// Flag, then environment, then configuration file.
fn output_dir(flag: Option<PathBuf>, configured: PathBuf) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or(configured)
}

pub fn simulate(a: SimulateArgs) -> CliResult {
    let mut cfg = load_config(a.config.as_deref())?;
    apply_params(&mut cfg, &a.params);
    let c = &mut cfg.config;
    if let Some(m) = a.elements {
        c.elements = m;
    }
    if let Some(dt) = a.dt {
        c.dt = dt;
    }
    if let Some(t) = a.final_time {
        c.final_time = t;
    }
    if let Some(p) = a.probes {
        c.probes = p;
    }
    if let Some(s) = a.snapshot_stride {
        c.snapshot_stride = s;
    }
    c.output_dir = output_dir(a.output_dir, c.output_dir.clone());

    let setup = validate(cfg.params, cfg.config)?;
    let mesh = setup.mesh();
    let length = setup.params.length;
    let case = ManufacturedCase::reference(setup.params);
    let (init, sources): (InitialData, Option<&dyn SourceTerms>) = match a.sources {
        SourceCase::None => (InitialData::reference(length), None),
        SourceCase::Mms => {
            if (length - 1.0).abs() > 1e-12 {
                return Err(CliError::Config(
                    "the mms case is defined on L = 1 only".into(),
                ));
            }
            (case.initial_data(), Some(&case))
        }
    };
    init.check_boundary(length, 1e-12)?;

    let mut energy = EnergyRecorder::new(setup.params, &mesh);
    let mut probes = ProbeRecorder::new(&mesh, &setup.config.probes, 1);
    let mut snapshots = SnapshotRecorder::new(&mesh, setup.config.snapshot_stride);
    let end = run(
        &setup,
        &init,
        sources,
        &mut [&mut energy, &mut probes, &mut snapshots],
    )?;

    let dir = &setup.config.output_dir;
    write_energy_csv(&dir.join("energy.csv"), &energy.series)?;
    probes.write(dir)?;
    snapshots.write(&dir.join("snapshots.csv"))?;

    let series = &energy.series;
    let report = check_monotone(series, 1e-9);
    println!("steps={}", setup.steps);
    println!("T={}", fmt_f64(setup.config.final_time));
    println!("E0={}", fmt_f64(series.e[0]));
    println!("EN={}", fmt_f64(*series.e.last().expect("nonempty series")));
    println!("monotone_violations={}", report.violations.len());
    if a.sources == SourceCase::None {
        match fit_decay(series, default_window(series)) {
            Ok(d) => {
                write_decay_summary(&dir.join("decay.csv"), &d)?;
                println!("sigma1_hat={}", fmt_f64(d.sigma1_hat));
                println!("fit_residual={}", fmt_f64(d.fit_residual));
            }
            Err(e) => println!("decay_fit=unavailable ({e})"),
        }
    } else {
        let err = shearbeam::mms::error_norm(&end, &case, &mesh, end.t);
        println!("error={}", fmt_f64(err));
    }
    println!("output_dir={}", dir.display());
    Ok(())
}

pub fn convergence(a: ConvergenceArgs) -> CliResult {
    let mut cfg = load_config(a.config.as_deref())?;
    apply_params(&mut cfg, &a.params);
    cfg.params.validate()?;
    if (cfg.params.length - 1.0).abs() > 1e-12 {
        return Err(CliError::Config("the mms case is defined on L = 1 only".into()));
    }
    if !(a.c > 0.0) {
        return Err(CliError::Config(format!("--c must be positive, got {}", a.c)));
    }
    let levels: Vec<Level> = match a.dt_rule {
        DtRule::COverM => a.levels.iter().map(|&m| Level::with_dt_rule(m, a.c)).collect(),
    };
    if levels.is_empty() {
        return Err(CliError::Config("no levels given".into()));
    }
    let case = ManufacturedCase::reference(cfg.params);
    let rows = convergence_table(&case, &levels, a.final_time, a.jobs)?;

    let dir = output_dir(a.output_dir, cfg.config.output_dir);
    write_convergence_csv(&dir.join("convergence.csv"), &rows)?;
    write_loglog_csv(&dir.join("error_vs_h_plus_dt.csv"), &rows)?;
    print!(
        "{}",
        String::from_utf8(csv_bytes(
            &shearbeam::output::CONVERGENCE_HEADER,
            shearbeam::output::convergence_rows(&rows)
        ))
        .expect("CSV is UTF-8")
    );
    if let Some(slope) = observed_slope(&rows) {
        println!("slope={}", fmt_f64(slope));
    }
    println!("output_dir={}", dir.display());
    Ok(())
}

pub fn energy(a: EnergyArgs) -> CliResult {
    let series = read_energy_csv(&a.input)?;
    if series.is_empty() {
        return Err(CliError::Config(format!("{}: no samples", a.input.display())));
    }
    let window = match a.window.as_deref() {
        None => default_window(&series),
        Some([start, end]) => (*start, *end),
        Some(_) => return Err(CliError::Config("--window takes `start,end`".into())),
    };
    let summary = fit_decay(&series, window)?;
    let report = check_monotone(&series, a.tol);
    if let Some(path) = &a.output {
        write_decay_summary(path, &summary)?;
    }
    print!(
        "{}",
        String::from_utf8(csv_bytes(&DECAY_HEADER, [decay_row(&summary)])).expect("CSV is UTF-8")
    );
    println!("monotone_violations={}", report.violations.len());
    Ok(())
}

pub fn eta_check(a: EtaCheckArgs) -> CliResult {
    let mut cfg = load_config(a.config.as_deref())?;
    apply_params(&mut cfg, &a.params);
    cfg.params.validate()?;
    let results = eta_convergence(cfg.params, &a.levels)?;
    println!("M,error,order");
    let mut prev: Option<(usize, f64)> = None;
    for &(m, err) in &results {
        let order = prev
            .map(|(pm, pe)| fmt_f64((pe / err).ln() / (m as f64 / pm as f64).ln()))
            .unwrap_or_default();
        println!("{m},{},{order}", fmt_f64(err));
        prev = Some((m, err));
    }
    let zero = profile(|_| 0.0);
    let problem = EtaProblem {
        theta0: zero.clone(),
        theta1: zero.clone(),
        phi1: zero,
        params: cfg.params,
    };
    let m = a.levels.first().copied().unwrap_or(20);
    let eta = solve_eta(&problem, &UniformMesh::new(cfg.params.length, m)?)?;
    println!("zero_case_max_abs={}", fmt_f64(eta.max_abs()));
    Ok(())
}
