//! Subcommand bodies. Each returns a table plus diagnostics for stderr.

use std::fmt;

use gaussian_esd::channel::{sample_trajectory_with, uniform_grid, Evolution};
use gaussian_esd::esd::{
    initial_entanglement_threshold, mixedness_sweep_with, sign_grid_with, t_esd_analytic_symmetric, t_esd_numeric,
    EsdKind, EsdResult, GridVariable,
};
use gaussian_esd::fock::{certified_grid, run_suite, CERTIFIED};
use gaussian_esd::gaussian::GaussianParams;
use gaussian_esd::{ChannelParams, Error, Execution};

use crate::config::{ConfigError, RunConfig, SweepVariable};
use crate::output::{format_number, Cell, Table};

/// Largest oracle/closed-form deviation accepted by `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(String),
    Oracle(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Oracle(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Domain(m) | CliError::Oracle(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Result of a subcommand: the data table, human-readable notes and
/// whether the command succeeded.
pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(table: Table, notes: Vec<String>) -> Self {
        Outcome { table, notes, failure: None }
    }
}

fn kind_name(kind: EsdKind) -> &'static str {
    match kind {
        EsdKind::FiniteTime => "FiniteTime",
        EsdKind::Asymptotic => "Asymptotic",
        EsdKind::InitiallySeparable => "InitiallySeparable",
    }
}

fn sign(entangled: bool, s: f64) -> i64 {
    if entangled {
        -1
    } else if s == 0.0 {
        0
    } else {
        1
    }
}

pub fn evolve(cfg: &RunConfig, exec: Execution) -> Result<Outcome, CliError> {
    let (p, ch) = (cfg.params()?, cfg.channel_params()?);
    let traj = sample_trajectory_with(exec, &p, &ch, cfg.time.t_max, cfg.time.n_points)?;
    let mut table = Table::new(&["t", "n1", "n2", "m1", "m2", "ms", "mc", "S"]);
    for ((t, cm), s) in traj.times.iter().zip(&traj.states).zip(&traj.simon) {
        let mut row: Vec<Cell> = vec![(*t).into()];
        row.extend(cm.as_array().iter().map(|&x| Cell::from(x)));
        row.push((*s).into());
        table.push(row);
    }
    let note = match traj.first_separable_time() {
        Some(t) => {
            format!("{} sign change(s); first separable sample at t = {}", traj.sign_changes(), format_number(t))
        }
        None if traj.entangled[0] => "entangled at every sample".into(),
        None => "separable at every sample".into(),
    };
    Ok(Outcome::ok(table, vec![note]))
}

fn analytic_applies(p: &GaussianParams, ch: &ChannelParams) -> bool {
    p.z1 == p.z2 && p.nu1 == 0.0 && p.nu2 == 0.0 && p.r > 0.0 && ch.gamma1 == ch.gamma2 && ch.is_zero_temperature()
}

pub fn esd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (p, ch) = (cfg.params()?, cfg.channel_params()?);
    let numeric = t_esd_numeric(&p, &ch, cfg.time.t_max)?;
    let mut table = Table::new(&["quantity", "value"]);
    let mut row = |k: &str, v: Cell| table.push(vec![k.into(), v]);
    row("kind", kind_name(numeric.kind()).into());
    row("numeric_t_esd", numeric.t_esd().into());
    row("numeric_horizon", numeric.horizon.into());

    let analytic: Option<Result<EsdResult, Error>> =
        analytic_applies(&p, &ch).then(|| t_esd_analytic_symmetric(p.z1, p.r, ch.gamma1));
    match &analytic {
        None => row("analytic", "not applicable".into()),
        Some(Ok(a)) => {
            row("analytic_kind", kind_name(a.kind()).into());
            row("analytic_t_esd", a.t_esd().into());
        }
        Some(Err(e)) => row("analytic", format!("error: {e}").into()),
    }
    let rel = match (&analytic, numeric.t_esd()) {
        (Some(Ok(a)), Some(n)) => a.t_esd().map(|a| (a - n).abs() / n),
        _ => None,
    };
    row("relative_difference", rel.into());
    let evo = Evolution::new(&p, &ch);
    row("initial_simon", evo.simon_at(0.0).into());
    if p.z1 == 0.0 && p.z2 == 0.0 {
        row("mixedness_threshold_r0", initial_entanglement_threshold(p.nu1, p.nu2)?.into());
    }

    let mut notes = vec![format!("kind: {}", kind_name(numeric.kind()))];
    if numeric.kind() == EsdKind::Asymptotic {
        notes.push(format!("no separation found up to t = {}", format_number(cfg.time.t_max)));
    }
    if let Some(Ok(a)) = &analytic {
        if a.kind() != numeric.kind() {
            notes.push(format!(
                "analytic and numeric kinds differ ({} vs {}); the numeric scan stops at t_max",
                kind_name(a.kind()),
                kind_name(numeric.kind())
            ));
        }
    }
    Ok(Outcome::ok(table, notes))
}

pub fn sweep(cfg: &RunConfig, exec: Execution) -> Result<Outcome, CliError> {
    let s = cfg.sweep.ok_or_else(|| CliError::Config("the sweep command needs a [sweep] section".into()))?;
    let (p, ch) = (cfg.params()?, cfg.channel_params()?);
    let values = uniform_grid(s.range[0], s.range[1], s.steps)?;
    match s.variable {
        SweepVariable::Z0 | SweepVariable::R0 => {
            let variable = if s.variable == SweepVariable::Z0 { GridVariable::Z0 } else { GridVariable::R0 };
            let t = uniform_grid(0.0, cfg.time.t_max, cfg.time.n_points)?;
            let grid = sign_grid_with(exec, &p, &ch, variable, &values, &t)?;
            let mut table = Table::new(&[s.variable.name(), "t", "sign"]);
            for (v, row) in grid.values.iter().zip(&grid.signs) {
                for (t, sg) in grid.t.iter().zip(row) {
                    table.push(vec![(*v).into(), (*t).into(), i64::from(*sg).into()]);
                }
            }
            let dies: Vec<bool> = (0..grid.values.len()).map(|i| grid.first_separable(i).is_some()).collect();
            let mut notes: Vec<String> = dies
                .windows(2)
                .enumerate()
                .filter(|(_, w)| w[0] != w[1])
                .map(|(i, _)| {
                    format!(
                        "separation within t_max switches between {name} = {} and {name} = {}",
                        format_number(values[i]),
                        format_number(values[i + 1]),
                        name = s.variable.name()
                    )
                })
                .collect();
            if notes.is_empty() {
                notes.push(format!("no boundary in {} within the grid", s.variable.name()));
            }
            Ok(Outcome::ok(table, notes))
        }
        SweepVariable::Nu => {
            let cells = mixedness_sweep_with(exec, &p, &values, &values)?;
            let mut table = Table::new(&["nu1", "nu2", "S0", "sign"]);
            let mut separable = 0;
            for c in &cells {
                let sg = sign(c.simon < 0.0, c.simon);
                separable += usize::from(sg >= 0);
                table.push(vec![c.nu1.into(), c.nu2.into(), c.simon.into(), sg.into()]);
            }
            Ok(Outcome::ok(table, vec![format!("{separable} of {} cells initially separable", cells.len())]))
        }
        SweepVariable::T => {
            let evo = Evolution::new(&p, &ch);
            let rows = gaussian_esd::par::map(exec, &values, |&t| (t, evo.simon_at(t), evo.is_entangled_at(t)));
            let mut table = Table::new(&["t", "S", "sign"]);
            for (t, s, e) in rows {
                table.push(vec![t.into(), s.into(), sign(e, s).into()]);
            }
            Ok(Outcome::ok(table, Vec::new()))
        }
    }
}

pub fn oracle_check(cfg: &RunConfig, exec: Execution) -> Result<Outcome, CliError> {
    let o = &cfg.oracle;
    let cases = if o.suite { certified_grid() } else { vec![(cfg.params()?, cfg.channel_params()?)] };
    let t_end = *o.checkpoints.last().expect("validated checkpoints");
    let mut notes = Vec::new();
    for (p, ch) in &cases {
        let v = CERTIFIED.violations(p, ch, t_end, o.cutoff);
        if !v.is_empty() {
            log::warn!("outside certified domain ({}); results are advisory", v.join(", "));
        }
    }

    let results = run_suite(exec, &cases, &o.checkpoints, o.cutoff, o.dt);
    let mut table = Table::new(&[
        "case", "r", "z1", "z2", "nu1", "nu2", "nb1", "nb2", "t", "dev_n1", "dev_n2", "dev_m1", "dev_m2", "dev_ms",
        "dev_mc", "status",
    ]);
    let mut worst = [0.0_f64; 6];
    let mut errors = Vec::new();
    let mut cutoff_failure = false;
    for (k, case) in results.iter().enumerate() {
        let (p, ch) = (&case.params, &case.channel);
        let head: Vec<Cell> = vec![
            (k as i64).into(),
            p.r.into(),
            p.z1.into(),
            p.z2.into(),
            p.nu1.into(),
            p.nu2.into(),
            ch.nb1.into(),
            ch.nb2.into(),
        ];
        match &case.outcome {
            Ok(points) => {
                for c in points {
                    let dev = c.deviation();
                    for (w, d) in worst.iter_mut().zip(dev) {
                        *w = w.max(d);
                    }
                    let mut row = head.clone();
                    row.push(c.time.into());
                    row.extend(dev.iter().map(|&d| Cell::from(d)));
                    row.push(if c.max_deviation() < ORACLE_TOL { "pass" } else { "fail" }.into());
                    table.push(row);
                }
            }
            Err(e) => {
                cutoff_failure |= matches!(e, Error::CutoffInsufficient { .. });
                errors.push(format!("case {k}: {e}"));
                let mut row = head;
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                row.push(e.to_string().into());
                table.push(row);
            }
        }
    }
    let max = worst.iter().fold(0.0_f64, |a, &b| a.max(b));
    notes.push(format!(
        "max deviation n1 {} n2 {} m1 {} m2 {} ms {} mc {} (tolerance {})",
        format_number(worst[0]),
        format_number(worst[1]),
        format_number(worst[2]),
        format_number(worst[3]),
        format_number(worst[4]),
        format_number(worst[5]),
        format_number(ORACLE_TOL)
    ));
    let failure = if !errors.is_empty() {
        let what = if cutoff_failure { "cutoff insufficient" } else { "integration failed" };
        Some(CliError::Oracle(format!("{what}: {}", errors.join("; "))))
    } else if max >= ORACLE_TOL {
        Some(CliError::Oracle(format!("deviation {} exceeds {}", format_number(max), format_number(ORACLE_TOL))))
    } else {
        notes.push(format!("PASS: {} case(s) within tolerance", results.len()));
        None
    };
    Ok(Outcome { table, notes, failure })
}
