use serde::Serialize;

use super::config::{ConfigEcho, Format, RunConfig};
use super::format::{fmt_g17, num_opt, to_json_bytes, Num, Table};
use super::{CliError, Command};
use crate::algebra::{algebra_residuals, build_generators};
use crate::bell::bell_scan;
use crate::ladder::{build_shift_pair, ladder_residuals, LADDER_TOLERANCE};
use crate::model::{block_decompose, build_charge, build_hamiltonian};
use crate::operator::{commutator, Atom, Operator, SpaceSpec};
use crate::par::Execution;
use crate::report::{Check, ResidualReport};
use crate::spectrum::{
    dressed_energies, eigen_residual, excited_pair, ground_energy_note, ground_state, theta_n,
    verify_ladder_action,
};
use crate::sweep::spectrum_agreement;

pub const SPECTRUM_TOLERANCE: f64 = 1e-12;
pub const GROUND_TOLERANCE: f64 = 1e-13;
pub const BELL_TOLERANCE: f64 = 1e-12;

pub struct Output {
    pub bytes: Vec<u8>,
    pub pass: bool,
}

#[derive(Serialize)]
struct CheckOut<'a> {
    id: &'a str,
    value: Option<Num>,
    residual: Num,
    tolerance: Num,
    pass: bool,
    informational: bool,
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct NoteOut<'a> {
    id: &'a str,
    note: &'a str,
}

#[derive(Serialize)]
struct Report<'a, D: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: ConfigEcho,
    checks: Vec<CheckOut<'a>>,
    notes: Vec<NoteOut<'a>>,
    data: &'a D,
    pass: bool,
}

fn checks_table(report: &ResidualReport) -> Table {
    let mut t = Table::new(vec!["id", "value", "residual", "tolerance", "pass", "informational", "note"]);
    for c in &report.checks {
        t.push(vec![
            c.id.clone(),
            c.value.map(fmt_g17).unwrap_or_default(),
            fmt_g17(c.residual),
            fmt_g17(c.tolerance),
            c.pass.to_string(),
            c.informational.to_string(),
            c.note.clone().unwrap_or_default(),
        ]);
    }
    t
}

fn emit<D: Serialize>(
    command: &'static str,
    cfg: &RunConfig,
    mut report: ResidualReport,
    data: &D,
    table: Option<Table>,
) -> Result<Output, CliError> {
    report.apply_tolerances(cfg.global_tolerance, &cfg.tol);
    let pass = report.all_pass();
    let bytes = match cfg.format {
        Format::Json => {
            let body = Report {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command,
                config: cfg.echo(),
                checks: report
                    .checks
                    .iter()
                    .map(|c| CheckOut {
                        id: &c.id,
                        value: num_opt(c.value),
                        residual: Num(c.residual),
                        tolerance: Num(c.tolerance),
                        pass: c.pass,
                        informational: c.informational,
                        note: c.note.as_deref(),
                    })
                    .collect(),
                notes: report
                    .checks
                    .iter()
                    .filter(|c| c.informational)
                    .filter_map(|c| c.note.as_deref().map(|note| NoteOut { id: &c.id, note }))
                    .collect(),
                data,
                pass,
            };
            to_json_bytes(&body).map_err(|e| CliError::Io(e.to_string()))?
        }
        Format::Csv => table
            .unwrap_or_else(|| checks_table(&report))
            .to_bytes()
            .map_err(|e| CliError::Io(e.to_string()))?,
    };
    Ok(Output { bytes, pass })
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let space = SpaceSpec::new(cfg.n_max)?;
    match command {
        Command::Spectrum(_) => spectrum(cfg, space),
        Command::Ladder(_) => ladder(cfg, space),
        Command::Verify(_) => verify(cfg, space),
        Command::Algebra(_) => algebra(cfg, space),
        Command::Bell(_) => bell(cfg, space),
    }
}

#[derive(Serialize)]
struct SpectrumRowOut {
    n: usize,
    #[serde(rename = "E_minus")]
    e_minus: Num,
    #[serde(rename = "E_plus")]
    e_plus: Num,
    theta_n: Num,
}

#[derive(Serialize)]
struct SpectrumData {
    #[serde(rename = "E0")]
    e0: Num,
    rows: Vec<SpectrumRowOut>,
}

fn spectrum(cfg: &RunConfig, space: SpaceSpec) -> Result<Output, CliError> {
    let p = &cfg.params;
    let e0 = ground_state(p, space).energy;
    let mut table = Table::new(vec!["kind", "n", "E_minus", "E_plus", "theta_n"]);
    table.push(vec!["ground".into(), String::new(), fmt_g17(e0), String::new(), String::new()]);
    let mut rows = Vec::new();
    for n in cfg.excitations() {
        let (lo, hi) = dressed_energies(n, p);
        let theta = theta_n(n, p)?;
        table.push(vec!["excited".into(), n.to_string(), fmt_g17(lo), fmt_g17(hi), fmt_g17(theta)]);
        rows.push(SpectrumRowOut {
            n,
            e_minus: Num(lo),
            e_plus: Num(hi),
            theta_n: Num(theta),
        });
    }
    let data = SpectrumData { e0: Num(e0), rows };
    emit("spectrum", cfg, ResidualReport::new(), &data, Some(table))
}

#[derive(Serialize)]
struct ElementOut {
    operator: &'static str,
    c: usize,
    row: String,
    col: String,
    re: Num,
    im: Num,
}

fn label(space: SpaceSpec, index: usize) -> String {
    let s = space.state(index);
    let atom = match s.atom {
        Atom::Excited => "e",
        Atom::Ground => "g",
    };
    format!("{atom}{}", s.n)
}

fn ladder(cfg: &RunConfig, space: SpaceSpec) -> Result<Output, CliError> {
    let h = build_hamiltonian(&cfg.params, space);
    let pair = build_shift_pair(&h, &cfg.params, cfg.beta)?;
    let report = ladder_residuals(&h, &pair)?;

    let mut table = Table::new(vec!["operator", "c", "row", "col", "re", "im"]);
    let mut elements = Vec::new();
    let ops: [(&'static str, &Operator); 2] = [("b", &pair.b), ("b_dag", &pair.b_dag)];
    for (name, op) in ops {
        for block in block_decompose(space) {
            for &i in &block.members {
                for &j in &block.members {
                    let z = op.entry(i, j);
                    let (row, col) = (label(space, i), label(space, j));
                    table.push(vec![
                        name.into(),
                        block.c.to_string(),
                        row.clone(),
                        col.clone(),
                        fmt_g17(z.re),
                        fmt_g17(z.im),
                    ]);
                    elements.push(ElementOut {
                        operator: name,
                        c: block.c,
                        row,
                        col,
                        re: Num(z.re),
                        im: Num(z.im),
                    });
                }
            }
        }
    }
    emit("ladder", cfg, report, &elements, Some(table))
}

#[derive(Serialize)]
struct VerifyData {
    #[serde(rename = "E0")]
    e0: Num,
    excitations_checked: usize,
}

fn verify(cfg: &RunConfig, space: SpaceSpec) -> Result<Output, CliError> {
    let p = &cfg.params;
    let h = build_hamiltonian(p, space);
    let mut report = ResidualReport::new();

    let charge = build_charge(space);
    report.push(Check::gated(
        "model.charge_conservation",
        commutator(&h, &charge)?.frobenius_norm(),
        0.0,
    ));

    let pair = build_shift_pair(&h, p, cfg.beta)?;
    report.extend(ladder_residuals(&h, &pair)?);

    let agreement = spectrum_agreement(p, space)?;
    report.push(Check::gated("spectrum.block_oracle", agreement.block_oracle, SPECTRUM_TOLERANCE));
    report.push(Check::gated("spectrum.dense", agreement.dense, SPECTRUM_TOLERANCE));
    report.push(Check::gated("spectrum.energy_mapping", agreement.energy_mapping, LADDER_TOLERANCE));

    let ground = ground_state(p, space);
    report.push(Check::gated("ground.oracle", agreement.ground, GROUND_TOLERANCE).with_value(ground.energy));
    report.push(Check::gated(
        "ground.eigen_residual",
        eigen_residual(&h, &ground.psi, ground.energy),
        GROUND_TOLERANCE,
    ));

    let ns: Vec<usize> = (0..space.fock_cutoff()).collect();
    for &n in &ns {
        let pair_n = excited_pair(n, p, space)?;
        for (tag, psi, e) in [
            ("minus", &pair_n.psi_minus, pair_n.e_minus),
            ("plus", &pair_n.psi_plus, pair_n.e_plus),
        ] {
            let scale = 1f64.max(e.abs());
            report.push(Check::gated(
                format!("spectrum.eigen_residual.{tag}.n{n}"),
                eigen_residual(&h, psi, e) / scale,
                SPECTRUM_TOLERANCE,
            ));
        }
        report.extend(verify_ladder_action(n, p, space, &pair)?.report(LADDER_TOLERANCE));
    }

    report.push(ground_energy_note(p, space));
    let data = VerifyData {
        e0: Num(ground.energy),
        excitations_checked: ns.len(),
    };
    emit("verify", cfg, report, &data, None)
}

#[derive(Serialize)]
struct BlockOut {
    block: usize,
    energy: Num,
    j0: Num,
    xi_sq: Num,
    admissible: bool,
}

fn algebra(cfg: &RunConfig, space: SpaceSpec) -> Result<Output, CliError> {
    let p = &cfg.params;
    let h = build_hamiltonian(p, space);
    let pair = build_shift_pair(&h, p, cfg.beta)?;
    let gens = build_generators(&h, &pair, p, cfg.nu)?;
    let report = algebra_residuals(&gens, &h, &pair, p)?;
    let blocks: Vec<BlockOut> = gens
        .xi_sq_by_block
        .iter()
        .map(|b| BlockOut {
            block: b.block,
            energy: Num(b.energy),
            j0: Num(b.j0),
            xi_sq: Num(b.xi_sq),
            admissible: b.admissible,
        })
        .collect();
    emit("algebra", cfg, report, &blocks, None)
}

#[derive(Serialize)]
struct BellOut {
    n: usize,
    theta_n: Num,
    chsh_paper: Num,
    chsh_closed_form: Num,
    chsh_max: Num,
    violated: bool,
}

fn bell(cfg: &RunConfig, space: SpaceSpec) -> Result<Output, CliError> {
    let results = bell_scan(&cfg.excitations(), &cfg.params, space, Execution::default())?;
    let mut report = ResidualReport::new();
    let mut table = Table::new(vec!["n", "theta_n", "chsh_paper", "chsh_closed_form", "chsh_max", "violated"]);
    let mut rows = Vec::new();
    for r in &results {
        report.push(
            Check::gated(
                format!("bell.closed_form.n{}", r.n),
                (r.chsh_paper - r.chsh_closed_form).abs(),
                BELL_TOLERANCE,
            )
            .with_value(r.chsh_paper),
        );
        report.push(
            Check::gated(format!("bell.max.n{}", r.n), (r.chsh_paper - r.chsh_max).abs(), BELL_TOLERANCE)
                .with_value(r.chsh_max),
        );
        table.push(vec![
            r.n.to_string(),
            fmt_g17(r.theta),
            fmt_g17(r.chsh_paper),
            fmt_g17(r.chsh_closed_form),
            fmt_g17(r.chsh_max),
            r.violated.to_string(),
        ]);
        rows.push(BellOut {
            n: r.n,
            theta_n: Num(r.theta),
            chsh_paper: Num(r.chsh_paper),
            chsh_closed_form: Num(r.chsh_closed_form),
            chsh_max: Num(r.chsh_max),
            violated: r.violated,
        });
    }
    emit("bell", cfg, report, &rows, Some(table))
}
