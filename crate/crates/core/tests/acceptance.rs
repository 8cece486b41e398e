//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use jcm_ladder::algebra::{algebra_residuals, build_generators};
use jcm_ladder::bell::{bell_scan, CLASSICAL_BOUND};
use jcm_ladder::ladder::{build_shift_pair, lambda3, lambda4, ladder_residuals};
use jcm_ladder::model::{block_decompose, build_charge, build_hamiltonian, numeric_spectrum};
use jcm_ladder::operator::commutator;
use jcm_ladder::spectrum::{dressed_energies, ground_state, verify_ladder_action};
use jcm_ladder::sweep::{draw_params, relative_difference, spectrum_sweep, DrawRanges};
use jcm_ladder::{Execution, JcmParams, SpaceSpec};

const SEED: u64 = 20_240_601;
const DRAWS: usize = 100;

fn pstar() -> JcmParams {
    JcmParams::new(1.0, 0.2, 0.4).unwrap()
}

fn space(n: usize) -> SpaceSpec {
    SpaceSpec::new(n).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn conservation() -> Outcome {
    let (inner, elapsed) = timed(|| {
        let s = space(12);
        let h = build_hamiltonian(&pstar(), s);
        let c = build_charge(s);
        let norm = commutator(&h, &c).unwrap().frobenius_norm();
        outcome(norm == 0.0, format!("||[H,C]||_F = {norm:e}"))
    });
    let fast = elapsed < Duration::from_secs(1);
    outcome(inner.pass && fast, format!("{}, {:.3} s (limit 1 s)", inner.detail, elapsed.as_secs_f64()))
}

fn spectrum_equivalence() -> Outcome {
    let (inner, elapsed) = timed(|| {
        let draws = draw_params(SEED, DRAWS, &DrawRanges::default());
        let rows = spectrum_sweep(&draws, space(10), Execution::Parallel).unwrap();
        let oracle = rows.iter().map(|r| r.block_oracle).fold(0.0, f64::max);
        let dense = rows.iter().map(|r| r.dense).fold(0.0, f64::max);
        outcome(
            oracle <= 1e-12 && dense <= 1e-12,
            format!("{DRAWS} draws, max rel diff vs block oracle {oracle:.2e}, vs dense {dense:.2e} (tol 1e-12)"),
        )
    });
    let fast = elapsed < Duration::from_secs(10);
    outcome(inner.pass && fast, format!("{}, {:.3} s (limit 10 s)", inner.detail, elapsed.as_secs_f64()))
}

fn ladder_relations() -> Outcome {
    let s = space(12);
    let h = build_hamiltonian(&pstar(), s);
    let pair = build_shift_pair(&h, &pstar(), 1.0).unwrap();
    let r = ladder_residuals(&h, &pair).unwrap();
    let lo = r.get("ladder.lowering").unwrap().residual;
    let hi = r.get("ladder.raising").unwrap().residual;
    outcome(
        lo <= 1e-10 && hi <= 1e-10,
        format!("lowering {lo:.2e}, raising {hi:.2e} (tol 1e-10)"),
    )
}

fn adjointness() -> Outcome {
    let s = space(12);
    let h = build_hamiltonian(&pstar(), s);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for beta in [1.0, 2.0] {
        let pair = build_shift_pair(&h, &pstar(), beta).unwrap();
        let r = ladder_residuals(&h, &pair).unwrap().get("ladder.adjoint").unwrap().residual;
        worst = worst.max(r);
        parts.push(format!("beta={beta}: {r:.2e}"));
    }
    outcome(worst <= 1e-10, format!("{} (tol 1e-10)", parts.join(", ")))
}

fn eigenstate_action() -> Outcome {
    let s = space(12);
    let p = pstar();
    let h = build_hamiltonian(&p, s);
    let pair = build_shift_pair(&h, &p, 1.0).unwrap();
    let mut lower: f64 = 0.0;
    let mut overlap: f64 = 1.0;
    for n in 0..=10 {
        let a = verify_ladder_action(n, &p, s, &pair).unwrap();
        lower = lower.max(a.lowering_residual);
        overlap = overlap.min(a.overlap_plus);
    }
    outcome(
        lower <= 1e-10 && overlap >= 1.0 - 1e-10,
        format!("n=0..10: max ||b psi-||/||b||_F {lower:.2e}, min overlap with psi+ 1-{:.2e}", 1.0 - overlap),
    )
}

fn energy_mapping() -> Outcome {
    let draws = draw_params(SEED, DRAWS, &DrawRanges::default());
    let mut worst: f64 = 0.0;
    for p in &draws {
        for n in 0..=10 {
            let (lo, hi) = dressed_energies(n, p);
            worst = worst
                .max(relative_difference(lambda4(lo, p), hi))
                .max(relative_difference(lambda3(hi, p), lo));
        }
    }
    let instance = lambda4(1.7, &pstar());
    let inst_ok = relative_difference(instance, 2.3) <= 1e-10;
    outcome(
        worst <= 1e-10 && inst_ok,
        format!("max rel diff {worst:.2e} over {DRAWS} draws, n<=10; lambda4(1.7) = {instance} at omega=1, g=0.2, Delta=0.4"),
    )
}

fn algebra() -> Outcome {
    let s = space(12);
    let p = pstar();
    let h = build_hamiltonian(&p, s);
    let pair = build_shift_pair(&h, &p, 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for nu in [0.0, 1.5] {
        let gens = build_generators(&h, &pair, &p, nu).unwrap();
        let r = algebra_residuals(&gens, &h, &pair, &p).unwrap();
        let lower = r.get("algebra.j0_lowering").unwrap().residual;
        let raise = r.get("algebra.j0_raising").unwrap().residual;
        let gap = r
            .checks
            .iter()
            .filter(|c| c.id.starts_with("algebra.j0_gap."))
            .map(|c| c.residual)
            .fold(0.0, f64::max);
        pass &= lower <= 1e-10 && raise <= 1e-10 && gap <= 1e-10;
        let forms: Vec<_> = r.checks.iter().filter(|c| c.informational).collect();
        let agree = forms.iter().filter(|c| c.pass).count();
        parts.push(format!(
            "nu={nu}: [J0,b]+b {lower:.1e}, [J0,b+]-b+ {raise:.1e}, gap {gap:.1e}, closed forms {agree}/{} agree",
            forms.len()
        ));
        if nu == 0.0 {
            let mut j0: Vec<f64> = gens.xi_sq_by_block.iter().filter(|b| b.block == 2).map(|b| b.j0).collect();
            j0.sort_by(f64::total_cmp);
            let ok = j0.len() == 2 && (j0[0] - 7.0).abs() <= 1e-10 && (j0[1] - 8.0).abs() <= 1e-10;
            pass &= ok;
            parts.push(format!("block c=2 J0 = {j0:?}"));
        }
    }
    outcome(pass, parts.join("; "))
}

fn bell() -> Outcome {
    let s = space(12);
    let ns: Vec<usize> = (0..=10).collect();
    let scan = bell_scan(&ns, &pstar(), s, Execution::Parallel).unwrap();
    let closed = scan.iter().map(|r| (r.chsh_paper - r.chsh_closed_form).abs()).fold(0.0, f64::max);
    let max = scan.iter().map(|r| (r.chsh_paper - r.chsh_max).abs()).fold(0.0, f64::max);
    let n1 = scan[1].chsh_paper;
    let n1_ok = (n1 - 2.0 / 3.0 * 17f64.sqrt()).abs() <= 1e-12;

    let resonant = JcmParams::new(1.0, 0.2, 0.5).unwrap();
    let tsirelson = bell_scan(&ns, &resonant, s, Execution::Parallel)
        .unwrap()
        .iter()
        .map(|r| (r.chsh_paper - 8f64.sqrt()).abs())
        .fold(0.0, f64::max);

    let mut limit: f64 = f64::NEG_INFINITY;
    for (g, delta) in [(0.0, 0.4), (0.0, 0.6), (1e-9, 0.4), (-1e-9, 0.6)] {
        let p = JcmParams::new(1.0, g, delta).unwrap();
        for r in bell_scan(&ns, &p, s, Execution::Parallel).unwrap() {
            limit = limit.max(r.chsh_paper);
        }
    }
    let pass = closed <= 1e-12 && max <= 1e-12 && n1_ok && tsirelson <= 1e-12 && limit <= CLASSICAL_BOUND + 1e-12;
    outcome(
        pass,
        format!(
            "vs 2sqrt(1+sin^2 2theta) {closed:.1e}, vs chsh_max {max:.1e}, n=1 {n1:.10}, resonance vs 2sqrt2 {tsirelson:.1e}, g->0 max {limit:.15}"
        ),
    )
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jcm-ladder"))
        .args(args)
        .env_remove("JCM_LADDER_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn ground_state_check() -> Outcome {
    let draws = draw_params(SEED + 1, DRAWS, &DrawRanges::default());
    let s = space(6);
    let mut worst: f64 = 0.0;
    for p in &draws {
        let h = build_hamiltonian(p, s);
        let oracle = numeric_spectrum(&h, &block_decompose(s));
        let e0 = ground_state(p, s).energy;
        worst = worst
            .max((e0 - oracle.block(0)[0].energy).abs())
            .max((e0 - 0.5 * p.detuning()).abs());
    }
    let out = cli(&["verify"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let noted = report["notes"]
        .as_array()
        .is_some_and(|n| n.iter().any(|x| x["id"] == "ground.printed_energy"));
    outcome(
        worst <= 1e-13 && noted && out.status.success(),
        format!("max |E0 - oracle| {worst:.1e} over {DRAWS} draws; verify note present: {noted}"),
    )
}

fn determinism() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for args in [
        &["verify", "--omega", "1", "--g", "0.2", "--Delta", "0.4", "--n-max", "12"][..],
        &["spectrum", "--omega", "1", "--g", "0.2", "--Delta", "0.4", "--n-max", "8", "--format", "csv"][..],
    ] {
        let a = cli(args);
        let b = cli(args);
        let same = a.status.success() && b.status.success() && a.stdout == b.stdout;
        pass &= same;
        parts.push(format!("{} identical: {same}", args[0]));
    }
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/spectrum_pstar.csv");
    let expected = std::fs::read(golden).unwrap_or_default();
    let got = cli(&["spectrum", "--omega", "1", "--g", "0.2", "--Delta", "0.4", "--n-max", "8", "--format", "csv"]);
    let golden_ok = !expected.is_empty() && got.stdout == expected;
    pass &= golden_ok;
    parts.push(format!("golden spectrum csv: {golden_ok}"));
    outcome(pass, parts.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("conservation", conservation),
        ("spectrum equivalence", spectrum_equivalence),
        ("ladder relations", ladder_relations),
        ("adjointness", adjointness),
        ("eigenstate action", eigenstate_action),
        ("energy mapping", energy_mapping),
        ("algebra", algebra),
        ("bell", bell),
        ("ground state", ground_state_check),
        ("cli determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} [{}] {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
