//! One function per subcommand, each producing a [`Table`].

use fluctamp_core::amplifier::{
    enumerate_single_photon_branches, f_eff_closed_form, f_eff_closed_form_squared_gain, g_eff_closed_form,
    g_limit_low_reflectivity, p_succ_closed_form, run_success_branch, BRANCH_ORDER, MAX_INPUT_AMPLITUDE,
};
use fluctamp_core::fock::{run_branch_fock, FockVector};
use fluctamp_core::optics::{beam_split, coherent_state, detection_probability, fock_state, purity, sample_grid};
use fluctamp_core::optimizer::{maximize_success, OptimizationResult};
use fluctamp_core::{AmplifierConfig, BeamSplitter, Complex64, OptimizationProblem};

use crate::cli::{BranchesArgs, CurvesArgs, OptimizeArgs, SweepArgs, ValidateArgs, WignerGridArgs};
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

/// Half-width of the phase-space window sampled by `wigner-grid`.
pub const WIGNER_EXTENT: f64 = 6.0;

/// Smallest Fock cutoff accepted by `validate`.
pub const MIN_CUTOFF: usize = 12;

/// Amplitudes and reflectivities of the engine cross-check.
pub const ORACLE_ALPHAS: [f64; 3] = [0.25, 0.5, 1.0];
pub const ORACLE_RS: [f64; 2] = [0.1, 0.4];

/// Amplitudes and reflectivities of the closed-form check.
pub const IDENTITY_ALPHAS: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
pub const IDENTITY_RS: [f64; 5] = [0.05, 0.2, 0.35, 0.5, 0.6];

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidArgs(msg.into())
}

fn check_alpha(alpha: f64, allow_zero: bool) -> Result<()> {
    let lower_ok = if allow_zero { alpha >= 0.0 } else { alpha > 0.0 };
    if alpha.is_finite() && lower_ok && alpha <= MAX_INPUT_AMPLITUDE {
        Ok(())
    } else {
        Err(invalid(format!("alpha = {alpha} outside (0, {MAX_INPUT_AMPLITUDE}]")))
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(invalid(format!("grid = {n}; need at least 2 points")))
    }
}

fn check_gain(g: f64) -> Result<()> {
    if g.is_finite() && g > 1.0 && g < 2.0 {
        Ok(())
    } else {
        Err(invalid(format!("gain threshold {g} outside (1, 2)")))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn curves(args: &CurvesArgs) -> Result<Table> {
    check_alpha(args.alpha, false)?;
    if args.grid == 0 {
        return Err(invalid("grid must be positive"));
    }
    if args.r.is_empty() {
        return Err(invalid("at least one reflectivity is required"));
    }
    let mut t = Table::new(&["alpha", "r", "g_eff", "f_eff", "f_ideal", "g_limit_low_reflectivity"]);
    for &r in &args.r {
        BeamSplitter::new(r)?;
        for i in 1..=args.grid {
            let alpha = args.alpha * i as f64 / args.grid as f64;
            let rep = run_success_branch(&AmplifierConfig::symmetric(alpha, r)?)?;
            t.push(vec![
                alpha.into(),
                r.into(),
                rep.g_eff.into(),
                rep.f_eff.into(),
                rep.f_ideal.into(),
                g_limit_low_reflectivity(alpha).into(),
            ]);
        }
    }
    Ok(t)
}

pub fn wigner_grid(args: &WignerGridArgs) -> Result<Table> {
    check_grid(args.grid)?;
    if args.alpha.is_empty() {
        return Err(invalid("at least one amplitude is required"));
    }
    let axis = linspace(-WIGNER_EXTENT, WIGNER_EXTENT, args.grid);
    let mut t = Table::new(&["alpha", "r", "x", "p", "w"]);
    for &alpha in &args.alpha {
        check_alpha(alpha, true)?;
        let rep = run_success_branch(&AmplifierConfig::symmetric(alpha, args.r)?)?;
        let values = sample_grid(&rep.output, &axis, &axis)?;
        for (p, row) in axis.iter().zip(&values) {
            for (x, w) in axis.iter().zip(row) {
                t.push(vec![alpha.into(), args.r.into(), (*x).into(), (*p).into(), (*w).into()]);
            }
        }
    }
    Ok(t)
}

pub fn branches(args: &BranchesArgs) -> Result<Table> {
    check_alpha(args.alpha, true)?;
    let [r1, r2, r3] = args.reflectivity.resolved();
    let cfg = AmplifierConfig::new(Complex64::new(args.alpha, 0.0), r1, r2, r3)?;
    let e = enumerate_single_photon_branches(&cfg)?;
    let mut t = Table::new(&[
        "state",
        "qnd",
        "pd1",
        "pd2",
        "probability",
        "amplitude",
        "fidelity_deficit",
        "amplitude_deficit",
    ]);
    for (i, b) in e.branches.iter().enumerate() {
        t.push(vec![
            (i + 1).into(),
            b.qnd.into(),
            b.pd1.into(),
            b.pd2.into(),
            b.probability.into(),
            b.amplitude.into(),
            b.fidelity_deficit.into(),
            b.amplitude_deficit.into(),
        ]);
    }
    t.push(vec![
        "other".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        e.other_probability.into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
    ]);
    Ok(t)
}

const OPTIMUM_COLUMNS: [&str; 12] = [
    "g_min",
    "p_opt",
    "alpha_opt",
    "r_opt",
    "r1",
    "r2",
    "r3",
    "f_opt",
    "g_at_opt",
    "converged",
    "iterations",
    "status",
];

fn optimum_row(g_min: f64, result: &fluctamp_core::Result<OptimizationResult>) -> Vec<Cell> {
    match result {
        Ok(r) => vec![
            g_min.into(),
            r.p_opt.into(),
            r.alpha_opt.into(),
            r.mean_reflectivity().into(),
            r.r_opt[0].into(),
            r.r_opt[1].into(),
            r.r_opt[2].into(),
            r.f_opt.into(),
            r.g_at_opt.into(),
            r.converged.into(),
            r.iterations.into(),
            "ok".into(),
        ],
        Err(e) => {
            let mut row = vec![Cell::Empty; OPTIMUM_COLUMNS.len()];
            row[0] = g_min.into();
            row[9] = false.into();
            row[11] = e.to_string().into();
            row
        }
    }
}

pub fn optimize(args: &OptimizeArgs) -> Result<Table> {
    check_gain(args.g_min)?;
    let problem = OptimizationProblem::new(args.g_min)?.with_seed(args.seed);
    let mut t = Table::new(&OPTIMUM_COLUMNS);
    t.push(optimum_row(args.g_min, &maximize_success(&problem)));
    Ok(t)
}

/// Thresholds `g_min, g_min + step, …` up to `g_max`, rounded to 12 decimals.
pub fn sweep_points(g_min: f64, g_max: f64, step: f64) -> Result<Vec<f64>> {
    check_gain(g_min)?;
    check_gain(g_max)?;
    if !(step.is_finite() && step > 0.0) || g_max < g_min {
        return Err(invalid(format!("empty sweep: g from {g_min} to {g_max} by {step}")));
    }
    let n = ((g_max - g_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| ((g_min + i as f64 * step) * 1e12).round() / 1e12).collect())
}

pub fn sweep(args: &SweepArgs) -> Result<Table> {
    let gs = sweep_points(args.g_min, args.g_max, args.step)?;
    let mut t = Table::new(&OPTIMUM_COLUMNS);
    for (g, r) in gs.iter().zip(fluctamp_core::optimizer::sweep(&gs, args.seed)) {
        t.push(optimum_row(*g, &r));
    }
    Ok(t)
}

/// One line of the validation report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub measured: Option<f64>,
    pub reference: Option<f64>,
    /// Non-gating checks document known discrepancies and never fail the run.
    pub gating: bool,
}

impl Check {
    fn grid(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self { name, deviation, tolerance, measured: None, reference: None, gating: true }
    }

    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub table: Table,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed() || !c.gating)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.gating && !c.passed()).map(|c| c.name).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn energy_matched_deficit(v: &FockVector) -> f64 {
    let a = v.amplitude();
    let phase = if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) };
    1.0 - v.fidelity_to_coherent(phase * v.mean_photon_number().sqrt())
}

fn identity_grid() -> Result<Vec<AmplifierConfig>> {
    let mut out = Vec::new();
    for &a in &IDENTITY_ALPHAS {
        for (j, &r) in IDENTITY_RS.iter().enumerate() {
            out.push(AmplifierConfig::symmetric(a, r)?);
            let (r2, r3) = (IDENTITY_RS[(j + 2) % IDENTITY_RS.len()], IDENTITY_RS[(j + 4) % IDENTITY_RS.len()]);
            out.push(AmplifierConfig::new(Complex64::new(a, 0.0), r, r2, r3)?);
        }
    }
    Ok(out)
}

pub fn run_validation(cutoff: usize) -> Result<ValidationReport> {
    if cutoff < MIN_CUTOFF {
        return Err(invalid(format!("cutoff {cutoff} below {MIN_CUTOFF}")));
    }
    let (mut dp, mut da, mut df, mut dfa, mut dnorm, mut dpure, mut dcomplete) =
        (0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    let counts = cutoff.min(20) as u32;
    for &alpha in &ORACLE_ALPHAS {
        for &r in &ORACLE_RS {
            let cfg = AmplifierConfig::symmetric(alpha, r)?;
            let wigner = enumerate_single_photon_branches(&cfg)?;
            for (pattern, w) in BRANCH_ORDER.iter().zip(&wigner.branches) {
                let (p, out) = run_branch_fock(&cfg, *pattern, cutoff)?;
                dp = dp.max((p - w.probability).abs());
                da = da.max((out.amplitude().norm() - w.amplitude).abs());
                df = df.max((energy_matched_deficit(&out) - w.fidelity_deficit).abs());
                dfa = dfa.max((1.0 - out.fidelity_to_coherent(out.amplitude()) - w.amplitude_deficit).abs());
                if let Some(state) = &w.output {
                    dnorm = dnorm.max((state.integrate_all()? - 1.0).abs());
                    dpure = dpure.max((purity(state)? - 1.0).abs());
                }
            }
            let bs = BeamSplitter::new(r)?;
            let input = coherent_state(Complex64::new(alpha, 0.0))?;
            for port in [fock_state(0)?, fock_state(1)?] {
                let s = beam_split(&input, &port, &bs)?;
                let total: f64 =
                    (0..=counts).map(|n| detection_probability(&s, n)).sum::<fluctamp_core::Result<f64>>()?;
                dcomplete = dcomplete.max((total - 1.0).abs());
            }
        }
    }
    let (mut dp6, mut dg9, mut df11) = (0f64, 0f64, 0f64);
    for cfg in identity_grid()? {
        let rep = run_success_branch(&cfg)?;
        dp6 = dp6.max((rep.p_succ - p_succ_closed_form(&cfg)).abs());
        dg9 = dg9.max((rep.g_eff - g_eff_closed_form(&cfg)).abs());
        df11 = df11.max((rep.f_eff - f_eff_closed_form(&cfg)).abs());
    }
    let anchor = AmplifierConfig::symmetric(0.5, 0.4)?;
    let overlap = run_success_branch(&anchor)?.f_eff;
    let printed = f_eff_closed_form_squared_gain(&anchor);
    let checks = vec![
        Check::grid("oracle_probability", dp, 1e-8),
        Check::grid("oracle_amplitude", da, 1e-8),
        Check::grid("oracle_fidelity_deficit", df, 1e-8),
        Check::grid("oracle_amplitude_deficit", dfa, 1e-8),
        Check::grid("branch_normalization", dnorm, 1e-10),
        Check::grid("branch_purity", dpure, 1e-10),
        Check::grid("detection_completeness", dcomplete, 1e-10),
        Check::grid("closed_form_probability", dp6, 1e-12),
        Check::grid("closed_form_gain", dg9, 1e-10),
        Check::grid("closed_form_fidelity", df11, 1e-10),
        Check {
            name: "fidelity_printed_exponent",
            deviation: (printed - overlap).abs(),
            tolerance: 1e-10,
            measured: Some(printed),
            reference: Some(overlap),
            gating: false,
        },
    ];
    let mut table = Table::new(&["check", "max_deviation", "tolerance", "measured", "reference", "status", "gating"]);
    for c in &checks {
        table.push(vec![
            c.name.into(),
            c.deviation.into(),
            c.tolerance.into(),
            c.measured.map_or(Cell::Empty, Cell::Num),
            c.reference.map_or(Cell::Empty, Cell::Num),
            if c.passed() { "PASS" } else { "FAILED" }.into(),
            c.gating.into(),
        ]);
    }
    Ok(ValidationReport { checks, table })
}

pub fn validate(args: &ValidateArgs) -> Result<ValidationReport> {
    run_validation(args.cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_points_are_inclusive_and_rounded() {
        let g = sweep_points(1.05, 1.95, 0.05).unwrap();
        assert_eq!(g.len(), 19);
        assert_eq!(g[2], 1.15);
        assert_eq!(*g.last().unwrap(), 1.95);
        assert!(sweep_points(1.5, 1.4, 0.05).is_err());
        assert!(sweep_points(1.0, 1.4, 0.05).is_err());
        assert!(sweep_points(1.2, 1.4, 0.0).is_err());
    }

    #[test]
    fn argument_checks() {
        assert!(check_alpha(0.0, false).is_err());
        assert!(check_alpha(3.0, false).is_ok());
        assert!(check_alpha(3.01, true).is_err());
        assert!(check_grid(1).is_err());
        assert!(check_gain(2.0).is_err());
    }

    #[test]
    fn cutoff_floor() {
        assert!(matches!(run_validation(11), Err(CliError::InvalidArgs(_))));
    }
}
