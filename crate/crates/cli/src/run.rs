//! Mode dispatch. [`run_config`] computes every artifact in memory;
//! [`execute`] adds the manifest and writes the files only after the whole
//! run has succeeded.

use std::path::PathBuf;
use std::time::Instant;

use qm_bootstrap::oracle::{solve_1d_with, solve_periodic, solve_radial_with, OracleOptions};
use qm_bootstrap::scanner::{refine_boundary, Island};
use qm_bootstrap::{
    build, free_initial_schema, gen_one_var, gen_two_var, is_feasible, moments_from_wavefunction,
    recursion_residual, scan, validate_spec, Family, GridAxis, InitialData, InitialName,
    MatrixKind, MomentIndexSet, OracleSolution, PotentialSpec, ScanConfig, ValidatedPotential,
    DEFAULT_TOL,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, ScanBlock};
use crate::error::CliError;
use crate::output::{islands_json, pretty, points_csv, region_svg};
use crate::Mode;

pub const DEFAULT_DEPTH: usize = 4;
pub const DEFAULT_REFINE_ITERS: u32 = 25;
/// Points per axis when the config gives no axes.
pub const DEFAULT_AXIS_POINTS: usize = 201;

#[derive(Debug, Clone)]
pub struct Invocation {
    pub mode: Mode,
    pub config: PathBuf,
    pub overrides: Vec<String>,
    pub out: PathBuf,
    /// `None` uses every available core.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    /// One-line human summary.
    pub summary: String,
}

impl RunOutput {
    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

fn artifact(name: &str, bytes: Vec<u8>) -> Artifact {
    Artifact {
        name: name.to_string(),
        bytes,
    }
}

pub fn execute(inv: &Invocation) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let cfg = RunConfig::load(&inv.config, &inv.overrides)?;
    let mut out = run_config(inv.mode, &cfg, inv.workers)?;
    let files: Vec<&str> = out.artifacts.iter().map(|a| a.name.as_str()).collect();
    let manifest = json!({
        "engine": "qm-bootstrap",
        "version": qm_bootstrap::VERSION,
        "mode": inv.mode.name(),
        "config_path": inv.config.display().to_string(),
        "overrides": inv.overrides,
        "config": cfg,
        "workers": inv.workers,
        "files": files,
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    out.artifacts.push(artifact("manifest.json", pretty(&manifest)));
    std::fs::create_dir_all(&inv.out).map_err(|e| CliError::io(&inv.out, e))?;
    for a in &out.artifacts {
        let path = inv.out.join(&a.name);
        std::fs::write(&path, &a.bytes).map_err(|e| CliError::io(path, e))?;
    }
    Ok(out)
}

/// Runs one mode without touching the file system.
pub fn run_config(mode: Mode, cfg: &RunConfig, workers: Option<usize>) -> Result<RunOutput, CliError> {
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(CliError::ConfigParse(format!(
                "config says mode = {} but the command is {}",
                m.name(),
                mode.name()
            )));
        }
    }
    let spec = PotentialSpec {
        family: cfg.potential.family,
        coeffs: cfg.potential.coeffs.clone(),
        angular_l: cfg.potential.l,
    };
    let pot = validate_spec(spec)?;
    match mode {
        Mode::Scan => run_scan(cfg, &pot, workers, false),
        Mode::Refine => run_scan(cfg, &pot, workers, true),
        Mode::Oracle => run_oracle(cfg, &pot),
        Mode::ResidualCheck => run_residual(cfg, &pot),
        Mode::MatrixDump => run_matrix(cfg, &pot),
    }
}

pub fn scan_config(block: &ScanBlock, pot: &ValidatedPotential<f64>) -> Result<ScanConfig<f64>, CliError> {
    let kind = match block.matrix {
        Some(k) => k,
        None => *pot.matrix_kinds().first().ok_or_else(|| {
            CliError::Validation(format!("no matrix kind for the {} family", pot.family()))
        })?,
    };
    let grid = if block.axis.is_empty() {
        free_initial_schema(pot)
            .entries
            .iter()
            .map(|e| GridAxis::new(e.name, e.lo, e.hi, (e.hi - e.lo) / (DEFAULT_AXIS_POINTS - 1) as f64))
            .collect()
    } else {
        block
            .axis
            .iter()
            .map(|a| GridAxis::new(a.name, a.lo, a.hi, a.step))
            .collect()
    };
    let mut sc = ScanConfig::new(pot.clone(), kind, block.depth.unwrap_or(DEFAULT_DEPTH), grid);
    sc.tol = block.tol.unwrap_or(DEFAULT_TOL);
    sc.refine_iters = block.refine_iters;
    Ok(sc)
}

fn describe_islands(islands: &[Island<f64>]) -> String {
    let parts: Vec<String> = islands
        .iter()
        .map(|i| {
            let e = &i.extent[0];
            format!("#{} [{:.6}, {:.6}]", i.label, e.lo.bound, e.hi.bound)
        })
        .collect();
    format!("{} island(s) along the first axis: {}", islands.len(), parts.join(", "))
}

fn run_scan(
    cfg: &RunConfig,
    pot: &ValidatedPotential<f64>,
    workers: Option<usize>,
    refine: bool,
) -> Result<RunOutput, CliError> {
    let block = cfg.scan.clone().unwrap_or_default();
    let mut sc = scan_config(&block, pot)?;
    if refine && sc.refine_iters.is_none() {
        sc.refine_iters = Some(DEFAULT_REFINE_ITERS);
    }
    let region = scan(&sc, workers)?;
    let islands: Vec<Island<f64>> = if refine {
        region
            .islands
            .iter()
            .map(|i| refine_boundary(&sc, &region, i))
            .collect()
    } else {
        region.islands.clone()
    };
    Ok(RunOutput {
        summary: describe_islands(&islands),
        artifacts: vec![
            artifact("points.csv", points_csv(&region)?),
            artifact("islands.json", islands_json(&region, &islands, sc.tol)),
            artifact("region.svg", region_svg(&region, &islands).into_bytes()),
        ],
    })
}

/// Oracle discretization chosen from the family and the `[oracle]` block.
///
/// Defaults: 8000 interior points on the line and half-line, 256 nodes on
/// the circle; `[-10, 10]` for polynomials, `[-12, 12]` for Toda;
/// `r_max = 200` for Coulomb and 40 for Yukawa; 3 levels (1 for Yukawa).
pub fn solve_oracle(
    cfg: &RunConfig,
    pot: &ValidatedPotential<f64>,
    min_levels: usize,
) -> Result<OracleSolution<f64>, CliError> {
    let block = cfg.oracle.clone().unwrap_or_default();
    let default_levels = if pot.family() == Family::Yukawa { 1 } else { 3 };
    let levels = block.levels.unwrap_or(default_levels).max(min_levels);
    let opts = OracleOptions {
        boundary_tol: block.boundary_tol.unwrap_or(OracleOptions::<f64>::default().boundary_tol),
    };
    let v = |x: f64| pot.value_at(x);
    let sol = match pot.family() {
        Family::Trig => solve_periodic(v, block.n_points.unwrap_or(256), levels),
        Family::Coulomb | Family::Yukawa => {
            let r_max = block
                .r_max
                .unwrap_or(if pot.family() == Family::Coulomb { 200.0 } else { 40.0 });
            solve_radial_with(v, pot.angular_l(), r_max, block.n_points.unwrap_or(8000), levels, &opts)
        }
        _ => {
            let half = if pot.family() == Family::Toda { 12.0 } else { 10.0 };
            let lo = block.lo.unwrap_or(-half);
            let hi = block.hi.unwrap_or(half);
            solve_1d_with(v, lo, hi, block.n_points.unwrap_or(8000), levels, &opts)
        }
    };
    sol.map_err(|e| CliError::Engine(e.into()))
}

fn run_oracle(cfg: &RunConfig, pot: &ValidatedPotential<f64>) -> Result<RunOutput, CliError> {
    let sol = solve_oracle(cfg, pot, 1)?;
    let doc = json!({
        "family": pot.family().to_string(),
        "domain": sol.domain,
        "grid": {
            "lo": sol.grid.lo,
            "hi": sol.grid.hi,
            "n_points": sol.grid.n_points,
            "boundary": sol.grid.boundary,
            "spacing": sol.grid.spacing,
        },
        "eigenvalues": sol.eigenvalues,
    });
    let shown: Vec<String> = sol.eigenvalues.iter().map(|e| format!("{e:.8}")).collect();
    Ok(RunOutput {
        summary: format!("eigenvalues: {}", shown.join(", ")),
        artifacts: vec![artifact("eigenvalues.json", pretty(&doc))],
    })
}

fn span(r: [i32; 2]) -> std::ops::RangeInclusive<i32> {
    r[0]..=r[1]
}

/// Index set for a residual check; config ranges override the family
/// defaults.
pub fn residual_index(cfg: &RunConfig, family: Family) -> MomentIndexSet {
    let r = cfg.residual.clone().unwrap_or_default();
    let (one, two_m, two_n, mixed_m, mixed_n): (Option<[i32; 2]>, _, _, _, _) = match family {
        Family::EvenPolynomial => (Some([0, 8]), Some([0, 6]), Some([0, 3]), None, None),
        Family::Coulomb => (Some([-1, 6]), None, None, None, None),
        Family::Toda | Family::Trig => (Some([-4, 4]), Some([-3, 3]), Some([0, 3]), None, None),
        Family::Yukawa => (None, None, None, Some([-3, 1]), Some([-2, 4])),
        Family::AbsPower | Family::PiecewiseWell => (None, None, None, None, None),
    };
    let mut idx = MomentIndexSet::default();
    if let Some(o) = r.one_var.or(one) {
        idx.one_var = span(o).collect();
    }
    if let (Some(m), Some(n)) = (r.two_var_m.or(two_m), r.two_var_n.or(two_n)) {
        idx.two_var = MomentIndexSet::two_var(span(m), n[0]..=n[1]).two_var;
    }
    if let (Some(m), Some(n)) = (r.mixed_m.or(mixed_m), r.mixed_n.or(mixed_n)) {
        idx.mixed = MomentIndexSet::mixed(span(m), span(n)).mixed;
    }
    idx
}

fn run_residual(cfg: &RunConfig, pot: &ValidatedPotential<f64>) -> Result<RunOutput, CliError> {
    let level = cfg.residual.as_ref().and_then(|r| r.level).unwrap_or(0);
    let sol = solve_oracle(cfg, pot, level + 1)?;
    let idx = residual_index(cfg, pot.family());
    let table = moments_from_wavefunction(&sol, level, pot.base_kind(), &idx)
        .map_err(|e| CliError::Engine(e.into()))?;
    let e = sol.eigenvalues[level];
    let report = recursion_residual(pot, &table, e).map_err(|e| CliError::Engine(e.into()))?;
    let doc = json!({
        "family": pot.family().to_string(),
        "level": level,
        "energy": e,
        "grid_points": sol.grid.n_points,
        "instances": report.entries.len(),
        "max_abs": report.max_abs(),
        "max_normalized": report.max_normalized(),
        "report": report,
    });
    Ok(RunOutput {
        summary: format!(
            "level {level} (E = {e:.8}): {} instances, max |residual| {:.3e}, max normalized {:.3e}",
            report.entries.len(),
            report.max_abs(),
            report.max_normalized()
        ),
        artifacts: vec![artifact("residuals.json", pretty(&doc))],
    })
}

#[derive(Serialize)]
struct MatrixDoc<'a> {
    point: &'a std::collections::BTreeMap<InitialName, f64>,
    verdict: qm_bootstrap::FeasibilityVerdict<f64>,
    matrix: qm_bootstrap::BootstrapMatrix<f64>,
}

fn run_matrix(cfg: &RunConfig, pot: &ValidatedPotential<f64>) -> Result<RunOutput, CliError> {
    let block = cfg
        .matrix
        .as_ref()
        .ok_or_else(|| CliError::ConfigParse("matrix-dump needs a [matrix] block".to_string()))?;
    let scan_block = cfg.scan.clone().unwrap_or_default();
    let kind: MatrixKind = match block.kind.or(scan_block.matrix) {
        Some(k) => k,
        None => *pot
            .matrix_kinds()
            .first()
            .ok_or_else(|| CliError::Validation(format!("no matrix kind for the {} family", pot.family())))?,
    };
    if !pot.matrix_kinds().contains(&kind) {
        return Err(CliError::Validation(format!(
            "matrix kind {kind} is not available for the {} family",
            pot.family()
        )));
    }
    let depth = block.depth.or(scan_block.depth).unwrap_or(DEFAULT_DEPTH);
    let energy = *block
        .point
        .get(&InitialName::Energy)
        .ok_or_else(|| CliError::ConfigParse("matrix.point needs E".to_string()))?;
    let mut init = InitialData::new(energy);
    for (&name, &v) in &block.point {
        if name == InitialName::Energy {
            continue;
        }
        if !pot.free_initial().contains(&name) {
            return Err(CliError::Validation(format!(
                "`{name}` is not free initial data for the {} family",
                pot.family()
            )));
        }
        init = init.with(name, v);
    }
    let engine = |e: qm_bootstrap::Error| CliError::Engine(e);
    let table = if kind.is_two_op() {
        gen_two_var(pot, &init, depth)
    } else {
        gen_one_var(pot, &init, 2 * depth as i32)
    }
    .map_err(|e| engine(e.into()))?;
    let matrix = build(&table, kind, depth).map_err(|e| engine(e.into()))?;
    let verdict = is_feasible(&matrix, scan_block.tol.unwrap_or(DEFAULT_TOL)).map_err(|e| engine(e.into()))?;
    let summary = format!(
        "{kind} K={depth} ({0}x{0}): min eigenvalue {1:.6e}, {2}",
        matrix.dim,
        verdict.min_eigenvalue,
        if verdict.feasible { "feasible" } else { "infeasible" }
    );
    let doc = MatrixDoc {
        point: &block.point,
        verdict,
        matrix,
    };
    Ok(RunOutput {
        summary,
        artifacts: vec![artifact("matrix.json", pretty(&doc))],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qm_bootstrap::Domain;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_str_with(text, &[]).unwrap()
    }

    #[test]
    fn default_axes_follow_the_schema() {
        let c = cfg("[potential]\nfamily = \"even-polynomial\"\ncoeffs = [0, 0, 1, 0, 1]\n");
        let pot = validate_spec(PotentialSpec {
            family: c.potential.family,
            coeffs: c.potential.coeffs.clone(),
            angular_l: None,
        })
        .unwrap();
        let sc = scan_config(&ScanBlock::default(), &pot).unwrap();
        assert_eq!(sc.grid.len(), 2);
        assert_eq!(sc.grid[0].count(), DEFAULT_AXIS_POINTS);
        assert_eq!(sc.matrix_kind, MatrixKind::HankelX);
    }

    #[test]
    fn mode_mismatch_is_a_config_error() {
        let c = cfg("mode = \"oracle\"\n[potential]\nfamily = \"trig\"\ncoeffs = [1]\n");
        assert!(matches!(run_config(Mode::Scan, &c, None), Err(CliError::ConfigParse(_))));
        assert!(run_config(Mode::Oracle, &c, None).is_ok());
    }

    #[test]
    fn rejected_potentials_map_to_validation() {
        let c = cfg("[potential]\nfamily = \"abs-power\"\ncoeffs = [1, 1.5]\n");
        let err = run_config(Mode::Scan, &c, None).unwrap_err();
        assert_eq!(err.exit_code(), 5);
        assert!(err.to_string().contains("not closed"));
    }

    #[test]
    fn matrix_dump_reports_verdict() {
        let c = cfg(
            "[potential]\nfamily = \"even-polynomial\"\ncoeffs = [0, 0, 1]\n[matrix]\nkind = \"hankel-x\"\ndepth = 2\npoint = { E = 1.0 }\n",
        );
        let out = run_config(Mode::MatrixDump, &c, None).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&out.artifact("matrix.json").unwrap().bytes).unwrap();
        assert_eq!(doc["matrix"]["dim"], 3);
        assert_eq!(doc["verdict"]["feasible"], true);
    }

    #[test]
    fn yukawa_scan_is_refused_but_residuals_run() {
        let c = cfg("[potential]\nfamily = \"yukawa\"\ncoeffs = [4]\nl = 0\n");
        let err = run_config(Mode::Scan, &c, None).unwrap_err();
        assert_eq!(err.exit_code(), 5);
        let out = run_config(Mode::ResidualCheck, &c, None).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&out.artifact("residuals.json").unwrap().bytes).unwrap();
        assert!(doc["max_normalized"].as_f64().unwrap() < 1e-3);
    }

    #[test]
    fn domain_is_reported() {
        let c = cfg("[potential]\nfamily = \"coulomb\"\ncoeffs = [1]\nl = 0\n");
        let pot = validate_spec(PotentialSpec::coulomb(1.0, 0)).unwrap();
        let sol = solve_oracle(&c, &pot, 1).unwrap();
        assert_eq!(sol.domain, Domain::HalfLine { l: 0 });
    }
}
