//! Run configuration: a TOML file with `--set key=value` overrides.

use std::collections::BTreeMap;
use std::path::Path;

use qm_bootstrap::{Family, InitialName, MatrixKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must agree with the subcommand when present.
    pub mode: Option<Mode>,
    pub potential: PotentialBlock,
    pub scan: Option<ScanBlock>,
    pub oracle: Option<OracleBlock>,
    pub residual: Option<ResidualBlock>,
    pub matrix: Option<MatrixBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    pub family: Family,
    pub coeffs: Vec<f64>,
    pub l: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub matrix: Option<MatrixKind>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub refine_iters: Option<u32>,
    #[serde(default)]
    pub axis: Vec<AxisBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub name: InitialName,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    pub n_points: Option<usize>,
    pub levels: Option<usize>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub r_max: Option<f64>,
    pub boundary_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualBlock {
    pub level: Option<usize>,
    /// Inclusive index ranges.
    pub one_var: Option<[i32; 2]>,
    pub two_var_m: Option<[i32; 2]>,
    pub two_var_n: Option<[u32; 2]>,
    pub mixed_m: Option<[i32; 2]>,
    pub mixed_n: Option<[i32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixBlock {
    pub kind: Option<MatrixKind>,
    pub depth: Option<usize>,
    pub point: BTreeMap<InitialName, f64>,
}

fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn load_with_overrides(text: &str, overrides: &[String]) -> Result<toml::Value, CliError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
    let mut root = toml::Value::Table(table);
    for o in overrides {
        set_path(&mut root, o)?;
    }
    Ok(root)
}

/// Applies `a.b.0.c=value`; numeric segments index arrays.
fn set_path(root: &mut toml::Value, assignment: &str) -> Result<(), CliError> {
    let bad = |msg: &str| CliError::ConfigParse(format!("--set {assignment}: {msg}"));
    let (key, raw) = assignment.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let segments: Vec<&str> = key.trim().split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(bad("empty key segment"));
    }
    let value = parse_value(raw.trim());
    let mut cursor = root;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        cursor = match cursor {
            toml::Value::Table(t) => {
                if last {
                    t.insert(seg.to_string(), value);
                    return Ok(());
                }
                t.entry(seg.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            }
            toml::Value::Array(a) => {
                let slot = seg
                    .parse::<usize>()
                    .ok()
                    .and_then(|k| a.get_mut(k))
                    .ok_or_else(|| bad("array index out of range"))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad("key path runs through a scalar")),
        };
    }
    Ok(())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::ConfigParse(msg()))
    }
}

impl RunConfig {
    pub fn from_str_with(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let cfg: RunConfig = load_with_overrides(text, overrides)?
            .try_into()
            .map_err(|e: toml::de::Error| CliError::ConfigParse(e.to_string()))?;
        cfg.check_ranges()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_str_with(&text, overrides)
    }

    /// Value checks that need no knowledge of the potential.
    fn check_ranges(&self) -> Result<(), CliError> {
        check(self.potential.coeffs.iter().all(|c| c.is_finite()), || {
            "potential.coeffs must be finite".to_string()
        })?;
        if let Some(scan) = &self.scan {
            for (i, a) in scan.axis.iter().enumerate() {
                check(a.step.is_finite() && a.step > 0.0, || {
                    format!("scan.axis[{i}] ({}): step must be positive, got {}", a.name, a.step)
                })?;
                check(a.lo.is_finite() && a.hi.is_finite() && a.lo < a.hi, || {
                    format!("scan.axis[{i}] ({}): need lo < hi", a.name)
                })?;
            }
            check(scan.depth.is_none_or(|d| d >= 1), || "scan.depth must be at least 1".to_string())?;
            check(scan.tol.is_none_or(|t| t.is_finite() && t > 0.0), || {
                "scan.tol must be positive".to_string()
            })?;
        }
        if let Some(o) = &self.oracle {
            check(o.n_points.is_none_or(|n| n >= 1), || "oracle.n_points must be positive".to_string())?;
            check(o.levels.is_none_or(|n| n >= 1), || "oracle.levels must be positive".to_string())?;
            check(o.r_max.is_none_or(|r| r.is_finite() && r > 0.0), || {
                "oracle.r_max must be positive".to_string()
            })?;
            check(o.boundary_tol.is_none_or(|t| t > 0.0), || {
                "oracle.boundary_tol must be positive".to_string()
            })?;
            if let (Some(lo), Some(hi)) = (o.lo, o.hi) {
                check(lo < hi, || "oracle: need lo < hi".to_string())?;
            }
        }
        if let Some(r) = &self.residual {
            for (name, range) in [("one_var", r.one_var), ("two_var_m", r.two_var_m), ("mixed_m", r.mixed_m), ("mixed_n", r.mixed_n)] {
                if let Some([a, b]) = range {
                    check(a <= b, || format!("residual.{name}: empty range"))?;
                }
            }
            if let Some([a, b]) = r.two_var_n {
                check(a <= b, || "residual.two_var_n: empty range".to_string())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HARMONIC: &str = r#"
[potential]
family = "even-polynomial"
coeffs = [0.0, 0.0, 1.0]

[scan]
matrix = "kron-x-p"
depth = 4

[[scan.axis]]
name = "E"
lo = 0.5
hi = 6.5
step = 0.005
"#;

    #[test]
    fn parses_and_overrides() {
        let cfg = RunConfig::from_str_with(HARMONIC, &[]).unwrap();
        assert_eq!(cfg.scan.as_ref().unwrap().depth, Some(4));
        let cfg = RunConfig::from_str_with(
            HARMONIC,
            &["scan.depth=6".into(), "scan.axis.0.step=0.01".into(), "scan.matrix=hankel-x".into()],
        )
        .unwrap();
        let scan = cfg.scan.unwrap();
        assert_eq!(scan.depth, Some(6));
        assert_eq!(scan.axis[0].step, 0.01);
        assert_eq!(scan.matrix, Some(MatrixKind::HankelX));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{HARMONIC}\nbogus = 1\n");
        assert!(matches!(RunConfig::from_str_with(&text, &[]), Err(CliError::ConfigParse(_))));
        assert!(matches!(
            RunConfig::from_str_with(HARMONIC, &["scan.depthh=3".into()]),
            Err(CliError::ConfigParse(_))
        ));
    }

    #[test]
    fn negative_step_is_a_parse_error() {
        let err = RunConfig::from_str_with(HARMONIC, &["scan.axis.0.step=-0.01".into()]).unwrap_err();
        assert!(matches!(err, CliError::ConfigParse(_)));
        assert!(err.to_string().contains("step"));
    }

    #[test]
    fn bad_override_paths() {
        for o in ["scan", "scan..depth=1", "scan.axis.7.step=1", "potential.family.x=1"] {
            assert!(matches!(
                RunConfig::from_str_with(HARMONIC, &[o.into()]),
                Err(CliError::ConfigParse(_))
            ));
        }
    }
}
