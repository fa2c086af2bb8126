//! Scenario files: flat TOML documents describing one run.
//!
//! ```toml
//! treatment = "both"          # "nc" | "classical" | "both"
//! mass = 1.0
//! force = [0.0, 1.0, 0.0]
//! x0 = [0.0, 0.0, 0.0]
//! v0 = [0.0, 0.0, 0.0]
//! t_end = 10.0
//! step = 0.001
//! output = "k2.csv"           # relative to the scenario file
//!
//! [family]                    # required for "nc" and "both"
//! id = "k2"
//! kappa = 0.1
//! tau = "inf"                 # positive number or "inf"
//!
//! [transform]                 # required for "classical" and "both"
//! b1 = -0.025                 # a1 a2 v1 v2 b1 b2 c1 c2, missing ones are 0
//! tau = "inf"
//! ```

use std::path::{Path, PathBuf};

use nhforce_core::{DeformationFamily, FamilyId, ForceField, Scenario, Tau, TransformFamily, Vec3};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreatmentKind {
    Nc,
    Classical,
    Both,
}

impl TreatmentKind {
    fn as_str(self) -> &'static str {
        match self {
            TreatmentKind::Nc => "nc",
            TreatmentKind::Classical => "classical",
            TreatmentKind::Both => "both",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    treatment: TreatmentKind,
    mass: f64,
    force: Vec3,
    x0: Vec3,
    v0: Vec3,
    t_end: f64,
    step: f64,
    output: Option<PathBuf>,
    family: Option<RawFamily>,
    transform: Option<RawTransform>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    id: FamilyId,
    kappa: f64,
    tau: RawTau,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransform {
    #[serde(default)]
    a1: f64,
    #[serde(default)]
    a2: f64,
    #[serde(default)]
    v1: f64,
    #[serde(default)]
    v2: f64,
    #[serde(default)]
    b1: f64,
    #[serde(default)]
    b2: f64,
    #[serde(default)]
    c1: f64,
    #[serde(default)]
    c2: f64,
    tau: RawTau,
}

// Syntax is checked while parsing, the range only later, so that `tau = -1`
// is reported as an invalid parameter rather than a malformed file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawTau {
    Num(f64),
    Str(String),
}

/// A parsed and validated scenario file.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub treatment: TreatmentKind,
    /// Undeformed base scenario starting at `t = 0`.
    pub scenario: Scenario,
    pub family: Option<DeformationFamily>,
    pub transform: Option<TransformFamily>,
    /// Output path resolved against the scenario file's directory.
    pub output: Option<PathBuf>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::parse(path, describe(&e, text)))?;

        let needs_family = raw.treatment != TreatmentKind::Classical;
        let needs_transform = raw.treatment != TreatmentKind::Nc;
        for (key, needed, present) in [
            ("family", needs_family, raw.family.is_some()),
            ("transform", needs_transform, raw.transform.is_some()),
        ] {
            if needed && !present {
                return Err(CliError::parse(
                    path,
                    format!(
                        "missing table `[{key}]` (required for treatment = \"{}\")",
                        raw.treatment.as_str()
                    ),
                ));
            }
        }

        let family = match raw.family {
            Some(f) => {
                let tau = tau_value(&f.tau, "family.tau", path)?;
                Some(DeformationFamily::new(f.id, f.kappa, tau)?)
            }
            None => None,
        };
        let transform = match raw.transform {
            Some(t) => {
                let tf = TransformFamily {
                    a1: t.a1,
                    a2: t.a2,
                    v1: t.v1,
                    v2: t.v2,
                    b1: t.b1,
                    b2: t.b2,
                    c1: t.c1,
                    c2: t.c2,
                    tau: tau_value(&t.tau, "transform.tau", path)?,
                };
                tf.validate()?;
                Some(tf)
            }
            None => None,
        };

        let force = ForceField::new(raw.force)?;
        let scenario =
            Scenario::from_velocity(raw.mass, force, None, raw.x0, raw.v0, (0.0, raw.t_end), raw.step)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        let output = raw.output.map(|o| base.join(o));

        Ok(Self { treatment: raw.treatment, scenario, family, transform, output })
    }

    pub fn require_output(&self, path: &Path) -> Result<&Path, CliError> {
        self.output
            .as_deref()
            .ok_or_else(|| CliError::parse(path, "missing key `output` (required by `run`)"))
    }

    pub fn require_family(&self, path: &Path) -> Result<DeformationFamily, CliError> {
        self.family.ok_or_else(|| CliError::parse(path, "missing table `[family]`"))
    }
}

fn tau_value(raw: &RawTau, key: &str, path: &Path) -> Result<Tau, CliError> {
    match raw {
        RawTau::Num(v) if *v == f64::INFINITY => Ok(Tau::Infinite),
        RawTau::Num(v) => Ok(Tau::finite(*v)?),
        RawTau::Str(s) if s.trim().eq_ignore_ascii_case("inf") => Ok(Tau::Infinite),
        RawTau::Str(s) => {
            Err(CliError::parse(path, format!("`{key}`: expected a number or \"inf\", got \"{s}\"")))
        }
    }
}

/// One-line message with the line number; toml already names the key.
fn describe(err: &toml::de::Error, text: &str) -> String {
    match err.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", err.message())
        }
        None => err.message().to_string(),
    }
}

/// `out.csv` → `out.nc.csv`; names without a `.csv` suffix get one.
pub fn suffixed(output: &Path, tag: &str) -> PathBuf {
    let name = output.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".csv").unwrap_or(&name);
    output.with_file_name(format!("{stem}.{tag}.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOTH: &str = r#"
treatment = "both"
mass = 1
force = [0.0, 1.0, 0.0]
x0 = [0.0, 0.0, 0.0]
v0 = [0.0, 0.0, 0.0]
t_end = 10.0
step = 0.001
output = "k2.csv"

[family]
id = "k2"
kappa = 0.1
tau = "inf"

[transform]
b1 = -0.025
tau = "inf"
"#;

    fn parse(text: &str) -> Result<ScenarioFile, CliError> {
        ScenarioFile::parse(text, Path::new("dir/s.toml"))
    }

    #[test]
    fn parses_full_document() {
        let s = parse(BOTH).unwrap();
        assert_eq!(s.treatment, TreatmentKind::Both);
        assert_eq!(s.family.unwrap().id(), FamilyId::K2);
        assert_eq!(s.transform.unwrap().b1, -0.025);
        assert_eq!(s.output.as_deref(), Some(Path::new("dir/k2.csv")));
        assert_eq!(s.scenario.mass, 1.0);
    }

    #[test]
    fn missing_key_is_named() {
        let err = parse(&BOTH.replace("mass = 1\n", "")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("mass"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse(&BOTH.replace("mass = 1", "mass = 1\nmas = 2")).unwrap_err();
        assert!(err.to_string().contains("mas"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_table_for_treatment() {
        let text = BOTH.split("[transform]").next().unwrap();
        let err = parse(text).unwrap_err();
        assert!(err.to_string().contains("transform"), "{err}");
        assert!(parse(&text.replace("\"both\"", "\"nc\"")).is_ok());
    }

    #[test]
    fn physics_ranges_are_exit_four() {
        for (from, to) in [
            ("mass = 1", "mass = -1"),
            ("step = 0.001", "step = 20.0"),
            ("tau = \"inf\"\n\n", "tau = -2\n\n"),
        ] {
            let err = parse(&BOTH.replacen(from, to, 1)).unwrap_err();
            assert_eq!(err.exit_code(), 4, "{to}: {err}");
        }
    }

    #[test]
    fn bad_tau_string_is_a_parse_error() {
        let err = parse(&BOTH.replacen("tau = \"inf\"", "tau = \"forever\"", 1)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("family.tau"));
    }

    #[test]
    fn output_suffixes() {
        assert_eq!(suffixed(Path::new("a/out.csv"), "nc"), Path::new("a/out.nc.csv"));
        assert_eq!(suffixed(Path::new("out"), "cl"), Path::new("out.cl.csv"));
    }
}
