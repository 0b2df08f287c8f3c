use std::path::{Path, PathBuf};
use std::sync::Arc;

use nvneumann::fieldexpr::{ScalarField, Support};
use nvneumann::geometry::{build_domain, CurveSpec, Point};
use nvneumann::neumann::{NeumannProblem, Normalization, DEFAULT_ORDER};
use nvneumann::quadrature::{Discretization, DEFAULT_M_R, DEFAULT_M_T, DEFAULT_N};
use nvneumann::schauder::{BoundaryDist, DensityRep};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A Neumann problem as read from JSON. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: Vec<CurveSpec>,
    #[serde(default)]
    pub f: Source,
    #[serde(default)]
    pub g: Flux,
    #[serde(default)]
    pub discretization: Resolution,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub outputs: Outputs,
    /// Origin of `r` and `theta` in every expression.
    #[serde(default)]
    pub origin: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
}

fn zero() -> String {
    "0".into()
}

/// `f = f0 + ∂₁f1 + ∂₂f2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    #[serde(default = "zero")]
    pub f0: String,
    #[serde(default = "zero")]
    pub f1: String,
    #[serde(default = "zero")]
    pub f2: String,
}

impl Default for Source {
    fn default() -> Self {
        Source {
            f0: zero(),
            f1: zero(),
            f2: zero(),
        }
    }
}

/// `g = μ₀ + S_+ᵗ[μ₁]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flux {
    #[serde(default = "zero")]
    pub mu0: String,
    #[serde(default = "zero")]
    pub mu1: String,
}

impl Default for Flux {
    fn default() -> Self {
        Flux {
            mu0: zero(),
            mu1: zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    #[serde(default = "default_n", alias = "N")]
    pub n: usize,
    #[serde(default = "default_m_r", alias = "M_r")]
    pub m_r: usize,
    #[serde(default = "default_m_t", alias = "M_t")]
    pub m_t: usize,
    #[serde(default = "default_k", alias = "K")]
    pub k: usize,
}

fn default_n() -> usize {
    DEFAULT_N
}
fn default_m_r() -> usize {
    DEFAULT_M_R
}
fn default_m_t() -> usize {
    DEFAULT_M_T
}
fn default_k() -> usize {
    DEFAULT_ORDER
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            n: DEFAULT_N,
            m_r: DEFAULT_M_R,
            m_t: DEFAULT_M_T,
            k: DEFAULT_ORDER,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Interior probe points; 25 per component when empty.
    #[serde(default)]
    pub probes: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// A known exact solution, used for probe errors and convergence sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oracle {
    pub u: String,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ProblemConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses every expression and checks the resolution without building operators.
    pub fn validate(&self) -> Result<(), CliError> {
        self.density()?;
        for (name, text) in [("g.mu0", &self.g.mu0), ("g.mu1", &self.g.mu1)] {
            self.field(name, text, Support::Boundary)?;
        }
        if let Some(o) = &self.oracle {
            self.field("oracle.u", &o.u, Support::Interior)?;
        }
        let r = self.discretization;
        if r.n < 8 || !r.n.is_multiple_of(2) {
            return Err(CliError::Config(format!(
                "discretization.n = {} must be even and >= 8",
                r.n
            )));
        }
        if r.m_r == 0 || r.m_t == 0 {
            return Err(CliError::Config("discretization.m_r and m_t must be positive".into()));
        }
        if r.k == 0 || 2 * r.k >= r.n {
            return Err(CliError::Config(format!(
                "discretization.k = {} must lie in 1..{}",
                r.k,
                r.n / 2
            )));
        }
        if self.domain.is_empty() {
            return Err(CliError::Config("domain needs at least one curve".into()));
        }
        Ok(())
    }

    fn field(&self, name: &str, text: &str, support: Support) -> Result<ScalarField, CliError> {
        ScalarField::parse(text, self.origin, support).map_err(|e| CliError::Config(format!("{name}: {e}")))
    }

    pub fn density(&self) -> Result<DensityRep, CliError> {
        Ok(DensityRep::new(
            self.field("f.f0", &self.f.f0, Support::Interior)?,
            self.field("f.f1", &self.f.f1, Support::Interior)?,
            self.field("f.f2", &self.f.f2, Support::Interior)?,
        ))
    }

    pub fn oracle_field(&self) -> Result<Option<ScalarField>, CliError> {
        self.oracle
            .as_ref()
            .map(|o| self.field("oracle.u", &o.u, Support::Interior))
            .transpose()
    }

    pub fn discretize(&self) -> Result<Arc<Discretization>, CliError> {
        let domain = build_domain(self.domain.clone()).map_err(|e| CliError::Config(format!("domain: {e}")))?;
        let r = self.discretization;
        Discretization::new(domain, r.n, r.m_r, r.m_t)
            .map(Arc::new)
            .map_err(|e| CliError::Config(format!("discretization: {e}")))
    }

    pub fn problem(&self, disc: Arc<Discretization>, tol_scale: f64) -> Result<NeumannProblem, CliError> {
        let g = BoundaryDist::from_fields(
            &self.field("g.mu0", &self.g.mu0, Support::Boundary)?,
            &self.field("g.mu1", &self.g.mu1, Support::Boundary)?,
            &disc.nodes,
        )
        .map_err(|e| CliError::Config(format!("g: {e}")))?;
        Ok(NeumannProblem::new(disc, self.density()?, g)?
            .with_order(self.discretization.k)
            .with_normalization(self.normalization.clone())
            .with_tol_scale(tol_scale))
    }

    /// Configured probes, or 25 deterministic interior points per component.
    pub fn probes(&self, disc: &Discretization) -> Vec<Point> {
        if !self.outputs.probes.is_empty() {
            return self.outputs.probes.clone();
        }
        (0..disc.domain.len())
            .flat_map(|j| disc.domain.probe_points(j, &[0.3, 0.6, 0.9], 8))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = r#"{"domain": [{"circle": {"center": [0, 0], "radius": 1}}],
        "f": {"f0": "1"}, "g": {"mu0": "0.5"}}"#;

    #[test]
    fn defaults_fill_in() {
        let c = ProblemConfig::from_json(DISK).unwrap();
        assert_eq!(c.discretization, Resolution::default());
        assert_eq!(c.f.f1, "0");
        assert_eq!(c.normalization, Normalization::ZeroMean);
        let back: ProblemConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_expressions() {
        let bad = DISK.replace("\"f0\"", "\"f3\"");
        assert!(matches!(ProblemConfig::from_json(&bad), Err(CliError::Config(_))));
        let bad = DISK.replace("0.5", "0.5 +");
        let Err(CliError::Config(msg)) = ProblemConfig::from_json(&bad) else {
            panic!()
        };
        assert!(msg.contains("g.mu0") && msg.contains("position"), "{msg}");
        let Err(CliError::Config(msg)) = ProblemConfig::from_json("{\"domain\": [") else {
            panic!()
        };
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn aliases_and_anchor() {
        let c = ProblemConfig::from_json(
            r#"{"domain": [{"ellipse": {"center": [0, 0], "a": 2, "b": 1}}],
                "discretization": {"N": 64, "K": 8},
                "normalization": {"anchor": [[0.5, 0]]}}"#,
        )
        .unwrap();
        assert_eq!(c.discretization.n, 64);
        assert_eq!(c.discretization.k, 8);
        assert_eq!(c.normalization, Normalization::Anchor(vec![[0.5, 0.0]]));
        let bad = r#"{"domain": [{"circle": {"center": [0, 0], "radius": 1}}], "discretization": {"n": 32, "k": 16}}"#;
        assert!(ProblemConfig::from_json(bad).is_err());
    }
}
