//! Scenario files for power/ASN studies.
//!
//! A scenario names the generating pair `(X, Y)`, the maximum sample size
//! and the significance level. TOML layout:
//!
//! ```toml
//! name = "normal-shift"
//! max_n = 50
//! alpha = 0.05
//!
//! [x]
//! family = "normal"
//! params = [0.0, 1.0]
//!
//! [y]
//! family = "normal"
//! params = [0.5, 1.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};

/// One power-study scenario: differences are formed as `z = x - y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub max_n: usize,
    pub alpha: f64,
    pub x: DistributionSpec,
    pub y: DistributionSpec,
}

impl ScenarioSpec {
    pub fn new(
        name: impl Into<String>,
        max_n: usize,
        alpha: f64,
        x: DistributionSpec,
        y: DistributionSpec,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            max_n,
            alpha,
            x,
            y,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n < 4 {
            return Err(Error::invalid(format!(
                "scenario '{}': max_n must be at least 4, got {}",
                self.name, self.max_n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "scenario '{}': alpha must lie in (0, 1), got {}",
                self.name, self.alpha
            )));
        }
        self.x.validate()?;
        self.y.validate()?;
        Ok(())
    }

    pub fn from_toml_str(src: &str) -> Result<Self> {
        let spec: ScenarioSpec = toml::from_str(src)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_toml() {
        let src = r#"
            name = "s1"
            max_n = 50
            alpha = 0.05

            [x]
            family = "normal"
            params = [0.0, 1.0]

            [y]
            family = "normal"
            params = [0.5, 1.0]
        "#;
        let s = ScenarioSpec::from_toml_str(src).unwrap();
        assert_eq!(s.name, "s1");
        assert_eq!(s.max_n, 50);
        assert_eq!(s.x, DistributionSpec::Normal(0.0, 1.0));
        assert_eq!(s.y, DistributionSpec::Normal(0.5, 1.0));
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ScenarioSpec::new(
            "bad",
            3,
            0.05,
            DistributionSpec::Normal(0.0, 1.0),
            DistributionSpec::Normal(0.0, 1.0),
        )
        .is_err());
        assert!(ScenarioSpec::new(
            "bad",
            10,
            1.5,
            DistributionSpec::Normal(0.0, 1.0),
            DistributionSpec::Normal(0.0, 1.0),
        )
        .is_err());
        assert!(ScenarioSpec::from_toml_str("name = 1").is_err());
    }
}
