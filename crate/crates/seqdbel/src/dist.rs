//! Parametric distribution catalog for the Monte Carlo studies.
//!
//! Parameterizations follow the R conventions: `Gamma(shape, rate)`,
//! `LogNormal(meanlog, sdlog)` (i.e. `exp(Normal(meanlog, sdlog))`),
//! `Exponential(rate)`, `ChiSquare(df)`, `Cauchy(location, scale)`,
//! `Beta(a, b)`, `Normal(mean, sd)`, `Uniform(lo, hi)`.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named distribution family with its parameters. Serialized as
/// `{ family = "...", params = [...] }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist", into = "RawDist")]
pub enum DistributionSpec {
    /// `Normal(mean, sd)`
    Normal(f64, f64),
    /// `LogNormal(meanlog, sdlog)`
    LogNormal(f64, f64),
    /// `Uniform(lo, hi)` with `lo < hi`
    Uniform(f64, f64),
    /// `Exponential(rate)`
    Exponential(f64),
    /// `Gamma(shape, rate)`
    Gamma(f64, f64),
    /// `Beta(a, b)`
    Beta(f64, f64),
    /// `ChiSquare(df)`
    ChiSquare(f64),
    /// `Cauchy(location, scale)`
    Cauchy(f64, f64),
}

/// Wire form of [`DistributionSpec`].
#[derive(Serialize, Deserialize)]
struct RawDist {
    family: String,
    params: Vec<f64>,
}

impl TryFrom<RawDist> for DistributionSpec {
    type Error = String;

    fn try_from(raw: RawDist) -> std::result::Result<Self, String> {
        use DistributionSpec::*;
        let p = &raw.params;
        let arity = |want: usize, names: &str| -> std::result::Result<(), String> {
            if p.len() == want {
                Ok(())
            } else {
                Err(format!(
                    "family '{}' takes {want} parameter(s) ({names}), got {}",
                    raw.family,
                    p.len()
                ))
            }
        };
        Ok(match raw.family.to_ascii_lowercase().as_str() {
            "normal" | "norm" => {
                arity(2, "mean, sd")?;
                Normal(p[0], p[1])
            }
            "lognormal" | "logn" | "lnorm" => {
                arity(2, "meanlog, sdlog")?;
                LogNormal(p[0], p[1])
            }
            "uniform" | "unif" => {
                arity(2, "lo, hi")?;
                Uniform(p[0], p[1])
            }
            "exponential" | "exp" => {
                arity(1, "rate")?;
                Exponential(p[0])
            }
            "gamma" => {
                arity(2, "shape, rate")?;
                Gamma(p[0], p[1])
            }
            "beta" => {
                arity(2, "a, b")?;
                Beta(p[0], p[1])
            }
            "chisquare" | "chisq" => {
                arity(1, "df")?;
                ChiSquare(p[0])
            }
            "cauchy" => {
                arity(2, "location, scale")?;
                Cauchy(p[0], p[1])
            }
            other => return Err(format!("unknown distribution family '{other}'")),
        })
    }
}

impl From<DistributionSpec> for RawDist {
    fn from(spec: DistributionSpec) -> Self {
        use DistributionSpec::*;
        let (family, params) = match spec {
            Normal(a, b) => ("normal", vec![a, b]),
            LogNormal(a, b) => ("lognormal", vec![a, b]),
            Uniform(a, b) => ("uniform", vec![a, b]),
            Exponential(a) => ("exponential", vec![a]),
            Gamma(a, b) => ("gamma", vec![a, b]),
            Beta(a, b) => ("beta", vec![a, b]),
            ChiSquare(a) => ("chisquare", vec![a]),
            Cauchy(a, b) => ("cauchy", vec![a, b]),
        };
        RawDist {
            family: family.to_string(),
            params,
        }
    }
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        let check = |ok: bool, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!("{msg} in {self:?}")))
            }
        };
        match *self {
            Normal(m, sd) => check(m.is_finite() && sd > 0.0 && sd.is_finite(), "need sd > 0"),
            LogNormal(ml, sdl) => check(
                ml.is_finite() && sdl > 0.0 && sdl.is_finite(),
                "need sdlog > 0",
            ),
            Uniform(lo, hi) => check(lo.is_finite() && hi.is_finite() && lo < hi, "need lo < hi"),
            Exponential(rate) => check(rate > 0.0 && rate.is_finite(), "need rate > 0"),
            Gamma(shape, rate) => check(
                shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite(),
                "need shape > 0 and rate > 0",
            ),
            Beta(a, b) => check(
                a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite(),
                "need a > 0 and b > 0",
            ),
            ChiSquare(df) => check(df > 0.0 && df.is_finite(), "need df > 0"),
            Cauchy(loc, scale) => check(
                loc.is_finite() && scale > 0.0 && scale.is_finite(),
                "need scale > 0",
            ),
        }
    }

    /// A sampler for this specification.
    pub fn sampler(&self) -> Result<DistSampler> {
        self.validate()?;
        let bad = |e: &dyn std::fmt::Display| Error::invalid(format!("{self:?}: {e}"));
        Ok(match *self {
            DistributionSpec::Normal(mean, sd) => {
                DistSampler::Normal(rand_distr::Normal::new(mean, sd).map_err(|e| bad(&e))?)
            }
            DistributionSpec::LogNormal(meanlog, sdlog) => DistSampler::LogNormal(
                rand_distr::LogNormal::new(meanlog, sdlog).map_err(|e| bad(&e))?,
            ),
            DistributionSpec::Uniform(lo, hi) => {
                DistSampler::Uniform(rand_distr::Uniform::new(lo, hi).map_err(|e| bad(&e))?)
            }
            DistributionSpec::Exponential(rate) => {
                DistSampler::Exponential(rand_distr::Exp::new(rate).map_err(|e| bad(&e))?)
            }
            DistributionSpec::Gamma(shape, rate) => {
                // rand_distr parameterizes by scale = 1 / rate.
                DistSampler::Gamma(rand_distr::Gamma::new(shape, 1.0 / rate).map_err(|e| bad(&e))?)
            }
            DistributionSpec::Beta(a, b) => {
                DistSampler::Beta(rand_distr::Beta::new(a, b).map_err(|e| bad(&e))?)
            }
            DistributionSpec::ChiSquare(df) => {
                DistSampler::ChiSquare(rand_distr::ChiSquared::new(df).map_err(|e| bad(&e))?)
            }
            DistributionSpec::Cauchy(loc, scale) => {
                DistSampler::Cauchy(rand_distr::Cauchy::new(loc, scale).map_err(|e| bad(&e))?)
            }
        })
    }
}

/// Ready-to-draw sampler built from a [`DistributionSpec`].
#[derive(Debug, Clone, Copy)]
pub enum DistSampler {
    Normal(rand_distr::Normal<f64>),
    LogNormal(rand_distr::LogNormal<f64>),
    Uniform(rand_distr::Uniform<f64>),
    Exponential(rand_distr::Exp<f64>),
    Gamma(rand_distr::Gamma<f64>),
    Beta(rand_distr::Beta<f64>),
    ChiSquare(rand_distr::ChiSquared<f64>),
    Cauchy(rand_distr::Cauchy<f64>),
}

impl Distribution<f64> for DistSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistSampler::Normal(d) => d.sample(rng),
            DistSampler::LogNormal(d) => d.sample(rng),
            DistSampler::Uniform(d) => d.sample(rng),
            DistSampler::Exponential(d) => d.sample(rng),
            DistSampler::Gamma(d) => d.sample(rng),
            DistSampler::Beta(d) => d.sample(rng),
            DistSampler::ChiSquare(d) => d.sample(rng),
            DistSampler::Cauchy(d) => d.sample(rng),
        }
    }
}

/// Draws `count` i.i.d. values.
pub fn sample<R: Rng + ?Sized>(
    dist: &DistributionSpec,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let sampler = dist.sampler()?;
    Ok((0..count).map(|_| sampler.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::replication_rng;

    #[test]
    fn validation_catches_bad_parameters() {
        assert!(DistributionSpec::Normal(0.0, 0.0).validate().is_err());
        assert!(DistributionSpec::Uniform(2.0, 1.0).validate().is_err());
        assert!(DistributionSpec::Exponential(-1.0).validate().is_err());
        assert!(DistributionSpec::Gamma(1.0, 0.0).validate().is_err());
        assert!(DistributionSpec::Beta(0.0, 1.0).validate().is_err());
        assert!(DistributionSpec::ChiSquare(0.0).validate().is_err());
        assert!(DistributionSpec::Cauchy(0.0, 0.0).validate().is_err());
        assert!(DistributionSpec::Normal(0.0, 1.0).validate().is_ok());
    }

    #[test]
    fn count_zero_gives_empty() {
        let mut rng = replication_rng(1, 0);
        let v = sample(&DistributionSpec::Normal(0.0, 1.0), 0, &mut rng).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn law_of_large_numbers_normal() {
        let mut rng = replication_rng(42, 0);
        let v = sample(&DistributionSpec::Normal(0.0, 1.0), 1_000_000, &mut rng).unwrap();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len() - 1) as f64)
            .sqrt();
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((sd - 1.0).abs() < 0.005, "sd {sd}");
    }

    #[test]
    fn moments_match_r_parameterizations() {
        // Gamma(shape = 5, rate = 1): mean 5. Gamma(1, 1/5): mean 5.
        // LogNormal(0, 1): mean exp(1/2). Exponential(2): mean 1/2.
        // ChiSquare(6): mean 6. Beta(0.7, 1): mean 0.7 / 1.7.
        let cases: Vec<(DistributionSpec, f64)> = vec![
            (DistributionSpec::Gamma(5.0, 1.0), 5.0),
            (DistributionSpec::Gamma(1.0, 0.2), 5.0),
            (DistributionSpec::LogNormal(0.0, 1.0), 0.5f64.exp()),
            (DistributionSpec::Exponential(2.0), 0.5),
            (DistributionSpec::ChiSquare(6.0), 6.0),
            (DistributionSpec::Beta(0.7, 1.0), 0.7 / 1.7),
            (DistributionSpec::Uniform(1.0, 2.0), 1.5),
        ];
        for (i, (spec, want)) in cases.iter().enumerate() {
            let mut rng = replication_rng(7, i as u64);
            let v = sample(spec, 400_000, &mut rng).unwrap();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            assert!(
                (mean - want).abs() < 0.02 * want.abs().max(1.0),
                "{spec:?}: mean {mean}, want {want}"
            );
        }
    }

    #[test]
    fn uniform_minus_lognormal_difference_moments() {
        // Differences U(1,2) - LogN(0,1): mean 1.5 - exp(0.5).
        let mut rng = replication_rng(11, 0);
        let x = sample(&DistributionSpec::Uniform(1.0, 2.0), 500_000, &mut rng).unwrap();
        let y = sample(&DistributionSpec::LogNormal(0.0, 1.0), 500_000, &mut rng).unwrap();
        let mean = x
            .iter()
            .zip(&y)
            .map(|(a, b)| a - b)
            .sum::<f64>()
            / x.len() as f64;
        let want = 1.5 - 0.5f64.exp();
        assert!((mean - want).abs() < 0.01, "mean {mean}, want {want}");
    }

    #[test]
    fn serde_family_and_params() {
        let spec = DistributionSpec::Gamma(5.0, 1.0);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"gamma","params":[5.0,1.0]}"#);
        let back: DistributionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let toml_src = "family = \"chisq\"\nparams = [6.0]\n";
        let spec: DistributionSpec = toml::from_str(toml_src).unwrap();
        assert_eq!(spec, DistributionSpec::ChiSquare(6.0));
    }
}
