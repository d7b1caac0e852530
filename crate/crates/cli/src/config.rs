//! Experiment configuration files and their translation into core objects.
//!
//! Rationals are always strings (`"3/4"`, `"-2"`, `"0.125"`). A field
//! element is either such a string or an array of strings giving its
//! coordinates in the power basis `1, θ, θ², ...`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use heightlab::field::{FieldElement, NumberField};
use heightlab::heights::{LinearForm, ProjectivePoint};
use heightlab::places::{place, RationalPlace};
use heightlab::rat::parse_rational;
use heightlab::twisted::PlaceForms;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Schmidt,
    Fw,
    Parametric,
    Scatter,
    Ruvojta,
    PlacesAudit,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Schmidt => "schmidt",
            Mode::Fw => "fw",
            Mode::Parametric => "parametric",
            Mode::Scatter => "scatter",
            Mode::Ruvojta => "ruvojta",
            Mode::PlacesAudit => "places-audit",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Rational(String),
    Element(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PlaceName {
    Prime(u64),
    Name(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceConfig {
    pub v: PlaceName,
    #[serde(default)]
    pub w_index: usize,
    #[serde(default)]
    pub forms: Vec<Vec<Coeff>>,
    pub weights: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverChoice {
    #[default]
    Exact,
    Greedy,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverConfig {
    #[serde(default)]
    pub mode: CoverChoice,
    pub max_subspaces: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuVojtaConfig {
    pub n: u64,
    pub m: u64,
    pub m_max: Option<u64>,
    /// One β per coordinate hyperplane x_i = 0, i = 0..=n.
    pub betas: Vec<String>,
    pub b: u64,
    pub epsilon1: String,
    pub sigma: Vec<usize>,
    /// Largest number of Δ_σ tuples whose filtration profile is reported.
    pub max_profiles: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Monic integer minimal polynomial, constant term first; Q when absent.
    pub field: Option<Vec<i64>>,
    pub n: Option<usize>,
    #[serde(default)]
    pub places: Vec<PlaceConfig>,
    pub epsilon: Option<String>,
    pub slack: Option<String>,
    pub q: Option<String>,
    #[serde(default)]
    pub q_grid: Vec<String>,
    pub height_bound: Option<u64>,
    pub budget: Option<usize>,
    pub precision: Option<u32>,
    pub points: Option<Vec<Vec<i64>>>,
    pub cover: Option<CoverConfig>,
    /// Place distribution d_v for Type II scattering; uniform when absent.
    pub distribution: Option<Vec<String>>,
    pub ruvojta: Option<RuVojtaConfig>,
    /// Field elements whose product formula defect is audited.
    #[serde(default)]
    pub elements: Vec<Coeff>,
    /// Rational primes whose places are listed by `places`.
    #[serde(default)]
    pub primes: Vec<u64>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

pub fn rational(s: &str, at: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|_| invalid(format!("{at}: \"{s}\" is not a rational number")))
}

/// A parsed config together with the digest of its canonical JSON form.
pub struct Loaded {
    pub config: ExperimentConfig,
    pub digest: String,
}

pub fn load(text: &str) -> Result<Loaded, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid(format!("not valid JSON: {e}")))?;
    // serde_json maps are ordered by key, so this text is canonical
    let canonical = serde_json::to_string(&value).expect("a parsed value serializes");
    let digest = hex::encode(Sha256::digest(canonical.as_bytes()));
    let config: ExperimentConfig = serde_json::from_value(value).map_err(|e| invalid(e.to_string()))?;
    Ok(Loaded { config, digest })
}

impl ExperimentConfig {
    pub fn number_field(&self) -> Result<Arc<NumberField>, CliError> {
        match &self.field {
            None => Ok(NumberField::rationals()),
            Some(p) => NumberField::from_i64(p).map_err(|e| invalid(format!("field: {e}"))),
        }
    }

    pub fn slack(&self) -> Result<BigRational, CliError> {
        let s = match &self.slack {
            Some(s) => rational(s, "slack")?,
            None => BigRational::zero(),
        };
        if s.is_negative() {
            return Err(invalid("slack: must be nonnegative"));
        }
        Ok(s)
    }

    pub fn epsilon(&self) -> Result<BigRational, CliError> {
        let s = self.epsilon.as_deref().ok_or_else(|| invalid("epsilon: required for this experiment"))?;
        rational(s, "epsilon")
    }

    pub fn dimension(&self) -> Result<usize, CliError> {
        match self.n {
            Some(0) => Err(invalid("n: must be at least 1")),
            Some(n) => Ok(n),
            None => Err(invalid("n: required for this experiment")),
        }
    }

    pub fn q_values(&self) -> Result<Vec<BigRational>, CliError> {
        self.q_grid.iter().enumerate().map(|(k, s)| rational(s, &format!("q_grid[{k}]"))).collect()
    }

    /// Q for single-Q experiments: `q`, else the first grid value, else 1.
    pub fn single_q(&self) -> Result<BigRational, CliError> {
        match (&self.q, self.q_grid.first()) {
            (Some(s), _) => rational(s, "q"),
            (None, Some(s)) => rational(s, "q_grid[0]"),
            (None, None) => Ok(BigRational::from_integer(1.into())),
        }
    }

    pub fn rational_place(&self, k: usize) -> Result<RationalPlace, CliError> {
        match &self.places[k].v {
            PlaceName::Prime(p) if heightlab::rat::is_prime_u64(*p) => Ok(RationalPlace::Prime(*p)),
            PlaceName::Name(s) if s == "inf" => Ok(RationalPlace::Infinity),
            PlaceName::Name(s) => match s.parse::<u64>() {
                Ok(p) if heightlab::rat::is_prime_u64(p) => Ok(RationalPlace::Prime(p)),
                _ => Err(invalid(format!("places[{k}].v: \"{s}\" is neither \"inf\" nor a prime"))),
            },
            PlaceName::Prime(p) => Err(invalid(format!("places[{k}].v: {p} is not prime"))),
        }
    }

    /// Places of S with their forms and weights, checked against n.
    /// `weights` says what the weight rows must look like.
    pub fn place_forms(&self, field: &Arc<NumberField>, digits: u32, weights: WeightRule) -> Result<Vec<PlaceForms>, CliError> {
        let n = self.dimension()?;
        if self.places.is_empty() {
            return Err(invalid("places: at least one place is required"));
        }
        let mut out = Vec::with_capacity(self.places.len());
        for (k, pc) in self.places.iter().enumerate() {
            let v = self.rational_place(k)?;
            let w = place(field, v, pc.w_index, digits).map_err(|e| invalid(format!("places[{k}]: {e}")))?;
            if pc.forms.len() != n + 1 {
                return Err(invalid(format!("places[{k}].forms: expected {} forms on P^{n}, got {}", n + 1, pc.forms.len())));
            }
            let mut forms = Vec::with_capacity(n + 1);
            for (i, f) in pc.forms.iter().enumerate() {
                let at = format!("places[{k}].forms[{i}]");
                if f.len() != n + 1 {
                    return Err(invalid(format!("{at}: expected {} coefficients, got {}", n + 1, f.len())));
                }
                let coeffs = f
                    .iter()
                    .enumerate()
                    .map(|(j, c)| element(field, c, &format!("{at}[{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                forms.push(LinearForm::new(field, coeffs).map_err(|e| invalid(format!("{at}: {e}")))?);
            }
            let row = match (&pc.weights, weights) {
                (_, WeightRule::Ignored) => Vec::new(),
                (None, _) => return Err(invalid(format!("places[{k}].weights: required for mode {}", self.mode.name()))),
                (Some(ws), rule) => {
                    if ws.len() != n + 1 {
                        return Err(invalid(format!("places[{k}].weights: expected {} entries, got {}", n + 1, ws.len())));
                    }
                    let row = ws
                        .iter()
                        .enumerate()
                        .map(|(i, s)| rational(s, &format!("places[{k}].weights[{i}]")))
                        .collect::<Result<Vec<_>, _>>()?;
                    if rule == WeightRule::ZeroSum {
                        let sum: BigRational = row.iter().sum();
                        if !sum.is_zero() {
                            return Err(invalid(format!("places[{k}].weights (place {v}): row sums to {sum}, not 0")));
                        }
                    }
                    row
                }
            };
            out.push(PlaceForms { place: w, forms, weights: row });
        }
        Ok(out)
    }

    pub fn explicit_points(&self) -> Result<Option<Vec<ProjectivePoint>>, CliError> {
        let Some(raw) = &self.points else {
            return Ok(None);
        };
        let n = self.n;
        let mut out = Vec::with_capacity(raw.len());
        for (k, c) in raw.iter().enumerate() {
            if n.is_some_and(|n| c.len() != n + 1) {
                return Err(invalid(format!("points[{k}]: expected {} coordinates", n.unwrap() + 1)));
            }
            out.push(ProjectivePoint::new(c.clone()).map_err(|e| invalid(format!("points[{k}]: {e}")))?);
        }
        Ok(Some(out))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightRule {
    Ignored,
    Any,
    ZeroSum,
}

pub fn element(field: &Arc<NumberField>, c: &Coeff, at: &str) -> Result<FieldElement, CliError> {
    match c {
        Coeff::Rational(s) => Ok(FieldElement::from_rational(field, rational(s, at)?)),
        Coeff::Element(v) => {
            if v.len() > field.degree() {
                return Err(invalid(format!("{at}: {} coordinates for a field of degree {}", v.len(), field.degree())));
            }
            let coeffs = v.iter().map(|s| rational(s, at)).collect::<Result<Vec<_>, _>>()?;
            FieldElement::new(field, coeffs).map_err(|e| invalid(format!("{at}: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roth_text(weights: &str) -> String {
        format!(
            r#"{{"mode": "parametric", "field": [-2, 0, 1], "n": 1, "epsilon": "1/10",
               "places": [{{"v": "inf", "w_index": 1,
                            "forms": [[["0", "-1"], "1"], ["1", "0"]], "weights": {weights}}}]}}"#
        )
    }

    #[test]
    fn parses_and_builds_forms() {
        let l = load(&roth_text(r#"["1/2", "-1/2"]"#)).unwrap();
        let f = l.config.number_field().unwrap();
        let pf = l.config.place_forms(&f, 40, WeightRule::ZeroSum).unwrap();
        assert_eq!(pf[0].forms.len(), 2);
        assert_eq!(pf[0].place.w_index, 1);
        assert_eq!(l.digest.len(), 64);
    }

    #[test]
    fn digest_ignores_layout() {
        let a = load(r#"{"mode": "ruvojta", "n": 2}"#).unwrap();
        let b = load("{\n  \"n\": 2,\n  \"mode\": \"ruvojta\"\n}").unwrap();
        assert_eq!(a.digest, b.digest);
    }

    #[test]
    fn names_the_bad_weights_row() {
        let l = load(&roth_text(r#"["1/2", "1/3"]"#)).unwrap();
        let f = l.config.number_field().unwrap();
        let err = l.config.place_forms(&f, 40, WeightRule::ZeroSum).unwrap_err().to_string();
        assert!(err.contains("places[0].weights"), "{err}");
        assert!(err.contains("5/6"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_places() {
        assert!(load(r#"{"mode": "fw", "colour": 1}"#).is_err());
        let l = load(r#"{"mode": "schmidt", "n": 1, "places": [{"v": 4, "forms": []}]}"#).unwrap();
        assert!(l.config.rational_place(0).unwrap_err().to_string().contains("not prime"));
    }
}
