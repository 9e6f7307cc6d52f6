//! One config type covering every estimator, so reports, plans and the CLI
//! can carry "which method with which settings" as a single value.

use serde::{Deserialize, Serialize};

use crate::baselines::{bic_order_with, naive_flatspot_order, BicConfig, FlatspotConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fluctuation::{estimate_order_fluctuation_with, FluctuationConfig};
use crate::mrf::{estimate_range_with, LatticeConfiguration, MrfConfig};
use crate::recurrence::EntropyConfig;
use crate::report::{EstimationReport, Method};
use crate::seqcore::Sequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MethodConfig {
    Entropy(EntropyConfig),
    Fluctuation(FluctuationConfig),
    Bic(BicConfig),
    Flatspot(FlatspotConfig),
    Mrf(MrfConfig),
}

impl MethodConfig {
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Entropy => MethodConfig::Entropy(EntropyConfig::default()),
            Method::Fluctuation => MethodConfig::Fluctuation(FluctuationConfig::default()),
            Method::Bic => MethodConfig::Bic(BicConfig::default()),
            Method::Flatspot => MethodConfig::Flatspot(FlatspotConfig::default()),
            Method::Mrf => MethodConfig::Mrf(MrfConfig::default()),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            MethodConfig::Entropy(_) => Method::Entropy,
            MethodConfig::Fluctuation(_) => Method::Fluctuation,
            MethodConfig::Bic(_) => Method::Bic,
            MethodConfig::Flatspot(_) => Method::Flatspot,
            MethodConfig::Mrf(_) => Method::Mrf,
        }
    }

    /// Settings for `method` from a JSON object or a TOML table; missing
    /// fields take their defaults and a `method` key, if present, must agree.
    pub fn parse_settings(method: Method, text: &str) -> Result<Self> {
        let mut value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(json_err) => {
                let table: toml::Table = toml::from_str(text).map_err(|toml_err| {
                    Error::Parse(format!("settings are neither JSON ({json_err}) nor TOML ({toml_err})"))
                })?;
                serde_json::to_value(table).map_err(|e| Error::Parse(e.to_string()))?
            }
        };
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::Parse("settings must be an object".into()))?;
        match obj.get("method").and_then(|m| m.as_str()) {
            Some(m) if m != method.as_str() => {
                return Err(Error::Parse(format!("settings are for '{m}', not '{method}'")))
            }
            _ => {}
        }
        obj.insert("method".into(), method.as_str().into());
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, MethodConfig::Mrf(_))
    }

    pub fn run_sequence(&self, x: &Sequence, exec: Execution) -> Result<EstimationReport> {
        match self {
            MethodConfig::Entropy(c) => c.run(x),
            MethodConfig::Fluctuation(c) => estimate_order_fluctuation_with(x, c, exec),
            MethodConfig::Bic(c) => Ok(bic_order_with(x, c, exec)?.into()),
            MethodConfig::Flatspot(c) => naive_flatspot_order(x, c),
            MethodConfig::Mrf(_) => Err(Error::Precondition(
                "the mrf method needs a lattice, not a sequence".into(),
            )),
        }
    }

    pub fn run_lattice(&self, x: &LatticeConfiguration, exec: Execution) -> Result<EstimationReport> {
        match self {
            MethodConfig::Mrf(c) => estimate_range_with(x, c, exec),
            other => Err(Error::Precondition(format!(
                "the {} method needs a sequence, not a lattice",
                other.method()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_parse_from_json_or_toml() {
        let a = MethodConfig::parse_settings(Method::Bic, r#"{"k_max": 3}"#).unwrap();
        let b = MethodConfig::parse_settings(Method::Bic, "k_max = 3").unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a,
            MethodConfig::Bic(BicConfig {
                k_max: 3,
                ..Default::default()
            })
        );
        assert!(MethodConfig::parse_settings(Method::Bic, r#"{"method": "mrf"}"#).is_err());
        assert!(MethodConfig::parse_settings(Method::Bic, "[1, 2]").is_err());
    }

    #[test]
    fn configs_round_trip_through_json() {
        for m in Method::ALL {
            let c = MethodConfig::default_for(m);
            assert_eq!(c.method(), m);
            let s = serde_json::to_string(&c).unwrap();
            assert!(s.contains(&format!("\"method\":\"{m}\"")), "{s}");
            let back: MethodConfig = serde_json::from_str(&s).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn partial_configs_fill_defaults() {
        let c: MethodConfig =
            serde_json::from_str(r#"{"method":"fluctuation","window":{"kind":"fixed","k_max":4}}"#).unwrap();
        assert_eq!(c, MethodConfig::Fluctuation(FluctuationConfig::with_k_max(4)));
    }
}
