//! TOML model descriptions read and written by the command line.
//!
//! ```toml
//! kind = "two_state"
//! p = 0.1
//! q = 0.1
//! ```

use serde::{Deserialize, Serialize};

use crate::baselines::build_flatspot_chain;
use crate::error::{Error, Result};
use crate::seqcore::Alphabet;
use crate::simulate::{random_kernel, Concentration, LatticeModel, MarkovModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainSpec {
    /// Explicit kernel rows, contexts in base-|A| order, oldest symbol most
    /// significant.
    Markov {
        alphabet: usize,
        order: usize,
        kernel: Vec<Vec<f64>>,
    },
    Iid {
        probs: Vec<f64>,
    },
    TwoState {
        p: f64,
        q: f64,
    },
    CyclicShift {
        alphabet: usize,
        stay: f64,
    },
    Flatspot {
        lag: usize,
        stay_prob: f64,
    },
    /// Dirichlet rows; `uniform = true` takes the infinite-concentration
    /// limit instead.
    RandomKernel {
        order: usize,
        alphabet: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        concentration: Option<f64>,
        #[serde(default)]
        uniform: bool,
        #[serde(default)]
        seed: u64,
    },
}

impl ChainSpec {
    pub fn build(&self) -> Result<MarkovModel> {
        match self {
            ChainSpec::Markov {
                alphabet,
                order,
                kernel,
            } => MarkovModel::new(Alphabet::new(*alphabet)?, *order, kernel.clone()),
            ChainSpec::Iid { probs } => MarkovModel::iid(probs.clone()),
            ChainSpec::TwoState { p, q } => MarkovModel::two_state(*p, *q),
            ChainSpec::CyclicShift { alphabet, stay } => MarkovModel::cyclic_shift(*alphabet, *stay),
            ChainSpec::Flatspot { lag, stay_prob } => build_flatspot_chain(*lag, *stay_prob),
            ChainSpec::RandomKernel {
                order,
                alphabet,
                concentration,
                uniform,
                seed,
            } => {
                let conc = match (uniform, concentration) {
                    (true, _) => Concentration::Uniform,
                    (false, Some(alpha)) => Concentration::Dirichlet { alpha: *alpha },
                    (false, None) => {
                        return Err(Error::InvalidModel(
                            "random_kernel needs a concentration or uniform = true".into(),
                        ))
                    }
                };
                random_kernel(*order, Alphabet::new(*alphabet)?, conc, *seed)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChainSpec::Markov { .. } => "markov",
            ChainSpec::Iid { .. } => "iid",
            ChainSpec::TwoState { .. } => "two_state",
            ChainSpec::CyclicShift { .. } => "cyclic_shift",
            ChainSpec::Flatspot { .. } => "flatspot",
            ChainSpec::RandomKernel { .. } => "random_kernel",
        }
    }

    /// The explicit-kernel spec of a built model.
    pub fn from_model(model: &MarkovModel) -> Self {
        ChainSpec::Markov {
            alphabet: model.alphabet().size(),
            order: model.order(),
            kernel: model.rows().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(format!("model spec: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("chain specs serialize to TOML")
    }
}

pub fn lattice_from_toml(s: &str) -> Result<LatticeModel> {
    let model: LatticeModel = toml::from_str(s).map_err(|e| Error::Parse(format!("lattice spec: {e}")))?;
    model.validate()?;
    Ok(model)
}

pub fn lattice_to_toml(model: &LatticeModel) -> String {
    toml::to_string(model).expect("lattice specs serialize to TOML")
}
