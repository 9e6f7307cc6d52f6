//! Consistent estimators of Markov chain order and Markov random field
//! range, with baselines, ground-truth simulators and an experiment runner.
//!
//! ```
//! use mol_core::{estimate_order_fluctuation, sample_markov, FluctuationConfig, MarkovModel};
//!
//! let model = MarkovModel::two_state(0.1, 0.1).unwrap();
//! let x = sample_markov(&model, 20_000, 7).unwrap();
//! let report = estimate_order_fluctuation(&x, &FluctuationConfig::with_k_max(4)).unwrap();
//! assert_eq!(report.chosen_order, 1);
//! ```

pub mod baselines;
mod error;
pub mod exec;
pub mod experiment;
pub mod fluctuation;
pub mod io;
pub mod methods;
pub mod model_spec;
pub mod mrf;
pub mod recurrence;
pub mod report;
pub mod seqcore;
pub mod simulate;

pub use baselines::{bic_order, build_flatspot_chain, naive_flatspot_order, BicConfig, BicReport, FlatspotConfig};
pub use error::{Error, Result};
pub use exec::Execution;
pub use experiment::{run_experiment, ExperimentPlan, ExperimentResult};
pub use fluctuation::{estimate_order_fluctuation, FluctuationConfig, Window};
pub use methods::MethodConfig;
pub use mrf::{estimate_range, LatticeConfiguration, MrfConfig, MrfMode, SquareSpec};
pub use recurrence::{estimate_order_entropy, estimate_order_general, EntropyConfig};
pub use report::{CandidateRecord, EstimationReport, Method};
pub use seqcore::{Alphabet, Sequence, Symbol};
pub use simulate::{
    derive_seed, sample_lattice, sample_markov, stationary_distribution, theoretical_entropies, LatticeModel,
    MarkovModel,
};
