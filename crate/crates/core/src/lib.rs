//! Sequential choice bandits.
//!
//! A platform shows a user an ordered sequence of messages. At each message
//! the user accepts it (valuation `u_i`), or refuses and then abandons the
//! platform with probability `p` (cost `c`) or moves to the next message.
//! This crate computes expected payoffs, finds optimal sequences, simulates
//! users and learns the parameters online, with or without user features.
//!
//! ```
//! use scbandit::{expected_payoff, optimal_sequence, EnvironmentParams, MessageCatalog};
//!
//! let catalog = MessageCatalog::new(vec![1.0, 0.5, 0.2]).unwrap();
//! let env = EnvironmentParams::new(vec![0.1, 0.3, 0.5], 0.5, 0.1).unwrap();
//! let best = optimal_sequence(&catalog, &env).unwrap();
//! let value = expected_payoff(&catalog, &env, &best).unwrap().expected_payoff;
//! assert!(value > 0.0);
//! ```

pub mod error;
pub mod experiment;
pub mod glm;
pub mod learner;
pub mod linalg;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod simulator;

pub use error::{Error, Result};
pub use glm::{
    fit_logistic, logistic_link, quasi_mle, Algorithm2, BinomialData, ContextualBenchmark,
    ContextualPolicy, GlmLearnerState, GlmSettings, RefitSchedule,
};
pub use learner::{
    Algorithm1, Benchmark, Exploration, LearnerState, PointEstimates, SequencePolicy, UcbView,
};
pub use model::{
    abandonment_probability, expected_payoff, expected_payoff_general_w, selection_probabilities,
    EnvironmentParams, MessageCatalog, PayoffBreakdown, Sequence,
};
pub use optimizer::{optimal_sequence, optimal_sequence_with_fixed_head, score, ScoredMessage};
pub use oracle::{enumerate_optimal, enumerate_optimal_general_w};
pub use simulator::{
    run_contextual_episode, run_episode, sample_features, stream_rng, ContextualEnvironment,
    EpisodeOutcome, FeatureSpec, SimRng, Terminal,
};
