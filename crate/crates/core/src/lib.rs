//! Exact brute-force analysis of finite Bayesian mechanisms in which
//! agents' strategic actions may be costly.
//!
//! * [`game`]: type spaces, outcomes, social choice functions, mechanisms,
//!   utilities, costs and profits.
//! * [`equilibrium`] and [`normal_form`]: pure-strategy Bayesian Nash
//!   equilibrium (utility- or profit-based) and complete-information games.
//! * [`revelation`]: direct mechanisms, truthful implementability, and an
//!   audit of the step from implementation to truthful implementation.
//! * [`labor`]: a two-agent labor market with education signals where an
//!   implementable hiring rule is not truthfully implementable.
//!
//! Every quantity is an exact [`rational::Rational`].

pub mod equilibrium;
pub mod error;
pub mod game;
pub mod labor;
pub mod normal_form;
pub mod profile;
pub mod rational;
pub mod revelation;

pub use equilibrium::{
    enumerate_pure_strategies, implements_scf, induced_scf, BayesianGame, BneVerdict, Deviation,
    EquilibriumMode, PureStrategy, StrategyProfile, DEFAULT_PROFILE_CAP,
};
pub use error::{Error, Result};
pub use game::{
    profit, CostModel, Mechanism, Outcome, OutcomeId, OutcomeSet, SocialChoiceFunction, TypeSpace,
    UtilityTable,
};
pub use normal_form::{Dominance, DominantAction, NormalFormGame};
pub use rational::Rational;
pub use revelation::{
    audit_by_search, audit_proof_chain, audit_revelation_principle, is_truthfully_implementable,
    AuditReport, ChainRecord, DirectMechanism, TruthfulVerdict,
};
