//! Two-agent labor market with costly education signals.
//!
//! Each agent has productivity `theta_L` or `theta_H`. In the indirect
//! mechanism the agents bid an education level `0` or `e_H`, paying
//! `e / theta`; the higher bid wins the job (wage `w`) and equal bids split
//! it. The social choice function hires the more productive agent. In the
//! direct mechanism the agents report productivities instead; a low type
//! reporting high pays `c_mis`, every other report is free.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    implements_scf, BayesianGame, Deviation, EquilibriumMode, StrategyProfile, DEFAULT_PROFILE_CAP,
};
use crate::error::{Error, Result};
use crate::game::{
    profit, CostModel, Mechanism, Outcome, OutcomeId, OutcomeSet, SocialChoiceFunction, TypeSpace,
    UtilityTable,
};
use crate::normal_form::{DominantAction, NormalFormGame};
use crate::rational::{self, q, Rational};
use crate::revelation::{
    audit_revelation_principle, is_truthfully_implementable, AuditReport, DirectMechanism,
};

/// Type index of the low-productivity type.
pub const LOW: usize = 0;
/// Type index of the high-productivity type.
pub const HIGH: usize = 1;
/// Action index of the zero education bid.
pub const NO_EDUCATION: usize = 0;
/// Action index of the `e_H` education bid.
pub const EDUCATION: usize = 1;

pub const TYPE_LABELS: [&str; 2] = ["theta_L", "theta_H"];
pub const BID_LABELS: [&str; 2] = ["0", "e_H"];

const FIRST_WINS: OutcomeId = OutcomeId(0);
const TIE: OutcomeId = OutcomeId(1);
const SECOND_WINS: OutcomeId = OutcomeId(2);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaborParams {
    #[serde(with = "rational::serde_str")]
    pub theta_low: Rational,
    #[serde(with = "rational::serde_str")]
    pub theta_high: Rational,
    /// Education level of the certificate, `e_H`.
    #[serde(with = "rational::serde_str")]
    pub education: Rational,
    #[serde(with = "rational::serde_str")]
    pub wage: Rational,
    /// Charged to a low type reporting high in the direct mechanism.
    #[serde(with = "rational::serde_str")]
    pub misreport_cost: Rational,
    /// Per-agent probability of the high type.
    #[serde(with = "rational::serde_vec_str")]
    pub prior_high: Vec<Rational>,
}

impl LaborParams {
    /// Uniform prior over the two types for both agents.
    pub fn new(
        theta_low: Rational,
        theta_high: Rational,
        education: Rational,
        wage: Rational,
        misreport_cost: Rational,
    ) -> Self {
        Self {
            theta_low,
            theta_high,
            education,
            wage,
            misreport_cost,
            prior_high: vec![q(1, 2), q(1, 2)],
        }
    }

    /// `theta_L = 1, theta_H = 2, e_H = 1, w = 3/2, c_mis = 1/2`.
    pub fn canonical() -> Self {
        Self::new(q(1, 1), q(2, 1), q(1, 1), q(3, 2), q(1, 2))
    }

    pub fn with_wage(mut self, wage: Rational) -> Self {
        self.wage = wage;
        self
    }

    pub fn with_misreport_cost(mut self, c: Rational) -> Self {
        self.misreport_cost = c;
        self
    }

    /// Same high-type probability for both agents.
    pub fn with_prior_high(mut self, p: Rational) -> Self {
        self.prior_high = vec![p.clone(), p];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidModel(msg));
        if !rational::is_positive(&self.theta_low) {
            return fail(format!("theta_low must be > 0, got {}", self.theta_low));
        }
        if self.theta_high <= self.theta_low {
            return fail(format!(
                "theta_high must exceed theta_low, got theta_low = {}, theta_high = {}",
                self.theta_low, self.theta_high
            ));
        }
        if !rational::is_positive(&self.education) {
            return fail(format!("education must be > 0, got {}", self.education));
        }
        if !rational::is_positive(&self.wage) {
            return fail(format!("wage must be > 0, got {}", self.wage));
        }
        if rational::is_negative(&self.misreport_cost) {
            return fail(format!(
                "misreport_cost must be >= 0, got {}",
                self.misreport_cost
            ));
        }
        if self.prior_high.len() != 2 {
            return fail(format!(
                "prior_high needs 2 entries, got {}",
                self.prior_high.len()
            ));
        }
        for p in &self.prior_high {
            if !rational::is_positive(p) || p >= &rational::one() {
                return fail(format!("prior_high must lie in (0, 1), got {p}"));
            }
        }
        Ok(())
    }

    pub fn productivity(&self, ty: usize) -> &Rational {
        if ty == HIGH {
            &self.theta_high
        } else {
            &self.theta_low
        }
    }

    pub fn bid(&self, action: usize) -> Rational {
        if action == EDUCATION {
            self.education.clone()
        } else {
            rational::zero()
        }
    }
}

/// Open interval of wages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WageWindow {
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub upper: Rational,
}

impl WageWindow {
    pub fn contains(&self, w: &Rational) -> bool {
        &self.lower < w && w < &self.upper
    }

    pub fn is_empty(&self) -> bool {
        self.lower >= self.upper
    }
}

/// `(2 e_H / theta_H, 2 e_H / theta_L)`: wages for which the separating
/// profile is an equilibrium with strict best responses.
pub fn wage_window(p: &LaborParams) -> WageWindow {
    let two_e = &p.education * rational::int(2);
    WageWindow {
        lower: &two_e / &p.theta_high,
        upper: &two_e / &p.theta_low,
    }
}

/// Everything needed to analyse the labor market with the generic engine.
#[derive(Debug, Clone)]
pub struct LaborScenario {
    pub params: LaborParams,
    pub types: TypeSpace,
    pub outcomes: Arc<OutcomeSet>,
    /// Hire the more productive agent, split ties.
    pub scf: SocialChoiceFunction,
    /// Education bids; the higher bid wins, equal bids split.
    pub mechanism: Mechanism,
    pub utility: UtilityTable,
    /// Strategic cost `b / theta`; misreport cost `c_mis` for low reporting high.
    pub costs: CostModel,
    /// High types bid `e_H`, low types bid 0.
    pub separating: StrategyProfile,
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Winner rule shared by the social choice function (on types) and the
/// outcome function (on bids): both index sets are ordered low to high.
fn contest(a: usize, b: usize) -> OutcomeId {
    match a.cmp(&b) {
        std::cmp::Ordering::Greater => FIRST_WINS,
        std::cmp::Ordering::Equal => TIE,
        std::cmp::Ordering::Less => SECOND_WINS,
    }
}

pub fn build_labor_scenario(p: &LaborParams) -> Result<LaborScenario> {
    p.validate()?;
    let priors = p
        .prior_high
        .iter()
        .map(|h| vec![rational::one() - h, h.clone()])
        .collect();
    let types = TypeSpace::new(vec![labels(&TYPE_LABELS), labels(&TYPE_LABELS)], priors)?;
    let half = q(1, 2);
    let outcomes = Arc::new(OutcomeSet::new(vec![
        Outcome::new("(1,0)", vec![rational::one(), rational::zero()]),
        Outcome::new("(1/2,1/2)", vec![half.clone(), half]),
        Outcome::new("(0,1)", vec![rational::zero(), rational::one()]),
    ])?);
    let scf = SocialChoiceFunction::from_fn(&types, outcomes.clone(), |t| contest(t[0], t[1]))?;
    let mechanism = Mechanism::from_fn(
        vec![labels(&BID_LABELS), labels(&BID_LABELS)],
        outcomes.clone(),
        |b| contest(b[0], b[1]),
    )?;
    let utility = UtilityTable::from_fn(&types, &outcomes, |agent, _, x, _| {
        &p.wage * &x.payload[agent]
    })?;
    let costs = CostModel::from_fns(
        &mechanism,
        &types,
        |_, action, ty| p.bid(action) / p.productivity(ty),
        |_, truth, report| {
            if truth == LOW && report == HIGH {
                p.misreport_cost.clone()
            } else {
                rational::zero()
            }
        },
    )?;
    Ok(LaborScenario {
        params: p.clone(),
        types,
        outcomes,
        scf,
        mechanism,
        utility,
        costs,
        separating: separating_profile(),
    })
}

impl LaborScenario {
    /// The same market with every strategic and misreporting cost removed.
    pub fn with_zero_costs(mut self) -> Result<Self> {
        self.costs = CostModel::zero(&self.mechanism, &self.types)?;
        Ok(self)
    }

    pub fn indirect_game(&self) -> Result<BayesianGame<'_>> {
        BayesianGame::new(&self.mechanism, &self.types, &self.utility, &self.costs)
    }

    pub fn direct_mechanism(&self) -> Result<DirectMechanism> {
        DirectMechanism::from_scf(&self.scf, &self.types, &self.costs)
    }

    pub fn audit(&self) -> Result<AuditReport> {
        audit_revelation_principle(
            &self.mechanism,
            &self.separating,
            &self.scf,
            &self.types,
            &self.utility,
            &self.costs,
        )
    }
}

/// Both agents bid `e_H` when high and 0 when low.
pub fn separating_profile() -> StrategyProfile {
    let choice = vec![NO_EDUCATION, EDUCATION];
    StrategyProfile::from_choices(vec![choice.clone(), choice])
}

/// One best-response case: agent 1's profit from each bid when the opponent
/// has a known type and follows the separating strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponseCase {
    pub case: u8,
    pub own_type: usize,
    pub opponent_type: usize,
    pub opponent_bid: usize,
    #[serde(with = "rational::serde_str")]
    pub value_high_bid: Rational,
    #[serde(with = "rational::serde_str")]
    pub value_zero_bid: Rational,
    /// Maximising bids; two entries on a tie.
    pub best_bids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop3Report {
    pub window: WageWindow,
    pub in_window: bool,
    pub separating_is_bne: bool,
    pub separating_witness: Option<Deviation>,
    pub implements_f: bool,
    /// `w/2 - e_H/theta_H > 0`.
    pub ir_satisfied: bool,
    #[serde(with = "rational::serde_str")]
    pub ir_margin: Rational,
    pub best_response_cases: Vec<BestResponseCase>,
    pub notes: Vec<String>,
}

impl Prop3Report {
    pub fn all_hold(&self) -> bool {
        self.in_window && self.separating_is_bne && self.implements_f && self.ir_satisfied
    }
}

/// Order of the four (own type, opponent type) cases.
pub const PROP3_CASES: [(usize, usize); 4] = [(LOW, LOW), (LOW, HIGH), (HIGH, LOW), (HIGH, HIGH)];

/// Check that the separating profile implements the hiring rule in
/// profit-based equilibrium, with strict individual rationality.
pub fn check_proposition3(p: &LaborParams) -> Result<Prop3Report> {
    let s = build_labor_scenario(p)?;
    let window = wage_window(p);
    let game = s.indirect_game()?;
    let verdict = game.is_bayesian_nash(&s.separating, EquilibriumMode::ProfitBased)?;
    let implements_f = implements_scf(&s.mechanism, &s.separating, &s.scf, &s.types)?;
    let ir_margin = &p.wage / rational::int(2) - &p.education / &p.theta_high;

    let mut cases = Vec::with_capacity(4);
    for (k, &(own, opp)) in PROP3_CASES.iter().enumerate() {
        let opponent_bid = s.separating.strategy(1).action_at(opp);
        let value = |bid: usize| -> Result<Rational> {
            let x = s.mechanism.outcome_id(&[bid, opponent_bid])?;
            profit(0, x, bid, own, &s.utility, &s.costs)
        };
        let high = value(EDUCATION)?;
        let zero = value(NO_EDUCATION)?;
        let best_bids = match high.cmp(&zero) {
            std::cmp::Ordering::Greater => vec![EDUCATION],
            std::cmp::Ordering::Less => vec![NO_EDUCATION],
            std::cmp::Ordering::Equal => vec![NO_EDUCATION, EDUCATION],
        };
        cases.push(BestResponseCase {
            case: k as u8 + 1,
            own_type: own,
            opponent_type: opp,
            opponent_bid,
            value_high_bid: high,
            value_zero_bid: zero,
            best_bids,
        });
    }

    Ok(Prop3Report {
        in_window: window.contains(&p.wage),
        window,
        separating_is_bne: verdict.is_equilibrium,
        separating_witness: verdict.witness,
        implements_f,
        ir_satisfied: rational::is_positive(&ir_margin),
        ir_margin,
        best_response_cases: cases,
        notes: vec![
            "individual rationality is evaluated for the high type at bid e_H; the low type bids 0 and earns w/2 or 0".into(),
            "equilibria are searched over pure strategies only".into(),
        ],
    })
}

/// Complete-information report game at one profile of true types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseMatrix {
    pub case: u8,
    pub true_types: [usize; 2],
    pub game: NormalFormGame,
    pub dominant: [Option<DominantAction>; 2],
    pub pure_nash: Vec<Vec<usize>>,
}

/// True-type profiles of the four report games, row agent first.
pub const PROP4_CASES: [[usize; 2]; 4] = [[HIGH, HIGH], [LOW, HIGH], [HIGH, LOW], [LOW, LOW]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop4Report {
    pub cmis_below_half_w: bool,
    pub truthful_is_bne: bool,
    pub truthful_witness: Option<Deviation>,
    /// All pure Bayesian Nash equilibria of the direct mechanism.
    pub bne_profiles: Vec<StrategyProfile>,
    pub unique_bne_all_report_high: bool,
    pub case_matrices: Vec<CaseMatrix>,
    /// Profile assembled from the unique ex-post equilibria of the case
    /// matrices, when each matrix has one and they fit together.
    pub expost_profile: Option<StrategyProfile>,
    /// The ex-post and interim views predict the same equilibrium set.
    pub expost_agrees: bool,
    pub pure_strategies_only: bool,
}

/// Every agent reports the high type regardless of its true type.
pub fn all_report_high() -> StrategyProfile {
    StrategyProfile::from_choices(vec![vec![HIGH, HIGH], vec![HIGH, HIGH]])
}

/// Check truthful implementability of the hiring rule in the direct
/// mechanism, enumerate all pure equilibria, and build the four
/// complete-information report matrices.
pub fn check_proposition4(p: &LaborParams) -> Result<Prop4Report> {
    let s = build_labor_scenario(p)?;
    let truthful = is_truthfully_implementable(&s.scf, &s.types, &s.costs, &s.utility)?;
    let direct = s.direct_mechanism()?;
    let game = direct.game(&s.types, &s.utility)?;
    let bne_profiles = game.find_all_pure_bne(EquilibriumMode::ProfitBased, DEFAULT_PROFILE_CAP)?;
    let unique_high = bne_profiles.len() == 1 && bne_profiles[0] == all_report_high();

    let mut case_matrices = Vec::with_capacity(4);
    for (k, true_types) in PROP4_CASES.iter().enumerate() {
        let nf = game.expost_normal_form(true_types, true, EquilibriumMode::ProfitBased)?;
        let dominant = [nf.dominant_strategy(0)?, nf.dominant_strategy(1)?];
        let pure_nash = nf.find_pure_nash();
        case_matrices.push(CaseMatrix {
            case: k as u8 + 1,
            true_types: *true_types,
            game: nf,
            dominant,
            pure_nash,
        });
    }

    let expost_profile = assemble_expost_profile(&case_matrices);
    let expost_agrees = match &expost_profile {
        Some(profile) => bne_profiles.len() == 1 && &bne_profiles[0] == profile,
        None => bne_profiles.len() != 1,
    };

    Ok(Prop4Report {
        cmis_below_half_w: p.misreport_cost < &p.wage / rational::int(2),
        truthful_is_bne: truthful.truthful,
        truthful_witness: truthful.witness,
        bne_profiles,
        unique_bne_all_report_high: unique_high,
        case_matrices,
        expost_profile,
        expost_agrees,
        pure_strategies_only: true,
    })
}

fn assemble_expost_profile(cases: &[CaseMatrix]) -> Option<StrategyProfile> {
    let mut choice: [[Option<usize>; 2]; 2] = [[None; 2]; 2];
    for c in cases {
        let [only] = c.pure_nash.as_slice() else {
            return None;
        };
        for agent in 0..2 {
            let slot = &mut choice[agent][c.true_types[agent]];
            match slot {
                Some(prev) if *prev != only[agent] => return None,
                _ => *slot = Some(only[agent]),
            }
        }
    }
    let choices = choice
        .iter()
        .map(|per_type| per_type.iter().copied().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    Some(StrategyProfile::from_choices(choices))
}

/// `pr_1 theta_1 + pr_2 theta_2 - w` at the given bids and true types.
pub fn firm_expected_utility(
    scenario: &LaborScenario,
    bids: [usize; 2],
    true_types: [usize; 2],
) -> Result<Rational> {
    scenario.types.check_profile(&true_types)?;
    let x = scenario.mechanism.outcome_of(&bids)?;
    let p = &scenario.params;
    let output: Rational = x
        .payload
        .iter()
        .zip(true_types)
        .map(|(pr, t)| pr * p.productivity(t))
        .sum();
    Ok(output - &p.wage)
}
