mod common;

use proptest::prelude::*;
use revelation_core::labor::{
    build_labor_scenario, LaborParams, EDUCATION, HIGH, LOW, NO_EDUCATION,
};
use revelation_core::rational::{q, Rational};
use revelation_core::{profit, CostModel, Error, TypeSpace, UtilityTable};

fn labor() -> revelation_core::labor::LaborScenario {
    build_labor_scenario(&LaborParams::canonical()).unwrap()
}

#[test]
fn scf_regions() {
    let s = labor();
    let f = |a: &str, b: &str| {
        s.scf
            .evaluate_labels(&s.types, &[a, b])
            .unwrap()
            .payload
            .clone()
    };
    assert_eq!(f("theta_H", "theta_L"), vec![q(1, 1), q(0, 1)]);
    assert_eq!(f("theta_L", "theta_L"), vec![q(1, 2), q(1, 2)]);
    assert_eq!(f("theta_L", "theta_H"), vec![q(0, 1), q(1, 1)]);
    assert_eq!(f("theta_H", "theta_H"), vec![q(1, 2), q(1, 2)]);
    assert!(matches!(
        s.scf.evaluate_labels(&s.types, &["theta_M", "theta_L"]),
        Err(Error::UnknownLabel { .. })
    ));
}

#[test]
fn scf_is_agent_symmetric() {
    let s = labor();
    for p in s.types.profile_space().iter() {
        let x = s.scf.evaluate(&p).unwrap();
        let y = s.scf.evaluate(&[p[1], p[0]]).unwrap();
        assert_eq!(x.payload, vec![y.payload[1].clone(), y.payload[0].clone()]);
    }
}

#[test]
fn profit_examples() {
    let s = labor();
    let win = s.outcomes.id_of("(1,0)").unwrap();
    let tie = s.outcomes.id_of("(1/2,1/2)").unwrap();
    // w - e_H/theta_H = 3/2 - 1/2
    assert_eq!(
        profit(0, win, EDUCATION, HIGH, &s.utility, &s.costs).unwrap(),
        q(1, 1)
    );
    assert_eq!(
        profit(0, tie, NO_EDUCATION, LOW, &s.utility, &s.costs).unwrap(),
        q(3, 4)
    );
    assert!(profit(0, win, 7, HIGH, &s.utility, &s.costs).is_err());
}

#[test]
fn zero_cost_profit_is_utility() {
    let s = labor();
    let zero = CostModel::zero(&s.mechanism, &s.types).unwrap();
    for (x, _) in s.outcomes.iter() {
        for a in 0..2 {
            for t in 0..2 {
                assert_eq!(
                    profit(1, x, a, t, &s.utility, &zero).unwrap(),
                    s.utility.utility(1, x, t).unwrap().clone()
                );
            }
        }
    }
}

#[test]
fn profit_never_charges_misreporting() {
    let mut p = LaborParams::canonical();
    p.misreport_cost = q(100, 1);
    let s = build_labor_scenario(&p).unwrap();
    let tie = s.outcomes.id_of("(1/2,1/2)").unwrap();
    assert_eq!(
        profit(0, tie, NO_EDUCATION, LOW, &s.utility, &s.costs).unwrap(),
        q(3, 4)
    );
}

fn type_space_strategy() -> impl Strategy<Value = TypeSpace> {
    proptest::collection::vec(proptest::collection::vec(1i64..20, 1..4), 1..4).prop_map(|weights| {
        let labels = weights
            .iter()
            .map(|w| (0..w.len()).map(|k| format!("t{k}")).collect())
            .collect();
        let priors = weights
            .iter()
            .map(|w| {
                let total: i64 = w.iter().sum();
                w.iter().map(|&k| q(k, total)).collect()
            })
            .collect();
        TypeSpace::new(labels, priors).unwrap()
    })
}

proptest! {
    #[test]
    fn joint_prior_sums_to_one(ts in type_space_strategy()) {
        let total: Rational = ts.profile_space().iter().map(|p| ts.joint_prior(&p).unwrap()).sum();
        prop_assert_eq!(total, q(1, 1));
    }

    #[test]
    fn conditional_prior_divides_out_own_marginal(ts in type_space_strategy()) {
        for p in ts.profile_space().iter() {
            for i in 0..ts.agent_count() {
                let own = &ts.prior_of(i).unwrap()[p[i]];
                prop_assert_eq!(ts.conditional_prior(i, &p).unwrap() * own, ts.joint_prior(&p).unwrap());
            }
        }
    }

    #[test]
    fn profit_shifts_with_utility(k in -20i64..20, agent in 0usize..2, ty in 0usize..2) {
        let s = labor();
        let shifted = UtilityTable::from_fn(&s.types, &s.outcomes, |i, x, _, t| {
            let base = s.utility.utility(i, x, t).unwrap().clone();
            if i == agent && t == ty { base + q(k, 3) } else { base }
        }).unwrap();
        for (x, _) in s.outcomes.iter() {
            for a in 0..2 {
                let before = profit(agent, x, a, ty, &s.utility, &s.costs).unwrap();
                let after = profit(agent, x, a, ty, &shifted, &s.costs).unwrap();
                prop_assert_eq!(after - before, q(k, 3));
            }
        }
    }
}
