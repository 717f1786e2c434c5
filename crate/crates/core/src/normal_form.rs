//! Complete-information (normal-form) games with exact payoffs.

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::profile::ProductSpace;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dominance {
    /// Strictly better than every other action against every opponent profile.
    Strict,
    /// At least as good as every other action against every opponent profile.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DominantAction {
    pub action: usize,
    pub kind: Dominance,
}

/// Per-agent action lists and a payoff vector for every action profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormGame {
    actions: Vec<Vec<String>>,
    space: ProductSpace,
    /// `[flat action profile][agent]`
    payoffs: Vec<Vec<Rational>>,
}

impl NormalFormGame {
    pub fn new(actions: Vec<Vec<String>>, payoffs: Vec<Vec<Rational>>) -> Result<Self> {
        if actions.is_empty() || actions.iter().any(Vec::is_empty) {
            return Err(Error::InvalidModel(
                "every agent needs at least one action".into(),
            ));
        }
        let space = ProductSpace::new(actions.iter().map(Vec::len).collect());
        if payoffs.len() != space.len() || payoffs.iter().any(|p| p.len() != actions.len()) {
            return Err(Error::DimensionMismatch(
                "payoff table must hold one payoff per agent for every action profile".into(),
            ));
        }
        Ok(Self {
            actions,
            space,
            payoffs,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.actions.len()
    }

    pub fn actions_of(&self, agent: usize) -> &[String] {
        &self.actions[agent]
    }

    pub fn action_space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn payoffs_at(&self, profile: &[usize]) -> Result<&[Rational]> {
        Ok(&self.payoffs[self.space.index_of(profile)?])
    }

    pub fn payoff(&self, profile: &[usize], agent: usize) -> Result<&Rational> {
        check_index("agent", agent, self.agent_count())?;
        Ok(&self.payoffs_at(profile)?[agent])
    }

    /// Relabel agents: agent `perm[k]` of `self` becomes agent `k`.
    pub fn permute_agents(&self, perm: &[usize]) -> Result<Self> {
        let n = self.agent_count();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidModel(
                "not a permutation of the agents".into(),
            ));
        }
        let actions = perm.iter().map(|&p| self.actions[p].clone()).collect();
        let space = ProductSpace::new(perm.iter().map(|&p| self.space.dims()[p]).collect());
        let mut payoffs = Vec::with_capacity(space.len());
        for new_profile in space.iter() {
            let mut old = vec![0; n];
            for (k, &p) in perm.iter().enumerate() {
                old[p] = new_profile[k];
            }
            let row = self.payoffs_at(&old)?;
            payoffs.push(perm.iter().map(|&p| row[p].clone()).collect());
        }
        Self::new(actions, payoffs)
    }

    fn compare_everywhere(
        &self,
        agent: usize,
        a: usize,
        b: usize,
        pred: impl Fn(&Rational, &Rational) -> bool,
    ) -> bool {
        self.space.iter().filter(|p| p[agent] == a).all(|p| {
            let mut q = p.clone();
            q[agent] = b;
            pred(
                &self.payoffs[self.space.index_of(&p).unwrap()][agent],
                &self.payoffs[self.space.index_of(&q).unwrap()][agent],
            )
        })
    }

    fn dominates(&self, agent: usize, a: usize, kind: Dominance) -> bool {
        (0..self.actions[agent].len())
            .filter(|&b| b != a)
            .all(|b| match kind {
                Dominance::Strict => self.compare_everywhere(agent, a, b, |x, y| x > y),
                Dominance::Weak => self.compare_everywhere(agent, a, b, |x, y| x >= y),
            })
    }

    /// Every action that is at least as good as all others against every
    /// opponent profile.
    pub fn weakly_dominant_actions(&self, agent: usize) -> Result<Vec<usize>> {
        check_index("agent", agent, self.agent_count())?;
        Ok((0..self.actions[agent].len())
            .filter(|&a| self.dominates(agent, a, Dominance::Weak))
            .collect())
    }

    /// The strictly dominant action if one exists, otherwise the first weakly
    /// dominant action.
    pub fn dominant_strategy(&self, agent: usize) -> Result<Option<DominantAction>> {
        check_index("agent", agent, self.agent_count())?;
        let n = self.actions[agent].len();
        if let Some(action) = (0..n).find(|&a| self.dominates(agent, a, Dominance::Strict)) {
            return Ok(Some(DominantAction {
                action,
                kind: Dominance::Strict,
            }));
        }
        Ok(self
            .weakly_dominant_actions(agent)?
            .first()
            .map(|&action| DominantAction {
                action,
                kind: Dominance::Weak,
            }))
    }

    /// All pure Nash equilibria, in lexicographic profile order.
    pub fn find_pure_nash(&self) -> Vec<Vec<usize>> {
        self.space
            .iter()
            .filter(|p| {
                let here = &self.payoffs[self.space.index_of(p).unwrap()];
                (0..self.agent_count()).all(|i| {
                    (0..self.actions[i].len()).all(|b| {
                        let mut q = p.clone();
                        q[i] = b;
                        self.payoffs[self.space.index_of(&q).unwrap()][i] <= here[i]
                    })
                })
            })
            .collect()
    }
}
