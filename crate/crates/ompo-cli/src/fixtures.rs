//! JSON fixtures for tabular MDPs:
//! `{n_states, n_actions, transition: [[[p]]], reward: [[r]], mu0: [p], gamma}`
//! with `transition[s][a][s']` and `reward[s][a]`. Round-trips are
//! value-exact (shortest-round-trip float printing).

use anyhow::{bail, Context, Result};
use ompo_core::oracle::TabularMdp;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MdpFixture {
    pub n_states: usize,
    pub n_actions: usize,
    pub transition: Vec<Vec<Vec<f64>>>,
    pub reward: Vec<Vec<f64>>,
    pub mu0: Vec<f64>,
    pub gamma: f64,
}

impl MdpFixture {
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        let (ns, na) = (mdp.n_states, mdp.n_actions);
        let transition = (0..ns)
            .map(|s| {
                (0..na)
                    .map(|a| (0..ns).map(|s2| mdp.t(s, a, s2)).collect())
                    .collect()
            })
            .collect();
        let reward = (0..ns)
            .map(|s| (0..na).map(|a| mdp.reward[s * na + a]).collect())
            .collect();
        MdpFixture {
            n_states: ns,
            n_actions: na,
            transition,
            reward,
            mu0: mdp.mu0.clone(),
            gamma: mdp.gamma,
        }
    }

    pub fn into_mdp(self) -> Result<TabularMdp> {
        let (ns, na) = (self.n_states, self.n_actions);
        if self.transition.len() != ns || self.reward.len() != ns || self.mu0.len() != ns {
            bail!("fixture arrays do not match n_states = {ns}");
        }
        let mut transition = Vec::with_capacity(ns * na * ns);
        let mut reward = Vec::with_capacity(ns * na);
        for s in 0..ns {
            if self.transition[s].len() != na || self.reward[s].len() != na {
                bail!("state {s}: expected {na} action rows");
            }
            for a in 0..na {
                if self.transition[s][a].len() != ns {
                    bail!("state {s} action {a}: expected {ns} next-state probabilities");
                }
                transition.extend_from_slice(&self.transition[s][a]);
                reward.push(self.reward[s][a]);
            }
        }
        let mdp = TabularMdp {
            n_states: ns,
            n_actions: na,
            transition,
            reward,
            mu0: self.mu0,
            gamma: self.gamma,
        };
        mdp.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(mdp)
    }
}

pub fn load_mdp(path: &Path) -> Result<TabularMdp> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let fixture: MdpFixture = serde_json::from_str(&text).context("parsing MDP fixture")?;
    fixture.into_mdp()
}

pub fn save_mdp(path: &Path, mdp: &TabularMdp) -> Result<()> {
    let fixture = MdpFixture::from_mdp(mdp);
    let text = serde_json::to_string_pretty(&fixture)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
