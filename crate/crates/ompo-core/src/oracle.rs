//! Exact discounted occupancy distributions on tabular MDPs, plus the
//! algebraic identities behind the dual derivation, checkable to machine
//! precision.
//!
//! This module is the verification oracle for the learner: everything here is
//! a direct dense computation, independent of the neural path.

use crate::error::{CoreError, Result};
use crate::linalg::lu_solve;
use crate::math;
use crate::rng::Rng;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

const DIST_TOL: f64 = 1e-12;

/// Finite MDP: `transition[s][a][s']`, strictly positive rewards, discount in (0,1).
#[derive(Clone, Debug)]
pub struct TabularMdp {
    pub n_states: usize,
    pub n_actions: usize,
    /// Row-major `[s][a][s']`, each (s,a) row a distribution over s'.
    pub transition: Vec<f64>,
    /// Row-major `[s][a]`, all entries strictly positive.
    pub reward: Vec<f64>,
    pub mu0: Vec<f64>,
    pub gamma: f64,
}

impl TabularMdp {
    pub fn validate(&self) -> Result<()> {
        let (s, a) = (self.n_states, self.n_actions);
        if s == 0 || a == 0 {
            return Err(CoreError::InvalidDistribution("empty state or action space".into()));
        }
        if s * a > 4096 {
            return Err(CoreError::InvalidConfig(format!(
                "|S||A| = {} exceeds the oracle cap 4096",
                s * a
            )));
        }
        if self.transition.len() != s * a * s || self.reward.len() != s * a || self.mu0.len() != s {
            return Err(CoreError::DimensionMismatch {
                expected: s * a * s,
                got: self.transition.len(),
                what: "TabularMdp arrays",
            });
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(CoreError::InvalidConfig(format!("gamma {} not in (0,1)", self.gamma)));
        }
        for sa in 0..s * a {
            check_distribution(&self.transition[sa * s..(sa + 1) * s], "transition row")?;
        }
        check_distribution(&self.mu0, "mu0")?;
        for &r in &self.reward {
            if !(r > 0.0) || !r.is_finite() {
                return Err(CoreError::NonPositiveReward(r));
            }
        }
        Ok(())
    }

    pub fn t(&self, s: usize, a: usize, s2: usize) -> f64 {
        self.transition[(s * self.n_actions + a) * self.n_states + s2]
    }

    /// Random dense MDP for property sweeps; rewards in (0, 1].
    pub fn random(rng: &mut Rng, n_states: usize, n_actions: usize, gamma: f64) -> Self {
        let mut transition = vec![0.0; n_states * n_actions * n_states];
        for sa in 0..n_states * n_actions {
            let row = &mut transition[sa * n_states..(sa + 1) * n_states];
            let mut total = 0.0;
            for x in row.iter_mut() {
                *x = rng.next_f64() + 1e-3;
                total += *x;
            }
            for x in row.iter_mut() {
                *x /= total;
            }
        }
        let reward = (0..n_states * n_actions).map(|_| 1e-3 + rng.next_f64()).collect();
        let mut mu0: Vec<f64> = (0..n_states).map(|_| rng.next_f64() + 1e-3).collect();
        let total: f64 = mu0.iter().sum();
        for x in mu0.iter_mut() {
            *x /= total;
        }
        TabularMdp { n_states, n_actions, transition, reward, mu0, gamma }
    }
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    let mut total = 0.0;
    for &p in row {
        if !(p >= 0.0) {
            return Err(CoreError::InvalidDistribution(format!("negative entry in {what}")));
        }
        total += p;
    }
    if math::fabs(total - 1.0) > DIST_TOL {
        return Err(CoreError::InvalidDistribution(format!("{what} sums to {total}")));
    }
    Ok(())
}

/// Stochastic policy over a tabular MDP: `probs[s][a]`.
#[derive(Clone, Debug)]
pub struct PolicyTable {
    pub n_states: usize,
    pub n_actions: usize,
    pub probs: Vec<f64>,
}

impl PolicyTable {
    pub fn validate(&self) -> Result<()> {
        if self.probs.len() != self.n_states * self.n_actions {
            return Err(CoreError::DimensionMismatch {
                expected: self.n_states * self.n_actions,
                got: self.probs.len(),
                what: "PolicyTable",
            });
        }
        for s in 0..self.n_states {
            check_distribution(&self.probs[s * self.n_actions..(s + 1) * self.n_actions], "policy row")?;
        }
        Ok(())
    }

    pub fn p(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.n_actions + a]
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        PolicyTable {
            n_states,
            n_actions,
            probs: vec![1.0 / n_actions as f64; n_states * n_actions],
        }
    }

    pub fn random(rng: &mut Rng, n_states: usize, n_actions: usize) -> Self {
        let mut probs = vec![0.0; n_states * n_actions];
        for s in 0..n_states {
            let row = &mut probs[s * n_actions..(s + 1) * n_actions];
            let mut total = 0.0;
            for x in row.iter_mut() {
                *x = rng.next_f64() + 1e-3;
                total += *x;
            }
            for x in row.iter_mut() {
                *x /= total;
            }
        }
        PolicyTable { n_states, n_actions, probs }
    }
}

/// Normalized discounted occupancy: `rho_sa[s][a]` and `rho_sas[s][a][s']`.
#[derive(Clone, Debug)]
pub struct OccupancyTable {
    pub n_states: usize,
    pub n_actions: usize,
    pub rho_sa: Vec<f64>,
    pub rho_sas: Vec<f64>,
}

impl OccupancyTable {
    pub fn sa(&self, s: usize, a: usize) -> f64 {
        self.rho_sa[s * self.n_actions + a]
    }

    pub fn sas(&self, s: usize, a: usize, s2: usize) -> f64 {
        self.rho_sas[(s * self.n_actions + a) * self.n_states + s2]
    }

    /// Total mass, marginalization and nonnegativity checks.
    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.rho_sa.iter().sum();
        if math::fabs(total - 1.0) > 1e-9 {
            return Err(CoreError::InvalidDistribution(format!("rho_sa mass {total}")));
        }
        for (sa, &mass) in self.rho_sa.iter().enumerate() {
            if mass < -1e-12 {
                return Err(CoreError::InvalidDistribution("negative occupancy".into()));
            }
            let marg: f64 = self.rho_sas[sa * self.n_states..(sa + 1) * self.n_states].iter().sum();
            if math::fabs(marg - mass) > 1e-12 {
                return Err(CoreError::InvalidDistribution(format!(
                    "rho_sas marginal {marg} != rho_sa {mass}"
                )));
            }
        }
        Ok(())
    }
}

/// Two distributions on a shared finite support.
#[derive(Clone, Debug)]
pub struct CategoricalPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl CategoricalPair {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(CoreError::DimensionMismatch { expected: p.len(), got: q.len(), what: "CategoricalPair" });
        }
        check_distribution(&p, "p")?;
        check_distribution(&q, "q")?;
        Ok(CategoricalPair { p, q })
    }
}

fn check_shapes(mdp: &TabularMdp, policy: &PolicyTable) -> Result<()> {
    if mdp.n_states != policy.n_states || mdp.n_actions != policy.n_actions {
        return Err(CoreError::DimensionMismatch {
            expected: mdp.n_states * mdp.n_actions,
            got: policy.n_states * policy.n_actions,
            what: "mdp/policy",
        });
    }
    Ok(())
}

/// Solves the Bellman flow fixed point exactly as a dense linear system and
/// forms the transition occupancy as `rho_sa * T`.
pub fn solve_state_action_occupancy(mdp: &TabularMdp, policy: &PolicyTable) -> Result<OccupancyTable> {
    mdp.validate()?;
    policy.validate()?;
    check_shapes(mdp, policy)?;
    let (ns, na) = (mdp.n_states, mdp.n_actions);
    let n = ns * na;
    // rho(s,a) - gamma * pi(a|s) * sum_{s^,a^} T(s|s^,a^) rho(s^,a^) = (1-gamma) mu0(s) pi(a|s)
    let mut a_mat = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for s in 0..ns {
        for a in 0..na {
            let row = s * na + a;
            a_mat[row * n + row] += 1.0;
            let pi = policy.p(s, a);
            for s_hat in 0..ns {
                for a_hat in 0..na {
                    let col = s_hat * na + a_hat;
                    a_mat[row * n + col] -= mdp.gamma * pi * mdp.t(s_hat, a_hat, s);
                }
            }
            b[row] = (1.0 - mdp.gamma) * mdp.mu0[s] * pi;
        }
    }
    let rho_sa = lu_solve(&mut a_mat, n, &b)?;
    let mut rho_sas = vec![0.0; n * ns];
    for s in 0..ns {
        for a in 0..na {
            let sa = s * na + a;
            for s2 in 0..ns {
                rho_sas[sa * ns + s2] = rho_sa[sa] * mdp.t(s, a, s2);
            }
        }
    }
    Ok(OccupancyTable { n_states: ns, n_actions: na, rho_sa, rho_sas })
}

/// Unbiased sampled occupancy via geometric stopping: each sample rolls a
/// trajectory from mu0 and terminates each step with probability (1-gamma),
/// recording the final (s, a, s') triple.
pub fn monte_carlo_occupancy(
    mdp: &TabularMdp,
    policy: &PolicyTable,
    n_samples: usize,
    rng_seed: u64,
) -> Result<OccupancyTable> {
    mdp.validate()?;
    policy.validate()?;
    check_shapes(mdp, policy)?;
    if n_samples == 0 {
        return Err(CoreError::InvalidConfig("n_samples must be >= 1".into()));
    }
    let (ns, na) = (mdp.n_states, mdp.n_actions);
    // Precomputed CDFs keep the inner loop to one uniform draw per decision.
    let cdf = |row: &[f64]| -> Vec<f64> {
        let mut acc = 0.0;
        row.iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect()
    };
    let t_cdf: Vec<Vec<f64>> = (0..ns * na).map(|sa| cdf(&mdp.transition[sa * ns..(sa + 1) * ns])).collect();
    let pi_cdf: Vec<Vec<f64>> = (0..ns).map(|s| cdf(&policy.probs[s * na..(s + 1) * na])).collect();
    let mu_cdf = cdf(&mdp.mu0);

    let mut rng = Rng::new(rng_seed);
    let mut counts = vec![0u64; ns * na * ns];
    let inv_ln_gamma = 1.0 / math::log(mdp.gamma);
    for _ in 0..n_samples {
        // Geometric stopping time: P(T = t) = (1-gamma) gamma^t.
        let u = 1.0 - rng.next_f64(); // (0, 1]
        let horizon = (math::log(u) * inv_ln_gamma) as u64;
        let mut s = rng.sample_cdf(&mu_cdf);
        let mut a = rng.sample_cdf(&pi_cdf[s]);
        let mut s2 = rng.sample_cdf(&t_cdf[s * na + a]);
        for _ in 0..horizon {
            s = s2;
            a = rng.sample_cdf(&pi_cdf[s]);
            s2 = rng.sample_cdf(&t_cdf[s * na + a]);
        }
        counts[(s * na + a) * ns + s2] += 1;
    }
    let inv = 1.0 / n_samples as f64;
    let mut rho_sas = vec![0.0; ns * na * ns];
    let mut rho_sa = vec![0.0; ns * na];
    for sa in 0..ns * na {
        for s2 in 0..ns {
            let m = counts[sa * ns + s2] as f64 * inv;
            rho_sas[sa * ns + s2] = m;
            rho_sa[sa] += m;
        }
    }
    Ok(OccupancyTable { n_states: ns, n_actions: na, rho_sa, rho_sas })
}

/// Max-norm defect of the Bellman flow constraint at `occ`.
pub fn bellman_flow_residual(mdp: &TabularMdp, policy: &PolicyTable, occ: &OccupancyTable) -> Result<f64> {
    check_shapes(mdp, policy)?;
    if occ.n_states != mdp.n_states || occ.n_actions != mdp.n_actions {
        return Err(CoreError::DimensionMismatch {
            expected: mdp.n_states * mdp.n_actions,
            got: occ.n_states * occ.n_actions,
            what: "occupancy",
        });
    }
    let (ns, na) = (mdp.n_states, mdp.n_actions);
    // inflow[s] = sum_{s^,a^} rho(s^,a^,s)
    let mut inflow = vec![0.0; ns];
    for sa in 0..ns * na {
        for s2 in 0..ns {
            inflow[s2] += occ.rho_sas[sa * ns + s2];
        }
    }
    let mut worst = 0.0;
    for s in 0..ns {
        for a in 0..na {
            let lhs = occ.sa(s, a);
            let rhs = (1.0 - mdp.gamma) * mdp.mu0[s] * policy.p(s, a) + mdp.gamma * policy.p(s, a) * inflow[s];
            let d = math::fabs(lhs - rhs);
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

/// Evaluates (1-gamma) E_{mu0,pi}[Q] + E_rho[gamma T^pi Q - Q].
///
/// For the exact occupancy of (mdp, policy) this vanishes for any Q; the
/// Lagrangian rearrangement in the dual derivation is exactly this statement.
pub fn lagrangian_annihilation(
    mdp: &TabularMdp,
    policy: &PolicyTable,
    occ: &OccupancyTable,
    q_values: &[f64],
) -> Result<f64> {
    check_shapes(mdp, policy)?;
    let (ns, na) = (mdp.n_states, mdp.n_actions);
    if q_values.len() != ns * na {
        return Err(CoreError::DimensionMismatch { expected: ns * na, got: q_values.len(), what: "q_values" });
    }
    let mut value = 0.0;
    for s in 0..ns {
        for a in 0..na {
            value += (1.0 - mdp.gamma) * mdp.mu0[s] * policy.p(s, a) * q_values[s * na + a];
        }
    }
    // V(s') = sum_a' pi(a'|s') Q(s',a')
    let mut v = vec![0.0; ns];
    for s in 0..ns {
        for a in 0..na {
            v[s] += policy.p(s, a) * q_values[s * na + a];
        }
    }
    for s in 0..ns {
        for a in 0..na {
            let sa = s * na + a;
            let mut tq = 0.0;
            for s2 in 0..ns {
                tq += mdp.t(s, a, s2) * v[s2];
            }
            value += occ.rho_sa[sa] * (mdp.gamma * tq - q_values[sa]);
        }
    }
    Ok(value)
}

/// KL(p || q) = sum p ln(p/q), with 0 ln(0/q) = 0. Errors where q = 0 < p.
pub fn kl_divergence(pair: &CategoricalPair) -> Result<f64> {
    let mut total = 0.0;
    for (&p, &q) in pair.p.iter().zip(&pair.q) {
        if p > 0.0 {
            if q <= 0.0 {
                return Err(CoreError::SupportViolation);
            }
            total += p * math::log(p / q);
        }
    }
    Ok(total)
}

/// D_f(p || q) = sum q f(p/q) for convex f with f(1) = 0.
pub fn f_divergence<F: Fn(f64) -> f64>(pair: &CategoricalPair, f: F) -> Result<f64> {
    let mut total = 0.0;
    for (&p, &q) in pair.p.iter().zip(&pair.q) {
        if q > 0.0 {
            total += q * f(p / q);
        } else if p > 0.0 {
            return Err(CoreError::SupportViolation);
        }
    }
    Ok(total)
}

/// Chi-square generator f(x) = (x-1)^2.
pub fn chi_square(x: f64) -> f64 {
    (x - 1.0) * (x - 1.0)
}

/// Exact log-ratio decomposition used in the proof chain:
/// |E_a[ln(b/a)] - E_a[ln(b/c)] - E_a[ln(c/a)]|, identically ~0 for strictly
/// positive triples.
pub fn decomposition_identity_check(rho_a: &[f64], rho_b: &[f64], rho_c: &[f64]) -> Result<f64> {
    if rho_a.len() != rho_b.len() || rho_a.len() != rho_c.len() {
        return Err(CoreError::DimensionMismatch { expected: rho_a.len(), got: rho_b.len(), what: "triple" });
    }
    for i in 0..rho_a.len() {
        if rho_a[i] <= 0.0 || rho_b[i] <= 0.0 || rho_c[i] <= 0.0 {
            return Err(CoreError::SupportViolation);
        }
    }
    let e = |num: &[f64], den: &[f64]| -> f64 {
        rho_a.iter().zip(num.iter().zip(den)).map(|(&a, (&n, &d))| a * math::log(n / d)).sum()
    };
    let lhs = e(rho_b, rho_a);
    let mid = e(rho_b, rho_c);
    let tail = e(rho_c, rho_a);
    Ok(math::fabs(lhs - mid - tail))
}

/// Result of probing the variational (conjugate) form of an f-divergence on a
/// grid of dual functions.
#[derive(Clone, Debug)]
pub struct FenchelGapReport {
    /// Best variational value sup_y E_p[y] - E_q[f*(y)] over the grid.
    pub sup_estimate: f64,
    /// D_f(p || q) computed directly.
    pub closed_form: f64,
    /// Index of the maximizing grid entry.
    pub argmax: usize,
}

/// Probes the conjugate representation of D_f on a grid of dual functions
/// (each a value per support point). When the grid contains the analytic
/// optimizer y* = f'(p/q) the extremum matches the closed form.
pub fn fenchel_gap_check<F, G>(
    pair: &CategoricalPair,
    f: F,
    f_star: G,
    y_grid: &[Vec<f64>],
) -> Result<FenchelGapReport>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if y_grid.is_empty() {
        return Err(CoreError::EmptyBuffer("y_grid"));
    }
    let closed_form = f_divergence(pair, &f)?;
    let mut sup_estimate = f64::NEG_INFINITY;
    let mut argmax = 0;
    for (idx, y) in y_grid.iter().enumerate() {
        if y.len() != pair.p.len() {
            return Err(CoreError::DimensionMismatch { expected: pair.p.len(), got: y.len(), what: "y grid entry" });
        }
        let mut value = 0.0;
        for ((&p, &q), &yv) in pair.p.iter().zip(&pair.q).zip(y) {
            value += p * yv - q * f_star(yv);
        }
        if value > sup_estimate {
            sup_estimate = value;
            argmax = idx;
        }
    }
    Ok(FenchelGapReport { sup_estimate, closed_form, argmax })
}
