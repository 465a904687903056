//! `ompo verify`: self-contained numerical checks of the tabular occupancy
//! machinery, the convex conjugate and the learner's analytic gradients,
//! printed as a pass/fail table. Returns false if any check fails.

use ompo_core::agent::{AgentConfig, LossBatch, OmpoAgent};
use ompo_core::buffer::TransitionRecord;
use ompo_core::fenchel::{fenchel_star, fenchel_star_deriv};
use ompo_core::oracle::{
    bellman_flow_residual, chi_square, decomposition_identity_check, f_divergence, kl_divergence,
    lagrangian_annihilation, monte_carlo_occupancy, solve_state_action_occupancy, CategoricalPair,
    PolicyTable, TabularMdp,
};
use ompo_core::rng::Rng;

type Check = (&'static str, Result<(), String>);

fn check_solver_residuals() -> Result<(), String> {
    let mut rng = Rng::new(11);
    for i in 0..50 {
        let gamma = [0.5, 0.9, 0.99][i % 3];
        let ns = 2 + rng.index(9);
        let na = 1 + rng.index(4);
        let mdp = TabularMdp::random(&mut rng, ns, na, gamma);
        let policy = PolicyTable::random(&mut rng, ns, na);
        let occ = solve_state_action_occupancy(&mdp, &policy).map_err(|e| e.to_string())?;
        occ.validate().map_err(|e| e.to_string())?;
        let res = bellman_flow_residual(&mdp, &policy, &occ).map_err(|e| e.to_string())?;
        if res >= 1e-10 {
            return Err(format!("MDP {i}: flow residual {res:.3e} >= 1e-10"));
        }
    }
    Ok(())
}

fn check_monte_carlo() -> Result<(), String> {
    // two-state deterministic cycle: exact occupancy is computable in closed
    // form and already pinned by the solver, checked above
    let mdp = TabularMdp {
        n_states: 2,
        n_actions: 1,
        transition: vec![0.0, 1.0, 1.0, 0.0],
        reward: vec![1.0, 1.0],
        mu0: vec![1.0, 0.0],
        gamma: 0.5,
    };
    let policy = PolicyTable::uniform(2, 1);
    let exact = solve_state_action_occupancy(&mdp, &policy).map_err(|e| e.to_string())?;
    let mc = monte_carlo_occupancy(&mdp, &policy, 100_000, 7).map_err(|e| e.to_string())?;
    let l1: f64 = exact.rho_sa.iter().zip(&mc.rho_sa).map(|(a, b)| (a - b).abs()).sum();
    if l1 >= 0.05 {
        return Err(format!("Monte-Carlo L1 distance {l1:.4} >= 0.05 at n = 1e5"));
    }
    Ok(())
}

fn check_annihilation() -> Result<(), String> {
    let mut rng = Rng::new(23);
    for i in 0..10 {
        let ns = 2 + rng.index(6);
        let na = 1 + rng.index(3);
        let mdp = TabularMdp::random(&mut rng, ns, na, 0.9);
        let policy = PolicyTable::random(&mut rng, mdp.n_states, mdp.n_actions);
        let occ = solve_state_action_occupancy(&mdp, &policy).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let q: Vec<f64> = (0..mdp.n_states * mdp.n_actions).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let v = lagrangian_annihilation(&mdp, &policy, &occ, &q).map_err(|e| e.to_string())?;
            if v.abs() >= 1e-9 {
                return Err(format!("MDP {i}: annihilation value {v:.3e} >= 1e-9"));
            }
        }
    }
    Ok(())
}

fn check_decomposition() -> Result<(), String> {
    let mut rng = Rng::new(31);
    for i in 0..1000 {
        let draw = |rng: &mut Rng| -> Vec<f64> {
            let raw: Vec<f64> = (0..4).map(|_| rng.uniform(0.05, 1.0)).collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|x| x / z).collect()
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let gap = decomposition_identity_check(&a, &b, &c).map_err(|e| e.to_string())?;
        if gap >= 1e-12 {
            return Err(format!("triple {i}: decomposition gap {gap:.3e} >= 1e-12"));
        }
        let pair = CategoricalPair::new(a, b).map_err(|e| e.to_string())?;
        let kl = kl_divergence(&pair).map_err(|e| e.to_string())?;
        let chi2 = f_divergence(&pair, chi_square).map_err(|e| e.to_string())?;
        if chi2 < kl - 1e-12 {
            return Err(format!("pair {i}: chi-square {chi2:.6} < KL {kl:.6}"));
        }
    }
    Ok(())
}

fn check_conjugate() -> Result<(), String> {
    let q = 1.5;
    for &x in &[0.5, 1.0, 2.0, 5.0] {
        // grid-search sup_y { x y - (y - 1)^p / p } on the convex branch
        let p = q / (q - 1.0);
        let mut best = f64::NEG_INFINITY;
        let mut y: f64 = 1.0;
        while y <= 40.0 {
            best = best.max(x * y - (y - 1.0).powf(p) / p);
            y += 1e-4;
        }
        let analytic = fenchel_star(x, q);
        if (analytic - best).abs() >= 1e-3 {
            return Err(format!("x = {x}: conjugate {analytic:.6} vs grid {best:.6}"));
        }
    }
    let mut x: f64 = 0.05;
    while x <= 50.0 {
        let h = 1e-6 * x.max(1.0);
        let fd = (fenchel_star(x + h, q) - fenchel_star(x - h, q)) / (2.0 * h);
        let analytic = fenchel_star_deriv(x, q);
        let rel = (analytic - fd).abs() / fd.abs().max(1e-12);
        if rel >= 1e-5 {
            return Err(format!("x = {x:.2}: derivative rel. err {rel:.3e}"));
        }
        x += 0.37;
    }
    Ok(())
}

fn random_batch(agent: &OmpoAgent, rng: &mut Rng) -> LossBatch {
    let b = agent.config.batch_size;
    let records = (0..b)
        .map(|_| TransitionRecord {
            state: (0..agent.obs_dim).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            action: (0..agent.act_dim).map(|_| rng.uniform(-0.9, 0.9)).collect(),
            next_state: (0..agent.obs_dim).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            reward: rng.uniform(0.05, 1.0),
            terminal: false,
        })
        .collect();
    LossBatch {
        records,
        shift_log_ratio: (0..b).map(|_| rng.uniform(-0.5, 0.5)).collect(),
        init_states: (0..b).map(|_| (0..agent.obs_dim).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect(),
        noise_next: (0..b).map(|_| rng.normal_vec(agent.act_dim)).collect(),
        noise_init: (0..b).map(|_| rng.normal_vec(agent.act_dim)).collect(),
    }
}

fn check_gradients() -> Result<(), String> {
    let config = AgentConfig {
        alpha: 0.5,
        hidden_dims: vec![8, 6],
        batch_size: 16,
        ..AgentConfig::default()
    };
    for seed in 0..3u64 {
        let mut rng = Rng::new(100 + seed);
        let mut agent = OmpoAgent::new(config.clone(), 3, 2, &mut rng).map_err(|e| e.to_string())?;
        let batch = random_batch(&agent, &mut rng);
        for critic_side in [true, false] {
            let (_, grad) = if critic_side {
                agent.critic_loss_and_grad(&batch)
            } else {
                agent.actor_loss_and_grad(&batch)
            }
            .map_err(|e| e.to_string())?;
            let n = grad.len();
            for k in 0..20 {
                let idx = k * n / 20;
                let h = 1e-5;
                let mut eval = |delta: f64| -> Result<f64, String> {
                    let params = if critic_side { &mut agent.critic.params } else { &mut agent.actor.params };
                    params.data[idx] += delta;
                    let loss = if critic_side {
                        agent.critic_loss_and_grad(&batch)
                    } else {
                        agent.actor_loss_and_grad(&batch)
                    }
                    .map(|(l, _)| l)
                    .map_err(|e| e.to_string());
                    let params = if critic_side { &mut agent.critic.params } else { &mut agent.actor.params };
                    params.data[idx] -= delta;
                    loss
                };
                let fd = (eval(h)? - eval(-h)?) / (2.0 * h);
                let rel = (grad.data[idx] - fd).abs() / fd.abs().max(1e-8);
                if rel >= 1e-4 {
                    return Err(format!(
                        "{} gradient, seed {seed}, coord {idx}: rel. err {rel:.3e}",
                        if critic_side { "critic" } else { "actor" }
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Runs every check, printing one line per check. Returns true iff all pass.
pub fn run_verify() -> bool {
    let checks: Vec<Check> = vec![
        ("flow solver residuals (50 random MDPs)", check_solver_residuals()),
        ("Monte-Carlo occupancy vs exact", check_monte_carlo()),
        ("Lagrangian annihilation (10 MDPs x 100 Q)", check_annihilation()),
        ("decomposition identity + chi2 >= KL (1000)", check_decomposition()),
        ("convex conjugate grid + derivative FD", check_conjugate()),
        ("critic/actor gradient finite differences", check_gradients()),
    ];
    let mut ok = true;
    for (name, result) in &checks {
        match result {
            Ok(()) => println!("PASS  {name}"),
            Err(msg) => {
                ok = false;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    ok
}
