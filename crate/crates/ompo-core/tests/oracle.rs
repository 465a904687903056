//! Exact-occupancy oracle tests: solver fixed points, Monte-Carlo agreement,
//! the Lagrangian/decomposition identities and divergence arithmetic.

use ompo_core::oracle::*;
use ompo_core::{CoreError, Rng};
use proptest::prelude::*;

fn self_loop_mdp(gamma: f64) -> TabularMdp {
    TabularMdp {
        n_states: 1,
        n_actions: 1,
        transition: vec![1.0],
        reward: vec![1.0],
        mu0: vec![1.0],
        gamma,
    }
}

/// s0 -> s1 -> s0 under the single action, started at s0.
fn two_state_cycle(gamma: f64) -> TabularMdp {
    TabularMdp {
        n_states: 2,
        n_actions: 1,
        transition: vec![0.0, 1.0, 1.0, 0.0],
        reward: vec![1.0, 1.0],
        mu0: vec![1.0, 0.0],
        gamma,
    }
}

#[test]
fn self_loop_occupancy_is_forced() {
    let mdp = self_loop_mdp(0.99);
    let pi = PolicyTable::uniform(1, 1);
    let occ = solve_state_action_occupancy(&mdp, &pi).unwrap();
    assert!((occ.sa(0, 0) - 1.0).abs() < 1e-12);
    assert!((occ.sas(0, 0, 0) - 1.0).abs() < 1e-12);
    assert_eq!(bellman_flow_residual(&mdp, &pi, &occ).unwrap(), 0.0);
}

#[test]
fn two_state_cycle_geometric_series() {
    // Occupancy of s0 is (1-g) sum g^{2t} = 1/(1+g); at g = 0.5 that is 2/3.
    let mdp = two_state_cycle(0.5);
    let pi = PolicyTable::uniform(2, 1);
    let occ = solve_state_action_occupancy(&mdp, &pi).unwrap();
    assert!((occ.sa(0, 0) - 2.0 / 3.0).abs() < 1e-12);
    assert!((occ.sa(1, 0) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn solver_residual_random_mdp() {
    let mut rng = Rng::new(7);
    let mdp = TabularMdp::random(&mut rng, 6, 3, 0.9);
    let pi = PolicyTable::random(&mut rng, 6, 3);
    let occ = solve_state_action_occupancy(&mdp, &pi).unwrap();
    occ.validate().unwrap();
    assert!(bellman_flow_residual(&mdp, &pi, &occ).unwrap() < 1e-10);
}

#[test]
fn uniform_table_has_large_residual() {
    let mdp = two_state_cycle(0.5);
    let pi = PolicyTable::uniform(2, 1);
    let occ = OccupancyTable {
        n_states: 2,
        n_actions: 1,
        rho_sa: vec![0.5, 0.5],
        rho_sas: vec![0.25; 4],
    };
    assert!(bellman_flow_residual(&mdp, &pi, &occ).unwrap() > 0.1);
}

#[test]
fn monte_carlo_self_loop_is_exact() {
    let mdp = self_loop_mdp(0.9);
    let pi = PolicyTable::uniform(1, 1);
    let occ = monte_carlo_occupancy(&mdp, &pi, 100, 3).unwrap();
    assert_eq!(occ.sas(0, 0, 0), 1.0);
}

#[test]
fn monte_carlo_single_sample_is_valid() {
    let mut rng = Rng::new(11);
    let mdp = TabularMdp::random(&mut rng, 4, 2, 0.5);
    let pi = PolicyTable::random(&mut rng, 4, 2);
    let occ = monte_carlo_occupancy(&mdp, &pi, 1, 5).unwrap();
    occ.validate().unwrap();
    let mass: f64 = occ.rho_sas.iter().sum();
    assert_eq!(mass, 1.0);
}

#[test]
fn monte_carlo_matches_exact_on_cycle() {
    let mdp = two_state_cycle(0.5);
    let pi = PolicyTable::uniform(2, 1);
    let exact = solve_state_action_occupancy(&mdp, &pi).unwrap();
    let mc = monte_carlo_occupancy(&mdp, &pi, 1_000_000, 42).unwrap();
    let l1: f64 = exact
        .rho_sas
        .iter()
        .zip(&mc.rho_sas)
        .map(|(a, b)| (a - b).abs())
        .sum();
    assert!(l1 < 0.02, "L1 distance {l1}");
}

#[test]
fn lagrangian_annihilation_on_exact_occupancy() {
    let mut rng = Rng::new(21);
    let mdp = TabularMdp::random(&mut rng, 5, 3, 0.9);
    let pi = PolicyTable::random(&mut rng, 5, 3);
    let occ = solve_state_action_occupancy(&mdp, &pi).unwrap();
    for _ in 0..100 {
        let q: Vec<f64> = (0..15).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let v = lagrangian_annihilation(&mdp, &pi, &occ, &q).unwrap();
        assert!(v.abs() < 1e-9, "annihilation defect {v}");
    }
    // Q = 0 vanishes trivially.
    assert_eq!(lagrangian_annihilation(&mdp, &pi, &occ, &vec![0.0; 15]).unwrap(), 0.0);
}

#[test]
fn lagrangian_detects_perturbed_occupancy() {
    let mut rng = Rng::new(22);
    let mdp = TabularMdp::random(&mut rng, 5, 3, 0.9);
    let pi = PolicyTable::random(&mut rng, 5, 3);
    let mut occ = solve_state_action_occupancy(&mdp, &pi).unwrap();
    occ.rho_sa[0] += 0.01;
    let total: f64 = occ.rho_sa.iter().sum();
    for x in occ.rho_sa.iter_mut() {
        *x /= total;
    }
    for sa in 0..15 {
        for s2 in 0..5 {
            occ.rho_sas[sa * 5 + s2] = occ.rho_sa[sa] * mdp.t(sa / 3, sa % 3, s2);
        }
    }
    let detected = (0..100).any(|_| {
        let q: Vec<f64> = (0..15).map(|_| rng.uniform(-10.0, 10.0)).collect();
        lagrangian_annihilation(&mdp, &pi, &occ, &q).unwrap().abs() > 1e-4
    });
    assert!(detected);
}

#[test]
fn kl_examples() {
    let eq = CategoricalPair::new(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
    assert_eq!(kl_divergence(&eq).unwrap(), 0.0);

    let pair = CategoricalPair::new(vec![0.5, 0.5], vec![0.25, 0.75]).unwrap();
    let expected = 0.5 * (4.0f64 / 3.0).ln(); // 0.5 ln 2 + 0.5 ln(2/3)
    assert!((kl_divergence(&pair).unwrap() - expected).abs() < 1e-15);

    let disjoint = CategoricalPair::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
    assert!(matches!(kl_divergence(&disjoint), Err(CoreError::SupportViolation)));
}

#[test]
fn chi_square_example() {
    let pair = CategoricalPair::new(vec![0.5, 0.5], vec![0.25, 0.75]).unwrap();
    // 0.25 (2-1)^2 + 0.75 (2/3-1)^2 = 0.25 + 0.75/9 = 1/3
    let v = f_divergence(&pair, chi_square).unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn decomposition_identity_random_triples() {
    let mut rng = Rng::new(31);
    for _ in 0..1000 {
        let draw = |rng: &mut Rng| -> Vec<f64> {
            let mut v: Vec<f64> = (0..6).map(|_| rng.next_f64() + 1e-3).collect();
            let t: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= t);
            v
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        assert!(decomposition_identity_check(&a, &b, &c).unwrap() < 1e-12);
    }
}

#[test]
fn decomposition_identity_degenerate_cases() {
    let u = vec![0.25; 4];
    assert_eq!(decomposition_identity_check(&u, &u, &u).unwrap(), 0.0);
    let a = vec![0.1, 0.2, 0.3, 0.4];
    let b = vec![0.4, 0.3, 0.2, 0.1];
    // c = a: the middle term equals the first, the tail vanishes.
    assert!(decomposition_identity_check(&a, &b, &a).unwrap() < 1e-15);
}

#[test]
fn chi_square_dominates_kl() {
    let mut rng = Rng::new(41);
    for _ in 0..1000 {
        let draw = |rng: &mut Rng| -> Vec<f64> {
            let mut v: Vec<f64> = (0..5).map(|_| rng.next_f64() + 1e-3).collect();
            let t: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= t);
            v
        };
        let pair = CategoricalPair::new(draw(&mut rng), draw(&mut rng)).unwrap();
        let chi = f_divergence(&pair, chi_square).unwrap();
        let kl = kl_divergence(&pair).unwrap();
        assert!(chi >= kl, "chi {chi} < kl {kl}");
    }
}

#[test]
fn fenchel_gap_chi_square() {
    // For f(x) = (x-1)^2: f*(y) = y + y^2/4, optimizer y* = f'(p/q) = 2(p/q - 1).
    let pair = CategoricalPair::new(vec![0.5, 0.5], vec![0.25, 0.75]).unwrap();
    let f_star = |y: f64| y + y * y / 4.0;
    let y_star: Vec<f64> = pair.p.iter().zip(&pair.q).map(|(&p, &q)| 2.0 * (p / q - 1.0)).collect();
    let mut grid = vec![vec![0.0, 0.0], vec![1.0, -1.0], vec![-0.5, 2.0]];
    grid.push(y_star.clone());
    let report = fenchel_gap_check(&pair, chi_square, f_star, &grid).unwrap();
    assert!((report.sup_estimate - report.closed_form).abs() < 1e-6);
    assert_eq!(report.argmax, grid.len() - 1);

    // Without y* the grid value stays below the closed form.
    let report = fenchel_gap_check(&pair, chi_square, f_star, &grid[..3].to_vec()).unwrap();
    assert!(report.sup_estimate <= report.closed_form + 1e-12);
}

#[test]
fn fenchel_gap_identical_pair() {
    let pair = CategoricalPair::new(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
    let f_star = |y: f64| y + y * y / 4.0;
    // y* = f'(1) = 0 per support point.
    let grid = vec![vec![0.0, 0.0], vec![0.5, 0.5]];
    let report = fenchel_gap_check(&pair, chi_square, f_star, &grid).unwrap();
    assert_eq!(report.closed_form, 0.0);
    assert!(report.sup_estimate.abs() < 1e-12);
    assert_eq!(report.argmax, 0);
}

#[test]
fn reward_positivity_enforced() {
    let mut mdp = self_loop_mdp(0.9);
    mdp.reward[0] = 0.0;
    assert!(matches!(mdp.validate(), Err(CoreError::NonPositiveReward(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solved_occupancies_are_valid(seed in 0u64..1_000_000, ns in 2usize..7, na in 1usize..4) {
        let mut rng = Rng::new(seed);
        let gamma = [0.5, 0.9, 0.99][(seed % 3) as usize];
        let mdp = TabularMdp::random(&mut rng, ns, na, gamma);
        let pi = PolicyTable::random(&mut rng, ns, na);
        let occ = solve_state_action_occupancy(&mdp, &pi).unwrap();
        occ.validate().unwrap();
        prop_assert!(bellman_flow_residual(&mdp, &pi, &occ).unwrap() < 1e-10);
    }

    #[test]
    fn kl_nonnegative(seed in 0u64..1_000_000) {
        let mut rng = Rng::new(seed);
        let draw = |rng: &mut Rng| -> Vec<f64> {
            let mut v: Vec<f64> = (0..4).map(|_| rng.next_f64() + 1e-3).collect();
            let t: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= t);
            v
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let pair = CategoricalPair::new(p.clone(), q.clone()).unwrap();
        let kl = kl_divergence(&pair).unwrap();
        prop_assert!(kl >= 0.0);
        let same = CategoricalPair::new(p.clone(), p).unwrap();
        prop_assert!(kl_divergence(&same).unwrap().abs() < 1e-12);
    }
}
