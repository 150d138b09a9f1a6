use kuniform::constructions::XorIrGame;
use kuniform::dynamics::{convergence_time, run_regret_matching, support_lower_bound_audit};
use kuniform::game::correlated_payoff;
use kuniform::verify::ce_regrets;
use kuniform::ExplicitGame;

#[test]
fn matching_pennies_regret_is_small_after_ten_thousand_rounds() {
    let g = ExplicitGame::<f64>::matching_pennies();
    let trace = run_regret_matching(&g, 10_000, 1);
    // 0.05 on the ±1 scale is 0.025 on the [0, 1] scale.
    assert!(trace.max_internal_regret[9_999] <= 0.025, "{}", trace.max_internal_regret[9_999]);
}

#[test]
fn empirical_distribution_is_t_uniform() {
    let g = XorIrGame::new(2).unwrap();
    let trace = run_regret_matching::<f64, _>(&g, 50, 4);
    for t in [1usize, 7, 50] {
        let d = trace.empirical(t).unwrap();
        assert_eq!(d.k(), Some(t as u32));
        let total: u32 = d.counts().unwrap().iter().sum();
        assert_eq!(total as usize, t);
    }
}

#[test]
fn xor_trace_replays_identically() {
    let g = XorIrGame::new(3).unwrap();
    let a = run_regret_matching::<f64, _>(&g, 200, 9);
    let b = run_regret_matching::<f64, _>(&g, 200, 9);
    assert_eq!(a, b);
    assert_ne!(a.rounds, run_regret_matching::<f64, _>(&g, 200, 10).rounds);
}

#[test]
fn xor_hitting_time_is_at_least_two() {
    let g = XorIrGame::new(3).unwrap();
    let seeds: Vec<u64> = (0..10).collect();
    for h in convergence_time::<f64, _>(&g, 0.25, 300, &seeds) {
        assert!(h.t_hit.is_none_or(|t| t >= 2), "seed {}: {:?}", h.seed, h.t_hit);
    }
}

#[test]
fn audit_certificates_reverify() {
    let g = XorIrGame::new(3).unwrap();
    for seed in 0..5 {
        let trace = run_regret_matching::<f64, _>(&g, 400, seed);
        let report = support_lower_bound_audit(&g, &trace).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(report.eligible + report.skipped, 400);
        for c in &report.certificates {
            let d = trace.empirical(c.t).unwrap();
            let direct = correlated_payoff(&g, &d, c.player);
            assert!((direct - c.payoff).abs() < 1e-12);
            assert!(direct <= 0.25 + 1e-12);
            assert_eq!(c.ir_level, 0.5);
        }
        // The last reported internal regret agrees with a direct computation.
        let d = trace.empirical(400).unwrap();
        let max = ce_regrets(&g, &d).unwrap().iter().map(|r| r.internal).fold(0.0, f64::max);
        assert!((max - trace.max_internal_regret[399]).abs() < 1e-9);
    }
}
