//! Oracle tests for the graph solver. References: closed-form solutions of
//! the flat and linear profiles, linearized heat decay, inline RK4 for the
//! flat forced profile, and frozen special values of the arclength energy.

use hetflow_core::curve::TimeStep;
use hetflow_core::forcing::Forcing;
use hetflow_core::graph::{
    comparison_check, energy_f, energy_identity_residual, solve_graph, solve_weak, GraphSolverConfig,
    GraphState, TestFunction,
};

const TAU: f64 = std::f64::consts::TAU;

#[test]
fn flat_profile_with_constant_forcing_rises_linearly() {
    // u_x = 0 identically, so u_t = c and u(t) = c t with no spatial error;
    // Heun integrates a constant rhs exactly.
    let cfg = GraphSolverConfig::to_time(0.5, 0.1);
    let run = solve_graph(&GraphState::constant(0.0, 0.0, 64), &Forcing::constant(2.0), &cfg)
        .unwrap();
    for s in &run.samples {
        for u in s.state.values() {
            assert!((u - 2.0 * s.t).abs() < 1e-12, "t={}: {u}", s.t);
        }
    }
}

#[test]
fn linear_profile_translates_exactly() {
    // u = alpha x stays linear under constant forcing: u_xx = 0 discretely
    // (the winding offset makes the wrap difference exact), so
    // u(x, t) = alpha x + c sqrt(1 + alpha^2) t to rounding.
    let alpha = 0.75;
    let c = -1.3;
    let cfg = GraphSolverConfig::to_time(0.2, 0.05);
    let run = solve_graph(&GraphState::linear(alpha, 64), &Forcing::constant(c), &cfg).unwrap();
    let rise = c * (1.0 + alpha * alpha).sqrt();
    for s in &run.samples {
        for (i, u) in s.state.values().iter().enumerate() {
            let exact = alpha * i as f64 / 64.0 + rise * s.t;
            assert!((u - exact).abs() < 1e-10, "t={} node {i}: {u} vs {exact}", s.t);
        }
    }
}

#[test]
fn flat_profile_with_height_forcing_matches_rk4() {
    // For u independent of x the equation is the scalar ODE
    // u' = 2 + sin(2 pi u). Oracle: RK4 at step 1e-5.
    let t_end = 1.0f64;
    let g = |u: f64| 2.0 + (TAU * u).sin();
    let mut u = 0.0f64;
    let h = 1e-5f64;
    for _ in 0..(t_end / h).round() as usize {
        let k1 = g(u);
        let k2 = g(u + 0.5 * h * k1);
        let k3 = g(u + 0.5 * h * k2);
        let k4 = g(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    let cfg = GraphSolverConfig::to_time(t_end, 0.25);
    let run = solve_graph(
        &GraphState::constant(0.0, 0.0, 64),
        &Forcing::offset_sin(2.0, 1.0),
        &cfg,
    )
    .unwrap();
    let got = run.samples.last().unwrap().state.values()[0];
    assert!((got - u).abs() < 1e-5, "flat forced height {got} vs RK4 {u}");
}

#[test]
fn small_amplitude_decay_follows_the_heat_rate() {
    // For |u_x| << 1 the equation linearizes to u_t = u_xx, and the first
    // Fourier mode decays like exp(-4 pi^2 t). N = 128 keeps the discrete
    // Laplacian eigenvalue within 2e-3 of the continuum over this horizon.
    let eps = 1e-3;
    let t_end = 0.05;
    let n = 128;
    let cfg = GraphSolverConfig::to_time(t_end, t_end);
    let run = solve_graph(
        &GraphState::fourier(0.0, &[(1, 0.0, eps)], n),
        &Forcing::constant(0.0),
        &cfg,
    )
    .unwrap();
    let peak = run.samples.last().unwrap().state.values()[n / 4];
    let expected = eps * (-4.0 * std::f64::consts::PI.powi(2) * t_end).exp();
    assert!(
        ((peak - expected) / expected).abs() < 2e-3,
        "decayed peak {peak:.6e} vs heat value {expected:.6e}"
    );
}

#[test]
fn energy_density_special_values() {
    // F(p) = p arctan p - log sqrt(1 + p^2); F(1) = pi/4 - (ln 2)/2.
    assert_eq!(energy_f(0.0), 0.0);
    let f1 = std::f64::consts::FRAC_PI_4 - 0.5 * std::f64::consts::LN_2;
    assert!((energy_f(1.0) - f1).abs() < 1e-15);
    assert!((energy_f(1.0) - 0.4388245731174757).abs() < 1e-15);
    // Even function.
    assert_eq!(energy_f(2.5), energy_f(-2.5));
}

#[test]
fn unforced_energy_dissipates_monotonically() {
    let cfg = GraphSolverConfig::to_time(0.05, 2.5e-3);
    let run = solve_graph(
        &GraphState::fourier(0.0, &[(1, 0.15, 0.0), (2, 0.0, 0.05)], 64),
        &Forcing::constant(0.0),
        &cfg,
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for s in &run.samples {
        assert!(
            s.record.energy <= prev + 1e-14,
            "energy grew to {} at t={}",
            s.record.energy,
            s.t
        );
        prev = s.record.energy;
    }
}

#[test]
fn energy_identity_residual_is_first_order_in_the_sampling_interval() {
    // Solve one trajectory at a fixed fine dt and evaluate the energy
    // identity residual at t = 8e-3 with two sampling intervals h and h/2.
    // The residual is dominated by the forward-difference error (h/2) E'',
    // so halving h should halve it.
    let field = Forcing::product(0.5);
    let initial = GraphState::fourier(0.0, &[(1, 0.05, 0.0)], 128);
    let residual_at = |h: f64| -> f64 {
        let mut cfg = GraphSolverConfig::to_time(0.024, h);
        cfg.time_step = TimeStep::Fixed(1e-5);
        let run = solve_graph(&initial, &field, &cfg).unwrap();
        let idx = (0.008 / h).round() as usize;
        assert!((run.samples[idx].t - 0.008).abs() < 1e-12);
        energy_identity_residual(&run.samples[idx], &run.samples[idx + 1], &field)
    };
    let r1 = residual_at(8e-3);
    let r2 = residual_at(4e-3);
    let ratio = (r1 / r2).abs();
    assert!(
        (1.4..2.8).contains(&ratio),
        "expected ~2x residual reduction, got {r1:.3e} / {r2:.3e} = {ratio:.2}"
    );
}

#[test]
fn ordered_states_stay_ordered() {
    let lower = GraphState::fourier(0.3, &[(1, 0.1, 0.0)], 32);
    let upper = GraphState::fourier(0.3, &[(1, 0.0, 0.1), (2, 0.02, 0.0)], 32);
    // Shift the upper state up to enforce initial ordering.
    let shifted: Vec<f64> = upper.values().iter().map(|u| u + 0.5).collect();
    let upper = GraphState::new(shifted, 0.3).unwrap();
    let cfg = GraphSolverConfig::to_time(0.01, 2e-3);
    let rep = comparison_check(&lower, &upper, &Forcing::product(1.0), &cfg, 1e-10).unwrap();
    assert!(rep.initial_gap > 0.0);
    assert!(rep.ok, "comparison violated: min gap {}", rep.min_gap);
}

#[test]
fn mollified_sequence_is_cauchy_with_small_weak_residual() {
    // Square-wave forcing with breakpoints on grid nodes; solutions for
    // shrinking mollifier widths must approach each other in sup norm, and
    // the final one must nearly annihilate the weak form paired with the
    // rough forcing itself.
    let field = Forcing::piecewise(vec![0.0, 0.5, 1.0], vec![0.8, 1.6]).unwrap();
    let initial = GraphState::fourier(0.0, &[(1, 0.05, 0.0)], 64);
    let cfg = GraphSolverConfig::to_time(0.05, 2.5e-3);
    let tests = vec![
        TestFunction {
            t0: 0.005,
            t1: 0.045,
            const_term: 1.0,
            modes: vec![(1, 0.5, 0.0)],
        },
        TestFunction {
            t0: 0.01,
            t1: 0.04,
            const_term: 0.0,
            modes: vec![(1, 0.0, 1.0), (2, 0.3, 0.0)],
        },
    ];
    let rep = solve_weak(&initial, &field, &[0.2, 0.1, 0.05, 0.025], &cfg, &tests).unwrap();
    assert_eq!(rep.sup_distances.len(), 3);
    for w in rep.sup_distances.windows(2) {
        assert!(w[1] < w[0], "sup distances not decreasing: {:?}", rep.sup_distances);
    }
    for (i, r) in rep.weak_residuals.iter().enumerate() {
        assert!(r.abs() < 1e-3, "weak residual {i} too large: {r:.3e}");
    }
    // x-only forcing: the sup of |u_t| must not grow along any run.
    let viol = rep.ut_monotonicity_violation.unwrap();
    assert!(viol <= 1e-8, "max |u_t| increased by {viol:.3e}");
}

#[test]
fn weak_solve_rejects_nondecreasing_widths() {
    let field = Forcing::piecewise(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
    let initial = GraphState::linear(0.0, 32);
    let cfg = GraphSolverConfig::to_time(0.01, 5e-3);
    assert!(solve_weak(&initial, &field, &[0.1, 0.1], &cfg, &[]).is_err());
}
