//! The parametric curve solver and the graph solver discretize the same
//! interface motion. Evolving an embedded graph with both and comparing
//! interpolated heights pins down the shared convention (normal direction,
//! forcing argument order, metric) far better than any single-solver test.

use hetflow_core::curve::{solve_curve, CurveSolverConfig};
use hetflow_core::forcing::Forcing;
use hetflow_core::graph::{embed_graph, solve_graph, GraphSolverConfig, GraphState};

/// Max height discrepancy after co-evolving both formulations to t_end.
fn height_gap(n: usize, t_end: f64) -> f64 {
    let field = Forcing::offset_sin(1.0, 0.5);
    let initial = GraphState::fourier(0.0, &[(1, 0.0, 0.2)], n);

    let gcfg = GraphSolverConfig::to_time(t_end, t_end);
    let grun = solve_graph(&initial, &field, &gcfg).unwrap();
    let gfinal = &grun.samples.last().unwrap().state;

    let ccfg = CurveSolverConfig::to_time(t_end, t_end);
    let crun = solve_curve(&embed_graph(&initial).unwrap(), &field, &ccfg).unwrap();
    let cfinal = &crun.samples.last().unwrap().curve;

    // Curve nodes drift in x; compare each against the graph interpolant.
    let mut worst = 0.0f64;
    for p in cfinal.points() {
        worst = worst.max((p.y - gfinal.eval_at(p.x)).abs());
    }
    worst
}

#[test]
fn curve_and_graph_solvers_agree_and_converge_together() {
    let coarse = height_gap(128, 0.02);
    assert!(
        coarse < 5e-3,
        "formulations disagree by {coarse:.3e} at N=128"
    );
    // Refining the grid must shrink the gap at roughly second order; a sign
    // convention mismatch would leave an O(1) discrepancy instead.
    let fine = height_gap(256, 0.02);
    assert!(
        coarse / fine > 2.5,
        "no convergence between formulations: {coarse:.3e} -> {fine:.3e}"
    );
}
