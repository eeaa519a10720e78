//! Oracle tests for the effective-speed formulas and the homogenization
//! sweep. Reference values: the closed form 1 / integral ds/(2 + sin 2 pi s)
//! = sqrt(3), exact torus means, the harmonic mean of a square wave, and
//! flat-front wave speeds measured against the cell-problem prediction.

use hetflow_core::forcing::{Direction, Forcing, Slope};
use hetflow_core::graph::{solve_graph, GraphSolverConfig, GraphState};
use hetflow_core::homog::{
    discontinuity_scan, effective_speed, effective_speed_normal, eps_sweep, measure_wave_speed,
    EpsSweepConfig, SpeedBranch,
};
use hetflow_core::Error;

/// 1 / (integral of ds / (2 + sin 2 pi s)) = sqrt(2^2 - 1).
const HARMONIC_2_SIN: f64 = 1.7320508075688772;

#[test]
fn harmonic_mean_of_the_shifted_sine_is_sqrt3() {
    let field = Forcing::offset_sin(2.0, 1.0);
    let sp = effective_speed(&field, Slope::rational(0, 1).unwrap()).unwrap();
    assert!(matches!(sp.branch, SpeedBranch::HarmonicMean));
    assert!(
        (sp.c - HARMONIC_2_SIN).abs() < 1e-9,
        "c = {} vs sqrt3 = {HARMONIC_2_SIN}",
        sp.c
    );
    assert!((sp.c - (3.0f64).sqrt()).abs() < 1e-9);
    assert!(sp.min_abs_average >= 1.0 - 1e-12);
}

#[test]
fn zero_crossing_average_pins_the_front() {
    let field = Forcing::sin_y(1.0);
    let sp = effective_speed(&field, Slope::rational(0, 1).unwrap()).unwrap();
    assert!(matches!(sp.branch, SpeedBranch::Pinned));
    assert_eq!(sp.c, 0.0, "pinned speed must be literally zero");
    let s = sp.pinned_at.expect("crossing location");
    // sin(2 pi s) vanishes at multiples of 1/2.
    let d = (s * 2.0).fract().min(1.0 - (s * 2.0).fract());
    assert!(d < 1e-6, "pinned_at {s} is not a zero of the average");
}

#[test]
fn irrational_slope_returns_the_torus_mean() {
    let field = Forcing::offset_sin(2.0, 1.0);
    let sp = effective_speed(&field, Slope::irrational(std::f64::consts::SQRT_2)).unwrap();
    assert!(matches!(sp.branch, SpeedBranch::TorusMean));
    assert!((sp.c - 2.0).abs() < 1e-12, "c = {}", sp.c);
}

#[test]
fn rational_slope_one_averages_out_the_oscillation() {
    // Along lines of slope 1 the sine averages to zero over the unit period,
    // so G is the constant 2 and both branches agree on c = 2.
    let field = Forcing::offset_sin(2.0, 1.0);
    let sp = effective_speed(&field, Slope::rational(1, 1).unwrap()).unwrap();
    assert!((sp.c - 2.0).abs() < 1e-9, "c = {}", sp.c);
}

#[test]
fn normal_directions_of_a_square_wave() {
    // x-only square wave with values 1/2 and 3/2. Fronts with normal (1,0)
    // sweep through the layers and feel the harmonic mean
    // 1 / (0.5/0.5 + 0.5/1.5) = 3/4. Fronts with normal (1,1) cross every
    // layer along each line and feel the plain mean 1.
    let field = Forcing::piecewise(vec![0.0, 0.5, 1.0], vec![0.5, 1.5]).unwrap();
    let along = effective_speed_normal(&field, Direction::lattice(1, 0).unwrap()).unwrap();
    assert!(
        (along.c - 0.75).abs() < 1e-5,
        "layer-normal speed {} vs 3/4",
        along.c
    );
    let diagonal = effective_speed_normal(&field, Direction::lattice(1, 1).unwrap()).unwrap();
    assert!(
        (diagonal.c - 1.0).abs() < 1e-9,
        "diagonal speed {} vs 1",
        diagonal.c
    );
    let irr = effective_speed_normal(&field, Direction::irrational(1.0, std::f64::consts::E)).unwrap();
    assert!((irr.c - 1.0).abs() < 1e-12);
}

#[test]
fn grazing_average_is_reported_ambiguous() {
    // Minimum of G is 5e-8: not a resolvable zero, not safely positive.
    let field = Forcing::offset_sin(1.0 + 5e-8, 1.0);
    match effective_speed(&field, Slope::rational(0, 1).unwrap()) {
        Err(Error::AmbiguousPinning { min_abs }) => {
            assert!(min_abs > 0.0 && min_abs < 1e-7, "min_abs = {min_abs}");
        }
        other => panic!("expected AmbiguousPinning, got {other:?}"),
    }
}

#[test]
fn flat_front_speed_matches_the_harmonic_prediction() {
    // g = 2 + sin(2 pi u / eps), eps = 1/4: a flat front crosses each cell
    // in time eps/sqrt3 independent of eps, so the measured drift rate is
    // sqrt3 for every eps; the fit over the second half of the run leaves
    // only the sub-percent ripple bias.
    let field = Forcing::offset_sin(2.0, 1.0).rescaled_cell(4);
    let init = GraphState::constant(0.0, 0.0, 64);
    let cfg = GraphSolverConfig::to_time(10.0, 0.05);
    let run = solve_graph(&init, &field, &cfg).unwrap();
    let w = measure_wave_speed(&run, 1e-3).unwrap();
    assert!(!w.pinned);
    assert!(
        (w.speed / HARMONIC_2_SIN - 1.0).abs() < 0.01,
        "measured {} vs {HARMONIC_2_SIN}",
        w.speed
    );
    assert!(w.displacement > 10.0, "front should have crossed many cells");
}

#[test]
fn sign_changing_cell_forcing_pins_the_front() {
    // g = sin(2 pi u / eps) with eps = 1/4, started a quarter cell below the
    // stable zero: the front creeps up by eps/4 and stops, well within the
    // one-cell pinning band.
    let eps = 0.25;
    let field = Forcing::sin_y(1.0).rescaled_cell(4);
    let init = GraphState::constant(eps / 4.0, 0.0, 64);
    let cfg = GraphSolverConfig::to_time(5.0, 0.05);
    let run = solve_graph(&init, &field, &cfg).unwrap();
    let first = run.samples.first().unwrap();
    let last = run.samples.last().unwrap();
    let drift = last
        .state
        .values()
        .iter()
        .zip(first.state.values())
        .map(|(b, a)| (b - a).abs())
        .fold(0.0f64, f64::max);
    assert!(drift < eps, "front moved {drift}, a full cell");
    assert!(drift > eps / 8.0, "front should settle at the stable zero");
    let w = measure_wave_speed(&run, eps).unwrap();
    assert!(w.pinned);
    assert_eq!(w.speed, 0.0);
}

#[test]
fn sweep_distances_shrink_with_eps() {
    let field = Forcing::piecewise(vec![0.0, 0.5, 1.0], vec![0.5, 1.5]).unwrap();
    let cfg = EpsSweepConfig {
        cells: vec![2, 4, 8],
        nodes_per_cell: 32,
        base_nodes: 64,
        offset: 0.0,
        modes: vec![(1, 0.0, 0.1)],
        solver: GraphSolverConfig::to_time(0.1, 0.02),
        jobs: 3,
    };
    let sweep = eps_sweep(&field, &cfg).unwrap();
    assert_eq!(sweep.rows.len(), 3);
    assert!((sweep.limit_mean - 1.0).abs() < 1e-12);
    assert!(sweep.strictly_decreasing, "distances: {:?}", sweep
        .rows
        .iter()
        .map(|r| r.sup_distance)
        .collect::<Vec<_>>());
    let first = &sweep.rows[0];
    let last = &sweep.rows[2];
    assert!(last.sup_distance < 0.5 * first.sup_distance);
    for row in &sweep.rows {
        assert!(
            row.shift_defect <= 1e-9,
            "lattice shift bound violated by {}",
            row.shift_defect
        );
        assert_eq!(row.n, 32 * row.m as usize);
    }
}

#[test]
fn scan_table_shows_the_speed_jump() {
    let field = Forcing::offset_sin(2.0, 1.0);
    let slopes = [
        Slope::rational(0, 1).unwrap(),
        Slope::rational(1, 1).unwrap(),
        Slope::rational(1, 2).unwrap(),
        Slope::irrational(0.6180339887498949),
    ];
    let rows = discontinuity_scan(&field, &slopes).unwrap();
    assert_eq!(rows.len(), 4);
    assert!((rows[0].c - HARMONIC_2_SIN).abs() < 1e-8);
    for row in &rows[1..] {
        assert!((row.c - 2.0).abs() < 1e-8, "alpha {}: c {}", row.alpha, row.c);
    }
    // The jump the scan is meant to exhibit: 2 - sqrt3.
    let jump = rows[1].c - rows[0].c;
    assert!((jump - 0.2679491924311228).abs() < 1e-8);
    assert!(!rows[0].pinned && !rows[1].pinned);
}
