//! Invariants over randomly generated star-shaped domains.

use std::f64::consts::TAU;

use pompeiu_core::calculus::gradient_density_spectral;
use pompeiu_core::energy::{energy_spatial, energy_spectral, FourierSlice};
use pompeiu_core::flow::{run_flow, FlowOptions};
use pompeiu_core::geometry::StarShape;
use pompeiu_core::kernel::RadialKernel;
use pompeiu_core::pompeiu::scan;
use proptest::prelude::*;

/// `r = 1 + Σ_{k≤4} (a_k cos kθ + b_k sin kθ)` with `|a_k|, |b_k| ≤ 0.08`, so `r ≥ 0.36`.
fn star_shape() -> impl Strategy<Value = StarShape> {
    (
        (-2.0f64..2.0, -2.0f64..2.0),
        prop::collection::vec(-0.08f64..0.08, 4),
        prop::collection::vec(-0.08f64..0.08, 4),
    )
        .prop_map(|((cx, cy), ak, bk)| StarShape::new([cx, cy], 1.0, ak, bk).unwrap())
}

fn rigid_motion() -> impl Strategy<Value = (f64, [f64; 2])> {
    (0.0f64..TAU, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(phi, x, y)| (phi, [x, y]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_closes_and_turns_once(shape in star_shape()) {
        let grid = shape.sample_boundary(256).unwrap();
        let nx: Vec<f64> = grid.normals.iter().map(|n| n[0]).collect();
        let ny: Vec<f64> = grid.normals.iter().map(|n| n[1]).collect();
        prop_assert!(grid.integrate(&nx).abs() < 1e-10);
        prop_assert!(grid.integrate(&ny).abs() < 1e-10);
        prop_assert!((grid.integrate(&grid.curvature) - TAU).abs() < 1e-8);
    }

    #[test]
    fn geometry_is_rigid_motion_invariant(shape in star_shape(), (phi, offset) in rigid_motion()) {
        let moved = shape.rotate(phi).translate(offset);
        let (a, b) = (shape.sample_boundary(256).unwrap(), moved.sample_boundary(256).unwrap());
        prop_assert!((a.perimeter() - b.perimeter()).abs() < 1e-12);
        prop_assert!((shape.area() - moved.area()).abs() < 1e-12);
        // Total squared curvature does not depend on where the nodes fall.
        let k2 = |g: &pompeiu_core::geometry::BoundaryGrid| g.integrate(&g.curvature.iter().map(|k| k * k).collect::<Vec<_>>());
        prop_assert!((k2(&a) - k2(&b)).abs() < 1e-12 * k2(&a).max(1.0));
    }

    #[test]
    fn boundary_rule_error_drops_fourfold(shape in star_shape()) {
        let reference = shape.sample_boundary(1024).unwrap().perimeter();
        let e1 = (shape.sample_boundary(32).unwrap().perimeter() - reference).abs();
        let e2 = (shape.sample_boundary(64).unwrap().perimeter() - reference).abs();
        prop_assert!(e2 <= e1 / 4.0 || e2 < 1e-13, "{} -> {}", e1, e2);
    }

    #[test]
    fn spectral_energy_is_nonnegative_and_slice_bounded(shape in star_shape(), lambda in 0.5f64..12.0) {
        let grid = shape.sample_boundary(256).unwrap();
        let report = energy_spectral(&shape, lambda, 64, &grid).unwrap();
        prop_assert!(report.value >= -report.error_estimate);
        prop_assert!(report.value >= 0.0);
        let slice = FourierSlice::new(&grid, lambda, 64).unwrap();
        prop_assert!(slice.max_modulus() <= shape.area() * (1.0 + 1e-12));
        for i in 0..32 {
            prop_assert!((slice.values[i + 32] - slice.values[i].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn energy_is_rigid_motion_invariant(shape in star_shape(), (phi, offset) in rigid_motion(), lambda in 0.5f64..6.0) {
        let moved = shape.rotate(phi).translate(offset);
        let f = |s: &StarShape| energy_spectral(s, lambda, 128, &s.sample_boundary(256).unwrap()).unwrap().value;
        prop_assert!((f(&shape) - f(&moved)).abs() < 1e-9);
        let m = |s: &StarShape| scan(s, lambda, lambda + 1.0, 2, 32, &s.sample_boundary(256).unwrap()).unwrap().m_of_lambda;
        for (x, y) in m(&shape).iter().zip(&m(&moved)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn spatial_energy_converges_and_is_bounded_below(shape in star_shape(), lambda in 0.5f64..4.0) {
        let kernel = RadialKernel::bessel(lambda, 2).unwrap();
        let reference = energy_spectral(&shape, lambda, 256, &shape.sample_boundary(512).unwrap()).unwrap().value;
        let coarse = energy_spatial(&shape, &kernel, &shape.interior_quadrature(16, 4).unwrap()).unwrap();
        let fine = energy_spatial(&shape, &kernel, &shape.interior_quadrature(32, 8).unwrap()).unwrap();
        let (e1, e2) = ((coarse.value - reference).abs(), (fine.value - reference).abs());
        prop_assert!(e2 <= e1 / 4.0 || e2 < 1e-12, "{} -> {}", e1, e2);
        prop_assert!(fine.value >= -fine.error_estimate);

        let gaussian = RadialKernel::gaussian(0.7).unwrap();
        let g = energy_spatial(&shape, &gaussian, &shape.interior_quadrature(32, 8).unwrap()).unwrap();
        prop_assert!(g.value > 0.0);
    }

    #[test]
    fn spectral_and_interior_gradients_agree(shape in star_shape(), lambda in 0.5f64..4.0) {
        let grid = shape.sample_boundary(64).unwrap();
        let kernel = RadialKernel::bessel(lambda, 2).unwrap();
        let quad = shape.interior_quadrature(128, 16).unwrap();
        let a = pompeiu_core::calculus::gradient_density(&kernel, &grid, &quad);
        let b = gradient_density_spectral(&grid, lambda, 128).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn flow_decreases_energy_and_keeps_centroid(shape in star_shape()) {
        let kernel = RadialKernel::bessel(3.831_705_970_207_512, 2).unwrap();
        let opts = FlowOptions { max_steps: 15, n_boundary: 128, n_directions: 64, k_fit: 16, ..FlowOptions::default() };
        let traj = run_flow(&shape, &kernel, &opts).map_err(|f| f.error).unwrap();
        for w in traj.records.windows(2) {
            prop_assert!(w[1].energy < w[0].energy);
            prop_assert!(w[1].t > w[0].t);
        }
        for r in &traj.records {
            prop_assert!(r.centroid[0].abs() < 1e-8 && r.centroid[1].abs() < 1e-8);
        }
    }

    #[test]
    fn scan_minimizer_scales_inversely(shape in star_shape(), s in 0.6f64..1.8) {
        let scaled = shape.scale(s).unwrap();
        let a = scan(&shape, 2.0, 6.0, 41, 32, &shape.sample_boundary(128).unwrap()).unwrap();
        let b = scan(&scaled, 2.0 / s, 6.0 / s, 41, 32, &scaled.sample_boundary(128).unwrap()).unwrap();
        prop_assert!((a.argmin_lambda / s - b.argmin_lambda).abs() < 1e-6 * a.argmin_lambda);
    }
}
