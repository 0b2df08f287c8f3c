use std::sync::Arc;

use nvneumann::bie::{AssemblyOptions, OperatorSet};
use nvneumann::fieldexpr::{ScalarField, Support};
use nvneumann::geometry::{build_domain, CurveSpec};
use nvneumann::neumann::{self, check_compatibility, uniqueness_certificate, NeumannProblem};
use nvneumann::oracles::{radial_newtonian, RadialProfile};
use nvneumann::quadrature::Discretization;
use nvneumann::schauder::{
    integrate_i, pair_boundary_dist, pair_e_sharp, standard_battery, BoundaryDist, BoundaryValues, DensityRep,
    SampledRep, TestSamples,
};
use proptest::prelude::*;

fn ellipse(a: f64, b: f64, n: usize) -> (Arc<Discretization>, OperatorSet) {
    let d = build_domain(vec![CurveSpec::ellipse([0.1, -0.1], a, b)]).unwrap();
    let disc = Arc::new(Discretization::new(d, n, 24, 48).unwrap());
    let ops = OperatorSet::assemble(disc.clone(), AssemblyOptions::default()).unwrap();
    (disc, ops)
}

/// `(-Δφ, ∂₁φ, ∂₂φ)` for `φ = a e^{bx} cos(cy) + d x³y`.
fn zero_rep(a: f64, b: f64, c: f64, d: f64) -> DensityRep {
    DensityRep::parse(
        &format!("-({a})*(({b})^2-({c})^2)*exp(({b})*x)*cos(({c})*y) - 6*({d})*x*y"),
        &format!("({a})*({b})*exp(({b})*x)*cos(({c})*y) + 3*({d})*x^2*y"),
        &format!("-({a})*({c})*exp(({b})*x)*sin(({c})*y) + ({d})*x^3"),
        [0.0, 0.0],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn zero_distribution_pairs_to_zero(
        a in -2.0..2.0f64, b in -1.5..1.5f64, c in -1.5..1.5f64, d in -1.0..1.0f64,
        ax in 0.8..1.6f64, seed in 0u64..1000,
    ) {
        let (disc, _) = ellipse(ax, 1.0, 128);
        let rep = SampledRep::new(&zero_rep(a, b, c, d), &disc).unwrap();
        let battery = standard_battery(&disc, 11, seed);
        prop_assert_eq!(battery.len(), 20);
        for v in &battery {
            let s = TestSamples::new(v.as_ref(), &disc, true).unwrap();
            let p = pair_e_sharp(&rep, &s, &disc).unwrap();
            prop_assert!(p.abs() < 1e-6, "{} -> {p}", v.name());
        }
    }

    #[test]
    fn pairing_with_one_is_total_mass(f0 in "[xy1]", f1 in "[xy1]", k in 0.5..3.0f64) {
        let (disc, _) = ellipse(1.3, 0.9, 64);
        let rep = DensityRep::parse(&format!("{k}*{f0}^2"), &format!("{f1}*{k}"), "y*x", [0.0, 0.0]).unwrap();
        let s = SampledRep::new(&rep, &disc).unwrap();
        let one = TestSamples::constant_one(&disc);
        prop_assert_eq!(
            pair_e_sharp(&s, &one, &disc).unwrap().to_bits(),
            integrate_i(&s, &disc, None).unwrap().to_bits()
        );
    }

    #[test]
    fn steklov_range_is_flux_free(
        coeffs in proptest::collection::vec(-1.0..1.0f64, 1..8), shift in -5.0..5.0f64,
        a in 0.7..2.0f64,
    ) {
        let (disc, ops) = ellipse(a, 1.0, 128);
        let v = BoundaryValues::from_fn(&disc.nodes, |_, t, _| {
            coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * t).cos()).sum()
        });
        let sv = ops.steklov(&v).unwrap();
        prop_assert!(sv.integrate(&disc.nodes, None).abs() < 1e-8);
        let shifted = ops.steklov(&v.map(|x| x + shift)).unwrap();
        prop_assert!(shifted.zip_with(&sv, |p, q| p - q).max_abs() < 1e-8);
        // ⟨(0, μ₁), 1⟩ = ∮ μ₁ S_+[1] = 0
        let g = BoundaryDist::new(BoundaryValues::zeros(&disc.nodes.shape()), v).unwrap();
        let one = BoundaryValues::from_fn(&disc.nodes, |_, _, _| 1.0);
        prop_assert!(pair_boundary_dist(&g, &one, &ops).unwrap().abs() < 1e-8);
    }

    #[test]
    fn compatibility_defect_is_affine(c in -3.0..3.0f64, k in 0.2..2.0f64) {
        let d = build_domain(vec![CurveSpec::circle([0.0, 0.0], 1.0)]).unwrap();
        let disc = Arc::new(Discretization::new(d, 64, 16, 32).unwrap());
        let mk = |mu0: f64| {
            let g = BoundaryDist::from_fields(
                &ScalarField::constant(mu0, Support::Boundary),
                &ScalarField::zero(Support::Boundary),
                &disc.nodes,
            ).unwrap();
            let f = DensityRep::parse(&format!("{k}"), "0", "0", [0.0, 0.0]).unwrap();
            check_compatibility(&NeumannProblem::new(disc.clone(), f, g).unwrap()).unwrap().defects[0]
        };
        let want = (c - k / 2.0) * 2.0 * std::f64::consts::PI;
        prop_assert!((mk(c) - want).abs() < 1e-10);
    }

    #[test]
    fn radial_potentials_are_continuous(radius in 0.1..5.0f64, n in 2usize..4) {
        let a = radial_newtonian(n, RadialProfile::Constant, radius, radius).unwrap();
        let b = radial_newtonian(n, RadialProfile::Constant, radius, radius * (1.0 + 1e-12)).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }
}

#[test]
fn shifted_solutions_differ_by_the_shift() {
    let d = build_domain(vec![
        CurveSpec::circle([-2.0, 0.0], 1.0),
        CurveSpec::circle([2.0, 0.0], 0.8),
    ])
    .unwrap();
    let disc = Arc::new(Discretization::new(d, 128, 24, 48).unwrap());
    let ops = OperatorSet::assemble(disc.clone(), AssemblyOptions::default()).unwrap();
    let g = BoundaryDist::from_fields(
        &ScalarField::parse("y", [0.0, 0.0], Support::Boundary).unwrap(),
        &ScalarField::parse("cos(theta)", [0.0, 0.0], Support::Boundary).unwrap(),
        &disc.nodes,
    )
    .unwrap();
    let p = NeumannProblem::new(disc, DensityRep::zero(), g).unwrap().with_order(12);
    let sol = neumann::solve(&p, &ops).unwrap();
    assert!(sol.converged);
    let cert = uniqueness_certificate(&sol.shifted(&[1.5, -0.25]), &sol).unwrap();
    assert!(cert.deviation < 1e-12);
    assert!((cert.constants[0] - 1.5).abs() < 1e-12 && (cert.constants[1] + 0.25).abs() < 1e-12);
}
