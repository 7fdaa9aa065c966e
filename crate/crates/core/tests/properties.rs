use std::sync::OnceLock;

use num_complex::Complex;
use proptest::prelude::*;

use nls_core::classifier::classify;
use nls_core::functionals::{
    boost, coercivity_constant, energy, gn_quotient, gn_sharp_constant, grad_l2_sq, integrals, mass, momentum,
    Equation, ModelParams,
};
use nls_core::groundstate::{solve_ground_state, GroundStateOptions, GroundStateSolution, Guess, Which};
use nls_core::propagator::{evolve, evolve_with, StepperConfig};
use nls_core::spectral::{make_grid, ComplexField, Direction, FourierMultiplier, GridSpec};
use nls_core::symmetries::{apply_symmetry, SymmetryElement};
use nls_core::virial::{virial_derivatives, VirialWeight};

#[derive(Debug, Clone, Copy)]
struct Bump {
    amp: f64,
    width: f64,
    center: [f64; 2],
    xi: [f64; 2],
    phase: f64,
}

fn bump() -> impl Strategy<Value = Bump> {
    (0.2..1.5f64, 0.7..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -1.5..1.5f64, -1.5..1.5f64, 0.0..6.3f64).prop_map(
        |(amp, width, cx, cy, kx, ky, phase)| Bump {
            amp,
            width,
            center: [cx, cy],
            xi: [kx, ky],
            phase,
        },
    )
}

fn sample(b: &Bump, g: &GridSpec<f64>) -> ComplexField<f64> {
    ComplexField::from_fn(g, |x: [f64; 2]| {
        let y = [x[0] - b.center[0], x[1] - b.center[1]];
        let r2 = y[0] * y[0] + y[1] * y[1];
        Complex::from_polar(b.amp * (-r2 / (2.0 * b.width * b.width)).exp(), b.phase + b.xi[0] * y[0] + b.xi[1] * y[1])
    })
}

fn grid(d: usize) -> GridSpec<f64> {
    if d == 1 {
        make_grid(1, 256, 16.0).unwrap()
    } else {
        make_grid(2, 64, 12.0).unwrap()
    }
}

fn model(d: usize, eq: Equation) -> ModelParams<f64> {
    ModelParams::new(d, if d == 1 { 7.0 } else { 4.0 }, 1.0, eq).unwrap()
}

fn e1_ground_state() -> &'static GroundStateSolution<f64> {
    static GS: OnceLock<GroundStateSolution<f64>> = OnceLock::new();
    GS.get_or_init(|| {
        let opts = GroundStateOptions {
            cross_check: false,
            ..Default::default()
        };
        solve_ground_state(&model(1, Equation::E1), Which::Double, &Guess::default(), &opts).unwrap()
    })
}

fn mc_mass(d: usize) -> f64 {
    static M: OnceLock<[f64; 2]> = OnceLock::new();
    M.get_or_init(|| {
        let opts = GroundStateOptions {
            cross_check: false,
            ..Default::default()
        };
        [1, 2].map(|d| {
            solve_ground_state(&model(d, Equation::E2), Which::MassCritical, &Guess::default(), &opts)
                .unwrap()
                .mass
        })
    })[d - 1]
}

fn rel_l2(a: &ComplexField<f64>, b: &ComplexField<f64>) -> f64 {
    (a.sub(b).unwrap().l2_norm_sq() / b.l2_norm_sq()).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_and_round_trip(d in 1usize..=2, values in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4096)) {
        let g = grid(d);
        let f = ComplexField::from_fn(&g, {
            let mut it = values.iter().cycle();
            move |_| { let (a, b) = it.next().unwrap(); Complex::new(*a, *b) }
        });
        let fh = f.transform(Direction::Forward);
        let norm = |v: &ComplexField<f64>| v.values().iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((norm(&fh) - norm(&f)).abs() <= 1e-12 * norm(&f));
        prop_assert!(rel_l2(&fh.transform(Direction::Inverse), &f) <= 1e-12);
    }

    #[test]
    fn multiplier_composition(d in 1usize..=2, b in bump(), t in -1.0..1.0f64, s in 0.1..2.0f64) {
        let g = grid(d);
        let f = sample(&b, &g);
        let m1 = FourierMultiplier::free_flow(&g, t);
        let m2 = FourierMultiplier::japanese_bracket(&g, s);
        let twice = m2.apply(&m1.apply(&f).unwrap()).unwrap();
        let once = m1.compose(&m2).unwrap().apply(&f).unwrap();
        prop_assert!(rel_l2(&twice, &once) <= 1e-12);
    }

    #[test]
    fn action_identity(d in 1usize..=2, b in bump(), omega in 0.1..4.0f64, eq in prop_oneof![Just(Equation::E1), Just(Equation::E2)]) {
        let mp = model(d, eq).with_omega(omega);
        let i = integrals(&sample(&b, &grid(d)), &mp);
        let (s, k, h) = (mp.action_from(&i), mp.k_from(&i), mp.h_from(&i));
        prop_assert!((h - (s - k / 2.0)).abs() <= 1e-12 * (s.abs() + k.abs() + h.abs()));
    }

    #[test]
    fn boost_shifts_k_and_keeps_norms(d in 1usize..=2, b in bump(), m in -6i64..6, n in -6i64..6) {
        let g = grid(d);
        let mp = model(d, Equation::E1);
        let f = sample(&b, &g);
        let step = std::f64::consts::PI / g.half_width();
        let xi = [m as f64 * step, if d == 2 { n as f64 * step } else { 0.0 }];
        let fb = boost(&f, xi);
        let p = momentum(&f);
        let shift = (xi[0] * xi[0] + xi[1] * xi[1]) * mass(&f) + 2.0 * (0..d).map(|a| xi[a] * p[a]).sum::<f64>();
        let k = |u: &ComplexField<f64>| mp.k_from(&integrals(u, &mp));
        prop_assert!((k(&fb) - k(&f) - shift).abs() <= 1e-8);
        prop_assert!((mass(&fb) - mass(&f)).abs() <= 1e-12 * mass(&f));
        for q in [3.0, 5.0, 8.0] {
            prop_assert!((fb.lq_power(q) - f.lq_power(q)).abs() <= 1e-12 * f.lq_power(q));
        }
    }

    #[test]
    fn coercivity_on_nonnegative_k(d in 1usize..=2, b in bump()) {
        let mp = model(d, Equation::E1);
        let f = sample(&b, &grid(d));
        let i = integrals(&f, &mp);
        prop_assume!(mp.k_from(&i) >= 0.0);
        let e = energy(&f, &mp);
        prop_assert!(e > 0.0);
        prop_assert!(e >= coercivity_constant(&mp) * (i.grad_sq + i.lmc) * (1.0 - 1e-12));
    }

    #[test]
    fn sharp_gagliardo_nirenberg(d in 1usize..=2, b in bump(), c in 0.1..10.0f64) {
        let f = sample(&b, &grid(d));
        let j = gn_quotient(&f).unwrap();
        prop_assert!(j <= gn_sharp_constant(d, mc_mass(d)) * (1.0 + 1e-6));
        prop_assert!((gn_quotient(&f.scale(c)).unwrap() - j).abs() <= 1e-12 * j);
    }

    #[test]
    fn symmetry_elements_are_isometries(
        d in 1usize..=2,
        b in bump(),
        theta in -3.0..3.0f64,
        h in 0.7..1.5f64,
        t0 in -0.5..0.5f64,
        x0 in (-3.0..3.0f64, -3.0..3.0f64),
        xi in (-1.0..1.0f64, -1.0..1.0f64),
    ) {
        let g = if d == 1 { make_grid(1, 512, 32.0).unwrap() } else { make_grid(2, 128, 24.0).unwrap() };
        let f = sample(&Bump { center: [0.0, 0.0], ..b }, &g);
        let el = SymmetryElement { theta, h, t0, x0: [x0.0, x0.1], xi: [xi.0, xi.1] };
        let u = apply_symmetry(&f, &el).unwrap();
        prop_assert!((mass(&u) - mass(&f)).abs() <= 1e-10 * mass(&f));
    }

    #[test]
    fn virial_remainder_bounded_by_exterior(d in 1usize..=2, b in bump(), radius in 1.0..4.0f64) {
        let g = grid(d);
        let mp = model(d, Equation::E1);
        let w = VirialWeight::new(&g, radius).unwrap();
        let v = virial_derivatives(&sample(&b, &g), &mp, &w).unwrap();
        let c = w.bound_constant(&mp);
        prop_assert!(v.a_r.abs() <= c * v.exterior + 1e-10 * v.v2.abs().max(1.0));
    }

    #[test]
    fn verdict_invariant_under_translation_and_phase(c in 0.2..1.6f64, shift in -40i64..40, theta in -3.0..3.0f64) {
        let gs = e1_ground_state();
        let mp = model(1, Equation::E1);
        let g = make_grid(1, 1024, 32.0).unwrap();
        let u = gs.field_on(&g).scale(c);
        let moved = u.roll([shift, 0]).map(|z| z * Complex::from_polar(1.0, theta));
        let a = classify(&u, &mp, gs).unwrap();
        let b = classify(&moved, &mp, gs).unwrap();
        prop_assert_eq!(a.set_label, b.set_label);
        prop_assert_eq!(a.prediction, b.prediction);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn mass_conserved_and_flow_reversible(d in 1usize..=2, b in bump(), eq in prop_oneof![Just(Equation::E1), Just(Equation::E2)]) {
        let g = grid(d);
        let mp = model(d, eq);
        let f = sample(&Bump { amp: b.amp.min(0.6), width: b.width.max(1.0), ..b }, &g);
        let cfg = StepperConfig { dt: 1e-3, t_final: 0.5, snapshot_every: 50, ..Default::default() };
        let fwd = evolve(&f, &mp, &cfg).unwrap();
        let m0 = mass(&f);
        for s in &fwd.snapshots {
            prop_assert!((s.mass - m0).abs() <= 1e-10 * m0);
        }
        // Backward flow is conjugation of the forward flow.
        let back = evolve(&fwd.final_field.map(|z| z.conj()), &mp, &cfg).unwrap();
        prop_assert!(rel_l2(&back.final_field.map(|z| z.conj()), &f) <= 1e-6);
    }
}

#[test]
fn label_is_preserved_along_trajectories() {
    let gs = e1_ground_state();
    let mp = model(1, Equation::E1);
    let g = make_grid(1, 2048, 16.0).unwrap();
    for (c, t_final) in [(0.6, 1.0), (1.2, 0.03)] {
        let u0 = gs.field_on(&g).scale(c);
        let label = classify(&u0, &mp, gs).unwrap().set_label;
        assert!(label.is_some());
        let cfg = StepperConfig {
            dt: 1e-4,
            t_final,
            snapshot_every: 50,
            ..Default::default()
        };
        evolve_with(&u0, &mp, &cfg, |u, s| {
            assert_eq!(classify(u, &mp, gs).unwrap().set_label, label, "c = {c}, t = {}", s.t);
        })
        .unwrap();
    }
}

#[test]
fn gradient_norm_is_spectral() {
    let g = make_grid(1, 256, 16.0).unwrap();
    let f = ComplexField::from_real_fn(&g, |x: [f64; 2]| (-x[0] * x[0]).exp());
    // int |d/dx e^{-x^2}|^2 = sqrt(pi/2)
    assert!((grad_l2_sq(&f) - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
}
