#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use confluent_susy::poschl_teller::{pt_chain, pt_psi, pt_psi_derivative, PtParams};
use confluent_susy::schrodinger::{
    cumulative_integral, first_difference, Grid, PotentialSpec, SampledFunction,
};
use confluent_susy::susy_transform::{transform, IntegralConstant};
use confluent_susy::wronskian::{
    anchor_constants, build_tower, build_tower_asymptotic, direct_wronskian, factorized_wronskian,
    max_relative_difference, ChiLadder,
};

fn grid() -> Grid {
    Grid::new(-12.0, 12.0, 2401).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn integral_then_difference_recovers_integrand(a in 0.2_f64..2.0, b in -1.0_f64..1.0, c in -5.0_f64..5.0) {
        let g = Grid::new(-3.0, 3.0, 1201).unwrap();
        let f = SampledFunction::from_fn(g, |x| (a * x).sin() + b * x * x).unwrap();
        let i = cumulative_integral(&f, c);
        prop_assert_eq!(i.values()[0], c);
        let d = first_difference(i.values(), g.spacing());
        for k in 2..g.len() - 2 {
            prop_assert!((d[k] - f.values()[k]).abs() < 1e-4);
        }
    }

    #[test]
    fn recursion_matches_determinant(kappa in 1.05_f64..1.6) {
        let g = grid();
        let chain = pt_chain(&PtParams::new(kappa).unwrap(), 3, &g).unwrap();
        let t = build_tower(&chain, &anchor_constants(&chain, 3).unwrap()).unwrap();
        for k in 1..=3 {
            let d = direct_wronskian(&chain, k).unwrap();
            let r = max_relative_difference(t.level(k).unwrap().values(), d.values());
            prop_assert!(r < 1e-5, "κ {} level {}: {}", kappa, k, r);
        }
    }

    #[test]
    fn ladder_telescopes_and_brackets_grow(kappa in 1.05_f64..1.6, c_a in 0.5_f64..100.0) {
        let g = grid();
        let chain = pt_chain(&PtParams::new(kappa).unwrap(), 0, &g).unwrap();
        let t = build_tower_asymptotic(&chain, &[0.0, 0.0, c_a, 0.0]).unwrap();
        let ladder = ChiLadder::new(&t).unwrap();
        let f = factorized_wronskian(&ladder, 4).unwrap();
        prop_assert!(max_relative_difference(f.values(), t.level(4).unwrap().values()) < 1e-10);
        for k in 1..=4 {
            prop_assert!(t.bracket_is_monotone(k), "level {}", k);
        }
    }

    #[test]
    fn partner_pair_has_unit_wronskian(kappa in 1.05_f64..1.6, c in 0.1_f64..10.0) {
        let g = grid();
        let chain = pt_chain(&PtParams::new(kappa).unwrap(), 0, &g).unwrap();
        let t = build_tower_asymptotic(&chain, &[0.0, c]).unwrap();
        let psi = SampledFunction::from_fn_with_derivative(g, |x| (pt_psi(x), pt_psi_derivative(x))).unwrap();
        let r = transform(&t, &PotentialSpec::PoschlTeller, &psi, -1.0, 2, IntegralConstant::MatchAtAnchor).unwrap();
        // both terms can be huge at an edge; compare against their size
        let (p, dp) = (r.chi_perp.values(), r.chi_perp.derivative_or_fd());
        let (q, dq) = (r.chi.values(), r.chi.derivative_or_fd());
        for i in 0..p.len() {
            let (a, b) = (p[i] * dq[i], dp[i] * q[i]);
            let dev = (a - b - 1.0).abs() / a.abs().max(b.abs()).max(1.0);
            prop_assert!(dev < 1e-4, "sample {} dev {}", i, dev);
        }
        prop_assert!(r.residuals.worst() < 1e-5, "{:?}", r.residuals);
    }
}
