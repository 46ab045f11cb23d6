use ellsigma::curve::CurvePoint;
use ellsigma::theta::sigma;
use ellsigma::{CurveParams, Jet, JetShape, LatticeWithForm, ThetaFunction};
use num_complex::Complex64;
use proptest::prelude::*;

const SHAPE: JetShape = JetShape { nvars: 2, cap: 3 };

fn monomials() -> Vec<[u8; 2]> {
    let mut out = Vec::new();
    for i in 0..=3u8 {
        for j in 0..=(3 - i) {
            out.push([i, j]);
        }
    }
    out
}

fn jet(constant: bool) -> impl Strategy<Value = Jet> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 10).prop_map(move |cs| {
        let mons = monomials();
        let terms: Vec<(&[u8], Complex64)> = mons
            .iter()
            .zip(&cs)
            .filter(|(m, _)| constant || m.iter().any(|&e| e > 0))
            .map(|(m, &(re, im))| (&m[..], Complex64::new(re, im)))
            .collect();
        Jet::from_terms(SHAPE, &terms)
    })
}

fn spin_member(d: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-8i64..=8, d).prop_map(|mut m| {
        if m.iter().sum::<i64>() % 2 != 0 {
            m[0] += 1;
        }
        m
    })
}

proptest! {
    #[test]
    fn jet_ring_axioms(a in jet(true), b in jet(true), c in jet(true)) {
        let lhs = &(&a * &b) * &c;
        let rhs = &a * &(&b * &c);
        prop_assert!(lhs.rel_diff(&rhs) < 1e-12);
        let dist = &a * &(&b + &c);
        prop_assert!(dist.rel_diff(&(&(&a * &b) + &(&a * &c))) < 1e-12);
        prop_assert!((&a * &b).rel_diff(&(&b * &a)) < 1e-14);
    }

    #[test]
    fn jet_inverse(a in jet(true)) {
        let u = a.add_scalar(Complex64::new(3.0, 0.0));
        let inv = u.invert(1e-12).unwrap();
        prop_assert!((&u * &inv).rel_diff(&Jet::one(SHAPE)) < 1e-12);
    }

    #[test]
    fn jet_exp_is_a_homomorphism_on_nilpotents(a in jet(false), b in jet(false)) {
        let lhs = (&a + &b).exp();
        let rhs = &a.exp() * &b.exp();
        prop_assert!(lhs.rel_diff(&rhs) < 1e-12);
    }

    #[test]
    fn spin_form_identities(d in 1usize..=4, seed in any::<u64>(), n in 1i64..=6) {
        let l = LatticeWithForm::spin(d).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let a = l.random_member(&mut rng, 8);
        let b = l.random_member(&mut rng, 8);
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(l.phi(&sum).unwrap(), l.phi(&a).unwrap() + l.pairing(&a, &b).unwrap() + l.phi(&b).unwrap());
        let na: Vec<i64> = a.iter().map(|x| n * x).collect();
        prop_assert_eq!(l.phi(&na).unwrap(), n * n * l.phi(&a).unwrap());
        let w = l.random_weyl(&mut rng);
        prop_assert_eq!(l.phi(&w.apply_i64(&a)).unwrap(), l.phi(&a).unwrap());
    }

    #[test]
    fn phi_mod_ignores_the_lift(m in spin_member(3), delta in spin_member(3), n in 1u64..=6) {
        let l = LatticeWithForm::spin(3).unwrap();
        let shifted: Vec<i64> = m.iter().zip(&delta).map(|(a, b)| a + n as i64 * b).collect();
        prop_assert_eq!(l.phi_mod(&shifted, n).unwrap(), l.phi_mod(&m, n).unwrap());
    }

    #[test]
    fn spin_phi_is_half_integral_off_the_lattice(m in prop::collection::vec(-8i64..=8, 1..5)) {
        let l = LatticeWithForm::spin(m.len()).unwrap();
        let even = m.iter().sum::<i64>() % 2 == 0;
        prop_assert_eq!(l.is_member(&m), even);
        prop_assert_eq!(l.twice_phi(&m) % 2 == 0, even);
    }

    #[test]
    fn torsion_points_form_a_group(s1 in -20i64..20, t1 in -20i64..20, s2 in -20i64..20, t2 in -20i64..20, n in 1i64..=12) {
        let a = CurvePoint::from_fractions(s1, t1, n).unwrap();
        let b = CurvePoint::from_fractions(s2, t2, n).unwrap();
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert!(a.scale(n).is_zero());
        prop_assert_eq!(n as u64 % a.order(), 0);
        let back: CurvePoint = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn weil_pairing_is_a_root_of_unity(s in 0i64..12, t in 0i64..12, n in 1i64..=12, ds in -3i64..=3, dt in -3i64..=3) {
        let p = CurveParams::square();
        let a = CurvePoint::from_fractions(s, t, n).unwrap();
        let w = ellsigma::lift(&a, 0, 0, &p).weil(&p);
        let w2 = ellsigma::lift(&a, ds, dt, &p).weil(&p);
        let wn = (0..a.order()).fold(Complex64::new(1.0, 0.0), |acc, _| acc * w);
        prop_assert!((wn - 1.0).norm() < 1e-12);
        prop_assert!((w - w2).norm() < 1e-12);
    }

    #[test]
    fn sigma_is_odd_and_quasi_periodic(re in -3.0..3.0f64, im in -3.0..3.0f64, tre in -0.5..0.5f64, tim in 0.7..1.6f64) {
        let p = CurveParams::new(Complex64::new(tre, tim)).unwrap();
        let z = Complex64::new(re, im);
        let s = sigma(z, &p);
        prop_assume!(s.norm() > 1e-6);
        prop_assert!((sigma(-z, &p) + s).norm() <= 1e-9 * s.norm());
        // σ(z + 2πi) = −σ(z)
        let moved = sigma(z + p.lattice_point(1, 0), &p);
        prop_assert!((moved + s).norm() <= 1e-9 * s.norm());
    }

    #[test]
    fn theta_descriptors_round_trip(d in 1usize..=3, k in 1u32..=3, extra in 1usize..=2) {
        let th = ThetaFunction::product(vec![
            ThetaFunction::power(ThetaFunction::sigma_d(d).unwrap(), k),
            ThetaFunction::sigma_d(extra).unwrap(),
        ]);
        let back = ThetaFunction::parse(&th.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), th.to_string());
        prop_assert_eq!(back.rank(), d + extra);
    }
}
