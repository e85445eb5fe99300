#![allow(clippy::needless_range_loop)]

use frobsep::symp::{
    delta_psi_exact, delta_psi_quadrature, duplication_check, fs_indicator, gamma, inner_product, inner_product_raw,
    psi_character, sp_value, trivial_multiplicity, DominantWeight, Group, SympError, TermKey, TorusPoint,
    VirtualCharacter, WeylGrid,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for k in 0..n {
        let piv = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        if piv != k {
            m.swap(piv, k);
            d = -d;
        }
        d *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    d
}

/// Weyl's character formula for type C as a quotient of sine determinants.
fn weyl_ratio(w: &DominantWeight, theta: &[f64]) -> f64 {
    let g = theta.len();
    let build = |shift: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
        (0..g).map(|i| theta.iter().map(|t| (shift(i) * t).sin()).collect()).collect()
    };
    let num = build(&|i| (w.part(i) as usize + g - i) as f64);
    let den = build(&|i| (g - i) as f64);
    det(num) / det(den)
}

fn random_angles(rng: &mut ChaCha8Rng, g: usize) -> Vec<f64> {
    (0..g).map(|_| rng.gen_range(0.05..PI - 0.05)).collect()
}

fn sp(g: usize, parts: &[u32]) -> VirtualCharacter {
    VirtualCharacter::irreducible(TermKey {
        lambda: DominantWeight::new(g, parts).unwrap(),
        mu: None,
    })
}

#[test]
fn characters_match_weyl_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in 1..=3 {
        for w in DominantWeight::all_up_to(g, 5) {
            for _ in 0..30 {
                let theta = random_angles(&mut rng, g);
                let want = weyl_ratio(&w, &theta);
                let got = sp_value(&w, &theta);
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{w} at {theta:?}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn characters_at_wall_points_are_finite_and_continuous() {
    // the Weyl quotient is 0/0 here; nearby generic points give the limit
    let w = DominantWeight::new(2, &[2, 1]).unwrap();
    let wall = [0.9, 0.9];
    let near = [0.9 + 1e-6, 0.9 - 1e-6];
    assert!((sp_value(&w, &wall) - weyl_ratio(&w, &near)).abs() < 1e-5);
    assert!((sp_value(&w, &[0.0f64, 0.0]) - 16.0).abs() < 1e-12);
}

#[test]
fn dimensions() {
    let d = |g: usize, parts: &[u32]| DominantWeight::new(g, parts).unwrap().dimension();
    assert_eq!(d(2, &[1]), 4);
    assert_eq!(d(3, &[]), 1);
    assert_eq!(d(2, &[2]), 10);
    assert_eq!(d(2, &[1, 1]), 5);
    // Weyl dimension formula at theta -> 0 agrees with the character at the identity
    for g in 1..=3 {
        for w in DominantWeight::all_up_to(g, 4) {
            let v = sp_value(&w, &vec![0.0; g]);
            assert!((v - w.dimension() as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn orthonormality_up_to_size_three() {
    for g in 1..=2 {
        let weights = DominantWeight::all_up_to(g, 3);
        for a in &weights {
            for b in &weights {
                let (x, y) = (VirtualCharacter::irreducible(TermKey { lambda: a.clone(), mu: None }),
                              VirtualCharacter::irreducible(TermKey { lambda: b.clone(), mu: None }));
                let raw = inner_product_raw(&x, &y, 64).unwrap();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((raw - want).abs() <= 1e-6, "g={g} <{a},{b}> = {raw}");
                let raw128 = inner_product_raw(&x, &y, 128).unwrap();
                assert!((raw - raw128).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn quadrature_normalization_and_standard_moments() {
    let grid = WeylGrid::<f64>::new(1, 64).unwrap();
    assert!((grid.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
    let v = |a: &[f64]| 2.0 * a[0].cos();
    assert!(grid.integrate(v).abs() < 1e-9);
    assert!((grid.integrate(|a| v(a) * v(a)) - 1.0).abs() < 1e-9);
    assert!(matches!(WeylGrid::<f64>::new(1, 4), Err(SympError::OrderTooSmall { .. })));
}

#[test]
fn tensor_square_contains_the_invariant_form() {
    for g in 1..=3 {
        let v = VirtualCharacter::standard(g);
        let vv = v.tensor(&v).unwrap();
        assert_eq!(trivial_multiplicity(&vv, 32).unwrap(), 1);
        assert_eq!(vv.delta(), 1);
        assert_eq!(trivial_multiplicity(&v, 32).unwrap(), 0);
    }
}

#[test]
fn exact_tensor_products_agree_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = sp(2, &[2, 1]).add(&sp(2, &[1]).scale(-3)).unwrap();
    let b = sp(2, &[1, 1]).add(&VirtualCharacter::trivial(Group::single(2))).unwrap();
    let ab = a.tensor(&b).unwrap();
    for _ in 0..20 {
        let t = random_angles(&mut rng, 2);
        let want = a.eval_angles(&t, None) * b.eval_angles(&t, None);
        assert!((ab.eval_angles(&t, None) - want).abs() < 1e-9 * want.abs().max(1.0));
    }
    for (key, c) in ab.terms() {
        let irr = VirtualCharacter::irreducible(key.clone());
        assert_eq!(inner_product(&ab, &irr, 48).unwrap(), c);
    }
}

#[test]
fn delta_psi_is_one_by_both_paths() {
    for (g, g2) in [(1, 1), (1, 2), (2, 2)] {
        let exact = delta_psi_exact(g, g2).unwrap();
        let quad = delta_psi_quadrature(g, g2, 64).unwrap();
        let pairing = trivial_multiplicity(&psi_character(g, g2).unwrap(), 64).unwrap();
        assert_eq!((exact, quad, pairing), (1, 1, 1), "(g, g') = ({g}, {g2})");
    }
}

#[test]
fn psi_values_and_metadata() {
    let psi = psi_character(1, 1).unwrap();
    let id = TorusPoint::<f64>::identity(1, Some(1));
    assert_eq!(psi.eval(&id).unwrap(), 0.0);
    // t = 1, t' = -1
    let p = TorusPoint::product(vec![PI / 3.0], vec![2.0 * PI / 3.0]).unwrap();
    assert!((psi.eval(&p).unwrap() - 1.0).abs() < 1e-12);
    for (g, g2) in [(1, 1), (1, 2), (2, 2)] {
        let m = psi_character(g, g2).unwrap().metadata();
        let bound = 64 * (g * g * g2 * g2) as u64;
        assert!(m.d_chi <= bound, "d = {} > {bound}", m.d_chi);
        assert_eq!(m.w_chi, 2);
        assert_eq!(m.delta, 1);
        assert!((m.t_chi - bound as f64).abs() < 1e-6, "t = {}", m.t_chi);
        assert!(m.t_chi <= m.d_chi as f64 + 1e-9);
    }
}

#[test]
fn odd_degree_in_second_factor_has_no_invariants() {
    let v = VirtualCharacter::standard(1);
    let w = VirtualCharacter::standard(2);
    let ww = w.tensor(&w).unwrap();
    for chi in [v.outer(&w).unwrap(), v.outer(&ww).unwrap(), v.tensor(&v).unwrap().outer(&w).unwrap()] {
        let raw = inner_product_raw(&chi, &VirtualCharacter::trivial(chi.group()), 64).unwrap();
        assert!(raw.abs() < 1e-12, "{chi}: {raw}");
        assert_eq!(chi.delta(), 0);
    }
}

#[test]
fn adams_square_is_evaluation_at_doubled_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in 1..=2 {
        let v = VirtualCharacter::standard(g);
        let chars = [v.clone(), v.tensor(&v).unwrap(), sp(g, &[2])];
        for chi in &chars {
            let a = chi.adams2();
            for _ in 0..100 {
                let t = random_angles(&mut rng, g);
                let doubled: Vec<f64> = t.iter().map(|x| 2.0 * x).collect();
                let err = (a.eval_angles(&t, None) - chi.eval_angles(&doubled, None)).abs();
                assert!(err <= 1e-9, "{chi}: {err}");
            }
        }
        let t = random_angles(&mut rng, 1);
        if g == 1 {
            assert!((v.adams2().eval_angles(&t, None) - 2.0 * (2.0 * t[0]).cos()).abs() < 1e-12);
        }
    }
}

#[test]
fn frobenius_schur_indicators() {
    assert_eq!(fs_indicator(&VirtualCharacter::standard(1), 64).unwrap(), -1);
    assert_eq!(fs_indicator(&VirtualCharacter::standard(2), 64).unwrap(), -1);
    assert_eq!(fs_indicator(&VirtualCharacter::trivial(Group::single(1)), 64).unwrap(), 1);
    assert_eq!(fs_indicator(&sp(1, &[2]), 64).unwrap(), 1);
    assert_eq!(VirtualCharacter::standard(1).adams2().delta(), -1);
    // every irreducible of USp(2g) is self-dual: the indicator is +-1 and
    // agrees with the exact Adams square
    for g in 1..=2 {
        for w in DominantWeight::all_up_to(g, 3) {
            let chi = VirtualCharacter::irreducible(TermKey { lambda: w.clone(), mu: None });
            let fs = fs_indicator(&chi, 64).unwrap();
            assert!(fs == 1 || fs == -1);
            assert_eq!(fs, chi.adams2().delta(), "{w}");
            // symplectic for odd |lambda|, orthogonal for even
            assert_eq!(fs, if w.size() % 2 == 1 { -1 } else { 1 });
        }
    }
}

#[test]
fn maximum_of_irreducibles_is_the_dimension() {
    for (g, parts) in [(1, vec![1]), (1, vec![3]), (2, vec![1]), (2, vec![1, 1]), (2, vec![2, 1])] {
        let chi = sp(g, &parts);
        let m = chi.metadata();
        assert!((m.t_chi - m.d_chi as f64).abs() < 1e-6);
        let b = m.adams2_bounds();
        assert_eq!(b.t_chi, m.d_chi as f64);
        assert_eq!(b.gamma_chi_bound, 2 * m.d_chi);
        assert_eq!(b.w_chi, 2 * m.w_chi);
    }
}

#[test]
fn gamma_duplication() {
    let c = |x: f64| Complex64::new(x, 0.0);
    assert!(duplication_check(c(1.0)).unwrap() <= 1e-10);
    assert!(duplication_check(c(2.5)).unwrap() <= 1e-10);
    assert!(matches!(duplication_check(c(0.0)), Err(SympError::PoleInput(_))));
    // Gamma(5/2) = 3 sqrt(pi) / 4
    let g = gamma(c(2.5)).unwrap();
    assert!((g.re - 0.75 * PI.sqrt()).abs() < 1e-13 && g.im == 0.0);
    assert!((gamma(c(5.0)).unwrap().re - 24.0).abs() < 1e-11);
}

#[test]
fn character_json_schema() {
    let chi = VirtualCharacter::from_json(
        r#"{"g": 1, "g2": 2, "terms": [{"lambda": [2], "mu": [1, 1], "coeff": -3}, {"lambda": [], "coeff": 2}]}"#,
    )
    .unwrap();
    assert_eq!(chi.group(), Group::product(1, 2));
    assert_eq!(chi.delta(), 2);
    assert_eq!(chi.dimension(), -3 * 3 * 5 + 2);
    let json: serde_json::Value = serde_json::from_str(&chi.to_json()).unwrap();
    assert_eq!(json["g2"], 2);
    assert_eq!(json["terms"].as_array().unwrap().len(), 2);
    assert!(json["terms"][0].get("coeff").is_some());
    assert!(VirtualCharacter::from_json(r#"{"g": 0, "terms": []}"#).is_err());
}
