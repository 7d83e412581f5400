use equivariant_forms::moebius::{
    cayley, cayley_inverse, commute_iff_same_fixed_set, reduce_to_fundamental_domain, ClassTag, ExtendedPoint,
    MoebiusTransform,
};
use equivariant_forms::zerofinder::classify_points;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn entry() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
}

fn transform() -> impl Strategy<Value = MoebiusTransform> {
    (entry(), entry(), entry(), entry())
        .prop_filter("well conditioned", |(a, b, cc, d)| (a * d - b * cc).norm() > 0.1)
        .prop_map(|(a, b, cc, d)| MoebiusTransform::new(a, b, cc, d).unwrap())
}

fn upper_point() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, 0.05..4.0f64).prop_map(|(x, y)| c(x, y))
}

/// A word in S, T^{±1} as an integer matrix.
fn modular_word() -> impl Strategy<Value = [i64; 4]> {
    prop::collection::vec(0..3u8, 0..10).prop_map(|letters| {
        let mut m = [1i64, 0, 0, 1];
        for l in letters {
            let g = match l {
                0 => [0, -1, 1, 0],
                1 => [1, 1, 0, 1],
                _ => [1, -1, 0, 1],
            };
            m = [
                g[0] * m[0] + g[1] * m[2],
                g[0] * m[1] + g[1] * m[3],
                g[2] * m[0] + g[3] * m[2],
                g[2] * m[1] + g[3] * m[3],
            ];
        }
        m
    })
}

fn mobius_raw(m: [Complex64; 4], z: Complex64) -> Complex64 {
    (m[0] * z + m[1]) / (m[2] * z + m[3])
}

fn close(p: ExtendedPoint, q: ExtendedPoint, tol: f64) -> bool {
    p.chordal_distance(q) < tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalization_preserves_the_map(a in entry(), b in entry(), cc in entry(), d in entry(), z in upper_point()) {
        prop_assume!((a * d - b * cc).norm() > 0.1);
        let g = MoebiusTransform::new(a, b, cc, d).unwrap();
        let [na, nb, nc, nd] = g.entries();
        prop_assert!((na * nd - nb * nc - 1.0).norm() < 1e-12);
        let expected: ExtendedPoint = mobius_raw([a, b, cc, d], z).into();
        prop_assert!(close(g.apply_finite(z), expected, 1e-10));
    }

    #[test]
    fn trace_invariant_matches_raw_entries(a in entry(), b in entry(), cc in entry(), d in entry()) {
        let det = a * d - b * cc;
        prop_assume!(det.norm() > 0.1);
        let g = MoebiusTransform::new(a, b, cc, d).unwrap();
        let oracle = (a + d) * (a + d) / det;
        prop_assert!((g.trace_invariant() - oracle).norm() < 1e-10 * oracle.norm().max(1.0));
    }

    #[test]
    fn composition_is_function_composition(g in transform(), h in transform(), z in upper_point()) {
        let lhs = g.compose(&h).apply_finite(z);
        let rhs = g.apply(h.apply_finite(z));
        prop_assert!(close(lhs, rhs, 1e-8));
        prop_assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn classification_is_conjugation_invariant(g in transform(), h in transform()) {
        let conj = h.compose(&g).compose(&h.inverse());
        let (a, b) = (g.trace_invariant(), conj.trace_invariant());
        prop_assert!((a - b).norm() < 1e-8 * a.norm().max(1.0));
        // away from the class boundaries the tag is stable too
        let t = g.trace_invariant();
        if t.im.abs() > 1e-3 || (t.re - 4.0).abs() > 1e-3 && t.re.abs() > 1e-3 {
            prop_assert_eq!(g.classify().tag, conj.classify().tag);
        }
    }

    #[test]
    fn fixed_points_are_fixed(g in transform()) {
        prop_assume!(!g.is_identity());
        for fp in g.fixed_points().unwrap() {
            prop_assert!(close(g.apply(fp.point), fp.point, 1e-7), "{} -> {}", fp.point, g.apply(fp.point));
        }
    }

    #[test]
    fn cayley_round_trip(z in upper_point()) {
        let w = cayley(ExtendedPoint::Finite(z));
        prop_assert!(w.finite().unwrap().norm() < 1.0);
        prop_assert!(close(cayley_inverse(w), ExtendedPoint::Finite(z), 1e-12));
    }

    #[test]
    fn reduction_lands_in_the_domain(z in upper_point()) {
        let r = reduce_to_fundamental_domain(z).unwrap();
        let w = r.z_reduced;
        prop_assert!(w.re.abs() <= 0.5 + 1e-12 && w.norm() >= 1.0 - 1e-12, "{w}");
        let via_word = r.word.transform().apply_finite(z).finite().unwrap();
        prop_assert!((via_word - w).norm() < 1e-9 * w.norm().max(1.0));
        let m = r.word.integer_matrix();
        prop_assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
    }

    #[test]
    fn reduction_is_constant_on_orbits(z in upper_point(), m in modular_word()) {
        let g = MoebiusTransform::real(m[0] as f64, m[1] as f64, m[2] as f64, m[3] as f64).unwrap();
        let gz = g.apply_finite(z).finite().unwrap();
        prop_assume!(gz.im > 1e-3);
        let a = reduce_to_fundamental_domain(z).unwrap().z_reduced;
        let b = reduce_to_fundamental_domain(gz).unwrap().z_reduced;
        let p = classify_points(&[a, b], 1e-7).unwrap();
        prop_assert_eq!(p.orbit_count, 1, "{} vs {}", a, b);
    }

    #[test]
    fn translations_commute_with_translations(s in -5.0..5.0f64, t in -5.0..5.0f64) {
        prop_assume!(s.abs() > 1e-3 && t.abs() > 1e-3);
        let r = commute_iff_same_fixed_set(&MoebiusTransform::translation(s), &MoebiusTransform::translation(t)).unwrap();
        prop_assert_eq!(r, (true, true));
    }
}

#[test]
fn normal_form_traces() {
    // m_k = diag(√k, 1/√k) has Tr² = k + 1/k + 2
    for k in [0.25, 2.0, 9.0, 100.0] {
        let g = MoebiusTransform::scaling(c(k, 0.0)).unwrap();
        assert!((g.trace_invariant() - (k + 1.0 / k + 2.0)).norm() < 1e-12);
        assert_eq!(g.classify().tag, ClassTag::Hyperbolic);
    }
    assert_eq!(MoebiusTransform::t().classify().tag, ClassTag::Parabolic);
    assert_eq!(MoebiusTransform::s().classify().tag, ClassTag::Elliptic);
    assert_eq!(MoebiusTransform::p().classify().tag, ClassTag::Elliptic);
    let lox = MoebiusTransform::scaling(c(2.0, 1.0)).unwrap();
    assert_eq!(lox.classify().tag, ClassTag::StrictlyLoxodromic);
}

#[test]
fn iterates_converge_to_the_attracting_point() {
    let g = MoebiusTransform::real(2.0, 1.0, 1.0, 1.0).unwrap();
    let target = g.attracting_point().unwrap();
    for z in [c(0.3, 0.2), c(-4.0, 1.0), c(10.0, 0.01)] {
        let limit = g.iterate(ExtendedPoint::Finite(z), 60);
        assert!(close(limit, target, 1e-10), "{limit} vs {target}");
    }
    // z -> (2z+1)/(z+1) attracts to (1 + √5)/2
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(close(target, ExtendedPoint::Finite(c(phi, 0.0)), 1e-12));
}

#[test]
fn parabolic_iterates_tend_to_the_fixed_point() {
    let g = MoebiusTransform::real(1.0, 0.0, 1.0, 1.0).unwrap();
    let z = ExtendedPoint::Finite(c(0.4, 0.9));
    assert!(
        g.iterate(z, 1_000_000)
            .chordal_distance(ExtendedPoint::Finite(c(0.0, 0.0)))
            < 1e-5
    );
}
