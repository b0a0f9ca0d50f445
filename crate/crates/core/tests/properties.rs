use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sandpile_core::algebra::*;
use sandpile_core::geometry::*;
use sandpile_core::harmonic::*;
use sandpile_core::monomorphism::*;
use sandpile_core::sandpile::*;
use sandpile_core::tiling::*;

fn matrix_strategy() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-30i64..=30, r * c).prop_map(move |v| IntMatrix::from_i64(r, c, &v))
    })
}

fn gcd_all(xs: impl IntoIterator<Item = BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |a, b| a.gcd(&b))
}

/// Lattice points of the closed hull of up to six points in a 7x7 box, if
/// they form a connected convex domain.
fn convex_domain(points: &[(i64, i64)]) -> Option<Domain> {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return None;
    }
    let set: Vec<(i64, i64)> =
        (0..7).flat_map(|x| (0..7).map(move |y| (x, y))).filter(|&p| in_closed_hull(&hull, p)).collect();
    if set.len() > 30 {
        return None;
    }
    Domain::from_points(set).ok().filter(|d| d.is_convex_domain())
}

fn points_strategy() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..7, 0i64..7), 3..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(a in matrix_strategy()) {
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s.clone());
        prop_assert!(det_exact(&snf.u).abs().is_one());
        prop_assert!(det_exact(&snf.v).abs().is_one());
        let d = snf.diagonal();
        for r in 0..snf.s.rows() {
            for c in 0..snf.s.cols() {
                if r != c {
                    prop_assert!(snf.s[(r, c)].is_zero());
                }
            }
        }
        for w in d.windows(2) {
            prop_assert!(w[0].sign() != num_bigint::Sign::Minus);
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
        // First determinantal divisor is the gcd of all entries.
        let g = gcd_all((0..a.rows()).flat_map(|r| a.row(r).to_vec()));
        prop_assert_eq!(d[0].abs(), g);
        if a.is_square() {
            let prod: BigInt = d.iter().product();
            prop_assert_eq!(prod.abs(), det_exact(&a).abs());
        }
    }

    #[test]
    fn stabilization_is_abelian_and_conservative(
        w in 1i64..=6, h in 1i64..=6, seed in prop::collection::vec(0i64..=40, 36)
    ) {
        let d = Domain::rectangle((0, 0), w, h).unwrap();
        let c = ChipConfig(seed[..d.len()].to_vec());
        let a = stabilize(&d, &c).unwrap();
        let b = stabilize_stack_order(&d, &c).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.config.is_stable());
        let odo: Vec<i64> = a.odometer.iter().map(|&k| k as i64).collect();
        let lap = d.laplacian_i64(&odo);
        for i in 0..d.len() {
            prop_assert_eq!(a.config.0[i], c.0[i] + lap[i]);
        }
    }

    #[test]
    fn group_addition_commutes_and_keeps_recurrence(
        w in 1i64..=4, h in 1i64..=4,
        x in prop::collection::vec(0i64..=7, 16), y in prop::collection::vec(0i64..=7, 16)
    ) {
        let d = Domain::rectangle((0, 0), w, h).unwrap();
        let a = canonical_rep(&d, &ChipConfig(x[..d.len()].to_vec())).unwrap();
        let b = canonical_rep(&d, &ChipConfig(y[..d.len()].to_vec())).unwrap();
        let ab = group_add(&d, &a, &b).unwrap();
        prop_assert!(is_recurrent(&d, ab.rep()));
        prop_assert_eq!(&ab, &group_add(&d, &b, &a).unwrap());
        prop_assert_eq!(&group_add(&d, &a, &identity(&d)).unwrap(), &a);
    }

    #[test]
    fn potential_determinant_matches_laplacian(points in points_strategy()) {
        if let Some(d) = convex_domain(&points) {
            let basis = basis_algorithm(&d).unwrap();
            prop_assert_eq!(basis.len(), d.boundary().len());
            let pm = potential_matrix(&basis).unwrap();
            prop_assert_eq!(pm.det().abs(), det_exact(&d.reduced_laplacian()).abs());
            for f in basis.functions() {
                let lap = d.laplacian_int(f);
                for i in d.interior() {
                    prop_assert!(lap[i].is_zero());
                }
            }
        }
    }

    #[test]
    fn toppling_invariants_invert(points in points_strategy(), chips in prop::collection::vec(0i64..=6, 30)) {
        if let Some(d) = convex_domain(&points) {
            let inv = ToppingInvariants::for_domain(&d).unwrap();
            let x: Vec<BigInt> = chips[..d.len()].iter().map(|&c| BigInt::from(c)).collect();
            prop_assert!(sigma_roundtrip(&inv, &x).unwrap());
            let zero = canonical_rep_big(&d, &x).unwrap() == identity(&d);
            let s = inv.sigma(&x).unwrap();
            prop_assert_eq!(zero, s.iter().all(|q| q.is_zero()));
        }
    }

    #[test]
    fn found_tilings_satisfy_structural_properties(a in 1i64..=3, b in 1i64..=3, tri in any::<bool>()) {
        let (template, target) = if tri {
            (MPolyform::parse_generator("triangle:2").unwrap(), MPolyform::rectangle(2 * a, 2 * b).unwrap())
        } else {
            (MPolyform::square(2).unwrap(), MPolyform::rectangle(2 * a, 2 * b).unwrap())
        };
        let ts = search_tilings(&template, &target, 6).unwrap();
        for t in &ts {
            prop_assert!(t.validate().valid);
            prop_assert!(check_boundary_balance(t).unwrap());
            prop_assert!(separation_holds(t).unwrap());
            prop_assert!(internal_boundary_on_shared_edges(t).unwrap());
            let m = mu_matrix(t).unwrap();
            prop_assert!(well_defined(&m).unwrap());
        }
    }
}

/// Every pair of classes, for square sources with one and four vertices.
#[test]
fn tiling_maps_are_additive_on_whole_groups() {
    for (src, dst) in [("square:2", "square:4"), ("square:3", "square:6")] {
        let a = MPolyform::parse_generator(src).unwrap();
        let b = MPolyform::parse_generator(dst).unwrap();
        let ts = search_tilings(&a, &b, 4).unwrap();
        assert!(!ts.is_empty(), "{src} does not tile {dst}");
        for t in &ts {
            let m = mu_matrix(t).unwrap();
            let group: Vec<GroupElement> = enumerate_recurrent(m.source())
                .into_iter()
                .map(|c| GroupElement::from_recurrent(m.source(), c).unwrap())
                .collect();
            let images: Vec<GroupElement> = group.iter().map(|g| m.apply(g).unwrap()).collect();
            for (i, x) in group.iter().enumerate() {
                for (j, y) in group.iter().enumerate() {
                    let k = group.iter().position(|g| *g == group_add(m.source(), x, y).unwrap()).unwrap();
                    assert_eq!(images[k], group_add(m.target(), &images[i], &images[j]).unwrap());
                }
            }
            let zero = identity(m.target());
            assert_eq!(images.iter().filter(|g| **g == zero).count(), 1, "{src} -> {dst} is not injective");
        }
    }
}

#[test]
fn extended_polyform_is_not_tiled() {
    let p = MPolyform::square(2).unwrap();
    let mut tris: Vec<TriangleId> = p.triangles().iter().copied().collect();
    tris.push(TriangleId::new(2, 0, Side::W));
    let hat = MPolyform::new(tris).unwrap();
    assert_eq!(domain_of(&hat).unwrap(), domain_of(&p).unwrap());
    assert!(search_tilings(&p, &hat, usize::MAX).unwrap().is_empty());
    assert!(search_tilings(&hat, &p, usize::MAX).unwrap().is_empty());
}
