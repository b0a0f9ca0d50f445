//! Acceptance criteria for the sandpile library, one function per criterion.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sandpile_core::algebra::{det_exact, frac};
use sandpile_core::geometry::*;
use sandpile_core::harmonic::*;
use sandpile_core::monomorphism::*;
use sandpile_core::sandpile::*;
use sandpile_core::tiling::*;

pub type Check = Result<Vec<String>, String>;
pub type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| format!("{x:?}"))
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

pub fn c1_orders() -> Check {
    let five = big(2).pow(18u32) * big(3).pow(5u32) * big(5).pow(2u32) * big(11).pow(2u32) * big(13).pow(2u32);
    let cases = [(1, big(4)), (3, big(100352)), (5, five)];
    let mut notes = Vec::new();
    for (n, want) in cases {
        let d = e(Domain::square(n))?;
        let g = group_order(&d);
        let b = e(order_via_basis(&d))?;
        ensure(g == want, format!("{n}x{n}: group order {g}, expected {want}"))?;
        ensure(b == want, format!("{n}x{n}: basis order {b}, expected {want}"))?;
        notes.push(format!("{n}x{n} = {want}"));
    }
    ensure(big(100352) == big(2).pow(11u32) * big(49), "100352 factorization")?;
    Ok(notes)
}

/// Lattice points of the closed convex hull of a few random points.
fn random_convex_domain(rng: &mut ChaCha8Rng, max_vertices: usize) -> Option<Domain> {
    let k = rng.gen_range(1..=6);
    let pts: Vec<(i64, i64)> = (0..k).map(|_| (rng.gen_range(0..7), rng.gen_range(0..7))).collect();
    let hull = convex_hull(&pts);
    let mut set = Vec::new();
    for x in 0..7 {
        for y in 0..7 {
            let inside = if hull.len() >= 3 {
                in_closed_hull(&hull, (x, y))
            } else {
                pts.contains(&(x, y)) || on_segment(&hull, (x, y))
            };
            if inside {
                set.push((x, y));
            }
        }
    }
    if set.is_empty() || set.len() > max_vertices {
        return None;
    }
    let d = Domain::from_points(set).ok()?;
    d.is_convex_domain().then_some(d)
}

fn on_segment(hull: &[(i64, i64)], p: (i64, i64)) -> bool {
    if hull.len() != 2 {
        return hull.first() == Some(&p);
    }
    let (a, b) = (hull[0], hull[1]);
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    cross == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

pub fn c2_potential_det() -> Check {
    let check = |d: &Domain, label: &str| -> Result<(), String> {
        let basis = e(basis_algorithm(d))?;
        let pm = e(potential_matrix(&basis))?;
        let lhs = pm.det().abs();
        let rhs = det_exact(&d.reduced_laplacian()).abs();
        ensure(lhs == rhs, format!("{label}: |det P| = {lhs}, |det L| = {rhs}"))
    };
    for n in 1..=6 {
        check(&e(Domain::square(n))?, &format!("{n}x{n}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut seen = BTreeSet::new();
    let mut tries = 0;
    while seen.len() < 24 {
        tries += 1;
        ensure(tries < 100_000, "could not sample enough convex domains")?;
        let Some(d) = random_convex_domain(&mut rng, 30) else { continue };
        if !seen.insert(d.vertices().to_vec()) {
            continue;
        }
        check(&d, &format!("{:?}", d.vertices()))?;
    }
    Ok(vec![format!("squares 1..6 and {} random convex domains", seen.len())])
}

pub fn c3_burning_census() -> Check {
    let d = e(Domain::square(2))?;
    let n = d.len();
    let mut rec = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        let c = ChipConfig((0..n).map(|i| ((code >> (2 * i)) & 3) as i64).collect());
        if is_recurrent(&d, &c) {
            rec.push(c);
        }
    }
    let det = det_exact(&d.reduced_laplacian()).abs();
    ensure(BigInt::from(rec.len()) == det, format!("{} recurrent, |det| = {det}", rec.len()))?;
    ensure(rec.len() == 192, format!("{} recurrent, expected 192", rec.len()))?;
    let index = |c: &ChipConfig| rec.iter().position(|r| r == c);
    let m = rec.len();
    let mut table = vec![0usize; m * m];
    for i in 0..m {
        for j in 0..m {
            let s = e(stabilize(&d, &e(rec[i].add(&rec[j]))?))?.config;
            table[i * m + j] = index(&s).ok_or_else(|| format!("{:?} + {:?} not recurrent", rec[i].0, rec[j].0))?;
        }
    }
    let zero = (0..m)
        .find(|&z| (0..m).all(|i| table[z * m + i] == i))
        .ok_or("no neutral element")?;
    ensure(rec[zero] == *identity(&d).rep(), "neutral element differs from identity()")?;
    for i in 0..m {
        ensure((0..m).any(|j| table[i * m + j] == zero), format!("{:?} has no inverse", rec[i].0))?;
        for j in 0..m {
            ensure(table[i * m + j] == table[j * m + i], "not commutative")?;
            for k in 0..m {
                ensure(table[table[i * m + j] * m + k] == table[i * m + table[j * m + k]], "not associative")?;
            }
        }
    }
    Ok(vec!["192 recurrent, full table checked".into()])
}

pub fn c4_toppling_invariants() -> Check {
    let mut notes = Vec::new();
    for n in 1..=2 {
        let d = e(Domain::square(n))?;
        let inv = e(ToppingInvariants::for_domain(&d))?;
        let group = enumerate_recurrent(&d);
        let mut images: Vec<Vec<BigRational>> = Vec::new();
        for x in &group {
            let s = e(inv.sigma(&x.to_big()))?;
            ensure(!images.contains(&s), format!("{n}x{n}: sigma not injective at {:?}", x.0))?;
            images.push(s);
            ensure(e(sigma_roundtrip(&inv, &x.to_big()))?, format!("{n}x{n}: round trip fails at {:?}", x.0))?;
        }
        for (i, x) in group.iter().enumerate() {
            for (j, y) in group.iter().enumerate() {
                let sum: Vec<BigInt> = x.to_big().iter().zip(y.to_big()).map(|(a, b)| a + b).collect();
                let lhs = e(inv.sigma(&sum))?;
                let rhs: Vec<BigRational> = images[i].iter().zip(&images[j]).map(|(a, b)| frac(&(a + b))).collect();
                ensure(lhs == rhs, format!("{n}x{n}: sigma not additive"))?;
            }
        }
        // Kernel: sigma vanishes exactly on the Laplacian lattice.
        let zero_class = identity(&d);
        for (x, s) in group.iter().zip(&images) {
            let trivial = s.iter().all(|q| q.is_zero());
            ensure(trivial == (x == zero_class.rep()), format!("{n}x{n}: kernel condition fails at {:?}", x.0))?;
        }
        for v in 0..d.len() {
            let mut z = vec![0i64; d.len()];
            z[v] = 1;
            let col: Vec<BigInt> = d.laplacian_i64(&z).into_iter().map(BigInt::from).collect();
            ensure(e(inv.sigma(&col))?.iter().all(|q| q.is_zero()), format!("{n}x{n}: Laplacian column not in kernel"))?;
        }
        notes.push(format!("{n}x{n}: {} classes", group.len()));
    }
    Ok(notes)
}

fn triangle_instance() -> Result<(MPolyform, MPolyform), String> {
    Ok((e(MPolyform::parse_generator("triangle:2"))?, e(MPolyform::parse_generator("triangle:4"))?))
}

pub fn c5_injective_maps() -> Check {
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    let check_tiling = |t: &DCTiling| -> Result<Vec<GroupElement>, String> {
        let m = e(mu_matrix(t))?;
        let r = e(verify_monomorphism(&m, 20, 7))?;
        ensure(r.ok(), format!("report not ok: {:?}", r.problems))?;
        ensure(r.injective == Some(true), "injectivity not established")?;
        ensure(r.image_order == r.source_order && r.image_order.is_some(), "image order differs from source order")?;
        e(m.unit_images())
    };
    let (a, b) = triangle_instance()?;
    let ts = e(search_tilings(&a, &b, 100))?;
    ensure(!ts.is_empty(), "no triangle tiling found")?;
    for t in &ts {
        check_tiling(t)?;
    }
    notes.push(format!("triangle: {} tilings injective", ts.len()));
    for w in 2..=5 {
        let p = e(MPolyform::square(w))?;
        let ts = e(search_tilings(&p, &p, 100))?;
        ensure(ts.len() == 8, format!("square:{w}: {} self-tilings", ts.len()))?;
        let mut distinct: Vec<Vec<GroupElement>> = Vec::new();
        for t in &ts {
            let imgs = check_tiling(t)?;
            if !distinct.contains(&imgs) {
                distinct.push(imgs);
            }
        }
        if w > 2 {
            ensure(distinct.len() == 8, format!("square:{w}: {} distinct automorphisms", distinct.len()))?;
        } else {
            let m = e(mu_matrix(&e(DCTiling::identity(&p))?))?;
            let ident = e(m.unit_images())?;
            if distinct.len() != 1 || distinct[0] != ident {
                failures.push(format!(
                    "square:2 self-tilings give {} distinct automorphisms (reflections act as negation on Z/4), expected only the identity",
                    distinct.len()
                ));
            }
        }
        notes.push(format!("square:{w}: {} distinct", distinct.len()));
    }
    if failures.is_empty() {
        Ok(notes)
    } else {
        Err(failures.join("; "))
    }
}

struct Chain {
    name: &'static str,
    specs: [&'static str; 3],
}

fn random_element(d: &Domain, rng: &mut ChaCha8Rng) -> Result<GroupElement, String> {
    e(canonical_rep(d, &ChipConfig((0..d.len()).map(|_| rng.gen_range(0..8)).collect())))
}

pub fn c6_functoriality() -> Check {
    let chains = [
        Chain { name: "triangle", specs: ["triangle:2", "poly:-8,0;8,0;0,8", "poly:-8,0;8,0;8,16"] },
        Chain { name: "centered square", specs: ["square:2", "poly:-8,-8;12,-8;12,12;-8,12", "poly:-48,-48;52,-48;52,52;-48,52"] },
        Chain { name: "corner square", specs: ["square:2", "square:10", "square:50"] },
    ];
    let mut notes = Vec::new();
    let mut square_orders = Vec::new();
    for chain in &chains {
        let p: Vec<MPolyform> = chain.specs.iter().map(|s| e(MPolyform::parse_generator(s))).collect::<Result<_, _>>()?;
        let fixed = [LatticeIsometry::identity()];
        let t1 = e(search_tilings_with(&p[0], &p[1], &fixed, 1))?;
        let t2 = e(search_tilings_with(&p[1], &p[2], &fixed, 1))?;
        ensure(!t1.is_empty() && !t2.is_empty(), format!("{}: missing tiling", chain.name))?;
        let m1 = e(mu_matrix(&t1[0]))?;
        let m2 = e(mu_matrix(&t2[0]))?;
        let composed = e(compose(&m1, &m2))?;
        let direct = e(mu_matrix(&e(compose_tilings(&t1[0], &t2[0]))?))?;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for k in 0..100 {
            let a = random_element(m1.source(), &mut rng)?;
            ensure(
                e(composed.apply(&a))? == e(direct.apply(&a))?,
                format!("{}: sample {k} differs", chain.name),
            )?;
        }
        let r1 = e(verify_monomorphism(&composed, 10, 6))?;
        let r2 = e(verify_monomorphism(&direct, 10, 6))?;
        ensure(r1.ok() && r1.injective == Some(true), format!("{}: composed map not injective: {:?}", chain.name, r1.problems))?;
        ensure(r2.ok() && r2.injective == Some(true), format!("{}: composite tiling map not injective: {:?}", chain.name, r2.problems))?;
        ensure(r1.image_order == r2.image_order, format!("{}: image orders differ", chain.name))?;
        let order = r1.image_order.clone().unwrap();
        if chain.name != "triangle" {
            square_orders.push(order.clone());
        }
        notes.push(format!("{}: image order {order}", chain.name));
    }
    ensure(square_orders[0] == square_orders[1], "centered and corner square chains have different image orders")?;
    Ok(notes)
}

/// Order of `g` by repeated addition.
fn brute_order(d: &Domain, g: &GroupElement) -> Result<u64, String> {
    let zero = identity(d);
    let mut acc = g.clone();
    let mut k = 1;
    while acc != zero {
        acc = e(group_add(d, &acc, g))?;
        k += 1;
        ensure(k < 10_000, "order too large for brute force")?;
    }
    Ok(k)
}

pub fn c7_xy_orders() -> Check {
    let mut notes = Vec::new();
    for n in [3i64, 5, 7, 9] {
        let d = e(Domain::centered_square(n))?;
        let want = ((n + 1) / 2) as u64;
        let sub = e(cyclic_subgroup_from_harmonic(&e(h_xy(n))?, &d, want))?;
        ensure(sub.order == BigInt::from(want), format!("N={n}: order {}", sub.order))?;
        ensure(brute_order(&d, &sub.generator)? == want, format!("N={n}: brute-force order differs"))?;
        notes.push(format!("N={n}: {want}"));
    }
    Ok(notes)
}

pub fn c8_pi_orders() -> Check {
    let mut notes = Vec::new();
    for n in [2i64, 4, 6] {
        let d = e(Domain::square(n))?;
        let h = e(h_pi(n))?;
        let want = (n + 1) as u64;
        for w in d.outer_boundary() {
            let v = h.get(w).ok_or_else(|| format!("N={n}: {w:?} not covered"))?;
            ensure(
                v.is_integer() && (v.to_integer() % BigInt::from(want)).is_zero(),
                format!("N={n}: value {v} at {w:?} not divisible by {want}"),
            )?;
        }
        let sub = e(cyclic_subgroup_from_harmonic(&h, &d, want))?;
        ensure(sub.order == BigInt::from(want), format!("N={n}: order {}", sub.order))?;
        ensure(brute_order(&d, &sub.generator)? == want, format!("N={n}: brute-force order differs"))?;
        notes.push(format!("N={n}: {want}"));
    }
    let hp = e(verify_hplus_identity(21))?;
    ensure(hp.holds, format!("H+ identity: {:?}", hp.counterexample))?;
    notes.push(format!("H+ identity {} points, epsilon {} points", hp.identity_checks, hp.epsilon_checks));
    Ok(notes)
}

pub fn c9_div4() -> Check {
    let mut notes = Vec::new();
    for n in 1..=4 {
        let c = e(verify_div4_subgroup(n))?;
        ensure(c.holds(), format!("N={n}: order {} expected {}", c.order, c.expected))?;
        ensure(c.order == big(4).pow(n as u32), format!("N={n}: order {}", c.order))?;
        notes.push(format!("N={n}: {}", c.order));
    }
    let whole = group_order(&e(Domain::square(1))?);
    ensure(whole == big(4), "1x1 group is not Z/4")?;
    Ok(notes)
}

pub fn c10_dynamics() -> Check {
    let d = e(Domain::centered_square(5))?;
    let h = e(h_xy(5))?;
    let values = e(h.restrict_int(&d))?;
    let sub = e(cyclic_subgroup_from_harmonic(&h, &d, 3))?;
    let elements = e(sub.elements(&d))?;
    ensure(elements.len() == 3, "subgroup does not have three elements")?;
    let mut frames = Vec::new();
    for k in 0..3 {
        let t = BigRational::new(BigInt::from(k), BigInt::from(3));
        ensure(dynamics_is_exact(&d, &values, &t), format!("floor not exact at t={t}"))?;
        frames.push(e(harmonic_dynamics(&d, &values, &t))?);
    }
    for f in &frames {
        ensure(elements.contains(f), "frame outside the subgroup")?;
    }
    for i in 0..3 {
        for j in 0..i {
            ensure(frames[i] != frames[j], "frames repeat")?;
        }
    }
    ensure(frames[0] == identity(&d), "t=0 is not the identity")?;
    let one = BigRational::one();
    ensure(e(harmonic_dynamics(&d, &values, &(&one + BigRational::new(BigInt::from(1), BigInt::from(3)))))? == frames[1], "not periodic")?;
    Ok(vec!["D(0), D(1/3), D(2/3) = order-3 subgroup".into()])
}

pub fn c11_engine() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for run in 0..200 {
        let (w, h) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let d = e(Domain::rectangle((0, 0), w, h))?;
        let hi = rng.gen_range(1..=24);
        let c = ChipConfig((0..d.len()).map(|_| rng.gen_range(0..=hi)).collect());
        let a = e(stabilize(&d, &c))?;
        let b = e(stabilize_stack_order(&d, &c))?;
        ensure(a == b, format!("run {run}: schedulers disagree on {w}x{h}"))?;
        ensure(a.config.is_stable(), format!("run {run}: result not stable"))?;
        let odo: Vec<i64> = a.odometer.iter().map(|&k| k as i64).collect();
        let lap = d.laplacian_i64(&odo);
        for i in 0..d.len() {
            ensure(a.config.0[i] == c.0[i] + lap[i], format!("run {run}: conservation fails at vertex {i}"))?;
        }
    }
    Ok(vec!["200 runs".into()])
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        ("group orders of the 1x1, 3x3 and 5x5 squares", c1_orders),
        ("potential matrix determinant equals Laplacian determinant", c2_potential_det),
        ("burning-test census on 2x2 and full group table", c3_burning_census),
        ("toppling invariants on 1x1 and 2x2", c4_toppling_invariants),
        ("tiling-induced maps are injective; square automorphisms", c5_injective_maps),
        ("composition of tiling maps", c6_functoriality),
        ("xy generators have order (N+1)/2", c7_xy_orders),
        ("pi generators have order N+1; H+ identity", c8_pi_orders),
        ("div-4 subgroup has order 4^N", c9_div4),
        ("harmonic dynamics of xy on the centered 5x5 square", c10_dynamics),
        ("stabilization is abelian and conserves chips", c11_engine),
    ]
}
