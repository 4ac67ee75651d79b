//! End-to-end checks against the oracles in the parent module. Each returns a
//! one-line summary on success and a description of the first mismatch on
//! failure.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use tropaut::automorphism::{compute_aut, finite_subgroup_of_circle, subgroup_generated, CircleMap, FiniteGroup};
use tropaut::divisor::{apply_automorphism, Divisor};
use tropaut::linear_system::{default_granularity, LinearSystemContext};
use tropaut::metric_graph::{subdivide, Model, Point};
use tropaut::rational::{frac, q, Q};
use tropaut::rational_fn::RationalFunction;
use tropaut::realization::{build_perm_matrix, determinant, int_mat_mul, int_mat_vec, realize, realize_canonical, Realization};
use tropaut::trop_algebra::{TropMatrix, TropScalar};

pub type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: std::result::Result<T, E>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

/// `j = (f_1 - f_{n+1}, ..., f_n - f_{n+1})` at `p`.
fn j_at(r: &Realization, p: &Point) -> Vec<Q> {
    let vals: Vec<Q> = r.functions.iter().map(|f| f.evaluate(p).unwrap().finite().unwrap().clone()).collect();
    let last = vals.last().unwrap().clone();
    vals[..vals.len() - 1].iter().map(|v| v - &last).collect()
}

fn j_range(r: &Realization, step: &Q) -> (Q, Q) {
    let m = r.group.model();
    let pts = subdivide(m, step).unwrap();
    let js: Vec<Q> = pts.points().iter().map(|p| j_at(r, p)[0].clone()).collect();
    (js.iter().min().unwrap().clone(), js.iter().max().unwrap().clone())
}

fn p_images(r: &Realization) -> BTreeSet<String> {
    r.elements.iter().map(|e| format!("{:?}", e.p.to_rows())).collect()
}

/// Interval `[0, 1]`, `D = x`, full automorphism group.
pub fn example_interval_point() -> Check {
    let m = interval();
    let g = ok(compute_aut(&m), "compute_aut")?;
    ensure!(g.order() == 2, "Aut([0,1]) has order {}", g.order());
    let x = Divisor::point(Point::Vertex(0));
    let h = default_granularity(&m, &x, &g.lattice_constraints(), 1);
    let ctx = ok(LinearSystemContext::new(m.clone(), x, &h), "context")?;
    let set = ok(ctx.enumerate_extremals(), "extremals of R(x)")?;
    ensure!(set.len() == 2, "R(x) has {} generators, expected 2", set.len());
    let slope_one = ok(RationalFunction::new(m.clone(), vec![vec![(q(0), q(1)), (q(1), q(0))]]), "f1")?;
    ensure!(set.position(&slope_one).is_some(), "slope-one generator missing");
    ensure!(set.position(&RationalFunction::constant(m.clone(), q(0))).is_some(), "constant generator missing");

    let r = ok(realize(&ctx, &g), "realize")?;
    let z = midpoint(&m, "e");
    ensure!(r.divisor == Divisor::point(z.clone()), "invariant representative is {}", r.divisor.display(&m));
    ensure!(r.n() == 1, "n = {}", r.n());
    let iota = r.elements.iter().find(|e| !r.group.elements()[e.element].is_identity()).unwrap();
    ensure!(iota.a == vec![vec![-1]], "A_iota = {:?}", iota.a);
    let (lo, hi) = j_range(&r, &frac(1, 8));
    ensure!(lo == frac(-1, 2) && hi == frac(1, 2), "image [{lo}, {hi}]");
    let (jx, jy) = (j_at(&r, &Point::Vertex(0))[0].clone(), j_at(&r, &Point::Vertex(1))[0].clone());
    ensure!([jx.clone(), jy.clone()].iter().collect::<BTreeSet<_>>() == [lo.clone(), hi.clone()].iter().collect(), "j(x) = {jx}, j(y) = {jy}");
    let expected: BTreeSet<String> =
        [TropMatrix::identity(2), build_perm_matrix(&[1, 0])].iter().map(|p| format!("{:?}", p.to_rows())).collect();
    ensure!(p_images(&r) == expected, "GL_trop image differs");
    ensure!(r.verified() && r.psi_injective() && r.injectivity.injective, "verification failed");
    Ok(format!("2 generators; D' = z; A_iota = (-1); image [{lo}, {hi}] with j(x) = {jx}, j(y) = {jy}"))
}

/// Interval `[0, 1]`, `E = 2z`.
pub fn example_interval_double_midpoint() -> Check {
    let m = interval();
    let g = ok(compute_aut(&m), "compute_aut")?;
    let z = midpoint(&m, "e");
    let e = Divisor::from_pairs([(z, 2)]);
    let h = default_granularity(&m, &e, &g.lattice_constraints(), 1);
    let ctx = ok(LinearSystemContext::new(m.clone(), e, &h), "context")?;
    let r = ok(realize(&ctx, &g), "realize")?;
    ensure!(r.functions.len() == 3, "{} generators, expected 3", r.functions.len());
    let g1 = ok(RationalFunction::new(m.clone(), vec![vec![(q(0), q(0)), (frac(1, 2), q(0)), (q(1), q(-1))]]), "g1")?;
    let g2 = ok(RationalFunction::new(m.clone(), vec![vec![(q(0), q(-1)), (frac(1, 2), q(0)), (q(1), q(0))]]), "g2")?;
    let g3 = ok(
        RationalFunction::new(m.clone(), vec![vec![(q(0), frac(-1, 2)), (frac(1, 2), q(0)), (q(1), frac(-1, 2))]]),
        "g3",
    )?;
    for (name, f) in [("g1", &g1), ("g2", &g2), ("g3", &g3)] {
        ensure!(r.functions.contains(f), "{name} missing from the generating set");
    }
    ensure!(r.functions[2] == g3, "the iota-fixed generator is not last");
    let iota = r.elements.iter().find(|e| !r.group.elements()[e.element].is_identity()).unwrap();
    ensure!(iota.a == vec![vec![0, 1], vec![1, 0]], "A_iota = {:?}", iota.a);
    let zero = TropScalar::Finite(q(0));
    for i in 0..3 {
        for k in 0..3 {
            let expect_zero = matches!((i, k), (0, 1) | (1, 0) | (2, 2));
            ensure!((*iota.p.get(i, k) == zero) == expect_zero, "P_iota entry ({}, {})", i + 1, k + 1);
            ensure!(expect_zero || *iota.p.get(i, k) == TropScalar::NegInf, "P_iota entry ({}, {})", i + 1, k + 1);
        }
    }
    ensure!(r.injectivity.injective, "psi not injective");
    ensure!(r.psi_injective() && r.verified(), "group homomorphism checks failed");
    Ok("3 generators; A_iota = [[0,1],[1,0]]; P_iota zeros at (1,2),(2,1),(3,3); psi injective".into())
}

/// Circle of length 4, `D = x + x'`, with the rotation, the reflection and both.
pub fn example_circle() -> Check {
    let m = circle4();
    let d = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]);
    let ctx = ok(LinearSystemContext::new(m.clone(), d, &q(1)), "context")?;
    let sigma = CircleMap::Rotate(q(2));
    let iota = CircleMap::Reflect(Point::Vertex(0), Point::Vertex(1));
    let group = |maps: &[CircleMap]| ok(finite_subgroup_of_circle(&m, maps), "circle subgroup");
    let rs = ok(realize(&ctx, &group(std::slice::from_ref(&sigma))?), "realize <sigma>")?;
    let ri = ok(realize(&ctx, &group(std::slice::from_ref(&iota))?), "realize <iota>")?;
    let both = ok(realize(&ctx, &group(&[sigma, iota])?), "realize <sigma, iota>")?;

    // f1 = 1 at x, 0 at p1, identically 1 on the other path; normalized to max 0.
    let f1 = ok(
        RationalFunction::new(m.clone(), vec![vec![(q(0), q(0)), (q(1), q(-1)), (q(2), q(0))], vec![(q(0), q(0)), (q(2), q(0))]]),
        "f1",
    )?;
    ensure!(rs.functions.len() == 2 && rs.functions.contains(&f1), "generators differ from {{f1, f1 o sigma}}");
    let (lo, hi) = j_range(&rs, &frac(1, 2));
    ensure!(lo == q(-1) && hi == q(1), "image [{lo}, {hi}]");
    ensure!(!rs.injectivity.injective, "phi reported injective");
    let (a, b) = rs.injectivity.witness.clone().ok_or("no witness")?;
    ensure!(a != b && j_at(&rs, &a) == j_at(&rs, &b), "witness does not collide");
    for (name, r) in [("<sigma>", &rs), ("<iota>", &ri)] {
        ensure!(r.group.order() == 2, "{name} has order {}", r.group.order());
        ensure!(r.psi_injective() && r.verified(), "Psi on {name} not an injective homomorphism");
    }
    ensure!(p_images(&rs) == p_images(&ri), "<sigma> and <iota> have different images");
    ensure!(both.group.order() == 4, "<sigma, iota> has order {}", both.group.order());
    ensure!(!both.psi_injective() && !both.collisions.is_empty(), "no collision reported on <sigma, iota>");
    ensure!(both.verified(), "homomorphism checks failed on <sigma, iota>");
    let witness = format!("{} ~ {}", m.format_point(&a), m.format_point(&b));
    Ok(format!(
        "image [{lo}, {hi}]; phi not injective ({witness}); <sigma>, <iota> injective with equal images; {} collisions on <sigma, iota>",
        both.collisions.len()
    ))
}

/// Every 2x2 matrix and `samples` random 3x3 matrices over `{-inf, -1, 0, 1}`.
pub fn regularity(samples: usize, seed: u64) -> Check {
    let entries = [TropScalar::NegInf, TropScalar::Finite(q(-1)), TropScalar::Finite(q(0)), TropScalar::Finite(q(1))];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices: Vec<TropMatrix> = (0..4)
        .map(|_| entries.iter().cloned())
        .multi_cartesian_product()
        .map(|v| TropMatrix::new(2, 2, v).unwrap())
        .collect();
    let candidates = [generalized_permutations(2), generalized_permutations(3)];
    for k in 0..samples {
        // Every fourth sample starts from a generalized permutation, with one
        // entry possibly overwritten, so both outcomes are well represented.
        let v = if k % 4 == 0 {
            let mut rows = candidates[1][rng.gen_range(0..candidates[1].len())].to_rows();
            if rng.gen_bool(0.5) {
                rows[rng.gen_range(0..3)][rng.gen_range(0..3)] = entries[rng.gen_range(0..4)].clone();
            }
            rows.concat()
        } else {
            (0..9).map(|_| entries[rng.gen_range(0..4)].clone()).collect()
        };
        matrices.push(TropMatrix::new(3, 3, v).unwrap());
    }
    let mut regular = 0;
    for a in &matrices {
        let claimed = ok(a.is_regular(), "is_regular")?;
        let found = brute_force_inverse(a, &candidates[a.rows() - 2]);
        ensure!(claimed == found.is_some(), "is_regular = {claimed} disagrees with search on {:?}", a.to_rows());
        ensure!(claimed == a.is_generalized_permutation(), "regular but not a generalized permutation: {:?}", a.to_rows());
        if let Some(b) = found {
            ensure!(ok(a.invert(), "invert")? == *b, "invert differs from the found inverse");
            regular += 1;
        }
    }
    Ok(format!("{} matrices, {regular} regular", matrices.len()))
}

/// `deg div f = 0` for random functions on random models.
pub fn conservation(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut breaks = 0;
    for _ in 0..count {
        let m = Arc::new(random_model(&mut rng, 4, 6, 4));
        let f = random_function(&mut rng, &m);
        let d = ok(f.div(), "div")?;
        ensure!(d.degree() == 0, "deg div f = {} for {}", d.degree(), f.to_text());
        breaks += d.support().len();
    }
    Ok(format!("{count} functions, {breaks} support points in total"))
}

/// `equivalent` against the bounded script search and the exact Laplacian
/// solve, and `solve_equivalence` against `D + div f = E`.
pub fn equivalence(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut positive, mut by_search) = (0, 0, 0);
    while done < instances {
        let m = Arc::new(random_model(&mut rng, 4, 5, 3));
        let lattice = subdivide(&m, &q(1)).unwrap();
        let n = lattice.len();
        if n > 12 {
            continue;
        }
        let bound = script_bound(n, 200_000).max(1);
        let deg = rng.gen_range(0..4);
        let d1 = random_effective(&mut rng, &lattice, deg, 3);
        let a = lattice.to_dense(&d1, &m).unwrap();
        let constructed = rng.gen_bool(0.5);
        let b = if constructed {
            let z: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=bound)).collect();
            a.iter().zip(lattice.fire(&z)).map(|(x, y)| x + y).collect()
        } else {
            lattice.to_dense(&random_effective(&mut rng, &lattice, deg, 3), &m).unwrap()
        };
        let d2 = lattice.from_dense(&b);
        let ctx = ok(LinearSystemContext::new(m.clone(), d1.clone(), &q(1)), "context")?;
        let claimed = ok(ctx.equivalent(&d1, &d2), "equivalent")?;
        let script = brute_force_script(&lattice, &a, &b, bound);
        let exact = laplacian_equivalent(&lattice, &a, &b);
        ensure!(!constructed || script.is_some(), "bounded search missed a constructed script");
        ensure!(script.is_none() || claimed, "search found a script but equivalent = false on {}", m.to_text());
        ensure!(claimed == exact, "equivalent = {claimed}, Laplacian solve = {exact}");
        if claimed {
            let f = ok(ctx.solve_equivalence(&d2), "solve_equivalence")?.ok_or("no function for an equivalent pair")?;
            ensure!(&d1 + &ok(f.div(), "div")? == d2, "D + div f != E");
            positive += 1;
        } else {
            ensure!(ok(ctx.solve_equivalence(&d2), "solve_equivalence")?.is_none(), "function for an inequivalent pair");
        }
        by_search += usize::from(script.is_some());
        done += 1;
    }
    Ok(format!("{instances} pairs, {positive} equivalent ({by_search} confirmed by script search)"))
}

/// `is_extremal` against the all-subsets segment enumeration.
pub fn extremality(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut extremal) = (0, 0);
    while done < instances {
        let m = Arc::new(random_model(&mut rng, 3, 4, 2));
        let h = if rng.gen_bool(0.5) { q(1) } else { frac(1, 2) };
        let lattice = subdivide(&m, &h).unwrap();
        let segments: usize = (0..m.num_edges()).map(|e| lattice.edge_vertices(e).len() - 1).sum();
        if segments > 14 {
            continue;
        }
        let (chips, support) = (rng.gen_range(1..=6), rng.gen_range(1..=4));
        let e = random_effective(&mut rng, &lattice, chips, support);
        let ctx = ok(LinearSystemContext::new(m.clone(), e.clone(), &h), "context")?;
        let claimed = ok(ctx.is_extremal(&RationalFunction::constant(m.clone(), q(0))), "is_extremal")?;
        let naive = naive_extremal(&m, &e, &h);
        ensure!(claimed == naive, "is_extremal = {claimed}, naive = {naive} for {} on\n{}", e.display(&m), m.to_text());
        extremal += usize::from(claimed);
        done += 1;
    }
    Ok(format!("{instances} instances, {extremal} extremal"))
}

/// Every lattice member of `|D|` is the tropical combination of the found
/// generators with coefficients `min (f - f_k)`.
pub fn generation(m: &Arc<Model>, d: Divisor, h: &Q) -> Check {
    let ctx = ok(LinearSystemContext::new(m.clone(), d, h), "context")?;
    let set = ok(ctx.enumerate_extremals(), "extremals")?;
    let members = ok(ctx.lattice_members(), "members")?;
    for c in &members {
        let e = ctx.lattice().from_dense(c);
        let f = ok(ctx.solve_equivalence(&e), "solve")?.ok_or("member not equivalent")?;
        ensure!(tropical_combination(&f, &set.functions), "{} is not generated", e.display(m));
    }
    ensure!(set.check.passed(), "internal generation check failed");
    Ok(format!("{} generators, {} members", set.len(), members.len()))
}

/// For each element `σ` fixing `D`, the extremals are closed under `f ↦ f∘σ`
/// up to constants.
pub fn closure(m: &Arc<Model>, d: Divisor, g: &FiniteGroup, h: &Q) -> std::result::Result<usize, String> {
    let ctx = ok(LinearSystemContext::new(m.clone(), d.clone(), h), "context")?;
    let set = ok(ctx.enumerate_extremals(), "extremals")?;
    let mut checked = 0;
    for sigma in g.elements() {
        if ok(apply_automorphism(&d, sigma), "apply")? != d {
            continue;
        }
        for f in &set.functions {
            let image = ok(f.compose(sigma), "compose")?;
            ensure!(set.position(&image).is_some(), "{} o {} is not among the extremals", f.to_text(), sigma.describe());
        }
        checked += 1;
    }
    Ok(checked)
}

/// `(model, divisor, group, granularity)` cases for the closure check.
pub fn closure_corpus() -> Vec<(&'static str, Arc<Model>, Divisor, FiniteGroup, Q)> {
    let mut out = Vec::new();
    let i = interval();
    let gi = compute_aut(&i).unwrap();
    let z = midpoint(&i, "e");
    let ends = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]);
    out.push(("interval z", i.clone(), Divisor::point(z.clone()), gi.clone(), frac(1, 2)));
    out.push(("interval 2z", i.clone(), Divisor::from_pairs([(z.clone(), 2)]), gi.clone(), frac(1, 2)));
    out.push(("interval x+y", i.clone(), ends.clone(), gi.clone(), frac(1, 2)));
    out.push(("interval x+y+2z", i.clone(), &ends + &Divisor::from_pairs([(z, 2)]), gi, frac(1, 2)));

    let c = circle4();
    let dihedral = finite_subgroup_of_circle(
        &c,
        &[CircleMap::Rotate(q(1)), CircleMap::Reflect(Point::Vertex(0), Point::Vertex(1))],
    )
    .unwrap();
    let antipodal = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]);
    let quarters = &antipodal + &Divisor::from_pairs([(midpoint(&c, "p1"), 1), (midpoint(&c, "p2"), 1)]);
    out.push(("circle x+x'", c.clone(), antipodal, dihedral.clone(), q(1)));
    out.push(("circle quarter points", c.clone(), quarters, dihedral.clone(), frac(1, 2)));
    out.push(("circle 2x", c.clone(), Divisor::from_pairs([(Point::Vertex(0), 2)]), dihedral, q(1)));

    let t = theta([1, 1, 1]);
    let gt = compute_aut(&t).unwrap();
    out.push(("theta K", t.clone(), t.canonical_divisor(), gt.clone(), frac(1, 2)));
    out.push(("theta 2u", t.clone(), Divisor::from_pairs([(Point::Vertex(0), 2)]), gt, frac(1, 2)));

    let t2 = theta([1, 1, 2]);
    let gt2 = compute_aut(&t2).unwrap();
    out.push(("theta(1,1,2) K", t2.clone(), t2.canonical_divisor(), gt2, frac(1, 2)));

    let k = k4();
    let gk = compute_aut(&k).unwrap();
    out.push(("K4 K", k.clone(), k.canonical_divisor(), gk.clone(), frac(1, 2)));
    let ab = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]);
    let swap = subgroup_generated(gk.skeleton(), &[gk.elements()[1].clone()]).unwrap();
    out.push(("K4 a+b", k, ab, swap, frac(1, 2)));
    out
}

/// Unit `K4`: order 24 by brute force; canonical realization sound.
pub fn k4_realization() -> Check {
    let m = k4();
    let brute = simple_graph_automorphisms(&m);
    let g = ok(compute_aut(&m), "compute_aut")?;
    ensure!(brute == 24 && g.order() == 24, "brute force {brute}, compute_aut {}", g.order());
    let r = ok(realize_canonical(&m, 1), "realize_canonical")?;
    ensure!(r.group.order() == 24, "realized group has order {}", r.group.order());
    ensure!(p_images(&r).len() == 24, "{} distinct permutation matrices", p_images(&r).len());
    let table = r.group.table();
    let mut pairs = 0;
    for (i, ei) in r.elements.iter().enumerate() {
        ensure!(determinant(&ei.a).abs() == 1, "det A = {}", determinant(&ei.a));
        ensure!(ei.p.is_permutation_matrix() && ok(ei.p.is_regular(), "regular")?, "P is not a permutation matrix");
        for (j, ej) in r.elements.iter().enumerate() {
            let ij = &r.elements[table[i][j]];
            ensure!(r.group.elements()[table[i][j]] == r.group.elements()[i].compose(&r.group.elements()[j]), "table");
            ensure!(ij.a == int_mat_mul(&ei.a, &ej.a), "A not multiplicative at ({i}, {j})");
            ensure!(ij.p == ok(ei.p.mul(&ej.p), "mul")?, "P not multiplicative at ({i}, {j})");
            pairs += 1;
        }
    }
    let lattice = subdivide(&m, &r.h).unwrap();
    let mut points = 0;
    for e in &r.elements {
        let sigma = &r.group.elements()[e.element];
        for p in lattice.points() {
            let raw = |x: &Point| -> Vec<TropScalar> { r.functions.iter().map(|f| f.evaluate(x).unwrap()).collect() };
            let sp = sigma.act(p);
            ensure!(raw(&sp) == ok(e.p.apply(&raw(p)), "apply")?, "P commutation fails at {}", m.format_point(p));
            ensure!(j_at(&r, &sp) == int_mat_vec(&e.a, &j_at(&r, p)), "A commutation fails at {}", m.format_point(p));
            points += 1;
        }
    }
    ensure!(r.commutation_failures.is_empty() && r.verified(), "internal verification failed");
    ensure!(r.injectivity.injective && r.generation.passed(), "canonical map not injective or not generated");
    Ok(format!("order 24; n = {}; {pairs} pairs; {points} commutation checks at h = {}", r.n(), r.h))
}
