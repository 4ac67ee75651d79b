//! Fixtures and independent oracles shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

pub mod checks;

use std::collections::VecDeque;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tropaut::divisor::Divisor;
use tropaut::metric_graph::{subdivide, Lattice, Model, Point};
use tropaut::rational::{frac, q, Q};
use tropaut::rational_fn::RationalFunction;
use tropaut::trop_algebra::{TropMatrix, TropScalar};

pub fn interval() -> Arc<Model> {
    Arc::new(Model::from_spec(&["x", "y"], &[("e", "x", "y", q(1))]).unwrap())
}

/// Circle of length 4 with `x` and its antipode `xp` as vertices.
pub fn circle4() -> Arc<Model> {
    Arc::new(Model::from_spec(&["x", "xp"], &[("p1", "x", "xp", q(2)), ("p2", "x", "xp", q(2))]).unwrap())
}

pub fn theta(lengths: [i64; 3]) -> Arc<Model> {
    Arc::new(
        Model::from_spec(
            &["u", "v"],
            &[("a", "u", "v", q(lengths[0])), ("b", "u", "v", q(lengths[1])), ("c", "u", "v", q(lengths[2]))],
        )
        .unwrap(),
    )
}

pub fn k4() -> Arc<Model> {
    let vs = ["a", "b", "c", "d"];
    let names: Vec<String> = vs.iter().tuple_combinations().map(|(a, b)| format!("{a}{b}")).collect();
    let edges: Vec<(&str, &str, &str, Q)> = vs
        .iter()
        .tuple_combinations()
        .zip(&names)
        .map(|((a, b), n)| (n.as_str(), *a, *b, q(1)))
        .collect();
    Arc::new(Model::from_spec(&vs, &edges).unwrap())
}

pub fn midpoint(m: &Model, edge: &str) -> Point {
    let e = m.edge_index(edge).unwrap();
    m.point_on_edge(e, m.edge(e).length.clone() / q(2)).unwrap()
}

/// Connected multigraph with up to `max_v` vertices and `max_e` edges of
/// integer length in `1..=max_len`; loops and parallel edges allowed.
pub fn random_model(rng: &mut ChaCha8Rng, max_v: usize, max_e: usize, max_len: i64) -> Model {
    let nv = rng.gen_range(1..=max_v);
    let names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let mut ends = Vec::new();
    for v in 1..nv {
        ends.push((rng.gen_range(0..v), v));
    }
    let ne = rng.gen_range(ends.len().max(1)..=max_e.max(ends.len()).max(1));
    while ends.len() < ne {
        ends.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
    }
    let edge_names: Vec<String> = (0..ends.len()).map(|i| format!("e{i}")).collect();
    let vrefs: Vec<&str> = names.iter().map(String::as_str).collect();
    let edges: Vec<(&str, &str, &str, Q)> = ends
        .iter()
        .zip(&edge_names)
        .map(|(&(a, b), n)| (n.as_str(), vrefs[a], vrefs[b], q(rng.gen_range(1..=max_len))))
        .collect();
    Model::from_spec(&vrefs, &edges).unwrap()
}

/// Random piecewise Z-affine function: random values at vertices, and on
/// each edge a random chain of integer-slope pieces with rational breakpoints
/// that meets the value at the far end.
pub fn random_function(rng: &mut ChaCha8Rng, m: &Arc<Model>) -> RationalFunction {
    let vals: Vec<Q> = (0..m.num_vertices()).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
    let pieces = m
        .edges()
        .iter()
        .map(|e| {
            let len = e.length.clone();
            let target = vals[e.ends[1]].clone();
            let mut pts = vec![(Q::zero(), vals[e.ends[0]].clone())];
            let mut t = Q::zero();
            let mut v = vals[e.ends[0]].clone();
            for _ in 0..rng.gen_range(0..3) {
                let step = &len * frac(rng.gen_range(1..=3), 8);
                if &t + &step >= &len * frac(3, 4) {
                    break;
                }
                t += &step;
                v += &step * q(rng.gen_range(-3..=3));
                pts.push((t.clone(), v.clone()));
            }
            // Two closing pieces with slopes `a > target slope > b` meet at
            // an interior point `x` of the remaining span.
            let rem = &len - &t;
            let needed = (&target - &v) / &rem;
            let a = needed.floor() + q(1 + rng.gen_range(0..2));
            let b = needed.ceil() - q(1 + rng.gen_range(0..2));
            let x = &rem * (&needed - &b) / (&a - &b);
            pts.push((&t + &x, &v + &a * &x));
            debug_assert_eq!(&v + &a * &x + &b * (&rem - &x), target);
            pts.push((len, target));
            pts
        })
        .collect();
    RationalFunction::new(m.clone(), pieces).unwrap()
}

/// Effective divisor with `total` chips spread over at most `max_support`
/// random lattice points.
pub fn random_effective(rng: &mut ChaCha8Rng, lattice: &Lattice, total: i64, max_support: usize) -> Divisor {
    let support: Vec<usize> = (0..max_support).map(|_| rng.gen_range(0..lattice.len())).collect();
    let mut d = Divisor::zero();
    for _ in 0..total {
        let i = support[rng.gen_range(0..support.len())];
        d.add_chips(lattice.point(i).clone(), 1);
    }
    d
}

/// Exact test for `b - a ∈ image of the lattice Laplacian over Z`, by
/// rational Gaussian elimination with the potential at vertex 0 fixed.
pub fn laplacian_equivalent(lattice: &Lattice, a: &[i64], b: &[i64]) -> bool {
    let n = lattice.len();
    if a.iter().sum::<i64>() != b.iter().sum::<i64>() {
        return false;
    }
    // fire(z)[i] = sum_{j ~ i} (z_j - z_i); unknowns z_1..z_{n-1}.
    let mut rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row = vec![Q::zero(); n];
            for &j in lattice.neighbors(i) {
                row[j] += Q::one();
                row[i] -= Q::one();
            }
            row[0] = Q::from_integer((b[i] - a[i]).into());
            row
        })
        .collect();
    // Column 0 now holds the right-hand side.
    let mut r = 0;
    for c in 1..n {
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[0].is_zero()) {
        return false;
    }
    // The kernel is the constants, so with z_0 fixed the solution is unique.
    rows[..r].iter().all(|row| row[0].is_integer())
}

/// Firing script `z` with `z[0] = 0`, entries in `[-bound, bound]`, and
/// `a + fire(z) = b`, by exhaustive search.
pub fn brute_force_script(lattice: &Lattice, a: &[i64], b: &[i64], bound: i64) -> Option<Vec<i64>> {
    let n = lattice.len();
    let mut z = vec![-bound; n];
    z[0] = 0;
    loop {
        let fired = lattice.fire(&z);
        if a.iter().zip(&fired).zip(b).all(|((x, f), y)| x + f == *y) {
            return Some(z);
        }
        let mut i = 1;
        loop {
            if i == n {
                return None;
            }
            if z[i] < bound {
                z[i] += 1;
                break;
            }
            z[i] = -bound;
            i += 1;
        }
    }
}

/// Largest bound up to 8 whose search space `(2B+1)^(n-1)` stays within `cap`.
pub fn script_bound(n: usize, cap: u64) -> i64 {
    let mut b = 0i64;
    while b < 8 && ((2 * (b + 1) + 1) as u64).checked_pow((n - 1) as u32).is_some_and(|s| s <= cap) {
        b += 1;
    }
    b
}

/// Extremality of `f` with `E = D + div f` by the criterion "no two proper
/// closed subgraphs that can fire cover the graph", enumerating every set of
/// lattice segments. Points of `supp E` must be lattice points.
pub fn naive_extremal(m: &Model, e: &Divisor, h: &Q) -> bool {
    let lattice = subdivide(m, h).unwrap();
    let mut segs = Vec::new();
    for k in 0..m.num_edges() {
        for w in lattice.edge_vertices(k).windows(2) {
            segs.push((w[0], w[1]));
        }
    }
    let s = segs.len();
    assert!(s <= 20, "too many segments for the naive oracle");
    let chips: Vec<i64> = (0..lattice.len()).map(|i| e.coefficient(lattice.point(i))).collect();
    let full = (1u32 << s) - 1;
    let firable: Vec<u32> = (1..full)
        .filter(|&mask| {
            let mut inside = vec![false; lattice.len()];
            let mut out = vec![0i64; lattice.len()];
            for (k, &(a, b)) in segs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    inside[a] = true;
                    inside[b] = true;
                } else {
                    out[a] += 1;
                    out[b] += 1;
                }
            }
            (0..lattice.len()).all(|i| !inside[i] || out[i] <= chips[i])
        })
        .collect();
    !firable.iter().any(|&x| firable.iter().any(|&y| x | y == full))
}

/// Generalized permutation matrices of size `n` with finite entries in
/// `{-1, 0, 1}`.
pub fn generalized_permutations(n: usize) -> Vec<TropMatrix> {
    let mut out = Vec::new();
    for perm in (0..n).permutations(n) {
        for vals in (0..n).map(|_| [-1i64, 0, 1]).multi_cartesian_product() {
            let mut rows = vec![vec![TropScalar::NegInf; n]; n];
            for (i, (&j, &v)) in perm.iter().zip(&vals).enumerate() {
                rows[i][j] = TropScalar::Finite(q(v));
            }
            out.push(TropMatrix::from_rows(rows).unwrap());
        }
    }
    out
}

/// Some `B` among `candidates` with `A ⊙ B = B ⊙ A = I`.
pub fn brute_force_inverse<'a>(a: &TropMatrix, candidates: &'a [TropMatrix]) -> Option<&'a TropMatrix> {
    let id = TropMatrix::identity(a.rows());
    candidates.iter().find(|b| a.mul(b).unwrap() == id && b.mul(a).unwrap() == id)
}

/// Number of vertex permutations of a simple graph preserving adjacency and
/// edge lengths.
pub fn simple_graph_automorphisms(m: &Model) -> usize {
    let n = m.num_vertices();
    let length = |a: usize, b: usize| -> Option<Q> {
        m.edges()
            .iter()
            .find(|e| (e.ends[0] == a && e.ends[1] == b) || (e.ends[0] == b && e.ends[1] == a))
            .map(|e| e.length.clone())
    };
    (0..n)
        .permutations(n)
        .filter(|p| (0..n).tuple_combinations().all(|(a, b)| length(a, b) == length(p[a], p[b])))
        .count()
}

/// Graph distances between lattice points in units of `h`.
pub fn lattice_distances(lattice: &Lattice) -> Vec<Vec<usize>> {
    let n = lattice.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in lattice.neighbors(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

/// `f = ⊕_k (c_k ⊙ f_k)` with `c_k = min (f - f_k)`, as canonical forms.
pub fn tropical_combination(f: &RationalFunction, gens: &[RationalFunction]) -> bool {
    let mut acc = RationalFunction::bottom(f.model().clone());
    for g in gens {
        let c = f.min_difference(g).unwrap();
        acc = acc.trop_sum(&g.scalar_shift(&TropScalar::Finite(c))).unwrap();
    }
    acc == *f
}
