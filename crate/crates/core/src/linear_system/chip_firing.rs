//! Chip-firing on the lattice graph: reduction to the q-reduced divisor.

use std::collections::VecDeque;

use crate::metric_graph::Lattice;

/// The q-reduced divisor equivalent to `chips` together with a firing script
/// `z` such that `reduced = chips + lattice.fire(z)`.
pub fn reduce(lattice: &Lattice, chips: &[i64], q: usize) -> (Vec<i64>, Vec<i64>) {
    let n = lattice.len();
    let mut e = chips.to_vec();
    let mut z = vec![0i64; n];
    let fire_set = |inside: &[bool], k: i64, e: &mut Vec<i64>, z: &mut Vec<i64>| {
        for v in 0..n {
            if inside[v] {
                z[v] += k;
                for &w in lattice.neighbors(v) {
                    if !inside[w] {
                        e[v] -= k;
                        e[w] += k;
                    }
                }
            }
        }
    };

    // Debts away from q are paid level by level, firing the ball one step
    // closer to q as often as the worst debtor on the current level needs.
    let mut dist = vec![usize::MAX; n];
    dist[q] = 0;
    let mut queue = VecDeque::from([q]);
    while let Some(v) = queue.pop_front() {
        for &w in lattice.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let max_dist = dist.iter().copied().max().unwrap_or(0);
    for d in (1..=max_dist).rev() {
        let ball: Vec<bool> = dist.iter().map(|&x| x < d).collect();
        let k = (0..n)
            .filter(|&v| dist[v] == d && e[v] < 0)
            .map(|v| {
                let links = lattice.neighbors(v).iter().filter(|&&w| ball[w]).count() as i64;
                (-e[v] + links - 1) / links
            })
            .max()
            .unwrap_or(0);
        if k > 0 {
            fire_set(&ball, k, &mut e, &mut z);
        }
    }

    // Dhar burning: fire the unburnt set as long as it is non-empty.
    loop {
        let mut burnt = vec![false; n];
        burnt[q] = true;
        let mut fire_count = vec![0i64; n];
        let mut queue = VecDeque::from([q]);
        while let Some(v) = queue.pop_front() {
            for &w in lattice.neighbors(v) {
                if !burnt[w] {
                    fire_count[w] += 1;
                    if fire_count[w] > e[w] {
                        burnt[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let unburnt: Vec<bool> = burnt.iter().map(|b| !b).collect();
        if !unburnt.iter().any(|&u| u) {
            break;
        }
        let k = (0..n)
            .filter(|&v| unburnt[v])
            .filter_map(|v| {
                let out = lattice.neighbors(v).iter().filter(|&&w| burnt[w]).count() as i64;
                (out > 0).then(|| e[v] / out)
            })
            .min()
            .expect("the unburnt set borders the burnt set");
        fire_set(&unburnt, k.max(1), &mut e, &mut z);
    }
    (e, z)
}
