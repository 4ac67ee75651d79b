//! Extremality through pairs of firing subgraphs.
//!
//! With `E = D + div(f)` effective, `f` fails to be extremal exactly when two
//! proper subgraphs that can both fire on `E` cover the graph, and only
//! subgraphs with boundary inside `supp(E)` need to be considered. Such a
//! subgraph is a union of closures of components of `Γ \ supp(E)`, possibly
//! with isolated support points added. Isolated points only add boundary
//! conditions and cover nothing new, so the search runs over masks of
//! closures alone.

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::metric_graph::{ClosureDecomposition, Model};

/// Largest number of closures searched exhaustively.
pub const MAX_CLOSURES: usize = 26;

/// `firable[mask]` for every mask of closures.
pub fn firable_masks(m: &Model, e: &Divisor) -> Result<(ClosureDecomposition, Vec<bool>)> {
    let support = e.support();
    let dec = ClosureDecomposition::new(m, &support);
    let k = dec.closures.len();
    if k > MAX_CLOSURES {
        return Err(Error::SearchTooLarge(k));
    }
    let dirs: Vec<(i64, Vec<u64>)> = dec
        .points
        .iter()
        .zip(&dec.dir_components)
        .map(|(p, comps)| (e.coefficient(p), comps.iter().map(|&c| 1u64 << c).collect()))
        .collect();
    let full = 1usize << k;
    let firable = (0..full)
        .map(|mask| {
            let mask = mask as u64;
            dirs.iter().all(|(coeff, bits)| {
                let inside = bits.iter().filter(|&&b| mask & b != 0).count();
                inside == 0 || (bits.len() - inside) as i64 <= *coeff
            })
        })
        .collect();
    Ok((dec, firable))
}

/// True when no two firable proper unions of closures cover the graph.
pub fn extremal_for(m: &Model, e: &Divisor) -> Result<bool> {
    let (dec, firable) = firable_masks(m, e)?;
    let k = dec.closures.len();
    let full = (1usize << k) - 1;
    // up[x]: some firable proper mask contains x.
    let mut up: Vec<bool> = (0..=full).map(|x| x != full && firable[x]).collect();
    for bit in 0..k {
        for x in (0..=full).rev() {
            if x & (1 << bit) == 0 && up[x | (1 << bit)] {
                up[x] = true;
            }
        }
    }
    Ok(!(0..full).any(|m1| firable[m1] && up[full ^ m1]))
}

/// Witness pair of masks when the function is not extremal.
pub fn covering_pair(m: &Model, e: &Divisor) -> Result<Option<(u64, u64)>> {
    let (dec, firable) = firable_masks(m, e)?;
    let full = (1usize << dec.closures.len()) - 1;
    for m1 in 0..full {
        if !firable[m1] {
            continue;
        }
        let need = full ^ m1;
        let mut m2 = full;
        // Walk the supersets of `need` below `full`.
        loop {
            m2 = (m2 - 1) & full;
            let cand = m2 | need;
            if cand != full && firable[cand] {
                return Ok(Some((m1 as u64, cand as u64)));
            }
            if m2 == 0 {
                break;
            }
        }
    }
    Ok(None)
}
