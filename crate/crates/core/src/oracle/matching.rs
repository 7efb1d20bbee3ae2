//! Bottleneck matching between two eigenvalue lists.

use num_complex::Complex;

use crate::error::{Error, Result};

fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
            owner[v] = Some(u);
            return true;
        }
    }
    false
}

fn perfect_within(d: &[Vec<f64>], t: f64) -> bool {
    let n = d.len();
    let adj: Vec<Vec<usize>> = d
        .iter()
        .map(|row| (0..n).filter(|&j| row[j] <= t).collect())
        .collect();
    let mut owner = vec![None; n];
    (0..n).all(|u| augment(u, &adj, &mut vec![false; n], &mut owner))
}

/// Smallest `t` such that some bijection pairs every element of `a` with one of `b` within `t`.
pub fn matched_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "cannot match {} values against {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let d: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let mut cand: Vec<f64> = d.iter().flatten().copied().collect();
    cand.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut lo, mut hi) = (0, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_within(&d, cand[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(cand[lo])
}
