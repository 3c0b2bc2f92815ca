//! Deterministic reductions. Sums are chunked at a fixed size, chunk sums are
//! computed independently (possibly in parallel) and then folded pairwise in
//! index order, so the result is bit-identical regardless of thread count.

use crate::field::Scalar;
use rayon::prelude::*;

/// Fixed chunk length of the reduction tree.
pub const CHUNK: usize = 4096;

/// Pairwise fold in fixed order.
pub fn pairwise_fold<T: Scalar>(mut v: Vec<T>) -> T {
    if v.is_empty() {
        return T::zero();
    }
    while v.len() > 1 {
        let half = v.len() / 2;
        for i in 0..half {
            v[i] = v[2 * i] + v[2 * i + 1];
        }
        if v.len() % 2 == 1 {
            let last = v[v.len() - 1];
            v[half] = last;
            v.truncate(half + 1);
        } else {
            v.truncate(half);
        }
    }
    v[0]
}

/// Deterministic sum of `f(i)` over `0..len`.
pub fn indexed_sum<T, F>(len: usize, f: F) -> T
where
    T: Scalar,
    F: Fn(usize) -> T + Sync,
{
    if len == 0 {
        return T::zero();
    }
    let nchunks = len.div_ceil(CHUNK);
    let partials: Vec<T> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            let mut acc = T::zero();
            for i in lo..hi {
                acc = acc + f(i);
            }
            acc
        })
        .collect();
    pairwise_fold(partials)
}

/// Sequential variant for small sums where spawning is not worth it.
pub fn indexed_sum_seq<T, F>(len: usize, f: F) -> T
where
    T: Scalar,
    F: Fn(usize) -> T,
{
    let nchunks = len.div_ceil(CHUNK);
    let mut partials = Vec::with_capacity(nchunks);
    for c in 0..nchunks {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(len);
        let mut acc = T::zero();
        for i in lo..hi {
            acc = acc + f(i);
        }
        partials.push(acc);
    }
    pairwise_fold(partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e-3;
        let a: f64 = indexed_sum(100_000, f);
        let b: f64 = indexed_sum_seq(100_000, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
