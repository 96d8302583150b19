//! Exact sums of aperiodic autocorrelations through a number-theoretic transform.
//!
//! Gaussian integers are mapped into `Z_p` with `i ↦ ι`, `ι² = -1`. The product
//! `A(z)·A*(z)` carries `φ(R(τ))` at index `n-1+τ` and `φ(R(-τ)) = φ(conj R(τ))`
//! at index `n-1-τ`, which separates real and imaginary parts.

use crate::gauss::GaussInt;

const P: u64 = 2_013_265_921; // 15·2^27 + 1
const G: u64 = 31;
const MAX_LOG: u32 = 27;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

fn iota() -> u64 {
    pow_mod(G, (P - 1) / 4)
}

fn to_mod(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

fn from_mod(x: u64) -> i64 {
    if x > P / 2 {
        x as i64 - P as i64
    } else {
        x as i64
    }
}

fn transform(a: &mut [u32], invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(G, (P - 1) / len as u64);
        if invert {
            w = pow_mod(w, P - 2);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % P;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k] as u64;
                let v = hi[k] as u64 * tw[k] % P;
                lo[k] = if u + v >= P { (u + v - P) as u32 } else { (u + v) as u32 };
                hi[k] = if u >= v { (u - v) as u32 } else { (u + P - v) as u32 };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv = pow_mod(n as u64, P - 2);
        for x in a.iter_mut() {
            *x = (*x as u64 * inv % P) as u32;
        }
    }
}

/// Whether sequences of length `n` fit in the transform size.
pub fn supports(n: usize) -> bool {
    n == 0 || (2 * n - 1).next_power_of_two() <= 1usize << MAX_LOG
}

/// `Σ_l R_{a_l}(τ)` for `τ = 0..n`, exact while every value has modulus below `p/2`.
pub fn sum_autocorrelations(seqs: &[&[GaussInt]], n: usize) -> Vec<GaussInt> {
    if n == 0 {
        return Vec::new();
    }
    assert!(supports(n), "sequence too long for transform");
    let size = (2 * n - 1).next_power_of_two();
    let io = iota();
    let mut acc = vec![0u32; size];
    let mut fa = vec![0u32; size];
    let mut fb = vec![0u32; size];
    for s in seqs {
        if s.is_empty() {
            continue;
        }
        fa.iter_mut().for_each(|x| *x = 0);
        fb.iter_mut().for_each(|x| *x = 0);
        for (k, x) in s.iter().enumerate() {
            fa[k] = ((to_mod(x.re) + to_mod(x.im) * io) % P) as u32;
            // flip-conjugate of the length-n right padding
            fb[n - 1 - k] = ((to_mod(x.re) + to_mod(-x.im) * io) % P) as u32;
        }
        transform(&mut fa, false);
        transform(&mut fb, false);
        for k in 0..size {
            acc[k] = ((acc[k] as u64 + fa[k] as u64 * fb[k] as u64 % P) % P) as u32;
        }
    }
    transform(&mut acc, true);
    let inv2 = pow_mod(2, P - 2);
    let inv_io = pow_mod(io, P - 2);
    (0..n)
        .map(|t| {
            let plus = acc[n - 1 + t] as u64;
            let minus = acc[n - 1 - t] as u64;
            let re = (plus + minus) % P * inv2 % P;
            let im = (plus + P - minus) % P * inv2 % P * inv_io % P;
            GaussInt::new(from_mod(re), from_mod(im))
        })
        .collect()
}

/// Transform size needed to convolve two indicator vectors over `0..=bound`.
pub fn sumset_size(bound: u64) -> Option<usize> {
    let size = (2 * (bound as usize + 1)).next_power_of_two();
    (size <= 1usize << MAX_LOG).then_some(size)
}

fn unpack(w: &[u64], bound: u64, size: usize) -> Vec<u32> {
    let mut v = vec![0u32; size];
    for (k, &word) in w.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            let t = x.trailing_zeros() as usize;
            x &= x - 1;
            let idx = k * 64 + t;
            if idx as u64 <= bound {
                v[idx] = 1;
            }
        }
    }
    v
}

/// Packed indicator of `{x + y ≤ bound}` for packed indicators `a`, `b` over `0..=bound`.
pub fn indicator_sumset(a: &[u64], b: &[u64], bound: u64) -> Vec<u64> {
    let size = sumset_size(bound).expect("bound too large for transform");
    let mut fa = unpack(a, bound, size);
    transform(&mut fa, false);
    if a == b {
        for x in fa.iter_mut() {
            *x = (*x as u64 * *x as u64 % P) as u32;
        }
    } else {
        let mut fb = unpack(b, bound, size);
        transform(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = (*x as u64 * *y as u64 % P) as u32;
        }
    }
    transform(&mut fa, true);
    let mut out = vec![0u64; a.len()];
    for (idx, &c) in fa.iter().enumerate().take(bound as usize + 1) {
        if c != 0 {
            out[idx / 64] |= 1 << (idx % 64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::aperiodic_at;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn iota_squares_to_minus_one() {
        let i = iota();
        assert_eq!(i * i % P, P - 1);
    }

    #[test]
    fn matches_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let count = rng.gen_range(1..5);
            let seqs: Vec<Vec<GaussInt>> = (0..count)
                .map(|_| {
                    let len = rng.gen_range(0..70);
                    (0..len).map(|_| GaussInt::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3))).collect()
                })
                .collect();
            let n = seqs.iter().map(|s| s.len()).max().unwrap();
            let refs: Vec<&[GaussInt]> = seqs.iter().map(|s| s.as_slice()).collect();
            let fast = sum_autocorrelations(&refs, n);
            for t in 0..n {
                let direct: GaussInt = seqs.iter().map(|s| aperiodic_at(s, s, t as i64)).sum();
                assert_eq!(fast[t], direct, "lag {t}");
            }
        }
    }
}
