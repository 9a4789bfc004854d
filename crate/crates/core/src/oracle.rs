//! Genus-zero plane curve counts from the Witten-Dijkgraaf-Verlinde-Verlinde
//! recursion, used as an independent reference for nodal counts.

use num_bigint::BigInt;
use num_traits::{One, Zero};

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Number of rational degree-`d` plane curves through `3d - 1` general points.
pub fn kontsevich(d: u64) -> BigInt {
    assert!(d >= 1, "degree must be positive");
    let mut n: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for e in 2..=d {
        let mut acc = BigInt::zero();
        for a in 1..e {
            let b = e - a;
            let w = &n[a as usize] * &n[b as usize] * BigInt::from(a * a * b);
            let left = BigInt::from(b) * binomial(3 * e - 4, 3 * a - 2);
            let right = BigInt::from(a) * binomial(3 * e - 4, 3 * a - 1);
            acc += w * (left - right);
        }
        n.push(acc);
    }
    n.swap_remove(d as usize)
}
