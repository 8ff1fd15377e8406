//! Integer factorization for desk-scale inputs.
//!
//! Trial division strips small primes; what remains is split with
//! Pollard-Brent. Primes themselves must fit in a `u64`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::ArithError;

const TRIAL_LIMIT: u64 = 1 << 16;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn big_is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    // n is odd, composite and not a perfect power of a small prime.
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let m: u64 = 64;
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if big_is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let root = n.sqrt();
    if &root * &root == n {
        split_into(root.clone(), out);
        split_into(root, out);
        return;
    }
    let d = pollard_brent(&n);
    let rest = &n / &d;
    split_into(d, out);
    split_into(rest, out);
}

/// Factor a positive integer into `(prime, exponent)` pairs, sorted by prime.
pub fn factorize(n: &BigUint) -> Result<Vec<(u64, u32)>, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Zero);
    }
    let mut rest = n.clone();
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let big_p = BigUint::from(p);
        if &big_p * &big_p > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&big_p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let mut big = Vec::new();
        split_into(rest, &mut big);
        for f in big {
            let q = f.to_u64().ok_or_else(|| ArithError::PrimeTooLarge(f.to_string()))?;
            match out.iter_mut().find(|(p, _)| *p == q) {
                Some(entry) => entry.1 += 1,
                None => out.push((q, 1)),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn small_numbers_match_brute_force() {
        for n in 1u64..3000 {
            assert_eq!(factorize(&BigUint::from(n)).unwrap(), brute(n), "n = {n}");
        }
    }

    #[test]
    fn splits_products_of_large_primes() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let n = BigUint::from(p) * BigUint::from(q) * BigUint::from(q);
        assert_eq!(factorize(&n).unwrap(), vec![(q, 2), (p, 1)]);
        let r = 18_446_744_073_709_551_557u64; // largest 64-bit prime
        assert!(is_prime_u64(r));
        let n = BigUint::from(r) * BigUint::from(113u32).pow(3);
        assert_eq!(factorize(&n).unwrap(), vec![(113, 3), (r, 1)]);
    }

    #[test]
    fn rejects_primes_beyond_u64() {
        // 2^89 - 1 is a Mersenne prime.
        let n = (BigUint::one() << 89usize) - BigUint::one();
        assert!(matches!(factorize(&n), Err(ArithError::PrimeTooLarge(_))));
    }
}
