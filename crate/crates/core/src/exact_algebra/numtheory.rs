//! Small integer helpers: factorization, divisors, Möbius, totient, Kronecker symbols.

use num_integer::Integer;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        a.lcm(&b)
    }
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

/// Least nonnegative residue.
pub fn modp(a: i64, n: i64) -> i64 {
    a.rem_euclid(n)
}

/// Inverse of `a` modulo `n`, if it exists. Returns 0 when n = 1.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let e = modp(a, n).extended_gcd(&n);
    if e.gcd != 1 {
        return None;
    }
    Some(modp(e.x, n))
}

/// Prime factorization as (p, e) pairs, p increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// Units of ℤ/n in increasing order (for n = 1 this is {0}).
pub fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&a| gcd(a as i64, n as i64) == 1).collect()
}

/// Jacobi symbol (a/n) for odd positive n.
fn jacobi(mut a: i64, mut n: i64) -> i64 {
    debug_assert!(n > 0 && n % 2 == 1);
    a = modp(a, n);
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n) for any integer a and n.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut sign = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -1;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = modp(a, 8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            sign = -sign;
        }
    }
    sign * jacobi(a, n)
}

/// (12/n), the character in the pentagonal form of η.
pub fn chi12(n: i64) -> i64 {
    const TABLE: [i64; 12] = [0, 1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1];
    TABLE[modp(n, 12) as usize]
}

/// (4/n) as a Kronecker symbol of -4, the character in the sum form of ϑ.
pub fn chi4(n: i64) -> i64 {
    const TABLE: [i64; 4] = [0, 1, 0, -1];
    TABLE[modp(n, 4) as usize]
}

/// Dedekind sum s(h, k) for k ≥ 1, returned as (numerator, denominator) in lowest terms.
pub fn dedekind_sum(h: i64, k: i64) -> (i64, i64) {
    assert!(k >= 1);
    // s(h,k) = Σ_{r=1}^{k-1} ((r/k))((hr/k)); evaluate with denominator 4k² then reduce.
    let mut num: i64 = 0;
    for r in 1..k {
        let hr = modp(h * r, k);
        if hr == 0 {
            continue;
        }
        // ((x)) = x - floor(x) - 1/2 for non-integral x; with denominator 2k each.
        let a = 2 * r - k;
        let b = 2 * hr - k;
        num += a * b;
    }
    let den = 4 * k * k;
    let g = gcd(num, den);
    (num / g, den / g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_and_moebius_tables() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(144).len(), 15);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
        assert_eq!(totient(144), 48);
        assert_eq!(sigma1(6), 12);
    }

    #[test]
    fn kronecker_matches_known_values() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(-1, 7), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(3, 8), -1);
        for n in 1..40 {
            assert_eq!(kronecker(12, n), chi12(n));
            assert_eq!(kronecker(-4, n), chi4(n));
        }
    }

    #[test]
    fn dedekind_sum_reciprocity() {
        for h in 1..20i64 {
            for k in 1..20i64 {
                if gcd(h, k) != 1 {
                    continue;
                }
                let (a, b) = dedekind_sum(h, k);
                let (c, d) = dedekind_sum(k, h);
                // s(h,k) + s(k,h) = (h/k + k/h + 1/(hk))/12 - 1/4
                let lhs = num_rational::Ratio::new(a, b) + num_rational::Ratio::new(c, d);
                let rhs = (num_rational::Ratio::new(h, k)
                    + num_rational::Ratio::new(k, h)
                    + num_rational::Ratio::new(1, h * k))
                    / 12
                    - num_rational::Ratio::new(1, 4);
                assert_eq!(lhs, rhs, "h={h} k={k}");
            }
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(2, 9), Some(5));
        assert_eq!(mod_inverse(3, 9), None);
        assert_eq!(mod_inverse(5, 1), Some(0));
    }
}
