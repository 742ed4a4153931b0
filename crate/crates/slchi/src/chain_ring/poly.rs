//! Dense polynomials over F_p (coefficients low -> high) and the small amount of
//! factoring needed for degree <= 4 presentations.

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn reduce(a: &[i64], p: u64) -> Vec<u64> {
    trim(a.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

fn deg(a: &[u64]) -> isize {
    a.len() as isize - 1
}

#[cfg(test)]
pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    if deg(&r) < deg(&b) {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while !r.is_empty() && deg(&r) >= deg(&b) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() * lead_inv % p;
        q[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[i + shift] = (r[i + shift] + p - c * bi % p) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn monic_of_degree(d: usize, p: u64, idx: u64) -> Vec<u64> {
    let mut c = Vec::with_capacity(d + 1);
    let mut k = idx;
    for _ in 0..d {
        c.push(k % p);
        k /= p;
    }
    c.push(1);
    c
}

/// Factor a monic polynomial over F_p into monic irreducibles with multiplicity.
/// Factors are listed by (degree, coefficient index), which fixes a canonical order.
pub(crate) fn factor(a: &[u64], p: u64) -> Vec<(Vec<u64>, usize)> {
    let mut rest = trim(a.to_vec());
    let mut out = Vec::new();
    let mut d = 1usize;
    while deg(&rest) >= 2 * d as isize {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let h = monic_of_degree(d, p, idx);
            let mut m = 0;
            loop {
                let (qt, r) = divrem(&rest, &h, p);
                if !r.is_empty() {
                    break;
                }
                rest = qt;
                m += 1;
            }
            if m > 0 {
                out.push((h, m));
            }
        }
        d += 1;
    }
    if deg(&rest) >= 1 {
        // what is left is irreducible; make it monic
        let inv = inv_mod(*rest.last().unwrap(), p);
        let h: Vec<u64> = rest.iter().map(|c| c * inv % p).collect();
        if let Some(pos) = out.iter().position(|(g, _)| *g == h) {
            out[pos].1 += 1;
        } else {
            out.push((h, 1));
        }
    }
    out.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.0.iter().rev().cmp(y.0.iter().rev())));
    out
}

pub(crate) fn is_irreducible(a: &[u64], p: u64) -> bool {
    let f = factor(a, p);
    f.len() == 1 && f[0].1 == 1 && f[0].0.len() == trim(a.to_vec()).len()
}

/// Lexicographically least monic irreducible polynomial of degree `d` over F_p.
pub(crate) fn least_irreducible(d: usize, p: u64) -> Vec<u64> {
    (0..p.pow(d as u32))
        .map(|i| monic_of_degree(d, p, i))
        .find(|h| is_irreducible(h, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Dedekind's criterion: p divides [O_K : Z[theta]] for theta a root of `g`
/// iff some repeated factor H of g mod p also divides (g - prod H_i^{m_i}) / p.
pub(crate) fn index_divisible_by_p(g: &[i64], p: u64) -> bool {
    let fac = factor(&reduce(g, p), p);
    let mut prod: Vec<i128> = vec![1];
    for (h, m) in &fac {
        for _ in 0..*m {
            let mut out = vec![0i128; prod.len() + h.len() - 1];
            for (i, &x) in prod.iter().enumerate() {
                for (j, &y) in h.iter().enumerate() {
                    out[i + j] += x * y as i128;
                }
            }
            prod = out;
        }
    }
    let n = g.len().max(prod.len());
    let t: Vec<i64> = (0..n)
        .map(|i| {
            let gi = *g.get(i).unwrap_or(&0) as i128;
            let pi = *prod.get(i).unwrap_or(&0);
            debug_assert_eq!((gi - pi).rem_euclid(p as i128), 0);
            ((gi - pi) / p as i128) as i64
        })
        .collect();
    let t = reduce(&t, p);
    fac.iter().any(|(h, m)| *m >= 2 && (t.is_empty() || divrem(&t, h, p).1.is_empty()))
}
