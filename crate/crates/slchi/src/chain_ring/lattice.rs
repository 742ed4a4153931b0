//! Z^n modulo a full-rank sublattice, with canonical Hermite-normal-form representatives.

pub(crate) const MAXN: usize = 4;
pub(crate) type Coords = [i128; MAXN];

/// `Z[theta]/(g)` modulo a full-rank lattice `L` with `m Z^n ⊆ L`.
///
/// Basis row `i` is zero before column `i` and has pivot `d_i > 0` at column `i`,
/// so every class has a unique representative with `0 <= v_i < d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Quotient {
    pub n: usize,
    pub g: Vec<i128>,
    pub modulus: i128,
    pub basis: Vec<Coords>,
    pub pivots: Coords,
    pub strides: [u64; MAXN],
    pub size: u64,
}

impl Quotient {
    /// `g` is monic of degree `n` (low -> high, length n+1); `gens` span `L` together with `m Z^n`.
    pub fn new(g: &[i128], gens: &[Coords], modulus: i128) -> Quotient {
        let n = g.len() - 1;
        assert!((1..=MAXN).contains(&n));
        assert!(modulus >= 1);
        let m = modulus;
        let mut rows: Vec<Coords> = gens
            .iter()
            .map(|v| {
                let mut r = [0i128; MAXN];
                for k in 0..n {
                    r[k] = v[k].rem_euclid(m);
                }
                r
            })
            .collect();
        let mut basis = Vec::with_capacity(n);
        let mut pivots = [1i128; MAXN];
        for col in 0..n {
            let mut me = [0i128; MAXN];
            me[col] = m;
            rows.push(me);
            loop {
                let live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
                if live.len() <= 1 {
                    break;
                }
                let piv = *live.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
                let pr = rows[piv];
                for &i in &live {
                    if i == piv {
                        continue;
                    }
                    let t = rows[i][col].div_euclid(pr[col]);
                    for k in col..n {
                        rows[i][k] -= t * pr[k];
                        if k > col {
                            rows[i][k] = rows[i][k].rem_euclid(m);
                        }
                    }
                }
            }
            let piv = (0..rows.len()).find(|&i| rows[i][col] != 0).expect("m e_col keeps the lattice full rank");
            let mut pr = rows.swap_remove(piv);
            if pr[col] < 0 {
                for k in col..n {
                    pr[k] = -pr[k];
                }
            }
            for k in col + 1..n {
                pr[k] = pr[k].rem_euclid(m);
            }
            pivots[col] = pr[col];
            basis.push(pr);
            rows.retain(|r| r[..n].iter().any(|&c| c != 0));
        }
        let mut strides = [0u64; MAXN];
        let mut s = 1u64;
        for k in 0..n {
            strides[k] = s;
            s = s.checked_mul(pivots[k] as u64).expect("ring too large");
        }
        assert!(s <= u32::MAX as u64 + 1, "ring too large for u32 indices");
        Quotient { n, g: g.to_vec(), modulus, basis, pivots, strides, size: s }
    }

    pub fn reduce(&self, mut v: Coords) -> Coords {
        let m = self.modulus;
        for k in 0..self.n {
            v[k] = v[k].rem_euclid(m);
        }
        for i in 0..self.n {
            let t = v[i].div_euclid(self.pivots[i]);
            if t != 0 {
                let b = &self.basis[i];
                v[i] -= t * b[i];
                for k in i + 1..self.n {
                    v[k] = (v[k] - t * b[k]).rem_euclid(m);
                }
            }
        }
        v
    }

    pub fn is_zero(&self, v: Coords) -> bool {
        self.reduce(v)[..self.n].iter().all(|&c| c == 0)
    }

    pub fn encode(&self, v: Coords) -> u32 {
        let v = self.reduce(v);
        let mut idx = 0u64;
        for k in 0..self.n {
            idx += v[k] as u64 * self.strides[k];
        }
        idx as u32
    }

    /// Canonical coordinates of an index (already reduced).
    pub fn decode(&self, idx: u32) -> Coords {
        let mut v = [0i128; MAXN];
        let mut x = idx as u64;
        for k in 0..self.n {
            let d = self.pivots[k] as u64;
            v[k] = (x % d) as i128;
            x /= d;
        }
        v
    }

    pub fn add(&self, a: Coords, b: Coords) -> Coords {
        let mut v = [0i128; MAXN];
        for k in 0..self.n {
            v[k] = a[k] + b[k];
        }
        v
    }

    pub fn neg(&self, a: Coords) -> Coords {
        let mut v = [0i128; MAXN];
        for k in 0..self.n {
            v[k] = -a[k];
        }
        v
    }

    /// Product of two polynomials in theta, reduced by the monic `g` (not by `L`).
    pub fn mul(&self, a: Coords, b: Coords) -> Coords {
        let n = self.n;
        let m = self.modulus;
        let mut prod = [0i128; 2 * MAXN];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] = (prod[i + j] + a[i] * b[j]).rem_euclid(m);
            }
        }
        for d in (n..2 * n - 1).rev() {
            let c = prod[d];
            if c != 0 {
                for k in 0..n {
                    prod[d - n + k] = (prod[d - n + k] - c * self.g[k]).rem_euclid(m);
                }
                prod[d] = 0;
            }
        }
        let mut v = [0i128; MAXN];
        v[..n].copy_from_slice(&prod[..n]);
        v
    }

    pub fn constant(&self, c: i128) -> Coords {
        let mut v = [0i128; MAXN];
        v[0] = c;
        v
    }

    pub fn theta(&self) -> Coords {
        let mut v = [0i128; MAXN];
        if self.n > 1 {
            v[1] = 1;
        } else {
            // theta is a root of the linear g = x + g0
            v[0] = -self.g[0];
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_mod_9() {
        let q = Quotient::new(&[0, 1], &[[9, 0, 0, 0]], 9);
        assert_eq!(q.size, 9);
        assert_eq!(q.encode([13, 0, 0, 0]), 4);
        assert_eq!(q.encode([-1, 0, 0, 0]), 8);
    }

    #[test]
    fn gaussian_mod_one_plus_i_squared() {
        // (1+i)^2 = (2i): lattice spanned by 2i, 2i*i = -2
        let g = [1i128, 0, 1];
        let q = Quotient::new(&g, &[[0, 2, 0, 0], [-2, 0, 0, 0]], 2);
        assert_eq!(q.size, 4);
        let q = Quotient::new(&g, &[[1, 1, 0, 0], [-1, 1, 0, 0]], 2);
        assert_eq!(q.size, 2);
        assert!(q.is_zero([1, 1, 0, 0]));
        assert!(!q.is_zero([1, 0, 0, 0]));
    }
}
