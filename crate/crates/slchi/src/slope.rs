//! Borel slopes: the normal forms `I + b N(eta)` of unipotent elements whose
//! leading term is a multiple of `E`, and the counting identities built on them.

use serde::Serialize;
use serde_json::json;

use crate::chain_ring::{El, Ring};
use crate::error::{Error, Result};
use crate::par;
use crate::sl2_local::{self as sl2, Column, Mat2};
use crate::subgroup::{self, LevelStats, LieLadder, Line, Subgroup};

/// An element of `Sigma_j = pi R_{e-j+1}`, stored as its canonical lift to `R_e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Slope {
    pub j: usize,
    pub value: El,
}

impl Slope {
    /// The slope at level `j` represented by `x` (which must lie in `pi R_e`).
    pub fn new(r: &Ring, j: usize, x: El) -> Result<Slope> {
        check_level(r, j)?;
        if r.valuation(x) == 0 {
            return Err(Error::PreconditionUnmet(format!("slope {} is a unit", r.show(x))));
        }
        let k = r.e() - j + 1;
        Ok(Slope { j, value: r.lift_from(r.reduce_to(x, k), k) })
    }

    /// Valuation in `R_{e-j+1}` (so `0` has valuation `e - j + 1`).
    pub fn valuation(&self, r: &Ring) -> usize {
        r.valuation(self.value).min(r.e() - self.j + 1)
    }

    pub fn add(&self, r: &Ring, o: &Slope) -> Slope {
        Slope::new(r, self.j, r.add(self.value, o.value)).unwrap()
    }

    pub fn sub(&self, r: &Ring, o: &Slope) -> Slope {
        Slope::new(r, self.j, r.sub(self.value, o.value)).unwrap()
    }

    /// `pi_{j,r}`: the image at level `j + s`.
    pub fn project(&self, r: &Ring, s: usize) -> Slope {
        Slope::new(r, self.j + s, self.value).unwrap()
    }
}

fn check_level(r: &Ring, j: usize) -> Result<()> {
    if j < 2 || j > r.e() {
        return Err(Error::bad_level(j, 2, r.e()));
    }
    Ok(())
}

/// All of `Sigma_j`, `q^(e-j)` slopes in canonical order.
pub fn slopes(r: &Ring, j: usize) -> Result<Vec<Slope>> {
    check_level(r, j)?;
    let k = r.e() - j + 1;
    let rk = r.level(k);
    Ok(rk
        .ideal_elements(1)
        .into_iter()
        .map(|y| Slope { j, value: r.lift_from(y, k) })
        .collect())
}

/// `N(eta) = [[-eta, 1], [-eta^2, eta]]`.
pub fn slope_nilpotent(r: &Ring, eta: &Slope) -> Mat2 {
    nilpotent_at(r, eta.value)
}

fn nilpotent_at(r: &Ring, t: El) -> Mat2 {
    Mat2::new(r.neg(t), r.one(), r.neg(r.mul(t, t)), t)
}

/// `x_eta(b) = I + b N(eta)`.
pub fn x_eta(r: &Ring, eta: &Slope, b: El) -> Mat2 {
    Mat2::identity(r).add(r, &slope_nilpotent(r, eta).scale(r, b))
}

/// `Q_{eta,xi}(b) = x_eta(b) x_xi(b)^-1`, by multiplication.
pub fn quotient_q(r: &Ring, eta: &Slope, xi: &Slope, b: El) -> Mat2 {
    x_eta(r, eta, b).mul(r, &x_eta(r, xi, r.neg(b)))
}

/// The closed form of `Q_{eta,xi}(b)`.
pub fn quotient_q_closed(r: &Ring, eta: &Slope, xi: &Slope, b: El) -> Mat2 {
    let (h, x) = (eta.value, xi.value);
    let one = r.one();
    let bd = r.mul(b, r.sub(h, x));
    Mat2::new(
        r.sub(one, r.mul(bd, r.add(one, r.mul(b, x)))),
        r.mul(b, bd),
        r.neg(r.mul(bd, r.add(r.add(h, x), r.mul(b, r.mul(h, x))))),
        r.add(one, r.mul(bd, r.add(one, r.mul(b, h)))),
    )
}

/// Factor `w = I + b N(eta)` with `v(b) = j - 1`, if possible.
pub fn factor_slope(r: &Ring, w: &Mat2, j: usize) -> Option<(El, Slope)> {
    let b = w.b;
    if r.valuation(b) != j - 1 {
        return None;
    }
    let c = r.solve_affine(r.sub(w.a, r.one()), b)?;
    if r.valuation(c.rep) == 0 {
        return None;
    }
    let eta = Slope::new(r, j, c.rep).ok()?;
    (x_eta(r, &eta, b) == *w).then_some((b, eta))
}

/// `Fix_j(eta) = {(x, y) : x a unit, y = eta x mod pi^(e-j+1)}` (sorted).
pub fn fix_set(r: &Ring, eta: &Slope) -> Vec<Column> {
    let m = r.e() - eta.j + 1;
    let tail = r.ideal_elements(m);
    let mut out = Vec::new();
    for x in r.elements().filter(|&x| r.is_unit(x)) {
        let y0 = r.mul(eta.value, x);
        out.extend(tail.iter().map(|&z| (x, r.add(y0, z))));
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// Slope cells

/// `S_j(eta)` and its top layer `M_j(eta)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeCell {
    pub j: usize,
    pub eta: Slope,
    /// sorted
    pub s: Vec<El>,
    /// `b` in `S_j(eta)` with `v(b) = j - 1`
    pub m: Vec<El>,
}

impl SlopeCell {
    pub fn m_count(&self) -> usize {
        self.m.len()
    }
}

/// `E_j(b) = {eta in Sigma_j : I + b N(eta) in H}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCell {
    pub j: usize,
    pub b: El,
    pub slopes: Vec<Slope>,
}

pub fn slope_cell(h: &Subgroup, j: usize, eta: &Slope) -> Result<SlopeCell> {
    let r = h.ring();
    check_level(r, j)?;
    if eta.j != j {
        return Err(Error::PreconditionUnmet(format!("slope of level {} used at level {j}", eta.j)));
    }
    let mut s: Vec<El> = r
        .ideal_elements(j - 1)
        .into_iter()
        .filter(|&b| h.contains(&x_eta(r, eta, b)))
        .collect();
    s.sort_unstable();
    let m = s.iter().copied().filter(|&b| r.valuation(b) == j - 1).collect();
    let cell = SlopeCell { j, eta: *eta, s, m };
    check_additive(r, &cell)?;
    Ok(cell)
}

fn check_additive(r: &Ring, cell: &SlopeCell) -> Result<()> {
    let s = &cell.s;
    let bad = s.binary_search(&0).is_err()
        || s.iter().any(|&a| s.binary_search(&r.neg(a)).is_err())
        || s.iter().enumerate().any(|(i, &a)| s[i..].iter().any(|&b| s.binary_search(&r.add(a, b)).is_err()));
    if bad {
        return Err(Error::verification(
            "slope cell is an additive subgroup",
            json!({"ring": r.spec(), "j": cell.j, "eta": r.show(cell.eta.value), "s": cell.s.iter().map(|&b| r.show(b)).collect::<Vec<_>>()}),
        ));
    }
    Ok(())
}

pub fn fiber_cell(h: &Subgroup, j: usize, b: El) -> Result<FiberCell> {
    let r = h.ring();
    check_level(r, j)?;
    if r.valuation(b) < j - 1 {
        return Err(Error::PreconditionUnmet(format!("v({}) < {}", r.show(b), j - 1)));
    }
    let mut slopes: Vec<Slope> = slopes(r, j)?.into_iter().filter(|eta| h.contains(&x_eta(r, eta, b))).collect();
    slopes.sort_unstable();
    Ok(FiberCell { j, b, slopes })
}

// ---------------------------------------------------------------------------
// T_j, A_j and telescoping

/// The lexicographically first `g` in `SL_2(F_q)` with `g [1:0] = lambda`, lifted to `SL_2(R_e)`.
pub fn transport(r: &Ring, lambda: Line) -> Mat2 {
    let fq = r.residue_field();
    let q = fq.size() as El;
    let (x, y) = lambda;
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                if (a, c) == (0, 0) || fq.sub(fq.mul(a, y), fq.mul(c, x)) != 0 {
                    continue;
                }
                for d in 0..q {
                    let g = Mat2::new(a, b, c, d);
                    if g.det(&fq) == fq.one() {
                        return sl2::lift_sl2(r, &g, 1);
                    }
                }
            }
        }
    }
    unreachable!("SL_2(F_q) acts transitively on lines")
}

/// `T_j(lambda)` by scanning `N_j \ N_{j+1}`.
pub fn t_count(h: &Subgroup, j: usize, lambda: Line) -> Result<u64> {
    let r = h.ring();
    check_level(r, j)?;
    let fq = r.residue_field();
    let two = r.from_int(2);
    let nj = h.n_j(j).elements();
    Ok(par::sum_range(nj.len(), |i| {
        let w = &nj[i];
        let psi = subgroup::psi(r, w, j);
        u64::from(
            subgroup::on_line(&fq, &psi, lambda) && w.trace(r) == two && sl2::has_fixed_point(r, w),
        )
    }))
}

/// `T_j(lambda)` as `sum_eta m_j(eta)` on `H` transported to the standard line.
pub fn t_count_slopes(h: &Subgroup, j: usize, lambda: Line) -> Result<u64> {
    t_count_slopes_via(h, j, &transport(h.ring(), lambda))
}

/// As [`t_count_slopes`] with an explicit transporter `g` (`g [1:0] = lambda`).
pub fn t_count_slopes_via(h: &Subgroup, j: usize, g: &Mat2) -> Result<u64> {
    let hg = h.conjugate(g);
    slopes(h.ring(), j)?
        .iter()
        .map(|eta| slope_cell(&hg, j, eta).map(|c| c.m_count() as u64))
        .sum()
}

/// `A_j(lambda) = sum_eta |S_j(eta)|` on the transported subgroup.
pub fn a_sum(h: &Subgroup, j: usize, lambda: Line) -> Result<u64> {
    let hg = h.conjugate(&transport(h.ring(), lambda));
    a_sum_std(&hg, j)
}

fn a_sum_std(hg: &Subgroup, j: usize) -> Result<u64> {
    let r = hg.ring();
    let sl = slopes(r, j)?;
    let bs = r.ideal_elements(j - 1);
    Ok(par::sum_range(sl.len(), |i| {
        bs.iter().filter(|&&b| hg.contains(&x_eta(r, &sl[i], b))).count() as u64
    }))
}

/// `sum_b |E_j(b)|` on the transported subgroup.
fn fiber_sum_std(hg: &Subgroup, j: usize) -> Result<u64> {
    let r = hg.ring();
    r.ideal_elements(j - 1).iter().map(|&b| fiber_cell(hg, j, b).map(|c| c.slopes.len() as u64)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TelescopeRow {
    pub subgroup: String,
    pub j: usize,
    pub lambda: String,
    pub t_direct: u64,
    pub a_j: u64,
    /// `A_{j+1}`, with `A_{e+1} = 0`
    pub a_next: u64,
    /// `T_j - (A_j - q A_{j+1})`
    pub residual: i64,
    /// At `j = e`: `T_e - (A_e - 1)`, the count with the `b = 0` term removed.
    pub boundary_corrected: Option<i64>,
}

/// Compare direct `T_j(lambda)` with `A_j - q A_{j+1}` at every level.
///
/// Along the way this checks `T_j = sum_eta m_j(eta)`, the fibre-sum identity
/// `sum_eta |S_j(eta)| = sum_b |E_j(b)|` and the trivial bound `T_j <= q^(2e-2j+1)`.
/// A nonzero residual below the top level is a verification failure; the
/// top level is only reported.
pub fn telescoping_report(h: &Subgroup, id: &str, lambda: Line) -> Result<Vec<TelescopeRow>> {
    let r = h.ring();
    let (e, q) = (r.e(), r.q());
    let hg = h.conjugate(&transport(r, lambda));
    let lname = show_line(&r.residue_field(), lambda);
    let mut a = vec![0u64; e + 2];
    for j in 2..=e {
        a[j] = a_sum_std(&hg, j)?;
    }
    let mut rows = Vec::new();
    for j in 2..=e {
        let t = t_count(h, j, lambda)?;
        let fail = |check: &str| {
            Error::verification(check, json!({"subgroup": h.to_json(), "j": j, "lambda": lname, "t_direct": t, "a": &a[2..=e]}))
        };
        let ts = t_count_slopes(h, j, lambda)?;
        if ts != t {
            return Err(fail("T_j equals the sum of m_j over slopes"));
        }
        if fiber_sum_std(&hg, j)? != a[j] {
            return Err(fail("A_j equals the sum of fibre sizes"));
        }
        if t > q.pow((2 * e - 2 * j + 1) as u32) {
            return Err(fail("T_j <= q^(2e-2j+1)"));
        }
        let residual = t as i64 - (a[j] as i64 - q as i64 * a[j + 1] as i64);
        if j < e && residual != 0 {
            return Err(fail("T_j = A_j - q A_{j+1}"));
        }
        rows.push(TelescopeRow {
            subgroup: id.to_string(),
            j,
            lambda: lname.clone(),
            t_direct: t,
            a_j: a[j],
            a_next: a[j + 1],
            residual,
            boundary_corrected: (j == e).then(|| t as i64 - (a[j] as i64 - 1)),
        });
    }
    Ok(rows)
}

pub fn show_line(fq: &Ring, (x, y): Line) -> String {
    format!("[{}:{}]", fq.show(x), fq.show(y))
}

// ---------------------------------------------------------------------------
// Obstructions

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parallelogram {
    /// `b delta t = 0`, so `R = I` at every level that matters.
    Degenerate,
    /// `r > e`: nothing to assert.
    OutOfRange { r: usize },
    /// `R` lies in `N_r \ N_(r+1)` and `psi_r(R)` is a nonzero multiple of `F` in `W_r`.
    Obstruction { r: usize, element: Mat2, psi: [El; 3] },
}

/// The second difference `R = Q_{xi+t+delta, xi+t}(b) Q_{xi+delta, xi}(b)^-1`.
pub fn parallelogram_element(r: &Ring, b: El, xi: &Slope, delta: &Slope, t: &Slope) -> Mat2 {
    let xt = xi.add(r, t);
    let q1 = quotient_q(r, &xt.add(r, delta), &xt, b);
    let q2 = quotient_q(r, &xi.add(r, delta), xi, b);
    q1.mul(r, &q2.inv_unchecked(r))
}

pub fn parallelogram(
    h: &Subgroup,
    ladder: &LieLadder,
    j: usize,
    b: El,
    xi: &Slope,
    delta: &Slope,
    t: &Slope,
) -> Result<Parallelogram> {
    let r = h.ring();
    check_level(r, j)?;
    let (e, nu) = (r.e(), r.nu());
    if j < nu + 2 {
        return Err(Error::PreconditionUnmet(format!("j = {j} < nu + 2 = {}", nu + 2)));
    }
    if r.valuation(b) < j - 1 {
        return Err(Error::PreconditionUnmet(format!("v(b) < {}", j - 1)));
    }
    let xt = xi.add(r, t);
    for p in [*xi, xi.add(r, delta), xt, xt.add(r, delta)] {
        if !h.contains(&x_eta(r, &p, b)) {
            return Err(Error::PreconditionUnmet(format!("slope {} not in E_j(b)", r.show(p.value))));
        }
    }
    let bdt = r.mul(b, r.mul(delta.value, t.value));
    if bdt == 0 {
        return Ok(Parallelogram::Degenerate);
    }
    let rr = r.valuation(bdt) + nu + 1;
    if rr > e {
        return Ok(Parallelogram::OutOfRange { r: rr });
    }
    let fq = r.residue_field();
    let el = parallelogram_element(r, b, xi, delta, t);
    let psi = subgroup::psi(r, &el, rr);
    let fail = |check: &str| {
        Error::verification(
            check,
            json!({"subgroup": h.to_json(), "j": j, "b": r.coords(b), "xi": r.coords(xi.value),
                   "delta": r.coords(delta.value), "t": r.coords(t.value), "r": rr, "R": el.show(r)}),
        )
    };
    if subgroup::sub_identity_val(r, &el) + 1 != rr || psi[0] != 0 || psi[1] != 0 || psi[2] == 0 {
        return Err(fail("psi_r(R) is a nonzero multiple of F"));
    }
    if !ladder.w(rr).contains(&subgroup::to_fp(&fq, &psi)) {
        return Err(fail("psi_r(R) lies in W_r"));
    }
    Ok(Parallelogram::Obstruction { r: rr, element: el, psi })
}

/// Number of classes `eta' = eta mod pi^(k-j-s)`, taken mod `pi^(k-j-s+1)`,
/// with `I + b N(eta')` in `H` at level `k`. It is `0` or `p^(dim V_k)`.
pub fn transversality_classes(h: &Subgroup, ladder: &LieLadder, j: usize, eta: &Slope, b: El, k: usize) -> Result<u64> {
    let r = h.ring();
    check_level(r, j)?;
    let e = r.e();
    let vb = r.valuation(b);
    if vb < j - 1 || vb > e - 1 {
        return Err(Error::PreconditionUnmet(format!("v(b) = {vb} outside [{}, {}]", j - 1, e - 1)));
    }
    let s = vb - (j - 1);
    if k < j + s + 1 || k > e {
        return Err(Error::PreconditionUnmet(format!("k = {k} outside [{}, {e}]", j + s + 1)));
    }
    let hk1 = h.reduce_to(k - 1);
    let hk = h.reduce_to(k);
    if !hk1.contains(&x_eta(r, eta, b).reduce(r, k - 1)) {
        return Err(Error::PreconditionUnmet(format!("I + b N(eta) not in H_{}", k - 1)));
    }
    let step = r.pi_pow(k - j - s);
    let finer = r.pi_pow(k - j - s + 1);
    let member = |t: El| {
        let eta2 = Slope::new(r, j, r.add(eta.value, t)).unwrap();
        hk.contains(&x_eta(r, &eta2, b).reduce(r, k))
    };
    let mut count = 0u64;
    for &t in r.residue_reps() {
        let base = r.mul(step, t);
        let m = member(base);
        // a second representative of the same class must agree
        if member(r.add(base, r.mul(finer, r.add(r.one(), r.theta())))) != m {
            return Err(Error::verification(
                "membership depends only on the class",
                json!({"subgroup": h.to_json(), "j": j, "eta": r.coords(eta.value), "b": r.coords(b), "k": k}),
            ));
        }
        count += u64::from(m);
    }
    let dim = subgroup::log_p(r.p(), subgroup::diagonal_slice_of(&r.residue_field(), ladder.w(k)).len());
    if count != 0 && count != r.p().pow(dim as u32) {
        return Err(Error::verification(
            "class count is 0 or p^dim V_k",
            json!({"subgroup": h.to_json(), "j": j, "eta": r.coords(eta.value), "b": r.coords(b), "k": k, "count": count, "dim": dim}),
        ));
    }
    Ok(count)
}

/// `P_{j,b}(delta) = {xi : xi, xi + delta in E_j(b)}`, with the difference
/// constraints and the size bound checked when they apply.
pub fn pair_set(h: &Subgroup, stats: &LevelStats, j: usize, b: El, delta: &Slope) -> Result<Vec<Slope>> {
    let r = h.ring();
    let fiber = fiber_cell(h, j, b)?.slopes;
    let set: Vec<Slope> = fiber
        .iter()
        .copied()
        .filter(|xi| fiber.binary_search(&xi.add(r, delta)).is_ok())
        .collect();
    let (e, nu) = (r.e(), r.nu());
    let m = e - j;
    let vb = r.valuation(b);
    let d = delta.valuation(r);
    if stats.j2 > e || j < 2 + nu || vb > j - 1 + m || d == 0 || d > m {
        return Ok(set);
    }
    let s = vb - (j - 1);
    let fail = |check: &str| {
        Error::verification(
            check,
            json!({"subgroup": h.to_json(), "j": j, "b": r.coords(b), "delta": r.coords(delta.value),
                   "pairs": set.iter().map(|x| r.coords(x.value)).collect::<Vec<_>>()}),
        )
    };
    let lo = stats.j2 as i64 - (j + s + d + nu) as i64;
    for x in &set {
        for y in &set {
            let tau = y.sub(r, x);
            if tau.value == 0 {
                continue;
            }
            let vt = tau.valuation(r);
            if (vt as i64) < lo {
                return Err(fail("v(tau) >= j2 - j - s - d - nu"));
            }
            if stats.pi_set.contains(&(vt + j + s + d + nu)) {
                return Err(fail("v(tau) + j + s + d + nu not in Pi"));
            }
        }
    }
    // |P| q^c^* p^c_* <= q^min(m, s + d + gamma)
    let (p, q) = (r.p() as u128, r.q() as u128);
    let exp = (m as i64).min(s as i64 + d as i64 + stats.gamma) as u32;
    let lhs = set.len() as u128 * q.pow(stats.c_upper(j, s, d) as u32) * p.pow(stats.c_lower(j, s, d) as u32);
    if lhs > q.pow(exp) {
        return Err(fail("|P| <= q^min(m, s+d+gamma) q^-c^* p^-c_*"));
    }
    Ok(set)
}
