//! Small grammars for command-line arguments: ring specs, generators,
//! quadratic bases and levels.
//!
//! Generators: `I`, `E`, `F`, `D`, `u(x)`, `l(x)` and entry lists `[a,b,c,d]`,
//! combined with integer coefficients, `+`/`-` and juxtaposed (or `*`)
//! products, e.g. `I+3E`, `u(1)l(2)`, `[1,3,0,1]`. Ring elements inside
//! `u(..)`, `l(..)` and lists are integer polynomials in `t`, the ring's
//! generator (`2+t`). Several generators are separated by `;`.

use slchi::cusp_global::{rational_level, Base};
use slchi::quad_field::{IdealHNF, QElt, QuadraticField};
use slchi::sl2_local::Mat2;
use slchi::subgroup::Line;
use slchi::{El, Ring, RingSpec};

pub type ParseResult<T> = std::result::Result<T, String>;

/// Integer polynomial in `var`, low degree first: `x^2-2` gives `[-2, 0, 1]`.
pub fn poly(s: &str, var: char) -> ParseResult<Vec<i64>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut out: Vec<i64> = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let mut sign = 1i64;
        if b[i] == b'+' || b[i] == b'-' {
            sign = if b[i] == b'-' { -1 } else { 1 };
            i += 1;
        } else if i > 0 {
            return Err(format!("expected '+' or '-' at '{}'", &s[i..]));
        }
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let coef: Option<i64> = (i > start).then(|| s[start..i].parse().map_err(|e| format!("{e}"))).transpose()?;
        if i < b.len() && b[i] == b'*' {
            i += 1;
        }
        let mut deg = 0usize;
        if i < b.len() && b[i] as char == var {
            i += 1;
            deg = 1;
            if i < b.len() && b[i] == b'^' {
                i += 1;
                let st = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                deg = s[st..i].parse().map_err(|_| format!("bad exponent in '{s}'"))?;
            }
        } else if coef.is_none() {
            return Err(format!("unexpected '{}' in '{s}'", &s[start..]));
        }
        if out.len() <= deg {
            out.resize(deg + 1, 0);
        }
        out[deg] += sign * coef.unwrap_or(1);
    }
    Ok(out)
}

/// `p=3,e=2`, `p=2,f=2,e=3` (Galois ring) or `p=2,e=30,poly=x^2-2`.
pub fn ring_spec(s: &str) -> ParseResult<RingSpec> {
    let (mut p, mut e, mut f, mut pl) = (None, None, None, None);
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value in '{part}'"))?;
        let num = || v.trim().parse::<u64>().map_err(|_| format!("'{k}' needs a number, got '{v}'"));
        match k.trim() {
            "p" => p = Some(num()?),
            "e" => e = Some(num()? as usize),
            "f" => f = Some(num()? as usize),
            "poly" => pl = Some(poly(v, 'x')?),
            other => return Err(format!("unknown ring key '{other}' (expected p, e, f, poly)")),
        }
    }
    let p = p.ok_or("ring spec needs p")?;
    let e = e.ok_or("ring spec needs e")?;
    let spec = match (f, pl) {
        (Some(_), Some(_)) => return Err("give either f or poly, not both".into()),
        (f, None) => RingSpec::galois(p, f.unwrap_or(1), e),
        (None, Some(g)) => RingSpec::number_ring(&g, p, e),
    };
    spec.map_err(|e| e.to_string())
}

struct Gen<'a> {
    r: &'a Ring,
    s: Vec<char>,
    i: usize,
}

impl Gen<'_> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.i).copied()
    }

    fn err<T>(&self, msg: &str) -> ParseResult<T> {
        let rest: String = self.s[self.i.min(self.s.len())..].iter().collect();
        Err(format!("{msg} at '{rest}'"))
    }

    fn int(&mut self) -> Option<i64> {
        let st = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        (self.i > st).then(|| self.s[st..self.i].iter().collect::<String>().parse().ok()).flatten()
    }

    /// Text up to the matching close bracket.
    fn until(&mut self, close: char) -> ParseResult<String> {
        let st = self.i;
        while self.peek().is_some_and(|c| c != close) {
            self.i += 1;
        }
        if self.peek() != Some(close) {
            return self.err(&format!("missing '{close}'"));
        }
        let body: String = self.s[st..self.i].iter().collect();
        self.i += 1;
        Ok(body)
    }

    fn elem(&self, s: &str) -> ParseResult<El> {
        let c = poly(s, 't')?;
        Ok(self.r.from_coords(&c))
    }

    fn atom(&mut self) -> ParseResult<Option<Mat2>> {
        let r = self.r;
        let m = match self.peek() {
            Some('I') => Mat2::identity(r),
            Some('E') => Mat2::e(r),
            Some('F') => Mat2::f(r),
            Some('D') => Mat2::h(r),
            Some(c @ ('u' | 'l')) => {
                self.i += 1;
                if self.peek() != Some('(') {
                    return self.err("expected '('");
                }
                self.i += 1;
                let body = self.until(')')?;
                let x = self.elem(&body)?;
                return Ok(Some(if c == 'u' { Mat2::upper(r, x) } else { Mat2::lower(r, x) }));
            }
            Some('[') => {
                self.i += 1;
                let body = self.until(']')?;
                let xs: Vec<El> = body.split(',').map(|t| self.elem(t)).collect::<ParseResult<_>>()?;
                if xs.len() != 4 {
                    return self.err("an entry list needs four entries");
                }
                return Ok(Some(Mat2::new(xs[0], xs[1], xs[2], xs[3])));
            }
            _ => return Ok(None),
        };
        self.i += 1;
        Ok(Some(m))
    }

    fn term(&mut self) -> ParseResult<Mat2> {
        let r = self.r;
        let coef = self.int();
        if coef.is_some() && self.peek() == Some('*') {
            self.i += 1;
        }
        let mut m: Option<Mat2> = None;
        loop {
            match self.atom()? {
                Some(a) => m = Some(m.map_or(a, |x| x.mul(r, &a))),
                None => break,
            }
            if self.peek() == Some('*') {
                self.i += 1;
            }
        }
        let m = match (coef, m) {
            (None, None) => return self.err("expected a term"),
            (Some(c), None) => Mat2::identity(r).scale(r, r.from_int(c)),
            (Some(c), Some(m)) => m.scale(r, r.from_int(c)),
            (None, Some(m)) => m,
        };
        Ok(m)
    }

    fn expr(&mut self) -> ParseResult<Mat2> {
        let r = self.r;
        let mut acc: Option<Mat2> = None;
        loop {
            let neg = match self.peek() {
                Some('-') => {
                    self.i += 1;
                    true
                }
                Some('+') if acc.is_some() => {
                    self.i += 1;
                    false
                }
                None if acc.is_some() => break,
                _ if acc.is_none() => false,
                _ => return self.err("expected '+' or '-'"),
            };
            let t = self.term()?;
            let t = if neg { t.scale(r, r.from_int(-1)) } else { t };
            acc = Some(acc.map_or(t, |a| a.add(r, &t)));
        }
        Ok(acc.expect("at least one term"))
    }
}

/// One generator expression.
pub fn generator(r: &Ring, s: &str) -> ParseResult<Mat2> {
    let mut g = Gen { r, s: s.chars().filter(|c| !c.is_whitespace()).collect(), i: 0 };
    if g.s.is_empty() {
        return Err("empty generator".into());
    }
    g.expr()
}

/// `;`-separated generators.
pub fn generators(r: &Ring, s: &str) -> ParseResult<Vec<Mat2>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(|t| generator(r, t)).collect()
}

/// `Q` or `d=-1`.
pub fn base(s: &str) -> ParseResult<Base> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(Base::Rational);
    }
    let d = t
        .strip_prefix("d=")
        .ok_or_else(|| format!("base must be Q or d=<int>, got '{t}'"))?
        .parse::<i64>()
        .map_err(|e| format!("bad d: {e}"))?;
    QuadraticField::new(d).map(Base::Quadratic).map_err(|e| e.to_string())
}

/// An element `x + y w`, written as a polynomial in `w`.
pub fn qelt(s: &str) -> ParseResult<QElt> {
    let c = poly(s, 'w')?;
    if c.len() > 2 {
        return Err(format!("'{s}' has degree > 1 in w"));
    }
    Ok(QElt::new(c[0] as i128, c.get(1).copied().unwrap_or(0) as i128))
}

/// `12` over Q; `(3)`, `(2+w)` or `(5, 2+w)` over a quadratic field.
pub fn level(base: &Base, s: &str) -> ParseResult<IdealHNF> {
    let t = s.trim();
    let inner = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
    match base {
        Base::Rational => {
            let n: u64 = inner.trim().parse().map_err(|_| format!("level over Q must be a positive integer, got '{t}'"))?;
            if n == 0 {
                return Err("level must be nonzero".into());
            }
            Ok(rational_level(n))
        }
        Base::Quadratic(k) => {
            let gens: Vec<QElt> = inner.split(',').map(qelt).collect::<ParseResult<_>>()?;
            k.ideal(&gens).map_err(|e| e.to_string())
        }
    }
}

/// A line `[x:y]` of `P^1(F_q)`, entries as residue-field polynomials in `t`.
pub fn line(fq: &Ring, s: &str) -> ParseResult<Line> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    let (x, y) = t.split_once(':').ok_or_else(|| format!("a line is written x:y, got '{s}'"))?;
    let (x, y) = (fq.from_coords(&poly(x, 't')?), fq.from_coords(&poly(y, 't')?));
    if x == 0 && y == 0 {
        return Err("[0:0] is not a line".into());
    }
    // normalise: first nonzero coordinate is one
    let lead = if x != 0 { x } else { y };
    let inv = fq.inv(lead).map_err(|e| e.to_string())?;
    Ok((fq.mul(x, inv), fq.mul(y, inv)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, e: usize) -> Ring {
        Ring::build(&RingSpec::rational(p, e)).unwrap()
    }

    #[test]
    fn polynomials() {
        assert_eq!(poly("x^2-2", 'x').unwrap(), vec![-2, 0, 1]);
        assert_eq!(poly("-x + 3x^3", 'x').unwrap(), vec![0, -1, 0, 3]);
        assert_eq!(poly("7", 't').unwrap(), vec![7]);
        assert!(poly("x^2y", 'x').is_err());
        assert!(poly("", 'x').is_err());
    }

    #[test]
    fn ring_specs() {
        assert_eq!(ring_spec("p=3,e=2").unwrap(), RingSpec::rational(3, 2));
        assert_eq!(ring_spec("p=2,f=2,e=1").unwrap(), RingSpec::galois(2, 2, 1).unwrap());
        assert_eq!(ring_spec("p=2,e=6,poly=x^2-2").unwrap(), RingSpec::number_ring(&[-2, 0, 1], 2, 6).unwrap());
        assert!(ring_spec("p=4,e=2").is_err());
        assert!(ring_spec("e=2").is_err());
        assert!(ring_spec("p=3,e=2,g=1").is_err());
    }

    #[test]
    fn generator_grammar() {
        let r = z(3, 2);
        assert_eq!(generator(&r, "I+3E").unwrap(), Mat2::upper(&r, 3));
        assert_eq!(generator(&r, "u(3)").unwrap(), Mat2::upper(&r, 3));
        assert_eq!(generator(&r, "[1, 3, 0, 1]").unwrap(), Mat2::upper(&r, 3));
        assert_eq!(generator(&r, "I - 3F").unwrap(), Mat2::lower(&r, r.from_int(-3)));
        assert_eq!(generator(&r, "u(1) l(1)").unwrap(), Mat2::upper(&r, 1).mul(&r, &Mat2::lower(&r, 1)));
        assert_eq!(generator(&r, "2I").unwrap(), Mat2::new(2, 0, 0, 2));
        assert_eq!(generator(&r, "I+3D").unwrap(), Mat2::new(4, 0, 0, r.from_int(-2)));
        assert_eq!(generators(&r, "I+3E; l(3)").unwrap().len(), 2);
        for bad in ["I+", "Q", "u(1", "[1,2,3]", "I E+"] {
            assert!(generator(&r, bad).is_err(), "{bad}");
        }
        let g = Ring::build(&RingSpec::galois(2, 2, 1).unwrap()).unwrap();
        assert_eq!(generator(&g, "u(t)").unwrap(), Mat2::upper(&g, g.theta()));
    }

    #[test]
    fn bases_and_levels() {
        assert_eq!(base("Q").unwrap(), Base::Rational);
        let Base::Quadratic(k) = base("d=-1").unwrap() else { panic!() };
        assert_eq!(level(&Base::Rational, "12").unwrap(), rational_level(12));
        assert_eq!(level(&Base::Quadratic(k.clone()), "(3)").unwrap().norm(), 9);
        assert_eq!(level(&Base::Quadratic(k.clone()), "(2+w)").unwrap().norm(), 5);
        assert_eq!(level(&Base::Quadratic(k), "(5, 2+w)").unwrap().norm(), 5);
        assert!(base("d=-5").is_err());
        assert!(base("Z").is_err());
        assert!(level(&Base::Rational, "0").is_err());
    }

    #[test]
    fn lines() {
        let f = z(3, 1);
        assert_eq!(line(&f, "[2:1]").unwrap(), (1, 2));
        assert_eq!(line(&f, "0:2").unwrap(), (0, 1));
        assert!(line(&f, "0:0").is_err());
    }
}
