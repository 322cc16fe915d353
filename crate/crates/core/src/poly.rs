//! Exact multivariate polynomials over the rationals.
//!
//! Variables are indexed `0..nvars`; for an algebra of dimension `n` the
//! tangent-bundle convention is `w1..wn` at `0..n` and `y1..yn` at `n..2n`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_q, parse_q, q, Scalar, Q};

/// Exponent vector with trailing zeros trimmed, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0u8; i + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut e: Vec<u8>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Number of leading variable slots touched (one past the last nonzero exponent).
    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut e = long.clone();
        for (k, &x) in short.iter().enumerate() {
            e[k] += x;
        }
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for k in 0..n {
                match self.exponent(k).cmp(&other.exponent(k)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
///
/// `nvars == 0` marks a constant created without context (for instance by
/// `Zero::zero()`); it is promoted to the other operand's variable count.
#[derive(Clone, Debug, Default)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero_in(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero_in(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: nvars,
            });
        }
        let mut p = Self::zero_in(nvars);
        p.terms.insert(Monomial::var(i), q(1));
        Ok(p)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero_in(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn with_nvars(mut self, nvars: usize) -> Self {
        self.nvars = self.nvars.max(nvars);
        self
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u8 {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale_by(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero_in(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: var,
                dim: self.nvars,
            });
        }
        let mut out = Self::zero_in(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let mut ex = m.0.clone();
            ex[var] -= 1;
            out.add_term(Monomial::from_exponents(ex), c * q(e as i64));
        }
        Ok(out)
    }

    /// Evaluates at `point`, which must have exactly `nvars` entries.
    pub fn evaluate<T: Scalar>(&self, point: &[T]) -> Result<T> {
        if self.nvars != 0 && point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            if m.support_len() > point.len() {
                return Err(Error::DimensionMismatch {
                    expected: m.support_len(),
                    got: point.len(),
                });
            }
            let mut t = T::from_rational(c);
            for (k, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t * point[k].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Exact rational evaluation.
    pub fn evaluate_q(&self, point: &[Q]) -> Result<Q> {
        self.evaluate(point)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        self.evaluate(point)
    }

    fn var_name(nvars: usize, k: usize) -> String {
        let n = nvars / 2;
        if nvars.is_multiple_of(2) && n > 0 {
            if k < n {
                format!("w{}", k + 1)
            } else {
                format!("y{}", k - n + 1)
            }
        } else {
            format!("x{}", k + 1)
        }
    }

    /// Renders as `(c) w1^2 y3 + (c) y1`, leading terms first; `0` for zero.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let nv = self.nvars.max(
            self.terms
                .keys()
                .map(Monomial::support_len)
                .max()
                .unwrap_or(0),
        );
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.iter().rev() {
            let mut s = format!("({})", format_q(c));
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                s.push(' ');
                s.push_str(&Self::var_name(nv, k));
                if e > 1 {
                    s.push_str(&format!("^{e}"));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }

    /// Parses the output of [`Polynomial::render`] for a polynomial in `nvars` variables.
    pub fn parse(text: &str, nvars: usize) -> Result<Self> {
        let t = text.trim();
        let mut p = Self::zero_in(nvars);
        if t == "0" {
            return Ok(p);
        }
        let bad = |msg: &str| Error::Parse(format!("polynomial `{text}`: {msg}"));
        let mut rest = t;
        loop {
            rest = rest.trim_start();
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = body.find(')').ok_or_else(|| bad("missing `)`"))?;
            let coeff = parse_q(&body[..close])?;
            let after = &body[close + 1..];
            let (factors, tail) = match after.find(" + (") {
                Some(pos) => (&after[..pos], Some(&after[pos + 3..])),
                None => (after, None),
            };
            let mut ex = vec![0u8; nvars];
            for f in factors.split_whitespace() {
                let (name, pow) = match f.split_once('^') {
                    Some((a, b)) => (a, b.parse::<u8>().map_err(|_| bad("bad exponent"))?),
                    None => (f, 1),
                };
                let idx = (0..nvars)
                    .find(|&k| Self::var_name(nvars, k) == name)
                    .ok_or_else(|| bad(&format!("unknown variable `{name}`")))?;
                ex[idx] += pow;
            }
            p.add_term(Monomial::from_exponents(ex), coeff);
            match tail {
                Some(t2) => rest = t2,
                None => break,
            }
        }
        Ok(p)
    }

    fn combine(&self, other: &Self, sign: bool) -> Self {
        let mut out = Polynomial {
            nvars: self.nvars.max(other.nvars),
            terms: self.terms.clone(),
        };
        for (m, c) in &other.terms {
            out.add_term(m.clone(), if sign { c.clone() } else { -c.clone() });
        }
        out
    }

    fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero_in(self.nvars.max(other.nvars));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        if self.terms.len() >= rhs.terms.len() {
            let mut out = self;
            out.nvars = out.nvars.max(rhs.nvars);
            for (m, c) in rhs.terms {
                out.add_term(m, c);
            }
            out
        } else {
            rhs + self
        }
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        let mut out = self;
        out.nvars = out.nvars.max(rhs.nvars);
        for (m, c) in rhs.terms {
            out.add_term(m, -c);
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, false)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, true)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        self.product(&rhs)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.product(rhs)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(mut self) -> Polynomial {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Self::zero_in(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Self::constant(0, q(1))
    }
}

impl Scalar for Polynomial {
    fn from_rational(c: &Q) -> Self {
        Self::constant(0, c.clone())
    }

    fn scale(&self, c: &Q) -> Self {
        self.scale_by(c)
    }
}

/// A vector of polynomials sharing one variable count (gradient slots).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyVector {
    pub components: Vec<Polynomial>,
}

impl PolyVector {
    pub fn new(components: Vec<Polynomial>) -> Self {
        let nv = components.iter().map(|p| p.nvars).max().unwrap_or(0);
        PolyVector {
            components: components.into_iter().map(|p| p.with_nvars(nv)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_identically_zero)
    }

    pub fn evaluate<T: Scalar>(&self, point: &[T]) -> Result<Vec<T>> {
        self.components.iter().map(|p| p.evaluate(point)).collect()
    }
}

/// The coordinate variables `(w, y)` of the tangent bundle of an `n`-dimensional group.
pub fn tangent_variables(n: usize) -> (Vec<Polynomial>, Vec<Polynomial>) {
    let nv = 2 * n;
    let w = (0..n).map(|i| Polynomial::var(nv, i).unwrap()).collect();
    let y = (0..n).map(|i| Polynomial::var(nv, n + i).unwrap()).collect();
    (w, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qf;

    fn v(nv: usize, i: usize) -> Polynomial {
        Polynomial::var(nv, i).unwrap()
    }

    #[test]
    fn product_and_derivative() {
        // n = 2: w1 w2 y1 y2
        let (w1, y2) = (v(4, 0), v(4, 3));
        let p = &w1 * &y2;
        let p2 = &p * &y2;
        assert_eq!(p2, &(&w1 * &y2) * &y2);
        assert_eq!(p2.render(), "(1) w1 y2^2");
        let d = p2.partial_derivative(3).unwrap();
        assert_eq!(d, (&w1 * &y2).scale_by(&q(2)));
        assert!(p2.partial_derivative(4).is_err());
    }

    #[test]
    fn cancellation_gives_zero() {
        let p = &v(4, 0) * &v(4, 2) + v(4, 1);
        let z = &p + &p.scale_by(&q(-1));
        assert!(z.is_identically_zero());
        assert!((&v(4, 0) - &v(4, 0)).is_identically_zero());
    }

    #[test]
    fn evaluation() {
        let p = &v(4, 0) * &v(4, 2);
        let ones = vec![q(1); 4];
        assert_eq!(p.evaluate_q(&ones).unwrap(), q(1));
        assert!(p.evaluate_q(&ones[..3]).is_err());
        let e = (&v(4, 2) * &v(4, 2) + &v(4, 3) * &v(4, 3)).scale_by(&qf(1, 2));
        assert_eq!(e.evaluate_q(&vec![q(0); 4]).unwrap(), q(0));
    }

    #[test]
    fn render_round_trip() {
        let p = (&v(6, 0) * &v(6, 0)).scale_by(&qf(-5, 12)) * v(6, 4) + v(6, 3)
            - Polynomial::constant(6, qf(1, 3));
        let s = p.render();
        let back = Polynomial::parse(&s, 6).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.render(), s);
        assert_eq!(Polynomial::parse("0", 6).unwrap(), Polynomial::zero_in(6));
    }

    #[test]
    fn graded_order() {
        let a = Monomial::from_exponents(vec![0, 2]);
        let b = Monomial::from_exponents(vec![1, 0, 0]);
        assert!(b < a);
        assert!(Monomial::from_exponents(vec![1, 1]) > Monomial::from_exponents(vec![0, 2]));
    }
}
