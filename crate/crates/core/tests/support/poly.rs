//! Sparse multivariate polynomials over exact rationals, used to re-derive
//! the quadratic forms by symbolic expansion of the proof's intermediate
//! displays. Shares no code with the library's form builders.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use bubblecert::forms::{Params, QuadForm};
use bubblecert::rational::int;
use bubblecert::Rational;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Poly { nvars, terms }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly { nvars, terms: BTreeMap::from([(e, int(1))]) }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Poly::constant(self.nvars, Rational::zero());
        for (e, v) in &self.terms {
            out.push(e.clone(), v * c);
        }
        out
    }

    pub fn square(&self) -> Self {
        self * self
    }

    fn push(&mut self, e: Vec<u32>, v: Rational) {
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficient of `vᵢvⱼ` (of `vᵢ²` when `i == j`).
    pub fn quadratic_coeff(&self, i: usize, j: usize) -> Rational {
        let mut e = vec![0; self.nvars];
        e[i] += 1;
        e[j] += 1;
        self.coeff(&e)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.push(e.clone(), v.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&int(-1))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::constant(self.nvars, Rational::zero());
        for (e1, v1) in &self.terms {
            for (e2, v2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.push(e, v1 * v2);
            }
        }
        out
    }
}

/// Every entry of `form` against the expanded polynomial: diagonal entries
/// equal the square coefficients, off-diagonal entries half the mixed ones.
pub fn mismatches(form: &QuadForm, poly: &Poly) -> Vec<String> {
    let mut out = Vec::new();
    if poly.max_degree() > 2 || !poly.coeff(&vec![0; form.dim()]).is_zero() {
        out.push("expansion is not a homogeneous quadratic".to_string());
    }
    for i in 0..form.dim() {
        for j in 0..form.dim() {
            let expected = if i == j { poly.quadratic_coeff(i, i) } else { poly.quadratic_coeff(i, j) / int(2) };
            if form.matrix()[i][j] != expected {
                out.push(format!("entry ({i},{j}): form {} vs expansion {}", form.matrix()[i][j], expected));
            }
        }
    }
    out
}

fn scalars(params: &Params) -> (Rational, Rational, Rational) {
    (int(i64::from(params.n())), params.a().clone(), params.alpha().clone())
}

/// `P` from the last display before `K̄₁₁ = x, K̄₂₂ = y` are substituted:
/// `(n−1 − a(n²+4n−4)/4)ω² + a·(H̄−x−y)²/(n−2) + (a−1)x² + (a−α)y² − αxy − n(x+αy)ω`
/// with `H̄ = −nω`. Variables `(x, y, ω)`.
pub fn p_from_trace_bound(params: &Params) -> Poly {
    let (n, a, al) = scalars(params);
    let v = |i| Poly::var(3, i);
    let (x, y, w) = (v(0), v(1), v(2));
    let nm2 = &n - int(2);
    let hbar = w.scale(&-n.clone());
    let rest = &(&hbar - &x) - &y;

    let omega_coeff = &n - int(1) - &a * (&n * &n + int(4) * &n - int(4)) / int(4);
    let mut p = w.square().scale(&omega_coeff);
    p = &p + &rest.square().scale(&(&a / &nm2));
    p = &p + &x.square().scale(&(&a - int(1)));
    p = &p + &y.square().scale(&(&a - &al));
    p = &p - &(&x * &y).scale(&al);
    let lin = &x + &y.scale(&al);
    p = &p - &(&lin * &w).scale(&n);
    p
}

/// `P` from the final collected display of the same estimate.
pub fn p_from_collected(params: &Params) -> Poly {
    let (n, a, al) = scalars(params);
    let v = |i| Poly::var(3, i);
    let (x, y, w) = (v(0), v(1), v(2));
    let nm2 = &n - int(2);
    let two_a = int(2) * &a / &nm2;
    let omega_coeff = &n - int(1) - &a * (&n * &n + int(4) * &n - int(4)) / int(4) + &a * &n * &n / &nm2;
    let mut p = w.square().scale(&omega_coeff);
    p = &p + &x.square().scale(&(&a - int(1) + &a / &nm2));
    p = &p + &y.square().scale(&(&a - &al + &a / &nm2));
    p = &p + &(&x * &y).scale(&(&two_a - &al));
    let lin = &x.scale(&(&two_a - int(1))) + &y.scale(&(&two_a - &al));
    p = &p + &(&lin * &w).scale(&n);
    p
}

/// `Q` from the second-fundamental-form chain
/// `αzH + (H−z)²/(n−2) + (1−α)z² + (H−h)²/a − H(H−h)`. Variables `(H, z, h)`.
pub fn q_from_chain(params: &Params) -> Poly {
    let (n, a, al) = scalars(params);
    let v = |i| Poly::var(3, i);
    let (hm, z, h) = (v(0), v(1), v(2));
    let nm2 = &n - int(2);
    let mut q = (&z * &hm).scale(&al);
    q = &q + &(&hm - &z).square().scale(&nm2.recip());
    q = &q + &z.square().scale(&(int(1) - &al));
    q = &q + &(&hm - &h).square().scale(&a.recip());
    q = &q - &(&hm * &(&hm - &h));
    q
}

/// `Q` from the collected display
/// `(1/(n−2)+1/a−1)H² + (1−α+1/(n−2))z² + (α−2/(n−2))zH + (1−2/a)Hh + h²/a`.
pub fn q_from_collected(params: &Params) -> Poly {
    let (n, a, al) = scalars(params);
    let v = |i| Poly::var(3, i);
    let (hm, z, h) = (v(0), v(1), v(2));
    let inv = (&n - int(2)).recip();
    let ia = a.recip();
    let mut q = hm.square().scale(&(&inv + &ia - int(1)));
    q = &q + &z.square().scale(&(int(1) - &al + &inv));
    q = &q + &(&z * &hm).scale(&(&al - int(2) * &inv));
    q = &q + &(&hm * &h).scale(&(int(1) - int(2) * &ia));
    q = &q + &h.square().scale(&ia);
    q
}

/// Constant term `α(n−2) − a((n−2)/2)²` left over by the same estimate.
pub fn delta_from_expansion(params: &Params) -> Rational {
    let (n, a, al) = scalars(params);
    let nm2 = &n - int(2);
    &al * &nm2 - &a * &nm2 * &nm2 / int(4)
}
