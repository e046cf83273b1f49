//! Residue fields of ℤ[ω] (and of ℤ) at finite places.
//!
//! A residue field is F_p (split primes, the ramified prime, rational primes)
//! or F_{p²} = F_p[ω] (inert primes). Elements are pairs `(c0, c1)` meaning
//! `c0 + c1·ω̄`; for degree-one fields `c1` is always zero.

use serde::{Deserialize, Serialize};

use super::eis::{mulmod, powmod, EisInt, EisPrime};

/// An element `c0 + c1·ω̄` of a residue field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fq(pub u64, pub u64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    f: u32,
    /// image of ω
    omega: Fq,
}

impl ResidueField {
    /// The residue field of ℤ[ω] at `prime`.
    pub fn at(prime: &EisPrime) -> Self {
        let x = prime.value();
        let p = prime.characteristic();
        if prime.is_lambda() {
            return ResidueField { p: 3, f: 1, omega: Fq(1, 0) };
        }
        if prime.degree() == 2 {
            return ResidueField { p, f: 2, omega: Fq(0, 1) };
        }
        // a + bω ≡ 0 forces ω ≡ −a/b
        let a = x.a.rem_euclid(p as i128) as u64;
        let b = x.b.rem_euclid(p as i128) as u64;
        let binv = powmod(b, p - 2, p);
        let r = mulmod((p - a) % p, binv, p);
        ResidueField { p, f: 1, omega: Fq(r, 0) }
    }

    /// F_p, for places of ℚ.
    pub fn prime_field(p: u64) -> Self {
        ResidueField { p, f: 1, omega: Fq(0, 0) }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn zero(&self) -> Fq {
        Fq(0, 0)
    }

    pub fn one(&self) -> Fq {
        Fq(1 % self.p, 0)
    }

    pub fn omega(&self) -> Fq {
        self.omega
    }

    pub fn from_int(&self, x: i128) -> Fq {
        Fq(x.rem_euclid(self.p as i128) as u64, 0)
    }

    pub fn reduce(&self, x: &EisInt) -> Fq {
        let a = self.from_int(x.a);
        let b = self.from_int(x.b);
        self.add(a, self.mul(b, self.omega))
    }

    pub fn add(&self, x: Fq, y: Fq) -> Fq {
        Fq((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    pub fn sub(&self, x: Fq, y: Fq) -> Fq {
        Fq((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }

    pub fn neg(&self, x: Fq) -> Fq {
        self.sub(self.zero(), x)
    }

    pub fn mul(&self, x: Fq, y: Fq) -> Fq {
        let p = self.p;
        if self.f == 1 {
            return Fq(mulmod(x.0, y.0, p), 0);
        }
        // (x0 + x1 w)(y0 + y1 w) with w² = −1 − w
        let x0y0 = mulmod(x.0, y.0, p);
        let x1y1 = mulmod(x.1, y.1, p);
        let cross = (mulmod(x.0, y.1, p) + mulmod(x.1, y.0, p)) % p;
        Fq((x0y0 + p - x1y1) % p, (cross + p - x1y1) % p)
    }

    pub fn square(&self, x: Fq) -> Fq {
        self.mul(x, x)
    }

    pub fn pow(&self, mut x: Fq, mut e: u64) -> Fq {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, x: Fq) -> bool {
        x.0 == 0 && x.1 == 0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: Fq) -> Option<Fq> {
        if self.is_zero(x) {
            return None;
        }
        if self.f == 1 {
            return Some(Fq(inv_mod(x.0, self.p), 0));
        }
        // x · conj(x) = N(x) ∈ F_p, with conj(c0 + c1 w) = (c0 − c1) − c1 w
        let conj = Fq((x.0 + self.p - x.1) % self.p, (self.p - x.1) % self.p);
        let n = self.mul(x, conj);
        debug_assert_eq!(n.1, 0);
        let ninv = inv_mod(n.0, self.p);
        Some(self.mul(conj, Fq(ninv, 0)))
    }

    /// Dense index in `0..q`.
    pub fn index(&self, x: Fq) -> usize {
        (x.0 + self.p * x.1) as usize
    }

    pub fn from_index(&self, i: usize) -> Fq {
        let i = i as u64;
        Fq(i % self.p, i / self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q() as usize).map(move |i| self.from_index(i))
    }

    /// Quadratic character: 1, −1, or 0.
    pub fn legendre(&self, x: Fq) -> i32 {
        if self.is_zero(x) {
            return 0;
        }
        let t = self.pow(x, (self.q() - 1) / 2);
        if t == self.one() {
            1
        } else {
            -1
        }
    }

    /// A square root, if one exists (odd characteristic).
    pub fn sqrt(&self, x: Fq) -> Option<Fq> {
        if self.is_zero(x) {
            return Some(x);
        }
        if self.legendre(x) != 1 {
            return None;
        }
        // Tonelli–Shanks in the cyclic group of order q − 1
        let q1 = self.q() - 1;
        let s = q1.trailing_zeros();
        let odd = q1 >> s;
        let z = self
            .elements()
            .skip(1)
            .find(|g| self.legendre(*g) == -1)
            .expect("odd field has a nonresidue");
        let mut m = s;
        let mut c = self.pow(z, odd);
        let mut t = self.pow(x, odd);
        let mut r = self.pow(x, odd.div_ceil(2));
        while t != self.one() {
            let mut i = 0;
            let mut tt = t;
            while tt != self.one() {
                tt = self.square(tt);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.square(b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: Fq) -> u64 {
        let mut ord = self.q() - 1;
        for (l, _) in super::eis::factor_u128(ord as u128) {
            let l = l as u64;
            while ord.is_multiple_of(l) && self.pow(x, ord / l) == self.one() {
                ord /= l;
            }
        }
        ord
    }

    /// The residue image of the global root of unity of order `n` used by
    /// the symbol convention: ω̄ for n = 3, −1 for n = 2, and for n = 9 the
    /// smallest (by index) primitive 9th root whose cube is ω̄.
    pub fn root_of_unity(&self, n: u64) -> Option<Fq> {
        let q1 = self.q() - 1;
        if n == 0 || !q1.is_multiple_of(n) {
            return None;
        }
        match n {
            1 => Some(self.one()),
            2 => Some(self.neg(self.one())),
            3 => Some(self.omega),
            9 => {
                let prim = self
                    .elements()
                    .skip(1)
                    .map(|g| self.pow(g, q1 / 9))
                    .find(|z| self.order(*z) == 9)?;
                (1..9)
                    .map(|k| self.pow(prim, k))
                    .filter(|z| self.order(*z) == 9 && self.pow(*z, 3) == self.omega)
                    .min_by_key(|z| self.index(*z))
            }
            _ => None,
        }
    }

    /// Discrete log of `t` to base `zeta` within μ_n.
    pub fn dlog(&self, t: Fq, zeta: Fq, n: u64) -> Option<u64> {
        let mut acc = self.one();
        for k in 0..n {
            if acc == t {
                return Some(k);
            }
            acc = self.mul(acc, zeta);
        }
        None
    }
}

pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}
