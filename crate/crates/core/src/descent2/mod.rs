//! A brute-force local oracle at level 2 over ℚ: conics, two-covering
//! torsors of curves with rational 2-torsion, and the versal quadric pairs.

mod padic;
mod real;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::eis::{factor_u128, is_prime_u64};
use crate::arith::Place;
use crate::error::{Error, Result};
use crate::symbols::Rat;
use padic::{normalized, search, Poly, Search};

/// Largest prime the enumerations accept.
pub const PRIME_CAP: u64 = 997;
/// Largest exponent k of the moduli p^k searched at odd p.
pub const EXPONENT_CAP: u32 = 6;
/// At 2 every gradient of a pair is even, so Jacobian minors start at
/// valuation 2 and certification needs more room.
pub const EXPONENT_CAP_AT_TWO: u32 = 10;
const BRANCH_BUDGET: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solvability {
    Solvable,
    Unsolvable,
    Inconclusive,
}

/// Squarefree integer in the square class of a nonzero rational.
fn squarefree_class(x: &Rat) -> Result<i128> {
    let n = *x.numer() as i128 * *x.denom() as i128;
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut out = n.signum();
    for (p, e) in factor_u128(n.unsigned_abs()) {
        if e % 2 == 1 {
            out *= p as i128;
        }
    }
    Ok(out)
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    Ok(())
}

/// Whether z² = ax² + by² has a nontrivial solution over ℚ_p or ℝ.
///
/// After reduction to squarefree a, b every primitive p-adic solution has
/// gradient valuation at most v(2) + 1, so the search to p³ (p⁶ at 2)
/// either certifies a point or none exists.
pub fn conic_local_solvable(a: &Rat, b: &Rat, place: &Place) -> Result<bool> {
    let (a, b) = (squarefree_class(a)?, squarefree_class(b)?);
    match place {
        Place::Real => Ok(a > 0 || b > 0),
        Place::Rational(p) => {
            check_prime(*p)?;
            if *p > PRIME_CAP {
                return Err(Error::Invalid(format!("{p} is above the enumeration cap {PRIME_CAP}")));
            }
            let f = Poly { terms: vec![(0, 0, a), (1, 1, b), (2, 2, -1)] };
            let pi = *p as i128;
            let l1 = normalized(3, *p).filter(|x| f.eval(x) % pi == 0).collect();
            let cap = if *p == 2 { 6 } else { 3 };
            Ok(matches!(search(&[f], *p, l1, cap, BRANCH_BUDGET), Search::Certified { .. }))
        }
        Place::Eisenstein(_) => Err(Error::Invalid("the level-2 oracle works over Q".into())),
    }
}

/// A ternary quadratic form with coefficients of x², y², z², xy, xz, yz.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ternary {
    pub xx: i64,
    pub yy: i64,
    pub zz: i64,
    pub xy: i64,
    pub xz: i64,
    pub yz: i64,
}

impl Ternary {
    pub fn diagonal(a: i64, b: i64, c: i64) -> Self {
        Ternary { xx: a, yy: b, zz: c, xy: 0, xz: 0, yz: 0 }
    }

    fn poly(&self) -> Poly {
        let t = [(0, 0, self.xx), (1, 1, self.yy), (2, 2, self.zz), (0, 1, self.xy), (0, 2, self.xz), (1, 2, self.yz)];
        Poly { terms: t.iter().filter(|x| x.2 != 0).map(|&(i, j, c)| (i, j, c as i128)).collect() }
    }

    /// Twice the Gram matrix.
    fn gram2(&self) -> [[i128; 3]; 3] {
        let (a, b, c) = (self.xx as i128, self.yy as i128, self.zz as i128);
        let (d, e, f) = (self.xy as i128, self.xz as i128, self.yz as i128);
        [[2 * a, d, e], [d, 2 * b, f], [e, f, 2 * c]]
    }

    fn is_diagonal(&self) -> bool {
        self.xy == 0 && self.xz == 0 && self.yz == 0
    }

    fn render(&self, vars: &[String]) -> String {
        let t = [
            (self.xx, format!("{}^2", vars[0])),
            (self.yy, format!("{}^2", vars[1])),
            (self.zz, format!("{}^2", vars[2])),
            (self.xy, format!("{}{}", vars[0], vars[1])),
            (self.xz, format!("{}{}", vars[0], vars[2])),
            (self.yz, format!("{}{}", vars[1], vars[2])),
        ];
        let mut s = String::new();
        for (c, m) in t.iter().filter(|x| x.0 != 0) {
            let sign = if *c < 0 { "-" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            if s.is_empty() {
                s = format!("{}{mag}{m}", if *c < 0 { "-" } else { "" });
            } else {
                s = format!("{s} {sign} {mag}{m}");
            }
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

/// The curve {conic(x, y, z) = 0, k·w² = rhs(x, y, z)} in ℙ³.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricPair {
    pub variables: [String; 4],
    pub conic: Ternary,
    pub w_coeff: i64,
    pub rhs: Ternary,
}

impl QuadricPair {
    fn new(vars: [&str; 4], conic: Ternary, w_coeff: i64, rhs: Ternary) -> Result<Self> {
        if !conic.is_diagonal() || conic.xx == 0 || conic.yy == 0 || conic.zz == 0 || w_coeff == 0 {
            return Err(Error::Invalid("the conic must be diagonal and nondegenerate, the w coefficient nonzero".into()));
        }
        if rhs == Ternary::diagonal(0, 0, 0) {
            return Err(Error::Invalid("zero second form".into()));
        }
        Ok(QuadricPair { variables: vars.map(String::from), conic, w_coeff, rhs })
    }

    /// The two equations as text.
    pub fn equations(&self) -> [String; 2] {
        let v = &self.variables;
        let k = match self.w_coeff {
            1 => String::new(),
            -1 => "-".into(),
            c => c.to_string(),
        };
        [format!("{} = 0", self.conic.render(&v[..3])), format!("{k}{}^2 = {}", v[3], self.rhs.render(&v[..3]))]
    }

    fn polys(&self) -> [Poly; 2] {
        let mut second = self.rhs.poly();
        for t in second.terms.iter_mut() {
            t.2 = -t.2;
        }
        second.terms.push((3, 3, self.w_coeff as i128));
        [self.conic.poly(), second]
    }

    /// Solutions modulo p with first unit coordinate 1: points of the conic,
    /// then the square roots of rhs/k.
    fn level_one(&self, p: u64) -> Vec<Vec<i128>> {
        let pi = p as i128;
        let [c, _] = self.polys();
        let rhs = self.rhs.poly();
        let k = (self.w_coeff as i128).rem_euclid(pi);
        let mut out = Vec::new();
        for x in normalized(3, p) {
            if c.eval(&x).rem_euclid(pi) != 0 {
                continue;
            }
            let r = rhs.eval(&x).rem_euclid(pi);
            for w in 0..pi {
                if (k * w * w - r).rem_euclid(pi) == 0 {
                    out.push(vec![x[0], x[1], x[2], w]);
                }
            }
        }
        if k == 0 {
            out.push(vec![0, 0, 0, 1]);
        }
        out
    }
}

/// The torsor of the class (a, b) on y² = (x − e₁)(x − e₂)(x − e₃):
/// a u² − b v² = (e₂ − e₁) t², a u² − ab w² = (e₃ − e₁) t².
///
/// Rational roots are scaled by a common d² first, an isomorphism that
/// leaves the class unchanged.
pub fn two_covering_torsor(e: [Rat; 3], a: i64, b: i64) -> Result<QuadricPair> {
    if e[0] == e[1] || e[0] == e[2] || e[1] == e[2] {
        return Err(Error::Invalid("the roots must be distinct".into()));
    }
    for x in [a, b] {
        if x == 0 || squarefree_class(&Rat::from_integer(x))? != x as i128 {
            return Err(Error::Invalid(format!("{x} is not a nonzero squarefree integer")));
        }
    }
    let d = e.iter().fold(1i64, |acc, x| num_integer::lcm(acc, *x.denom()));
    let r: Vec<i64> = e.iter().map(|x| (x * Rat::from_integer(d * d)).to_integer()).collect();
    let (c2, c3) = (r[1] - r[0], r[2] - r[0]);
    QuadricPair::new(
        ["u", "v", "t", "w"],
        Ternary::diagonal(a, -b, -c2),
        a * b,
        Ternary::diagonal(a, 0, -c3),
    )
}

/// Local solvability of a quadric pair at a rational prime or the real
/// place; inconclusive when the caps are reached.
pub fn torsor_local_solvable(q: &QuadricPair, place: &Place) -> Result<Solvability> {
    match place {
        Place::Real => {
            let d = [q.conic.xx as i128, q.conic.yy as i128, q.conic.zz as i128];
            let s = (q.w_coeff as i128).signum();
            let m = q.rhs.gram2().map(|row| row.map(|x| x * s));
            Ok(real::decide(d, m))
        }
        Place::Rational(p) => {
            check_prime(*p)?;
            if *p > PRIME_CAP {
                return Ok(Solvability::Inconclusive);
            }
            let cap = if *p == 2 { EXPONENT_CAP_AT_TWO } else { EXPONENT_CAP };
            Ok(match search(&q.polys(), *p, q.level_one(*p), cap, BRANCH_BUDGET) {
                Search::Certified { .. } => Solvability::Solvable,
                Search::Dead { .. } => Solvability::Unsolvable,
                Search::Alive { .. } => Solvability::Inconclusive,
            })
        }
        Place::Eisenstein(_) => Err(Error::Invalid("the level-2 oracle works over Q".into())),
    }
}

/// t₁X² + t₂Y² = Z², W² = t₃X² + t₄XY + t₅XZ + t₆Y² + t₇YZ + t₈Z².
pub fn versal_pair(t: [i64; 8]) -> Result<QuadricPair> {
    let rhs = Ternary { xx: t[2], xy: t[3], xz: t[4], yy: t[5], yz: t[6], zz: t[7] };
    let q = QuadricPair::new(["X", "Y", "Z", "W"], Ternary::diagonal(t[0], t[1], -1), 1, rhs)?;
    if pencil_discriminant(&q) == 0 {
        return Err(Error::Invalid(format!("{t:?} lies on the discriminant locus")));
    }
    Ok(q)
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Discriminant of the binary cubic det(λ·C + Q); zero exactly when the two
/// conics fail to meet in four distinct points.
fn pencil_discriminant(q: &QuadricPair) -> i128 {
    let (c, r) = (q.conic.gram2(), q.rhs.gram2());
    let at = |l: i128| {
        let mut m = [[0i128; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = l * c[i][j] - r[i][j];
            }
        }
        det3(&m)
    };
    // interpolate f(λ) = a λ³ + b λ² + c λ + d from four values
    let (f0, f1, fm, f2) = (at(0), at(1), at(-1), at(2));
    let d = f0;
    let b = (f1 + fm - 2 * d) / 2;
    let a_plus_c = (f1 - fm) / 2;
    // f(2) = 8a + 4b + 2c + d
    let a = (f2 - 4 * b - d - 2 * a_plus_c) / 6;
    let c3 = a_plus_c - a;
    b * b * c3 * c3 - 4 * a * c3 * c3 * c3 - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c3 * d
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalEntry {
    pub place: Place,
    pub result: Solvability,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersalReport {
    pub t: [i64; 8],
    pub equations: [String; 2],
    pub table: Vec<LocalEntry>,
    /// True when every listed place is solvable, false when one is not,
    /// absent when the table has inconclusive entries and no failure.
    pub everywhere_locally_solvable: Option<bool>,
}

pub fn versal_sample(t: [i64; 8], places: &[Place]) -> Result<VersalReport> {
    let q = versal_pair(t)?;
    let table = places
        .iter()
        .map(|v| Ok(LocalEntry { place: *v, result: torsor_local_solvable(&q, v)? }))
        .collect::<Result<Vec<_>>>()?;
    let flag = if table.iter().any(|x| x.result == Solvability::Unsolvable) {
        Some(false)
    } else if table.iter().all(|x| x.result == Solvability::Solvable) {
        Some(true)
    } else {
        None
    };
    Ok(VersalReport { t, equations: q.equations(), table, everywhere_locally_solvable: flag })
}

/// `count` parameter vectors with entries in [−range, range], drawn from a
/// seeded stream and kept when off the discriminant locus.
pub fn random_versal_parameters(seed: u64, count: usize, range: i64) -> Vec<[i64; 8]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t: [i64; 8] = std::array::from_fn(|_| rng.gen_range(-range..=range));
        if versal_pair(t).is_ok() {
            out.push(t);
        }
    }
    out
}
