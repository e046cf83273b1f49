//! The cubic symbol at the ramified place 1 − ω.
//!
//! K_λ^×/K_λ^{×3} is an F₃-space of dimension 4 with basis λ, ω, 1 − 3ω and
//! −2 − 6ω. Classes are read off by exhaustive cube tests modulo λ⁷. The
//! symbol is bilinear and alternating, so it is a Gram matrix on that basis;
//! its entries come from reciprocity, since each basis element is global and
//! its symbols at every other place are tame.

use std::sync::OnceLock;

use crate::arith::local::{is_power_mod_lambda, wild_precision, LambdaRing};
use crate::arith::{EisInt, EisPrime, FieldElem};
use crate::brauer::LocalInvariant;
use crate::error::Result;

use super::tame_symbol;

/// Basis of K_λ^×/K_λ^{×3}.
pub fn basis() -> [FieldElem; 4] {
    [
        FieldElem::prime(&EisPrime::lambda()),
        FieldElem::unit_elem(2),
        FieldElem::from_eis(&EisInt::new(1, -3)).unwrap(),
        FieldElem::from_eis(&EisInt::new(-2, -6)).unwrap(),
    ]
}

/// Coordinates of `x` in [`basis`], each in 0..3.
pub fn coordinates(x: &FieldElem) -> [u8; 4] {
    let m = wild_precision(3);
    let v = x.valuation(&EisPrime::lambda()).rem_euclid(3) as u8;
    let unit = x.div(&FieldElem::prime(&EisPrime::lambda()).pow(x.valuation(&EisPrime::lambda())));
    let b = basis();
    for i in 0..3u8 {
        for j in 0..3u8 {
            for k in 0..3u8 {
                let g = b[1].pow(i as i64).mul(&b[2].pow(j as i64)).mul(&b[3].pow(k as i64));
                if is_power_mod_lambda(&unit.div(&g), 3, m) {
                    return [v, i, j, k];
                }
            }
        }
    }
    unreachable!("the unit classes mod cubes are spanned by the basis")
}

fn gram() -> &'static [[u8; 4]; 4] {
    static GRAM: OnceLock<[[u8; 4]; 4]> = OnceLock::new();
    GRAM.get_or_init(|| {
        let b = basis();
        let mut g = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut sum = LocalInvariant::zero();
                let mut places: Vec<EisPrime> = b[i].support().chain(b[j].support()).copied().collect();
                places.sort();
                places.dedup();
                for v in places.iter().filter(|v| !v.is_lambda()) {
                    sum = sum.add(&tame_symbol(&b[i], &b[j], v, 3).expect("tame away from λ"));
                }
                g[i][j] = sum.neg().over(3).expect("level 3") as u8;
            }
        }
        g
    })
}

/// ⟨a, b⟩ at λ for level 3.
pub fn wild_symbol(a: &FieldElem, b: &FieldElem) -> Result<LocalInvariant> {
    let (x, y) = (coordinates(a), coordinates(b));
    let g = gram();
    let mut k = 0u32;
    for i in 0..4 {
        for j in 0..4 {
            k += x[i] as u32 * g[i][j] as u32 * y[j] as u32;
        }
    }
    Ok(LocalInvariant::new((k % 3) as i64, 3))
}

/// Number of unit classes modulo λ^m that are cubes, for diagnostics.
pub fn cube_class_count(m: u32) -> usize {
    let ring = LambdaRing::new(m);
    let cubes: std::collections::HashSet<_> = ring.units().map(|x| ring.canonical(ring.pow(x, 3))).collect();
    cubes.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_independent() {
        let b = basis();
        let mut seen = std::collections::HashSet::new();
        for c in 0..81u32 {
            let e = [c % 3, c / 3 % 3, c / 9 % 3, c / 27];
            let x = (0..4).fold(FieldElem::one(), |acc, i| acc.mul(&b[i].pow(e[i] as i64)));
            let got = coordinates(&x);
            assert_eq!(got.map(|t| t as u32), e);
            assert!(seen.insert(got));
        }
    }

    #[test]
    fn gram_is_alternating() {
        let g = gram();
        for i in 0..4 {
            assert_eq!(g[i][i], 0);
            for j in 0..4 {
                assert_eq!((g[i][j] + g[j][i]) % 3, 0);
            }
        }
        // λ = 1 − ζ₃ is the norm of 1 − ζ₉, so it pairs trivially with ω
        assert_eq!(g[0][1], 0);
        // the pairing is perfect on a 4-dimensional space
        assert_ne!(det3(g), 0, "{g:?}");
    }

    fn det3(g: &[[u8; 4]; 4]) -> i64 {
        let mut m: Vec<Vec<i64>> = g.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        let mut det = 1i64;
        for c in 0..4 {
            let Some(r) = (c..4).find(|&r| m[r][c] % 3 != 0) else { return 0 };
            if r != c {
                m.swap(r, c);
                det = -det;
            }
            det = det * m[c][c] % 3;
            let inv = if m[c][c].rem_euclid(3) == 1 { 1 } else { 2 };
            for r in c + 1..4 {
                let f = m[r][c] * inv;
                for k in 0..4 {
                    m[r][k] = (m[r][k] - f * m[c][k]).rem_euclid(3);
                }
            }
        }
        det.rem_euclid(3)
    }

    #[test]
    fn unit_cube_index() {
        // (O/λ⁷)^× has 1458 elements and 27 classes modulo cubes
        assert_eq!(cube_class_count(7), 1458 / 27);
    }
}
