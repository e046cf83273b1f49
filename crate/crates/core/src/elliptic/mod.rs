//! Curve catalog, level structures, reduction and point counting.

pub mod curve;
pub mod finite;
pub mod qomega;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::{FieldId, Place, ResidueField};
use crate::error::{Error, Result};
pub use curve::{Curve, Point};
pub use finite::{GroupStructure, ReducedCurve, DEFAULT_COUNT_CAP};
pub use qomega::QOmega;

/// Environment variable naming an alternative catalog file.
pub const CATALOG_ENV: &str = "PERIOD_INDEX_CATALOG";

const BUILTIN_CATALOG: &str = include_str!("../../catalog/curves.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MordellWeil {
    pub rank: u32,
    pub torsion: Vec<u64>,
    pub generators: Vec<Point>,
    /// Points rational over the base of the field, when the catalog field is
    /// a Galois extension of ℚ.
    pub rational_subgroup: Vec<Point>,
    pub citation: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CatalogEntry {
    id: String,
    field: FieldId,
    model: String,
    a2: QOmega,
    a4: QOmega,
    a6: QOmega,
    level: u32,
    basis: [Point; 2],
    zeta: QOmega,
    bad_places: Vec<Place>,
    mordell_weil: MordellWeil,
}

#[derive(Deserialize)]
struct CatalogFile {
    curves: Vec<CatalogEntry>,
}

/// A catalog curve with a designated basis `(S, T)` of its level-P torsion.
#[derive(Clone, Debug)]
pub struct CurveDatum {
    pub id: String,
    pub field: FieldId,
    pub model: String,
    pub curve: Curve,
    pub level: u32,
    pub s: Point,
    pub t: Point,
    pub zeta: QOmega,
    pub bad_places: Vec<Place>,
    pub mordell_weil: MordellWeil,
}

/// Outcome of [`CurveDatum::verify_level_structure`].
#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub curve_id: String,
    pub level: u32,
    pub points_checked: usize,
    pub weil_pairing: QOmega,
    pub checks: Vec<String>,
}

impl CurveDatum {
    fn from_entry(e: CatalogEntry) -> Result<Self> {
        let [s, t] = e.basis;
        let d = CurveDatum {
            id: e.id,
            field: e.field,
            model: e.model,
            curve: Curve { a2: e.a2, a4: e.a4, a6: e.a6 },
            level: e.level,
            s,
            t,
            zeta: e.zeta,
            bad_places: e.bad_places,
            mordell_weil: e.mordell_weil,
        };
        d.verify_level_structure()?;
        Ok(d)
    }

    /// `i·S + j·T`.
    pub fn combination(&self, i: i64, j: i64) -> Point {
        let c = &self.curve;
        c.add(&c.mul(i, &self.s), &c.mul(j, &self.t))
    }

    /// All P² torsion points with their coordinates `(i, j)`, i major.
    pub fn torsion_table(&self) -> Vec<((u32, u32), Point)> {
        let n = self.level;
        let mut out = Vec::with_capacity((n * n) as usize);
        for i in 0..n {
            for j in 0..n {
                out.push(((i, j), self.combination(i as i64, j as i64)));
            }
        }
        out
    }

    /// Coordinates of a level-P torsion point in the basis `(S, T)`.
    pub fn coordinates(&self, p: &Point) -> Option<(u32, u32)> {
        self.torsion_table()
            .into_iter()
            .find(|(_, q)| q == p)
            .map(|(ij, _)| ij)
    }

    /// Re-checks the level structure: S and T on the curve and killed by P,
    /// the P² combinations distinct, and e_P(S, T) equal to the stored ζ of
    /// exact order P.
    pub fn verify_level_structure(&self) -> Result<LevelReport> {
        let c = &self.curve;
        let n = self.level;
        let fail = |m: String| Err(Error::LevelStructure(format!("{}: {m}", self.id)));
        let mut checks = Vec::new();
        if c.discriminant().is_zero() {
            return fail("singular model".into());
        }
        for (name, p) in [("S", &self.s), ("T", &self.t)] {
            if !c.contains(p) {
                return fail(format!("{name} = {p} is not on the curve"));
            }
            if !c.mul(n as i64, p).is_infinity() {
                return fail(format!("[{n}]{name} != O"));
            }
            checks.push(format!("{name} on curve, [{n}]{name} = O"));
        }
        let table = self.torsion_table();
        let mut seen = std::collections::HashSet::new();
        for (ij, p) in &table {
            if !seen.insert(p.clone()) {
                return fail(format!("combination {ij:?} repeats {p}"));
            }
        }
        checks.push(format!("{} combinations iS + jT distinct", table.len()));
        let e = c.weil_pairing(n, &self.s, &self.t)?;
        if e != self.zeta {
            return fail(format!("e_P(S, T) = {e}, catalog says {}", self.zeta));
        }
        let mut acc = QOmega::one();
        for k in 1..=n {
            acc = acc.mul(&e);
            if acc == QOmega::one() && k < n {
                return fail(format!("zeta has order {k} < {n}"));
            }
        }
        if acc != QOmega::one() {
            return fail("zeta is not a root of unity of order P".into());
        }
        checks.push(format!("e_{n}(S, T) = {e} of exact order {n}"));
        Ok(LevelReport {
            curve_id: self.id.clone(),
            level: n,
            points_checked: table.len(),
            weil_pairing: e,
            checks,
        })
    }

    pub fn is_bad(&self, v: &Place) -> bool {
        self.bad_places.contains(v)
    }

    pub fn residue_field(&self, v: &Place) -> Result<ResidueField> {
        match (self.field, v) {
            (FieldId::Eisenstein, Place::Eisenstein(pi)) => Ok(ResidueField::at(pi)),
            (FieldId::Rational, Place::Rational(p)) => Ok(ResidueField::prime_field(*p)),
            _ => Err(Error::Invalid(format!("{v} is not a finite place of {}", self.field))),
        }
    }

    /// The reduction at a good place, with its point count.
    pub fn reduce_and_count(&self, v: &Place, cap: u64) -> Result<ReducedCurve> {
        if self.is_bad(v) {
            return Err(Error::BadPlace(v.to_string()));
        }
        let f = self.residue_field(v)?;
        ReducedCurve::new(&self.curve, f, cap).map_err(|e| match e {
            Error::BadPlace(_) => Error::BadPlace(v.to_string()),
            other => other,
        })
    }

    /// Whether E(F_q)[9] ≅ (ℤ/9)², i.e. the place splits completely in the
    /// field of 9-division points.
    pub fn splits_in_nine_division_field(&self, v: &Place, cap: u64) -> Result<bool> {
        if self.is_bad(v) {
            return Err(Error::BadPlace(v.to_string()));
        }
        let q = v.q().ok_or_else(|| Error::Invalid("real place".into()))?;
        if v.characteristic() == Some(3) {
            return Err(Error::WildPlace { place: v.to_string(), n: 9 });
        }
        if q % 9 != 1 {
            return Ok(false);
        }
        let r = self.reduce_and_count(v, cap)?;
        if r.count % 81 != 0 {
            return Ok(false);
        }
        Ok(r.group_structure()?.d1 % 9 == 0)
    }
}

/// Parses a catalog file and verifies every entry.
pub fn parse_catalog(text: &str) -> Result<Vec<CurveDatum>> {
    let file: CatalogFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("catalog: {e}")))?;
    file.curves.into_iter().map(CurveDatum::from_entry).collect()
}

/// The shipped catalog, or the file named by `PERIOD_INDEX_CATALOG`.
pub fn catalog() -> Result<&'static [CurveDatum]> {
    static CATALOG: OnceLock<std::result::Result<Vec<CurveDatum>, Error>> = OnceLock::new();
    let loaded = CATALOG.get_or_init(|| match std::env::var(CATALOG_ENV) {
        Ok(path) => std::fs::read_to_string(&path)
            .map_err(|e| Error::Invalid(format!("cannot read catalog {path}: {e}")))
            .and_then(|t| parse_catalog(&t)),
        Err(_) => parse_catalog(BUILTIN_CATALOG),
    });
    loaded.as_deref().map_err(Clone::clone)
}

pub fn curve(id: &str) -> Result<&'static CurveDatum> {
    catalog()?
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::Invalid(format!("unknown curve {id:?}")))
}

/// The level-3 curve over ℚ(ζ₃): y² = x³ − 432.
pub fn fermat_cubic() -> &'static CurveDatum {
    curve("fermat-cubic").expect("builtin catalog entry")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::eis::{is_prime_u64, split_prime_above};
    use crate::arith::{EisInt, EisPrime};

    #[test]
    fn builtin_catalog_verifies() {
        let cat = catalog().unwrap();
        assert_eq!(cat.len(), 2);
        let e = fermat_cubic();
        let rep = e.verify_level_structure().unwrap();
        assert_eq!(rep.points_checked, 9);
        assert_eq!(rep.weil_pairing, QOmega::omega());
    }

    #[test]
    fn nine_inflection_points() {
        let e = fermat_cubic();
        let pts: Vec<Point> = e.torsion_table().into_iter().map(|(_, p)| p).collect();
        let expected = [
            ("0", "12+24w"),
            ("0", "-12-24w"),
            ("12", "36"),
            ("12", "-36"),
            ("12w", "36"),
            ("12w", "-36"),
            ("-12-12w", "36"),
            ("-12-12w", "-36"),
        ];
        for (x, y) in expected {
            let p = Point::affine(x, y).unwrap();
            assert!(pts.contains(&p), "{p}");
            assert!(e.curve.contains(&p));
        }
        assert!(pts.contains(&Point::Infinity));
    }

    #[test]
    fn corrupted_entries_fail() {
        let text = BUILTIN_CATALOG.replace(r#"[["0", "12+24w"], ["12", "36"]],
      "zeta""#, r#"[["0", "12+24w"], ["0", "12+24w"]],
      "zeta""#);
        assert!(matches!(parse_catalog(&text), Err(Error::LevelStructure(_))));
        // a non-torsion point: (3, 5) lies on y² = x³ − 2, not on this curve
        let e = fermat_cubic();
        let mut bad = e.clone();
        bad.curve = Curve::short(QOmega::zero(), QOmega::from_int(-2));
        bad.s = Point::affine("3", "5").unwrap();
        assert!(bad.verify_level_structure().is_err());
    }

    #[test]
    fn smallest_nine_split_place() {
        let e = fermat_cubic();
        let mut found = None;
        for p in (7u64..2000).filter(|p| p % 3 == 1 && is_prime_u64(*p)) {
            for pi in crate::arith::eis::primes_above_split(p) {
                let v = Place::Eisenstein(pi);
                if e.splits_in_nine_division_field(&v, DEFAULT_COUNT_CAP).unwrap() {
                    assert_eq!(p % 9, 1);
                    if found.is_none() {
                        found = Some((p, e.reduce_and_count(&v, DEFAULT_COUNT_CAP).unwrap().count));
                    }
                }
            }
        }
        // q = 73 with E(F_73) ≅ (ℤ/9)²
        assert_eq!(found, Some((73, 81)));
    }

    #[test]
    fn bad_place_rejected() {
        let e = fermat_cubic();
        let v = Place::Eisenstein(EisPrime::lambda());
        assert!(matches!(e.reduce_and_count(&v, DEFAULT_COUNT_CAP), Err(Error::BadPlace(_))));
        let two = Place::Eisenstein(EisPrime::new(EisInt::from_int(2)).unwrap());
        assert!(e.splits_in_nine_division_field(&two, DEFAULT_COUNT_CAP).is_err());
    }

    #[test]
    fn structure_agrees_with_frobenius_content() {
        // E(F_p) ≅ ℤ[ω]/(1 − φ) with φ an associate of the prime above p, so
        // d₁ is the content of 1 − φ
        let e = fermat_cubic();
        for p in (7u64..3000).filter(|p| p % 3 == 1 && is_prime_u64(*p)) {
            let pi = split_prime_above(p);
            let r = e.reduce_and_count(&Place::Eisenstein(pi), DEFAULT_COUNT_CAP).unwrap();
            let d1 = r.group_structure().unwrap().d1;
            let contents: Vec<u64> = (0..6)
                .flat_map(|k| [pi.value(), pi.value().conj()].map(|x| EisInt::ONE - EisInt::unit(k) * x))
                .filter(|a| a.norm() == r.count as u128)
                .map(|a| num_integer::gcd(a.a, a.b).unsigned_abs() as u64)
                .collect();
            assert!(!contents.is_empty() && contents.iter().all(|c| *c == d1), "p = {p}");
        }
    }
}
