//! The Galois action of ℚ(ζ₃)/ℚ on the level-P basis, the explicit norm on
//! Kummer pairs, and the invariance check that arbitrates between the two
//! forms of the norm.

use serde::{Deserialize, Serialize};

use crate::arith::{FieldElem, FieldId};
use crate::elliptic::{CurveDatum, Point};
use crate::error::{Error, Result};
use crate::obstruction::{phi, KummerClass};

/// An element of Gal(K_P/K) with its matrix on the basis (S, T): the images
/// are σS = iS + kT and σT = jS + ℓT, stored as rows [[i, j], [k, ℓ]].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisElement {
    pub name: String,
    pub matrix: [[u32; 2]; 2],
    pub det: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisAction {
    pub base: FieldId,
    pub extension: FieldId,
    pub level: u32,
    pub elements: Vec<GaloisElement>,
}

fn apply(name: &str, p: &Point) -> Point {
    if name == "conj" {
        p.conj()
    } else {
        p.clone()
    }
}

fn apply_elem(name: &str, x: &FieldElem) -> FieldElem {
    if name == "conj" {
        x.conj()
    } else {
        x.clone()
    }
}

fn mat_mul(a: &[[u32; 2]; 2], b: &[[u32; 2]; 2], n: u32) -> [[u32; 2]; 2] {
    let mut c = [[0u32; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % n;
        }
    }
    c
}

fn inverse_mod(x: u32, n: u32) -> Option<u32> {
    (1..n).find(|y| x * y % n == 1)
}

/// Matrices of the identity and complex conjugation, solved from the
/// torsion table and checked against the Weil pairing.
pub fn galois_action(e: &CurveDatum) -> Result<GaloisAction> {
    if e.field != FieldId::Eisenstein {
        return Err(Error::Invalid(format!("{} is not defined over Q(zeta3)", e.id)));
    }
    let c = &e.curve;
    if ![&c.a2, &c.a4, &c.a6].iter().all(|x| x.is_rational()) {
        return Err(Error::Invalid(format!("{} is not defined over Q", e.id)));
    }
    let n = e.level;
    let mut elements = Vec::new();
    for name in ["id", "conj"] {
        let (i, k) = e
            .coordinates(&apply(name, &e.s))
            .ok_or_else(|| Error::LevelStructure("σS outside the torsion table".into()))?;
        let (j, l) = e
            .coordinates(&apply(name, &e.t))
            .ok_or_else(|| Error::LevelStructure("σT outside the torsion table".into()))?;
        let det = (i * l + n * n - j * k) % n;
        // e_P(σS, σT) = σ(ζ) = ζ^det
        let lhs = c.weil_pairing(n, &apply(name, &e.s), &apply(name, &e.t))?;
        let rhs = if name == "conj" { e.zeta.conj() } else { e.zeta.clone() };
        if lhs != rhs || e.zeta.pow(det) != rhs {
            return Err(Error::LevelStructure(format!("det of {name} disagrees with the Weil pairing")));
        }
        elements.push(GaloisElement { name: name.into(), matrix: [[i, j], [k, l]], det });
    }
    let act = GaloisAction { base: FieldId::Rational, extension: FieldId::Eisenstein, level: n, elements };
    act.check_homomorphism()?;
    Ok(act)
}

impl GaloisAction {
    pub fn element(&self, name: &str) -> Option<&GaloisElement> {
        self.elements.iter().find(|g| g.name == name)
    }

    /// σ ↦ M_σ respects the group law of the order-2 group.
    pub fn check_homomorphism(&self) -> Result<()> {
        let n = self.level;
        let id = self.element("id").ok_or_else(|| Error::Invalid("no identity".into()))?;
        let s = self.element("conj").ok_or_else(|| Error::Invalid("no conjugation".into()))?;
        let eye = [[1, 0], [0, 1]];
        if id.matrix != eye {
            return Err(Error::LevelStructure("identity does not act trivially".into()));
        }
        if mat_mul(&s.matrix, &s.matrix, n) != eye {
            return Err(Error::LevelStructure("conjugation squared is not the identity".into()));
        }
        Ok(())
    }
}

/// (a, b) ↦ (a^i b^j, a^k b^ℓ).
fn act_matrix(m: &[[u32; 2]; 2], a: &FieldElem, b: &FieldElem) -> (FieldElem, FieldElem) {
    (
        a.pow(m[0][0] as i64).mul(&b.pow(m[0][1] as i64)),
        a.pow(m[1][0] as i64).mul(&b.pow(m[1][1] as i64)),
    )
}

fn scaled(g: &GaloisElement, n: u32) -> Result<[[u32; 2]; 2]> {
    let inv = inverse_mod(g.det, n).ok_or_else(|| Error::LevelStructure("singular Galois matrix".into()))?;
    Ok(g.matrix.map(|row| row.map(|x| x * inv % n)))
}

/// Which matrix the norm uses for each σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormForm {
    /// ∏ (σa^{i(σ)} σb^{j(σ)}, σa^{k(σ)} σb^{ℓ(σ)}).
    Verbatim,
    /// The same product with M_σ/det M_σ in place of M_σ.
    DetTwisted,
}

/// The class Nm θ = res∘cores θ, as a pair over K_P.
pub fn nm_corestrict(theta: &KummerClass, act: &GaloisAction, form: NormForm) -> Result<KummerClass> {
    let e = theta.curve()?;
    let n = theta.level;
    let (mut a, mut b) = (FieldElem::one(), FieldElem::one());
    for g in &act.elements {
        let m = match form {
            NormForm::Verbatim => g.matrix,
            NormForm::DetTwisted => scaled(g, n)?,
        };
        let (x, y) = act_matrix(&m, &apply_elem(&g.name, &theta.a), &apply_elem(&g.name, &theta.b));
        a = a.mul(&x);
        b = b.mul(&y);
    }
    phi(&a, &b, n, e)
}

/// θ^σ = Φ((M_σ/det M_σ)(σa, σb)).
pub fn conjugate_class(theta: &KummerClass, g: &GaloisElement) -> Result<KummerClass> {
    let e = theta.curve()?;
    let m = scaled(g, theta.level)?;
    let (a, b) = act_matrix(&m, &apply_elem(&g.name, &theta.a), &apply_elem(&g.name, &theta.b));
    phi(&a, &b, theta.level, e)
}

/// Outcome of comparing Nm(θ^σ) with Nm(θ) under both norm forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub theta: PairRepr,
    pub verbatim_invariant: bool,
    pub det_twisted_invariant: bool,
    /// Set when the verbatim product fails to be Galois-invariant.
    pub det_discrepancy: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRepr {
    pub a: FieldElem,
    pub b: FieldElem,
}

impl From<&KummerClass> for PairRepr {
    fn from(x: &KummerClass) -> Self {
        PairRepr { a: x.a.clone(), b: x.b.clone() }
    }
}

pub fn invariance_report(theta: &KummerClass, act: &GaloisAction) -> Result<InvarianceReport> {
    let mut ok = [true, true];
    let mut detail = Vec::new();
    for g in act.elements.iter().filter(|g| g.name != "id") {
        let conj = conjugate_class(theta, g)?;
        for (slot, form) in [NormForm::Verbatim, NormForm::DetTwisted].into_iter().enumerate() {
            let lhs = nm_corestrict(&conj, act, form)?;
            let rhs = nm_corestrict(theta, act, form)?;
            if lhs != rhs {
                ok[slot] = false;
                detail.push(format!(
                    "{form:?}: Nm(theta^{}) = ({}, {}) but Nm(theta) = ({}, {})",
                    g.name, lhs.a, lhs.b, rhs.a, rhs.b
                ));
            }
        }
    }
    Ok(InvarianceReport {
        theta: theta.into(),
        verbatim_invariant: ok[0],
        det_twisted_invariant: ok[1],
        det_discrepancy: !ok[0],
        detail: if detail.is_empty() { "invariant".into() } else { detail.join("; ") },
    })
}
