//! Exhaustive search for primitive solutions modulo p^k, with Hensel
//! certification of liftable branches.

/// A quadratic form Σ c·x_i·x_j.
#[derive(Clone, Debug)]
pub(crate) struct Poly {
    pub terms: Vec<(usize, usize, i128)>,
}

impl Poly {
    pub fn eval(&self, x: &[i128]) -> i128 {
        self.terms.iter().map(|&(i, j, c)| c * x[i] * x[j]).sum()
    }

    pub fn partial(&self, x: &[i128], k: usize) -> i128 {
        self.terms
            .iter()
            .map(|&(i, j, c)| match (i == k, j == k) {
                (true, true) => 2 * c * x[k],
                (true, false) => c * x[j],
                (false, true) => c * x[i],
                _ => 0,
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Search {
    /// A solution modulo p^j whose Jacobian minor has valuation μ with
    /// j ≥ 2μ + 1, hence a p-adic point.
    Certified { level: u32 },
    /// No primitive solution modulo p^level.
    Dead { level: u32 },
    /// Branches survive uncertified at the cap or the budget ran out.
    Alive { level: u32, branches: usize },
}

fn val(x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let (mut x, mut v) = (x, 0);
    while x % p == 0 && v < cap {
        x /= p;
        v += 1;
    }
    v
}

fn certified(polys: &[Poly], x: &[i128], p: i128, j: u32) -> bool {
    let n = x.len();
    let jac: Vec<Vec<i128>> = polys.iter().map(|f| (0..n).map(|k| f.partial(x, k)).collect()).collect();
    let mu = match polys.len() {
        1 => jac[0].iter().map(|&d| val(d, p, j)).min().unwrap_or(j),
        2 => {
            let mut m = j;
            for a in 0..n {
                for b in a + 1..n {
                    m = m.min(val(jac[0][a] * jac[1][b] - jac[0][b] * jac[1][a], p, j));
                }
            }
            m
        }
        _ => unreachable!("systems of one or two forms"),
    };
    mu < j && j > 2 * mu
}

/// Solutions δ ∈ F_p^n, δ_t = 0, of A δ ≡ r (mod p).
fn affine_solutions(a: &[Vec<i128>], r: &[i128], p: i128, t: usize) -> Vec<Vec<i128>> {
    let n = a.first().map_or(0, |row| row.len());
    let cols: Vec<usize> = (0..n).filter(|&k| k != t).collect();
    let mut rows: Vec<Vec<i128>> = a
        .iter()
        .zip(r)
        .map(|(row, &ri)| cols.iter().map(|&k| row[k].rem_euclid(p)).chain([ri.rem_euclid(p)]).collect())
        .collect();
    let inv = |x: i128| -> i128 {
        let (mut r, mut b, mut e) = (1i128, x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let m = cols.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..m {
        let Some(pr) = (row..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(row, pr);
        let iv = inv(rows[row][c]);
        for x in rows[row].iter_mut() {
            *x = *x * iv % p;
        }
        for i in 0..rows.len() {
            if i != row && rows[i][c] != 0 {
                let f = rows[i][c];
                for k in 0..=m {
                    rows[i][k] = (rows[i][k] - f * rows[row][k]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    if rows[row..].iter().any(|r| r[m] != 0) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let count = (p as usize).pow(free.len() as u32);
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let mut d = vec![0i128; m];
        let mut rest = idx;
        for &f in &free {
            d[f] = (rest % p as usize) as i128;
            rest /= p as usize;
        }
        for (ri, &c) in pivots.iter().enumerate() {
            let s: i128 = free.iter().map(|&f| rows[ri][f] * d[f]).sum();
            d[c] = (rows[ri][m] - s).rem_euclid(p);
        }
        let mut full = vec![0i128; n];
        for (k, &c) in cols.iter().enumerate() {
            full[c] = d[k];
        }
        out.push(full);
    }
    out
}

/// Runs the lifting tree from the given solutions modulo p (primitive, with
/// their first unit coordinate equal to 1) up to level `cap`.
pub(crate) fn search(polys: &[Poly], p: u64, level1: Vec<Vec<i128>>, cap: u32, budget: usize) -> Search {
    let p = p as i128;
    let mut branches = level1;
    let mut pj = p;
    for j in 1..=cap {
        if branches.is_empty() {
            return Search::Dead { level: j };
        }
        if branches.iter().any(|x| certified(polys, x, p, j)) {
            return Search::Certified { level: j };
        }
        if j == cap {
            break;
        }
        let mut next = Vec::new();
        for x in &branches {
            let t = x.iter().position(|c| c % p != 0).expect("primitive");
            let a: Vec<Vec<i128>> = polys.iter().map(|f| (0..x.len()).map(|k| f.partial(x, k)).collect()).collect();
            let r: Vec<i128> = polys.iter().map(|f| -(f.eval(x) / pj)).collect();
            for d in affine_solutions(&a, &r, p, t) {
                next.push(x.iter().zip(&d).map(|(xi, di)| xi + pj * di).collect());
            }
            if next.len() > budget {
                return Search::Alive { level: j, branches: next.len() };
            }
        }
        branches = next;
        pj *= p;
    }
    Search::Alive { level: cap, branches: branches.len() }
}

/// Primitive vectors modulo p with first unit coordinate 1.
pub(crate) fn normalized(n: usize, p: u64) -> impl Iterator<Item = Vec<i128>> {
    let p = p as i128;
    (0..n).flat_map(move |t| {
        let free = n - t - 1;
        (0..p.pow(free as u32)).map(move |mut idx| {
            let mut x = vec![0i128; n];
            x[t] = 1;
            for k in t + 1..n {
                x[k] = idx % p;
                idx /= p;
            }
            x
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conic(a: i128, b: i128) -> Poly {
        Poly { terms: vec![(0, 0, a), (1, 1, b), (2, 2, -1)] }
    }

    fn run(a: i128, b: i128, p: u64) -> Search {
        let f = conic(a, b);
        let l1 = normalized(3, p).filter(|x| f.eval(x) % p as i128 == 0).collect();
        search(&[f], p, l1, if p == 2 { 6 } else { 3 }, 1 << 20)
    }

    #[test]
    fn small_conics() {
        assert!(matches!(run(1, 1, 5), Search::Certified { .. }));
        assert!(matches!(run(2, 5, 5), Search::Dead { .. }));
        // z² = 3x² + 3y² has no solution at 3
        assert!(matches!(run(3, 3, 3), Search::Dead { .. }));
        assert!(matches!(run(-1, -1, 2), Search::Dead { .. }));
        assert!(matches!(run(2, 7, 2), Search::Certified { .. }));
    }

    #[test]
    fn normalized_count() {
        assert_eq!(normalized(3, 5).count(), 31);
        assert_eq!(normalized(4, 3).count(), 40);
    }
}
