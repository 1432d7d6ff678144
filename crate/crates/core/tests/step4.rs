//! The restricted structure maps of the strong homotopy Lie algebroid in
//! coordinates, computed from the coefficients of `Π` and compared with the
//! derived brackets on generators and base functions.

use std::collections::BTreeMap;

use bfv_core::bfv::bivector_from_coefficients;
use bfv_core::oddsymplectic::BfvPhase;
use bfv_core::random::{self, TestRng};
use bfv_core::voronov::shla_brackets;
use bfv_core::Poly;

const S: usize = 2;
const E: usize = 2;

/// A bivector with random polynomial coefficients and `Π^{ij}|_S = 0`;
/// it need not be Poisson.
fn random_bivector(rng: &mut TestRng, ph: &BfvPhase) -> (Poly, BTreeMap<(usize, usize), Poly>) {
    let coords = ph.coordinates();
    let mut coefficients = BTreeMap::new();
    for (n, &a) in coords.iter().enumerate() {
        for &b in &coords[n + 1..] {
            let mut value = random::poly(rng, ph.table(), &coords, 3, 3);
            if a >= ph.y(0) {
                // fiber-fiber coefficients vanish on S
                value = &value * &ph.gen(ph.y(rng_index(rng)));
            }
            coefficients.insert((a, b), value);
        }
    }
    let pi = bivector_from_coefficients(ph, &coefficients).unwrap();
    (pi, coefficients)
}

fn rng_index(rng: &mut TestRng) -> usize {
    use rand::Rng;
    rng.gen_range(0..E)
}

/// `Π^{ab}` for any ordered pair.
fn coefficient(table: &BTreeMap<(usize, usize), Poly>, a: usize, b: usize) -> Poly {
    match table.get(&(a, b)) {
        Some(v) => v.clone(),
        None => table[&(b, a)].signed(-1),
    }
}

struct Oracle<'a> {
    ph: &'a BfvPhase,
    table: BTreeMap<(usize, usize), Poly>,
}

impl Oracle<'_> {
    /// `(∂_{y_{j_1}} ⋯ ∂_{y_{j_k}} p)|_S`.
    fn jet(&self, p: &Poly, js: &[usize]) -> Poly {
        let d = js
            .iter()
            .fold(p.clone(), |acc, &j| acc.partial(self.ph.y(j)));
        d.set_to_zero(&(0..E).map(|j| self.ph.y(j)).collect::<Vec<_>>())
    }

    fn c(&self, j: usize) -> Poly {
        self.ph.gen(self.ph.c(j))
    }

    /// `½ (∂_J Π^{il})|_S c_i c_l`.
    fn fiber(&self, js: &[usize]) -> Poly {
        let mut out = Poly::zero(self.ph.table());
        for i in 0..E {
            for l in i + 1..E {
                let p = self.jet(&coefficient(&self.table, self.ph.y(i), self.ph.y(l)), js);
                out.add_assign_ref(&(&(&p * &self.c(i)) * &self.c(l)));
            }
        }
        out
    }

    /// `(∂_J Π^{αl})|_S ∂_α f c_l`.
    fn anchor(&self, js: &[usize], f: &Poly) -> Poly {
        let mut out = Poly::zero(self.ph.table());
        for a in 0..S {
            for l in 0..E {
                let p = self.jet(&coefficient(&self.table, self.ph.x(a), self.ph.y(l)), js);
                out.add_assign_ref(&(&(&p * &f.partial(self.ph.x(a))) * &self.c(l)));
            }
        }
        out
    }

    /// `(∂_J Π^{αβ})|_S ∂_α f ∂_β g`.
    fn base(&self, js: &[usize], f: &Poly, g: &Poly) -> Poly {
        let mut out = Poly::zero(self.ph.table());
        for a in 0..S {
            for b in 0..S {
                if a == b {
                    continue;
                }
                let p = self.jet(&coefficient(&self.table, self.ph.x(a), self.ph.x(b)), js);
                out.add_assign_ref(&(&(&p * &f.partial(self.ph.x(a))) * &g.partial(self.ph.x(b))));
            }
        }
        out
    }
}

fn index_tuples(k: usize) -> Vec<Vec<usize>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                (0..E).map(move |j| {
                    let mut t = t.clone();
                    t.push(j);
                    t
                })
            })
            .collect()
    })
}

fn sign(k: usize) -> i32 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// On `(c_J)`, `(c_J, f)` and `(c_J, f, g)` the brackets are
/// `(−1)^k ½ ∂_J Π^{il} c_i c_l`, `(−1)^k ∂_J Π^{αl} ∂_α f c_l` and
/// `(−1)^{k−1} ∂_J Π^{αβ} ∂_α f ∂_β g`, all restricted to `S`.
#[test]
fn coordinate_formulas_for_the_derived_brackets() {
    let ph = BfvPhase::new(S, E).unwrap();
    let mut rng = random::rng(9);
    let base: Vec<usize> = (0..S).map(|i| ph.x(i)).collect();
    let mut nonzero = [0usize; 3];
    for _ in 0..6 {
        let (pi, table) = random_bivector(&mut rng, &ph);
        let o = Oracle { ph: &ph, table };
        let f = random::poly(&mut rng, ph.table(), &base, 3, 3);
        let g = random::poly(&mut rng, ph.table(), &base, 3, 3);
        for k in 1..=3 {
            for js in index_tuples(k) {
                let args: Vec<Poly> = js.iter().map(|&j| o.c(j)).collect();
                let expected = o.fiber(&js).signed(sign(k));
                assert_eq!(
                    shla_brackets(&ph, &pi, &args).unwrap(),
                    expected,
                    "fiber, J = {js:?}"
                );
                nonzero[0] += usize::from(!expected.is_zero());
            }
            for js in index_tuples(k - 1) {
                let mut args: Vec<Poly> = js.iter().map(|&j| o.c(j)).collect();
                args.push(f.clone());
                let expected = o.anchor(&js, &f).signed(sign(k));
                assert_eq!(
                    shla_brackets(&ph, &pi, &args).unwrap(),
                    expected,
                    "anchor, J = {js:?}"
                );
                nonzero[1] += usize::from(!expected.is_zero());
            }
            if k < 2 {
                continue;
            }
            for js in index_tuples(k - 2) {
                let mut args: Vec<Poly> = js.iter().map(|&j| o.c(j)).collect();
                args.push(f.clone());
                args.push(g.clone());
                let expected = o.base(&js, &f, &g).signed(-sign(k));
                assert_eq!(
                    shla_brackets(&ph, &pi, &args).unwrap(),
                    expected,
                    "base, J = {js:?}"
                );
                nonzero[2] += usize::from(!expected.is_zero());
            }
        }
    }
    assert!(nonzero.iter().all(|&n| n > 3), "{nonzero:?}");
}
