//! V-algebras and higher derived brackets.
//!
//! A V-algebra is a graded Lie algebra `L` with an abelian subalgebra `𝔞`
//! and an idempotent projection `Π_𝔞` onto it whose kernel is a
//! subalgebra. A degree-one `P ∈ L` defines the derived brackets
//! `D_Pⁿ(a_1, …, a_n) = Π_𝔞[[…[P, a_1], …], a_n]`, an L∞[1]-structure on
//! `𝔞` (with the degrees of `L`) whenever `[P,P] = 0`; in general its
//! Jacobiators are the derived brackets of `½[P,P]`.
//!
//! The instances here live in the odd-symplectic model: `L = V(M)[1]` with
//! the Schouten–Nijenhuis bracket, so an element of polynomial degree `d`
//! has degree `d − 1` in `L`, and `𝔞` is spanned by the monomials in a
//! chosen set of generators.

use crate::error::{Error, Result};
use crate::linfty::FnLInfty;
use crate::oddsymplectic::{BfvPhase, PhaseAlgebra};
use crate::scalar::Scalar;
use crate::superpoly::SuperPoly;

/// A V-algebra inside the odd-symplectic model: `𝔞` is the span of the
/// monomials in the generators flagged in `abelian`, and `Π_𝔞` kills every
/// other monomial.
#[derive(Clone, Debug)]
pub struct VAlgebra {
    phase: PhaseAlgebra,
    complement: Vec<usize>,
}

impl VAlgebra {
    /// Builds the V-algebra with abelian part generated by `abelian`.
    ///
    /// The generators must pairwise commute under the bracket, and no
    /// coordinate may appear together with its own momentum.
    pub fn new(phase: &PhaseAlgebra, abelian: &[usize]) -> Result<Self> {
        let n = phase.coordinates();
        for &g in abelian {
            if g >= 2 * n {
                return Err(Error::Argument(format!("generator {g} out of range")));
            }
            let partner = if g < n { g + n } else { g - n };
            if abelian.contains(&partner) {
                return Err(Error::Argument(format!(
                    "generator {g} and its conjugate cannot both be abelian"
                )));
            }
        }
        let complement = (0..2 * n).filter(|g| !abelian.contains(g)).collect();
        Ok(VAlgebra {
            phase: phase.clone(),
            complement,
        })
    }

    pub fn phase(&self) -> &PhaseAlgebra {
        &self.phase
    }

    /// The projection `Π_𝔞`.
    pub fn project<S: Scalar>(&self, x: &SuperPoly<S>) -> SuperPoly<S> {
        x.set_to_zero(&self.complement)
    }

    /// Whether `x` lies in `𝔞`.
    pub fn is_abelian<S: Scalar>(&self, x: &SuperPoly<S>) -> bool {
        self.complement.iter().all(|&g| !x.involves(g))
    }

    /// Degree in `L = V(M)[1]`.
    pub fn degree<S: Scalar>(&self, x: &SuperPoly<S>) -> Option<i64> {
        x.degree().map(|d| d - 1)
    }

    /// The derived bracket `D_Pⁿ(args)`; `n = 0` gives `Π_𝔞(P)`.
    pub fn derived_bracket<S: Scalar>(
        &self,
        p: &SuperPoly<S>,
        args: &[SuperPoly<S>],
    ) -> Result<SuperPoly<S>> {
        if !p.is_zero() && self.degree(p) != Some(1) {
            return Err(Error::Argument(
                "derived brackets need an element of degree 1".into(),
            ));
        }
        if let Some(k) = args.iter().position(|a| !self.is_abelian(a)) {
            return Err(Error::Argument(format!(
                "argument {k} is not in the abelian subalgebra"
            )));
        }
        Ok(self.derived_bracket_unchecked(p, args))
    }

    /// `Π_𝔞[[…[P, a_1], …], a_n]` for `P` of any degree, such as `½[P,P]`.
    pub fn derived_bracket_unchecked<S: Scalar>(
        &self,
        p: &SuperPoly<S>,
        args: &[SuperPoly<S>],
    ) -> SuperPoly<S> {
        let mut acc = p.clone();
        for a in args {
            if acc.is_zero() {
                break;
            }
            acc = self.phase.bracket(&acc, a).expect("same table");
        }
        self.project(&acc)
    }

    /// The derived L∞[1]-structure `(D_Pⁿ)_{n ≥ 0}` on `𝔞`, with all
    /// operations up to `max_arity`.
    pub fn derived_structure<'a, S: Scalar>(
        &'a self,
        p: &'a SuperPoly<S>,
        max_arity: usize,
    ) -> Result<FnLInfty<'a, SuperPoly<S>>> {
        if !p.is_zero() && self.degree(p) != Some(1) {
            return Err(Error::Argument(
                "derived brackets need an element of degree 1".into(),
            ));
        }
        let zero = SuperPoly::zero(self.phase.table());
        let zero_for_ops = zero.clone();
        Ok(FnLInfty::new(
            zero,
            move |x: &SuperPoly<S>| self.degree(x),
            move |n, args: &[SuperPoly<S>]| {
                if n > max_arity {
                    return zero_for_ops.clone();
                }
                self.derived_bracket(p, args)
                    .expect("degree and arguments checked")
            },
        ))
    }
}

/// The V-algebra `(V(E)[1], Γ(∧E)[1], pr)` on a BFV phase: `𝔞` is
/// generated by the base coordinates `x` and the fiber momenta `py`, and
/// `pr` sets `y` and `px` to zero.
pub fn shla_valgebra(phase: &BfvPhase) -> Result<VAlgebra> {
    let mut abelian: Vec<usize> = (0..phase.s).map(|i| phase.x(i)).collect();
    abelian.extend((0..phase.e).map(|j| phase.py(j)));
    VAlgebra::new(phase.phase(), &abelian)
}

/// Sends the ghosts `c_j` of a section of `Γ(∧E)`, written in `x` and
/// `c`, to the fiber momenta `py_j`.
pub fn ghosts_to_momenta<S: Scalar>(phase: &BfvPhase, f: &SuperPoly<S>) -> SuperPoly<S> {
    let mut images = vec![None; phase.table().len()];
    for j in 0..phase.e {
        images[phase.c(j)] = Some(phase.gen(phase.py(j)));
    }
    f.substitute(&images)
}

/// Inverse of [`ghosts_to_momenta`].
pub fn momenta_to_ghosts<S: Scalar>(phase: &BfvPhase, f: &SuperPoly<S>) -> SuperPoly<S> {
    let mut images = vec![None; phase.table().len()];
    for j in 0..phase.e {
        images[phase.py(j)] = Some(phase.gen(phase.c(j)));
    }
    f.substitute(&images)
}

/// The strong homotopy Lie algebroid brackets `μᵏ = D_Πᵏ` of a base
/// bivector on sections written in `x` and `c`.
///
/// Fails with a precondition violation carrying `pr(Π)` unless `{y = 0}`
/// is coisotropic.
pub fn shla_brackets<S: Scalar>(
    phase: &BfvPhase,
    pi: &SuperPoly<S>,
    args: &[SuperPoly<S>],
) -> Result<SuperPoly<S>> {
    let v = shla_valgebra(phase)?;
    let residual = v.project(pi);
    if !residual.is_zero() {
        return Err(Error::precondition(
            "not coisotropic",
            Some(momenta_to_ghosts(phase, &residual).serialize()),
        ));
    }
    let translated: Vec<SuperPoly<S>> = args.iter().map(|a| ghosts_to_momenta(phase, a)).collect();
    let value = v.derived_bracket(pi, &translated)?;
    Ok(momenta_to_ghosts(phase, &value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{koszul_sign, parity_sign, permutations};
    use crate::linfty::{jacobiator, LInftyAlgebra};
    use crate::random;
    use crate::Rational;

    type P = SuperPoly<Rational>;

    fn plane() -> (BfvPhase, VAlgebra) {
        let ph = BfvPhase::new(2, 0).unwrap();
        let v = VAlgebra::new(ph.phase(), &[ph.x(0), ph.x(1)]).unwrap();
        (ph, v)
    }

    #[test]
    fn derived_bracket_examples() {
        let (ph, v) = plane();
        let p = |s: &str| ph.parse::<Rational>(s).unwrap();
        let pi = p("px1*px2");
        assert_eq!(v.derived_bracket(&pi, &[]).unwrap(), P::zero(ph.table()));
        // the sign relating D² to the Poisson bracket {x1,x2} = Π^{12} = 1
        assert_eq!(
            v.derived_bracket(&pi, &[p("x1"), p("x2")]).unwrap(),
            p("-1")
        );
        assert!(v
            .derived_bracket(&pi, &[p("x1"), p("x2"), p("x1")])
            .unwrap()
            .is_zero());
        assert!(v.derived_bracket(&p("px1"), &[]).is_err());
        assert!(v.derived_bracket(&pi, &[p("px1")]).is_err());
        assert!(VAlgebra::new(ph.phase(), &[ph.x(0), ph.px(0)]).is_err());
    }

    #[test]
    fn valgebra_axioms() {
        let ph = BfvPhase::new(2, 2).unwrap();
        let v = shla_valgebra(&ph).unwrap();
        let mut rng = random::rng(13);
        let all: Vec<usize> = ph.base_generators();
        for _ in 0..50 {
            let x = random::poly::<Rational>(&mut rng, ph.table(), &all, 3, 3);
            let y = random::poly::<Rational>(&mut rng, ph.table(), &all, 3, 3);
            let (px, py) = (v.project(&x), v.project(&y));
            assert_eq!(v.project(&px), px);
            assert!(ph.bracket(&px, &py).unwrap().is_zero());
            let lhs = v.project(&ph.bracket(&x, &y).unwrap());
            let rhs = &v.project(&ph.bracket(&px, &y).unwrap())
                + &v.project(&ph.bracket(&x, &py).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    fn random_abelian(rng: &mut random::TestRng, ph: &BfvPhase) -> P {
        let gens: Vec<usize> = (0..ph.s)
            .map(|i| ph.x(i))
            .chain((0..ph.e).map(|j| ph.py(j)))
            .collect();
        loop {
            if let Some(a) = random::homogeneous(rng, ph.table(), &gens, 3, 2, None) {
                return a;
            }
        }
    }

    #[test]
    fn derived_brackets_are_graded_symmetric() {
        let ph = BfvPhase::new(2, 2).unwrap();
        let v = shla_valgebra(&ph).unwrap();
        let pi = ph
            .parse::<Rational>("y1*py1*py2 + x1*px1*py1 + x2*y2*px2*py2")
            .unwrap();
        let mut rng = random::rng(9);
        for n in 1..=4 {
            for _ in 0..5 {
                let args: Vec<P> = (0..n).map(|_| random_abelian(&mut rng, &ph)).collect();
                let degs: Vec<i64> = args.iter().map(|a| v.degree(a).unwrap()).collect();
                let base = v.derived_bracket(&pi, &args).unwrap();
                for sigma in permutations(n) {
                    let permuted: Vec<P> = sigma.iter().map(|&k| args[k].clone()).collect();
                    let sign = koszul_sign(&sigma, &degs).unwrap();
                    assert_eq!(
                        v.derived_bracket(&pi, &permuted).unwrap(),
                        base.signed(sign)
                    );
                }
            }
        }
    }

    #[test]
    fn jacobiators_are_derived_brackets_of_half_the_square() {
        let ph = BfvPhase::new(2, 2).unwrap();
        let v = shla_valgebra(&ph).unwrap();
        let mut rng = random::rng(17);
        let candidates = [
            "y1*py1*py2",
            "x1*px1*px2 + y1*px2*py1",
            "x1*py1*py2 + y2*y2*px1*py2 + px1*px2",
        ];
        for text in candidates {
            let pi = ph.parse::<Rational>(text).unwrap();
            let half = ph.bracket(&pi, &pi).unwrap().scale(&Rational::ratio(1, 2));
            let s = v.derived_structure(&pi, 8).unwrap();
            for n in 1..=4 {
                let args: Vec<P> = (0..n).map(|_| random_abelian(&mut rng, &ph)).collect();
                let j = jacobiator(&s, &args).unwrap();
                let expected = v.derived_bracket_unchecked(&half, &args);
                assert_eq!(j, expected, "P = {text}, n = {n}");
            }
        }
    }

    #[test]
    fn shla_brackets_are_multiderivations_in_the_last_slot() {
        let ph = BfvPhase::new(2, 2).unwrap();
        let pi = ph
            .parse::<Rational>("y1*py1*py2 + x1*px1*py1 + y2*px1*px2")
            .unwrap();
        let mut rng = random::rng(23);
        let gens: Vec<usize> = (0..ph.s)
            .map(|i| ph.x(i))
            .chain((0..ph.e).map(|j| ph.c(j)))
            .collect();
        let draw = |rng: &mut random::TestRng| loop {
            if let Some(a) = random::homogeneous::<Rational>(rng, ph.table(), &gens, 2, 2, None) {
                return a;
            }
        };
        for k in 1..=3 {
            for _ in 0..5 {
                let head: Vec<P> = (0..k - 1).map(|_| draw(&mut rng)).collect();
                let (f, g) = (draw(&mut rng), draw(&mut rng));
                let with = |last: &P| {
                    let mut args = head.clone();
                    args.push(last.clone());
                    shla_brackets(&ph, &pi, &args).unwrap()
                };
                let q_degree: i64 = 1 + head.iter().map(|a| a.degree().unwrap() - 1).sum::<i64>();
                let sign = parity_sign(q_degree * f.degree().unwrap());
                let lhs = with(&(&f * &g));
                let rhs = &(&with(&f) * &g) + &(&f * &with(&g)).signed(sign);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn shla_rejects_non_coisotropic_bivectors() {
        let ph = BfvPhase::new(2, 2).unwrap();
        let pi = ph.parse::<Rational>("py1*py2").unwrap();
        let err = shla_brackets(&ph, &pi, &[]).unwrap_err();
        assert!(matches!(err, Error::Precondition { residual: Some(ref r), .. } if r == "c1*c2"));
    }

    #[test]
    fn zero_bivector_is_abelian() {
        let ph = BfvPhase::new(1, 1).unwrap();
        let zero = P::zero(ph.table());
        let x = ph.parse::<Rational>("x1*c1").unwrap();
        for k in 0..3 {
            assert!(shla_brackets(&ph, &zero, &vec![x.clone(); k])
                .unwrap()
                .is_zero());
        }
        let v = shla_valgebra(&ph).unwrap();
        let s = v.derived_structure(&zero, 3).unwrap();
        let a = ghosts_to_momenta(&ph, &x);
        assert!(s.operation(2, &[a.clone(), a]).is_zero());
    }
}
