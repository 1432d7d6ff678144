//! The BFV complex of the zero section `S = {y = 0}` of a trivial bundle
//! `E = ℝˢ × ℝᵉ → ℝˢ` carrying a polynomial Poisson structure.
//!
//! BFV functions are the polynomials in `x, y, c, b` of a [`BfvPhase`].
//! The graded Poisson bracket is the derived bracket of the lift
//! `Π̂ = G + ι∇(Π) + △`,
//!
//! `[f,g]_BFV = (−1)^{|f|+1} [[Π̂,f],g]`,
//!
//! which satisfies `[c_i, b_j]_BFV = δ_ij` and restricts to the Poisson
//! bracket `{x_a, x_b} = Π^{ab}` on functions of `x` and `y`, where a base
//! bivector `Σ_{a<b} Π^{ab} p_a p_b` is written with momenta `px, py`.
//!
//! Bigrading: a monomial with `p` ghosts `c` and `q` ghost momenta `b`
//! lies in `BFV^{(p,q)}` and has total degree `p − q`; the filtration
//! `BFV_{≥k}` is by `q`.

mod charge;
mod formal;
mod mc;
mod setup_file;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::parity_sign;
use crate::oddsymplectic::{BfvPhase, Connection, LiftContraction};
use crate::scalar::Scalar;
use crate::superpoly::SuperPoly;

pub use charge::{build_charge, BfvAlgebra, BfvComplex, Charge};
pub use formal::{
    formal_mc_residual, normalize_formal_mc, random_formal_perturbation, FormalNormalization,
    FormalSeries,
};
pub use mc::{
    apply_gauge, apply_inverse_gauge, coisotrope_generators, complete_to_mc, extend_section_to_mc,
    gauge_between, is_normalized, mc_residual_bfv, section_obstruction, truncation, Certificate,
    CoisotropeReport, SectionOutcome,
};
pub use setup_file::SetupSpec;

/// Caps for loops whose termination follows from the bounded ghost
/// filtration; exceeding one indicates a bug, never a valid input.
const MAX_EXP_TERMS: usize = 64;

/// A validated BFV setup: Poisson data with `S` coisotropic, together with
/// the connection, its lift contraction and the lifted bivector `Π̂`.
#[derive(Clone, Debug)]
pub struct BfvSetup<S: Scalar> {
    phase: BfvPhase,
    pi: SuperPoly<S>,
    lift: LiftContraction<S>,
    lifted_pi: SuperPoly<S>,
    pi_hat: SuperPoly<S>,
    formal_order: Option<usize>,
}

impl<S: Scalar> BfvSetup<S> {
    /// Validates `Π` (a bivector in `x, y, px, py`) and builds `Π̂`.
    ///
    /// Fails with "not Poisson" carrying `[Π,Π]`, or with "not
    /// coisotropic" carrying the coefficients `{y_i,y_j}|_{y=0}` that do
    /// not vanish.
    pub fn new(phase: &BfvPhase, pi: SuperPoly<S>, connection: Connection<S>) -> Result<Self> {
        if pi.table() != phase.table()
            || !phase.is_base(&pi)
            || !(pi.is_zero() || pi.is_homogeneous_of(2))
            || pi.terms().any(|(m, _)| momentum_count(phase, m) != 2)
        {
            return Err(Error::Argument(
                "the Poisson structure must be a bivector in x, y, px, py".into(),
            ));
        }
        let square = phase.bracket(&pi, &pi)?;
        if !square.is_zero() {
            return Err(Error::precondition(
                "not Poisson: [Pi,Pi] is nonzero",
                Some(square.serialize()),
            ));
        }
        let offending = coisotropy_defects(phase, &pi)?;
        if !offending.is_empty() {
            let listed: Vec<String> = offending
                .iter()
                .map(|(i, j, v)| format!("{{y{},y{}}}|S = {}", i + 1, j + 1, v.serialize()))
                .collect();
            return Err(Error::precondition(
                "not coisotropic",
                Some(listed.join("; ")),
            ));
        }
        let lift = LiftContraction::new(phase, connection)?;
        let lifted_pi = lift.iota(&pi)?;
        let pi_hat = lift.rothstein_lift(&pi)?;
        let setup = BfvSetup {
            phase: phase.clone(),
            pi,
            lift,
            lifted_pi,
            pi_hat,
            formal_order: None,
        };
        setup.check_bracket_properties()?;
        Ok(setup)
    }

    /// Builds a setup from the coefficients `Π^{ab} = {z_a, z_b}` for
    /// `a < b`, indices running over `x_1..x_s, y_1..y_e`.
    pub fn from_coefficients(
        phase: &BfvPhase,
        coefficients: &BTreeMap<(usize, usize), SuperPoly<S>>,
        connection: Connection<S>,
    ) -> Result<Self> {
        let pi = bivector_from_coefficients(phase, coefficients)?;
        Self::new(phase, pi, connection)
    }

    pub(crate) fn with_formal_order(mut self, order: Option<usize>) -> Self {
        self.formal_order = order;
        self
    }

    /// The working order in `ε` requested by the setup file, if any.
    pub fn formal_order(&self) -> Option<usize> {
        self.formal_order
    }

    pub fn phase(&self) -> &BfvPhase {
        &self.phase
    }

    /// The Poisson bivector `Π` in `x, y, px, py`.
    pub fn pi(&self) -> &SuperPoly<S> {
        &self.pi
    }

    pub fn lift(&self) -> &LiftContraction<S> {
        &self.lift
    }

    /// `ι∇(Π)`.
    pub fn lifted_pi(&self) -> &SuperPoly<S> {
        &self.lifted_pi
    }

    /// `Π̂ = G + ι∇(Π) + △`.
    pub fn pi_hat(&self) -> &SuperPoly<S> {
        &self.pi_hat
    }

    /// `Π^{ab} = {z_a, z_b}` for coordinates `z = (x, y)`.
    pub fn coefficient(&self, a: usize, b: usize) -> SuperPoly<S> {
        self.poisson_bracket(&self.phase.gen(a), &self.phase.gen(b))
    }

    pub fn zero(&self) -> SuperPoly<S> {
        SuperPoly::zero(self.phase.table())
    }

    /// Parses a BFV function or base polynomial over this setup's table.
    pub fn parse(&self, text: &str) -> Result<SuperPoly<S>> {
        self.phase.parse(text)
    }

    /// Whether `f` is a BFV function, i.e. free of momenta.
    pub fn is_function(&self, f: &SuperPoly<S>) -> bool {
        let n = self.phase.phase().coordinates();
        f.table() == self.phase.table() && (n..2 * n).all(|g| !f.involves(g))
    }

    fn require_function(&self, f: &SuperPoly<S>, what: &str) -> Result<()> {
        if self.is_function(f) {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "{what} must be a polynomial in x, y, c, b"
            )))
        }
    }

    /// `(−1)^{|f|+1} [[P,f],g]`, expanded over homogeneous parts of `f`.
    fn derived(&self, p: &SuperPoly<S>, f: &SuperPoly<S>, g: &SuperPoly<S>) -> SuperPoly<S> {
        let mut out = self.zero();
        for (deg, part) in f.homogeneous_components() {
            let inner = self.phase.bracket(p, &part).expect("same table");
            let value = self.phase.bracket(&inner, g).expect("same table");
            out.add_assign_ref(&value.signed(parity_sign(deg + 1)));
        }
        out
    }

    /// The BFV bracket `[f,g]_BFV`.
    pub fn bfv_bracket(&self, f: &SuperPoly<S>, g: &SuperPoly<S>) -> SuperPoly<S> {
        self.derived(&self.pi_hat, f, g)
    }

    /// The bracket `[f,g]_G` of the fibre pairing alone.
    pub fn g_bracket(&self, f: &SuperPoly<S>, g: &SuperPoly<S>) -> SuperPoly<S> {
        self.derived(self.lift.g(), f, g)
    }

    /// The bracket `[f,g]_{ι∇(Π)}`.
    pub fn lifted_bracket(&self, f: &SuperPoly<S>, g: &SuperPoly<S>) -> SuperPoly<S> {
        self.derived(&self.lifted_pi, f, g)
    }

    /// The Poisson bracket `{f,g}_Π` of functions of `x` and `y`.
    pub fn poisson_bracket(&self, f: &SuperPoly<S>, g: &SuperPoly<S>) -> SuperPoly<S> {
        self.derived(&self.pi, f, g)
    }

    /// Checks `[c_i,b_j]_BFV = δ_ij` modulo ghosts and `j*[z_a,z_b]_BFV =
    /// Π^{ab}` on coordinate generators.
    fn check_bracket_properties(&self) -> Result<()> {
        let ph = &self.phase;
        for i in 0..ph.e {
            for j in 0..ph.e {
                let value = self.bfv_bracket(&ph.gen(ph.c(i)), &ph.gen(ph.b(j)));
                let pairing = value.filter(|m| ghost_counts(ph, m) == (0, 0));
                let expected = if i == j {
                    SuperPoly::one(ph.table())
                } else {
                    self.zero()
                };
                if pairing != expected {
                    return Err(Error::Internal(format!(
                        "[c{},b{}]_BFV does not reduce to the fibre pairing",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let coords = ph.coordinates();
        for &a in &coords {
            for &b in &coords {
                let za = ph.gen(a);
                let zb = ph.gen(b);
                let lifted = self.restrict_to_zero_section(&self.bfv_bracket(&za, &zb));
                if lifted != self.poisson_bracket(&za, &zb) {
                    return Err(Error::Internal(format!(
                        "BFV bracket of {} and {} does not restrict to the Poisson bracket",
                        ph.table().generator(a).name,
                        ph.table().generator(b).name
                    )));
                }
            }
        }
        Ok(())
    }

    /// `j*`: sets the ghosts and ghost momenta to zero.
    pub fn restrict_to_zero_section(&self, f: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = &self.phase;
        let ghosts: Vec<usize> = (0..ph.e).flat_map(|j| [ph.c(j), ph.b(j)]).collect();
        f.set_to_zero(&ghosts)
    }

    /// The tautological section `Ω₀ = Σ_j y_j c_j`.
    pub fn tautological_section(&self) -> SuperPoly<S> {
        let ph = &self.phase;
        let mut out = self.zero();
        for j in 0..ph.e {
            out.add_assign_ref(&(&ph.gen::<S>(ph.y(j)) * &ph.gen(ph.c(j))));
        }
        out
    }

    /// `p!(μ) = Σ_j μ_j c_j` for a section given by polynomials in `x`.
    pub fn pullback_section(&self, mu: &[SuperPoly<S>]) -> Result<SuperPoly<S>> {
        self.check_section(mu)?;
        let ph = &self.phase;
        let mut out = self.zero();
        for (j, m) in mu.iter().enumerate() {
            out.add_assign_ref(&(m * &ph.gen(ph.c(j))));
        }
        Ok(out)
    }

    pub(crate) fn check_section(&self, mu: &[SuperPoly<S>]) -> Result<()> {
        let ph = &self.phase;
        if mu.len() != ph.e {
            return Err(Error::Argument(format!(
                "a section needs {} components, got {}",
                ph.e,
                mu.len()
            )));
        }
        for (j, m) in mu.iter().enumerate() {
            if m.table() != ph.table() || (ph.s..ph.table().len()).any(|g| m.involves(g)) {
                return Err(Error::Argument(format!(
                    "section component {} must be a polynomial in x",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// `δ = [Ω₀,−]_G = Σ_j y_j ∂⃗/∂b_j`.
    pub fn delta(&self, f: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = &self.phase;
        let mut out = self.zero();
        for j in 0..ph.e {
            if f.involves(ph.b(j)) {
                out.add_assign_ref(&(&ph.gen::<S>(ph.y(j)) * &f.partial(ph.b(j))));
            }
        }
        out
    }

    /// `δ[μ] = [Ω₀ + p!(μ),−]_G = Σ_j (y_j + μ_j) ∂⃗/∂b_j`.
    pub fn delta_mu(&self, mu: &[SuperPoly<S>], f: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = &self.phase;
        let mut out = self.zero();
        for (j, m) in mu.iter().enumerate().take(ph.e) {
            if f.involves(ph.b(j)) {
                let coefficient = &ph.gen::<S>(ph.y(j)) + m;
                out.add_assign_ref(&(&coefficient * &f.partial(ph.b(j))));
            }
        }
        out
    }

    /// The homotopy `h`: a monomial of `y`-degree `N` with `k` ghost
    /// momenta goes to `(1/(N+k)) Σ_μ b_μ ∂/∂y_μ` of itself, and to zero
    /// when `N = k = 0`.
    pub fn homotopy_h(&self, f: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = &self.phase;
        let mut by_weight: BTreeMap<u32, SuperPoly<S>> = BTreeMap::new();
        for (m, c) in f.terms() {
            let weight: u32 = (0..ph.e)
                .map(|j| m[ph.y(j)] as u32 + m[ph.b(j)] as u32)
                .sum();
            if weight > 0 {
                by_weight
                    .entry(weight)
                    .or_insert_with(|| self.zero())
                    .add_term(m.clone(), c.clone());
            }
        }
        let mut out = self.zero();
        for (weight, part) in by_weight {
            let mut sum = self.zero();
            for j in 0..ph.e {
                if part.involves(ph.y(j)) {
                    sum.add_assign_ref(&(&ph.gen::<S>(ph.b(j)) * &part.partial(ph.y(j))));
                }
            }
            out.add_scaled(&sum, &S::ratio(1, weight as i64));
        }
        out
    }

    /// The shift `y ↦ y + μ(x)`, or its inverse when `sign` is negative.
    fn shift(&self, mu: &[SuperPoly<S>], sign: i32, f: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = &self.phase;
        let mut images = vec![None; ph.table().len()];
        for (j, m) in mu.iter().enumerate() {
            images[ph.y(j)] = Some(&ph.gen::<S>(ph.y(j)) + &m.signed(sign));
        }
        f.substitute(&images)
    }

    /// The homotopy `h_μ = A ∘ h ∘ A⁻¹` for `δ[μ]`, where `A` is the
    /// shift `y ↦ y + μ(x)`; it satisfies `δ[μ]h_μ + h_μδ[μ] = id −
    /// A p* i* A⁻¹`.
    pub fn homotopy_h_mu(&self, mu: &[SuperPoly<S>], f: &SuperPoly<S>) -> SuperPoly<S> {
        self.shift(mu, 1, &self.homotopy_h(&self.shift(mu, -1, f)))
    }

    /// `i*`: sets `y` and `b` to zero.
    pub fn i_star(&self, f: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = &self.phase;
        let vars: Vec<usize> = (0..ph.e).flat_map(|j| [ph.y(j), ph.b(j)]).collect();
        f.set_to_zero(&vars)
    }

    /// `p*`: includes a section of `Γ(∧E)`, a polynomial in `x` and `c`.
    pub fn p_star(&self, f: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        if !self.is_section_of_exterior(f) {
            return Err(Error::Argument("p* takes a polynomial in x and c".into()));
        }
        Ok(f.clone())
    }

    /// The generators `x_1, …, x_s, c_1, …, c_e` of `Γ(∧E)`.
    pub fn exterior_generators(&self) -> Vec<SuperPoly<S>> {
        let ph = &self.phase;
        (0..ph.s)
            .map(|i| ph.gen(ph.x(i)))
            .chain((0..ph.e).map(|j| ph.gen(ph.c(j))))
            .collect()
    }

    /// Whether `f` lies in `Γ(∧E)`, the polynomials in `x` and `c`.
    pub fn is_section_of_exterior(&self, f: &SuperPoly<S>) -> bool {
        let ph = &self.phase;
        let allowed: Vec<usize> = (0..ph.s)
            .map(|i| ph.x(i))
            .chain((0..ph.e).map(|j| ph.c(j)))
            .collect();
        f.table() == ph.table()
            && (0..ph.table().len()).all(|g| allowed.contains(&g) || !f.involves(g))
    }

    /// The Lie algebroid differential
    /// `c_i Π^{iβ}|_S ∂/∂x_β − ½ (∂Π^{ij}/∂y_k)|_S c_i c_j ∂⃗/∂c_k`
    /// on `Γ(∧E)`, evaluated from the coefficients of `Π`.
    pub fn delta1(&self, f: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        if !self.is_section_of_exterior(f) {
            return Err(Error::Argument(
                "delta1 takes a polynomial in x and c".into(),
            ));
        }
        let ph = &self.phase;
        let on_s =
            |p: &SuperPoly<S>| p.set_to_zero(&(0..ph.e).map(|j| ph.y(j)).collect::<Vec<_>>());
        let mut out = self.zero();
        for i in 0..ph.e {
            let ci = ph.gen::<S>(ph.c(i));
            for beta in 0..ph.s {
                if !f.involves(ph.x(beta)) {
                    continue;
                }
                let coeff = on_s(&self.coefficient(ph.y(i), ph.x(beta)));
                out.add_assign_ref(&(&(&ci * &coeff) * &f.partial(ph.x(beta))));
            }
            for j in 0..ph.e {
                let cicj = &ci * &ph.gen(ph.c(j));
                if cicj.is_zero() {
                    continue;
                }
                let pij = self.coefficient(ph.y(i), ph.y(j));
                for k in 0..ph.e {
                    if !f.involves(ph.c(k)) {
                        continue;
                    }
                    let coeff = on_s(&pij.partial(ph.y(k)));
                    let term = &(&cicj * &coeff) * &f.partial(ph.c(k));
                    out.add_scaled(&term, &S::ratio(-1, 2));
                }
            }
        }
        Ok(out)
    }
}

/// Number of momenta in a monomial.
fn momentum_count(phase: &BfvPhase, m: &[u16]) -> usize {
    let n = phase.phase().coordinates();
    m[n..].iter().map(|&k| k as usize).sum()
}

/// `(#c, #b)` of a monomial.
pub(crate) fn ghost_counts(phase: &BfvPhase, m: &[u16]) -> (usize, usize) {
    let c = (0..phase.e).map(|j| m[phase.c(j)] as usize).sum();
    let b = (0..phase.e).map(|j| m[phase.b(j)] as usize).sum();
    (c, b)
}

/// The part of `f` in `BFV^{(p,q)}`.
pub fn bigrade_component<S: Scalar>(
    phase: &BfvPhase,
    f: &SuperPoly<S>,
    p: usize,
    q: usize,
) -> SuperPoly<S> {
    f.filter(|m| ghost_counts(phase, m) == (p, q))
}

/// The part of `f` with exactly `q` ghost momenta.
pub fn ghost_momentum_component<S: Scalar>(
    phase: &BfvPhase,
    f: &SuperPoly<S>,
    q: usize,
) -> SuperPoly<S> {
    f.filter(|m| ghost_counts(phase, m).1 == q)
}

/// The decomposition of `f` by bigrade `(p, q)`.
pub fn bigrades<S: Scalar>(
    phase: &BfvPhase,
    f: &SuperPoly<S>,
) -> BTreeMap<(usize, usize), SuperPoly<S>> {
    let mut out: BTreeMap<(usize, usize), SuperPoly<S>> = BTreeMap::new();
    for (m, c) in f.terms() {
        out.entry(ghost_counts(phase, m))
            .or_insert_with(|| SuperPoly::zero(phase.table()))
            .add_term(m.clone(), c.clone());
    }
    out
}

/// The smallest number of ghost momenta among the terms of `f`.
pub(crate) fn lowest_ghost_momentum<S: Scalar>(
    phase: &BfvPhase,
    f: &SuperPoly<S>,
) -> Option<usize> {
    f.terms().map(|(m, _)| ghost_counts(phase, m).1).min()
}

/// The fiber-fiber coefficients `{y_i,y_j}|_{y=0}`, `i < j`, that do not
/// vanish.
/// The coefficients `{y_i,y_j}|_S`, `i < j`, that do not vanish; empty iff
/// `S` is coisotropic.
pub fn coisotropy_defects<S: Scalar>(
    phase: &BfvPhase,
    pi: &SuperPoly<S>,
) -> Result<Vec<(usize, usize, SuperPoly<S>)>> {
    let on_s: Vec<usize> = (0..phase.e).map(|j| phase.y(j)).collect();
    let mut out = Vec::new();
    for i in 0..phase.e {
        for j in i + 1..phase.e {
            let inner = phase.bracket(pi, &phase.gen(phase.y(i)))?;
            let coeff = phase
                .bracket(&inner, &phase.gen(phase.y(j)))?
                .signed(-1)
                .set_to_zero(&on_s);
            if !coeff.is_zero() {
                out.push((i, j, coeff));
            }
        }
    }
    Ok(out)
}

/// `Σ_{a<b} Π^{ab} p_a p_b` from coefficients keyed by coordinate pairs.
pub fn bivector_from_coefficients<S: Scalar>(
    phase: &BfvPhase,
    coefficients: &BTreeMap<(usize, usize), SuperPoly<S>>,
) -> Result<SuperPoly<S>> {
    let coords = phase.coordinates();
    let mut pi = SuperPoly::zero(phase.table());
    let mut seen: BTreeMap<(usize, usize), SuperPoly<S>> = BTreeMap::new();
    for (&(a, b), value) in coefficients {
        if a == b || !coords.contains(&a) || !coords.contains(&b) {
            return Err(Error::Argument(format!(
                "Poisson coefficient ({a},{b}) needs two distinct coordinates"
            )));
        }
        let (lo, hi, v) = if a < b {
            (a, b, value.clone())
        } else {
            (b, a, value.signed(-1))
        };
        if let Some(previous) = seen.get(&(lo, hi)) {
            if previous != &v {
                return Err(Error::Argument(format!(
                    "Poisson coefficients ({a},{b}) and ({b},{a}) are not antisymmetric"
                )));
            }
            continue;
        }
        let mono =
            &phase.gen::<S>(phase.phase().momentum(lo)) * &phase.gen(phase.phase().momentum(hi));
        pi.add_assign_ref(&(&v * &mono));
        seen.insert((lo, hi), v);
    }
    Ok(pi)
}

/// `exp(t·ad_ε)(f) = Σ_n tⁿ/n! ad_εⁿ(f)` for a nilpotent adjoint action.
pub(crate) fn exp_ad<S: Scalar>(
    setup: &BfvSetup<S>,
    epsilon: &SuperPoly<S>,
    t: i64,
    f: &SuperPoly<S>,
) -> Result<SuperPoly<S>> {
    let mut term = f.clone();
    let mut acc = f.clone();
    for n in 1..=MAX_EXP_TERMS {
        term = setup
            .bfv_bracket(epsilon, &term)
            .scale(&S::ratio(t, n as i64));
        if term.is_zero() {
            return Ok(acc);
        }
        acc.add_assign_ref(&term);
    }
    Err(Error::Internal(
        "adjoint action of a gauge generator is not nilpotent".into(),
    ))
}
