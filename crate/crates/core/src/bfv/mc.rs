//! Maurer–Cartan elements of the BFV complex: extension of sections,
//! truncation, gauge equivalence and coisotrope generators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, SparseRow};
use crate::scalar::Scalar;
use crate::superpoly::{Monomial, SuperPoly};

use super::{
    bigrade_component, exp_ad, ghost_momentum_component, lowest_ghost_momentum, BfvSetup, Charge,
};

/// The result of trying to extend a section to an MC element.
#[derive(Clone, Debug, PartialEq)]
pub enum SectionOutcome<S: Scalar> {
    /// The graph is coisotropic; `beta` is a normalized MC element with
    /// `T(Ω + β) = Ω₀ + p!(μ)`.
    Extension { beta: SuperPoly<S> },
    /// The graph is not coisotropic; `obstruction` is
    /// `[Ω₀+p!μ, Ω₀+p!μ]_{ι∇(Π)}` evaluated on the graph.
    Obstruction { obstruction: SuperPoly<S> },
}

/// `[Ω₀+p!μ, Ω₀+p!μ]_{ι∇(Π)}` restricted to the graph `y = −μ(x)`.
pub fn section_obstruction<S: Scalar>(
    setup: &BfvSetup<S>,
    mu: &[SuperPoly<S>],
) -> Result<SuperPoly<S>> {
    let start = &setup.tautological_section() + &setup.pullback_section(mu)?;
    let square = setup.lifted_bracket(&start, &start);
    Ok(on_graph(setup, mu, &square))
}

/// Substitutes `y_j = −μ_j(x)`.
fn on_graph<S: Scalar>(setup: &BfvSetup<S>, mu: &[SuperPoly<S>], f: &SuperPoly<S>) -> SuperPoly<S> {
    let ph = setup.phase();
    let mut images = vec![None; ph.table().len()];
    for (j, m) in mu.iter().enumerate() {
        images[ph.y(j)] = Some(m.signed(-1));
    }
    f.substitute(&images)
}

/// Extends `p!(μ)` to a normalized MC element if the graph of `μ` is
/// coisotropic, and reports the evaluated obstruction otherwise.
pub fn extend_section_to_mc<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    mu: &[SuperPoly<S>],
) -> Result<SectionOutcome<S>> {
    let obstruction = section_obstruction(setup, mu)?;
    if !obstruction.is_zero() {
        return Ok(SectionOutcome::Obstruction { obstruction });
    }
    let start = charge.total() + &setup.pullback_section(mu)?;
    let completed = complete_to_mc(setup, &start, mu)?;
    Ok(SectionOutcome::Extension {
        beta: &completed - charge.total(),
    })
}

/// Completes `start`, whose truncation must be `Ω₀ + p!(μ)`, to a
/// solution of `[X,X]_BFV = 0` by adding `−h_μ(R_k)` at each level.
///
/// Returns the full element `X`, not `X − Ω`. Fails with a precondition
/// violation if the first obstruction is nonzero.
pub fn complete_to_mc<S: Scalar>(
    setup: &BfvSetup<S>,
    start: &SuperPoly<S>,
    mu: &[SuperPoly<S>],
) -> Result<SuperPoly<S>> {
    let ph = setup.phase();
    setup.require_function(start, "an MC element")?;
    let expected = &setup.tautological_section() + &setup.pullback_section(mu)?;
    if truncation(setup, start) != expected {
        return Err(Error::Argument(
            "the starting element must have truncation Omega_0 + p!(mu)".into(),
        ));
    }
    let mut current = start.clone();
    for k in 0..=ph.e + 1 {
        let square = setup.bfv_bracket(&current, &current);
        if square.is_zero() {
            return Ok(current);
        }
        if lowest_ghost_momentum(ph, &square).is_some_and(|q| q < k) {
            return Err(Error::Internal(format!(
                "MC residual has components below level {k} after correction"
            )));
        }
        let r = ghost_momentum_component(ph, &square, k).scale(&S::ratio(1, 2));
        if !setup.delta_mu(mu, &r).is_zero() {
            return Err(Error::Internal(format!("R_{k} is not delta[mu]-closed")));
        }
        let correction = setup.homotopy_h_mu(mu, &r).signed(-1);
        if setup.delta_mu(mu, &correction) != r.signed(-1) {
            return Err(Error::precondition(
                format!("obstruction at level {k} does not vanish"),
                Some(on_graph(setup, mu, &r).serialize()),
            ));
        }
        current.add_assign_ref(&correction);
    }
    Err(Error::Internal(
        "the MC extension did not close within the ghost filtration".into(),
    ))
}

/// `[Ω+β, Ω+β]_BFV`.
pub fn mc_residual_bfv<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    beta: &SuperPoly<S>,
) -> SuperPoly<S> {
    let full = charge.total() + beta;
    setup.bfv_bracket(&full, &full)
}

/// The truncation `T`, the `(1,0)` component.
pub fn truncation<S: Scalar>(setup: &BfvSetup<S>, beta: &SuperPoly<S>) -> SuperPoly<S> {
    bigrade_component(setup.phase(), beta, 1, 0)
}

/// Whether `T(β)` is a pull-back from `Γ(E)`, i.e. free of `y`.
pub fn is_normalized<S: Scalar>(setup: &BfvSetup<S>, beta: &SuperPoly<S>) -> bool {
    let ph = setup.phase();
    let t = truncation(setup, beta);
    (0..ph.e).all(|j| !t.involves(ph.y(j)))
}

/// Reads `μ` off a normalized truncation `Σ_j μ_j(x) c_j`.
fn section_of<S: Scalar>(setup: &BfvSetup<S>, beta: &SuperPoly<S>) -> Result<Vec<SuperPoly<S>>> {
    if !is_normalized(setup, beta) {
        return Err(Error::precondition(
            "MC element is not normalized",
            Some(truncation(setup, beta).serialize()),
        ));
    }
    let ph = setup.phase();
    let t = truncation(setup, beta);
    Ok((0..ph.e).map(|j| t.partial(ph.c(j))).collect())
}

fn require_mc<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    beta: &SuperPoly<S>,
    name: &str,
) -> Result<()> {
    setup.require_function(beta, name)?;
    if !(beta.is_zero() || beta.is_homogeneous_of(1)) {
        return Err(Error::Argument(format!("{name} must have total degree 1")));
    }
    let residual = mc_residual_bfv(setup, charge, beta);
    if !residual.is_zero() {
        return Err(Error::precondition(
            format!("{name} is not a Maurer-Cartan element"),
            Some(residual.serialize()),
        ));
    }
    Ok(())
}

/// Finds `ε_1, ε_2, …`, `ε_k ∈ BFV^{(k+1,k+1)}`, with
/// `exp(−ad ε_N) ⋯ exp(−ad ε_1)(Ω+α) = Ω+β` for two normalized MC
/// elements with equal truncation. Levels where `α` and `β` already agree
/// contribute no generator.
pub fn gauge_between<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    alpha: &SuperPoly<S>,
    beta: &SuperPoly<S>,
) -> Result<Vec<SuperPoly<S>>> {
    require_mc(setup, charge, alpha, "alpha")?;
    require_mc(setup, charge, beta, "beta")?;
    if truncation(setup, alpha) != truncation(setup, beta) {
        return Err(Error::precondition(
            "the truncations differ",
            Some((&truncation(setup, beta) - &truncation(setup, alpha)).serialize()),
        ));
    }
    let mu = section_of(setup, alpha)?;
    let ph = setup.phase();
    let target = charge.total() + beta;
    let mut current = charge.total() + alpha;
    let mut generators = Vec::new();
    for k in 1..=ph.e {
        let difference = &target - &current;
        if lowest_ghost_momentum(ph, &difference).is_some_and(|q| q < k) {
            return Err(Error::Internal(format!(
                "gauge step left a difference below level {k}"
            )));
        }
        let diff_k = ghost_momentum_component(ph, &difference, k);
        if diff_k.is_zero() {
            continue;
        }
        if !setup.delta_mu(&mu, &diff_k).is_zero() {
            return Err(Error::Internal(format!(
                "level-{k} difference is not delta[mu]-closed"
            )));
        }
        let epsilon = setup.homotopy_h_mu(&mu, &diff_k);
        if setup.delta_mu(&mu, &epsilon) != diff_k {
            return Err(Error::Internal(format!(
                "level-{k} difference is not delta[mu]-exact"
            )));
        }
        current = exp_ad(setup, &epsilon, -1, &current)?;
        generators.push(epsilon);
    }
    if current != target {
        return Err(Error::Internal(format!(
            "gauge composite misses the target by {}",
            (&target - &current).serialize()
        )));
    }
    Ok(generators)
}

/// Applies `exp(−ad ε_N) ⋯ exp(−ad ε_1)` to `Ω + α` and returns the
/// result minus `Ω`.
pub fn apply_gauge<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    generators: &[SuperPoly<S>],
    alpha: &SuperPoly<S>,
) -> Result<SuperPoly<S>> {
    let mut current = charge.total() + alpha;
    for epsilon in generators {
        current = exp_ad(setup, epsilon, -1, &current)?;
    }
    Ok(&current - charge.total())
}

/// The inverse of [`apply_gauge`].
pub fn apply_inverse_gauge<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    generators: &[SuperPoly<S>],
    beta: &SuperPoly<S>,
) -> Result<SuperPoly<S>> {
    let mut current = charge.total() + beta;
    for epsilon in generators.iter().rev() {
        current = exp_ad(setup, epsilon, 1, &current)?;
    }
    Ok(&current - charge.total())
}

/// A certificate `{h^i,h^j}_Π = Σ_k a_k h^k`, or its absence within the
/// degree bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S: Scalar> {
    pub i: usize,
    pub j: usize,
    pub bracket: SuperPoly<S>,
    pub coefficients: Option<Vec<SuperPoly<S>>>,
}

/// Generators `h^j = ∂/∂c_j T(Ω+β)` of the ideal of the deformed
/// submanifold and closure certificates for their brackets.
#[derive(Clone, Debug, PartialEq)]
pub struct CoisotropeReport<S: Scalar> {
    pub generators: Vec<SuperPoly<S>>,
    pub certificates: Vec<Certificate<S>>,
}

impl<S: Scalar> CoisotropeReport<S> {
    /// Whether every pair has a certificate.
    pub fn is_closed(&self) -> bool {
        self.certificates.iter().all(|c| c.coefficients.is_some())
    }
}

/// Computes the generators of a normalized MC element and searches, for
/// each pair, for coefficients `a_k(x, y)` of degree at most
/// `degree_bound` with `{h^i,h^j}_Π = Σ_k a_k h^k`.
pub fn coisotrope_generators<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    beta: &SuperPoly<S>,
    degree_bound: u32,
) -> Result<CoisotropeReport<S>> {
    require_mc(setup, charge, beta, "beta")?;
    section_of(setup, beta)?;
    let ph = setup.phase();
    let head = &setup.tautological_section() + &truncation(setup, beta);
    let generators: Vec<SuperPoly<S>> = (0..ph.e).map(|j| head.partial(ph.c(j))).collect();
    let basis = coordinate_monomials(setup, degree_bound);
    let mut certificates = Vec::new();
    for i in 0..ph.e {
        for j in i + 1..ph.e {
            let bracket = setup.poisson_bracket(&generators[i], &generators[j]);
            let coefficients = solve_membership(setup, &generators, &basis, &bracket);
            certificates.push(Certificate {
                i,
                j,
                bracket,
                coefficients,
            });
        }
    }
    Ok(CoisotropeReport {
        generators,
        certificates,
    })
}

/// All monomials in `x, y` of degree at most `bound`.
fn coordinate_monomials<S: Scalar>(setup: &BfvSetup<S>, bound: u32) -> Vec<SuperPoly<S>> {
    let ph = setup.phase();
    let coords = ph.coordinates();
    let mut layer = vec![SuperPoly::one(ph.table())];
    let mut all = layer.clone();
    for _ in 0..bound {
        let mut next: BTreeMap<Monomial, SuperPoly<S>> = BTreeMap::new();
        for m in &layer {
            for &z in &coords {
                let product = m * &ph.gen(z);
                let key = product.terms().next().expect("nonzero product").0.clone();
                next.entry(key).or_insert(product);
            }
        }
        layer = next.into_values().collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Solves `Σ_k a_k h^k = target` for `a_k` in the span of `basis`.
fn solve_membership<S: Scalar>(
    setup: &BfvSetup<S>,
    generators: &[SuperPoly<S>],
    basis: &[SuperPoly<S>],
    target: &SuperPoly<S>,
) -> Option<Vec<SuperPoly<S>>> {
    let unknowns = generators.len() * basis.len();
    let mut rows: BTreeMap<Monomial, SparseRow<S>> = BTreeMap::new();
    let empty = || SparseRow {
        coeffs: BTreeMap::new(),
        rhs: S::zero(),
    };
    for (k, h) in generators.iter().enumerate() {
        for (b, m) in basis.iter().enumerate() {
            for (mono, c) in (m * h).terms() {
                rows.entry(mono.clone())
                    .or_insert_with(empty)
                    .coeffs
                    .insert(k * basis.len() + b, c.clone());
            }
        }
    }
    for (mono, c) in target.terms() {
        rows.entry(mono.clone()).or_insert_with(empty).rhs = c.clone();
    }
    let solution = solve_sparse(unknowns, rows.into_values().collect())?;
    Some(
        (0..generators.len())
            .map(|k| {
                let mut a = setup.zero();
                for (b, m) in basis.iter().enumerate() {
                    a.add_scaled(m, &solution[k * basis.len() + b]);
                }
                a
            })
            .collect(),
    )
}
