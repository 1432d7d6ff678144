//! Formal MC elements `β ∈ ε·BFV¹[[ε]]`, truncated at an explicit order.

use crate::error::{Error, Result};
use crate::random::{self, TestRng};
use crate::scalar::Scalar;
use crate::superpoly::SuperPoly;

use super::mc::{is_normalized, truncation};
use super::{bigrade_component, ghost_counts, BfvSetup, Charge, MAX_EXP_TERMS};

/// A polynomial in `ε` with BFV coefficients, modulo `ε^{order+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalSeries<S: Scalar> {
    coefficients: Vec<SuperPoly<S>>,
}

impl<S: Scalar> FormalSeries<S> {
    pub fn zero(setup: &BfvSetup<S>, order: usize) -> Self {
        FormalSeries {
            coefficients: vec![setup.zero(); order + 1],
        }
    }

    /// The series `Σ_l εˡ coefficients[l]`, truncated at the last index.
    pub fn from_coefficients(coefficients: Vec<SuperPoly<S>>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Argument("a formal series needs order >= 0".into()));
        }
        Ok(FormalSeries { coefficients })
    }

    /// `f·εˡ`.
    pub fn monomial(setup: &BfvSetup<S>, order: usize, l: usize, f: &SuperPoly<S>) -> Self {
        let mut out = Self::zero(setup, order);
        if l <= order {
            out.coefficients[l] = f.clone();
        }
        out
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// The coefficient of `εˡ`.
    pub fn coefficient(&self, l: usize) -> &SuperPoly<S> {
        &self.coefficients[l]
    }

    pub fn coefficients(&self) -> &[SuperPoly<S>] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        FormalSeries {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FormalSeries {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    fn scale(&self, c: &S) -> Self {
        FormalSeries {
            coefficients: self.coefficients.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// The BFV bracket extended `ε`-bilinearly.
    pub fn bracket(&self, setup: &BfvSetup<S>, other: &Self) -> Self {
        let order = self.order();
        let mut out = Self::zero(setup, order);
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out.coefficients[i + j].add_assign_ref(&setup.bfv_bracket(a, b));
                }
            }
        }
        out
    }

    /// `exp(ad γ)(self)` for `γ ∈ ε·BFV⁰[[ε]]`, which is nilpotent modulo
    /// `ε^{order+1}`.
    pub fn exp_ad(&self, setup: &BfvSetup<S>, gamma: &Self) -> Result<Self> {
        if !gamma.coefficient(0).is_zero() {
            return Err(Error::Argument(
                "formal gauge generators must vanish at epsilon = 0".into(),
            ));
        }
        let mut term = self.clone();
        let mut acc = self.clone();
        for n in 1..=MAX_EXP_TERMS {
            term = gamma.bracket(setup, &term).scale(&S::ratio(1, n as i64));
            if term.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&term);
        }
        Err(Error::Internal(
            "formal exponential did not terminate".into(),
        ))
    }
}

/// `[Ω+β, Ω+β]_BFV mod ε^{N+1}`.
pub fn formal_mc_residual<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    beta: &FormalSeries<S>,
) -> FormalSeries<S> {
    let full = FormalSeries::monomial(setup, beta.order(), 0, charge.total()).add(beta);
    full.bracket(setup, &full)
}

/// Output of [`normalize_formal_mc`]: the generators `γ(l)` applied as
/// `exp(ad εˡγ(l))` in increasing `l`, and the normalized element.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalNormalization<S: Scalar> {
    pub generators: Vec<(usize, SuperPoly<S>)>,
    pub normalized: FormalSeries<S>,
}

/// Gauges a formal MC element to one whose truncation is a pull-back
/// from `Γ(E)` at every order up to `N`.
///
/// At order `l` the truncation `β₀(l)` is split as
/// `p*i*β₀(l) + δ(h β₀(l))`, and `exp(ad εˡ h(β₀(l)))` removes the exact
/// part without touching lower orders.
pub fn normalize_formal_mc<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    beta: &FormalSeries<S>,
) -> Result<FormalNormalization<S>> {
    let order = beta.order();
    if !beta.coefficient(0).is_zero() {
        return Err(Error::Argument(
            "a formal MC element must vanish at epsilon = 0".into(),
        ));
    }
    for (l, c) in beta.coefficients().iter().enumerate() {
        setup.require_function(c, &format!("coefficient of epsilon^{l}"))?;
    }
    let residual = formal_mc_residual(setup, charge, beta);
    if let Some((l, c)) = residual
        .coefficients()
        .iter()
        .enumerate()
        .find(|(_, c)| !c.is_zero())
    {
        return Err(Error::precondition(
            format!("not a formal MC element at order {l}"),
            Some(c.serialize()),
        ));
    }
    let mut current = FormalSeries::monomial(setup, order, 0, charge.total()).add(beta);
    let mut generators = Vec::new();
    for l in 1..=order {
        let head = truncation(setup, current.coefficient(l));
        let gamma = setup.homotopy_h(&head);
        if gamma.is_zero() {
            continue;
        }
        current = current.exp_ad(setup, &FormalSeries::monomial(setup, order, l, &gamma))?;
        generators.push((l, gamma));
    }
    let normalized = current.sub(&FormalSeries::monomial(setup, order, 0, charge.total()));
    if let Some(l) = (0..=order).find(|&l| !is_normalized(setup, normalized.coefficient(l))) {
        return Err(Error::Internal(format!(
            "normalization failed at order {l}"
        )));
    }
    if !formal_mc_residual(setup, charge, &normalized).is_zero() {
        return Err(Error::Internal(
            "gauge transformation broke the MC equation".into(),
        ));
    }
    Ok(FormalNormalization {
        generators,
        normalized,
    })
}

/// A formal MC element `exp(ad εη_1) ⋯ exp(ad ε^Nη_N)(Ω) − Ω` with random
/// degree-zero `η_l` in bigrades `(0,0)` and `(1,1)`, whose truncation is
/// generally not normalized.
pub fn random_formal_perturbation<S: Scalar>(
    setup: &BfvSetup<S>,
    charge: &Charge<S>,
    rng: &mut TestRng,
    order: usize,
) -> Result<FormalSeries<S>> {
    let ph = setup.phase();
    let functions: Vec<usize> = (0..ph.s)
        .map(|i| ph.x(i))
        .chain((0..ph.e).flat_map(|j| [ph.y(j), ph.c(j), ph.b(j)]))
        .collect();
    let omega = FormalSeries::monomial(setup, order, 0, charge.total());
    let mut current = omega.clone();
    for l in (1..=order).rev() {
        let eta = loop {
            let candidate = random::poly::<S>(rng, ph.table(), &functions, 3, 3);
            let eta =
                &bigrade_component(ph, &candidate, 0, 0) + &bigrade_component(ph, &candidate, 1, 1);
            if eta.terms().any(|(m, _)| ghost_counts(ph, m) == (1, 1))
                || eta.terms().any(|(m, _)| (0..ph.e).any(|j| m[ph.y(j)] > 0))
            {
                break eta;
            }
        };
        current = current.exp_ad(setup, &FormalSeries::monomial(setup, order, l, &eta))?;
    }
    Ok(current.sub(&omega))
}
