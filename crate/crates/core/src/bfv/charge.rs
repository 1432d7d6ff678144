//! The BFV charge, the BFV L∞[1]-algebra and its transfer to `Γ(∧E)`.

use crate::error::{Error, Result};
use crate::linfty::LInftyAlgebra;
use crate::scalar::Scalar;
use crate::superpoly::SuperPoly;
use crate::treetransfer::{ContractionData, Transfer};

use super::{bigrade_component, ghost_momentum_component, lowest_ghost_momentum, BfvSetup};

/// A BFV charge `Ω = Σ_k Ω_k`, `Ω_k ∈ BFV^{(k+1,k)}`, with
/// `[Ω,Ω]_BFV = 0` and `Ω₀` the tautological section.
#[derive(Clone, Debug, PartialEq)]
pub struct Charge<S: Scalar> {
    levels: Vec<SuperPoly<S>>,
    total: SuperPoly<S>,
}

impl<S: Scalar> Charge<S> {
    /// The components `Ω_0, Ω_1, …`; trailing zero levels are dropped.
    pub fn levels(&self) -> &[SuperPoly<S>] {
        &self.levels
    }

    /// `Ω` itself.
    pub fn total(&self) -> &SuperPoly<S> {
        &self.total
    }

    /// `Ω_k`, zero beyond the last level.
    pub fn level(&self, k: usize) -> SuperPoly<S> {
        self.levels
            .get(k)
            .cloned()
            .unwrap_or_else(|| SuperPoly::zero(self.total.table()))
    }
}

/// Runs the level-by-level extension of `Ω₀` with the corrections
/// `Ω_{k+1} = −h(R_k)`, `2R_k = [Ω(k),Ω(k)]_BFV mod BFV_{≥k+1}`.
///
/// Fails with an internal error if some `R_k` is not `δ`-closed or the
/// final bracket does not vanish; both would indicate a sign bug.
pub fn build_charge<S: Scalar>(setup: &BfvSetup<S>) -> Result<Charge<S>> {
    let ph = setup.phase();
    let mut levels = vec![setup.tautological_section()];
    let mut total = levels[0].clone();
    for k in 0..=ph.e + 1 {
        let square = setup.bfv_bracket(&total, &total);
        if square.is_zero() {
            while levels.len() > 1 && levels.last().is_some_and(|l| l.is_zero()) {
                levels.pop();
            }
            return Ok(Charge { levels, total });
        }
        if lowest_ghost_momentum(ph, &square).is_some_and(|q| q < k) {
            return Err(Error::Internal(format!(
                "[Omega,Omega] has components below level {k} after correction"
            )));
        }
        let r = ghost_momentum_component(ph, &square, k).scale(&S::ratio(1, 2));
        if !setup.delta(&r).is_zero() {
            return Err(Error::Internal(format!("R_{k} is not delta-closed")));
        }
        let correction = setup.homotopy_h(&r).signed(-1);
        if setup.delta(&correction) != r.signed(-1) {
            return Err(Error::Internal(format!(
                "R_{k} is not delta-exact; is S coisotropic?"
            )));
        }
        total.add_assign_ref(&correction);
        levels.push(correction);
    }
    Err(Error::Internal(
        "the charge did not close within the ghost filtration".into(),
    ))
}

/// A setup together with a charge: the differential graded Poisson
/// algebra `(BFV, [Ω,−]_BFV, [−,−]_BFV)`.
#[derive(Clone, Debug)]
pub struct BfvComplex<S: Scalar> {
    setup: BfvSetup<S>,
    charge: Charge<S>,
    xi: SuperPoly<S>,
}

impl<S: Scalar> BfvComplex<S> {
    pub fn new(setup: BfvSetup<S>, charge: Charge<S>) -> Self {
        let xi = setup
            .phase()
            .bracket(setup.pi_hat(), charge.total())
            .expect("same table");
        BfvComplex { setup, charge, xi }
    }

    /// Builds the charge of `setup` and wraps both.
    pub fn build(setup: BfvSetup<S>) -> Result<Self> {
        let charge = build_charge(&setup)?;
        Ok(Self::new(setup, charge))
    }

    pub fn setup(&self) -> &BfvSetup<S> {
        &self.setup
    }

    pub fn charge(&self) -> &Charge<S> {
        &self.charge
    }

    /// `D_BFV = [Ω,−]_BFV`, as the Hamiltonian vector field `[[Π̂,Ω],−]`.
    pub fn differential(&self, f: &SuperPoly<S>) -> SuperPoly<S> {
        self.setup.phase().bracket(&self.xi, f).expect("same table")
    }

    /// `D_BFV − δ`, the perturbation of the contraction `(δ, h, p*, i*)`.
    pub fn perturbation(&self, f: &SuperPoly<S>) -> SuperPoly<S> {
        &self.differential(f) - &self.setup.delta(f)
    }

    /// The BFV L∞[1]-algebra.
    pub fn algebra(&self) -> BfvAlgebra<'_, S> {
        BfvAlgebra { complex: self }
    }

    /// The tree transfer to `Γ(∧E)` along `(δ, h, p*, i*)` perturbed by
    /// `D_BFV − δ`.
    ///
    /// Each `−h` raises the ghost-momentum count by one while `D_BFV − δ`
    /// never lowers it and a binary vertex lowers it by at most one, so a
    /// tree with `k` leaves and `d` decorations only survives the
    /// projection `i*` when `d ≤ 1`, and survives at all when `d ≤ e`. The
    /// cutoffs `vertices + decorations ≤ k` for `ν` and `≤ k − 1 + e` for
    /// `λ` follow this count; [`Self::transfer_with_bounds`] raises them
    /// when a check against larger bounds is wanted.
    pub fn transfer(&self) -> Transfer<'_, S, SuperPoly<S>, SuperPoly<S>> {
        let e = self.setup.phase().e;
        self.transfer_with_bounds(move |k| *k, move |k| k - 1 + e)
    }

    /// [`Self::transfer`] with explicit cutoffs.
    pub fn transfer_with_bounds(
        &self,
        nu: impl Fn(&usize) -> usize + Send + Sync + 'static,
        lambda: impl Fn(&usize) -> usize + Send + Sync + 'static,
    ) -> Transfer<'_, S, SuperPoly<S>, SuperPoly<S>> {
        let setup = &self.setup;
        let contraction = ContractionData::new(
            move |f: &SuperPoly<S>| setup.delta(f),
            move |f: &SuperPoly<S>| setup.homotopy_h(f),
            move |f: &SuperPoly<S>| f.clone(),
            move |f: &SuperPoly<S>| setup.i_star(f),
        );
        Transfer::new(
            contraction,
            move |f: &SuperPoly<S>, g: &SuperPoly<S>| self.binary(f, g),
            |f: &SuperPoly<S>| f.degree().map(|d| d - 1),
            setup.zero(),
            setup.zero(),
        )
        .with_perturbation(move |f: &SuperPoly<S>| self.perturbation(f))
        .with_bounds(nu, lambda)
    }

    /// `m²(f,g) = [[Π̂,f],g]`.
    pub fn binary(&self, f: &SuperPoly<S>, g: &SuperPoly<S>) -> SuperPoly<S> {
        let ph = self.setup.phase();
        let inner = ph.bracket(self.setup.pi_hat(), f).expect("same table");
        ph.bracket(&inner, g).expect("same table")
    }

    /// Checks that every level `Ω_k` lies in `BFV^{(k+1,k)}` and that
    /// `[Ω,Ω]_BFV = 0`.
    pub fn verify_charge(&self) -> Result<()> {
        let ph = self.setup.phase();
        if self.charge.level(0) != self.setup.tautological_section() {
            return Err(Error::Internal(
                "Omega_0 is not the tautological section".into(),
            ));
        }
        for (k, level) in self.charge.levels().iter().enumerate() {
            if bigrade_component(ph, level, k + 1, k) != *level {
                return Err(Error::Internal(format!(
                    "Omega_{k} is not in bigrade ({}, {k})",
                    k + 1
                )));
            }
        }
        let square = self
            .setup
            .bfv_bracket(self.charge.total(), self.charge.total());
        if !square.is_zero() {
            return Err(Error::Internal(format!(
                "[Omega,Omega] = {}",
                square.serialize()
            )));
        }
        Ok(())
    }

    /// The spectral-sequence differential
    /// `δ₁ = [Ω₀,−]_{ι∇(Π)} + [Ω₁,−]_G` restricted to `Γ(∧E)` and
    /// projected by `i*`.
    pub fn delta1_from_charge(&self, f: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        let f = self.setup.p_star(f)?;
        let omega0 = self.charge.level(0);
        let omega1 = self.charge.level(1);
        let value = &self.setup.lifted_bracket(&omega0, &f) + &self.setup.g_bracket(&omega1, &f);
        Ok(self.setup.i_star(&value))
    }
}

/// The BFV algebra as an L∞[1]-algebra: the derived structure of
/// `Π̂ + [Π̂,Ω]` on functions, `m¹ = [Ω,−]_BFV`, `m²(f,g) = [[Π̂,f],g]`,
/// with shifted degree `|f| − 1`.
pub struct BfvAlgebra<'a, S: Scalar> {
    complex: &'a BfvComplex<S>,
}

impl<'a, S: Scalar> LInftyAlgebra<S> for BfvAlgebra<'a, S> {
    type Elem = SuperPoly<S>;

    fn zero(&self) -> SuperPoly<S> {
        self.complex.setup.zero()
    }

    fn degree(&self, x: &SuperPoly<S>) -> Option<i64> {
        x.degree().map(|d| d - 1)
    }

    fn operation(&self, n: usize, args: &[SuperPoly<S>]) -> SuperPoly<S> {
        match n {
            1 => self.complex.differential(&args[0]),
            2 => self.complex.binary(&args[0], &args[1]),
            _ => self.zero(),
        }
    }
}
