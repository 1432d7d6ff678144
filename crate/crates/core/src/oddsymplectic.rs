//! Multivector fields as functions on a shifted cotangent bundle.
//!
//! A [`PhaseAlgebra`] doubles a list of coordinates `z` by momenta `z*` of
//! degree `1 − |z|`; a multivector field `ξ ∂⃗_z` is the polynomial `ξ·z*`.
//! The Schouten–Nijenhuis bracket is the canonical odd bracket
//!
//! `[A,B] = Σ_z (A ∂⃖_{z*})(∂⃗_z B) − (A ∂⃖_z)(∂⃗_{z*} B)`,
//!
//! of degree −1, with `[z*, z] = 1`.
//!
//! [`BfvPhase`] specializes to the coordinates `x` (base), `y` (fiber),
//! ghosts `c` and ghost momenta `b` of the BFV construction, and
//! [`LiftContraction`] carries the contraction `(Q, H∇, ι∇, Pr)` used to
//! lift a base bivector to a solution of `[Π̂,Π̂] = 0`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::parity_sign;
use crate::linfty::Vector;
use crate::scalar::Scalar;
use crate::superpoly::{Generator, GeneratorTable, SuperPoly};
use crate::treetransfer::{ContractionData, Transfer};

/// A multivector field on a graded manifold, as a polynomial on its
/// shifted cotangent bundle.
pub type MultiVector<S> = SuperPoly<S>;

/// Coordinates together with one conjugate momentum each.
#[derive(Clone, Debug)]
pub struct PhaseAlgebra {
    table: Arc<GeneratorTable>,
    coordinates: usize,
}

impl PhaseAlgebra {
    /// Builds the table `z_1, …, z_n, p z_1, …, p z_n`; the momentum of a
    /// coordinate named `w` is named `pw` and has degree `1 − |w|`.
    pub fn new(coordinates: Vec<Generator>) -> Result<Self> {
        let n = coordinates.len();
        let momenta: Vec<Generator> = coordinates
            .iter()
            .map(|g| Generator::new(format!("p{}", g.name), 1 - g.degree))
            .collect();
        let mut gens = coordinates;
        gens.extend(momenta);
        Ok(PhaseAlgebra {
            table: GeneratorTable::new(gens)?,
            coordinates: n,
        })
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    /// Number of coordinates (half the number of generators).
    pub fn coordinates(&self) -> usize {
        self.coordinates
    }

    /// Index of the momentum conjugate to coordinate `z`.
    pub fn momentum(&self, z: usize) -> usize {
        z + self.coordinates
    }

    /// The Schouten–Nijenhuis bracket.
    pub fn bracket<S: Scalar>(
        &self,
        a: &MultiVector<S>,
        b: &MultiVector<S>,
    ) -> Result<MultiVector<S>> {
        if a.table() != &self.table || b.table() != &self.table {
            return Err(Error::Argument(
                "bracket of multivectors over different algebras".into(),
            ));
        }
        let mut out = SuperPoly::zero(&self.table);
        for z in 0..self.coordinates {
            let theta = self.momentum(z);
            if a.involves(theta) && b.involves(z) {
                out.add_assign_ref(&(&a.right_partial(theta) * &b.partial(z)));
            }
            if a.involves(z) && b.involves(theta) {
                out.add_scaled(&(&a.right_partial(z) * &b.partial(theta)), &-S::one());
            }
        }
        Ok(out)
    }
}

/// The Schouten–Nijenhuis bracket on a phase algebra.
pub fn sn_bracket<S: Scalar>(
    phase: &PhaseAlgebra,
    a: &MultiVector<S>,
    b: &MultiVector<S>,
) -> Result<MultiVector<S>> {
    phase.bracket(a, b)
}

/// Ghost and ghost-momentum counts `(m, n)` of a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bidegree {
    pub m: i64,
    pub n: i64,
}

impl Bidegree {
    pub fn new(m: i64, n: i64) -> Self {
        Bidegree { m, n }
    }
}

/// The phase algebra on `x_1..x_s` (degree 0), `y_1..y_e` (0), `c_1..c_e`
/// (+1) and `b_1..b_e` (−1), with momenta `px, py, pc, pb` in that order.
///
/// Base multivectors `V(E)` are the polynomials in `x, y, px, py`; BFV
/// functions are the polynomials in `x, y, c, b`.
#[derive(Clone, Debug)]
pub struct BfvPhase {
    pub s: usize,
    pub e: usize,
    phase: PhaseAlgebra,
}

impl BfvPhase {
    pub fn new(s: usize, e: usize) -> Result<Self> {
        let mut coords = Vec::with_capacity(s + 3 * e);
        coords.extend((1..=s).map(|i| Generator::new(format!("x{i}"), 0)));
        coords.extend((1..=e).map(|j| Generator::new(format!("y{j}"), 0)));
        coords.extend((1..=e).map(|j| Generator::new(format!("c{j}"), 1)));
        coords.extend((1..=e).map(|j| Generator::new(format!("b{j}"), -1)));
        Ok(BfvPhase {
            s,
            e,
            phase: PhaseAlgebra::new(coords)?,
        })
    }

    pub fn phase(&self) -> &PhaseAlgebra {
        &self.phase
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        self.phase.table()
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }
    pub fn y(&self, j: usize) -> usize {
        self.s + j
    }
    pub fn c(&self, j: usize) -> usize {
        self.s + self.e + j
    }
    pub fn b(&self, j: usize) -> usize {
        self.s + 2 * self.e + j
    }
    pub fn px(&self, i: usize) -> usize {
        self.phase.momentum(self.x(i))
    }
    pub fn py(&self, j: usize) -> usize {
        self.phase.momentum(self.y(j))
    }
    pub fn pc(&self, j: usize) -> usize {
        self.phase.momentum(self.c(j))
    }
    pub fn pb(&self, j: usize) -> usize {
        self.phase.momentum(self.b(j))
    }

    /// The generator with the given index as a polynomial.
    pub fn gen<S: Scalar>(&self, index: usize) -> SuperPoly<S> {
        SuperPoly::generator(self.table(), index)
    }

    /// Parses a polynomial over this table.
    pub fn parse<S: Scalar>(&self, text: &str) -> Result<SuperPoly<S>> {
        SuperPoly::parse(self.table(), text)
    }

    pub fn bracket<S: Scalar>(&self, a: &SuperPoly<S>, b: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        self.phase.bracket(a, b)
    }

    /// Indices of `c, b, pc, pb`.
    pub fn fiber_ghosts(&self) -> Vec<usize> {
        (0..self.e)
            .flat_map(|j| [self.c(j), self.b(j), self.pc(j), self.pb(j)])
            .collect()
    }

    /// Indices of `x, y, px, py`.
    pub fn base_generators(&self) -> Vec<usize> {
        (0..self.s)
            .flat_map(|i| [self.x(i), self.px(i)])
            .chain((0..self.e).flat_map(|j| [self.y(j), self.py(j)]))
            .collect()
    }

    /// Indices of `x, y`.
    pub fn coordinates(&self) -> Vec<usize> {
        (0..self.s)
            .map(|i| self.x(i))
            .chain((0..self.e).map(|j| self.y(j)))
            .collect()
    }

    /// Whether `a` lies in `V(E)`, the polynomials in `x, y, px, py`.
    pub fn is_base(&self, a: &SuperPoly<impl Scalar>) -> bool {
        self.fiber_ghosts().iter().all(|&g| !a.involves(g))
    }

    /// `(#c − #pc, #b − #pb)`, the shift of function bidegree caused by
    /// the monomial.
    pub fn bidegree(&self, m: &[u16]) -> Bidegree {
        let count =
            |f: &dyn Fn(usize) -> usize| -> i64 { (0..self.e).map(|j| m[f(j)] as i64).sum() };
        Bidegree {
            m: count(&|j| self.c(j)) - count(&|j| self.pc(j)),
            n: count(&|j| self.b(j)) - count(&|j| self.pb(j)),
        }
    }

    /// Projection onto `V^{(m,n)}`: monomials with at least `m` ghosts and
    /// at least `n` ghost momenta.
    pub fn bidegree_component<S: Scalar>(
        &self,
        a: &SuperPoly<S>,
        at_least: Bidegree,
    ) -> SuperPoly<S> {
        a.filter(|mono| {
            let c: i64 = (0..self.e).map(|j| mono[self.c(j)] as i64).sum();
            let b: i64 = (0..self.e).map(|j| mono[self.b(j)] as i64).sum();
            c >= at_least.m && b >= at_least.n
        })
    }

    /// `G = Σ_j pb_j pc_j`, the fibre pairing.
    pub fn fibre_pairing<S: Scalar>(&self) -> SuperPoly<S> {
        let mut g = SuperPoly::zero(self.table());
        for j in 0..self.e {
            g.add_assign_ref(&(&self.gen::<S>(self.pb(j)) * &self.gen(self.pc(j))));
        }
        g
    }
}

/// Connection coefficients `Γ_{αr}^s(x, y)` on the trivial bundle.
#[derive(Clone, Debug)]
pub struct Connection<S: Scalar> {
    s: usize,
    e: usize,
    coefficients: Vec<SuperPoly<S>>,
}

impl<S: Scalar> Connection<S> {
    /// The flat connection `Γ = 0`.
    pub fn zero(phase: &BfvPhase) -> Self {
        Connection {
            s: phase.s,
            e: phase.e,
            coefficients: vec![SuperPoly::zero(phase.table()); phase.s * phase.e * phase.e],
        }
    }

    fn slot(&self, alpha: usize, r: usize, s: usize) -> Result<usize> {
        if alpha >= self.s || r >= self.e || s >= self.e {
            return Err(Error::Argument(format!(
                "connection index ({alpha},{r},{s}) out of range for s={}, e={}",
                self.s, self.e
            )));
        }
        Ok((alpha * self.e + r) * self.e + s)
    }

    /// Sets `Γ_{αr}^s`, which must be a polynomial in `x` and `y`.
    pub fn set(
        &mut self,
        phase: &BfvPhase,
        alpha: usize,
        r: usize,
        s: usize,
        value: SuperPoly<S>,
    ) -> Result<()> {
        let k = self.slot(alpha, r, s)?;
        let coords = phase.coordinates();
        if value.table() != phase.table()
            || (0..phase.table().len()).any(|g| !coords.contains(&g) && value.involves(g))
        {
            return Err(Error::Argument(format!(
                "connection coefficient ({alpha},{r},{s}) must be a polynomial in x and y"
            )));
        }
        self.coefficients[k] = value;
        Ok(())
    }

    pub fn get(&self, alpha: usize, r: usize, s: usize) -> Result<&SuperPoly<S>> {
        Ok(&self.coefficients[self.slot(alpha, r, s)?])
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }
}

/// The contraction `(Q, H∇, ι∇, Pr)` from the doubled algebra onto `V(E)`.
///
/// `φ` is the algebra automorphism `px_α ↦ px_α + Γ_{αr}^s c_s pc_r −
/// Γ_{αr}^s b_r pb_s` fixing every other generator, `ι∇` is its restriction
/// to `V(E)` and `H∇ = φ ∘ (K/N) ∘ φ⁻¹`, where `K = Σ_j c_j ∂⃗_{pb_j} +
/// b_j ∂⃗_{pc_j}` and `N` counts `c, b, pc, pb`. With `Q = [G,−]` one has
/// `QK + KQ = N`, hence `Q H∇ + H∇ Q = id − ι∇ Pr`.
#[derive(Clone, Debug)]
pub struct LiftContraction<S: Scalar> {
    phase: BfvPhase,
    connection: Connection<S>,
    forward: Vec<Option<SuperPoly<S>>>,
    backward: Vec<Option<SuperPoly<S>>>,
    g: SuperPoly<S>,
}

impl<S: Scalar> LiftContraction<S> {
    pub fn new(phase: &BfvPhase, connection: Connection<S>) -> Result<Self> {
        let table = phase.table();
        let mut forward = vec![None; table.len()];
        let mut backward = vec![None; table.len()];
        for alpha in 0..phase.s {
            let mut shift = SuperPoly::zero(table);
            for r in 0..phase.e {
                for s in 0..phase.e {
                    let gamma = connection.get(alpha, r, s)?;
                    if gamma.is_zero() {
                        continue;
                    }
                    let up = &phase.gen::<S>(phase.c(s)) * &phase.gen(phase.pc(r));
                    let down = &phase.gen::<S>(phase.b(r)) * &phase.gen(phase.pb(s));
                    shift.add_assign_ref(&(gamma * &(&up - &down)));
                }
            }
            if shift.is_zero() {
                continue;
            }
            let px = phase.gen::<S>(phase.px(alpha));
            forward[phase.px(alpha)] = Some(&px + &shift);
            backward[phase.px(alpha)] = Some(&px - &shift);
        }
        Ok(LiftContraction {
            phase: phase.clone(),
            connection,
            forward,
            backward,
            g: phase.fibre_pairing(),
        })
    }

    pub fn phase(&self) -> &BfvPhase {
        &self.phase
    }

    pub fn connection(&self) -> &Connection<S> {
        &self.connection
    }

    /// The fibre pairing `G`.
    pub fn g(&self) -> &SuperPoly<S> {
        &self.g
    }

    fn phi(&self, a: &SuperPoly<S>) -> SuperPoly<S> {
        if self.connection.is_zero() {
            a.clone()
        } else {
            a.substitute(&self.forward)
        }
    }

    fn phi_inverse(&self, a: &SuperPoly<S>) -> SuperPoly<S> {
        if self.connection.is_zero() {
            a.clone()
        } else {
            a.substitute(&self.backward)
        }
    }

    /// The differential `Q = [G, −]`.
    pub fn q(&self, a: &SuperPoly<S>) -> SuperPoly<S> {
        self.phase.bracket(&self.g, a).expect("same table")
    }

    /// The horizontal lift `ι∇` of a base multivector.
    pub fn iota(&self, a: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        if !self.phase.is_base(a) {
            return Err(Error::Argument(
                "horizontal lift takes a multivector in x, y, px, py".into(),
            ));
        }
        Ok(self.phi(a))
    }

    /// The projection `Pr` setting `c, b, pc, pb` to zero.
    pub fn pr(&self, a: &SuperPoly<S>) -> SuperPoly<S> {
        a.set_to_zero(&self.phase.fiber_ghosts())
    }

    /// The homotopy `H∇`.
    pub fn h(&self, a: &SuperPoly<S>) -> SuperPoly<S> {
        let flat = self.phi_inverse(a);
        let ghosts = self.phase.fiber_ghosts();
        let mut by_count: std::collections::BTreeMap<u32, SuperPoly<S>> = Default::default();
        for (m, c) in flat.terms() {
            let n: u32 = ghosts.iter().map(|&g| m[g] as u32).sum();
            if n > 0 {
                by_count
                    .entry(n)
                    .or_insert_with(|| SuperPoly::zero(self.phase.table()))
                    .add_term(m.clone(), c.clone());
            }
        }
        let mut out = SuperPoly::zero(self.phase.table());
        for (n, part) in by_count {
            let mut k = SuperPoly::zero(self.phase.table());
            for j in 0..self.phase.e {
                k.add_assign_ref(
                    &(&self.phase.gen::<S>(self.phase.c(j)) * &part.partial(self.phase.pb(j))),
                );
                k.add_assign_ref(
                    &(&self.phase.gen::<S>(self.phase.b(j)) * &part.partial(self.phase.pc(j))),
                );
            }
            out.add_scaled(&k, &S::ratio(1, n as i64));
        }
        self.phi(&out)
    }

    /// `H∇([ι∇X, ι∇Y])` for base vector fields `X`, `Y`.
    pub fn curvature_defect(&self, x: &SuperPoly<S>, y: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        let bracket = self.phase.bracket(&self.iota(x)?, &self.iota(y)?)?;
        Ok(self.h(&bracket))
    }

    /// The structure `m¹ = Q`, `m²(A,B) = (−1)^{|A|}[A,B]` of the shifted
    /// Schouten algebra, in which bivectors have degree 0.
    pub fn shifted_binary(&self, a: &SuperPoly<S>, b: &SuperPoly<S>) -> SuperPoly<S> {
        let mut out = SuperPoly::zero(self.phase.table());
        for (deg, part) in a.homogeneous_components() {
            let br = self.phase.bracket(&part, b).expect("same table");
            out.add_assign_ref(&br.signed(parity_sign(deg)));
        }
        out
    }

    /// The tree transfer along this contraction, with no perturbation;
    /// trees with more than `e` vertices vanish.
    pub fn transfer(&self) -> Transfer<'_, S, SuperPoly<S>, SuperPoly<S>> {
        let contraction = ContractionData::new(
            move |a: &SuperPoly<S>| self.q(a),
            move |a: &SuperPoly<S>| self.h(a),
            move |a: &SuperPoly<S>| self.phi(a),
            move |a: &SuperPoly<S>| self.pr(a),
        );
        let zero = SuperPoly::zero(self.phase.table());
        Transfer::new(
            contraction,
            move |a: &SuperPoly<S>, b: &SuperPoly<S>| self.shifted_binary(a, b),
            |a: &SuperPoly<S>| a.degree().map(|d| d - 2),
            zero.clone(),
            zero,
        )
        .with_bounds(move |_| self.phase.e, move |_| self.phase.e)
    }

    /// The lift `Π̂ = G + λ(Π)` of a Poisson bivector on the base, with
    /// `λ` the transferred morphism summed over trees with at most `e`
    /// vertices.
    pub fn rothstein_lift(&self, pi: &SuperPoly<S>) -> Result<SuperPoly<S>> {
        if !self.phase.is_base(pi) || !pi.is_homogeneous_of(2) && !pi.is_zero() {
            return Err(Error::Argument(
                "the lift takes a bivector in x, y, px, py".into(),
            ));
        }
        let square = self.phase.bracket(pi, pi)?;
        if !square.is_zero() {
            return Err(Error::precondition(
                "not Poisson: [Pi,Pi] is nonzero",
                Some(square.serialize()),
            ));
        }
        let lambda = self.transfer().lambda_of_mc(pi, self.phase.e + 1)?;
        Ok(self.g.add(&lambda))
    }
}
