//! Decorated trees and homotopy transfer along contraction data.
//!
//! Given contraction data `(d, h, i, p)` between a big space `X` and a
//! retract `H`, a perturbation `μ¹_Δ` of the differential and a binary
//! operation `μ²`, every oriented decorated binary tree `T` defines a map
//! `m_T`: `μ²` at interior vertices, `decoration`-many `μ¹_Δ` on each edge,
//! `−h` between consecutive operations, `i` at the leaves and `p` (for `ν`)
//! or `−h` (for `λ`) at the root.
//!
//! Signs inside `m_T` come only from moving operators past arguments. The
//! evaluation order is left to right: at a vertex the left subtree is
//! evaluated on the first arguments and the right subtree on the rest, and
//! the right composite, of parity equal to its number of operations, moves
//! past the left arguments.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::graded::{koszul_sign, parity_sign, permutations};
use crate::linalg::Matrix;
use crate::linfty::Vector;
use crate::scalar::Scalar;

/// A node of a binary tree: a leaf or an interior vertex with an ordered
/// pair of incoming edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf,
    Vertex(Box<Edge>, Box<Edge>),
}

/// An edge carrying a decoration, together with the subtree above it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub decoration: u32,
    pub node: Node,
}

impl Edge {
    pub fn leaf(decoration: u32) -> Self {
        Edge {
            decoration,
            node: Node::Leaf,
        }
    }

    pub fn vertex(decoration: u32, left: Edge, right: Edge) -> Self {
        Edge {
            decoration,
            node: Node::Vertex(Box::new(left), Box::new(right)),
        }
    }

    fn leaves(&self) -> usize {
        match &self.node {
            Node::Leaf => 1,
            Node::Vertex(l, r) => l.leaves() + r.leaves(),
        }
    }

    fn vertices(&self) -> usize {
        match &self.node {
            Node::Leaf => 0,
            Node::Vertex(l, r) => 1 + l.vertices() + r.vertices(),
        }
    }

    fn total_decoration(&self) -> u32 {
        self.decoration
            + match &self.node {
                Node::Leaf => 0,
                Node::Vertex(l, r) => l.total_decoration() + r.total_decoration(),
            }
    }

    fn canonical(&self) -> String {
        match &self.node {
            Node::Leaf => format!("{}L", self.decoration),
            Node::Vertex(l, r) => {
                let (a, b) = (l.canonical(), r.canonical());
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                format!("{}({a},{b})", self.decoration)
            }
        }
    }

    /// Clusters of leaves below every vertex edge, with the decoration of
    /// that edge, plus the decoration of every leaf.
    fn clusters(
        &self,
        next_leaf: &mut usize,
        out: &mut Vec<(Vec<usize>, u32)>,
        leaves: &mut Vec<u32>,
    ) -> Vec<usize> {
        match &self.node {
            Node::Leaf => {
                let k = *next_leaf;
                *next_leaf += 1;
                leaves.push(self.decoration);
                vec![k]
            }
            Node::Vertex(l, r) => {
                let mut all = l.clusters(next_leaf, out, leaves);
                all.extend(r.clusters(next_leaf, out, leaves));
                all.sort_unstable();
                out.push((all.clone(), self.decoration));
                all
            }
        }
    }
}

/// A rooted, oriented binary tree with decorated edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedTree {
    root: Edge,
}

impl DecoratedTree {
    /// Wraps a root edge; the one-leaf tree must carry a positive decoration.
    pub fn new(root: Edge) -> Result<Self> {
        if root.node == Node::Leaf && root.decoration == 0 {
            return Err(Error::Argument(
                "the one-leaf tree needs a positive decoration".into(),
            ));
        }
        Ok(DecoratedTree { root })
    }

    pub fn root(&self) -> &Edge {
        &self.root
    }

    pub fn leaves(&self) -> usize {
        self.root.leaves()
    }

    pub fn vertices(&self) -> usize {
        self.root.vertices()
    }

    pub fn total_decoration(&self) -> u32 {
        self.root.total_decoration()
    }

    /// Orientation-independent encoding: `{dec}L` for a leaf and
    /// `{dec}(a,b)` for a vertex with child encodings sorted.
    pub fn canonical(&self) -> String {
        self.root.canonical()
    }

    /// Order of the automorphism group of the underlying unoriented
    /// decorated tree, by searching leaf permutations that preserve leaf
    /// decorations and the decorated leaf clusters of all vertices.
    pub fn automorphisms(&self) -> u64 {
        let mut clusters = Vec::new();
        let mut leaf_decs = Vec::new();
        self.root.clusters(&mut 0, &mut clusters, &mut leaf_decs);
        let n = leaf_decs.len();
        let mut reference: Vec<(Vec<usize>, u32)> = clusters.clone();
        reference.sort();
        let mut count = 0;
        for perm in permutations(n) {
            if (0..n).any(|k| leaf_decs[perm[k]] != leaf_decs[k]) {
                continue;
            }
            let mut image: Vec<(Vec<usize>, u32)> = clusters
                .iter()
                .map(|(set, dec)| {
                    let mut s: Vec<usize> = set.iter().map(|&k| perm[k]).collect();
                    s.sort_unstable();
                    (s, *dec)
                })
                .collect();
            image.sort();
            if image == reference {
                count += 1;
            }
        }
        count
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// One representative per unoriented decorated class.
#[derive(Clone, Debug)]
pub struct TreeClass {
    pub tree: DecoratedTree,
    pub automorphisms: u64,
}

/// All oriented edges with `n` leaves and total decoration at most `budget`.
fn oriented_edges(n: usize, budget: u32) -> Vec<Edge> {
    let mut out = Vec::new();
    for dec in 0..=budget {
        if n == 1 {
            out.push(Edge::leaf(dec));
            continue;
        }
        let rest = budget - dec;
        for left_leaves in 1..n {
            for left in oriented_edges(left_leaves, rest) {
                let used = left.total_decoration();
                for right in oriented_edges(n - left_leaves, rest - used) {
                    out.push(Edge::vertex(dec, left.clone(), right));
                }
            }
        }
    }
    out
}

/// Every oriented decorated tree with `n` leaves and total decoration at
/// most `max_total_decoration`.
pub fn oriented_trees(n: usize, max_total_decoration: u32) -> Result<Vec<DecoratedTree>> {
    if n == 0 {
        return Err(Error::Argument("trees need at least one leaf".into()));
    }
    Ok(oriented_edges(n, max_total_decoration)
        .into_iter()
        .filter(|e| !(n == 1 && e.decoration == 0))
        .map(|root| DecoratedTree { root })
        .collect())
}

/// Unoriented decorated classes with `n` leaves and total decoration at most
/// the bound, sorted by canonical encoding, each with `|Aut(T)|`.
pub fn enumerate_trees(n: usize, max_total_decoration: u32) -> Result<Vec<TreeClass>> {
    let mut classes: BTreeMap<String, DecoratedTree> = BTreeMap::new();
    for tree in oriented_trees(n, max_total_decoration)? {
        classes.entry(tree.canonical()).or_insert(tree);
    }
    Ok(classes
        .into_values()
        .map(|tree| TreeClass {
            automorphisms: tree.automorphisms(),
            tree,
        })
        .collect())
}

type Map<'a, A, B> = Box<dyn Fn(&A) -> B + Send + Sync + 'a>;
type Binary<'a, A> = Box<dyn Fn(&A, &A) -> A + Send + Sync + 'a>;

/// Contraction data `(d, h, i, p)` from a big space `X` onto `H`.
pub struct ContractionData<'a, X, H> {
    pub d: Map<'a, X, X>,
    pub h: Map<'a, X, X>,
    pub i: Map<'a, H, X>,
    pub p: Map<'a, X, H>,
}

impl<'a, X, H> ContractionData<'a, X, H> {
    pub fn new(
        d: impl Fn(&X) -> X + Send + Sync + 'a,
        h: impl Fn(&X) -> X + Send + Sync + 'a,
        i: impl Fn(&H) -> X + Send + Sync + 'a,
        p: impl Fn(&X) -> H + Send + Sync + 'a,
    ) -> Self {
        ContractionData {
            d: Box::new(d),
            h: Box::new(h),
            i: Box::new(i),
            p: Box::new(p),
        }
    }
}

/// Where the root edge of a tree ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RootMap {
    Projection,
    Homotopy,
}

/// Contraction data together with the perturbed structure on `X`, ready
/// for tree sums.
///
/// Tree sums are cut off by explicit bounds on `vertices + decorations`,
/// separately for `ν` and `λ`.
pub struct Transfer<'a, S, X, H> {
    pub contraction: ContractionData<'a, X, H>,
    perturbation: Option<Map<'a, X, X>>,
    binary: Binary<'a, X>,
    degree_h: Map<'a, H, Option<i64>>,
    zero_x: X,
    zero_h: H,
    nu_bound: Map<'a, usize, usize>,
    lambda_bound: Map<'a, usize, usize>,
    trees: Mutex<HashMap<(usize, u32), Vec<TreeClass>>>,
    _scalar: PhantomData<S>,
}

impl<'a, S: Scalar, X: Vector<S>, H: Vector<S>> Transfer<'a, S, X, H> {
    /// `binary` is `μ²`; `degree_h` gives degrees of homogeneous elements
    /// of `H` (zero may report `None`).
    pub fn new(
        contraction: ContractionData<'a, X, H>,
        binary: impl Fn(&X, &X) -> X + Send + Sync + 'a,
        degree_h: impl Fn(&H) -> Option<i64> + Send + Sync + 'a,
        zero_x: X,
        zero_h: H,
    ) -> Self {
        Transfer {
            contraction,
            perturbation: None,
            binary: Box::new(binary),
            degree_h: Box::new(degree_h),
            zero_x,
            zero_h,
            nu_bound: Box::new(|_| usize::MAX),
            lambda_bound: Box::new(|_| usize::MAX),
            trees: Mutex::new(HashMap::new()),
            _scalar: PhantomData,
        }
    }

    /// Sets the perturbation `μ¹_Δ = D − d`.
    pub fn with_perturbation(mut self, delta: impl Fn(&X) -> X + Send + Sync + 'a) -> Self {
        self.perturbation = Some(Box::new(delta));
        self
    }

    /// Sets the cutoffs on `vertices + total decoration` for `ν` and `λ`
    /// as functions of the arity.
    pub fn with_bounds(
        mut self,
        nu: impl Fn(&usize) -> usize + Send + Sync + 'a,
        lambda: impl Fn(&usize) -> usize + Send + Sync + 'a,
    ) -> Self {
        self.nu_bound = Box::new(nu);
        self.lambda_bound = Box::new(lambda);
        self
    }

    fn classes(&self, k: usize, bound: usize) -> Result<Vec<TreeClass>> {
        let vertices = k.saturating_sub(1);
        if bound < vertices {
            return Ok(Vec::new());
        }
        let dec = if self.perturbation.is_none() {
            0
        } else {
            (bound - vertices).min(MAX_DECORATION) as u32
        };
        let mut cache = self.trees.lock().expect("tree cache poisoned");
        if let Some(found) = cache.get(&(k, dec)) {
            return Ok(found.clone());
        }
        let found = enumerate_trees(k, dec)?;
        cache.insert((k, dec), found.clone());
        Ok(found)
    }

    fn degrees(&self, args: &[H]) -> Result<Vec<i64>> {
        args.iter()
            .enumerate()
            .map(|(k, x)| {
                if x.is_zero() {
                    Ok(0)
                } else {
                    (self.degree_h)(x)
                        .ok_or_else(|| Error::Argument(format!("argument {k} is not homogeneous")))
                }
            })
            .collect()
    }

    fn minus_h(&self, x: &X) -> X {
        (self.contraction.h)(x).scale_int(-1)
    }

    /// Evaluates the subtree over `edge` on `args`, returning the value,
    /// the number of operators applied, and whether the last step was an
    /// operation (so that a `−h` must follow before the next one).
    fn eval_edge(&self, edge: &Edge, args: &[H], degs: &[i64]) -> (X, usize, bool) {
        let (mut value, mut ops, mut pending) = match &edge.node {
            Node::Leaf => ((self.contraction.i)(&args[0]), 0, false),
            Node::Vertex(l, r) => {
                let nl = l.leaves();
                let (mut vl, mut ol, pl) = self.eval_edge(l, &args[..nl], &degs[..nl]);
                let (mut vr, mut or, pr) = self.eval_edge(r, &args[nl..], &degs[nl..]);
                if pl {
                    vl = self.minus_h(&vl);
                    ol += 1;
                }
                if pr {
                    vr = self.minus_h(&vr);
                    or += 1;
                }
                let left_degree: i64 = degs[..nl].iter().sum();
                let v = (self.binary)(&vl, &vr);
                let v = if parity_sign(or as i64 * left_degree) < 0 {
                    v.scale_int(-1)
                } else {
                    v
                };
                (v, ol + or + 1, true)
            }
        };
        for _ in 0..edge.decoration {
            let delta = self
                .perturbation
                .as_ref()
                .expect("decorated trees only arise with a perturbation");
            if pending {
                value = self.minus_h(&value);
                ops += 1;
            }
            value = delta(&value);
            ops += 1;
            pending = true;
        }
        (value, ops, pending)
    }

    fn eval_tree(&self, tree: &DecoratedTree, args: &[H], root: RootMap) -> Result<X> {
        if args.len() != tree.leaves() {
            return Err(Error::Argument(format!(
                "tree with {} leaves applied to {} arguments",
                tree.leaves(),
                args.len()
            )));
        }
        let degs = self.degrees(args)?;
        let (value, _, pending) = self.eval_edge(&tree.root, args, &degs);
        Ok(match root {
            RootMap::Projection => value,
            RootMap::Homotopy if pending => self.minus_h(&value),
            RootMap::Homotopy => self.zero_x.clone(),
        })
    }

    /// `m_T(args)` with `p` at the root.
    pub fn eval_tree_nu(&self, tree: &DecoratedTree, args: &[H]) -> Result<H> {
        let value = self.eval_tree(tree, args, RootMap::Projection)?;
        Ok((self.contraction.p)(&value))
    }

    /// `n_T(args)` with `−h` at the root.
    pub fn eval_tree_lambda(&self, tree: &DecoratedTree, args: &[H]) -> Result<X> {
        self.eval_tree(tree, args, RootMap::Homotopy)
    }

    /// `Σ_σ ε(σ) f(x_σ)` over all permutations.
    fn symmetrize<V: Vector<S>>(
        &self,
        zero: &V,
        args: &[H],
        f: impl Fn(&[H]) -> Result<V>,
    ) -> Result<V> {
        let degs = self.degrees(args)?;
        let mut acc = zero.clone();
        for sigma in permutations(args.len()) {
            let sign = koszul_sign(&sigma, &degs)?;
            let permuted: Vec<H> = sigma.iter().map(|&k| args[k].clone()).collect();
            let value = f(&permuted)?;
            acc = acc.add(&value.scale_int(sign as i64));
        }
        Ok(acc)
    }

    /// The symmetrized sum over one tree class, weighted by `1/|Aut|`.
    pub fn nu_tree_term(&self, class: &TreeClass, args: &[H]) -> Result<H> {
        let sum = self.symmetrize(&self.zero_h, args, |xs| self.eval_tree_nu(&class.tree, xs))?;
        Ok(sum.scale(&(S::one() / S::int(class.automorphisms as i64))))
    }

    /// The induced operation `νᵏ(args)`, `k = args.len()`.
    pub fn nu(&self, args: &[H]) -> Result<H> {
        let mut acc = self.zero_h.clone();
        for class in self.classes(args.len(), (self.nu_bound)(&args.len()))? {
            acc = acc.add(&self.nu_tree_term(&class, args)?);
        }
        Ok(acc)
    }

    /// The morphism component `λᵏ(args)`; `λ¹` includes `i`.
    pub fn lambda(&self, args: &[H]) -> Result<X> {
        let mut acc = if args.len() == 1 {
            (self.contraction.i)(&args[0])
        } else {
            self.zero_x.clone()
        };
        for class in self.classes(args.len(), (self.lambda_bound)(&args.len()))? {
            let sum = self.symmetrize(&self.zero_x, args, |xs| {
                self.eval_tree_lambda(&class.tree, xs)
            })?;
            acc = acc.add(&sum.scale(&(S::one() / S::int(class.automorphisms as i64))));
        }
        Ok(acc)
    }

    /// `λ(μ) = Σ_k λᵏ(μ,…,μ)/k!` for a degree-zero `μ`, up to arity
    /// `max_arity`. With all inputs equal and even, the symmetrization
    /// collapses to `Σ_T n_T(μ,…,μ)/|Aut(T)|`.
    pub fn lambda_of_mc(&self, mu: &H, max_arity: usize) -> Result<X> {
        if !mu.is_zero() && (self.degree_h)(mu) != Some(0) {
            return Err(Error::Argument("MC input must have degree 0".into()));
        }
        let mut acc = (self.contraction.i)(mu);
        for k in 1..=max_arity {
            let args = vec![mu.clone(); k];
            for class in self.classes(k, (self.lambda_bound)(&k))? {
                let value = self.eval_tree_lambda(&class.tree, &args)?;
                acc = acc.add(&value.scale(&(S::one() / S::int(class.automorphisms as i64))));
            }
        }
        Ok(acc)
    }

    /// `Σ_k (−h D_R)ᵏ i(x)`, the perturbed injection `ĩ(x)`.
    pub fn perturbed_injection(&self, x: &H) -> Result<X> {
        let start = (self.contraction.i)(x);
        let Some(delta) = &self.perturbation else {
            return Ok(start);
        };
        let mut term = start.clone();
        let mut acc = start;
        for _ in 0..MAX_PERTURBATION_STEPS {
            term = self.minus_h(&delta(&term));
            if term.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&term);
        }
        Err(Error::precondition(
            "perturbation does not raise a finite filtration",
            None,
        ))
    }

    /// The induced differential `𝒟(x) = p D_R ĩ(x)`.
    pub fn induced_differential(&self, x: &H) -> Result<H> {
        let Some(delta) = &self.perturbation else {
            return Ok(self.zero_h.clone());
        };
        Ok((self.contraction.p)(&delta(&self.perturbed_injection(x)?)))
    }
}

/// Decorations beyond this would never be enumerated in practice; it only
/// guards the unbounded default.
const MAX_DECORATION: usize = 16;

/// Iteration cap for geometric series in a perturbation; filtrations in
/// this crate are far shorter.
const MAX_PERTURBATION_STEPS: usize = 64;

/// Contraction data between finite-dimensional spaces, as matrices acting
/// on column vectors.
#[derive(Clone, Debug)]
pub struct MatrixContraction<S: Scalar> {
    pub d: Matrix<S>,
    pub h: Matrix<S>,
    pub i: Matrix<S>,
    pub p: Matrix<S>,
}

impl<S: Scalar> MatrixContraction<S> {
    /// Checks `p i = id`, `d i = 0`, `p d = 0`, `dh + hd = id − ip`,
    /// `h² = 0`, `h i = 0` and `p h = 0`; returns the first failure.
    pub fn check(&self) -> Option<&'static str> {
        let n = self.d.rows();
        let m = self.i.cols();
        let zero = |a: &Matrix<S>| a.is_zero();
        if self.p.mul(&self.i) != Matrix::identity(m) {
            return Some("p i = id");
        }
        if !zero(&self.d.mul(&self.i)) {
            return Some("d i = 0");
        }
        if !zero(&self.p.mul(&self.d)) {
            return Some("p d = 0");
        }
        let lhs = self.d.mul(&self.h).add(&self.h.mul(&self.d));
        if lhs != Matrix::identity(n).sub(&self.i.mul(&self.p)) {
            return Some("dh + hd = id - ip");
        }
        if !zero(&self.h.mul(&self.h)) {
            return Some("h h = 0");
        }
        if !zero(&self.h.mul(&self.i)) {
            return Some("h i = 0");
        }
        if !zero(&self.p.mul(&self.h)) {
            return Some("p h = 0");
        }
        None
    }
}

/// The transferred complex: `(𝒟, ĩ)` with
/// `𝒟 = p D_R Σ(−h D_R)ᵏ i` and `ĩ = Σ(−h D_R)ᵏ i`.
pub fn transfer_complex<S: Scalar>(
    c: &MatrixContraction<S>,
    d_r: &Matrix<S>,
) -> Result<(Matrix<S>, Matrix<S>)> {
    let total = c.d.add(d_r);
    let square = total.mul(&total);
    if !square.is_zero() {
        return Err(Error::precondition(
            "perturbed differential does not square to zero",
            Some(format!("{square:?}")),
        ));
    }
    let step = c.h.mul(d_r).scale(&S::int(-1));
    let mut term = c.i.clone();
    let mut injection = c.i.clone();
    for _ in 0..=c.d.rows() {
        term = step.mul(&term);
        if term.is_zero() {
            let differential = c.p.mul(&d_r.mul(&injection));
            return Ok((differential, injection));
        }
        injection = injection.add(&term);
    }
    Err(Error::precondition(
        "perturbation is not nilpotent against the homotopy",
        None,
    ))
}

/// A seeded random filtered complex with contraction data and a
/// square-zero perturbation that strictly raises the filtration.
///
/// The space is `H ⊕ C ⊕ C'` with `d: C → C'` the identity and `h` its
/// inverse; the perturbed differential is `A d A⁻¹` for a random unipotent
/// `A` raising the filtration, so `D_R = A d A⁻¹ − d` raises it too.
pub fn random_filtered_complex<S: Scalar>(
    rng: &mut crate::random::TestRng,
    dim: usize,
    filtration_length: usize,
) -> Result<(MatrixContraction<S>, Matrix<S>)> {
    use rand::Rng;
    if dim < 3 || filtration_length == 0 {
        return Err(Error::Argument(
            "need dimension at least 3 and a nonempty filtration".into(),
        ));
    }
    let pairs = rng.gen_range(1..=(dim - 1) / 2);
    let h_dim = dim - 2 * pairs;
    // basis order: H, then C, then C'; C_k and C'_k share a level
    let mut level = vec![0usize; dim];
    for l in level.iter_mut().take(h_dim) {
        *l = rng.gen_range(0..filtration_length);
    }
    for k in 0..pairs {
        let l = rng.gen_range(0..filtration_length);
        level[h_dim + k] = l;
        level[h_dim + pairs + k] = l;
    }
    let mut d = Matrix::zeros(dim, dim);
    let mut h = Matrix::zeros(dim, dim);
    for k in 0..pairs {
        d[(h_dim + pairs + k, h_dim + k)] = S::one();
        h[(h_dim + k, h_dim + pairs + k)] = S::one();
    }
    let mut i = Matrix::zeros(dim, h_dim);
    let mut p = Matrix::zeros(h_dim, dim);
    for k in 0..h_dim {
        i[(k, k)] = S::one();
        p[(k, k)] = S::one();
    }
    let mut a = Matrix::identity(dim);
    for r in 0..dim {
        for c in 0..dim {
            if level[r] > level[c] && rng.gen_bool(0.6) {
                a[(r, c)] = S::int(rng.gen_range(-2..=2));
            }
        }
    }
    let total = a.mul(&d).mul(&a.inverse()?);
    let d_r = total.sub(&d);
    Ok((MatrixContraction { d, h, i, p }, d_r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::DenseVector;
    use crate::random;
    use crate::Rational;
    use std::collections::BTreeMap;

    #[test]
    fn one_leaf_trees_are_positively_decorated() {
        let trees = enumerate_trees(1, 3).unwrap();
        let decs: Vec<u32> = trees.iter().map(|t| t.tree.total_decoration()).collect();
        assert_eq!(decs, vec![1, 2, 3]);
        assert!(trees.iter().all(|t| t.automorphisms == 1));
        assert!(DecoratedTree::new(Edge::leaf(0)).is_err());
        assert!(enumerate_trees(0, 1).is_err());
    }

    #[test]
    fn two_leaf_corolla() {
        let trees = enumerate_trees(2, 0).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].automorphisms, 2);
        assert_eq!(trees[0].tree.canonical(), "0(0L,0L)");
    }

    #[test]
    fn asymmetric_decoration_has_trivial_automorphisms() {
        let t = DecoratedTree::new(Edge::vertex(0, Edge::leaf(0), Edge::leaf(1))).unwrap();
        assert_eq!(t.automorphisms(), 1);
        let t = DecoratedTree::new(Edge::vertex(
            0,
            Edge::vertex(0, Edge::leaf(0), Edge::leaf(0)),
            Edge::vertex(0, Edge::leaf(0), Edge::leaf(0)),
        ))
        .unwrap();
        assert_eq!(t.automorphisms(), 8);
    }

    #[test]
    fn canonical_form_ignores_orientation() {
        let a = DecoratedTree::new(Edge::vertex(
            1,
            Edge::vertex(0, Edge::leaf(2), Edge::leaf(0)),
            Edge::leaf(0),
        ))
        .unwrap();
        let b = DecoratedTree::new(Edge::vertex(
            1,
            Edge::leaf(0),
            Edge::vertex(0, Edge::leaf(0), Edge::leaf(2)),
        ))
        .unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.to_string(), "1(0(0L,2L),0L)");
    }

    #[test]
    fn matches_orbit_counting_oracle() {
        // |Aut| = 2^{vertices} / (number of oriented representatives)
        for n in 1..=4 {
            for bound in 0..=2 {
                let mut orbits: BTreeMap<String, u64> = BTreeMap::new();
                for t in oriented_trees(n, bound).unwrap() {
                    *orbits.entry(t.canonical()).or_default() += 1;
                }
                let classes = enumerate_trees(n, bound).unwrap();
                assert_eq!(classes.len(), orbits.len());
                for c in classes {
                    let reps = orbits[&c.tree.canonical()];
                    assert_eq!(c.automorphisms * reps, 1 << (n - 1), "{}", c.tree);
                }
            }
        }
    }

    type V = DenseVector<Rational>;

    fn trivial_transfer<'a>() -> Transfer<'a, Rational, V, V> {
        // X = H = Q², d = h = 0, i = p = id, μ² = coordinatewise product
        let c = ContractionData::new(
            |x: &V| x.scale_int(0),
            |x: &V| x.scale_int(0),
            |x: &V| x.clone(),
            |x: &V| x.clone(),
        );
        Transfer::new(
            c,
            |a: &V, b: &V| DenseVector(a.0.iter().zip(&b.0).map(|(x, y)| x * y).collect()),
            |_| Some(0),
            DenseVector::zeros(2),
            DenseVector::zeros(2),
        )
    }

    #[test]
    fn homotopy_free_transfer_keeps_only_the_corolla() {
        let t = trivial_transfer();
        let x = DenseVector(vec![Rational::int(2), Rational::int(3)]);
        let y = DenseVector(vec![Rational::int(5), Rational::int(-1)]);
        assert!(t.nu(std::slice::from_ref(&x)).unwrap().is_zero());
        // symmetrized over two orders, halved by |Aut| = 2
        assert_eq!(
            t.nu(&[x.clone(), y.clone()]).unwrap(),
            DenseVector(vec![Rational::int(10), Rational::int(-3)])
        );
        assert!(t.nu(&[x.clone(), y.clone(), x.clone()]).unwrap().is_zero());
        assert_eq!(t.lambda(std::slice::from_ref(&x)).unwrap(), x);
        assert!(t.lambda(&[x, y]).unwrap().is_zero());
    }

    #[test]
    fn random_complexes_satisfy_the_transfer_claims() {
        let mut rng = random::rng(11);
        for _ in 0..20 {
            let (c, d_r) = random_filtered_complex::<Rational>(&mut rng, 8, 3).unwrap();
            assert_eq!(c.check(), None);
            let (dd, inj) = transfer_complex(&c, &d_r).unwrap();
            assert!(dd.mul(&dd).is_zero());
            let total = c.d.add(&d_r);
            assert_eq!(total.mul(&inj), inj.mul(&dd));
        }
    }

    #[test]
    fn zero_perturbation_transfers_trivially() {
        let mut rng = random::rng(2);
        let (c, _) = random_filtered_complex::<Rational>(&mut rng, 6, 2).unwrap();
        let zero = Matrix::zeros(6, 6);
        let (dd, inj) = transfer_complex(&c, &zero).unwrap();
        assert!(dd.is_zero());
        assert_eq!(inj, c.i);
    }

    #[test]
    fn non_square_zero_perturbation_is_rejected() {
        let mut rng = random::rng(3);
        let (c, _) = random_filtered_complex::<Rational>(&mut rng, 6, 2).unwrap();
        let bad = Matrix::identity(6);
        assert!(matches!(
            transfer_complex(&c, &bad),
            Err(Error::Precondition { .. })
        ));
    }
}
