//! The invariant suite behind `bfv verify`.

use rand::Rng;

use bfv_core::bfv::{
    build_charge, coisotropy_defects, extend_section_to_mc, formal_mc_residual, is_normalized,
    mc_residual_bfv, normalize_formal_mc, random_formal_perturbation, BfvComplex, SectionOutcome,
};
use bfv_core::graded::parity_sign;
use bfv_core::linfty::{jacobiator, morphism_defect, FnLInfty, FnMorphism};
use bfv_core::oddsymplectic::Bidegree;
use bfv_core::random::{self, TestRng};
use bfv_core::scalar::Scalar;
use bfv_core::voronov::{shla_brackets, shla_valgebra, VAlgebra};
use bfv_core::{Poly, Rational, Result};

use crate::commands::Setup;
use crate::report::Report;

pub struct Options {
    pub seed: u64,
    pub trials: usize,
    pub order: Option<usize>,
    /// Flips the sign of the Schouten bracket `[a,b]` whenever `a` has odd
    /// shifted degree, to exercise the suite against a broken sign table.
    pub break_sign: bool,
}

/// `None` when the identity holds, otherwise a description of the failure.
type Outcome = Result<Option<String>>;

fn shifted(a: &Poly) -> i64 {
    a.degree().expect("homogeneous") - 1
}

fn failure(what: impl Into<String>) -> Outcome {
    Ok(Some(what.into()))
}

/// A homogeneous random polynomial in `gens`.
fn draw(rng: &mut TestRng, setup: &Setup, gens: &[usize], factors: usize, terms: usize) -> Poly {
    loop {
        if let Some(a) = random::homogeneous(rng, setup.phase().table(), gens, factors, terms, None)
        {
            return a;
        }
    }
}

fn function_generators(setup: &Setup) -> Vec<usize> {
    let ph = setup.phase();
    (0..ph.s)
        .map(|i| ph.x(i))
        .chain((0..ph.e).flat_map(|j| [ph.y(j), ph.c(j), ph.b(j)]))
        .collect()
}

struct Suite<'a> {
    setup: &'a Setup,
    complex: Option<BfvComplex<Rational>>,
    options: &'a Options,
    rng: TestRng,
}

impl<'a> Suite<'a> {
    fn sn(&self, a: &Poly, b: &Poly) -> Poly {
        let value = self.setup.phase().bracket(a, b).expect("same table");
        if self.options.break_sign && shifted(a) % 2 != 0 {
            value.signed(-1)
        } else {
            value
        }
    }

    fn complex(&self) -> &BfvComplex<Rational> {
        self.complex.as_ref().expect("charge built before use")
    }

    fn poisson(&mut self) -> Outcome {
        let pi = self.setup.pi();
        let square = self.sn(pi, pi);
        if square.is_zero() {
            Ok(None)
        } else {
            failure(format!("[Pi,Pi] = {square}"))
        }
    }

    fn coisotropic(&mut self) -> Outcome {
        let defects = coisotropy_defects(self.setup.phase(), self.setup.pi())?;
        match defects.first() {
            None => Ok(None),
            Some((i, j, v)) => failure(format!("{{y{},y{}}}|S = {v}", i + 1, j + 1)),
        }
    }

    fn lift(&mut self) -> Outcome {
        let s = self.setup;
        let hat = s.pi_hat();
        let square = self.sn(hat, hat);
        if !square.is_zero() {
            return failure(format!("[Pi_hat,Pi_hat] = {square}"));
        }
        let rest = &(hat - s.lift().g()) - s.lifted_pi();
        if s.phase().bidegree_component(&rest, Bidegree::new(1, 1)) != rest {
            return failure(format!("remainder {rest} is not in V^(1,1)"));
        }
        if s.lift().connection().is_zero() && !rest.is_zero() {
            return failure(format!("flat connection but remainder {rest}"));
        }
        Ok(None)
    }

    fn charge(&mut self) -> Outcome {
        let charge = build_charge(self.setup)?;
        let complex = BfvComplex::new(self.setup.clone(), charge);
        complex.verify_charge()?;
        self.complex = Some(complex);
        Ok(None)
    }

    fn zero_section(&mut self) -> Outcome {
        let s = self.setup;
        let charge = self.complex().charge();
        let zero = vec![s.zero(); s.phase().e];
        match extend_section_to_mc(s, charge, &zero)? {
            SectionOutcome::Extension { beta } => {
                let residual = mc_residual_bfv(s, charge, &beta);
                if !residual.is_zero() {
                    failure(format!("residual {residual}"))
                } else if !is_normalized(s, &beta) {
                    failure("extension is not normalized")
                } else {
                    Ok(None)
                }
            }
            SectionOutcome::Obstruction { obstruction } => {
                failure(format!("obstruction {obstruction}"))
            }
        }
    }

    fn sn_identities(&mut self, which: &str) -> Outcome {
        let all: Vec<usize> = (0..self.setup.phase().table().len()).collect();
        for _ in 0..self.options.trials {
            let a = draw(&mut self.rng, self.setup, &all, 4, 2);
            let b = draw(&mut self.rng, self.setup, &all, 4, 2);
            let c = draw(&mut self.rng, self.setup, &all, 4, 2);
            let (da, db) = (shifted(&a), shifted(&b));
            let (lhs, rhs) = match which {
                "skew" => (
                    self.sn(&a, &b),
                    self.sn(&b, &a).signed(-parity_sign(da * db)),
                ),
                "jacobi" => (
                    self.sn(&a, &self.sn(&b, &c)),
                    &self.sn(&self.sn(&a, &b), &c)
                        + &self.sn(&b, &self.sn(&a, &c)).signed(parity_sign(da * db)),
                ),
                _ => (
                    self.sn(&a, &(&b * &c)),
                    &(&self.sn(&a, &b) * &c)
                        + &(&b * &self.sn(&a, &c))
                            .signed(parity_sign(da * b.degree().expect("homogeneous"))),
                ),
            };
            if lhs != rhs {
                return failure(format!("a = {a}, b = {b}, c = {c}"));
            }
        }
        Ok(None)
    }

    fn bfv_bracket(&mut self) -> Outcome {
        let s = self.setup;
        let gens = function_generators(s);
        for _ in 0..self.options.trials {
            let f = draw(&mut self.rng, s, &gens, 3, 2);
            let g = draw(&mut self.rng, s, &gens, 3, 2);
            let h = draw(&mut self.rng, s, &gens, 3, 2);
            let sign = parity_sign(f.degree().unwrap() * g.degree().unwrap());
            if s.bfv_bracket(&f, &g) != s.bfv_bracket(&g, &f).signed(-sign) {
                return failure(format!("skew symmetry on f = {f}, g = {g}"));
            }
            let lhs = s.bfv_bracket(&f, &s.bfv_bracket(&g, &h));
            let rhs = &s.bfv_bracket(&s.bfv_bracket(&f, &g), &h)
                + &s.bfv_bracket(&g, &s.bfv_bracket(&f, &h)).signed(sign);
            if lhs != rhs {
                return failure(format!("Jacobi on f = {f}, g = {g}, h = {h}"));
            }
        }
        Ok(None)
    }

    fn delta_contraction(&mut self) -> Outcome {
        let s = self.setup;
        let ph = s.phase();
        let gens: Vec<usize> = (0..ph.s)
            .map(|i| ph.x(i))
            .chain((0..ph.e).flat_map(|j| [ph.y(j), ph.y(j), ph.c(j), ph.b(j)]))
            .collect();
        for _ in 0..self.options.trials {
            let m = random::monomial(&mut self.rng, ph.table(), &gens, 6);
            let f = Poly::monomial(ph.table(), m, random::coefficient(&mut self.rng));
            let pf = s.p_star(&s.i_star(&f))?;
            let homotopy = &s.delta(&s.homotopy_h(&f)) + &s.homotopy_h(&s.delta(&f));
            let holds = s.delta(&s.delta(&f)).is_zero()
                && s.homotopy_h(&s.homotopy_h(&f)).is_zero()
                && s.i_star(&s.homotopy_h(&f)).is_zero()
                && s.i_star(&s.delta(&f)).is_zero()
                && s.homotopy_h(&pf).is_zero()
                && s.delta(&pf).is_zero()
                && homotopy == &f - &pf;
            if !holds {
                return failure(format!("on {f}"));
            }
        }
        Ok(None)
    }

    fn lift_contraction(&mut self) -> Outcome {
        let lift = self.setup.lift();
        let ph = self.setup.phase();
        let all: Vec<usize> = (0..ph.table().len()).collect();
        for _ in 0..self.options.trials {
            let m = random::monomial(&mut self.rng, ph.table(), &all, 5);
            let a = Poly::monomial(ph.table(), m, random::coefficient(&mut self.rng));
            let base = lift.pr(&a);
            let lifted = lift.iota(&base)?;
            let homotopy = &lift.q(&lift.h(&a)) + &lift.h(&lift.q(&a));
            let holds = lift.pr(&lifted) == base
                && homotopy == &a - &lifted
                && lift.h(&lift.h(&a)).is_zero()
                && lift.h(&lifted).is_zero()
                && lift.pr(&lift.h(&a)).is_zero()
                && lift.pr(&lift.q(&a)).is_zero()
                && lift.q(&lifted).is_zero();
            if !holds {
                return failure(format!("on {a}"));
            }
        }
        Ok(None)
    }

    /// Jacobiators of the derived brackets of `p` against the derived
    /// brackets of `½[p,p]`, on random tuples of arity up to 3.
    fn derived(&mut self, v: &VAlgebra, p: &Poly, gens: &[usize]) -> Outcome {
        let half = self.sn(p, p).scale(&Rational::ratio(1, 2));
        let structure = v.derived_structure(p, 8)?;
        for _ in 0..self.options.trials {
            for n in 1..=3 {
                let args: Vec<Poly> = (0..n)
                    .map(|_| draw(&mut self.rng, self.setup, gens, 2, 2))
                    .collect();
                let j = jacobiator(&structure, &args)?;
                let expected = v.derived_bracket_unchecked(&half, &args);
                if j != expected {
                    let listed: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                    return failure(format!("arity {n} on ({})", listed.join(", ")));
                }
            }
        }
        Ok(None)
    }

    fn derived_shla(&mut self) -> Outcome {
        let ph = self.setup.phase();
        let v = shla_valgebra(ph)?;
        let gens: Vec<usize> = (0..ph.s)
            .map(|i| ph.x(i))
            .chain((0..ph.e).map(|j| ph.py(j)))
            .collect();
        let pi = self.setup.pi().clone();
        self.derived(&v, &pi, &gens)
    }

    fn derived_bfv(&mut self) -> Outcome {
        let ph = self.setup.phase();
        let gens = function_generators(self.setup);
        let v = VAlgebra::new(ph.phase(), &gens)?;
        let hat = self.setup.pi_hat();
        let xi = ph.bracket(hat, self.complex().charge().total())?;
        let p = hat + &xi;
        self.derived(&v, &p, &gens)
    }

    fn random_tuple(&mut self, gens: &[Poly], n: usize) -> Vec<Poly> {
        (0..n)
            .map(|_| gens[self.rng.gen_range(0..gens.len())].clone())
            .collect()
    }

    fn transfer(&mut self) -> Outcome {
        let s = self.setup;
        let complex = self.complex.take().expect("charge built before use");
        let outcome = (|| {
            let transfer = complex.transfer();
            let gens = s.exterior_generators();
            for g in &gens {
                let nu = transfer.nu(std::slice::from_ref(g))?;
                if nu != s.delta1(g)? {
                    return failure(format!("nu1({g}) = {nu} differs from delta1"));
                }
            }
            for _ in 0..self.options.trials {
                for n in 1..=3 {
                    let args = self.random_tuple(&gens, n);
                    let nu = transfer.nu(&args)?;
                    let mu = shla_brackets(s.phase(), s.pi(), &args)?;
                    if nu != mu {
                        return failure(format!("nu{n} = {nu} but mu{n} = {mu}"));
                    }
                }
            }
            Ok(None)
        })();
        self.complex = Some(complex);
        outcome
    }

    fn lambda(&mut self) -> Outcome {
        let s = self.setup;
        let complex = self.complex.take().expect("charge built before use");
        let outcome = (|| {
            let transfer = complex.transfer();
            let src = FnLInfty::new(
                s.zero(),
                |x: &Poly| x.degree().map(|d| d - 1),
                |n, args: &[Poly]| {
                    if n == 0 {
                        s.zero()
                    } else {
                        transfer.nu(args).expect("homogeneous generators")
                    }
                },
            );
            let dst = complex.algebra();
            let lambda = FnMorphism::new(|_, args: &[Poly]| {
                transfer.lambda(args).expect("homogeneous generators")
            });
            let gens = s.exterior_generators();
            for _ in 0..self.options.trials {
                for n in 1..=3 {
                    let args = self.random_tuple(&gens, n);
                    let defect = morphism_defect(&lambda, &src, &dst, 2, &args)?;
                    if !defect.is_zero() {
                        return failure(format!("arity {n}: defect {defect}"));
                    }
                }
            }
            Ok(None)
        })();
        self.complex = Some(complex);
        outcome
    }

    fn formal(&mut self) -> Outcome {
        let s = self.setup;
        let order = self.options.order.or(s.formal_order()).unwrap_or(3);
        let charge = self.complex().charge().clone();
        for _ in 0..self.options.trials.min(3) {
            let beta = random_formal_perturbation(s, &charge, &mut self.rng, order)?;
            let out = normalize_formal_mc(s, &charge, &beta)?;
            if !formal_mc_residual(s, &charge, &out.normalized).is_zero() {
                return failure("normalized element is not MC");
            }
            if let Some(l) = (0..=order).find(|&l| !is_normalized(s, out.normalized.coefficient(l)))
            {
                return failure(format!("order {l} is not normalized"));
            }
        }
        Ok(None)
    }
}

/// A named check and whether it needs the charge built by `charge`.
type Step<'a> = (&'static str, bool, fn(&mut Suite<'a>) -> Outcome);

fn structural<'a>() -> Vec<Step<'a>> {
    vec![
        ("poisson", false, Suite::poisson),
        ("coisotropic", false, Suite::coisotropic),
        ("rothstein lift", false, Suite::lift),
        ("charge", false, Suite::charge),
        ("zero section extends", true, Suite::zero_section),
    ]
}

fn randomized<'a>() -> Vec<Step<'a>> {
    vec![
        ("schouten skew symmetry", false, |s| s.sn_identities("skew")),
        ("schouten jacobi", false, |s| s.sn_identities("jacobi")),
        ("schouten leibniz", false, |s| s.sn_identities("leibniz")),
        ("bfv bracket", false, Suite::bfv_bracket),
        ("delta contraction", false, Suite::delta_contraction),
        ("lift contraction", false, Suite::lift_contraction),
        ("derived brackets of Pi", false, Suite::derived_shla),
        (
            "derived brackets of Pi_hat + [Pi_hat,Omega]",
            true,
            Suite::derived_bfv,
        ),
        ("transfer reproduces mu", true, Suite::transfer),
        ("lambda is a morphism", true, Suite::lambda),
        ("formal normalization", true, Suite::formal),
    ]
}

pub fn verify(setup: &Setup, options: &Options) -> Report {
    let mut report = Report::new("verify");
    report.push("seed", options.seed);
    report.push("trials", options.trials);
    let mut suite = Suite {
        setup,
        complex: None,
        options,
        rng: random::rng(options.seed),
    };
    let mut steps = structural();
    if options.trials > 0 {
        steps.extend(randomized());
    }
    let mut first_failure = None;
    for (name, needs_charge, step) in steps {
        let outcome = if needs_charge && suite.complex.is_none() {
            Ok(Some("skipped: no charge".to_string()))
        } else {
            step(&mut suite)
        };
        let line = match outcome {
            Ok(None) => "pass".to_string(),
            Ok(Some(detail)) => format!("FAIL {detail}"),
            Err(e) => format!("FAIL {e}"),
        };
        if line != "pass" && first_failure.is_none() {
            first_failure = Some(name);
        }
        report.push(format!("check {name}"), line);
    }
    match first_failure {
        None => report.push("verdict", "pass"),
        Some(name) => {
            report.push("verdict", "fail");
            report.push("first failure", name);
            report.fail();
        }
    }
    report
}
