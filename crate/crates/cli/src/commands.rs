//! The pipelines behind each subcommand.

use bfv_core::bfv::{
    apply_gauge, apply_inverse_gauge, bigrade_component, build_charge, coisotrope_generators,
    coisotropy_defects, complete_to_mc, extend_section_to_mc, gauge_between, is_normalized,
    mc_residual_bfv, BfvComplex, BfvSetup, Charge, SectionOutcome, SetupSpec,
};
use bfv_core::random;
use bfv_core::voronov::shla_brackets;
use bfv_core::{Error, Poly, Rational, Result};
use rand::Rng;

use crate::report::Report;

pub type Setup = BfvSetup<Rational>;

/// Nondecreasing index tuples of length `k` over `0..n`; the operations
/// are graded symmetric, so these cover every generator tuple up to sign.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(
        n: usize,
        k: usize,
        start: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in start..n {
            prefix.push(i);
            extend(n, k, i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

fn call(name: &str, args: &[Poly]) -> String {
    let listed: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    format!("{name}{}({})", args.len(), listed.join(", "))
}

/// Parses the `--section` polynomials, one per fiber direction, as
/// polynomials in the base coordinates.
pub fn parse_sections(setup: &Setup, sections: &[String]) -> Result<Vec<Poly>> {
    let ph = setup.phase();
    if sections.len() != ph.e {
        return Err(Error::Argument(format!(
            "expected {} --section polynomials, one per fiber direction, got {}",
            ph.e,
            sections.len()
        )));
    }
    let mu: Vec<Poly> = sections
        .iter()
        .enumerate()
        .map(|(j, text)| {
            setup.parse(text).map_err(|e| match e {
                Error::Parse {
                    column, message, ..
                } => Error::Argument(format!("section {}: column {column}: {message}", j + 1)),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    setup.pullback_section(&mu)?;
    Ok(mu)
}

pub fn check(spec: &SetupSpec<Rational>) -> Result<Report> {
    let mut report = Report::new("check");
    let ph = &spec.phase;
    let square = ph.bracket(&spec.pi, &spec.pi)?;
    if square.is_zero() {
        report.push("poisson", "pass");
    } else {
        report.push("poisson", "fail");
        report.push("[Pi,Pi]", &square);
        report.fail();
    }
    let defects = coisotropy_defects(ph, &spec.pi)?;
    if defects.is_empty() {
        report.push("coisotropic", "pass");
    } else {
        report.push("coisotropic", "fail not coisotropic");
        for (i, j, v) in defects {
            report.push(format!("{{y{},y{}}}|S", i + 1, j + 1), v);
        }
        report.fail();
    }
    Ok(report)
}

pub fn charge(setup: &Setup) -> Result<Report> {
    let mut report = Report::new("charge");
    let complex = BfvComplex::build(setup.clone())?;
    complex.verify_charge()?;
    for (k, level) in complex.charge().levels().iter().enumerate() {
        report.push(format!("Omega_{k}"), level);
    }
    let total = complex.charge().total();
    report.push("[Omega,Omega]", setup.bfv_bracket(total, total));
    Ok(report)
}

pub fn shla(setup: &Setup, max_arity: usize) -> Result<Report> {
    let mut report = Report::new("shla");
    let gens = setup.exterior_generators();
    for k in 1..=max_arity {
        for t in multisets(gens.len(), k) {
            let args: Vec<Poly> = t.iter().map(|&i| gens[i].clone()).collect();
            let value = shla_brackets(setup.phase(), setup.pi(), &args)?;
            report.push(call("mu", &args), value);
        }
    }
    Ok(report)
}

pub fn transfer(setup: &Setup, max_arity: usize) -> Result<Report> {
    let mut report = Report::new("transfer");
    let complex = BfvComplex::build(setup.clone())?;
    let transfer = complex.transfer();
    let gens = setup.exterior_generators();
    let tuples: Vec<Vec<Poly>> = (1..=max_arity)
        .flat_map(|k| multisets(gens.len(), k))
        .map(|t| t.iter().map(|&i| gens[i].clone()).collect())
        .collect();
    for args in &tuples {
        report.push(call("nu", args), transfer.nu(args)?);
    }
    for args in &tuples {
        report.push(call("lambda", args), transfer.lambda(args)?);
    }
    Ok(report)
}

fn push_section(report: &mut Report, mu: &[Poly]) {
    for (j, m) in mu.iter().enumerate() {
        report.push(format!("mu_{}", j + 1), m);
    }
}

/// Lists the components of a BFV function by bigrade.
fn push_bigrades(report: &mut Report, name: &str, setup: &Setup, f: &Poly) {
    let e = setup.phase().e;
    let mut any = false;
    for q in 0..=e {
        let part = bigrade_component(setup.phase(), f, q + 1, q);
        if !part.is_zero() {
            report.push(format!("{name}({},{q})", q + 1), part);
            any = true;
        }
    }
    if !any {
        report.push(name, 0);
    }
}

pub fn mc(setup: &Setup, mu: &[Poly], degree_bound: u32) -> Result<Report> {
    let mut report = Report::new("mc");
    push_section(&mut report, mu);
    let charge = build_charge(setup)?;
    match extend_section_to_mc(setup, &charge, mu)? {
        SectionOutcome::Obstruction { obstruction } => {
            report.push("verdict", "not coisotropic");
            report.push("obstruction", obstruction);
            report.fail();
        }
        SectionOutcome::Extension { beta } => {
            report.push("verdict", "coisotropic");
            push_bigrades(&mut report, "beta", setup, &beta);
            report.push("residual", mc_residual_bfv(setup, &charge, &beta));
            report.push(
                "normalized",
                if is_normalized(setup, &beta) {
                    "yes"
                } else {
                    "no"
                },
            );
            let coisotrope = coisotrope_generators(setup, &charge, &beta, degree_bound)?;
            for (j, h) in coisotrope.generators.iter().enumerate() {
                report.push(format!("h_{}", j + 1), h);
            }
            for cert in &coisotrope.certificates {
                let key = format!("{{h_{},h_{}}}", cert.i + 1, cert.j + 1);
                report.push(&key, &cert.bracket);
                let value = match &cert.coefficients {
                    Some(a) => {
                        let listed: Vec<String> = a.iter().map(|c| c.to_string()).collect();
                        format!("[{}]", listed.join(", "))
                    }
                    None => format!("none of degree <= {degree_bound}"),
                };
                report.push(format!("{key} coefficients"), value);
            }
        }
    }
    Ok(report)
}

fn distinct_pair(rng: &mut random::TestRng, n: usize) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    (i, j)
}

/// A second extension of `μ`: `Ω + p!μ + δ[μ]θ` completed to an MC
/// element, with `θ` random of bigrade `(2,2)`; it has the same truncation
/// as the canonical extension.
fn second_extension(
    setup: &Setup,
    charge: &Charge<Rational>,
    mu: &[Poly],
    seed: u64,
) -> Result<Poly> {
    let ph = setup.phase();
    let mut rng = random::rng(seed);
    let coords = ph.coordinates();
    let mut theta = setup.zero();
    for _ in 0..3 {
        if ph.e < 2 {
            break;
        }
        let (i, j) = distinct_pair(&mut rng, ph.e);
        let (k, l) = distinct_pair(&mut rng, ph.e);
        let ghosts = [ph.c(j), ph.b(k), ph.b(l)]
            .iter()
            .fold(ph.gen::<Rational>(ph.c(i)), |acc, &g| &acc * &ph.gen(g));
        let coefficient = random::poly::<Rational>(&mut rng, ph.table(), &coords, 2, 2);
        theta.add_assign_ref(&(&coefficient * &ghosts));
    }
    let start = &(charge.total() + &setup.pullback_section(mu)?) + &setup.delta_mu(mu, &theta);
    Ok(&complete_to_mc(setup, &start, mu)? - charge.total())
}

pub fn gauge(setup: &Setup, mu: &[Poly], seed: u64) -> Result<Report> {
    let mut report = Report::new("gauge");
    push_section(&mut report, mu);
    let charge = build_charge(setup)?;
    let alpha = match extend_section_to_mc(setup, &charge, mu)? {
        SectionOutcome::Extension { beta } => beta,
        SectionOutcome::Obstruction { obstruction } => {
            report.push("verdict", "not coisotropic");
            report.push("obstruction", obstruction);
            report.fail();
            return Ok(report);
        }
    };
    let beta = second_extension(setup, &charge, mu, seed)?;
    push_bigrades(&mut report, "alpha", setup, &alpha);
    push_bigrades(&mut report, "beta", setup, &beta);
    let generators = gauge_between(setup, &charge, &alpha, &beta)?;
    report.push("generators", generators.len());
    for (k, epsilon) in generators.iter().enumerate() {
        report.push(format!("epsilon_{}", k + 1), epsilon);
    }
    let forward = apply_gauge(setup, &charge, &generators, &alpha)? == beta;
    let inverse = apply_inverse_gauge(setup, &charge, &generators, &beta)? == alpha;
    report.push("forward", if forward { "exact" } else { "mismatch" });
    report.push("inverse", if inverse { "exact" } else { "mismatch" });
    if !(forward && inverse) {
        return Err(Error::Internal(
            "gauge transformation does not map the extensions onto each other".into(),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(3, 1).len(), 3);
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(4, 3).len(), 20);
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }
}
