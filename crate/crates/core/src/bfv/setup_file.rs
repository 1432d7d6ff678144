//! Setup files.
//!
//! ```toml
//! base_dim = 2
//! fiber_dim = 2
//! jet_order_eps = 3          # optional
//!
//! [poisson.y1]
//! y2 = "y1"                  # {y1, y2} = y1
//!
//! [connection.1.2]
//! 1 = "x2"                   # Γ_{1,2}^1 = x2
//! ```
//!
//! `poisson.<a>.<b>` is the coefficient `Π^{ab} = {z_a, z_b}`; `a` and `b`
//! are generator names or 1-based positions in `x_1..x_s, y_1..y_e`.
//! `connection.<α>.<r>.<s>` is `Γ_{αr}^s`, with `α` a base index and `r`,
//! `s` fiber indices, again as names or 1-based positions.

use std::collections::BTreeMap;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::oddsymplectic::{BfvPhase, Connection};
use crate::scalar::Scalar;
use crate::superpoly::SuperPoly;

use super::{bivector_from_coefficients, BfvSetup};

type Entries<T> = BTreeMap<Spanned<String>, T>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    base_dim: usize,
    fiber_dim: usize,
    #[serde(default)]
    poisson: Entries<Entries<Spanned<String>>>,
    #[serde(default)]
    connection: Entries<Entries<Entries<Spanned<String>>>>,
    jet_order_eps: Option<usize>,
}

/// Line and column (both 1-based) of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(text, offset);
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Resolves a key to a generator index among `candidates`, either by name
/// or by 1-based position.
fn resolve(
    text: &str,
    key: &Spanned<String>,
    phase: &BfvPhase,
    candidates: &[usize],
    what: &str,
) -> Result<usize> {
    let name = key.get_ref();
    let found = match name.parse::<usize>() {
        Ok(k) if (1..=candidates.len()).contains(&k) => Some(candidates[k - 1]),
        Ok(_) => None,
        Err(_) => phase
            .table()
            .index_of(name)
            .filter(|g| candidates.contains(g)),
    };
    found.ok_or_else(|| parse_error(text, key.span().start, format!("unknown {what} '{name}'")))
}

fn polynomial<S: Scalar>(
    text: &str,
    phase: &BfvPhase,
    value: &Spanned<String>,
) -> Result<SuperPoly<S>> {
    let (line, column) = position(text, value.span().start);
    // the span starts at the opening quote
    phase
        .parse(value.get_ref())
        .map_err(|e| e.offset_parse(line, column + 1))
}

/// The unvalidated contents of a setup file.
#[derive(Clone, Debug)]
pub struct SetupSpec<S: Scalar> {
    pub phase: BfvPhase,
    /// `Σ_{a<b} Π^{ab} p_a p_b`.
    pub pi: SuperPoly<S>,
    pub connection: Connection<S>,
    pub formal_order: Option<usize>,
}

impl<S: Scalar> SetupSpec<S> {
    /// Parses a setup file without checking the Poisson and coisotropy
    /// conditions.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSetup = toml::from_str(text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            parse_error(text, offset, e.message().trim().to_string())
        })?;
        let phase = BfvPhase::new(raw.base_dim, raw.fiber_dim)?;
        let coords = phase.coordinates();
        let mut coefficients = BTreeMap::new();
        for (a, row) in &raw.poisson {
            let ia = resolve(text, a, &phase, &coords, "coordinate")?;
            for (b, value) in row {
                let ib = resolve(text, b, &phase, &coords, "coordinate")?;
                let poly = polynomial::<S>(text, &phase, value)?;
                if coefficients.insert((ia, ib), poly).is_some() {
                    return Err(parse_error(
                        text,
                        b.span().start,
                        "duplicate Poisson coefficient",
                    ));
                }
            }
        }
        let pi = bivector_from_coefficients(&phase, &coefficients)?;
        let base: Vec<usize> = (0..phase.s).map(|i| phase.x(i)).collect();
        let fiber: Vec<usize> = (0..phase.e).map(|j| phase.y(j)).collect();
        let mut connection = Connection::zero(&phase);
        for (alpha, by_r) in &raw.connection {
            let alpha_index = resolve(text, alpha, &phase, &base, "base index")?;
            for (r, by_s) in by_r {
                let r_index = resolve(text, r, &phase, &fiber, "fiber index")? - phase.y(0);
                for (s, value) in by_s {
                    let s_index = resolve(text, s, &phase, &fiber, "fiber index")? - phase.y(0);
                    let poly = polynomial::<S>(text, &phase, value)?;
                    connection
                        .set(&phase, alpha_index, r_index, s_index, poly)
                        .map_err(|e| match e {
                            Error::Argument(m) => parse_error(text, value.span().start, m),
                            other => other,
                        })?;
                }
            }
        }
        Ok(SetupSpec {
            phase,
            pi,
            connection,
            formal_order: raw.jet_order_eps,
        })
    }

    /// Validates the data and builds the setup.
    pub fn into_setup(self) -> Result<BfvSetup<S>> {
        let setup = BfvSetup::new(&self.phase, self.pi, self.connection)?;
        Ok(setup.with_formal_order(self.formal_order))
    }
}

impl<S: Scalar> BfvSetup<S> {
    /// Parses and validates a setup file.
    pub fn from_toml(text: &str) -> Result<Self> {
        SetupSpec::from_toml(text)?.into_setup()
    }
}
