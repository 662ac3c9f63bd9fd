use std::path::Path;

use num_bigint::BigUint;
use trapwalk_core::landscape::{generate_recursive, RecursionParams, RecursiveLandscape, DEFAULT_DIGIT_BUDGET};
use trapwalk_core::{rational, Landscape, Rational};

use crate::error::CliError;
use crate::Source;

pub const BUDGET_VAR: &str = "TRAPWALK_DIGIT_BUDGET";

pub fn digit_budget() -> Result<u64, CliError> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::invalid(format!("{BUDGET_VAR} must be a natural number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_DIGIT_BUDGET),
    }
}

pub fn parse_c(s: &str) -> Result<Rational, CliError> {
    Ok(rational::parse(s)?)
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_nat(s: &str, what: &str) -> Result<BigUint, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("{what} must be a natural number, got {s:?}")))
}

pub fn recursion(i1: u64, c: &str, n: usize, budget: u64) -> Result<(RecursionParams, RecursiveLandscape), CliError> {
    let params = RecursionParams::new(i1, parse_c(c)?, n);
    let generated = generate_recursive(&params, budget)?;
    Ok((params, generated))
}

impl Source {
    pub fn is_given(&self) -> bool {
        self.landscape.is_some() || self.i1.is_some() || self.c.is_some()
    }

    /// Resolves the landscape, applying `--wall` last.
    pub fn load(&self, budget: u64) -> Result<Landscape, CliError> {
        let ls = match (&self.landscape, self.i1, &self.c) {
            (Some(path), _, _) => Landscape::from_json(&read_file(path)?)?,
            (None, Some(i1), Some(c)) => {
                let n = self
                    .n
                    .ok_or_else(|| CliError::invalid("--n is required with --i1/--c"))?;
                recursion(i1, c, n, budget)?.1.landscape
            }
            _ => {
                return Err(CliError::invalid(
                    "a landscape is required: --landscape PATH or --i1 NAT --c RATIONAL --n NAT",
                ))
            }
        };
        match &self.wall {
            Some(w) => Ok(ls.with_wall(Some(parse_nat(w, "--wall")?))?),
            None => Ok(ls),
        }
    }

    pub fn load_walled(&self, budget: u64) -> Result<Landscape, CliError> {
        let ls = self.load(budget)?;
        if !ls.is_walled() {
            return Err(trapwalk_core::Error::WallRequired.into());
        }
        Ok(ls)
    }
}
