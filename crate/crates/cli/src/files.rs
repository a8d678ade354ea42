//! JSON input formats: bodies, combinations, linear maps and vectors.

use std::fs;
use std::path::Path;

use pconvex::{GeneratorSet, LinearMap, PBody, PCombination, PExponent, Sign, Term, Vector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"p": 0.5, "dim": 2, "generators": [[1, 0], [0, 1]], "name": "..."}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub p: f64,
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl BodyFile {
    pub fn from_body(body: &PBody, name: Option<String>) -> Self {
        Self {
            p: body.p().value(),
            dim: body.dim(),
            generators: body.generators().points().iter().map(|g| g.iter().copied().collect()).collect(),
            name,
        }
    }

    pub fn to_body(&self) -> Result<PBody, CliError> {
        let p = PExponent::new(self.p)?;
        let gens = GeneratorSet::from_rows(self.dim, &self.generators)?;
        Ok(PBody::new(gens, p)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub index: usize,
    /// `1` or `-1`.
    pub sign: i8,
    pub lambda: f64,
}

/// `{"terms": [{"index": 0, "sign": 1, "lambda": 0.25}, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationFile {
    pub terms: Vec<TermFile>,
}

impl CombinationFile {
    pub fn from_combination(comb: &PCombination) -> Self {
        let terms = comb
            .terms()
            .iter()
            .map(|t| TermFile { index: t.index, sign: t.sign.factor() as i8, lambda: t.lambda })
            .collect();
        Self { terms }
    }

    pub fn to_combination(&self, dim: usize) -> Result<PCombination, CliError> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let sign = match t.sign {
                    1 => Sign::Plus,
                    -1 => Sign::Minus,
                    s => return Err(CliError::validation(format!("sign must be 1 or -1, got {s}"))),
                };
                Ok(Term::new(t.index, sign, t.lambda))
            })
            .collect::<Result<_, _>>()?;
        Ok(PCombination::new(dim, terms)?)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("malformed JSON in {}: {e}", path.display())))
}

pub fn read_body(path: &Path) -> Result<PBody, CliError> {
    read_json::<BodyFile>(path)?.to_body()
}

/// A square matrix given as a list of rows.
pub fn read_map(path: &Path) -> Result<LinearMap, CliError> {
    let rows: Vec<Vec<f64>> = read_json(path)?;
    Ok(LinearMap::from_rows(&rows)?)
}

/// `"0.25,-1e-3"` → vector.
pub fn parse_vector(text: &str) -> Result<Vector, CliError> {
    let coords = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("invalid coordinate {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
        return Err(CliError::validation(format!("coordinate {bad} is not finite")));
    }
    Ok(Vector::from_vec(coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_parsing() {
        assert_eq!(parse_vector("0.25, -1").unwrap().as_slice(), &[0.25, -1.0]);
        assert!(parse_vector("1,,2").is_err());
        assert!(parse_vector("nan").is_err());
    }

    #[test]
    fn body_round_trip_is_bit_exact() {
        let rows = vec![vec![0.1, 1.0 / 3.0], vec![-2.0f64.sqrt(), 1e-300], vec![5e-324, 1.0]];
        let body = PBody::new(GeneratorSet::from_rows(2, &rows).unwrap(), PExponent::new(0.7).unwrap()).unwrap();
        let text = serde_json::to_string(&BodyFile::from_body(&body, None)).unwrap();
        let back: BodyFile = serde_json::from_str(&text).unwrap();
        let back = back.to_body().unwrap();
        for (a, b) in back.generators().points().iter().zip(body.generators().points()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(back.p(), body.p());
    }

    #[test]
    fn bad_sign_is_rejected() {
        let f = CombinationFile { terms: vec![TermFile { index: 0, sign: 2, lambda: 0.1 }] };
        assert_eq!(f.to_combination(2).unwrap_err().code, 2);
    }
}
