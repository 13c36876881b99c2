//! Text forms of flag values.

use std::path::Path;

use mflab::circle::{KernelKind, KernelSpec, ReducedRational};
use mflab::experiments::LambdaField;
use mflab::variation::TimeSeries;
use mflab::{Error, Result};
use num_complex::Complex64;

fn bad(msg: String) -> Error {
    Error::Parameter(msg)
}

fn number<T: std::str::FromStr>(token: &str, what: &str) -> Result<T> {
    token.trim().parse().map_err(|_| bad(format!("cannot read {what} from {token:?}")))
}

/// `x` or `re:im`.
pub fn complex(token: &str) -> Result<Complex64> {
    match token.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(number(re, "real part")?, number(im, "imaginary part")?)),
        None => Ok(Complex64::new(number(token, "number")?, 0.0)),
    }
}

pub fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| number(t, what)).collect()
}

pub fn complex_list(text: &str) -> Result<Vec<Complex64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(complex).collect()
}

/// Scalar samples `a,b,c` or vector rows `a,b;c,d` at times `0, 1, ...`.
pub fn samples(text: &str) -> Result<TimeSeries> {
    if text.contains(';') {
        let rows = text.split(';').map(complex_list).collect::<Result<Vec<_>>>()?;
        TimeSeries::from_vectors(&rows)
    } else {
        Ok(TimeSeries::from_scalars(&complex_list(text)?))
    }
}

pub fn series(samples_text: Option<&str>, file: Option<&Path>) -> Result<TimeSeries> {
    match (samples_text, file) {
        (Some(text), None) => samples(text),
        (None, Some(path)) => TimeSeries::from_json(&read_json(path)?),
        _ => Err(bad("give exactly one of --samples and --series".into())),
    }
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// `riesz1d`, `riesz:<component>` or `table:<path>`.
pub fn kernel(text: &str, n: usize, d: u32) -> Result<KernelSpec> {
    let kind = match text.split_once(':') {
        None if text == "riesz1d" => KernelKind::Riesz1d,
        Some(("riesz", c)) => KernelKind::Riesz { component: number(c, "Riesz component")? },
        Some(("table", path)) => serde_json::from_value(table_json(read_json(Path::new(path))?))?,
        _ => return Err(bad(format!("unknown kernel {text:?}"))),
    };
    KernelSpec::new(kind, n, d)
}

/// Accepts the table object with or without its `kind` tag.
fn table_json(mut value: serde_json::Value) -> serde_json::Value {
    if let Some(obj) = value.as_object_mut() {
        obj.entry("kind").or_insert_with(|| "table".into());
    }
    value
}

/// `a/q`.
pub fn rational(text: &str) -> Result<ReducedRational> {
    let (a, q) = text.split_once('/').ok_or_else(|| bad(format!("expected a/q, got {text:?}")))?;
    ReducedRational::new(number(a, "numerator")?, number(q, "denominator")?)
}

/// `alpha-windows`, `uniform` or `constant:<lambda>`.
pub fn lambda_field(text: &str) -> Result<LambdaField> {
    match text.split_once(':') {
        None if text == "alpha-windows" => Ok(LambdaField::AlphaWindows),
        None if text == "uniform" => Ok(LambdaField::Uniform),
        Some(("constant", v)) => Ok(LambdaField::Constant { lambda: number(v, "lambda")? }),
        _ => Err(bad(format!("unknown lambda field {text:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(complex("-1:2").unwrap(), Complex64::new(-1.0, 2.0));
        assert!(complex("x").is_err());
    }

    #[test]
    fn vector_rows() {
        let s = samples("1,0;0,1;1:1,0").unwrap();
        assert_eq!((s.len(), s.dim()), (3, 2));
    }

    #[test]
    fn kernels_and_fields() {
        assert_eq!(kernel("riesz1d", 1, 1).unwrap(), KernelSpec::riesz_1d(1));
        assert!(kernel("riesz:2", 2, 1).is_err());
        assert_eq!(lambda_field("constant:0.25").unwrap(), LambdaField::Constant { lambda: 0.25 });
        assert_eq!(rational("2/4").unwrap(), ReducedRational { a: 1, q: 2 });
        assert!(rational("1/0").is_err());
    }
}
