//! Chi-path specs, drive files and config files.

use wick_core::applications::{DrivePiece, DriveSpec};
use wick_core::scalar::{integer, Gauss, Rational};
use wick_core::sorder::{ChiPath, Piece, Poly};

use crate::eval::eval;
use crate::parse::{parse, parse_rational, Expr};

fn poly_in_t(e: &Expr) -> Result<Poly, String> {
    Ok(match e {
        Expr::Num(r) => Poly::constant(r.clone()),
        Expr::Sym(s) if s == "t" => Poly::monomial(1),
        Expr::Add(a, b) => poly_in_t(a)?.add(&poly_in_t(b)?),
        Expr::Sub(a, b) => poly_in_t(a)?.add(&poly_in_t(b)?.scale(&integer(-1))),
        Expr::Neg(a) => poly_in_t(a)?.scale(&integer(-1)),
        Expr::Mul(a, b) => poly_in_t(a)?.mul(&poly_in_t(b)?),
        Expr::Pow(a, k) => poly_in_t(a)?.pow(*k as usize),
        other => return Err(format!("`{other}` is not a rational polynomial in t")),
    })
}

fn rational_field(text: &str) -> Result<Rational, String> {
    parse_rational(text).ok_or_else(|| format!("`{}` is not a rational number", text.trim()))
}

/// `t`, `t^k`, `jump@x`, or pieces `a:b:poly; ...` with exact rationals.
pub fn parse_chi(spec: &str) -> Result<ChiPath, String> {
    let spec = spec.trim();
    if let Some(x) = spec.strip_prefix("jump@") {
        return ChiPath::jump_at(rational_field(x)?).map_err(|e| e.to_string());
    }
    let pieces = if spec.contains(':') {
        spec.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|piece| {
                let fields: Vec<_> = piece.splitn(3, ':').collect();
                if fields.len() != 3 {
                    return Err(format!("piece `{}` should read a:b:poly", piece.trim()));
                }
                let poly = parse(fields[2]).map_err(|e| e.to_string())?;
                Ok(Piece { a: rational_field(fields[0])?, b: rational_field(fields[1])?, poly: poly_in_t(&poly)? })
            })
            .collect::<Result<Vec<_>, String>>()?
    } else {
        let poly = parse(spec).map_err(|e| e.to_string())?;
        vec![Piece { a: integer(0), b: integer(1), poly: poly_in_t(&poly)? }]
    };
    ChiPath::new(pieces).map_err(|e| e.to_string())
}

fn complex_value(text: &str) -> Result<Gauss, String> {
    let e = parse(text).map_err(|e| e.to_string())?;
    eval(&e)
        .ok()
        .and_then(|p| p.as_scalar())
        .and_then(|s| if s.is_zero() { Some(Gauss::zero()) } else { s.as_gauss() })
        .ok_or_else(|| format!("`{}` is not a complex rational", text.trim()))
}

/// Lines `t_start t_end value`; `#` starts a comment.
pub fn parse_drive(text: &str) -> Result<DriveSpec, String> {
    let mut pieces = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
            return Err(format!("line {}: expected `t_start t_end value`", n + 1));
        };
        let value: String = fields.collect();
        if value.is_empty() {
            return Err(format!("line {}: missing value", n + 1));
        }
        let at = |e: String| format!("line {}: {e}", n + 1);
        pieces.push(DrivePiece {
            start: rational_field(a).map_err(at)?,
            end: rational_field(b).map_err(at)?,
            value: complex_value(&value).map_err(at)?,
        });
    }
    DriveSpec::piecewise(pieces).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub fock: Option<usize>,
    pub steps: Option<usize>,
    pub tolerance: Option<f64>,
}

/// `key = value` lines for `fock`, `steps` and `tolerance`.
pub fn parse_config(text: &str) -> Result<Config, String> {
    let mut cfg = Config::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected `key = value`", n + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = || format!("line {}: bad value `{value}` for `{key}`", n + 1);
        match key {
            "fock" => cfg.fock = Some(value.parse().map_err(|_| bad())?),
            "steps" => cfg.steps = Some(value.parse().map_err(|_| bad())?),
            "tolerance" => cfg.tolerance = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(format!("line {}: unknown key `{key}`", n + 1)),
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wick_core::scalar::rational;
    use wick_core::sorder::s_of_chi;

    #[test]
    fn chi_specs() {
        assert_eq!(parse_chi("t").unwrap(), ChiPath::identity());
        assert_eq!(parse_chi("t^3").unwrap(), ChiPath::power(3));
        assert_eq!(parse_chi("jump@1/2").unwrap(), ChiPath::jump_at(rational(1, 2)).unwrap());
        let pq = parse_chi("0:1/2:2*t^2; 1/2:1:1 - 2*(1-t)^2").unwrap();
        assert_eq!(s_of_chi(&pq), integer(0));
        assert!(parse_chi("1 - t").is_err());
        assert!(parse_chi("0:1:q").is_err());
        assert!(parse_chi("0:1").is_err());
    }

    #[test]
    fn drive_files() {
        let d = parse_drive("# E(t)\n0 1/2 0.3+0.1i\n1/2 1 -2i  # tail\n\n").unwrap();
        let DriveSpec::Piecewise(p) = d else { panic!() };
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].value, Gauss::new(rational(3, 10), rational(1, 10)));
        assert_eq!(p[1].value, Gauss::new(integer(0), integer(-2)));
        assert!(parse_drive("0 1").is_err());
        assert!(parse_drive("0 1 q").is_err());
        assert!(parse_drive("0 1 1\n1/2 2 1").is_err());
        assert!(parse_drive("0 1 0").is_ok());
    }

    #[test]
    fn config_files() {
        let c = parse_config("fock = 64\n# comment\nsteps=500\ntolerance = 1e-7").unwrap();
        assert_eq!(c, Config { fock: Some(64), steps: Some(500), tolerance: Some(1e-7) });
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("fock = many").is_err());
    }
}
