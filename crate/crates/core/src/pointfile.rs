//! Plain-text point sets: a header line `N=<window>` followed by one point per
//! line, either `x` (circle) or `x y` (torus). Blank lines and lines starting
//! with `#` are ignored.

use std::fmt::Write as _;

use crate::eisenstein::PlanePoint;
use crate::energy::{PointConfiguration1D, PointConfiguration2D};
use crate::error::{Error, Result};

/// A parsed point set of either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSet {
    Line(PointConfiguration1D),
    Plane(PointConfiguration2D),
}

impl PointSet {
    pub fn dimension(&self) -> usize {
        match self {
            PointSet::Line(_) => 1,
            PointSet::Plane(_) => 2,
        }
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("not a finite number: {tok:?}"),
        })
}

/// Parses the text format. Line numbers in errors are 1-based.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut window = None;
    let mut xs: Vec<f64> = Vec::new();
    let mut ps: Vec<PlanePoint> = Vec::new();
    let mut dim = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if window.is_none() {
            let rest = s.strip_prefix("N=").ok_or_else(|| Error::Parse {
                line,
                msg: "expected header `N=<window>`".into(),
            })?;
            let n = parse_num(rest.trim(), line)?;
            if n <= 0.0 {
                return Err(Error::Parse {
                    line,
                    msg: format!("window must be positive, got {n}"),
                });
            }
            window = Some(n);
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() > 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 1 or 2 coordinates, found {}", toks.len()),
            });
        }
        if dim == 0 {
            dim = toks.len();
        } else if dim != toks.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {dim} coordinate(s), found {}", toks.len()),
            });
        }
        let x = parse_num(toks[0], line)?;
        if dim == 1 {
            xs.push(x);
        } else {
            ps.push(PlanePoint::new(x, parse_num(toks[1], line)?));
        }
    }
    let window = window.ok_or(Error::Parse {
        line: 1,
        msg: "missing header `N=<window>`".into(),
    })?;
    if dim == 2 {
        Ok(PointSet::Plane(PointConfiguration2D::new(ps, window)?))
    } else {
        Ok(PointSet::Line(PointConfiguration1D::new(xs, window)?))
    }
}

/// Writes a circle configuration in the text format.
pub fn format_points_1d(cfg: &PointConfiguration1D) -> String {
    let mut s = format!("N={}\n", cfg.window);
    for x in &cfg.points {
        let _ = writeln!(s, "{x:.17e}");
    }
    s
}

/// Writes a torus configuration in the text format.
pub fn format_points_2d(cfg: &PointConfiguration2D) -> String {
    let mut s = format!("N={}\n", cfg.window);
    for p in &cfg.points {
        let _ = writeln!(s, "{:.17e} {:.17e}", p.re, p.im);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_1d() {
        let c = PointConfiguration1D::new(vec![0.25, 1.5, 3.0], 4.0).unwrap();
        let back = parse_points(&format_points_1d(&c)).unwrap();
        assert_eq!(back, PointSet::Line(c));
    }

    #[test]
    fn roundtrip_2d() {
        let c = PointConfiguration2D::new(
            vec![PlanePoint::new(0.1, 0.2), PlanePoint::new(1.0, 1.75)],
            2.0,
        )
        .unwrap();
        let back = parse_points(&format_points_2d(&c)).unwrap();
        assert_eq!(back, PointSet::Plane(c));
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_points("N=4\n0.5\n\nabc\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 4,
                msg: "not a finite number: \"abc\"".into()
            }
        );
        assert!(matches!(
            parse_points("0.5\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("N=4\n1 2\n3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
