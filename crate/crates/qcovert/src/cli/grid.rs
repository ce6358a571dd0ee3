//! Sweep grids: a single value or `start:stop:{lin|log}[:points]`.

use serde::Serialize;
use std::str::FromStr;

pub const DEFAULT_POINTS: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Grid {
    Value(f64),
    Lin { start: f64, stop: f64, points: usize },
    Log { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Value(x) => vec![x],
            Grid::Lin { start, stop, points } => spaced(start, stop, points, |t| t),
            Grid::Log { start, stop, points } => {
                let (a, b) = (start.log10(), stop.log10());
                spaced(a, b, points, |t| 10f64.powf(t))
            }
        }
    }
}

fn spaced(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    if n == 1 {
        return vec![f(a)];
    }
    (0..n).map(|i| f(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}' in grid '{s}'"));
        match parts.len() {
            1 => {
                let v = num(parts[0])?;
                if !v.is_finite() {
                    return Err(format!("grid value '{s}' is not finite"));
                }
                Ok(Grid::Value(v))
            }
            3 | 4 => {
                let (start, stop) = (num(parts[0])?, num(parts[1])?);
                let points = match parts.get(3) {
                    Some(p) => p.trim().parse::<usize>().map_err(|_| format!("bad point count '{p}'"))?,
                    None => DEFAULT_POINTS,
                };
                if points == 0 {
                    return Err("grid needs at least one point".into());
                }
                if !start.is_finite() || !stop.is_finite() {
                    return Err(format!("grid bounds in '{s}' are not finite"));
                }
                match parts[2].trim() {
                    "lin" => Ok(Grid::Lin { start, stop, points }),
                    "log" if start > 0.0 && stop > 0.0 => Ok(Grid::Log { start, stop, points }),
                    "log" => Err(format!("log grid '{s}' needs positive bounds")),
                    other => Err(format!("grid spacing '{other}' must be lin or log")),
                }
            }
            _ => Err(format!("grid '{s}' must be a number or start:stop:lin|log[:points]")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!("0.5".parse::<Grid>().unwrap().values(), vec![0.5]);
        let g: Grid = "1e-4:1:log:5".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert!((v[0] - 1e-4).abs() < 1e-18 && (v[4] - 1.0).abs() < 1e-12);
        assert!((v[1] - 1e-3).abs() < 1e-15);
        assert_eq!("0:1:lin".parse::<Grid>().unwrap().values().len(), DEFAULT_POINTS);
        assert!("0:1:log".parse::<Grid>().is_err());
        assert!("0:1:cubic".parse::<Grid>().is_err());
        assert!("a:b".parse::<Grid>().is_err());
    }
}
