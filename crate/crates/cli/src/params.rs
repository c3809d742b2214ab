//! Argument value types shared by the subcommands and the config file.

use std::str::FromStr;

use dioph_lab::construct::{build_eta1, build_geometric, CantorSchedule, Horizon};
use dioph_lab::rational::{display, parse_rational, ratio, Rational};
use dioph_lab::sequences::DenominatorSequence;
use dioph_lab::ConstructError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeArg {
    Eta1,
    Geometric { l: i64 },
}

impl FromStr for RegimeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "eta1" => Ok(RegimeArg::Eta1),
            other => other
                .strip_prefix("geo:l=")
                .and_then(|l| l.parse::<i64>().ok())
                .filter(|&l| l >= 1)
                .map(|l| RegimeArg::Geometric { l })
                .ok_or_else(|| format!("regime `{other}` is neither `eta1` nor `geo:l=<positive int>`")),
        }
    }
}

impl std::fmt::Display for RegimeArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeArg::Eta1 => f.write_str("eta1"),
            RegimeArg::Geometric { l } => write!(f, "geo:l={l}"),
        }
    }
}

/// `start:stop:count`, `count` evenly spaced points including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: Rational,
    pub stop: Rational,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<Rational> {
        if self.count == 1 {
            return vec![self.start.clone()];
        }
        let span = &self.stop - &self.start;
        (0..self.count).map(|i| &self.start + &span * ratio(i as i64, self.count as i64 - 1)).collect()
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("grid `{s}` is not `start:stop:count`"));
    };
    let start = parse_rational(start).map_err(|e| e.to_string())?;
    let stop = parse_rational(stop).map_err(|e| e.to_string())?;
    let count: usize = count.trim().parse().map_err(|_| format!("bad grid count `{count}`"))?;
    if count == 0 {
        return Err("grid count must be at least 1".into());
    }
    if stop < start {
        return Err(format!("grid stop {} below start {}", display(&stop), display(&start)));
    }
    Ok(Grid { start, stop, count })
}

pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

pub fn build_schedule(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    regime: RegimeArg,
    depth: u64,
) -> Result<CantorSchedule, ConstructError> {
    match regime {
        RegimeArg::Eta1 => build_eta1(seq, theta, vhat, Horizon::Depth(depth)),
        RegimeArg::Geometric { l } => build_geometric(seq, theta, vhat, l, Horizon::Depth(depth)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dioph_lab::rational::int;

    #[test]
    fn regime_forms() {
        assert_eq!("eta1".parse::<RegimeArg>().unwrap(), RegimeArg::Eta1);
        assert_eq!("geo:l=2".parse::<RegimeArg>().unwrap(), RegimeArg::Geometric { l: 2 });
        assert!("geo:l=0".parse::<RegimeArg>().is_err());
        assert!("geo".parse::<RegimeArg>().is_err());
    }

    #[test]
    fn grid_points_are_inclusive() {
        let g = parse_grid("0:1:5").unwrap();
        assert_eq!(g.points(), vec![int(0), ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)]);
        assert_eq!(parse_grid("1/3:1/3:1").unwrap().points(), vec![ratio(1, 3)]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("0:0.5:3").is_err());
    }
}
