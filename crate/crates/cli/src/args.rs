//! Value parsers for the command line.

use std::str::FromStr;

use intercausal::Sign;

/// `a,b`
#[derive(Debug, Clone, PartialEq)]
pub struct Pair(pub String, pub String);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split(',').map(str::trim).collect::<Vec<_>>()[..] {
            [a, b] if !a.is_empty() && !b.is_empty() => Ok(Pair(a.to_string(), b.to_string())),
            _ => Err(format!("expected two comma-separated names, got `{s}`")),
        }
    }
}

/// `var=outcome`, the outcome given by label or index.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub variable: String,
    pub outcome: String,
}

impl FromStr for Observation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once('=') {
            Some((v, o)) if !v.trim().is_empty() && !o.trim().is_empty() => Ok(Observation {
                variable: v.trim().to_string(),
                outcome: o.trim().to_string(),
            }),
            _ => Err(format!("expected `variable=outcome`, got `{s}`")),
        }
    }
}

/// Outcome pair `i,j` of indices, higher first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexPair(pub usize, pub usize);

impl FromStr for IndexPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        match parts[..] {
            [i, j] => {
                let i = i.parse().map_err(|_| format!("bad index `{i}`"))?;
                let j = j.parse().map_err(|_| format!("bad index `{j}`"))?;
                Ok(IndexPair(i, j))
            }
            _ => Err(format!("expected `i,j`, got `{s}`")),
        }
    }
}

/// `start:end:count`, both ends included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        let mut points: Vec<f64> = (0..self.count).map(|k| self.start + step * k as f64).collect();
        points[self.count - 1] = self.end;
        points
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, count] = parts[..] else {
            return Err(format!("expected `start:end:count`, got `{s}`"));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("bad number `{v}`"))
        };
        let (start, end) = (num(start)?, num(end)?);
        let count: usize = count.trim().parse().map_err(|_| format!("bad count `{count}`"))?;
        if count == 0 {
            return Err("grid needs at least one point".into());
        }
        if count == 1 && start != end {
            return Err("a one-point grid needs start == end".into());
        }
        if end < start {
            return Err("grid end is below its start".into());
        }
        Ok(Grid { start, end, count })
    }
}

/// Four comma-separated signs, e.g. `-,0,-,+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deltas(pub [Sign; 4]);

impl FromStr for Deltas {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let signs: Vec<Sign> = s
            .split(',')
            .map(|p| p.trim().parse::<Sign>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let signs: [Sign; 4] = signs
            .try_into()
            .map_err(|v: Vec<Sign>| format!("expected four signs, got {}", v.len()))?;
        Ok(Deltas(signs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g: Grid = "0:1:3".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0]);
        let g: Grid = "0:10:201".parse().unwrap();
        let p = g.points();
        assert_eq!(p[20], 1.0);
        assert_eq!(p[200], 10.0);
        assert!("1:0:3".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
    }

    #[test]
    fn deltas_and_pairs() {
        let d: Deltas = "-,0,-,+".parse().unwrap();
        assert_eq!(d.0, [Sign::Negative, Sign::Zero, Sign::Negative, Sign::Positive]);
        assert!("-,0,-".parse::<Deltas>().is_err());
        assert_eq!("a, b".parse::<Pair>().unwrap(), Pair("a".into(), "b".into()));
        assert!("a".parse::<Pair>().is_err());
        let o: Observation = "c=C".parse().unwrap();
        assert_eq!((o.variable.as_str(), o.outcome.as_str()), ("c", "C"));
        assert!("c".parse::<Observation>().is_err());
        assert_eq!("0,2".parse::<IndexPair>().unwrap(), IndexPair(0, 2));
    }
}
