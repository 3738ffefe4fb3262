//! Random families `a, b, x -> c` and a brute-force posterior computed
//! straight from their tables, independent of the library's inference.
#![allow(dead_code)]

use intercausal::model::{Network, VarId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::Exp1;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random distribution with every entry at least `floor / n`.
pub fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let floor = 0.02;
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| (1.0 - floor) * v / total + floor / n as f64).collect()
}

/// Root priors and a child table `[a][b][x][c]` for three root parents.
#[derive(Debug, Clone)]
pub struct Family {
    pub pa: Vec<f64>,
    pub pb: Vec<f64>,
    pub px: Vec<f64>,
    pub nc: usize,
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Random,
    /// `Pr(c0) = 1 - u alpha(a) beta(b) gamma(x)` with monotone `alpha`, `beta`.
    NoisyOrLike,
    /// `Pr(c0) = f(a) g(b) h(x)`.
    Product,
}

fn monotone(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if rng.random_bool(0.5) {
        v.reverse();
    }
    v
}

impl Family {
    pub fn cards(&self) -> (usize, usize, usize) {
        (self.pa.len(), self.pb.len(), self.px.len())
    }

    pub fn p(&self, a: usize, b: usize, x: usize, c: usize) -> f64 {
        let (_, nb, nx) = self.cards();
        self.table[((a * nb + b) * nx + x) * self.nc + c]
    }

    pub fn random(rng: &mut ChaCha8Rng, kind: Kind, na: usize, nb: usize, nx: usize, nc: usize) -> Family {
        let pa = random_dist(rng, na);
        let pb = random_dist(rng, nb);
        let px = random_dist(rng, nx);
        let mut table = Vec::with_capacity(na * nb * nx * nc);
        let split = random_dist(rng, nc - 1);
        let (alpha, beta, gamma) = (monotone(rng, na), monotone(rng, nb), monotone(rng, nx));
        let u: f64 = rng.random_range(0.1..1.0);
        for a in 0..na {
            for b in 0..nb {
                for x in 0..nx {
                    match kind {
                        Kind::Random => table.extend(random_dist(rng, nc)),
                        Kind::NoisyOrLike | Kind::Product => {
                            let c0 = if kind == Kind::Product {
                                alpha[a] * beta[b] * gamma[x]
                            } else {
                                1.0 - u * alpha[a] * beta[b] * gamma[x]
                            };
                            table.push(c0);
                            table.extend(split.iter().map(|s| (1.0 - c0) * s));
                        }
                    }
                }
            }
        }
        Family { pa, pb, px, nc, table }
    }

    pub fn with_px(&self, px: &[f64]) -> Family {
        Family {
            px: px.to_vec(),
            ..self.clone()
        }
    }

    pub fn with_pa(&self, pa: &[f64]) -> Family {
        Family {
            pa: pa.to_vec(),
            ..self.clone()
        }
    }

    /// Network `a, b, x -> c`; returns the ids of a, b, x, c.
    pub fn network(&self) -> (Network, [VarId; 4]) {
        let (na, nb, nx) = self.cards();
        let labels = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let mut bld = Network::builder();
        let a = bld.variable("a", &labels("a", na));
        let b = bld.variable("b", &labels("b", nb));
        let x = bld.variable("x", &labels("x", nx));
        let c = bld.variable("c", &labels("c", self.nc));
        bld.prior(a, self.pa.clone())
            .prior(b, self.pb.clone())
            .prior(x, self.px.clone());
        let rows = self.table.chunks(self.nc).map(|r| r.to_vec()).collect();
        bld.table(c, &[a, b, x], rows);
        (bld.build().expect("valid family"), [a, b, x, c])
    }

    /// `Pr(a | b, c = outcome)` by direct summation.
    pub fn posterior_a(&self, b: usize, outcome: usize) -> Vec<f64> {
        let (na, _, nx) = self.cards();
        let w: Vec<f64> = (0..na)
            .map(|a| self.pa[a] * (0..nx).map(|x| self.px[x] * self.p(a, b, x, outcome)).sum::<f64>())
            .collect();
        let total: f64 = w.iter().sum();
        w.iter().map(|v| v / total).collect()
    }

    /// Change in `Pr(a >= a_t | b, c = outcome)` for each threshold `t` as
    /// `b` moves from `b_lo` up to `b_hi`.
    pub fn shifts(&self, b_hi: usize, b_lo: usize, outcome: usize) -> Vec<f64> {
        let hi = self.posterior_a(b_hi, outcome);
        let lo = self.posterior_a(b_lo, outcome);
        let mut out = Vec::new();
        let (mut ch, mut cl) = (0.0, 0.0);
        for t in 0..hi.len() - 1 {
            ch += hi[t];
            cl += lo[t];
            out.push(ch - cl);
        }
        out
    }

    /// `p^T D p` for the given pairs and outcome, from the raw table.
    pub fn form(&self, a_pair: (usize, usize), b_pair: (usize, usize), outcome: usize, p: &[f64]) -> f64 {
        let l = |a, b| -> f64 { (0..p.len()).map(|x| p[x] * self.p(a, b, x, outcome)).sum() };
        let ((a1, a2), (b1, b2)) = (a_pair, b_pair);
        l(a1, b1) * l(a2, b2) - l(a2, b1) * l(a1, b2)
    }
}

pub fn quadratic(m: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            total += x[i] * v * x[j];
        }
    }
    total
}
