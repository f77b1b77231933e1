//! Seeded generators. Every generator draws from the caller's [`SplitMix64`]
//! in a fixed, documented order.

use std::str::FromStr;

use crate::error::MmrError;
use crate::lp::{ConstraintSense, Direction};
use crate::mmr::{BipInstance, BipRow};
use crate::problems::{GapSpec, KpSpec};

use super::rng::SplitMix64;

/// Guards floor/ceil of products such as `0.55 * 100` against round-off.
const EPS: f64 = 1e-9;

fn floor_i(v: f64) -> i64 {
    (v + EPS).floor() as i64
}

fn ceil_i(v: f64) -> i64 {
    (v - EPS).ceil() as i64
}

/// Draws `c_lo[j]` uniformly in `[ceil((1-delta) c_j), c_j]` and then
/// `c_hi[j]` uniformly in `[c_j, floor((1+delta) c_j)]`, item by item.
pub fn overlay_intervals(costs: &[i64], delta: f64, rng: &mut SplitMix64) -> (Vec<i64>, Vec<i64>) {
    let mut lower = Vec::with_capacity(costs.len());
    let mut upper = Vec::with_capacity(costs.len());
    for &c in costs {
        let c_f = c as f64;
        let lo_end = ceil_i((1.0 - delta) * c_f).min(c);
        let hi_end = floor_i((1.0 + delta) * c_f).max(c);
        lower.push(rng.uniform(lo_end, c));
        upper.push(rng.uniform(c, hi_end));
    }
    (lower, upper)
}

/// Knapsack generator for the nine classical correlation types.
///
/// Per item, the weight is drawn before the value (type 4 draws the value
/// first). `R` is `r_bar`, all divisions by 10 and 500 are integer divisions.
///
/// 1. uncorrelated: `a, c ~ U[1, R]`;
/// 2. weakly correlated: `a ~ U[1, R]`, `c ~ U[max(1, a - R/10), a + R/10]`;
/// 3. strongly correlated: `a ~ U[1, R]`, `c = a + R/10`;
/// 4. inverse strongly correlated: `c ~ U[1, R]`, `a = c + R/10`;
/// 5. almost strongly correlated: `a ~ U[1, R]`,
///    `c ~ U[a + R/10 - R/500, a + R/10 + R/500]`;
/// 6. subset sum: `a ~ U[1, R]`, `c = a`;
/// 7. even-odd subset sum: `a = 2 U[1, R/2]`, `c = a`, odd capacity;
/// 8. even-odd strongly correlated: `a = 2 U[1, R/2]`, `c = a + R/10`, odd
///    capacity;
/// 9. uncorrelated with similar weights: `a ~ U[100R, 100R + R/10]`,
///    `c ~ U[1, R]`.
///
/// The capacity is `floor(gamma * sum a)`, plus one if even for types 7
/// and 8. The intervals come from [`overlay_intervals`]. Returns the spec and
/// the base values.
pub fn gen_kp(
    kp_type: u8,
    n: usize,
    r_bar: i64,
    gamma: f64,
    delta: f64,
    rng: &mut SplitMix64,
) -> Result<(KpSpec, Vec<i64>), MmrError> {
    if !(1..=9).contains(&kp_type) {
        return Err(MmrError::InvalidParameter(format!(
            "knapsack type {kp_type} not in 1..=9"
        )));
    }
    if r_bar < 2 || n == 0 || !(0.0..=1.0).contains(&gamma) || !(0.0..1.0).contains(&delta) {
        return Err(MmrError::InvalidParameter(
            "knapsack generator needs n >= 1, R >= 2, gamma in [0,1] and delta in [0,1)".into(),
        ));
    }
    let r10 = r_bar / 10;
    let mut weights = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let (a, c) = match kp_type {
            1 => {
                let a = rng.uniform(1, r_bar);
                (a, rng.uniform(1, r_bar))
            }
            2 => {
                let a = rng.uniform(1, r_bar);
                (a, rng.uniform((a - r10).max(1), a + r10))
            }
            3 => {
                let a = rng.uniform(1, r_bar);
                (a, a + r10)
            }
            4 => {
                let c = rng.uniform(1, r_bar);
                (c + r10, c)
            }
            5 => {
                let a = rng.uniform(1, r_bar);
                let r500 = r_bar / 500;
                (a, rng.uniform(a + r10 - r500, a + r10 + r500))
            }
            6 => {
                let a = rng.uniform(1, r_bar);
                (a, a)
            }
            7 => {
                let a = 2 * rng.uniform(1, r_bar / 2);
                (a, a)
            }
            8 => {
                let a = 2 * rng.uniform(1, r_bar / 2);
                (a, a + r10)
            }
            _ => {
                let a = rng.uniform(100 * r_bar, 100 * r_bar + r10);
                (a, rng.uniform(1, r_bar))
            }
        };
        weights.push(a);
        values.push(c);
    }
    let total: i64 = weights.iter().sum();
    let mut capacity = floor_i(gamma * total as f64);
    if matches!(kp_type, 7 | 8) && capacity % 2 == 0 {
        capacity += 1;
    }
    let (lower, upper) = overlay_intervals(&values, delta, rng);
    Ok((
        KpSpec {
            weights,
            capacity,
            lower,
            upper,
        },
        values,
    ))
}

/// Interval flavours for set covering costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScpFlavor {
    /// Overlay around the base costs.
    B,
    /// `c_hi ~ U[0, 1000]`, then `c_lo ~ U[0, c_hi]`.
    M,
    /// `c_lo ~ U[0, 1000]`, then `c_hi ~ U[c_lo, c_lo + 1000]`.
    K,
}

impl FromStr for ScpFlavor {
    type Err = MmrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "B" => Ok(ScpFlavor::B),
            "M" => Ok(ScpFlavor::M),
            "K" => Ok(ScpFlavor::K),
            other => Err(MmrError::InvalidParameter(format!(
                "unknown SCP flavor {other:?}"
            ))),
        }
    }
}

/// Cost intervals for a set covering instance; `base_costs` is only used by
/// flavor B.
pub fn gen_scp_intervals(
    base_costs: &[i64],
    flavor: ScpFlavor,
    delta: f64,
    rng: &mut SplitMix64,
) -> (Vec<i64>, Vec<i64>) {
    match flavor {
        ScpFlavor::B => overlay_intervals(base_costs, delta, rng),
        ScpFlavor::M => base_costs
            .iter()
            .map(|_| {
                let hi = rng.uniform(0, 1000);
                (rng.uniform(0, hi), hi)
            })
            .unzip(),
        ScpFlavor::K => base_costs
            .iter()
            .map(|_| {
                let lo = rng.uniform(0, 1000);
                (lo, rng.uniform(lo, lo + 1000))
            })
            .unzip(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapType {
    A,
    B,
    C,
    E,
}

impl FromStr for GapType {
    type Err = MmrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(GapType::A),
            "B" => Ok(GapType::B),
            "C" => Ok(GapType::C),
            "E" => Ok(GapType::E),
            other => Err(MmrError::InvalidParameter(format!(
                "unknown GAP type {other:?}"
            ))),
        }
    }
}

/// Generalized assignment generator.
///
/// Types A, B and C draw the `m x n` resources `U[5, 25]` row by row, then the
/// costs `U[10, 50]` row by row. Type E draws `e2` for every resource
/// (`a = round(1 - 10 ln e2)`), then `e3` for every cost
/// (`c = max(0, round(1000 / (1 - 10 ln e2) - 10 e3))`).
///
/// Capacities: A is `floor(0.6 (n/m) 15 + 0.4 g)` where `g` is the largest
/// resource load when every job goes to its cheapest agent (lowest index on
/// ties); B is `floor(0.7 A)`; C and E are `floor(0.8 sum_j a_ij / m)`. All
/// capacities are at least 1. Intervals are overlaid on the costs in
/// `agent * n + job` order. Returns the spec and the base cost matrix.
pub fn gen_gap(
    gap_type: GapType,
    m: usize,
    n: usize,
    delta: f64,
    rng: &mut SplitMix64,
) -> Result<(GapSpec, Vec<Vec<i64>>), MmrError> {
    if m == 0 || n == 0 || !(0.0..1.0).contains(&delta) {
        return Err(MmrError::InvalidParameter(
            "GAP generator needs m, n >= 1 and delta in [0,1)".into(),
        ));
    }
    let (resources, costs) = match gap_type {
        GapType::A | GapType::B | GapType::C => {
            let a: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.uniform(5, 25)).collect())
                .collect();
            let c: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.uniform(10, 50)).collect())
                .collect();
            (a, c)
        }
        GapType::E => {
            let real: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| 1.0 - 10.0 * rng.unit_open_closed().ln())
                        .collect()
                })
                .collect();
            let c = (0..m)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let e3 = rng.unit_closed_open();
                            ((1000.0 / real[i][j] - 10.0 * e3).round() as i64).max(0)
                        })
                        .collect()
                })
                .collect();
            let a = real
                .iter()
                .map(|row| row.iter().map(|v| v.round() as i64).collect())
                .collect();
            (a, c)
        }
    };
    let per_agent_c =
        |a: &Vec<Vec<i64>>, i: usize| floor_i(0.8 * a[i].iter().sum::<i64>() as f64 / m as f64);
    let type_a = || {
        let mut load = vec![0i64; m];
        for j in 0..n {
            let theta = (0..m).min_by_key(|&i| (costs[i][j], i)).expect("m >= 1");
            load[theta] += resources[theta][j];
        }
        let g = *load.iter().max().expect("m >= 1") as f64;
        floor_i(0.6 * (n as f64 / m as f64) * 15.0 + 0.4 * g)
    };
    let capacities: Vec<i64> = match gap_type {
        GapType::A => vec![type_a(); m],
        GapType::B => vec![floor_i(0.7 * type_a() as f64); m],
        GapType::C | GapType::E => (0..m).map(|i| per_agent_c(&resources, i)).collect(),
    };
    let capacities = capacities.into_iter().map(|b| b.max(1)).collect();
    let (lo, hi) = overlay_intervals(&costs.concat(), delta, rng);
    let split = |v: Vec<i64>| v.chunks(n).map(<[i64]>::to_vec).collect::<Vec<_>>();
    Ok((
        GapSpec {
            resources,
            capacities,
            lower: split(lo),
            upper: split(hi),
        },
        costs,
    ))
}

/// Shape of a small random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomShape {
    /// Maximization with `m` knapsack rows `a ~ U[1, 20]` and capacity
    /// `floor(r sum a)`, `r ~ U[30, 60] / 100`.
    Knapsack,
    /// Minimization with `m` covering rows `a ~ U[0, 3]` (at least one
    /// positive entry) and demand `max(1, floor(r sum a))`, `r` as above.
    Covering,
}

/// Small random instance for oracle comparisons.
///
/// Base costs `U[1, 40]` are drawn first, then the rows, then the intervals
/// via [`overlay_intervals`].
pub fn random_instance(
    name: &str,
    shape: RandomShape,
    n: usize,
    m: usize,
    delta: f64,
    rng: &mut SplitMix64,
) -> Result<BipInstance, MmrError> {
    if n == 0 {
        return Err(MmrError::InvalidParameter("n must be at least 1".into()));
    }
    let base: Vec<i64> = (0..n).map(|_| rng.uniform(1, 40)).collect();
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let ratio = rng.uniform(30, 60) as f64 / 100.0;
        let row = match shape {
            RandomShape::Knapsack => {
                let a: Vec<i64> = (0..n).map(|_| rng.uniform(1, 20)).collect();
                let b = floor_i(ratio * a.iter().sum::<i64>() as f64);
                BipRow::new(a.into_iter().enumerate().collect(), ConstraintSense::Le, b)
            }
            RandomShape::Covering => {
                let mut a: Vec<i64> = (0..n).map(|_| rng.uniform(0, 3)).collect();
                if a.iter().all(|&v| v == 0) {
                    let j = rng.uniform(0, n as i64 - 1) as usize;
                    a[j] = 1;
                }
                let b = floor_i(ratio * a.iter().sum::<i64>() as f64).max(1);
                let coeffs = a.into_iter().enumerate().filter(|&(_, v)| v != 0).collect();
                BipRow::new(coeffs, ConstraintSense::Ge, b)
            }
        };
        rows.push(row);
    }
    let (lower, upper) = overlay_intervals(&base, delta, rng);
    let direction = match shape {
        RandomShape::Knapsack => Direction::Max,
        RandomShape::Covering => Direction::Min,
    };
    BipInstance::new(name, direction, lower, upper, rows)
}

/// `count` random instances of one shape. Instance `k` is drawn from its own
/// generator seeded with `seed + k`: `n ~ U[4, 12]`, `m ~ U[1, 3]` and
/// `delta` either 0.1 or 0.3 with equal probability.
pub fn random_corpus(
    shape: RandomShape,
    count: usize,
    seed: u64,
) -> Result<Vec<BipInstance>, MmrError> {
    let prefix = match shape {
        RandomShape::Knapsack => "rkp",
        RandomShape::Covering => "rcov",
    };
    (0..count)
        .map(|k| {
            let mut rng = SplitMix64::new(seed.wrapping_add(k as u64));
            let n = rng.uniform(4, 12) as usize;
            let m = rng.uniform(1, 3) as usize;
            let delta = if rng.uniform(0, 1) == 0 { 0.1 } else { 0.3 };
            random_instance(&format!("{prefix}-{k:04}"), shape, n, m, delta, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_delta_is_degenerate() {
        let mut rng = SplitMix64::new(3);
        let costs = vec![0, 1, 17, 100];
        let (lo, hi) = overlay_intervals(&costs, 0.0, &mut rng);
        assert_eq!((lo, hi), (costs.clone(), costs));
    }

    #[test]
    fn overlay_ranges() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let (lo, hi) = overlay_intervals(&[100], 0.3, &mut rng);
            assert!((70..=100).contains(&lo[0]));
            assert!((100..=130).contains(&hi[0]));
        }
    }

    #[test]
    fn overlay_is_reproducible() {
        let a = overlay_intervals(&[10, 20], 0.1, &mut SplitMix64::new(42));
        let b = overlay_intervals(&[10, 20], 0.1, &mut SplitMix64::new(42));
        assert_eq!(a, b);
        assert!((9..=10).contains(&a.0[0]) && (10..=11).contains(&a.1[0]));
        assert!((18..=20).contains(&a.0[1]) && (20..=22).contains(&a.1[1]));
    }

    #[test]
    fn knapsack_types() {
        let mut rng = SplitMix64::new(1);
        let (_, c) = gen_kp(6, 30, 1000, 0.5, 0.1, &mut rng).unwrap();
        let (spec6, _) = gen_kp(6, 30, 1000, 0.5, 0.0, &mut SplitMix64::new(2)).unwrap();
        assert_eq!(spec6.lower, spec6.weights);
        assert_eq!(c.len(), 30);

        let (spec3, base3) = gen_kp(3, 30, 1000, 0.5, 0.2, &mut rng).unwrap();
        for (a, c) in spec3.weights.iter().zip(&base3) {
            assert_eq!(*c, a + 100);
        }
        for t in [7, 8] {
            for seed in 0..20 {
                let (s, _) = gen_kp(t, 11, 1000, 0.5, 0.1, &mut SplitMix64::new(seed)).unwrap();
                assert!(s.weights.iter().all(|a| a % 2 == 0));
                assert_eq!(s.capacity % 2, 1);
            }
        }
        let (s9, _) = gen_kp(9, 10, 1000, 0.5, 0.1, &mut rng).unwrap();
        assert!(s9.weights.iter().all(|&a| (100_000..=100_100).contains(&a)));
        let (s2, b2) = gen_kp(2, 50, 1000, 0.45, 0.1, &mut rng).unwrap();
        for (a, c) in s2.weights.iter().zip(&b2) {
            assert!(*c >= 1 && (c - a).abs() <= 100);
        }
        assert_eq!(
            s2.capacity,
            (0.45 * s2.weights.iter().sum::<i64>() as f64 + 1e-9).floor() as i64
        );
        assert!(gen_kp(10, 5, 1000, 0.5, 0.1, &mut rng).is_err());
    }

    #[test]
    fn scp_flavors() {
        let base = vec![5; 300];
        let mut rng = SplitMix64::new(9);
        let (lo, hi) = gen_scp_intervals(&base, ScpFlavor::B, 0.0, &mut rng);
        assert_eq!((lo, hi), (base.clone(), base.clone()));
        let (lo, hi) = gen_scp_intervals(&base, ScpFlavor::M, 0.0, &mut rng);
        assert!(lo
            .iter()
            .zip(&hi)
            .all(|(l, h)| 0 <= *l && l <= h && *h <= 1000));
        let (lo, hi) = gen_scp_intervals(&base, ScpFlavor::K, 0.0, &mut rng);
        assert!(lo
            .iter()
            .zip(&hi)
            .all(|(l, h)| (0..=1000).contains(l) && l <= h && h - l <= 1000));
    }

    #[test]
    fn gap_types() {
        let mut rng = SplitMix64::new(4);
        let (a, base) = gen_gap(GapType::A, 5, 40, 0.1, &mut rng).unwrap();
        assert!(a.resources.iter().flatten().all(|v| (5..=25).contains(v)));
        assert!(base.iter().flatten().all(|v| (10..=50).contains(v)));
        // B uses the same draws as A, so equal seeds give comparable capacities.
        let (a2, _) = gen_gap(GapType::A, 5, 40, 0.1, &mut SplitMix64::new(8)).unwrap();
        let (b2, _) = gen_gap(GapType::B, 5, 40, 0.1, &mut SplitMix64::new(8)).unwrap();
        assert_eq!(
            b2.capacities[0],
            (0.7 * a2.capacities[0] as f64 + 1e-9).floor() as i64
        );
        let (c, _) = gen_gap(GapType::C, 5, 40, 0.1, &mut rng).unwrap();
        for i in 0..5 {
            let s: i64 = c.resources[i].iter().sum();
            assert_eq!(
                c.capacities[i],
                (0.8 * s as f64 / 5.0 + 1e-9).floor() as i64
            );
        }
        let (e, base_e) = gen_gap(GapType::E, 5, 40, 0.1, &mut rng).unwrap();
        assert!(e.resources.iter().flatten().all(|&v| v >= 1));
        assert!(base_e.iter().flatten().all(|&v| v >= 0));
        for (l, (h, c)) in e
            .lower
            .concat()
            .iter()
            .zip(e.upper.concat().iter().zip(base_e.concat()))
        {
            assert!(*l <= c && c <= *h);
        }
    }

    #[test]
    fn random_instances_are_feasible_and_reproducible() {
        for shape in [RandomShape::Knapsack, RandomShape::Covering] {
            let a = random_instance("r", shape, 8, 3, 0.3, &mut SplitMix64::new(5)).unwrap();
            let b = random_instance("r", shape, 8, 3, 0.3, &mut SplitMix64::new(5)).unwrap();
            assert_eq!(a, b);
            let trivial = match shape {
                RandomShape::Knapsack => crate::mmr::BinarySolution::zeros(8),
                RandomShape::Covering => crate::mmr::BinarySolution::new(vec![true; 8]),
            };
            assert!(a.is_feasible(&trivial));
        }
    }
}
