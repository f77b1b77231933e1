use crate::error::MmrError;
use crate::lp::{ConstraintSense, Direction};

use super::types::{BinarySolution, BipInstance, BipRow, Scenario};

fn check_len(inst: &BipInstance, x: &BinarySolution) -> Result<(), MmrError> {
    if x.len() != inst.num_vars() {
        return Err(MmrError::DimensionMismatch {
            expected: inst.num_vars(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Scenario maximizing the regret of `x`: selected items take their least
/// favourable value, unselected items their most favourable one.
pub fn worst_scenario(inst: &BipInstance, x: &BinarySolution) -> Result<Scenario, MmrError> {
    check_len(inst, x)?;
    let (on, off) = match inst.direction() {
        Direction::Max => (inst.lower(), inst.upper()),
        Direction::Min => (inst.upper(), inst.lower()),
    };
    Ok(Scenario::new(
        (0..inst.num_vars())
            .map(|j| if x.get(j) { on[j] } else { off[j] })
            .collect(),
    ))
}

/// The mirror of [`worst_scenario`]: the scenario most favourable to `x`.
pub fn best_scenario(inst: &BipInstance, x: &BinarySolution) -> Result<Scenario, MmrError> {
    check_len(inst, x)?;
    let (on, off) = match inst.direction() {
        Direction::Max => (inst.upper(), inst.lower()),
        Direction::Min => (inst.lower(), inst.upper()),
    };
    Ok(Scenario::new(
        (0..inst.num_vars())
            .map(|j| if x.get(j) { on[j] } else { off[j] })
            .collect(),
    ))
}

/// True when `x_hat` is at least as good as `x_bar` under the best scenario
/// of `x_bar`, which implies `r_max(x_hat) <= r_max(x_bar)`.
pub fn dominance_holds(
    inst: &BipInstance,
    x_bar: &BinarySolution,
    x_hat: &BinarySolution,
) -> Result<bool, MmrError> {
    inst.check_feasible(x_bar)?;
    inst.check_feasible(x_hat)?;
    let s = best_scenario(inst, x_bar)?;
    let (hat, bar) = (s.value(x_hat), s.value(x_bar));
    Ok(match inst.direction() {
        Direction::Max => hat >= bar,
        Direction::Min => hat <= bar,
    })
}

/// `sum_{x_hat_j = 0} x_j - sum_{x_hat_j = 1} x_j >= d - |x_hat|`, i.e. Hamming
/// distance at least `d` from `x_hat`.
pub fn hamming_cut(x_hat: &BinarySolution, d: u32) -> Result<BipRow, MmrError> {
    if d == 0 {
        return Err(MmrError::InvalidParameter(
            "Hamming radius d must be >= 1".into(),
        ));
    }
    let coeffs = (0..x_hat.len())
        .map(|j| (j, if x_hat.get(j) { -1 } else { 1 }))
        .collect();
    Ok(BipRow::new(
        coeffs,
        ConstraintSense::Ge,
        d as i64 - x_hat.count_ones() as i64,
    ))
}

/// Removes every solution dominated by `x_hat`, including `x_hat` itself.
pub fn best_scenario_cut(inst: &BipInstance, x_hat: &BinarySolution) -> Result<BipRow, MmrError> {
    check_len(inst, x_hat)?;
    let (lo, hi) = (inst.lower(), inst.upper());
    let (on, off, sense, delta) = match inst.direction() {
        Direction::Max => (lo, hi, ConstraintSense::Ge, 1),
        Direction::Min => (hi, lo, ConstraintSense::Le, -1),
    };
    let coeffs = (0..inst.num_vars())
        .map(|j| (j, if x_hat.get(j) { on[j] } else { off[j] }))
        .filter(|&(_, a)| a != 0)
        .collect();
    let rhs: i64 = x_hat.ones().map(|j| on[j]).sum::<i64>() + delta;
    Ok(BipRow::new(coeffs, sense, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_items(dir: Direction, rows: Vec<BipRow>) -> BipInstance {
        BipInstance::new("t", dir, vec![1, 2], vec![3, 5], rows).unwrap()
    }

    fn sol(s: &str) -> BinarySolution {
        s.parse().unwrap()
    }

    #[test]
    fn scenarios_follow_direction() {
        let max = two_items(Direction::Max, vec![]);
        assert_eq!(worst_scenario(&max, &sol("10")).unwrap().costs, vec![1, 5]);
        assert_eq!(best_scenario(&max, &sol("10")).unwrap().costs, vec![3, 2]);
        let min = two_items(Direction::Min, vec![]);
        assert_eq!(worst_scenario(&min, &sol("10")).unwrap().costs, vec![3, 2]);
        assert_eq!(best_scenario(&min, &sol("10")).unwrap().costs, vec![1, 5]);
    }

    #[test]
    fn degenerate_intervals_give_fixed_costs() {
        let inst = BipInstance::new("t", Direction::Max, vec![4, 7], vec![4, 7], vec![]).unwrap();
        for x in ["00", "01", "10", "11"] {
            assert_eq!(worst_scenario(&inst, &sol(x)).unwrap().costs, vec![4, 7]);
            assert_eq!(best_scenario(&inst, &sol(x)).unwrap().costs, vec![4, 7]);
        }
    }

    #[test]
    fn hamming_cut_examples() {
        let c = hamming_cut(&sol("00"), 1).unwrap();
        assert_eq!(c.coeffs, vec![(0, 1), (1, 1)]);
        assert_eq!((c.sense, c.rhs), (ConstraintSense::Ge, 1));
        let c = hamming_cut(&sol("11"), 2).unwrap();
        assert_eq!(c.coeffs, vec![(0, -1), (1, -1)]);
        assert_eq!(c.rhs, 0);
        assert!(c.is_satisfied(&sol("00")));
        assert!(!c.is_satisfied(&sol("10")));
        assert!(hamming_cut(&sol("1"), 0).is_err());
    }

    #[test]
    fn radius_one_removes_exactly_one_vector() {
        for n in 1..=4usize {
            for centre in 0..(1u64 << n) {
                let cut = hamming_cut(&BinarySolution::from_mask(centre, n), 1).unwrap();
                let removed: Vec<u64> = (0..(1u64 << n))
                    .filter(|&m| !cut.is_satisfied(&BinarySolution::from_mask(m, n)))
                    .collect();
                assert_eq!(removed, vec![centre]);
            }
        }
    }

    #[test]
    fn best_scenario_cut_example() {
        let inst = two_items(Direction::Max, vec![]);
        let c = best_scenario_cut(&inst, &sol("10")).unwrap();
        assert_eq!(c.coeffs, vec![(0, 1), (1, 5)]);
        assert_eq!((c.sense, c.rhs), (ConstraintSense::Ge, 2));
        assert!(!c.is_satisfied(&sol("10")));
        let min = two_items(Direction::Min, vec![]);
        let c = best_scenario_cut(&min, &sol("10")).unwrap();
        assert_eq!(c.coeffs, vec![(0, 3), (1, 2)]);
        assert_eq!((c.sense, c.rhs), (ConstraintSense::Le, 2));
        assert!(!c.is_satisfied(&sol("10")));
    }

    #[test]
    fn dominance_examples() {
        let row = BipRow::new(vec![(0, 1), (1, 1)], ConstraintSense::Le, 1);
        let inst = two_items(Direction::Max, vec![row]);
        assert!(dominance_holds(&inst, &sol("10"), &sol("10")).unwrap());
        // phi(10) = (3, 2): z(01) = 2 < z(10) = 3.
        assert!(!dominance_holds(&inst, &sol("10"), &sol("01")).unwrap());
        assert_eq!(
            dominance_holds(&inst, &sol("11"), &sol("10")),
            Err(MmrError::InfeasibleSolution { row: 0 })
        );
    }
}
