//! Budgeted brute-force solver for small instances, giving tests and
//! reports a true optimum to measure errors against.
//!
//! Any full assignment can be row-reordered so the first coordinate reads
//! 1..n, so the solver fixes dimension 1 to the identity and enumerates
//! permutations for the remaining dimensions, pruning a row subtree once the
//! partial sum plus `rows remaining * minimum weight` cannot beat the best
//! value found.

use crate::instance::{Assignment, Instance, PartialAssignment, Point};
use crate::{Error, Result};

/// Cap on the enumeration size `(n!)^(s-1)`.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_leaves: u128,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_leaves: 100_000_000,
        }
    }
}

/// Number of leaves `(n!)^(s-1)`, or None on overflow.
pub fn search_space(s: usize, n: usize) -> Option<u128> {
    let mut factorial: u128 = 1;
    for i in 2..=n as u128 {
        factorial = factorial.checked_mul(i)?;
    }
    let mut leaves: u128 = 1;
    for _ in 1..s {
        leaves = leaves.checked_mul(factorial)?;
    }
    Some(leaves)
}

pub fn brute_force(inst: &Instance) -> Result<(Assignment, u64)> {
    brute_force_with(inst, &SearchBudget::default())
}

pub fn brute_force_with(inst: &Instance, budget: &SearchBudget) -> Result<(Assignment, u64)> {
    let s = inst.s();
    let n = inst.n();
    let leaves = search_space(s, n).unwrap_or(u128::MAX);
    if leaves > budget.max_leaves {
        return Err(Error::BudgetExceeded {
            leaves,
            budget: budget.max_leaves,
        });
    }
    let min_weight = *inst.weights().iter().min().expect("n >= 1") as u64;
    let mut search = Search {
        inst,
        min_weight,
        used: vec![vec![false; n]; s],
        row_coords: vec![vec![0u32; s]; n],
        best_value: u64::MAX,
        best_rows: Vec::new(),
    };
    search.descend_row(0, 0);
    debug_assert!(!search.best_rows.is_empty());

    let mut pa = PartialAssignment::for_instance(inst);
    for coords in &search.best_rows {
        let appended = pa.try_extend(Point::new(coords.clone()));
        debug_assert!(appended);
    }
    let best = Assignment::from_partial(pa)?;
    Ok((best, search.best_value))
}

struct Search<'a> {
    inst: &'a Instance,
    min_weight: u64,
    used: Vec<Vec<bool>>,
    row_coords: Vec<Vec<u32>>,
    best_value: u64,
    best_rows: Vec<Vec<u32>>,
}

impl Search<'_> {
    fn descend_row(&mut self, row: usize, partial: u64) {
        let n = self.inst.n();
        if row == n {
            if partial < self.best_value {
                self.best_value = partial;
                self.best_rows = self.row_coords.clone();
            }
            return;
        }
        if self.best_value != u64::MAX {
            let bound = partial + (n - row) as u64 * self.min_weight;
            if bound >= self.best_value {
                return;
            }
        }
        self.row_coords[row][0] = row as u32 + 1;
        self.descend_dim(row, 1, row * self.inst.stride(0), partial);
    }

    fn descend_dim(&mut self, row: usize, dim: usize, idx: usize, partial: u64) {
        let s = self.inst.s();
        let n = self.inst.n();
        if dim == s {
            let w = self.inst.weights()[idx] as u64;
            self.descend_row(row + 1, partial + w);
            return;
        }
        let stride = self.inst.stride(dim);
        for v in 0..n {
            if self.used[dim][v] {
                continue;
            }
            self.used[dim][v] = true;
            self.row_coords[row][dim] = v as u32 + 1;
            self.descend_dim(row, dim + 1, idx + v * stride, partial);
            self.used[dim][v] = false;
        }
    }
}

/// Solution error relative to an optimum or reference value, in percent.
pub fn error_percent(value: f64, opt: f64) -> Result<f64> {
    if opt <= 0.0 {
        return Err(Error::UndefinedMetric(opt));
    }
    Ok((value - opt) / opt * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_planted, SplitMix64};
    use crate::heuristics::{greedy, max_regret, rom, shift_rom, DimensionRotation};
    use crate::instance::advance_coords;
    use crate::testutil::{desk_instance, random_instance, rotate_tensor};

    /// Unpruned exhaustive enumeration, independent of the solver's pruning
    /// and ordering: odometer over all value tuples for dimensions 2..s.
    fn exhaustive_minimum(inst: &Instance) -> u64 {
        let s = inst.s();
        let n = inst.n();
        let mut perms: Vec<Vec<u32>> = vec![vec![1u32; n]; s - 1];
        let mut best = u64::MAX;
        loop {
            // each dimension's tuple must itself be a permutation
            if perms.iter().all(|p| {
                let mut seen = vec![false; n];
                p.iter().all(|&v| {
                    let ok = !seen[v as usize - 1];
                    seen[v as usize - 1] = true;
                    ok
                })
            }) {
                let mut total = 0u64;
                for row in 0..n {
                    let mut coords = vec![row as u32 + 1];
                    for p in &perms {
                        coords.push(p[row]);
                    }
                    total += inst.weight(&Point::new(coords)).unwrap() as u64;
                }
                best = best.min(total);
            }
            // advance the outer odometer over all n^(n(s-1)) tuples
            let mut carried = true;
            for p in perms.iter_mut().rev() {
                if advance_coords(p, n) {
                    carried = false;
                    break;
                }
            }
            if carried {
                break;
            }
        }
        best
    }

    #[test]
    fn desk_instance_optimum() {
        let w = desk_instance();
        let (best, value) = brute_force(&w).unwrap();
        assert_eq!(value, 10);
        let mut rows: Vec<_> = best.rows().iter().map(|p| p.coords().to_vec()).collect();
        rows.sort();
        assert_eq!(rows, vec![vec![1, 1, 1], vec![2, 2, 2]]);
    }

    #[test]
    fn single_vector_optimum() {
        let inst = Instance::new(3, 1, vec![42]).unwrap();
        assert_eq!(brute_force(&inst).unwrap().1, 42);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::new(3, 3, vec![1; 27]).unwrap();
        let tiny = SearchBudget { max_leaves: 10 };
        assert!(matches!(
            brute_force_with(&inst, &tiny),
            Err(Error::BudgetExceeded { leaves: 36, .. })
        ));
    }

    #[test]
    fn matches_unpruned_enumeration() {
        let mut rng = SplitMix64::new(51);
        for trial in 0..50 {
            let n = 2 + trial % 4; // 2..=5; exhaustive_minimum is exponential in n
            let inst = random_instance(3, n, 30, &mut rng);
            let (_, pruned) = brute_force(&inst).unwrap();
            assert_eq!(pruned, exhaustive_minimum(&inst), "trial={trial}");
        }
    }

    #[test]
    fn planted_instances_have_optimum_n() {
        for i in 1..=5 {
            let planted = gen_planted(4, 4, i).unwrap();
            assert_eq!(brute_force(&planted.instance).unwrap().1, 4);
        }
    }

    #[test]
    fn heuristics_never_beat_the_optimum() {
        let mut rng = SplitMix64::new(52);
        for trial in 0..20 {
            let s = 2 + trial % 3;
            let n = 2 + trial % 3;
            let inst = random_instance(s, n, 50, &mut rng);
            let (_, opt) = brute_force(&inst).unwrap();
            for value in [
                greedy(&inst).objective(&inst).unwrap(),
                max_regret(&inst).objective(&inst).unwrap(),
                rom(&inst, DimensionRotation::identity()).objective(&inst).unwrap(),
                shift_rom(&inst).objective(&inst).unwrap(),
            ] {
                assert!(value >= opt);
            }
        }
    }

    #[test]
    fn optimum_is_rotation_invariant() {
        let mut rng = SplitMix64::new(53);
        for _ in 0..10 {
            let inst = random_instance(3, 4, 60, &mut rng);
            let (_, opt) = brute_force(&inst).unwrap();
            for shift in 0..3 {
                let rotated = rotate_tensor(&inst, shift);
                assert_eq!(brute_force(&rotated).unwrap().1, opt);
            }
        }
    }

    #[test]
    fn error_percent_examples() {
        assert!((error_percent(158.2, 100.0).unwrap() - 58.2).abs() < 1e-9);
        assert_eq!(error_percent(123.0, 123.0).unwrap(), 0.0);
        let e = error_percent(1617.6, 1608.0).unwrap();
        assert_eq!(format!("{e:.1}"), "0.6");
        assert!(matches!(
            error_percent(5.0, 0.0),
            Err(Error::UndefinedMetric(_))
        ));
    }
}
