//! Shared fixtures for the unit test suites.

use crate::generators::SplitMix64;
use crate::instance::{advance_coords, Instance};

/// 2x2x2 desk instance; the four full assignments cost 10, 13, 12 and 11,
/// so the optimum is {(1,1,1),(2,2,2)} with objective 10.
pub(crate) fn desk_instance() -> Instance {
    Instance::new(3, 2, vec![1, 9, 9, 2, 9, 3, 4, 9]).unwrap()
}

/// Random instance with weights in [1, max_weight], for tests that need
/// arbitrary tensors outside the seeded generator families.
pub(crate) fn random_instance(s: usize, n: usize, max_weight: u32, rng: &mut SplitMix64) -> Instance {
    Instance::from_fn(s, n, |_| rng.next_below(max_weight as u64) as u32 + 1).unwrap()
}

/// Relabels the tensor so that new dimension `p` carries old dimension
/// `(p + s - shift) % s`, i.e. the cyclic order ROM sees under that shift.
pub(crate) fn rotate_tensor(inst: &Instance, shift: usize) -> Instance {
    let s = inst.s();
    let n = inst.n();
    let dim_of_pos: Vec<usize> = (0..s).map(|p| (p + s - shift) % s).collect();
    let mut rotated = vec![0u32; inst.num_vectors()];
    let mut coords = vec![1u32; s]; // rotated-space coordinates
    let mut idx = 0usize;
    loop {
        let mut orig = vec![0u32; s];
        for p in 0..s {
            orig[dim_of_pos[p]] = coords[p];
        }
        rotated[idx] = inst.weight(&crate::instance::Point::new(orig)).unwrap();
        idx += 1;
        if !advance_coords(&mut coords, n) {
            break;
        }
    }
    Instance::new(s, n, rotated).unwrap()
}
