//! Repair of TSP bit strings into valid tours.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::tsp::{Tour, TspInstance};
use crate::error::{Error, Result};
use crate::qubo::BinarySolution;

/// Turns any `n²` bit string into a tour, keeping the cities that `x`
/// places unambiguously.
///
/// 1. Positions whose row holds a single city take that city; those cities
///    become unavailable.
/// 2. Positions with several candidates pick one at random among the
///    still-available ones, in position order.
/// 3. A city claimed by several positions stays at one of them chosen at
///    random (cities in ascending order); the others are cleared.
/// 4. Empty positions receive the unused cities in random order.
///
/// A valid encoding comes back unchanged.
pub fn refine_tsp_solution<R: Rng + ?Sized>(
    x: &BinarySolution,
    inst: &TspInstance,
    rng: &mut R,
) -> Result<Tour> {
    let n = inst.n();
    if x.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            actual: x.len(),
        });
    }
    let candidates: Vec<Vec<usize>> = x
        .bits()
        .chunks(n)
        .map(|row| (0..n).filter(|&c| row[c] == 1).collect())
        .collect();

    let mut slot: Vec<Option<usize>> = vec![None; n];
    let mut fixed = vec![false; n];
    for (t, r) in candidates.iter().enumerate() {
        if let [c] = r[..] {
            slot[t] = Some(c);
            fixed[c] = true;
        }
    }
    for (t, r) in candidates.iter().enumerate() {
        if r.len() > 1 {
            let open: Vec<usize> = r.iter().copied().filter(|&c| !fixed[c]).collect();
            slot[t] = open.choose(rng).copied();
        }
    }

    for city in 0..n {
        let mut holders: Vec<usize> = (0..n).filter(|&t| slot[t] == Some(city)).collect();
        if holders.len() > 1 {
            holders.shuffle(rng);
            for &t in &holders[1..] {
                slot[t] = None;
            }
        }
    }

    let mut used = vec![false; n];
    for c in slot.iter().flatten() {
        used[*c] = true;
    }
    let mut spare: Vec<usize> = (0..n).filter(|&c| !used[c]).collect();
    spare.shuffle(rng);
    let mut spare = spare.into_iter();
    let order = slot
        .into_iter()
        .map(|s| s.unwrap_or_else(|| spare.next().expect("one spare city per empty slot")))
        .collect();
    Tour::new(order)
}
