//! Heat semigroup as a Gauss–Hermite mixture of displacements.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{real_displacement_block, rotate_displacement};
use crate::linalg::{identity, CMat};
use crate::special::gauss_hermite;

/// Kraus operators `sqrt(w_ij) D(sqrt(t) (x_i + i x_j))` on a tensor Gauss–Hermite grid,
/// weights normalized to sum to one. Also returns the weight-averaged displacement defect.
pub(crate) fn heat_kraus(t: f64, order: usize, dim_in: usize, dim_out: usize, guard: usize) -> Result<(Vec<CMat>, f64)> {
    if t == 0.0 {
        let mut k = CMat::zeros(dim_out, dim_in);
        let n = dim_in.min(dim_out);
        k.view_mut((0, 0), (n, n)).copy_from(&identity(n));
        return Ok((vec![k], 0.0));
    }
    let (nodes, weights) = gauss_hermite(order);
    let total: f64 = weights.iter().map(|a| weights.iter().map(|b| a * b).sum::<f64>()).sum();
    let guard_dim = guard.max(1) * dim_in.max(dim_out);
    let mut cache: HashMap<u64, (CMat, f64)> = HashMap::new();
    let mut kraus = Vec::with_capacity(order * order);
    let mut defect = 0.0;
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            let w = weights[i] * weights[j] / total;
            let z = Complex64::new(x, y) * t.sqrt();
            let r = z.norm();
            if let Entry::Vacant(slot) = cache.entry(r.to_bits()) {
                let (block, d) = real_displacement_block(r, dim_in, dim_out, guard_dim)?;
                slot.insert((block, d.worst()));
            }
            let (block, d) = &cache[&r.to_bits()];
            defect += w * d;
            kraus.push(rotate_displacement(block, z.arg()).scale(w.sqrt()));
        }
    }
    Ok((kraus, defect))
}
