//! Weighted projective space singularities and finite cone-point models.

use num_integer::Integer;

use crate::error::{input_err, Result};
use crate::fingrp::FiniteGroup;
use crate::gpd::{action_groupoid, disjoint_union, GroupAction, Groupoid};

/// Weights `(a₀, …, a_n)` of the circle action `λ·z = (λ^{a₀} z₀, …)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(input_err!("weight vector is empty"));
        }
        if weights.contains(&0) {
            return Err(input_err!("weights must be positive"));
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Coordinates that are nonzero on a stratum, with its cyclic local group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub support: Vec<usize>,
    pub order: u64,
    /// Smaller supports with the same local group, folded into this one.
    pub merged: Vec<Vec<usize>>,
}

pub fn wps_effective(w: &WeightVector) -> bool {
    w.0.iter().fold(0, |g, &a| g.gcd(&a)) == 1
}

/// Order of the stabilizer of a point whose nonzero coordinates are exactly
/// `support`: `λ` fixes it iff `λ^{a_i} = 1` on the support.
pub fn wps_isotropy(w: &WeightVector, support: &[usize]) -> Result<u64> {
    if support.is_empty() {
        return Err(input_err!("support is empty"));
    }
    support.iter().try_fold(0u64, |g, &i| {
        w.0.get(i).map(|a| g.gcd(a)).ok_or_else(|| input_err!("coordinate {i} out of range for {} weights", w.len()))
    })
}

/// Supports with nontrivial local group, keeping only those with no strict
/// superset of the same order. Largest supports come first, ties in
/// lexicographic order.
pub fn wps_strata(w: &WeightVector) -> Vec<Stratum> {
    let n = w.len();
    assert!(n < 32, "too many weights for subset enumeration");
    let order_of = |mask: u32| (0..n).filter(|i| mask >> i & 1 == 1).fold(0u64, |g, i| g.gcd(&w.0[i]));
    let supports = |mask: u32| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
    let masks: Vec<u32> = (1u32..1 << n).filter(|&m| order_of(m) > 1).collect();
    let mut strata: Vec<(u32, Stratum)> = masks
        .iter()
        .filter(|&&m| !masks.iter().any(|&s| s != m && s & m == m && order_of(s) == order_of(m)))
        .map(|&m| (m, Stratum { support: supports(m), order: order_of(m), merged: Vec::new() }))
        .collect();
    for &m in &masks {
        // fold each non-maximal support into its least maximal superset of equal order
        if let Some((_, st)) = strata.iter_mut().find(|(s, st)| *s != m && s & m == m && st.order == order_of(m)) {
            st.merged.push(supports(m));
        }
    }
    let mut out: Vec<Stratum> = strata.into_iter().map(|(_, s)| s).collect();
    out.sort_by(|a, b| b.support.len().cmp(&a.support.len()).then_with(|| a.support.cmp(&b.support)));
    for s in &mut out {
        s.merged.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    }
    out
}

/// `Z_n` rotating the points `0..n` and fixing the cone point `n`.
pub fn cone_point_model(n: usize) -> Result<GroupAction> {
    let group = FiniteGroup::cyclic(n)?;
    let table: Vec<Vec<usize>> = group.elements().map(|g| (0..n).map(|x| (x + g) % n).chain([n]).collect()).collect();
    GroupAction::new(group, n + 1, &table)
}

/// Cone points of the given orders joined through one free orbit: the pair
/// groupoid on `Σ nᵢ` objects followed by `pt // Z_{nᵢ}` for each `i`.
pub fn multi_cone_model(orders: &[usize]) -> Result<Groupoid> {
    if orders.is_empty() {
        return Err(input_err!("no cone orders given"));
    }
    let free = Groupoid::pair_groupoid(orders.iter().sum());
    let points = orders
        .iter()
        .map(|&n| Ok(action_groupoid(&GroupAction::trivial(FiniteGroup::cyclic(n)?, 1))))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<&Groupoid> = std::iter::once(&free).chain(&points).collect();
    Ok(disjoint_union(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmor::morita_signature;
    use crate::gpd::orbits_and_isotropy;
    use crate::inertia::inertia_orbit_count;
    use std::sync::Arc;

    fn w(v: &[u64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn weighted_projective_line_23() {
        let w23 = w(&[2, 3]);
        assert!(wps_effective(&w23));
        assert_eq!(wps_isotropy(&w23, &[0, 1]).unwrap(), 1);
        assert_eq!(wps_isotropy(&w23, &[0]).unwrap(), 2);
        assert_eq!(wps_isotropy(&w23, &[1]).unwrap(), 3);
        let strata = wps_strata(&w23);
        assert_eq!(
            strata.iter().map(|s| (s.support.clone(), s.order)).collect::<Vec<_>>(),
            vec![(vec![0], 2), (vec![1], 3)]
        );
        assert!(wps_isotropy(&w23, &[]).is_err());
    }

    #[test]
    fn strata_examples() {
        assert!(!wps_effective(&w(&[2, 4])));
        assert!(wps_effective(&w(&[1])));
        assert!(wps_strata(&w(&[1, 1, 1])).is_empty());
        let s = wps_strata(&w(&[2, 2, 3]));
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].support.clone(), s[0].order), (vec![0, 1], 2));
        assert_eq!(s[0].merged, vec![vec![0], vec![1]]);
        assert_eq!((s[1].support.clone(), s[1].order), (vec![2], 3));
        let s = wps_strata(&w(&[2, 4]));
        assert_eq!(s[0].support, vec![0, 1]);
        assert_eq!(s[0].order, 2);
        assert_eq!(s[1].support, vec![1]);
        assert_eq!(s[1].order, 4);
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![0, 1]).is_err());
    }

    #[test]
    fn cone_models() {
        let c3 = Arc::new(action_groupoid(&cone_point_model(3).unwrap()));
        assert_eq!(orbits_and_isotropy(&c3).isotropy_orders(), vec![1, 3]);
        assert_eq!(inertia_orbit_count(&c3), 4);
        let c1 = Arc::new(action_groupoid(&cone_point_model(1).unwrap()));
        assert_eq!(orbits_and_isotropy(&c1).isotropy_orders(), vec![1, 1]);
        assert_eq!(inertia_orbit_count(&c1), 2);
        let c2 = action_groupoid(&cone_point_model(2).unwrap());
        assert_eq!(morita_signature(&c2).unwrap().labels(), vec!["trivial".to_string(), "Z2".to_string()]);
    }

    #[test]
    fn double_cone() {
        let m = Arc::new(multi_cone_model(&[2, 3]).unwrap());
        assert_eq!(orbits_and_isotropy(&m).isotropy_orders(), vec![1, 2, 3]);
        assert_eq!(inertia_orbit_count(&m), 3 + 1 + 2);
        let single = Arc::new(multi_cone_model(&[1]).unwrap());
        assert_eq!(inertia_orbit_count(&single), 2);
        let m3 = multi_cone_model(&[3]).unwrap();
        let c3 = action_groupoid(&cone_point_model(3).unwrap());
        assert!(morita_signature(&m3).unwrap().same_as(&morita_signature(&c3).unwrap()).unwrap());
        assert!(multi_cone_model(&[]).is_err());
    }
}
