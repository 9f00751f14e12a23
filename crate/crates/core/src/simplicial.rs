//! The sorting functional μ, its difference operator δ, barycentric region
//! decomposition, cover clumping and multiplicity-preserving thickening —
//! finite-discrete versions throughout.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coarse::{multiplicity, Cover, Member, Subset};
use crate::error::{Error, Result};
use crate::rational;

/// A finitely supported nonnegative rational function on an arbitrary string
/// index set. Stored entries are strictly positive (canonical sparse form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSupportFn {
    values: BTreeMap<String, BigRational>,
}

// wire form: {"values": {"key": "p/q"}}
impl Serialize for FinSupportFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            values: BTreeMap<&'a str, String>,
        }
        let values = self
            .values
            .iter()
            .map(|(k, v)| (k.as_str(), rational::render(v)))
            .collect();
        Wire { values }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSupportFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            values: BTreeMap<String, String>,
        }
        let wire = Wire::deserialize(d)?;
        let values = wire
            .values
            .into_iter()
            .map(|(k, v)| Ok((k, rational::parse(&v).map_err(D::Error::custom)?)))
            .collect::<std::result::Result<_, D::Error>>()?;
        FinSupportFn::new(values).map_err(D::Error::custom)
    }
}

impl FinSupportFn {
    /// Drops zero entries; rejects negative ones.
    pub fn new(values: BTreeMap<String, BigRational>) -> Result<Self> {
        for (k, v) in &values {
            if v.is_negative() {
                return Err(Error::Argument(format!("negative value at key {k:?}")));
            }
        }
        Ok(FinSupportFn {
            values: values.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        })
    }

    pub fn zero() -> Self {
        FinSupportFn { values: BTreeMap::new() }
    }

    pub fn get(&self, key: &str) -> BigRational {
        self.values.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> BTreeSet<&str> {
        self.values.keys().map(|k| k.as_str()).collect()
    }

    pub fn support_size(&self) -> usize {
        self.values.len()
    }

    /// ‖ξ‖_∞.
    pub fn sup_norm(&self) -> BigRational {
        self.values.values().cloned().max().unwrap_or_else(BigRational::zero)
    }

    /// Σ_s ξ(s).
    pub fn mass(&self) -> BigRational {
        self.values.values().sum()
    }

    /// ‖ξ − η‖_∞ over the union of supports.
    pub fn sup_dist(&self, other: &FinSupportFn) -> BigRational {
        let keys: BTreeSet<&String> =
            self.values.keys().chain(other.values.keys()).collect();
        keys.into_iter()
            .map(|k| (self.get(k) - other.get(k)).abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Values sorted in nonincreasing order.
    fn sorted_desc(&self) -> Vec<BigRational> {
        let mut v: Vec<BigRational> = self.values.values().cloned().collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    }
}

/// μ^(l)(ξ): the (l+1)-th largest value counting repetitions, 0 once l
/// reaches the support size.
pub fn mu(l: usize, xi: &FinSupportFn) -> BigRational {
    xi.sorted_desc().into_iter().nth(l).unwrap_or_else(BigRational::zero)
}

/// δ(ξ) as the vector (μ^(l) − μ^(l+1))_{l = 0..|supp ξ|−1}.
pub fn delta(xi: &FinSupportFn) -> Vec<BigRational> {
    let sorted = xi.sorted_desc();
    let n = sorted.len();
    (0..n)
        .map(|l| {
            let next = if l + 1 < n { sorted[l + 1].clone() } else { BigRational::zero() };
            &sorted[l] - next
        })
        .collect()
}

/// δ_l(ξ).
pub fn delta_l(l: usize, xi: &FinSupportFn) -> BigRational {
    mu(l, xi) - mu(l + 1, xi)
}

/// ξ ∈ c00^{(l,ε)} iff δ_l(ξ) > ε.
pub fn region_l(xi: &FinSupportFn, l: usize, eps: &BigRational) -> bool {
    delta_l(l, xi) > *eps
}

/// ξ ∈ c00^{F,ε} iff inf ξ(F) > ε + sup(ξ(S∖F) ∪ {0}).
pub fn region_f(xi: &FinSupportFn, f: &BTreeSet<String>, eps: &BigRational) -> Result<bool> {
    if f.is_empty() {
        return Err(Error::Argument("region index set F must be nonempty".into()));
    }
    let inf = f.iter().map(|k| xi.get(k)).min().unwrap();
    let sup = xi
        .values
        .iter()
        .filter(|(k, _)| !f.contains(*k))
        .map(|(_, v)| v.clone())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(inf > eps + sup)
}

/// The top-(l+1) value set {s : ξ(s) > μ^(l+1)(ξ)}; this is the unique F of
/// size l+1 with ξ ∈ c00^{F,ε} whenever ξ ∈ c00^{(l,ε)}.
pub fn top_set(xi: &FinSupportFn, l: usize) -> BTreeSet<String> {
    let cut = mu(l + 1, xi);
    xi.values
        .iter()
        .filter(|(_, v)| **v > cut)
        .map(|(k, _)| k.clone())
        .collect()
}

/// The equal-weight membership profile of x under Θ: weight 1/#{members ∋ x}
/// on each member containing x, zero off ⋃Θ.
fn membership_profile(theta: &Cover, x: usize) -> Result<FinSupportFn> {
    let containing: Vec<&Member> =
        theta.members.iter().filter(|m| m.points.contains(&x)).collect();
    if containing.is_empty() {
        return Ok(FinSupportFn::zero());
    }
    let w = BigRational::new(1.into(), (containing.len() as i64).into());
    FinSupportFn::new(
        containing.iter().map(|m| (m.name.clone(), w.clone())).collect(),
    )
}

/// Clumps a cover: returns the partition of ⋃Θ into the nonempty regions
/// f^{-1}(c00^{F,0}) of the equal-weight normalized indicator partition of
/// unity. Guarantees K ⊆ ⋃A and that any subfamily of A with a common point
/// has its union inside a single Θ member. Empty regions are dropped.
pub fn cover_clumping(size: usize, k: &Subset, theta: &Cover) -> Result<Cover> {
    if theta.size != size {
        return Err(Error::Structure("cover/base size mismatch".into()));
    }
    if theta.members.len() > 1 << 16 {
        return Err(Error::Capability("clumping limited to |Θ| <= 65536".into()));
    }
    if !theta.covers(k) {
        let missing = k.iter().find(|x| !theta.union().contains(x)).unwrap();
        return Err(Error::Precondition(format!("K point {missing} not covered by Θ")));
    }
    let zero = BigRational::zero();
    // Only profiles that actually occur can have nonempty regions.
    let mut cells: BTreeMap<BTreeSet<String>, Subset> = BTreeMap::new();
    for x in 0..size {
        let profile = membership_profile(theta, x)?;
        if profile.support_size() == 0 {
            continue;
        }
        let candidate: BTreeSet<String> =
            profile.support().into_iter().map(str::to_string).collect();
        debug_assert!(region_f(&profile, &candidate, &zero)?);
        cells.entry(candidate).or_default().insert(x);
    }
    let members = cells
        .into_iter()
        .map(|(f, points)| Member {
            name: format!("F[{}]", f.iter().join(",")),
            points,
            color: None,
        })
        .collect();
    Cover::new(size, members)
}

/// Thickens K_1..K_n to supersets U_1..U_n with the same multiplicity:
/// clump the family A_F = X ∖ ⋃_{j ∉ F} K_j over |F| ≤ mult, then take U_i =
/// union of clump members meeting K_i.
pub fn thicken_multiplicity(size: usize, ks: &[Subset]) -> Result<Vec<Subset>> {
    if ks.len() > 16 {
        return Err(Error::Capability("thickening limited to 16 sets".into()));
    }
    if ks.is_empty() {
        return Ok(Vec::new());
    }
    let kcover = Cover::from_subsets(
        size,
        ks.iter().filter(|s| !s.is_empty()).cloned().collect(),
    )?;
    let m = multiplicity(&kcover).max(1);
    let all: Subset = (0..size).collect();
    let mut members = Vec::new();
    for f in (0..ks.len()).powerset().filter(|f| f.len() <= m) {
        let fset: BTreeSet<usize> = f.iter().cloned().collect();
        let mut a = all.clone();
        for (j, kj) in ks.iter().enumerate() {
            if !fset.contains(&j) {
                a = a.difference(kj).cloned().collect();
            }
        }
        if !a.is_empty() {
            members.push(Member { name: format!("A{fset:?}"), points: a, color: None });
        }
    }
    let theta = Cover::new(size, members)?;
    let clumped = cover_clumping(size, &all, &theta)?;
    let mut out = Vec::new();
    for ki in ks {
        let u: Subset = clumped
            .members
            .iter()
            .filter(|c| c.points.intersection(ki).next().is_some())
            .flat_map(|c| c.points.iter().cloned())
            .collect();
        out.push(u);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use proptest::prelude::*;

    fn fsf(pairs: &[(&str, (i64, i64))]) -> FinSupportFn {
        FinSupportFn::new(
            pairs
                .iter()
                .map(|(k, (p, q))| (k.to_string(), rat(*p, *q)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mu_examples() {
        let xi = fsf(&[("a", (9, 10)), ("b", (1, 2)), ("c", (1, 2))]);
        assert_eq!(mu(0, &xi), rat(9, 10));
        assert_eq!(mu(1, &xi), rat(1, 2));
        assert_eq!(mu(3, &xi), rat_int(0));
        assert_eq!(mu(5, &FinSupportFn::zero()), rat_int(0));
        let eq = fsf(&[("a", (1, 3)), ("b", (1, 3))]);
        assert_eq!(mu(0, &eq), rat(1, 3));
        assert_eq!(mu(1, &eq), rat(1, 3));
        assert_eq!(mu(2, &eq), rat_int(0));
    }

    #[test]
    fn delta_examples() {
        let xi = fsf(&[("a", (9, 10)), ("b", (1, 2)), ("c", (1, 2))]);
        assert_eq!(delta(&xi), vec![rat(2, 5), rat_int(0), rat(1, 2)]);
        let single = fsf(&[("a", (3, 4))]);
        assert_eq!(delta(&single), vec![rat(3, 4)]);
        // exact telescoping Σ_{k≥l} δ_k = μ^(l)
        for l in 0..4 {
            let tail: BigRational = delta(&xi).into_iter().skip(l).sum();
            assert_eq!(tail, mu(l, &xi));
        }
    }

    #[test]
    fn region_examples() {
        let xi = fsf(&[("a", (9, 10)), ("b", (1, 2)), ("c", (1, 2))]);
        assert!(region_l(&xi, 0, &rat(1, 4)));
        assert!(!region_l(&xi, 1, &rat(1, 4)));
        let f: BTreeSet<String> = ["a".to_string()].into();
        assert!(region_f(&xi, &f, &rat(1, 4)).unwrap());
        assert!(!region_f(&FinSupportFn::zero(), &f, &rat_int(0)).unwrap());
        assert!(region_f(&xi, &BTreeSet::new(), &rat_int(0)).is_err());
    }

    #[test]
    fn clumping_two_overlapping_intervals() {
        let theta = Cover::new(
            10,
            vec![
                Member { name: "P".into(), points: (0..6).collect(), color: None },
                Member { name: "Q".into(), points: (4..10).collect(), color: None },
            ],
        )
        .unwrap();
        let k: Subset = (0..10).collect();
        let a = cover_clumping(10, &k, &theta).unwrap();
        assert_clumping_guarantee(&a, &k, &theta);
        assert_eq!(a.members.len(), 3);
    }

    #[test]
    fn clumping_disjoint_and_point() {
        let theta = Cover::from_subsets(6, vec![(0..3).collect(), (3..6).collect()]).unwrap();
        let all: Subset = (0..6).collect();
        let a = cover_clumping(6, &all, &theta).unwrap();
        assert_eq!(a.members.len(), 2);
        assert_clumping_guarantee(&a, &all, &theta);
        let single: Subset = [2].into();
        let b = cover_clumping(6, &single, &theta).unwrap();
        assert!(b.members.iter().any(|m| m.points.contains(&2)));
        // K not covered is an error
        let theta_small =
            Cover::from_subsets(6, vec![(0..2).collect()]).unwrap();
        assert!(cover_clumping(6, &all, &theta_small).is_err());
    }

    fn assert_clumping_guarantee(a: &Cover, k: &Subset, theta: &Cover) {
        assert!(a.covers(k));
        // every subfamily with a common point lands inside one Θ member
        let n = a.members.len();
        for mask in 1u32..(1 << n) {
            let chosen: Vec<&Member> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &a.members[i])
                .collect();
            let mut common: Subset = chosen[0].points.clone();
            for m in &chosen[1..] {
                common = common.intersection(&m.points).cloned().collect();
            }
            if common.is_empty() {
                continue;
            }
            let union: Subset =
                chosen.iter().flat_map(|m| m.points.iter().cloned()).collect();
            assert!(
                theta.members.iter().any(|t| union.is_subset(&t.points)),
                "subfamily union not inside any Θ member"
            );
        }
    }

    #[test]
    fn clumping_exhaustive_small_covers() {
        // all covers with up to 3 members on 5 points, exhaustively
        let n = 5usize;
        let subsets: Vec<Subset> = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        let mut checked = 0usize;
        for a in 0..subsets.len() {
            for b in a..subsets.len() {
                for c in b..subsets.len() {
                    let theta = Cover::from_subsets(
                        n,
                        vec![subsets[a].clone(), subsets[b].clone(), subsets[c].clone()],
                    )
                    .unwrap();
                    let k = theta.union();
                    let out = cover_clumping(n, &k, &theta).unwrap();
                    assert_clumping_guarantee(&out, &k, &theta);
                    checked += 1;
                }
            }
        }
        assert!(checked > 4000);
    }

    #[test]
    fn thicken_examples() {
        // disjoint inputs stay disjoint
        let ks: Vec<Subset> = vec![(0..3).collect(), (5..8).collect()];
        let us = thicken_multiplicity(10, &ks).unwrap();
        assert!(us[0].intersection(&us[1]).next().is_none());
        for (k, u) in ks.iter().zip(&us) {
            assert!(k.is_subset(u));
        }
        // nested pair keeps multiplicity 2
        let ks2: Vec<Subset> = vec![(2..4).collect(), (1..6).collect()];
        let us2 = thicken_multiplicity(8, &ks2).unwrap();
        let mult2 = multiplicity(&Cover::from_subsets(8, us2.clone()).unwrap());
        assert_eq!(mult2, 2);
        for (k, u) in ks2.iter().zip(&us2) {
            assert!(k.is_subset(u));
        }
        // single set
        let us3 = thicken_multiplicity(6, &[(1..3).collect()]).unwrap();
        assert!((1..3).collect::<Subset>().is_subset(&us3[0]));
        assert_eq!(multiplicity(&Cover::from_subsets(6, us3).unwrap()), 1);
    }

    fn arb_fsf(max_keys: usize) -> impl Strategy<Value = FinSupportFn> {
        proptest::collection::btree_map(
            (0..max_keys).prop_map(|i| format!("k{i}")),
            (0i64..=6, 1i64..=5).prop_map(|(p, q)| rat(p, q)),
            0..max_keys,
        )
        .prop_map(|m| FinSupportFn::new(m).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn lipschitz_bounds(xi in arb_fsf(6), eta in arb_fsf(6), l in 0usize..6) {
            let d = xi.sup_dist(&eta);
            prop_assert!((mu(l, &xi) - mu(l, &eta)).abs() <= d);
            prop_assert!((delta_l(l, &xi) - delta_l(l, &eta)).abs() <= rat_int(2) * &d);
        }

        #[test]
        fn mass_and_telescoping(xi in arb_fsf(7)) {
            let ds = delta(&xi);
            let n = xi.support_size();
            // mass identity
            let mu_sum: BigRational = (0..n).map(|l| mu(l, &xi)).sum();
            prop_assert_eq!(xi.mass(), mu_sum);
            // telescoping at every level
            for l in 0..=n {
                let tail: BigRational = ds.iter().skip(l).cloned().sum();
                prop_assert_eq!(tail, mu(l, &xi));
            }
            // norm sandwich
            let dnorm = ds.iter().cloned().max().unwrap_or_else(BigRational::zero);
            let dsupp = ds.iter().filter(|v| !v.is_zero()).count();
            prop_assert!(dnorm <= xi.sup_norm());
            prop_assert!(xi.sup_norm() <= rat_int(dsupp as i64) * &dnorm);
        }

        #[test]
        fn region_partition(xi in arb_fsf(6), l in 0usize..6, en in 0i64..3) {
            let eps = rat(en, 4);
            prop_assume!(region_l(&xi, l, &eps));
            // exactly one F of size l+1 qualifies: the top-(l+1) set
            let keys: Vec<String> = (0..7).map(|i| format!("k{i}")).collect();
            let mut hits = Vec::new();
            for f in keys.iter().cloned().combinations(l + 1) {
                let fset: BTreeSet<String> = f.into_iter().collect();
                if region_f(&xi, &fset, &eps).unwrap() {
                    hits.push(fset);
                }
            }
            prop_assert_eq!(hits.len(), 1);
            prop_assert_eq!(hits.pop().unwrap(), top_set(&xi, l));
        }

        #[test]
        fn region_existence(xi in arb_fsf(6)) {
            prop_assume!(xi.support_size() > 0);
            let n = xi.support_size();
            let eps = xi.sup_norm() / rat_int(n as i64) / rat_int(2);
            let found = (0..n).any(|l| region_l(&xi, l, &eps));
            prop_assert!(found);
        }

        #[test]
        fn region_stability(xi in arb_fsf(5), eta in arb_fsf(5), en in 0i64..3) {
            let eps = rat(en, 4);
            let r = xi.sup_dist(&eta);
            let wide = &eps + rat_int(2) * &r;
            let support: Vec<String> = xi.support().into_iter().map(str::to_string).collect();
            for f in support.iter().cloned().powerset().filter(|f| !f.is_empty()) {
                let fset: BTreeSet<String> = f.into_iter().collect();
                if region_f(&xi, &fset, &wide).unwrap() {
                    prop_assert!(region_f(&eta, &fset, &eps).unwrap());
                }
            }
        }

        #[test]
        fn thicken_preserves_multiplicity(
            size in 4usize..10,
            ks in proptest::collection::vec(
                proptest::collection::btree_set(0usize..10, 0..6), 1..5),
        ) {
            let ks: Vec<Subset> = ks
                .into_iter()
                .map(|s| s.into_iter().filter(|&x| x < size).collect())
                .collect();
            prop_assume!(ks.iter().any(|s: &Subset| !s.is_empty()));
            let nonempty: Vec<Subset> = ks.iter().filter(|s| !s.is_empty()).cloned().collect();
            let before = multiplicity(&Cover::from_subsets(size, nonempty).unwrap());
            let us = thicken_multiplicity(size, &ks).unwrap();
            for (k, u) in ks.iter().zip(&us) {
                prop_assert!(k.is_subset(u));
            }
            let after_sets: Vec<Subset> = us.into_iter().filter(|s| !s.is_empty()).collect();
            let after = multiplicity(&Cover::from_subsets(size, after_sets).unwrap());
            prop_assert_eq!(after, before);
        }
    }
}
