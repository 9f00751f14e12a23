//! Staircase smoothing of scalar fields, invariance defects, greedy
//! B-discrete covers, and the constructive orbit partition of unity.
//!
//! All arithmetic is exact rational; the unity identity is asserted as an
//! identity, never within a tolerance.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coarse::{Cover, Entourage, Member, Subset};
use crate::dynamics::FiniteAction;
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::rational;
use crate::report::{Check, Report};

/// An exact-rational-valued function on a finite point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarField {
    pub values: Vec<BigRational>,
}

impl ScalarField {
    pub fn zero(n: usize) -> Self {
        ScalarField { values: vec![BigRational::zero(); n] }
    }

    pub fn constant(n: usize, v: BigRational) -> Self {
        ScalarField { values: vec![v; n] }
    }

    pub fn indicator(n: usize, a: &Subset) -> Self {
        ScalarField {
            values: (0..n)
                .map(|x| if a.contains(&x) { BigRational::one() } else { BigRational::zero() })
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn support(&self) -> Subset {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn in_unit_interval(&self) -> bool {
        self.values
            .iter()
            .all(|v| !v.is_negative() && *v <= BigRational::one())
    }

    /// sup |f|.
    pub fn sup_abs(&self) -> BigRational {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        ScalarField {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Serialize for ScalarField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.values.iter().map(rational::render).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings: Vec<String> = Vec::deserialize(d)?;
        let values = strings
            .iter()
            .map(|s| rational::parse(s).map_err(D::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        Ok(ScalarField { values })
    }
}

fn require_symmetric_with_identity(
    a: &FiniteAction,
    l: &BTreeSet<GroupElement>,
    who: &str,
) -> Result<()> {
    if !l.contains(&a.spec.identity()) {
        return Err(Error::Argument(format!("{who} must contain the identity")));
    }
    for g in l {
        if !l.contains(&a.spec.inv(g)?) {
            return Err(Error::Argument(format!("{who} must be symmetric")));
        }
    }
    Ok(())
}

/// Staircase majorant Ξ_{L,N}(f)(x) = max over k ∈ {0..N}, g ∈ L^k of
/// f(α_{g^{-1}} x) − k/N. Since e ∈ L and L is symmetric this is the maximum
/// over y within L-step distance k of f(y) − k/N.
pub fn staircase(
    a: &FiniteAction,
    f: &ScalarField,
    l: &BTreeSet<GroupElement>,
    n: u32,
) -> Result<ScalarField> {
    if n == 0 {
        return Err(Error::Argument("staircase step count must be positive".into()));
    }
    require_symmetric_with_identity(a, l, "staircase L")?;
    if f.size() != a.base.size {
        return Err(Error::Structure("field/base size mismatch".into()));
    }
    if !f.in_unit_interval() {
        return Err(Error::Argument("staircase input must take values in [0,1]".into()));
    }
    let perms: Vec<Vec<usize>> = l.iter().map(|g| a.perm(g)).collect::<Result<_>>()?;
    let n_rat = rational::rat_int(n as i64);
    let mut out = Vec::with_capacity(f.size());
    for x in 0..f.size() {
        // distances from x by L-steps, capped at N
        let mut dist: BTreeMap<usize, u32> = BTreeMap::new();
        dist.insert(x, 0);
        let mut frontier = vec![x];
        for k in 1..=n {
            let mut next = Vec::new();
            for &v in &frontier {
                for p in &perms {
                    let w = p[v];
                    if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                        e.insert(k);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        let best = dist
            .iter()
            .map(|(&y, &k)| &f.values[y] - rational::rat_int(k as i64) / &n_rat)
            .max()
            .unwrap();
        out.push(if best.is_negative() { BigRational::zero() } else { best });
    }
    Ok(ScalarField { values: out })
}

/// max over g ∈ L, x of |f(x) − f(α_{g^{-1}} x)|.
pub fn invariance_defect(
    a: &FiniteAction,
    f: &ScalarField,
    l: &BTreeSet<GroupElement>,
) -> Result<BigRational> {
    let mut best = BigRational::zero();
    for g in l {
        let p = a.perm(&a.spec.inv(g)?)?;
        for x in 0..f.size() {
            let d = (&f.values[x] - &f.values[p[x]]).abs();
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Greedy maximal B-discrete subset D of K (ids ascending; x joins D when no
/// earlier member of D lies in α_B(x)), and the induced cover
/// {α_{LB}(y) : y ∈ D}. Every x ∈ K then has α_L(x) inside some member.
pub fn greedy_bdiscrete_cover(
    a: &FiniteAction,
    k: &Subset,
    l: &BTreeSet<GroupElement>,
    b: &BTreeSet<GroupElement>,
) -> Result<(Subset, Cover)> {
    require_symmetric_with_identity(a, b, "B")?;
    for g in l {
        if !l.contains(&a.spec.inv(g)?) {
            return Err(Error::Argument("L must be symmetric".into()));
        }
    }
    let mut d: Subset = BTreeSet::new();
    for &x in k {
        let near = a.orbit_set(x, b)?;
        if near.iter().all(|y| !d.contains(y)) {
            d.insert(x);
        }
    }
    let lb = a.spec.set_product(l, b)?;
    let mut members = Vec::new();
    for &y in &d {
        members.push(Member {
            name: format!("C{y}"),
            points: a.orbit_set(y, &lb)?,
            color: None,
        });
    }
    let cover = Cover::new(a.base.size, members)?;
    Ok((d, cover))
}

/// Merges cover members along closeness (a shared point or a cross pair of E
/// ∪ E^{-1}) until the members are pairwise E-separated; merged members get
/// color 0. On a bounded space this may degenerate to one member.
pub fn merge_until_separated(cover: &Cover, e: &Entourage) -> Result<Cover> {
    let m = cover.members.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let sym = e.symmetrized_reflexive();
    loop {
        let mut merged_any = false;
        let mut groups: BTreeMap<usize, Subset> = BTreeMap::new();
        for i in 0..m {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().extend(cover.members[i].points.iter());
        }
        let keys: Vec<usize> = groups.keys().cloned().collect();
        'pairs: for (ai, &ka) in keys.iter().enumerate() {
            for &kb in keys.iter().skip(ai + 1) {
                let (ga, gb) = (&groups[&ka], &groups[&kb]);
                let close = ga
                    .iter()
                    .any(|&x| gb.iter().any(|&y| x == y || sym.contains(x, y)));
                if close {
                    let (ra, rb) = (find(&mut parent, ka), find(&mut parent, kb));
                    parent[ra] = rb;
                    merged_any = true;
                    break 'pairs;
                }
            }
        }
        if !merged_any {
            let members = groups
                .into_values()
                .enumerate()
                .map(|(i, points)| Member { name: format!("M{i}"), points, color: Some(0) })
                .collect();
            return Cover::new(cover.size, members);
        }
    }
}

/// One colored member of a partition of unity with its exact field.
#[derive(Debug, Clone)]
pub struct PouEntry {
    pub name: String,
    pub member: Subset,
    pub field: ScalarField,
}

/// Colored disjoint families of subsets with subordinate exact fields
/// summing to one on K.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub colors: Vec<Vec<PouEntry>>,
    pub k: Subset,
    pub l: BTreeSet<GroupElement>,
    pub b: BTreeSet<GroupElement>,
    pub epsilon: BigRational,
    pub n: u32,
}

impl PartitionOfUnity {
    pub fn total_field(&self, size: usize) -> ScalarField {
        let mut total = ScalarField::zero(size);
        for color in &self.colors {
            for entry in color {
                total = total.add(&entry.field);
            }
        }
        total
    }
}

/// Builds the orbit partition of unity from a colored witness cover whose
/// colors are E_{K,L^{2N}}-separated, N = ⌈(d+2)/ε⌉: per member A, the
/// staircase h_A of the indicator of A ∩ K, normalized by max{1, Σ h}. The
/// supplied `bprime` must bound every A ∩ K; the output is bounded by
/// B = L^N (B' ∪ {e}) L^N.
pub fn build_orbit_pou(
    a: &FiniteAction,
    k: &Subset,
    l: &BTreeSet<GroupElement>,
    epsilon: &BigRational,
    witness: &Cover,
    bprime: &BTreeSet<GroupElement>,
) -> Result<PartitionOfUnity> {
    require_symmetric_with_identity(a, l, "L")?;
    if !epsilon.is_positive() {
        return Err(Error::Argument("epsilon must be positive".into()));
    }
    let mut d = 0usize;
    for m in &witness.members {
        match m.color {
            Some(c) => d = d.max(c),
            None => {
                return Err(Error::Precondition(format!(
                    "witness member {:?} is uncolored",
                    m.name
                )))
            }
        }
    }
    let n = rational::ceil_to_u32(&(rational::rat_int(d as i64 + 2) / epsilon));
    let l2n = a.spec.set_power(l, 2 * n)?;

    // Separation precondition: same-color members must be E_{K,L^{2N}}-apart,
    // otherwise the enlarged members of one color would overlap.
    for (i, m1) in witness.members.iter().enumerate() {
        for m2 in witness.members.iter().skip(i + 1) {
            if m1.color != m2.color {
                continue;
            }
            let k1: Subset = m1.points.intersection(k).cloned().collect();
            let k2: Subset = m2.points.intersection(k).cloned().collect();
            for &x in &k1 {
                let reach = a.orbit_set(x, &l2n)?;
                if let Some(y) = k2.iter().find(|y| reach.contains(y)) {
                    return Err(Error::Precondition(format!(
                        "same-color members {:?},{:?} are not E_{{K,L^2N}}-separated: points {x},{y}",
                        m1.name, m2.name
                    )));
                }
            }
        }
    }

    let ln = a.spec.set_power(l, n)?;
    let mut entries: Vec<(usize, PouEntry)> = Vec::new();
    for m in &witness.members {
        let mk: Subset = m.points.intersection(k).cloned().collect();
        if mk.is_empty() {
            continue;
        }
        // boundedness of the witness member (the proof needs it for (Bo))
        for &x in &mk {
            let reach = a.orbit_set(x, bprime)?;
            if let Some(y) = mk.iter().find(|y| !reach.contains(y)) {
                return Err(Error::Precondition(format!(
                    "witness member {:?} is not B'-bounded: {x} cannot reach {y}",
                    m.name
                )));
            }
        }
        let h = staircase(a, &ScalarField::indicator(a.base.size, &mk), l, n)?;
        let member = a.enlarge_set(&mk, &ln)?;
        entries.push((m.color.unwrap(), PouEntry { name: m.name.clone(), member, field: h }));
    }

    // normalize by max{1, Σ h}
    let mut total = ScalarField::zero(a.base.size);
    for (_, e) in &entries {
        total = total.add(&e.field);
    }
    let one = BigRational::one();
    for (_, e) in &mut entries {
        for x in 0..a.base.size {
            let denom = if total.values[x] > one { &total.values[x] } else { &one };
            e.field.values[x] = &e.field.values[x] / denom;
        }
    }

    let mut be = bprime.clone();
    be.insert(a.spec.identity());
    let b = a.spec.set_product(&a.spec.set_product(&ln, &be)?, &ln)?;

    let mut colors: Vec<Vec<PouEntry>> = vec![Vec::new(); d + 1];
    for (c, e) in entries {
        colors[c].push(e);
    }
    Ok(PartitionOfUnity {
        colors,
        k: k.clone(),
        l: l.clone(),
        b,
        epsilon: epsilon.clone(),
        n,
    })
}

/// Exact verification of a partition of unity: per-color disjointness, (Lo)
/// L-orbits inside members, (Bo) B-boundedness of members, (Su) supports,
/// (In) invariance defect ≤ ε, (Un) sums exactly 1 on K and ≤ 1 elsewhere.
pub fn verify_orbit_pou(a: &FiniteAction, pou: &PartitionOfUnity) -> Result<Report> {
    let size = a.base.size;
    let mut report = Report::new("orbit-pou");

    let mut disjoint = None;
    for (c, color) in pou.colors.iter().enumerate() {
        for (i, e1) in color.iter().enumerate() {
            for e2 in color.iter().skip(i + 1) {
                if let Some(p) = e1.member.intersection(&e2.member).next() {
                    disjoint = Some(format!(
                        "color {c}: members {:?},{:?} share point {p}",
                        e1.name, e2.name
                    ));
                }
            }
        }
    }
    report.push(match disjoint {
        None => Check::pass("disjoint"),
        Some(v) => Check::fail("disjoint", v),
    });

    let mut lo = None;
    for &x in &pou.k {
        let orbit = a.orbit_set(x, &pou.l)?;
        let hit = pou
            .colors
            .iter()
            .flatten()
            .any(|e| orbit.is_subset(&e.member));
        if !hit {
            lo = Some(format!("no member contains the L-orbit of {x}"));
            break;
        }
    }
    report.push(match lo {
        None => Check::pass("Lo"),
        Some(v) => Check::fail("Lo", v),
    });

    let mut bo = None;
    'bo: for e in pou.colors.iter().flatten() {
        for &x in &e.member {
            let reach = a.orbit_set(x, &pou.b)?;
            if let Some(y) = e.member.iter().find(|y| !reach.contains(y)) {
                bo = Some(format!("member {:?}: {x} cannot reach {y} by B", e.name));
                break 'bo;
            }
        }
    }
    report.push(match bo {
        None => Check::pass("Bo"),
        Some(v) => Check::fail("Bo", v),
    });

    let mut su = None;
    for e in pou.colors.iter().flatten() {
        if !e.field.support().is_subset(&e.member) {
            su = Some(format!("field of {:?} leaks outside its member", e.name));
        }
    }
    report.push(match su {
        None => Check::pass("Su"),
        Some(v) => Check::fail("Su", v),
    });

    let mut defect_max = BigRational::zero();
    for e in pou.colors.iter().flatten() {
        let d = invariance_defect(a, &e.field, &pou.l)?;
        if d > defect_max {
            defect_max = d;
        }
    }
    report.push(if defect_max <= pou.epsilon {
        Check::pass_with(
            "In",
            format!("defect {} <= {}", rational::render(&defect_max), rational::render(&pou.epsilon)),
        )
    } else {
        Check::fail(
            "In",
            format!("defect {} > {}", rational::render(&defect_max), rational::render(&pou.epsilon)),
        )
    });

    let total = pou.total_field(size);
    let one = BigRational::one();
    let mut un = None;
    for x in 0..size {
        let v = &total.values[x];
        if pou.k.contains(&x) {
            if *v != one {
                un = Some(format!("sum at {x} is {} != 1", rational::render(v)));
                break;
            }
        } else if *v > one {
            un = Some(format!("sum at {x} is {} > 1", rational::render(v)));
            break;
        }
    }
    if un.is_none() {
        if let Some(e) = pou.colors.iter().flatten().find(|e| !e.field.in_unit_interval()) {
            un = Some(format!("field of {:?} leaves [0,1]", e.name));
        }
    }
    report.push(match un {
        None => Check::pass("Un"),
        Some(v) => Check::fail("Un", v),
    });

    Ok(report)
}
