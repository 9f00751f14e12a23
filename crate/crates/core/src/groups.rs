//! Concrete realizations of finitely generated groups: exact element
//! arithmetic, Cayley-ball enumeration and growth tables.
//!
//! Elements are normal forms (tuples / sparse maps), never words. A
//! [`BallTable`] additionally stores one shortest word per element so that
//! finite actions, which are specified only on generators, can be evaluated
//! on arbitrary ball elements.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on enumerated ball sizes.
pub const DEFAULT_BALL_CAP: usize = 5_000_000;

/// Default caps for wreath elements: only small towers need them.
pub const WREATH_MAX_RANK: usize = 3;
pub const WREATH_MAX_BASE_ORDER: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum GroupKind {
    /// Z^rank.
    Lattice { rank: usize },
    /// Discrete Heisenberg group: (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a·b').
    Heisenberg,
    /// Direct sum of cyclic groups Z/m_i, additive.
    FiniteAbelian { moduli: Vec<u64> },
    /// Z ⋊ H with H finite abelian; (n,h)(n',h') = (n + sign(h)·n', h+h').
    /// `sign` lists (h, ±1) for every element of H.
    VirtuallyCyclic { moduli: Vec<u64>, sign: Vec<(Vec<u64>, i8)> },
    /// G ≀ Z^rank with G finite abelian: pairs (f, h) with f finitely
    /// supported G-valued on the lattice; (f,h)(f',h') = (f + λ_h f', h+h').
    Wreath { base_moduli: Vec<u64>, lattice_rank: usize },
}

/// Sparse finitely supported map lattice point → base element, sorted by key,
/// identity values omitted.
pub type WreathMap = Vec<(Vec<i64>, Vec<u64>)>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupElement {
    Lattice(Vec<i64>),
    Heisenberg(i64, i64, i64),
    FiniteAbelian(Vec<u64>),
    VirtuallyCyclic(i64, Vec<u64>),
    Wreath(WreathMap, Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// The symmetric standard generating set S, identity excluded.
    pub generators: Vec<GroupElement>,
}

fn fa_add(a: &[u64], b: &[u64], moduli: &[u64]) -> Vec<u64> {
    a.iter().zip(b).zip(moduli).map(|((x, y), m)| (x + y) % m).collect()
}

fn fa_neg(a: &[u64], moduli: &[u64]) -> Vec<u64> {
    a.iter().zip(moduli).map(|(x, m)| (m - x) % m).collect()
}

/// All elements of ⊕ Z/m_i in lexicographic order.
pub fn enumerate_finite_abelian(moduli: &[u64]) -> Vec<Vec<u64>> {
    moduli
        .iter()
        .map(|&m| 0..m)
        .multi_cartesian_product()
        .collect::<Vec<_>>()
        .into_iter()
        .chain(if moduli.is_empty() { vec![vec![]] } else { vec![] })
        .collect()
}

impl GroupSpec {
    /// Validates the spec and the generator list (element shapes, closure
    /// under inversion, sign table a homomorphism).
    pub fn new(kind: GroupKind, generators: Vec<GroupElement>) -> Result<Self> {
        match &kind {
            GroupKind::Lattice { rank } => {
                if *rank == 0 {
                    return Err(Error::Argument("lattice rank must be positive".into()));
                }
            }
            GroupKind::Heisenberg => {}
            GroupKind::FiniteAbelian { moduli } => {
                if moduli.iter().any(|&m| m == 0) {
                    return Err(Error::Argument("zero modulus".into()));
                }
            }
            GroupKind::VirtuallyCyclic { moduli, sign } => {
                if moduli.iter().any(|&m| m == 0) {
                    return Err(Error::Argument("zero modulus".into()));
                }
                let all = enumerate_finite_abelian(moduli);
                for h in &all {
                    let s = sign
                        .iter()
                        .filter(|(k, _)| k == h)
                        .map(|(_, v)| *v)
                        .collect::<Vec<_>>();
                    if s.len() != 1 || (s[0] != 1 && s[0] != -1) {
                        return Err(Error::Structure(format!(
                            "sign table must assign ±1 to {h:?} exactly once"
                        )));
                    }
                }
                let lookup = |h: &[u64]| -> i8 {
                    sign.iter().find(|(k, _)| k == h).map(|(_, v)| *v).unwrap()
                };
                if lookup(&vec![0; moduli.len()]) != 1 {
                    return Err(Error::Structure("sign(identity) must be +1".into()));
                }
                for a in &all {
                    for b in &all {
                        let ab = fa_add(a, b, moduli);
                        if lookup(&ab) != lookup(a) * lookup(b) {
                            return Err(Error::Structure(
                                "sign table is not a homomorphism".into(),
                            ));
                        }
                    }
                }
            }
            GroupKind::Wreath { base_moduli, lattice_rank } => {
                if *lattice_rank == 0 || *lattice_rank > WREATH_MAX_RANK {
                    return Err(Error::Argument(format!(
                        "wreath lattice rank must be in 1..={WREATH_MAX_RANK}"
                    )));
                }
                let order: u64 = base_moduli.iter().product();
                if order == 0 || order > WREATH_MAX_BASE_ORDER {
                    return Err(Error::Argument(format!(
                        "wreath base order must be in 1..={WREATH_MAX_BASE_ORDER}"
                    )));
                }
            }
        }
        let spec = GroupSpec { kind, generators };
        let id = spec.identity();
        for g in &spec.generators {
            spec.validate_element(g)?;
            if *g == id {
                return Err(Error::Structure("identity listed as a generator".into()));
            }
            let gi = spec.inv(g)?;
            if !spec.generators.contains(&gi) {
                return Err(Error::Structure(format!(
                    "generating set not closed under inversion: missing inverse of {g:?}"
                )));
            }
        }
        Ok(spec)
    }

    /// Z^rank with generators ±e_i.
    pub fn lattice(rank: usize) -> Result<Self> {
        let mut gens = Vec::new();
        for i in 0..rank {
            for s in [1i64, -1] {
                let mut v = vec![0i64; rank];
                v[i] = s;
                gens.push(GroupElement::Lattice(v));
            }
        }
        GroupSpec::new(GroupKind::Lattice { rank }, gens)
    }

    /// Discrete Heisenberg group with generators {x^{±1}, y^{±1}},
    /// x = (1,0,0), y = (0,1,0).
    pub fn heisenberg() -> Result<Self> {
        let gens = vec![
            GroupElement::Heisenberg(1, 0, 0),
            GroupElement::Heisenberg(-1, 0, 0),
            GroupElement::Heisenberg(0, 1, 0),
            GroupElement::Heisenberg(0, -1, 0),
        ];
        GroupSpec::new(GroupKind::Heisenberg, gens)
    }

    /// ⊕ Z/m_i with generators ±e_i (deduplicated).
    pub fn finite_abelian(moduli: Vec<u64>) -> Result<Self> {
        let mut gens: Vec<GroupElement> = Vec::new();
        for (i, &m) in moduli.iter().enumerate() {
            if m <= 1 {
                continue;
            }
            for e in [1u64, m - 1] {
                let mut v = vec![0u64; moduli.len()];
                v[i] = e;
                let g = GroupElement::FiniteAbelian(v);
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
        }
        GroupSpec::new(GroupKind::FiniteAbelian { moduli }, gens)
    }

    /// Z ⋊ H with generators {a^{±1}} ∪ (H ∖ {e}).
    pub fn virtually_cyclic(moduli: Vec<u64>, sign: Vec<(Vec<u64>, i8)>) -> Result<Self> {
        let zero = vec![0u64; moduli.len()];
        let mut gens = vec![
            GroupElement::VirtuallyCyclic(1, zero.clone()),
            GroupElement::VirtuallyCyclic(-1, zero.clone()),
        ];
        for h in enumerate_finite_abelian(&moduli) {
            if h != zero {
                gens.push(GroupElement::VirtuallyCyclic(0, h));
            }
        }
        GroupSpec::new(GroupKind::VirtuallyCyclic { moduli, sign }, gens)
    }

    /// The infinite dihedral group: Z ⋊ Z/2 with the flip acting by −1.
    pub fn infinite_dihedral() -> Result<Self> {
        GroupSpec::virtually_cyclic(vec![2], vec![(vec![0], 1), (vec![1], -1)])
    }

    /// G ≀ Z^rank with generators: base generators placed at the origin, and
    /// lattice generators ±e_i.
    pub fn wreath(base_moduli: Vec<u64>, lattice_rank: usize) -> Result<Self> {
        let mut gens = Vec::new();
        for (i, &m) in base_moduli.iter().enumerate() {
            if m <= 1 {
                continue;
            }
            for e in [1u64, m - 1] {
                let mut v = vec![0u64; base_moduli.len()];
                v[i] = e;
                let g = GroupElement::Wreath(
                    vec![(vec![0i64; lattice_rank], v)],
                    vec![0i64; lattice_rank],
                );
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
        }
        for i in 0..lattice_rank {
            for s in [1i64, -1] {
                let mut v = vec![0i64; lattice_rank];
                v[i] = s;
                gens.push(GroupElement::Wreath(vec![], v));
            }
        }
        GroupSpec::new(GroupKind::Wreath { base_moduli, lattice_rank }, gens)
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Lattice { rank } => GroupElement::Lattice(vec![0; *rank]),
            GroupKind::Heisenberg => GroupElement::Heisenberg(0, 0, 0),
            GroupKind::FiniteAbelian { moduli } => {
                GroupElement::FiniteAbelian(vec![0; moduli.len()])
            }
            GroupKind::VirtuallyCyclic { moduli, .. } => {
                GroupElement::VirtuallyCyclic(0, vec![0; moduli.len()])
            }
            GroupKind::Wreath { lattice_rank, .. } => {
                GroupElement::Wreath(vec![], vec![0; *lattice_rank])
            }
        }
    }

    /// Checks that `g` is a well-formed element of this realization.
    pub fn validate_element(&self, g: &GroupElement) -> Result<()> {
        match (&self.kind, g) {
            (GroupKind::Lattice { rank }, GroupElement::Lattice(v)) => {
                if v.len() != *rank {
                    return Err(Error::Structure(format!(
                        "lattice element arity {} != rank {rank}",
                        v.len()
                    )));
                }
            }
            (GroupKind::Heisenberg, GroupElement::Heisenberg(..)) => {}
            (GroupKind::FiniteAbelian { moduli }, GroupElement::FiniteAbelian(v)) => {
                check_residues(v, moduli)?;
            }
            (GroupKind::VirtuallyCyclic { moduli, .. }, GroupElement::VirtuallyCyclic(_, h)) => {
                check_residues(h, moduli)?;
            }
            (
                GroupKind::Wreath { base_moduli, lattice_rank },
                GroupElement::Wreath(f, h),
            ) => {
                if h.len() != *lattice_rank {
                    return Err(Error::Structure("wreath lattice arity mismatch".into()));
                }
                let zero = vec![0u64; base_moduli.len()];
                for w in f.windows(2) {
                    if w[0].0 >= w[1].0 {
                        return Err(Error::Structure(
                            "wreath support map not strictly sorted".into(),
                        ));
                    }
                }
                for (p, v) in f {
                    if p.len() != *lattice_rank {
                        return Err(Error::Structure("wreath support point arity".into()));
                    }
                    check_residues(v, base_moduli)?;
                    if *v == zero {
                        return Err(Error::Structure(
                            "wreath support map stores an identity value".into(),
                        ));
                    }
                }
            }
            _ => {
                return Err(Error::Structure(format!(
                    "element {g:?} does not match group kind"
                )))
            }
        }
        Ok(())
    }

    fn sign_of(&self, h: &[u64]) -> Result<i64> {
        match &self.kind {
            GroupKind::VirtuallyCyclic { sign, .. } => sign
                .iter()
                .find(|(k, _)| k == h)
                .map(|(_, v)| *v as i64)
                .ok_or_else(|| Error::Structure(format!("no sign entry for {h:?}"))),
            _ => Err(Error::Capability("sign table only on virtually cyclic".into())),
        }
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g, h) {
            (GroupKind::Lattice { .. }, GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                if a.len() != b.len() {
                    return Err(Error::Structure("lattice arity mismatch".into()));
                }
                let v = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("lattice add")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Lattice(v))
            }
            (
                GroupKind::Heisenberg,
                GroupElement::Heisenberg(a, b, c),
                GroupElement::Heisenberg(a2, b2, c2),
            ) => {
                let twist = a.checked_mul(*b2).ok_or(Error::Overflow("heisenberg twist"))?;
                let na = a.checked_add(*a2).ok_or(Error::Overflow("heisenberg a"))?;
                let nb = b.checked_add(*b2).ok_or(Error::Overflow("heisenberg b"))?;
                let nc = c
                    .checked_add(*c2)
                    .and_then(|t| t.checked_add(twist))
                    .ok_or(Error::Overflow("heisenberg c"))?;
                Ok(GroupElement::Heisenberg(na, nb, nc))
            }
            (
                GroupKind::FiniteAbelian { moduli },
                GroupElement::FiniteAbelian(a),
                GroupElement::FiniteAbelian(b),
            ) => {
                check_residues(a, moduli)?;
                check_residues(b, moduli)?;
                Ok(GroupElement::FiniteAbelian(fa_add(a, b, moduli)))
            }
            (
                GroupKind::VirtuallyCyclic { moduli, .. },
                GroupElement::VirtuallyCyclic(n, hh),
                GroupElement::VirtuallyCyclic(n2, hh2),
            ) => {
                check_residues(hh, moduli)?;
                check_residues(hh2, moduli)?;
                let s = self.sign_of(hh)?;
                let nn = n
                    .checked_add(s.checked_mul(*n2).ok_or(Error::Overflow("vc sign mul"))?)
                    .ok_or(Error::Overflow("vc add"))?;
                Ok(GroupElement::VirtuallyCyclic(nn, fa_add(hh, hh2, moduli)))
            }
            (
                GroupKind::Wreath { base_moduli, .. },
                GroupElement::Wreath(f, hh),
                GroupElement::Wreath(f2, hh2),
            ) => {
                // (f, h)(f', h') = (f + λ_h f', h + h'), λ_h shifting support by h.
                let mut acc: BTreeMap<Vec<i64>, Vec<u64>> = f.iter().cloned().collect();
                let zero = vec![0u64; base_moduli.len()];
                for (p, v) in f2 {
                    let sp = p
                        .iter()
                        .zip(hh)
                        .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("wreath shift")))
                        .collect::<Result<Vec<_>>>()?;
                    let entry = acc.entry(sp).or_insert_with(|| zero.clone());
                    *entry = fa_add(entry, v, base_moduli);
                }
                acc.retain(|_, v| *v != zero);
                let nh = hh
                    .iter()
                    .zip(hh2)
                    .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("wreath base")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Wreath(acc.into_iter().collect(), nh))
            }
            _ => Err(Error::Structure("element kinds do not match the group".into())),
        }
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g) {
            (GroupKind::Lattice { .. }, GroupElement::Lattice(a)) => Ok(GroupElement::Lattice(
                a.iter()
                    .map(|x| x.checked_neg().ok_or(Error::Overflow("lattice neg")))
                    .collect::<Result<Vec<_>>>()?,
            )),
            (GroupKind::Heisenberg, GroupElement::Heisenberg(a, b, c)) => {
                let ab = a.checked_mul(*b).ok_or(Error::Overflow("heisenberg inv"))?;
                let nc = ab.checked_sub(*c).ok_or(Error::Overflow("heisenberg inv"))?;
                Ok(GroupElement::Heisenberg(-a, -b, nc))
            }
            (GroupKind::FiniteAbelian { moduli }, GroupElement::FiniteAbelian(a)) => {
                check_residues(a, moduli)?;
                Ok(GroupElement::FiniteAbelian(fa_neg(a, moduli)))
            }
            (GroupKind::VirtuallyCyclic { moduli, .. }, GroupElement::VirtuallyCyclic(n, h)) => {
                check_residues(h, moduli)?;
                let s = self.sign_of(h)?;
                let nn = n.checked_mul(-s).ok_or(Error::Overflow("vc inv"))?;
                Ok(GroupElement::VirtuallyCyclic(nn, fa_neg(h, moduli)))
            }
            (GroupKind::Wreath { base_moduli, .. }, GroupElement::Wreath(f, h)) => {
                // (f, h)^{-1} = (λ_{-h}(-f), -h).
                let mut out: Vec<(Vec<i64>, Vec<u64>)> = f
                    .iter()
                    .map(|(p, v)| {
                        let sp = p
                            .iter()
                            .zip(h)
                            .map(|(x, y)| {
                                x.checked_sub(*y).ok_or(Error::Overflow("wreath inv"))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok((sp, fa_neg(v, base_moduli)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.sort();
                let nh = h
                    .iter()
                    .map(|x| x.checked_neg().ok_or(Error::Overflow("wreath inv")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Wreath(out, nh))
            }
            _ => Err(Error::Structure("element kind does not match the group".into())),
        }
    }

    /// Breadth-first enumeration of the ball of radius `n` around the
    /// identity, with the default element cap.
    pub fn ball(&self, n: u32) -> Result<BallTable> {
        self.ball_capped(n, DEFAULT_BALL_CAP)
    }

    /// As [`ball`](Self::ball) with an explicit element cap. Each element is
    /// stored with its lexicographically least shortest word (generator
    /// indices, evaluated left to right).
    pub fn ball_capped(&self, n: u32, cap: usize) -> Result<BallTable> {
        let mut elements: BTreeMap<GroupElement, Vec<u32>> = BTreeMap::new();
        elements.insert(self.identity(), Vec::new());
        let mut growth: Vec<u64> = vec![1];
        // Frontier kept in word-lex order so that first discovery yields the
        // lex-least shortest word.
        let mut frontier = vec![self.identity()];
        for _ in 1..=n {
            let mut next = Vec::new();
            for g in &frontier {
                let base_word = elements[g].clone();
                for (i, s) in self.generators.iter().enumerate() {
                    let h = self.mul(g, s)?;
                    if !elements.contains_key(&h) {
                        let mut w = base_word.clone();
                        w.push(i as u32);
                        elements.insert(h.clone(), w);
                        next.push(h);
                        if elements.len() > cap {
                            return Err(Error::CapExceeded(format!(
                                "ball enumeration exceeded {cap} elements"
                            )));
                        }
                    }
                }
            }
            growth.push(elements.len() as u64);
            frontier = next;
        }
        Ok(BallTable { spec: self.clone(), radius: n, elements, growth })
    }

    /// The structured balls of the packing theorems:
    /// [-n,n]^rank for lattices, the whole group for finite abelian groups,
    /// {a^i : |i| ≤ n}·H for virtually cyclic groups.
    pub fn structured_ball(&self, n: u32) -> Result<BTreeSet<GroupElement>> {
        let n = n as i64;
        match &self.kind {
            GroupKind::Lattice { rank } => Ok((0..*rank)
                .map(|_| -n..=n)
                .multi_cartesian_product()
                .map(GroupElement::Lattice)
                .collect()),
            GroupKind::FiniteAbelian { moduli } => Ok(enumerate_finite_abelian(moduli)
                .into_iter()
                .map(GroupElement::FiniteAbelian)
                .collect()),
            GroupKind::VirtuallyCyclic { moduli, .. } => {
                let mut out = BTreeSet::new();
                for i in -n..=n {
                    for h in enumerate_finite_abelian(moduli) {
                        out.insert(GroupElement::VirtuallyCyclic(i, h));
                    }
                }
                Ok(out)
            }
            _ => Err(Error::Capability(
                "structured balls exist only for lattice, finite abelian and virtually cyclic realizations".into(),
            )),
        }
    }

    /// Exact pointwise set product A·B, deduplicated.
    pub fn set_product(
        &self,
        a: &BTreeSet<GroupElement>,
        b: &BTreeSet<GroupElement>,
    ) -> Result<BTreeSet<GroupElement>> {
        let mut out = BTreeSet::new();
        for x in a {
            for y in b {
                out.insert(self.mul(x, y)?);
                if out.len() > DEFAULT_BALL_CAP {
                    return Err(Error::CapExceeded("set product exceeded cap".into()));
                }
            }
        }
        Ok(out)
    }

    /// Elementwise inverse of a set.
    pub fn set_inv(&self, a: &BTreeSet<GroupElement>) -> Result<BTreeSet<GroupElement>> {
        a.iter().map(|g| self.inv(g)).collect()
    }

    /// L^k with L^0 = {e}.
    pub fn set_power(&self, l: &BTreeSet<GroupElement>, k: u32) -> Result<BTreeSet<GroupElement>> {
        let mut out: BTreeSet<GroupElement> = [self.identity()].into();
        for _ in 0..k {
            out = self.set_product(&out, l)?;
        }
        Ok(out)
    }

    /// Index of the generator inverse to generator `i`.
    pub fn inverse_generator_index(&self, i: usize) -> Result<usize> {
        let gi = self.inv(&self.generators[i])?;
        self.generators
            .iter()
            .position(|g| *g == gi)
            .ok_or_else(|| Error::Structure("generator inverse not listed".into()))
    }
}

fn check_residues(v: &[u64], moduli: &[u64]) -> Result<()> {
    if v.len() != moduli.len() {
        return Err(Error::Structure(format!(
            "residue tuple arity {} != {}",
            v.len(),
            moduli.len()
        )));
    }
    for (x, m) in v.iter().zip(moduli) {
        if x >= m {
            return Err(Error::Structure(format!("residue {x} out of range [0,{m})")));
        }
    }
    Ok(())
}

/// The ball B_S(e, radius) with one shortest word per element and the growth
/// vector Gr(0..radius).
#[derive(Debug, Clone)]
pub struct BallTable {
    pub spec: GroupSpec,
    pub radius: u32,
    pub elements: BTreeMap<GroupElement, Vec<u32>>,
    pub growth: Vec<u64>,
}

impl BallTable {
    pub fn gr(&self, n: u32) -> u64 {
        self.growth[n as usize]
    }

    pub fn word(&self, g: &GroupElement) -> Option<&[u32]> {
        self.elements.get(g).map(|w| w.as_slice())
    }

    pub fn element_set(&self) -> BTreeSet<GroupElement> {
        self.elements.keys().cloned().collect()
    }

    /// Least-squares slope of log Gr(n) against log n over n ∈ [lo, hi].
    /// Diagnostic only: the single floating-point computation in the crate.
    pub fn degree_estimate(&self, lo: u32, hi: u32) -> Result<f64> {
        if lo < 2 || hi > self.radius || hi < lo + 1 {
            return Err(Error::Argument(format!(
                "degree window [{lo},{hi}] must have ≥ 2 points inside [2,{}]",
                self.radius
            )));
        }
        let pts: Vec<(f64, f64)> = (lo..=hi)
            .map(|n| ((n as f64).ln(), (self.gr(n) as f64).ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Ok(num / den)
    }

    /// CSV rows "n,growth".
    pub fn growth_csv(&self) -> String {
        let mut out = String::from("n,growth\n");
        for (n, g) in self.growth.iter().enumerate() {
            out.push_str(&format!("{n},{g}\n"));
        }
        out
    }
}
