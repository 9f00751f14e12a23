//! Finite group actions evaluated through word witnesses, the orbit coarse
//! structure, L-connectivity and (α,L)-multiplicity, modified stabilizers and
//! coset-space enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use crate::coarse::{
    e_multiplicity_budgeted, multiplicity, Cover, Entourage, PointSet, Subset,
    DEFAULT_SEARCH_BUDGET,
};
use crate::error::{Error, Result};
use crate::groups::{BallTable, GroupElement, GroupSpec};
use crate::report::{Check, Report};

/// A group acting on a finite point set. Generators are given as
/// permutations; arbitrary ball elements act by composing generator
/// permutations along their stored shortest word.
#[derive(Debug)]
pub struct FiniteAction {
    pub spec: GroupSpec,
    pub base: PointSet,
    /// One permutation per generator, indexed like `spec.generators`.
    pub generator_perms: Vec<Vec<usize>>,
    /// Materialized ball supplying word witnesses for `act`.
    pub ball: BallTable,
    // permutation memo: idempotent entries, last writer wins
    cache: Mutex<BTreeMap<GroupElement, Vec<usize>>>,
}

impl Clone for FiniteAction {
    fn clone(&self) -> Self {
        FiniteAction {
            spec: self.spec.clone(),
            base: self.base.clone(),
            generator_perms: self.generator_perms.clone(),
            ball: self.ball.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    p.len() == n && {
        let mut seen = vec![false; n];
        p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
    }
}

impl FiniteAction {
    /// Validates bijectivity, inverse compatibility, and spot-checks that
    /// different shortest words of the same element act identically on ball
    /// radius ≤ 3 (otherwise the permutations do not define an action).
    pub fn new(
        spec: GroupSpec,
        base: PointSet,
        generator_perms: Vec<Vec<usize>>,
        ball_radius: u32,
    ) -> Result<Self> {
        let n = base.size;
        if generator_perms.len() != spec.generators.len() {
            return Err(Error::Structure(format!(
                "{} permutations for {} generators",
                generator_perms.len(),
                spec.generators.len()
            )));
        }
        for (i, p) in generator_perms.iter().enumerate() {
            if !is_permutation(p, n) {
                return Err(Error::Structure(format!("generator {i} is not a permutation")));
            }
        }
        for i in 0..generator_perms.len() {
            let j = spec.inverse_generator_index(i)?;
            let id: Vec<usize> = (0..n).collect();
            if compose(&generator_perms[i], &generator_perms[j]) != id {
                return Err(Error::Structure(format!(
                    "perm of generator {j} is not inverse to perm of generator {i}"
                )));
            }
        }
        // Word-independence spot check on radius <= 3: every word evaluating
        // to the same element must induce the same permutation.
        let mut by_element: BTreeMap<GroupElement, Vec<usize>> = BTreeMap::new();
        let id: Vec<usize> = (0..n).collect();
        let mut layer: Vec<(GroupElement, Vec<usize>)> = vec![(spec.identity(), id)];
        by_element.insert(spec.identity(), (0..n).collect());
        for _ in 0..3.min(ball_radius) {
            let mut next = Vec::new();
            for (g, perm) in &layer {
                for (i, s) in spec.generators.iter().enumerate() {
                    let h = spec.mul(g, s)?;
                    let hp = compose(perm, &generator_perms[i]);
                    match by_element.get(&h) {
                        Some(known) if *known != hp => {
                            return Err(Error::Structure(format!(
                                "generator permutations do not define an action: two words for {h:?} act differently"
                            )));
                        }
                        Some(_) => {}
                        None => {
                            by_element.insert(h.clone(), hp.clone());
                            next.push((h, hp));
                        }
                    }
                }
            }
            layer = next;
        }
        let ball = spec.ball(ball_radius)?;
        Ok(FiniteAction { spec, base, generator_perms, ball, cache: Mutex::new(BTreeMap::new()) })
    }

    /// ℤ acting on ℤ/q by +1.
    pub fn cyclic_translation(q: usize, ball_radius: u32) -> Result<Self> {
        let spec = GroupSpec::lattice(1)?;
        let fwd: Vec<usize> = (0..q).map(|x| (x + 1) % q).collect();
        let back: Vec<usize> = (0..q).map(|x| (x + q - 1) % q).collect();
        FiniteAction::new(spec, PointSet::new(q), vec![fwd, back], ball_radius)
    }

    /// ℤ^rank acting on (ℤ/q)^rank by translation; point ids mixed-radix with
    /// the first coordinate most significant.
    pub fn torus_translation(rank: usize, q: usize, ball_radius: u32) -> Result<Self> {
        let spec = GroupSpec::lattice(rank)?;
        let n = q.pow(rank as u32);
        let mut perms = Vec::new();
        for i in 0..rank {
            for s in [1i64, -1] {
                let stride = q.pow((rank - 1 - i) as u32);
                let perm: Vec<usize> = (0..n)
                    .map(|x| {
                        let digit = (x / stride) % q;
                        let nd = (digit as i64 + s).rem_euclid(q as i64) as usize;
                        x - digit * stride + nd * stride
                    })
                    .collect();
                perms.push(perm);
            }
        }
        FiniteAction::new(spec, PointSet::new(n), perms, ball_radius)
    }

    /// The permutation of an element of the materialized ball.
    pub fn perm(&self, g: &GroupElement) -> Result<Vec<usize>> {
        if let Some(p) = self.cache.lock().unwrap().get(g) {
            return Ok(p.clone());
        }
        let word = self
            .ball
            .word(g)
            .ok_or(Error::EnlargeBall { radius: self.ball.radius })?
            .to_vec();
        let mut perm: Vec<usize> = (0..self.base.size).collect();
        for &i in &word {
            perm = compose(&perm, &self.generator_perms[i as usize]);
        }
        self.cache.lock().unwrap().insert(g.clone(), perm.clone());
        Ok(perm)
    }

    pub fn act(&self, g: &GroupElement, x: usize) -> Result<usize> {
        Ok(self.perm(g)?[x])
    }

    /// α_g(Y).
    pub fn image(&self, g: &GroupElement, y: &Subset) -> Result<Subset> {
        let p = self.perm(g)?;
        Ok(y.iter().map(|&x| p[x]).collect())
    }

    /// α_F(x) = {α_g(x) : g ∈ F}.
    pub fn orbit_set(&self, x: usize, f: &BTreeSet<GroupElement>) -> Result<Subset> {
        f.iter().map(|g| self.act(g, x)).collect()
    }

    /// α^∪_F(Y) = ⋃_{h ∈ F} α_h(Y).
    pub fn enlarge_set(&self, y: &Subset, f: &BTreeSet<GroupElement>) -> Result<Subset> {
        let mut out = BTreeSet::new();
        for g in f {
            out.extend(self.image(g, y)?);
        }
        Ok(out)
    }

    /// α^∩_F(Y) = ⋂_{h ∈ F} α_h(Y).
    pub fn shrink_set(&self, y: &Subset, f: &BTreeSet<GroupElement>) -> Result<Subset> {
        let mut iter = f.iter();
        let mut out = match iter.next() {
            None => return Ok((0..self.base.size).collect()),
            Some(g) => self.image(g, y)?,
        };
        for g in iter {
            let img = self.image(g, y)?;
            out = out.intersection(&img).cloned().collect();
        }
        Ok(out)
    }

    /// E_{K,L} = {(α_g x, x) : g ∈ L, x ∈ K, α_g x ∈ K}.
    pub fn orbit_entourage(
        &self,
        k: &Subset,
        l: &BTreeSet<GroupElement>,
    ) -> Result<Entourage> {
        let mut pairs = BTreeSet::new();
        for g in l {
            let p = self.perm(g)?;
            for &x in k {
                if k.contains(&p[x]) {
                    pairs.insert((p[x], x));
                }
            }
        }
        Entourage::new(self.base.size, pairs)
    }

    /// L ∪ L^{-1} as a set of elements.
    fn symmetrize_l(&self, l: &BTreeSet<GroupElement>) -> Result<BTreeSet<GroupElement>> {
        let mut out = l.clone();
        for g in l {
            out.insert(self.spec.inv(g)?);
        }
        Ok(out)
    }

    /// L-connected components of Y: paths inside Y by steps from L ∪ L^{-1}.
    pub fn l_components(
        &self,
        y: &Subset,
        l: &BTreeSet<GroupElement>,
    ) -> Result<Vec<Subset>> {
        let steps = self.symmetrize_l(l)?;
        let perms: Vec<Vec<usize>> =
            steps.iter().map(|g| self.perm(g)).collect::<Result<_>>()?;
        let mut seen: Subset = BTreeSet::new();
        let mut out = Vec::new();
        for &start in y {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                for p in &perms {
                    let w = p[v];
                    if y.contains(&w) && !comp.contains(&w) {
                        stack.push(w);
                    }
                }
            }
            seen.extend(comp.iter());
            out.push(comp);
        }
        Ok(out)
    }

    /// (L,N)-boundedness: every pair of Y is joined inside Y by at most N
    /// steps from L ∪ L^{-1}.
    pub fn is_l_bounded(
        &self,
        y: &Subset,
        l: &BTreeSet<GroupElement>,
        n: usize,
    ) -> Result<bool> {
        let steps = self.symmetrize_l(l)?;
        let perms: Vec<Vec<usize>> =
            steps.iter().map(|g| self.perm(g)).collect::<Result<_>>()?;
        for &src in y {
            let mut dist: BTreeMap<usize, usize> = BTreeMap::new();
            dist.insert(src, 0);
            let mut frontier = vec![src];
            let mut depth = 0;
            while !frontier.is_empty() && depth < n {
                depth += 1;
                let mut next = Vec::new();
                for &v in &frontier {
                    for p in &perms {
                        let w = p[v];
                        if y.contains(&w) && !dist.contains_key(&w) {
                            dist.insert(w, depth);
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            if y.iter().any(|t| !dist.contains_key(t)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// (α,L)-multiplicity: the clique engine over the closeness relation
    /// {(α_g x, x) : g ∈ L ∪ {e} ∪ L^{-1}} on the whole base.
    pub fn alpha_l_multiplicity(
        &self,
        cover: &Cover,
        l: &BTreeSet<GroupElement>,
    ) -> Result<usize> {
        let mut close = self.symmetrize_l(l)?;
        close.insert(self.spec.identity());
        let all: Subset = (0..self.base.size).collect();
        let ent = self.orbit_entourage(&all, &close)?;
        e_multiplicity_budgeted(cover, &ent, DEFAULT_SEARCH_BUDGET)
    }

    /// Generating set {p ∈ P : α_p(x) = x} of the modified stabilizer.
    pub fn modified_stabilizer(
        &self,
        x: usize,
        p: &BTreeSet<GroupElement>,
    ) -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        for g in p {
            if self.act(g, x)? == x {
                out.push(g.clone());
            }
        }
        Ok(out)
    }

    /// Member-wise α^∩_L; empty shrunken members are dropped, their count
    /// returned.
    pub fn shrink_cover(
        &self,
        cover: &Cover,
        l: &BTreeSet<GroupElement>,
    ) -> Result<(Cover, usize)> {
        let mut err = None;
        let (c, dropped) = cover.map_members(|p| match self.shrink_set(p, l) {
            Ok(s) => s,
            Err(e) => {
                err.get_or_insert(e);
                BTreeSet::new()
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok((c, dropped)),
        }
    }

    /// Member-wise α^∪_L.
    pub fn enlarge_cover(
        &self,
        cover: &Cover,
        l: &BTreeSet<GroupElement>,
    ) -> Result<(Cover, usize)> {
        let mut err = None;
        let (c, dropped) = cover.map_members(|p| match self.enlarge_set(p, l) {
            Ok(s) => s,
            Err(e) => {
                err.get_or_insert(e);
                BTreeSet::new()
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok((c, dropped)),
        }
    }

    /// Orbit witness conditions: (Lo) each α_L(x), x ∈ K, inside some member;
    /// (Mu) multiplicity ≤ d+1; (Bo) every member B-bounded (pairwise joined
    /// by elements of B).
    pub fn check_orbit_asdim_witness(
        &self,
        k: &Subset,
        l: &BTreeSet<GroupElement>,
        b: &BTreeSet<GroupElement>,
        cover: &Cover,
        d: usize,
    ) -> Result<Report> {
        let mut report = Report::new("orbit-asdim-witness");

        let mut lo_violation = None;
        for &x in k {
            let orbit = self.orbit_set(x, l)?;
            if !cover.members.iter().any(|m| orbit.is_subset(&m.points)) {
                lo_violation = Some(format!("no member contains the L-orbit of point {x}"));
                break;
            }
        }
        report.push(match lo_violation {
            None => Check::pass("Lo"),
            Some(v) => Check::fail("Lo", v),
        });

        let mult = multiplicity(cover);
        report.push(if mult <= d + 1 {
            Check::pass_with("Mu", format!("multiplicity {mult} <= {}", d + 1))
        } else {
            Check::fail("Mu", format!("multiplicity {mult} > {}", d + 1))
        });

        let mut bo_violation = None;
        'outer: for m in &cover.members {
            for &x in &m.points {
                let reach = self.orbit_set(x, b)?;
                for &y in &m.points {
                    if !reach.contains(&y) {
                        bo_violation = Some(format!(
                            "member {:?}: no element of B maps {x} to {y}",
                            m.name
                        ));
                        break 'outer;
                    }
                }
            }
        }
        report.push(match bo_violation {
            None => Check::pass("Bo"),
            Some(v) => Check::fail("Bo", v),
        });
        Ok(report)
    }
}

/// Left-coset action of `spec` on the cosets of the subgroup given by
/// `membership`. Cosets are enumerated from the ball of `seed_radius` in
/// word order, so each representative is the lexicographically least
/// shortest-word element of its coset. Returns the action together with the
/// representative list (point i ↔ reps[i]).
pub fn coset_action(
    spec: &GroupSpec,
    membership: &dyn Fn(&GroupElement) -> bool,
    seed_radius: u32,
    ball_radius: u32,
    coset_cap: usize,
) -> Result<(FiniteAction, Vec<GroupElement>)> {
    let ball = spec.ball(seed_radius)?;
    let mut order: Vec<(&GroupElement, &Vec<u32>)> = ball.elements.iter().collect();
    order.sort_by(|a, b| (a.1.len(), a.1).cmp(&(b.1.len(), b.1)));

    let mut reps: Vec<GroupElement> = Vec::new();
    for (g, _) in &order {
        let mut found = false;
        for r in &reps {
            let diff = spec.mul(&spec.inv(r)?, g)?;
            if membership(&diff) {
                found = true;
                break;
            }
        }
        if !found {
            reps.push((*g).clone());
            if reps.len() > coset_cap {
                return Err(Error::CapExceeded(format!(
                    "coset enumeration exceeded {coset_cap} cosets"
                )));
            }
        }
    }

    let coset_of = |g: &GroupElement| -> Result<Option<usize>> {
        for (i, r) in reps.iter().enumerate() {
            if membership(&spec.mul(&spec.inv(r)?, g)?) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    };

    let mut perms = Vec::new();
    for s in &spec.generators {
        let mut perm = Vec::with_capacity(reps.len());
        for r in &reps {
            let sg = spec.mul(s, r)?;
            match coset_of(&sg)? {
                Some(i) => perm.push(i),
                None => return Err(Error::IncompleteTransversal(seed_radius)),
            }
        }
        if !is_permutation(&perm, reps.len()) {
            return Err(Error::Structure(
                "membership predicate does not define a subgroup: translation is not a bijection"
                    .into(),
            ));
        }
        perms.push(perm);
    }

    let labels: Vec<String> = reps.iter().map(|r| format!("{r:?}")).collect();
    let action = FiniteAction::new(spec.clone(), PointSet::labeled(labels), perms, ball_radius)?;
    Ok((action, reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::e_components;
    use proptest::prelude::*;

    fn lat(v: &[i64]) -> GroupElement {
        GroupElement::Lattice(v.to_vec())
    }

    fn lset(vs: &[i64]) -> BTreeSet<GroupElement> {
        vs.iter().map(|&v| lat(&[v])).collect()
    }

    #[test]
    fn act_examples() {
        let a = FiniteAction::cyclic_translation(6, 6).unwrap();
        assert_eq!(a.act(&lat(&[2]), 3).unwrap(), 5);
        assert_eq!(a.act(&a.spec.identity(), 3).unwrap(), 3);
        let g = lat(&[4]);
        let gi = a.spec.inv(&g).unwrap();
        let x = a.act(&gi, 1).unwrap();
        assert_eq!(a.act(&g, x).unwrap(), 1);
    }

    #[test]
    fn act_outside_ball_errors() {
        let a = FiniteAction::cyclic_translation(6, 3).unwrap();
        assert!(matches!(
            a.act(&lat(&[5]), 0),
            Err(Error::EnlargeBall { radius: 3 })
        ));
    }

    #[test]
    fn orbit_entourage_examples() {
        let a = FiniteAction::cyclic_translation(6, 6).unwrap();
        let all: Subset = (0..6).collect();
        let e = a.orbit_entourage(&all, &lset(&[1, -1])).unwrap();
        assert_eq!(e.pairs.len(), 12);
        assert!(a.orbit_entourage(&BTreeSet::new(), &lset(&[1])).unwrap().pairs.is_empty());
        let k0: Subset = [0].into();
        assert!(a.orbit_entourage(&k0, &lset(&[1])).unwrap().pairs.is_empty());
    }

    #[test]
    fn l_components_and_boundedness() {
        let a = FiniteAction::cyclic_translation(12, 8).unwrap();
        let y: Subset = [0, 1, 2, 6, 7].into();
        let comps = a.l_components(&y, &lset(&[1])).unwrap();
        assert_eq!(comps, vec![[0, 1, 2].into(), [6, 7].into()]);
        // L-connected finite Y is (L, |Y|)-bounded
        let yc: Subset = (0..5).collect();
        assert!(a.is_l_bounded(&yc, &lset(&[1]), 5).unwrap());
        assert!(!a.is_l_bounded(&yc, &lset(&[1]), 3).unwrap());
        assert!(a.is_l_bounded(&[3].into(), &lset(&[1]), 0).unwrap());
        // disconnected Y is never bounded
        assert!(!a.is_l_bounded(&y, &lset(&[1]), 12).unwrap());
    }

    #[test]
    fn alpha_l_multiplicity_blocks() {
        let a = FiniteAction::cyclic_translation(12, 8).unwrap();
        let cover =
            Cover::from_subsets(12, (0..4).map(|i| (3 * i..3 * i + 3).collect()).collect())
                .unwrap();
        assert_eq!(a.alpha_l_multiplicity(&cover, &lset(&[1, -1])).unwrap(), 2);
        // L = {e} reduces to ordinary multiplicity
        let e_only: BTreeSet<GroupElement> = [a.spec.identity()].into();
        assert_eq!(a.alpha_l_multiplicity(&cover, &e_only).unwrap(), multiplicity(&cover));
    }

    #[test]
    fn modified_stabilizer_examples() {
        // ℤ² on ℤ/3 through the first coordinate
        let spec = GroupSpec::lattice(2).unwrap();
        let fwd: Vec<usize> = vec![1, 2, 0];
        let back: Vec<usize> = vec![2, 0, 1];
        let id: Vec<usize> = vec![0, 1, 2];
        let a = FiniteAction::new(
            spec,
            PointSet::new(3),
            vec![fwd, back, id.clone(), id],
            4,
        )
        .unwrap();
        let p = a.spec.ball(1).unwrap().element_set();
        let stab = a.modified_stabilizer(0, &p).unwrap();
        let expect: BTreeSet<GroupElement> =
            [lat(&[0, 0]), lat(&[0, 1]), lat(&[0, -1])].into();
        assert_eq!(stab.into_iter().collect::<BTreeSet<_>>(), expect);
        // free point: only e stabilizes
        let b = FiniteAction::cyclic_translation(5, 2).unwrap();
        let pb = b.spec.ball(2).unwrap().element_set();
        assert_eq!(b.modified_stabilizer(0, &pb).unwrap(), vec![b.spec.identity()]);
        assert!(b.modified_stabilizer(0, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn shrink_enlarge_cover() {
        let a = FiniteAction::cyclic_translation(12, 8).unwrap();
        let l = lset(&[0, 1, -1]);
        let cover = Cover::from_subsets(12, vec![(2..7).collect()]).unwrap();
        // Y ⊆ α^∩_L(α^∪_L(Y)) for symmetric L
        let (enlarged, _) = a.enlarge_cover(&cover, &l).unwrap();
        let (back, _) = a.shrink_cover(&enlarged, &l).unwrap();
        assert!(cover.members[0].points.is_subset(&back.members[0].points));
        // shrink by {e} is the identity
        let e_only: BTreeSet<GroupElement> = [a.spec.identity()].into();
        let (same, dropped) = a.shrink_cover(&cover, &e_only).unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(same.members[0].points, cover.members[0].points);
    }

    #[test]
    fn coset_action_examples() {
        let z = GroupSpec::lattice(1).unwrap();
        let (a, reps) = coset_action(
            &z,
            &|g| matches!(g, GroupElement::Lattice(v) if v[0] % 5 == 0),
            4,
            6,
            1000,
        )
        .unwrap();
        assert_eq!(reps.len(), 5);
        // generator +1 is a 5-cycle
        let p = &a.generator_perms[0];
        let mut x = 0;
        for _ in 0..5 {
            x = p[x];
        }
        assert_eq!(x, 0);
        assert_eq!((0..5).map(|i| p[i]).collect::<BTreeSet<_>>().len(), 5);

        let z2 = GroupSpec::lattice(2).unwrap();
        let (a2, reps2) = coset_action(
            &z2,
            &|g| matches!(g, GroupElement::Lattice(v) if v[0] % 3 == 0 && v[1] % 3 == 0),
            4,
            4,
            1000,
        )
        .unwrap();
        assert_eq!(reps2.len(), 9);
        // transitive
        let all: Subset = (0..9).collect();
        let l: BTreeSet<GroupElement> =
            z2.generators.iter().cloned().collect();
        assert_eq!(a2.l_components(&all, &l).unwrap().len(), 1);

        // regular action of a finite group via the trivial subgroup
        let z3 = GroupSpec::finite_abelian(vec![3]).unwrap();
        let idy = z3.identity();
        let (reg, reps3) =
            coset_action(&z3, &|g| *g == idy, 3, 3, 100).unwrap();
        assert_eq!(reps3.len(), 3);
        assert_eq!(reg.base.size, 3);
    }

    #[test]
    fn incomplete_transversal_detected() {
        let z = GroupSpec::lattice(1).unwrap();
        // Index-12 subgroup, seed ball radius 4: BFS cannot close.
        let r = coset_action(
            &z,
            &|g| matches!(g, GroupElement::Lattice(v) if v[0] % 12 == 0),
            4,
            4,
            1000,
        );
        assert!(matches!(r, Err(Error::IncompleteTransversal(4))));
    }

    #[test]
    fn orbit_witness_examples() {
        // ℤ/3 acting on itself; cover = the single orbit
        let z3 = GroupSpec::finite_abelian(vec![3]).unwrap();
        let idy = z3.identity();
        let (a, _) = coset_action(&z3, &|g| *g == idy, 3, 3, 100).unwrap();
        let b: BTreeSet<GroupElement> = a.spec.ball(2).unwrap().element_set();
        let l: BTreeSet<GroupElement> = a.spec.generators.iter().cloned().collect();
        let cover = Cover::from_subsets(3, vec![(0..3).collect()]).unwrap();
        let all: Subset = (0..3).collect();
        let r = a.check_orbit_asdim_witness(&all, &l, &b, &cover, 0).unwrap();
        assert!(r.pass, "{:?}", r.failing());

        // cover missing an L-orbit
        let bad = Cover::from_subsets(3, vec![[0].into(), [1].into(), [2].into()]).unwrap();
        let rb = a.check_orbit_asdim_witness(&all, &l, &b, &bad, 0).unwrap();
        assert!(!rb.check("Lo").unwrap().pass);

        // singleton cover with B = L = {e}
        let e_only: BTreeSet<GroupElement> = [a.spec.identity()].into();
        let rs = a
            .check_orbit_asdim_witness(&all, &e_only, &e_only, &bad, 0)
            .unwrap();
        assert!(rs.pass, "{:?}", rs.failing());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn orbit_entourage_identities(
            q in 3usize..15,
            ls in proptest::collection::btree_set(-3i64..=3, 1..4),
            ls2 in proptest::collection::btree_set(-3i64..=3, 1..4),
            k in proptest::collection::btree_set(0usize..15, 1..10),
        ) {
            let a = FiniteAction::cyclic_translation(q, 14).unwrap();
            let k: Subset = k.into_iter().filter(|&x| x < q).collect();
            let l: BTreeSet<GroupElement> = ls.iter().map(|&v| lat(&[v])).collect();
            let l2: BTreeSet<GroupElement> = ls2.iter().map(|&v| lat(&[v])).collect();
            let e = a.orbit_entourage(&k, &l).unwrap();
            let linv = a.spec.set_inv(&l).unwrap();
            prop_assert_eq!(e.invert(), a.orbit_entourage(&k, &linv).unwrap());
            // composition containment E_{K,L} ∘ E_{K,L2} ⊆ E_{K,L·L2}
            let e2 = a.orbit_entourage(&k, &l2).unwrap();
            let comp = e.compose(&e2).unwrap();
            let prod = a.spec.set_product(&l, &l2).unwrap();
            let ep = a.orbit_entourage(&k, &prod).unwrap();
            prop_assert!(comp.pairs.is_subset(&ep.pairs));
            // uniform local finiteness: fibers no larger than |L|
            for x in 0..q {
                prop_assert!(e.fiber(x).len() <= l.len());
                prop_assert!(e.section(x).len() <= l.len());
            }
            // l_components agree with e_components under the orbit entourage
            let y: Subset = k;
            let viae = e_components(&y, &a.orbit_entourage(&y, &l).unwrap());
            let direct = a.l_components(&y, &l).unwrap();
            prop_assert_eq!(viae, direct);
        }

        #[test]
        fn shrink_multiplicity_monotone(
            q in 6usize..14,
            subsets in proptest::collection::vec(
                proptest::collection::btree_set(0usize..14, 1..6), 1..5),
        ) {
            let a = FiniteAction::cyclic_translation(q, 10).unwrap();
            let subsets: Vec<Subset> = subsets
                .into_iter()
                .map(|s| s.into_iter().filter(|&x| x < q).collect::<Subset>())
                .filter(|s: &Subset| !s.is_empty())
                .collect();
            prop_assume!(!subsets.is_empty());
            let cover = Cover::from_subsets(q, subsets).unwrap();
            let l = lset(&[0, 1, -1]);
            let (shrunk, _) = a.shrink_cover(&cover, &l).unwrap();
            let m = a.alpha_l_multiplicity(&shrunk, &l).unwrap();
            prop_assert!(m <= multiplicity(&cover));
        }
    }
}
