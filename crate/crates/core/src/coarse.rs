//! Finite coarse-space primitives: entourages as explicit pair sets,
//! connectivity, neighborhoods and cores, multiplicities, and checkers for
//! bounded-cover dimension witnesses.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, Report};

/// Candidate budget for exhaustive clique searches.
pub const DEFAULT_SEARCH_BUDGET: usize = 10_000_000;

pub type Subset = BTreeSet<usize>;

/// A finite point set; points are dense ids 0..size-1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PointSet {
    pub fn new(size: usize) -> Self {
        PointSet { size, labels: None }
    }

    pub fn labeled(labels: Vec<String>) -> Self {
        PointSet { size: labels.len(), labels: Some(labels) }
    }

    pub fn all(&self) -> Subset {
        (0..self.size).collect()
    }
}

/// A finite relation on a point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entourage {
    pub size: usize,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Entourage {
    pub fn new(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        for &(x, y) in &pairs {
            if x >= size || y >= size {
                return Err(Error::Structure(format!(
                    "pair ({x},{y}) outside point set of size {size}"
                )));
            }
        }
        Ok(Entourage { size, pairs })
    }

    /// Materializes a metric-style relation from a predicate.
    pub fn from_predicate(size: usize, mut close: impl FnMut(usize, usize) -> bool) -> Self {
        let mut pairs = BTreeSet::new();
        for x in 0..size {
            for y in 0..size {
                if close(x, y) {
                    pairs.insert((x, y));
                }
            }
        }
        Entourage { size, pairs }
    }

    pub fn diagonal(size: usize) -> Self {
        Entourage { size, pairs: (0..size).map(|i| (i, i)).collect() }
    }

    fn check_base(&self, other: &Entourage) -> Result<()> {
        if self.size != other.size {
            return Err(Error::Structure(format!(
                "entourage base mismatch: {} vs {}",
                self.size, other.size
            )));
        }
        Ok(())
    }

    pub fn invert(&self) -> Entourage {
        Entourage {
            size: self.size,
            pairs: self.pairs.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// {(x,y) : ∃z (x,z) ∈ self ∧ (z,y) ∈ other}.
    pub fn compose(&self, other: &Entourage) -> Result<Entourage> {
        self.check_base(other)?;
        let mut by_first: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(z, y) in &other.pairs {
            by_first.entry(z).or_default().push(y);
        }
        let mut pairs = BTreeSet::new();
        for &(x, z) in &self.pairs {
            if let Some(ys) = by_first.get(&z) {
                for &y in ys {
                    pairs.insert((x, y));
                }
            }
        }
        Ok(Entourage { size: self.size, pairs })
    }

    pub fn union(&self, other: &Entourage) -> Result<Entourage> {
        self.check_base(other)?;
        Ok(Entourage {
            size: self.size,
            pairs: self.pairs.union(&other.pairs).cloned().collect(),
        })
    }

    pub fn restrict(&self, y: &Subset) -> Entourage {
        Entourage {
            size: self.size,
            pairs: self
                .pairs
                .iter()
                .filter(|(a, b)| y.contains(a) && y.contains(b))
                .cloned()
                .collect(),
        }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(&(x, y))
    }

    /// self ∪ self^{-1} ∪ Δ.
    pub fn symmetrized_reflexive(&self) -> Entourage {
        let mut pairs = self.pairs.clone();
        pairs.extend(self.pairs.iter().map(|&(x, y)| (y, x)));
        pairs.extend((0..self.size).map(|i| (i, i)));
        Entourage { size: self.size, pairs }
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(x, y)| self.pairs.contains(&(y, x)))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|i| self.pairs.contains(&(i, i)))
    }

    /// E(y) = {x : (x,y) ∈ E} — the fiber over y.
    pub fn fiber(&self, y: usize) -> Subset {
        self.pairs.iter().filter(|&&(_, b)| b == y).map(|&(a, _)| a).collect()
    }

    /// Section at x: {y : (x,y) ∈ E}.
    pub fn section(&self, x: usize) -> Subset {
        self.pairs.iter().filter(|&&(a, _)| a == x).map(|&(_, b)| b).collect()
    }

    /// A × A ⊆ self.
    pub fn bounds(&self, a: &Subset) -> bool {
        a.iter().all(|&x| a.iter().all(|&y| self.contains(x, y)))
    }

    /// First violating pair of `bounds`, if any.
    pub fn unbounded_pair(&self, a: &Subset) -> Option<(usize, usize)> {
        for &x in a {
            for &y in a {
                if !self.contains(x, y) {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

/// E-neighborhood of A: {x : ∃ y ∈ A, (x,y) ∈ E}.
pub fn e_neighborhood(a: &Subset, e: &Entourage) -> Subset {
    e.pairs.iter().filter(|(_, y)| a.contains(y)).map(|&(x, _)| x).collect()
}

/// E-core of A: {y : E(y) ⊆ A} where E(y) is the fiber over y.
pub fn e_core(a: &Subset, e: &Entourage) -> Subset {
    (0..e.size).filter(|&y| e.fiber(y).is_subset(a)).collect()
}

/// E-connected components of Y: equivalence classes of the relation generated
/// over Y by E ∪ E^{-1}. Returned sorted by least element.
pub fn e_components(y: &Subset, e: &Entourage) -> Vec<Subset> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &e.pairs {
        if y.contains(&a) && y.contains(&b) {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
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
            if let Some(ns) = adj.get(&v) {
                for &n in ns {
                    if !comp.contains(&n) {
                        stack.push(n);
                    }
                }
            }
        }
        seen.extend(comp.iter());
        out.push(comp);
    }
    out
}

/// One named member of a cover, optionally colored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub name: String,
    pub points: Subset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<usize>,
}

/// A named family of nonempty point subsets; members may overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub size: usize,
    pub members: Vec<Member>,
}

impl Cover {
    pub fn new(size: usize, members: Vec<Member>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for m in &members {
            if m.points.is_empty() {
                return Err(Error::Structure(format!("empty member {:?}", m.name)));
            }
            if m.points.iter().any(|&p| p >= size) {
                return Err(Error::Structure(format!(
                    "member {:?} has a point outside the base",
                    m.name
                )));
            }
            if !names.insert(&m.name) {
                return Err(Error::Structure(format!("duplicate member name {:?}", m.name)));
            }
        }
        Ok(Cover { size, members })
    }

    pub fn from_subsets(size: usize, subsets: Vec<Subset>) -> Result<Self> {
        let members = subsets
            .into_iter()
            .enumerate()
            .map(|(i, points)| Member { name: format!("U{i}"), points, color: None })
            .collect();
        Cover::new(size, members)
    }

    pub fn union(&self) -> Subset {
        self.members.iter().flat_map(|m| m.points.iter().cloned()).collect()
    }

    pub fn covers(&self, y: &Subset) -> bool {
        y.is_subset(&self.union())
    }

    /// Member-wise image; empty images are dropped. Returns the new cover and
    /// the number of members dropped.
    pub fn map_members(&self, mut f: impl FnMut(&Subset) -> Subset) -> (Cover, usize) {
        let mut members = Vec::new();
        let mut dropped = 0;
        for m in &self.members {
            let points = f(&m.points);
            if points.is_empty() {
                dropped += 1;
            } else {
                members.push(Member { name: m.name.clone(), points, color: m.color });
            }
        }
        (Cover { size: self.size, members }, dropped)
    }
}

/// Ordinary multiplicity: max over points of the number of members containing
/// it.
pub fn multiplicity(cover: &Cover) -> usize {
    (0..cover.size)
        .map(|x| cover.members.iter().filter(|m| m.points.contains(&x)).count())
        .max()
        .unwrap_or(0)
}

/// E-multiplicity: the largest number of members met by a single family of
/// pairwise (E ∪ Δ ∪ E^{-1})-close transversal points. Repeated transversal
/// points are allowed, so this equals the maximum over cliques C of the
/// symmetrized closeness graph of the number of members meeting C.
pub fn e_multiplicity(cover: &Cover, e: &Entourage) -> Result<usize> {
    e_multiplicity_budgeted(cover, e, DEFAULT_SEARCH_BUDGET)
}

pub fn e_multiplicity_budgeted(cover: &Cover, e: &Entourage, budget: usize) -> Result<usize> {
    if e.size != cover.size {
        return Err(Error::Structure("entourage/cover base mismatch".into()));
    }
    let n = cover.size;
    let sym = e.symmetrized_reflexive();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(x, y) in &sym.pairs {
        if x != y {
            adj[x].insert(y);
            adj[y].insert(x);
        }
    }
    let mut best = 0usize;
    let mut spent = 0usize;
    let mut r: Vec<usize> = Vec::new();
    let p: BTreeSet<usize> = (0..n).collect();
    let mut visit = |clique: &[usize]| -> usize {
        cover
            .members
            .iter()
            .filter(|m| clique.iter().any(|x| m.points.contains(x)))
            .count()
    };
    bron_kerbosch(&adj, &mut r, p, BTreeSet::new(), &mut spent, budget, &mut best, &mut visit)?;
    Ok(best)
}

/// Bron–Kerbosch with pivoting over maximal cliques; `budget` caps the number
/// of expansion steps. Exceeding it surfaces the best bound found so far.
#[allow(clippy::too_many_arguments)]
fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    p: BTreeSet<usize>,
    x: BTreeSet<usize>,
    spent: &mut usize,
    budget: usize,
    best: &mut usize,
    visit: &mut impl FnMut(&[usize]) -> usize,
) -> Result<()> {
    *spent += 1;
    if *spent > budget {
        return Err(Error::BudgetExceeded { lower_bound: *best });
    }
    if p.is_empty() && x.is_empty() {
        if !r.is_empty() {
            *best = (*best).max(visit(r));
        }
        return Ok(());
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&&u| p.intersection(&adj[u]).count())
        .cloned();
    let candidates: Vec<usize> = match pivot {
        Some(u) => p.iter().filter(|v| !adj[u].contains(v)).cloned().collect(),
        None => p.iter().cloned().collect(),
    };
    let mut p = p;
    let mut x = x;
    for v in candidates {
        r.push(v);
        let np: BTreeSet<usize> = p.intersection(&adj[v]).cloned().collect();
        let nx: BTreeSet<usize> = x.intersection(&adj[v]).cloned().collect();
        bron_kerbosch(adj, r, np, nx, spent, budget, best, visit)?;
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
    Ok(())
}

/// Which of the three equivalent witness condition sets to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessStyle {
    /// A supplied (d+1)-coloring with E-separated colors.
    Separated,
    /// Multiplicity ≤ d+1 plus E-wideness.
    Mult,
    /// E-multiplicity ≤ d+1.
    MultWide,
}

/// Checks a bounded-cover dimension witness: members W-bounded plus the
/// style-selected condition set. Each clause is reported with a violating
/// point or pair on failure.
pub fn check_asdim_witness(
    cover: &Cover,
    e: &Entourage,
    w: &Entourage,
    d: usize,
    style: WitnessStyle,
) -> Result<Report> {
    if e.size != cover.size || w.size != cover.size {
        return Err(Error::Structure("entourage/cover base mismatch".into()));
    }
    let mut report = Report::new("asdim-witness");

    let uncovered: Vec<usize> =
        (0..cover.size).filter(|x| !cover.union().contains(x)).collect();
    report.push(if uncovered.is_empty() {
        Check::pass("coverage")
    } else {
        Check::fail("coverage", format!("point {} not covered", uncovered[0]))
    });

    let mut bound_violation = None;
    for m in &cover.members {
        if let Some((x, y)) = w.unbounded_pair(&m.points) {
            bound_violation = Some(format!("member {:?}: pair ({x},{y}) not in W", m.name));
            break;
        }
    }
    report.push(match bound_violation {
        None => Check::pass("boundedness"),
        Some(v) => Check::fail("boundedness", v),
    });

    match style {
        WitnessStyle::Separated => {
            if cover.members.iter().any(|m| m.color.is_none()) {
                return Err(Error::Precondition(
                    "style=separated needs a color on every member".into(),
                ));
            }
            let bad_color = cover
                .members
                .iter()
                .find(|m| m.color.unwrap() > d)
                .map(|m| format!("member {:?} has color {} > d={d}", m.name, m.color.unwrap()));
            report.push(match bad_color {
                None => Check::pass("color-count"),
                Some(v) => Check::fail("color-count", v),
            });
            let mut sep_violation = None;
            let sym = e.symmetrized_reflexive();
            'outer: for (i, m1) in cover.members.iter().enumerate() {
                for m2 in cover.members.iter().skip(i + 1) {
                    if m1.color != m2.color {
                        continue;
                    }
                    for &x in &m1.points {
                        for &y in &m2.points {
                            if x != y && sym.contains(x, y) {
                                sep_violation = Some(format!(
                                    "same-color members {:?},{:?}: E-close pair ({x},{y})",
                                    m1.name, m2.name
                                ));
                                break 'outer;
                            }
                        }
                    }
                    // A shared point also breaks disjointness of a color class.
                    if let Some(p) = m1.points.intersection(&m2.points).next() {
                        sep_violation = Some(format!(
                            "same-color members {:?},{:?} share point {p}",
                            m1.name, m2.name
                        ));
                        break 'outer;
                    }
                }
            }
            report.push(match sep_violation {
                None => Check::pass("color-separation"),
                Some(v) => Check::fail("color-separation", v),
            });
        }
        WitnessStyle::Mult => {
            let mult = multiplicity(cover);
            report.push(if mult <= d + 1 {
                Check::pass_with("multiplicity", format!("{mult} <= {}", d + 1))
            } else {
                let x = (0..cover.size)
                    .find(|x| {
                        cover.members.iter().filter(|m| m.points.contains(x)).count() > d + 1
                    })
                    .unwrap();
                Check::fail("multiplicity", format!("{mult} > {}: point {x} overlaps", d + 1))
            });
            let narrow = (0..cover.size).find(|&x| {
                let ex = e.section(x);
                !cover.members.iter().any(|m| ex.is_subset(&m.points))
            });
            report.push(match narrow {
                None => Check::pass("wideness"),
                Some(x) => Check::fail("wideness", format!("no member contains E({x})")),
            });
        }
        WitnessStyle::MultWide => {
            let em = e_multiplicity(cover, e)?;
            report.push(if em <= d + 1 {
                Check::pass_with("e-multiplicity", format!("{em} <= {}", d + 1))
            } else {
                Check::fail("e-multiplicity", format!("{em} > {}", d + 1))
            });
        }
    }
    Ok(report)
}

/// Greedy finitary probe: for each listed finite subset, tries to synthesize
/// a W-bounded cover with E-multiplicity ≤ d+1 by sweeping ids in order and
/// growing a member while it stays W-bounded. A failure is inconclusive (the
/// synthesizer is greedy, not exhaustive) and is flagged as such with the
/// achieved E-multiplicity.
pub fn finitary_asdim_probe(
    families: &[Subset],
    e: &Entourage,
    w: &Entourage,
    d: usize,
) -> Result<Report> {
    let mut report = Report::new("finitary-probe");
    for (i, y) in families.iter().enumerate() {
        let name = format!("Y{i}");
        if y.is_empty() {
            report.push(Check::pass_with(&name, "empty subset: empty cover"));
            continue;
        }
        let mut blocks: Vec<Subset> = Vec::new();
        let mut current: Subset = BTreeSet::new();
        for &x in y {
            let mut grown = current.clone();
            grown.insert(x);
            if w.bounds(&grown) {
                current = grown;
            } else {
                if !current.is_empty() {
                    blocks.push(current);
                }
                current = [x].into();
            }
        }
        if !current.is_empty() {
            blocks.push(current);
        }
        if blocks.iter().any(|b| !w.bounds(b)) {
            report.push(Check::fail(
                &name,
                "inconclusive: even singleton members are not W-bounded".to_string(),
            ));
            continue;
        }
        if y.iter().any(|&x| x >= e.size) {
            return Err(Error::Structure(format!("{name} has points outside the base")));
        }
        let cover = Cover::from_subsets(e.size, blocks)?;
        let em = e_multiplicity(&cover, &e.restrict(y))?;
        if em <= d + 1 {
            report.push(Check::pass_with(
                &name,
                format!("found: {} members, E-multiplicity {em}", cover.members.len()),
            ));
        } else {
            report.push(Check::fail(
                &name,
                format!(
                    "inconclusive: greedy cover has E-multiplicity {em} > {} ({} members)",
                    d + 1,
                    cover.members.len()
                ),
            ));
        }
    }
    Ok(report)
}

/// Exact minimal witness degree for small subsets: the least d such that some
/// partition of Y into at most `max_members` W-bounded blocks has
/// E-multiplicity ≤ d+1. Partitions suffice: any cover refines to one without
/// increasing E-multiplicity. Returns None when no W-bounded partition with
/// that many blocks exists.
pub fn exact_min_asdim(
    y: &Subset,
    e: &Entourage,
    w: &Entourage,
    max_members: usize,
) -> Result<Option<usize>> {
    if y.len() > 16 {
        return Err(Error::Capability("exact search limited to |Y| <= 16".into()));
    }
    let pts: Vec<usize> = y.iter().cloned().collect();
    let er = e.restrict(y);
    let mut best: Option<usize> = None;
    let mut blocks: Vec<Subset> = Vec::new();
    let mut spent = 0usize;
    search_partitions(&pts, 0, &mut blocks, max_members, w, &er, &mut best, &mut spent)?;
    Ok(best.map(|m| m.saturating_sub(1)))
}

#[allow(clippy::too_many_arguments)]
fn search_partitions(
    pts: &[usize],
    i: usize,
    blocks: &mut Vec<Subset>,
    max_members: usize,
    w: &Entourage,
    e: &Entourage,
    best: &mut Option<usize>,
    spent: &mut usize,
) -> Result<()> {
    *spent += 1;
    if *spent > DEFAULT_SEARCH_BUDGET {
        return Err(Error::BudgetExceeded { lower_bound: 0 });
    }
    if i == pts.len() {
        let cover = Cover::from_subsets(e.size, blocks.clone())?;
        let em = e_multiplicity(&cover, e)?;
        if best.map_or(true, |b| em < b) {
            *best = Some(em);
        }
        return Ok(());
    }
    // Best possible result is 1 member met; stop early once achieved.
    if *best == Some(1) {
        return Ok(());
    }
    let x = pts[i];
    for b in 0..blocks.len() {
        let mut grown = blocks[b].clone();
        grown.insert(x);
        if w.bounds(&grown) {
            blocks[b].insert(x);
            search_partitions(pts, i + 1, blocks, max_members, w, e, best, spent)?;
            blocks[b].remove(&x);
        }
    }
    if blocks.len() < max_members && w.contains(x, x) {
        blocks.push([x].into());
        search_partitions(pts, i + 1, blocks, max_members, w, e, best, spent)?;
        blocks.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(n: usize, k: i64) -> Entourage {
        Entourage::from_predicate(n, |x, y| (x as i64 - y as i64).abs() <= k)
    }

    #[test]
    fn set_operations() {
        let e = Entourage::new(3, [(0, 1)]).unwrap();
        assert_eq!(e.invert().pairs, [(1, 0)].into());
        let f = Entourage::new(3, [(1, 2)]).unwrap();
        assert_eq!(e.compose(&f).unwrap().pairs, [(0, 2)].into());
        let g = Entourage::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.restrict(&[0, 1].into()).pairs, [(0, 1)].into());
    }

    #[test]
    fn components_on_a_line() {
        let e = line(10, 1);
        let y: Subset = [0, 1, 2, 5, 6].into();
        let comps = e_components(&y, &e);
        assert_eq!(comps, vec![[0, 1, 2].into(), [5, 6].into()]);
        // pairwise separated
        for (i, a) in comps.iter().enumerate() {
            for b in comps.iter().skip(i + 1) {
                for &x in a {
                    for &y in b {
                        assert!(!e.contains(x, y) && !e.contains(y, x));
                    }
                }
            }
        }
        let d = Entourage::diagonal(10);
        assert_eq!(e_components(&y, &d).len(), 5);
        assert!(e_components(&BTreeSet::new(), &e).is_empty());
    }

    #[test]
    fn neighborhood_and_core() {
        let e = line(10, 1);
        let a: Subset = [3, 4, 5].into();
        assert_eq!(e_neighborhood(&a, &e), (2..=6).collect::<Subset>());
        assert_eq!(e_core(&a, &e), [4].into());
        let d = Entourage::diagonal(10);
        assert_eq!(e_neighborhood(&a, &d), a);
        assert_eq!(e_core(&a, &d), a);
    }

    fn blocks_cover() -> Cover {
        Cover::from_subsets(12, (0..4).map(|i| (3 * i..3 * i + 3).collect()).collect())
            .unwrap()
    }

    #[test]
    fn multiplicities() {
        let c = blocks_cover();
        assert_eq!(multiplicity(&c), 1);
        assert_eq!(e_multiplicity(&c, &Entourage::diagonal(12)).unwrap(), 1);
        let e = Entourage::from_predicate(12, |x, y| {
            let d = (x as i64 - y as i64).rem_euclid(12).min((y as i64 - x as i64).rem_euclid(12));
            d <= 1
        });
        assert_eq!(e_multiplicity(&c, &e).unwrap(), 2);
        let one = Cover::from_subsets(5, vec![(0..5).collect()]).unwrap();
        assert_eq!(multiplicity(&one), 1);
        assert_eq!(e_multiplicity(&one, &line(5, 2)).unwrap(), 1);
    }

    fn interval_witness() -> (Cover, Entourage, Entourage) {
        // Intervals [10k-4, 10k+5] ∩ [0,99], alternately colored.
        let mut members = Vec::new();
        for k in 0..=10i64 {
            let lo = (10 * k - 4).max(0);
            let hi = (10 * k + 5).min(99);
            if lo > hi {
                continue;
            }
            members.push(Member {
                name: format!("I{k}"),
                points: (lo as usize..=hi as usize).collect(),
                color: Some((k % 2) as usize),
            });
        }
        let cover = Cover::new(100, members).unwrap();
        (cover, line(100, 3), line(100, 9))
    }

    #[test]
    fn asdim_witness_line_intervals() {
        let (cover, e, w) = interval_witness();
        let r = check_asdim_witness(&cover, &e, &w, 1, WitnessStyle::Separated).unwrap();
        assert!(r.pass, "{:?}", r.failing());
        // d=0 fails: the tiling is too narrow for E=|i-j|<=3 (boundary point
        // reported), and the 2-coloring has too many colors.
        let r0 = check_asdim_witness(&cover, &e, &w, 0, WitnessStyle::Mult).unwrap();
        assert!(!r0.pass);
        assert!(!r0.check("wideness").unwrap().pass);
        let r0s = check_asdim_witness(&cover, &e, &w, 0, WitnessStyle::Separated).unwrap();
        assert!(!r0s.pass);
        // multWide agrees at d=1
        let rw = check_asdim_witness(&cover, &e, &w, 1, WitnessStyle::MultWide).unwrap();
        assert!(rw.pass, "{:?}", rw.failing());
    }

    #[test]
    fn asdim_witness_trivial_cover() {
        let cover = Cover::from_subsets(8, vec![(0..8).collect()]).unwrap();
        let w = Entourage::from_predicate(8, |_, _| true);
        let e = line(8, 1);
        let r = check_asdim_witness(&cover, &e, &w, 0, WitnessStyle::Mult).unwrap();
        assert!(r.check("boundedness").unwrap().pass);
        assert!(r.check("multiplicity").unwrap().pass);
    }

    #[test]
    fn separated_needs_colors() {
        let cover = Cover::from_subsets(4, vec![(0..4).collect()]).unwrap();
        let w = Entourage::from_predicate(4, |_, _| true);
        let e = Entourage::diagonal(4);
        assert!(matches!(
            check_asdim_witness(&cover, &e, &w, 0, WitnessStyle::Separated),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn finitary_probe_line() {
        let e = line(100, 2);
        let w = line(100, 8);
        let ys: Vec<Subset> = vec![(0..30).collect(), [7].into()];
        let r = finitary_asdim_probe(&ys, &e, &w, 1).unwrap();
        assert!(r.pass, "{:?}", r.checks);
        // W = Δ with a connected pair: singletons, inconclusive, E-mult shown
        let r2 = finitary_asdim_probe(
            &[(0..4).collect()],
            &line(100, 1),
            &Entourage::diagonal(100),
            0,
        )
        .unwrap();
        assert!(!r2.pass);
        let detail = r2.checks[0].detail.clone().unwrap();
        assert!(detail.contains("inconclusive") && detail.contains("E-multiplicity 2"));
    }

    #[test]
    fn exact_search_small_line() {
        let y: Subset = (0..12).collect();
        let e = line(12, 1);
        let w = line(12, 4);
        assert_eq!(exact_min_asdim(&y, &e, &w, 6).unwrap(), Some(1));
        // Bounded-by-everything: a single member suffices, d = 0.
        let full = Entourage::from_predicate(12, |_, _| true);
        assert_eq!(exact_min_asdim(&y, &e, &full, 6).unwrap(), Some(0));
        // W empty: no partition at all.
        let empty = Entourage::new(12, []).unwrap();
        assert_eq!(exact_min_asdim(&y, &e, &empty, 6).unwrap(), None);
    }

    #[test]
    fn cover_serde_shape() {
        let c = blocks_cover();
        let j = serde_json::to_string(&c).unwrap();
        let back: Cover = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
        let e = Entourage::new(3, [(0, 1), (2, 2)]).unwrap();
        let j = serde_json::to_value(&e).unwrap();
        assert_eq!(j["pairs"][0][0], 0);
        let back: Entourage = serde_json::from_value(j).unwrap();
        assert_eq!(back, e);
    }

    prop_compose! {
        fn arb_entourage(n: usize)(pairs in proptest::collection::btree_set((0..n, 0..n), 0..40)) -> Entourage {
            Entourage { size: n, pairs }
        }
    }

    prop_compose! {
        fn arb_cover(n: usize)(subsets in proptest::collection::vec(
            proptest::collection::btree_set(0..n, 1..8), 1..6)) -> Cover {
            Cover::from_subsets(n, subsets).unwrap()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn restrict_never_increases_e_multiplicity(
            cover in arb_cover(20),
            e in arb_entourage(20),
            y in proptest::collection::btree_set(0usize..20, 0..20),
        ) {
            let full = e_multiplicity(&cover, &e).unwrap();
            let (restricted, _) = cover.map_members(|p| p.intersection(&y).cloned().collect());
            let sub = e_multiplicity(&restricted, &e.restrict(&y)).unwrap();
            prop_assert!(sub <= full);
        }

        #[test]
        fn shrink_enlarge_monotonicity(
            cover in arb_cover(20),
            e in arb_entourage(20),
        ) {
            let e = e.symmetrized_reflexive();
            // mult_E(core-shrunk cover) ≤ mult(cover)
            let (shrunk, _) = cover.map_members(|p| e_core(p, &e));
            prop_assert!(e_multiplicity(&shrunk, &e).unwrap() <= multiplicity(&cover));
            // mult(neighborhood-enlarged cover) ≤ mult_{E∘E}(cover)
            let (grown, _) = cover.map_members(|p| e_neighborhood(p, &e));
            let ee = e.compose(&e).unwrap();
            prop_assert!(multiplicity(&grown) <= e_multiplicity(&cover, &ee).unwrap());
        }

        #[test]
        fn components_are_separated(
            e in arb_entourage(20),
            y in proptest::collection::btree_set(0usize..20, 0..20),
        ) {
            let comps = e_components(&y, &e);
            let mut seen: Subset = BTreeSet::new();
            for c in &comps {
                for x in c {
                    prop_assert!(seen.insert(*x));
                }
            }
            prop_assert_eq!(seen, y);
            for (i, a) in comps.iter().enumerate() {
                for b in comps.iter().skip(i + 1) {
                    for &x in a {
                        for &z in b {
                            prop_assert!(!e.contains(x, z) && !e.contains(z, x));
                        }
                    }
                }
            }
        }

        #[test]
        fn diagonal_e_multiplicity_is_multiplicity(cover in arb_cover(20)) {
            let d = Entourage::diagonal(20);
            prop_assert_eq!(e_multiplicity(&cover, &d).unwrap(), multiplicity(&cover));
        }
    }
}
