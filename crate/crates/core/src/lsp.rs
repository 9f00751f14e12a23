//! Large-scale packing constants: an exact small-scale oracle (bad-max) and
//! growth-counting certificates for lattice, finite abelian, virtually
//! cyclic and Heisenberg realizations.
//!
//! Word metric convention is right-invariant, d(g,h) = ℓ(gh⁻¹): closeness of
//! g, g' means g·g'⁻¹ ∈ B.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::coarse::{multiplicity, Subset};
use crate::dynamics::FiniteAction;
use crate::error::{Error, Result};
use crate::groups::{BallTable, GroupElement, GroupKind, GroupSpec};
use crate::rational;
use crate::report::{Check, Report};

/// Certificate that (B, m) satisfies the packing condition for degree d: by
/// the counting inequality (d+1)·Gr(3R/2+r) < (m+1)·Gr(R/2), any m+1 points
/// of a ball-of-L translate contain d+2 pairwise B-close ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LspCertificate {
    pub spec: GroupSpec,
    pub d: usize,
    pub r: u32,
    /// The even packing radius R with B = B(R).
    pub big_r: u32,
    pub b: Vec<GroupElement>,
    pub m: u64,
    /// (d+1)·Gr(3R/2+r).
    pub lhs: u64,
    /// (m+1)·Gr(R/2).
    pub rhs: u64,
    /// Fitted polynomial-growth constants (C, D, degree, window hi) for the
    /// nilpotent case; the certificate is valid for radii inside the window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted: Option<FittedGrowth>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedGrowth {
    pub degree: u32,
    /// "p/q" rendering of the exact fitted constants.
    pub c_lower: String,
    pub d_upper: String,
    pub window_hi: u32,
}

impl LspCertificate {
    pub fn b_set(&self) -> BTreeSet<GroupElement> {
        self.b.iter().cloned().collect()
    }
}

/// Maximum length of a tuple from BL (repetition allowed) avoiding any d+2
/// pairwise B-close entries: the maximum of Σ μ(v) over assignments
/// μ: BL → {0..d+1} whose sum over every clique of the closeness graph is at
/// most d+1. For d = 0 this is the maximum independent set.
pub fn lsp_bad_max(
    spec: &GroupSpec,
    bl: &BTreeSet<GroupElement>,
    b: &BTreeSet<GroupElement>,
    d: usize,
) -> Result<usize> {
    if !b.contains(&spec.identity()) {
        return Err(Error::Argument("B must contain the identity".into()));
    }
    for g in b {
        if !b.contains(&spec.inv(g)?) {
            return Err(Error::Argument("B must be symmetric".into()));
        }
    }
    let cap = if d == 0 { 40 } else { 25 };
    if bl.len() > cap {
        return Err(Error::Capability(format!(
            "bad-max exact search limited to |BL| <= {cap} for d = {d}"
        )));
    }
    let verts: Vec<&GroupElement> = bl.iter().collect();
    let n = verts.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let diff = spec.mul(verts[i], &spec.inv(verts[j])?)?;
            if b.contains(&diff) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let cliques = maximal_cliques(&adj);
    // per-vertex clique membership
    let mut in_cliques: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in cliques.iter().enumerate() {
        for &v in c {
            in_cliques[v].push(ci);
        }
    }
    let cap_per_clique = d + 1;
    let mut sums = vec![0usize; cliques.len()];
    let mut best = 0usize;
    let mut spent = 0usize;
    branch_assign(
        0,
        0,
        &mut sums,
        &in_cliques,
        cap_per_clique,
        n,
        &mut best,
        &mut spent,
    )?;
    Ok(best)
}

fn maximal_cliques(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    fn bk(
        adj: &[BTreeSet<usize>],
        r: &mut Vec<usize>,
        p: BTreeSet<usize>,
        x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            if !r.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&&u| p.intersection(&adj[u]).count())
            .cloned();
        let cands: Vec<usize> = match pivot {
            Some(u) => p.iter().filter(|v| !adj[u].contains(v)).cloned().collect(),
            None => p.iter().cloned().collect(),
        };
        let mut p = p;
        let mut x = x;
        for v in cands {
            r.push(v);
            let np = p.intersection(&adj[v]).cloned().collect();
            let nx = x.intersection(&adj[v]).cloned().collect();
            bk(adj, r, np, nx, out);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    bk(adj, &mut r, (0..adj.len()).collect(), BTreeSet::new(), &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn branch_assign(
    v: usize,
    current: usize,
    sums: &mut Vec<usize>,
    in_cliques: &[Vec<usize>],
    cap: usize,
    n: usize,
    best: &mut usize,
    spent: &mut usize,
) -> Result<()> {
    *spent += 1;
    if *spent > crate::coarse::DEFAULT_SEARCH_BUDGET {
        return Err(Error::BudgetExceeded { lower_bound: *best });
    }
    if v == n {
        *best = (*best).max(current);
        return Ok(());
    }
    // optimistic completion: each remaining vertex adds at most its tightest
    // remaining clique capacity
    let optimistic: usize = (v..n)
        .map(|w| {
            in_cliques[w]
                .iter()
                .map(|&ci| cap - sums[ci])
                .min()
                .unwrap_or(cap)
        })
        .sum();
    if current + optimistic <= *best {
        return Ok(());
    }
    let max_here = in_cliques[v]
        .iter()
        .map(|&ci| cap - sums[ci])
        .min()
        .unwrap_or(cap);
    for mu in (0..=max_here).rev() {
        for &ci in &in_cliques[v] {
            sums[ci] += mu;
        }
        branch_assign(v + 1, current + mu, sums, in_cliques, cap, n, best, spent)?;
        for &ci in &in_cliques[v] {
            sums[ci] -= mu;
        }
    }
    Ok(())
}

/// Tightest exact rationals with C·n^k ≤ Gr(n) ≤ D·n^k + 1 over n ∈
/// [1, radius].
pub fn fit_growth_constants(table: &BallTable, k: u32) -> Result<(BigRational, BigRational)> {
    if k == 0 {
        return Err(Error::Argument("growth degree must be >= 1".into()));
    }
    if table.radius < 4 {
        return Err(Error::Argument("fit needs ball radius >= 4".into()));
    }
    let mut c: Option<BigRational> = None;
    let mut d: Option<BigRational> = None;
    for n in 1..=table.radius {
        let nk = rational::rat_int(n as i64).pow(k as i32);
        let lower = rational::rat_int(table.gr(n) as i64) / &nk;
        let upper = rational::rat_int(table.gr(n) as i64 - 1) / &nk;
        c = Some(match c {
            None => lower.clone(),
            Some(cur) => cur.min(lower),
        });
        d = Some(match d {
            None => upper.clone(),
            Some(cur) => cur.max(upper),
        });
    }
    Ok((c.unwrap(), d.unwrap()))
}

/// Growth value used by the certificate counting: structured-ball cardinality
/// for abelian/virtually cyclic realizations, word-ball cardinality for the
/// Heisenberg group.
fn growth_value(spec: &GroupSpec, table: Option<&BallTable>, t: u32) -> Result<u64> {
    match &spec.kind {
        GroupKind::Lattice { .. }
        | GroupKind::FiniteAbelian { .. }
        | GroupKind::VirtuallyCyclic { .. } => Ok(spec.structured_ball(t)?.len() as u64),
        GroupKind::Heisenberg => {
            let table = table.ok_or_else(|| {
                Error::Capability("heisenberg certificate needs a ball table".into())
            })?;
            if t > table.radius {
                return Err(Error::CapExceeded(format!(
                    "need Gr({t}) but ball radius is {}",
                    table.radius
                )));
            }
            Ok(table.gr(t))
        }
        GroupKind::Wreath { .. } => {
            Err(Error::Capability("no packing certificate for wreath products".into()))
        }
    }
}

const MAX_CERT_R: u32 = 40;

/// Searches even R ascending until (d+1)·Gr(3R/2+r) < (m+1)·Gr(R/2) with the
/// theorem's target m: 3^rank·(d+1) for abelian realizations, 3(d+1) for
/// virtually cyclic ones, ⌊3^4 (d+1) D/C⌋ for the Heisenberg group with
/// fitted constants.
pub fn lsp_certificate(spec: &GroupSpec, d: usize, r: u32) -> Result<LspCertificate> {
    let (m, table, fitted) = match &spec.kind {
        GroupKind::Lattice { rank } => {
            (3u64.pow(*rank as u32) * (d as u64 + 1), None, None)
        }
        GroupKind::FiniteAbelian { .. } => (d as u64 + 1, None, None),
        GroupKind::VirtuallyCyclic { .. } => (3 * (d as u64 + 1), None, None),
        GroupKind::Heisenberg => {
            let k = 4u32;
            let radius = 12u32.max(3 * MAX_CERT_R / 2 / 4 + r);
            let table = spec.ball(radius.min(14))?;
            let (c, dd) = fit_growth_constants(&table, k)?;
            let m_rat =
                rational::rat_int(3i64.pow(k) * (d as i64 + 1)) * &dd / &c;
            let m = m_rat.floor().to_integer().to_u64().ok_or(Error::Overflow("m"))?;
            let fitted = FittedGrowth {
                degree: k,
                c_lower: rational::render(&c),
                d_upper: rational::render(&dd),
                window_hi: table.radius,
            };
            (m, Some(table), Some(fitted))
        }
        GroupKind::Wreath { .. } => {
            return Err(Error::Capability("no packing certificate for wreath products".into()))
        }
    };

    let mut big_r = 2u32;
    loop {
        let outer = 3 * big_r / 2 + r;
        match growth_value(spec, table.as_ref(), outer) {
            Ok(g_out) => {
                let g_in = growth_value(spec, table.as_ref(), big_r / 2)?;
                let lhs = (d as u64 + 1) * g_out;
                let rhs = (m + 1) * g_in;
                if lhs < rhs {
                    let b: Vec<GroupElement> = match &spec.kind {
                        GroupKind::Heisenberg => table
                            .as_ref()
                            .unwrap()
                            .elements
                            .keys()
                            .filter(|g| {
                                table.as_ref().unwrap().word(g).unwrap().len()
                                    <= big_r as usize
                            })
                            .cloned()
                            .collect(),
                        _ => spec.structured_ball(big_r)?.into_iter().collect(),
                    };
                    return Ok(LspCertificate {
                        spec: spec.clone(),
                        d,
                        r,
                        big_r,
                        b,
                        m,
                        lhs,
                        rhs,
                        fitted,
                    });
                }
            }
            Err(Error::CapExceeded(_)) => {
                return Err(Error::CapExceeded(format!(
                    "counting inequality never satisfied inside the fitted window (R <= {})",
                    big_r - 2
                )))
            }
            Err(e) => return Err(e),
        }
        big_r += 2;
        if big_r > MAX_CERT_R {
            return Err(Error::CapExceeded(format!(
                "counting inequality never satisfied for R <= {MAX_CERT_R}"
            )));
        }
    }
}

/// Runs the greedy B-discrete cover with the certificate's B on a finite
/// action and checks the measured cover multiplicity against the
/// certificate's m.
pub fn lsp_cover_demo(
    a: &FiniteAction,
    l: &BTreeSet<GroupElement>,
    cert: &LspCertificate,
) -> Result<Report> {
    let k: Subset = (0..a.base.size).collect();
    let (_, cover) = crate::covers::greedy_bdiscrete_cover(a, &k, l, &cert.b_set())?;
    let measured = multiplicity(&cover);
    let mut report = Report::new("lsp-cover-demo");
    report.push(if (measured as u64) <= cert.m {
        Check::pass_with(
            "multiplicity",
            format!("measured {measured} <= m = {}", cert.m),
        )
    } else {
        Check::fail(
            "multiplicity",
            format!("measured {measured} > m = {}", cert.m),
        )
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zball(t: i64) -> BTreeSet<GroupElement> {
        (-t..=t).map(|v| GroupElement::Lattice(vec![v])).collect()
    }

    #[test]
    fn bad_max_on_z() {
        let z = GroupSpec::lattice(1).unwrap();
        assert_eq!(lsp_bad_max(&z, &zball(4), &zball(3), 0).unwrap(), 3);
        // singleton
        let single: BTreeSet<GroupElement> = [GroupElement::Lattice(vec![7])].into();
        assert_eq!(lsp_bad_max(&z, &single, &zball(1), 0).unwrap(), 1);
    }

    #[test]
    fn bad_max_complete_graph() {
        let z = GroupSpec::lattice(1).unwrap();
        // B ⊇ BL·BL^{-1}: closeness graph complete, bad-max = d+1
        for d in 0..3usize {
            assert_eq!(lsp_bad_max(&z, &zball(2), &zball(5), d).unwrap(), d + 1);
        }
    }

    #[test]
    fn bad_max_oracle_matches_certificate() {
        let z = GroupSpec::lattice(1).unwrap();
        for r in 1i64..=2 {
            for big_r in [2i64, 4, 6, 8] {
                if big_r < 2 * r {
                    continue;
                }
                let v = lsp_bad_max(&z, &zball(big_r + r), &zball(big_r), 0).unwrap();
                assert_eq!(v, 3, "R={big_r}, r={r}");
            }
        }
    }

    #[test]
    fn certificate_z() {
        let z = GroupSpec::lattice(1).unwrap();
        let cert = lsp_certificate(&z, 0, 1).unwrap();
        assert_eq!(cert.m, 3);
        assert_eq!(cert.big_r, 2);
        assert_eq!(cert.b_set(), zball(2));
        assert_eq!((cert.lhs, cert.rhs), (9, 12));
        assert!(cert.lhs < cert.rhs);
    }

    #[test]
    fn certificate_z2_and_dihedral() {
        let z2 = GroupSpec::lattice(2).unwrap();
        let c2 = lsp_certificate(&z2, 0, 1).unwrap();
        assert_eq!(c2.m, 9);
        assert!(c2.lhs < c2.rhs);
        let dih = GroupSpec::infinite_dihedral().unwrap();
        let cd = lsp_certificate(&dih, 0, 1).unwrap();
        assert_eq!(cd.m, 3);
        assert_eq!(cd.big_r, 2);
        assert!(cd.lhs < cd.rhs);
    }

    #[test]
    fn certificate_heisenberg() {
        let h = GroupSpec::heisenberg().unwrap();
        let cert = lsp_certificate(&h, 0, 1).unwrap();
        assert!(cert.lhs < cert.rhs);
        assert!(cert.fitted.is_some());
        // B symmetric with identity
        let spec = &cert.spec;
        let b = cert.b_set();
        assert!(b.contains(&spec.identity()));
        for g in &b {
            assert!(b.contains(&spec.inv(g).unwrap()));
        }
    }

    #[test]
    fn certificates_symmetric_and_monotone() {
        let z = GroupSpec::lattice(1).unwrap();
        let mut last_m = 0;
        for d in 0..4usize {
            let cert = lsp_certificate(&z, d, 1).unwrap();
            assert!(cert.lhs < cert.rhs);
            let b = cert.b_set();
            assert!(b.contains(&z.identity()));
            for g in &b {
                assert!(b.contains(&z.inv(g).unwrap()));
            }
            assert!(cert.m >= last_m);
            last_m = cert.m;
        }
    }

    #[test]
    fn fit_constants_z() {
        let z = GroupSpec::lattice(1).unwrap();
        let table = z.ball(10).unwrap();
        let (c, d) = fit_growth_constants(&table, 1).unwrap();
        // Gr(n) = 2n+1: C = min (2n+1)/n = 21/10 at n=10, D = max 2n/n = 2
        assert_eq!(c, rational::rat(21, 10));
        assert_eq!(d, rational::rat_int(2));
    }

    #[test]
    fn fit_constants_z2() {
        let z2 = GroupSpec::lattice(2).unwrap();
        let table = z2.ball(8).unwrap();
        let (c, d) = fit_growth_constants(&table, 2).unwrap();
        // Gr(n) = 2n²+2n+1
        let cands_c: BigRational = (1..=8)
            .map(|n: i64| rational::rat(2 * n * n + 2 * n + 1, n * n))
            .min()
            .unwrap();
        let cands_d: BigRational = (1..=8)
            .map(|n: i64| rational::rat(2 * n * n + 2 * n, n * n))
            .max()
            .unwrap();
        assert_eq!(c, cands_c);
        assert_eq!(d, cands_d);
    }

    #[test]
    fn fit_constants_saturated() {
        let g = GroupSpec::finite_abelian(vec![5]).unwrap();
        let table = g.ball(10).unwrap();
        let (c, _) = fit_growth_constants(&table, 1).unwrap();
        // constant growth 5 from n=2 on: C ≤ 5/10
        assert!(c <= rational::rat(5, 10));
    }

    #[test]
    fn cover_demo_cycle() {
        let a = FiniteAction::cyclic_translation(100, 10).unwrap();
        let z = GroupSpec::lattice(1).unwrap();
        let cert = lsp_certificate(&z, 0, 1).unwrap();
        let l = zball(1);
        let r = lsp_cover_demo(&a, &l, &cert).unwrap();
        assert!(r.pass, "{:?}", r.checks);
        assert!(r.checks[0].detail.as_ref().unwrap().contains("measured 3"));
    }

    #[test]
    fn certificate_serde_round_trip() {
        let z = GroupSpec::lattice(1).unwrap();
        let cert = lsp_certificate(&z, 0, 1).unwrap();
        let j = serde_json::to_string(&cert).unwrap();
        let back: LspCertificate = serde_json::from_str(&j).unwrap();
        assert_eq!(back.m, cert.m);
        assert_eq!(back.b_set(), cert.b_set());
    }
}
