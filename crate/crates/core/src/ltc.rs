//! Witness verifiers for long-thin covers with near-orbit selection
//! functions, the extra clauses ((Mu+), connectivity, boundedness), the
//! associated partition-of-unity data, coset-labeled (BLR-style) covers with
//! opaque subgroup predicates, a witness builder for finite acting groups,
//! and the closed-form bound calculators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coarse::{multiplicity, Cover, Member, Subset};
use crate::covers::{invariance_defect, ScalarField};
use crate::dynamics::FiniteAction;
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::report::{Check, Report};

/// A cover whose members each carry a selection map N_C : C → base ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NearOrbitWitness {
    pub cover: Cover,
    /// Keyed by member name; each map is defined on exactly the member's
    /// points.
    pub selection: BTreeMap<String, BTreeMap<usize, usize>>,
}

impl NearOrbitWitness {
    /// Selection totality: defined on exactly each member's points, values
    /// inside the base.
    pub fn validate(&self, size: usize) -> Result<()> {
        for m in &self.cover.members {
            let sel = self.selection.get(&m.name).ok_or_else(|| {
                Error::Structure(format!("no selection for member {:?}", m.name))
            })?;
            let dom: Subset = sel.keys().cloned().collect();
            if dom != m.points {
                return Err(Error::Structure(format!(
                    "selection domain of member {:?} differs from its point set",
                    m.name
                )));
            }
            if sel.values().any(|&y| y >= size) {
                return Err(Error::Structure(format!(
                    "selection of member {:?} leaves the base",
                    m.name
                )));
            }
        }
        Ok(())
    }

    fn sel(&self, name: &str) -> &BTreeMap<usize, usize> {
        &self.selection[name]
    }
}

/// Parameters a witness is verified against. A pass certifies the given
/// instance (this L, K, Θ, d, N), not a dimension value globally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LtcParams {
    pub l: BTreeSet<GroupElement>,
    pub k: Subset,
    pub theta: Cover,
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<BTreeSet<GroupElement>>,
}

fn check_lo(a: &FiniteAction, params: &LtcParams, cover: &Cover) -> Result<Check> {
    for &x in &params.k {
        let orbit = a.orbit_set(x, &params.l)?;
        if !cover.members.iter().any(|m| orbit.is_subset(&m.points)) {
            return Ok(Check::fail(
                "Lo",
                format!("no member contains the L-orbit of point {x}"),
            ));
        }
    }
    Ok(Check::pass("Lo"))
}

fn check_mu(cover: &Cover, d: usize) -> Check {
    let mult = multiplicity(cover);
    Check::of(
        "Mu",
        mult <= d + 1,
        format!("multiplicity {mult} vs d+1 = {}", d + 1),
    )
}

fn check_eq(a: &FiniteAction, params: &LtcParams, w: &NearOrbitWitness) -> Result<Check> {
    for m in &w.cover.members {
        let sel = w.sel(&m.name);
        for g in &params.l {
            let p = a.perm(g)?;
            for (&x, &nx) in sel {
                let gx = p[x];
                if m.points.contains(&gx) && sel[&gx] != p[nx] {
                    return Ok(Check::fail(
                        "Eq",
                        format!(
                            "member {:?}: selection not equivariant at g = {g:?}, x = {x}",
                            m.name
                        ),
                    ));
                }
            }
        }
    }
    Ok(Check::pass("Eq"))
}

fn check_th(params: &LtcParams, w: &NearOrbitWitness) -> Check {
    for m in &w.cover.members {
        let sel = w.sel(&m.name);
        let image: Subset = sel.values().cloned().collect();
        for &y in &image {
            let mut fiber: Subset = sel
                .iter()
                .filter(|(_, &v)| v == y)
                .map(|(&x, _)| x)
                .collect();
            fiber.insert(y);
            if !params.theta.members.iter().any(|t| fiber.is_subset(&t.points)) {
                return Check::fail(
                    "Th",
                    format!(
                        "member {:?}: no Θ-member contains the selection fiber of {y}",
                        m.name
                    ),
                );
            }
        }
    }
    Check::pass("Th")
}

fn check_ca(params: &LtcParams, w: &NearOrbitWitness) -> Check {
    for m in &w.cover.members {
        let image: Subset = w.sel(&m.name).values().cloned().collect();
        if image.len() > params.n {
            return Check::fail(
                "Ca",
                format!(
                    "member {:?}: selection range {} exceeds N = {}",
                    m.name,
                    image.len(),
                    params.n
                ),
            );
        }
    }
    Check::pass("Ca")
}

/// Core clauses: (Lo) local containment of L-orbits over K, (Mu)
/// multiplicity ≤ d+1, (Eq) L-equivariance of the selections, (Th) selection
/// fibers inside Θ-members, (Ca) selection range ≤ N.
pub fn verify_ltc_witness(
    a: &FiniteAction,
    params: &LtcParams,
    w: &NearOrbitWitness,
) -> Result<Report> {
    w.validate(a.base.size)?;
    let mut report = Report::new("ltc-witness");
    report.push(check_lo(a, params, &w.cover)?);
    report.push(check_mu(&w.cover, params.d));
    report.push(check_eq(a, params, w)?);
    report.push(check_th(params, w));
    report.push(check_ca(params, w));
    report.push(Check::pass_with(
        "scope",
        "a pass certifies this witness instance only, not a dimension value",
    ));
    Ok(report)
}

/// Extra clauses: (Mu+) orbitwise multiplicity, (Co) L-connected selection
/// images, (Co+) (L,N)-bounded images, (Bo) B-bounded images. Also returns,
/// per member, the refinement into selection-preimages of the L-connected
/// components of the image.
pub fn verify_ltc_extras(
    a: &FiniteAction,
    params: &LtcParams,
    w: &NearOrbitWitness,
) -> Result<(Report, Vec<Cover>)> {
    w.validate(a.base.size)?;
    let mut report = Report::new("ltc-extras");

    let mult = a.alpha_l_multiplicity(&w.cover, &params.l)?;
    report.push(Check::of(
        "Mu+",
        mult <= params.d + 1,
        format!("(α,L)-multiplicity {mult} vs d+1 = {}", params.d + 1),
    ));

    let mut co = Check::pass("Co");
    let mut co_plus = Check::pass("Co+");
    let mut refinements = Vec::new();
    for m in &w.cover.members {
        let sel = w.sel(&m.name);
        let image: Subset = sel.values().cloned().collect();
        let comps = a.l_components(&image, &params.l)?;
        if comps.len() > 1 && co.pass {
            co = Check::fail(
                "Co",
                format!("member {:?}: image has {} L-components", m.name, comps.len()),
            );
        }
        if co_plus.pass && !a.is_l_bounded(&image, &params.l, params.n)? {
            co_plus = Check::fail(
                "Co+",
                format!("member {:?}: image is not (L,{})-bounded", m.name, params.n),
            );
        }
        let parts: Vec<Member> = comps
            .iter()
            .enumerate()
            .map(|(i, comp)| Member {
                name: format!("{}.{i}", m.name),
                points: sel
                    .iter()
                    .filter(|(_, v)| comp.contains(v))
                    .map(|(&x, _)| x)
                    .collect(),
                color: m.color,
            })
            .collect();
        refinements.push(Cover::new(a.base.size, parts)?);
    }
    report.push(co);
    report.push(co_plus);

    let b = params
        .b
        .as_ref()
        .ok_or_else(|| Error::Argument("the (Bo) clause needs the B parameter".into()))?;
    let mut bo = Check::pass("Bo");
    'bo: for m in &w.cover.members {
        let image: Subset = w.sel(&m.name).values().cloned().collect();
        for &x in &image {
            let reach = a.orbit_set(x, b)?;
            if let Some(y) = image.iter().find(|y| !reach.contains(y)) {
                bo = Check::fail(
                    "Bo",
                    format!("member {:?}: no element of B maps {x} to {y}", m.name),
                );
                break 'bo;
            }
        }
    }
    report.push(bo);

    Ok((report, refinements))
}

/// Partition-of-unity data over a colored witness: clauses (Lo), (Eq), (Th)
/// as for the plain witness, (Bo) when B is supplied, (Pr) vacuous on a
/// finite discrete space, (Fi) shape/disjointness, (Su) supports inside the
/// color unions, (In) invariance defect at most ε, (Un) exact sum 1 on K.
pub fn verify_ltc_pou(
    a: &FiniteAction,
    params: &LtcParams,
    w: &NearOrbitWitness,
    fields: &[ScalarField],
    epsilon: &BigRational,
) -> Result<Report> {
    w.validate(a.base.size)?;
    let mut report = Report::new("ltc-pou");

    let colors = params.d + 1;
    let mut fi = if fields.len() == colors {
        Check::pass_with("Fi", format!("{colors} colors, finite discrete data"))
    } else {
        Check::fail(
            "Fi",
            format!("{} fields for {colors} colors", fields.len()),
        )
    };
    let mut by_color: Vec<Vec<&Member>> = vec![Vec::new(); colors];
    for m in &w.cover.members {
        match m.color {
            Some(c) if c < colors => by_color[c].push(m),
            _ => {
                if fi.pass {
                    fi = Check::fail(
                        "Fi",
                        format!("member {:?} has no color below d+1", m.name),
                    );
                }
            }
        }
    }
    for (c, members) in by_color.iter().enumerate() {
        for (i, m1) in members.iter().enumerate() {
            for m2 in &members[i + 1..] {
                if m1.points.intersection(&m2.points).next().is_some() && fi.pass {
                    fi = Check::fail(
                        "Fi",
                        format!(
                            "color {c}: members {:?} and {:?} intersect",
                            m1.name, m2.name
                        ),
                    );
                }
            }
        }
    }
    report.push(fi);

    report.push(check_lo(a, params, &w.cover)?);
    report.push(check_eq(a, params, w)?);
    report.push(check_th(params, w));

    if let Some(b) = &params.b {
        let mut bo = Check::pass("Bo");
        'bo: for m in &w.cover.members {
            for &x in &m.points {
                let reach = a.orbit_set(x, b)?;
                if let Some(y) = m.points.iter().find(|y| !reach.contains(y)) {
                    bo = Check::fail(
                        "Bo",
                        format!("member {:?}: no element of B maps {x} to {y}", m.name),
                    );
                    break 'bo;
                }
            }
        }
        report.push(bo);
    } else {
        report.push(Check::pass_with("Bo", "skipped: no B supplied"));
    }

    report.push(Check::pass_with("Pr", "vacuously true (finite discrete)"));

    let mut su = Check::pass("Su");
    for (c, f) in fields.iter().enumerate() {
        if c >= colors {
            break;
        }
        let mut union: Subset = BTreeSet::new();
        for m in &by_color[c] {
            union.extend(m.points.iter());
        }
        if let Some(x) = f.support().difference(&union).next() {
            su = Check::fail("Su", format!("field of color {c} is nonzero at {x} outside its members"));
            break;
        }
    }
    report.push(su);

    let mut inv = Check::pass_with("In", format!("defect bound {}", crate::rational::render(epsilon)));
    for (c, f) in fields.iter().enumerate() {
        let defect = invariance_defect(a, f, &params.l)?;
        if defect > *epsilon {
            inv = Check::fail(
                "In",
                format!(
                    "field of color {c} has defect {} > {}",
                    crate::rational::render(&defect),
                    crate::rational::render(epsilon)
                ),
            );
            break;
        }
    }
    report.push(inv);

    let mut un = Check::pass("Un");
    for &x in &params.k {
        let total: BigRational = fields.iter().map(|f| f.values[x].clone()).sum();
        if !total.is_one() {
            un = Check::fail(
                "Un",
                format!("sum at {x} is {}, not 1", crate::rational::render(&total)),
            );
            break;
        }
    }
    report.push(un);

    Ok(report)
}

/// For a finite acting group (the materialized ball is product-closed), the
/// orbits carry an exact degree-0 witness: members are the full orbits
/// meeting K, selections are the identity transport of the least orbit
/// point, L is the whole group and N its order. Requires Θ to cover the
/// member union.
pub fn build_proper_witness(
    a: &FiniteAction,
    theta: &Cover,
    k: &Subset,
) -> Result<(NearOrbitWitness, LtcParams)> {
    let group: BTreeSet<GroupElement> = a.ball.elements.keys().cloned().collect();
    for g in &group {
        for s in &a.spec.generators {
            if !group.contains(&a.spec.mul(g, s)?) {
                return Err(Error::Capability(
                    "acting group is not finite within the materialized ball; \
                     enlarge the radius or use a finite realization"
                        .into(),
                ));
            }
        }
    }

    let mut members = Vec::new();
    let mut selection = BTreeMap::new();
    let mut seen: Subset = BTreeSet::new();
    for &x in k {
        if seen.contains(&x) {
            continue;
        }
        let orbit = a.orbit_set(x, &group)?;
        seen.extend(orbit.iter());
        let base = *orbit.iter().next().unwrap();
        let name = format!("O{base}");
        // equivariant choice: transport the least orbit point along the
        // acting elements, which lands each point on itself
        let mut sel = BTreeMap::new();
        for g in &group {
            let y = a.act(g, base)?;
            sel.insert(y, y);
        }
        for &y in &orbit {
            if !theta.members.iter().any(|t| t.points.contains(&y)) {
                return Err(Error::Precondition(format!(
                    "Θ does not cover orbit point {y}"
                )));
            }
        }
        members.push(Member { name: name.clone(), points: orbit, color: Some(0) });
        selection.insert(name, sel);
    }
    let cover = Cover::new(a.base.size, members)?;
    let n = group.len();
    let params = LtcParams {
        l: group,
        k: k.clone(),
        theta: theta.clone(),
        d: 0,
        n,
        b: None,
    };
    Ok((NearOrbitWitness { cover, selection }, params))
}

/// A subgroup known only through an oracle: `membership` answers whether a
/// group element lies in it, or `None` when the element is outside the
/// oracle's verified ball.
pub struct BlrMember {
    pub subgroup_id: String,
    pub membership: Box<dyn Fn(&GroupElement) -> Option<bool> + Send + Sync>,
    /// Labeling λ_C: member point → coset id; total on the member.
    pub labels: BTreeMap<usize, u64>,
    /// One representative group element per used coset id.
    pub reps: BTreeMap<u64, GroupElement>,
}

impl fmt::Debug for BlrMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlrMember")
            .field("subgroup_id", &self.subgroup_id)
            .field("labels", &self.labels)
            .field("reps", &self.reps)
            .finish_non_exhaustive()
    }
}

/// A cover with per-member subgroup-valued labelings, parallel arrays:
/// `data[i]` belongs to `cover.members[i]`.
#[derive(Debug)]
pub struct BlrWitness {
    pub cover: Cover,
    pub data: Vec<BlrMember>,
}

impl BlrWitness {
    fn validate(&self) -> Result<()> {
        if self.data.len() != self.cover.members.len() {
            return Err(Error::Structure("one labeling per member required".into()));
        }
        for (m, d) in self.cover.members.iter().zip(&self.data) {
            let dom: Subset = d.labels.keys().cloned().collect();
            if dom != m.points {
                return Err(Error::Structure(format!(
                    "labeling of member {:?} is not total on its points",
                    m.name
                )));
            }
            for id in d.labels.values() {
                if !d.reps.contains_key(id) {
                    return Err(Error::Structure(format!(
                        "member {:?}: coset id {id} has no representative",
                        m.name
                    )));
                }
            }
        }
        Ok(())
    }
}

fn oracle(
    member: &BlrMember,
    g: &GroupElement,
    context: &str,
) -> Result<bool> {
    (member.membership)(g).ok_or_else(|| {
        Error::InsufficientBall(format!(
            "subgroup {:?} cannot decide {g:?} ({context})",
            member.subgroup_id
        ))
    })
}

/// Coset-labeled cover clauses: (Lo), (Mu ≤ d+1), (Eq) label equivariance —
/// λ(α_g x) must be the g-translate of λ(x), decided by testing
/// rep(λ(α_g x))⁻¹ · g · rep(λ(x)) against the subgroup oracle — and (Bo)
/// label representatives within B·label when B is supplied.
pub fn verify_blr_witness(
    a: &FiniteAction,
    l: &BTreeSet<GroupElement>,
    k: &Subset,
    w: &BlrWitness,
    d: usize,
    b: Option<&BTreeSet<GroupElement>>,
) -> Result<Report> {
    w.validate()?;
    let mut report = Report::new("blr-witness");

    let mut lo = Check::pass("Lo");
    for &x in k {
        let orbit = a.orbit_set(x, l)?;
        if !w.cover.members.iter().any(|m| orbit.is_subset(&m.points)) {
            lo = Check::fail("Lo", format!("no member contains the L-orbit of point {x}"));
            break;
        }
    }
    report.push(lo);
    report.push(check_mu(&w.cover, d));

    let mut eq = Check::pass("Eq");
    'eq: for (m, data) in w.cover.members.iter().zip(&w.data) {
        for g in l {
            let p = a.perm(g)?;
            for (&x, lx) in &data.labels {
                let gx = p[x];
                let Some(lgx) = data.labels.get(&gx) else { continue };
                // λ(α_g x) = g·λ(x) iff rep(λ(α_g x))⁻¹ g rep(λ(x)) ∈ G_C
                let u = a.spec.mul(
                    &a.spec.inv(&data.reps[lgx])?,
                    &a.spec.mul(g, &data.reps[lx])?,
                )?;
                if !oracle(data, &u, "label equivariance")? {
                    eq = Check::fail(
                        "Eq",
                        format!(
                            "member {:?}: labeling not equivariant at g = {g:?}, x = {x}",
                            m.name
                        ),
                    );
                    break 'eq;
                }
            }
        }
    }
    report.push(eq);

    if let Some(b) = b {
        let mut bo = Check::pass("Bo");
        'bo: for (m, data) in w.cover.members.iter().zip(&w.data) {
            let used: BTreeSet<&u64> = data.labels.values().collect();
            for &i in &used {
                for &j in &used {
                    let mut hit = false;
                    let mut unknown = None;
                    for c in b {
                        let u = a.spec.mul(
                            &a.spec.inv(&data.reps[i])?,
                            &a.spec.mul(c, &data.reps[j])?,
                        )?;
                        match (data.membership)(&u) {
                            Some(true) => {
                                hit = true;
                                break;
                            }
                            Some(false) => {}
                            None => unknown = Some(u),
                        }
                    }
                    if !hit {
                        if let Some(u) = unknown {
                            return Err(Error::InsufficientBall(format!(
                                "subgroup {:?} cannot decide {u:?} (label boundedness)",
                                data.subgroup_id
                            )));
                        }
                        bo = Check::fail(
                            "Bo",
                            format!(
                                "member {:?}: coset {i} is not within B of coset {j}",
                                m.name
                            ),
                        );
                        break 'bo;
                    }
                }
            }
        }
        report.push(bo);
    } else {
        report.push(Check::pass_with("Bo", "skipped: no B supplied"));
    }

    Ok(report)
}

/// Inputs to the closed-form bound calculators; `None` skips the formulas
/// that need the value. "+1 conventions": every factor x enters as x+1
/// unless stated otherwise.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundInputs {
    pub asdim: Option<u64>,
    /// dim(X⁺), the one-point-extended space.
    pub dim_x_plus: Option<u64>,
    pub dim_ltc: Option<u64>,
    pub d_stab: Option<u64>,
    pub rank: Option<u32>,
    pub dim_x: Option<u64>,
    pub eqasdim: Option<u64>,
    /// Bound on the dimension over the members of the subgroup family.
    pub dim_ltc_family: Option<u64>,
    /// LSP constant at degree 0, for the consistency flag asdim ≤ LSP₀ − 1.
    pub lsp_d0: Option<u64>,
    /// Dimension d for the 10^{d−1}·d! input bound (1 ≤ d ≤ 20).
    pub allosteric_d: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundValues {
    /// (asdim+1)(dim X⁺ +1)(dim_LTC+1)(d_stab+1).
    pub main: Option<u64>,
    /// (dim_LTC+1)³(d_stab+1).
    pub abstract_cube: Option<u64>,
    /// 9^rank·(d_stab+1)(dim X+1)².
    pub virnil: Option<u64>,
    /// (eqasdim+1)(family dimension+1).
    pub relative: Option<u64>,
    /// 10^{d−1}·d!.
    pub allosteric_input: Option<u128>,
    pub flags: Vec<Check>,
}

pub fn bounds_calculator(inputs: &BoundInputs) -> Result<BoundValues> {
    let main = match (inputs.asdim, inputs.dim_x_plus, inputs.dim_ltc, inputs.d_stab) {
        (Some(a), Some(x), Some(l), Some(s)) => Some((a + 1) * (x + 1) * (l + 1) * (s + 1)),
        _ => None,
    };
    let abstract_cube = match (inputs.dim_ltc, inputs.d_stab) {
        (Some(l), Some(s)) => Some((l + 1).pow(3) * (s + 1)),
        _ => None,
    };
    let virnil = match (inputs.rank, inputs.d_stab, inputs.dim_x) {
        (Some(r), Some(s), Some(x)) => Some(9u64.pow(r) * (s + 1) * (x + 1).pow(2)),
        _ => None,
    };
    let relative = match (inputs.eqasdim, inputs.dim_ltc_family) {
        (Some(e), Some(f)) => Some((e + 1) * (f + 1)),
        _ => None,
    };
    let allosteric_input = match inputs.allosteric_d {
        None => None,
        Some(0) => return Err(Error::Argument("dimension for the factorial bound must be >= 1".into())),
        Some(d) if d > 20 => {
            return Err(Error::Argument("factorial bound limited to d <= 20".into()))
        }
        Some(d) => {
            let fact: u128 = (1..=d as u128).product();
            Some(10u128.pow(d as u32 - 1) * fact)
        }
    };
    let mut flags = Vec::new();
    if let (Some(a), Some(l0)) = (inputs.asdim, inputs.lsp_d0) {
        flags.push(Check::of(
            "asdim-vs-lsp",
            l0 >= 1 && a <= l0 - 1,
            format!("asdim {a} vs LSP0 - 1 = {}", l0 as i64 - 1),
        ));
    }
    if let (Some(a), Some(l)) = (inputs.asdim, inputs.dim_ltc) {
        flags.push(Check::of(
            "asdim-vs-ltc",
            a <= l,
            format!("asdim {a} vs dim_LTC {l}"),
        ));
    }
    Ok(BoundValues { main, abstract_cube, virnil, relative, allosteric_input, flags })
}
