//! `coarsedim` — command-line front end for the coarsedim toolkit.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage/input error,
//! 3 budget or capability limit hit.

mod wire;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use coarsedim_core::allosteric::{auto_tower, gamma_membership, tower_report, TowerLevel, WreathTower};
use coarsedim_core::coarse::{
    e_multiplicity_budgeted, multiplicity, Cover, Member, Subset, DEFAULT_SEARCH_BUDGET,
};
use coarsedim_core::covers::{
    build_orbit_pou, greedy_bdiscrete_cover, merge_until_separated, verify_orbit_pou,
};
use coarsedim_core::dynamics::{coset_action, FiniteAction};
use coarsedim_core::lsp::{lsp_bad_max, lsp_certificate};
use coarsedim_core::ltc::{
    bounds_calculator, verify_blr_witness, verify_ltc_witness, BlrMember, BlrWitness,
    BoundInputs, LtcParams,
};
use coarsedim_core::rational::{self, rat_int, rat_usize};
use coarsedim_core::simplicial::{
    cover_clumping, delta as diff_levels, mu, thicken_multiplicity, FinSupportFn,
};
use coarsedim_core::{Check, Error, GroupSpec, Report, Result};

/// Environment variable overriding the exhaustive-search budget.
const BUDGET_ENV: &str = "COARSEDIM_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "coarsedim", version, about = "growth, covers, packing and tower certificates for concrete groups")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized property suites; recorded in every output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ball tables and growth-degree estimation for a group.
    Growth {
        /// lattice:R | heisenberg | dihedral | abelian:M1,M2,... | wreath:M1,..:RANK | z | z2
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 8)]
        radius: u32,
    },
    /// Growth-counting packing certificate (exact integers).
    LspCert {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Exact small-scale packing oracle: bad-max over BL = ball(R+1) with B = ball(R).
    LspOracle {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        ball_r: u32,
        #[arg(long, default_value_t = 0)]
        d: usize,
    },
    /// Orbit dimension witness: check a cover from files, or run the greedy
    /// demo on a cyclic/torus translation action.
    OrbitAsdim {
        /// Action JSON {"points", "group", "generators": {"g0": [...]}}.
        #[arg(long, requires = "cover")]
        action: Option<PathBuf>,
        /// Cover JSON {"members": {"name": [ids...]}, "colors"?}.
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Demo mode: quotient size for the translation action.
        #[arg(long, conflicts_with = "action")]
        q: Option<usize>,
        /// Demo mode: lattice rank acting on (Z/q)^rank.
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        l_radius: u32,
        #[arg(long, default_value_t = 2)]
        b_radius: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Build and verify an orbit partition of unity on Z acting on Z/q.
    Pou {
        #[arg(long)]
        q: usize,
        /// Invariance tolerance, "p/q" or decimal.
        #[arg(long, default_value = "1/2")]
        epsilon: String,
    },
    /// Randomized property suite for the difference-operator machinery.
    Simplicial {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Verify a near-orbit witness from files.
    LtcVerify {
        #[arg(long)]
        action: PathBuf,
        /// Witness JSON: cover + "selection": {"member": {"pointId": targetId}}.
        #[arg(long)]
        witness: PathBuf,
        /// Target cover JSON; defaults to the partition into singletons.
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        l_radius: u32,
        #[arg(long, default_value_t = 0)]
        d: usize,
        /// Cap on selection-range size (clause Ca).
        #[arg(long)]
        n: usize,
    },
    /// Coset-labeled witness demo: labels the coset action of a level-1
    /// tower subgroup of Z/2 wr Z and verifies equivariance via the
    /// membership oracle.
    BlrVerify {
        /// Sublattice modulus m of the level-1 subgroup.
        #[arg(long, default_value_t = 4)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        d: usize,
    },
    /// Build a wreath-product tower and verify its per-level certificates.
    Allosteric {
        /// Base group moduli, comma-separated (e.g. "2" or "2,2").
        #[arg(long, default_value = "2")]
        base: String,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// Density budget, "p/q" or decimal.
        #[arg(long, default_value = "1/2")]
        delta: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Window radii per level, comma-separated; defaults to 1,2,...,levels.
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Closed-form dimension bound calculators.
    Bounds {
        #[arg(long)]
        asdim: Option<u64>,
        #[arg(long)]
        dimx: Option<u64>,
        #[arg(long)]
        dimx_plus: Option<u64>,
        #[arg(long)]
        dimltc: Option<u64>,
        #[arg(long)]
        dstab: Option<u64>,
        #[arg(long)]
        rank: Option<u32>,
        #[arg(long)]
        eqasdim: Option<u64>,
        #[arg(long)]
        dim_family: Option<u64>,
        #[arg(long)]
        lsp_d0: Option<u64>,
        #[arg(long)]
        allosteric_d: Option<u64>,
    },
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct CommandOutput {
    report: Report,
    data: serde_json::Value,
    table: Option<Table>,
}

fn parse_group(s: &str) -> Result<GroupSpec> {
    let bad = || Error::Argument(format!("unrecognized group {s:?}"));
    match s {
        "z" => return GroupSpec::lattice(1),
        "z2" => return GroupSpec::lattice(2),
        "heisenberg" => return GroupSpec::heisenberg(),
        "dihedral" => return GroupSpec::infinite_dihedral(),
        _ => {}
    }
    let (head, rest) = s.split_once(':').ok_or_else(bad)?;
    let parse_list = |t: &str| -> Result<Vec<u64>> {
        t.split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect()
    };
    match head {
        "lattice" => GroupSpec::lattice(rest.parse().map_err(|_| bad())?),
        "abelian" => GroupSpec::finite_abelian(parse_list(rest)?),
        "wreath" => {
            let (moduli, rank) = rest.rsplit_once(':').ok_or_else(bad)?;
            GroupSpec::wreath(parse_list(moduli)?, rank.parse().map_err(|_| bad())?)
        }
        _ => Err(bad()),
    }
}

/// "p/q", integer, or decimal ("0.1" → 1/10).
fn parse_ratio(s: &str) -> Result<BigRational> {
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let scale = BigInt::from(10u32).pow(digits);
        let int: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| Error::Argument(format!("bad number {s:?}")))?
        };
        let frac: BigInt =
            frac.parse().map_err(|_| Error::Argument(format!("bad number {s:?}")))?;
        return Ok(BigRational::new(int * &scale + frac, scale));
    }
    rational::parse(s)
}

fn search_budget() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SEARCH_BUDGET)
}

fn run(command: &Command, seed: u64) -> Result<CommandOutput> {
    match command {
        Command::Growth { group, radius } => growth(group, *radius),
        Command::LspCert { group, d, r } => lsp_cert(group, *d, *r),
        Command::LspOracle { group, ball_r, d } => lsp_oracle(group, *ball_r, *d),
        Command::OrbitAsdim { action, cover, q, rank, l_radius, b_radius, d } => {
            orbit_asdim(action.as_deref(), cover.as_deref(), *q, *rank, *l_radius, *b_radius, *d)
        }
        Command::Pou { q, epsilon } => pou(*q, epsilon),
        Command::Simplicial { trials } => simplicial_suite(*trials, seed),
        Command::LtcVerify { action, witness, theta, l_radius, d, n } => {
            ltc_verify(action, witness, theta.as_deref(), *l_radius, *d, *n)
        }
        Command::BlrVerify { modulus, d } => blr_verify(*modulus, *d),
        Command::Allosteric { base, rank, delta, levels, schedule } => {
            allosteric(base, *rank, delta, *levels, schedule.as_deref())
        }
        Command::Bounds {
            asdim,
            dimx,
            dimx_plus,
            dimltc,
            dstab,
            rank,
            eqasdim,
            dim_family,
            lsp_d0,
            allosteric_d,
        } => bounds(&BoundInputs {
            asdim: *asdim,
            dim_x_plus: *dimx_plus,
            dim_ltc: *dimltc,
            d_stab: *dstab,
            rank: *rank,
            dim_x: *dimx,
            eqasdim: *eqasdim,
            dim_ltc_family: *dim_family,
            lsp_d0: *lsp_d0,
            allosteric_d: *allosteric_d,
        }),
    }
}

fn growth(group: &str, radius: u32) -> Result<CommandOutput> {
    let spec = parse_group(group)?;
    let table = spec.ball(radius)?;
    let growth: Vec<u64> = (0..=radius).map(|n| table.gr(n)).collect();
    let degree = if radius >= 4 {
        Some(table.degree_estimate((radius / 2).max(2), radius)?)
    } else {
        None
    };
    let mut report = Report::new("growth-table");
    report.push(Check::pass_with(
        "enumeration",
        format!("{} elements within radius {radius}", table.gr(radius)),
    ));
    if let Some(deg) = degree {
        report.push(Check::pass_with(
            "degree",
            format!("estimate {deg:.3} (approximate, log-log fit)"),
        ));
    }
    let rows = growth
        .iter()
        .enumerate()
        .map(|(n, g)| vec![n.to_string(), g.to_string()])
        .collect();
    Ok(CommandOutput {
        report,
        data: json!({
            "group": spec,
            "growth": growth,
            "degree": degree.map(|d| json!({"value": d, "note": "approximate"})),
        }),
        table: Some(Table { header: vec!["n", "gr"], rows }),
    })
}

fn lsp_cert(group: &str, d: usize, r: u32) -> Result<CommandOutput> {
    let spec = parse_group(group)?;
    let cert = lsp_certificate(&spec, d, r)?;
    let mut report = Report::new("lsp-certificate");
    report.push(Check::of(
        "counting-inequality",
        cert.lhs < cert.rhs,
        format!("(d+1)·Gr(3R/2+r) = {} < {} = (m+1)·Gr(R/2)", cert.lhs, cert.rhs),
    ));
    let rows = vec![
        vec!["R".into(), cert.big_r.to_string()],
        vec!["m".into(), cert.m.to_string()],
        vec!["lhs".into(), cert.lhs.to_string()],
        vec!["rhs".into(), cert.rhs.to_string()],
        vec!["|B|".into(), cert.b.len().to_string()],
    ];
    Ok(CommandOutput {
        report,
        data: serde_json::to_value(&cert)?,
        table: Some(Table { header: vec!["key", "value"], rows }),
    })
}

fn lsp_oracle(group: &str, ball_r: u32, d: usize) -> Result<CommandOutput> {
    let spec = parse_group(group)?;
    let b = spec.ball(ball_r)?.element_set();
    let bl = spec.ball(ball_r + 1)?.element_set();
    let value = lsp_bad_max(&spec, &bl, &b, d)?;
    let mut report = Report::new("lsp-oracle");
    report.push(Check::pass_with(
        "bad-max",
        format!("maximum bad tuple length {value} over |BL| = {}", bl.len()),
    ));
    Ok(CommandOutput {
        report,
        data: json!({"bad_max": value, "ball_r": ball_r, "d": d}),
        table: None,
    })
}

fn orbit_asdim(
    action: Option<&std::path::Path>,
    cover: Option<&std::path::Path>,
    q: Option<usize>,
    rank: usize,
    l_radius: u32,
    b_radius: u32,
    d: usize,
) -> Result<CommandOutput> {
    let (a, cov) = match (action, q) {
        (Some(action), _) => {
            let wa: wire::WireAction = wire::read_json(action)?;
            let a = wa.into_action()?;
            let wc: wire::WireCover = wire::read_json(cover.unwrap())?;
            let cov = wc.into_cover(a.base.size)?;
            (a, cov)
        }
        (None, Some(q)) => {
            let radius = (2 * (l_radius + b_radius)).max(4);
            let a = if rank == 1 {
                FiniteAction::cyclic_translation(q, radius)?
            } else {
                FiniteAction::torus_translation(rank, q, radius)?
            };
            let k: Subset = (0..a.base.size).collect();
            let l = a.spec.ball(l_radius)?.element_set();
            let b = a.spec.ball(b_radius)?.element_set();
            let (_, cov) = greedy_bdiscrete_cover(&a, &k, &l, &b)?;
            (a, cov)
        }
        (None, None) => {
            return Err(Error::Argument(
                "either --action/--cover files or demo --q is required".into(),
            ))
        }
    };
    let k: Subset = (0..a.base.size).collect();
    let l = a.spec.ball(l_radius)?.element_set();
    // greedy members are LB-orbits of the discrete set, so two member points
    // differ by an element of (LB)(LB)^{-1}; demo mode widens the bounding
    // set accordingly, file mode takes --b-radius literally
    let bound_radius = if action.is_none() { 2 * (l_radius + b_radius) } else { b_radius };
    let b = a.spec.ball(bound_radius)?.element_set();
    let mut report = a.check_orbit_asdim_witness(&k, &l, &b, &cov, d)?;
    let e = a.orbit_entourage(&k, &l)?;
    let emult = e_multiplicity_budgeted(&cov, &e, search_budget())?;
    report.push(Check::of(
        "E-Mu",
        emult <= d + 1,
        format!("L-orbit E-multiplicity {emult} vs d+1 = {}", d + 1),
    ));
    Ok(CommandOutput {
        report,
        data: json!({
            "members": cov.members.len(),
            "multiplicity": multiplicity(&cov),
            "e_multiplicity": emult,
        }),
        table: None,
    })
}

fn pou(q: usize, epsilon: &str) -> Result<CommandOutput> {
    let eps = parse_ratio(epsilon)?;
    if eps <= BigRational::zero() {
        return Err(Error::Argument("epsilon must be positive".into()));
    }
    // N = ceil((d+2)/eps) with d the certificate degree 0 here; the ball must
    // materialize L^{2N} and the bounding window.
    let n = rational::ceil_to_u32(&(rat_int(2) / &eps));
    // fields are bounded by L^N (B' ∪ {e}) L^N with B' the half-cycle window
    let radius = q as u32 / 2 + 2 * n + 2;
    let a = FiniteAction::cyclic_translation(q, radius)?;
    let k: Subset = (0..q).collect();
    let l = a.spec.ball(1)?.element_set();
    let b = a.spec.ball(2)?.element_set();
    let (_, cover) = greedy_bdiscrete_cover(&a, &k, &l, &b)?;
    let l2n = a.spec.set_power(&l, 2 * n)?;
    let sep = a.orbit_entourage(&k, &l2n)?;
    let witness = merge_until_separated(&cover, &sep)?;
    let bprime = a.spec.ball(q as u32 / 2)?.element_set();
    let pou = build_orbit_pou(&a, &k, &l, &eps, &witness, &bprime)?;
    let report = verify_orbit_pou(&a, &pou)?;

    let mut rows = Vec::new();
    for (color, entries) in pou.colors.iter().enumerate() {
        for entry in entries {
            for &x in &entry.field.support() {
                rows.push(vec![
                    x.to_string(),
                    color.to_string(),
                    entry.name.clone(),
                    rational::render(&entry.field.values[x]),
                ]);
            }
        }
    }
    rows.sort();
    Ok(CommandOutput {
        report,
        data: json!({
            "q": q,
            "epsilon": rational::render(&eps),
            "n": n,
            "colors": pou.colors.len(),
        }),
        table: Some(Table { header: vec!["point", "color", "member", "value"], rows }),
    })
}

fn simplicial_suite(trials: usize, seed: u64) -> Result<CommandOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("simplicial-suite");

    let mut identity_fail = None;
    let mut lipschitz_fail = None;
    for _ in 0..trials {
        let keys = rng.gen_range(0..=6usize);
        let mut values = BTreeMap::new();
        for i in 0..keys {
            values.insert(format!("k{i}"), rational::rat(rng.gen_range(0..=6), rng.gen_range(1..=5)));
        }
        let xi = FinSupportFn::new(values.clone())?;
        let levels = diff_levels(&xi);
        let mut tail = BigRational::zero();
        for l in (0..levels.len()).rev() {
            tail += &levels[l];
            if tail != mu(l, &xi) {
                identity_fail = Some(format!("telescoping fails at level {l}"));
            }
        }
        let mass: BigRational =
            (0..levels.len()).map(|l| rat_usize(l + 1) * &levels[l]).sum();
        if mass != xi.mass() {
            identity_fail = Some("mass identity fails".into());
        }

        let mut pert = values;
        let shift = rational::rat(1, rng.gen_range(2..=9));
        for v in pert.values_mut() {
            *v += &shift;
        }
        if let Ok(eta) = FinSupportFn::new(pert) {
            let dist = xi.sup_dist(&eta);
            for l in 0..=keys {
                let gap = mu(l, &xi) - mu(l, &eta);
                if gap > dist || -gap.clone() > dist {
                    lipschitz_fail = Some(format!("level function not 1-Lipschitz at {l}"));
                }
            }
        }
    }
    report.push(match identity_fail {
        None => Check::pass_with("identities", format!("telescoping + mass exact on {trials} random functions")),
        Some(v) => Check::fail("identities", v),
    });
    report.push(match lipschitz_fail {
        None => Check::pass_with("lipschitz", "level functions 1-Lipschitz in sup distance"),
        Some(v) => Check::fail("lipschitz", v),
    });

    let mut clump_fail = None;
    for _ in 0..trials {
        let members = rng.gen_range(1..=5usize);
        let subsets: Vec<Subset> = (0..members)
            .map(|_| {
                let mask = rng.gen_range(1u32..(1 << 8));
                (0..8).filter(|i| mask & (1 << i) != 0).collect()
            })
            .collect();
        let theta = Cover::from_subsets(8, subsets)?;
        let k = theta.union();
        let out = cover_clumping(8, &k, &theta)?;
        if !out.covers(&k) {
            clump_fail = Some("clumped cover misses a point of K".to_string());
        }
        for m in &out.members {
            if !theta.members.iter().any(|t| m.points.is_subset(&t.points)) {
                clump_fail = Some(format!("member {:?} not inside a target member", m.name));
            }
        }
    }
    report.push(match clump_fail {
        None => Check::pass_with("clumping", format!("guarantee holds on {trials} random covers")),
        Some(v) => Check::fail("clumping", v),
    });

    let mut thicken_fail = None;
    for _ in 0..trials {
        let count = rng.gen_range(1..=4usize);
        let ks: Vec<Subset> = (0..count)
            .map(|_| {
                let mask = rng.gen_range(1u32..(1 << 10));
                (0..10).filter(|i| mask & (1 << i) != 0).collect()
            })
            .collect();
        let before = multiplicity(&Cover::from_subsets(10, ks.clone())?);
        let us = thicken_multiplicity(10, &ks)?;
        let after = multiplicity(&Cover::from_subsets(10, us.clone())?);
        if after != before || ks.iter().zip(&us).any(|(k, u)| !k.is_subset(u)) {
            thicken_fail = Some(format!("thickening broke multiplicity: {before} -> {after}"));
        }
    }
    report.push(match thicken_fail {
        None => Check::pass_with("thicken", format!("open thickening preserves multiplicity on {trials} random families")),
        Some(v) => Check::fail("thicken", v),
    });

    Ok(CommandOutput {
        report,
        data: json!({"trials": trials}),
        table: None,
    })
}

fn ltc_verify(
    action: &std::path::Path,
    witness: &std::path::Path,
    theta: Option<&std::path::Path>,
    l_radius: u32,
    d: usize,
    n: usize,
) -> Result<CommandOutput> {
    let wa: wire::WireAction = wire::read_json(action)?;
    let a = wa.into_action()?;
    let size = a.base.size;
    let ww: wire::WireWitness = wire::read_json(witness)?;
    let w = ww.into_witness(size)?;
    let theta = match theta {
        Some(path) => {
            let wc: wire::WireCover = wire::read_json(path)?;
            wc.into_cover(size)?
        }
        None => Cover::from_subsets(size, (0..size).map(|i| [i].into()).collect())?,
    };
    let params = LtcParams {
        l: a.spec.ball(l_radius)?.element_set(),
        k: (0..size).collect(),
        theta,
        d,
        n,
        b: None,
    };
    let report = verify_ltc_witness(&a, &params, &w)?;
    Ok(CommandOutput {
        report,
        data: json!({"points": size, "members": w.cover.members.len()}),
        table: None,
    })
}

fn blr_verify(modulus: u64, d: usize) -> Result<CommandOutput> {
    if modulus < 2 {
        return Err(Error::Argument("modulus must be >= 2".into()));
    }
    // Level-1 subgroup of Z/2 wr Z: shifts by multiples of m with the
    // coordinate at residue 0 trivial.
    let tower = WreathTower {
        base_moduli: vec![2],
        rank: 1,
        delta: rational::rat(1, 2),
        levels: vec![TowerLevel {
            n: 1,
            e: vec![vec![0]],
            m: modulus,
            g_divisors: vec![2],
            delta_n: rational::rat(1, modulus as i64),
        }],
    };
    let spec = GroupSpec::wreath(vec![2], 1)?;
    let member_of = |g: &coarsedim_core::GroupElement| gamma_membership(&tower, 1, g).unwrap();
    let seed_radius = modulus as u32 - 1;
    let (a, reps) = coset_action(&spec, &member_of, seed_radius, modulus as u32, 4 * modulus as usize)?;
    let size = a.base.size;

    let cover = Cover::new(
        size,
        vec![Member { name: "C0".into(), points: (0..size).collect(), color: None }],
    )?;
    let tower_oracle = tower.clone();
    let data = vec![BlrMember {
        subgroup_id: "gamma1".into(),
        membership: Box::new(move |g| gamma_membership(&tower_oracle, 1, g).ok()),
        labels: (0..size).map(|i| (i, i as u64)).collect(),
        reps: reps.iter().enumerate().map(|(i, r)| (i as u64, r.clone())).collect(),
    }];
    let w = BlrWitness { cover, data };
    let k: Subset = (0..size).collect();
    let l = a.spec.ball(1)?.element_set();
    let report = verify_blr_witness(&a, &l, &k, &w, d, None)?;
    Ok(CommandOutput {
        report,
        data: json!({"cosets": size, "modulus": modulus}),
        table: None,
    })
}

fn allosteric(
    base: &str,
    rank: usize,
    delta: &str,
    levels: usize,
    schedule: Option<&str>,
) -> Result<CommandOutput> {
    let moduli: Vec<u64> = base
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::Argument(format!("bad base moduli {base:?}"))))
        .collect::<Result<_>>()?;
    let delta = parse_ratio(delta)?;
    let schedule: Vec<u32> = match schedule {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| Error::Argument(format!("bad schedule {s:?}"))))
            .collect::<Result<_>>()?,
        None => (1..=levels as u32).collect(),
    };
    let tower = auto_tower(moduli, rank, delta, levels, &schedule)?;
    let report = tower_report(&tower)?;
    let rows = tower
        .levels
        .iter()
        .map(|lvl| {
            vec![
                lvl.n.to_string(),
                lvl.m.to_string(),
                lvl.e.len().to_string(),
                rational::render(&lvl.delta_n),
            ]
        })
        .collect();
    Ok(CommandOutput {
        report,
        data: serde_json::to_value(&tower)?,
        table: Some(Table { header: vec!["level", "m", "|E|", "density"], rows }),
    })
}

fn bounds(inputs: &BoundInputs) -> Result<CommandOutput> {
    let values = bounds_calculator(inputs)?;
    let mut report = Report::new("bounds");
    let mut rows = Vec::new();
    let mut push = |name: &'static str, v: Option<String>| {
        if let Some(v) = v {
            rows.push(vec![name.to_string(), v]);
        }
    };
    push("main", values.main.map(|v| v.to_string()));
    push("abstract_cube", values.abstract_cube.map(|v| v.to_string()));
    push("virnil", values.virnil.map(|v| v.to_string()));
    push("relative", values.relative.map(|v| v.to_string()));
    push("allosteric_input", values.allosteric_input.map(|v| v.to_string()));
    if rows.is_empty() && values.flags.is_empty() {
        return Err(Error::Argument("no bound is computable from the given inputs".into()));
    }
    report.push(Check::pass_with("computed", format!("{} bound(s)", rows.len())));
    for flag in &values.flags {
        report.push(flag.clone());
    }
    Ok(CommandOutput {
        report,
        data: serde_json::to_value(&values)?,
        table: Some(Table { header: vec!["bound", "value"], rows }),
    })
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    command: String,
    seed: u64,
    pass: bool,
    report: &'a Report,
    data: &'a serde_json::Value,
}

fn render(command_name: &str, seed: u64, out: &CommandOutput, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = JsonDocument {
                command: command_name.to_string(),
                seed,
                pass: out.report.pass,
                report: &out.report,
                data: &out.data,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = format!("# command={command_name} seed={seed}\n");
            match &out.table {
                Some(table) => {
                    s.push_str(&table.header.join(","));
                    s.push('\n');
                    for row in &table.rows {
                        s.push_str(&row.join(","));
                        s.push('\n');
                    }
                }
                None => {
                    s.push_str("check,pass,detail\n");
                    for c in &out.report.checks {
                        s.push_str(&format!(
                            "{},{},{}\n",
                            c.name,
                            c.pass,
                            c.detail.as_deref().unwrap_or("").replace(',', ";")
                        ));
                    }
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{}: {}\n",
                out.report.id,
                if out.report.pass { "PASS" } else { "FAIL" }
            );
            for c in &out.report.checks {
                s.push_str(&format!(
                    "  [{}] {}{}\n",
                    if c.pass { "ok" } else { "FAIL" },
                    c.name,
                    c.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default()
                ));
            }
            if let Some(table) = &out.table {
                s.push_str(&format!("  {}\n", table.header.join("\t")));
                for row in &table.rows {
                    s.push_str(&format!("  {}\n", row.join("\t")));
                }
            }
            s.push_str(&format!("seed: {seed}\n"));
            s
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Growth { .. } => "growth",
        Command::LspCert { .. } => "lsp-cert",
        Command::LspOracle { .. } => "lsp-oracle",
        Command::OrbitAsdim { .. } => "orbit-asdim",
        Command::Pou { .. } => "pou",
        Command::Simplicial { .. } => "simplicial",
        Command::LtcVerify { .. } => "ltc-verify",
        Command::BlrVerify { .. } => "blr-verify",
        Command::Allosteric { .. } => "allosteric",
        Command::Bounds { .. } => "bounds",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, cli.seed) {
        Ok(out) => {
            let rendered = render(command_name(&cli.command), cli.seed, &out, cli.format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(if out.report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::BudgetExceeded { .. } | Error::Capability(_) | Error::CapExceeded(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
