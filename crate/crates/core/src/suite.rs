//! Suites of verification cases over the algebra, the group catalog, the
//! torsion classifier and the chart-level models.
//!
//! Jobs run on the rayon pool; results are collected in job order, so the
//! report is independent of scheduling.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::{CachedGroup, GroupCache, CONVENTION_VERSION};
use crate::clifford::{self, build_clifford, Spinor, C64};
use crate::error::{Error, Result};
use crate::exterior::{form_inner, hodge, interior, wedge, Form, FormBasis};
use crate::geometry::{
    fd_convergence, verify_fixspinor_ricci, verify_foliation, verify_forms_law, verify_hopf, verify_plumbing,
    verify_spinor_parallel, verify_torsion_identities, verify_vec_rigidity, verify_weyl, FdPolicy, IdentityCheck,
    Model, ModelReport, VerifyConfig, CATALOG,
};
use crate::groups::{self, GroupId, RepSpace};
use crate::report::{Case, ReportHeader, Status, SuiteId, VerificationReport, PLUMBING};
use crate::torsion::{self, CharacteristicTorsion, ImageRelation, TorsionSolver};

pub const TOOL_NAME: &str = "vecstruct";

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub grid_points: usize,
    pub fd_step: f64,
    /// Replaces every floating-point tolerance when set.
    pub tolerance: Option<f64>,
    /// Restricts the groups and torsion suites to one group.
    pub group: Option<String>,
    /// Restricts the manifold suite to one model.
    pub model: Option<String>,
    /// Model parameters; requires `model`.
    pub params: BTreeMap<String, f64>,
    /// Enables the Spin(9) 8-form job.
    pub stretch: bool,
    /// Directory for the structure-group cache; the cache case is skipped
    /// without one.
    pub cache_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            grid_points: 20,
            fd_step: 1e-4,
            tolerance: None,
            group: None,
            model: None,
            params: BTreeMap::new(),
            stretch: false,
            cache_dir: None,
        }
    }
}

impl SuiteConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            points: self.grid_points,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }

    fn rng(&self, tag: &str) -> ChaCha8Rng {
        // FNV-1a of the tag, so each job draws its own stream
        let h = tag
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }

    fn validate(&self) -> Result<()> {
        if let Some(g) = &self.group {
            GroupId::parse(g)?;
        }
        if let Some(m) = &self.model {
            if !CATALOG.iter().any(|i| i.name == m) {
                return Err(Error::UnknownName {
                    kind: "model",
                    name: m.clone(),
                    available: crate::geometry::model_names(),
                });
            }
        }
        if !self.params.is_empty() && self.model.is_none() {
            let name = self.params.keys().next().cloned().unwrap_or_default();
            return Err(Error::InvalidParameter {
                name,
                reason: "model parameters need a model".into(),
            });
        }
        if self.grid_points == 0 {
            return Err(Error::InvalidParameter {
                name: "grid_points".into(),
                reason: "must be positive".into(),
            });
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "fd_step".into(),
                reason: "must be a positive number".into(),
            });
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "tolerance".into(),
                    reason: "must be a nonnegative number".into(),
                });
            }
        }
        Ok(())
    }

    fn wants_group(&self, g: &GroupId) -> bool {
        match &self.group {
            None => true,
            Some(name) => GroupId::parse(name).map(|p| &p == g).unwrap_or(false),
        }
    }
}

type Job<'a> = Box<dyn Fn() -> Vec<Case> + Send + Sync + 'a>;

fn job<'a>(f: impl Fn() -> Vec<Case> + Send + Sync + 'a) -> Job<'a> {
    Box::new(f)
}

/// Runs a suite and assembles its report.
pub fn run_suite(suite: SuiteId, config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let mut jobs: Vec<Job> = Vec::new();
    for part in suite.parts() {
        match part {
            SuiteId::Algebra => algebra_jobs(config, &mut jobs),
            SuiteId::Groups => groups_jobs(config, &mut jobs)?,
            SuiteId::Torsion => torsion_jobs(config, &mut jobs)?,
            SuiteId::Manifold => manifold_jobs(config, &mut jobs)?,
            SuiteId::All => unreachable!("parts() expands all"),
        }
    }
    let cases: Vec<Case> = jobs
        .par_iter()
        .map(|j| {
            let t = Instant::now();
            let mut cases = j();
            let ms = t.elapsed().as_secs_f64() * 1e3;
            cases.iter_mut().for_each(|c| c.runtime_ms = ms);
            cases
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let header = ReportHeader {
        tool: TOOL_NAME.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        suite,
        seed: config.seed,
        grid_points: config.grid_points,
        fd_step: config.fd_step,
        tolerance: config.tolerance,
        stretch: config.stretch,
        group: config.group.clone(),
        model: config.model.clone(),
        params: config.params.clone(),
        convention_version: CONVENTION_VERSION,
    };
    Ok(VerificationReport::new(header, cases, start.elapsed().as_secs_f64() * 1e3))
}

fn random_form(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Form<f64> {
    let basis = FormBasis::new(n, k);
    let c: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    basis.from_coords(&c)
}

fn guarded(id: &str, anchor: &str, f: impl FnOnce() -> Result<Case>) -> Case {
    f().unwrap_or_else(|e| Case::errored(id, anchor, &e))
}

// ---------------------------------------------------------------------------
// algebra

fn algebra_jobs<'a>(cfg: &'a SuiteConfig, jobs: &mut Vec<Job<'a>>) {
    jobs.push(job(move || {
        let anchor = "eᵢeⱼ + eⱼeᵢ = −2δᵢⱼ";
        (2..=16)
            .map(|n| {
                let id = format!("algebra/clifford_relations/n{n}");
                guarded(&id, anchor, || {
                    let rep = build_clifford(n)?;
                    Ok(Case::measured(&id, anchor, rep.anticommutation_residual(), cfg.tol(1e-12))
                        .with_detail("spinor_dim", &rep.spinor_dim()))
                })
            })
            .collect()
    }));

    jobs.push(job(move || {
        let anchor = "vol² = (−1)^{n(n+1)/2}";
        [2usize, 3, 4, 5, 6, 7, 8, 9]
            .into_iter()
            .map(|n| {
                let id = format!("algebra/volume_element/n{n}");
                guarded(&id, anchor, || {
                    let vol = build_clifford(n)?.volume_element();
                    let expected = if (n * (n + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let err = vol.compose(&vol).distance_to_scalar(C64::new(expected, 0.0));
                    Ok(Case::measured(&id, anchor, err, cfg.tol(1e-12)))
                })
            })
            .collect()
    }));

    jobs.push(job(move || {
        let anchor = "[λ(ω), X·] = (X⌟ω)·";
        let mut rng = cfg.rng("spin_lift");
        [4usize, 7, 8]
            .into_iter()
            .map(|n| {
                let id = format!("algebra/spin_lift_intertwines/n{n}");
                guarded(&id, anchor, || {
                    let rep = build_clifford(n)?;
                    let mut worst: f64 = 0.0;
                    for _ in 0..10 {
                        let w = random_form(&mut rng, n, 2);
                        let x = random_form(&mut rng, n, 1);
                        let lam = rep.spin_lift(&w)?;
                        let gx = rep.operator(&x)?;
                        let rhs = rep.operator(&interior(&x, &w)?)?;
                        worst = worst.max((&lam * &gx - &gx * &lam - rhs).norm());
                    }
                    Ok(Case::measured(&id, anchor, worst, cfg.tol(1e-10)))
                })
            })
            .collect()
    }));

    jobs.push(job(move || {
        let mut rng = cfg.rng("exterior");
        let mut out = Vec::new();
        for n in [4usize, 5, 7, 8] {
            let vol = Form::monomial(n, &(0..n).collect::<Vec<_>>());
            let (mut inner, mut square, mut graded, mut leibniz) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for k in 0..=n {
                let a = random_form(&mut rng, n, k);
                let b = random_form(&mut rng, n, k);
                let ab = wedge(&a, &hodge(&b)).expect("degree n");
                let ip = form_inner(&a, &b).expect("same shape");
                inner = inner.max(ab.distance(&vol.scaled(&ip)));
                let sign = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
                square = square.max(hodge(&hodge(&a)).distance(&a.scaled(&sign)));
                for l in 0..=(n - k) {
                    let c = random_form(&mut rng, n, l);
                    let s = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
                    let lhs = wedge(&a, &c).expect("fits");
                    let rhs = wedge(&c, &a).expect("fits").scaled(&s);
                    graded = graded.max(lhs.distance(&rhs));
                    if k >= 1 && l >= 1 {
                        let v = random_form(&mut rng, n, 1);
                        let left = interior(&v, &lhs).expect("vector");
                        let mut right = wedge(&interior(&v, &a).expect("vector"), &c).expect("fits");
                        let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
                        right.axpy(&sk, &wedge(&a, &interior(&v, &c).expect("vector")).expect("fits"));
                        leibniz = leibniz.max(left.distance(&right));
                    }
                }
            }
            let tol = cfg.tol(1e-12);
            out.push(Case::measured(format!("algebra/hodge_inner/n{n}"), "α∧*β = ⟨α,β⟩ vol", inner, tol));
            out.push(Case::measured(
                format!("algebra/hodge_square/n{n}"),
                "** = (−1)^{k(n−k)}",
                square,
                tol,
            ));
            out.push(Case::measured(
                format!("algebra/wedge_graded_commutative/n{n}"),
                "α∧β = (−1)^{kl} β∧α",
                graded,
                tol,
            ));
            out.push(Case::measured(
                format!("algebra/interior_antiderivation/n{n}"),
                "X⌟(α∧β) = (X⌟α)∧β + (−1)^k α∧(X⌟β)",
                leibniz,
                tol,
            ));
        }
        out
    }));

    jobs.push(job(move || {
        let anchor = "ρ*([ω,η]) = [ρ*(ω), ρ*(η)]";
        let mut rng = cfg.rng("rho_star");
        [5usize, 7]
            .into_iter()
            .map(|n| {
                let id = format!("algebra/rho_star_homomorphism/n{n}");
                guarded(&id, anchor, || {
                    let mut worst: f64 = 0.0;
                    for _ in 0..5 {
                        let (w, e) = (random_form(&mut rng, n, 2), random_form(&mut rng, n, 2));
                        let big = random_form(&mut rng, n, 3);
                        let lhs = groups::rho_star(&groups::bracket(&w, &e)?, &big)?;
                        let mut rhs = groups::rho_star(&w, &groups::rho_star(&e, &big)?)?;
                        rhs.axpy(&-1.0, &groups::rho_star(&e, &groups::rho_star(&w, &big)?)?);
                        worst = worst.max(lhs.distance(&rhs));
                    }
                    Ok(Case::measured(&id, anchor, worst, cfg.tol(1e-11)))
                })
            })
            .collect()
    }));

    jobs.push(job(move || {
        let anchor = "dim Δⁿ_G (complex)";
        [(GroupId::G2, 7, 1usize), (GroupId::Spin7, 8, 1), (GroupId::Un, 4, 0), (GroupId::Un, 6, 0)]
            .into_iter()
            .map(|(g, n, expected)| {
                let id = format!("algebra/invariant_spinors/{g}_n{n}");
                guarded(&id, anchor, || {
                    let b = groups::subalgebra(&g, n)?;
                    let inv = clifford::invariant_spinors(&build_clifford(n)?, &b.g_basis)?;
                    Ok(Case::exact(&id, anchor, expected, inv.complex_dim).with_detail("real_dim", &inv.real_dim))
                })
            })
            .collect()
    }));

    jobs.push(job(move || {
        let anchor = "dim {ω ∈ Λ² : ω·Ψ = 0}";
        let cases: [(&str, usize, Option<GroupId>, usize); 3] =
            [("n4", 4, None, 3), ("G2", 7, Some(GroupId::G2), 14), ("SPIN7", 8, Some(GroupId::Spin7), 21)];
        cases
            .into_iter()
            .map(|(tag, n, g, expected)| {
                let id = format!("algebra/spinor_isotropy/{tag}");
                guarded(&id, anchor, || {
                    let rep = build_clifford(n)?;
                    let psi = match g {
                        None => Spinor::basis(n, 0),
                        Some(g) => groups::invariant_spinor_of(&rep, &groups::subalgebra(&g, n)?)?
                            .ok_or_else(|| Error::Refused(format!("{g} fixes no spinor")))?,
                    };
                    Ok(Case::exact(&id, anchor, expected, clifford::spinor_isotropy_two_forms(&rep, &psi)?.len()))
                })
            })
            .collect()
    }));
}

// ---------------------------------------------------------------------------
// groups

struct GroupEntry {
    group: GroupId,
    n: usize,
    dim: usize,
    /// Degree and expected dimension of the invariant forms checked.
    invariant: Option<(usize, usize)>,
}

fn group_catalog() -> Vec<GroupEntry> {
    let e = |group: GroupId, n: usize, dim: usize, invariant: Option<(usize, usize)>| GroupEntry {
        group,
        n,
        dim,
        invariant,
    };
    let mut out = Vec::new();
    for n in [4usize, 6, 8] {
        out.push(e(GroupId::Un, n, (n / 2) * (n / 2), Some((2, 1))));
    }
    out.push(e(GroupId::G2, 7, 14, Some((3, 1))));
    out.push(e(GroupId::Spin7, 8, 21, Some((4, 1))));
    out.push(e(GroupId::So3Irred5, 5, 3, Some((3, 0))));
    out.push(e(GroupId::Spin9, 16, 36, Some((2, 0))));
    for n in [4usize, 5, 7, 8] {
        out.push(e(GroupId::SoNm1, n, (n - 1) * (n - 2) / 2, Some((1, 1))));
    }
    out.push(e(GroupId::Custom("SU2".into()), 4, 3, Some((2, 3))));
    out
}

fn groups_jobs<'a>(cfg: &'a SuiteConfig, jobs: &mut Vec<Job<'a>>) -> Result<()> {
    for entry in group_catalog().into_iter().filter(|e| cfg.wants_group(&e.group)) {
        jobs.push(job(move || group_cases(cfg, &entry)));
    }

    let so3 = GroupId::So3Irred5;
    if cfg.wants_group(&so3) {
        jobs.push(job(move || {
            let id = "groups/SO3_IRRED5/casimir_lambda3";
            let anchor = "Λ³(ℝ⁵) = 3 ⊕ 7 under SO(3)";
            vec![guarded(id, anchor, || {
                let b = groups::subalgebra(&so3, 5)?;
                let blocks = groups::casimir_split(&b, RepSpace::Forms(3))?;
                let mut mult: Vec<usize> = blocks.iter().map(|b| b.multiplicity).collect();
                mult.sort_unstable();
                let eig: Vec<f64> = blocks.iter().map(|b| round_to(b.eigenvalue, 1e-9)).collect();
                Ok(Case::exact(id, anchor, vec![3usize, 7], mult).with_detail("eigenvalues", &eig))
            })]
        }));
    }

    let wedge_cases: Vec<(String, GroupId, Form<f64>, bool)> = vec![
        ("G2".into(), GroupId::G2, groups::g2_form(), true),
        ("SPIN7".into(), GroupId::Spin7, groups::cayley_form(), true),
        ("U_n4".into(), GroupId::Un, groups::kahler_form(4), false),
        ("U_n6".into(), GroupId::Un, groups::kahler_form(6), true),
        ("U_n8".into(), GroupId::Un, groups::kahler_form(8), true),
    ];
    for (tag, g, big, expected) in wedge_cases {
        if !cfg.wants_group(&g) {
            continue;
        }
        jobs.push(job(move || {
            let id = format!("groups/{tag}/wedge_injective");
            let anchor = "η ↦ Ω∧η injective on Λ²";
            vec![guarded(&id, anchor, || {
                let w = groups::wedge_multiplication_injective(&big)?;
                Ok(Case::exact(&id, anchor, expected, w.injective)
                    .with_detail("rank", &w.rank)
                    .with_detail("kernel_dim", &w.kernel_dim))
            })]
        }));
    }

    if cfg.wants_group(&GroupId::Spin9) {
        jobs.push(job(move || spin9_eight_form_cases(cfg)));
    }

    if cfg.group.is_none() {
        jobs.push(job(move || cache_cases(cfg)));
    }
    Ok(())
}

fn round_to(x: f64, q: f64) -> f64 {
    let r = (x / q).round() * q;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn group_cases(cfg: &SuiteConfig, e: &GroupEntry) -> Vec<Case> {
    let tag = format!("groups/{}_n{}", e.group, e.n);
    let b = match groups::subalgebra(&e.group, e.n) {
        Ok(b) => b,
        Err(err) => return vec![Case::errored(format!("{tag}/dimension"), "dim g", &err)],
    };
    let mut out = vec![Case::exact(format!("{tag}/dimension"), "dim g", e.dim, b.dim_g())
        .with_detail("dim_m", &b.dim_m())
        .with_detail("backend", &b.backend())];
    out.push(Case::measured(
        format!("{tag}/bracket_closure"),
        "[g, g] ⊂ g",
        b.bracket_closure_residual(),
        cfg.tol(1e-10),
    ));
    out.push(Case::measured(
        format!("{tag}/orthogonality"),
        PLUMBING,
        b.orthogonality_residual(),
        cfg.tol(1e-10),
    ));
    if let Some((k, expected)) = e.invariant {
        let id = format!("{tag}/invariant_forms_{k}");
        let anchor = "dim (Λᵏ)^G";
        out.push(match groups::invariant_forms(&b, k) {
            Ok(f) => match f.dim() {
                Some(d) => {
                    let residual = f
                        .basis()
                        .iter()
                        .map(|w| groups::invariance_residual(&b, w).unwrap_or(f64::INFINITY))
                        .fold(0.0, f64::max);
                    let mut c = Case::exact(&id, anchor, expected, d);
                    c.detail("invariance_residual", &residual);
                    if d == expected && residual > cfg.tol(1e-9) {
                        c.status = Status::Fail;
                    }
                    c
                }
                None => Case::new(&id, anchor, Status::NotComputed).with_detail("form", &f),
            },
            Err(err) => Case::errored(&id, anchor, &err),
        });
    }
    out
}

fn spin9_eight_form_cases(cfg: &SuiteConfig) -> Vec<Case> {
    let inv_id = "groups/SPIN9_n16/eight_form_invariant";
    let inv_anchor = "ρ*(ω)Ω₈ = 0 for ω ∈ spin(9)";
    let wedge_id = "groups/SPIN9_n16/eight_form_wedge_injective";
    let wedge_anchor = "η ↦ Ω₈∧η injective on Λ²";
    if !cfg.stretch {
        return [(inv_id, inv_anchor), (wedge_id, wedge_anchor)]
            .into_iter()
            .map(|(id, a)| Case::new(id, a, Status::Skipped).with_detail("reason", "needs --stretch"))
            .collect();
    }
    let b = match groups::subalgebra(&GroupId::Spin9, 16) {
        Ok(b) => b,
        Err(e) => return vec![Case::errored(inv_id, inv_anchor, &e)],
    };
    let big = groups::spin9_eight_form();
    let scale = big.max_abs().max(f64::MIN_POSITIVE);
    let inv = guarded(inv_id, inv_anchor, || {
        let r = groups::invariance_residual(&b, &big)? / scale;
        let mut c = Case::measured(inv_id, inv_anchor, r, cfg.tol(1e-9));
        c.detail("terms", &big.nnz());
        if big.is_zero() {
            c.status = Status::Fail;
        }
        Ok(c)
    });
    let inj = guarded(wedge_id, wedge_anchor, || {
        let w = groups::wedge_multiplication_injective(&big)?;
        Ok(Case::exact(wedge_id, wedge_anchor, true, w.injective)
            .with_detail("rank", &w.rank)
            .with_detail("kernel_dim", &w.kernel_dim))
    });
    vec![inv, inj]
}

fn cache_cases(cfg: &SuiteConfig) -> Vec<Case> {
    let id = "groups/cache_round_trip";
    let Some(dir) = &cfg.cache_dir else {
        return vec![Case::new(id, PLUMBING, Status::Skipped).with_detail("reason", "no cache directory")];
    };
    let cache = GroupCache::new(dir);
    let entries = [(GroupId::Un, 4usize, 2usize), (GroupId::G2, 7, 3), (GroupId::Spin7, 8, 4)];
    let mut worst: f64 = 0.0;
    for (g, n, k) in entries {
        let r = cache
            .get_or_build(&g, n, &[k])
            .and_then(|stored| Ok((stored, CachedGroup::build(&g, n, &[k])?)));
        match r {
            Ok((stored, fresh)) => match stored.max_difference(&fresh) {
                Some(d) => worst = worst.max(d),
                None => {
                    return vec![Case::new(id, PLUMBING, Status::Fail).with_detail("error", &format!("{g}: shape mismatch"))]
                }
            },
            Err(e) => return vec![Case::errored(id, PLUMBING, &e)],
        }
    }
    vec![Case::measured(id, PLUMBING, worst, cfg.tol(1e-12))]
}

// ---------------------------------------------------------------------------
// torsion

fn torsion_jobs<'a>(cfg: &'a SuiteConfig, jobs: &mut Vec<Job<'a>>) -> Result<()> {
    let theta_cases = [
        (GroupId::Un, 4usize, true),
        (GroupId::Un, 6, true),
        (GroupId::G2, 7, true),
        (GroupId::Spin7, 8, true),
        (GroupId::So3Irred5, 5, false),
        (GroupId::Spin9, 16, false),
    ];
    if let Some(name) = &cfg.group {
        let g = GroupId::parse(name)?;
        if !theta_cases.iter().any(|c| c.0 == g) {
            return Err(Error::UnknownName {
                kind: "group for the torsion suite",
                name: name.clone(),
                available: ["U_n", "G2", "SPIN7", "SO3_IRRED5", "SPIN9"].map(String::from).to_vec(),
            });
        }
    }
    for (g, n, admits) in theta_cases {
        if !cfg.wants_group(&g) {
            continue;
        }
        jobs.push(job(move || theta_cases_for(cfg, &g, n, admits)));
    }
    Ok(())
}

fn theta_cases_for(cfg: &SuiteConfig, g: &GroupId, n: usize, admits: bool) -> Vec<Case> {
    let tag = format!("torsion/{g}_n{n}");
    let b = match groups::subalgebra(g, n) {
        Ok(b) => b,
        Err(e) => return vec![Case::errored(format!("{tag}/theta"), "Θ, Θ₁ images", &e)],
    };
    let mut out = Vec::new();
    let id = format!("{tag}/theta");
    out.push(guarded(&id, "Θ, Θ₁ images", || {
        let r = torsion::analyze_theta(&b)?;
        let mut c = Case::exact(&id, "Θ₁(ℝⁿ) ⊂ Θ(Λ³) iff ∇^c exists", admits, r.char_connection_for_vectorial);
        if *g == GroupId::So3Irred5 && r.image_meets_theta1 != ImageRelation::Complementary {
            c.status = Status::Fail;
        }
        c.detail("report", &r);
        Ok(c)
    }));

    let solver = match TorsionSolver::new(&b) {
        Ok(s) => s,
        Err(e) => {
            out.push(Case::errored(format!("{tag}/solver"), "Θ(T) = −2Θ₁(Γ)", &e));
            return out;
        }
    };
    let mut rng = cfg.rng(&tag);
    let gammas: Vec<Form<f64>> = (0..5).map(|_| random_form(&mut rng, n, 1)).collect();
    let tol = cfg.tol(1e-9);

    if !admits {
        let id = format!("{tag}/obstruction");
        out.push(guarded(&id, "no T with Θ(T) = −2Θ₁(Γ)", || {
            let sol = solver.solve(&gammas[0])?;
            let status = match sol {
                CharacteristicTorsion::NoSolution { .. } => Status::Pass,
                CharacteristicTorsion::Solution { .. } => Status::Fail,
            };
            Ok(Case::new(&id, "no T with Θ(T) = −2Θ₁(Γ)", status)
                .with_detail("expected", "no_solution")
                .with_detail("solver", &sol))
        }));
        return out;
    }

    let id = format!("{tag}/membership");
    out.push(guarded(&id, "pr_m(2X∧Γ + X⌟T^c) = 0", || {
        let mut worst: f64 = 0.0;
        for gamma in &gammas {
            let t = solved(&solver, gamma)?;
            worst = worst.max(torsion::membership_residual(&t, gamma, &b)?);
        }
        Ok(Case::measured(&id, "pr_m(2X∧Γ + X⌟T^c) = 0", worst, tol).with_detail("unique", &solver.unique()))
    }));

    match (g, n) {
        (GroupId::G2, 7) => {
            let id = format!("{tag}/closed_form");
            let anchor = "T^c = −*(Γ∧φ)";
            out.push(guarded(&id, anchor, || {
                let phi = groups::g2_form::<f64>();
                let mut worst: f64 = 0.0;
                for gamma in &gammas {
                    let closed = hodge(&wedge(gamma, &phi)?).scaled(&-1.0);
                    worst = worst.max(solved(&solver, gamma)?.distance(&closed));
                }
                Ok(Case::measured(&id, anchor, worst, tol))
            }));
        }
        (GroupId::Un, _) => {
            let id = format!("{tag}/closed_form");
            let anchor = "T^c = 2(JΓ∧Ω)";
            let om = groups::kahler_form::<f64>(n);
            out.push(guarded(&id, anchor, || {
                let mut worst: f64 = 0.0;
                for gamma in &gammas {
                    let closed = wedge(&interior(gamma, &om)?, &om)?.scaled(&2.0);
                    worst = worst.max(solved(&solver, gamma)?.distance(&closed));
                }
                Ok(Case::measured(&id, anchor, worst, tol))
            }));
            if n == 4 {
                let id = format!("{tag}/hodge_dual");
                let anchor = "Γ = ±*T^c";
                out.push(guarded(&id, anchor, || {
                    let (mut worst, mut ratio) = (0.0f64, Vec::new());
                    for gamma in &gammas {
                        let st = hodge(&solved(&solver, gamma)?);
                        let err = st.distance(gamma).min(st.distance(&gamma.scaled(&-1.0)));
                        worst = worst.max(err);
                        let r = form_inner(&st, gamma)? / form_inner(gamma, gamma)?;
                        ratio.push(round_to(r, 1e-9));
                    }
                    Ok(Case::measured(&id, anchor, worst, tol).with_detail("observed_star_t_over_gamma", &ratio))
                }));
            }
        }
        _ => {}
    }

    if matches!(g, GroupId::G2 | GroupId::Spin7) {
        let id = format!("{tag}/spinor_action");
        let anchor = "T^c·Ψ = (2/3)(n−1) Γ·Ψ";
        out.push(guarded(&id, anchor, || {
            let rep = build_clifford(n)?;
            let psi = groups::invariant_spinor_of(&rep, &b)?.ok_or(Error::ZeroSpinor)?;
            let c = C64::new(2.0 * (n as f64 - 1.0) / 3.0, 0.0);
            let mut worst: f64 = 0.0;
            for gamma in &gammas {
                let lhs = rep.act(&solved(&solver, gamma)?, &psi)?;
                let rhs = rep.act(gamma, &psi)?.scaled(c);
                worst = worst.max(lhs.distance(&rhs));
            }
            Ok(Case::measured(&id, anchor, worst, tol))
        }));
    }
    out
}

fn solved(solver: &TorsionSolver, gamma: &Form<f64>) -> Result<Form<f64>> {
    match solver.solve(gamma)? {
        CharacteristicTorsion::Solution { torsion, .. } => Ok(torsion),
        CharacteristicTorsion::NoSolution { relative_residual } => Err(Error::Refused(format!(
            "no characteristic torsion (relative residual {relative_residual:.2e})"
        ))),
    }
}

// ---------------------------------------------------------------------------
// manifold

type Verifier = fn(&Model, &VerifyConfig) -> Result<ModelReport>;

fn verifiers_for(m: &Model) -> Vec<(&'static str, Verifier)> {
    let mut v: Vec<(&'static str, Verifier)> = vec![("plumbing", verify_plumbing)];
    if m.group.is_some() && !m.invariant_forms.is_empty() {
        v.push(("forms_law", verify_forms_law));
    }
    if m.spinor.is_some() {
        v.push(("spinor_parallel", verify_spinor_parallel));
        v.push(("fixspinor_ricci", verify_fixspinor_ricci));
    }
    if m.spinor.is_some() && m.torsion.is_some() {
        v.push(("torsion_identities", verify_torsion_identities));
    }
    if m.kahler.is_some() && m.name.starts_with("hopf") {
        v.push(("hopf", verify_hopf));
    }
    if m.leaf_normal.is_some() {
        v.push(("foliation", verify_foliation));
    }
    v.push(("weyl", verify_weyl));
    v
}

fn check_case(prefix: &str, c: &IdentityCheck) -> Case {
    let mut case = Case::new(
        format!("{prefix}/{}", c.id),
        c.anchor.clone(),
        if c.passed { Status::Pass } else { Status::Fail },
    );
    case.max_abs_error = c.max_abs_error.is_finite().then_some(c.max_abs_error);
    case.tolerance = Some(c.tolerance);
    case.detail("measure", &c.measure)
        .detail("max_rel_error", &c.max_rel_error)
        .detail("points", &c.points);
    if let Some(n) = &c.note {
        case.detail("note", n);
    }
    case
}

fn model_label(name: &str, params: &BTreeMap<String, f64>) -> String {
    if params.is_empty() {
        return name.to_string();
    }
    let p: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{name}[{}]", p.join(","))
}

fn manifold_jobs<'a>(cfg: &'a SuiteConfig, jobs: &mut Vec<Job<'a>>) -> Result<()> {
    let fd = FdPolicy::new(cfg.fd_step);
    let mut models: Vec<(String, Model)> = Vec::new();
    match &cfg.model {
        Some(name) => {
            let m = Model::build(name, &cfg.params, fd)?;
            models.push((model_label(name, &cfg.params), m));
        }
        None => {
            for info in CATALOG {
                models.push((info.name.to_string(), Model::build(info.name, &BTreeMap::new(), fd)?));
            }
        }
    }
    let mut rigidity: Vec<(String, Model)> = models
        .iter()
        .filter(|(_, m)| m.name == "radial" || m.name == "hyperbolic")
        .cloned()
        .collect();
    if cfg.model.is_none() {
        for s in [0.0, 0.5, 1.5] {
            let p = BTreeMap::from([("s".to_string(), s)]);
            rigidity.push((model_label("hyperbolic", &p), Model::build("hyperbolic", &p, fd)?));
        }
    }

    let vcfg = cfg.verify_config();
    for (label, m) in models {
        for (kind, verifier) in verifiers_for(&m) {
            let (label, m, vcfg) = (label.clone(), m.clone(), vcfg.clone());
            jobs.push(job(move || {
                let prefix = format!("manifold/{label}/{kind}");
                match verifier(&m, &vcfg) {
                    Ok(r) => r.checks.iter().map(|c| check_case(&prefix, c)).collect(),
                    Err(e) => vec![Case::errored(prefix, PLUMBING, &e)],
                }
            }));
        }
        let label2 = label.clone();
        let m2 = m.clone();
        jobs.push(job(move || {
            let prefix = format!("manifold/{label2}/fd_convergence");
            match fd_convergence(&m2) {
                Ok(c) => vec![check_case(&prefix, &c)],
                Err(e) => vec![Case::errored(prefix, PLUMBING, &e)],
            }
        }));
    }
    for (label, m) in rigidity {
        let vcfg = vcfg.clone();
        jobs.push(job(move || {
            let id = format!("manifold/{label}/rigidity");
            let anchor = "∇^vec Γ = 0 ⇒ δΓ = (n−1)‖Γ‖²";
            vec![guarded(&id, anchor, || {
                let r = verify_vec_rigidity(&m, &vcfg)?;
                let status = if r.implication == "fails" { Status::Fail } else { Status::Pass };
                let mut c = Case::new(&id, anchor, status);
                c.max_abs_error = r.identity_error_on_premise;
                c.tolerance = Some(r.tolerance);
                c.detail("report", &r);
                Ok(c)
            })]
        }));
    }
    Ok(())
}
