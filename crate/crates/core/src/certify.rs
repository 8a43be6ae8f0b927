//! Essential-connectivity certificates along entourage schedules, flavor
//! comparisons, and the coarse-retract transfer experiment.
//!
//! For each stage `i` the least stage `j ≥ i` is searched such that, for
//! every degree `k < n`, the map from stage `i` (restricted to the interior
//! window) into stage `j` is trivial. Each cell records the method that
//! justified it: exact `π₀`, a `π₁` filling of generating loops, or a zero
//! map on `H_k`. "None within schedule" is the strongest negative reported.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSet;
use crate::coarse::{
    check_coarse_retract, CoarseError, EntourageSchedule, PointMap, RetractMode, RetractReport,
};
use crate::complexes::{build_flavor, ComplexError, Flavor, Space};
use crate::homology::{
    edge_loop_generators, pi0_induced_map, pi1_bounded_fill, ChainComplex, ChainMap, Coeff, Graph,
    Homology, HomologyError, HomologyMap,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("degree bound must be at least 1")]
    DegreeBound,
    #[error("dimension cap {cap} is too small for degree bound {n} (needs at least {n})")]
    DimCap { cap: usize, n: usize },
    #[error("depth table has {got} entries for {want} points")]
    Depth { got: usize, want: usize },
    #[error("negative margin")]
    Margin,
    #[error("retract precondition fails: {0}")]
    Retract(String),
    #[error(transparent)]
    Coarse(#[from] CoarseError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pi0Exact,
    Pi1Filled,
    HkZero,
    Failed,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Failed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyOptions {
    pub schedule_id: String,
    /// Degrees `0..n` are certified.
    pub n: usize,
    pub flavor: Flavor,
    pub coeff: Coeff,
    pub margin: f64,
    /// Defaults to `n`.
    pub dim_cap: Option<usize>,
    /// States explored per loop by the `π₁` search; `0` disables it.
    pub pi1_budget: usize,
    /// The `π₁` upgrade is skipped when a stage has more generating loops.
    pub pi1_max_loops: usize,
    pub timings: bool,
}

impl CertifyOptions {
    pub fn new(n: usize, flavor: Flavor) -> Self {
        Self {
            schedule_id: "schedule".into(),
            n,
            flavor,
            coeff: Coeff::Z2,
            margin: 0.0,
            dim_cap: None,
            pi1_budget: 2000,
            pi1_max_loops: 256,
            timings: false,
        }
    }
}

/// Certificate entries for one source stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    /// 1-based stage number.
    pub stage: usize,
    pub witness: Option<usize>,
    /// Stage at which `verdicts` were taken: the witness, or the last stage.
    pub checked_against: usize,
    /// Per degree `k < n`.
    pub verdicts: Vec<Verdict>,
    /// Betti numbers of the whole stage per degree `k < n`.
    pub betti: Vec<usize>,
    /// Per degree, per source class: the stage where its image first vanishes.
    pub deaths: Vec<Vec<Option<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowInfo {
    pub points: usize,
    pub interior_points: usize,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectivityCertificate {
    pub schedule_id: String,
    pub flavor: Flavor,
    pub degree_bound: usize,
    pub coeff: Coeff,
    pub dim_cap: usize,
    pub window: WindowInfo,
    pub stages: Vec<StageRecord>,
    pub complete: bool,
}

impl ConnectivityCertificate {
    pub fn witnesses(&self) -> Vec<Option<usize>> {
        self.stages.iter().map(|s| s.witness).collect()
    }
}

struct StageData {
    full: Space,
    full_graph: Graph,
    full_h: Option<Homology>,
    full_cc: Arc<ChainComplex>,
    interior_graph: Graph,
    interior_h: Option<Homology>,
    interior_cc: Arc<ChainComplex>,
}

fn prepare_stage(
    space: Space,
    interior: &BitSet,
    opts: &CertifyOptions,
) -> Result<StageData, CertifyError> {
    let inner = space.restrict(interior);
    let full_cc = Arc::new(ChainComplex::new(&space)?);
    let interior_cc = Arc::new(ChainComplex::new(&inner)?);
    let (full_h, interior_h) = if opts.n >= 1 {
        let top = opts.n - 1;
        (
            Some(Homology::compute(full_cc.clone(), opts.coeff, top)?),
            Some(Homology::compute(interior_cc.clone(), opts.coeff, top)?),
        )
    } else {
        (None, None)
    };
    Ok(StageData {
        full_graph: Graph::from(&space),
        interior_graph: Graph::from(&inner),
        full: space,
        full_h,
        full_cc,
        interior_h,
        interior_cc,
    })
}

/// Per-degree verdicts and per-class vanishing for the map `interior_i → full_j`.
fn evaluate_cell(
    src: &StageData,
    tgt: &StageData,
    opts: &CertifyOptions,
) -> Result<(Vec<Verdict>, Vec<Vec<bool>>), CertifyError> {
    let mut verdicts = Vec::with_capacity(opts.n);
    let mut dead = Vec::with_capacity(opts.n);
    let pi0 = pi0_induced_map(&src.interior_graph, &tgt.full_graph)?;
    verdicts.push(if pi0.trivial {
        Verdict::Pi0Exact
    } else {
        Verdict::Failed
    });
    // a component is dead once it meets the component of the least vertex
    let base = pi0.image.first().copied();
    dead.push(pi0.image.iter().map(|&t| Some(t) == base).collect());
    if opts.n >= 2 {
        let map = ChainMap::inclusion(&src.interior_cc, &tgt.full_cc)?;
        let (hs, ht) = (
            src.interior_h.as_ref().expect("homology"),
            tgt.full_h.as_ref().expect("homology"),
        );
        for k in 1..opts.n {
            let m = HomologyMap::induced(&map, k, hs, ht)?;
            let per_class: Vec<bool> = (0..m.cols())
                .map(|c| m.matrix.iter().all(|row| row[c] == 0))
                .collect();
            let mut v = if m.is_zero() {
                Verdict::HkZero
            } else {
                Verdict::Failed
            };
            if k == 1 && v == Verdict::HkZero && opts.pi1_budget > 0 {
                if let (Space::Complex(_), Space::Complex(target)) = (&src.full, &tgt.full) {
                    let loops = edge_loop_generators(&src.interior_graph);
                    if loops.len() <= opts.pi1_max_loops {
                        let all = loops.par_iter().all(|l| {
                            pi1_bounded_fill(l, target, opts.pi1_budget).is_ok_and(|o| o.is_found())
                        });
                        if all {
                            v = Verdict::Pi1Filled;
                        }
                    }
                }
            }
            verdicts.push(v);
            dead.push(per_class);
        }
    }
    Ok((verdicts, dead))
}

/// Certifies essential `(n−1)`-connectedness of the filtration given by
/// `flavor` over `schedule`, on the interior window `depth ≥ margin`.
///
/// `depth` gives each point's distance to the window edge.
pub fn certify_essential_connectivity(
    schedule: &EntourageSchedule,
    depth: &[f64],
    opts: &CertifyOptions,
) -> Result<ConnectivityCertificate, CertifyError> {
    if opts.n == 0 {
        return Err(CertifyError::DegreeBound);
    }
    let dim_cap = opts.dim_cap.unwrap_or(opts.n);
    if dim_cap < opts.n {
        return Err(CertifyError::DimCap {
            cap: dim_cap,
            n: opts.n,
        });
    }
    let npts = schedule.ground().len();
    if depth.len() != npts {
        return Err(CertifyError::Depth {
            got: depth.len(),
            want: npts,
        });
    }
    if opts.margin.is_nan() || opts.margin < 0.0 {
        return Err(CertifyError::Margin);
    }
    opts.coeff.validate()?;
    let mut interior = BitSet::new(npts);
    for (i, &d) in depth.iter().enumerate() {
        if d >= opts.margin {
            interior.insert(i);
        }
    }
    if interior.is_empty() {
        log::warn!("interior window is empty at margin {}", opts.margin);
    }
    let m = schedule.len();
    let stages: Vec<StageData> = schedule
        .stages()
        .par_iter()
        .map(|u| prepare_stage(build_flavor(u, opts.flavor, dim_cap)?, &interior, opts))
        .collect::<Result<_, CertifyError>>()?;

    let records = (0..m)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let n_classes: Vec<usize> = (0..opts.n)
                .map(|k| {
                    if k == 0 {
                        stages[i].interior_graph.components().1
                    } else {
                        stages[i]
                            .interior_h
                            .as_ref()
                            .expect("homology")
                            .generator_count(k)
                    }
                })
                .collect();
            let mut deaths: Vec<Vec<Option<usize>>> =
                n_classes.iter().map(|&c| vec![None; c]).collect();
            let mut witness = None;
            let mut last = Vec::new();
            let mut checked = m;
            for j in i..m {
                let (verdicts, dead) = evaluate_cell(&stages[i], &stages[j], opts)?;
                for (k, row) in dead.iter().enumerate() {
                    for (c, &is_dead) in row.iter().enumerate() {
                        if is_dead && deaths[k][c].is_none() {
                            deaths[k][c] = Some(j + 1);
                        }
                    }
                }
                let ok = verdicts.iter().all(|v| v.passed());
                last = verdicts;
                if ok {
                    witness = Some(j + 1);
                    checked = j + 1;
                    break;
                }
            }
            let betti = {
                let mut b = vec![stages[i].full_graph.components().1];
                if let Some(h) = &stages[i].full_h {
                    b.extend(h.betti().into_iter().skip(1));
                }
                b.truncate(opts.n);
                b
            };
            Ok(StageRecord {
                stage: i + 1,
                witness,
                checked_against: checked,
                verdicts: last,
                betti,
                deaths,
                elapsed_ms: opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
            })
        })
        .collect::<Result<Vec<_>, CertifyError>>()?;
    let complete = records.iter().all(|r| r.witness.is_some());
    Ok(ConnectivityCertificate {
        schedule_id: opts.schedule_id.clone(),
        flavor: opts.flavor,
        degree_bound: opts.n,
        coeff: opts.coeff,
        dim_cap,
        window: WindowInfo {
            points: npts,
            interior_points: interior.count(),
            margin: opts.margin,
        },
        stages: records,
        complete,
    })
}

/// Cross-flavor comparison on a single schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlavorComparison {
    pub certificates: Vec<ConnectivityCertificate>,
    /// Per stage: least stage containing `U_i ∘ U_i`, if any.
    pub composite_stage: Vec<Option<usize>>,
    pub bounds_checked: usize,
    pub warnings: Vec<String>,
    /// Violations of the sandwich bounds or of the tuple/set equivalence.
    pub discrepancies: Vec<String>,
}

impl FlavorComparison {
    pub fn consistent(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn certificate(&self, flavor: Flavor) -> &ConnectivityCertificate {
        self.certificates
            .iter()
            .find(|c| c.flavor == flavor)
            .expect("all flavors present")
    }
}

/// Runs all four flavors and checks the bounds implied by
/// `VR_U ⊆ Č_U ⊆ VR_{U∘U}` and by the equivalence of tuple and set flavors.
pub fn compare_flavors(
    schedule: &EntourageSchedule,
    depth: &[f64],
    base: &CertifyOptions,
) -> Result<FlavorComparison, CertifyError> {
    let certificates = Flavor::ALL
        .iter()
        .map(|&flavor| {
            let opts = CertifyOptions {
                flavor,
                ..base.clone()
            };
            certify_essential_connectivity(schedule, depth, &opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let m = schedule.len();
    let composite_stage = schedule
        .stages()
        .iter()
        .map(|u| Ok(schedule.least_containing(&u.compose(u)?)))
        .collect::<Result<Vec<_>, CoarseError>>()?;
    let w = |f: Flavor| {
        certificates
            .iter()
            .find(|c| c.flavor == f)
            .expect("flavor")
            .witnesses()
    };
    let mut warnings = Vec::new();
    let mut discrepancies = Vec::new();
    let mut bounds_checked = 0;
    for (vr, cech, family) in [
        (Flavor::ComplexVr, Flavor::ComplexCech, "C"),
        (Flavor::SetVr, Flavor::SetCech, "E"),
    ] {
        let (wv, wc) = (w(vr), w(cech));
        for i in 0..m {
            // VR_i ⊆ Č_i → Č_{jČ(i)} ⊆ VR_{c(jČ(i))}
            if let Some(jc) = wc[i] {
                // equal stages can put the composite below the stage itself
                match composite_stage[jc - 1].map(|c| c.max(i + 1)) {
                    Some(c) => {
                        bounds_checked += 1;
                        if wv[i].is_none_or(|jv| jv > c) {
                            discrepancies.push(format!(
                                "{family}: stage {}: VR witness {:?} exceeds bound {c} from the Čech witness {jc}",
                                i + 1,
                                wv[i]
                            ));
                        }
                    }
                    None => warnings.push(format!(
                        "{family}: stage {}: no composite stage available for U_{jc}∘U_{jc}",
                        i + 1
                    )),
                }
            }
            // Č_i ⊆ VR_{c(i)} → VR_{jVR(c(i))} ⊆ Č_{jVR(c(i))}
            match composite_stage[i] {
                Some(c) => {
                    if let Some(jv) = wv[c - 1].map(|j| j.max(i + 1)) {
                        bounds_checked += 1;
                        if wc[i].is_none_or(|j| j > jv) {
                            discrepancies.push(format!(
                                "{family}: stage {}: Čech witness {:?} exceeds bound {jv} from the VR witness at stage {c}",
                                i + 1,
                                wc[i]
                            ));
                        }
                    }
                }
                None => warnings.push(format!(
                    "{family}: stage {}: no composite stage available for U_{}∘U_{}",
                    i + 1,
                    i + 1,
                    i + 1
                )),
            }
        }
    }
    for (c, e) in [
        (Flavor::ComplexVr, Flavor::SetVr),
        (Flavor::ComplexCech, Flavor::SetCech),
    ] {
        bounds_checked += m;
        if w(c) != w(e) {
            discrepancies.push(format!(
                "{} and {} witnesses differ: {:?} vs {:?}",
                c.name(),
                e.name(),
                w(c),
                w(e)
            ));
        }
    }
    warnings.dedup();
    Ok(FlavorComparison {
        certificates,
        composite_stage,
        bounds_checked,
        warnings,
        discrepancies,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferOutcome {
    /// Every predicted bound is met.
    Holds,
    /// The retract hypothesis fails on the window; nothing to transfer.
    RetractFailsOnWindow,
    /// `X` is not certified, so the implication is vacuous.
    SourceIncomplete,
    /// Some stage of `Y` misses its predicted bound.
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RetractTransferReport {
    pub retract: RetractReport,
    pub x: ConnectivityCertificate,
    pub y: ConnectivityCertificate,
    /// Per stage of `Y`: the bound obtained by pushing `X`'s witness through `r`
    /// and the closeness stage, raised to the stage itself.
    pub predicted: Vec<Option<usize>>,
    pub counterexample: Option<usize>,
    pub outcome: TransferOutcome,
    pub note: String,
}

/// Certifies `X` and `Y` and checks that `Y`'s witnesses respect the bound
/// predicted from `X`'s through the retraction.
///
/// For a stage `U` of `Y`: `(i×i)(U) ⊆ X_a`, `X_a → X_{j(a)}` is trivial,
/// `(r×r)(X_{j(a)}) ⊆ Y_b`, and `r∘i` is `W`-close to the identity, so the
/// inclusion of `Y_U` into the stage containing `Y_b ∘ W` factors up to
/// contiguity through the trivial map.
pub fn retract_transfer_experiment(
    i: &PointMap,
    r: &PointMap,
    xs: &EntourageSchedule,
    x_depth: &[f64],
    ys: &EntourageSchedule,
    y_depth: &[f64],
    opts: &CertifyOptions,
) -> Result<RetractTransferReport, CertifyError> {
    let retract = check_coarse_retract(i, r, xs, ys, RetractMode::Retract)
        .map_err(|e| CertifyError::Retract(e.to_string()))?;
    let x = certify_essential_connectivity(xs, x_depth, opts)?;
    let y = certify_essential_connectivity(ys, y_depth, opts)?;
    let m = ys.len();
    let mut predicted = vec![None; m];
    if let Some(w) = retract.closeness_stage {
        let wu = ys.stage(w);
        for (s, p) in predicted.iter_mut().enumerate() {
            let Some(a) = retract.inclusion.witnesses[s] else {
                continue;
            };
            let Some(ja) = x.stages[a - 1].witness else {
                continue;
            };
            let Some(b) = retract.retraction.witnesses[ja - 1] else {
                continue;
            };
            // witnesses are never below their own stage
            *p = ys
                .least_containing(&ys.stage(b).compose(wu)?)
                .map(|c| c.max(s + 1));
        }
    }
    let counterexample = (0..m).find(|&s| match predicted[s] {
        Some(p) => y.stages[s].witness.is_none_or(|j| j > p),
        None => false,
    });
    let (outcome, note) = if !retract.holds() {
        (
            TransferOutcome::RetractFailsOnWindow,
            "the retract hypothesis fails on this window (see the bornologous witness tables), \
             so the certificates need not be related"
                .to_string(),
        )
    } else if let Some(s) = counterexample {
        (
            TransferOutcome::Counterexample,
            format!(
                "stage {} of Y misses its predicted bound; this indicates a window artifact or a bug, \
                 not a failure of the transfer statement",
                s + 1
            ),
        )
    } else if !x.complete {
        (
            TransferOutcome::SourceIncomplete,
            "X is not certified on this window; the implication is vacuous".to_string(),
        )
    } else {
        (
            TransferOutcome::Holds,
            "all predicted bounds are met".to_string(),
        )
    };
    Ok(RetractTransferReport {
        retract,
        x,
        y,
        predicted,
        counterexample,
        outcome,
        note,
    })
}
