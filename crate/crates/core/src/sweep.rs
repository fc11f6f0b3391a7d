//! Point evaluation and parallel parameter sweeps with CSV output.

use std::io::{self, Write};

use serde::Serialize;

use crate::config::{AxisVariable, BranchPolicy, SweepConfig};
use crate::dynamics::{build_diffusion, build_drift, build_reduced};
use crate::error::{Error, Result};
use crate::gaussian::{
    extract_pair, fidelity_bound, log_negativity, symplectic_eigenvalues, teleportation_fidelity,
    BipartitePair, CoherentInput, EntanglementResult,
};
use crate::linalg::Matrix;
use crate::lyapunov::{is_hurwitz, solve_lyapunov_unchecked, HurwitzTest, RESIDUAL_GATE};
use crate::params::{DerivedScalars, DetuningMode, PhysicalParams};
use crate::squeezing::SqueezedBath;
use crate::stability::{axis_detuning, reduced_conditions, stability_map, StabilityMap};
use crate::steady::{steady_states, SteadyState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOptions {
    pub pairs: Vec<BipartitePair>,
    pub fidelity: bool,
    pub fidelity_input: CoherentInput,
    pub branch_policy: BranchPolicy,
}

impl Default for PointOptions {
    fn default() -> Self {
        Self {
            pairs: BipartitePair::ALL.to_vec(),
            fidelity: true,
            fidelity_input: CoherentInput::Identity,
            branch_policy: BranchPolicy::LowestStable,
        }
    }
}

impl PointOptions {
    pub fn from_config(cfg: &SweepConfig) -> Self {
        Self {
            pairs: cfg.outputs.pairs.clone(),
            fidelity: cfg.outputs.fidelity,
            fidelity_input: cfg.fidelity_input,
            branch_policy: cfg.branch_policy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMeasure {
    pub pair: BipartitePair,
    #[serde(flatten)]
    pub result: EntanglementResult<f64>,
}

/// Stationary measures of one stable branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measures {
    pub covariance: Matrix<f64>,
    pub lyapunov_residual: f64,
    pub entanglement: Vec<PairMeasure>,
    pub fidelity: Option<f64>,
    pub fidelity_bound: Option<f64>,
    pub min_symplectic: f64,
}

impl Measures {
    pub fn log_neg(&self, pair: BipartitePair) -> Option<f64> {
        self.pair(pair).map(|r| r.log_neg)
    }

    pub fn pair(&self, pair: BipartitePair) -> Option<&EntanglementResult<f64>> {
        self.entanglement
            .iter()
            .find(|m| m.pair == pair)
            .map(|m| &m.result)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchResult {
    pub index: usize,
    pub steady: SteadyState,
    pub drift: Matrix<f64>,
    pub hurwitz: HurwitzTest<f64>,
    /// Normalized `(s₁, s₂)` of the collective model (identical cavities).
    pub conditions: Option<(f64, f64)>,
    pub hurwitz_reduced: Option<bool>,
    /// Present for stable branches whose covariance could be computed.
    pub measures: Option<Measures>,
    pub error: Option<String>,
    /// Lyapunov residual at or above the gate.
    pub gate_failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub params: PhysicalParams,
    pub derived: DerivedScalars,
    pub bath: SqueezedBath<f64>,
    pub branches: Vec<BranchResult>,
    /// Indices into `branches` chosen by the branch policy.
    pub selected: Vec<usize>,
}

fn measures(
    params: &PhysicalParams,
    bath: &SqueezedBath<f64>,
    drift: &Matrix<f64>,
    opts: &PointOptions,
) -> Result<Measures> {
    let q = build_diffusion(params, bath)?;
    let sol = solve_lyapunov_unchecked(drift, &q)?;
    let w = sol.w;
    let mut entanglement = Vec::with_capacity(opts.pairs.len());
    for &pair in &opts.pairs {
        entanglement.push(PairMeasure {
            pair,
            result: log_negativity(&extract_pair(&w, pair))?,
        });
    }
    let (fidelity, bound) = if opts.fidelity {
        let pc = extract_pair(&w, BipartitePair::F1F2);
        let en = log_negativity(&pc)?.log_neg;
        let f = teleportation_fidelity(&pc, &opts.fidelity_input.matrix())?;
        (Some(f), Some(fidelity_bound(en)))
    } else {
        (None, None)
    };
    let min_symplectic = symplectic_eigenvalues(&w)?[0];
    Ok(Measures {
        covariance: w,
        lyapunov_residual: sol.residual_norm,
        entanglement,
        fidelity,
        fidelity_bound: bound,
        min_symplectic,
    })
}

fn evaluate_branch(
    params: &PhysicalParams,
    bath: &SqueezedBath<f64>,
    index: usize,
    ss: SteadyState,
    opts: &PointOptions,
) -> Result<BranchResult> {
    let drift = build_drift(&ss, params);
    let hurwitz = is_hurwitz(&drift)?;
    let (conditions, hurwitz_reduced) = if params.is_symmetric() {
        let model = build_reduced(params, ss.eff_coupling[0], axis_detuning(params, &ss))?;
        (
            Some(reduced_conditions(&model)),
            Some(is_hurwitz(&model.drift)?.is_hurwitz),
        )
    } else {
        (None, None)
    };
    let mut out = BranchResult {
        index,
        steady: ss,
        drift,
        hurwitz,
        conditions,
        hurwitz_reduced,
        measures: None,
        error: None,
        gate_failed: false,
    };
    if hurwitz.is_hurwitz {
        match measures(params, bath, &out.drift, opts) {
            Ok(m) => {
                if !(m.lyapunov_residual < RESIDUAL_GATE) {
                    out.gate_failed = true;
                    out.error = Some(format!(
                        "lyapunov residual {:e} above gate {RESIDUAL_GATE:e}",
                        m.lyapunov_residual
                    ));
                }
                out.measures = Some(m);
            }
            Err(e) => out.error = Some(e.to_string()),
        }
    }
    Ok(out)
}

/// Every stage of the pipeline for one parameter point. Unstable branches
/// are reported without measures; failures inside a branch are stored on
/// the branch.
pub fn evaluate_point(
    params: &PhysicalParams,
    bath: &SqueezedBath<f64>,
    opts: &PointOptions,
) -> Result<PointResult> {
    params.validate()?;
    bath.validate()?;
    let states = steady_states(params)?;
    let branches = states
        .into_iter()
        .enumerate()
        .map(|(k, ss)| evaluate_branch(params, bath, k, ss, opts))
        .collect::<Result<Vec<_>>>()?;
    let selected = match opts.branch_policy {
        BranchPolicy::All => (0..branches.len()).collect(),
        BranchPolicy::LowestStable => vec![branches
            .iter()
            .position(|b| b.hurwitz.is_hurwitz)
            .unwrap_or(0)],
    };
    Ok(PointResult {
        params: params.clone(),
        derived: params.derived(),
        bath: *bath,
        branches,
        selected,
    })
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub coords: Vec<f64>,
    pub branch: Option<usize>,
    pub branch_count: usize,
    /// `|a_1|`, `|a_2|`.
    pub amp: Option<[f64; 2]>,
    /// `G_j/ω_m`.
    pub coupling: Option<[f64; 2]>,
    pub stable: Option<bool>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub hurwitz_reduced: Option<bool>,
    /// In [`BipartitePair::ALL`] order.
    pub log_neg: [Option<f64>; 4],
    pub theta_minus: [Option<f64>; 4],
    pub fidelity: Option<f64>,
    pub fidelity_bound: Option<f64>,
    pub lyapunov_residual: Option<f64>,
    pub min_symplectic: Option<f64>,
    pub error: Option<String>,
    pub gate_failed: bool,
}

impl ResultRecord {
    fn failed(coords: &[f64], err: &Error) -> Self {
        Self {
            coords: coords.to_vec(),
            branch: None,
            branch_count: 0,
            amp: None,
            coupling: None,
            stable: None,
            s1: None,
            s2: None,
            hurwitz_reduced: None,
            log_neg: [None; 4],
            theta_minus: [None; 4],
            fidelity: None,
            fidelity_bound: None,
            lyapunov_residual: None,
            min_symplectic: None,
            error: Some(err.to_string()),
            gate_failed: false,
        }
    }

    fn from_branch(coords: &[f64], count: usize, wm: f64, b: &BranchResult) -> Self {
        let mut log_neg = [None; 4];
        let mut theta_minus = [None; 4];
        if let Some(m) = &b.measures {
            for (k, pair) in BipartitePair::ALL.into_iter().enumerate() {
                if let Some(r) = m.pair(pair) {
                    log_neg[k] = Some(r.log_neg);
                    theta_minus[k] = Some(r.theta_minus);
                }
            }
        }
        let m = b.measures.as_ref();
        Self {
            coords: coords.to_vec(),
            branch: Some(b.index),
            branch_count: count,
            amp: Some(b.steady.amp.map(|a| a.norm())),
            coupling: Some(b.steady.eff_coupling.map(|g| g / wm)),
            stable: Some(b.hurwitz.is_hurwitz),
            s1: b.conditions.map(|c| c.0),
            s2: b.conditions.map(|c| c.1),
            hurwitz_reduced: b.hurwitz_reduced,
            log_neg,
            theta_minus,
            fidelity: m.and_then(|m| m.fidelity),
            fidelity_bound: m.and_then(|m| m.fidelity_bound),
            lyapunov_residual: m.map(|m| m.lyapunov_residual),
            min_symplectic: m.map(|m| m.min_symplectic),
            error: b.error.clone(),
            gate_failed: b.gate_failed,
        }
    }
}

/// Records for one grid coordinate according to the branch policy.
pub fn run_point(
    params: &PhysicalParams,
    bath: &SqueezedBath<f64>,
    opts: &PointOptions,
    coords: &[f64],
) -> Vec<ResultRecord> {
    match evaluate_point(params, bath, opts) {
        Ok(pr) => pr
            .selected
            .iter()
            .map(|&k| {
                ResultRecord::from_branch(coords, pr.branches.len(), params.omega_m(), &pr.branches[k])
            })
            .collect(),
        Err(e) => vec![ResultRecord::failed(coords, &e)],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axes: Vec<AxisVariable>,
    /// Grid order, last axis fastest; several rows per point under
    /// [`BranchPolicy::All`].
    pub records: Vec<ResultRecord>,
}

impl SweepTable {
    pub fn gate_failures(&self) -> usize {
        self.records.iter().filter(|r| r.gate_failed).count()
    }

    pub fn errors(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

fn with_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Evaluates every grid point in parallel. The output order does not depend
/// on the number of workers.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    use rayon::prelude::*;
    cfg.validate_sweep()?;
    let opts = PointOptions::from_config(cfg);
    let grid = cfg.grid();
    let records = with_pool(cfg.workers, || {
        grid.par_iter()
            .map(|coords| {
                let (p, bath) = cfg.point(coords);
                run_point(&p, &bath.bath(), &opts, coords)
            })
            .collect::<Vec<_>>()
    })?;
    Ok(SweepTable {
        axes: cfg.axes.iter().map(|a| a.variable).collect(),
        records: records.into_iter().flatten().collect(),
    })
}

/// Stability map over a detuning axis and a hop-strength axis, in either
/// order.
pub fn run_stability(cfg: &SweepConfig) -> Result<StabilityMap> {
    cfg.validate_sweep()?;
    let find = |v: AxisVariable| cfg.axes.iter().find(|a| a.variable == v);
    let (Some(d), Some(x)) = (find(AxisVariable::Detuning), find(AxisVariable::HopStrength)) else {
        return Err(Error::Config(
            "a stability map needs a detuning axis and a hop_strength axis".into(),
        ));
    };
    if !matches!(cfg.base.detuning, DetuningMode::Effective(_)) {
        return Err(Error::Config(
            "a stability map is defined on the effective detuning".into(),
        ));
    }
    let (d, x) = (d.values.clone(), x.values.clone());
    with_pool(cfg.workers, || stability_map(&cfg.base, &d, &x))
}

/// Fixed-width scientific notation; empty for missing values.
pub fn fmt_float(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.11e}")).unwrap_or_default()
}

fn fmt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace(['\n', '\r'], " "))
    } else {
        s.to_string()
    }
}

fn header_comments<W: Write>(w: &mut W, kind: &str, cfg: &SweepConfig) -> io::Result<()> {
    writeln!(w, "# optomech {kind}")?;
    if !cfg.title.is_empty() {
        writeln!(w, "# title: {}", cfg.title)?;
    }
    for note in &cfg.notes {
        writeln!(w, "# {note}")?;
    }
    let mode = match cfg.base.detuning {
        DetuningMode::Bare(_) => "bare",
        DetuningMode::Effective(_) => "effective",
    };
    writeln!(
        w,
        "# detuning: {mode}, sign convention {:?}, positive axis values are red-detuned, axis in units of omega_m",
        cfg.base.detuning_sign
    )?;
    let b = cfg.bath;
    writeln!(
        w,
        "# bath: N = {}, M = {}{}",
        b.photon_number,
        b.correlation,
        if b.ideal { " (ideal, M follows N)" } else { "" }
    )?;
    writeln!(
        w,
        "# omega_m = {} rad/s, branch policy {:?}, fidelity input {:?}",
        cfg.base.omega_m(),
        cfg.branch_policy,
        cfg.fidelity_input
    )?;
    let shape: Vec<String> = cfg.axes.iter().map(|a| a.values.len().to_string()).collect();
    writeln!(w, "# grid: {}", shape.join(" x "))
}

pub const RECORD_COLUMNS: [&str; 24] = [
    "branch",
    "branch_count",
    "amp1",
    "amp2",
    "G1_over_omega_m",
    "G2_over_omega_m",
    "stable",
    "s1",
    "s2",
    "hurwitz_reduced",
    "EN_F1M1",
    "EN_F2M2",
    "EN_M1M2",
    "EN_F1F2",
    "theta_F1M1",
    "theta_F2M2",
    "theta_M1M2",
    "theta_F1F2",
    "F_teleport",
    "F_bound",
    "lyapunov_residual",
    "min_symplectic",
    "gate_failed",
    "error",
];

pub fn write_sweep_csv<W: Write>(w: &mut W, cfg: &SweepConfig, table: &SweepTable) -> io::Result<()> {
    header_comments(w, "sweep", cfg)?;
    let mut cols: Vec<&str> = table.axes.iter().map(|a| a.column()).collect();
    cols.extend(RECORD_COLUMNS);
    writeln!(w, "{}", cols.join(","))?;
    for r in &table.records {
        let mut f: Vec<String> = r.coords.iter().map(|&c| fmt_float(Some(c))).collect();
        f.push(r.branch.map(|b| b.to_string()).unwrap_or_default());
        f.push(r.branch_count.to_string());
        f.push(fmt_float(r.amp.map(|a| a[0])));
        f.push(fmt_float(r.amp.map(|a| a[1])));
        f.push(fmt_float(r.coupling.map(|g| g[0])));
        f.push(fmt_float(r.coupling.map(|g| g[1])));
        f.push(fmt_bool(r.stable));
        f.push(fmt_float(r.s1));
        f.push(fmt_float(r.s2));
        f.push(fmt_bool(r.hurwitz_reduced));
        f.extend(r.log_neg.iter().map(|&v| fmt_float(v)));
        f.extend(r.theta_minus.iter().map(|&v| fmt_float(v)));
        f.push(fmt_float(r.fidelity));
        f.push(fmt_float(r.fidelity_bound));
        f.push(fmt_float(r.lyapunov_residual));
        f.push(fmt_float(r.min_symplectic));
        f.push(r.gate_failed.to_string());
        f.push(r.error.as_deref().map(csv_text).unwrap_or_default());
        writeln!(w, "{}", f.join(","))?;
    }
    Ok(())
}

pub fn write_stability_csv<W: Write>(w: &mut W, cfg: &SweepConfig, map: &StabilityMap) -> io::Result<()> {
    header_comments(w, "stability", cfg)?;
    writeln!(
        w,
        "# s1 in units of omega_m^3, s2 in units of omega_m^6; cells {}, both conditions {}, full hurwitz {}, reduced hurwitz {}, disagreements {}, errors {}",
        map.cells.len(),
        map.both_conditions,
        map.hurwitz_full,
        map.hurwitz_reduced,
        map.disagreements.len(),
        map.errors
    )?;
    writeln!(
        w,
        "delta_over_omega_m,xi_over_omega_m,s1,s2,hurwitz_reduced,hurwitz_full,agree,error"
    )?;
    for c in &map.cells {
        let (s1, s2, hr, hf, ag, err) = match &c.report {
            Ok(r) => (
                Some(r.s1),
                Some(r.s2),
                Some(r.hurwitz_reduced),
                Some(r.hurwitz_full),
                Some(r.agree),
                String::new(),
            ),
            Err(e) => (None, None, None, None, None, csv_text(e)),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_float(Some(c.delta)),
            fmt_float(Some(c.xi)),
            fmt_float(s1),
            fmt_float(s2),
            fmt_bool(hr),
            fmt_bool(hf),
            fmt_bool(ag),
            err
        )?;
    }
    Ok(())
}
