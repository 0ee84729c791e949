//! DAG curves over knowledge quantity or quality, and the two critical
//! points they exhibit.
//!
//! Sweeping query size `n_Q` at fixed density traces the transition
//! phenomenon: the curve descends to a minimum (the valley point) as the
//! shrinking candidate space loses to the shrinking match probability,
//! then rises until the expected match count drops below one (the vanish
//! point), beyond which a unique match re-identifies the whole query.

use crate::graph::AttributeSchema;
use crate::knowledge::{
    analytic_point, DagStatus, DagValue, EdgeMode, KnowledgeError, KnowledgeSpec,
};
use crate::logspace::{round_ties_even, LogScalar};
use alloc::vec::Vec;

/// What varies along the curve. Everything else is held at the values
/// recorded in the enclosing [`SweepCurve`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SweepAxis {
    /// Knowledge quantity: query size `n_Q`, with edge density `p_q` fixed
    /// so that `m_Q = round(p_q * m0)` (ties to even).
    QuerySize { p_q: f64 },
    /// Knowledge quantity: query density `p_q`, with `n_Q` fixed.
    QueryDensity { n_q: u64 },
    /// Knowledge quality: the ratio `r` of pairs with confident knowledge
    /// in the three-level model, split evenly between high and low
    /// (`x1 = x0 = round(r * m0 / 2)`). The spec's edge mode is replaced
    /// per point; its attribute mode still applies.
    KnownRatio { n_q: u64, p1: f64, p0: f64 },
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::QuerySize { .. } => "n_q",
            SweepAxis::QueryDensity { .. } => "p_q",
            SweepAxis::KnownRatio { .. } => "r",
        }
    }
}

/// One evaluated grid point. The two log factors decompose
/// `ln M_Q = ln_candidates + ln_match_probability`; along a `QuerySize`
/// sweep the first is increasing and the second nonincreasing, which is
/// what produces the valley.
#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub x: f64,
    pub n_q: u64,
    pub m_q: u64,
    pub ln_candidates: f64,
    pub ln_match_probability: f64,
    pub match_count: LogScalar,
    pub dag: DagValue,
}

/// An ordered DAG curve plus the parameters it was computed under.
#[derive(Clone, Debug)]
pub struct SweepCurve {
    pub axis: SweepAxis,
    pub n: u64,
    pub p: f64,
    pub spec: KnowledgeSpec,
    /// Grid resolution; critical points are only meaningful at this step.
    pub step: f64,
    pub points: Vec<SweepPoint>,
    /// Grid points whose parameter combination was invalid, with the
    /// reason; the sweep itself never fails.
    pub skipped: Vec<(f64, KnowledgeError)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalPoints {
    /// x of the interior minimum of the Normal segment, if any.
    pub valley: Option<f64>,
    /// Smallest x whose expected match count falls below one, if any.
    pub vanish: Option<f64>,
}

/// Inclusive arithmetic grid `from, from+step, ..` up to `to` (a final
/// point within `1e-9 * step` of `to` is snapped onto it).
pub fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    debug_assert!(step > 0.0 && to >= from);
    let mut xs = Vec::new();
    let mut i = 0u64;
    loop {
        let x = from + i as f64 * step;
        if x > to + 1e-9 * step {
            break;
        }
        xs.push(if (x - to).abs() <= 1e-9 * step { to } else { x });
        i += 1;
    }
    xs
}

/// Evaluates the analytic DAG at every grid point. `x` values must be
/// strictly increasing; invalid points are recorded in `skipped`.
pub fn sweep(
    spec: &KnowledgeSpec,
    n: u64,
    p: f64,
    axis: SweepAxis,
    xs: &[f64],
    step: f64,
    schema: Option<&AttributeSchema>,
) -> SweepCurve {
    debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
    let mut curve = SweepCurve {
        axis: axis.clone(),
        n,
        p,
        spec: spec.clone(),
        step,
        points: Vec::with_capacity(xs.len()),
        skipped: Vec::new(),
    };
    for &x in xs {
        match eval_point(spec, n, p, &axis, x, schema) {
            Ok(point) => curve.points.push(point),
            Err(e) => curve.skipped.push((x, e)),
        }
    }
    curve
}

fn eval_point(
    spec: &KnowledgeSpec,
    n: u64,
    p: f64,
    axis: &SweepAxis,
    x: f64,
    schema: Option<&AttributeSchema>,
) -> Result<SweepPoint, KnowledgeError> {
    let (n_q, m_q, spec_at) = match *axis {
        SweepAxis::QuerySize { p_q } => {
            let n_q = x as u64;
            let m0 = n_q * n_q.saturating_sub(1) / 2;
            (n_q, round_ties_even(p_q * m0 as f64), spec.clone())
        }
        SweepAxis::QueryDensity { n_q } => {
            let m0 = n_q * n_q.saturating_sub(1) / 2;
            (n_q, round_ties_even(x * m0 as f64), spec.clone())
        }
        SweepAxis::KnownRatio { n_q, p1, p0 } => {
            let m0 = n_q * n_q.saturating_sub(1) / 2;
            let mut spec_at = spec.clone();
            spec_at.edge_mode = EdgeMode::three_level_from_ratio(p1, p0, x, m0);
            (n_q, 0, spec_at)
        }
    };
    let point = analytic_point(&spec_at, n, n_q, m_q, p, schema, None)?;
    Ok(SweepPoint {
        x,
        n_q,
        m_q,
        ln_candidates: point.ln_candidates,
        ln_match_probability: point.ln_match_probability,
        match_count: point.match_count,
        dag: point.dag,
    })
}

/// Valley and vanish detection on an assembled curve.
///
/// The valley is the minimum DAG over Normal-status points, reported only
/// when interior: both neighboring Normal points exist and are strictly
/// greater. Ties break toward smaller x (which then fails strictness, so a
/// plateau is not a valley). The vanish point is the smallest x with
/// BeyondVanish status.
pub fn find_critical_points(curve: &SweepCurve) -> CriticalPoints {
    critical_points_of(&curve.points)
}

/// Same detection on a bare point slice, for curves reloaded from storage.
pub fn critical_points_of(points: &[SweepPoint]) -> CriticalPoints {
    let normal: Vec<&SweepPoint> =
        points.iter().filter(|pt| pt.dag.status == DagStatus::Normal).collect();
    let valley = normal
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.dag.value.partial_cmp(&b.dag.value).unwrap().then(a.x.partial_cmp(&b.x).unwrap())
        })
        .and_then(|(i, pt)| {
            if i == 0 || i + 1 == normal.len() {
                return None;
            }
            let (prev, next) = (normal[i - 1], normal[i + 1]);
            if prev.dag.value > pt.dag.value && next.dag.value > pt.dag.value {
                Some(pt.x)
            } else {
                None
            }
        });
    let vanish =
        points.iter().find(|pt| pt.dag.status == DagStatus::BeyondVanish).map(|pt| pt.x);
    CriticalPoints { valley, vanish }
}
