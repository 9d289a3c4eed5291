//! Structural classification of `K - lambda K'`: Cantor set, L/R/M-Cantorval or
//! a finite union of intervals.

use std::fmt;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{default_budget, CantorPair, TwoMapCantorSet};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rational::{self, Rational};
use crate::renorm::{
    endpoint_interval_evidence, lemma1_check, AEvidence, AStatus, EvidenceOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    CantorSet,
    LCantorval,
    RCantorval,
    MCantorval,
    FiniteUnionIntervals,
    Unknown,
}

impl ClassLabel {
    /// The label of the reflected set `-A`.
    pub fn mirror(self) -> Self {
        match self {
            ClassLabel::LCantorval => ClassLabel::RCantorval,
            ClassLabel::RCantorval => ClassLabel::LCantorval,
            other => other,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ClassLabel::CantorSet => "CantorSet",
            ClassLabel::LCantorval => "LCantorval",
            ClassLabel::RCantorval => "RCantorval",
            ClassLabel::MCantorval => "MCantorval",
            ClassLabel::FiniteUnionIntervals => "FiniteUnionIntervals",
            ClassLabel::Unknown => "Unknown",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Certainty {
    Proven,
    Empirical,
}

impl fmt::Display for Certainty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certainty::Proven => "Proven",
            Certainty::Empirical => "Empirical",
        })
    }
}

/// What the sampled gaps say about one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideEvidence {
    /// An interval sits next to the gap.
    Adjacent,
    /// The gap is approached by further gaps.
    Accumulated,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionTable {
    pub hd_sum: f64,
    /// `tau_R(K) tau_L(K')`.
    #[serde(with = "rational::as_str")]
    pub tau_rl: Rational,
    /// `tau_L(K) tau_R(K')`.
    #[serde(with = "rational::as_str")]
    pub tau_lr: Rational,
    pub lemma1: bool,
    /// Is `a` the right end of an interval of `K - K'`?
    pub a_evidence: AStatus,
    /// The same question for `(K', K)`.
    pub a_evidence_swapped: AStatus,
}

impl ConditionTable {
    pub fn both_thick(&self) -> bool {
        self.tau_rl >= Rational::one() && self.tau_lr >= Rational::one()
    }

    pub fn both_thin(&self) -> bool {
        self.tau_rl <= Rational::one() && self.tau_lr <= Rational::one()
    }
}

/// Windows `[a - delta, a]` probed for the endpoint evidence, as fractions of `a`.
fn evidence_deltas(a: &Rational) -> Vec<Rational> {
    [8, 64, 512].iter().map(|&d| a / rational::int(d)).collect()
}

fn scaled_pair(pair: &CantorPair, lambda: &Rational) -> Result<CantorPair> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    let kp = TwoMapCantorSet::new(
        pair.kp.p0().clone(),
        pair.kp.p1().clone(),
        pair.b() * lambda,
    )?;
    Ok(CantorPair::new(pair.k.clone(), kp))
}

fn conditions_with_evidence(
    pair: &CantorPair,
    options: &EvidenceOptions,
) -> Result<(ConditionTable, AEvidence, AEvidence)> {
    let one = Rational::one();
    let swapped = pair.swapped();
    let left = endpoint_interval_evidence(pair, &one, &evidence_deltas(pair.a()), options)?;
    let right = endpoint_interval_evidence(&swapped, &one, &evidence_deltas(swapped.a()), options)?;
    let (tau_rl, tau_lr) = pair.thickness_products();
    let table = ConditionTable {
        hd_sum: pair.hd_sum(),
        tau_rl,
        tau_lr,
        lemma1: lemma1_check(pair).holds,
        a_evidence: left.status,
        a_evidence_swapped: right.status,
    };
    Ok((table, left, right))
}

/// Thickness products and endpoint evidence that decide the structure of `K - K'`.
pub fn theorem2_conditions(pair: &CantorPair) -> Result<ConditionTable> {
    Ok(conditions_with_evidence(pair, &EvidenceOptions::default())?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Coverings at this depth and the next are compared.
    pub depth: usize,
    /// Number of largest gaps inspected (ties with the last one are included).
    pub gap_samples: usize,
    /// A component is persistent when one refinement keeps more than this
    /// fraction of its length. Defaults to halfway between the largest
    /// contraction ratio and 1.
    pub persistence: Option<f64>,
    pub budget: usize,
    pub evidence: EvidenceOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            depth: 8,
            gap_samples: 32,
            persistence: None,
            budget: default_budget(),
            evidence: EvidenceOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub depth: usize,
    pub components: Option<usize>,
    pub persistent_components: Option<usize>,
    pub n_gaps: Option<usize>,
    #[serde(with = "rational::opt_as_str")]
    pub largest_gap: Option<Rational>,
    pub sampled_gaps: usize,
    pub left_side: SideEvidence,
    pub right_side: SideEvidence,
    pub persistence_threshold: f64,
    pub notes: Vec<String>,
    pub evidence: Vec<AEvidence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureClass {
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    pub class: ClassLabel,
    pub certainty: Certainty,
    pub conditions: ConditionTable,
    pub diagnostics: Diagnostics,
}

struct CoverStats {
    components: usize,
    persistent: Vec<bool>,
    cover: IntervalSet,
}

fn difference_cover(pair: &CantorPair, depth: usize, budget: usize) -> Result<IntervalSet> {
    let left = pair.k.to_ifs().level_set(depth, budget)?;
    let right = pair.kp.to_ifs().level_set(depth, budget)?;
    let required = left.len() as u128 * right.len() as u128;
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    left.minkowski_diff(&right)
}

fn persistence(
    pair: &CantorPair,
    depth: usize,
    threshold: f64,
    budget: usize,
) -> Result<CoverStats> {
    let coarse = difference_cover(pair, depth, budget)?;
    let fine = difference_cover(pair, depth + 1, budget)?;
    let persistent = fine
        .intervals()
        .iter()
        .map(|c| {
            let parent = coarse
                .component_containing(&c.lo)
                .expect("finer cover lies inside the coarser one");
            rational::to_f64(&(c.length() / parent.length())) > threshold
        })
        .collect();
    Ok(CoverStats {
        components: fine.len(),
        persistent,
        cover: fine,
    })
}

/// Indices of the largest gaps, keeping every gap tied with the last one selected.
fn largest_gaps(gaps: &[Interval], samples: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|&x, &y| gaps[y].length().cmp(&gaps[x].length()).then(x.cmp(&y)));
    if order.len() > samples && samples > 0 {
        let cutoff = gaps[order[samples - 1]].length();
        order.retain(|&i| gaps[i].length() >= cutoff);
    } else if samples == 0 {
        order.clear();
    }
    order.sort_unstable();
    order
}

fn side_from(evidence: AStatus, persistent_hits: usize, sampled: usize) -> SideEvidence {
    match evidence {
        AStatus::YesCertified => SideEvidence::Adjacent,
        AStatus::NoCertified => SideEvidence::Accumulated,
        AStatus::Unknown if sampled == 0 => SideEvidence::Undetermined,
        AStatus::Unknown if persistent_hits == sampled => SideEvidence::Adjacent,
        AStatus::Unknown => SideEvidence::Accumulated,
    }
}

/// Classifies `K - lambda K'`.
pub fn classify_pair(
    pair: &CantorPair,
    lambda: &Rational,
    options: &ClassifyOptions,
) -> Result<StructureClass> {
    let scaled = scaled_pair(pair, lambda)?;
    let (conditions, left_ev, right_ev) = conditions_with_evidence(&scaled, &options.evidence)?;
    let max_ratio = [pair.k.p0(), pair.k.p1(), pair.kp.p0(), pair.kp.p1()]
        .into_iter()
        .map(|p| 1.0 / rational::to_f64(p))
        .fold(0.0, f64::max);
    let threshold = options.persistence.unwrap_or((1.0 + max_ratio) / 2.0);
    let mut diag = Diagnostics {
        depth: options.depth,
        components: None,
        persistent_components: None,
        n_gaps: None,
        largest_gap: None,
        sampled_gaps: 0,
        left_side: SideEvidence::Undetermined,
        right_side: SideEvidence::Undetermined,
        persistence_threshold: threshold,
        notes: Vec::new(),
        evidence: vec![left_ev, right_ev],
    };

    let stats = match persistence(&scaled, options.depth, threshold, options.budget) {
        Ok(s) => Some(s),
        Err(Error::BudgetExceeded { required, budget }) => {
            diag.notes.push(format!(
                "covering needs {required} intervals, budget {budget}"
            ));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(s) = &stats {
        let gaps = s.cover.gaps();
        diag.components = Some(s.components);
        diag.persistent_components = Some(s.persistent.iter().filter(|&&p| p).count());
        diag.largest_gap = gaps.iter().map(|g| g.length()).max();
        diag.n_gaps = Some(gaps.len());
    }

    let finish = |class, certainty, diag| StructureClass {
        lambda: lambda.clone(),
        class,
        certainty,
        conditions: conditions.clone(),
        diagnostics: diag,
    };

    if conditions.both_thick() {
        diag.notes
            .push("both thickness products are at least 1".into());
        return Ok(finish(
            ClassLabel::FiniteUnionIntervals,
            Certainty::Proven,
            diag,
        ));
    }
    if conditions.hd_sum < 1.0 {
        diag.notes.push("dimension sum below 1".into());
        return Ok(finish(ClassLabel::CantorSet, Certainty::Proven, diag));
    }
    let Some(stats) = stats else {
        return Ok(finish(ClassLabel::Unknown, Certainty::Empirical, diag));
    };

    let gaps = stats.cover.gaps();
    let sampled = largest_gaps(&gaps, options.gap_samples);
    diag.sampled_gaps = sampled.len();
    // Gap g sits between components g and g + 1.
    let left_hits = sampled.iter().filter(|&&g| stats.persistent[g]).count();
    let right_hits = sampled.iter().filter(|&&g| stats.persistent[g + 1]).count();
    diag.left_side = side_from(conditions.a_evidence, left_hits, sampled.len());
    diag.right_side = side_from(conditions.a_evidence_swapped, right_hits, sampled.len());
    let any_persistent = stats.persistent.iter().any(|&p| p);

    use SideEvidence::*;
    let class = if !any_persistent {
        ClassLabel::CantorSet
    } else if conditions.both_thin() {
        if diag.left_side == Adjacent || diag.right_side == Adjacent {
            diag.notes.push(format!(
                "side evidence ({:?}, {:?}) overridden: both thickness products are at most 1",
                diag.left_side, diag.right_side
            ));
        }
        ClassLabel::MCantorval
    } else {
        match (diag.left_side, diag.right_side) {
            (Adjacent, Adjacent) => {
                diag.notes.push(
                    "intervals on both sides of every sampled gap, but a thickness product is below 1"
                        .into(),
                );
                ClassLabel::Unknown
            }
            (Accumulated, Adjacent) => ClassLabel::LCantorval,
            (Adjacent, Accumulated) => ClassLabel::RCantorval,
            (Accumulated, Accumulated) => ClassLabel::MCantorval,
            _ => ClassLabel::Unknown,
        }
    };
    Ok(finish(class, Certainty::Empirical, diag))
}

/// One classified row per grid value, in grid order; `jobs` caps the worker count.
pub fn lambda_sweep(
    pair: &CantorPair,
    grid: &[Rational],
    options: &ClassifyOptions,
    jobs: Option<usize>,
) -> Result<Vec<StructureClass>> {
    let run = || -> Result<Vec<StructureClass>> {
        grid.par_iter()
            .map(|lambda| classify_pair(pair, lambda, options))
            .collect()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Closed boxes for the six parameters `(p0, p1, a, q0, q1, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleBounds {
    pub p0: Interval,
    pub p1: Interval,
    pub a: Interval,
    pub q0: Interval,
    pub q1: Interval,
    pub b: Interval,
}

impl SampleBounds {
    /// Same box for every expansion rate, hull lengths fixed.
    pub fn uniform(p: Interval, a: Rational, b: Rational) -> Self {
        SampleBounds {
            p0: p.clone(),
            p1: p.clone(),
            a: Interval::point(a),
            q0: p.clone(),
            q1: p,
            b: Interval::point(b),
        }
    }
}

pub const SAMPLE_DENOMINATOR_BITS: u32 = 16;

/// Grid points `n / 2^16` inside `i`, as an inclusive numerator range.
fn grid_range(i: &Interval) -> Option<(i64, i64)> {
    let den = rational::int(1 << SAMPLE_DENOMINATOR_BITS);
    let lo = -rational::floor_int(&-(&i.lo * &den));
    let hi = rational::floor_int(&(&i.hi * &den));
    let lo: i64 = lo.try_into().ok()?;
    let hi: i64 = hi.try_into().ok()?;
    (lo <= hi).then_some((lo, hi))
}

fn grid_value(n: i64) -> Rational {
    rational::ratio(n, 1 << SAMPLE_DENOMINATOR_BITS)
}

/// Uniform dyadic samples from the box, rejected until both sets satisfy the gap condition.
pub fn sample_space(count: usize, bounds: &SampleBounds, seed: u64) -> Result<Vec<CantorPair>> {
    let ranges = [
        &bounds.p0, &bounds.p1, &bounds.a, &bounds.q0, &bounds.q1, &bounds.b,
    ]
    .map(grid_range);
    let ranges: Vec<(i64, i64)> = ranges
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Config("a sampling range contains no grid point".into()))?;
    // The largest grid rates and lengths are the most favourable to the gap condition.
    let best = |i: usize, j: usize, h: usize| {
        TwoMapCantorSet::new(
            grid_value(ranges[i].1),
            grid_value(ranges[j].1),
            grid_value(ranges[h].1),
        )
    };
    if best(0, 1, 2).is_err() || best(3, 4, 5).is_err() {
        return Err(Error::Config(
            "empty feasible region: no expansion rates in the bounds leave a gap".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let max_attempts = 1000 * (count as u64 + 1);
    let mut attempts = 0u64;
    while out.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Config(format!(
                "rejection sampling accepted {} of {count} pairs in {max_attempts} draws",
                out.len()
            )));
        }
        let v: Vec<Rational> = ranges
            .iter()
            .map(|&(lo, hi)| grid_value(rng.gen_range(lo..=hi)))
            .collect();
        let (Ok(k), Ok(kp)) = (
            TwoMapCantorSet::new(v[0].clone(), v[1].clone(), v[2].clone()),
            TwoMapCantorSet::new(v[3].clone(), v[4].clone(), v[5].clone()),
        ) else {
            continue;
        };
        out.push(CantorPair::new(k, kp));
    }
    Ok(out)
}
