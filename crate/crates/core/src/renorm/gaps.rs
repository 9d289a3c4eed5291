use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::CantorPair;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rational::{self, Rational};

use super::certificate::{Certificate, Verdict};
use super::ops::PlaneBox;
use super::search::{box_search_no, box_search_yes, DiffPairContext, SearchLimits};

/// `p1 = gamma^m` and `q0 = gamma^n` with `gcd(m, n) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTwoExponents {
    #[serde(with = "rational::as_str")]
    pub gamma: Rational,
    pub m: u64,
    pub n: u64,
}

impl LemmaTwoExponents {
    fn validate(&self, pair: &CantorPair) -> Result<()> {
        if self.gamma <= Rational::one() || self.m == 0 || self.n == 0 {
            return Err(Error::Precondition(
                "need gamma > 1 and positive exponents".into(),
            ));
        }
        if self.m.gcd(&self.n) != 1 {
            return Err(Error::NoSolution(self.m.gcd(&self.n)));
        }
        if rational::pow(&self.gamma, self.m as i64) != *pair.k.p1() {
            return Err(Error::Precondition(format!(
                "p1 = {} is not gamma^{}",
                pair.k.p1(),
                self.m
            )));
        }
        if rational::pow(&self.gamma, self.n as i64) != *pair.kp.p0() {
            return Err(Error::Precondition(format!(
                "q0 = {} is not gamma^{}",
                pair.kp.p0(),
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub k: u64,
    /// Exponent of `T_1^{-1}`.
    pub i: u64,
    /// Exponent of `T'_0^{-1}`.
    pub j: u64,
    pub gap: Interval,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapAccumulation {
    #[serde(with = "rational::as_str")]
    pub mu: Rational,
    /// `K` with `mu` in `gamma^K B_eps(lambda)`; equals `n j - m i` for the base exponents.
    pub shift: i64,
    pub i: u64,
    pub j: u64,
    /// Whether `U_{k=0..m+n} gamma^k B_eps(lambda)` covers `[lambda - eps, p1 q0 (lambda + eps)]`.
    pub covering_ok: bool,
    /// Distance to `a` shrinks by this factor from one gap to the next.
    #[serde(with = "rational::as_str")]
    pub ratio: Rational,
    pub base: Certificate,
    pub gaps: Vec<GapCertificate>,
}

fn centred(i: &Interval) -> (Rational, Rational) {
    let two = rational::int(2);
    ((&i.lo + &i.hi) / &two, (&i.hi - &i.lo) / &two)
}

/// Smallest `K` with `mu <= gamma^K (lambda + eps)`, provided `gamma^K (lambda - eps) <= mu`.
fn scale_exponent(gamma: &Rational, lo: &Rational, hi: &Rational, mu: &Rational) -> Option<i64> {
    let guess = (rational::ln(&(mu / hi)) / rational::ln(gamma)).ceil() as i64;
    let mut k = guess;
    while rational::pow(gamma, k) * hi < *mu {
        k += 1;
    }
    while rational::pow(gamma, k - 1) * hi >= *mu {
        k -= 1;
    }
    (rational::pow(gamma, k) * lo <= *mu).then_some(k)
}

/// Least `(i, j) >= 0` (by `j`) with `n j - m i = shift`.
fn solve_exponents(m: u64, n: u64, shift: i64) -> (u64, u64) {
    let (m, n) = (m as i128, n as i128);
    let shift = shift as i128;
    let mut j = 0i128;
    loop {
        let rem = n * j - shift;
        if rem >= 0 && rem % m == 0 {
            return ((rem / m) as u64, j as u64);
        }
        j += 1;
    }
}

/// Gaps of `K - mu K'` accumulating at `a`, obtained by pulling a certified
/// non-difference box back along `T_1^{-i} T'_0^{-j}`.
pub fn gap_accumulation_certificates(
    ctx: &DiffPairContext,
    exps: &LemmaTwoExponents,
    nondiff: &PlaneBox,
    mu: &Rational,
    count: u64,
) -> Result<GapAccumulation> {
    let pair = &ctx.pair;
    exps.validate(pair)?;
    if !mu.is_positive() {
        return Err(Error::Precondition("mu must be positive".into()));
    }
    let (lambda, eps) = centred(&nondiff.s);
    let (x, eps_t) = centred(&nondiff.t);
    if eps != eps_t || !eps.is_positive() {
        return Err(Error::Precondition(
            "box must be B_eps(lambda) x B_eps(x) with eps > 0".into(),
        ));
    }
    let (a, b, q1, p1) = (pair.a(), pair.b(), pair.kp.p1(), pair.k.p1());
    let line = a + &eps + (b - b * q1) / q1 * (&lambda - &eps);
    let floor = a - a / p1;
    let lower = std::cmp::max(line, floor);
    if !(lower < x && x < *a) {
        return Err(Error::Precondition(format!(
            "x window violated: need {lower} < x = {x} < {a}"
        )));
    }
    let base = box_search_no(ctx, nondiff);
    if base.verdict != Verdict::No {
        return Err(Error::Verification(format!(
            "box {nondiff} is not certified free of difference pairs"
        )));
    }

    let s_lo = &lambda - &eps;
    let s_hi = &lambda + &eps;
    let gamma = &exps.gamma;
    let covering_ok = gamma * &s_lo <= s_hi;
    let shift = if nondiff.s.contains(mu) {
        0
    } else {
        if !(gamma * &s_lo < s_hi) {
            return Err(Error::Precondition(format!(
                "gamma window violated: gamma = {gamma} >= (lambda + eps)/(lambda - eps) = {}",
                &s_hi / &s_lo
            )));
        }
        scale_exponent(gamma, &s_lo, &s_hi, mu).ok_or_else(|| {
            Error::Verification(format!("no power of gamma carries mu = {mu} into the box"))
        })?
    };
    let (i0, j0) = solve_exponents(exps.m, exps.n, shift);

    let mut gaps = Vec::with_capacity(count as usize);
    for k in 1..=count {
        let i = i0 + exps.n * k;
        let j = j0 + exps.m * k;
        let scale = rational::pow(p1, -(i as i64));
        let gap = Interval {
            lo: a - &scale * (a - &nondiff.t.lo),
            hi: a - &scale * (a - &nondiff.t.hi),
        };
        let segment = PlaneBox::segment(mu.clone(), gap.clone())?;
        let certificate = box_search_no(ctx, &segment);
        if certificate.verdict != Verdict::No {
            return Err(Error::Verification(format!(
                "gap {k} at {gap} could not be re-certified ({} nodes)",
                certificate.nodes
            )));
        }
        gaps.push(GapCertificate {
            k,
            i,
            j,
            gap,
            certificate,
        });
    }
    Ok(GapAccumulation {
        mu: mu.clone(),
        shift,
        i: i0,
        j: j0,
        covering_ok,
        ratio: rational::pow(p1, -(exps.n as i64)),
        base,
        gaps,
    })
}

/// Searches the gaps of the depth-`depth` covering of `K - lambda K'` inside
/// `window` for a point `x` such that `B_eps(lambda) x B_eps(x)` is certified
/// free of difference pairs. Larger gaps are tried first.
pub fn locate_nondifference_box(
    ctx: &DiffPairContext,
    lambda: &Rational,
    eps: &Rational,
    window: &Interval,
    depth: usize,
    budget: usize,
) -> Result<Option<(PlaneBox, Certificate)>> {
    let cover = difference_level_set(&ctx.pair, lambda, depth, budget)?;
    let mut gaps: Vec<Interval> = cover
        .gaps()
        .into_iter()
        .filter(|g| window.contains_interval(g))
        .collect();
    gaps.sort_by(|x, y| y.length().cmp(&x.length()).then_with(|| x.lo.cmp(&y.lo)));
    for g in gaps {
        let x = g.midpoint();
        let bx = PlaneBox::new(
            Interval::new(lambda - eps, lambda + eps)?,
            Interval::new(&x - eps, &x + eps)?,
        )?;
        let cert = box_search_no(ctx, &bx);
        if cert.verdict == Verdict::No {
            return Ok(Some((bx, cert)));
        }
    }
    Ok(None)
}

fn difference_level_set(
    pair: &CantorPair,
    lambda: &Rational,
    depth: usize,
    budget: usize,
) -> Result<IntervalSet> {
    let left = pair.k.to_ifs().level_set(depth, budget)?;
    let right = pair.kp.to_ifs().level_set(depth, budget)?;
    left.minkowski_diff(&right.affine_image(lambda, &Rational::zero())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AStatus {
    /// `[a - delta, a]` lies in `K - lambda K'` for some listed `delta`.
    YesCertified,
    /// Every listed window `(a - delta, a)` contains a certified gap.
    NoCertified,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceOptions {
    /// Deepest covering used when looking for gaps near `a`.
    pub max_depth: usize,
    pub budget: usize,
    pub limits: SearchLimits,
}

impl Default for EvidenceOptions {
    fn default() -> Self {
        EvidenceOptions {
            max_depth: 14,
            budget: crate::cantor::default_budget(),
            limits: SearchLimits {
                depth_cap: 64,
                node_budget: 1 << 16,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AEvidence {
    pub status: AStatus,
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    #[serde(with = "rational::vec_as_str")]
    pub deltas: Vec<Rational>,
    pub details: Vec<String>,
    pub certificates: Vec<Certificate>,
}

/// Evidence on whether `a` is the right end of an interval of `K - lambda K'`.
pub fn endpoint_interval_evidence(
    pair: &CantorPair,
    lambda: &Rational,
    deltas: &[Rational],
    options: &EvidenceOptions,
) -> Result<AEvidence> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    if deltas.iter().any(|d| !d.is_positive()) {
        return Err(Error::Precondition("deltas must be positive".into()));
    }
    let ctx = DiffPairContext::with_limits(pair, options.limits.clone());
    let a = pair.a();
    let mut evidence = AEvidence {
        status: AStatus::Unknown,
        lambda: lambda.clone(),
        deltas: deltas.to_vec(),
        details: Vec::new(),
        certificates: Vec::new(),
    };
    if deltas.is_empty() {
        evidence.details.push("no windows requested".into());
        return Ok(evidence);
    }

    if ctx.lemma1.holds {
        for delta in deltas {
            let lo = std::cmp::max(a - delta, -(pair.b() * lambda));
            let segment = PlaneBox::segment(lambda.clone(), Interval::new(lo, a.clone())?)?;
            let cert = box_search_yes(&ctx, &segment);
            if cert.verdict == Verdict::Yes {
                evidence.status = AStatus::YesCertified;
                evidence
                    .details
                    .push(format!("[a - {delta}, a] driven into R"));
                evidence.certificates.push(cert);
                return Ok(evidence);
            }
            evidence.details.push(format!(
                "delta {delta}: no word found ({} nodes)",
                cert.nodes
            ));
        }
    }

    let mut all_gapped = true;
    for delta in deltas {
        match certified_gap_near_end(&ctx, lambda, delta, options)? {
            Some((gap, cert)) => {
                evidence.details.push(format!("delta {delta}: gap {gap}"));
                evidence.certificates.push(cert);
            }
            None => {
                evidence.details.push(format!(
                    "delta {delta}: no certified gap up to depth {}",
                    options.max_depth
                ));
                all_gapped = false;
                break;
            }
        }
    }
    if all_gapped {
        evidence.status = AStatus::NoCertified;
    }
    Ok(evidence)
}

/// A gap of `K - lambda K'` inside `(a - delta, a)` with a No certificate for
/// the middle half of it.
fn certified_gap_near_end(
    ctx: &DiffPairContext,
    lambda: &Rational,
    delta: &Rational,
    options: &EvidenceOptions,
) -> Result<Option<(Interval, Certificate)>> {
    let pair = &ctx.pair;
    let a = pair.a();
    let floor = a - delta;
    let reach = delta / lambda;
    let k_ifs = pair.k.to_ifs();
    let kp_ifs = pair.kp.to_ifs();
    for depth in 1..=options.max_depth {
        // Only x near a and y near 0 contribute to (a - delta, a].
        let left = match k_ifs.level_intervals(depth, options.budget) {
            Ok(v) => IntervalSet::normalize(v.into_iter().filter(|i| i.hi >= floor)),
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        };
        let right = match kp_ifs.level_intervals(depth, options.budget) {
            Ok(v) => IntervalSet::normalize(v.into_iter().filter(|i| i.lo <= reach)),
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        };
        let required = left.len() as u128 * right.len() as u128;
        if required > options.budget as u128 {
            break;
        }
        let cover = left.minkowski_diff(&right.affine_image(lambda, &Rational::zero())?)?;
        let mut gaps: Vec<Interval> = cover.gaps().into_iter().filter(|g| g.lo > floor).collect();
        gaps.sort_by_key(|g| std::cmp::Reverse(g.length()));
        for gap in gaps {
            let quarter = gap.length() / rational::int(4);
            let core = Interval::new(&gap.lo + &quarter, &gap.hi - &quarter)?;
            let cert = box_search_no(ctx, &PlaneBox::segment(lambda.clone(), core)?);
            if cert.verdict == Verdict::No {
                return Ok(Some((gap, cert)));
            }
        }
    }
    Ok(None)
}
