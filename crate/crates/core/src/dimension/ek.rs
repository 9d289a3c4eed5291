//! Matched-scale cylinder pairs `E_k` and the scaling map `F` built from them.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::gamma::{nonneg_diophantine, GammaDecomposition};
use crate::cantor::AffineIfs;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};

/// One `I x J` pair of `E_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkEntry {
    pub k: usize,
    pub word_i: Vec<u8>,
    pub word_j: Vec<u8>,
    /// Letter counts of `word_i` (the exponents `M_{i,k}`).
    pub exps_i: Vec<u32>,
    /// Letter counts of `word_j` (the exponents `N_{j,k}`).
    pub exps_j: Vec<u32>,
    pub i: Interval,
    pub j: Interval,
}

impl EkEntry {
    /// `{x - y : x in I, y in J}`.
    pub fn projection(&self) -> Interval {
        Interval {
            lo: &self.i.lo - &self.j.hi,
            hi: &self.i.hi - &self.j.lo,
        }
    }

    pub fn contains_point(&self, t: &Rational) -> bool {
        self.projection().contains(t)
    }

    /// `I x J` contains `other`'s rectangle.
    pub fn contains_entry(&self, other: &EkEntry) -> bool {
        self.i.contains_interval(&other.i) && self.j.contains_interval(&other.j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EkResult {
    pub k: usize,
    pub entries: Vec<EkEntry>,
    /// Set when the result is empty.
    pub diagnostic: Option<String>,
}

/// Enumerates `E_k` for a pair of constructions whose ratios are powers of one `gamma`.
#[derive(Clone, Debug)]
pub struct EkEnumerator<'a> {
    k_ifs: &'a AffineIfs,
    kp_ifs: &'a AffineIfs,
    decomp: &'a GammaDecomposition,
}

fn weighted_sum(exps: &[u64], counts: &[u32]) -> u64 {
    exps.iter().zip(counts).map(|(e, c)| e * *c as u64).sum()
}

fn letter_counts(word: &[u8], arity: usize) -> Vec<u32> {
    let mut counts = vec![0u32; arity];
    for &l in word {
        counts[l as usize] += 1;
    }
    counts
}

fn multinomial(counts: &[u32]) -> BigUint {
    let mut out = BigUint::one();
    let mut total = 0u64;
    for &c in counts {
        for i in 1..=c as u64 {
            total += 1;
            out = out * BigUint::from(total) / BigUint::from(i);
        }
    }
    out
}

/// Exponent vectors `c >= 0` with `lo <= sum e_i c_i <= hi`.
fn exponent_vectors(exps: &[u64], lo: u64, hi: u64) -> Vec<Vec<u32>> {
    fn go(
        exps: &[u64],
        idx: usize,
        sum: u64,
        lo: u64,
        hi: u64,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if idx == exps.len() {
            if sum >= lo {
                out.push(cur.clone());
            }
            return;
        }
        let mut c = 0u32;
        let mut s = sum;
        while s <= hi {
            cur.push(c);
            go(exps, idx + 1, s, lo, hi, cur, out);
            cur.pop();
            c += 1;
            s += exps[idx];
        }
    }
    let mut out = Vec::new();
    go(exps, 0, 0, lo, hi, &mut Vec::new(), &mut out);
    out
}

/// All words with the given letter counts, in lexicographic order.
fn multiset_words(counts: &[u32]) -> Vec<Vec<u8>> {
    fn go(counts: &mut [u32], remaining: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for l in 0..counts.len() {
            if counts[l] > 0 {
                counts[l] -= 1;
                cur.push(l as u8);
                go(counts, remaining - 1, cur, out);
                cur.pop();
                counts[l] += 1;
            }
        }
    }
    let mut counts = counts.to_vec();
    let total = counts.iter().sum();
    let mut out = Vec::new();
    go(&mut counts, total, &mut Vec::new(), &mut out);
    out
}

/// Words with `lo <= sum <= hi` whose cylinders meet `target`, in lexicographic order.
fn words_meeting(
    ifs: &AffineIfs,
    exps: &[u64],
    lo: u64,
    hi: u64,
    target: &Interval,
    budget: usize,
) -> Result<Vec<(Vec<u8>, Interval)>> {
    let min_exp = *exps.iter().min().unwrap();
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<u8>::new(), 0u64, ifs.hull().clone())];
    while let Some((word, sum, interval)) = stack.pop() {
        if !interval.intersects(target) {
            continue;
        }
        if sum >= lo {
            out.push((word.clone(), interval.clone()));
            if out.len() > budget {
                return Err(Error::BudgetExceeded {
                    required: out.len() as u128 + stack.len() as u128,
                    budget,
                });
            }
        }
        if sum + min_exp <= hi {
            for letter in (0..ifs.arity()).rev() {
                let next = sum + exps[letter];
                if next > hi {
                    continue;
                }
                let mut w = word.clone();
                w.push(letter as u8);
                let child = ifs.cylinder(&w);
                stack.push((w, next, child));
            }
        }
    }
    Ok(out)
}

impl<'a> EkEnumerator<'a> {
    pub fn new(
        k_ifs: &'a AffineIfs,
        kp_ifs: &'a AffineIfs,
        decomp: &'a GammaDecomposition,
    ) -> Result<Self> {
        let matches = |ifs: &AffineIfs, exps: &[u64]| {
            ifs.arity() == exps.len()
                && ifs
                    .ratios()
                    .iter()
                    .zip(exps)
                    .all(|(r, e)| *r == decomp.gamma_pow(*e as i64))
        };
        if !matches(k_ifs, &decomp.m) || !matches(kp_ifs, &decomp.n) {
            return Err(Error::Precondition(
                "decomposition exponents do not reproduce the map ratios".into(),
            ));
        }
        Ok(EkEnumerator {
            k_ifs,
            kp_ifs,
            decomp,
        })
    }

    pub fn decomposition(&self) -> &GammaDecomposition {
        self.decomp
    }

    /// Inclusive bounds on `sum m_i M_i` for the `I` side of `E_k`.
    pub fn i_window(&self, k: usize) -> (u64, u64) {
        let kmn = k as u64 * self.decomp.mn();
        (kmn + 1 - self.decomp.m_star(), kmn)
    }

    /// Inclusive bounds on `sum n_j N_j` for the `J` side of `E_k`.
    pub fn j_window(&self, k: usize) -> (u64, u64) {
        let kmn = k as u64 * self.decomp.mn();
        (kmn, kmn + self.decomp.n_star() - 1)
    }

    fn side_words(
        &self,
        ifs: &AffineIfs,
        exps: &[u64],
        window: (u64, u64),
        budget: usize,
    ) -> Result<Vec<(Vec<u8>, Vec<u32>)>> {
        let vectors = exponent_vectors(exps, window.0, window.1);
        let total: BigUint = vectors.iter().map(|v| multinomial(v)).sum();
        if total > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                required: total.to_u128().unwrap_or(u128::MAX),
                budget,
            });
        }
        let mut words: Vec<(Vec<u8>, Vec<u32>)> = vectors
            .iter()
            .flat_map(|v| multiset_words(v).into_iter().map(move |w| (w, v.clone())))
            .collect();
        debug_assert!(words
            .iter()
            .all(|(w, c)| letter_counts(w, ifs.arity()) == *c));
        words.sort();
        Ok(words)
    }

    pub fn i_words(&self, k: usize, budget: usize) -> Result<Vec<(Vec<u8>, Vec<u32>)>> {
        self.side_words(self.k_ifs, &self.decomp.m, self.i_window(k), budget)
    }

    pub fn j_words(&self, k: usize, budget: usize) -> Result<Vec<(Vec<u8>, Vec<u32>)>> {
        self.side_words(self.kp_ifs, &self.decomp.n, self.j_window(k), budget)
    }

    /// Full `E_k`, ordered by `(word_i, word_j)`.
    pub fn enumerate(&self, k: usize, budget: usize) -> Result<EkResult> {
        if k == 0 {
            return Err(Error::Precondition("E_k is defined for k >= 1".into()));
        }
        let is = self.i_words(k, budget)?;
        let js = self.j_words(k, budget)?;
        let required = is.len() as u128 * js.len() as u128;
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let j_cyl: Vec<Interval> = js.iter().map(|(w, _)| self.kp_ifs.cylinder(w)).collect();
        let mut entries = Vec::with_capacity(required as usize);
        for (wi, ci) in &is {
            let i = self.k_ifs.cylinder(wi);
            for ((wj, cj), j) in js.iter().zip(&j_cyl) {
                entries.push(EkEntry {
                    k,
                    word_i: wi.clone(),
                    word_j: wj.clone(),
                    exps_i: ci.clone(),
                    exps_j: cj.clone(),
                    i: i.clone(),
                    j: j.clone(),
                });
            }
        }
        let diagnostic = entries.is_empty().then(|| {
            let (ilo, ihi) = self.i_window(k);
            let (jlo, jhi) = self.j_window(k);
            format!("no exponent vector in windows [{ilo}, {ihi}] x [{jlo}, {jhi}]")
        });
        Ok(EkResult {
            k,
            entries,
            diagnostic,
        })
    }

    /// Entries of `E_k` whose projection contains `t`, found by pruned descent.
    pub fn entries_containing(
        &self,
        k: usize,
        t: &Rational,
        budget: usize,
    ) -> Result<Vec<EkEntry>> {
        if k == 0 {
            return Err(Error::Precondition("E_k is defined for k >= 1".into()));
        }
        let hull_p = self.kp_ifs.hull();
        let i_target = Interval {
            lo: t + &hull_p.lo,
            hi: t + &hull_p.hi,
        };
        let (ilo, ihi) = self.i_window(k);
        let (jlo, jhi) = self.j_window(k);
        let is = words_meeting(self.k_ifs, &self.decomp.m, ilo, ihi, &i_target, budget)?;
        let mut out = Vec::new();
        for (wi, i) in is {
            let j_target = Interval {
                lo: &i.lo - t,
                hi: &i.hi - t,
            };
            for (wj, j) in words_meeting(self.kp_ifs, &self.decomp.n, jlo, jhi, &j_target, budget)?
            {
                out.push(EkEntry {
                    k,
                    exps_i: letter_counts(&wi, self.k_ifs.arity()),
                    exps_j: letter_counts(&wj, self.kp_ifs.arity()),
                    word_i: wi.clone(),
                    word_j: wj,
                    i: i.clone(),
                    j,
                });
                if out.len() > budget {
                    return Err(Error::BudgetExceeded {
                        required: out.len() as u128,
                        budget,
                    });
                }
            }
        }
        Ok(out)
    }

    /// `gamma^{m*+n*} < (|J|/b) / (|I|/a) <= 1`.
    pub fn ratio_bound_holds(&self, entry: &EkEntry) -> bool {
        let ratio = (entry.j.length() / self.kp_ifs.a()) / (entry.i.length() / self.k_ifs.a());
        let floor = self
            .decomp
            .gamma_pow((self.decomp.m_star() + self.decomp.n_star()) as i64);
        floor < ratio && ratio <= Rational::one()
    }

    /// Both exponent windows hold for the entry's letter counts.
    pub fn windows_hold(&self, entry: &EkEntry) -> bool {
        let si = weighted_sum(&self.decomp.m, &entry.exps_i);
        let sj = weighted_sum(&self.decomp.n, &entry.exps_j);
        let (ilo, ihi) = self.i_window(entry.k);
        let (jlo, jhi) = self.j_window(entry.k);
        (ilo..=ihi).contains(&si) && (jlo..=jhi).contains(&sj)
    }
}

/// `x -> scale * x + shift` mapping `K - K'` into `(t - R, t + R)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingWitness {
    /// The entry is taken from `E_{k+1}`.
    pub k: usize,
    pub l: u64,
    #[serde(with = "rational::as_str")]
    pub scale: Rational,
    #[serde(with = "rational::as_str")]
    pub shift: Rational,
    #[serde(rename = "A", with = "rational::as_str")]
    pub a_const: Rational,
    #[serde(with = "rational::as_str")]
    pub t: Rational,
    #[serde(rename = "R", with = "rational::as_str")]
    pub radius: Rational,
    pub entry: EkEntry,
    pub mbar: Vec<u64>,
    pub nbar: Vec<u64>,
    /// `word_i` followed by `l * mbar_i` copies of each letter `i`.
    pub sub_word_i: Vec<u8>,
    pub sub_word_j: Vec<u8>,
    #[serde(with = "rational::as_str")]
    pub c: Rational,
    #[serde(with = "rational::as_str")]
    pub c_prime: Rational,
    /// `scale > A * R`, checked exactly.
    pub expansion_ok: bool,
    /// `gamma = prod r_i^{mbar_i} / prod r'_j^{nbar_j}`, checked exactly.
    pub gamma_identity_ok: bool,
}

impl ScalingWitness {
    pub fn apply(&self, x: &Rational) -> Rational {
        &self.scale * x + &self.shift
    }

    pub fn maps_into_window(&self, x: &Rational) -> bool {
        let y = self.apply(x);
        y > &self.t - &self.radius && y < &self.t + &self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessOptions {
    /// Largest `k` tried (the entry comes from `E_{k+1}`).
    pub max_k: usize,
    pub budget: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            max_k: 8,
            budget: crate::cantor::default_budget(),
        }
    }
}

/// Finds the smallest `k` such that some `I x J` in `E_{k+1}` projects into
/// `(t - R, t + R)` around `t`, and builds the scaling map from it.
pub fn scaling_witness(
    k_ifs: &AffineIfs,
    kp_ifs: &AffineIfs,
    decomp: &GammaDecomposition,
    t: &Rational,
    radius: &Rational,
    options: WitnessOptions,
) -> Result<ScalingWitness> {
    let r0 = k_ifs.a() + kp_ifs.a();
    if !radius.is_positive() || radius >= &r0 {
        return Err(Error::Precondition(format!(
            "radius {radius} must lie in (0, {r0})"
        )));
    }
    let enumerator = EkEnumerator::new(k_ifs, kp_ifs, decomp)?;
    let dio = nonneg_diophantine(&decomp.m, &decomp.n)?;
    let lo = t - radius;
    let hi = t + radius;
    for k in 0..=options.max_k {
        let candidates = enumerator.entries_containing(k + 1, t, options.budget)?;
        if candidates.is_empty() {
            return Err(Error::Precondition(format!(
                "t = {t} lies in no entry of E_{}; it is not in the difference set",
                k + 1
            )));
        }
        let chosen = candidates
            .into_iter()
            .filter(|e| {
                let p = e.projection();
                p.lo > lo && p.hi < hi
            })
            .min_by(|x, y| (&x.word_i, &x.word_j).cmp(&(&y.word_i, &y.word_j)));
        if let Some(entry) = chosen {
            return build_witness(k_ifs, kp_ifs, decomp, &dio, k, entry, t, radius);
        }
    }
    Err(Error::Precondition(format!(
        "no entry of E_k fits the window for k <= {}",
        options.max_k + 1
    )))
}

#[allow(clippy::too_many_arguments)]
fn build_witness(
    k_ifs: &AffineIfs,
    kp_ifs: &AffineIfs,
    decomp: &GammaDecomposition,
    dio: &super::gamma::DioSolution,
    k: usize,
    entry: EkEntry,
    t: &Rational,
    radius: &Rational,
) -> Result<ScalingWitness> {
    let si = weighted_sum(&decomp.m, &entry.exps_i);
    let sj = weighted_sum(&decomp.n, &entry.exps_j);
    let l = sj
        .checked_sub(si)
        .ok_or_else(|| Error::Verification("J side finer than I side".into()))?;
    if l >= decomp.m_star() + decomp.n_star() {
        return Err(Error::Verification(format!("l = {l} outside [0, m*+n*)")));
    }
    let extend = |word: &[u8], bars: &[u64]| {
        let mut w = word.to_vec();
        for (letter, bar) in bars.iter().enumerate() {
            w.extend(std::iter::repeat_n(letter as u8, (l * bar) as usize));
        }
        w
    };
    let sub_word_i = extend(&entry.word_i, &dio.mbar);
    let sub_word_j = extend(&entry.word_j, &dio.nbar);
    let prod = |ifs: &AffineIfs, w: &[u8]| -> Rational {
        w.iter().fold(Rational::one(), |acc, &x| {
            acc * &ifs.maps()[x as usize].ratio
        })
    };
    let scale = prod(k_ifs, &sub_word_i);
    if scale != prod(kp_ifs, &sub_word_j) {
        return Err(Error::Verification("sub-cylinder ratios differ".into()));
    }
    let zero = Rational::zero();
    let c = k_ifs.apply_word(&sub_word_i, &zero);
    let c_prime = kp_ifs.apply_word(&sub_word_j, &zero);
    let sum_mbar_m: u64 = dio.mbar.iter().zip(&decomp.m).map(|(x, y)| x * y).sum();
    let exponent = decomp.mn() + decomp.m_star() + (decomp.m_star() + decomp.n_star()) * sum_mbar_m;
    let a_const = decomp.gamma_pow(exponent as i64) / (k_ifs.a() + kp_ifs.a());
    let expansion_ok = scale > &a_const * radius;
    let gamma_identity_ok = {
        let num = k_ifs
            .ratios()
            .iter()
            .zip(&dio.mbar)
            .fold(Rational::one(), |acc, (r, e)| {
                acc * rational::pow(r, *e as i64)
            });
        let den = kp_ifs
            .ratios()
            .iter()
            .zip(&dio.nbar)
            .fold(Rational::one(), |acc, (r, e)| {
                acc * rational::pow(r, *e as i64)
            });
        num / den == decomp.gamma
    };
    Ok(ScalingWitness {
        k,
        l,
        shift: &c - &c_prime,
        scale,
        a_const,
        t: t.clone(),
        radius: radius.clone(),
        entry,
        mbar: dio.mbar.clone(),
        nbar: dio.nbar.clone(),
        sub_word_i,
        sub_word_j,
        c,
        c_prime,
        expansion_ok,
        gamma_identity_ok,
    })
}
