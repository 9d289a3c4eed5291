use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest trial divisor used when factoring ratio numerators and denominators.
pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// `r_i = gamma^{m_i}` and `r'_j = gamma^{n_j}` with `gcd(m, n) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaDecomposition {
    #[serde(with = "rational::as_str")]
    pub gamma: Rational,
    pub m: Vec<u64>,
    pub n: Vec<u64>,
}

impl GammaDecomposition {
    pub fn lcm_m(&self) -> u64 {
        self.m.iter().fold(1, |acc, x| acc.lcm(x))
    }

    pub fn lcm_n(&self) -> u64 {
        self.n.iter().fold(1, |acc, x| acc.lcm(x))
    }

    /// Product of the two least common multiples.
    pub fn mn(&self) -> u64 {
        self.lcm_m() * self.lcm_n()
    }

    pub fn m_star(&self) -> u64 {
        *self.m.iter().max().unwrap()
    }

    pub fn n_star(&self) -> u64 {
        *self.n.iter().max().unwrap()
    }

    pub fn gamma_pow(&self, e: i64) -> Rational {
        rational::pow(&self.gamma, e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaOutcome {
    Decomposed(GammaDecomposition),
    /// `log r_i / log r'_j` is irrational for this (0-based) pair.
    Independent {
        i: usize,
        j: usize,
    },
    /// Some numerator or denominator could not be factored under the bound.
    Undecided {
        value: BigInt,
    },
}

type Exponents = BTreeMap<BigInt, i64>;

fn factor(n: &BigInt, bound: u64) -> Option<BTreeMap<BigInt, i64>> {
    let mut out = BTreeMap::new();
    let mut rest = n.abs();
    let mut d = BigInt::from(2u32);
    let mut d_small = 2u64;
    while d_small <= bound && &d * &d <= rest {
        while (&rest % &d).is_zero() {
            rest /= &d;
            *out.entry(d.clone()).or_insert(0) += 1;
        }
        d_small += if d_small == 2 { 1 } else { 2 };
        d = BigInt::from(d_small);
    }
    if rest > BigInt::one() {
        if &d * &d <= rest {
            return None;
        }
        *out.entry(rest).or_insert(0) += 1;
    }
    Some(out)
}

fn exponents(r: &Rational, bound: u64) -> std::result::Result<Exponents, BigInt> {
    let num = factor(r.numer(), bound).ok_or_else(|| r.numer().clone())?;
    let den = factor(r.denom(), bound).ok_or_else(|| r.denom().clone())?;
    let mut out = num;
    for (p, e) in den {
        *out.entry(p).or_insert(0) -= e;
    }
    Ok(out)
}

/// Positive integer `c` with `v = c * w`, if any.
fn multiple_of(v: &Exponents, w: &Exponents) -> Option<u64> {
    if v.len() != w.len() || v.keys().ne(w.keys()) {
        return None;
    }
    let (p, wp) = w.iter().next()?;
    let vp = v[p];
    if vp % wp != 0 {
        return None;
    }
    let c = vp / wp;
    if c <= 0 || w.iter().any(|(q, wq)| v[q] != c * wq) {
        return None;
    }
    Some(c as u64)
}

/// Decides whether all ratios are integer powers of one rational `gamma`.
pub fn gamma_decomposition(
    ratios_k: &[Rational],
    ratios_kp: &[Rational],
    prime_bound: u64,
) -> Result<GammaOutcome> {
    if ratios_k.is_empty() || ratios_kp.is_empty() {
        return Err(Error::Precondition(
            "both ratio lists must be nonempty".into(),
        ));
    }
    for r in ratios_k.iter().chain(ratios_kp) {
        if !r.is_positive() || r >= &Rational::one() {
            return Err(Error::Precondition("ratios must lie in (0, 1)".into()));
        }
    }
    let collect = |rs: &[Rational]| -> std::result::Result<Vec<Exponents>, BigInt> {
        rs.iter().map(|r| exponents(r, prime_bound)).collect()
    };
    let (vk, vkp) = match (collect(ratios_k), collect(ratios_kp)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(value), _) | (_, Err(value)) => return Ok(GammaOutcome::Undecided { value }),
    };
    let g = vk[0].values().fold(0i64, |acc, e| acc.gcd(e));
    let base: Exponents = vk[0].iter().map(|(p, e)| (p.clone(), e / g)).collect();
    let mut m = Vec::with_capacity(vk.len());
    let mut n = Vec::with_capacity(vkp.len());
    for v in &vk {
        match multiple_of(v, &base) {
            Some(c) => m.push(c),
            None => {
                let (i, j) = first_independent_cross(&vk, &vkp);
                return Ok(GammaOutcome::Independent { i, j });
            }
        }
    }
    for v in &vkp {
        match multiple_of(v, &base) {
            Some(c) => n.push(c),
            None => {
                let (i, j) = first_independent_cross(&vk, &vkp);
                return Ok(GammaOutcome::Independent { i, j });
            }
        }
    }
    let common = m.iter().chain(n.iter()).fold(0u64, |acc, x| acc.gcd(x));
    let gamma_base: Rational = base.iter().fold(Rational::one(), |acc, (p, e)| {
        acc * rational::pow(&Rational::from_integer(p.clone()), *e)
    });
    Ok(GammaOutcome::Decomposed(GammaDecomposition {
        gamma: rational::pow(&gamma_base, common as i64),
        m: m.iter().map(|x| x / common).collect(),
        n: n.iter().map(|x| x / common).collect(),
    }))
}

fn parallel(u: &Exponents, v: &Exponents) -> bool {
    if u.len() != v.len() || u.keys().ne(v.keys()) {
        return false;
    }
    let (p, up) = u.iter().next().unwrap();
    let vp = v[p];
    u.iter().all(|(q, uq)| uq * vp == v[q] * up)
}

fn first_independent_cross(vk: &[Exponents], vkp: &[Exponents]) -> (usize, usize) {
    for (i, u) in vk.iter().enumerate() {
        for (j, v) in vkp.iter().enumerate() {
            if !parallel(u, v) {
                return (i, j);
            }
        }
    }
    unreachable!("some cross pair is independent when the ratios are not all powers of one base")
}

/// Nonnegative `mbar`, `nbar` with `sum mbar_i m_i - sum nbar_j n_j = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DioSolution {
    pub mbar: Vec<u64>,
    pub nbar: Vec<u64>,
}

impl DioSolution {
    pub fn satisfies(&self, m: &[u64], n: &[u64]) -> bool {
        let lhs: i128 = self
            .mbar
            .iter()
            .zip(m)
            .map(|(x, y)| *x as i128 * *y as i128)
            .sum();
        let rhs: i128 = self
            .nbar
            .iter()
            .zip(n)
            .map(|(x, y)| *x as i128 * *y as i128)
            .sum();
        self.mbar.len() == m.len() && self.nbar.len() == n.len() && lhs - rhs == 1
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Integer solution of the Diophantine equation made nonnegative by trading
/// multiples of `n_1` (resp. `m_1`) between coordinates.
pub fn nonneg_diophantine(m: &[u64], n: &[u64]) -> Result<DioSolution> {
    if m.is_empty() || n.is_empty() || m.iter().chain(n).any(|&x| x == 0) {
        return Err(Error::Precondition(
            "exponent lists must be nonempty and positive".into(),
        ));
    }
    let all: Vec<i128> = m.iter().chain(n).map(|&x| x as i128).collect();
    let mut g = all[0];
    let mut coeff = vec![0i128; all.len()];
    coeff[0] = 1;
    for (k, &c) in all.iter().enumerate().skip(1) {
        let (g2, x, y) = ext_gcd(g, c);
        for slot in coeff.iter_mut().take(k) {
            *slot *= x;
        }
        coeff[k] = y;
        g = g2;
    }
    if g != 1 {
        return Err(Error::NoSolution(g as u64));
    }
    let split = m.len();
    let mut mt: Vec<i128> = coeff[..split].to_vec();
    let mut nt: Vec<i128> = coeff[split..].iter().map(|c| -c).collect();
    let (m1, n1) = (m[0] as i128, n[0] as i128);
    for i in 0..mt.len() {
        if mt[i] < 0 {
            let x = (-mt[i] + n1 - 1) / n1;
            let k = x * n1 + mt[i];
            mt[i] = k;
            nt[0] += x * m[i] as i128;
        }
    }
    for j in 0..nt.len() {
        if nt[j] < 0 {
            let y = (-nt[j] + m1 - 1) / m1;
            let l = y * m1 + nt[j];
            nt[j] = l;
            mt[0] += y * n[j] as i128;
        }
    }
    let to_u64 =
        |v: Vec<i128>| -> Vec<u64> { v.into_iter().map(|x| x.to_u64().unwrap()).collect() };
    let solution = DioSolution {
        mbar: to_u64(mt),
        nbar: to_u64(nt),
    };
    debug_assert!(solution.satisfies(m, n));
    Ok(solution)
}
