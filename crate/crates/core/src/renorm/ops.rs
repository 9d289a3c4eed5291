use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::CantorPair;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanePoint {
    #[serde(with = "rational::as_str")]
    pub s: Rational,
    #[serde(with = "rational::as_str")]
    pub t: Rational,
}

impl PlanePoint {
    pub fn new(s: Rational, t: Rational) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::Precondition(format!("s = {s} must be positive")));
        }
        Ok(PlanePoint { s, t })
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.t)
    }
}

/// Axis-aligned rectangle `s x t` with `s.lo > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneBox {
    pub s: Interval,
    pub t: Interval,
}

impl PlaneBox {
    pub fn new(s: Interval, t: Interval) -> Result<Self> {
        if !s.lo.is_positive() {
            return Err(Error::Precondition(format!("s range {s} must be positive")));
        }
        Ok(PlaneBox { s, t })
    }

    /// `{s} x [t_lo, t_hi]`.
    pub fn segment(s: Rational, t: Interval) -> Result<Self> {
        PlaneBox::new(Interval::point(s), t)
    }

    pub fn from_point(p: &PlanePoint) -> Self {
        PlaneBox {
            s: Interval::point(p.s.clone()),
            t: Interval::point(p.t.clone()),
        }
    }

    pub fn contains_point(&self, p: &PlanePoint) -> bool {
        self.s.contains(&p.s) && self.t.contains(&p.t)
    }

    pub fn contains_box(&self, other: &PlaneBox) -> bool {
        self.s.contains_interval(&other.s) && self.t.contains_interval(&other.t)
    }

    fn corners(&self) -> [(Rational, Rational); 4] {
        [
            (self.s.lo.clone(), self.t.lo.clone()),
            (self.s.lo.clone(), self.t.hi.clone()),
            (self.s.hi.clone(), self.t.lo.clone()),
            (self.s.hi.clone(), self.t.hi.clone()),
        ]
    }
}

impl fmt::Display for PlaneBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.s, self.t)
    }
}

/// `T_0, T_1, T'_0, T'_1`, written `A, B, a, b` in words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    T0,
    T1,
    Tp0,
    Tp1,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::T0, Op::T1, Op::Tp0, Op::Tp1];

    pub fn symbol(self) -> char {
        match self {
            Op::T0 => 'A',
            Op::T1 => 'B',
            Op::Tp0 => 'a',
            Op::Tp1 => 'b',
        }
    }

    pub fn from_symbol(c: char) -> Option<Op> {
        match c {
            'A' => Some(Op::T0),
            'B' => Some(Op::T1),
            'a' => Some(Op::Tp0),
            'b' => Some(Op::Tp1),
            _ => None,
        }
    }

    pub fn is_primed(self) -> bool {
        matches!(self, Op::Tp0 | Op::Tp1)
    }
}

pub fn format_word(word: &[Op]) -> String {
    word.iter().map(|o| o.symbol()).collect()
}

pub fn parse_word(text: &str) -> Result<Vec<Op>> {
    text.chars()
        .map(|c| {
            Op::from_symbol(c)
                .ok_or_else(|| Error::Config(format!("unknown operator symbol {c:?} in {text:?}")))
        })
        .collect()
}

/// The four plane maps of a pair, with constants precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operators {
    pub p: [Rational; 2],
    pub e: [Rational; 2],
    pub q: [Rational; 2],
    pub f: [Rational; 2],
    pub a: Rational,
    pub b: Rational,
}

impl Operators {
    pub fn new(pair: &CantorPair) -> Self {
        Operators {
            p: [pair.k.p0().clone(), pair.k.p1().clone()],
            e: [pair.k.e(0), pair.k.e(1)],
            q: [pair.kp.p0().clone(), pair.kp.p1().clone()],
            f: [pair.f(0), pair.f(1)],
            a: pair.a().clone(),
            b: pair.b().clone(),
        }
    }

    /// `(p_i s, p_i t + e_i)`.
    pub fn apply_t(&self, i: usize, p: &PlanePoint) -> PlanePoint {
        PlanePoint {
            s: &self.p[i] * &p.s,
            t: &self.p[i] * &p.t + &self.e[i],
        }
    }

    /// `(s / q_j, t - f_j s / q_j)`.
    pub fn apply_tprime(&self, j: usize, p: &PlanePoint) -> PlanePoint {
        let s = &p.s / &self.q[j];
        PlanePoint {
            t: &p.t - &self.f[j] * &s,
            s,
        }
    }

    pub fn apply(&self, op: Op, p: &PlanePoint) -> PlanePoint {
        match op {
            Op::T0 => self.apply_t(0, p),
            Op::T1 => self.apply_t(1, p),
            Op::Tp0 => self.apply_tprime(0, p),
            Op::Tp1 => self.apply_tprime(1, p),
        }
    }

    pub fn apply_inverse(&self, op: Op, p: &PlanePoint) -> PlanePoint {
        match op {
            Op::T0 | Op::T1 => {
                let i = (op == Op::T1) as usize;
                PlanePoint {
                    s: &p.s / &self.p[i],
                    t: (&p.t - &self.e[i]) / &self.p[i],
                }
            }
            Op::Tp0 | Op::Tp1 => {
                let j = (op == Op::Tp1) as usize;
                PlanePoint {
                    t: &p.t + &self.f[j] * &p.s,
                    s: &p.s * &self.q[j],
                }
            }
        }
    }

    /// Orbit of `p` under `word`, starting with `p` itself.
    pub fn orbit(&self, word: &[Op], p: &PlanePoint) -> Vec<PlanePoint> {
        let mut out = Vec::with_capacity(word.len() + 1);
        out.push(p.clone());
        for &op in word {
            let next = self.apply(op, out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// Image of a box: exact for `T_i`, the bounding box of the sheared image for `T'_j`.
    pub fn apply_box(&self, op: Op, b: &PlaneBox) -> PlaneBox {
        match op {
            Op::T0 | Op::T1 => {
                let i = (op == Op::T1) as usize;
                let p = &self.p[i];
                PlaneBox {
                    s: Interval {
                        lo: p * &b.s.lo,
                        hi: p * &b.s.hi,
                    },
                    t: Interval {
                        lo: p * &b.t.lo + &self.e[i],
                        hi: p * &b.t.hi + &self.e[i],
                    },
                }
            }
            Op::Tp0 | Op::Tp1 => {
                let j = (op == Op::Tp1) as usize;
                let ts: Vec<Rational> = b
                    .corners()
                    .iter()
                    .map(|(s, t)| t - &self.f[j] * s / &self.q[j])
                    .collect();
                let lo = ts.iter().min().unwrap().clone();
                let hi = ts.iter().max().unwrap().clone();
                PlaneBox {
                    s: Interval {
                        lo: &b.s.lo / &self.q[j],
                        hi: &b.s.hi / &self.q[j],
                    },
                    t: Interval { lo, hi },
                }
            }
        }
    }

    /// `-b s <= t <= a`, the outer bound of `K - s K'`.
    pub fn in_bounds(&self, p: &PlanePoint) -> bool {
        p.t <= self.a && p.t >= -(&self.b * &p.s)
    }

    /// The whole box violates the outer bound.
    pub fn box_escapes(&self, b: &PlaneBox) -> bool {
        b.t.lo > self.a || b.t.hi < -(&self.b * &b.s.hi)
    }

    /// The whole box satisfies the outer bound.
    pub fn box_in_bounds(&self, b: &PlaneBox) -> bool {
        b.t.hi <= self.a && b.t.lo >= -(&self.b * &b.s.lo)
    }

    /// `t` coordinate where the line `L_1^c: t = ((b - b q1)/q1) s + c` meets `s`.
    pub fn line_l1(&self, c: &Rational, s: &Rational) -> Rational {
        (&self.b - &self.b * &self.q[1]) / &self.q[1] * s + c
    }

    /// `t` coordinate of `L_0^c: t = -(b/q0) s + c`.
    pub fn line_l0(&self, c: &Rational, s: &Rational) -> Rational {
        -(&self.b / &self.q[0]) * s + c
    }

    pub fn is_identity_free(&self) -> bool {
        !self.f[0].is_zero() || self.e[0].is_zero()
    }
}
