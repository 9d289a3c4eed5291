use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::cantor::CantorPair;
use crate::rational::Rational;

use super::certificate::{Certificate, Query, Terminal, Verdict};
use super::lemma1::{lemma1_check, Lemma1Check};
use super::ops::{Op, Operators, PlaneBox, PlanePoint};

pub const DEFAULT_DEPTH_CAP: usize = 64;
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub depth_cap: usize,
    pub node_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            depth_cap: DEFAULT_DEPTH_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

const PLAIN: [Op; 2] = [Op::T0, Op::T1];
const PRIMED: [Op; 2] = [Op::Tp0, Op::Tp1];

/// Everything a search needs about a pair, computed once.
#[derive(Clone, Debug)]
pub struct DiffPairContext {
    pub pair: CantorPair,
    pub ops: Operators,
    pub lemma1: Lemma1Check,
    /// `s1 / max(p0, p1)`: below this only `T_i` are applied.
    pub sigma_lo: Rational,
    /// `s0 max(q0, q1)`: above this only `T'_j` are applied.
    pub sigma_hi: Rational,
    pub limits: SearchLimits,
}

impl DiffPairContext {
    pub fn new(pair: &CantorPair) -> Self {
        Self::with_limits(pair, SearchLimits::default())
    }

    pub fn with_limits(pair: &CantorPair, limits: SearchLimits) -> Self {
        let lemma1 = lemma1_check(pair);
        let max_p = std::cmp::max(pair.k.p0(), pair.k.p1()).clone();
        let max_q = std::cmp::max(pair.kp.p0(), pair.kp.p1()).clone();
        DiffPairContext {
            sigma_lo: &lemma1.region.s1 / max_p,
            sigma_hi: &lemma1.region.s0 * max_q,
            ops: Operators::new(pair),
            pair: pair.clone(),
            lemma1,
            limits,
        }
    }

    fn families(&self, s_lo: &Rational, s_hi: &Rational) -> &'static [[Op; 2]] {
        if *s_lo > self.sigma_hi {
            &[PRIMED]
        } else if *s_hi < self.sigma_lo {
            &[PLAIN]
        } else {
            &[PLAIN, PRIMED]
        }
    }

    fn certificate(&self, query: Query, verdict: Verdict, terminal: Terminal) -> Certificate {
        Certificate {
            pair: self.pair.clone(),
            query,
            verdict,
            terminal,
            word: Vec::new(),
            cycle_start: None,
            escape_words: Vec::new(),
            nodes: 0,
        }
    }
}

/// Escape tree; shared subtrees come from the memo.
enum NoTree {
    Leaf,
    Split([Op; 2], [Rc<NoTree>; 2]),
}

impl NoTree {
    fn leaves(&self, prefix: &mut Vec<Op>, out: &mut Vec<Vec<Op>>) {
        match self {
            NoTree::Leaf => out.push(prefix.clone()),
            NoTree::Split(fam, kids) => {
                for (op, kid) in fam.iter().zip(kids) {
                    prefix.push(*op);
                    kid.leaves(prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    fn words(&self) -> Vec<Vec<Op>> {
        let mut out = Vec::new();
        self.leaves(&mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone)]
struct YesWitness {
    /// Word from this node, stored last-operator-first.
    rev_word: Vec<Op>,
    terminal: Terminal,
    /// Position of the repeated point relative to this node (negative: an ancestor).
    cycle: Option<isize>,
}

enum Outcome<Y> {
    Yes(Y),
    No(Rc<NoTree>),
    Unknown,
}

struct Tracker {
    nodes: u64,
    budget_hit: bool,
    path: Vec<Op>,
    deepest: Vec<Op>,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            nodes: 0,
            budget_hit: false,
            path: Vec::new(),
            deepest: Vec::new(),
        }
    }

    /// Counts a node; false once the budget is spent.
    fn tick(&mut self, budget: u64) -> bool {
        self.nodes += 1;
        if self.nodes > budget {
            self.budget_hit = true;
        }
        !self.budget_hit
    }

    fn note_depth(&mut self) {
        if self.path.len() > self.deepest.len() {
            self.deepest = self.path.clone();
        }
    }

    fn unknown_terminal(&self) -> Terminal {
        if self.budget_hit {
            Terminal::BudgetExhausted
        } else {
            Terminal::DepthExhausted
        }
    }
}

struct PointSearch<'c> {
    ctx: &'c DiffPairContext,
    on_path: HashMap<PlanePoint, usize>,
    no_memo: HashMap<PlanePoint, Rc<NoTree>>,
    yes_memo: HashMap<PlanePoint, YesWitness>,
    /// Largest remaining depth at which the point stayed undecided.
    unknown_memo: HashMap<PlanePoint, usize>,
    track: Tracker,
}

impl PointSearch<'_> {
    fn visit(&mut self, p: &PlanePoint, depth: usize) -> Outcome<YesWitness> {
        let ctx = self.ctx;
        if !self.track.tick(ctx.limits.node_budget) {
            return Outcome::Unknown;
        }
        if !ctx.ops.in_bounds(p) {
            return Outcome::No(Rc::new(NoTree::Leaf));
        }
        if ctx.lemma1.holds && ctx.lemma1.region.contains_point(p) {
            return Outcome::Yes(YesWitness {
                rev_word: Vec::new(),
                terminal: Terminal::RHit,
                cycle: None,
            });
        }
        if let Some(tree) = self.no_memo.get(p) {
            return Outcome::No(tree.clone());
        }
        if let Some(w) = self.yes_memo.get(p) {
            return Outcome::Yes(w.clone());
        }
        if let Some(&k) = self.on_path.get(p) {
            return Outcome::Yes(YesWitness {
                rev_word: Vec::new(),
                terminal: Terminal::Periodic,
                cycle: Some(k as isize - depth as isize),
            });
        }
        let remaining = ctx.limits.depth_cap - depth;
        if remaining == 0 {
            self.track.note_depth();
            return Outcome::Unknown;
        }
        if self.unknown_memo.get(p).is_some_and(|&r| r >= remaining) {
            return Outcome::Unknown;
        }

        self.on_path.insert(p.clone(), depth);
        let outcome = self.expand(p, depth);
        self.on_path.remove(p);

        match &outcome {
            Outcome::No(tree) => {
                self.no_memo.insert(p.clone(), tree.clone());
            }
            Outcome::Yes(w) if w.cycle.is_none_or(|c| c >= 0) => {
                self.yes_memo.insert(p.clone(), w.clone());
            }
            Outcome::Unknown if !self.track.budget_hit => {
                let e = self.unknown_memo.entry(p.clone()).or_insert(0);
                *e = (*e).max(remaining);
            }
            _ => {}
        }
        outcome
    }

    fn expand(&mut self, p: &PlanePoint, depth: usize) -> Outcome<YesWitness> {
        for fam in self.ctx.families(&p.s, &p.s) {
            let mut kids = Vec::with_capacity(2);
            for &op in fam {
                let child = self.ctx.ops.apply(op, p);
                self.track.path.push(op);
                let out = self.visit(&child, depth + 1);
                self.track.path.pop();
                match out {
                    Outcome::Yes(mut w) => {
                        w.rev_word.push(op);
                        w.cycle = w.cycle.map(|c| c + 1);
                        return Outcome::Yes(w);
                    }
                    Outcome::No(t) => kids.push(t),
                    Outcome::Unknown => {}
                }
            }
            if kids.len() == 2 {
                let t1 = kids.pop().unwrap();
                let t0 = kids.pop().unwrap();
                return Outcome::No(Rc::new(NoTree::Split(*fam, [t0, t1])));
            }
        }
        Outcome::Unknown
    }
}

/// Decides whether `t` lies in `K - s K'` by searching the operator orbits of `(s, t)`.
pub fn difference_pair_search(ctx: &DiffPairContext, p: &PlanePoint) -> Certificate {
    let mut search = PointSearch {
        ctx,
        on_path: HashMap::new(),
        no_memo: HashMap::new(),
        yes_memo: HashMap::new(),
        unknown_memo: HashMap::new(),
        track: Tracker::new(),
    };
    let outcome = search.visit(p, 0);
    let query = Query::Point(p.clone());
    let mut cert = match outcome {
        Outcome::Yes(w) => {
            let mut c = ctx.certificate(query, Verdict::Yes, w.terminal);
            c.word = w.rev_word.into_iter().rev().collect();
            c.cycle_start = w.cycle.map(|k| k as usize);
            c
        }
        Outcome::No(tree) => {
            let mut c = ctx.certificate(query, Verdict::No, Terminal::AllBranchesEscape);
            c.escape_words = tree.words();
            c
        }
        Outcome::Unknown => {
            let mut c = ctx.certificate(query, Verdict::Unknown, search.track.unknown_terminal());
            c.word = search.track.deepest.clone();
            c
        }
    };
    cert.nodes = search.track.nodes;
    cert
}

struct BoxSearch<'c> {
    ctx: &'c DiffPairContext,
    no_memo: HashMap<PlaneBox, Rc<NoTree>>,
    unknown_memo: HashMap<PlaneBox, usize>,
    track: Tracker,
}

impl BoxSearch<'_> {
    /// The box contains a point of the form `(s, a)` or `(s, -b s)`, both difference pairs.
    fn holds_difference_pair(&self, b: &PlaneBox) -> bool {
        let ops = &self.ctx.ops;
        let lower_lo = -(&ops.b * &b.s.hi);
        let lower_hi = -(&ops.b * &b.s.lo);
        b.t.contains(&ops.a) || (b.t.lo <= lower_hi && b.t.hi >= lower_lo)
    }

    fn visit(&mut self, b: &PlaneBox, depth: usize) -> Outcome<()> {
        let ctx = self.ctx;
        if !self.track.tick(ctx.limits.node_budget) {
            return Outcome::Unknown;
        }
        if ctx.ops.box_escapes(b) {
            return Outcome::No(Rc::new(NoTree::Leaf));
        }
        if (ctx.lemma1.holds && ctx.lemma1.region.intersects_box(b))
            || self.holds_difference_pair(b)
        {
            return Outcome::Unknown;
        }
        if let Some(tree) = self.no_memo.get(b) {
            return Outcome::No(tree.clone());
        }
        let remaining = ctx.limits.depth_cap - depth;
        if remaining == 0 {
            self.track.note_depth();
            return Outcome::Unknown;
        }
        if self.unknown_memo.get(b).is_some_and(|&r| r >= remaining) {
            return Outcome::Unknown;
        }
        for fam in ctx.families(&b.s.lo, &b.s.hi) {
            let mut kids = Vec::with_capacity(2);
            for &op in fam {
                let child = ctx.ops.apply_box(op, b);
                self.track.path.push(op);
                let out = self.visit(&child, depth + 1);
                self.track.path.pop();
                match out {
                    Outcome::No(t) => kids.push(t),
                    _ => break,
                }
            }
            if kids.len() == 2 {
                let t1 = kids.pop().unwrap();
                let t0 = kids.pop().unwrap();
                let tree = Rc::new(NoTree::Split(*fam, [t0, t1]));
                self.no_memo.insert(b.clone(), tree.clone());
                return Outcome::No(tree);
            }
        }
        if !self.track.budget_hit {
            let e = self.unknown_memo.entry(b.clone()).or_insert(0);
            *e = (*e).max(remaining);
        }
        Outcome::Unknown
    }
}

/// Tries to prove that no point of `b` is a difference pair. Returns a No
/// certificate or Unknown; never Yes.
pub fn box_search_no(ctx: &DiffPairContext, b: &PlaneBox) -> Certificate {
    let mut search = BoxSearch {
        ctx,
        no_memo: HashMap::new(),
        unknown_memo: HashMap::new(),
        track: Tracker::new(),
    };
    let outcome = search.visit(b, 0);
    let query = Query::Box(b.clone());
    let mut cert = match outcome {
        Outcome::No(tree) => {
            let mut c = ctx.certificate(query, Verdict::No, Terminal::AllBranchesEscape);
            c.escape_words = tree.words();
            c
        }
        _ => {
            let mut c = ctx.certificate(query, Verdict::Unknown, search.track.unknown_terminal());
            c.word = search.track.deepest.clone();
            c
        }
    };
    cert.nodes = search.track.nodes;
    cert
}

/// Breadth-first search for a word whose image of `b` lies inside the region of a
/// pair with the expansion property; such a word proves every point of `b` is a
/// difference pair. Returns Yes or Unknown.
pub fn box_search_yes(ctx: &DiffPairContext, b: &PlaneBox) -> Certificate {
    let query = Query::Box(b.clone());
    let mut nodes = 0u64;
    let mut budget_hit = false;
    let mut deepest = Vec::new();
    let mut found = None;
    if ctx.lemma1.holds {
        let mut seen: HashSet<PlaneBox> = HashSet::new();
        let mut queue: VecDeque<(PlaneBox, Vec<Op>)> = VecDeque::new();
        queue.push_back((b.clone(), Vec::new()));
        seen.insert(b.clone());
        while let Some((bx, word)) = queue.pop_front() {
            nodes += 1;
            if nodes > ctx.limits.node_budget {
                budget_hit = true;
                break;
            }
            if ctx.lemma1.region.contains_box(&bx) {
                found = Some(word);
                break;
            }
            if word.len() > deepest.len() {
                deepest = word.clone();
            }
            if word.len() >= ctx.limits.depth_cap {
                continue;
            }
            for fam in ctx.families(&bx.s.lo, &bx.s.hi) {
                for &op in fam {
                    let child = ctx.ops.apply_box(op, &bx);
                    // Points outside the bounds stay outside, so this branch can never fit in R.
                    if !ctx.ops.box_in_bounds(&child) || !seen.insert(child.clone()) {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(op);
                    queue.push_back((child, w));
                }
            }
        }
    }
    let mut cert = match found {
        Some(word) => {
            let mut c = ctx.certificate(query, Verdict::Yes, Terminal::RHit);
            c.word = word;
            c
        }
        None => {
            let terminal = if budget_hit {
                Terminal::BudgetExhausted
            } else {
                Terminal::DepthExhausted
            };
            let mut c = ctx.certificate(query, Verdict::Unknown, terminal);
            c.word = deepest;
            c
        }
    };
    cert.nodes = nodes;
    cert
}
