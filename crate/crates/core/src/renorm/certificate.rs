use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cantor::CantorPair;
use crate::error::{Error, Result};

use super::lemma1::lemma1_check;
use super::ops::{Op, Operators, PlaneBox, PlanePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    /// The orbit entered the region where every pair is a difference pair.
    RHit,
    /// The orbit returned to an exact earlier point.
    Periodic,
    /// Every leaf of the escape tree left `-b s <= t <= a`.
    AllBranchesEscape,
    DepthExhausted,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Query {
    Point(PlanePoint),
    Box(PlaneBox),
}

/// A self-contained verdict for a point or box, checkable by [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub pair: CantorPair,
    pub query: Query,
    pub verdict: Verdict,
    pub terminal: Terminal,
    /// Yes: the orbit word. Unknown: the deepest explored path.
    #[serde(with = "word_str")]
    pub word: Vec<Op>,
    /// Index into the orbit of `word` that the final point repeats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_start: Option<usize>,
    /// No: leaves of the escape tree.
    #[serde(default, with = "words_str")]
    pub escape_words: Vec<Vec<Op>>,
    /// Search nodes visited.
    pub nodes: u64,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad certificate: {e}")))
    }
}

mod word_str {
    use super::super::ops::{format_word, parse_word, Op};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &[Op], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_word(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Op>, D::Error> {
        let text = String::deserialize(d)?;
        parse_word(&text).map_err(serde::de::Error::custom)
    }
}

mod words_str {
    use super::super::ops::{format_word, parse_word, Op};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ws: &[Vec<Op>], s: S) -> Result<S::Ok, S::Error> {
        ws.iter()
            .map(|w| format_word(w))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Op>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_word(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone)]
enum Node {
    Point(PlanePoint),
    Box(PlaneBox),
}

impl Node {
    fn step(&self, ops: &Operators, op: Op) -> Node {
        match self {
            Node::Point(p) => Node::Point(ops.apply(op, p)),
            Node::Box(b) => Node::Box(ops.apply_box(op, b)),
        }
    }

    fn escapes(&self, ops: &Operators) -> bool {
        match self {
            Node::Point(p) => !ops.in_bounds(p),
            Node::Box(b) => ops.box_escapes(b),
        }
    }
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Verification(msg.into())
}

/// Replays a certificate through the public operators. Uses no search state.
pub fn verify_certificate(cert: &Certificate) -> Result<()> {
    let ops = Operators::new(&cert.pair);
    let root = match &cert.query {
        Query::Point(p) => Node::Point(PlanePoint::new(p.s.clone(), p.t.clone())?),
        Query::Box(b) => Node::Box(PlaneBox::new(b.s.clone(), b.t.clone())?),
    };
    match (cert.verdict, cert.terminal) {
        (Verdict::Yes, Terminal::RHit) => {
            let check = lemma1_check(&cert.pair);
            if !check.holds {
                return Err(fail(
                    "region witness used for a pair without the expansion property",
                ));
            }
            let end = cert.word.iter().fold(root, |n, &op| n.step(&ops, op));
            let inside = match &end {
                Node::Point(p) => check.region.contains_point(p),
                Node::Box(b) => check.region.contains_box(b),
            };
            if inside {
                Ok(())
            } else {
                Err(fail("orbit does not end inside the region"))
            }
        }
        (Verdict::Yes, Terminal::Periodic) => {
            let Node::Point(p) = root else {
                return Err(fail("periodic witnesses apply to points only"));
            };
            let start = cert
                .cycle_start
                .ok_or_else(|| fail("missing cycle start"))?;
            if start >= cert.word.len() {
                return Err(fail("cycle start beyond the word"));
            }
            let orbit = ops.orbit(&cert.word, &p);
            if let Some(bad) = orbit.iter().find(|q| !ops.in_bounds(q)) {
                return Err(fail(format!("orbit point {bad} is out of bounds")));
            }
            if orbit[start] != orbit[cert.word.len()] {
                return Err(fail("orbit does not close up"));
            }
            Ok(())
        }
        (Verdict::No, Terminal::AllBranchesEscape) => {
            let words: Vec<&[Op]> = cert.escape_words.iter().map(|w| w.as_slice()).collect();
            check_escape_tree(&ops, &root, &words, 0)
        }
        (Verdict::Unknown, Terminal::DepthExhausted | Terminal::BudgetExhausted) => Ok(()),
        (v, t) => Err(fail(format!(
            "terminal {t:?} does not support verdict {v:?}"
        ))),
    }
}

fn check_escape_tree(ops: &Operators, node: &Node, words: &[&[Op]], depth: usize) -> Result<()> {
    if words.is_empty() {
        return Err(fail("empty escape tree"));
    }
    if words.iter().any(|w| w.len() == depth) {
        if words.len() != 1 {
            return Err(fail("a leaf word is also an interior node"));
        }
        return if node.escapes(ops) {
            Ok(())
        } else {
            Err(fail("leaf does not leave the bounds"))
        };
    }
    let mut groups: BTreeMap<Op, Vec<&[Op]>> = BTreeMap::new();
    for w in words {
        groups.entry(w[depth]).or_default().push(w);
    }
    let keys: Vec<Op> = groups.keys().copied().collect();
    if keys != [Op::T0, Op::T1] && keys != [Op::Tp0, Op::Tp1] {
        return Err(fail(format!(
            "children {keys:?} do not form one operator family"
        )));
    }
    for (op, sub) in groups {
        check_escape_tree(ops, &node.step(ops, op), &sub, depth + 1)?;
    }
    Ok(())
}
