//! Renormalization dynamics in the `(s, t)` plane.
//!
//! For a pair `(K, K')`, `t` lies in `K - s K'` exactly when `(s, t)` admits a
//! bounded orbit under the four operators `T_0, T_1, T'_0, T'_1`. This module
//! certifies membership and non-membership for points and boxes with
//! replayable witnesses.

mod certificate;
mod gaps;
mod lemma1;
mod ops;
mod search;

pub use certificate::{verify_certificate, Certificate, Query, Terminal, Verdict};
pub use gaps::{
    endpoint_interval_evidence, gap_accumulation_certificates, locate_nondifference_box, AEvidence,
    AStatus, EvidenceOptions, GapAccumulation, GapCertificate, LemmaTwoExponents,
};
pub use lemma1::{
    full_interval_check, lemma1_check, FullIntervalVerdict, Lemma1Check, Lemma1Region,
};
pub use ops::{format_word, parse_word, Op, Operators, PlaneBox, PlanePoint};
pub use search::{
    box_search_no, box_search_yes, difference_pair_search, DiffPairContext, SearchLimits,
};
