use std::collections::BTreeSet;

use num::BigRational;
use serde::{Deserialize, Serialize};

use super::Exponent;
use crate::error::{Error, Result};
use crate::rational;

/// A pair `(z, k)` standing for the term `x^z (log x)^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTerm {
    pub z: Exponent,
    pub k: u32,
}

impl IndexTerm {
    pub fn new(z: Exponent, k: u32) -> Self {
        Self { z, k }
    }

    pub fn int(z: i64, k: u32) -> Self {
        Self::new(Exponent::integer(z), k)
    }
}

/// Finite set of terms truncated at `cutoff`, with no closure guarantee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSet {
    cutoff: BigRational,
    terms: Vec<IndexTerm>,
}

impl TermSet {
    /// Terms above the cutoff are dropped; the rest are sorted and deduplicated.
    pub fn new(cutoff: BigRational, terms: impl IntoIterator<Item = IndexTerm>) -> Self {
        let set: BTreeSet<IndexTerm> = terms
            .into_iter()
            .filter(|t| t.z.cmp_rational(&cutoff).is_le())
            .collect();
        Self {
            cutoff,
            terms: set.into_iter().collect(),
        }
    }

    pub fn cutoff(&self) -> &BigRational {
        &self.cutoff
    }

    pub fn terms(&self) -> &[IndexTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn contains(&self, term: &IndexTerm) -> bool {
        self.terms.binary_search(term).is_ok()
    }

    /// True when both closure rules hold up to the cutoff.
    pub fn is_closed(&self) -> bool {
        self.terms.iter().all(|t| {
            let shift_ok = {
                let next = t.z.shifted(1);
                next.cmp_rational(&self.cutoff).is_gt()
                    || self.contains(&IndexTerm::new(next, t.k))
            };
            shift_ok && (0..t.k).all(|p| self.contains(&IndexTerm::new(t.z.clone(), p)))
        })
    }
}

/// Truncated index set: a [`TermSet`] that satisfies both closure rules
/// (integer shifts of `z`, lowering of `k`) up to its cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet(TermSet);

impl IndexSet {
    pub fn empty(cutoff: BigRational) -> Self {
        Self(TermSet::new(cutoff, []))
    }

    pub fn cutoff(&self) -> &BigRational {
        self.0.cutoff()
    }

    pub fn terms(&self) -> &[IndexTerm] {
        self.0.terms()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, term: &IndexTerm) -> bool {
        self.0.contains(term)
    }

    pub fn as_term_set(&self) -> &TermSet {
        &self.0
    }

    /// Smallest exponent present, if any.
    pub fn min_exponent(&self) -> Option<&Exponent> {
        self.terms().first().map(|t| &t.z)
    }

    pub fn to_json(&self) -> IndexSetJson {
        IndexSetJson::from_terms(self.as_term_set())
    }

    /// Parse the JSON form and close it, so any valid generator list is accepted.
    pub fn from_json(json: &IndexSetJson) -> Result<Self> {
        Ok(closure(&json.to_term_set()?))
    }
}

/// Smallest index set containing `terms` (enumerated up to their cutoff).
pub fn closure(terms: &TermSet) -> IndexSet {
    let cutoff = terms.cutoff().clone();
    let mut out = BTreeSet::new();
    for t in terms.terms() {
        let mut z = t.z.clone();
        while z.cmp_rational(&cutoff).is_le() {
            for p in 0..=t.k {
                out.insert(IndexTerm::new(z.clone(), p));
            }
            z = z.shifted(1);
        }
    }
    IndexSet(TermSet::new(cutoff, out))
}

/// `E ∪̄ F = E ∪ F ∪ {(z, ℓ₁ + ℓ₂ + 1) : (z, ℓ₁) ∈ E, (z, ℓ₂) ∈ F}`, re-closed.
pub fn extended_union(e: &IndexSet, f: &IndexSet) -> Result<IndexSet> {
    if e.cutoff() != f.cutoff() {
        return Err(Error::CutoffMismatch {
            left: rational::display(e.cutoff()),
            right: rational::display(f.cutoff()),
        });
    }
    let mut all: Vec<IndexTerm> = e.terms().iter().chain(f.terms()).cloned().collect();
    for a in e.terms() {
        for b in f.terms().iter().filter(|b| b.z == a.z) {
            all.push(IndexTerm::new(a.z.clone(), a.k + b.k + 1));
        }
    }
    Ok(closure(&TermSet::new(e.cutoff().clone(), all)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexTermJson {
    pub z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_exact: Option<String>,
    pub k: u32,
}

/// Wire format: `{"cutoff": N, "terms": [{"z": .., "k": ..}, ..]}`, sorted by `(z, k)`.
/// The optional `*_exact` strings carry the exact values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSetJson {
    pub cutoff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_exact: Option<String>,
    pub terms: Vec<IndexTermJson>,
}

impl IndexSetJson {
    pub fn from_terms(set: &TermSet) -> Self {
        Self {
            cutoff: rational::to_f64(set.cutoff()),
            cutoff_exact: Some(rational::display(set.cutoff())),
            terms: set
                .terms()
                .iter()
                .map(|t| IndexTermJson {
                    z: t.z.to_f64(),
                    z_exact: Some(t.z.to_string()),
                    k: t.k,
                })
                .collect(),
        }
    }

    pub fn to_term_set(&self) -> Result<TermSet> {
        let cutoff = match &self.cutoff_exact {
            Some(s) => rational::parse(s)?,
            None => rational::from_f64_decimal(self.cutoff)?,
        };
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let z = match &t.z_exact {
                    Some(s) => Exponent::parse(s)?,
                    None => Exponent::rational(rational::from_f64_decimal(t.z)?),
                };
                Ok(IndexTerm::new(z, t.k))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TermSet::new(cutoff, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn gen(cutoff: i64, terms: &[(i64, u32)]) -> IndexSet {
        closure(&TermSet::new(
            int(cutoff),
            terms.iter().map(|&(z, k)| IndexTerm::int(z, k)),
        ))
    }

    fn pairs(s: &IndexSet) -> Vec<(i64, u32)> {
        s.terms()
            .iter()
            .map(|t| (t.z.as_rational().unwrap().to_integer().try_into().unwrap(), t.k))
            .collect()
    }

    #[test]
    fn closure_of_log_term() {
        let s = gen(3, &[(1, 1)]);
        assert_eq!(pairs(&s), vec![(1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1)]);
        assert!(s.as_term_set().is_closed());
    }

    #[test]
    fn closure_of_empty_and_smooth() {
        assert!(gen(3, &[]).is_empty());
        assert_eq!(pairs(&gen(2, &[(0, 0)])), vec![(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn extended_union_stacks_logs() {
        let e = gen(3, &[(1, 0)]);
        let u = extended_union(&e, &e).unwrap();
        assert!(u.contains(&IndexTerm::int(1, 0)));
        assert!(u.contains(&IndexTerm::int(1, 1)));
        assert!(!u.contains(&IndexTerm::int(1, 2)));

        let e = gen(3, &[(1, 1)]);
        let f = gen(3, &[(1, 0)]);
        let u = extended_union(&e, &f).unwrap();
        for k in 0..=2 {
            assert!(u.contains(&IndexTerm::int(1, k)));
        }
    }

    #[test]
    fn extended_union_with_empty_is_identity() {
        let f = gen(4, &[(1, 1), (2, 0)]);
        assert_eq!(extended_union(&IndexSet::empty(int(4)), &f).unwrap(), f);
    }

    #[test]
    fn mismatched_cutoffs_are_rejected() {
        let e = gen(3, &[(1, 0)]);
        let f = gen(4, &[(1, 0)]);
        assert!(matches!(extended_union(&e, &f), Err(Error::CutoffMismatch { .. })));
    }

    #[test]
    fn unclosed_sets_are_detected() {
        let raw = TermSet::new(int(3), [IndexTerm::int(1, 1)]);
        assert!(!raw.is_closed());
    }

    #[test]
    fn json_round_trip_is_sorted() {
        let s = gen(2, &[(1, 1), (0, 0)]);
        let json = serde_json::to_string(&s.to_json()).unwrap();
        assert!(json.starts_with("{\"cutoff\":2.0"));
        let back: IndexSetJson = serde_json::from_str(&json).unwrap();
        assert_eq!(IndexSet::from_json(&back).unwrap(), s);

        let plain: IndexSetJson =
            serde_json::from_str(r#"{"cutoff": 2, "terms": [{"z": 1, "k": 1}]}"#).unwrap();
        assert_eq!(pairs(&IndexSet::from_json(&plain).unwrap()), vec![(1, 0), (1, 1), (2, 0), (2, 1)]);
    }
}
