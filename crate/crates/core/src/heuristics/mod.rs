//! The widget- and window-matching heuristics.
//!
//! Every widget heuristic proposes at most one match per execution and never
//! mutates state itself; the engine commits proposals according to the
//! execution strategy. All operations are pure functions of their inputs, so
//! a proposal can always be re-derived for trace verification.

pub mod generate;

pub use generate::{
    enumerate_generation, generate_heuristic_set, spec_from_generation, GenerationSpec,
    PriorityRow, PriorityTable,
};

use crate::engine::MatchState;
use crate::error::{Error, Result};
use crate::index::{canonical_mask_bit, IndexedModel};
use crate::model::{GuiModel, PropertyKey};
use crate::textdiff::diff_ops;

/// How one property must relate across a candidate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CriterionKind {
    /// Both values non-null and equal.
    Equality,
    /// Both values non-null and within `max_ops` add/delete operations.
    Similarity,
    /// Both values null (or absent).
    Nullity,
}

/// A per-property test inside a property-values heuristic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Criterion {
    pub kind: CriterionKind,
    pub property: PropertyKey,
    /// Present iff `kind` is `Similarity`.
    pub max_ops: Option<usize>,
}

impl Criterion {
    pub fn equality(property: impl Into<PropertyKey>) -> Self {
        Criterion {
            kind: CriterionKind::Equality,
            property: property.into(),
            max_ops: None,
        }
    }

    pub fn similarity(property: impl Into<PropertyKey>, max_ops: usize) -> Self {
        Criterion {
            kind: CriterionKind::Similarity,
            property: property.into(),
            max_ops: Some(max_ops),
        }
    }

    pub fn nullity(property: impl Into<PropertyKey>) -> Self {
        Criterion {
            kind: CriterionKind::Nullity,
            property: property.into(),
            max_ops: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.max_ops) {
            (CriterionKind::Similarity, None) => Err(Error::Config(format!(
                "similarity criterion on \"{}\" needs max_ops",
                self.property
            ))),
            (CriterionKind::Similarity, Some(_)) => Ok(()),
            (_, Some(_)) => Err(Error::Config(format!(
                "criterion on \"{}\" must not carry max_ops",
                self.property
            ))),
            _ => Ok(()),
        }
    }

    fn label_fragment(&self) -> String {
        match self.kind {
            CriterionKind::Equality => format!("{}=", self.property),
            CriterionKind::Similarity => {
                format!("{}~{}", self.property, self.max_ops.unwrap_or(0))
            }
            CriterionKind::Nullity => format!("{}:null", self.property),
        }
    }
}

/// The available heuristic implementations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeuristicKind {
    /// Pairs application windows (phase 1 only).
    Window,
    /// Scores unmatched widget pairs against property criteria.
    PropertyValues,
    /// Like `PropertyValues`, restricted to children of matched parents.
    PropertyValuesHierarchy,
    /// Pairs widgets with a window-unique property value.
    Singleton,
    /// Pairs containers whose children are already fully matched.
    InverseHierarchy,
    /// Sweeps unmatched widgets into Deleted/Created (phase 3 only).
    Final,
}

/// One entry of the prioritized pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicSpec {
    pub kind: HeuristicKind,
    pub criteria: Vec<Criterion>,
    /// Present iff `kind` is `Singleton`.
    pub singleton_property: Option<PropertyKey>,
    /// 1 = highest accuracy; unique within one pipeline.
    pub priority: u32,
    pub label: String,
}

impl HeuristicSpec {
    fn new(kind: HeuristicKind, criteria: Vec<Criterion>, singleton: Option<PropertyKey>) -> Self {
        let label = derive_label(kind, &criteria, singleton.as_ref());
        HeuristicSpec {
            kind,
            criteria,
            singleton_property: singleton,
            priority: 0,
            label,
        }
    }

    pub fn window() -> Self {
        HeuristicSpec::new(HeuristicKind::Window, Vec::new(), None)
    }

    pub fn final_sweep() -> Self {
        HeuristicSpec::new(HeuristicKind::Final, Vec::new(), None)
    }

    pub fn property_values(criteria: Vec<Criterion>) -> Self {
        HeuristicSpec::new(HeuristicKind::PropertyValues, criteria, None)
    }

    pub fn property_values_hierarchy(criteria: Vec<Criterion>) -> Self {
        HeuristicSpec::new(HeuristicKind::PropertyValuesHierarchy, criteria, None)
    }

    pub fn singleton(property: impl Into<PropertyKey>) -> Self {
        HeuristicSpec::new(HeuristicKind::Singleton, Vec::new(), Some(property.into()))
    }

    pub fn inverse_hierarchy() -> Self {
        HeuristicSpec::new(HeuristicKind::InverseHierarchy, Vec::new(), None)
    }

    pub fn with_priority(mut self, priority: u32) -> Self {
        self.priority = priority;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for criterion in &self.criteria {
            criterion.validate()?;
        }
        match self.kind {
            HeuristicKind::PropertyValues | HeuristicKind::PropertyValuesHierarchy => {
                if self.criteria.is_empty() {
                    return Err(Error::Config(format!(
                        "heuristic \"{}\" needs at least one criterion",
                        self.label
                    )));
                }
            }
            HeuristicKind::Singleton => {
                if self.singleton_property.is_none() {
                    return Err(Error::Config(
                        "singleton heuristic needs a property".to_string(),
                    ));
                }
            }
            _ => {}
        }
        if self.singleton_property.is_some() && self.kind != HeuristicKind::Singleton {
            return Err(Error::Config(format!(
                "heuristic \"{}\" must not carry a singleton property",
                self.label
            )));
        }
        Ok(())
    }
}

fn derive_label(
    kind: HeuristicKind,
    criteria: &[Criterion],
    singleton: Option<&PropertyKey>,
) -> String {
    let fragments = || {
        criteria
            .iter()
            .map(Criterion::label_fragment)
            .collect::<Vec<_>>()
            .join(",")
    };
    match kind {
        HeuristicKind::Window => "window".to_string(),
        HeuristicKind::Final => "final".to_string(),
        HeuristicKind::PropertyValues => format!("pv[{}]", fragments()),
        HeuristicKind::PropertyValuesHierarchy => format!("pvh[{}]", fragments()),
        HeuristicKind::Singleton => format!(
            "singleton[{}]",
            singleton.map(|p| p.as_str()).unwrap_or("?")
        ),
        HeuristicKind::InverseHierarchy => "inverse-hierarchy".to_string(),
    }
}

/// A proposed match between two currently unmatched widgets of one matched
/// window pair. Indices refer to the engine's indexed models; lower score is
/// better, ties fall back to document order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateMatch {
    pub old: usize,
    pub new: usize,
    pub score: u32,
}

impl CandidateMatch {
    fn key(&self) -> (u32, usize, usize) {
        (self.score, self.old, self.new)
    }
}

/// Phase 1: pairs windows by index.
///
/// A single window on both sides is paired regardless of title. Otherwise the
/// root windows pair first when their titles agree, then remaining windows
/// pair greedily by exact title equality in document order. Unmatched windows
/// stay out; their widgets fall to Deleted/Created in phase 3.
pub fn match_windows(old: &GuiModel, new: &GuiModel) -> Vec<(usize, usize)> {
    if old.windows.len() == 1 && new.windows.len() == 1 {
        return vec![(0, 0)];
    }
    let mut pairs = Vec::new();
    let mut old_used = vec![false; old.windows.len()];
    let mut new_used = vec![false; new.windows.len()];

    let old_root = old.windows.iter().position(|w| w.is_root);
    let new_root = new.windows.iter().position(|w| w.is_root);
    if let (Some(o), Some(n)) = (old_root, new_root) {
        if old.windows[o].title() == new.windows[n].title() {
            pairs.push((o, n));
            old_used[o] = true;
            new_used[n] = true;
        }
    }

    for (o, window) in old.windows.iter().enumerate() {
        if old_used[o] {
            continue;
        }
        let title = window.title();
        if let Some(n) = (0..new.windows.len())
            .find(|&n| !new_used[n] && new.windows[n].title() == title)
        {
            pairs.push((o, n));
            old_used[o] = true;
            new_used[n] = true;
        }
    }
    pairs
}

/// Applies one criterion to a widget pair; returns the score contribution or
/// `None` when the pair fails the criterion.
fn criterion_score(
    criterion: &Criterion,
    old: &IndexedModel,
    new: &IndexedModel,
    o: usize,
    n: usize,
) -> Option<u32> {
    let key = criterion.property.as_str();
    match criterion.kind {
        CriterionKind::Equality => {
            if let Some(bit) = canonical_mask_bit(&criterion.property) {
                if old.node(o).mask & bit == 0 || new.node(n).mask & bit == 0 {
                    return None;
                }
            }
            let a = old.value(o, key)?;
            let b = new.value(n, key)?;
            (a == b).then_some(0)
        }
        CriterionKind::Nullity => {
            if let Some(bit) = canonical_mask_bit(&criterion.property) {
                return (old.node(o).mask & bit == 0 && new.node(n).mask & bit == 0)
                    .then_some(0);
            }
            (old.value(o, key).is_none() && new.value(n, key).is_none()).then_some(0)
        }
        CriterionKind::Similarity => {
            if let Some(bit) = canonical_mask_bit(&criterion.property) {
                if old.node(o).mask & bit == 0 || new.node(n).mask & bit == 0 {
                    return None;
                }
            }
            let a = old.value(o, key)?;
            let b = new.value(n, key)?;
            let max_ops = criterion.max_ops.expect("validated similarity");
            let score = diff_ops(a, b).ops;
            (score <= max_ops).then_some(score as u32)
        }
    }
}

/// Total match score of a pair under `spec`, or `None` if any criterion
/// fails. Cheap criteria run before similarity diffs; the conjunction and
/// the score are order independent.
fn pair_score(
    spec: &HeuristicSpec,
    old: &IndexedModel,
    new: &IndexedModel,
    o: usize,
    n: usize,
) -> Option<u32> {
    for criterion in &spec.criteria {
        if criterion.kind != CriterionKind::Similarity {
            criterion_score(criterion, old, new, o, n)?;
        }
    }
    let mut score = 0u32;
    for criterion in &spec.criteria {
        if criterion.kind == CriterionKind::Similarity {
            score += criterion_score(criterion, old, new, o, n)?;
        }
    }
    Some(score)
}

struct PairSearch<'a, 'm> {
    spec: &'a HeuristicSpec,
    old: &'a IndexedModel<'m>,
    new: &'a IndexedModel<'m>,
    state: &'a MatchState,
    new_window: usize,
    /// Unmatched new widgets of the window; used by the non-hierarchical kind.
    news: Vec<usize>,
    hierarchical: bool,
}

impl PairSearch<'_, '_> {
    /// Best candidate pairing `o`, by (score, new index).
    fn best_for_old(&self, o: usize) -> Option<CandidateMatch> {
        let mut best: Option<CandidateMatch> = None;
        let mut consider = |n: usize| {
            if let Some(score) = pair_score(self.spec, self.old, self.new, o, n) {
                let cand = CandidateMatch { old: o, new: n, score };
                if best.is_none_or(|b| cand.key() < b.key()) {
                    best = Some(cand);
                }
            }
        };
        if self.hierarchical {
            match self.old.node(o).parent {
                None => {
                    for &n in self.new.top_level(self.new_window) {
                        if !self.state.is_new_matched(n) {
                            consider(n);
                        }
                    }
                }
                Some(p) => {
                    if let Some(q) = self.state.old_partner(p) {
                        for &n in &self.new.node(q).children {
                            if !self.state.is_new_matched(n) {
                                consider(n);
                            }
                        }
                    }
                }
            }
        } else {
            for &n in &self.news {
                consider(n);
            }
        }
        best
    }
}

fn unmatched_in_window(
    indexed: &IndexedModel,
    window: usize,
    is_matched: impl Fn(usize) -> bool,
) -> Vec<usize> {
    indexed
        .window_span(window)
        .filter(|&i| !is_matched(i))
        .collect()
}

#[cfg(feature = "parallel")]
const PARALLEL_PAIR_THRESHOLD: usize = 4096;

/// Sequential candidate search; the fallback lane and the small-window path.
pub fn find_best_candidate_sequential(
    spec: &HeuristicSpec,
    old: &IndexedModel,
    new: &IndexedModel,
    window_pair: (usize, usize),
    state: &MatchState,
) -> Option<CandidateMatch> {
    let (olds, search) = prepare_search(spec, old, new, window_pair, state)?;
    olds.iter()
        .filter_map(|&o| search.best_for_old(o))
        .min_by_key(CandidateMatch::key)
}

/// Rayon candidate search over the old-side widgets. The reduction key is the
/// total order (score, old, new), so the result is identical to the
/// sequential lane.
#[cfg(feature = "parallel")]
pub fn find_best_candidate_parallel(
    spec: &HeuristicSpec,
    old: &IndexedModel,
    new: &IndexedModel,
    window_pair: (usize, usize),
    state: &MatchState,
) -> Option<CandidateMatch> {
    use rayon::prelude::*;

    let (olds, search) = prepare_search(spec, old, new, window_pair, state)?;
    olds.par_iter()
        .with_min_len(8)
        .filter_map(|&o| search.best_for_old(o))
        .min_by_key(CandidateMatch::key)
}

fn prepare_search<'a, 'm>(
    spec: &'a HeuristicSpec,
    old: &'a IndexedModel<'m>,
    new: &'a IndexedModel<'m>,
    window_pair: (usize, usize),
    state: &'a MatchState,
) -> Option<(Vec<usize>, PairSearch<'a, 'm>)> {
    let (ow, nw) = window_pair;
    let olds = unmatched_in_window(old, ow, |i| state.is_old_matched(i));
    if olds.is_empty() {
        return None;
    }
    let news = unmatched_in_window(new, nw, |i| state.is_new_matched(i));
    if news.is_empty() {
        return None;
    }
    let search = PairSearch {
        spec,
        old,
        new,
        state,
        new_window: nw,
        news,
        hierarchical: spec.kind == HeuristicKind::PropertyValuesHierarchy,
    };
    Some((olds, search))
}

/// Lowest-scoring widget pair satisfying every criterion of `spec`, ties
/// broken by document order of the old then the new widget. The hierarchy
/// kind only considers pairs whose parents are already matched to each other
/// (widgets directly under the window count as having matched parents).
pub fn run_property_values(
    spec: &HeuristicSpec,
    old: &IndexedModel,
    new: &IndexedModel,
    window_pair: (usize, usize),
    state: &MatchState,
) -> Option<CandidateMatch> {
    debug_assert!(matches!(
        spec.kind,
        HeuristicKind::PropertyValues | HeuristicKind::PropertyValuesHierarchy
    ));
    #[cfg(feature = "parallel")]
    {
        let (ow, nw) = window_pair;
        let pairs = old.window_span(ow).len() * new.window_span(nw).len();
        if pairs >= PARALLEL_PAIR_THRESHOLD {
            return find_best_candidate_parallel(spec, old, new, window_pair, state);
        }
    }
    find_best_candidate_sequential(spec, old, new, window_pair, state)
}

/// Matches the first unmatched pair carrying a value of the singleton
/// property that is unique within each window. Uniqueness counts already
/// matched widgets.
pub fn run_singleton(
    spec: &HeuristicSpec,
    old: &IndexedModel,
    new: &IndexedModel,
    window_pair: (usize, usize),
    state: &MatchState,
) -> Option<CandidateMatch> {
    debug_assert_eq!(spec.kind, HeuristicKind::Singleton);
    let property = spec.singleton_property.as_ref()?;
    let key = property.as_str();
    let (ow, nw) = window_pair;

    let mut old_counts: std::collections::HashMap<&str, usize> = Default::default();
    for i in old.window_span(ow) {
        if let Some(v) = old.value(i, key) {
            *old_counts.entry(v).or_insert(0) += 1;
        }
    }
    let mut new_carriers: std::collections::HashMap<&str, (usize, usize)> = Default::default();
    for i in new.window_span(nw) {
        if let Some(v) = new.value(i, key) {
            let entry = new_carriers.entry(v).or_insert((0, i));
            entry.0 += 1;
        }
    }

    for o in old.window_span(ow) {
        if state.is_old_matched(o) {
            continue;
        }
        let Some(v) = old.value(o, key) else { continue };
        if old_counts.get(v) != Some(&1) {
            continue;
        }
        if let Some(&(1, n)) = new_carriers.get(v) {
            if !state.is_new_matched(n) {
                return Some(CandidateMatch { old: o, new: n, score: 0 });
            }
        }
    }
    None
}

/// Matches the first unmatched container pair (in document order of the old
/// side) with the same non-zero child count whose children are pairwise
/// matched to each other.
pub fn run_inverse_hierarchy(
    old: &IndexedModel,
    new: &IndexedModel,
    window_pair: (usize, usize),
    state: &MatchState,
) -> Option<CandidateMatch> {
    let (ow, _nw) = window_pair;
    'outer: for a in old.window_span(ow) {
        if state.is_old_matched(a) {
            continue;
        }
        let children = &old.node(a).children;
        if children.is_empty() {
            continue;
        }
        let first_partner = match state.old_partner(children[0]) {
            Some(p) => p,
            None => continue,
        };
        // candidate container: parent of the first child's partner
        let Some(b) = self_parent(new, first_partner) else {
            continue;
        };
        if state.is_new_matched(b) || new.node(b).children.len() != children.len() {
            continue;
        }
        for &child in children {
            match state.old_partner(child) {
                Some(p) if self_parent(new, p) == Some(b) => {}
                _ => continue 'outer,
            }
        }
        return Some(CandidateMatch { old: a, new: b, score: 0 });
    }
    None
}

fn self_parent(indexed: &IndexedModel, idx: usize) -> Option<usize> {
    indexed.node(idx).parent
}

/// Phase 3 outcome: every still-unmatched widget, in document order.
pub struct FinalizeOutcome {
    pub deleted: Vec<usize>,
    pub created: Vec<usize>,
}

/// Assigns all unmatched old widgets to Deleted and all unmatched new widgets
/// to Created, including widgets of unmatched windows.
pub fn finalize(old: &IndexedModel, new: &IndexedModel, state: &MatchState) -> FinalizeOutcome {
    FinalizeOutcome {
        deleted: (0..old.len()).filter(|&i| !state.is_old_matched(i)).collect(),
        created: (0..new.len()).filter(|&i| !state.is_new_matched(i)).collect(),
    }
}

/// Runs one widget heuristic on one window pair. `Window` and `Final` kinds
/// never propose widget matches.
pub fn run_heuristic(
    spec: &HeuristicSpec,
    old: &IndexedModel,
    new: &IndexedModel,
    window_pair: (usize, usize),
    state: &MatchState,
) -> Option<CandidateMatch> {
    match spec.kind {
        HeuristicKind::PropertyValues | HeuristicKind::PropertyValuesHierarchy => {
            run_property_values(spec, old, new, window_pair, state)
        }
        HeuristicKind::Singleton => run_singleton(spec, old, new, window_pair, state),
        HeuristicKind::InverseHierarchy => run_inverse_hierarchy(old, new, window_pair, state),
        HeuristicKind::Window | HeuristicKind::Final => None,
    }
}

#[cfg(test)]
mod tests;
