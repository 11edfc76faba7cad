//! Deterministic naming for states built from pairs of states (pullback
//! products and span apexes).

use std::collections::{BTreeMap, BTreeSet};

use crate::ts::StateId;

/// Renders each pair as `(left,right)`; when that name is already taken by
/// an earlier pair (state identifiers may themselves contain parentheses or
/// commas), a `#2`, `#3`, ... suffix disambiguates, in sorted pair order.
pub(crate) fn render_pairs(
    pairs: &BTreeSet<(StateId, StateId)>,
) -> BTreeMap<(StateId, StateId), StateId> {
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut names = BTreeMap::new();
    for (left, right) in pairs {
        let base = format!("({left},{right})");
        let mut name = base.clone();
        let mut k = 2;
        while used.contains(&name) {
            name = format!("{base}#{k}");
            k += 1;
        }
        used.insert(name.clone());
        names.insert((left.clone(), right.clone()), StateId::new(name));
    }
    names
}
