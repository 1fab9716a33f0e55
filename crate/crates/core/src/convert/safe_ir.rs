use alloc::collections::BTreeMap;
use alloc::vec;

use super::{ConvertedGame, Mode, OriginRole};
use crate::error::ConversionError;
use crate::game::{ActionLabel, NodeId};

/// Groups coordinator nodes that share their observed labels and the set of
/// live original histories. Nodes in a group differ only in prescription
/// components that concern excluded states, or in when a state was
/// excluded. Neither affects play from here on, so forgetting them loses
/// nothing.
pub fn apply_safe_imperfect_recall(cg: &ConvertedGame) -> Result<ConvertedGame, ConversionError> {
    if cg.mode == Mode::Basic {
        return Err(ConversionError::ExclusionDataMissing);
    }
    let mut keys: BTreeMap<(&[ActionLabel], &[NodeId]), (u32, NodeId)> = BTreeMap::new();
    let mut groups = vec![None; cg.game.len()];
    for (id, o) in cg.origin.iter().enumerate() {
        if !matches!(o.role, OriginRole::Coordinator { .. }) {
            continue;
        }
        let next = keys.len() as u32;
        let (group, first) = *keys.entry((&o.observed, &o.support)).or_insert((next, id));
        let same_edges = cg.game.node(first).edges.iter().map(|e| e.label).eq(cg.game.node(id).edges.iter().map(|e| e.label));
        if !same_edges {
            return Err(ConversionError::IllegalPrescription(id));
        }
        groups[id] = Some(group);
    }
    let mut out = cg.clone();
    out.coordinator_groups = Some(groups);
    out.safe_ir_applied = true;
    Ok(out)
}
