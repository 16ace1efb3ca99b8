//! Flattened, read-only view of a model used by the matching loops.
//!
//! Widgets are numbered in document order, window by window, so the widget
//! range of a window is contiguous and index order is the tie-breaking
//! document order. Window nodes are not part of the numbering; a widget whose
//! `parent` is `None` sits directly under its window node.

use std::collections::HashMap;
use std::ops::Range;

use crate::model::{GuiModel, PropertyKey, Widget, CANONICAL_KEYS};

/// One matchable widget inside an [`IndexedModel`].
pub struct Node<'m> {
    pub widget: &'m Widget,
    pub window: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Bit per canonical key, set iff the property is non-null.
    pub mask: u16,
}

/// Document-order arena over a model's matchable widgets.
pub struct IndexedModel<'m> {
    model: &'m GuiModel,
    nodes: Vec<Node<'m>>,
    window_spans: Vec<Range<usize>>,
    top_level: Vec<Vec<usize>>,
    id_to_node: HashMap<&'m str, usize>,
}

fn mask_of(widget: &Widget) -> u16 {
    let mut mask = 0u16;
    for (key, value) in &widget.properties {
        if value.is_some() {
            if let Some(bit) = key.canonical_bit() {
                mask |= 1 << bit;
            }
        }
    }
    mask
}

/// Mask bit for a canonical key name, if any.
pub fn canonical_mask_bit(key: &PropertyKey) -> Option<u16> {
    key.canonical_bit().map(|b| 1 << b)
}

impl<'m> IndexedModel<'m> {
    pub fn build(model: &'m GuiModel) -> Self {
        debug_assert!(CANONICAL_KEYS.len() <= 16);
        let mut indexed = IndexedModel {
            model,
            nodes: Vec::new(),
            window_spans: Vec::with_capacity(model.windows.len()),
            top_level: Vec::with_capacity(model.windows.len()),
            id_to_node: HashMap::new(),
        };
        for (wi, window) in model.windows.iter().enumerate() {
            let start = indexed.nodes.len();
            let mut tops = Vec::with_capacity(window.root_widget.children.len());
            for child in &window.root_widget.children {
                let idx = indexed.add_subtree(child, wi, None);
                tops.push(idx);
            }
            indexed.window_spans.push(start..indexed.nodes.len());
            indexed.top_level.push(tops);
        }
        indexed
    }

    fn add_subtree(&mut self, widget: &'m Widget, window: usize, parent: Option<usize>) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node {
            widget,
            window,
            parent,
            children: Vec::with_capacity(widget.children.len()),
            mask: mask_of(widget),
        });
        self.id_to_node.insert(widget.id.as_str(), idx);
        for child in &widget.children {
            let child_idx = self.add_subtree(child, window, Some(idx));
            self.nodes[idx].children.push(child_idx);
        }
        idx
    }

    pub fn model(&self) -> &'m GuiModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: usize) -> &Node<'m> {
        &self.nodes[idx]
    }

    pub fn id(&self, idx: usize) -> &'m str {
        &self.nodes[idx].widget.id
    }

    pub fn value(&self, idx: usize, key: &str) -> Option<&'m str> {
        self.nodes[idx].widget.property(key)
    }

    pub fn window_count(&self) -> usize {
        self.window_spans.len()
    }

    /// Widget indices of one window, in document order.
    pub fn window_span(&self, window: usize) -> Range<usize> {
        self.window_spans[window].clone()
    }

    /// Direct children of the window node.
    pub fn top_level(&self, window: usize) -> &[usize] {
        &self.top_level[window]
    }

    pub fn node_by_id(&self, id: &str) -> Option<usize> {
        self.id_to_node.get(id).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GuiModel, Widget, Window};

    #[test]
    fn numbering_is_document_order_and_contiguous_per_window() {
        let w0 = Widget::new("win0").child(
            Widget::new("a")
                .child(Widget::new("b"))
                .child(Widget::new("c").child(Widget::new("d"))),
        );
        let w1 = Widget::new("win1").child(Widget::new("e"));
        let model = GuiModel::new(
            "v",
            vec![Window::new(w0).root(), Window::new(w1)],
        );
        let idx = IndexedModel::build(&model);
        let order: Vec<&str> = (0..idx.len()).map(|i| idx.id(i)).collect();
        assert_eq!(order, vec!["a", "b", "c", "d", "e"]);
        assert_eq!(idx.window_span(0), 0..4);
        assert_eq!(idx.window_span(1), 4..5);
        assert_eq!(idx.top_level(0), &[0]);
        assert_eq!(idx.node(3).parent, Some(2));
        assert_eq!(idx.node(0).parent, None);
        assert_eq!(idx.node_by_id("d"), Some(3));
        assert_eq!(idx.node_by_id("win0"), None);
    }

    #[test]
    fn mask_tracks_non_null_canonical_properties() {
        let w = Widget::new("x")
            .prop("Class", "JButton")
            .prop_null("Text")
            .prop("Tooltip", "custom key");
        let model = GuiModel::new(
            "v",
            vec![Window::new(Widget::new("win").child(w)).root()],
        );
        let idx = IndexedModel::build(&model);
        let mask = idx.node(0).mask;
        assert_eq!(mask & 1, 1, "Class bit set");
        assert_eq!(mask & 2, 0, "null Text bit clear");
    }
}
