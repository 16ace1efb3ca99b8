//! The canonical GUI model: a forest of windows, each a tree of widgets
//! carrying string property maps.
//!
//! Models are immutable after parsing/validation and can be shared freely
//! across concurrent matching runs. An absent property and a property present
//! with a null value are indistinguishable throughout the crate.

mod json;
mod xml;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Property keys every tooling layer knows about. Arbitrary additional keys
/// are permitted on any widget.
pub const CANONICAL_KEYS: [&str; 10] = [
    "Class",
    "Text",
    "Icon",
    "Accelerator",
    "Index",
    "Width",
    "Height",
    "X",
    "Y",
    "Title",
];

/// Keys describing widget size or location only.
pub const GEOMETRY_KEYS: [&str; 4] = ["X", "Y", "Width", "Height"];

/// Returns true for keys that describe widget size or location.
pub fn is_geometry_key(key: &str) -> bool {
    GEOMETRY_KEYS.contains(&key)
}

/// Name of one widget property. Non-empty and case-sensitive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyKey(String);

impl PropertyKey {
    /// Creates a key. Panics on an empty name; parsers validate names before
    /// constructing keys.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "property key must be non-empty");
        PropertyKey(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Position of this key in [`CANONICAL_KEYS`], if canonical.
    pub fn canonical_bit(&self) -> Option<u8> {
        CANONICAL_KEYS
            .iter()
            .position(|k| *k == self.0)
            .map(|i| i as u8)
    }
}

impl fmt::Display for PropertyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PropertyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for PropertyKey {
    fn from(s: &str) -> Self {
        PropertyKey::new(s)
    }
}

/// One GUI object: an id, a property map and ordered children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Widget {
    pub id: String,
    /// `None` values are explicit nulls; an absent entry means the same.
    pub properties: BTreeMap<PropertyKey, Option<String>>,
    pub children: Vec<Widget>,
}

impl Widget {
    pub fn new(id: impl Into<String>) -> Self {
        Widget {
            id: id.into(),
            properties: BTreeMap::new(),
            children: Vec::new(),
        }
    }

    /// Builder-style property setter.
    pub fn prop(mut self, key: impl Into<PropertyKey>, value: impl Into<String>) -> Self {
        self.properties.insert(key.into(), Some(value.into()));
        self
    }

    /// Builder-style null property (equivalent to leaving it absent).
    pub fn prop_null(mut self, key: impl Into<PropertyKey>) -> Self {
        self.properties.insert(key.into(), None);
        self
    }

    /// Builder-style child appender.
    pub fn child(mut self, child: Widget) -> Self {
        self.children.push(child);
        self
    }

    /// Value of `key`, treating absent and null identically.
    pub fn property(&self, key: &str) -> Option<&str> {
        self.properties
            .get(&PropertyKey::new(key))
            .and_then(|v| v.as_deref())
    }

    pub fn set_property(&mut self, key: impl Into<PropertyKey>, value: Option<String>) {
        self.properties.insert(key.into(), value);
    }

    /// Pre-order iterator over this widget and all descendants.
    pub fn iter(&self) -> WidgetIter<'_> {
        WidgetIter { stack: vec![self] }
    }

    /// Number of widgets in this subtree, including `self`.
    pub fn subtree_size(&self) -> usize {
        self.iter().count()
    }
}

pub struct WidgetIter<'a> {
    stack: Vec<&'a Widget>,
}

impl<'a> Iterator for WidgetIter<'a> {
    type Item = &'a Widget;

    fn next(&mut self) -> Option<&'a Widget> {
        let next = self.stack.pop()?;
        self.stack.extend(next.children.iter().rev());
        Some(next)
    }
}

/// One application window. The window node itself carries the `Title`
/// property; the widgets contained in the window are its children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub root_widget: Widget,
    pub is_root: bool,
}

impl Window {
    pub fn new(root_widget: Widget) -> Self {
        Window {
            root_widget,
            is_root: false,
        }
    }

    pub fn root(mut self) -> Self {
        self.is_root = true;
        self
    }

    /// Mirrors the root widget's `Title` property.
    pub fn title(&self) -> Option<&str> {
        self.root_widget.property("Title")
    }
}

/// A full GUI model: ordered windows, globally unique widget ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuiModel {
    pub version_label: String,
    pub windows: Vec<Window>,
}

impl GuiModel {
    pub fn new(version_label: impl Into<String>, windows: Vec<Window>) -> Self {
        GuiModel {
            version_label: version_label.into(),
            windows,
        }
    }

    /// Checks every model invariant: at least one window, exactly one root
    /// window, globally unique ids, non-empty ids.
    pub fn validate(&self) -> Result<()> {
        self.validate_named("<model>")
    }

    pub(crate) fn validate_named(&self, source_name: &str) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::format(source_name, "model has no windows"));
        }
        let roots = self.windows.iter().filter(|w| w.is_root).count();
        if roots != 1 {
            return Err(Error::format(
                source_name,
                format!("model must have exactly one root window, found {roots}"),
            ));
        }
        let mut seen: HashSet<&str> = HashSet::new();
        for node in self.all_nodes() {
            if node.id.is_empty() {
                return Err(Error::format(source_name, "widget with empty id"));
            }
            if !seen.insert(&node.id) {
                return Err(Error::format(
                    source_name,
                    format!("duplicate widget id \"{}\"", node.id),
                ));
            }
        }
        Ok(())
    }

    /// All nodes in document order, including the window nodes themselves.
    pub fn all_nodes(&self) -> impl Iterator<Item = &Widget> {
        self.windows.iter().flat_map(|w| w.root_widget.iter())
    }

    /// The matchable widgets in document order: every node strictly below a
    /// window node. Window nodes are paired during window matching, never by
    /// widget heuristics.
    pub fn widgets(&self) -> impl Iterator<Item = &Widget> {
        self.windows
            .iter()
            .flat_map(|w| w.root_widget.children.iter())
            .flat_map(|c| c.iter())
    }

    /// Number of matchable widgets (window nodes excluded).
    pub fn widget_count(&self) -> usize {
        self.widgets().count()
    }

    /// The unique node carrying `id`, window nodes included. Absence is a
    /// value, not an error.
    pub fn widget_lookup(&self, id: &str) -> Option<&Widget> {
        self.all_nodes().find(|w| w.id == id)
    }

    /// Parses a model file; `.json` selects the JSON mirror, anything else
    /// the XML format.
    pub fn parse_file(path: impl AsRef<Path>) -> Result<GuiModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::File {
            path: path.display().to_string(),
            source,
        })?;
        let name = path.display().to_string();
        if path.extension().is_some_and(|e| e == "json") {
            json::parse_json(&text, &name)
        } else {
            xml::parse_xml(&text, &name)
        }
    }

    pub fn parse_xml_str(text: &str) -> Result<GuiModel> {
        xml::parse_xml(text, "<string>")
    }

    pub fn parse_json_str(text: &str) -> Result<GuiModel> {
        json::parse_json(text, "<string>")
    }

    /// Canonical XML form: properties sorted by name, widgets in document
    /// order, two-space indentation. Parsing the output yields a structurally
    /// equal model.
    pub fn to_xml_string(&self) -> String {
        xml::to_xml(self)
    }

    pub fn to_json_string(&self) -> String {
        json::to_json(self)
    }
}

/// Widget-filtering pass applied before matching.
///
/// Delimiter-classed widgets (menu separators, invisible panels) are dropped
/// together with their subtree; composite-classed widgets (combo boxes and
/// the like) are kept but lose all descendants.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FilterConfig {
    pub delimiter_classes: BTreeSet<String>,
    pub composite_classes: BTreeSet<String>,
    pub enabled: bool,
}

impl FilterConfig {
    pub fn disabled() -> Self {
        FilterConfig::default()
    }

    pub fn new<I, J>(delimiters: I, composites: J) -> Self
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = String>,
    {
        FilterConfig {
            delimiter_classes: delimiters.into_iter().collect(),
            composite_classes: composites.into_iter().collect(),
            enabled: true,
        }
    }

    fn is_delimiter(&self, widget: &Widget) -> bool {
        widget
            .property("Class")
            .is_some_and(|c| self.delimiter_classes.contains(c))
    }

    fn is_composite(&self, widget: &Widget) -> bool {
        widget
            .property("Class")
            .is_some_and(|c| self.composite_classes.contains(c))
    }
}

/// Returns a filtered copy of `model`. Window nodes are never filtered.
/// Document order of surviving widgets is preserved; the input is untouched.
pub fn apply_filters(model: &GuiModel, cfg: &FilterConfig) -> GuiModel {
    if !cfg.enabled {
        return model.clone();
    }
    let windows = model
        .windows
        .iter()
        .map(|w| {
            let mut root = w.root_widget.clone();
            root.children = w
                .root_widget
                .children
                .iter()
                .filter_map(|c| filter_widget(c, cfg))
                .collect();
            Window {
                root_widget: root,
                is_root: w.is_root,
            }
        })
        .collect();
    GuiModel {
        version_label: model.version_label.clone(),
        windows,
    }
}

fn filter_widget(widget: &Widget, cfg: &FilterConfig) -> Option<Widget> {
    if cfg.is_delimiter(widget) {
        return None;
    }
    let mut out = widget.clone();
    if cfg.is_composite(widget) {
        out.children.clear();
    } else {
        out.children = widget
            .children
            .iter()
            .filter_map(|c| filter_widget(c, cfg))
            .collect();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_model() -> GuiModel {
        let menu = Widget::new("menu")
            .prop("Class", "javax.swing.JMenu")
            .prop("Text", "File")
            .child(
                Widget::new("item1")
                    .prop("Class", "javax.swing.JMenuItem")
                    .prop("Text", "Open"),
            )
            .child(Widget::new("sep1").prop("Class", "javax.swing.JSeparator"))
            .child(
                Widget::new("item2")
                    .prop("Class", "javax.swing.JMenuItem")
                    .prop("Text", "Save"),
            );
        let combo = Widget::new("combo")
            .prop("Class", "javax.swing.JComboBox")
            .child(Widget::new("cb_text").prop("Class", "javax.swing.JTextField"))
            .child(Widget::new("cb_btn").prop("Class", "javax.swing.JButton"))
            .child(Widget::new("cb_list").prop("Class", "javax.swing.JList"));
        let root = Widget::new("win0")
            .prop("Class", "javax.swing.JFrame")
            .prop("Title", "Main")
            .child(menu)
            .child(combo);
        GuiModel::new("v1", vec![Window::new(root).root()])
    }

    #[test]
    fn absent_property_equals_null_property() {
        let w = Widget::new("w").prop_null("Text");
        assert_eq!(w.property("Text"), None);
        assert_eq!(w.property("Icon"), None);
    }

    #[test]
    fn validate_rejects_duplicate_ids() {
        let root = Widget::new("win0")
            .child(Widget::new("w1"))
            .child(Widget::new("w1"));
        let model = GuiModel::new("v", vec![Window::new(root).root()]);
        let err = model.validate().unwrap_err();
        assert!(err.to_string().contains("\"w1\""), "got: {err}");
    }

    #[test]
    fn validate_requires_exactly_one_root_window() {
        let model = GuiModel::new(
            "v",
            vec![Window::new(Widget::new("a")), Window::new(Widget::new("b"))],
        );
        assert!(model.validate().is_err());

        let model = GuiModel::new(
            "v",
            vec![
                Window::new(Widget::new("a")).root(),
                Window::new(Widget::new("b")).root(),
            ],
        );
        assert!(model.validate().is_err());
    }

    #[test]
    fn widget_lookup_finds_nodes_and_reports_absence() {
        let model = sample_model();
        assert_eq!(model.widget_lookup("item2").unwrap().property("Text"), Some("Save"));
        assert_eq!(model.widget_lookup("win0").unwrap().property("Title"), Some("Main"));
        assert!(model.widget_lookup("nope").is_none());
    }

    #[test]
    fn widget_count_excludes_window_nodes() {
        let model = sample_model();
        assert_eq!(model.widget_count(), 8);
        assert_eq!(model.all_nodes().count(), 9);
    }

    #[test]
    fn filters_remove_delimiters_with_subtree() {
        let model = sample_model();
        let cfg = FilterConfig::new(
            vec!["javax.swing.JSeparator".to_string()],
            vec![],
        );
        let filtered = apply_filters(&model, &cfg);
        assert!(filtered.widget_lookup("sep1").is_none());
        assert!(filtered.widget_lookup("item2").is_some());
        assert_eq!(filtered.widget_count(), 7);
        // input untouched
        assert!(model.widget_lookup("sep1").is_some());
    }

    #[test]
    fn filters_drop_composite_children_keep_widget() {
        let model = sample_model();
        let cfg = FilterConfig::new(vec![], vec!["javax.swing.JComboBox".to_string()]);
        let filtered = apply_filters(&model, &cfg);
        let combo = filtered.widget_lookup("combo").unwrap();
        assert!(combo.children.is_empty());
        assert!(filtered.widget_lookup("cb_btn").is_none());
    }

    #[test]
    fn disabled_filter_is_identity() {
        let model = sample_model();
        let mut cfg = FilterConfig::new(
            vec!["javax.swing.JSeparator".to_string()],
            vec!["javax.swing.JComboBox".to_string()],
        );
        cfg.enabled = false;
        let filtered = apply_filters(&model, &cfg);
        assert_eq!(filtered, model);
    }

    #[test]
    fn filtering_is_idempotent_and_preserves_order() {
        let model = sample_model();
        let cfg = FilterConfig::new(
            vec!["javax.swing.JSeparator".to_string()],
            vec!["javax.swing.JComboBox".to_string()],
        );
        let once = apply_filters(&model, &cfg);
        let twice = apply_filters(&once, &cfg);
        assert_eq!(once, twice);

        let surviving: Vec<&str> = once.widgets().map(|w| w.id.as_str()).collect();
        let original_order: Vec<&str> = model
            .widgets()
            .map(|w| w.id.as_str())
            .filter(|id| surviving.contains(id))
            .collect();
        assert_eq!(surviving, original_order);
        assert!(once.widget_count() <= model.widget_count());
    }
}
