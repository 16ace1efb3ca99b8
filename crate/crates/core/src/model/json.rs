//! JSON mirror of the canonical model format, accepted for `.json` files.
//! Field names mirror the XML attributes; a JSON `null` value is a null
//! property.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GuiModel, PropertyKey, Widget, Window};

#[derive(Serialize, Deserialize)]
struct JsonModel {
    version: String,
    windows: Vec<JsonWindow>,
}

#[derive(Serialize, Deserialize)]
struct JsonWindow {
    id: String,
    #[serde(default)]
    root: bool,
    #[serde(default)]
    properties: BTreeMap<String, Option<String>>,
    #[serde(default)]
    widgets: Vec<JsonWidget>,
}

#[derive(Serialize, Deserialize)]
struct JsonWidget {
    id: String,
    #[serde(default)]
    properties: BTreeMap<String, Option<String>>,
    #[serde(default)]
    widgets: Vec<JsonWidget>,
}

fn to_widget(node: JsonWidget, source_name: &str) -> Result<Widget> {
    let mut widget = Widget::new(node.id);
    widget.properties = convert_properties(node.properties, source_name)?;
    widget.children = node
        .widgets
        .into_iter()
        .map(|c| to_widget(c, source_name))
        .collect::<Result<_>>()?;
    Ok(widget)
}

fn convert_properties(
    raw: BTreeMap<String, Option<String>>,
    source_name: &str,
) -> Result<BTreeMap<PropertyKey, Option<String>>> {
    raw.into_iter()
        .map(|(k, v)| {
            if k.is_empty() {
                Err(Error::format(source_name, "empty property name"))
            } else {
                Ok((PropertyKey::new(k), v))
            }
        })
        .collect()
}

pub(super) fn parse_json(text: &str, source_name: &str) -> Result<GuiModel> {
    let raw: JsonModel = serde_json::from_str(text)
        .map_err(|e| Error::format(source_name, format!("{e}")))?;
    let windows = raw
        .windows
        .into_iter()
        .map(|w| {
            let mut root_widget = Widget::new(w.id);
            root_widget.properties = convert_properties(w.properties, source_name)?;
            root_widget.children = w
                .widgets
                .into_iter()
                .map(|c| to_widget(c, source_name))
                .collect::<Result<_>>()?;
            Ok(Window {
                root_widget,
                is_root: w.root,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let model = GuiModel {
        version_label: raw.version,
        windows,
    };
    model.validate_named(source_name)?;
    Ok(model)
}

fn from_widget(widget: &Widget) -> JsonWidget {
    JsonWidget {
        id: widget.id.clone(),
        properties: widget
            .properties
            .iter()
            .map(|(k, v)| (k.as_str().to_string(), v.clone()))
            .collect(),
        widgets: widget.children.iter().map(from_widget).collect(),
    }
}

pub(super) fn to_json(model: &GuiModel) -> String {
    let raw = JsonModel {
        version: model.version_label.clone(),
        windows: model
            .windows
            .iter()
            .map(|w| JsonWindow {
                id: w.root_widget.id.clone(),
                root: w.is_root,
                properties: w
                    .root_widget
                    .properties
                    .iter()
                    .map(|(k, v)| (k.as_str().to_string(), v.clone()))
                    .collect(),
                widgets: w.root_widget.children.iter().map(from_widget).collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("model serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use crate::model::{GuiModel, Widget, Window};

    #[test]
    fn json_mirror_round_trips() {
        let root = Widget::new("win0")
            .prop("Title", "Main")
            .child(Widget::new("w1").prop("Text", "Ok").prop_null("Icon"));
        let model = GuiModel::new("v1", vec![Window::new(root).root()]);
        let text = model.to_json_string();
        let reparsed = GuiModel::parse_json_str(&text).unwrap();
        assert_eq!(reparsed, model);
        // null property survives as absent-equivalent
        assert_eq!(reparsed.widget_lookup("w1").unwrap().property("Icon"), None);
    }

    #[test]
    fn json_duplicate_id_rejected() {
        let text = r#"{
            "version": "v",
            "windows": [{
                "id": "a", "root": true,
                "widgets": [{"id": "x"}, {"id": "x"}]
            }]
        }"#;
        let err = GuiModel::parse_json_str(text).unwrap_err();
        assert!(err.to_string().contains("\"x\""));
    }

    #[test]
    fn json_syntax_error_reports_format() {
        assert!(GuiModel::parse_json_str("{not json").is_err());
    }
}
