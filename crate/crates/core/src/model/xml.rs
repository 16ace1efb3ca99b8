//! Canonical XML model format.
//!
//! ```text
//! <GUI version="...">
//!   <Window id="..." root="true|false">
//!     <Property name="..." value="..."/>
//!     <Widget id="...">
//!       <Property name="..."/>          <- missing value attribute = null
//!       <Widget id="...">...</Widget>
//!     </Widget>
//!   </Window>
//! </GUI>
//! ```
//!
//! Serialization is canonical: properties sorted by name, widgets in document
//! order, two-space indentation. `parse(serialize(m)) == m` structurally and
//! `serialize(parse(f))` is a fixed point.

use std::collections::HashSet;
use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::model::{GuiModel, PropertyKey, Widget, Window};

fn line_of(text: &str, byte_pos: u64) -> usize {
    let pos = (byte_pos as usize).min(text.len());
    text[..pos].bytes().filter(|b| *b == b'\n').count() + 1
}

struct Parser<'a> {
    text: &'a str,
    source_name: &'a str,
    reader: Reader<&'a [u8]>,
    seen_ids: HashSet<String>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        let line = line_of(self.text, self.reader.buffer_position());
        Error::format(
            self.source_name,
            format!("line {}: {}", line, msg.into()),
        )
    }

    fn attr_map(&self, start: &BytesStart) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for attr in start.attributes() {
            let attr = attr.map_err(|e| self.err(format!("bad attribute: {e}")))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|e| self.err(format!("bad attribute value: {e}")))?
                .into_owned();
            out.push((key, value));
        }
        Ok(out)
    }

    fn register_id(&mut self, id: &str) -> Result<()> {
        if id.is_empty() {
            return Err(self.err("empty id attribute"));
        }
        if !self.seen_ids.insert(id.to_string()) {
            return Err(self.err(format!("duplicate widget id \"{id}\"")));
        }
        Ok(())
    }

    fn parse_property(&mut self, start: &BytesStart, widget: &mut Widget) -> Result<()> {
        let mut name = None;
        let mut value = None;
        for (k, v) in self.attr_map(start)? {
            match k.as_str() {
                "name" => name = Some(v),
                "value" => value = Some(v),
                other => return Err(self.err(format!("unknown Property attribute \"{other}\""))),
            }
        }
        let name = match name {
            Some(n) if !n.is_empty() => n,
            Some(_) => return Err(self.err("empty property name")),
            None => return Err(self.err("Property element missing name attribute")),
        };
        let key = PropertyKey::new(name);
        if widget.properties.contains_key(&key) {
            return Err(self.err(format!(
                "duplicate property \"{key}\" on widget \"{}\"",
                widget.id
            )));
        }
        widget.properties.insert(key, value);
        Ok(())
    }
}

pub(super) fn parse_xml(text: &str, source_name: &str) -> Result<GuiModel> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut parser = Parser {
        text,
        source_name,
        reader,
        seen_ids: HashSet::new(),
    };

    let mut version: Option<String> = None;
    let mut windows: Vec<Window> = Vec::new();
    // Stack of widgets under construction; element 0, when present, belongs
    // to the currently open Window.
    let mut stack: Vec<Widget> = Vec::new();
    let mut window_is_root: bool = false;
    let mut in_gui = false;
    let mut in_property = false;
    let mut done = false;

    loop {
        let event = parser
            .reader
            .read_event()
            .map_err(|e| parser.err(format!("{e}")))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let name = e.name();
                let tag = String::from_utf8_lossy(name.as_ref()).into_owned();
                if in_property {
                    return Err(parser.err("Property elements cannot have children"));
                }
                match tag.as_str() {
                    "GUI" => {
                        if in_gui || done {
                            return Err(parser.err("unexpected nested GUI element"));
                        }
                        for (k, v) in parser.attr_map(e)? {
                            if k == "version" {
                                version = Some(v);
                            } else {
                                return Err(
                                    parser.err(format!("unknown GUI attribute \"{k}\""))
                                );
                            }
                        }
                        in_gui = true;
                        if empty {
                            in_gui = false;
                            done = true;
                        }
                    }
                    "Window" => {
                        if !in_gui || !stack.is_empty() {
                            return Err(parser.err("Window element outside GUI"));
                        }
                        let mut id = None;
                        let mut root = false;
                        for (k, v) in parser.attr_map(e)? {
                            match k.as_str() {
                                "id" => id = Some(v),
                                "root" => {
                                    root = parse_bool(&v)
                                        .ok_or_else(|| parser.err("bad root attribute"))?
                                }
                                other => {
                                    return Err(parser
                                        .err(format!("unknown Window attribute \"{other}\"")))
                                }
                            }
                        }
                        let id = id
                            .ok_or_else(|| parser.err("Window element missing id attribute"))?;
                        parser.register_id(&id)?;
                        stack.push(Widget::new(id));
                        window_is_root = root;
                        if empty {
                            let root_widget = stack.pop().expect("window frame");
                            windows.push(Window {
                                root_widget,
                                is_root: window_is_root,
                            });
                        }
                    }
                    "Widget" => {
                        if stack.is_empty() {
                            return Err(parser.err("Widget element outside a Window"));
                        }
                        let mut id = None;
                        for (k, v) in parser.attr_map(e)? {
                            match k.as_str() {
                                "id" => id = Some(v),
                                other => {
                                    return Err(parser
                                        .err(format!("unknown Widget attribute \"{other}\"")))
                                }
                            }
                        }
                        let id = id
                            .ok_or_else(|| parser.err("Widget element missing id attribute"))?;
                        parser.register_id(&id)?;
                        let widget = Widget::new(id);
                        if empty {
                            stack.last_mut().expect("parent").children.push(widget);
                        } else {
                            stack.push(widget);
                        }
                    }
                    "Property" => {
                        let Some(widget) = stack.last_mut() else {
                            return Err(parser.err("Property element outside a widget"));
                        };
                        // borrow dance: attr parsing needs &parser
                        let mut w = std::mem::replace(widget, Widget::new("\0tmp"));
                        let res = parser.parse_property(e, &mut w);
                        *stack.last_mut().expect("widget") = w;
                        res?;
                        if !empty {
                            in_property = true;
                        }
                    }
                    other => {
                        return Err(parser.err(format!("unknown element <{other}>")));
                    }
                }
            }
            Event::End(ref e) => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                match tag.as_str() {
                    "Property" => in_property = false,
                    "Widget" => {
                        let widget = stack.pop().expect("widget frame");
                        stack.last_mut().expect("parent").children.push(widget);
                    }
                    "Window" => {
                        let root_widget = stack.pop().expect("window frame");
                        windows.push(Window {
                            root_widget,
                            is_root: window_is_root,
                        });
                    }
                    "GUI" => {
                        in_gui = false;
                        done = true;
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                let content = t
                    .xml_content()
                    .map_err(|e| parser.err(format!("{e}")))?;
                if !content.trim().is_empty() {
                    return Err(parser.err("unexpected text content"));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }

    if !done || in_gui {
        return Err(parser.err("missing or unterminated GUI element"));
    }
    let model = GuiModel {
        version_label: version.unwrap_or_default(),
        windows,
    };
    model.validate_named(source_name)?;
    Ok(model)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

pub(super) fn to_xml(model: &GuiModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<GUI version=\"{}\">", escape(&model.version_label));
    for window in &model.windows {
        write_window(&mut out, window);
    }
    out.push_str("</GUI>\n");
    out
}

fn write_window(out: &mut String, window: &Window) {
    let w = &window.root_widget;
    let empty = w.properties.is_empty() && w.children.is_empty();
    let _ = write!(
        out,
        "  <Window id=\"{}\" root=\"{}\"",
        escape(&w.id),
        window.is_root
    );
    if empty {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    write_body(out, w, 2);
    out.push_str("  </Window>\n");
}

fn write_body(out: &mut String, widget: &Widget, depth: usize) {
    let pad = "  ".repeat(depth);
    for (key, value) in &widget.properties {
        match value {
            Some(v) => {
                let _ = writeln!(
                    out,
                    "{pad}<Property name=\"{}\" value=\"{}\"/>",
                    escape(key.as_str()),
                    escape(v)
                );
            }
            None => {
                let _ = writeln!(out, "{pad}<Property name=\"{}\"/>", escape(key.as_str()));
            }
        }
    }
    for child in &widget.children {
        if child.properties.is_empty() && child.children.is_empty() {
            let _ = writeln!(out, "{pad}<Widget id=\"{}\"/>", escape(&child.id));
        } else {
            let _ = writeln!(out, "{pad}<Widget id=\"{}\">", escape(&child.id));
            write_body(out, child, depth + 1);
            let _ = writeln!(out, "{pad}</Widget>");
        }
    }
}

/// Attribute-context escaping. Newlines and tabs are escaped numerically so
/// they survive attribute-value normalization on re-parse.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use crate::model::GuiModel;

    const SAMPLE: &str = r#"<GUI version="v1">
  <Window id="win0" root="true">
    <Property name="Title" value="Main"/>
    <Widget id="w1">
      <Property name="Class" value="javax.swing.JButton"/>
      <Property name="Text" value="Ok"/>
    </Widget>
    <Widget id="w2">
      <Property name="Class" value="javax.swing.JPanel"/>
      <Widget id="w3">
        <Property name="Text"/>
      </Widget>
    </Widget>
  </Window>
</GUI>
"#;

    #[test]
    fn parses_well_formed_file() {
        let model = GuiModel::parse_xml_str(SAMPLE).unwrap();
        assert_eq!(model.version_label, "v1");
        assert_eq!(model.windows.len(), 1);
        assert_eq!(model.widget_count(), 3);
        assert_eq!(model.widget_lookup("w1").unwrap().property("Text"), Some("Ok"));
        // no-value property is null
        assert_eq!(model.widget_lookup("w3").unwrap().property("Text"), None);
    }

    #[test]
    fn duplicate_id_is_rejected_with_location() {
        let text = r#"<GUI version="v">
  <Window id="win" root="true">
    <Widget id="w1"/>
    <Widget id="w1"/>
  </Window>
</GUI>"#;
        let err = GuiModel::parse_xml_str(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("\"w1\""), "missing id in: {msg}");
        assert!(msg.contains("line 4"), "missing location in: {msg}");
    }

    #[test]
    fn zero_or_two_root_windows_rejected() {
        let none = r#"<GUI version="v"><Window id="a" root="false"/></GUI>"#;
        assert!(GuiModel::parse_xml_str(none).is_err());
        let two = r#"<GUI version="v"><Window id="a" root="true"/><Window id="b" root="true"/></GUI>"#;
        assert!(GuiModel::parse_xml_str(two).is_err());
    }

    #[test]
    fn unknown_elements_rejected() {
        let text = r#"<GUI version="v"><Window id="a" root="true"><Bogus/></Window></GUI>"#;
        assert!(GuiModel::parse_xml_str(text).is_err());
    }

    #[test]
    fn serialize_is_canonical_fixed_point() {
        let model = GuiModel::parse_xml_str(SAMPLE).unwrap();
        let emitted = model.to_xml_string();
        assert_eq!(emitted, SAMPLE);
        let reparsed = GuiModel::parse_xml_str(&emitted).unwrap();
        assert_eq!(reparsed, model);
    }

    #[test]
    fn escaping_round_trips() {
        let model = GuiModel::parse_xml_str(SAMPLE).unwrap();
        let mut model = model;
        model.windows[0]
            .root_widget
            .set_property("Title", Some("a&b <c> \"d\"\n\te".to_string()));
        let text = model.to_xml_string();
        let reparsed = GuiModel::parse_xml_str(&text).unwrap();
        assert_eq!(reparsed, model);
    }
}
