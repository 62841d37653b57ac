use std::fmt::Write;

use super::ast::*;

/// Pretty-prints a document in canonical form.
///
/// The output re-parses to an AST structurally equal to the input; the
/// registry stores this canonical text for every published version.
pub fn render(doc: &AstDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "namespace {}", doc.namespace);
    for include in &doc.includes {
        let _ = writeln!(out, "include {}", quote(include));
    }
    for def in &doc.definitions {
        out.push('\n');
        match def {
            AstDefinition::Typedef(t) => {
                render_annotations(&mut out, &t.annotations, "");
                let _ = writeln!(out, "typedef {} {}", t.base, t.name);
            }
            AstDefinition::Enum(e) => {
                render_annotations(&mut out, &e.annotations, "");
                let _ = writeln!(out, "enum {} {{", e.name);
                for entry in &e.entries {
                    let _ = writeln!(out, "  {} = {},", entry.name, entry.value);
                }
                out.push_str("}\n");
            }
            AstDefinition::Struct(s) => {
                render_annotations(&mut out, &s.annotations, "");
                let _ = write!(out, "struct {}", s.name);
                if !s.embeds.is_empty() {
                    let _ = write!(out, " embeds {}", s.embeds.join(", "));
                }
                out.push_str(" {\n");
                for (i, field) in s.fields.iter().enumerate() {
                    if i > 0 && !field.annotations.is_empty() {
                        out.push('\n');
                    }
                    render_annotations(&mut out, &field.annotations, "  ");
                    let opt = if field.optional { "optional " } else { "" };
                    let _ =
                        writeln!(out, "  {}: {}{} {}", field.id, opt, field.ty, field.name);
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

fn render_annotations(out: &mut String, annotations: &[AstAnnotation], indent: &str) {
    for anno in annotations {
        out.push_str(indent);
        let _ = write!(out, "@{}", anno.name);
        if !anno.args.is_empty() {
            out.push('{');
            for (i, arg) in anno.args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if let Some(key) = &arg.key {
                    let _ = write!(out, "{key}=");
                }
                render_literal(out, &arg.value);
            }
            out.push('}');
        }
        out.push('\n');
    }
}

fn render_literal(out: &mut String, lit: &Literal) {
    match lit {
        Literal::Str(s) => out.push_str(&quote(s)),
        Literal::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Literal::Path(p) => out.push_str(p),
    }
}

/// Double-quotes a string, escaping the characters the lexer understands.
fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn namespace_only() {
        let doc = parse("namespace x", "f.tsch").unwrap();
        assert_eq!(render(&doc), "namespace x\n");
    }

    #[test]
    fn round_trips_host_resource() {
        let src = r#"
namespace semconv

struct HostResource {
  @DisplayName{"Host ID"}
  @Description{"Unique host ID.
    For Cloud, this must be the
    instance_id assigned by the
    cloud provider."}
  1: string id

  @DisplayName{"Hostname (short)"}
  @Description{"Name of the host as
    returned by the 'hostname'command."}
  2: string name

  @DisplayName{"Architecture"}
  @Description{"The CPU architecture
    the host system is running on."}
  3: string arch
}
"#;
        let doc = parse(src, "listing4.tsch").unwrap();
        let rendered = render(&doc);
        let reparsed = parse(&rendered, "rendered.tsch").unwrap();
        assert_eq!(doc, reparsed);
        // Canonical output is itself a fixed point.
        assert_eq!(rendered, render(&reparsed));
    }

    #[test]
    fn round_trips_strings_with_escapes() {
        let src = "namespace x\n@Description{\"line\\nbreak \\\"quoted\\\" tab\\t\"}\ntypedef string T";
        let doc = parse(src, "f.tsch").unwrap();
        assert_eq!(parse(&render(&doc), "r.tsch").unwrap(), doc);
    }

    #[test]
    fn renders_includes_and_embeds() {
        let src = "namespace x\ninclude \"other.tsch\"\nstruct Base { 1: string a }\nstruct S embeds Base { 2: optional i32 b }";
        let doc = parse(src, "f.tsch").unwrap();
        let rendered = render(&doc);
        assert!(rendered.contains("include \"other.tsch\""));
        assert!(rendered.contains("struct S embeds Base {"));
        assert!(rendered.contains("2: optional i32 b"));
        assert_eq!(parse(&rendered, "r.tsch").unwrap(), doc);
    }
}
