use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::idl::{
    AstAnnotation, AstComposite, AstDefinition, AstDocument, AstEnum, AstTypedef, Literal,
    TypeExpr,
};

use super::fingerprint::fingerprint;
use super::types::*;

#[derive(Debug, Clone, Error)]
pub enum ResolveError {
    #[error("unresolved name '{name}' referenced from {referenced_from}")]
    UnresolvedName { name: String, referenced_from: String },
    #[error("type cycle detected: {}", path.join(" -> "))]
    CycleDetected { path: Vec<String> },
    #[error("duplicate field after flattening {composite}: {detail}")]
    DuplicateFieldAfterFlatten { composite: String, detail: String },
    #[error("conflicting annotation @{annotation} on {element}")]
    ConflictingAnnotation { element: String, annotation: String },
    #[error("invalid annotation on {element}: {message}")]
    InvalidAnnotation { element: String, message: String },
    #[error("'{fqn}' is defined more than once")]
    DuplicateDefinition { fqn: String },
    #[error("'{fqn}' is not a struct ({context})")]
    NotAComposite { fqn: String, context: String },
}

type Result<T> = std::result::Result<T, ResolveError>;

/// Resolves a document set into the schema for one asset.
///
/// `root_fqn` must name a struct declared in one of the documents. The
/// returned schema's type universe is the closure of everything reachable
/// from the root: field types, rich-type conversion targets, qualifier
/// types, and the composites that fields were flattened out of.
pub fn resolve(docs: &[AstDocument], root_fqn: &str) -> Result<ResolvedSchema> {
    let (universe, lints) = resolve_all(docs)?;
    match universe.get(root_fqn) {
        Some(TypeDef::Composite(_)) => {}
        Some(_) => {
            return Err(ResolveError::NotAComposite {
                fqn: root_fqn.to_string(),
                context: "asset root".into(),
            })
        }
        None => {
            return Err(ResolveError::UnresolvedName {
                name: root_fqn.to_string(),
                referenced_from: "asset root".into(),
            })
        }
    }

    let types = reachable_closure(&universe, root_fqn);
    let (fingerprint_structural, fingerprint_semantic) = fingerprint(root_fqn, &types);
    Ok(ResolvedSchema {
        root: root_fqn.to_string(),
        types,
        fingerprint_structural,
        fingerprint_semantic,
        lints,
    })
}

/// Resolves every definition in the documents, with no root selection.
/// Used by `validate`-style tooling that checks whole files.
pub fn resolve_all(docs: &[AstDocument]) -> Result<(BTreeMap<String, TypeDef>, Vec<String>)> {
    Resolver::new(docs)?.run()
}

struct DefSite<'a> {
    namespace: &'a str,
    def: &'a AstDefinition,
}

struct Resolver<'a> {
    index: BTreeMap<String, DefSite<'a>>,
    /// Declaration order of fqns, for deterministic error reporting.
    order: Vec<String>,
    /// Composites carrying the @SemanticQualifier marker.
    qualifier_fqns: HashSet<String>,
    enums: BTreeMap<String, EnumDef>,
    lints: Vec<String>,
}

impl<'a> Resolver<'a> {
    fn new(docs: &'a [AstDocument]) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut order = Vec::new();
        for doc in docs {
            for def in &doc.definitions {
                let fqn = doc.qualify(def.name());
                if index
                    .insert(fqn.clone(), DefSite { namespace: &doc.namespace, def })
                    .is_some()
                {
                    return Err(ResolveError::DuplicateDefinition { fqn });
                }
                order.push(fqn);
            }
        }
        let qualifier_fqns = index
            .iter()
            .filter(|(_, site)| {
                matches!(site.def, AstDefinition::Struct(s)
                    if s.annotations.iter().any(|a| a.name == "SemanticQualifier"))
            })
            .map(|(fqn, _)| fqn.clone())
            .collect();
        Ok(Self { index, order, qualifier_fqns, enums: BTreeMap::new(), lints: Vec::new() })
    }

    fn run(mut self) -> Result<(BTreeMap<String, TypeDef>, Vec<String>)> {
        self.check_typedef_cycles()?;
        self.check_embed_cycles()?;

        // Enums first: qualifier values and defaults need their entries.
        for fqn in &self.order.clone() {
            if let AstDefinition::Enum(e) = self.index[fqn].def {
                let def = self.interpret_enum(fqn, e)?;
                self.enums.insert(fqn.clone(), def);
            }
        }

        let mut types: BTreeMap<String, TypeDef> = self
            .enums
            .iter()
            .map(|(fqn, e)| (fqn.clone(), TypeDef::Enum(e.clone())))
            .collect();

        for fqn in &self.order.clone() {
            match self.index[fqn].def {
                AstDefinition::Typedef(t) => {
                    let ns = self.index[fqn].namespace;
                    let rich = self.interpret_typedef(fqn, ns, t)?;
                    types.insert(fqn.clone(), TypeDef::Rich(rich));
                }
                AstDefinition::Enum(_) => {}
                AstDefinition::Struct(_) => {}
            }
        }

        // Composites: interpret fields, then flatten embeds depth-first.
        let mut raw = BTreeMap::new();
        for fqn in &self.order.clone() {
            if let AstDefinition::Struct(s) = self.index[fqn].def {
                let ns = self.index[fqn].namespace;
                raw.insert(fqn.clone(), self.interpret_composite(fqn, ns, s)?);
            }
        }
        let raw_fqns: Vec<String> = raw.keys().cloned().collect();
        let mut flattened: BTreeMap<String, Vec<FieldDef>> = BTreeMap::new();
        for fqn in &raw_fqns {
            flatten_into(fqn, &raw, &mut flattened)?;
        }
        for (fqn, rc) in raw {
            let fields = flattened.remove(&fqn).expect("flattened above");
            types.insert(
                fqn.clone(),
                TypeDef::Composite(CompositeDef {
                    fqn,
                    fields,
                    display_name: rc.display_name,
                    description: rc.description,
                    semantic_qualifier: rc.semantic_qualifier,
                    extras: rc.extras,
                }),
            );
        }

        self.validate_universe(&types)?;
        Ok((types, self.lints))
    }

    fn resolve_name(&self, name: &str, namespace: &str, from: &str) -> Result<String> {
        let candidate = if name.contains('.') {
            name.to_string()
        } else {
            format!("{namespace}.{name}")
        };
        if self.index.contains_key(&candidate) {
            Ok(candidate)
        } else {
            Err(ResolveError::UnresolvedName {
                name: name.to_string(),
                referenced_from: from.to_string(),
            })
        }
    }

    fn type_ref(&self, expr: &TypeExpr, namespace: &str, from: &str) -> Result<TypeRef> {
        Ok(match expr {
            TypeExpr::Bool => TypeRef::Bool,
            TypeExpr::I32 => TypeRef::I32,
            TypeExpr::I64 => TypeRef::I64,
            TypeExpr::Double => TypeRef::Double,
            TypeExpr::Text => TypeRef::Text,
            TypeExpr::Binary => TypeRef::Binary,
            TypeExpr::List(t) => TypeRef::List(Box::new(self.type_ref(t, namespace, from)?)),
            TypeExpr::Map(k, v) => TypeRef::Map(
                Box::new(self.type_ref(k, namespace, from)?),
                Box::new(self.type_ref(v, namespace, from)?),
            ),
            TypeExpr::Named(name) => TypeRef::Named(self.resolve_name(name, namespace, from)?),
        })
    }

    fn check_typedef_cycles(&self) -> Result<()> {
        for (fqn, site) in &self.index {
            let AstDefinition::Typedef(_) = site.def else { continue };
            let mut path = vec![fqn.clone()];
            let mut cur = fqn.clone();
            loop {
                let AstDefinition::Typedef(td) = self.index[&cur].def else { break };
                let TypeExpr::Named(next) = &td.base else { break };
                let Ok(next_fqn) = self.resolve_name(next, self.index[&cur].namespace, fqn) else {
                    // Dangling names surface later with full context.
                    break;
                };
                if path.contains(&next_fqn) {
                    path.push(next_fqn);
                    return Err(ResolveError::CycleDetected { path });
                }
                path.push(next_fqn.clone());
                cur = next_fqn;
            }
        }
        Ok(())
    }

    fn check_embed_cycles(&self) -> Result<()> {
        fn visit(
            fqn: &str,
            resolver: &Resolver,
            stack: &mut Vec<String>,
            done: &mut HashSet<String>,
        ) -> Result<()> {
            if done.contains(fqn) {
                return Ok(());
            }
            if let Some(at) = stack.iter().position(|s| s == fqn) {
                let mut path: Vec<String> = stack[at..].to_vec();
                path.push(fqn.to_string());
                return Err(ResolveError::CycleDetected { path });
            }
            stack.push(fqn.to_string());
            if let AstDefinition::Struct(s) = resolver.index[fqn].def {
                let ns = resolver.index[fqn].namespace;
                for embed in &s.embeds {
                    let target = resolver.resolve_name(embed, ns, &format!("struct {fqn}"))?;
                    if !matches!(resolver.index[&target].def, AstDefinition::Struct(_)) {
                        return Err(ResolveError::NotAComposite {
                            fqn: target,
                            context: format!("embedded by {fqn}"),
                        });
                    }
                    visit(&target, resolver, stack, done)?;
                }
            }
            stack.pop();
            done.insert(fqn.to_string());
            Ok(())
        }

        let mut done = HashSet::new();
        for fqn in &self.order {
            if matches!(self.index[fqn].def, AstDefinition::Struct(_)) {
                visit(fqn, self, &mut Vec::new(), &mut done)?;
            }
        }
        Ok(())
    }

    fn interpret_enum(&mut self, fqn: &str, e: &AstEnum) -> Result<EnumDef> {
        let mut ctx = AnnoCtx::new(format!("enum {fqn}"));
        let mut def = EnumDef {
            fqn: fqn.to_string(),
            entries: e
                .entries
                .iter()
                .map(|en| EnumEntry { name: en.name.clone(), value: en.value })
                .collect(),
            display_name: None,
            description: None,
            extras: Vec::new(),
        };
        for anno in &e.annotations {
            match anno.name.as_str() {
                "DisplayName" => def.display_name = Some(ctx.display_name(anno)?),
                "Description" => def.description = Some(ctx.description(anno)?),
                name if BUILTIN.contains(&name) => {
                    return Err(ctx.misplaced(name));
                }
                _ => def.extras.push(opaque(anno)),
            }
        }
        Ok(def)
    }

    fn interpret_typedef(&mut self, fqn: &str, ns: &str, t: &AstTypedef) -> Result<RichType> {
        let element = format!("typedef {fqn}");
        let mut ctx = AnnoCtx::new(element.clone());
        let mut rich = RichType {
            fqn: fqn.to_string(),
            base: self.type_ref(&t.base, ns, &element)?,
            display_name: None,
            description: None,
            semantic_type: None,
            unit: None,
            validate_regex: None,
            conversions: Vec::new(),
            allowed_ops: Vec::new(),
            extras: Vec::new(),
        };
        for anno in &t.annotations {
            match anno.name.as_str() {
                "DisplayName" => rich.display_name = Some(ctx.display_name(anno)?),
                "Description" => rich.description = Some(ctx.description(anno)?),
                "SemanticType" => {
                    ctx.once(anno)?;
                    rich.semantic_type = Some(SemanticTypeId(ctx.positional_path(anno)?));
                }
                "Unit" => {
                    ctx.once(anno)?;
                    let unit = ctx.positional_str(anno)?;
                    if unit.is_empty() {
                        return Err(ctx.invalid("@Unit must not be empty"));
                    }
                    rich.unit = Some(unit);
                }
                "Validate" => {
                    ctx.once(anno)?;
                    let pattern = match (anno.keyed("regex"), anno.positional()) {
                        (Some(Literal::Str(s)), _) => s.clone(),
                        (None, Some(Literal::Str(s))) => s.clone(),
                        _ => return Err(ctx.invalid("@Validate takes regex=\"...\"")),
                    };
                    if let Err(e) = regex::Regex::new(&pattern) {
                        return Err(ctx.invalid(format!("@Validate regex does not compile: {e}")));
                    }
                    rich.validate_regex = Some(pattern);
                }
                "Converts" => {
                    let target = match anno.keyed("to") {
                        Some(Literal::Path(p)) => {
                            self.resolve_name(p, ns, &format!("@Converts on {fqn}"))?
                        }
                        _ => return Err(ctx.invalid("@Converts requires to=<type>")),
                    };
                    let how = match anno.keyed("how").and_then(Literal::as_path) {
                        None | Some("identity") => ConversionHow::Identity,
                        Some("truncate_at_first_dot") => ConversionHow::TruncateAtFirstDot,
                        Some(other) => {
                            return Err(ctx.invalid(format!("unknown conversion '{other}'")))
                        }
                    };
                    let invertible = match anno.keyed("invertible").and_then(Literal::as_path) {
                        None | Some("false") => false,
                        Some("true") => true,
                        Some(other) => {
                            return Err(
                                ctx.invalid(format!("invertible must be true/false, got {other}"))
                            )
                        }
                    };
                    if rich.conversions.iter().any(|c| c.target == target) {
                        return Err(ResolveError::ConflictingAnnotation {
                            element: element.clone(),
                            annotation: "Converts".into(),
                        });
                    }
                    rich.conversions.push(ConversionDecl { target, how, invertible });
                }
                "AllowedOps" => {
                    ctx.once(anno)?;
                    let ops = ctx.positional_str(anno)?;
                    rich.allowed_ops =
                        ops.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                }
                name if BUILTIN.contains(&name) => return Err(ctx.misplaced(name)),
                _ => rich.extras.push(opaque(anno)),
            }
        }
        Ok(rich)
    }

    fn interpret_composite(&mut self, fqn: &str, ns: &str, s: &AstComposite) -> Result<RawComposite> {
        let element = format!("struct {fqn}");
        let mut ctx = AnnoCtx::new(element.clone());
        let mut rc = RawComposite {
            embeds: Vec::new(),
            own_fields: Vec::new(),
            display_name: None,
            description: None,
            semantic_qualifier: false,
            extras: Vec::new(),
        };
        for anno in &s.annotations {
            match anno.name.as_str() {
                "DisplayName" => rc.display_name = Some(ctx.display_name(anno)?),
                "Description" => rc.description = Some(ctx.description(anno)?),
                "SemanticQualifier" => {
                    ctx.once(anno)?;
                    if !anno.args.is_empty() {
                        return Err(ctx.invalid("@SemanticQualifier takes no arguments"));
                    }
                    rc.semantic_qualifier = true;
                }
                name if BUILTIN.contains(&name) => return Err(ctx.misplaced(name)),
                _ => rc.extras.push(opaque(anno)),
            }
        }
        for embed in &s.embeds {
            rc.embeds.push(self.resolve_name(embed, ns, &element)?);
        }
        for field in &s.fields {
            rc.own_fields.push(self.interpret_field(fqn, ns, field)?);
        }
        Ok(rc)
    }

    fn interpret_field(
        &mut self,
        owner_fqn: &str,
        ns: &str,
        field: &crate::idl::AstField,
    ) -> Result<FieldDef> {
        let element = format!("field {owner_fqn}.{}", field.name);
        let mut ctx = AnnoCtx::new(element.clone());
        let mut def = FieldDef {
            id: field.id,
            name: field.name.clone(),
            ty: self.type_ref(&field.ty, ns, &element)?,
            optional: field.optional,
            display_name: None,
            description: None,
            semantic_type: None,
            qualifiers: Vec::new(),
            privacy: None,
            measurement: false,
            origin: owner_fqn.to_string(),
            extras: Vec::new(),
        };
        for anno in &field.annotations {
            match anno.name.as_str() {
                "DisplayName" => def.display_name = Some(ctx.display_name(anno)?),
                "Description" => def.description = Some(ctx.description(anno)?),
                "SemanticType" => {
                    ctx.once(anno)?;
                    def.semantic_type = Some(SemanticTypeId(ctx.positional_path(anno)?));
                }
                "Privacy" => {
                    ctx.once(anno)?;
                    let category = match anno.keyed("category") {
                        Some(Literal::Str(s)) => s.clone(),
                        _ => return Err(ctx.invalid("@Privacy requires category=\"...\"")),
                    };
                    let retention_days = match anno.keyed("retention_days") {
                        Some(Literal::Int(n)) => *n,
                        _ => return Err(ctx.invalid("@Privacy requires retention_days=<int>")),
                    };
                    def.privacy = Some(PrivacyPolicy { category, retention_days });
                }
                "Measurement" => {
                    ctx.once(anno)?;
                    if !anno.args.is_empty() {
                        return Err(ctx.invalid("@Measurement takes no arguments"));
                    }
                    def.measurement = true;
                }
                name if BUILTIN.contains(&name) => return Err(ctx.misplaced(name)),
                _ => {
                    // An annotation naming a @SemanticQualifier struct tags
                    // the field with a role; anything else is opaque.
                    if let Ok(qfqn) = self.resolve_name(&anno.name, ns, &element) {
                        if self.qualifier_fqns.contains(&qfqn) {
                            let q = self.qualifier_value(&qfqn, anno, &ctx)?;
                            if def.qualifiers.iter().any(|x| x.qualifier == q.qualifier) {
                                return Err(ResolveError::ConflictingAnnotation {
                                    element,
                                    annotation: anno.name.clone(),
                                });
                            }
                            def.qualifiers.push(q);
                            continue;
                        }
                    }
                    def.extras.push(opaque(anno));
                }
            }
        }
        Ok(def)
    }

    /// Resolves `@Qualifier{VALUE}` against the qualifier struct's value
    /// enum (its first field must be enum-typed).
    fn qualifier_value(
        &self,
        qualifier_fqn: &str,
        anno: &AstAnnotation,
        ctx: &AnnoCtx,
    ) -> Result<QualifierValue> {
        let AstDefinition::Struct(qs) = self.index[qualifier_fqn].def else {
            unreachable!("qualifier_fqns only holds structs");
        };
        let qns = self.index[qualifier_fqn].namespace;
        let enum_fqn = qs
            .fields
            .first()
            .and_then(|f| match &f.ty {
                TypeExpr::Named(n) => self.resolve_name(n, qns, qualifier_fqn).ok(),
                _ => None,
            })
            .filter(|fqn| self.enums.contains_key(fqn))
            .ok_or_else(|| ResolveError::InvalidAnnotation {
                element: format!("struct {qualifier_fqn}"),
                message: "a @SemanticQualifier struct needs an enum-typed first field".into(),
            })?;
        let value_name = match anno.positional() {
            Some(Literal::Path(p)) => p.clone(),
            _ => return Err(ctx.invalid(format!("@{} requires an enum value", anno.name))),
        };
        let value = self.enums[&enum_fqn].value_of(&value_name).ok_or_else(|| {
            ResolveError::InvalidAnnotation {
                element: ctx.element.clone(),
                message: format!("'{value_name}' is not a value of {enum_fqn}"),
            }
        })?;
        Ok(QualifierValue { qualifier: qualifier_fqn.to_string(), value_name, value })
    }

    /// Checks constraints that need the fully assembled universe.
    fn validate_universe(&mut self, types: &BTreeMap<String, TypeDef>) -> Result<()> {
        let probe = ResolvedSchema {
            root: String::new(),
            types: types.clone(),
            fingerprint_structural: 0,
            fingerprint_semantic: 0,
            lints: Vec::new(),
        };
        for def in types.values() {
            match def {
                TypeDef::Rich(rich) => {
                    for conv in &rich.conversions {
                        let Some(target) = probe.rich(&conv.target) else {
                            return Err(ResolveError::InvalidAnnotation {
                                element: format!("typedef {}", rich.fqn),
                                message: format!(
                                    "@Converts target '{}' is not a rich type",
                                    conv.target
                                ),
                            });
                        };
                        if rich.semantic_type.is_none()
                            || rich.semantic_type != target.semantic_type
                        {
                            return Err(ResolveError::InvalidAnnotation {
                                element: format!("typedef {}", rich.fqn),
                                message: format!(
                                    "@Converts target '{}' must share the semantic type",
                                    conv.target
                                ),
                            });
                        }
                    }
                }
                TypeDef::Composite(c) => {
                    for field in &c.fields {
                        if field.measurement && !probe.base_kind(&field.ty).is_numeric() {
                            return Err(ResolveError::InvalidAnnotation {
                                element: format!("field {}.{}", c.fqn, field.name),
                                message: "@Measurement requires a numeric base type".into(),
                            });
                        }
                        if field.semantic_type.is_some() {
                            let shadowed = probe
                                .rich_shadowed_semantic(&field.ty)
                                .filter(|s| Some(*s) != field.semantic_type.as_ref());
                            if let Some(shadowed) = shadowed {
                                self.lints.push(format!(
                                    "field {}.{}: field-level semantic type overrides '{}' from the rich type",
                                    c.fqn, field.name, shadowed
                                ));
                            }
                        }
                    }
                }
                TypeDef::Enum(_) => {}
            }
        }
        Ok(())
    }
}

impl ResolvedSchema {
    fn rich_shadowed_semantic(&self, ty: &TypeRef) -> Option<&SemanticTypeId> {
        let mut cur = ty;
        loop {
            match cur {
                TypeRef::Named(fqn) => match self.rich(fqn) {
                    Some(rt) => {
                        if let Some(s) = rt.semantic_type.as_ref() {
                            return Some(s);
                        }
                        cur = &rt.base;
                    }
                    None => return None,
                },
                _ => return None,
            }
        }
    }
}

struct RawComposite {
    embeds: Vec<String>,
    own_fields: Vec<FieldDef>,
    display_name: Option<String>,
    description: Option<String>,
    semantic_qualifier: bool,
    extras: Vec<OpaqueAnnotation>,
}

/// Flattens `fqn`'s embeds depth-first in declaration order: embedded
/// fields first (with their original `origin`), own fields after.
fn flatten_into(
    fqn: &str,
    raw: &BTreeMap<String, RawComposite>,
    done: &mut BTreeMap<String, Vec<FieldDef>>,
) -> Result<()> {
    if done.contains_key(fqn) {
        return Ok(());
    }
    let rc = &raw[fqn];
    let mut fields: Vec<FieldDef> = Vec::new();
    for embed in &rc.embeds {
        flatten_into(embed, raw, done)?;
        for field in &done[embed] {
            push_checked(fqn, field.clone(), &mut fields)?;
        }
    }
    for field in &rc.own_fields {
        push_checked(fqn, field.clone(), &mut fields)?;
    }
    done.insert(fqn.to_string(), fields);
    Ok(())
}

fn push_checked(owner: &str, field: FieldDef, fields: &mut Vec<FieldDef>) -> Result<()> {
    if let Some(existing) = fields.iter().find(|f| f.id == field.id) {
        return Err(ResolveError::DuplicateFieldAfterFlatten {
            composite: owner.to_string(),
            detail: format!(
                "field id {} declared by both {} and {}",
                field.id, existing.origin, field.origin
            ),
        });
    }
    if let Some(existing) = fields.iter().find(|f| f.name == field.name) {
        return Err(ResolveError::DuplicateFieldAfterFlatten {
            composite: owner.to_string(),
            detail: format!(
                "field name '{}' declared by both {} and {}",
                field.name, existing.origin, field.origin
            ),
        });
    }
    fields.push(field);
    Ok(())
}

/// Everything reachable from the root: field types, rich-type bases and
/// conversion targets, qualifier types, and flattening origins.
fn reachable_closure(
    universe: &BTreeMap<String, TypeDef>,
    root: &str,
) -> BTreeMap<String, TypeDef> {
    let mut keep: BTreeMap<String, TypeDef> = BTreeMap::new();
    let mut work = vec![root.to_string()];
    while let Some(fqn) = work.pop() {
        if keep.contains_key(&fqn) {
            continue;
        }
        let Some(def) = universe.get(&fqn) else { continue };
        keep.insert(fqn.clone(), def.clone());
        match def {
            TypeDef::Composite(c) => {
                for field in &c.fields {
                    collect_named(&field.ty, &mut work);
                    for q in &field.qualifiers {
                        work.push(q.qualifier.clone());
                    }
                    work.push(field.origin.clone());
                }
            }
            TypeDef::Rich(rich) => {
                collect_named(&rich.base, &mut work);
                for conv in &rich.conversions {
                    work.push(conv.target.clone());
                }
            }
            TypeDef::Enum(_) => {}
        }
    }
    keep
}

fn collect_named(ty: &TypeRef, out: &mut Vec<String>) {
    match ty {
        TypeRef::Named(fqn) => out.push(fqn.clone()),
        TypeRef::List(t) => collect_named(t, out),
        TypeRef::Map(k, v) => {
            collect_named(k, out);
            collect_named(v, out);
        }
        _ => {}
    }
}

/// Annotation names the resolver interprets; everything else is opaque.
const BUILTIN: &[&str] = &[
    "DisplayName",
    "Description",
    "SemanticType",
    "SemanticQualifier",
    "Unit",
    "Validate",
    "Privacy",
    "Measurement",
    "Converts",
    "AllowedOps",
];

fn opaque(anno: &AstAnnotation) -> OpaqueAnnotation {
    OpaqueAnnotation {
        name: anno.name.clone(),
        args: anno
            .args
            .iter()
            .map(|a| {
                let value = match &a.value {
                    Literal::Str(s) => OpaqueValue::Str(s.clone()),
                    Literal::Int(n) => OpaqueValue::Int(*n),
                    Literal::Path(p) => OpaqueValue::Path(p.clone()),
                };
                (a.key.clone(), value)
            })
            .collect(),
    }
}

/// Per-element annotation bookkeeping: duplicate detection and literal
/// extraction with consistent errors.
struct AnnoCtx {
    element: String,
    seen: HashSet<String>,
}

impl AnnoCtx {
    fn new(element: String) -> Self {
        Self { element, seen: HashSet::new() }
    }

    fn once(&mut self, anno: &AstAnnotation) -> Result<()> {
        if !self.seen.insert(anno.name.clone()) {
            return Err(ResolveError::ConflictingAnnotation {
                element: self.element.clone(),
                annotation: anno.name.clone(),
            });
        }
        Ok(())
    }

    fn invalid(&self, message: impl Into<String>) -> ResolveError {
        ResolveError::InvalidAnnotation { element: self.element.clone(), message: message.into() }
    }

    fn misplaced(&self, name: &str) -> ResolveError {
        self.invalid(format!("@{name} is not valid here"))
    }

    /// `@DisplayName{"..."}` and `@DisplayName{name="..."}` are equivalent.
    fn display_name(&mut self, anno: &AstAnnotation) -> Result<String> {
        self.once(anno)?;
        match (anno.positional(), anno.keyed("name")) {
            (Some(Literal::Str(s)), None) | (None, Some(Literal::Str(s))) => Ok(s.clone()),
            _ => Err(self.invalid("@DisplayName takes one string")),
        }
    }

    fn description(&mut self, anno: &AstAnnotation) -> Result<String> {
        self.once(anno)?;
        self.positional_str(anno)
    }

    fn positional_str(&self, anno: &AstAnnotation) -> Result<String> {
        match anno.positional() {
            Some(Literal::Str(s)) if anno.args.len() == 1 => Ok(s.clone()),
            _ => Err(self.invalid(format!("@{} takes one string", anno.name))),
        }
    }

    fn positional_path(&self, anno: &AstAnnotation) -> Result<String> {
        match anno.positional() {
            Some(Literal::Path(p)) if anno.args.len() == 1 => Ok(p.clone()),
            _ => Err(self.invalid(format!("@{} takes one dotted path", anno.name))),
        }
    }
}
