//! The `.model` file format: line-oriented declarations followed by named
//! blocks.
//!
//! ```text
//! # comment
//! coords t x
//! field A_0 even            # a single field
//! field A[mu] even          # a vector family, expanded to A_0 .. A_{n-1}
//! field B[mu<nu] even       # an antisymmetric family: B_01, B_02, ...
//! max-jet-order 6           # optional input bound, default 8
//! lagrangian <expr>
//! density <name> = <expr>
//! noether <name> stage <k> {
//!   <field> [t x] = <expr>          # stage 0 coefficient
//!   op <name> [x] = <expr>          # stage >= 1 coefficient
//!   h <field> [] <field> [] = <expr>     # stage 1 bilinear term
//!   h op <name> [] <field> [] = <expr>   # stage >= 2 bilinear term
//! }
//! symmetry <name> {
//!   field <field> = <expr>
//!   coord <coord> = <expr>
//! }
//! ```
//!
//! Families expand to independent scalar components at declaration time, so
//! expressions always reference plain component names.

use std::collections::BTreeMap;

use crate::derivation::GradedDerivation;
use crate::form::GradedForm;
use crate::index::MultiIndex;
use crate::model::Model;
use crate::noether::{NoetherOperator, NoetherTower, Slot};
use crate::parity::Parity;
use crate::parser::{parse_value, ParseError, Span, Value};
use crate::scalar::GradedScalar;
use crate::variational::Lagrangian;

#[derive(Debug)]
pub struct ModelFile {
    pub model: Model,
    pub lagrangian: Option<Lagrangian>,
    pub tower: NoetherTower,
    pub symmetries: Vec<(String, GradedDerivation)>,
    pub densities: Vec<(String, GradedForm)>,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        span: Span { line, col: 1 },
        message: message.into(),
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_parity(word: &str, line: usize) -> Result<Parity, ParseError> {
    match word {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => fail(line, format!("expected `even` or `odd`, found `{other}`")),
    }
}

/// Splits a block line into head tokens (with `[...]` index groups kept
/// intact) and the expression after `=`.
fn split_assignment(line: &str, lineno: usize) -> Result<(Vec<String>, String), ParseError> {
    let Some(eq) = line.find('=') else {
        return fail(lineno, "expected `<target> = <expression>`");
    };
    let head = &line[..eq];
    let expr = line[eq + 1..].trim().to_string();
    if expr.is_empty() {
        return fail(lineno, "missing expression after `=`");
    }
    let mut tokens = Vec::new();
    let mut rest = head.trim();
    while !rest.is_empty() {
        if let Some(inner) = rest.strip_prefix('[') {
            let Some(close) = inner.find(']') else {
                return fail(lineno, "unclosed `[`");
            };
            tokens.push(format!("[{}]", &inner[..close]));
            rest = inner[close + 1..].trim_start();
        } else {
            let cut = rest.find([' ', '\t', '[']).unwrap_or(rest.len());
            tokens.push(rest[..cut].to_string());
            rest = rest[cut..].trim_start();
            if rest.starts_with('[') {
                continue;
            }
        }
    }
    Ok((tokens, expr))
}

fn parse_index(token: &str, model: &Model, line: usize) -> Result<MultiIndex, ParseError> {
    let Some(inner) = token.strip_prefix('[').and_then(|t| t.strip_suffix(']')) else {
        return fail(line, format!("expected `[indices]`, found `{token}`"));
    };
    let mut entries = Vec::new();
    for word in inner.split_whitespace() {
        match model.coord_index(word) {
            Some(i) => entries.push(i),
            None => return fail(line, format!("unknown coordinate `{word}`")),
        }
    }
    Ok(MultiIndex::new(entries))
}

fn expand_family(
    model: &mut Model,
    decl: &str,
    parity: Parity,
    line: usize,
) -> Result<(), ParseError> {
    let declare = |model: &mut Model, name: &str| -> Result<(), ParseError> {
        model
            .declare_field(name, parity)
            .map_err(|e| ParseError {
                span: Span { line, col: 1 },
                message: e.to_string(),
            })
            .map(|_| ())
    };
    let n = model.dim();
    match decl.find('[') {
        None => declare(model, decl),
        Some(open) => {
            let base = &decl[..open];
            let Some(inner) = decl[open + 1..].strip_suffix(']') else {
                return fail(line, "unclosed `[` in a field family");
            };
            if let Some((_, _)) = inner.split_once("<=") {
                for i in 0..n {
                    for j in i..n {
                        declare(model, &format!("{base}_{i}{j}"))?;
                    }
                }
                Ok(())
            } else if let Some((_, _)) = inner.split_once('<') {
                for i in 0..n {
                    for j in (i + 1)..n {
                        declare(model, &format!("{base}_{i}{j}"))?;
                    }
                }
                Ok(())
            } else {
                for i in 0..n {
                    declare(model, &format!("{base}_{i}"))?;
                }
                Ok(())
            }
        }
    }
}

fn scalar_expr(
    text: &str,
    model: &Model,
    line: usize,
) -> Result<GradedScalar, ParseError> {
    parse_value(text, model, line)?.into_scalar(Span { line, col: 1 })
}

pub fn load_model_file(text: &str) -> Result<ModelFile, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut model: Option<Model> = None;
    let mut max_jet_order: Option<usize> = None;
    let mut pending_fields: Vec<(String, Parity, usize)> = Vec::new();
    let mut lagrangian_line: Option<(String, usize)> = None;
    let mut density_lines: Vec<(String, String, usize)> = Vec::new();
    struct Block {
        kind: BlockKind,
        header_line: usize,
        body: Vec<(usize, String)>,
    }
    enum BlockKind {
        Noether { name: String, stage: usize },
        Symmetry { name: String },
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut open: Option<Block> = None;

    for (i, raw) in lines.iter().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(block) = open.as_mut() {
            if line == "}" {
                blocks.push(open.take().unwrap());
            } else {
                block.body.push((lineno, line.to_string()));
            }
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "coords" => {
                if model.is_some() {
                    return fail(lineno, "`coords` declared twice");
                }
                if words.len() < 2 {
                    return fail(lineno, "`coords` needs at least one name");
                }
                model = Some(Model::new(&words[1..]));
            }
            "dim" => {
                // informational; validated against `coords` later
                if words.len() != 2 || words[1].parse::<usize>().is_err() {
                    return fail(lineno, "`dim` takes one integer");
                }
            }
            "max-jet-order" => {
                let Some(k) = words.get(1).and_then(|w| w.parse().ok()) else {
                    return fail(lineno, "`max-jet-order` takes one integer");
                };
                max_jet_order = Some(k);
            }
            "field" => {
                if words.len() != 3 {
                    return fail(lineno, "expected `field <name> <parity>`");
                }
                let parity = parse_parity(words[2], lineno)?;
                pending_fields.push((words[1].to_string(), parity, lineno));
            }
            "lagrangian" => {
                if lagrangian_line.is_some() {
                    return fail(lineno, "`lagrangian` declared twice");
                }
                let rest = line["lagrangian".len()..].trim();
                if rest.is_empty() {
                    return fail(lineno, "`lagrangian` needs an expression");
                }
                lagrangian_line = Some((rest.to_string(), lineno));
            }
            "density" => {
                let rest = line["density".len()..].trim();
                let Some((name, expr)) = rest.split_once('=') else {
                    return fail(lineno, "expected `density <name> = <expr>`");
                };
                density_lines.push((
                    name.trim().to_string(),
                    expr.trim().to_string(),
                    lineno,
                ));
            }
            "noether" => {
                // noether <name> stage <k> {
                if words.len() != 5 || words[2] != "stage" || words[4] != "{" {
                    return fail(lineno, "expected `noether <name> stage <k> {`");
                }
                let Ok(stage) = words[3].parse::<usize>() else {
                    return fail(lineno, "stage must be a non-negative integer");
                };
                open = Some(Block {
                    kind: BlockKind::Noether {
                        name: words[1].to_string(),
                        stage,
                    },
                    header_line: lineno,
                    body: Vec::new(),
                });
            }
            "symmetry" => {
                if words.len() != 3 || words[2] != "{" {
                    return fail(lineno, "expected `symmetry <name> {`");
                }
                open = Some(Block {
                    kind: BlockKind::Symmetry {
                        name: words[1].to_string(),
                    },
                    header_line: lineno,
                    body: Vec::new(),
                });
            }
            other => return fail(lineno, format!("unknown declaration `{other}`")),
        }
    }
    if let Some(block) = open {
        return fail(block.header_line, "unterminated block (missing `}`)");
    }

    let Some(mut model) = model else {
        return fail(1, "missing `coords` declaration");
    };
    if let Some(k) = max_jet_order {
        model = model.with_max_jet_order(k);
    }
    for (decl, parity, lineno) in &pending_fields {
        expand_family(&mut model, decl, *parity, *lineno)?;
    }

    let lagrangian = match &lagrangian_line {
        None => None,
        Some((text, lineno)) => {
            let density = scalar_expr(text, &model, *lineno)?;
            Some(Lagrangian::new(density, &model).map_err(|e| ParseError {
                span: Span {
                    line: *lineno,
                    col: 1,
                },
                message: e.to_string(),
            })?)
        }
    };

    // operator names per stage, for slot resolution
    let mut stage_names: Vec<Vec<String>> = Vec::new();
    let mut tower = NoetherTower::default();
    let mut symmetries = Vec::new();

    for block in &blocks {
        match &block.kind {
            BlockKind::Noether { name, stage } => {
                if *stage != tower.stages.len() && *stage + 1 != tower.stages.len() + 1 {
                    // handled below; stages may repeat while contiguous
                }
                if *stage > tower.stages.len() {
                    return fail(
                        block.header_line,
                        format!(
                            "stage {} declared before stage {}",
                            stage,
                            tower.stages.len()
                        ),
                    );
                }
                if *stage == tower.stages.len() {
                    tower.stages.push(Vec::new());
                    stage_names.push(Vec::new());
                }
                let mut op = NoetherOperator::new(name);
                for (lineno, body) in &block.body {
                    let (head, expr) = split_assignment(body, *lineno)?;
                    let coeff = scalar_expr(&expr, &model, *lineno)?;
                    match head.first().map(|s| s.as_str()) {
                        Some("op") => {
                            if *stage == 0 {
                                return fail(
                                    *lineno,
                                    "stage-0 coefficients address fields, not operators",
                                );
                            }
                            if head.len() != 3 {
                                return fail(*lineno, "expected `op <name> [indices] = <expr>`");
                            }
                            let target = resolve_op(&stage_names, *stage - 1, &head[1], *lineno)?;
                            let idx = parse_index(&head[2], &model, *lineno)?;
                            op.coeffs.insert((target, idx), coeff);
                        }
                        Some("h") => {
                            let (first, rest) = match head.get(1).map(|s| s.as_str()) {
                                Some("op") => {
                                    if *stage < 2 {
                                        return fail(
                                            *lineno,
                                            "`h op ...` needs a stage of at least 2",
                                        );
                                    }
                                    if head.len() != 6 {
                                        return fail(
                                            *lineno,
                                            "expected `h op <name> [idx] <field> [idx] = <expr>`",
                                        );
                                    }
                                    let slot =
                                        resolve_op(&stage_names, *stage - 2, &head[2], *lineno)?;
                                    ((slot, parse_index(&head[3], &model, *lineno)?), &head[4..])
                                }
                                Some(_) => {
                                    if *stage != 1 {
                                        return fail(
                                            *lineno,
                                            "`h <field> ...` is the stage-1 shape",
                                        );
                                    }
                                    if head.len() != 5 {
                                        return fail(
                                            *lineno,
                                            "expected `h <field> [idx] <field> [idx] = <expr>`",
                                        );
                                    }
                                    let gen =
                                        model.resolve(&head[1]).map_err(|e| ParseError {
                                            span: Span {
                                                line: *lineno,
                                                col: 1,
                                            },
                                            message: e.to_string(),
                                        })?;
                                    (
                                        (Slot::Field(gen), parse_index(&head[2], &model, *lineno)?),
                                        &head[3..],
                                    )
                                }
                                None => return fail(*lineno, "incomplete `h` line"),
                            };
                            let field = model.resolve(&rest[0]).map_err(|e| ParseError {
                                span: Span {
                                    line: *lineno,
                                    col: 1,
                                },
                                message: e.to_string(),
                            })?;
                            let idx = parse_index(&rest[1], &model, *lineno)?;
                            op.h_terms.insert((first, (field, idx)), coeff);
                        }
                        Some(field_name) => {
                            if *stage != 0 {
                                return fail(
                                    *lineno,
                                    "coefficients above stage 0 address operators: `op <name> ...`",
                                );
                            }
                            if head.len() != 2 {
                                return fail(*lineno, "expected `<field> [indices] = <expr>`");
                            }
                            let gen = model.resolve(field_name).map_err(|e| ParseError {
                                span: Span {
                                    line: *lineno,
                                    col: 1,
                                },
                                message: e.to_string(),
                            })?;
                            let idx = parse_index(&head[1], &model, *lineno)?;
                            op.coeffs.insert((Slot::Field(gen), idx), coeff);
                        }
                        None => return fail(*lineno, "empty operator line"),
                    }
                }
                stage_names[*stage].push(name.clone());
                tower.stages[*stage].push(op);
            }
            BlockKind::Symmetry { name } => {
                let dim = model.dim();
                let mut horizontal: Vec<GradedScalar> =
                    (0..dim).map(|_| GradedScalar::zero(dim)).collect();
                let mut vertical = BTreeMap::new();
                let mut parity: Option<Parity> = None;
                for (lineno, body) in &block.body {
                    let (head, expr) = split_assignment(body, *lineno)?;
                    let coeff = scalar_expr(&expr, &model, *lineno)?;
                    if head.len() != 2 {
                        return fail(*lineno, "expected `field <name> = <expr>` or `coord <name> = <expr>`");
                    }
                    match head[0].as_str() {
                        "field" => {
                            let gen = model.resolve(&head[1]).map_err(|e| ParseError {
                                span: Span {
                                    line: *lineno,
                                    col: 1,
                                },
                                message: e.to_string(),
                            })?;
                            if let Some(p) = coeff.parity() {
                                if !coeff.is_zero() {
                                    let implied = p + model.generator(gen).parity;
                                    parity.get_or_insert(implied);
                                }
                            }
                            vertical.insert(gen, coeff);
                        }
                        "coord" => {
                            let Some(i) = model.coord_index(&head[1]) else {
                                return fail(*lineno, format!("unknown coordinate `{}`", head[1]));
                            };
                            if let Some(p) = coeff.parity() {
                                if !coeff.is_zero() {
                                    parity.get_or_insert(p);
                                }
                            }
                            horizontal[i as usize] = coeff;
                        }
                        other => {
                            return fail(*lineno, format!("unknown symmetry entry `{other}`"))
                        }
                    }
                }
                let v = GradedDerivation {
                    parity: parity.unwrap_or(Parity::Even),
                    horizontal,
                    vertical,
                };
                v.validate(&model).map_err(|e| ParseError {
                    span: Span {
                        line: block.header_line,
                        col: 1,
                    },
                    message: e.to_string(),
                })?;
                symmetries.push((name.clone(), v));
            }
        }
    }

    let mut densities = Vec::new();
    for (name, expr, lineno) in &density_lines {
        let v = parse_value(expr, &model, *lineno)?;
        let f = match v {
            Value::Form(f) => f,
            // a bare scalar density means (scalar) * volume
            Value::Scalar(s) => GradedForm::volume(model.dim()).mul_scalar_left(&s),
        };
        densities.push((name.clone(), f));
    }

    Ok(ModelFile {
        model,
        lagrangian,
        tower,
        symmetries,
        densities,
    })
}

fn resolve_op(
    stage_names: &[Vec<String>],
    stage: usize,
    name: &str,
    line: usize,
) -> Result<Slot, ParseError> {
    let Some(names) = stage_names.get(stage) else {
        return fail(line, format!("no operators declared at stage {stage}"));
    };
    match names.iter().position(|n| n == name) {
        Some(index) => Ok(Slot::Op { stage, index }),
        None => fail(line, format!("unknown stage-{stage} operator `{name}`")),
    }
}
