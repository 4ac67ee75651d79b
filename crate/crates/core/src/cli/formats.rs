//! Text formats for graphs, divisors and groups.
//!
//! All formats are line based; `#` starts a comment and blank lines are
//! ignored.
//!
//! ```text
//! vertex x
//! vertex y
//! edge e x y 1/2
//!
//! chip v:x 1
//! chip e:e@1/4 -2
//!
//! auto
//! rotate 2
//! reflect v:x v:xp
//! map vx->y vy->x ; ee->e-
//! chains c0->c1+ c1->c0+
//! ```

use std::sync::Arc;

use crate::automorphism::{compute_aut, subgroup_generated, Automorphism, ChainImage, FiniteGroup, Skeleton};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::metric_graph::{Edge, Model};
use crate::rational::{parse_q, zero};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    for (line, words) in content_lines(text) {
        match words.as_slice() {
            ["vertex", id] => {
                if names.iter().any(|n| n == id) {
                    return Err(parse_err(line, format!("duplicate vertex `{id}`")));
                }
                names.push(id.to_string());
            }
            ["edge", id, a, b, len] => {
                let end = |v: &str| {
                    names
                        .iter()
                        .position(|n| n == v)
                        .ok_or_else(|| parse_err(line, format!("unknown vertex `{v}`")))
                };
                let length = parse_q(len).map_err(|e| match e {
                    Error::Parse { msg, .. } => parse_err(line, msg),
                    other => other,
                })?;
                edges.push(Edge { name: id.to_string(), ends: [end(a)?, end(b)?], length });
            }
            _ => return Err(parse_err(line, "expected `vertex <id>` or `edge <id> <v1> <v2> <length>`")),
        }
    }
    Model::new(names, edges)
}

pub fn parse_divisor(m: &Model, text: &str) -> Result<Divisor> {
    let mut d = Divisor::zero();
    for (line, words) in content_lines(text) {
        match words.as_slice() {
            ["chip", point, n] => {
                let p = m.parse_point(point).map_err(|e| parse_err(line, e.to_string()))?;
                let c: i64 = n.parse().map_err(|_| parse_err(line, format!("bad chip count `{n}`")))?;
                d.add_chips(p, c);
            }
            _ => return Err(parse_err(line, "expected `chip <point> <n>`")),
        }
    }
    Ok(d)
}

/// How a group file describes its group.
#[derive(Clone, Debug)]
pub enum GroupSpec {
    Auto,
    Generated(Vec<Automorphism>),
}

pub fn parse_group(m: &Arc<Model>, text: &str) -> Result<GroupSpec> {
    let skeleton = Skeleton::new(m.clone());
    let mut gens = Vec::new();
    let mut auto = false;
    for (line, words) in content_lines(text) {
        let wrap = |e: Error| parse_err(line, e.to_string());
        match words.as_slice() {
            ["auto"] => auto = true,
            ["rotate", r] => {
                let r = parse_q(r).map_err(wrap)?;
                gens.push(Automorphism::rotation(&skeleton, &r).map_err(wrap)?);
            }
            ["reflect", a, b] => {
                let a = m.parse_point(a).map_err(wrap)?;
                let b = m.parse_point(b).map_err(wrap)?;
                gens.push(Automorphism::reflection(&skeleton, &a, &b).map_err(wrap)?);
            }
            ["map", rest @ ..] => gens.push(parse_map(m, &skeleton, rest).map_err(wrap)?),
            ["chains", rest @ ..] => gens.push(parse_chains(&skeleton, rest).map_err(wrap)?),
            _ => return Err(parse_err(line, "expected `auto`, `rotate`, `reflect`, `map` or `chains`")),
        }
    }
    match (auto, gens.is_empty()) {
        (true, true) => Ok(GroupSpec::Auto),
        (true, false) => Err(parse_err(0, "`auto` cannot be combined with explicit generators")),
        (false, _) => Ok(GroupSpec::Generated(gens)),
    }
}

fn split_arrow(tok: &str) -> Result<(&str, &str)> {
    tok.split_once("->").ok_or_else(|| Error::InvalidAutomorphism(format!("expected `a->b`, got `{tok}`")))
}

fn parse_map(m: &Model, skeleton: &Arc<Skeleton>, words: &[&str]) -> Result<Automorphism> {
    let bad = |msg: String| Error::InvalidAutomorphism(msg);
    let sep = words.iter().position(|w| *w == ";").ok_or_else(|| bad("missing `;` between vertex and edge maps".into()))?;
    let mut vmap: Vec<Option<usize>> = vec![None; m.num_vertices()];
    for tok in &words[..sep] {
        let (a, b) = split_arrow(tok.strip_prefix('v').ok_or_else(|| bad(format!("expected `v<a>-><b>`, got `{tok}`")))?)?;
        let ia = m.vertex_index(a).ok_or_else(|| bad(format!("unknown vertex `{a}`")))?;
        let ib = m.vertex_index(b).ok_or_else(|| bad(format!("unknown vertex `{b}`")))?;
        vmap[ia] = Some(ib);
    }
    let mut emap: Vec<Option<(usize, bool)>> = vec![None; m.num_edges()];
    for tok in &words[sep + 1..] {
        let body = tok.strip_prefix('e').ok_or_else(|| bad(format!("expected `e<a>-><b>[+|-]`, got `{tok}`")))?;
        let (body, rev) = match body.strip_suffix('-') {
            Some(b) => (b, true),
            None => (body.strip_suffix('+').unwrap_or(body), false),
        };
        let (a, b) = split_arrow(body)?;
        let ia = m.edge_index(a).ok_or_else(|| bad(format!("unknown edge `{a}`")))?;
        let ib = m.edge_index(b).ok_or_else(|| bad(format!("unknown edge `{b}`")))?;
        emap[ia] = Some((ib, rev));
    }
    let vmap = vmap
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or_else(|| bad(format!("vertex `{}` is not mapped", m.vertex_name(v)))))
        .collect::<Result<Vec<_>>>()?;
    let emap = emap
        .into_iter()
        .enumerate()
        .map(|(e, f)| f.ok_or_else(|| bad(format!("edge `{}` is not mapped", m.edge(e).name))))
        .collect::<Result<Vec<_>>>()?;
    Automorphism::from_explicit(skeleton, &vmap, &emap)
}

fn parse_chains(skeleton: &Arc<Skeleton>, words: &[&str]) -> Result<Automorphism> {
    let bad = |msg: String| Error::InvalidAutomorphism(msg);
    let mut images: Vec<Option<ChainImage>> = vec![None; skeleton.num_chains()];
    for tok in words {
        let body = tok.strip_prefix('c').ok_or_else(|| bad(format!("expected `c<i>->c<j>[+|-]`, got `{tok}`")))?;
        let (body, reversed) = match body.strip_suffix('-') {
            Some(b) => (b, true),
            None => (body.strip_suffix('+').unwrap_or(body), false),
        };
        let (a, b) = split_arrow(body)?;
        let index = |s: &str| -> Result<usize> {
            s.trim_start_matches('c')
                .parse::<usize>()
                .ok()
                .filter(|&i| i < skeleton.num_chains())
                .ok_or_else(|| bad(format!("bad chain index `{s}`")))
        };
        let (ia, ib) = (index(a)?, index(b)?);
        let shift = if reversed { skeleton.chain_length(ib).clone() } else { zero() };
        images[ia] = Some(ChainImage { target: ib, reversed, shift });
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(c, im)| im.ok_or_else(|| bad(format!("chain c{c} is not mapped"))))
        .collect::<Result<Vec<_>>>()?;
    Automorphism::from_images(skeleton, images)
}

/// Resolves a group description on `m`.
pub fn resolve_group(m: &Arc<Model>, spec: &GroupSpec) -> Result<FiniteGroup> {
    match spec {
        GroupSpec::Auto => compute_aut(m),
        GroupSpec::Generated(gens) => subgroup_generated(&Skeleton::new(m.clone()), gens),
    }
}

/// One line per group element, readable by [`parse_group`].
pub fn group_to_text(g: &FiniteGroup) -> String {
    g.elements().iter().map(|s| format!("{}\n", s.describe())).collect()
}
