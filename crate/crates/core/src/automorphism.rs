//! Isometric automorphisms of metric graphs and finite groups of them.
//!
//! Automorphisms are stored on the canonical model, whose vertices are the
//! points of valence other than two and whose edges ("chains") are maximal
//! paths through valence-2 vertices of the input model. Each chain maps to a
//! chain of the same length, either preserving or reversing its direction. A
//! circle has no essential vertex; it is a single closed chain on which
//! rotations `t ↦ t + c` and reflections `t ↦ c - t` act modulo its length.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::metric_graph::{Edge, Model, Point};
use crate::rational::{fmt_q, frac, rem_euclid, zero, Q};

/// Upper bound on the size of any group built by closure or search.
pub const GROUP_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Segment {
    edge: usize,
    forward: bool,
    start: Q,
    length: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Chain {
    start: usize,
    end: usize,
    length: Q,
    segments: Vec<Segment>,
}

/// Chain decomposition of a model.
#[derive(Debug, PartialEq, Eq)]
pub struct Skeleton {
    model: Arc<Model>,
    chains: Vec<Chain>,
    essential: Vec<usize>,
    circle: bool,
    edge_pos: Vec<(usize, usize)>,
    vertex_anchor: Vec<(usize, Q)>,
}

impl Skeleton {
    pub fn new(model: Arc<Model>) -> Arc<Self> {
        let m = &*model;
        let circle = m.is_circle();
        let essential: Vec<usize> = (0..m.num_vertices()).filter(|&v| m.incidence(v).len() != 2).collect();
        let is_stop = |w: usize, start: usize| if circle { w == start } else { m.incidence(w).len() != 2 };
        let mut used = vec![false; m.num_edges()];
        let mut chains = Vec::new();
        let mut edge_pos = vec![(0, 0); m.num_edges()];
        let mut vertex_anchor: Vec<Option<(usize, Q)>> = vec![None; m.num_vertices()];
        let starts: Vec<usize> = if circle { vec![0] } else { essential.clone() };
        for &v in &starts {
            for &(e0, end0) in m.incidence(v) {
                if used[e0] {
                    continue;
                }
                let ci = chains.len();
                let (mut e, mut end, mut t) = (e0, end0, zero());
                let mut segments = Vec::new();
                let finish = loop {
                    used[e] = true;
                    let len = m.edge(e).length.clone();
                    edge_pos[e] = (ci, segments.len());
                    segments.push(Segment { edge: e, forward: end == 0, start: t.clone(), length: len.clone() });
                    t += len;
                    let w = m.edge(e).ends[1 - end];
                    if is_stop(w, v) {
                        break w;
                    }
                    vertex_anchor[w] = Some((ci, t.clone()));
                    let inc = m.incidence(w);
                    let next = if inc[0] == (e, 1 - end) { inc[1] } else { inc[0] };
                    e = next.0;
                    end = next.1;
                };
                if vertex_anchor[v].is_none() {
                    vertex_anchor[v] = Some((ci, zero()));
                }
                if vertex_anchor[finish].is_none() {
                    vertex_anchor[finish] = Some((ci, t.clone()));
                }
                chains.push(Chain { start: v, end: finish, length: t, segments });
            }
        }
        let vertex_anchor = vertex_anchor.into_iter().map(|a| a.expect("every vertex lies on a chain")).collect();
        Arc::new(Self { model, chains, essential, circle, edge_pos, vertex_anchor })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn model_arc(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn is_circle(&self) -> bool {
        self.circle
    }

    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn chain_length(&self, c: usize) -> &Q {
        &self.chains[c].length
    }

    /// Chain coordinate `(chain, t)` of a point.
    pub fn to_chain(&self, p: &Point) -> (usize, Q) {
        match p {
            Point::Vertex(v) => self.vertex_anchor[*v].clone(),
            Point::OnEdge { edge, offset } => {
                let (c, s) = self.edge_pos[*edge];
                let seg = &self.chains[c].segments[s];
                let t = if seg.forward { &seg.start + offset } else { &seg.start + (&seg.length - offset) };
                (c, t)
            }
        }
    }

    pub fn from_chain(&self, c: usize, t: &Q) -> Point {
        let chain = &self.chains[c];
        let t = if self.circle { rem_euclid(t, &chain.length) } else { t.clone() };
        if t == zero() {
            return Point::Vertex(chain.start);
        }
        if t == chain.length {
            return Point::Vertex(chain.end);
        }
        let idx = chain.segments.partition_point(|s| s.start <= t) - 1;
        let seg = &chain.segments[idx];
        let local = &t - &seg.start;
        let offset = if seg.forward { local } else { &seg.length - local };
        self.model.point_on_edge(seg.edge, offset).expect("offset inside the edge")
    }

    /// The canonical model: essential vertices joined by chains. A circle
    /// becomes a single vertex with one loop and is flagged.
    pub fn canonical_model(&self) -> CanonicalModel {
        let m = &*self.model;
        let (names, index): (Vec<String>, HashMap<usize, usize>) = if self.circle {
            (vec![m.vertex_name(0).to_string()], HashMap::from([(0, 0)]))
        } else {
            (
                self.essential.iter().map(|&v| m.vertex_name(v).to_string()).collect(),
                self.essential.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
            )
        };
        let edges = self
            .chains
            .iter()
            .map(|c| Edge {
                name: c.segments.iter().map(|s| m.edge(s.edge).name.as_str()).join("+"),
                ends: [index[&c.start], index[&c.end]],
                length: c.length.clone(),
            })
            .collect();
        CanonicalModel { model: Model::new(names, edges).expect("canonical model is valid"), circle: self.circle }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalModel {
    pub model: Model,
    pub circle: bool,
}

pub fn canonical_model(m: &Model) -> CanonicalModel {
    Skeleton::new(Arc::new(m.clone())).canonical_model()
}

/// Per edge: image edge and whether it is traversed backwards.
pub type EdgeMap = Vec<(usize, bool)>;

/// Image of a chain: `t ↦ ±t + shift` onto `target` (modulo length on a circle).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainImage {
    pub target: usize,
    pub reversed: bool,
    pub shift: Q,
}

impl ChainImage {
    fn apply(&self, t: &Q) -> Q {
        if self.reversed {
            &self.shift - t
        } else {
            &self.shift + t
        }
    }
}

#[derive(Clone, Debug)]
pub struct Automorphism {
    skeleton: Arc<Skeleton>,
    images: Vec<ChainImage>,
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for Automorphism {}

impl Hash for Automorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.images.hash(state);
    }
}

impl Automorphism {
    pub fn identity(skeleton: &Arc<Skeleton>) -> Self {
        let images = (0..skeleton.num_chains())
            .map(|c| ChainImage { target: c, reversed: false, shift: zero() })
            .collect();
        Self { skeleton: skeleton.clone(), images }
    }

    fn normalized(skeleton: &Arc<Skeleton>, mut images: Vec<ChainImage>) -> Self {
        if skeleton.circle {
            let len = skeleton.chains[0].length.clone();
            for im in &mut images {
                im.shift = rem_euclid(&im.shift, &len);
            }
        }
        Self { skeleton: skeleton.clone(), images }
    }

    /// Builds and validates an automorphism from chain images.
    pub fn from_images(skeleton: &Arc<Skeleton>, images: Vec<ChainImage>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidAutomorphism(msg.into()));
        if images.len() != skeleton.num_chains() {
            return bad("one image per chain required");
        }
        let mut seen = vec![false; images.len()];
        for (c, im) in images.iter().enumerate() {
            if im.target >= images.len() || seen[im.target] {
                return bad("chain map is not a bijection");
            }
            seen[im.target] = true;
            let (src, dst) = (&skeleton.chains[c], &skeleton.chains[im.target]);
            if src.length != dst.length {
                return bad("chain lengths differ");
            }
            if !skeleton.circle {
                let expect = if im.reversed { dst.length.clone() } else { zero() };
                if im.shift != expect {
                    return bad("chain must map end to end");
                }
            }
        }
        let sigma = Self::normalized(skeleton, images);
        if !skeleton.circle {
            // Incidence: all chain ends at one essential vertex land on one vertex.
            let mut vmap: HashMap<usize, Point> = HashMap::new();
            for (c, chain) in skeleton.chains.iter().enumerate() {
                for (v, t) in [(chain.start, zero()), (chain.end, chain.length.clone())] {
                    let img = skeleton.from_chain(sigma.images[c].target, &sigma.images[c].apply(&t));
                    if let Some(prev) = vmap.insert(v, img.clone()) {
                        if prev != img {
                            return bad("incidence is not preserved");
                        }
                    }
                }
            }
        }
        Ok(sigma)
    }

    /// Rotation of a circle by arc length `r`.
    pub fn rotation(skeleton: &Arc<Skeleton>, r: &Q) -> Result<Self> {
        if !skeleton.circle {
            return Err(Error::NotCircle);
        }
        Ok(Self::normalized(skeleton, vec![ChainImage { target: 0, reversed: false, shift: r.clone() }]))
    }

    /// Reflection of a circle fixing the antipodal points `a` and `b`.
    pub fn reflection(skeleton: &Arc<Skeleton>, a: &Point, b: &Point) -> Result<Self> {
        if !skeleton.circle {
            return Err(Error::NotCircle);
        }
        skeleton.model.check_point(a)?;
        skeleton.model.check_point(b)?;
        let len = skeleton.chains[0].length.clone();
        let ta = skeleton.to_chain(a).1;
        let tb = skeleton.to_chain(b).1;
        if rem_euclid(&(&tb - &ta), &len) != &len / Q::from_integer(2.into()) {
            return Err(Error::InvalidAutomorphism("reflection axis points must be antipodal".into()));
        }
        let two = Q::from_integer(2.into());
        Ok(Self::normalized(skeleton, vec![ChainImage { target: 0, reversed: true, shift: ta * two }]))
    }

    /// Builds an automorphism from a vertex permutation and an edge map with
    /// orientation flags on the input model.
    pub fn from_explicit(skeleton: &Arc<Skeleton>, vertex_map: &[usize], edge_map: &[(usize, bool)]) -> Result<Self> {
        let m = skeleton.model();
        let bad = |msg: String| Err(Error::InvalidAutomorphism(msg));
        if vertex_map.len() != m.num_vertices() || edge_map.len() != m.num_edges() {
            return bad("map must cover every vertex and edge".into());
        }
        if !vertex_map.iter().all_unique() || vertex_map.iter().any(|&v| v >= m.num_vertices()) {
            return bad("vertex map is not a bijection".into());
        }
        if !edge_map.iter().map(|e| e.0).all_unique() || edge_map.iter().any(|e| e.0 >= m.num_edges()) {
            return bad("edge map is not a bijection".into());
        }
        for (e, &(f, rev)) in edge_map.iter().enumerate() {
            let (src, dst) = (m.edge(e), m.edge(f));
            if src.length != dst.length {
                return bad(format!("edge `{}` maps to `{}` of different length", src.name, dst.name));
            }
            let image_ends = [vertex_map[src.ends[0]], vertex_map[src.ends[1]]];
            let expected = if rev { [dst.ends[1], dst.ends[0]] } else { dst.ends };
            if image_ends != expected {
                return bad(format!("edge `{}` does not map incidently onto `{}`", src.name, dst.name));
            }
        }
        let explicit = |p: &Point| -> Point {
            match p {
                Point::Vertex(v) => Point::Vertex(vertex_map[*v]),
                Point::OnEdge { edge, offset } => {
                    let (f, rev) = edge_map[*edge];
                    let o = if rev { &m.edge(f).length - offset } else { offset.clone() };
                    Point::OnEdge { edge: f, offset: o }
                }
            }
        };
        let mut images = Vec::with_capacity(skeleton.num_chains());
        for chain in &skeleton.chains {
            let seg = &chain.segments[0];
            let (t1, t2) = (&seg.start + &seg.length * frac(1, 4), &seg.start + &seg.length * frac(1, 2));
            let (c1, i1) = skeleton.to_chain(&explicit(&skeleton.from_chain(skeleton.chains.iter().position(|c| c == chain).unwrap(), &t1)));
            let (_, i2) = skeleton.to_chain(&explicit(&skeleton.from_chain(skeleton.chains.iter().position(|c| c == chain).unwrap(), &t2)));
            let quarter = &seg.length * frac(1, 4);
            let diff = &i2 - &i1;
            let forward = if skeleton.circle {
                rem_euclid(&diff, &skeleton.chains[c1].length) == quarter
            } else {
                diff == quarter
            };
            let shift = if forward { &i1 - &t1 } else { &i1 + &t1 };
            images.push(ChainImage { target: c1, reversed: !forward, shift });
        }
        let sigma = Self::from_images(skeleton, images)?;
        for (e, edge) in m.edges().iter().enumerate() {
            for k in 1..4 {
                let p = Point::OnEdge { edge: e, offset: &edge.length * frac(k, 4) };
                if sigma.act(&p) != explicit(&p) {
                    return bad(format!("map is not an isometry along edge `{}`", edge.name));
                }
            }
        }
        for (v, &w) in vertex_map.iter().enumerate() {
            if sigma.act(&Point::Vertex(v)) != Point::Vertex(w) {
                return bad(format!("vertex `{}` is not mapped consistently", m.vertex_name(v)));
            }
        }
        Ok(sigma)
    }

    pub fn skeleton(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn model(&self) -> &Model {
        self.skeleton.model()
    }

    pub fn images(&self) -> &[ChainImage] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(c, im)| im.target == c && !im.reversed && im.shift == zero())
    }

    /// Image of a point.
    pub fn act(&self, p: &Point) -> Point {
        let (c, t) = self.skeleton.to_chain(p);
        let im = &self.images[c];
        self.skeleton.from_chain(im.target, &im.apply(&t))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let images = other
            .images
            .iter()
            .map(|inner| {
                let outer = &self.images[inner.target];
                ChainImage {
                    target: outer.target,
                    reversed: inner.reversed != outer.reversed,
                    shift: outer.apply(&inner.shift),
                }
            })
            .collect();
        Self::normalized(&self.skeleton, images)
    }

    pub fn inverse(&self) -> Automorphism {
        let mut images = vec![ChainImage { target: 0, reversed: false, shift: zero() }; self.images.len()];
        for (c, im) in self.images.iter().enumerate() {
            let shift = if im.reversed { im.shift.clone() } else { -im.shift.clone() };
            images[im.target] = ChainImage { target: c, reversed: im.reversed, shift };
        }
        Self::normalized(&self.skeleton, images)
    }

    /// Explicit vertex and edge maps on the input model, when the
    /// automorphism is simplicial there.
    pub fn explicit_maps(&self) -> Option<(Vec<usize>, EdgeMap)> {
        let m = self.model();
        let mut vmap = Vec::with_capacity(m.num_vertices());
        for v in 0..m.num_vertices() {
            match self.act(&Point::Vertex(v)) {
                Point::Vertex(w) => vmap.push(w),
                _ => return None,
            }
        }
        let mut emap = Vec::with_capacity(m.num_edges());
        for (e, edge) in m.edges().iter().enumerate() {
            let mid = self.act(&Point::OnEdge { edge: e, offset: &edge.length * frac(1, 2) });
            let quarter = self.act(&Point::OnEdge { edge: e, offset: &edge.length * frac(1, 4) });
            match (mid, quarter) {
                (Point::OnEdge { edge: f, offset: om }, Point::OnEdge { edge: g, offset: oq })
                    if f == g && m.edge(f).length == edge.length && om == &edge.length * frac(1, 2) =>
                {
                    emap.push((f, oq != &edge.length * frac(1, 4)));
                }
                _ => return None,
            }
        }
        Some((vmap, emap))
    }

    /// Text description: `map v<a>-><b> ... ; e<c>-><d>[+|-] ...` when
    /// simplicial, otherwise the circle form `rotate r` / `reflect p q`.
    pub fn describe(&self) -> String {
        let m = self.model();
        if self.skeleton.circle {
            let im = &self.images[0];
            if !im.reversed {
                return format!("rotate {}", fmt_q(&im.shift));
            }
            let half = &im.shift * frac(1, 2);
            let a = self.skeleton.from_chain(0, &half);
            let b = self.skeleton.from_chain(0, &(&half + &self.skeleton.chains[0].length * frac(1, 2)));
            return format!("reflect {} {}", m.format_point(&a), m.format_point(&b));
        }
        match self.explicit_maps() {
            Some((vmap, emap)) => {
                let vs = vmap.iter().enumerate().map(|(v, &w)| format!("v{}->{}", m.vertex_name(v), m.vertex_name(w)));
                let es = emap.iter().enumerate().map(|(e, &(f, rev))| {
                    format!("e{}->{}{}", m.edge(e).name, m.edge(f).name, if rev { "-" } else { "+" })
                });
                format!("map {} ; {}", vs.format(" "), es.format(" "))
            }
            None => {
                let parts = self.images.iter().enumerate().map(|(c, im)| {
                    format!("c{}->c{}{}", c, im.target, if im.reversed { "-" } else { "+" })
                });
                format!("chains {}", parts.format(" "))
            }
        }
    }

    /// Granularities this map forces on a lattice it should preserve: shifts
    /// and, for reversals, the half-shift fixed points.
    pub fn lattice_constraints(&self) -> Vec<Q> {
        let mut out = Vec::new();
        for (c, im) in self.images.iter().enumerate() {
            if self.skeleton.circle {
                out.push(im.shift.clone());
                if im.reversed {
                    out.push(&im.shift * frac(1, 2));
                    out.push(&self.skeleton.chains[c].length * frac(1, 2));
                }
            } else if im.reversed {
                out.push(&self.skeleton.chains[c].length * frac(1, 2));
            }
        }
        out
    }
}

pub fn act_on_point(sigma: &Automorphism, p: &Point) -> Result<Point> {
    sigma
        .model()
        .check_point(p)
        .map_err(|e| Error::ModelMismatch(format!("point is not on the automorphism's model: {e}")))?;
    Ok(sigma.act(p))
}

/// A finite group of automorphisms with its composition table; element 0 is
/// the identity and `table[i][j]` indexes `elements[i] ∘ elements[j]`.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    skeleton: Arc<Skeleton>,
    elements: Vec<Automorphism>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_elements(skeleton: &Arc<Skeleton>, mut elements: Vec<Automorphism>) -> Result<Self> {
        let id = Automorphism::identity(skeleton);
        let pos = elements
            .iter()
            .position(|e| *e == id)
            .ok_or_else(|| Error::InvalidAutomorphism("group lacks the identity".into()))?;
        elements.swap(0, pos);
        let index: HashMap<&Automorphism, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        if index.len() != elements.len() {
            return Err(Error::InvalidAutomorphism("duplicate group elements".into()));
        }
        let n = elements.len();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[i][j] = *index
                    .get(&elements[i].compose(&elements[j]))
                    .ok_or_else(|| Error::InvalidAutomorphism("set is not closed under composition".into()))?;
            }
        }
        let mut inverses = vec![0; n];
        for i in 0..n {
            inverses[i] = (0..n)
                .find(|&j| table[i][j] == 0 && table[j][i] == 0)
                .ok_or_else(|| Error::InvalidAutomorphism("element without inverse".into()))?;
        }
        if n <= 128 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if table[table[i][j]][k] != table[i][table[j][k]] {
                            return Err(Error::InvalidAutomorphism("composition is not associative".into()));
                        }
                    }
                }
            }
        }
        Ok(Self { skeleton: skeleton.clone(), elements, table, inverses })
    }

    pub fn trivial(skeleton: &Arc<Skeleton>) -> Self {
        Self::from_elements(skeleton, vec![Automorphism::identity(skeleton)]).expect("trivial group")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn skeleton(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn model(&self) -> &Model {
        self.skeleton.model()
    }

    pub fn lattice_constraints(&self) -> Vec<Q> {
        self.elements.iter().flat_map(Automorphism::lattice_constraints).collect()
    }

    /// Same element set, regardless of order.
    pub fn same_elements(&self, other: &FiniteGroup) -> bool {
        self.order() == other.order() && self.elements.iter().all(|e| other.elements.contains(e))
    }
}

/// Closure of `gens` under composition.
pub fn subgroup_generated(skeleton: &Arc<Skeleton>, gens: &[Automorphism]) -> Result<FiniteGroup> {
    if gens.iter().any(|g| g.skeleton.model != skeleton.model) {
        return Err(Error::ModelMismatch("generators live on different models".into()));
    }
    let id = Automorphism::identity(skeleton);
    let mut elements = vec![id.clone()];
    let mut seen: HashMap<Automorphism, ()> = HashMap::from([(id, ())]);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let next = g.compose(&elements[i]);
            if !seen.contains_key(&next) {
                if elements.len() >= GROUP_BUDGET {
                    return Err(Error::GroupTooLarge(GROUP_BUDGET));
                }
                seen.insert(next.clone(), ());
                elements.push(next);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    FiniteGroup::from_elements(skeleton, elements)
}

/// Generators of a finite subgroup of a circle's isometry group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircleMap {
    Rotate(Q),
    Reflect(Point, Point),
}

pub fn finite_subgroup_of_circle(m: &Arc<Model>, maps: &[CircleMap]) -> Result<FiniteGroup> {
    let skeleton = Skeleton::new(m.clone());
    if !skeleton.circle {
        return Err(Error::NotCircle);
    }
    let gens = maps
        .iter()
        .map(|g| match g {
            CircleMap::Rotate(r) => Automorphism::rotation(&skeleton, r),
            CircleMap::Reflect(a, b) => Automorphism::reflection(&skeleton, a, b),
        })
        .collect::<Result<Vec<_>>>()?;
    subgroup_generated(&skeleton, &gens)
}

/// Full automorphism group of a graph that is not a circle, by backtracking
/// over length- and incidence-preserving maps of the canonical model.
pub fn compute_aut(m: &Arc<Model>) -> Result<FiniteGroup> {
    let skeleton = Skeleton::new(m.clone());
    if skeleton.circle {
        return Err(Error::InfiniteGroup);
    }
    let ess = &skeleton.essential;
    let n = ess.len();
    let cidx: HashMap<usize, usize> = ess.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ends: Vec<(usize, usize)> = skeleton.chains.iter().map(|c| (cidx[&c.start], cidx[&c.end])).collect();
    // Sorted chain lengths per unordered canonical vertex pair (loops at (a, a)).
    let mut between: BTreeMap<(usize, usize), Vec<Q>> = BTreeMap::new();
    for (c, &(a, b)) in ends.iter().enumerate() {
        between.entry((a.min(b), a.max(b))).or_default().push(skeleton.chains[c].length.clone());
    }
    for v in between.values_mut() {
        v.sort();
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let empty: Vec<Q> = Vec::new();
    let lengths = |a: usize, b: usize| between.get(&key(a, b)).unwrap_or(&empty);
    let valence: Vec<usize> = ess.iter().map(|&v| m.incidence(v).len()).collect();

    let mut vertex_maps: Vec<Vec<usize>> = Vec::new();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        i: usize,
        n: usize,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(usize, usize, &[usize]) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if i == n {
            if out.len() >= GROUP_BUDGET {
                return Err(Error::GroupTooLarge(GROUP_BUDGET));
            }
            out.push(assign.clone());
            return Ok(());
        }
        for w in 0..n {
            if !used[w] && ok(i, w, &assign[..i]) {
                used[w] = true;
                assign[i] = w;
                search(i + 1, n, assign, used, ok, out)?;
                used[w] = false;
            }
        }
        Ok(())
    }
    let ok = |i: usize, w: usize, prefix: &[usize]| -> bool {
        valence[i] == valence[w]
            && lengths(i, i) == lengths(w, w)
            && prefix.iter().enumerate().all(|(j, &wj)| lengths(i, j) == lengths(w, wj))
    };
    search(0, n, &mut assign, &mut used, &ok, &mut vertex_maps)?;

    let mut elements = Vec::new();
    for vmap in vertex_maps {
        // Per (pair, length) class: every bijection onto the image class.
        let mut classes: BTreeMap<((usize, usize), Q), Vec<usize>> = BTreeMap::new();
        for (c, &(a, b)) in ends.iter().enumerate() {
            classes.entry((key(a, b), skeleton.chains[c].length.clone())).or_default().push(c);
        }
        let mut options: Vec<Vec<Vec<(usize, ChainImage)>>> = Vec::new();
        for ((pair, len), sources) in &classes {
            let target_pair = key(vmap[pair.0], vmap[pair.1]);
            let targets = &classes[&(target_pair, len.clone())];
            let mut opts = Vec::new();
            for perm in targets.iter().copied().permutations(targets.len()) {
                if pair.0 == pair.1 {
                    for flips in 0..(1u64 << sources.len()) {
                        let choice = sources
                            .iter()
                            .zip(&perm)
                            .enumerate()
                            .map(|(k, (&s, &t))| {
                                let rev = flips >> k & 1 == 1;
                                let shift = if rev { skeleton.chains[t].length.clone() } else { zero() };
                                (s, ChainImage { target: t, reversed: rev, shift })
                            })
                            .collect();
                        opts.push(choice);
                    }
                } else {
                    let choice = sources
                        .iter()
                        .zip(&perm)
                        .map(|(&s, &t)| {
                            let rev = ends[t].0 != vmap[ends[s].0];
                            let shift = if rev { skeleton.chains[t].length.clone() } else { zero() };
                            (s, ChainImage { target: t, reversed: rev, shift })
                        })
                        .collect();
                    opts.push(choice);
                }
            }
            options.push(opts);
        }
        let mut product: Vec<Vec<(usize, ChainImage)>> = vec![Vec::new()];
        for opts in &options {
            let mut next = Vec::with_capacity(product.len() * opts.len());
            for partial in &product {
                for o in opts {
                    let mut p = partial.clone();
                    p.extend(o.iter().cloned());
                    next.push(p);
                }
            }
            if elements.len() + next.len() > GROUP_BUDGET {
                return Err(Error::GroupTooLarge(GROUP_BUDGET));
            }
            product = next;
        }
        for assignment in product {
            let mut images = vec![ChainImage { target: 0, reversed: false, shift: zero() }; skeleton.num_chains()];
            for (s, im) in assignment {
                images[s] = im;
            }
            elements.push(Automorphism::from_images(&skeleton, images)?);
        }
    }
    FiniteGroup::from_elements(&skeleton, elements)
}
