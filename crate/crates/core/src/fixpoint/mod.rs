//! Smallest fixed points of signature containers, bounded by tree depth.
//!
//! A signature is a container over `I ⊎ {⋆}`. Its W-trees have depth 1 at a
//! node without recursive positions, and `1 + max` over the children
//! otherwise.

mod rec;
mod rule;
mod zipper;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::container::{
    is_container_equivalence, morphism_eq, subst, tables, CartMorphism, Container, SubstShape,
};
use crate::error::{Error, Result};
use crate::groupoid::{bz2, disc, disc_named, FinGroupoid, GFamily, GFunctor, Morphism};
use crate::limits::Limits;

pub use rec::{
    algebra_morphism_agrees, count_algebra, initial_algebra, rec, relabel_algebra, restrict_source,
    wrec_embedding_check, AgreementReport, Algebra, RecReport, WRecReport,
};
pub use rule::{mu_rule, mu_tower, MuRule, MuRuleReport, MuTower};
pub use zipper::{decompose, down, fill, plug, subtree_at, up, Hole, Layer, ZipperValue};

/// Default name of the recursive index.
pub const REC: &str = "rec";

/// A signature container with a marked recursive index.
#[derive(Debug, Clone)]
pub struct Signature {
    pub name: String,
    pub container: Container,
    pub star: String,
}

impl Signature {
    pub fn new(name: &str, container: Container, star: &str) -> Result<Self> {
        container.index_of(star)?;
        if container.indices.len() < 2 {
            return Err(Error::InvalidContainer("a signature needs a parameter index".into()));
        }
        Ok(Signature {
            name: name.to_string(),
            container,
            star: star.to_string(),
        })
    }

    /// Discrete signature with named shapes; `sizes[s][k]` positions at
    /// `indices[k]`.
    pub fn discrete(name: &str, indices: &[&str], star: &str, shapes: &[(&str, Vec<usize>)]) -> Result<Self> {
        let names: Vec<String> = shapes.iter().map(|(n, _)| n.to_string()).collect();
        let base = Arc::new(disc_named(names));
        if base.num_objects() != shapes.len() {
            return Err(Error::InvalidContainer("duplicate shape name".into()));
        }
        let positions = (0..indices.len())
            .map(|k| {
                let size = |s: usize| shapes[s].1[k];
                GFamily::discrete(base.clone(), size, |m| (0..size(base.src(m))).collect())
            })
            .collect();
        let container = Container::new(indices.iter().map(|s| s.to_string()).collect(), base, positions)?;
        Self::new(name, container, star)
    }

    /// Lists over `e` element labels: `nil`, and `cons` when `e = 1`, or
    /// one shape per letter `a, b, …` otherwise.
    pub fn list(e: usize) -> Self {
        let labels: Vec<String> = if e == 1 {
            vec!["cons".into()]
        } else {
            (0..e).map(|k| char::from(b'a' + k as u8).to_string()).collect()
        };
        let mut shapes = vec![("nil", vec![0, 0])];
        shapes.extend(labels.iter().map(|l| (l.as_str(), vec![1, 1])));
        Self::discrete("list", &["x", REC], REC, &shapes).expect("list signature")
    }

    /// Binary trees with a labelled position at each node.
    pub fn binary_tree() -> Self {
        Self::discrete("tree", &["x", REC], REC, &[("leaf", vec![0, 0]), ("node", vec![1, 2])])
            .expect("tree signature")
    }

    /// `pair` has two positions swapped by its automorphism; `wrap` has a
    /// recursive position with a nontrivial loop.
    pub fn twisted() -> Self {
        let mor = |name: &str, src, dst| Morphism {
            name: name.to_string(),
            src,
            dst,
        };
        let shapes = Arc::new(FinGroupoid::generate(
            vec!["pair".into(), "wrap".into()],
            vec![mor("id_pair", 0, 0), mor("sw", 0, 0), mor("id_wrap", 1, 1)],
            vec![0, 2],
            vec![0, 1, 2],
            |g, f| if g == 2 { 2 } else { g ^ f },
        ));
        let x = GFamily::discrete(shapes.clone(), |s| if s == 0 { 2 } else { 0 }, |m| match m {
            0 => vec![0, 1],
            1 => vec![1, 0],
            _ => vec![],
        });
        let fibers: Vec<Arc<FinGroupoid>> = vec![Arc::new(disc(0)), Arc::new(bz2())];
        let transport = (0..shapes.num_morphisms())
            .map(|m| GFunctor::identity(fibers[shapes.src(m)].clone()))
            .collect();
        let r = GFamily::new(shapes.clone(), fibers, transport).expect("family");
        let c = Container::new(vec!["x".into(), REC.into()], shapes, vec![x, r]).expect("container");
        Self::new("twisted", c, REC).expect("signature")
    }

    pub fn star_index(&self) -> usize {
        self.container.index_of(&self.star).expect("checked at construction")
    }

    /// Parameter indices, in container order.
    pub fn params(&self) -> Vec<String> {
        self.container
            .indices
            .iter()
            .filter(|i| **i != self.star)
            .cloned()
            .collect()
    }

    fn param_ixs(&self) -> Vec<usize> {
        let star = self.star_index();
        (0..self.container.indices.len()).filter(|&k| k != star).collect()
    }

    /// Position of parameter `i` among [`Signature::params`].
    pub fn param_ordinal(&self, i: &str) -> Result<usize> {
        self.params()
            .iter()
            .position(|p| p == i)
            .ok_or_else(|| Error::UnknownIndex(i.to_string()))
    }

    pub fn num_shapes(&self) -> usize {
        self.container.num_shapes()
    }

    pub fn arity(&self, s: usize) -> usize {
        self.container.fiber(self.star_index(), s).num_objects()
    }

    /// Number of positions of shape `s` at parameter ordinal `j`.
    pub fn positions(&self, j: usize, s: usize) -> usize {
        self.container.fiber(self.param_ixs()[j], s).num_objects()
    }

    pub fn is_discrete(&self) -> bool {
        self.container.shapes.is_discrete() && self.container.is_discrete()
    }

    pub fn require_discrete(&self) -> Result<()> {
        if self.is_discrete() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "W-trees need a discrete signature; `{}` has groupoid shapes or positions",
                self.name
            )))
        }
    }

    pub fn shape_name(&self, s: usize) -> &str {
        self.container.shapes.object_name(s)
    }

    pub fn shape_id(&self, name: &str) -> Result<usize> {
        self.container
            .shapes
            .object_id(name)
            .map_err(|_| Error::UnknownShape(name.to_string()))
    }

    /// `name` or `name[child, …]`.
    pub fn render(&self, w: &WTree) -> String {
        let name = self.shape_name(w.shape);
        if w.children.is_empty() {
            name.to_string()
        } else {
            let kids: Vec<String> = w.children.iter().map(|c| self.render(c)).collect();
            format!("{name}[{}]", kids.join(", "))
        }
    }

    pub fn parse_tree(&self, text: &str) -> Result<WTree> {
        let mut p = TreeParser {
            sig: self,
            text: text.as_bytes(),
            at: 0,
        };
        let w = p.tree()?;
        p.skip_ws();
        if p.at != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(w)
    }

    pub fn check_tree(&self, w: &WTree) -> Result<()> {
        if w.shape >= self.num_shapes() {
            return Err(Error::UnknownShape(w.shape.to_string()));
        }
        if w.children.len() != self.arity(w.shape) {
            return Err(Error::ArityMismatch(format!(
                "`{}` takes {} children, got {}",
                self.shape_name(w.shape),
                self.arity(w.shape),
                w.children.len()
            )));
        }
        w.children.iter().try_for_each(|c| self.check_tree(c))
    }
}

struct TreeParser<'a> {
    sig: &'a Signature,
    text: &'a [u8],
    at: usize,
}

impl TreeParser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            line: 1,
            column: self.at + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.text.len() && self.text[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn tree(&mut self) -> Result<WTree> {
        self.skip_ws();
        let start = self.at;
        while self.at < self.text.len()
            && (self.text[self.at].is_ascii_alphanumeric() || b"_'-".contains(&self.text[self.at]))
        {
            self.at += 1;
        }
        if start == self.at {
            return Err(self.error("expected a shape name"));
        }
        let name = std::str::from_utf8(&self.text[start..self.at]).expect("ascii");
        let shape = self.sig.shape_id(name).map_err(|_| Error::Parse {
            line: 1,
            column: start + 1,
            message: format!("unknown shape `{name}`"),
        })?;
        self.skip_ws();
        let mut children = Vec::new();
        if self.text.get(self.at) == Some(&b'[') {
            self.at += 1;
            loop {
                children.push(self.tree()?);
                self.skip_ws();
                match self.text.get(self.at) {
                    Some(b',') => self.at += 1,
                    Some(b']') => {
                        self.at += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `]`")),
                }
            }
        }
        if children.len() != self.sig.arity(shape) {
            return Err(Error::Parse {
                line: 1,
                column: start + 1,
                message: format!("`{name}` takes {} children, got {}", self.sig.arity(shape), children.len()),
            });
        }
        Ok(WTree { shape, children })
    }
}

/// A well-founded tree: a shape and one subtree per recursive position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WTree {
    pub shape: usize,
    pub children: Vec<WTree>,
}

impl WTree {
    pub fn new(shape: usize, children: Vec<WTree>) -> Self {
        WTree { shape, children }
    }

    pub fn leaf(shape: usize) -> Self {
        WTree::new(shape, Vec::new())
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(WTree::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(WTree::size).sum::<usize>()
    }
}

/// A path to a parameter position inside a tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WPath {
    /// A position of the root shape.
    Top(usize),
    /// A path inside the child at a recursive position.
    Below(usize, Box<WPath>),
}

impl WPath {
    pub fn below(b: usize, p: WPath) -> Self {
        WPath::Below(b, Box::new(p))
    }

    /// Recursive positions followed, and the final position.
    pub fn steps(&self) -> (Vec<usize>, usize) {
        let mut steps = Vec::new();
        let mut p = self;
        loop {
            match p {
                WPath::Top(c) => return (steps, *c),
                WPath::Below(b, rest) => {
                    steps.push(*b);
                    p = rest;
                }
            }
        }
    }

    pub fn from_steps(steps: &[usize], top: usize) -> Self {
        steps
            .iter()
            .rev()
            .fold(WPath::Top(top), |acc, &b| WPath::below(b, acc))
    }

    /// `b.b.…@c`
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let err = |message: &str| Error::Parse {
            line: 1,
            column: 1,
            message: message.to_string(),
        };
        let (prefix, top) = match text.rfind('@') {
            Some(k) => (&text[..k], &text[k + 1..]),
            None => return Err(err("a path ends in `@position`")),
        };
        let top = top.trim().parse::<usize>().map_err(|_| err("bad position after `@`"))?;
        let mut steps = Vec::new();
        for part in prefix.split('.').map(str::trim).filter(|s| !s.is_empty()) {
            steps.push(part.parse::<usize>().map_err(|_| err("bad recursive position"))?);
        }
        if !prefix.trim().is_empty() && !prefix.trim_end().ends_with('.') {
            return Err(err("steps are separated by `.`"));
        }
        Ok(WPath::from_steps(&steps, top))
    }
}

impl fmt::Display for WPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (steps, top) = self.steps();
        for b in steps {
            write!(f, "{b}.")?;
        }
        write!(f, "@{top}")
    }
}

/// All trees of depth at most `d`, by depth, then shape, then children.
pub fn enumerate_wtrees(sig: &Signature, d: usize, limits: &Limits) -> Result<Vec<WTree>> {
    sig.require_discrete()?;
    let mut all: Vec<WTree> = Vec::new();
    let mut below = 0usize;
    for k in 1..=d {
        let prev = all.len();
        let mut estimate = 0usize;
        for s in 0..sig.num_shapes() {
            let n = sig.arity(s) as u32;
            let count = if n == 0 {
                usize::from(k == 1)
            } else {
                prev.saturating_pow(n) - below.saturating_pow(n)
            };
            estimate = estimate.saturating_add(count);
        }
        limits.check_cells("W-trees", prev.saturating_add(estimate))?;
        let mut fresh = Vec::with_capacity(estimate);
        for s in 0..sig.num_shapes() {
            let n = sig.arity(s);
            if n == 0 {
                if k == 1 {
                    fresh.push(WTree::leaf(s));
                }
                continue;
            }
            if prev == 0 {
                continue;
            }
            let mut tuple = vec![0usize; n];
            'tuples: loop {
                if tuple.iter().any(|&t| t >= below) {
                    fresh.push(WTree::new(s, tuple.iter().map(|&t| all[t].clone()).collect()));
                }
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    tuple[pos] += 1;
                    if tuple[pos] < prev {
                        continue 'tuples;
                    }
                    tuple[pos] = 0;
                }
            }
        }
        below = prev;
        all.extend(fresh);
    }
    Ok(all)
}

fn paths_at(sig: &Signature, ix: usize, w: &WTree) -> Vec<WPath> {
    let mut out: Vec<WPath> = (0..sig.container.fiber(ix, w.shape).num_objects())
        .map(WPath::Top)
        .collect();
    for (b, child) in w.children.iter().enumerate() {
        out.extend(paths_at(sig, ix, child).into_iter().map(|p| WPath::below(b, p)));
    }
    out
}

/// Paths to the positions at parameter `i`, positions of the root first.
pub fn wpaths(sig: &Signature, i: &str, w: &WTree) -> Result<Vec<WPath>> {
    if i == sig.star {
        return Err(Error::UnknownIndex(format!("`{i}` is the recursive index")));
    }
    let ix = sig.container.index_of(i)?;
    sig.check_tree(w)?;
    Ok(paths_at(sig, ix, w))
}

/// `μF` restricted to trees of depth at most `depth`, with discrete shapes
/// and discrete positions.
#[derive(Debug, Clone)]
pub struct MuContainer {
    pub signature: Signature,
    pub depth: usize,
    pub trees: Vec<WTree>,
    /// `paths[j][t]` for parameter ordinal `j`.
    pub paths: Vec<Vec<Vec<WPath>>>,
    pub container: Arc<Container>,
    lookup: HashMap<WTree, usize>,
}

impl MuContainer {
    pub fn tree_index(&self, w: &WTree) -> Option<usize> {
        self.lookup.get(w).copied()
    }

    pub fn path_index(&self, j: usize, t: usize, p: &WPath) -> Option<usize> {
        self.paths[j][t].iter().position(|q| q == p)
    }

    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }
}

pub fn mu_container(sig: &Signature, depth: usize, limits: &Limits) -> Result<MuContainer> {
    let trees = enumerate_wtrees(sig, depth, limits)?;
    let ixs = sig.param_ixs();
    let paths: Vec<Vec<Vec<WPath>>> = ixs
        .iter()
        .map(|&ix| trees.iter().map(|w| paths_at(sig, ix, w)).collect())
        .collect();
    let shapes = Arc::new(disc_named(trees.iter().map(|w| sig.render(w)).collect()));
    let positions = paths
        .iter()
        .map(|per| GFamily::discrete(shapes.clone(), |t| per[t].len(), |m| (0..per[shapes.src(m)].len()).collect()))
        .collect();
    let container = Arc::new(Container::new(sig.params(), shapes, positions)?);
    let lookup = trees.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
    Ok(MuContainer {
        signature: sig.clone(),
        depth,
        trees,
        paths,
        container,
        lookup,
    })
}

/// `In : F[μF|_{d-1}] ⊸ μF|_d` and its inverse.
#[derive(Debug, Clone)]
pub struct InOut {
    pub lower: MuContainer,
    pub upper: MuContainer,
    /// `F[μF|_{d-1}]`
    pub assemblies: SubstShape,
    pub in_map: CartMorphism,
    pub out_map: CartMorphism,
}

impl InOut {
    /// `(Out ∘ In = id, In ∘ Out = id)`, up to a natural isomorphism.
    pub fn roundtrips(&self) -> Result<(bool, bool)> {
        let a = self.out_map.after(&self.in_map)?;
        let b = self.in_map.after(&self.out_map)?;
        let ida = CartMorphism::identity(self.in_map.source.clone());
        let idb = CartMorphism::identity(self.in_map.target.clone());
        Ok((morphism_eq(&a, &ida).is_some(), morphism_eq(&b, &idb).is_some()))
    }

    pub fn is_equivalence(&self) -> bool {
        self.in_map.validate().is_valid() && is_container_equivalence(&self.in_map)
    }

    /// The tree assembled from shape `o` of `F[μF|_{d-1}]`.
    pub fn assemble(&self, o: usize) -> WTree {
        let (s, h) = self.assemblies.shape_coords(o);
        WTree::new(s, h.obj_map.iter().map(|&t| self.lower.trees[t].clone()).collect())
    }

    /// The assembly a tree unfolds to.
    pub fn unfold(&self, w: &WTree) -> Result<usize> {
        let kids = w
            .children
            .iter()
            .map(|c| self.lower.tree_index(c).ok_or(Error::DepthExceeded(self.lower.depth)))
            .collect::<Result<Vec<_>>>()?;
        let ids: Vec<usize> = kids.iter().map(|&t| self.lower.container.shapes.identity(t)).collect();
        self.assemblies
            .shape_index(w.shape, &kids, &ids)
            .ok_or_else(|| Error::ArityMismatch(format!("shape {} with {} children", w.shape, kids.len())))
    }
}

pub fn in_out(sig: &Signature, depth: usize, limits: &Limits) -> Result<InOut> {
    if depth == 0 {
        return Err(Error::Precondition("In needs depth at least 1".into()));
    }
    let lower = mu_container(sig, depth - 1, limits)?;
    let upper = mu_container(sig, depth, limits)?;
    let assemblies = subst(&sig.container, &sig.star, &lower.container, limits)?;
    let src = Arc::new(assemblies.container.clone());
    let tgt = upper.container.clone();
    let mut partial = InOut {
        lower,
        upper,
        assemblies,
        in_map: CartMorphism::identity(src.clone()),
        out_map: CartMorphism::identity(src.clone()),
    };
    let obj_map = (0..src.num_shapes())
        .map(|o| {
            let w = partial.assemble(o);
            partial.upper.tree_index(&w).ok_or(Error::DepthExceeded(depth))
        })
        .collect::<Result<Vec<_>>>()?;
    let back = partial
        .upper
        .trees
        .iter()
        .map(|w| partial.unfold(w))
        .collect::<Result<Vec<_>>>()?;
    let in_shape = GFunctor::new_unchecked(
        src.shapes.clone(),
        tgt.shapes.clone(),
        obj_map.clone(),
        (0..src.shapes.num_morphisms())
            .map(|m| tgt.shapes.identity(obj_map[src.shapes.src(m)]))
            .collect(),
    );
    let out_shape = GFunctor::new_unchecked(
        tgt.shapes.clone(),
        src.shapes.clone(),
        back.clone(),
        (0..tgt.shapes.num_morphisms())
            .map(|m| src.shapes.identity(back[tgt.shapes.src(m)]))
            .collect(),
    );
    let pos = |from: &Arc<Container>, to: &Arc<Container>, shape: &GFunctor| -> Vec<Vec<GFunctor>> {
        (0..from.indices.len())
            .map(|j| {
                (0..from.num_shapes())
                    .map(|o| tables(to.fiber(j, shape.obj(o)), from.fiber(j, o), |x| x, |x| x))
                    .collect()
            })
            .collect()
    };
    partial.in_map = CartMorphism {
        pos: pos(&src, &tgt, &in_shape),
        source: src.clone(),
        target: tgt.clone(),
        shape: in_shape,
    };
    partial.out_map = CartMorphism {
        pos: pos(&tgt, &src, &out_shape),
        source: tgt,
        target: src,
        shape: out_shape,
    };
    Ok(partial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn tree_count_oracle(d: usize) -> usize {
        (1..=d).fold(0, |t, _| 1 + t * t)
    }

    #[test]
    fn list_trees() {
        let sig = Signature::list(1);
        let ts = enumerate_wtrees(&sig, 4, &lim()).unwrap();
        assert_eq!(ts.len(), 4);
        let lengths: Vec<usize> = ts.iter().map(|w| w.size() - 1).collect();
        assert_eq!(lengths, vec![0, 1, 2, 3]);
        assert!(enumerate_wtrees(&sig, 0, &lim()).unwrap().is_empty());
        let two = enumerate_wtrees(&Signature::list(2), 3, &lim()).unwrap();
        assert_eq!(two.len(), 1 + 2 + 4);
    }

    #[test]
    fn binary_tree_counts_follow_recurrence() {
        let sig = Signature::binary_tree();
        for d in 0..=4 {
            let ts = enumerate_wtrees(&sig, d, &lim()).unwrap();
            assert_eq!(ts.len(), tree_count_oracle(d));
            assert!(ts.iter().all(|w| w.depth() <= d));
            let mut sorted = ts.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), ts.len());
        }
    }

    #[test]
    fn paths_of_lists() {
        let sig = Signature::list(1);
        let w = sig.parse_tree("cons[cons[cons[nil]]]").unwrap();
        let ps = wpaths(&sig, "x", &w).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps[2].to_string(), "0.0.@0");
        assert!(wpaths(&sig, "x", &WTree::leaf(0)).unwrap().is_empty());
        assert!(wpaths(&sig, REC, &w).is_err());
    }

    #[test]
    fn literals_round_trip() {
        let sig = Signature::binary_tree();
        let w = sig.parse_tree("node[leaf, node[leaf, leaf]]").unwrap();
        assert_eq!(sig.parse_tree(&sig.render(&w)).unwrap(), w);
        assert!(sig.parse_tree("node[leaf]").is_err());
        assert!(sig.parse_tree("oak").is_err());
        let p = WPath::parse("1.0.@0").unwrap();
        assert_eq!(p, WPath::from_steps(&[1, 0], 0));
        assert_eq!(WPath::parse(&p.to_string()).unwrap(), p);
        assert_eq!(WPath::parse("@2").unwrap(), WPath::Top(2));
        assert!(WPath::parse("1.0").is_err());
    }

    #[test]
    fn in_out_is_an_equivalence() {
        for sig in [Signature::list(2), Signature::binary_tree()] {
            for d in 1..=3 {
                let io = in_out(&sig, d, &lim()).unwrap();
                assert!(io.in_map.validate().is_valid());
                assert!(io.out_map.validate().is_valid());
                assert!(io.is_equivalence());
                assert_eq!(io.roundtrips().unwrap(), (true, true));
            }
        }
        let io = in_out(&Signature::list(1), 2, &lim()).unwrap();
        let nil = io.assemblies.shape_index(0, &[], &[]).unwrap();
        assert_eq!(io.assemble(nil), WTree::leaf(0));
        let w = Signature::list(1).parse_tree("cons[nil]").unwrap();
        let o = io.unfold(&w).unwrap();
        assert_eq!(io.assemblies.shape_coords(o).0, 1);
    }

    #[test]
    fn groupoid_signatures_have_no_trees() {
        assert!(enumerate_wtrees(&Signature::twisted(), 2, &lim()).is_err());
    }
}
