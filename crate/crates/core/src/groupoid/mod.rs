//! Finite 1-groupoids and the structure built on them.
//!
//! Objects and morphisms are addressed by dense indices; the string names are
//! kept for display and file IO only.

mod construct;
mod family;
mod functor;
mod fun;
mod invariant;
pub mod io;

use std::collections::HashMap;

pub use construct::*;
pub use family::{GFamily, Sigma};
pub use functor::{find_natiso, natisos, GEquivReport, GFunctor, NatIso};
pub use fun::{fun_groupoid, FunGroupoid};
pub use invariant::{equiv_invariant, groups_isomorphic, CayleyTable, GroupoidInvariant};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::validation::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone)]
pub struct FinGroupoid {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<usize>,
    inverse: Vec<usize>,
    /// `(g, f) -> g∘f`
    compose: HashMap<(usize, usize), usize>,
    homs: HashMap<(usize, usize), Vec<usize>>,
    out: Vec<Vec<usize>>,
}

impl PartialEq for FinGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identity == other.identity
            && self.inverse == other.inverse
            && self.compose == other.compose
    }
}

impl Eq for FinGroupoid {}

impl FinGroupoid {
    /// Assembles a groupoid from explicit tables without checking the laws.
    /// Fails only on dangling references or duplicate names.
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let n = objects.len();
        let m = morphisms.len();
        let mut seen = std::collections::HashSet::new();
        for o in &objects {
            if !seen.insert(o.as_str()) {
                return Err(Error::InvalidGroupoid(format!("duplicate object `{o}`")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for f in &morphisms {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidGroupoid(format!(
                    "duplicate morphism `{}`",
                    f.name
                )));
            }
            if f.src >= n || f.dst >= n {
                return Err(Error::UnknownObject(format!("endpoint of `{}`", f.name)));
            }
        }
        if identity.len() != n || identity.iter().any(|&i| i >= m) {
            return Err(Error::InvalidGroupoid("identity table incomplete".into()));
        }
        if inverse.len() != m || inverse.iter().any(|&i| i >= m) {
            return Err(Error::InvalidGroupoid("inverse table incomplete".into()));
        }
        if compose.iter().any(|(&(g, f), &h)| g >= m || f >= m || h >= m) {
            return Err(Error::InvalidGroupoid("compose table out of range".into()));
        }
        Ok(Self::assemble(objects, morphisms, identity, inverse, compose))
    }

    /// Builds a groupoid whose composition is given by `compose_fn`, evaluated
    /// on every composable pair. For internal constructions that are valid by
    /// construction.
    pub fn generate(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        mut compose_fn: impl FnMut(usize, usize) -> usize,
    ) -> Self {
        let mut out = vec![Vec::new(); objects.len()];
        let mut incoming = vec![Vec::new(); objects.len()];
        for (i, f) in morphisms.iter().enumerate() {
            out[f.src].push(i);
            incoming[f.dst].push(i);
        }
        let mut compose = HashMap::new();
        for b in 0..objects.len() {
            for &f in &incoming[b] {
                for &g in &out[b] {
                    compose.insert((g, f), compose_fn(g, f));
                }
            }
        }
        Self::assemble(objects, morphisms, identity, inverse, compose)
    }

    pub(crate) fn assemble(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Self {
        let mut out = vec![Vec::new(); objects.len()];
        let mut homs: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, f) in morphisms.iter().enumerate() {
            out[f.src].push(i);
            homs.entry((f.src, f.dst)).or_default().push(i);
        }
        FinGroupoid {
            objects,
            morphisms,
            identity,
            inverse,
            compose,
            homs,
            out,
        }
    }

    pub fn empty() -> Self {
        Self::assemble(vec![], vec![], vec![], vec![], HashMap::new())
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_name(&self, a: usize) -> &str {
        &self.objects[a]
    }

    pub fn morphism_name(&self, f: usize) -> &str {
        &self.morphisms[f].name
    }

    pub fn object_id(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn morphism_id(&self, name: &str) -> Result<usize> {
        self.morphisms
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    }

    pub fn src(&self, f: usize) -> usize {
        self.morphisms[f].src
    }

    pub fn dst(&self, f: usize) -> usize {
        self.morphisms[f].dst
    }

    pub fn identity(&self, a: usize) -> usize {
        self.identity[a]
    }

    pub fn inverse(&self, f: usize) -> usize {
        self.inverse[f]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.src(f)] == f
    }

    /// `g∘f`, if the pair is in the table.
    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    /// `g∘f` for a composable pair of a valid groupoid.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        match self.compose.get(&(g, f)) {
            Some(&h) => h,
            None => panic!(
                "composite {}∘{} missing from table",
                self.morphisms[g].name, self.morphisms[f].name
            ),
        }
    }

    pub fn compose_table(&self) -> &HashMap<(usize, usize), usize> {
        &self.compose
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        self.homs.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Morphisms with source `a`.
    pub fn out(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    pub fn hom_by_name(&self, a: &str, b: &str) -> Result<Vec<String>> {
        let a = self.object_id(a)?;
        let b = self.object_id(b)?;
        Ok(self
            .hom(a, b)
            .iter()
            .map(|&f| self.morphisms[f].name.clone())
            .collect())
    }

    pub fn aut_order(&self, a: usize) -> usize {
        self.hom(a, a).len()
    }

    pub fn is_discrete(&self) -> bool {
        self.morphisms.len() == self.objects.len()
            && (0..self.morphisms.len()).all(|f| self.is_identity(f))
    }

    pub fn isomorphic(&self, a: usize, b: usize) -> bool {
        !self.hom(a, b).is_empty()
    }

    /// Component label of every object; labels are numbered in order of each
    /// component's least object.
    pub fn component_labels(&self) -> Vec<usize> {
        let n = self.objects.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(a) = stack.pop() {
                for &f in &self.out[a] {
                    let b = self.morphisms[f].dst;
                    if label[b] == usize::MAX {
                        label[b] = next;
                        stack.push(b);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Partition of the objects into isomorphism classes, each sorted, in
    /// order of least element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut parts = vec![Vec::new(); count];
        for (a, &l) in labels.iter().enumerate() {
            parts[l].push(a);
        }
        parts
    }

    pub fn num_components(&self) -> usize {
        self.components().len()
    }

    /// For every object, a morphism from its component's least object to it.
    /// The root maps to its identity.
    pub fn spanning_paths(&self) -> Vec<usize> {
        let n = self.objects.len();
        let mut path = vec![usize::MAX; n];
        for comp in self.components() {
            let root = comp[0];
            path[root] = self.identity[root];
            let mut stack = vec![root];
            while let Some(a) = stack.pop() {
                for &f in &self.out[a] {
                    let b = self.morphisms[f].dst;
                    if path[b] == usize::MAX {
                        path[b] = self.compose(f, path[a]);
                        stack.push(b);
                    }
                }
            }
        }
        path
    }

    pub fn check_size(&self, limits: &Limits) -> Result<()> {
        if self.objects.len() > limits.max_objects {
            return Err(Error::SizeLimit {
                what: "objects".into(),
                actual: self.objects.len(),
                limit: limits.max_objects,
            });
        }
        if self.morphisms.len() > limits.max_morphisms {
            return Err(Error::SizeLimit {
                what: "morphisms".into(),
                actual: self.morphisms.len(),
                limit: limits.max_morphisms,
            });
        }
        Ok(())
    }

    /// Same tables with every name replaced.
    pub fn relabeled(
        &self,
        object_name: impl Fn(usize, &str) -> String,
        morphism_name: impl Fn(usize, &str) -> String,
    ) -> Self {
        let objects = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| object_name(i, o))
            .collect();
        let morphisms = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, f)| Morphism {
                name: morphism_name(i, &f.name),
                src: f.src,
                dst: f.dst,
            })
            .collect();
        Self::assemble(
            objects,
            morphisms,
            self.identity.clone(),
            self.inverse.clone(),
            self.compose.clone(),
        )
    }

    /// Reindexes objects and morphisms along the given permutations
    /// (`obj_perm[old] = new`).
    pub fn permuted(&self, obj_perm: &[usize], mor_perm: &[usize]) -> Self {
        let mut objects = vec![String::new(); self.objects.len()];
        for (old, name) in self.objects.iter().enumerate() {
            objects[obj_perm[old]] = name.clone();
        }
        let mut morphisms = vec![
            Morphism {
                name: String::new(),
                src: 0,
                dst: 0
            };
            self.morphisms.len()
        ];
        for (old, f) in self.morphisms.iter().enumerate() {
            morphisms[mor_perm[old]] = Morphism {
                name: f.name.clone(),
                src: obj_perm[f.src],
                dst: obj_perm[f.dst],
            };
        }
        let mut identity = vec![0; self.objects.len()];
        for (a, &f) in self.identity.iter().enumerate() {
            identity[obj_perm[a]] = mor_perm[f];
        }
        let mut inverse = vec![0; self.morphisms.len()];
        for (f, &g) in self.inverse.iter().enumerate() {
            inverse[mor_perm[f]] = mor_perm[g];
        }
        let compose = self
            .compose
            .iter()
            .map(|(&(g, f), &h)| ((mor_perm[g], mor_perm[f]), mor_perm[h]))
            .collect();
        Self::assemble(objects, morphisms, identity, inverse, compose)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_groupoid(self)
    }
}

/// Full scan of the groupoid laws.
pub fn validate_groupoid(g: &FinGroupoid) -> ValidationReport {
    let mut report = ValidationReport::new();
    let name = |f: usize| g.morphisms[f].name.as_str();
    for a in 0..g.num_objects() {
        let id = g.identity[a];
        if g.src(id) != a || g.dst(id) != a {
            report.push("identity", format!("id({})", g.objects[a]));
        }
    }
    for f in 0..g.num_morphisms() {
        let inv = g.inverse[f];
        if g.src(inv) != g.dst(f) || g.dst(inv) != g.src(f) {
            report.push("inverse endpoints", name(f).to_string());
        }
    }
    for (&(h, f), &k) in &g.compose {
        if g.src(h) != g.dst(f) {
            report.push("compose", format!("{}∘{} is not composable", name(h), name(f)));
        } else if g.src(k) != g.src(f) || g.dst(k) != g.dst(h) {
            report.push("compose endpoints", format!("{}∘{}", name(h), name(f)));
        }
    }
    let mut complete = true;
    for f in 0..g.num_morphisms() {
        for &h in g.out(g.dst(f)) {
            if !g.compose.contains_key(&(h, f)) {
                complete = false;
                report.push("compose", format!("{}∘{} missing", name(h), name(f)));
            }
        }
    }
    if !complete || !report.is_valid() {
        return report;
    }
    for f in 0..g.num_morphisms() {
        let (s, t) = (g.src(f), g.dst(f));
        if g.compose(f, g.identity[s]) != f || g.compose(g.identity[t], f) != f {
            report.push("unit", name(f).to_string());
        }
        let inv = g.inverse[f];
        if g.compose(f, inv) != g.identity[t] || g.compose(inv, f) != g.identity[s] {
            report.push("inverse", format!("no inverse for {}", name(f)));
        }
    }
    for f in 0..g.num_morphisms() {
        for &k in g.out(g.dst(f)) {
            let kf = g.compose(k, f);
            for &h in g.out(g.dst(k)) {
                if g.compose(g.compose(h, k), f) != g.compose(h, kf) {
                    report.push(
                        "associativity",
                        format!("{}∘{}∘{}", name(h), name(k), name(f)),
                    );
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bz2_is_valid() {
        let g = bz2();
        assert!(g.validate().is_valid());
        assert_eq!(g.hom_by_name("*", "*").unwrap(), vec!["e", "σ"]);
        assert_eq!(g.aut_order(0), 2);
    }

    #[test]
    fn idempotent_sigma_has_no_inverse() {
        let objects = vec!["*".to_string()];
        let morphisms = vec![
            Morphism { name: "e".into(), src: 0, dst: 0 },
            Morphism { name: "σ".into(), src: 0, dst: 0 },
        ];
        let compose = HashMap::from([((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 1)]);
        let g = FinGroupoid::from_parts(objects, morphisms, vec![0], vec![0, 1], compose).unwrap();
        let report = g.validate();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| v.cell == "no inverse for σ"));
    }

    #[test]
    fn discrete_and_codiscrete_homs() {
        let d = disc(3);
        assert!(d.validate().is_valid());
        assert_eq!(d.components().len(), 3);
        assert!(disc(2).hom(0, 1).is_empty());
        let c = codisc(2);
        assert_eq!(c.hom(0, 1).len(), 1);
        assert_eq!(codisc(4).components().len(), 1);
        assert!(disc(0).validate().is_valid());
        assert_eq!(disc(0).num_objects(), 0);
        assert_eq!(disc(5).aut_order(3), 1);
    }

    #[test]
    fn sum_components() {
        let g = sum(&bz2(), &disc(1));
        assert!(g.validate().is_valid());
        assert_eq!(g.components().len(), 2);
    }

    #[test]
    fn unknown_object_errors() {
        assert!(matches!(
            bz2().hom_by_name("*", "x"),
            Err(Error::UnknownObject(_))
        ));
    }

    #[test]
    fn missing_composite_reported() {
        let objects = vec!["a".to_string()];
        let morphisms = vec![Morphism { name: "e".into(), src: 0, dst: 0 }];
        let g = FinGroupoid::from_parts(objects, morphisms, vec![0], vec![0], HashMap::new())
            .unwrap();
        assert!(!g.validate().is_valid());
    }

    #[test]
    fn spanning_paths_reach_each_object() {
        let g = codisc(3);
        let paths = g.spanning_paths();
        for (a, &p) in paths.iter().enumerate() {
            assert_eq!(g.src(p), 0);
            assert_eq!(g.dst(p), a);
        }
    }
}
