use std::sync::Arc;

use serde::Serialize;

use super::FinGroupoid;
use crate::error::{Error, Result};
use crate::validation::ValidationReport;

/// A functor between finite groupoids, as object and morphism tables.
#[derive(Debug, Clone)]
pub struct GFunctor {
    pub source: Arc<FinGroupoid>,
    pub target: Arc<FinGroupoid>,
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

pub(crate) fn same_groupoid(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GFunctor {
    /// Checks table sizes and ranges; the functor laws are left to
    /// [`GFunctor::validate`].
    pub fn new(
        source: Arc<FinGroupoid>,
        target: Arc<FinGroupoid>,
        obj_map: Vec<usize>,
        mor_map: Vec<usize>,
    ) -> Result<Self> {
        if obj_map.len() != source.num_objects() || mor_map.len() != source.num_morphisms() {
            return Err(Error::InvalidFunctor("table size mismatch".into()));
        }
        if obj_map.iter().any(|&o| o >= target.num_objects())
            || mor_map.iter().any(|&f| f >= target.num_morphisms())
        {
            return Err(Error::InvalidFunctor("image out of range".into()));
        }
        Ok(GFunctor {
            source,
            target,
            obj_map,
            mor_map,
        })
    }

    pub fn new_unchecked(
        source: Arc<FinGroupoid>,
        target: Arc<FinGroupoid>,
        obj_map: Vec<usize>,
        mor_map: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(obj_map.len(), source.num_objects());
        debug_assert_eq!(mor_map.len(), source.num_morphisms());
        GFunctor {
            source,
            target,
            obj_map,
            mor_map,
        }
    }

    pub fn identity(g: Arc<FinGroupoid>) -> Self {
        let obj_map = (0..g.num_objects()).collect();
        let mor_map = (0..g.num_morphisms()).collect();
        GFunctor {
            source: g.clone(),
            target: g,
            obj_map,
            mor_map,
        }
    }

    /// `self ∘ first`
    pub fn after(&self, first: &GFunctor) -> GFunctor {
        debug_assert!(same_groupoid(&first.target, &self.source));
        GFunctor {
            source: first.source.clone(),
            target: self.target.clone(),
            obj_map: first.obj_map.iter().map(|&o| self.obj_map[o]).collect(),
            mor_map: first.mor_map.iter().map(|&f| self.mor_map[f]).collect(),
        }
    }

    pub fn obj(&self, a: usize) -> usize {
        self.obj_map[a]
    }

    pub fn mor(&self, f: usize) -> usize {
        self.mor_map[f]
    }

    /// Equal object and morphism tables.
    pub fn same_tables(&self, other: &GFunctor) -> bool {
        self.obj_map == other.obj_map && self.mor_map == other.mor_map
    }

    pub fn is_identity(&self) -> bool {
        self.obj_map.iter().enumerate().all(|(i, &o)| i == o)
            && self.mor_map.iter().enumerate().all(|(i, &f)| i == f)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let (s, t) = (&*self.source, &*self.target);
        for f in 0..s.num_morphisms() {
            let g = self.mor_map[f];
            if t.src(g) != self.obj_map[s.src(f)] || t.dst(g) != self.obj_map[s.dst(f)] {
                report.push("endpoints", s.morphism_name(f).to_string());
            }
        }
        for a in 0..s.num_objects() {
            if self.mor_map[s.identity(a)] != t.identity(self.obj_map[a]) {
                report.push(
                    "identity",
                    format!("identity not preserved at {}", s.object_name(a)),
                );
            }
        }
        if !report.is_valid() {
            return report;
        }
        for (&(h, f), &k) in s.compose_table() {
            if t.try_compose(self.mor_map[h], self.mor_map[f]) != Some(self.mor_map[k]) {
                report.push(
                    "composition",
                    format!("{}∘{}", s.morphism_name(h), s.morphism_name(f)),
                );
            }
        }
        report
    }

    /// Faithfulness, fullness and essential surjectivity by exhaustive scan.
    pub fn equivalence_report(&self) -> GEquivReport {
        let (s, t) = (&*self.source, &*self.target);
        let mut faithful = true;
        let mut full = true;
        let target_labels = t.component_labels();
        let mut hit = vec![false; t.num_components()];
        let mut comp_image: Vec<Option<usize>> = Vec::new();
        for comp in s.components() {
            let img = target_labels[self.obj_map[comp[0]]];
            hit[img] = true;
            if comp_image.contains(&Some(img)) {
                full = false;
            }
            comp_image.push(Some(img));
            for &a in &comp {
                for &b in &comp {
                    let hom = s.hom(a, b);
                    let target_hom = t.hom(self.obj_map[a], self.obj_map[b]);
                    let mut images: Vec<usize> = hom.iter().map(|&f| self.mor_map[f]).collect();
                    images.sort_unstable();
                    images.dedup();
                    if images.len() < hom.len() {
                        faithful = false;
                    }
                    if images.len() < target_hom.len() {
                        full = false;
                    }
                }
            }
        }
        GEquivReport {
            functor: self.clone(),
            faithful,
            full,
            essentially_surjective: hit.iter().all(|&h| h),
        }
    }

    pub fn is_fully_faithful(&self) -> bool {
        let r = self.equivalence_report();
        r.faithful && r.full
    }
}

#[derive(Debug, Clone)]
pub struct GEquivReport {
    pub functor: GFunctor,
    pub faithful: bool,
    pub full: bool,
    pub essentially_surjective: bool,
}

#[derive(Serialize)]
struct Flags {
    faithful: bool,
    full: bool,
    essentially_surjective: bool,
    equivalence: bool,
}

impl GEquivReport {
    pub fn is_equivalence(&self) -> bool {
        self.faithful && self.full && self.essentially_surjective
    }

    pub fn is_embedding(&self) -> bool {
        self.faithful && self.full
    }

    pub fn flags_json(&self) -> serde_json::Value {
        serde_json::to_value(Flags {
            faithful: self.faithful,
            full: self.full,
            essentially_surjective: self.essentially_surjective,
            equivalence: self.is_equivalence(),
        })
        .expect("flags serialize")
    }
}

/// A natural isomorphism between parallel functors.
#[derive(Debug, Clone)]
pub struct NatIso {
    pub source: GFunctor,
    pub target: GFunctor,
    /// `components[a] : source(a) -> target(a)`
    pub components: Vec<usize>,
}

impl NatIso {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let (f, g) = (&self.source, &self.target);
        if !same_groupoid(&f.source, &g.source) || !same_groupoid(&f.target, &g.target) {
            report.push("parallel", "functors are not parallel".to_string());
            return report;
        }
        let (s, t) = (&*f.source, &*f.target);
        if self.components.len() != s.num_objects() {
            report.push("components", "wrong number of components".to_string());
            return report;
        }
        for a in 0..s.num_objects() {
            let c = self.components[a];
            if c >= t.num_morphisms() || t.src(c) != f.obj(a) || t.dst(c) != g.obj(a) {
                report.push("component", s.object_name(a).to_string());
            }
        }
        if !report.is_valid() {
            return report;
        }
        for m in 0..s.num_morphisms() {
            let (a, b) = (s.src(m), s.dst(m));
            let left = t.compose(g.mor(m), self.components[a]);
            let right = t.compose(self.components[b], f.mor(m));
            if left != right {
                report.push("naturality", s.morphism_name(m).to_string());
            }
        }
        report
    }
}

/// Candidate components per source component, each extended from a chosen
/// root component along spanning paths and then checked for naturality.
fn component_solutions(f: &GFunctor, g: &GFunctor) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    let (s, t) = (&*f.source, &*f.target);
    let paths = s.spanning_paths();
    let mut out = Vec::new();
    for comp in s.components() {
        let root = comp[0];
        let mut sols = Vec::new();
        for &alpha_root in t.hom(f.obj(root), g.obj(root)) {
            // alpha_b = G(p) ∘ alpha_root ∘ F(p)^-1 for p : root -> b
            let mut alpha = Vec::with_capacity(comp.len());
            for &b in &comp {
                let p = paths[b];
                let fp_inv = t.inverse(f.mor(p));
                alpha.push(t.compose(g.mor(p), t.compose(alpha_root, fp_inv)));
            }
            let pos = |x: usize| comp.binary_search(&x).expect("same component");
            let natural = comp.iter().all(|&a| {
                s.out(a).iter().all(|&m| {
                    let b = s.dst(m);
                    t.compose(g.mor(m), alpha[pos(a)]) == t.compose(alpha[pos(b)], f.mor(m))
                })
            });
            if natural {
                sols.push(alpha);
            }
        }
        out.push((comp, sols));
    }
    out
}

/// Some natural isomorphism `f => g`, if one exists.
pub fn find_natiso(f: &GFunctor, g: &GFunctor) -> Option<NatIso> {
    let mut components = vec![0; f.source.num_objects()];
    for (comp, sols) in component_solutions(f, g) {
        let first = sols.first()?;
        for (i, &a) in comp.iter().enumerate() {
            components[a] = first[i];
        }
    }
    Some(NatIso {
        source: f.clone(),
        target: g.clone(),
        components,
    })
}

/// Every natural isomorphism `f => g`, as component vectors.
pub fn natisos(f: &GFunctor, g: &GFunctor) -> Vec<Vec<usize>> {
    let per_comp = component_solutions(f, g);
    let mut acc = vec![vec![0; f.source.num_objects()]];
    for (comp, sols) in per_comp {
        let mut next = Vec::with_capacity(acc.len() * sols.len());
        for partial in &acc {
            for sol in &sols {
                let mut v = partial.clone();
                for (i, &a) in comp.iter().enumerate() {
                    v[a] = sol[i];
                }
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{bz2, codisc, disc, unit};

    #[test]
    fn identity_functor_valid() {
        let g = Arc::new(bz2());
        assert!(GFunctor::identity(g).validate().is_valid());
    }

    #[test]
    fn swap_on_disc2_valid() {
        let d = Arc::new(disc(2));
        let f = GFunctor::new(d.clone(), d, vec![1, 0], vec![1, 0]).unwrap();
        assert!(f.validate().is_valid());
        assert!(f.equivalence_report().is_equivalence());
    }

    #[test]
    fn identity_not_preserved() {
        let g = Arc::new(bz2());
        let f = GFunctor::new(g.clone(), g, vec![0], vec![1, 0]).unwrap();
        let report = f.validate();
        assert!(!report.is_valid());
        assert_eq!(report.violations[0].law, "identity");
    }

    #[test]
    fn point_into_codisc2_is_equivalence() {
        let f = GFunctor::new(Arc::new(disc(1)), Arc::new(codisc(2)), vec![0], vec![0]).unwrap();
        assert!(f.validate().is_valid());
        assert!(f.equivalence_report().is_equivalence());
    }

    #[test]
    fn point_into_disc2_not_eso() {
        let f = GFunctor::new(Arc::new(disc(1)), Arc::new(disc(2)), vec![0], vec![0]).unwrap();
        let r = f.equivalence_report();
        assert!(r.faithful && r.full && !r.essentially_surjective);
    }

    #[test]
    fn bz2_to_point_not_faithful() {
        let f = GFunctor::new(Arc::new(bz2()), Arc::new(unit()), vec![0], vec![0, 0]).unwrap();
        let r = f.equivalence_report();
        assert!(!r.faithful);
        assert!(r.full);
        assert!(r.essentially_surjective);
    }

    #[test]
    fn natisos_between_constant_functors_on_bz2() {
        let b = Arc::new(bz2());
        let src = Arc::new(unit());
        let f = GFunctor::new(src.clone(), b.clone(), vec![0], vec![0]).unwrap();
        assert_eq!(natisos(&f, &f).len(), 2);
        let iso = find_natiso(&f, &f).unwrap();
        assert!(iso.validate().is_valid());
    }
}
