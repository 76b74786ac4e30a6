//! Indexed containers: a groupoid of shapes and, per index, a family of
//! positions over it.

mod adjunction;
mod cart;
mod derivative;
mod hom;
pub mod io;
mod laws;
mod subst;

use std::sync::Arc;

pub use adjunction::{
    counit_epsilon, flat, naturality_check, sharp, triangle_check, unit_eta, with_hole, AdjunctionReport,
};
pub use cart::{is_container_equivalence, morphism_eq, CartMorphism};
pub use derivative::{der_map, derivative, derivative_unary, Derivative};
pub use hom::{
    candidate_count, enumerate_carts, fin_tuple, for_each_cart, hom_count, iterated_derivative, CandidateCount,
};
pub use laws::{bag_container, bag_fixed_point_check, law_leibniz, law_sum, BagReport, LawReport};
pub use subst::{extension, subst, subst_map, SubstShape};
pub(crate) use cart::same_container;
pub(crate) use derivative::tables;

use crate::error::{Error, Result};
use crate::groupoid::{
    disc, product, sum, sum_functor, unit, FinGroupoid, GFamily,
};
use crate::validation::ValidationReport;

/// The index used by unary containers.
pub const X: &str = "x";

#[derive(Debug, Clone)]
pub struct Container {
    pub indices: Vec<String>,
    pub shapes: Arc<FinGroupoid>,
    /// Aligned with `indices`.
    pub positions: Vec<GFamily>,
}

/// Truncation flags; the model only has sets and 1-groupoids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub discrete_positions: bool,
    pub setlike_shapes: bool,
}

impl Container {
    pub fn new(indices: Vec<String>, shapes: Arc<FinGroupoid>, positions: Vec<GFamily>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidContainer("empty index set".into()));
        }
        if indices.len() != positions.len() {
            return Err(Error::InvalidContainer("one position family per index".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(Error::InvalidContainer("duplicate index".into()));
        }
        for fam in &positions {
            if !Arc::ptr_eq(&fam.base, &shapes) && *fam.base != *shapes {
                return Err(Error::InvalidContainer("family over the wrong base".into()));
            }
        }
        Ok(Container {
            indices,
            shapes,
            positions,
        })
    }

    /// Unary container with positions at [`X`].
    pub fn unary(shapes: Arc<FinGroupoid>, positions: GFamily) -> Result<Self> {
        Self::new(vec![X.to_string()], shapes, vec![positions])
    }

    /// Unary container with discrete shapes and `sizes[s]` discrete positions.
    pub fn discrete_unary(sizes: &[usize]) -> Self {
        Self::discrete(&[X], &[sizes.to_vec()])
    }

    /// Discrete shapes `0..n`, discrete positions of size `sizes[i][s]` at
    /// index `i`.
    pub fn discrete(indices: &[&str], sizes: &[Vec<usize>]) -> Self {
        let n = sizes.first().map(Vec::len).unwrap_or(0);
        let shapes = Arc::new(disc(n));
        let positions = sizes
            .iter()
            .map(|sz| {
                GFamily::discrete(shapes.clone(), |s| sz[s], |m| (0..sz[shapes.src(m)]).collect())
            })
            .collect();
        Container {
            indices: indices.iter().map(|s| s.to_string()).collect(),
            shapes,
            positions,
        }
    }

    pub fn index_of(&self, i: &str) -> Result<usize> {
        self.indices
            .iter()
            .position(|x| x == i)
            .ok_or_else(|| Error::UnknownIndex(i.to_string()))
    }

    pub fn positions_at(&self, i: &str) -> Result<&GFamily> {
        Ok(&self.positions[self.index_of(i)?])
    }

    pub fn num_shapes(&self) -> usize {
        self.shapes.num_objects()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let r = self.shapes.validate();
        if !r.is_valid() {
            report.extend("shapes: ", r);
            return report;
        }
        for (i, fam) in self.positions.iter().enumerate() {
            for (a, fib) in fam.fibers.iter().enumerate() {
                let r = fib.validate();
                if !r.is_valid() {
                    report.extend(
                        &format!("positions {} over {}: ", self.indices[i], self.shapes.object_name(a)),
                        r,
                    );
                }
            }
            let r = fam.validate();
            if !r.is_valid() {
                report.extend(&format!("positions {}: ", self.indices[i]), r);
            }
        }
        report
    }

    pub fn is_discrete(&self) -> bool {
        self.positions.iter().all(GFamily::is_discrete)
    }

    /// Discrete shapes and discrete positions.
    pub fn is_set_container(&self) -> bool {
        self.shapes.is_discrete() && self.is_discrete()
    }

    pub fn truncation(&self) -> Truncation {
        let g = &*self.shapes;
        Truncation {
            discrete_positions: self.is_discrete(),
            setlike_shapes: (0..g.num_objects()).all(|a| g.aut_order(a) <= 1),
        }
    }

    /// Positions at index `i` of shape `s`.
    pub fn fiber(&self, i: usize, s: usize) -> &Arc<FinGroupoid> {
        &self.positions[i].fibers[s]
    }

    /// Same index set, up to order.
    pub fn same_indices(&self, other: &Container) -> bool {
        let mut a = self.indices.clone();
        let mut b = other.indices.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// Reorders the position families to follow `order`.
    pub fn reindexed(&self, order: &[String]) -> Result<Container> {
        if order.len() != self.indices.len() {
            return Err(Error::IndexMismatch(format!("{:?} vs {:?}", self.indices, order)));
        }
        let positions = order
            .iter()
            .map(|i| self.positions_at(i).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Container {
            indices: order.to_vec(),
            shapes: self.shapes.clone(),
            positions,
        })
    }

    /// Shape `s` as its name plus position counts per index.
    pub fn describe_shape(&self, s: usize) -> String {
        let counts: Vec<String> = self
            .indices
            .iter()
            .enumerate()
            .map(|(i, name)| format!("{name}:{}", self.fiber(i, s).num_objects()))
            .collect();
        format!("{}{{{}}}", self.shapes.object_name(s), counts.join(","))
    }
}

fn empty_family(base: &Arc<FinGroupoid>) -> GFamily {
    GFamily::constant(base.clone(), Arc::new(disc(0)))
}

/// `A ◁ 0` over the given indices.
pub fn const_c(indices: &[&str], a: FinGroupoid) -> Container {
    let shapes = Arc::new(a);
    let positions = indices.iter().map(|_| empty_family(&shapes)).collect();
    Container {
        indices: indices.iter().map(|s| s.to_string()).collect(),
        shapes,
        positions,
    }
}

/// `1 ◁ 1` over [`X`].
pub fn idc() -> Container {
    proj(&[X], X).expect("x is an index")
}

/// Singleton shape with one position at `i` and none elsewhere.
pub fn proj(indices: &[&str], i: &str) -> Result<Container> {
    if !indices.contains(&i) {
        return Err(Error::UnknownIndex(i.to_string()));
    }
    let shapes = Arc::new(unit());
    let positions = indices
        .iter()
        .map(|&j| {
            let n = usize::from(j == i);
            GFamily::constant(shapes.clone(), Arc::new(disc(n)))
        })
        .collect();
    Ok(Container {
        indices: indices.iter().map(|s| s.to_string()).collect(),
        shapes,
        positions,
    })
}

/// Adds a fresh index with empty positions.
pub fn weaken(f: &Container, new_index: &str) -> Result<Container> {
    if f.indices.iter().any(|i| i == new_index) {
        return Err(Error::IndexMismatch(format!("index `{new_index}` already present")));
    }
    let mut out = f.clone();
    out.indices.push(new_index.to_string());
    out.positions.push(empty_family(&f.shapes));
    Ok(out)
}

fn aligned(f: &Container, g: &Container) -> Result<Container> {
    if !f.same_indices(g) {
        return Err(Error::IndexMismatch(format!("{:?} vs {:?}", f.indices, g.indices)));
    }
    g.reindexed(&f.indices)
}

/// Family over `S ⊕ T` from families over `S` and `T`.
fn family_sum(base: &Arc<FinGroupoid>, fa: &GFamily, fb: &GFamily) -> GFamily {
    let fibers = fa.fibers.iter().chain(fb.fibers.iter()).cloned().collect();
    let transport = fa
        .transport
        .iter()
        .chain(fb.transport.iter())
        .cloned()
        .collect();
    GFamily {
        base: base.clone(),
        fibers,
        transport,
    }
}

/// `F ⊕ G`: shapes `S ⊕ T`, positions from the respective summand.
pub fn sum_c(f: &Container, g: &Container) -> Result<Container> {
    let g = aligned(f, g)?;
    let shapes = Arc::new(sum(&f.shapes, &g.shapes));
    let positions = f
        .positions
        .iter()
        .zip(&g.positions)
        .map(|(a, b)| family_sum(&shapes, a, b))
        .collect();
    Ok(Container {
        indices: f.indices.clone(),
        shapes,
        positions,
    })
}

/// Family over `S × T` with fiber `A(s) ⊕ B(t)`.
fn family_pointwise_sum(base: &Arc<FinGroupoid>, fa: &GFamily, fb: &GFamily) -> GFamily {
    let (ns, nt) = (fa.base.num_objects(), fb.base.num_objects());
    let mt = fb.base.num_morphisms();
    let mut fibers = Vec::with_capacity(ns * nt);
    for s in 0..ns {
        for t in 0..nt {
            fibers.push(Arc::new(sum(&fa.fibers[s], &fb.fibers[t])));
        }
    }
    let transport = (0..base.num_morphisms())
        .map(|m| {
            let (phi, psi) = (m / mt, m % mt);
            sum_functor(
                &fa.transport[phi],
                &fb.transport[psi],
                fibers[base.src(m)].clone(),
                fibers[base.dst(m)].clone(),
            )
        })
        .collect();
    GFamily {
        base: base.clone(),
        fibers,
        transport,
    }
}

/// `F × G`: shapes `S × T`, positions `P(s) ⊕ Q(t)`.
pub fn prod_c(f: &Container, g: &Container) -> Result<Container> {
    let g = aligned(f, g)?;
    let shapes = Arc::new(product(&f.shapes, &g.shapes));
    let positions = f
        .positions
        .iter()
        .zip(&g.positions)
        .map(|(a, b)| family_pointwise_sum(&shapes, a, b))
        .collect();
    Ok(Container {
        indices: f.indices.clone(),
        shapes,
        positions,
    })
}

/// `1 ◁ Disc(n)` at every index in `sizes`, as a single-shape container.
pub fn single_shape(indices: &[&str], sizes: &[usize]) -> Container {
    Container::discrete(indices, &sizes.iter().map(|&n| vec![n]).collect::<Vec<_>>())
}

/// `1 ◁ P` with a single shape and the given position groupoid.
pub fn single_shape_groupoid(p: FinGroupoid) -> Container {
    let shapes = Arc::new(unit());
    Container {
        indices: vec![X.to_string()],
        positions: vec![GFamily::constant(shapes.clone(), Arc::new(p))],
        shapes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{bz2, codisc};

    #[test]
    fn basic_containers_valid() {
        assert!(idc().validate().is_valid());
        let c = const_c(&[X], disc(2));
        assert!(c.validate().is_valid());
        assert_eq!(c.num_shapes(), 2);
        assert_eq!(c.fiber(0, 1).num_objects(), 0);
        let p = proj(&["x", "y"], "y").unwrap();
        assert_eq!(p.fiber(0, 0).num_objects(), 0);
        assert_eq!(p.fiber(1, 0).num_objects(), 1);
        assert!(matches!(proj(&["x"], "z"), Err(Error::UnknownIndex(_))));
    }

    #[test]
    fn weaken_adds_empty_index() {
        let w = weaken(&Container::discrete_unary(&[2]), "r").unwrap();
        assert_eq!(w.indices, vec!["x", "r"]);
        assert_eq!(w.fiber(1, 0).num_objects(), 0);
        assert!(weaken(&w, "r").is_err());
    }

    #[test]
    fn sum_and_product_sizes() {
        let a = Container::discrete_unary(&[2]);
        let b = Container::discrete_unary(&[3]);
        let s = sum_c(&a, &b).unwrap();
        assert_eq!(s.num_shapes(), 2);
        assert_eq!(s.fiber(0, 0).num_objects(), 2);
        assert_eq!(s.fiber(0, 1).num_objects(), 3);
        let p = prod_c(&a, &b).unwrap();
        assert!(p.validate().is_valid());
        assert_eq!(p.num_shapes(), 1);
        assert_eq!(p.fiber(0, 0).num_objects(), 5);
    }

    #[test]
    fn mismatched_indices_rejected() {
        let a = Container::discrete_unary(&[1]);
        let b = proj(&["y"], "y").unwrap();
        assert!(matches!(sum_c(&a, &b), Err(Error::IndexMismatch(_))));
    }

    #[test]
    fn broken_transport_invalid() {
        let shapes = Arc::new(bz2());
        let fam = GFamily::discrete(shapes.clone(), |_| 3, |f| if f == 0 { vec![0, 1, 2] } else { vec![1, 2, 0] });
        let c = Container::unary(shapes, fam).unwrap();
        assert!(!c.validate().is_valid());
    }

    #[test]
    fn groupoid_positions_flags() {
        let c = single_shape_groupoid(codisc(2));
        assert!(!c.is_discrete());
        assert!(c.truncation().setlike_shapes);
        let c = const_c(&[X], bz2());
        assert!(!c.truncation().setlike_shapes);
    }
}
