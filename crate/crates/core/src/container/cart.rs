use std::sync::Arc;

use super::{prod_c, sum_c, Container};
use crate::error::{Error, Result};
use crate::groupoid::{natisos, product_functor, sum_functor, GFunctor, NatIso};
use crate::validation::ValidationReport;

/// A cartesian morphism: a shape functor and, for every index and source
/// shape, an equivalence from the target's positions back to the source's.
#[derive(Debug, Clone)]
pub struct CartMorphism {
    pub source: Arc<Container>,
    pub target: Arc<Container>,
    pub shape: GFunctor,
    /// `pos[i][s] : positions_i(shape(s)) -> positions_i(s)`
    pub pos: Vec<Vec<GFunctor>>,
}

pub(crate) fn same_container(a: &Container, b: &Container) -> bool {
    a.indices == b.indices
        && *a.shapes == *b.shapes
        && a.positions.iter().zip(&b.positions).all(|(x, y)| {
            x.fibers.iter().zip(&y.fibers).all(|(p, q)| **p == **q)
                && x.transport
                    .iter()
                    .zip(&y.transport)
                    .all(|(s, t)| s.same_tables(t))
        })
}

impl CartMorphism {
    pub fn identity(f: Arc<Container>) -> Self {
        let shape = GFunctor::identity(f.shapes.clone());
        let pos = f
            .positions
            .iter()
            .map(|fam| fam.fibers.iter().map(|p| GFunctor::identity(p.clone())).collect())
            .collect();
        CartMorphism {
            source: f.clone(),
            target: f,
            shape,
            pos,
        }
    }

    /// `self ∘ first`
    pub fn after(&self, first: &CartMorphism) -> Result<CartMorphism> {
        if !Arc::ptr_eq(&first.target, &self.source) && !same_container(&first.target, &self.source) {
            return Err(Error::InvalidMorphism("morphisms are not composable".into()));
        }
        let shape = self.shape.after(&first.shape);
        let pos = first
            .pos
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(s, u)| {
                        let v = &self.pos[i][first.shape.obj(s)];
                        u.after(v)
                    })
                    .collect()
            })
            .collect();
        Ok(CartMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            shape,
            pos,
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let (src, tgt) = (&*self.source, &*self.target);
        if src.indices != tgt.indices {
            report.push("indices", format!("{:?} vs {:?}", src.indices, tgt.indices));
            return report;
        }
        if *self.shape.source != *src.shapes || *self.shape.target != *tgt.shapes {
            report.push("shape functor", "endpoints".to_string());
            return report;
        }
        let r = self.shape.validate();
        if !r.is_valid() {
            report.extend("shape functor: ", r);
            return report;
        }
        for (i, row) in self.pos.iter().enumerate() {
            if row.len() != src.num_shapes() {
                report.push("positions", format!("index {}", src.indices[i]));
                continue;
            }
            for (s, u) in row.iter().enumerate() {
                let cell = format!("{}@{}", src.indices[i], src.shapes.object_name(s));
                if *u.source != **tgt.fiber(i, self.shape.obj(s)) || *u.target != **src.fiber(i, s) {
                    report.push("position endpoints", cell);
                    continue;
                }
                let r = u.validate();
                if !r.is_valid() {
                    report.extend(&format!("position map {cell}: "), r);
                    continue;
                }
                if !u.equivalence_report().is_equivalence() {
                    report.push("position equivalence", cell);
                }
            }
        }
        if !report.is_valid() {
            return report;
        }
        for (i, row) in self.pos.iter().enumerate() {
            for phi in 0..src.shapes.num_morphisms() {
                let (s, s2) = (src.shapes.src(phi), src.shapes.dst(phi));
                let lhs = src.positions[i].transport[phi].after(&row[s]);
                let rhs = row[s2].after(&tgt.positions[i].transport[self.shape.mor(phi)]);
                if !lhs.same_tables(&rhs) {
                    report.push(
                        "naturality",
                        format!("{}@{}", src.indices[i], src.shapes.morphism_name(phi)),
                    );
                }
            }
        }
        report
    }

    /// Equal tables everywhere.
    pub fn strictly_equal(&self, other: &CartMorphism) -> bool {
        self.shape.same_tables(&other.shape)
            && self
                .pos
                .iter()
                .zip(&other.pos)
                .all(|(a, b)| a.iter().zip(b).all(|(u, v)| u.same_tables(v)))
    }

    /// `f ⊕ g : F ⊕ G ⊸ F' ⊕ G'`
    pub fn sum(f: &CartMorphism, g: &CartMorphism) -> Result<CartMorphism> {
        let source = Arc::new(sum_c(&f.source, &g.source)?);
        let target = Arc::new(sum_c(&f.target, &g.target)?);
        let shape = sum_functor(&f.shape, &g.shape, source.shapes.clone(), target.shapes.clone());
        let ns = f.source.num_shapes();
        let pos = (0..source.indices.len())
            .map(|i| {
                (0..source.num_shapes())
                    .map(|s| {
                        let u = if s < ns { &f.pos[i][s] } else { &g.pos[i][s - ns] };
                        GFunctor::new_unchecked(
                            target.fiber(i, shape.obj(s)).clone(),
                            source.fiber(i, s).clone(),
                            u.obj_map.clone(),
                            u.mor_map.clone(),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(CartMorphism {
            source,
            target,
            shape,
            pos,
        })
    }

    /// `f × g : F × G ⊸ F' × G'`
    pub fn product(f: &CartMorphism, g: &CartMorphism) -> Result<CartMorphism> {
        let source = Arc::new(prod_c(&f.source, &g.source)?);
        let target = Arc::new(prod_c(&f.target, &g.target)?);
        let shape = product_functor(&f.shape, &g.shape, source.shapes.clone(), target.shapes.clone());
        let nt = g.source.num_shapes();
        let pos = (0..source.indices.len())
            .map(|i| {
                (0..source.num_shapes())
                    .map(|st| {
                        let (s, t) = (st / nt, st % nt);
                        sum_functor(
                            &f.pos[i][s],
                            &g.pos[i][t],
                            target.fiber(i, shape.obj(st)).clone(),
                            source.fiber(i, st).clone(),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(CartMorphism {
            source,
            target,
            shape,
            pos,
        })
    }
}

/// A natural isomorphism `α : f_sh ⇒ g_sh` with
/// `f_pos(i, s) = g_pos(i, s) ∘ transport(α_s)` for all `i, s`, if one exists.
pub fn morphism_eq(f: &CartMorphism, g: &CartMorphism) -> Option<NatIso> {
    if f.source.indices != g.source.indices
        || *f.shape.source != *g.shape.source
        || *f.shape.target != *g.shape.target
    {
        return None;
    }
    let tgt = &f.target;
    for alpha in natisos(&f.shape, &g.shape) {
        let coherent = (0..tgt.indices.len()).all(|i| {
            (0..f.source.num_shapes()).all(|s| {
                let moved = g.pos[i][s].after(&tgt.positions[i].transport[alpha[s]]);
                moved.same_tables(&f.pos[i][s])
            })
        });
        if coherent {
            return Some(NatIso {
                source: f.shape.clone(),
                target: g.shape.clone(),
                components: alpha,
            });
        }
    }
    None
}

pub fn is_container_equivalence(m: &CartMorphism) -> bool {
    m.shape.equivalence_report().is_equivalence()
}
