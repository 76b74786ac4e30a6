use std::sync::Arc;

use super::{CartMorphism, Container};
use crate::error::{Error, Result};
use crate::groupoid::{restrict_functor, FinGroupoid, GFamily, GFunctor, Sigma, Subgroupoid};
use crate::points::{isolated_subgroupoid, remove_point};

/// `∂_i F` together with the coordinates of its shapes.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub container: Container,
    pub index: usize,
    /// Shapes as `Σ_s Isolated(P_i(s))`.
    pub sigma: Sigma,
    /// Isolated positions at `i`, per shape of the original container.
    pub isolated: Vec<Subgroupoid>,
    /// The remaining positions at `i`, per derivative shape.
    pub removals: Vec<Subgroupoid>,
}

impl Derivative {
    /// `(s, p)` with `p` an isolated position of `P_i(s)`.
    pub fn shape_coords(&self, o: usize) -> (usize, usize) {
        let (s, k) = self.sigma.obj_coords(o);
        (s, self.isolated[s].from_sub[k])
    }

    pub fn shape_index(&self, s: usize, p: usize) -> Option<usize> {
        self.isolated[s].to_sub[p].map(|k| self.sigma.obj(s, k))
    }

    /// `(φ, π)` with `π : T_φ(p) -> p'` a morphism of `P_i(s')`.
    pub fn shape_mor_coords(&self, m: usize, base: &FinGroupoid) -> (usize, usize) {
        let (phi, k) = self.sigma.mor_coords(m);
        (phi, self.isolated[base.dst(phi)].mor_from_sub[k])
    }

    pub fn shape_mor(&self, phi: usize, pi: usize, base: &FinGroupoid) -> Option<usize> {
        self.isolated[base.dst(phi)].mor_to_sub[pi].map(|k| self.sigma.mor(phi, k))
    }
}

/// The derivative of `f` at index `i`: shapes with a chosen isolated
/// position at `i`, which is removed.
pub fn derivative(f: &Container, i: &str) -> Result<Derivative> {
    let ix = f.index_of(i)?;
    let pos = &f.positions[ix];
    let base = &f.shapes;
    let isolated: Vec<Subgroupoid> = pos
        .fibers
        .iter()
        .map(|fib| isolated_subgroupoid(fib).subgroupoid())
        .collect();
    let transport = (0..base.num_morphisms())
        .map(|phi| {
            restrict_functor(&pos.transport[phi], &isolated[base.src(phi)], &isolated[base.dst(phi)])
                .ok_or_else(|| Error::InvalidContainer("transport does not preserve isolated positions".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let iso_family = GFamily {
        base: base.clone(),
        fibers: isolated.iter().map(|s| s.groupoid.clone()).collect(),
        transport,
    };
    let sigma = iso_family.sigma();
    let shapes = sigma.groupoid.clone();

    let mut removals = Vec::with_capacity(shapes.num_objects());
    for o in 0..shapes.num_objects() {
        let (s, k) = sigma.obj_coords(o);
        removals.push(remove_point(&pos.fibers[s], isolated[s].from_sub[k])?.result);
    }
    let positions = f
        .positions
        .iter()
        .enumerate()
        .map(|(j, fam)| {
            let fibers: Vec<Arc<FinGroupoid>> = (0..shapes.num_objects())
                .map(|o| {
                    if j == ix {
                        removals[o].groupoid.clone()
                    } else {
                        fam.fibers[sigma.obj_coords(o).0].clone()
                    }
                })
                .collect();
            let transport = (0..shapes.num_morphisms())
                .map(|m| {
                    let phi = sigma.mor_coords(m).0;
                    let (o1, o2) = (shapes.src(m), shapes.dst(m));
                    if j == ix {
                        restrict_functor(&fam.transport[phi], &removals[o1], &removals[o2])
                            .expect("transport preserves the removed class")
                    } else {
                        let t = &fam.transport[phi];
                        GFunctor::new_unchecked(
                            fibers[o1].clone(),
                            fibers[o2].clone(),
                            t.obj_map.clone(),
                            t.mor_map.clone(),
                        )
                    }
                })
                .collect();
            GFamily {
                base: shapes.clone(),
                fibers,
                transport,
            }
        })
        .collect();
    Ok(Derivative {
        container: Container {
            indices: f.indices.clone(),
            shapes,
            positions,
        },
        index: ix,
        sigma,
        isolated,
        removals,
    })
}

/// Derivative of a container with a single index.
pub fn derivative_unary(f: &Container) -> Result<Derivative> {
    if f.indices.len() != 1 {
        return Err(Error::ArityMismatch(format!(
            "expected one index, found {}",
            f.indices.len()
        )));
    }
    derivative(f, &f.indices[0].clone())
}

/// A functor between given fibers with the given tables.
pub(crate) fn tables(
    source: &Arc<FinGroupoid>,
    target: &Arc<FinGroupoid>,
    obj: impl Fn(usize) -> usize,
    mor: impl Fn(usize) -> usize,
) -> GFunctor {
    GFunctor::new_unchecked(
        source.clone(),
        target.clone(),
        (0..source.num_objects()).map(obj).collect(),
        (0..source.num_morphisms()).map(mor).collect(),
    )
}

/// The position at `u`'s source matching `p`: `u(q) = p` if possible, else
/// the first `q` with `u(q) ≅ p`.
fn matching_point(u: &GFunctor, p: usize) -> Option<usize> {
    let tgt = &u.target;
    (0..u.source.num_objects())
        .find(|&q| u.obj(q) == p)
        .or_else(|| (0..u.source.num_objects()).find(|&q| !tgt.hom(u.obj(q), p).is_empty()))
}

/// `∂_i m : ∂_i F ⊸ ∂_i G` for `m : F ⊸ G`.
pub fn der_map(m: &CartMorphism, i: &str) -> Result<CartMorphism> {
    m.validate().into_result(Error::InvalidMorphism)?;
    let ix = m.source.index_of(i)?;
    let df = derivative(&m.source, i)?;
    let dg = derivative(&m.target, i)?;
    let (fs, gs) = (&m.source.shapes, &m.target.shapes);
    let (dfs, dgs) = (&df.container.shapes, &dg.container.shapes);
    let mut points = Vec::with_capacity(dfs.num_objects());
    let mut obj_map = Vec::with_capacity(dfs.num_objects());
    for o in 0..dfs.num_objects() {
        let (s, p) = df.shape_coords(o);
        let u = &m.pos[ix][s];
        let q = matching_point(u, p)
            .ok_or_else(|| Error::InvalidMorphism("position map is not essentially surjective".into()))?;
        let t = m.shape.obj(s);
        points.push(q);
        obj_map.push(
            dg.shape_index(t, q)
                .ok_or_else(|| Error::InvalidMorphism("position map does not reflect isolation".into()))?,
        );
    }
    let mor_map = (0..dfs.num_morphisms())
        .map(|k| {
            let phi = df.sigma.mor_coords(k).0;
            let (o1, o2) = (dfs.src(k), dfs.dst(k));
            let psi = m.shape.mor(phi);
            let moved = m.target.positions[ix].transport_obj(psi, points[o1]);
            let fiber = m.target.fiber(ix, gs.dst(psi));
            let rho = fiber.hom(moved, points[o2]).first().copied().ok_or_else(|| {
                Error::InvalidMorphism("derivative image of a shape morphism is missing".into())
            })?;
            dg.shape_mor(psi, rho, gs)
                .ok_or_else(|| Error::InvalidMorphism("derivative morphism is not isolated".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(fs.num_objects(), m.source.num_shapes());
    let shape = GFunctor::new_unchecked(dfs.clone(), dgs.clone(), obj_map, mor_map);
    let source = Arc::new(df.container);
    let target = Arc::new(dg.container);
    let pos = (0..source.indices.len())
        .map(|j| {
            (0..source.num_shapes())
                .map(|o| {
                    let s = df.sigma.obj_coords(o).0;
                    let u = &m.pos[j][s];
                    let (tf, sf) = (target.fiber(j, shape.obj(o)), source.fiber(j, o));
                    if j == ix {
                        restrict_functor(u, &dg.removals[shape.obj(o)], &df.removals[o])
                            .expect("equivalences preserve the removed class")
                    } else {
                        tables(tf, sf, |x| u.obj(x), |x| u.mor(x))
                    }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::{const_c, idc, morphism_eq, single_shape_groupoid, X};
    use crate::groupoid::{bz2, codisc, equiv_invariant, unit};

    #[test]
    fn derivative_of_identity_is_unit_constant() {
        let d = derivative_unary(&idc()).unwrap();
        assert!(d.container.validate().is_valid());
        assert_eq!(d.container.num_shapes(), 1);
        assert_eq!(d.container.fiber(0, 0).num_objects(), 0);
        assert_eq!(equiv_invariant(&d.container.shapes), equiv_invariant(&unit()));
    }

    #[test]
    fn derivative_of_constant_is_empty() {
        let d = derivative(&const_c(&[X], bz2()), X).unwrap();
        assert_eq!(d.container.num_shapes(), 0);
    }

    #[test]
    fn bz2_positions_have_no_isolated_points() {
        let d = derivative_unary(&single_shape_groupoid(bz2())).unwrap();
        assert_eq!(d.container.num_shapes(), 0);
    }

    #[test]
    fn codiscrete_positions_remove_whole_class() {
        let d = derivative_unary(&single_shape_groupoid(codisc(2))).unwrap();
        assert_eq!(d.container.num_shapes(), 2);
        assert_eq!(equiv_invariant(&d.container.shapes), equiv_invariant(&unit()));
        assert_eq!(d.container.fiber(0, 0).num_objects(), 0);
    }

    #[test]
    fn discrete_counts() {
        let f = Container::discrete_unary(&[0, 1, 3]);
        let d = derivative_unary(&f).unwrap();
        assert!(d.container.validate().is_valid());
        assert_eq!(d.container.num_shapes(), 4);
        assert_eq!(d.container.fiber(0, 3).num_objects(), 2);
        assert!(d.container.is_discrete());
    }

    #[test]
    fn other_indices_untouched() {
        let f = Container::discrete(&["x", "y"], &[vec![2], vec![3]]);
        let d = derivative(&f, "x").unwrap();
        assert_eq!(d.container.num_shapes(), 2);
        assert_eq!(d.container.fiber(1, 0).num_objects(), 3);
        assert_eq!(d.container.fiber(0, 1).num_objects(), 1);
    }

    #[test]
    fn der_map_identity_and_swap() {
        let c = Arc::new(Container::discrete_unary(&[2, 2]));
        let id = CartMorphism::identity(c.clone());
        let did = der_map(&id, X).unwrap();
        assert!(did.validate().is_valid());
        assert!(did.strictly_equal(&CartMorphism::identity(did.source.clone())));
        let shapes = c.shapes.clone();
        let swap = CartMorphism {
            source: c.clone(),
            target: c.clone(),
            shape: GFunctor::new(shapes.clone(), shapes, vec![1, 0], vec![1, 0]).unwrap(),
            pos: vec![(0..2)
                .map(|s| GFunctor::new(c.fiber(0, 1 - s).clone(), c.fiber(0, s).clone(), vec![1, 0], vec![1, 0]).unwrap())
                .collect()],
        };
        let d = der_map(&swap, X).unwrap();
        assert!(d.validate().is_valid());
        // (0,0) ↦ (1,1): position 0 of shape 0 corresponds to position 1 of shape 1
        assert_eq!(d.shape.obj_map, vec![3, 2, 1, 0]);
        let dd = der_map(&swap.after(&swap).unwrap(), X).unwrap();
        assert!(morphism_eq(&dd, &d.after(&d).unwrap()).is_some());
    }

    #[test]
    fn der_map_on_groupoid_positions() {
        let c = Arc::new(single_shape_groupoid(codisc(2)));
        let id = CartMorphism::identity(c);
        let d = der_map(&id, X).unwrap();
        assert!(d.validate().is_valid());
    }
}
