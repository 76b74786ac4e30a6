use std::sync::Arc;

use serde::Serialize;

use super::derivative::tables;
use super::{der_map, derivative, morphism_eq, prod_c, proj, CartMorphism, Container};
use crate::error::Result;
use crate::groupoid::GFunctor;

fn proj_for(f: &Container, i: &str) -> Result<Container> {
    let indices: Vec<&str> = f.indices.iter().map(String::as_str).collect();
    proj(&indices, i)
}

/// `F × proj_i`, the container with one extra position at `i`.
pub fn with_hole(f: &Container, i: &str) -> Result<Container> {
    prod_c(f, &proj_for(f, i)?)
}

/// `η_F : F ⊸ ∂_i(F × proj_i)`, choosing the new position.
pub fn unit_eta(f: &Arc<Container>, i: &str) -> Result<CartMorphism> {
    let ix = f.index_of(i)?;
    let fx = with_hole(f, i)?;
    let d = derivative(&fx, i)?;
    let base = &f.shapes;
    let obj_map = (0..base.num_objects())
        .map(|s| {
            let extra = f.fiber(ix, s).num_objects();
            d.shape_index(s, extra).expect("the new position is isolated")
        })
        .collect();
    let mor_map = (0..base.num_morphisms())
        .map(|phi| {
            let s2 = base.dst(phi);
            let extra = f.fiber(ix, s2).num_objects();
            let id = fx.fiber(ix, s2).identity(extra);
            d.shape_mor(phi, id, base).expect("identity of an isolated position")
        })
        .collect();
    let target = Arc::new(d.container);
    let shape = GFunctor::new_unchecked(base.clone(), target.shapes.clone(), obj_map, mor_map);
    let pos = (0..f.indices.len())
        .map(|j| {
            (0..f.num_shapes())
                .map(|s| tables(target.fiber(j, shape.obj(s)), f.fiber(j, s), |x| x, |x| x))
                .collect()
        })
        .collect();
    Ok(CartMorphism {
        source: f.clone(),
        target,
        shape,
        pos,
    })
}

/// `ε_G : ∂_i G × proj_i ⊸ G`, filling the hole with the new position.
pub fn counit_epsilon(g: &Arc<Container>, i: &str) -> Result<CartMorphism> {
    let ix = g.index_of(i)?;
    let d = derivative(g, i)?;
    let source = Arc::new(with_hole(&d.container, i)?);
    let ds = &d.container.shapes;
    let base = &g.shapes;
    let shape = GFunctor::new_unchecked(
        source.shapes.clone(),
        base.clone(),
        (0..ds.num_objects()).map(|o| d.sigma.obj_coords(o).0).collect(),
        (0..ds.num_morphisms()).map(|m| d.sigma.mor_coords(m).0).collect(),
    );
    let pos = (0..g.indices.len())
        .map(|j| {
            (0..source.num_shapes())
                .map(|o| {
                    let t = shape.obj(o);
                    let (tf, sf) = (g.fiber(j, t), source.fiber(j, o));
                    if j != ix {
                        return tables(tf, sf, |x| x, |x| x);
                    }
                    let rem = &d.removals[o];
                    let hole = rem.groupoid.num_objects();
                    let hole_id = rem.groupoid.num_morphisms();
                    tables(
                        tf,
                        sf,
                        |x| rem.to_sub[x].unwrap_or(hole),
                        |m| rem.mor_to_sub[m].unwrap_or(hole_id),
                    )
                })
                .collect()
        })
        .collect();
    Ok(CartMorphism {
        source,
        target: g.clone(),
        shape,
        pos,
    })
}

/// `f♯ = ε_G ∘ (f × id) : F × proj_i ⊸ G` for `f : F ⊸ ∂_i G`.
pub fn sharp(f: &CartMorphism, g: &Arc<Container>, i: &str) -> Result<CartMorphism> {
    let id = CartMorphism::identity(Arc::new(proj_for(&f.source, i)?));
    let lifted = CartMorphism::product(f, &id)?;
    counit_epsilon(g, i)?.after(&lifted)
}

/// `g♭ = ∂g ∘ η_F : F ⊸ ∂_i G` for `g : F × proj_i ⊸ G`.
pub fn flat(g: &CartMorphism, f: &Arc<Container>, i: &str) -> Result<CartMorphism> {
    der_map(g, i)?.after(&unit_eta(f, i)?)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AdjunctionReport {
    /// `ε_{F×proj} ∘ (η_F × id) ≡ id`
    pub unit_triangle: bool,
    /// `∂ε_G ∘ η_{∂G} ≡ id`
    pub counit_triangle: bool,
    pub naturality_checked: usize,
    pub naturality_failures: usize,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.unit_triangle && self.counit_triangle && self.naturality_failures == 0
    }
}

/// Both triangle identities, at `f` for the unit side and at `g` for the
/// counit side.
pub fn triangle_check(f: &Arc<Container>, g: &Arc<Container>, i: &str) -> Result<AdjunctionReport> {
    let id_proj = CartMorphism::identity(Arc::new(proj_for(f, i)?));
    let eta_x = CartMorphism::product(&unit_eta(f, i)?, &id_proj)?;
    let fx = Arc::new(with_hole(f, i)?);
    let lhs = counit_epsilon(&fx, i)?.after(&eta_x)?;
    let unit_triangle = lhs.validate().is_valid() && morphism_eq(&lhs, &CartMorphism::identity(fx)).is_some();

    let dg = Arc::new(derivative(g, i)?.container);
    let rhs = der_map(&counit_epsilon(g, i)?, i)?.after(&unit_eta(&dg, i)?)?;
    let counit_triangle = rhs.validate().is_valid() && morphism_eq(&rhs, &CartMorphism::identity(dg)).is_some();
    Ok(AdjunctionReport {
        unit_triangle,
        counit_triangle,
        ..AdjunctionReport::default()
    })
}

/// Naturality of `η` and `ε` along `m : F ⊸ F'`:
/// `η_{F'} ∘ m ≡ ∂(m × id) ∘ η_F` and `m ∘ ε_F ≡ ε_{F'} ∘ (∂m × id)`.
pub fn naturality_check(m: &CartMorphism, i: &str) -> Result<(bool, bool)> {
    let id_proj = CartMorphism::identity(Arc::new(proj_for(&m.source, i)?));
    let a = unit_eta(&m.target, i)?.after(m)?;
    let b = der_map(&CartMorphism::product(m, &id_proj)?, i)?.after(&unit_eta(&m.source, i)?)?;
    let eta_ok = morphism_eq(&a, &b).is_some();
    let c = m.after(&counit_epsilon(&m.source, i)?)?;
    let dm = der_map(m, i)?;
    let d = counit_epsilon(&m.target, i)?.after(&CartMorphism::product(&dm, &id_proj)?)?;
    let eps_ok = morphism_eq(&c, &d).is_some();
    Ok((eta_ok, eps_ok))
}
