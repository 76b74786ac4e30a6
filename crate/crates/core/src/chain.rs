//! The lax chain rule `∂_iF[G] ⊕ (∂⋆F[G] × ∂_iG) ⊸ ∂_i(F[G])` and its
//! strength.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::container::{
    derivative, is_container_equivalence, prod_c, subst, sum_c, tables, weaken, CartMorphism,
    Container, Derivative, SubstShape,
};
use crate::error::{Error, Result};
use crate::groupoid::{bz2, FunGroupoid, GFamily, GFunctor};
use crate::limits::Limits;
use crate::points::{graft, sigma_isolate_on, singleton_family};

/// Index name used for the substituted variable of a unary outer container.
pub const STAR: &str = "⋆";

/// The least `(s, f)` at which Σ-isolate is not surjective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingCell {
    pub shape: String,
    pub function: String,
    pub shape_index: usize,
    pub function_index: usize,
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub morphism: CartMorphism,
    pub valid: bool,
    pub is_embedding: bool,
    /// The morphism is an equivalence of containers.
    pub is_strong: bool,
    /// Σ-isolate is surjective at every `(s, f)`, computed separately.
    pub sigma_isolate_strong: bool,
    pub failing_cell: Option<FailingCell>,
}

impl ChainReport {
    pub fn domain_shapes(&self) -> usize {
        self.morphism.source.num_shapes()
    }

    pub fn codomain_shapes(&self) -> usize {
        self.morphism.target.num_shapes()
    }

    pub fn domain_shape_classes(&self) -> usize {
        self.morphism.source.shapes.num_components()
    }

    pub fn codomain_shape_classes(&self) -> usize {
        self.morphism.target.shapes.num_components()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "domain_shapes": self.domain_shapes(),
            "domain_shape_classes": self.domain_shape_classes(),
            "codomain_shapes": self.codomain_shapes(),
            "codomain_shape_classes": self.codomain_shape_classes(),
            "valid": self.valid,
            "embedding": self.is_embedding,
            "strong": self.is_strong,
            "sigma_isolate_strong": self.sigma_isolate_strong,
            "failing_cell": self.failing_cell,
        })
    }
}

/// Everything the chain morphism is assembled from.
pub(crate) struct Parts {
    pub left: CartMorphism,
    pub right: CartMorphism,
    /// `F[G]`
    pub whole: SubstShape,
    /// `F` weakened to every index of `G`.
    pub outer: Container,
    /// `∂_iF` and `∂_iF[G]`
    pub dfi: Derivative,
    pub lsub: SubstShape,
    /// `∂⋆F` and `∂⋆F[G]`
    pub dfs: Derivative,
    pub rsub: SubstShape,
}

fn describe_functor(h: &GFunctor) -> String {
    let body: Vec<String> = (0..h.source.num_objects())
        .map(|a| format!("{}↦{}", h.source.object_name(a), h.target.object_name(h.obj(a))))
        .collect();
    let mors: Vec<String> = (0..h.source.num_morphisms())
        .filter(|&m| !h.source.is_identity(m))
        .map(|m| format!("{}↦{}", h.source.morphism_name(m), h.target.morphism_name(h.mor(m))))
        .collect();
    if mors.is_empty() {
        format!("{{{}}}", body.join(", "))
    } else {
        format!("{{{}; {}}}", body.join(", "), mors.join(", "))
    }
}

/// Index of transformation `nu` of `from` inside `to`, for functor groupoids
/// over equal groupoids.
fn translate_nat(from: &FunGroupoid, to: &FunGroupoid, nu: usize) -> usize {
    let (a, b, comps) = &from.transformations[nu];
    let idx = |k: usize| {
        let h = &from.functors[k];
        to.functor_index(&h.obj_map, &h.mor_map).expect("same functor groupoid")
    };
    to.transformation_index(idx(*a), idx(*b), comps)
        .expect("same functor groupoid")
}

/// The shape morphism of `∂_i H` over `m` between the given positions.
fn lift(dr: &Derivative, h: &Container, i: usize, m: usize, x1: usize, x2: usize) -> usize {
    let moved = h.positions[i].transport_obj(m, x1);
    let fiber = h.fiber(i, h.shapes.dst(m));
    let rho = fiber.hom(moved, x2)[0];
    dr.shape_mor(m, rho, &h.shapes).expect("isolated positions")
}

pub(crate) fn build(f: &Container, star: &str, g: &Container, i: &str, limits: &Limits) -> Result<Parts> {
    f.index_of(star)?;
    let mut outer = f.clone();
    for j in &g.indices {
        if outer.index_of(j).is_err() {
            outer = weaken(&outer, j)?;
        }
    }
    let ix = g.index_of(i)?;
    let star_ix = outer.index_of(star)?;
    let whole = subst(&outer, star, g, limits)?;
    let fg = &whole.container;
    let dr = derivative(fg, i)?;
    let target = Arc::new(dr.container.clone());
    let outer_i = outer.index_of(i)?;
    let pstar = &outer.positions[star_ix];

    // ∂_i F [G]
    let dfi = derivative(&outer, i)?;
    let lsub = subst(&dfi.container, star, g, limits)?;
    let lsrc = Arc::new(lsub.container.clone());
    let mut lpoint = Vec::with_capacity(lsrc.num_shapes());
    let mut lobj = Vec::with_capacity(lsrc.num_shapes());
    for o in 0..lsrc.num_shapes() {
        let (sd, h) = lsub.shape_coords(o);
        let (s, p0) = dfi.shape_coords(sd);
        let so = whole.shape_index(s, &h.obj_map, &h.mor_map).expect("same functor");
        lpoint.push((so, p0));
        lobj.push(dr.shape_index(so, p0).expect("isolated on the left"));
    }
    let lmor = (0..lsrc.shapes.num_morphisms())
        .map(|k| {
            let (dphi, nu) = lsub.sigma.mor_coords(k);
            let phi = dfi.sigma.mor_coords(dphi).0;
            let s2 = outer.shapes.dst(phi);
            let sd2 = dfi.container.shapes.dst(dphi);
            let nu2 = translate_nat(&lsub.funs[sd2], &whole.funs[s2], nu);
            let m = whole.sigma.mor(phi, nu2);
            let (o1, o2) = (lsrc.shapes.src(k), lsrc.shapes.dst(k));
            lift(&dr, fg, ix, m, lpoint[o1].1, lpoint[o2].1)
        })
        .collect();
    let lshape = GFunctor::new_unchecked(lsrc.shapes.clone(), target.shapes.clone(), lobj, lmor);
    let lpos = (0..g.indices.len())
        .map(|j| {
            (0..lsrc.num_shapes())
                .map(|o| {
                    let (tf, sf) = (target.fiber(j, lshape.obj(o)), lsrc.fiber(j, o));
                    if j != ix {
                        return tables(tf, sf, |x| x, |x| x);
                    }
                    let sd = lsub.sigma.obj_coords(o).0;
                    let s = dfi.sigma.obj_coords(sd).0;
                    let sub = &dr.removals[lshape.obj(o)];
                    let rem = &dfi.removals[sd];
                    let pf = outer.fiber(outer_i, s);
                    let (np, mp) = (pf.num_objects(), pf.num_morphisms());
                    let (nr, mr) = (rem.groupoid.num_objects(), rem.groupoid.num_morphisms());
                    tables(
                        tf,
                        sf,
                        |x| {
                            let a = sub.from_sub[x];
                            if a < np { rem.to_sub[a].expect("kept") } else { nr + a - np }
                        },
                        |x| {
                            let a = sub.mor_from_sub[x];
                            if a < mp { rem.mor_to_sub[a].expect("kept") } else { mr + a - mp }
                        },
                    )
                })
                .collect()
        })
        .collect();
    let left = CartMorphism {
        source: lsrc,
        target: target.clone(),
        shape: lshape,
        pos: lpos,
    };

    // ∂⋆F [G] × ∂_i G
    let dfs = derivative(&outer, star)?;
    let rsub = subst(&dfs.container, star, g, limits)?;
    let dg = derivative(g, i)?;
    let rsrc = Arc::new(prod_c(&rsub.container, &dg.container)?);
    let ndg = dg.container.num_shapes();
    let mdg = dg.container.shapes.num_morphisms();
    // per source shape: (shape of F[G], position at i, F shape, removed ⋆ point, G shape, F[G]∖… data)
    struct RightShape {
        so: usize,
        x: usize,
        s: usize,
        sd: usize,
        a: usize,
        b: usize,
    }
    let mut rinfo = Vec::with_capacity(rsrc.num_shapes());
    for o in 0..rsrc.num_shapes() {
        let (a, b) = (o / ndg, o % ndg);
        let (sd, fi) = rsub.sigma.obj_coords(a);
        let fun = &rsub.funs[sd].functors[fi];
        let (s, p1) = dfs.shape_coords(sd);
        let (t, q) = dg.shape_coords(b);
        let h = graft(&pstar.fibers[s], p1, fun, t)?;
        let so = whole.shape_index(s, &h.obj_map, &h.mor_map).expect("grafted functor");
        let np = outer.fiber(outer_i, s).num_objects();
        let x = np + whole.inner[ix][so].obj(p1, q);
        rinfo.push(RightShape { so, x, s, sd, a, b });
    }
    let robj = rinfo
        .iter()
        .map(|r| dr.shape_index(r.so, r.x).expect("isolated pair"))
        .collect();
    let rmor = (0..rsrc.shapes.num_morphisms())
        .map(|k| {
            let (ka, kb) = (k / mdg, k % mdg);
            let (dphi, nu) = rsub.sigma.mor_coords(ka);
            let phi = dfs.sigma.mor_coords(dphi).0;
            let psi = dg.sigma.mor_coords(kb).0;
            let (o1, o2) = (rsrc.shapes.src(k), rsrc.shapes.dst(k));
            let (r1, r2) = (&rinfo[o1], &rinfo[o2]);
            let s2 = outer.shapes.dst(phi);
            let rem2 = &dfs.removals[r2.sd];
            let nu_comps = &rsub.funs[r2.sd].transformations[nu].2;
            let comps: Vec<usize> = (0..pstar.fibers[s2].num_objects())
                .map(|p| match rem2.to_sub[p] {
                    Some(y) => nu_comps[y],
                    None => psi,
                })
                .collect();
            let from = whole.family.transport_obj(phi, whole.sigma.obj_coords(r1.so).1);
            let to = whole.sigma.obj_coords(r2.so).1;
            let n = whole.funs[s2]
                .transformation_index(from, to, &comps)
                .expect("grafted transformation is natural");
            lift(&dr, fg, ix, whole.sigma.mor(phi, n), r1.x, r2.x)
        })
        .collect();
    let rshape = GFunctor::new_unchecked(rsrc.shapes.clone(), target.shapes.clone(), robj, rmor);
    let rpos = (0..g.indices.len())
        .map(|j| {
            let oj = outer.index_of(&g.indices[j]).expect("weakened");
            (0..rsrc.num_shapes())
                .map(|o| {
                    let r = &rinfo[o];
                    let (tf, sf) = (target.fiber(j, rshape.obj(o)), rsrc.fiber(j, o));
                    let pf = outer.fiber(oj, r.s);
                    let (np, mp) = (pf.num_objects(), pf.num_morphisms());
                    let sig = &whole.inner[j][r.so];
                    let sig_src = &rsub.inner[j][r.a];
                    let rem1 = &dfs.removals[r.sd];
                    let left_fiber = rsub.container.fiber(j, r.a);
                    let (nl, ml) = (left_fiber.num_objects(), left_fiber.num_morphisms());
                    let qrem = (j == ix).then(|| &dg.removals[r.b]);
                    let sub = (j == ix).then(|| &dr.removals[rshape.obj(o)]);
                    let obj = |x: usize| {
                        let x = sub.map_or(x, |s| s.from_sub[x]);
                        if x < np {
                            return x;
                        }
                        let (p, y) = sig.obj_coords(x - np);
                        match rem1.to_sub[p] {
                            Some(p2) => np + sig_src.obj(p2, y),
                            None => nl + qrem.map_or(y, |r| r.to_sub[y].expect("kept")),
                        }
                    };
                    let mor = |m: usize| {
                        let m = sub.map_or(m, |s| s.mor_from_sub[m]);
                        if m < mp {
                            return m;
                        }
                        let (pi, chi) = sig.mor_coords(m - mp);
                        match rem1.mor_to_sub[pi] {
                            Some(pi2) => mp + sig_src.mor(pi2, chi),
                            None => ml + qrem.map_or(chi, |r| r.mor_to_sub[chi].expect("kept")),
                        }
                    };
                    tables(tf, sf, obj, mor)
                })
                .collect()
        })
        .collect();
    let right = CartMorphism {
        source: rsrc,
        target,
        shape: rshape,
        pos: rpos,
    };
    Ok(Parts {
        left,
        right,
        whole,
        outer,
        dfi,
        lsub,
        dfs,
        rsub,
    })
}

/// `[l, r] : L ⊕ R ⊸ T` for `l : L ⊸ T`, `r : R ⊸ T`.
pub(crate) fn copair(l: &CartMorphism, r: &CartMorphism) -> Result<CartMorphism> {
    let source = Arc::new(sum_c(&l.source, &r.source)?);
    let target = l.target.clone();
    let shape = GFunctor::new_unchecked(
        source.shapes.clone(),
        target.shapes.clone(),
        l.shape.obj_map.iter().chain(&r.shape.obj_map).copied().collect(),
        l.shape.mor_map.iter().chain(&r.shape.mor_map).copied().collect(),
    );
    let pos = (0..source.indices.len())
        .map(|j| {
            l.pos[j]
                .iter()
                .chain(&r.pos[j])
                .enumerate()
                .map(|(o, u)| {
                    GFunctor::new_unchecked(
                        target.fiber(j, shape.obj(o)).clone(),
                        source.fiber(j, o).clone(),
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

/// The least `(s, f)` with `Σ_{p : P⋆(s)} Q_i(f p)` having isolated points
/// not hit by Σ-isolate.
pub(crate) fn sigma_isolate_failure(parts: &Parts, g: &Container, i: usize) -> Option<FailingCell> {
    let outer = &parts.outer;
    for s in 0..outer.num_shapes() {
        for (k, h) in parts.whole.funs[s].functors.iter().enumerate() {
            let fam: GFamily = g.positions[i].pullback(h);
            let rep = sigma_isolate_on(&fam, &fam.sigma());
            if !rep.surjective {
                return Some(FailingCell {
                    shape: outer.shapes.object_name(s).to_string(),
                    function: describe_functor(h),
                    shape_index: s,
                    function_index: k,
                });
            }
        }
    }
    None
}

pub(crate) fn report(morphism: CartMorphism, failing_cell: Option<FailingCell>) -> ChainReport {
    let valid = morphism.validate().is_valid();
    let eq = morphism.shape.equivalence_report();
    ChainReport {
        is_embedding: eq.is_embedding(),
        is_strong: valid && is_container_equivalence(&morphism),
        sigma_isolate_strong: failing_cell.is_none(),
        failing_cell,
        valid,
        morphism,
    }
}

/// Chain rule for `F` over `I ⊎ {star}` and `G` over `I`, at index `i`.
pub fn chain_indexed(f: &Container, star: &str, g: &Container, i: &str, limits: &Limits) -> Result<ChainReport> {
    let parts = build(f, star, g, i, limits)?;
    let ix = g.index_of(i)?;
    let cell = sigma_isolate_failure(&parts, g, ix);
    let m = copair(&parts.left, &parts.right)?;
    Ok(report(m, cell))
}

/// `(∂F)[G] × ∂G ⊸ ∂(F[G])` for unary `F` and `G`.
pub fn chain_unary(f: &Container, g: &Container, limits: &Limits) -> Result<ChainReport> {
    if f.indices.len() != 1 || g.indices.len() != 1 {
        return Err(Error::ArityMismatch("the unary chain rule takes unary containers".into()));
    }
    let mut outer = f.clone();
    outer.indices = vec![STAR.to_string()];
    let i = g.indices[0].clone();
    let parts = build(&outer, STAR, g, &i, limits)?;
    debug_assert_eq!(parts.left.source.num_shapes(), 0);
    let cell = sigma_isolate_failure(&parts, g, 0);
    Ok(report(parts.right, cell))
}

/// `F = 1 ◁ BZ₂`, `G = (a : BZ₂) ◁ hom(*, a)` and their chain rule.
#[derive(Debug, Clone)]
pub struct Bz2Exhibit {
    pub report: ChainReport,
    /// Isomorphism classes of derivative shapes over the identity functor.
    pub over_identity: usize,
    /// The same over the constant functor.
    pub over_constant: usize,
}

impl Bz2Exhibit {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.report.to_json();
        v["codomain_classes_over_identity"] = json!(self.over_identity);
        v["codomain_classes_over_constant"] = json!(self.over_constant);
        v
    }
}

pub fn bz2_containers() -> Result<(Container, Container)> {
    let a = Arc::new(bz2());
    let f = crate::container::single_shape_groupoid((*a).clone());
    let g = Container::unary(a.clone(), singleton_family(&a, 0))?;
    Ok((f, g))
}

pub fn counterexample_bz2() -> Result<Bz2Exhibit> {
    let (f, g) = bz2_containers()?;
    let limits = Limits::default();
    let mut outer = f.clone();
    outer.indices = vec![STAR.to_string()];
    let parts = build(&outer, STAR, &g, crate::container::X, &limits)?;
    let report_ = chain_unary(&f, &g, &limits)?;
    let dr = derivative(&parts.whole.container, crate::container::X)?;
    let labels = dr.container.shapes.component_labels();
    let mut over_id = Vec::new();
    let mut over_const = Vec::new();
    for (r, &label) in labels.iter().enumerate() {
        let so = dr.sigma.obj_coords(r).0;
        let (_, h) = parts.whole.shape_coords(so);
        if h.mor_map.iter().zip(0..).all(|(&m, k)| m == k) {
            over_id.push(label);
        } else {
            over_const.push(label);
        }
    }
    for v in [&mut over_id, &mut over_const] {
        v.sort_unstable();
        v.dedup();
    }
    Ok(Bz2Exhibit {
        report: report_,
        over_identity: over_id.len(),
        over_constant: over_const.len(),
    })
}

/// One row of a strength sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub name: String,
    pub valid: bool,
    pub embedding: bool,
    pub strong: bool,
    pub sigma_isolate_strong: bool,
}

pub fn strength_sweep(pairs: &[(String, Container, Container)], limits: &Limits) -> Result<Vec<SweepRow>> {
    pairs
        .iter()
        .map(|(name, f, g)| {
            let r = chain_unary(f, g, limits)?;
            Ok(SweepRow {
                name: name.clone(),
                valid: r.valid,
                embedding: r.is_embedding,
                strong: r.is_strong,
                sigma_isolate_strong: r.sigma_isolate_strong,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::{const_c, idc, single_shape_groupoid, X};
    use crate::groupoid::{codisc, disc};

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn discrete_pair_is_strong() {
        let f = Container::discrete_unary(&[2]);
        let g = Container::discrete_unary(&[2]);
        let r = chain_unary(&f, &g, &lim()).unwrap();
        assert!(r.valid);
        assert_eq!(r.domain_shapes(), 4);
        assert_eq!(r.codomain_shapes(), 4);
        assert!(r.is_embedding && r.is_strong && r.sigma_isolate_strong);
    }

    #[test]
    fn mixed_sizes_are_strong() {
        let f = Container::discrete_unary(&[0, 1, 2]);
        let g = Container::discrete_unary(&[1, 0, 2]);
        let r = chain_unary(&f, &g, &lim()).unwrap();
        assert!(r.valid && r.is_strong);
    }

    #[test]
    fn constant_outer_is_vacuously_strong() {
        let r = chain_unary(&const_c(&[X], disc(2)), &idc(), &lim()).unwrap();
        assert_eq!(r.domain_shapes(), 0);
        assert_eq!(r.codomain_shapes(), 0);
        assert!(r.is_strong);
    }

    #[test]
    fn bz2_counterexample() {
        let ex = counterexample_bz2().unwrap();
        let r = &ex.report;
        assert!(r.valid);
        assert_eq!(r.domain_shapes(), 0);
        assert_eq!(r.codomain_shape_classes(), 1);
        assert_eq!(ex.over_identity, 1);
        assert_eq!(ex.over_constant, 0);
        assert!(r.is_embedding);
        assert!(!r.is_strong);
        assert!(!r.sigma_isolate_strong);
        assert!(r.failing_cell.is_some());
    }

    #[test]
    fn isolated_groupoid_positions_are_strong() {
        let f = Container::discrete_unary(&[2]);
        let g = single_shape_groupoid(codisc(2));
        let r = chain_unary(&f, &g, &lim()).unwrap();
        assert!(r.valid && r.is_strong && r.sigma_isolate_strong);
    }

    #[test]
    fn binary_list_signature() {
        let list = Container::discrete(&["x", "r"], &[vec![0, 1], vec![0, 1]]);
        let g = Container::discrete_unary(&[0, 1, 2]);
        let r = chain_indexed(&list, "r", &g, "x", &lim()).unwrap();
        assert!(r.valid && r.is_embedding && r.is_strong);
    }

    #[test]
    fn weakened_outer_reduces_to_left_leg() {
        let h = Container::discrete_unary(&[1, 2]);
        let f = weaken(&h, "r").unwrap();
        let g = Container::discrete_unary(&[1]);
        let r = chain_indexed(&f, "r", &g, "x", &lim()).unwrap();
        assert!(r.valid && r.is_strong);
        assert_eq!(r.domain_shapes(), 3);
    }
}
