use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CartMorphism, Container};
use crate::error::{Error, Result};
use crate::groupoid::{
    fun_groupoid, product, product_functor, sum, FinGroupoid, FunGroupoid, GFamily, GFunctor,
    Sigma,
};
use crate::limits::Limits;

/// `h ↦ h ∘ back` as a functor `Fun(A, T) -> Fun(A', T)` for `back : A' -> A`.
pub(crate) fn precompose(from: &FunGroupoid, to: &FunGroupoid, back: &GFunctor) -> GFunctor {
    let obj_map: Vec<usize> = from
        .functors
        .iter()
        .map(|h| {
            let om: Vec<usize> = back.obj_map.iter().map(|&y| h.obj(y)).collect();
            let mm: Vec<usize> = back.mor_map.iter().map(|&m| h.mor(m)).collect();
            to.functor_index(&om, &mm).expect("precomposite is a functor")
        })
        .collect();
    let mor_map = from
        .transformations
        .iter()
        .map(|(i, j, comps)| {
            let c: Vec<usize> = back.obj_map.iter().map(|&y| comps[y]).collect();
            to.transformation_index(obj_map[*i], obj_map[*j], &c)
                .expect("precomposite is natural")
        })
        .collect();
    GFunctor::new_unchecked(from.groupoid.clone(), to.groupoid.clone(), obj_map, mor_map)
}

/// Functor groupoids `Fun(P(s), T)` for every `s`, sharing work between
/// equal fibers.
fn fun_groupoids(
    fam: &GFamily,
    target: &Arc<FinGroupoid>,
    limits: &Limits,
) -> Result<Vec<Arc<FunGroupoid>>> {
    let mut cache: Vec<(Arc<FinGroupoid>, Arc<FunGroupoid>)> = Vec::new();
    let mut out = Vec::with_capacity(fam.fibers.len());
    let mut cells = 0usize;
    for fib in &fam.fibers {
        let hit = cache
            .iter()
            .find(|(g, _)| Arc::ptr_eq(g, fib) || **g == **fib)
            .map(|(_, f)| f.clone());
        let fun = match hit {
            Some(f) => f,
            None => {
                let f = Arc::new(fun_groupoid(fib, target, limits)?);
                cache.push((fib.clone(), f.clone()));
                f
            }
        };
        cells += fun.groupoid.num_objects() + fun.groupoid.num_morphisms();
        limits.check_cells("substitution shapes", cells)?;
        out.push(fun);
    }
    Ok(out)
}

/// Family `s ↦ Fun(P(s), T)` transported by precomposition with inverse
/// transport.
fn fun_family(fam: &GFamily, funs: &[Arc<FunGroupoid>]) -> GFamily {
    let base = &fam.base;
    let transport = (0..base.num_morphisms())
        .map(|phi| {
            let back = &fam.transport[base.inverse(phi)];
            precompose(&funs[base.src(phi)], &funs[base.dst(phi)], back)
        })
        .collect();
    GFamily {
        base: base.clone(),
        fibers: funs.iter().map(|f| f.groupoid.clone()).collect(),
        transport,
    }
}

/// The result of `F[G]` with the coordinates needed to read its shapes.
#[derive(Debug, Clone)]
pub struct SubstShape {
    pub container: Container,
    pub star: String,
    /// `Fun(P⋆(s), T)` per outer shape `s`.
    pub funs: Vec<Arc<FunGroupoid>>,
    /// `s ↦ Fun(P⋆(s), T)`, transported by precomposition.
    pub family: GFamily,
    /// Shapes of the result as `Σ_s Fun(P⋆(s), T)`.
    pub sigma: Sigma,
    /// Per result index and shape: `Σ_{p ∈ P⋆(s)} Q_j(h p)`.
    pub inner: Vec<Vec<Sigma>>,
    /// Per result index: position of that index in the outer container, if
    /// present.
    pub outer_index: Vec<Option<usize>>,
}

impl SubstShape {
    /// `(s, h)` for a result shape.
    pub fn shape_coords(&self, o: usize) -> (usize, &GFunctor) {
        let (s, h) = self.sigma.obj_coords(o);
        (s, &self.funs[s].functors[h])
    }

    pub fn shape_index(&self, s: usize, obj_map: &[usize], mor_map: &[usize]) -> Option<usize> {
        let h = self.funs[s].functor_index(obj_map, mor_map)?;
        Some(self.sigma.obj(s, h))
    }

    /// Number of outer positions at index `j` of result shape `o`; inner
    /// positions follow them.
    pub fn outer_positions(&self, j: usize, o: usize) -> usize {
        self.container.fiber(j, o).num_objects() - self.inner[j][o].groupoid.num_objects()
    }
}

/// `F[G]` for `F` over `I ⊎ {star}` and `G` over `I`. Indices of `I` missing
/// from `F` have no positions in `F`.
pub fn subst(f: &Container, star: &str, g: &Container, limits: &Limits) -> Result<SubstShape> {
    let star_ix = f.index_of(star)?;
    for i in &f.indices {
        if i != star && !g.indices.contains(i) {
            return Err(Error::IndexMismatch(format!(
                "index `{i}` of the outer container is not an index of the inner one"
            )));
        }
    }
    if g.indices.iter().any(|i| i == star) {
        return Err(Error::IndexMismatch(format!("`{star}` is an index of the inner container")));
    }
    let pstar = &f.positions[star_ix];
    let tshapes = &g.shapes;
    let funs = fun_groupoids(pstar, tshapes, limits)?;
    let family = fun_family(pstar, &funs);
    let sigma = family.sigma();
    let shapes = sigma.groupoid.clone();
    limits.check_cells("substitution shapes", shapes.num_objects() + shapes.num_morphisms())?;
    let outer_index: Vec<Option<usize>> = g.indices.iter().map(|j| f.index_of(j).ok()).collect();
    let base_f = &*f.shapes;

    let mut positions = Vec::with_capacity(g.indices.len());
    let mut inner_all = Vec::with_capacity(g.indices.len());
    for (j, qj) in g.positions.iter().enumerate() {
        let pj = outer_index[j].map(|k| &f.positions[k]);
        let mut inner = Vec::with_capacity(shapes.num_objects());
        let mut fibers = Vec::with_capacity(shapes.num_objects());
        for o in 0..shapes.num_objects() {
            let (s, hi) = sigma.obj_coords(o);
            let h = &funs[s].functors[hi];
            let pulled = qj.pullback(h);
            let sig = pulled.sigma();
            let outer_part = match pj {
                Some(p) => p.fibers[s].clone(),
                None => Arc::new(FinGroupoid::empty()),
            };
            fibers.push(Arc::new(sum(&outer_part, &sig.groupoid)));
            inner.push(sig);
        }
        let mut total = 0usize;
        for fib in &fibers {
            total += fib.num_objects() + fib.num_morphisms();
        }
        limits.check_cells("substitution positions", total)?;
        let transport = (0..shapes.num_morphisms())
            .map(|m| {
                let (o1, o2) = (shapes.src(m), shapes.dst(m));
                let (phi, nu) = sigma.mor_coords(m);
                let (s1, s2) = (base_f.src(phi), base_f.dst(phi));
                let (n1, m1) = match pj {
                    Some(p) => (p.fibers[s1].num_objects(), p.fibers[s1].num_morphisms()),
                    None => (0, 0),
                };
                let (n2, m2) = match pj {
                    Some(p) => (p.fibers[s2].num_objects(), p.fibers[s2].num_morphisms()),
                    None => (0, 0),
                };
                let comps = &funs[s2].transformations[nu].2;
                let tstar = &pstar.transport[phi];
                let (sig1, sig2) = (&inner[o1], &inner[o2]);
                let mut obj_map = Vec::with_capacity(fibers[o1].num_objects());
                let mut mor_map = Vec::with_capacity(fibers[o1].num_morphisms());
                if let Some(p) = pj {
                    obj_map.extend(p.transport[phi].obj_map.iter().copied());
                }
                for k in 0..sig1.groupoid.num_objects() {
                    let (p, q) = sig1.obj_coords(k);
                    let p2 = tstar.obj(p);
                    let q2 = qj.transport_obj(comps[p2], q);
                    obj_map.push(n2 + sig2.obj(p2, q2));
                }
                if let Some(p) = pj {
                    mor_map.extend(p.transport[phi].mor_map.iter().copied());
                }
                let pfib = &pstar.fibers[s1];
                for k in 0..sig1.groupoid.num_morphisms() {
                    let (pi, chi) = sig1.mor_coords(k);
                    let p2 = tstar.obj(pfib.dst(pi));
                    let chi2 = qj.transport_mor(comps[p2], chi);
                    mor_map.push(m2 + sig2.mor(tstar.mor(pi), chi2));
                }
                debug_assert_eq!(obj_map.len(), n1 + sig1.groupoid.num_objects());
                debug_assert_eq!(mor_map.len(), m1 + sig1.groupoid.num_morphisms());
                GFunctor::new_unchecked(fibers[o1].clone(), fibers[o2].clone(), obj_map, mor_map)
            })
            .collect();
        positions.push(GFamily {
            base: shapes.clone(),
            fibers,
            transport,
        });
        inner_all.push(inner);
    }
    let container = Container {
        indices: g.indices.clone(),
        shapes,
        positions,
    };
    Ok(SubstShape {
        container,
        star: star.to_string(),
        funs,
        family,
        sigma,
        inner: inner_all,
        outer_index,
    })
}

/// `F[m] : F[A] ⊸ F[B]` for `m : A ⊸ B`, given `fa = F[A]` and `fb = F[B]`.
pub fn subst_map(f: &Container, fa: &SubstShape, fb: &SubstShape, m: &CartMorphism) -> Result<CartMorphism> {
    let star_ix = f.index_of(&fa.star)?;
    let pstar = &f.positions[star_ix];
    let (src, tgt) = (&fa.container, &fb.container);
    let compose = |h: &GFunctor| -> (Vec<usize>, Vec<usize>) {
        (
            h.obj_map.iter().map(|&a| m.shape.obj(a)).collect(),
            h.mor_map.iter().map(|&k| m.shape.mor(k)).collect(),
        )
    };
    let lookup = |s: usize, k: usize| -> Result<usize> {
        let (obj, mor) = compose(&fa.funs[s].functors[k]);
        fb.funs[s]
            .functor_index(&obj, &mor)
            .ok_or_else(|| Error::InvalidMorphism("shape map leaves the inner container".into()))
    };
    let mut obj_map = Vec::with_capacity(src.num_shapes());
    for o in 0..src.num_shapes() {
        let (s, k) = fa.sigma.obj_coords(o);
        obj_map.push(fb.sigma.obj(s, lookup(s, k)?));
    }
    let mut mor_map = Vec::with_capacity(src.shapes.num_morphisms());
    for k in 0..src.shapes.num_morphisms() {
        let (phi, nu) = fa.sigma.mor_coords(k);
        let s2 = f.shapes.dst(phi);
        let (from, to, comps) = &fa.funs[s2].transformations[nu];
        let comps: Vec<usize> = comps.iter().map(|&c| m.shape.mor(c)).collect();
        let nu2 = fb.funs[s2]
            .transformation_index(lookup(s2, *from)?, lookup(s2, *to)?, &comps)
            .ok_or_else(|| Error::InvalidMorphism("image transformation not found".into()))?;
        mor_map.push(fb.sigma.mor(phi, nu2));
    }
    let shape = GFunctor::new_unchecked(src.shapes.clone(), tgt.shapes.clone(), obj_map, mor_map);
    let pos = (0..src.indices.len())
        .map(|j| {
            (0..src.num_shapes())
                .map(|o| {
                    let o2 = shape.obj(o);
                    let (s, h) = fa.shape_coords(o);
                    let (tf, sf) = (tgt.fiber(j, o2), src.fiber(j, o));
                    let (sig_a, sig_b) = (&fa.inner[j][o], &fb.inner[j][o2]);
                    let n = sf.num_objects() - sig_a.groupoid.num_objects();
                    let mo = sf.num_morphisms() - sig_a.groupoid.num_morphisms();
                    let pfib = &pstar.fibers[s];
                    let u = |p: usize| &m.pos[j][h.obj(p)];
                    super::derivative::tables(
                        tf,
                        sf,
                        |a| {
                            if a < n {
                                return a;
                            }
                            let (p, q) = sig_b.obj_coords(a - n);
                            n + sig_a.obj(p, u(p).obj(q))
                        },
                        |b| {
                            if b < mo {
                                return b;
                            }
                            let (pi, chi) = sig_b.mor_coords(b - mo);
                            mo + sig_a.mor(pi, u(pfib.dst(pi)).mor(chi))
                        },
                    )
                })
                .collect()
        })
        .collect();
    Ok(CartMorphism {
        source: Arc::new(src.clone()),
        target: Arc::new(tgt.clone()),
        shape,
        pos,
    })
}

/// `Σ_s Π_i Fun(P_i(s), X_i)`.
pub fn extension(
    f: &Container,
    args: &BTreeMap<String, Arc<FinGroupoid>>,
    limits: &Limits,
) -> Result<Arc<FinGroupoid>> {
    let mut per_index = Vec::with_capacity(f.indices.len());
    for (i, name) in f.indices.iter().enumerate() {
        let x = args
            .get(name)
            .ok_or_else(|| Error::UnknownIndex(name.clone()))?;
        let funs = fun_groupoids(&f.positions[i], x, limits)?;
        per_index.push(fun_family(&f.positions[i], &funs));
    }
    let base = &f.shapes;
    let mut fibers = Vec::with_capacity(base.num_objects());
    let mut cells = 0usize;
    for s in 0..base.num_objects() {
        let mut acc = (*per_index[0].fibers[s]).clone();
        for fam in &per_index[1..] {
            acc = product(&acc, &fam.fibers[s]);
        }
        cells += acc.num_objects() + acc.num_morphisms();
        limits.check_cells("extension", cells)?;
        fibers.push(Arc::new(acc));
    }
    let transport = (0..base.num_morphisms())
        .map(|phi| {
            let (s1, s2) = (base.src(phi), base.dst(phi));
            let mut acc = per_index[0].transport[phi].clone();
            let mut src_acc = per_index[0].fibers[s1].clone();
            let mut dst_acc = per_index[0].fibers[s2].clone();
            for fam in &per_index[1..] {
                let src_next = Arc::new(product(&src_acc, &fam.fibers[s1]));
                let dst_next = Arc::new(product(&dst_acc, &fam.fibers[s2]));
                acc = product_functor(&acc, &fam.transport[phi], src_next.clone(), dst_next.clone());
                src_acc = src_next;
                dst_acc = dst_next;
            }
            GFunctor::new_unchecked(fibers[s1].clone(), fibers[s2].clone(), acc.obj_map, acc.mor_map)
        })
        .collect();
    let fam = GFamily {
        base: base.clone(),
        fibers,
        transport,
    };
    let sig = fam.sigma();
    limits.check_cells(
        "extension",
        sig.groupoid.num_objects() + sig.groupoid.num_morphisms(),
    )?;
    Ok(sig.groupoid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::{const_c, idc, single_shape, X};
    use crate::groupoid::{bz2, codisc, disc, equiv_invariant};

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn identity_outer_gives_inner() {
        let f = idc();
        let g = Container::discrete_unary(&[0, 2, 1]);
        let r = subst(&f, X, &g, &lim()).unwrap_err();
        assert!(matches!(r, Error::IndexMismatch(_)));
        let g = rename(&g, "y");
        let r = subst(&f, X, &g, &lim()).unwrap();
        assert!(r.container.validate().is_valid());
        assert_eq!(r.container.num_shapes(), 3);
        let sizes: Vec<usize> = (0..3).map(|o| r.container.fiber(0, o).num_objects()).collect();
        assert_eq!(sizes, vec![0, 2, 1]);
    }

    fn rename(g: &Container, to: &str) -> Container {
        let mut g = g.clone();
        g.indices = vec![to.to_string()];
        g
    }

    #[test]
    fn pair_of_pairs() {
        let f = Container::discrete(&["r"], &[vec![2]]);
        let g = single_shape(&["x"], &[2]);
        let r = subst(&f, "r", &g, &lim()).unwrap();
        assert_eq!(r.container.num_shapes(), 1);
        assert_eq!(r.container.fiber(0, 0).num_objects(), 4);
    }

    #[test]
    fn list_at_empty_has_only_nil() {
        // nil has no rec positions, cons one x and one rec position
        let list = Container::discrete(&["x", "r"], &[vec![0, 1], vec![0, 1]]);
        let empty = const_c(&["x"], disc(0));
        let r = subst(&list, "r", &empty, &lim()).unwrap();
        assert_eq!(r.container.num_shapes(), 1);
        assert!(r.container.validate().is_valid());
    }

    #[test]
    fn subst_with_groupoid_positions_is_valid() {
        // outer shape with positions BZ2-transported Disc(2), inner shapes BZ2
        let shapes = Arc::new(bz2());
        let fam = GFamily::discrete(shapes.clone(), |_| 2, |m| if m == 0 { vec![0, 1] } else { vec![1, 0] });
        let f = Container::new(vec!["r".into()], shapes, vec![fam]).unwrap();
        let g = Container::unary(Arc::new(codisc(2)), GFamily::constant(Arc::new(codisc(2)), Arc::new(disc(1)))).unwrap();
        let r = subst(&f, "r", &g, &lim()).unwrap();
        assert!(r.container.validate().is_valid());
    }

    #[test]
    fn extension_examples() {
        let x = Arc::new(bz2());
        let args = BTreeMap::from([(X.to_string(), x.clone())]);
        let e = extension(&idc(), &args, &lim()).unwrap();
        assert_eq!(equiv_invariant(&e), equiv_invariant(&x));
        let args = BTreeMap::from([(X.to_string(), Arc::new(disc(3)))]);
        let e = extension(&single_shape(&[X], &[2]), &args, &lim()).unwrap();
        assert!(e.is_discrete());
        assert_eq!(e.num_objects(), 9);
    }
}
